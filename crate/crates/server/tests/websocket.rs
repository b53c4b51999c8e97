use futures::{SinkExt, StreamExt};
use serde_json::{json, Value};
use tokio_tungstenite::tungstenite::Message;

use delve::bench::scripted_action;
use delve::engine::step_mut;
use delve::{RngStream, Tier};
use delve_server::{bind, serve, start_episode, ServerConfig};

async fn next_json<S>(ws: &mut S) -> Value
where
    S: StreamExt<Item = Result<Message, tokio_tungstenite::tungstenite::Error>> + Unpin,
{
    loop {
        match ws.next().await.unwrap().unwrap() {
            Message::Text(t) => return serde_json::from_str(t.as_str()).unwrap(),
            Message::Binary(_) => panic!("binary frame"),
            _ => continue,
        }
    }
}

#[tokio::test]
async fn sessions_over_websocket() {
    let listener = bind("127.0.0.1:0".parse().unwrap()).await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(serve(listener, ServerConfig { tier: Tier::Classic, seed: 4 }));
    let url = format!("ws://{addr}/");

    let (mut a, _) = tokio_tungstenite::connect_async(url.as_str()).await.unwrap();
    let (mut b, _) = tokio_tungstenite::connect_async(url.as_str()).await.unwrap();
    for ws in [&mut a, &mut b] {
        assert_eq!(next_json(ws).await["t"], "hello");
        let st = next_json(ws).await;
        assert_eq!(st["t"], "state");
        assert_eq!(st["time"], 0);
    }

    for action in [1, 1, 5, 3] {
        a.send(Message::Text(json!({"t": "step", "action": action}).to_string().into())).await.unwrap();
        let m = next_json(&mut a).await;
        assert_eq!(m["t"], "state");
        assert!(m["reward"].is_number());
        assert!(m["unlocked"].is_array());
    }
    a.send(Message::Text("{oops".into())).await.unwrap();
    assert_eq!(next_json(&mut a).await["t"], "error");
    a.send(Message::Text(json!({"t": "step", "action": 0}).to_string().into())).await.unwrap();
    assert_eq!(next_json(&mut a).await["time"], 5);

    b.send(Message::Text(json!({"t": "step", "action": 0}).to_string().into())).await.unwrap();
    assert_eq!(next_json(&mut b).await["time"], 1);

    b.send(Message::Text(json!({"t": "reset", "seed": 8}).to_string().into())).await.unwrap();
    let m = next_json(&mut b).await;
    assert_eq!((m["time"].as_u64(), m["reward_total"].as_f64()), (Some(0), Some(0.0)));
}

#[tokio::test]
async fn scripted_session_reproduces_engine_rewards() {
    let listener = bind("127.0.0.1:0".parse().unwrap()).await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(serve(listener, ServerConfig { tier: Tier::Extended, seed: 21 }));
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/")).await.unwrap();
    next_json(&mut ws).await;
    next_json(&mut ws).await;

    let mut direct = start_episode(21, Tier::Extended);
    let mut rng = RngStream::from_seed(7);
    let mut steps = 0;
    while steps < 500 && !direct.done {
        let a = scripted_action(&direct, &mut rng).id();
        let r = step_mut(&mut direct, a).unwrap();
        ws.send(Message::Text(json!({"t": "step", "action": a}).to_string().into())).await.unwrap();
        let m = next_json(&mut ws).await;
        assert_eq!(m["reward"].as_f64().unwrap(), r.reward as f64, "step {steps}");
        assert_eq!(m["done"], r.done);
        steps += 1;
    }
    assert!(steps >= 100, "episode ended after {steps} steps");
}
