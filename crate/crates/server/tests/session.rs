use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use serde_json::{json, Value};

use delve::bench::scripted_action;
use delve::engine::step_mut;
use delve::{RngStream, Tier};
use delve_server::{start_episode, Session, TILE_PX};

fn send(s: &mut Session, v: Value) -> Value {
    s.handle(&v.to_string())
}

#[test]
fn fresh_reset_has_zero_reward() {
    let mut s = Session::new(Tier::Extended, 0);
    let m = send(&mut s, json!({"t": "reset", "seed": 5}));
    assert_eq!(m["t"], "state");
    assert_eq!(m["done"], false);
    assert_eq!(m["reward_total"], 0.0);
    assert_eq!(m["achievements"], json!([]));
    assert_eq!(m["obs_text"].as_array().unwrap()[0].as_str().map(str::is_empty), Some(false));
}

#[test]
fn frames_are_sixteen_pixel_tiles() {
    let s = Session::new(Tier::Classic, 1);
    let m = s.state_message();
    let (w, h) = (m["tiles"]["w"].as_u64().unwrap(), m["tiles"]["h"].as_u64().unwrap());
    assert_eq!(w, 9 * TILE_PX as u64);
    let rgb = B64.decode(m["tiles"]["rgb_base64"].as_str().unwrap()).unwrap();
    assert_eq!(rgb.len() as u64, w * h * 3);
}

#[test]
fn hello_lists_the_key_table() {
    let mut s = Session::new(Tier::Extended, 0);
    let m = send(&mut s, json!({"t": "hello", "client": "test", "extra": 1}));
    assert_eq!(m["protocol"], 1);
    let actions = m["actions"].as_array().unwrap();
    assert_eq!(actions.len(), 43);
    assert_eq!(actions[5], json!({"id": 5, "name": "DO", "key": " "}));
    assert_eq!(actions[39]["key"], "]");
    let classic = Session::new(Tier::Classic, 0).hello();
    assert_eq!(classic["actions"].as_array().unwrap().len(), 17);
}

#[test]
fn bad_messages_keep_the_session() {
    let mut s = Session::new(Tier::Classic, 2);
    for bad in [
        "not json",
        r#"{"t":"fly"}"#,
        r#"{"t":"step"}"#,
        r#"{"t":"step","action":17}"#,
        r#"{"t":"step","action":-1}"#,
        r#"{"t":"load","blob":"@@"}"#,
        r#"{"t":"load","blob":"AAAA"}"#,
    ] {
        let m = s.handle(bad);
        assert_eq!(m["t"], "error", "{bad}");
        assert!(m["msg"].as_str().is_some());
    }
    assert_eq!(s.state().time, 0);
    let m = send(&mut s, json!({"t": "step", "action": 0, "ignored": true}));
    assert_eq!(m["time"], 1);
}

#[test]
fn scripted_messages_reach_collect_wood() {
    let mut s = Session::new(Tier::Classic, 0);
    send(&mut s, json!({"t": "reset", "seed": 3}));
    let mut rng = RngStream::from_seed(3);
    for _ in 0..500 {
        let a = scripted_action(s.state(), &mut rng);
        let before = s.state().player.health_tenths();
        let m = send(&mut s, json!({"t": "step", "action": a.id()}));
        if m["unlocked"] == json!(["COLLECT_WOOD"]) {
            let health = (s.state().player.health_tenths() - before) as f64 / 100.0;
            assert!((m["reward"].as_f64().unwrap() - (1.0 + health)).abs() < 1e-6);
            if health == 0.0 {
                assert_eq!(m["reward"], 1.0);
            }
            return;
        }
    }
    panic!("COLLECT_WOOD not reached");
}

#[test]
fn save_then_load_replays_identically() {
    let mut s = Session::new(Tier::Extended, 9);
    for a in [1u8, 3, 5, 5, 2, 4] {
        send(&mut s, json!({"t": "step", "action": a}));
    }
    let saved = send(&mut s, json!({"t": "save"}));
    assert_eq!(saved["t"], "saved");
    let actions: Vec<u8> = (0..80).map(|i| (i * 7 % 43) as u8).collect();
    let run = |s: &mut Session| actions.iter().map(|&a| send(s, json!({"t": "step", "action": a}))).collect::<Vec<_>>();
    let first = run(&mut s);
    let loaded = send(&mut s, json!({"t": "load", "blob": saved["blob"], "reward_total": saved["reward_total"]}));
    assert_eq!(loaded["t"], "state");
    assert_eq!(run(&mut s), first);

    let mut classic = Session::new(Tier::Classic, 9);
    assert_eq!(send(&mut classic, json!({"t": "load", "blob": saved["blob"]}))["t"], "error");
}

#[test]
fn session_matches_engine_direct_trace() {
    let mut s = Session::new(Tier::Classic, 0);
    send(&mut s, json!({"t": "reset", "seed": 11}));
    let mut direct = start_episode(11, Tier::Classic);
    let mut rng = RngStream::from_seed(99);
    let mut total = 0.0f64;
    for _ in 0..500 {
        if direct.done {
            assert_eq!(send(&mut s, json!({"t": "step", "action": 0}))["t"], "error");
            break;
        }
        let a = scripted_action(&direct, &mut rng).id();
        let r = step_mut(&mut direct, a).unwrap();
        total += r.reward as f64;
        let m = send(&mut s, json!({"t": "step", "action": a}));
        assert_eq!(m["reward"].as_f64().unwrap(), r.reward as f64);
        assert_eq!(m["done"], r.done);
        assert_eq!(m["reward_total"].as_f64().unwrap(), total);
    }
    assert_eq!(s.state(), &direct);
}
