//! One interactive episode per WebSocket connection, driven by JSON
//! messages. `Session` holds the protocol logic; `serve` is the transport.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use tokio::net::TcpListener;

use delve::codec::{from_bytes, to_bytes};
use delve::engine::{reset, step_mut};
use delve::obs::{decode_symbolic, encode_symbolic, layout_manifest, render_text, render_tiles};
use delve::{generate_world, Action, GameState, LevelParams, RngStream, Tier};

pub const PROTOCOL_VERSION: u32 = 1;
/// Pixels per tile in frames sent to clients.
pub const TILE_PX: u8 = 16;

#[derive(Deserialize)]
#[serde(tag = "t", rename_all = "snake_case")]
enum Request {
    Hello,
    Reset {
        #[serde(default)]
        seed: Option<u64>,
    },
    Step {
        action: i64,
    },
    Save,
    Load {
        blob: String,
        #[serde(default)]
        reward_total: f64,
    },
}

/// Starts an episode the same way a direct engine caller would: world from
/// `LevelParams::new(seed, tier)`, engine stream `RngStream::from_seed(seed)`.
pub fn start_episode(seed: u64, tier: Tier) -> GameState {
    let world = Arc::new(generate_world(&LevelParams::new(seed, tier)));
    reset(world, tier, RngStream::from_seed(seed)).expect("world generated for the requested tier")
}

pub struct Session {
    tier: Tier,
    next_seed: u64,
    state: GameState,
    reward_total: f64,
}

impl Session {
    /// Opens a session with an episode already started at `seed`.
    pub fn new(tier: Tier, seed: u64) -> Self {
        Session { tier, next_seed: seed.wrapping_add(1), state: start_episode(seed, tier), reward_total: 0.0 }
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn hello(&self) -> Value {
        let count = self.tier.action_count();
        let actions: Vec<Value> =
            Action::ALL[..count].iter().map(|a| json!({"id": a.id(), "name": a.name(), "key": a.key()})).collect();
        json!({
            "t": "hello",
            "protocol": PROTOCOL_VERSION,
            "tier": self.tier.name(),
            "tile_px": TILE_PX,
            "actions": actions,
        })
    }

    /// State message for the current episode.
    pub fn state_message(&self) -> Value {
        let s = &self.state;
        let frame = render_tiles(s, TILE_PX).expect("supported tile size");
        let decoded = decode_symbolic(layout_manifest(s.tier), &encode_symbolic(s)).expect("fresh encoding decodes");
        let inv: Map<String, Value> = decoded.fields.into_iter().map(|(k, v)| (k, json!(v))).collect();
        let achievements: Vec<&str> = s.achievements.iter().map(|a| a.name()).collect();
        json!({
            "t": "state",
            "time": s.time,
            "obs_text": render_text(s),
            "tiles": {"w": frame.width, "h": frame.height, "rgb_base64": B64.encode(&frame.rgb)},
            "inv": inv,
            "achievements": achievements,
            "reward_total": self.reward_total,
            "done": s.done,
        })
    }

    /// Handles one client message and returns the reply. Never fails: bad
    /// input yields an error message and leaves the session as it was.
    pub fn handle(&mut self, text: &str) -> Value {
        match serde_json::from_str::<Request>(text) {
            Ok(req) => self.apply(req),
            Err(e) => error(format!("malformed message: {e}")),
        }
    }

    fn apply(&mut self, req: Request) -> Value {
        match req {
            Request::Hello => self.hello(),
            Request::Reset { seed } => {
                let seed = seed.unwrap_or(self.next_seed);
                self.next_seed = seed.wrapping_add(1);
                self.state = start_episode(seed, self.tier);
                self.reward_total = 0.0;
                self.state_message()
            }
            Request::Step { action } => {
                let Ok(action) = u8::try_from(action) else {
                    return error(format!("invalid action {action}"));
                };
                match step_mut(&mut self.state, action) {
                    Ok(r) => {
                        self.reward_total += r.reward as f64;
                        let mut msg = self.state_message();
                        msg["reward"] = json!(r.reward);
                        msg["unlocked"] = json!(r.newly_unlocked.iter().map(|a| a.name()).collect::<Vec<_>>());
                        msg
                    }
                    Err(e) => error(e.to_string()),
                }
            }
            Request::Save => json!({
                "t": "saved",
                "blob": B64.encode(to_bytes(&self.state)),
                "reward_total": self.reward_total,
            }),
            Request::Load { blob, reward_total } => {
                let bytes = match B64.decode(blob.as_bytes()) {
                    Ok(b) => b,
                    Err(e) => return error(format!("blob is not base64: {e}")),
                };
                match from_bytes::<GameState>(&bytes) {
                    Ok(s) if s.tier != self.tier => {
                        error(format!("blob holds a {} state; session is {}", s.tier.name(), self.tier.name()))
                    }
                    Ok(s) => {
                        self.state = s;
                        self.reward_total = reward_total;
                        self.state_message()
                    }
                    Err(e) => error(e.to_string()),
                }
            }
        }
    }
}

fn error(msg: String) -> Value {
    json!({"t": "error", "msg": msg})
}

#[derive(Clone, Copy, Debug)]
pub struct ServerConfig {
    pub tier: Tier,
    pub seed: u64,
}

pub fn router(cfg: ServerConfig) -> Router {
    Router::new().route("/", get(upgrade)).with_state(cfg)
}

async fn upgrade(ws: WebSocketUpgrade, State(cfg): State<ServerConfig>) -> Response {
    ws.on_upgrade(move |socket| run_session(socket, cfg))
}

async fn send(socket: &mut WebSocket, v: Value) -> bool {
    socket.send(Message::Text(v.to_string().into())).await.is_ok()
}

async fn run_session(mut socket: WebSocket, cfg: ServerConfig) {
    let mut session = Session::new(cfg.tier, cfg.seed);
    if !send(&mut socket, session.hello()).await || !send(&mut socket, session.state_message()).await {
        return;
    }
    while let Some(Ok(msg)) = socket.recv().await {
        let reply = match msg {
            Message::Text(t) => session.handle(t.as_str()),
            Message::Binary(_) => error("binary frames are not part of the protocol".into()),
            Message::Close(_) => break,
            _ => continue,
        };
        if !send(&mut socket, reply).await {
            break;
        }
    }
}

/// Serves sessions on an already bound listener until the task is dropped.
pub async fn serve(listener: TcpListener, cfg: ServerConfig) -> std::io::Result<()> {
    axum::serve(listener, router(cfg)).await
}

pub async fn bind(addr: SocketAddr) -> std::io::Result<TcpListener> {
    TcpListener::bind(addr).await
}
