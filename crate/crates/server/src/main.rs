use std::net::SocketAddr;

use clap::Parser;

use delve::Tier;
use delve_server::{bind, serve, ServerConfig};

/// WebSocket session service for the delve environment.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8765")]
    bind: SocketAddr,
    /// classic or extended.
    #[arg(long, default_value = "extended")]
    tier: String,
    /// Seed of the first episode on each connection.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args = Args::parse();
    let tier = Tier::parse(&args.tier)?;
    let listener = bind(args.bind).await?;
    eprintln!("delve-server listening on ws://{}", listener.local_addr()?);
    serve(listener, ServerConfig { tier, seed: args.seed }).await?;
    Ok(())
}
