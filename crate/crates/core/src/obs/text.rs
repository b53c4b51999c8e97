//! Textual rendering of the visible window and player status.

use super::symbolic::{creature_at, raw_fields, view_positions, visible_light};
use crate::engine::{Direction, GameState, LIGHT_THRESHOLD};

/// One line per visible tile in row-major order (`"<creature> on <item> on
/// <block>"`, or `"darkness"`), then one `"NAME: value"` line per status
/// field.
pub fn render_text(state: &GameState) -> Vec<String> {
    let mut lines = Vec::new();
    for p in view_positions(state) {
        if visible_light(state, p) < LIGHT_THRESHOLD {
            lines.push("darkness".to_string());
            continue;
        }
        let creature = creature_at(state, p).map_or("none", |k| k.name());
        lines.push(format!("{} on {} on {}", creature, state.item(p).name(), state.block(p).name()));
    }
    for (name, value) in raw_fields(state) {
        let name = name.to_ascii_uppercase();
        if name == "DIRECTION" {
            let d = match Direction::ALL[value as usize] {
                Direction::Left => "left",
                Direction::Right => "right",
                Direction::Up => "up",
                Direction::Down => "down",
            };
            lines.push(format!("{name}: {d}"));
        } else {
            lines.push(format!("{name}: {value}"));
        }
    }
    lines
}
