use super::state::{Enchant, Player};
use super::tables::{Damage, Defense};

/// Damage left after percentage defenses, floored at zero and rounded
/// half-up to one decimal.
pub fn resolve_attack(damage: Damage, defense: Defense) -> f32 {
    let part = |d: f32, pct: f32| d as f64 * (1.0 - pct.clamp(0.0, 100.0) as f64 / 100.0);
    let total = part(damage.phys, defense.phys) + part(damage.fire, defense.fire) + part(damage.ice, defense.ice);
    let total = total.max(0.0);
    ((total * 10.0 + 0.5 + 1e-9).floor() / 10.0) as f32
}

const SWORD_BASE: [f32; 5] = [1.0, 2.0, 3.0, 5.0, 8.0];

fn with_enchant(phys: f32, enchant: Enchant) -> Damage {
    match enchant {
        Enchant::None => Damage::phys(phys),
        Enchant::Fire => Damage::new(phys, phys / 2.0, 0.0),
        Enchant::Ice => Damage::new(phys, 0.0, phys / 2.0),
    }
}

pub fn player_melee_damage(p: &Player) -> Damage {
    let phys = SWORD_BASE[p.sword_tier.min(4) as usize] * (0.5 + p.strength as f32 / 2.0);
    with_enchant(phys, p.sword_enchant)
}

pub fn player_bow_damage(p: &Player) -> Damage {
    with_enchant(3.0 + p.dexterity as f32, p.bow_enchant)
}

pub fn player_spell_damage(p: &Player, fire: bool) -> Damage {
    let v = 6.0 + p.intelligence as f32;
    if fire {
        Damage::new(0.0, v, 0.0)
    } else {
        Damage::new(0.0, 0.0, v)
    }
}

/// 10% physical per armour tier; 20% of an element per piece enchanted
/// with it; each category capped at 80%.
pub fn player_defense(p: &Player) -> Defense {
    let phys: f32 = p.armour.iter().map(|&t| 10.0 * t as f32).sum();
    let count =
        |e: Enchant| p.armour.iter().zip(&p.armour_enchants).filter(|(&t, &en)| t > 0 && en == e).count() as f32;
    Defense::new(phys.min(80.0), (20.0 * count(Enchant::Fire)).min(80.0), (20.0 * count(Enchant::Ice)).min(80.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::tables::CreatureKind;
    use crate::engine::Tier;
    use crate::worldgen::Pos;

    #[test]
    fn zombie_hit_on_bare_player() {
        assert_eq!(resolve_attack(Damage::phys(2.0), Defense::default()), 2.0);
    }

    #[test]
    fn pig_man_against_its_own_defense() {
        let s = CreatureKind::PigMan.stats();
        assert_eq!(resolve_attack(s.damage, s.defense), 0.3);
    }

    #[test]
    fn full_immunity() {
        let d = Damage::new(7.0, 3.0, 2.5);
        assert_eq!(resolve_attack(d, Defense::new(100.0, 100.0, 100.0)), 0.0);
    }

    #[test]
    fn rounds_half_up() {
        assert_eq!(resolve_attack(Damage::phys(0.25), Defense::default()), 0.3);
        assert_eq!(resolve_attack(Damage::phys(1.0), Defense::new(55.0, 0.0, 0.0)), 0.5);
    }

    #[test]
    fn melee_scales_with_sword_and_strength() {
        let mut p = Player::new(Tier::Extended, Pos::default());
        assert_eq!(player_melee_damage(&p).phys, 1.0);
        p.sword_tier = 3;
        assert_eq!(player_melee_damage(&p).phys, 5.0);
        p.strength = 3;
        assert_eq!(player_melee_damage(&p).phys, 10.0);
        p.sword_enchant = Enchant::Ice;
        assert_eq!(player_melee_damage(&p).ice, 5.0);
    }

    #[test]
    fn armour_defense_caps() {
        let mut p = Player::new(Tier::Extended, Pos::default());
        p.armour = [2; 4];
        p.armour_enchants = [Enchant::Fire; 4];
        let d = player_defense(&p);
        assert_eq!((d.phys, d.fire, d.ice), (80.0, 80.0, 0.0));
    }
}
