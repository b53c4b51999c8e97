use std::sync::Arc;

use proptest::prelude::*;

use super::tables::{Achievement as A, Action, Block, CreatureClass, CreatureKind, Item};
use super::*;
use crate::worldgen::{generate_world, necromancer_pos, LevelParams};

fn world(seed: u64, tier: Tier) -> Arc<World> {
    Arc::new(generate_world(&LevelParams::new(seed, tier)))
}

fn fresh(seed: u64, tier: Tier) -> GameState {
    reset(world(seed, tier), tier, RngStream::from_seed(seed ^ 0x5eed)).unwrap()
}

fn clear_mobs(s: &mut GameState) {
    for fc in &mut s.creatures {
        for a in &mut fc.arrays {
            for lane in 0..a.capacity as usize {
                a.kill(lane);
            }
            a.clear_dead();
        }
    }
}

/// A state with the player in the middle of a 15x15 patch of `ground` on
/// `floor`, no creatures, facing right.
fn arena(tier: Tier, floor: usize, ground: Block) -> GameState {
    let mut s = fresh(11, tier);
    s.player.floor = floor as u8;
    let centre = Pos::new(s.rows() as i16 / 2, s.cols() as i16 / 2);
    s.player.pos = centre;
    s.player.facing = Direction::Right;
    for dr in -7..=7 {
        for dc in -7..=7 {
            let p = centre.offset(dr, dc);
            s.set_block(p, ground);
            s.set_item(p, Item::None);
        }
    }
    clear_mobs(&mut s);
    s
}

fn right_of_player(s: &GameState) -> Pos {
    s.player.pos.offset(0, 1)
}

fn act(s: &mut GameState, a: Action) -> StepReport {
    step_mut(s, a.id()).unwrap()
}

#[test]
fn reset_initial_conditions() {
    for tier in [Tier::Classic, Tier::Extended] {
        let w = world(3, tier);
        let a = reset(w.clone(), tier, RngStream::from_seed(1)).unwrap();
        let b = reset(w.clone(), tier, RngStream::from_seed(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.achievements.bits, 0);
        assert_eq!(a.player.pos, w.floors[0].spawn);
        assert_eq!(a.player.floor, 0);
        assert_eq!(a.time, 0);
        assert_eq!(a.player.xp, 0);
        assert_eq!((a.player.dexterity, a.player.strength, a.player.intelligence), (1, 1, 1));
        assert_eq!(a.player.health, a.player.max_health(tier));
        assert_eq!(a.inventory, Inventory::default());
        assert!(a.visited(0));
    }
}

#[test]
fn reset_rejects_tier_mismatch() {
    let w = world(3, Tier::Classic);
    assert!(matches!(reset(w, Tier::Extended, RngStream::from_seed(0)), Err(Error::TierMismatch { .. })));
}

#[test]
fn invalid_action_and_done_state_are_errors() {
    let mut s = fresh(5, Tier::Classic);
    assert!(matches!(step_mut(&mut s, 17), Err(Error::InvalidAction { action: 17, count: 17 })));
    let mut e = fresh(5, Tier::Extended);
    assert!(step_mut(&mut e, 42).is_ok());
    assert!(step_mut(&mut e, 43).is_err());
    s.done = true;
    assert!(matches!(step_mut(&mut s, 0), Err(Error::EpisodeDone)));
}

#[test]
fn first_wood_rewards_one() {
    for tier in [Tier::Classic, Tier::Extended] {
        let mut s = arena(tier, 0, Block::Grass);
        let t = right_of_player(&s);
        s.set_block(t, Block::Tree);
        let r = act(&mut s, Action::Do);
        assert_eq!(r.newly_unlocked, vec![A::CollectWood]);
        assert_eq!(r.reward, 1.0);
        assert_eq!(s.inventory.wood, 1);
        // Second collection adds wood but no reward.
        let r = act(&mut s, Action::Do);
        assert_eq!(r.reward, 0.0);
        assert_eq!(s.inventory.wood, 2);
    }
}

#[test]
fn crafting_without_wood_is_noop() {
    let mut s = arena(Tier::Classic, 0, Block::Grass);
    let t = right_of_player(&s);
    s.set_block(t, Block::CraftingTable);
    let before = s.clone();
    let r = act(&mut s, Action::MakeWoodPickaxe);
    assert_eq!(r.reward, 0.0);
    assert!(r.newly_unlocked.is_empty());
    assert_eq!(s.player.pickaxe_tier, 0);
    assert_eq!(s.inventory, before.inventory);
    assert_eq!(s.floors[0].blocks, before.floors[0].blocks);

    s.inventory.wood = 1;
    let r = act(&mut s, Action::MakeWoodPickaxe);
    assert_eq!(r.newly_unlocked, vec![A::MakeWoodPickaxe]);
    assert_eq!((s.player.pickaxe_tier, s.inventory.wood), (1, 0));
}

#[test]
fn zombie_hit_costs_two_tenths() {
    let mut s = arena(Tier::Classic, 0, Block::Grass);
    let mut z = Creature::new(CreatureKind::Zombie, right_of_player(&s));
    z.cooldown = 0;
    s.here_mut().class_mut(CreatureClass::Melee).insert(z);
    let h = s.player.health;
    let r = act(&mut s, Action::Noop);
    assert_eq!(s.player.health, h - 2.0);
    assert!((r.reward + 0.2).abs() < 1e-6);
    assert_eq!(r.info.health_delta_tenths, -20);
}

#[test]
fn idle_daytime_step_is_neutral() {
    let mut s = arena(Tier::Extended, 0, Block::Grass);
    let r = act(&mut s, Action::Noop);
    assert_eq!(r.reward, 0.0);
    assert!(!r.done);
}

#[test]
fn descending_grants_xp_once() {
    let mut s = fresh(21, Tier::Extended);
    let down = s.world.floors[0].ladder_down.unwrap();
    assert_eq!(s.item(down), Item::LadderDown);
    s.player.pos = down;
    clear_mobs(&mut s);
    let r = act(&mut s, Action::Descend);
    assert_eq!(s.player.floor, 1);
    assert_eq!(s.player.xp, 1);
    assert_eq!(r.newly_unlocked, vec![A::EnterDungeon]);
    assert!((r.reward - 3.0).abs() < 1e-6);
    assert_eq!(s.player.pos, s.world.floors[1].ladder_up.unwrap());

    act(&mut s, Action::Ascend);
    assert_eq!(s.player.floor, 0);
    act(&mut s, Action::Descend);
    assert_eq!(s.player.floor, 1);
    assert_eq!(s.player.xp, 1);
}

#[test]
fn descend_requires_ladder() {
    let mut s = arena(Tier::Extended, 0, Block::Grass);
    act(&mut s, Action::Descend);
    assert_eq!(s.player.floor, 0);
}

#[test]
fn level_up_caps_at_five() {
    let mut s = arena(Tier::Extended, 0, Block::Grass);
    s.player.xp = 1;
    s.player.strength = 5;
    act(&mut s, Action::LevelUpStrength);
    assert_eq!((s.player.strength, s.player.xp), (5, 1));
    act(&mut s, Action::LevelUpDexterity);
    assert_eq!((s.player.dexterity, s.player.xp), (2, 0));
    act(&mut s, Action::LevelUpIntelligence);
    assert_eq!(s.player.intelligence, 1);
}

#[test]
fn ice_enchant_on_sword() {
    let mut s = arena(Tier::Extended, 0, Block::Grass);
    let t = right_of_player(&s);
    s.set_block(t, Block::EnchantmentTableIce);
    s.player.sword_tier = 1;
    s.player.mana = ENCHANT_MANA_COST;
    s.inventory.sapphire = 1;
    let r = act(&mut s, Action::EnchantSword);
    assert_eq!(s.player.sword_enchant, Enchant::Ice);
    assert_eq!(s.inventory.sapphire, 0);
    assert_eq!(s.player.mana, 0.0);
    assert_eq!(r.newly_unlocked, vec![A::EnchantSword]);
    assert_eq!(player_melee_damage(&s.player).ice, 1.0);
}

#[test]
fn enchant_needs_gem_and_mana() {
    let mut s = arena(Tier::Extended, 0, Block::Grass);
    let t = right_of_player(&s);
    s.set_block(t, Block::EnchantmentTableFire);
    s.player.sword_tier = 1;
    s.player.mana = ENCHANT_MANA_COST;
    s.inventory.sapphire = 1;
    act(&mut s, Action::EnchantSword);
    assert_eq!(s.player.sword_enchant, Enchant::None);
    s.inventory.ruby = 1;
    s.player.mana = ENCHANT_MANA_COST - 1.0;
    act(&mut s, Action::EnchantSword);
    assert_eq!(s.player.sword_enchant, Enchant::None);
}

#[test]
fn aligned_skeleton_fires() {
    let mut s = arena(Tier::Classic, 0, Block::Path);
    let mut k = Creature::new(CreatureKind::Skeleton, s.player.pos.offset(0, 3));
    k.cooldown = 0;
    s.here_mut().class_mut(CreatureClass::Ranged).insert(k);
    act(&mut s, Action::Noop);
    let shots: Vec<_> = s.here().class(CreatureClass::MobProjectile).iter().collect();
    assert_eq!(shots.len(), 1);
    assert_eq!(shots[0].kind, CreatureKind::Arrow);
    assert_eq!(shots[0].dir, (0, -1));

    // The arrow travels toward the player and lands.
    let h = s.player.health;
    for _ in 0..3 {
        let arr = s.here_mut().class_mut(CreatureClass::Ranged);
        arr.kill(0);
        arr.clear_dead();
        act(&mut s, Action::Noop);
    }
    assert!(s.player.health < h);
}

#[test]
fn blocked_skeleton_holds_fire() {
    let mut s = arena(Tier::Classic, 0, Block::Path);
    let p = s.player.pos;
    s.set_block(p.offset(0, 2), Block::Stone);
    let mut k = Creature::new(CreatureKind::Skeleton, p.offset(0, 3));
    k.cooldown = 0;
    s.here_mut().class_mut(CreatureClass::Ranged).insert(k);
    act(&mut s, Action::Noop);
    assert_eq!(s.here().class(CreatureClass::MobProjectile).live_count(), 0);
}

#[test]
fn cows_never_hurt() {
    let mut s = arena(Tier::Classic, 0, Block::Grass);
    for i in 0..3 {
        let c = Creature::new(CreatureKind::Cow, s.player.pos.offset(i - 1, 1));
        s.here_mut().class_mut(CreatureClass::Passive).insert(c);
    }
    // Short enough that no survival stat runs out.
    for _ in 0..150 {
        for class in [CreatureClass::Melee, CreatureClass::Ranged, CreatureClass::MobProjectile] {
            let arr = s.here_mut().class_mut(class);
            for lane in 0..arr.capacity as usize {
                arr.kill(lane);
            }
        }
        let r = act(&mut s, Action::Noop);
        assert!(r.info.health_delta_tenths >= 0);
    }
}

#[test]
fn eating_a_cow() {
    let mut s = arena(Tier::Classic, 0, Block::Grass);
    s.player.food = 2.0;
    let mut c = Creature::new(CreatureKind::Cow, right_of_player(&s));
    c.health = 1.0;
    s.here_mut().class_mut(CreatureClass::Passive).insert(c);
    let r = act(&mut s, Action::Do);
    assert_eq!(r.newly_unlocked, vec![A::EatCow]);
    assert_eq!(s.here().class(CreatureClass::Passive).live_count(), 0);
    assert_eq!(s.player.food, 8.0);
}

fn quiet(s: &mut GameState) {
    clear_mobs(s);
}

#[test]
fn starvation_costs_one_health_per_period() {
    let mut s = arena(Tier::Classic, 0, Block::Grass);
    s.player.food = 0.0;
    let h = s.player.health;
    let mut total = 0.0;
    for i in 1..=15 {
        quiet(&mut s);
        let r = act(&mut s, Action::Noop);
        total += r.reward;
        if i < 15 {
            assert_eq!(s.player.health, h, "step {i}");
        }
    }
    assert_eq!(s.player.health, h - 1.0);
    assert!((total + 0.1).abs() < 1e-6);
}

fn steps_until_hungry(dex: u8) -> u32 {
    let mut s = arena(Tier::Extended, 0, Block::Grass);
    s.player.dexterity = dex;
    let food = s.player.food;
    let mut n = 0;
    while s.player.food == food {
        quiet(&mut s);
        act(&mut s, Action::Noop);
        n += 1;
    }
    n
}

#[test]
fn dexterity_scales_hunger_interval() {
    let one = steps_until_hungry(1);
    let five = steps_until_hungry(5);
    assert_eq!(five, 5 * one);
}

#[test]
fn full_stats_take_no_damage() {
    let mut s = arena(Tier::Extended, 0, Block::Grass);
    for _ in 0..100 {
        quiet(&mut s);
        let r = act(&mut s, Action::Noop);
        assert!(r.info.health_delta_tenths >= 0);
    }
}

#[test]
fn sleep_restores_energy_and_wakes() {
    let mut s = arena(Tier::Classic, 0, Block::Grass);
    s.player.energy = s.player.max_food(Tier::Classic) - 2.0;
    act(&mut s, Action::Sleep);
    assert!(s.player.sleeping);
    let mut woke = false;
    for _ in 0..40 {
        quiet(&mut s);
        let r = act(&mut s, Action::Left);
        if r.newly_unlocked.contains(&A::WakeUp) {
            woke = true;
            break;
        }
        // Movement is suppressed while asleep.
        assert_eq!(s.player.facing, Direction::Right);
    }
    assert!(woke);
    assert!(!s.player.sleeping);
}

#[test]
fn lava_is_fatal() {
    let mut s = arena(Tier::Classic, 0, Block::Grass);
    let t = right_of_player(&s);
    s.set_block(t, Block::Lava);
    let r = act(&mut s, Action::Right);
    assert!(r.done);
    assert!(s.player.health <= 0.0);
}

#[test]
fn place_then_collect_conserves_stone() {
    let mut s = arena(Tier::Classic, 0, Block::Grass);
    s.inventory.stone = 3;
    s.player.pickaxe_tier = 1;
    let t = right_of_player(&s);
    act(&mut s, Action::PlaceStone);
    assert_eq!(s.block(t), Block::Stone);
    assert_eq!(s.inventory.stone, 2);
    act(&mut s, Action::Do);
    assert_eq!(s.block(t), Block::Path);
    assert_eq!(s.inventory.stone, 3);
}

#[test]
fn torches_light_dark_floors() {
    let mut s = arena(Tier::Extended, 1, Block::Path);
    let f = s.floor();
    let n = s.rows() as usize * s.cols() as usize;
    s.floors[f].torches.clear();
    // Dungeon light comes from torches only in this arena.
    let mut w = (*s.world).clone();
    w.floors[f].light_base = vec![0.0; n];
    s.world = Arc::new(w);
    let t = right_of_player(&s);
    assert_eq!(tile_light(&s, t), 0.0);
    s.inventory.torch = 1;
    act(&mut s, Action::PlaceTorch);
    assert_eq!(s.item(t), Item::Torch);
    assert_eq!(tile_light(&s, t), 1.0);
    assert!((tile_light(&s, t.offset(0, 2)) - 0.5).abs() < 1e-6);
    assert_eq!(tile_light(&s, t.offset(0, 4)), 0.0);
}

fn to_graveyard() -> GameState {
    let mut s = fresh(31, Tier::Extended);
    let down = s.world.floors[7].ladder_down.unwrap();
    s.player.floor = 7;
    s.player.pos = down;
    s.floors_visited = 0xff;
    s.set_item(down, Item::LadderDown);
    clear_mobs(&mut s);
    s
}

#[test]
fn entering_graveyard_rewards_eight() {
    let mut s = to_graveyard();
    let r = act(&mut s, Action::Descend);
    assert_eq!(s.player.floor as usize, BOSS_FLOOR);
    assert!(r.newly_unlocked.contains(&A::EnterGraveyard));
    assert_eq!(r.newly_unlocked.len(), 1);
    assert!((r.reward - 8.0 - 0.01 * r.info.health_delta_tenths as f32).abs() < 1e-6);
}

/// Player on the boss floor directly below the necromancer, facing it.
fn before_boss() -> GameState {
    let mut s = to_graveyard();
    act(&mut s, Action::Descend);
    let n = necromancer_pos(s.world.params.dims);
    s.player.pos = n.offset(1, 0);
    s.set_block(s.player.pos, Block::Path);
    s.player.facing = Direction::Up;
    s
}

#[test]
fn necromancer_ignores_hits_while_shielded() {
    let mut s = before_boss();
    let n = necromancer_pos(s.world.params.dims);
    assert_eq!(s.block(n), Block::Necromancer);
    assert_eq!(Block::Necromancer.id(), 32);
    assert!(!s.boss.vulnerable);
    let health = s.boss.health;
    let r = act(&mut s, Action::Do);
    assert_eq!(s.boss.health, health);
    assert!(!r.newly_unlocked.contains(&A::DamageNecromancer));
}

#[test]
fn cleared_wave_exposes_necromancer() {
    let mut s = before_boss();
    let n = necromancer_pos(s.world.params.dims);
    assert!(s.boss.wave_active);
    clear_mobs(&mut s);
    act(&mut s, Action::Noop);
    assert_eq!(s.block(n), Block::NecromancerVulnerable);
    assert_eq!(Block::NecromancerVulnerable.id(), 36);
    assert!(s.boss.vulnerable);

    let r = act(&mut s, Action::Do);
    assert!(r.newly_unlocked.contains(&A::DamageNecromancer));
    assert_eq!(s.boss.health, NECROMANCER_HEALTH - 1);
    assert_eq!(s.block(n), Block::Necromancer);
    assert!(s.boss.wave_active);
}

#[test]
fn necromancer_falls_after_all_waves() {
    let mut s = before_boss();
    let n = necromancer_pos(s.world.params.dims);
    let mut unlocked = vec![];
    for _ in 0..NECROMANCER_HEALTH {
        clear_mobs(&mut s);
        s.player.health = s.player.max_health(s.tier);
        act(&mut s, Action::Noop);
        unlocked.extend(act(&mut s, Action::Do).newly_unlocked);
    }
    assert_eq!(s.boss.health, 0);
    assert!(unlocked.contains(&A::DefeatNecromancer));
    assert!(s.cleared(BOSS_FLOOR));
    assert_eq!(s.block(n), Block::Path);
}

#[test]
fn reward_examples() {
    let s = fresh(1, Tier::Extended);
    assert_eq!(compute_reward(&s, &s, &[A::EnterDungeon]), 3.0);
    assert_eq!(compute_reward(&s, &s, &[A::DefeatNecromancer]), 8.0);
    assert_eq!(compute_reward(&s, &s, &[]), 0.0);
    let c = fresh(1, Tier::Classic);
    assert_eq!(compute_reward(&c, &c, &[A::MakeIronSword]), 1.0);
}

#[test]
fn tier_constants() {
    assert_eq!(Tier::Extended.max_return(), 226);
    assert_eq!(Tier::Classic.max_return(), 22);
    assert_eq!(Tier::Classic.action_count(), 17);
    assert_eq!(Tier::Extended.action_count(), 43);
    assert_eq!(Tier::Classic.achievement_count(), 22);
    assert_eq!(Tier::Extended.achievement_count(), 67);
}

#[test]
fn episode_cap_terminates() {
    let w = world(2, Tier::Classic);
    let mut s = reset_with_limit(w, Tier::Classic, RngStream::from_seed(0), 5).unwrap();
    for i in 1..=5 {
        quiet(&mut s);
        let r = act(&mut s, Action::Noop);
        assert_eq!(r.done, i == 5);
    }
}

fn run(seed: u64, tier: Tier, actions: &[u8]) -> Vec<GameState> {
    let mut s = fresh(seed, tier);
    let mut out = vec![];
    for &a in actions {
        if s.done {
            break;
        }
        step_mut(&mut s, a % tier.action_count() as u8).unwrap();
        out.push(s.clone());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn replay_is_bit_identical(seed in 0u64..1000, actions in prop::collection::vec(0u8..43, 1..200)) {
        let a = run(seed, Tier::Extended, &actions);
        let b = run(seed, Tier::Extended, &actions);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn step_invariants(seed in 0u64..1000, classic in any::<bool>(), actions in prop::collection::vec(0u8..43, 1..300)) {
        let tier = if classic { Tier::Classic } else { Tier::Extended };
        let mut s = fresh(seed, tier);
        let caps = floor_capacities(tier);
        for &a in &actions {
            if s.done {
                break;
            }
            let prev = s.clone();
            let r = step_mut(&mut s, a % tier.action_count() as u8).unwrap();
            prop_assert_eq!(prev.achievements.bits & !s.achievements.bits, 0);
            prop_assert!(s.floors_visited & 1 == 1);
            prop_assert_eq!(prev.floors_visited & !s.floors_visited, 0);
            prop_assert!(s.time <= s.max_episode_length);
            let p = &s.player;
            prop_assert!(p.health <= p.max_health(tier));
            for v in [p.food, p.drink, p.energy] {
                prop_assert!((0.0..=p.max_food(tier)).contains(&v));
            }
            prop_assert!((0.0..=p.max_mana(tier)).contains(&p.mana));
            prop_assert_eq!(r.done, p.health <= 0.0 || s.time >= s.max_episode_length);
            for (f, fc) in s.creatures.iter().enumerate() {
                for (k, arr) in fc.arrays.iter().enumerate() {
                    let cap = if f == BOSS_FLOOR { wave_capacities(tier)[k] } else { caps[k] };
                    prop_assert!(arr.live_count() <= cap as usize);
                }
            }
            let expected: u32 = r.newly_unlocked.iter().map(|&a| tier.achievement_reward(a)).sum();
            let shaped = expected as f64 + 0.01 * r.info.health_delta_tenths as f64;
            prop_assert!((r.reward as f64 - shaped).abs() < 1e-6);
            if tier == Tier::Classic {
                prop_assert!(s.achievements.bits >> 22 == 0);
                prop_assert_eq!(s.player.floor, 0);
                prop_assert!(s.floors[0].blocks.iter().all(|b| (2..17).contains(&b.id()) && *b != Block::Wood));
                prop_assert!(s.here().arrays[4].live_count() == 0);
            }
        }
    }
}
