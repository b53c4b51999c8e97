//! Player action dispatch. Actions whose prerequisites are unmet do nothing.

use super::combat::{player_bow_damage, player_melee_damage, player_spell_damage};
use super::creatures::{damage_mob, hit_necromancer};
use super::state::{q1, Creature, Direction, Enchant, GameState, PlantSlot};
use super::tables::{Achievement as A, Action, Block, CreatureClass, CreatureKind, Item};
use super::{facing_tile, is_necromancer, ENCHANT_MANA_COST, SPELL_MANA_COST};
use crate::worldgen::{Pos, PotionEffect};

/// True if any tile in the 3x3 neighbourhood of the player is `b`.
fn nearby(state: &GameState, b: Block) -> bool {
    let p = state.player.pos;
    for dr in -1..=1 {
        for dc in -1..=1 {
            if state.block(p.offset(dr, dc)) == b {
                return true;
            }
        }
    }
    false
}

fn free_target(state: &GameState) -> Option<Pos> {
    let t = facing_tile(state);
    (state.in_bounds(t) && state.here().mob_at(t).is_none() && state.item(t) == Item::None).then_some(t)
}

pub(crate) fn apply_player_action(state: &mut GameState, action: Action) {
    let action = if state.player.sleeping || state.player.resting { Action::Noop } else { action };
    match action {
        Action::Noop => {}
        Action::Left => move_player(state, Direction::Left),
        Action::Right => move_player(state, Direction::Right),
        Action::Up => move_player(state, Direction::Up),
        Action::Down => move_player(state, Direction::Down),
        Action::Do => do_action(state),
        Action::Sleep => {
            if state.player.energy < state.player.max_food(state.tier) {
                state.player.sleeping = true;
            }
        }
        Action::Rest => {
            if state.player.health < state.player.max_health(state.tier) {
                state.player.resting = true;
            }
        }
        Action::PlaceStone => {
            if let Some(t) = free_target(state) {
                let b = state.block(t);
                let ok = b.is_floor() || matches!(b, Block::Water | Block::Lava);
                if state.inventory.stone >= 1 && ok {
                    state.inventory.stone -= 1;
                    state.set_block(t, Block::Stone);
                    state.unlock(A::PlaceStone);
                }
            }
        }
        Action::PlaceTable => {
            if let Some(t) = free_target(state) {
                if state.inventory.wood >= 1 && state.block(t).is_floor() {
                    state.inventory.wood -= 1;
                    state.set_block(t, Block::CraftingTable);
                    state.unlock(A::PlaceTable);
                }
            }
        }
        Action::PlaceFurnace => {
            if let Some(t) = free_target(state) {
                if state.inventory.stone >= 1 && state.block(t).is_floor() && nearby(state, Block::CraftingTable) {
                    state.inventory.stone -= 1;
                    state.set_block(t, Block::Furnace);
                    state.unlock(A::PlaceFurnace);
                }
            }
        }
        Action::PlacePlant => {
            if let Some(t) = free_target(state) {
                let slot = state.plants.iter().position(|s| !s.alive);
                if let (true, true, Some(slot)) =
                    (state.inventory.sapling >= 1, state.floor() == 0 && state.block(t) == Block::Grass, slot)
                {
                    state.inventory.sapling -= 1;
                    state.set_block(t, Block::Plant);
                    state.plants[slot] = PlantSlot { pos: t, age: 0, alive: true };
                    state.unlock(A::PlacePlant);
                }
            }
        }
        Action::MakeWoodPickaxe => {
            if nearby(state, Block::CraftingTable) && state.inventory.wood >= 1 && state.player.pickaxe_tier < 1 {
                state.inventory.wood -= 1;
                state.player.pickaxe_tier = 1;
                state.unlock(A::MakeWoodPickaxe);
            }
        }
        Action::MakeStonePickaxe => {
            let inv = &state.inventory;
            if nearby(state, Block::CraftingTable) && inv.wood >= 1 && inv.stone >= 1 && state.player.pickaxe_tier < 2 {
                state.inventory.wood -= 1;
                state.inventory.stone -= 1;
                state.player.pickaxe_tier = 2;
                state.unlock(A::MakeStonePickaxe);
            }
        }
        Action::MakeIronPickaxe => {
            if can_smith(state) && iron_kit(state) && state.player.pickaxe_tier < 3 {
                spend_iron_kit(state);
                state.player.pickaxe_tier = 3;
                state.unlock(A::MakeIronPickaxe);
            }
        }
        Action::MakeWoodSword => {
            if nearby(state, Block::CraftingTable) && state.inventory.wood >= 1 && state.player.sword_tier < 1 {
                state.inventory.wood -= 1;
                state.player.sword_tier = 1;
                state.unlock(A::MakeWoodSword);
            }
        }
        Action::MakeStoneSword => {
            let inv = &state.inventory;
            if nearby(state, Block::CraftingTable) && inv.wood >= 1 && inv.stone >= 1 && state.player.sword_tier < 2 {
                state.inventory.wood -= 1;
                state.inventory.stone -= 1;
                state.player.sword_tier = 2;
                state.unlock(A::MakeStoneSword);
            }
        }
        Action::MakeIronSword => {
            if can_smith(state) && iron_kit(state) && state.player.sword_tier < 3 {
                spend_iron_kit(state);
                state.player.sword_tier = 3;
                state.unlock(A::MakeIronSword);
            }
        }
        Action::Descend => descend(state),
        Action::Ascend => ascend(state),
        Action::MakeDiamondPickaxe => {
            if can_smith(state)
                && state.inventory.wood >= 1
                && state.inventory.diamond >= 3
                && state.player.pickaxe_tier < 4
            {
                state.inventory.wood -= 1;
                state.inventory.diamond -= 3;
                state.player.pickaxe_tier = 4;
                state.unlock(A::MakeDiamondPickaxe);
            }
        }
        Action::MakeDiamondSword => {
            if can_smith(state)
                && state.inventory.wood >= 1
                && state.inventory.diamond >= 2
                && state.player.sword_tier < 4
            {
                state.inventory.wood -= 1;
                state.inventory.diamond -= 2;
                state.player.sword_tier = 4;
                state.unlock(A::MakeDiamondSword);
            }
        }
        Action::MakeIronArmour => {
            let slot = state.player.armour.iter().position(|&t| t < 1);
            if let (true, Some(slot)) =
                (can_smith(state) && state.inventory.iron >= 3 && state.inventory.coal >= 3, slot)
            {
                state.inventory.iron -= 3;
                state.inventory.coal -= 3;
                state.player.armour[slot] = 1;
                state.unlock(A::MakeIronArmour);
            }
        }
        Action::MakeDiamondArmour => {
            let slot = state.player.armour.iter().position(|&t| t < 2);
            if let (true, Some(slot)) = (can_smith(state) && state.inventory.diamond >= 3, slot) {
                state.inventory.diamond -= 3;
                state.player.armour[slot] = 2;
                state.unlock(A::MakeDiamondArmour);
            }
        }
        Action::ShootArrow => {
            if state.player.bow && state.inventory.arrow >= 1 {
                let damage = player_bow_damage(&state.player);
                if launch(state, CreatureKind::PlayerArrow, damage) {
                    state.inventory.arrow -= 1;
                    state.unlock(A::FireBow);
                }
            }
        }
        Action::MakeArrow => {
            if nearby(state, Block::CraftingTable) && state.inventory.wood >= 1 && state.inventory.stone >= 1 {
                state.inventory.wood -= 1;
                state.inventory.stone -= 1;
                state.inventory.arrow = state.add(state.inventory.arrow, 2);
                state.unlock(A::MakeArrow);
            }
        }
        Action::CastFireball => cast(state, true),
        Action::CastIceball => cast(state, false),
        Action::PlaceTorch => {
            if let Some(t) = free_target(state) {
                if state.inventory.torch >= 1 && state.block(t).is_floor() {
                    state.inventory.torch -= 1;
                    state.set_item(t, Item::Torch);
                    let f = state.floor();
                    state.floors[f].torches.push(t);
                    state.unlock(A::PlaceTorch);
                }
            }
        }
        Action::DrinkPotionRed => drink(state, 0),
        Action::DrinkPotionGreen => drink(state, 1),
        Action::DrinkPotionBlue => drink(state, 2),
        Action::DrinkPotionPink => drink(state, 3),
        Action::DrinkPotionCyan => drink(state, 4),
        Action::DrinkPotionYellow => drink(state, 5),
        Action::ReadBook => read_book(state),
        Action::EnchantSword => {
            if state.player.sword_tier >= 1 {
                if let Some(e) = enchant_source(state) {
                    spend_enchant(state, e);
                    state.player.sword_enchant = e;
                    state.unlock(A::EnchantSword);
                }
            }
        }
        Action::EnchantArmour => {
            if let Some(e) = enchant_source(state) {
                let p = &state.player;
                if let Some(slot) = (0..4).find(|&i| p.armour[i] > 0 && p.armour_enchants[i] != e) {
                    spend_enchant(state, e);
                    state.player.armour_enchants[slot] = e;
                    state.unlock(A::EnchantArmour);
                }
            }
        }
        Action::EnchantBow => {
            if state.player.bow {
                if let Some(e) = enchant_source(state) {
                    spend_enchant(state, e);
                    state.player.bow_enchant = e;
                }
            }
        }
        Action::MakeTorch => {
            if nearby(state, Block::CraftingTable) && state.inventory.wood >= 1 && state.inventory.coal >= 1 {
                state.inventory.wood -= 1;
                state.inventory.coal -= 1;
                state.inventory.torch = state.add(state.inventory.torch, 4);
                state.unlock(A::MakeTorch);
            }
        }
        Action::LevelUpDexterity => level_up(state, |p| &mut p.dexterity),
        Action::LevelUpStrength => level_up(state, |p| &mut p.strength),
        Action::LevelUpIntelligence => level_up(state, |p| &mut p.intelligence),
    }
}

fn can_smith(state: &GameState) -> bool {
    nearby(state, Block::CraftingTable) && nearby(state, Block::Furnace)
}

fn iron_kit(state: &GameState) -> bool {
    let inv = &state.inventory;
    inv.wood >= 1 && inv.coal >= 1 && inv.iron >= 1
}

fn spend_iron_kit(state: &mut GameState) {
    state.inventory.wood -= 1;
    state.inventory.coal -= 1;
    state.inventory.iron -= 1;
}

fn move_player(state: &mut GameState, dir: Direction) {
    state.player.facing = dir;
    let t = facing_tile(state);
    if !state.in_bounds(t) || !state.block(t).player_walkable() || state.here().mob_at(t).is_some() {
        return;
    }
    state.player.pos = t;
    if state.block(t) == Block::Lava {
        let h = state.player.health;
        state.player.take_damage(h);
    }
}

fn do_action(state: &mut GameState) {
    let t = facing_tile(state);
    if !state.in_bounds(t) {
        return;
    }
    if let Some((class, lane)) = state.here().mob_at(t) {
        let dmg = player_melee_damage(&state.player);
        damage_mob(state, class, lane, dmg);
        return;
    }
    let b = state.block(t);
    if is_necromancer(b) {
        hit_necromancer(state);
        return;
    }
    let pick = state.player.pickaxe_tier;
    let inv_cap = state.tier.inventory_cap();
    let inv = &mut state.inventory;
    let gain = |c: &mut u8| *c = c.saturating_add(1).min(inv_cap);
    match b {
        Block::Tree | Block::FireTree | Block::IceShrub => {
            gain(&mut inv.wood);
            state.unlock(A::CollectWood);
        }
        Block::Stone | Block::Stalagmite if pick >= 1 => {
            gain(&mut inv.stone);
            state.set_block(t, Block::Path);
            state.unlock(A::CollectStone);
        }
        Block::Coal if pick >= 1 => {
            gain(&mut inv.coal);
            state.set_block(t, Block::Path);
            state.unlock(A::CollectCoal);
        }
        Block::Iron if pick >= 2 => {
            gain(&mut inv.iron);
            state.set_block(t, Block::Path);
            state.unlock(A::CollectIron);
        }
        Block::Diamond if pick >= 3 => {
            gain(&mut inv.diamond);
            state.set_block(t, Block::Path);
            state.unlock(A::CollectDiamond);
        }
        Block::Sapphire if pick >= 4 => {
            gain(&mut inv.sapphire);
            state.set_block(t, Block::Path);
            state.unlock(A::CollectSapphire);
        }
        Block::Ruby if pick >= 4 => {
            gain(&mut inv.ruby);
            state.set_block(t, Block::Path);
            state.unlock(A::CollectRuby);
        }
        Block::Water | Block::Fountain => {
            let max = state.player.max_food(state.tier);
            state.player.drink = (state.player.drink + 1.0).min(max);
            state.unlock(A::CollectDrink);
        }
        Block::Grass => {
            if state.rng.chance(0.1) {
                gain(&mut inv.sapling);
                state.unlock(A::CollectSapling);
            }
        }
        Block::RipePlant => {
            let max = state.player.max_food(state.tier);
            state.player.food = (state.player.food + 4.0).min(max);
            state.set_block(t, Block::Plant);
            if let Some(slot) = state.plants.iter_mut().find(|s| s.alive && s.pos == t) {
                slot.age = 0;
            }
            state.unlock(A::EatPlant);
        }
        Block::Chest => open_chest(state, t),
        _ => {}
    }
}

fn open_chest(state: &mut GameState, t: Pos) {
    let floor = state.floor();
    let loot = state.world.chest_at(floor, t).map(|c| c.loot).unwrap_or_default();
    let inv = &mut state.inventory;
    let cap = state.tier.inventory_cap();
    let add = |c: &mut u8, n: u8| *c = c.saturating_add(n).min(cap);
    add(&mut inv.arrow, loot.arrows);
    add(&mut inv.torch, loot.torches);
    add(&mut inv.book, loot.books);
    add(&mut inv.coal, loot.coal);
    add(&mut inv.iron, loot.iron);
    add(&mut inv.diamond, loot.diamonds);
    if let Some((colour, n)) = loot.potion {
        add(&mut inv.potions[colour as usize % 6], n);
    }
    if loot.bow && !state.player.bow {
        state.player.bow = true;
        state.unlock(A::FindBow);
    }
    state.set_block(t, Block::Path);
    state.unlock(A::OpenChest);
}

/// Moves the player to `floor` at `pos`, clearing any mob standing there.
fn arrive(state: &mut GameState, floor: usize, pos: Pos) {
    state.player.floor = floor as u8;
    state.player.pos = pos;
    if let Some((class, lane)) = state.here().mob_at(pos) {
        state.here_mut().class_mut(class).kill(lane);
    }
}

fn descend(state: &mut GameState) {
    let f = state.floor();
    if f + 1 >= state.world.floors.len() || state.item(state.player.pos) != Item::LadderDown {
        return;
    }
    let next = f + 1;
    let Some(up) = state.world.floors[next].ladder_up else { return };
    arrive(state, next, up);
    if !state.visited(next) {
        state.floors_visited |= 1 << next;
        state.player.xp = state.player.xp.saturating_add(1);
        if let Some(a) = A::for_floor(next) {
            state.unlock(a);
        }
    }
}

fn ascend(state: &mut GameState) {
    let f = state.floor();
    if f == 0 || state.item(state.player.pos) != Item::LadderUp {
        return;
    }
    let Some(down) = state.world.floors[f - 1].ladder_down else { return };
    arrive(state, f - 1, down);
}

/// Launches a player projectile from the player's tile in the facing
/// direction.
fn launch(state: &mut GameState, kind: CreatureKind, damage: super::tables::Damage) -> bool {
    let (dr, dc) = state.player.facing.delta();
    let mut c = Creature::new(kind, state.player.pos);
    c.dir = (dr as i8, dc as i8);
    c.damage = damage;
    state.here_mut().class_mut(CreatureClass::PlayerProjectile).insert(c).is_some()
}

fn cast(state: &mut GameState, fire: bool) {
    let learned = if fire { state.player.learned_fireball } else { state.player.learned_iceball };
    if !learned || state.player.mana < SPELL_MANA_COST {
        return;
    }
    let kind = if fire { CreatureKind::PlayerFireball } else { CreatureKind::PlayerIceball };
    if launch(state, kind, player_spell_damage(&state.player, fire)) {
        state.player.mana = q1(state.player.mana - SPELL_MANA_COST);
        state.unlock(if fire { A::CastFireball } else { A::CastIceball });
    }
}

fn drink(state: &mut GameState, colour: usize) {
    if state.inventory.potions[colour] == 0 {
        return;
    }
    state.inventory.potions[colour] -= 1;
    let tier = state.tier;
    let p = &mut state.player;
    match state.world.potion_permutation[colour] {
        PotionEffect::Health => p.health = (p.health + 8.0).min(p.max_health(tier)),
        PotionEffect::Mana => p.mana = (p.mana + 8.0).min(p.max_mana(tier)),
        PotionEffect::Energy => p.energy = (p.energy + 8.0).min(p.max_food(tier)),
        PotionEffect::PoisonHealth => p.take_damage(3.0),
        PotionEffect::PoisonMana => p.mana = (p.mana - 3.0).max(0.0),
        PotionEffect::FoodAndDrink => {
            p.food = (p.food + 4.0).min(p.max_food(tier));
            p.drink = (p.drink + 4.0).min(p.max_food(tier));
        }
    }
    state.unlock(A::DrinkPotion);
}

fn read_book(state: &mut GameState) {
    if state.inventory.book == 0 {
        return;
    }
    let (f, i) = (state.player.learned_fireball, state.player.learned_iceball);
    let fire = match (f, i) {
        (true, true) => return,
        (false, true) => true,
        (true, false) => false,
        (false, false) => state.rng.chance(0.5),
    };
    state.inventory.book -= 1;
    if fire {
        state.player.learned_fireball = true;
        state.unlock(A::LearnFireball);
    } else {
        state.player.learned_iceball = true;
        state.unlock(A::LearnIceball);
    }
}

/// Element of an adjacent enchantment table the player can afford to use.
fn enchant_source(state: &GameState) -> Option<Enchant> {
    if state.player.mana < ENCHANT_MANA_COST {
        return None;
    }
    if nearby(state, Block::EnchantmentTableFire) && state.inventory.ruby >= 1 {
        Some(Enchant::Fire)
    } else if nearby(state, Block::EnchantmentTableIce) && state.inventory.sapphire >= 1 {
        Some(Enchant::Ice)
    } else {
        None
    }
}

fn spend_enchant(state: &mut GameState, e: Enchant) {
    state.player.mana = q1(state.player.mana - ENCHANT_MANA_COST);
    match e {
        Enchant::Fire => state.inventory.ruby -= 1,
        Enchant::Ice => state.inventory.sapphire -= 1,
        Enchant::None => {}
    }
}

fn level_up(state: &mut GameState, attr: fn(&mut super::state::Player) -> &mut u8) {
    if state.player.xp == 0 {
        return;
    }
    let a = attr(&mut state.player);
    if *a >= 5 {
        return;
    }
    *a += 1;
    state.player.xp -= 1;
}
