//! Static game tables: blocks, items, creatures, actions and achievements.

use serde::{Deserialize, Serialize};

macro_rules! id_enum {
    (
        $(#[$meta:meta])*
        $name:ident : $repr:ty {
            $($variant:ident = $id:expr => $label:expr),+ $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[repr($repr)]
        pub enum $name {
            $($variant = $id),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
            pub const COUNT: usize = [$($name::$variant),+].len();

            #[inline]
            pub fn id(self) -> $repr {
                self as $repr
            }

            pub fn from_id(id: $repr) -> Option<Self> {
                match id {
                    $($id => Some($name::$variant),)+
                    _ => None,
                }
            }

            pub fn name(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }
        }
    };
}

id_enum! {
    /// Block types. Ids 0 and 1 are reserved sentinels.
    Block: u8 {
        Invalid = 0 => "invalid",
        OutOfBounds = 1 => "out_of_bounds",
        Grass = 2 => "grass",
        Water = 3 => "water",
        Stone = 4 => "stone",
        Tree = 5 => "tree",
        Wood = 6 => "wood",
        Path = 7 => "path",
        Coal = 8 => "coal",
        Iron = 9 => "iron",
        Diamond = 10 => "diamond",
        CraftingTable = 11 => "crafting_table",
        Furnace = 12 => "furnace",
        Sand = 13 => "sand",
        Lava = 14 => "lava",
        Plant = 15 => "plant",
        RipePlant = 16 => "ripe_plant",
        Wall = 17 => "wall",
        Darkness = 18 => "darkness",
        WallMoss = 19 => "wall_moss",
        Stalagmite = 20 => "stalagmite",
        Sapphire = 21 => "sapphire",
        Ruby = 22 => "ruby",
        Chest = 23 => "chest",
        Fountain = 24 => "fountain",
        FireGrass = 25 => "fire_grass",
        IceGrass = 26 => "ice_grass",
        Gravel = 27 => "gravel",
        FireTree = 28 => "fire_tree",
        IceShrub = 29 => "ice_shrub",
        EnchantmentTableFire = 30 => "enchantment_table_fire",
        EnchantmentTableIce = 31 => "enchantment_table_ice",
        Necromancer = 32 => "necromancer",
        Grave = 33 => "grave",
        Grave2 = 34 => "grave2",
        Grave3 = 35 => "grave3",
        NecromancerVulnerable = 36 => "necromancer_vulnerable",
    }
}

impl Block {
    /// Ground-walkable for the player and ground creatures.
    #[inline]
    pub fn is_floor(self) -> bool {
        matches!(self, Block::Grass | Block::Sand | Block::Path | Block::FireGrass | Block::IceGrass | Block::Gravel)
    }

    /// Player movement target. Lava is enterable and fatal.
    #[inline]
    pub fn player_walkable(self) -> bool {
        self.is_floor() || self == Block::Lava
    }

    #[inline]
    pub fn is_tree(self) -> bool {
        matches!(self, Block::Tree | Block::FireTree | Block::IceShrub)
    }

    #[inline]
    pub fn is_ore(self) -> bool {
        matches!(self, Block::Coal | Block::Iron | Block::Diamond | Block::Sapphire | Block::Ruby)
    }
}

id_enum! {
    /// Items that sit on top of a block.
    Item: u8 {
        None = 0 => "none",
        Torch = 1 => "torch",
        LadderDown = 2 => "ladder_down",
        LadderUp = 3 => "ladder_up",
        LadderDownBlocked = 4 => "ladder_down_blocked",
    }
}

id_enum! {
    /// Creature kinds, including projectiles in flight.
    CreatureKind: u8 {
        Zombie = 0 => "zombie",
        Skeleton = 1 => "skeleton",
        Cow = 2 => "cow",
        OrcSoldier = 3 => "orc_soldier",
        OrcMage = 4 => "orc_mage",
        Snail = 5 => "snail",
        GnomeWarrior = 6 => "gnome_warrior",
        GnomeArcher = 7 => "gnome_archer",
        Bat = 8 => "bat",
        Lizard = 9 => "lizard",
        Kobold = 10 => "kobold",
        Knight = 11 => "knight",
        Archer = 12 => "archer",
        Troll = 13 => "troll",
        DeepThing = 14 => "deep_thing",
        PigMan = 15 => "pig_man",
        FireElemental = 16 => "fire_elemental",
        FrostTroll = 17 => "frost_troll",
        IceElemental = 18 => "ice_elemental",
        Arrow = 19 => "arrow",
        MageSpell = 20 => "mage_spell",
        GnomeArrow = 21 => "gnome_arrow",
        Dagger = 22 => "dagger",
        KnightArrow = 23 => "archer_arrow",
        Slimeball = 24 => "slimeball",
        EnemyFireball = 25 => "enemy_fireball",
        EnemyIceball = 26 => "enemy_iceball",
        PlayerArrow = 27 => "player_arrow",
        PlayerFireball = 28 => "player_fireball",
        PlayerIceball = 29 => "player_iceball",
    }
}

/// Behaviour class; each class has its own fixed-capacity array per floor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CreatureClass {
    Melee,
    Passive,
    Ranged,
    MobProjectile,
    PlayerProjectile,
}

impl CreatureClass {
    pub const ALL: [CreatureClass; 5] = [
        CreatureClass::Melee,
        CreatureClass::Passive,
        CreatureClass::Ranged,
        CreatureClass::MobProjectile,
        CreatureClass::PlayerProjectile,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Collision {
    Ground,
    Flying,
    Amphibian,
    Aquatic,
}

/// Damage split into physical, fire and ice components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Damage {
    pub phys: f32,
    pub fire: f32,
    pub ice: f32,
}

impl Damage {
    pub const fn phys(v: f32) -> Self {
        Damage { phys: v, fire: 0.0, ice: 0.0 }
    }

    pub const fn new(phys: f32, fire: f32, ice: f32) -> Self {
        Damage { phys, fire, ice }
    }
}

/// Percent defense per damage category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Defense {
    pub phys: f32,
    pub fire: f32,
    pub ice: f32,
}

impl Defense {
    pub const fn new(phys: f32, fire: f32, ice: f32) -> Self {
        Defense { phys, fire, ice }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CreatureStats {
    pub class: CreatureClass,
    pub health: f32,
    pub damage: Damage,
    pub defense: Defense,
    pub collision: Collision,
    /// Projectile fired by ranged creatures.
    pub projectile: Option<CreatureKind>,
}

const NO_DEF: Defense = Defense::new(0.0, 0.0, 0.0);

impl CreatureKind {
    pub fn stats(self) -> CreatureStats {
        use CreatureClass::*;
        use CreatureKind as K;
        let (class, health, damage, defense, collision, projectile) = match self {
            K::Zombie => (Melee, 5.0, Damage::phys(2.0), NO_DEF, Collision::Ground, None),
            K::Skeleton => (Ranged, 3.0, Damage::phys(2.0), NO_DEF, Collision::Ground, Some(K::Arrow)),
            K::Cow => (Passive, 3.0, Damage::phys(0.0), NO_DEF, Collision::Ground, None),
            K::OrcSoldier => (Melee, 7.0, Damage::phys(3.0), NO_DEF, Collision::Ground, None),
            K::OrcMage => (Ranged, 5.0, Damage::phys(3.0), NO_DEF, Collision::Ground, Some(K::MageSpell)),
            K::Snail => (Passive, 6.0, Damage::phys(0.0), NO_DEF, Collision::Ground, None),
            K::GnomeWarrior => (Melee, 9.0, Damage::phys(4.0), NO_DEF, Collision::Ground, None),
            K::GnomeArcher => (Ranged, 6.0, Damage::phys(2.0), NO_DEF, Collision::Ground, Some(K::GnomeArrow)),
            K::Bat => (Passive, 4.0, Damage::phys(0.0), NO_DEF, Collision::Flying, None),
            K::Lizard => (Melee, 11.0, Damage::phys(5.0), NO_DEF, Collision::Amphibian, None),
            K::Kobold => (Ranged, 8.0, Damage::phys(4.0), NO_DEF, Collision::Ground, Some(K::Dagger)),
            K::Knight => (Melee, 12.0, Damage::phys(6.0), Defense::new(50.0, 0.0, 0.0), Collision::Ground, None),
            K::Archer => {
                (Ranged, 12.0, Damage::phys(4.0), Defense::new(50.0, 0.0, 0.0), Collision::Ground, Some(K::KnightArrow))
            }
            K::Troll => {
                (Melee, 20.0, Damage::new(6.0, 1.0, 1.0), Defense::new(20.0, 0.0, 0.0), Collision::Ground, None)
            }
            K::DeepThing => (Ranged, 6.0, Damage::new(4.0, 3.0, 3.0), NO_DEF, Collision::Aquatic, Some(K::Slimeball)),
            K::PigMan => {
                (Melee, 20.0, Damage::new(3.0, 5.0, 0.0), Defense::new(90.0, 100.0, 0.0), Collision::Ground, None)
            }
            K::FireElemental => (
                Ranged,
                14.0,
                Damage::new(3.0, 5.0, 0.0),
                Defense::new(90.0, 100.0, 0.0),
                Collision::Flying,
                Some(K::EnemyFireball),
            ),
            K::FrostTroll => {
                (Melee, 24.0, Damage::new(4.0, 0.0, 5.0), Defense::new(90.0, 0.0, 100.0), Collision::Ground, None)
            }
            K::IceElemental => (
                Ranged,
                16.0,
                Damage::new(4.0, 0.0, 4.0),
                Defense::new(90.0, 0.0, 100.0),
                Collision::Flying,
                Some(K::EnemyIceball),
            ),
            K::Arrow
            | K::MageSpell
            | K::GnomeArrow
            | K::Dagger
            | K::KnightArrow
            | K::Slimeball
            | K::EnemyFireball
            | K::EnemyIceball => (MobProjectile, 1.0, Damage::phys(0.0), NO_DEF, Collision::Flying, None),
            K::PlayerArrow | K::PlayerFireball | K::PlayerIceball => {
                (PlayerProjectile, 1.0, Damage::phys(0.0), NO_DEF, Collision::Flying, None)
            }
        };
        CreatureStats { class, health, damage, defense, collision, projectile }
    }

    /// Achievement unlocked by killing (or eating) this creature.
    pub fn defeat_achievement(self) -> Option<Achievement> {
        use Achievement as A;
        use CreatureKind as K;
        Some(match self {
            K::Zombie => A::DefeatZombie,
            K::Skeleton => A::DefeatSkeleton,
            K::Cow => A::EatCow,
            K::OrcSoldier => A::DefeatOrcSoldier,
            K::OrcMage => A::DefeatOrcMage,
            K::Snail => A::EatSnail,
            K::GnomeWarrior => A::DefeatGnomeWarrior,
            K::GnomeArcher => A::DefeatGnomeArcher,
            K::Bat => A::EatBat,
            K::Lizard => A::DefeatLizard,
            K::Kobold => A::DefeatKobold,
            K::Knight => A::DefeatKnight,
            K::Archer => A::DefeatArcher,
            K::Troll => A::DefeatTroll,
            K::DeepThing => A::DefeatDeepThing,
            K::PigMan => A::DefeatPigman,
            K::FireElemental => A::DefeatFireElemental,
            K::FrostTroll => A::DefeatFrostTroll,
            K::IceElemental => A::DefeatIceElemental,
            _ => return None,
        })
    }
}

/// Creature kinds native to each floor: (melee, passive, ranged).
pub fn floor_creatures(floor: usize) -> (Option<CreatureKind>, Option<CreatureKind>, Option<CreatureKind>) {
    use CreatureKind as K;
    match floor {
        0 => (Some(K::Zombie), Some(K::Cow), Some(K::Skeleton)),
        1 => (Some(K::OrcSoldier), Some(K::Snail), Some(K::OrcMage)),
        2 => (Some(K::GnomeWarrior), Some(K::Bat), Some(K::GnomeArcher)),
        3 => (Some(K::Lizard), Some(K::Snail), Some(K::Kobold)),
        4 => (Some(K::Knight), Some(K::Snail), Some(K::Archer)),
        5 => (Some(K::Troll), Some(K::Bat), Some(K::DeepThing)),
        6 => (Some(K::PigMan), Some(K::Bat), Some(K::FireElemental)),
        7 => (Some(K::FrostTroll), None, Some(K::IceElemental)),
        _ => (None, None, None),
    }
}

id_enum! {
    Action: u8 {
        Noop = 0 => "NOOP",
        Left = 1 => "LEFT",
        Right = 2 => "RIGHT",
        Up = 3 => "UP",
        Down = 4 => "DOWN",
        Do = 5 => "DO",
        Sleep = 6 => "SLEEP",
        PlaceStone = 7 => "PLACE_STONE",
        PlaceTable = 8 => "PLACE_TABLE",
        PlaceFurnace = 9 => "PLACE_FURNACE",
        PlacePlant = 10 => "PLACE_PLANT",
        MakeWoodPickaxe = 11 => "MAKE_WOOD_PICKAXE",
        MakeStonePickaxe = 12 => "MAKE_STONE_PICKAXE",
        MakeIronPickaxe = 13 => "MAKE_IRON_PICKAXE",
        MakeWoodSword = 14 => "MAKE_WOOD_SWORD",
        MakeStoneSword = 15 => "MAKE_STONE_SWORD",
        MakeIronSword = 16 => "MAKE_IRON_SWORD",
        Rest = 17 => "REST",
        Descend = 18 => "DESCEND",
        Ascend = 19 => "ASCEND",
        MakeDiamondPickaxe = 20 => "MAKE_DIAMOND_PICKAXE",
        MakeDiamondSword = 21 => "MAKE_DIAMOND_SWORD",
        MakeIronArmour = 22 => "MAKE_IRON_ARMOUR",
        MakeDiamondArmour = 23 => "MAKE_DIAMOND_ARMOUR",
        ShootArrow = 24 => "SHOOT_ARROW",
        MakeArrow = 25 => "MAKE_ARROW",
        CastFireball = 26 => "CAST_FIREBALL",
        CastIceball = 27 => "CAST_ICEBALL",
        PlaceTorch = 28 => "PLACE_TORCH",
        DrinkPotionRed = 29 => "DRINK_POTION_RED",
        DrinkPotionGreen = 30 => "DRINK_POTION_GREEN",
        DrinkPotionBlue = 31 => "DRINK_POTION_BLUE",
        DrinkPotionPink = 32 => "DRINK_POTION_PINK",
        DrinkPotionCyan = 33 => "DRINK_POTION_CYAN",
        DrinkPotionYellow = 34 => "DRINK_POTION_YELLOW",
        ReadBook = 35 => "READ_BOOK",
        EnchantSword = 36 => "ENCHANT_SWORD",
        EnchantArmour = 37 => "ENCHANT_ARMOUR",
        MakeTorch = 38 => "MAKE_TORCH",
        LevelUpDexterity = 39 => "LEVEL_UP_DEXTERITY",
        LevelUpStrength = 40 => "LEVEL_UP_STRENGTH",
        LevelUpIntelligence = 41 => "LEVEL_UP_INTELLIGENCE",
        EnchantBow = 42 => "ENCHANT_BOW",
    }
}

impl Action {
    /// Keyboard binding used by the play client.
    pub fn key(self) -> &'static str {
        const KEYS: [&str; 43] = [
            "q", "a", "d", "w", "s", " ", "Tab", "r", "t", "f", "p", "1", "2", "3", "5", "6", "7", "e", ".", ",", "4",
            "8", "y", "u", "i", "o", "g", "h", "j", "z", "x", "c", "v", "b", "n", "m", "k", "l", "[", "]", "-", "=",
            ";",
        ];
        KEYS[self as usize]
    }

    /// Inverse of [`Action::key`]; letter keys are case-insensitive.
    pub fn from_key(key: &str) -> Option<Action> {
        let lowered = if key.len() == 1 { key.to_ascii_lowercase() } else { key.to_string() };
        let lowered = if lowered == "Space" || lowered == "space" { " ".to_string() } else { lowered };
        Action::ALL.iter().copied().find(|a| a.key() == lowered)
    }
}

id_enum! {
    Achievement: u8 {
        CollectWood = 0 => "COLLECT_WOOD",
        PlaceTable = 1 => "PLACE_TABLE",
        EatCow = 2 => "EAT_COW",
        CollectSapling = 3 => "COLLECT_SAPLING",
        CollectDrink = 4 => "COLLECT_DRINK",
        MakeWoodPickaxe = 5 => "MAKE_WOOD_PICKAXE",
        MakeWoodSword = 6 => "MAKE_WOOD_SWORD",
        PlacePlant = 7 => "PLACE_PLANT",
        DefeatZombie = 8 => "DEFEAT_ZOMBIE",
        CollectStone = 9 => "COLLECT_STONE",
        PlaceStone = 10 => "PLACE_STONE",
        EatPlant = 11 => "EAT_PLANT",
        DefeatSkeleton = 12 => "DEFEAT_SKELETON",
        MakeStonePickaxe = 13 => "MAKE_STONE_PICKAXE",
        MakeStoneSword = 14 => "MAKE_STONE_SWORD",
        WakeUp = 15 => "WAKE_UP",
        PlaceFurnace = 16 => "PLACE_FURNACE",
        CollectCoal = 17 => "COLLECT_COAL",
        CollectIron = 18 => "COLLECT_IRON",
        CollectDiamond = 19 => "COLLECT_DIAMOND",
        MakeIronPickaxe = 20 => "MAKE_IRON_PICKAXE",
        MakeIronSword = 21 => "MAKE_IRON_SWORD",
        MakeArrow = 22 => "MAKE_ARROW",
        MakeTorch = 23 => "MAKE_TORCH",
        PlaceTorch = 24 => "PLACE_TORCH",
        MakeDiamondSword = 25 => "MAKE_DIAMOND_SWORD",
        MakeIronArmour = 26 => "MAKE_IRON_ARMOUR",
        MakeDiamondArmour = 27 => "MAKE_DIAMOND_ARMOUR",
        EnterGnomishMines = 28 => "ENTER_GNOMISH_MINES",
        EnterDungeon = 29 => "ENTER_DUNGEON",
        EnterSewers = 30 => "ENTER_SEWERS",
        EnterVault = 31 => "ENTER_VAULT",
        EnterTrollMines = 32 => "ENTER_TROLL_MINES",
        EnterFireRealm = 33 => "ENTER_FIRE_REALM",
        EnterIceRealm = 34 => "ENTER_ICE_REALM",
        EnterGraveyard = 35 => "ENTER_GRAVEYARD",
        DefeatGnomeWarrior = 36 => "DEFEAT_GNOME_WARRIOR",
        DefeatGnomeArcher = 37 => "DEFEAT_GNOME_ARCHER",
        DefeatOrcSoldier = 38 => "DEFEAT_ORC_SOLIDER",
        DefeatOrcMage = 39 => "DEFEAT_ORC_MAGE",
        DefeatLizard = 40 => "DEFEAT_LIZARD",
        DefeatKobold = 41 => "DEFEAT_KOBOLD",
        DefeatTroll = 42 => "DEFEAT_TROLL",
        DefeatDeepThing = 43 => "DEFEAT_DEEP_THING",
        DefeatPigman = 44 => "DEFEAT_PIGMAN",
        DefeatFireElemental = 45 => "DEFEAT_FIRE_ELEMENTAL",
        DefeatFrostTroll = 46 => "DEFEAT_FROST_TROLL",
        DefeatIceElemental = 47 => "DEFEAT_ICE_ELEMENTAL",
        DamageNecromancer = 48 => "DAMAGE_NECROMANCER",
        DefeatNecromancer = 49 => "DEFEAT_NECROMANCER",
        EatBat = 50 => "EAT_BAT",
        EatSnail = 51 => "EAT_SNAIL",
        FindBow = 52 => "FIND_BOW",
        FireBow = 53 => "FIRE_BOW",
        CollectSapphire = 54 => "COLLECT_SAPPHIRE",
        LearnFireball = 55 => "LEARN_FIREBALL",
        CastFireball = 56 => "CAST_FIREBALL",
        LearnIceball = 57 => "LEARN_ICEBALL",
        CastIceball = 58 => "CAST_ICEBALL",
        CollectRuby = 59 => "COLLECT_RUBY",
        MakeDiamondPickaxe = 60 => "MAKE_DIAMOND_PICKAXE",
        OpenChest = 61 => "OPEN_CHEST",
        DrinkPotion = 62 => "DRINK_POTION",
        EnchantSword = 63 => "ENCHANT_SWORD",
        EnchantArmour = 64 => "ENCHANT_ARMOUR",
        DefeatKnight = 65 => "DEFEAT_KNIGHT",
        DefeatArcher = 66 => "DEFEAT_ARCHER",
    }
}

/// Reward category of an achievement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AchievementTier {
    Basic,
    Intermediate,
    Advanced,
    VeryAdvanced,
}

impl AchievementTier {
    pub fn reward(self) -> u32 {
        match self {
            AchievementTier::Basic => 1,
            AchievementTier::Intermediate => 3,
            AchievementTier::Advanced => 5,
            AchievementTier::VeryAdvanced => 8,
        }
    }
}

impl Achievement {
    pub fn tier(self) -> AchievementTier {
        use AchievementTier::*;
        match self.id() {
            0..=24 => Basic,
            25..=29 | 36..=39 | 50..=54 | 59..=62 => Intermediate,
            30..=32 | 40..=43 | 55..=58 | 63..=66 => Advanced,
            _ => VeryAdvanced,
        }
    }

    /// Achievement for arriving on `floor` (none for the overworld).
    pub fn for_floor(floor: usize) -> Option<Achievement> {
        use Achievement as A;
        Some(match floor {
            1 => A::EnterDungeon,
            2 => A::EnterGnomishMines,
            3 => A::EnterSewers,
            4 => A::EnterVault,
            5 => A::EnterTrollMines,
            6 => A::EnterFireRealm,
            7 => A::EnterIceRealm,
            8 => A::EnterGraveyard,
            _ => return None,
        })
    }
}

/// Colour names of the six potion slots, in action order.
pub const POTION_COLOURS: [&str; 6] = ["red", "green", "blue", "pink", "cyan", "yellow"];
