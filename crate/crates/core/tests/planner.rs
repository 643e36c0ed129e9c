use proptest::prelude::*;
use sgrl_core::achievements::{AchievementId, AchievementSet, DependencyGraph, NUM_ACHIEVEMENTS};
use sgrl_core::planner::*;
use sgrl_core::world::{Block, Inventory, Item, MobKind, World, WorldConfig, NUM_BLOCKS};

const EXAMPLE_1: &str = "You see: plant, zombie, tree, grass, sand, path, stone
Inventory: wood: 1
Status: health: 11%, Fullness: 0%, Hydration: 0%, Wakefulness: 88%
Sky brightness level: 68%";

const EXAMPLE_2: &str = "You see: plant, tree, grass, path, stone
Inventory:
Status: health: 99%, Fullness: 77%, Hydration: 66%, Wakefulness: 77%
Sky brightness level: 99%";

fn goal(a: AchievementId) -> GoalId {
    GoalId::for_achievement(a)
}

fn set(items: &[AchievementId]) -> AchievementSet {
    let mut s = AchievementSet::EMPTY;
    for a in items {
        s.insert(*a);
    }
    s
}

#[test]
fn vocabulary_is_closed_and_unique() {
    assert_eq!(GOALS.len(), 26);
    for (i, g) in GOALS.iter().enumerate() {
        assert_eq!(g.id.index(), i);
        assert!(!g.text.is_empty());
        assert_eq!(GoalId::from_name(g.name), Some(g.id));
        assert_eq!(GoalId::from_text(g.text), Some(g.id));
    }
    for a in AchievementId::ALL {
        assert_eq!(goal(a).target(), Some(a));
        assert_eq!(goal(a).name(), a.name());
    }
    assert_eq!(GoalId::FLEE_ZOMBIE.target(), None);
}

#[test]
fn parses_example_one() {
    let v = parse_text_observation(EXAMPLE_1).unwrap();
    assert_eq!(v.meters, [1, 0, 0, 8]);
    assert_eq!(v.inventory.get(Item::Wood), 1);
    assert!(v.sees(Block::Plant) && v.sees(Block::Stone) && !v.sees(Block::Water));
    assert!(v.sees_mob(MobKind::Zombie) && !v.sees_mob(MobKind::Cow));
    assert!((v.daylight - 0.68).abs() < 1e-6);
}

#[test]
fn example_one_puts_a_survival_need_first() {
    let ws =
        determine_goal_text(EXAMPLE_1, AchievementSet::EMPTY, &PriorityTable::builtin()).unwrap();
    let top = ws.top();
    assert!(
        [
            AchievementId::CollectDrink,
            AchievementId::EatCow,
            AchievementId::EatPlant
        ]
        .iter()
        .any(|a| goal(*a) == top),
        "{top}"
    );
    assert!(ws.items[0].1 >= 0.5);
    // Hand evaluation: health 1 is an emergency. Drink and food both have
    // urgency 1 (score 2), drink wins the tie and takes the +2 bonus; the
    // zombie gives flee urgency (5-1)/5 = 0.8, score 1.6.
    let total = 4.0 + 2.0 + 1.6;
    assert_eq!(
        ws.goals(),
        [
            goal(AchievementId::CollectDrink),
            goal(AchievementId::EatPlant),
            GoalId::FLEE_ZOMBIE
        ]
    );
    for (w, s) in ws.weights().iter().zip([4.0, 2.0, 1.6]) {
        assert!((w - s / total).abs() < 1e-12);
    }
}

#[test]
fn example_two_starts_with_wood() {
    let ws =
        determine_goal_text(EXAMPLE_2, AchievementSet::EMPTY, &PriorityTable::builtin()).unwrap();
    assert_eq!(ws.top(), goal(AchievementId::CollectWood));
}

#[test]
fn three_line_status_with_inline_brightness() {
    let text = "You see: grass, cows\nInventory: \nStatus: Health: 55%, Fullness: 100%, \
                Hydration: 100%, Wakefulness: 100%, Sky brightness level: 20%";
    let v = parse_text_observation(text).unwrap();
    assert_eq!(v.meters, [5, 9, 9, 9]);
    assert!(v.sees_mob(MobKind::Cow));
    assert!((v.daylight - 0.2).abs() < 1e-6);
}

#[test]
fn parse_errors_name_the_line() {
    let cases = [
        ("You see: grass\nInventory: \nStatus: Health: 10%", 3),
        ("You see: dragon\nInventory: \nStatus: x", 1),
        ("You see: grass\nInventory: gold: 1\nStatus: x", 2),
        ("You see: grass\nStuff\n", 2),
        ("You see: grass\nInventory:\nStatus: Health: 1%, Fullness: 1%, Hydration: 1%, Wakefulness: 1%\nweird", 4),
    ];
    for (text, line) in cases {
        match parse_text_observation(text) {
            Err(PlannerError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
}

#[test]
fn rendered_text_parses_back_to_the_world_state() {
    for seed in 0..30 {
        let mut w = World::reset(seed, &WorldConfig::default()).unwrap();
        for i in 0..(seed * 13) {
            if w.advance(sgrl_core::world::Action::ALL[(i as usize * 5) % 17])
                .unwrap()
                .done
            {
                break;
            }
        }
        let mut parsed = parse_text_observation(w.render_text().as_str()).unwrap();
        let direct = PlannerView::from_world(&w);
        parsed.unlocked = direct.unlocked;
        assert_eq!(parsed.blocks, direct.blocks);
        assert_eq!(parsed.mobs, direct.mobs);
        assert_eq!(parsed.inventory, direct.inventory);
        assert_eq!(parsed.meters, direct.meters);
        assert!((parsed.daylight - direct.daylight).abs() <= 0.01);
    }
}

#[test]
fn normalization_of_raw_scores() {
    let ids = [
        GoalId::new(5).unwrap(),
        GoalId::new(1).unwrap(),
        GoalId::new(2).unwrap(),
    ];
    let ws = WeightedGoalSet::from_scores([(ids[1], 1.0), (ids[0], 2.0), (ids[2], 1.0)]);
    assert_eq!(ws.weights(), [0.5, 0.25, 0.25]);
    assert_eq!(ws.goals(), [ids[0], ids[1], ids[2]]);
    let zero = WeightedGoalSet::from_scores([(ids[0], 0.0), (ids[1], 0.0), (ids[2], 0.0)]);
    assert_eq!(zero.weights(), [1.0 / 3.0; 3]);
}

#[test]
fn urgency_values() {
    assert_eq!(urgency(9), 0.0);
    assert_eq!(urgency(5), 0.0);
    assert_eq!(urgency(0), 1.0);
    assert!((urgency(2) - 0.6).abs() < 1e-15);
    assert_eq!(assess_survival_needs([9, 0, 2, 5])[1], 1.0);
}

#[test]
fn frontier_examples() {
    let empty = Inventory::default();
    let f = craft_frontier(&empty, AchievementSet::EMPTY);
    assert_eq!(
        f.iter().collect::<Vec<_>>(),
        vec![goal(AchievementId::CollectWood)]
    );

    let mut inv = Inventory::default();
    inv.set(Item::Wood, 1);
    let f = craft_frontier(&inv, set(&[AchievementId::CollectWood]));
    assert!(f.contains(goal(AchievementId::PlaceTable)));

    let mut inv = Inventory::default();
    inv.set(Item::IronPickaxe, 1);
    let f = craft_frontier(&inv, AchievementSet::EMPTY);
    assert!(f.contains(goal(AchievementId::CollectDiamond)));

    let mut inv = Inventory::default();
    inv.set(Item::StonePickaxe, 1);
    assert!(craft_frontier(&inv, AchievementSet::EMPTY).contains(goal(AchievementId::CollectIron)));
}

fn window(rates: &[(AchievementId, u64)], episodes: u64) -> AgentProgress {
    let mut p = AgentProgress {
        window_episodes: episodes,
        episodes,
        ..AgentProgress::default()
    };
    for (a, c) in rates {
        p.window_counts[a.index()] = *c;
        p.unlock_counts[a.index()] = *c;
    }
    p
}

#[test]
fn mastered_goals_are_quartered() {
    let mut t = PriorityTable::builtin();
    let base = *t.stage_weights(1).unwrap();
    let p = window(
        &[
            (AchievementId::CollectWood, 95),
            (AchievementId::PlaceTable, 80),
        ],
        100,
    );
    t.advance(&p);
    assert_eq!(t.stage(), 1);
    let wood = goal(AchievementId::CollectWood);
    let table = goal(AchievementId::PlaceTable);
    assert_eq!(t.weight(wood), base[wood.index()] * 0.25);
    // Exactly 80% is not above the threshold.
    assert_eq!(t.weight(table), base[table.index()]);
}

#[test]
fn forward_goal_is_doubled() {
    let mut t = PriorityTable::builtin();
    let unlocked: Vec<(AchievementId, u64)> = AchievementId::ALL
        .into_iter()
        .filter(|a| *a != AchievementId::CollectDiamond)
        .map(|a| (a, 50))
        .collect();
    let p = window(&unlocked, 100);
    assert_eq!(
        forward_target(p.window_unlocked()),
        Some(AchievementId::CollectDiamond)
    );
    let base = *t.stage_weights(1).unwrap();
    t.advance(&p);
    let d = goal(AchievementId::CollectDiamond).index();
    assert_eq!(t.active()[d], (base[d] * 2.0).max(0.05));

    // Floor applies to a zero base weight.
    let mut stages = vec![[1.0; NUM_GOALS]; 2];
    stages[1][d] = 0.0;
    let mut t = PriorityTable::new(stages).unwrap();
    t.advance(&p);
    assert_eq!(t.active()[d], 0.05);
}

#[test]
fn forward_target_descends_to_a_ready_achievement() {
    // Nothing unlocked: the chain below diamond bottoms out at a root.
    let a = forward_target(AchievementSet::EMPTY).unwrap();
    assert!(DependencyGraph::builtin().prerequisites(a).is_empty());
    let all = set(&AchievementId::ALL);
    assert_eq!(forward_target(all), None);
}

#[test]
fn all_zero_tables_are_rejected() {
    let mut t = PriorityTable::builtin();
    let before = t.clone();
    assert!(t.install([0.0; NUM_GOALS]).is_err());
    assert_eq!(t, before);
    let mut bad = [0.5; NUM_GOALS];
    bad[3] = f64::NAN;
    assert!(t.install(bad).is_err());
    bad[3] = -1.0;
    assert!(t.install(bad).is_err());
    assert_eq!(t, before);

    let text = "[stage 0]\ncollect_wood = 1\n[stage 1]\ncollect_wood = 0\n";
    assert!(matches!(
        PriorityTable::parse(text),
        Err(PlannerError::InvalidTable(_))
    ));
}

#[test]
fn table_text_round_trips() {
    let t = PriorityTable::builtin();
    assert_eq!(t.num_stages(), NUM_STAGES);
    let back = PriorityTable::parse(&t.to_text()).unwrap();
    assert_eq!(back, t);
    match PriorityTable::parse("[stage 0]\nmystery = 1\n") {
        Err(PlannerError::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn flat_weight_lists_override_a_base() {
    let base = [0.1; NUM_GOALS];
    let w = parse_weights("- collect wood: 0.7\n* place_table = 0.2\n", &base).unwrap();
    assert_eq!(w[goal(AchievementId::CollectWood).index()], 0.7);
    assert_eq!(w[goal(AchievementId::PlaceTable).index()], 0.2);
    assert_eq!(w[0], 0.1);
    assert!(parse_weights("nothing useful", &base).is_err());
}

#[test]
fn stages_are_fifths_of_training() {
    assert_eq!(stage_for_step(0, 1000), 0);
    assert_eq!(stage_for_step(199, 1000), 0);
    assert_eq!(stage_for_step(200, 1000), 1);
    assert_eq!(stage_for_step(999, 1000), 4);
    assert_eq!(stage_for_step(5000, 1000), 4);
}

#[test]
fn crafting_away_from_the_table_means_returning() {
    let mut v = PlannerView {
        meters: [9; 4],
        daylight: 1.0,
        unlocked: set(&[AchievementId::CollectWood, AchievementId::PlaceTable]),
        blocks: 1 << Block::Grass as u32,
        ..Default::default()
    };
    v.inventory.set(Item::Wood, 3);
    let ws = determine_goal(&v, &PriorityTable::builtin());
    assert!(ws.contains(GoalId::RETURN_TO_TABLE), "{:?}", ws);
    v.blocks |= 1 << Block::Table as u32;
    let ws = determine_goal(&v, &PriorityTable::builtin());
    assert_eq!(ws.top(), goal(AchievementId::MakeWoodPickaxe));
}

/// Achievements that require `a`, transitively, plus `a` itself.
fn downstream(a: AchievementId) -> AchievementSet {
    let g = DependencyGraph::builtin();
    let mut s = set(&[a]);
    loop {
        let before = s;
        for b in AchievementId::ALL {
            if !g.prerequisites(b).iter().all(|p| !s.contains(p)) {
                s.insert(b);
            }
        }
        if s == before {
            return s;
        }
    }
}

#[test]
fn every_achievement_can_take_the_top_slot() {
    let base = PriorityTable::builtin();
    for a in AchievementId::ALL {
        let locked = downstream(a);
        let mut v = PlannerView {
            meters: [9; 4],
            daylight: 1.0,
            unlocked: AchievementSet::from_bits(!locked.bits() & ((1 << NUM_ACHIEVEMENTS) - 1)),
            blocks: (1 << NUM_BLOCKS) - 1,
            mobs: 0,
            ..Default::default()
        };
        for i in [
            Item::Wood,
            Item::Stone,
            Item::Coal,
            Item::Iron,
            Item::Sapling,
        ] {
            v.inventory.set(i, 1);
        }
        let tools = [
            (AchievementId::MakeWoodPickaxe, Item::WoodPickaxe),
            (AchievementId::MakeStonePickaxe, Item::StonePickaxe),
            (AchievementId::MakeIronPickaxe, Item::IronPickaxe),
        ];
        for (ach, item) in tools {
            if v.unlocked.contains(ach) {
                v.inventory.set(item, 1);
            }
        }
        match a {
            AchievementId::CollectDrink => v.meters[2] = 2,
            AchievementId::EatCow => {
                v.meters[1] = 2;
                v.mobs = 1 << MobKind::Cow as u8;
            }
            AchievementId::EatPlant => v.meters[1] = 2,
            AchievementId::WakeUp => v.meters[3] = 2,
            AchievementId::DefeatZombie => v.mobs = 1 << MobKind::Zombie as u8,
            AchievementId::DefeatSkeleton => v.mobs = 1 << MobKind::Skeleton as u8,
            // Nothing ripe in view while planting.
            AchievementId::PlacePlant => v.blocks &= !(1 << Block::RipePlant as u32),
            _ => {}
        }
        let hit = (0..NUM_STAGES).any(|s| {
            let mut t = base.clone();
            t.set_stage(s);
            determine_goal(&v, &t).top() == goal(a)
        });
        assert!(hit, "{} never ranks first", a.name());
    }
}

fn view_strategy() -> impl Strategy<Value = PlannerView> {
    (
        any::<u32>(),
        0u8..16,
        prop::array::uniform12(0u8..=9),
        prop::array::uniform4(0u8..=9),
        0.0f32..=1.0,
        0u32..(1 << NUM_ACHIEVEMENTS),
    )
        .prop_map(
            |(blocks, mobs, inv, meters, daylight, unlocked)| PlannerView {
                blocks: blocks & ((1 << NUM_BLOCKS) - 1),
                mobs,
                inventory: Inventory(inv),
                meters,
                daylight,
                unlocked: AchievementSet::from_bits(unlocked),
            },
        )
}

fn table_strategy() -> impl Strategy<Value = PriorityTable> {
    prop::collection::vec(prop::array::uniform26(0.0f64..2.0), 1..6)
        .prop_filter_map("needs a positive entry per stage", |stages| {
            PriorityTable::new(stages).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, ..ProptestConfig::default() })]

    #[test]
    fn weights_are_a_distribution(v in view_strategy(), t in table_strategy(), stage in 0usize..5) {
        let mut t = t;
        t.set_stage(stage);
        let ws = determine_goal(&v, &t);
        let w = ws.weights();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(w.iter().all(|x| (0.0..=1.0).contains(x)));
        prop_assert!(w.windows(2).all(|p| p[0] >= p[1]));
        let g = ws.goals();
        prop_assert!(g[0] != g[1] && g[1] != g[2] && g[0] != g[2]);
        prop_assert_eq!(ws, determine_goal(&v, &t));
    }

    #[test]
    fn calm_states_keep_a_locked_goal(
        v in view_strategy(),
        meters in prop::array::uniform4(5u8..=9),
        t in table_strategy(),
    ) {
        let v = PlannerView { meters, ..v };
        prop_assert!(survival_scores(&v).iter().all(|u| *u == 0.0));
        prop_assume!(v.unlocked.len() < NUM_ACHIEVEMENTS);
        let ws = determine_goal(&v, &t);
        prop_assert!(ws
            .goals()
            .iter()
            .any(|g| g.target().is_some_and(|a| !v.unlocked.contains(a))));
    }

    #[test]
    fn update_keeps_table_valid(
        counts in prop::array::uniform22(0u64..=100),
        steps in 1usize..8,
    ) {
        let mut t = PriorityTable::builtin();
        let mut p = AgentProgress { window_episodes: 100, window_counts: counts, ..Default::default() };
        p.unlock_counts = counts;
        for _ in 0..steps {
            t.advance(&p);
            prop_assert!(validate_weights(t.active()).is_ok());
        }
        prop_assert_eq!(t.stage(), steps.min(NUM_STAGES - 1));
    }
}
