//! Achievement registry, dependency depths and evaluation metrics.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The 22 achievements, in their canonical (alphabetical) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum AchievementId {
    CollectCoal = 0,
    CollectDiamond,
    CollectDrink,
    CollectIron,
    CollectSapling,
    CollectStone,
    CollectWood,
    DefeatSkeleton,
    DefeatZombie,
    EatCow,
    EatPlant,
    MakeIronPickaxe,
    MakeIronSword,
    MakeStonePickaxe,
    MakeStoneSword,
    MakeWoodPickaxe,
    MakeWoodSword,
    PlaceFurnace,
    PlacePlant,
    PlaceStone,
    PlaceTable,
    WakeUp,
}

pub const NUM_ACHIEVEMENTS: usize = 22;

const NAMES: [&str; NUM_ACHIEVEMENTS] = [
    "collect_coal",
    "collect_diamond",
    "collect_drink",
    "collect_iron",
    "collect_sapling",
    "collect_stone",
    "collect_wood",
    "defeat_skeleton",
    "defeat_zombie",
    "eat_cow",
    "eat_plant",
    "make_iron_pickaxe",
    "make_iron_sword",
    "make_stone_pickaxe",
    "make_stone_sword",
    "make_wood_pickaxe",
    "make_wood_sword",
    "place_furnace",
    "place_plant",
    "place_stone",
    "place_table",
    "wake_up",
];

impl AchievementId {
    pub const ALL: [AchievementId; NUM_ACHIEVEMENTS] = {
        use AchievementId::*;
        [
            CollectCoal,
            CollectDiamond,
            CollectDrink,
            CollectIron,
            CollectSapling,
            CollectStone,
            CollectWood,
            DefeatSkeleton,
            DefeatZombie,
            EatCow,
            EatPlant,
            MakeIronPickaxe,
            MakeIronSword,
            MakeStonePickaxe,
            MakeStoneSword,
            MakeWoodPickaxe,
            MakeWoodSword,
            PlaceFurnace,
            PlacePlant,
            PlaceStone,
            PlaceTable,
            WakeUp,
        ]
    };

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        NAMES[self.index()]
    }

    pub fn from_name(name: &str) -> Option<Self> {
        NAMES.iter().position(|n| *n == name).map(|i| Self::ALL[i])
    }

    /// Depth in the built-in dependency graph (1..=8).
    pub fn depth(self) -> u8 {
        DependencyGraph::builtin().depth(self)
    }
}

impl fmt::Display for AchievementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bit set over the 22 achievements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AchievementSet(u32);

impl AchievementSet {
    pub const EMPTY: AchievementSet = AchievementSet(0);

    pub fn from_bits(bits: u32) -> Self {
        AchievementSet(bits & ((1 << NUM_ACHIEVEMENTS) - 1))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn contains(self, a: AchievementId) -> bool {
        self.0 & (1 << a.index()) != 0
    }

    #[inline]
    pub fn insert(&mut self, a: AchievementId) -> bool {
        let fresh = !self.contains(a);
        self.0 |= 1 << a.index();
        fresh
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: AchievementSet) -> AchievementSet {
        AchievementSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: AchievementSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = AchievementId> {
        AchievementId::ALL
            .into_iter()
            .filter(move |a| self.contains(*a))
    }

    pub fn to_bools(self) -> [bool; NUM_ACHIEVEMENTS] {
        let mut out = [false; NUM_ACHIEVEMENTS];
        for a in self.iter() {
            out[a.index()] = true;
        }
        out
    }
}

impl FromIterator<AchievementId> for AchievementSet {
    fn from_iter<I: IntoIterator<Item = AchievementId>>(iter: I) -> Self {
        let mut s = AchievementSet::EMPTY;
        for a in iter {
            s.insert(a);
        }
        s
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("dependency graph has a cycle through {0}")]
    Cycle(AchievementId),
    #[error("{achievement}: listed depth {listed} but graph implies {derived}")]
    DepthMismatch {
        achievement: AchievementId,
        listed: u8,
        derived: u8,
    },
    #[error("achievement {0} missing from graph")]
    Missing(AchievementId),
}

/// Prerequisite graph over achievements with derived depths.
#[derive(Debug, Clone)]
pub struct DependencyGraph {
    prereqs: [AchievementSet; NUM_ACHIEVEMENTS],
    depth: [u8; NUM_ACHIEVEMENTS],
}

const GRAPH_DATA: &str = include_str!("../data/achievement_graph.txt");

impl DependencyGraph {
    pub fn builtin() -> &'static DependencyGraph {
        static GRAPH: OnceLock<DependencyGraph> = OnceLock::new();
        GRAPH
            .get_or_init(|| DependencyGraph::parse(GRAPH_DATA).expect("built-in achievement graph"))
    }

    /// Parses `name : prereq, prereq | depth` lines and checks the listed
    /// depths against the ones implied by the edges.
    pub fn parse(text: &str) -> Result<DependencyGraph, GraphError> {
        let mut prereqs = [AchievementSet::EMPTY; NUM_ACHIEVEMENTS];
        let mut listed: [Option<u8>; NUM_ACHIEVEMENTS] = [None; NUM_ACHIEVEMENTS];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: &str| GraphError::Parse {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (lhs, rest) = line.split_once(':').ok_or_else(|| err("missing ':'"))?;
            let (deps, depth) = rest.split_once('|').ok_or_else(|| err("missing '|'"))?;
            let a = AchievementId::from_name(lhs.trim())
                .ok_or_else(|| err(&format!("unknown achievement {:?}", lhs.trim())))?;
            let depth: u8 = depth
                .trim()
                .parse()
                .map_err(|_| err("depth is not an integer"))?;
            for d in deps
                .split(',')
                .map(str::trim)
                .filter(|d| *d != "-" && !d.is_empty())
            {
                let p = AchievementId::from_name(d)
                    .ok_or_else(|| err(&format!("unknown prerequisite {d:?}")))?;
                prereqs[a.index()].insert(p);
            }
            listed[a.index()] = Some(depth);
        }
        for a in AchievementId::ALL {
            if listed[a.index()].is_none() {
                return Err(GraphError::Missing(a));
            }
        }
        let depth = derive_depths(&prereqs)?;
        for a in AchievementId::ALL {
            let l = listed[a.index()].unwrap_or(0);
            if l != depth[a.index()] {
                return Err(GraphError::DepthMismatch {
                    achievement: a,
                    listed: l,
                    derived: depth[a.index()],
                });
            }
        }
        Ok(DependencyGraph { prereqs, depth })
    }

    pub fn prerequisites(&self, a: AchievementId) -> AchievementSet {
        self.prereqs[a.index()]
    }

    pub fn depth(&self, a: AchievementId) -> u8 {
        self.depth[a.index()]
    }

    pub fn max_depth(&self) -> u8 {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (AchievementId, AchievementId)> + '_ {
        AchievementId::ALL
            .into_iter()
            .flat_map(move |a| self.prereqs[a.index()].iter().map(move |p| (p, a)))
    }
}

fn derive_depths(
    prereqs: &[AchievementSet; NUM_ACHIEVEMENTS],
) -> Result<[u8; NUM_ACHIEVEMENTS], GraphError> {
    // 0 = unvisited, 1 = on stack, 2 = done
    fn visit(
        a: usize,
        prereqs: &[AchievementSet; NUM_ACHIEVEMENTS],
        state: &mut [u8; NUM_ACHIEVEMENTS],
        depth: &mut [u8; NUM_ACHIEVEMENTS],
    ) -> Result<u8, GraphError> {
        match state[a] {
            2 => return Ok(depth[a]),
            1 => return Err(GraphError::Cycle(AchievementId::ALL[a])),
            _ => {}
        }
        state[a] = 1;
        let mut d = 0;
        for p in prereqs[a].iter() {
            d = d.max(visit(p.index(), prereqs, state, depth)?);
        }
        state[a] = 2;
        depth[a] = d + 1;
        Ok(depth[a])
    }
    let mut state = [0u8; NUM_ACHIEVEMENTS];
    let mut depth = [0u8; NUM_ACHIEVEMENTS];
    for a in 0..NUM_ACHIEVEMENTS {
        visit(a, prereqs, &mut state, &mut depth)?;
    }
    Ok(depth)
}

/// Outcome of one finished episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub unlocked: AchievementSet,
    pub episode_return: f64,
    pub length: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub success_rates: [f64; NUM_ACHIEVEMENTS],
    pub score: f64,
    pub mean_return: f64,
    pub achievement_depth: u8,
    pub sps: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no episodes to aggregate")]
    NoEpisodes,
    #[error("success rate {value} at index {index} is outside [0, 100]")]
    RateOutOfRange { index: usize, value: f64 },
    #[error("empty rate vector")]
    NoRates,
    #[error("wall time must be positive, got {0}")]
    NonPositiveTime(f64),
}

/// Percentage of episodes that unlocked each achievement.
pub fn success_rates(episodes: &[EpisodeRecord]) -> Result<[f64; NUM_ACHIEVEMENTS], MetricsError> {
    if episodes.is_empty() {
        return Err(MetricsError::NoEpisodes);
    }
    let mut counts = [0usize; NUM_ACHIEVEMENTS];
    for ep in episodes {
        for a in ep.unlocked.iter() {
            counts[a.index()] += 1;
        }
    }
    let n = episodes.len() as f64;
    Ok(counts.map(|c| 100.0 * c as f64 / n))
}

/// Geometric-mean score over success rates in percent: exp(mean ln(1 + rate)) - 1.
pub fn crafter_score(rates: &[f64]) -> Result<f64, MetricsError> {
    if rates.is_empty() {
        return Err(MetricsError::NoRates);
    }
    let mut acc = 0.0;
    for (index, &value) in rates.iter().enumerate() {
        if !(0.0..=100.0).contains(&value) {
            return Err(MetricsError::RateOutOfRange { index, value });
        }
        acc += value.ln_1p();
    }
    // A constant vector is its own mean; skip the lossy round trip.
    if rates.iter().all(|r| *r == rates[0]) {
        return Ok(rates[0]);
    }
    Ok((acc / rates.len() as f64).exp_m1())
}

/// Deepest achievement unlocked by any of the episodes (0 when none).
pub fn achievement_depth(episodes: &[EpisodeRecord]) -> u8 {
    let graph = DependencyGraph::builtin();
    episodes
        .iter()
        .flat_map(|ep| ep.unlocked.iter())
        .map(|a| graph.depth(a))
        .max()
        .unwrap_or(0)
}

pub fn sps(total_steps: u64, wall_seconds: f64) -> Result<f64, MetricsError> {
    if wall_seconds.is_nan() || wall_seconds <= 0.0 {
        return Err(MetricsError::NonPositiveTime(wall_seconds));
    }
    Ok(total_steps as f64 / wall_seconds)
}

/// SPS in the "x10^2" unit used in summary tables.
pub fn sps_hundreds(sps: f64) -> f64 {
    sps / 100.0
}

pub fn mean_return(episodes: &[EpisodeRecord]) -> Result<f64, MetricsError> {
    if episodes.is_empty() {
        return Err(MetricsError::NoEpisodes);
    }
    Ok(episodes.iter().map(|e| e.episode_return).sum::<f64>() / episodes.len() as f64)
}

impl MetricsReport {
    pub fn from_episodes(
        episodes: &[EpisodeRecord],
        sps: f64,
    ) -> Result<MetricsReport, MetricsError> {
        let success_rates = success_rates(episodes)?;
        Ok(MetricsReport {
            score: crafter_score(&success_rates)?,
            mean_return: mean_return(episodes)?,
            achievement_depth: achievement_depth(episodes),
            success_rates,
            sps,
        })
    }
}

/// Header of the per-log-point metrics CSV.
pub fn metrics_csv_header() -> String {
    let mut cols = vec![
        "step".to_string(),
        "mean_return".into(),
        "score".into(),
        "depth".into(),
        "sps".into(),
        "xi".into(),
    ];
    cols.extend(AchievementId::ALL.iter().map(|a| format!("s_{}", a.name())));
    cols.join(",")
}

/// One metrics CSV row; column order matches [`metrics_csv_header`].
pub fn metrics_csv_row(step: u64, report: &MetricsReport, xi: f64) -> String {
    let mut row = format!(
        "{},{:.6},{:.6},{},{:.3},{:.6}",
        step, report.mean_return, report.score, report.achievement_depth, report.sps, xi
    );
    for r in report.success_rates {
        row.push_str(&format!(",{r:.4}"));
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ep(unlocked: &[AchievementId]) -> EpisodeRecord {
        EpisodeRecord {
            unlocked: unlocked.iter().copied().collect(),
            episode_return: unlocked.len() as f64,
            length: 10,
        }
    }

    #[test]
    fn names_round_trip() {
        for a in AchievementId::ALL {
            assert_eq!(AchievementId::from_name(a.name()), Some(a));
            assert_eq!(AchievementId::from_index(a.index()), Some(a));
        }
        assert_eq!(AchievementId::ALL.len(), 22);
        assert_eq!(AchievementId::from_name("fly"), None);
    }

    #[test]
    fn success_rate_ratios() {
        let eps = [ep(&[AchievementId::CollectWood]), ep(&[]), ep(&[]), ep(&[])];
        let r = success_rates(&eps).unwrap();
        assert_eq!(r[AchievementId::CollectWood.index()], 25.0);
        assert_eq!(r[AchievementId::CollectDrink.index()], 0.0);
        let all = [ep(&[AchievementId::EatCow]), ep(&[AchievementId::EatCow])];
        assert_eq!(
            success_rates(&all).unwrap()[AchievementId::EatCow.index()],
            100.0
        );
        assert_eq!(success_rates(&[]), Err(MetricsError::NoEpisodes));
    }

    #[test]
    fn score_endpoints() {
        assert_eq!(crafter_score(&[0.0; 22]).unwrap(), 0.0);
        assert_eq!(crafter_score(&[100.0; 22]).unwrap(), 100.0);
        assert!(matches!(
            crafter_score(&[101.0]),
            Err(MetricsError::RateOutOfRange { index: 0, .. })
        ));
        assert!(crafter_score(&[-0.5, 1.0]).is_err());
        assert!(crafter_score(&[f64::NAN]).is_err());
    }

    #[test]
    fn score_small_example() {
        // 50-digit evaluation of exp((ln 101 + ln 51 + 0 + 0) / 4) - 1
        let s = crafter_score(&[100.0, 50.0, 0.0, 0.0]).unwrap();
        assert!((s - 7.471_745_243_100_294).abs() < 1e-12, "{s}");
    }

    #[test]
    fn depth_examples() {
        assert_eq!(achievement_depth(&[ep(&[AchievementId::CollectWood])]), 1);
        assert_eq!(
            achievement_depth(&[ep(&[AchievementId::CollectDiamond])]),
            8
        );
        assert_eq!(achievement_depth(&[ep(&[])]), 0);
        assert_eq!(achievement_depth(&[]), 0);
        assert_eq!(
            achievement_depth(&[
                ep(&[AchievementId::CollectWood]),
                ep(&[AchievementId::MakeStonePickaxe])
            ]),
            5
        );
    }

    #[test]
    fn graph_invariants() {
        let g = DependencyGraph::builtin();
        assert_eq!(g.max_depth(), 8);
        let eights: Vec<_> = AchievementId::ALL
            .iter()
            .filter(|a| g.depth(**a) == 8)
            .collect();
        assert_eq!(eights, vec![&AchievementId::CollectDiamond]);
        for (p, a) in g.edges() {
            assert!(g.depth(a) > g.depth(p), "{p} -> {a}");
        }
        for a in AchievementId::ALL {
            let d = g
                .prerequisites(a)
                .iter()
                .map(|p| g.depth(p))
                .max()
                .unwrap_or(0)
                + 1;
            assert_eq!(g.depth(a), d);
        }
    }

    #[test]
    fn graph_rejects_cycles_and_bad_depths() {
        let mut text = GRAPH_DATA.replace(
            "collect_wood        : -",
            "collect_wood        : place_table",
        );
        assert!(matches!(
            DependencyGraph::parse(&text),
            Err(GraphError::Cycle(_))
        ));
        text = GRAPH_DATA.replace("| 8", "| 7");
        assert!(matches!(
            DependencyGraph::parse(&text),
            Err(GraphError::DepthMismatch { .. })
        ));
    }

    #[test]
    fn sps_contract() {
        assert_eq!(sps(1000, 2.0).unwrap(), 500.0);
        assert_eq!(sps(0, 1.0).unwrap(), 0.0);
        assert!(sps(10, 0.0).is_err());
        assert!(sps(10, -1.0).is_err());
        assert_eq!(sps_hundreds(1850.0), 18.5);
    }

    #[test]
    fn csv_schema() {
        let header = metrics_csv_header();
        let cols: Vec<_> = header.split(',').collect();
        assert_eq!(cols.len(), 6 + 22);
        assert_eq!(
            &cols[..6],
            &["step", "mean_return", "score", "depth", "sps", "xi"]
        );
        assert_eq!(cols[6], "s_collect_coal");
        let report =
            MetricsReport::from_episodes(&[ep(&[AchievementId::CollectWood])], 12.5).unwrap();
        let row = metrics_csv_row(5000, &report, 0.25);
        assert_eq!(row.split(',').count(), cols.len());
        assert!(row.starts_with("5000,1.000000,"));
    }
}
