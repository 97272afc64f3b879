//! Built-in duopoly cases, parameter sweeps, random convex games, and the
//! inclusion report comparing the equilibrium set with the complementarity
//! solution set.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::kkt::{classify_lattice, KktCertificate, McpMembership, MembershipRefutation};
use crate::model::{
    enumerate_joint_lattice, validate_game, validate_game_with, AbsTerm, AffineForm, Constraint,
    GameSpec, Limits, ObjectiveSpec, PlayerSpec, StrategyProfile, ValidGame,
};
use crate::nash::{enumerate_dc_nash, EquilibriumSet};
use crate::scalar::{serde_q, Scalar};

/// Distance term of the second case: `(2x1 - 3x2)^2` or `|2x1 - 3x2|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    L2,
    L1,
}

fn two_player_unit_box<T: Scalar>(
    name: String,
    objectives: [ObjectiveSpec<T>; 2],
    bound: T,
) -> GameSpec<T> {
    let players = objectives
        .into_iter()
        .enumerate()
        .map(|(p, objective)| PlayerSpec {
            id: p + 1,
            owned: p..p + 1,
            objective,
            ineq: vec![Constraint::new(vec![T::one()], bound.clone())],
            eq: vec![],
            integral: vec![true],
            upper: vec![None],
        })
        .collect();
    GameSpec {
        name,
        n: 2,
        players,
    }
}

/// Each player minimises `-x_p - x_{-p}` over `x_p ∈ [0, 1+ε] ∩ Z`.
pub fn builtin_example1<T: Scalar>(epsilon: T) -> Result<GameSpec<T>, Error> {
    if !epsilon.is_positive() {
        return Err(Error::NonPositiveEpsilon(epsilon.to_string()));
    }
    let mut obj = ObjectiveSpec::zero(2);
    obj.lin = vec![-T::one(), -T::one()];
    let bound = T::one() + epsilon.clone();
    Ok(two_player_unit_box(
        format!("example1 eps={epsilon}"),
        [obj.clone(), obj],
        bound,
    ))
}

/// Player 1 minimises `D(x)`, player 2 minimises `D(x) - δ x1 x2`, with
/// `D = (2x1 - 3x2)^2` (L2) or `|2x1 - 3x2|` (L1), over `x_p ∈ {0, 1}`.
pub fn builtin_example2<T: Scalar>(delta: T, norm: Norm) -> GameSpec<T> {
    let i = T::from_int;
    let mut base = ObjectiveSpec::zero(2);
    match norm {
        Norm::L2 => base.quad = vec![vec![i(4), i(-6)], vec![i(-6), i(9)]],
        Norm::L1 => base.abs_terms.push(AbsTerm {
            weight: T::one(),
            form: AffineForm {
                coeffs: vec![i(2), i(-3)],
                constant: T::zero(),
            },
        }),
    }
    let mut second = base.clone();
    let half_delta = delta.clone() / i(2);
    second.quad[0][1] = second.quad[0][1].clone() - half_delta.clone();
    second.quad[1][0] = second.quad[1][0].clone() - half_delta;
    let tag = match norm {
        Norm::L2 => "l2",
        Norm::L1 => "l1",
    };
    two_player_unit_box(
        format!("example2-{tag} delta={delta}"),
        [base, second],
        T::one(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    Example1,
    Example2(Norm),
}

impl Case {
    pub fn game<T: Scalar>(&self, param: T) -> Result<GameSpec<T>, Error> {
        match *self {
            Case::Example1 => builtin_example1(param),
            Case::Example2(norm) => Ok(builtin_example2(param, norm)),
        }
    }

    pub fn default_param<T: Scalar>(&self) -> T {
        match self {
            Case::Example1 => T::from_frac(1, 2),
            Case::Example2(_) => T::zero(),
        }
    }

    pub fn param_name(&self) -> &'static str {
        match self {
            Case::Example1 => "epsilon",
            Case::Example2(_) => "delta",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Example1 => "example1",
            Case::Example2(Norm::L2) => "example2-l2",
            Case::Example2(Norm::L1) => "example2-l1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown case `{0}` (expected example1, example2-l2 or example2-l1)")]
pub struct UnknownCase(pub String);

impl FromStr for Case {
    type Err = UnknownCase;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "example1" => Ok(Case::Example1),
            "example2-l2" | "example2" => Ok(Case::Example2(Norm::L2)),
            "example2-l1" => Ok(Case::Example2(Norm::L1)),
            other => Err(UnknownCase(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    Equal,
    StrictSubset,
    EmptyMcpNonemptyNash,
    BothEmpty,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Classifies `mcp` against `nash`; `None` when `mcp ⊄ nash`.
pub fn classify<T: Scalar>(nash: &EquilibriumSet<T>, mcp: &EquilibriumSet<T>) -> Option<Relation> {
    if !mcp.is_subset_of(nash) {
        return None;
    }
    Some(match (nash.is_empty(), mcp.is_empty()) {
        (true, _) => Relation::BothEmpty,
        (false, true) => Relation::EmptyMcpNonemptyNash,
        _ if mcp.len() == nash.len() => Relation::Equal,
        _ => Relation::StrictSubset,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MissedEquilibrium<T> {
    pub profile: StrategyProfile<T>,
    pub refutation: MembershipRefutation<T>,
}

/// Where player `player` attains its lowest cost over the joint lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GlobalOptNote<T> {
    pub player: usize,
    #[serde(with = "serde_q")]
    pub value: T,
    pub minimizers: Vec<StrategyProfile<T>>,
    /// Minimisers that are equilibria but have no KKT multipliers.
    pub missed: Vec<StrategyProfile<T>>,
}

impl<T> GlobalOptNote<T> {
    pub fn is_missed(&self) -> bool {
        !self.missed.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct InclusionReport<T> {
    pub descriptor: String,
    pub nash: EquilibriumSet<T>,
    pub mcp: EquilibriumSet<T>,
    pub relation: Relation,
    /// Equilibria outside the complementarity set, each with its refutation.
    pub witnesses: Vec<MissedEquilibrium<T>>,
    /// One certificate per member of the complementarity set.
    pub certificates: Vec<KktCertificate<T>>,
    pub global_optima: Vec<GlobalOptNote<T>>,
}

pub fn inclusion_report<T: Scalar>(game: &ValidGame<T>) -> Result<InclusionReport<T>, Error> {
    let nash = enumerate_dc_nash(game)?;
    let classified = classify_lattice(game)?;

    let mut certificates = Vec::new();
    let mut refutations = Vec::new();
    for (x, m) in classified {
        match m {
            McpMembership::Member(c) => certificates.push(c),
            McpMembership::NonMember(r) => {
                if nash.contains(&x) {
                    refutations.push(MissedEquilibrium {
                        profile: x,
                        refutation: r,
                    });
                }
            }
        }
    }
    let mcp = EquilibriumSet {
        profiles: certificates.iter().map(|c| c.profile.clone()).collect(),
        exhaustive: true,
    };
    let Some(relation) = classify(&nash, &mcp) else {
        let outside: Vec<String> = mcp
            .profiles
            .iter()
            .filter(|x| !nash.contains(x))
            .map(ToString::to_string)
            .collect();
        return Err(Error::InclusionViolated(outside.join(", ")));
    };

    let profiles = enumerate_joint_lattice(game)?;
    let global_optima = game
        .players()
        .iter()
        .filter_map(|player| {
            let values: Vec<T> = profiles
                .iter()
                .map(|x| player.objective.eval(&x.x))
                .collect();
            let best = values.iter().min()?.clone();
            let minimizers: Vec<StrategyProfile<T>> = profiles
                .iter()
                .zip(&values)
                .filter(|(_, v)| **v == best)
                .map(|(x, _)| x.clone())
                .collect();
            let missed = minimizers
                .iter()
                .filter(|x| nash.contains(x) && !mcp.contains(x))
                .cloned()
                .collect();
            Some(GlobalOptNote {
                player: player.id,
                value: best,
                minimizers,
                missed,
            })
        })
        .collect();

    Ok(InclusionReport {
        descriptor: game.spec().name.clone(),
        nash,
        mcp,
        relation,
        witnesses: refutations,
        certificates,
        global_optima,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SweepRow<T> {
    #[serde(with = "serde_q")]
    pub param: T,
    pub report: InclusionReport<T>,
}

impl<T: Scalar> SweepRow<T> {
    pub fn nash(&self) -> &EquilibriumSet<T> {
        &self.report.nash
    }

    pub fn mcp(&self) -> &EquilibriumSet<T> {
        &self.report.mcp
    }

    pub fn relation(&self) -> Relation {
        self.report.relation
    }
}

/// One report per grid value, ordered by parameter.
pub fn sweep<T: Scalar>(case: Case, grid: &[T]) -> Result<Vec<SweepRow<T>>, Error> {
    sweep_with(case, grid, Limits::default())
}

pub fn sweep_with<T: Scalar>(
    case: Case,
    grid: &[T],
    limits: Limits,
) -> Result<Vec<SweepRow<T>>, Error> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut params = grid.to_vec();
    params.sort();
    params.dedup();
    params
        .into_par_iter()
        .map(|param| {
            let game = validate_game_with(case.game(param.clone())?, limits)?;
            Ok(SweepRow {
                report: inclusion_report(&game)?,
                param,
            })
        })
        .collect()
}

/// Size limits for [`random_game`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomShape {
    pub max_players: usize,
    pub max_own: usize,
    pub max_bound: i64,
    pub max_numerator: i64,
    pub max_denominator: i64,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape {
            max_players: 3,
            max_own: 2,
            max_bound: 3,
            max_numerator: 3,
            max_denominator: 2,
        }
    }
}

const RANDOM_ATTEMPTS: usize = 32;

/// Random convex game; identical output for identical `(seed, shape)`.
/// Own quadratic blocks are built as `MᵀM`; draws that still fail
/// validation are resampled.
pub fn random_game<T: Scalar>(seed: u64, shape: RandomShape) -> Result<GameSpec<T>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_ATTEMPTS {
        let game = draw_game(&mut rng, seed, &shape);
        if let Ok(valid) = validate_game(game.clone()) {
            if valid.is_convex() {
                return Ok(game);
            }
        }
    }
    Err(Error::GenerationExhausted(RANDOM_ATTEMPTS))
}

fn draw_game<T: Scalar>(rng: &mut ChaCha8Rng, seed: u64, shape: &RandomShape) -> GameSpec<T> {
    let small = |rng: &mut ChaCha8Rng| -> T {
        let num = rng.gen_range(-shape.max_numerator..=shape.max_numerator);
        let den = rng.gen_range(1..=shape.max_denominator);
        T::from_frac(num, den)
    };
    let n_players = rng.gen_range(1..=shape.max_players);
    let sizes: Vec<usize> = (0..n_players)
        .map(|_| rng.gen_range(1..=shape.max_own))
        .collect();
    let n: usize = sizes.iter().sum();

    let mut players = Vec::with_capacity(n_players);
    let mut start = 0;
    for (p, &k) in sizes.iter().enumerate() {
        let owned = start..start + k;
        start += k;

        let mut quad = vec![vec![T::zero(); n]; n];
        for (i, j) in (0..n).flat_map(|i| (i..n).map(move |j| (i, j))) {
            let v = small(rng);
            quad[i][j] = v.clone();
            quad[j][i] = v;
        }
        let m: Vec<Vec<T>> = (0..k)
            .map(|_| (0..k).map(|_| small(rng)).collect())
            .collect();
        for (a, i) in owned.clone().enumerate() {
            for (b, j) in owned.clone().enumerate() {
                quad[i][j] =
                    (0..k).fold(T::zero(), |acc, r| acc + m[r][a].clone() * m[r][b].clone());
            }
        }
        let lin = (0..n).map(|_| small(rng)).collect();
        let constant = small(rng);
        let mut abs_terms = Vec::new();
        if rng.gen_bool(0.35) {
            abs_terms.push(AbsTerm {
                weight: T::from_int(rng.gen_range(0..=2)),
                form: AffineForm {
                    coeffs: (0..n).map(|_| T::from_int(rng.gen_range(-3..=3))).collect(),
                    constant: small(rng),
                },
            });
        }

        let upper = (0..k)
            .map(|_| Some(T::from_int(rng.gen_range(1..=shape.max_bound))))
            .collect();
        let mut ineq = Vec::new();
        if rng.gen_bool(0.3) {
            let coeffs = (0..k).map(|_| T::from_int(rng.gen_range(0..=2))).collect();
            ineq.push(Constraint::new(
                coeffs,
                T::from_int(rng.gen_range(1..=shape.max_bound * k as i64)),
            ));
        }
        let mut eq = Vec::new();
        if k > 1 && rng.gen_bool(0.1) {
            let coeffs = [T::one(), T::one()];
            let target = *[1i64, 2].choose(rng).expect("non-empty");
            eq.push(Constraint::new(coeffs.to_vec(), T::from_int(target)));
        }

        players.push(PlayerSpec {
            id: p + 1,
            owned,
            objective: ObjectiveSpec {
                quad,
                lin,
                constant,
                abs_terms,
            },
            ineq,
            eq,
            integral: vec![true; k],
            upper,
        });
    }
    GameSpec {
        name: format!("random seed={seed}"),
        n,
        players,
    }
}
