//! Game model: players, objectives, constraints, validation and lattices.
//!
//! Player `p`'s cost is
//! `f_p(x) = xᵀQ_p x + c_pᵀx + d_p + Σ_t w_t |a_tᵀx + b_t|` over the joint
//! vector `x`. Constraints are affine in the player's own variables only.
//! Every own variable is nonnegative, integral and bounded.
//!
//! Players are addressed by 0-based index in the API; `PlayerSpec::id` is the
//! 1-based label used in reports.

use std::fmt;
use std::ops::Range;

use crate::error::{DiagnosticList, Error};
use crate::linfeas::{dot, solve_feasibility, LinearSystem};
use crate::psd::is_positive_semidefinite;
use serde::{Deserialize, Serialize};

use crate::scalar::{render_tuple, serde_q, Scalar};

pub const DEFAULT_LATTICE_CAP: u64 = 1_000_000;
pub const DEFAULT_PATTERN_BUDGET: u64 = 1 << 16;

/// `coeffs·x + constant` over the joint vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineForm<T> {
    pub coeffs: Vec<T>,
    pub constant: T,
}

impl<T: Scalar> AffineForm<T> {
    pub fn eval(&self, x: &[T]) -> T {
        dot(&self.coeffs, x) + self.constant.clone()
    }
}

/// `weight · |form(x)|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsTerm<T> {
    pub weight: T,
    pub form: AffineForm<T>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveSpec<T> {
    /// Symmetric `n × n` matrix over the joint vector.
    pub quad: Vec<Vec<T>>,
    pub lin: Vec<T>,
    pub constant: T,
    pub abs_terms: Vec<AbsTerm<T>>,
}

impl<T: Scalar> ObjectiveSpec<T> {
    pub fn zero(n: usize) -> Self {
        ObjectiveSpec {
            quad: vec![vec![T::zero(); n]; n],
            lin: vec![T::zero(); n],
            constant: T::zero(),
            abs_terms: Vec::new(),
        }
    }

    pub fn quadratic_part(&self, x: &[T]) -> T {
        let mut acc = self.constant.clone() + dot(&self.lin, x);
        for (row, xi) in self.quad.iter().zip(x) {
            if xi.is_zero() {
                continue;
            }
            acc = acc + xi.clone() * dot(row, x);
        }
        acc
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.abs_terms
            .iter()
            .fold(self.quadratic_part(x), |acc, t| {
                acc + t.weight.clone() * t.form.eval(x).abs()
            })
    }

    /// Partial derivative of the quadratic part, `2(Qx)_i + c_i`.
    pub fn quad_gradient_component(&self, i: usize, x: &[T]) -> T {
        T::from_int(2) * dot(&self.quad[i], x) + self.lin[i].clone()
    }
}

/// `coeffs·x_p (<= | =) rhs` over the player's own variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub rhs: T,
}

impl<T: Scalar> Constraint<T> {
    pub fn new(coeffs: Vec<T>, rhs: T) -> Self {
        Constraint { coeffs, rhs }
    }

    /// `rhs - coeffs·x_p`, i.e. `-g(x_p)` for an inequality.
    pub fn slack(&self, own: &[T]) -> T {
        self.rhs.clone() - dot(&self.coeffs, own)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerSpec<T> {
    pub id: usize,
    pub owned: Range<usize>,
    pub objective: ObjectiveSpec<T>,
    pub ineq: Vec<Constraint<T>>,
    pub eq: Vec<Constraint<T>>,
    pub integral: Vec<bool>,
    /// Declared upper bounds; `Some(u)` adds the constraint `x_i <= u`.
    pub upper: Vec<Option<T>>,
}

impl<T: Scalar> PlayerSpec<T> {
    pub fn n_own(&self) -> usize {
        self.owned.len()
    }

    /// Listed inequalities followed by one row per declared upper bound.
    pub fn inequalities(&self) -> Vec<Constraint<T>> {
        let k = self.n_own();
        let mut out = self.ineq.clone();
        for (i, u) in self.upper.iter().enumerate() {
            if let Some(u) = u {
                let mut coeffs = vec![T::zero(); k];
                coeffs[i] = T::one();
                out.push(Constraint::new(coeffs, u.clone()));
            }
        }
        out
    }

    pub fn own_slice<'a>(&self, x: &'a [T]) -> &'a [T] {
        &x[self.owned.clone()]
    }

    fn relaxation_system(&self) -> LinearSystem<T> {
        let k = self.n_own();
        let mut sys = LinearSystem::new(k);
        sys.nonneg = vec![true; k];
        for c in self.inequalities() {
            sys.push_le(c.coeffs, c.rhs);
        }
        for c in &self.eq {
            sys.push_eq(c.coeffs.clone(), c.rhs.clone());
        }
        sys
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec<T> {
    pub name: String,
    pub n: usize,
    pub players: Vec<PlayerSpec<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Scalar")]
pub struct StrategyProfile<T> {
    #[serde(with = "serde_q::vec")]
    pub x: Vec<T>,
}

impl<T: Scalar> StrategyProfile<T> {
    pub fn new(x: Vec<T>) -> Self {
        StrategyProfile { x }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        StrategyProfile {
            x: v.iter().map(|&i| T::from_int(i)).collect(),
        }
    }

    /// Copy of `self` with player-owned coordinates replaced by `own`.
    pub fn with_own(&self, owned: &Range<usize>, own: &[T]) -> Self {
        let mut x = self.x.clone();
        x[owned.clone()].clone_from_slice(own);
        StrategyProfile { x }
    }
}

impl<T: Scalar> fmt::Display for StrategyProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_tuple(&self.x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    NoPlayers,
    PlayerIdGap {
        index: usize,
        id: usize,
    },
    EmptyOwnership {
        player: usize,
    },
    OwnershipOutOfRange {
        player: usize,
        end: usize,
        n: usize,
    },
    OwnershipOverlap {
        var: usize,
        players: Vec<usize>,
    },
    UnownedVariable {
        var: usize,
    },
    DimensionMismatch {
        player: usize,
        what: String,
        expected: usize,
        found: usize,
    },
    AsymmetricQuadratic {
        player: usize,
        i: usize,
        j: usize,
    },
    NegativeAbsWeight {
        player: usize,
        term: usize,
    },
    ContinuousVariable {
        player: usize,
        var: usize,
    },
    NegativeUpperBound {
        player: usize,
        var: usize,
    },
    UnboundedLattice {
        player: usize,
        var: usize,
    },
    /// Warning only: the game remains usable for equilibrium enumeration.
    NonConvexOwnBlock {
        player: usize,
    },
}

impl Diagnostic {
    pub fn is_warning(&self) -> bool {
        matches!(self, Diagnostic::NonConvexOwnBlock { .. })
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Diagnostic::*;
        match self {
            NoPlayers => write!(f, "game has no players"),
            PlayerIdGap { index, id } => {
                write!(f, "player at position {} has id {id}, expected {}", index + 1, index + 1)
            }
            EmptyOwnership { player } => write!(f, "player {player} owns no variables"),
            OwnershipOutOfRange { player, end, n } => {
                write!(f, "player {player} owns variables up to {end} but the game has {n}")
            }
            OwnershipOverlap { var, players } => {
                write!(f, "variable {var} is owned by players {players:?}")
            }
            UnownedVariable { var } => write!(f, "variable {var} is owned by no player"),
            DimensionMismatch { player, what, expected, found } => write!(
                f,
                "player {player}: {what} has length {found}, expected {expected}"
            ),
            AsymmetricQuadratic { player, i, j } => {
                write!(f, "player {player}: quadratic matrix not symmetric at ({i},{j})")
            }
            NegativeAbsWeight { player, term } => {
                write!(f, "player {player}: absolute-value term {term} has a negative weight")
            }
            ContinuousVariable { player, var } => write!(
                f,
                "player {player}: own variable {var} is not integral (only integer decisions are supported)"
            ),
            NegativeUpperBound { player, var } => {
                write!(f, "player {player}: declared upper bound on own variable {var} is negative")
            }
            UnboundedLattice { player, var } => write!(
                f,
                "player {player}: own variable {var} has no finite upper bound"
            ),
            NonConvexOwnBlock { player } => write!(
                f,
                "warning: player {player}: own quadratic block is not positive semidefinite"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub lattice_cap: u64,
    pub pattern_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            lattice_cap: DEFAULT_LATTICE_CAP,
            pattern_budget: DEFAULT_PATTERN_BUDGET,
        }
    }
}

/// A game that passed validation. Immutable.
#[derive(Debug, Clone)]
pub struct ValidGame<T> {
    spec: GameSpec<T>,
    /// Integer box per player; `None` when the relaxed feasible set is empty.
    boxes: Vec<Option<Vec<T>>>,
    nonconvex: Vec<usize>,
    warnings: Vec<Diagnostic>,
    limits: Limits,
}

impl<T: Scalar> ValidGame<T> {
    pub fn spec(&self) -> &GameSpec<T> {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn players(&self) -> &[PlayerSpec<T>] {
        &self.spec.players
    }

    pub fn player(&self, p: usize) -> Result<&PlayerSpec<T>, Error> {
        self.spec.players.get(p).ok_or(Error::UnknownPlayer(p))
    }

    pub fn is_convex(&self) -> bool {
        self.nonconvex.is_empty()
    }

    pub fn warnings(&self) -> &[Diagnostic] {
        &self.warnings
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    /// Upper corner of the integer box containing `X_p`.
    pub fn lattice_box(&self, p: usize) -> Option<&[T]> {
        self.boxes.get(p).and_then(|b| b.as_deref())
    }

    /// Errors unless every own block is convex.
    pub fn require_convex(&self) -> Result<(), Error> {
        match self.nonconvex.first() {
            None => Ok(()),
            Some(&player) => Err(Error::NonConvexOwnBlock { player }),
        }
    }

    pub fn check_dimension(&self, x: &StrategyProfile<T>) -> Result<(), Error> {
        if x.x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                what: "strategy profile".into(),
                expected: self.n(),
                found: x.x.len(),
            });
        }
        Ok(())
    }

    /// Whether the player's own slice lies in `X_p`.
    pub fn own_feasibility(&self, p: usize, x: &StrategyProfile<T>) -> Result<(), Error> {
        self.check_dimension(x)?;
        let player = self.player(p)?;
        let own = player.own_slice(&x.x);
        let fail = |reason: String| Error::InfeasibleProfile {
            player: player.id,
            reason,
        };
        for (i, v) in own.iter().enumerate() {
            if v.is_negative() || !v.is_integral() {
                return Err(fail(format!(
                    "own variable {i} = {v} is not a nonnegative integer"
                )));
            }
        }
        for (j, c) in player.inequalities().iter().enumerate() {
            if c.slack(own).is_negative() {
                return Err(fail(format!("inequality {j} is violated")));
            }
        }
        for (k, c) in player.eq.iter().enumerate() {
            if !c.slack(own).is_zero() {
                return Err(fail(format!("equality {k} is violated")));
            }
        }
        Ok(())
    }

    pub fn check_profile(&self, x: &StrategyProfile<T>) -> Result<(), Error> {
        (0..self.spec.players.len()).try_for_each(|p| self.own_feasibility(p, x))
    }
}

pub fn validate_game<T: Scalar>(game: GameSpec<T>) -> Result<ValidGame<T>, Error> {
    validate_game_with(game, Limits::default())
}

/// Runs every check and reports all violations together.
pub fn validate_game_with<T: Scalar>(
    game: GameSpec<T>,
    limits: Limits,
) -> Result<ValidGame<T>, Error> {
    let mut diags = Vec::new();
    let n = game.n;
    if game.players.is_empty() {
        diags.push(Diagnostic::NoPlayers);
    }

    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, p) in game.players.iter().enumerate() {
        if p.id != idx + 1 {
            diags.push(Diagnostic::PlayerIdGap {
                index: idx,
                id: p.id,
            });
        }
        if p.owned.is_empty() {
            diags.push(Diagnostic::EmptyOwnership { player: p.id });
        }
        if p.owned.end > n {
            diags.push(Diagnostic::OwnershipOutOfRange {
                player: p.id,
                end: p.owned.end,
                n,
            });
        }
        for v in p.owned.clone().filter(|&v| v < n) {
            owners[v].push(p.id);
        }
    }
    for (var, who) in owners.iter().enumerate() {
        match who.len() {
            0 => diags.push(Diagnostic::UnownedVariable { var }),
            1 => {}
            _ => diags.push(Diagnostic::OwnershipOverlap {
                var,
                players: who.clone(),
            }),
        }
    }

    let mut boxes = Vec::with_capacity(game.players.len());
    let mut nonconvex = Vec::new();
    for p in &game.players {
        let before = diags.len();
        check_player_shape(p, n, &mut diags);
        if diags.len() > before || p.owned.end > n || p.owned.is_empty() {
            boxes.push(None);
            continue;
        }
        if !is_positive_semidefinite(&own_block(&p.objective.quad, &p.owned)) {
            nonconvex.push(p.id);
            diags.push(Diagnostic::NonConvexOwnBlock { player: p.id });
        }
        match derive_box(p)? {
            BoxResult::Empty => boxes.push(None),
            BoxResult::Bounded(ub) => boxes.push(Some(ub)),
            BoxResult::Unbounded(vars) => {
                for var in vars {
                    diags.push(Diagnostic::UnboundedLattice { player: p.id, var });
                }
                boxes.push(None);
            }
        }
    }

    if diags.iter().any(|d| !d.is_warning()) {
        return Err(Error::Validation(DiagnosticList(diags)));
    }
    Ok(ValidGame {
        spec: game,
        boxes,
        nonconvex,
        warnings: diags,
        limits,
    })
}

fn check_player_shape<T: Scalar>(p: &PlayerSpec<T>, n: usize, diags: &mut Vec<Diagnostic>) {
    let k = p.owned.len();
    let mut dim = |what: &str, expected: usize, found: usize| {
        if expected != found {
            diags.push(Diagnostic::DimensionMismatch {
                player: p.id,
                what: what.to_string(),
                expected,
                found,
            });
        }
    };
    let obj = &p.objective;
    dim("quadratic matrix rows", n, obj.quad.len());
    for row in &obj.quad {
        dim("quadratic matrix row", n, row.len());
    }
    dim("linear coefficients", n, obj.lin.len());
    for t in &obj.abs_terms {
        dim("absolute-value term coefficients", n, t.form.coeffs.len());
    }
    for c in p.ineq.iter().chain(&p.eq) {
        dim("constraint coefficients", k, c.coeffs.len());
    }
    dim("integrality flags", k, p.integral.len());
    dim("upper bounds", k, p.upper.len());

    if obj.quad.len() == n && obj.quad.iter().all(|r| r.len() == n) {
        'sym: for i in 0..n {
            for j in (i + 1)..n {
                if obj.quad[i][j] != obj.quad[j][i] {
                    diags.push(Diagnostic::AsymmetricQuadratic { player: p.id, i, j });
                    break 'sym;
                }
            }
        }
    }
    for (term, t) in obj.abs_terms.iter().enumerate() {
        if t.weight.is_negative() {
            diags.push(Diagnostic::NegativeAbsWeight { player: p.id, term });
        }
    }
    for (var, &flag) in p.integral.iter().enumerate() {
        if !flag {
            diags.push(Diagnostic::ContinuousVariable { player: p.id, var });
        }
    }
    for (var, u) in p.upper.iter().enumerate() {
        if u.as_ref().is_some_and(|u| u.is_negative()) {
            diags.push(Diagnostic::NegativeUpperBound { player: p.id, var });
        }
    }
}

pub(crate) fn own_block<T: Scalar>(quad: &[Vec<T>], owned: &Range<usize>) -> Vec<Vec<T>> {
    owned
        .clone()
        .map(|i| owned.clone().map(|j| quad[i][j].clone()).collect())
        .collect()
}

enum BoxResult<T> {
    Empty,
    Bounded(Vec<T>),
    Unbounded(Vec<usize>),
}

/// Largest integer value each own variable attains over the relaxation.
fn derive_box<T: Scalar>(p: &PlayerSpec<T>) -> Result<BoxResult<T>, Error> {
    let base = p.relaxation_system();
    if !solve_feasibility(&base)?.is_feasible() {
        return Ok(BoxResult::Empty);
    }
    let k = p.n_own();
    let unit = |i: usize, v: T| {
        let mut e = vec![T::zero(); k];
        e[i] = v;
        e
    };

    let mut unbounded = Vec::new();
    let mut upper = Vec::with_capacity(k);
    for i in 0..k {
        // recession direction d >= 0 with d_i >= 1
        let mut rec = LinearSystem::new(k);
        rec.nonneg = vec![true; k];
        for row in &base.ineq_rows {
            rec.push_le(row.coeffs.clone(), T::zero());
        }
        for row in &base.eq_rows {
            rec.push_eq(row.coeffs.clone(), T::zero());
        }
        rec.push_le(unit(i, -T::one()), -T::one());
        if solve_feasibility(&rec)?.is_feasible() {
            unbounded.push(i);
            continue;
        }

        let reaches = |level: &T| -> Result<bool, Error> {
            let mut sys = base.clone();
            sys.push_le(unit(i, -T::one()), -level.clone());
            Ok(solve_feasibility(&sys)?.is_feasible())
        };
        let two = T::from_int(2);
        let mut lo = T::zero();
        let mut hi = T::one();
        while reaches(&hi)? {
            lo = hi.clone();
            hi = hi * two.clone();
        }
        while hi.clone() - lo.clone() > T::one() {
            let mid = ((lo.clone() + hi.clone()) / two.clone()).floor_value();
            if reaches(&mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        upper.push(lo);
    }
    if unbounded.is_empty() {
        Ok(BoxResult::Bounded(upper))
    } else {
        Ok(BoxResult::Unbounded(unbounded))
    }
}

pub fn evaluate_objective<T: Scalar>(
    game: &ValidGame<T>,
    p: usize,
    x: &StrategyProfile<T>,
) -> Result<T, Error> {
    game.check_dimension(x)?;
    Ok(game.player(p)?.objective.eval(&x.x))
}

fn box_size<T: Scalar>(ub: &[T]) -> u128 {
    ub.iter().fold(1u128, |acc, u| {
        let width = u.to_u128().map_or(u128::MAX, |w| w.saturating_add(1));
        acc.saturating_mul(width)
    })
}

/// Points of `X_p` in lexicographic order.
pub fn enumerate_feasible_lattice<T: Scalar>(
    game: &ValidGame<T>,
    p: usize,
) -> Result<Vec<Vec<T>>, Error> {
    let player = game.player(p)?;
    let Some(ub) = game.lattice_box(p) else {
        return Ok(Vec::new());
    };
    let cap = game.limits().lattice_cap;
    let size = box_size(ub);
    if size > u128::from(cap) {
        return Err(Error::LatticeTooLarge { size, cap });
    }
    let ineq = player.inequalities();
    let k = ub.len();
    let mut out = Vec::new();
    let mut point = vec![T::zero(); k];
    loop {
        let feasible = ineq.iter().all(|c| !c.slack(&point).is_negative())
            && player.eq.iter().all(|c| c.slack(&point).is_zero());
        if feasible {
            out.push(point.clone());
        }
        // odometer increment, last coordinate fastest
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if point[i] < ub[i] {
                point[i] = point[i].clone() + T::one();
                break;
            }
            point[i] = T::zero();
        }
    }
}

/// Cartesian product of all `X_p`, sorted lexicographically on the joint vector.
pub fn enumerate_joint_lattice<T: Scalar>(
    game: &ValidGame<T>,
) -> Result<Vec<StrategyProfile<T>>, Error> {
    let cap = game.limits().lattice_cap;
    let lattices: Vec<Vec<Vec<T>>> = (0..game.players().len())
        .map(|p| enumerate_feasible_lattice(game, p))
        .collect::<Result<_, _>>()?;
    let size = lattices
        .iter()
        .fold(1u128, |acc, l| acc.saturating_mul(l.len() as u128));
    if size > u128::from(cap) {
        return Err(Error::LatticeTooLarge { size, cap });
    }
    let mut profiles = vec![StrategyProfile::new(vec![T::zero(); game.n()])];
    for (player, lattice) in game.players().iter().zip(&lattices) {
        profiles = profiles
            .iter()
            .flat_map(|base| {
                lattice
                    .iter()
                    .map(move |own| base.with_own(&player.owned, own))
            })
            .collect();
    }
    profiles.sort();
    Ok(profiles)
}
