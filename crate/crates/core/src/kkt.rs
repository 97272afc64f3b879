//! Relaxed KKT systems and membership of integral profiles in the
//! discretely-constrained complementarity solution set.
//!
//! For player `p` the relaxed problem is `min f_p(·, x_{-p})` over the
//! continuous relaxation `C_p`. Absolute-value terms `w|a·x + b|` are replaced
//! by `w·t` with `a·x + b - t <= 0 [mu+]` and `-(a·x + b) - t <= 0 [mu-]`,
//! `t` free. With `x` fixed, the remaining unknowns of player `p` are
//!
//! ```text
//! lambda (|I_p|, >= 0)   gamma (|E_p|, free)   t, mu+, mu- (one each per epigraph term)
//! ```
//!
//! and the conditions are
//!
//! ```text
//! 0 <= grad_i f_p + Σ lambda_j α_ji + Σ gamma_k e_ki + Σ a_ei (mu+_e - mu-_e)  ⊥  x_i >= 0
//! 0 <= rhs_j - α_j·x_p                                                        ⊥  lambda_j >= 0
//! e_k·x_p = rhs_k
//! w_e - mu+_e - mu-_e = 0
//! 0 <= t_e - (a_e·x + b_e)  ⊥  mu+_e >= 0
//! 0 <= t_e + (a_e·x + b_e)  ⊥  mu-_e >= 0
//! ```
//!
//! Once `x` is fixed, the branch of every pair involving `x` is determined;
//! only the epigraph pairs (which involve the unknown `t`) are enumerated.
//! Each complete branch choice is a linear feasibility problem.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linfeas::{
    dot, solve_feasibility, verify_outcome, FarkasCertificate, FeasibilityOutcome, LinearSystem,
};
use crate::model::{
    enumerate_joint_lattice, AbsTerm, AffineForm, Constraint, StrategyProfile, ValidGame,
};
use crate::nash::EquilibriumSet;
use crate::scalar::{serde_q, Scalar};

/// Relaxed KKT data of one player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerKkt<T> {
    /// 1-based player id.
    pub player: usize,
    pub owned: Range<usize>,
    /// `∂f_p/∂x_i` of the quadratic part, one affine form per own variable.
    pub gradient: Vec<AffineForm<T>>,
    /// Listed inequalities followed by declared upper bounds.
    pub ineq: Vec<Constraint<T>>,
    pub eq: Vec<Constraint<T>>,
    pub epigraph: Vec<AbsTerm<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedKktSystem<T> {
    pub n: usize,
    pub players: Vec<PlayerKkt<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplementarityPair {
    Stationarity(usize),
    Constraint(usize),
    EpigraphUpper(usize),
    EpigraphLower(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `x_i > 0`, stationarity row `= 0`.
    PrimalPositive,
    /// `x_i = 0`, stationarity row `>= 0`.
    PrimalZero,
    /// Constraint binding, multiplier `>= 0`.
    Active,
    /// Multiplier `= 0`, constraint `<= 0`.
    Inactive,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComplementarityPattern {
    pub stationarity: Vec<Branch>,
    pub constraints: Vec<Branch>,
    pub epigraph_upper: Vec<Branch>,
    pub epigraph_lower: Vec<Branch>,
}

impl ComplementarityPattern {
    pub fn branches(&self) -> Vec<(ComplementarityPair, Branch)> {
        let tag = |f: fn(usize) -> ComplementarityPair,
                   v: &[Branch]|
         -> Vec<(ComplementarityPair, Branch)> {
            v.iter().enumerate().map(|(i, &b)| (f(i), b)).collect()
        };
        let mut out = tag(ComplementarityPair::Stationarity, &self.stationarity);
        out.extend(tag(ComplementarityPair::Constraint, &self.constraints));
        out.extend(tag(
            ComplementarityPair::EpigraphUpper,
            &self.epigraph_upper,
        ));
        out.extend(tag(
            ComplementarityPair::EpigraphLower,
            &self.epigraph_lower,
        ));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Multipliers<T> {
    #[serde(with = "serde_q::vec")]
    pub lambda: Vec<T>,
    #[serde(with = "serde_q::vec")]
    pub gamma: Vec<T>,
    #[serde(with = "serde_q::vec")]
    pub t: Vec<T>,
    #[serde(with = "serde_q::vec")]
    pub mu_plus: Vec<T>,
    #[serde(with = "serde_q::vec")]
    pub mu_minus: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PlayerCertificate<T> {
    pub player: usize,
    pub multipliers: Multipliers<T>,
    pub pattern: ComplementarityPattern,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct KktCertificate<T> {
    pub profile: StrategyProfile<T>,
    pub players: Vec<PlayerCertificate<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RefutedPattern<T> {
    pub pattern: ComplementarityPattern,
    /// Human-readable rows of the pattern's linear system.
    pub system: Vec<String>,
    pub certificate: FarkasCertificate<T>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PlayerRefutation<T> {
    pub player: usize,
    pub cases: Vec<RefutedPattern<T>>,
}

/// Proof that no multipliers exist: for at least one player, every pattern
/// consistent with the profile is infeasible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MembershipRefutation<T> {
    pub profile: StrategyProfile<T>,
    pub players: Vec<PlayerRefutation<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", rename_all = "snake_case")]
pub enum McpMembership<T> {
    Member(KktCertificate<T>),
    NonMember(MembershipRefutation<T>),
}

impl<T> McpMembership<T> {
    pub fn is_member(&self) -> bool {
        matches!(self, McpMembership::Member(_))
    }
}

fn branch_of_sign<T: Scalar>(v: &T, positive: Branch, zero: Branch) -> Branch {
    if v.is_positive() {
        positive
    } else {
        zero
    }
}

impl<T: Scalar> PlayerKkt<T> {
    pub fn n_lambda(&self) -> usize {
        self.ineq.len()
    }

    pub fn n_gamma(&self) -> usize {
        self.eq.len()
    }

    pub fn n_epigraph(&self) -> usize {
        self.epigraph.len()
    }

    /// Unknowns per fixed profile: `[lambda | gamma | t | mu+ | mu-]`.
    pub fn width(&self) -> usize {
        self.n_lambda() + self.n_gamma() + 3 * self.n_epigraph()
    }

    fn gamma_at(&self, k: usize) -> usize {
        self.n_lambda() + k
    }

    fn t_at(&self, e: usize) -> usize {
        self.n_lambda() + self.n_gamma() + e
    }

    fn mu_plus_at(&self, e: usize) -> usize {
        self.t_at(e) + self.n_epigraph()
    }

    fn mu_minus_at(&self, e: usize) -> usize {
        self.t_at(e) + 2 * self.n_epigraph()
    }

    pub fn unknown_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.width());
        names.extend((1..=self.n_lambda()).map(|j| format!("lambda{j}")));
        names.extend((1..=self.n_gamma()).map(|k| format!("gamma{k}")));
        for prefix in ["t", "mu+", "mu-"] {
            names.extend((1..=self.n_epigraph()).map(|e| format!("{prefix}{e}")));
        }
        names
    }

    pub fn pairs(&self) -> Vec<ComplementarityPair> {
        let mut out: Vec<ComplementarityPair> = (0..self.owned.len())
            .map(ComplementarityPair::Stationarity)
            .collect();
        out.extend((0..self.n_lambda()).map(ComplementarityPair::Constraint));
        for e in 0..self.n_epigraph() {
            out.push(ComplementarityPair::EpigraphUpper(e));
            out.push(ComplementarityPair::EpigraphLower(e));
        }
        out
    }

    /// Multiplier part of stationarity row `i` (linear in the unknowns).
    fn stationarity_coeffs(&self, i: usize) -> Vec<T> {
        let mut row = vec![T::zero(); self.width()];
        for (j, c) in self.ineq.iter().enumerate() {
            row[j] = c.coeffs[i].clone();
        }
        for (k, c) in self.eq.iter().enumerate() {
            row[self.gamma_at(k)] = c.coeffs[i].clone();
        }
        let var = self.owned.start + i;
        for (e, term) in self.epigraph.iter().enumerate() {
            let a = term.form.coeffs[var].clone();
            row[self.mu_plus_at(e)] = a.clone();
            row[self.mu_minus_at(e)] = -a;
        }
        row
    }

    fn unpack(&self, u: &[T]) -> Multipliers<T> {
        let nl = self.n_lambda();
        let ng = self.n_gamma();
        let ne = self.n_epigraph();
        Multipliers {
            lambda: u[..nl].to_vec(),
            gamma: u[nl..nl + ng].to_vec(),
            t: u[nl + ng..nl + ng + ne].to_vec(),
            mu_plus: u[nl + ng + ne..nl + ng + 2 * ne].to_vec(),
            mu_minus: u[nl + ng + 2 * ne..].to_vec(),
        }
    }

    fn pack(&self, m: &Multipliers<T>) -> Option<Vec<T>> {
        let ne = self.n_epigraph();
        if m.lambda.len() != self.n_lambda()
            || m.gamma.len() != self.n_gamma()
            || m.t.len() != ne
            || m.mu_plus.len() != ne
            || m.mu_minus.len() != ne
        {
            return None;
        }
        let mut u = Vec::with_capacity(self.width());
        for part in [&m.lambda, &m.gamma, &m.t, &m.mu_plus, &m.mu_minus] {
            u.extend(part.iter().cloned());
        }
        Some(u)
    }

    /// Determined branches plus the number of epigraph patterns.
    pub(crate) fn fixed_branches(&self, x: &[T]) -> Result<(Vec<Branch>, Vec<Branch>), Error> {
        let own = &x[self.owned.clone()];
        let stationarity = own
            .iter()
            .map(|v| branch_of_sign(v, Branch::PrimalPositive, Branch::PrimalZero))
            .collect();
        let mut constraints = Vec::with_capacity(self.ineq.len());
        for (j, c) in self.ineq.iter().enumerate() {
            let slack = c.slack(own);
            if slack.is_negative() {
                return Err(Error::InfeasibleProfile {
                    player: self.player,
                    reason: format!("inequality {j} is violated"),
                });
            }
            constraints.push(branch_of_sign(&slack, Branch::Inactive, Branch::Active));
        }
        Ok((stationarity, constraints))
    }

    pub fn pattern_count(&self) -> u128 {
        1u128
            .checked_shl(2 * self.n_epigraph() as u32)
            .unwrap_or(u128::MAX)
    }

    /// Every pattern consistent with `x`, in a fixed order.
    pub fn patterns(&self, x: &[T], budget: u64) -> Result<Vec<ComplementarityPattern>, Error> {
        let count = self.pattern_count();
        if count > u128::from(budget) {
            return Err(Error::PatternBudgetExceeded {
                player: self.player,
                patterns: count,
                budget,
            });
        }
        let (stationarity, constraints) = self.fixed_branches(x)?;
        let ne = self.n_epigraph();
        let pick = |bit: bool| {
            if bit {
                Branch::Inactive
            } else {
                Branch::Active
            }
        };
        Ok((0..count as u64)
            .map(|mask| ComplementarityPattern {
                stationarity: stationarity.clone(),
                constraints: constraints.clone(),
                epigraph_upper: (0..ne).map(|e| pick(mask >> (2 * e) & 1 == 1)).collect(),
                epigraph_lower: (0..ne)
                    .map(|e| pick(mask >> (2 * e + 1) & 1 == 1))
                    .collect(),
            })
            .collect())
    }

    /// Linear system over `[lambda | gamma | t | mu+ | mu-]` for one pattern.
    pub fn pattern_system(&self, x: &[T], pattern: &ComplementarityPattern) -> LinearSystem<T> {
        let w = self.width();
        let nl = self.n_lambda();
        let ng = self.n_gamma();
        let mut sys = LinearSystem::new(w);
        for (i, flag) in sys.nonneg.iter_mut().enumerate() {
            *flag = i < nl || i >= nl + ng + self.n_epigraph();
        }
        let unit = |i: usize, v: T| {
            let mut row = vec![T::zero(); w];
            row[i] = v;
            row
        };

        for (i, branch) in pattern.stationarity.iter().enumerate() {
            let g = self.gradient[i].eval(x);
            let coeffs = self.stationarity_coeffs(i);
            match branch {
                Branch::PrimalPositive => sys.push_eq(coeffs, -g),
                _ => sys.push_le(coeffs.into_iter().map(|c| -c).collect(), g),
            }
        }
        for (j, branch) in pattern.constraints.iter().enumerate() {
            if *branch == Branch::Inactive {
                sys.push_eq(unit(j, T::one()), T::zero());
            }
        }
        for (e, term) in self.epigraph.iter().enumerate() {
            let v = term.form.eval(x);
            let mut tstat = vec![T::zero(); w];
            tstat[self.mu_plus_at(e)] = T::one();
            tstat[self.mu_minus_at(e)] = T::one();
            sys.push_eq(tstat, term.weight.clone());

            match pattern.epigraph_upper[e] {
                Branch::Inactive => {
                    sys.push_eq(unit(self.mu_plus_at(e), T::one()), T::zero());
                    sys.push_le(unit(self.t_at(e), -T::one()), -v.clone());
                }
                _ => sys.push_eq(unit(self.t_at(e), T::one()), v.clone()),
            }
            match pattern.epigraph_lower[e] {
                Branch::Inactive => {
                    sys.push_eq(unit(self.mu_minus_at(e), T::one()), T::zero());
                    sys.push_le(unit(self.t_at(e), -T::one()), v);
                }
                _ => sys.push_eq(unit(self.t_at(e), T::one()), -v),
            }
        }
        sys
    }

    /// Violated conditions after substituting `x` and `m` directly.
    pub fn check_multipliers(&self, x: &[T], m: &Multipliers<T>) -> Vec<String> {
        let mut bad = Vec::new();
        let Some(u) = self.pack(m) else {
            bad.push(format!(
                "player {}: multiplier dimensions do not match",
                self.player
            ));
            return bad;
        };
        let own = &x[self.owned.clone()];
        let id = self.player;
        for (j, l) in m.lambda.iter().enumerate() {
            if l.is_negative() {
                bad.push(format!("player {id}: lambda{} = {l} < 0", j + 1));
            }
        }
        for (e, (mp, mm)) in m.mu_plus.iter().zip(&m.mu_minus).enumerate() {
            if mp.is_negative() || mm.is_negative() {
                bad.push(format!(
                    "player {id}: epigraph multipliers of term {} are negative",
                    e + 1
                ));
            }
        }
        for (i, xi) in own.iter().enumerate() {
            if xi.is_negative() {
                bad.push(format!("player {id}: own variable {} is negative", i + 1));
            }
            let s = self.gradient[i].eval(x) + dot(&self.stationarity_coeffs(i), &u);
            if s.is_negative() {
                bad.push(format!("player {id}: stationarity row {} = {s} < 0", i + 1));
            } else if !(s.clone() * xi.clone()).is_zero() {
                bad.push(format!(
                    "player {id}: stationarity row {} = {s} not orthogonal to x = {xi}",
                    i + 1
                ));
            }
        }
        for (j, (c, l)) in self.ineq.iter().zip(&m.lambda).enumerate() {
            let slack = c.slack(own);
            if slack.is_negative() {
                bad.push(format!("player {id}: inequality {} violated", j + 1));
            } else if !(slack.clone() * l.clone()).is_zero() {
                bad.push(format!(
                    "player {id}: complementarity {}·({slack}) = {} != 0 for lambda{}",
                    l,
                    l.clone() * slack.clone(),
                    j + 1
                ));
            }
        }
        for (k, c) in self.eq.iter().enumerate() {
            if !c.slack(own).is_zero() {
                bad.push(format!("player {id}: equality {} violated", k + 1));
            }
        }
        for (e, term) in self.epigraph.iter().enumerate() {
            let v = term.form.eval(x);
            let t = &m.t[e];
            if term.weight.clone() - m.mu_plus[e].clone() - m.mu_minus[e].clone() != T::zero() {
                bad.push(format!("player {id}: t{} stationarity fails", e + 1));
            }
            let upper = t.clone() - v.clone();
            let lower = t.clone() + v;
            if upper.is_negative() || lower.is_negative() {
                bad.push(format!("player {id}: t{} below the epigraph", e + 1));
            }
            if !(upper * m.mu_plus[e].clone()).is_zero()
                || !(lower * m.mu_minus[e].clone()).is_zero()
            {
                bad.push(format!(
                    "player {id}: epigraph complementarity of term {} fails",
                    e + 1
                ));
            }
        }
        bad
    }

    /// Smallest `t` satisfying both epigraph rows of term `e` at `x`.
    pub fn epigraph_min_t(&self, e: usize, x: &[T]) -> T {
        let v = self.epigraph[e].form.eval(x);
        let neg = -v.clone();
        v.max(neg)
    }

    /// Decides this player's part of the system at `x`.
    pub fn decide(
        &self,
        x: &[T],
        budget: u64,
    ) -> Result<Result<PlayerCertificate<T>, PlayerRefutation<T>>, Error> {
        let names = self.unknown_names();
        let mut cases = Vec::new();
        for pattern in self.patterns(x, budget)? {
            let sys = self.pattern_system(x, &pattern);
            match solve_feasibility(&sys)? {
                FeasibilityOutcome::Feasible(u) => {
                    return Ok(Ok(PlayerCertificate {
                        player: self.player,
                        multipliers: self.unpack(&u),
                        pattern,
                    }));
                }
                FeasibilityOutcome::Infeasible(certificate) => cases.push(RefutedPattern {
                    system: render_system(&sys, &names),
                    pattern,
                    certificate,
                }),
            }
        }
        Ok(Err(PlayerRefutation {
            player: self.player,
            cases,
        }))
    }
}

fn render_linear<T: Scalar>(coeffs: &[T], names: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in coeffs.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let term = if mag == T::one() {
            name.clone()
        } else {
            format!("{mag}*{name}")
        };
        if out.is_empty() {
            out = if c.is_negative() {
                format!("-{term}")
            } else {
                term
            };
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
            out.push_str(&term);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn render_system<T: Scalar>(sys: &LinearSystem<T>, names: &[String]) -> Vec<String> {
    let mut rows: Vec<String> = sys
        .eq_rows
        .iter()
        .map(|r| format!("{} = {}", render_linear(&r.coeffs, names), r.rhs))
        .collect();
    rows.extend(
        sys.ineq_rows
            .iter()
            .map(|r| format!("{} <= {}", render_linear(&r.coeffs, names), r.rhs)),
    );
    let signs: Vec<&str> = names
        .iter()
        .zip(&sys.nonneg)
        .filter(|(_, &nn)| nn)
        .map(|(n, _)| n.as_str())
        .collect();
    if !signs.is_empty() {
        rows.push(format!("{} >= 0", signs.join(", ")));
    }
    rows
}

impl<T: Scalar> RelaxedKktSystem<T> {
    pub fn player(&self, p: usize) -> Result<&PlayerKkt<T>, Error> {
        self.players.get(p).ok_or(Error::UnknownPlayer(p))
    }

    /// Stationarity conditions as text, e.g. `0 <= 8*x1 - 12*x2 + lambda1  ⊥  x1 >= 0`.
    pub fn describe(&self) -> Vec<String> {
        let xnames: Vec<String> = (1..=self.n).map(|i| format!("x{i}")).collect();
        let mut out = Vec::new();
        for pk in &self.players {
            let names = pk.unknown_names();
            out.push(format!("player {}:", pk.player));
            for (i, g) in pk.gradient.iter().enumerate() {
                let mut expr = render_linear(&g.coeffs, &xnames);
                let mult = render_linear(&pk.stationarity_coeffs(i), &names);
                let mut parts = Vec::new();
                if expr != "0" {
                    parts.push(expr.clone());
                }
                if !g.constant.is_zero() || parts.is_empty() {
                    parts.push(g.constant.to_string());
                }
                if mult != "0" {
                    parts.push(mult);
                }
                expr = parts.join(" + ").replace("+ -", "- ");
                out.push(format!(
                    "  0 <= {expr}  ⊥  x{} >= 0",
                    pk.owned.start + i + 1
                ));
            }
            let own_names = &xnames[pk.owned.clone()];
            for (j, c) in pk.ineq.iter().enumerate() {
                let neg: Vec<T> = c.coeffs.iter().map(|v| -v.clone()).collect();
                let lhs = render_linear(&neg, own_names);
                out.push(
                    format!("  0 <= {} + {lhs}  ⊥  lambda{} >= 0", c.rhs, j + 1)
                        .replace("+ -", "- "),
                );
            }
            for (k, c) in pk.eq.iter().enumerate() {
                out.push(format!(
                    "  {} = {}  (gamma{} free)",
                    render_linear(&c.coeffs, own_names),
                    c.rhs,
                    k + 1
                ));
            }
            for (e, term) in pk.epigraph.iter().enumerate() {
                let form = render_linear(&term.form.coeffs, &xnames);
                out.push(format!(
                    "  t{0} >= |{form} + {1}|  (weight {2}; mu+{0} + mu-{0} = {2})",
                    e + 1,
                    term.form.constant,
                    term.weight
                ));
            }
        }
        out
    }

    pub fn membership(
        &self,
        game: &ValidGame<T>,
        x: &StrategyProfile<T>,
    ) -> Result<McpMembership<T>, Error> {
        game.check_profile(x)?;
        let budget = game.limits().pattern_budget;
        let mut certs = Vec::new();
        let mut refutations = Vec::new();
        for pk in &self.players {
            match pk.decide(&x.x, budget)? {
                Ok(c) => certs.push(c),
                Err(r) => refutations.push(r),
            }
        }
        Ok(if refutations.is_empty() {
            McpMembership::Member(KktCertificate {
                profile: x.clone(),
                players: certs,
            })
        } else {
            McpMembership::NonMember(MembershipRefutation {
                profile: x.clone(),
                players: refutations,
            })
        })
    }

    /// Direct substitution of a certificate into the KKT conditions.
    pub fn check_certificate(&self, cert: &KktCertificate<T>) -> Vec<String> {
        if cert.profile.x.len() != self.n || cert.players.len() != self.players.len() {
            return vec!["certificate does not match the game dimensions".into()];
        }
        let mut bad = Vec::new();
        for (pk, pc) in self.players.iter().zip(&cert.players) {
            if pc.player != pk.player {
                bad.push(format!(
                    "certificate lists player {} where {} was expected",
                    pc.player, pk.player
                ));
                continue;
            }
            bad.extend(pk.check_multipliers(&cert.profile.x, &pc.multipliers));
        }
        bad
    }

    pub fn verify_certificate(&self, cert: &KktCertificate<T>) -> bool {
        cert.profile.x.iter().all(Scalar::is_integral) && self.check_certificate(cert).is_empty()
    }

    /// Re-derives each refuted pattern's system and checks its Farkas
    /// certificate, and checks that the refuted patterns are exactly the
    /// patterns consistent with the profile.
    pub fn verify_refutation(&self, refutation: &MembershipRefutation<T>, budget: u64) -> bool {
        let x = &refutation.profile.x;
        if x.len() != self.n || refutation.players.is_empty() {
            return false;
        }
        refutation.players.iter().all(|pr| {
            let Some(pk) = self.players.iter().find(|pk| pk.player == pr.player) else {
                return false;
            };
            let Ok(expected) = pk.patterns(x, budget) else {
                return false;
            };
            let mut listed: Vec<&ComplementarityPattern> =
                pr.cases.iter().map(|c| &c.pattern).collect();
            let mut wanted: Vec<&ComplementarityPattern> = expected.iter().collect();
            listed.sort();
            wanted.sort();
            listed == wanted
                && pr.cases.iter().all(|case| {
                    let sys = pk.pattern_system(x, &case.pattern);
                    verify_outcome(
                        &sys,
                        &FeasibilityOutcome::Infeasible(case.certificate.clone()),
                    )
                })
        })
    }

    pub fn verify_membership(&self, m: &McpMembership<T>, budget: u64) -> bool {
        match m {
            McpMembership::Member(c) => self.verify_certificate(c),
            McpMembership::NonMember(r) => self.verify_refutation(r, budget),
        }
    }
}

/// Assembles every player's relaxed KKT data. Requires a convex game.
pub fn build_kkt_system<T: Scalar>(game: &ValidGame<T>) -> Result<RelaxedKktSystem<T>, Error> {
    game.require_convex()?;
    let n = game.n();
    let players = game
        .players()
        .iter()
        .map(|p| {
            let obj = &p.objective;
            let gradient = p
                .owned
                .clone()
                .map(|i| AffineForm {
                    coeffs: obj.quad[i]
                        .iter()
                        .map(|q| T::from_int(2) * q.clone())
                        .collect(),
                    constant: obj.lin[i].clone(),
                })
                .collect();
            PlayerKkt {
                player: p.id,
                owned: p.owned.clone(),
                gradient,
                ineq: p.inequalities(),
                eq: p.eq.clone(),
                epigraph: obj.abs_terms.clone(),
            }
        })
        .collect();
    Ok(RelaxedKktSystem { n, players })
}

/// `∇_{x_p}` of the quadratic part of `f_p` at `x`.
pub fn gradient<T: Scalar>(
    game: &ValidGame<T>,
    p: usize,
    x: &StrategyProfile<T>,
) -> Result<Vec<T>, Error> {
    game.check_dimension(x)?;
    let player = game.player(p)?;
    Ok(player
        .owned
        .clone()
        .map(|i| player.objective.quad_gradient_component(i, &x.x))
        .collect())
}

pub fn mcp_membership<T: Scalar>(
    game: &ValidGame<T>,
    x: &StrategyProfile<T>,
) -> Result<McpMembership<T>, Error> {
    build_kkt_system(game)?.membership(game, x)
}

pub type Classified<T> = (StrategyProfile<T>, McpMembership<T>);

/// Integral lattice profiles admitting KKT multipliers, with their evidence.
pub fn classify_lattice<T: Scalar>(game: &ValidGame<T>) -> Result<Vec<Classified<T>>, Error> {
    let system = build_kkt_system(game)?;
    let profiles = enumerate_joint_lattice(game)?;
    profiles
        .into_par_iter()
        .map(|x| system.membership(game, &x).map(|m| (x, m)))
        .collect()
}

pub fn solve_dc_mcp<T: Scalar>(game: &ValidGame<T>) -> Result<EquilibriumSet<T>, Error> {
    let profiles = classify_lattice(game)?
        .into_iter()
        .filter(|(_, m)| m.is_member())
        .map(|(x, _)| x)
        .collect();
    Ok(EquilibriumSet {
        profiles,
        exhaustive: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{builtin_example1, builtin_example2, Norm};
    use crate::model::validate_game;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn p(v: &[i64]) -> StrategyProfile<Rational> {
        StrategyProfile::from_ints(v)
    }

    fn ex1(num: i64, den: i64) -> ValidGame<Rational> {
        validate_game(builtin_example1(Rational::from_frac(num, den)).unwrap()).unwrap()
    }

    fn ex2(delta: i64, mode: Norm) -> ValidGame<Rational> {
        validate_game(builtin_example2(q(delta), mode)).unwrap()
    }

    #[test]
    fn example_one_system_shape() {
        let sys = build_kkt_system(&ex1(1, 2)).unwrap();
        let pk = &sys.players[0];
        // stationarity: -1 + lambda1, bound: 3/2 - x1
        assert_eq!(pk.gradient[0].coeffs, vec![q(0), q(0)]);
        assert_eq!(pk.gradient[0].constant, q(-1));
        assert_eq!(pk.stationarity_coeffs(0), vec![q(1)]);
        assert_eq!(
            pk.ineq,
            vec![Constraint::new(vec![q(1)], Rational::from_frac(3, 2))]
        );
        assert_eq!(
            pk.pairs(),
            vec![
                ComplementarityPair::Stationarity(0),
                ComplementarityPair::Constraint(0)
            ]
        );
        let text = sys.describe();
        assert!(
            text.contains(&"  0 <= -1 + lambda1  ⊥  x1 >= 0".to_string()),
            "{text:?}"
        );
        assert!(
            text.contains(&"  0 <= 3/2 - x1  ⊥  lambda1 >= 0".to_string()),
            "{text:?}"
        );
    }

    #[test]
    fn example_two_stationarity_row() {
        let sys = build_kkt_system(&ex2(0, Norm::L2)).unwrap();
        // 4(2x1 - 3x2) + lambda1
        assert_eq!(sys.players[0].gradient[0].coeffs, vec![q(8), q(-12)]);
        assert!(sys
            .describe()
            .contains(&"  0 <= 8*x1 - 12*x2 + lambda1  ⊥  x1 >= 0".to_string()));
    }

    #[test]
    fn l1_variant_unknowns() {
        let sys = build_kkt_system(&ex2(0, Norm::L1)).unwrap();
        let pk = &sys.players[0];
        assert_eq!(pk.unknown_names(), vec!["lambda1", "t1", "mu+1", "mu-1"]);
        let pattern = &pk.patterns(&[q(1), q(1)], 16).unwrap()[0];
        let lin = pk.pattern_system(&[q(1), q(1)], pattern);
        // t-stationarity mu+ + mu- = 1
        assert!(lin
            .eq_rows
            .iter()
            .any(|r| r.coeffs == vec![q(0), q(0), q(1), q(1)] && r.rhs == q(1)));
    }

    #[test]
    fn gradients() {
        let g = ex2(0, Norm::L2);
        assert_eq!(gradient(&g, 0, &p(&[1, 1])).unwrap(), vec![q(-4)]);
        assert_eq!(gradient(&ex1(1, 2), 1, &p(&[0, 1])).unwrap(), vec![q(-1)]);
    }

    #[test]
    fn example_one_refutation() {
        let g = ex1(1, 2);
        let sys = build_kkt_system(&g).unwrap();
        let McpMembership::NonMember(r) = sys.membership(&g, &p(&[1, 1])).unwrap() else {
            panic!("(1,1) must not be a member");
        };
        assert_eq!(r.players.len(), 2);
        let case = &r.players[0].cases[0];
        assert_eq!(
            case.system,
            vec!["lambda1 = 1", "lambda1 = 0", "lambda1 >= 0"]
        );
        assert!(sys.verify_refutation(&r, 16));
    }

    #[test]
    fn example_two_memberships() {
        for delta in [-2, 0, 3, 6, 9] {
            let g = ex2(delta, Norm::L2);
            let sys = build_kkt_system(&g).unwrap();
            let McpMembership::Member(c) = sys.membership(&g, &p(&[0, 0])).unwrap() else {
                panic!("(0,0) must be a member");
            };
            assert_eq!(c.players[0].multipliers.lambda, vec![q(0)]);
            assert_eq!(c.players[1].multipliers.lambda, vec![q(0)]);
            assert!(sys.verify_certificate(&c));
        }
        let g = ex2(6, Norm::L2);
        let McpMembership::Member(c) = mcp_membership(&g, &p(&[1, 1])).unwrap() else {
            panic!("(1,1) is a member at delta = 6");
        };
        assert_eq!(c.players[0].multipliers.lambda, vec![q(4)]);
        assert_eq!(c.players[1].multipliers.lambda, vec![q(0)]);

        let g = ex2(2, Norm::L2);
        let McpMembership::NonMember(r) = mcp_membership(&g, &p(&[1, 1])).unwrap() else {
            panic!("(1,1) is not a member at delta = 2");
        };
        assert_eq!(r.players.len(), 1);
        assert_eq!(r.players[0].player, 2);
        assert_eq!(r.players[0].cases[0].system[0], "lambda1 = -4");
    }

    #[test]
    fn solution_sets() {
        assert!(solve_dc_mcp(&ex1(1, 2)).unwrap().is_empty());
        assert_eq!(solve_dc_mcp(&ex1(1, 1)).unwrap().profiles, vec![p(&[2, 2])]);
        assert_eq!(
            solve_dc_mcp(&ex2(2, Norm::L2)).unwrap().profiles,
            vec![p(&[0, 0])]
        );
    }

    #[test]
    fn supplied_multipliers_are_checked() {
        let g = ex2(0, Norm::L2);
        let sys = build_kkt_system(&g).unwrap();
        let mk = |l1: i64, l2: i64| KktCertificate {
            profile: p(&[0, 0]),
            players: vec![
                PlayerCertificate {
                    player: 1,
                    multipliers: Multipliers {
                        lambda: vec![q(l1)],
                        gamma: vec![],
                        t: vec![],
                        mu_plus: vec![],
                        mu_minus: vec![],
                    },
                    pattern: ComplementarityPattern {
                        stationarity: vec![Branch::PrimalZero],
                        constraints: vec![Branch::Inactive],
                        epigraph_upper: vec![],
                        epigraph_lower: vec![],
                    },
                },
                PlayerCertificate {
                    player: 2,
                    multipliers: Multipliers {
                        lambda: vec![q(l2)],
                        gamma: vec![],
                        t: vec![],
                        mu_plus: vec![],
                        mu_minus: vec![],
                    },
                    pattern: ComplementarityPattern {
                        stationarity: vec![Branch::PrimalZero],
                        constraints: vec![Branch::Inactive],
                        epigraph_upper: vec![],
                        epigraph_lower: vec![],
                    },
                },
            ],
        };
        assert!(sys.verify_certificate(&mk(0, 0)));
        let bad = sys.check_certificate(&mk(1, 0));
        assert_eq!(bad.len(), 1, "{bad:?}");
        assert!(bad[0].contains("complementarity"));
    }

    #[test]
    fn nonconvex_games_are_refused() {
        let mut game = builtin_example1(Rational::from_frac(1, 2)).unwrap();
        game.players[0].objective.quad[0][0] = q(-1);
        let g = validate_game(game).unwrap();
        assert!(matches!(
            build_kkt_system(&g),
            Err(Error::NonConvexOwnBlock { player: 1 })
        ));
        assert!(matches!(
            solve_dc_mcp(&g),
            Err(Error::NonConvexOwnBlock { .. })
        ));
    }

    #[test]
    fn pattern_budget() {
        let g = ex2(0, Norm::L1);
        let sys = build_kkt_system(&g).unwrap();
        assert!(matches!(
            sys.players[0].patterns(&[q(0), q(0)], 3),
            Err(Error::PatternBudgetExceeded {
                player: 1,
                patterns: 4,
                budget: 3
            })
        ));
    }
}
