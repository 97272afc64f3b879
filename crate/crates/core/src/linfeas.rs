//! Exact linear feasibility.
//!
//! [`solve_feasibility`] decides whether a system of equalities, inequalities
//! and sign restrictions has a solution. It runs a phase-1 simplex over exact
//! rationals with Bland's rule, and on failure reads a Farkas certificate off
//! the final basis.
//!
//! Certificate convention for a system `A y = b`, `B y <= d`, `y_i >= 0` for
//! `i` in the sign-restricted set: multipliers `u` (free) on the equality rows
//! and `v >= 0` on the inequality rows such that `g = uᵀA + vᵀB` has `g_i = 0`
//! on free unknowns and `g_i >= 0` on sign-restricted ones, while
//! `uᵀb + vᵀd < 0`. Any feasible `y` would give `0 <= gᵀy <= uᵀb + vᵀd < 0`.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::{serde_q, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Row<T> {
    #[serde(with = "serde_q::vec")]
    pub coeffs: Vec<T>,
    #[serde(with = "serde_q")]
    pub rhs: T,
}

impl<T: Scalar> Row<T> {
    pub fn new(coeffs: Vec<T>, rhs: T) -> Self {
        Row { coeffs, rhs }
    }

    pub fn lhs(&self, y: &[T]) -> T {
        dot(&self.coeffs, y)
    }
}

/// `eq_rows`: `a·y = b`; `ineq_rows`: `a·y <= b`; `nonneg[i]`: `y_i >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LinearSystem<T> {
    pub eq_rows: Vec<Row<T>>,
    pub ineq_rows: Vec<Row<T>>,
    pub nonneg: Vec<bool>,
}

impl<T: Scalar> LinearSystem<T> {
    pub fn new(width: usize) -> Self {
        LinearSystem {
            eq_rows: Vec::new(),
            ineq_rows: Vec::new(),
            nonneg: vec![false; width],
        }
    }

    pub fn width(&self) -> usize {
        self.nonneg.len()
    }

    pub fn push_eq(&mut self, coeffs: Vec<T>, rhs: T) {
        self.eq_rows.push(Row::new(coeffs, rhs));
    }

    pub fn push_le(&mut self, coeffs: Vec<T>, rhs: T) {
        self.ineq_rows.push(Row::new(coeffs, rhs));
    }

    pub fn check_shape(&self) -> Result<(), Error> {
        let m = self.width();
        for row in self.eq_rows.iter().chain(&self.ineq_rows) {
            if row.coeffs.len() != m {
                return Err(Error::MalformedSystem(format!(
                    "row of width {} in a system with {} unknowns",
                    row.coeffs.len(),
                    m
                )));
            }
        }
        Ok(())
    }

    /// True iff `y` satisfies every row and sign restriction exactly.
    pub fn is_satisfied_by(&self, y: &[T]) -> bool {
        if y.len() != self.width() {
            return false;
        }
        self.nonneg
            .iter()
            .zip(y)
            .all(|(&nn, v)| !nn || !v.is_negative())
            && self.eq_rows.iter().all(|r| r.lhs(y) == r.rhs)
            && self.ineq_rows.iter().all(|r| r.lhs(y) <= r.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FarkasCertificate<T> {
    #[serde(with = "serde_q::vec")]
    pub eq_multipliers: Vec<T>,
    #[serde(with = "serde_q::vec")]
    pub ineq_multipliers: Vec<T>,
}

impl<T: Scalar> FarkasCertificate<T> {
    /// Combined row `g` and right-hand side `c` of the certificate.
    pub fn combination(&self, sys: &LinearSystem<T>) -> (Vec<T>, T) {
        let mut g = vec![T::zero(); sys.width()];
        let mut c = T::zero();
        let rows = sys
            .eq_rows
            .iter()
            .zip(&self.eq_multipliers)
            .chain(sys.ineq_rows.iter().zip(&self.ineq_multipliers));
        for (row, mult) in rows {
            if mult.is_zero() {
                continue;
            }
            for (gi, a) in g.iter_mut().zip(&row.coeffs) {
                *gi = gi.clone() + mult.clone() * a.clone();
            }
            c = c + mult.clone() * row.rhs.clone();
        }
        (g, c)
    }

    pub fn verify(&self, sys: &LinearSystem<T>) -> bool {
        if sys.check_shape().is_err()
            || self.eq_multipliers.len() != sys.eq_rows.len()
            || self.ineq_multipliers.len() != sys.ineq_rows.len()
            || self.ineq_multipliers.iter().any(Signed::is_negative)
        {
            return false;
        }
        let (g, c) = self.combination(sys);
        let sign_ok =
            g.iter().zip(&sys.nonneg).all(
                |(gi, &nn)| {
                    if nn {
                        !gi.is_negative()
                    } else {
                        gi.is_zero()
                    }
                },
            );
        sign_ok && c.is_negative()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", rename_all = "snake_case")]
pub enum FeasibilityOutcome<T> {
    Feasible(#[serde(with = "serde_q::vec")] Vec<T>),
    Infeasible(FarkasCertificate<T>),
}

impl<T> FeasibilityOutcome<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityOutcome::Feasible(_))
    }
}

pub fn verify_outcome<T: Scalar>(sys: &LinearSystem<T>, outcome: &FeasibilityOutcome<T>) -> bool {
    match outcome {
        FeasibilityOutcome::Feasible(y) => sys.check_shape().is_ok() && sys.is_satisfied_by(y),
        FeasibilityOutcome::Infeasible(cert) => cert.verify(sys),
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Where an original unknown lives among the standard-form columns.
enum Split {
    Single(usize),
    Pair(usize, usize),
}

pub fn solve_feasibility<T: Scalar>(sys: &LinearSystem<T>) -> Result<FeasibilityOutcome<T>, Error> {
    sys.check_shape()?;
    let width = sys.width();

    // standard form: columns are split unknowns then one slack per inequality
    let mut splits = Vec::with_capacity(width);
    let mut ncols = 0;
    for &nn in &sys.nonneg {
        if nn {
            splits.push(Split::Single(ncols));
            ncols += 1;
        } else {
            splits.push(Split::Pair(ncols, ncols + 1));
            ncols += 2;
        }
    }
    let slack_base = ncols;
    ncols += sys.ineq_rows.len();

    let rows: Vec<&Row<T>> = sys.eq_rows.iter().chain(&sys.ineq_rows).collect();
    let m = rows.len();
    if m == 0 {
        return Ok(FeasibilityOutcome::Feasible(vec![T::zero(); width]));
    }

    let art_base = ncols;
    let total = ncols + m;
    let rhs_col = total;
    let mut sign = Vec::with_capacity(m);
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(m);
    for (r, row) in rows.iter().enumerate() {
        let s = if row.rhs.is_negative() {
            -T::one()
        } else {
            T::one()
        };
        let mut line = vec![T::zero(); total + 1];
        for (i, a) in row.coeffs.iter().enumerate() {
            match splits[i] {
                Split::Single(c) => line[c] = s.clone() * a.clone(),
                Split::Pair(p, q) => {
                    line[p] = s.clone() * a.clone();
                    line[q] = -(s.clone() * a.clone());
                }
            }
        }
        if r >= sys.eq_rows.len() {
            line[slack_base + (r - sys.eq_rows.len())] = s.clone();
        }
        line[art_base + r] = T::one();
        line[rhs_col] = s.clone() * row.rhs.clone();
        sign.push(s);
        tab.push(line);
    }
    let mut basis: Vec<usize> = (art_base..art_base + m).collect();

    // reduced costs of the phase-1 objective (sum of artificials)
    let mut cost = vec![T::zero(); total + 1];
    for line in &tab {
        for j in 0..ncols {
            cost[j] = cost[j].clone() - line[j].clone();
        }
        cost[rhs_col] = cost[rhs_col].clone() - line[rhs_col].clone();
    }

    // Bland: lowest-index improving column; artificials never re-enter
    while let Some(enter) = (0..ncols).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, T)> = None;
        for (r, line) in tab.iter().enumerate() {
            if !line[enter].is_positive() {
                continue;
            }
            let ratio = line[rhs_col].clone() / line[enter].clone();
            let better = match &leave {
                None => true,
                Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // phase 1 is bounded below by zero, so a pivot row always exists
        let (pr, _) = leave.expect("phase-1 objective is bounded");
        pivot(&mut tab, &mut cost, pr, enter);
        basis[pr] = enter;
    }

    let residual = -cost[rhs_col].clone();
    if residual.is_zero() {
        let mut z = vec![T::zero(); ncols];
        for (r, &b) in basis.iter().enumerate() {
            if b < ncols {
                z[b] = tab[r][rhs_col].clone();
            }
        }
        let y = splits
            .iter()
            .map(|s| match *s {
                Split::Single(c) => z[c].clone(),
                Split::Pair(p, q) => z[p].clone() - z[q].clone(),
            })
            .collect();
        let outcome = FeasibilityOutcome::Feasible(y);
        debug_assert!(verify_outcome(sys, &outcome));
        return Ok(outcome);
    }

    // duals pi = c_Bᵀ B⁻¹; B⁻¹ sits in the artificial block of the tableau
    let mut pi = vec![T::zero(); m];
    for (r, &b) in basis.iter().enumerate() {
        if b >= art_base {
            for (k, p) in pi.iter_mut().enumerate() {
                *p = p.clone() + tab[r][art_base + k].clone();
            }
        }
    }
    let neq = sys.eq_rows.len();
    let mut mults: Vec<T> = pi
        .into_iter()
        .zip(&sign)
        .map(|(p, s)| -(p * s.clone()))
        .collect();
    let ineq_multipliers = mults.split_off(neq);
    let outcome = FeasibilityOutcome::Infeasible(FarkasCertificate {
        eq_multipliers: mults,
        ineq_multipliers,
    });
    debug_assert!(verify_outcome(sys, &outcome));
    Ok(outcome)
}

fn pivot<T: Scalar>(tab: &mut [Vec<T>], cost: &mut [T], pr: usize, pc: usize) {
    let p = tab[pr][pc].clone();
    for v in tab[pr].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let prow = tab[pr].clone();
    for (r, line) in tab.iter_mut().enumerate() {
        if r == pr || line[pc].is_zero() {
            continue;
        }
        let f = line[pc].clone();
        for (v, pv) in line.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
    }
    let f = cost[pc].clone();
    if !f.is_zero() {
        for (v, pv) in cost.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn nonneg_lambda() -> LinearSystem<Rational> {
        let mut sys = LinearSystem::new(1);
        sys.nonneg[0] = true;
        sys
    }

    #[test]
    fn single_equality_is_feasible() {
        let mut sys = nonneg_lambda();
        sys.push_eq(vec![q(1)], q(1));
        let out = solve_feasibility(&sys).unwrap();
        assert_eq!(out, FeasibilityOutcome::Feasible(vec![q(1)]));
        assert!(verify_outcome(&sys, &out));
    }

    #[test]
    fn negative_multiplier_requirement_is_refuted() {
        // lambda = delta - 6 with delta = 2
        let mut sys = nonneg_lambda();
        sys.push_eq(vec![q(1)], q(2) - q(6));
        let out = solve_feasibility(&sys).unwrap();
        assert!(!out.is_feasible());
        assert!(verify_outcome(&sys, &out));
    }

    #[test]
    fn conflicting_equalities_give_zero_equals_one() {
        let mut sys = nonneg_lambda();
        sys.push_eq(vec![q(1)], q(0));
        sys.push_eq(vec![q(1)], q(1));
        let out = solve_feasibility(&sys).unwrap();
        let FeasibilityOutcome::Infeasible(cert) = &out else {
            panic!("expected infeasible");
        };
        let (g, c) = cert.combination(&sys);
        assert_eq!(g, vec![q(0)]);
        assert!(c.is_negative());
        assert!(verify_outcome(&sys, &out));
    }

    #[test]
    fn wrong_witness_is_rejected() {
        let mut sys = LinearSystem::new(1);
        sys.push_eq(vec![q(1)], q(1));
        assert!(!verify_outcome(
            &sys,
            &FeasibilityOutcome::Feasible(vec![q(0)])
        ));
        assert!(!verify_outcome(&sys, &FeasibilityOutcome::Feasible(vec![])));
        let bogus = FarkasCertificate {
            eq_multipliers: vec![q(1)],
            ineq_multipliers: vec![],
        };
        assert!(!verify_outcome(
            &sys,
            &FeasibilityOutcome::Infeasible(bogus)
        ));
    }

    #[test]
    fn free_unknowns_and_inequalities() {
        // y0 free, y1 >= 0: y0 + y1 = -3, y0 >= -5  ->  feasible
        let mut sys = LinearSystem::new(2);
        sys.nonneg[1] = true;
        sys.push_eq(vec![q(1), q(1)], q(-3));
        sys.push_le(vec![q(-1), q(0)], q(5));
        let out = solve_feasibility(&sys).unwrap();
        assert!(out.is_feasible());
        assert!(verify_outcome(&sys, &out));
        // add y0 >= 0: y0 + y1 = -3 impossible
        sys.push_le(vec![q(-1), q(0)], q(0));
        let out = solve_feasibility(&sys).unwrap();
        assert!(!out.is_feasible());
        assert!(verify_outcome(&sys, &out));
    }

    #[test]
    fn empty_and_zero_width_systems() {
        let sys: LinearSystem<Rational> = LinearSystem::new(3);
        assert_eq!(
            solve_feasibility(&sys).unwrap(),
            FeasibilityOutcome::Feasible(vec![q(0), q(0), q(0)])
        );
        let mut sys: LinearSystem<Rational> = LinearSystem::new(0);
        sys.push_le(vec![], q(-1));
        let out = solve_feasibility(&sys).unwrap();
        assert!(!out.is_feasible());
        assert!(verify_outcome(&sys, &out));
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let mut sys: LinearSystem<Rational> = LinearSystem::new(2);
        sys.push_eq(vec![q(1)], q(1));
        assert!(matches!(
            solve_feasibility(&sys),
            Err(Error::MalformedSystem(_))
        ));
    }

    #[test]
    fn degenerate_cycling_prone_system_terminates() {
        // Beale-style degenerate rows
        let mut sys = LinearSystem::new(4);
        sys.nonneg = vec![true; 4];
        sys.push_le(
            vec![
                Rational::from_frac(1, 4),
                q(-60),
                Rational::from_frac(-1, 25),
                q(9),
            ],
            q(0),
        );
        sys.push_le(
            vec![
                Rational::from_frac(1, 2),
                q(-90),
                Rational::from_frac(-1, 50),
                q(3),
            ],
            q(0),
        );
        sys.push_le(vec![q(0), q(0), q(1), q(0)], q(1));
        sys.push_le(vec![q(-1), q(-1), q(-1), q(-1)], q(-2));
        let out = solve_feasibility(&sys).unwrap();
        assert!(verify_outcome(&sys, &out));
    }
}
