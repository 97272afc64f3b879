//! Independent oracles shared by the integration tests. Nothing here calls
//! the solver code paths it is used to check.
#![allow(dead_code)]

use dcnc_core::linfeas::{LinearSystem, Row};
use dcnc_core::{Rational, Scalar};
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

pub fn qf(n: i64, d: i64) -> Rational {
    Rational::from_frac(n, d)
}

/// Gauss-Jordan on `rows` (each `coeffs = rhs`); free unknowns set to zero.
/// `None` when inconsistent.
pub fn solve_equalities(rows: &[(Vec<Rational>, Rational)], width: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|(c, b)| {
            let mut r = c.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pivot_row = m[r].clone();
                for (dst, src) in m[i].iter_mut().zip(&pivot_row) {
                    *dst -= f.clone() * src.clone();
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[width].is_zero()) {
        return None;
    }
    let mut x = vec![q(0); width];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = m[i][width].clone();
    }
    Some(x)
}

/// Feasibility by enumerating candidate minimal faces: every subset of at
/// most `width` inequality-type constraints (rows and sign bounds) is made
/// tight together with the equalities, and one point of the resulting
/// affine set is tested. A nonempty polyhedron contains an affine minimal
/// face cut out this way, so the search is complete.
pub fn brute_force_feasible(sys: &LinearSystem<Rational>) -> Option<Vec<Rational>> {
    let w = sys.width();
    let mut cands: Vec<(Vec<Rational>, Rational)> = sys
        .ineq_rows
        .iter()
        .map(|r| (r.coeffs.clone(), r.rhs.clone()))
        .collect();
    for (i, &nn) in sys.nonneg.iter().enumerate() {
        if nn {
            let mut c = vec![q(0); w];
            c[i] = q(-1);
            cands.push((c, q(0)));
        }
    }
    let eqs: Vec<(Vec<Rational>, Rational)> = sys
        .eq_rows
        .iter()
        .map(|r| (r.coeffs.clone(), r.rhs.clone()))
        .collect();
    for mask in 0u32..(1 << cands.len()) {
        if mask.count_ones() as usize > w {
            continue;
        }
        let mut rows = eqs.clone();
        rows.extend(
            (0..cands.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| cands[b].clone()),
        );
        if let Some(x) = solve_equalities(&rows, w) {
            if sys.is_satisfied_by(&x) {
                return Some(x);
            }
        }
    }
    None
}

fn small_row(rng: &mut ChaCha8Rng, w: usize) -> Vec<Rational> {
    (0..w).map(|_| q(rng.gen_range(-3..=3))).collect()
}

/// Random system with at most four unknowns and six rows.
pub fn random_system(rng: &mut ChaCha8Rng) -> LinearSystem<Rational> {
    let w = rng.gen_range(1..=4);
    let mut sys = LinearSystem::new(w);
    for i in 0..w {
        sys.nonneg[i] = rng.gen_bool(0.6);
    }
    for _ in 0..rng.gen_range(0..=2) {
        let c = small_row(rng, w);
        sys.eq_rows.push(Row::new(c, q(rng.gen_range(-4..=4))));
    }
    for _ in 0..rng.gen_range(0..=4) {
        let c = small_row(rng, w);
        sys.ineq_rows.push(Row::new(c, q(rng.gen_range(-4..=4))));
    }
    sys
}

/// Random system containing `a·y <= b` and `-a·y <= -b-1`.
pub fn contradictory_system(rng: &mut ChaCha8Rng) -> LinearSystem<Rational> {
    let mut sys = random_system(rng);
    let w = sys.width();
    let mut a = small_row(rng, w);
    if a.iter().all(Zero::is_zero) {
        a[0] = q(1);
    }
    let b = q(rng.gen_range(-4..=4));
    let neg: Vec<Rational> = a.iter().map(|v| -v.clone()).collect();
    sys.ineq_rows.push(Row::new(a, b.clone()));
    sys.ineq_rows.push(Row::new(neg, -b - q(1)));
    sys
}

/// Two single-variable players on `{0, 1}` with cost
/// `f_p = D(x) - [p = 2] δ x1 x2`, where `D = (2x1 - 3x2)^2` or `|2x1 - 3x2|`.
#[derive(Debug, Clone)]
pub struct Duopoly {
    pub l1: bool,
    pub delta: Rational,
}

impl Duopoly {
    fn d(x: [i64; 2]) -> Rational {
        q(2 * x[0] - 3 * x[1])
    }

    pub fn cost(&self, p: usize, x: [i64; 2]) -> Rational {
        let d = Self::d(x);
        let base = if self.l1 { d.abs() } else { d.clone() * d };
        if p == 1 {
            base - self.delta.clone() * q(x[0] * x[1])
        } else {
            base
        }
    }

    pub fn nash(&self, x: [i64; 2]) -> bool {
        (0..2).all(|p| {
            (0..=1).all(|dev| {
                let mut y = x;
                y[p] = dev;
                self.cost(p, y) >= self.cost(p, x)
            })
        })
    }

    /// Smooth partial derivative and the subgradient interval of the
    /// distance term in the player's own variable.
    fn derivative(&self, p: usize, x: [i64; 2]) -> (Rational, Rational, Rational) {
        let d = Self::d(x);
        let a = if p == 0 { q(2) } else { q(-3) };
        let cross = if p == 1 {
            -self.delta.clone() * q(x[0])
        } else {
            q(0)
        };
        if self.l1 {
            if d.is_zero() {
                (cross, -a.abs(), a.abs())
            } else {
                let s = a * d.signum();
                (cross, s.clone(), s)
            }
        } else {
            (q(2) * d * a + cross, q(0), q(0))
        }
    }

    pub fn kkt(&self, x: [i64; 2]) -> bool {
        (0..2).all(|p| {
            let (g, lo, hi) = self.derivative(p, x);
            kkt_scalar(&g, &lo, &hi, x[p], &q(1))
        })
    }

    pub fn nash_set(&self) -> Vec<[i64; 2]> {
        square().into_iter().filter(|&x| self.nash(x)).collect()
    }

    pub fn kkt_set(&self) -> Vec<[i64; 2]> {
        square().into_iter().filter(|&x| self.kkt(x)).collect()
    }
}

pub fn square() -> Vec<[i64; 2]> {
    vec![[0, 0], [0, 1], [1, 0], [1, 1]]
}

/// KKT for one scalar variable on `0 <= x <= bound` with smooth derivative
/// `g` and subgradient interval `[lo, hi]`: some `s` in the interval and
/// `λ >= 0` (zero unless `x = bound`) satisfy `g + s + λ = 0` when `x > 0`,
/// or `g + s + λ >= 0` when `x = 0`.
pub fn kkt_scalar(g: &Rational, lo: &Rational, hi: &Rational, x: i64, bound: &Rational) -> bool {
    let at_bound = q(x) == *bound;
    if x > 0 {
        if at_bound {
            g.clone() + lo.clone() <= q(0)
        } else {
            *lo <= -g.clone() && -g.clone() <= *hi
        }
    } else {
        at_bound || g.clone() + hi.clone() >= q(0)
    }
}

/// Both players minimise `-x1 - x2` over `x_p ∈ [0, 1+ε] ∩ Z`.
pub fn shared_cost_oracle(eps: &Rational) -> (Vec<[i64; 2]>, Vec<[i64; 2]>) {
    let bound = q(1) + eps.clone();
    let top = bound.floor().to_integer().try_into().unwrap_or(0i64);
    let points: Vec<[i64; 2]> = (0..=top)
        .flat_map(|a| (0..=top).map(move |b| [a, b]))
        .collect();
    let cost = |x: [i64; 2]| -q(x[0] + x[1]);
    let nash = points
        .iter()
        .copied()
        .filter(|&x| {
            (0..2).all(|p| {
                (0..=top).all(|dev| {
                    let mut y = x;
                    y[p] = dev;
                    cost(y) >= cost(x)
                })
            })
        })
        .collect();
    let kkt = points
        .iter()
        .copied()
        .filter(|&x| (0..2).all(|p| kkt_scalar(&q(-1), &q(0), &q(0), x[p], &bound)))
        .collect();
    (nash, kkt)
}

pub fn profile(x: [i64; 2]) -> dcnc_core::Profile {
    dcnc_core::Profile::from_ints(&x)
}
