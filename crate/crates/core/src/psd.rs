//! Exact positive-semidefiniteness tests.

use crate::scalar::Scalar;

/// Symmetric pivoted LDLᵀ: eliminate on any positive diagonal entry; a
/// negative diagonal, or a zero diagonal with a nonzero off-diagonal in the
/// remaining Schur complement, means the matrix is not PSD.
pub fn is_positive_semidefinite<T: Scalar>(m: &[Vec<T>]) -> bool {
    let mut a: Vec<Vec<T>> = m.to_vec();
    let mut active: Vec<usize> = (0..a.len()).collect();
    while !active.is_empty() {
        if active.iter().any(|&i| a[i][i].is_negative()) {
            return false;
        }
        let Some(pos) = active.iter().position(|&i| a[i][i].is_positive()) else {
            return active
                .iter()
                .all(|&i| active.iter().all(|&j| a[i][j].is_zero()));
        };
        let piv = active.remove(pos);
        let d = a[piv][piv].clone();
        for &i in &active {
            if a[i][piv].is_zero() {
                continue;
            }
            let l = a[i][piv].clone() / d.clone();
            for &j in &active {
                let v = a[i][j].clone() - l.clone() * a[piv][j].clone();
                a[i][j] = v;
            }
        }
    }
    true
}

pub fn determinant<T: Scalar>(m: &[Vec<T>]) -> T {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m.to_vec();
    let mut det = T::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return T::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let pivot = a[c][c].clone();
        det = det * pivot.clone();
        for r in (c + 1)..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone() / pivot.clone();
            let (top, bottom) = a.split_at_mut(r);
            for (dst, src) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                *dst = dst.clone() - f.clone() * src.clone();
            }
        }
    }
    det
}

/// Every principal minor is nonnegative. Exponential; meant for small blocks.
pub fn principal_minors_nonnegative<T: Scalar>(m: &[Vec<T>]) -> bool {
    let n = m.len();
    (1u32..(1u32 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<T>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| m[i][j].clone()).collect())
            .collect();
        !determinant(&sub).is_negative()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| Rational::from_int(v)).collect())
            .collect()
    }

    #[test]
    fn known_matrices() {
        assert!(is_positive_semidefinite(&mat(&[&[4]])));
        assert!(!is_positive_semidefinite(&mat(&[&[-1]])));
        assert!(is_positive_semidefinite(&mat(&[&[4, -6], &[-6, 9]])));
        assert!(!is_positive_semidefinite(&mat(&[&[0, 1], &[1, 0]])));
        assert!(is_positive_semidefinite(&mat(&[&[0, 0], &[0, 3]])));
        assert!(!is_positive_semidefinite(&mat(&[&[1, 2], &[2, 1]])));
        assert!(is_positive_semidefinite::<Rational>(&[]));
        assert_eq!(
            determinant(&mat(&[&[0, 1], &[1, 0]])),
            Rational::from_int(-1)
        );
    }

    proptest! {
        #[test]
        fn ldl_agrees_with_principal_minors(
            n in 1usize..=4,
            entries in proptest::collection::vec(-3i64..=3, 16),
            gram in any::<bool>(),
        ) {
            let raw: Vec<Vec<Rational>> = (0..n)
                .map(|i| (0..n).map(|j| Rational::from_int(entries[i * 4 + j])).collect())
                .collect();
            // either MᵀM (always PSD) or a plain symmetrisation
            let m: Vec<Vec<Rational>> = (0..n)
                .map(|i| (0..n).map(|j| {
                    if gram {
                        (0..n).fold(Rational::from_int(0), |acc, k| acc + raw[k][i].clone() * raw[k][j].clone())
                    } else {
                        raw[i][j].clone() + raw[j][i].clone()
                    }
                }).collect())
                .collect();
            prop_assert_eq!(is_positive_semidefinite(&m), principal_minors_nonnegative(&m));
            if gram {
                prop_assert!(is_positive_semidefinite(&m));
            }
        }
    }
}
