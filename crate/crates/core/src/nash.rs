//! Pure-strategy equilibria by exhaustive best-response checks.
//!
//! A profile is an equilibrium when no player has a feasible unilateral
//! deviation that strictly lowers its cost. Ties never break an equilibrium.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{
    enumerate_feasible_lattice, enumerate_joint_lattice, StrategyProfile, ValidGame,
};
use crate::scalar::{serde_q, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DeviationWitness<T> {
    /// 1-based player id.
    pub player: usize,
    pub from: StrategyProfile<T>,
    #[serde(with = "serde_q::vec")]
    pub to: Vec<T>,
    #[serde(with = "serde_q")]
    pub improvement: T,
}

impl<T: Scalar> DeviationWitness<T> {
    /// Re-evaluates both costs and checks the claimed improvement.
    pub fn verify(&self, game: &ValidGame<T>) -> bool {
        let Some(p) = self.player.checked_sub(1) else {
            return false;
        };
        let Ok(player) = game.player(p) else {
            return false;
        };
        if game.check_profile(&self.from).is_err() || self.to.len() != player.n_own() {
            return false;
        }
        let moved = self.from.with_own(&player.owned, &self.to);
        if game.own_feasibility(p, &moved).is_err() {
            return false;
        }
        let before = player.objective.eval(&self.from.x);
        let after = player.objective.eval(&moved.x);
        self.improvement.is_positive() && before - after == self.improvement
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", rename_all = "snake_case")]
pub enum EquilibriumVerdict<T> {
    Equilibrium,
    Deviation(DeviationWitness<T>),
}

impl<T> EquilibriumVerdict<T> {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, EquilibriumVerdict::Equilibrium)
    }
}

/// Sorted, duplicate-free set of profiles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EquilibriumSet<T> {
    pub profiles: Vec<StrategyProfile<T>>,
    /// The whole joint lattice was scanned.
    pub exhaustive: bool,
}

impl<T: Scalar> EquilibriumSet<T> {
    pub fn contains(&self, x: &StrategyProfile<T>) -> bool {
        self.profiles.binary_search(x).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.profiles.iter().all(|x| other.contains(x))
    }

    /// `{(0,0),(1,1)}`
    pub fn render(&self) -> String {
        let parts: Vec<String> = self.profiles.iter().map(ToString::to_string).collect();
        format!("{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse<T> {
    /// Every minimiser over `X_p`, in lattice order.
    pub argmin: Vec<Vec<T>>,
    pub value: T,
}

/// Best responses of player `p` to the opponents' part of `x`; the player's
/// own coordinates in `x` are ignored.
pub fn best_response_set<T: Scalar>(
    game: &ValidGame<T>,
    p: usize,
    x: &StrategyProfile<T>,
) -> Result<BestResponse<T>, Error> {
    game.check_dimension(x)?;
    let player = game.player(p)?;
    for q in (0..game.players().len()).filter(|&q| q != p) {
        game.own_feasibility(q, x)?;
    }
    let lattice = enumerate_feasible_lattice(game, p)?;
    let mut best: Option<BestResponse<T>> = None;
    for own in lattice {
        let v = player.objective.eval(&x.with_own(&player.owned, &own).x);
        match &mut best {
            Some(b) if v > b.value => {}
            Some(b) if v == b.value => b.argmin.push(own),
            _ => {
                best = Some(BestResponse {
                    argmin: vec![own],
                    value: v,
                })
            }
        }
    }
    best.ok_or(Error::EmptyFeasibleSet { player: player.id })
}

/// First strictly improving deviation in scan order (players in order, then
/// lattice order), if any.
pub fn is_equilibrium<T: Scalar>(
    game: &ValidGame<T>,
    x: &StrategyProfile<T>,
) -> Result<EquilibriumVerdict<T>, Error> {
    game.check_profile(x)?;
    for (p, player) in game.players().iter().enumerate() {
        let current = player.objective.eval(&x.x);
        for own in enumerate_feasible_lattice(game, p)? {
            let v = player.objective.eval(&x.with_own(&player.owned, &own).x);
            if v < current {
                return Ok(EquilibriumVerdict::Deviation(DeviationWitness {
                    player: player.id,
                    from: x.clone(),
                    to: own,
                    improvement: current - v,
                }));
            }
        }
    }
    Ok(EquilibriumVerdict::Equilibrium)
}

/// All pure equilibria. Best-response values are tabulated once per
/// opponent configuration, so the cost is dominated by one objective
/// evaluation per (profile, player) pair.
pub fn enumerate_dc_nash<T: Scalar>(game: &ValidGame<T>) -> Result<EquilibriumSet<T>, Error> {
    let profiles = enumerate_joint_lattice(game)?;
    let players = game.players();
    if profiles.is_empty() {
        return Ok(EquilibriumSet {
            profiles,
            exhaustive: true,
        });
    }
    let lattices: Vec<Vec<Vec<T>>> = (0..players.len())
        .map(|p| enumerate_feasible_lattice(game, p))
        .collect::<Result<_, _>>()?;

    let tables: Vec<BTreeMap<StrategyProfile<T>, T>> = players
        .par_iter()
        .zip(&lattices)
        .map(|(player, lattice)| {
            let zero = vec![T::zero(); player.n_own()];
            let mut keys: Vec<StrategyProfile<T>> = profiles
                .iter()
                .map(|x| x.with_own(&player.owned, &zero))
                .collect();
            keys.sort();
            keys.dedup();
            keys.into_par_iter()
                .map(|key| {
                    let best = lattice
                        .iter()
                        .map(|own| player.objective.eval(&key.with_own(&player.owned, own).x))
                        .min()
                        .expect("non-empty lattice");
                    (key, best)
                })
                .collect::<Vec<_>>()
                .into_iter()
                .collect()
        })
        .collect();

    let equilibria: Vec<StrategyProfile<T>> = profiles
        .into_par_iter()
        .filter(|x| {
            players.iter().zip(&tables).all(|(player, table)| {
                let zero = vec![T::zero(); player.n_own()];
                let key = x.with_own(&player.owned, &zero);
                player.objective.eval(&x.x) == table[&key]
            })
        })
        .collect();
    Ok(EquilibriumSet {
        profiles: equilibria,
        exhaustive: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{builtin_example1, builtin_example2, Norm};
    use crate::model::{validate_game, Constraint, GameSpec, ObjectiveSpec, PlayerSpec};
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn p(v: &[i64]) -> StrategyProfile<Rational> {
        StrategyProfile::from_ints(v)
    }

    fn ex1() -> ValidGame<Rational> {
        validate_game(builtin_example1(Rational::from_frac(1, 2)).unwrap()).unwrap()
    }

    fn ex2(delta: i64) -> ValidGame<Rational> {
        validate_game(builtin_example2(q(delta), Norm::L2)).unwrap()
    }

    #[test]
    fn best_responses() {
        let br = best_response_set(&ex1(), 0, &p(&[0, 1])).unwrap();
        assert_eq!(br.argmin, vec![vec![q(1)]]);
        assert_eq!(br.value, q(-2));

        let br = best_response_set(&ex2(0), 1, &p(&[1, 0])).unwrap();
        assert_eq!(br.argmin, vec![vec![q(1)]]);
        assert_eq!(br.value, q(1));

        let zero = GameSpec {
            name: "zero".into(),
            n: 1,
            players: vec![PlayerSpec {
                id: 1,
                owned: 0..1,
                objective: ObjectiveSpec::zero(1),
                ineq: vec![Constraint::new(vec![q(1)], q(1))],
                eq: vec![],
                integral: vec![true],
                upper: vec![None],
            }],
        };
        let br = best_response_set(&validate_game(zero).unwrap(), 0, &p(&[0])).unwrap();
        assert_eq!(br.argmin, vec![vec![q(0)], vec![q(1)]]);
        assert_eq!(br.value, q(0));
    }

    #[test]
    fn equilibrium_checks() {
        assert!(is_equilibrium(&ex1(), &p(&[1, 1]))
            .unwrap()
            .is_equilibrium());

        let EquilibriumVerdict::Deviation(w) = is_equilibrium(&ex2(0), &p(&[1, 0])).unwrap() else {
            panic!("(1,0) is not an equilibrium");
        };
        assert_eq!(
            (w.player, w.to.clone(), w.improvement.clone()),
            (1, vec![q(0)], q(4))
        );
        assert!(w.verify(&ex2(0)));

        // tie at the boundary: f2(1,1) = 4 = f2(1,0)
        assert!(is_equilibrium(&ex2(-3), &p(&[1, 1]))
            .unwrap()
            .is_equilibrium());

        assert!(matches!(
            is_equilibrium(&ex1(), &p(&[2, 0])),
            Err(Error::InfeasibleProfile { player: 1, .. })
        ));
    }

    #[test]
    fn equilibrium_sets() {
        assert_eq!(
            enumerate_dc_nash(&ex1()).unwrap().profiles,
            vec![p(&[1, 1])]
        );
        assert_eq!(
            enumerate_dc_nash(&ex2(0)).unwrap().profiles,
            vec![p(&[0, 0]), p(&[1, 1])]
        );
        assert_eq!(
            enumerate_dc_nash(&ex2(-4)).unwrap().profiles,
            vec![p(&[0, 0])]
        );
    }

    #[test]
    fn tabulated_enumeration_matches_direct_checks() {
        for delta in -5..=8 {
            let g = ex2(delta);
            let set = enumerate_dc_nash(&g).unwrap();
            for x in enumerate_joint_lattice(&g).unwrap() {
                let verdict = is_equilibrium(&g, &x).unwrap();
                assert_eq!(
                    verdict.is_equilibrium(),
                    set.contains(&x),
                    "delta={delta} x={x}"
                );
                if let EquilibriumVerdict::Deviation(w) = verdict {
                    assert!(w.verify(&g));
                }
            }
        }
    }
}
