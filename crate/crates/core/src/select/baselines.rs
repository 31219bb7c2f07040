//! Reference selection policies the greedy algorithms are measured against.

use super::{ChainProblem, SelectionSet};
use crate::error::{Error, Result};
use crate::metrics::MIReport;
use rand::Rng;

/// Largest subset count exhaustive search will enumerate.
pub const EXHAUSTIVE_CAP: u128 = 200_000;

/// Exact binomial coefficient; comfortably inside u128 for the array sizes
/// this crate deals with.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c * (n - k + i) as u128 / i as u128;
    }
    c
}

/// Brute-force optimum over all k-subsets. Ties resolve to the
/// lexicographically smallest subset because enumeration is lexicographic and
/// only a strictly better objective replaces the incumbent.
pub fn exhaustive_select(problem: &ChainProblem, k: usize) -> Result<(SelectionSet, MIReport)> {
    problem.check_k(k)?;
    let universe = problem.universe();
    let needed = binomial(universe, k);
    if needed > EXHAUSTIVE_CAP {
        return Err(Error::Capacity { needed, cap: EXHAUSTIVE_CAP });
    }
    let mut combo: Vec<usize> = (0..k).collect();
    let mut best: Option<(SelectionSet, MIReport)> = None;
    'outer: loop {
        let sel = SelectionSet::from_zero_based(combo.clone(), universe)?;
        let report = problem.evaluate(&sel)?;
        match &best {
            Some((_, incumbent)) if report.objective <= incumbent.objective => {}
            _ => best = Some((sel, report)),
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if combo[i] < universe - k + i {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                continue 'outer;
            }
        }
        break;
    }
    Ok(best.expect("at least one subset was enumerated"))
}

/// Uniformly random k-subset.
pub fn random_select<R: Rng + ?Sized>(
    universe: usize,
    k: usize,
    rng: &mut R,
) -> Result<SelectionSet> {
    if k < 1 || k > universe {
        return Err(Error::model(format!("selection size {k} outside [1, {universe}]")));
    }
    let picks = rand::seq::index::sample(rng, universe, k).into_vec();
    SelectionSet::from_zero_based(picks, universe)
}

/// Deterministic evenly spaced k-subset: index i sits at
/// round(1 + (i-1) * universe / k), with collisions resolved by advancing to
/// the next free slot.
pub fn fixed_select(universe: usize, k: usize) -> Result<SelectionSet> {
    if k < 1 || k > universe {
        return Err(Error::model(format!("selection size {k} outside [1, {universe}]")));
    }
    let mut picks = Vec::with_capacity(k);
    let mut prev = 0usize;
    for i in 1..=k {
        let raw = (1.0 + (i - 1) as f64 * universe as f64 / k as f64).round() as usize;
        let idx = raw.max(prev + 1);
        if idx > universe {
            return Err(Error::model(format!(
                "evenly spaced selection cannot place {k} distinct indices in [1, {universe}]"
            )));
        }
        picks.push(idx);
        prev = idx;
    }
    SelectionSet::new(picks, universe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::metrics::LinkParams;
    use crate::scene::{generate_scene, GeometryConfig};
    use crate::select::ges_select;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scene_problem(seed: u64) -> ChainProblem {
        let cfg = GeometryConfig::new(7, 3, 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scene = generate_scene(&cfg, &mut rng).unwrap();
        let p = LinkParams::new(16, 2.0, 0.5, 0.5).unwrap();
        ChainProblem::tx_from_scene(&scene, &p).unwrap()
    }

    #[test]
    fn binomial_table() {
        assert_eq!(binomial(8, 4), 70);
        assert_eq!(binomial(16, 8), 12870);
        assert_eq!(binomial(64, 32), 1832624140942590534);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn exhaustive_dominates_greedy() {
        for seed in [1, 2, 3, 4] {
            let problem = scene_problem(seed);
            let (best, report) = exhaustive_select(&problem, 4).unwrap();
            let greedy = ges_select(&problem, 4).unwrap();
            let greedy_obj = problem.evaluate(&greedy).unwrap().objective;
            assert!(report.objective >= greedy_obj - 1e-10);
            assert_eq!(best.len(), 4);
        }
    }

    #[test]
    fn exhaustive_enforces_its_cap() {
        let p = LinkParams::new(4, 1.0, 1.0, 0.0).unwrap();
        let channel = CMatrix::from_fn(2, 64, |r, c| {
            Complex64::new((r + c) as f64 / 64.0, (c % 5) as f64 / 7.0)
        });
        let problem = ChainProblem::new(channel, Vec::new(), p, 0).unwrap();
        match exhaustive_select(&problem, 32) {
            Err(Error::Capacity { needed, cap }) => {
                assert_eq!(needed, binomial(64, 32));
                assert_eq!(cap, EXHAUSTIVE_CAP);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn exhaustive_tie_prefers_lexicographically_smallest() {
        // Columns 1 and 2 are identical, so {1} and {2} tie for k = 1.
        let col = [Complex64::new(1.0, 0.5), Complex64::new(0.0, -0.3)];
        let weak = [Complex64::new(0.1, 0.0), Complex64::new(0.05, 0.0)];
        let channel = CMatrix::from_fn(2, 3, |r, c| if c < 2 { col[r] } else { weak[r] });
        let p = LinkParams::new(4, 1.0, 1.0, 0.0).unwrap();
        let problem = ChainProblem::new(channel, Vec::new(), p, 0).unwrap();
        let (best, _) = exhaustive_select(&problem, 1).unwrap();
        assert_eq!(best.indices(), &[1]);
    }

    #[test]
    fn random_subsets_are_valid_and_seed_deterministic() {
        let mut a = ChaCha8Rng::seed_from_u64(99);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        let sa = random_select(10, 4, &mut a).unwrap();
        let sb = random_select(10, 4, &mut b).unwrap();
        assert_eq!(sa.indices(), sb.indices());
        assert_eq!(sa.len(), 4);
        assert!(sa.indices().iter().all(|&i| (1..=10).contains(&i)));

        let mut seen = [false; 6];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            for &i in random_select(6, 2, &mut rng).unwrap().indices() {
                seen[i - 1] = true;
            }
        }
        assert!(seen.iter().all(|&s| s), "all indices should appear over 200 draws");
    }

    #[test]
    fn fixed_spacing_examples() {
        assert_eq!(fixed_select(8, 4).unwrap().indices(), &[1, 3, 5, 7]);
        assert_eq!(fixed_select(16, 8).unwrap().indices(), &[1, 3, 5, 7, 9, 11, 13, 15]);
        assert_eq!(fixed_select(4, 3).unwrap().indices(), &[1, 2, 4]);
        assert_eq!(fixed_select(3, 2).unwrap().indices(), &[1, 3]);
        assert_eq!(fixed_select(5, 5).unwrap().indices(), &[1, 2, 3, 4, 5]);
        assert_eq!(fixed_select(6, 1).unwrap().indices(), &[1]);
    }

    #[test]
    fn fixed_spacing_always_fits() {
        for universe in 1..=24 {
            for k in 1..=universe {
                let sel = fixed_select(universe, k).unwrap();
                assert_eq!(sel.len(), k, "universe {universe} k {k}");
            }
        }
    }

    #[test]
    fn size_bounds_are_validated() {
        let problem = scene_problem(6);
        assert!(exhaustive_select(&problem, 0).is_err());
        assert!(fixed_select(5, 6).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(random_select(5, 0, &mut rng).is_err());
    }
}
