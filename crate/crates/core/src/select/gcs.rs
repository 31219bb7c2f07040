//! Greedy deletion in the Gram form.
//!
//! Tracks inverses on the candidate side instead of the receive side: with
//! D = I + gamma H_sel^H H_sel and E_n = I + gamma T R_n[sel, sel], the
//! diagonal entries delta_j = [D^-1]_jj and eps_nj = [E_n^-1]_jj are exactly
//! the multiplicative loss factors of removing candidate j, the same
//! quantities the eigenspace form reaches through its quadratic forms.
//! Removing a candidate deletes one row and column from each tracked
//! inverse, a cheap pivot update.

use super::{pick_removal, ChainProblem, RemovalStep, SelectionSet, DEFAULT_REFRESH_EVERY};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_pd_inverse, remove_rowcol_inverse, CMatrix};

struct GcsState {
    /// Zero-based surviving candidates, ascending; position p in the tracked
    /// inverses corresponds to candidate current[p].
    current: Vec<usize>,
    d_inv: CMatrix,
    e_inv: Vec<CMatrix>,
    since_refresh: usize,
}

impl GcsState {
    fn init(problem: &ChainProblem) -> Result<Self> {
        let mut state = GcsState {
            current: (0..problem.universe()).collect(),
            d_inv: CMatrix::zeros(0, 0),
            e_inv: Vec::new(),
            since_refresh: 0,
        };
        state.rebuild(problem)?;
        Ok(state)
    }

    fn rebuild(&mut self, problem: &ChainProblem) -> Result<()> {
        let gamma = problem.params.gamma;
        let gt = gamma * problem.params.slots_f();
        let h_sel = problem.channel.select_columns(&self.current);
        self.d_inv = hermitian_pd_inverse(&h_sel.gram_cols().identity_plus_scaled(gamma))?;
        self.e_inv = problem
            .sensing
            .iter()
            .map(|r| {
                let r_sel = r.select_rows(&self.current).select_columns(&self.current);
                hermitian_pd_inverse(&r_sel.identity_plus_scaled(gt))
            })
            .collect::<Result<_>>()?;
        self.since_refresh = 0;
        Ok(())
    }

    /// Log-domain removal scores from the tracked inverse diagonals, or None
    /// when one has drifted nonpositive and a rebuild is needed.
    fn scores(&self, problem: &ChainProblem) -> Option<Vec<(usize, f64)>> {
        let wc = problem.params.omega_c;
        let ws = problem.sensing_weight();
        let mut out = Vec::with_capacity(self.current.len());
        for (p, &j) in self.current.iter().enumerate() {
            let mut s = 0.0;
            if wc != 0.0 {
                let delta = self.d_inv[(p, p)].re;
                if delta <= 0.0 {
                    return None;
                }
                s += wc * delta.ln();
            }
            if ws != 0.0 {
                for e in &self.e_inv {
                    let eps = e[(p, p)].re;
                    if eps <= 0.0 {
                        return None;
                    }
                    s += ws * eps.ln();
                }
            }
            out.push((j + 1, s));
        }
        Some(out)
    }

    fn step(&mut self, problem: &ChainProblem, refresh_every: usize) -> Result<RemovalStep> {
        let scores = match self.scores(problem) {
            Some(s) => s,
            None => {
                self.rebuild(problem)?;
                self.scores(problem).ok_or_else(|| {
                    Error::numeric("gcs: nonpositive loss factor after a fresh rebuild")
                })?
            }
        };
        let removed = pick_removal(&scores);
        let pos = self
            .current
            .iter()
            .position(|&x| x == removed - 1)
            .expect("picked candidate is current");
        self.current.remove(pos);
        if self.since_refresh + 1 >= refresh_every {
            self.rebuild(problem)?;
        } else {
            match self.apply_removal(pos) {
                Ok(()) => self.since_refresh += 1,
                Err(Error::SingularPivot { .. }) => self.rebuild(problem)?,
                Err(e) => return Err(e),
            }
        }
        Ok(RemovalStep { removed, scores })
    }

    fn apply_removal(&mut self, pos: usize) -> Result<()> {
        let d = remove_rowcol_inverse(&self.d_inv, pos)?;
        let es = self
            .e_inv
            .iter()
            .map(|e| remove_rowcol_inverse(e, pos))
            .collect::<Result<Vec<_>>>()?;
        self.d_inv = d;
        self.e_inv = es;
        Ok(())
    }
}

/// Greedy Gram-form deletion down to `k` kept candidates.
pub fn gcs_select(problem: &ChainProblem, k: usize) -> Result<SelectionSet> {
    Ok(gcs_select_traced_with(problem, k, DEFAULT_REFRESH_EVERY)?.0)
}

/// Like [`gcs_select`], also returning each step's score vector.
pub fn gcs_select_traced(
    problem: &ChainProblem,
    k: usize,
) -> Result<(SelectionSet, Vec<RemovalStep>)> {
    gcs_select_traced_with(problem, k, DEFAULT_REFRESH_EVERY)
}

/// Greedy Gram-form deletion with an explicit refresh cadence; see the
/// eigenspace twin for the semantics of `refresh_every`.
pub fn gcs_select_traced_with(
    problem: &ChainProblem,
    k: usize,
    refresh_every: usize,
) -> Result<(SelectionSet, Vec<RemovalStep>)> {
    problem.check_k(k)?;
    if refresh_every == 0 {
        return Err(Error::model("gcs: refresh cadence must be at least 1"));
    }
    if k == problem.universe() {
        return Ok((SelectionSet::full(k), Vec::new()));
    }
    let mut state = GcsState::init(problem)?;
    let mut trace = Vec::with_capacity(problem.universe() - k);
    while state.current.len() > k {
        trace.push(state.step(problem, refresh_every)?);
    }
    Ok((SelectionSet::from_zero_based(state.current.clone(), problem.universe())?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{comm_mi, LinkParams};
    use crate::scene::{generate_scene, subselect_columns, GeometryConfig};
    use crate::select::ges_select_traced;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scene_problem(seed: u64) -> ChainProblem {
        let cfg = GeometryConfig::new(8, 4, 3, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scene = generate_scene(&cfg, &mut rng).unwrap();
        let p = LinkParams::new(16, 3.0, 0.5, 0.5).unwrap();
        ChainProblem::tx_from_scene(&scene, &p).unwrap()
    }

    #[test]
    fn diagonal_factors_match_direct_inverses() {
        let problem = scene_problem(5);
        let state = GcsState::init(&problem).unwrap();
        let gamma = problem.params.gamma;
        let d = problem.channel.gram_cols().identity_plus_scaled(gamma);
        let d_inv = hermitian_pd_inverse(&d).unwrap();
        for p in 0..problem.universe() {
            assert!((state.d_inv[(p, p)].re - d_inv[(p, p)].re).abs() < 1e-10);
        }
    }

    #[test]
    fn comm_loss_factor_decomposes_the_channel_mi() {
        // Dropping candidate j from the full set changes the communication MI
        // by exactly T log2 delta_j.
        let problem = scene_problem(9);
        let state = GcsState::init(&problem).unwrap();
        let p = &problem.params;
        let full_mi = comm_mi(&problem.channel, p).unwrap();
        for j in 0..problem.universe() {
            let mut kept: Vec<usize> = (0..problem.universe()).collect();
            kept.retain(|&x| x != j);
            let sel = SelectionSet::from_zero_based(kept, problem.universe()).unwrap();
            let sub_mi = comm_mi(&subselect_columns(&problem.channel, &sel).unwrap(), p).unwrap();
            let delta = state.d_inv[(j, j)].re;
            let predicted = full_mi + p.slots_f() * delta.log2();
            assert!(
                (sub_mi - predicted).abs() < 1e-8,
                "candidate {j}: {sub_mi} vs {predicted}"
            );
        }
    }

    #[test]
    fn first_step_scores_equal_objective_drops() {
        let problem = scene_problem(15);
        let (_, trace) = gcs_select_traced(&problem, problem.universe() - 1).unwrap();
        let full = SelectionSet::full(problem.universe());
        let base = problem.evaluate(&full).unwrap().objective;
        for &(cand, score) in &trace[0].scores {
            let mut kept: Vec<usize> = (0..problem.universe()).collect();
            kept.retain(|&x| x != cand - 1);
            let sel = SelectionSet::from_zero_based(kept, problem.universe()).unwrap();
            let drop = problem.evaluate(&sel).unwrap().objective - base;
            assert!(
                (score / std::f64::consts::LN_2 - drop).abs() < 1e-9,
                "candidate {cand}: score {score} vs objective drop {drop}"
            );
        }
    }

    #[test]
    fn agrees_with_eigenspace_form_step_by_step() {
        for seed in [21, 22, 23] {
            let problem = scene_problem(seed);
            let (sel_g, tr_g) = ges_select_traced(&problem, 3).unwrap();
            let (sel_c, tr_c) = gcs_select_traced(&problem, 3).unwrap();
            assert_eq!(sel_g.indices(), sel_c.indices());
            assert_eq!(tr_g.len(), tr_c.len());
            for (a, b) in tr_g.iter().zip(&tr_c) {
                assert_eq!(a.removed, b.removed);
                for (&(ja, sa), &(jb, sb)) in a.scores.iter().zip(&b.scores) {
                    assert_eq!(ja, jb);
                    let rel = (sa - sb).abs() / sb.abs().max(1e-30);
                    assert!(rel < 1e-8, "seed {seed}: score gap {rel} at candidate {ja}");
                }
            }
        }
    }

    #[test]
    fn pivot_updates_match_recomputation_along_full_chain() {
        let problem = scene_problem(27);
        let (sel_upd, tr_upd) = gcs_select_traced_with(&problem, 1, usize::MAX).unwrap();
        let (sel_ref, tr_ref) = gcs_select_traced_with(&problem, 1, 1).unwrap();
        assert_eq!(sel_upd.indices(), sel_ref.indices());
        for (a, b) in tr_upd.iter().zip(&tr_ref) {
            assert_eq!(a.removed, b.removed);
            for (&(ja, sa), &(jb, sb)) in a.scores.iter().zip(&b.scores) {
                assert_eq!(ja, jb);
                assert!((sa - sb).abs() / sb.abs().max(1e-30) < 1e-8);
            }
        }
    }

    #[test]
    fn tie_breaks_toward_smaller_index() {
        let col = [Complex64::new(0.4, 0.1), Complex64::new(-0.2, 0.5)];
        let strong = [Complex64::new(2.0, 0.0), Complex64::new(0.0, 2.0)];
        let channel = CMatrix::from_fn(2, 3, |r, c| match c {
            0 => strong[r],
            _ => col[r],
        });
        let p = LinkParams::new(8, 1.0, 1.0, 0.0).unwrap();
        let problem = ChainProblem::new(channel, Vec::new(), p, 0).unwrap();
        let (sel, trace) = gcs_select_traced(&problem, 2).unwrap();
        assert_eq!(trace[0].removed, 2);
        assert_eq!(sel.indices(), &[1, 3]);
    }
}
