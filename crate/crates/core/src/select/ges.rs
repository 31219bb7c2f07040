//! Greedy deletion in the eigenspace form.
//!
//! Starting from the full candidate set, each step drops the element whose
//! removal keeps the objective highest. Removing candidate J multiplies the
//! communication determinant by 1 - gamma alpha_J, where
//! alpha_j = h_j^H A h_j with A = (I + gamma H H^H)^-1 over the surviving
//! columns, and multiplies sensing determinant n by 1 - gamma T beta_nj,
//! where beta is the analogous quadratic form in the factor space of that
//! covariance. Both inverses and both quadratic-form tables admit exact
//! rank-one updates after each removal, so a whole deletion chain costs one
//! matrix inversion plus cheap updates instead of a refactoring per step.

use super::{pick_removal, ChainProblem, RemovalStep, SelectionSet, DEFAULT_REFRESH_EVERY};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_evd, hermitian_pd_inverse, rank_one_inverse_update, vdot, CMatrix};
use num_complex::Complex64;

/// Relative eigenvalue cutoff when factoring sensing covariances.
const RANK_REL_TOL: f64 = 1e-10;
const UPDATE_SINGULAR_TOL: f64 = 1e-12;

struct SensingArm {
    /// universe x rank factor with R = G G^H; restricting candidates keeps
    /// rows of G, so the determinant can be tracked in rank-sized space.
    g: CMatrix,
    /// (I_rank + gamma T G_sel^H G_sel)^-1 for the surviving rows.
    b_inv: CMatrix,
    /// beta[j] = g_j^H B g_j; only surviving candidates are kept current.
    beta: Vec<f64>,
}

impl SensingArm {
    /// Candidate j's factor-space signature: conjugate of row j of G.
    fn signature(&self, j: usize) -> Vec<Complex64> {
        (0..self.g.cols()).map(|k| self.g[(j, k)].conj()).collect()
    }
}

struct GesState {
    /// Zero-based surviving candidates, ascending.
    remaining: Vec<usize>,
    /// (I + gamma H_sel H_sel^H)^-1.
    a_inv: CMatrix,
    /// alpha[j] = h_j^H A h_j; only surviving candidates are kept current.
    alpha: Vec<f64>,
    arms: Vec<SensingArm>,
    since_refresh: usize,
}

impl GesState {
    fn init(problem: &ChainProblem) -> Result<Self> {
        let universe = problem.universe();
        let mut arms = Vec::with_capacity(problem.sensing.len());
        for r in &problem.sensing {
            let evd = hermitian_evd(r)?;
            let rank = evd.psd_rank(RANK_REL_TOL);
            let g = CMatrix::from_fn(universe, rank, |i, k| {
                evd.vectors[(i, k)] * evd.values[k].sqrt()
            });
            arms.push(SensingArm { g, b_inv: CMatrix::zeros(0, 0), beta: vec![0.0; universe] });
        }
        let mut state = GesState {
            remaining: (0..universe).collect(),
            a_inv: CMatrix::zeros(0, 0),
            alpha: vec![0.0; universe],
            arms,
            since_refresh: 0,
        };
        state.rebuild(problem)?;
        Ok(state)
    }

    /// Recomputes every tracked inverse and quadratic form from scratch for
    /// the current survivor set.
    fn rebuild(&mut self, problem: &ChainProblem) -> Result<()> {
        let gamma = problem.params.gamma;
        let gt = gamma * problem.params.slots_f();
        let h_sel = problem.channel.select_columns(&self.remaining);
        self.a_inv = hermitian_pd_inverse(&h_sel.gram_rows().identity_plus_scaled(gamma))?;
        for &j in &self.remaining {
            let hj = problem.channel.col(j);
            self.alpha[j] = vdot(&hj, &self.a_inv.mul_vec(&hj)).re;
        }
        for arm in &mut self.arms {
            if arm.g.cols() == 0 {
                arm.b_inv = CMatrix::zeros(0, 0);
                continue;
            }
            let g_sel = arm.g.select_rows(&self.remaining);
            arm.b_inv = hermitian_pd_inverse(&g_sel.gram_cols().identity_plus_scaled(gt))?;
            for &j in &self.remaining {
                let gj = arm.signature(j);
                arm.beta[j] = vdot(&gj, &arm.b_inv.mul_vec(&gj)).re;
            }
        }
        self.since_refresh = 0;
        Ok(())
    }

    /// Log-domain removal scores for every survivor, or None when a tracked
    /// loss factor has drifted nonpositive and a rebuild is needed.
    fn scores(&self, problem: &ChainProblem) -> Option<Vec<(usize, f64)>> {
        let gamma = problem.params.gamma;
        let gt = gamma * problem.params.slots_f();
        let wc = problem.params.omega_c;
        let ws = problem.sensing_weight();
        let mut out = Vec::with_capacity(self.remaining.len());
        for &j in &self.remaining {
            let mut s = 0.0;
            if wc != 0.0 {
                let v = 1.0 - gamma * self.alpha[j];
                if v <= 0.0 {
                    return None;
                }
                s += wc * v.ln();
            }
            if ws != 0.0 {
                for arm in &self.arms {
                    let v = 1.0 - gt * arm.beta[j];
                    if v <= 0.0 {
                        return None;
                    }
                    s += ws * v.ln();
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
                    Error::numeric("ges: nonpositive loss factor after a fresh rebuild")
                })?
            }
        };
        let removed = pick_removal(&scores);
        let j = removed - 1;
        self.remaining.retain(|&r| r != j);
        if self.since_refresh + 1 >= refresh_every {
            self.rebuild(problem)?;
        } else {
            match self.apply_updates(problem, j) {
                Ok(()) => self.since_refresh += 1,
                Err(Error::SingularUpdate { .. }) => self.rebuild(problem)?,
                Err(e) => return Err(e),
            }
        }
        Ok(RemovalStep { removed, scores })
    }

    /// Rank-one updates of A, every B_n, and the alpha/beta tables after
    /// removing candidate j. On a singular denominator the state may be
    /// partially written; the caller falls back to `rebuild`, which resets
    /// everything.
    fn apply_updates(&mut self, problem: &ChainProblem, j: usize) -> Result<()> {
        let gamma = problem.params.gamma;
        let gt = gamma * problem.params.slots_f();

        let u = problem.channel.col(j);
        let denom = 1.0 - gamma * self.alpha[j];
        if denom <= UPDATE_SINGULAR_TOL {
            return Err(Error::SingularUpdate { denominator: denom.abs() });
        }
        let new_a = rank_one_inverse_update(&self.a_inv, &u, gamma)?;
        let w = self.a_inv.mul_vec(&u);
        let scale = (gamma / denom).sqrt();
        let dir: Vec<Complex64> = w.iter().map(|z| z * scale).collect();
        self.a_inv = new_a;
        for &r in &self.remaining {
            self.alpha[r] += vdot(&problem.channel.col(r), &dir).norm_sqr();
        }

        for arm in &mut self.arms {
            if arm.g.cols() == 0 {
                continue;
            }
            let gj = arm.signature(j);
            let denom_n = 1.0 - gt * arm.beta[j];
            if denom_n <= UPDATE_SINGULAR_TOL {
                return Err(Error::SingularUpdate { denominator: denom_n.abs() });
            }
            let new_b = rank_one_inverse_update(&arm.b_inv, &gj, gt)?;
            let w = arm.b_inv.mul_vec(&gj);
            let scale = (gt / denom_n).sqrt();
            let dir: Vec<Complex64> = w.iter().map(|z| z * scale).collect();
            arm.b_inv = new_b;
            for &r in &self.remaining {
                arm.beta[r] += vdot(&arm.signature(r), &dir).norm_sqr();
            }
        }
        Ok(())
    }
}

/// Greedy eigenspace deletion down to `k` kept candidates.
pub fn ges_select(problem: &ChainProblem, k: usize) -> Result<SelectionSet> {
    Ok(ges_select_traced_with(problem, k, DEFAULT_REFRESH_EVERY)?.0)
}

/// Like [`ges_select`], also returning each step's score vector.
pub fn ges_select_traced(
    problem: &ChainProblem,
    k: usize,
) -> Result<(SelectionSet, Vec<RemovalStep>)> {
    ges_select_traced_with(problem, k, DEFAULT_REFRESH_EVERY)
}

/// Greedy eigenspace deletion with an explicit refresh cadence:
/// `refresh_every` removals happen between from-scratch rebuilds (1 means
/// rebuild after every removal, `usize::MAX` means pure rank-one updates).
/// Exposed so the update arithmetic can be validated against recomputation.
pub fn ges_select_traced_with(
    problem: &ChainProblem,
    k: usize,
    refresh_every: usize,
) -> Result<(SelectionSet, Vec<RemovalStep>)> {
    problem.check_k(k)?;
    if refresh_every == 0 {
        return Err(Error::model("ges: refresh cadence must be at least 1"));
    }
    if k == problem.universe() {
        return Ok((SelectionSet::full(k), Vec::new()));
    }
    let mut state = GesState::init(problem)?;
    let mut trace = Vec::with_capacity(problem.universe() - k);
    while state.remaining.len() > k {
        trace.push(state.step(problem, refresh_every)?);
    }
    Ok((SelectionSet::from_zero_based(state.remaining.clone(), problem.universe())?, trace))
}
