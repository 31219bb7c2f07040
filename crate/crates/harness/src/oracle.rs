//! Oracle mode: rebuilds every greedy quantity from first principles on
//! small scenes and reports worst-case deviations. Any breach names the
//! offending seed so the failing trial can be replayed in isolation.

use crate::config::{Architecture, ExperimentConfig};
use crate::seed::{derive_seed, SCENE_STREAM};
use crate::{HarnessError, Result};
use isac_select::beamspace::{build_codebook, to_beamspace};
use isac_select::scene::generate_scene;
use isac_select::select::{
    binomial, exhaustive_select, gcs_select_traced_with, ges_select_traced_with, ChainProblem,
    RemovalStep, SelectionSet, EXHAUSTIVE_CAP,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::LN_2;
use std::fmt;

/// Absolute tolerance on the per-step removal identity (bits).
pub const IDENTITY_TOL: f64 = 1e-8;
/// Relative tolerance between updated and recomputed removal scores.
pub const UPDATE_TOL: f64 = 1e-8;
/// Smallest acceptable greedy-to-exhaustive objective ratio per trial.
pub const RATIO_FLOOR: f64 = 0.9;

#[derive(Clone, Debug)]
pub struct OracleFailure {
    pub trial: usize,
    pub seed: u64,
    pub what: String,
}

#[derive(Clone, Debug, Default)]
pub struct OracleReport {
    pub trials: usize,
    pub worst_identity: f64,
    pub worst_update: f64,
    pub mean_exhaustive_ratio: Option<f64>,
    pub min_exhaustive_ratio: Option<f64>,
    pub failures: Vec<OracleFailure>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "oracle: {} trials", self.trials)?;
        writeln!(
            f,
            "  removal identity   worst |dev| = {:.3e}  (tol {:.0e})",
            self.worst_identity, IDENTITY_TOL
        )?;
        writeln!(
            f,
            "  update consistency worst rel dev = {:.3e}  (tol {:.0e})",
            self.worst_update, UPDATE_TOL
        )?;
        match (self.mean_exhaustive_ratio, self.min_exhaustive_ratio) {
            (Some(mean), Some(min)) => writeln!(
                f,
                "  greedy/exhaustive  mean ratio = {mean:.6}, min ratio = {min:.6}"
            )?,
            _ => writeln!(f, "  greedy/exhaustive  skipped (k covers the universe)")?,
        }
        for fail in &self.failures {
            writeln!(f, "  FAIL trial {} seed {}: {}", fail.trial, fail.seed, fail.what)?;
        }
        write!(f, "oracle {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Walks a removal trace, re-measuring the objective after every removal and
/// comparing the drop against the chosen candidate's score. `offset` lets
/// tests inject a fault into the first compared score.
fn identity_deviation(
    problem: &ChainProblem,
    trace: &[RemovalStep],
    offset: f64,
) -> Result<f64> {
    let universe = problem.universe();
    let mut remaining: Vec<usize> = (1..=universe).collect();
    let mut objective =
        problem.evaluate(&SelectionSet::full(universe)).map_err(HarnessError::from)?.objective;
    let mut worst = 0.0f64;
    for (i, step) in trace.iter().enumerate() {
        let mut score = step
            .scores
            .iter()
            .find(|&&(cand, _)| cand == step.removed)
            .map(|&(_, s)| s)
            .ok_or_else(|| HarnessError::Oracle("trace lacks the removed candidate".into()))?;
        if i == 0 {
            score += offset;
        }
        remaining.retain(|&x| x != step.removed);
        let sel = SelectionSet::new(remaining.clone(), universe)?;
        let next = problem.evaluate(&sel)?.objective;
        worst = worst.max(((next - objective) - score / LN_2).abs());
        objective = next;
    }
    Ok(worst)
}

/// Largest relative score difference between two traces of the same chain.
/// Divergent removal sequences are reported as an error.
fn update_deviation(updated: &[RemovalStep], recomputed: &[RemovalStep]) -> Result<f64> {
    if updated.len() != recomputed.len() {
        return Err(HarnessError::Oracle("trace lengths differ".into()));
    }
    let mut worst = 0.0f64;
    for (a, b) in updated.iter().zip(recomputed) {
        if a.removed != b.removed {
            return Err(HarnessError::Oracle(format!(
                "removal sequence diverged: {} vs {}",
                a.removed, b.removed
            )));
        }
        if a.scores.len() != b.scores.len() {
            return Err(HarnessError::Oracle("candidate sets diverged".into()));
        }
        for (&(ca, sa), &(cb, sb)) in a.scores.iter().zip(&b.scores) {
            if ca != cb {
                return Err(HarnessError::Oracle("candidate order diverged".into()));
            }
            worst = worst.max((sa - sb).abs() / sa.abs().max(sb.abs()).max(1e-12));
        }
    }
    Ok(worst)
}

/// Runs the full cross-check: per trial, both greedy forms are traced down
/// to one chain with pure updates and with per-step recomputation; the
/// removal identity and the update agreement are verified, and the greedy
/// objective is compared with exhaustive search when the subset count is
/// tractable. `perturb` injects a fault into trial 0 (negative testing).
pub fn oracle_check(cfg: &ExperimentConfig, perturb: Option<f64>) -> Result<OracleReport> {
    cfg.validate()?;
    if cfg.geometry.n_tx > 10 {
        return Err(HarnessError::config(format!(
            "oracle mode re-evaluates whole removal chains; n_tx {} exceeds 10",
            cfg.geometry.n_tx
        )));
    }
    let params = cfg.link.params()?;
    let universe = cfg.universe();
    let k_sel = cfg.k.unwrap_or_else(|| (universe / 2).max(1));

    let mut report = OracleReport { trials: cfg.trials, ..OracleReport::default() };
    let mut ratios: Vec<f64> = Vec::new();

    for trial in 0..cfg.trials {
        let seed = derive_seed(cfg.seed, &[0, trial as u64, SCENE_STREAM]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scene = generate_scene(&cfg.geometry, &mut rng)?;
        let problem = match cfg.architecture {
            Architecture::Antenna => ChainProblem::tx_from_scene(&scene, &params)?,
            Architecture::Beamspace { beams } => {
                let codebook = build_codebook(scene.n_tx(), beams)?;
                to_beamspace(&scene, &codebook)?.tx_problem(&params)?
            }
        };
        let offset = match perturb {
            Some(eps) if trial == 0 => eps,
            _ => 0.0,
        };
        let mut faults: Vec<String> = Vec::new();

        type Traced = fn(
            &ChainProblem,
            usize,
            usize,
        ) -> isac_select::Result<(SelectionSet, Vec<RemovalStep>)>;
        for (name, traced) in [
            ("ges", ges_select_traced_with as Traced),
            ("gcs", gcs_select_traced_with as Traced),
        ] {
            let (_, updated) = traced(&problem, 1, usize::MAX)?;
            let (_, recomputed) = traced(&problem, 1, 1)?;
            match update_deviation(&updated, &recomputed) {
                Ok(dev) => {
                    report.worst_update = report.worst_update.max(dev);
                    if dev > UPDATE_TOL {
                        faults.push(format!("{name} update deviation {dev:.3e}"));
                    }
                }
                Err(e) => faults.push(format!("{name}: {e}")),
            }
            match identity_deviation(&problem, &recomputed, offset) {
                Ok(dev) => {
                    report.worst_identity = report.worst_identity.max(dev);
                    if dev > IDENTITY_TOL {
                        faults.push(format!("{name} removal identity deviation {dev:.3e}"));
                    }
                }
                Err(e) => faults.push(format!("{name}: {e}")),
            }
        }

        if k_sel < universe && binomial(universe, k_sel) <= EXHAUSTIVE_CAP {
            let (greedy_set, _) = ges_select_traced_with(&problem, k_sel, usize::MAX)?;
            let greedy = problem.evaluate(&greedy_set)?.objective;
            let (_, best) = exhaustive_select(&problem, k_sel)?;
            if best.objective > 1e-12 {
                let ratio = greedy / best.objective;
                if ratio < RATIO_FLOOR {
                    faults.push(format!(
                        "greedy/exhaustive ratio {ratio:.4} below {RATIO_FLOOR}"
                    ));
                }
                ratios.push(ratio);
            }
        }

        report
            .failures
            .extend(faults.into_iter().map(|what| OracleFailure { trial, seed, what }));
    }

    if !ratios.is_empty() {
        report.mean_exhaustive_ratio =
            Some(ratios.iter().sum::<f64>() / ratios.len() as f64);
        report.min_exhaustive_ratio = ratios.iter().cloned().reduce(f64::min);
    }
    Ok(report)
}
