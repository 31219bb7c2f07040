//! Monte-Carlo execution: sweep-point enumeration, per-trial method runs,
//! and deterministic aggregation into sweep records.
//!
//! Every trial draws its scene from a seed stream keyed by (sweep point,
//! trial), so all methods see the same scenes (paired comparison) and the
//! result is independent of thread count and job order. Aggregation runs
//! single-threaded over rows sorted by (method, point, trial).

use crate::config::{Architecture, ExperimentConfig, Method, Sweep};
use crate::seed::{derive_seed, METHOD_STREAM_BASE, SCENE_STREAM};
use crate::{HarnessError, Result};
use isac_select::beamspace::{build_codebook, dbs_select, to_beamspace};
use isac_select::metrics::{
    circuit_power_counts, energy_efficiency, weighted_objective, LinkParams, MIReport,
};
use isac_select::scene::{generate_scene, Scene};
use isac_select::select::{
    exhaustive_select, fixed_select, gcs_select, ges_select, random_select,
    rank_sensing_receivers, rx_comm_select, rx_sense_select, select_pipeline, ChainProblem,
    GreedyMethod, SelectionSet,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

/// One sweep point, fully resolved: link parameters and cardinalities.
#[derive(Clone, Debug)]
pub struct PointSpec {
    /// Value written to the CSV `point` column (dB, chain count, or weight).
    pub label: f64,
    pub params: LinkParams,
    pub k_tx: usize,
    pub k_rx_comm: usize,
    pub k_rx_sense: usize,
}

/// Per-trial results for one method at one point.
#[derive(Clone, Copy, Debug)]
pub struct TrialMetrics {
    pub objective: f64,
    /// Communication MI per slot, I_c / T.
    pub ic_norm: f64,
    /// Sensing MI per sensing receiver, I_s / N_s.
    pub is_norm: f64,
    /// Objective per watt of circuit power for the active chain counts.
    pub ee: f64,
}

/// Aggregate over trials for one (method, point) cell.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRecord {
    pub method: Method,
    pub point: f64,
    pub objective_mean: f64,
    pub objective_se: f64,
    pub ic_mean: f64,
    pub is_mean: f64,
    pub ee_mean: f64,
    pub trials: usize,
    pub ms: f64,
}

/// Resolves the sweep axis into concrete points, in config order.
pub fn sweep_points(cfg: &ExperimentConfig) -> Result<Vec<PointSpec>> {
    let (k_rc, k_rs) = cfg.rx_sizes();
    let fixed_k = || {
        cfg.k.ok_or_else(|| {
            HarnessError::config("k (kept transmit chains) is required for this sweep")
        })
    };
    match &cfg.sweep {
        Sweep::Snr(dbs) => dbs
            .iter()
            .map(|&db| {
                Ok(PointSpec {
                    label: db,
                    params: cfg.link.params_at_snr(db)?,
                    k_tx: fixed_k()?,
                    k_rx_comm: k_rc,
                    k_rx_sense: k_rs,
                })
            })
            .collect(),
        Sweep::K(ks) | Sweep::Ee(ks) => ks
            .iter()
            .map(|&k| {
                Ok(PointSpec {
                    label: k as f64,
                    params: cfg.link.params()?,
                    k_tx: k,
                    k_rx_comm: k_rc,
                    k_rx_sense: k_rs,
                })
            })
            .collect(),
        // The weight trace runs with the receive arrays untouched.
        Sweep::Pareto(ws) => ws
            .iter()
            .map(|&w| {
                Ok(PointSpec {
                    label: w,
                    params: cfg.link.params_at_weight(w)?,
                    k_tx: fixed_k()?,
                    k_rx_comm: cfg.geometry.n_rx_comm,
                    k_rx_sense: cfg.geometry.n_rx_sense,
                })
            })
            .collect(),
    }
}

fn greedy_of(method: Method) -> GreedyMethod {
    match method {
        Method::Ges => GreedyMethod::Ges,
        _ => GreedyMethod::Gcs,
    }
}

fn metrics_from(
    report: &MIReport,
    point: &PointSpec,
    cfg: &ExperimentConfig,
    n_rx_sense_total: usize,
    chains: (usize, usize, usize),
) -> Result<TrialMetrics> {
    let pcir = circuit_power_counts(&cfg.power, chains.0, chains.1, chains.2);
    Ok(TrialMetrics {
        objective: report.objective,
        ic_norm: report.comm_mi / point.params.slots_f(),
        is_norm: report.sensing_mi / n_rx_sense_total as f64,
        ee: energy_efficiency(report, pcir)?,
    })
}

fn antenna_metrics(
    cfg: &ExperimentConfig,
    point: &PointSpec,
    scene: &Scene,
    method: Method,
    rand_seed: u64,
) -> Result<TrialMetrics> {
    let p = &point.params;
    let (n_t, n_c, n_s) = (scene.n_tx(), scene.n_rx_comm(), scene.n_rx_sense());
    let (tx, rx_c, rx_s, report) = match method {
        Method::Ges | Method::Gcs => {
            let out = select_pipeline(
                scene,
                p,
                point.k_tx,
                point.k_rx_comm,
                point.k_rx_sense,
                greedy_of(method),
            )?;
            (out.tx, out.rx_comm, out.rx_sense, out.report)
        }
        Method::Exhaustive => {
            let rx_c = rx_comm_select(scene, p, point.k_rx_comm, GreedyMethod::Gcs)?;
            let rx_s = rx_sense_select(scene, p, point.k_rx_sense)?;
            let problem = ChainProblem::tx_from_scene_restricted(scene, &rx_c, &rx_s, p)?;
            let (tx, _) = exhaustive_select(&problem, point.k_tx)?;
            let report = weighted_objective(scene, &tx, &rx_c, &rx_s, p)?;
            (tx, rx_c, rx_s, report)
        }
        Method::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(rand_seed);
            let rx_c = random_select(n_c, point.k_rx_comm, &mut rng)?;
            let rx_s = random_select(n_s, point.k_rx_sense, &mut rng)?;
            let tx = random_select(n_t, point.k_tx, &mut rng)?;
            let report = weighted_objective(scene, &tx, &rx_c, &rx_s, p)?;
            (tx, rx_c, rx_s, report)
        }
        Method::Fixed => {
            let rx_c = fixed_select(n_c, point.k_rx_comm)?;
            let rx_s = fixed_select(n_s, point.k_rx_sense)?;
            let tx = fixed_select(n_t, point.k_tx)?;
            let report = weighted_objective(scene, &tx, &rx_c, &rx_s, p)?;
            (tx, rx_c, rx_s, report)
        }
        Method::Full => {
            let tx = SelectionSet::full(n_t);
            let rx_c = SelectionSet::full(n_c);
            let rx_s = SelectionSet::full(n_s);
            let report = weighted_objective(scene, &tx, &rx_c, &rx_s, p)?;
            (tx, rx_c, rx_s, report)
        }
        Method::Dbs => {
            return Err(HarnessError::config("dbs requires the beamspace architecture"))
        }
    };
    metrics_from(&report, point, cfg, n_s, (tx.len(), rx_c.len(), rx_s.len()))
}

fn beamspace_metrics(
    cfg: &ExperimentConfig,
    beams: usize,
    point: &PointSpec,
    scene: &Scene,
    method: Method,
    rand_seed: u64,
) -> Result<TrialMetrics> {
    let p = &point.params;
    let codebook = build_codebook(scene.n_tx(), beams)?;
    let bs = to_beamspace(scene, &codebook)?;
    let (m, n_c, n_s) = (bs.n_beams(), scene.n_rx_comm(), scene.n_rx_sense());

    // Receive chains are physical antennas either way; the informed methods
    // pick them with the greedy row machinery against the beam-domain scene.
    let informed_rx = |g: GreedyMethod| -> Result<(SelectionSet, SelectionSet)> {
        let comm = ChainProblem::comm_rows(&bs.h_c, p)?;
        let rx_c = match g {
            GreedyMethod::Ges => ges_select(&comm, point.k_rx_comm)?,
            GreedyMethod::Gcs => gcs_select(&comm, point.k_rx_comm)?,
        };
        let rx_s = rank_sensing_receivers(&bs.r_t, p, point.k_rx_sense)?;
        Ok((rx_c, rx_s))
    };

    let (tx, rx_c, rx_s) = match method {
        Method::Ges | Method::Gcs => {
            let g = greedy_of(method);
            let (rx_c, rx_s) = informed_rx(g)?;
            let problem = bs.tx_problem_restricted(&rx_c, &rx_s, p)?;
            let tx = match g {
                GreedyMethod::Ges => ges_select(&problem, point.k_tx)?,
                GreedyMethod::Gcs => gcs_select(&problem, point.k_tx)?,
            };
            (tx, rx_c, rx_s)
        }
        Method::Dbs => {
            let (rx_c, rx_s) = informed_rx(GreedyMethod::Gcs)?;
            let problem = bs.tx_problem_restricted(&rx_c, &rx_s, p)?;
            let tx = dbs_select(&problem, point.k_tx)?;
            (tx, rx_c, rx_s)
        }
        Method::Exhaustive => {
            let (rx_c, rx_s) = informed_rx(GreedyMethod::Gcs)?;
            let problem = bs.tx_problem_restricted(&rx_c, &rx_s, p)?;
            let (tx, _) = exhaustive_select(&problem, point.k_tx)?;
            (tx, rx_c, rx_s)
        }
        Method::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(rand_seed);
            let rx_c = random_select(n_c, point.k_rx_comm, &mut rng)?;
            let rx_s = random_select(n_s, point.k_rx_sense, &mut rng)?;
            let tx = random_select(m, point.k_tx, &mut rng)?;
            (tx, rx_c, rx_s)
        }
        Method::Fixed => (
            fixed_select(m, point.k_tx)?,
            fixed_select(n_c, point.k_rx_comm)?,
            fixed_select(n_s, point.k_rx_sense)?,
        ),
        Method::Full => {
            (SelectionSet::full(m), SelectionSet::full(n_c), SelectionSet::full(n_s))
        }
    };
    let problem = bs.tx_problem_restricted(&rx_c, &rx_s, p)?;
    let report = problem.evaluate(&tx)?;
    metrics_from(&report, point, cfg, n_s, (tx.len(), rx_c.len(), rx_s.len()))
}

/// Runs one method on one already-generated scene. `rand_seed` feeds the
/// method's private randomness (only the random baseline draws from it).
pub fn method_metrics(
    cfg: &ExperimentConfig,
    point: &PointSpec,
    scene: &Scene,
    method: Method,
    rand_seed: u64,
) -> Result<TrialMetrics> {
    match cfg.architecture {
        Architecture::Antenna => antenna_metrics(cfg, point, scene, method, rand_seed),
        Architecture::Beamspace { beams } => {
            beamspace_metrics(cfg, beams, point, scene, method, rand_seed)
        }
    }
}

/// Scene seed for (point, trial); shared across methods for paired trials.
pub fn scene_seed(cfg: &ExperimentConfig, point_idx: usize, trial: usize) -> u64 {
    derive_seed(cfg.seed, &[point_idx as u64, trial as u64, SCENE_STREAM])
}

/// One trial at one point: generates the shared scene, then runs every
/// configured method on it, timing each.
pub fn run_point_trial(
    cfg: &ExperimentConfig,
    point: &PointSpec,
    point_idx: usize,
    trial: usize,
) -> Result<Vec<(Method, TrialMetrics, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(scene_seed(cfg, point_idx, trial));
    let scene = generate_scene(&cfg.geometry, &mut rng)?;
    cfg.methods
        .iter()
        .map(|&method| {
            let rand_seed = derive_seed(
                cfg.seed,
                &[point_idx as u64, trial as u64, METHOD_STREAM_BASE + method.stream_tag()],
            );
            let start = Instant::now();
            let metrics = method_metrics(cfg, point, &scene, method, rand_seed)?;
            Ok((method, metrics, start.elapsed().as_secs_f64() * 1e3))
        })
        .collect()
}

/// Full experiment: all points x trials in a work pool, then a deterministic
/// sort and single-threaded aggregation.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let points = sweep_points(cfg)?;
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|pi| (0..cfg.trials).map(move |t| (pi, t)))
        .collect();

    let per_trial: Vec<Vec<(Method, TrialMetrics, f64)>> = jobs
        .par_iter()
        .map(|&(pi, t)| run_point_trial(cfg, &points[pi], pi, t))
        .collect::<Result<_>>()?;

    let method_rank =
        |m: Method| cfg.methods.iter().position(|&x| x == m).expect("method from config");
    let mut rows: Vec<(usize, usize, usize, TrialMetrics, f64)> = Vec::new();
    for (&(pi, t), outcomes) in jobs.iter().zip(&per_trial) {
        for &(method, metrics, ms) in outcomes {
            rows.push((method_rank(method), pi, t, metrics, ms));
        }
    }
    rows.sort_by_key(|&(mi, pi, t, _, _)| (mi, pi, t));

    let mut records = Vec::with_capacity(cfg.methods.len() * points.len());
    for (mi, &method) in cfg.methods.iter().enumerate() {
        for (pi, point) in points.iter().enumerate() {
            let cell: Vec<&(usize, usize, usize, TrialMetrics, f64)> =
                rows.iter().filter(|&&(m, p, _, _, _)| m == mi && p == pi).collect();
            let n = cell.len();
            debug_assert_eq!(n, cfg.trials);
            let nf = n as f64;
            let mean = |f: &dyn Fn(&TrialMetrics) -> f64| {
                cell.iter().map(|&&(_, _, _, tm, _)| f(&tm)).sum::<f64>() / nf
            };
            let objective_mean = mean(&|tm| tm.objective);
            let objective_se = if n > 1 {
                let var = cell
                    .iter()
                    .map(|&&(_, _, _, tm, _)| (tm.objective - objective_mean).powi(2))
                    .sum::<f64>()
                    / (nf - 1.0);
                (var / nf).sqrt()
            } else {
                0.0
            };
            records.push(SweepRecord {
                method,
                point: point.label,
                objective_mean,
                objective_se,
                ic_mean: mean(&|tm| tm.ic_norm),
                is_mean: mean(&|tm| tm.is_norm),
                ee_mean: mean(&|tm| tm.ee),
                trials: n,
                ms: cell.iter().map(|&&(_, _, _, _, ms)| ms).sum(),
            });
        }
    }
    Ok(records)
}
