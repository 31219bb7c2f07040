//! Receive-side selection and the combined two-stage pipeline.
//!
//! The two receive arrays decouple: communication receive antennas only
//! affect the channel MI and sensing receive antennas only affect their own
//! additive MI terms. Communication rows are therefore chosen by the same
//! greedy machinery run on the adjoint channel, while sensing receivers are
//! ranked exactly by their standalone MI, which is optimal because the
//! sensing objective is a sum over receivers.

use super::{gcs_select, ges_select, ChainProblem, GreedyMethod, SelectionSet};
use crate::error::{Error, Result};
use crate::linalg::{logdet_psd, CMatrix};
use crate::metrics::{weighted_objective, LinkParams, MIReport};
use crate::scene::Scene;

/// Outcome of receive-then-transmit selection.
#[derive(Clone, Debug)]
pub struct PipelineSelection {
    pub tx: SelectionSet,
    pub rx_comm: SelectionSet,
    pub rx_sense: SelectionSet,
    pub report: MIReport,
}

/// Keeps the `k` receive antennas that preserve the most communication MI,
/// greedily deleting rows of the channel.
pub fn rx_comm_select(
    scene: &Scene,
    p: &LinkParams,
    k: usize,
    method: GreedyMethod,
) -> Result<SelectionSet> {
    let problem = ChainProblem::comm_rows(&scene.h_c, p)?;
    match method {
        GreedyMethod::Ges => ges_select(&problem, k),
        GreedyMethod::Gcs => gcs_select(&problem, k),
    }
}

/// Keeps the `k` covariances with the largest standalone MI
/// log2|I + gamma T R_n|. Because the sensing objective is additive across
/// receivers, this ranking is exactly optimal. Ties keep the smaller index.
/// Works on any covariance list, antenna- or beam-domain.
pub fn rank_sensing_receivers(
    covs: &[CMatrix],
    p: &LinkParams,
    k: usize,
) -> Result<SelectionSet> {
    p.validate()?;
    let n = covs.len();
    if k < 1 || k > n {
        return Err(Error::model(format!("selection size {k} outside [1, {n}]")));
    }
    let gt = p.gamma * p.slots_f();
    let mut scored: Vec<(usize, f64)> = covs
        .iter()
        .enumerate()
        .map(|(i, r)| Ok((i, logdet_psd(&r.identity_plus_scaled(gt))?)))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let keep: Vec<usize> = scored[..k].iter().map(|&(i, _)| i).collect();
    SelectionSet::from_zero_based(keep, n)
}

/// [`rank_sensing_receivers`] over a scene's sensing covariances.
pub fn rx_sense_select(scene: &Scene, p: &LinkParams, k: usize) -> Result<SelectionSet> {
    rank_sensing_receivers(&scene.r_t, p, k)
}

/// Receive-then-transmit selection: pick both receive arrays first, then run
/// greedy transmit selection against the restricted scene, and evaluate the
/// final triple.
pub fn select_pipeline(
    scene: &Scene,
    p: &LinkParams,
    k_tx: usize,
    k_rx_comm: usize,
    k_rx_sense: usize,
    method: GreedyMethod,
) -> Result<PipelineSelection> {
    let rx_comm = rx_comm_select(scene, p, k_rx_comm, method)?;
    let rx_sense = rx_sense_select(scene, p, k_rx_sense)?;
    let problem = ChainProblem::tx_from_scene_restricted(scene, &rx_comm, &rx_sense, p)?;
    let tx = match method {
        GreedyMethod::Ges => ges_select(&problem, k_tx)?,
        GreedyMethod::Gcs => gcs_select(&problem, k_tx)?,
    };
    let report = weighted_objective(scene, &tx, &rx_comm, &rx_sense, p)?;
    Ok(PipelineSelection { tx, rx_comm, rx_sense, report })
}
