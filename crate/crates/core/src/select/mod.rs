//! Subset selection of transmit chains, receive chains, and beams.
//!
//! Greedy deletion comes in two equivalent flavors: an eigenspace form that
//! tracks receive-side inverses ([`ges_select`]) and a Gram form that tracks
//! candidate-side inverses ([`gcs_select`]). Both remove one element at a
//! time, scoring each candidate by the multiplicative loss its removal would
//! cause. Baselines (exhaustive, random, evenly spaced, full) and decoupled
//! receive-side selection live here too.

mod baselines;
mod gcs;
mod ges;
mod rx;
mod set;

pub use baselines::{binomial, exhaustive_select, fixed_select, random_select, EXHAUSTIVE_CAP};
pub use gcs::{gcs_select, gcs_select_traced, gcs_select_traced_with};
pub use ges::{ges_select, ges_select_traced, ges_select_traced_with};
pub use rx::{
    rank_sensing_receivers, rx_comm_select, rx_sense_select, select_pipeline, PipelineSelection,
};
pub use set::SelectionSet;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::metrics::{comm_mi, sensing_mi, LinkParams, MIReport};
use crate::scene::{subselect_columns, subselect_rowcols, subselect_rows, Scene};
use serde::{Deserialize, Serialize};

/// How many removals a greedy run performs between from-scratch rebuilds of
/// its tracked inverses. Rank-one updates are exact in theory; the periodic
/// refresh keeps accumulated rounding from drifting over long chains.
pub const DEFAULT_REFRESH_EVERY: usize = 8;

/// Which greedy deletion algorithm to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GreedyMethod {
    Ges,
    Gcs,
}

/// A selection problem over one universe of removable elements.
///
/// Columns of `channel` are the communication signatures of the candidates;
/// each `sensing` matrix is a candidate-indexed covariance whose principal
/// submatrices score sensing. Transmit-antenna selection, receive-side
/// communication selection (via the adjoint channel), and beam selection all
/// reduce to this shape.
#[derive(Clone, Debug)]
pub struct ChainProblem {
    /// rows x universe; column j belongs to candidate j.
    pub channel: CMatrix,
    /// Each universe x universe, Hermitian PSD.
    pub sensing: Vec<CMatrix>,
    pub params: LinkParams,
    /// Divisor for the sensing term. Stays at the full sensing-array size
    /// even when `sensing` holds a receive-selected subset, so objectives
    /// remain comparable across receive selections.
    pub sensing_normalizer: usize,
}

impl ChainProblem {
    pub fn new(
        channel: CMatrix,
        sensing: Vec<CMatrix>,
        params: LinkParams,
        sensing_normalizer: usize,
    ) -> Result<Self> {
        params.validate()?;
        if !channel.all_finite() {
            return Err(Error::model("problem: channel must be finite"));
        }
        let universe = channel.cols();
        if universe == 0 {
            return Err(Error::model("problem: empty candidate universe"));
        }
        for (n, r) in sensing.iter().enumerate() {
            if r.rows() != universe || r.cols() != universe {
                return Err(Error::model(format!(
                    "problem: sensing covariance {n} is {}x{}, expected {universe}x{universe}",
                    r.rows(),
                    r.cols()
                )));
            }
            crate::linalg::require_hermitian(r, "sensing covariance")?;
        }
        if params.omega_s != 0.0 && !sensing.is_empty() && sensing_normalizer == 0 {
            return Err(Error::model("problem: sensing term needs a positive normalizer"));
        }
        Ok(ChainProblem { channel, sensing, params, sensing_normalizer })
    }

    /// Transmit-antenna selection over the full scene.
    pub fn tx_from_scene(scene: &Scene, params: &LinkParams) -> Result<Self> {
        ChainProblem::new(
            scene.h_c.clone(),
            scene.r_t.clone(),
            *params,
            scene.n_rx_sense(),
        )
    }

    /// Transmit-antenna selection after receive-side selection: the channel
    /// keeps only the chosen communication rows and the sensing sum only the
    /// chosen sensing receivers.
    pub fn tx_from_scene_restricted(
        scene: &Scene,
        rx_c_sel: &SelectionSet,
        rx_s_sel: &SelectionSet,
        params: &LinkParams,
    ) -> Result<Self> {
        if rx_s_sel.universe_size() != scene.n_rx_sense() {
            return Err(Error::model(format!(
                "problem: sensing selection universe {} against {} sensing antennas",
                rx_s_sel.universe_size(),
                scene.n_rx_sense()
            )));
        }
        let sensing = rx_s_sel
            .zero_based()
            .into_iter()
            .map(|n| scene.r_t[n].clone())
            .collect();
        ChainProblem::new(
            subselect_rows(&scene.h_c, rx_c_sel)?,
            sensing,
            *params,
            scene.n_rx_sense(),
        )
    }

    /// Communication-only problem whose candidates are the rows of `h`
    /// (receive antennas). Weights are forced to pure communication.
    pub fn comm_rows(h: &CMatrix, params: &LinkParams) -> Result<Self> {
        let p = LinkParams::new(params.slots, params.gamma, 1.0, 0.0)?;
        ChainProblem::new(h.adjoint(), Vec::new(), p, 0)
    }

    pub fn universe(&self) -> usize {
        self.channel.cols()
    }

    /// Objective of keeping exactly the candidates in `sel`.
    pub fn evaluate(&self, sel: &SelectionSet) -> Result<MIReport> {
        if sel.universe_size() != self.universe() {
            return Err(Error::model(format!(
                "problem: selection universe {} against {} candidates",
                sel.universe_size(),
                self.universe()
            )));
        }
        let ic = comm_mi(&subselect_columns(&self.channel, sel)?, &self.params)?;
        let restricted: Vec<CMatrix> = self
            .sensing
            .iter()
            .map(|r| subselect_rowcols(r, sel))
            .collect::<Result<_>>()?;
        let is = sensing_mi(&restricted, &self.params)?;
        Ok(MIReport::new(ic, is, &self.params, self.sensing_normalizer))
    }

    pub(crate) fn check_k(&self, k: usize) -> Result<()> {
        if k < 1 || k > self.universe() {
            return Err(Error::model(format!(
                "selection size {k} outside [1, {}]",
                self.universe()
            )));
        }
        Ok(())
    }

    /// omega_s divided by the sensing normalizer, or 0 when the sensing term
    /// is inert.
    pub(crate) fn sensing_weight(&self) -> f64 {
        if self.params.omega_s == 0.0 || self.sensing.is_empty() || self.sensing_normalizer == 0 {
            0.0
        } else {
            self.params.omega_s / self.sensing_normalizer as f64
        }
    }
}

/// One greedy removal: the candidate that was dropped and the log-domain
/// loss score of every candidate still in play when the choice was made
/// (ascending by candidate index, 1-based, higher score = cheaper to drop).
#[derive(Clone, Debug, PartialEq)]
pub struct RemovalStep {
    pub removed: usize,
    pub scores: Vec<(usize, f64)>,
}

/// Largest score wins; ties go to the smallest candidate index. `scores`
/// is ascending by index, so strict replacement does both.
pub(crate) fn pick_removal(scores: &[(usize, f64)]) -> usize {
    let mut best = scores[0];
    for &cand in &scores[1..] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{generate_scene, GeometryConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_scene() -> Scene {
        let cfg = GeometryConfig::new(5, 3, 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        generate_scene(&cfg, &mut rng).unwrap()
    }

    #[test]
    fn tx_problem_matches_weighted_objective() {
        let scene = small_scene();
        let p = LinkParams::new(16, 2.0, 0.5, 0.5).unwrap();
        let problem = ChainProblem::tx_from_scene(&scene, &p).unwrap();
        let sel = SelectionSet::new(vec![1, 4, 5], 5).unwrap();
        let via_problem = problem.evaluate(&sel).unwrap();
        let direct = crate::metrics::weighted_objective(
            &scene,
            &sel,
            &SelectionSet::full(3),
            &SelectionSet::full(2),
            &p,
        )
        .unwrap();
        assert!((via_problem.objective - direct.objective).abs() < 1e-12);
        assert!((via_problem.comm_mi - direct.comm_mi).abs() < 1e-12);
        assert!((via_problem.sensing_mi - direct.sensing_mi).abs() < 1e-12);
    }

    #[test]
    fn restricted_problem_keeps_full_normalizer() {
        let scene = small_scene();
        let p = LinkParams::new(16, 2.0, 0.5, 0.5).unwrap();
        let rx_c = SelectionSet::new(vec![1, 2], 3).unwrap();
        let rx_s = SelectionSet::new(vec![2], 2).unwrap();
        let problem = ChainProblem::tx_from_scene_restricted(&scene, &rx_c, &rx_s, &p).unwrap();
        assert_eq!(problem.sensing.len(), 1);
        assert_eq!(problem.sensing_normalizer, 2);
        assert_eq!(problem.channel.rows(), 2);

        let sel = SelectionSet::full(5);
        let via_problem = problem.evaluate(&sel).unwrap();
        let direct = crate::metrics::weighted_objective(&scene, &sel, &rx_c, &rx_s, &p).unwrap();
        assert!((via_problem.objective - direct.objective).abs() < 1e-12);
    }

    #[test]
    fn comm_rows_counts_receive_antennas() {
        let scene = small_scene();
        let p = LinkParams::new(16, 2.0, 0.25, 0.75).unwrap();
        let problem = ChainProblem::comm_rows(&scene.h_c, &p).unwrap();
        assert_eq!(problem.universe(), 3);
        assert_eq!(problem.params.omega_c, 1.0);
        let report = problem.evaluate(&SelectionSet::full(3)).unwrap();
        let full = crate::metrics::comm_mi(&scene.h_c, &problem.params).unwrap();
        assert!((report.comm_mi - full).abs() < 1e-9);
        assert!((report.objective - full / 16.0).abs() < 1e-9);
    }

    #[test]
    fn problem_validation_rejects_shape_mismatch() {
        let scene = small_scene();
        let p = LinkParams::new(16, 2.0, 0.5, 0.5).unwrap();
        let bad = ChainProblem::new(
            scene.h_c.clone(),
            vec![CMatrix::identity(4)],
            p,
            scene.n_rx_sense(),
        );
        assert!(matches!(bad, Err(Error::Model(_))));
    }

    #[test]
    fn removal_pick_prefers_smallest_on_tie() {
        let scores = vec![(1, 0.5), (3, 0.9), (4, 0.9), (7, 0.2)];
        assert_eq!(pick_removal(&scores), 3);
    }
}
