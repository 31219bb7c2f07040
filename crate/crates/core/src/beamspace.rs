//! DFT beamspace reduction: replace the transmit-antenna universe with M
//! fixed beams so selection can run over a smaller, hardware-friendly grid.
//!
//! Beam m is the length-N_t column u_m = sqrt(1/N_t) [e^{-j 2 pi k (m-1)/M}]_k.
//! The channel maps as H U and each sensing covariance as U^H R U; both keep
//! the shapes selection expects, so the greedy algorithms run unchanged over
//! beams. The diagonal beam scorer picks beams by their standalone
//! contribution in one pass, which is exact when every propagation angle sits
//! on the beam grid (the transformed matrices are then diagonal) and a cheap
//! approximation otherwise.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::metrics::LinkParams;
use crate::scene::Scene;
use crate::select::{ChainProblem, SelectionSet};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// N_t x M matrix of unit-norm DFT beams; unitary when `m == n_tx`.
pub fn build_codebook(n_tx: usize, m: usize) -> Result<CMatrix> {
    if m < 1 || m > n_tx {
        return Err(Error::model(format!(
            "codebook: beam count {m} outside [1, {n_tx}]"
        )));
    }
    let norm = (n_tx as f64).sqrt().recip();
    Ok(CMatrix::from_fn(n_tx, m, |k, c| {
        Complex64::from_polar(norm, -TAU * (k * c) as f64 / m as f64)
    }))
}

/// A scene viewed through a transmit DFT codebook.
#[derive(Clone, Debug)]
pub struct BeamspaceScene {
    pub codebook: CMatrix,
    /// n_rx_comm x M transformed channel.
    pub h_c: CMatrix,
    /// M x M transformed sensing covariances, one per sensing receiver.
    pub r_t: Vec<CMatrix>,
    pub n_rx_sense: usize,
}

/// Applies a codebook (any N_t x M matrix of beamforming columns, usually
/// from [`build_codebook`]) to the channel and every sensing covariance.
pub fn to_beamspace(scene: &Scene, codebook: &CMatrix) -> Result<BeamspaceScene> {
    if codebook.rows() != scene.n_tx() || codebook.cols() < 1 {
        return Err(Error::model(format!(
            "beamspace: codebook is {}x{} against {} transmit antennas",
            codebook.rows(),
            codebook.cols(),
            scene.n_tx()
        )));
    }
    if !codebook.all_finite() {
        return Err(Error::model("beamspace: codebook must be finite"));
    }
    let h_c = scene.h_c.mul(codebook);
    let r_t = scene
        .r_t
        .iter()
        .map(|r| {
            let t = codebook.adjoint().mul(&r.mul(codebook));
            // Exact-Hermitian part; the product is Hermitian up to rounding.
            t.add(&t.adjoint()).scale(0.5)
        })
        .collect();
    Ok(BeamspaceScene {
        codebook: codebook.clone(),
        h_c,
        r_t,
        n_rx_sense: scene.n_rx_sense(),
    })
}

impl BeamspaceScene {
    pub fn n_beams(&self) -> usize {
        self.codebook.cols()
    }

    /// Beam-selection problem over the full receive arrays.
    pub fn tx_problem(&self, params: &LinkParams) -> Result<ChainProblem> {
        ChainProblem::new(self.h_c.clone(), self.r_t.clone(), *params, self.n_rx_sense)
    }

    /// Beam-selection problem after receive-side selection.
    pub fn tx_problem_restricted(
        &self,
        rx_c_sel: &SelectionSet,
        rx_s_sel: &SelectionSet,
        params: &LinkParams,
    ) -> Result<ChainProblem> {
        if rx_c_sel.universe_size() != self.h_c.rows() {
            return Err(Error::model(format!(
                "beamspace: comm selection universe {} against {} receive antennas",
                rx_c_sel.universe_size(),
                self.h_c.rows()
            )));
        }
        if rx_s_sel.universe_size() != self.n_rx_sense {
            return Err(Error::model(format!(
                "beamspace: sensing selection universe {} against {} sensing antennas",
                rx_s_sel.universe_size(),
                self.n_rx_sense
            )));
        }
        let sensing = rx_s_sel.zero_based().into_iter().map(|n| self.r_t[n].clone()).collect();
        ChainProblem::new(
            self.h_c.select_rows(&rx_c_sel.zero_based()),
            sensing,
            *params,
            self.n_rx_sense,
        )
    }
}

/// Standalone weighted contribution of every candidate:
/// omega_c log2(1 + gamma |h_j|^2) + (omega_s / N_s) sum_n log2(1 + gamma T [R_n]_jj).
/// When the transformed matrices are exactly diagonal, any subset's objective
/// is exactly the sum of its members' scores.
pub fn dbs_scores(problem: &ChainProblem) -> Vec<f64> {
    let gamma = problem.params.gamma;
    let gt = gamma * problem.params.slots_f();
    let wc = problem.params.omega_c;
    let ws = problem.sensing_weight();
    (0..problem.universe())
        .map(|j| {
            let mut s = 0.0;
            if wc != 0.0 {
                let col_energy: f64 =
                    (0..problem.channel.rows()).map(|r| problem.channel[(r, j)].norm_sqr()).sum();
                s += wc * (1.0 + gamma * col_energy).log2();
            }
            if ws != 0.0 {
                for r in &problem.sensing {
                    s += ws * (1.0 + gt * r[(j, j)].re.max(0.0)).log2();
                }
            }
            s
        })
        .collect()
}

/// Diagonal beam scorer: keeps the `k` candidates with the largest
/// [`dbs_scores`] value, breaking ties toward the smaller index. One pass,
/// no matrix updates.
pub fn dbs_select(problem: &ChainProblem, k: usize) -> Result<SelectionSet> {
    problem.check_k(k)?;
    let mut scored: Vec<(usize, f64)> = dbs_scores(problem).into_iter().enumerate().collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let keep: Vec<usize> = scored[..k].iter().map(|&(j, _)| j).collect();
    SelectionSet::from_zero_based(keep, problem.universe())
}
