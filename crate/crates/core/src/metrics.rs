//! Mutual-information metrics for both link functions, the weighted
//! normalized objective that selection maximizes, and the circuit-power /
//! energy-efficiency model used to study how many chains are worth powering.

use crate::error::{Error, Result};
use crate::linalg::{logdet_psd, CMatrix};
use crate::scene::{subselect_columns, subselect_rowcols, subselect_rows, Scene};
use crate::select::SelectionSet;
use serde::{Deserialize, Serialize};

/// Link-level constants: coherence slots T, transmit power-to-noise ratio
/// gamma, and the communication/sensing weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    pub slots: u32,
    pub gamma: f64,
    pub omega_c: f64,
    pub omega_s: f64,
}

impl LinkParams {
    pub fn new(slots: u32, gamma: f64, omega_c: f64, omega_s: f64) -> Result<Self> {
        let p = LinkParams { slots, gamma, omega_c, omega_s };
        p.validate()?;
        Ok(p)
    }

    /// Same parameters with gamma given as an SNR in dB.
    pub fn from_snr_db(slots: u32, snr_db: f64, omega_c: f64, omega_s: f64) -> Result<Self> {
        LinkParams::new(slots, gamma_from_snr_db(snr_db), omega_c, omega_s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.slots < 1 {
            return Err(Error::model("link: slot count must be at least 1"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::model("link: gamma must be positive and finite"));
        }
        let (wc, ws) = (self.omega_c, self.omega_s);
        if !(0.0..=1.0).contains(&wc) || !(0.0..=1.0).contains(&ws) {
            return Err(Error::model("link: weights must lie in [0, 1]"));
        }
        if (wc + ws - 1.0).abs() > 1e-12 {
            return Err(Error::model(format!("link: weights must sum to 1, got {}", wc + ws)));
        }
        Ok(())
    }

    pub fn slots_f(&self) -> f64 {
        f64::from(self.slots)
    }
}

pub fn gamma_from_snr_db(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Circuit power model: one local oscillator per array plus per-chain
/// converter and RF front-end draw, with exponential-in-bits converters
/// P(b, f_s) = c * f_s * 2^b.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerModel {
    /// Local oscillator, watts.
    pub p_lo: f64,
    /// RF front-end per chain, watts.
    pub p_rf: f64,
    /// Converter sampling rate, Hz.
    pub sampling_rate: f64,
    pub dac_bits: u32,
    pub adc_bits_comm: u32,
    pub adc_bits_sense: u32,
    /// DAC energy coefficient, W/Hz.
    pub c_dac: f64,
    /// ADC energy coefficient, W/Hz.
    pub c_adc: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        PowerModel {
            p_lo: 22.5e-3,
            p_rf: 31.6e-3,
            sampling_rate: 100e6,
            dac_bits: 12,
            adc_bits_comm: 12,
            adc_bits_sense: 12,
            c_dac: 1e-12,
            c_adc: 1e-12,
        }
    }
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.p_lo, self.p_rf, self.sampling_rate, self.c_dac, self.c_adc];
        if positive.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::model("power: all model constants must be positive and finite"));
        }
        Ok(())
    }

    pub fn dac_power(&self) -> f64 {
        self.c_dac * self.sampling_rate * 2f64.powi(self.dac_bits as i32)
    }

    pub fn adc_power_comm(&self) -> f64 {
        self.c_adc * self.sampling_rate * 2f64.powi(self.adc_bits_comm as i32)
    }

    pub fn adc_power_sense(&self) -> f64 {
        self.c_adc * self.sampling_rate * 2f64.powi(self.adc_bits_sense as i32)
    }
}

/// Both mutual informations plus their weighted normalized combination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MIReport {
    /// Communication MI over the whole coherence block, bits.
    pub comm_mi: f64,
    /// Sensing MI summed over active sensing receivers, bits.
    pub sensing_mi: f64,
    /// (omega_c / T) * comm_mi + (omega_s / N_s) * sensing_mi.
    pub objective: f64,
}

impl MIReport {
    /// Combines raw MIs under the normalization fixed by the scene size.
    /// A zero weight skips its term entirely, so comm-only problems may pass
    /// `n_rx_sense == 0`.
    pub fn new(comm_mi: f64, sensing_mi: f64, p: &LinkParams, n_rx_sense: usize) -> Self {
        let mut objective = 0.0;
        if p.omega_c != 0.0 {
            objective += p.omega_c / p.slots_f() * comm_mi;
        }
        if p.omega_s != 0.0 && n_rx_sense > 0 {
            objective += p.omega_s / n_rx_sense as f64 * sensing_mi;
        }
        MIReport { comm_mi, sensing_mi, objective }
    }
}

/// Communication MI T log2|I + gamma H H^H| over the selected channel,
/// evaluated in whichever Gram orientation is smaller.
pub fn comm_mi(h_sel: &CMatrix, p: &LinkParams) -> Result<f64> {
    p.validate()?;
    if h_sel.rows() == 0 || h_sel.cols() == 0 {
        return Ok(0.0);
    }
    let gram = if h_sel.rows() <= h_sel.cols() {
        h_sel.gram_rows()
    } else {
        h_sel.gram_cols()
    };
    Ok(p.slots_f() * logdet_psd(&gram.identity_plus_scaled(p.gamma))?)
}

/// Sensing MI: sum of log2|I + gamma T R| over the given covariances.
pub fn sensing_mi(r_sel: &[CMatrix], p: &LinkParams) -> Result<f64> {
    p.validate()?;
    let gt = p.gamma * p.slots_f();
    let mut total = 0.0;
    for r in r_sel {
        total += logdet_psd(&r.identity_plus_scaled(gt))?;
    }
    Ok(total)
}

/// Evaluates the full objective for a transmit set, a communication receive
/// set, and a sensing receive set.
///
/// The communication channel keeps the selected receive rows and transmit
/// columns; sensing MI sums over the selected sensing receivers with each
/// covariance restricted to the transmit set. Normalization always uses the
/// scene's full sensing-array size so objectives stay comparable across
/// receive selections.
pub fn weighted_objective(
    scene: &Scene,
    tx_sel: &SelectionSet,
    rx_c_sel: &SelectionSet,
    rx_s_sel: &SelectionSet,
    p: &LinkParams,
) -> Result<MIReport> {
    p.validate()?;
    let h = subselect_rows(&subselect_columns(&scene.h_c, tx_sel)?, rx_c_sel)?;
    let ic = comm_mi(&h, p)?;
    if rx_s_sel.universe_size() != scene.n_rx_sense() {
        return Err(Error::model(format!(
            "weighted_objective: sensing selection universe {} against {} sensing antennas",
            rx_s_sel.universe_size(),
            scene.n_rx_sense()
        )));
    }
    let restricted: Vec<CMatrix> = rx_s_sel
        .zero_based()
        .into_iter()
        .map(|n| subselect_rowcols(&scene.r_t[n], tx_sel))
        .collect::<Result<_>>()?;
    let is = sensing_mi(&restricted, p)?;
    Ok(MIReport::new(ic, is, p, scene.n_rx_sense()))
}

/// Total circuit power for the given active cardinalities.
pub fn circuit_power_counts(pm: &PowerModel, n_tx: usize, n_rx_comm: usize, n_rx_sense: usize) -> f64 {
    let bs = pm.p_lo + n_tx as f64 * (pm.dac_power() + pm.p_rf);
    let ue = pm.p_lo + n_rx_comm as f64 * (pm.adc_power_comm() + pm.p_rf);
    let sense = pm.p_lo + n_rx_sense as f64 * (pm.adc_power_sense() + pm.p_rf);
    bs + ue + sense
}

/// Total circuit power for the given selections.
pub fn circuit_power(
    pm: &PowerModel,
    tx_sel: &SelectionSet,
    rx_c_sel: &SelectionSet,
    rx_s_sel: &SelectionSet,
) -> f64 {
    circuit_power_counts(pm, tx_sel.len(), rx_c_sel.len(), rx_s_sel.len())
}

/// Normalized energy efficiency: objective per watt of circuit power.
// The negated comparison rejects NaN circuit power as well.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn energy_efficiency(report: &MIReport, pcir: f64) -> Result<f64> {
    if !(pcir > 0.0) {
        return Err(Error::model(format!("energy_efficiency: nonpositive circuit power {pcir}")));
    }
    Ok(report.objective / pcir)
}
