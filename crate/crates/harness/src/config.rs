//! Experiment configuration: one flat JSON document describing the scene
//! geometry, link settings, sweep axis, methods, and reproducibility seed.

use crate::{HarnessError, Result};
use isac_select::metrics::{LinkParams, PowerModel};
use isac_select::scene::GeometryConfig;
use isac_select::select::{binomial, EXHAUSTIVE_CAP};
use serde::{Deserialize, Serialize};

/// Selection scheme run at every sweep point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ges,
    Gcs,
    Dbs,
    Exhaustive,
    Random,
    Fixed,
    Full,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Ges => "ges",
            Method::Gcs => "gcs",
            Method::Dbs => "dbs",
            Method::Exhaustive => "exhaustive",
            Method::Random => "random",
            Method::Fixed => "fixed",
            Method::Full => "full",
        }
    }

    /// Stable stream tag so each method's private randomness is independent
    /// of which other methods run.
    pub fn stream_tag(self) -> u64 {
        match self {
            Method::Ges => 1,
            Method::Gcs => 2,
            Method::Dbs => 3,
            Method::Exhaustive => 4,
            Method::Random => 5,
            Method::Fixed => 6,
            Method::Full => 7,
        }
    }
}

/// Whether selection runs over transmit antennas or DFT beams.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    #[default]
    Antenna,
    Beamspace { beams: usize },
}

/// Link settings shared by every sweep point; the sweep axis overrides the
/// matching field (SNR sweeps override `snr_db`, Pareto sweeps the weights).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkTemplate {
    #[serde(default = "default_slots")]
    pub slots: u32,
    #[serde(default)]
    pub snr_db: f64,
    #[serde(default = "default_weight")]
    pub omega_c: f64,
    #[serde(default = "default_weight")]
    pub omega_s: f64,
}

fn default_slots() -> u32 {
    64
}

fn default_weight() -> f64 {
    0.5
}

impl Default for LinkTemplate {
    fn default() -> Self {
        LinkTemplate { slots: default_slots(), snr_db: 0.0, omega_c: 0.5, omega_s: 0.5 }
    }
}

impl LinkTemplate {
    pub fn params(&self) -> Result<LinkParams> {
        LinkParams::from_snr_db(self.slots, self.snr_db, self.omega_c, self.omega_s)
            .map_err(HarnessError::from)
    }

    pub fn params_at_snr(&self, snr_db: f64) -> Result<LinkParams> {
        LinkParams::from_snr_db(self.slots, snr_db, self.omega_c, self.omega_s)
            .map_err(HarnessError::from)
    }

    pub fn params_at_weight(&self, omega_c: f64) -> Result<LinkParams> {
        LinkParams::from_snr_db(self.slots, self.snr_db, omega_c, 1.0 - omega_c)
            .map_err(HarnessError::from)
    }
}

/// The swept axis: SNR in dB, kept transmit chains, communication weight, or
/// kept chains for an energy-efficiency study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Sweep {
    Snr(Vec<f64>),
    K(Vec<usize>),
    Pareto(Vec<f64>),
    Ee(Vec<usize>),
}

impl Sweep {
    pub fn len(&self) -> usize {
        match self {
            Sweep::Snr(v) => v.len(),
            Sweep::K(v) => v.len(),
            Sweep::Pareto(v) => v.len(),
            Sweep::Ee(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Sweep::Snr(_) => "snr",
            Sweep::K(_) => "k",
            Sweep::Pareto(_) => "pareto",
            Sweep::Ee(_) => "ee",
        }
    }

    /// Transmit-chain counts this sweep will run, given the fixed fallback.
    fn k_values(&self, fixed_k: Option<usize>) -> Vec<usize> {
        match self {
            Sweep::K(v) | Sweep::Ee(v) => v.clone(),
            _ => fixed_k.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub link: LinkTemplate,
    #[serde(default)]
    pub power: PowerModel,
    pub sweep: Sweep,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub architecture: Architecture,
    /// Transmit chains kept; required unless the sweep varies it.
    #[serde(default)]
    pub k: Option<usize>,
    /// Communication receive chains kept; absent = keep the whole array.
    #[serde(default)]
    pub k_rx_comm: Option<usize>,
    /// Sensing receive chains kept; absent = keep the whole array.
    #[serde(default)]
    pub k_rx_sense: Option<usize>,
}

fn default_trials() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Size of the transmit-side selection universe (antennas or beams).
    pub fn universe(&self) -> usize {
        match self.architecture {
            Architecture::Antenna => self.geometry.n_tx,
            Architecture::Beamspace { beams } => beams,
        }
    }

    /// Receive cardinalities actually applied (full array when unset).
    pub fn rx_sizes(&self) -> (usize, usize) {
        (
            self.k_rx_comm.unwrap_or(self.geometry.n_rx_comm),
            self.k_rx_sense.unwrap_or(self.geometry.n_rx_sense),
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.power.validate()?;
        if self.trials < 1 {
            return Err(HarnessError::config("trials must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(HarnessError::config("methods must not be empty"));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(HarnessError::config(format!("duplicate method {}", m.label())));
            }
        }
        if self.sweep.is_empty() {
            return Err(HarnessError::config("sweep must list at least one point"));
        }

        let universe = self.universe();
        if let Architecture::Beamspace { beams } = self.architecture {
            if beams < 1 || beams > self.geometry.n_tx {
                return Err(HarnessError::config(format!(
                    "beam count {beams} outside [1, {}]",
                    self.geometry.n_tx
                )));
            }
        }
        if self.methods.contains(&Method::Dbs)
            && matches!(self.architecture, Architecture::Antenna)
        {
            return Err(HarnessError::config(
                "dbs scores beams; set architecture to beamspace",
            ));
        }

        match &self.sweep {
            Sweep::Snr(points) => {
                if points.iter().any(|s| !s.is_finite()) {
                    return Err(HarnessError::config("snr points must be finite dB values"));
                }
                self.require_fixed_k()?;
            }
            Sweep::K(ks) | Sweep::Ee(ks) => {
                for &k in ks {
                    self.check_tx_k(k)?;
                }
            }
            Sweep::Pareto(grid) => {
                if grid.iter().any(|w| !w.is_finite() || *w < 0.0 || *w > 1.0) {
                    return Err(HarnessError::config("pareto weights must lie in [0, 1]"));
                }
                let lo = grid.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if lo != 0.0 || hi != 1.0 {
                    return Err(HarnessError::config(
                        "pareto grid must cover [0, 1] including both endpoints",
                    ));
                }
                if self.k_rx_comm.is_some() || self.k_rx_sense.is_some() {
                    return Err(HarnessError::config(
                        "pareto sweeps run without receive selection; drop k_rx_comm/k_rx_sense",
                    ));
                }
                self.require_fixed_k()?;
            }
        }

        // Weight sanity for every non-pareto point; pareto rebuilds weights.
        if !matches!(self.sweep, Sweep::Pareto(_)) {
            self.link.params()?;
        } else {
            self.link.params_at_weight(0.5)?;
        }

        let (k_rc, k_rs) = self.rx_sizes();
        if k_rc < 1 || k_rc > self.geometry.n_rx_comm {
            return Err(HarnessError::config(format!(
                "k_rx_comm {k_rc} outside [1, {}]",
                self.geometry.n_rx_comm
            )));
        }
        if k_rs < 1 || k_rs > self.geometry.n_rx_sense {
            return Err(HarnessError::config(format!(
                "k_rx_sense {k_rs} outside [1, {}]",
                self.geometry.n_rx_sense
            )));
        }

        // Fail the subset count before any trial runs, not inside the pool.
        if self.methods.contains(&Method::Exhaustive) {
            for k in self.sweep.k_values(self.k) {
                let needed = binomial(universe, k);
                if needed > EXHAUSTIVE_CAP {
                    return Err(HarnessError::Core(isac_select::Error::Capacity {
                        needed,
                        cap: EXHAUSTIVE_CAP,
                    }));
                }
            }
        }
        Ok(())
    }

    fn require_fixed_k(&self) -> Result<()> {
        match self.k {
            Some(k) => self.check_tx_k(k),
            None => Err(HarnessError::config(
                "k (kept transmit chains) is required when the sweep does not vary it",
            )),
        }
    }

    fn check_tx_k(&self, k: usize) -> Result<()> {
        let universe = self.universe();
        if k < 1 || k > universe {
            return Err(HarnessError::config(format!("k {k} outside [1, {universe}]")));
        }
        Ok(())
    }
}
