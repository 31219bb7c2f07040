//! Random channel realizations: the downlink communication channel, the
//! target-response matrix seen by the sensing receivers, and the per-receiver
//! transmit-side covariances that drive sensing mutual information.
//!
//! A scene is one Monte-Carlo draw. Path and target angles are uniform over a
//! configurable angular sector, communication path gains are CN(0,1), and
//! target reflections follow a Swerling-I model: complex normal gains with
//! per-target reflection power, plus deterministic distance-based path loss
//! between each target and each sensing antenna.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::select::SelectionSet;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Array sizes and propagation constants for scene generation.
///
/// `n_rx_sense` doubles as the number of targets: each widely separated
/// sensing antenna listens for one target echo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub n_tx: usize,
    pub n_rx_comm: usize,
    pub n_rx_sense: usize,
    pub n_paths: usize,
    /// Angle interval (radians) for all departure/arrival draws.
    #[serde(default = "default_sector")]
    pub angular_sector: (f64, f64),
    /// Carrier wavelength in meters.
    #[serde(default = "default_wavelength")]
    pub wavelength: f64,
    #[serde(default = "default_pathloss_exponent")]
    pub pathloss_exponent: f64,
    /// Distances in meters, `[sensing antenna][target]`; when absent each
    /// scene draws them uniformly from `distance_range`.
    #[serde(default)]
    pub target_distances: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_distance_range")]
    pub distance_range: (f64, f64),
    /// Per-target reflection power; defaults to 1 for every target.
    #[serde(default)]
    pub reflection_powers: Option<Vec<f64>>,
}

fn default_sector() -> (f64, f64) {
    (-PI / 3.0, PI / 3.0)
}

fn default_wavelength() -> f64 {
    0.1
}

fn default_pathloss_exponent() -> f64 {
    2.0
}

fn default_distance_range() -> (f64, f64) {
    (50.0, 200.0)
}

impl GeometryConfig {
    /// Counts with default propagation constants.
    pub fn new(n_tx: usize, n_rx_comm: usize, n_rx_sense: usize, n_paths: usize) -> Self {
        GeometryConfig {
            n_tx,
            n_rx_comm,
            n_rx_sense,
            n_paths,
            angular_sector: default_sector(),
            wavelength: default_wavelength(),
            pathloss_exponent: default_pathloss_exponent(),
            target_distances: None,
            distance_range: default_distance_range(),
            reflection_powers: None,
        }
    }

    // Guards use negated comparisons so NaN inputs fail validation too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.n_tx < 1 || self.n_rx_comm < 1 || self.n_rx_sense < 1 || self.n_paths < 1 {
            return Err(Error::model("geometry: all counts must be at least 1"));
        }
        let (lo, hi) = self.angular_sector;
        if !(lo < hi && lo > -PI / 2.0 && hi < PI / 2.0) {
            return Err(Error::model(format!(
                "geometry: angular sector [{lo}, {hi}] must sit strictly inside (-pi/2, pi/2)"
            )));
        }
        if !(self.wavelength > 0.0) {
            return Err(Error::model("geometry: wavelength must be positive"));
        }
        if !(self.pathloss_exponent >= 0.0) {
            return Err(Error::model("geometry: path-loss exponent must be nonnegative"));
        }
        let (dlo, dhi) = self.distance_range;
        if !(dlo > 0.0 && dhi >= dlo) {
            return Err(Error::model("geometry: distance range must be positive and ordered"));
        }
        if let Some(d) = &self.target_distances {
            let ns = self.n_rx_sense;
            if d.len() != ns || d.iter().any(|row| row.len() != ns) {
                return Err(Error::model(format!(
                    "geometry: target_distances must be an {ns}x{ns} grid"
                )));
            }
            if d.iter().flatten().any(|&v| !(v > 0.0)) {
                return Err(Error::model("geometry: target distances must be positive"));
            }
        }
        if let Some(p) = &self.reflection_powers {
            if p.len() != self.n_rx_sense {
                return Err(Error::model(format!(
                    "geometry: reflection_powers must list {} targets",
                    self.n_rx_sense
                )));
            }
            if p.iter().any(|&v| !(v > 0.0)) {
                return Err(Error::model("geometry: reflection powers must be positive"));
            }
        }
        Ok(())
    }

    fn reflection_power(&self, target: usize) -> f64 {
        self.reflection_powers.as_ref().map_or(1.0, |p| p[target])
    }
}

/// The random primitives behind one scene, separated out so tests and
/// synthetic constructions can pin them exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneDraws {
    pub aod_comm: Vec<f64>,
    pub aoa_comm: Vec<f64>,
    pub coeff_comm: Vec<Complex64>,
    pub aod_sense: Vec<f64>,
    pub coeff_sense: Vec<Complex64>,
    /// Meters, `[sensing antenna][target]`.
    pub distances: Vec<Vec<f64>>,
}

/// One channel realization with its precomputed sensing covariances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    /// Communication channel, receive antennas by transmit antennas.
    pub h_c: CMatrix,
    /// Target responses, sensing antennas by transmit antennas.
    pub h_s: CMatrix,
    /// Per-sensing-antenna covariance of the matched transmit column,
    /// assembled from all target steering outer products.
    pub r_t: Vec<CMatrix>,
    pub aod_comm: Vec<f64>,
    pub aoa_comm: Vec<f64>,
    pub aod_sense: Vec<f64>,
    #[serde(with = "complex_pairs")]
    pub coeff_comm: Vec<Complex64>,
    #[serde(with = "complex_pairs")]
    pub coeff_sense: Vec<Complex64>,
    /// `kappa[n][i]`: weight of target i's steering outer product in `r_t[n]`.
    pub kappa: Vec<Vec<f64>>,
}

impl Scene {
    pub fn n_tx(&self) -> usize {
        self.h_c.cols()
    }

    pub fn n_rx_comm(&self) -> usize {
        self.h_c.rows()
    }

    pub fn n_rx_sense(&self) -> usize {
        self.r_t.len()
    }
}

/// Uniform linear array response at half-wavelength spacing: entry k is
/// exp(-j pi k sin(theta)).
pub fn steering_vector(theta: f64, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, -PI * k as f64 * theta.sin()))
        .collect()
}

/// Draws one scene. The draw order is fixed (communication departure angles,
/// arrival angles, path gains, target angles, reflection gains, distances) so
/// a given seed always produces the same scene.
pub fn generate_scene(cfg: &GeometryConfig, rng: &mut impl Rng) -> Result<Scene> {
    cfg.validate()?;
    let (lo, hi) = cfg.angular_sector;
    let angle = |rng: &mut dyn FnMut() -> f64| lo + (hi - lo) * rng();

    let mut uniform = || rng.random::<f64>();
    let aod_comm: Vec<f64> = (0..cfg.n_paths).map(|_| angle(&mut uniform)).collect();
    let aoa_comm: Vec<f64> = (0..cfg.n_paths).map(|_| angle(&mut uniform)).collect();
    let coeff_comm: Vec<Complex64> = (0..cfg.n_paths).map(|_| complex_normal(rng, 1.0)).collect();
    let mut uniform = || rng.random::<f64>();
    let aod_sense: Vec<f64> = (0..cfg.n_rx_sense).map(|_| angle(&mut uniform)).collect();
    let coeff_sense: Vec<Complex64> = (0..cfg.n_rx_sense)
        .map(|n| complex_normal(rng, cfg.reflection_power(n)))
        .collect();
    let distances = match &cfg.target_distances {
        Some(d) => d.clone(),
        None => {
            let (dlo, dhi) = cfg.distance_range;
            (0..cfg.n_rx_sense)
                .map(|_| (0..cfg.n_rx_sense).map(|_| rng.random_range(dlo..=dhi)).collect())
                .collect()
        }
    };

    assemble_scene(
        cfg,
        SceneDraws {
            aod_comm,
            aoa_comm,
            coeff_comm,
            aod_sense,
            coeff_sense,
            distances,
        },
    )
}

/// Builds the matrices for pinned draws.
pub fn assemble_scene(cfg: &GeometryConfig, draws: SceneDraws) -> Result<Scene> {
    cfg.validate()?;
    let (nt, nc, ns, l) = (cfg.n_tx, cfg.n_rx_comm, cfg.n_rx_sense, cfg.n_paths);
    if draws.aod_comm.len() != l || draws.aoa_comm.len() != l || draws.coeff_comm.len() != l {
        return Err(Error::model("scene draws: communication path arrays must have length L"));
    }
    if draws.aod_sense.len() != ns || draws.coeff_sense.len() != ns {
        return Err(Error::model("scene draws: sensing arrays must have length N_s"));
    }
    if draws.distances.len() != ns || draws.distances.iter().any(|r| r.len() != ns) {
        return Err(Error::model("scene draws: distances must be an N_s x N_s grid"));
    }

    let mut h_c = CMatrix::zeros(nc, nt);
    for path in 0..l {
        let r = steering_vector(draws.aoa_comm[path], nc);
        let t = steering_vector(draws.aod_comm[path], nt);
        let a = draws.coeff_comm[path];
        for m in 0..nc {
            for k in 0..nt {
                h_c[(m, k)] += a * r[m] * t[k].conj();
            }
        }
    }

    let rho = cfg.pathloss_exponent;
    let gain = |d: f64| Complex64::from_polar(d.powf(-rho / 2.0), -2.0 * PI * d / cfg.wavelength);

    let mut h_s = CMatrix::zeros(ns, nt);
    let sense_steering: Vec<Vec<Complex64>> = draws
        .aod_sense
        .iter()
        .map(|&th| steering_vector(th, nt))
        .collect();
    for (target, t) in sense_steering.iter().enumerate() {
        let a = draws.coeff_sense[target];
        for ant in 0..ns {
            let g = gain(draws.distances[ant][target]);
            for k in 0..nt {
                h_s[(ant, k)] += a * g * t[k].conj();
            }
        }
    }

    let mut kappa = vec![vec![0.0; ns]; ns];
    let mut r_t = Vec::with_capacity(ns);
    for (ant, kappa_row) in kappa.iter_mut().enumerate() {
        let mut cov = CMatrix::zeros(nt, nt);
        for target in 0..ns {
            let k_ni = cfg.reflection_power(target) * draws.distances[ant][target].powf(-rho);
            kappa_row[target] = k_ni;
            cov.add_scaled_outer(&sense_steering[target], k_ni);
        }
        r_t.push(cov);
    }

    Ok(Scene {
        h_c,
        h_s,
        r_t,
        aod_comm: draws.aod_comm,
        aoa_comm: draws.aoa_comm,
        aod_sense: draws.aod_sense,
        coeff_comm: draws.coeff_comm,
        coeff_sense: draws.coeff_sense,
        kappa,
    })
}

/// Applies the selection matrix on the right: keeps the chosen columns.
pub fn subselect_columns(m: &CMatrix, sel: &SelectionSet) -> Result<CMatrix> {
    if sel.universe_size() != m.cols() || sel.indices().last().is_some_and(|&i| i > m.cols()) {
        return Err(Error::model(format!(
            "subselect_columns: selection over universe {} against {} columns",
            sel.universe_size(),
            m.cols()
        )));
    }
    Ok(m.select_columns(&sel.zero_based()))
}

/// Keeps the chosen rows; the receive-side counterpart of
/// [`subselect_columns`].
pub fn subselect_rows(m: &CMatrix, sel: &SelectionSet) -> Result<CMatrix> {
    if sel.universe_size() != m.rows() || sel.indices().last().is_some_and(|&i| i > m.rows()) {
        return Err(Error::model(format!(
            "subselect_rows: selection over universe {} against {} rows",
            sel.universe_size(),
            m.rows()
        )));
    }
    Ok(m.select_rows(&sel.zero_based()))
}

/// Row-and-column subselection `S^H R S` for covariance matrices.
pub fn subselect_rowcols(m: &CMatrix, sel: &SelectionSet) -> Result<CMatrix> {
    let idx = sel.zero_based();
    if sel.universe_size() != m.cols() || idx.last().is_some_and(|&i| i >= m.cols()) {
        return Err(Error::model(format!(
            "subselect_rowcols: selection over universe {} against a {}x{} matrix",
            sel.universe_size(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.select_rows(&idx).select_columns(&idx))
}

fn complex_normal(rng: &mut impl Rng, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// Serializes complex vectors as `[re, im]` pairs, matching the matrix format.
mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?
            .into_iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect())
    }
}
