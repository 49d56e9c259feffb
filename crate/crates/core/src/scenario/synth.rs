//! CSI frame synthesis and additive measurement noise.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::ScenarioConfig;
use super::paths::PropagationPath;

/// One P×N CSI observation at RS time index `index`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiFrame {
    pub index: usize,
    pub timestamp: f64,
    /// Rows are antennas, columns are RS subcarriers.
    pub data: DMatrix<Complex64>,
}

impl CsiFrame {
    pub fn zeros(index: usize, timestamp: f64, antennas: usize, subcarriers: usize) -> Self {
        Self {
            index,
            timestamp,
            data: DMatrix::zeros(antennas, subcarriers),
        }
    }

    pub fn antennas(&self) -> usize {
        self.data.nrows()
    }

    pub fn subcarriers(&self) -> usize {
        self.data.ncols()
    }

    pub fn power(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.data.len() as f64
    }
}

/// Receive-array phase progression for a global AoA:
/// `a[p] = exp(j 2π p (d/λ) sin(φ - normal))`.
pub fn array_response(cfg: &ScenarioConfig, aoa_global: f64) -> Vec<Complex64> {
    let step = TAU * cfg.antenna_spacing_wavelengths * (aoa_global - cfg.rx_array_normal()).sin();
    (0..cfg.antenna_count)
        .map(|p| Complex64::from_polar(1.0, step * p as f64))
        .collect()
}

/// RS subcarrier phase progression for a delay: `exp(-j 2π n δ_f Δf τ)`.
pub fn delay_response(cfg: &ScenarioConfig, delay: f64) -> Vec<Complex64> {
    let step = -TAU * cfg.rs_frequency_step() * delay;
    (0..cfg.rs_subcarrier_count)
        .map(|n| Complex64::from_polar(1.0, step * n as f64))
        .collect()
}

/// Evaluates the multipath channel model at RS time index `m`:
///
/// `H_p[m,n] = Σ_l a_l[p] b_l exp(-j2π n δ_f Δf τ_l) exp(j2π m δ_t T f_D,l)`.
pub fn synthesize_frame(paths: &[PropagationPath], m: usize, cfg: &ScenarioConfig) -> CsiFrame {
    assert!(!paths.is_empty(), "synthesize_frame needs at least one path");
    let t = cfg.frame_time(m);
    let mut frame = CsiFrame::zeros(m, t, cfg.antenna_count, cfg.rs_subcarrier_count);
    for path in paths {
        let a = array_response(cfg, path.aoa);
        let g = delay_response(cfg, path.delay);
        let slow = path.gain * Complex64::from_polar(1.0, TAU * t * path.doppler);
        for (p, ap) in a.iter().enumerate() {
            let row_scale = ap * slow;
            for (n, gn) in g.iter().enumerate() {
                frame.data[(p, n)] += row_scale * gn;
            }
        }
    }
    frame
}

/// Seeded source of circularly-symmetric complex Gaussian noise.
///
/// A single instance is the run's one noise stream; frames must be passed
/// through it in index order for reproducible output.
#[derive(Debug, Clone)]
pub struct NoiseSource {
    rng: ChaCha8Rng,
    reference_power: f64,
}

impl NoiseSource {
    pub fn new(seed: u64, reference_power: f64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            reference_power,
        }
    }

    /// Adds noise so that mean signal power over noise power equals
    /// `10^(snr_db/10)`. An all-zero frame uses the reference power as its
    /// signal power. `snr_db = +inf` returns the frame unchanged.
    pub fn add_noise(&mut self, frame: &CsiFrame, snr_db: f64) -> CsiFrame {
        if snr_db == f64::INFINITY {
            return frame.clone();
        }
        let signal = match frame.power() {
            p if p > 0.0 => p,
            _ => self.reference_power,
        };
        let sigma = (signal / 10f64.powf(snr_db / 10.0) / 2.0).sqrt();
        let mut out = frame.clone();
        for z in out.data.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut self.rng);
            let im: f64 = StandardNormal.sample(&mut self.rng);
            *z += Complex64::new(sigma * re, sigma * im);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::paths::PathKind;

    fn small_cfg() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::prototype_grid();
        cfg.antenna_count = 4;
        cfg.rs_subcarrier_count = 8;
        cfg.rx_array_normal_deg = 0.0;
        cfg
    }

    fn path(delay: f64, aoa: f64, doppler: f64, gain: Complex64) -> PropagationPath {
        PropagationPath {
            delay,
            aoa,
            doppler,
            gain,
            kind: PathKind::Clutter(0),
        }
    }

    #[test]
    fn identity_path_gives_all_ones() {
        let cfg = small_cfg();
        let f = synthesize_frame(&[path(0.0, 0.0, 0.0, Complex64::new(1.0, 0.0))], 3, &cfg);
        for z in f.data.iter() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn unit_delay_bin_ramps_by_two_pi_over_n() {
        let cfg = small_cfg();
        let n = cfg.rs_subcarrier_count as f64;
        let tau = 1.0 / (n * cfg.rs_frequency_step());
        let f = synthesize_frame(&[path(tau, 0.0, 0.0, Complex64::new(1.0, 0.0))], 0, &cfg);
        for k in 1..cfg.rs_subcarrier_count {
            let step = (f.data[(0, k)] / f.data[(0, k - 1)]).arg();
            assert!((step + TAU / n).abs() < 1e-12, "{step}");
        }
    }

    #[test]
    fn frames_are_linear_in_paths() {
        let cfg = small_cfg();
        let p1 = path(12e-9, 0.3, 40.0, Complex64::new(0.5, -0.2));
        let p2 = path(30e-9, -0.7, -15.0, Complex64::new(0.1, 0.4));
        let both = synthesize_frame(&[p1, p2], 17, &cfg);
        let sum = synthesize_frame(&[p1], 17, &cfg).data + synthesize_frame(&[p2], 17, &cfg).data;
        assert!((both.data - sum).norm() < 1e-13);
    }

    #[test]
    fn frobenius_norm_equals_gain_times_sqrt_pn() {
        let cfg = small_cfg();
        let b = Complex64::new(0.3, 0.4);
        let f = synthesize_frame(&[path(21e-9, 0.4, 9.0, b)], 5, &cfg);
        let expected = b.norm() * ((cfg.antenna_count * cfg.rs_subcarrier_count) as f64).sqrt();
        assert!((f.data.norm() - expected).abs() < 1e-12);
    }

    #[test]
    fn static_path_is_time_invariant() {
        let cfg = small_cfg();
        let p = path(17e-9, 0.2, 0.0, Complex64::new(0.7, 0.1));
        let a = synthesize_frame(&[p], 0, &cfg);
        let b = synthesize_frame(&[p], 991, &cfg);
        assert_eq!(a.data, b.data);
    }

    #[test]
    fn mirrored_aoa_gives_identical_frame() {
        let cfg = small_cfg();
        let phi = 0.4;
        let a = synthesize_frame(&[path(5e-9, phi, 0.0, Complex64::new(1.0, 0.0))], 0, &cfg);
        let b = synthesize_frame(&[path(5e-9, std::f64::consts::PI - phi, 0.0, Complex64::new(1.0, 0.0))], 0, &cfg);
        assert!((a.data - b.data).norm() < 1e-12);
    }

    #[test]
    fn infinite_snr_is_identity() {
        let cfg = small_cfg();
        let f = synthesize_frame(&[path(5e-9, 0.1, 0.0, Complex64::new(1.0, 0.0))], 0, &cfg);
        let mut noise = NoiseSource::new(1, 1.0);
        assert_eq!(noise.add_noise(&f, f64::INFINITY), f);
    }

    #[test]
    fn zero_frame_uses_reference_power() {
        let mut noise = NoiseSource::new(9, 2.0);
        let zero = CsiFrame::zeros(0, 0.0, 32, 64);
        let noisy = noise.add_noise(&zero, 0.0);
        // 2048 samples of CN(0, 2): sample power within ~10%.
        assert!((noisy.power() - 2.0).abs() < 0.2, "{}", noisy.power());
    }

    #[test]
    fn noise_matches_requested_snr() {
        let cfg = small_cfg();
        let f = synthesize_frame(&[path(5e-9, 0.1, 0.0, Complex64::new(1.0, 0.0))], 0, &cfg);
        let mut noise = NoiseSource::new(3, 1.0);
        let mut acc = 0.0;
        for _ in 0..200 {
            let n = noise.add_noise(&f, 10.0);
            acc += CsiFrame { data: n.data - &f.data, ..f.clone() }.power();
        }
        let measured = acc / 200.0;
        assert!((measured - 0.1).abs() < 0.005, "{measured}");
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let f = CsiFrame::zeros(0, 0.0, 4, 8);
        let a = NoiseSource::new(42, 1.0).add_noise(&f, 5.0);
        let b = NoiseSource::new(42, 1.0).add_noise(&f, 5.0);
        assert_eq!(a, b);
    }
}
