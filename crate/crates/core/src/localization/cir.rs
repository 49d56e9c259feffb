//! Channel impulse response and CIR-guided delay pruning.

use rustfft::FftPlanner;
use num_complex::Complex64;

use crate::scenario::CsiFrame;

/// Delay-power profile, noncoherently summed over antennas and snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct CirProfile {
    pub power: Vec<f64>,
    /// Delay spanned by one bin, `1/(N_ifft·δ_f·Δf)` (s).
    pub bin_delay: f64,
}

impl CirProfile {
    pub fn n_ifft(&self) -> usize {
        self.power.len()
    }

    pub fn delay_of(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_delay
    }
}

/// Inclusive range of delay bins searched by MUSIC.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayWindow {
    pub start: usize,
    pub end: usize,
}

impl DelayWindow {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, bin: usize) -> bool {
        bin >= self.start && bin <= self.end
    }

    pub fn bins(&self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

/// `Q_p[m,u] = (1/N) Σ_n H'_p[m,n] exp(j2π n u / N_ifft)` and
/// `profile[u] = Σ_{p,m} |Q_p[m,u]|²`.
pub fn compute_cir(frames: &[CsiFrame], n_ifft: usize, rs_frequency_step: f64) -> CirProfile {
    let mut power = vec![0.0; n_ifft];
    if let Some(first) = frames.first() {
        let n = first.subcarriers();
        assert!(n_ifft >= n, "N_ifft must be >= N");
        let fft = FftPlanner::<f64>::new().plan_fft_inverse(n_ifft);
        let mut buf = vec![Complex64::new(0.0, 0.0); n_ifft];
        let scale = 1.0 / (n as f64 * n as f64);
        for f in frames {
            for p in 0..f.antennas() {
                buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                for (k, z) in f.data.row(p).iter().enumerate() {
                    buf[k] = *z;
                }
                fft.process(&mut buf);
                for (acc, z) in power.iter_mut().zip(&buf) {
                    *acc += z.norm_sqr() * scale;
                }
            }
        }
    }
    CirProfile {
        power,
        bin_delay: 1.0 / (n_ifft as f64 * rs_frequency_step),
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Finds CIR local maxima more than `threshold_db` above the median bin
/// power, expands each by `±guard_bins` and merges windows that overlap or
/// touch. Plateaus report their first bin.
pub fn detect_cir_peaks(profile: &CirProfile, guard_bins: usize, threshold_db: f64) -> Vec<DelayWindow> {
    let p = &profile.power;
    let n = p.len();
    if n == 0 {
        return Vec::new();
    }
    let level = median(p) * 10f64.powf(threshold_db / 10.0);
    let mut windows: Vec<DelayWindow> = Vec::new();
    for u in 0..n {
        let left_ok = u == 0 || p[u] > p[u - 1];
        let right_ok = u + 1 == n || p[u] >= p[u + 1];
        if p[u] > 0.0 && p[u] > level && left_ok && right_ok {
            let w = DelayWindow {
                start: u.saturating_sub(guard_bins),
                end: (u + guard_bins).min(n - 1),
            };
            match windows.last_mut() {
                Some(last) if w.start <= last.end + 1 => last.end = last.end.max(w.end),
                _ => windows.push(w),
            }
        }
    }
    windows
}
