//! Temporal-average moving target indication.
//!
//! Each frame has the mean of the previous `K` frames subtracted from it:
//!
//! `H'[m] = H[m] - (1/K) Σ_{k=1..K} H[m-k]`
//!
//! Static paths cancel exactly. A dynamic path whose phase advances by `ΔΦ`
//! per frame leaves a residue in the average term scaled by
//! [`mti_attenuation`], which is small for large `K` except near
//! `ΔΦ ≡ 0 (mod 2π)`. With `K = 1` this reduces to conventional two-pulse
//! differencing.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scenario::CsiFrame;

/// Sliding-window state for one CSI stream.
#[derive(Debug, Clone)]
pub struct MtiState {
    window: usize,
    buffer: VecDeque<DMatrix<Complex64>>,
    sum: Option<DMatrix<Complex64>>,
    since_recompute: usize,
}

impl MtiState {
    /// `window = 0` disables filtering: frames pass through unchanged.
    pub fn new(window: usize) -> Self {
        Self {
            window,
            buffer: VecDeque::with_capacity(window + 1),
            sum: None,
            since_recompute: 0,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn buffered(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_ready(&self) -> bool {
        self.buffer.len() == self.window
    }

    /// Mean of the buffered frames, if the window is full.
    pub fn average(&self) -> Option<DMatrix<Complex64>> {
        match &self.sum {
            Some(s) if self.is_ready() && self.window > 0 => Some(s / Complex64::from(self.window as f64)),
            _ => None,
        }
    }

    /// Filters `frame` and advances the window.
    ///
    /// Returns `Ok(None)` during warm-up: the first `K` frames only fill the
    /// buffer and are not emitted.
    pub fn filter(&mut self, frame: &CsiFrame) -> Result<Option<CsiFrame>> {
        if self.window == 0 {
            return Ok(Some(frame.clone()));
        }
        if let Some(first) = self.buffer.front() {
            if first.shape() != frame.data.shape() {
                return Err(Error::DimensionMismatch {
                    expected: format!("{:?}", first.shape()),
                    actual: format!("{:?}", frame.data.shape()),
                });
            }
        }
        let out = self.average().map(|avg| CsiFrame {
            data: &frame.data - avg,
            ..frame.clone()
        });

        let sum = self
            .sum
            .get_or_insert_with(|| DMatrix::zeros(frame.data.nrows(), frame.data.ncols()));
        if self.buffer.len() == self.window {
            let oldest = self.buffer.pop_front().expect("full buffer");
            *sum -= oldest;
        }
        *sum += &frame.data;
        self.buffer.push_back(frame.data.clone());

        // Bound floating-point drift of the running sum.
        self.since_recompute += 1;
        if self.since_recompute >= 10 * self.window {
            let mut exact = DMatrix::zeros(frame.data.nrows(), frame.data.ncols());
            for b in &self.buffer {
                exact += b;
            }
            *sum = exact;
            self.since_recompute = 0;
        }
        Ok(out)
    }
}

/// Convenience wrapper around [`MtiState::filter`].
pub fn mti_filter(frame: &CsiFrame, state: &mut MtiState) -> Result<Option<CsiFrame>> {
    state.filter(frame)
}

/// Magnitude ratio of the averaged term for a unit dynamic path:
/// `|sin(KΔΦ/2)| / (K |sin(ΔΦ/2)|)`, with the limit value 1 where the
/// denominator vanishes.
pub fn mti_attenuation(window: usize, phase_step: f64) -> f64 {
    assert!(window >= 1, "MTI window must be >= 1");
    let k = window as f64;
    let den = k * (0.5 * phase_step).sin().abs();
    if den == 0.0 {
        return 1.0;
    }
    ((0.5 * k * phase_step).sin().abs() / den).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn frame_from(index: usize, values: &[Complex64], rows: usize) -> CsiFrame {
        let cols = values.len() / rows;
        CsiFrame {
            index,
            timestamp: index as f64,
            data: DMatrix::from_row_slice(rows, cols, values),
        }
    }

    fn rotating(index: usize, step: f64, base: &DMatrix<Complex64>) -> CsiFrame {
        CsiFrame {
            index,
            timestamp: index as f64,
            data: base * Complex64::from_polar(1.0, step * index as f64),
        }
    }

    fn base() -> DMatrix<Complex64> {
        DMatrix::from_fn(2, 3, |r, c| Complex64::new(1.0 + r as f64, 0.5 * c as f64 - 0.3))
    }

    #[test]
    fn warm_up_frames_are_consumed() {
        let mut st = MtiState::new(3);
        for m in 0..3 {
            assert!(st.filter(&rotating(m, 0.0, &base())).unwrap().is_none());
        }
        assert!(st.filter(&rotating(3, 0.0, &base())).unwrap().is_some());
        assert_eq!(st.buffered(), 3);
    }

    #[test]
    fn static_channel_cancels() {
        let mut st = MtiState::new(50);
        let b = base();
        for m in 0..200 {
            if let Some(out) = st.filter(&rotating(m, 0.0, &b)).unwrap() {
                assert!(out.data.norm() < 1e-13 * b.norm());
            }
        }
    }

    #[test]
    fn unit_window_is_frame_difference() {
        let mut st = MtiState::new(1);
        let b = base();
        let f0 = rotating(0, 0.7, &b);
        let f1 = rotating(1, 0.7, &b);
        st.filter(&f0).unwrap();
        let out = st.filter(&f1).unwrap().unwrap();
        assert!((out.data - (&f1.data - &f0.data)).norm() < 1e-14);
    }

    #[test]
    fn full_cycle_average_vanishes() {
        let k = 50;
        let step = TAU / k as f64;
        let b = base();
        let mut st = MtiState::new(k);
        let mut last = None;
        for m in 0..(k + 5) {
            last = st.filter(&rotating(m, step, &b)).unwrap().or(last);
        }
        let out = last.unwrap();
        let expected = rotating(k + 4, step, &b);
        assert!((out.data - expected.data).norm() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut st = MtiState::new(2);
        st.filter(&rotating(0, 0.0, &base())).unwrap();
        let other = frame_from(1, &[Complex64::new(1.0, 0.0); 4], 2);
        assert!(st.filter(&other).is_err());
    }

    #[test]
    fn zero_window_passes_through() {
        let mut st = MtiState::new(0);
        let f = rotating(4, 0.2, &base());
        assert_eq!(st.filter(&f).unwrap().unwrap(), f);
    }

    #[test]
    fn attenuation_values() {
        assert_eq!(mti_attenuation(50, 0.0), 1.0);
        assert!(mti_attenuation(50, TAU / 50.0) < 1e-14);
        // Direct summation oracle: |Σ_{k=1..50} e^{-jk·0.05}| / 50.
        let direct = (1..=50)
            .map(|k| Complex64::from_polar(1.0, -0.05 * k as f64))
            .sum::<Complex64>()
            .norm()
            / 50.0;
        assert!((direct - 0.759_3).abs() < 5e-5, "{direct}");
        assert!((mti_attenuation(50, 0.05) - direct).abs() < 1e-14);
    }

    #[test]
    fn running_sum_survives_recomputation() {
        let k = 4;
        let b = base();
        let mut st = MtiState::new(k);
        for m in 0..(25 * k) {
            let f = rotating(m, 0.37, &b);
            if let Some(out) = st.filter(&f).unwrap() {
                let avg: DMatrix<Complex64> = (1..=k)
                    .map(|j| rotating(m - j, 0.37, &b).data)
                    .fold(DMatrix::zeros(2, 3), |a, x| a + x)
                    / Complex64::from(k as f64);
                assert!((out.data - (f.data - avg)).norm() < 1e-12);
            }
        }
    }
}
