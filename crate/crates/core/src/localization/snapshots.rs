//! Snapshot stacking and sample covariance.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scenario::CsiFrame;

/// `T_s` vectorized snapshots stored as the columns of a `P·N × T_s` matrix.
///
/// Vectorization is antenna-major: `x[p·N + n] = H[p, n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotBlock {
    pub snapshots: DMatrix<Complex64>,
    pub frame_indices: Vec<usize>,
}

impl SnapshotBlock {
    pub fn len(&self) -> usize {
        self.snapshots.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.ncols() == 0
    }

    pub fn dim(&self) -> usize {
        self.snapshots.nrows()
    }
}

pub fn stack_snapshots(frames: &[CsiFrame]) -> Result<SnapshotBlock> {
    let first = frames.first().ok_or_else(|| Error::DimensionMismatch {
        expected: "at least one frame".into(),
        actual: "0 frames".into(),
    })?;
    let (p, n) = first.data.shape();
    let mut snapshots = DMatrix::zeros(p * n, frames.len());
    for (t, f) in frames.iter().enumerate() {
        if f.data.shape() != (p, n) {
            return Err(Error::DimensionMismatch {
                expected: format!("{p}x{n}"),
                actual: format!("{}x{}", f.data.nrows(), f.data.ncols()),
            });
        }
        for pi in 0..p {
            for ni in 0..n {
                snapshots[(pi * n + ni, t)] = f.data[(pi, ni)];
            }
        }
    }
    Ok(SnapshotBlock {
        snapshots,
        frame_indices: frames.iter().map(|f| f.index).collect(),
    })
}

/// `R = (1/T_s) Σ_t x_t x_tᴴ`, symmetrized to be exactly Hermitian.
pub fn estimate_covariance(block: &SnapshotBlock) -> DMatrix<Complex64> {
    let x = &block.snapshots;
    let r = x * x.adjoint() / Complex64::from(block.len() as f64);
    (&r + r.adjoint()) * Complex64::from(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(index: usize, base: f64) -> CsiFrame {
        CsiFrame {
            index,
            timestamp: 0.0,
            data: DMatrix::from_fn(2, 3, |p, n| Complex64::new(base + (p * 3 + n) as f64, -(n as f64))),
        }
    }

    #[test]
    fn antenna_major_layout() {
        let b = stack_snapshots(&[frame(0, 0.0)]).unwrap();
        assert_eq!(b.len(), 1);
        for i in 0..6 {
            assert_eq!(b.snapshots[(i, 0)].re, i as f64);
        }
        assert_eq!(b.snapshots[(4, 0)].im, -1.0);
    }

    #[test]
    fn order_is_preserved() {
        let b = stack_snapshots(&[frame(5, 10.0), frame(2, 20.0)]).unwrap();
        assert_eq!(b.frame_indices, vec![5, 2]);
        assert_eq!(b.snapshots[(0, 0)].re, 10.0);
        assert_eq!(b.snapshots[(0, 1)].re, 20.0);
    }

    #[test]
    fn mismatched_frames_rejected() {
        let odd = CsiFrame {
            index: 1,
            timestamp: 0.0,
            data: DMatrix::zeros(3, 2),
        };
        assert!(stack_snapshots(&[frame(0, 0.0), odd]).is_err());
        assert!(stack_snapshots(&[]).is_err());
    }

    #[test]
    fn single_snapshot_is_rank_one_outer_product() {
        let b = stack_snapshots(&[frame(0, 1.0)]).unwrap();
        let x = b.snapshots.column(0).into_owned();
        let r = estimate_covariance(&b);
        assert!((r - &x * x.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn scaled_orthonormal_basis_gives_identity() {
        let d = 6;
        let scale = (d as f64).sqrt();
        let snapshots = DMatrix::from_fn(d, d, |i, j| if i == j { Complex64::from(scale) } else { Complex64::from(0.0) });
        let b = SnapshotBlock {
            snapshots,
            frame_indices: (0..d).collect(),
        };
        let r = estimate_covariance(&b);
        assert!((r - DMatrix::<Complex64>::identity(d, d)).norm() < 1e-12);
    }
}
