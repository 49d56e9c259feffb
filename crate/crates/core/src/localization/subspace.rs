//! Signal/noise subspace decomposition and model-order selection.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::snapshots::SnapshotBlock;
use crate::error::{Error, Result};

/// Eigenvalues below `ZERO_FLOOR · trace` are treated as structural zeros.
pub const ZERO_FLOOR: f64 = 1e-15;

/// Eigen-split of a covariance into signal and noise subspaces.
///
/// Built either from a full Hermitian eigendecomposition of `R`
/// ([`split_subspace`]) or from the snapshot Gram matrix
/// ([`split_snapshots`]), which is exact for the rank-deficient
/// covariances produced by `T_s < P·N` snapshots. In the latter case the
/// noise subspace is represented implicitly as the orthogonal complement of
/// the signal subspace.
#[derive(Debug, Clone)]
pub struct SubspaceSplit {
    eigenvalues: Vec<f64>,
    signal: DMatrix<Complex64>,
    noise: Option<DMatrix<Complex64>>,
}

impl SubspaceSplit {
    /// All `P·N` eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Estimated number of sources `L̂`.
    pub fn source_count(&self) -> usize {
        self.signal.ncols()
    }

    pub fn dim(&self) -> usize {
        self.signal.nrows()
    }

    /// `E_s`, orthonormal `P·N × L̂`.
    pub fn signal_subspace(&self) -> &DMatrix<Complex64> {
        &self.signal
    }

    /// `E_n` if it was computed explicitly.
    pub fn explicit_noise_subspace(&self) -> Option<&DMatrix<Complex64>> {
        self.noise.as_ref()
    }

    /// `E_n` (`P·N × (P·N − L̂)`), materialized from the complement of
    /// `E_s` when the split came from the snapshot route.
    pub fn noise_subspace(&self) -> DMatrix<Complex64> {
        if let Some(n) = &self.noise {
            return n.clone();
        }
        let d = self.dim();
        let proj = DMatrix::<Complex64>::identity(d, d) - &self.signal * self.signal.adjoint();
        let proj = (&proj + proj.adjoint()) * Complex64::from(0.5);
        let eig = SymmetricEigen::new(proj);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let keep = d - self.source_count();
        DMatrix::from_columns(&order[..keep].iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>())
    }

    /// `‖E_nᴴ s‖²`, the MUSIC denominator for a candidate steering vector.
    pub fn noise_power(&self, s: &DVector<Complex64>) -> f64 {
        match &self.noise {
            Some(n) => (n.adjoint() * s).norm_squared(),
            None => (s.norm_squared() - (self.signal.adjoint() * s).norm_squared()).max(0.0),
        }
    }
}

/// Picks `L̂` by the largest ratio `λ_k/λ_{k+1}` over `k ≤ max_sources`,
/// counting only eigenvalues that exceed ten times the noise floor.
///
/// `rank_hint` bounds how many leading eigenvalues can be nonzero (the
/// snapshot count when `T_s < P·N`); the floor is the smallest of those,
/// clamped to `ZERO_FLOOR · trace`. Returns `None` when no eigenvalue stands
/// above the floor.
pub fn estimate_source_count(eigenvalues: &[f64], rank_hint: usize, max_sources: usize) -> Option<usize> {
    let trace: f64 = eigenvalues.iter().sum();
    if !(trace.is_finite() && trace > 0.0) || eigenvalues.len() < 2 {
        return None;
    }
    let eps = ZERO_FLOOR * trace;
    let lam: Vec<f64> = eigenvalues.iter().map(|&l| l.max(eps)).collect();
    let considered = rank_hint.clamp(1, lam.len());
    let floor = lam[..considered].iter().copied().fold(f64::INFINITY, f64::min);
    let kmax = max_sources.min(lam.len() - 1);
    let mut best: Option<(usize, f64)> = None;
    for k in 1..=kmax {
        if lam[k - 1] <= 10.0 * floor {
            break;
        }
        let ratio = lam[k - 1] / lam[k];
        if best.is_none_or(|(_, r)| ratio > r) {
            best = Some((k, ratio));
        }
    }
    best.map(|(k, _)| k)
}

fn check_trace(eigenvalues: &[f64]) -> Result<()> {
    let trace: f64 = eigenvalues.iter().sum();
    if !(trace.is_finite() && trace > 0.0) || eigenvalues.iter().all(|&l| l < ZERO_FLOOR * trace) {
        return Err(Error::EmptyScene);
    }
    Ok(())
}

fn resolve_count(
    eigenvalues: &[f64],
    rank_hint: usize,
    source_count: Option<usize>,
    max_sources: usize,
) -> Result<usize> {
    check_trace(eigenvalues)?;
    let d = eigenvalues.len();
    match source_count {
        Some(l) if l >= 1 && l < d => Ok(l),
        Some(l) => Err(Error::InvalidConfig(format!("source_count {l} outside 1..{d}"))),
        None => estimate_source_count(eigenvalues, rank_hint, max_sources).ok_or(Error::EmptyScene),
    }
}

/// Full eigendecomposition route: `R = E Λ Eᴴ`, split after `L̂` columns.
pub fn split_subspace(
    r: &DMatrix<Complex64>,
    source_count: Option<usize>,
    max_sources: usize,
) -> Result<SubspaceSplit> {
    let d = r.nrows();
    if r.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: "square covariance".into(),
            actual: format!("{}x{}", r.nrows(), r.ncols()),
        });
    }
    let eig = SymmetricEigen::new(r.clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let l = resolve_count(&eigenvalues, d, source_count, max_sources)?;
    let cols = |range: &[usize]| DMatrix::from_columns(&range.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    Ok(SubspaceSplit {
        signal: cols(&order[..l]),
        noise: Some(cols(&order[l..])),
        eigenvalues,
    })
}

/// Snapshot (Gram-matrix) route.
///
/// With `X` the `P·N × T_s` snapshot matrix, the nonzero eigenvalues of
/// `R = XXᴴ/T_s` equal those of `G = XᴴX/T_s`, and each eigenvector `v`
/// of `G` maps to `u = Xv / sqrt(T_s μ)`. Cost is `O(T_s² P·N)` instead of
/// `O((P·N)³)`.
pub fn split_snapshots(
    block: &SnapshotBlock,
    source_count: Option<usize>,
    max_sources: usize,
) -> Result<SubspaceSplit> {
    let x = &block.snapshots;
    let (d, t) = x.shape();
    let ts = Complex64::from(t as f64);
    let g = x.adjoint() * x / ts;
    let g = (&g + g.adjoint()) * Complex64::from(0.5);
    let eig = SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut eigenvalues = vec![0.0; d];
    for (k, &i) in order.iter().enumerate().take(d) {
        eigenvalues[k] = eig.eigenvalues[i].max(0.0);
    }
    let l = resolve_count(&eigenvalues, t.min(d), source_count, max_sources)?;
    let eps = ZERO_FLOOR * eigenvalues.iter().sum::<f64>();
    if eigenvalues[l - 1] <= eps {
        return Err(Error::InvalidConfig(format!(
            "source_count {l} exceeds the numerical rank of the snapshot block"
        )));
    }
    let mut signal = DMatrix::<Complex64>::zeros(d, l);
    for (k, &i) in order.iter().take(l).enumerate() {
        let scale = (t as f64 * eigenvalues[k]).sqrt();
        let u = x * eig.eigenvectors.column(i) / Complex64::from(scale);
        signal.set_column(k, &u);
    }
    orthonormalize(&mut signal);
    Ok(SubspaceSplit {
        eigenvalues,
        signal,
        noise: None,
    })
}

/// Modified Gram–Schmidt, in place.
fn orthonormalize(m: &mut DMatrix<Complex64>) {
    for k in 0..m.ncols() {
        for j in 0..k {
            let proj = m.column(j).dotc(&m.column(k));
            let cj = m.column(j).into_owned();
            m.column_mut(k).axpy(-proj, &cj, Complex64::from(1.0));
        }
        let n = m.column(k).norm();
        m.column_mut(k).unscale_mut(n);
    }
}
