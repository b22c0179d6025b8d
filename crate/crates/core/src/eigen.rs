//! Dense nonsymmetric eigensolver wrapper around faer.
//!
//! Matrices whose entries are all real go through the real Hessenberg/Schur
//! path, which is roughly twice as fast as the complex one; the linearized
//! operators of this crate are always real. Eigenvalues of real matrices
//! come back with conjugate pairs adjacent.

use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors, EvdError};
use faer::{Mat, MatRef, Par};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigensolver configuration. `Par::Seq` (the default) keeps results
/// bit-identical regardless of the surrounding thread pool.
#[derive(Clone, Copy, Debug)]
pub struct EigenSolver {
    par: Par,
}

impl Default for EigenSolver {
    fn default() -> Self {
        EigenSolver { par: Par::Seq }
    }
}

/// Eigenvalues and right eigenvectors (columns of `vectors`).
#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<Complex64>,
    pub vectors: Mat<Complex64>,
}

impl EigenSolver {
    pub fn sequential() -> Self {
        Self::default()
    }

    /// Multithreaded solves; `threads = 0` lets rayon choose.
    pub fn parallel(threads: usize) -> Self {
        EigenSolver {
            par: Par::rayon(threads),
        }
    }

    pub fn eigenvalues(&self, a: MatRef<'_, Complex64>) -> Result<Vec<Complex64>> {
        check_square(a)?;
        match real_part(a) {
            Some(re) => self.real_eigenvalues(re.as_ref()),
            None => self.complex_eigenvalues(a),
        }
    }

    /// Eigenvalues of a block-diagonal matrix, one solve per index group.
    ///
    /// Falls back to a single full solve if any entry couples two groups.
    pub fn eigenvalues_blocked(&self, a: MatRef<'_, Complex64>, groups: &[Vec<usize>]) -> Result<Vec<Complex64>> {
        check_square(a)?;
        if !is_block_diagonal(a, groups) {
            return self.eigenvalues(a);
        }
        let mut out = Vec::with_capacity(a.nrows());
        for g in groups {
            let sub = Mat::from_fn(g.len(), g.len(), |i, j| a[(g[i], g[j])]);
            out.extend(self.eigenvalues(sub.as_ref())?);
        }
        Ok(out)
    }

    pub fn eigenpairs(&self, a: MatRef<'_, Complex64>) -> Result<Eigenpairs> {
        check_square(a)?;
        let n = a.nrows();
        let no_convergence = |_: EvdError| Error::NoConvergence { dim: n };
        match real_part(a) {
            Some(re) => {
                let mut s_re = Diag::<f64>::zeros(n);
                let mut s_im = Diag::<f64>::zeros(n);
                let mut u = Mat::<f64>::zeros(n, n);
                evd::evd_real(
                    re.as_ref(),
                    s_re.as_mut(),
                    s_im.as_mut(),
                    None,
                    Some(u.as_mut()),
                    self.par,
                    MemStack::new(&mut MemBuffer::new(evd::evd_scratch::<f64>(
                        n,
                        ComputeEigenvectors::No,
                        ComputeEigenvectors::Yes,
                        self.par,
                        Default::default(),
                    ))),
                    Default::default(),
                )
                .map_err(no_convergence)?;
                Ok(unpack_real(u.as_ref(), &s_re, &s_im))
            }
            None => {
                let mut s = Diag::<Complex64>::zeros(n);
                let mut u = Mat::<Complex64>::zeros(n, n);
                evd::evd_cplx(
                    a,
                    s.as_mut(),
                    None,
                    Some(u.as_mut()),
                    self.par,
                    MemStack::new(&mut MemBuffer::new(evd::evd_scratch::<Complex64>(
                        n,
                        ComputeEigenvectors::No,
                        ComputeEigenvectors::Yes,
                        self.par,
                        Default::default(),
                    ))),
                    Default::default(),
                )
                .map_err(no_convergence)?;
                Ok(Eigenpairs {
                    values: s.column_vector().iter().copied().collect(),
                    vectors: u,
                })
            }
        }
    }

    fn real_eigenvalues(&self, a: MatRef<'_, f64>) -> Result<Vec<Complex64>> {
        let n = a.nrows();
        let mut s_re = Diag::<f64>::zeros(n);
        let mut s_im = Diag::<f64>::zeros(n);
        evd::evd_real(
            a,
            s_re.as_mut(),
            s_im.as_mut(),
            None,
            None,
            self.par,
            MemStack::new(&mut MemBuffer::new(evd::evd_scratch::<f64>(
                n,
                ComputeEigenvectors::No,
                ComputeEigenvectors::No,
                self.par,
                Default::default(),
            ))),
            Default::default(),
        )
        .map_err(|_| Error::NoConvergence { dim: n })?;
        Ok((0..n)
            .map(|i| Complex64::new(s_re.column_vector()[i], s_im.column_vector()[i]))
            .collect())
    }

    fn complex_eigenvalues(&self, a: MatRef<'_, Complex64>) -> Result<Vec<Complex64>> {
        let n = a.nrows();
        let mut s = Diag::<Complex64>::zeros(n);
        evd::evd_cplx(
            a,
            s.as_mut(),
            None,
            None,
            self.par,
            MemStack::new(&mut MemBuffer::new(evd::evd_scratch::<Complex64>(
                n,
                ComputeEigenvectors::No,
                ComputeEigenvectors::No,
                self.par,
                Default::default(),
            ))),
            Default::default(),
        )
        .map_err(|_| Error::NoConvergence { dim: n })?;
        Ok(s.column_vector().iter().copied().collect())
    }
}

fn check_square(a: MatRef<'_, Complex64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            left: a.nrows(),
            right: a.ncols(),
        });
    }
    Ok(())
}

fn real_part(a: MatRef<'_, Complex64>) -> Option<Mat<f64>> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if a[(i, j)].im != 0.0 {
                return None;
            }
        }
    }
    Some(Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].re))
}

fn is_block_diagonal(a: MatRef<'_, Complex64>, groups: &[Vec<usize>]) -> bool {
    let n = a.nrows();
    let mut label = vec![usize::MAX; n];
    for (g, idx) in groups.iter().enumerate() {
        for &i in idx {
            if i >= n || label[i] != usize::MAX {
                return false;
            }
            label[i] = g;
        }
    }
    if label.contains(&usize::MAX) {
        return false;
    }
    (0..n).all(|j| (0..n).all(|i| label[i] == label[j] || a[(i, j)] == Complex64::default()))
}

/// Real Schur output stores a conjugate pair `a ± ib` as two adjacent
/// columns `(re, im)` of the eigenvector matrix.
fn unpack_real(u: MatRef<'_, f64>, s_re: &Diag<f64>, s_im: &Diag<f64>) -> Eigenpairs {
    let n = u.nrows();
    let (s_re, s_im) = (s_re.column_vector(), s_im.column_vector());
    let mut values = Vec::with_capacity(n);
    let mut vectors = Mat::<Complex64>::zeros(n, n);
    let mut j = 0;
    while j < n {
        if s_im[j] == 0.0 || j + 1 == n {
            values.push(Complex64::new(s_re[j], s_im[j]));
            for i in 0..n {
                vectors[(i, j)] = Complex64::new(u[(i, j)], 0.0);
            }
            j += 1;
        } else {
            values.push(Complex64::new(s_re[j], s_im[j]));
            values.push(Complex64::new(s_re[j], -s_im[j]));
            for i in 0..n {
                vectors[(i, j)] = Complex64::new(u[(i, j)], u[(i, j + 1)]);
                vectors[(i, j + 1)] = Complex64::new(u[(i, j)], -u[(i, j + 1)]);
            }
            j += 2;
        }
    }
    Eigenpairs { values, vectors }
}

/// `‖A v − λ v‖ / ‖v‖` for every returned pair.
pub fn eigenpair_residuals(a: MatRef<'_, Complex64>, pairs: &Eigenpairs) -> Vec<f64> {
    let n = a.nrows();
    let av = a * pairs.vectors.as_ref();
    (0..pairs.values.len())
        .map(|j| {
            let lambda = pairs.values[j];
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..n {
                let v = pairs.vectors[(i, j)];
                num += (av[(i, j)] - lambda * v).norm_sqr();
                den += v.norm_sqr();
            }
            (num / den).sqrt()
        })
        .collect()
}

/// Largest singular value.
pub fn spectral_norm(a: MatRef<'_, Complex64>) -> Result<f64> {
    let sv = match real_part(a) {
        Some(re) => re.singular_values(),
        None => a.singular_values(),
    }
    .map_err(|_| Error::NoConvergence { dim: a.nrows() })?;
    Ok(sv.into_iter().fold(0.0, f64::max))
}

/// `max |λ|`; zero for an empty list.
pub fn spectral_radius(values: &[Complex64]) -> f64 {
    values.iter().map(|l| l.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn rotation_has_unit_pair() {
        let t: f64 = 0.3;
        let a = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => c(t.cos(), 0.0),
            (0, 1) => c(-t.sin(), 0.0),
            _ => c(t.sin(), 0.0),
        });
        let ev = sorted(EigenSolver::default().eigenvalues(a.as_ref()).unwrap());
        assert!((ev[0] - c(t.cos(), -t.sin())).norm() < 1e-14);
        assert!((ev[1] - c(t.cos(), t.sin())).norm() < 1e-14);
    }

    #[test]
    fn complex_path_triangular() {
        let a = Mat::from_fn(3, 3, |i, j| if i <= j { c(1.0 + i as f64, 0.5) } else { c(0.0, 0.0) });
        let ev = sorted(EigenSolver::default().eigenvalues(a.as_ref()).unwrap());
        for (k, l) in ev.iter().enumerate() {
            assert!((l - c(1.0 + k as f64, 0.5)).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenpairs_satisfy_residual_on_both_paths() {
        let real = Mat::from_fn(6, 6, |i, j| c(((i * 7 + j * 3) % 5) as f64 - 2.0, 0.0));
        let cplx = Mat::from_fn(6, 6, |i, j| {
            c(((i * 7 + j * 3) % 5) as f64 - 2.0, (i as f64 - j as f64) * 0.1)
        });
        for a in [real, cplx] {
            let p = EigenSolver::default().eigenpairs(a.as_ref()).unwrap();
            let scale = spectral_norm(a.as_ref()).unwrap();
            for r in eigenpair_residuals(a.as_ref(), &p) {
                assert!(r < 1e-10 * scale, "{r}");
            }
        }
    }

    #[test]
    fn blocked_solve_matches_full() {
        let a = Mat::from_fn(6, 6, |i, j| {
            if i % 2 == j % 2 {
                c(((i * 5 + j) % 7) as f64 - 3.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let groups = vec![vec![0, 2, 4], vec![1, 3, 5]];
        let s = EigenSolver::default();
        let full = sorted(s.eigenvalues(a.as_ref()).unwrap());
        let blocked = sorted(s.eigenvalues_blocked(a.as_ref(), &groups).unwrap());
        for (x, y) in full.iter().zip(&blocked) {
            assert!((x - y).norm() < 1e-10);
        }
        // coupling between groups forces the full path
        let mut b = a.clone();
        b[(0, 1)] = c(1.0, 0.0);
        assert_eq!(s.eigenvalues_blocked(b.as_ref(), &groups).unwrap().len(), 6);
    }

    #[test]
    fn non_square_is_rejected() {
        let a = Mat::<Complex64>::zeros(2, 3);
        assert!(matches!(
            EigenSolver::default().eigenvalues(a.as_ref()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn norm_of_diagonal() {
        let a = Mat::from_fn(
            3,
            3,
            |i, j| if i == j { c(-(i as f64) - 1.0, 0.0) } else { c(0.0, 0.0) },
        );
        assert!((spectral_norm(a.as_ref()).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(spectral_radius(&[c(0.0, 2.0), c(-1.0, 0.0)]), 2.0);
    }
}
