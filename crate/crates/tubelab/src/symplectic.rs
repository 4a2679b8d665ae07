//! Real symplectic matrices and their complexification into holomorphic and
//! antiholomorphic blocks.
//!
//! A real symplectic `M = [[A, B], [C, D]]` acting on `(x, y)` becomes, after
//! the unitary change of frame `W = (1/sqrt 2) [[I, I], [-iI, iI]]` sending
//! `(x, y)` to `(z, zbar) = (x + iy, x - iy)`, the block matrix
//! `[[P, Q], [Qbar, Pbar]]` with `P = (A + D + i(C - B)) / 2`. The `P` block
//! is recomputed both ways and cross-checked; `Q` is read off the
//! conjugation, which is exact up to rounding.

use crate::numerics::mat::Mat;
use crate::{Error, Result};
use num_complex::Complex64;

/// Row-major dense `n x n` complex matrix; small sizes only.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real(m: &Mat) -> Self {
        CMat { n: m.n, data: m.data.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self[(i, l)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> CMat {
        CMat { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn det(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].norm_sqr() > a[piv * n + col].norm_sqr() {
                    piv = r;
                }
            }
            if a[piv * n + col].norm_sqr() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                for j in col..n {
                    let sub = f * a[col * n + j];
                    a[r * n + j] -= sub;
                }
            }
        }
        det
    }

    /// Inverse by Gauss--Jordan with partial pivoting.
    pub fn inverse(&self) -> Result<CMat> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = CMat::identity(n);
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].norm_sqr() > a[piv * n + col].norm_sqr() {
                    piv = r;
                }
            }
            let p = a[piv * n + col];
            if p.norm_sqr() < 1e-300 {
                return Err(Error::NearSingularBlock { det_abs: p.norm() });
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                    inv.data.swap(col * n + j, piv * n + j);
                }
            }
            let d = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= d;
                inv.data[col * n + j] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let s1 = f * a[col * n + j];
                    a[r * n + j] -= s1;
                    let s2 = f * inv.data[col * n + j];
                    inv.data[r * n + j] -= s2;
                }
            }
        }
        Ok(inv)
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// A validated real symplectic matrix in block form `[[A, B], [C, D]]` on
/// `R^{2k}` with the form `J = [[0, I], [-I, 0]]`.
#[derive(Debug, Clone)]
pub struct SymplecticMatrix {
    k: usize,
    entries: Mat,
}

/// Validation tolerance for `M^T J M = J`.
pub const SYMPLECTIC_TOL: f64 = 1e-8;

impl SymplecticMatrix {
    pub fn new(k: usize, entries: Mat) -> Result<Self> {
        if entries.n != 2 * k {
            return Err(Error::DimensionMismatch { expected: 2 * k, got: entries.n });
        }
        let m = SymplecticMatrix { k, entries };
        let defect = m.symplectic_defect();
        if !(defect <= SYMPLECTIC_TOL) {
            return Err(Error::NonSymplectic { defect });
        }
        Ok(m)
    }

    pub fn identity(k: usize) -> Self {
        SymplecticMatrix { k, entries: Mat::identity(2 * k) }
    }

    /// Planar rotation by `alpha` in each `(x_j, y_j)` pair.
    pub fn rotation(k: usize, alpha: f64) -> Self {
        let mut m = Mat::zeros(2 * k);
        for i in 0..k {
            m[(i, i)] = alpha.cos();
            m[(i, k + i)] = alpha.sin();
            m[(k + i, i)] = -alpha.sin();
            m[(k + i, k + i)] = alpha.cos();
        }
        SymplecticMatrix { k, entries: m }
    }

    /// `diag(e^t, e^{-t})` in each `(x_j, y_j)` pair.
    pub fn hyperbolic(k: usize, t: f64) -> Self {
        let mut m = Mat::zeros(2 * k);
        for i in 0..k {
            m[(i, i)] = t.exp();
            m[(k + i, k + i)] = (-t).exp();
        }
        SymplecticMatrix { k, entries: m }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &Mat {
        &self.entries
    }

    /// Max-abs entry of `M^T J M - J`.
    pub fn symplectic_defect(&self) -> f64 {
        let j = Mat::symplectic_form(self.k);
        self.entries.transpose().mul(&j).mul(&self.entries).max_abs_diff(&j)
    }

    /// The `k x k` block at block-position `(bi, bj)`.
    pub fn block(&self, bi: usize, bj: usize) -> Mat {
        let k = self.k;
        let mut out = Mat::zeros(k);
        for i in 0..k {
            for j in 0..k {
                out[(i, j)] = self.entries[(bi * k + i, bj * k + j)];
            }
        }
        out
    }

    pub fn mul(&self, other: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if self.k != other.k {
            return Err(Error::DimensionMismatch { expected: self.k, got: other.k });
        }
        SymplecticMatrix::new(self.k, self.entries.mul(&other.entries))
    }

    /// Real action on `(x, y)` stacked as a `2k` vector.
    pub fn apply_real(&self, xy: &[f64]) -> Vec<f64> {
        assert_eq!(xy.len(), 2 * self.k);
        let n = 2 * self.k;
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[(i, j)] * xy[j]).sum())
            .collect()
    }
}

/// The `(P, Q)` blocks of the complexified symplectic action
/// `z' = P z + Q zbar`.
#[derive(Debug, Clone)]
pub struct ComplexSymplecticBlocks {
    pub p: CMat,
    pub q: CMat,
}

impl ComplexSymplecticBlocks {
    pub fn k(&self) -> usize {
        self.p.n
    }

    /// Reassemble the full `2k x 2k` complex matrix `[[P, Q], [Qbar, Pbar]]`.
    pub fn assemble(&self) -> CMat {
        let k = self.k();
        let mut m = CMat::zeros(2 * k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = self.p[(i, j)];
                m[(i, k + j)] = self.q[(i, j)];
                m[(k + i, j)] = self.q[(i, j)].conj();
                m[(k + i, k + j)] = self.p[(i, j)].conj();
            }
        }
        m
    }
}

fn frame_change(k: usize) -> CMat {
    let s = 1.0 / 2.0_f64.sqrt();
    let mut w = CMat::zeros(2 * k);
    for i in 0..k {
        w[(i, i)] = Complex64::new(s, 0.0);
        w[(i, k + i)] = Complex64::new(s, 0.0);
        w[(k + i, i)] = Complex64::new(0.0, -s);
        w[(k + i, k + i)] = Complex64::new(0.0, s);
    }
    w
}

/// Complexify a real symplectic matrix into its `(P, Q)` blocks.
///
/// `P` is computed both from the closed form `(A + D + i(C - B)) / 2` and
/// from the `W`-conjugation; the two must agree to 1e-10. `Q` comes from the
/// conjugation. Fails if `P` is numerically singular.
pub fn complexify(m: &SymplecticMatrix) -> Result<ComplexSymplecticBlocks> {
    let defect = m.symplectic_defect();
    if !(defect <= SYMPLECTIC_TOL) {
        return Err(Error::NonSymplectic { defect });
    }
    let k = m.k();
    let w = frame_change(k);
    let conj = w.adjoint().mul(&CMat::from_real(m.entries())).mul(&w);

    let mut p = CMat::zeros(k);
    let mut q = CMat::zeros(k);
    for i in 0..k {
        for j in 0..k {
            p[(i, j)] = conj[(i, j)];
            q[(i, j)] = conj[(i, k + j)];
        }
    }
    // Bottom blocks must be the conjugates of the top ones.
    let mut defect_conj = 0.0_f64;
    for i in 0..k {
        for j in 0..k {
            defect_conj = defect_conj
                .max((conj[(k + i, k + j)] - p[(i, j)].conj()).norm())
                .max((conj[(k + i, j)] - q[(i, j)].conj()).norm());
        }
    }
    if defect_conj > 1e-10 {
        return Err(Error::InternalConsistency(format!(
            "complexified matrix lost its bar-symmetry by {defect_conj:.3e}"
        )));
    }

    // Closed form for P.
    let a = m.block(0, 0);
    let b = m.block(0, 1);
    let c = m.block(1, 0);
    let d = m.block(1, 1);
    let mut p_closed = CMat::zeros(k);
    for i in 0..k {
        for j in 0..k {
            p_closed[(i, j)] = Complex64::new(
                0.5 * (a[(i, j)] + d[(i, j)]),
                0.5 * (c[(i, j)] - b[(i, j)]),
            );
        }
    }
    let dp = p.max_abs_diff(&p_closed);
    if dp > 1e-10 {
        return Err(Error::InternalConsistency(format!(
            "closed-form P and conjugation P disagree by {dp:.3e}"
        )));
    }

    let det_abs = p.det().norm();
    if det_abs <= 1e-12 {
        return Err(Error::NearSingularBlock { det_abs });
    }
    Ok(ComplexSymplecticBlocks { p, q })
}

/// Apply the complexified action `v -> P v + Q vbar`.
pub fn apply_complexified(blocks: &ComplexSymplecticBlocks, v: &[Complex64]) -> Result<Vec<Complex64>> {
    let k = blocks.k();
    if v.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: v.len() });
    }
    let vbar: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
    let pv = blocks.p.matvec(v);
    let qv = blocks.q.matvec(&vbar);
    Ok(pv.iter().zip(&qv).map(|(a, b)| a + b).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random_symplectic;

    #[test]
    fn identity_complexifies_trivially() {
        let blocks = complexify(&SymplecticMatrix::identity(2)).unwrap();
        assert!(blocks.p.max_abs_diff(&CMat::identity(2)) < 1e-14);
        assert!(blocks.q.max_abs_diff(&CMat::zeros(2)) < 1e-14);
    }

    #[test]
    fn rotation_gives_phase() {
        let alpha = 0.83;
        let blocks = complexify(&SymplecticMatrix::rotation(1, alpha)).unwrap();
        let expected = Complex64::from_polar(1.0, -alpha);
        assert!((blocks.p[(0, 0)] - expected).norm() < 1e-14);
        assert!(blocks.q[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn hyperbolic_gives_cosh_sinh() {
        let t = 0.6;
        let blocks = complexify(&SymplecticMatrix::hyperbolic(1, t)).unwrap();
        assert!((blocks.p[(0, 0)] - Complex64::new(t.cosh(), 0.0)).norm() < 1e-14);
        assert!((blocks.q[(0, 0)] - Complex64::new(t.sinh(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn apply_matches_examples() {
        // Identity fixes everything.
        let id = complexify(&SymplecticMatrix::identity(1)).unwrap();
        let v = [Complex64::new(0.3, -1.2)];
        assert!((apply_complexified(&id, &v).unwrap()[0] - v[0]).norm() < 1e-14);

        // Rotation: z = 1 goes to e^{-i alpha}.
        let alpha = 0.4;
        let rot = complexify(&SymplecticMatrix::rotation(1, alpha)).unwrap();
        let got = apply_complexified(&rot, &[Complex64::new(1.0, 0.0)]).unwrap()[0];
        assert!((got - Complex64::from_polar(1.0, -alpha)).norm() < 1e-14);

        // Hyperbolic on v = i: cosh t * i - sinh t * i = i e^{-t}.
        let t = 0.9;
        let hyp = complexify(&SymplecticMatrix::hyperbolic(1, t)).unwrap();
        let got = apply_complexified(&hyp, &[Complex64::new(0.0, 1.0)]).unwrap()[0];
        assert!((got - Complex64::new(0.0, (-t).exp())).norm() < 1e-13);
    }

    #[test]
    fn complexified_action_matches_real_action() {
        // 500 seeded draws, 10 vectors each, k <= 3.
        for seed in 0..500u64 {
            let k = 1 + (seed % 3) as usize;
            let m = random_symplectic(k, seed, 0.8).unwrap();
            let blocks = complexify(&m).unwrap();
            let mut lcg = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let mut next = || {
                lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((lcg >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            };
            for _ in 0..10 {
                let x: Vec<f64> = (0..k).map(|_| next()).collect();
                let y: Vec<f64> = (0..k).map(|_| next()).collect();
                let xy: Vec<f64> = x.iter().chain(y.iter()).copied().collect();
                let real = m.apply_real(&xy);
                let v: Vec<Complex64> =
                    x.iter().zip(&y).map(|(&a, &b)| Complex64::new(a, b)).collect();
                let cplx = apply_complexified(&blocks, &v).unwrap();
                for i in 0..k {
                    let expected = Complex64::new(real[i], real[k + i]);
                    assert!(
                        (cplx[i] - expected).norm() < 1e-8,
                        "seed {seed}: {:?} vs {expected:?}",
                        cplx[i]
                    );
                }
            }
        }
    }

    #[test]
    fn block_representation_respects_group_law() {
        for seed in 0..50u64 {
            let k = 1 + (seed % 3) as usize;
            let m1 = random_symplectic(k, seed, 0.6).unwrap();
            let m2 = random_symplectic(k, seed + 1000, 0.6).unwrap();
            let b1 = complexify(&m1).unwrap().assemble();
            let b2 = complexify(&m2).unwrap().assemble();
            let b12 = complexify(&m1.mul(&m2).unwrap()).unwrap().assemble();
            assert!(b1.mul(&b2).max_abs_diff(&b12) < 1e-8, "seed {seed}");
        }
    }

    #[test]
    fn holomorphic_block_invertible() {
        for seed in 0..100u64 {
            let k = 1 + (seed % 3) as usize;
            let m = random_symplectic(k, seed, 1.0).unwrap();
            let blocks = complexify(&m).unwrap();
            assert!(blocks.p.det().norm() > 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn rejects_non_symplectic() {
        let mut bad = Mat::identity(2);
        bad[(0, 0)] = 2.0;
        assert!(matches!(
            SymplecticMatrix::new(1, bad),
            Err(Error::NonSymplectic { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_in_apply() {
        let id = complexify(&SymplecticMatrix::identity(2)).unwrap();
        assert!(matches!(
            apply_complexified(&id, &[Complex64::new(1.0, 0.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
