//! Minimal dense real matrices for the small (at most 6 x 6) problems that
//! show up here: symplectic-form checks and matrix exponentials.

/// Row-major dense `n x n` real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut m = Mat::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "rows must form a square matrix");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    /// Standard symplectic form `J = [[0, I], [-I, 0]]` on `R^{2k}`.
    pub fn symplectic_form(k: usize) -> Self {
        let mut j = Mat::zeros(2 * k);
        for i in 0..k {
            j[(i, k + i)] = 1.0;
            j[(k + i, i)] = -1.0;
        }
        j
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, a: f64) -> Mat {
        Mat { n: self.n, data: self.data.iter().map(|x| a * x).collect() }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n);
        Mat {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Determinant by partially pivoted LU; fine for the tiny sizes used here.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if a[piv * n + col] == 0.0 {
                return 0.0;
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
                    a[r * n + j] -= f * a[col * n + j];
                }
            }
        }
        det
    }

    /// Matrix exponential by scaling and squaring with a Taylor series.
    ///
    /// The argument is scaled until its max-abs norm is below 1/2, expanded to
    /// machine precision, then squared back up.
    pub fn exp(&self) -> Mat {
        let n = self.n;
        let norm = self.max_abs() * n as f64;
        let mut squarings = 0u32;
        let mut scale = 1.0;
        while norm * scale > 0.5 {
            squarings += 1;
            scale *= 0.5;
        }
        let x = self.scale(scale);
        let mut term = Mat::identity(n);
        let mut sum = Mat::identity(n);
        for k in 1..=24 {
            term = term.mul(&x).scale(1.0 / k as f64);
            sum = sum.add(&term);
            if term.max_abs() < 1e-300 {
                break;
            }
        }
        let mut result = sum;
        for _ in 0..squarings {
            result = result.mul(&result);
        }
        result
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_zero_is_identity() {
        let z = Mat::zeros(4);
        assert_eq!(z.exp().max_abs_diff(&Mat::identity(4)), 0.0);
    }

    #[test]
    fn exp_matches_rotation_generator() {
        // exp of [[0, a], [-a, 0]] is the rotation by angle a.
        let a = 0.7;
        let g = Mat::from_rows(&[&[0.0, a], &[-a, 0.0]]);
        let r = g.exp();
        let expected = Mat::from_rows(&[&[a.cos(), a.sin()], &[-a.sin(), a.cos()]]);
        assert!(r.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn det_of_triangular_product() {
        let m = Mat::from_rows(&[&[2.0, 1.0, 0.0], &[0.0, 3.0, 5.0], &[0.0, 0.0, 4.0]]);
        assert!((m.det() - 24.0).abs() < 1e-12);
    }
}
