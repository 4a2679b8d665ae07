//! Exact rational arithmetic over `i128`, just enough for the stationary
//! phase matrix identities, which only involve entries built from a rational
//! tube radius by products, halves and reciprocals.

/// A reduced fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: i128,
    pub den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Ratio {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Ratio { num: sign * num / g, den: sign * den / g }
    }

    pub fn zero() -> Self {
        Ratio { num: 0, den: 1 }
    }

    pub fn one() -> Self {
        Ratio { num: 1, den: 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn recip(&self) -> Self {
        assert!(self.num != 0, "reciprocal of zero");
        Ratio::new(self.den, self.num)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::ops::Add for Ratio {
    type Output = Ratio;
    fn add(self, rhs: Ratio) -> Ratio {
        Ratio::new(self.num * rhs.den + rhs.num * self.den, self.den * rhs.den)
    }
}

impl std::ops::Sub for Ratio {
    type Output = Ratio;
    fn sub(self, rhs: Ratio) -> Ratio {
        Ratio::new(self.num * rhs.den - rhs.num * self.den, self.den * rhs.den)
    }
}

impl std::ops::Mul for Ratio {
    type Output = Ratio;
    fn mul(self, rhs: Ratio) -> Ratio {
        Ratio::new(self.num * rhs.num, self.den * rhs.den)
    }
}

impl std::ops::Neg for Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        Ratio::new(-self.num, self.den)
    }
}

/// 4 x 4 matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat4(pub [[Ratio; 4]; 4]);

impl RatMat4 {
    pub fn identity() -> Self {
        let mut m = [[Ratio::zero(); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Ratio::one();
        }
        RatMat4(m)
    }

    pub fn mul(&self, other: &RatMat4) -> RatMat4 {
        let mut out = [[Ratio::zero(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Ratio::zero();
                for l in 0..4 {
                    acc = acc + self.0[i][l] * other.0[l][j];
                }
                out[i][j] = acc;
            }
        }
        RatMat4(out)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| self.0[i][j] == self.0[j][i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_ops() {
        let a = Ratio::new(2, 4);
        assert_eq!(a, Ratio::new(1, 2));
        assert_eq!(a + a, Ratio::one());
        assert_eq!(a * Ratio::new(4, 1), Ratio::new(2, 1));
        assert_eq!(Ratio::new(3, -6), Ratio::new(-1, 2));
        assert_eq!(Ratio::new(5, 7).recip(), Ratio::new(7, 5));
    }
}
