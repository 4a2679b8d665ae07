//! Exact Grauert-tube geometry of the round two-sphere.
//!
//! The tube boundary of radius `tau` is realized inside the complex quadric
//! `{zeta in C^3 : zeta . zeta = 1}` as
//! `zeta = cosh(tau) x + i sinh(tau) v` with `x, v` orthonormal in `R^3`;
//! it is the unit cosphere bundle of `S^2` rescaled to radius `tau`. The
//! geodesic flow is the great-circle rotation of the `(x, v)` pair, the tube
//! function is `asinh |Im zeta|`, and the Liouville volume is normalized so
//! the fiber circle has mass `2 pi tau` (total mass `8 pi^2 tau`). Slope and
//! exponent experiments elsewhere are insensitive to that constant.

use crate::numerics::{gauss_legendre, QuadratureRule};
use crate::symplectic::SymplecticMatrix;
use crate::{Error, Result};
use num_complex::Complex64;

pub type Vec3 = [f64; 3];
pub type CVec3 = [Complex64; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn scale3(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Complex bilinear square `zeta . zeta` (no conjugation).
pub fn quadric_form(zeta: &CVec3) -> Complex64 {
    zeta[0] * zeta[0] + zeta[1] * zeta[1] + zeta[2] * zeta[2]
}

fn cplx_dot(a: &CVec3, b: &CVec3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Real inner product of `C^3` viewed as `R^6`.
fn real_inner(a: &CVec3, b: &CVec3) -> f64 {
    (0..3).map(|i| (a[i] * b[i].conj()).re).sum()
}

fn real_norm(a: &CVec3) -> f64 {
    real_inner(a, a).sqrt()
}

/// A point of the tube boundary, carried both as `(x, v, tau)` frame data
/// and as its quadric embedding `zeta = cosh(tau) x + i sinh(tau) v`.
#[derive(Debug, Clone)]
pub struct TubePoint {
    pub x: Vec3,
    pub v: Vec3,
    pub tau: f64,
    pub zeta: CVec3,
}

const FRAME_TOL: f64 = 1e-9;

impl TubePoint {
    /// Build from an exact orthonormal pair; rejects frames off by more
    /// than 1e-9.
    pub fn new(x: Vec3, v: Vec3, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidArgument("tube radius must be positive".into()));
        }
        if (norm(&x) - 1.0).abs() > FRAME_TOL
            || (norm(&v) - 1.0).abs() > FRAME_TOL
            || dot(&x, &v).abs() > FRAME_TOL
        {
            return Err(Error::InvalidArgument(format!(
                "(x, v) must be orthonormal: |x| = {}, |v| = {}, x.v = {}",
                norm(&x),
                norm(&v),
                dot(&x, &v)
            )));
        }
        Ok(Self::from_frame(x, v, tau))
    }

    /// Orthonormalize `(x, v)` by Gram--Schmidt, then build the point.
    pub fn project(x_raw: Vec3, v_raw: Vec3, tau: f64) -> Result<Self> {
        let nx = norm(&x_raw);
        if nx < 1e-12 {
            return Err(Error::InvalidArgument("degenerate base vector".into()));
        }
        let x = scale3(&x_raw, 1.0 / nx);
        let v_perp = sub3(&v_raw, &scale3(&x, dot(&v_raw, &x)));
        let nv = norm(&v_perp);
        if nv < 1e-12 {
            return Err(Error::InvalidArgument("covector parallel to base point".into()));
        }
        Ok(Self::from_frame(x, scale3(&v_perp, 1.0 / nv), tau))
    }

    /// Decompose a quadric point with nonreal part into `(x, v, tau)`.
    /// On the quadric `Re zeta . Im zeta = 0` and `|Re|^2 - |Im|^2 = 1`
    /// automatically, so the split is exact.
    pub fn from_zeta(zeta: CVec3) -> Result<Self> {
        let q = quadric_form(&zeta);
        if (q - Complex64::new(1.0, 0.0)).norm() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "point is off the quadric: zeta.zeta = {q}"
            )));
        }
        let a = [zeta[0].re, zeta[1].re, zeta[2].re];
        let b = [zeta[0].im, zeta[1].im, zeta[2].im];
        let nb = norm(&b);
        if nb < 1e-12 {
            return Err(Error::InvalidArgument(
                "point lies on the real sphere (tau = 0)".into(),
            ));
        }
        let tau = nb.asinh();
        Ok(Self::from_frame(scale3(&a, 1.0 / norm(&a)), scale3(&b, 1.0 / nb), tau))
    }

    fn from_frame(x: Vec3, v: Vec3, tau: f64) -> Self {
        let (ch, sh) = (tau.cosh(), tau.sinh());
        let zeta = [
            Complex64::new(ch * x[0], sh * v[0]),
            Complex64::new(ch * x[1], sh * v[1]),
            Complex64::new(ch * x[2], sh * v[2]),
        ];
        TubePoint { x, v, tau, zeta }
    }

    /// Rotation about the z-axis by `theta`; used to sweep the torus
    /// direction of quadrature grids.
    pub fn rotate_z(&self, theta: f64) -> TubePoint {
        let (c, s) = (theta.cos(), theta.sin());
        let rot = |a: &Vec3| [c * a[0] - s * a[1], s * a[0] + c * a[1], a[2]];
        Self::from_frame(rot(&self.x), rot(&self.v), self.tau)
    }

    /// Ambient chordal distance between embeddings.
    pub fn ambient_distance(&self, other: &TubePoint) -> f64 {
        (0..3)
            .map(|i| (self.zeta[i] - other.zeta[i]).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// The Grauert tube function `asinh |Im zeta|` on the quadric.
pub fn tube_function(zeta: &CVec3) -> Result<f64> {
    let q = quadric_form(zeta);
    if (q - Complex64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "point is off the quadric: zeta.zeta = {q}"
        )));
    }
    let im_norm = (zeta[0].im.powi(2) + zeta[1].im.powi(2) + zeta[2].im.powi(2)).sqrt();
    Ok(im_norm.asinh())
}

/// Geodesic (Reeb) flow: great-circle rotation of the `(x, v)` frame by
/// time `t`, with the tube radius fixed.
pub fn geodesic_flow(p: &TubePoint, t: f64) -> TubePoint {
    let (c, s) = (t.cos(), t.sin());
    let x = [
        c * p.x[0] + s * p.v[0],
        c * p.x[1] + s * p.v[1],
        c * p.x[2] + s * p.v[2],
    ];
    let v = [
        -s * p.x[0] + c * p.v[0],
        -s * p.x[1] + c * p.v[1],
        -s * p.x[2] + c * p.v[2],
    ];
    TubePoint::from_frame(x, v, p.tau)
}

/// An adapted frame at a tube point: the flow direction `T`, a unit vector
/// `e1` of the complex tangent plane `H`, and `Je1 = i e1`.
#[derive(Debug, Clone)]
pub struct HeisenbergFrame {
    pub t_vec: CVec3,
    pub e1: CVec3,
    pub je1: CVec3,
}

/// Construct the adapted frame. `T` is the derivative of the flow at the
/// point; `e1` is found by projecting an ambient seed onto the quadric
/// tangent space and removing the `T` and `iT` components.
pub fn heisenberg_frame(p: &TubePoint) -> Result<HeisenbergFrame> {
    let (ch, sh) = (p.tau.cosh(), p.tau.sinh());
    // d/dt zeta(G^t p) at t = 0: cosh(tau) v - i sinh(tau) x.
    let t_vec: CVec3 = [
        Complex64::new(ch * p.v[0], -sh * p.x[0]),
        Complex64::new(ch * p.v[1], -sh * p.x[1]),
        Complex64::new(ch * p.v[2], -sh * p.x[2]),
    ];
    let it_vec: CVec3 = [
        t_vec[0] * Complex64::i(),
        t_vec[1] * Complex64::i(),
        t_vec[2] * Complex64::i(),
    ];
    let tn = real_inner(&t_vec, &t_vec);

    let seeds: [CVec3; 3] = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    for seed in &seeds {
        // Project onto the quadric tangent space {w : w . zeta = 0} with the
        // bilinear form (zeta . zeta = 1 on the quadric).
        let coeff = cplx_dot(seed, &p.zeta);
        let mut w: CVec3 = [
            seed[0] - coeff * p.zeta[0],
            seed[1] - coeff * p.zeta[1],
            seed[2] - coeff * p.zeta[2],
        ];
        // Remove the T and iT components in the real inner product.
        let ct = real_inner(&w, &t_vec) / tn;
        let cit = real_inner(&w, &it_vec) / tn;
        for i in 0..3 {
            w[i] -= ct * t_vec[i] + cit * it_vec[i];
        }
        let nw = real_norm(&w);
        if nw > 1e-6 {
            let e1: CVec3 = [w[0] / nw, w[1] / nw, w[2] / nw];
            let je1: CVec3 = [e1[0] * Complex64::i(), e1[1] * Complex64::i(), e1[2] * Complex64::i()];
            return Ok(HeisenbergFrame { t_vec, e1, je1 });
        }
    }
    Err(Error::FrameConstruction("all ambient seeds project to zero".into()))
}

/// Ambient length of a unit Heisenberg step in the `H` direction.
///
/// Adapted holomorphic coordinates are normalized by the potential
/// `rho = -Im z0 + |z'|^2 + ...`; expanding the tube function along a
/// holomorphic line inside the quadric gives `|dz'(e1)|^2 = tau / sinh(2 tau)`
/// for the ambient-unit frame vector, so realizing `|z'| = 1` takes an
/// ambient step of `sqrt(sinh(2 tau) / tau)`.
pub fn heisenberg_step_scale(tau: f64) -> f64 {
    ((2.0 * tau).sinh() / tau).sqrt()
}

/// Heisenberg-coordinate displacement `p + (theta/lambda, u/sqrt(lambda))`:
/// flow by `theta / (2 tau lambda)` to realize the contact displacement,
/// then step by `u/sqrt(lambda)` in Heisenberg normalization along
/// `Re(u) e1 + Im(u) Je1` and project back onto the tube boundary. The
/// projection error is `O(|u|^2/lambda)`.
pub fn displace(p: &TubePoint, theta: f64, u: Complex64, lambda: f64) -> Result<TubePoint> {
    if !(lambda >= 1.0) {
        return Err(Error::InvalidArgument("displacement needs lambda >= 1".into()));
    }
    let flowed = geodesic_flow(p, theta / (2.0 * p.tau * lambda));
    if u.norm_sqr() == 0.0 {
        return Ok(flowed);
    }
    let frame = heisenberg_frame(&flowed)?;
    let s = heisenberg_step_scale(p.tau) / lambda.sqrt();
    let mut zeta = flowed.zeta;
    for i in 0..3 {
        zeta[i] += s * (u.re * frame.e1[i] + u.im * frame.je1[i]);
    }
    // Split into real and imaginary parts and restore the (x, v) frame by
    // Gram-Schmidt; this puts the point back on the boundary at radius tau.
    let a = [zeta[0].re, zeta[1].re, zeta[2].re];
    let b = [zeta[0].im, zeta[1].im, zeta[2].im];
    TubePoint::project(a, b, p.tau)
}

/// The transverse linearization of the geodesic flow at time `s`: for the
/// unit-curvature sphere the Jacobi equation `J'' + J = 0` makes it the
/// rotation by angle `s` in (displacement, momentum) coordinates.
pub fn jacobi_linearization(s: f64) -> SymplecticMatrix {
    SymplecticMatrix::rotation(1, s)
}

/// Deterministic base point for experiments: seed 0 gives the equator
/// point with covector along the torus direction of the beam peak; other
/// seeds scatter orthonormal frames over the bundle.
pub fn seeded_base_point(tau: f64, seed: u64) -> Result<TubePoint> {
    if seed == 0 {
        return TubePoint::new([1.0, 0.0, 0.0], [0.0, -1.0, 0.0], tau);
    }
    let mut state = seed;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    for _ in 0..64 {
        let x = [next(), next(), next()];
        let v = [next(), next(), next()];
        if let Ok(p) = TubePoint::project(x, v, tau) {
            return Ok(p);
        }
    }
    Err(Error::InvalidArgument("could not draw a base point".into()))
}

/// One node of the Liouville rule at `theta = 0`, reused for every torus
/// angle by z-rotation.
#[derive(Debug, Clone)]
pub struct FiberNode {
    pub point: TubePoint,
    /// Weight of the `(phi, alpha)` cell, including the Liouville constant
    /// but not the `theta` factor.
    pub weight: f64,
}

/// Product quadrature over the tube boundary with the Liouville measure
/// `tau * sin(phi) dtheta dphi dalpha` (fiber-circle mass `2 pi tau`).
///
/// `theta` and `alpha` are equispaced periodic, `phi` is Gauss--Legendre in
/// `cos(phi)` so no node sits at the poles.
#[derive(Debug, Clone)]
pub struct LiouvilleRule {
    pub tau: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    pub n_alpha: usize,
    /// Nodes of the `(phi, alpha)` slice at `theta = 0`.
    pub fiber: Vec<FiberNode>,
}

impl LiouvilleRule {
    /// Weight carried by the analytic `theta` integral.
    pub fn theta_mass(&self) -> f64 {
        2.0 * std::f64::consts::PI
    }

    pub fn theta_angles(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n_theta;
        (0..n).map(move |i| 2.0 * std::f64::consts::PI * i as f64 / n as f64)
    }

    /// Total node count of the full 3-D rule.
    pub fn len(&self) -> usize {
        self.n_theta * self.fiber.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fiber.is_empty()
    }

    /// Integrate a function over the full 3-D rule.
    pub fn integrate(&self, mut f: impl FnMut(&TubePoint) -> f64) -> f64 {
        let dtheta = self.theta_mass() / self.n_theta as f64;
        let mut total = 0.0;
        for theta in self.theta_angles() {
            for node in &self.fiber {
                total += node.weight * dtheta * f(&node.point.rotate_z(theta));
            }
        }
        total
    }

    pub fn total_mass(&self) -> f64 {
        self.theta_mass() * self.fiber.iter().map(|n| n.weight).sum::<f64>()
    }
}

/// Build the Liouville rule; all three resolutions must be at least 4.
pub fn liouville_quadrature(
    tau: f64,
    n_theta: usize,
    n_phi: usize,
    n_alpha: usize,
) -> Result<LiouvilleRule> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument("tube radius must be positive".into()));
    }
    if n_theta < 4 || n_phi < 4 || n_alpha < 4 {
        return Err(Error::InvalidArgument("resolutions must be >= 4".into()));
    }
    let gl: QuadratureRule = gauss_legendre(n_phi)?;
    let dalpha = 2.0 * std::f64::consts::PI / n_alpha as f64;
    let mut fiber = Vec::with_capacity(n_phi * n_alpha);
    for (j, &c) in gl.nodes.iter().enumerate() {
        let phi = c.acos();
        let (sp, cp) = (phi.sin(), phi.cos());
        // Base point on the theta = 0 meridian and its tangent frame.
        let x = [sp, 0.0, cp];
        let e_phi = [cp, 0.0, -sp];
        let e_theta = [0.0, 1.0, 0.0];
        for k in 0..n_alpha {
            let alpha = dalpha * k as f64;
            let (ca, sa) = (alpha.cos(), alpha.sin());
            let v = [
                ca * e_theta[0] + sa * e_phi[0],
                ca * e_theta[1] + sa * e_phi[1],
                ca * e_theta[2] + sa * e_phi[2],
            ];
            fiber.push(FiberNode {
                point: TubePoint::new(x, v, tau)?,
                weight: tau * gl.weights[j] * dalpha,
            });
        }
    }
    Ok(LiouvilleRule { tau, n_theta, n_phi, n_alpha, fiber })
}
