//! Green and Robin functions of the ball in closed form, the Robin Hessian,
//! and the boundary flux identities that control the blow-up location.
//!
//! Everything here reduces to single radial or axisymmetric evaluations:
//! the Dirichlet Green function of B_R comes from one image charge,
//!
//! ```text
//!     G(x,y) = k_n (|x−y|^{2−n} − Q(x,y)^{(2−n)/2}),
//!     Q(x,y) = |x|²|y|²/R² − 2x·y + R²,    k_n = 1/((n−2)ω_n),
//! ```
//!
//! and surface integrals over ∂B_R collapse to one polar angle.

use faer::Mat;

use crate::dim::DimensionSpec;
use crate::error::{HartreeError, Result};
use crate::quad;

/// The computational domain: a ball of radius R centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct BallDomain {
    dim: DimensionSpec,
    radius: f64,
}

impl BallDomain {
    pub fn new(n: u32, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(HartreeError::Domain(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self {
            dim: DimensionSpec::new(n)?,
            radius,
        })
    }

    pub fn dim(&self) -> &DimensionSpec {
        &self.dim
    }

    pub fn n(&self) -> u32 {
        self.dim.n()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn check_point(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n() as usize {
            return Err(HartreeError::Domain(format!(
                "point dimension {} does not match the {}-ball",
                x.len(),
                self.n()
            )));
        }
        let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > self.radius * (1.0 + 1e-12) {
            return Err(HartreeError::Domain(format!(
                "point with |x| = {norm} lies outside the ball of radius {}",
                self.radius
            )));
        }
        Ok(norm)
    }
}

fn kernel_const(dim: &DimensionSpec) -> f64 {
    1.0 / ((dim.nf() - 2.0) * dim.omega_n())
}

/// Dirichlet Green function of the ball (positive inside, zero on ∂B_R).
pub fn green_ball(ball: &BallDomain, x: &[f64], y: &[f64]) -> Result<f64> {
    ball.check_point(x)?;
    ball.check_point(y)?;
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    if d2 == 0.0 {
        return Err(HartreeError::Domain(
            "Green function evaluated on its singular diagonal x = y".into(),
        ));
    }
    let rr = ball.radius * ball.radius;
    let x2: f64 = x.iter().map(|a| a * a).sum();
    let y2: f64 = y.iter().map(|a| a * a).sum();
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let q = x2 * y2 / rr - 2.0 * dot + rr;
    let e = (2.0 - ball.dim.nf()) / 2.0;
    Ok(kernel_const(&ball.dim) * (d2.powf(e) - q.powf(e)))
}

/// Robin function φ(x) = H(x,x): the regular part of the Green function on
/// the diagonal. Strictly negative inside and divergent at the boundary.
pub fn robin_ball(ball: &BallDomain, x: &[f64]) -> Result<f64> {
    let norm = ball.check_point(x)?;
    if norm >= ball.radius {
        return Err(HartreeError::Domain(
            "Robin function needs a strictly interior point".into(),
        ));
    }
    let nf = ball.dim.nf();
    let rr = ball.radius * ball.radius;
    Ok(-kernel_const(&ball.dim)
        * ball.radius.powf(nf - 2.0)
        * (rr - norm * norm).powf(2.0 - nf))
}

/// Robin Hessian D²φ(x₀) by central second differences with step `h`.
/// At the centre this is ν·I with ν = −2/(ω_n Rⁿ).
pub fn robin_hessian(ball: &BallDomain, x0: &[f64], h: f64) -> Result<Mat<f64>> {
    ball.check_point(x0)?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(HartreeError::Domain(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let n = ball.n() as usize;
    let norm = x0.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm + h * 2.0f64.sqrt() >= ball.radius {
        return Err(HartreeError::Domain(
            "finite-difference stencil leaves the ball".into(),
        ));
    }

    let phi = |p: &[f64]| robin_ball(ball, p);
    let mut shifted = x0.to_vec();
    let mut hess = Mat::<f64>::zeros(n, n);
    let center = phi(x0)?;
    for j in 0..n {
        for k in j..n {
            let v = if j == k {
                shifted.copy_from_slice(x0);
                shifted[j] = x0[j] + h;
                let fp = phi(&shifted)?;
                shifted[j] = x0[j] - h;
                let fm = phi(&shifted)?;
                (fp - 2.0 * center + fm) / (h * h)
            } else {
                let mut corner = |sj: f64, sk: f64| -> Result<f64> {
                    shifted.copy_from_slice(x0);
                    shifted[j] = x0[j] + sj * h;
                    shifted[k] = x0[k] + sk * h;
                    phi(&shifted)
                };
                (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)?
                    + corner(-1.0, -1.0)?)
                    / (4.0 * h * h)
            };
            hess[(j, k)] = v;
            hess[(k, j)] = v;
        }
    }
    Ok(hess)
}

/// Poisson kernel P(w,x) = (R²−|w|²)/(ω_n R |x−w|ⁿ) for x on ∂B_R; equals
/// −∂_ν G(x,w).
fn poisson(ball: &BallDomain, w_norm2: f64, dist2: f64) -> f64 {
    let nf = ball.dim.nf();
    let rr = ball.radius * ball.radius;
    (rr - w_norm2) / (ball.dim.omega_n() * ball.radius * dist2.powf(nf / 2.0))
}

/// Axisymmetric surface quadrature over ∂B_R: integrates
/// f(c)·|S^{n−2}|·R^{n−1}·sin^{n−2}θ with c = cos θ by Gauss–Legendre in θ.
fn sphere_quad(ball: &BallDomain, m: usize, f: impl Fn(f64) -> f64) -> f64 {
    let nf = ball.dim.nf();
    let azimuth =
        crate::specfun::sphere_area(ball.n() - 1).expect("dimension is at least 3");
    let (gx, gw) = quad::gauss_legendre(m);
    let half_pi = 0.5 * std::f64::consts::PI;
    let mut acc = 0.0;
    for (t, w) in gx.iter().zip(&gw) {
        let theta = half_pi * (t + 1.0);
        let c = theta.cos();
        acc += w * half_pi * f(c) * theta.sin().powf(nf - 2.0);
    }
    acc * azimuth * ball.radius.powf(nf - 1.0)
}

/// Relative residual of the first boundary flux identity
///
/// ```text
///     ∫_{∂B_R} (∂_ν G(x,x₀))² (x−x₀)·ν dS(x) = −(n−2)·φ(x₀),
/// ```
///
/// evaluated by axisymmetric quadrature against the Robin closed form.
pub fn surface_flux_identity_residual(ball: &BallDomain, x0: &[f64]) -> Result<f64> {
    let norm = ball.check_point(x0)?;
    if norm > 0.8 * ball.radius {
        return Err(HartreeError::Domain(
            "surface quadrature is only reliable for |x0| <= 0.8 R".into(),
        ));
    }
    let r = ball.radius;
    let w2 = norm * norm;
    let lhs = sphere_quad(ball, 256, |c| {
        let d2 = r * r - 2.0 * r * norm * c + w2;
        let p = poisson(ball, w2, d2);
        p * p * (r - norm * c)
    });
    let rhs = -(ball.dim.nf() - 2.0) * robin_ball(ball, x0)?;
    Ok((lhs / rhs - 1.0).abs())
}

/// The mixed boundary pairing at the centre,
///
/// ```text
///     M = ∫_{∂B_R} ∂_ν(∂_{w_1}G(x,w))|_{w=0} · ∂_{x_1}G(x,0) dS(x),
/// ```
///
/// computed by quadrature with the general ∂_w Poisson-kernel formula.
/// Returns (quadrature value, closed form 1/(ω_n Rⁿ)); by symmetry the
/// pairing matrix at the centre is this scalar times the identity, and it
/// equals −½ ∂²_{jj} φ(0), which ties it to [`robin_hessian`].
pub fn mixed_flux_identity_center(ball: &BallDomain) -> Result<(f64, f64)> {
    let r = ball.radius;
    let nf = ball.dim.nf();
    let omega = ball.dim.omega_n();
    let rr = r * r;
    let quadrature = sphere_quad(ball, 256, |c| {
        let x1 = r * c; // axis component of the boundary point
        let d2 = rr; // |x − w|² at w = 0
        // ∂_{w_k}P(w,x) = [−2w_k/|x−w|ⁿ + (R²−|w|²) n (x_k−w_k)/|x−w|^{n+2}]/(ω_n R)
        let dp = (0.0 + rr * nf * x1 / d2.powf((nf + 2.0) / 2.0)) / (omega * r);
        // ∂_ν(∂_{w_1}G) = −∂_{w_1}P; ∂_{x_1}G|_{∂B} = (∂_νG)ν₁ = −P·x₁/R
        let p = poisson(ball, 0.0, d2);
        (-dp) * (-p * x1 / r)
    });
    let closed = 1.0 / (omega * r.powf(nf));
    Ok((quadrature, closed))
}
