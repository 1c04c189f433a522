//! The Newtonian nonlocal operator f ↦ |x|^{-(n-2)} ∗ f, decomposed by
//! spherical-harmonic mode, with two independent backends.
//!
//! For a density ρ(y) = f(s) Y_ℓ(θ) the convolution with the unnormalized
//! kernel K(x) = |x|^{-(n-2)} is again a pure mode, ψ(x) = g(r) Y_ℓ(θ), with
//!
//! ```text
//! g(r) = (n-2)ω_n/(2ℓ+n-2) · [ r^{-(ℓ+n-2)} ∫_0^r f(s) s^ℓ s^{n-1} ds
//!                            + r^ℓ ∫_r^R f(s) s^{-(ℓ+n-2)} s^{n-1} ds ],
//! ```
//!
//! the Green function of the mode ODE -g'' - (n-1)g'/r + ℓ(ℓ+n-2)g/r² =
//! (n-2)ω_n f with decay g ~ r^{-(ℓ+n-2)} at infinity. The `kernel` backend
//! evaluates exactly this formula with mass-lumped cell quadrature in O(N)
//! via prefix/suffix sums; the `bvp` backend solves the flux-form mode
//! Laplacian with the exact-decay closure instead. For ℓ = 0 the two
//! coincide to rounding at the nodes (the two-point transmissibilities are
//! exact on both homogeneous branches, so each lumped point mass produces
//! its exact potential); for ℓ ≥ 1 they differ at the discretization order,
//! which is what makes the dual-route comparison a meaningful check.
//!
//! The kernel normalization (n-2)ω_n is fixed once here; every convolution
//! in the crate routes through this module.

use crate::dim::DimensionSpec;
use crate::error::{HartreeError, Result};
use crate::grid::{laplacian_mode_bc, BoundaryCondition, RadialField, RadialGrid};
use faer::Mat;

/// Largest spherical-harmonic mode accepted by the convolution routines;
/// beyond this the node powers r^{±(ℓ+n-2)} risk overflow on fine graded
/// grids and no consumer in the crate needs more.
pub const MAX_MODE: u32 = 32;

fn validate(grid: &RadialGrid, ell: u32, density: &RadialField) -> Result<()> {
    if density.ell != ell {
        return Err(HartreeError::Domain(format!(
            "density carries mode {} but convolution was requested at mode {ell}",
            density.ell
        )));
    }
    if density.values.len() != grid.len() {
        return Err(HartreeError::Domain(format!(
            "density has {} samples on a grid of {} nodes",
            density.values.len(),
            grid.len()
        )));
    }
    if ell > MAX_MODE {
        return Err(HartreeError::Domain(format!("mode {ell} exceeds supported maximum {MAX_MODE}")));
    }
    let q = (ell + grid.n() - 2) as i32;
    if !grid.nodes()[0].powi(-q).is_finite() {
        return Err(HartreeError::Domain(format!(
            "innermost node {:e} too small for mode {ell}",
            grid.nodes()[0]
        )));
    }
    Ok(())
}

fn kernel_coefficient(dim: DimensionSpec, ell: u32) -> f64 {
    let nf = dim.nf();
    (nf - 2.0) * dim.omega_n() / (2.0 * ell as f64 + nf - 2.0)
}

/// Mode-ℓ Newtonian potential by explicit kernel quadrature:
/// ψ_i = Σ_k ĝ_ℓ(r_i, r_k) ρ_k c_k with ĝ_ℓ(r, s) = coef · r_<^ℓ / r_>^{ℓ+n-2},
/// evaluated in O(N) with prefix/suffix sums (sequential, deterministic).
pub fn convolve_mode_kernel(grid: &RadialGrid, ell: u32, density: &RadialField) -> Result<RadialField> {
    validate(grid, ell, density)?;
    let nn = grid.len();
    let nodes = grid.nodes();
    let cell = grid.cell_mass();
    let coef = kernel_coefficient(grid.dim(), ell);
    let le = ell as i32;
    let qe = -(ell as i32 + grid.n() as i32 - 2);

    let rl: Vec<f64> = nodes.iter().map(|r| r.powi(le)).collect();
    let rq: Vec<f64> = nodes.iter().map(|r| r.powi(qe)).collect();

    // prefix a_i = Σ_{k ≤ i} r_k^ℓ ρ_k c_k, suffix b_i = Σ_{k > i} r_k^{-(ℓ+n-2)} ρ_k c_k
    let mut psi = vec![0.0f64; nn];
    let mut a = 0.0f64;
    for i in 0..nn {
        a += rl[i] * density.values[i] * cell[i];
        psi[i] = rq[i] * a;
    }
    let mut b = 0.0f64;
    for i in (0..nn).rev() {
        psi[i] = coef * (psi[i] + rl[i] * b);
        b += rq[i] * density.values[i] * cell[i];
    }
    Ok(RadialField::new(ell, psi))
}

/// Mode-ℓ Newtonian potential as the solution of the finite-volume problem
/// -Δ_ℓ ψ = (n-2) ω_n ρ with the exact-decay outer closure
/// ψ'(R) + ((ℓ+n-2)/R) ψ(R) = 0.
pub fn convolve_mode_bvp(grid: &RadialGrid, ell: u32, density: &RadialField) -> Result<RadialField> {
    validate(grid, ell, density)?;
    let op = laplacian_mode_bc(grid, ell, BoundaryCondition::Decay);
    let scale = (grid.dim().nf() - 2.0) * grid.dim().omega_n();
    let rhs: Vec<f64> = density
        .values
        .iter()
        .zip(grid.cell_mass())
        .map(|(rho, c)| scale * rho * c)
        .collect();
    let psi = op.solve_form(&rhs)?;
    Ok(RadialField::new(ell, psi))
}

/// Potential at the center of the ball. For ℓ = 0 this is
/// ω_n ∫_0^R ρ(s) s ds, computed with exact per-cell moments
/// ∫_{cell} s^{2-n} s^{n-1} ds = (g_i² - g_{i-1}²)/2 so that piecewise-
/// constant densities (shells) come out exactly; every ℓ ≥ 1 mode vanishes
/// at the origin.
pub fn center_value(grid: &RadialGrid, density: &RadialField) -> Result<f64> {
    if density.values.len() != grid.len() {
        return Err(HartreeError::Domain(format!(
            "density has {} samples on a grid of {} nodes",
            density.values.len(),
            grid.len()
        )));
    }
    if density.ell > 0 {
        return Ok(0.0);
    }
    let faces = grid.faces();
    let mut acc = 0.0;
    for i in 0..grid.len() {
        let moment = 0.5 * (faces[i + 1] * faces[i + 1] - faces[i] * faces[i]);
        acc += density.values[i] * moment;
    }
    Ok(grid.dim().omega_n() * acc)
}

/// Dense symmetric matrix of the mode kernel, Ĝ[i][k] = ĝ_ℓ(r_i, r_k)
/// (without cell masses). The eigenproblem assembly conjugates this with
/// its density diagonals, so routing it through here keeps the discrete
/// kernel bit-identical to `convolve_mode_kernel`'s prefix/suffix form.
pub fn mode_kernel_matrix(grid: &RadialGrid, ell: u32) -> Result<Mat<f64>> {
    if ell > MAX_MODE {
        return Err(HartreeError::Domain(format!("mode {ell} exceeds supported maximum {MAX_MODE}")));
    }
    let nn = grid.len();
    let nodes = grid.nodes();
    let coef = kernel_coefficient(grid.dim(), ell);
    let le = ell as i32;
    let qe = -(ell as i32 + grid.n() as i32 - 2);
    if !nodes[0].powi(qe).is_finite() {
        return Err(HartreeError::Domain(format!(
            "innermost node {:e} too small for mode {ell}",
            nodes[0]
        )));
    }
    let rl: Vec<f64> = nodes.iter().map(|r| r.powi(le)).collect();
    let rq: Vec<f64> = nodes.iter().map(|r| r.powi(qe)).collect();
    let mut m = Mat::<f64>::zeros(nn, nn);
    for i in 0..nn {
        for k in 0..=i {
            // r_k ≤ r_i here, so r_< = r_k and r_> = r_i.
            let v = coef * rl[k] * rq[i];
            m[(i, k)] = v;
            m[(k, i)] = v;
        }
    }
    Ok(m)
}
