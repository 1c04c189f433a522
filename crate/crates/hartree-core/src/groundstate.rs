//! Ground states of the slightly-subcritical Hartree problem on a ball,
//!
//! ```text
//!     -Δu = (|x|^{-(n-2)} ∗ u^{p-ε}) u^{p-1-ε},   u > 0 in B_R,  u|_{∂B_R} = 0,
//! ```
//!
//! by damped Picard iteration with a projective rescaling step, together with
//! the blow-up diagnostics (concentration scale, rescaled profile error,
//! bubble domination, outer Green-profile comparison) that quantify the
//! ε → 0 concentration behaviour.

use crate::bubble;
use crate::dim::DimensionSpec;
use crate::error::{HartreeError, Result};
use crate::greens::{green_ball, BallDomain};
use crate::grid::{laplacian_mode_bc, BoundaryCondition, ModeOperator, RadialField, RadialGrid};
use crate::newtonian::convolve_mode_kernel;
use crate::specfun::ConstantSet;

/// Solver controls for [`solve_ground_state`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Convergence threshold on the discrete sup-norm PDE residual, measured
    /// relative to the sup of the nonlinear side (see [`GroundState::residual`]).
    pub tol: f64,
    /// Iteration cap before reporting non-convergence.
    pub max_iter: usize,
    /// Outer closure: `Dirichlet` for the ball problem (ε ∈ [0.02, 0.5]),
    /// `Decay` for the free-space surrogate (allows ε = 0).
    pub boundary: BoundaryCondition,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            // The Picard contraction weakens as ε shrinks; leave generous
            // headroom, the iterations are cheap O(N) sweeps.
            max_iter: 6000,
            boundary: BoundaryCondition::Dirichlet,
        }
    }
}

/// A converged radial ground state.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub dim: DimensionSpec,
    pub eps: f64,
    pub grid: RadialGrid,
    /// Nodal values of u (mode ℓ = 0).
    pub u: RadialField,
    /// ‖u‖_∞ over the grid.
    pub sup_norm: f64,
    /// Concentration scale μ_ε = ‖u‖_∞^{(4-(n-2)ε)/(2(n-2))}.
    pub mu: f64,
    /// Final discrete PDE residual: sup_i |(-Δu)_i - N_i| / sup_i |N_i| with
    /// N = (K ∗ u^{p-ε}) u^{p-1-ε}.  Normalizing by the equation scale keeps
    /// the measure meaningful near the origin, where division by the tiny
    /// cell volumes amplifies solver roundoff in the un-normalized residual.
    pub residual: f64,
    /// The closure the state was solved under (the linearization must reuse it).
    pub boundary: BoundaryCondition,
}

/// Blow-up diagnostics of a ground state against the bubble asymptotics.
#[derive(Debug, Clone)]
pub struct BlowupDiagnostics {
    /// ε‖u‖²_∞ (tends to a positive constant as ε → 0).
    pub eps_supnorm_sq: f64,
    /// ‖u‖_∞^ε (tends to 1).
    pub supnorm_to_eps: f64,
    /// sup over |x| ≤ 5 of |ũ_ε - W[0,μ*]| where ũ_ε(x) = ‖u‖_∞^{-1} u(x/μ_ε)
    /// and μ* = c̃^{-2/(n-2)} is the dilate with unit centre value, the actual
    /// limit of the ũ normalization (which fixes ũ(0) = 1 exactly).
    pub profile_error: f64,
    /// Smallest C with ũ_ε ≤ C·W[0,1] over the rescaled grid.
    pub domination_constant: f64,
    /// max over r ∈ [0.5R, 0.9R] of |‖u‖_∞ u(r) - 𝒦_n G(r,0)| / 𝒦_n G(r,0):
    /// the outer-region Green-profile law.
    pub green_profile_error: f64,
}

fn concentration_scale(dim: &DimensionSpec, eps: f64, sup_norm: f64) -> f64 {
    let nf = dim.nf();
    sup_norm.powf((4.0 - (nf - 2.0) * eps) / (2.0 * (nf - 2.0)))
}

/// First node at which positivity or radial monotonicity fails, if any.
/// `slack` is the tolerated uphill step relative to the sup of the field;
/// positivity is always strict.
fn shape_violation_with(u: &[f64], slack: f64) -> Option<usize> {
    let sup = u.iter().cloned().fold(0.0, f64::max);
    for i in 0..u.len() {
        if !(u[i] > 0.0) {
            return Some(i);
        }
        if i + 1 < u.len() && u[i + 1] > u[i] + slack * sup {
            return Some(i);
        }
    }
    None
}

fn shape_violation(u: &[f64]) -> Option<usize> {
    shape_violation_with(u, 1e-12)
}

/// The scale-invariant energy quotient a(u,u) / D(u)^{1/(p-ε)} with
/// D(u) = ∬ u^{p-ε}(x) u^{p-ε}(y) |x-y|^{2-n}: the minimized functional.
fn energy_quotient(
    grid: &RadialGrid,
    op: &ModeOperator,
    p_eps: f64,
    u: &[f64],
) -> Result<f64> {
    let pw: Vec<f64> = u.iter().map(|v| v.powf(p_eps)).collect();
    let phi = convolve_mode_kernel(
        grid,
        0,
        &RadialField {
            ell: 0,
            values: pw.clone(),
        },
    )?;
    let double_int = grid.mass_inner(&pw, &phi.values);
    if !(double_int > 0.0) {
        return Err(HartreeError::Domain(
            "interaction integral is not positive".into(),
        ));
    }
    let a_form: f64 = op
        .stiffness()
        .matvec(u)
        .iter()
        .zip(u)
        .map(|(av, v)| av * v)
        .sum();
    Ok(a_form / double_int.powf(1.0 / p_eps))
}

/// One-parameter pre-solve: pick the truncated-bubble scale μ₀ minimizing the
/// energy quotient, as the Picard seed.
fn seed_scale(
    grid: &RadialGrid,
    op: &ModeOperator,
    dim: &DimensionSpec,
    p_eps: f64,
) -> Result<f64> {
    let r_out = grid.r_outer();
    let lo: f64 = 0.2;
    let hi: f64 = (6.0e3 / r_out).max(8.0);
    let count = 48;
    let mut best = (f64::INFINITY, lo);
    for k in 0..count {
        let t = k as f64 / (count - 1) as f64;
        let mu = lo * (hi / lo).powf(t);
        let candidate: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&r| bubble::w_radial(dim, mu, r))
            .collect();
        let q = energy_quotient(grid, op, p_eps, &candidate)?;
        if q < best.0 {
            best = (q, mu);
        }
    }
    Ok(best.1)
}

/// Solve the ball problem (or its free-space surrogate under a `Decay`
/// closure) by damped Picard iteration
///
/// ```text
///     û = (-Δ)^{-1} [ (K ∗ u^{p-ε}) u^{p-1-ε} ],
/// ```
///
/// followed each step by the projective rescaling û → cû with
/// c^{2(p-ε)-2} = ⟨Aû,û⟩/⟨N(û),û⟩, which pins the amplitude using the
/// homogeneity degree 2(p-ε)-1 of the nonlinearity (the degree-2 mismatch of
/// the two forms makes c the unique consistent multiplier).
pub fn solve_ground_state(
    dim: &DimensionSpec,
    eps: f64,
    grid: &RadialGrid,
    opts: &SolveOptions,
) -> Result<GroundState> {
    if grid.n() != dim.n() {
        return Err(HartreeError::Config(format!(
            "grid dimension {} does not match requested dimension {}",
            grid.n(),
            dim.n()
        )));
    }
    if !eps.is_finite() || !(0.0..=0.5).contains(&eps) {
        return Err(HartreeError::Config(format!(
            "subcriticality ε must lie in [0, 0.5], got {eps}"
        )));
    }
    match opts.boundary {
        BoundaryCondition::Dirichlet => {
            // Below ε = 0.02 the concentration scale outruns any desk-size
            // grid; the bound is enforced as configuration.
            if eps < 0.02 {
                return Err(HartreeError::Config(format!(
                    "Dirichlet ground states need ε >= 0.02 (got {eps}); \
                     use the Decay closure for the ε → 0 surrogate"
                )));
            }
        }
        BoundaryCondition::Decay => {}
    }
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(HartreeError::Config(
            "solver options need tol > 0 and max_iter >= 1".into(),
        ));
    }

    let p_eps = dim.p_eps(eps); // p - ε
    let p_eps1 = p_eps - 1.0; // p - 1 - ε
    let op = laplacian_mode_bc(grid, 0, opts.boundary);
    let nn = grid.len();

    // At ε = 0 the continuum quotient is dilation-invariant, so the scan
    // would pick an arbitrary (typically unresolved) dilate; seed the
    // canonical scale instead and let the grid's weak symmetry breaking
    // settle the rest.
    let mu0 = if eps == 0.0 {
        1.0
    } else {
        seed_scale(grid, &op, dim, p_eps)?
    };
    let mut u: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&r| bubble::w_radial(dim, mu0, r))
        .collect();

    // Once the fast modes die out, the error rides a single slow mode with
    // per-step ratio 1/λ₂ = 1/(1+O(ε)); periodic Aitken extrapolation along
    // that mode replaces thousands of crawling steps with one jump.
    let extrap_period = 50usize;
    let mut snap_a: Option<Vec<f64>> = None;
    let mut snap_b: Option<Vec<f64>> = None;

    let mut prev_quotient = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for iter in 0..opts.max_iter {
        // Nonlinearity at the current iterate.
        let pw: Vec<f64> = u.iter().map(|v| v.powf(p_eps)).collect();
        let phi = convolve_mode_kernel(
            grid,
            0,
            &RadialField {
                ell: 0,
                values: pw.clone(),
            },
        )?;
        let nonlinear: Vec<f64> = (0..nn)
            .map(|i| phi.values[i] * u[i].powf(p_eps1))
            .collect();

        // Discrete sup-norm residual of -Δu = N(u), normalized by the sup of
        // the right-hand side.  The normalization matters: dividing the row
        // residual of the tridiagonal solve by the tiny near-origin cell
        // masses pins the *absolute* pointwise residual at an fp floor of
        // order ulp(T·u)/c_0 — a floor no f64 grid function can beat, since
        // even the exact discrete solution rounded to f64 lands on it.
        let lap = op.apply_pointwise(&u);
        let raw = lap
            .iter()
            .zip(&nonlinear)
            .map(|(l, n)| (l - n).abs())
            .fold(0.0, f64::max);
        let nl_sup = nonlinear.iter().cloned().fold(0.0, f64::max);
        residual = if nl_sup > 0.0 { raw / nl_sup } else { raw };

        // Scale-invariant quotient must not increase along accepted steps.
        let double_int = grid.mass_inner(&pw, &phi.values);
        let a_form: f64 = op
            .stiffness()
            .matvec(&u)
            .iter()
            .zip(&u)
            .map(|(av, v)| av * v)
            .sum();
        let quotient = a_form / double_int.powf(1.0 / p_eps);
        // Tolerate the fp noise floor of the two long form evaluations
        // (relative plus matching absolute term); a genuine ascent — the
        // signature of an assembly bug — exceeds this by orders of magnitude.
        if quotient > prev_quotient * (1.0 + 1e-10) + 1e-12 {
            return Err(HartreeError::NoConvergence {
                context: format!(
                    "energy quotient increased from {prev_quotient} to {quotient} \
                     at iteration {iter}"
                ),
                iters: iter,
                residual,
            });
        }
        prev_quotient = quotient;

        if residual < opts.tol {
            let sup_norm = u.iter().cloned().fold(0.0, f64::max);
            return Ok(GroundState {
                dim: *dim,
                eps,
                grid: grid.clone(),
                u: RadialField { ell: 0, values: u },
                sup_norm,
                mu: concentration_scale(dim, eps, sup_norm),
                residual,
                boundary: opts.boundary,
            });
        }

        // Picard solve with the nonlinearity as an integrated load.
        let load: Vec<f64> = nonlinear
            .iter()
            .zip(grid.cell_mass())
            .map(|(v, c)| v * c)
            .collect();
        let hat = op.solve_form(&load)?;
        // ⟨A û, û⟩ = ⟨load, û⟩ since û solves A û = load.
        let energy: f64 = load.iter().zip(&hat).map(|(b, v)| b * v).sum();
        let hat_pw: Vec<f64> = hat.iter().map(|v| v.powf(p_eps)).collect();
        let hat_phi = convolve_mode_kernel(
            grid,
            0,
            &RadialField {
                ell: 0,
                values: hat_pw.clone(),
            },
        )?;
        let hat_pairing = grid.mass_inner(&hat_phi.values, &hat_pw);
        if !(energy > 0.0) || !(hat_pairing > 0.0) {
            return Err(HartreeError::NoConvergence {
                context: "Picard step produced a nonpositive form value".into(),
                iters: iter,
                residual,
            });
        }
        let scale = (energy / hat_pairing).powf(1.0 / (2.0 * p_eps - 2.0));

        let damping = if iter < 10 { 0.5 } else { 1.0 };
        let mut step_sup = 0.0f64;
        for i in 0..nn {
            let next = (1.0 - damping) * u[i] + damping * scale * hat[i];
            step_sup = step_sup.max((next - u[i]).abs());
            u[i] = next;
        }
        // An exact floating-point fixed point of the map cannot improve any
        // further; stop rather than spin out the remaining iterations.
        if step_sup == 0.0 {
            return Err(HartreeError::NoConvergence {
                context: format!(
                    "iteration froze at a floating-point fixed point with \
                     residual {residual:e} above tol {} at iteration {iter}",
                    opts.tol
                ),
                iters: iter,
                residual,
            });
        }

        // Positivity and radial monotonicity of every accepted iterate.
        if let Some(node) = shape_violation(&u) {
            return Err(HartreeError::NoConvergence {
                context: format!("iterate lost positivity/monotonicity at node {node}"),
                iters: iter,
                residual,
            });
        }

        if (iter + 1) % extrap_period == 0 {
            if let (Some(a), Some(b)) = (&snap_a, &snap_b) {
                let mut num = 0.0;
                let mut den = 0.0;
                let mut d2_norm = 0.0;
                for i in 0..nn {
                    let c = grid.cell_mass()[i];
                    let d1 = b[i] - a[i];
                    let d2 = u[i] - b[i];
                    num += c * d2 * d1;
                    den += c * d1 * d1;
                    d2_norm += c * d2 * d2;
                }
                if den > 0.0 && d2_norm > 0.0 {
                    let rho = num / den;
                    let alignment = num * num / (den * d2_norm);
                    // Only extrapolate when one mode clearly dominates.
                    if rho > 0.2 && rho < 0.9995 && alignment > 0.95 {
                        let gain = rho / (1.0 - rho);
                        let cand: Vec<f64> = (0..nn)
                            .map(|i| u[i] + gain * (u[i] - b[i]))
                            .collect();
                        // Allow a little monotonicity slack on the jump; the
                        // next Picard sweeps smooth it out, and strict
                        // positivity still rules out bad candidates.
                        if shape_violation_with(&cand, 1e-9).is_none() {
                            u = cand;
                            // The jump leaves the Picard path; restart the
                            // quotient reference at the new point.
                            prev_quotient = f64::INFINITY;
                        }
                    }
                }
            }
            snap_a = snap_b.take();
            snap_b = Some(u.clone());
        }
    }

    Err(HartreeError::NoConvergence {
        context: format!(
            "ground-state iteration did not reach tol {} within {} iterations",
            opts.tol, opts.max_iter
        ),
        iters: opts.max_iter,
        residual,
    })
}

impl GroundState {
    /// The rescaled profile ũ(x) = ‖u‖_∞^{-1} u(x/μ_ε) at |x| = s, by grid
    /// interpolation.
    pub fn rescaled_profile(&self, s: f64) -> Result<f64> {
        let r = s / self.mu;
        Ok(self.grid.interp(&self.u.values, r)? / self.sup_norm)
    }

    /// CSV block of the radial profile (`r,u`, one row per node).
    pub fn profile_csv(&self) -> String {
        let mut out = String::from("r,u\n");
        for (r, v) in self.grid.nodes().iter().zip(&self.u.values) {
            out.push_str(&format!("{r:.16e},{v:.16e}\n"));
        }
        out
    }

    /// Metadata sidecar (key=value lines) describing the solve.
    pub fn metadata(&self) -> String {
        format!(
            "dim={}\neps={:.16e}\nradius={:.16e}\nnodes={}\ngrading={:.16e}\n\
             boundary={:?}\nsup_norm={:.16e}\nmu={:.16e}\nresidual={:.16e}\n",
            self.dim.n(),
            self.eps,
            self.grid.r_outer(),
            self.grid.len(),
            self.grid.grading(),
            self.boundary,
            self.sup_norm,
            self.mu,
            self.residual
        )
    }
}

/// Blow-up diagnostics of a converged state against the bubble limit.
pub fn blowup_diagnostics(
    state: &GroundState,
    constants: &ConstantSet,
) -> Result<BlowupDiagnostics> {
    let dim = &state.dim;
    let nf = dim.nf();
    let c_tilde = constants.c_tilde;
    // ũ(0) = 1 exactly by construction, so the limit dilate is the one with
    // unit centre value: μ* = c̃^{-2/(n-2)}, W[0,μ*](x) = (1+μ*²|x|²)^{-(n-2)/2}.
    let mu_star = c_tilde.powf(-2.0 / (nf - 2.0));

    let samples = 400;
    let mut profile_error: f64 = 0.0;
    for j in 0..=samples {
        let s = 5.0 * j as f64 / samples as f64;
        let r = s / state.mu;
        if r > state.grid.r_outer() {
            break;
        }
        let rescaled = state.rescaled_profile(s)?;
        let limit = bubble::w_radial(dim, mu_star, s);
        profile_error = profile_error.max((rescaled - limit).abs());
    }

    let mut domination_constant: f64 = 0.0;
    for (r, v) in state.grid.nodes().iter().zip(&state.u.values) {
        let ratio = (v / state.sup_norm) / bubble::w_radial(dim, 1.0, state.mu * r);
        domination_constant = domination_constant.max(ratio);
    }

    let ball = BallDomain::new(dim.n(), state.grid.r_outer())?;
    let mut green_profile_error: f64 = 0.0;
    for j in 0..9 {
        let r = state.grid.r_outer() * (0.5 + 0.05 * j as f64);
        let mut x = vec![0.0; dim.n() as usize];
        x[0] = r;
        let g = green_ball(&ball, &x, &vec![0.0; dim.n() as usize])?;
        let outer = constants.k_n * g;
        let err = (state.sup_norm * state.grid.interp(&state.u.values, r)? - outer).abs()
            / outer.abs();
        green_profile_error = green_profile_error.max(err);
    }

    Ok(BlowupDiagnostics {
        eps_supnorm_sq: state.eps * state.sup_norm * state.sup_norm,
        supnorm_to_eps: state.sup_norm.powf(state.eps),
        profile_error,
        domination_constant,
        green_profile_error,
    })
}
