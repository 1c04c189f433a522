//! Dimension bookkeeping: exponents attached to n ∈ {3, 4, 5}.

use crate::error::{HartreeError, Result};

/// Spatial dimension together with the derived critical exponents.
///
/// * `p = (n+2)/(n-2)` — critical Hartree exponent; the equation couples the
///   convolution power `p-ε` with the local power `p-1-ε`.
/// * `alpha = n-2` — the Riesz/Newtonian kernel exponent `|x|^{-(n-2)}`.
/// * `two_star = 2n/(n-2)` — the critical Sobolev exponent (so `p = 2* - 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionSpec {
    n: u32,
    p: f64,
    alpha: f64,
    two_star: f64,
}

impl DimensionSpec {
    /// Build the spec for `n ∈ {3, 4, 5}`; other dimensions are rejected
    /// (the kernel exponent must satisfy `0 < n-2 < n` and the laboratory
    /// calibrations cover 3..5 only).
    pub fn new(n: u32) -> Result<Self> {
        if !(3..=5).contains(&n) {
            return Err(HartreeError::Domain(format!(
                "dimension n={n} unsupported; expected 3, 4 or 5"
            )));
        }
        let nf = n as f64;
        Ok(Self {
            n,
            p: (nf + 2.0) / (nf - 2.0),
            alpha: nf - 2.0,
            two_star: 2.0 * nf / (nf - 2.0),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Critical exponent p = (n+2)/(n-2).
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Kernel exponent α = n-2.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Critical Sobolev exponent 2* = 2n/(n-2).
    pub fn two_star(&self) -> f64 {
        self.two_star
    }

    /// Convolution power at perturbation ε: p - ε.
    pub fn p_eps(&self, eps: f64) -> f64 {
        self.p - eps
    }

    /// Surface area of the unit sphere S^{n-1}.
    pub fn omega_n(&self) -> f64 {
        crate::specfun::sphere_area(self.n).expect("n validated at construction")
    }

    /// Number of independent spherical harmonics of degree ℓ in ℝⁿ:
    /// N(n,0)=1, N(n,1)=n, and for ℓ≥2 the standard dimension formula
    /// (2ℓ+n-2)·(ℓ+n-3)! / (ℓ!·(n-2)!).
    pub fn harmonic_multiplicity(&self, ell: u32) -> usize {
        let n = self.n as u64;
        let l = ell as u64;
        if l == 0 {
            return 1;
        }
        // (2ℓ+n-2)/(ℓ+n-2) * C(ℓ+n-2, ℓ) stays integral; compute in u128.
        let binom = |top: u64, k: u64| -> u128 {
            let mut acc: u128 = 1;
            for i in 0..k {
                acc = acc * (top - i) as u128 / (i + 1) as u128;
            }
            acc
        };
        // N = C(ℓ+n-1, ℓ) - C(ℓ+n-3, ℓ-2) with the convention C(m,k)=0 for k<0.
        let a = binom(l + n - 1, l);
        let b = if l >= 2 { binom(l + n - 3, l - 2) } else { 0 };
        (a - b) as usize
    }
}
