//! Shell-theorem exactness, dual-backend agreement, and kernel-form
//! properties of the mode convolutions.

use hartree_core::grid::*;
use hartree_core::newtonian::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Grid with a double node hugging the shell radius `a`, so that the cell
/// face lands on the discontinuity to machine precision.
fn shell_grid(n: u32, a: f64, r_max: f64, count: usize) -> RadialGrid {
    let mut nodes: Vec<f64> = (1..=count)
        .map(|i| r_max * i as f64 / (count as f64 + 1.0))
        .collect();
    // gap wide enough that the transmissibility across it is well conditioned,
    // narrow enough that the shared face sits at `a` to machine precision
    nodes.retain(|r| (r - a).abs() > 2e-4);
    nodes.push(a - 5e-5);
    nodes.push(a + 5e-5);
    nodes.sort_by(f64::total_cmp);
    from_nodes(n, r_max, nodes).unwrap()
}

fn shell_density(grid: &RadialGrid, a: f64) -> RadialField {
    RadialField::new(
        0,
        grid.nodes().iter().map(|r| if *r < a { 1.0 } else { 0.0 }).collect(),
    )
}

#[test]
fn shell_theorem_exact_at_exterior_nodes() {
    let a = 0.6;
    for n in 3u32..=5 {
        let g = shell_grid(n, a, 1.5, 240);
        let rho = shell_density(&g, a);
        let omega = g.dim().omega_n();
        let ball = omega * a.powi(n as i32) / n as f64;

        let psi_k = convolve_mode_kernel(&g, 0, &rho).unwrap();
        let psi_b = convolve_mode_bvp(&g, 0, &rho).unwrap();

        for (i, r) in g.nodes().iter().enumerate() {
            if *r > a {
                let exact = ball * r.powi(2 - n as i32);
                for (tag, psi) in [("kernel", &psi_k), ("bvp", &psi_b)] {
                    let rel = (psi.values[i] - exact).abs() / exact;
                    assert!(rel < 1e-10, "n={n} {tag} r={r}: rel {rel:e}");
                }
            } else {
                // interior: mass-lumped, second order only
                let exact = omega * (r * r / n as f64 + (a * a - r * r) / 2.0);
                let rel = (psi_k.values[i] - exact).abs() / exact;
                assert!(rel < 2e-3, "n={n} interior r={r}: rel {rel:e}");
            }
        }

        // the two backends coincide at mode 0 up to rounding
        let scale = psi_k.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..g.len() {
            assert!(
                (psi_k.values[i] - psi_b.values[i]).abs() < 1e-11 * scale,
                "backend split at node {i}"
            );
        }

        // center value via exact cell moments
        let c = center_value(&g, &rho).unwrap();
        let rel = (c - omega * a * a / 2.0).abs() / (omega * a * a / 2.0);
        assert!(rel < 1e-12, "n={n} center rel {rel:e}");
    }
}

/// C^∞ bump supported in r < b, modulated by a few random waves.
fn random_smooth_density(grid: &RadialGrid, ell: u32, b: f64, rng: &mut ChaCha8Rng) -> RadialField {
    let c0: f64 = rng.gen_range(0.3..1.0);
    let c1: f64 = rng.gen_range(-0.5..0.5);
    let c2: f64 = rng.gen_range(-0.5..0.5);
    let k1: f64 = rng.gen_range(0.5..2.5);
    let k2: f64 = rng.gen_range(0.5..2.5);
    let values = grid
        .nodes()
        .iter()
        .map(|&r| {
            if r >= b {
                0.0
            } else {
                let t = r / b;
                let bump = (-1.0 / (1.0 - t * t)).exp();
                bump * (c0 + c1 * (k1 * r).cos() + c2 * (k2 * r).sin())
            }
        })
        .collect();
    RadialField::new(ell, values)
}

#[test]
fn dual_backends_agree_on_smooth_densities() {
    let g = make_radial_grid(3, 3.0, 1 << 16, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e65_7774);
    let mut worst = (0.0f64, 0u32);
    for trial in 0..50 {
        let ell = trial % 4;
        let rho = random_smooth_density(&g, ell, 2.0, &mut rng);
        let pk = convolve_mode_kernel(&g, ell, &rho).unwrap();
        let pb = convolve_mode_bvp(&g, ell, &rho).unwrap();
        let scale = pk.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut disc = 0.0f64;
        for i in 0..g.len() {
            disc = disc.max((pk.values[i] - pb.values[i]).abs());
        }
        let rel = disc / scale;
        if rel > worst.0 {
            worst = (rel, ell);
        }
        assert!(rel < 1e-8, "trial {trial} (ℓ={ell}): rel discrepancy {rel:e}");
    }
    eprintln!("worst dual-backend discrepancy: {:.3e} at ℓ={}", worst.0, worst.1);

    // At mode 0 the flux transmissibilities are exact on both homogeneous
    // branches, so the two backends coincide identically in exact arithmetic;
    // on a moderate grid the split is pure rounding.
    let g = make_radial_grid(3, 3.0, 2048, 1.0).unwrap();
    let rho = random_smooth_density(&g, 0, 2.0, &mut rng);
    let pk = convolve_mode_kernel(&g, 0, &rho).unwrap();
    let pb = convolve_mode_bvp(&g, 0, &rho).unwrap();
    let scale = pk.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let disc = pk
        .values
        .iter()
        .zip(&pb.values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(disc < 1e-10 * scale, "mode-0 split {:e}", disc / scale);
}

#[test]
fn backends_converge_to_each_other_at_second_order() {
    let mut errs = Vec::new();
    for count in [1024usize, 2048, 4096] {
        let g = make_radial_grid(3, 3.0, count, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = random_smooth_density(&g, 2, 2.0, &mut rng);
        let pk = convolve_mode_kernel(&g, 2, &rho).unwrap();
        let pb = convolve_mode_bvp(&g, 2, &rho).unwrap();
        let scale = pk.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let disc = pk
            .values
            .iter()
            .zip(&pb.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        errs.push(disc / scale);
    }
    assert!(errs[0] / errs[1] > 3.2, "refinement ratio {:.2}", errs[0] / errs[1]);
    assert!(errs[1] / errs[2] > 3.2, "refinement ratio {:.2}", errs[1] / errs[2]);
}

#[test]
fn kernel_form_is_symmetric() {
    let g = make_radial_grid(4, 2.0, 1024, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for ell in 0..4u32 {
        let f = RadialField::new(ell, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let h = RadialField::new(ell, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let kf = convolve_mode_kernel(&g, ell, &f).unwrap();
        let kh = convolve_mode_kernel(&g, ell, &h).unwrap();
        let s1 = g.mass_inner(&f.values, &kh.values);
        let s2 = g.mass_inner(&kf.values, &h.values);
        assert!(
            (s1 - s2).abs() <= 1e-12 * s1.abs().max(s2.abs()).max(1e-30),
            "ℓ={ell}: ⟨f,Kh⟩={s1:e} vs ⟨Kf,h⟩={s2:e}"
        );
    }
}

#[test]
fn kernel_matrix_matches_prefix_suffix_form() {
    let g = make_radial_grid(5, 1.0, 256, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for ell in [0u32, 1, 3] {
        let rho = RadialField::new(ell, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let psi = convolve_mode_kernel(&g, ell, &rho).unwrap();
        let m = mode_kernel_matrix(&g, ell).unwrap();
        for i in 0..g.len() {
            let mut acc = 0.0;
            for k in 0..g.len() {
                acc += m[(i, k)] * rho.values[k] * g.cell_mass()[k];
            }
            assert!(
                (acc - psi.values[i]).abs() < 1e-12 * acc.abs().max(1e-12),
                "ℓ={ell} node {i}: {acc:e} vs {:e}",
                psi.values[i]
            );
        }
        // symmetry of the raw kernel matrix
        for i in 0..g.len() {
            for k in 0..i {
                assert_eq!(m[(i, k)], m[(k, i)]);
            }
        }
    }
}

#[test]
fn zero_density_maps_to_zero_and_modes_are_validated() {
    let g = make_radial_grid(3, 1.0, 128, 0.0).unwrap();
    let zero = RadialField::new(1, vec![0.0; g.len()]);
    let pk = convolve_mode_kernel(&g, 1, &zero).unwrap();
    let pb = convolve_mode_bvp(&g, 1, &zero).unwrap();
    assert!(pk.values.iter().chain(&pb.values).all(|v| *v == 0.0));

    // mode mismatch and bad lengths are rejected
    assert!(convolve_mode_kernel(&g, 2, &zero).is_err());
    let short = RadialField::new(0, vec![1.0; 12]);
    assert!(convolve_mode_bvp(&g, 0, &short).is_err());
    assert!(center_value(&g, &short).is_err());
    let high = RadialField::new(MAX_MODE + 1, vec![0.0; g.len()]);
    assert!(convolve_mode_kernel(&g, MAX_MODE + 1, &high).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn mode_zero_potential_of_mass_is_positive(
        count in 64usize..192,
        grading in 0.0f64..2.0,
        r_max in 0.5f64..10.0,
        seed in 0u64..1u64 << 48,
    ) {
        let g = make_radial_grid(3, r_max, count, grading).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let hot = rng.gen_range(0..g.len());
        values[hot] += 1.0;
        let rho = RadialField::new(0, values);
        let pk = convolve_mode_kernel(&g, 0, &rho).unwrap();
        let pb = convolve_mode_bvp(&g, 0, &rho).unwrap();
        prop_assert!(pk.values.iter().all(|v| *v > 0.0));
        prop_assert!(pb.values.iter().all(|v| *v > 0.0));
    }
}
