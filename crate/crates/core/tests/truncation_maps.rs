use num_complex::Complex64;
use proptest::prelude::*;

use spectrunc_core::groupalg::{compress_rep, lipnorm, OpNormOptions};
use spectrunc_core::linalg::{is_hermitian, min_eigenvalue, spectral_norm};
use spectrunc_core::sampling;
use spectrunc_core::truncation::{
    compress, materialize, materialize_c64, reconstruct, truncated_derivative, truncated_lipnorm,
};
use spectrunc_core::{AlgebraElementF64, CayleyGraph, ExactToeplitz, GroupSpec, ToeplitzF64};

fn group(which: u8) -> CayleyGraph {
    match which % 3 {
        0 => CayleyGraph::new(GroupSpec::FreeAbelian(1)),
        1 => CayleyGraph::new(GroupSpec::FreeAbelian(2)),
        _ => CayleyGraph::new(GroupSpec::Heisenberg),
    }
}

fn random_f(g: &CayleyGraph, radius: u32, seed: u64) -> AlgebraElementF64 {
    sampling::random_element(&mut sampling::rng(seed), g.ball(radius).unwrap().elements())
}

#[test]
fn truncated_lipnorm_kernel_is_scalars() {
    for which in 0..3 {
        let g = group(which);
        for lambda in 1..=2 {
            for x in g.ball(2 * lambda).unwrap().elements() {
                let t = ToeplitzF64::new(lambda, AlgebraElementF64::delta(x.clone()), &g).unwrap();
                let l = truncated_lipnorm(&t, 1, &g).unwrap();
                assert_eq!(l == 0.0, *x == g.identity(), "Λ={lambda} x={x:?} L={l}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn q_is_positive(which in 0u8..3, seed in any::<u64>(), lambda in 1u32..=3) {
        let g = group(which);
        let a = random_f(&g, lambda, seed);
        let gram = a.convolve(&a.involution(&g).unwrap(), &g).unwrap();
        let m = materialize_c64(&compress(&gram, lambda, &g).unwrap(), &g).unwrap();
        prop_assert!(min_eigenvalue(&m) >= -1e-10 * (1.0 + gram.l1_norm()));
    }

    #[test]
    fn self_adjoint_iff_hermitian(which in 0u8..3, seed in any::<u64>(), lambda in 1u32..=2, symmetrize in any::<bool>()) {
        let g = group(which);
        let mut f = random_f(&g, 2 * lambda, seed);
        if symmetrize {
            f = f.add(&f.involution(&g).unwrap());
        }
        let t = ToeplitzF64::new(lambda, f, &g).unwrap();
        prop_assert_eq!(t.is_self_adjoint(&g), is_hermitian(&materialize(&t, &g).unwrap(), 0.0));
    }

    #[test]
    fn intertwining_exact(which in 0u8..3, seed in any::<u64>(), lambda in 1u32..=3, s in 1u32..=3) {
        let g = group(which);
        let mut rng = sampling::rng(seed);
        let f = sampling::random_rational_element(&mut rng, g.ball(2 * lambda + 2).unwrap().elements());
        prop_assert_eq!(
            compress(&f.derivative(s, &g).unwrap(), lambda, &g).unwrap(),
            truncated_derivative(&compress(&f, lambda, &g).unwrap(), s, &g).unwrap()
        );
        let sym = sampling::random_rational_element(&mut rng, g.ball(2 * lambda).unwrap().elements());
        let t = ExactToeplitz::new(lambda, sym, &g).unwrap();
        prop_assert_eq!(
            reconstruct(&truncated_derivative(&t, s, &g).unwrap(), &g).unwrap(),
            reconstruct(&t, &g).unwrap().derivative(s, &g).unwrap()
        );
    }

    #[test]
    fn maps_are_lip_contractive(which in 0u8..3, seed in any::<u64>(), lambda in 1u32..=2, s in 1u32..=2) {
        let g = group(which);
        let opts = OpNormOptions { tol: 1e-12, r_max: Some(2 * lambda + 3) };
        let f = random_f(&g, 2 * lambda + 1, seed);
        let lq = truncated_lipnorm(&compress(&f, lambda, &g).unwrap(), s, &g).unwrap();
        // L_s(f) dominates every compression P_R λ(dˢf) P_R, and R > Λ already dominates
        let df = f.derivative(s, &g).unwrap();
        let wider = spectral_norm(&compress_rep(&df, lambda + 2, &g).unwrap());
        prop_assert!(lq <= wider * (1.0 + 1e-12));

        let t = ToeplitzF64::new(lambda, random_f(&g, 2 * lambda, seed ^ 1), &g).unwrap();
        let lt = truncated_lipnorm(&t, s, &g).unwrap();
        let lr = lipnorm(&reconstruct(&t, &g).unwrap(), s, &opts, &g).unwrap().estimate;
        prop_assert!(lr <= lt * (1.0 + 1e-9) + 1e-12, "L_s(r T) = {lr} > L_s,Λ(T) = {lt}");
    }

    #[test]
    fn r_is_unital_and_positive(which in 0u8..3, seed in any::<u64>(), lambda in 1u32..=2) {
        let g = group(which);
        let id = ToeplitzF64::identity(lambda, &g);
        prop_assert_eq!(reconstruct(&id, &g).unwrap(), AlgebraElementF64::delta(g.identity()));
        let a = random_f(&g, lambda, seed);
        let t = compress(&a.convolve(&a.involution(&g).unwrap(), &g).unwrap(), lambda, &g).unwrap();
        let r = reconstruct(&t, &g).unwrap();
        for radius in 0..=lambda + 2 {
            let m = compress_rep(&r, radius, &g).unwrap();
            prop_assert!(min_eigenvalue(&m) >= -1e-10 * (1.0 + r.l1_norm()));
        }
        let scaled = t.scale(&Complex64::new(2.0, 0.0));
        prop_assert_eq!(reconstruct(&scaled, &g).unwrap(), r.scale(&Complex64::new(2.0, 0.0)));
    }
}
