use magiclattice::arith::{EisensteinInt, GaussianInt, Ring};
use magiclattice::clifford::{act, generate_clifford_qutrit};
use magiclattice::entangle::{
    concurrence_profile, f3, one_to_other_concurrence, pairwise_concurrence,
    pairwise_concurrence_2qubit, reduced_density, wootters_concurrence, DensityMatrixExact,
};
use magiclattice::lattice::{build_lattice, enumerate_shell, LatticeName, Shell};
use magiclattice::magic::{xi_alpha, MagicClass, WhTable};
use magiclattice::state::{dedup, vector_to_state, PureStateExact};
use proptest::prelude::*;

type G = GaussianInt;
type E = EisensteinInt;

fn gauss() -> impl Strategy<Value = G> {
    (-20i64..=20, -20i64..=20).prop_map(|(a, b)| G::new(a, b))
}

fn eis() -> impl Strategy<Value = E> {
    (-20i64..=20, -20i64..=20).prop_map(|(a, b)| E::new(a, b))
}

fn gvec(n: usize, r: i64) -> impl Strategy<Value = Vec<G>> {
    prop::collection::vec((-r..=r, -r..=r).prop_map(|(a, b)| G::new(a, b)), n)
        .prop_filter("nonzero", |v| v.iter().any(|z| !z.is_zero()))
}

fn evec(n: usize, r: i64) -> impl Strategy<Value = Vec<E>> {
    prop::collection::vec((-r..=r, -r..=r).prop_map(|(a, b)| E::new(a, b)), n)
        .prop_filter("nonzero", |v| v.iter().any(|z| !z.is_zero()))
}

/// Swap two qubits of a three-qubit register (big-endian).
fn swap_qubits(c: &[G], i: usize, j: usize) -> Vec<G> {
    let bit = |q: usize| 1usize << (2 - q);
    (0..8)
        .map(|k| {
            let (bi, bj) = (k & bit(i) != 0, k & bit(j) != 0);
            let mut src = k & !bit(i) & !bit(j);
            if bi {
                src |= bit(j);
            }
            if bj {
                src |= bit(i);
            }
            c[src]
        })
        .collect()
}

proptest! {
    #[test]
    fn gaussian_norm_is_multiplicative(a in gauss(), b in gauss()) {
        prop_assert_eq!((a * b).norm(), a.norm() * b.norm());
    }

    #[test]
    fn eisenstein_norm_is_multiplicative(a in eis(), b in eis()) {
        prop_assert_eq!((a * b).norm(), a.norm() * b.norm());
    }

    #[test]
    fn gcd_divides_both(a in eis(), b in eis()) {
        prop_assume!(!a.is_zero() || !b.is_zero());
        let g = a.gcd(b);
        prop_assert!(a.div_exact(g).is_some() && b.div_exact(g).is_some());
    }

    #[test]
    fn gaussian_canonical_form_is_ray_invariant(v in gvec(4, 6), u in 0usize..4, s in gauss()) {
        prop_assume!(!s.is_zero());
        let base = vector_to_state(&v).unwrap();
        let scaled: Vec<G> = v.iter().map(|&z| G::units()[u] * s * z).collect();
        prop_assert_eq!(&vector_to_state(&scaled).unwrap().components, &base.components);
        // idempotent
        prop_assert_eq!(vector_to_state(&base.components).unwrap(), base);
    }

    #[test]
    fn eisenstein_canonical_form_is_ray_invariant(v in evec(3, 6), u in 0usize..6, s in eis()) {
        prop_assume!(!s.is_zero());
        let base = vector_to_state(&v).unwrap();
        let scaled: Vec<E> = v.iter().map(|&z| E::units()[u] * s * z).collect();
        prop_assert_eq!(&vector_to_state(&scaled).unwrap().components, &base.components);
        prop_assert_eq!(vector_to_state(&base.components).unwrap(), base);
    }

    #[test]
    fn reduced_density_is_a_state(v in gvec(8, 4), keep in 0usize..6) {
        let psi = PureStateExact::new(&v).unwrap();
        let sets: [&[usize]; 6] = [&[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2]];
        let rho = reduced_density(&psi, sets[keep]).unwrap();
        prop_assert!(rho.is_hermitian());
        prop_assert!(rho.is_psd());
        prop_assert_eq!(rho.trace(), magiclattice::arith::ratio(1, 1));
    }

    #[test]
    fn f3_bounds_and_triangle(v in gvec(8, 4)) {
        let psi = PureStateExact::new(&v).unwrap();
        let (val, _) = f3(&psi).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&val));
        let c: Vec<f64> = (0..3).map(|i| one_to_other_concurrence(&psi, i).unwrap().0).collect();
        for i in 0..3 {
            prop_assert!(c[i] <= c[(i + 1) % 3] + c[(i + 2) % 3] + 1e-9);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&c[i]));
        }
    }

    #[test]
    fn profile_follows_qubit_relabelling(v in gvec(8, 3), swap in 0usize..3) {
        let (i, j) = [(0, 1), (0, 2), (1, 2)][swap];
        let psi = PureStateExact::new(&v).unwrap();
        let phi = PureStateExact::new(&swap_qubits(&v, i, j)).unwrap();
        let a = concurrence_profile(&psi, MagicClass::Intermediate).unwrap();
        let b = concurrence_profile(&phi, MagicClass::Intermediate).unwrap();
        let perm = |q: usize| if q == i { j } else if q == j { i } else { q };
        for q in 0..3 {
            prop_assert_eq!(&a.one_to_other_sq[q], &b.one_to_other_sq[perm(q)]);
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let x = pairwise_concurrence(&psi, p, q).unwrap();
            let (pp, qq) = (perm(p).min(perm(q)), perm(p).max(perm(q)));
            let y = pairwise_concurrence(&phi, pp, qq).unwrap();
            prop_assert!((x - y).abs() < 1e-9, "{} vs {}", x, y);
        }
        prop_assert_eq!(a.f3_sq, b.f3_sq);
    }

    #[test]
    fn qutrit_xi_is_clifford_invariant(v in evec(3, 5), k in 0usize..216) {
        let group = generate_clifford_qutrit().unwrap();
        let table = WhTable::<E>::for_dim(3).unwrap();
        let psi = PureStateExact::new(&v).unwrap();
        let img = act(&group[k], &psi).unwrap();
        prop_assert_eq!(xi_alpha(&table, &psi, 2).unwrap(), xi_alpha(&table, &img, 2).unwrap());
    }

    #[test]
    fn xi_lies_between_bound_and_one(v in gvec(4, 5)) {
        let table = WhTable::<G>::for_dim(4).unwrap();
        let psi = PureStateExact::new(&v).unwrap();
        let xi = xi_alpha(&table, &psi, 2).unwrap();
        prop_assert!(xi <= magiclattice::arith::ratio(1, 1));
        prop_assert!(xi >= magiclattice::arith::ratio(7, 16));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn wootters_matches_pure_formula(v in gvec(4, 6)) {
        let psi = PureStateExact::new(&v).unwrap();
        let pure = pairwise_concurrence_2qubit(&psi).unwrap().0;
        let mixed = wootters_concurrence(&DensityMatrixExact::pure(&psi)).unwrap();
        prop_assert!((pure - mixed).abs() <= 1e-10, "{} vs {}", pure, mixed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dedup_ignores_vector_order(seed in any::<u64>()) {
        use std::sync::OnceLock;
        static SHELL: OnceLock<Shell> = OnceLock::new();
        let shell = SHELL.get_or_init(|| enumerate_shell(&build_lattice(LatticeName::E8).unwrap(), 4).unwrap());
        let mut shuffled = shell.clone();
        // deterministic Fisher–Yates driven by a small LCG
        let mut x = seed | 1;
        for i in (1..shuffled.vectors.len()).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (x >> 33) as usize % (i + 1);
            shuffled.vectors.swap(i, j);
        }
        let a = dedup::<G>(shell).unwrap();
        let b = dedup::<G>(&shuffled).unwrap();
        let ca: Vec<_> = a.states.iter().map(|s| (&s.components, s.provenance.len())).collect();
        let cb: Vec<_> = b.states.iter().map(|s| (&s.components, s.provenance.len())).collect();
        prop_assert_eq!(ca, cb);
    }
}
