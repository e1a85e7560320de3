//! Property tests for the structural invariants that hold across modules.

use proptest::prelude::*;
use subrank::cones::{
    cone_membership, imset_evaluate, witness_interior, xi_from_taus, PairIndex, SignVector,
    XiPattern,
};
use subrank::lattice::{
    modular_from_weights, table_from_csv, table_from_json, table_to_csv, table_to_json,
    Restriction, SetFunctionTable,
};
use subrank::{SetFunction, Subset};

fn finite_f64() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6f64, Just(0.0), Just(1.0 / 3.0), Just(-2.5e-3),]
}

fn table(n: usize) -> impl Strategy<Value = SetFunctionTable> {
    prop::collection::vec(finite_f64(), 1 << n)
        .prop_map(move |values| SetFunctionTable::new(n, values).unwrap())
}

fn mask(n: usize) -> impl Strategy<Value = Subset> {
    (0u32..(1u32 << n)).prop_map(Subset::from_bits)
}

fn sign_vector(n: usize) -> impl Strategy<Value = SignVector> {
    (0u32..(1u32 << (n - 1)))
        .prop_map(move |m| SignVector::from_negative_mask(n, Subset::from_bits(m << 1)).unwrap())
}

proptest! {
    // Store → load → identical bits, for both file formats.
    #[test]
    fn table_round_trips_exactly(f in table(4)) {
        let via_json = table_from_json(&table_to_json(&f)).unwrap();
        prop_assert_eq!(f.values(), via_json.values());
        let via_csv = table_from_csv(&table_to_csv(&f)).unwrap();
        prop_assert_eq!(f.values(), via_csv.values());
    }

    // Composition of restrictions under index lifting.
    #[test]
    fn restriction_composes(f in table(5), b1 in mask(5), inner in mask(5)) {
        let a1 = b1 & inner;
        prop_assume!(b1.len() < 5);
        let view1 = Restriction::new(&f, a1, b1).unwrap();
        let m = view1.ground_size();
        let g = f.restrict(a1, b1).unwrap();

        // Pick the inner (A2, B2) on the restricted ground set from `inner`.
        let b2 = Subset::from_bits(inner.bits() & ((1u32 << m) - 1));
        prop_assume!(b2.len() < m);
        let a2 = Subset::from_bits(b2.bits() & 0b1010_1010);
        let h = g.restrict(a2, b2).unwrap();

        let lifted_a2 = view1.lift(a2);
        let lifted_b2 = view1.lift(b2);
        let direct = f.restrict(a1 | lifted_a2, b1 | lifted_b2).unwrap();
        prop_assert_eq!(h.values(), direct.values());
    }

    // Discrete derivative is linear in the function argument.
    #[test]
    fn derivative_is_linear(f in table(4), g in table(4), s in mask(4), e in 1usize..=4) {
        let sum = f.add(&g).unwrap();
        let lhs = sum.discrete_derivative(e, s).unwrap();
        let rhs = f.discrete_derivative(e, s).unwrap() + g.discrete_derivative(e, s).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs().max(rhs.abs())));
    }

    // Modular functions: derivative independent of the context set, and
    // every imset row vanishes.
    #[test]
    fn modular_tables_are_flat(
        w in prop::collection::vec(-100.0f64..100.0, 4),
        c0 in -10.0f64..10.0,
        e in 1usize..=4,
    ) {
        let f = modular_from_weights(&w, c0).unwrap();
        let base = f.discrete_derivative(e, Subset::EMPTY).unwrap();
        for s in subrank::lattice::all_masks(4) {
            if !s.contains(e) {
                let d = f.discrete_derivative(e, s).unwrap();
                prop_assert!((d - base).abs() <= 1e-9);
            }
        }
        for p in PairIndex::all(4) {
            for v in imset_evaluate(&f, p.i(), p.j()).unwrap() {
                prop_assert!(v.abs() <= 1e-9);
            }
        }
        // Modular members satisfy every pattern cone.
        prop_assert!(cone_membership(&f, &XiPattern::supermodular(4), 1e-7).unwrap());
        prop_assert!(cone_membership(&f, &XiPattern::submodular(4), 1e-7).unwrap());
    }

    // Sums of cone members land in the shared-pattern cone.
    #[test]
    fn member_sums_close_under_shared_pattern(
        t1 in sign_vector(4),
        t2 in sign_vector(4),
        w in prop::collection::vec(-5.0f64..5.0, 4),
        scale1 in 0.1f64..4.0,
        scale2 in 0.1f64..4.0,
    ) {
        let f = witness_interior(&XiPattern::from_sign_vector(&t1)).unwrap().scale(scale1).unwrap();
        let noise = modular_from_weights(&w, 0.0).unwrap();
        let g = witness_interior(&XiPattern::from_sign_vector(&t2)).unwrap().scale(scale2).unwrap()
            .add(&noise).unwrap();
        prop_assert!(cone_membership(&f, &XiPattern::from_sign_vector(&t1), 1e-9).unwrap());
        prop_assert!(cone_membership(&g, &XiPattern::from_sign_vector(&t2), 1e-9).unwrap());
        let sum = f.add(&g).unwrap();
        let shared = xi_from_taus(&[t1, t2]).unwrap();
        prop_assert!(cone_membership(&sum, &shared, 1e-9).unwrap());
    }

    // The all-zero pattern accepts everything.
    #[test]
    fn zero_pattern_accepts_all(f in table(3)) {
        prop_assert!(cone_membership(&f, &XiPattern::zero(3), 0.0).unwrap());
    }

    // Restriction views evaluate through the lifted mask.
    #[test]
    fn restriction_view_matches_dense(f in table(4), b in mask(4), pick in mask(4)) {
        prop_assume!(b.len() < 4);
        let a = b & pick;
        let view = Restriction::new(&f, a, b).unwrap();
        let dense = f.restrict(a, b).unwrap();
        for c in subrank::lattice::all_masks(view.ground_size()) {
            prop_assert_eq!(view.value(c), dense.value_at(c));
        }
    }
}
