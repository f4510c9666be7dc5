mod common;

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use proptest::prelude::*;

use stacky_fan::fan::{
    check_subdivides, cone_over_triangulation, dominate_subdivision, is_crepant, is_smooth,
    orthant_fan, primitive_generator, star_subdivision,
};
use stacky_fan::glue::{assemble_global, FaceGluing, FaceRef, LocalChart};
use stacky_fan::lattice::{
    is_primitive, lattice_index, smith_normal_form, CongruenceLattice, IntMatrix, IntVector,
    Lattice,
};
use stacky_fan::simplex::{FaceSelector, Permutation};
use stacky_fan::symmetric::equivariant_dilation_refinement;
use stacky_fan::triangulation::{
    canonical_form, enumerate_unimodular, is_invariant, is_unimodular, refines, restrict_to_face,
    validate, Triangulation,
};

fn level3() -> &'static [Triangulation] {
    static CELL: OnceLock<Vec<Triangulation>> = OnceLock::new();
    CELL.get_or_init(|| enumerate_unimodular(2, 3, 35).unwrap())
}

fn tetra2() -> &'static [Triangulation] {
    static CELL: OnceLock<Vec<Triangulation>> = OnceLock::new();
    CELL.get_or_init(|| enumerate_unimodular(3, 2, 35).unwrap())
}

fn perm(k: usize) -> impl Strategy<Value = Permutation> {
    Just((0..k).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5)
        .prop_flat_map(|(m, n)| prop::collection::vec(prop::collection::vec(-20i64..=20, n), m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn snf_factors_and_chains(rows in matrix()) {
        let a = IntMatrix::from_i64_rows(&rows).unwrap();
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d.clone());
        prop_assert!(s.u.det().unwrap().abs().is_one());
        prop_assert!(s.v.det().unwrap().abs().is_one());
        let dets = common::determinantal_divisors(&rows);
        let mut acc = BigInt::one();
        for (k, d) in s.divisors.iter().enumerate() {
            prop_assert!(!d.is_negative());
            acc *= d;
            prop_assert_eq!(&acc, &BigInt::from(dets[k]));
        }
        prop_assert_eq!(smith_normal_form(&a), s);
    }

    #[test]
    fn primitive_generators(v in prop::collection::vec(-12i64..=12, 2..=4), n in 1u64..=7) {
        prop_assume!(v.iter().any(|&x| x != 0));
        let lat = CongruenceLattice::new(v.len(), n).unwrap();
        let p = primitive_generator(&v, &lat).unwrap();
        let pv = IntVector::from_i64(&p);
        prop_assert!(lat.contains(&pv));
        prop_assert!(is_primitive(&pv, &Lattice::Congruence(lat)).unwrap());
        // p is a positive rational multiple of v
        let i = v.iter().position(|&x| x != 0).unwrap();
        prop_assert!(p[i].signum() == v[i].signum());
        for j in 0..v.len() {
            prop_assert_eq!(p[j] as i128 * v[i] as i128, p[i] as i128 * v[j] as i128);
        }
    }

    #[test]
    fn congruence_index(d in 1usize..=4, n in 1u64..=9) {
        let ln = Lattice::Congruence(CongruenceLattice::new(d, n).unwrap());
        let full = Lattice::Congruence(CongruenceLattice::full(d));
        let scaled = Lattice::Basis(IntMatrix::diagonal(&vec![n as i64; d]));
        prop_assert_eq!(lattice_index(&ln, &full).unwrap(), BigInt::from(n));
        prop_assert_eq!(lattice_index(&scaled, &ln).unwrap(), BigInt::from(n).pow(d as u32 - 1));
    }

    #[test]
    fn symmetry_preserves_validity(i in 0usize..79, g in perm(3)) {
        let t = &level3()[i];
        let moved = t.permuted(&g).unwrap();
        prop_assert!(validate(&moved).is_valid());
        prop_assert!(is_unimodular(&moved).unwrap());
        prop_assert_eq!(canonical_form(&moved).unwrap(), canonical_form(t).unwrap());
        prop_assert!(level3().contains(&moved));
        prop_assert_eq!(moved.permuted(&g.inverse()).unwrap(), t.clone());
    }

    #[test]
    fn faces_of_tetrahedral_triangulations(i in 0usize..192, face in prop::sample::subsequence(vec![0usize, 1, 2, 3], 1..=4)) {
        let t = &tetra2()[i];
        let sel = FaceSelector::new(face.iter().copied(), 3).unwrap();
        let sub = restrict_to_face(t, &sel).unwrap();
        prop_assert_eq!(sub.r(), face.len() - 1);
        prop_assert!(is_unimodular(&sub).unwrap());
        prop_assert_eq!(sub.total_volume(), 2u128.pow(sub.r() as u32));
    }

    #[test]
    fn json_round_trip(i in 0usize..79) {
        let t = &level3()[i];
        let s = serde_json::to_string(t).unwrap();
        let back: Triangulation = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(&back, t);
    }

    #[test]
    fn fans_are_smooth_and_crepant(i in 0usize..192) {
        let t = &tetra2()[i];
        let fan = cone_over_triangulation(t).unwrap();
        prop_assert!(is_smooth(&fan).unwrap().smooth);
        prop_assert!(is_crepant(&fan, &orthant_fan(3, 2).unwrap()).unwrap());
        prop_assert!(check_subdivides(&fan, &orthant_fan(3, 2).unwrap()).is_ok());
    }

    #[test]
    fn invariant_entries_glue(isos in prop::collection::vec(perm(3), 1..6)) {
        let medial = enumerate_unimodular(2, 2, 35).unwrap().into_iter().find(|t| is_invariant(t).unwrap()).unwrap();
        let gluings: Vec<FaceGluing> = isos
            .into_iter()
            .map(|iso| FaceGluing {
                a: FaceRef { chart: 0, face: vec![0, 1, 2] },
                b: FaceRef { chart: 1, face: vec![0, 1, 2] },
                iso,
            })
            .collect();
        let charts = [LocalChart { id: 0, rank: 3 }, LocalChart { id: 1, rank: 3 }];
        prop_assert!(assemble_global(&charts, &gluings, &[medial]).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn star_subdivisions_subdivide(p in prop::collection::vec(1i64..=6, 3), n in 1u64..=4) {
        let lat = CongruenceLattice::new(3, n).unwrap();
        let rho = primitive_generator(&p, &lat).unwrap();
        let base = orthant_fan(2, n).unwrap();
        let star = star_subdivision(&base, &rho).unwrap();
        prop_assert!(check_subdivides(&star, &base).is_ok());
        prop_assert!(star.rays().contains(&rho));
        let dom = dominate_subdivision(&star, 4, 20_000).unwrap();
        prop_assert!(dom.verify(&star));
        prop_assert!(is_unimodular(&dom.triangulation).unwrap());
        prop_assert_eq!(dom.level % n, 0);
    }

    #[test]
    fn dilations_compose(a in 1u64..=3, b in 1u64..=3, medial in any::<bool>()) {
        let t = if medial {
            enumerate_unimodular(2, 2, 35).unwrap().into_iter().find(|t| is_invariant(t).unwrap()).unwrap()
        } else {
            Triangulation::single_cell(2, 1).unwrap()
        };
        let ta = equivariant_dilation_refinement(&t, a).unwrap();
        let tab = equivariant_dilation_refinement(&ta, b).unwrap();
        prop_assert_eq!(&tab, &equivariant_dilation_refinement(&t, a * b).unwrap());
        prop_assert!(is_invariant(&tab).unwrap());
        let c1 = refines(&ta, &t).unwrap();
        let c2 = refines(&tab, &ta).unwrap();
        prop_assert!(c2.compose(&c1).unwrap().verify(&tab, &t));
    }
}

#[test]
fn enumeration_matches_brute_force() {
    for (r, n) in [(1usize, 4i64), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2)] {
        let got = enumerate_unimodular(r, n as u64, 35).unwrap();
        assert_eq!(
            got.len(),
            common::count_unimodular_triangulations(r, n),
            "({r},{n})"
        );
        let mut dedup = got.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), got.len());
    }
}

#[test]
fn degenerate_vectors_are_rejected() {
    let lat = CongruenceLattice::new(3, 2).unwrap();
    assert!(primitive_generator(&[0, 0, 0], &lat).is_err());
    assert!(primitive_generator(&[1, 1], &lat).is_err());
    assert!(is_primitive(&IntVector::from_i64(&[0, 0, 0]), &Lattice::Congruence(lat)).is_err());
}
