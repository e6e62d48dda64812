use proptest::prelude::*;

use qkolmo::brudno::{symmetric_subspace_dim, SourceModel};
use qkolmo::coding::{kraft_check, kraft_sum, self_delim_decode, self_delim_encode, CompressionMap, PrefixCode};
use qkolmo::halting::exact_halting_spaces;
use qkolmo::linalg::{
    format_rational, gram_schmidt, parse_rational, rank, rat, same_span, CRat, CVec, Rational, Surd, SurdVec,
};
use qkolmo::pipeline::counting_bound;
use qkolmo::qtm::{
    encode_pair, encoded_length, index_string, machines, string_index, QtmSpec, QubitString, MAX_DENSE_LEN,
};
use qkolmo::{Caps, Error};

fn cvec(dim: usize) -> impl Strategy<Value = CVec> {
    prop::collection::vec((-3i64..=3, -3i64..=3), dim).prop_map(|xs| CVec::from_ints(&xs))
}

fn span(dim: usize) -> impl Strategy<Value = Vec<CVec>> {
    prop::collection::vec(cvec(dim), 1..=dim).prop_filter("nonzero", |v| v.iter().any(|x| !x.is_zero()))
}

fn unit(v: &CVec) -> SurdVec {
    let s = Surd::inv_sqrt(&v.norm_sq()).unwrap();
    SurdVec(v.0.iter().map(|c| s.scale_c(c)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_text_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = rat(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn gram_schmidt_is_exactly_orthogonal(vs in span(4)) {
        let gs = gram_schmidt(&vs).unwrap();
        prop_assert_eq!(gs.len(), rank(&vs).unwrap());
        for (i, a) in gs.iter().enumerate() {
            for b in &gs[..i] {
                prop_assert!(a.direction().inner(b.direction()).is_zero());
            }
        }
        let dirs: Vec<CVec> = gs.iter().map(|g| g.direction().clone()).collect();
        prop_assert!(same_span(&dirs, &vs).unwrap());
    }

    #[test]
    fn blind_codewords_depend_only_on_the_past(raw in prop::collection::vec(1usize..=8, 1..24)) {
        let mut lens = Vec::new();
        for l in raw {
            lens.push(l);
            if !kraft_check(&lens) {
                lens.pop();
            }
        }
        let full = PrefixCode::from_lengths(&lens).unwrap();
        prop_assert!(full.is_prefix_free());
        prop_assert!(kraft_sum(&lens) <= Rational::from_integer(1.into()));
        for k in 1..lens.len() {
            let part = PrefixCode::from_lengths(&lens[..k]).unwrap();
            prop_assert_eq!(part.codewords(), &full.codewords()[..k]);
        }
    }

    #[test]
    fn self_delimiting_round_trip(k in 1u64..1_000_000, tail in "[01]{0,6}") {
        let s = self_delim_encode(k).unwrap();
        prop_assert_eq!(s.len(), encoded_length(k, 0));
        let joined = format!("{s}{tail}");
        let (back, rest) = self_delim_decode(&joined).unwrap();
        prop_assert_eq!(back, k);
        prop_assert_eq!(rest, tail.as_str());
    }

    #[test]
    fn encoded_pair_length(k in 1u64..5000, s in "[01]{0,4}") {
        let sigma = QubitString::classical(&s).unwrap();
        match encode_pair(k, &sigma) {
            Ok(p) => prop_assert_eq!(p.max_len(), encoded_length(k, s.len())),
            Err(Error::CapExceeded { .. }) => prop_assert!(encoded_length(k, s.len()) > MAX_DENSE_LEN),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn string_index_bijection(i in 0usize..100_000) {
        prop_assert_eq!(string_index(&index_string(i)), i);
    }

    #[test]
    fn compression_round_trip_is_exact(vs in span(4), coeffs in prop::collection::vec((-2i64..=2, -2i64..=2), 4)) {
        let mut psi = CVec::zeros(4);
        for (v, (a, b)) in vs.iter().zip(&coeffs) {
            psi.axpy(&CRat::from_ints(*a, *b), v);
        }
        prop_assume!(!psi.is_zero());
        let psi = unit(&psi);
        let map = CompressionMap::new(&vs).unwrap();
        let chi = map.compress(&psi).unwrap();
        prop_assert_eq!(chi.dim(), 1usize << map.target_qubits());
        prop_assert_eq!(map.decompress(&chi).unwrap(), psi);
    }

    #[test]
    fn surd_vector_text_round_trip(v in cvec(4)) {
        prop_assume!(!v.is_zero());
        let u = unit(&v);
        prop_assert_eq!(SurdVec::parse(&u.dump()).unwrap(), u);
    }

    #[test]
    fn counting_bound_monotone(d in 1u64..1000, k in 0u32..18) {
        let delta = k as f64 / 100.0;
        let a = counting_bound(d, delta).unwrap();
        prop_assert!(a >= (d as f64).log2() - 1e-12);
        prop_assert!(counting_bound(d + 1, delta).unwrap() >= a);
    }

    #[test]
    fn symmetric_dimension_closed_form(n in 0usize..12) {
        // C(n+3, 3) for four-dimensional sites
        let want = ((n + 1) * (n + 2) * (n + 3) / 6) as u64;
        prop_assert_eq!(symmetric_subspace_dim(1, n), want.into());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn spec_text_round_trip(seed in 0u64..1000, m in 2usize..=3) {
        let spec = machines::random_machine(seed, m);
        let back = QtmSpec::parse(&spec.to_string()).unwrap();
        prop_assert_eq!(back.hash_hex(), spec.hash_hex());
    }

    #[test]
    fn halting_spaces_orthogonal_within_budget(seed in 0u64..500, m in 2usize..=3, n in 0usize..=2) {
        let spec = machines::random_machine(seed, m);
        let caps = Caps::default();
        let spaces = exact_halting_spaces(&spec, n, 12, &caps).unwrap();
        prop_assert!(spaces.iter().map(|h| h.dim()).sum::<usize>() <= 1 << n);
        for (i, a) in spaces.iter().enumerate() {
            for b in &spaces[..i] {
                for u in a.directions() {
                    for v in b.directions() {
                        prop_assert!(u.inner(&v).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn local_densities_are_consistent(p in 1i64..10, q in 1i64..10) {
        let src = SourceModel::markov(
            "m",
            [[rat(p, 10), rat(10 - p, 10)], [rat(q, 10), rat(10 - q, 10)]],
            [rat(q, 10 - p + q), rat(10 - p, 10 - p + q)],
        )
        .unwrap();
        let caps = Caps::default();
        let mut prev = src.local_density(1, &caps).unwrap();
        for n in 2..=5 {
            let cur = src.local_density(n, &caps).unwrap();
            prop_assert!(cur.trace_last().distance(&prev) < 1e-12);
            prev = cur;
        }
    }
}
