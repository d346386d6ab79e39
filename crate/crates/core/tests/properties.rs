use outlab::free_group::elementary::{nielsen_generators, signed_permutations};
use outlab::free_group::{parse_automorphism, Automorphism, Letter, LetterBudget, Word};
use outlab::matrix_oracle::spectral_radius;
use outlab::outer_metric::{dist, dist_weighted, max_ratio, sym_dist};
use proptest::prelude::*;

fn raw_word(rank: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
        .prop_map(|v| v.into_iter().map(|(g, inv)| Letter::new(g + 1, inv)).collect())
}

/// Product of Nielsen moves, kept small enough for exhaustive checks.
fn automorphism(rank: usize, moves: usize) -> impl Strategy<Value = Automorphism> {
    let gens = nielsen_generators(rank);
    let perms = signed_permutations(rank);
    (0..perms.len(), prop::collection::vec(0..gens.len(), 0..=moves)).prop_map(move |(p, seq)| {
        seq.iter()
            .fold(perms[p].clone(), |acc, &i| acc.compose(&gens[i]).unwrap())
    })
}

fn rank_and_pair() -> impl Strategy<Value = (Automorphism, Automorphism, Vec<Letter>)> {
    (2usize..=3).prop_flat_map(|r| (automorphism(r, 6), automorphism(r, 6), raw_word(r, 12)))
}

proptest! {
    #[test]
    fn reduction_is_idempotent(raw in raw_word(3, 30)) {
        let w = Word::from_letters(raw, 3).unwrap();
        let again = Word::from_letters(w.letters().to_vec(), 3).unwrap();
        prop_assert!(w == again);
        prop_assert!(w.letters().windows(2).all(|p| p[0] != p[1].inverse()));
    }

    #[test]
    fn word_times_inverse_is_trivial(raw in raw_word(3, 30)) {
        let w = Word::from_letters(raw, 3).unwrap();
        prop_assert!(w.mul(&w.inverse()).unwrap().is_empty());
    }

    #[test]
    fn conjugacy_length_is_conjugation_invariant(a in raw_word(3, 20), u in raw_word(3, 10)) {
        let w = Word::from_letters(a, 3).unwrap();
        let u = Word::from_letters(u, 3).unwrap();
        let c = w.conjugate_by(&u).unwrap();
        prop_assert_eq!(c.conjugacy_len(), w.conjugacy_len());
        prop_assert!(w.conjugacy_len() <= w.len());
    }

    #[test]
    fn automorphisms_are_homomorphisms((phi, _psi, raw) in rank_and_pair(), split in 0usize..12) {
        let r = phi.rank();
        let k = split.min(raw.len());
        let u = Word::from_letters(raw[..k].to_vec(), r).unwrap();
        let v = Word::from_letters(raw[k..].to_vec(), r).unwrap();
        let lhs = phi.apply(&u.mul(&v).unwrap()).unwrap();
        let rhs = phi.apply(&u).unwrap().mul(&phi.apply(&v).unwrap()).unwrap();
        prop_assert!(lhs == rhs);
    }

    #[test]
    fn composition_matches_sequential_application((phi, psi, raw) in rank_and_pair()) {
        let w = Word::from_letters(raw, phi.rank()).unwrap();
        let composite = phi.compose(&psi).unwrap();
        prop_assert!(composite.apply(&w).unwrap() == phi.apply(&psi.apply(&w).unwrap()).unwrap());
        prop_assert!(composite.verify_inverse().is_ok());
    }

    #[test]
    fn inverse_undoes_the_map((phi, _psi, raw) in rank_and_pair()) {
        let w = Word::from_letters(raw, phi.rank()).unwrap();
        let inv = phi.invert();
        prop_assert!(inv.apply(&phi.apply(&w).unwrap()).unwrap() == w);
        prop_assert!(phi.compose(&inv).unwrap().is_identity());
    }

    #[test]
    fn abelianization_reverses_order((phi, psi, _raw) in rank_and_pair()) {
        let lhs = phi.compose(&psi).unwrap().abelianization();
        let rhs = psi.abelianization().mul(&phi.abelianization()).unwrap();
        prop_assert!(lhs == rhs);
        let det = lhs.determinant();
        prop_assert!(det == 1.into() || det == (-1).into());
    }

    #[test]
    fn distance_bounds((phi, psi, _raw) in rank_and_pair()) {
        let d = dist(&phi);
        prop_assert!(d >= 0.0);
        prop_assert!((dist_weighted(&phi, &vec![1.0; phi.rank()]) - d).abs() <= 1e-12);
        prop_assert!((sym_dist(&phi) - (d + dist(&phi.invert()))).abs() <= 1e-12);
        prop_assert!(dist(&phi.compose(&psi).unwrap()) <= d + dist(&psi) + 1e-12);
        // the abelian stretch never exceeds the free stretch
        prop_assert!(spectral_radius(&phi.abelianization()).lower <= d + 1e-9);
    }

    #[test]
    fn distance_ignores_signed_permutations((phi, _psi, _raw) in rank_and_pair(), p in 0usize..48) {
        let perms = signed_permutations(phi.rank());
        let sigma = &perms[p % perms.len()];
        // precomposing with a signed permutation permutes the candidate set
        prop_assert!(max_ratio(&phi.compose(sigma).unwrap()) == max_ratio(&phi));
        prop_assert!(max_ratio(sigma).is_one());
    }

    #[test]
    fn powers_agree_with_repeated_composition((phi, _psi, _raw) in rank_and_pair(), k in 0u32..4) {
        let mut expected = Automorphism::identity(phi.rank());
        for _ in 0..k {
            expected = expected.compose(&phi).unwrap();
        }
        prop_assert!(phi.power(k, LetterBudget::DEFAULT).unwrap() == expected);
    }
}

#[test]
fn fibonacci_stretch_of_powers() {
    // image lengths of φ^n are consecutive Fibonacci numbers, and the
    // generator a alone already witnesses ln F_{n+2}
    let phi = parse_automorphism("a->ab; b->a | a->b; b->Ba").unwrap();
    let mut f = vec![0u64, 1];
    for i in 2..40 {
        f.push(f[i - 1] + f[i - 2]);
    }
    for n in 1..20u32 {
        let power = phi.power(n, LetterBudget::DEFAULT).unwrap();
        let n = n as usize;
        let lengths: Vec<usize> = power.images().iter().map(Word::len).collect();
        assert_eq!(lengths, vec![f[n + 2] as usize, f[n + 1] as usize]);
        let best = max_ratio(&power);
        assert!(best.ln() >= (f[n + 2] as f64).ln() - 1e-12);
    }
}
