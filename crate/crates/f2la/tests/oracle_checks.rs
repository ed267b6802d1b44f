use f2la::{
    affine_intersect, null_space, rref, solve_affine, AffineSubspace, BitMatrix, BitVector,
};
use proptest::prelude::*;

fn matrix_strategy(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        proptest::collection::vec(any::<u64>(), r).prop_map(move |words| {
            BitMatrix::from_rows(
                c,
                words
                    .into_iter()
                    .map(|w| BitVector::from_u64(c, w))
                    .collect(),
            )
        })
    })
}

fn matrix_with_cols(max_rows: usize, c: usize) -> impl Strategy<Value = BitMatrix> {
    proptest::collection::vec(any::<u64>(), 1..=max_rows).prop_map(move |words| {
        BitMatrix::from_rows(
            c,
            words
                .into_iter()
                .map(|w| BitVector::from_u64(c, w))
                .collect(),
        )
    })
}

fn all_vectors(n: usize) -> impl Iterator<Item = BitVector> {
    (0u64..1 << n).map(move |x| BitVector::from_u64(n, x))
}

fn is_rref(r: &BitMatrix, pivots: &[usize]) -> bool {
    for (i, &p) in pivots.iter().enumerate() {
        if r.row(i).first_one() != Some(p) {
            return false;
        }
        for k in 0..r.rows() {
            if k != i && r.get(k, p) {
                return false;
            }
        }
    }
    pivots.windows(2).all(|w| w[0] < w[1]) && (pivots.len()..r.rows()).all(|i| r.row(i).is_zero())
}

/// Span of `vs` as an explicit set of vectors.
fn span(n: usize, vs: &[BitVector]) -> std::collections::BTreeSet<BitVector> {
    let mut out = std::collections::BTreeSet::new();
    for mask in 0u64..1 << vs.len() {
        let mut acc = BitVector::zeros(n);
        for (i, v) in vs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc ^= v;
            }
        }
        out.insert(acc);
    }
    out
}

proptest! {
    #[test]
    fn rref_transform_reproduces_output(m in matrix_strategy(8, 12)) {
        let out = rref(&m);
        prop_assert_eq!(out.t.mul(&m), out.r.clone());
        prop_assert!(is_rref(&out.r, &out.pivots));
        prop_assert_eq!(out.t.rank(), m.rows());
        prop_assert_eq!(m.rank(), out.pivots.len());
        prop_assert_eq!(rref(&out.r).r, out.r);
    }

    #[test]
    fn null_space_matches_enumeration(m in matrix_strategy(6, 10)) {
        let basis = null_space(&m);
        prop_assert_eq!(basis.len(), m.cols() - m.rank());
        let kernel: std::collections::BTreeSet<_> =
            all_vectors(m.cols()).filter(|v| m.mul_vec(v).is_zero()).collect();
        prop_assert_eq!(span(m.cols(), &basis), kernel);
    }

    #[test]
    fn solve_affine_matches_enumeration(m in matrix_strategy(6, 9), b in any::<u64>()) {
        let b = BitVector::from_u64(m.rows(), b);
        let s = solve_affine(&m, &b).unwrap();
        let mut count = 0usize;
        for v in all_vectors(m.cols()) {
            let member = m.mul_vec(&v) == b;
            prop_assert_eq!(member, s.contains(&v));
            count += member as usize;
        }
        prop_assert_eq!(s.is_empty(), count == 0);
        if let Some(d) = s.dim() {
            prop_assert_eq!(count, 1usize << d);
        }
    }

    #[test]
    fn intersection_matches_enumeration(
        (a, b) in (1usize..=7).prop_flat_map(|c| (matrix_with_cols(4, c), matrix_with_cols(4, c))),
        ra in any::<u64>(),
        rb in any::<u64>(),
    ) {
        let u = solve_affine(&a, &BitVector::from_u64(a.rows(), ra)).unwrap();
        let v = solve_affine(&b, &BitVector::from_u64(b.rows(), rb)).unwrap();
        let w = affine_intersect(&u, &v).unwrap();
        for x in all_vectors(a.cols()) {
            prop_assert_eq!(w.contains(&x), u.contains(&x) && v.contains(&x));
        }
    }

    #[test]
    fn canonical_form_is_structural(m in matrix_strategy(4, 8), b in any::<u64>(), shuffle in any::<u64>()) {
        let s = solve_affine(&m, &BitVector::from_u64(m.rows(), b)).unwrap();
        prop_assume!(!s.is_empty());
        // Re-express the same set from another member and a mixed spanning set.
        let pts = s.points();
        let base = pts[(shuffle as usize) % pts.len()].clone();
        let mut dirs: Vec<BitVector> = s.basis().to_vec();
        if dirs.len() >= 2 {
            let extra = &dirs[0] ^ &dirs[1];
            dirs.push(extra);
            dirs.reverse();
        }
        prop_assert_eq!(AffineSubspace::new(base, dirs), s);
    }
}

#[test]
fn hyperplanes_through_w_and_y_match_enumeration() {
    // {x : w·x = 1} ∩ {x : y·x = 1} for assorted nonzero w, y in GF(2)^5.
    for (w, y) in [
        (0b00011u64, 0b00110u64),
        (0b10101, 0b10101),
        (0b11111, 0b00001),
        (0b01000, 0b10000),
    ] {
        let w = BitVector::from_u64(5, w);
        let y = BitVector::from_u64(5, y);
        let hw = solve_affine(
            &BitMatrix::from_rows(5, vec![w.clone()]),
            &BitVector::ones(1),
        )
        .unwrap();
        let hy = solve_affine(
            &BitMatrix::from_rows(5, vec![y.clone()]),
            &BitVector::ones(1),
        )
        .unwrap();
        let both = hw.intersect(&hy).unwrap();
        let mut count = 0;
        for x in all_vectors(5) {
            let expect = w.dot(&x) && y.dot(&x);
            assert_eq!(both.contains(&x), expect);
            count += expect as usize;
        }
        assert_eq!(both.points().len(), count);
    }
}
