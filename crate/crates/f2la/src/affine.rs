use crate::matrix::{kernel_from_rref, rref_only, BitMatrix};
use crate::vector::BitVector;
use crate::F2Error;

/// Affine subspace `offset + span(basis)` of GF(2)^n, or the empty set.
///
/// Values are kept canonical: the basis is in reduced row-echelon order and
/// the offset has been reduced against it, so two equal sets compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineSubspace {
    ambient_dim: usize,
    empty: bool,
    offset: BitVector,
    basis: Vec<BitVector>,
}

impl AffineSubspace {
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            empty: true,
            offset: BitVector::zeros(ambient_dim),
            basis: Vec::new(),
        }
    }

    /// The whole ambient space.
    pub fn full(ambient_dim: usize) -> Self {
        Self::new(
            BitVector::zeros(ambient_dim),
            (0..ambient_dim)
                .map(|i| BitVector::unit(ambient_dim, i))
                .collect(),
        )
    }

    pub fn point(p: BitVector) -> Self {
        Self::new(p, Vec::new())
    }

    /// Canonicalizes `offset + span(spanning)`; the spanning set may be dependent.
    pub fn new(offset: BitVector, spanning: Vec<BitVector>) -> Self {
        let n = offset.len();
        for v in &spanning {
            assert_eq!(v.len(), n, "basis vector length mismatch");
        }
        let (r, pivots) = rref_only(&BitMatrix::from_rows(n, spanning));
        let basis: Vec<BitVector> = r.into_rows().into_iter().take(pivots.len()).collect();
        let mut offset = offset;
        for (row, &p) in basis.iter().zip(&pivots) {
            if offset.get(p) {
                offset ^= row;
            }
        }
        Self {
            ambient_dim: n,
            empty: false,
            offset,
            basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn offset(&self) -> &BitVector {
        &self.offset
    }

    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    /// Dimension of the direction space; `None` for the empty set.
    pub fn dim(&self) -> Option<usize> {
        (!self.empty).then_some(self.basis.len())
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        if self.empty || v.len() != self.ambient_dim {
            return false;
        }
        let mut w = v ^ &self.offset;
        for b in &self.basis {
            let p = b.first_one().expect("basis vectors are nonzero");
            if w.get(p) {
                w ^= b;
            }
        }
        w.is_zero()
    }

    /// All members, in ascending coefficient order. Intended for small spaces.
    pub fn points(&self) -> Vec<BitVector> {
        if self.empty {
            return Vec::new();
        }
        let k = self.basis.len();
        assert!(k < 32, "refusing to enumerate 2^{k} points");
        (0u64..1 << k)
            .map(|mask| {
                let mut v = self.offset.clone();
                for (i, b) in self.basis.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        v ^= b;
                    }
                }
                v
            })
            .collect()
    }

    /// Set intersection.
    pub fn intersect(&self, other: &Self) -> Result<Self, F2Error> {
        affine_intersect(self, other)
    }
}

/// Solution set of `m * x = b`.
pub fn solve_affine(m: &BitMatrix, b: &BitVector) -> Result<AffineSubspace, F2Error> {
    if b.len() != m.rows() {
        return Err(F2Error::DimensionMismatch {
            expected: m.rows(),
            found: b.len(),
        });
    }
    let n = m.cols();
    let aug = m.hstack(&BitMatrix::from_columns(m.rows(), std::slice::from_ref(b)));
    let (r, pivots) = rref_only(&aug);
    if pivots.last() == Some(&n) {
        return Ok(AffineSubspace::empty(n));
    }
    let mut x = BitVector::zeros(n);
    for (i, &p) in pivots.iter().enumerate() {
        if r.get(i, n) {
            x.set(p, true);
        }
    }
    let kernel = kernel_from_rref(&r, &pivots, n);
    Ok(AffineSubspace::new(x, kernel))
}

/// Intersection of two affine subspaces of the same ambient space.
///
/// Writes a common point as `u + U a = v + V b` and solves `[U | V] (a; b) = u + v`.
pub fn affine_intersect(u: &AffineSubspace, v: &AffineSubspace) -> Result<AffineSubspace, F2Error> {
    if u.ambient_dim != v.ambient_dim {
        return Err(F2Error::DimensionMismatch {
            expected: u.ambient_dim,
            found: v.ambient_dim,
        });
    }
    let n = u.ambient_dim;
    if u.empty || v.empty {
        return Ok(AffineSubspace::empty(n));
    }
    let ku = u.basis.len();
    let mut cols = u.basis.clone();
    cols.extend(v.basis.iter().cloned());
    let system = BitMatrix::from_columns(n, &cols);
    let rhs = &u.offset ^ &v.offset;
    let sol = solve_affine(&system, &rhs)?;
    if sol.is_empty() {
        return Ok(AffineSubspace::empty(n));
    }
    let image = |coeffs: &BitVector| {
        let mut w = BitVector::zeros(n);
        for i in coeffs.iter_ones().filter(|&i| i < ku) {
            w ^= &u.basis[i];
        }
        w
    };
    let offset = &u.offset ^ &image(sol.offset());
    let dirs = sol.basis().iter().map(image).collect();
    Ok(AffineSubspace::new(offset, dirs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system_is_a_point() {
        let v = BitVector::parse("101").unwrap();
        let s = solve_affine(&BitMatrix::identity(3), &v).unwrap();
        assert_eq!(s, AffineSubspace::point(v));
    }

    #[test]
    fn single_equation_gives_a_line() {
        let s = solve_affine(&BitMatrix::from_lists(&[&[1, 1]]), &BitVector::ones(1)).unwrap();
        assert_eq!(s.dim(), Some(1));
        assert!(s.contains(&BitVector::parse("10").unwrap()));
        assert!(s.contains(&BitVector::parse("01").unwrap()));
        assert!(!s.contains(&BitVector::parse("11").unwrap()));
    }

    #[test]
    fn parallel_hyperplanes_are_disjoint() {
        let m = BitMatrix::from_lists(&[&[1, 0, 0]]);
        let a = solve_affine(&m, &BitVector::zeros(1)).unwrap();
        let b = solve_affine(&m, &BitVector::ones(1)).unwrap();
        assert!(a.intersect(&b).unwrap().is_empty());
        assert_eq!(a.intersect(&a).unwrap(), a);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = AffineSubspace::full(2);
        let b = AffineSubspace::full(3);
        assert!(matches!(
            a.intersect(&b),
            Err(F2Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }
}
