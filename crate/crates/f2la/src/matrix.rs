use std::fmt;

use crate::vector::BitVector;

/// Dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

/// Output of [`rref`]: `t * m == r` with `r` in reduced row-echelon form.
#[derive(Clone, Debug)]
pub struct Rref {
    pub r: BitMatrix,
    pub pivots: Vec<usize>,
    pub t: BitMatrix,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Stacks row vectors; all rows must share the length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length mismatch");
        }
        Self { cols, rows }
    }

    /// Builds a matrix from nested 0/1 literals (test and fixture helper).
    pub fn from_lists(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| BitVector::from_bools(&r.iter().map(|&b| b != 0).collect::<Vec<_>>()))
                .collect(),
        )
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for i in c.iter_ones() {
                m.rows[i].set(j, true);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut BitVector {
        &mut self.rows[i]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &BitVector> {
        self.rows.iter()
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn column(&self, j: usize) -> BitVector {
        let mut c = BitVector::zeros(self.rows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn push_row(&mut self, row: BitVector) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        let mut out = BitVector::zeros(self.rows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows(), "dimension mismatch in mul");
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BitVector::zeros(rhs.cols);
                for k in r.iter_ones() {
                    acc ^= &rhs.rows[k];
                }
                acc
            })
            .collect();
        BitMatrix {
            cols: rhs.cols,
            rows,
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.iter_ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows(), rhs.rows(), "row count mismatch in hstack");
        BitMatrix {
            cols: self.cols + rhs.cols,
            rows: self
                .rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a.concat(b))
                .collect(),
        }
    }

    /// Vertical concatenation.
    pub fn vstack(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.cols, "column count mismatch in vstack");
        let mut rows = self.rows.clone();
        rows.extend(rhs.rows.iter().cloned());
        BitMatrix {
            cols: self.cols,
            rows,
        }
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows(), columns.len());
        for (i, r) in self.rows.iter().enumerate() {
            for (k, &j) in columns.iter().enumerate() {
                if r.get(j) {
                    m.rows[i].set(k, true);
                }
            }
        }
        m
    }

    pub fn rank(&self) -> usize {
        echelon_in_place(&mut self.rows.clone(), self.cols, None).len()
    }
}

/// Reduces `rows` in place to RREF. Pivot choice is the leftmost remaining
/// column, and within it the topmost eligible row. Row operations are
/// mirrored onto `track` when given.
fn echelon_in_place(
    rows: &mut [BitVector],
    cols: usize,
    mut track: Option<&mut [BitVector]>,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(next, p);
        if let Some(t) = track.as_deref_mut() {
            t.swap(next, p);
        }
        let pivot_row = rows[next].clone();
        let pivot_track = track.as_deref().map(|t| t[next].clone());
        for i in 0..rows.len() {
            if i != next && rows[i].get(col) {
                rows[i] ^= &pivot_row;
                if let (Some(t), Some(pt)) = (track.as_deref_mut(), pivot_track.as_ref()) {
                    t[i] ^= pt;
                }
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

/// Reduced row-echelon form with the transform `t` such that `t * m == r`.
pub fn rref(m: &BitMatrix) -> Rref {
    let mut rows = m.rows.clone();
    let mut t = BitMatrix::identity(m.rows()).rows;
    let pivots = echelon_in_place(&mut rows, m.cols, Some(&mut t));
    Rref {
        r: BitMatrix { cols: m.cols, rows },
        pivots,
        t: BitMatrix {
            cols: m.rows(),
            rows: t,
        },
    }
}

/// RREF without the transform; cheaper when `t` is not needed.
pub fn rref_only(m: &BitMatrix) -> (BitMatrix, Vec<usize>) {
    let mut rows = m.rows.clone();
    let pivots = echelon_in_place(&mut rows, m.cols, None);
    (BitMatrix { cols: m.cols, rows }, pivots)
}

/// Basis of `{v : m * v = 0}`, one vector per non-pivot column in ascending order.
pub fn null_space(m: &BitMatrix) -> Vec<BitVector> {
    let (r, pivots) = rref_only(m);
    kernel_from_rref(&r, &pivots, m.cols)
}

pub(crate) fn kernel_from_rref(r: &BitMatrix, pivots: &[usize], cols: usize) -> Vec<BitVector> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = BitVector::unit(cols, f);
            for (i, &p) in pivots.iter().enumerate() {
                if r.get(i, f) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows(), self.cols)?;
        write!(f, "{self}")
    }
}
