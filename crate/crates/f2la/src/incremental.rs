use crate::vector::BitVector;

/// Outcome of adding one equation to an [`Echelon`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pushed {
    /// New pivot; the system grew by one independent equation.
    Independent,
    /// Implied by the equations already present.
    Redundant,
    /// Contradicts the equations already present (reduces to `0 = 1`).
    Inconsistent,
}

/// Row-echelon system `a·x = b` that grows one equation at a time and can be
/// rolled back with [`Echelon::truncate`]. Used for depth-first search over
/// case splits, where each level appends a few equations.
#[derive(Clone, Debug)]
pub struct Echelon {
    vars: usize,
    rows: Vec<(BitVector, bool, usize)>,
}

impl Echelon {
    pub fn new(vars: usize) -> Self {
        Self {
            vars,
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    /// Number of independent equations held.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `row·x = rhs` against the stored rows and keeps it if it is new.
    /// Inconsistent and redundant equations leave the system unchanged.
    pub fn push(&mut self, row: &BitVector, rhs: bool) -> Pushed {
        assert_eq!(row.len(), self.vars, "equation length mismatch");
        let mut r = row.clone();
        let mut b = rhs;
        for (stored, sb, p) in &self.rows {
            if r.get(*p) {
                r ^= stored;
                b ^= sb;
            }
        }
        match r.first_one() {
            Some(p) => {
                self.rows.push((r, b, p));
                Pushed::Independent
            }
            None if b => Pushed::Inconsistent,
            None => Pushed::Redundant,
        }
    }

    /// Drops equations added after the system had `len` rows.
    pub fn truncate(&mut self, len: usize) {
        self.rows.truncate(len);
    }

    /// A solution with every free variable set to zero.
    pub fn solution(&self) -> BitVector {
        let mut x = BitVector::zeros(self.vars);
        for (row, b, p) in self.rows.iter().rev() {
            let mut v = *b;
            for j in row.iter_ones() {
                if j != *p && x.get(j) {
                    v = !v;
                }
            }
            x.set(*p, v);
        }
        x
    }

    /// Coefficient rows and right-hand sides of the stored equations.
    pub fn equations(&self) -> impl Iterator<Item = (&BitVector, bool)> {
        self.rows.iter().map(|(r, b, _)| (r, *b))
    }
}
