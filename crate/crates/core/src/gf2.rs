//! Linear algebra over GF(2) on [`Support`] rows.

use crate::support::Support;

/// Fully reduced row basis: every pivot column is set in exactly one basis
/// vector, so reduction is independent of the order basis vectors are visited.
#[derive(Debug, Clone)]
pub struct RowBasis {
    len: usize,
    rows: Vec<Support>,
    pivots: Vec<usize>,
}

impl RowBasis {
    pub fn new(len: usize) -> Self {
        Self { len, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_rows<'a, I: IntoIterator<Item = &'a Support>>(len: usize, rows: I) -> Self {
        let mut basis = Self::new(len);
        for r in rows {
            basis.insert(r.clone());
        }
        basis
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &Support) -> Support {
        let mut v = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn contains(&self, v: &Support) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: Support) -> bool {
        debug_assert_eq!(v.len(), self.len);
        let v = self.reduce(&v);
        let Some(p) = v.first_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&v);
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    /// Reduced basis rows.
    pub fn rows(&self) -> &[Support] {
        &self.rows
    }

    /// Which basis vectors (in insertion order of their pivots) make up `v`.
    /// Returns `None` when `v` is outside the span.
    pub fn decompose(&self, v: &Support) -> Option<Vec<usize>> {
        let mut rest = v.clone();
        let mut used = Vec::new();
        for (i, (row, &p)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if rest.get(p) {
                rest.xor_assign(row);
                used.push(i);
            }
        }
        rest.is_zero().then_some(used)
    }
}

/// Row echelon form of the augmented system `rows · x = rhs`, eliminating
/// columns in increasing order and taking the lowest-index row as pivot.
fn eliminate(rows: &[Support], rhs: &[bool], len: usize) -> (Vec<(Support, bool)>, Vec<usize>) {
    let mut sys: Vec<(Support, bool)> = rows.iter().cloned().zip(rhs.iter().copied()).collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..len {
        let Some(found) = (next..sys.len()).find(|&r| sys[r].0.get(col)) else {
            continue;
        };
        sys.swap(next, found);
        let (pivot_row, pivot_rhs) = sys[next].clone();
        for (r, row) in sys.iter_mut().enumerate() {
            if r != next && row.0.get(col) {
                row.0.xor_assign(&pivot_row);
                row.1 ^= pivot_rhs;
            }
        }
        pivots.push(col);
        next += 1;
        if next == sys.len() {
            break;
        }
    }
    (sys, pivots)
}

/// One solution of `rows · x = rhs` over GF(2), free variables set to zero.
pub fn solve(rows: &[Support], rhs: &[bool], len: usize) -> Option<Support> {
    assert_eq!(rows.len(), rhs.len());
    let (sys, pivots) = eliminate(rows, rhs, len);
    if sys[pivots.len()..].iter().any(|(_, b)| *b) {
        return None;
    }
    let mut x = Support::zeros(len);
    for (i, &col) in pivots.iter().enumerate() {
        x.set(col, sys[i].1);
    }
    Some(x)
}

/// Basis of `{x : rows · x = 0}`.
pub fn nullspace(rows: &[Support], len: usize) -> Vec<Support> {
    let zeros = vec![false; rows.len()];
    let (sys, pivots) = eliminate(rows, &zeros, len);
    let mut is_pivot = vec![false; len];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..len)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut x = Support::zeros(len);
            x.set(free, true);
            for (i, &col) in pivots.iter().enumerate() {
                if sys[i].0.get(free) {
                    x.set(col, true);
                }
            }
            x
        })
        .collect()
}

/// Representatives spanning `ker(kernel_rows) / span(quotient_rows)`.
pub fn quotient_basis(kernel_rows: &[Support], quotient_rows: &[Support], len: usize) -> Vec<Support> {
    let mut basis = RowBasis::from_rows(len, quotient_rows);
    let mut out = Vec::new();
    for v in nullspace(kernel_rows, len) {
        if basis.insert(v.clone()) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::overlap_parity;
    use proptest::prelude::*;

    fn row(len: usize, idx: &[usize]) -> Support {
        Support::from_indices(len, idx.iter().copied())
    }

    #[test]
    fn solves_simple_system() {
        let rows = vec![row(3, &[0, 1]), row(3, &[1, 2])];
        let x = solve(&rows, &[true, true], 3).unwrap();
        assert!(overlap_parity(&x, &rows[0]).unwrap());
        assert!(overlap_parity(&x, &rows[1]).unwrap());
    }

    #[test]
    fn detects_inconsistency() {
        let rows = vec![row(2, &[0, 1]), row(2, &[0, 1])];
        assert!(solve(&rows, &[true, false], 2).is_none());
    }

    #[test]
    fn nullspace_of_repetition_checks() {
        let rows = vec![row(3, &[0, 1]), row(3, &[1, 2])];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], row(3, &[0, 1, 2]));
    }

    #[test]
    fn decompose_reports_members() {
        let a = row(4, &[0, 1]);
        let b = row(4, &[1, 2]);
        let basis = RowBasis::from_rows(4, [&a, &b]);
        let target = a.xor(&b);
        let used = basis.decompose(&target).unwrap();
        let rebuilt = used.iter().fold(Support::zeros(4), |acc, &i| acc.xor(&basis.rows()[i]));
        assert_eq!(rebuilt, target);
        assert!(basis.decompose(&row(4, &[3])).is_none());
    }

    proptest! {
        #[test]
        fn nullspace_vectors_satisfy_all_rows(
            bits in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 12), 1..8)
        ) {
            let rows: Vec<Support> = bits
                .iter()
                .map(|r| Support::from_indices(12, r.iter().enumerate().filter(|x| *x.1).map(|x| x.0)))
                .collect();
            let rank = RowBasis::from_rows(12, &rows).rank();
            let ns = nullspace(&rows, 12);
            prop_assert_eq!(ns.len(), 12 - rank);
            for v in &ns {
                for r in &rows {
                    prop_assert!(!overlap_parity(v, r).unwrap());
                }
            }
            prop_assert_eq!(RowBasis::from_rows(12, &ns).rank(), ns.len());
        }

        #[test]
        fn solve_satisfies_system_when_consistent(
            bits in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 10), 1..6),
            x0 in proptest::collection::vec(any::<bool>(), 10),
        ) {
            let rows: Vec<Support> = bits
                .iter()
                .map(|r| Support::from_indices(10, r.iter().enumerate().filter(|x| *x.1).map(|x| x.0)))
                .collect();
            let x0 = Support::from_indices(10, x0.iter().enumerate().filter(|x| *x.1).map(|x| x.0));
            let rhs: Vec<bool> = rows.iter().map(|r| overlap_parity(r, &x0).unwrap()).collect();
            let x = solve(&rows, &rhs, 10).unwrap();
            for (r, b) in rows.iter().zip(&rhs) {
                prop_assert_eq!(overlap_parity(r, &x).unwrap(), *b);
            }
        }
    }
}
