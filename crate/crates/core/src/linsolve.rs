//! Exact linear algebra over the rationals for coefficient matching.
//!
//! Rows are sparse and are reduced incrementally into echelon form as they
//! arrive, so systems with many equations but few unknowns stay cheap.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::normalize::{NormalForm, TermKey};

type Row = BTreeMap<usize, BigRational>;

/// Incremental row echelon form. Each stored row has coefficient 1 at its
/// pivot and only columns greater than the pivot besides.
#[derive(Debug, Default)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<(usize, Row, BigRational)>,
    pivot_row: BTreeMap<usize, usize>,
    inconsistent: bool,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            ..Default::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// Adds the equation `Σ row[c]·x_c = rhs`.
    pub fn push(&mut self, mut row: Row, mut rhs: BigRational) {
        row.retain(|_, v| !v.is_zero());
        let mut cursor = 0;
        loop {
            let next = row
                .range(cursor..)
                .map(|(c, _)| *c)
                .find(|c| self.pivot_row.contains_key(c));
            let Some(col) = next else { break };
            let factor = row[&col].clone();
            let (_, prow, prhs) = &self.rows[self.pivot_row[&col]];
            for (c, v) in prow {
                let slot = row.entry(*c).or_insert_with(BigRational::zero);
                *slot -= &factor * v;
                if slot.is_zero() {
                    row.remove(c);
                }
            }
            rhs -= &factor * prhs;
            cursor = col + 1;
        }
        let Some((&pivot, lead)) = row.iter().next() else {
            if !rhs.is_zero() {
                self.inconsistent = true;
            }
            return;
        };
        let inv = lead.recip();
        let row: Row = row.into_iter().map(|(c, v)| (c, v * &inv)).collect();
        rhs *= &inv;
        self.pivot_row.insert(pivot, self.rows.len());
        self.rows.push((pivot, row, rhs));
    }

    /// A solution with every free variable set to zero.
    pub fn solve(&self) -> Option<Vec<BigRational>> {
        if self.inconsistent {
            return None;
        }
        let mut x = vec![BigRational::zero(); self.ncols];
        let mut order: Vec<&(usize, Row, BigRational)> = self.rows.iter().collect();
        order.sort_by_key(|r| std::cmp::Reverse(r.0));
        for (pivot, row, rhs) in order {
            let mut v = rhs.clone();
            for (c, coef) in row.range(pivot + 1..) {
                v -= coef * &x[*c];
            }
            x[*pivot] = v;
        }
        Some(x)
    }
}

/// Equations `Σ_k x_k · columns[k][b] = targets[b]` for every block `b`,
/// one per term key occurring anywhere in the block.
fn build(columns: &[Vec<NormalForm>], targets: &[NormalForm]) -> Echelon {
    let mut eqs: BTreeMap<(usize, &TermKey), (Row, BigRational)> = BTreeMap::new();
    for (k, col) in columns.iter().enumerate() {
        for (b, block) in col.iter().enumerate() {
            for (key, c) in block.terms() {
                eqs.entry((b, key)).or_default().0.insert(k, c.clone());
            }
        }
    }
    for (b, t) in targets.iter().enumerate() {
        for (key, c) in t.terms() {
            eqs.entry((b, key)).or_default().1 = c.clone();
        }
    }
    let mut ech = Echelon::new(columns.len());
    for (_, (row, rhs)) in eqs {
        ech.push(row, rhs);
    }
    ech
}

/// Rational coefficients `x` with `Σ x_k columns[k] = target` in every block.
pub fn solve_combination(
    columns: &[Vec<NormalForm>],
    targets: &[NormalForm],
) -> Option<Vec<BigRational>> {
    build(columns, targets).solve()
}

/// Rank of a list of normal forms as vectors over the rationals.
pub fn rank(vectors: &[NormalForm]) -> usize {
    let cols: Vec<Vec<NormalForm>> = vectors.iter().map(|v| vec![v.clone()]).collect();
    build(&cols, &[NormalForm::zero()]).rank()
}

/// `Σ x_k v_k`.
pub fn combine(vectors: &[NormalForm], x: &[BigRational]) -> NormalForm {
    let mut out = NormalForm::zero();
    for (v, c) in vectors.iter().zip(x) {
        if c.is_one() {
            out.add_assign(v);
        } else if !c.is_zero() {
            out.add_assign(&v.scale(c));
        }
    }
    out
}
