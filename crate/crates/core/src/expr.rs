//! Expression trees for functions on jet space.
//!
//! An [`Expr`] is an immutable tree of sums and order-preserving products of
//! atoms: jet coordinates `u_J`, coordinates `x^k`, base functions `a(x^k)`,
//! constants, constant matrices and nonlocal potentials. Products never commute
//! their factors; commutation is decided per atom by [`Atom::is_commutative`]
//! when the tree is brought to normal form.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::Result;
use crate::normalize::NormalForm;

pub type Sym = Arc<str>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Scalar,
    Matrix,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Scalar => f.write_str("scalar"),
            Kind::Matrix => f.write_str("matrix"),
        }
    }
}

/// An independent variable; `index` is its position in the declaration list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coordinate {
    pub index: usize,
    pub name: Sym,
}

/// The dependent variable of a problem.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dependent {
    pub name: Sym,
    pub kind: Kind,
    /// For scalars this is an explicit nonzero assumption.
    pub invertible: bool,
}

impl Dependent {
    pub fn new(name: &str, kind: Kind, invertible: bool) -> Self {
        Dependent {
            name: name.into(),
            kind,
            invertible,
        }
    }
}

/// Sorted multiset of coordinate indices labelling a jet coordinate or a
/// partial derivative. Ordered by length (derivative order) first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(mut entries: Vec<usize>) -> Self {
        entries.sort_unstable();
        MultiIndex(entries)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn single(i: usize) -> Self {
        MultiIndex(vec![i])
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn with(&self, i: usize) -> Self {
        let pos = self.0.partition_point(|&e| e <= i);
        let mut v = self.0.clone();
        v.insert(pos, i);
        MultiIndex(v)
    }

    /// Removes one occurrence of `i`, if present.
    pub fn without(&self, i: usize) -> Option<Self> {
        let pos = self.0.iter().position(|&e| e == i)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(MultiIndex(v))
    }

    /// Sub-multiset test: every index of `other` occurs here at least as often.
    pub fn contains(&self, other: &MultiIndex) -> bool {
        self.minus(other).is_some()
    }

    /// Multiset difference `self - other`, if `other` is contained in `self`.
    pub fn minus(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &e in &self.0 {
            if j < other.0.len() && other.0[j] == e {
                j += 1;
            } else if j < other.0.len() && other.0[j] < e {
                return None;
            } else {
                rest.push(e);
            }
        }
        (j == other.0.len()).then_some(MultiIndex(rest))
    }

    /// All multi-indices over `ncoords` coordinates with order at most `max_order`.
    pub fn all_up_to(ncoords: usize, max_order: usize) -> Vec<MultiIndex> {
        fn extend(
            prefix: &mut Vec<usize>,
            start: usize,
            left: usize,
            n: usize,
            out: &mut Vec<MultiIndex>,
        ) {
            out.push(MultiIndex(prefix.clone()));
            if left == 0 {
                return;
            }
            for i in start..n {
                prefix.push(i);
                extend(prefix, i, left - 1, n, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        extend(&mut Vec::new(), 0, max_order, ncoords, &mut out);
        out.sort();
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<usize> for MultiIndex {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        MultiIndex::new(iter.into_iter().collect())
    }
}

/// Leaves of an expression. The variant order fixes the atom order used for
/// canonical term ordering.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Opaque commuting constant such as `c` or `lambda`.
    Const(Sym),
    Coord(Coordinate),
    Jet {
        dep: Arc<Dependent>,
        index: MultiIndex,
    },
    /// A function of the coordinates only, with accumulated partial derivatives.
    Base {
        name: Sym,
        kind: Kind,
        args: MultiIndex,
        partials: MultiIndex,
    },
    ConstMatrix {
        name: Sym,
        invertible: bool,
    },
    Potential {
        name: Sym,
        kind: Kind,
    },
}

impl Atom {
    pub fn is_commutative(&self) -> bool {
        match self {
            Atom::Const(_) | Atom::Coord(_) => true,
            Atom::Jet { dep, .. } => dep.kind == Kind::Scalar,
            Atom::Base { kind, .. } | Atom::Potential { kind, .. } => *kind == Kind::Scalar,
            Atom::ConstMatrix { .. } => false,
        }
    }

    pub fn is_invertible(&self) -> bool {
        match self {
            Atom::Jet { dep, index } => index.is_empty() && dep.invertible,
            Atom::ConstMatrix { invertible, .. } => *invertible,
            _ => false,
        }
    }

    /// Jet coordinates and potentials live in the fiber; everything else is
    /// a function on the base space.
    pub fn is_fiber(&self) -> bool {
        matches!(self, Atom::Jet { .. } | Atom::Potential { .. })
    }

    pub fn jet_index(&self) -> Option<&MultiIndex> {
        match self {
            Atom::Jet { index, .. } => Some(index),
            _ => None,
        }
    }
}

/// Analytic scalar functions with a closed derivative rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScalarFn {
    Sin,
    Cos,
    Exp,
}

impl ScalarFn {
    pub fn name(self) -> &'static str {
        match self {
            ScalarFn::Sin => "sin",
            ScalarFn::Cos => "cos",
            ScalarFn::Exp => "exp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(ScalarFn::Sin),
            "cos" => Some(ScalarFn::Cos),
            "exp" => Some(ScalarFn::Exp),
            _ => None,
        }
    }
}

/// Immutable expression tree.
///
/// Build `Inverse` and `Func` nodes through [`Expr::inverse`] and
/// [`Expr::func`], which validate invertibility and argument kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Atom(Atom),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Scaled(BigRational, Box<Expr>),
    Inverse(Box<Expr>),
    Commutator(Box<Expr>, Box<Expr>),
    Func(ScalarFn, Box<Expr>),
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Sum(Vec::new())
    }

    pub fn one() -> Self {
        Expr::Product(Vec::new())
    }

    pub fn int(n: i64) -> Self {
        Expr::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(r: BigRational) -> Self {
        Expr::Scaled(r, Box::new(Expr::one()))
    }

    pub fn atom(a: Atom) -> Self {
        Expr::Atom(a)
    }

    pub fn scaled(r: BigRational, e: Expr) -> Self {
        Expr::Scaled(r, Box::new(e))
    }

    /// `e^{-1}`; fails unless `e` normalizes to a single product of
    /// invertible factors.
    pub fn inverse(e: Expr) -> Result<Self> {
        NormalForm::from_expr(&e)?.inverse()?;
        Ok(Expr::Inverse(Box::new(e)))
    }

    /// `f(e)`; fails if `e` is matrix-valued.
    pub fn func(f: ScalarFn, e: Expr) -> Result<Self> {
        let nf = NormalForm::from_expr(&e)?;
        if !nf.is_scalar() {
            return Err(crate::Error::MatrixFuncArgument);
        }
        Ok(Expr::Func(f, Box::new(e)))
    }
}

/// `[a, b]`; normalization expands it to `ab - ba`.
pub fn commutator(a: Expr, b: Expr) -> Expr {
    Expr::Commutator(Box::new(a), Box::new(b))
}

/// Node-for-node equality. Semantic equality is this relation after
/// [`crate::normal_form`].
pub fn structural_eq(a: &Expr, b: &Expr) -> bool {
    a == b
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, -rhs])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Scaled(-BigRational::from_integer(1.into()), Box::new(self))
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs])
    }
}
