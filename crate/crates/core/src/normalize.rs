//! Canonical form for jet-space expressions.
//!
//! A [`NormalForm`] is a finite sum of terms `c · m · w` where `c` is a nonzero
//! rational, `m` is a monomial in commuting letters (with integer exponents,
//! negative only for invertible letters), and `w` is a freely reduced word of
//! noncommuting factors. Terms are kept in a `BTreeMap` keyed by [`TermKey`],
//! so like terms are collected on insertion and iteration order is fixed.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, ScalarFn};

/// A normalized leaf: an atom, or an analytic function of a scalar normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Atom(Atom),
    Func(ScalarFn, Arc<NormalForm>),
}

impl Letter {
    pub fn is_commutative(&self) -> bool {
        match self {
            Letter::Atom(a) => a.is_commutative(),
            Letter::Func(..) => true,
        }
    }

    pub fn is_invertible(&self) -> bool {
        match self {
            Letter::Atom(a) => a.is_invertible(),
            Letter::Func(..) => false,
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Letter::Atom(a) => Some(a),
            Letter::Func(..) => None,
        }
    }
}

/// A letter of a noncommutative word, possibly inverted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub letter: Letter,
    pub inverse: bool,
}

impl Factor {
    fn cancels(&self, other: &Factor) -> bool {
        self.letter == other.letter && self.inverse != other.inverse
    }
}

pub type Monomial = BTreeMap<Letter, i32>;

/// The non-coefficient part of a term.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TermKey {
    pub scalars: Monomial,
    pub word: Vec<Factor>,
}

impl TermKey {
    pub fn one() -> Self {
        TermKey::default()
    }

    pub fn is_one(&self) -> bool {
        self.scalars.is_empty() && self.word.is_empty()
    }

    fn degree(&self) -> i64 {
        self.scalars.values().map(|&e| i64::from(e).abs()).sum()
    }

    /// Product of two keys; words are concatenated with adjacent inverse
    /// pairs cancelled at the junction.
    pub fn mul(&self, other: &TermKey) -> TermKey {
        let mut scalars = self.scalars.clone();
        for (l, &e) in &other.scalars {
            let slot = scalars.entry(l.clone()).or_insert(0);
            *slot += e;
            if *slot == 0 {
                scalars.remove(l);
            }
        }
        let mut word = self.word.clone();
        for f in &other.word {
            if word.last().is_some_and(|last| last.cancels(f)) {
                word.pop();
            } else {
                word.push(f.clone());
            }
        }
        TermKey { scalars, word }
    }

    /// Every atom occurring in this key, including inside function arguments.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        for l in self
            .scalars
            .keys()
            .chain(self.word.iter().map(|f| &f.letter))
        {
            match l {
                Letter::Atom(a) => out.push(a),
                Letter::Func(_, arg) => out.extend(arg.atoms()),
            }
        }
        out
    }
}

impl Ord for TermKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then_with(|| self.word.cmp(&other.word))
            .then_with(|| self.degree().cmp(&other.degree()))
            .then_with(|| self.scalars.cmp(&other.scalars))
    }
}

impl PartialOrd for TermKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical sum of terms; no zero coefficients, no repeated keys.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalForm {
    terms: BTreeMap<TermKey, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm::default()
    }

    pub fn one() -> Self {
        NormalForm::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        NormalForm::term(TermKey::one(), c)
    }

    pub fn int(n: i64) -> Self {
        NormalForm::constant(rat(n))
    }

    pub fn term(key: TermKey, coeff: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(key, coeff);
        }
        NormalForm { terms }
    }

    pub fn letter(l: Letter) -> Self {
        let key = if l.is_commutative() {
            TermKey {
                scalars: BTreeMap::from([(l, 1)]),
                word: Vec::new(),
            }
        } else {
            TermKey {
                scalars: BTreeMap::new(),
                word: vec![Factor {
                    letter: l,
                    inverse: false,
                }],
            }
        };
        NormalForm::term(key, BigRational::one())
    }

    pub fn atom(a: Atom) -> Self {
        NormalForm::letter(Letter::Atom(a))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &TermKey) -> BigRational {
        self.terms
            .get(key)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// The rational value, when this is a constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                k.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// True when no term carries a noncommuting factor.
    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|k| k.word.is_empty())
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out: Vec<&Atom> = self.terms.keys().flat_map(|k| k.atoms()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn add_term(&mut self, key: TermKey, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &NormalForm) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn scale(&self, r: &BigRational) -> NormalForm {
        if r.is_zero() {
            return NormalForm::zero();
        }
        NormalForm {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c * r)).collect(),
        }
    }

    pub fn mul(&self, other: &NormalForm) -> NormalForm {
        let mut out = NormalForm::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(ka.mul(kb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> NormalForm {
        let mut acc = NormalForm::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &NormalForm) -> NormalForm {
        &self.mul(other) - &other.mul(self)
    }

    /// Inverse of a single term whose letters are all invertible.
    pub fn inverse(&self) -> Result<NormalForm> {
        let fail = || Error::NotInvertible(format!("{} term(s)", self.terms.len()));
        if self.terms.len() != 1 {
            return Err(fail());
        }
        let (key, coeff) = self.terms.iter().next().unwrap();
        if key.scalars.keys().any(|l| !l.is_invertible())
            || key.word.iter().any(|f| !f.letter.is_invertible())
        {
            return Err(fail());
        }
        let scalars = key.scalars.iter().map(|(l, &e)| (l.clone(), -e)).collect();
        let word = key
            .word
            .iter()
            .rev()
            .map(|f| Factor {
                letter: f.letter.clone(),
                inverse: !f.inverse,
            })
            .collect();
        Ok(NormalForm::term(TermKey { scalars, word }, coeff.recip()))
    }

    /// Normalizes an expression tree.
    pub fn from_expr(e: &Expr) -> Result<NormalForm> {
        Ok(match e {
            Expr::Atom(a) => NormalForm::atom(a.clone()),
            Expr::Sum(items) => {
                let mut acc = NormalForm::zero();
                for it in items {
                    acc.add_assign(&NormalForm::from_expr(it)?);
                }
                acc
            }
            Expr::Product(items) => {
                let mut acc = NormalForm::one();
                for it in items {
                    acc = acc.mul(&NormalForm::from_expr(it)?);
                }
                acc
            }
            Expr::Scaled(r, inner) => NormalForm::from_expr(inner)?.scale(r),
            Expr::Inverse(inner) => NormalForm::from_expr(inner)?.inverse()?,
            Expr::Commutator(a, b) => {
                NormalForm::from_expr(a)?.commutator(&NormalForm::from_expr(b)?)
            }
            Expr::Func(f, arg) => {
                let arg = NormalForm::from_expr(arg)?;
                if !arg.is_scalar() {
                    return Err(Error::MatrixFuncArgument);
                }
                NormalForm::letter(Letter::Func(*f, Arc::new(arg)))
            }
        })
    }

    /// The canonical expression tree for this normal form.
    pub fn to_expr(&self) -> Expr {
        let mut terms: Vec<Expr> = self.terms.iter().map(|(k, c)| term_expr(k, c)).collect();
        if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        }
    }

    /// Replaces atoms by normal forms. `image` returns `None` to keep an atom.
    /// Function arguments are rewritten recursively.
    pub fn map_atoms<F>(&self, image: &mut F) -> Result<NormalForm>
    where
        F: FnMut(&Atom) -> Result<Option<NormalForm>>,
    {
        let mut out = NormalForm::zero();
        for (key, coeff) in &self.terms {
            let mut acc = NormalForm::constant(coeff.clone());
            for (l, &e) in &key.scalars {
                let img = map_letter(l, image)?;
                let base = if e < 0 { img.inverse()? } else { img };
                acc = acc.mul(&base.pow(e.unsigned_abs()));
            }
            for f in &key.word {
                let img = map_letter(&f.letter, image)?;
                let img = if f.inverse { img.inverse()? } else { img };
                acc = acc.mul(&img);
            }
            out.add_assign(&acc);
        }
        Ok(out)
    }
}

fn map_letter<F>(l: &Letter, image: &mut F) -> Result<NormalForm>
where
    F: FnMut(&Atom) -> Result<Option<NormalForm>>,
{
    match l {
        Letter::Atom(a) => Ok(image(a)?.unwrap_or_else(|| NormalForm::atom(a.clone()))),
        Letter::Func(f, arg) => {
            let new_arg = arg.map_atoms(image)?;
            if !new_arg.is_scalar() {
                return Err(Error::MatrixFuncArgument);
            }
            Ok(NormalForm::letter(Letter::Func(*f, Arc::new(new_arg))))
        }
    }
}

fn letter_expr(l: &Letter) -> Expr {
    match l {
        Letter::Atom(a) => Expr::Atom(a.clone()),
        Letter::Func(f, arg) => Expr::Func(*f, Box::new(arg.to_expr())),
    }
}

fn term_expr(key: &TermKey, coeff: &BigRational) -> Expr {
    let mut factors = Vec::new();
    for (l, &e) in &key.scalars {
        for _ in 0..e.unsigned_abs() {
            let le = letter_expr(l);
            factors.push(if e < 0 {
                Expr::Inverse(Box::new(le))
            } else {
                le
            });
        }
    }
    for f in &key.word {
        let le = letter_expr(&f.letter);
        factors.push(if f.inverse {
            Expr::Inverse(Box::new(le))
        } else {
            le
        });
    }
    let body = if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::Product(factors)
    };
    if coeff.is_one() {
        body
    } else {
        Expr::Scaled(coeff.clone(), Box::new(body))
    }
}

impl Add for &NormalForm {
    type Output = NormalForm;
    fn add(self, rhs: &NormalForm) -> NormalForm {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &NormalForm {
    type Output = NormalForm;
    fn sub(self, rhs: &NormalForm) -> NormalForm {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }
}

impl Neg for &NormalForm {
    type Output = NormalForm;
    fn neg(self) -> NormalForm {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &NormalForm {
    type Output = NormalForm;
    fn mul(self, rhs: &NormalForm) -> NormalForm {
        NormalForm::mul(self, rhs)
    }
}

/// The canonical representative of `e`.
///
/// # Panics
///
/// Panics if `e` contains an `Inverse` of a non-invertible expression or a
/// `Func` of a matrix-valued argument. [`Expr::inverse`] and [`Expr::func`]
/// never build such trees.
pub fn normal_form(e: &Expr) -> Expr {
    NormalForm::from_expr(e)
        .expect("ill-formed expression tree")
        .to_expr()
}

/// True iff `e` normalizes to the empty sum.
pub fn is_zero(e: &Expr) -> bool {
    NormalForm::from_expr(e)
        .expect("ill-formed expression tree")
        .is_zero()
}

/// Replaces every occurrence of the jet coordinate `target` by `replacement`.
pub fn substitute(e: &Expr, target: &Atom, replacement: &Expr) -> Result<Expr> {
    if !matches!(target, Atom::Jet { .. }) {
        return Err(Error::Kind(
            "substitution target must be a jet coordinate".into(),
        ));
    }
    let repl = NormalForm::from_expr(replacement)?;
    let nf = NormalForm::from_expr(e)?;
    let out = nf.map_atoms(&mut |a| Ok((a == target).then(|| repl.clone())))?;
    Ok(out.to_expr())
}
