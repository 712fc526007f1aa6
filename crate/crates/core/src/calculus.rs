//! Total derivatives `D_i`, characteristic derivatives `Δ_Q`, and the Lie
//! bracket of characteristics.
//!
//! Both operators are derivations on the noncommutative algebra of normal
//! forms, so they share one Leibniz engine ([`derive`]) and differ only in
//! the image they assign to each atom.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::expr::{Atom, Expr, Kind, MultiIndex, ScalarFn, Sym};
use crate::normalize::{Factor, Letter, NormalForm, TermKey};
use crate::problem::{Problem, Symbol};

/// A characteristic `Q[u]`, the generator of `Δ_Q` with `Δ_Q u = Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Characteristic {
    name: Sym,
    q: NormalForm,
}

/// Constant factor accepted by [`Characteristic::scale`]. Coordinate-dependent
/// factors are not allowed: they do not commute with the total derivatives.
#[derive(Clone, Debug)]
pub enum ConstFactor {
    Rational(BigRational),
    Symbol(String),
}

impl Characteristic {
    pub fn new(problem: &Problem, name: &str, q: &Expr) -> Result<Self> {
        Self::from_normal_form(problem, name, NormalForm::from_expr(q)?)
    }

    pub fn from_normal_form(problem: &Problem, name: &str, q: NormalForm) -> Result<Self> {
        problem.check_declared(&q)?;
        if problem.kind() == Kind::Scalar && !q.is_scalar() {
            return Err(Error::Kind(format!(
                "characteristic `{name}` is matrix-valued but the dependent is scalar"
            )));
        }
        Ok(Characteristic {
            name: name.into(),
            q,
        })
    }

    pub fn parse(problem: &Problem, name: &str, text: &str) -> Result<Self> {
        Self::new(problem, name, &problem.parse(text)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn q(&self) -> &NormalForm {
        &self.q
    }

    pub fn expr(&self) -> Expr {
        self.q.to_expr()
    }

    pub fn renamed(&self, name: &str) -> Self {
        Characteristic {
            name: name.into(),
            q: self.q.clone(),
        }
    }

    /// `λQ` for a rational or a declared constant symbol `λ`.
    pub fn scale(&self, problem: &Problem, factor: &ConstFactor) -> Result<Self> {
        let (q, label) = match factor {
            ConstFactor::Rational(r) => (self.q.scale(r), r.to_string()),
            ConstFactor::Symbol(s) => {
                if problem.lookup(s) != Some(Symbol::Constant) {
                    return Err(Error::Kind(format!(
                        "`{s}` is not a declared constant symbol"
                    )));
                }
                let lam = NormalForm::atom(Atom::Const(s.as_str().into()));
                (lam.mul(&self.q), s.clone())
            }
        };
        Ok(Characteristic {
            name: format!("{label}*{}", self.name).into(),
            q,
        })
    }

    pub fn sum(&self, other: &Characteristic) -> Self {
        Characteristic {
            name: format!("{}+{}", self.name, other.name).into(),
            q: &self.q + &other.q,
        }
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn derivative_of(f: ScalarFn, arg: &Arc<NormalForm>) -> NormalForm {
    match f {
        ScalarFn::Sin => NormalForm::letter(Letter::Func(ScalarFn::Cos, arg.clone())),
        ScalarFn::Cos => -&NormalForm::letter(Letter::Func(ScalarFn::Sin, arg.clone())),
        ScalarFn::Exp => NormalForm::letter(Letter::Func(ScalarFn::Exp, arg.clone())),
    }
}

fn derive_letter<F>(l: &Letter, image: &mut F) -> Result<NormalForm>
where
    F: FnMut(&Atom) -> Result<NormalForm>,
{
    match l {
        Letter::Atom(a) => image(a),
        Letter::Func(f, arg) => {
            let inner = derive(arg, image)?;
            if inner.is_zero() {
                return Ok(inner);
            }
            Ok(derivative_of(*f, arg).mul(&inner))
        }
    }
}

/// Applies the derivation determined by `image` on atoms, extended by the
/// Leibniz rule, `D(w^{-1}) = -w^{-1}(Dw)w^{-1}` and the chain rule for
/// analytic functions.
pub fn derive<F>(p: &NormalForm, image: &mut F) -> Result<NormalForm>
where
    F: FnMut(&Atom) -> Result<NormalForm>,
{
    let mut out = NormalForm::zero();
    for (key, coeff) in p.terms() {
        for (l, &e) in &key.scalars {
            let d = derive_letter(l, image)?;
            if d.is_zero() {
                continue;
            }
            let mut rest = key.scalars.clone();
            if e == 1 {
                rest.remove(l);
            } else {
                rest.insert(l.clone(), e - 1);
            }
            let t = NormalForm::term(
                TermKey {
                    scalars: rest,
                    word: key.word.clone(),
                },
                coeff * rat(i64::from(e)),
            );
            out.add_assign(&d.mul(&t));
        }
        for (j, f) in key.word.iter().enumerate() {
            let mut d = derive_letter(&f.letter, image)?;
            if d.is_zero() {
                continue;
            }
            if f.inverse {
                let inv = NormalForm::term(
                    TermKey {
                        scalars: Default::default(),
                        word: vec![f.clone()],
                    },
                    -BigRational::one(),
                );
                let inv_pos = NormalForm::term(
                    TermKey {
                        scalars: Default::default(),
                        word: vec![Factor {
                            letter: f.letter.clone(),
                            inverse: true,
                        }],
                    },
                    BigRational::one(),
                );
                d = inv.mul(&d).mul(&inv_pos);
            }
            let prefix = NormalForm::term(
                TermKey {
                    scalars: key.scalars.clone(),
                    word: key.word[..j].to_vec(),
                },
                coeff.clone(),
            );
            let suffix = NormalForm::term(
                TermKey {
                    scalars: Default::default(),
                    word: key.word[j + 1..].to_vec(),
                },
                BigRational::one(),
            );
            out.add_assign(&prefix.mul(&d).mul(&suffix));
        }
    }
    Ok(out)
}

fn total_image(problem: &Problem, a: &Atom, i: usize) -> Result<NormalForm> {
    Ok(match a {
        Atom::Const(_) | Atom::ConstMatrix { .. } => NormalForm::zero(),
        Atom::Coord(c) => {
            if c.index == i {
                NormalForm::one()
            } else {
                NormalForm::zero()
            }
        }
        Atom::Jet { dep, index } => NormalForm::atom(Atom::Jet {
            dep: dep.clone(),
            index: index.with(i),
        }),
        Atom::Base {
            name,
            kind,
            args,
            partials,
        } => {
            if args.iter().any(|a| a == i) {
                NormalForm::atom(Atom::Base {
                    name: name.clone(),
                    kind: *kind,
                    args: args.clone(),
                    partials: partials.with(i),
                })
            } else {
                NormalForm::zero()
            }
        }
        Atom::Potential { name, .. } => problem.potential(name)?.derivative(i).clone(),
    })
}

/// `D_i p`.
pub fn total_derivative(problem: &Problem, p: &NormalForm, i: usize) -> Result<NormalForm> {
    if i >= problem.ncoords() {
        return Err(Error::UnknownCoordinate(format!("#{i}")));
    }
    derive(p, &mut |a| total_image(problem, a, i))
}

/// `D_J p`, applying the derivatives in the sorted order of `J`.
pub fn total_derivative_multi(
    problem: &Problem,
    p: &NormalForm,
    index: &MultiIndex,
) -> Result<NormalForm> {
    let mut acc = p.clone();
    for i in index.iter() {
        acc = total_derivative(problem, &acc, i)?;
    }
    Ok(acc)
}

/// Memoized `D_J Q` for one characteristic.
struct JetImages<'a> {
    problem: &'a Problem,
    cache: BTreeMap<MultiIndex, NormalForm>,
}

impl<'a> JetImages<'a> {
    fn new(problem: &'a Problem, q: &Characteristic) -> Self {
        JetImages {
            problem,
            cache: BTreeMap::from([(MultiIndex::empty(), q.q.clone())]),
        }
    }

    fn get(&mut self, index: &MultiIndex) -> Result<NormalForm> {
        if let Some(v) = self.cache.get(index) {
            return Ok(v.clone());
        }
        let last = index.last().expect("empty index is always cached");
        let prev = index.without(last).unwrap();
        let v = total_derivative(self.problem, &self.get(&prev)?, last)?;
        self.cache.insert(index.clone(), v.clone());
        Ok(v)
    }
}

/// `Δ_Q p`.
pub fn char_derivative(
    problem: &Problem,
    p: &NormalForm,
    q: &Characteristic,
) -> Result<NormalForm> {
    let mut jets = JetImages::new(problem, q);
    derive(p, &mut |a| match a {
        Atom::Jet { index, .. } => jets.get(index),
        Atom::Potential { name, .. } => problem
            .potential(name)?
            .char_image(&q.q)
            .cloned()
            .ok_or_else(|| Error::NonlocalActionUndefined {
                potential: name.to_string(),
                characteristic: format!("`{}` ({})", q.name, problem.render(&q.q)),
            }),
        _ => Ok(NormalForm::zero()),
    })
}

/// The characteristic of `[Δ_1, Δ_2]`: `Δ_1 Q_2 - Δ_2 Q_1`.
pub fn bracket_characteristic(
    problem: &Problem,
    q1: &Characteristic,
    q2: &Characteristic,
) -> Result<Characteristic> {
    let a = char_derivative(problem, &q2.q, q1)?;
    let b = char_derivative(problem, &q1.q, q2)?;
    Ok(Characteristic {
        name: format!("[{},{}]", q1.name, q2.name).into(),
        q: &a - &b,
    })
}

/// Highest jet order among the jet atoms of `p`.
pub fn max_jet_order(p: &NormalForm) -> usize {
    p.atoms()
        .into_iter()
        .filter_map(|a| a.jet_index().map(MultiIndex::order))
        .max()
        .unwrap_or(0)
}

/// Formal partial derivative of a commutative normal form with respect to
/// the jet atom `jet`.
fn formal_partial(p: &NormalForm, jet: &Atom) -> Result<NormalForm> {
    let mut out = NormalForm::zero();
    for (key, coeff) in p.terms() {
        if !key.word.is_empty() {
            return Err(Error::Kind(
                "formal partials need a commutative expression".into(),
            ));
        }
        for (l, &e) in &key.scalars {
            let d = match l {
                Letter::Atom(a) if a == jet => NormalForm::one(),
                Letter::Atom(Atom::Potential { .. }) => {
                    return Err(Error::Kind(
                        "prolongation formula does not apply to potentials".into(),
                    ))
                }
                Letter::Atom(_) => continue,
                Letter::Func(f, arg) => {
                    let inner = formal_partial(arg, jet)?;
                    if inner.is_zero() {
                        continue;
                    }
                    derivative_of(*f, arg).mul(&inner)
                }
            };
            let mut rest = key.scalars.clone();
            if e == 1 {
                rest.remove(l);
            } else {
                rest.insert(l.clone(), e - 1);
            }
            let t = NormalForm::term(
                TermKey {
                    scalars: rest,
                    word: Vec::new(),
                },
                coeff * rat(i64::from(e)),
            );
            out.add_assign(&d.mul(&t));
        }
    }
    Ok(out)
}

/// `Σ_J (D_J Q) ∂p/∂u_J` over all `J` up to `max_order`; valid for scalar
/// dependents only. `max_order` defaults to the sum of the highest jet
/// orders in `p` and `Q`.
pub fn scalar_prolongation_apply(
    problem: &Problem,
    p: &NormalForm,
    q: &Characteristic,
    max_order: Option<usize>,
) -> Result<NormalForm> {
    if problem.kind() != Kind::Scalar {
        return Err(Error::Kind(
            "the prolongation formula is only valid for scalar dependents".into(),
        ));
    }
    let max_order = max_order.unwrap_or(max_jet_order(p) + max_jet_order(&q.q));
    let mut out = NormalForm::zero();
    for index in MultiIndex::all_up_to(problem.ncoords(), max_order) {
        let partial = formal_partial(p, &problem.jet_atom(index.clone()))?;
        if partial.is_zero() {
            continue;
        }
        let djq = total_derivative_multi(problem, &q.q, &index)?;
        out.add_assign(&djq.mul(&partial));
    }
    Ok(out)
}
