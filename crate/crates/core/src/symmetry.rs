//! Symmetry conditions `Δ_Q F ≡ 0 mod F`, linear operator certificates and
//! structure constants of symmetry bases.
//!
//! "Modulo F" is realized by substituting a solved form `u_L = rhs` and all
//! of its total derivatives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::calculus::{
    bracket_characteristic, char_derivative, total_derivative, total_derivative_multi,
    Characteristic,
};
use crate::error::{Error, Result};
use crate::expr::{Atom, Kind, MultiIndex};
use crate::linsolve::{rank, solve_combination};
use crate::normalize::{Letter, Monomial, NormalForm, TermKey};
use crate::problem::Problem;

const MAX_REDUCTION_DEPTH: usize = 256;

/// A differential equation `F[u] = 0` together with a solved form
/// `u_L = rhs` used for reduction.
#[derive(Clone, Debug)]
pub struct Pde {
    name: String,
    problem: Problem,
    f: NormalForm,
    leading: MultiIndex,
    rhs: NormalForm,
}

impl Pde {
    /// Validates `f` against the solved form: `rhs` must not mention any jet
    /// at or above `leading`, and substituting the solved form into `f` must
    /// give zero.
    pub fn new(
        name: &str,
        problem: Problem,
        f: NormalForm,
        leading: MultiIndex,
        rhs: NormalForm,
    ) -> Result<Self> {
        if leading.is_empty() {
            return Err(Error::InvalidSolvedForm(
                "leading jet must have order at least 1".into(),
            ));
        }
        if leading.iter().any(|i| i >= problem.ncoords()) {
            return Err(Error::InvalidSolvedForm(
                "leading jet uses an unknown coordinate".into(),
            ));
        }
        problem.check_declared(&f)?;
        problem.check_declared(&rhs)?;
        for a in rhs.atoms() {
            match a {
                Atom::Jet { index, .. } if index.contains(&leading) => {
                    return Err(Error::InvalidSolvedForm(format!(
                        "right-hand side mentions {} which lies above the leading jet",
                        problem.render(&NormalForm::atom(a.clone()))
                    )));
                }
                Atom::Potential { .. } => {
                    return Err(Error::InvalidSolvedForm(
                        "right-hand side may not mention potentials".into(),
                    ));
                }
                _ => {}
            }
        }
        if problem.kind() == Kind::Scalar && !(f.is_scalar() && rhs.is_scalar()) {
            return Err(Error::Kind(
                "matrix-valued equation for a scalar dependent".into(),
            ));
        }
        let target = problem.jet_atom(leading.clone());
        let check = f.map_atoms(&mut |a| Ok((a == &target).then(|| rhs.clone())))?;
        if !check.is_zero() {
            return Err(Error::InvalidSolvedForm(format!(
                "substituting the solved form into F leaves {}",
                problem.render(&check)
            )));
        }
        Ok(Pde {
            name: name.to_string(),
            problem,
            f,
            leading,
            rhs,
        })
    }

    /// `F = u_L - rhs`.
    pub fn solved(
        name: &str,
        problem: Problem,
        leading: MultiIndex,
        rhs: NormalForm,
    ) -> Result<Self> {
        let f = &NormalForm::atom(problem.jet_atom(leading.clone())) - &rhs;
        Pde::new(name, problem, f, leading, rhs)
    }

    /// Builds from text. `leading` is a jet such as `u_xt`; `f` defaults to
    /// `leading - rhs` when `None`.
    pub fn from_text(
        name: &str,
        problem: Problem,
        f: Option<&str>,
        leading: &str,
        rhs: &str,
    ) -> Result<Self> {
        let lead = problem.parse_nf(leading)?;
        let index = match lead.terms().collect::<Vec<_>>().as_slice() {
            [(key, c)] if c.is_one() => key.atoms().first().and_then(|a| match a {
                Atom::Jet { index, .. } if key.atoms().len() == 1 => Some(index.clone()),
                _ => None,
            }),
            _ => None,
        }
        .ok_or_else(|| {
            Error::InvalidSolvedForm(format!("`{leading}` is not a single jet coordinate"))
        })?;
        let rhs = problem.parse_nf(rhs)?;
        match f {
            Some(text) => {
                let f = problem.parse_nf(text)?;
                Pde::new(name, problem, f, index, rhs)
            }
            None => Pde::solved(name, problem, index, rhs),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub(crate) fn problem_mut(&mut self) -> &mut Problem {
        &mut self.problem
    }

    pub fn f(&self) -> &NormalForm {
        &self.f
    }

    pub fn leading(&self) -> &MultiIndex {
        &self.leading
    }

    pub fn rhs(&self) -> &NormalForm {
        &self.rhs
    }
}

struct Reducer<'a> {
    pde: &'a Pde,
    cache: BTreeMap<MultiIndex, NormalForm>,
    active: BTreeSet<MultiIndex>,
}

impl Reducer<'_> {
    fn reduce(&mut self, p: &NormalForm) -> Result<NormalForm> {
        let leading = self.pde.leading.clone();
        p.map_atoms(&mut |a| match a {
            Atom::Jet { index, .. } if index.contains(&leading) => self.jet(index).map(Some),
            _ => Ok(None),
        })
    }

    fn jet(&mut self, index: &MultiIndex) -> Result<NormalForm> {
        if let Some(v) = self.cache.get(index) {
            return Ok(v.clone());
        }
        if self.active.contains(index) || self.active.len() > MAX_REDUCTION_DEPTH {
            let atom = self.pde.problem.jet_atom(index.clone());
            return Err(Error::ReductionCycle(
                self.pde.problem.render(&NormalForm::atom(atom)),
            ));
        }
        self.active.insert(index.clone());
        let value = if *index == self.pde.leading {
            self.pde.rhs.clone()
        } else {
            let extra = index
                .minus(&self.pde.leading)
                .expect("index lies above leading");
            let i = extra.last().expect("strictly above leading");
            let below = index.without(i).unwrap();
            let base = self.jet(&below)?;
            let d = total_derivative(&self.pde.problem, &base, i)?;
            self.reduce(&d)?
        };
        self.active.remove(index);
        self.cache.insert(index.clone(), value.clone());
        Ok(value)
    }
}

/// Eliminates every jet at or above the leading jet using the solved form
/// and its total derivatives.
pub fn reduce_mod_pde(pde: &Pde, p: &NormalForm) -> Result<NormalForm> {
    Reducer {
        pde,
        cache: BTreeMap::new(),
        active: BTreeSet::new(),
    }
    .reduce(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Symmetry,
    NotSymmetry,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Symmetry => "Symmetry",
            Verdict::NotSymmetry => "NotSymmetry",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SymmetryReport {
    pub verdict: Verdict,
    /// `Δ_Q F` before reduction.
    pub raw: NormalForm,
    pub remainder: NormalForm,
    pub certificate: Option<LinearOperatorAnsatz>,
}

/// Evaluates `Δ_Q F` and reduces it modulo the equation. The certificate is
/// left empty; see [`find_operator`].
pub fn check_symmetry(pde: &Pde, q: &Characteristic) -> Result<SymmetryReport> {
    let raw = char_derivative(&pde.problem, &pde.f, q)?;
    let remainder = reduce_mod_pde(pde, &raw)?;
    let verdict = if remainder.is_zero() {
        Verdict::Symmetry
    } else {
        Verdict::NotSymmetry
    };
    Ok(SymmetryReport {
        verdict,
        raw,
        remainder,
        certificate: None,
    })
}

/// One term `e ↦ left · D_J e · right` of a linear operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorTerm {
    pub left: NormalForm,
    pub index: MultiIndex,
    pub right: NormalForm,
}

/// A linear differential operator with base-space coefficients.
///
/// The text form writes the operand as the placeholder `F`, e.g.
/// `5*F + x*F_x + 3*t*F_t` or `F*M - M*F`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearOperatorAnsatz {
    pub terms: Vec<OperatorTerm>,
}

pub const PLACEHOLDER: &str = "F";

fn placeholder_atom(problem: &Problem, index: MultiIndex) -> Atom {
    Atom::Base {
        name: PLACEHOLDER.into(),
        kind: problem.kind(),
        args: (0..problem.ncoords()).collect(),
        partials: index,
    }
}

fn is_placeholder(a: &Atom) -> bool {
    matches!(a, Atom::Base { name, .. } if &**name == PLACEHOLDER)
}

impl LinearOperatorAnsatz {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn parse(problem: &Problem, text: &str) -> Result<Self> {
        let ext = problem
            .with_placeholder(PLACEHOLDER)
            .map_err(|e| Error::InvalidOperator(format!("cannot declare placeholder: {e}")))?;
        let nf = ext.parse_nf(text)?;
        let mut terms = Vec::new();
        for (key, coeff) in nf.terms() {
            terms.push(split_term(key, coeff).ok_or_else(|| {
                let t = NormalForm::term(key.clone(), coeff.clone());
                Error::InvalidOperator(format!(
                    "term `{}` is not of the form a*D(F)*b with base-space a, b",
                    ext.render(&t)
                ))
            })?);
        }
        Ok(LinearOperatorAnsatz { terms })
    }

    /// `Σ left · D_J e · right`.
    pub fn apply(&self, problem: &Problem, e: &NormalForm) -> Result<NormalForm> {
        let mut cache: BTreeMap<&MultiIndex, NormalForm> = BTreeMap::new();
        let mut out = NormalForm::zero();
        for t in &self.terms {
            if !cache.contains_key(&t.index) {
                cache.insert(&t.index, total_derivative_multi(problem, e, &t.index)?);
            }
            out.add_assign(&t.left.mul(&cache[&t.index]).mul(&t.right));
        }
        Ok(out)
    }

    /// The operator applied to the placeholder, as a normal form.
    pub fn to_normal_form(&self, problem: &Problem) -> NormalForm {
        let mut out = NormalForm::zero();
        for t in &self.terms {
            let f = NormalForm::atom(placeholder_atom(problem, t.index.clone()));
            out.add_assign(&t.left.mul(&f).mul(&t.right));
        }
        out
    }

    pub fn render(&self, problem: &Problem) -> String {
        problem.render(&self.to_normal_form(problem))
    }
}

fn split_term(key: &TermKey, coeff: &BigRational) -> Option<OperatorTerm> {
    let atoms = key.atoms();
    if atoms.iter().any(|a| a.is_fiber()) || atoms.iter().filter(|a| is_placeholder(a)).count() != 1
    {
        return None;
    }
    let partials = |l: &Letter| match l {
        Letter::Atom(Atom::Base { name, partials, .. }) if &**name == PLACEHOLDER => {
            Some(partials.clone())
        }
        _ => None,
    };
    for (l, &e) in &key.scalars {
        if let Some(index) = partials(l) {
            if e != 1 {
                return None;
            }
            let mut scalars = key.scalars.clone();
            scalars.remove(l);
            let left = NormalForm::term(
                TermKey {
                    scalars,
                    word: key.word.clone(),
                },
                coeff.clone(),
            );
            return Some(OperatorTerm {
                left,
                index,
                right: NormalForm::one(),
            });
        }
    }
    let pos = key
        .word
        .iter()
        .position(|f| partials(&f.letter).is_some())?;
    let f = &key.word[pos];
    if f.inverse {
        return None;
    }
    let left = NormalForm::term(
        TermKey {
            scalars: key.scalars.clone(),
            word: key.word[..pos].to_vec(),
        },
        coeff.clone(),
    );
    let right = NormalForm::term(
        TermKey {
            scalars: Monomial::new(),
            word: key.word[pos + 1..].to_vec(),
        },
        BigRational::one(),
    );
    Some(OperatorTerm {
        left,
        index: partials(&f.letter)?,
        right,
    })
}

/// True iff `Δ_Q F = L̂ F` holds identically, without reduction.
pub fn certify_operator(
    pde: &Pde,
    q: &Characteristic,
    lhat: &LinearOperatorAnsatz,
) -> Result<bool> {
    let raw = char_derivative(&pde.problem, &pde.f, q)?;
    let applied = lhat.apply(&pde.problem, &pde.f)?;
    Ok((&raw - &applied).is_zero())
}

/// Bounds for [`find_operator`].
#[derive(Clone, Debug)]
pub struct AnsatzConfig {
    /// Highest derivative order `|J|` in `D_J F`.
    pub max_order: usize,
    /// Highest total degree of coefficient monomials in the coordinates and
    /// declared constants.
    pub degree: usize,
    /// Allow declared constant matrices as left and right factors.
    pub constant_matrices: bool,
}

impl Default for AnsatzConfig {
    fn default() -> Self {
        AnsatzConfig {
            max_order: 2,
            degree: 2,
            constant_matrices: true,
        }
    }
}

fn monomials(letters: &[Letter], degree: usize) -> Vec<Monomial> {
    let mut out = vec![Monomial::new()];
    let mut frontier = vec![(Monomial::new(), 0usize)];
    for _ in 0..degree {
        let mut next = Vec::new();
        for (m, start) in &frontier {
            for (k, l) in letters.iter().enumerate().skip(*start) {
                let mut m2 = m.clone();
                *m2.entry(l.clone()).or_insert(0) += 1;
                out.push(m2.clone());
                next.push((m2, k));
            }
        }
        frontier = next;
    }
    out
}

/// Searches for `L̂` with `Δ_Q F = L̂ F` among operators
/// `Σ m(x) · A · D_J F · B` where `m` ranges over coefficient monomials,
/// `|J| ≤ max_order`, and `A`, `B` over the identity and (for matrix problems)
/// the declared constant matrices. Returns `None` when no such operator
/// exists within the bounds.
pub fn find_operator(
    pde: &Pde,
    q: &Characteristic,
    cfg: &AnsatzConfig,
) -> Result<Option<LinearOperatorAnsatz>> {
    let problem = &pde.problem;
    let raw = char_derivative(problem, &pde.f, q)?;
    if !reduce_mod_pde(pde, &raw)?.is_zero() {
        return Ok(None);
    }
    let mut letters: Vec<Letter> = problem
        .coordinates()
        .iter()
        .map(|c| Letter::Atom(Atom::Coord(c.clone())))
        .collect();
    letters.extend(
        problem
            .constants()
            .map(|c| Letter::Atom(Atom::Const(c.into()))),
    );
    let monos = monomials(&letters, cfg.degree);

    let mut sides = vec![NormalForm::one()];
    if problem.kind() == Kind::Matrix && cfg.constant_matrices {
        for m in problem.matrices() {
            sides.push(problem.parse_nf(m)?);
        }
    }

    let mut candidates = Vec::new();
    let mut columns = Vec::new();
    for index in MultiIndex::all_up_to(problem.ncoords(), cfg.max_order) {
        let dj = total_derivative_multi(problem, &pde.f, &index)?;
        for mono in &monos {
            let m = NormalForm::term(
                TermKey {
                    scalars: mono.clone(),
                    word: Vec::new(),
                },
                BigRational::one(),
            );
            for a in &sides {
                for b in &sides {
                    let left = m.mul(a);
                    columns.push(vec![left.mul(&dj).mul(b)]);
                    candidates.push(OperatorTerm {
                        left,
                        index: index.clone(),
                        right: b.clone(),
                    });
                }
            }
        }
    }
    let Some(x) = solve_combination(&columns, &[raw]) else {
        return Ok(None);
    };
    let terms = candidates
        .into_iter()
        .zip(x)
        .filter(|(_, c)| !c.is_zero())
        .map(|(t, c)| OperatorTerm {
            left: t.left.scale(&c),
            ..t
        })
        .collect();
    Ok(Some(LinearOperatorAnsatz { terms }))
}

/// Structure constants `c[i][j][k]` with `[Q_i, Q_j] = Σ_k c[i][j][k] Q_k`.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    pub basis: Vec<Characteristic>,
    pub c: Vec<Vec<Vec<BigRational>>>,
}

impl StructureConstants {
    pub fn get(&self, i: usize, j: usize, k: usize) -> &BigRational {
        &self.c[i][j][k]
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.basis.len();
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.c[i][j][k] == -self.c[j][i][k].clone())))
    }
}

/// Brackets every pair of basis characteristics and expresses the result in
/// the basis: exactly when possible, otherwise modulo the equation.
pub fn structure_constants(pde: &Pde, basis: &[Characteristic]) -> Result<StructureConstants> {
    let problem = &pde.problem;
    for q in basis {
        if check_symmetry(pde, q)?.verdict != Verdict::Symmetry {
            return Err(Error::NotASymmetry(q.name().to_string()));
        }
    }
    let qs: Vec<NormalForm> = basis.iter().map(|q| q.q().clone()).collect();
    if rank(&qs) != qs.len() {
        return Err(Error::BasisDependent);
    }
    let reduced: Vec<NormalForm> = qs
        .iter()
        .map(|q| reduce_mod_pde(pde, q))
        .collect::<Result<_>>()?;
    let exact_cols: Vec<Vec<NormalForm>> = qs.iter().map(|q| vec![q.clone()]).collect();
    let reduced_cols: Vec<Vec<NormalForm>> = reduced.iter().map(|q| vec![q.clone()]).collect();

    let n = basis.len();
    let mut c = vec![vec![vec![BigRational::zero(); n]; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let b = bracket_characteristic(problem, &basis[i], &basis[j])?;
            let coeffs = match solve_combination(&exact_cols, &[b.q().clone()]) {
                Some(x) => x,
                None => {
                    let rb = reduce_mod_pde(pde, b.q())?;
                    solve_combination(&reduced_cols, &[rb]).ok_or_else(|| {
                        Error::BracketNotInSpan {
                            i: i + 1,
                            j: j + 1,
                            bracket: problem.render(b.q()),
                        }
                    })?
                }
            };
            for (k, v) in coeffs.into_iter().enumerate() {
                c[j][i][k] = -v.clone();
                c[i][j][k] = v;
            }
        }
    }
    let sc = StructureConstants {
        basis: basis.to_vec(),
        c,
    };
    debug_assert!(sc.is_antisymmetric());
    Ok(sc)
}
