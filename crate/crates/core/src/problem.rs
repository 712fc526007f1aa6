//! Per-problem declarations: coordinates, the dependent variable, constants,
//! base functions and the nonlocal potential registry.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Atom, Coordinate, Dependent, Expr, Kind, MultiIndex, Sym};
use crate::normalize::NormalForm;

const RESERVED: &[&str] = &["inv", "comm", "D", "sin", "cos", "exp"];

/// What a declared name refers to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Symbol {
    Coordinate(usize),
    Dependent,
    Constant,
    Matrix,
    Function,
    Potential,
}

/// A potential defined through its gradient, plus optional registered
/// images under characteristic derivatives (keyed by the normalized
/// characteristic).
#[derive(Clone, Debug)]
pub struct RegisteredPotential {
    pub(crate) atom: Atom,
    pub(crate) gradient: Vec<NormalForm>,
    pub(crate) char_images: BTreeMap<NormalForm, NormalForm>,
}

impl RegisteredPotential {
    pub fn derivative(&self, i: usize) -> &NormalForm {
        &self.gradient[i]
    }

    pub fn char_image(&self, q: &NormalForm) -> Option<&NormalForm> {
        self.char_images.get(q)
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    coords: Vec<Coordinate>,
    dependent: Arc<Dependent>,
    constants: BTreeMap<Sym, ()>,
    matrices: BTreeMap<Sym, bool>,
    functions: BTreeMap<Sym, (Kind, MultiIndex)>,
    potentials: BTreeMap<Sym, RegisteredPotential>,
}

impl Problem {
    pub fn new(coords: &[&str], dependent: Dependent) -> Result<Self> {
        let mut p = Problem {
            coords: Vec::new(),
            dependent: Arc::new(Dependent::new("_", Kind::Scalar, false)),
            constants: BTreeMap::new(),
            matrices: BTreeMap::new(),
            functions: BTreeMap::new(),
            potentials: BTreeMap::new(),
        };
        for (index, &name) in coords.iter().enumerate() {
            p.check_fresh(name)?;
            p.coords.push(Coordinate {
                index,
                name: name.into(),
            });
        }
        p.check_fresh(&dependent.name)?;
        p.dependent = Arc::new(dependent);
        Ok(p)
    }

    pub fn with_constant(mut self, name: &str) -> Result<Self> {
        self.check_fresh(name)?;
        self.constants.insert(name.into(), ());
        Ok(self)
    }

    pub fn with_matrix(mut self, name: &str, invertible: bool) -> Result<Self> {
        self.check_fresh(name)?;
        self.matrices.insert(name.into(), invertible);
        Ok(self)
    }

    /// Declares a base function of the named coordinates.
    pub fn with_function(mut self, name: &str, kind: Kind, args: &[&str]) -> Result<Self> {
        self.check_fresh(name)?;
        let args = args
            .iter()
            .map(|a| self.coordinate(a))
            .collect::<Result<Vec<_>>>()?;
        let mut args = MultiIndex::new(args);
        let mut dedup: Vec<usize> = args.iter().collect();
        dedup.dedup();
        args = MultiIndex::new(dedup);
        self.functions.insert(name.into(), (kind, args));
        Ok(self)
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && name.chars().all(|c| c.is_ascii_alphanumeric());
        if !valid {
            return Err(Error::UndeclaredSymbol(format!("invalid name `{name}`")));
        }
        if RESERVED.contains(&name) || self.lookup(name).is_some() {
            return Err(Error::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        if let Some(c) = self.coords.iter().find(|c| &*c.name == name) {
            return Some(Symbol::Coordinate(c.index));
        }
        if &*self.dependent.name == name {
            return Some(Symbol::Dependent);
        }
        if self.constants.contains_key(name) {
            return Some(Symbol::Constant);
        }
        if self.matrices.contains_key(name) {
            return Some(Symbol::Matrix);
        }
        if self.functions.contains_key(name) {
            return Some(Symbol::Function);
        }
        if self.potentials.contains_key(name) {
            return Some(Symbol::Potential);
        }
        None
    }

    pub fn coordinates(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn ncoords(&self) -> usize {
        self.coords.len()
    }

    pub fn coordinate(&self, name: &str) -> Result<usize> {
        self.coords
            .iter()
            .find(|c| &*c.name == name)
            .map(|c| c.index)
            .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))
    }

    pub fn coordinate_name(&self, i: usize) -> &str {
        &self.coords[i].name
    }

    pub fn dependent(&self) -> &Arc<Dependent> {
        &self.dependent
    }

    pub fn kind(&self) -> Kind {
        self.dependent.kind
    }

    pub fn matrices(&self) -> impl Iterator<Item = &str> {
        self.matrices.keys().map(|k| &**k)
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.constants.keys().map(|k| &**k)
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, Kind, &MultiIndex)> {
        self.functions
            .iter()
            .map(|(k, (kind, args))| (&**k, *kind, args))
    }

    pub fn potentials(&self) -> impl Iterator<Item = (&str, &RegisteredPotential)> {
        self.potentials.iter().map(|(k, v)| (&**k, v))
    }

    pub fn potential(&self, name: &str) -> Result<&RegisteredPotential> {
        self.potentials
            .get(name)
            .ok_or_else(|| Error::UnregisteredPotential(name.to_string()))
    }

    /// `u_J` for coordinate indices `idx`, canonically sorted.
    pub fn mk_jet(&self, idx: &[usize]) -> Result<Expr> {
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.coords.len()) {
            return Err(Error::UnknownCoordinate(format!("#{bad}")));
        }
        Ok(Expr::Atom(self.jet_atom(MultiIndex::new(idx.to_vec()))))
    }

    /// `u_J` for coordinate names.
    pub fn jet(&self, names: &[&str]) -> Result<Expr> {
        let idx = names
            .iter()
            .map(|n| self.coordinate(n))
            .collect::<Result<Vec<_>>>()?;
        self.mk_jet(&idx)
    }

    pub fn jet_atom(&self, index: MultiIndex) -> Atom {
        Atom::Jet {
            dep: self.dependent.clone(),
            index,
        }
    }

    /// The atom a declared non-jet name refers to.
    pub fn symbol_atom(&self, name: &str) -> Result<Atom> {
        match self.lookup(name) {
            Some(Symbol::Coordinate(i)) => Ok(Atom::Coord(self.coords[i].clone())),
            Some(Symbol::Dependent) => Ok(self.jet_atom(MultiIndex::empty())),
            Some(Symbol::Constant) => Ok(Atom::Const(name.into())),
            Some(Symbol::Matrix) => Ok(Atom::ConstMatrix {
                name: name.into(),
                invertible: self.matrices[name],
            }),
            Some(Symbol::Function) => {
                let (kind, args) = &self.functions[name];
                Ok(Atom::Base {
                    name: name.into(),
                    kind: *kind,
                    args: args.clone(),
                    partials: MultiIndex::empty(),
                })
            }
            Some(Symbol::Potential) => Ok(self.potentials[name].atom.clone()),
            None => Err(Error::UndeclaredSymbol(name.to_string())),
        }
    }

    pub fn symbol(&self, name: &str) -> Result<Expr> {
        self.symbol_atom(name).map(Expr::Atom)
    }

    /// Parses an expression in this problem's declaration context.
    pub fn parse(&self, text: &str) -> Result<Expr> {
        crate::parse::parse_expr(self, text)
    }

    /// Parses and normalizes.
    pub fn parse_nf(&self, text: &str) -> Result<NormalForm> {
        NormalForm::from_expr(&self.parse(text)?)
    }

    /// Checks that every atom of `nf` belongs to this problem.
    pub fn check_declared(&self, nf: &NormalForm) -> Result<()> {
        for a in nf.atoms() {
            let ok = match a {
                Atom::Const(n) => self.constants.contains_key(n),
                Atom::Coord(c) => self.coords.get(c.index) == Some(c),
                Atom::Jet { dep, index } => {
                    dep == &self.dependent && index.iter().all(|i| i < self.coords.len())
                }
                Atom::Base {
                    name, kind, args, ..
                } => self.functions.get(name) == Some(&(*kind, args.clone())),
                Atom::ConstMatrix { name, invertible } => {
                    self.matrices.get(name) == Some(invertible)
                }
                Atom::Potential { name, .. } => self.potentials.contains_key(name),
            };
            if !ok {
                return Err(Error::UndeclaredSymbol(format!("{a:?}")));
            }
        }
        Ok(())
    }

    pub(crate) fn insert_potential(
        &mut self,
        name: &str,
        gradient: Vec<NormalForm>,
    ) -> Result<Expr> {
        self.check_fresh(name)?;
        let atom = Atom::Potential {
            name: name.into(),
            kind: self.dependent.kind,
        };
        self.potentials.insert(
            name.into(),
            RegisteredPotential {
                atom: atom.clone(),
                gradient,
                char_images: BTreeMap::new(),
            },
        );
        Ok(Expr::Atom(atom))
    }

    pub(crate) fn potential_mut(&mut self, name: &str) -> Result<&mut RegisteredPotential> {
        self.potentials
            .get_mut(name)
            .ok_or_else(|| Error::UnregisteredPotential(name.to_string()))
    }

    /// Clone of this problem with an extra base function; used for the
    /// operator placeholder `F`.
    pub(crate) fn with_placeholder(&self, name: &str) -> Result<Problem> {
        let all: Vec<&str> = self.coords.iter().map(|c| &*c.name).collect();
        self.clone().with_function(name, self.dependent.kind, &all)
    }

    pub fn render(&self, nf: &NormalForm) -> String {
        crate::print::render(self, nf)
    }

    pub fn render_expr(&self, e: &Expr) -> String {
        match NormalForm::from_expr(e) {
            Ok(nf) => self.render(&nf),
            Err(err) => format!("<{err}>"),
        }
    }
}
