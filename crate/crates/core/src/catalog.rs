//! Built-in equations with their solved forms, known symmetries and
//! fixtures, loaded from `data/catalog.toml`.
//!
//! Every entry validates itself on load: each listed characteristic must be
//! a symmetry with its stated certificate, each non-symmetry must fail, and
//! the structure constant and Bäcklund fixtures must reproduce.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;

use crate::backlund::{bt_apply, declare_potential, default_bt_basis, PotentialDef};
use crate::calculus::Characteristic;
use crate::error::{Error, Result};
use crate::expr::{Dependent, Kind};
use crate::normalize::NormalForm;
use crate::problem::Problem;
use crate::symmetry::{
    certify_operator, check_symmetry, structure_constants, LinearOperatorAnsatz, Pde,
    StructureConstants, Verdict,
};

const CATALOG: &str = include_str!("../data/catalog.toml");
const VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    version: u32,
    pde: Vec<PdeRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PdeRecord {
    name: String,
    title: String,
    coordinates: Vec<String>,
    dependent: DependentRecord,
    #[serde(default)]
    constants: Vec<String>,
    #[serde(default)]
    matrices: Vec<MatrixRecord>,
    f: Option<String>,
    leading: String,
    rhs: String,
    #[serde(default)]
    characteristics: Vec<CharRecord>,
    #[serde(default)]
    non_symmetries: Vec<String>,
    #[serde(default)]
    potentials: Vec<PotentialRecord>,
    structure: Option<StructureRecord>,
    #[serde(default)]
    bt: Vec<BtRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DependentRecord {
    name: String,
    kind: String,
    #[serde(default)]
    invertible: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixRecord {
    name: String,
    #[serde(default)]
    invertible: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CharRecord {
    name: String,
    q: String,
    certificate: Option<String>,
    transformation: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialRecord {
    name: String,
    derivatives: BTreeMap<String, String>,
    #[serde(default)]
    char_images: Vec<(String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureRecord {
    basis: Vec<String>,
    nonzero: Vec<(usize, usize, usize, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BtRecord {
    phi: String,
    result: Option<String>,
}

/// A known symmetry with the operator exhibiting it.
#[derive(Clone, Debug)]
pub struct CatalogCharacteristic {
    pub characteristic: Characteristic,
    pub certificate: Option<LinearOperatorAnsatz>,
    /// The one-parameter group generated, for documentation only.
    pub transformation: String,
}

/// A seed for the Bäcklund map and the expected image; `None` means the
/// default basis is insufficient.
#[derive(Clone, Debug)]
pub struct BtFixture {
    pub phi: NormalForm,
    pub result: Option<NormalForm>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub title: String,
    /// The equation, with any potentials already declared.
    pub pde: Pde,
    pub characteristics: Vec<CatalogCharacteristic>,
    pub non_symmetries: Vec<Characteristic>,
    pub potentials: Vec<PotentialDef>,
    pub structure: Option<StructureConstants>,
    pub bt: Vec<BtFixture>,
}

impl CatalogEntry {
    pub fn characteristic(&self, name: &str) -> Option<&Characteristic> {
        self.characteristics
            .iter()
            .map(|c| &c.characteristic)
            .find(|c| c.name() == name)
    }
}

fn parse_file() -> Result<CatalogFile> {
    let file: CatalogFile = toml::from_str(CATALOG).map_err(|e| Error::Catalog(e.to_string()))?;
    if file.version != VERSION {
        return Err(Error::Catalog(format!(
            "unsupported catalog version {}",
            file.version
        )));
    }
    Ok(file)
}

/// Names of the built-in equations, in catalog order.
pub fn names() -> Vec<String> {
    parse_file()
        .map(|f| f.pde.into_iter().map(|p| p.name).collect())
        .unwrap_or_default()
}

/// Loads and validates a catalog entry.
pub fn get_pde(name: &str) -> Result<CatalogEntry> {
    let file = parse_file()?;
    let rec = file
        .pde
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPde(name.to_string()))?;
    let entry = build(rec)?;
    validate(&entry)?;
    Ok(entry)
}

fn kind(s: &str) -> Result<Kind> {
    match s {
        "scalar" => Ok(Kind::Scalar),
        "matrix" => Ok(Kind::Matrix),
        other => Err(Error::Catalog(format!("unknown kind `{other}`"))),
    }
}

fn build(rec: PdeRecord) -> Result<CatalogEntry> {
    let coords: Vec<&str> = rec.coordinates.iter().map(String::as_str).collect();
    let dep = Dependent::new(
        &rec.dependent.name,
        kind(&rec.dependent.kind)?,
        rec.dependent.invertible,
    );
    let mut problem = Problem::new(&coords, dep)?;
    for c in &rec.constants {
        problem = problem.with_constant(c)?;
    }
    for m in &rec.matrices {
        problem = problem.with_matrix(&m.name, m.invertible)?;
    }
    let mut pde = Pde::from_text(&rec.name, problem, rec.f.as_deref(), &rec.leading, &rec.rhs)?;

    let mut potentials = Vec::new();
    for p in rec.potentials {
        let def = PotentialDef {
            name: p.name,
            derivatives: p.derivatives.into_iter().collect(),
            char_images: p.char_images,
        };
        declare_potential(&mut pde, &def)?;
        potentials.push(def);
    }

    let problem = pde.problem().clone();
    let characteristics = rec
        .characteristics
        .into_iter()
        .map(|c| {
            Ok(CatalogCharacteristic {
                characteristic: Characteristic::parse(&problem, &c.name, &c.q)?,
                certificate: c
                    .certificate
                    .map(|t| LinearOperatorAnsatz::parse(&problem, &t))
                    .transpose()?,
                transformation: c.transformation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let non_symmetries = rec
        .non_symmetries
        .iter()
        .map(|q| Characteristic::parse(&problem, q, q))
        .collect::<Result<Vec<_>>>()?;

    let structure = rec
        .structure
        .map(|s| {
            let basis = s
                .basis
                .iter()
                .map(|n| {
                    characteristics
                        .iter()
                        .find(|c| c.characteristic.name() == n)
                        .map(|c| c.characteristic.clone())
                        .ok_or_else(|| Error::Catalog(format!("unknown basis element `{n}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let n = basis.len();
            let mut c = vec![vec![vec![BigRational::zero(); n]; n]; n];
            for (i, j, k, v) in s.nonzero {
                if !(1 <= i && i < j && j <= n && 1 <= k && k <= n) {
                    return Err(Error::Catalog(format!(
                        "bad structure index ({i}, {j}, {k})"
                    )));
                }
                let v: BigRational = v
                    .parse()
                    .map_err(|_| Error::Catalog(format!("bad rational `{v}`")))?;
                c[j - 1][i - 1][k - 1] = -v.clone();
                c[i - 1][j - 1][k - 1] = v;
            }
            Ok(StructureConstants { basis, c })
        })
        .transpose()?;

    let bt = rec
        .bt
        .iter()
        .map(|b| {
            Ok(BtFixture {
                phi: problem.parse_nf(&b.phi)?,
                result: b
                    .result
                    .as_deref()
                    .map(|r| problem.parse_nf(r))
                    .transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CatalogEntry {
        name: rec.name,
        title: rec.title,
        pde,
        characteristics,
        non_symmetries,
        potentials,
        structure,
        bt,
    })
}

fn validate(entry: &CatalogEntry) -> Result<()> {
    let pde = &entry.pde;
    let problem = pde.problem();
    let fail = |what: String| Error::Catalog(format!("{}: {what}", entry.name));
    for c in &entry.characteristics {
        let q = &c.characteristic;
        if check_symmetry(pde, q)?.verdict != Verdict::Symmetry {
            return Err(fail(format!("{} is not a symmetry", q.name())));
        }
        if let Some(op) = &c.certificate {
            if !certify_operator(pde, q, op)? {
                return Err(fail(format!(
                    "certificate {} does not hold for {}",
                    op.render(problem),
                    q.name()
                )));
            }
        }
    }
    for q in &entry.non_symmetries {
        if check_symmetry(pde, q)?.verdict != Verdict::NotSymmetry {
            return Err(fail(format!("{} is unexpectedly a symmetry", q.name())));
        }
    }
    if let Some(expected) = &entry.structure {
        let got = structure_constants(pde, &expected.basis)?;
        if got.c != expected.c {
            return Err(fail("structure constants differ".into()));
        }
    }
    if !entry.bt.is_empty() {
        let basis = default_bt_basis(pde, 2)?;
        for f in &entry.bt {
            if bt_apply(pde, &f.phi, &basis)? != f.result {
                return Err(fail(format!(
                    "Bäcklund fixture for seed {} does not reproduce",
                    problem.render(&f.phi)
                )));
            }
        }
    }
    Ok(())
}
