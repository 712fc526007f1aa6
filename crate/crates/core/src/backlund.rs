//! Nonlocal potentials and the auto-Bäcklund map on chiral-type symmetries.
//!
//! For an invertible matrix field `g(x, t)` a symmetry `δg = gΦ` is mapped
//! to `δg = gΦ'` by integrating
//!
//! ```text
//! Φ'_x = Φ_t + [g⁻¹g_t, Φ]
//! Φ'_t = -(Φ_x + [g⁻¹g_x, Φ])
//! ```
//!
//! within a finite candidate basis.

use crate::calculus::{char_derivative, total_derivative, Characteristic};
use crate::error::{Error, Result};
use crate::expr::{Expr, Kind, MultiIndex};
use crate::linsolve::{combine, solve_combination};
use crate::normalize::NormalForm;
use crate::symmetry::{reduce_mod_pde, Pde};

/// A potential given by its gradient, with optional registered images under
/// characteristic derivatives. All entries are expression texts in the
/// equation's declaration context, which may mention the potential itself.
#[derive(Clone, Debug, Default)]
pub struct PotentialDef {
    pub name: String,
    /// `(coordinate, derivative)` pairs; every coordinate exactly once.
    pub derivatives: Vec<(String, String)>,
    /// `(characteristic, image)` pairs.
    pub char_images: Vec<(String, String)>,
}

impl PotentialDef {
    pub fn new(name: &str) -> Self {
        PotentialDef {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn derivative(mut self, coordinate: &str, expr: &str) -> Self {
        self.derivatives
            .push((coordinate.to_string(), expr.to_string()));
        self
    }

    pub fn char_image(mut self, characteristic: &str, image: &str) -> Self {
        self.char_images
            .push((characteristic.to_string(), image.to_string()));
        self
    }
}

/// Registers a potential on `pde` after checking that its gradient is
/// closed modulo the equation. On failure `pde` is left unchanged.
pub fn declare_potential(pde: &mut Pde, def: &PotentialDef) -> Result<Expr> {
    let mut next = pde.clone();
    let n = next.problem().ncoords();
    next.problem_mut()
        .insert_potential(&def.name, vec![NormalForm::zero(); n])?;
    let mut gradient: Vec<Option<NormalForm>> = vec![None; n];
    for (coord, text) in &def.derivatives {
        let i = next.problem().coordinate(coord)?;
        if gradient[i].is_some() {
            return Err(Error::DuplicateName(format!("{}_{coord}", def.name)));
        }
        let d = next.problem().parse_nf(text)?;
        if next.problem().kind() == Kind::Scalar && !d.is_scalar() {
            return Err(Error::Kind(format!(
                "derivative of scalar potential `{}` is matrix-valued",
                def.name
            )));
        }
        gradient[i] = Some(d);
    }
    let gradient: Vec<NormalForm> = gradient
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            d.ok_or_else(|| {
                Error::InvalidSolvedForm(format!(
                    "potential `{}` has no derivative along `{}`",
                    def.name,
                    pde.problem().coordinate_name(i)
                ))
            })
        })
        .collect::<Result<_>>()?;
    next.problem_mut().potential_mut(&def.name)?.gradient = gradient.clone();

    for i in 0..n {
        for j in i + 1..n {
            let a = total_derivative(next.problem(), &gradient[i], j)?;
            let b = total_derivative(next.problem(), &gradient[j], i)?;
            let residual = reduce_mod_pde(&next, &(&a - &b))?;
            if !residual.is_zero() {
                return Err(Error::IncompatiblePotential {
                    name: def.name.clone(),
                    residual: next.problem().render(&residual),
                });
            }
        }
    }
    for (q, image) in &def.char_images {
        let q = Characteristic::parse(next.problem(), q, q)?;
        let image = next.problem().parse_nf(image)?;
        register_char_image(&mut next, &def.name, &q, image)?;
    }
    let atom = next.problem().symbol(&def.name)?;
    *pde = next;
    Ok(atom)
}

/// Registers `Δ_Q X = image` for the potential `X`, after checking
/// `D_i(image) ≡ Δ_Q(X_i)` modulo the equation for every coordinate.
pub fn register_char_image(
    pde: &mut Pde,
    potential: &str,
    q: &Characteristic,
    image: NormalForm,
) -> Result<()> {
    let mut next = pde.clone();
    next.problem().check_declared(&image)?;
    next.problem().check_declared(q.q())?;
    next.problem_mut()
        .potential_mut(potential)?
        .char_images
        .insert(q.q().clone(), image.clone());
    let gradient = next.problem().potential(potential)?.gradient.clone();
    for (i, xi) in gradient.iter().enumerate() {
        let lhs = total_derivative(next.problem(), &image, i)?;
        let rhs = char_derivative(next.problem(), xi, q)?;
        let residual = reduce_mod_pde(&next, &(&lhs - &rhs))?;
        if !residual.is_zero() {
            return Err(Error::InconsistentImage {
                name: potential.to_string(),
                residual: next.problem().render(&residual),
            });
        }
    }
    *pde = next;
    Ok(())
}

/// `(g⁻¹g_x, g⁻¹g_t)`, with `x` and `t` the first and second coordinates.
fn connection(pde: &Pde) -> Result<(NormalForm, NormalForm)> {
    let p = pde.problem();
    let dep = p.dependent();
    if dep.kind != Kind::Matrix || !dep.invertible || p.ncoords() != 2 {
        return Err(Error::Kind(
            "the Bäcklund map needs an invertible matrix dependent of two coordinates".into(),
        ));
    }
    let g = NormalForm::atom(p.jet_atom(MultiIndex::empty()));
    let ginv = g.inverse()?;
    let ax = ginv.mul(&NormalForm::atom(p.jet_atom(MultiIndex::single(0))));
    let at = ginv.mul(&NormalForm::atom(p.jet_atom(MultiIndex::single(1))));
    Ok((ax, at))
}

/// The seed `Φ` and the right-hand sides prescribed for `Φ'_x` and `Φ'_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BtPair {
    pub phi: NormalForm,
    pub rhs_x: NormalForm,
    pub rhs_t: NormalForm,
}

pub fn bt_rhs(pde: &Pde, phi: &NormalForm) -> Result<BtPair> {
    let (ax, at) = connection(pde)?;
    let p = pde.problem();
    let rhs_x = &total_derivative(p, phi, 1)? + &at.commutator(phi);
    let rhs_t = -&(&total_derivative(p, phi, 0)? + &ax.commutator(phi));
    Ok(BtPair {
        phi: phi.clone(),
        rhs_x,
        rhs_t,
    })
}

/// `D_x(Φ_x + [g⁻¹g_x, Φ]) + D_t(Φ_t + [g⁻¹g_t, Φ])`, normalized but not
/// reduced. It vanishes modulo the equation exactly when `gΦ` is a symmetry.
pub fn chiral_phi_condition(pde: &Pde, phi: &NormalForm) -> Result<NormalForm> {
    let (ax, at) = connection(pde)?;
    let p = pde.problem();
    let jx = &total_derivative(p, phi, 0)? + &ax.commutator(phi);
    let jt = &total_derivative(p, phi, 1)? + &at.commutator(phi);
    Ok(&total_derivative(p, &jx, 0)? + &total_derivative(p, &jt, 1)?)
}

/// Whether the cross-derivatives of the prescribed `Φ'_x`, `Φ'_t` agree
/// modulo the equation.
pub fn bt_integrability_check(pde: &Pde, phi: &NormalForm) -> Result<bool> {
    let pair = bt_rhs(pde, phi)?;
    let p = pde.problem();
    let d = &total_derivative(p, &pair.rhs_x, 1)? - &total_derivative(p, &pair.rhs_t, 0)?;
    Ok(reduce_mod_pde(pde, &d)?.is_zero())
}

/// Candidate basis: every product of at most `max_len` letters from
/// `{g⁻¹g_x, g⁻¹g_t}`, the registered potentials and the declared constant
/// matrices, followed by the commutators of distinct letters.
pub fn default_bt_basis(pde: &Pde, max_len: usize) -> Result<Vec<NormalForm>> {
    let (ax, at) = connection(pde)?;
    let p = pde.problem();
    let mut alphabet = vec![ax, at];
    for (name, _) in p.potentials() {
        alphabet.push(p.parse_nf(name)?);
    }
    for name in p.matrices() {
        alphabet.push(p.parse_nf(name)?);
    }
    let mut out = Vec::new();
    let mut layer = vec![NormalForm::one()];
    for _ in 0..max_len {
        let next: Vec<NormalForm> = layer
            .iter()
            .flat_map(|w| alphabet.iter().map(move |a| w.mul(a)))
            .collect();
        out.extend(next.iter().cloned());
        layer = next;
    }
    for (i, a) in alphabet.iter().enumerate() {
        for b in &alphabet[i + 1..] {
            out.push(a.commutator(b));
        }
    }
    Ok(out)
}

/// Integrates the Bäcklund system within `basis`. Returns `Ok(None)` when no
/// rational combination of the basis satisfies both equations; constants of
/// integration are fixed to zero.
pub fn bt_apply(pde: &Pde, phi: &NormalForm, basis: &[NormalForm]) -> Result<Option<NormalForm>> {
    if !bt_integrability_check(pde, phi)? {
        return Err(Error::NotIntegrable(pde.problem().render(phi)));
    }
    let pair = bt_rhs(pde, phi)?;
    let p = pde.problem();
    let columns = basis
        .iter()
        .map(|b| {
            Ok(vec![
                reduce_mod_pde(pde, &total_derivative(p, b, 0)?)?,
                reduce_mod_pde(pde, &total_derivative(p, b, 1)?)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let targets = [
        reduce_mod_pde(pde, &pair.rhs_x)?,
        reduce_mod_pde(pde, &pair.rhs_t)?,
    ];
    Ok(solve_combination(&columns, &targets).map(|x| combine(basis, &x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Dependent;
    use crate::problem::Problem;

    const RHS: &str = "g_t*inv(g)*g_t + g_x*inv(g)*g_x - g_xx";
    const F: &str = "D(inv(g)*g_x, x) + D(inv(g)*g_t, t)";

    fn chiral() -> Pde {
        let p = Problem::new(&["x", "t"], Dependent::new("g", Kind::Matrix, true))
            .unwrap()
            .with_matrix("M", false)
            .unwrap();
        Pde::from_text("chiral", p, Some(F), "g_tt", RHS).unwrap()
    }

    fn with_x() -> Pde {
        let mut pde = chiral();
        declare_potential(
            &mut pde,
            &PotentialDef::new("X")
                .derivative("x", "inv(g)*g_t")
                .derivative("t", "-inv(g)*g_x"),
        )
        .unwrap();
        pde
    }

    fn nf(pde: &Pde, s: &str) -> NormalForm {
        pde.problem().parse_nf(s).unwrap()
    }

    #[test]
    fn flat_connection_identity() {
        let pde = chiral();
        let e = nf(
            &pde,
            "D(inv(g)*g_t, x) - D(inv(g)*g_x, t) + comm(inv(g)*g_x, inv(g)*g_t)",
        );
        assert!(e.is_zero());
    }

    #[test]
    fn potential_compatibility() {
        let pde = with_x();
        let p = pde.problem();
        let x = nf(&pde, "X");
        let xt = total_derivative(p, &total_derivative(p, &x, 0).unwrap(), 1).unwrap();
        let tx = total_derivative(p, &total_derivative(p, &x, 1).unwrap(), 0).unwrap();
        assert!(reduce_mod_pde(&pde, &(&xt - &tx)).unwrap().is_zero());

        let mut bad = chiral();
        let err = declare_potential(
            &mut bad,
            &PotentialDef::new("X")
                .derivative("x", "inv(g)*g_t")
                .derivative("t", "inv(g)*g_x"),
        )
        .unwrap_err();
        assert!(matches!(err, Error::IncompatiblePotential { .. }));
        assert!(bad.problem().lookup("X").is_none());

        let mut flat = chiral();
        declare_potential(
            &mut flat,
            &PotentialDef::new("Y")
                .derivative("x", "0")
                .derivative("t", "0"),
        )
        .unwrap();
        let y = nf(&flat, "Y");
        assert!(total_derivative(flat.problem(), &y, 0).unwrap().is_zero());
    }

    #[test]
    fn sign_flipped_residual() {
        let mut bad = chiral();
        let err = declare_potential(
            &mut bad,
            &PotentialDef::new("X")
                .derivative("x", "inv(g)*g_t")
                .derivative("t", "inv(g)*g_x"),
        )
        .unwrap_err();
        let pde = chiral();
        let expected = reduce_mod_pde(&pde, &nf(&pde, "-2*D(inv(g)*g_x, x)")).unwrap();
        assert_eq!(
            err,
            Error::IncompatiblePotential {
                name: "X".into(),
                residual: pde.problem().render(&expected)
            }
        );
    }

    #[test]
    fn char_images_are_checked() {
        let mut pde = with_x();
        let q = Characteristic::parse(pde.problem(), "Q", "g*M").unwrap();
        let wrong = nf(&pde, "M*X");
        assert!(matches!(
            register_char_image(&mut pde, "X", &q, wrong),
            Err(Error::InconsistentImage { .. })
        ));
        let right = nf(&pde, "comm(X, M)");
        register_char_image(&mut pde, "X", &q, right.clone()).unwrap();
        let got = char_derivative(pde.problem(), &nf(&pde, "X*X"), &q).unwrap();
        assert_eq!(got, &right.mul(&nf(&pde, "X")) + &nf(&pde, "X").mul(&right));
    }

    #[test]
    fn phi_condition_matches_characteristic_derivative() {
        let pde = chiral();
        let solved = nf(&pde, &format!("g_tt - ({RHS})"));
        for phi in [
            "M",
            "inv(g)*g_x",
            "x*inv(g)*g_x + t*inv(g)*g_t",
            "g",
            "g_x*M",
        ] {
            let phi = nf(&pde, phi);
            let s = chiral_phi_condition(&pde, &phi).unwrap();
            let q = Characteristic::from_normal_form(pde.problem(), "Q", nf(&pde, "g").mul(&phi))
                .unwrap();
            assert_eq!(s, char_derivative(pde.problem(), pde.f(), &q).unwrap());
            let via_solved =
                nf(&pde, "inv(g)").mul(&char_derivative(pde.problem(), &solved, &q).unwrap());
            assert!(reduce_mod_pde(&pde, &(&s - &via_solved)).unwrap().is_zero());
        }
    }

    #[test]
    fn bt_fixtures() {
        let pde = with_x();
        let basis = default_bt_basis(&pde, 2).unwrap();
        let m = nf(&pde, "M");
        assert_eq!(
            bt_rhs(&pde, &m).unwrap().rhs_x,
            nf(&pde, "comm(inv(g)*g_t, M)")
        );
        assert!(bt_integrability_check(&pde, &m).unwrap());
        let out = bt_apply(&pde, &m, &basis).unwrap().unwrap();
        assert_eq!(out, nf(&pde, "comm(X, M)"));

        let ax = nf(&pde, "inv(g)*g_x");
        let out = bt_apply(&pde, &ax, &basis).unwrap().unwrap();
        assert_eq!(out, nf(&pde, "inv(g)*g_t"));

        let zero = NormalForm::zero();
        assert_eq!(bt_apply(&pde, &zero, &basis).unwrap(), Some(zero));

        let g = nf(&pde, "g");
        assert!(!bt_integrability_check(&pde, &g).unwrap());
        assert!(matches!(
            bt_apply(&pde, &g, &basis),
            Err(Error::NotIntegrable(_))
        ));
    }

    #[test]
    fn tower_needs_a_larger_basis() {
        let pde = with_x();
        let basis = default_bt_basis(&pde, 2).unwrap();
        let seed = nf(&pde, "comm(X, M)");
        assert!(
            reduce_mod_pde(&pde, &chiral_phi_condition(&pde, &seed).unwrap())
                .unwrap()
                .is_zero()
        );
        assert!(bt_integrability_check(&pde, &seed).unwrap());
        assert_eq!(bt_apply(&pde, &seed, &basis).unwrap(), None);
    }
}
