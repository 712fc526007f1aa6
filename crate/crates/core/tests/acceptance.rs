//! Acceptance run: one line per criterion, nonzero exit if any fails.

mod common;

use std::error::Error as StdError;
use std::process::ExitCode;
use std::time::Instant;

use common::{expr, laws, matrix_problem, scalar_problem, small_expr};
use jetsym::{
    bt_apply, bt_integrability_check, certify_operator, char_derivative, check_symmetry,
    chiral_phi_condition, declare_potential, default_bt_basis, find_operator, get_pde,
    reduce_mod_pde, structure_constants, total_derivative, AnsatzConfig, Characteristic, Dependent,
    Error, Kind, LinearOperatorAnsatz, NormalForm, Pde, PotentialDef, Problem, Verdict,
};
use num_rational::BigRational;
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

type Outcome = Result<String, Box<dyn StdError>>;
type Criterion = fn() -> Outcome;

const CASES: u32 = 256;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+).into());
        }
    };
}

fn nf(p: &Problem, s: &str) -> Result<NormalForm, Box<dyn StdError>> {
    Ok(p.parse_nf(s)?)
}

fn chiral_bare() -> Result<Pde, Box<dyn StdError>> {
    let p = Problem::new(&["x", "t"], Dependent::new("g", Kind::Matrix, true))?
        .with_matrix("M", false)?;
    Ok(Pde::from_text(
        "chiral",
        p,
        Some("D(inv(g)*g_x, x) + D(inv(g)*g_t, t)"),
        "g_tt",
        "g_t*inv(g)*g_t + g_x*inv(g)*g_x - g_xx",
    )?)
}

fn criterion_1() -> Outcome {
    for kind in [Kind::Scalar, Kind::Matrix] {
        let p = Problem::new(&["x", "t"], Dependent::new("u", kind, true))?;
        let e = nf(&p, "x*t*u_x*u_x")?;
        let got = total_derivative(&p, &e, 1)?;
        let want = nf(&p, "x*u_x*u_x + x*t*(u_xt*u_x + u_x*u_xt)")?;
        ensure!(got == want, "D_t gave {}", p.render(&got));
    }

    let p = Problem::new(&["x", "t"], Dependent::new("u", Kind::Matrix, true))?
        .with_function("a", Kind::Matrix, &["x", "t"])?
        .with_function("b", Kind::Matrix, &["x", "t"])?;
    let e = nf(&p, "a*u*u*b + comm(u_x, u_t)")?;
    let (u, ux, ut, a, b) = (
        nf(&p, "u")?,
        nf(&p, "u_x")?,
        nf(&p, "u_t")?,
        nf(&p, "a")?,
        nf(&p, "b")?,
    );
    let qs = [
        "u_x*u + x*u_t",
        "inv(u)*u_xx",
        "a*u_t*b + t",
        "sin(x)*u*u_x*u",
    ];
    for text in qs {
        let q = Characteristic::parse(&p, "Q", text)?;
        let qn = q.q();
        let got = char_derivative(&p, &e, &q)?;
        let dxq = total_derivative(&p, qn, 0)?;
        let dtq = total_derivative(&p, qn, 1)?;
        let want = &(&a.mul(&(&qn.mul(&u) + &u.mul(qn))).mul(&b) + &dxq.commutator(&ut))
            + &ux.commutator(&dtq);
        ensure!(got == want, "Q = {text}: got {}", p.render(&got));
    }
    Ok(format!(
        "D_t example on both kinds, Δ_Q example for {} characteristics",
        qs.len()
    ))
}

fn reduction_is_sound(pde: &Pde) -> Result<(), Box<dyn StdError>> {
    let p = pde.problem();
    ensure!(
        reduce_mod_pde(pde, pde.f())?.is_zero(),
        "{}: F does not reduce to 0",
        pde.name()
    );
    for i in 0..p.ncoords() {
        let d = total_derivative(p, pde.f(), i)?;
        ensure!(
            reduce_mod_pde(pde, &d)?.is_zero(),
            "{}: D_{} F does not reduce to 0",
            pde.name(),
            p.coordinate_name(i)
        );
    }
    Ok(())
}

/// Checks the verdict, the given certificate and the searched one.
fn certified(pde: &Pde, q: &str, certificate: &str) -> Result<(), Box<dyn StdError>> {
    let p = pde.problem();
    let q = Characteristic::parse(p, q, q)?;
    let report = check_symmetry(pde, &q)?;
    ensure!(
        report.verdict == Verdict::Symmetry,
        "{}: {} left {}",
        pde.name(),
        q.name(),
        p.render(&report.remainder)
    );
    let given = LinearOperatorAnsatz::parse(p, certificate)?;
    ensure!(
        certify_operator(pde, &q, &given)?,
        "{}: {certificate} does not certify {}",
        pde.name(),
        q.name()
    );
    let found = find_operator(pde, &q, &AnsatzConfig::default())?
        .ok_or_else(|| format!("{}: no operator found for {}", pde.name(), q.name()))?;
    ensure!(
        found.to_normal_form(p) == given.to_normal_form(p),
        "{}: found {} for {}, expected {certificate}",
        pde.name(),
        found.render(p),
        q.name()
    );
    ensure!(
        certify_operator(pde, &q, &found)?,
        "{}: found operator fails",
        pde.name()
    );
    Ok(())
}

fn criterion_2() -> Outcome {
    let table: &[(&str, &[(&str, &str)])] = &[
        ("sine-gordon", &[("u_x", "F_x")]),
        ("heat", &[("u_x", "F_x"), ("u_t", "F_t"), ("u", "F")]),
        ("burgers", &[("u_x", "F_x"), ("u_t", "F_t"), ("1", "0")]),
        (
            "kdv",
            &[
                ("u_x", "F_x"),
                ("u_t", "F_t"),
                ("t*u_x - 1", "t*F_x"),
                ("x*u_x + 3*t*u_t + 2*u", "5*F + x*F_x + 3*t*F_t"),
            ],
        ),
        (
            "chiral",
            &[
                ("g*(inv(g)*g_x)", "F_x"),
                ("g*(inv(g)*g_t)", "F_t"),
                ("g*(x*inv(g)*g_x + t*inv(g)*g_t)", "2*F + x*F_x + t*F_t"),
                ("g*M", "F*M - M*F"),
            ],
        ),
    ];
    let mut n = 0;
    for (name, cases) in table {
        let pde = get_pde(name)?.pde;
        reduction_is_sound(&pde)?;
        for (q, cert) in *cases {
            certified(&pde, q, cert)?;
            n += 1;
        }
    }
    let burgers = get_pde("burgers")?.pde;
    let one = Characteristic::parse(burgers.problem(), "1", "1")?;
    ensure!(
        check_symmetry(&burgers, &one)?.raw.is_zero(),
        "burgers: Q = 1 has nonzero raw image"
    );
    let found = find_operator(&burgers, &one, &AnsatzConfig::default())?;
    ensure!(
        found.as_ref().is_some_and(LinearOperatorAnsatz::is_zero),
        "burgers: Q = 1 should give the zero operator"
    );
    Ok(format!("{n} characteristics certified given and searched"))
}

fn criterion_3() -> Outcome {
    let pde = get_pde("wave")?.pde;
    reduction_is_sound(&pde)?;
    certified(&pde, "x*u_x + t*u_t", "2*F + x*F_x + t*F_t")?;
    Ok("x*u_x + t*u_t certified by 2*F + x*F_x + t*F_t".into())
}

fn constants_match(
    pde: &Pde,
    basis: &[&str],
    expected: &[((usize, usize), [i64; 4])],
) -> Result<(), Box<dyn StdError>> {
    let p = pde.problem();
    let basis = basis
        .iter()
        .enumerate()
        .map(|(i, q)| Characteristic::parse(p, &format!("q{}", i + 1), q))
        .collect::<Result<Vec<_>, _>>()?;
    let sc = structure_constants(pde, &basis)?;
    ensure!(
        sc.is_antisymmetric(),
        "{}: table is not antisymmetric",
        pde.name()
    );
    for &((i, j), want) in expected {
        for k in 1..=basis.len() {
            let got = sc.get(i - 1, j - 1, k - 1);
            let want = BigRational::from_integer(want[k - 1].into());
            ensure!(
                *got == want,
                "{}: c({i},{j};{k}) = {got}, expected {want}",
                pde.name()
            );
        }
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    constants_match(
        &get_pde("kdv")?.pde,
        &["u_x", "u_t", "t*u_x - 1", "x*u_x + 3*t*u_t + 2*u"],
        &[((1, 2), [0, 0, 0, 0]), ((2, 3), [-1, 0, 0, 0])],
    )?;
    constants_match(
        &get_pde("chiral")?.pde,
        &["g_x", "g_t", "x*g_x + t*g_t"],
        &[
            ((1, 2), [0, 0, 0, 0]),
            ((1, 3), [-1, 0, 0, 0]),
            ((2, 3), [0, -1, 0, 0]),
        ],
    )?;
    Ok("kdv and chiral tables match".into())
}

fn criterion_5() -> Outcome {
    let mut pde = chiral_bare()?;
    let identity = nf(
        pde.problem(),
        "D(inv(g)*g_t, x) - D(inv(g)*g_x, t) + comm(inv(g)*g_x, inv(g)*g_t)",
    )?;
    ensure!(
        identity.is_zero(),
        "flat connection identity leaves {}",
        pde.problem().render(&identity)
    );

    declare_potential(
        &mut pde,
        &PotentialDef::new("X")
            .derivative("x", "inv(g)*g_t")
            .derivative("t", "-inv(g)*g_x"),
    )?;

    let basis = default_bt_basis(&pde, 2)?;
    for (seed, image) in [("M", "comm(X, M)"), ("inv(g)*g_x", "inv(g)*g_t")] {
        let p = pde.problem();
        let phi = nf(p, seed)?;
        ensure!(
            bt_integrability_check(&pde, &phi)?,
            "seed {seed} is not integrable"
        );
        let got = bt_apply(&pde, &phi, &basis)?
            .ok_or_else(|| format!("seed {seed}: no image in the default basis"))?;
        ensure!(got == nf(p, image)?, "seed {seed} gave {}", p.render(&got));
        let s = reduce_mod_pde(&pde, &chiral_phi_condition(&pde, &got)?)?;
        ensure!(
            s.is_zero(),
            "image {image} fails the symmetry condition: {}",
            p.render(&s)
        );
    }
    Ok("identity, potential X, and both Bäcklund fixtures hold".into())
}

fn runner() -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(
    label: &str,
    strategy: S,
    law: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), Box<dyn StdError>> {
    runner()
        .run(&strategy, law)
        .map_err(|e| format!("{label}: {e}").into())
}

fn criterion_6() -> Outcome {
    let mut suites = 0;
    for (label, p, matrix) in [
        ("scalar", scalar_problem(), false),
        ("matrix", matrix_problem(), true),
    ] {
        let e = || expr(&p, matrix);
        let q = || small_expr(&p, matrix);
        let p = &p;
        run(label, e(), |a| laws::depth_is_bounded(&a))?;
        run(label, e(), |a| laws::total_derivatives_commute(p, &a))?;
        run(label, (e(), q(), 0usize..2), |(a, q, i)| {
            laws::characteristic_derivative_commutes_with_totals(p, &a, &q, i)
        })?;
        run(label, (e(), e(), q(), 0usize..2), |(a, b, q, i)| {
            laws::leibniz(p, &a, &b, &q, i)
        })?;
        run(label, (e(), e(), q(), 0usize..2), |(a, b, q, i)| {
            laws::commutator_rule(p, &a, &b, &q, i)
        })?;
        run(
            label,
            (e(), e(), q(), q(), -4i64..=4),
            |(a, b, q1, q2, n)| laws::linearity(p, &a, &b, &q1, &q2, n),
        )?;
        run(label, (q(), q(), q()), |(q1, q2, q3)| {
            laws::bracket_antisymmetry_and_jacobi(p, &q1, &q2, &q3)
        })?;
        run(label, (e(), e()), |(a, b)| {
            laws::normal_form_idempotent_and_deterministic(&a, &b)
        })?;
        suites += 8;
    }
    Ok(format!("{suites} suites of {CASES} cases, zero failures"))
}

fn criterion_7() -> Outcome {
    let p = scalar_problem();
    run(
        "oracle",
        (expr(&p, false), small_expr(&p, false)),
        |(e, q)| laws::prolongation_oracle(&p, &e, &q),
    )?;
    Ok(format!("{CASES} cases agree with the prolongation formula"))
}

fn criterion_8() -> Outcome {
    let sg = get_pde("sine-gordon")?.pde;
    let u = Characteristic::parse(sg.problem(), "u", "u")?;
    ensure!(
        check_symmetry(&sg, &u)?.verdict == Verdict::NotSymmetry,
        "sine-gordon accepts Q = u"
    );

    let heat = get_pde("heat")?.pde;
    let q = Characteristic::parse(heat.problem(), "x*u_t", "x*u_t")?;
    ensure!(
        check_symmetry(&heat, &q)?.verdict == Verdict::NotSymmetry,
        "heat accepts Q = x*u_t"
    );
    ensure!(
        find_operator(&heat, &q, &AnsatzConfig::default())?.is_none(),
        "heat finds an operator for Q = x*u_t"
    );

    let mut pde = chiral_bare()?;
    let flipped = PotentialDef::new("X")
        .derivative("x", "inv(g)*g_t")
        .derivative("t", "inv(g)*g_x");
    match declare_potential(&mut pde, &flipped) {
        Err(Error::IncompatiblePotential { .. }) => {}
        other => return Err(format!("sign-flipped X not rejected: {other:?}").into()),
    }
    ensure!(
        pde.problem().lookup("X").is_none(),
        "rejected X left behind a declaration"
    );
    Ok("all three controls rejected".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("micro examples", criterion_1),
        ("symmetry verdicts and certificates", criterion_2),
        ("wave scaling certificate", criterion_3),
        ("structure constants", criterion_4),
        ("chiral identity, potential and Bäcklund map", criterion_5),
        ("algebraic property suites", criterion_6),
        ("prolongation oracle", criterion_7),
        ("negative controls", criterion_8),
    ];
    let mut failed = 0;
    for (n, (title, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let ms = start.elapsed().as_millis();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {title}: {detail} ({ms} ms)", n + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {title}: {e} ({ms} ms)", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
