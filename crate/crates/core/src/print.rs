//! Rendering normal forms back to the text syntax accepted by the parser.
//!
//! Pairs of terms `c·m·ab - c·m·ba` are re-sugared as `c*m*comm(a, b)`.

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::expr::{Atom, MultiIndex};
use crate::normalize::{Factor, Letter, NormalForm, TermKey};
use crate::problem::Problem;

fn with_subscript(problem: &Problem, name: &str, index: &MultiIndex) -> String {
    if index.is_empty() {
        return name.to_string();
    }
    let names: Vec<&str> = index.iter().map(|i| problem.coordinate_name(i)).collect();
    if names.iter().all(|n| n.len() == 1) {
        format!("{name}_{}", names.concat())
    } else {
        names
            .iter()
            .fold(name.to_string(), |acc, n| format!("D({acc}, {n})"))
    }
}

fn atom(problem: &Problem, a: &Atom) -> String {
    match a {
        Atom::Const(n) => n.to_string(),
        Atom::Coord(c) => c.name.to_string(),
        Atom::Jet { dep, index } => with_subscript(problem, &dep.name, index),
        Atom::Base { name, partials, .. } => with_subscript(problem, name, partials),
        Atom::ConstMatrix { name, .. } => name.to_string(),
        Atom::Potential { name, .. } => name.to_string(),
    }
}

fn letter(problem: &Problem, l: &Letter) -> String {
    match l {
        Letter::Atom(a) => atom(problem, a),
        Letter::Func(f, arg) => format!("{}({})", f.name(), render(problem, arg)),
    }
}

fn factor(problem: &Problem, f: &Factor) -> String {
    let s = letter(problem, &f.letter);
    if f.inverse {
        format!("inv({s})")
    } else {
        s
    }
}

fn scalar_factors(problem: &Problem, key: &TermKey) -> Vec<String> {
    let mut out = Vec::new();
    for (l, &e) in &key.scalars {
        let s = letter(problem, l);
        for _ in 0..e.unsigned_abs() {
            out.push(if e < 0 {
                format!("inv({s})")
            } else {
                s.clone()
            });
        }
    }
    out
}

fn push_term(out: &mut String, coeff: &BigRational, factors: &[String]) {
    let negative = coeff.is_negative();
    let mag = coeff.abs();
    if out.is_empty() {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    let mut parts = Vec::new();
    if !mag.is_one() || factors.is_empty() {
        parts.push(mag.to_string());
    }
    parts.extend(factors.iter().cloned());
    out.push_str(&parts.join("*"));
}

/// Renders `nf` in parseable text form.
pub fn render(problem: &Problem, nf: &NormalForm) -> String {
    let terms: Vec<(&TermKey, &BigRational)> = nf.terms().collect();
    let mut used = vec![false; terms.len()];
    let mut out = String::new();
    for (i, (key, coeff)) in terms.iter().enumerate() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut factors = scalar_factors(problem, key);
        if key.word.len() == 2 && key.word[0] != key.word[1] {
            let swapped = TermKey {
                scalars: key.scalars.clone(),
                word: vec![key.word[1].clone(), key.word[0].clone()],
            };
            let partner = terms
                .iter()
                .enumerate()
                .position(|(j, (k, c))| !used[j] && **k == swapped && **c == -(*coeff).clone());
            if let Some(j) = partner {
                used[j] = true;
                let (a, b, c) = if coeff.is_negative() {
                    (&key.word[1], &key.word[0], -(*coeff).clone())
                } else {
                    (&key.word[0], &key.word[1], (*coeff).clone())
                };
                factors.push(format!(
                    "comm({}, {})",
                    factor(problem, a),
                    factor(problem, b)
                ));
                push_term(&mut out, &c, &factors);
                continue;
            }
        }
        factors.extend(key.word.iter().map(|f| factor(problem, f)));
        push_term(&mut out, coeff, &factors);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
