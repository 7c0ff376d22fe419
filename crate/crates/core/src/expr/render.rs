//! Deterministic plain-text and LaTeX rendering.
//!
//! Terms print in canonical key order. When an expression is real, pairs
//! `c e^{R+iI} + conj(c) e^{R-iI}` are folded into `cos`/`sin` factors.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{Affine, Expr, Frequency, RatExpr, TermKey};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Style {
    #[default]
    Plain,
    Latex,
}

struct DisplayTerm {
    coeff: Scalar,
    factors: Vec<String>,
}

fn fmt_rat(r: &Rational, style: Style) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else if style == Style::Latex {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_abs_scalar(s: &Scalar, style: Style) -> String {
    let unit = if style == Style::Latex { "i" } else { "I" };
    if s.im.is_zero() {
        fmt_rat(&s.re.abs(), style)
    } else if s.re.is_zero() {
        let im = s.im.abs();
        if im.is_one() {
            unit.to_string()
        } else {
            format!("{}{}{}", fmt_rat(&im, style), if style == Style::Latex { " " } else { "*" }, unit)
        }
    } else {
        let mut t = s.to_string();
        if style == Style::Latex {
            t = t.replace('I', "i").replace('*', " ");
        }
        t
    }
}

fn sign_negative(s: &Scalar) -> bool {
    // complex coefficients with nonzero real part carry their own parentheses
    if s.im.is_zero() {
        s.re.is_negative()
    } else {
        s.re.is_zero() && s.im.is_negative()
    }
}

fn pow_str(base: String, e: u32, style: Style) -> String {
    if e == 1 {
        base
    } else if style == Style::Latex {
        format!("{}^{{{}}}", base, e)
    } else {
        format!("{}^{}", base, e)
    }
}

fn coord_name(v: usize, style: Style) -> String {
    match style {
        Style::Plain => format!("x{}", v + 1),
        Style::Latex => format!("x_{{{}}}", v + 1),
    }
}

fn monomial_factors(k: &TermKey, style: Style) -> Vec<String> {
    let mut out = Vec::new();
    for (p, &e) in &k.param {
        out.push(pow_str(p.trim_start_matches('\u{1}').to_string(), e, style));
    }
    for (&v, &e) in &k.coord {
        out.push(pow_str(coord_name(v, style), e, style));
    }
    for (a, &e) in &k.opaque {
        let args: Vec<String> = a.deps.iter().map(|&d| coord_name(d, style)).collect();
        let base = if args.is_empty() { a.name.clone() } else { format!("{}({})", a.name, args.join(",")) };
        out.push(pow_str(base, e, style));
    }
    out
}

fn exp_factor(freq: &Frequency, style: Style) -> Option<String> {
    if freq.is_zero() {
        return None;
    }
    let arg = render_expr(&freq.exponent(), style);
    Some(match style {
        Style::Plain => format!("exp({})", arg),
        Style::Latex => format!("\\mathrm{{e}}^{{{}}}", arg),
    })
}

fn trig_factor(name: &str, arg: &Frequency, style: Style) -> String {
    let a = render_expr(&arg.exponent(), style);
    match style {
        Style::Plain => format!("{}({})", name, a),
        Style::Latex => format!("\\{}({})", name, a),
    }
}

fn split_freq(f: &Frequency) -> (Frequency, Frequency) {
    let mut re = Frequency::default();
    let mut im = Frequency::default();
    for (v, a) in &f.0 {
        let (r, i) = a.split_re_im();
        if !r.is_zero() {
            re.0.insert(*v, r);
        }
        if !i.is_zero() {
            im.0.insert(*v, i);
        }
    }
    (re, im)
}

fn first_value_positive(f: &Frequency) -> bool {
    let a: &Affine = f.0.values().next().unwrap();
    if !a.constant.is_zero() {
        return a.constant.re.is_positive();
    }
    a.coeffs.values().next().map(|c| c.re.is_positive()).unwrap_or(true)
}

fn plain_terms(e: &Expr, style: Style) -> Vec<DisplayTerm> {
    e.terms()
        .map(|(k, c)| {
            let mut factors = monomial_factors(k, style);
            factors.extend(exp_factor(&k.freq, style));
            DisplayTerm { coeff: c.clone(), factors }
        })
        .collect()
}

/// Fold conjugate exponential pairs into cos/sin; `None` if the expression
/// does not decompose that way.
fn trig_terms(e: &Expr, style: Style) -> Option<Vec<DisplayTerm>> {
    let mut out = Vec::new();
    let mut used: BTreeSet<TermKey> = BTreeSet::new();
    for (k, c) in e.terms() {
        if used.contains(k) {
            continue;
        }
        let (re, im) = split_freq(&k.freq);
        if im.is_zero() {
            let mut factors = monomial_factors(k, style);
            factors.extend(exp_factor(&k.freq, style));
            out.push(DisplayTerm { coeff: c.clone(), factors });
            continue;
        }
        let mut partner = k.clone();
        let i_neg = Frequency(im.0.iter().map(|(v, a)| (*v, a.scale(&-Scalar::i()))).collect());
        partner.freq = re.add(&i_neg);
        let pc = e.terms().find(|(k2, _)| **k2 == partner).map(|(_, c)| c.clone())?;
        if pc != c.conj() {
            return None;
        }
        used.insert(partner);
        let (arg, coef) = if first_value_positive(&im) { (im, c.clone()) } else { (im.neg(), pc) };
        let two = Rational::from_integer(2.into());
        let cos_c = Scalar::real(&coef.re * &two);
        let sin_c = Scalar::real(-(&coef.im * &two));
        let mut base = monomial_factors(k, style);
        base.extend(exp_factor(&re, style));
        if !cos_c.is_zero() {
            let mut f = base.clone();
            f.push(trig_factor("cos", &arg, style));
            out.push(DisplayTerm { coeff: cos_c, factors: f });
        }
        if !sin_c.is_zero() {
            let mut f = base;
            f.push(trig_factor("sin", &arg, style));
            out.push(DisplayTerm { coeff: sin_c, factors: f });
        }
    }
    Some(out)
}

fn display_terms(e: &Expr, style: Style) -> Vec<DisplayTerm> {
    let has_imag_freq = e.terms().any(|(k, _)| !split_freq(&k.freq).1.is_zero());
    if has_imag_freq && e.is_real() {
        if let Some(t) = trig_terms(e, style) {
            return t;
        }
    }
    plain_terms(e, style)
}

fn term_body(t: &DisplayTerm, style: Style) -> String {
    let sep = if style == Style::Latex { " " } else { "*" };
    let c = fmt_abs_scalar(&t.coeff, style);
    let unit = t.coeff.im.is_zero() && t.coeff.re.abs().is_one();
    if t.factors.is_empty() {
        c
    } else if unit {
        t.factors.join(sep)
    } else {
        format!("{}{}{}", c, sep, t.factors.join(sep))
    }
}

fn join_terms(terms: &[DisplayTerm], style: Style) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, t) in terms.iter().enumerate() {
        let neg = sign_negative(&t.coeff);
        let body = term_body(t, style);
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        s.push_str(&body);
    }
    s
}

pub fn render_expr(e: &Expr, style: Style) -> String {
    join_terms(&display_terms(e, style), style)
}

fn wrap(s: String, multi: bool, style: Style) -> String {
    if !multi {
        return s;
    }
    match style {
        Style::Plain => format!("({})", s),
        Style::Latex => format!("\\left({}\\right)", s),
    }
}

pub fn render_rat(q: &RatExpr, style: Style) -> String {
    let q = if q.has_exp() { q.realified() } else { q.clone() };
    if let Some(e) = q.as_expr() {
        return render_expr(e, style);
    }
    let mut n = display_terms(q.num(), style);
    let mut d = display_terms(q.den(), style);
    if let Some(k) = d[0].coeff.inv().filter(|_| d[0].coeff.is_real()) {
        for t in n.iter_mut().chain(d.iter_mut()) {
            t.coeff = &t.coeff * &k;
        }
    }
    let den_plain = d.len() == 1 && d[0].coeff.is_one() && d[0].factors.len() <= 1;
    match style {
        Style::Plain => format!(
            "{}/{}",
            wrap(join_terms(&n, style), n.len() > 1, style),
            wrap(join_terms(&d, style), !den_plain, style)
        ),
        Style::Latex => format!("\\frac{{{}}}{{{}}}", join_terms(&n, style), join_terms(&d, style)),
    }
}

/// Coefficient-times-basis rendering, e.g. `x1*d1`, `-(a + x4)*d3`,
/// `(a - x2)*d1`. Returns `None` for a zero coefficient.
pub fn render_component(q: &RatExpr, basis: &str, style: Style) -> Option<String> {
    if q.is_zero() {
        return None;
    }
    let sep = if style == Style::Latex { " " } else { "*" };
    let q2 = if q.has_exp() { q.realified() } else { q.clone() };
    if let Some(e) = q2.as_expr() {
        let terms = display_terms(e, style);
        if terms.len() == 1 {
            let t = &terms[0];
            let neg = sign_negative(&t.coeff);
            let body = term_body(t, style);
            let unit_const = t.factors.is_empty() && t.coeff.im.is_zero() && t.coeff.re.abs().is_one();
            let core = if unit_const { basis.to_string() } else { format!("{}{}{}", body, sep, basis) };
            return Some(if neg { format!("-{}", core) } else { core });
        }
        if terms.iter().all(|t| sign_negative(&t.coeff)) {
            let flipped: Vec<DisplayTerm> =
                terms.into_iter().map(|t| DisplayTerm { coeff: -t.coeff, factors: t.factors }).collect();
            return Some(format!("-{}{}{}", wrap(join_terms(&flipped, style), true, style), sep, basis));
        }
        return Some(format!("{}{}{}", wrap(join_terms(&terms, style), true, style), sep, basis));
    }
    Some(format!("{}{}{}", wrap(render_rat(q, style), true, style), sep, basis))
}

/// Render a vector field `Σ q_j ∂_j`; `0` for the zero field.
pub fn render_field(components: &[RatExpr], style: Style) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (j, q) in components.iter().enumerate() {
        let basis = match style {
            Style::Plain => format!("d{}", j + 1),
            Style::Latex => format!("\\partial_{{{}}}", j + 1),
        };
        if let Some(s) = render_component(q, &basis, style) {
            parts.push(s);
        }
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = parts[0].clone();
    for p in &parts[1..] {
        match p.strip_prefix('-') {
            Some(rest) => {
                s.push_str(" - ");
                s.push_str(rest);
            }
            None => {
                s.push_str(" + ");
                s.push_str(p);
            }
        }
    }
    s
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_expr(self, Style::Plain))
    }
}

