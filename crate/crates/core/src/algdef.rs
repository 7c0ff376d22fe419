//! Line-based definition files for algebras, subalgebra families and
//! realizations.
//!
//! ```text
//! algebra g3.1
//! dim 3
//! bracket e2 e3 = 1*e1
//! params a b
//! subalgebra h2 = span(-a,1,0)
//! ```
//!
//! Realization files add `vars <m>` and one `e<i> -> <field>` line per
//! basis element.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expr::{parse::basis_param, parse::parse_with, parse_rat_expr, Expr, RatExpr, Style, TermKey};
use crate::liealg::{StructureConstants, SubalgebraFamily};
use crate::scalar::Rational;
use crate::transitive::{Backend, Provenance, Realization, VectorField};

#[derive(Clone, Debug, PartialEq)]
pub struct AlgDef {
    pub algebra: StructureConstants,
    pub params: Vec<String>,
    pub subalgebras: Vec<SubalgebraFamily>,
}

/// A realization file: the algebra plus explicit fields.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationDef {
    pub def: AlgDef,
    pub m: usize,
    pub fields: Vec<VectorField>,
}

fn semantic(line: usize, msg: impl Into<String>) -> Error {
    Error::Semantic { line, msg: msg.into() }
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, col, msg: msg.into() }
}

/// Re-anchor an expression error at `line`, shifted by `offset` columns.
fn relocate(e: Error, line: usize, offset: usize) -> Error {
    match e {
        Error::Syntax { col, msg, .. } => Error::Syntax { line, col: col + offset, msg },
        other => other,
    }
}

fn basis_index(tok: &str, dim: usize, line: usize) -> Result<usize> {
    let k: usize = tok
        .strip_prefix('e')
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| semantic(line, format!("expected a basis element e<k>, found `{}`", tok)))?;
    if k == 0 || k > dim {
        return Err(semantic(line, format!("basis index {} out of range 1..{}", k, dim)));
    }
    Ok(k - 1)
}

fn is_ident(s: &str) -> bool {
    let mut ch = s.chars();
    ch.next().is_some_and(|c| c.is_ascii_alphabetic()) && ch.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn reserved(s: &str) -> bool {
    s == "I"
        || ["exp", "cos", "sin"].contains(&s)
        || ['x', 'd', 'e'].iter().any(|&p| s.strip_prefix(p).is_some_and(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit())))
}

/// Linear combination `Σ c_k e_k` with rational coefficients.
fn parse_combination(src: &str, dim: usize, line: usize, offset: usize) -> Result<Vec<(usize, Rational)>> {
    let q = parse_rat_expr(src).map_err(|e| relocate(e, line, offset))?;
    let den = q.den().as_scalar().filter(|s| s.is_real()).ok_or_else(|| semantic(line, "bracket coefficients must be rational"))?;
    let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
    for (k, c) in q.num().terms() {
        let bad = || semantic(line, "bracket right-hand side must be a rational combination of basis elements");
        if !c.is_real() || !k.coord.is_empty() || !k.opaque.is_empty() || !k.freq.is_zero() || k.param.len() != 1 {
            return Err(bad());
        }
        let (name, &e) = k.param.iter().next().unwrap();
        if e != 1 {
            return Err(bad());
        }
        let idx = basis_index(name, dim, line)?;
        *out.entry(idx).or_insert_with(Rational::zero) += &c.re / &den.re;
    }
    Ok(out.into_iter().filter(|(_, v)| !v.is_zero()).collect())
}

/// Split `s` on `sep` at parenthesis depth zero, keeping byte offsets.
fn split_top(s: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}

struct Builder {
    name: Option<String>,
    algebra: Option<StructureConstants>,
    params: Vec<String>,
    seen: BTreeMap<(usize, usize), usize>,
    subalgebras: Vec<SubalgebraFamily>,
    vars: Option<usize>,
    fields: BTreeMap<usize, (usize, VectorField)>,
}

impl Builder {
    fn dim(&self, line: usize) -> Result<usize> {
        self.algebra.as_ref().map(|a| a.dim()).ok_or_else(|| semantic(line, "`dim` must come first"))
    }

    fn item(&mut self, line: usize, raw: &str, realization: bool) -> Result<()> {
        let body = raw.split('#').next().unwrap();
        let trimmed = body.trim_start();
        if trimmed.trim().is_empty() {
            return Ok(());
        }
        let lead = body.len() - trimmed.len();
        let trimmed = trimmed.trim_end();
        let (kw, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
        let rest_off = lead + kw.len() + (trimmed[kw.len()..].len() - rest.len());
        let rest_off = rest_off + (rest.len() - rest.trim_start().len());
        let rest = rest.trim();
        match kw {
            "algebra" => {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(syntax(line, rest_off + 1, "expected a single algebra name"));
                }
                if self.name.is_some() {
                    return Err(semantic(line, "duplicate `algebra` line"));
                }
                self.name = Some(rest.to_string());
            }
            "dim" => {
                let n: usize = rest.parse().map_err(|_| syntax(line, rest_off + 1, "expected a dimension"))?;
                if self.algebra.is_some() {
                    return Err(semantic(line, "duplicate `dim` line"));
                }
                self.algebra = Some(StructureConstants::zero(self.name.clone().unwrap_or_default(), n));
            }
            "bracket" => {
                let n = self.dim(line)?;
                let (lhs, rhs) = rest.split_once('=').ok_or_else(|| syntax(line, rest_off + rest.len() + 1, "expected `=`"))?;
                let toks: Vec<&str> = lhs.split_whitespace().collect();
                if toks.len() != 2 {
                    return Err(syntax(line, rest_off + 1, "expected `bracket e<i> e<j> = ...`"));
                }
                let i = basis_index(toks[0], n, line)?;
                let j = basis_index(toks[1], n, line)?;
                if i == j {
                    return Err(semantic(line, format!("[e{0}, e{0}] is zero by antisymmetry", i + 1)));
                }
                let key = (i.min(j), i.max(j));
                if let Some(prev) = self.seen.get(&key) {
                    return Err(semantic(line, format!("bracket of e{} and e{} already given on line {}", i + 1, j + 1, prev)));
                }
                self.seen.insert(key, line);
                let rhs_off = rest_off + lhs.len() + 1;
                let terms = parse_combination(rhs, n, line, rhs_off)?;
                self.algebra.as_mut().unwrap().set_bracket(i, j, &terms);
            }
            "params" => {
                for p in rest.split_whitespace() {
                    if !is_ident(p) || reserved(p) {
                        return Err(semantic(line, format!("`{}` cannot be used as a parameter name", p)));
                    }
                    if self.params.iter().any(|q| q == p) {
                        return Err(semantic(line, format!("parameter `{}` declared twice", p)));
                    }
                    self.params.push(p.to_string());
                }
            }
            "subalgebra" => {
                let n = self.dim(line)?;
                let (name, rhs) = rest.split_once('=').ok_or_else(|| syntax(line, rest_off + rest.len() + 1, "expected `=`"))?;
                let name = name.trim();
                if !is_ident_like(name) {
                    return Err(syntax(line, rest_off + 1, "expected a subalgebra name"));
                }
                if self.subalgebras.iter().any(|s| s.name == name) {
                    return Err(semantic(line, format!("subalgebra `{}` defined twice", name)));
                }
                let rhs_off = rest_off + rest.find('=').unwrap() + 1;
                let inner_start = rhs.find("span(").ok_or_else(|| syntax(line, rhs_off + 1, "expected `span(`"))?;
                if !rhs[..inner_start].trim().is_empty() {
                    return Err(syntax(line, rhs_off + 1, "expected `span(`"));
                }
                let inner = rhs[inner_start + 5..].trim_end();
                let inner = inner.strip_suffix(')').ok_or_else(|| syntax(line, rhs_off + rhs.len() + 1, "expected `)`"))?;
                let inner_off = rhs_off + inner_start + 5;
                let mut basis = Vec::new();
                if !inner.trim().is_empty() {
                    for (voff, vec) in split_top(inner, ';') {
                        let mut v = Vec::new();
                        for (eoff, entry) in split_top(vec, ',') {
                            let off = inner_off + voff + eoff;
                            let e = parse_rat_expr(entry).map_err(|e| relocate(e, line, off))?;
                            let e = e.as_expr().cloned().ok_or_else(|| semantic(line, "vector entries must be polynomials"))?;
                            if !e.is_param_poly() {
                                return Err(semantic(line, "vector entries may only contain parameters"));
                            }
                            if let Some(p) = e.params_used().into_iter().find(|p| !self.params.contains(p)) {
                                return Err(semantic(line, format!("undeclared parameter `{}`", p)));
                            }
                            v.push(e);
                        }
                        if v.len() != n {
                            return Err(semantic(line, format!("vector has {} entries, expected {}", v.len(), n)));
                        }
                        basis.push(v);
                    }
                }
                let used: Vec<String> = self
                    .params
                    .iter()
                    .filter(|p| basis.iter().flatten().any(|e: &Expr| e.params_used().contains(*p)))
                    .cloned()
                    .collect();
                self.subalgebras.push(SubalgebraFamily::new(name, used, basis));
            }
            "vars" if realization => {
                let m: usize = rest.parse().map_err(|_| syntax(line, rest_off + 1, "expected a variable count"))?;
                if self.vars.is_some() {
                    return Err(semantic(line, "duplicate `vars` line"));
                }
                self.vars = Some(m);
            }
            _ if realization && trimmed.contains("->") => {
                let n = self.dim(line)?;
                let m = self.vars.ok_or_else(|| semantic(line, "`vars` must precede field lines"))?;
                let (lhs, rhs) = trimmed.split_once("->").unwrap();
                let i = basis_index(lhs.trim(), n, line)?;
                if self.fields.contains_key(&i) {
                    return Err(semantic(line, format!("field for e{} given twice", i + 1)));
                }
                let off = lead + lhs.len() + 2;
                let f = parse_field(rhs, m).map_err(|e| match e {
                    Error::Syntax { col, msg, .. } => Error::Syntax { line, col: col + off, msg },
                    Error::Semantic { msg, .. } => Error::Semantic { line, msg },
                    other => other,
                })?;
                self.fields.insert(i, (line, f));
            }
            _ => return Err(syntax(line, lead + 1, format!("unknown item `{}`", kw))),
        }
        Ok(())
    }
}

fn is_ident_like(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "_.^{},+-".contains(c))
}

/// `Σ q_k d_k` read back into components; `0` is the zero field.
pub fn parse_field(src: &str, m: usize) -> Result<VectorField> {
    let q = parse_with(src, true)?;
    let names: Vec<String> = (1..=m).map(basis_param).collect();
    if q.den().params_used().iter().any(|p| p.starts_with('\u{1}')) {
        return Err(semantic(0, "basis fields may not appear in a denominator"));
    }
    let mut nums = vec![Expr::zero(); m];
    for (k, c) in q.num().terms() {
        let basis: Vec<(&String, &u32)> = k.param.iter().filter(|(p, _)| p.starts_with('\u{1}')).collect();
        if basis.len() != 1 || *basis[0].1 != 1 {
            return Err(semantic(0, "each term must contain exactly one d<k>"));
        }
        let idx = names
            .iter()
            .position(|n| n == basis[0].0)
            .ok_or_else(|| semantic(0, format!("{} exceeds the declared variable count", basis[0].0.trim_start_matches('\u{1}'))))?;
        let mut rest: TermKey = k.clone();
        rest.param.remove(basis[0].0);
        nums[idx].insert_add(rest, c.clone());
    }
    let comps = nums.into_iter().map(|e| RatExpr::new(e, q.den().clone())).collect::<Result<Vec<_>>>()?;
    Ok(VectorField::new(comps))
}

fn parse_impl(text: &str, realization: bool) -> Result<(Builder, usize)> {
    let mut b = Builder {
        name: None,
        algebra: None,
        params: vec![],
        seen: BTreeMap::new(),
        subalgebras: vec![],
        vars: None,
        fields: BTreeMap::new(),
    };
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        b.item(i + 1, raw, realization)?;
        last = i + 1;
    }
    if b.algebra.is_none() {
        return Err(semantic(last, "missing `dim` line"));
    }
    let name = b.name.clone().ok_or_else(|| semantic(last, "missing `algebra` line"))?;
    b.algebra.as_mut().unwrap().name = name;
    Ok((b, last))
}

pub fn parse_algdef(text: &str) -> Result<AlgDef> {
    let (b, _) = parse_impl(text, false)?;
    Ok(AlgDef { algebra: b.algebra.unwrap(), params: b.params, subalgebras: b.subalgebras })
}

pub fn parse_realization(text: &str) -> Result<RealizationDef> {
    let (b, last) = parse_impl(text, true)?;
    let n = b.algebra.as_ref().unwrap().dim();
    let m = b.vars.ok_or_else(|| semantic(last, "missing `vars` line"))?;
    let mut fields = Vec::with_capacity(n);
    for i in 0..n {
        let (_, f) = b.fields.get(&i).ok_or_else(|| semantic(last, format!("no field given for e{}", i + 1)))?;
        fields.push(f.clone());
    }
    Ok(RealizationDef {
        def: AlgDef { algebra: b.algebra.unwrap(), params: b.params, subalgebras: b.subalgebras },
        m,
        fields,
    })
}

impl AlgDef {
    pub fn subalgebra(&self, name: &str) -> Result<&SubalgebraFamily> {
        self.subalgebras
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::NotFound(format!("subalgebra {}", name)))
    }

    pub fn print(&self) -> String {
        let c = &self.algebra;
        let n = c.dim();
        let mut s = String::new();
        writeln!(s, "algebra {}", c.name).unwrap();
        writeln!(s, "dim {}", n).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                let terms: Vec<String> = (0..n)
                    .filter(|&k| !c.get(i, j, k).is_zero())
                    .map(|k| format!("{}*e{}", c.get(i, j, k), k + 1))
                    .collect();
                if !terms.is_empty() {
                    writeln!(s, "bracket e{} e{} = {}", i + 1, j + 1, terms.join(" + ")).unwrap();
                }
            }
        }
        if !self.params.is_empty() {
            writeln!(s, "params {}", self.params.join(" ")).unwrap();
        }
        for f in &self.subalgebras {
            let vs: Vec<String> =
                f.basis.iter().map(|v| v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")).collect();
            writeln!(s, "subalgebra {} = span({})", f.name, vs.join("; ")).unwrap();
        }
        s
    }
}

impl RealizationDef {
    pub fn realization(&self) -> Realization {
        Realization {
            algebra: self.def.algebra.clone(),
            m: self.m,
            fields: self.fields.clone(),
            provenance: Provenance { label: "file".into(), params: self.def.params.clone(), ..Default::default() },
            backend: Backend::Closed,
        }
    }

    pub fn print(&self) -> String {
        let mut s = self.def.print();
        writeln!(s, "vars {}", self.m).unwrap();
        for line in self.realization().render_lines(Style::Plain) {
            writeln!(s, "{}", line).unwrap();
        }
        s
    }
}

/// Realization file text for an emitted realization.
pub fn print_realization(r: &Realization) -> String {
    RealizationDef {
        def: AlgDef { algebra: r.algebra.clone(), params: r.provenance.params.clone(), subalgebras: vec![] },
        m: r.m,
        fields: r.fields.clone(),
    }
    .print()
}
