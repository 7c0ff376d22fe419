//! Regular realizations: normal-form parameter assignments, extension of
//! transitive families to more variables, and complete systems.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{render_expr, Bindings, Expr, OpaqueAtom, Style, Symbol};
use crate::liealg::{rat_expr, StructureConstants, SubalgebraFamily};
use crate::scalar::Rational;
use crate::transitive::{realize_transitive, Realization};
use crate::verify;

const ATOM_NAMES: [&str; 6] = ["f", "g", "h", "k", "p", "q"];

fn atom_name(i: usize) -> String {
    ATOM_NAMES.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("f{}", i + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlotKind {
    Const,
    Fresh,
    Opaque,
}

impl SlotKind {
    fn letter(self) -> char {
        match self {
            SlotKind::Const => 'C',
            SlotKind::Fresh => 'F',
            SlotKind::Opaque => 'O',
        }
    }
}

/// What a single parameter is replaced by. Fresh ordinals `l` are 1-based:
/// on a rank-`r` base the slot uses coordinate `x_{r+l}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Slot {
    Const(Expr),
    Fresh { offset: Expr, l: usize },
    Opaque { offset: Expr, atom: String, deps: Vec<usize> },
}

impl Slot {
    pub fn kind(&self) -> SlotKind {
        match self {
            Slot::Const(_) => SlotKind::Const,
            Slot::Fresh { .. } => SlotKind::Fresh,
            Slot::Opaque { .. } => SlotKind::Opaque,
        }
    }

    pub fn offset(&self) -> &Expr {
        match self {
            Slot::Const(c) => c,
            Slot::Fresh { offset, .. } | Slot::Opaque { offset, .. } => offset,
        }
    }

    fn with_offset(&self, o: Expr) -> Slot {
        match self {
            Slot::Const(_) => Slot::Const(o),
            Slot::Fresh { l, .. } => Slot::Fresh { offset: o, l: *l },
            Slot::Opaque { atom, deps, .. } => Slot::Opaque { offset: o, atom: atom.clone(), deps: deps.clone() },
        }
    }

    /// The expression substituted for the parameter on a rank-`r` base.
    pub fn expr(&self, r: usize) -> Expr {
        match self {
            Slot::Const(c) => c.clone(),
            Slot::Fresh { offset, l } => offset + &Expr::coord(r + l - 1),
            Slot::Opaque { offset, atom, deps } => {
                offset + &Expr::opaque(OpaqueAtom::new(atom.clone(), deps.iter().map(|l| r + l - 1).collect()))
            }
        }
    }
}

/// One slot per parameter of the family, in slot order.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamAssignment {
    slots: Vec<Slot>,
}

impl ParamAssignment {
    /// Checks consecutive fresh ordinals and opaque dependencies on earlier
    /// fresh slots; an opaque slot without dependencies becomes `Const`.
    pub fn new(slots: Vec<Slot>) -> Result<ParamAssignment> {
        let mut used = 0;
        let mut out = Vec::with_capacity(slots.len());
        for (j, s) in slots.into_iter().enumerate() {
            match s {
                Slot::Fresh { l, .. } if l != used + 1 => {
                    return Err(Error::InvalidArgument(format!("slot {}: fresh ordinal {} should be {}", j + 1, l, used + 1)))
                }
                Slot::Fresh { .. } => {
                    used += 1;
                    out.push(s);
                }
                Slot::Opaque { offset, deps, .. } if deps.is_empty() => out.push(Slot::Const(offset)),
                Slot::Opaque { ref deps, .. } if deps.iter().any(|&d| d == 0 || d > used) => {
                    return Err(Error::InvalidArgument(format!("slot {}: opaque atom depends on unused coordinates", j + 1)))
                }
                s => out.push(s),
            }
        }
        Ok(ParamAssignment { slots: out })
    }

    /// Instantiate a pattern with zero offsets; opaque atoms are named in slot
    /// order and depend on every fresh coordinate introduced before them.
    pub fn from_kinds(kinds: &[SlotKind]) -> Result<ParamAssignment> {
        let mut used = 0;
        let mut atoms = 0;
        let mut slots = Vec::new();
        for k in kinds {
            slots.push(match k {
                SlotKind::Const => Slot::Const(Expr::zero()),
                SlotKind::Fresh => {
                    used += 1;
                    Slot::Fresh { offset: Expr::zero(), l: used }
                }
                SlotKind::Opaque if used == 0 => Slot::Const(Expr::zero()),
                SlotKind::Opaque => {
                    atoms += 1;
                    Slot::Opaque { offset: Expr::zero(), atom: atom_name(atoms - 1), deps: (1..=used).collect() }
                }
            });
        }
        ParamAssignment::new(slots)
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn kinds(&self) -> Vec<SlotKind> {
        self.slots.iter().map(Slot::kind).collect()
    }

    pub fn fresh_count(&self) -> usize {
        self.slots.iter().filter(|s| s.kind() == SlotKind::Fresh).count()
    }

    pub fn with_offsets(&self, offsets: &[Expr]) -> Result<ParamAssignment> {
        if offsets.len() != self.slots.len() {
            return Err(Error::InvalidArgument(format!("{} offsets for {} slots", offsets.len(), self.slots.len())));
        }
        Ok(ParamAssignment { slots: self.slots.iter().zip(offsets).map(|(s, o)| s.with_offset(o.clone())).collect() })
    }

    /// `C,F,O`-style pattern, the inverse of [`parse_pattern`].
    pub fn pattern(&self) -> String {
        self.slots.iter().map(|s| s.kind().letter().to_string()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for ParamAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.pattern())
    }
}

pub fn parse_pattern(s: &str) -> Result<Vec<SlotKind>> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',')
        .map(|p| match p.trim() {
            "C" | "c" | "Const" => Ok(SlotKind::Const),
            "F" | "f" | "Fresh" => Ok(SlotKind::Fresh),
            "O" | "o" | "Opaque" => Ok(SlotKind::Opaque),
            other => Err(Error::InvalidArgument(format!("unknown slot kind `{}`", other))),
        })
        .collect()
}

/// All normal-form assignments of `s` slots with at most `max_fresh` fresh
/// coordinates. A non-fresh slot is `Const` before the first fresh slot and
/// `Opaque` afterwards; the non-fresh choice is listed first.
pub fn enumerate_normal_forms(s: usize, max_fresh: usize) -> Vec<ParamAssignment> {
    fn go(prefix: &mut Vec<SlotKind>, used: usize, s: usize, max: usize, out: &mut Vec<Vec<SlotKind>>) {
        if prefix.len() == s {
            out.push(prefix.clone());
            return;
        }
        prefix.push(if used == 0 { SlotKind::Const } else { SlotKind::Opaque });
        go(prefix, used, s, max, out);
        prefix.pop();
        if used < max {
            prefix.push(SlotKind::Fresh);
            go(prefix, used + 1, s, max, out);
            prefix.pop();
        }
    }
    let mut pats = Vec::new();
    go(&mut Vec::new(), 0, s, max_fresh, &mut pats);
    pats.iter().map(|p| ParamAssignment::from_kinds(p).expect("generated patterns are well formed")).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularFamily {
    pub base: Realization,
    pub assignment: ParamAssignment,
    pub m: usize,
    pub result: Realization,
}

/// Superscript label such as `h4^{a+x4,b+f(x4),0}`.
pub fn family_label(name: &str, params: &[String], values: &BTreeMap<String, Expr>) -> String {
    if params.is_empty() {
        return name.to_string();
    }
    let parts: Vec<String> = params
        .iter()
        .map(|p| {
            let e = values.get(p).cloned().unwrap_or_else(|| Expr::param(p));
            render_expr(&e, Style::Plain).replace(' ', "")
        })
        .collect();
    format!("{}^{{{}}}", name, parts.join(","))
}

/// Replace the slot parameters of a rank-`r` base by their slot expressions
/// and declare the result on `m` variables.
pub fn extend_regular(
    base: &Realization,
    slot_params: &[String],
    assignment: &ParamAssignment,
    m: usize,
) -> Result<RegularFamily> {
    let r = base.m;
    if slot_params.len() != assignment.len() {
        return Err(Error::InvalidArgument(format!(
            "{} slot parameters for an assignment of {} slots",
            slot_params.len(),
            assignment.len()
        )));
    }
    if m < r + assignment.fresh_count() {
        return Err(Error::InvalidArgument(format!(
            "{} variables cannot hold rank {} plus {} fresh coordinates",
            m,
            r,
            assignment.fresh_count()
        )));
    }
    let values: BTreeMap<String, Expr> =
        slot_params.iter().cloned().zip(assignment.slots().iter().map(|s| s.expr(r))).collect();
    let b: Bindings = values.iter().map(|(p, e)| (Symbol::Param(p.clone()), e.clone())).collect();
    let mut result = base.substitute(&b).map_err(|e| match e {
        Error::UnsupportedSubstitution(_) => e,
        other => Error::UnsupportedSubstitution(other.to_string()),
    })?;
    result.m = m;
    result.fields = result.fields.iter().map(|f| f.extend_to(m)).collect();
    let label_values: BTreeMap<String, Expr> = values.into_iter().collect();
    result.provenance.label = family_label(&base.provenance.subalgebra, &base.provenance.params, &label_values);
    result.provenance.assignment = Some(assignment.pattern());
    let used: std::collections::BTreeSet<String> =
        result.fields.iter().flat_map(|f| f.components.iter().flat_map(|c| c.params_used())).collect();
    result.provenance.params = base.provenance.params.iter().filter(|p| used.contains(*p)).cloned().collect();
    if let Some(res) = verify::check_homomorphism(&result)?.first() {
        return Err(Error::Internal(format!("{}: {}", result.provenance.label, res)));
    }
    Ok(RegularFamily { base: base.clone(), assignment: assignment.clone(), m, result })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strong,
    Inn,
    Aut,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "strong" => Ok(Mode::Strong),
            "inn" => Ok(Mode::Inn),
            "aut" => Ok(Mode::Aut),
            _ => Err(Error::InvalidArgument(format!("unknown mode `{}`", s))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strong => "strong",
            Mode::Inn => "inn",
            Mode::Aut => "aut",
        })
    }
}

/// Values of the non-slot parameters; every combination is emitted.
pub type Choices = Vec<(String, Vec<Rational>)>;

#[derive(Clone, Debug, PartialEq)]
pub struct AutCollapse {
    /// Offsets of the first `prefix` slots are set to zero.
    pub prefix: usize,
    pub choices: Choices,
}

/// How one subalgebra family (a chart of Inn-classes) enters each mode.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyPlan {
    pub family: String,
    pub slots: Vec<String>,
    /// Inn representatives of the remaining parameters.
    pub inn: Choices,
    /// `None`: the family adds no Aut-class beyond the other families.
    pub aut: Option<AutCollapse>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemPlan {
    pub r: usize,
    pub m: usize,
    pub families: Vec<FamilyPlan>,
    pub caveats: Vec<(Mode, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompleteSystem {
    pub mode: Mode,
    pub rows: Vec<RegularFamily>,
    pub caveats: Vec<String>,
}

impl CompleteSystem {
    /// `label : field ; field ; ...` per row, then `# ` caveat lines.
    pub fn render(&self, style: Style) -> String {
        let mut s = String::new();
        for row in &self.rows {
            s.push_str(&format!("{} : {}\n", row.result.provenance.label, row.result.render_row(style)));
        }
        for c in &self.caveats {
            s.push_str(&format!("# {}\n", c));
        }
        s
    }
}

fn product(choices: &Choices) -> Vec<Vec<(String, Rational)>> {
    let mut out = vec![vec![]];
    for (p, vals) in choices {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<(String, Rational)>| {
                vals.iter().map(move |v| {
                    let mut x = prefix.clone();
                    x.push((p.clone(), v.clone()));
                    x
                })
            })
            .collect();
    }
    out
}

/// The complete system of rank-`r` realizations on at most `m` variables
/// for the given mode.
pub fn complete_system(
    c: &StructureConstants,
    families: &[SubalgebraFamily],
    plan: &SystemPlan,
    mode: Mode,
) -> Result<CompleteSystem> {
    if plan.m < plan.r {
        return Err(Error::InvalidArgument(format!("{} variables below rank {}", plan.m, plan.r)));
    }
    let mut rows = Vec::new();
    for fp in &plan.families {
        let fam = families
            .iter()
            .find(|f| f.name == fp.family)
            .ok_or_else(|| Error::NotFound(fp.family.clone()))?;
        if let Some(p) = fp.slots.iter().find(|p| !fam.params.contains(p)) {
            return Err(Error::InvalidArgument(format!("{} has no parameter {}", fam.name, p)));
        }
        let base = realize_transitive(c, fam)?;
        if base.m != plan.r {
            return Err(Error::InvalidArgument(format!("{} has codimension {}, not {}", fam.name, base.m, plan.r)));
        }
        let (choices, prefix) = match mode {
            Mode::Strong => (vec![], 0),
            Mode::Inn => (fp.inn.clone(), 0),
            Mode::Aut => match &fp.aut {
                Some(a) => (a.choices.clone(), a.prefix),
                None => continue,
            },
        };
        let forms = enumerate_normal_forms(fp.slots.len(), plan.m - plan.r);
        for fixed in product(&choices) {
            let b: Bindings = fixed.iter().map(|(p, v)| (Symbol::Param(p.clone()), rat_expr(v))).collect();
            let fixed_base = base.substitute(&b)?;
            let offsets: Vec<Expr> =
                fp.slots.iter().enumerate().map(|(j, p)| if j < prefix { Expr::zero() } else { Expr::param(p) }).collect();
            for form in &forms {
                let a = form.with_offsets(&offsets)?;
                let mut row = extend_regular(&fixed_base, &fp.slots, &a, plan.m)?;
                let mut values: BTreeMap<String, Expr> =
                    fixed.iter().map(|(p, v)| (p.clone(), rat_expr(v))).collect();
                for (p, s) in fp.slots.iter().zip(a.slots()) {
                    values.insert(p.clone(), s.expr(plan.r));
                }
                row.result.provenance.label = family_label(&fam.name, &fam.params, &values);
                rows.push(row);
            }
        }
    }
    let caveats = plan.caveats.iter().filter(|(m, _)| *m == mode).map(|(_, s)| s.clone()).collect();
    Ok(CompleteSystem { mode, rows, caveats })
}
