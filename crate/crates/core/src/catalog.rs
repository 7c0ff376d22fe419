//! Built-in algebras, their subalgebra families and golden outputs.

use std::fmt;

use crate::algdef::{parse_algdef, AlgDef};
use crate::error::{Error, Result};
use crate::expr::Style;
use crate::regular::{complete_system, family_label, AutCollapse, FamilyPlan, Mode, SystemPlan};
use crate::scalar::int;
use crate::transitive::realize_transitive;
use crate::verify;

struct Source {
    key: &'static str,
    text: &'static str,
    realize: &'static str,
    notes: &'static [&'static str],
}

macro_rules! source {
    ($key:literal, $notes:expr) => {
        Source {
            key: $key,
            text: include_str!(concat!("../data/", $key, ".alg")),
            realize: include_str!(concat!("../data/golden/", $key, ".realize.txt")),
            notes: $notes,
        }
    };
}

const SOURCES: &[Source] = &[
    source!("g1", &["one-dimensional algebra"]),
    source!("2g1", &["abelian plane; two charts of the projective line of subalgebras"]),
    source!("3g1", &["abelian, three dimensions; h3 = span{e3 - a e1 - b e2}"]),
    source!("g2.1", &["[e1,e2] = e1; the affine line"]),
    source!("g3.1", &["Heisenberg algebra, [e2,e3] = e1"]),
    source!("sl2", &["[h,e] = 2e, [h,f] = -2f, [e,f] = h with e1 = h, e2 = e, e3 = f"]),
    source!("e2", &["Euclidean plane, [e3,e1] = e2, [e3,e2] = -e1; closed forms involve cos and sin"]),
    source!("g2.1+2g1", &["[e1,e2] = e1 plus a two-dimensional centre; all one-dimensional subalgebras"]),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Table {
    Transitive,
    Inn,
    Strong,
    Aut,
}

impl Table {
    pub const ALL: [Table; 4] = [Table::Transitive, Table::Inn, Table::Strong, Table::Aut];

    pub fn mode(self) -> Option<Mode> {
        match self {
            Table::Transitive => None,
            Table::Inn => Some(Mode::Inn),
            Table::Strong => Some(Mode::Strong),
            Table::Aut => Some(Mode::Aut),
        }
    }
}

impl std::str::FromStr for Table {
    type Err = Error;
    fn from_str(s: &str) -> Result<Table> {
        match s {
            "transitive" => Ok(Table::Transitive),
            other => other.parse::<Mode>().map(|m| match m {
                Mode::Inn => Table::Inn,
                Mode::Strong => Table::Strong,
                Mode::Aut => Table::Aut,
            }),
        }
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode() {
            Some(m) => m.fmt(f),
            None => f.write_str("transitive"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub key: &'static str,
    pub def: AlgDef,
    /// Closed-form realization of every family, as printed by [`render_realizations`].
    pub golden_realizations: &'static str,
    pub notes: Vec<String>,
    pub plan: Option<SystemPlan>,
}

pub fn list() -> Vec<&'static str> {
    SOURCES.iter().map(|s| s.key).collect()
}

fn g21_2g1_plan() -> SystemPlan {
    let c3 = vec![("c".to_string(), vec![int(0), int(1), int(-1)])];
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    SystemPlan {
        r: 3,
        m: 5,
        families: vec![
            FamilyPlan { family: "h1".into(), slots: vec![], inn: vec![], aut: Some(AutCollapse { prefix: 0, choices: vec![] }) },
            FamilyPlan { family: "h2".into(), slots: vec![], inn: c3.clone(), aut: None },
            FamilyPlan {
                family: "h3".into(),
                slots: s(&["a"]),
                inn: c3,
                aut: Some(AutCollapse { prefix: 1, choices: vec![("c".into(), vec![int(0), int(1)])] }),
            },
            FamilyPlan {
                family: "h4".into(),
                slots: s(&["a", "b"]),
                inn: vec![("c".into(), vec![int(0)])],
                aut: Some(AutCollapse { prefix: 2, choices: vec![("c".into(), vec![int(0)])] }),
            },
        ],
        caveats: vec![
            (Mode::Inn, "f is an arbitrary local function with f(0) = 0".into()),
            (Mode::Strong, "f is an arbitrary local function with f(0) = 0".into()),
            (Mode::Aut, "h4^{0,x4,0} is Aut-equivalent to h4^{x4,0,0}".into()),
            (
                Mode::Aut,
                "h4^{x4,f(x4),0} and h4^{x4,g(x4),0} with f(0) = g(0) = 0 are Aut-equivalent iff g(t5*x + t6*f(x)) = t7*x + t8*f(x) for some t5*t8 - t6*t7 != 0"
                    .into(),
            ),
        ],
    }
}

pub fn get(key: &str) -> Result<CatalogEntry> {
    let src = SOURCES.iter().find(|s| s.key == key).ok_or_else(|| Error::NotFound(format!("catalog key `{}`", key)))?;
    let def = parse_algdef(src.text)?;
    Ok(CatalogEntry {
        key: src.key,
        def,
        golden_realizations: src.realize,
        notes: src.notes.iter().map(|s| s.to_string()).collect(),
        plan: (key == "g2.1+2g1").then(g21_2g1_plan),
    })
}

/// Golden copy of a regenerated table, if the entry has one.
pub fn golden_table(key: &str, table: Table) -> Option<&'static str> {
    match (key, table) {
        ("g2.1+2g1", Table::Transitive) => Some(include_str!("../data/golden/g2.1+2g1.transitive.txt")),
        ("g2.1+2g1", Table::Inn) => Some(include_str!("../data/golden/g2.1+2g1.inn.txt")),
        ("g2.1+2g1", Table::Strong) => Some(include_str!("../data/golden/g2.1+2g1.strong.txt")),
        ("g2.1+2g1", Table::Aut) => Some(include_str!("../data/golden/g2.1+2g1.aut.txt")),
        _ => None,
    }
}

/// `[name]` followed by the closed-form realization lines, per family.
pub fn render_realizations(entry: &CatalogEntry) -> Result<String> {
    let mut s = String::new();
    for fam in &entry.def.subalgebras {
        let r = realize_transitive(&entry.def.algebra, fam)?;
        s.push_str(&format!("[{}]\n", fam.name));
        for line in r.render_lines(Style::Plain) {
            s.push_str(&line);
            s.push('\n');
        }
    }
    Ok(s)
}

/// Regenerate a table: transitive rows carry the faithfulness condition,
/// the others come from the complete system of the matching mode.
pub fn render_table(entry: &CatalogEntry, table: Table) -> Result<String> {
    let c = &entry.def.algebra;
    match table.mode() {
        None => {
            let mut s = String::new();
            for fam in &entry.def.subalgebras {
                let r = realize_transitive(c, fam)?;
                let label = family_label(&fam.name, &fam.params, &Default::default());
                s.push_str(&format!(
                    "{} : {} : {}\n",
                    label,
                    r.render_row(Style::Plain),
                    verify::faithful_condition(&r)?
                ));
            }
            Ok(s)
        }
        Some(mode) => {
            let plan = entry
                .plan
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument(format!("{} has no complete-system plan", entry.key)))?;
            Ok(complete_system(c, &entry.def.subalgebras, plan, mode)?.render(Style::Plain))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key() {
        assert_eq!(get("so3").unwrap_err(), Error::NotFound("catalog key `so3`".into()));
        assert_eq!(list().len(), 8);
    }
}
