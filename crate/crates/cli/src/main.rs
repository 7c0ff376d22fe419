use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lierea_core::algdef::{parse_algdef, parse_realization, AlgDef};
use lierea_core::catalog::{self, Table};
use lierea_core::expr::render_expr;
use lierea_core::liealg::{apply_aut, is_subalgebra, span_equal, AutMatrix, SubalgebraFamily};
use lierea_core::regular::{
    complete_system, extend_regular, parse_pattern, AutCollapse, FamilyPlan, Mode, ParamAssignment, SystemPlan,
};
use lierea_core::transitive::{realize_series, realize_transitive};
use lierea_core::verify;
use lierea_core::{Error, Expr, Matrix, Rational, Realization, Style};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "lierea", version, about = "Exact realizations of Lie algebras by vector fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Closed,
    Series,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strong,
    Inn,
    Aut,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableArg {
    Transitive,
    Inn,
    Strong,
    Aut,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check antisymmetry, Jacobi and closure of every subalgebra family.
    Validate { file: String },
    /// Print the adjoint matrices.
    Adjoint { file: String },
    /// Transitive realization attached to a subalgebra family.
    Realize {
        /// Definition file or catalog key.
        file: String,
        #[arg(long)]
        sub: String,
        #[arg(long, value_enum, default_value = "closed")]
        backend: BackendArg,
        /// Series truncation order (default: LIEREA_SERIES_ORDER or 6).
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, conflicts_with = "json")]
        latex: bool,
        #[arg(long)]
        json: bool,
        /// Emit a realization file that `verify` reads back.
        #[arg(long, conflicts_with_all = ["json", "latex"])]
        emit: bool,
    },
    /// Regular realizations on more variables through normal-form assignments.
    Extend {
        file: String,
        #[arg(long)]
        sub: String,
        #[arg(long)]
        vars: usize,
        #[arg(long, value_enum, default_value = "inn")]
        mode: ModeArg,
        /// Number of leading parameters set to zero in aut mode.
        #[arg(long, default_value_t = 0)]
        collapse: usize,
        /// `all` or a slot pattern such as `F,O`.
        #[arg(long, default_value = "all")]
        assignments: String,
        #[arg(long, conflicts_with = "json")]
        latex: bool,
        #[arg(long)]
        json: bool,
    },
    /// Homomorphism, rank and faithfulness report for a realization file.
    Verify { file: String },
    /// Image of a subalgebra family under an automorphism.
    ApplyAut {
        file: String,
        #[arg(long)]
        sub: String,
        /// n*n rationals, row-major, separated by spaces or commas.
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Built-in algebras.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Regenerate tables and compare them with the golden copies.
    Tables {
        key: String,
        #[arg(long, value_enum)]
        mode: Option<TableArg>,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
    Show { key: String },
}

/// Failure with its exit code.
struct Fail {
    code: u8,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match &e {
            Error::Syntax { .. } | Error::Semantic { .. } => 4,
            Error::ClosedFormUnavailable(_) => 3,
            Error::InvalidArgument(_) | Error::NotFound(_) => 1,
            _ => 2,
        };
        let mut msg = e.to_string();
        if code == 3 {
            msg.push_str("\nhint: retry with --backend series");
        }
        Fail { code, msg }
    }
}

fn fail(code: u8, msg: impl Into<String>) -> Fail {
    Fail { code, msg: msg.into() }
}

type Res<T> = Result<T, Fail>;

/// A definition file, or a catalog key when no such file exists.
fn load(src: &str) -> Res<AlgDef> {
    if Path::new(src).is_file() {
        let text = std::fs::read_to_string(src).map_err(|e| fail(1, format!("{}: {}", src, e)))?;
        return Ok(parse_algdef(&text)?);
    }
    match catalog::get(src) {
        Ok(e) => Ok(e.def),
        Err(_) => Err(fail(1, format!("{}: no such file or catalog entry", src))),
    }
}

fn series_order(flag: Option<u32>) -> Res<u32> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("LIEREA_SERIES_ORDER") {
        Ok(v) => v.trim().parse().map_err(|_| fail(1, format!("LIEREA_SERIES_ORDER: `{}` is not an order", v))),
        Err(_) => Ok(6),
    }
}

fn style(latex: bool) -> Style {
    if latex {
        Style::Latex
    } else {
        Style::Plain
    }
}

#[derive(Serialize)]
struct AlgebraJson {
    name: String,
    dim: usize,
    basis: Vec<String>,
}

#[derive(Serialize)]
struct FieldJson {
    generator: String,
    field: String,
    components: Vec<String>,
}

#[derive(Serialize)]
struct VerificationJson {
    passed: bool,
    residuals: Vec<String>,
}

#[derive(Serialize)]
struct ProvenanceJson {
    subalgebra: String,
    label: String,
    params: Vec<String>,
    assignment: Option<String>,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct RealizationJson {
    algebra: AlgebraJson,
    backend: String,
    vars: usize,
    fields: Vec<FieldJson>,
    verification: VerificationJson,
    rank_at_origin: Option<usize>,
    generic_rank: usize,
    faithful: String,
    kernel: Vec<Vec<String>>,
    provenance: ProvenanceJson,
}

fn to_json(r: &Realization) -> Res<RealizationJson> {
    let residuals = verify::check_homomorphism(r)?;
    let rank_at_origin = verify::rank_at_origin(r).ok();
    Ok(RealizationJson {
        algebra: AlgebraJson {
            name: r.algebra.name.clone(),
            dim: r.algebra.dim(),
            basis: r.algebra.basis_names.clone(),
        },
        backend: r.backend.to_string(),
        vars: r.m,
        fields: r
            .fields
            .iter()
            .enumerate()
            .map(|(i, f)| FieldJson {
                generator: r.algebra.basis_names[i].clone(),
                field: f.render(Style::Plain),
                components: f.components.iter().map(|c| c.to_string()).collect(),
            })
            .collect(),
        verification: VerificationJson {
            passed: residuals.is_empty(),
            residuals: residuals.iter().map(|x| x.to_string()).collect(),
        },
        rank_at_origin,
        generic_rank: verify::generic_rank(r),
        faithful: verify::faithful_condition(r)?.to_string(),
        kernel: verify::kernel(r).iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect(),
        provenance: ProvenanceJson {
            subalgebra: r.provenance.subalgebra.clone(),
            label: r.provenance.label.clone(),
            params: r.provenance.params.clone(),
            assignment: r.provenance.assignment.clone(),
            notes: r.provenance.notes.clone(),
        },
    })
}

fn print_json<T: Serialize>(v: &T) -> Res<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| fail(2, e.to_string()))?;
    println!("{}", s);
    Ok(())
}

fn validate(file: &str) -> Res<()> {
    let def = load(file)?;
    let report = def.algebra.validate();
    print!("{}: {}", def.algebra.name, report);
    let mut ok = report.is_valid();
    for fam in &def.subalgebras {
        match is_subalgebra(&def.algebra, fam) {
            Ok((true, _)) => println!("subalgebra {}: closed", fam.name),
            Ok((false, _)) => {
                println!("subalgebra {}: not closed under the bracket", fam.name);
                ok = false;
            }
            Err(e) => {
                println!("subalgebra {}: {}", fam.name, e);
                ok = false;
            }
        }
    }
    if ok {
        Ok(())
    } else {
        Err(fail(2, "validation failed"))
    }
}

fn adjoint(file: &str) -> Res<()> {
    let def = load(file)?;
    let c = &def.algebra;
    for i in 0..c.dim() {
        println!("ad({}) =", c.basis_names[i]);
        print!("{}", c.adjoint(i)?);
    }
    Ok(())
}

fn realize(file: &str, sub: &str, backend: BackendArg, order: Option<u32>, out: Output) -> Res<()> {
    let def = load(file)?;
    let fam = def.subalgebra(sub)?;
    let r = match backend {
        BackendArg::Closed => realize_transitive(&def.algebra, fam)?,
        BackendArg::Series => realize_series(&def.algebra, fam, series_order(order)?)?,
    };
    match out {
        Output::Json => print_json(&to_json(&r)?)?,
        Output::Emit => {
            let head = AlgDef { algebra: r.algebra.clone(), params: r.provenance.params.clone(), subalgebras: vec![] };
            print!("{}", head.print());
            println!("vars {}", r.m);
            for line in r.render_lines(Style::Plain) {
                println!("{}", line);
            }
        }
        Output::Text(st) => {
            for line in r.render_lines(st) {
                println!("{}", line);
            }
        }
    }
    let residuals = verify::check_homomorphism(&r)?;
    if residuals.is_empty() {
        Ok(())
    } else {
        Err(fail(2, format!("homomorphism check failed with {} nonzero residual(s)", residuals.len())))
    }
}

#[derive(Clone, Copy)]
enum Output {
    Text(Style),
    Json,
    Emit,
}

#[allow(clippy::too_many_arguments)]
fn extend(
    file: &str,
    sub: &str,
    vars: usize,
    mode: ModeArg,
    collapse: usize,
    assignments: &str,
    latex: bool,
    json: bool,
) -> Res<()> {
    let def = load(file)?;
    let fam = def.subalgebra(sub)?;
    let mode = match mode {
        ModeArg::Strong => Mode::Strong,
        ModeArg::Inn => Mode::Inn,
        ModeArg::Aut => Mode::Aut,
    };
    let prefix = if mode == Mode::Aut { collapse } else { 0 };
    if prefix > fam.params.len() {
        return Err(fail(1, format!("--collapse {} exceeds the {} parameters of {}", collapse, fam.params.len(), sub)));
    }
    let rows: Vec<Realization> = if assignments == "all" {
        let base = realize_transitive(&def.algebra, fam)?;
        let plan = SystemPlan {
            r: base.m,
            m: vars,
            families: vec![FamilyPlan {
                family: fam.name.clone(),
                slots: fam.params.clone(),
                inn: vec![],
                aut: Some(AutCollapse { prefix, choices: vec![] }),
            }],
            caveats: vec![],
        };
        complete_system(&def.algebra, &def.subalgebras, &plan, mode)?.rows.into_iter().map(|r| r.result).collect()
    } else {
        let kinds = parse_pattern(assignments)?;
        let offsets: Vec<Expr> =
            fam.params.iter().enumerate().map(|(j, p)| if j < prefix { Expr::zero() } else { Expr::param(p) }).collect();
        let a = ParamAssignment::from_kinds(&kinds)?.with_offsets(&offsets)?;
        let base = realize_transitive(&def.algebra, fam)?;
        vec![extend_regular(&base, &fam.params, &a, vars)?.result]
    };
    if json {
        let out = rows.iter().map(to_json).collect::<Res<Vec<_>>>()?;
        return print_json(&out);
    }
    for r in &rows {
        println!("{} : {}", r.provenance.label, r.render_row(style(latex)));
    }
    Ok(())
}

fn verify_file(file: &str) -> Res<()> {
    let text = std::fs::read_to_string(file).map_err(|e| fail(1, format!("{}: {}", file, e)))?;
    let r = parse_realization(&text)?.realization();
    let residuals = verify::check_homomorphism(&r)?;
    if residuals.is_empty() {
        println!("homomorphism: pass");
    } else {
        println!("homomorphism: FAIL");
        for x in &residuals {
            println!("  {}", x);
        }
    }
    match verify::rank_at_origin(&r) {
        Ok(k) => {
            println!("rank at origin: {}", k);
            println!("generic rank: {}", verify::generic_rank(&r));
            println!("regular at origin: {}", if k == verify::generic_rank(&r) { "yes" } else { "no" });
            println!("transitive: {}", if k == r.m { "yes" } else { "no" });
        }
        Err(e) => {
            println!("rank at origin: undefined ({})", e);
            println!("generic rank: {}", verify::generic_rank(&r));
        }
    }
    let ker = verify::kernel(&r);
    if ker.is_empty() {
        println!("kernel: 0");
    } else {
        let vs: Vec<String> =
            ker.iter().map(|v| format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))).collect();
        println!("kernel: span{{{}}}", vs.join(", "));
    }
    println!("faithful: {}", verify::faithful_condition(&r)?);
    if residuals.is_empty() {
        Ok(())
    } else {
        Err(fail(2, "verification failed"))
    }
}

fn parse_matrix(src: &str, n: usize) -> Res<Matrix<Rational>> {
    let vals = src
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Rational>().map_err(|_| fail(1, format!("`{}` is not a rational number", s))))
        .collect::<Res<Vec<_>>>()?;
    if vals.len() != n * n {
        return Err(fail(1, format!("expected {} entries, found {}", n * n, vals.len())));
    }
    Ok(Matrix::from_fn(n, n, |i, j| vals[i * n + j].clone()))
}

fn print_family(f: &SubalgebraFamily) -> String {
    let vs: Vec<String> = f
        .basis
        .iter()
        .map(|v| v.iter().map(|e| render_expr(e, Style::Plain).replace(' ', "")).collect::<Vec<_>>().join(","))
        .collect();
    format!("{} = span({})", f.name, vs.join("; "))
}

fn apply_aut_cmd(file: &str, sub: &str, matrix: &str, expect: Option<&str>) -> Res<()> {
    let def = load(file)?;
    let fam = def.subalgebra(sub)?;
    let a = AutMatrix::new(&def.algebra, parse_matrix(matrix, def.algebra.dim())?)?;
    let image = apply_aut(&def.algebra, &a, fam)?;
    println!("{}", print_family(&image));
    if let Some(name) = expect {
        let other = def.subalgebra(name)?;
        if span_equal(&image.basis, &other.basis) {
            println!("span equal to {}: yes", name);
        } else {
            println!("span equal to {}: no", name);
            return Err(fail(2, "spans differ"));
        }
    }
    Ok(())
}

fn catalog_cmd(cmd: &CatalogCmd) -> Res<()> {
    match cmd {
        CatalogCmd::List => {
            for key in catalog::list() {
                let e = catalog::get(key)?;
                println!("{:<10} {}", key, e.notes.join("; "));
            }
        }
        CatalogCmd::Show { key } => {
            let e = catalog::get(key)?;
            for n in &e.notes {
                println!("# {}", n);
            }
            print!("{}", e.def.print());
        }
    }
    Ok(())
}

fn line_diff(want: &str, got: &str) -> String {
    let (w, g): (Vec<&str>, Vec<&str>) = (want.lines().collect(), got.lines().collect());
    let mut out = String::new();
    for i in 0..w.len().max(g.len()) {
        match (w.get(i), g.get(i)) {
            (Some(a), Some(b)) if a == b => {}
            (a, b) => {
                if let Some(a) = a {
                    out.push_str(&format!("-{}\n", a));
                }
                if let Some(b) = b {
                    out.push_str(&format!("+{}\n", b));
                }
            }
        }
    }
    out
}

fn tables(key: &str, mode: Option<TableArg>) -> Res<()> {
    let e = catalog::get(key)?;
    let selected: Vec<Table> = match mode {
        Some(m) => vec![match m {
            TableArg::Transitive => Table::Transitive,
            TableArg::Inn => Table::Inn,
            TableArg::Strong => Table::Strong,
            TableArg::Aut => Table::Aut,
        }],
        None => Table::ALL.into_iter().filter(|t| *t == Table::Transitive || e.plan.is_some()).collect(),
    };
    let mut mismatch = Vec::new();
    for t in &selected {
        let text = catalog::render_table(&e, *t)?;
        if selected.len() > 1 {
            println!("## {}", t);
        }
        print!("{}", text);
        if let Some(g) = catalog::golden_table(key, *t) {
            if g != text {
                eprint!("{} table differs from golden:\n{}", t, line_diff(g, &text));
                mismatch.push(t.to_string());
            }
        }
    }
    if mismatch.is_empty() {
        Ok(())
    } else {
        Err(fail(2, format!("golden mismatch: {}", mismatch.join(", "))))
    }
}

fn run(cli: Cli) -> Res<()> {
    match cli.cmd {
        Cmd::Validate { file } => validate(&file),
        Cmd::Adjoint { file } => adjoint(&file),
        Cmd::Realize { file, sub, backend, order, latex, json, emit } => {
            let out = if json {
                Output::Json
            } else if emit {
                Output::Emit
            } else {
                Output::Text(style(latex))
            };
            realize(&file, &sub, backend, order, out)
        }
        Cmd::Extend { file, sub, vars, mode, collapse, assignments, latex, json } => {
            extend(&file, &sub, vars, mode, collapse, &assignments, latex, json)
        }
        Cmd::Verify { file } => verify_file(&file),
        Cmd::ApplyAut { file, sub, matrix, expect } => apply_aut_cmd(&file, &sub, &matrix, expect.as_deref()),
        Cmd::Catalog { cmd } => catalog_cmd(&cmd),
        Cmd::Tables { key, mode } => tables(&key, mode),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
