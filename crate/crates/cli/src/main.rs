use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use quotient_coho::catalog::{find_scenario, load_catalog, verify_catalog, CatalogRow};
use quotient_coho::gmodule::{a_invariant, group_cohomology, jordan_profile, sym2_action, PrimeOrderAction};
use quotient_coho::hilb2::{
    bb_pair, cup_h2, idx_m11, idx_q1q1, idx_q2, pair_h4, quadruple_product, s_lattice_basis, s_lattice_gram, H2Class,
    K3Form, SpanElement, B2,
};
use quotient_coho::normality::{
    check_normality, classify_fixed_point, effective_weight, weight_solve, Criterion, FixedPointLocal, IsolatedGroup,
    NormalityReport,
};
use quotient_coho::quotient::{auto_glue, bb_quotient, compare_lattices, quotient_middle_lattice, Check};
use quotient_coho::scenario::{load_scenario, Scenario};
use quotient_coho::toric::{weight_dim2, weight_lookup};
use quotient_coho::{parse_lattice_expr, smith_normal_form, GramLattice, Matrix};

#[derive(Parser)]
#[command(name = "quotient-coho", version, about = "Integral cohomology of quotients by prime-order automorphisms")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Invariants of a lattice given as an expression or a JSON Gram file
    Lattice {
        input: String,
        /// Print rank, determinant, signature and discriminant group (the default)
        #[arg(long)]
        invariants: bool,
        /// Also print L^∨(p)
        #[arg(long)]
        dual_rescaled: Option<u64>,
    },
    /// Smith normal form of an integer matrix (JSON file)
    Snf { file: PathBuf },
    /// Jordan profile of a prime-order action (JSON matrix acting on columns)
    Jordan {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        prime: u64,
        /// Report the induced action on the symmetric square as well
        #[arg(long)]
        sym2: bool,
    },
    /// Normality report for a scenario file or catalog entry
    Normality {
        scenario: String,
        #[arg(long, default_value = "auto")]
        criterion: Criterion,
    },
    /// Middle or Beauville–Bogomolov lattice of the quotient
    Quotient { scenario: String },
    /// Type and weight of an isolated fixed point 1/p(k1,...,kn)
    Weight {
        #[arg(long)]
        prime: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        exponents: Vec<u64>,
    },
    /// Resolution and weight of the surface singularity 1/p(1,q)
    Weight2d { p: i64, q: i64 },
    /// Products in H*(S^[2]); without classes, the S-lattice
    Hilb2 {
        /// Class as sparse terms, e.g. "g0=1,g1=2,d=1" (gK is the K-th basis vector of H²(S), d is δ)
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        /// JSON file with a 22×22 even unimodular Gram (default U^3+E8(-1)^2)
        #[arg(long)]
        gram: Option<PathBuf>,
    },
    /// Weights of the fixed points of a scenario, solving for unknown ones
    Weights { scenario: String },
    /// List the catalog
    List,
    /// Recompute every catalog entry and compare with its expected block
    VerifyPaper {
        #[arg(long)]
        filter: Option<String>,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Run = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Run {
    let f = cli.format;
    match &cli.command {
        Command::Lattice { input, invariants: _, dual_rescaled } => cmd_lattice(f, input, *dual_rescaled),
        Command::Snf { file } => cmd_snf(f, file),
        Command::Jordan { matrix, prime, sym2 } => cmd_jordan(f, matrix, *prime, *sym2),
        Command::Normality { scenario, criterion } => cmd_normality(f, scenario, *criterion),
        Command::Quotient { scenario } => cmd_quotient(f, scenario),
        Command::Weight { prime, exponents } => cmd_weight(f, *prime, exponents),
        Command::Weight2d { p, q } => cmd_weight2d(f, *p, *q),
        Command::Hilb2 { x, y, gram } => cmd_hilb2(f, x.as_deref(), y.as_deref(), gram.as_deref()),
        Command::Weights { scenario } => cmd_weights(f, scenario),
        Command::List => cmd_list(f),
        Command::VerifyPaper { filter } => cmd_verify(f, filter.as_deref()),
    }
}

fn emit(f: Format, v: &Value, table: impl FnOnce() -> String) {
    match f {
        Format::Json => println!("{}", serde_json::to_string_pretty(v).expect("serializable")),
        Format::Table => print!("{}", table()),
    }
}

fn rows_json(m: &Matrix) -> Value {
    Value::Array(m.row_vecs().iter().map(|r| Value::Array(r.iter().map(|x| json!(x.to_string())).collect())).collect())
}

fn read_matrix(path: &Path) -> Result<Matrix, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)?;
    let rows = v.as_array().ok_or(Failure("expected an array of rows".into()))?;
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().ok_or(Failure(format!("row {i} is not an array")))?;
        let mut row = Vec::new();
        for x in r {
            let s = match x {
                Value::Number(n) => n.to_string(),
                Value::String(s) => s.clone(),
                _ => return Err(Failure(format!("row {i}: entries must be integers"))),
            };
            row.push(s.parse::<BigInt>().map_err(|_| Failure(format!("row {i}: {s} is not an integer")))?);
        }
        out.push(row);
    }
    let cols = out.first().map_or(0, Vec::len);
    if out.iter().any(|r| r.len() != cols) {
        return Err(Failure("rows have different lengths".into()));
    }
    Ok(Matrix::from_row_vecs(out, cols))
}

fn scenario(arg: &str) -> Result<Scenario, Failure> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(load_scenario(path)?);
    }
    let catalog = load_catalog()?;
    find_scenario(&catalog, arg).cloned().ok_or(Failure(format!("no scenario file or catalog entry named {arg}")))
}

fn table(rows: &[(String, String)]) -> String {
    let w = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn lattice_summary(l: &GramLattice) -> (Value, Vec<(String, String)>) {
    let s = l.invariant_summary();
    let parity = if l.is_even() { "even" } else { "odd" };
    let v = json!({
        "gram": rows_json(l.gram()),
        "rank": s.rank,
        "determinant": s.determinant.to_string(),
        "signature": [s.signature.0, s.signature.1],
        "discriminant_group": s.discriminant_group.elementary_divisors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "parity": parity,
    });
    let rows = vec![
        kv("gram", l.gram()),
        kv("rank", s.rank),
        kv("determinant", &s.determinant),
        kv("signature", format!("({}, {})", s.signature.0, s.signature.1)),
        kv("discriminant group", &s.discriminant_group),
        kv("parity", parity),
    ];
    (v, rows)
}

fn cmd_lattice(f: Format, input: &str, dual: Option<u64>) -> Run {
    let l = if Path::new(input).exists() {
        GramLattice::new(read_matrix(Path::new(input))?)?
    } else {
        parse_lattice_expr(input)?
    };
    let (mut v, mut rows) = lattice_summary(&l);
    if let Some(p) = dual {
        let d = l.dual_rescaled(p)?;
        let (dv, drows) = lattice_summary(&d);
        v["dual_rescaled"] = dv;
        rows.push(kv(&format!("L^∨({p})"), ""));
        rows.extend(drows.into_iter().map(|(k, val)| (format!("  {k}"), val)));
    }
    emit(f, &v, || table(&rows));
    Ok(true)
}

fn cmd_snf(f: Format, file: &Path) -> Run {
    let a = read_matrix(file)?;
    let s = smith_normal_form(&a);
    let factors: Vec<String> = s.invariant_factors().iter().map(|x| x.to_string()).collect();
    let v = json!({"u": rows_json(&s.u), "d": rows_json(&s.d), "v": rows_json(&s.v), "invariant_factors": factors});
    emit(f, &v, || {
        table(&[kv("U", &s.u), kv("D", &s.d), kv("V", &s.v), kv("invariant factors", factors.join(", "))])
    });
    Ok(true)
}

fn profile_text(jp: &quotient_coho::gmodule::JordanProfile) -> String {
    let mut parts: Vec<String> = jp.counts.iter().map(|(q, n)| format!("l{q} = {n}")).collect();
    if let (Some(a), Some(b)) = (jp.l1_plus, jp.l1_minus) {
        parts.push(format!("l1+ = {a}, l1- = {b}"));
    }
    parts.join(", ")
}

fn cmd_jordan(f: Format, file: &Path, p: u64, sym2: bool) -> Run {
    let a = PrimeOrderAction::new(p, read_matrix(file)?, None)?;
    let jp = jordan_profile(&a);
    let h1 = group_cohomology(&a, 1)?;
    let h2 = group_cohomology(&a, 2)?;
    let mut v = json!({
        "profile": jp,
        "a_invariant": a_invariant(&a),
        "h1": h1,
        "h2": h2,
    });
    let mut rows = vec![
        kv("profile", profile_text(&jp)),
        kv("a_G", a_invariant(&a)),
        kv("H^1(G, H)", format!("(Z/{p})^{}", h1.torsion_rank)),
        kv("H^2(G, H)", format!("(Z/{p})^{}", h2.torsion_rank)),
    ];
    if sym2 {
        let s = jordan_profile(&sym2_action(&a));
        rows.push(kv("Sym² profile", profile_text(&s)));
        v["sym2_profile"] = serde_json::to_value(&s)?;
    }
    emit(f, &v, || table(&rows));
    Ok(true)
}

fn report_rows(r: &NormalityReport) -> Vec<(String, String)> {
    let mut rows = vec![kv("verdict", r.verdict), kv("degree", r.degree), kv("criterion", &r.criterion)];
    if r.verdict != quotient_coho::normality::Verdict::Normal || r.alpha_bounds != (0, 0) {
        rows.push(kv("alpha", format!("{}..={}", r.alpha_bounds.0, r.alpha_bounds.1)));
    }
    if let Some(c) = r.chain {
        rows.push(kv("chain", format!("{} >= {} >= {}", c.left, c.middle, c.right)));
    }
    if let Some(p) = r.parity_ok {
        rows.push(kv("parity", if p { "ok" } else { "violated" }));
    }
    if let Some(w) = &r.witness {
        rows.push(kv("witness", w));
    }
    for h in &r.hypotheses {
        let mark = if h.holds { "yes" } else { "no" };
        let detail = if h.detail.is_empty() { String::new() } else { format!(" ({})", h.detail) };
        rows.push(kv(&format!("  {}", h.name), format!("{mark}{detail}")));
    }
    rows
}

fn cmd_normality(f: Format, arg: &str, c: Criterion) -> Run {
    let s = scenario(arg)?;
    let r = check_normality(&s, c)?;
    let ok = s.expected.as_ref().and_then(|e| e.verdict).is_none_or(|v| v == r.verdict);
    let mut v = serde_json::to_value(&r)?;
    v["scenario"] = json!(s.name);
    emit(f, &v, || {
        let mut rows = vec![kv("scenario", &s.name)];
        rows.extend(report_rows(&r));
        table(&rows)
    });
    Ok(ok)
}

fn checks_table(checks: &[Check]) -> String {
    let w = checks.iter().map(|c| c.what.len()).max().unwrap_or(0);
    checks
        .iter()
        .map(|c| {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            format!("{mark} {:<w$}  {}  (expected {})\n", c.what, c.found, c.expected)
        })
        .collect()
}

fn cmd_quotient(f: Format, arg: &str) -> Run {
    let s = scenario(arg)?;
    let l = s.invariant_lattice.as_ref().ok_or(Failure(format!("{}: no invariant lattice", s.name)))?;
    let expected = s.expected.as_ref().and_then(|e| e.quotient.as_ref().map(|q| (q, e.exact_gram)));
    let (lattice, extra) = if s.complex_dimension == 2 {
        (quotient_middle_lattice(l, s.prime)?, None)
    } else {
        let glue = match &s.glue {
            Some(g) => g.clone(),
            None => auto_glue(l, s.prime)?,
        };
        let r = bb_quotient(l, s.prime, &glue)?;
        (r.lattice.clone(), Some(r))
    };
    let checks = expected.map(|(q, exact)| compare_lattices(&lattice, q, exact)).unwrap_or_default();
    let ok = checks.iter().all(|c| c.pass);
    let (mut v, mut rows) = lattice_summary(&lattice);
    rows.insert(0, kv("scenario", &s.name));
    if let Some(r) = &extra {
        v["scale"] = json!(r.scale.to_string());
        v["fujiki_constant"] = json!(r.fujiki_constant.to_string());
        rows.push(kv("scale", &r.scale));
        rows.push(kv("Fujiki constant", &r.fujiki_constant));
    }
    v["scenario"] = json!(s.name);
    v["checks"] = serde_json::to_value(&checks)?;
    emit(f, &v, || {
        let mut out = table(&rows);
        if !checks.is_empty() {
            out.push('\n');
            out.push_str(&checks_table(&checks));
        }
        out
    });
    Ok(ok)
}

fn cmd_weight(f: Format, p: u64, exponents: &[u64]) -> Run {
    let fp = FixedPointLocal::new(p, exponents.to_vec()).map_err(Failure)?;
    let (t, smooth) = classify_fixed_point(&fp);
    let mut w = weight_lookup(&fp);
    let mut hj = None;
    if fp.dimension() == 2 && fp.zeros() == 0 && p > 2 {
        // 1/p(a,b) = 1/p(1, b·a⁻¹)
        let a = fp.exponents[0] as i64;
        let inv = (1..p as i64).find(|x| (x * a) % p as i64 == 1).expect("p prime");
        let q = (fp.exponents[1] as i64 * inv) % p as i64;
        let (val, comp) = weight_dim2(p as i64, q)?;
        w = val;
        hj = Some((q, comp.fan.rays.len()));
    }
    let v = json!({"point": fp.to_string(), "type": format!("{t:?}"), "quotient_smooth": smooth, "weight": w});
    emit(f, &v, || {
        let mut rows =
            vec![kv("point", &fp), kv("type", format!("{t:?}")), kv("quotient smooth", smooth), kv("weight", w)];
        if let Some((q, _)) = hj {
            rows.push(kv("surface model", format!("1/{p}(1,{q})")));
        }
        table(&rows)
    });
    Ok(true)
}

fn cmd_weight2d(f: Format, p: i64, q: i64) -> Run {
    let (w, c) = weight_dim2(p, q)?;
    let hj = quotient_coho::toric::hj_expand(p, q)?;
    let v = json!({
        "p": p, "q": q, "hj": hj, "weight": w, "case": c.case.to_string(),
        "log_discr_exceptional": c.log_discr_exceptional,
        "log_discr_boundary": c.log_discr_boundary,
        "log_glue_index": c.log_glue_index,
        "torsion_rank": c.torsion_rank,
        "rays": c.fan.rays,
    });
    emit(f, &v, || {
        let hjs: Vec<String> = hj.iter().map(|a| a.to_string()).collect();
        let rays: Vec<String> = c.fan.rays.iter().map(|r| format!("({},{})", r[0], r[1])).collect();
        table(&[
            kv("singularity", format!("1/{p}(1,{q})")),
            kv("HJ", format!("[{}]", hjs.join(","))),
            kv("weight", w),
            kv("case", c.case),
            kv("log discr exceptional", c.log_discr_exceptional),
            kv("log discr boundary", c.log_discr_boundary),
            kv("log glue index", c.log_glue_index),
            kv("fan", rays.join(" ")),
        ])
    });
    Ok(true)
}

fn parse_class(text: &str) -> Result<H2Class, Failure> {
    let mut c = H2Class::new(vec![BigInt::zero(); B2], BigInt::zero());
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = tok.split_once('=').ok_or(Failure(format!("term {tok} is not key=value")))?;
        let v: BigInt = v.trim().parse().map_err(|_| Failure(format!("{v} is not an integer")))?;
        match k.trim() {
            "d" => c.delta += v,
            g if g.starts_with('g') => {
                let i: usize = g[1..].parse().map_err(|_| Failure(format!("bad index in {g}")))?;
                if i >= B2 {
                    return Err(Failure(format!("index {i} outside 0..{B2}")));
                }
                c.gamma[i] += v;
            }
            other => return Err(Failure(format!("unknown coordinate {other}"))),
        }
    }
    Ok(c)
}

fn h4_terms(c: &quotient_coho::hilb2::H4Class) -> Vec<(String, String)> {
    let mut out = Vec::new();
    if !c.coords[0].is_zero() {
        out.push(("sigma".to_string(), c.coords[0].to_string()));
    }
    for k in 0..B2 {
        if !c.coords[idx_q2(k)].is_zero() {
            out.push((format!("q2(a{k})"), c.coords[idx_q2(k)].to_string()));
        }
    }
    for k in 0..B2 {
        for m in (k + 1)..B2 {
            let x = &c.coords[idx_q1q1(k, m)];
            if !x.is_zero() {
                out.push((format!("q1(a{k})q1(a{m})"), x.to_string()));
            }
        }
    }
    for k in 0..B2 {
        if !c.coords[idx_m11(k)].is_zero() {
            out.push((format!("m11(a{k})"), c.coords[idx_m11(k)].to_string()));
        }
    }
    out
}

fn cmd_hilb2(f: Format, x: Option<&str>, y: Option<&str>, gram: Option<&Path>) -> Run {
    let k = match gram {
        Some(p) => K3Form::new(read_matrix(p)?)?,
        None => K3Form::standard(),
    };
    match (x, y) {
        (None, None) => {
            let (g, det) = s_lattice_gram(&k, &s_lattice_basis())?;
            let labels = ["delta^2", "u1u2", "sigma", "u1^2", "u2^2", "u1 delta", "u2 delta"];
            let v = json!({"basis": labels, "gram": rows_json(&g), "determinant": det.to_string(), "paper_determinant": "48"});
            emit(f, &v, || {
                table(&[
                    kv("basis", labels.join(", ")),
                    kv("gram", &g),
                    kv("determinant", &det),
                    kv("paper states", "48"),
                ])
            });
            Ok(true)
        }
        (Some(xs), ys) => {
            let a = parse_class(xs)?;
            let b = match ys {
                Some(t) => parse_class(t)?,
                None => a.clone(),
            };
            let prod = cup_h2(&a, &b, &k)?;
            let terms = h4_terms(&prod);
            let ab = SpanElement::product(a.clone(), b.clone());
            let v = json!({
                "bb": bb_pair(&k, &a, &b).to_string(),
                "product": terms.iter().map(|(l, c)| json!({"basis": l, "coefficient": c})).collect::<Vec<_>>(),
                "sigma_pairing": pair_h4(&k, &SpanElement::sigma(), &ab)?.to_string(),
                "square": quadruple_product(&k, [&a, &b, &a, &b]).to_string(),
            });
            emit(f, &v, || {
                let expansion: Vec<String> = terms.iter().map(|(l, c)| format!("{c}·{l}")).collect();
                table(&[
                    kv("B(x, y)", bb_pair(&k, &a, &b)),
                    kv("x·y", if expansion.is_empty() { "0".into() } else { expansion.join(" + ") }),
                    kv("sigma·(x·y)", pair_h4(&k, &SpanElement::sigma(), &ab).map_err(Failure::from).map(|v| v.to_string()).unwrap_or_default()),
                    kv("(x·y)^2", quadruple_product(&k, [&a, &b, &a, &b])),
                ])
            });
            Ok(true)
        }
        (None, Some(_)) => Err(Failure("--y needs --x".into())),
    }
}

fn cmd_weights(f: Format, arg: &str) -> Run {
    let s = scenario(arg)?;
    let known: Vec<(String, u64, String)> = s
        .fixed_locus
        .isolated
        .iter()
        .map(|g: &IsolatedGroup| {
            let label = g.point.as_ref().map_or("unlabelled".to_string(), |p| p.to_string());
            (label, g.count, effective_weight(g, s.complex_dimension).to_string())
        })
        .collect();
    let solved = weight_solve(&s);
    let mut v = json!({
        "scenario": s.name,
        "points": known.iter().map(|(l, c, w)| json!({"point": l, "count": c, "weight": w})).collect::<Vec<_>>(),
    });
    let mut rows = vec![kv("scenario", &s.name)];
    rows.extend(known.iter().map(|(l, c, w)| kv(&format!("{c} × {l}"), w)));
    match &solved {
        Ok(sol) => {
            v["solution"] = serde_json::to_value(sol)?;
            rows.push(kv("admissible assignments", sol.admissible_assignments));
            rows.extend(sol.variables.iter().map(|x| kv(&format!("solved {}", x.label), x.value)));
        }
        Err(e) => {
            v["solution_error"] = json!(e.to_string());
            rows.push(kv("solver", e));
        }
    }
    emit(f, &v, || table(&rows));
    Ok(solved.is_ok())
}

fn cmd_list(f: Format) -> Run {
    let c = load_catalog()?;
    let v = Value::Array(
        c.iter()
            .map(|s| json!({"name": s.name, "aliases": s.aliases, "prime": s.prime, "dimension": s.complex_dimension, "source": s.source}))
            .collect(),
    );
    emit(f, &v, || {
        let rows: Vec<(String, String)> = c
            .iter()
            .map(|s| (s.name.clone(), format!("p = {:<2}  dim {}  {}", s.prime, s.complex_dimension, s.source.clone().unwrap_or_default())))
            .collect();
        table(&rows)
    });
    Ok(true)
}

fn verify_table(rows: &[CatalogRow]) -> String {
    let w = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in rows {
        let status = if r.reference_only {
            "ref "
        } else if r.pass {
            "pass"
        } else {
            "FAIL"
        };
        let summary: Vec<String> = r
            .checks
            .iter()
            .filter(|c| matches!(c.what.as_str(), "verdict" | "criterion" | "Fujiki constant" | "b2, b4, euler" | "chain" | "alpha"))
            .map(|c| format!("{} {}", c.what, c.found))
            .collect();
        out.push_str(&format!("{status}  {:<w$}  {:>2} checks  {}\n", r.name, r.checks.len(), summary.join("; ")));
        if let Some(msg) = r.first_failure() {
            out.push_str(&format!("      first failure: {msg}\n"));
        }
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    out.push_str(&format!("{} rows, {} failed\n", rows.len(), failed));
    out
}

fn cmd_verify(f: Format, filter: Option<&str>) -> Run {
    let catalog = load_catalog()?;
    let rows = verify_catalog(&catalog, filter);
    if rows.is_empty() {
        return Err(Failure(format!("no catalog entry matches {}", filter.unwrap_or(""))));
    }
    let ok = rows.iter().all(|r| r.pass);
    emit(f, &serde_json::to_value(&rows)?, || verify_table(&rows));
    if !ok {
        if let Some(r) = rows.iter().find(|r| !r.pass) {
            eprintln!("first failing row: {}", r.name);
        }
    }
    Ok(ok)
}
