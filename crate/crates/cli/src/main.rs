//! `cmbrauer`: reports on Brauer groups of CM products and the 3-adic
//! certificate, as text or canonical JSON.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cmbrauer::brauer::{
    classify_family, geometric_structure, link_report, transcendental_structure,
};
use cmbrauer::grossenchar::{estimate_m, sample_psi, witness_prime};
use cmbrauer::localpadic::{kummer3_pipeline, tate_algorithm, FpFlag, RationalCurve};
use cmbrauer::matrixcert::certify;
use cmbrauer::quadfield::{class_number_order, reduced_form_count};
use cmbrauer::{CurveContext, Error, Family, ImQuadField, OrderInField, Provenance};
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(
    name = "cmbrauer",
    version,
    about = "Transcendental Brauer groups of CM products E x E"
)]
struct Cli {
    /// Emit the canonical JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Only the one-line summary (ignored with --json).
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// m(l) table and Brauer structures for y^2 = x^3 + D or y^2 = x^3 - Dx.
    Classify {
        #[command(subcommand)]
        family: FamilyCmd,
    },
    /// Structures at one prime from user-supplied data.
    Structure {
        #[arg(long, allow_negative_numbers = true)]
        disc: i64,
        /// An integer, or `auto` for m = n(l) with L inside the Hilbert class field.
        #[arg(long)]
        m: String,
        #[arg(long, value_enum)]
        case: Case,
        #[arg(long)]
        full_2_torsion: bool,
        #[arg(long)]
        ell: u64,
    },
    /// Class number of the order of conductor c, by formula and by forms.
    OrderH {
        #[arg(long, allow_negative_numbers = true)]
        disc: i64,
        #[arg(long)]
        conductor: u64,
    },
    /// Grössencharacter sampling.
    Gross {
        #[command(subcommand)]
        cmd: GrossCmd,
    },
    /// Exhaustive checks.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Tate's algorithm on an integral Weierstrass model.
    Tate {
        /// a1,a2,a3,a4,a6
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            num_args = 1
        )]
        model: Vec<i64>,
        #[arg(long)]
        p: u64,
    },
    /// Local analysis.
    Local {
        #[command(subcommand)]
        cmd: LocalCmd,
    },
}

#[derive(Subcommand, Debug)]
enum FamilyCmd {
    J0(DArg),
    J1728(DArg),
}

#[derive(Args, Debug)]
struct DArg {
    #[arg(long = "D", allow_negative_numbers = true)]
    d: i64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Case {
    /// K is contained in L.
    In,
    Out,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyKind {
    J0,
    J1728,
}

#[derive(Subcommand, Debug)]
enum GrossCmd {
    Sample {
        #[arg(long, value_enum)]
        family: FamilyKind,
        #[arg(long = "D", allow_negative_numbers = true)]
        d: i64,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        bound: u64,
        /// Largest membership level tested.
        #[arg(long, default_value_t = 8)]
        cap: u32,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    Matrix {
        #[arg(long, allow_negative_numbers = true)]
        disc: i64,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        m: u32,
    },
}

#[derive(Subcommand, Debug)]
enum LocalCmd {
    Kummer3 {
        #[arg(long, value_enum, default_value = "auto")]
        fp_flag: FpArg,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FpArg {
    Auto,
    Assume,
}

struct Report {
    command: String,
    inputs: Value,
    results: Value,
    citations: Vec<&'static str>,
    provenance: Value,
    summary: String,
    /// Printed but signalled as withheld.
    withheld: bool,
}

impl Report {
    fn to_value(&self) -> Value {
        canonical(json!({
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "citations": self.citations,
            "provenance": self.provenance,
        }))
    }
}

/// Rebuilds objects with sorted keys regardless of serde_json's map flavour.
fn canonical(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let sorted: BTreeMap<String, Value> =
                m.into_iter().map(|(k, v)| (k, canonical(v))).collect();
            Value::Object(sorted.into_iter().collect::<Map<String, Value>>())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        v => v,
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialise")
}

fn provenance(pairs: &[(&str, Provenance)]) -> Value {
    Value::Object(
        pairs
            .iter()
            .map(|(k, p)| (k.to_string(), json!(p.to_string())))
            .collect(),
    )
}

fn classify(family: Family) -> Report {
    let c = classify_family(&family);
    let summary = format!(
        "Br/Br1 = {}; Br(Ebar x Ebar)^Gamma = {}",
        c.transcendental, c.geometric
    );
    let (name, d) = match family {
        Family::J0(x) => ("j0", x.raw_d),
        Family::J1728(x) => ("j1728", x.raw_d),
    };
    Report {
        command: format!("classify {name}"),
        inputs: json!({ "D": d }),
        results: to_json(&c),
        citations: vec![
            "m(l) closed form for the j = 0 and j = 1728 families",
            "structure of Br/Br1 and of the Galois-invariant geometric Brauer group",
        ],
        provenance: provenance(&[
            ("m", Provenance::ClosedForm),
            ("transcendental", Provenance::ClosedForm),
            ("geometric", Provenance::ClosedForm),
            ("odd_c", Provenance::ClosedForm),
        ]),
        summary,
        withheld: false,
    }
}

fn structure(disc: i64, m: &str, case: Case, full: bool, ell: u64) -> Result<Report, Error> {
    let link = link_report(disc, ell)?;
    let (m_value, prov) = if m == "auto" {
        if ImQuadField::from_disc(disc)?.unit_count() != 2 {
            return Err(Error::InvalidInput(format!(
                "--m auto needs O_K^* = {{+-1}}; n({ell}) = {} is only an upper bound for disc {disc}",
                link.n.value()
            )));
        }
        (link.n.value(), Provenance::ClosedForm)
    } else {
        let v = m.parse::<u32>().map_err(|_| {
            Error::InvalidInput(format!(
                "--m expects a non-negative integer or `auto`, got {m:?}"
            ))
        })?;
        (v, Provenance::UserSupplied)
    };
    let ctx = CurveContext::new(
        disc,
        matches!(case, Case::In),
        BTreeMap::from([(ell, m_value)]),
        full,
        prov,
    )?;
    let t = transcendental_structure(&ctx, ell)?;
    let g = geometric_structure(&ctx, ell)?;
    Ok(Report {
        command: "structure".into(),
        inputs: json!({
            "disc": disc, "m": m, "case": format!("{case:?}").to_lowercase(),
            "full_2_torsion": full, "ell": ell,
        }),
        results: json!({
            "m": m_value,
            "transcendental": to_json(&t),
            "geometric": to_json(&g),
            "link": to_json(&link),
        }),
        citations: vec!["structure of Br/Br1 and of the Galois-invariant geometric Brauer group"],
        provenance: provenance(&[
            ("m", prov),
            ("transcendental", Provenance::ClosedForm),
            ("geometric", Provenance::ClosedForm),
            ("link", Provenance::ClosedForm),
        ]),
        summary: format!("Br/Br1[{ell}^inf] = {t}; geometric = {g}"),
        withheld: false,
    })
}

fn order_h(disc: i64, conductor: u64) -> Result<Report, Error> {
    let order = OrderInField::new(ImQuadField::from_disc(disc)?, conductor)?;
    let h = class_number_order(&order);
    let forms = reduced_form_count(order.disc());
    Ok(Report {
        command: "order-h".into(),
        inputs: json!({ "disc": disc, "conductor": conductor }),
        results: json!({
            "order_disc": order.disc(),
            "class_number": h,
            "reduced_forms": forms,
            "agree": h == forms,
        }),
        citations: vec!["class number formula for orders"],
        provenance: provenance(&[
            ("class_number", Provenance::ClosedForm),
            ("reduced_forms", Provenance::Exhaustive),
        ]),
        summary: format!("h(O_{conductor}) = {h} (reduced forms: {forms})"),
        withheld: false,
    })
}

fn gross_sample(kind: FamilyKind, d: i64, ell: u64, bound: u64, cap: u32) -> Result<Report, Error> {
    let family = match kind {
        FamilyKind::J0 => Family::j0(d)?,
        FamilyKind::J1728 => Family::j1728(d)?,
    };
    if !cmbrauer::arith::is_prime(ell) {
        return Err(Error::InvalidInput(format!("{ell} is not prime")));
    }
    let estimate = estimate_m(&family, ell, bound, cap)?;
    let closed = CurveContext::for_family(&family).m_of(ell)?;
    let samples = sample_psi(&family, &[ell], bound, cap);
    let witness = match ell {
        2 | 3 => witness_prime(&family, ell, None, bound)?,
        _ => None,
    };
    let family_name = match kind {
        FamilyKind::J0 => "j0",
        FamilyKind::J1728 => "j1728",
    };
    let samples: Vec<Value> = samples
        .iter()
        .map(|s| {
            json!({
                "q": s.prime_norm,
                "pi": s.pi_primary.to_string(),
                "psi": s.psi_value.to_string(),
                "level": s.max_k_membership[&ell],
            })
        })
        .collect();
    Ok(Report {
        command: "gross sample".into(),
        inputs: json!({ "family": family_name, "D": d, "ell": ell, "bound": bound, "cap": cap }),
        results: json!({
            "sample_count": estimate.sample_count,
            "max_consistent_k": estimate.max_consistent_k,
            "attaining": estimate.attaining,
            "m_closed_form": closed,
            "witness": witness.map(|w| json!({
                "q": w.prime_norm, "pi": w.pi_primary.to_string(), "psi": w.psi_value.to_string(),
            })),
            "samples": samples,
        }),
        citations: vec!["Grössencharacter of y^2 = x^3 + D and y^2 = x^3 - Dx via residue symbols"],
        provenance: provenance(&[
            ("max_consistent_k", Provenance::Empirical),
            ("samples", Provenance::Empirical),
            ("witness", Provenance::Exhaustive),
            ("m_closed_form", Provenance::ClosedForm),
        ]),
        summary: format!(
            "{} samples up to {bound}: min level {} (closed form m({ell}) = {closed})",
            estimate.sample_count, estimate.max_consistent_k
        ),
        withheld: false,
    })
}

fn verify_matrix(disc: i64, ell: u64, k: u32, m: u32) -> Result<Report, Error> {
    let cert = certify(disc, ell, k, m)?;
    Ok(Report {
        command: "verify matrix".into(),
        inputs: json!({ "disc": disc, "ell": ell, "k": k, "m": m }),
        results: to_json(&cert),
        citations: vec![
            "plus-subring lemma",
            "fixed-class count",
            "conjugation lemma",
            "structure of Br/Br1 and of the Galois-invariant geometric Brauer group",
        ],
        provenance: provenance(&[("certificate", Provenance::Exhaustive)]),
        summary: format!(
            "matrix certificate at {ell}^{k}, m = {m}: {}",
            if cert.holds { "holds" } else { "FAILS" }
        ),
        withheld: !cert.holds,
    })
}

fn tate(model: &[i64], p: u64) -> Result<Report, Error> {
    let a: [i64; 5] = model.try_into().map_err(|_| {
        Error::InvalidInput(format!("--model needs 5 coefficients, got {}", model.len()))
    })?;
    let curve = RationalCurve::from_ints(a)?;
    let r = tate_algorithm(&curve, p)?;
    let mut results = to_json(&r);
    results["minimal_model_equation"] = json!(r.minimal_model.to_string());
    results["curve"] = json!(curve.to_string());
    Ok(Report {
        command: "tate".into(),
        inputs: json!({ "model": model, "p": p }),
        results,
        citations: vec!["Tate's algorithm (Silverman, Advanced Topics, IV.9)"],
        provenance: provenance(&[("tate", Provenance::Exhaustive)]),
        summary: format!(
            "{} reduction, type {}, c = {}, f = {}",
            to_json(&r.reduction).as_str().unwrap_or_default(),
            r.kodaira,
            r.component_index,
            r.conductor_exponent
        ),
        withheld: false,
    })
}

fn kummer3(flag: FpArg) -> Result<Report, Error> {
    let flag = match flag {
        FpArg::Auto => FpFlag::Auto,
        FpArg::Assume => FpFlag::Assume,
    };
    let r = kummer3_pipeline(flag)?;
    let summary = match (&r.certificate, &r.withheld) {
        (Some(c), _) => {
            let forced: Vec<String> = c
                .branches
                .iter()
                .map(|b| {
                    let pairs: Vec<String> = b
                        .survivors
                        .iter()
                        .map(|(x, y)| format!("({x},{y})"))
                        .collect();
                    format!(
                        "theta = {} on E[1-zeta] forces (a,b) = {}",
                        b.epsilon,
                        pairs.join(" ")
                    )
                })
                .collect();
            format!("{}; {}", c.conclusion, forced.join("; "))
        }
        (None, Some(why)) => format!("certificate withheld: {why}"),
        (None, None) => "certificate withheld".to_string(),
    };
    let f_p = r.f_p.provenance;
    let withheld = r.certificate.is_none();
    Ok(Report {
        command: "local kummer3".into(),
        inputs: json!({ "fp_flag": to_json(&flag) }),
        results: to_json(&r),
        citations: vec![
            "Tate's algorithm (Silverman, Advanced Topics, IV.9)",
            "formal group of E over Q_2 (cited, not recomputed)",
            "irreducibility of f_P over Q_3 (external computation, used only with --fp-flag assume)",
            "cup-product pairing of the evaluation map (cited, not implemented)",
        ],
        provenance: provenance(&[
            ("mod3_quotient", Provenance::Exhaustive),
            ("g_p", Provenance::Exhaustive),
            ("g_q", Provenance::Exhaustive),
            ("f_p", f_p),
            ("certificate", Provenance::Exhaustive),
            ("away_from_3", Provenance::Exhaustive),
            ("away_from_3.cited", Provenance::Cited),
            ("kummer_model", Provenance::Exhaustive),
        ]),
        summary,
        withheld,
    })
}

fn dispatch(cli: &Cli) -> Result<Report, Error> {
    match &cli.command {
        Command::Classify { family } => Ok(classify(match family {
            FamilyCmd::J0(a) => Family::j0(a.d)?,
            FamilyCmd::J1728(a) => Family::j1728(a.d)?,
        })),
        Command::Structure {
            disc,
            m,
            case,
            full_2_torsion,
            ell,
        } => structure(*disc, m, *case, *full_2_torsion, *ell),
        Command::OrderH { disc, conductor } => order_h(*disc, *conductor),
        Command::Gross {
            cmd:
                GrossCmd::Sample {
                    family,
                    d,
                    ell,
                    bound,
                    cap,
                },
        } => gross_sample(*family, *d, *ell, *bound, *cap),
        Command::Verify {
            cmd: VerifyCmd::Matrix { disc, ell, k, m },
        } => verify_matrix(*disc, *ell, *k, *m),
        Command::Tate { model, p } => tate(model, *p),
        Command::Local {
            cmd: LocalCmd::Kummer3 { fp_flag },
        } => kummer3(*fp_flag),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object()) => {
            for (i, v) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, out);
            }
        }
        Value::String(s) => out.push(format!("{prefix}: {s}")),
        v => out.push(format!("{prefix}: {v}")),
    }
}

fn render_text(report: &Report) -> String {
    let v = report.to_value();
    let mut lines = vec![format!("{}: {}", report.command, report.summary)];
    for section in ["inputs", "results", "provenance"] {
        flatten(section, &v[section], &mut lines);
    }
    lines.extend(report.citations.iter().map(|c| format!("citation: {c}")));
    lines.join("\n")
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::Precondition(_) => 1,
        Error::BudgetExceeded { .. } => 2,
        Error::CertificateWithheld(_) => 3,
    }
}

/// Parses `argv`, prints the report and returns the process exit code.
fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            let out = if cli.json {
                serde_json::to_string_pretty(&report.to_value()).expect("serialisable")
            } else if cli.quiet {
                report.summary.clone()
            } else {
                render_text(&report)
            };
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            if report.withheld {
                3
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
