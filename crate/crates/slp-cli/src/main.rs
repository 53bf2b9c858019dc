//! `slp` — spectra, branch traces, derivatives, and example data for
//! discrete Sturm-Liouville problems.
//!
//! Exit codes: 0 ok, 1 I/O failure, 2 validation or computation error,
//! 3 oracle/reference mismatch beyond tolerance, 4 branch ambiguity.

use serde_json::json;
use slp_core::Complex64;
use std::process::ExitCode;

use slp_cli::figures;
use slp_cli::io::{FamilyFile, InputError, ProblemFile, TangentSpec};
use slp_cli::output::{self, branch_csv, branch_rows};
use slp_core::branch::BranchError;
use slp_core::{
    bc_derivative, eigenvalues, equation_derivative, normalized_coefficient_distance,
    pencil_oracle, self_adjoint_bc_derivative, separated_derivatives, spectrum, BcTangent,
    EquationTangent, TransferSystem,
};

const EXIT_IO: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_AMBIGUOUS: u8 = 4;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("{}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        let mut message = message.into();
        if !message.ends_with('\n') {
            message.push('\n');
        }
        Failure { code, message }
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Failure {
        Failure::new(EXIT_INPUT, e.to_string())
    }
}

fn usage() -> String {
    "usage: slp <command> [options]\n\
     \n\
     commands:\n\
     \x20 eigs <file> [--format json|csv] [--tol T] [--oracle]\n\
     \x20      complete spectrum with analytic and geometric multiplicities\n\
     \x20 classify <file> [--format json|csv]\n\
     \x20      boundary-condition classification, charts, and parameters\n\
     \x20 branch <file> --out <path>\n\
     \x20      trace eigenvalue branch(es) over the family in <file> to CSV\n\
     \x20 derivative <file> --lambda RE[,IM] --tangent JSON\n\
     \x20      eigenvalue derivative at a simple eigenvalue\n\
     \x20 examples --out-dir DIR [--tol T]\n\
     \x20      regenerate the six example figures and diff against closed forms\n\
     \x20 oracle-compare <file> [--tol T]\n\
     \x20      characteristic polynomial vs the linear-pencil determinant\n"
        .into()
}

struct Flags {
    positional: Vec<String>,
    format: String,
    tol: Option<f64>,
    oracle: bool,
    out: Option<String>,
    out_dir: Option<String>,
    lambda: Option<String>,
    tangent: Option<String>,
}

fn parse_flags(args: &[String]) -> Result<Flags, Failure> {
    let mut flags = Flags {
        positional: vec![],
        format: "json".into(),
        tol: None,
        oracle: false,
        out: None,
        out_dir: None,
        lambda: None,
        tangent: None,
    };
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let mut value = |name: &str| {
            it.next()
                .cloned()
                .ok_or_else(|| Failure::new(EXIT_INPUT, format!("error: {name} needs a value")))
        };
        match a.as_str() {
            "--format" => flags.format = value("--format")?,
            "--tol" => {
                let v = value("--tol")?;
                flags.tol = Some(v.parse().map_err(|_| {
                    Failure::new(
                        EXIT_INPUT,
                        format!("error: --tol expects a number, got {v}"),
                    )
                })?)
            }
            "--oracle" => flags.oracle = true,
            "--out" => flags.out = Some(value("--out")?),
            "--out-dir" => flags.out_dir = Some(value("--out-dir")?),
            "--lambda" => flags.lambda = Some(value("--lambda")?),
            "--tangent" => flags.tangent = Some(value("--tangent")?),
            other if other.starts_with("--") => {
                return Err(Failure::new(
                    EXIT_INPUT,
                    format!("error: unknown flag {other}"),
                ))
            }
            other => flags.positional.push(other.to_string()),
        }
    }
    if !matches!(flags.format.as_str(), "json" | "csv") {
        return Err(Failure::new(
            EXIT_INPUT,
            format!("error: --format must be json or csv, got {}", flags.format),
        ));
    }
    Ok(flags)
}

fn read_file(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, format!("error: cannot read {path}: {e}")))
}

fn write_file(path: &str, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::new(EXIT_IO, format!("error: cannot write {path}: {e}")))
}

fn run(args: &[String]) -> Result<(), Failure> {
    let Some(command) = args.first() else {
        return Err(Failure::new(EXIT_INPUT, usage()));
    };
    let flags = parse_flags(&args[1..])?;
    match command.as_str() {
        "eigs" => cmd_eigs(&flags),
        "classify" => cmd_classify(&flags),
        "branch" => cmd_branch(&flags),
        "derivative" => cmd_derivative(&flags),
        "examples" => cmd_examples(&flags),
        "oracle-compare" => cmd_oracle_compare(&flags),
        "--help" | "help" => {
            print!("{}", usage());
            Ok(())
        }
        other => Err(Failure::new(
            EXIT_INPUT,
            format!("error: unknown command {other}\n{}", usage()),
        )),
    }
}

fn one_file(flags: &Flags) -> Result<String, Failure> {
    match flags.positional.as_slice() {
        [f] => Ok(f.clone()),
        _ => Err(Failure::new(
            EXIT_INPUT,
            "error: expected exactly one input file",
        )),
    }
}

fn load_problem(
    path: &str,
) -> Result<(slp_core::SlEquation, slp_core::BoundaryCondition), Failure> {
    let text = read_file(path)?;
    let file = ProblemFile::parse(&text)?;
    Ok(file.to_problem()?)
}

fn cmd_eigs(flags: &Flags) -> Result<(), Failure> {
    let path = one_file(flags)?;
    let (eq, bc) = load_problem(&path)?;
    let ts = TransferSystem::build(&eq);
    let report =
        eigenvalues(&ts, &bc).map_err(|e| Failure::new(EXIT_INPUT, format!("error: {e}")))?;

    let oracle = if flags.oracle {
        let oracle_report = pencil_oracle(&eq, &bc)
            .map_err(|e| Failure::new(EXIT_INPUT, format!("error: oracle: {e}")))?;
        let coeff = normalized_coefficient_distance(
            &report.char_poly.gamma,
            &oracle_report.char_poly.gamma,
        );
        let eig = spectrum::spectrum_multiset_distance(&report, &oracle_report);
        let tol = flags.tol.unwrap_or(1e-7);
        Some((coeff, eig, tol, coeff <= tol && eig <= tol))
    } else {
        None
    };

    match flags.format.as_str() {
        "csv" => {
            print!("{}", output::spectrum_csv(&report));
            if let Some((coeff, eig, _, ok)) = oracle {
                println!("# oracle coeff_distance={coeff:e} eigenvalue_distance={eig:e} ok={ok}");
            }
        }
        _ => {
            let mut value = output::spectrum_json(&report);
            if let Some((coeff, eig, tol, ok)) = oracle {
                value.as_object_mut().unwrap().insert(
                    "oracle".into(),
                    json!({
                        "coeff_distance": coeff,
                        "eigenvalue_distance": eig,
                        "tolerance": tol,
                        "ok": ok,
                    }),
                );
            }
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
        }
    }
    if let Some((coeff, eig, tol, false)) = oracle {
        return Err(Failure::new(
            EXIT_MISMATCH,
            format!("error: oracle mismatch beyond tolerance {tol:e}: coeff {coeff:e}, eigenvalues {eig:e}"),
        ));
    }
    Ok(())
}

fn cmd_classify(flags: &Flags) -> Result<(), Failure> {
    let path = one_file(flags)?;
    let (_, bc) = load_problem(&path)?;
    match flags.format.as_str() {
        "csv" => print!("{}", output::classification_csv(&bc)),
        _ => println!(
            "{}",
            serde_json::to_string_pretty(&output::classification_json(&bc)).unwrap()
        ),
    }
    Ok(())
}

fn cmd_branch(flags: &Flags) -> Result<(), Failure> {
    let path = one_file(flags)?;
    let out = flags
        .out
        .clone()
        .ok_or_else(|| Failure::new(EXIT_INPUT, "error: branch requires --out <path>"))?;
    let text = read_file(&path)?;
    let file = FamilyFile::parse(&text)?;
    let (family, start) = file.to_family()?;
    match slp_core::branch_trace(&family, start) {
        Ok(branches) => {
            let rows = branch_rows(&branches, 0);
            write_file(&out, &branch_csv(&rows, None))?;
            println!(
                "wrote {} rows ({} branch{}) to {out}",
                rows.len(),
                branches.len(),
                if branches.len() == 1 { "" } else { "es" }
            );
            Ok(())
        }
        Err(BranchError::MatchAmbiguity { param, partial }) => {
            let rows = branch_rows(&partial, 0);
            let marker = format!("# match_ambiguity_at_param={}", output::fmt17(param));
            write_file(&out, &branch_csv(&rows, Some(&marker)))?;
            Err(Failure::new(
                EXIT_AMBIGUOUS,
                format!("error: eigenvalue match ambiguous near parameter {param}; partial branch written to {out}"),
            ))
        }
        Err(e) => Err(Failure::new(EXIT_INPUT, format!("error: {e}"))),
    }
}

fn parse_lambda(text: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    let bad = || {
        Failure::new(
            EXIT_INPUT,
            format!("error: --lambda expects RE or RE,IM, got {text}"),
        )
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(re.trim().parse().map_err(|_| bad())?, 0.0)),
        [re, im] => Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn cmd_derivative(flags: &Flags) -> Result<(), Failure> {
    let path = one_file(flags)?;
    let lambda =
        parse_lambda(flags.lambda.as_deref().ok_or_else(|| {
            Failure::new(EXIT_INPUT, "error: derivative requires --lambda RE[,IM]")
        })?)?;
    let tangent_text = flags
        .tangent
        .as_deref()
        .ok_or_else(|| Failure::new(EXIT_INPUT, "error: derivative requires --tangent JSON"))?;
    let spec: TangentSpec = serde_json::from_str(tangent_text)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("error: --tangent: {e}")))?;
    let (eq, bc) = load_problem(&path)?;
    let ts = TransferSystem::build(&eq);

    let fail = |e: slp_core::DerivError| Failure::new(EXIT_INPUT, format!("error: {e}"));
    let value = match spec {
        TangentSpec::Separated => {
            let (d_alpha, d_beta) = separated_derivatives(&ts, &bc, lambda).map_err(fail)?;
            json!({ "kind": "separated", "d_alpha": d_alpha, "d_beta": d_beta })
        }
        TangentSpec::Equation { h, k, l } => {
            let tangent = EquationTangent { h, k, l };
            let d = equation_derivative(&ts, &bc, lambda, &tangent).map_err(fail)?;
            json!({ "kind": "equation", "value": d })
        }
        TangentSpec::BcChart {
            chart,
            coords,
            da,
            dz,
            db,
        } => {
            let chart = slp_cli::io::parse_chart(&chart)?;
            if chart.is_self_adjoint_chart() {
                let (da, dz, db) = (
                    da.unwrap_or(0.0),
                    dz.map(|z| z.0).unwrap_or_default(),
                    db.unwrap_or(0.0),
                );
                let tangent = BcTangent::self_adjoint(chart, da, dz, db)
                    .map_err(|e| Failure::new(EXIT_INPUT, format!("error: --tangent: {e}")))?;
                let d = self_adjoint_bc_derivative(&ts, &bc, lambda, &tangent).map_err(fail)?;
                json!({ "kind": "self_adjoint_chart", "chart": chart.name(), "value": d })
            } else {
                let coords = coords.ok_or_else(|| {
                    Failure::new(
                        EXIT_INPUT,
                        "error: --tangent for a general chart needs coords",
                    )
                })?;
                let coords = [coords[0].0, coords[1].0, coords[2].0, coords[3].0];
                let tangent = BcTangent::general(chart, coords)
                    .map_err(|e| Failure::new(EXIT_INPUT, format!("error: --tangent: {e}")))?;
                let d = bc_derivative(&ts, &bc, lambda, &tangent).map_err(fail)?;
                json!({
                    "kind": "bc_chart",
                    "chart": chart.name(),
                    "value": [d.re, d.im],
                })
            }
        }
    };
    println!("{}", serde_json::to_string_pretty(&value).unwrap());
    Ok(())
}

fn cmd_examples(flags: &Flags) -> Result<(), Failure> {
    let dir = flags
        .out_dir
        .clone()
        .ok_or_else(|| Failure::new(EXIT_INPUT, "error: examples requires --out-dir DIR"))?;
    std::fs::create_dir_all(&dir)
        .map_err(|e| Failure::new(EXIT_IO, format!("error: cannot create {dir}: {e}")))?;
    let tol = flags.tol.unwrap_or(1e-9);
    let figs =
        figures::all_figures().map_err(|e| Failure::new(EXIT_INPUT, format!("error: {e}")))?;
    let mut worst: f64 = 0.0;
    for fig in &figs {
        write_file(&format!("{dir}/{}.csv", fig.name), &fig.csv())?;
        write_file(
            &format!("{dir}/{}.ref.json", fig.name),
            &fig.reference_json(),
        )?;
        let dev = fig.max_deviation();
        worst = worst.max(dev);
        println!(
            "{}: {} rows, max |lambda - reference| = {dev:.3e} ({})",
            fig.name,
            fig.rows.len(),
            if dev <= tol { "ok" } else { "MISMATCH" }
        );
    }
    if worst > tol {
        return Err(Failure::new(
            EXIT_MISMATCH,
            format!("error: figure data deviates from the closed forms by {worst:.3e} > {tol:e}"),
        ));
    }
    Ok(())
}

fn cmd_oracle_compare(flags: &Flags) -> Result<(), Failure> {
    let path = one_file(flags)?;
    let (eq, bc) = load_problem(&path)?;
    let ts = TransferSystem::build(&eq);
    let direct =
        eigenvalues(&ts, &bc).map_err(|e| Failure::new(EXIT_INPUT, format!("error: {e}")))?;
    let oracle = pencil_oracle(&eq, &bc)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("error: oracle: {e}")))?;
    let coeff = normalized_coefficient_distance(&direct.char_poly.gamma, &oracle.char_poly.gamma);
    let eig = spectrum::spectrum_multiset_distance(&direct, &oracle);
    let tol = flags.tol.unwrap_or(1e-7);
    let ok = coeff <= tol && eig <= tol;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "coeff_distance": coeff,
            "eigenvalue_distance": eig,
            "tolerance": tol,
            "ok": ok,
        }))
        .unwrap()
    );
    if ok {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_MISMATCH,
            format!("error: oracle mismatch: coeff {coeff:e}, eigenvalues {eig:e} (tol {tol:e})"),
        ))
    }
}
