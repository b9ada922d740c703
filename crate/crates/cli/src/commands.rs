use crate::{Cli, Command, Embedding, Failure, Format, EXIT_REPRODUCE};
use lamptf::abel::{cleared_condition, default_w_grid, ratio_trajectory, DEFAULT_ALPHA_TOL};
use lamptf::acceptance::{run_all, Criterion, Faults};
use lamptf::export::{portrait_svg, write_fixed_points, write_table};
use lamptf::phase::{classified_fixed_points, default_seeds, fixed_points, Classification};
use lamptf::{
    abel_coefficients, check_integrability, classify, family_params, lampariello_transform, majorana_consistency,
    majorana_rhs, oscillator_coefficients, particular_solution, perturbation_expansion, portrait, solve_bvp,
    AbelInvariant, AutonomousSystem, FixedPoint, SolveOptions, TFSolution, Window,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use std::path::{Path, PathBuf};

impl From<lamptf::Error> for Failure {
    fn from(e: lamptf::Error) -> Self {
        Failure::Numeric(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s.into_bytes()
}

/// `p` as JSON; the limit is written as the string "inf".
fn p_json(p: f64) -> serde_json::Value {
    if p.is_finite() {
        serde_json::json!(p)
    } else {
        serde_json::json!("inf")
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> lamptf::Result<()>) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, bytes: &[u8]) -> Result<(), Failure> {
    match &cli.global.out {
        Some(path) => write_file(path, bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn stem_with(stem: &Path, ext: &str) -> PathBuf {
    stem.with_extension(ext)
}

fn format_or(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = cli.global.format.unwrap_or(default);
    if !allowed.contains(&f) {
        let name = match f {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        };
        return Err(usage(format!("--format {name} is not available for this command")));
    }
    Ok(f)
}

fn validate(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    // The closed forms have exact p -> inf limits; the solvers do not.
    let limit_ok = matches!(cli.command, Command::Perturb | Command::Abel) && g.p == f64::INFINITY;
    if !(g.p > 0.0 && (g.p.is_finite() || limit_ok)) {
        return Err(usage(format!("--p must be positive and finite, got {}", g.p)));
    }
    if !(g.slope_tol >= 1e-12) {
        return Err(usage(format!(
            "--slope-tol must be at least 1e-12, got {}",
            g.slope_tol
        )));
    }
    for (name, v) in [("--rtol", g.rtol), ("--atol", g.atol), ("--x-max", g.x_max)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(usage(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<u8, Failure> {
    validate(cli)?;
    match &cli.command {
        Command::Solve => solve(cli),
        Command::Perturb => perturb(cli),
        Command::Abel => abel(cli),
        Command::Majorana => majorana(cli),
        Command::Phase { embedding, t_span } => phase(cli, *embedding, *t_span),
        Command::Classify { embedding, matrix } => classify_cmd(cli, *embedding, matrix.as_deref()),
        Command::Reproduce => reproduce(cli),
    }
}

fn solve_options(cli: &Cli) -> SolveOptions {
    SolveOptions::default()
        .rtol(cli.global.rtol)
        .atol(cli.global.atol)
        .slope_tol(cli.global.slope_tol)
        .x_max(cli.global.x_max)
}

fn solve_checked(cli: &Cli) -> Result<TFSolution, Failure> {
    solve_options(cli).validate().map_err(|e| usage(e.to_string()))?;
    Ok(solve_bvp(cli.global.p, &solve_options(cli))?)
}

#[derive(Serialize)]
struct SolveSummary {
    p: f64,
    slope: f64,
    bracket: (f64, f64),
    bracket_kinds: (String, String),
    x_max: f64,
    ratio_tail: Vec<(f64, f64)>,
}

fn solve(cli: &Cli) -> Result<u8, Failure> {
    let format = format_or(cli, Format::Json, &[Format::Json, Format::Csv])?;
    let sol = solve_checked(cli)?;
    let summary = SolveSummary {
        p: sol.p,
        slope: sol.slope,
        bracket: sol.bracket,
        bracket_kinds: (
            format!("{:?}", sol.bracket_shots.0.kind),
            format!("{:?}", sol.bracket_shots.1.kind),
        ),
        x_max: sol.x_max,
        ratio_tail: sol.ratio_tail.clone(),
    };
    let json = to_json(&summary);
    let rows: Vec<[f64; 3]> = sol.samples().map(|(x, y, dy)| [x, y, dy]).collect();
    let csv = csv_bytes(|b| write_table(b, &["x", "y", "dy"], &rows))?;
    match &cli.global.out {
        Some(stem) => {
            write_file(&stem_with(stem, "csv"), &csv)?;
            write_file(&stem_with(stem, "json"), &json)?;
        }
        None => emit(cli, if format == Format::Csv { &csv } else { &json })?,
    }
    Ok(0)
}

fn perturb(cli: &Cli) -> Result<u8, Failure> {
    let format = format_or(cli, Format::Json, &[Format::Json, Format::Csv])?;
    let p = cli.global.p;
    let params = family_params(p)?;
    let y0 = particular_solution(p)?;
    let osc = oscillator_coefficients(p)?;
    // The expansion coefficients have no finite limit as p -> inf.
    let exp = if p.is_finite() {
        Some(perturbation_expansion(p)?)
    } else {
        None
    };
    let bytes = match format {
        Format::Csv => {
            let mut rows = vec![
                ("n", params.n),
                ("lambda", params.lambda),
                ("q", params.q),
                ("k_p", y0.k_p),
                ("exponent", y0.exponent),
                ("zeta", osc.zeta),
                ("kappa", osc.kappa),
                ("r1", osc.r1),
                ("r2", osc.r2),
            ];
            if let Some(exp) = &exp {
                rows.extend([
                    ("c_lin", exp.c_lin),
                    ("exponent_neg", exp.exponents.0),
                    ("exponent_pos", exp.exponents.1),
                    ("c_quad", exp.c_quad),
                    ("pow_quad", exp.pow_quad),
                    ("c_cub", exp.c_cub),
                    ("pow_cub", exp.pow_cub),
                ]);
            }
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let io = |e: csv::Error| Failure::Io(e.to_string());
            w.write_record(["name", "value"]).map_err(io)?;
            for (k, v) in rows {
                w.write_record([k.to_string(), lamptf::export::fmt_num(v)])
                    .map_err(io)?;
            }
            w.into_inner().map_err(|e| Failure::Io(e.to_string()))?
        }
        _ => to_json(&serde_json::json!({
            "p": p_json(p),
            "family": { "n": params.n, "lambda": params.lambda, "q": params.q },
            "particular": y0,
            "oscillator": osc,
            "expansion": exp,
        })),
    };
    emit(cli, &bytes)?;
    Ok(0)
}

#[derive(Serialize)]
struct ClearedJson {
    constant: String,
    linear: String,
    quadratic: String,
    radicand: String,
    c4: String,
    c5: String,
    q: String,
}

#[derive(Serialize)]
struct InvariantJson {
    #[serde(rename = "A_p")]
    a_p: f64,
    #[serde(rename = "B_p")]
    b_p: f64,
    pow: f64,
    root: Option<f64>,
}

#[derive(Serialize)]
struct AbelJson {
    p: serde_json::Value,
    f2: f64,
    f3_amp: f64,
    f3_pow: f64,
    invariant: InvariantJson,
    alpha_samples: Vec<(f64, f64)>,
    alpha_spread: f64,
    tolerance: f64,
    excluded: Vec<f64>,
    verdict: lamptf::Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    cleared_condition: Option<ClearedJson>,
}

fn abel(cli: &Cli) -> Result<u8, Failure> {
    let format = format_or(cli, Format::Json, &[Format::Json, Format::Csv])?;
    let p = cli.global.p;
    let form = abel_coefficients(p)?;
    let inv = AbelInvariant::new(p)?;
    let report = check_integrability(p, &default_w_grid(), DEFAULT_ALPHA_TOL)?;
    let bytes = match format {
        Format::Csv => {
            let rows: Vec<[f64; 2]> = report.samples.iter().map(|&(w, a)| [w, a]).collect();
            csv_bytes(|b| write_table(b, &["w", "alpha"], &rows))?
        }
        _ => {
            // The exact cleared condition is shown for small integer p.
            let cleared = if p.fract() == 0.0 && (1.0..=64.0).contains(&p) {
                let c = cleared_condition(&BigRational::from_integer(BigInt::from(p as i64)))?;
                Some(ClearedJson {
                    constant: c.constant.to_string(),
                    linear: c.linear.to_string(),
                    quadratic: c.quadratic.to_string(),
                    radicand: c.radicand.to_string(),
                    c4: c.c4.to_string(),
                    c5: c.c5.to_string(),
                    q: c.q.to_string(),
                })
            } else {
                None
            };
            to_json(&AbelJson {
                p: p_json(p),
                f2: form.f2,
                f3_amp: form.f3_amp,
                f3_pow: form.f3_pow,
                invariant: InvariantJson {
                    a_p: inv.a_p,
                    b_p: inv.b_p,
                    pow: inv.pow,
                    root: inv.root(),
                },
                alpha_samples: report.samples.clone(),
                alpha_spread: report.alpha_spread,
                tolerance: report.tolerance,
                excluded: report.excluded.clone(),
                verdict: report.verdict,
                cleared_condition: cleared,
            })
        }
    };
    emit(cli, &bytes)?;
    Ok(0)
}

/// Lower end of the `x` range used for the reduction.
const MAJORANA_X_MIN: f64 = 0.1;

#[derive(Serialize)]
struct MajoranaJson {
    p: f64,
    slope: f64,
    x_range: (f64, f64),
    points: usize,
    residual: f64,
    rhs_at_origin: f64,
}

fn majorana(cli: &Cli) -> Result<u8, Failure> {
    let format = format_or(cli, Format::Json, &[Format::Json, Format::Csv])?;
    let p = cli.global.p;
    let sol = solve_checked(cli)?;
    let samples: Vec<_> = sol.samples().filter(|s| s.0 >= MAJORANA_X_MIN).collect();
    let ws = ratio_trajectory(p, &samples)?;
    let bytes = match format {
        Format::Csv => {
            let mut rows = Vec::with_capacity(ws.len());
            for (&(x, _, _), &(w, s)) in samples.iter().zip(&ws) {
                let (tau, u) = lampariello_transform(p, w, s)?;
                let rhs = majorana_rhs(p, tau, u).unwrap_or(f64::NAN);
                rows.push([x, w, s, tau, u, rhs]);
            }
            csv_bytes(|b| write_table(b, &["x", "w", "s", "tau", "u", "du_dtau"], &rows))?
        }
        _ => to_json(&MajoranaJson {
            p,
            slope: sol.slope,
            x_range: (MAJORANA_X_MIN, sol.curve.last().t),
            points: ws.len(),
            residual: majorana_consistency(p, &ws)?,
            rhs_at_origin: majorana_rhs(p, 0.0, 0.0)?,
        }),
    };
    emit(cli, &bytes)?;
    Ok(0)
}

fn system_for(cli: &Cli, embedding: Embedding) -> Result<AutonomousSystem, Failure> {
    let p = cli.global.p;
    Ok(match embedding {
        Embedding::Chain => AutonomousSystem::for_family(p)?,
        Embedding::EmdenFowler => AutonomousSystem::emden_fowler(&family_params(p)?)?,
    })
}

fn window_for(cli: &Cli, sys: &AutonomousSystem) -> Result<Window, Failure> {
    match cli.global.window.as_deref() {
        Some(&[x0, x1, y0, y1]) => Window::new(x0, x1, y0, y1).map_err(|e| usage(e.to_string())),
        Some(_) => Err(usage("--window takes four numbers")),
        None => Ok(Window::around(&fixed_points(sys).points, 2.0)?),
    }
}

#[derive(Serialize)]
struct PhaseJson {
    system: AutonomousSystem,
    window: Window,
    fixed_points: Vec<FixedPoint>,
    trajectories: usize,
}

fn phase(cli: &Cli, embedding: Embedding, t_span: f64) -> Result<u8, Failure> {
    let format = format_or(cli, Format::Svg, &[Format::Svg, Format::Csv, Format::Json])?;
    if !(t_span > 0.0 && t_span.is_finite()) {
        return Err(usage(format!("--t-span must be positive, got {t_span}")));
    }
    let sys = system_for(cli, embedding)?;
    let window = window_for(cli, &sys)?;
    let seeds = default_seeds(&sys, &window)?;
    let pp = portrait(&sys, &seeds, t_span, &window)?;
    let csv = csv_bytes(|b| write_fixed_points(b, &pp.fixed_points))?;
    match &cli.global.out {
        Some(stem) => {
            write_file(&stem_with(stem, "svg"), portrait_svg(&pp).as_bytes())?;
            write_file(&stem_with(stem, "csv"), &csv)?;
        }
        None => {
            let bytes = match format {
                Format::Svg => portrait_svg(&pp).into_bytes(),
                Format::Csv => csv,
                Format::Json => to_json(&PhaseJson {
                    system: sys,
                    window,
                    fixed_points: pp.fixed_points.clone(),
                    trajectories: pp.trajectories.len(),
                }),
            };
            emit(cli, &bytes)?;
        }
    }
    Ok(0)
}

fn classify_cmd(cli: &Cli, embedding: Embedding, matrix: Option<&[f64]>) -> Result<u8, Failure> {
    let format = format_or(cli, Format::Json, &[Format::Json, Format::Csv])?;
    if let Some(m) = matrix {
        let class: Classification = classify(&[[m[0], m[1]], [m[2], m[3]]])?;
        let bytes = match format {
            Format::Csv => {
                let fp = FixedPoint {
                    coords: (f64::NAN, f64::NAN),
                    class,
                    note: None,
                };
                csv_bytes(|b| write_fixed_points(b, std::slice::from_ref(&fp)))?
            }
            _ => to_json(&class),
        };
        emit(cli, &bytes)?;
        return Ok(0);
    }
    let sys = system_for(cli, embedding)?;
    let fps = classified_fixed_points(&sys)?;
    let bytes = match format {
        Format::Csv => csv_bytes(|b| write_fixed_points(b, &fps))?,
        _ => to_json(&serde_json::json!({
            "system": sys,
            "interior_missing": fixed_points(&sys).interior_missing,
            "fixed_points": fps,
        })),
    };
    emit(cli, &bytes)?;
    Ok(0)
}

#[derive(Serialize)]
struct ReproduceJson<'a> {
    passed: bool,
    criteria: &'a [Criterion],
}

fn reproduce(cli: &Cli) -> Result<u8, Failure> {
    let faults = Faults {
        kp_override: cli.global.inject_kp,
    };
    let results = run_all(&faults);
    let passed = results.iter().all(|c| c.passed);
    let bytes = if cli.global.json || cli.global.format == Some(Format::Json) {
        to_json(&ReproduceJson {
            passed,
            criteria: &results,
        })
    } else {
        let mut s = String::new();
        for c in &results {
            s.push_str(&c.line());
            s.push('\n');
        }
        let n = results.iter().filter(|c| c.passed).count();
        s.push_str(&format!("{n}/{} criteria passed\n", results.len()));
        s.into_bytes()
    };
    emit(cli, &bytes)?;
    Ok(if passed { 0 } else { EXIT_REPRODUCE })
}
