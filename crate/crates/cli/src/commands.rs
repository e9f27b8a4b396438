use std::fs;
use std::io::Write as _;
use std::path::Path;

use num::ToPrimitive;
use oa_replicator::export::{write_level_curve_csv, write_trajectory_csv, TrajectorySummary};
use oa_replicator::{
    estimate_period, integrate, payoff_matrices, validate_with, BestResponseWalk, BimatrixGame,
    Convention, DynamicsError, HamiltonianSystem, LevelCurveError, Method, Portrait,
    PortraitOptions, Rational, ReducedConstants, State,
};
use serde_json::json;

use crate::config::{exact_string, parse_rational, FlatConfig, Input};
use crate::{Cli, CliError, Command, Format, PortraitArgs, SimulateArgs};

/// Runs one subcommand and returns its exit code.
pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let config = load_config(cli)?;
    let input = config.input()?;
    let convention = match cli.convention {
        Some(c) => c,
        None => config
            .get("convention")
            .map(|s| s.parse().map_err(CliError::Malformed))
            .transpose()?
            .unwrap_or_default(),
    };
    match &cli.command {
        Command::Validate { strict } => validate(cli, &input, *strict),
        Command::Payoffs => payoffs(cli, &input),
        Command::Equilibrium => equilibrium(cli, &input, convention),
        Command::Simulate(args) => simulate(cli, &config, &input, convention, args),
        Command::Portrait(args) => portrait(cli, &input, convention, args),
        Command::Cycle => cycle(cli, &input),
    }
}

fn load_config(cli: &Cli) -> Result<FlatConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Malformed(format!("cannot read {}: {e}", path.display())))?;
            FlatConfig::parse(&text)
                .map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?
        }
        None => FlatConfig::default(),
    };
    for assignment in &cli.set {
        config.set(assignment)?;
    }
    Ok(config)
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => write_file(path, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Malformed(format!("cannot write output: {e}")))
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Malformed(format!("cannot write {}: {e}", path.display())))
}

fn text_or_json(cli: &Cli, command: &str) -> Result<bool, CliError> {
    match cli.format {
        None => Ok(false),
        Some(Format::Json) => Ok(true),
        Some(other) => Err(CliError::Malformed(format!(
            "`{command}` supports --format json only, got {other:?}"
        ))),
    }
}

fn f(v: &Rational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn game(input: &Input) -> Result<BimatrixGame<Rational>, CliError> {
    match input {
        Input::Parameters(p) => payoff_matrices(p).map_err(|e| CliError::Domain(e.to_string())),
        Input::Matrices(g) => Ok(g.clone()),
        Input::Constants(_) => Err(CliError::Malformed(
            "this command needs parameters or matrices, not reduced constants".into(),
        )),
    }
}

fn constants(input: &Input, convention: Convention) -> Result<ReducedConstants<Rational>, CliError> {
    let k = match input {
        Input::Constants([a, b, c, d]) => ReducedConstants::new(a.clone(), b.clone(), c.clone(), d.clone()),
        _ => ReducedConstants::from_game(&game(input)?, convention),
    };
    k.map_err(|e| CliError::Domain(e.to_string()))
}

fn float_constants(input: &Input, convention: Convention) -> Result<ReducedConstants, CliError> {
    constants(input, convention)?
        .to_f64()
        .map_err(|e| CliError::Numerical(e.to_string()))
}

fn validate(cli: &Cli, input: &Input, strict: bool) -> Result<u8, CliError> {
    let Input::Parameters(params) = input else {
        return Err(CliError::Malformed(
            "`validate` needs parameter input (R, r, I, iota, L, G, P)".into(),
        ));
    };
    let report = validate_with(params, strict);
    let text = if text_or_json(cli, "validate")? {
        let checks: Vec<_> = report
            .checks
            .iter()
            .map(|(c, ok)| json!({ "constraint": c.label(), "ok": ok }))
            .collect();
        let doc = json!({
            "ok": report.is_ok(),
            "satisfied": report.satisfied(),
            "total": report.total(),
            "constraints": checks,
        });
        format!("{doc:#}\n")
    } else {
        format!("{report}\n")
    };
    emit(cli, &text)?;
    Ok(if report.is_ok() { 0 } else { 1 })
}

fn payoffs(cli: &Cli, input: &Input) -> Result<u8, CliError> {
    if !matches!(input, Input::Parameters(_)) {
        return Err(CliError::Malformed(
            "`payoffs` needs parameter input (R, r, I, iota, L, G, P)".into(),
        ));
    }
    let g = game(input)?;
    let text = if text_or_json(cli, "payoffs")? {
        let m = |rows: &[[Rational; 2]; 2]| -> Vec<Vec<f64>> {
            rows.iter().map(|r| r.iter().map(f).collect()).collect()
        };
        format!("{:#}\n", json!({ "A": m(&g.scientist), "B": m(&g.publisher) }))
    } else {
        let row = |r: &[Rational; 2]| format!("{} {}", exact_string(&r[0]), exact_string(&r[1]));
        format!(
            "A = {} ; {}\nB = {} ; {}\n",
            row(&g.scientist[0]),
            row(&g.scientist[1]),
            row(&g.publisher[0]),
            row(&g.publisher[1])
        )
    };
    emit(cli, &text)?;
    Ok(0)
}

fn equilibrium(cli: &Cli, input: &Input, convention: Convention) -> Result<u8, CliError> {
    let (x0, y0) = match (input, convention) {
        (Input::Constants(_), _) | (_, Convention::Paper) => constants(input, convention)?.fixed_point(),
        (_, Convention::Derived) => {
            let p = game(input)?
                .mixed_nash()
                .map_err(|e| CliError::Domain(e.to_string()))?;
            (p.x, p.y)
        }
    };
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    if !(x0 > zero && x0 < one && y0 > zero && y0 < one) {
        return Err(CliError::Domain(format!(
            "no interior equilibrium: (x0, y0) = ({}, {}) lies outside the open unit square",
            exact_string(&x0),
            exact_string(&y0)
        )));
    }
    let text = if text_or_json(cli, "equilibrium")? {
        let doc = json!({
            "convention": convention.to_string(),
            "x0": f(&x0),
            "y0": f(&y0),
            "exact": { "x0": exact_string(&x0), "y0": exact_string(&y0) },
        });
        format!("{doc:#}\n")
    } else {
        format!("x0={} y0={}\n", f(&x0), f(&y0))
    };
    emit(cli, &text)?;
    Ok(0)
}

/// A number from a flag, else from the config, else `None`.
fn setting(flag: Option<&String>, config: &FlatConfig, key: &str) -> Result<Option<f64>, CliError> {
    let exact = match flag {
        Some(text) => Some(parse_rational(text).map_err(|e| CliError::Malformed(format!("--{key}: {e}")))?),
        None => config.number(key)?,
    };
    Ok(exact.map(|v| f(&v)))
}

fn simulate(
    cli: &Cli,
    config: &FlatConfig,
    input: &Input,
    convention: Convention,
    args: &SimulateArgs,
) -> Result<u8, CliError> {
    if !matches!(cli.format, None | Some(Format::Csv)) {
        return Err(CliError::Malformed("`simulate` writes csv only".into()));
    }
    let k = float_constants(input, convention)?;
    let method = match args.method {
        Some(m) => m,
        None => config
            .get("method")
            .map(|s| s.parse::<Method>().map_err(CliError::Malformed))
            .transpose()?
            .unwrap_or_default(),
    };
    let x0 = setting(args.x0.as_ref(), config, "x0")?
        .ok_or_else(|| CliError::Malformed("missing initial state: give --x0 (or x0 in the config)".into()))?;
    let y0 = setting(args.y0.as_ref(), config, "y0")?
        .ok_or_else(|| CliError::Malformed("missing initial state: give --y0 (or y0 in the config)".into()))?;
    let s0 = State::new(x0, y0).map_err(|e| CliError::Domain(e.to_string()))?;
    let dt = setting(args.dt.as_ref(), config, "dt")?.unwrap_or(1e-3);
    let t_end = match setting(args.t_end.as_ref(), config, "t_end")? {
        Some(t) => t,
        None => 10.0 * std::f64::consts::TAU / HamiltonianSystem::new(k.clone()).linearized_frequency(),
    };
    let trajectory = integrate(&k, s0, t_end, dt, method).map_err(dynamics_error)?;

    let mut csv = Vec::new();
    write_trajectory_csv(&trajectory, &mut csv).expect("writing to memory");
    let mut summary = format!(
        "method={method} dt={dt} {}\n",
        TrajectorySummary::from_trajectory(&trajectory)
    );
    if args.period {
        match estimate_period(&k, s0, dt) {
            Ok(p) => summary.push_str(&format!("period={} crossing_time={}\n", p.period, p.crossing_time)),
            Err(DynamicsError::AtFixedPoint) => summary.push_str("period=undefined (start is the fixed point)\n"),
            Err(e) => return Err(dynamics_error(e)),
        }
    }
    match &cli.out {
        Some(path) => {
            write_file(path, &csv)?;
            print!("{summary}");
        }
        None => {
            std::io::stdout()
                .lock()
                .write_all(&csv)
                .map_err(|e| CliError::Malformed(format!("cannot write output: {e}")))?;
            eprint!("{summary}");
        }
    }
    Ok(0)
}

fn dynamics_error(e: DynamicsError) -> CliError {
    match e {
        DynamicsError::InvalidStep { .. } => CliError::Malformed(e.to_string()),
        DynamicsError::NotInterior { .. } | DynamicsError::NonPositiveConstant { .. } => {
            CliError::Domain(e.to_string())
        }
        DynamicsError::StepFailure { .. } | DynamicsError::NoReturn { .. } | DynamicsError::AtFixedPoint => {
            CliError::Numerical(e.to_string())
        }
    }
}

fn portrait(cli: &Cli, input: &Input, convention: Convention, args: &PortraitArgs) -> Result<u8, CliError> {
    if args.levels == 0 {
        return Err(CliError::Malformed("--levels must be at least 1".into()));
    }
    let sys = HamiltonianSystem::new(float_constants(input, convention)?);
    let options = PortraitOptions {
        curves: args.levels,
        resolution: args.resolution,
        ..Default::default()
    };
    let portrait = Portrait::build(&sys, &options).map_err(|e| match e {
        LevelCurveError::ResolutionTooSmall(_) => CliError::Malformed(e.to_string()),
        _ => CliError::Numerical(e.to_string()),
    })?;
    match cli.format {
        None | Some(Format::Svg) => emit(cli, &portrait.to_svg(&sys))?,
        Some(Format::Csv) => {
            let dir = cli
                .out
                .as_ref()
                .ok_or_else(|| CliError::Malformed("`portrait --format csv` needs --out <directory>".into()))?;
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Malformed(format!("cannot create {}: {e}", dir.display())))?;
            for (i, curve) in portrait.curves.iter().enumerate() {
                let name = format!("curve_{i:02}.csv");
                let mut buf = Vec::new();
                write_level_curve_csv(curve, &mut buf).expect("writing to memory");
                write_file(&dir.join(&name), &buf)?;
                println!("{name} level={}", curve.level);
            }
        }
        Some(Format::Json) => return Err(CliError::Malformed("`portrait` writes svg or csv".into())),
    }
    Ok(0)
}

fn cycle(cli: &Cli, input: &Input) -> Result<u8, CliError> {
    let walk = game(input)?.best_response_cycle();
    let text = if text_or_json(cli, "cycle")? {
        let steps = |steps: &[oa_replicator::Deviation<Rational>]| -> Vec<_> {
            steps
                .iter()
                .map(|s| {
                    json!({
                        "from": s.from.to_string(),
                        "to": s.to.to_string(),
                        "mover": s.mover.to_string(),
                        "gain": f(&s.gain),
                    })
                })
                .collect()
        };
        let doc = match &walk {
            BestResponseWalk::Cycle { steps: s } => json!({ "cycle": steps(s) }),
            BestResponseWalk::Equilibrium { profile, path } => {
                json!({ "equilibrium": profile.to_string(), "path": steps(path) })
            }
        };
        format!("{doc:#}\n")
    } else {
        format!("{walk}\n")
    };
    emit(cli, &text)?;
    Ok(0)
}
