mod resolve;

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dce_core::harness::{
    default_cutoffs, default_speeds, fit_scaling_with, format_float, prepare_state, run_point_with,
    sweep_cutoff, sweep_speed, FitOptions, RunOptions, SweepRow, SweepTable, DEFAULT_MIN_CUTOFF,
};
use dce_core::oracle::{build_fock_operators, oracle_char_values, oracle_moments};
use dce_core::stats::{
    analytic_moments, char_values, number_distribution, work_distribution, BranchOptions,
    FdOptions, Observable,
};
use dce_core::{Error, ModelConfig, Result, VERSION};
use serde::Serialize;
use serde_json::{json, Value};

use resolve::ModelArgs;

const DEFAULT_U_GRID: [f64; 7] = [-2.3, -0.7, -0.1, 0.0, 0.1, 0.7, 2.3];
const ORACLE_CHI_TOL: f64 = 1e-8;
const ORACLE_MOMENT_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "dce", version, about = "Work and particle statistics of a Dirac field in an expanding box")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Work,
    Number,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Obs {
    Work,
    Number,
}

impl From<Obs> for Observable {
    fn from(o: Obs) -> Self {
        match o {
            Obs::Work => Observable::Work,
            Obs::Number => Observable::Number,
        }
    }
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Output file (stdout if omitted). CSV outputs get a `<file>.meta.json`
    /// sidecar with the resolved configuration.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Moments of work and particle number at one configuration.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Also differentiate the characteristic functions with this step.
        #[arg(long)]
        fd_step: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Characteristic function on a grid of u.
    Chi {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value = "work")]
        observable: Obs,
        /// Comma-separated u values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u_grid: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Full probability distribution of work or particle number.
    Distribution {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value = "work")]
        observable: Obs,
        /// Lift the L <= 64 guard of the work distribution.
        #[arg(long)]
        allow_large: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Moments as a function of the cutoff L.
    SweepL {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated, strictly increasing [default: 8,16,...,512].
        #[arg(long, value_delimiter = ',')]
        l_values: Option<Vec<usize>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Scaling coefficients as a function of alpha/v.
    SweepAlpha {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated speeds [default: 0.1,0.2,...,3.0].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        speeds: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        l_values: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_MIN_CUTOFF)]
        min_cutoff: usize,
        /// Also write the underlying cutoff sweep to this CSV file.
        #[arg(long)]
        table_output: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Least-squares scaling fit of a cutoff-sweep CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        target: Target,
        #[arg(long, default_value_t = DEFAULT_MIN_CUTOFF)]
        min_cutoff: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare the Gaussian pipeline with exact Fock-space evolution.
    OracleCheck {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u_grid: Option<Vec<f64>>,
        /// Allow L = 6 (Fock dimension 4096).
        #[arg(long)]
        allow_l6: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn meta(command: &str, config: Value) -> Value {
    json!({ "version": VERSION, "command": command, "config": config })
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit(out: &OutputArgs, default: Format, meta: Value, csv: Option<String>, result: impl Serialize) -> Result<()> {
    let format = out.format.unwrap_or(default);
    match (format, csv) {
        (Format::Csv, Some(body)) => {
            let meta_text = serde_json::to_string_pretty(&meta).expect("metadata serialises");
            match &out.output {
                Some(p) => {
                    let mut side = p.clone().into_os_string();
                    side.push(".meta.json");
                    std::fs::write(side, meta_text + "\n")?;
                }
                None => eprintln!("{meta_text}"),
            }
            write_text(out.output.as_deref(), &body)
        }
        (Format::Csv, None) => Err(Error::InvalidConfig("this command has no CSV output".into())),
        (Format::Json, _) => {
            let mut doc = meta;
            doc["result"] = serde_json::to_value(result).expect("result serialises");
            let text = serde_json::to_string_pretty(&doc).expect("json serialises") + "\n";
            write_text(out.output.as_deref(), &text)
        }
    }
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

fn config_json(cfg: &ModelConfig) -> Value {
    serde_json::to_value(cfg).expect("config serialises")
}

fn simulate(model: &ModelArgs, fd_step: Option<f64>, out: &OutputArgs) -> Result<()> {
    let cfg = model.resolve(None)?;
    let opts = RunOptions {
        fd: fd_step.map(|step| FdOptions { step }),
    };
    let report = run_point_with(&cfg, opts)?;
    let row = SweepRow {
        cutoff: cfg.cutoff,
        alpha_over_v: cfg.speed_ratio,
        delta_l: cfg.delta_l,
        mean_w: report.mean_w.value,
        m2_w: report.m2_w.value,
        mean_n: report.mean_n.value,
        m2_n: report.m2_n.value,
    };
    let csv = SweepTable::new(vec![row])?.to_csv_string()?;
    emit(out, Format::Json, meta("simulate", config_json(&cfg)), Some(csv), &report)
}

fn chi(model: &ModelArgs, obs: Obs, grid: Option<Vec<f64>>, out: &OutputArgs) -> Result<()> {
    let cfg = model.resolve(None)?;
    let us = grid.unwrap_or_else(|| DEFAULT_U_GRID.to_vec());
    let (_, state) = prepare_state(&cfg)?;
    let values = char_values(&state, obs.into(), &us, BranchOptions::default())?;
    let u_col = match obs {
        Obs::Work => "u [(pi*v/l_final)^-1]",
        Obs::Number => "u",
    };
    let rows = us
        .iter()
        .zip(&values)
        .map(|(u, c)| vec![format_float(*u), format_float(c.re), format_float(c.im)]);
    let csv = csv_string(&[u_col, "re", "im"], rows)?;
    let result: Vec<Value> = us
        .iter()
        .zip(&values)
        .map(|(u, c)| json!({ "u": u, "re": c.re, "im": c.im }))
        .collect();
    let mut m = meta("chi", config_json(&cfg));
    m["observable"] = json!(Observable::from(obs));
    emit(out, Format::Csv, m, Some(csv), result)
}

fn distribution(model: &ModelArgs, obs: Obs, allow_large: bool, out: &OutputArgs) -> Result<()> {
    let cfg = model.resolve(None)?;
    let (_, state) = prepare_state(&cfg)?;
    let (col, probs) = match obs {
        Obs::Work => ("w [pi*v/l_final]", work_distribution(&state, allow_large)?),
        Obs::Number => ("N", number_distribution(&state)?),
    };
    let rows = probs
        .iter()
        .enumerate()
        .map(|(k, p)| vec![k.to_string(), format_float(*p)]);
    let csv = csv_string(&[col, "probability"], rows)?;
    let mut m = meta("distribution", config_json(&cfg));
    m["observable"] = json!(Observable::from(obs));
    emit(out, Format::Csv, m, Some(csv), &probs)
}

fn sweep_l(model: &ModelArgs, l_values: Option<Vec<usize>>, out: &OutputArgs) -> Result<()> {
    let cfg = model.resolve(None)?;
    let ls = l_values.unwrap_or_else(default_cutoffs);
    let table = sweep_cutoff(&cfg, &ls)?;
    let mut m = meta("sweep-l", config_json(&cfg));
    m["l_values"] = json!(ls);
    emit(out, Format::Csv, m, Some(table.to_csv_string()?), &table)
}

fn sweep_alpha(
    model: &ModelArgs,
    speeds: Option<Vec<f64>>,
    l_values: Option<Vec<usize>>,
    min_cutoff: usize,
    table_output: Option<&Path>,
    out: &OutputArgs,
) -> Result<()> {
    let base = model.resolve(Some(1.0))?;
    let speeds = speeds.unwrap_or_else(default_speeds);
    let ls = l_values.unwrap_or_else(default_cutoffs);
    let sweep = sweep_speed(&base, &speeds, &ls, FitOptions { min_cutoff }, |cfg, r| match r {
        Ok(row) => eprintln!(
            "alpha/v = {:<8} beta2 = {:.6e}  gamma1 = {:.6e}",
            cfg.speed_ratio,
            row.beta2(),
            row.gamma1()
        ),
        Err(e) => eprintln!("alpha/v = {:<8} failed: {e}", cfg.speed_ratio),
    })?;
    let mut cfg_json = config_json(&base);
    cfg_json["speed_ratio"] = Value::Null;
    let mut m = meta("sweep-alpha", cfg_json);
    m["speeds"] = json!(speeds);
    m["l_values"] = json!(ls);
    m["min_cutoff"] = json!(min_cutoff);
    m["failures"] = json!(sweep.failures);
    if let Some(p) = table_output {
        sweep.table.write_csv(File::create(p)?)?;
    }
    let mut buf = Vec::new();
    sweep.write_csv(&mut buf)?;
    let csv = String::from_utf8(buf).expect("csv output is ASCII");
    emit(out, Format::Csv, m, Some(csv), &sweep)
}

fn fit(input: &Path, target: Target, min_cutoff: usize, out: &OutputArgs) -> Result<()> {
    let table = SweepTable::read_csv(File::open(input)?)?;
    let targets: &[Observable] = match target {
        Target::Work => &[Observable::Work],
        Target::Number => &[Observable::Number],
        Target::Both => &[Observable::Work, Observable::Number],
    };
    let mut fits = Vec::new();
    for speed in table.speeds() {
        let rows = table.rows().iter().filter(|r| r.alpha_over_v == speed).copied().collect();
        let sub = SweepTable::new(rows)?;
        for &t in targets {
            fits.push(fit_scaling_with(&sub, t, FitOptions { min_cutoff })?);
        }
    }
    let m = meta("fit", json!({ "input": input, "min_cutoff": min_cutoff }));
    emit(out, Format::Json, m, None, &fits)
}

#[derive(Serialize)]
struct OracleReport {
    u_grid: Vec<f64>,
    max_chi_diff_work: f64,
    max_chi_diff_number: f64,
    /// Largest relative difference over orders 1-2 of both observables.
    max_moment_rel_diff: f64,
    chi_tolerance: f64,
    moment_tolerance: f64,
    pass: bool,
}

fn oracle_check(model: &ModelArgs, grid: Option<Vec<f64>>, allow_l6: bool, out: &OutputArgs) -> Result<bool> {
    let cfg = model.resolve(None)?;
    let us = grid.unwrap_or_else(|| DEFAULT_U_GRID.to_vec());
    let ops = build_fock_operators(&cfg, allow_l6)?;
    let (t, state) = prepare_state(&cfg)?;
    let mut chi_diff = [0.0f64; 2];
    let mut mom_diff = 0.0f64;
    for (k, obs) in [Observable::Work, Observable::Number].into_iter().enumerate() {
        let g = char_values(&state, obs, &us, BranchOptions::default())?;
        let o = oracle_char_values(&ops, cfg.delta_l, &us, obs)?;
        chi_diff[k] = g.iter().zip(&o).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let (m1, m2) = analytic_moments(&t, &state, obs);
        let exact = oracle_moments(&ops, cfg.delta_l, obs, 2)?;
        for (a, b) in [m1, m2].iter().zip(&exact) {
            let rel = (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
            mom_diff = mom_diff.max(if a == b { 0.0 } else { rel });
        }
    }
    let pass = chi_diff[0] <= ORACLE_CHI_TOL && chi_diff[1] <= ORACLE_CHI_TOL && mom_diff <= ORACLE_MOMENT_TOL;
    let report = OracleReport {
        u_grid: us,
        max_chi_diff_work: chi_diff[0],
        max_chi_diff_number: chi_diff[1],
        max_moment_rel_diff: mom_diff,
        chi_tolerance: ORACLE_CHI_TOL,
        moment_tolerance: ORACLE_MOMENT_TOL,
        pass,
    };
    let csv = csv_string(
        &["max_chi_diff_work", "max_chi_diff_number", "max_moment_rel_diff", "pass"],
        [vec![
            format_float(report.max_chi_diff_work),
            format_float(report.max_chi_diff_number),
            format_float(report.max_moment_rel_diff),
            pass.to_string(),
        ]],
    )?;
    emit(out, Format::Json, meta("oracle-check", config_json(&cfg)), Some(csv), &report)?;
    Ok(pass)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate { model, fd_step, out } => simulate(&model, fd_step, &out)?,
        Command::Chi { model, observable, u_grid, out } => chi(&model, observable, u_grid, &out)?,
        Command::Distribution { model, observable, allow_large, out } => {
            distribution(&model, observable, allow_large, &out)?
        }
        Command::SweepL { model, l_values, out } => sweep_l(&model, l_values, &out)?,
        Command::SweepAlpha { model, speeds, l_values, min_cutoff, table_output, out } => {
            sweep_alpha(&model, speeds, l_values, min_cutoff, table_output.as_deref(), &out)?
        }
        Command::Fit { input, target, min_cutoff, out } => fit(&input, target, min_cutoff, &out)?,
        Command::OracleCheck { model, u_grid, allow_l6, out } => {
            return oracle_check(&model, u_grid, allow_l6, &out)
        }
    }
    Ok(true)
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() || matches!(e, Error::Io(_) | Error::Csv(_)) {
        2
    } else {
        3
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: Gaussian pipeline and Fock oracle disagree beyond tolerance");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
