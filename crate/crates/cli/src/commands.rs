use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use trackscore::experiments::{log_grid, mi_experiment, warp_experiment, MiConfig, MiModel, WarpConfig};
use trackscore::io::{read_series_csv, write_series_csv, write_tensor_file, Series};
use trackscore::path::signatures;
use trackscore::scoring::{BayesAct, ResultRow};
use trackscore::stochastic::{
    brownian_with, omega_with, spiral_with, stream_rng, warp_exponent_with, warped_mix_given, SimConfig,
};
use trackscore::{EmpiricalMeasure, Exec, ScoringRule, Side};

use crate::manifest::{sidecar_for, RunManifest};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<trackscore::Error> for CliError {
    fn from(e: trackscore::Error) -> Self {
        use trackscore::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidArgument(_) => CliError::Usage(msg),
            E::Numerical(_) | E::NotInvertible(_) | E::Sampler(_) => CliError::Numerical(msg),
            _ => CliError::Data(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult = Result<(), CliError>;

/// Shared execution settings.
#[derive(Debug, Clone, Copy)]
pub struct Ctx {
    pub exec: Exec,
}

impl Ctx {
    fn exec_name(&self) -> &'static str {
        match self.exec {
            Exec::Sequential => "sequential",
            Exec::Parallel => "parallel",
        }
    }

    fn manifest(&self, command: &str, params: &impl Serialize) -> RunManifest {
        RunManifest::new(command, params, self.exec_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

fn write_output(path: &Path, bytes: &[u8], mut manifest: RunManifest) -> CliResult {
    fs::write(path, bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    manifest.output(path);
    let side = sidecar_for(path);
    manifest.output(&side);
    manifest.write(&side)?;
    Ok(())
}

fn check_depth(depth: usize) -> CliResult {
    // depth 8 at width 4 is already 87k coefficients per tensor
    if depth > 12 {
        return Err(CliError::Usage(format!("depth {depth} is too large (max 12)")));
    }
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct SigArgs {
    /// Series CSV (`series_id,t,x1,...,xd`, `t` optional).
    pub input: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Prepend time as coordinate 0 before taking signatures.
    #[arg(long)]
    pub time_augment: bool,
    /// Tensor file to write; a `.manifest.json` sidecar is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

fn untimed_note(series: &[Series], time_augment: bool, notes: &mut Vec<String>) {
    let untimed: Vec<&str> = series.iter().filter(|s| !s.path.has_times()).map(|s| s.id.as_str()).collect();
    if time_augment && !untimed.is_empty() {
        notes.push(format!("no t column; uniform unit time spacing assumed for: {}", untimed.join(" ")));
    }
}

pub fn sig(a: &SigArgs, ctx: Ctx) -> CliResult {
    check_depth(a.depth)?;
    let series = read_series_csv(&a.input)?;
    let mut m = ctx.manifest("sig", a);
    m.input(&a.input);
    untimed_note(&series, a.time_augment, &mut m.notes);
    let paths: Vec<_> = series
        .iter()
        .map(|s| if a.time_augment { s.path.time_augment() } else { s.path.clone() })
        .collect();
    let sigs = signatures(&paths, a.depth, ctx.exec);
    let records: Vec<_> = series.iter().map(|s| s.id.clone()).zip(sigs).collect();
    let mut buf = Vec::new();
    write_tensor_file(&mut buf, &records)?;
    m.result = Some(json!({ "n_series": records.len() }));
    write_output(&a.out, &buf, m)
}

#[derive(Debug, Args, Serialize)]
pub struct ScoringArgs {
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    #[arg(long)]
    pub time_augment: bool,
    /// Print a `quantity,side,depth,value,...` CSV row instead of the bare value.
    #[arg(long)]
    pub csv: bool,
    /// Manifest path [default: trackscore-<command>.manifest.json].
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

impl ScoringArgs {
    fn rule(&self, ctx: Ctx) -> ScoringRule {
        ScoringRule::new(self.depth, self.side.into()).with_exec(ctx.exec)
    }

    fn measure(&self, path: &Path, m: &mut RunManifest) -> Result<EmpiricalMeasure, CliError> {
        let series = read_series_csv(path)?;
        m.input(path);
        untimed_note(&series, self.time_augment, &mut m.notes);
        let paths = series
            .into_iter()
            .map(|s| if self.time_augment { s.path.time_augment() } else { s.path })
            .collect();
        Ok(EmpiricalMeasure::new(paths)?)
    }
}

/// Prints the value, writes the manifest and flags non-converged acts.
fn report(
    quantity: &str,
    value: f64,
    n_samples: usize,
    acts: &[&BayesAct],
    s: &ScoringArgs,
    mut m: RunManifest,
) -> CliResult {
    let iterations = acts.iter().map(|a| a.iterations).max().unwrap_or(0);
    let grad_norm = acts.iter().map(|a| a.grad_norm).fold(0.0, f64::max);
    let row = ResultRow {
        quantity: quantity.into(),
        side: s.side.into(),
        depth: s.depth,
        value,
        n_samples,
        seed: None,
        iterations,
        grad_norm,
    };
    if s.csv {
        println!("{}\n{}", ResultRow::HEADER, row.to_csv_line());
    } else {
        println!("{value}");
    }
    let converged = acts.iter().all(|a| a.converged());
    m.result = Some(json!({
        "quantity": quantity,
        "value": value,
        "n_samples": n_samples,
        "iterations": iterations,
        "grad_norm": grad_norm,
        "converged": converged,
    }));
    let path = s
        .manifest
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("trackscore-{}.manifest.json", m.command)));
    m.output(&path);
    m.write(&path)?;
    if !converged {
        return Err(CliError::Numerical(format!(
            "Bayes act did not reach the gradient tolerance (final gradient norm {grad_norm:e})"
        )));
    }
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct DivergenceArgs {
    /// Series CSV of the measure being scored (ν).
    #[arg(long)]
    pub a: PathBuf,
    /// Series CSV of the reported measure (μ).
    #[arg(long)]
    pub b: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub scoring: ScoringArgs,
}

pub fn divergence(a: &DivergenceArgs, ctx: Ctx) -> CliResult {
    let s = &a.scoring;
    check_depth(s.depth)?;
    let mut m = ctx.manifest("divergence", a);
    let nu = s.measure(&a.a, &mut m)?;
    let mu = s.measure(&a.b, &mut m)?;
    let (d, a_nu, a_mu) = s.rule(ctx).divergence_report(&nu, &mu)?;
    report("divergence", d, nu.len(), &[&a_nu, &a_mu], s, m)
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    pub input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub scoring: ScoringArgs,
}

pub fn entropy(a: &EntropyArgs, ctx: Ctx) -> CliResult {
    let s = &a.scoring;
    check_depth(s.depth)?;
    let mut m = ctx.manifest("entropy", a);
    let mu = s.measure(&a.input, &mut m)?;
    let (h, act) = s.rule(ctx).entropy_report(&mu)?;
    report("entropy", h, mu.len(), &[&act], s, m)
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    /// Observed series; the score is averaged over them.
    #[arg(long)]
    pub observed: PathBuf,
    /// Series CSV of the forecast measure.
    #[arg(long)]
    pub forecast: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub scoring: ScoringArgs,
}

pub fn score(a: &ScoreArgs, ctx: Ctx) -> CliResult {
    let s = &a.scoring;
    check_depth(s.depth)?;
    let mut m = ctx.manifest("score", a);
    let nu = s.measure(&a.observed, &mut m)?;
    let mu = s.measure(&a.forecast, &mut m)?;
    let rule = s.rule(ctx);
    let act = rule.bayes_act(&mu)?;
    let value = rule.expected_loss(&rule.sample(&nu), &act.value)?;
    report("score", value, nu.len(), &[&act], s, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    /// Spiral process given its rotational speed.
    Spiral,
    /// Warped mixture given its driving Brownian path.
    WarpedMix,
}

impl From<ModelArg> for MiModel {
    fn from(m: ModelArg) -> MiModel {
        match m {
            ModelArg::Spiral => MiModel::Spiral,
            ModelArg::WarpedMix => MiModel::WarpedMix,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SimArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.01)]
    pub resolution: f64,
}

impl SimArgs {
    fn config(&self, dim: usize) -> SimConfig {
        SimConfig {
            seed: self.seed,
            horizon: self.horizon,
            resolution: self.resolution,
            dim,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct MiArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Spiral)]
    pub model: ModelArg,
    #[arg(long)]
    pub rho: f64,
    #[arg(long, default_value_t = 20)]
    pub n_u: usize,
    #[arg(long, default_value_t = 50)]
    pub n_x: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub sim: SimArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub scoring: ScoringArgs,
}

pub fn mi(a: &MiArgs, ctx: Ctx) -> CliResult {
    let s = &a.scoring;
    check_depth(s.depth)?;
    let mut cfg = MiConfig::new(a.model.into());
    cfg.rhos = vec![a.rho];
    cfg.seeds = vec![a.sim.seed];
    cfg.n_u = a.n_u;
    cfg.n_x = a.n_x;
    cfg.depth = s.depth;
    cfg.side = s.side.into();
    cfg.sim = a.sim.config(2);
    let table = mi_experiment(&cfg, ctx.exec)?;
    let row = &table.rows[0];
    let mut m = ctx.manifest("mi", a);
    m.notes.push(format!("unconditional entropy {:e}", row.entropy));
    let value = row.mi;
    let converged = row.converged;
    if s.csv {
        let r = ResultRow {
            quantity: "mutual_information".into(),
            side: s.side.into(),
            depth: s.depth,
            value,
            n_samples: a.n_u * a.n_x,
            seed: Some(a.sim.seed),
            iterations: 0,
            grad_norm: 0.0,
        };
        println!("{}\n{}", ResultRow::HEADER, r.to_csv_line());
    } else {
        println!("{value}");
    }
    m.result = Some(json!({ "mi": value, "entropy": row.entropy, "converged": converged }));
    let path = s.manifest.clone().unwrap_or_else(|| PathBuf::from("trackscore-mi.manifest.json"));
    m.output(&path);
    m.write(&path)?;
    if !converged {
        return Err(CliError::Numerical("some Bayes acts did not reach the gradient tolerance".into()));
    }
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct WarpArgs {
    #[arg(long, default_value_t = 25.0)]
    pub p_max: f64,
    /// Number of log-spaced exponents in `[1, p_max]`.
    #[arg(long, default_value_t = 20)]
    pub n_p: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.01, 0.1, 1.0])]
    pub gammas: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Brownian draws averaged per exponent.
    #[arg(long, default_value_t = 10)]
    pub n_paths: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub sim: SimArgs,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn experiment_warp(a: &WarpArgs, ctx: Ctx) -> CliResult {
    check_depth(a.depth)?;
    if a.p_max < 1.0 {
        return Err(CliError::Usage(format!("--p-max must be >= 1, got {}", a.p_max)));
    }
    let cfg = WarpConfig {
        p_max: a.p_max,
        n_p: a.n_p,
        gammas: a.gammas.clone(),
        depth: a.depth,
        n_paths: a.n_paths,
        sim: a.sim.config(a.dim),
    };
    let table = warp_experiment(&cfg, ctx.exec)?;
    let mut m = ctx.manifest("experiment-warp", a);
    m.result = Some(json!({ "p_grid": log_grid(a.p_max, a.n_p)? }));
    m.notes.push("sdtw columns are soft-DTW divergences sdtw(x,y) - (sdtw(x,x) + sdtw(y,y))/2".into());
    write_output(&a.out, table.to_csv().as_bytes(), m)
}

#[derive(Debug, Args, Serialize)]
pub struct MiExperimentArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.25, 0.5, 0.75, 1.0])]
    pub rhos: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub n_u: usize,
    #[arg(long, default_value_t = 50)]
    pub n_x: usize,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    #[arg(long, value_enum, default_value_t = SideArg::Right)]
    pub side: SideArg,
    /// Rows are produced for seeds `seed, seed+1, ..., seed+n_seeds-1`.
    #[arg(long, default_value_t = 1)]
    pub n_seeds: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub sim: SimArgs,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn experiment_mi(a: &MiExperimentArgs, model: MiModel, ctx: Ctx) -> CliResult {
    check_depth(a.depth)?;
    if a.n_seeds == 0 {
        return Err(CliError::Usage("--n-seeds must be positive".into()));
    }
    let mut cfg = MiConfig::new(model);
    cfg.rhos = a.rhos.clone();
    cfg.n_u = a.n_u;
    cfg.n_x = a.n_x;
    cfg.depth = a.depth;
    cfg.side = a.side.into();
    cfg.seeds = (a.sim.seed..a.sim.seed + a.n_seeds).collect();
    cfg.sim = a.sim.config(2);
    let table = mi_experiment(&cfg, ctx.exec)?;
    let name = match model {
        MiModel::Spiral => "experiment-mi-scalar",
        MiModel::WarpedMix => "experiment-mi-warp",
    };
    let mut m = ctx.manifest(name, a);
    m.result = Some(json!({ "model": model.as_str(), "all_converged": table.all_converged() }));
    write_output(&a.out, table.to_csv().as_bytes(), m)?;
    if !table.all_converged() {
        return Err(CliError::Numerical("some Bayes acts did not reach the gradient tolerance".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessArg {
    Brownian,
    Spiral,
    /// Writes the driving path `x<k>` and the mixture `z<k>` for each draw.
    WarpedMix,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub process: ProcessArg,
    #[arg(long, default_value_t = 1)]
    pub n_paths: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Mixing weight for `spiral` and `warped-mix`.
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    /// Fixed rotational speed for `spiral`; drawn per path when omitted.
    #[arg(long)]
    pub omega: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub sim: SimArgs,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn simulate(a: &SimulateArgs, ctx: Ctx) -> CliResult {
    let dim = if a.process == ProcessArg::Spiral { 2 } else { a.dim };
    let cfg = a.sim.config(dim);
    cfg.validate()?;
    let mut params = Vec::new();
    let draws = ctx.exec.try_map_range(a.n_paths, |k| {
        let mut rng = stream_rng(a.sim.seed, k as u64);
        match a.process {
            ProcessArg::Brownian => Ok((vec![Series::new(format!("b{k}"), brownian_with(&cfg, &mut rng)?)], None)),
            ProcessArg::Spiral => {
                let omega = a.omega.unwrap_or_else(|| omega_with(&mut rng));
                let y = spiral_with(a.rho, omega, &cfg, &mut rng)?;
                Ok((vec![Series::new(format!("y{k}"), y)], Some(omega)))
            }
            ProcessArg::WarpedMix => {
                let x = brownian_with(&cfg, &mut rng)?;
                let p = warp_exponent_with(&mut rng);
                let z = warped_mix_given(&x, p, a.rho, &cfg, &mut rng)?;
                Ok((vec![Series::new(format!("x{k}"), x), Series::new(format!("z{k}"), z)], Some(p)))
            }
        }
    })
    .map_err(|e: trackscore::Error| CliError::from(e))?;
    let mut series = Vec::new();
    for (s, p) in draws {
        series.extend(s);
        params.extend(p);
    }
    let mut buf = Vec::new();
    write_series_csv(&mut buf, &series)?;
    let mut m = ctx.manifest("simulate", a);
    match a.process {
        ProcessArg::Spiral => m.result = Some(json!({ "omega": params })),
        ProcessArg::WarpedMix => m.result = Some(json!({ "p": params })),
        ProcessArg::Brownian => {}
    }
    write_output(&a.out, &buf, m)
}
