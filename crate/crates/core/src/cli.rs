//! Command-line front end. Every stochastic command takes an explicit seed and every
//! JSON output embeds the resolved arguments and the constants version.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{emit_curves, Axis, BoundFamily, BoundInputs, CurveSpec};
use crate::channel_bridge::{check_validity, ChannelSpec};
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_chi_classicality_aware, estimate_chi_heterodyne_many, estimate_chi_squared_many, resolve_sign,
    EstimateReport, EstimatorScheme,
};
use crate::fock_oracle::{build_state, build_state_auto};
use crate::game::{run_game, GameConfig};
use crate::measurements::{heterodyne_density, sample_bell, sample_heterodyne, MeasurementRecord, Scheme};
use crate::numerics::{parse_complex, stream, Cn, SymmetricUnitary};
use crate::states::{make_five_peak, make_three_peak, PeakState};
use crate::CONSTANTS_VERSION;

#[derive(Parser, Debug)]
#[command(name = "cvlearn", version, about = "Simulate and bound phase-space learning of bosonic states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build, evaluate and inspect peak states.
    #[command(subcommand)]
    State(StateCommand),
    /// Draw Bell or heterodyne outcomes into a JSON-lines record.
    Sample(SampleArgs),
    /// Estimate characteristic-function values from a record.
    Estimate(EstimateArgs),
    /// Sample-complexity bounds.
    #[command(subcommand)]
    Bounds(BoundsCommand),
    /// The discrimination game.
    #[command(subcommand)]
    Game(GameCommand),
    /// Random-displacement channel checks.
    #[command(subcommand)]
    Channel(ChannelCommand),
    /// Compare closed forms against the truncated Fock-basis matrix.
    Oracle(OracleArgs),
}

/// One of several ways to describe a state on the command line.
#[derive(Args, Debug, Clone, Serialize)]
pub struct StateArgs {
    /// JSON state file.
    #[arg(long, conflicts_with_all = ["three_peak", "five_peak", "thermal"])]
    pub state: Option<PathBuf>,
    /// `nu=… eps0=… gamma=a+bi[,c+di…]`
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    pub three_peak: Option<Vec<String>>,
    /// `nu=… eps0=… gamma=… [u=identity|minus-identity]`
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    pub five_peak: Option<Vec<String>>,
    /// `n=… nu=…`
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    pub thermal: Option<Vec<String>>,
}

impl StateArgs {
    pub fn resolve(&self) -> Result<PeakState> {
        if let Some(path) = &self.state {
            return Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?);
        }
        if let Some(kv) = &self.three_peak {
            let p = KeyValues::parse(kv)?;
            let gamma = p.vector("gamma")?;
            return make_three_peak(gamma.len(), p.real("nu")?, p.real("eps0")?, &gamma);
        }
        if let Some(kv) = &self.five_peak {
            let p = KeyValues::parse(kv)?;
            let gamma = p.vector("gamma")?;
            let u = named_unitary(p.get("u").unwrap_or("identity"), gamma.len())?;
            return make_five_peak(gamma.len(), p.real("nu")?, p.real("eps0")?, &gamma, &u);
        }
        if let Some(kv) = &self.thermal {
            let p = KeyValues::parse(kv)?;
            let n: usize = p.get("n").unwrap_or("1").parse().map_err(|_| Error::Domain("n must be an integer".into()))?;
            return PeakState::thermal(n, p.real("nu")?);
        }
        Err(Error::Domain("no state given (use --state, --three-peak, --five-peak or --thermal)".into()))
    }
}

struct KeyValues(Vec<(String, String)>);

impl KeyValues {
    fn parse(items: &[String]) -> Result<Self> {
        items
            .iter()
            .map(|s| {
                s.split_once('=')
                    .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                    .ok_or_else(|| Error::Domain(format!("expected key=value, got '{s}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(KeyValues)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Domain(format!("missing '{key}='")))
    }

    fn real(&self, key: &str) -> Result<f64> {
        let v = self.require(key)?;
        v.parse().map_err(|_| Error::Domain(format!("'{key}' must be a real number, got '{v}'")))
    }

    fn vector(&self, key: &str) -> Result<Cn> {
        parse_vector(self.require(key)?)
    }
}

/// Comma-separated `a+bi` literals.
pub fn parse_vector(text: &str) -> Result<Cn> {
    let entries: Vec<Complex64> = text
        .trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .map(parse_complex)
        .collect::<Result<_>>()?;
    Ok(Cn(entries))
}

/// `identity`, `minus-identity`, or a JSON file holding rows of `[re, im]` pairs.
pub fn named_unitary(name: &str, n: usize) -> Result<SymmetricUnitary> {
    match name {
        "identity" => Ok(SymmetricUnitary::identity(n)),
        "minus-identity" => Ok(SymmetricUnitary::minus_identity(n)),
        path => {
            let rows: Vec<Vec<Complex64>> = serde_json::from_reader(BufReader::new(File::open(path)?))?;
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Domain(format!("unitary in {path} must be {n}x{n}")));
            }
            SymmetricUnitary::with_tol(crate::numerics::CMatrix::from_fn(n, n, |i, j| rows[i][j]), 1e-9)
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum StateCommand {
    /// Evaluate a phase-space function on a grid over the first mode.
    Eval(StateEvalArgs),
    /// Classicality of a three-peak or thermal state.
    Classicality(StateOnlyArgs),
    /// Write the state as JSON.
    Save(StateSaveArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct StateOnlyArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct StateSaveArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Char,
    Wigner,
    Qpd,
    Heterodyne,
}

#[derive(Args, Debug, Serialize)]
pub struct StateEvalArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum, default_value = "char")]
    pub quantity: Quantity,
    /// Ordering parameter for `--quantity qpd`.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    /// Half-width of the square grid.
    #[arg(long, default_value_t = 3.0)]
    pub extent: f64,
    /// CSV output; the summary goes to `<out>.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Scheme,
    #[arg(long)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Reflection axes for the Bell partner: `identity`, `minus-identity` or a JSON file.
    #[arg(long, default_value = "identity")]
    pub unitary: String,
    /// Bell partner as given, instead of reflecting and applying the circuit.
    #[arg(long)]
    pub partner: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    match s {
        "bell" => Ok(Scheme::Bell),
        "heterodyne" => Ok(Scheme::Heterodyne),
        _ => Err(format!("unknown measurement '{s}' (bell, heterodyne)")),
    }
}

#[derive(Args, Debug, Serialize)]
pub struct EstimateArgs {
    #[arg(long)]
    pub record: PathBuf,
    /// JSON array of points; each point is an array of `{re, im}`, `[re, im]` or `"a+bi"`.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, value_parser = |s: &str| s.parse::<EstimatorScheme>().map_err(|e| e.to_string()))]
    pub scheme: EstimatorScheme,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Classicality floor for `classicality-aware`.
    #[arg(long)]
    pub s_floor: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum BoundsCommand {
    /// Tabulate bound families along one axis.
    Curve(CurveArgs),
    /// Evaluate bound families at one point.
    Eval(BoundEvalArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundBase {
    #[arg(long, default_value_t = 50)]
    pub n: u32,
    #[arg(long, default_value_t = 0.09)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 2.0)]
    pub kappa: f64,
    #[arg(long = "S")]
    pub s: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub eta3: f64,
    #[arg(long, default_value_t = 1)]
    pub m: u64,
}

impl BoundBase {
    fn inputs(&self) -> BoundInputs {
        BoundInputs {
            epsilon: self.epsilon,
            delta: self.delta,
            kappa: self.kappa,
            n: self.n,
            k: self.k,
            s: self.s,
            eta3: self.eta3,
            m: self.m,
        }
    }
}

fn parse_families(s: &str) -> Result<Vec<BoundFamily>> {
    s.split(',').map(|f| f.trim().parse()).collect()
}

#[derive(Args, Debug, Serialize)]
pub struct CurveArgs {
    #[arg(long, value_parser = |s: &str| s.parse::<Axis>().map_err(|e| e.to_string()))]
    pub axis: Axis,
    /// Comma-separated family names, e.g. `lb_ef,ub_hd,ub_bm`.
    #[arg(long, default_value = "lb_ef,ub_hd,ub_bm")]
    pub families: String,
    #[command(flatten)]
    pub base: BoundBase,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    /// Geometric instead of linear spacing.
    #[arg(long)]
    pub log_spacing: bool,
    /// CSV output path; a `.json` sidecar is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundEvalArgs {
    #[arg(long, default_value = "lb_ef,ub_hd,ub_bm")]
    pub families: String,
    #[command(flatten)]
    pub base: BoundBase,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GameCommand {
    /// Play the game from a JSON config
    Run(GameRunArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct GameRunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-trial JSON-lines log.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ChannelCommand {
    /// Check whether a state's squared characteristic function is a valid channel output
    Check(ChannelCheckArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ChannelCheckArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Use the single-photon channel family instead of a peak state.
    #[arg(long)]
    pub fock1: bool,
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub sets: usize,
    #[arg(long, default_value_t = 5)]
    pub size: usize,
    #[arg(long, default_value_t = 1.0)]
    pub spread: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Query point as comma-separated `a+bi` literals; repeatable.
    #[arg(long = "point", required = true, allow_hyphen_values = true)]
    pub points: Vec<String>,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::State(StateCommand::Eval(a)) => cmd_state_eval(a),
        Command::State(StateCommand::Classicality(a)) => {
            let st = a.state.resolve()?;
            let rep = st
                .classicality()
                .ok_or_else(|| Error::Domain("classicality is implemented for thermal and three-peak states".into()))?;
            emit_json(a.out.as_deref(), &envelope("state classicality", a, json!(rep))?)
        }
        Command::State(StateCommand::Save(a)) => {
            let st = a.state.resolve()?;
            std::fs::write(&a.out, serde_json::to_string_pretty(&st)?)?;
            Ok(())
        }
        Command::Sample(a) => cmd_sample(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Bounds(BoundsCommand::Curve(a)) => cmd_curve(a),
        Command::Bounds(BoundsCommand::Eval(a)) => {
            let b = a.base.inputs();
            let mut values = serde_json::Map::new();
            for f in parse_families(&a.families)? {
                let v = match f.ln_value(&b) {
                    Ok(ln) => json!({"ln": ln, "log10": ln / std::f64::consts::LN_10}),
                    Err(e) => json!({"error": e.to_string()}),
                };
                values.insert(f.name().into(), v);
            }
            emit_json(a.out.as_deref(), &envelope("bounds eval", a, Value::Object(values))?)
        }
        Command::Game(GameCommand::Run(a)) => cmd_game(a),
        Command::Channel(ChannelCommand::Check(a)) => cmd_channel(a),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

fn envelope<A: Serialize>(command: &str, args: &A, result: Value) -> Result<Value> {
    Ok(json!({
        "command": command,
        "constants_version": CONSTANTS_VERSION,
        "config": serde_json::to_value(args)?,
        "result": result,
    }))
}

fn emit_json(out: Option<&Path>, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_state_eval(a: &StateEvalArgs) -> Result<()> {
    if a.grid < 2 || !(a.extent > 0.0) {
        return Err(Error::Domain("grid needs >= 2 points and a positive extent".into()));
    }
    let st = a.state.resolve()?;
    if a.quantity == Quantity::Qpd && !(-1.0..=1.0).contains(&a.s) {
        return Err(Error::Domain(format!("ordering parameter must lie in [-1,1], got {}", a.s)));
    }
    let s_max = st.classicality().map(|c| c.s_max);
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&a.out)?));
    let complex_valued = a.quantity == Quantity::Char;
    if complex_valued {
        w.write_record(["x", "y", "re", "im"])?;
    } else {
        w.write_record(["x", "y", "value"])?;
    }
    let mut tail_margin = f64::INFINITY;
    let step = 2.0 * a.extent / (a.grid - 1) as f64;
    let mut point = Cn::zeros(st.n());
    for i in 0..a.grid {
        for j in 0..a.grid {
            let (x, y) = (-a.extent + i as f64 * step, -a.extent + j as f64 * step);
            point[0] = Complex64::new(x, y);
            let chi = st.char_fn(&point);
            if let Some(s) = s_max.filter(|s| *s > 0.0) {
                tail_margin = tail_margin.min((-s * point.norm_sqr() / 2.0).exp() - chi.norm());
            }
            if complex_valued {
                w.write_record([x.to_string(), y.to_string(), chi.re.to_string(), chi.im.to_string()])?;
            } else {
                let v = match a.quantity {
                    Quantity::Wigner => st.wigner(&point),
                    Quantity::Qpd => st.s_qpd(a.s, &point)?,
                    _ => heterodyne_density(&st, &point),
                };
                w.write_record([x.to_string(), y.to_string(), v.to_string()])?;
            }
        }
    }
    w.flush()?;
    let summary = json!({
        "s_max": s_max,
        "mean_photon": st.mean_photon(),
        "tail_bound_margin": tail_margin.is_finite().then_some(tail_margin),
        "grid_over": "first mode, remaining modes at 0",
    });
    let mut sidecar = a.out.as_os_str().to_owned();
    sidecar.push(".json");
    emit_json(Some(Path::new(&sidecar)), &envelope("state eval", a, summary)?)
}

fn cmd_sample(a: &SampleArgs) -> Result<()> {
    let st = a.state.resolve()?;
    let record = match a.scheme {
        Scheme::Heterodyne => sample_heterodyne(&st, a.count, a.seed, a.stream)?,
        Scheme::Bell => {
            let partner = match &a.partner {
                Some(p) => serde_json::from_reader(BufReader::new(File::open(p)?))?,
                None => st.bell_partner(&named_unitary(&a.unitary, st.n())?)?,
            };
            sample_bell(&st, &partner, a.count, a.seed, a.stream)?
        }
    };
    match &a.out {
        Some(p) => record.write_jsonl(BufWriter::new(File::create(p)?)),
        None => record.write_jsonl(std::io::stdout().lock()),
    }
}

fn cmd_estimate(a: &EstimateArgs) -> Result<()> {
    let record = MeasurementRecord::read_jsonl(BufReader::new(File::open(&a.record)?))?;
    let points: Vec<Cn> = serde_json::from_reader(BufReader::new(File::open(&a.points)?))?;
    let reports = estimate_points(&record, &points, a.scheme, a.epsilon, a.delta, a.s_floor)?;
    emit_json(a.out.as_deref(), &envelope("estimate", a, serde_json::to_value(reports)?)?)
}

/// One report per query point.
pub fn estimate_points(
    record: &MeasurementRecord,
    points: &[Cn],
    scheme: EstimatorScheme,
    epsilon: f64,
    delta: f64,
    s_floor: Option<f64>,
) -> Result<Vec<EstimateReport>> {
    let report = |p: &Cn, z: Complex64| EstimateReport {
        point: p.clone(),
        estimate: z.into(),
        scheme,
        samples_used: record.len(),
        epsilon,
        delta: Some(delta),
        truncated: false,
    };
    match scheme {
        EstimatorScheme::BellChiSquared => {
            Ok(estimate_chi_squared_many(record, points)?.into_iter().zip(points).map(|(z, p)| report(p, z)).collect())
        }
        EstimatorScheme::BellChi => Ok(estimate_chi_squared_many(record, points)?
            .into_iter()
            .zip(points)
            .map(|(z, p)| report(p, resolve_sign(z, epsilon)))
            .collect()),
        EstimatorScheme::Heterodyne => {
            Ok(estimate_chi_heterodyne_many(record, points)?.into_iter().zip(points).map(|(z, p)| report(p, z)).collect())
        }
        EstimatorScheme::ClassicalityAware => {
            let s = s_floor.ok_or_else(|| Error::Domain("classicality-aware estimation needs --s-floor".into()))?;
            points
                .iter()
                .map(|p| {
                    estimate_chi_classicality_aware(record, p, s, epsilon).map(|mut r| {
                        r.delta = Some(delta);
                        r
                    })
                })
                .collect()
        }
    }
}

fn cmd_curve(a: &CurveArgs) -> Result<()> {
    let families = parse_families(&a.families)?;
    let (lo_default, hi_default) = match a.axis {
        Axis::Kappa => (0.05, 5.0),
        Axis::N => (8.0, 200.0),
        Axis::S => (0.05, 1.0),
        Axis::Epsilon => (1e-6, 0.24),
    };
    let lo = a.from.unwrap_or(lo_default);
    let hi = a.to.unwrap_or(hi_default);
    if !(hi > lo) || a.points < 2 || (a.log_spacing && !(lo > 0.0)) {
        return Err(Error::Domain("axis range must satisfy from < to (from > 0 for log spacing) with >= 2 points".into()));
    }
    let mut xs: Vec<f64> = (0..a.points)
        .map(|i| {
            let t = i as f64 / (a.points - 1) as f64;
            if a.log_spacing {
                lo * (hi / lo).powf(t)
            } else {
                lo + t * (hi - lo)
            }
        })
        .collect();
    if a.axis == Axis::N {
        xs.iter_mut().for_each(|x| *x = x.round());
        xs.dedup();
    }
    let table = emit_curves(&CurveSpec { axis: a.axis, xs, families, base: a.base.inputs() })?;
    table.write_files(&a.out)
}

fn cmd_game(a: &GameRunArgs) -> Result<()> {
    let mut config: GameConfig = serde_json::from_reader(BufReader::new(File::open(&a.config)?))?;
    if a.log.is_some() {
        config.keep_log = true;
    }
    let mut result = run_game(&config)?;
    if let Some(p) = &a.log {
        let mut w = BufWriter::new(File::create(p)?);
        for t in &result.trials {
            serde_json::to_writer(&mut w, t)?;
            writeln!(w)?;
        }
        w.flush()?;
        result.trials.clear();
    }
    emit_json(a.out.as_deref(), &envelope("game run", a, serde_json::to_value(result)?)?)
}

fn cmd_channel(a: &ChannelCheckArgs) -> Result<()> {
    let spec = if a.fock1 {
        ChannelSpec::fock1(a.r)?
    } else {
        ChannelSpec::from_state(a.state.resolve()?, a.r)?
    };
    let mut rng = stream(a.seed, 0);
    let report = check_validity(&spec, a.sets, a.size, a.spread, a.tol, &mut rng)?;
    emit_json(a.out.as_deref(), &envelope("channel check", a, serde_json::to_value(report)?)?)
}

fn cmd_oracle(a: &OracleArgs) -> Result<()> {
    let st = a.state.resolve()?;
    let fock = match a.cutoff {
        Some(c) => build_state(&st, c)?,
        None => build_state_auto(&st)?,
    };
    let mut rows = Vec::new();
    for text in &a.points {
        let p = parse_vector(text)?;
        if p.len() != st.n() {
            return Err(Error::Domain(format!("point {text} does not have {} modes", st.n())));
        }
        let closed = st.char_fn(&p);
        let numeric = fock.char_fn(&p)?;
        rows.push(json!({
            "point": p,
            "char_fn": {"closed_form": [closed.re, closed.im], "oracle": [numeric.re, numeric.im]},
            "wigner": {"closed_form": st.wigner(&p), "oracle": fock.wigner(&p)?},
            "heterodyne": {"closed_form": heterodyne_density(&st, &p), "oracle": fock.husimi(&p)?},
        }));
    }
    let result = json!({
        "cutoff": fock.cutoff,
        "trace": fock.trace().re,
        "min_eigenvalue": fock.min_eigenvalue(),
        "mean_photon": {"closed_form": st.mean_photon(), "oracle": fock.mean_photon()},
        "points": rows,
    });
    emit_json(a.out.as_deref(), &envelope("oracle", a, result)?)
}
