//! netscope: construct digital nets, certify their quality, and analyze
//! the discrepancy function through Walsh/Haar machinery.
//!
//! Exit codes: 0 success (all checks pass), 1 check failure, 2 usage
//! error, 3 enumeration budget exceeded.

use clap::{Args, Parser, Subcommand, ValueEnum};
use netscope_core::exec;
use netscope_core::haar::{self, HaarIndex};
use netscope_core::net::{self, GeneratingSet};
use netscope_core::norms::{self, BesovParams, ScalingMetric};
use netscope_core::quality::{self, Budget, QualityError};
use netscope_core::verify::{self, CheckReport, CheckStatus};
use netscope_core::walsh;
use std::path::PathBuf;
use std::process::ExitCode;

mod output;
use output::{fmt_f64, OutputSink};

#[derive(Parser)]
#[command(name = "netscope", version, about = "digital net construction and discrepancy analysis")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format. Defaults to csv, except `net gen` which writes the
    /// JSON net file format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Enumeration budget (elements); NETSCOPE_BUDGET overrides the
    /// default, this flag overrides both.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// JSON config file supplying defaults for omitted flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generating-set construction, certification, and point export.
    Net {
        #[command(subcommand)]
        cmd: NetCmd,
    },
    /// Dual-net enumeration.
    Dual {
        #[command(subcommand)]
        cmd: DualCmd,
    },
    /// Haar coefficient dumps.
    Haar {
        #[command(subcommand)]
        cmd: HaarCmd,
    },
    /// Norms of the discrepancy function.
    Discrepancy {
        #[command(subcommand)]
        cmd: DiscrepancyCmd,
    },
    /// The verification harness.
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum NetCmd {
    /// Build a generating set and write the net file.
    Gen {
        #[arg(long, value_enum)]
        construction: Construction,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Certify order-sigma quality three ways.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        sigma: u32,
    },
    /// Generate and export the points.
    Points {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Construction {
    Identity,
    Hammersley,
    Faure,
    FaurePlus,
    Pascal,
    InterlacedFaure,
}

#[derive(Subcommand)]
enum DualCmd {
    /// Enumerate the dual net over the digit box.
    Enum {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "digit-box")]
        digit_box: Option<usize>,
    },
}

#[derive(Subcommand)]
enum HaarCmd {
    /// Dump discrepancy Haar coefficients up to |j|_+ <= jmax.
    Coeffs {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        jmax: Option<u32>,
    },
}

#[derive(Subcommand)]
enum DiscrepancyCmd {
    /// L2 norm: exact double sum, Haar-Parseval route, or both.
    L2 {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = L2Method::Both)]
        method: L2Method,
        #[arg(long)]
        jmax: Option<u32>,
    },
    /// Truncated Besov quasi-norm.
    Besov {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        jmax: Option<u32>,
        /// Skip the admissibility range check.
        #[arg(long)]
        force: bool,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum L2Method {
    Warnock,
    Haar,
    Both,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Character sums classify exactly over the digit box.
    WalshSum {
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Minimal v agrees across the three certification routes.
    Duality {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        sigma: Option<u32>,
    },
    /// Exhaustive counting bound over the (gamma, lambda) grid.
    Omega {
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// Coefficient decay envelopes across the shipped families.
    Decay,
    /// Normalized scaling boundedness plus the Monte Carlo control.
    Scaling,
    /// The full built-in harness.
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

#[derive(Debug)]
enum CliError {
    Net(net::NetError),
    Quality(QualityError),
    Norms(norms::NormsError),
    Walsh(walsh::WalshError),
    Haar(haar::HaarError),
    Io(std::io::Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Net(e) => write!(f, "{e}"),
            CliError::Quality(e) => write!(f, "{e}"),
            CliError::Norms(e) => write!(f, "{e}"),
            CliError::Walsh(e) => write!(f, "{e}"),
            CliError::Haar(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Quality(QualityError::BudgetExceeded { .. })
            | CliError::Quality(QualityError::InstanceTooLarge(_)) => 3,
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<net::NetError> for CliError {
    fn from(e: net::NetError) -> Self {
        CliError::Net(e)
    }
}
impl From<QualityError> for CliError {
    fn from(e: QualityError) -> Self {
        CliError::Quality(e)
    }
}
impl From<norms::NormsError> for CliError {
    fn from(e: norms::NormsError) -> Self {
        CliError::Norms(e)
    }
}
impl From<walsh::WalshError> for CliError {
    fn from(e: walsh::WalshError) -> Self {
        CliError::Walsh(e)
    }
}
impl From<haar::HaarError> for CliError {
    fn from(e: haar::HaarError) -> Self {
        CliError::Haar(e)
    }
}
impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Fill omitted global flags from the config file, then the environment.
fn resolve_globals(mut g: GlobalOpts) -> Result<GlobalOpts, CliError> {
    if let Some(path) = &g.config {
        let text = std::fs::read_to_string(path)?;
        let cfg: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config parse error: {e}")))?;
        if g.out.is_none() {
            if let Some(v) = cfg.get("out").and_then(|v| v.as_str()) {
                g.out = Some(PathBuf::from(v));
            }
        }
        if g.format.is_none() {
            g.format = match cfg.get("format").and_then(|v| v.as_str()) {
                Some("csv") => Some(Format::Csv),
                Some("json") => Some(Format::Json),
                Some(other) => {
                    return Err(CliError::Usage(format!(
                        "config format must be csv or json, got {other:?}"
                    )))
                }
                None => None,
            };
        }
        if let Some(v) = cfg.get("threads").and_then(|v| v.as_u64()) {
            g.threads.get_or_insert(v as usize);
        }
        if let Some(v) = cfg.get("budget").and_then(|v| v.as_u64()) {
            g.budget.get_or_insert(v);
        }
    }
    if g.budget.is_none() {
        if let Ok(text) = std::env::var("NETSCOPE_BUDGET") {
            let v = text
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("NETSCOPE_BUDGET must be an integer, got {text:?}")))?;
            g.budget = Some(v);
        }
    }
    Ok(g)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let globals = resolve_globals(cli.global)?;
    if let Some(threads) = globals.threads {
        if let Err(e) = exec::configure_threads(threads) {
            eprintln!("note: thread pool already configured ({e})");
        }
    }
    let budget = globals.budget.map(Budget::new).unwrap_or_default();
    let mut sink = OutputSink::new(globals.out.clone())?;
    let default_format = match &cli.command {
        Command::Net { cmd: NetCmd::Gen { .. } } => Format::Json,
        _ => Format::Csv,
    };
    let json = globals.format.unwrap_or(default_format) == Format::Json;

    let code = match cli.command {
        Command::Net { cmd } => run_net(cmd, &mut sink, json, &budget)?,
        Command::Dual { cmd } => run_dual(cmd, &mut sink, json, &budget)?,
        Command::Haar { cmd } => run_haar(cmd, &mut sink, json, &budget)?,
        Command::Discrepancy { cmd } => run_discrepancy(cmd, &mut sink, json)?,
        Command::Verify { cmd } => run_verify(cmd, &mut sink, json, &budget, globals.seed)?,
    };
    sink.finish()?;
    Ok(code)
}

fn load(input: &PathBuf) -> Result<GeneratingSet, CliError> {
    Ok(net::load_net(input)?)
}

fn build(construction: Construction, b: u32, n: usize, d: Option<usize>) -> Result<GeneratingSet, CliError> {
    let need_d = |d: Option<usize>| {
        d.ok_or_else(|| CliError::Usage("--d is required for this construction".into()))
    };
    Ok(match construction {
        Construction::Identity => net::construct_identity(b, n)?,
        Construction::Hammersley => net::construct_hammersley(b, n)?,
        Construction::Faure => net::construct_faure(b, n, need_d(d)?)?,
        Construction::FaurePlus => net::construct_faure_plus(b, n, need_d(d)?)?,
        Construction::Pascal => net::pascal_power_matrices(b, n, need_d(d)?)?,
        Construction::InterlacedFaure => verify::interlaced_faure(b, n, need_d(d)?)?,
    })
}

fn run_net(cmd: NetCmd, sink: &mut OutputSink, json: bool, budget: &Budget) -> Result<ExitCode, CliError> {
    match cmd {
        NetCmd::Gen { construction, b, n, d } => {
            let g = build(construction, b, n, d)?;
            if json {
                sink.write(&net::net_to_json(&g))?;
            } else {
                // tabular dump of the same data
                sink.write("matrix,row,col,value\n")?;
                for i in 0..g.d() {
                    for r in 0..g.s() {
                        for c in 0..g.n() {
                            sink.write(&format!("{i},{r},{c},{}\n", g.matrix(i).get(r, c)))?;
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        NetCmd::Check { input, sigma } => {
            let g = load(&input)?;
            let cert = quality::min_quality_v(&g, sigma, budget)?;
            let by_dual = quality::min_v_by_dual(&g, sigma, budget)?;
            let agree = cert.v == by_dual.v;
            if json {
                let value = serde_json::json!({
                    "sigma": cert.sigma,
                    "v": cert.v,
                    "method": cert.method,
                    "witness": cert.witness,
                    "v_dual_weight": by_dual.v,
                    "routes_agree": agree,
                });
                sink.write(&format!("{}\n", serde_json::to_string_pretty(&value).unwrap()))?;
            } else {
                sink.write("sigma,v,method,v_dual_weight,routes_agree\n")?;
                sink.write(&format!("{},{},{},{},{}\n", cert.sigma, cert.v, cert.method, by_dual.v, agree))?;
            }
            Ok(if agree { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        NetCmd::Points { input } => {
            let g = load(&input)?;
            let pts = net::generate_points(&g);
            if json {
                let rows: Vec<Vec<u64>> =
                    pts.points().iter().map(|p| p.coords().to_vec()).collect();
                let value = serde_json::json!({
                    "b": pts.b(),
                    "s": pts.digit_level(),
                    "d": pts.dim(),
                    "denominator": pts.denominator(),
                    "points": rows,
                });
                sink.write(&format!("{}\n", serde_json::to_string_pretty(&value).unwrap()))?;
            } else {
                sink.write(&net::points_to_csv(&pts))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_dual(cmd: DualCmd, sink: &mut OutputSink, json: bool, budget: &Budget) -> Result<ExitCode, CliError> {
    match cmd {
        DualCmd::Enum { input, digit_box } => {
            let g = load(&input)?;
            let digit_box = digit_box.unwrap_or(g.s());
            let duals = quality::enumerate_dual(&g, digit_box, budget)?;
            let pts = net::generate_points(&g);
            if json {
                let items: Vec<serde_json::Value> = duals
                    .iter()
                    .map(|dv| {
                        let sum = walsh::character_sum(&pts, &dv.t);
                        serde_json::json!({
                            "t": dv.t,
                            "rho1": dv.rho1,
                            "rho2": dv.rho2,
                            "character_sum_re": sum.re,
                            "character_sum_im": sum.im,
                        })
                    })
                    .collect();
                sink.write(&format!("{}\n", serde_json::to_string_pretty(&items).unwrap()))?;
            } else {
                let d = g.d();
                let header: Vec<String> = (1..=d)
                    .map(|i| format!("t_{i}"))
                    .chain(["rho1".into(), "rho2".into(), "re".into(), "im".into()])
                    .collect();
                sink.write(&format!("{}\n", header.join(",")))?;
                for dv in &duals {
                    let sum = walsh::character_sum(&pts, &dv.t);
                    let mut row: Vec<String> = dv.t.iter().map(|t| t.to_string()).collect();
                    row.push(dv.rho1.to_string());
                    row.push(dv.rho2.to_string());
                    row.push(fmt_f64(sum.re));
                    row.push(fmt_f64(sum.im));
                    sink.write(&format!("{}\n", row.join(",")))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_haar(cmd: HaarCmd, sink: &mut OutputSink, json: bool, budget: &Budget) -> Result<ExitCode, CliError> {
    match cmd {
        HaarCmd::Coeffs { input, jmax } => {
            let g = load(&input)?;
            let pts = net::generate_points(&g);
            let jmax = jmax.unwrap_or(g.n() as u32 + 2);
            let d = g.d();
            let b = g.b();
            // refuse dumps beyond the element budget: the row count is
            // sum over levels of shapes * cells * l-combinations
            let mut rows = 0u64;
            for kappa in 0..=jmax {
                for shape in haar::shapes_with_order(d, kappa) {
                    let cells = (b as u64).pow(kappa);
                    rows += cells * haar::l_combos(&shape, b).len() as u64;
                }
            }
            if rows > budget.max_elements {
                return Err(QualityError::BudgetExceeded {
                    needed: rows,
                    budget: budget.max_elements,
                }
                .into());
            }
            let mut items = Vec::new();
            if !json {
                let header: Vec<String> = (1..=d)
                    .map(|i| format!("j_{i}"))
                    .chain((1..=d).map(|i| format!("m_{i}")))
                    .chain((1..=d).map(|i| format!("l_{i}")))
                    .chain(["re".into(), "im".into(), "abs".into()])
                    .collect();
                sink.write(&format!("{}\n", header.join(",")))?;
            }
            for kappa in 0..=jmax {
                for shape in haar::shapes_with_order(d, kappa) {
                    let spans: Vec<u64> =
                        shape.iter().map(|&ji| (b as u64).pow(ji.max(0) as u32)).collect();
                    let cells: u64 = spans.iter().product();
                    for cell in 0..cells {
                        let mut m = vec![0u64; d];
                        let mut rem = cell;
                        for i in (0..d).rev() {
                            m[i] = rem % spans[i];
                            rem /= spans[i];
                        }
                        for l in haar::l_combos(&shape, b) {
                            let idx = HaarIndex::new(b, shape.clone(), m.clone(), l.clone())?;
                            let rec = haar::discrepancy_haar_coeff(&pts, &idx);
                            if json {
                                items.push(serde_json::json!({
                                    "j": shape, "m": m, "l": l,
                                    "re": rec.value.re, "im": rec.value.im,
                                    "abs": rec.value.norm(),
                                }));
                            } else {
                                let mut row: Vec<String> =
                                    shape.iter().map(|j| j.to_string()).collect();
                                row.extend(m.iter().map(|x| x.to_string()));
                                row.extend(l.iter().map(|x| x.to_string()));
                                row.push(fmt_f64(rec.value.re));
                                row.push(fmt_f64(rec.value.im));
                                row.push(fmt_f64(rec.value.norm()));
                                sink.write(&format!("{}\n", row.join(",")))?;
                            }
                        }
                    }
                }
            }
            if json {
                sink.write(&format!(
                    "{}\n",
                    serde_json::to_string_pretty(&serde_json::Value::Array(items)).unwrap()
                ))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_discrepancy(cmd: DiscrepancyCmd, sink: &mut OutputSink, json: bool) -> Result<ExitCode, CliError> {
    match cmd {
        DiscrepancyCmd::L2 { input, method, jmax } => {
            let g = load(&input)?;
            let pts = net::generate_points(&g);
            let n = g.n();
            let jmax = jmax.unwrap_or(n as u32 + 6);
            let (env, env_id) = norms::envelope_value(&ScalingMetric::L2Warnock, g.b(), n, g.d());
            let mut rows: Vec<(String, f64)> = Vec::new();
            if method != L2Method::Haar {
                rows.push(("warnock".into(), norms::l2_warnock(&pts)));
            }
            if method != L2Method::Warnock {
                rows.push(("haar".into(), norms::l2_haar(&pts, jmax).value));
            }
            if json {
                let mut obj = serde_json::Map::new();
                for (name, value) in &rows {
                    obj.insert(name.clone(), serde_json::json!(value));
                    obj.insert(format!("{name}_normalized"), serde_json::json!(value / env));
                }
                obj.insert("jmax".into(), serde_json::json!(jmax));
                obj.insert("envelope".into(), serde_json::json!(env_id));
                if rows.len() == 2 {
                    let (a, b) = (rows[0].1, rows[1].1);
                    obj.insert(
                        "relative_sq_gap".into(),
                        serde_json::json!((a * a - b * b).abs() / (a * a)),
                    );
                }
                sink.write(&format!(
                    "{}\n",
                    serde_json::to_string_pretty(&serde_json::Value::Object(obj)).unwrap()
                ))?;
            } else {
                sink.write("metric,n,N,value,normalized,envelope\n")?;
                for (name, value) in &rows {
                    sink.write(&format!(
                        "l2-{name},{n},{},{},{},{env_id}\n",
                        pts.len(),
                        fmt_f64(*value),
                        fmt_f64(value / env)
                    ))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        DiscrepancyCmd::Besov { input, p, q, r, jmax, force } => {
            let g = load(&input)?;
            let pts = net::generate_points(&g);
            let n = g.n();
            let jmax = jmax.unwrap_or(n as u32 + 6);
            let bp = BesovParams { p, q, r, j_max: jmax, force };
            let report = norms::besov_quasinorm(&pts, &bp)?;
            let metric = ScalingMetric::Besov { p, q, r, jmax_extra: 0 };
            let (env, env_id) = norms::envelope_value(&metric, g.b(), n, g.d());
            if json {
                let value = serde_json::json!({
                    "p": p, "q": q, "r": r, "jmax": jmax,
                    "value": report.value,
                    "normalized": report.value / env,
                    "envelope": env_id,
                    "last_level_increment": report.last_level,
                });
                sink.write(&format!("{}\n", serde_json::to_string_pretty(&value).unwrap()))?;
            } else {
                sink.write("metric,n,N,value,normalized,envelope\n")?;
                sink.write(&format!(
                    "besov,{n},{},{},{},{env_id}\n",
                    pts.len(),
                    fmt_f64(report.value),
                    fmt_f64(report.value / env)
                ))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn report_outcome(reports: &[CheckReport]) -> ExitCode {
    if reports.iter().any(|r| r.status == CheckStatus::Fail) {
        ExitCode::from(1)
    } else if reports.iter().any(|r| r.status == CheckStatus::Budget) {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn emit_reports(reports: &[CheckReport], sink: &mut OutputSink, json: bool) -> Result<(), CliError> {
    if json {
        sink.write(&format!("{}\n", serde_json::to_string_pretty(reports).unwrap()))?;
    } else {
        sink.write("check,instance,status,seconds\n")?;
        for r in reports {
            let status = match r.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "fail",
                CheckStatus::Budget => "budget",
            };
            sink.write(&format!("{},{},{status},{}\n", r.check, r.instance, fmt_f64(r.seconds)))?;
        }
    }
    Ok(())
}

fn run_verify(
    cmd: VerifyCmd,
    sink: &mut OutputSink,
    json: bool,
    budget: &Budget,
    seed: u64,
) -> Result<ExitCode, CliError> {
    let reports: Vec<CheckReport> = match cmd {
        VerifyCmd::WalshSum { input } => match input {
            Some(path) => {
                let g = load(&path)?;
                let report = verify::verify_walsh_character(&g, g.s(), budget);
                if !json {
                    // single-instance runs emit the classified sums per
                    // dual vector alongside the verdict
                    let duals = quality::enumerate_dual(&g, g.s(), budget)?;
                    let pts = net::generate_points(&g);
                    let header: Vec<String> = (1..=g.d())
                        .map(|i| format!("t_{i}"))
                        .chain(["rho1".into(), "rho2".into(), "re".into(), "im".into()])
                        .collect();
                    sink.write(&format!("{}\n", header.join(",")))?;
                    for dv in &duals {
                        let sum = walsh::character_sum(&pts, &dv.t);
                        let mut row: Vec<String> = dv.t.iter().map(|t| t.to_string()).collect();
                        row.push(dv.rho1.to_string());
                        row.push(dv.rho2.to_string());
                        row.push(fmt_f64(sum.re));
                        row.push(fmt_f64(sum.im));
                        sink.write(&format!("{}\n", row.join(",")))?;
                    }
                    return Ok(report_outcome(&[report]));
                }
                vec![report]
            }
            None => verify::builtin_instances()
                .iter()
                .filter(|inst| {
                    (inst.g.b() as f64).powi((inst.g.d() * inst.g.s()) as i32) <= 3f64.powi(9)
                })
                .map(|inst| verify::verify_walsh_character(&inst.g, inst.g.s(), budget))
                .collect(),
        },
        VerifyCmd::Duality { input, sigma } => {
            let sigmas: Vec<u32> = sigma.map(|s| vec![s]).unwrap_or(vec![1, 2]);
            match input {
                Some(path) => {
                    let g = load(&path)?;
                    sigmas.iter().map(|&s| verify::verify_duality(&g, s, budget)).collect()
                }
                None => verify::builtin_instances()
                    .iter()
                    .flat_map(|inst| {
                        sigmas.iter().map(|&s| verify::verify_duality(&inst.g, s, budget)).collect::<Vec<_>>()
                    })
                    .collect(),
            }
        }
        VerifyCmd::Omega { input } => match input {
            Some(path) => {
                let g = load(&path)?;
                vec![verify::verify_omega(&g, budget)]
            }
            None => verify::builtin_instances()
                .iter()
                .filter(|inst| {
                    inst.g.s() <= 4
                        && (inst.g.b() as f64).powi((inst.g.d() * inst.g.s()) as i32 - inst.g.n() as i32)
                            <= 1e6
                })
                .map(|inst| verify::verify_omega(&inst.g, budget))
                .collect(),
        },
        VerifyCmd::Decay => {
            let mut out = Vec::new();
            for (family_id, b, d, sigmas) in [
                ("hammersley-b2", 2u32, 2usize, &[1u32][..]),
                ("ilfaure-b2-d1", 2, 1, &[1, 2][..]),
                ("ilfaure-b3-d2", 3, 2, &[1, 2][..]),
            ] {
                let family = if family_id.starts_with("hammersley") {
                    verify::hammersley_family(b, 3..=8)
                } else {
                    verify::interlaced_faure_family(b, d, 3..=8)
                };
                for &sigma in sigmas {
                    out.push(verify::verify_decay_family(family_id, &family, sigma, budget));
                }
            }
            out
        }
        VerifyCmd::Scaling => {
            let mut out = Vec::new();
            let ham: Vec<(usize, net::PointSet)> = verify::hammersley_family(2, 3..=10)
                .into_iter()
                .map(|(n, g)| (n, net::generate_points(&g)))
                .collect();
            let ham_short: Vec<(usize, net::PointSet)> =
                ham.iter().filter(|(n, _)| *n <= 8).cloned().collect();
            let ilf: Vec<(usize, net::PointSet)> = verify::interlaced_faure_family(3, 2, 2..=5)
                .into_iter()
                .map(|(n, g)| (n, net::generate_points(&g)))
                .collect();
            let besov = ScalingMetric::Besov { p: 1.0, q: 1.0, r: 0.5, jmax_extra: 6 };
            let runs: [(&str, &[(usize, net::PointSet)], ScalingMetric); 3] = [
                ("hammersley-b2", &ham, ScalingMetric::L2Warnock),
                ("hammersley-b2", &ham_short, besov),
                ("ilfaure-b3-d2", &ilf, ScalingMetric::L2Warnock),
            ];
            if !json {
                // data view: the normalized table per family
                sink.write("family,metric,n,N,value,normalized,envelope\n")?;
                for (family_id, family, metric) in &runs {
                    for row in verify::scaling_rows(family, metric)
                        .map_err(CliError::Norms)?
                    {
                        sink.write(&format!(
                            "{family_id},{},{},{},{},{},{}\n",
                            metric.name(),
                            row.n,
                            row.big_n,
                            fmt_f64(row.value),
                            fmt_f64(row.normalized),
                            row.envelope
                        ))?;
                    }
                }
            }
            for (family_id, family, metric) in &runs {
                out.push(verify::verify_scaling(family_id, family, metric, 3.0));
            }
            out.push(verify::verify_scaling_control(2, 2, 3..=10, 10, 2.0));
            if !json {
                return Ok(report_outcome(&out));
            }
            out
        }
        VerifyCmd::All => verify::run_all(budget, seed),
    };
    emit_reports(&reports, sink, json)?;
    Ok(report_outcome(&reports))
}
