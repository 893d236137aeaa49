use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use anyhow::{bail, Context, Result};
use clap::{ArgMatches, Args, Command, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use magnonsim::dispersion::{dispersion_probe_with, DispersionOptions};
use magnonsim::dissipation::{
    dissipated_energy, propagation_time, sweep, Axis, DissipationParams, Interpretation, DEFAULT_GROUP_VELOCITY,
};
use magnonsim::dynamics::{Chirality, IntegratorConfig, Method};
use magnonsim::excitation::selectivity;
use magnonsim::export::{self, num, Metadata};
use magnonsim::lattice::LatticeParams;
use magnonsim::logic::{check_injective, parse_netlist, truth_table, GateNetlist};
use magnonsim::scattering::{junction_scattering_experiment, JunctionKind, ScatteringSetup};
use magnonsim::verify::{PhysicalVerifier, VerifyOptions};

mod config;
mod units;

/// Spin-wave cross-junction logic: scattering runs, netlist truth tables,
/// physical verification and dissipation estimates.
#[derive(Parser)]
#[command(name = "magnonsim", version)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Scatter two packets at a cross-junction with relative phase 0 and pi.
    Junction(JunctionArgs),
    /// Logic-level truth table and injectivity of a netlist.
    TruthTable(TruthTableArgs),
    /// Check a netlist's truth table against full spin dynamics.
    VerifyPhysical(VerifyArgs),
    /// Measure the spin-wave band on a chain.
    Dispersion(DispersionArgs),
    /// Energy dissipated per operation (SI units accepted).
    Dissipation(DissipationArgs),
    /// Dissipation over a range of one parameter.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Common {
    /// `key = value` defaults; flags on the command line take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Strang,
    Rk4,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChiralityArg {
    Negative,
    Positive,
}

#[derive(Args)]
struct Physics {
    /// Exchange coupling J.
    #[arg(long, default_value_t = LatticeParams::default().coupling)]
    coupling: f64,
    /// Uniform field h along z.
    #[arg(long, default_value_t = LatticeParams::default().field)]
    field: f64,
    #[arg(long, default_value_t = IntegratorConfig::default().dt)]
    dt: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Strang)]
    method: MethodArg,
    /// Gilbert damping.
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Precession sense.
    #[arg(long, value_enum, default_value_t = ChiralityArg::Negative)]
    chirality: ChiralityArg,
}

impl Physics {
    fn lattice(&self) -> LatticeParams {
        LatticeParams {
            coupling: self.coupling,
            field: self.field,
        }
    }

    fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            method: match self.method {
                MethodArg::Strang => Method::StrangRotation,
                MethodArg::Rk4 => Method::Rk4Renorm,
            },
            dt: self.dt,
            damping_alpha: self.alpha,
            chirality: match self.chirality {
                ChiralityArg::Negative => Chirality::Negative,
                ChiralityArg::Positive => Chirality::Positive,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum JunctionArg {
    Single,
    Wide,
}

#[derive(Args)]
struct JunctionArgs {
    #[command(flatten)]
    common: Common,
    /// Sites per arm.
    #[arg(long, default_value_t = ScatteringSetup::default().arm_len)]
    arm_len: usize,
    /// Gaussian envelope width, sites.
    #[arg(long, default_value_t = ScatteringSetup::default().width)]
    width: f64,
    /// Carrier wavenumber.
    #[arg(long, default_value_t = ScatteringSetup::default().wavenumber)]
    k: f64,
    #[arg(long, default_value_t = ScatteringSetup::default().amplitude)]
    amplitude: f64,
    /// Packet center as an arm index (default: arm middle).
    #[arg(long)]
    center: Option<f64>,
    #[arg(long, value_enum, default_value_t = JunctionArg::Single)]
    junction: JunctionArg,
    /// Write a frame of every site every N steps.
    #[arg(long, value_name = "N")]
    snapshot_stride: Option<usize>,
    #[arg(long, default_value_t = ScatteringSetup::default().plateau_steps)]
    plateau_steps: usize,
    #[arg(long, default_value_t = ScatteringSetup::default().plateau_tol)]
    plateau_tol: f64,
    #[command(flatten)]
    physics: Physics,
}

#[derive(Args)]
struct TruthTableArgs {
    #[command(flatten)]
    common: Common,
    /// Netlist file.
    #[arg(long, value_name = "FILE")]
    netlist: PathBuf,
    /// Abort rows still running at this time (default: 64x the longest edge).
    #[arg(long)]
    max_time: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Netlist file.
    #[arg(long, value_name = "FILE")]
    netlist: PathBuf,
    /// Lattice sites per netlist length unit.
    #[arg(long, default_value_t = VerifyOptions::default().sites_per_unit)]
    sites_per_unit: usize,
    #[arg(long, default_value_t = VerifyOptions::default().wavenumber)]
    k: f64,
    #[arg(long, default_value_t = VerifyOptions::default().width)]
    width: f64,
    #[arg(long, default_value_t = VerifyOptions::default().amplitude)]
    amplitude: f64,
    /// Minimum |correlation| for a phase readout.
    #[arg(long, default_value_t = VerifyOptions::default().threshold)]
    threshold: f64,
    #[command(flatten)]
    physics: Physics,
}

#[derive(Args)]
struct DispersionArgs {
    #[command(flatten)]
    common: Common,
    /// Wavenumbers, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.5, 0.8, 1.2])]
    k: Vec<f64>,
    #[arg(long, default_value_t = DispersionOptions::default().chain_len)]
    chain_len: usize,
    #[arg(long, default_value_t = DispersionOptions::default().width)]
    width: f64,
    #[arg(long, default_value_t = DispersionOptions::default().amplitude)]
    amplitude: f64,
    /// Distance between the two arrival probes, sites.
    #[arg(long, default_value_t = DispersionOptions::default().probe_gap)]
    probe_gap: usize,
    /// Relative frequency spread above which a point is flagged.
    #[arg(long, default_value_t = DispersionOptions::default().spread_limit)]
    spread_limit: f64,
    #[command(flatten)]
    physics: Physics,
}

#[derive(Args)]
struct ModelArgs {
    /// Packets per operation.
    #[arg(long, default_value_t = DissipationParams::default().n)]
    n: u32,
    /// Packet energy, kT.
    #[arg(long, default_value_t = DissipationParams::default().e_sw)]
    e_sw: f64,
    /// Excitation efficiency.
    #[arg(long, default_value_t = DissipationParams::default().beta)]
    beta: f64,
    /// Junction selectivity.
    #[arg(long, conflicts_with_all = ["t0", "tpi"])]
    gamma: Option<f64>,
    /// In-phase transmission (with --tpi, instead of --gamma).
    #[arg(long, requires = "tpi")]
    t0: Option<f64>,
    /// Out-of-phase transmission.
    #[arg(long, requires = "t0")]
    tpi: Option<f64>,
    /// Cascaded junctions.
    #[arg(long, default_value_t = DissipationParams::default().nc)]
    nc: u32,
    /// Propagation time, e.g. 10ps.
    #[arg(long, value_parser = units::time, conflicts_with = "length")]
    t: Option<f64>,
    /// Propagation length, e.g. 100nm (t = length / velocity).
    #[arg(long, value_parser = units::length)]
    length: Option<f64>,
    /// Group velocity, e.g. 1e6cm/s.
    #[arg(long, value_parser = units::velocity, requires = "length")]
    velocity: Option<f64>,
    /// Relaxation time, e.g. 1ns.
    #[arg(long, value_parser = units::time)]
    tau: Option<f64>,
}

impl ModelArgs {
    fn params(&self) -> Result<DissipationParams> {
        let d = DissipationParams::default();
        let mut p = DissipationParams {
            n: self.n,
            e_sw: self.e_sw,
            beta: self.beta,
            gamma: self.gamma.unwrap_or(d.gamma),
            nc: self.nc,
            t: d.t,
            tau: self.tau.unwrap_or(d.tau),
        };
        if let (Some(t0), Some(tpi)) = (self.t0, self.tpi) {
            p = p.with_transmissions(t0, tpi)?;
        }
        p.t = match (self.t, self.length) {
            (Some(t), _) => t,
            (None, Some(l)) => propagation_time(l, self.velocity.unwrap_or(DEFAULT_GROUP_VELOCITY))?,
            (None, None) => d.t,
        };
        p.validate()?;
        Ok(p)
    }
}

fn parse_interpretation(s: &str) -> Result<Interpretation, magnonsim::Error> {
    s.parse()
}

#[derive(Args)]
struct DissipationArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    model: ModelArgs,
    /// additive or literal-product (default: report both).
    #[arg(long, value_parser = parse_interpretation)]
    interpretation: Option<Interpretation>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    model: ModelArgs,
    /// Parameter to vary: n, e_sw, beta, gamma, nc, t, tau.
    #[arg(long, value_parser = |s: &str| s.parse::<Axis>())]
    axis: Axis,
    /// Explicit values, comma separated (times accept SI suffixes).
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["from", "to"])]
    values: Option<Vec<String>>,
    #[arg(long, requires = "to")]
    from: Option<String>,
    #[arg(long, requires = "from")]
    to: Option<String>,
    /// Grid points between --from and --to.
    #[arg(long, default_value_t = 11)]
    steps: usize,
    /// Geometric instead of linear spacing.
    #[arg(long)]
    log: bool,
    #[arg(long, value_parser = parse_interpretation, default_value = "additive")]
    interpretation: Interpretation,
}

/// Successful run whose physical result disagrees with the logic model.
const EXIT_DISAGREE: u8 = 2;

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn command() -> Command {
    let mut cmd = Cli::command();
    let names: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    for name in names {
        cmd = cmd.mut_subcommand(name, |s| s.args_override_self(true));
    }
    cmd
}

fn run(args: Vec<OsString>) -> Result<ExitCode> {
    let mut cmd = command();
    let args = config::expand(args, &cmd)?;
    let matches = match cmd.try_get_matches_from_mut(args) {
        Ok(m) => m,
        Err(e) if !e.use_stderr() => {
            e.print()?;
            return Ok(ExitCode::SUCCESS);
        }
        Err(e) => bail!("{}", e.render().to_string().trim_start_matches("error: ").trim_end()),
    };
    let cli = Cli::from_arg_matches(&matches)?;
    env_logger::Builder::new()
        .filter_level(match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        })
        .format_timestamp(None)
        .init();

    let (name, sub_matches) = matches.subcommand().expect("subcommand is required");
    let meta = run_metadata(name, sub_matches, cmd.find_subcommand(name).expect("parsed subcommand"));
    match &cli.command {
        Cmd::Junction(a) => junction(a, meta),
        Cmd::TruthTable(a) => truth_table_cmd(a, meta),
        Cmd::VerifyPhysical(a) => verify_physical(a, meta),
        Cmd::Dispersion(a) => dispersion(a, meta),
        Cmd::Dissipation(a) => dissipation(a, meta),
        Cmd::Sweep(a) => sweep_cmd(a, meta),
    }
}

/// Every effective argument except where the output goes, so identical
/// configurations give identical files wherever they are written.
fn run_metadata(name: &str, m: &ArgMatches, sub: &Command) -> Metadata {
    let mut meta = Metadata::new(name);
    for arg in sub.get_arguments() {
        let id = arg.get_id().as_str();
        if matches!(id, "config" | "out" | "help" | "verbose") {
            continue;
        }
        if let Ok(Some(values)) = m.try_get_raw(id) {
            let values: Vec<String> = values.map(|v| v.to_string_lossy().into_owned()).collect();
            meta.push(id, values.join(","));
        }
    }
    meta
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_file(dir: &Path, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> magnonsim::Result<()>) -> Result<()> {
    let mut w = create(dir, name)?;
    f(&mut w).with_context(|| format!("writing {}", dir.join(name).display()))?;
    w.flush()?;
    Ok(())
}

fn load_netlist(path: &Path) -> Result<GateNetlist> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_netlist(&text).with_context(|| format!("in {}", path.display()))
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn junction(a: &JunctionArgs, meta_args: Metadata) -> Result<ExitCode> {
    let setup = ScatteringSetup {
        arm_len: a.arm_len,
        width: a.width,
        wavenumber: a.k,
        amplitude: a.amplitude,
        center: a.center,
        junction: match a.junction {
            JunctionArg::Single => JunctionKind::Single,
            JunctionArg::Wide => JunctionKind::Wide,
        },
        lattice: a.physics.lattice(),
        snapshot_stride: a.snapshot_stride,
        plateau_steps: a.plateau_steps,
        plateau_tol: a.plateau_tol,
    };
    let config = a.physics.integrator();
    let (zero, pi) = thread::scope(|s| {
        let pi = s.spawn(|| junction_scattering_experiment(&setup, true, &config));
        let zero = junction_scattering_experiment(&setup, false, &config);
        (zero, pi.join().expect("scattering worker panicked"))
    });
    let results = [zero?, pi?];
    let gamma = selectivity(results[0].transmission, results[1].transmission).ok();
    // The setup block already carries the packet and lattice; add what it lacks.
    let mut meta = export::scattering_metadata(Metadata::new("junction"), &setup);
    for (key, value) in meta_args.entries() {
        if matches!(key.as_str(), "snapshot_stride" | "dt" | "method" | "alpha" | "chirality") {
            meta.push(key, value);
        }
    }
    let out = &a.common.out;

    write_file(out, "junction.csv", |w| export::write_scattering(w, &meta, &setup, &results, gamma))?;
    let lattice = setup.build_lattice()?;
    write_file(out, "lattice.csv", |w| export::write_lattice(w, &meta, &lattice))?;
    let mut frames = 0;
    for (tag, r) in [("phase0", &results[0]), ("phasepi", &results[1])] {
        for (i, state) in r.snapshots.iter().enumerate() {
            let dir = out.join("frames");
            write_file(&dir, &format!("{tag}_{i:05}.csv"), |w| export::write_frame(w, &meta, &lattice, state))?;
            frames += 1;
        }
    }

    for r in &results {
        println!(
            "relative phase {:<2}  T = {:.6}  R = {:.6}  leakage = {:.1e}  pinning = {:.1e}  arrival t = {:.1}",
            if r.relative_pi { "pi" } else { "0" },
            r.transmission,
            r.reflection,
            r.leakage,
            r.junction_pinning,
            r.arrival_time,
        );
    }
    match gamma {
        Some(g) => println!("selectivity gamma = {g:.6}"),
        None => println!("selectivity gamma undefined (T0 + Tpi = 0)"),
    }
    println!("wrote {} and {} frame(s)", out.join("junction.csv").display(), frames);
    Ok(ExitCode::SUCCESS)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "YES"
    } else {
        "NO"
    }
}

fn truth_table_cmd(a: &TruthTableArgs, meta: Metadata) -> Result<ExitCode> {
    let netlist = load_netlist(&a.netlist)?;
    let max_time = a.max_time.unwrap_or_else(|| netlist.default_max_time());
    let table = truth_table(&netlist, max_time)?;
    let phase_only = check_injective(&table, false);
    let timed = check_injective(&table, true);
    let meta = meta
        .with("gate", &table.gate)
        .with("max_time_used", num(max_time))
        .with("injective_phase_only", phase_only.injective)
        .with("injective_with_timing", timed.injective);
    write_file(&a.common.out, "truth_table.csv", |w| export::write_truth_table(w, &meta, &table))?;

    println!("{}: {} -> {}", table.gate, table.inputs.join(" "), table.outputs.join(" "));
    for row in &table.rows {
        let ins: Vec<&str> = row.inputs.iter().map(|&b| bit(b)).collect();
        let outs = match &row.result {
            Ok(r) => table
                .outputs
                .iter()
                .map(|o| match (r.outputs.get(o), r.arrival_times.get(o)) {
                    (Some(&b), Some(t)) => format!("{}@{}", bit(b), num(*t)),
                    _ => "-".into(),
                })
                .collect::<Vec<_>>()
                .join(" "),
            Err(e) => format!("error: {e}"),
        };
        println!("  {} -> {}", ins.join(" "), outs);
    }
    println!(
        "injective: phase-only: {}; with timing: {}",
        yes_no(phase_only.injective),
        yes_no(timed.injective)
    );
    for (x, y) in &phase_only.collisions {
        let fmt = |v: &[bool]| v.iter().map(|&b| bit(b)).collect::<String>();
        println!("  phase-only collision: {} and {}", fmt(x), fmt(y));
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_physical(a: &VerifyArgs, meta: Metadata) -> Result<ExitCode> {
    let netlist = load_netlist(&a.netlist)?;
    let options = VerifyOptions {
        sites_per_unit: a.sites_per_unit,
        wavenumber: a.k,
        width: a.width,
        amplitude: a.amplitude,
        threshold: a.threshold,
        params: a.physics.lattice(),
        integrator: a.physics.integrator(),
    };
    let mut verifier = PhysicalVerifier::new(&netlist, options)?;
    let rows = verifier.verify_all()?;
    let inputs: Vec<String> = netlist.input_ports().map(|p| p.name.clone()).collect();
    let outputs: Vec<String> = netlist.output_ports().map(|p| p.name.clone()).collect();
    let row_bits = |row: usize| -> Vec<&'static str> {
        (0..inputs.len()).map(|i| bit(row >> (inputs.len() - 1 - i) & 1 == 1)).collect()
    };
    let meta = meta.with("gate", &netlist.name).with("shifter_offset", num(verifier.shifter_offset()));

    let mut header: Vec<String> = inputs.iter().map(|p| format!("in_{p}")).collect();
    header.extend(
        [
            "port", "source", "logic_bit", "physical_bit", "correlation", "confidence", "energy_ratio",
            "window_start", "window_end", "status",
        ]
        .map(String::from),
    );
    let mut csv_rows: Vec<Vec<String>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let ins: Vec<String> = row_bits(i).into_iter().map(String::from).collect();
        match row {
            Ok(v) => {
                for p in &v.ports {
                    let mut cells = ins.clone();
                    cells.extend([
                        p.port.clone(),
                        p.source.clone(),
                        bit(p.logic_bit).into(),
                        bit(p.physical_bit).into(),
                        num(p.correlation),
                        num(p.confidence),
                        num(p.energy_ratio),
                        num(p.window.0),
                        num(p.window.1),
                        if v.agrees() { "agree".into() } else { v.discrepancies.join("; ") },
                    ]);
                    csv_rows.push(cells);
                }
            }
            Err(e) => {
                let mut cells = ins;
                cells.extend(std::iter::repeat_n(String::new(), 9));
                cells.push(e.to_string());
                csv_rows.push(cells);
            }
        }
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_file(&a.common.out, "verify.csv", |w| export::write_table(w, &meta, &header, &csv_rows))?;

    println!(
        "{}: shifter offset {:.6}, {} -> {}",
        netlist.name,
        verifier.shifter_offset(),
        inputs.join(" "),
        outputs.join(" ")
    );
    let mut agreeing = 0;
    for (i, row) in rows.iter().enumerate() {
        let ins = row_bits(i).join(" ");
        match row {
            Ok(v) => {
                let show = |m: &std::collections::BTreeMap<String, bool>| {
                    outputs
                        .iter()
                        .map(|o| m.get(o).map_or("-", |&b| bit(b)))
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                let verdict = if v.agrees() { "agree" } else { "DISAGREE" };
                agreeing += v.agrees() as usize;
                println!(
                    "  {ins}  logic {}  physical {}  confidence {:.3}  {verdict}",
                    show(&v.logic.outputs),
                    show(&v.outputs()),
                    v.min_confidence()
                );
                for d in &v.discrepancies {
                    println!("    {d}");
                }
            }
            Err(e) => println!("  {ins}  error: {e}"),
        }
    }
    println!("{agreeing}/{} rows agree", rows.len());
    Ok(if agreeing == rows.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_DISAGREE)
    })
}

fn dispersion(a: &DispersionArgs, meta: Metadata) -> Result<ExitCode> {
    let opts = DispersionOptions {
        chain_len: a.chain_len,
        width: a.width,
        amplitude: a.amplitude,
        probe_gap: a.probe_gap,
        params: a.physics.lattice(),
        spread_limit: a.spread_limit,
    };
    let config = a.physics.integrator();
    // One packet per thread; results keep the order of --k.
    let points = thread::scope(|s| {
        let workers: Vec<_> = a
            .k
            .iter()
            .map(|&k| s.spawn(move || dispersion_probe_with(&opts, &[k], &config)))
            .collect();
        workers
            .into_iter()
            .map(|w| w.join().expect("dispersion worker panicked"))
            .collect::<magnonsim::Result<Vec<_>>>()
    })?
    .concat();
    write_file(&a.common.out, "dispersion.csv", |w| export::write_dispersion(w, &meta, &points))?;
    println!("{:>6} {:>10} {:>10} {:>9} {:>10}", "k", "omega", "theory", "error", "v_arrival");
    for p in &points {
        println!(
            "{:>6} {:>10.6} {:>10.6} {:>8.3}% {:>10.5}{}",
            p.k,
            p.omega,
            p.omega_theory,
            100.0 * p.rel_error,
            p.arrival_velocity,
            if p.low_confidence { "  (low confidence)" } else { "" }
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn params_metadata(meta: Metadata, p: &DissipationParams) -> Metadata {
    meta.with("param.n", p.n)
        .with("param.e_sw_kT", num(p.e_sw))
        .with("param.beta", num(p.beta))
        .with("param.gamma", num(p.gamma))
        .with("param.nc", p.nc)
        .with("param.t_s", num(p.t))
        .with("param.tau_s", num(p.tau))
}

fn dissipation(a: &DissipationArgs, meta: Metadata) -> Result<ExitCode> {
    let p = a.model.params()?;
    let interpretations = match a.interpretation {
        Some(i) => vec![i],
        None => vec![Interpretation::Additive, Interpretation::LiteralProduct],
    };
    let results = interpretations
        .iter()
        .map(|&i| dissipated_energy(&p, i))
        .collect::<magnonsim::Result<Vec<_>>>()?;
    let meta = params_metadata(meta, &p);
    let rows = results.iter().map(|d| {
        vec![
            d.interpretation.to_string(),
            num(d.excitation),
            num(d.junction),
            num(d.propagation),
            num(d.total),
        ]
    });
    write_file(&a.common.out, "dissipation.csv", |w| {
        export::write_table(
            w,
            &meta,
            &["interpretation", "excitation_term", "junction_term", "propagation_term", "E_diss_kT"],
            rows,
        )
    })?;

    println!(
        "N = {}, E_sw = {} kT, beta = {}, gamma = {}, Nc = {}, t = {} s, tau = {} s",
        p.n,
        p.e_sw,
        p.beta,
        p.gamma,
        p.nc,
        num(p.t),
        num(p.tau)
    );
    let d = &results[0];
    println!("  excitation   {:>10.4} kT", d.excitation);
    println!("  junction     {:>10.4} kT", d.junction);
    println!("  propagation  {:>10.4} kT", d.propagation);
    for d in &results {
        println!("  total ({}) {:>10.4} kT", d.interpretation, d.total);
    }
    Ok(ExitCode::SUCCESS)
}

fn axis_value(axis: Axis, text: &str) -> Result<f64> {
    match axis {
        Axis::T | Axis::Tau => units::time(text),
        _ => text
            .trim()
            .parse()
            .with_context(|| format!("invalid {axis} value {text:?}")),
    }
}

fn grid(axis: Axis, from: f64, to: f64, steps: usize, log: bool) -> Result<Vec<f64>> {
    if steps < 2 {
        bail!("--steps must be at least 2, got {steps}");
    }
    if log && !(from > 0.0 && to > 0.0) {
        bail!("--log needs positive --from and --to");
    }
    let mut values: Vec<f64> = (0..steps)
        .map(|i| {
            let f = i as f64 / (steps - 1) as f64;
            if log {
                10f64.powf(from.log10() + (to.log10() - from.log10()) * f)
            } else {
                from + (to - from) * f
            }
        })
        .collect();
    if matches!(axis, Axis::N | Axis::Nc) {
        values.iter_mut().for_each(|v| *v = v.round());
        values.dedup();
    }
    Ok(values)
}

fn sweep_cmd(a: &SweepArgs, meta: Metadata) -> Result<ExitCode> {
    let base = a.model.params()?;
    let values = match (&a.values, &a.from, &a.to) {
        (Some(vs), _, _) => vs.iter().map(|v| axis_value(a.axis, v)).collect::<Result<Vec<_>>>()?,
        (None, Some(from), Some(to)) => grid(a.axis, axis_value(a.axis, from)?, axis_value(a.axis, to)?, a.steps, a.log)?,
        _ => bail!("give --values or --from and --to"),
    };
    let rows = sweep(&base, a.axis.as_str(), &values, a.interpretation)?;
    let meta = params_metadata(meta, &base);
    let name = format!("sweep_{}.csv", a.axis);
    write_file(&a.common.out, &name, |w| export::write_sweep(w, &meta, &rows, a.interpretation))?;
    println!("{:>12} {:>12}  ({})", a.axis.as_str(), "E_diss/kT", a.interpretation);
    for r in &rows {
        println!("{:>12} {:>12.6}", num(r.value), r.result.total);
    }
    println!("wrote {}", a.common.out.join(name).display());
    Ok(ExitCode::SUCCESS)
}
