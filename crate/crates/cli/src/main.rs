use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use qubit_heat::config::{ConfigLoadError, GridScale, LambMode, Overrides, Resolved, RunConfig, SweepSpec};
use qubit_heat::presets::{self, WriteError};
use qubit_heat::sweep::{self, Table, CURRENT_NOTE};
use qubit_heat::transport::{self, Lamb};
use qubit_heat::validate::{self, Level, SuiteOptions};
use qubit_heat::{eigensystem, lamb, model, Error, SpectralKind};

#[derive(Parser)]
#[command(name = "heat", version, about = "Heat transport through two coupled qubits between thermal baths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy levels, mixing angles and transition frequencies.
    Eigensystem(Common),
    /// Environment-induced shifts of the levels and transition frequencies.
    LambShift(Common),
    /// Closed-form steady-state populations.
    SteadyState(Common),
    /// Heat currents with and without the frequency shift.
    Current(Common),
    /// Currents over a grid of temperature differences, as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        min: Option<f64>,
        #[arg(long)]
        max: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, value_parser = ["linear", "log"])]
        scale: Option<String>,
    },
    /// CSV data and a column schema for one of the figure presets.
    Figure {
        /// fig2, fig3, fig4, fig5 or fig6
        preset: String,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Cross-checks between independent evaluation paths.
    Validate {
        #[arg(long, default_value = "quick", value_parser = ["quick", "full"])]
        level: String,
        /// Multiply every emission rate in the dynamical generator by this
        /// factor. Anything but 1 should make the suite fail.
        #[arg(long, default_value_t = 1.0)]
        tamper_rates: f64,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (JSON report, or CSV for sweep).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    /// Qubit-qubit coupling.
    #[arg(long)]
    g: Option<f64>,
    /// Temperature of bath 1.
    #[arg(long)]
    t1: Option<f64>,
    /// T2 - T1.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    /// Cutoff frequency of both baths.
    #[arg(long)]
    omega_d: Option<f64>,
    #[arg(long)]
    kind: Option<SpectralKind>,
    #[arg(long)]
    lamb: Option<LambMode>,
}

enum Failure {
    Validation(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Validation(_) => 1,
            Self::Usage(_) => 2,
            Self::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Validation(m) | Self::Usage(m) | Self::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::Config(_) | Error::DegenerateBath { .. } => {
                Self::Usage(e.to_string())
            }
            other => Self::Validation(other.to_string()),
        }
    }
}

impl From<ConfigLoadError> for Failure {
    fn from(e: ConfigLoadError) -> Self {
        match e {
            ConfigLoadError::Io(..) => Self::Io(e.to_string()),
            ConfigLoadError::Parse(..) => Self::Usage(e.to_string()),
        }
    }
}

impl From<WriteError> for Failure {
    fn from(e: WriteError) -> Self {
        match e {
            WriteError::Compute(e) => e.into(),
            WriteError::Io(..) => Self::Io(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn resolve(common: &Common, sweep: Option<SweepSpec>) -> Result<Resolved, Failure> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        eps1: common.eps1,
        eps2: common.eps2,
        g: common.g,
        t1: common.t1,
        dt: common.dt,
        gamma1: common.gamma1,
        gamma2: common.gamma2,
        omega_d: common.omega_d,
        kind: common.kind,
        lamb: common.lamb,
        output: common.out.clone(),
    });
    if sweep.is_some() {
        cfg.sweep = sweep;
    }
    let resolved = cfg.resolve()?;
    if resolved.swapped {
        eprintln!(
            "note: eps2 > eps1, so the qubit labels were exchanged (eps1 = {}, eps2 = {}); bath labels follow their qubits",
            resolved.system.eps1, resolved.system.eps2
        );
    }
    Ok(resolved)
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    std::fs::write(path, contents).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn emit(text: &str, json: Option<(&Path, serde_json::Value)>) -> CmdResult {
    print!("{text}");
    if let Some((path, value)) = json {
        let body = serde_json::to_string_pretty(&value).expect("report serializes") + "\n";
        write_file(path, &body)?;
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("report serializes")
}

fn cmd_eigensystem(common: &Common) -> CmdResult {
    let r = resolve(common, None)?;
    let eig = eigensystem(&r.system)?;
    let mut s = String::new();
    let p = eig.params;
    writeln!(s, "eps1   {}", p.eps1).unwrap();
    writeln!(s, "eps2   {}", p.eps2).unwrap();
    writeln!(s, "g      {}", p.g).unwrap();
    writeln!(s, "alpha  {:.12}", eig.alpha).unwrap();
    writeln!(s, "beta   {:.12}", eig.beta).unwrap();
    writeln!(s, "theta  {:.12}", eig.theta).unwrap();
    writeln!(s, "phi    {:.12}", eig.phi).unwrap();
    writeln!(s, "omega1 {:.12}", eig.omega[0]).unwrap();
    writeln!(s, "omega2 {:.12}", eig.omega[1]).unwrap();
    for (i, e) in eig.levels.iter().enumerate() {
        writeln!(s, "level{} {:.12}", i + 1, e).unwrap();
    }
    if let Some(baths) = r.baths {
        for w in model::hierarchy_warnings(&eig, baths[0].omega_d.min(baths[1].omega_d), [baths[0].gamma, baths[1].gamma]) {
            eprintln!("warning: {w}");
        }
    }
    emit(&s, r.output.as_deref().map(|p| (p, to_json(&eig))))
}

fn cmd_lamb_shift(common: &Common) -> CmdResult {
    let r = resolve(common, None)?;
    let eig = eigensystem(&r.system)?;
    let baths = r.baths()?;
    let report = lamb::lamb_shift_report(&eig, &baths, &r.shift, true)?;
    let mut s = String::new();
    for j in 0..2 {
        for mu in 0..2 {
            write!(
                s,
                "bath{} omega{}: Delta {:.12e}  Delta' {:.12e}",
                j + 1,
                mu + 1,
                report.delta_jmu[j][mu],
                report.delta_prime_jmu[j][mu]
            )
            .unwrap();
            if let Some(rr) = report.r_jmu[j][mu] {
                write!(s, "  R {rr:.12e}").unwrap();
            }
            if let Some(est) = report.r_estimate_jmu[j][mu] {
                write!(s, "  R_estimate {est:.12e}").unwrap();
            }
            s.push('\n');
        }
    }
    if let Some(levels) = report.level_shifts {
        for (i, v) in levels.iter().enumerate() {
            writeln!(s, "level shift {} {:.12e}", i + 1, v).unwrap();
        }
    }
    writeln!(s, "delta1 {:.12e}", report.transition_shifts[0]).unwrap();
    writeln!(s, "delta2 {:.12e}", report.transition_shifts[1]).unwrap();
    writeln!(s, "method {:?} {:?}", report.method[0], report.method[1]).unwrap();
    emit(&s, r.output.as_deref().map(|p| (p, to_json(&report))))
}

fn cmd_steady_state(common: &Common) -> CmdResult {
    let r = resolve(common, None)?;
    let eig = eigensystem(&r.system)?;
    let st = transport::steady_state(&eig, &r.baths()?)?;
    let mut s = String::new();
    for (i, p) in st.populations.iter().enumerate() {
        writeln!(s, "p{} {:.12e}", i + 1, p).unwrap();
    }
    writeln!(s, "X+ {:.12e}  X- {:.12e}", st.x_plus, st.x_minus).unwrap();
    writeln!(s, "Y+ {:.12e}  Y- {:.12e}", st.y_plus, st.y_minus).unwrap();
    emit(&s, r.output.as_deref().map(|p| (p, to_json(&st))))
}

fn cmd_current(common: &Common) -> CmdResult {
    let r = resolve(common, None)?;
    let eig = eigensystem(&r.system)?;
    let baths = r.baths()?;
    let mut s = String::new();
    let json = match r.lamb {
        LambMode::Off => {
            let j = transport::heat_current(&eig, &baths, Lamb::Off, &r.shift)?;
            writeln!(s, "J1 (no shift) {j:.12e}").unwrap();
            writeln!(s, "|J1|          {:.12e}", j.abs()).unwrap();
            writeln!(s, "supremum      {:.12e}", transport::current_supremum(&eig, &baths[0])).unwrap();
            serde_json::json!({ "j1_no_lamb": j })
        }
        LambMode::On | LambMode::Both => {
            let rep = transport::current_report(&eig, &baths, &r.shift)?;
            writeln!(s, "J1 (shifted)  {:.12e}", rep.j1_with_lamb).unwrap();
            if r.lamb == LambMode::Both {
                writeln!(s, "J1 (no shift) {:.12e}", rep.j1_no_lamb).unwrap();
                writeln!(s, "dJ (signed)   {:.12e}", rep.dj).unwrap();
                writeln!(s, "|J1d| - |J10| {:.12e}", rep.dj_magnitude()).unwrap();
            }
            writeln!(s, "J2 (shifted)  {:.12e}", rep.j2_with_lamb()).unwrap();
            writeln!(s, "delta1 {:.12e}  delta2 {:.12e}", rep.delta[0], rep.delta[1]).unwrap();
            writeln!(s, "margin1 {:.12e}  margin2 {:.12e}", rep.second_law_margin[0], rep.second_law_margin[1]).unwrap();
            writeln!(s, "supremum      {:.12e}", rep.supremum).unwrap();
            writeln!(s, "dJ10/dT2      {:.12e}", rep.slope_dt).unwrap();
            writeln!(s, "asympt_slope  {:.12e}", rep.asympt_slope).unwrap();
            to_json(&rep)
        }
    };
    emit(&s, r.output.as_deref().map(|p| (p, json)))
}

fn cmd_sweep(common: &Common, spec: Option<SweepSpec>) -> CmdResult {
    let r = resolve(common, spec)?;
    let grid_spec = r
        .sweep
        .clone()
        .ok_or_else(|| Failure::Usage("sweep needs a `sweep` section in the config or --min, --max and --points".into()))?;
    let eig = eigensystem(&r.system)?;
    r.baths()?;
    let rows = sweep::sweep(&eig, &grid_spec.grid(), |dt| r.baths_at(dt), r.lamb != LambMode::Off, &r.shift)?;
    let mut table: Table = sweep::sweep_table("sweep", &rows);
    let b = r.baths()?;
    let p = r.system;
    table.comments = vec![
        format!("eps1={}, eps2={}, g={}", p.eps1, p.eps2, p.g),
        format!(
            "bath1: T={}, gamma={}, omega_D={}, kind={}; bath2: gamma={}, omega_D={}, kind={}",
            b[0].temperature, b[0].gamma, b[0].omega_d, b[0].kind, b[1].gamma, b[1].omega_d, b[1].kind
        ),
        format!("lamb={:?}", r.lamb).to_lowercase(),
        CURRENT_NOTE.into(),
    ];
    let csv = table.to_csv_string();
    match &r.output {
        Some(path) => write_file(path, &csv),
        None => {
            std::io::stdout()
                .write_all(csv.as_bytes())
                .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

fn cmd_figure(preset: &str, out: &Path) -> CmdResult {
    presets::preset_cases(preset)?;
    let files = presets::write_preset(preset, out, &Default::default())?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn cmd_validate(level: &str, tamper: f64) -> CmdResult {
    let level: Level = level.parse()?;
    let opts = SuiteOptions {
        level,
        emission_scale: tamper,
    };
    let report = validate::run(&opts);
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        let lines: Vec<String> = report
            .failures()
            .map(|c| format!("{}: {} expected {} got {:e}", c.name, c.quantity, c.expected, c.got))
            .collect();
        Err(Failure::Validation(format!("failed checks:\n  {}", lines.join("\n  "))))
    }
}

fn threads_from_env() -> Result<(), Failure> {
    let Ok(value) = std::env::var("HEAT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("HEAT_THREADS must be a non-negative integer, got `{value}`")))?;
    qubit_heat::init_thread_pool(n);
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    threads_from_env()?;
    match cli.command {
        Command::Eigensystem(c) => cmd_eigensystem(&c),
        Command::LambShift(c) => cmd_lamb_shift(&c),
        Command::SteadyState(c) => cmd_steady_state(&c),
        Command::Current(c) => cmd_current(&c),
        Command::Sweep {
            common,
            min,
            max,
            points,
            scale,
        } => {
            let spec = match (min, max, points) {
                (None, None, None) if scale.is_none() => None,
                (Some(min), Some(max), Some(points)) => Some(SweepSpec {
                    variable: "dT".into(),
                    min,
                    max,
                    points,
                    scale: match scale.as_deref() {
                        Some("log") => GridScale::Log,
                        _ => GridScale::Linear,
                    },
                }),
                _ => return Err(Failure::Usage("--min, --max and --points must be given together".into())),
            };
            cmd_sweep(&common, spec)
        }
        Command::Figure { preset, out } => cmd_figure(&preset, &out),
        Command::Validate { level, tamper_rates } => cmd_validate(&level, tamper_rates),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            if f.code() == 2 {
                eprintln!("\n{}\nFor more information, try '--help'.", Cli::command().render_usage());
            }
            ExitCode::from(f.code())
        }
    }
}
