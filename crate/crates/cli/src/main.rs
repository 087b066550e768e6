//! `ditkit`: parse, simulate, compile and inspect DITQASM 2.0 programs.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage or I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ditkit_core::compiler::{compile, compile_report, parse_passes, PassName};
use ditkit_core::device::{load_device, Device};
use ditkit_core::noise::{run_noisy, NoiseModel};
use ditkit_core::qasm::{emit, parse_bytes};
use ditkit_core::sim::{simulate, Backend, DdState};
use ditkit_core::{Circuit, Error};

#[derive(Parser)]
#[command(name = "ditkit", version, about = "Toolchain for mixed-dimensional qudit circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a program and print it in canonical form.
    Parse(ParseArgs),
    /// Sample measurement counts, optionally under noise.
    Simulate(SimulateArgs),
    /// Run compiler passes and write the compiled program.
    Compile(CompileArgs),
    /// Print gate counts, depth and register sizes.
    Stats(InputArgs),
}

#[derive(Args)]
struct InputArgs {
    /// DITQASM source file.
    input: PathBuf,
}

#[derive(Args)]
struct ParseArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Write the canonical program here instead of stdout.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Simulation engine: dense or dd.
    #[arg(long, default_value = "dense", value_parser = parse_backend)]
    backend: Backend,
    /// Number of shots; 0 prints the final state only.
    #[arg(long, default_value_t = 1024)]
    shots: u64,
    /// Base seed for measurement and noise sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Noise model file (JSON).
    #[arg(long)]
    noise: Option<PathBuf>,
    /// Print nonzero amplitudes of the noiseless final state before the counts.
    #[arg(long)]
    dump_state: bool,
    /// Write stdout output here instead.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Device file, or the name of a bundled device.
    #[arg(long)]
    device: Option<String>,
    /// Comma-separated pass names. Defaults to the local and entangling
    /// passes, physical ones when a device is given.
    #[arg(long)]
    passes: Option<String>,
    /// Write the compiled program here; the report then goes to stdout.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn domain(err: Error) -> Self {
        let code = match err {
            Error::Io(_) => 2,
            _ => 1,
        };
        let message = match &err {
            Error::Parse(diags) => diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"),
            other => other.to_string(),
        };
        Failure { code, message }
    }
}

type CmdResult = Result<(), Failure>;

fn read_circuit(path: &Path) -> Result<Circuit, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse_bytes(&bytes).map_err(Failure::domain)
}

fn write_out(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::usage(e.to_string()))
        }
    }
}

fn cmd_parse(args: &ParseArgs) -> CmdResult {
    let circuit = read_circuit(&args.input.input)?;
    write_out(args.output.as_deref(), &emit(&circuit))
}

fn cmd_simulate(args: &SimulateArgs) -> CmdResult {
    let circuit = read_circuit(&args.input.input)?;
    let noise = match &args.noise {
        Some(p) => Some(NoiseModel::load(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let mut text = String::new();
    if args.dump_state || args.shots == 0 {
        text.push_str(&match args.backend {
            Backend::Dense => simulate(&circuit).map_err(Failure::domain)?.dump(),
            Backend::Dd => DdState::simulate(&circuit).map_err(Failure::domain)?.dump_amplitudes(),
        });
    }
    if args.shots > 0 {
        let counts = match &noise {
            Some(model) => run_noisy(&circuit, model, args.shots, args.seed, args.backend),
            None => match args.backend {
                Backend::Dense => simulate(&circuit).and_then(|s| s.sample(args.shots, args.seed)),
                Backend::Dd => DdState::simulate(&circuit).and_then(|s| s.sample(args.shots, args.seed)),
            },
        }
        .map_err(Failure::domain)?;
        text.push_str(&counts.to_tsv());
    }
    write_out(args.output.as_deref(), &text)
}

fn resolve_device(arg: &str) -> Result<Device, Failure> {
    let path = Path::new(arg);
    if path.exists() {
        return load_device(path).map_err(|e| Failure::usage(format!("{arg}: {e}")));
    }
    Device::bundled(arg).map_err(|_| Failure::usage(format!("{arg}: no such device file or bundled device")))
}

fn cmd_compile(args: &CompileArgs) -> CmdResult {
    let device = args.device.as_deref().map(resolve_device).transpose()?;
    let passes = match &args.passes {
        Some(list) => parse_passes(list).map_err(|e| Failure::usage(e.to_string()))?,
        None if device.is_some() => vec![PassName::PhyLocQRPass, PassName::PhyEntQRPass],
        None => vec![PassName::LogLocQRPass, PassName::LogEntQRPass],
    };
    if device.is_none() {
        if let Some(p) = passes.iter().find(|p| p.is_physical()) {
            return Err(Failure::usage(format!("{p} needs --device")));
        }
    }
    let circuit = read_circuit(&args.input.input)?;
    let compiled = compile(&circuit, device.as_ref(), &passes).map_err(Failure::domain)?;
    let report = compile_report(&circuit, &compiled, device.as_ref()).to_string();
    let program = emit(&compiled);
    match &args.output {
        Some(_) => {
            write_out(args.output.as_deref(), &program)?;
            write_out(None, &report)
        }
        None => {
            eprint!("{report}");
            write_out(None, &program)
        }
    }
}

fn cmd_stats(args: &InputArgs) -> CmdResult {
    let circuit = read_circuit(&args.input)?;
    let s = circuit.stats();
    let mut text = format!("qudits\t{}\n", s.qudits);
    let total = s.total_dim.map_or_else(|| "overflow".to_string(), |d| d.to_string());
    text.push_str(&format!("total_dim\t{total}\n"));
    text.push_str(&format!("gates\t{}\n", s.gates));
    text.push_str(&format!("entangling\t{}\n", s.entangling));
    text.push_str(&format!("measurements\t{}\n", s.measurements));
    text.push_str(&format!("depth\t{}\n", s.depth));
    for (name, n) in &s.gate_counts {
        text.push_str(&format!("count.{name}\t{n}\n"));
    }
    write_out(None, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Parse(a) => cmd_parse(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Compile(a) => cmd_compile(a),
        Command::Stats(a) => cmd_stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
