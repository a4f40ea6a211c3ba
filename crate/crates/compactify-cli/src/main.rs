//! Command-line front end.
//!
//! Exit codes are part of the contract: 0 verified / condition holds, 1 the
//! shrinking condition fails, 2 internal invariant violation, 3 parse error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use compactify::pipeline::exit_code_for_error;
use compactify::{
    atomize_chain, build_witness_with, decompose, first_kind_chain, gen_system,
    second_kind_branches, verify_witness, Error, GeneratorConfig, Instance, OrderPolicy, Shape,
    TopologyWitness,
};

#[derive(Parser)]
#[command(name = "compactify", version, about = "Build and verify compact order topologies for shrinking selfmap systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Args)]
struct InputArgs {
    /// Instance file: {"size":…,"map":[…]} or {"ray":{…}}
    path: PathBuf,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the shrinking condition and report the eventual image
    Check(InputArgs),
    /// Split the instance into orbit classes or ray branches
    Decompose {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Atomize every class or branch chain into partition families
    Atomize(InputArgs),
    /// Build the full topology witness
    Compactify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Use seeded shuffled well-orders instead of the canonical ones
        #[arg(long, value_name = "SEED")]
        shuffle_orders: Option<u64>,
    },
    /// Build a witness, verify it independently, and report the pipeline
    Verify {
        #[command(flatten)]
        input: InputArgs,
        /// Use seeded shuffled well-orders instead of the canonical ones
        #[arg(long, value_name = "SEED")]
        shuffle_orders: Option<u64>,
        /// Verify this witness file instead of building one
        #[arg(long, value_name = "FILE")]
        witness: Option<PathBuf>,
    },
    /// Generate a seeded random instance satisfying the condition
    Gen {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// uniform, deep-chain, or wide-fan
        #[arg(long, default_value = "uniform")]
        shape: Shape,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the instance (or its witness) as DOT
    ExportDot {
        #[command(flatten)]
        input: InputArgs,
        /// Render the built witness with ranked levels and boxed atoms
        #[arg(long)]
        witness: bool,
    },
}

fn read_instance(path: &PathBuf) -> Result<Instance, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    Instance::from_json_str(&text)
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| {
            Error::Parse(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{content}") {
                Ok(()) => Ok(()),
                // a downstream reader hanging up is not our error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(Error::Parse(format!("cannot write to stdout: {e}"))),
            }
        }
    }
}

fn policy_from(shuffle_orders: Option<u64>) -> OrderPolicy {
    match shuffle_orders {
        Some(seed) => OrderPolicy::Shuffled(seed),
        None => OrderPolicy::Canonical,
    }
}

fn pretty(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize infallibly")
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Check(input) => {
            let instance = read_instance(&input.path)?;
            let report = instance.check()?;
            let holds = report.holds;
            emit(&input.out, &pretty(&report))?;
            Ok(if holds { 0 } else { 1 })
        }
        Command::Decompose { input, format } => {
            let instance = read_instance(&input.path)?;
            let report = instance.check()?;
            if !report.holds {
                emit(&input.out, &pretty(&report))?;
                return Ok(1);
            }
            let content = match (&instance, format) {
                (Instance::Finite(system), Format::Json) => pretty(&decompose(system)?),
                (Instance::Ray(envelope), Format::Json) => {
                    pretty(&second_kind_branches(&envelope.ray)?)
                }
                (_, Format::Dot) => {
                    let witness = build_witness_with(&instance, OrderPolicy::Canonical)?;
                    compactify::dot::export_witness_dot(&witness)
                }
            };
            emit(&input.out, &content)?;
            Ok(0)
        }
        Command::Atomize(input) => {
            let instance = read_instance(&input.path)?;
            let report = instance.check()?;
            if !report.holds {
                emit(&input.out, &pretty(&report))?;
                return Ok(1);
            }
            let mut entries = Vec::new();
            match &instance {
                Instance::Finite(system) => {
                    let decomposition = decompose(system)?;
                    for class in &decomposition.classes {
                        let chain = first_kind_chain(system, class)?;
                        let atomization = atomize_chain(&chain)?;
                        entries.push(serde_json::json!({
                            "seed": class.seed,
                            "members": class.members,
                            "chain": chain,
                            "atomization": atomization,
                        }));
                    }
                }
                Instance::Ray(envelope) => {
                    for branch in second_kind_branches(&envelope.ray)? {
                        let atomization = atomize_chain(&branch.chain)?;
                        entries.push(serde_json::json!({
                            "ray_index": branch.ray_index,
                            "chain": branch.chain,
                            "atomization": atomization,
                        }));
                    }
                }
            }
            emit(&input.out, &pretty(&entries))?;
            Ok(0)
        }
        Command::Compactify {
            input,
            format,
            shuffle_orders,
        } => {
            let instance = read_instance(&input.path)?;
            let report = instance.check()?;
            if !report.holds {
                emit(&input.out, &pretty(&report))?;
                return Ok(1);
            }
            let witness = build_witness_with(&instance, policy_from(shuffle_orders))?;
            let content = match format {
                Format::Json => pretty(&witness),
                Format::Dot => compactify::dot::export_witness_dot(&witness),
            };
            emit(&input.out, &content)?;
            Ok(0)
        }
        Command::Verify {
            input,
            shuffle_orders,
            witness,
        } => {
            let instance = read_instance(&input.path)?;
            match witness {
                Some(witness_path) => {
                    let text = fs::read_to_string(&witness_path).map_err(|e| {
                        Error::Parse(format!("cannot read {}: {e}", witness_path.display()))
                    })?;
                    let witness = TopologyWitness::from_json_str(&text)?;
                    let report = verify_witness(&instance, &witness)?;
                    let passed = report.passed;
                    emit(&input.out, &pretty(&report))?;
                    Ok(if passed { 0 } else { 2 })
                }
                None => {
                    let report = compactify::run_pipeline_instance(
                        &instance,
                        policy_from(shuffle_orders),
                    );
                    let code = report.exit_code();
                    emit(&input.out, &report.to_json_string())?;
                    Ok(code)
                }
            }
        }
        Command::Gen {
            size,
            seed,
            shape,
            out,
        } => {
            let system = gen_system(&GeneratorConfig { size, seed, shape })?;
            let instance = Instance::finite(system);
            emit(&out, &instance.to_json_string())?;
            Ok(0)
        }
        Command::ExportDot { input, witness } => {
            let instance = read_instance(&input.path)?;
            let content = match (&instance, witness) {
                (Instance::Finite(system), false) => compactify::dot::export_system_dot(system),
                _ => {
                    let built = build_witness_with(&instance, OrderPolicy::Canonical)?;
                    compactify::dot::export_witness_dot(&built)
                }
            };
            emit(&input.out, &content)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for_error(&e) as u8)
        }
    }
}
