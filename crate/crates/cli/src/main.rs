use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qrl_gkp::compiler::{compile, verify_compilation, LogicalCircuit};
use qrl_gkp::gadget::{table_one, LogicalGate};
use qrl_gkp::gkp::variance_from_db;
use qrl_gkp::montecarlo::{simulate_gate, simulate_schedule, Decoder, Outcomes, SimConfig};
use qrl_gkp::noise::{gate_error_rate_db, required_squeezing, sweep, write_csv, SweepRow};
use qrl_gkp::symplectic::{verify_identity, IDENTITY_NAMES};

const IDENTITY_TRIALS: usize = 100;
const IDENTITY_TOLERANCE: f64 = 1e-12;
const DECAY_FACTOR: f64 = 2.0;

#[derive(Parser)]
#[command(
    name = "qrl-gkp",
    version,
    about = "GKP gates on quad-rail-lattice macronode cluster states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the registered circuit identities.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// List measurement angles per gate.
    Gates {
        #[arg(long, value_parser = parse_gate)]
        gate: Option<LogicalGate>,
        #[command(flatten)]
        out: Output,
    },
    /// Logical error rate of gates at one squeezing level.
    Rates {
        #[arg(long, value_parser = parse_gate)]
        gate: Option<LogicalGate>,
        #[arg(long, allow_negative_numbers = true)]
        db: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Error-rate curves over a range of squeezing levels.
    Sweep {
        #[arg(long, value_parser = parse_gate)]
        gate: Option<LogicalGate>,
        #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
        db_min: f64,
        #[arg(long, default_value_t = 18.0, allow_negative_numbers = true)]
        db_max: f64,
        #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u64).range(2..))]
        steps: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Squeezing needed for a gate to reach a target error rate, in dB.
    Required {
        #[arg(long, value_parser = parse_gate)]
        gate: LogicalGate,
        #[arg(long, value_parser = parse_probability)]
        perr: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Required squeezing for I, F, P(±1) and CZ(±1) at error rates 1e-2 and 1e-3.
    Table2 {
        #[command(flatten)]
        out: Output,
    },
    /// Compile a circuit file into a measurement schedule.
    Compile {
        #[arg(long)]
        circuit: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Monte Carlo estimate of error rates for a gate or a circuit.
    Simulate {
        #[command(flatten)]
        target: SimTarget,
        #[arg(long, allow_negative_numbers = true)]
        db: f64,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = DecoderArg::Threshold)]
        decoder: DecoderArg,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SimTarget {
    #[arg(long, value_parser = parse_gate)]
    gate: Option<LogicalGate>,
    #[arg(long)]
    circuit: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Threshold,
    Modular,
}

impl From<DecoderArg> for Decoder {
    fn from(d: DecoderArg) -> Self {
        match d {
            DecoderArg::Threshold => Decoder::Threshold,
            DecoderArg::Modular => Decoder::Modular,
        }
    }
}

fn parse_gate(s: &str) -> Result<LogicalGate, String> {
    s.parse().map_err(|e: qrl_gkp::Error| e.to_string())
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(format!("{p} is not in (0, 1)"))
    }
}

type Failure = Box<dyn std::error::Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Returns `Ok(false)` when the command ran but reported a failed check.
fn run(command: Command) -> Result<bool, Failure> {
    match command {
        Command::Verify { seed, out } => verify(seed, &out),
        Command::Gates { gate, out } => {
            gates(gate, &out)?;
            Ok(true)
        }
        Command::Rates { gate, db, out } => {
            let rows = selected(gate)
                .into_iter()
                .map(|g| {
                    Ok(SweepRow {
                        db,
                        gate: g,
                        p_err: gate_error_rate_db(g, db)?,
                    })
                })
                .collect::<qrl_gkp::Result<Vec<_>>>()?;
            emit_rows(&rows, &out)?;
            Ok(true)
        }
        Command::Sweep {
            gate,
            db_min,
            db_max,
            steps,
            out,
        } => {
            let rows = sweep(&selected(gate), db_min, db_max, steps as usize)?;
            emit_rows(&rows, &out)?;
            Ok(true)
        }
        Command::Required { gate, perr, out } => {
            let db = required_squeezing(gate, perr)?;
            let text = match out.format {
                Format::Csv => format!("{db:.1}\n"),
                Format::Json => format!(
                    "{}\n",
                    serde_json::json!({ "gate": gate, "p_err": perr, "db": db })
                ),
            };
            write_out(&out, &text)?;
            Ok(true)
        }
        Command::Table2 { out } => {
            table2(&out)?;
            Ok(true)
        }
        Command::Compile { circuit, out } => {
            let c = LogicalCircuit::from_json(&fs::read_to_string(&circuit)?)?;
            let schedule = compile(&c)?;
            let residual = verify_compilation(&c, &schedule)?;
            if residual >= IDENTITY_TOLERANCE {
                return Err(
                    format!("compiled schedule deviates from the circuit by {residual:e}").into(),
                );
            }
            write_out(&out, &format!("{}\n", schedule.to_json()?))?;
            Ok(true)
        }
        Command::Simulate {
            target,
            db,
            shots,
            seed,
            decoder,
            out,
        } => {
            let cfg = SimConfig::new(variance_from_db(db)?, shots, seed, decoder.into())?;
            let json = match (target.gate, target.circuit) {
                (Some(gate), _) => serde_json::to_string_pretty(&simulate_gate(gate, &cfg)?)?,
                (None, Some(path)) => {
                    let c = LogicalCircuit::from_json(&fs::read_to_string(&path)?)?;
                    let report = simulate_schedule(&compile(&c)?, &cfg, Outcomes::Zero)?;
                    serde_json::to_string_pretty(&report)?
                }
                (None, None) => unreachable!("clap requires a target"),
            };
            write_out(&out, &format!("{json}\n"))?;
            Ok(true)
        }
    }
}

fn selected(gate: Option<LogicalGate>) -> Vec<LogicalGate> {
    gate.map_or_else(|| LogicalGate::ALL.to_vec(), |g| vec![g])
}

fn write_out(out: &Output, text: &str) -> io::Result<()> {
    match &out.out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn emit_rows(rows: &[SweepRow], out: &Output) -> Result<(), Failure> {
    let text = match out.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(rows, &mut buf)?;
            String::from_utf8(buf)?
        }
        Format::Json => format!("{}\n", serde_json::to_string_pretty(rows)?),
    };
    Ok(write_out(out, &text)?)
}

#[derive(Serialize)]
struct IdentityRow {
    name: &'static str,
    trials: usize,
    residual: f64,
    decay_ratio: Option<f64>,
    pass: bool,
}

fn verify(seed: u64, out: &Output) -> Result<bool, Failure> {
    let target = (-4.0f64).exp();
    let mut rows = Vec::new();
    for (k, &name) in IDENTITY_NAMES.iter().enumerate() {
        let r = verify_identity::<f64>(name, IDENTITY_TRIALS, seed.wrapping_add(k as u64))?;
        let ratio = r.decay_ratio();
        let pass = match ratio {
            Some(x) => x >= target / DECAY_FACTOR && x <= target * DECAY_FACTOR,
            None => r.residual < IDENTITY_TOLERANCE,
        };
        rows.push(IdentityRow {
            name,
            trials: r.trials,
            residual: r.residual,
            decay_ratio: ratio,
            pass,
        });
    }
    let text = match out.format {
        Format::Csv => {
            let mut s = String::from("identity,trials,residual,decay_ratio,pass\n");
            for r in &rows {
                let ratio = r
                    .decay_ratio
                    .map(|x| format!("{x:.6e}"))
                    .unwrap_or_default();
                s += &format!(
                    "{},{},{:.3e},{},{}\n",
                    r.name, r.trials, r.residual, ratio, r.pass
                );
            }
            s
        }
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rows)?),
    };
    write_out(out, &text)?;
    Ok(rows.iter().all(|r| r.pass))
}

#[derive(Serialize)]
struct GateRow {
    gate: LogicalGate,
    arity: usize,
    angles_rad: Vec<f64>,
}

fn gates(gate: Option<LogicalGate>, out: &Output) -> Result<(), Failure> {
    let rows: Vec<GateRow> = table_one()
        .into_iter()
        .filter(|(g, _)| gate.is_none_or(|x| x == *g))
        .map(|(g, angles)| GateRow {
            gate: g,
            arity: g.arity(),
            angles_rad: angles,
        })
        .collect();
    let text = match out.format {
        Format::Csv => {
            let mut s = String::from("gate,arity,theta_a,theta_b,theta_c,theta_d\n");
            for r in &rows {
                let mut cells: Vec<String> =
                    r.angles_rad.iter().map(|a| format!("{a:.16e}")).collect();
                cells.resize(4, String::new());
                s += &format!("{},{},{}\n", r.gate, r.arity, cells.join(","));
            }
            s
        }
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rows)?),
    };
    Ok(write_out(out, &text)?)
}

#[derive(Serialize)]
struct RequiredRow {
    gate: LogicalGate,
    p_err: f64,
    db: f64,
}

fn table2(out: &Output) -> Result<(), Failure> {
    let gates = [
        LogicalGate::I,
        LogicalGate::F,
        LogicalGate::PPlus,
        LogicalGate::CzPlus,
    ];
    let mut rows = Vec::new();
    for p_err in [1e-2, 1e-3] {
        for gate in gates {
            rows.push(RequiredRow {
                gate,
                p_err,
                db: required_squeezing(gate, p_err)?,
            });
        }
    }
    let text = match out.format {
        Format::Csv => {
            let mut s = String::from("gate,p_err,db\n");
            for r in &rows {
                s += &format!("{},{:.0e},{:.1}\n", r.gate, r.p_err, r.db);
            }
            s
        }
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rows)?),
    };
    Ok(write_out(out, &text)?)
}
