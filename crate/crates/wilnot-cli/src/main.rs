//! Command-line surface: synthesize circuits, simulate labels, run the
//! verification stack, export permutation matrices, print coefficient
//! traces, and analyze the even-dimension obstruction.
//!
//! Exit codes are a stable contract for scripting: 0 on success or a passing
//! check, 1 on a failed verification, 2 on usage or precondition errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wilnot::circuit::{Circuit, Variant};
use wilnot::modmath::Dimension;
use wilnot::sim;
use wilnot::synth;
use wilnot::verify::{self, CheckReport, CoeffTrace};

const CONVENTIONS: &str = "\
Conventions:
  Basis indices are big-endian: wire 0 is the most significant digit, so the
  basis state |x0 x1 ... x{n-1}> of a d-level register has index
  sum_k x_k * d^(n-1-k). Matrix exports place the 1 for input column c at
  output row perm(c).

Circuit JSON schema (UTF-8, no BOM; unknown fields rejected):
  {
    \"dimension\": <int >= 2>,
    \"wires\": <int>,
    \"variant\": \"prime\" | \"even\" | \"custom\",
    \"gates\": [{\"control\": <wire>, \"target\": <wire>, \"multiplicity\": <1..d-1>}],
    \"stages\": [{\"label\": <string>, \"from\": <gate index>, \"to\": <gate index>}]
  }
  A gate adds multiplicity * control onto its target, mod d. \"stages\" is
  optional; when present the ranges must partition the gate list in order.

Exit codes: 0 success/pass, 1 verification failure, 2 usage/precondition error.";

#[derive(Parser)]
#[command(
    name = "wilnot",
    version,
    about = "Synthesize and verify cyclic qudit SWAP networks built from generalized CNOT gates",
    after_help = CONVENTIONS
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Five-stage construction for prime d (exact cyclic SWAP).
    Prime,
    /// Even-d variant (cyclic SWAP up to a d-1 scalar on the last wire).
    Even,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Prime => Variant::Prime,
            VariantArg::Even => Variant::Even,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a circuit and print or save it.
    Synth {
        /// Qudit dimension (and wire count).
        #[arg(short, long)]
        dimension: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::Prime)]
        variant: VariantArg,
        /// Write to this path instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// text = annotated gate listing, json = circuit document.
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Run a comma-separated label tuple through the synthesized circuit.
    Simulate {
        #[arg(short, long)]
        dimension: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::Prime)]
        variant: VariantArg,
        /// Input labels, e.g. 0,1,2 (one per wire, each in 0..d).
        #[arg(long)]
        labels: String,
    },
    /// Verify the synthesized circuit against its defining map, plus the
    /// per-stage coefficient trace.
    Verify {
        #[arg(short, long)]
        dimension: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::Prime)]
        variant: VariantArg,
        /// Number of circuit repetitions; labels must shift by this amount
        /// (prime variant only).
        #[arg(long, default_value_t = 1)]
        shift: u64,
        /// Seed for sampled verification of large label spaces.
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        /// Worker threads for the exhaustive enumeration (1 = sequential).
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Export the basis permutation matrix of the circuit or a stage prefix.
    Matrix {
        #[arg(short, long)]
        dimension: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::Prime)]
        variant: VariantArg,
        /// Stop after this stage mark (e.g. stage2.step1, stage3); default
        /// is the whole circuit.
        #[arg(long)]
        prefix: Option<String>,
        /// text = sparse "in -> out" list, csv = dense 0/1 matrix,
        /// json = mapping array.
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the linear map over Z_d after every synthesis step.
    Trace {
        #[arg(short, long)]
        dimension: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::Prime)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Scan every unit scalar of an even dimension for the obstruction
    /// pair, and show what a double application of the even variant does.
    AnalyzeEven {
        #[arg(short, long)]
        dimension: u64,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

/// Failures carry their exit class: usage/precondition (2) or a failed
/// verification (1).
enum Failure {
    Usage(String),
    Check(String),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("FAIL: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Synth {
            dimension,
            variant,
            output,
            format,
        } => cmd_synth(dimension, variant, output.as_deref(), format),
        Command::Simulate {
            dimension,
            variant,
            labels,
        } => cmd_simulate(dimension, variant, &labels),
        Command::Verify {
            dimension,
            variant,
            shift,
            seed,
            threads,
            format,
        } => cmd_verify(dimension, variant, shift, seed, threads, format),
        Command::Matrix {
            dimension,
            variant,
            prefix,
            format,
            output,
        } => cmd_matrix(
            dimension,
            variant,
            prefix.as_deref(),
            format,
            output.as_deref(),
        ),
        Command::Trace {
            dimension,
            variant,
            format,
        } => cmd_trace(dimension, variant, format),
        Command::AnalyzeEven { dimension, format } => cmd_analyze_even(dimension, format),
    }
}

fn parse_dimension(d: u64) -> Result<Dimension, Failure> {
    Dimension::new(d).map_err(|e| usage(e.to_string()))
}

fn synthesize(d: Dimension, variant: VariantArg) -> Result<Circuit, Failure> {
    match variant {
        VariantArg::Prime => synth::wilnot(d).map_err(|e| usage(e.to_string())),
        VariantArg::Even => synth::wilnot_even(d).map_err(|e| usage(e.to_string())),
    }
}

fn emit(output: Option<&std::path::Path>, content: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, content)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn render_gate_listing(circuit: &Circuit) -> String {
    let mut out = format!(
        "# circuit d={} wires={} variant={} entries={} unit-gates={}\n",
        circuit.d(),
        circuit.wires(),
        circuit.variant(),
        circuit.gates().len(),
        circuit.gate_count()
    );
    let marks = circuit.stage_marks();
    if marks.is_empty() {
        for gate in circuit.gates() {
            out.push_str(&format!(
                "cnot {} -> {}  x{}\n",
                gate.control, gate.target, gate.multiplicity
            ));
        }
    } else {
        for mark in marks {
            if mark.from == mark.to {
                out.push_str(&format!("{}: (no gates)\n", mark.label));
                continue;
            }
            out.push_str(&format!("{}:\n", mark.label));
            for gate in &circuit.gates()[mark.from..mark.to] {
                out.push_str(&format!(
                    "  cnot {} -> {}  x{}\n",
                    gate.control, gate.target, gate.multiplicity
                ));
            }
        }
    }
    out
}

fn cmd_synth(
    d: u64,
    variant: VariantArg,
    output: Option<&std::path::Path>,
    format: FormatArg,
) -> Result<(), Failure> {
    let d = parse_dimension(d)?;
    let circuit = synthesize(d, variant)?;
    let content = match format {
        FormatArg::Json => circuit.serialize(),
        FormatArg::Text => render_gate_listing(&circuit),
        FormatArg::Csv => return Err(usage("csv is not a circuit format; use text or json")),
    };
    emit(output, content.trim_end())
}

fn cmd_simulate(d: u64, variant: VariantArg, labels: &str) -> Result<(), Failure> {
    let d = parse_dimension(d)?;
    let circuit = synthesize(d, variant)?;
    let parsed: Result<Vec<u64>, _> = labels
        .split(',')
        .map(|tok| tok.trim().parse::<u64>())
        .collect();
    let parsed = parsed.map_err(|e| usage(format!("bad label list '{labels}': {e}")))?;
    if parsed.len() != circuit.wires() {
        return Err(usage(format!(
            "expected {} labels for d={}, got {}",
            circuit.wires(),
            d,
            parsed.len()
        )));
    }
    let input = sim::LabelVector::new(d, parsed).map_err(|e| usage(e.to_string()))?;
    let output = sim::apply_labels(&circuit, &input).map_err(|e| usage(e.to_string()))?;
    let fmt = |xs: &[u64]| {
        xs.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    println!("input:  {}", fmt(input.labels()));
    println!("output: {}", fmt(output.labels()));
    Ok(())
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    check: &'a CheckReport,
    trace_pass: bool,
    trace_steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_error: Option<String>,
}

fn render_check_text(report: &CheckReport) -> String {
    let mut out = format!(
        "check={} d={} variant={} pass={} cases={} mode={}",
        report.check,
        report.d,
        report.variant,
        report.pass,
        report.cases,
        if report.exhaustive {
            "exhaustive"
        } else {
            "sampled"
        }
    );
    if let Some(cx) = &report.counterexample {
        out.push_str(&format!(
            "\ncounterexample: input={:?} expected={:?} got={:?}",
            cx.input, cx.expected, cx.got
        ));
    }
    out.push_str(&format!("\ndetail: {}", report.detail));
    out
}

fn run_label_check(
    circuit: &Circuit,
    variant: VariantArg,
    shift: u64,
    seed: u64,
    threads: usize,
) -> CheckReport {
    let shifted = shift % circuit.d();
    if threads > 1 {
        let pool = rayon_pool(threads);
        pool.install(|| match variant {
            VariantArg::Prime => verify::check_cyclic_parallel(circuit, shifted, seed),
            VariantArg::Even => verify::check_even_variant_parallel(circuit, seed),
        })
    } else {
        match variant {
            VariantArg::Prime => verify::check_cyclic(circuit, shifted, seed),
            VariantArg::Even => verify::check_even_variant(circuit, seed),
        }
    }
}

fn rayon_pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction")
}

fn cmd_verify(
    d: u64,
    variant: VariantArg,
    shift: u64,
    seed: u64,
    threads: usize,
    format: FormatArg,
) -> Result<(), Failure> {
    let d = parse_dimension(d)?;
    if variant == VariantArg::Even && shift != 1 {
        return Err(usage("--shift applies to the prime variant only"));
    }
    if shift == 0 {
        return Err(usage("--shift must be at least 1"));
    }
    let circuit = match variant {
        VariantArg::Prime => synth::wilnot_power(d, shift).map_err(|e| usage(e.to_string()))?,
        VariantArg::Even => synth::wilnot_even(d).map_err(|e| usage(e.to_string()))?,
    };
    let report = run_label_check(&circuit, variant, shift, seed, threads);
    let trace = verify::trace_stages(d, variant.into());
    let (trace_pass, trace_steps, trace_error) = match &trace {
        Ok(t) => (true, t.steps.len(), None),
        Err(e) => (false, 0, Some(e.to_string())),
    };

    match format {
        FormatArg::Json => {
            let doc = VerifyOutput {
                check: &report,
                trace_pass,
                trace_steps,
                trace_error,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializable")
            );
        }
        _ => {
            println!("{}", render_check_text(&report));
            match &trace {
                Ok(t) => println!(
                    "trace: {} step snapshots match their closed forms",
                    t.steps.len()
                ),
                Err(e) => println!("trace: FAILED ({e})"),
            }
        }
    }
    if report.pass && trace_pass {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "verification failed for d={} variant={:?}",
            d, variant
        )))
    }
}

fn cmd_matrix(
    d: u64,
    variant: VariantArg,
    prefix: Option<&str>,
    format: FormatArg,
    output: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let d = parse_dimension(d)?;
    let full = synthesize(d, variant)?;
    let (circuit, prefix_name) = match prefix {
        Some(label) => {
            let end = full
                .stage_end(label)
                .ok_or_else(|| usage(format!("unknown stage mark '{label}'")))?;
            (full.prefix(end), label.to_string())
        }
        None => (full.clone(), "full".to_string()),
    };
    let perm = sim::basis_permutation(&circuit).map_err(|e| usage(e.to_string()))?;
    let content = match format {
        FormatArg::Text => {
            let mut out = format!(
                "# permutation d={} wires={} prefix={} size={}\n",
                circuit.d(),
                circuit.wires(),
                prefix_name,
                perm.len()
            );
            for (input, &moved) in perm.mapping().iter().enumerate() {
                out.push_str(&format!("{input} -> {moved}\n"));
            }
            out
        }
        FormatArg::Csv => {
            let dense = perm.dense_matrix();
            let mut out = String::new();
            for row in dense {
                let line = row
                    .iter()
                    .map(|b| b.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                out.push_str(&line);
                out.push('\n');
            }
            out
        }
        FormatArg::Json => {
            #[derive(Serialize)]
            struct MatrixDoc<'a> {
                d: u64,
                wires: usize,
                prefix: &'a str,
                mapping: &'a [u32],
            }
            serde_json::to_string_pretty(&MatrixDoc {
                d: circuit.d(),
                wires: circuit.wires(),
                prefix: &prefix_name,
                mapping: perm.mapping(),
            })
            .expect("serializable")
        }
    };
    emit(output, content.trim_end())
}

fn render_trace_text(trace: &CoeffTrace) -> String {
    let printable: Vec<_> = trace.steps.iter().filter(|s| s.gates_in_step > 0).collect();
    let mut out = format!(
        "trace d={} variant={} snapshots={}\n",
        trace.d,
        trace.variant,
        printable.len()
    );
    for step in printable {
        out.push_str(&format!(
            "step j={} ({}), {} gate entries:\n",
            step.j, step.label, step.gates_in_step
        ));
        for row in step.map.rows() {
            let line = row
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&format!("  [{line}]\n"));
        }
    }
    out
}

fn cmd_trace(d: u64, variant: VariantArg, format: FormatArg) -> Result<(), Failure> {
    let d = parse_dimension(d)?;
    // surface variant preconditions as usage errors before tracing
    synthesize(d, variant)?;
    match verify::trace_stages(d, variant.into()) {
        Ok(trace) => {
            match format {
                FormatArg::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&trace).expect("serializable")
                ),
                _ => print!("{}", render_trace_text(&trace)),
            }
            Ok(())
        }
        Err(e) => Err(Failure::Check(format!("coefficient trace failed: {e}"))),
    }
}

fn cmd_analyze_even(d: u64, format: FormatArg) -> Result<(), Failure> {
    let dv = parse_dimension(d)?;
    let scan = verify::impossibility_scan(dv).map_err(|e| usage(e.to_string()))?;
    let even = synth::wilnot_even(dv).map_err(|e| usage(e.to_string()))?;
    let doubled = even.concat(&even).expect("same shape");
    let squared_map = sim::linear_map(&doubled);

    match format {
        FormatArg::Json => {
            #[derive(Serialize)]
            struct AnalyzeDoc<'a> {
                scan: &'a wilnot::verify::ScanReport,
                squared_map: &'a sim::LinearMapZd,
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&AnalyzeDoc {
                    scan: &scan,
                    squared_map: &squared_map,
                })
                .expect("serializable")
            );
        }
        _ => {
            println!("xi analysis for d={d}");
            println!(
                "{:<6} {:<6} {:<6} {:<7} unit-pair",
                "xi", "P_xi", "xi^2", "-xi^2"
            );
            for row in &scan.rows {
                println!(
                    "{:<6} {:<6} {:<6} {:<7} {}",
                    row.xi,
                    row.p_xi,
                    row.xi_squared,
                    row.neg_xi_squared,
                    if row.both_unit { "YES" } else { "no" }
                );
            }
            println!("verdict: {}", scan.detail);
            println!("double application of the even variant induces:");
            for row in squared_map.rows() {
                let line = row
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                println!("  [{line}]");
            }
        }
    }
    if scan.pass {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "a unit scalar pair exists at d={d}"
        )))
    }
}
