//! Command-line front end for the monadec library.
//!
//! Exit codes of `decide`: 0 when the relation is monadic decomposable,
//! 1 when it is not, 2 on any input or usage error. The other commands use
//! 0 for success and 2 for errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use monadec::generators::{
    dag_reduction, equal_length, equality, random_automaton, random_dag, strict_prefix,
    universality_reduction, ReductionInstance,
};
use monadec::{
    build_not_sim_parts, decide_binary_threads, decide_nary_threads, dot, expand_family,
    induced::induced_binary, ops, text, validate_certificate_report, Alphabet, Certificate,
    Decision, KReport, MultiTapeAutomaton, Verdict,
};

#[derive(Parser)]
#[command(
    name = "monadec",
    version,
    about = "Decide monadic decomposability of regular relations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether the relation in FILE is monadic decomposable.
    Decide(DecideArgs),
    /// Generate a relation with independently computed ground truth.
    #[command(subcommand)]
    Gen(GenFamily),
    /// Apply one automaton operation and write the result.
    #[command(subcommand)]
    Ops(OpCmd),
    /// Export an automaton as a Graphviz digraph.
    ExportDot {
        path: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DecideArgs {
    path: PathBuf,
    /// Print the report as JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the certificate document here when the verdict is
    /// not_decomposable.
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Also print the expanded family x_0..x_k of pairwise
    /// distinguishable words.
    #[arg(long, value_name = "K")]
    family: Option<usize>,
    /// Re-validate the certificate against the distinguishability
    /// automaton before printing anything.
    #[arg(long)]
    validate: bool,
    /// Worker threads for the quadruple search.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum GenFamily {
    /// Universality reduction over a seeded random unary NFA on {a, b}.
    Universality {
        #[arg(long, default_value_t = 4)]
        states: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long)]
        seed: u64,
        /// Instance file; the ground-truth sidecar lands next to it with a
        /// .truth suffix.
        #[arg(long)]
        out: PathBuf,
    },
    /// Reachability reduction over a seeded random DAG.
    Dag {
        #[arg(long, default_value_t = 8)]
        vertices: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// A fixed named relation over {a, b}.
    Canonical {
        /// One of: equality, strict_prefix, equal_length.
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum OpCmd {
    /// Build the distinguishability automaton of a binary relation.
    Notsim {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complement within the validly padded words.
    Complement {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Intersection of two same-shape relations.
    Product {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Project one tape away.
    Project {
        tape: usize,
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical minimal DFA for the padded language.
    Minimize {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Induced binary relation R_k: tapes 1..k packed against the rest.
    Induced {
        k: usize,
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode> {
    match Cli::parse().cmd {
        Cmd::Decide(args) => cmd_decide(args),
        Cmd::Gen(family) => cmd_gen(family),
        Cmd::Ops(op) => cmd_ops(op),
        Cmd::ExportDot { path, out } => {
            let a = load(&path)?;
            emit(out.as_deref(), &dot::to_dot(&a))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load(path: &Path) -> Result<MultiTapeAutomaton> {
    let input =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text::parse_automaton(&input).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Family size used when re-validating certificates.
const FAMILY_CHECK: usize = 10;

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Decomposable => "decomposable",
        Verdict::NotDecomposable => "not_decomposable",
    }
}

fn cmd_decide(args: DecideArgs) -> Result<ExitCode> {
    let r = load(&args.path)?;
    let started = Instant::now();
    // Binary inputs are decided on their own alphabet; wider relations go
    // through the induced binary splits.
    let (decision, not_sim) = if r.arity() == 2 {
        let parts = build_not_sim_parts(&r)?;
        let bd = decide_binary_threads(&parts.automaton, args.threads)?;
        let decision = Decision {
            verdict: bd.verdict,
            failing_k: (!bd.verdict.decomposable()).then_some(1),
            certificate: bd.certificate,
            per_k: vec![KReport {
                k: 1,
                verdict: bd.verdict,
                not_sim_states: parts.automaton.num_states(),
                pre_projection_states: parts.pre_projection_states,
                quadruples_examined: bd.quadruples_examined,
            }],
        };
        (decision, Some(parts.automaton))
    } else {
        let decision = decide_nary_threads(&r, args.threads)?;
        let not_sim = match decision.failing_k {
            // Rebuilt deterministically for validation and word display.
            Some(k) => Some(build_not_sim_parts(&induced_binary(&r, k)?)?.automaton),
            None => None,
        };
        (decision, not_sim)
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    if args.validate {
        let (c, n) = certificate_parts(&decision, &not_sim)?;
        if let Err(msg) = validate_certificate_report(c, n, FAMILY_CHECK) {
            bail!("certificate failed re-validation: {msg}");
        }
    }
    if let Some(out) = &args.certificate {
        let (c, n) = certificate_parts(&decision, &not_sim)?;
        std::fs::write(out, certificate_document(c, n.alphabet())?)
            .with_context(|| format!("writing {}", out.display()))?;
    }

    if args.json {
        println!("{}", report_json(&r, &decision, &not_sim, wall_ms)?);
    } else {
        print!("{}", report_text(&r, &decision, &args, &not_sim, wall_ms)?);
    }
    Ok(if decision.verdict.decomposable() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn certificate_parts<'d>(
    decision: &'d Decision,
    not_sim: &'d Option<MultiTapeAutomaton>,
) -> Result<(&'d Certificate, &'d MultiTapeAutomaton)> {
    match (&decision.certificate, not_sim) {
        (Some(c), Some(n)) => Ok((c, n)),
        _ => bail!("the verdict is decomposable, so there is no certificate"),
    }
}

fn certificate_document(c: &Certificate, alphabet: &Alphabet) -> Result<String> {
    let word = |w: &[usize]| alphabet.display_word(w);
    let mut out = String::new();
    writeln!(out, "q {}", c.q)?;
    writeln!(out, "qp {}", c.qp)?;
    writeln!(out, "p {}", c.p)?;
    writeln!(out, "r {}", c.r)?;
    writeln!(out, "w0 {}", word(&c.w0)?)?;
    writeln!(out, "v0 {}", word(&c.v0)?)?;
    writeln!(out, "w1 {}", word(&c.w1)?)?;
    writeln!(out, "v1 {}", word(&c.v1)?)?;
    writeln!(out, "w {}", word(&c.w)?)?;
    writeln!(out, "v {}", word(&c.v)?)?;
    Ok(out)
}

fn report_text(
    r: &MultiTapeAutomaton,
    decision: &Decision,
    args: &DecideArgs,
    not_sim: &Option<MultiTapeAutomaton>,
    wall_ms: f64,
) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "input states: {}", r.num_states())?;
    for k in &decision.per_k {
        writeln!(
            out,
            "k={}: {} (notsim states {}, pre-projection states {}, quadruples examined {})",
            k.k,
            verdict_str(k.verdict),
            k.not_sim_states,
            k.pre_projection_states,
            k.quadruples_examined
        )?;
    }
    writeln!(out, "verdict: {}", verdict_str(decision.verdict))?;
    if let Some(k) = decision.failing_k {
        writeln!(out, "failing k: {k}")?;
    }
    if let (Some(c), Some(n)) = (&decision.certificate, not_sim) {
        writeln!(
            out,
            "certificate: q={} qp={} p={} r={}",
            c.q, c.qp, c.p, c.r
        )?;
        if let Some(path) = &args.certificate {
            writeln!(out, "certificate written to {}", path.display())?;
        }
        if args.validate {
            writeln!(
                out,
                "certificate re-validated with a family of {} words",
                FAMILY_CHECK + 1
            )?;
        }
        if let Some(k) = args.family {
            let family = expand_family(c, k)?;
            writeln!(out, "family:")?;
            for (i, x) in family.iter().enumerate() {
                writeln!(out, "x{i} {}", n.alphabet().display_word(x)?)?;
            }
        }
    }
    writeln!(out, "wall time: {wall_ms:.1} ms")?;
    Ok(out)
}

fn report_json(
    r: &MultiTapeAutomaton,
    decision: &Decision,
    not_sim: &Option<MultiTapeAutomaton>,
    wall_ms: f64,
) -> Result<String> {
    let certificate = match (&decision.certificate, not_sim) {
        (Some(c), Some(n)) => {
            let words = |w: &[usize]| -> Result<Vec<String>> {
                w.iter()
                    .map(|&i| Ok(n.alphabet().symbol(i)?.to_string()))
                    .collect()
            };
            serde_json::json!({
                "q": c.q,
                "qp": c.qp,
                "p": c.p,
                "r": c.r,
                "w0": words(&c.w0)?,
                "v0": words(&c.v0)?,
                "w1": words(&c.w1)?,
                "v1": words(&c.v1)?,
                "w": words(&c.w)?,
                "v": words(&c.v)?,
            })
        }
        _ => serde_json::Value::Null,
    };
    let per_k: Vec<serde_json::Value> = decision
        .per_k
        .iter()
        .map(|k| {
            serde_json::json!({
                "k": k.k,
                "verdict": verdict_str(k.verdict),
                "not_sim_states": k.not_sim_states,
                "pre_projection_states": k.pre_projection_states,
                "quadruples_examined": k.quadruples_examined,
            })
        })
        .collect();
    let report = serde_json::json!({
        "verdict": verdict_str(decision.verdict),
        "failing_k": decision.failing_k,
        "certificate": certificate,
        "stats": {
            "input_states": r.num_states(),
            "per_k": per_k,
            "wall_time_ms": wall_ms,
        },
    });
    Ok(serde_json::to_string_pretty(&report)?)
}

fn cmd_gen(family: GenFamily) -> Result<ExitCode> {
    let ab = Alphabet::base("ab").expect("fixed alphabet");
    let (instance, out) = match family {
        GenFamily::Universality {
            states,
            density,
            seed,
            out,
        } => {
            if states == 0 {
                bail!("--states must be at least 1");
            }
            if !(density > 0.0 && density <= 1.0) {
                bail!("--density must be in (0, 1]");
            }
            let a = random_automaton(&ab, 1, states, density, false, seed)?;
            (universality_reduction(&a)?, out)
        }
        GenFamily::Dag {
            vertices,
            seed,
            out,
        } => {
            if vertices < 2 {
                bail!("--vertices must be at least 2");
            }
            let g = random_dag(seed, vertices);
            (dag_reduction(&g)?, out)
        }
        GenFamily::Canonical { name, out } => {
            let (relation, ground_truth) = match name.as_str() {
                "equality" => (equality(&ab), Verdict::NotDecomposable),
                "strict_prefix" => (strict_prefix(&ab), Verdict::NotDecomposable),
                "equal_length" => (equal_length(&ab), Verdict::NotDecomposable),
                other => bail!("unknown canonical relation '{other}' (expected equality, strict_prefix or equal_length)"),
            };
            let instance = ReductionInstance {
                relation,
                ground_truth,
                provenance: format!("canonical relation: {name}"),
            };
            (instance, out)
        }
    };
    std::fs::write(&out, text::print_automaton(&instance.relation))
        .with_context(|| format!("writing {}", out.display()))?;
    let sidecar = sidecar_path(&out);
    let truth = format!(
        "ground_truth {}\nprovenance {}\n",
        verdict_str(instance.ground_truth),
        instance.provenance
    );
    std::fs::write(&sidecar, truth).with_context(|| format!("writing {}", sidecar.display()))?;
    println!("wrote {} and {}", out.display(), sidecar.display());
    Ok(ExitCode::SUCCESS)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".truth");
    PathBuf::from(name)
}

fn cmd_ops(op: OpCmd) -> Result<ExitCode> {
    let (result, out) = match op {
        OpCmd::Notsim { path, out } => {
            let r = load(&path)?;
            (monadec::build_not_sim(&r)?, out)
        }
        OpCmd::Complement { path, out } => (ops::complement_padded(&load(&path)?), out),
        OpCmd::Product { a, b, out } => (
            ops::boolean_product(&load(&a)?, &load(&b)?, ops::BoolOp::And)?,
            out,
        ),
        OpCmd::Project { tape, path, out } => (ops::project(&load(&path)?, tape)?, out),
        OpCmd::Minimize { path, out } => (ops::minimize(&load(&path)?), out),
        OpCmd::Induced { k, path, out } => (induced_binary(&load(&path)?, k)?, out),
    };
    emit(out.as_deref(), &text::print_automaton(&result))?;
    Ok(ExitCode::SUCCESS)
}
