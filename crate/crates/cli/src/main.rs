use std::collections::HashSet;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nmproof::circuits::{
    check_interpolates_bounded, check_separates, to_bounded_fanin, CircuitError, CliqueColouringPair,
    MonotoneCircuit, DEFAULT_BUDGET_BITS,
};
use nmproof::dag::parse_dag_text;
use nmproof::formula::{parse_formula_lenient, Formula, FormulaSeq};
use nmproof::frege::{check_frege_dag, check_frege_seq, frege_metrics, seq_to_dag, FregeDag, FregeSeq};
use nmproof::interp::{extract_disjunct, extract_interpolant, InterpError};
use nmproof::natded::{check_nm, nm_metrics, NmDerivation};
use nmproof::semantics::{parse_formula_lines, Assignment, DecideError, Decider, Decision, DEFAULT_BUDGET};
use nmproof::tautgen::{build_tau, make_shape, specialize_to_cc, TAU_SIZE_CONSTANT};
use nmproof::transforms::{
    deduction, frege_dag_to_tree, frege_to_nm, nm_to_frege, nm_to_tree, Mode, TransformError, TransformReport,
};

const STACK_BYTES: usize = 1 << 29;
/// Default search budget of `pipeline`; τ₃ needs well over the general default.
const PIPELINE_BUDGET: usize = 50_000_000;

#[derive(Parser)]
#[command(name = "nmproof", version, about = "Implicational proofs: generate, check, translate, interpolate")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Opts {
    /// Seed for randomized steps (printed in every report).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search budget in states (decision procedure) or output lines (translations).
    #[arg(long, global = true)]
    budget_nodes: Option<usize>,
    /// Largest number of variables enumerated exhaustively.
    #[arg(long, global = true)]
    budget_bits: Option<usize>,
    /// Directory for written artifacts; without it they go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a tautology instance or Clique-Colouring metadata.
    Gen {
        kind: GenKind,
        #[arg(long)]
        n: usize,
    },
    /// Check a proof file against assumptions and a goal.
    Check {
        system: System,
        proof: PathBuf,
        assumptions: PathBuf,
        goal: String,
    },
    /// Run an end-to-end pipeline.
    Pipeline {
        what: PipelineKind,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Use this natural deduction proof instead of searching for one.
        #[arg(long)]
        proof: Option<PathBuf>,
    },
    /// Translate a proof between systems.
    Translate {
        #[arg(long)]
        from: System,
        #[arg(long)]
        to: Target,
        #[arg(long, default_value = "basic")]
        mode: ModeArg,
        /// Assumptions (one per line, in order) to move into the conclusion.
        #[arg(long)]
        discharge: Option<PathBuf>,
        proof: PathBuf,
        assumptions: PathBuf,
    },
    /// Extract information from a natural deduction proof.
    Extract {
        #[command(subcommand)]
        what: ExtractCmd,
    },
    /// Monotone circuit utilities.
    Circuit {
        #[command(subcommand)]
        what: CircuitCmd,
    },
    /// Print size measures of a proof.
    Metrics { system: System, proof: PathBuf },
    /// Decide a goal from assumptions, writing a proof or a countermodel.
    Decide {
        goal: String,
        #[arg(long)]
        assumptions: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Tau,
    Cc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum System {
    Nm,
    FregeSeq,
    FregeDag,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Nm,
    Frege,
    Tree,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Basic,
    Ret,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineKind {
    Tau,
}

#[derive(Subcommand)]
enum ExtractCmd {
    /// Which disjunct of `(a0 -> u) -> (a1 -> u) -> u` is provable.
    Disjunct {
        proof: PathBuf,
        #[arg(long, default_value = "u")]
        u: String,
    },
    /// Monotone interpolant from a proof of the n-th tautology.
    Interpolant {
        proof: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum CircuitCmd {
    /// Evaluate under `x=1,y=0`.
    Eval {
        circuit: PathBuf,
        #[arg(long, default_value = "")]
        assign: String,
    },
    /// Rewrite to fan-in at most two.
    Fanin2 { circuit: PathBuf },
    /// Check separation of the Clique-Colouring pair.
    Separate {
        circuit: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

/// How a command failed; each maps to an exit code.
enum Failure {
    Reject(String),
    Usage(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Reject(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Reject(m) | Failure::Usage(m) | Failure::Budget(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Failure {
        match e {
            DecideError::Budget(_) => Failure::Budget(e.to_string()),
            #[allow(unreachable_patterns)]
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<CircuitError> for Failure {
    fn from(e: CircuitError) -> Failure {
        match e {
            CircuitError::Budget(..) => Failure::Budget(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<InterpError> for Failure {
    fn from(e: InterpError) -> Failure {
        match e {
            InterpError::TooLarge(..) => Failure::Budget(e.to_string()),
            InterpError::ShapeMismatch(_) | InterpError::VariableOccurs(_) | InterpError::Shape(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Reject(e.to_string()),
        }
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Failure {
        match e {
            TransformError::InvalidInput(_) | TransformError::OutputRejected(_) => Failure::Reject(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Writes artifacts to `--out` or, failing that, to stdout.
struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    fn write(&self, name: &str, text: &str) -> Result<(), Failure> {
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
                let path = dir.join(name);
                fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                println!("wrote {}", path.display());
            }
            None => {
                println!("--- {name}");
                print!("{text}");
                println!("--- end {name}");
            }
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_formulas(path: &Path) -> Result<Vec<Formula>, Failure> {
    parse_formula_lines(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_nm(path: &Path) -> Result<NmDerivation, Failure> {
    let dag = parse_dag_text(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(NmDerivation::from_dag(dag))
}

fn read_frege(path: &Path, system: System, gamma: &HashSet<Formula>) -> Result<FregeDag, Failure> {
    match system {
        System::FregeDag => {
            let dag = parse_dag_text(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Ok(FregeDag::from_dag(dag))
        }
        System::FregeSeq => {
            let seq = FregeSeq::new(read_formulas(path)?).map_err(usage)?;
            seq_to_dag(&seq, gamma).map_err(|e| Failure::Reject(e.to_string()))
        }
        System::Nm => Err(usage("not a Frege system")),
    }
}

fn parse_goal(s: &str) -> Result<Formula, Failure> {
    parse_formula_lenient(s).map_err(|e| usage(format!("goal: {e}")))
}

/// Writes a natural deduction proof and checks the written text again.
fn emit_nm(sink: &Sink, name: &str, d: &NmDerivation, gamma: &HashSet<Formula>, goal: &Formula) -> Outcome {
    let text = d.dag().to_text();
    let back = parse_dag_text(&text).map_err(|e| Failure::Reject(format!("recheck {name}: {e}")))?;
    let verdict = check_nm(&NmDerivation::from_dag(back), gamma, goal);
    println!("recheck {name} {verdict}");
    if !verdict.accepted() {
        return Err(Failure::Reject(format!("recheck {name}: {verdict}")));
    }
    sink.write(name, &text)
}

fn emit_frege(sink: &Sink, name: &str, d: &FregeDag, gamma: &HashSet<Formula>, goal: &Formula) -> Outcome {
    let text = d.to_text();
    let back = parse_dag_text(&text).map_err(|e| Failure::Reject(format!("recheck {name}: {e}")))?;
    let verdict = check_frege_dag(&FregeDag::from_dag(back), gamma, goal);
    println!("recheck {name} {verdict}");
    if !verdict.accepted() {
        return Err(Failure::Reject(format!("recheck {name}: {verdict}")));
    }
    sink.write(name, &text)
}

fn read_circuit(path: &Path) -> Result<MonotoneCircuit, Failure> {
    MonotoneCircuit::from_text(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cmd_gen(sink: &Sink, kind: GenKind, n: usize) -> Outcome {
    match kind {
        GenKind::Tau => {
            let inst = build_tau(n).map_err(usage)?;
            let size = inst.tau.size();
            println!("tau n={n} k={} size={size}", inst.k);
            println!("size/n^3={:.4} fitted={TAU_SIZE_CONSTANT}", size as f64 / (n * n * n) as f64);
            sink.write(&format!("tau_{n}.txt"), &format!("{}\n", inst.tau))
        }
        GenKind::Cc => {
            let pair = CliqueColouringPair::new(n).map_err(usage)?;
            let vars = pair.vars();
            println!("cc n={n} k={} |X_n|={}", pair.k, vars.len());
            let mut text = format!("n {n}\nk {}\nedges {}\n", pair.k, vars.len());
            for v in &vars {
                text.push_str(&format!("var {v}\n"));
            }
            sink.write(&format!("cc_{n}.txt"), &text)
        }
    }
}

fn cmd_check(system: System, proof: &Path, assumptions: &Path, goal: &str) -> Outcome {
    let gamma: HashSet<Formula> = read_formulas(assumptions)?.into_iter().collect();
    let goal = parse_goal(goal)?;
    let (verdict, metrics) = match system {
        System::Nm => {
            let d = read_nm(proof)?;
            (check_nm(&d, &gamma, &goal), nm_metrics(&d))
        }
        System::FregeSeq => {
            let seq = FregeSeq::new(read_formulas(proof)?).map_err(usage)?;
            let m = nmproof::frege::frege_seq_metrics(&seq, &gamma).ok();
            let v = check_frege_seq(&seq, &gamma, &goal);
            match m {
                Some(m) => (v, m),
                None => {
                    println!("verdict {v}");
                    return if v.accepted() { Ok(()) } else { Err(Failure::Reject(v.to_string())) };
                }
            }
        }
        System::FregeDag => {
            let d = read_frege(proof, system, &gamma)?;
            (check_frege_dag(&d, &gamma, &goal), frege_metrics(&d))
        }
    };
    println!("metrics {metrics}");
    println!("verdict {verdict}");
    if verdict.accepted() {
        Ok(())
    } else {
        Err(Failure::Reject(verdict.to_string()))
    }
}

fn cmd_metrics(system: System, proof: &Path) -> Outcome {
    let m = match system {
        System::Nm => nm_metrics(&read_nm(proof)?),
        System::FregeDag => frege_metrics(&read_frege(proof, system, &HashSet::new())?),
        System::FregeSeq => {
            let seq = FregeSeq::new(read_formulas(proof)?).map_err(usage)?;
            let dag = seq_to_dag(&seq, &HashSet::new()).map_err(|e| Failure::Reject(e.to_string()))?;
            frege_metrics(&dag)
        }
    };
    println!("metrics {m}");
    Ok(())
}

fn cmd_decide(sink: &Sink, opts: &Opts, goal: &str, assumptions: Option<&Path>) -> Outcome {
    let gamma = match assumptions {
        Some(p) => read_formulas(p)?,
        None => vec![],
    };
    let goal = parse_goal(goal)?;
    let mut decider = Decider::new(opts.budget_nodes.unwrap_or(DEFAULT_BUDGET));
    match decider.decide(&gamma, &goal)? {
        Decision::Valid(d) => {
            println!("decision VALID nodes={}", d.len());
            let set: HashSet<Formula> = gamma.into_iter().collect();
            emit_nm(sink, "proof.nm", &d, &set, &goal)
        }
        Decision::Invalid { model, root } => {
            println!("decision INVALID root={}", model.worlds()[root]);
            sink.write("countermodel.txt", &model.to_text())?;
            Err(Failure::Reject("not valid".into()))
        }
    }
}

fn check_budget(opts: &Opts, report: &TransformReport) -> Outcome {
    match opts.budget_nodes {
        Some(b) if report.output.lines > b => Err(Failure::Budget(format!(
            "output has {} lines, budget {b}",
            report.output.lines
        ))),
        _ => Ok(()),
    }
}

fn cmd_translate(
    sink: &Sink,
    opts: &Opts,
    from: System,
    to: Target,
    mode: ModeArg,
    discharge: Option<&Path>,
    proof: &Path,
    assumptions: &Path,
) -> Outcome {
    let gamma: HashSet<Formula> = read_formulas(assumptions)?.into_iter().collect();
    let mode = match mode {
        ModeArg::Basic => Mode::Basic,
        ModeArg::Ret => Mode::Ret,
    };
    match (from, to) {
        (System::Nm, Target::Frege) => {
            let d = read_nm(proof)?;
            let phi = d.root_label().clone();
            let (out, report) = nm_to_frege(&d, &gamma, &phi, mode)?;
            println!("{report}");
            check_budget(opts, &report)?;
            emit_frege(sink, "translated.frege", &out, &gamma, &phi)
        }
        (System::Nm, Target::Tree) => {
            let d = read_nm(proof)?;
            let phi = d.root_label().clone();
            let ((fd, nm), report) = nm_to_tree(&d, &gamma, &phi)?;
            println!("{report}");
            check_budget(opts, &report)?;
            emit_frege(sink, "tree.frege", &fd, &gamma, &phi)?;
            emit_nm(sink, "tree.nm", &nm, &gamma, &phi)
        }
        (System::FregeDag | System::FregeSeq, Target::Nm) => {
            let pi = read_frege(proof, from, &gamma)?;
            let phi = pi.root_label().clone();
            let (d, report) = frege_to_nm(&pi, &gamma, &phi)?;
            println!("{report}");
            check_budget(opts, &report)?;
            emit_nm(sink, "translated.nm", &d, &gamma, &phi)
        }
        (System::FregeDag | System::FregeSeq, Target::Tree) => {
            let pi = read_frege(proof, from, &gamma)?;
            let phi = pi.root_label().clone();
            let (out, report) = frege_dag_to_tree(&pi, &gamma, &phi)?;
            println!("{report}");
            check_budget(opts, &report)?;
            emit_frege(sink, "tree.frege", &out, &gamma, &phi)
        }
        (System::FregeDag | System::FregeSeq, Target::Frege) => {
            let moved = match discharge {
                Some(p) => read_formulas(p)?,
                None => return Err(usage("frege to frege needs --discharge FILE")),
            };
            let pi = read_frege(proof, from, &gamma)?;
            let seq = FormulaSeq::from_formulas(moved.iter().cloned());
            let delta: HashSet<Formula> = gamma.iter().filter(|f| !moved.contains(f)).cloned().collect();
            let (out, report) = deduction(&pi, &seq, &delta)?;
            println!("{report}");
            check_budget(opts, &report)?;
            let goal = seq.fold_imp(pi.root_label());
            emit_frege(sink, "deduced.frege", &out, &delta, &goal)
        }
        (System::Nm, Target::Nm) => Err(usage("nothing to translate: source and target are both nm")),
    }
}

fn cmd_extract(sink: &Sink, opts: &Opts, what: &ExtractCmd) -> Outcome {
    match what {
        ExtractCmd::Disjunct { proof, u } => {
            let d = read_nm(proof)?;
            let i = extract_disjunct(&d, u)?;
            println!("disjunct {i}");
            Ok(())
        }
        ExtractCmd::Interpolant { proof, n } => {
            let inst = build_tau(*n).map_err(usage)?;
            let shape = make_shape(&inst);
            let d = read_nm(proof)?;
            let interp = extract_interpolant(&d, &shape)?;
            let c = &interp.circuit;
            println!(
                "interpolant lines={} stages={} raw_wires={} wires={}",
                interp.lines,
                interp.stages,
                interp.raw_wires,
                c.size()
            );
            let bits = opts.budget_bits.unwrap_or(DEFAULT_BUDGET_BITS);
            let rep = check_interpolates_bounded(c, &shape, bits)?;
            println!("interpolates {}", if rep.passed() { "PASS" } else { "FAIL" });
            sink.write("interpolant.circ", &c.to_text())?;
            if rep.passed() {
                Ok(())
            } else {
                Err(Failure::Reject(format!("{rep:?}")))
            }
        }
    }
}

fn parse_assignment(s: &str) -> Result<Assignment, Failure> {
    let mut a = Assignment::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("bad assignment `{part}`")))?;
        let v = match v.trim() {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(usage(format!("bad value `{other}`"))),
        };
        a.insert(k.trim().to_string(), v);
    }
    Ok(a)
}

fn cmd_circuit(sink: &Sink, opts: &Opts, what: &CircuitCmd) -> Outcome {
    match what {
        CircuitCmd::Eval { circuit, assign } => {
            let c = read_circuit(circuit)?;
            let v = c.eval(&parse_assignment(assign)?)?;
            println!("value {}", u8::from(v));
            Ok(())
        }
        CircuitCmd::Fanin2 { circuit } => {
            let c = read_circuit(circuit)?;
            let b = to_bounded_fanin(&c);
            println!("wires {} -> {} max_fanin {}", c.size(), b.size(), b.max_fanin());
            let vars: Vec<String> = c.vars().union(&b.vars()).cloned().collect();
            let bits = opts.budget_bits.unwrap_or(14);
            if vars.len() <= bits {
                for mask in 0u64..(1u64 << vars.len()) {
                    let a: Assignment = vars
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (v.clone(), mask >> i & 1 == 1))
                        .collect();
                    if c.eval(&a)? != b.eval(&a)? {
                        return Err(Failure::Reject(format!("differs on {a:?}")));
                    }
                }
                println!("equivalent exhaustive over {} variables", vars.len());
            } else {
                println!("equivalence not checked: {} variables exceed the budget {bits}", vars.len());
            }
            sink.write("fanin2.circ", &b.to_text())
        }
        CircuitCmd::Separate { circuit, n } => {
            let c = read_circuit(circuit)?;
            let out = check_separates(&c, *n)?;
            println!("checked {} graphs", out.checked);
            match out.failure {
                None => {
                    println!("separates PASS");
                    Ok(())
                }
                Some(f) => {
                    println!("separates FAIL {f}");
                    Err(Failure::Reject(f))
                }
            }
        }
    }
}

fn stage(name: &str, detail: impl Display) {
    println!("stage {name}: {detail}");
}

fn cmd_pipeline(sink: &Sink, opts: &Opts, n: usize, proof: Option<&Path>) -> Outcome {
    let inst = build_tau(n).map_err(usage)?;
    let tau = inst.tau.clone();
    stage("build", format!("n={n} k={} size={}", inst.k, tau.size()));
    sink.write("tau.txt", &format!("{tau}\n"))?;
    let d = match proof {
        Some(p) => {
            let d = read_nm(p)?;
            stage("proof", format!("loaded {} nodes from {}", d.len(), p.display()));
            d
        }
        None => {
            let mut decider = Decider::new(opts.budget_nodes.unwrap_or(PIPELINE_BUDGET));
            match decider.decide(&[], &tau) {
                Ok(Decision::Valid(d)) => {
                    stage("decide", format!("valid, {} nodes", d.len()));
                    d
                }
                Ok(Decision::Invalid { .. }) => {
                    println!("FAIL at decide");
                    return Err(Failure::Reject("tautology reported invalid".into()));
                }
                Err(e) => {
                    println!("BUDGET at decide");
                    return Err(e.into());
                }
            }
        }
    };
    let verdict = check_nm(&d, &HashSet::new(), &tau);
    stage("recheck", &verdict);
    if !verdict.accepted() {
        println!("FAIL at recheck");
        return Err(Failure::Reject(verdict.to_string()));
    }
    sink.write("proof.nm", &d.dag().to_text())?;
    let shape = make_shape(&inst);
    let interp = match extract_interpolant(&d, &shape) {
        Ok(i) => i,
        Err(e) => {
            println!("FAIL at extract");
            return Err(e.into());
        }
    };
    stage(
        "extract",
        format!("stages={} raw_wires={} wires={}", interp.stages, interp.raw_wires, interp.circuit.size()),
    );
    sink.write("interpolant.circ", &interp.circuit.to_text())?;
    let cc = specialize_to_cc(&interp.circuit, n).map_err(|e| Failure::Reject(e.to_string()))?;
    stage("specialize", format!("wires={}", cc.size()));
    sink.write("cc.circ", &cc.to_text())?;
    let sep = match check_separates(&cc, n) {
        Ok(s) => s,
        Err(e) => {
            println!("BUDGET at separates");
            return Err(e.into());
        }
    };
    stage("separates", format!("{} graphs, {}", sep.checked, pass(sep.passed())));
    if let Some(f) = sep.failure {
        println!("FAIL at separates");
        return Err(Failure::Reject(f));
    }
    let bits = opts.budget_bits.unwrap_or(DEFAULT_BUDGET_BITS);
    let rep = match check_interpolates_bounded(&interp.circuit, &shape, bits) {
        Ok(r) => r,
        Err(e) => {
            println!("BUDGET at interpolates");
            return Err(e.into());
        }
    };
    stage(
        "interpolates",
        format!(
            "alpha side {} ({}), beta side {} ({})",
            pass(rep.alpha_side.passed()),
            rep.alpha_side.checked,
            pass(rep.beta_side.passed()),
            rep.beta_side.checked
        ),
    );
    if !rep.passed() {
        println!("FAIL at interpolates");
        return Err(Failure::Reject(format!("{rep:?}")));
    }
    println!("PASS");
    Ok(())
}

fn pass(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: Cli) -> Outcome {
    let opts = cli.opts;
    println!("seed {}", opts.seed);
    let sink = Sink { dir: opts.out.clone() };
    match &cli.cmd {
        Cmd::Gen { kind, n } => cmd_gen(&sink, *kind, *n),
        Cmd::Check {
            system,
            proof,
            assumptions,
            goal,
        } => cmd_check(*system, proof, assumptions, goal),
        Cmd::Pipeline { what: PipelineKind::Tau, n, proof } => cmd_pipeline(&sink, &opts, *n, proof.as_deref()),
        Cmd::Translate {
            from,
            to,
            mode,
            discharge,
            proof,
            assumptions,
        } => cmd_translate(&sink, &opts, *from, *to, *mode, discharge.as_deref(), proof, assumptions),
        Cmd::Extract { what } => cmd_extract(&sink, &opts, what),
        Cmd::Circuit { what } => cmd_circuit(&sink, &opts, what),
        Cmd::Metrics { system, proof } => cmd_metrics(*system, proof),
        Cmd::Decide { goal, assumptions } => cmd_decide(&sink, &opts, goal, assumptions.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // A closed stdout (e.g. piping into `head`) ends the run quietly.
    let default_hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(move |info| {
        let msg = info
            .payload()
            .downcast_ref::<String>()
            .map(String::as_str)
            .or_else(|| info.payload().downcast_ref::<&str>().copied())
            .unwrap_or("");
        if msg.contains("Broken pipe") {
            std::process::exit(0);
        }
        default_hook(info);
    }));
    let worker = std::thread::Builder::new()
        .stack_size(STACK_BYTES)
        .spawn(move || run(cli))
        .expect("spawn worker thread");
    match worker.join() {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
        Err(_) => ExitCode::from(101),
    }
}
