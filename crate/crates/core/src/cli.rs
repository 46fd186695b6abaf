//! The `nested` command line. [`run`] holds the whole program so it can be
//! driven from tests; the binary only forwards `std::env::args`.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage or
//! input error, 3 resource cap exceeded.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::config_graph::{self, EpsRun, Horizon, LiftError, ProjectionError};
use crate::group::{self, Element, Group, GroupError, GroupOracle, Trend};
use crate::hom::{self, ExpansionStyle};
use crate::laws;
use crate::memory_tree::MemorySymbol;
use crate::nsa::{self, Determinism, Erasing, HaltReason, Letter, Machine, ResourceCaps, Verdict};
use crate::pda::{self, TreeCheck};

pub const SCHEMA: &str = "nested-stack/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nested", version, about = "Nested stack automata, configuration graphs and group probes")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Machines: parsing, acceptance, analysis, inverse homomorphisms.
    #[command(subcommand)]
    Nsa(NsaCmd),
    /// Bounded configuration graphs.
    #[command(subcommand)]
    Cg(CgCmd),
    /// Pushdown automata and the tree quotient.
    #[command(subcommand)]
    Pda(PdaCmd),
    /// Cayley-graph probes.
    #[command(subcommand)]
    Group(GroupCmd),
}

#[derive(Args, Debug, Clone)]
struct CapsArgs {
    #[arg(long, default_value_t = ResourceCaps::default().max_steps)]
    max_steps: usize,
    #[arg(long, default_value_t = ResourceCaps::default().max_tree_edges)]
    max_tree_edges: usize,
    #[arg(long, default_value_t = ResourceCaps::default().max_frontier)]
    max_frontier: usize,
}

impl CapsArgs {
    fn caps(&self) -> ResourceCaps {
        ResourceCaps {
            max_steps: self.max_steps,
            max_tree_edges: self.max_tree_edges,
            max_frontier: self.max_frontier,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct HorizonArgs {
    /// Largest memory tree explored, in edges.
    #[arg(long, default_value_t = Horizon::default().max_tree_edges)]
    horizon: usize,
    #[arg(long, default_value_t = Horizon::default().max_vertices)]
    max_vertices: usize,
    #[arg(long)]
    max_depth: Option<usize>,
}

impl HorizonArgs {
    fn horizon(&self) -> Horizon {
        Horizon {
            max_tree_edges: self.horizon,
            max_vertices: self.max_vertices,
            max_depth: self.max_depth.unwrap_or(usize::MAX),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct WordArgs {
    /// Input word; letters concatenated, or space separated.
    #[arg(long, conflicts_with = "word_file")]
    word: Option<String>,
    /// File holding a space-separated word.
    #[arg(long)]
    word_file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StyleArg {
    Direct,
    Wrapped,
}

#[derive(Subcommand, Debug)]
enum NsaCmd {
    /// Parse a machine and summarise it.
    Validate { machine: PathBuf },
    /// Decide membership and print an accepting computation.
    Run {
        machine: PathBuf,
        #[command(flatten)]
        word: WordArgs,
        #[command(flatten)]
        caps: CapsArgs,
    },
    /// Decide membership.
    Accept {
        machine: PathBuf,
        #[command(flatten)]
        word: WordArgs,
        #[command(flatten)]
        caps: CapsArgs,
    },
    /// List accepted words up to a length.
    Enumerate {
        machine: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[command(flatten)]
        caps: CapsArgs,
    },
    /// Symbolic determinism check.
    CheckDet { machine: PathBuf },
    /// Bound on pops along ε paths.
    CheckErasing { machine: PathBuf },
    /// Step a deterministic machine through a word.
    Trace {
        machine: PathBuf,
        #[command(flatten)]
        word: WordArgs,
        #[command(flatten)]
        caps: CapsArgs,
    },
    /// Machine for the inverse image of the language under a homomorphism.
    Preimage {
        machine: PathBuf,
        #[arg(long)]
        hom: PathBuf,
        #[arg(long, value_enum, default_value = "direct")]
        style: StyleArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded law checks for the stack-operation monoid.
    CheckLaws {
        #[arg(long, default_value_t = 10_000)]
        trees: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_edges: usize,
        /// Comma-separated memory symbols.
        #[arg(long, default_value = "x,y")]
        alphabet: String,
    },
}

#[derive(Subcommand, Debug)]
enum CgCmd {
    /// Explore and summarise the configuration graph.
    Build {
        machine: PathBuf,
        #[command(flatten)]
        horizon: HorizonArgs,
    },
    /// DOT rendering of the explored graph.
    Dot {
        machine: PathBuf,
        #[command(flatten)]
        horizon: HorizonArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The path spelling a word in a deterministic machine.
    Lift {
        machine: PathBuf,
        #[command(flatten)]
        word: WordArgs,
        #[arg(long, default_value_t = 10_000)]
        max_eps: usize,
    },
    /// Project onto a Cayley diagram and check the edges.
    Project {
        machine: PathBuf,
        #[arg(long)]
        group: String,
        #[command(flatten)]
        horizon: HorizonArgs,
    },
}

#[derive(Subcommand, Debug)]
enum PdaCmd {
    /// Quotient by the non-erasing equivalence and test for a tree.
    Quotient {
        #[arg(long)]
        machine: PathBuf,
        #[command(flatten)]
        horizon: HorizonArgs,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Apply the construction to machines that move the pointer.
        #[arg(long)]
        force: bool,
    },
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// Size of a metric ball.
    Ball {
        #[arg(long)]
        group: String,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value = "1")]
        center: String,
    },
    /// Minimum vertex separator between two balls.
    Separator {
        #[arg(long)]
        group: String,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        window: usize,
        /// One or two comma-separated centers; one center is paired with 1.
        #[arg(long)]
        centers: String,
    },
    /// Separators over several radii and sample centers.
    Probe {
        #[arg(long)]
        group: String,
        /// Comma-separated radii.
        #[arg(long, default_value = "1,2,3")]
        radius: String,
        /// Comma-separated centers; by default generator powers of length 2r+2.
        #[arg(long)]
        centers: Option<String>,
        /// Window radius beyond |center| + r.
        #[arg(long, default_value_t = 0)]
        window: usize,
    },
    /// Components outside a ball, within a window.
    Ends {
        #[arg(long)]
        group: String,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        window: usize,
    },
    /// Sample-based quasi-isometry inequalities.
    Qi {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        /// Lines `x -> y` of source and target words.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 20)]
        window: usize,
        /// Also check that k-balls around the images cover the target window.
        #[arg(long)]
        density: bool,
    },
}

struct Report {
    code: i32,
    text: String,
    json: Value,
}

impl Report {
    fn new(code: i32, text: String, json: Value) -> Self {
        Report { code, text, json }
    }
}

/// A failure reported on standard error with its exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = Result<Report, Failure>;

/// Runs the command line `args` (program name first).
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let json = cli.json;
    let result = match cli.cmd {
        Cmd::Nsa(c) => nsa_cmd(c),
        Cmd::Cg(c) => cg_cmd(c),
        Cmd::Pda(c) => pda_cmd(c),
        Cmd::Group(c) => group_cmd(c),
    };
    match result {
        Ok(r) => {
            let body = if json {
                let mut v = r.json;
                if let Value::Object(map) = &mut v {
                    map.insert("schema".into(), json!(SCHEMA));
                    map.insert("exit_code".into(), json!(r.code));
                }
                format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
            } else {
                r.text
            };
            let _ = out.write_all(body.as_bytes());
            r.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_machine(path: &Path) -> Result<Machine, Failure> {
    let text = read(path)?;
    nsa::parse_machine(&text).map_err(|e| usage(format!("{}:{}: {}", path.display(), e.line, e.kind)))
}

fn write_output(path: &Option<PathBuf>, body: &str) -> Result<Option<String>, Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, body).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Ok(None)
        }
        None => Ok(Some(body.to_string())),
    }
}

fn parse_word(text: &str) -> Vec<Letter> {
    match text.trim() {
        "" | "ε" | "eps" | "1" => Vec::new(),
        t => nsa::word(t),
    }
}

fn load_word(w: &WordArgs) -> Result<Vec<Letter>, Failure> {
    match (&w.word, &w.word_file) {
        (Some(s), None) => Ok(parse_word(s)),
        (None, Some(p)) => Ok(read(p)?.split_whitespace().map(Letter::new).collect()),
        _ => Err(usage("give the input with --word or --word-file")),
    }
}

fn check_letters(m: &Machine, w: &[Letter]) -> Result<(), Failure> {
    match w.iter().find(|a| !m.has_letter(a)) {
        Some(a) => Err(usage(format!("letter `{a}` is not in the machine's input alphabet"))),
        None => Ok(()),
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Accepted => EXIT_OK,
        Verdict::Rejected => EXIT_NEGATIVE,
        Verdict::CapExceeded => EXIT_CAP,
    }
}

fn nsa_cmd(cmd: NsaCmd) -> Outcome {
    match cmd {
        NsaCmd::Validate { machine } => {
            let m = load_machine(&machine)?;
            let text = format!(
                "OK: {} states, {} edges, {} input letters, {} memory symbols\n",
                m.state_count(),
                m.edges().len(),
                m.input_alphabet().len(),
                m.memory_alphabet().len()
            );
            let j = json!({
                "command": "nsa validate",
                "states": m.state_count(),
                "edges": m.edges().len(),
                "input": m.input_alphabet().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                "memory": m.memory_alphabet().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            });
            Ok(Report::new(EXIT_OK, text, j))
        }
        NsaCmd::Accept { machine, word, caps } => run_accept(machine, word, caps, false),
        NsaCmd::Run { machine, word, caps } => run_accept(machine, word, caps, true),
        NsaCmd::Enumerate { machine, max_len, caps } => {
            let m = load_machine(&machine)?;
            match nsa::enumerate_accepted(&m, max_len, caps.caps()) {
                Ok(words) => {
                    let mut words: Vec<_> = words.into_iter().collect();
                    words.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
                    let shown: Vec<String> = words.iter().map(|w| nsa::word_to_string(w)).collect();
                    let mut text = String::new();
                    for w in &shown {
                        let _ = writeln!(text, "{w}");
                    }
                    let j = json!({"command": "nsa enumerate", "max_len": max_len, "words": shown});
                    Ok(Report::new(EXIT_OK, text, j))
                }
                Err(e) => Ok(Report::new(
                    EXIT_CAP,
                    format!("CAP_EXCEEDED: {e}\n"),
                    json!({"command": "nsa enumerate", "cap_exceeded": e.0.to_string()}),
                )),
            }
        }
        NsaCmd::CheckDet { machine } => {
            let m = load_machine(&machine)?;
            Ok(match nsa::check_deterministic(&m) {
                Determinism::Deterministic => Report::new(
                    EXIT_OK,
                    "DETERMINISTIC\n".into(),
                    json!({"command": "nsa check-det", "deterministic": true}),
                ),
                Determinism::Conflict { state, first, second } => Report::new(
                    EXIT_NEGATIVE,
                    format!(
                        "NONDETERMINISTIC: state {} has competing edges {} and {}\n",
                        m.state_name(state),
                        first,
                        second
                    ),
                    json!({"command": "nsa check-det", "deterministic": false,
                           "state": m.state_name(state), "edges": [first, second]}),
                ),
            })
        }
        NsaCmd::CheckErasing { machine } => {
            let m = load_machine(&machine)?;
            Ok(match nsa::check_limited_erasing(&m) {
                Erasing::Bounded(k) => Report::new(
                    EXIT_OK,
                    format!("bounded, k = {k}\n"),
                    json!({"command": "nsa check-erasing", "bounded": true, "k": k}),
                ),
                Erasing::Unbounded { cycle } => Report::new(
                    EXIT_NEGATIVE,
                    format!("unbounded: ε-cycle through a pop, edges {cycle:?}\n"),
                    json!({"command": "nsa check-erasing", "bounded": false, "cycle": cycle}),
                ),
            })
        }
        NsaCmd::Trace { machine, word, caps } => {
            let m = load_machine(&machine)?;
            let w = load_word(&word)?;
            check_letters(&m, &w)?;
            match nsa::run_trace(&m, &w, caps.caps()) {
                Ok(t) => {
                    let (code, halt) = match t.halt {
                        HaltReason::Accepted => (EXIT_OK, "ACCEPTED".to_string()),
                        HaltReason::Stuck => (EXIT_NEGATIVE, format!("STUCK after reading {} letters", t.consumed)),
                        HaltReason::CapExceeded(k) => (EXIT_CAP, format!("CAP_EXCEEDED ({k})")),
                    };
                    let text = format!("{}{}\n", t.render(&m), halt);
                    let steps: Vec<Value> = t
                        .steps
                        .iter()
                        .map(|s| {
                            json!({"edge": s.edge, "input": s.input.as_ref().map(|a| a.to_string()),
                                   "config": s.config.name(&m)})
                        })
                        .collect();
                    let j = json!({"command": "nsa trace", "halt": halt, "consumed": t.consumed, "steps": steps});
                    Ok(Report::new(code, text, j))
                }
                Err(e) => Ok(Report::new(
                    EXIT_NEGATIVE,
                    format!("NONDETERMINISTIC: {e}\n"),
                    json!({"command": "nsa trace", "error": e.to_string()}),
                )),
            }
        }
        NsaCmd::Preimage { machine, hom, style, out } => {
            let m = load_machine(&machine)?;
            let text = read(&hom)?;
            let f = hom::parse_hom(&text)
                .map_err(|e| usage(format!("{}:{}: {}", hom.display(), e.line, e.kind)))?;
            let style = match style {
                StyleArg::Direct => ExpansionStyle::Direct,
                StyleArg::Wrapped => ExpansionStyle::Wrapped,
            };
            let p = hom::preimage_with(&m, &f, style).map_err(|e| usage(e.to_string()))?;
            let body = p.to_text();
            let shown = write_output(&out, &body)?.unwrap_or_default();
            let j = json!({"command": "nsa preimage", "states": p.state_count(),
                           "edges": p.edges().len(), "machine": body});
            Ok(Report::new(EXIT_OK, shown, j))
        }
        NsaCmd::CheckLaws { trees, seed, max_edges, alphabet } => {
            let alpha: Vec<MemorySymbol> = alphabet
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(MemorySymbol::new)
                .collect();
            if alpha.is_empty() {
                return Err(usage("--alphabet needs at least one symbol"));
            }
            let r = laws::check_monoid_laws(trees, seed, &alpha, max_edges);
            let code = if r.violations() == 0 { EXIT_OK } else { EXIT_NEGATIVE };
            let text = format!(
                "{} trees ({} distinct), seed {}\n\
                 injectivity {}\npop after push {}\npush after pop {}\nclosure {}\nup after pop {}\n\
                 {} violations\n",
                r.trees, r.distinct_trees, seed, r.injectivity, r.push_pop, r.pop_push,
                r.closure, r.up_after_pop, r.violations()
            );
            let j = json!({"command": "nsa check-laws", "trees": r.trees, "distinct": r.distinct_trees,
                           "seed": seed, "violations": r.violations(),
                           "injectivity": r.injectivity, "push_pop": r.push_pop, "pop_push": r.pop_push,
                           "closure": r.closure, "up_after_pop": r.up_after_pop});
            Ok(Report::new(code, text, j))
        }
    }
}

fn run_accept(machine: PathBuf, word: WordArgs, caps: CapsArgs, witness: bool) -> Outcome {
    let m = load_machine(&machine)?;
    let w = load_word(&word)?;
    check_letters(&m, &w)?;
    let r = nsa::accepts(&m, &w, caps.caps());
    let mut text = format!("{}\n", r.verdict);
    let mut configs = Vec::new();
    if witness {
        if let Some(c) = r.witness.as_ref().and_then(|c| c.configurations(&m)) {
            configs = c.iter().map(|c| c.name(&m)).collect();
            for name in &configs {
                let _ = writeln!(text, "  {name}");
            }
        }
    }
    if r.verdict == Verdict::CapExceeded {
        let caps: Vec<String> = r.caps_hit.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(text, "caps hit: {}", caps.join(", "));
    }
    let j = json!({
        "command": "nsa accept",
        "word": nsa::word_to_string(&w),
        "verdict": r.verdict.to_string(),
        "steps": r.steps,
        "witness": configs,
        "caps_hit": r.caps_hit.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    });
    Ok(Report::new(verdict_code(r.verdict), text, j))
}

fn cg_cmd(cmd: CgCmd) -> Outcome {
    match cmd {
        CgCmd::Build { machine, horizon } => {
            let m = load_machine(&machine)?;
            let h = horizon.horizon();
            let cg = config_graph::build(&m, h);
            let co = (0..cg.vertex_count()).filter(|&v| cg.is_coaccessible(v)).count();
            let degrees = match config_graph::check_degrees(&cg) {
                Ok(()) => "ok".to_string(),
                Err(e) => e.to_string(),
            };
            let eps = match config_graph::max_eps_run(&cg) {
                EpsRun::Finite(n) => n.to_string(),
                EpsRun::UnboundedWithinHorizon => "unbounded within horizon".to_string(),
            };
            let text = format!(
                "horizon: {} tree edges, {} vertices{}\n\
                 vertices {}\nedges {}\ntruncated {}\ncoaccessible {} (within horizon)\n\
                 degrees {}\nmax ε run {}\n",
                h.max_tree_edges,
                h.max_vertices,
                horizon.max_depth.map(|d| format!(", depth {d}")).unwrap_or_default(),
                cg.vertex_count(),
                cg.edges().len(),
                cg.truncated(),
                co,
                degrees,
                eps
            );
            let j = json!({"command": "cg build", "horizon": horizon_json(&h),
                           "vertices": cg.vertex_count(), "edges": cg.edges().len(),
                           "truncated": cg.truncated(), "coaccessible": co,
                           "degrees": degrees, "max_eps_run": eps});
            Ok(Report::new(EXIT_OK, text, j))
        }
        CgCmd::Dot { machine, horizon, out } => {
            let m = load_machine(&machine)?;
            let cg = config_graph::build(&m, horizon.horizon());
            let dot = config_graph::export_dot(&cg, &m);
            let shown = write_output(&out, &dot)?.unwrap_or_default();
            Ok(Report::new(EXIT_OK, shown, json!({"command": "cg dot", "dot": dot})))
        }
        CgCmd::Lift { machine, word, max_eps } => {
            let m = load_machine(&machine)?;
            let w = load_word(&word)?;
            check_letters(&m, &w)?;
            match config_graph::lift_path(&m, &w, max_eps) {
                Ok(path) => {
                    let mut text = format!("   {}\n", nsa::Configuration::initial(&m).name(&m));
                    for s in &path {
                        let a = s.input.as_ref().map(|a| a.as_str()).unwrap_or("ε");
                        let _ = writeln!(text, "-{a}-> {}", s.config.name(&m));
                    }
                    let names: Vec<String> = path.iter().map(|s| s.config.name(&m)).collect();
                    Ok(Report::new(EXIT_OK, text, json!({"command": "cg lift", "path": names})))
                }
                Err(e) => {
                    let code = if matches!(e, LiftError::Cap(_)) { EXIT_CAP } else { EXIT_NEGATIVE };
                    let text = match &e {
                        LiftError::Stuck(p) => format!("STUCK({p})\n"),
                        other => format!("{other}\n"),
                    };
                    Ok(Report::new(code, text, json!({"command": "cg lift", "error": e.to_string()})))
                }
            }
        }
        CgCmd::Project { machine, group, horizon } => {
            let m = load_machine(&machine)?;
            let g = load_group(&group)?;
            let h = horizon.horizon();
            let cg = config_graph::build(&m, h);
            match config_graph::project(&cg, &g) {
                Ok(p) => {
                    let text = format!(
                        "CONSISTENT within horizon: {} vertices, {} edges checked, 0 inconsistencies\n",
                        cg.vertex_count(),
                        p.edges_checked
                    );
                    let j = json!({"command": "cg project", "consistent": true,
                                   "vertices": cg.vertex_count(), "edges_checked": p.edges_checked,
                                   "inconsistencies": 0, "horizon": horizon_json(&h)});
                    Ok(Report::new(EXIT_OK, text, j))
                }
                Err(ProjectionError::Group(e)) => Err(usage(e.to_string())),
                Err(e @ ProjectionError::WellDefinedness { .. }) => {
                    let ProjectionError::WellDefinedness { vertex, first, second, inconsistent_edges } = &e
                    else {
                        unreachable!()
                    };
                    let text = format!(
                        "WELL_DEFINEDNESS_VIOLATION at {}: `{}` vs `{}` ({} inconsistent edges)\n",
                        cg.vertex(*vertex).name(&m),
                        first,
                        second,
                        inconsistent_edges
                    );
                    let j = json!({"command": "cg project", "consistent": false,
                                   "vertex": cg.vertex(*vertex).name(&m), "paths": [first, second],
                                   "inconsistencies": inconsistent_edges, "horizon": horizon_json(&h)});
                    Ok(Report::new(EXIT_NEGATIVE, text, j))
                }
            }
        }
    }
}

fn horizon_json(h: &Horizon) -> Value {
    json!({
        "max_tree_edges": h.max_tree_edges,
        "max_vertices": h.max_vertices,
        "max_depth": (h.max_depth != usize::MAX).then_some(h.max_depth),
    })
}

fn pda_cmd(cmd: PdaCmd) -> Outcome {
    let PdaCmd::Quotient { machine, horizon, dot, force } = cmd;
    let m = load_machine(&machine)?;
    let h = horizon.horizon();
    let cg = config_graph::build(&m, h);
    let classes = if force {
        pda::nonerasing_classes_unchecked(&cg)
    } else {
        pda::nonerasing_classes(&cg, &m).map_err(|e| usage(format!("{}: {e}", machine.display())))?
    };
    let q = pda::quotient(&cg, &classes);
    if let Some(p) = &dot {
        write_output(&Some(p.clone()), &pda::export_quotient_dot(&q, &cg, &m))?;
    }
    let check = pda::check_tree(&q);
    let distortion = pda::quotient_distortion(&q);
    let (code, verdict, cycle) = match &check {
        TreeCheck::Tree => (EXIT_OK, "TREE".to_string(), Vec::new()),
        TreeCheck::Cycle(c) => (EXIT_NEGATIVE, "CYCLE".to_string(), c.clone()),
    };
    let mut text = format!(
        "{} within horizon {}: {} classes, {} edges, {} configurations, max class diameter {}\n",
        verdict,
        h.max_tree_edges,
        q.vertex_count(),
        q.edges.len(),
        cg.vertex_count(),
        distortion
    );
    if !cycle.is_empty() {
        let names: Vec<String> = cycle
            .iter()
            .map(|&c| cg.vertex(q.partition.classes()[c][0]).name(&m))
            .collect();
        let _ = writeln!(text, "cycle through classes of: {}", names.join(" - "));
    }
    let j = json!({"command": "pda quotient", "verdict": verdict, "classes": q.vertex_count(),
                   "edges": q.edges.len(), "configurations": cg.vertex_count(),
                   "distortion": distortion, "cycle": cycle, "horizon": horizon_json(&h)});
    Ok(Report::new(code, text, j))
}

fn load_group(spec: &str) -> Result<Group, Failure> {
    Group::parse(spec, Path::new(".")).map_err(|e| usage(e.to_string()))
}

fn group_word(g: &Group, text: &str) -> Result<Element, Failure> {
    let w: Vec<String> = parse_word(text).iter().map(|a| a.to_string()).collect();
    g.canonical(&w).map_err(|e| usage(e.to_string()))
}

fn group_failure(e: GroupError) -> Failure {
    match e {
        GroupError::WindowTooLarge { .. } => Failure {
            code: EXIT_CAP,
            message: e.to_string(),
        },
        other => usage(other.to_string()),
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| usage(format!("bad {what} `{s}`"))))
        .collect()
}

fn group_cmd(cmd: GroupCmd) -> Outcome {
    match cmd {
        GroupCmd::Ball { group, radius, center } => {
            let g = load_group(&group)?;
            let c = group_word(&g, &center)?;
            let w = group::ball(&g, &c, radius, group::DEFAULT_MAX_VERTICES).map_err(group_failure)?;
            let boundary = w.boundary().count();
            let text = format!(
                "ball of radius {} around {} in {}: {} vertices, {} edges, {} on the boundary\n",
                radius,
                g.render(&c),
                g.family(),
                w.len(),
                w.edge_count(),
                boundary
            );
            let j = json!({"command": "group ball", "group": g.family(), "radius": radius,
                           "center": g.render(&c), "vertices": w.len(), "edges": w.edge_count(),
                           "boundary": boundary});
            Ok(Report::new(EXIT_OK, text, j))
        }
        GroupCmd::Separator { group, radius, window, centers } => {
            let g = load_group(&group)?;
            let cs: Vec<&str> = centers.split(',').collect();
            let (c1, c2) = match cs[..] {
                [a] => (g.identity(), group_word(&g, a)?),
                [a, b] => (group_word(&g, a)?, group_word(&g, b)?),
                _ => return Err(usage("--centers takes one or two words")),
            };
            let rep = group::min_separator(&g, &c1, &c2, radius, window).map_err(group_failure)?;
            let cut: Vec<String> = rep.cut_set.iter().map(|e| g.render(e)).collect();
            let text = format!(
                "cut size {} between balls of radius {} at {} and {} (window {}, {} vertices)\n\
                 cut: {}\ndisjoint paths {}\nwindow limited {}\n",
                rep.cut_size,
                radius,
                g.render(&c1),
                g.render(&c2),
                window,
                rep.window_vertices,
                cut.join(" "),
                rep.disjoint_paths,
                rep.window_limited
            );
            let j = json!({"command": "group separator", "cut_size": rep.cut_size, "cut_set": cut,
                           "disjoint_paths": rep.disjoint_paths, "window_limited": rep.window_limited,
                           "radius": radius, "window": window});
            Ok(Report::new(EXIT_OK, text, j))
        }
        GroupCmd::Probe { group, radius, centers, window } => {
            let g = load_group(&group)?;
            let radii: Vec<usize> = parse_list(&radius, "radius")?;
            let explicit: Option<Vec<Element>> = match &centers {
                Some(c) => Some(c.split(',').map(|w| group_word(&g, w)).collect::<Result<_, _>>()?),
                None => None,
            };
            let table = group::narrowness_probe(
                &g,
                &radii,
                &|r| match &explicit {
                    Some(cs) => cs.clone(),
                    None => group::default_centers(&g, r),
                },
                window,
            );
            let mut text = String::from("r\tcenter\twindow\tcut\tlimited\n");
            let mut rows = Vec::new();
            for c in &table.cells {
                let center = g.render(&c.center);
                match &c.result {
                    Ok(rep) => {
                        let _ = writeln!(
                            text,
                            "{}\t{}\t{}\t{}\t{}",
                            c.r, center, c.window_r, rep.cut_size, rep.window_limited
                        );
                        rows.push(json!({"r": c.r, "center": center, "window": c.window_r,
                                         "cut_size": rep.cut_size, "window_limited": rep.window_limited}));
                    }
                    Err(e) => {
                        let _ = writeln!(text, "{}\t{}\t{}\terror: {}", c.r, center, c.window_r, e);
                        rows.push(json!({"r": c.r, "center": center, "window": c.window_r,
                                         "error": e.to_string()}));
                    }
                }
            }
            let trend = match table.trend() {
                Trend::Constant => "constant",
                Trend::StrictlyIncreasing => "strictly increasing",
                Trend::Other => "mixed",
                Trend::Undetermined => "undetermined",
            };
            let _ = writeln!(
                text,
                "max cut {}; trend {}\nnote: sampled centers only; this is evidence, not a decision",
                table.max_cut().map(|m| m.to_string()).unwrap_or_else(|| "-".into()),
                trend
            );
            let j = json!({"command": "group probe", "cells": rows, "max_cut": table.max_cut(),
                           "trend": trend, "window_limited": table.window_limited()});
            Ok(Report::new(EXIT_OK, text, j))
        }
        GroupCmd::Ends { group, radius, window } => {
            let g = load_group(&group)?;
            let r = group::ends_probe(&g, radius, window, group::DEFAULT_MAX_VERTICES).map_err(group_failure)?;
            let text = format!(
                "{} components reach the window boundary, {} finite (radius {}, window {})\n",
                r.unbounded, r.finite, radius, window
            );
            let j = json!({"command": "group ends", "unbounded": r.unbounded, "finite": r.finite,
                           "radius": radius, "window": window});
            Ok(Report::new(EXIT_OK, text, j))
        }
        GroupCmd::Qi { source, target, samples, k, window, density } => {
            let s = load_group(&source)?;
            let t = load_group(&target)?;
            let text = read(&samples)?;
            let mut pairs = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (x, y) = line
                    .split_once("->")
                    .ok_or_else(|| usage(format!("{}:{}: expected `x -> y`", samples.display(), i + 1)))?;
                pairs.push((group_word(&s, x)?, group_word(&t, y)?));
            }
            let v = group::qi_check(&pairs, k, &s, &t, window).map_err(group_failure)?;
            let mut out = format!("{} samples, {} violations\n", pairs.len(), v.len());
            for x in &v {
                let _ = writeln!(
                    out,
                    "  {} / {}: d = {}, image d = {} ({:?})",
                    x.i, x.j, x.source_distance, x.target_distance, x.side
                );
            }
            let mut uncovered = Vec::new();
            if density {
                let images: Vec<Element> = pairs.iter().map(|p| p.1.clone()).collect();
                uncovered = group::qi_density(&images, k as usize, &t, window).map_err(group_failure)?;
                let _ = writeln!(out, "{} target elements within {} farther than {} from every image", uncovered.len(), window, k);
            }
            let ok = v.is_empty() && uncovered.is_empty();
            let j = json!({"command": "group qi", "samples": pairs.len(), "violations": v.len(),
                           "uncovered": uncovered.iter().map(|e| t.render(e)).collect::<Vec<_>>()});
            Ok(Report::new(if ok { EXIT_OK } else { EXIT_NEGATIVE }, out, j))
        }
    }
}
