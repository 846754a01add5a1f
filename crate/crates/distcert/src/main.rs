use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use distcert::bench::gridworld::{gen_gridworld, Cell, GridSpec};
use distcert::bench::pagerank::{default_damping, gen_pagerank, parse_digraph};
use distcert::error::{read_file, write_file};
use distcert::formats::certificate::{parse_certificate, write_certificate};
use distcert::formats::init::parse_init;
use distcert::formats::mdp::{parse_mdp, write_mdp};
use distcert::formats::spec::parse_spec;
use distcert::formats::strategy::parse_strategy;
use distcert::instances::{build_problem, Source, Task, INSTANCES};
use distcert::pipeline::{emit, run, validate, PipelineConfig, Search};
use distcert::report::{validation_text, RunReport, SimulationReport, ValidationSummary};
use distcert::solver::resolve_command;
use distcert::{Error, Result};
use distcert_core::constraints::{InitMode, PremiseMode};
use distcert_core::encode::{choices, Problem};
use distcert_core::mdp::{Distribution, Strategy};
use distcert_core::pdts::{build_pdts, UpdateKind};
use distcert_core::rational::parse_rational;
use distcert_core::templates::StrategyClass;
use distcert_core::validate::{default_tolerance, simulate_monitor, Verdict};
use distcert_core::Rational;

/// Writes to stdout, ignoring a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "distcert", version, about = "Certificates for distributional omega-regular specifications of MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prove that a given strategy satisfies the specification.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Strategy file.
        #[arg(long)]
        strategy: PathBuf,
        #[command(flatten)]
        solve: Solve,
    },
    /// Find a strategy and a certificate.
    Synthesize {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Class::Memoryless)]
        class: Class,
        /// Candidate strategies first, or templates only.
        #[arg(long, value_enum, default_value_t = SearchArg::Auto)]
        search: SearchArg,
        #[command(flatten)]
        solve: Solve,
    },
    /// Simulate the distribution sequence and monitor the automaton run.
    Simulate {
        #[command(flatten)]
        input: Input,
        /// Strategy file; alternatively the strategy of a certificate.
        #[arg(long, conflicts_with = "cert", required_unless_present = "cert")]
        strategy: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Print the structured report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Validate a certificate file independently of any solver model.
    CheckCert {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        solver: Option<String>,
        #[arg(long, default_value_t = 300)]
        timeout: u64,
        #[arg(long)]
        json: bool,
    },
    /// Print the product transition system of a problem.
    Describe {
        #[command(flatten)]
        input: Input,
    },
    /// Write a gridworld MDP, specification and initial distribution.
    GenGridworld {
        #[arg(long, value_enum)]
        preset: Option<GridPreset>,
        #[arg(long, default_value_t = 3)]
        size: usize,
        /// Wall cell `row,col`; repeatable.
        #[arg(long = "wall")]
        walls: Vec<String>,
        /// Slippery cell `row,col:probability`; repeatable.
        #[arg(long = "slip")]
        slips: Vec<String>,
        #[arg(long, default_value = "1,2")]
        target: String,
        /// Cell whose mass must stay at most one half.
        #[arg(long)]
        avoid: Option<String>,
        #[arg(long, default_value = "0.9")]
        threshold: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a PageRank-style Markov chain for a directed graph.
    GenPagerank {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        damping: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the bundled instances, or write their files to a directory.
    Instances {
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    mdp: PathBuf,
    /// Specification file, or inline pattern text.
    #[arg(long)]
    spec: String,
    /// Initial-set file, or inline text such as `point:1/3,1/3,1/3`.
    #[arg(long)]
    init: String,
    /// The specification must hold from some initial distribution only.
    #[arg(long)]
    existential: bool,
}

#[derive(Args)]
struct Solve {
    /// Solver command, or the presets `z3` and `cvc5`.
    #[arg(long)]
    solver: Option<String>,
    /// Seconds per solver invocation.
    #[arg(long, default_value_t = 300)]
    timeout: u64,
    /// Write the SMT-LIB2 system of the first choice and stop.
    #[arg(long)]
    emit_smt: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    invariant_size: usize,
    #[arg(long, default_value_t = 2)]
    handelman_degree: u32,
    #[arg(long, default_value_t = 256)]
    choice_budget: usize,
    /// Premise modes to try.
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// Certificate output file.
    #[arg(long, default_value = "certificate.cert")]
    cert_out: PathBuf,
    /// Structured report output file.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print the structured report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    Memoryless,
    Distributional,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchArg {
    Auto,
    Template,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Minimal,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridPreset {
    #[value(name = "3x3")]
    ThreeByThree,
    #[value(name = "4x4")]
    FourByFour,
}

/// Reads `arg` as a file when one exists, otherwise uses it as text.
fn file_or_text(arg: &str) -> Result<(String, String)> {
    let p = Path::new(arg);
    if p.is_file() {
        Ok((arg.to_string(), read_file(p)?))
    } else {
        Ok(("<inline>".to_string(), arg.to_string()))
    }
}

struct Loaded {
    mdp: (String, String),
    spec: (String, String),
    init: (String, String),
    mode: InitMode,
}

impl Loaded {
    fn new(i: &Input) -> Result<Self> {
        Ok(Self {
            mdp: (i.mdp.display().to_string(), read_file(&i.mdp)?),
            spec: file_or_text(&i.spec)?,
            init: file_or_text(&i.init)?,
            mode: if i.existential {
                InitMode::Existential
            } else {
                InitMode::Universal
            },
        })
    }

    fn problem(&self, task: Task) -> Result<Problem> {
        fn src(f: &(String, String)) -> Source<'_> {
            Source {
                name: &f.0,
                text: &f.1,
            }
        }
        build_problem(src(&self.mdp), src(&self.spec), src(&self.init), task, self.mode)
    }
}

fn cell(s: &str) -> Result<Cell> {
    let bad = || Error::Usage(format!("expected a cell `row,col`, found `{s}`"));
    let (r, c) = s.split_once(',').ok_or_else(bad)?;
    Ok((r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

fn rational(s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|_| Error::Usage(format!("expected a rational, found `{s}`")))
}

fn solve(problem: Problem, command: &str, s: &Solve, search: Search) -> Result<i32> {
    let mut cfg = PipelineConfig::new(resolve_command(s.solver.as_deref()));
    cfg.search = search;
    cfg.timeout = Duration::from_secs(s.timeout);
    cfg.encode.invariant_size = s.invariant_size;
    cfg.encode.handelman_degree = s.handelman_degree;
    cfg.encode.choice_budget = s.choice_budget;
    cfg.modes = match s.mode {
        ModeArg::Auto => vec![PremiseMode::Minimal, PremiseMode::Full],
        ModeArg::Minimal => vec![PremiseMode::Minimal],
        ModeArg::Full => vec![PremiseMode::Full],
    };
    if let Some(path) = &s.emit_smt {
        let (cs, _) = choices(&problem, &cfg.encode)?;
        let mut opts = cfg.encode.clone();
        opts.premise_mode = *cfg.modes.last().expect("one mode");
        let text = emit(&problem, &cs.first().cloned().unwrap_or_default(), &opts)?;
        write_file(path, &text)?;
        outln!("wrote {}", path.display());
        return Ok(0);
    }
    let outcome = run(&problem, &cfg)?;
    let report = RunReport::new(command, &problem.mdp, &problem.nba, &outcome);
    if let Some(sol) = &outcome.solution {
        write_file(&s.cert_out, &write_certificate(sol, &problem.mdp))?;
    }
    let json = serde_json::to_string_pretty(&report).expect("serializable report");
    if let Some(path) = &s.report {
        write_file(path, &format!("{json}\n"))?;
    }
    if s.json {
        outln!("{json}");
    } else {
        out!("{}", report.text());
        if outcome.solved() {
            outln!("certificate: {}", s.cert_out.display());
        }
    }
    Ok(if outcome.solved() { 0 } else { 1 })
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Verify {
            input,
            strategy,
            solve: s,
        } => {
            let l = Loaded::new(&input)?;
            let name = strategy.display().to_string();
            let text = read_file(&strategy)?;
            let problem = l.problem(Task::Verify(Source {
                name: &name,
                text: &text,
            }))?;
            solve(problem, "verify", &s, Search::Auto)
        }
        Command::Synthesize {
            input,
            class,
            search,
            solve: s,
        } => {
            let l = Loaded::new(&input)?;
            let class = match class {
                Class::Memoryless => StrategyClass::Memoryless,
                Class::Distributional => StrategyClass::Distributional,
            };
            let problem = l.problem(Task::Synthesize(class))?;
            let search = match search {
                SearchArg::Auto => Search::Auto,
                SearchArg::Template => Search::Template,
            };
            solve(problem, "synthesize", &s, search)
        }
        Command::Simulate {
            input,
            strategy,
            cert,
            steps,
            json,
        } => {
            let l = Loaded::new(&input)?;
            let mdp = parse_mdp(&l.mdp.1, &l.mdp.0)?;
            let n = mdp.num_states();
            let nba = parse_spec(&l.spec.1, n, &l.spec.0)?;
            let init = parse_init(&l.init.1, n, &l.init.0)?;
            let st: Strategy = match (strategy, cert) {
                (Some(p), _) => parse_strategy(&read_file(&p)?, &mdp, &p.display().to_string())?,
                (None, Some(p)) => parse_certificate(&read_file(&p)?, &mdp, &p.display().to_string())?.strategy,
                (None, None) => unreachable!("clap requires one"),
            };
            let point = match init.points.as_slice() {
                [p] if init.rows.is_empty() => p.clone(),
                _ => return Err(Error::Usage("simulation needs a single initial point".into())),
            };
            let mu0 = Distribution::new(point)?;
            let r = simulate_monitor(&mdp, &st, &mu0, &nba, steps, &default_tolerance())?;
            let rep = SimulationReport::new(steps, &r);
            if json {
                outln!("{}", serde_json::to_string_pretty(&rep).expect("serializable report"));
            } else {
                out!("{}", rep.text(mdp.states()));
            }
            Ok(0)
        }
        Command::CheckCert {
            input,
            cert,
            solver,
            timeout,
            json,
        } => {
            let l = Loaded::new(&input)?;
            let mdp = parse_mdp(&l.mdp.1, &l.mdp.0)?;
            let sol = parse_certificate(&read_file(&cert)?, &mdp, &cert.display().to_string())?;
            let problem = l.problem(Task::Verify(Source {
                name: "certificate",
                text: &distcert::formats::strategy::write_strategy(&sol.strategy, &mdp),
            }))?;
            let mut cfg = PipelineConfig::new(resolve_command(solver.as_deref()));
            cfg.timeout = Duration::from_secs(timeout);
            let rep = validate(&sol, &problem, &cfg)?;
            let summary = ValidationSummary::from(&rep);
            if json {
                outln!("{}", serde_json::to_string_pretty(&summary).expect("serializable report"));
            } else {
                out!("{}", validation_text(&summary));
            }
            Ok(if rep.verdict() == Verdict::Rejected { 1 } else { 0 })
        }
        Command::Describe { input } => {
            let l = Loaded::new(&input)?;
            let mdp = parse_mdp(&l.mdp.1, &l.mdp.0)?;
            let n = mdp.num_states();
            let nba = parse_spec(&l.spec.1, n, &l.spec.0)?;
            let init = parse_init(&l.init.1, n, &l.init.0)?;
            let p = build_pdts(&mdp, &nba, &init, UpdateKind::Fixed)?;
            out!("{}", p.describe());
            Ok(0)
        }
        Command::GenGridworld {
            preset,
            size,
            walls,
            slips,
            target,
            avoid,
            threshold,
            out,
        } => {
            let spec = match preset {
                Some(GridPreset::ThreeByThree) => GridSpec::three_by_three(),
                Some(GridPreset::FourByFour) => GridSpec::four_by_four_passage(),
                None => GridSpec {
                    size,
                    walls: walls.iter().map(|w| cell(w)).collect::<Result<_>>()?,
                    slippery: slips
                        .iter()
                        .map(|s| {
                            let (c, p) = s
                                .split_once(':')
                                .ok_or_else(|| Error::Usage(format!("expected `row,col:probability`, found `{s}`")))?;
                            Ok((cell(c)?, rational(p)?))
                        })
                        .collect::<Result<_>>()?,
                    target: cell(&target)?,
                    avoid: avoid.as_deref().map(cell).transpose()?,
                    threshold: rational(&threshold)?,
                },
            };
            let g = gen_gridworld(&spec)?;
            write_file(&out.join("gridworld.mdp"), &write_mdp(&g.mdp))?;
            write_file(&out.join("gridworld.spec"), &format!("{}\n", g.spec))?;
            write_file(&out.join("gridworld.init"), &g.init)?;
            outln!("{} states; spec {}; files in {}", g.mdp.num_states(), g.spec, out.display());
            Ok(0)
        }
        Command::GenPagerank { graph, damping, out } => {
            let g = parse_digraph(&read_file(&graph)?, &graph.display().to_string())?;
            let d = match damping {
                Some(d) => rational(&d)?,
                None => default_damping(),
            };
            let inst = gen_pagerank(&g, &d)?;
            write_file(&out.join("pagerank.mdp"), &write_mdp(&inst.mdp))?;
            write_file(&out.join("pagerank.spec"), &format!("{}\n", inst.spec))?;
            write_file(&out.join("pagerank.init"), &inst.init)?;
            outln!("{} states; spec {}; files in {}", inst.mdp.num_states(), inst.spec, out.display());
            Ok(0)
        }
        Command::Instances { write } => {
            for i in INSTANCES {
                let task = match i.task {
                    Task::Verify(s) => format!("verify with {}", s.name),
                    Task::Synthesize(_) => "synthesize".to_string(),
                };
                outln!("{}: {} {} {} ({task})", i.name, i.mdp.name, i.spec.name, i.init.name);
                if let Some(dir) = &write {
                    let mut files = vec![i.mdp, i.spec, i.init];
                    if let Task::Verify(s) = i.task {
                        files.push(s);
                    }
                    for f in files {
                        write_file(&dir.join(f.name), f.text)?;
                    }
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
