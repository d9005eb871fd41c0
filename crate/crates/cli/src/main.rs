use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use cspda_lab::constructions::spec_alphabet;
use cspda_lab::harness::{audit_all, equiv_check, trace_run, AuditConfig, EquivParams, Group, GroupFile};
use cspda_lab::machine::{CspdaSpec, LetterMap, Machine};
use cspda_lab::Error;

/// Workbench for check-stack pushdown automata over group word problems.
#[derive(Parser)]
#[command(name = "cspda-lab", version)]
struct Cli {
    /// Worker threads for word evaluation (0 = all cores).
    #[arg(long, global = true, env = "CSPDA_LAB_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Check-symbol enumeration order, comma separated; unlisted symbols follow.
    #[arg(long, global = true, value_delimiter = ',')]
    symbol_order: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the machine of a group spec and write it as a machine file.
    Build {
        spec: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Decide one word against a machine file or a group spec.
    Check {
        file: PathBuf,
        #[arg(short, long)]
        word: String,
        #[arg(long)]
        init_bound: Option<usize>,
    },
    /// Compare the machine with the oracle on every word up to length n.
    Equiv {
        spec: PathBuf,
        #[arg(short)]
        n: usize,
        #[arg(long)]
        init_bound: Option<usize>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Validator, trivial-subword audit, divergence scan and robust-entry sweep.
    Audit(AuditArgs),
    /// Print every transition of one run as JSON lines.
    Trace {
        spec: PathBuf,
        /// Init word as space-separated check symbols.
        #[arg(long)]
        init: String,
        #[arg(short, long)]
        word: String,
    },
}

#[derive(Args)]
struct AuditArgs {
    spec: PathBuf,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    max_len: usize,
    #[arg(long)]
    init_bound: Option<usize>,
    #[arg(long, default_value_t = 4)]
    robust_len: usize,
    #[arg(long, default_value_t = 4)]
    robust_n: usize,
    #[arg(long)]
    report: Option<PathBuf>,
}

enum Loaded {
    Group(Group),
    Machine(Machine),
}

impl Loaded {
    fn machine(&self) -> &Machine {
        match self {
            Loaded::Group(g) => &g.machine,
            Loaded::Machine(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = !matches!(e.downcast_ref::<Error>(), Some(Error::DivergenceDetected(_)));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn read_file(path: &Path) -> anyhow::Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
    if value.get("group").is_some() {
        Ok(Loaded::Group(GroupFile::parse(&text)?.load()?))
    } else {
        Ok(Loaded::Machine(Machine::new(CspdaSpec::from_json(&text)?)?))
    }
}

fn load(path: &Path, order: &[String]) -> anyhow::Result<Loaded> {
    let mut loaded = read_file(path)?;
    if !order.is_empty() {
        match &mut loaded {
            Loaded::Group(g) => g.machine = g.machine.with_symbol_order(order)?,
            Loaded::Machine(m) => *m = m.with_symbol_order(order)?,
        }
    }
    Ok(loaded)
}

fn load_group(path: &Path, order: &[String]) -> anyhow::Result<Group> {
    match load(path, order)? {
        Loaded::Group(g) => Ok(g),
        Loaded::Machine(_) => {
            Err(Error::Schema(format!("{} is a machine file, not a group spec", path.display())).into())
        }
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let order = &cli.symbol_order;
    match cli.command {
        Command::Build { spec, output } => {
            let g = load_group(&spec, order)?;
            fs::write(&output, g.machine.spec().to_json()).with_context(|| format!("writing {}", output.display()))?;
            let s = g.machine.spec();
            println!("{}: {} states, {} transitions", g.name, s.states.len(), s.transitions.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { file, word, init_bound } => {
            let loaded = load(&file, order)?;
            let m = loaded.machine();
            let alphabet = match &loaded {
                Loaded::Group(g) => g.oracle.alphabet().clone(),
                Loaded::Machine(m) => spec_alphabet(m.spec()),
            };
            let w = alphabet.parse_word(&word)?;
            let bound = match (&loaded, init_bound) {
                (_, Some(b)) => b,
                (Loaded::Group(g), None) => g.init_bound(w.len()).0,
                (Loaded::Machine(_), None) => w.len() + 2,
            };
            let r = m.accepts(&LetterMap::new(m, &alphabet)?.symbols(&w), bound)?;
            let verdict = if r.accepted { "ACCEPT" } else { "REJECT" };
            let witness = r.witness.map(|i| format!(" witness: {}", m.spec().format_symbols(&i.word)));
            let witness = witness.unwrap_or_default();
            match &loaded {
                Loaded::Group(g) => {
                    let trivial = g.oracle.is_trivial(&w);
                    let note = if trivial { "trivial" } else { "nontrivial" };
                    println!("{verdict} ({note}){witness}");
                    Ok(if r.accepted != trivial { ExitCode::SUCCESS } else { ExitCode::from(1) })
                }
                Loaded::Machine(_) => {
                    println!("{verdict}{witness}");
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Equiv { spec, n, init_bound, report, csv } => {
            let g = load_group(&spec, order)?;
            let (bound, source) = match init_bound {
                Some(b) => (b, "flag"),
                None => g.init_bound(n),
            };
            let start = Instant::now();
            let p = EquivParams { group: &g.name, n, init_bound: bound, bound_source: source, jobs: cli.jobs };
            let r = equiv_check(&g.machine, g.oracle.as_ref(), &p)?;
            if let Some(path) = &report {
                fs::write(path, r.to_json()).with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = &csv {
                let f = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
                r.write_csv(f)?;
            }
            println!(
                "{}: n={} init_bound={} ({}) words={} agree={} machine_only={} oracle_only={}",
                r.group,
                r.n,
                r.init_bound,
                r.bound_source,
                r.words,
                r.counts.agree,
                r.counts.machine_only,
                r.counts.oracle_only
            );
            for m in r.mismatches.iter().take(20) {
                let note = m.note.as_deref().map(|n| format!(" [{n}]")).unwrap_or_default();
                println!("  {} machine={} oracle={}{note}", m.word, m.machine_accepts, m.oracle_nontrivial);
            }
            eprintln!("elapsed {:.2?}", start.elapsed());
            Ok(if r.agrees() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Audit(a) => {
            let g = load_group(&a.spec, order)?;
            let bound = a.init_bound.unwrap_or_else(|| g.init_bound(a.max_len).0);
            let cfg = AuditConfig {
                samples: a.samples,
                seed: a.seed,
                max_len: a.max_len,
                robust_len: a.robust_len,
                robust_n: a.robust_n,
                ..AuditConfig::new(bound)
            };
            let r = audit_all(&g.name, &g.machine, g.oracle.as_ref(), cfg)?;
            let text = serde_json::to_string_pretty(&r)? + "\n";
            write_or_print(a.report.as_deref(), &text)?;
            eprintln!("{}: {}", g.name, if r.certified { "certified at tested sizes" } else { "NOT certified" });
            Ok(if r.certified { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Trace { spec, init, word } => {
            let loaded = load(&spec, order)?;
            let m = loaded.machine();
            let init = m.init_word(&m.spec().parse_symbols(&init)?)?;
            let alphabet = match &loaded {
                Loaded::Group(g) => g.oracle.alphabet().clone(),
                Loaded::Machine(m) => spec_alphabet(m.spec()),
            };
            let w = LetterMap::new(m, &alphabet)?.symbols(&alphabet.parse_word(&word)?);
            let mut out = io::stdout().lock();
            for e in trace_run(m, &init, &w) {
                if writeln!(out, "{}", serde_json::to_string(&e)?).is_err() {
                    break;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
