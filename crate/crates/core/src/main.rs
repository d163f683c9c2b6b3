use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use autstruct::automata::ops::DEFAULT_SUBSET_BUDGET;
use autstruct::checker::{decide_classic, decide_local, ClassicOptions, LocalOptions};
use autstruct::fragments::{decide_sigma1, decide_sigma2, FragmentOptions};
use autstruct::logic::{parse_formula, Formula};
use autstruct::presentation::{canonize, growth_series, max_degree, validate, Presentation, DEFAULT_DEGREE_CAP};
use autstruct::reductions::{builtin, expspace, tiny_machines, two_expspace, TuringMachine, BUILTIN_NAMES};
use autstruct::Error;

const EXIT_TRUE: u8 = 0;
const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "autstruct", version, about = "First-order model checking over string automatic structures")]
struct Cli {
    /// Output mode.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Engine {
    Classic,
    Local,
    Sigma1,
    Sigma2,
}

impl Engine {
    fn name(self) -> &'static str {
        match self {
            Engine::Classic => "classic",
            Engine::Local => "local",
            Engine::Sigma1 => "sigma1",
            Engine::Sigma2 => "sigma2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Construction {
    Expspace,
    #[value(name = "2expspace")]
    TwoExpspace,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the structural checks on a presentation.
    Validate {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET, value_parser = positive)]
        budget: usize,
    },
    /// Write the injective length-lexicographic canonical presentation.
    Canonize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET, value_parser = positive)]
        budget: usize,
    },
    /// Maximum Gaifman degree, up to a cap.
    Degree {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP, value_parser = positive)]
        cap: usize,
        #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET, value_parser = positive)]
        budget: usize,
    },
    /// Normalized growth function up to a radius.
    Growth {
        file: PathBuf,
        #[arg(long)]
        radius: usize,
        /// Cap on each sphere size; defaults to the geometric bound.
        #[arg(long, value_parser = positive_u64)]
        cap: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET, value_parser = positive)]
        budget: usize,
    },
    /// Decide a first-order sentence.
    Decide {
        file: PathBuf,
        /// The sentence, inline or as a file name.
        #[arg(long)]
        formula: String,
        #[arg(long, value_enum, default_value_t = Engine::Classic)]
        engine: Engine,
        #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET, value_parser = positive)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_DEGREE_CAP, value_parser = positive)]
        degree_cap: usize,
        #[arg(long, value_parser = positive)]
        size_cap: Option<usize>,
        /// Print statistics in text mode too.
        #[arg(long)]
        stats: bool,
    },
    /// Generate a presentation and sentence from a Turing machine.
    Reduce {
        #[arg(value_enum)]
        construction: Construction,
        machine: PathBuf,
        #[arg(long)]
        input: String,
        /// Overrides the counter length (or tape length) derived from the input.
        #[arg(long)]
        m: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print a builtin presentation or machine.
    Builtin {
        /// Builtin name; omit to list them.
        name: Option<String>,
        /// Look up a builtin Turing machine instead.
        #[arg(long)]
        machine: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    positive(s).map(|n| n as u64)
}

struct Outcome {
    code: u8,
    json: Value,
    text: String,
}

impl Outcome {
    fn ok(json: Value, text: String) -> Self {
        Outcome { code: EXIT_TRUE, json, text }
    }
}

/// An inline sentence wins over a file of the same name; the clash is
/// reported on stderr.
fn read_formula(arg: &str) -> autstruct::Result<Formula> {
    let path = Path::new(arg);
    let is_file = path.is_file();
    match parse_formula(arg) {
        Ok(f) => {
            if is_file {
                eprintln!("warning: {arg:?} is both a formula and a file; using it as a formula");
            }
            Ok(f)
        }
        Err(e) if !is_file => Err(e),
        Err(_) => parse_formula(&std::fs::read_to_string(path)?),
    }
}

/// Writes a line to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn write_or_print(output: Option<&Path>, text: &str) -> autstruct::Result<()> {
    match output {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            emit(text);
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> autstruct::Result<Outcome> {
    match &cli.command {
        Command::Validate { file, budget } => {
            let report = validate(&Presentation::load(file)?, *budget)?;
            let mut text = String::new();
            for f in &report.findings {
                let subject = f.subject.as_deref().map(|s| format!(" [{s}]")).unwrap_or_default();
                let status = if f.passed { "ok" } else if f.mandatory { "FAIL" } else { "note" };
                text.push_str(&format!("{status:4} {}{subject}", f.check.id()));
                if let Some(c) = &f.counterexample {
                    text.push_str(&format!(" counterexample {c:?}"));
                }
                text.push('\n');
            }
            text.push_str(if report.passed { "valid" } else { "invalid" });
            let code = if report.passed { EXIT_TRUE } else { EXIT_USAGE };
            Ok(Outcome { code, json: serde_json::to_value(&report)?, text })
        }
        Command::Canonize { file, output, budget } => {
            let canon = canonize(&Presentation::load(file)?, *budget)?;
            let body = serde_json::to_string_pretty(&canon.to_json())?;
            match output {
                Some(path) => {
                    std::fs::write(path, body)?;
                    let text = format!("wrote {}", path.display());
                    Ok(Outcome::ok(json!({ "output": path }), text))
                }
                None => Ok(Outcome::ok(serde_json::to_value(canon.to_json())?, body)),
            }
        }
        Command::Degree { file, cap, budget } => {
            let d = max_degree(&Presentation::load(file)?, *cap, *budget)?;
            let text = match d.bound() {
                Some(n) => format!("degree {n}"),
                None => format!("degree exceeds {cap}"),
            };
            Ok(Outcome::ok(serde_json::to_value(d)?, text))
        }
        Command::Growth { file, radius, cap, budget } => {
            let series = growth_series(&Presentation::load(file)?, *radius, *cap, *budget)?;
            let text = series
                .iter()
                .map(|g| format!("g'({}) = {}{}", g.radius, g.value, if g.saturated { " (capped)" } else { "" }))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome::ok(json!({ "growth": series }), text))
        }
        Command::Decide { file, formula, engine, budget, degree_cap, size_cap, stats } => {
            let p = Presentation::load(file)?;
            let sentence = read_formula(formula)?;
            let (verdict, stats_json) = match engine {
                Engine::Classic => {
                    let (v, s) = decide_classic(&p, &sentence, ClassicOptions { budget: *budget, ..Default::default() })?;
                    (v, serde_json::to_value(s)?)
                }
                Engine::Local => {
                    let options =
                        LocalOptions { budget: *budget, degree_cap: *degree_cap, size_cap: *size_cap, ..Default::default() };
                    let (v, s) = decide_local(&p, &sentence, options)?;
                    (v, serde_json::to_value(s)?)
                }
                Engine::Sigma1 => {
                    let (v, s) = decide_sigma1(&p, &sentence, FragmentOptions { budget: *budget, ..Default::default() })?;
                    (v, serde_json::to_value(s)?)
                }
                Engine::Sigma2 => {
                    let (v, s) = decide_sigma2(&p, &sentence, FragmentOptions { budget: *budget, ..Default::default() })?;
                    (v, serde_json::to_value(s)?)
                }
            };
            let mut text = format!("{verdict}");
            if *stats {
                text.push_str(&format!("\n{}", serde_json::to_string_pretty(&stats_json)?));
            }
            Ok(Outcome {
                code: if verdict { EXIT_TRUE } else { EXIT_FALSE },
                json: json!({ "verdict": verdict, "engine": engine.name(), "stats": stats_json }),
                text,
            })
        }
        Command::Reduce { construction, machine, input, m, output } => {
            let tm = TuringMachine::load(machine)?;
            let word = tm.parse_input(input)?;
            let out = match construction {
                Construction::Expspace => expspace::reduce(&tm, &word, *m)?,
                Construction::TwoExpspace => two_expspace::reduce(&tm, &word, *m)?,
            };
            std::fs::create_dir_all(output)?;
            let pres = output.join("presentation.json");
            let sentence = output.join("sentence.fo");
            let meta = output.join("metadata.json");
            out.presentation.save(&pres)?;
            std::fs::write(&sentence, format!("{}\n", out.sentence))?;
            std::fs::write(&meta, serde_json::to_string_pretty(&out.metadata)?)?;
            let text = format!(
                "wrote {}, {} and {} (m = {}, {} cells)",
                pres.display(),
                sentence.display(),
                meta.display(),
                out.metadata.m,
                out.metadata.cells
            );
            let json = json!({ "presentation": pres, "sentence": sentence, "metadata": out.metadata });
            Ok(Outcome::ok(json, text))
        }
        Command::Builtin { name: None, machine, .. } => {
            let names: Vec<&str> =
                if *machine { tiny_machines().iter().map(|(n, _)| *n).collect() } else { BUILTIN_NAMES.to_vec() };
            Ok(Outcome::ok(json!(names), names.join("\n")))
        }
        Command::Builtin { name: Some(name), machine, output } => {
            let body = if *machine {
                let tm = tiny_machines()
                    .into_iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, tm)| tm)
                    .ok_or_else(|| Error::UnknownBuiltin(name.clone()))?;
                tm.to_json()
            } else {
                serde_json::to_string_pretty(&builtin(name)?.to_json())?
            };
            write_or_print(output.as_deref(), &body)?;
            // The document itself is the output.
            Ok(Outcome { code: EXIT_TRUE, json: Value::Null, text: String::new() })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json if !out.json.is_null() => emit(&serde_json::to_string_pretty(&out.json).unwrap()),
                Format::Text if !out.text.is_empty() => emit(&out.text),
                _ => {}
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource() { EXIT_RESOURCE } else { EXIT_USAGE })
        }
    }
}
