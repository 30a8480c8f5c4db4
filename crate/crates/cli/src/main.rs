use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use downclosure::engine::{decide_sup_cfg, decide_sup_regular};
use downclosure::indexed::{pcp_grammar, IntervalGrammar, PartitionedGrammar};
use downclosure::{
    downward_closure, Alphabet, CfgAdapter, Cfg, Error, IndexedGrammar, Nfa, RegularAdapter,
    Transducer, Word,
};

#[derive(Parser)]
#[command(name = "dclose", version, about = "Downward closures and indexed-grammar transformations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Class {
    Nfa,
    Cfg,
    Indexed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Dot,
}

#[derive(Subcommand)]
enum Cmd {
    /// Downward closure as a simple regular expression.
    Dc {
        #[arg(long, value_enum)]
        class: Class,
        #[arg(long)]
        input: PathBuf,
        /// Maximum number of inclusion tests.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        /// `dot` renders the automaton of the expression.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether ↓L = a1*…an*; prints yes (exit 0) or no (exit 1).
    Sup {
        #[arg(long, value_enum)]
        class: Class,
        #[arg(long)]
        input: PathBuf,
        /// Letter order, space separated; defaults to the declared order.
        #[arg(long)]
        order: Option<String>,
    },
    /// Saturated automaton of an NFA (the reference closure).
    OracleDc {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Words up to a length, one per line (`_` is ε).
    Enumerate {
        #[arg(long)]
        input: PathBuf,
        /// Inferred from the extension or the contents when absent.
        #[arg(long, value_enum)]
        class: Option<Class>,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    IndexedNormalize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    IndexedInterval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accepts an interval grammar, or an indexed grammar that is made one first.
    IndexedProductive {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One grammar per set of direct letters; `--out` names a directory.
    IndexedPartition {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    IndexedTriple {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        transducer: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Automaton for the index words under which a nonterminal derives into a target.
    Iw {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        nonterminal: String,
        /// Target automaton; all terminal words when absent.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grammar for a correspondence instance; pairs are `name:alpha:beta` over 1 and 2.
    PcpGrammar {
        #[arg(long = "pair", required = true)]
        pairs: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure with a diagnostic; always exit code 2.
struct Fail(String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(e.to_string())
    }
}

type Res<T> = Result<T, Fail>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Fail(format!("{}: {e}", path.display())))
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> downclosure::Result<T>) -> Res<T> {
    let src = read(path)?;
    parse(&src).map_err(|e| e.in_file(&path.display().to_string()).into())
}

fn has_key(src: &str, key: &str) -> bool {
    src.lines().any(|l| l.trim_start().starts_with(key))
}

/// Plain, interval or partitioned grammar files alike.
fn load_indexed(path: &Path) -> Res<IndexedGrammar> {
    load(path, |src| {
        if has_key(src, "direct:") {
            Ok(PartitionedGrammar::parse(src)?.grammar.grammar)
        } else if has_key(src, "interval:") {
            Ok(IntervalGrammar::parse(src)?.grammar)
        } else {
            IndexedGrammar::parse(src)
        }
    })
}

fn infer_class(path: &Path) -> Res<Class> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("nfa") => return Ok(Class::Nfa),
        Some("cfg") => return Ok(Class::Cfg),
        Some("ix") | Some("ig") => return Ok(Class::Indexed),
        _ => {}
    }
    let src = read(path)?;
    Ok(if has_key(&src, "alphabet:") {
        Class::Nfa
    } else if has_key(&src, "indices:") {
        Class::Indexed
    } else {
        Class::Cfg
    })
}

fn emit(out: Option<&Path>, text: &str) -> Res<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Fail(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(m: &Nfa, format: Format) -> String {
    match format {
        Format::Text => m.to_string(),
        Format::Dot => m.to_dot(),
    }
}

fn words(x: &Alphabet, ws: impl IntoIterator<Item = Word>, exhaustive: bool) -> String {
    let mut s = String::new();
    for w in ws {
        s.push_str(&x.format_word(&w));
        s.push('\n');
    }
    s.push_str(&format!("# exhaustive: {exhaustive}\n"));
    s
}

fn run(cmd: Cmd) -> Res<ExitCode> {
    match cmd {
        Cmd::Dc { class, input, budget, format, out } => {
            let (x, r) = match class {
                Class::Nfa => {
                    let m = load(&input, Nfa::parse)?;
                    let r = downward_closure(&RegularAdapter, &m, m.alphabet(), budget)?;
                    (m.alphabet().clone(), r)
                }
                Class::Cfg => {
                    let g = load(&input, Cfg::parse)?;
                    let r = downward_closure(&CfgAdapter, &g, g.terminals(), budget)?;
                    (g.terminals().clone(), r)
                }
                Class::Indexed => return Err(Fail("dc supports the nfa and cfg classes".into())),
            };
            let text = match format {
                Format::Text => format!("{}\n", r.sre.format(&x)),
                Format::Dot => r.sre.to_nfa(&x).to_dot(),
            };
            emit(out.as_deref(), &text)?;
        }
        Cmd::Sup { class, input, order } => {
            let order_of = |declared: &Alphabet| -> Res<Alphabet> {
                match &order {
                    Some(o) => Ok(Alphabet::new(o.split_whitespace())?),
                    None => Ok(declared.clone()),
                }
            };
            let yes = match class {
                Class::Nfa => {
                    let m = load(&input, Nfa::parse)?;
                    decide_sup_regular(&m, &order_of(m.alphabet())?)?
                }
                Class::Cfg => {
                    let g = load(&input, Cfg::parse)?;
                    decide_sup_cfg(&g, &order_of(g.terminals())?)?
                }
                Class::Indexed => return Err(Fail("sup supports the nfa and cfg classes".into())),
            };
            println!("{}", if yes { "yes" } else { "no" });
            return Ok(if yes { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Cmd::OracleDc { input, format, out } => {
            let m = load(&input, Nfa::parse)?;
            emit(out.as_deref(), &render(&m.downward_saturate(), format))?;
        }
        Cmd::Enumerate { input, class, max_len, budget, out } => {
            let class = match class {
                Some(c) => c,
                None => infer_class(&input)?,
            };
            let text = match class {
                Class::Nfa => {
                    let m = load(&input, Nfa::parse)?;
                    words(m.alphabet(), m.enumerate(max_len), true)
                }
                Class::Cfg => {
                    let g = load(&input, Cfg::parse)?;
                    words(g.terminals(), g.enumerate(max_len, budget)?, true)
                }
                Class::Indexed => {
                    let g = load_indexed(&input)?;
                    let b = g.bounded_language(max_len, budget);
                    words(g.terminals(), b.words, b.exhaustive)
                }
            };
            emit(out.as_deref(), &text)?;
        }
        Cmd::IndexedNormalize { input, out } => {
            let g = load(&input, IndexedGrammar::parse)?;
            emit(out.as_deref(), &g.normalize().to_string())?;
        }
        Cmd::IndexedInterval { input, out } => {
            let g = load(&input, IndexedGrammar::parse)?;
            emit(out.as_deref(), &g.to_interval()?.to_string())?;
        }
        Cmd::IndexedProductive { input, out } => {
            let ig = load(&input, |src| {
                if has_key(src, "interval:") {
                    IntervalGrammar::parse(src)
                } else {
                    IndexedGrammar::parse(src)?.to_interval()
                }
            })?;
            emit(out.as_deref(), &ig.to_productive()?.to_string())?;
        }
        Cmd::IndexedPartition { input, out } => {
            let ig = load(&input, IntervalGrammar::parse)?;
            let family = ig.partitioned_family();
            let t = ig.grammar.terminals();
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|e| Fail(format!("{}: {e}", dir.display())))?;
                    for d in &family {
                        let names: Vec<&str> = d.direct.iter().map(|&a| t.name(a)).collect();
                        let stem = if names.is_empty() { "none".to_string() } else { names.join("-") };
                        emit(Some(&dir.join(format!("direct-{stem}.ix"))), &d.to_string())?;
                    }
                }
                None => {
                    let texts: Vec<String> = family.iter().map(|d| d.to_string()).collect();
                    print!("{}", texts.join("---\n"));
                }
            }
        }
        Cmd::IndexedTriple { input, transducer, out } => {
            let g = load(&input, IndexedGrammar::parse)?;
            let t = load(&transducer, Transducer::parse)?;
            emit(out.as_deref(), &g.triple_construct(&t)?.to_string())?;
        }
        Cmd::Iw { input, nonterminal, target, format, out } => {
            let g = load(&input, IndexedGrammar::parse)?;
            let a = g
                .nonterminal_id(&nonterminal)
                .ok_or_else(|| Fail(format!("{}: no nonterminal `{nonterminal}`", input.display())))?;
            let r = match target {
                Some(p) => load(&p, Nfa::parse)?,
                None => Nfa::universal(g.terminals().clone()),
            };
            emit(out.as_deref(), &render(&g.iw_automaton(a, &r)?, format))?;
        }
        Cmd::PcpGrammar { pairs, out } => {
            let mut parsed = Vec::new();
            for p in &pairs {
                let parts: Vec<&str> = p.split(':').collect();
                match parts[..] {
                    [x, alpha, beta] => parsed.push((x, alpha, beta)),
                    _ => return Err(Fail(format!("pair `{p}` is not of the form name:alpha:beta"))),
                }
            }
            emit(out.as_deref(), &pcp_grammar(&parsed)?.to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(code) => code,
        Err(Fail(msg)) => {
            eprintln!("dclose: {msg}");
            ExitCode::from(2)
        }
    }
}
