use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use msou_core::codec::{decode_tree_sequence, encode_tree_sequence, parse_tree_text, render_tree_text, to_dot, WordPrefix};
use msou_core::eval::{evaluate, Assignment, EvalBudget, EvalError};
use msou_core::logic::{parse_formula, render_formula, render_pretty, Alphabet};
use msou_core::minsky::{describe_run, find_accepting_run, parse_machine, MinskyMachine};
use msou_core::reduction::{check_conditions, machine_to_formula, witness_tree_sequence, WitnessParams};
use msou_core::vecseq::{identity_grid_window, is_window_mix, window_equiv, EquivParams, MixOutcome, NumberWindow, VecSeqError, VectorWindow};

#[derive(Parser)]
#[command(name = "msou", version, about = "MSO+U reduction workbench")]
struct Cli {
    /// Emit a single JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Work limit: selections for `vecseq mix`, word length for `eval`.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decode a word into its tree sequence.
    Decode {
        word: String,
        #[arg(long)]
        dot: bool,
        /// Alphabet size; defaults to the largest letter.
        #[arg(long)]
        alphabet: Option<u32>,
    },
    /// Encode a tree sequence (indented text) into its canonical word.
    Encode { tree: String },
    /// Compile a machine into a formula.
    Compile {
        machine: String,
        #[arg(long)]
        pretty: bool,
    },
    /// Search for an accepting run.
    Simulate {
        machine: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Generate the word of a witness tree sequence.
    Witness {
        machine: String,
        #[arg(long)]
        trees: usize,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Check the witness conditions on a word.
    CheckWitness {
        machine: String,
        word: String,
        #[arg(long, default_value_t = 0)]
        ignore_prefix: usize,
        /// Treat the last tree as complete.
        #[arg(long)]
        keep_last: bool,
    },
    /// Evaluate a closed formula on a word, reading U with a size threshold.
    Eval {
        formula: String,
        word: String,
        #[arg(long)]
        u_threshold: usize,
        #[arg(long)]
        alphabet: Option<u32>,
    },
    /// Vector sequence windows.
    #[command(subcommand)]
    Vecseq(VecCmd),
}

#[derive(Args)]
struct Bounds {
    #[arg(long, default_value_t = 10)]
    max_len: usize,
    #[arg(long, default_value_t = 6)]
    max_counter: u64,
}

#[derive(Args)]
struct Transfer {
    #[arg(long)]
    b: u64,
    #[arg(long)]
    b_prime: u64,
}

#[derive(Subcommand)]
enum VecCmd {
    /// Is F (vector window JSON) a mix of G?
    Mix {
        f: String,
        g: String,
        #[command(flatten)]
        p: Transfer,
    },
    /// Are two number windows (JSON arrays) equivalent?
    Equiv {
        f: String,
        g: String,
        #[command(flatten)]
        p: Transfer,
    },
    /// Print the identity grid window.
    Identity {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        side: usize,
        #[arg(long, default_value_t = 1)]
        scale: u64,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Budget(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

/// Command outcome: whether the checked property holds, plus the payloads.
struct Outcome {
    ok: bool,
    text: String,
    json: Value,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome { ok: true, text, json }
    }
}

fn read_input(path: &str) -> anyhow::Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn load_machine(path: &str) -> anyhow::Result<MinskyMachine> {
    Ok(parse_machine(&read_input(path)?)?)
}

fn load_word(path: &str, alphabet: Option<u32>) -> anyhow::Result<WordPrefix> {
    let a = alphabet.map(Alphabet::new).transpose().map_err(|e| anyhow!("{e}"))?;
    Ok(WordPrefix::parse(&read_input(path)?, a)?)
}

fn vec_err(e: VecSeqError) -> Failure {
    match e {
        VecSeqError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
        other => Failure::Usage(other.into()),
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.cmd {
        Cmd::Decode { word, dot, alphabet } => {
            let t = decode_tree_sequence(&load_word(word, *alphabet)?).map_err(anyhow::Error::from)?;
            let text = if *dot { to_dot(&t) } else { render_tree_text(&t) };
            let json = json!({ "depth": t.depth(), "trees": t.trees().len(), "leaf_positions": t.leaf_positions(), "text": text });
            Ok(Outcome::ok(text, json))
        }
        Cmd::Encode { tree } => {
            let t = parse_tree_text(&read_input(tree)?).map_err(anyhow::Error::from)?;
            let w = encode_tree_sequence(&t);
            Ok(Outcome::ok(format!("{w}\n"), json!({ "word": w.letters() })))
        }
        Cmd::Compile { machine, pretty } => {
            let f = machine_to_formula(&load_machine(machine)?);
            let text = if *pretty { render_pretty(&f) } else { render_formula(&f) };
            let size = msou_core::logic::analyze(&f).size;
            Ok(Outcome::ok(format!("{text}\n"), json!({ "formula": render_formula(&f), "size": size })))
        }
        Cmd::Simulate { machine, bounds } => {
            let m = load_machine(machine)?;
            match find_accepting_run(&m, bounds.max_len, bounds.max_counter) {
                Some(r) => {
                    let mut text: String = r.configurations.iter().map(|c| format!("{c}\n")).collect();
                    let v = describe_run(&r);
                    text.push_str(&format!("description: {}\n", join(&v.0)));
                    Ok(Outcome::ok(text, json!({ "found": true, "run": r, "description": v })))
                }
                None => Ok(Outcome {
                    ok: false,
                    text: "no accepting run within bounds\n".into(),
                    json: json!({ "found": false }),
                }),
            }
        }
        Cmd::Witness { machine, trees, bounds } => {
            let m = load_machine(machine)?;
            let Some(r) = find_accepting_run(&m, bounds.max_len, bounds.max_counter) else {
                return Ok(Outcome {
                    ok: false,
                    text: "no accepting run within bounds\n".into(),
                    json: json!({ "found": false }),
                });
            };
            let v = describe_run(&r);
            let p = WitnessParams::new(v.clone(), *trees).map_err(anyhow::Error::from)?;
            let w = encode_tree_sequence(&witness_tree_sequence(&p));
            Ok(Outcome::ok(format!("{w}\n"), json!({ "found": true, "description": v, "word": w.letters() })))
        }
        Cmd::CheckWitness { machine, word, ignore_prefix, keep_last } => {
            let m = load_machine(machine)?;
            let t = decode_tree_sequence(&load_word(word, Some(4))?).map_err(anyhow::Error::from)?;
            let t = if *keep_last { t } else { t.complete_trees() };
            let rep = check_conditions(&t, &m, *ignore_prefix).map_err(anyhow::Error::from)?;
            let text = format!(
                "a: {}\nb: {}\nc: {}\nd: {}\ndescription: {}\n",
                rep.a,
                rep.b,
                rep.c,
                rep.d,
                join(&rep.description.0)
            );
            let json = serde_json::to_value(&rep).map_err(anyhow::Error::from)?;
            Ok(Outcome { ok: rep.all(), text, json })
        }
        Cmd::Eval { formula, word, u_threshold, alphabet } => {
            let w = load_word(word, *alphabet)?;
            let f = parse_formula(&read_input(formula)?, w.alphabet()).map_err(anyhow::Error::from)?;
            let mut b = EvalBudget::new(*u_threshold);
            if let Some(n) = cli.budget {
                b.max_word_len = n as usize;
            }
            let value = evaluate(&f, &w, &Assignment::new(), &b).map_err(|e| match e {
                EvalError::BudgetExceeded(_) => Failure::Budget(e.to_string()),
                other => Failure::Usage(other.into()),
            })?;
            Ok(Outcome {
                ok: value,
                text: format!("{value}\n"),
                json: json!({ "value": value, "u_threshold": u_threshold, "semantics": "bounded" }),
            })
        }
        Cmd::Vecseq(VecCmd::Mix { f, g, p }) => {
            let f = VectorWindow::from_json(&read_input(f)?).map_err(vec_err)?;
            let g = VectorWindow::from_json(&read_input(g)?).map_err(vec_err)?;
            let p = EquivParams::new(p.b, p.b_prime).map_err(vec_err)?;
            let budget = cli.budget.map(u128::from).unwrap_or(1 << 20);
            let out = is_window_mix(&f, &g, p, budget).map_err(vec_err)?;
            let text = match &out {
                MixOutcome::Mix => "mix\n".to_string(),
                MixOutcome::NotMix { counterexample } => format!("not a mix: counterexample {counterexample}\n"),
            };
            let json = serde_json::to_value(&out).map_err(anyhow::Error::from)?;
            Ok(Outcome { ok: out.is_mix(), text, json })
        }
        Cmd::Vecseq(VecCmd::Equiv { f, g, p }) => {
            let f = NumberWindow::from_json(&read_input(f)?).map_err(vec_err)?;
            let g = NumberWindow::from_json(&read_input(g)?).map_err(vec_err)?;
            let p = EquivParams::new(p.b, p.b_prime).map_err(vec_err)?;
            let value = window_equiv(&f, &g, p).map_err(vec_err)?;
            Ok(Outcome { ok: value, text: format!("{value}\n"), json: json!({ "equivalent": value }) })
        }
        Cmd::Vecseq(VecCmd::Identity { dim, side, scale }) => {
            let w = identity_grid_window(*dim, *side).map_err(vec_err)?.scaled(*scale);
            let json: Value = serde_json::from_str(&w.to_json()).map_err(anyhow::Error::from)?;
            Ok(Outcome::ok(format!("{}\n", w.to_json()), json))
        }
    }
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", out.json);
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(Failure::Usage(e)) => {
            if cli.json {
                println!("{}", json!({ "error": format!("{e:#}"), "kind": "usage" }));
            }
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            if cli.json {
                println!("{}", json!({ "error": msg, "kind": "budget" }));
            }
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
