use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use lineorder::atoms;
use lineorder::grho::{self, GroupWord, LazyHomeo, Triviality};
use lineorder::labelling::{self, Labelling, Recursive};
use lineorder::markedspace::{self, MarkedGroup, NuBound};
use lineorder::thompson::{self, RotationNumber};
use lineorder::{sample, Dyadic, Error, Interval};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Exact experiments with labelled groups of PL homeomorphisms of the line.
///
/// Words use the tokens z1 z2 z3 x1 x2 x3 with a trailing ' for inverses.
/// Numbers print as exact dyadics "p/2^e".
#[derive(Parser)]
#[command(name = "lineorder", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Lab {
    /// Labelling file (`type: periodic|recursive`, `word:` or `pads:` lines).
    #[arg(long)]
    labelling: PathBuf,
}

#[derive(Args)]
struct Window {
    /// Integer window endpoints.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, default_values_t = [-8, 8])]
    window: Vec<i64>,
}

impl Window {
    fn interval(&self) -> anyhow::Result<Interval> {
        let (lo, hi) = (self.window[0], self.window[1]);
        if lo >= hi {
            return Err(Error::Parse(format!("window [{lo}, {hi}] is empty")).into());
        }
        Ok(Interval::int(lo, hi))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Image of a dyadic point under a word.
    Eval {
        #[command(flatten)]
        lab: Lab,
        #[arg(long)]
        word: String,
        #[arg(long, allow_negative_numbers = true)]
        x: String,
        #[arg(long)]
        json: bool,
    },
    /// Exact restriction of a word to a window, as breakpoints or SVG.
    Restrict {
        #[command(flatten)]
        lab: Lab,
        #[arg(long)]
        word: String,
        #[command(flatten)]
        window: Window,
        #[arg(long)]
        json: bool,
        /// Write an SVG plot to this file.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Decide whether a word is the identity.
    Trivial {
        #[command(flatten)]
        lab: Lab,
        #[arg(long)]
        word: String,
        #[arg(long)]
        json: bool,
    },
    /// Bound on ν between the marked groups of two labellings.
    Distance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long)]
        json: bool,
    },
    /// Convergence of periodic approximations of a recursive labelling.
    Converge {
        #[command(flatten)]
        lab: Lab,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Report wall_time_ms as 0 so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Periodic labelling agreeing with a recursive one on all factors of length ≤ k.
    Approx {
        #[command(flatten)]
        lab: Lab,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        json: bool,
    },
    /// Atoms of a word in a window.
    Atoms {
        #[command(flatten)]
        lab: Lab,
        #[arg(long)]
        word: String,
        #[command(flatten)]
        window: Window,
        /// Decoration depth.
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Cellular decomposition of a stable word in a window.
    Cells {
        #[command(flatten)]
        lab: Lab,
        #[arg(long)]
        word: String,
        #[command(flatten)]
        window: Window,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long)]
        json: bool,
    },
    /// Translation number on the line and rotation number on the circle (periodic labellings).
    Rotation {
        #[command(flatten)]
        lab: Lab,
        #[arg(long)]
        word: String,
        /// Largest period searched for a periodic point.
        #[arg(long, default_value_t = thompson::DEFAULT_Q)]
        q: u32,
        /// Orbit length for the fallback bounds.
        #[arg(long, default_value_t = thompson::DEFAULT_N)]
        n: u32,
        #[arg(long)]
        json: bool,
    },
    /// Recurrence bounds and inverse closure of all factors of length ≤ k.
    Axioms {
        #[command(flatten)]
        lab: Lab,
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 100_000)]
        max_window: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check that no reduced word of length ≤ L in the free pair is trivial.
    FreeCheck {
        #[command(flatten)]
        lab: Lab,
        #[arg(long, default_value_t = 8)]
        length: usize,
    },
    /// Commuting chain for seeded λ- and π-images of commutators in F.
    Chain {
        #[command(flatten)]
        lab: Lab,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Element sending a dyadic r to 0.
    ToZero {
        #[command(flatten)]
        lab: Lab,
        #[arg(long, allow_negative_numbers = true)]
        r: String,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long)]
        json: bool,
    },
    /// Cellwise check of the locality clauses with constant k.
    KrhoCheck {
        #[command(flatten)]
        lab: Lab,
        #[arg(long)]
        word: String,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        window: Window,
        #[arg(long)]
        json: bool,
    },
}

fn load(path: &Path) -> anyhow::Result<Arc<dyn Labelling>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(labelling::parse_labelling(&text)?)
}

fn word(s: &str) -> anyhow::Result<GroupWord> {
    Ok(s.parse::<GroupWord>()?)
}

fn write_out(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(())
}

/// Dyadic notation when the value is dyadic.
fn show_rational(r: &lineorder::plmap::Rational) -> String {
    Dyadic::from_rational(r).map(|d| d.to_string()).unwrap_or_else(|| r.to_string())
}

fn print_json(v: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&v).expect("json values serialize"));
}

fn rotation_json(r: &RotationNumber) -> serde_json::Value {
    match r {
        RotationNumber::Exact { value, q, witness } => {
            json!({"exact": true, "value": value.to_string(), "q": q, "witness": witness.to_string()})
        }
        RotationNumber::Bounds { lo, hi } => json!({"exact": false, "lo": lo.to_string(), "hi": hi.to_string()}),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Eval { lab, word: w, x, json } => {
            let h = LazyHomeo::from_word(load(&lab.labelling)?, &word(&w)?);
            let x: Dyadic = x.parse()?;
            let y = h.eval(&x)?;
            if json {
                print_json(json!({"word": w, "x": x.to_string(), "image": y.to_string()}));
            } else {
                println!("{y}");
            }
        }
        Command::Restrict { lab, word: w, window, json, svg } => {
            let h = LazyHomeo::from_word(load(&lab.labelling)?, &word(&w)?);
            let g = h.window_restrict(&window.interval()?)?;
            if let Some(p) = svg {
                write_out(&p, &g.to_svg())?;
            }
            if json {
                println!("{}", g.to_json());
            } else {
                for (x, y) in g.breakpoints().iter().zip(g.values()) {
                    println!("{x} -> {y}");
                }
            }
        }
        Command::Trivial { lab, word: w, json } => {
            let h = LazyHomeo::from_word(load(&lab.labelling)?, &word(&w)?);
            let t = h.is_trivial()?;
            match (&t, json) {
                (Triviality::Trivial, false) => println!("trivial"),
                (Triviality::Nontrivial { witness }, false) => {
                    println!("nontrivial");
                    println!("witness {witness} -> {}", h.eval(witness)?);
                }
                (Triviality::Trivial, true) => print_json(json!({"word": w, "trivial": true})),
                (Triviality::Nontrivial { witness }, true) => print_json(json!({
                    "word": w,
                    "trivial": false,
                    "witness": witness.to_string(),
                    "image": h.eval(witness)?.to_string(),
                })),
            }
        }
        Command::Distance { a, b, kmax, json } => {
            let total: u64 = (1..=kmax).map(markedspace::reduced_word_count).sum();
            eprintln!("enumerating {total} reduced words (two triviality checks each)");
            let ma = MarkedGroup::new(load(&a)?);
            let mb = MarkedGroup::new(load(&b)?);
            let nu = markedspace::nu_bound(&ma, &mb, kmax)?;
            if json {
                print_json(serde_json::to_value(&nu).expect("serializable"));
            } else {
                match nu {
                    NuBound::Exact { nu, witness } => {
                        println!("nu = {nu}");
                        println!("d = 2^-{nu}");
                        println!("witness {witness}");
                    }
                    NuBound::AtLeast { k_max } => {
                        println!("nu >= {k_max}");
                        println!("d <= 2^-{k_max}");
                    }
                }
            }
        }
        Command::Converge { lab, nmax, csv, json, no_timing } => {
            let rho = load(&lab.labelling)?;
            let rec = rho
                .as_recursive()
                .ok_or_else(|| Error::Precondition("converge needs a recursive labelling".into()))?;
            let (pa, pb) = rec.pads();
            let total: u64 = (1..=nmax).flat_map(|n| (1..=n).map(markedspace::reduced_word_count)).sum();
            eprintln!("enumerating {total} reduced words over {nmax} approximations");
            let mut rows = markedspace::convergence_table(Arc::new(Recursive::new(pa, pb)?), nmax)?;
            if no_timing {
                rows.iter_mut().for_each(|r| r.wall_time_ms = 0);
            }
            let table = markedspace::convergence_csv(&rows);
            if let Some(p) = csv {
                write_out(&p, &table)?;
            }
            if let Some(p) = json {
                write_out(&p, &markedspace::convergence_json(&rows))?;
            }
            print!("{table}");
            if rows.iter().any(|r| !r.passes()) {
                return Err(Error::Internal("a row has nu below n".into()).into());
            }
        }
        Command::Approx { lab, k, json } => {
            let rho = load(&lab.labelling)?;
            let rec = rho
                .as_recursive()
                .ok_or_else(|| Error::Precondition("approx needs a recursive labelling".into()))?;
            let p = labelling::periodic_approximation(rec, k)?;
            if json {
                print_json(json!({"k": k, "period_letters": p.word().len(), "word": p.word().to_string()}));
            } else {
                println!("type: periodic");
                println!("word: {}", p.word());
            }
        }
        Command::Atoms { lab, word: w, window, depth, csv, json } => {
            let rho = load(&lab.labelling)?;
            let h = LazyHomeo::from_word(rho.clone(), &word(&w)?);
            let found = atoms::atoms_in_window(&h, &window.interval()?)?;
            let partial = found.iter().filter(|a| a.partial).count();
            let dec: Vec<_> = found.into_iter().map(|a| atoms::decorate(rho.as_ref(), a, depth)).collect();
            let table = atoms::atoms_csv(&dec);
            if let Some(p) = csv {
                write_out(&p, &table)?;
            }
            if json {
                let rows: Vec<_> = dec
                    .iter()
                    .map(|a| json!({"lo": a.atom.lo(), "hi": a.atom.hi(), "partial": a.atom.partial}))
                    .collect();
                print_json(json!({"atoms": rows, "classes": atoms::classify(&dec).len()}));
            } else {
                print!("{table}");
                if partial > 0 {
                    eprintln!("{partial} atom(s) cut by the window");
                }
            }
        }
        Command::Cells { lab, word: w, window, depth, json } => {
            let rho = load(&lab.labelling)?;
            let h = LazyHomeo::from_word(rho.clone(), &word(&w)?);
            let win = window.interval()?;
            let d = atoms::cellular_decomposition(&h, depth, &win)?;
            let pieces: Vec<_> = d
                .pieces
                .iter()
                .map(|p| {
                    let carriers: Vec<String> =
                        p.members.iter().map(|&i| d.atoms[i].atom.carrier.to_string()).collect();
                    Ok(json!({"atoms": carriers, "restriction": serde_json::from_str::<serde_json::Value>(&p.piece.window_restrict(&win)?.to_json())?}))
                })
                .collect::<anyhow::Result<_>>()?;
            if json {
                print_json(json!({"depth": depth, "pieces": pieces}));
            } else {
                println!("{} piece(s) at depth {depth}", d.pieces.len());
                for (i, p) in d.pieces.iter().enumerate() {
                    let carriers: Vec<String> =
                        p.members.iter().map(|&i| d.atoms[i].atom.carrier.to_string()).collect();
                    println!("piece {i}: {}", carriers.join(" "));
                }
            }
        }
        Command::Rotation { lab, word: w, q, n, json } => {
            let h = LazyHomeo::from_word(load(&lab.labelling)?, &word(&w)?);
            let circle = markedspace::quotient_circle(&h)?;
            let rot = thompson::rotation_number(&circle, q, n);
            let tr = markedspace::translation_number(&h, q, n)?;
            if json {
                print_json(json!({"word": w, "period": circle.period(), "rotation": rotation_json(&rot), "translation": rotation_json(&tr)}));
            } else {
                println!("period {}", circle.period());
                println!("rotation {rot}");
                println!("translation {tr}");
            }
        }
        Command::Axioms { lab, k, max_window, json } => {
            let rho = load(&lab.labelling)?;
            let rep = labelling::axiom_report(rho.as_ref(), k, max_window)?;
            if json {
                let rows: Vec<_> = rep
                    .entries
                    .iter()
                    .map(|e| json!({"word": e.word.to_string(), "recurrence": e.recurrence, "inverse_present": e.inverse_present}))
                    .collect();
                print_json(json!({"k": k, "all_recurrent": rep.all_recurrent(), "inverse_closed": rep.inverse_closed(), "factors": rows}));
            } else {
                for e in &rep.entries {
                    let r = e.recurrence.map(|r| r.to_string()).unwrap_or_else(|| "none".into());
                    println!("{}\trecurrence {r}\tinverse {}", e.word, if e.inverse_present { "yes" } else { "no" });
                }
                println!("all recurrent: {}", rep.all_recurrent());
                println!("inverse closed: {}", rep.inverse_closed());
            }
        }
        Command::FreeCheck { lab, length } => {
            let rho = load(&lab.labelling)?;
            let (f, g) = grho::free_pair(rho.clone())?;
            let gens = [f.clone(), f.inverse(), g.clone(), g.inverse()];
            let names = ["f", "f'", "g", "g'"];
            let mut words: Vec<Vec<usize>> = vec![Vec::new()];
            for len in 1..=length {
                let mut next = Vec::with_capacity(words.len() * 3);
                for w in &words {
                    for s in 0..4 {
                        if w.last().map(|&l| l ^ 1 == s).unwrap_or(false) {
                            continue;
                        }
                        let mut v = w.clone();
                        v.push(s);
                        next.push(v);
                    }
                }
                words = next;
                for w in &words {
                    let h = w.iter().fold(LazyHomeo::identity(rho.clone()), |acc, &s| acc.then(&gens[s]));
                    if h.is_trivial()?.is_trivial() {
                        let name: Vec<&str> = w.iter().map(|&s| names[s]).collect();
                        println!("trivial word {}", name.join(" "));
                        return Err(Error::Internal("free pair relation found".into()).into());
                    }
                }
                println!("length {len}: {} words, all nontrivial", words.len());
            }
        }
        Command::Chain { lab, seed, json } => {
            let rho = load(&lab.labelling)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f0 = sample::f_prime_element(&mut rng, 3);
            let g0 = sample::f_prime_element(&mut rng, 3);
            let f = LazyHomeo::lambda(rho.clone(), &f0)?;
            let g = LazyHomeo::pi(rho, &g0)?;
            let chain = grho::commuting_chain(&f, &g)?;
            let c = &chain.certificate;
            if json {
                print_json(json!({
                    "seed": seed,
                    "f0": serde_json::from_str::<serde_json::Value>(&f0.to_json())?,
                    "g0": serde_json::from_str::<serde_json::Value>(&g0.to_json())?,
                    "eps": show_rational(&c.eps),
                    "eps_prime": c.eps_prime.to_string(),
                    "delta": show_rational(&c.delta),
                    "delta_prime": c.delta_prime.to_string(),
                    "commutators_trivial": true,
                }));
            } else {
                println!("seed {seed}");
                println!("eps {} eps' {}", show_rational(&c.eps), c.eps_prime);
                println!("delta {} delta' {}", show_rational(&c.delta), c.delta_prime);
                println!("[f,h1] = [h1,h2] = [h2,g] = e");
            }
        }
        Command::ToZero { lab, r, max_len, json } => {
            let rho = load(&lab.labelling)?;
            let r: Dyadic = r.parse()?;
            let (g, w) = grho::map_dyadic_to_zero(rho, &r, max_len)?;
            let image = g.eval(&r)?;
            if json {
                print_json(json!({"r": r.to_string(), "word": w.to_string(), "element": g.describe(), "image": image.to_string()}));
            } else {
                println!("word {w}");
                println!("element {}", g.describe());
                println!("{r} -> {image}");
            }
        }
        Command::KrhoCheck { lab, word: w, k, window, json } => {
            let rho = load(&lab.labelling)?;
            let h = LazyHomeo::from_word(rho.clone(), &word(&w)?);
            let rep = grho::krho_window_check(rho.as_ref(), &h, k, &window.interval()?)?;
            if json {
                let fails: Vec<_> = rep
                    .failures
                    .iter()
                    .map(|f| json!({"clause": format!("{:?}", f.clause), "cell_x": f.cell_x, "cell_y": f.cell_y}))
                    .collect();
                print_json(json!({"k": k, "cells": rep.cells, "pairs": rep.pairs_checked, "passed": rep.passed(), "failures": fails}));
            } else {
                println!("{} cells, {} pairs compared", rep.cells, rep.pairs_checked);
                for f in &rep.failures {
                    println!("fail {:?} cells {} {}", f.clause, f.cell_x, f.cell_y);
                }
                println!("{}", if rep.passed() { "pass" } else { "fail" });
            }
        }
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Internal(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
