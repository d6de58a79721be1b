//! `pfk`: command-line front end.
//!
//! Exit codes: 0 parafree / success, 1 not parafree / corpus mismatch,
//! 2 inconclusive, 3 errors.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use pfk_core::abelian::abelianization;
use pfk_core::fox::fox_derivative;
use pfk_core::homology::betti_chain_estimate;
use pfk_core::magnus::{lcs_depth, magnus_embed};
use pfk_core::parafree::{certify_presentation, certify_splitting, check_graph, Bounds, Verdict};
use pfk_core::presentation::{parse, parse_word, Parsed, Presentation};
use pfk_core::pro_p::{evaluate, solve_word_equation_from, PQuotElt};
use pfk_core::ring::Ring;
use pfk_core::words::{Letter, Word};

#[derive(Parser)]
#[command(name = "pfk", version, about = "Free group computations and parafreeness verdicts")]
struct Cli {
    /// Emit JSON with sorted keys.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a file and print it back in canonical form.
    Parse { file: PathBuf },
    /// Abelian invariants of the group.
    Abelianize { file: PathBuf },
    /// Truncated Magnus expansions of the relators, or of `--word`.
    Magnus {
        file: PathBuf,
        #[arg(long)]
        word: Option<String>,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// `z` or `f<p>`.
        #[arg(long, default_value = "z")]
        ring: String,
    },
    /// Fox derivatives of the relators.
    Fox {
        file: PathBuf,
        /// 1-based relator index.
        #[arg(long)]
        relator: Option<usize>,
    },
    /// Solves `omega(x, c2, ...) = 1` in a truncated free pro-p group.
    Solve {
        /// Word whose variables, in order of first appearance, are x, c2, ...
        omega: String,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 5)]
        degree: usize,
        /// Values of the constants, e.g. `x2=y,x3=z`.
        #[arg(long)]
        assign: String,
    },
    /// Mod-q homology along the iterated elementary abelian chain.
    Betti {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        prime: u64,
        #[arg(long, default_value_t = 2)]
        levels: usize,
    },
    /// Parafreeness verdict.
    CheckParafree {
        file: PathBuf,
        #[arg(long = "prime")]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 6)]
        dmax: usize,
    },
    /// Runs check-parafree over `*.gsp` files against `.expect` sidecars.
    Corpus { dir: PathBuf },
}

struct Output {
    text: String,
    json: Value,
    code: u8,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, code: 0 }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path) -> Result<Parsed> {
    let text = read_input(path)?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn group_of(parsed: &Parsed) -> Presentation {
    match parsed {
        Parsed::Presentation(p) => p.clone(),
        Parsed::Splitting(s) => s.realize().presentation,
        Parsed::Graph(g) => g.fundamental().presentation,
    }
}

fn cmd_parse(file: &Path) -> Result<Output> {
    let parsed = load(file)?;
    let p = group_of(&parsed);
    let kind = match parsed {
        Parsed::Presentation(_) => "presentation",
        Parsed::Splitting(_) => "splitting",
        Parsed::Graph(_) => "graph",
    };
    let relators: Vec<String> = p.relators().iter().map(|r| p.display_word(r).to_string()).collect();
    let json = json!({
        "kind": kind,
        "text": parsed.to_string(),
        "generators": p.names(),
        "relators": relators,
    });
    Ok(Output::ok(parsed.to_string(), json))
}

fn cmd_abelianize(file: &Path) -> Result<Output> {
    let p = group_of(&load(file)?);
    let inv = abelianization(&p);
    let torsion: Vec<String> = inv.torsion.iter().map(ToString::to_string).collect();
    let json = json!({ "free_rank": inv.free_rank, "torsion": torsion, "text": inv.to_string() });
    Ok(Output::ok(inv.to_string(), json))
}

fn cmd_magnus(file: &Path, word: Option<&str>, degree: usize, ring: &str) -> Result<Output> {
    let ring = Ring::from_tag(ring).ok_or_else(|| anyhow!("unknown ring {ring:?}; use z or f<p>"))?;
    let p = group_of(&load(file)?);
    let words = match word {
        Some(w) => vec![p.word(w)?],
        None => p.relators().to_vec(),
    };
    let mut lines = Vec::new();
    let mut items = Vec::new();
    for w in &words {
        let shown = p.display_word(w).to_string();
        let series = magnus_embed(w, degree, ring).display(p.names()).to_string();
        let depth = if w.is_identity() { "-".to_string() } else { lcs_depth(w, degree)?.to_string() };
        lines.push(format!("M({shown}) = {series}  [depth {depth}]"));
        items.push(json!({ "word": shown, "series": series, "depth": depth }));
    }
    Ok(Output::ok(lines.join("\n"), json!({ "ring": ring.to_string(), "degree": degree, "words": items })))
}

fn cmd_fox(file: &Path, relator: Option<usize>) -> Result<Output> {
    let p = group_of(&load(file)?);
    let chosen: Vec<usize> = match relator {
        Some(k) if k == 0 || k > p.relators().len() => bail!("relator {k} out of range 1..={}", p.relators().len()),
        Some(k) => vec![k - 1],
        None => (0..p.relators().len()).collect(),
    };
    let mut lines = Vec::new();
    let mut items = Vec::new();
    for k in chosen {
        let r = &p.relators()[k];
        let mut derivs = serde_json::Map::new();
        for (s, name) in p.names().iter().enumerate() {
            let d = fox_derivative(r, s).display(p.names()).to_string();
            lines.push(format!("d r{} / d {name} = {d}", k + 1));
            derivs.insert(name.clone(), Value::String(d));
        }
        items.push(json!({ "relator": p.display_word(r).to_string(), "derivatives": derivs }));
    }
    Ok(Output::ok(lines.join("\n"), Value::Array(items)))
}

/// Identifiers in order of first appearance.
fn identifiers(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for tok in text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
        if tok.is_empty() || tok.starts_with(|c: char| c.is_ascii_digit()) {
            continue;
        }
        if !out.iter().any(|t| t == tok) {
            out.push(tok.to_string());
        }
    }
    out
}

fn random_word(rng: &mut StdRng, rank: usize, len: usize) -> Word {
    let letters = (0..len).map(|_| {
        let g = rng.random_range(0..rank);
        if rng.random_bool(0.5) {
            Letter::neg(g)
        } else {
            Letter::pos(g)
        }
    });
    Word::reduce(letters, rank).expect("generators in range")
}

fn cmd_solve(omega: &str, prime: u64, degree: usize, assign: &str, seed: u64) -> Result<Output> {
    let vars = identifiers(omega);
    if vars.len() < 2 {
        bail!("omega needs the unknown and at least one constant");
    }
    let w = parse_word(omega, &vars)?;
    let mut values: Vec<Option<String>> = vec![None; vars.len() - 1];
    for part in assign.split(',').filter(|s| !s.trim().is_empty()) {
        let (name, val) = part.split_once('=').ok_or_else(|| anyhow!("assignment {part:?} lacks '='"))?;
        let i = vars[1..]
            .iter()
            .position(|v| v == name.trim())
            .ok_or_else(|| anyhow!("{:?} is not a constant of omega", name.trim()))?;
        values[i] = Some(val.trim().to_string());
    }
    let texts: Vec<String> = values
        .into_iter()
        .zip(&vars[1..])
        .map(|(v, n)| v.ok_or_else(|| anyhow!("no value for {n}")))
        .collect::<Result<_>>()?;
    let names = identifiers(&texts.join(" "));
    if names.is_empty() {
        bail!("constants must involve at least one generator");
    }
    let cs = texts
        .iter()
        .map(|t| Ok(PQuotElt::from_word(&parse_word(t, &names)?, prime, degree)?))
        .collect::<Result<Vec<_>>>()?;
    let one = PQuotElt::one(prime, names.len(), degree)?;
    let sol = solve_word_equation_from(&w, &cs, &one)?;
    let check = evaluate(&w, &sol.x, &cs)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let start = PQuotElt::from_word(&random_word(&mut rng, names.len(), 8), prime, degree)?;
    let other = solve_word_equation_from(&w, &cs, &start)?;
    let x = sol.x.display(&names).to_string();
    let text = format!(
        "x = {x}\niterations {}; omega(x, c) = 1: {}; seed-independent: {}",
        sol.iterations,
        check.is_one(),
        other.x == sol.x
    );
    let json = json!({
        "x": x,
        "iterations": sol.iterations,
        "agreement": sol.agreement,
        "verified": check.is_one(),
        "seed_independent": other.x == sol.x,
    });
    Ok(Output::ok(text, json))
}

fn cmd_betti(file: &Path, prime: u64, levels: usize) -> Result<Output> {
    let p = group_of(&load(file)?);
    let chain = betti_chain_estimate(&p, prime, levels)?;
    let mut lines = Vec::new();
    let mut items = Vec::new();
    for l in &chain.levels {
        let value = *l.ratio.numer() as f64 / *l.ratio.denom() as f64;
        lines.push(format!("level {}  index {}  h1 {}  ratio {} ({value:.6})", l.level, l.index, l.h1_dim, l.ratio));
        items.push(json!({ "level": l.level, "index": l.index, "h1dim": l.h1_dim, "ratio": l.ratio.to_string(), "value": value }));
    }
    Ok(Output::ok(lines.join("\n"), Value::Array(items)))
}

fn verdict_of(parsed: &Parsed, bounds: &Bounds) -> Result<Verdict> {
    Ok(match parsed {
        Parsed::Presentation(p) => certify_presentation(p, bounds)?,
        Parsed::Splitting(s) => certify_splitting(s, bounds)?,
        Parsed::Graph(g) => check_graph(g, bounds)?,
    })
}

fn verdict_json(v: &Verdict) -> Value {
    let mut obj = json!({
        "verdict": v.name(),
        "conditions": v.conditions(),
        "r_ab": v.r_ab(),
        "certificate": v.certificate(),
    });
    match v {
        Verdict::NotParafree { failed, .. } => obj["failed"] = json!(failed),
        Verdict::Inconclusive { unresolved, bounds, .. } => {
            obj["unresolved"] = json!(unresolved);
            obj["bounds"] = json!(bounds);
        }
        Verdict::Parafree(_) => {}
    }
    obj
}

fn verdict_text(v: &Verdict) -> String {
    let mut lines = vec![v.name().to_string()];
    if let Some(r) = v.r_ab() {
        lines.push(format!("r_ab = {r}"));
    }
    for c in v.conditions() {
        lines.push(format!("  [{}] {}: {}", c.status, c.id, c.evidence));
    }
    lines.join("\n")
}

fn cmd_check(file: &Path, primes: Vec<u64>, dmax: usize) -> Result<Output> {
    let primes = if primes.is_empty() { Bounds::default().primes } else { primes };
    let bounds = Bounds::new(primes, dmax)?;
    let v = verdict_of(&load(file)?, &bounds)?;
    Ok(Output { text: verdict_text(&v), json: verdict_json(&v), code: v.exit_code() as u8 })
}

#[derive(Debug, PartialEq, Eq)]
struct Expectation {
    verdict: String,
    r_ab: Option<usize>,
}

fn read_expectation(path: &Path) -> Result<Expectation> {
    let text = fs::read_to_string(path).with_context(|| format!("missing sidecar {}", path.display()))?;
    let mut verdict = None;
    let mut r_ab = None;
    for tok in text.split_whitespace() {
        match tok {
            "parafree" | "not-parafree" | "inconclusive" => verdict = Some(tok.to_string()),
            t if t.starts_with("r_ab=") => r_ab = Some(t[5..].parse().with_context(|| format!("bad {t:?}"))?),
            t if t.starts_with('#') => break,
            t => bail!("unexpected token {t:?} in {}", path.display()),
        }
    }
    let verdict = verdict.ok_or_else(|| anyhow!("no verdict in {}", path.display()))?;
    Ok(Expectation { verdict, r_ab })
}

enum Row {
    Checked { name: String, expected: Expectation, got: Expectation },
    Broken { name: String, error: String },
}

fn corpus_entry(gsp: &Path) -> Row {
    let name = gsp.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let run = || -> Result<(Expectation, Expectation)> {
        let expected = read_expectation(&gsp.with_extension("expect"))?;
        let v = verdict_of(&load(gsp)?, &Bounds::default())?;
        Ok((expected, Expectation { verdict: v.name().to_string(), r_ab: v.r_ab() }))
    };
    match run() {
        Ok((expected, got)) => Row::Checked { name, expected, got },
        Err(e) => Row::Broken { name, error: format!("{e:#}") },
    }
}

fn cmd_corpus(dir: &Path) -> Result<Output> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "gsp"))
        .collect();
    files.sort();

    let rows: Vec<Mutex<Option<Row>>> = files.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(files.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(f) = files.get(i) else { break };
                *rows[i].lock().expect("unpoisoned") = Some(corpus_entry(f));
            });
        }
    });

    let mut code = 0u8;
    let mut lines = Vec::new();
    let mut items = Vec::new();
    for row in rows.into_iter().map(|m| m.into_inner().expect("unpoisoned").expect("filled")) {
        match row {
            Row::Checked { name, expected, got } => {
                let ok = expected.verdict == got.verdict && (expected.r_ab.is_none() || expected.r_ab == got.r_ab);
                if !ok && code == 0 {
                    code = 1;
                }
                let show = |e: &Expectation| match e.r_ab {
                    Some(r) => format!("{} r_ab={r}", e.verdict),
                    None => e.verdict.clone(),
                };
                lines.push(format!("{:<4} {name:<24} expected {:<20} got {}", if ok { "ok" } else { "FAIL" }, show(&expected), show(&got)));
                items.push(json!({
                    "name": name, "ok": ok,
                    "expected": show(&expected), "got": show(&got),
                }));
            }
            Row::Broken { name, error } => {
                code = 3;
                lines.push(format!("ERR  {name:<24} {error}"));
                items.push(json!({ "name": name, "ok": false, "error": error }));
            }
        }
    }
    let passed = items.iter().filter(|i| i["ok"] == json!(true)).count();
    lines.push(format!("{passed}/{} matched", items.len()));
    Ok(Output { text: lines.join("\n"), json: json!({ "entries": items, "matched": passed }), code })
}

fn run(cli: Cli) -> Result<Output> {
    match cli.command {
        Command::Parse { file } => cmd_parse(&file),
        Command::Abelianize { file } => cmd_abelianize(&file),
        Command::Magnus { file, word, degree, ring } => cmd_magnus(&file, word.as_deref(), degree, &ring),
        Command::Fox { file, relator } => cmd_fox(&file, relator),
        Command::Solve { omega, prime, degree, assign } => cmd_solve(&omega, prime, degree, &assign, cli.seed),
        Command::Betti { file, prime, levels } => cmd_betti(&file, prime, levels),
        Command::CheckParafree { file, primes, dmax } => cmd_check(&file, primes, dmax),
        Command::Corpus { dir } => cmd_corpus(&dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                println!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
