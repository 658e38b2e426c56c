//! Command-line entry point: one subcommand per module, text or JSON
//! output, optional batch processing, and a three-valued exit status
//! (0 = all ok, 1 = some answer refuted, 2 = some error).

use clap::{Parser, Subcommand, ValueEnum};
use earring::expr::{build_remark_expression, remark_interval, SeqIndex, WordExpression};
use earring::homotopy::{
    build_decomposition, tree_from_json, tree_to_json, verify_decomposition,
};
use earring::pairing::{
    enumerate_pairings, find_complete_pairing, maximal_pairing, residual_word, validate_pairing,
    NoncrossingPairing,
};
use earring::path::{
    gamma_bound_intervals, is_null_loop, reduce_path, word_of_path, LoopAnswer, ProperPath,
};
use earring::rat::{format_rational, parse_rational};
use earring::space::{distance, EPoint, FiniteModel, SpaceModel};
use earring::word::FiniteWord;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "earring", version, about = "Hawaiian-earring word calculus and earring-space tools")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Process one input item per line of this file instead of the inline input
    #[arg(long, global = true)]
    batch: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-word operations
    Word {
        #[command(subcommand)]
        verb: WordVerb,
    },
    /// Word-expression operations
    Expr {
        #[command(subcommand)]
        verb: ExprVerb,
    },
    /// The interval family and its standard trivial word
    Remark {
        #[command(subcommand)]
        verb: RemarkVerb,
    },
    /// Noncrossing inverse pairings
    Pairing {
        #[command(subcommand)]
        verb: PairingVerb,
    },
    /// Earring-space metric queries
    Space {
        #[command(subcommand)]
        verb: SpaceVerb,
    },
    /// Proper-path operations
    Path {
        #[command(subcommand)]
        verb: PathVerb,
    },
    /// Decomposition trees
    Homotopy {
        #[command(subcommand)]
        verb: HomotopyVerb,
    },
}

#[derive(Subcommand)]
enum WordVerb {
    /// Freely reduce a word
    Reduce { word: Option<String> },
    /// Decide equivalence of two words
    Equiv { left: String, right: String },
    /// Project a word to a generator set
    Project {
        /// comma-separated generator indices, e.g. 1,3
        #[arg(long)]
        gens: String,
        word: Option<String>,
    },
}

#[derive(Subcommand)]
enum ExprVerb {
    /// Project an expression to a generator set
    Project {
        #[arg(long)]
        gens: String,
        expr: Option<String>,
    },
    /// Compare two expressions over the first n generators
    EquivUpto {
        #[arg(long)]
        n: u32,
        left: String,
        right: String,
    },
}

#[derive(Subcommand)]
enum RemarkVerb {
    /// Endpoints of the interval indexed by a sequence, e.g. `interval 0 0`
    Interval { entries: Vec<u32> },
    /// The standard trivial word down to a nesting depth
    Word {
        #[arg(long)]
        depth: u32,
    },
}

#[derive(Subcommand)]
enum PairingVerb {
    /// Find a complete pairing (refuted with the reduced word if none exists)
    Find { word: Option<String> },
    /// Validate a pairing against a word
    Check {
        word: String,
        /// pairing text, e.g. {(0,3),(1,2)}
        pairing: String,
    },
    /// The maximal pairing from leftmost stack reduction
    Maximal { word: Option<String> },
    /// The unpaired residual of the maximal pairing (the reduced word)
    Residual { word: Option<String> },
    /// Enumerate all pairings (brute force, short words only)
    Enumerate {
        #[arg(long)]
        complete: bool,
        word: Option<String>,
    },
}

#[derive(Subcommand)]
enum SpaceVerb {
    /// Distance between two points, e.g. --p "c:1:0.5" --q "b:0.2,0.3"
    Dist {
        #[arg(long, default_value = "unit-square")]
        model: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// The n-th dense point of a model
    Dense {
        #[arg(long, default_value = "unit-square")]
        model: String,
        n: u32,
    },
}

#[derive(Subcommand)]
enum PathVerb {
    /// The word read off a path file
    Word { file: PathBuf },
    /// Decide null-homotopy of a loop
    Null {
        #[arg(long, default_value = "unit-square")]
        model: String,
        file: PathBuf,
    },
    /// Collapse cancelling winding spans
    Reduce {
        #[arg(long, default_value = "unit-square")]
        model: String,
        file: PathBuf,
    },
    /// Maximal pairing-bound parameter intervals
    Gbounds {
        /// pairing text; defaults to the complete pairing of the path word
        #[arg(long)]
        pairing: Option<String>,
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum HomotopyVerb {
    /// Build the decomposition tree of a trivial loop
    Build {
        #[arg(long)]
        delta: String,
        #[arg(long, default_value = "unit-square")]
        model: String,
        file: PathBuf,
    },
    /// Re-check a decomposition tree against its loop
    Verify {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        delta: String,
        #[arg(long, default_value = "unit-square")]
        model: String,
        file: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Status {
    Ok,
    Refuted,
    Error,
}

#[derive(Serialize)]
struct CommandResult {
    status: Status,
    payload: Value,
    elapsed_ms: f64,
}

/// Outcome of one item: status, machine payload, human line.
type Outcome = (Status, Value, String);

fn ok(payload: Value, text: impl Into<String>) -> Result<Outcome, String> {
    Ok((Status::Ok, payload, text.into()))
}

fn refuted(payload: Value, text: impl Into<String>) -> Result<Outcome, String> {
    Ok((Status::Refuted, payload, text.into()))
}

fn parse_word(text: &str) -> Result<FiniteWord, String> {
    FiniteWord::parse(text).map_err(|e| e.to_string())
}

fn parse_gens(text: &str) -> Result<BTreeSet<u32>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad generator index `{t}`")))
        .collect()
}

fn resolve_model(name: &str) -> Result<SpaceModel, String> {
    if let Ok(model) = SpaceModel::by_name(name) {
        return Ok(model);
    }
    if let Ok(dir) = std::env::var("EARRING_MODEL_DIR") {
        for candidate in [format!("{dir}/{name}"), format!("{dir}/{name}.txt")] {
            if let Ok(text) = std::fs::read_to_string(&candidate) {
                return FiniteModel::parse(&text)
                    .map(SpaceModel::Finite)
                    .map_err(|e| e.to_string());
            }
        }
    }
    Err(format!("unknown model `{name}`"))
}

fn read_path_file(file: &PathBuf) -> Result<ProperPath, String> {
    let text = std::fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    ProperPath::parse(&text).map_err(|e| e.to_string())
}

fn run_word(verb: &WordVerb, item: Option<&str>) -> Result<Outcome, String> {
    match verb {
        WordVerb::Reduce { word } => {
            let w = parse_word(input(item, word)?)?;
            let reduced = w.free_reduce();
            ok(json!({ "word": w.to_string(), "reduced": reduced.to_string() }), reduced.to_string())
        }
        WordVerb::Equiv { left, right } => {
            let l = parse_word(left)?;
            let r = parse_word(right)?;
            if l.equivalent(&r) {
                ok(json!({ "equivalent": true }), "equivalent")
            } else {
                refuted(
                    json!({ "equivalent": false, "left_reduced": l.free_reduce().to_string(),
                            "right_reduced": r.free_reduce().to_string() }),
                    "not equivalent",
                )
            }
        }
        WordVerb::Project { gens, word } => {
            let w = parse_word(input(item, word)?)?;
            let projected = w.project(&parse_gens(gens)?);
            ok(json!({ "projected": projected.to_string() }), projected.to_string())
        }
    }
}

fn run_expr(verb: &ExprVerb, item: Option<&str>) -> Result<Outcome, String> {
    match verb {
        ExprVerb::Project { gens, expr } => {
            let e = WordExpression::parse(input(item, expr)?).map_err(|x| x.to_string())?;
            let projected = e.project(&parse_gens(gens)?).map_err(|x| x.to_string())?;
            ok(json!({ "projected": projected.to_string() }), projected.to_string())
        }
        ExprVerb::EquivUpto { n, left, right } => {
            let l = WordExpression::parse(left).map_err(|x| x.to_string())?;
            let r = WordExpression::parse(right).map_err(|x| x.to_string())?;
            if l.equivalent_upto(&r, *n).map_err(|x| x.to_string())? {
                ok(json!({ "equivalent_upto": *n }), format!("equivalent up to {n} generators"))
            } else {
                refuted(json!({ "equivalent_upto": Value::Null }), "not equivalent")
            }
        }
    }
}

fn run_remark(verb: &RemarkVerb) -> Result<Outcome, String> {
    match verb {
        RemarkVerb::Interval { entries } => {
            let s = SeqIndex::new(entries.clone()).map_err(|e| e.to_string())?;
            let (a, b) = remark_interval(&s);
            let (a, b) = (format_rational(&a), format_rational(&b));
            ok(json!({ "a": a, "b": b }), format!("a={a} b={b}"))
        }
        RemarkVerb::Word { depth } => {
            let expr = build_remark_expression(*depth).map_err(|e| e.to_string())?;
            let gens: BTreeSet<u32> = (1..=*depth + 1).collect();
            let word = expr.project(&gens).map_err(|e| e.to_string())?;
            ok(json!({ "word": word.to_string(), "letters": word.len() }), word.to_string())
        }
    }
}

fn run_pairing(verb: &PairingVerb, item: Option<&str>) -> Result<Outcome, String> {
    match verb {
        PairingVerb::Find { word } => {
            let w = parse_word(input(item, word)?)?;
            match find_complete_pairing(&w) {
                Some(gamma) => {
                    ok(json!({ "pairing": gamma.to_string() }), gamma.to_string())
                }
                None => refuted(
                    json!({ "pairing": Value::Null, "reduced": w.free_reduce().to_string() }),
                    format!("no complete pairing; reduced word {}", w.free_reduce()),
                ),
            }
        }
        PairingVerb::Check { word, pairing } => {
            let w = parse_word(word)?;
            let gamma = NoncrossingPairing::parse(pairing).map_err(|e| e.to_string())?;
            let report = validate_pairing(&gamma, &w).map_err(|e| e.to_string())?;
            if report.is_ok() {
                ok(json!({ "valid": true, "complete": gamma.is_complete(&w) }), "valid")
            } else {
                refuted(json!({ "valid": false, "report": report.to_string() }), format!("invalid: {report}"))
            }
        }
        PairingVerb::Maximal { word } => {
            let w = parse_word(input(item, word)?)?;
            let gamma = maximal_pairing(&w);
            ok(json!({ "pairing": gamma.to_string() }), gamma.to_string())
        }
        PairingVerb::Residual { word } => {
            let w = parse_word(input(item, word)?)?;
            let residual = residual_word(&w, &maximal_pairing(&w)).map_err(|e| e.to_string())?;
            ok(json!({ "residual": residual.to_string() }), residual.to_string())
        }
        PairingVerb::Enumerate { complete, word } => {
            let w = parse_word(input(item, word)?)?;
            let all = enumerate_pairings(&w, *complete).map_err(|e| e.to_string())?;
            let rendered: Vec<String> = all.iter().map(|g| g.to_string()).collect();
            let payload = json!({ "count": all.len(), "pairings": rendered });
            if *complete && all.is_empty() && !w.is_empty() {
                refuted(payload, "no complete pairing")
            } else {
                ok(payload, format!("{} pairings", all.len()))
            }
        }
    }
}

fn run_space(verb: &SpaceVerb) -> Result<Outcome, String> {
    match verb {
        SpaceVerb::Dist { model, p, q } => {
            let m = resolve_model(model)?;
            let p = EPoint::parse(p, &m).map_err(|e| e.to_string())?;
            let q = EPoint::parse(q, &m).map_err(|e| e.to_string())?;
            let d = distance(&p, &q, &m).map_err(|e| e.to_string())?;
            ok(json!({ "distance": d }), format!("{d}"))
        }
        SpaceVerb::Dense { model, n } => {
            let m = resolve_model(model)?;
            let point = m.dense_point(*n).map_err(|e| e.to_string())?;
            ok(json!({ "point": point.to_string() }), point.to_string())
        }
    }
}

fn run_path(verb: &PathVerb) -> Result<Outcome, String> {
    match verb {
        PathVerb::Word { file } => {
            let f = read_path_file(file)?;
            let w = word_of_path(&f);
            ok(json!({ "word": w.to_string() }), w.to_string())
        }
        PathVerb::Null { model, file } => {
            let m = resolve_model(model)?;
            let f = read_path_file(file)?;
            match is_null_loop(&f, &m).map_err(|e| e.to_string())? {
                LoopAnswer::Null { certificate } => ok(
                    json!({ "null": true, "certificate": certificate.to_string() }),
                    format!("null-homotopic; certificate {certificate}"),
                ),
                LoopAnswer::NotNull { reduced } => refuted(
                    json!({ "null": false, "reduced": reduced.to_string() }),
                    format!("not null-homotopic; reduced word {reduced}"),
                ),
            }
        }
        PathVerb::Reduce { model, file } => {
            let m = resolve_model(model)?;
            let f = read_path_file(file)?;
            let g = reduce_path(&f, &m).map_err(|e| e.to_string())?;
            ok(json!({ "path": g.to_string(), "word": word_of_path(&g).to_string() }), g.to_string())
        }
        PathVerb::Gbounds { pairing, file } => {
            let f = read_path_file(file)?;
            let gamma = match pairing {
                Some(text) => NoncrossingPairing::parse(text).map_err(|e| e.to_string())?,
                None => find_complete_pairing(&word_of_path(&f))
                    .ok_or("path word has no complete pairing; pass --pairing")?,
            };
            let intervals = gamma_bound_intervals(&f, &gamma).map_err(|e| e.to_string())?;
            let rendered: Vec<Value> = intervals
                .iter()
                .map(|iv| {
                    json!({
                        "span": [format_rational(&iv.span.0), format_rational(&iv.span.1)],
                        "pair": [iv.pair.0, iv.pair.1],
                    })
                })
                .collect();
            let text = intervals
                .iter()
                .map(|iv| {
                    format!(
                        "[{}, {}] pair ({},{})",
                        format_rational(&iv.span.0),
                        format_rational(&iv.span.1),
                        iv.pair.0,
                        iv.pair.1
                    )
                })
                .collect::<Vec<_>>()
                .join("; ");
            ok(json!({ "intervals": rendered }), text)
        }
    }
}

fn run_homotopy(verb: &HomotopyVerb, format: Format) -> Result<Outcome, String> {
    match verb {
        HomotopyVerb::Build { delta, model, file } => {
            let m = resolve_model(model)?;
            let f = read_path_file(file)?;
            let delta = parse_rational(delta).ok_or(format!("bad rational `{delta}`"))?;
            let gamma = find_complete_pairing(&word_of_path(&f))
                .ok_or("loop word is not trivial; no decomposition exists")?;
            let tree = build_decomposition(&f, &gamma, &delta, &m).map_err(|e| e.to_string())?;
            let rendered = match format {
                Format::Json => tree_to_json(&tree).map_err(|e| e.to_string())?,
                Format::Text => tree.to_string(),
            };
            ok(
                json!({ "tree": serde_json::from_str::<Value>(
                    &tree_to_json(&tree).map_err(|e| e.to_string())?
                ).unwrap() }),
                rendered,
            )
        }
        HomotopyVerb::Verify { tree, delta, model, file } => {
            let m = resolve_model(model)?;
            let f = read_path_file(file)?;
            let delta = parse_rational(delta).ok_or(format!("bad rational `{delta}`"))?;
            let text =
                std::fs::read_to_string(tree).map_err(|e| format!("{}: {e}", tree.display()))?;
            let t = tree_from_json(&text).map_err(|e| e.to_string())?;
            let gamma = find_complete_pairing(&word_of_path(&f))
                .ok_or("loop word is not trivial")?;
            let report = verify_decomposition(&t, &f, &gamma, &delta, &m).map_err(|e| e.to_string())?;
            if report.is_clean() {
                ok(json!({ "clean": true }), "all clauses pass")
            } else {
                refuted(
                    json!({ "clean": false, "failures": report.failures }),
                    report.to_string(),
                )
            }
        }
    }
}

/// The effective inline input: the batch line when batching, otherwise the
/// positional argument.
fn input<'a>(item: Option<&'a str>, arg: &'a Option<String>) -> Result<&'a str, String> {
    match (item, arg) {
        (Some(line), _) => Ok(line),
        (None, Some(text)) => Ok(text),
        (None, None) => Err("missing input (pass it inline or via --batch)".to_owned()),
    }
}

fn supports_batch(command: &Command) -> bool {
    matches!(
        command,
        Command::Word { verb: WordVerb::Reduce { .. } | WordVerb::Project { .. } }
            | Command::Expr { verb: ExprVerb::Project { .. } }
            | Command::Pairing {
                verb: PairingVerb::Find { .. }
                    | PairingVerb::Maximal { .. }
                    | PairingVerb::Residual { .. }
                    | PairingVerb::Enumerate { .. }
            }
    )
}

fn run_item(cli: &Cli, item: Option<&str>) -> Result<Outcome, String> {
    match &cli.command {
        Command::Word { verb } => run_word(verb, item),
        Command::Expr { verb } => run_expr(verb, item),
        Command::Remark { verb } => run_remark(verb),
        Command::Pairing { verb } => run_pairing(verb, item),
        Command::Space { verb } => run_space(verb),
        Command::Path { verb } => run_path(verb),
        Command::Homotopy { verb } => run_homotopy(verb, cli.format),
    }
}

fn main() {
    let cli = Cli::parse();
    let items: Vec<Option<String>> = match &cli.batch {
        Some(file) => {
            if !supports_batch(&cli.command) {
                eprintln!("error: this subcommand does not take --batch input");
                std::process::exit(2);
            }
            match std::fs::read_to_string(file) {
                Ok(text) => text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(|l| Some(l.to_owned()))
                    .collect(),
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    std::process::exit(2);
                }
            }
        }
        None => vec![None],
    };

    let mut worst = Status::Ok;
    for item in &items {
        let start = Instant::now();
        let (status, payload, text) = match run_item(&cli, item.as_deref()) {
            Ok(outcome) => outcome,
            Err(message) => (Status::Error, json!({ "message": message.clone() }), format!("error: {message}")),
        };
        let elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
        match cli.format {
            Format::Json => {
                let result = CommandResult { status, payload, elapsed_ms };
                println!("{}", serde_json::to_string(&result).unwrap());
            }
            Format::Text => println!("{text}"),
        }
        worst = match (worst, status) {
            (Status::Error, _) | (_, Status::Error) => Status::Error,
            (Status::Refuted, _) | (_, Status::Refuted) => Status::Refuted,
            _ => Status::Ok,
        };
    }
    std::process::exit(match worst {
        Status::Ok => 0,
        Status::Refuted => 1,
        Status::Error => 2,
    });
}
