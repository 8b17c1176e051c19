//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on invalid input or an exceeded bound, 2 when
//! a consistency check or verification fails.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use pillowcase::abelian::AbelianGroup;
use pillowcase::affine::{affine_generators, build_tuple_graph};
use pillowcase::backend::default_backends;
use pillowcase::corpus::{corpus, corpus_surface};
use pillowcase::hodge::{
    finiteness_tables, minimal_square_search, search_definite_nondiscrete, DEFAULT_SQUARE_CAP,
};
use pillowcase::oracle::{verify_named_cocycle, CochainSpec, VerificationReport};
use pillowcase::report::{build_report, parse_turn_list, select_characters, surface_block, Header, Report};
use pillowcase::suite::{fixture_report, verify_surface, SuiteOptions};
use pillowcase::surface::{BranchTuple, SurfaceSpec};
use pillowcase::{Error, Result};

macro_rules! emit {
    ($out:expr, $($arg:tt)*) => {{
        let _ = writeln!($out, $($arg)*);
    }};
}

macro_rules! emit_raw {
    ($out:expr, $text:expr) => {{
        $out.push_str(&$text);
    }};
}

#[derive(Parser)]
#[command(name = "pillowcase", version, about = "Abelian covers of the pillowcase: cohomology, affine actions, Hodge signatures")]
struct Cli {
    /// print JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SurfaceArg {
    /// surface spec file: {"ambient_moduli": [..], "branch_tuple": [[..],[..],[..],[..]]}
    spec: Option<PathBuf>,
    /// built-in surface instead of a spec file
    #[arg(long, conflicts_with = "spec")]
    surface: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Geometric invariants and whether the restriction map splits
    Info(SurfaceArg),
    /// One row per character: dimensions, signature, geometry, discreteness
    Decompose {
        #[command(flatten)]
        surface: SurfaceArg,
        /// character by its turns on g1..g4, e.g. "1/6,1/8,1/10,73/120"
        #[arg(long)]
        character: Option<String>,
        /// computation backend for dimensions and signatures
        #[arg(long, default_value = "exact")]
        backend: String,
    },
    /// Graph of branch tuples and the generating loops
    Graph {
        #[command(flatten)]
        surface: SurfaceArg,
        /// include relabelling edges
        #[arg(long)]
        with_m: bool,
    },
    /// Definite summands with non-discrete action
    Search {
        #[command(flatten)]
        surface: SurfaceArg,
        /// run the minimal search over all surfaces with at most this many squares
        #[arg(long)]
        max_squares: Option<usize>,
    },
    /// Floating-point verification suite
    Verify {
        #[command(flatten)]
        surface: SurfaceArg,
        /// every built-in surface within the oracle bound
        #[arg(long)]
        corpus: bool,
        /// built-in fixture: alpha, alpha-zero, alpha-negated-b, corrupted-pullback
        #[arg(long)]
        fixture: Option<String>,
        /// named cochain file checked for closedness and summand membership
        #[arg(long)]
        cochain: Option<PathBuf>,
        /// random loop words per surface
        #[arg(long, default_value_t = 100)]
        words: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Finiteness tables for definite summands
    Tables,
    /// List the built-in surfaces
    Corpus,
}

fn read_to_string(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_spec(arg: &SurfaceArg) -> Result<SurfaceSpec> {
    match (&arg.spec, &arg.surface) {
        (Some(path), _) => SurfaceSpec::from_json(&read_to_string(path)?),
        (None, Some(name)) => Ok(corpus_surface(name)?.spec),
        (None, None) => Err(Error::InvalidInput("give a spec file or --surface NAME".into())),
    }
}

fn load_surface(arg: &SurfaceArg) -> Result<(SurfaceSpec, AbelianGroup, BranchTuple)> {
    let spec = load_spec(arg)?;
    let (g, t) = spec.resolve()?;
    Ok((spec, g, t))
}

fn has_surface(arg: &SurfaceArg) -> bool {
    arg.spec.is_some() || arg.surface.is_some()
}

fn print_json<T: Serialize>(out: &mut String, value: &T) {
    emit!(out, "{}", serde_json::to_string_pretty(value).expect("serializable output"));
}

fn envelope<T: Serialize>(key: &str, value: T) -> serde_json::Value {
    let mut m = serde_json::Map::new();
    m.insert("header".into(), serde_json::to_value(Header::default()).expect("header"));
    m.insert(key.into(), serde_json::to_value(value).expect("serializable output"));
    serde_json::Value::Object(m)
}

fn group_label(g: &AbelianGroup) -> String {
    if g.is_trivial() {
        "1".into()
    } else {
        g.moduli().iter().map(|m| format!("Z/{m}")).collect::<Vec<_>>().join(" x ")
    }
}

fn cmd_info(out: &mut String, json: bool, arg: &SurfaceArg) -> Result<ExitCode> {
    let (_, g, t) = load_surface(arg)?;
    let report = Report {
        header: Header::default(),
        surface: surface_block(&g, &t)?,
        characters: vec![],
    };
    if json {
        emit!(out, "{}", report.to_json());
        return Ok(ExitCode::SUCCESS);
    }
    let s = &report.surface;
    emit!(out, "group        {} (order {})", group_label(&g), s.order);
    emit!(out, "tuple        {t}");
    emit!(out, "squares      {}", s.squares);
    emit!(out, "genus        {}", s.genus);
    emit!(out, "stratum      {}", s.stratum);
    emit!(out, "translation  {}", s.translation);
    emit!(out, "orders       {:?}", s.branch_orders);
    if s.has_order_one {
        emit!(out, "note         some branch element is trivial (cone angle pi points)");
    }
    emit!(out, "H1(M,Sigma)  dimension {}", s.rel_dimension);
    emit!(out, 
        "restriction  {}",
        if s.rel_split.splits { "splits" } else { "does not split" }
    );
    emit!(out, "witness      {}", serde_json::to_string(&s.rel_split.witness).expect("witness"));
    Ok(ExitCode::SUCCESS)
}

fn pi_multiple(coeff: &str) -> String {
    match coeff {
        "0" => "0".into(),
        "1" => "pi".into(),
        c => format!("{c} pi"),
    }
}

fn cmd_decompose(out: &mut String, json: bool, arg: &SurfaceArg, character: Option<&str>, backend: &str) -> Result<ExitCode> {
    let (spec, g, t) = load_surface(arg)?;
    let backends = default_backends();
    let backend = backends.get(backend)?;
    let selector = match character {
        Some(text) => Some(parse_turn_list(text)?),
        None => spec.character.clone(),
    };
    let chars = select_characters(&g, &t, selector.as_ref())?;
    let report = build_report(&g, &t, &chars, backend)?;
    if json {
        emit!(out, "{}", report.to_json());
        return Ok(ExitCode::SUCCESS);
    }
    emit!(out, "{} {t}: {} squares, genus {}, {}", group_label(&g), report.surface.squares, report.surface.genus, report.surface.stratum);
    emit!(out, "{:<16} {:<28} {:>3} {:>3} {:<6} {:<8} {:<13} {:<22} {:<12} reason", "character", "turns", "dim", "abs", "case", "sig", "geometry", "finiteness", "verdict");
    for row in &report.characters {
        let turns: Vec<String> = row.turns.iter().map(|x| x.to_string()).collect();
        let sig = row.signature.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
        let fin = row.finiteness.as_ref().map(|f| f.to_string()).unwrap_or_else(|| "-".into());
        emit!(out, 
            "{:<16} {:<28} {:>3} {:>3} {:<6} {:<8} {:<13} {:<22} {:<12} {}",
            row.character.to_string(),
            format!("({})", turns.join(",")),
            row.dim,
            row.abs_dim,
            format!("{:?}", row.restriction),
            sig,
            row.geometry.to_string(),
            fin,
            row.discreteness.to_string(),
            row.reason
        );
        if let Some(tri) = &row.triangle {
            let angles: Vec<String> = tri.sorted_angles().iter().map(|a| pi_multiple(&a.to_string())).collect();
            emit!(out, "{:<16} triangle angles {} (sum {})", "", angles.join(", "), pi_multiple(&tri.angle_sum.to_string()));
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct GraphOut {
    base: String,
    with_m: bool,
    vertices: Vec<String>,
    edges: Vec<(String, String, String)>,
    generators: Vec<GeneratorOut>,
}

#[derive(Serialize)]
struct GeneratorOut {
    word: String,
    derivative: [[i64; 2]; 2],
}

fn cmd_graph(out: &mut String, json: bool, arg: &SurfaceArg, with_m: bool) -> Result<ExitCode> {
    let (_, g, t) = load_surface(arg)?;
    let graph = build_tuple_graph(&g, &t, with_m)?;
    let listing = GraphOut {
        base: t.to_string(),
        with_m,
        vertices: graph.vertices().iter().map(|v| v.to_string()).collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| {
                (
                    graph.vertices()[e.source].to_string(),
                    e.mv.label(),
                    graph.vertices()[e.target].to_string(),
                )
            })
            .collect(),
        generators: if with_m {
            vec![]
        } else {
            affine_generators(&graph)
                .iter()
                .map(|w| GeneratorOut {
                    word: w.to_word_string(),
                    derivative: w.derivative().0,
                })
                .collect()
        },
    };
    if json {
        print_json(out, &envelope("graph", &listing));
        return Ok(ExitCode::SUCCESS);
    }
    emit!(out, "vertices {}", listing.vertices.len());
    emit!(out, "edges {}", listing.edges.len());
    for v in &listing.vertices {
        emit!(out, "vertex {v}");
    }
    emit_raw!(out, graph.edge_listing());
    if !with_m {
        emit!(out, "generators {}", listing.generators.len());
        for gen in &listing.generators {
            emit!(out, "{}  derivative {:?}", gen.word, gen.derivative);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_search(out: &mut String, json: bool, arg: &SurfaceArg, max_squares: Option<usize>) -> Result<ExitCode> {
    if let Some(max) = max_squares {
        if has_surface(arg) {
            return Err(Error::InvalidInput("give either --max-squares or a surface, not both".into()));
        }
        let hits = minimal_square_search(max)?;
        if json {
            print_json(out, &json!({
                "header": Header::default(),
                "max_squares": max,
                "cap": DEFAULT_SQUARE_CAP,
                "minimum": hits.first().map(|h| h.squares),
                "hits": hits,
            }));
            return Ok(ExitCode::SUCCESS);
        }
        match hits.first() {
            None => emit!(out, "no hits with at most {max} squares"),
            Some(h) => emit!(out, "minimum {} squares, {} hits", h.squares, hits.len()),
        }
        for h in &hits {
            let turns: Vec<String> = h.hit.turns.iter().map(|x| x.to_string()).collect();
            emit!(out, 
                "{:>3} squares  {} {}  {}  turns ({})  signature {}",
                h.squares,
                group_label(&h.group),
                h.tuple,
                h.hit.character,
                turns.join(","),
                h.hit.signature
            );
        }
        return Ok(ExitCode::SUCCESS);
    }
    let (_, g, t) = load_surface(arg)?;
    let hits = search_definite_nondiscrete(&g, &t)?;
    if json {
        print_json(out, &envelope("hits", &hits));
        return Ok(ExitCode::SUCCESS);
    }
    emit!(out, "{} {t}: {} definite non-discrete summands", group_label(&g), hits.len());
    for h in &hits {
        let turns: Vec<String> = h.turns.iter().map(|x| x.to_string()).collect();
        emit!(out, 
            "{}  turns ({})  signature {}  rotation orders {:?}  tangent outside conjugates: {}",
            h.character,
            turns.join(","),
            h.signature,
            h.rotation_orders,
            h.tangent_outside_conjugates
        );
        emit!(out, "    evidence {}", serde_json::to_string(&h.aff_evidence).expect("evidence"));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    out: &mut String,
    json: bool,
    arg: &SurfaceArg,
    all: bool,
    fixture: Option<&str>,
    cochain: Option<&PathBuf>,
    opts: SuiteOptions,
) -> Result<ExitCode> {
    let mut reports: Vec<VerificationReport> = Vec::new();
    if all {
        for s in corpus().into_iter().filter(|s| s.oracle) {
            let (g, t) = s.resolve()?;
            reports.extend(verify_surface(&g, &t, opts)?);
        }
    }
    if has_surface(arg) {
        let (_, g, t) = load_surface(arg)?;
        reports.extend(verify_surface(&g, &t, opts)?);
    }
    if let Some(name) = fixture {
        reports.push(fixture_report(name)?);
    }
    if let Some(path) = cochain {
        let spec: CochainSpec = serde_json::from_str(&read_to_string(path)?)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        reports.push(verify_named_cocycle(&spec)?);
    }
    if reports.is_empty() {
        return Err(Error::InvalidInput(
            "nothing to verify: give a surface, --corpus, --fixture or --cochain".into(),
        ));
    }
    let pass = reports.iter().all(|r| r.pass);
    if json {
        print_json(out, &json!({ "header": Header::default(), "pass": pass, "reports": reports }));
    } else {
        for r in &reports {
            let res: Vec<String> = r.residuals.iter().map(|(k, v)| format!("{k}={v:.3e}")).collect();
            emit!(out, "{} {:<32} {:<24} {}", if r.pass { "PASS" } else { "FAIL" }, r.check, r.surface, res.join(" "));
            if let Some(d) = &r.detail {
                emit!(out, "     {d}");
            }
        }
        emit!(out, "{}", if pass { "all checks passed" } else { "verification failed" });
    }
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_tables(out: &mut String, json: bool) -> Result<ExitCode> {
    let tables = finiteness_tables();
    if json {
        print_json(out, &envelope("tables", tables));
    } else {
        emit_raw!(out, tables.render());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_corpus(out: &mut String, json: bool) -> Result<ExitCode> {
    let entries: Vec<_> = corpus()
        .into_iter()
        .map(|s| json!({ "name": s.name, "spec": s.spec, "oracle": s.oracle }))
        .collect();
    if json {
        print_json(out, &envelope("corpus", entries));
    } else {
        for s in corpus() {
            emit!(out, "{:<16} {}", s.name, serde_json::to_string(&s.spec).expect("spec"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli, out: &mut String) -> Result<ExitCode> {
    let json = cli.json;
    match &cli.command {
        Command::Info(arg) => cmd_info(out, json, arg),
        Command::Decompose { surface, character, backend } => cmd_decompose(out, json, surface, character.as_deref(), backend),
        Command::Graph { surface, with_m } => cmd_graph(out, json, surface, *with_m),
        Command::Search { surface, max_squares } => cmd_search(out, json, surface, *max_squares),
        Command::Verify { surface, corpus, fixture, cochain, words, seed } => cmd_verify(
            out,
            json,
            surface,
            *corpus,
            fixture.as_deref(),
            cochain.as_ref(),
            SuiteOptions { words: *words, seed: *seed },
        ),
        Command::Tables => cmd_tables(out, json),
        Command::Corpus => cmd_corpus(out, json),
    }
}

fn flush(out: &str) {
    let mut stdout = std::io::stdout().lock();
    // a closed pipe (for example `| head`) is not an error
    let _ = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(cli, &mut out);
    flush(&out);
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_consistency() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
