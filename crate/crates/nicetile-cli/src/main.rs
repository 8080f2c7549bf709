//! `nicetile` command-line front end. Reports go to stdout as JSON,
//! diagnostics to stderr.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use nicetile::coloring::{search_nice_coloring, Coloring, SearchLimits, SearchMode, SearchOptions, SearchStatus, SimpleGraph};
use nicetile::curvature::{
    classify_case, contract_to_triangle, cut_along_trees, cycle_curvature, irregular_inside, proximity_graph,
    random_separating_cycle, separating_cycle_auto, sweep_cycles, tree_pair, Case, SWEEP_LENGTH_BOUND,
};
use nicetile::geometry::{geodesic_sphere, verify_graph_premises, EmbeddedMesh};
use nicetile::isbell::{verify_isbell_extension, verify_isbell_uniqueness};
use nicetile::mesh::{MeshDoc, TriMesh};
use nicetile::tilings::{
    adjacency_graph, builtin_construction, euler_obstruction, tile_coloring, verify_nice_tiling, Construction,
    TilingDoc, TilingOptions,
};

const SCHEMA: &str = "nicetile.report/1";

#[derive(Parser, Debug)]
#[command(name = "nicetile", version, about = "Nice colorings of triangulated surfaces and nice tilings")]
struct Cli {
    /// Write the output to this file (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Numeric tolerance for geometric comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Include wall-clock time in the report (breaks byte-identical output).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification.
    #[command(subcommand)]
    Verify(Verify),
    /// Search for nice colorings of a mesh.
    Color {
        /// Mesh document (JSON rotation system).
        #[arg(long)]
        mesh: PathBuf,
        /// Number of colors.
        #[arg(long)]
        k: usize,
        /// find: one coloring; enumerate: count them; unsat: prove none exist.
        #[arg(long, value_enum, default_value_t = ColorMode::Find)]
        mode: ColorMode,
        /// Solutions to keep in enumerate mode.
        #[arg(long, default_value_t = 10)]
        keep: usize,
        /// Give up as indeterminate after this many search nodes.
        #[arg(long)]
        max_nodes: Option<u64>,
        /// Give up as indeterminate after this many seconds.
        #[arg(long)]
        timeout_secs: Option<u64>,
        /// Fix the closed neighborhood of this vertex before searching.
        #[arg(long)]
        fix_neighborhood: Option<usize>,
    },
    /// Generate meshes and constructions.
    #[command(subcommand)]
    Gen(Gen),
    /// Case analysis of the irregular vertices.
    #[command(subcommand)]
    Case(CaseCmd),
    /// Cut along the case-1 trees and sweep cycles across the annulus.
    Sweep {
        #[arg(long)]
        mesh: PathBuf,
    },
    /// Export a mesh in another format.
    Export {
        #[arg(value_enum)]
        format: ExportFormat,
        #[arg(long)]
        mesh: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Enumerate completions of the central hexagon coloring.
    Isbell1,
    /// Count Isbell extensions of fragment colorings.
    Isbell2,
    /// Curvature identity and contraction on random cycles of a geodesic sphere.
    Curvature {
        #[arg(long)]
        freq: usize,
        #[arg(long, default_value_t = 100)]
        cycles: usize,
    },
    /// Geometric premises of an embedded mesh.
    Premises {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        d1: f64,
        #[arg(long)]
        d2: f64,
    },
    /// Niceness of a tiling document.
    Tiling {
        #[arg(long)]
        doc: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Degree obstruction from the Euler characteristic.
    Euler {
        #[arg(long)]
        mesh: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum Gen {
    /// Geodesic sphere mesh with embedding.
    Sphere {
        #[arg(long)]
        freq: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Built-in construction by name.
    Construction { name: String },
}

#[derive(Subcommand, Debug)]
enum CaseCmd {
    Classify {
        #[arg(long)]
        mesh: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ColorMode {
    Find,
    Enumerate,
    Unsat,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ExportFormat {
    Dot,
    Json,
    Obj,
}

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum Status {
    Pass,
    Fail,
    Sat,
    Unsat,
    Indeterminate,
}

#[derive(Serialize, Debug)]
struct Report {
    schema: &'static str,
    command: String,
    input_digest: String,
    status: Status,
    metrics: Value,
    witnesses: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

/// Usage or input problem; exits with code 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

enum Output {
    Report { status: Status, metrics: Value, witnesses: Value, exit: u8 },
    /// A document that is written verbatim (generated meshes, exports).
    Document(String),
}

struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn new(command: &str) -> Inputs {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        Inputs { hasher }
    }

    fn read(&mut self, path: &Path) -> Result<String, InputError> {
        let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        self.hasher.update([0u8]);
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn digest(self) -> String {
        self.hasher.finalize().iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| {
        InputError(format!("{}: malformed JSON at line {} column {}: {e}", path.display(), e.line(), e.column()))
    })
}

fn load_mesh(inputs: &mut Inputs, path: &Path) -> Result<(MeshDoc, TriMesh), InputError> {
    let text = inputs.read(path)?;
    let doc: MeshDoc = parse_json(path, &text)?;
    let mesh = doc.to_mesh().map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    Ok((doc, mesh))
}

fn report(status: Status, metrics: Value, witnesses: Value, exit: u8) -> Output {
    Output::Report { status, metrics, witnesses, exit }
}

fn pass_fail(ok: bool) -> (Status, u8) {
    if ok {
        (Status::Pass, 0)
    } else {
        (Status::Fail, 1)
    }
}

fn command_line() -> String {
    let mut parts: Vec<String> = std::env::args().skip(1).collect();
    // The output location does not change the report.
    if let Some(i) = parts.iter().position(|a| a == "--out") {
        parts.drain(i..(i + 2).min(parts.len()));
    }
    parts.retain(|a| !a.starts_with("--out="));
    parts.join(" ")
}

fn run(cli: &Cli, inputs: &mut Inputs) -> Result<Output, InputError> {
    match &cli.command {
        Command::Verify(v) => verify(v, cli, inputs),
        Command::Color { mesh, k, mode, keep, max_nodes, timeout_secs, fix_neighborhood } => {
            let (_, m) = load_mesh(inputs, mesh)?;
            let g = SimpleGraph::from_mesh(&m);
            let search_mode = match mode {
                ColorMode::Find => SearchMode::Find,
                ColorMode::Unsat => SearchMode::ProveUnsat,
                ColorMode::Enumerate => SearchMode::Enumerate { fixed: Coloring::empty(m.vertex_count(), *k), keep: *keep },
            };
            let options = SearchOptions {
                limits: SearchLimits { max_nodes: *max_nodes, timeout: timeout_secs.map(Duration::from_secs) },
                fix_neighborhood: *fix_neighborhood,
            };
            let outcome = search_nice_coloring(&g, *k, &search_mode, &options)?;
            let metrics = json!({
                "vertices": m.vertex_count(),
                "k": k,
                "nodes": outcome.stats.nodes,
                "max_depth": outcome.stats.max_depth,
            });
            Ok(match outcome.status {
                SearchStatus::Sat { coloring } => {
                    let exit = if *mode == ColorMode::Unsat { 1 } else { 0 };
                    report(Status::Sat, metrics, json!({ "coloring": coloring.colors }), exit)
                }
                SearchStatus::Unsat => {
                    let exit = if *mode == ColorMode::Find { 1 } else { 0 };
                    report(Status::Unsat, metrics, Value::Null, exit)
                }
                SearchStatus::Enumerated { count, solutions } => {
                    let mut metrics = metrics;
                    metrics["count"] = json!(count);
                    let sols: Vec<_> = solutions.iter().map(|s| s.colors.clone()).collect();
                    let status = if count > 0 { Status::Sat } else { Status::Unsat };
                    report(status, metrics, json!({ "solutions": sols }), 0)
                }
                SearchStatus::Indeterminate { reason } => {
                    let mut metrics = metrics;
                    metrics["reason"] = json!(reason);
                    report(Status::Indeterminate, metrics, Value::Null, 1)
                }
            })
        }
        Command::Gen(Gen::Sphere { freq, radius }) => {
            let em = geodesic_sphere(*freq, *radius)?;
            Ok(Output::Document(to_pretty(&em.to_doc())?))
        }
        Command::Gen(Gen::Construction { name }) => Ok(Output::Document(match builtin_construction(name)? {
            Construction::Tiling(doc) => to_pretty(&doc)?,
            Construction::Points(p) => to_pretty(&p)?,
        })),
        Command::Case(CaseCmd::Classify { mesh }) => {
            let (_, m) = load_mesh(inputs, mesh)?;
            let h = proximity_graph(&m);
            let case = classify_case(&h)?;
            let mut metrics = json!({
                "irregular": h.nodes.len(),
                "total_multiplicity": h.total_multiplicity(),
                "components": h.components.len(),
                "component_multiplicities": h.components.iter().map(|c| c.multiplicity).collect::<Vec<_>>(),
                "case": case,
            });
            let mut witnesses = json!({ "components": h.components });
            let ok = match case {
                Case::Case1a | Case::Case1b => match tree_pair(&m) {
                    Ok(tp) => {
                        metrics["t0_edges"] = json!(tp.t0.as_ref().map(|t| t.edge_count()));
                        metrics["t1_edges"] = json!(tp.t1.edge_count());
                        metrics["t2_edges"] = json!(tp.t2.edge_count());
                        witnesses["trees"] = json!(tp);
                        true
                    }
                    Err(e) => {
                        metrics["error"] = json!(e.to_string());
                        false
                    }
                },
                Case::Case2 => {
                    let (comp, c) = separating_cycle_auto(&m)?;
                    let curv = cycle_curvature(&m, &c)?.total;
                    metrics["separating_cycle_length"] = json!(c.len());
                    metrics["curvature"] = json!(curv);
                    metrics["curvature_mod6"] = json!(curv.rem_euclid(6));
                    metrics["irregular_inside"] = json!(irregular_inside(&m, &c)?);
                    witnesses["component"] = json!(comp);
                    witnesses["cycle"] = json!(c.vertices);
                    true
                }
            };
            let (status, exit) = pass_fail(ok);
            Ok(report(status, metrics, witnesses, exit))
        }
        Command::Sweep { mesh } => {
            let (_, m) = load_mesh(inputs, mesh)?;
            let tp = tree_pair(&m)?;
            let cm = cut_along_trees(&m, &tp)?;
            let trace = sweep_cycles(&cm)?;
            let ok = trace.contracts_hold && trace.within_length_bound();
            let metrics = json!({
                "case": tp.case,
                "t0_edges": tp.t0.as_ref().map(|t| t.edge_count()),
                "t1_edges": tp.t1.edge_count(),
                "t2_edges": tp.t2.edge_count(),
                "cut_euler_characteristic": cm.euler_characteristic(),
                "cycles": trace.cycles.len(),
                "transitions": trace.transitions.len(),
                "max_length": trace.max_length,
                "length_bound": SWEEP_LENGTH_BOUND,
                "contracts_hold": trace.contracts_hold,
                "first_curvature": trace.cycles.first().map(|c| c.curvature),
                "last_curvature": trace.cycles.last().map(|c| c.curvature),
            });
            let lengths: Vec<usize> = trace.cycles.iter().map(|c| c.length).collect();
            let steps: Vec<_> = trace.transitions.iter().map(|t| t.step).collect();
            let (status, exit) = pass_fail(ok);
            Ok(report(status, metrics, json!({ "lengths": lengths, "steps": steps }), exit))
        }
        Command::Export { format, mesh } => {
            let (doc, m) = load_mesh(inputs, mesh)?;
            Ok(Output::Document(match format {
                ExportFormat::Json => {
                    let mut out = m.to_doc();
                    out.embedding = doc.embedding;
                    to_pretty(&out)?
                }
                ExportFormat::Dot => {
                    let mut s = String::from("graph mesh {\n");
                    for (u, v) in m.edges() {
                        let _ = writeln!(s, "  {u} -- {v};");
                    }
                    s.push_str("}\n");
                    s
                }
                ExportFormat::Obj => {
                    let emb = doc.embedding.ok_or_else(|| InputError("obj export needs an embedding".into()))?;
                    let mut s = String::new();
                    for p in &emb.positions {
                        let _ = writeln!(s, "v {} {} {}", p[0], p[1], p[2]);
                    }
                    for f in m.faces() {
                        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
                    }
                    s
                }
            }))
        }
    }
}

fn verify(v: &Verify, cli: &Cli, inputs: &mut Inputs) -> Result<Output, InputError> {
    Ok(match v {
        Verify::Isbell1 => {
            let r = verify_isbell_uniqueness()?;
            let (status, exit) = pass_fail(r.pass);
            report(
                status,
                json!({
                    "solutions": r.completions.len(),
                    "unrestricted_count": r.unrestricted_count,
                    "all_linear": r.all_linear,
                }),
                json!({ "completions": r.completions }),
                exit,
            )
        }
        Verify::Isbell2 => {
            let r = verify_isbell_extension()?;
            let (status, exit) = pass_fail(r.pass);
            report(status, serde_json::to_value(&r)?, Value::Null, exit)
        }
        Verify::Curvature { freq, cycles } => {
            let em = geodesic_sphere(*freq, 1.0)?;
            let m = &em.mesh;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut failures = Vec::new();
            let mut seen = BTreeSet::new();
            for _ in 0..*cycles {
                let target = rand::Rng::gen_range(&mut rng, 1..m.face_count());
                let c = random_separating_cycle(m, &mut rng, target);
                seen.insert(c.vertices.clone());
                let curv = cycle_curvature(m, &c)?.total;
                let inside = irregular_inside(m, &c)?;
                let trace = contract_to_triangle(m, &c)?;
                let final_curv = trace.steps.last().map_or(trace.initial_curvature, |s| s.curvature);
                if curv != 6 - inside || trace.steps.len() + 1 != trace.initial_triangles || final_curv != 6 {
                    failures.push(json!({ "cycle": c.vertices, "curvature": curv, "irregular_inside": inside }));
                }
            }
            let (status, exit) = pass_fail(failures.is_empty());
            report(
                status,
                json!({ "freq": freq, "cycles": cycles, "distinct_cycles": seen.len(), "failures": failures.len() }),
                json!({ "failures": failures }),
                exit,
            )
        }
        Verify::Premises { mesh, d1, d2 } => {
            let text = inputs.read(mesh)?;
            let doc: MeshDoc = parse_json(mesh, &text)?;
            let em = EmbeddedMesh::from_doc(&doc)?;
            let r = verify_graph_premises(&em, *d1, *d2);
            let (status, exit) = pass_fail(r.pass);
            report(status, serde_json::to_value(&r)?, Value::Null, exit)
        }
        Verify::Tiling { doc, samples } => {
            let text = inputs.read(doc)?;
            let d: TilingDoc = parse_json(doc, &text)?;
            let opts = TilingOptions { samples_per_tile: *samples, tolerance: cli.tolerance, ..TilingOptions::default() };
            let r = verify_nice_tiling(&d, &opts)?;
            let adj = adjacency_graph(&d, &opts)?;
            let g = adj.graph(d.tiles.len());
            let nice = nicetile::coloring::is_nice_coloring(&g, &tile_coloring(&d))?.nice;
            let mut metrics = serde_json::to_value(&r)?;
            metrics["adjacency_edges"] = json!(adj.contacts.len());
            metrics["fully_triangulated"] = json!(adj.is_fully_triangulated());
            metrics["euler_characteristic"] = json!(adj.mesh.as_ref().map(|m| m.euler_characteristic()));
            metrics["coloring_nice_on_adjacency"] = json!(nice);
            let (status, exit) = pass_fail(r.pass);
            report(status, metrics, json!({ "contacts": adj.contacts }), exit)
        }
        Verify::Euler { mesh } => {
            let (_, m) = load_mesh(inputs, mesh)?;
            let r = euler_obstruction(&m);
            // An obstruction means nice colorings are impossible on this surface.
            let (status, exit) = pass_fail(!r.obstruction);
            report(status, serde_json::to_value(&r)?, Value::Null, exit)
        }
    })
}

fn to_pretty<T: Serialize>(v: &T) -> Result<String, InputError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Writes via a sibling temporary file and a rename.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}

fn emit(cli: &Cli, text: &str) -> Result<(), InputError> {
    match &cli.out {
        Some(p) => write_atomic(p, text).map_err(|e| InputError(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.tolerance.is_finite() && cli.tolerance >= 0.0) {
        eprintln!("error: --tolerance must be a non-negative number");
        return ExitCode::from(2);
    }
    let command = command_line();
    let mut inputs = Inputs::new(&command);
    let start = Instant::now();
    let out = match run(&cli, &mut inputs) {
        Ok(o) => o,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let elapsed = start.elapsed();
    eprintln!("elapsed: {:.3}s", elapsed.as_secs_f64());
    let (text, exit) = match out {
        Output::Document(s) => (s, 0),
        Output::Report { status, metrics, witnesses, exit } => {
            let r = Report {
                schema: SCHEMA,
                command,
                input_digest: inputs.digest(),
                status,
                metrics,
                witnesses,
                elapsed_ms: cli.timings.then(|| elapsed.as_millis()),
            };
            match to_pretty(&r) {
                Ok(s) => (s, exit),
                Err(InputError(msg)) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(2);
                }
            }
        }
    };
    if let Err(InputError(msg)) = emit(&cli, &text) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    ExitCode::from(exit)
}
