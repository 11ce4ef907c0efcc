//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or parse error, 2 the mesh fails the
//! command's requirements (validation failure, unsupported topology),
//! 3 the two Betti algorithms disagree.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cutgraph::{self, CutGraph};
use crate::generators::{generate, GeneratorSpec};
use crate::io::{parse_obj, parse_off, seam_polylines, write_obj_polylines};
use crate::mesh::{ElementSet, Mesh};
use crate::report::ReportDocument;
use crate::topology::{self, betti_incremental, make_filtration};
use crate::validation::{self, ValidationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_REJECTED: i32 = 2;
pub const EXIT_DISAGREE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "meshtopo", version, about = "Polygon mesh topology toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full topology report for one or more meshes.
    Info {
        files: Vec<PathBuf>,
        /// Generated mesh, `name` or `name:arg,arg`. May be repeated.
        #[arg(long = "gen", value_name = "SPEC")]
        generate: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Manifold and orientability checks. Exits 2 if either fails.
    Validate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// Betti numbers.
    Betti {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Method::ClosedForm)]
        method: Method,
        /// Seed of the first random filtration.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random filtrations to try.
        #[arg(long, default_value_t = 1)]
        trials: u64,
    },
    /// Cut graph loops of every component.
    Cutgraph {
        #[command(flatten)]
        input: Input,
        /// Root vertex; its component uses it, the others their lowest vertex.
        #[arg(long)]
        root: Option<usize>,
        /// Write the mesh with the cut graph as line elements.
        #[arg(long, value_name = "OUT")]
        obj: Option<PathBuf>,
    },
    /// Cut the mesh open along its cut graph.
    Cut {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        root: Option<usize>,
        #[arg(long, value_name = "OUT")]
        obj: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Input {
    /// OBJ or OFF file.
    #[arg(required_unless_present = "generate", conflicts_with = "generate")]
    file: Option<PathBuf>,
    #[arg(long = "gen", value_name = "SPEC")]
    generate: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    ClosedForm,
    Incremental,
}

/// A failure that ends the command with the given exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn io(message: impl ToString) -> Self {
        Failure {
            code: EXIT_IO,
            message: message.to_string(),
        }
    }

    fn rejected(message: impl ToString) -> Self {
        Failure {
            code: EXIT_REJECTED,
            message: message.to_string(),
        }
    }
}

/// Runs the CLI with `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_IO
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let mut out = String::new();
    let result = match cli.command {
        Command::Info {
            files,
            generate,
            json,
        } => info(&files, &generate, json, &mut out),
        Command::Validate { input, json } => validate(&input, json, &mut out),
        Command::Betti {
            input,
            method,
            seed,
            trials,
        } => betti(&input, method, seed, trials, &mut out),
        Command::Cutgraph { input, root, obj } => cut_graph(&input, root, obj.as_deref(), &mut out),
        Command::Cut { input, root, obj } => cut(&input, root, &obj, &mut out),
    };
    let _ = stdout.write_all(out.as_bytes());
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(stderr, "meshtopo: {}", failure.message);
            failure.code
        }
    }
}

fn load_file(path: &Path) -> Result<Mesh, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let is_off = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => ext.eq_ignore_ascii_case("off"),
        None => bytes.trim_ascii_start().starts_with(b"OFF"),
    };
    let parsed = if is_off {
        parse_off(&bytes)
    } else {
        parse_obj(&bytes)
    };
    parsed.map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn load_generated(spec: &str) -> Result<Mesh, Failure> {
    let spec: GeneratorSpec = spec.parse().map_err(Failure::io)?;
    generate(&spec).map_err(Failure::io)
}

fn load(input: &Input) -> Result<(String, Mesh), Failure> {
    match (&input.file, &input.generate) {
        (_, Some(spec)) => Ok((format!("gen:{spec}"), load_generated(spec)?)),
        (Some(path), None) => Ok((path.display().to_string(), load_file(path)?)),
        (None, None) => Err(Failure::io("no input given")),
    }
}

fn info(files: &[PathBuf], gens: &[String], json: bool, out: &mut String) -> Result<i32, Failure> {
    enum Source<'a> {
        File(&'a Path),
        Gen(&'a str),
    }
    let sources: Vec<Source> = files
        .iter()
        .map(|f| Source::File(f))
        .chain(gens.iter().map(|g| Source::Gen(g)))
        .collect();
    if sources.is_empty() {
        return Err(Failure::io("info needs at least one file or --gen"));
    }

    // one worker per input; results are collected in input order
    let results: Vec<Result<ReportDocument, Failure>> = std::thread::scope(|scope| {
        let workers: Vec<_> = sources
            .iter()
            .map(|source| {
                scope.spawn(move || {
                    let (name, mesh) = match source {
                        Source::File(p) => (p.display().to_string(), load_file(p)?),
                        Source::Gen(g) => (format!("gen:{g}"), load_generated(g)?),
                    };
                    Ok(ReportDocument::build(&name, &mesh))
                })
            })
            .collect();
        workers
            .into_iter()
            .map(|w| w.join().expect("report worker panicked"))
            .collect()
    });
    let docs = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    if json {
        if let [doc] = docs.as_slice() {
            out.push_str(&doc.to_json());
        } else {
            let value = serde_json::to_value(&docs).expect("reports are serialisable");
            out.push_str(&serde_json::to_string_pretty(&value).expect("value is serialisable"));
            out.push('\n');
        }
    } else {
        for doc in &docs {
            write_info_text(doc, out);
        }
    }
    Ok(EXIT_OK)
}

fn optional<T: ToString>(value: Option<T>) -> String {
    value.map_or_else(|| "undefined".to_string(), |v| v.to_string())
}

fn write_info_text(doc: &ReportDocument, out: &mut String) {
    let p = &doc.partition;
    let _ = writeln!(out, "{}", doc.input);
    let _ = writeln!(
        out,
        "  V E F: {} {} {}",
        doc.counts.V, doc.counts.E, doc.counts.F
    );
    let _ = writeln!(out, "  components: {}", doc.components);
    let _ = writeln!(out, "  boundary cycles: {}", optional(doc.boundary_cycles));
    let _ = writeln!(out, "  euler characteristic: {}", doc.euler_characteristic);
    let _ = writeln!(out, "  genus: {}", optional(doc.genus));
    let _ = writeln!(
        out,
        "  watertight: {}  orientable: {}  manifold: {}",
        doc.watertight, doc.orientable, doc.manifold
    );
    let _ = writeln!(
        out,
        "  VN VC EN EC FN FC: {} {} {} {} {} {}",
        p.v_n, p.v_c, p.e_n, p.e_c, p.f_n, p.f_c
    );
    let _ = writeln!(
        out,
        "  betti: {} {} {}",
        doc.betti[0], doc.betti[1], doc.betti[2]
    );
    if let Some(c) = &doc.cutgraph {
        let _ = writeln!(
            out,
            "  cut graph: {} loops, {} edges, root {}",
            c.loops, c.B_size, c.root
        );
    }
}

fn check_line(out: &mut String, name: &str, passed: bool, what: &str, offenders: &[usize]) {
    if passed {
        let _ = writeln!(out, "{name}: ok");
    } else {
        let list: Vec<String> = offenders.iter().map(|o| o.to_string()).collect();
        let _ = writeln!(out, "{name}: FAIL ({what} {})", list.join(" "));
    }
}

fn write_validation_text(name: &str, r: &ValidationReport, out: &mut String) {
    let _ = writeln!(out, "{name}");
    check_line(
        out,
        "edge manifold",
        r.edge_manifold.passed,
        "edges",
        &r.edge_manifold.offenders,
    );
    check_line(
        out,
        "vertex links",
        r.vertex_links_connected.passed,
        "vertices",
        &r.vertex_links_connected.offenders,
    );
    check_line(
        out,
        "simple faces",
        r.faces_simple.passed,
        "faces",
        &r.faces_simple.offenders,
    );
    let witness: Vec<usize> = r.orientation_witness.into_iter().collect();
    check_line(
        out,
        "orientable",
        r.orientable,
        "conflict at edge",
        &witness,
    );
    let _ = writeln!(
        out,
        "watertight: {}",
        if r.watertight { "yes" } else { "no" }
    );
    for b in &r.boundary_bowtie_vertices {
        let _ = writeln!(
            out,
            "bow-tie vertex {}: {} boundary edges, {}",
            b.vertex,
            b.boundary_edges,
            if b.acceptable {
                "acceptable"
            } else {
                "not acceptable"
            }
        );
    }
    if !r.isolated_vertices.is_empty() {
        let list: Vec<String> = r.isolated_vertices.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "isolated vertices: {}", list.join(" "));
    }
}

fn validate(input: &Input, json: bool, out: &mut String) -> Result<i32, Failure> {
    let (name, mesh) = load(input)?;
    let report = validation::validate(&mesh);
    if json {
        let value = serde_json::to_value(&report).expect("report is serialisable");
        out.push_str(&serde_json::to_string_pretty(&value).expect("value is serialisable"));
        out.push('\n');
    } else {
        write_validation_text(&name, &report, out);
    }
    Ok(if report.is_manifold() && report.orientable {
        EXIT_OK
    } else {
        EXIT_REJECTED
    })
}

fn betti(
    input: &Input,
    method: Method,
    seed: u64,
    trials: u64,
    out: &mut String,
) -> Result<i32, Failure> {
    let (_, mesh) = load(input)?;
    let closed = topology::betti_closed_form(&mesh);
    if method == Method::ClosedForm {
        let _ = writeln!(out, "{closed}");
        return Ok(EXIT_OK);
    }
    let trials = trials.max(1);
    let mut agree = 0;
    let mut seen = Vec::new();
    for k in 0..trials {
        let filtration = make_filtration(&mesh, seed.wrapping_add(k));
        let b = betti_incremental(&mesh, &filtration).map_err(Failure::rejected)?;
        if b == closed {
            agree += 1;
        }
        if !seen.contains(&b) {
            seen.push(b);
        }
    }
    for b in &seen {
        let _ = writeln!(out, "{b}");
    }
    let _ = writeln!(out, "agree: {agree}/{trials}");
    Ok(if agree == trials {
        EXIT_OK
    } else {
        EXIT_DISAGREE
    })
}

/// One cut graph per component. The component holding `root` is rooted
/// there, every other component at its lowest vertex.
fn cut_graphs(mesh: &Mesh, root: Option<usize>) -> Result<Vec<CutGraph>, Failure> {
    let comps = topology::components(mesh);
    if let Some(r) = root {
        if r >= mesh.vertex_count() {
            return Err(Failure::rejected(format!(
                "root {r} out of range ({} vertices)",
                mesh.vertex_count()
            )));
        }
    }
    let mut graphs = Vec::with_capacity(comps.count);
    for c in 0..comps.count {
        let r = match root {
            Some(r) if comps.labels[r] == c => r,
            _ => comps
                .vertices_of(c)
                .next()
                .expect("components are non-empty"),
        };
        if mesh.vertex_edges(r).is_empty() {
            return Err(Failure::rejected(format!("vertex {r} is isolated")));
        }
        graphs.push(cutgraph::build_cut_graph(mesh, r).map_err(Failure::rejected)?);
    }
    Ok(graphs)
}

fn cut_graph(
    input: &Input,
    root: Option<usize>,
    obj: Option<&Path>,
    out: &mut String,
) -> Result<i32, Failure> {
    let (_, mesh) = load(input)?;
    let graphs = cut_graphs(&mesh, root)?;
    let mut polylines = Vec::new();
    for (c, g) in graphs.iter().enumerate() {
        let lengths: Vec<String> = g.loops.iter().map(|l| l.len().to_string()).collect();
        if graphs.len() > 1 {
            let _ = writeln!(out, "component {c}");
        }
        let _ = writeln!(out, "root: {}", g.root);
        let _ = writeln!(out, "loops: {}", g.loops.len());
        let _ = writeln!(out, "loop lengths: {}", lengths.join(" "));
        let _ = writeln!(out, "B size: {}", g.edges.len());
        if let Some(e) = g.puncture_edge {
            let _ = writeln!(out, "puncture edge: {e}");
        }
        let mut on_loops = ElementSet::edges([]);
        for l in &g.loops {
            let mut line = l.vertices.clone();
            line.push(l.vertices[0]);
            polylines.push(line);
            on_loops.extend(l.edges.iter().copied());
        }
        let stems = ElementSet::edges(g.edges.iter().filter(|&e| !on_loops.contains(e)));
        polylines.extend(seam_polylines(&mesh, &stems));
    }
    if let Some(path) = obj {
        let text = write_obj_polylines(&mesh, &polylines).map_err(Failure::io)?;
        std::fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    }
    Ok(EXIT_OK)
}

fn cut(input: &Input, root: Option<usize>, obj: &Path, out: &mut String) -> Result<i32, Failure> {
    let (_, mesh) = load(input)?;
    let graphs = cut_graphs(&mesh, root)?;
    let mut edges = ElementSet::edges([]);
    for g in &graphs {
        edges.extend(g.cut_edges().iter());
    }
    let opened = cutgraph::cut_mesh(&mesh, &edges).map_err(Failure::rejected)?;
    let text = write_obj_polylines(&opened, &[]).map_err(Failure::io)?;
    std::fs::write(obj, text).map_err(|e| Failure::io(format!("{}: {e}", obj.display())))?;
    let s = topology::components(&opened).count;
    let g = optional(topology::genus(&opened).ok());
    let b = optional(topology::boundary_cycles(&opened).ok().map(|c| c.len()));
    let _ = writeln!(out, "s={s} g={g} b={b}");
    Ok(EXIT_OK)
}
