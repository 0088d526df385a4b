//! Command-line front end. Generates string-graph instances, brackets their
//! all-pairs vertex congestion, extracts sparse cuts and balanced separators,
//! runs the statistical bound checks, and sweeps size/seed lattices into CSV.
//!
//! Exit codes: 0 success, 1 input error (bad flags, unreadable or invalid
//! files), 2 solver failure (the congestion bracket did not converge).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use seplab::geometry::{self, StringRepresentation};
use seplab::graph::{validate_separator, Graph};
use seplab::separator::{self, InstanceFamily};
use seplab::{congestion, cutfinder, drawing};

#[derive(Parser)]
#[command(
    name = "seplab",
    version,
    about = "Balanced vertex separators in string graphs via congestion duality"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Segments,
    Grid,
}

impl From<Family> for InstanceFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Segments => InstanceFamily::Segments,
            Family::Grid => InstanceFamily::Grid,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance: graph JSON plus curve representation JSON.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        /// Segment count (family = segments).
        #[arg(long)]
        n: Option<usize>,
        /// Half-size k, producing K_{k,k} (family = grid).
        #[arg(long)]
        k: Option<usize>,
        /// Endpoint coordinate range for random segments.
        #[arg(long, default_value_t = separator::SUITE_COORD_RANGE)]
        coord_range: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Graph output path.
        #[arg(long)]
        out: PathBuf,
        /// Representation output path [default: <out without .json>.rep.json].
        #[arg(long)]
        rep_out: Option<PathBuf>,
    },
    /// Bracket the all-pairs vertex congestion of a graph.
    Vcong {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Find one sparse vertex cut.
    Cut {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build a balanced vertex separator.
    Separate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the conflict bound and the congestion lower bound on a curve
    /// representation (both checks run on its largest component).
    VerifyLemma1 {
        /// Curve representation; the graph is re-derived from it.
        #[arg(long = "in")]
        input: PathBuf,
        /// Stored graph to cross-check against the derived one.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the separator over a size/seed lattice; emit CSV.
    Experiment {
        #[arg(long, value_enum)]
        family: Family,
        /// Comma-separated sizes (segment counts, or k for grids).
        #[arg(long)]
        sizes: String,
        /// Comma-separated seeds; items may be inclusive ranges `a..b`.
        #[arg(long)]
        seeds: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// CSV output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; only real parse errors
            // are failures.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(raw) = std::env::var("SEPLAB_THREADS") {
        match raw.trim().parse::<usize>() {
            Ok(limit) => seplab::init_threads(limit),
            Err(_) => eprintln!("warning: ignoring unparseable SEPLAB_THREADS={raw:?}"),
        }
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Input problems exit 1; a solver giving up on valid input exits 2.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<seplab::Error>() {
            return if e.is_input_error() { 1 } else { 2 };
        }
    }
    1
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Gen {
            family,
            n,
            k,
            coord_range,
            seed,
            out,
            rep_out,
        } => gen(family, n, k, coord_range, seed, &out, rep_out),
        Cmd::Vcong { input, eps, seed } => vcong(&input, eps, seed),
        Cmd::Cut { input, eps, seed } => cut(&input, eps, seed),
        Cmd::Separate { input, eps, seed } => separate(&input, eps, seed),
        Cmd::VerifyLemma1 {
            input,
            graph,
            eps,
            trials,
            seed,
        } => verify_lemma1(&input, graph.as_deref(), eps, trials, seed),
        Cmd::Experiment {
            family,
            sizes,
            seeds,
            eps,
            out,
        } => experiment(family, &sizes, &seeds, eps, out.as_deref()),
    }
}

fn gen(
    family: Family,
    n: Option<usize>,
    k: Option<usize>,
    coord_range: i64,
    seed: u64,
    out: &Path,
    rep_out: Option<PathBuf>,
) -> Result<()> {
    let (rep, g) = match family {
        Family::Segments => {
            let n = n.context("--family segments needs --n")?;
            if k.is_some() {
                bail!("--k applies to --family grid only");
            }
            geometry::gen_random_segments(n, coord_range, seed)?
        }
        Family::Grid => {
            let k = k.context("--family grid needs --k")?;
            if n.is_some() {
                bail!("--n applies to --family segments only");
            }
            geometry::gen_grid_strings(k)?
        }
    };
    let rep_path = rep_out.unwrap_or_else(|| default_rep_path(out));
    write_json(out, &g)?;
    write_json(&rep_path, &rep)?;
    println!(
        "wrote {} ({} vertices, {} edges) and {}",
        out.display(),
        g.n(),
        g.m(),
        rep_path.display()
    );
    Ok(())
}

fn default_rep_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        out.with_extension("rep.json")
    } else {
        let mut os = out.as_os_str().to_owned();
        os.push(".rep.json");
        PathBuf::from(os)
    }
}

#[derive(Serialize)]
struct VcongOut {
    vcong_lb: f64,
    vcong_ub: f64,
    s: Vec<f64>,
    max_congestion_vertex: u32,
}

fn vcong(input: &Path, eps: f64, seed: u64) -> Result<()> {
    let g = load_graph(input)?;
    let mwu = congestion::vcong_mwu(&g, eps, seed)?;
    let profile = congestion::congestion_of(&g, &mwu.flow)?;
    print_json(&VcongOut {
        vcong_lb: mwu.dual,
        vcong_ub: mwu.primal,
        s: mwu.weighting.s.clone(),
        max_congestion_vertex: profile.argmax_vertex(),
    })
}

#[derive(Serialize)]
struct CutOut {
    #[serde(rename = "A")]
    a: Vec<u32>,
    #[serde(rename = "B")]
    b: Vec<u32>,
    #[serde(rename = "S")]
    s: Vec<u32>,
    sparsity: f64,
}

fn cut(input: &Path, eps: f64, seed: u64) -> Result<()> {
    let g = load_graph(input)?;
    let report = cutfinder::best_sparse_cut(&g, eps, seed)?;
    print_json(&CutOut {
        a: report.partition.a,
        b: report.partition.b,
        s: report.partition.s,
        sparsity: report.sparsity,
    })
}

fn separate(input: &Path, eps: f64, seed: u64) -> Result<()> {
    let g = load_graph(input)?;
    let run = separator::build_separator(&g, eps, seed);
    let report = validate_separator(&g, &run.separator)?;
    if !report.ok() {
        bail!("separator failed validation: {}", report.violations[0]);
    }
    print_json(&run.separator)
}

#[derive(Serialize)]
struct Lemma1Out {
    conflict_bound: drawing::ConflictReport,
    lower_bound: drawing::LowerBoundReport,
    /// Component the checks actually ran on.
    component_n: usize,
}

fn verify_lemma1(
    input: &Path,
    graph: Option<&Path>,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<()> {
    let rep = load_representation(input)?;
    let derived = rep.intersection_graph();
    if let Some(gpath) = graph {
        let stored = load_graph(gpath)?;
        if let Some(msg) = first_mismatch(&derived, &stored) {
            return Err(seplab::Error::input(format!("curve/graph mismatch: {msg}")).into());
        }
    }
    let comps = derived.components();
    let largest = comps
        .first()
        .ok_or_else(|| seplab::Error::input("representation has no curves"))?;
    let (g, _) = derived.induced_subgraph(largest)?;
    let conflict_bound = drawing::verify_conflict_bound(&g, eps, trials, seed)?;
    let lower_bound = drawing::verify_lower_bound(&g, true, eps, seed)?;
    print_json(&Lemma1Out {
        conflict_bound,
        lower_bound,
        component_n: g.n(),
    })
}

fn experiment(family: Family, sizes: &str, seeds: &str, eps: f64, out: Option<&Path>) -> Result<()> {
    let sizes = parse_usize_list(sizes).context("parsing --sizes")?;
    let seeds = parse_seed_list(seeds).context("parsing --seeds")?;
    let rows = separator::run_experiment(family.into(), &sizes, &seeds, eps)?;
    let mut csv = String::from(separator::CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }
    match out {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn load_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_representation(path: &Path) -> Result<StringRepresentation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// First disagreement between the curve-derived graph and a stored one, in
/// lexicographic edge order.
fn first_mismatch(derived: &Graph, stored: &Graph) -> Option<String> {
    if derived.n() != stored.n() {
        return Some(format!(
            "derived graph has {} vertices, stored graph {}",
            derived.n(),
            stored.n()
        ));
    }
    let (de, se) = (derived.edges(), stored.edges());
    let (mut i, mut j) = (0, 0);
    loop {
        return match (de.get(i), se.get(j)) {
            (Some(d), Some(s)) if d == s => {
                i += 1;
                j += 1;
                continue;
            }
            (Some(&(u, v)), None) => Some(format!(
                "curves {u} and {v} intersect but the stored graph has no edge ({u}, {v})"
            )),
            (Some(&(u, v)), Some(s)) if (u, v) < *s => Some(format!(
                "curves {u} and {v} intersect but the stored graph has no edge ({u}, {v})"
            )),
            (_, Some(&(u, v))) => Some(format!(
                "stored edge ({u}, {v}) has no curve intersection"
            )),
            (None, None) => None,
        };
    }
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|part| {
            let part = part.trim();
            part.parse::<usize>()
                .with_context(|| format!("bad size {part:?}"))
        })
        .collect()
}

/// `"3"`, `"1..10"` (inclusive), or any comma-separated mix of the two.
fn parse_seed_list(text: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().with_context(|| format!("bad seed range {part:?}"))?;
            let b: u64 = b.trim().parse().with_context(|| format!("bad seed range {part:?}"))?;
            if a > b {
                bail!("empty seed range {part:?}");
            }
            seeds.extend(a..=b);
        } else {
            seeds.push(part.parse().with_context(|| format!("bad seed {part:?}"))?);
        }
    }
    Ok(seeds)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}
