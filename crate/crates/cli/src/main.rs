use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qgraph::conditions::ExtendedReal;
use qgraph::document::{self, Document};
use qgraph::eigenfunction::{find_s_points, genericity, l2_normalize, partition, GraphFunction};
use qgraph::flow::{self, Family};
use qgraph::generate;
use qgraph::graph::{CutLocation, MetricGraph};
use qgraph::robin::{assemble, MarkedGraph};
use qgraph::solver::Solver;
use qgraph::stats;
use qgraph::{Error, ErrorClass};
use serde_json::json;

/// Spectra, eigenfunction s-points, Robin maps and spectral flow on compact
/// quantum graphs.
#[derive(Parser, Debug)]
#[command(name = "qgraph", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues below a bound or the first N, as CSV: n, lambda, k_or_kappa, multiplicity.
    Eigs(EigsArgs),
    /// Spectral curves of the δ_s family on a marked set, as CSV: t, n, lambda.
    Curves(CurvesArgs),
    /// Robin–Neumann gaps with running means, as CSV: n, d_n, running_mean, target.
    Rng(RngArgs),
    /// Running vertex and amplitude averages, as CSV: N, mean_fv2, target_fv2, mean_Ae2, target_Ae2, max_crosscorr.
    Weyl(WeylArgs),
    /// The Robin map on a marked set as a CSV matrix, with an index summary.
    Robinmap(RobinmapArgs),
    /// Spectral flow through a level along the δ_s family, as JSON.
    Sflow(SflowArgs),
    /// s-point counts and s-domain deficiencies, as CSV: n, s, phi_s, nu_s, deficiency, generic.
    Sdomains(SdomainsArgs),
    /// Writes a seeded random graph document.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Graph document (JSON).
    input: PathBuf,
    /// Output file; standard output if absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Marked {
    /// Named point list of the document used as the marked set.
    #[arg(long, default_value = "B")]
    points: String,
    /// Vertex ids of degree one or two added to the marked set, comma separated.
    #[arg(long, value_delimiter = ',')]
    marked_vertices: Vec<u64>,
    /// The δ_s parameter s: a real number or inf.
    #[arg(long, default_value = "inf", allow_hyphen_values = true)]
    s: String,
}

#[derive(Args, Debug)]
struct EigsArgs {
    #[command(flatten)]
    common: Common,
    /// Number of eigenvalues, counted with multiplicity.
    #[arg(long, conflicts_with = "lambda_max")]
    n: Option<usize>,
    /// Upper bound on the eigenvalues.
    #[arg(long)]
    lambda_max: Option<f64>,
}

#[derive(Args, Debug)]
struct CurvesArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    marked: Marked,
    /// Uniform t-grid as start:stop:count.
    #[arg(long, default_value = "-10:10:81", allow_hyphen_values = true)]
    t_grid: String,
    /// Also report the hard endpoint t = ∞.
    #[arg(long)]
    endpoints: bool,
    /// Largest eigenvalue reported.
    #[arg(long)]
    lambda_max: f64,
    /// Refine the grid where a curve moves by more than this between nodes.
    #[arg(long, default_value_t = f64::INFINITY)]
    resolution: f64,
    /// Cap on the number of grid nodes after refinement.
    #[arg(long, default_value_t = 2000)]
    max_nodes: usize,
}

#[derive(Args, Debug)]
struct RngArgs {
    #[command(flatten)]
    common: Common,
    /// Vertex ids carrying δ(σ), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    vertices: Vec<u64>,
    /// Coupling σ.
    #[arg(long, allow_hyphen_values = true)]
    sigma: f64,
    /// Number of gaps.
    #[arg(long, default_value_t = 2000)]
    n: usize,
}

#[derive(Args, Debug)]
struct WeylArgs {
    #[command(flatten)]
    common: Common,
    /// Number of positive eigenfunctions.
    #[arg(long, default_value_t = 2000)]
    n: usize,
    /// Vertex id for the value average.
    #[arg(long, default_value_t = 0)]
    vertex: u64,
    /// Edge id for the amplitude average (forward bond).
    #[arg(long, default_value_t = 0)]
    edge: u64,
    /// Emit every this many rows.
    #[arg(long, default_value_t = 1)]
    every: usize,
}

#[derive(Args, Debug)]
struct RobinmapArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    marked: Marked,
    /// Spectral parameter c.
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    /// JSON file receiving {c, s, mor, pos, nullity}.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SflowArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    marked: Marked,
    /// Level λ.
    #[arg(long, allow_hyphen_values = true)]
    level: f64,
    /// Start of the t-interval; inf means the hard endpoint t = -∞.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    from: String,
    /// End of the t-interval; inf means t = +∞.
    #[arg(long, default_value = "inf", allow_hyphen_values = true)]
    to: String,
    /// Grid cells per continuity region for the tracked count.
    #[arg(long, default_value_t = 4)]
    cells: usize,
}

#[derive(Args, Debug)]
struct SdomainsArgs {
    #[command(flatten)]
    common: Common,
    /// Eigenvalue indices 1..=N.
    #[arg(long)]
    n: usize,
    /// s: a real number or inf.
    #[arg(long, default_value = "inf", allow_hyphen_values = true)]
    s: String,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// star:D, cycle:N, lasso, glasses, tree:N or random:BETA:N.
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output if absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Parse => 2,
                ErrorClass::Incomplete => 3,
                ErrorClass::Precondition => 4,
            })
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Outcome<()> {
    match command {
        Command::Eigs(a) => eigs(a),
        Command::Curves(a) => curves(a),
        Command::Rng(a) => rng(a),
        Command::Weyl(a) => weyl(a),
        Command::Robinmap(a) => robinmap(a),
        Command::Sflow(a) => sflow(a),
        Command::Sdomains(a) => sdomains(a),
        Command::Gen(a) => gen(a),
    }
}

fn float(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn extended(x: ExtendedReal) -> String {
    match x {
        ExtendedReal::Infinity => "inf".into(),
        ExtendedReal::Finite(v) => float(v),
    }
}

fn read(common: &Common) -> Outcome<Document> {
    let text = std::fs::read_to_string(&common.input)
        .map_err(|e| Failure::Io(format!("{}: {e}", common.input.display())))?;
    Ok(document::parse(&text)?)
}

fn write(path: &Option<PathBuf>, text: &str) -> Outcome<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                // a closed reader (`| head`) is not a failure
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Failure::Io(format!("stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn parse_extended(text: &str) -> Outcome<ExtendedReal> {
    Ok(ExtendedReal::parse(text)?)
}

fn marked_set(doc: &Document, m: &Marked) -> Outcome<(MarkedGraph, ExtendedReal)> {
    let mut b: Vec<CutLocation> = m.marked_vertices.iter().map(|&id| CutLocation::Vertex(id)).collect();
    match doc.points.get(&m.points) {
        Some(list) => b.extend(list.iter().map(|p| CutLocation::Point(*p))),
        None if m.marked_vertices.is_empty() => {
            return Err(Error::Parse(format!("document has no point list {:?}", m.points)).into())
        }
        None => {}
    }
    Ok((MarkedGraph::new(&doc.graph, &b)?, parse_extended(&m.s)?))
}

fn vertex_indices(g: &MetricGraph, ids: &[u64]) -> Outcome<Vec<usize>> {
    Ok(ids.iter().map(|&id| g.vertex_index(id)).collect::<qgraph::Result<Vec<_>>>()?)
}

fn eigs(a: EigsArgs) -> Outcome<()> {
    let doc = read(&a.common)?;
    let solver = Solver::new(&doc.graph)?;
    let values = match (a.n, a.lambda_max) {
        (Some(n), _) => solver.lowest_values(n)?,
        (None, Some(hi)) => solver.eigenvalues(solver.lower_bound(), hi)?.0,
        (None, None) => return Err(Error::Parse("give --n or --lambda-max".into()).into()),
    };
    let mut out = String::from("n,lambda,k_or_kappa,multiplicity\n");
    let mut index = 1;
    for (lambda, m) in values {
        let wave = lambda.abs().sqrt();
        writeln!(out, "{index},{},{},{m}", float(lambda), float(wave)).unwrap();
        index += m;
    }
    write(&a.common.output, &out)
}

fn curves(a: CurvesArgs) -> Outcome<()> {
    let doc = read(&a.common)?;
    let (marked, s) = marked_set(&doc, &a.marked)?;
    let parts: Vec<&str> = a.t_grid.split(':').collect();
    let bad = || Failure::Lib(Error::Parse(format!("t-grid must be start:stop:count, got {:?}", a.t_grid)));
    if parts.len() != 3 {
        return Err(bad());
    }
    let t0: f64 = parts[0].parse().map_err(|_| bad())?;
    let t1: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if count < 2 || t1 <= t0 {
        return Err(bad());
    }
    let mut grid: Vec<ExtendedReal> =
        (0..count).map(|i| ExtendedReal::Finite(t0 + (t1 - t0) * i as f64 / (count - 1) as f64)).collect();
    if a.endpoints {
        grid.push(ExtendedReal::Infinity);
    }
    let family = Family::from_marked(marked, s);
    let curves = flow::track_curves(&family, &grid, a.lambda_max, a.resolution, a.max_nodes)?;
    let mut out = String::from("t,n,lambda\n");
    for slice in &curves.slices {
        for (i, lam) in slice.values.iter().enumerate() {
            writeln!(out, "{},{},{}", extended(slice.t), i + 1, float(*lam)).unwrap();
        }
    }
    write(&a.common.output, &out)
}

fn rng(a: RngArgs) -> Outcome<()> {
    let doc = read(&a.common)?;
    let vr = vertex_indices(&doc.graph, &a.vertices)?;
    let d = stats::rng(&doc.graph, &vr, a.sigma, a.n)?;
    let mut out = String::from("n,d_n,running_mean,target\n");
    for (i, (x, m)) in d.values.iter().zip(&d.means).enumerate() {
        writeln!(out, "{},{},{},{}", i + 1, float(*x), float(*m), float(d.target)).unwrap();
    }
    write(&a.common.output, &out)
}

fn weyl(a: WeylArgs) -> Outcome<()> {
    let doc = read(&a.common)?;
    let v = doc.graph.vertex_index(a.vertex)?;
    let e = doc.graph.edge_index(a.edge)?;
    let w = stats::weyl_stats(&doc.graph, a.n)?;
    let every = a.every.max(1);
    let mut out = String::from("N,mean_fv2,target_fv2,mean_Ae2,target_Ae2,max_crosscorr\n");
    for n in (1..=w.len()).filter(|n| n % every == 0 || *n == w.len()) {
        writeln!(
            out,
            "{n},{},{},{},{},{}",
            float(w.vertex_mean(v, n)),
            float(w.vertex_target(v)),
            float(w.forward_mean(e, n)),
            float(w.amplitude_target()),
            float(w.cross[n - 1])
        )
        .unwrap();
    }
    write(&a.common.output, &out)
}

fn robinmap(a: RobinmapArgs) -> Outcome<()> {
    let doc = read(&a.common)?;
    let (marked, s) = marked_set(&doc, &a.marked)?;
    let map = assemble(&marked, s, a.c)?;
    let mut out = String::new();
    for i in 0..map.matrix.nrows() {
        let row: Vec<String> = (0..map.matrix.ncols()).map(|j| float(map.matrix[(i, j)])).collect();
        writeln!(out, "{}", row.join(",")).unwrap();
    }
    write(&a.common.output, &out)?;
    if let Some(path) = &a.sidecar {
        let (mor, pos, nullity) = map.indices();
        let side = json!({"c": float(a.c), "s": extended(s), "mor": mor, "pos": pos, "nullity": nullity});
        write(&Some(path.clone()), &format!("{side}\n"))?;
    }
    Ok(())
}

fn sflow(a: SflowArgs) -> Outcome<()> {
    let doc = read(&a.common)?;
    let (marked, s) = marked_set(&doc, &a.marked)?;
    let family = Family::from_marked(marked, s);
    let (t0, t1) = (parse_extended(&a.from)?, parse_extended(&a.to)?);
    let f = flow::spectral_flow(&family, a.level, t0, t1, a.cells)?;
    let crossings: Vec<_> =
        f.crossings.iter().map(|c| json!({"t": extended(c.t), "n": c.curve, "multiplicity": c.multiplicity})).collect();
    let from = if t0.is_infinite() { "-inf".to_string() } else { extended(t0) };
    let value = json!({
        "level": float(f.level),
        "interval": [from, extended(t1)],
        "flow": f.flow,
        "crossings": crossings,
    });
    write(&a.common.output, &format!("{}\n", serde_json::to_string_pretty(&value).unwrap()))
}

fn sdomains(a: SdomainsArgs) -> Outcome<()> {
    let doc = read(&a.common)?;
    let g = &doc.graph;
    let s = parse_extended(&a.s)?;
    let pairs = Solver::new(g)?.lowest_pairs(a.n)?;
    let mut out = String::from("n,s,phi_s,nu_s,deficiency,generic\n");
    for p in &pairs {
        let generic = genericity(g, p).generic;
        let e = l2_normalize(p, g);
        for copy in 0..p.multiplicity {
            let n = p.index + copy;
            if n > a.n {
                break;
            }
            let mut f = GraphFunction::from_eigenpair(g, &e, copy);
            f.align_phase();
            let counts = find_s_points(g, &f, s).and_then(|set| Ok((set.count(), partition(g, &set, n)?)));
            match counts {
                Ok((phi, part)) => {
                    writeln!(out, "{n},{},{phi},{},{},{generic}", extended(s), part.nu, part.deficiency).unwrap()
                }
                Err(_) => writeln!(out, "{n},{},,,,{generic}", extended(s)).unwrap(),
            }
        }
    }
    write(&a.common.output, &out)
}

fn gen(a: GenArgs) -> Outcome<()> {
    let family = generate::Family::parse(&a.family)?;
    let graph = generate::generate(family, a.seed);
    let doc = Document { graph, points: Default::default() };
    write(&a.output, &document::emit(&doc))
}
