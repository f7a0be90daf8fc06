use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use polaris::apartments::{is_embedding, verify_theorem, Theorem, Verdict, VerifyRequest};
use polaris::graphs::{build_named_graph, halfcube_split_and_g, pj_graph, NamedGraph};
use polaris::grassmann::GrassmannGraph;
use polaris::io::{
    graph_dot, rows_label, to_json, write_atomic, CertificateFile, GraphFile, Header, SubspaceJson, SubspaceSetFile,
};
use polaris::polar::{FormKind, PolarSpace};
use polaris::search::{classify_found, random_embeddings, Pattern, SearchConfig};
use polaris::workload::{generate, perturb, request_for, Generated};
use polaris::Error;

/// `println!` that stays quiet when stdout has gone away.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "polaris", version, about = "Polar spaces, polar Grassmann graphs and apartment verifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Symplectic,
    Hyperbolic,
    Parabolic,
    Pj,
    Hypercube,
    Halfcube,
}

impl Kind {
    fn form(self) -> Option<FormKind> {
        match self {
            Kind::Symplectic => Some(FormKind::Symplectic),
            Kind::Hyperbolic => Some(FormKind::Hyperbolic),
            Kind::Parabolic => Some(FormKind::Parabolic),
            _ => None,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Export {
    Dot,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GeneratedArg {
    Apartment,
    Parabolic,
    Lframe,
}

impl From<GeneratedArg> for Generated {
    fn from(g: GeneratedArg) -> Self {
        match g {
            GeneratedArg::Apartment => Generated::Apartment,
            GeneratedArg::Parabolic => Generated::Parabolic,
            GeneratedArg::Lframe => Generated::Lframe,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum PatternArg {
    Pj,
    Hypercube,
}

#[derive(Args, Clone, Debug)]
struct Params {
    /// Space or graph family.
    #[arg(long, value_enum, default_value = "symplectic")]
    kind: Kind,
    /// Rank of the polar space, or of the abstract graph.
    #[arg(short = 'n', long = "n")]
    n: Option<usize>,
    /// Prime order of the field.
    #[arg(short = 'p', long = "p", default_value_t = 2)]
    p: u32,
    /// Level: projective dimension of the subspaces.
    #[arg(short = 'k', long = "grassmann", alias = "k")]
    k: Option<usize>,
    /// Second parameter of PJ(l,m); the cube dimension for hypercubes.
    #[arg(short = 'm', long = "m")]
    m: Option<usize>,
    /// First parameter of PJ(l,m).
    #[arg(short = 'l', long = "l")]
    l: Option<usize>,
    /// Seed for perturbations and searches, echoed into every output header.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Search-node cap (per trial for `search`).
    #[arg(long)]
    budget: Option<u64>,
    /// Output file.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

impl Params {
    fn n(&self) -> Result<usize, Error> {
        self.n.ok_or_else(|| Error::InvalidParameter("-n is required".into()))
    }

    fn k(&self) -> Result<usize, Error> {
        self.k.ok_or_else(|| Error::InvalidParameter("-k is required".into()))
    }

    fn space(&self) -> Result<PolarSpace, Error> {
        let kind = self
            .kind
            .form()
            .ok_or_else(|| Error::InvalidParameter(format!("{:?} is not a polar space kind", self.kind)))?;
        PolarSpace::build(kind, self.n()?, self.p)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a Grassmann or abstract graph and export it.
    Build {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "json")]
        export: Export,
    },
    /// List a standard apartment (or parabolic / l-frame set).
    Apartment {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "apartment")]
        generated: GeneratedArg,
        /// Replace one member by a random adjacent non-member.
        #[arg(long)]
        perturb: bool,
    },
    /// Check a theorem's hypotheses on a set and certify its conclusion.
    Verify {
        /// thm4.1 … thm4.5, cor4.1, cor4.3
        theorem: String,
        #[command(flatten)]
        params: Params,
        /// Verify a standard set built from the parameters.
        #[arg(long, value_enum, conflicts_with = "input")]
        generated: Option<GeneratedArg>,
        /// Verify a subspace-set JSON file.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Replace one member by a random adjacent non-member first.
        #[arg(long)]
        perturb: bool,
    },
    /// Seeded random search for induced copies of PJ(l,m) or a hypercube.
    Search {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "pj")]
        pattern: PatternArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Quick internal consistency checks.
    Selftest,
}

enum Failure {
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn write_output(path: &Path, text: &str) -> Result<(), Failure> {
    write_atomic(path, text.as_bytes())?;
    Ok(())
}

fn command_line() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    format!("polaris {}", args.join(" "))
}

fn build(params: &Params, export: Export) -> Outcome {
    let header = Header::new(command_line(), params.seed);
    let ext = match export {
        Export::Dot => "dot",
        Export::Json => "json",
    };
    let n = params.n()?;
    let (stem, labels, values, graph) = if let Some(kind) = params.kind.form() {
        let space = PolarSpace::build(kind, n, params.p)?;
        let k = params.k()?;
        let g = GrassmannGraph::full(&space, k)?;
        let labels = g.vertices.iter().map(|x| rows_label(x)).collect();
        let values = g
            .vertices
            .iter()
            .map(|x| serde_json::to_value(SubspaceJson::from(x.space())))
            .collect::<Result<Vec<_>, _>>()?;
        (format!("{kind}-n{n}-p{}-k{k}", params.p), labels, values, g.graph)
    } else {
        let (named, stem) = match params.kind {
            Kind::Pj => {
                let k = params.k()?;
                (NamedGraph::PolarJohnson { n, k }, format!("pj-n{n}-k{k}"))
            }
            Kind::Hypercube => (NamedGraph::Hypercube(n), format!("hypercube-n{n}")),
            _ => (NamedGraph::HalfCube(n), format!("halfcube-n{n}")),
        };
        let g = build_named_graph(named)?;
        let values = g.labels.iter().map(|s| serde_json::Value::String(s.clone())).collect();
        (stem, g.labels, values, g.graph)
    };
    let path = params.output.clone().unwrap_or_else(|| PathBuf::from(format!("{stem}.{ext}")));
    let text = match export {
        Export::Dot => format!("// {} seed={}\n{}", header.command, header.seed, graph_dot(&stem, &labels, &graph)),
        Export::Json => to_json(&GraphFile::new(header, stem.clone(), values, &graph))?,
    };
    write_output(&path, &text)?;
    say!(
        "wrote {}: {} vertices, {} edges",
        path.display(),
        graph.order(),
        graph.edge_count()
    );
    Ok(0)
}

fn apartment_cmd(params: &Params, generated: GeneratedArg, perturbed: bool) -> Outcome {
    let space = params.space()?;
    let apt = generate(&space, generated.into(), None, params.k, params.m, params.l)?;
    let header = Header::new(command_line(), params.seed);
    say!("# seed {}", params.seed);
    let file = if perturbed {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let (members, i) = perturb(&space, &apt.members, &mut rng)?;
        say!("perturbed member {} ({})", i, apt.labels[i]);
        let mut f = SubspaceSetFile::from_members(header, &space, apt.level, &members);
        f.l = Some(apt.l);
        f.m = Some(apt.m);
        f
    } else {
        SubspaceSetFile::from_apartment(header, &space, &apt)
    };
    say!(
        "{} members of level {} (l = {}, m = {}, base dimension {})",
        file.members.len(),
        apt.level,
        apt.l,
        apt.m,
        apt.base.proj_dim()
    );
    for mj in &file.members {
        let label = mj.label.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        say!("{label:>16}  {}", rows_label(&mj.subspace.to_space()?));
    }
    if let Some(path) = &params.output {
        write_output(path, &to_json(&file)?)?;
        say!("wrote {}", path.display());
    }
    Ok(0)
}

fn verify_cmd(
    theorem: &str,
    params: &Params,
    generated: Option<GeneratedArg>,
    input: Option<&Path>,
    perturbed: bool,
) -> Outcome {
    let thm: Theorem = theorem.parse()?;
    let (space, mut req) = match (generated, input) {
        (Some(g), None) => {
            let space = params.space()?;
            let apt = generate(&space, g.into(), Some(thm), params.k, params.m, params.l)?;
            (space, request_for(thm, &apt))
        }
        (None, Some(path)) => {
            let file: SubspaceSetFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let space = file.space.build()?;
            let members = file.parse_members(&space)?;
            let map = file.labelled_map(&space)?;
            let l = params
                .l
                .or(file.l)
                .or(if thm == Theorem::Thm41 { Some(0) } else { None })
                .ok_or_else(|| Error::InvalidParameter("-l is required for unlabelled input".into()))?;
            let m = params
                .m
                .or(if thm == Theorem::Thm41 { file.l } else { file.m })
                .ok_or_else(|| Error::InvalidParameter("-m is required for unlabelled input".into()))?;
            (space, VerifyRequest { theorem: thm, l, m, members, map })
        }
        _ => return Err(Failure::Usage("exactly one of --generated or --input is required".into())),
    };
    say!("# seed {}", params.seed);
    if perturbed {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let (members, i) = perturb(&space, &req.members, &mut rng)?;
        say!("perturbed member {i}");
        req.members = members;
        req.map = None;
    }
    match verify_theorem(&space, &req)? {
        Verdict::Accept(cert) => {
            let path = params.output.clone().unwrap_or_else(|| PathBuf::from("certificate.json"));
            let file = CertificateFile::new(Header::new(command_line(), params.seed), thm, &space, &cert);
            write_output(&path, &to_json(&file)?)?;
            say!("ACCEPT {thm}");
            say!("N: projective dimension {} [{}]", cert.base.proj_dim(), rows_label(&cert.base));
            say!("frame: {} pairs in a quotient of rank {}", cert.l, cert.quotient_rank);
            say!("certificate: {}", path.display());
            Ok(0)
        }
        Verdict::Reject(r) => {
            say!("REJECT {thm}");
            say!("clause: {}", r.clause);
            say!("detail: {}", r.detail);
            Ok(1)
        }
    }
}

#[derive(Serialize)]
struct Finding {
    trial: usize,
    classification: String,
    members: Vec<SubspaceJson>,
}

#[derive(Serialize)]
struct SearchFile {
    header: Header,
    pattern: Pattern,
    trials: usize,
    truncated: usize,
    nodes: u64,
    findings: Vec<Finding>,
}

fn search_cmd(params: &Params, pattern: PatternArg, trials: usize) -> Outcome {
    let space = params.space()?;
    let k = params.k()?;
    let pattern = match pattern {
        PatternArg::Pj => Pattern::PolarJohnson {
            l: params.l.ok_or_else(|| Error::InvalidParameter("-l is required".into()))?,
            m: params.m.unwrap_or(0),
        },
        PatternArg::Hypercube => Pattern::Hypercube {
            dim: params.m.ok_or_else(|| Error::InvalidParameter("-m (cube dimension) is required".into()))?,
        },
    };
    let target = GrassmannGraph::full(&space, k)?;
    let cfg = SearchConfig {
        trials,
        seed: params.seed,
        node_budget: params.budget.unwrap_or(10_000),
    };
    let out = random_embeddings(&target.graph, &pattern.graph()?, &cfg);
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    let mut findings = Vec::with_capacity(out.found.len());
    for f in &out.found {
        let xs: Vec<_> = f.vertices.iter().map(|&i| target.vertices[i].clone()).collect();
        let class = classify_found(&space, pattern, &xs)?.summary();
        *tally.entry(class.clone()).or_default() += 1;
        findings.push(Finding {
            trial: f.trial,
            classification: class,
            members: xs.iter().map(|x| x.space().into()).collect(),
        });
    }
    say!("# seed {}", params.seed);
    say!(
        "{} trials, {} found, {} truncated, {} search nodes",
        out.trials,
        out.found.len(),
        out.truncated,
        out.nodes
    );
    for (class, count) in &tally {
        say!("{count:>8}  {class}");
    }
    if let Some(path) = &params.output {
        let file = SearchFile {
            header: Header::new(command_line(), params.seed),
            pattern,
            trials: out.trials,
            truncated: out.truncated,
            nodes: out.nodes,
            findings,
        };
        write_output(path, &to_json(&file)?)?;
        say!("wrote {}", path.display());
    }
    Ok(if out.truncated > 0 { 3 } else { 0 })
}

fn selftest() -> Outcome {
    let mut failures = 0;
    let mut check = |name: &str, ok: Result<bool, Error>| {
        let ok = matches!(ok, Ok(true));
        say!("{} {name}", if ok { "ok  " } else { "FAIL" });
        failures += usize::from(!ok);
    };
    let count = |kind, n, k| -> Result<usize, Error> { Ok(PolarSpace::build(kind, n, 2)?.enumerate_singular(k)?.len()) };
    check("W(5,2) has 63 points", count(FormKind::Symplectic, 3, 0).map(|c| c == 63));
    check("W(5,2) has 315 lines", count(FormKind::Symplectic, 3, 1).map(|c| c == 315));
    check("W(5,2) has 135 planes", count(FormKind::Symplectic, 3, 2).map(|c| c == 135));
    check("Q+(5,2) has 35 points", count(FormKind::Hyperbolic, 3, 0).map(|c| c == 35));
    check("Q+(5,2) has 30 planes", count(FormKind::Hyperbolic, 3, 2).map(|c| c == 30));
    check("W(3,2) has 15 points", count(FormKind::Symplectic, 2, 0).map(|c| c == 15));
    check(
        "line apartment of W(5,2) induces PJ(3,1)",
        (|| {
            let s = PolarSpace::build(FormKind::Symplectic, 3, 2)?;
            let apt = polaris::apartments::apartment(&s, &s.standard_frame(), 1)?;
            Ok(apt.len() == 12 && is_embedding(&s, &apt.embedding()))
        })(),
    );
    check(
        "line apartment of W(5,2) passes the PJ(3,1) verifier",
        (|| {
            let s = PolarSpace::build(FormKind::Symplectic, 3, 2)?;
            let apt = polaris::apartments::apartment(&s, &s.standard_frame(), 1)?;
            Ok(verify_theorem(&s, &request_for(Theorem::Thm42, &apt))?.is_accept())
        })(),
    );
    check(
        "half-cube twist is an automorphism of PJ(4,1)",
        (|| {
            let (_, g) = pj_graph(4, 1)?;
            let split = halfcube_split_and_g()?;
            Ok(split
                .g
                .iter()
                .all(|perm| g.edges().iter().all(|&(a, b)| g.has_edge(perm[a], perm[b]))))
        })(),
    );
    Ok(u8::from(failures > 0))
}

fn configure_threads() {
    if let Some(t) = std::env::var("POLARIS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let outcome = match &cli.command {
        Command::Build { params, export } => build(params, *export),
        Command::Apartment {
            params,
            generated,
            perturb,
        } => apartment_cmd(params, *generated, *perturb),
        Command::Verify {
            theorem,
            params,
            generated,
            input,
            perturb,
        } => verify_cmd(theorem, params, *generated, input.as_deref(), *perturb),
        Command::Search {
            params,
            pattern,
            trials,
        } => search_cmd(params, *pattern, *trials),
        Command::Selftest => selftest(),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
