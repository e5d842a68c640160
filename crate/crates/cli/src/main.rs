//! `tangleh`: batch front end for tangle Khovanov homology.
//!
//! Exit status 0 on success, 1 for unusable input (parse or validation
//! errors, bad flags, non-adjacent states), 2 when a computation detects an
//! internal inconsistency.

mod report;

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tangle_kh::codec::{parse_gauss_code, GaussCode, Topology};
use tangle_kh::cube::{local_map_report, CubeError};
use tangle_kh::homology::{
    graded_euler_characteristic, homology, homology_table, legacy_homology, ComplexOptions, HomologyError,
    HomologyOptions,
};
use tangle_kh::linalg::{FieldChoice, LinalgError};
use tangle_kh::moves::{random_add_move, random_tangle, MoveError, MoveKind};
use tangle_kh::resolution::{resolve, ResolutionError, SmoothingState, DEFAULT_MAX_CROSSINGS};
use tangle_kh::{parse_pd_code, CodecError, SignType, TangleDiagram};

#[derive(Parser, Debug)]
#[command(name = "tangleh", version, about = "Khovanov homology of tangle diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bigraded homology table of a PD code.
    Homology(HomologyArgs),
    /// Components of one smoothing state.
    Smooth(SmoothArgs),
    /// Local map along one edge of the cube of resolutions.
    Localmap(LocalmapArgs),
    /// Graded Euler characteristic by state sum.
    Euler(EulerArgs),
    /// Reidemeister invariance campaign on random tangles.
    Fuzz(FuzzArgs),
    /// Parse and validate a PD or Gauss code.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Input {
    /// Read the code from a file.
    #[arg(long)]
    file: Option<String>,
    /// Inline PD code (JSON object, bare array or bracket notation).
    #[arg(long)]
    pd: Option<String>,
    /// Inline Gauss code (validation only).
    #[arg(long)]
    gauss: Option<String>,
}

#[derive(Args, Debug)]
struct DiagramArgs {
    #[command(flatten)]
    input: Input,
    /// Sign type, one `+`/`-` per crossing; overrides the document.
    #[arg(long)]
    signs: Option<String>,
    /// Refuse diagrams with more crossings than this.
    #[arg(long = "max-n", default_value_t = DEFAULT_MAX_CROSSINGS)]
    max_n: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Normalize {
    MinZero,
}

#[derive(Args, Debug)]
struct HomologyArgs {
    #[command(flatten)]
    diagram: DiagramArgs,
    /// Coefficient field: q, gf2 or gfp:P.
    #[arg(long, default_value = "q")]
    field: String,
    #[arg(long)]
    json: bool,
    /// Grade classes by the weighted mean of their representative's degrees.
    #[arg(long)]
    legacy_grading: bool,
    #[arg(long, value_enum)]
    normalize: Option<Normalize>,
    /// Also compare against the state-sum Euler characteristic.
    #[arg(long)]
    euler_check: bool,
}

#[derive(Args, Debug)]
struct SmoothArgs {
    #[command(flatten)]
    diagram: DiagramArgs,
    /// Bit string, leftmost character for the first crossing.
    #[arg(long)]
    state: String,
}

#[derive(Args, Debug)]
struct LocalmapArgs {
    #[command(flatten)]
    diagram: DiagramArgs,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
}

#[derive(Args, Debug)]
struct EulerArgs {
    #[command(flatten)]
    diagram: DiagramArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct FuzzArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest crossing count of the random tangles.
    #[arg(long = "max-n", default_value_t = 6)]
    max_n: usize,
    /// Comma-separated move kinds.
    #[arg(long, default_value = "r1,r2", value_delimiter = ',')]
    moves: Vec<MoveKind>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value = "q")]
    field: String,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    signs: Option<String>,
}

/// Failure classes, mapped to exit statuses 1 and 2.
#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Internal(_) => 2,
        }
    }
}

impl From<CodecError> for Failure {
    fn from(e: CodecError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<ResolutionError> for Failure {
    fn from(e: ResolutionError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<LinalgError> for Failure {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::ImageNotInKernel(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<CubeError> for Failure {
    fn from(e: CubeError) -> Self {
        match e {
            CubeError::NotAdjacent { .. } | CubeError::StateMismatch { .. } => Failure::Input(e.to_string()),
            CubeError::Resolution(r) => r.into(),
            CubeError::UnrecognizedTransition { .. } => Failure::Internal(e.to_string()),
        }
    }
}

impl From<HomologyError> for Failure {
    fn from(e: HomologyError) -> Self {
        match e {
            HomologyError::Resolution(r) => r.into(),
            HomologyError::Cube(c) => c.into(),
            HomologyError::Linalg(l) => l.into(),
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<MoveError> for Failure {
    fn from(e: MoveError) -> Self {
        match e {
            MoveError::Codec(c) => Failure::Internal(c.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Homology(a) => cmd_homology(&a),
        Command::Smooth(a) => cmd_smooth(&a),
        Command::Localmap(a) => cmd_localmap(&a),
        Command::Euler(a) => cmd_euler(&a),
        Command::Fuzz(a) => cmd_fuzz(&a),
        Command::Validate(a) => cmd_validate(&a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (Failure::Input(msg) | Failure::Internal(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}

fn read_source(input: &Input) -> Result<String, Failure> {
    match (&input.file, &input.pd, &input.gauss) {
        (Some(path), _, _) => fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {path}: {e}"))),
        (_, Some(text), _) | (_, _, Some(text)) => Ok(text.clone()),
        _ => Err(Failure::Input("no input given".into())),
    }
}

struct Loaded {
    diagram: TangleDiagram,
    default_signs: bool,
}

fn load_diagram(args: &DiagramArgs) -> Result<Loaded, Failure> {
    if args.input.gauss.is_some() {
        return Err(Failure::Input("Gauss codes can only be validated; homology needs a PD code".into()));
    }
    let parsed = parse_pd_code(&read_source(&args.input)?)?;
    let (diagram, default_signs) = match &args.signs {
        Some(s) => (parsed.diagram.with_signs(SignType::parse(s)?)?, false),
        None => (parsed.diagram, parsed.signs_defaulted),
    };
    if default_signs && diagram.crossing_count() > 0 {
        eprintln!("warning: no sign type given; assuming all crossings are +");
    }
    if diagram.crossing_count() > args.max_n {
        return Err(ResolutionError::TooManyCrossings { n: diagram.crossing_count(), max: args.max_n }.into());
    }
    Ok(Loaded { diagram, default_signs })
}

fn parse_field(text: &str) -> Result<FieldChoice, Failure> {
    Ok(text.parse::<FieldChoice>()?)
}

fn cmd_homology(args: &HomologyArgs) -> Result<String, Failure> {
    let loaded = load_diagram(&args.diagram)?;
    let field = parse_field(&args.field)?;
    let complex_options = ComplexOptions { max_crossings: args.diagram.max_n, check_d_squared: true };
    let options = HomologyOptions { representatives: args.json };
    let mut summary = homology(&loaded.diagram, field, &complex_options, &options)?;
    if matches!(args.normalize, Some(Normalize::MinZero)) {
        summary = summary.normalized_min_zero();
    }
    let mut out = String::new();
    let euler = if args.euler_check {
        let state_sum = graded_euler_characteristic(&loaded.diagram, args.diagram.max_n)?;
        // normalization shifts q uniformly; compare before it
        let raw = homology_table(&loaded.diagram, field)?;
        let from_table = tangle_kh::homology::euler_of_table(&raw);
        if state_sum != from_table {
            return Err(Failure::Internal(format!(
                "Euler characteristic mismatch: homology gives {from_table}, state sum gives {state_sum}"
            )));
        }
        Some(state_sum)
    } else {
        None
    };
    let legacy = if args.legacy_grading {
        let mut classes = legacy_homology(&loaded.diagram, field, &complex_options)?;
        classes.sort_by(|a, b| (a.k, a.q).partial_cmp(&(b.k, b.q)).expect("finite degrees"));
        if matches!(args.normalize, Some(Normalize::MinZero)) {
            let shift = classes.iter().map(|c| c.q).fold(f64::INFINITY, f64::min);
            for c in &mut classes {
                c.q -= shift;
            }
        }
        Some(classes)
    } else {
        None
    };
    if args.json {
        let doc = report::homology_json(&summary, loaded.default_signs, legacy.as_deref(), &loaded.diagram);
        out.push_str(&serde_json::to_string_pretty(&doc).expect("JSON values serialize"));
        out.push('\n');
        return Ok(out);
    }
    match &legacy {
        Some(classes) => {
            for c in classes {
                out.push_str(&format!("Detect a homology class of dimension {} with quantum degree {:.1}.\n", c.k, c.q));
            }
        }
        None => {
            for (k, q) in summary.classes() {
                out.push_str(&format!("Detect a homology class of dimension {k} with quantum degree {q}.\n"));
            }
        }
    }
    if let Some(e) = euler {
        out.push_str(&format!("Euler characteristic check passed: {e}\n"));
    }
    Ok(out)
}

fn cmd_smooth(args: &SmoothArgs) -> Result<String, Failure> {
    let loaded = load_diagram(&args.diagram)?;
    let state = parse_state(&args.state, &loaded.diagram)?;
    Ok(resolve(&loaded.diagram, state)?.render(&loaded.diagram))
}

fn parse_state(text: &str, diagram: &TangleDiagram) -> Result<SmoothingState, Failure> {
    let state = SmoothingState::parse(text)?;
    if state.len() != diagram.crossing_count() {
        return Err(ResolutionError::StateLengthMismatch { expected: diagram.crossing_count(), got: state.len() }.into());
    }
    Ok(state)
}

fn cmd_localmap(args: &LocalmapArgs) -> Result<String, Failure> {
    let loaded = load_diagram(&args.diagram)?;
    let from = parse_state(&args.from, &loaded.diagram)?;
    let to = parse_state(&args.to, &loaded.diagram)?;
    Ok(local_map_report(&loaded.diagram, from, to)?)
}

fn cmd_euler(args: &EulerArgs) -> Result<String, Failure> {
    let loaded = load_diagram(&args.diagram)?;
    let euler = graded_euler_characteristic(&loaded.diagram, args.diagram.max_n)?;
    if args.json {
        let doc = serde_json::json!({ "euler": euler.to_string() });
        return Ok(format!("{doc}\n"));
    }
    Ok(format!("{euler}\n"))
}

fn cmd_fuzz(args: &FuzzArgs) -> Result<String, Failure> {
    let field = parse_field(&args.field)?;
    if args.moves.is_empty() {
        return Err(Failure::Input("--moves is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut out = String::new();
    let mut mismatches = 0;
    for trial in 0..args.trials {
        let n = rng.gen_range(0..=args.max_n);
        let arcs = rng.gen_range(if n == 0 { 1 } else { 0 }..=3);
        let tangle_seed: u64 = rng.gen();
        let diagram = random_tangle(tangle_seed, n, arcs).or_else(|_| random_tangle(tangle_seed, n, 0))?;
        let (moved, site) = random_add_move(&diagram, &mut rng, &args.moves)?;
        let before = homology_table(&diagram, field)?;
        let after = homology_table(&moved, field)?;
        if before != after {
            mismatches += 1;
            out.push_str(&format!(
                "trial {trial}: {:?} on {:?} changed {before:?} into {after:?}\n  before: {}\n  after:  {}\n",
                site.kind,
                site.strands,
                tangle_kh::serialize_pd_code(&diagram),
                tangle_kh::serialize_pd_code(&moved)
            ));
        }
    }
    if mismatches > 0 {
        return Err(Failure::Internal(format!("{out}{mismatches} of {} trials changed the homology table", args.trials)));
    }
    out.push_str(&format!("{} trials, no homology changes (seed {}, max-n {})\n", args.trials, args.seed, args.max_n));
    Ok(out)
}

fn cmd_validate(args: &ValidateArgs) -> Result<String, Failure> {
    let text = read_source(&args.input)?;
    let gauss_requested = args.input.gauss.is_some() || (args.input.file.is_some() && text.contains("\"gauss\""));
    if gauss_requested {
        return Ok(describe_gauss(&parse_gauss_code(&text)?));
    }
    let parsed = parse_pd_code(&text)?;
    let diagram = match &args.signs {
        Some(s) => parsed.diagram.with_signs(SignType::parse(s)?)?,
        None => parsed.diagram,
    };
    let free = diagram.free();
    Ok(format!(
        "valid PD code: {} crossing(s), {} boundary label(s), {} internal label(s), {} free circle(s), {} free arc(s), signs {}{}\n",
        diagram.crossing_count(),
        diagram.boundary_labels().len(),
        diagram.internal_labels().len(),
        free.circles,
        free.arcs,
        if diagram.crossing_count() == 0 { "(none)".to_string() } else { diagram.sign_type().to_string() },
        if parsed.signs_defaulted && args.signs.is_none() && diagram.crossing_count() > 0 { " (defaulted)" } else { "" }
    ))
}

fn describe_gauss(code: &GaussCode) -> String {
    let flags: Vec<&str> = code
        .topologies
        .iter()
        .map(|t| match t {
            Topology::Open => "o",
            Topology::Closed => "c",
        })
        .collect();
    format!(
        "valid Gauss code: {} component(s), {} crossing(s), topology ({})\n",
        code.components.len(),
        code.crossing_count(),
        flags.join(",")
    )
}
