//! Batch front end: each subcommand reads JSON inputs, runs one pipeline
//! of `lieobstruct-core`, and emits a JSON report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use lieobstruct_core::cdga::{
    fixed_subcdga, holonomy, resonance_dim, resonance_trivial_probe, FiniteCdga, GroupAction,
    ResonancePoint,
};
use lieobstruct_core::ce::{
    canonical_filtration, canonical_flatness, check_stability, homology_image_inclusion,
    verify_one_equivalence_in, HirschTower,
};
use lieobstruct_core::fplie::{
    finiteness_scan, lcs_graded_dims, linearize_presentation, LiePresentation,
};
use lieobstruct_core::freelie::{hall_basis_derived, multigraded_dims, DegreeBound};
use lieobstruct_core::ratlin::{fmt_scalar, Scalar, SparseMatrix, SparseVec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}{source}", .path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
    Core {
        path: Option<PathBuf>,
        source: lieobstruct_core::Error,
    },
}

impl CliError {
    /// 2 for usage, I/O and parse errors, 1 for domain errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Core { source, .. } if source.is_parse() => 2,
            CliError::Core { .. } => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Core { source, .. } if source.is_parse() => "parse",
            CliError::Core { .. } => "domain",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind(), "message": self.to_string(), "exit_code": self.exit_code()}})
    }
}

impl From<lieobstruct_core::Error> for CliError {
    fn from(source: lieobstruct_core::Error) -> Self {
        CliError::Core { path: None, source }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "lieobstruct",
    version,
    about = "Exact computations with free Lie algebras, nilpotent quotients and finite cdgas"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include wall-clock timings per phase (makes the report nondeterministic).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hall basis counts of a derived subalgebra of a free Lie algebra.
    Hall {
        #[arg(long)]
        gens: usize,
        /// Derived level: 0 for the whole algebra, 2 for the second derived subalgebra.
        #[arg(long, default_value_t = 0)]
        level: u32,
        #[arg(long)]
        deg: u32,
        /// List the basis words.
        #[arg(long)]
        words: bool,
    },
    /// Graded H2 of a finitely presented Lie algebra with a growth verdict.
    H2scan {
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        deg: u32,
    },
    /// Holonomy Lie algebra of a cdga, optionally with nilpotent quotient dimensions.
    Holonomy {
        input: PathBuf,
        /// Report dim Γ_k/Γ_{k+1} for k < LCS.
        #[arg(long)]
        lcs: Option<u32>,
    },
    /// Resonance at a given cocycle, or a search for a nonzero point of the first resonance variety.
    Resonance {
        input: PathBuf,
        /// Comma-separated coordinates of ω over the basis of A^1, e.g. "1,0,-1/2".
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<String>,
        #[arg(long, default_value_t = 1)]
        deg: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Tower of cochain algebras of the holonomy quotients with the 1-minimal model checks.
    Classify {
        input: PathBuf,
        /// Last stage n checked; the tower is built through n + 1.
        #[arg(long, default_value_t = 4)]
        stage: u32,
    },
    /// Rewrite a presentation with linear and quadratic relators only.
    Linearize {
        input: PathBuf,
        /// Largest relator degree to accept; defaults to the largest present.
        #[arg(long)]
        deg: Option<u32>,
        /// Compare nilpotent quotient dimensions through this class.
        #[arg(long, default_value_t = 6)]
        class: u32,
    },
    /// Fixed sub-cdga under a finite group action.
    Fixed { input: PathBuf, action: PathBuf },
}

struct Timer {
    enabled: bool,
    phases: Map<String, Value>,
    last: Instant,
}

impl Timer {
    fn new(enabled: bool) -> Self {
        Timer {
            enabled,
            phases: Map::new(),
            last: Instant::now(),
        }
    }

    fn lap(&mut self, phase: &str) {
        let now = Instant::now();
        if self.enabled {
            let ms = (now - self.last).as_secs_f64() * 1000.0;
            self.phases
                .insert(phase.to_string(), json!((ms * 1000.0).round() / 1000.0));
        }
        self.last = now;
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn with_path<T>(path: &Path, r: lieobstruct_core::Result<T>) -> Result<T> {
    r.map_err(|source| CliError::Core {
        path: Some(path.to_path_buf()),
        source,
    })
}

fn load_cdga(path: &Path) -> Result<FiniteCdga> {
    with_path(path, FiniteCdga::from_json(&read(path)?))
}

fn load_presentation(path: &Path) -> Result<LiePresentation> {
    with_path(path, LiePresentation::from_json(&read(path)?))
}

fn dims_json(d: &BTreeMap<u32, usize>) -> Value {
    Value::Object(d.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn letter_names(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn render_vec(v: &SparseVec, len: usize) -> Vec<String> {
    v.to_dense(len).iter().map(fmt_scalar).collect()
}

fn matrix_json(m: &SparseMatrix) -> Value {
    json!((0..m.nrows())
        .map(|r| render_vec(m.row(r), m.ncols()))
        .collect::<Vec<_>>())
}

fn cdga_json(a: &FiniteCdga) -> Value {
    let degrees: Map<String, Value> = (1..=a.top_degree())
        .map(|i| (i.to_string(), json!(a.names(i))))
        .collect();
    json!({"degrees": degrees, "betti": (0..=a.top_degree()).map(|i| a.betti(i)).collect::<Vec<_>>()})
}

fn presentation_json(p: &LiePresentation) -> Value {
    p.to_json_value()
}

fn cmd_hall(gens: usize, level: u32, deg: u32, words: bool) -> Result<Value> {
    if gens == 0 || deg == 0 {
        return Err(CliError::Usage(
            "--gens and --deg must be at least 1".into(),
        ));
    }
    let basis = hall_basis_derived(gens, level, deg);
    let mut counts: BTreeMap<u32, usize> = (1..=deg).map(|k| (k, 0)).collect();
    for w in &basis {
        *counts.get_mut(&w.degree()).unwrap() += 1;
    }
    let mut results = json!({"counts_by_degree": dims_json(&counts), "total": basis.len()});
    if gens == 2 {
        let all = multigraded_dims(2, level, &DegreeBound::total(deg));
        let bigraded: Vec<Value> = all
            .iter()
            .map(|(m, d)| json!({"x_degree": m[0], "y_degree": m[1], "dim": d}))
            .collect();
        // The strip of x-degree two needs words of total degree up to deg + 2.
        let strip_bound = DegreeBound {
            total: deg + 2,
            per_letter: Some(vec![2, deg]),
        };
        let strip = multigraded_dims(2, level, &strip_bound);
        let x2: Vec<Value> = (1..=deg)
            .map(|i| json!({"y_degree": i, "dim": strip.get(&vec![2, i]).copied().unwrap_or(0)}))
            .collect();
        results["bigraded"] = json!(bigraded);
        results["x_degree_two"] = json!(x2);
    }
    if words {
        let names = letter_names(gens);
        results["words"] = json!(basis.iter().map(|w| w.render(&names)).collect::<Vec<_>>());
    }
    Ok(results)
}

fn cmd_h2scan(input: &Path, deg: u32, timer: &mut Timer) -> Result<Value> {
    if deg == 0 {
        return Err(CliError::Usage("--deg must be at least 1".into()));
    }
    let p = load_presentation(input)?;
    timer.lap("parse");
    let report = with_path(input, finiteness_scan(&p, deg))?;
    timer.lap("scan");
    Ok(json!({
        "presentation": presentation_json(&p),
        "degree_cap": report.degree_cap,
        "h2": dims_json(&report.h2),
        "ideal": dims_json(&report.ideal),
        "window": [report.window.0, report.window.1],
        "verdict": report.verdict,
        "heuristic": report.heuristic,
    }))
}

fn cmd_holonomy(input: &Path, lcs: Option<u32>, timer: &mut Timer) -> Result<Value> {
    let a = load_cdga(input)?;
    timer.lap("parse");
    let p = with_path(input, holonomy(&a))?;
    timer.lap("holonomy");
    let mut results = json!({
        "generators": p.generators(),
        "relators": p.relator_strings(),
        "convention": "one relator per basis element λ of A[1]^2: sum_i λ(d a_i) x_i + sum_{i<j} λ(a_i a_j) [x_i,x_j]",
    });
    if let Some(n) = lcs {
        if n < 2 {
            return Err(CliError::Usage("--lcs must be at least 2".into()));
        }
        results["lcs_dims"] = dims_json(&with_path(input, lcs_graded_dims(&p, n))?);
        timer.lap("lcs");
    }
    Ok(results)
}

fn parse_omega(src: &str) -> Result<Vec<Scalar>> {
    src.split(',')
        .map(|s| {
            let s = s.trim();
            Scalar::from_str(s)
                .map_err(|_| CliError::Usage(format!("--omega: '{s}' is not a rational number")))
        })
        .collect()
}

fn cmd_resonance(
    input: &Path,
    omega: Option<&str>,
    deg: usize,
    trials: usize,
    seed: u64,
    timer: &mut Timer,
) -> Result<Value> {
    let a = load_cdga(input)?;
    timer.lap("parse");
    let (b1, _) = a.cohomology(1);
    let out = match omega {
        Some(src) => {
            let coords = parse_omega(src)?;
            if coords.len() != a.dim(1) {
                return Err(CliError::Usage(format!(
                    "--omega needs {} coordinates, got {}",
                    a.dim(1),
                    coords.len()
                )));
            }
            let w = with_path(
                input,
                ResonancePoint::from_cochain(&a, SparseVec::from_dense(&coords)),
            )?;
            let dim = with_path(input, resonance_dim(&a, &w, deg))?;
            json!({"omega": coords.iter().map(fmt_scalar).collect::<Vec<_>>(), "degree": deg, "dim": dim, "b1": b1})
        }
        None => {
            let verdict = with_path(input, resonance_trivial_probe(&a, trials, seed))?;
            json!({"probe": verdict, "trials": trials, "seed": seed, "b1": b1})
        }
    };
    timer.lap("resonance");
    Ok(out)
}

fn cmd_classify(input: &Path, stage: u32, timer: &mut Timer) -> Result<Value> {
    if stage < 2 {
        return Err(CliError::Usage(
            "--stage must be at least 2 (stages start at 2)".into(),
        ));
    }
    let a = load_cdga(input)?;
    timer.lap("parse");
    let p = with_path(input, holonomy(&a))?;
    let tower = with_path(input, HirschTower::build(&p, stage + 1))?;
    timer.lap("tower");
    let stages: Vec<Value> = tower
        .stages()
        .iter()
        .map(|s| json!({"stage": s.class_bound, "dim": s.quotient.algebra.dim(), "graded_dims": dims_json(&s.quotient.algebra.graded_dims())}))
        .collect();
    let mut one_eq = Vec::new();
    for n in 2..=stage {
        let r = with_path(input, verify_one_equivalence_in(&a, &tower, n))?;
        one_eq.push(
            json!({"stage": n, "h1_iso": r.h1_iso, "h2_kernel_inclusion": r.h2_kernel_inclusion}),
        );
    }
    timer.lap("one_equivalence");
    let mut stability = Vec::new();
    for n in 2..=stage {
        for m in n + 1..=stage + 1 {
            let s = with_path(input, check_stability(&tower, m, n))?;
            let dual = with_path(input, homology_image_inclusion(&tower, n, m))?;
            stability.push(json!({"n": n, "m": m, "prop_i": s.prop_i, "prop_ii": s.prop_ii, "homology_image_inclusion": dual}));
        }
    }
    timer.lap("stability");
    let filtration = canonical_filtration(&tower);
    let flat = canonical_flatness(&a, &tower);
    let hirsch = tower.hirsch_steps();
    timer.lap("filtration");
    let all_true = one_eq
        .iter()
        .all(|v| v["h1_iso"] == true && v["h2_kernel_inclusion"] == true)
        && stability.iter().all(|v| {
            v["prop_i"] == true && v["prop_ii"] == true && v["homology_image_inclusion"] == true
        })
        && filtration.all_equal()
        && flat.iter().all(|b| *b)
        && hirsch.iter().all(|b| *b);
    Ok(json!({
        "tower_top": tower.top(),
        "stages": stages,
        "one_equivalence": one_eq,
        "stability": stability,
        "canonical_filtration": filtration,
        "canonical_connection_flat": flat.iter().enumerate().map(|(k, b)| json!({"stage": k + 2, "flat": b})).collect::<Vec<_>>(),
        "hirsch_extensions": hirsch.iter().enumerate().map(|(k, b)| json!({"from": k + 2, "to": k + 3, "ok": b})).collect::<Vec<_>>(),
        "all_checks_pass": all_true,
    }))
}

fn cmd_linearize(input: &Path, deg: Option<u32>, class: u32, timer: &mut Timer) -> Result<Value> {
    if class < 2 {
        return Err(CliError::Usage("--class must be at least 2".into()));
    }
    let p = load_presentation(input)?;
    timer.lap("parse");
    let top = p
        .relators()
        .iter()
        .map(|r| r.max_degree())
        .max()
        .unwrap_or(1);
    let q = with_path(input, linearize_presentation(&p, deg.unwrap_or(top).max(1)))?;
    timer.lap("linearize");
    let before = with_path(input, lcs_graded_dims(&p, class + 1))?;
    let after = with_path(input, lcs_graded_dims(&q, class + 1))?;
    timer.lap("lcs");
    Ok(json!({
        "presentation": presentation_json(&q),
        "linear_plus_quadratic": q.is_linear_plus_quadratic(),
        "lcs_dims_input": dims_json(&before),
        "lcs_dims_output": dims_json(&after),
        "dims_agree": before == after,
    }))
}

fn cmd_fixed(input: &Path, action: &Path, timer: &mut Timer) -> Result<Value> {
    let a = load_cdga(input)?;
    let act = with_path(action, GroupAction::from_json(&a, &read(action)?))?;
    timer.lap("parse");
    let (fixed, inclusion) = with_path(input, fixed_subcdga(&a, &act))?;
    timer.lap("fixed");
    let inc: Map<String, Value> = inclusion
        .maps
        .iter()
        .enumerate()
        .map(|(i, m)| (i.to_string(), matrix_json(m)))
        .collect();
    Ok(json!({
        "group_order": act.order(),
        "elements": act.elements(),
        "algebra": cdga_json(&a),
        "fixed": cdga_json(&fixed),
        "inclusion": inc,
    }))
}

fn config_json(cmd: &Command) -> (String, Value) {
    let p = |x: &Path| json!(x.display().to_string());
    match cmd {
        Command::Hall {
            gens,
            level,
            deg,
            words,
        } => (
            "hall".into(),
            json!({"gens": gens, "level": level, "deg": deg, "words": words}),
        ),
        Command::H2scan { input, deg } => ("h2scan".into(), json!({"input": p(input), "deg": deg})),
        Command::Holonomy { input, lcs } => {
            ("holonomy".into(), json!({"input": p(input), "lcs": lcs}))
        }
        Command::Resonance {
            input,
            omega,
            deg,
            trials,
            seed,
        } => (
            "resonance".into(),
            json!({"input": p(input), "omega": omega, "deg": deg, "trials": trials, "seed": seed}),
        ),
        Command::Classify { input, stage } => (
            "classify".into(),
            json!({"input": p(input), "stage": stage}),
        ),
        Command::Linearize { input, deg, class } => (
            "linearize".into(),
            json!({"input": p(input), "deg": deg, "class": class}),
        ),
        Command::Fixed { input, action } => (
            "fixed".into(),
            json!({"input": p(input), "action": p(action)}),
        ),
    }
}

/// Runs one parsed command and returns its report.
pub fn execute(cli: &Cli) -> Result<Value> {
    let mut timer = Timer::new(cli.common.timings);
    let results = match &cli.command {
        Command::Hall {
            gens,
            level,
            deg,
            words,
        } => {
            let r = cmd_hall(*gens, *level, *deg, *words)?;
            timer.lap("hall");
            r
        }
        Command::H2scan { input, deg } => cmd_h2scan(input, *deg, &mut timer)?,
        Command::Holonomy { input, lcs } => cmd_holonomy(input, *lcs, &mut timer)?,
        Command::Resonance {
            input,
            omega,
            deg,
            trials,
            seed,
        } => cmd_resonance(input, omega.as_deref(), *deg, *trials, *seed, &mut timer)?,
        Command::Classify { input, stage } => cmd_classify(input, *stage, &mut timer)?,
        Command::Linearize { input, deg, class } => cmd_linearize(input, *deg, *class, &mut timer)?,
        Command::Fixed { input, action } => cmd_fixed(input, action, &mut timer)?,
    };
    let (name, config) = config_json(&cli.command);
    let mut report =
        json!({"command": name, "config": config, "results": results, "version": VERSION});
    if cli.common.timings {
        report["timings_ms"] = Value::Object(timer.phases);
    }
    Ok(report)
}

/// Parses `args`, runs the command, and returns the exit code together with
/// the text for standard output and standard error.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return (0, e.to_string(), String::new());
            }
            let err = CliError::Usage(e.to_string().trim().to_string());
            return (err.exit_code(), String::new(), pretty(&err.to_json()));
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let text = pretty(&report);
            match &cli.common.out {
                Some(path) => match std::fs::write(path, &text) {
                    Ok(()) => (0, String::new(), String::new()),
                    Err(source) => {
                        let err = CliError::Io {
                            path: path.clone(),
                            source,
                        };
                        (err.exit_code(), String::new(), pretty(&err.to_json()))
                    }
                },
                None => (0, text, String::new()),
            }
        }
        Err(err) => (err.exit_code(), String::new(), pretty(&err.to_json())),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}
