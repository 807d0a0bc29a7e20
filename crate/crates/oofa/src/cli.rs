//! Argument parsing and subcommand dispatch for the `oofa` binary.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use oofa_core::blocks::{find_component_design, ComponentDesign, SearchConfig};
use oofa_core::constructions::{
    auto_block_design, auto_group_design, auto_group_size, construction1_auto, construction1_size, construction2,
    construction2_size, construction3, construction3_size, construction4, construction4_size, ConstructionConfig,
    DesignTable, GroupPlan, DEFAULT_ROW_CAP,
};
use oofa_core::criteria::{
    a_value_exact, closed_form_for, d_value, efficiencies, exact_efficiencies, g_value_over, moment_sums,
    verify_moment_structure, ClosedForm, CriterionReport, DesignMeasure,
};
use oofa_core::measure_opt::{d_optimal_over, round_to_exact, OptimizerConfig, REPORT_ZERO};
use oofa_core::model::{derive_model, infeasible_rows};
use oofa_core::perm::{enumerate_feasible_capped, feasible_count, DEFAULT_ENUMERATION_CAP};
use oofa_core::{ConstraintSystem, Error as CoreError, GroupPartition, Label, ModelSpec, Order, PairwiseConstraint};
use rand::seq::IndexedRandom;
use rand::SeedableRng;

use crate::analysis::{clean, ols_fit, predict_best_order, Direction};
use crate::error::{Error, Result};
use crate::formats::{
    format_design, format_fit_csv, format_fit_table, format_measure, format_order, format_report, format_residuals,
    format_rounding, format_system_inline, parse_constraint, parse_design, parse_measure, parse_system, read_dataset,
    DesignFile, MeasureFile, RoundingFile,
};

#[derive(Parser, Debug)]
#[command(name = "oofa", version, about = "Designs and analysis for constrained order-of-addition experiments")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct SystemArgs {
    /// System file (`m = ..`, `group = ..`, `within = i->j`).
    #[arg(long)]
    system: Option<PathBuf>,
    /// Number of components of a single-group system.
    #[arg(long)]
    m: Option<usize>,
    /// Group sizes in precedence order, e.g. `2,4`.
    #[arg(long, value_delimiter = ',')]
    groups: Vec<usize>,
    /// Within-group constraint `i-j` (i before j); repeatable.
    #[arg(long = "constraint")]
    constraints: Vec<String>,
}

impl SystemArgs {
    fn given(&self) -> bool {
        self.system.is_some() || self.m.is_some() || !self.groups.is_empty()
    }

    fn load(&self) -> Result<ConstraintSystem> {
        if let Some(path) = &self.system {
            if self.m.is_some() || !self.groups.is_empty() || !self.constraints.is_empty() {
                return Err(Error::Usage("--system cannot be combined with --m, --groups or --constraint".into()));
            }
            return parse_system(&read(path)?);
        }
        let partition = if self.groups.is_empty() {
            GroupPartition::single(self.m.ok_or_else(|| Error::Usage("give --system, --m or --groups".into()))?)
        } else {
            let p = GroupPartition::from_sizes(&self.groups)?;
            if self.m.is_some_and(|m| m != p.m()) {
                return Err(CoreError::DimensionMismatch { expected: self.m.unwrap(), found: p.m() }.into());
            }
            p
        };
        let within = self.constraints.iter().map(|c| parse_constraint(c, 0)).collect::<Result<Vec<_>>>()?;
        Ok(ConstraintSystem::new(partition, within)?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write every feasible order in lexicographic order.
    Enumerate {
        #[command(flatten)]
        sys: SystemArgs,
        /// Maximum number of orders to materialize.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u128,
        /// Print only the count.
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the model header of a system.
    Model {
        #[command(flatten)]
        sys: SystemArgs,
    },
    /// Build a design.
    Construct {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Component inserted by the odd single-group construction.
        #[arg(long)]
        insert: Option<Label>,
        /// Pick the inserted component at random from `--seed`.
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Proposal budget of the component-design search.
        #[arg(long, default_value_t = SearchConfig::default().max_proposals)]
        max_proposals: u64,
        /// Print the run size without building the design.
        #[arg(long)]
        dry_run: bool,
        #[arg(long, default_value_t = DEFAULT_ROW_CAP)]
        cap: u128,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Criterion values and efficiencies of a design.
    Evaluate {
        #[arg(long)]
        design: PathBuf,
        #[command(flatten)]
        sys: SystemArgs,
        /// Rational arithmetic throughout.
        #[arg(long)]
        exact: bool,
        /// Compare every normalized cross-product with the full design's structure.
        #[arg(long)]
        verify_structure: bool,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u128,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// D-optimal approximate design by multiplicative updates.
    Optimize {
        /// Candidate orders (design or plain order-list file).
        #[arg(long)]
        orders: Option<PathBuf>,
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, value_enum, default_value_t = ModelChoice::General)]
        model: ModelChoice,
        #[arg(long, default_value_t = OptimizerConfig::default().max_iterations)]
        max_iterations: usize,
        #[arg(long, default_value_t = OptimizerConfig::default().tolerance)]
        tolerance: f64,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u128,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Round a measure to integer replications.
    Round {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least-squares fit of a survey dataset.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, default_value_t = 7200.0)]
        clean_max_seconds: f64,
        /// Keep rows without a response through cleaning (they are never fitted).
        #[arg(long)]
        keep_missing: bool,
        #[arg(long, value_enum)]
        recommend: Option<Recommend>,
        /// Machine-readable coefficient rows.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        residuals: Option<PathBuf>,
    },
    /// Component and block designs.
    Catalog {
        #[command(subcommand)]
        what: CatalogCommand,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCommand {
    /// Run sizes of the automatic group designs.
    List {
        #[arg(long, default_value_t = 12)]
        max_size: usize,
    },
    /// Moment-equivalent design for one unconstrained group.
    Component {
        #[arg(long)]
        size: usize,
        /// Run size; defaults to the automatic plan.
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Block design used for a group of seven or more components.
    Blocks {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Full,
    C1,
    C2,
    C3,
    C4,
    Auto,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModelChoice {
    General,
    Full,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Recommend {
    Max,
    Min,
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(stdout, "{e}");
                return if e.kind() == K::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
            }
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            let _ = writeln!(stderr, "{}", Error::Usage(first).machine_line());
            return 2;
        }
    };
    let _ = cli.jobs;
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.machine_line());
            e.kind().exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Writes `text` to `out` through a temporary file in the same directory,
/// or to stdout. The temporary file is removed if anything fails.
fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    fn io(path: &Path, source: std::io::Error) -> Error {
        Error::Io { path: path.to_path_buf(), source }
    }
    match out {
        None => stdout.write_all(text.as_bytes()).map_err(|e| io(Path::new("<stdout>"), e)),
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io(path, e))?;
            tmp.write_all(text.as_bytes()).map_err(|e| io(path, e))?;
            tmp.persist(path).map_err(|e| io(path, e.error))?;
            Ok(())
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Enumerate { sys, cap, count_only, out } => {
            let system = sys.load()?;
            if count_only {
                let n = match feasible_count(&system) {
                    Ok(n) => n,
                    Err(CoreError::FormulaInapplicable(_)) => enumerate_feasible_capped(&system, cap)?.len() as u128,
                    Err(e) => return Err(e.into()),
                };
                return emit(out.as_deref(), &format!("{n}\n"), stdout);
            }
            let fs = enumerate_feasible_capped(&system, cap)?;
            let file = DesignFile {
                m: system.m(),
                spec: Some(derive_model(&system)),
                system: Some(system),
                provenance: Some("construction=full".into()),
                rows: fs.into_orders(),
            };
            emit(out.as_deref(), &format_design(&file), stdout)
        }
        Command::Model { sys } => {
            let system = sys.load()?;
            let spec = derive_model(&system);
            let text = format!("# spec: {spec}\n# system: {}\np={}\n", format_system_inline(&system), spec.p());
            emit(None, &text, stdout)
        }
        Command::Construct { sys, method, insert, random, seed, max_proposals, dry_run, cap, out } => {
            let system = sys.load()?;
            let cfg = ConstructionConfig { search: SearchConfig { seed, max_proposals }, row_cap: cap };
            let method = resolve_method(method, &system);
            if dry_run {
                let n = construct_size(method, &system)?;
                return emit(out.as_deref(), &format!("{n}\n"), stdout);
            }
            let insert = match (insert, random) {
                (Some(_), true) => return Err(Error::Usage("--insert and --random are exclusive".into())),
                (Some(i), false) => Some(i),
                (None, true) => Some(random_insert(&system, seed)?),
                (None, false) => None,
            };
            let table = construct(method, &system, insert, cfg)?;
            let file = DesignFile {
                m: system.m(),
                spec: Some(derive_model(&system)),
                system: Some(system),
                provenance: Some(table.provenance().to_string()),
                rows: table.into_rows(),
            };
            emit(out.as_deref(), &format_design(&file), stdout)
        }
        Command::Evaluate { design, sys, exact, verify_structure, cap, out } => {
            let file = parse_design(&read(&design)?)?;
            let system = match (sys.given(), &file.system) {
                (true, _) => sys.load()?,
                (false, Some(s)) => s.clone(),
                (false, None) => return Err(Error::Usage("the design has no system header; give --system".into())),
            };
            let text = evaluate(&file, &system, exact, verify_structure, cap, stderr)?;
            emit(out.as_deref(), &text, stdout)
        }
        Command::Optimize { orders, sys, model, max_iterations, tolerance, cap, out } => {
            let (candidates, m, general) = match (&orders, sys.given()) {
                (Some(_), true) => return Err(Error::Usage("give either --orders or a system, not both".into())),
                (Some(path), false) => {
                    let f = parse_design(&read(path)?)?;
                    let general = ModelSpec::from_orders(f.m, &f.rows)?;
                    (f.rows, f.m, general)
                }
                (None, true) => {
                    let system = sys.load()?;
                    let fs = enumerate_feasible_capped(&system, cap)?;
                    (fs.into_orders(), system.m(), derive_model(&system))
                }
                (None, false) => return Err(Error::Usage("give --orders or a system".into())),
            };
            let spec = match model {
                ModelChoice::General => general,
                ModelChoice::Full => ModelSpec::full(m),
            };
            let cfg = OptimizerConfig { max_iterations, tolerance, ..Default::default() };
            cfg.validate()?;
            let r = d_optimal_over(&candidates, &spec, cfg)?;
            // Weights below the reporting threshold print as zero.
            let weights: Vec<f64> = r.measure.weights().iter().map(|&w| if w < REPORT_ZERO { 0.0 } else { w }).collect();
            let measure = DesignMeasure::new(r.measure.support().to_vec(), weights)?;
            let mut text = format!("# iterations: {}\n# max_variance: {}\n", r.iterations, r.max_variance);
            text.push_str(&format_measure(&MeasureFile { spec: Some(spec), measure }));
            emit(out.as_deref(), &text, stdout)
        }
        Command::Round { measure, trials, out } => {
            let f = parse_measure(&read(&measure)?)?;
            let m = f.measure.support()[0].len();
            let spec = match f.spec {
                Some(s) => s,
                None => ModelSpec::from_orders(m, f.measure.support())?,
            };
            let r = round_to_exact(&f.measure, &spec, trials)?;
            let rows = f.measure.support().iter().cloned().zip(r.counts.iter().copied()).collect();
            let mut text = format!("# log_det: {}\n# exhaustive: {}\n", r.log_det, r.exhaustive);
            text.push_str(&format_rounding(&RoundingFile { spec: Some(spec), rows }));
            emit(out.as_deref(), &text, stdout)
        }
        Command::Fit { data, sys, clean_max_seconds, keep_missing, recommend, out, residuals } => {
            let system = sys.load()?;
            let file = fs::File::open(&data).map_err(|source| Error::Io { path: data.clone(), source })?;
            let raw = read_dataset(file)?;
            let (cleaned, report) = clean(&raw, clean_max_seconds, !keep_missing)?;
            let spec = derive_model(&system);
            let infeasible = infeasible_rows(&cleaned.rows().iter().map(|r| r.order.clone()).collect::<Vec<_>>(), &system)?;
            if !infeasible.is_empty() {
                let _ = writeln!(stderr, "warning: {} rows violate the system", infeasible.len());
            }
            let fit = ols_fit(&cleaned, &spec)?;
            let mut text = format!(
                "# rows: {} read, {} kept\n# removed (duration > {clean_max_seconds} s): {}\n# removed (missing response): {}\n",
                raw.len(),
                report.kept,
                list_or_none(&report.removed_duration),
                list_or_none(&report.removed_missing)
            );
            text.push_str(&format_fit_table(&fit));
            if let Some(dir) = recommend {
                let fs = enumerate_feasible_capped(&system, DEFAULT_ENUMERATION_CAP)?;
                let dir = if dir == Recommend::Max { Direction::Max } else { Direction::Min };
                let best = predict_best_order(&fit, &fs, dir)?;
                text.push_str(&format!("recommended={}\n", format_order(&best)));
            }
            if let Some(path) = &residuals {
                emit(Some(path), &format_residuals(&fit), stdout)?;
            }
            match out {
                Some(path) => {
                    emit(Some(&path), &format_fit_csv(&fit), stdout)?;
                    emit(None, &text, stdout)
                }
                None => emit(None, &text, stdout),
            }
        }
        Command::Catalog { what } => catalog(what, stdout),
    }
}

fn list_or_none(ids: &[String]) -> String {
    if ids.is_empty() {
        "none".into()
    } else {
        ids.join(",")
    }
}

fn resolve_method(method: Method, system: &ConstraintSystem) -> Method {
    if method != Method::Auto {
        return method;
    }
    let counts = system.within_counts();
    if counts.iter().all(|&c| c == 0) {
        Method::C1
    } else if system.partition().groups().len() == 1 && counts[0] == 1 && system.m() >= 4 {
        if system.m() % 2 == 0 {
            Method::C2
        } else {
            Method::C3
        }
    } else {
        Method::C4
    }
}

/// The lone within constraint of a single-group system.
fn single_constraint(system: &ConstraintSystem) -> Result<PairwiseConstraint> {
    let w = system.within();
    if w.len() != 1 || w[0].len() != 1 {
        return Err(CoreError::InvalidArgument(
            "this construction needs one group with exactly one within constraint".into(),
        )
        .into());
    }
    Ok(w[0][0])
}

fn require_unconstrained(system: &ConstraintSystem) -> Result<()> {
    if system.within_counts().iter().any(|&c| c > 0) {
        return Err(CoreError::InvalidArgument("the group construction takes no within constraints".into()).into());
    }
    Ok(())
}

fn auto_plans(partition: &GroupPartition) -> Vec<GroupPlan> {
    vec![GroupPlan::Auto; partition.groups().len()]
}

fn construct_size(method: Method, system: &ConstraintSystem) -> Result<u128> {
    Ok(match method {
        Method::Full => match feasible_count(system) {
            Ok(n) => n,
            Err(CoreError::FormulaInapplicable(_)) => {
                enumerate_feasible_capped(system, DEFAULT_ENUMERATION_CAP)?.len() as u128
            }
            Err(e) => return Err(e.into()),
        },
        Method::C1 => {
            require_unconstrained(system)?;
            construction1_size(system.partition(), &auto_plans(system.partition()))?
        }
        Method::C2 => {
            single_constraint(system)?;
            construction2_size(system.m())?
        }
        Method::C3 => {
            single_constraint(system)?;
            construction3_size(system.m())?
        }
        Method::C4 => construction4_size(system)?,
        Method::Auto => unreachable!("resolved before sizing"),
    })
}

fn construct(method: Method, system: &ConstraintSystem, insert: Option<Label>, cfg: ConstructionConfig) -> Result<DesignTable> {
    if insert.is_some() && method != Method::C3 {
        return Err(Error::Usage("--insert and --random apply to the odd single-group construction only".into()));
    }
    Ok(match method {
        Method::Full => {
            let fs = enumerate_feasible_capped(system, cfg.row_cap)?;
            DesignTable::new(system.m(), fs.into_orders(), "construction=full")?
        }
        Method::C1 => {
            require_unconstrained(system)?;
            construction1_auto(system.partition(), cfg)?
        }
        Method::C2 => construction2(system.m(), single_constraint(system)?, cfg)?,
        Method::C3 => construction3(system.m(), single_constraint(system)?, insert, cfg)?,
        Method::C4 => construction4(system, cfg)?,
        Method::Auto => unreachable!("resolved before construction"),
    })
}

fn random_insert(system: &ConstraintSystem, seed: u64) -> Result<Label> {
    let c = single_constraint(system)?;
    let choices: Vec<Label> = (1..=system.m() as Label).filter(|&l| l != c.before && l != c.after).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    choices.choose(&mut rng).copied().ok_or_else(|| CoreError::InvalidArgument("no component to insert".into()).into())
}

/// Baseline for efficiencies: the closed form, with the A value taken from
/// the full design when the closed form has none and enumeration fits.
fn baseline(system: &ConstraintSystem, spec: &ModelSpec, full: Option<&[Order]>) -> Result<ClosedForm> {
    let mut base = closed_form_for(system)?;
    if base.a.is_none() {
        if let Some(full) = full {
            base.a = a_value_exact(&moment_sums(full, spec)?).ok();
        }
    }
    Ok(base)
}

fn evaluate(
    file: &DesignFile,
    system: &ConstraintSystem,
    exact: bool,
    verify_structure: bool,
    cap: u128,
    stderr: &mut dyn Write,
) -> Result<String> {
    let spec = derive_model(system);
    if let Some(header) = &file.spec {
        if *header != spec {
            return Err(CoreError::InvalidArgument(format!("design spec {header} does not match the system's {spec}")).into());
        }
    }
    if file.rows.is_empty() {
        return Err(CoreError::EmptySupport.into());
    }
    let bad = infeasible_rows(&file.rows, system)?;
    if !bad.is_empty() {
        let _ = writeln!(stderr, "warning: {} rows violate the system", bad.len());
    }
    let full = match enumerate_feasible_capped(system, cap) {
        Ok(fs) => Some(fs),
        Err(CoreError::CapExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let base = baseline(system, &spec, full.as_ref().map(|f| f.orders()))?;
    let mut report = if exact {
        let (cand, exhaustive) = full.as_ref().map_or((file.rows.as_slice(), false), |f| (f.orders(), true));
        exact_efficiencies(&file.rows, &spec, cand, exhaustive, &base)?
    } else {
        let measure = DesignMeasure::uniform(file.rows.clone())?;
        match &full {
            Some(fs) => efficiencies(&measure, &spec, fs, &base)?,
            None => sampled_report(&measure, &spec, &file.rows, &base)?,
        }
    };
    report.runs = Some(file.rows.len() as u64);
    let mut text = format_report(&report);
    if verify_structure {
        let v = verify_moment_structure(&file.rows, system)?;
        text.push_str(&format!("structure_violations={}\n", v.len()));
        for x in &v {
            text.push_str(&format!("violation={},{},{},{}\n", x.row_term, x.col_term, x.expected, x.found));
        }
    }
    Ok(text)
}

/// Float report when the feasible set is too large: G is a lower bound
/// over the design's own rows.
fn sampled_report(measure: &DesignMeasure, spec: &ModelSpec, rows: &[Order], base: &ClosedForm) -> Result<CriterionReport> {
    let d = d_value(measure, spec)?;
    let to_f = |r: &num_rational::BigRational| oofa_core::linalg::rat_to_f64(r);
    let d_eff = if d > 0.0 { (d / to_f(&base.d)).powf(1.0 / spec.p() as f64) } else { 0.0 };
    let (a, g, singular) = match g_value_over(measure, spec, rows, false) {
        Ok(g) => (oofa_core::criteria::a_value(measure, spec).ok(), Some(g.value), false),
        Err(CoreError::Singular { .. }) => (None, None, true),
        Err(e) => return Err(e.into()),
    };
    Ok(CriterionReport {
        p: spec.p(),
        runs: Some(rows.len() as u64),
        a_value: a,
        d_value: d,
        g_value: g,
        a_eff: base.a.as_ref().map(|a0| a.map_or(0.0, |a| to_f(a0) / a)),
        d_eff,
        g_eff: g.map_or(0.0, |g| to_f(&base.g) / g),
        g_exhaustive: false,
        singular,
        exact: None,
    })
}

fn catalog(what: CatalogCommand, stdout: &mut dyn Write) -> Result<()> {
    match what {
        CatalogCommand::List { max_size } => {
            let mut text = String::from("size,runs,full_runs,design\n");
            for size in 1..=max_size {
                let full = (1..=size as u128).product::<u128>();
                let (runs, how) = match auto_group_size(size) {
                    Ok(n) => (n.to_string(), describe(size)),
                    Err(_) => ("NA".to_string(), "unsupported".to_string()),
                };
                text.push_str(&format!("{size},{runs},{full},{how}\n"));
            }
            emit(None, &text, stdout)
        }
        CatalogCommand::Component { size, runs, seed, out } => {
            let search = SearchConfig { seed, ..Default::default() };
            let labels: Vec<Label> = (1..=size as Label).collect();
            let d: ComponentDesign = match runs {
                Some(n) => find_component_design(&labels, n, search)?,
                None => auto_group_design(size, search)?,
            };
            let mut text = format!("# size: {size}\n# runs: {}\n# certified: {}\n", d.len(), d.is_certified());
            for r in d.rows() {
                text.push_str(&format!("{}\n", format_order(&Order::new(r.clone())?)));
            }
            emit(out.as_deref(), &text, stdout)
        }
        CatalogCommand::Blocks { size, out } => {
            let bd = auto_block_design(size)?;
            let (r, lambda) = bd.bibd_parameters().map_or(("NA".into(), "NA".into()), |(r, l)| (r.to_string(), l.to_string()));
            let mut text = format!("# v={} b={} k={} r={r} lambda={lambda}\n", bd.v(), bd.b(), bd.k());
            for b in bd.blocks() {
                let labels: Vec<String> = b.iter().map(|l| l.to_string()).collect();
                text.push_str(&format!("{}\n", labels.join(",")));
            }
            emit(out.as_deref(), &text, stdout)
        }
    }
}

fn describe(size: usize) -> String {
    match size {
        1..=3 => "full".into(),
        4..=6 => "searched".into(),
        _ => match auto_block_design(size) {
            Ok(bd) => format!("blocks(b={},k={})", bd.b(), bd.k()),
            Err(_) => "unsupported".into(),
        },
    }
}
