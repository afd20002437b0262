//! Command-line front end: flags, run configuration and dispatch.
//!
//! Exit status is 0 when every check passes, 1 when an inequality or a
//! structural condition is violated, and 2 on usage or configuration errors.
//! Diagnostics go to standard error; data goes to `--out` or standard output.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{luxemburg_norm, maximal_function, modular, radius_ladder, riesz_potential, GridFunction};
use crate::conditions::{check_a0, check_a1, check_growth_condition, check_normalized, BallSpec};
use crate::error::{Error, Result};
use crate::gyf::{check_delta2, from_str_with_path, Conjugate, DocFormat, Family, Gyf, GyfDoc, YoungFn};
use crate::normalize::{make, Recipe};
use crate::report::{fmt_f64, Table, VerificationReport};
use crate::sample::{log_space, SampleSpec};
use crate::sobolev::oracle::{oracle_double_phase, oracle_variable_exponent};
use crate::sobolev::SobolevConjugate;
use crate::verify::{bump_widths, run_named, Experiment, ExperimentDoc};

/// Prefix of the environment variables mirroring the flags.
pub const ENV_PREFIX: &str = "MOSOB_";

#[derive(Parser, Debug)]
#[command(name = "mosob", version, about = "Young functions, Sobolev conjugates and Riesz potentials, with numerical checks")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand; each has a `MOSOB_*` environment override.
#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Function document, JSON or TOML.
    #[arg(long, global = true, env = "MOSOB_PHI")]
    pub phi: Option<PathBuf>,
    /// Run configuration document; flags take precedence over its keys.
    #[arg(long, global = true, env = "MOSOB_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "MOSOB_ALPHA")]
    pub alpha: Option<f64>,
    /// Dimension of the default function when no document is given.
    #[arg(long, global = true, env = "MOSOB_N")]
    pub n: Option<usize>,
    /// bar, hat, circ, bullet, phi0 or none.
    #[arg(long, global = true, env = "MOSOB_NORMALIZE")]
    pub normalize: Option<String>,
    /// Largest relative change of an empirical constant under grid doubling.
    #[arg(long = "tol-drift", global = true, env = "MOSOB_TOL_DRIFT")]
    pub tol_drift: Option<f64>,
    /// Relative tolerance against exact closed forms.
    #[arg(long = "tol-oracle", global = true, env = "MOSOB_TOL_ORACLE")]
    pub tol_oracle: Option<f64>,
    #[arg(long, global = true, env = "MOSOB_SEED")]
    pub seed: Option<u64>,
    /// Output file or directory, depending on the subcommand.
    #[arg(long, global = true, env = "MOSOB_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "MOSOB_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate H, its inverse and the Sobolev conjugate at one point.
    Conjugate {
        /// Comma-separated coordinates; the origin when empty.
        #[arg(long, default_value = "")]
        x: String,
        /// `lo:hi:k`, k log-spaced values.
        #[arg(long = "t-grid", default_value = "1e-3:1e3:25")]
        t_grid: String,
    },
    /// Luxemburg norms and modular of a grid function.
    Norm {
        #[arg(long)]
        input: PathBuf,
    },
    /// Riesz potential of a grid function on its own nodes.
    Riesz {
        #[arg(long)]
        input: PathBuf,
    },
    /// Maximal function of a grid function on its own nodes.
    Maximal {
        #[arg(long)]
        input: PathBuf,
    },
    /// Sampled structural conditions and the growth condition at 0.
    Conditions,
    /// Run one experiment.
    Verify {
        /// weak-type, modular-sobolev, poincare-zero, necessity or oracle-suite.
        #[arg(long)]
        exp: String,
    },
    /// Generic conjugate against every closed form.
    OracleSuite,
}

/// Tolerance overrides.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub drift: f64,
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { drift: 0.5, oracle: 1e-4 }
    }
}

/// A function given by path or inline.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PhiSource {
    Path(PathBuf),
    Inline(GyfDoc),
}

/// On-disk form of [`RunConfig`]; every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub phi: Option<PhiSource>,
    pub alpha: Option<f64>,
    pub n: Option<usize>,
    pub normalize: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub tolerances: Option<Tolerances>,
    pub experiment: Option<ExperimentDoc>,
}

/// A validated run configuration with defaults filled in.
#[derive(Clone)]
pub struct RunConfig {
    /// `None` when no function was given; subcommands pick their own default.
    pub phi: Option<Arc<Gyf>>,
    pub n: usize,
    pub alpha: f64,
    pub normalize: Recipe,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub tol: Tolerances,
    pub experiment: ExperimentDoc,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            phi: None,
            n: 2,
            alpha: 1.0,
            normalize: Recipe::Bar,
            seed: SampleSpec::default().seed,
            out: None,
            threads: None,
            tol: Tolerances::default(),
            experiment: ExperimentDoc::default(),
        }
    }
}

fn cfg_err(path: &str, e: Error) -> Error {
    match e {
        Error::Config { path: p, msg } => Error::Config {
            path: format!("{path}.{p}"),
            msg,
        },
        other => Error::Config {
            path: path.into(),
            msg: other.to_string(),
        },
    }
}

fn load_phi(path: &Path) -> Result<Gyf> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let doc: GyfDoc = from_str_with_path(&s, DocFormat::from_path(path))?;
    doc.build()
}

/// Reads and validates a run configuration document.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let doc: ConfigDoc = from_str_with_path(&s, DocFormat::from_path(path))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut rc = RunConfig::default();
    if let Some(src) = &doc.phi {
        let g = match src {
            PhiSource::Path(p) => load_phi(&base.join(p)).map_err(|e| cfg_err("phi", e))?,
            PhiSource::Inline(d) => d.build().map_err(|e| cfg_err("phi", e))?,
        };
        rc.n = g.n;
        rc.phi = Some(Arc::new(g));
    }
    if let Some(n) = doc.n {
        if rc.phi.as_ref().is_some_and(|g| g.n != n) {
            return Err(Error::Config {
                path: "n".into(),
                msg: format!("dimension {n} disagrees with the function document"),
            });
        }
        rc.n = n;
    }
    if let Some(a) = doc.alpha {
        rc.alpha = a;
    }
    if let Some(r) = &doc.normalize {
        rc.normalize = r.parse().map_err(|e| cfg_err("normalize", e))?;
    }
    if let Some(s) = doc.seed {
        rc.seed = s;
    }
    rc.out = doc.out.map(|o| if o.is_absolute() { o } else { base.join(o) });
    rc.threads = doc.threads;
    if let Some(t) = doc.tolerances {
        rc.tol = t;
    }
    if let Some(e) = doc.experiment {
        rc.experiment = e;
    }
    rc.validate()?;
    Ok(rc)
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        let bad = |path: &str, msg: String| Err(Error::Config { path: path.into(), msg });
        if self.n == 0 {
            return bad("n", "dimension must be positive".into());
        }
        if !(self.alpha > 0.0) {
            return bad("alpha", format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.tol.drift > 0.0) || !(self.tol.oracle > 0.0) {
            return bad("tolerances", "tolerances must be positive".into());
        }
        if self.threads == Some(0) {
            return bad("threads", "thread count must be positive".into());
        }
        Ok(())
    }

    /// Applies flags (and their environment mirrors) over a config file.
    pub fn from_flags(flags: &Flags) -> Result<RunConfig> {
        let mut rc = match &flags.config {
            Some(p) => parse_config(p)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &flags.phi {
            let g = load_phi(p)?;
            rc.n = g.n;
            rc.phi = Some(Arc::new(g));
        }
        if let Some(n) = flags.n {
            if rc.phi.as_ref().is_some_and(|g| g.n != n) {
                return Err(Error::Argument(format!("--n {n} disagrees with the function document")));
            }
            rc.n = n;
        }
        if let Some(a) = flags.alpha {
            rc.alpha = a;
        }
        if let Some(r) = &flags.normalize {
            rc.normalize = r.parse()?;
        }
        if let Some(d) = flags.tol_drift {
            rc.tol.drift = d;
        }
        if let Some(o) = flags.tol_oracle {
            rc.tol.oracle = o;
        }
        if let Some(s) = flags.seed {
            rc.seed = s;
        }
        if flags.out.is_some() {
            rc.out = flags.out.clone();
        }
        if flags.threads.is_some() {
            rc.threads = flags.threads;
        }
        rc.validate()?;
        Ok(rc)
    }

    pub fn sample(&self) -> SampleSpec {
        SampleSpec {
            seed: self.seed,
            ..SampleSpec::default()
        }
    }

    /// The configured function, or `t^p` in dimension `n` with the given `p`.
    pub fn phi_or_power(&self, p: f64) -> Arc<Gyf> {
        self.phi.clone().unwrap_or_else(|| Arc::new(Gyf::power(self.n, p)))
    }
}

/// What a subcommand produced: data for standard output and a verdict.
pub struct Outcome {
    pub pass: bool,
    pub stdout: Option<String>,
    pub summary: String,
}

fn emit(out: &Option<PathBuf>, text: String) -> Result<Option<String>> {
    match out {
        Some(p) => {
            if let Some(d) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(d)?;
            }
            std::fs::write(p, text)?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

fn report_outcome(rep: &VerificationReport, out: &Option<PathBuf>, stem: &str) -> Result<Outcome> {
    let stdout = match out {
        Some(dir) => {
            rep.write_all(dir, stem)?;
            None
        }
        None => Some(rep.to_json()),
    };
    let mut summary = format!("{}: {}", rep.name, if rep.pass { "pass" } else { "FAIL" });
    if let Some(c) = rep.constant {
        summary.push_str(&format!(" constant={}", fmt_f64(c)));
    }
    for note in &rep.notes {
        summary.push_str(&format!("; {note}"));
    }
    Ok(Outcome {
        pass: rep.pass,
        stdout,
        summary,
    })
}

fn parse_point(s: &str, n: usize) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(vec![0.0; n]);
    }
    let x = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Argument(format!("bad coordinate `{v}` in --x"))))
        .collect::<Result<Vec<_>>>()?;
    if x.len() != n {
        return Err(Error::Argument(format!("--x has {} coordinates, expected {n}", x.len())));
    }
    Ok(x)
}

fn parse_t_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Argument(format!("--t-grid must be lo:hi:k with 0 < lo < hi and k >= 2, got `{s}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let k: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi > lo && k >= 2) {
        return Err(bad());
    }
    Ok(log_space(lo, hi, k))
}

/// Closed form for the conjugate of `g` when one exists: exact for powers (unnormalized or circ) and
/// for variable exponents in the circ normalization, up to constants for
/// double phase. The flag says whether the form is exact.
fn oracle_for(g: &Gyf, recipe: Recipe, alpha: f64, x: &[f64], t: f64) -> Option<(f64, bool)> {
    if alpha != 1.0 {
        return None;
    }
    let n = g.n;
    match &g.family {
        Family::Power { c, p } if *c == 1.0 && *p < n as f64 && matches!(recipe, Recipe::Circ | Recipe::None) => {
            oracle_variable_exponent(n, *p, *p, t).ok().map(|v| (v.value(), true))
        }
        Family::VariableExponent { p } if recipe == Recipe::Circ => {
            let lim = p.limit?;
            oracle_variable_exponent(n, lim, p.value(x), t).ok().map(|v| (v.value(), true))
        }
        Family::DoublePhase { p, q, a, .. } => oracle_double_phase(n, *p, *q, a.value(x), t).ok().map(|v| (v.value(), false)),
        _ => None,
    }
}

fn cmd_conjugate(rc: &RunConfig, x: &str, t_grid: &str) -> Result<Outcome> {
    let g = rc.phi_or_power(1.5);
    let x = parse_point(x, g.n)?;
    let ts = parse_t_grid(t_grid)?;
    let base: Arc<dyn YoungFn> = Arc::new(make(g.clone(), rc.normalize, &rc.sample())?);
    let sc = SobolevConjugate::new(base, rc.alpha)?;
    let mut head: Vec<String> = (1..=g.n).map(|i| format!("x{i}")).collect();
    head.extend(["t", "H", "H_inv", "phi_conj", "oracle", "ratio"].map(String::from));
    let mut table = Table::new(head);
    let mut worst = 0.0f64;
    let mut exact = false;
    for &t in &ts {
        let h = sc.h(&x, t)?;
        let hi = sc.h_inverse(&x, t)?.value();
        let c = sc.conjugate(&x, t)?.value();
        let (o, ratio) = match oracle_for(&g, rc.normalize, rc.alpha, &x, t) {
            Some((o, is_exact)) => {
                let r = c / o;
                if is_exact {
                    exact = true;
                    worst = worst.max((r - 1.0).abs());
                }
                (o, r)
            }
            None => (f64::NAN, f64::NAN),
        };
        let mut row = x.clone();
        row.extend([t, h, hi, c, o, ratio]);
        table.push(row);
    }
    let pass = !exact || worst <= rc.tol.oracle;
    let summary = if exact {
        format!("conjugate: max |generic/oracle - 1| = {} ({})", fmt_f64(worst), if pass { "pass" } else { "FAIL" })
    } else {
        "conjugate: no exact closed form for this function".into()
    };
    Ok(Outcome {
        pass,
        stdout: emit(&rc.out, table.to_csv())?,
        summary,
    })
}

fn read_input(path: &Path) -> Result<GridFunction> {
    GridFunction::read_csv(path).map_err(|e| match e {
        Error::Io(m) => Error::Io(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn cmd_norm(rc: &RunConfig, input: &Path) -> Result<Outcome> {
    let u = read_input(input)?;
    let g = rc.phi_or_power(1.5);
    if g.n != u.grid.n() {
        return Err(Error::Argument(format!("grid has n = {}, function has n = {}", u.grid.n(), g.n)));
    }
    let phi: Arc<dyn YoungFn> = g;
    let norm = luxemburg_norm(phi.as_ref(), &u)?;
    let conj = Conjugate { base: phi.clone() };
    let norm_c = luxemburg_norm(&conj, &u)?;
    let m = modular(phi.as_ref(), &u).value();
    let v = serde_json::json!({
        "function": phi.label(),
        "nodes": u.values.len(),
        "luxemburg_norm": norm,
        "conjugate_norm": norm_c,
        "modular": if m.is_finite() { serde_json::json!(m) } else { serde_json::json!("inf") },
    });
    Ok(Outcome {
        pass: true,
        stdout: emit(&rc.out, serde_json::to_string_pretty(&v).expect("json") + "\n")?,
        summary: format!("norm: {}", fmt_f64(norm)),
    })
}

fn cmd_riesz(rc: &RunConfig, input: &Path) -> Result<Outcome> {
    let f = read_input(input)?;
    let n = f.grid.n() as f64;
    if !(rc.alpha > 0.0 && rc.alpha < n) {
        return Err(Error::Argument(format!("alpha must lie in (0, {n})")));
    }
    let i = riesz_potential(&f, rc.alpha, f.grid.clone())?;
    Ok(Outcome {
        pass: true,
        stdout: emit(&rc.out, i.to_csv())?,
        summary: format!("riesz: {} nodes, max {}", i.values.len(), fmt_f64(i.max_abs())),
    })
}

fn cmd_maximal(rc: &RunConfig, input: &Path) -> Result<Outcome> {
    let f = read_input(input)?;
    let m = maximal_function(&f, &radius_ladder(&f.grid));
    Ok(Outcome {
        pass: true,
        stdout: emit(&rc.out, m.to_csv())?,
        summary: format!("maximal: {} nodes, max {}", m.values.len(), fmt_f64(m.max_abs())),
    })
}

fn cmd_conditions(rc: &RunConfig) -> Result<Outcome> {
    let g = rc.phi_or_power(1.5);
    let phi: Arc<dyn YoungFn> = g;
    let sample = rc.sample();
    let balls = BallSpec {
        seed: rc.seed,
        ..BallSpec::default()
    };
    let a0 = check_a0(phi.as_ref(), &sample);
    let a1 = check_a1(phi.as_ref(), &balls);
    let d2 = check_delta2(phi.as_ref(), &sample.points(phi.dim()));
    let growth = check_growth_condition(phi.as_ref(), rc.alpha)?;
    let normalized = match make(phi.clone(), rc.normalize, &sample) {
        Ok(d) => serde_json::to_value(check_normalized(&d, &sample, &balls)).expect("json"),
        Err(e) => serde_json::json!({ "error": e.to_string() }),
    };
    let pass = a0.holds && a1.holds && growth.converges;
    let v = serde_json::json!({
        "function": phi.label(),
        "alpha": rc.alpha,
        "a0": a0,
        "a1": a1,
        "delta2": d2,
        "growth": growth,
        "normalized": normalized,
    });
    let summary = format!(
        "conditions: A0 {}, A1 {}, Delta2 {}, growth at 0 {}",
        if a0.holds { "holds" } else { "fails" },
        if a1.holds { "holds" } else { "fails" },
        if d2.holds { "holds" } else { "fails" },
        if growth.converges { "converges" } else { "diverges" },
    );
    Ok(Outcome {
        pass,
        stdout: emit(&rc.out, serde_json::to_string_pretty(&v).expect("json") + "\n")?,
        summary,
    })
}

fn cmd_verify(rc: &RunConfig, name: &str) -> Result<Outcome> {
    // Necessity is about the divergent regime, so its default is t^n.
    let default_p = if name == "necessity" { rc.n as f64 } else { 1.5 };
    let phi: Arc<dyn YoungFn> = rc.phi_or_power(default_p);
    let mut exp = Experiment::new(name, phi);
    exp.alpha = rc.alpha;
    exp.sample = rc.sample();
    exp.drift_tol = rc.tol.drift;
    if name == "poincare-zero" {
        exp.profiles = bump_widths();
        exp.profiles.push(crate::analysis::Profile::Tent { radius: 1.0, height: 1.0 });
    }
    rc.experiment.apply(&mut exp)?;
    let rep = run_named(name, &exp)?;
    report_outcome(&rep, &rc.out, name)
}

/// Runs one parsed command.
pub fn dispatch(rc: &RunConfig, cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Conjugate { x, t_grid } => cmd_conjugate(rc, x, t_grid),
        Command::Norm { input } => cmd_norm(rc, input),
        Command::Riesz { input } => cmd_riesz(rc, input),
        Command::Maximal { input } => cmd_maximal(rc, input),
        Command::Conditions => cmd_conditions(rc),
        Command::Verify { exp } => cmd_verify(rc, exp),
        Command::OracleSuite => cmd_verify(rc, "oracle-suite"),
    }
}

/// Exit status for an error: 1 for numerical failures to establish a bound,
/// 2 for everything the caller can fix.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. } | Error::NoFiniteNorm | Error::NoFiniteConstants(_) => 1,
        _ => 2,
    }
}

/// Parses `args`, runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let rc = match RunConfig::from_flags(&cli.flags) {
        Ok(rc) => rc,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Some(t) = rc.threads {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match dispatch(&rc, &cli.command) {
        Ok(o) => {
            if let Some(s) = o.stdout {
                print!("{s}");
            }
            eprintln!("{}", o.summary);
            if o.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_grid_parsing() {
        assert_eq!(parse_t_grid("1:100:3").unwrap().len(), 3);
        assert!(parse_t_grid("0:1:3").is_err());
        assert!(parse_t_grid("1:2").is_err());
    }

    #[test]
    fn flags_override_defaults() {
        let f = Flags {
            alpha: Some(0.5),
            seed: Some(3),
            ..Flags::default()
        };
        let rc = RunConfig::from_flags(&f).unwrap();
        assert_eq!(rc.alpha, 0.5);
        assert_eq!(rc.sample().seed, 3);
        assert_eq!(rc.normalize, Recipe::Bar);
    }
}
