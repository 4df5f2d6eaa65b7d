mod config;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{Case, ConfigError, GroupSpec, PartialConfig, RunConfig, WORKERS_ENV};
use explab::maps::{fiber_statistics, injectivity_scan, FiberReport, InjectionReport};
use explab::series::{delta_via_pressure, kernel_partial, subgroup_delta, DEFAULT_ROOT_TOL};
use explab::verify::{
    check_lemma1_coset, check_main_chain, check_projection_cosine, check_theorem_bound, check_triangle_conjugation,
};
use explab::{CheckReport, DeltaEstimate, MarkedGroup, QuotientHom};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "explab", version, about = "Exponents of convergence for Schottky groups and their normal subgroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Group, e.g. `schottky:k=2,t=3`.
    #[arg(long, global = true, value_parser = GroupSpec::parse)]
    group: Option<GroupSpec>,
    /// Quotient whose kernel is the normal subgroup: `abelian`, `trivial` or `cyclic:n=2,images=1;0`.
    #[arg(long, global = true)]
    hom: Option<String>,
    /// Kernel element `h` for the conjugation map and lemma checks.
    #[arg(long, global = true)]
    h: Option<String>,
    /// Kernel element `h0` for the free injection.
    #[arg(long, global = true)]
    h0: Option<String>,
    /// Word-length cutoff.
    #[arg(long = "L", global = true)]
    len: Option<usize>,
    /// Series exponent for the lemma checks.
    #[arg(long, global = true)]
    s: Option<f64>,
    /// Worker threads (falls back to EXPLAB_WORKERS, then the core count).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Counting window `lo,hi` in displacement.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1)]
    window: Option<Vec<f64>>,
    /// Random samples for the projection audit.
    #[arg(long, global = true)]
    samples: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the exponent of the whole group by pressure and by counting.
    EstimateDelta,
    /// Estimate the exponent of the kernel of `--hom` by counting.
    SubgroupDelta,
    /// Run inequality audits.
    VerifyLemmas {
        /// Run the four standard audits.
        #[arg(long)]
        all: bool,
        /// Run one named audit (repeatable).
        #[arg(long = "check", value_enum)]
        checks: Vec<CheckName>,
    },
    /// Fiber sizes of the conjugation map over coset representatives.
    FiberStats,
    /// Injectivity scan of an embedding of the free group into the kernel.
    InjectionScan {
        #[arg(long, value_enum)]
        case: Option<Case>,
        /// Free basis of the malnormal subgroup, comma separated.
        #[arg(long, value_delimiter = ',')]
        subgroup: Option<Vec<String>>,
    },
    /// Run every stage; stops at the first failure.
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
#[value(rename_all = "snake_case")]
enum CheckName {
    TriangleConjugation,
    ProjectionCosine,
    Lemma1Coset,
    MainChain,
    TheoremBound,
}

const STANDARD_CHECKS: [CheckName; 4] =
    [CheckName::TriangleConjugation, CheckName::ProjectionCosine, CheckName::Lemma1Coset, CheckName::MainChain];

enum Failure {
    Config(ConfigError),
    Run(anyhow::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Run(e)
    }
}

impl From<explab::Error> for Failure {
    fn from(e: explab::Error) -> Self {
        Failure::Run(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn flag_config(cli: &Cli) -> Result<PartialConfig, ConfigError> {
    let f = &cli.flags;
    let window = match &f.window {
        None => None,
        Some(v) => Some(<[f64; 2]>::try_from(v.as_slice()).map_err(|_| ConfigError::new("window", "expected two numbers lo,hi"))?),
    };
    let (case, subgroup) = match &cli.command {
        Command::InjectionScan { case, subgroup } => (*case, subgroup.clone()),
        _ => (None, None),
    };
    Ok(PartialConfig {
        group: f.group.clone(),
        hom: f.hom.clone(),
        h: f.h.clone(),
        h0: f.h0.clone(),
        len: f.len,
        s: f.s,
        workers: f.workers,
        out: f.out.clone(),
        case,
        subgroup,
        window,
        samples: f.samples,
        seed: f.seed,
        ..Default::default()
    })
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let file = match &cli.flags.config {
        Some(path) => PartialConfig::from_file(path)?,
        None => PartialConfig::default(),
    };
    let env = std::env::var(WORKERS_ENV).ok();
    let cfg = RunConfig::resolve(file.overlay(flag_config(&cli)?), env.as_deref())?;
    let group = cfg.group()?;
    let hom = cfg.quotient(group.rank())?;
    let mut session = Session { cfg: &cfg, group: &group, hom: &hom, out: Outputs::default() };

    let (name, pass) = match &cli.command {
        Command::EstimateDelta => ("estimate-delta", session.estimate_delta()?),
        Command::SubgroupDelta => ("subgroup-delta", session.subgroup_delta()?),
        Command::VerifyLemmas { all, checks } => {
            let mut list = checks.clone();
            if *all {
                list.extend(STANDARD_CHECKS);
            }
            if list.is_empty() {
                return Err(ConfigError::new("check", "verify-lemmas needs --all or at least one --check").into());
            }
            list.sort();
            list.dedup();
            let mut pass = true;
            for c in list {
                pass &= session.check(c)?;
            }
            ("verify-lemmas", pass)
        }
        Command::FiberStats => ("fiber-stats", session.fiber_stats()?),
        Command::InjectionScan { .. } => ("injection-scan", session.injection_scan()?),
        Command::Report => ("report", session.report()?),
    };
    session.write(name, pass)?;
    Ok(pass)
}

#[derive(Default, Serialize)]
struct Outputs {
    checks: BTreeMap<String, CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fiber_stats: Option<FiberReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    injection_scan: Option<InjectionReport>,
    #[serde(skip)]
    estimates: BTreeMap<String, DeltaEstimate>,
    #[serde(skip)]
    orbit_csv: Option<String>,
}

#[derive(Serialize)]
struct ManifestFile<'a> {
    command: &'a str,
    config: &'a RunConfig,
    #[serde(flatten)]
    outputs: &'a Outputs,
    pass: bool,
}

#[derive(Serialize)]
struct DeltaFile<'a> {
    config: &'a RunConfig,
    estimates: &'a BTreeMap<String, DeltaEstimate>,
}

struct Session<'a> {
    cfg: &'a RunConfig,
    group: &'a MarkedGroup,
    hom: &'a QuotientHom,
    out: Outputs,
}

impl Session<'_> {
    fn window(&self) -> Option<(f64, f64)> {
        self.cfg.window.map(|[lo, hi]| (lo, hi))
    }

    fn estimate_delta(&mut self) -> Result<bool, Failure> {
        let cfg = self.cfg;
        let pressure = delta_via_pressure(self.group, cfg.len, DEFAULT_ROOT_TOL, cfg.workers)?;
        let trivial = QuotientHom::trivial(self.group.rank());
        let counting = subgroup_delta(self.group, &trivial, cfg.len, self.window(), cfg.workers)?;
        println!("delta (pressure, L={}): {:.6}", cfg.len, pressure.value);
        println!("delta (counting, window [{:.4}, {:.4}]): {:.6}", counting.bracket[0], counting.bracket[1], counting.value);
        self.out.estimates.insert("pressure".into(), pressure);
        self.out.estimates.insert("counting".into(), counting);
        self.out.orbit_csv = Some(self.orbit_csv());
        Ok(true)
    }

    fn subgroup_delta(&mut self) -> Result<bool, Failure> {
        let cfg = self.cfg;
        let mut kernel = subgroup_delta(self.group, self.hom, cfg.len, self.window(), cfg.workers)?;
        // Qualitative divergence trend: does the truncated kernel series at the
        // estimate keep growing with the cutoff?
        let series = kernel_partial(self.group, Some(self.hom), kernel.value, cfg.len, cfg.workers)?;
        let cum = series.cumulative();
        kernel.diagnostics.insert("series_log_at_estimate".into(), series.log_sum);
        let half = cum[cfg.len.div_ceil(2)];
        kernel.diagnostics.insert("series_log_growth_upper_half".into(), series.log_sum - half);
        println!("delta of ker {} (counting, L={}): {:.6}", cfg.hom, cfg.len, kernel.value);
        self.out.estimates.insert("kernel".into(), kernel);
        Ok(true)
    }

    fn check(&mut self, name: CheckName) -> Result<bool, Failure> {
        let (cfg, g) = (self.cfg, self.group);
        let report = match name {
            CheckName::TriangleConjugation => check_triangle_conjugation(g, &cfg.h, cfg.len, cfg.workers)?,
            CheckName::ProjectionCosine => check_projection_cosine(cfg.samples, cfg.seed),
            CheckName::Lemma1Coset => check_lemma1_coset(g, &cfg.h, cfg.s, cfg.len, cfg.n_window)?,
            CheckName::MainChain => check_main_chain(g, self.hom, &cfg.h, cfg.s, cfg.len, cfg.workers)?,
            CheckName::TheoremBound => check_theorem_bound(g, self.hom, cfg.len, cfg.workers)?,
        };
        let pass = report.pass;
        println!(
            "{}: {} ({} cases, worst slack {:.6e})",
            report.name,
            if pass { "PASS" } else { "FAIL" },
            report.cases,
            report.worst_slack
        );
        if !pass {
            eprintln!("{} failed; witness: {}", report.name, json_line(&report.witness));
        }
        self.out.checks.insert(report.name.clone(), report);
        Ok(pass)
    }

    fn fiber_stats(&mut self) -> Result<bool, Failure> {
        let r = fiber_statistics(self.group, &self.cfg.h, self.hom, self.cfg.len)?;
        let pass = r.passes();
        println!(
            "fiber_stats: {} ({} cosets, max fiber {} <= {})",
            if pass { "PASS" } else { "FAIL" },
            r.cosets_scanned,
            r.max_fiber,
            r.declared_bound
        );
        if !pass {
            eprintln!(
                "fiber_stats failed; witness: {}",
                json_line(&serde_json::json!({"largest_fiber": r.witness, "kernel_failures": r.kernel_failures}))
            );
        }
        self.out.fiber_stats = Some(r);
        Ok(pass)
    }

    fn injection_scan(&mut self) -> Result<bool, Failure> {
        let case = self.cfg.injection_case()?;
        let r = injectivity_scan(&case, self.group.rank(), self.cfg.len, self.hom)?;
        let pass = r.passes();
        println!(
            "injection_scan ({}): {} ({} words, {} collisions, {} kernel failures, {} length failures)",
            r.case,
            if pass { "PASS" } else { "FAIL" },
            r.scanned,
            r.collisions.len(),
            r.kernel_failures.len(),
            r.length_failures.len()
        );
        if !pass {
            eprintln!(
                "injection_scan failed; witness: {}",
                json_line(&serde_json::json!({
                    "collisions": r.collisions.first(),
                    "kernel_failures": r.kernel_failures.first(),
                    "length_failures": r.length_failures.first(),
                }))
            );
        }
        self.out.injection_scan = Some(r);
        Ok(pass)
    }

    fn report(&mut self) -> Result<bool, Failure> {
        let ok = self.estimate_delta()?
            && self.subgroup_delta()?
            && STANDARD_CHECKS.into_iter().chain([CheckName::TheoremBound]).try_fold(true, |ok, c| {
                Ok::<_, Failure>(ok && self.check(c)?)
            })?
            && self.fiber_stats()?
            && self.injection_scan()?;
        Ok(ok)
    }

    fn orbit_csv(&self) -> String {
        let mut csv = String::from("word,length,displacement\n");
        for e in self.group.orbit_enumerate(self.cfg.csv_len.min(self.cfg.len), None) {
            writeln!(csv, "{},{},{}", e.word, e.word.len(), e.displacement).expect("writing to a string");
        }
        csv
    }

    fn write(&self, command: &str, pass: bool) -> Result<(), Failure> {
        let dir = &self.cfg.out;
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let put = |name: &str, text: String| {
            let path = dir.join(name);
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
        };
        let manifest = ManifestFile { command, config: self.cfg, outputs: &self.out, pass };
        put("manifest.json", pretty(&manifest))?;
        if !self.out.estimates.is_empty() {
            put("delta.json", pretty(&DeltaFile { config: self.cfg, estimates: &self.out.estimates }))?;
        }
        if let Some(csv) = &self.out.orbit_csv {
            put("orbit.csv", csv.clone())?;
        }
        Ok(())
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("witnesses serialize")
}
