//! `fqdir`: generate point sets in `F_q^d`, measure their directions,
//! incidence counts, Fourier and difference statistics, and run
//! verification campaigns.
//!
//! Exit status: 0 on success, 1 when a campaign finds a counterexample,
//! 2 on any input, configuration or I/O error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fq_directions::directions::{direction_set, read_fset_file, to_fset_string, PointSet};
use fq_directions::harness::{
    default_campaigns, emit_report, format_real, CampaignConfig, CampaignResult,
    ExhaustiveMode, ReportFormat,
};
use fq_directions::incidence::{decomposition_terms, incidence_methods, IncidenceAnalyzer, SlopeTuple};
use fq_directions::salem::{difference_profile, salem_report, GeneratorSpec, DEFAULT_SALEM_THRESHOLD};
use fq_directions::{Error, Result};
use num_rational::Ratio;

#[derive(Parser)]
#[command(name = "fqdir", version, about = "Directions, incidences and Fourier statistics of subsets of F_q^d")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated point set as .fset.
    Gen(GenArgs),
    /// Print |D(E)| and optionally the canonical directions.
    Directions {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also list each direction, first nonzero coordinate scaled to 1.
        #[arg(long)]
        list: bool,
    },
    /// Print the slope-incidence counts for one slope or all of them.
    Nu {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Slope entries, comma separated; omit to sweep every slope.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        t: Option<Vec<i64>>,
        #[arg(long, default_value = "spectral")]
        method: String,
    },
    /// Print the largest nonzero Fourier coefficient and the Salem constant.
    Salem {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SALEM_THRESHOLD)]
        threshold: f64,
    },
    /// Print statistics of the difference multiplicities.
    Diff {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run a named campaign over a grid given by flags.
    Verify(VerifyArgs),
    /// Run a campaign described by a JSON config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
    },
}

#[derive(Args)]
struct GenArgs {
    /// Full generator spec `family:key=value,…`; flags below override it.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Translation for `affine`, written `a.b.c`.
    #[arg(long)]
    shift: Option<String>,
    /// Base family for `embedded`.
    #[arg(long)]
    base: Option<String>,
    #[arg(long)]
    base_d: Option<usize>,
    /// Base .fset file for `embedded`.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    campaign: String,
    #[arg(long, value_delimiter = ',', required = true)]
    q: Vec<u32>,
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enumerate every subset (fails above the enumeration limit).
    #[arg(long, conflicts_with = "sampled")]
    exhaustive: bool,
    /// Always sample, even when enumeration is feasible.
    #[arg(long)]
    sampled: bool,
    #[arg(long, default_value = "random")]
    generator: String,
    #[arg(long, default_value_t = DEFAULT_SALEM_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value = "spectral")]
    method: String,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct ReportArgs {
    /// Report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` or `json`.
    #[arg(long)]
    format: Option<ReportFormat>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Gen(args) => gen(args)?,
        Command::Directions { input, list } => {
            let e = read_fset_file(&input)?;
            let dirs = direction_set(&e);
            let mut out = format!("{}\n", dirs.len());
            if list {
                for dir in dirs.iter() {
                    let coords: Vec<String> = dir.rep().coords().iter().map(u32::to_string).collect();
                    writeln!(out, "{}", coords.join(" ")).unwrap();
                }
            }
            print!("{out}");
        }
        Command::Nu { input, k, t, method } => print!("{}", nu(&read_fset_file(&input)?, k, t, &method)?),
        Command::Salem { input, threshold } => {
            let e = read_fset_file(&input)?;
            let r = salem_report(&e);
            println!("set_size {}", r.set_size);
            println!("max_nonzero_coeff {}", format_real(r.max_nonzero_coeff));
            println!("salem_constant {}", format_real(r.salem_constant));
            println!("salem_at_threshold {}", r.is_salem_at(threshold));
        }
        Command::Diff { input } => {
            let e = read_fset_file(&input)?;
            let p = difference_profile(&e);
            let max_off_zero = p.mu().iter().skip(1).copied().max().unwrap_or(0);
            println!("set_size {}", e.len());
            println!("diff_size {}", p.support_size());
            println!("mu_total {}", p.total());
            println!("mu_zero {}", p.at(0));
            println!("mu_max_nonzero {max_off_zero}");
            println!("mu_energy {}", p.energy());
            println!("identities_hold {}", p.identities_hold(e.len()));
        }
        Command::Verify(args) => {
            default_campaigns().get(&args.campaign)?;
            let mut config = CampaignConfig::new(&args.campaign, args.q, args.d);
            config.k_list = args.k;
            config.trials = args.trials;
            config.seed = args.seed;
            config.generator = args.generator;
            config.salem_threshold = args.threshold;
            config.incidence_method = args.method;
            config.exhaustive = match (args.exhaustive, args.sampled) {
                (true, _) => ExhaustiveMode::Always,
                (_, true) => ExhaustiveMode::Never,
                _ => ExhaustiveMode::Auto,
            };
            config.validate()?;
            return campaign(config, args.report);
        }
        Command::Sweep { config, report } => return campaign(CampaignConfig::from_file(config)?, report),
    }
    Ok(ExitCode::SUCCESS)
}

fn gen(args: GenArgs) -> Result<()> {
    let mut spec: GeneratorSpec = match (&args.spec, &args.family) {
        (Some(s), _) => s.parse()?,
        (None, Some(f)) => f.parse()?,
        (None, None) => return Err(Error::Config("gen needs --family or --spec".into())),
    };
    if let (Some(_), Some(f)) = (&args.spec, &args.family) {
        spec.family = f.clone();
    }
    let p = &mut spec.params;
    let numeric = [
        ("q", args.q.map(u64::from)),
        ("d", args.d.map(|v| v as u64)),
        ("n", args.n.map(|v| v as u64)),
        ("k", args.k.map(|v| v as u64)),
        ("seed", args.seed),
        ("base_d", args.base_d.map(|v| v as u64)),
    ];
    for (key, value) in numeric {
        if let Some(v) = value {
            p.set(key, v);
        }
    }
    if let Some(s) = &args.shift {
        p.set("shift", s);
    }
    if let Some(b) = &args.base {
        p.set("base", b);
    }
    if let Some(path) = &args.input {
        p.set("in", path.display());
    }
    let text = to_fset_string(&spec.generate()?);
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn ratio_text(r: Ratio<i64>) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn nu(e: &PointSet, k: usize, t: Option<Vec<i64>>, method: &str) -> Result<String> {
    let method = incidence_methods().get(method)?;
    let analyzer = IncidenceAnalyzer::new(e);
    analyzer.check_k(k)?;
    let modulus = e.space().modulus();
    let reports = match t {
        Some(entries) => {
            if entries.len() != k {
                return Err(Error::Config(format!("--t has {} entries, expected k = {k}", entries.len())));
            }
            vec![method.report(&analyzer, &SlopeTuple::new(modulus, &entries)?)?]
        }
        None => analyzer.sweep(k, method.as_ref())?,
    };
    let (main, diagonal) = decomposition_terms(e.len(), modulus.get(), k);
    let mut out = String::new();
    writeln!(out, "set_size {}", e.len()).unwrap();
    writeln!(out, "main_term {}", ratio_text(main)).unwrap();
    writeln!(out, "diagonal_term {}", ratio_text(diagonal)).unwrap();
    writeln!(out, "lower_bound {}", ratio_text(main - diagonal)).unwrap();
    writeln!(out, "t\tnu\tnu_nondegenerate\tremainder").unwrap();
    for r in reports {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.slope,
            r.nu,
            r.nu_nondegenerate,
            format_real(r.remainder)
        )
        .unwrap();
    }
    Ok(out)
}

fn campaign(mut config: CampaignConfig, report: ReportArgs) -> Result<ExitCode> {
    if let Some(path) = report.out {
        config.output = Some(path);
    }
    if let Some(format) = report.format {
        config.format = format;
    }
    let result = default_campaigns().get(&config.campaign)?.run(&config)?;
    if let Some(path) = &config.output {
        emit_report(&result, config.format, path)?;
    }
    print!("{}", summary(&result));
    Ok(if result.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn summary(result: &CampaignResult) -> String {
    let mut out = String::new();
    writeln!(out, "campaign {}", result.config.campaign).unwrap();
    writeln!(out, "cells {}", result.cells.len()).unwrap();
    writeln!(out, "trials {}", result.records.len()).unwrap();
    for c in &result.cells {
        let k = c.cell.k.map_or("-".to_string(), |k| k.to_string());
        writeln!(
            out,
            "cell {} q={} d={} k={k} size={} trials={}{} directions={}..{} ratio_ii={}..{} ratio_diff={}..{} failures={}",
            c.cell.index,
            c.cell.q,
            c.cell.d,
            c.cell.target_size,
            c.trials,
            if c.exhaustive { " exhaustive" } else { "" },
            c.min_direction_count,
            c.max_direction_count,
            format_real(c.min_ratio_ii),
            format_real(c.max_ratio_ii),
            format_real(c.min_ratio_diff),
            format_real(c.max_ratio_diff),
            c.hard_failures
        )
        .unwrap();
    }
    for s in &result.sequences {
        let fmt = |v: &[f64]| v.iter().map(|x| format_real(*x)).collect::<Vec<_>>().join(",");
        writeln!(
            out,
            "sequence d={} k={} q={:?} ratio_ii={} ratio_iii={} decreasing={}",
            s.d,
            s.k,
            s.q,
            fmt(&s.mean_ratio_ii),
            fmt(&s.mean_ratio_iii),
            s.decreasing
        )
        .unwrap();
    }
    writeln!(out, "observations {}", result.observations.len()).unwrap();
    writeln!(out, "counterexamples {}", result.counterexamples.len()).unwrap();
    for c in &result.counterexamples {
        writeln!(out, "counterexample {} cell={} trial={}: {}", c.claim, c.cell, c.trial, c.detail).unwrap();
    }
    out
}
