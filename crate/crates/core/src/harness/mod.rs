//! Verification campaigns over grids of `(q, d, k, |E|)`.
//!
//! A campaign expands its [`CampaignConfig`] into [`Cell`]s, draws sets for
//! each cell (every subset when feasible, seeded samples otherwise), and
//! evaluates each set once. Every trial yields one [`TrialRecord`]; claims
//! that must hold unconditionally produce [`Counterexample`]s, recorded
//! measurements that may legitimately fail produce [`Observation`]s.
//! Campaigns are registered by name in [`default_campaigns`].

mod campaigns;
pub mod config;
mod report;

use rayon::prelude::*;
use serde::Serialize;

use crate::directions::{
    ambient_direction_count, coordinate_subspace_directions, direction_set, to_fset_string,
    PointSet,
};
use crate::error::{Error, Result};
use crate::incidence::{theorem_main_threshold, IncidenceAnalyzer, IncidenceMethod, REMAINDER_FLOOR};
use crate::rng::trial_seed;
use crate::salem::{difference_bound_check_with, difference_profile, GeneratorSpec};
use crate::space::Space;
use crate::spectral::forward_transform;

pub use campaigns::{
    default_campaigns, run_campaign, sharpness_suite, verify_non_salem, verify_salem_bounds,
    verify_theorem_main, Campaign,
};
pub use config::{CampaignConfig, ExhaustiveMode, ReportFormat, SizePolicy, EXHAUSTIVE_LIMIT};
pub use report::{emit_report, format_real, render_report, CSV_COLUMNS};

/// Claim names used in counterexamples and observations.
pub mod claims {
    /// `ν_E(t) ≥ main − diagonal > 0` for every `t` once `|E| > q^k`.
    pub const NU_THRESHOLD: &str = "nu-threshold";
    /// `R(t) ≥ −10⁻⁶`.
    pub const REMAINDER_FLOOR: &str = "remainder-floor";
    /// The spectral count landed outside the rounding guard.
    pub const ROUNDING_GUARD: &str = "rounding-guard";
    /// `Σμ = |E|²`, `μ(0) = |E|`, `μ(z) = μ(−z)`.
    pub const DIFFERENCE_IDENTITIES: &str = "difference-identities";
    /// `|D(E)|·(q − 1) ≥ |E − E| − 1`.
    pub const QUOTIENT_BOUND: &str = "quotient-bound";
    /// `|E| > q^{d−1}` forces every direction.
    pub const FULL_COVERAGE: &str = "full-coverage";
    /// Pairs with `x_1 ≠ y_1` are counted by exactly one slope.
    pub const PAIR_PARTITION: &str = "pair-partition";
    /// `H_k` determines exactly `(q^k − 1)/(q − 1)` directions.
    pub const SHARPNESS: &str = "sharpness";
    /// A set inside `H_{k+1}` determines at most `(q^{k+1} − 1)/(q − 1)`.
    pub const SUBSPACE_CAP: &str = "subspace-cap";

    /// `D(H_{k+1}) ⊆ D(E)` for `|E| > q^k`, `k < d − 1`.
    pub const LITERAL_SUBSET: &str = "literal-subset";
    /// Every slope has a pair with `x_1 ≠ y_1`.
    pub const SLOPE_COVERAGE: &str = "slope-coverage";
    /// A direction or difference ratio fell below the configured floor.
    pub const RATIO_FLOOR: &str = "ratio-floor";
    /// Mean `|D(E)|` decreased as `|E|` grew.
    pub const MONOTONICITY: &str = "monotonicity";
    /// Mean ratios did not strictly decrease in `q`.
    pub const RATIO_SEQUENCE: &str = "ratio-sequence";
}

/// One grid point of a campaign.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub index: usize,
    pub q: u32,
    pub d: usize,
    pub k: Option<usize>,
    pub target_size: usize,
}

/// One row of the CSV report. Column order is [`CSV_COLUMNS`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub cell: usize,
    /// Sample number, or lexicographic rank in exhaustive cells.
    pub trial: u64,
    pub q: u32,
    pub d: usize,
    pub k: Option<usize>,
    pub target_size: usize,
    /// Generator seed; empty for exhaustive and fixed sets.
    pub seed: Option<u64>,
    pub set_size: usize,
    pub direction_count: usize,
    pub ambient_directions: u64,
    pub diff_size: usize,
    pub bound_ii: f64,
    pub bound_iii: f64,
    pub bound_diff: f64,
    pub ratio_ii: f64,
    pub ratio_iii: f64,
    pub ratio_diff: f64,
    pub salem_constant: f64,
    pub salem_at_threshold: bool,
    pub full_coverage: bool,
    pub quotient_bound_holds: bool,
    pub mu_identities_hold: bool,
    pub fourth_moment_defect: f64,
    /// Ordered pairs `x ≠ y` of `E` with `x_1 = y_1`.
    pub first_coordinate_pairs: u64,
    pub above_threshold: Option<bool>,
    pub nu_lower_bound: Option<f64>,
    pub min_nu: Option<u64>,
    pub nu_all_positive: Option<bool>,
    pub slope_coverage: Option<bool>,
    pub min_remainder: Option<f64>,
    pub literal_subset_holds: Option<bool>,
    /// Violated hard claims, `;`-separated.
    pub hard_failures: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub claim: &'static str,
    pub cell: usize,
    pub trial: u64,
    pub seed: Option<u64>,
    pub detail: String,
    /// The offending set in `.fset` form.
    pub fset: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observation {
    pub claim: &'static str,
    pub cell: Option<usize>,
    pub trial: Option<u64>,
    pub detail: String,
    pub fset: Option<String>,
}

/// Per-cell aggregate over all trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    #[serde(flatten)]
    pub cell: Cell,
    pub exhaustive: bool,
    pub trials: u64,
    pub min_direction_count: usize,
    pub max_direction_count: usize,
    pub mean_direction_count: f64,
    pub min_ratio_ii: f64,
    pub max_ratio_ii: f64,
    pub mean_ratio_ii: f64,
    pub min_ratio_iii: f64,
    pub max_ratio_iii: f64,
    pub mean_ratio_iii: f64,
    pub min_ratio_diff: f64,
    pub max_ratio_diff: f64,
    pub mean_ratio_diff: f64,
    pub min_salem_constant: f64,
    pub max_salem_constant: f64,
    /// Share of trials with Salem constant at most the threshold.
    pub salem_fraction: f64,
    pub hard_failures: usize,
    pub observations: usize,
}

/// Mean ratios of one `(d, k, size rule)` family, in increasing `q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSequence {
    pub d: usize,
    pub k: usize,
    pub q: Vec<u32>,
    pub set_size: Vec<usize>,
    pub mean_ratio_ii: Vec<f64>,
    pub mean_ratio_iii: Vec<f64>,
    pub decreasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignResult {
    pub config: CampaignConfig,
    pub cells: Vec<CellSummary>,
    pub records: Vec<TrialRecord>,
    pub counterexamples: Vec<Counterexample>,
    pub observations: Vec<Observation>,
    pub sequences: Vec<RatioSequence>,
}

impl CampaignResult {
    /// No hard claim failed.
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn observations_of<'a>(&'a self, claim: &'a str) -> impl Iterator<Item = &'a Observation> {
        self.observations.iter().filter(move |o| o.claim == claim)
    }
}

/// Where a cell's sets come from.
pub(crate) enum Draws {
    /// Every subset of the target size, in lexicographic order.
    Exhaustive,
    /// `config.trials` sets from the generator, one seed per trial.
    Sampled(GeneratorSpec),
    Fixed(PointSet),
}

/// Extra per-trial hard check supplied by a campaign.
pub(crate) type CellCheck = dyn Fn(&Cell, &TrialRecord) -> Option<(&'static str, String)> + Sync;

pub(crate) struct Checks<'a> {
    pub incidence: Option<&'a dyn IncidenceMethod>,
    pub literal_subset: bool,
    pub ratio_floor: bool,
    pub extra: Option<&'a CellCheck>,
}

struct TrialOutcome {
    record: TrialRecord,
    counterexamples: Vec<Counterexample>,
    observations: Vec<Observation>,
}

const CHUNK: usize = 1 << 16;

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c·(n − i) is divisible by i + 1 at every step
        c = match c.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    c
}

/// Chooses exhaustive enumeration or sampling for one cell.
pub(crate) fn plan_draws(config: &CampaignConfig, cell: &Cell, spec: &GeneratorSpec) -> Result<Draws> {
    let size = (cell.q as u128).pow(cell.d as u32);
    if spec.params.contains("n") || spec.family == "random" || spec.family == "subspace-random" {
        let n = spec.params.get_or("n", cell.target_size)?;
        if n as u128 > size {
            return Err(Error::Config(format!(
                "set size {n} exceeds q^d = {size} in cell {}",
                cell.index
            )));
        }
    }
    let plain = spec.family == "random" && spec.params.iter().all(|(k, _)| k == "seed");
    let count = binomial(size, cell.target_size as u128);
    match config.exhaustive {
        ExhaustiveMode::Never => Ok(Draws::Sampled(spec.clone())),
        ExhaustiveMode::Auto if plain && count <= EXHAUSTIVE_LIMIT => Ok(Draws::Exhaustive),
        ExhaustiveMode::Auto => Ok(Draws::Sampled(spec.clone())),
        ExhaustiveMode::Always if !plain => Err(Error::Config(format!(
            "exhaustive enumeration needs the plain `random` generator, not `{spec}`"
        ))),
        ExhaustiveMode::Always if count > EXHAUSTIVE_LIMIT => Err(Error::Config(format!(
            "cell {} has {count} subsets, above the exhaustive limit {EXHAUSTIVE_LIMIT}",
            cell.index
        ))),
        ExhaustiveMode::Always => Ok(Draws::Exhaustive),
    }
}

/// Generator parameters for one sampled trial.
fn trial_params(spec: &GeneratorSpec, cell: &Cell, seed: u64) -> GeneratorSpec {
    let mut spec = spec.clone();
    let p = &mut spec.params;
    p.set("q", cell.q).set("d", cell.d).set("seed", seed);
    if !p.contains("n") {
        p.set("n", cell.target_size);
    }
    if let (false, Some(k)) = (p.contains("k"), cell.k) {
        p.set("k", k);
    }
    spec
}

/// Runs every cell and assembles the ordered result.
pub(crate) fn run_cells(
    config: &CampaignConfig,
    cells: Vec<(Cell, Draws)>,
    checks: &Checks<'_>,
) -> Result<CampaignResult> {
    let mut result = CampaignResult {
        config: config.clone(),
        cells: Vec::with_capacity(cells.len()),
        records: Vec::new(),
        counterexamples: Vec::new(),
        observations: Vec::new(),
        sequences: Vec::new(),
    };
    for (cell, draws) in cells {
        let exhaustive = matches!(draws, Draws::Exhaustive);
        let outcomes = run_cell(config, &cell, &draws, checks)?;
        let summary = summarize(config, &cell, exhaustive, &outcomes);
        result.cells.push(summary);
        for o in outcomes {
            result.records.push(o.record);
            result.counterexamples.extend(o.counterexamples);
            result.observations.extend(o.observations);
        }
    }
    Ok(result)
}

fn run_cell(
    config: &CampaignConfig,
    cell: &Cell,
    draws: &Draws,
    checks: &Checks<'_>,
) -> Result<Vec<TrialOutcome>> {
    let space = Space::of(cell.q, cell.d)?;
    match draws {
        Draws::Fixed(set) => Ok(vec![evaluate(set, config, cell, 0, None, checks)?]),
        Draws::Sampled(spec) => (0..config.trials as u64)
            .into_par_iter()
            .map(|trial| {
                let seed = trial_seed(config.seed, cell.index as u64, trial);
                let set = trial_params(spec, cell, seed).generate()?;
                evaluate(&set, config, cell, trial, Some(seed), checks)
            })
            .collect(),
        Draws::Exhaustive => {
            let mut out = Vec::new();
            let mut combos = Combinations::new(space.size(), cell.target_size);
            loop {
                let chunk: Vec<Vec<usize>> = combos.by_ref().take(CHUNK).collect();
                if chunk.is_empty() {
                    break;
                }
                let base = out.len() as u64;
                let evaluated: Vec<TrialOutcome> = chunk
                    .into_par_iter()
                    .enumerate()
                    .map(|(i, idx)| {
                        let set = PointSet::from_indices(space, idx)?;
                        evaluate(&set, config, cell, base + i as u64, None, checks)
                    })
                    .collect::<Result<_>>()?;
                out.extend(evaluated);
            }
            Ok(out)
        }
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

fn evaluate(
    set: &PointSet,
    config: &CampaignConfig,
    cell: &Cell,
    trial: u64,
    seed: Option<u64>,
    checks: &Checks<'_>,
) -> Result<TrialOutcome> {
    let space = set.space();
    let q = space.q();
    let d = space.dim();
    let n = set.len() as u64;
    let spectrum = forward_transform(&set.indicator());
    let profile = difference_profile(set);
    let directions = direction_set(set);
    let bounds = difference_bound_check_with(set, &spectrum, &profile, &directions);
    let ambient = ambient_direction_count(q, d);
    let full_coverage = directions.len() as u64 == ambient;
    let first_coordinate_pairs: u64 = profile.mu()[1..space.stride(0)].iter().sum();

    let mut hard: Vec<(&'static str, String)> = Vec::new();
    let mut soft: Vec<(&'static str, String)> = Vec::new();
    if !bounds.mu_identities_hold {
        hard.push((claims::DIFFERENCE_IDENTITIES, format!("sum of mu = {}", profile.total())));
    }
    if !bounds.quotient_bound_holds {
        hard.push((
            claims::QUOTIENT_BOUND,
            format!("|D(E)| = {}, |E-E| = {}", directions.len(), bounds.diff_size),
        ));
    }
    if n > (q as u64).pow(d as u32 - 1) && !full_coverage {
        hard.push((
            claims::FULL_COVERAGE,
            format!("|D(E)| = {} of {ambient}", directions.len()),
        ));
    }

    let mut record = TrialRecord {
        cell: cell.index,
        trial,
        q,
        d,
        k: cell.k,
        target_size: cell.target_size,
        seed,
        set_size: set.len(),
        direction_count: directions.len(),
        ambient_directions: ambient,
        diff_size: bounds.diff_size,
        bound_ii: bounds.bound_ii,
        bound_iii: bounds.bound_iii,
        bound_diff: bounds.bound_diff,
        ratio_ii: bounds.ratio_ii,
        ratio_iii: bounds.ratio_iii,
        ratio_diff: bounds.ratio_diff,
        salem_constant: bounds.salem_constant,
        salem_at_threshold: bounds.salem_constant <= config.salem_threshold,
        full_coverage,
        quotient_bound_holds: bounds.quotient_bound_holds,
        mu_identities_hold: bounds.mu_identities_hold,
        fourth_moment_defect: bounds.fourth_moment_defect,
        first_coordinate_pairs,
        above_threshold: None,
        nu_lower_bound: None,
        min_nu: None,
        nu_all_positive: None,
        slope_coverage: None,
        min_remainder: None,
        literal_subset_holds: None,
        hard_failures: String::new(),
    };

    if let (Some(method), Some(k)) = (checks.incidence, cell.k) {
        let analyzer = IncidenceAnalyzer::with_spectrum(set, spectrum);
        match theorem_main_threshold(&analyzer, k, method) {
            Err(Error::Numerical(msg)) => hard.push((claims::ROUNDING_GUARD, msg)),
            Err(e) => return Err(e),
            Ok(r) => {
                let above = r.above_threshold;
                if above && !r.holds {
                    let slopes: Vec<String> = r.witness_failures.iter().map(|t| t.to_string()).collect();
                    hard.push((claims::NU_THRESHOLD, format!("failing slopes {}", slopes.join(" "))));
                }
                if r.min_remainder < REMAINDER_FLOOR {
                    hard.push((
                        claims::REMAINDER_FLOOR,
                        format!("min R(t) = {}", format_real(r.min_remainder)),
                    ));
                }
                let nondegenerate: u64 = r.slopes.iter().map(|s| s.nu_nondegenerate).sum();
                if nondegenerate + first_coordinate_pairs != n * n.saturating_sub(1) {
                    hard.push((
                        claims::PAIR_PARTITION,
                        format!("{nondegenerate} + {first_coordinate_pairs} != {}", n * n.saturating_sub(1)),
                    ));
                }
                if above && !r.slope_coverage() {
                    let slopes: Vec<String> = r.uncovered_slopes.iter().map(|t| t.to_string()).collect();
                    soft.push((claims::SLOPE_COVERAGE, format!("uncovered slopes {}", slopes.join(" "))));
                }
                record.above_threshold = Some(above);
                record.nu_lower_bound = Some(*r.lower_bound.numer() as f64 / *r.lower_bound.denom() as f64);
                record.min_nu = r.slopes.iter().map(|s| s.nu).min();
                record.nu_all_positive = Some(r.slopes.iter().all(|s| s.nu > 0));
                record.slope_coverage = Some(r.slope_coverage());
                record.min_remainder = Some(r.min_remainder);
            }
        }
    }

    if let (true, Some(k)) = (checks.literal_subset, cell.k) {
        if k + 1 <= d {
            let target = coordinate_subspace_directions(space, k + 1)?;
            let holds = target.is_subset(&directions);
            record.literal_subset_holds = Some(holds);
            if !holds && n > (q as u64).pow(k as u32) {
                let missing = target.difference(&directions);
                soft.push((
                    claims::LITERAL_SUBSET,
                    format!("{} directions of H_{} missing, first {}", missing.len(), k + 1, missing[0]),
                ));
            }
        }
    }

    if checks.ratio_floor && (bounds.ratio_ii < config.ratio_floor || bounds.ratio_diff < config.ratio_floor) {
        soft.push((
            claims::RATIO_FLOOR,
            format!(
                "ratio_ii = {}, ratio_diff = {}, floor {}",
                format_real(bounds.ratio_ii),
                format_real(bounds.ratio_diff),
                format_real(config.ratio_floor)
            ),
        ));
    }

    if let Some(extra) = checks.extra {
        if let Some(failure) = extra(cell, &record) {
            hard.push(failure);
        }
    }

    record.hard_failures = hard.iter().map(|(c, _)| *c).collect::<Vec<_>>().join(";");
    let fset = (!hard.is_empty() || !soft.is_empty()).then(|| to_fset_string(set));
    let counterexamples = hard
        .into_iter()
        .map(|(claim, detail)| Counterexample {
            claim,
            cell: cell.index,
            trial,
            seed,
            detail,
            fset: fset.clone().unwrap_or_default(),
        })
        .collect();
    let observations = soft
        .into_iter()
        .map(|(claim, detail)| Observation {
            claim,
            cell: Some(cell.index),
            trial: Some(trial),
            detail,
            fset: fset.clone(),
        })
        .collect();
    Ok(TrialOutcome {
        record,
        counterexamples,
        observations,
    })
}

fn summarize(config: &CampaignConfig, cell: &Cell, exhaustive: bool, outcomes: &[TrialOutcome]) -> CellSummary {
    let records: Vec<&TrialRecord> = outcomes.iter().map(|o| &o.record).collect();
    let count = records.len();
    let stats = |f: &dyn Fn(&TrialRecord) -> f64| -> (f64, f64, f64) {
        if count == 0 {
            return (0.0, 0.0, 0.0);
        }
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for r in &records {
            let v = f(r);
            lo = lo.min(v);
            hi = hi.max(v);
            sum += v;
        }
        (lo, hi, sum / count as f64)
    };
    let (min_dc, max_dc, mean_dc) = stats(&|r| r.direction_count as f64);
    let (min_ratio_ii, max_ratio_ii, mean_ratio_ii) = stats(&|r| r.ratio_ii);
    let (min_ratio_iii, max_ratio_iii, mean_ratio_iii) = stats(&|r| r.ratio_iii);
    let (min_ratio_diff, max_ratio_diff, mean_ratio_diff) = stats(&|r| r.ratio_diff);
    let (min_salem_constant, max_salem_constant, _) = stats(&|r| r.salem_constant);
    let (_, _, salem_fraction) = stats(&|r| f64::from(u8::from(r.salem_constant <= config.salem_threshold)));
    CellSummary {
        cell: cell.clone(),
        exhaustive,
        trials: count as u64,
        min_direction_count: min_dc as usize,
        max_direction_count: max_dc as usize,
        mean_direction_count: mean_dc,
        min_ratio_ii,
        max_ratio_ii,
        mean_ratio_ii,
        min_ratio_iii,
        max_ratio_iii,
        mean_ratio_iii,
        min_ratio_diff,
        max_ratio_diff,
        mean_ratio_diff,
        min_salem_constant,
        max_salem_constant,
        salem_fraction,
        hard_failures: outcomes.iter().map(|o| o.counterexamples.len()).sum(),
        observations: outcomes.iter().map(|o| o.observations.len()).sum(),
    }
}
