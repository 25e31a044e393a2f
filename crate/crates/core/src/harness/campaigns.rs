use std::collections::BTreeMap;
use std::sync::Arc;

use super::config::{CampaignConfig, ExhaustiveMode, SizePolicy};
use super::{
    claims, format_real, plan_draws, run_cells, Cell, CampaignResult, Checks, Draws, Observation,
    RatioSequence,
};
use crate::directions::ambient_direction_count;
use crate::error::{Error, Result};
use crate::incidence::incidence_methods;
use crate::registry::{Named, Registry};
use crate::salem::{gen_coordinate_subspace, GeneratorSpec};
use crate::space::Space;

pub trait Campaign: Named + Send + Sync {
    fn run(&self, config: &CampaignConfig) -> Result<CampaignResult>;
}

struct TheoremMain;
struct SalemBounds;
struct Sharpness;
struct NonSalem;

/// The configured `k` values inside `range`, or all of `range` when none are configured.
fn k_values(config: &CampaignConfig, range: std::ops::Range<usize>) -> Vec<usize> {
    if config.k_list.is_empty() {
        range.collect()
    } else {
        config.k_list.iter().copied().filter(|k| range.contains(k)).collect()
    }
}

/// `(q, d, k)` triples in configuration order, then sizes within each.
fn expand(
    config: &CampaignConfig,
    policy: &SizePolicy,
    ks: impl Fn(usize) -> Vec<Option<usize>>,
) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for &q in &config.q_list {
        for &d in &config.d_list {
            for k in ks(d) {
                for target_size in policy.sizes(q, k)? {
                    cells.push(Cell {
                        index: cells.len(),
                        q,
                        d,
                        k,
                        target_size,
                    });
                }
            }
        }
    }
    Ok(cells)
}

fn plan_all(config: &CampaignConfig, cells: Vec<Cell>, spec: &GeneratorSpec) -> Result<Vec<(Cell, Draws)>> {
    cells
        .into_iter()
        .map(|c| {
            let draws = plan_draws(config, &c, spec)?;
            Ok((c, draws))
        })
        .collect()
}

fn named(config: &CampaignConfig, name: &str) -> Result<CampaignConfig> {
    config.validate()?;
    let mut config = config.clone();
    config.campaign = name.into();
    Ok(config)
}

impl Named for TheoremMain {
    fn name(&self) -> &'static str {
        "theorem-main"
    }
    fn summary(&self) -> &'static str {
        "sets above q^k: slope counts, full coverage at k = d-1, H_{k+1} subset"
    }
}

impl Campaign for TheoremMain {
    fn run(&self, config: &CampaignConfig) -> Result<CampaignResult> {
        let config = named(config, self.name())?;
        let policy = config.size_policy.clone().unwrap_or(SizePolicy::AboveQk(vec![1]));
        let cells = expand(&config, &policy, |d| {
            k_values(&config, 1..d).into_iter().map(Some).collect()
        })?;
        let method = incidence_methods().get(&config.incidence_method)?;
        let draws = plan_all(&config, cells, &config.generator_spec()?)?;
        run_cells(
            &config,
            draws,
            &Checks {
                incidence: Some(method.as_ref()),
                literal_subset: true,
                ratio_floor: false,
                extra: None,
            },
        )
    }
}

impl Named for SalemBounds {
    fn name(&self) -> &'static str {
        "salem-bounds"
    }
    fn summary(&self) -> &'static str {
        "direction and difference-set ratios, quotient bound, difference identities"
    }
}

impl Campaign for SalemBounds {
    fn run(&self, config: &CampaignConfig) -> Result<CampaignResult> {
        let config = named(config, self.name())?;
        let policy = config
            .size_policy
            .clone()
            .unwrap_or(SizePolicy::QMultiples(vec![0.5, 1.0, 2.0]));
        let cells = expand(&config, &policy, |d| {
            if policy.uses_k() {
                k_values(&config, 1..d).into_iter().map(Some).collect()
            } else {
                vec![None]
            }
        })?;
        let draws = plan_all(&config, cells, &config.generator_spec()?)?;
        let mut result = run_cells(
            &config,
            draws,
            &Checks {
                incidence: None,
                literal_subset: false,
                ratio_floor: true,
                extra: None,
            },
        )?;
        monotonicity_probe(&mut result);
        Ok(result)
    }
}

/// Flags cells whose mean `|D(E)|` drops below that of a smaller size in
/// the same `(q, d, k)`.
fn monotonicity_probe(result: &mut CampaignResult) {
    let mut groups: BTreeMap<(u32, usize, Option<usize>), Vec<(usize, f64, usize)>> = BTreeMap::new();
    for s in &result.cells {
        groups
            .entry((s.cell.q, s.cell.d, s.cell.k))
            .or_default()
            .push((s.cell.target_size, s.mean_direction_count, s.cell.index));
    }
    for mut group in groups.into_values() {
        group.sort_by_key(|&(size, _, index)| (size, index));
        for w in group.windows(2) {
            let ((small, low_mean, _), (large, high_mean, cell)) = (w[0], w[1]);
            if large > small && high_mean < low_mean {
                result.observations.push(Observation {
                    claim: claims::MONOTONICITY,
                    cell: Some(cell),
                    trial: None,
                    detail: format!(
                        "mean |D(E)| {} at |E| = {large} below {} at |E| = {small}",
                        format_real(high_mean),
                        format_real(low_mean)
                    ),
                    fset: None,
                });
            }
        }
    }
}

impl Named for Sharpness {
    fn name(&self) -> &'static str {
        "sharpness"
    }
    fn summary(&self) -> &'static str {
        "the subspace H_k determines (q^k-1)/(q-1) directions, fewer than H_{k+1}"
    }
}

impl Campaign for Sharpness {
    fn run(&self, config: &CampaignConfig) -> Result<CampaignResult> {
        let config = named(config, self.name())?;
        let mut cells = Vec::new();
        for &q in &config.q_list {
            for &d in &config.d_list {
                let space = Space::of(q, d)?;
                for k in k_values(&config, 1..d) {
                    let cell = Cell {
                        index: cells.len(),
                        q,
                        d,
                        k: Some(k),
                        target_size: (q as usize).pow(k as u32),
                    };
                    cells.push((cell, Draws::Fixed(gen_coordinate_subspace(space, k)?)));
                }
            }
        }
        let method = incidence_methods().get(&config.incidence_method)?;
        let check = |cell: &Cell, r: &super::TrialRecord| {
            let k = cell.k?;
            let own = ambient_direction_count(cell.q, k);
            let next = ambient_direction_count(cell.q, k + 1);
            let ok = r.set_size == cell.target_size && r.direction_count as u64 == own && own < next;
            (!ok).then(|| {
                (
                    claims::SHARPNESS,
                    format!("|E| = {}, |D(E)| = {}, expected {own} < {next}", r.set_size, r.direction_count),
                )
            })
        };
        run_cells(
            &config,
            cells,
            &Checks {
                incidence: Some(method.as_ref()),
                literal_subset: false,
                ratio_floor: false,
                extra: Some(&check),
            },
        )
    }
}

impl Named for NonSalem {
    fn name(&self) -> &'static str {
        "non-salem"
    }
    fn summary(&self) -> &'static str {
        "random sets inside H_{k+1}: few directions, ratios shrinking in q"
    }
}

impl Campaign for NonSalem {
    fn run(&self, config: &CampaignConfig) -> Result<CampaignResult> {
        let mut config = named(config, self.name())?;
        config.exhaustive = ExhaustiveMode::Never;
        let policy = config.size_policy.clone().unwrap_or(SizePolicy::KPowers(vec![0.5]));
        let cells = expand(&config, &policy, |d| {
            let ks = if config.k_list.is_empty() { vec![1] } else { config.k_list.clone() };
            ks.into_iter().filter(|&k| k + 1 < d).map(Some).collect()
        })?;
        let draws = cells
            .into_iter()
            .map(|cell| {
                let k = cell.k.expect("non-salem cells carry k");
                let spec: GeneratorSpec = format!("subspace-random:k={}", k + 1).parse()?;
                let draws = plan_draws(&config, &cell, &spec)?;
                Ok((cell, draws))
            })
            .collect::<Result<Vec<_>>>()?;
        let check = |cell: &Cell, r: &super::TrialRecord| {
            let cap = ambient_direction_count(cell.q, cell.k? + 1);
            (r.direction_count as u64 > cap)
                .then(|| (claims::SUBSPACE_CAP, format!("|D(E)| = {} > {cap}", r.direction_count)))
        };
        let mut result = run_cells(
            &config,
            draws,
            &Checks {
                incidence: None,
                literal_subset: false,
                ratio_floor: false,
                extra: Some(&check),
            },
        )?;
        ratio_sequences(&mut result, policy.len());
        Ok(result)
    }
}

/// Groups cells by `(d, k, size rule)` and orders them by `q`.
fn ratio_sequences(result: &mut CampaignResult, rules: usize) {
    let mut groups: BTreeMap<(usize, usize, usize), Vec<usize>> = BTreeMap::new();
    for (pos, s) in result.cells.iter().enumerate() {
        if let Some(k) = s.cell.k {
            let rule = s.cell.index % rules.max(1);
            groups.entry((s.cell.d, k, rule)).or_default().push(pos);
        }
    }
    for ((d, k, _), mut members) in groups {
        members.sort_by_key(|&pos| result.cells[pos].cell.q);
        let cells: Vec<_> = members.iter().map(|&p| &result.cells[p]).collect();
        let mean_ratio_ii: Vec<f64> = cells.iter().map(|c| c.mean_ratio_ii).collect();
        let mean_ratio_iii: Vec<f64> = cells.iter().map(|c| c.mean_ratio_iii).collect();
        let strictly_down = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
        let decreasing = strictly_down(&mean_ratio_ii) && strictly_down(&mean_ratio_iii);
        let seq = RatioSequence {
            d,
            k,
            q: cells.iter().map(|c| c.cell.q).collect(),
            set_size: cells.iter().map(|c| c.cell.target_size).collect(),
            mean_ratio_ii,
            mean_ratio_iii,
            decreasing,
        };
        if !decreasing {
            result.observations.push(Observation {
                claim: claims::RATIO_SEQUENCE,
                cell: None,
                trial: None,
                detail: format!("d = {d}, k = {k}, q = {:?}", seq.q),
                fset: None,
            });
        }
        result.sequences.push(seq);
    }
}

pub fn default_campaigns() -> Registry<dyn Campaign> {
    let mut reg: Registry<dyn Campaign> = Registry::new("campaign");
    reg.register(Arc::new(TheoremMain))
        .register(Arc::new(SalemBounds))
        .register(Arc::new(Sharpness))
        .register(Arc::new(NonSalem));
    reg
}

/// Runs the campaign named in `config.campaign`.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignResult> {
    default_campaigns().get(&config.campaign)?.run(config)
}

pub fn verify_theorem_main(config: &CampaignConfig) -> Result<CampaignResult> {
    TheoremMain.run(config)
}

pub fn verify_salem_bounds(config: &CampaignConfig) -> Result<CampaignResult> {
    SalemBounds.run(config)
}

pub fn verify_non_salem(config: &CampaignConfig) -> Result<CampaignResult> {
    NonSalem.run(config)
}

/// Every `k` in `1..d` for one `(q, d)`.
pub fn sharpness_suite(q: u32, d: usize) -> Result<CampaignResult> {
    if d < 2 {
        return Err(Error::domain(format!("sharpness needs d >= 2, got {d}")));
    }
    Sharpness.run(&CampaignConfig::new("sharpness", vec![q], vec![d]))
}
