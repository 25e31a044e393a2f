//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Oracles here are written independently of the library
//! (literal pair loops, hash-set direction counts).

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fq_directions::directions::PointSet;
use fq_directions::harness::{
    render_report, run_campaign, sharpness_suite, verify_non_salem, verify_salem_bounds,
    verify_theorem_main, CampaignConfig, CampaignResult, ExhaustiveMode, ReportFormat, SizePolicy,
};
use fq_directions::incidence::{IncidenceAnalyzer, SlopeTuple};
use fq_directions::rng::SampleRng;
use fq_directions::salem::{
    difference_bound_check, difference_profile, gen_affine_subspace, gen_coordinate_subspace,
    gen_embedded, gen_paraboloid, gen_random, gen_subspace_random,
};
use fq_directions::spectral::{forward_transform, plancherel_defect, GridFunction};
use fq_directions::{FieldModulus, Point, Space};
use num_complex::Complex64;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn inv(a: u64, q: u64) -> u64 {
    // Fermat: a^(q-2)
    let (mut base, mut exp, mut acc) = (a % q, q - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        exp >>= 1;
    }
    acc
}

fn points(e: &PointSet) -> Vec<Vec<u64>> {
    e.points().map(|p| p.coords().iter().map(|&c| c as u64).collect()).collect()
}

fn diff(x: &[u64], y: &[u64], q: u64) -> Vec<u64> {
    x.iter().zip(y).map(|(a, b)| (a + q - b) % q).collect()
}

/// Directions of nonzero differences, normalized by the first nonzero entry.
fn oracle_directions(e: &PointSet) -> usize {
    let q = e.space().q() as u64;
    let pts = points(e);
    let mut seen = HashSet::new();
    for x in &pts {
        for y in &pts {
            let z = diff(x, y, q);
            if let Some(&lead) = z.iter().find(|&&c| c != 0) {
                let s = inv(lead, q);
                seen.insert(z.iter().map(|c| c * s % q).collect::<Vec<_>>());
            }
        }
    }
    seen.len()
}

/// `|{(x, y) ∈ E², x ≠ y : z_{i+1} = t_i z_1}|` by the literal definition.
fn oracle_nu(pts: &[Vec<u64>], q: u64, t: &[u64]) -> u64 {
    let mut count = 0;
    for (i, x) in pts.iter().enumerate() {
        for (j, y) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let z = diff(x, y, q);
            if t.iter().enumerate().all(|(a, &ta)| z[a + 1] == ta * z[0] % q) {
                count += 1;
            }
        }
    }
    count
}

/// `μ` as a map from difference vectors to pair counts.
fn oracle_mu(e: &PointSet) -> std::collections::HashMap<Vec<u64>, u64> {
    let q = e.space().q() as u64;
    let pts = points(e);
    let mut mu = std::collections::HashMap::new();
    for x in &pts {
        for y in &pts {
            *mu.entry(diff(x, y, q)).or_insert(0) += 1;
        }
    }
    mu
}

fn ambient(q: u64, d: u32) -> u64 {
    (q.pow(d) - 1) / (q - 1)
}

fn all_slopes(q: u64, k: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| (0..q).map(move |v| [t.clone(), vec![v]].concat()))
            .collect();
    }
    out
}

fn replay_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-replay");
    std::fs::create_dir_all(&dir).expect("replay dir");
    dir
}

fn hard_failures(r: &CampaignResult) -> Result<(), String> {
    ensure(r.passed(), || {
        let c = &r.counterexamples[0];
        format!("{} counterexamples, first {} in cell {}: {}", r.counterexamples.len(), c.claim, c.cell, c.detail)
    })
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut config = CampaignConfig::new("theorem-main", vec![3], vec![2]);
    config.k_list = vec![1];
    config.exhaustive = ExhaustiveMode::Always;
    let r = verify_theorem_main(&config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    hard_failures(&r)?;
    ensure(r.records.len() == 126, || format!("{} sets enumerated", r.records.len()))?;
    let space = Space::of(3, 2).unwrap();
    let mut distinct = HashSet::new();
    for rec in &r.records {
        ensure(rec.set_size == 4 && rec.direction_count == 4 && rec.nu_all_positive == Some(true), || {
            format!("trial {} determines {} directions", rec.trial, rec.direction_count)
        })?;
        distinct.insert(rec.trial);
    }
    // independent sweep over every 4-subset of F_3^2
    let mut full = 0;
    for mask in 0u32..(1 << 9) {
        if mask.count_ones() == 4 {
            let e = PointSet::from_indices(space, (0..9).filter(|i| mask >> i & 1 == 1)).unwrap();
            full += usize::from(oracle_directions(&e) == 4);
        }
    }
    ensure(full == 126 && distinct.len() == 126, || format!("oracle: {full} of 126 sets determine all 4"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("runtime {elapsed:?}"))?;
    Ok(format!("126/126 sets determine all 4 directions in {:.2?}", elapsed))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (q, d, k) in [(5u32, 2usize, 1usize), (7, 2, 1), (5, 3, 1), (5, 3, 2), (3, 4, 3)] {
        let mut config = CampaignConfig::new("theorem-main", vec![q], vec![d]);
        config.k_list = vec![k];
        config.trials = 500;
        config.seed = 2024;
        config.exhaustive = ExhaustiveMode::Never;
        let r = verify_theorem_main(&config).map_err(|e| e.to_string())?;
        hard_failures(&r)?;
        ensure(r.records.len() == 500, || format!("({q},{d},{k}): {} trials", r.records.len()))?;
        let space = Space::of(q, d).unwrap();
        let qk = (q as u64).pow(k as u32);
        let n = qk + 1;
        // q^k·ν ≥ n(n−1) − n(q^k−1) > 0
        let scaled_bound = (n * (n - 1)) as i64 - (n * (qk - 1)) as i64;
        ensure(scaled_bound > 0, || "bound not positive".into())?;
        let slopes = all_slopes(q as u64, k);
        for rec in &r.records {
            let e = gen_random(space, n as usize, rec.seed.unwrap()).unwrap();
            let pts = points(&e);
            let min_nu = slopes.iter().map(|t| oracle_nu(&pts, q as u64, t)).min().unwrap();
            ensure(rec.min_nu == Some(min_nu), || format!("({q},{d},{k}) trial {}: min ν {:?} vs oracle {min_nu}", rec.trial, rec.min_nu))?;
            ensure((min_nu * qk) as i64 >= scaled_bound, || {
                format!("({q},{d},{k}) trial {}: min ν {min_nu} below bound", rec.trial)
            })?;
            if k == d - 1 {
                let dirs = oracle_directions(&e) as u64;
                ensure(dirs == ambient(q as u64, d as u32) && rec.full_coverage, || {
                    format!("({q},{d},{k}) trial {}: {dirs} directions", rec.trial)
                })?;
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("runtime {elapsed:?}"))?;
    Ok(format!("{checked} sets, every slope above the bound, in {:.2?}", elapsed))
}

struct OracleStats {
    instances: usize,
    max_guard: f64,
    min_remainder: f64,
}

fn oracle_equivalence() -> Result<OracleStats, String> {
    let mut stats = OracleStats {
        instances: 0,
        max_guard: 0.0,
        min_remainder: f64::INFINITY,
    };
    for q in [3u32, 5, 7] {
        for d in [2usize, 3] {
            let space = Space::of(q, d).unwrap();
            for k in 1..d {
                let slopes: Vec<SlopeTuple> = SlopeTuple::all(space.modulus(), k).collect();
                for trial in 0..100u64 {
                    let mut rng = SampleRng::new(trial * 7919 + (q as u64) * 31 + d as u64);
                    let cap = space.size().min(3 * q as usize);
                    let n = rng.below(cap as u64 + 1) as usize;
                    let e = gen_random(space, n, rng.next_u64()).unwrap();
                    let pts = points(&e);
                    let a = IncidenceAnalyzer::new(&e);
                    for t in &slopes {
                        let spectral = a.nu_spectral(t).map_err(|e| e.to_string())?;
                        let brute = a.nu_brute(t).map_err(|e| e.to_string())?;
                        let entries: Vec<u64> = t.entries().iter().map(|&v| v as u64).collect();
                        let oracle = oracle_nu(&pts, q as u64, &entries);
                        ensure(spectral.nu == brute.nu && brute.nu == oracle, || {
                            format!("q={q} d={d} k={k} t={t} |E|={n}: spectral {} brute {} oracle {oracle}", spectral.nu, brute.nu)
                        })?;
                        ensure(spectral.nu_nondegenerate == brute.nu_nondegenerate, || {
                            format!("q={q} d={d} k={k} t={t}: nondegenerate counts differ")
                        })?;
                        let n = n as f64;
                        let qk = (q as f64).powi(k as i32);
                        let raw = n * (n - 1.0) / qk - n * (qk - 1.0) / qk + spectral.remainder;
                        stats.max_guard = stats.max_guard.max((raw - raw.round()).abs());
                        stats.min_remainder = stats.min_remainder.min(spectral.remainder);
                        stats.instances += 1;
                    }
                }
            }
        }
    }
    Ok(stats)
}

fn criterion_3(stats: &Result<OracleStats, String>) -> Outcome {
    let s = stats.as_ref().map_err(Clone::clone)?;
    ensure(s.max_guard < 1e-4, || format!("guard deviation {:e}", s.max_guard))?;
    Ok(format!("{} (set, t) instances exact, max |float - round| = {:.1e}", s.instances, s.max_guard))
}

fn criterion_4(stats: &Result<OracleStats, String>) -> Outcome {
    let s = stats.as_ref().map_err(Clone::clone)?;
    ensure(s.min_remainder >= -1e-6, || format!("min R = {:e}", s.min_remainder))?;
    Ok(format!("min R(t) = {:.3e} over {} instances", s.min_remainder, s.instances))
}

fn criterion_5() -> Outcome {
    let mut worst_plancherel: f64 = 0.0;
    let mut worst_mu_hat: f64 = 0.0;
    let mut worst_energy: f64 = 0.0;
    let mut cases = 0;
    for q in [3u32, 5, 7] {
        for d in [2usize, 3] {
            let space = Space::of(q, d).unwrap();
            let qd = space.size() as f64;
            for seed in 0..200u64 {
                let mut rng = SampleRng::new(seed ^ ((q as u64) << 40) ^ ((d as u64) << 48));
                let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
                let values: Vec<Complex64> = (0..space.size()).map(|_| Complex64::new(unit(), unit())).collect();
                let f = GridFunction::from_values(space, values).unwrap();
                let norm = f.l2_norm_sq() / qd;
                let defect = plancherel_defect(&f);
                ensure(defect < 1e-9 * norm, || format!("q={q} d={d} seed={seed}: Plancherel defect {defect:e}"))?;
                worst_plancherel = worst_plancherel.max(defect / norm);

                let n = 1 + rng.below(space.size() as u64) as usize;
                let e = gen_random(space, n, rng.next_u64()).unwrap();
                let ehat = forward_transform(&e.indicator());
                let mu = difference_profile(&e);
                let mu_hat = forward_transform(&mu.as_grid_function());
                let n2 = (n * n) as f64;
                for (m, v) in mu_hat.values().iter().enumerate() {
                    let expected = qd * ehat.values()[m].norm_sqr();
                    let err = (v - Complex64::new(expected, 0.0)).norm();
                    ensure(err <= 1e-6 * n2, || format!("q={q} d={d} seed={seed} m={m}: mu-hat error {err:e}"))?;
                    worst_mu_hat = worst_mu_hat.max(err / n2);
                }
                let energy: f64 = mu.mu().iter().map(|&c| (c * c) as f64).sum();
                let fourth: f64 = ehat.values().iter().map(|v| v.norm_sqr().powi(2)).sum();
                let rel = (energy - qd.powi(3) * fourth).abs() / energy;
                ensure(rel <= 1e-6, || format!("q={q} d={d} seed={seed}: fourth moment relative error {rel:e}"))?;
                worst_energy = worst_energy.max(rel);
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{cases} cases; worst relative errors: Plancherel {worst_plancherel:.1e}, mu-hat {worst_mu_hat:.1e}, fourth moment {worst_energy:.1e}"
    ))
}

fn generator_corpus() -> Vec<(String, PointSet)> {
    let mut out = Vec::new();
    for q in [3u32, 5, 7] {
        for d in [2usize, 3] {
            let space = Space::of(q, d).unwrap();
            let modulus = FieldModulus::new(q).unwrap();
            for seed in 0..10u64 {
                let n = (seed as usize * 3 + 1).min(space.size());
                out.push((format!("random q={q} d={d} seed={seed}"), gen_random(space, n, seed).unwrap()));
            }
            for k in 0..=d {
                out.push((format!("subspace q={q} d={d} k={k}"), gen_coordinate_subspace(space, k).unwrap()));
                let shift = Point::reduced(modulus, &vec![1; d]);
                out.push((format!("affine q={q} d={d} k={k}"), gen_affine_subspace(space, k, &shift).unwrap()));
            }
            out.push((format!("paraboloid q={q} d={d}"), gen_paraboloid(space).unwrap()));
            for k in 1..=d {
                let n = (q as usize).pow(k as u32).min(2 * q as usize);
                out.push((format!("subspace-random q={q} d={d} k={k}"), gen_subspace_random(space, k, n, 5).unwrap()));
            }
            if d == 3 {
                let low = gen_random(Space::of(q, 2).unwrap(), q as usize, 9).unwrap();
                out.push((format!("embedded q={q} d=3"), gen_embedded(&low, 3).unwrap()));
            }
        }
    }
    out
}

fn criterion_6() -> Outcome {
    let corpus = generator_corpus();
    for (label, e) in &corpus {
        let n = e.len() as u64;
        let q = e.space().q() as u64;
        let d = e.space().dim();
        let oracle = oracle_mu(e);
        let profile = difference_profile(e);
        let total: u64 = oracle.values().sum();
        let zero = oracle.get(&vec![0; d]).copied().unwrap_or(0);
        ensure(total == n * n && zero == n, || format!("{label}: sum {total}, mu(0) {zero}"))?;
        ensure(profile.total() == total && profile.at(0) == zero, || format!("{label}: library profile disagrees"))?;
        for (z, &c) in &oracle {
            let neg: Vec<u64> = z.iter().map(|v| (q - v) % q).collect();
            ensure(oracle.get(&neg) == Some(&c), || format!("{label}: mu not symmetric at {z:?}"))?;
        }
        ensure(profile.support_size() == oracle.len(), || format!("{label}: |E-E| disagrees"))?;
        let dirs = oracle_directions(e) as u64;
        let nonzero_diffs = oracle.len() as u64 - u64::from(n > 0);
        ensure(dirs * (q - 1) >= nonzero_diffs, || format!("{label}: {dirs} directions, {nonzero_diffs} nonzero differences"))?;
        let rec = difference_bound_check(e);
        ensure(rec.direction_count as u64 == dirs && rec.quotient_bound_holds && rec.mu_identities_hold, || {
            format!("{label}: library bound record disagrees")
        })?;
    }
    Ok(format!("{} sets from all six generator families", corpus.len()))
}

fn criterion_7() -> Outcome {
    let mut lines = Vec::new();
    for q in [3u32, 5, 7] {
        for d in [2usize, 3] {
            let r = sharpness_suite(q, d).map_err(|e| e.to_string())?;
            hard_failures(&r)?;
            let space = Space::of(q, d).unwrap();
            for k in 1..d {
                let rec = r.records.iter().find(|x| x.k == Some(k)).ok_or("missing k")?;
                let own = ambient(q as u64, k as u32);
                let next = ambient(q as u64, k as u32 + 1);
                let hk = gen_coordinate_subspace(space, k).unwrap();
                let hk1 = gen_coordinate_subspace(space, k + 1).unwrap();
                let (a, b) = (oracle_directions(&hk) as u64, oracle_directions(&hk1) as u64);
                ensure(hk.len() as u64 == (q as u64).pow(k as u32), || format!("q={q} d={d} k={k}: |H_k| = {}", hk.len()))?;
                ensure(a == own && b == next && a < b && rec.direction_count as u64 == own, || {
                    format!("q={q} d={d} k={k}: |D(H_k)| = {a}, |D(H_k+1)| = {b}")
                })?;
                lines.push(format!("{q}/{d}/{k}:{a}<{b}"));
            }
        }
    }
    Ok(format!("(q/d/k: |D(H_k)| < |D(H_k+1)|) {}", lines.join(" ")))
}

fn criterion_8() -> Outcome {
    let mut config = CampaignConfig::new("non-salem", vec![5, 7, 11, 13], vec![4]);
    config.k_list = vec![1];
    config.trials = 50;
    config.seed = 8;
    let r = verify_non_salem(&config).map_err(|e| e.to_string())?;
    hard_failures(&r)?;
    let sizes: Vec<usize> = r.cells.iter().map(|c| c.cell.target_size).collect();
    ensure(sizes == vec![12, 19, 37, 47], || format!("sizes {sizes:?}"))?;
    for rec in &r.records {
        let space = Space::of(rec.q, 4).unwrap();
        let e = gen_subspace_random(space, 2, rec.target_size, rec.seed.unwrap()).unwrap();
        ensure(e.points().all(|p| p.coords()[2..].iter().all(|&c| c == 0)), || "set leaves H_2".into())?;
        let dirs = oracle_directions(&e) as u64;
        let q = rec.q as u64;
        ensure(dirs == rec.direction_count as u64 && dirs <= q + 1, || format!("q={q}: {dirs} directions"))?;
    }
    let seq = r.sequences.first().ok_or("no ratio sequence recorded")?;
    ensure(seq.decreasing, || format!("ratios not decreasing: {:?} {:?}", seq.mean_ratio_ii, seq.mean_ratio_iii))?;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" > ");
    Ok(format!(
        "|D|/min(|E|^2/q, q^3): {}; |D|/|E|: {}",
        fmt(&seq.mean_ratio_ii),
        fmt(&seq.mean_ratio_iii)
    ))
}

fn criterion_9() -> Outcome {
    let mut config = CampaignConfig::new("salem-bounds", vec![7, 11, 13], vec![2]);
    config.size_policy = Some(SizePolicy::QMultiples(vec![0.5, 1.0, 2.0]));
    config.trials = 200;
    config.seed = 9;
    config.exhaustive = ExhaustiveMode::Never;
    let r = verify_salem_bounds(&config).map_err(|e| e.to_string())?;
    hard_failures(&r)?;
    let dir = replay_dir();
    for (i, o) in r.observations.iter().enumerate() {
        if let Some(fset) = &o.fset {
            std::fs::write(dir.join(format!("{}-{i}.fset", o.claim)), fset).expect("replay file");
        }
    }
    let min_ii = r.cells.iter().map(|c| c.min_ratio_ii).fold(f64::INFINITY, f64::min);
    let min_diff = r.cells.iter().map(|c| c.min_ratio_diff).fold(f64::INFINITY, f64::min);
    ensure(min_ii > 0.25 && min_diff > 0.25, || {
        format!("min ratios {min_ii:.4} / {min_diff:.4}; replay files in {}", dir.display())
    })?;
    let per_cell: Vec<String> = r
        .cells
        .iter()
        .map(|c| format!("q={} |E|={}: {:.3}/{:.3}", c.cell.q, c.cell.target_size, c.min_ratio_ii, c.min_ratio_diff))
        .collect();
    Ok(format!("min |D| ratio {min_ii:.4}, min |E-E| ratio {min_diff:.4} ({})", per_cell.join(", ")))
}

fn criterion_10() -> Outcome {
    let mut configs = Vec::new();
    let mut c = CampaignConfig::new("theorem-main", vec![3, 5], vec![2, 3]);
    c.trials = 40;
    c.seed = 10;
    c.exhaustive = ExhaustiveMode::Never;
    configs.push(c);
    configs.push(CampaignConfig::new("theorem-main", vec![3], vec![2]));
    let mut c = CampaignConfig::new("salem-bounds", vec![7], vec![2]);
    c.trials = 40;
    c.seed = 10;
    c.exhaustive = ExhaustiveMode::Never;
    configs.push(c);
    let mut c = CampaignConfig::new("non-salem", vec![5, 7], vec![3, 4]);
    c.trials = 10;
    configs.push(c);
    configs.push(CampaignConfig::new("sharpness", vec![3, 5], vec![2, 3]));
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut compared = 0;
    for config in &configs {
        let a = run_campaign(config).map_err(|e| e.to_string())?;
        let b = single.install(|| run_campaign(config)).map_err(|e| e.to_string())?;
        for format in [ReportFormat::Csv, ReportFormat::Json] {
            let (x, y) = (render_report(&a, format).unwrap(), render_report(&b, format).unwrap());
            ensure(x == y, || format!("{} {format} reports differ", config.campaign))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} report pairs byte-identical across runs and thread counts"))
}

fn run(label: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => {
            println!("PASS criterion {label} ({secs:.1}s): {detail}");
            true
        }
        Err(why) => {
            println!("FAIL criterion {label} ({secs:.1}s): {why}");
            false
        }
    }
}

fn main() -> ExitCode {
    let stats = catch_unwind(oracle_equivalence).unwrap_or_else(|_| Err("oracle sweep panicked".into()));
    let results = [
        run("1", criterion_1),
        run("2", criterion_2),
        run("3", || criterion_3(&stats)),
        run("4", || criterion_4(&stats)),
        run("5", criterion_5),
        run("6", criterion_6),
        run("7", criterion_7),
        run("8", criterion_8),
        run("9", criterion_9),
        run("10", criterion_10),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
