//! The slope-incidence count
//!
//! ```text
//! ν_E(t) = #{(x, y) ∈ E × E : x ≠ y, x_{i+1} − y_{i+1} = t_i (x_1 − y_1), i = 1..k}
//! ```
//!
//! and its spectral decomposition `ν_E(t) = main − diagonal + R(t)` with
//! `main = |E|(|E|−1)/q^k`, `diagonal = |E|(q^k−1)/q^k` and
//!
//! ```text
//! R(t) = q^{2d−k} Σ_{s ∈ F_q^k, s ≠ 0} |Ê(s·t, −s_1, …, −s_k, 0, …, 0)|² ≥ 0.
//! ```
//!
//! Two counters implement [`IncidenceMethod`]: a literal pair enumeration and
//! the spectral formula. The spectral value is rounded to the nearest integer
//! and rejected if it lands more than [`ROUNDING_GUARD`] away from one.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::directions::PointSet;
use crate::error::{Error, Result};
use crate::field::FieldModulus;
use crate::registry::{Named, Registry};
use crate::spectral::{forward_transform, Spectrum};

/// Largest accepted distance between a spectral count and its rounding.
pub const ROUNDING_GUARD: f64 = 1e-4;

/// Slack allowed below zero when checking `R(t) ≥ 0` in floating point.
pub const REMAINDER_FLOOR: f64 = -1e-6;

/// `(t_1, …, t_k)` with entries reduced mod `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlopeTuple {
    modulus: FieldModulus,
    entries: Vec<u32>,
}

impl SlopeTuple {
    pub fn new(modulus: FieldModulus, entries: &[i64]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("a slope tuple needs k ≥ 1 entries"));
        }
        Ok(SlopeTuple {
            modulus,
            entries: entries.iter().map(|&t| modulus.reduce(t)).collect(),
        })
    }

    pub fn zero(modulus: FieldModulus, k: usize) -> Self {
        SlopeTuple {
            modulus,
            entries: vec![0; k],
        }
    }

    /// The tuple whose mixed-radix index (t_1 most significant) is `index`.
    pub fn from_index(modulus: FieldModulus, k: usize, mut index: usize) -> Self {
        let q = modulus.get() as usize;
        let mut entries = vec![0u32; k];
        for slot in entries.iter_mut().rev() {
            *slot = (index % q) as u32;
            index /= q;
        }
        SlopeTuple { modulus, entries }
    }

    /// All `q^k` tuples in mixed-radix order.
    pub fn all(modulus: FieldModulus, k: usize) -> impl Iterator<Item = SlopeTuple> {
        let count = (modulus.get() as usize).pow(k as u32);
        (0..count).map(move |i| SlopeTuple::from_index(modulus, k, i))
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn modulus(&self) -> FieldModulus {
        self.modulus
    }
}

impl fmt::Display for SlopeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|t| t.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for SlopeTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncidenceReport {
    pub slope: SlopeTuple,
    /// `ν_E(t)`.
    pub nu: u64,
    /// Pairs counted by `ν_E(t)` that also have `x_1 ≠ y_1`.
    pub nu_nondegenerate: u64,
    /// `|E|(|E|−1)/q^k`.
    pub main_term: Ratio<i64>,
    /// `|E|(q^k−1)/q^k`.
    pub diagonal_term: Ratio<i64>,
    /// `R(t)`.
    pub remainder: f64,
}

impl IncidenceReport {
    /// `main − diagonal`, the lower bound on `ν` implied by `R ≥ 0`.
    pub fn lower_bound(&self) -> Ratio<i64> {
        self.main_term - self.diagonal_term
    }

    /// `main − diagonal + R` before rounding.
    pub fn reconstructed(&self) -> f64 {
        ratio_to_f64(self.lower_bound()) + self.remainder
    }
}

fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `(main, diagonal)` as exact fractions over `q^k`.
pub fn decomposition_terms(set_size: usize, q: u32, k: usize) -> (Ratio<i64>, Ratio<i64>) {
    let n = set_size as i64;
    let qk = (q as i64).pow(k as u32);
    (Ratio::new(n * (n - 1), qk), Ratio::new(n * (qk - 1), qk))
}

/// Per-set state shared by both counters: the set, its decoded points, and a
/// lazily computed spectrum reused across every slope tuple.
pub struct IncidenceAnalyzer<'a> {
    set: &'a PointSet,
    coords: OnceLock<Vec<u32>>,
    spectrum: OnceLock<Spectrum>,
}

impl<'a> IncidenceAnalyzer<'a> {
    pub fn new(set: &'a PointSet) -> Self {
        IncidenceAnalyzer {
            set,
            coords: OnceLock::new(),
            spectrum: OnceLock::new(),
        }
    }

    /// Reuses a spectrum already computed for `set`.
    pub fn with_spectrum(set: &'a PointSet, spectrum: Spectrum) -> Self {
        debug_assert_eq!(spectrum.space(), set.space());
        let analyzer = Self::new(set);
        let _ = analyzer.spectrum.set(spectrum);
        analyzer
    }

    pub fn set(&self) -> &PointSet {
        self.set
    }

    /// `Ê`, computed on first use.
    pub fn spectrum(&self) -> &Spectrum {
        self.spectrum
            .get_or_init(|| forward_transform(&self.set.indicator()))
    }

    fn coords(&self) -> &[u32] {
        self.coords.get_or_init(|| self.set.decoded())
    }

    pub fn check_k(&self, k: usize) -> Result<()> {
        let d = self.set.space().dim();
        if k == 0 || k >= d {
            return Err(Error::domain(format!("k = {k} must lie in 1..={}", d.saturating_sub(1))));
        }
        Ok(())
    }

    fn check_slope(&self, t: &SlopeTuple) -> Result<()> {
        if t.modulus() != self.set.space().modulus() {
            return Err(Error::domain("slope tuple and set use different moduli"));
        }
        self.check_k(t.k())
    }

    fn terms(&self, k: usize) -> (Ratio<i64>, Ratio<i64>) {
        decomposition_terms(self.set.len(), self.set.space().q(), k)
    }

    /// Literal enumeration of ordered pairs.
    pub fn nu_brute(&self, t: &SlopeTuple) -> Result<IncidenceReport> {
        self.check_slope(t)?;
        let q = self.set.space().modulus();
        let d = self.set.space().dim();
        let coords = self.coords();
        let n = self.set.len();
        let mut nu = 0u64;
        let mut nondegenerate = 0u64;
        for i in 0..n {
            let x = &coords[i * d..(i + 1) * d];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let y = &coords[j * d..(j + 1) * d];
                let z1 = q.sub(x[0], y[0]);
                let hit = t
                    .entries()
                    .iter()
                    .enumerate()
                    .all(|(idx, &ti)| q.sub(x[idx + 1], y[idx + 1]) == q.mul(ti, z1));
                if hit {
                    nu += 1;
                    if z1 != 0 {
                        nondegenerate += 1;
                    }
                }
            }
        }
        let (main_term, diagonal_term) = self.terms(t.k());
        let remainder = ratio_to_f64(Ratio::from_integer(nu as i64) - main_term + diagonal_term);
        Ok(IncidenceReport {
            slope: t.clone(),
            nu,
            nu_nondegenerate: nondegenerate,
            main_term,
            diagonal_term,
            remainder,
        })
    }

    /// `R(t)` from the spectrum of `E`.
    pub fn remainder_spectral(&self, t: &SlopeTuple) -> Result<f64> {
        self.check_slope(t)?;
        let space = self.set.space();
        let q = space.modulus();
        let k = t.k();
        let spectrum = self.spectrum();
        let mut freq = vec![0u32; space.dim()];
        let mut sum = 0.0;
        for s in SlopeTuple::all(q, k).skip(1) {
            let st = s
                .entries()
                .iter()
                .zip(t.entries())
                .fold(0, |acc, (&si, &ti)| q.add(acc, q.mul(si, ti)));
            freq[0] = st;
            for (slot, &si) in freq[1..=k].iter_mut().zip(s.entries()) {
                *slot = q.neg(si);
            }
            sum += spectrum.at_coords(&freq).norm_sqr();
        }
        let scale = (space.q() as f64).powi((2 * space.dim() - k) as i32);
        Ok(scale * sum)
    }

    /// Ordered pairs `x ≠ y` with `x_i = y_i` for `i = 1..k+1`, from the
    /// spectrum. These pairs are counted by `ν_E(t)` for every `t`.
    pub fn degenerate_pairs_spectral(&self, k: usize) -> Result<u64> {
        self.check_k(k)?;
        let space = self.set.space();
        let q = space.modulus();
        let spectrum = self.spectrum();
        let mut freq = vec![0u32; space.dim()];
        let mut sum = 0.0;
        for u in SlopeTuple::all(q, k + 1) {
            freq[..=k].copy_from_slice(u.entries());
            sum += spectrum.at_coords(&freq).norm_sqr();
        }
        let scale = (space.q() as f64).powi((2 * space.dim() - k - 1) as i32);
        let with_diagonal = round_guarded(scale * sum, "degenerate pair count")?;
        Ok(with_diagonal - self.set.len() as u64)
    }

    /// `main − diagonal + R(t)`, rounded.
    pub fn nu_spectral(&self, t: &SlopeTuple) -> Result<IncidenceReport> {
        let remainder = self.remainder_spectral(t)?;
        let (main_term, diagonal_term) = self.terms(t.k());
        let value = ratio_to_f64(main_term - diagonal_term) + remainder;
        let nu = round_guarded(value, &format!("ν at t = {t}"))?;
        let degenerate = self.degenerate_pairs_spectral(t.k())?;
        if degenerate > nu {
            return Err(Error::Numerical(format!(
                "degenerate pair count {degenerate} exceeds ν = {nu} at t = {t}"
            )));
        }
        Ok(IncidenceReport {
            slope: t.clone(),
            nu,
            nu_nondegenerate: nu - degenerate,
            main_term,
            diagonal_term,
            remainder,
        })
    }

    /// Reports for all `q^k` slope tuples, in mixed-radix order.
    pub fn sweep(&self, k: usize, method: &dyn IncidenceMethod) -> Result<Vec<IncidenceReport>> {
        self.check_k(k)?;
        let q = self.set.space().modulus();
        if method.uses_spectrum() {
            self.spectrum();
        }
        let count = (q.get() as usize).pow(k as u32);
        (0..count)
            .into_par_iter()
            .map(|i| method.report(self, &SlopeTuple::from_index(q, k, i)))
            .collect()
    }
}

fn round_guarded(value: f64, what: &str) -> Result<u64> {
    let rounded = value.round();
    if !value.is_finite() || (value - rounded).abs() >= ROUNDING_GUARD || rounded < 0.0 {
        return Err(Error::Numerical(format!(
            "{what} evaluated to {value}, not within {ROUNDING_GUARD} of a nonnegative integer"
        )));
    }
    Ok(rounded as u64)
}

/// A way of computing [`IncidenceReport`]s.
pub trait IncidenceMethod: Named + Send + Sync {
    fn report(&self, analyzer: &IncidenceAnalyzer<'_>, t: &SlopeTuple) -> Result<IncidenceReport>;

    fn uses_spectrum(&self) -> bool {
        false
    }
}

pub struct BruteForce;

impl Named for BruteForce {
    fn name(&self) -> &'static str {
        "brute"
    }

    fn summary(&self) -> &'static str {
        "enumerate ordered pairs of points"
    }
}

impl IncidenceMethod for BruteForce {
    fn report(&self, analyzer: &IncidenceAnalyzer<'_>, t: &SlopeTuple) -> Result<IncidenceReport> {
        analyzer.nu_brute(t)
    }
}

pub struct SpectralCount;

impl Named for SpectralCount {
    fn name(&self) -> &'static str {
        "spectral"
    }

    fn summary(&self) -> &'static str {
        "main − diagonal + R(t) from the Fourier transform, rounded"
    }
}

impl IncidenceMethod for SpectralCount {
    fn report(&self, analyzer: &IncidenceAnalyzer<'_>, t: &SlopeTuple) -> Result<IncidenceReport> {
        analyzer.nu_spectral(t)
    }

    fn uses_spectrum(&self) -> bool {
        true
    }
}

pub fn incidence_methods() -> Registry<dyn IncidenceMethod> {
    let mut reg: Registry<dyn IncidenceMethod> = Registry::new("incidence method");
    reg.register(Arc::new(BruteForce)).register(Arc::new(SpectralCount));
    reg
}

/// Per-slope summary kept by [`theorem_main_threshold`].
#[derive(Clone, Debug, Serialize)]
pub struct SlopeOutcome {
    pub slope: SlopeTuple,
    pub nu: u64,
    pub nu_nondegenerate: u64,
    pub remainder: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdReport {
    pub k: usize,
    pub set_size: usize,
    /// `|E| > q^k`.
    pub above_threshold: bool,
    /// `main − diagonal`, identical for every slope.
    pub lower_bound: Ratio<i64>,
    pub holds: bool,
    /// Above the threshold: slopes with `ν < main − diagonal` or `ν = 0`.
    /// Otherwise: slopes with `ν = 0`.
    pub witness_failures: Vec<SlopeTuple>,
    /// Slopes with no `x_1 ≠ y_1` pair, so the direction `(1, t, 0, …)` is
    /// not certified by the count.
    pub uncovered_slopes: Vec<SlopeTuple>,
    pub min_remainder: f64,
    pub slopes: Vec<SlopeOutcome>,
}

impl ThresholdReport {
    pub fn slope_coverage(&self) -> bool {
        self.uncovered_slopes.is_empty()
    }
}

/// Checks `ν_E(t) ≥ main − diagonal > 0` for every `t ∈ F_q^k` when
/// `|E| > q^k`, and lists slopes with `ν = 0` otherwise.
pub fn theorem_main_threshold(
    analyzer: &IncidenceAnalyzer<'_>,
    k: usize,
    method: &dyn IncidenceMethod,
) -> Result<ThresholdReport> {
    analyzer.check_k(k)?;
    let set = analyzer.set();
    let q = set.space().q();
    let qk = (q as u64).pow(k as u32);
    let above_threshold = set.len() as u64 > qk;
    let (main, diagonal) = decomposition_terms(set.len(), q, k);
    let lower_bound = main - diagonal;

    let reports = analyzer.sweep(k, method)?;
    let mut witness_failures = Vec::new();
    let mut uncovered_slopes = Vec::new();
    let mut min_remainder = f64::INFINITY;
    let mut slopes = Vec::with_capacity(reports.len());
    for r in reports {
        let failed = if above_threshold {
            r.nu == 0 || Ratio::from_integer(r.nu as i64) < lower_bound
        } else {
            r.nu == 0
        };
        if failed {
            witness_failures.push(r.slope.clone());
        }
        if r.nu_nondegenerate == 0 {
            uncovered_slopes.push(r.slope.clone());
        }
        min_remainder = min_remainder.min(r.remainder);
        slopes.push(SlopeOutcome {
            slope: r.slope,
            nu: r.nu,
            nu_nondegenerate: r.nu_nondegenerate,
            remainder: r.remainder,
        });
    }
    Ok(ThresholdReport {
        k,
        set_size: set.len(),
        above_threshold,
        lower_bound,
        holds: witness_failures.is_empty(),
        witness_failures,
        uncovered_slopes,
        min_remainder,
        slopes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SampleRng;
    use crate::space::Space;

    fn set(q: u32, d: usize, pts: &[&[u32]]) -> PointSet {
        let space = Space::of(q, d).unwrap();
        PointSet::from_indices(space, pts.iter().map(|p| space.encode(p))).unwrap()
    }

    fn slope(q: u32, t: &[i64]) -> SlopeTuple {
        SlopeTuple::new(FieldModulus::new(q).unwrap(), t).unwrap()
    }

    fn random_set(space: Space, n: usize, seed: u64) -> PointSet {
        PointSet::from_indices(space, SampleRng::new(seed).sample_indices(space.size(), n)).unwrap()
    }

    #[test]
    fn two_point_example() {
        let e = set(3, 2, &[&[0, 0], &[1, 1]]);
        let a = IncidenceAnalyzer::new(&e);
        for (t, expected) in [(1, 2), (0, 0), (2, 0)] {
            assert_eq!(a.nu_brute(&slope(3, &[t])).unwrap().nu, expected);
            assert_eq!(a.nu_spectral(&slope(3, &[t])).unwrap().nu, expected);
        }
    }

    #[test]
    fn full_plane_example() {
        let space = Space::of(3, 2).unwrap();
        let e = PointSet::full(space);
        let a = IncidenceAnalyzer::new(&e);
        for t in 0..3 {
            let t = slope(3, &[t]);
            let brute = a.nu_brute(&t).unwrap();
            assert_eq!(brute.nu, 18);
            assert_eq!(brute.remainder, 0.0);
            assert_eq!(brute.lower_bound(), Ratio::from_integer(18));
            assert!(a.remainder_spectral(&t).unwrap().abs() < 1e-9);
            assert_eq!(a.nu_spectral(&t).unwrap().nu, 18);
        }
    }

    #[test]
    fn tiny_sets_have_no_incidences() {
        let space = Space::of(5, 3).unwrap();
        for e in [PointSet::empty(space), PointSet::from_indices(space, [17]).unwrap()] {
            let a = IncidenceAnalyzer::new(&e);
            let t = slope(5, &[1, 3]);
            let r = a.nu_spectral(&t).unwrap();
            assert_eq!(r.nu, 0);
            assert_eq!(a.nu_brute(&t).unwrap().nu, 0);
            // R = diagonal − main exactly
            let expected = ratio_to_f64(r.diagonal_term - r.main_term);
            assert!((r.remainder - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn random_set_remainders_agree() {
        let space = Space::of(5, 2).unwrap();
        let e = random_set(space, 10, 11);
        let a = IncidenceAnalyzer::new(&e);
        for t in SlopeTuple::all(space.modulus(), 1) {
            let brute = a.nu_brute(&t).unwrap();
            assert!((brute.remainder - a.remainder_spectral(&t).unwrap()).abs() < 1e-4);
        }
    }

    #[test]
    fn coordinate_subspace_counts() {
        // E = H_k: first k coordinates free, rest zero
        for (q, d, k) in [(3u32, 3usize, 1usize), (3, 3, 2), (5, 3, 1), (3, 4, 2)] {
            let space = Space::of(q, d).unwrap();
            let stride = space.stride(k - 1);
            let hk = PointSet::from_indices(space, (0..(q as usize).pow(k as u32)).map(|i| i * stride))
                .unwrap();
            let a = IncidenceAnalyzer::new(&hk);
            let qk = (q as u64).pow(k as u32);
            for t in SlopeTuple::all(space.modulus(), k) {
                let brute = a.nu_brute(&t).unwrap();
                assert_eq!(a.nu_spectral(&t).unwrap(), IncidenceReport { remainder: a.remainder_spectral(&t).unwrap(), ..brute.clone() });
                // only the first coordinate of the difference may move
                if t.entries().iter().all(|&v| v == 0) {
                    assert_eq!(brute.nu, qk * (q as u64 - 1));
                }
            }
        }
    }

    #[test]
    fn nondegenerate_equals_nu_when_k_is_d_minus_one() {
        let space = Space::of(5, 3).unwrap();
        let e = random_set(space, 30, 5);
        let a = IncidenceAnalyzer::new(&e);
        for r in a.sweep(2, &SpectralCount).unwrap() {
            assert_eq!(r.nu, r.nu_nondegenerate);
        }
        assert_eq!(a.degenerate_pairs_spectral(2).unwrap(), 0);
    }

    #[test]
    fn slope_sum_identity() {
        for (q, d) in [(3u32, 3usize), (5, 3), (3, 4)] {
            let space = Space::of(q, d).unwrap();
            let e = random_set(space, space.size() / 3, 99);
            let pts: Vec<Vec<u32>> = e.points().map(|p| p.coords().to_vec()).collect();
            let a = IncidenceAnalyzer::new(&e);
            for k in 1..d {
                let total: u64 = a.sweep(k, &BruteForce).unwrap().iter().map(|r| r.nu).sum();
                let mut first_differs = 0u64;
                let mut degenerate = 0u64;
                for x in &pts {
                    for y in &pts {
                        if x[0] != y[0] {
                            first_differs += 1;
                        } else if x != y && x[..=k] == y[..=k] {
                            degenerate += 1;
                        }
                    }
                }
                let qk = (q as u64).pow(k as u32);
                assert_eq!(total, first_differs + qk * degenerate, "q={q} d={d} k={k}");
                if k == d - 1 {
                    assert_eq!(degenerate, 0);
                }
                assert_eq!(a.degenerate_pairs_spectral(k).unwrap(), degenerate);
            }
        }
    }

    #[test]
    fn full_space_count_is_constant_in_t() {
        let space = Space::of(3, 3).unwrap();
        let e = PointSet::full(space);
        let a = IncidenceAnalyzer::new(&e);
        for k in 1..3 {
            let reports = a.sweep(k, &BruteForce).unwrap();
            assert!(reports.iter().all(|r| r.nu == reports[0].nu));
        }
    }

    #[test]
    fn threshold_examples() {
        let space = Space::of(5, 2).unwrap();
        let e = random_set(space, 6, 3);
        let a = IncidenceAnalyzer::new(&e);
        let report = theorem_main_threshold(&a, 1, &SpectralCount).unwrap();
        assert!(report.above_threshold && report.holds && report.slope_coverage());
        assert_eq!(report.slopes.len(), 5);

        // a line: |E| = q, only the slope 0 is hit
        let line = PointSet::from_indices(space, (0..5).map(|x| space.encode(&[x, 0]))).unwrap();
        let a = IncidenceAnalyzer::new(&line);
        let report = theorem_main_threshold(&a, 1, &BruteForce).unwrap();
        assert!(!report.above_threshold);
        assert_eq!(report.witness_failures.len(), 4);

        // a line plus one outside point clears the threshold
        let mut idx: Vec<usize> = line.indices().collect();
        idx.push(space.encode(&[2, 3]));
        let e = PointSet::from_indices(space, idx).unwrap();
        let report = theorem_main_threshold(&IncidenceAnalyzer::new(&e), 1, &SpectralCount).unwrap();
        assert!(report.above_threshold && report.holds);
    }

    #[test]
    fn k_out_of_range() {
        let space = Space::of(3, 2).unwrap();
        let e = PointSet::full(space);
        let a = IncidenceAnalyzer::new(&e);
        assert!(a.nu_brute(&slope(3, &[1, 1])).is_err());
        assert!(theorem_main_threshold(&a, 0, &BruteForce).is_err());
        assert!(SlopeTuple::new(space.modulus(), &[]).is_err());
        assert!(a.nu_brute(&slope(5, &[1])).is_err());
    }

    #[test]
    fn registry_lookup() {
        let reg = incidence_methods();
        assert_eq!(reg.names().collect::<Vec<_>>(), vec!["brute", "spectral"]);
        assert!(reg.get("fft").is_err());
    }
}
