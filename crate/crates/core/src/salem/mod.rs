//! Fourier-uniformity measurements and difference-set statistics.
//!
//! * [`salem_report`] measures `C_E = max_{m≠0} |Ê(m)| · q^d / √|E|`, the
//!   constant for which `|Ê(m)| ≤ C_E q^{-d} √|E|` holds at every nonzero
//!   frequency. Classification against a threshold is left to the caller.
//! * [`difference_profile`] tabulates `μ(z) = #{(x, y) ∈ E² : x − y = z}`,
//!   whose transform satisfies `μ̂(m) = q^d |Ê(m)|²`.
//! * [`difference_bound_check`] gathers `|D(E)|`, `|E − E|` and their ratios
//!   against `min(|E|²/q, q^{d−1})`, `|E|` and `min(|E|², q^d)`.

mod generators;

pub use generators::{
    default_generators, gen_affine_subspace, gen_coordinate_subspace, gen_embedded, gen_paraboloid,
    gen_random, gen_subspace_random, GeneratorParams, GeneratorSpec, SetGenerator,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::directions::{direction_set, DirectionSet, PointSet};
use crate::space::Space;
use crate::spectral::{forward_transform, GridFunction, Spectrum};

/// Default threshold on `C_E` below which a set is called Salem.
pub const DEFAULT_SALEM_THRESHOLD: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceProfile {
    space: Space,
    mu: Vec<u64>,
    support_size: usize,
    total: u64,
}

impl DifferenceProfile {
    pub fn space(&self) -> Space {
        self.space
    }

    /// `μ(z)` in layout order.
    pub fn mu(&self) -> &[u64] {
        &self.mu
    }

    pub fn at(&self, index: usize) -> u64 {
        self.mu[index]
    }

    /// `|E − E|`, including 0 when `E` is nonempty.
    pub fn support_size(&self) -> usize {
        self.support_size
    }

    /// `Σ_z μ(z)`, always `|E|²`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// `Σ_z μ(z)²`, the number of additive quadruples.
    pub fn energy(&self) -> u128 {
        self.mu.iter().map(|&m| m as u128 * m as u128).sum()
    }

    pub fn as_grid_function(&self) -> GridFunction {
        let values: Vec<f64> = self.mu.iter().map(|&m| m as f64).collect();
        GridFunction::from_real(self.space, &values).expect("length matches space")
    }

    /// Checks `Σμ = |E|²`, `μ(0) = |E|` and `μ(z) = μ(−z)` exactly.
    pub fn identities_hold(&self, set_size: usize) -> bool {
        let n = set_size as u64;
        self.total == n * n
            && self.mu[0] == n
            && (0..self.mu.len()).all(|z| self.mu[z] == self.mu[self.space.negate_index(z)])
    }
}

pub fn difference_profile(e: &PointSet) -> DifferenceProfile {
    let space = e.space();
    let d = space.dim();
    let coords = e.decoded();
    let n = e.len();

    let accumulate = |i: usize, mu: &mut Vec<u64>| {
        let x = &coords[i * d..(i + 1) * d];
        for y in coords.chunks(d) {
            mu[space.diff_index(x, y)] += 1;
        }
    };

    let mu = if n >= 256 && space.size() <= 1 << 20 {
        let workers = rayon::current_num_threads().max(1);
        (0..n)
            .into_par_iter()
            .with_min_len(n.div_ceil(workers))
            .fold(
                || vec![0u64; space.size()],
                |mut mu, i| {
                    accumulate(i, &mut mu);
                    mu
                },
            )
            .reduce(
                || vec![0u64; space.size()],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    } else {
        let mut mu = vec![0u64; space.size()];
        for i in 0..n {
            accumulate(i, &mut mu);
        }
        mu
    };
    let support_size = mu.iter().filter(|&&m| m > 0).count();
    let total = mu.iter().sum();
    DifferenceProfile {
        space,
        mu,
        support_size,
        total,
    }
}

/// `max_m |μ̂(m) − q^d |Ê(m)|²|`.
pub fn mu_spectrum_identity_defect(e: &PointSet) -> f64 {
    let spectrum = forward_transform(&e.indicator());
    mu_identity_defect_with(&difference_profile(e), &spectrum)
}

fn mu_identity_defect_with(profile: &DifferenceProfile, spectrum: &Spectrum) -> f64 {
    let mu_hat = forward_transform(&profile.as_grid_function());
    let qd = profile.space.size() as f64;
    mu_hat
        .values()
        .iter()
        .zip(spectrum.values())
        .map(|(m, e)| (m - qd * e.norm_sqr()).norm())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SalemReport {
    pub set_size: usize,
    /// `max_{m≠0} |Ê(m)|`.
    pub max_nonzero_coeff: f64,
    /// `max_nonzero_coeff · q^d / √|E|`; 0 for the empty and the full set.
    pub salem_constant: f64,
}

impl SalemReport {
    pub fn is_salem_at(&self, threshold: f64) -> bool {
        self.salem_constant <= threshold
    }
}

pub fn salem_report(e: &PointSet) -> SalemReport {
    salem_report_with(e, &forward_transform(&e.indicator()))
}

pub fn salem_report_with(e: &PointSet, spectrum: &Spectrum) -> SalemReport {
    let space = e.space();
    if e.is_empty() || e.len() == space.size() {
        return SalemReport {
            set_size: e.len(),
            max_nonzero_coeff: 0.0,
            salem_constant: 0.0,
        };
    }
    let max_nonzero_coeff = spectrum.max_nonzero_magnitude();
    SalemReport {
        set_size: e.len(),
        max_nonzero_coeff,
        salem_constant: max_nonzero_coeff * space.size() as f64 / (e.len() as f64).sqrt(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheckRecord {
    pub q: u32,
    pub d: usize,
    pub set_size: usize,
    /// `|D(E)|`.
    pub direction_count: usize,
    /// `|E − E|`.
    pub diff_size: usize,
    /// `min(|E|²/q, q^{d−1})`.
    pub bound_ii: f64,
    /// `|E|`.
    pub bound_iii: f64,
    /// `min(|E|², q^d)`.
    pub bound_diff: f64,
    pub ratio_ii: f64,
    pub ratio_iii: f64,
    pub ratio_diff: f64,
    pub salem_constant: f64,
    /// `|D(E)|·(q − 1) ≥ |E − E| − 1`: each direction accounts for at most
    /// `q − 1` nonzero differences.
    pub quotient_bound_holds: bool,
    /// `Σ_z μ(z)²`.
    pub mu_energy: u128,
    /// `|Σμ² − q^{3d} Σ|Ê|⁴| / Σμ²`.
    pub fourth_moment_defect: f64,
    /// `Σμ = |E|²`, `μ(0) = |E|`, `μ(z) = μ(−z)`.
    pub mu_identities_hold: bool,
}

// 0/0 is reported as 0 so every ratio stays finite.
fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

pub fn difference_bound_check(e: &PointSet) -> BoundCheckRecord {
    let spectrum = forward_transform(&e.indicator());
    difference_bound_check_with(e, &spectrum, &difference_profile(e), &direction_set(e))
}

pub fn difference_bound_check_with(
    e: &PointSet,
    spectrum: &Spectrum,
    profile: &DifferenceProfile,
    directions: &DirectionSet,
) -> BoundCheckRecord {
    let space = e.space();
    let q = space.q();
    let d = space.dim();
    let n = e.len() as f64;
    let qf = q as f64;
    let direction_count = directions.len();
    let diff_size = profile.support_size();

    let bound_ii = (n * n / qf).min(qf.powi(d as i32 - 1));
    let bound_iii = n;
    let bound_diff = (n * n).min(space.size() as f64);

    let mu_energy = profile.energy();
    let fourth: f64 = spectrum.values().iter().map(|v| v.norm_sqr().powi(2)).sum();
    let spectral_energy = qf.powi(3 * d as i32) * fourth;
    let fourth_moment_defect = ratio((mu_energy as f64 - spectral_energy).abs(), mu_energy as f64);

    BoundCheckRecord {
        q,
        d,
        set_size: e.len(),
        direction_count,
        diff_size,
        bound_ii,
        bound_iii,
        bound_diff,
        ratio_ii: ratio(direction_count as f64, bound_ii),
        ratio_iii: ratio(direction_count as f64, bound_iii),
        ratio_diff: ratio(diff_size as f64, bound_diff),
        salem_constant: salem_report_with(e, spectrum).salem_constant,
        quotient_bound_holds: direction_count as u64 * (q as u64 - 1)
            >= (diff_size as u64).saturating_sub(1),
        mu_energy,
        fourth_moment_defect,
        mu_identities_hold: profile.identities_hold(e.len()),
    }
}
