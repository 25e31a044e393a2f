//! Point-set generators, addressable by a spec string
//! `family:key=value,key=value,…`, e.g. `random:q=7,d=2,n=10,seed=42`.
//!
//! | family            | parameters                     | set                                   |
//! |-------------------|--------------------------------|---------------------------------------|
//! | `random`          | `q d n seed`                   | `n` uniform points without repetition |
//! | `subspace`        | `q d k`                        | first `k` coordinates free, rest 0    |
//! | `affine`          | `q d k shift`                  | `subspace + shift`, `shift=a.b.c`     |
//! | `paraboloid`      | `q d`                          | `{(x, x·x) : x ∈ F_q^{d−1}}`          |
//! | `subspace-random` | `q d k n seed`                 | `n` random points of `subspace`       |
//! | `embedded`        | `d` and `in=PATH` or `base=FAMILY base_d=…` plus the base family's parameters | base set padded with zeros |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::directions::{read_fset_file, PointSet};
use crate::error::{Error, Result};
use crate::field::{FieldModulus, Point};
use crate::registry::{Named, Registry};
use crate::rng::SampleRng;
use crate::space::Space;

pub fn gen_random(space: Space, n: usize, seed: u64) -> Result<PointSet> {
    if n > space.size() {
        return Err(Error::domain(format!(
            "cannot draw {n} distinct points from {space} ({} points)",
            space.size()
        )));
    }
    PointSet::from_indices(space, SampleRng::new(seed).sample_indices(space.size(), n))
}

pub fn gen_coordinate_subspace(space: Space, k: usize) -> Result<PointSet> {
    if k > space.dim() {
        return Err(Error::domain(format!("k = {k} exceeds d = {}", space.dim())));
    }
    let count = (space.q() as usize).pow(k as u32);
    // free coordinates occupy the high digits of the index
    let stride = if k == 0 { 0 } else { space.stride(k - 1) };
    PointSet::from_indices(space, (0..count).map(|i| i * stride))
}

pub fn gen_affine_subspace(space: Space, k: usize, shift: &Point) -> Result<PointSet> {
    gen_coordinate_subspace(space, k)?.translate(shift)
}

pub fn gen_paraboloid(space: Space) -> Result<PointSet> {
    let d = space.dim();
    if d < 2 {
        return Err(Error::domain("the paraboloid needs d ≥ 2"));
    }
    let low = space.with_dim(d - 1)?;
    let q = space.modulus();
    let mut coords = vec![0u32; d];
    let indices = (0..low.size()).map(|i| {
        low.decode_into(i, &mut coords[..d - 1]);
        coords[d - 1] = coords[..d - 1]
            .iter()
            .fold(0, |acc, &x| q.add(acc, q.mul(x, x)));
        space.encode(&coords)
    });
    PointSet::from_indices(space, indices.collect::<Vec<_>>())
}

pub fn gen_embedded(low: &PointSet, d: usize) -> Result<PointSet> {
    if low.space().dim() >= d {
        return Err(Error::domain(format!(
            "base dimension {} must be below target dimension {d}",
            low.space().dim()
        )));
    }
    low.embed(low.space().with_dim(d)?)
}

/// `n` uniform points of the coordinate subspace spanned by the first `k`
/// axes.
pub fn gen_subspace_random(space: Space, k: usize, n: usize, seed: u64) -> Result<PointSet> {
    if k == 0 || k > space.dim() {
        return Err(Error::domain(format!("k = {k} outside 1..={}", space.dim())));
    }
    let low = space.with_dim(k)?;
    gen_random(low, n, seed)?.embed(space)
}

/// `key=value` parameters of a generator.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorParams(BTreeMap<String, String>);

impl GeneratorParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.set(key, value);
        self
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .raw(key)
            .ok_or_else(|| Error::Config(format!("missing generator parameter `{key}`")))?;
        raw.parse()
            .map_err(|_| Error::Config(format!("bad value `{raw}` for parameter `{key}`")))
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        if self.contains(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    pub fn space(&self) -> Result<Space> {
        let q = FieldModulus::new(self.get("q")?).map_err(|e| Error::Config(e.to_string()))?;
        Space::new(q, self.get("d")?)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// A family name plus parameters, as written `family:k=v,k=v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: String,
    pub params: GeneratorParams,
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let family = family.trim();
        if family.is_empty() {
            return Err(Error::Config(format!("generator spec `{s}` has no family")));
        }
        let mut params = GeneratorParams::new();
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, found `{pair}`")))?;
            params.set(k.trim(), v.trim());
        }
        Ok(GeneratorSpec {
            family: family.to_string(),
            params,
        })
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

pub trait SetGenerator: Named + Send + Sync {
    /// Parameter names the family reads.
    fn parameters(&self) -> &'static [&'static str];

    fn generate(&self, params: &GeneratorParams) -> Result<PointSet>;
}

struct Random;
struct Subspace;
struct Affine;
struct Paraboloid;
struct SubspaceRandom;
struct Embedded;

impl Named for Random {
    fn name(&self) -> &'static str {
        "random"
    }
    fn summary(&self) -> &'static str {
        "n uniform points drawn without replacement"
    }
}

impl SetGenerator for Random {
    fn parameters(&self) -> &'static [&'static str] {
        &["q", "d", "n", "seed"]
    }

    fn generate(&self, p: &GeneratorParams) -> Result<PointSet> {
        gen_random(p.space()?, p.get("n")?, p.get_or("seed", 0)?)
    }
}

impl Named for Subspace {
    fn name(&self) -> &'static str {
        "subspace"
    }
    fn summary(&self) -> &'static str {
        "coordinate subspace spanned by the first k axes"
    }
}

impl SetGenerator for Subspace {
    fn parameters(&self) -> &'static [&'static str] {
        &["q", "d", "k"]
    }

    fn generate(&self, p: &GeneratorParams) -> Result<PointSet> {
        gen_coordinate_subspace(p.space()?, p.get("k")?)
    }
}

impl Named for Affine {
    fn name(&self) -> &'static str {
        "affine"
    }
    fn summary(&self) -> &'static str {
        "coordinate subspace translated by shift=a.b.c"
    }
}

impl SetGenerator for Affine {
    fn parameters(&self) -> &'static [&'static str] {
        &["q", "d", "k", "shift"]
    }

    fn generate(&self, p: &GeneratorParams) -> Result<PointSet> {
        let space = p.space()?;
        let raw = p.raw("shift").unwrap_or("");
        let coords = raw
            .split('.')
            .map(|c| c.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Config(format!("bad shift `{raw}`, expected e.g. 1.0.2")))?;
        if coords.len() != space.dim() {
            return Err(Error::Config(format!(
                "shift `{raw}` needs {} coordinates",
                space.dim()
            )));
        }
        let shift = Point::reduced(space.modulus(), &coords);
        gen_affine_subspace(space, p.get("k")?, &shift)
    }
}

impl Named for Paraboloid {
    fn name(&self) -> &'static str {
        "paraboloid"
    }
    fn summary(&self) -> &'static str {
        "{(x, x·x)}: the graph of the sum of squares"
    }
}

impl SetGenerator for Paraboloid {
    fn parameters(&self) -> &'static [&'static str] {
        &["q", "d"]
    }

    fn generate(&self, p: &GeneratorParams) -> Result<PointSet> {
        gen_paraboloid(p.space()?)
    }
}

impl Named for SubspaceRandom {
    fn name(&self) -> &'static str {
        "subspace-random"
    }
    fn summary(&self) -> &'static str {
        "n uniform points inside the coordinate subspace of dimension k"
    }
}

impl SetGenerator for SubspaceRandom {
    fn parameters(&self) -> &'static [&'static str] {
        &["q", "d", "k", "n", "seed"]
    }

    fn generate(&self, p: &GeneratorParams) -> Result<PointSet> {
        gen_subspace_random(p.space()?, p.get("k")?, p.get("n")?, p.get_or("seed", 0)?)
    }
}

impl Named for Embedded {
    fn name(&self) -> &'static str {
        "embedded"
    }
    fn summary(&self) -> &'static str {
        "a lower-dimensional set padded with trailing zeros"
    }
}

impl SetGenerator for Embedded {
    fn parameters(&self) -> &'static [&'static str] {
        &["d", "in", "base", "base_d"]
    }

    fn generate(&self, p: &GeneratorParams) -> Result<PointSet> {
        let d: usize = p.get("d")?;
        let low = if let Some(path) = p.raw("in") {
            read_fset_file(path)?
        } else {
            let base: String = p.get("base")?;
            if base == self.name() {
                return Err(Error::Config("embedded generator cannot embed itself".into()));
            }
            let inner = p.clone().with("d", p.get::<usize>("base_d")?);
            default_generators().get(&base)?.generate(&inner)?
        };
        gen_embedded(&low, d)
    }
}

pub fn default_generators() -> Registry<dyn SetGenerator> {
    let mut reg: Registry<dyn SetGenerator> = Registry::new("generator");
    reg.register(Arc::new(Random))
        .register(Arc::new(Subspace))
        .register(Arc::new(Affine))
        .register(Arc::new(Paraboloid))
        .register(Arc::new(SubspaceRandom))
        .register(Arc::new(Embedded));
    reg
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<PointSet> {
        default_generators().get(&self.family)?.generate(&self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::to_fset_string;

    fn spec(s: &str) -> PointSet {
        s.parse::<GeneratorSpec>().unwrap().generate().unwrap()
    }

    #[test]
    fn spec_round_trip() {
        let s: GeneratorSpec = "random:q=7,d=2,n=10,seed=42".parse().unwrap();
        assert_eq!(s.family, "random");
        assert_eq!(s.params.get::<u32>("q").unwrap(), 7);
        assert_eq!(s.to_string(), "random:d=2,n=10,q=7,seed=42");
        assert!("random:q".parse::<GeneratorSpec>().is_err());
        assert!(":q=3".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn coordinate_subspace_example() {
        let e = spec("subspace:q=5,d=3,k=2");
        assert_eq!(e.len(), 25);
        assert!(e.points().all(|p| p.coords()[2] == 0));
        assert_eq!(spec("subspace:q=3,d=2,k=0").len(), 1);
    }

    #[test]
    fn paraboloid_example() {
        let e = spec("paraboloid:q=5,d=2");
        let pts: Vec<Vec<u32>> = e.points().map(|p| p.coords().to_vec()).collect();
        assert_eq!(pts, vec![vec![0, 0], vec![1, 1], vec![2, 4], vec![3, 4], vec![4, 1]]);
        assert_eq!(spec("paraboloid:q=3,d=3").len(), 9);
    }

    #[test]
    fn random_is_deterministic() {
        let a = spec("random:q=3,d=2,n=4,seed=1");
        let b = spec("random:q=3,d=2,n=4,seed=1");
        assert_eq!(to_fset_string(&a), to_fset_string(&b));
        assert_eq!(a.indices().collect::<Vec<_>>(), vec![3, 4, 6, 8]);
        assert!("random:q=3,d=2,n=10".parse::<GeneratorSpec>().unwrap().generate().is_err());
    }

    #[test]
    fn affine_shift() {
        let e = spec("affine:q=5,d=2,k=1,shift=0.3");
        assert!(e.points().all(|p| p.coords()[1] == 3));
        assert_eq!(e.len(), 5);
        assert!("affine:q=5,d=2,k=1,shift=1".parse::<GeneratorSpec>().unwrap().generate().is_err());
    }

    #[test]
    fn embedded_from_base_family() {
        let e = spec("embedded:d=4,base=paraboloid,base_d=2,q=5");
        assert_eq!(e.space().dim(), 4);
        assert_eq!(e.len(), 5);
        assert!(e.points().all(|p| p.coords()[2..] == [0, 0]));
        assert!("embedded:d=2,base=embedded,base_d=1,q=5"
            .parse::<GeneratorSpec>()
            .unwrap()
            .generate()
            .is_err());
    }

    #[test]
    fn subspace_random_stays_inside() {
        let e = spec("subspace-random:q=11,d=4,k=2,n=37,seed=3");
        assert_eq!(e.len(), 37);
        assert!(e.points().all(|p| p.coords()[2..] == [0, 0]));
    }

    #[test]
    fn unknown_family() {
        let err = "cube:q=3".parse::<GeneratorSpec>().unwrap().generate().unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}
