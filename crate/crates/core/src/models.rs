//! Null and planted random graph models with reproducible seeded streams.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, NodeSubset};

/// Below this edge probability pairs are visited by geometric skipping.
const SPARSE_CUTOFF: f64 = 0.05;

/// `m^(2) = m (m - 1) / 2`
pub const fn half_pair(m: u64) -> u64 {
    if m < 2 {
        0
    } else {
        m * (m - 1) / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Null,
    PlantedKnownP0,
    PlantedFixedDegree,
}

/// Parameters of a null or alternative graph distribution.
///
/// Serialises to a flat JSON object with the keys `N`, `variant`, `p0`,
/// `p0_prime`, `p1`, `n` and `planted_set`; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(rename = "N")]
    pub num_nodes: usize,
    pub variant: Variant,
    #[serde(default)]
    pub p0: Option<f64>,
    #[serde(default)]
    pub p0_prime: Option<f64>,
    #[serde(default)]
    pub p1: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
    /// Community for planted variants; `None` means the prefix `{0, ..., n-1}`.
    #[serde(default)]
    pub planted_set: Option<NodeSubset>,
}

impl ModelSpec {
    pub fn null(num_nodes: usize, p0: f64) -> Self {
        ModelSpec { num_nodes, variant: Variant::Null, p0: Some(p0), p0_prime: None, p1: None, n: None, planted_set: None }
    }

    pub fn planted(num_nodes: usize, n: usize, p0: f64, p1: f64) -> Self {
        ModelSpec {
            num_nodes,
            variant: Variant::PlantedKnownP0,
            p0: Some(p0),
            p0_prime: None,
            p1: Some(p1),
            n: Some(n),
            planted_set: None,
        }
    }

    pub fn fixed_degree(num_nodes: usize, n: usize, p0_prime: f64, p1: f64) -> Self {
        ModelSpec {
            num_nodes,
            variant: Variant::PlantedFixedDegree,
            p0: None,
            p0_prime: Some(p0_prime),
            p1: Some(p1),
            n: Some(n),
            planted_set: None,
        }
    }

    pub fn with_planted_set(mut self, set: NodeSubset) -> Self {
        self.planted_set = Some(set);
        self
    }

    /// The null model whose expected edge count matches this planted model.
    ///
    /// For `PlantedKnownP0` this is `G(N, p0)`; for `PlantedFixedDegree` the
    /// null probability is [`effective_p0`].
    pub fn matching_null(&self) -> Result<ModelSpec> {
        self.validate()?;
        match self.variant {
            Variant::Null => Ok(self.clone()),
            Variant::PlantedKnownP0 => Ok(ModelSpec::null(self.num_nodes, self.p0.unwrap())),
            Variant::PlantedFixedDegree => {
                let p0 = effective_p0(self.p0_prime.unwrap(), self.p1.unwrap(), self.n.unwrap(), self.num_nodes)?;
                Ok(ModelSpec::null(self.num_nodes, p0))
            }
        }
    }

    /// Connection probability off the community (the only one under the null).
    pub fn background_p(&self) -> Result<f64> {
        self.validate()?;
        Ok(match self.variant {
            Variant::PlantedFixedDegree => self.p0_prime.unwrap(),
            _ => self.p0.unwrap(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.num_nodes == 0 {
            return bad("N must be positive".into());
        }
        let prob = |name: &str, v: Option<f64>| -> Result<f64> {
            match v {
                Some(p) if (0.0..=1.0).contains(&p) => Ok(p),
                Some(p) => Err(Error::InvalidSpec(format!("{name} = {p} is not a probability"))),
                None => Err(Error::InvalidSpec(format!("{name} is required for {:?}", self.variant))),
            }
        };
        match self.variant {
            Variant::Null => {
                prob("p0", self.p0)?;
                if self.p1.is_some() || self.n.is_some() || self.p0_prime.is_some() || self.planted_set.is_some() {
                    return bad("Null takes only N and p0".into());
                }
                return Ok(());
            }
            Variant::PlantedKnownP0 => {
                let p0 = prob("p0", self.p0)?;
                let p1 = prob("p1", self.p1)?;
                if self.p0_prime.is_some() {
                    return bad("p0_prime is not used by PlantedKnownP0".into());
                }
                if p1 < p0 {
                    return bad(format!("p1 = {p1} is below p0 = {p0}"));
                }
            }
            Variant::PlantedFixedDegree => {
                let p0p = prob("p0_prime", self.p0_prime)?;
                let p1 = prob("p1", self.p1)?;
                if self.p0.is_some() {
                    return bad("p0 is derived for PlantedFixedDegree; give p0_prime".into());
                }
                if p1 < p0p {
                    return bad(format!("p1 = {p1} is below p0_prime = {p0p}"));
                }
            }
        }
        let n = self.n.ok_or_else(|| Error::InvalidSpec("n is required for planted variants".into()))?;
        if n == 0 || n > self.num_nodes {
            return bad(format!("n = {n} must lie in [1, N = {}]", self.num_nodes));
        }
        if let Some(s) = &self.planted_set {
            if s.len() != n {
                return bad(format!("planted_set has {} nodes, n = {n}", s.len()));
            }
            s.check(self.num_nodes).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        }
        Ok(())
    }
}

/// Null probability giving the same expected edge count as `G(N, p0'; n, p1)`.
pub fn effective_p0(p0_prime: f64, p1: f64, n: usize, num_nodes: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p0_prime) || !(0.0..=1.0).contains(&p1) || p0_prime > p1 {
        return Err(Error::InvalidSpec(format!("need 0 <= p0' <= p1 <= 1, got p0' = {p0_prime}, p1 = {p1}")));
    }
    if n > num_nodes || num_nodes < 2 {
        return Err(Error::InvalidSpec(format!("need n <= N and N >= 2, got n = {n}, N = {num_nodes}")));
    }
    let frac = half_pair(n as u64) as f64 / half_pair(num_nodes as u64) as f64;
    Ok(p0_prime + (p1 - p0_prime) * frac)
}

/// `(master_seed, stream_index)` pair naming one independent random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeededStream { master_seed, stream_index }
    }

    /// ChaCha8 keyed by the master seed, positioned on its own 64-bit stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// SplitMix64 finaliser; derives independent sub-seeds from a master seed and a tag.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut z = master ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Where the community goes in a planted sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Placement {
    /// `spec.planted_set`, or the prefix `{0, ..., n-1}` when unset.
    #[default]
    Spec,
    /// Uniformly random subset of size `n`, drawn from the same stream.
    UniformRandom,
}

/// A sampled graph and, for planted models, its community.
#[derive(Clone, Debug)]
pub struct Sample {
    pub graph: Graph,
    pub planted: Option<NodeSubset>,
}

pub fn sample(spec: &ModelSpec, stream: SeededStream) -> Result<Sample> {
    sample_with(spec, stream, Placement::Spec)
}

pub fn sample_with(spec: &ModelSpec, stream: SeededStream, placement: Placement) -> Result<Sample> {
    spec.validate()?;
    let mut rng = stream.rng();
    let num = spec.num_nodes;
    let mut b = GraphBuilder::new(num);
    if spec.variant == Variant::Null {
        fill_pairs(&mut b, &mut rng, num, spec.p0.unwrap(), None);
        return Ok(Sample { graph: b.build(), planted: None });
    }
    let n = spec.n.unwrap();
    let community = match (placement, &spec.planted_set) {
        (Placement::UniformRandom, _) => {
            let mut v = index::sample(&mut rng, num, n).into_vec();
            v.sort_unstable();
            NodeSubset::from_sorted_unchecked(v)
        }
        (Placement::Spec, Some(s)) => s.clone(),
        (Placement::Spec, None) => NodeSubset::prefix(n),
    };
    let background = spec.background_p()?;
    let mut inside = vec![false; num];
    for v in community.iter() {
        inside[v] = true;
    }
    fill_pairs(&mut b, &mut rng, num, background, Some(&inside));
    let members = community.as_slice();
    let p1 = spec.p1.unwrap();
    let m = members.len();
    for_each_selected_pair(&mut rng, half_pair(m as u64), p1, |k| {
        let (a, c) = pair_from_index(k, m);
        b.insert(members[a], members[c]);
    });
    Ok(Sample { graph: b.build(), planted: Some(community) })
}

/// Adds each pair independently with probability `p`, skipping pairs with both
/// endpoints flagged in `skip_inside`.
fn fill_pairs(b: &mut GraphBuilder, rng: &mut ChaCha8Rng, num: usize, p: f64, skip_inside: Option<&[bool]>) {
    let mut cursor = PairCursor::new(num);
    for_each_selected_pair(rng, half_pair(num as u64), p, |k| {
        let (i, j) = cursor.seek(k);
        if let Some(inside) = skip_inside {
            if inside[i] && inside[j] {
                return;
            }
        }
        b.insert(i, j);
    });
}

/// Calls `f(k)` for each selected index `k` in `0..total` in increasing order,
/// each index being selected independently with probability `p`.
fn for_each_selected_pair<F: FnMut(u64)>(rng: &mut ChaCha8Rng, total: u64, p: f64, mut f: F) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(f);
        return;
    }
    if p < SPARSE_CUTOFF {
        let log_q = (-p).ln_1p();
        let mut k = 0u64;
        loop {
            // 1 - u lies in (0, 1]
            let u: f64 = 1.0 - rng.gen::<f64>();
            let skip = (u.ln() / log_q).floor();
            if skip >= (total - k) as f64 {
                break;
            }
            k += skip as u64;
            f(k);
            k += 1;
            if k >= total {
                break;
            }
        }
    } else {
        for k in 0..total {
            if rng.gen::<f64>() < p {
                f(k);
            }
        }
    }
}

/// Row-major position of pair `k` among `(i, j)`, `i < j < m`.
fn pair_from_index(k: u64, m: usize) -> (usize, usize) {
    let mut c = PairCursor::new(m);
    c.seek(k)
}

/// Monotone cursor mapping linear pair indices to `(i, j)`.
struct PairCursor {
    num: usize,
    row: usize,
    row_start: u64,
}

impl PairCursor {
    fn new(num: usize) -> Self {
        PairCursor { num, row: 0, row_start: 0 }
    }

    #[inline]
    fn seek(&mut self, k: u64) -> (usize, usize) {
        debug_assert!(k >= self.row_start);
        loop {
            let len = (self.num - 1 - self.row) as u64;
            if k < self.row_start + len {
                return (self.row, self.row + 1 + (k - self.row_start) as usize);
            }
            self.row_start += len;
            self.row += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_pair_examples() {
        assert_eq!(half_pair(0), 0);
        assert_eq!(half_pair(1), 0);
        assert_eq!(half_pair(2), 1);
        assert_eq!(half_pair(7), 21);
    }

    #[test]
    fn effective_p0_examples() {
        assert_eq!(effective_p0(0.2, 0.2, 10, 50).unwrap(), 0.2);
        assert!((effective_p0(0.1, 0.6, 40, 40).unwrap() - 0.6).abs() < 1e-15);
        let p = effective_p0(0.1, 0.5, 80, 400).unwrap();
        assert!((p - (0.1 + 0.4 * 6320.0 / 159_600.0)).abs() < 1e-15);
        assert!((p - 0.115_840).abs() < 1e-6);
        assert!(effective_p0(0.5, 0.1, 3, 10).is_err());
        assert!(effective_p0(0.1, 0.5, 11, 10).is_err());
    }

    #[test]
    fn pair_cursor_enumerates_upper_triangle() {
        let mut c = PairCursor::new(5);
        let got: Vec<_> = (0..10).map(|k| c.seek(k)).collect();
        let want: Vec<_> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn degenerate_probabilities() {
        let g = sample(&ModelSpec::null(12, 1.0), SeededStream::new(3, 0)).unwrap().graph;
        assert_eq!(g.total_edges(), 66);
        let g = sample(&ModelSpec::null(12, 0.0), SeededStream::new(3, 0)).unwrap().graph;
        assert_eq!(g.total_edges(), 0);
        let s = sample(&ModelSpec::planted(20, 6, 1e-9, 1.0), SeededStream::new(1, 4)).unwrap();
        assert_eq!(s.planted, Some(NodeSubset::prefix(6)));
        assert_eq!(s.graph.subgraph_edges(&NodeSubset::prefix(6)).unwrap(), 15);
        assert_eq!(s.graph.total_edges(), 15);
    }

    #[test]
    fn reproducible_and_stream_sensitive() {
        let spec = ModelSpec::planted(40, 8, 0.02, 0.7);
        let a = sample(&spec, SeededStream::new(9, 2)).unwrap().graph;
        let b = sample(&spec, SeededStream::new(9, 2)).unwrap().graph;
        let c = sample(&spec, SeededStream::new(9, 3)).unwrap().graph;
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn explicit_and_uniform_placement() {
        let set = NodeSubset::new(vec![2, 5, 7, 11]).unwrap();
        let spec = ModelSpec::planted(15, 4, 0.0, 1.0).with_planted_set(set.clone());
        let s = sample(&spec, SeededStream::new(0, 0)).unwrap();
        assert_eq!(s.graph.subgraph_edges(&set).unwrap(), 6);
        assert_eq!(s.graph.total_edges(), 6);
        let u = sample_with(&ModelSpec::planted(15, 4, 0.0, 1.0), SeededStream::new(0, 1), Placement::UniformRandom).unwrap();
        let planted = u.planted.unwrap();
        assert_eq!(planted.len(), 4);
        assert_eq!(u.graph.subgraph_edges(&planted).unwrap(), 6);
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::null(0, 0.1).validate().is_err());
        assert!(ModelSpec::null(5, 1.5).validate().is_err());
        assert!(ModelSpec::planted(10, 11, 0.1, 0.5).validate().is_err());
        assert!(ModelSpec::planted(10, 3, 0.5, 0.1).validate().is_err());
        assert!(ModelSpec::planted(10, 3, 0.1, 0.1).validate().is_ok());
        assert!(ModelSpec::planted(10, 3, 0.1, 0.5).with_planted_set(NodeSubset::prefix(2)).validate().is_err());
        assert!(ModelSpec::fixed_degree(10, 3, 0.1, 0.5).validate().is_ok());
    }

    #[test]
    fn spec_json_shape() {
        let spec = ModelSpec::planted(50, 10, 0.1, 0.9);
        let v = serde_json::to_value(&spec).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys.len(), 7);
        for k in ["N", "variant", "p0", "p0_prime", "p1", "n", "planted_set"] {
            assert!(keys.iter().any(|x| x == k), "{k}");
        }
        let back: ModelSpec = serde_json::from_value(v).unwrap();
        assert_eq!(back, spec);
        let bad = r#"{"N": 5, "variant": "Null", "p0": 0.1, "q": 1}"#;
        assert!(serde_json::from_str::<ModelSpec>(bad).is_err());
        let minimal: ModelSpec = serde_json::from_str(r#"{"N": 5, "variant": "Null", "p0": 0.1}"#).unwrap();
        assert_eq!(minimal, ModelSpec::null(5, 0.1));
    }
}
