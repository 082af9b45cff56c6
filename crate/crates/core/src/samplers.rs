//! Exact samplers: uniform Cayley trees, uniform ordered forests and
//! Galton-Watson trees conditioned on their size.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::tree_to_forest;
use crate::tree::{OrderedForest, RootedTree};
use crate::{Error, Result};

/// A reproducible random stream addressed by `(seed, stream)`.
///
/// Replicate `r` of a run with seed `s` uses `RngStream::new(s, r)`, so the
/// output of a replicate does not depend on how replicates are scheduled.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    /// Identifier of the underlying generator, recorded in run manifests.
    pub const GENERATOR: &'static str = "chacha8 (rand_chacha 0.9; seed_from_u64(seed), set_stream(replicate))";

    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Uniform real in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Exponential variate with the given rate.
    pub fn exp(&mut self, rate: f64) -> f64 {
        // 1 - U lies in (0, 1], so the logarithm is finite
        -(1.0 - self.unit()).ln() / rate
    }

    /// Uniform random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut self.rng);
        p
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

/// Uniform rooted labelled tree on `n` vertices.
///
/// A uniform Prüfer sequence is decoded in linear time into a tree rooted at
/// the largest label, which is then rerooted at an independent uniform vertex.
pub fn sample_cayley(n: usize, rng: &mut RngStream) -> Result<RootedTree> {
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    let code: Vec<usize> = (0..n.saturating_sub(2)).map(|_| rng.below(n)).collect();
    let tree = prufer_decode(n, &code);
    let root = rng.below(n);
    tree.reroot(root)
}

/// Decodes a Prüfer sequence of length `n - 2` into a tree rooted at `n - 1`.
pub fn prufer_decode(n: usize, code: &[usize]) -> RootedTree {
    assert!(n >= 1 && code.len() == n.saturating_sub(2));
    if n == 1 {
        return RootedTree::singleton();
    }
    let mut degree = vec![1usize; n];
    for &x in code {
        degree[x] += 1;
    }
    let mut parent = vec![0usize; n];
    let mut ptr = 0;
    while degree[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    for &v in code {
        parent[leaf] = v;
        degree[v] -= 1;
        if degree[v] == 1 && v < ptr {
            leaf = v;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    parent[leaf] = n - 1;
    parent[n - 1] = n - 1;
    RootedTree::from_parents_unchecked(parent, n - 1)
}

/// Uniform ordered forest on `n` vertices: a uniform tree and an independent
/// uniform vertex, sent through the tree/forest bijection.
pub fn sample_ordered_forest(n: usize, rng: &mut RngStream) -> Result<OrderedForest> {
    let t = sample_cayley(n, rng)?;
    let v = rng.below(n);
    tree_to_forest(&t, v)
}

/// A critical offspring distribution with exact rational weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OffspringLaw {
    /// Poisson with mean one.
    Poisson1,
    /// `P(i) = p (1 - p)^i` on `{0, 1, ..}`; critical only at `p = 1/2`.
    Geometric(BigRational),
    /// `P(2) = p`, `P(0) = 1 - p`; critical only at `p = 1/2`.
    Binary(BigRational),
    /// Finite probability table `P(i) = pmf[i]`.
    Table(Vec<BigRational>),
}

impl OffspringLaw {
    /// Builds a law and checks it is a critical probability distribution with
    /// positive variance.
    pub fn validated(self) -> Result<Self> {
        let half = BigRational::new(1.into(), 2.into());
        match &self {
            OffspringLaw::Poisson1 => {}
            OffspringLaw::Geometric(p) | OffspringLaw::Binary(p) => {
                if *p != half {
                    return Err(Error::InvalidParameter(format!(
                        "{self} has mean {} but the offspring mean must be 1",
                        self.mean()
                    )));
                }
            }
            OffspringLaw::Table(pmf) => {
                if pmf.iter().any(|x| x.is_negative()) {
                    return Err(Error::InvalidParameter("negative probability".into()));
                }
                let total: BigRational = pmf.iter().sum();
                if !total.is_one() {
                    return Err(Error::InvalidParameter(format!(
                        "probabilities sum to {total}, not 1"
                    )));
                }
                if !self.mean().is_one() {
                    return Err(Error::InvalidParameter(format!(
                        "offspring mean is {}, not 1",
                        self.mean()
                    )));
                }
            }
        }
        variance_of(&self)?;
        Ok(self)
    }

    pub fn mean(&self) -> BigRational {
        match self {
            OffspringLaw::Poisson1 => BigRational::one(),
            OffspringLaw::Geometric(p) => (BigRational::one() - p) / p,
            OffspringLaw::Binary(p) => p * BigRational::from_integer(2.into()),
            OffspringLaw::Table(pmf) => pmf
                .iter()
                .enumerate()
                .map(|(i, x)| x * BigRational::from_integer(BigInt::from(i)))
                .sum(),
        }
    }

    /// `sigma = sqrt(variance)` as a float.
    pub fn sigma(&self) -> Result<f64> {
        let v = variance_of(self)?;
        Ok(v.to_f64().unwrap_or(f64::NAN).sqrt())
    }

    /// Whether a sum of `n` i.i.d. offspring counts can equal `n - 1`.
    pub fn attainable(&self, n: usize) -> bool {
        if n == 0 {
            return false;
        }
        match self {
            OffspringLaw::Poisson1 | OffspringLaw::Geometric(_) => true,
            OffspringLaw::Binary(_) => n % 2 == 1,
            OffspringLaw::Table(pmf) => {
                // zero always has positive mass in a critical non-degenerate law,
                // so any representation of n - 1 uses at most n nonzero parts
                let parts: Vec<usize> = (1..pmf.len()).filter(|&i| !pmf[i].is_zero()).collect();
                let target = n - 1;
                let mut reach = vec![false; target + 1];
                reach[0] = true;
                for s in 1..=target {
                    reach[s] = parts.iter().any(|&p| p <= s && reach[s - p]);
                }
                reach[target]
            }
        }
    }

    fn draw_counts(&self, n: usize, rng: &mut RngStream) -> Result<Vec<usize>> {
        let m = n - 1;
        match self {
            OffspringLaw::Poisson1 => {
                // n i.i.d. Poisson(1) given their sum is multinomial
                let mut c = vec![0usize; n];
                for _ in 0..m {
                    c[rng.below(n)] += 1;
                }
                Ok(c)
            }
            OffspringLaw::Geometric(_) => {
                // every composition of m into n parts has the same weight 2^-(m+n)
                let bars = rand::seq::index::sample(rng, m + n - 1, n - 1);
                let mut is_bar = vec![false; m + n - 1];
                for b in bars.iter() {
                    is_bar[b] = true;
                }
                let mut c = Vec::with_capacity(n);
                let mut run = 0;
                for &bar in &is_bar {
                    if bar {
                        c.push(run);
                        run = 0;
                    } else {
                        run += 1;
                    }
                }
                c.push(run);
                Ok(c)
            }
            OffspringLaw::Binary(_) => {
                let mut c = vec![0usize; n];
                for i in rand::seq::index::sample(rng, n, m / 2).iter() {
                    c[i] = 2;
                }
                Ok(c)
            }
            OffspringLaw::Table(pmf) => {
                let mut cumulative = Vec::with_capacity(pmf.len());
                let mut acc = 0.0;
                for x in pmf {
                    acc += x.to_f64().unwrap_or(0.0);
                    cumulative.push(acc);
                }
                let budget = TABLE_REJECTION_BUDGET;
                for _ in 0..budget {
                    let mut c = Vec::with_capacity(n);
                    let mut sum = 0usize;
                    for _ in 0..n {
                        let u = rng.unit() * acc;
                        let i = cumulative.partition_point(|&x| x <= u).min(pmf.len() - 1);
                        sum += i;
                        c.push(i);
                    }
                    if sum == m {
                        return Ok(c);
                    }
                }
                Err(Error::UnattainableSize {
                    n,
                    law: format!("{self} (no success in {budget} rejection rounds)"),
                })
            }
        }
    }
}

/// Number of rejection rounds allowed when sampling from a table law.
pub const TABLE_REJECTION_BUDGET: usize = 1_000_000;

impl fmt::Display for OffspringLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OffspringLaw::Poisson1 => write!(f, "poisson1"),
            OffspringLaw::Geometric(p) => write!(f, "geom:{p}"),
            OffspringLaw::Binary(p) => write!(f, "binary:{p}"),
            OffspringLaw::Table(pmf) => {
                write!(f, "table:")?;
                for (i, x) in pmf.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for OffspringLaw {
    type Err = Error;

    /// Accepts `poisson1`, `geom:P`, `binary:P` and `table:P0,P1,..` with
    /// probabilities written as fractions (`1/2`) or decimals (`0.5`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let law = match (kind, arg) {
            ("poisson1", None) | ("poisson", Some("1")) => OffspringLaw::Poisson1,
            ("geom" | "geometric", Some(p)) => OffspringLaw::Geometric(parse_rational(p)?),
            ("binary", Some(p)) => OffspringLaw::Binary(parse_rational(p)?),
            ("table", Some(list)) => OffspringLaw::Table(parse_pmf(list)?),
            _ => return Err(Error::UnsupportedLaw(s.to_string())),
        };
        law.validated()
    }
}

/// Parses `a/b` or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(num, den))
}

/// Parses a probability table separated by commas or whitespace.
pub fn parse_pmf(s: &str) -> Result<Vec<BigRational>> {
    let pmf: Vec<BigRational> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_rational)
        .collect::<Result<_>>()?;
    if pmf.is_empty() {
        return Err(Error::Parse("empty probability table".into()));
    }
    Ok(pmf)
}

/// Exact `sum_i i (i - 1) P(i)`.
pub fn variance_of(law: &OffspringLaw) -> Result<BigRational> {
    let two = BigRational::from_integer(2.into());
    let v = match law {
        OffspringLaw::Poisson1 => BigRational::one(),
        OffspringLaw::Geometric(p) => {
            let q = BigRational::one() - p;
            &two * &q * &q / (p * p)
        }
        OffspringLaw::Binary(p) => &two * p,
        OffspringLaw::Table(pmf) => pmf
            .iter()
            .enumerate()
            .map(|(i, x)| x * BigRational::from_integer(BigInt::from(i * i.saturating_sub(1))))
            .sum(),
    };
    if !v.is_positive() {
        return Err(Error::UnsupportedLaw(format!(
            "{law} has variance {v}; a positive finite variance is required"
        )));
    }
    Ok(v)
}

/// Galton-Watson tree conditioned on `n` vertices with uniformly random labels.
///
/// Offspring counts are drawn from their exact conditional law given the sum
/// `n - 1`, rotated by the cycle lemma into a Łukasiewicz path, and read off
/// in depth-first order.
pub fn sample_conditioned_gw(
    law: &OffspringLaw,
    n: usize,
    rng: &mut RngStream,
) -> Result<RootedTree> {
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    if !law.attainable(n) {
        return Err(Error::UnattainableSize {
            n,
            law: law.to_string(),
        });
    }
    let counts = law.draw_counts(n, rng)?;
    let shape = tree_from_lukasiewicz(&cycle_lemma_rotation(&counts));
    let labels = rng.permutation(n);
    Ok(shape.relabel(&labels))
}

/// The unique cyclic shift of `counts` whose walk `sum (c_i - 1)` stays
/// nonnegative until its last step. Requires `sum c_i = len - 1`.
pub fn cycle_lemma_rotation(counts: &[usize]) -> Vec<usize> {
    let n = counts.len();
    let mut s: i64 = 0;
    let mut min = i64::MAX;
    let mut argmin = 0;
    for (i, &c) in counts.iter().enumerate() {
        s += c as i64 - 1;
        if s < min {
            min = s;
            argmin = i;
        }
    }
    debug_assert_eq!(s, -1);
    let start = (argmin + 1) % n;
    counts[start..].iter().chain(&counts[..start]).copied().collect()
}

/// Plane tree whose preorder offspring counts are `counts`, labelled by
/// preorder rank.
pub fn tree_from_lukasiewicz(counts: &[usize]) -> RootedTree {
    let n = counts.len();
    let mut parent = vec![0usize; n];
    // (vertex, children still to attach)
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for (v, &c) in counts.iter().enumerate() {
        if let Some(top) = stack.last_mut() {
            parent[v] = top.0;
            top.1 -= 1;
            if top.1 == 0 {
                stack.pop();
            }
        }
        if c > 0 {
            stack.push((v, c));
        }
    }
    RootedTree::from_parents_unchecked(parent, 0)
}
