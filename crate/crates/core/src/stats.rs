//! Reference limit laws, empirical distributions and goodness-of-fit checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{Error, Result};

/// KS acceptance threshold for the chi and Rayleigh claims on Cayley trees.
pub const KS_THRESHOLD: f64 = 0.05;
/// KS acceptance threshold for record counts on Galton-Watson trees.
pub const KS_THRESHOLD_GW: f64 = 0.06;
/// Largest accepted relative error of the first two moments.
pub const MOMENT_TOLERANCE: f64 = 0.05;
/// Significance level for chi-square goodness of fit.
pub const CHI_SQUARE_ALPHA: f64 = 1e-3;

/// `P(R <= x) = 1 - exp(-x^2 / 2)`; zero for negative `x`.
pub fn rayleigh_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-x * x / 2.0).exp_m1()
    }
}

/// `P(R >= x) = exp(-x^2 / 2)`.
pub fn rayleigh_tail(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        (-x * x / 2.0).exp()
    }
}

/// CDF of the chi law with `2k` degrees of freedom, as the finite sum
/// `1 - exp(-y) sum_{j<k} y^j / j!` with `y = x^2 / 2`.
pub fn chi2k_cdf(k: u32, x: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if k == 1 {
        return Ok(rayleigh_cdf(x));
    }
    let y = x * x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..k {
        term *= y / j as f64;
        sum += term;
    }
    Ok((1.0 - (-y).exp() * sum).clamp(0.0, 1.0))
}

/// Density `2^(1-k) s^(2k-1) exp(-s^2/2) / (k-1)!`.
pub fn chi2k_density(k: u32, s: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if s < 0.0 {
        return Ok(0.0);
    }
    let mut fact = 1.0;
    for j in 1..k {
        fact *= j as f64;
    }
    Ok(2f64.powi(1 - k as i32) * s.powi(2 * k as i32 - 1) * (-s * s / 2.0).exp() / fact)
}

/// A limit law used as a reference, optionally rescaled by `scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceLaw {
    Rayleigh { scale: f64 },
    Chi2k { k: u32, scale: f64 },
}

impl ReferenceLaw {
    pub fn rayleigh() -> Self {
        ReferenceLaw::Rayleigh { scale: 1.0 }
    }

    pub fn chi2k(k: u32) -> Self {
        ReferenceLaw::Chi2k { k, scale: 1.0 }
    }

    fn parts(&self) -> (u32, f64) {
        match *self {
            ReferenceLaw::Rayleigh { scale } => (1, scale),
            ReferenceLaw::Chi2k { k, scale } => (k, scale),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (k, scale) = self.parts();
        chi2k_cdf(k, x / scale).unwrap_or(f64::NAN)
    }

    pub fn density(&self, x: f64) -> f64 {
        let (k, scale) = self.parts();
        chi2k_density(k, x / scale).unwrap_or(f64::NAN) / scale
    }

    /// `E[X^order]` by adaptive quadrature of the density.
    pub fn moment(&self, order: u32) -> f64 {
        let (k, scale) = self.parts();
        let upper = scale * (2.0 * (k as f64).sqrt() + 40.0);
        integrate(|x| x.powi(order as i32) * self.density(x), 0.0, upper, 1e-12)
    }

    pub fn name(&self) -> String {
        match *self {
            ReferenceLaw::Rayleigh { scale } if scale == 1.0 => "rayleigh".into(),
            ReferenceLaw::Rayleigh { scale } => format!("rayleigh(scale={scale})"),
            ReferenceLaw::Chi2k { k, scale } if scale == 1.0 => format!("chi_{k}"),
            ReferenceLaw::Chi2k { k, scale } => format!("chi_{k}(scale={scale})"),
        }
    }
}

/// Adaptive Simpson quadrature.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = (a + b) / 2.0;
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    // start from unit-width panels so narrow peaks are not skipped
    let panels = ((b - a).abs().ceil() as usize).max(8);
    let h = (b - a) / panels as f64;
    let tol = tol / panels as f64;
    (0..panels)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (flo, fhi) = (f(lo), f(hi));
            let (m, fm, whole) = simpson(&f, lo, flo, hi, fhi);
            rec(&f, lo, flo, hi, fhi, m, fm, whole, tol, 50)
        })
        .sum()
}

/// Sorted sample of real values.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("empty sample".into()));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::InvalidParameter("sample contains NaN".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Fraction of samples `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.len() as f64
    }

    pub fn moment(&self, order: u32) -> f64 {
        self.samples.iter().map(|x| x.powi(order as i32)).sum::<f64>() / self.len() as f64
    }

    pub fn median(&self) -> f64 {
        let n = self.len();
        if n % 2 == 1 {
            self.samples[n / 2]
        } else {
            (self.samples[n / 2 - 1] + self.samples[n / 2]) / 2.0
        }
    }

    /// `(sample, empirical CDF, reference CDF)` at every sample point.
    pub fn cdf_table(&self, law: &ReferenceLaw) -> Vec<(f64, f64, f64)> {
        let n = self.len() as f64;
        self.samples
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, (i + 1) as f64 / n, law.cdf(x)))
            .collect()
    }
}

/// Kolmogorov-Smirnov distance `sup |F_N - F|`, taking both one-sided
/// suprema at every sample point.
pub fn ks_distance(samples: &EmpiricalDistribution, law: &ReferenceLaw) -> f64 {
    ks_distance_with(samples, |x| law.cdf(x))
}

/// KS distance against an arbitrary continuous CDF.
pub fn ks_distance_with<F: Fn(f64) -> f64>(samples: &EmpiricalDistribution, cdf: F) -> f64 {
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    let xs = samples.samples();
    let mut i = 0;
    while i < xs.len() {
        // ties: the empirical CDF jumps once over the whole run
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d.max(f - i as f64 / n).max((j + 1) as f64 / n - f);
        i = j + 1;
    }
    d
}

/// Two-sample KS distance `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (xs, ys) = (a.samples(), b.samples());
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// `|empirical moment - law moment| / law moment` for order 1 or 2.
pub fn moment_check(samples: &EmpiricalDistribution, law: &ReferenceLaw, order: u32) -> Result<f64> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "moment order must be 1 or 2, got {order}"
        )));
    }
    let exact = law.moment(order);
    Ok((samples.moment(order) - exact).abs() / exact)
}

/// Result of a chi-square goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

impl ChiSquare {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// Pearson chi-square test of `observed` counts against cell probabilities
/// `expected` (which must sum to one). Cells with zero expected mass must
/// have zero observations.
pub fn chi_square_test(observed: &[u64], expected: &[f64]) -> Result<ChiSquare> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::InvalidParameter(
            "chi-square needs matching observed/expected vectors with at least two cells".into(),
        ));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::InvalidParameter("no observations".into()));
    }
    let n = total as f64;
    let mut stat = 0.0;
    let mut cells = 0;
    for (&o, &p) in observed.iter().zip(expected) {
        if p <= 0.0 {
            if o > 0 {
                return Ok(ChiSquare {
                    statistic: f64::INFINITY,
                    df: observed.len() - 1,
                    p_value: 0.0,
                });
            }
            continue;
        }
        let e = n * p;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let df = cells.max(2) - 1;
    let law = ChiSquared::new(df as f64).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(ChiSquare {
        statistic: stat,
        df,
        p_value: 1.0 - law.cdf(stat),
    })
}

/// Chi-square test that within each block all cells are equally likely.
///
/// Block totals are taken as given, so a block of `c` cells contributes
/// `c - 1` degrees of freedom. Blocks with no observations are skipped.
pub fn blocks_chi_square(blocks: &[Vec<u64>]) -> Result<ChiSquare> {
    let mut stat = 0.0;
    let mut df = 0usize;
    for block in blocks {
        let total: u64 = block.iter().sum();
        if total == 0 || block.len() < 2 {
            continue;
        }
        let e = total as f64 / block.len() as f64;
        stat += block.iter().map(|&o| (o as f64 - e).powi(2) / e).sum::<f64>();
        df += block.len() - 1;
    }
    if df == 0 {
        return Ok(ChiSquare {
            statistic: 0.0,
            df: 0,
            p_value: 1.0,
        });
    }
    let law = ChiSquared::new(df as f64).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(ChiSquare {
        statistic: stat,
        df,
        p_value: 1.0 - law.cdf(stat),
    })
}
