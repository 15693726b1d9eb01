//! Univariate reproducing kernels, weighted superposition kernels, and the
//! Gram-matrix machinery used to probe space embeddings numerically.

use crate::error::{Error, Result};
use crate::families::{elementary_symmetric, OrderTailRegime, Truncation, WeightSpec};
use crate::lattice::{table_len, Dim};
use crate::table::WeightTable;
use crate::transforms::{t_up, TransformParams};
use nalgebra::DMatrix;
use std::collections::BTreeMap;

/// Built-in univariate kernels on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnivariateKernel {
    /// Anchored first-order Sobolev kernel `min(x, y)`.
    Min,
    /// Mean-zero first-order Sobolev kernel
    /// `min(x,y) - x - y + (x² + y²)/2 + 1/3`; its sections integrate to 0.
    Anova,
    /// `1` exactly on the diagonal over `(0, 1]`, else `0`.
    Indicator,
    /// `1 +` the indicator kernel; used to probe domains of transformed
    /// superpositions.
    OnePlusIndicator,
}

impl UnivariateKernel {
    pub fn from_name(name: &str) -> Option<UnivariateKernel> {
        match name {
            "min" => Some(UnivariateKernel::Min),
            "anova" => Some(UnivariateKernel::Anova),
            "indicator" => Some(UnivariateKernel::Indicator),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            UnivariateKernel::Min => "min",
            UnivariateKernel::Anova => "anova",
            UnivariateKernel::Indicator => "indicator",
            UnivariateKernel::OnePlusIndicator => "one-plus-indicator",
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            UnivariateKernel::Min => x.min(y),
            UnivariateKernel::Anova => {
                // min(x,y) - x - y collapses to -max(x,y); evaluating on the
                // sorted pair keeps the value bit-identical under swap.
                let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                0.5 * (lo * lo + hi * hi) + 1.0 / 3.0 - hi
            }
            UnivariateKernel::Indicator => {
                if x == y && x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            UnivariateKernel::OnePlusIndicator => {
                1.0 + UnivariateKernel::Indicator.eval(x, y)
            }
        }
    }

    /// `∫₀¹ k(x, y) dy`, when available in closed form.
    pub fn integral_section(&self, x: f64) -> Option<f64> {
        match self {
            UnivariateKernel::Min => Some(x - 0.5 * x * x),
            UnivariateKernel::Anova => Some(0.0),
            _ => None,
        }
    }

    /// `∬ k`, when available in closed form.
    pub fn integral_double(&self) -> Option<f64> {
        match self {
            UnivariateKernel::Min => Some(1.0 / 3.0),
            UnivariateKernel::Anova => Some(0.0),
            _ => None,
        }
    }

    /// `inf_x k(x, x)`.
    pub fn inf_diag(&self) -> f64 {
        match self {
            UnivariateKernel::Min => 0.0,
            // x² - x + 1/3 is minimal at x = 1/2.
            UnivariateKernel::Anova => 1.0 / 12.0,
            UnivariateKernel::Indicator => 0.0,
            UnivariateKernel::OnePlusIndicator => 1.0,
        }
    }
}

/// Kernels exposed by name.
pub fn builtin_kernels() -> &'static [UnivariateKernel] {
    &[
        UnivariateKernel::Min,
        UnivariateKernel::Anova,
        UnivariateKernel::Indicator,
    ]
}

/// Weights backing a superposition kernel: dense table or structured family.
#[derive(Clone, Debug)]
pub enum WeightsRepr {
    Table(WeightTable<f64>),
    Spec(WeightSpec),
}

impl WeightsRepr {
    pub fn dim(&self) -> Dim {
        match self {
            WeightsRepr::Table(t) => Dim::Finite(t.dim()),
            WeightsRepr::Spec(s) => s.dim(),
        }
    }

    /// `Σ_u γ_u Π_{j∈u} t_j` for per-coordinate values `t`, the common shape
    /// of kernel evaluation and the integral functionals.
    pub fn product_functional(&self, t: &[f64]) -> Result<f64> {
        match self {
            WeightsRepr::Table(table) => {
                let d = table.dim() as usize;
                if t.len() != d {
                    return Err(Error::DimensionMismatch(t.len() as u32, d as u32));
                }
                let n = table_len(table.dim());
                let mut prod = vec![1.0f64; n];
                let mut acc = table.values()[0];
                for bits in 1..n {
                    let low = bits.trailing_zeros() as usize;
                    prod[bits] = prod[bits & (bits - 1)] * t[low];
                    acc += table.values()[bits] * prod[bits];
                }
                Ok(acc)
            }
            WeightsRepr::Spec(spec) => match spec {
                WeightSpec::Product { seq, .. } => {
                    let mut acc = 1.0;
                    for (i, tj) in t.iter().enumerate() {
                        acc *= 1.0 + seq.get(i as u32 + 1) * tj;
                    }
                    Ok(acc)
                }
                WeightSpec::Pod { seq, order, .. } => {
                    let factors: Vec<f64> = t
                        .iter()
                        .enumerate()
                        .map(|(i, tj)| seq.get(i as u32 + 1) * tj)
                        .collect();
                    let e = elementary_symmetric(&factors, factors.len());
                    let mut acc = 0.0;
                    for (l, el) in e.iter().enumerate() {
                        acc += order.get(l as u32)? * el;
                    }
                    Ok(acc)
                }
                WeightSpec::FiniteOrder { entries, .. }
                | WeightSpec::FinSupport { entries, .. } => {
                    let mut acc = 0.0;
                    for (coords, value) in entries {
                        if let Some(&max) = coords.last() {
                            if max as usize > t.len() {
                                continue;
                            }
                        }
                        let p: f64 = coords.iter().map(|&j| t[j as usize - 1]).product();
                        acc += value * p;
                    }
                    Ok(acc)
                }
            },
        }
    }
}

/// Weighted superposition `K(x, y) = Σ_u γ_u Π_{j∈u} k(x_j, y_j)`.
#[derive(Clone, Debug)]
pub struct SuperpositionKernel {
    pub weights: WeightsRepr,
    pub kernel: UnivariateKernel,
    pub d: u32,
    pub truncation: Truncation,
}

impl SuperpositionKernel {
    pub fn new(weights: WeightsRepr, kernel: UnivariateKernel, d: u32) -> Result<Self> {
        if let Dim::Finite(wd) = weights.dim() {
            if matches!(weights, WeightsRepr::Table(_)) && wd != d {
                return Err(Error::DimensionMismatch(wd, d));
            }
        }
        Ok(SuperpositionKernel {
            weights,
            kernel,
            d,
            truncation: Truncation::default(),
        })
    }

    fn kernel_values(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d as usize || y.len() != self.d as usize {
            return Err(Error::DimensionMismatch(x.len() as u32, self.d));
        }
        let (lo, hi) = self.kernel.domain();
        for v in x.iter().chain(y.iter()) {
            if *v < lo || *v > hi {
                return Err(Error::DomainViolation(format!(
                    "coordinate {v} outside [{lo}, {hi}]"
                )));
            }
        }
        Ok(x.iter()
            .zip(y)
            .map(|(a, b)| self.kernel.eval(*a, *b))
            .collect())
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let k = self.kernel_values(x, y)?;
        self.weights.product_functional(&k)
    }

    /// Gram matrix on a point set.
    pub fn gram(&self, points: &[Vec<f64>]) -> Result<DMatrix<f64>> {
        let n = points.len();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.eval(&points[i], &points[j])?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }
}

/// A point of the countable product domain: an anchor value with finitely
/// many overrides.
#[derive(Clone, Debug)]
pub struct InfinitePoint {
    pub anchor: f64,
    pub overrides: BTreeMap<u32, f64>,
}

impl InfinitePoint {
    pub fn constant(anchor: f64) -> Self {
        InfinitePoint {
            anchor,
            overrides: BTreeMap::new(),
        }
    }

    pub fn coordinate(&self, j: u32) -> f64 {
        self.overrides.get(&j).copied().unwrap_or(self.anchor)
    }
}

/// Membership of a point in the maximal domain
/// `{x : Σ_u γ_u Π_{j∈u} k(x_j, x_j) < ∞}`.
///
/// Finite dimension is always inside. For infinite dimension the decision
/// uses family structure; inputs outside the certifiable cases are an error,
/// not a guess.
pub fn domain_membership(
    weights: &WeightsRepr,
    kernel: UnivariateKernel,
    point: &InfinitePoint,
) -> Result<bool> {
    match weights.dim() {
        Dim::Finite(_) => Ok(true),
        Dim::Infinite => match weights {
            WeightsRepr::Table(_) => Ok(true),
            WeightsRepr::Spec(spec) => match spec {
                WeightSpec::FinSupport { .. } | WeightSpec::FiniteOrder { .. } => {
                    // Finitely many entries, each a finite product.
                    Ok(true)
                }
                WeightSpec::Product { seq, .. } => {
                    // Convergence of Σ γ_j k(x_j, x_j): overrides are finite,
                    // so only the anchor diagonal and the factor tail matter.
                    let anchor_diag = kernel.eval(point.anchor, point.anchor);
                    if anchor_diag == 0.0 || seq.sum_powered_is_finite(1.0) {
                        Ok(true)
                    } else {
                        Ok(false)
                    }
                }
                WeightSpec::Pod { seq, a, c_a, .. } => {
                    let diag_max = point
                        .overrides
                        .values()
                        .map(|v| kernel.eval(*v, *v))
                        .fold(kernel.eval(point.anchor, point.anchor), f64::max);
                    if diag_max == 0.0 {
                        return Ok(true);
                    }
                    match OrderTailRegime::for_factors(seq, *a, *c_a, diag_max) {
                        Ok(regime) => {
                            if regime.series_total(0).is_finite() {
                                Ok(true)
                            } else {
                                Err(Error::Undecidable(
                                    "diagonal order sum is not certifiably finite".into(),
                                ))
                            }
                        }
                        Err(e) => Err(e),
                    }
                }
            },
        },
    }
}

/// Superposition value at points of the countable product domain, with a
/// certified truncation of the coordinate tail.
///
/// Product weights admit the closed form `Π_j (1 + γ_j k(x_j, y_j))`: beyond
/// the overrides the factor is constant, so the tail of the logarithm series
/// is enclosed by the first-order term plus a second-order error bound.
/// Explicit entry maps are finite sums and evaluate exactly. Other families
/// have no certified infinite evaluation and are refused.
pub fn superposition_eval_infinite(
    weights: &WeightsRepr,
    kernel: UnivariateKernel,
    x: &InfinitePoint,
    y: &InfinitePoint,
) -> Result<crate::bounds::Bounds> {
    use crate::bounds::Bounds;
    let WeightsRepr::Spec(spec) = weights else {
        return Err(Error::InvalidArgument(
            "dense tables are finite-dimensional; evaluate them directly".into(),
        ));
    };
    match spec {
        WeightSpec::FinSupport { entries, .. } | WeightSpec::FiniteOrder { entries, .. } => {
            let mut acc = 0.0;
            for (coords, value) in entries {
                let p: f64 = coords
                    .iter()
                    .map(|&j| kernel.eval(x.coordinate(j), y.coordinate(j)))
                    .product();
                acc += value * p;
            }
            Ok(Bounds::point(acc).widen(1e-13))
        }
        WeightSpec::Product { seq, d } => {
            if let Dim::Finite(dd) = d {
                let mut acc = 1.0;
                for j in 1..=*dd {
                    acc *= 1.0 + seq.get(j) * kernel.eval(x.coordinate(j), y.coordinate(j));
                }
                return Ok(Bounds::point(acc).widen(1e-13));
            }
            let last_override = x
                .overrides
                .keys()
                .chain(y.overrides.keys())
                .max()
                .copied()
                .unwrap_or(0);
            let kappa = kernel.eval(x.anchor, y.anchor);
            let cutoff = last_override.max(4096);
            let mut head = 1.0f64;
            for j in 1..=cutoff {
                let f = 1.0 + seq.get(j) * kernel.eval(x.coordinate(j), y.coordinate(j));
                if f <= 0.0 {
                    return Ok(Bounds::point(0.0));
            }
                head *= f;
            }
            if kappa == 0.0 {
                return Ok(Bounds::point(head).widen(2.0 * cutoff as f64 * f64::EPSILON));
            }
            let t1 = seq.tail_powered(cutoff, 1.0);
            let t2 = seq.tail_powered(cutoff, 2.0);
            if !t1.is_finite() {
                return Err(Error::DomainViolation(
                    "coordinate tail of the diagonal sum diverges".into(),
                ));
            }
            let xmax = seq.get(cutoff + 1) * kappa.abs();
            if xmax >= 0.5 {
                return Err(Error::Numerical(
                    "tail factors too large for a certified truncation".into(),
                ));
            }
            // ln(1 + γ_j κ) = γ_j κ + θ·(γ_j κ)²/(2(1-|γ_j κ|)), |θ| ≤ 1.
            let err = kappa * kappa * t2.hi / (2.0 * (1.0 - xmax));
            let ln_tail = if kappa >= 0.0 {
                Bounds::new(kappa * t1.lo - err, kappa * t1.hi + err)
            } else {
                Bounds::new(kappa * t1.hi - err, kappa * t1.lo + err)
            };
            Ok(Bounds::point(head)
                .widen(2.0 * cutoff as f64 * f64::EPSILON)
                .mul(&ln_tail.exp()))
        }
        WeightSpec::Pod { .. } => Err(Error::Undecidable(
            "no certified infinite evaluation for order-dependent weights; truncate first".into(),
        )),
    }
}

/// Domain analysis for the layered indicator construction with weights
/// `2^{-j}` on the blocks `{1, ..., 2^j}`, all levels included.
///
/// With the indicator kernel itself every point is inside (the weight sum
/// converges). With `1 +` the indicator, the diagonal sum has the terms
/// `2^{a_j(x) - j}` where `a_j` counts positive coordinates in the block, so
/// points with all coordinates positive fall outside.
pub fn layered_indicator_domains(point: &InfinitePoint) -> (bool, bool) {
    let base = true;
    let positives_bounded = if point.anchor > 0.0 {
        // All but finitely many coordinates are positive: a_j ~ 2^j.
        false
    } else {
        // Only overrides can be positive: a_j is eventually constant.
        true
    };
    (base, positives_bounded)
}

/// Symmetric-eigenvalue range of a symmetric matrix.
pub fn symmetric_eigen_range(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = m.clone().symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in eig.eigenvalues.iter() {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    (lo, hi)
}

/// Gram matrix of a univariate kernel on scalar points.
pub fn gram_univariate(kernel: UnivariateKernel, xs: &[f64]) -> DMatrix<f64> {
    let n = xs.len();
    DMatrix::from_fn(n, n, |i, j| kernel.eval(xs[i], xs[j]))
}

fn jitter(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let eps = 1e-12 * m.trace() / n as f64;
    for i in 0..n {
        m[(i, i)] += eps.max(1e-300);
    }
}

/// Certified-from-below estimate of the norm of the embedding of the space
/// of `k` into the space of `1 + l`, over the span of kernel sections at the
/// given points.
///
/// For a combination `f = Σ a_i k(·, x_i)` the squared source norm is
/// `aᵀ G_k a`, and the minimum-norm interpolant of its values in the target
/// space has squared norm `fᵀ G_{1+l}^{-1} f` with `f = G_k a`, a lower
/// bound on the true target norm. Maximizing the ratio is the largest
/// generalized eigenvalue of `(G_k G_{1+l}^{-1} G_k) a = λ G_k a`.
pub fn embedding_norm_lower_bound(
    k: UnivariateKernel,
    l: UnivariateKernel,
    xs: &[f64],
) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("need at least one point".into()));
    }
    let mut g_k = gram_univariate(k, xs);
    let mut g_1l = gram_univariate(l, xs).add_scalar(1.0);
    jitter(&mut g_k);
    jitter(&mut g_1l);

    let chol_k = g_k
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("source Gram matrix is singular".into()))?;
    let chol_1l = g_1l
        .cholesky()
        .ok_or_else(|| Error::Numerical("target Gram matrix is singular".into()))?;
    // M = G_k G_{1+l}^{-1} G_k, then W = L^{-1} M L^{-T} for G_k = L Lᵀ.
    let mut m = g_k.clone();
    chol_1l.solve_mut(&mut m);
    let m = g_k * m;
    let l_inv_m = chol_k.l().solve_lower_triangular(&m).ok_or_else(|| {
        Error::Numerical("triangular solve failed".into())
    })?;
    let w = chol_k
        .l()
        .solve_lower_triangular(&l_inv_m.transpose())
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let sym = 0.5 * (&w + w.transpose());
    let (_, hi) = symmetric_eigen_range(&sym);
    Ok(hi.max(0.0).sqrt())
}

/// Doubles an equispaced point set until the lower bound stabilizes; the
/// basis of the automatic choice of the embedding constant.
pub fn converged_embedding_lower_bound(
    k: UnivariateKernel,
    l: UnivariateKernel,
) -> Result<f64> {
    let mut n = 8usize;
    let mut prev = 0.0f64;
    loop {
        let xs: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        let c = embedding_norm_lower_bound(k, l, &xs)?;
        if n >= 512 || (c - prev).abs() <= 1e-3 * c.max(1e-300) {
            return Ok(c.max(prev));
        }
        prev = c;
        n *= 2;
    }
}

/// Report of a positive-semidefiniteness probe of the embedding criterion.
#[derive(Clone, Debug)]
pub struct EmbeddingReport {
    pub points_used: usize,
    pub c: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub pass: bool,
    /// Empirical lower bound on the univariate embedding norm at the same
    /// points.
    pub c_lb: f64,
}

/// Relative eigenvalue tolerance of the PSD verdict.
pub const EMBEDDING_TOL_REL: f64 = 1e-8;

/// Builds the transformed weights at constant `c`, assembles the Gram
/// matrices of both superpositions on the points, and reports the spectrum
/// of their difference. Positive semidefiniteness is a necessary condition
/// for the containment of the source space in the target space, never a
/// proof.
pub fn verify_embedding(
    k: UnivariateKernel,
    l: UnivariateKernel,
    c: f64,
    weights: &WeightsRepr,
    points: &[Vec<f64>],
    d: u32,
) -> Result<EmbeddingReport> {
    verify_embedding_with_tol(k, l, c, weights, points, d, EMBEDDING_TOL_REL)
}

/// [`verify_embedding`] with an explicit relative eigenvalue tolerance.
#[allow(clippy::too_many_arguments)]
pub fn verify_embedding_with_tol(
    k: UnivariateKernel,
    l: UnivariateKernel,
    c: f64,
    weights: &WeightsRepr,
    points: &[Vec<f64>],
    d: u32,
    tol_rel: f64,
) -> Result<EmbeddingReport> {
    if c <= 0.0 {
        return Err(Error::InvalidArgument("embedding constant must be positive".into()));
    }
    let table = match weights {
        WeightsRepr::Table(t) => t.clone(),
        WeightsRepr::Spec(s) => s.truncate_to_table(d)?,
    };
    let params = TransformParams::finite(c, d)?;
    let up = t_up(&table, &params)?;
    let base = SuperpositionKernel::new(WeightsRepr::Table(table), k, d)?;
    let lifted = SuperpositionKernel::new(WeightsRepr::Table(up), l, d)?;
    let g_base = base.gram(points)?;
    let g_lifted = lifted.gram(points)?;
    let diff = g_lifted - g_base;
    let (min_eigenvalue, max_eigenvalue) = symmetric_eigen_range(&diff);
    let pass = min_eigenvalue >= -tol_rel * max_eigenvalue.max(1e-300);
    let flat: Vec<f64> = points.iter().flat_map(|p| p.iter().copied()).collect();
    let mut dedup = flat.clone();
    dedup.sort_by(f64::total_cmp);
    dedup.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let c_lb = embedding_norm_lower_bound(k, l, &dedup).unwrap_or(f64::NAN);
    Ok(EmbeddingReport {
        points_used: points.len(),
        c,
        min_eigenvalue,
        max_eigenvalue,
        pass,
        c_lb,
    })
}

/// Random search for a point set violating the PSD criterion; the negative
/// control showing that an undersized constant breaks the containment.
pub fn find_embedding_violation(
    k: UnivariateKernel,
    l: UnivariateKernel,
    c: f64,
    weights: &WeightsRepr,
    d: u32,
    seed: u64,
    attempts: u32,
) -> Result<Option<(Vec<Vec<f64>>, f64)>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    for trial in 0..attempts {
        let n = 1 + (trial as usize % 16);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(0.0..=1.0)).collect())
            .collect();
        let report = verify_embedding(k, l, c, weights, &points, d)?;
        if !report.pass {
            return Ok(Some((points, report.min_eigenvalue)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::SequenceSpec;

    #[test]
    fn min_kernel_closed_forms() {
        let k = UnivariateKernel::Min;
        assert_eq!(k.eval(0.25, 0.75), 0.25);
        assert!((k.integral_section(0.5).unwrap() - 0.375).abs() < 1e-15);
        assert!((k.integral_double().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // 2x2 Gram on {0.25, 0.75} is positive definite.
        let g = gram_univariate(k, &[0.25, 0.75]);
        assert_eq!(g[(0, 0)], 0.25);
        assert_eq!(g[(0, 1)], 0.25);
        assert_eq!(g[(1, 1)], 0.75);
        let (lo, _) = symmetric_eigen_range(&g);
        assert!(lo > 0.0);
    }

    #[test]
    fn anova_kernel_validates() {
        let k = UnivariateKernel::Anova;
        // Sections integrate to zero: quadrature over a fine grid.
        for &y in &[0.0, 0.3, 0.77, 1.0] {
            let n = 200_000;
            let integral: f64 = (0..n)
                .map(|i| k.eval((i as f64 + 0.5) / n as f64, y))
                .sum::<f64>()
                / n as f64;
            assert!(integral.abs() < 1e-11, "section at {y}: {integral}");
        }
        // Reproducing property for zero-mean polynomials: with sections of
        // zero mean the inner product reduces to ∫ ∂_x k(x,y) f'(x) dx.
        // f(x) = x² - 1/3: f' = 2x.
        let f = |x: f64| x * x - 1.0 / 3.0;
        let fp = |x: f64| 2.0 * x;
        for &y in &[0.2, 0.5, 0.9] {
            let n = 200_000;
            let mut acc = 0.0;
            for i in 0..n {
                let x = (i as f64 + 0.5) / n as f64;
                let dk = if x < y { 1.0 } else { 0.0 } - 1.0 + x;
                acc += dk * fp(x);
            }
            acc /= n as f64;
            assert!((acc - f(y)).abs() < 1e-9, "at {y}: {acc} vs {}", f(y));
        }
        assert!((k.inf_diag() - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn indicator_kernel_diag() {
        let k = UnivariateKernel::Indicator;
        assert_eq!(k.eval(0.0, 0.0), 0.0);
        assert_eq!(k.eval(0.5, 0.5), 1.0);
        assert_eq!(k.eval(0.5, 0.7), 0.0);
        assert_eq!(k.inf_diag(), 0.0);
        assert!(k.integral_double().is_none());
    }

    #[test]
    fn superposition_product_closed_form_and_table_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(21);
        let d = 8u32;
        let seq = SequenceSpec::Explicit((0..d).map(|j| 0.9f64.powi(j as i32)).collect());
        let spec = WeightSpec::Product {
            seq,
            d: Dim::Finite(d),
        };
        let via_spec =
            SuperpositionKernel::new(WeightsRepr::Spec(spec.clone()), UnivariateKernel::Min, d)
                .unwrap();
        let via_table = SuperpositionKernel::new(
            WeightsRepr::Table(spec.truncate_to_table(d).unwrap()),
            UnivariateKernel::Min,
            d,
        )
        .unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let y: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let a = via_spec.eval(&x, &y).unwrap();
            let b = via_table.eval(&x, &y).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        // Degenerate weights: only the empty set → the constant kernel.
        let table = WeightTable::new(1, vec![1.0, 0.0]).unwrap();
        let konst =
            SuperpositionKernel::new(WeightsRepr::Table(table), UnivariateKernel::Min, 1).unwrap();
        assert_eq!(konst.eval(&[0.3], &[0.9]).unwrap(), 1.0);
        // Product with unit factors at the diagonal corner.
        let ones = WeightSpec::Product {
            seq: SequenceSpec::Explicit(vec![1.0, 1.0]),
            d: Dim::Finite(2),
        };
        let kk = SuperpositionKernel::new(WeightsRepr::Spec(ones), UnivariateKernel::Min, 2)
            .unwrap();
        assert_eq!(kk.eval(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), 4.0);
    }

    #[test]
    fn cauchy_schwarz_on_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(9);
        let d = 4u32;
        let vals: Vec<f64> = (0..16).map(|_| rng.gen_range(0.0..1.0)).collect();
        let table = WeightTable::new(d, vals).unwrap();
        let kern =
            SuperpositionKernel::new(WeightsRepr::Table(table), UnivariateKernel::Anova, d)
                .unwrap();
        for _ in 0..200 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let y: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let kxy = kern.eval(&x, &y).unwrap();
            let kxx = kern.eval(&x, &x).unwrap();
            let kyy = kern.eval(&y, &y).unwrap();
            assert!(kxy * kxy <= kxx * kyy + 1e-10);
        }
    }

    #[test]
    fn domain_membership_cases() {
        let summable = WeightsRepr::Spec(WeightSpec::Product {
            seq: SequenceSpec::PowerLaw { c: 1.0, lambda: 2.0 },
            d: Dim::Infinite,
        });
        let x = InfinitePoint::constant(1.0);
        assert!(domain_membership(&summable, UnivariateKernel::Min, &x).unwrap());

        let harmonic = WeightsRepr::Spec(WeightSpec::Product {
            seq: SequenceSpec::PowerLaw { c: 1.0, lambda: 1.0 },
            d: Dim::Infinite,
        });
        // Anchor 0 zeroes the diagonal of the anchored kernel.
        assert!(
            domain_membership(&harmonic, UnivariateKernel::Min, &InfinitePoint::constant(0.0))
                .unwrap()
        );
        assert!(
            !domain_membership(&harmonic, UnivariateKernel::Min, &InfinitePoint::constant(1.0))
                .unwrap()
        );

        // Layered indicator construction: base side always in, lifted side
        // only for points with finitely many positive coordinates.
        let all_positive = InfinitePoint::constant(0.5);
        let (base, lifted) = layered_indicator_domains(&all_positive);
        assert!(base && !lifted);
        let mut few = InfinitePoint::constant(0.0);
        few.overrides.insert(3, 0.7);
        let (base, lifted) = layered_indicator_domains(&few);
        assert!(base && lifted);
    }

    #[test]
    fn infinite_superposition_certified_truncation() {
        use crate::lattice::Dim;
        let spec = WeightSpec::Product {
            seq: SequenceSpec::PowerLaw { c: 1.0, lambda: 2.0 },
            d: Dim::Infinite,
        };
        let weights = WeightsRepr::Spec(spec.clone());
        // Anchored at zero the tail is exact for the anchored kernel.
        let mut x = InfinitePoint::constant(0.0);
        x.overrides.insert(1, 0.5);
        x.overrides.insert(3, 0.25);
        let v = superposition_eval_infinite(&weights, UnivariateKernel::Min, &x, &x).unwrap();
        let expect = (1.0 + 0.5) * (1.0 + 0.25 / 9.0);
        assert!(v.contains(expect), "{v:?} vs {expect}");

        // Constant positive anchor: compare with a long direct product,
        // completed by the remaining first-order tail.
        let y = InfinitePoint::constant(0.5);
        let v = superposition_eval_infinite(&weights, UnivariateKernel::Min, &y, &y).unwrap();
        let n = 3_000_000u64;
        let direct: f64 = (1..=n).map(|j| 1.0 + 0.5 / (j as f64 * j as f64)).product();
        let completed = direct * (0.5 / n as f64).exp();
        assert!(
            (v.mid() - completed).abs() <= 1e-7 * completed,
            "{v:?} vs {completed}"
        );
        assert!(v.rel_width() < 1e-8);

        // Explicit support is exact.
        let ext = crate::families::extremal_example(2).unwrap();
        let v = superposition_eval_infinite(
            &WeightsRepr::Spec(ext),
            UnivariateKernel::Indicator,
            &y,
            &y,
        )
        .unwrap();
        assert!(v.contains(0.5 + 0.25));
    }

    #[test]
    fn lower_bound_single_point_closed_form() {
        let k = UnivariateKernel::Min;
        let l = UnivariateKernel::Min;
        for &x in &[0.3, 0.8] {
            let c = embedding_norm_lower_bound(k, l, &[x]).unwrap();
            let expect = (k.eval(x, x) / (1.0 + l.eval(x, x))).sqrt();
            assert!((c - expect).abs() < 1e-6, "{c} vs {expect}");
        }
    }

    #[test]
    fn lower_bound_monotone_and_capped_for_identical_kernels() {
        let k = UnivariateKernel::Min;
        let mut prev = 0.0;
        for n in [4usize, 8, 16, 32] {
            let xs: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
            let c = embedding_norm_lower_bound(k, k, &xs).unwrap();
            assert!(c <= 1.0 + 1e-8);
            assert!(c >= prev - 1e-9, "{c} < {prev}");
            prev = c;
        }
    }

    #[test]
    fn min_anova_lower_bound_converges_to_known_norm() {
        // The embedding of the anchored space into the constants-plus-ANOVA
        // space has norm √(4/3): the mean bound (∫f)² ≤ 1/3 ∫(f')² is tight
        // for f(x) = x - x²/2.
        let c = converged_embedding_lower_bound(UnivariateKernel::Min, UnivariateKernel::Anova)
            .unwrap();
        let expect = (4.0f64 / 3.0).sqrt();
        assert!((c - expect).abs() < 2e-3, "{c} vs {expect}");
    }

    #[test]
    fn embedding_verification_same_kernel() {
        let spec = WeightSpec::Product {
            seq: SequenceSpec::PowerLaw { c: 1.0, lambda: 2.0 },
            d: Dim::Finite(2),
        };
        let weights = WeightsRepr::Spec(spec);
        let points: Vec<Vec<f64>> = (0..50)
            .map(|i| {
                let t = (i as f64 + 0.5) / 50.0;
                vec![t, (3.0 * t) % 1.0]
            })
            .collect();
        let report = verify_embedding(
            UnivariateKernel::Min,
            UnivariateKernel::Min,
            1.0,
            &weights,
            &points,
            2,
        )
        .unwrap();
        assert!(report.pass, "{report:?}");
        // Undersized constant: the random search finds a violation.
        let violation = find_embedding_violation(
            UnivariateKernel::Min,
            UnivariateKernel::Min,
            0.5,
            &weights,
            2,
            1234,
            64,
        )
        .unwrap();
        assert!(violation.is_some());
    }
}
