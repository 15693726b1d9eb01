//! Structured weight families: product, product-and-order-dependent (POD),
//! finite-order, and finitely supported weights.
//!
//! These are the representations that stay meaningful for `d = ∞`. Every
//! quantity derived from an infinite family (sums, products, transformed
//! entries) is reported as a certified enclosure ([`Bounds`]): truncation
//! tails are bounded mathematically, never dropped silently.

use crate::bounds::{geometric_tail_powered, zeta_from, Bounds};
use crate::error::{Error, Result};
use crate::lattice::{check_coords, format_coords, Coords, Dim, Subset};
use crate::scalar::{Rational, Scalar};
use crate::table::WeightTable;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Default truncation policy for certified evaluations.
#[derive(Clone, Copy, Debug)]
pub struct Truncation {
    /// Target relative width of reported enclosures.
    pub rel_tol: f64,
    /// Hard cap on the coordinate cutoff.
    pub coord_cap: u32,
    /// Hard cap on the order cutoff.
    pub order_cap: u32,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            rel_tol: 1e-10,
            coord_cap: 1 << 16,
            order_cap: 400,
        }
    }
}

/// Symbolic non-increasing sequence `(γ_j)_{j ≥ 1}` of non-negative reals.
#[derive(Clone, Debug, PartialEq)]
pub enum SequenceSpec {
    /// `γ_j = c · j^{-λ}`.
    PowerLaw { c: f64, lambda: f64 },
    /// `γ_j = c · q^j`.
    Geometric { c: f64, q: f64 },
    /// Explicit head, zero beyond the list.
    Explicit(Vec<f64>),
    /// `γ_j = mul · k·b_j / (1 + k·b_j)` for a base sequence `b`; the factor
    /// sequence produced by the forward transform of product weights.
    Squash {
        base: Box<SequenceSpec>,
        k: f64,
        mul: f64,
    },
}

impl SequenceSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceSpec::PowerLaw { c, lambda } => {
                if *c < 0.0 || *lambda < 0.0 {
                    return Err(Error::InvalidArgument(
                        "power-law sequence needs c >= 0 and lambda >= 0".into(),
                    ));
                }
            }
            SequenceSpec::Geometric { c, q } => {
                if *c < 0.0 || !(0.0..=1.0).contains(q) {
                    return Err(Error::InvalidArgument(
                        "geometric sequence needs c >= 0 and 0 <= q <= 1".into(),
                    ));
                }
            }
            SequenceSpec::Explicit(v) => {
                for w in v.windows(2) {
                    if w[1] > w[0] {
                        return Err(Error::InvalidArgument(
                            "explicit sequence must be non-increasing".into(),
                        ));
                    }
                }
                if v.iter().any(|x| *x < 0.0) {
                    return Err(Error::InvalidArgument(
                        "explicit sequence must be non-negative".into(),
                    ));
                }
            }
            SequenceSpec::Squash { base, k, mul } => {
                base.validate()?;
                if *k < 0.0 || *mul < 0.0 {
                    return Err(Error::InvalidArgument(
                        "squash parameters must be non-negative".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `γ_j`, 1-based.
    pub fn get(&self, j: u32) -> f64 {
        debug_assert!(j >= 1);
        match self {
            SequenceSpec::PowerLaw { c, lambda } => c * (j as f64).powf(-lambda),
            SequenceSpec::Geometric { c, q } => c * q.powi(j as i32),
            SequenceSpec::Explicit(v) => v.get(j as usize - 1).copied().unwrap_or(0.0),
            SequenceSpec::Squash { base, k, mul } => {
                let x = k * base.get(j);
                mul * x / (1.0 + x)
            }
        }
    }

    /// Decay exponent of the sequence; `∞` when every power is summable.
    pub fn decay_exponent(&self) -> f64 {
        match self {
            SequenceSpec::PowerLaw { c, lambda } => {
                if *c == 0.0 {
                    f64::INFINITY
                } else if *lambda == 0.0 {
                    0.0
                } else {
                    *lambda
                }
            }
            SequenceSpec::Geometric { c, q } => {
                if *c == 0.0 || *q < 1.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            // Finite support: all power sums are finite.
            SequenceSpec::Explicit(_) => f64::INFINITY,
            // x/(1+x) is sandwiched between x/(1+x_max) and x, so the decay
            // exponent of the base carries over.
            SequenceSpec::Squash { base, k, mul } => {
                if *mul == 0.0 || *k == 0.0 {
                    f64::INFINITY
                } else {
                    base.decay_exponent()
                }
            }
        }
    }

    /// Whether the powered sum `Σ_j γ_j^e` is finite.
    pub fn sum_powered_is_finite(&self, e: f64) -> bool {
        debug_assert!(e > 0.0);
        match self {
            SequenceSpec::PowerLaw { c, lambda } => *c == 0.0 || lambda * e > 1.0,
            SequenceSpec::Geometric { c, q } => *c == 0.0 || *q < 1.0,
            SequenceSpec::Explicit(_) => true,
            SequenceSpec::Squash { base, k, mul } => {
                *mul == 0.0 || *k == 0.0 || base.sum_powered_is_finite(e)
            }
        }
    }

    /// Certified enclosure of the tail `Σ_{j > cutoff} γ_j^e`.
    pub fn tail_powered(&self, cutoff: u32, e: f64) -> Bounds {
        if !self.sum_powered_is_finite(e) {
            return Bounds::infinite();
        }
        match self {
            SequenceSpec::PowerLaw { c, lambda } => {
                if *c == 0.0 {
                    Bounds::zero()
                } else {
                    zeta_from(lambda * e, cutoff as u64 + 1).scale(c.powf(e))
                }
            }
            SequenceSpec::Geometric { c, q } => geometric_tail_powered(*c, *q, cutoff as u64, e),
            SequenceSpec::Explicit(v) => {
                let mut s = 0.0;
                for x in v.iter().skip(cutoff as usize) {
                    s += x.powf(e);
                }
                Bounds::point(s).widen(1e-14)
            }
            SequenceSpec::Squash { base, k, mul } => {
                if *mul == 0.0 || *k == 0.0 {
                    return Bounds::zero();
                }
                // mul·kb/(1+kb) ∈ [mul·kb/(1+k·b_{cutoff+1}), mul·kb] for
                // j > cutoff, since the base is non-increasing.
                let scaled = base.tail_powered(cutoff, e).scale((mul * k).powf(e));
                let damp = (1.0 + k * base.get(cutoff + 1)).powf(e);
                Bounds::new(scaled.lo / damp, scaled.hi)
            }
        }
    }

    /// Certified enclosure of `Σ_{j ≥ 1} γ_j^e`.
    pub fn sum_powered(&self, e: f64) -> Bounds {
        if !self.sum_powered_is_finite(e) {
            return Bounds::infinite();
        }
        let cutoff = self.head_cutoff();
        let mut head = 0.0;
        for j in 1..=cutoff {
            head += self.get(j).powf(e);
        }
        Bounds::point(head)
            .widen(1e-14)
            .add(&self.tail_powered(cutoff, e))
    }

    /// Coordinate index beyond which tails are estimated analytically.
    fn head_cutoff(&self) -> u32 {
        match self {
            SequenceSpec::Explicit(v) => v.len() as u32,
            SequenceSpec::Squash { base, .. } => base.head_cutoff(),
            _ => 4096,
        }
    }

    /// Scales every term by a non-negative constant.
    pub fn scaled(&self, factor: f64) -> SequenceSpec {
        debug_assert!(factor >= 0.0);
        match self {
            SequenceSpec::PowerLaw { c, lambda } => SequenceSpec::PowerLaw {
                c: c * factor,
                lambda: *lambda,
            },
            SequenceSpec::Geometric { c, q } => SequenceSpec::Geometric {
                c: c * factor,
                q: *q,
            },
            SequenceSpec::Explicit(v) => {
                SequenceSpec::Explicit(v.iter().map(|x| x * factor).collect())
            }
            SequenceSpec::Squash { base, k, mul } => SequenceSpec::Squash {
                base: base.clone(),
                k: *k,
                mul: mul * factor,
            },
        }
    }

    /// Termwise power `γ_j^e`, when representable.
    pub fn powered(&self, e: f64) -> Option<SequenceSpec> {
        debug_assert!(e > 0.0);
        match self {
            SequenceSpec::PowerLaw { c, lambda } => Some(SequenceSpec::PowerLaw {
                c: c.powf(e),
                lambda: lambda * e,
            }),
            SequenceSpec::Geometric { c, q } => Some(SequenceSpec::Geometric {
                c: c.powf(e),
                q: q.powf(e),
            }),
            SequenceSpec::Explicit(v) => Some(SequenceSpec::Explicit(
                v.iter().map(|x| x.powf(e)).collect(),
            )),
            SequenceSpec::Squash { .. } => None,
        }
    }

    /// Exact rational value of `γ_j`, when the parameters admit one.
    pub fn get_exact(&self, j: u32) -> Result<Rational> {
        match self {
            SequenceSpec::PowerLaw { c, lambda } => {
                if lambda.fract() != 0.0 || *lambda > 64.0 {
                    return Err(Error::InvalidArgument(
                        "exact evaluation needs an integer power-law exponent".into(),
                    ));
                }
                let c = Rational::from_f64(*c);
                let jp = Scalar::powi(&<Rational as Scalar>::from_u32(j), *lambda as i32);
                Ok(c / jp)
            }
            SequenceSpec::Geometric { c, q } => {
                let c = Rational::from_f64(*c);
                let q = Rational::from_f64(*q);
                Ok(c * Scalar::powi(&q, j as i32))
            }
            SequenceSpec::Explicit(v) => Ok(Rational::from_f64(
                v.get(j as usize - 1).copied().unwrap_or(0.0),
            )),
            SequenceSpec::Squash { base, k, mul } => {
                let x = Rational::from_f64(*k) * base.get_exact(j)?;
                Ok(Rational::from_f64(*mul) * x.clone() / (Rational::one() + x))
            }
        }
    }
}

/// Symbolic order sequence `(Γ_k)_{k ≥ 0}` of a POD family.
#[derive(Clone, Debug, PartialEq)]
pub enum OrderSeq {
    Constant(f64),
    /// `Γ_0, Γ_1, ..., Γ_K`; indices beyond the list are an error.
    Explicit(Vec<f64>),
    /// `Γ_k = scale · (k!)^a`.
    Factorial { a: f64, scale: f64 },
}

impl OrderSeq {
    pub fn get(&self, k: u32) -> Result<f64> {
        match self {
            OrderSeq::Constant(v) => Ok(*v),
            OrderSeq::Explicit(v) => v.get(k as usize).copied().ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "order sequence has {} entries, index {k} requested",
                    v.len()
                ))
            }),
            OrderSeq::Factorial { a, scale } => Ok(scale * (a * ln_factorial(k)).exp()),
        }
    }

    pub fn get_exact(&self, k: u32) -> Result<Rational> {
        match self {
            OrderSeq::Constant(v) => Ok(Rational::from_f64(*v)),
            OrderSeq::Explicit(v) => v
                .get(k as usize)
                .map(|x| Rational::from_f64(*x))
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "order sequence has {} entries, index {k} requested",
                        v.len()
                    ))
                }),
            OrderSeq::Factorial { a, scale } => {
                if a.fract() != 0.0 || *a > 4.0 {
                    return Err(Error::InvalidArgument(
                        "exact evaluation needs a small integer factorial exponent".into(),
                    ));
                }
                let mut fact = Rational::one();
                for i in 1..=k {
                    fact *= <Rational as Scalar>::from_u32(i);
                }
                Ok(Rational::from_f64(*scale) * Scalar::powi(&fact, *a as i32))
            }
        }
    }

    /// Checks the envelope `Γ_k ≤ C_a (k!)^a` up to a horizon, symbolically
    /// when possible.
    pub fn validate_envelope(&self, a: f64, c_a: f64, horizon: u32) -> Result<()> {
        match self {
            OrderSeq::Constant(v) => {
                if *v > c_a {
                    return Err(Error::InvalidArgument(format!(
                        "constant order sequence {v} exceeds C_a = {c_a}"
                    )));
                }
            }
            OrderSeq::Factorial { a: af, scale } => {
                if *af > a || *scale > c_a * (1.0 + 1e-12) {
                    return Err(Error::InvalidArgument(
                        "factorial order sequence exceeds the (a, C_a) envelope".into(),
                    ));
                }
            }
            OrderSeq::Explicit(v) => {
                for (k, g) in v.iter().enumerate().take(horizon as usize + 1) {
                    let cap = c_a * (a * ln_factorial(k as u32)).exp();
                    if *g > cap * (1.0 + 1e-12) {
                        return Err(Error::InvalidArgument(format!(
                            "order sequence entry {k} = {g} exceeds C_a (k!)^a = {cap}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn powered(&self, e: f64) -> OrderSeq {
        match self {
            OrderSeq::Constant(v) => OrderSeq::Constant(v.powf(e)),
            OrderSeq::Explicit(v) => OrderSeq::Explicit(v.iter().map(|x| x.powf(e)).collect()),
            OrderSeq::Factorial { a, scale } => OrderSeq::Factorial {
                a: a * e,
                scale: scale.powf(e),
            },
        }
    }
}

fn ln_factorial(k: u32) -> f64 {
    (2..=k as u64).map(|i| (i as f64).ln()).sum()
}

/// Structured symbolic weights, valid for finite and infinite dimension.
///
/// ```
/// use weightlat::families::{SequenceSpec, WeightSpec};
/// use weightlat::Dim;
/// let spec = WeightSpec::Product {
///     seq: SequenceSpec::PowerLaw { c: 1.0, lambda: 2.0 },
///     d: Dim::Infinite,
/// };
/// assert_eq!(spec.eval(&[]), 1.0);
/// assert_eq!(spec.eval(&[2, 3]), 0.25 / 9.0);
/// ```
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    /// `γ_u = Π_{j∈u} γ_j`, with `γ_∅ = 1`.
    Product { seq: SequenceSpec, d: Dim },
    /// `γ_u = Γ_{|u|} Π_{j∈u} γ_j` with `Γ_k ≤ C_a (k!)^a`.
    Pod {
        seq: SequenceSpec,
        order: OrderSeq,
        a: f64,
        c_a: f64,
        d: Dim,
    },
    /// Explicit entries, all of cardinality at most `order`.
    FiniteOrder {
        order: u32,
        entries: BTreeMap<Coords, f64>,
        d: Dim,
    },
    /// Explicit entries, zero elsewhere.
    FinSupport {
        entries: BTreeMap<Coords, f64>,
        d: Dim,
    },
}

/// Horizon up to which explicit order sequences are checked against the
/// factorial envelope.
pub const ENVELOPE_HORIZON: u32 = 64;

impl WeightSpec {
    pub fn dim(&self) -> Dim {
        match self {
            WeightSpec::Product { d, .. }
            | WeightSpec::Pod { d, .. }
            | WeightSpec::FiniteOrder { d, .. }
            | WeightSpec::FinSupport { d, .. } => *d,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            WeightSpec::Product { .. } => "product",
            WeightSpec::Pod { .. } => "pod",
            WeightSpec::FiniteOrder { .. } => "finite-order",
            WeightSpec::FinSupport { .. } => "finsupport",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::Product { seq, .. } => seq.validate(),
            WeightSpec::Pod {
                seq,
                order,
                a,
                c_a,
                ..
            } => {
                seq.validate()?;
                if *a <= 0.0 || *c_a <= 0.0 {
                    return Err(Error::InvalidArgument(
                        "POD parameters need a > 0 and C_a > 0".into(),
                    ));
                }
                order.validate_envelope(*a, *c_a, ENVELOPE_HORIZON)
            }
            WeightSpec::FiniteOrder { order, entries, d } => {
                check_entries(entries, *d)?;
                for coords in entries.keys() {
                    if coords.len() as u32 > *order {
                        return Err(Error::InvalidArgument(format!(
                            "entry {} exceeds order {order}",
                            format_coords(coords)
                        )));
                    }
                }
                Ok(())
            }
            WeightSpec::FinSupport { entries, d } => check_entries(entries, *d),
        }
    }

    /// Closed-form entry `γ_u`.
    pub fn eval(&self, coords: &[u32]) -> f64 {
        match self {
            WeightSpec::Product { seq, .. } => coords.iter().map(|&j| seq.get(j)).product(),
            WeightSpec::Pod { seq, order, .. } => {
                let gamma_k = order.get(coords.len() as u32).unwrap_or(f64::NAN);
                gamma_k * coords.iter().map(|&j| seq.get(j)).product::<f64>()
            }
            WeightSpec::FiniteOrder { entries, .. } | WeightSpec::FinSupport { entries, .. } => {
                entries.get(coords).copied().unwrap_or(0.0)
            }
        }
    }

    /// Exact rational entry, when the parameters admit one.
    pub fn eval_exact(&self, coords: &[u32]) -> Result<Rational> {
        match self {
            WeightSpec::Product { seq, .. } => {
                let mut acc = Rational::one();
                for &j in coords {
                    acc *= seq.get_exact(j)?;
                }
                Ok(acc)
            }
            WeightSpec::Pod { seq, order, .. } => {
                let mut acc = order.get_exact(coords.len() as u32)?;
                for &j in coords {
                    acc *= seq.get_exact(j)?;
                }
                Ok(acc)
            }
            WeightSpec::FiniteOrder { entries, .. } | WeightSpec::FinSupport { entries, .. } => {
                Ok(entries
                    .get(coords)
                    .map(|x| Rational::from_f64(*x))
                    .unwrap_or_else(Rational::zero))
            }
        }
    }

    /// Dense truncation to dimension `d`: the bridge between the symbolic
    /// and the dense world.
    pub fn truncate_to_table(&self, d: u32) -> Result<WeightTable<f64>> {
        crate::lattice::check_dense_dim(d)?;
        let n = crate::lattice::table_len(d);
        let mut values = Vec::with_capacity(n);
        for bits in 0..n {
            let coords = Subset(bits as u32).to_coords();
            values.push(self.eval(&coords));
        }
        WeightTable::new(d, values)
    }

    /// Exact dense truncation.
    pub fn truncate_to_table_exact(&self, d: u32) -> Result<WeightTable<Rational>> {
        crate::lattice::check_dense_dim(d)?;
        let n = crate::lattice::table_len(d);
        let mut values = Vec::with_capacity(n);
        for bits in 0..n {
            let coords = Subset(bits as u32).to_coords();
            values.push(self.eval_exact(&coords)?);
        }
        WeightTable::new(d, values)
    }

    /// Same family restricted or extended to another dimension marker.
    pub fn with_dim(&self, d: Dim) -> WeightSpec {
        let mut s = self.clone();
        match &mut s {
            WeightSpec::Product { d: dd, .. }
            | WeightSpec::Pod { d: dd, .. }
            | WeightSpec::FiniteOrder { d: dd, .. }
            | WeightSpec::FinSupport { d: dd, .. } => *dd = d,
        }
        s
    }
}

fn check_entries(entries: &BTreeMap<Coords, f64>, d: Dim) -> Result<()> {
    for (coords, value) in entries {
        check_coords(coords)?;
        if let Some(&max) = coords.last() {
            if !d.admits(max) {
                return Err(Error::DimensionMismatch(max, d.finite().unwrap_or(0)));
            }
        }
        if *value < 0.0 {
            return Err(Error::NegativeWeight {
                subset: format_coords(coords),
                value: *value,
            });
        }
    }
    Ok(())
}

/// Difference of product weights in closed form:
/// `γ_u · Π_{j∈v} (1 - γ_j)` for disjoint `u`, `v`.
pub fn product_delta_closed_form(seq: &SequenceSpec, v: &[u32], u: &[u32]) -> Result<f64> {
    check_coords(u)?;
    check_coords(v)?;
    if u.iter().any(|j| v.binary_search(j).is_ok()) {
        return Err(Error::InvalidArgument(
            "closed form requires disjoint index sets".into(),
        ));
    }
    let gamma_u: f64 = u.iter().map(|&j| seq.get(j)).product();
    let factor: f64 = v.iter().map(|&j| 1.0 - seq.get(j)).product();
    Ok(gamma_u * factor)
}

// ---------------------------------------------------------------------------
// Elementary-symmetric-polynomial machinery for POD sums.
// ---------------------------------------------------------------------------

/// `e_0, ..., e_max_order` of the given factors, by the standard
/// one-factor-at-a-time recurrence. All quantities are non-negative, so the
/// recurrence is forward-stable.
pub fn elementary_symmetric(factors: &[f64], max_order: usize) -> Vec<f64> {
    let mut e = vec![0.0; max_order + 1];
    e[0] = 1.0;
    let mut filled = 0usize;
    for &x in factors {
        filled = (filled + 1).min(max_order);
        for l in (1..=filled).rev() {
            e[l] += x * e[l - 1];
        }
    }
    e
}

/// Tail regime for order sums `Σ_ℓ Γ_{m+ℓ} e_ℓ(x)`: a certified upper bound
/// on each term via the factorial envelope, summable beyond any cutoff.
pub(crate) struct OrderTailRegime {
    c_a: f64,
    a: f64,
    kind: RegimeKind,
}

enum RegimeKind {
    /// `p > a`: Jensen with exponent `1/τ` for some `τ ≥ 1`, `τ > a`,
    /// using `E = Σ_j x_j^{1/τ} < ∞`.
    TauTrick { tau: f64, e_tau: f64 },
    /// `p = a ≥ 1` with `T = Σ_j x_j^{1/a} < 1`.
    UnitRatio { t_a: f64 },
    /// Finitely many nonzero factors: `e_ℓ` vanishes beyond the count.
    FiniteFactors { count: u32 },
}

impl OrderTailRegime {
    /// Derives a regime for factors `x_j = c2 · γ_j`.
    pub(crate) fn for_factors(
        seq: &SequenceSpec,
        a: f64,
        c_a: f64,
        c2: f64,
    ) -> Result<OrderTailRegime> {
        if let Some(count) = explicit_support_len(seq) {
            return Ok(OrderTailRegime {
                c_a,
                a,
                kind: RegimeKind::FiniteFactors { count },
            });
        }
        let p = seq.decay_exponent();
        if p > a && seq.sum_powered_is_finite(1.0) {
            let tau = if a < 1.0 {
                1.0
            } else if p.is_finite() {
                0.5 * (a + p)
            } else {
                a + 1.0
            };
            let e_tau = seq.sum_powered(1.0 / tau).scale(c2.powf(1.0 / tau)).hi;
            if e_tau.is_finite() {
                return Ok(OrderTailRegime {
                    c_a,
                    a,
                    kind: RegimeKind::TauTrick { tau, e_tau },
                });
            }
            return Err(Error::Undecidable(
                "powered factor sum is not certifiably finite".into(),
            ));
        }
        if (p - a).abs() < 1e-12 && a >= 1.0 {
            let t_a = seq.sum_powered(1.0 / a).scale(c2.powf(1.0 / a)).hi;
            if t_a < 1.0 {
                return Ok(OrderTailRegime {
                    c_a,
                    a,
                    kind: RegimeKind::UnitRatio { t_a },
                });
            }
            return Err(Error::Undecidable(format!(
                "order-sum tail not certifiable: Σ (C²γ_j)^(1/a) = {t_a:.6} ≥ 1"
            )));
        }
        Err(Error::Undecidable(
            "order-sum tail needs factor decay above the order growth".into(),
        ))
    }

    /// Upper bound on `Γ_{m+i} e_i(x)` using `Γ_k ≤ C_a (k!)^a` and
    /// `(m+i)! ≤ (m+i)^m · i!`.
    fn term_bound(&self, m: u32, i: u32) -> f64 {
        match &self.kind {
            RegimeKind::FiniteFactors { count } => {
                if i > *count {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            RegimeKind::TauTrick { tau, e_tau } => {
                let poly = ((m + i).max(1) as f64).powf(m as f64 * self.a);
                let lnterm =
                    tau * (i as f64) * e_tau.max(1e-300).ln() + (self.a - tau) * ln_factorial(i);
                self.c_a * poly * lnterm.exp()
            }
            RegimeKind::UnitRatio { t_a } => {
                let poly = ((m + i).max(1) as f64).powf(m as f64 * self.a);
                self.c_a * poly * t_a.powf(self.a * i as f64)
            }
        }
    }

    fn term_ratio_bound(&self, m: u32, i: u32) -> f64 {
        match &self.kind {
            RegimeKind::FiniteFactors { count } => {
                if i >= *count {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            RegimeKind::TauTrick { tau, e_tau } => {
                let mi = (m + i).max(1) as f64;
                let poly = ((mi + 1.0) / mi).powf(m as f64 * self.a);
                poly * e_tau.powf(*tau) * ((i + 1) as f64).powf(self.a - tau)
            }
            RegimeKind::UnitRatio { t_a } => {
                let mi = (m + i).max(1) as f64;
                let poly = ((mi + 1.0) / mi).powf(m as f64 * self.a);
                poly * t_a.powf(self.a)
            }
        }
    }

    /// Upper bound on `Σ_{i ≥ from} Γ_{m+i} e_i(x)`.
    pub(crate) fn series_tail(&self, m: u32, from: u32) -> f64 {
        if let RegimeKind::FiniteFactors { count } = &self.kind {
            if from > *count {
                return 0.0;
            }
            return f64::INFINITY;
        }
        let mut total = 0.0;
        let mut i = from;
        loop {
            // Ratios are decreasing in i; once below 1 the remainder is
            // dominated by a geometric series.
            let term = self.term_bound(m, i);
            if !term.is_finite() {
                return f64::INFINITY;
            }
            let ratio = self.term_ratio_bound(m, i);
            if ratio < 0.9 {
                return total + term / (1.0 - ratio);
            }
            total += term;
            i += 1;
            if i > from + 100_000 {
                return f64::INFINITY;
            }
        }
    }

    pub(crate) fn series_total(&self, m: u32) -> f64 {
        self.series_tail(m, 0)
    }
}

fn explicit_support_len(seq: &SequenceSpec) -> Option<u32> {
    match seq {
        SequenceSpec::Explicit(v) => Some(v.iter().filter(|x| **x > 0.0).count() as u32),
        SequenceSpec::Squash { base, k, mul } => {
            if *k == 0.0 || *mul == 0.0 {
                Some(0)
            } else {
                explicit_support_len(base)
            }
        }
        SequenceSpec::PowerLaw { c, .. } => (*c == 0.0).then_some(0),
        SequenceSpec::Geometric { c, q } => (*c == 0.0 || *q == 0.0).then_some(0),
    }
}

/// Certified enclosure of the shifted order sum
/// `Σ_{ℓ ≥ 0} Γ_{m0 + ℓ} e_ℓ({c2·γ_j : j ∉ excluded})`.
///
/// Finite dimension is evaluated exactly. For infinite dimension the
/// coordinates are truncated; subsets reaching past the cutoff are grouped by
/// how many tail coordinates they use, the first three groups via enclosed
/// power sums of the tail, the rest via the factorial-envelope series.
#[allow(clippy::too_many_arguments)]
pub(crate) fn pod_order_sum(
    seq: &SequenceSpec,
    order: &OrderSeq,
    a: f64,
    c_a: f64,
    c2: f64,
    d: Dim,
    excluded: &[u32],
    m0: u32,
    policy: &Truncation,
) -> Result<Bounds> {
    match d {
        Dim::Finite(dd) => {
            let factors: Vec<f64> = (1..=dd)
                .filter(|j| excluded.binary_search(j).is_err())
                .map(|j| c2 * seq.get(j))
                .collect();
            let max_order = factors.len();
            let e = elementary_symmetric(&factors, max_order);
            let mut total = 0.0;
            for (l, el) in e.iter().enumerate() {
                total += order.get(m0 + l as u32)? * el;
            }
            Ok(Bounds::point(total).widen(1e-13))
        }
        Dim::Infinite => {
            let regime = OrderTailRegime::for_factors(seq, a, c_a, c2)?;
            // The tail power sums assume every excluded coordinate lies in
            // the head, so the cutoff must dominate them.
            let mut cutoff = seq
                .head_cutoff()
                .max(32)
                .max(excluded.last().copied().unwrap_or(0));
            let mut best: Option<Bounds> = None;
            loop {
                let b =
                    pod_order_sum_at_cutoff(seq, order, &regime, c2, excluded, m0, cutoff, policy)?;
                let good_enough = b.rel_width() <= policy.rel_tol;
                best = Some(match best {
                    Some(prev) if prev.width() <= b.width() => prev,
                    _ => b,
                });
                if good_enough || cutoff >= policy.coord_cap {
                    return Ok(best.unwrap());
                }
                cutoff = (cutoff * 8).min(policy.coord_cap);
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn pod_order_sum_at_cutoff(
    seq: &SequenceSpec,
    order: &OrderSeq,
    regime: &OrderTailRegime,
    c2: f64,
    excluded: &[u32],
    m0: u32,
    cutoff: u32,
    policy: &Truncation,
) -> Result<Bounds> {
    let factors: Vec<f64> = (1..=cutoff)
        .filter(|j| excluded.binary_search(j).is_err())
        .map(|j| c2 * seq.get(j))
        .collect();

    // Order cutoff: stop once the envelope tail is negligible relative to
    // the running value (the unsummed tail stays in the enclosure anyway).
    let mut max_order = 8usize.min(factors.len());
    let mut partial;
    let mut order_tails;
    loop {
        let e = elementary_symmetric(&factors, max_order);
        partial = [0.0f64; 4];
        for (shift, slot) in partial.iter_mut().enumerate() {
            for (l, el) in e.iter().enumerate() {
                *slot += order.get(m0 + shift as u32 + l as u32)? * el;
            }
        }
        order_tails = [0.0f64; 4];
        if max_order < factors.len() {
            for (shift, slot) in order_tails.iter_mut().enumerate() {
                *slot = regime.series_tail(m0 + shift as u32, max_order as u32 + 1);
            }
        }
        let scale = partial[0].max(1e-300);
        if order_tails[0] <= policy.rel_tol * 0.01 * scale
            || max_order as u32 >= policy.order_cap
            || max_order >= factors.len()
        {
            break;
        }
        max_order = (max_order * 2)
            .min(policy.order_cap as usize)
            .min(factors.len());
    }

    if order_tails.iter().any(|t| !t.is_finite()) {
        return Err(Error::Undecidable(
            "order tail is not certifiably finite".into(),
        ));
    }

    // Shifted head sums A_k = Σ_l Γ_{m0+k+l} e_l(head), k = 0..3.
    let a_k: Vec<Bounds> = (0..4)
        .map(|k| Bounds::new(partial[k], partial[k] + order_tails[k]).widen(1e-13))
        .collect();

    // Power sums of the coordinate tail (excluded coordinates lie in the
    // head, so the tail is the plain sequence tail).
    let p1 = seq.tail_powered(cutoff, 1.0).scale(c2);
    if !p1.is_finite() {
        return Err(Error::NotSummable("coordinate tail diverges".into()));
    }
    let p2 = seq.tail_powered(cutoff, 2.0).scale(c2 * c2);
    let p3 = seq.tail_powered(cutoff, 3.0).scale(c2 * c2 * c2);
    // e_1, e_2, e_3 of the tail via Newton's identities; all terms tiny.
    let e1t = p1;
    let e2t = p1.mul(&p1).sub(&p2).scale(0.5).max0();
    let e3t = p1
        .mul(&p1)
        .mul(&p1)
        .sub(&p1.mul(&p2).scale(3.0))
        .add(&p3.scale(2.0))
        .scale(1.0 / 6.0)
        .max0();

    // Subsets using k ≥ 4 tail coordinates: e_k(tail) ≤ p1^k / k!.
    let mut rest = 0.0f64;
    if p1.hi > 0.0 {
        let mut k = 4u32;
        let mut fact = 24.0f64;
        loop {
            let term = p1.hi.powi(k as i32) / fact * regime.series_total(m0 + k);
            rest += term;
            if !rest.is_finite() {
                return Err(Error::Undecidable(
                    "coordinate-tail correction is not certifiably finite".into(),
                ));
            }
            if term <= rest * 1e-18 || k >= 64 {
                break;
            }
            k += 1;
            fact *= k as f64;
        }
    }

    let value = a_k[0]
        .add(&e1t.mul(&a_k[1]))
        .add(&e2t.mul(&a_k[2]))
        .add(&e3t.mul(&a_k[3]))
        .add(&Bounds::new(0.0, rest));
    Ok(value.widen(1e-13))
}

// ---------------------------------------------------------------------------
// Certified infinite products.
// ---------------------------------------------------------------------------

/// Certified enclosure of `Π_{j ∉ excluded} (1 + k·γ_j)`; infinite when the
/// factor sum diverges.
pub fn product_one_plus_excluding(seq: &SequenceSpec, k: f64, excluded: &[u32]) -> Bounds {
    debug_assert!(k >= 0.0);
    if k == 0.0 {
        return Bounds::one();
    }
    if !seq.sum_powered_is_finite(1.0) {
        return Bounds::infinite();
    }
    let mut cutoff = seq
        .head_cutoff()
        .max(excluded.last().copied().unwrap_or(0))
        .max(64);
    loop {
        let mut head = 1.0f64;
        let mut n_terms = 0u32;
        for j in 1..=cutoff {
            if excluded.binary_search(&j).is_err() {
                head *= 1.0 + k * seq.get(j);
                n_terms += 1;
            }
        }
        let head_b = Bounds::point(head).widen(2.0 * n_terms as f64 * f64::EPSILON);
        // ln(1+x) ∈ [x - x²/2, x] for x ≥ 0.
        let t1 = seq.tail_powered(cutoff, 1.0).scale(k);
        let t2 = seq.tail_powered(cutoff, 2.0).scale(k * k);
        let ln_tail = Bounds::new(t1.lo - 0.5 * t2.hi, t1.hi);
        let value = head_b.mul(&ln_tail.exp());
        if value.rel_width() <= 1e-11 || cutoff >= (1 << 20) {
            return value;
        }
        cutoff *= 8;
    }
}

/// Certified enclosure of `Π_{j ∉ excluded} (1 - γ_j)` for a sequence with
/// values in `[0, 1]`. The product is exactly zero when some remaining factor
/// is `1` or when the factor sum diverges.
pub fn product_one_minus_excluding(seq: &SequenceSpec, excluded: &[u32]) -> Result<Bounds> {
    if seq.get(1) > 1.0 {
        return Err(Error::NotMonotone(
            "product factors must lie in [0, 1]".into(),
        ));
    }
    if !seq.sum_powered_is_finite(1.0) {
        // Divergent factor sum forces the infinite product to zero.
        return Ok(Bounds::zero());
    }
    let mut cutoff = seq
        .head_cutoff()
        .max(excluded.last().copied().unwrap_or(0))
        .max(64);
    loop {
        let mut head = 1.0f64;
        let mut n_terms = 0u32;
        for j in 1..=cutoff {
            if excluded.binary_search(&j).is_err() {
                let f = 1.0 - seq.get(j);
                if f <= 0.0 {
                    return Ok(Bounds::zero());
                }
                head *= f;
                n_terms += 1;
            }
        }
        let head_b = Bounds::point(head).widen(2.0 * n_terms as f64 * f64::EPSILON);
        let xmax = seq.get(cutoff + 1);
        if xmax >= 1.0 {
            cutoff *= 8;
            continue;
        }
        // ln(1-x) ∈ [-x - x²/(2(1-x_max)), -x] for 0 ≤ x ≤ x_max < 1.
        let t1 = seq.tail_powered(cutoff, 1.0);
        let t2 = seq.tail_powered(cutoff, 2.0);
        let ln_tail = Bounds::new(-t1.hi - 0.5 * t2.hi / (1.0 - xmax), -t1.lo);
        let value = head_b.mul(&ln_tail.exp()).max0();
        if value.rel_width() <= 1e-11 || cutoff >= (1 << 20) {
            return Ok(value);
        }
        cutoff *= 8;
    }
}

// ---------------------------------------------------------------------------
// Decay of weight families.
// ---------------------------------------------------------------------------

/// Decay of a weight family: the supremum of exponents `τ` with
/// `Σ_u γ_u^{1/τ} < ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DecayResult {
    Zero,
    Value(f64),
    Infinity,
    /// Only an enclosure `[lo, hi]` is certifiable.
    Interval(f64, f64),
}

impl std::fmt::Display for DecayResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DecayResult::Zero => write!(f, "0"),
            DecayResult::Value(v) => write!(f, "{v}"),
            DecayResult::Infinity => write!(f, "inf"),
            DecayResult::Interval(lo, hi) => {
                if hi.is_finite() {
                    write!(f, "[{lo}, {hi}]")
                } else {
                    write!(f, "[{lo}, inf)")
                }
            }
        }
    }
}

/// Decay of the weights as a set family (infinite dimension only).
pub fn decay(spec: &WeightSpec) -> Result<DecayResult> {
    if spec.dim() != Dim::Infinite {
        return Err(Error::InvalidArgument(
            "decay is a tail notion; it needs d = inf".into(),
        ));
    }
    match spec {
        WeightSpec::Product { seq, .. } => {
            // Σ_u γ_u^{1/τ} = Π_j (1 + γ_j^{1/τ}) converges exactly when the
            // powered factor sum does.
            Ok(exponent_to_result(seq.decay_exponent()))
        }
        WeightSpec::Pod { seq, order, a, .. } => {
            let gamma1 = order.get(1)?;
            let p = seq.decay_exponent();
            if gamma1 <= 0.0 {
                return Ok(DecayResult::Interval(0.0, f64::INFINITY));
            }
            if p == 0.0 {
                // Σ γ_u^{1/τ} ≥ Γ₁^{1/τ} Σ γ_j^{1/τ} diverges for all τ.
                return Ok(DecayResult::Zero);
            }
            if p > *a {
                return Ok(exponent_to_result(p));
            }
            if (p - a).abs() < 1e-12 && *a >= 1.0 {
                let t = seq.sum_powered(1.0 / a);
                if t.hi < 1.0 {
                    return Ok(exponent_to_result(p));
                }
            }
            // Γ₁ > 0 pins the upper end at p; the lower end stays open.
            Ok(DecayResult::Interval(0.0, p))
        }
        WeightSpec::FiniteOrder { .. } | WeightSpec::FinSupport { .. } => {
            // Finitely many entries: every power sum is finite.
            Ok(DecayResult::Infinity)
        }
    }
}

fn exponent_to_result(p: f64) -> DecayResult {
    if p == 0.0 {
        DecayResult::Zero
    } else if p.is_finite() {
        DecayResult::Value(p)
    } else {
        DecayResult::Infinity
    }
}

/// Decay after the forward transform. Returns the (invariant) decay when the
/// invariance hypotheses are certified and refuses otherwise.
pub fn decay_after_up(spec: &WeightSpec, _c: f64) -> Result<DecayResult> {
    if spec.dim() != Dim::Infinite {
        return Err(Error::InvalidArgument(
            "decay is a tail notion; it needs d = inf".into(),
        ));
    }
    match spec {
        WeightSpec::Product { seq, .. } => {
            if seq.sum_powered_is_finite(1.0) {
                decay(spec)
            } else {
                Err(Error::Undecidable(
                    "decay invariance needs summable product factors".into(),
                ))
            }
        }
        WeightSpec::Pod { seq, order, a, .. } => {
            let gamma1 = order.get(1)?;
            let p = seq.decay_exponent();
            if gamma1 > 0.0 && p > *a && seq.sum_powered_is_finite(1.0) {
                decay(spec)
            } else {
                Err(Error::Undecidable(
                    "decay invariance needs Γ₁ > 0, factor decay above a, and summable factors"
                        .into(),
                ))
            }
        }
        WeightSpec::FiniteOrder { .. } | WeightSpec::FinSupport { .. } => {
            // Summable finite-order weights keep their decay, with floor 1;
            // explicit entries are always summable and have infinite decay.
            Ok(DecayResult::Infinity)
        }
    }
}

// ---------------------------------------------------------------------------
// Sandwich bounds under the transforms.
// ---------------------------------------------------------------------------

/// Entrywise enclosure `lower_constant·lower ≤ transformed ≤ upper_constant·upper`.
#[derive(Clone, Debug)]
pub struct SandwichBounds {
    pub lower: WeightSpec,
    pub lower_constant: Bounds,
    pub upper: WeightSpec,
    pub upper_constant: Bounds,
}

/// Sandwich for the forward transform of product or POD weights.
pub fn sandwich_up(spec: &WeightSpec, c: f64, policy: &Truncation) -> Result<SandwichBounds> {
    let c2 = c * c;
    match spec {
        WeightSpec::Product { seq, d } => {
            if *d == Dim::Infinite && !seq.sum_powered_is_finite(1.0) {
                return Err(Error::NotSummable("product factor sum diverges".into()));
            }
            let eta = WeightSpec::Product {
                seq: seq.scaled(c2),
                d: *d,
            };
            let constant = match d {
                Dim::Finite(dd) => {
                    let mut p = 1.0;
                    for j in 1..=*dd {
                        p *= 1.0 + c2 * seq.get(j);
                    }
                    Bounds::point(p).widen(1e-13)
                }
                Dim::Infinite => product_one_plus_excluding(seq, c2, &[]),
            };
            Ok(SandwichBounds {
                lower: eta.clone(),
                lower_constant: Bounds::one(),
                upper: eta,
                upper_constant: constant,
            })
        }
        WeightSpec::Pod {
            seq,
            order,
            a,
            c_a,
            d,
        } => {
            let eta = WeightSpec::Pod {
                seq: seq.scaled(c2),
                order: order.clone(),
                a: *a,
                c_a: *c_a,
                d: *d,
            };
            let two_a = (2.0f64).powf(*a);
            let xi = WeightSpec::Pod {
                seq: seq.scaled(two_a * c2),
                order: OrderSeq::Factorial {
                    a: *a,
                    scale: *c_a,
                },
                a: *a,
                c_a: *c_a,
                d: *d,
            };
            let constant = pod_order_sum(
                seq,
                &OrderSeq::Factorial { a: *a, scale: 1.0 },
                *a,
                1.0,
                two_a * c2,
                *d,
                &[],
                0,
                policy,
            )
            .unwrap_or_else(|_| Bounds::infinite());
            Ok(SandwichBounds {
                lower: eta,
                lower_constant: Bounds::one(),
                upper: xi,
                upper_constant: constant,
            })
        }
        _ => Err(Error::UnsupportedFamily(
            "sandwich bounds cover product and POD weights".into(),
        )),
    }
}

/// Sandwich for the inverse transform of completely monotone product or POD
/// weights.
pub fn sandwich_down(spec: &WeightSpec, c: f64) -> Result<SandwichBounds> {
    let inv_c2 = 1.0 / (c * c);
    match spec {
        WeightSpec::Product { seq, d } => {
            if seq.get(1) > 1.0 {
                return Err(Error::NotMonotone(
                    "product weights are monotone only for factors in [0, 1]".into(),
                ));
            }
            let zeta = WeightSpec::Product {
                seq: seq.scaled(inv_c2),
                d: *d,
            };
            let c_prime = match d {
                Dim::Finite(dd) => {
                    let mut p = 1.0;
                    for j in 1..=*dd {
                        p *= 1.0 - seq.get(j);
                    }
                    Bounds::point(p.max(0.0)).widen(1e-13).max0()
                }
                Dim::Infinite => product_one_minus_excluding(seq, &[])?,
            };
            Ok(SandwichBounds {
                lower: zeta.clone(),
                lower_constant: c_prime,
                upper: zeta,
                upper_constant: Bounds::one(),
            })
        }
        WeightSpec::Pod {
            seq,
            order,
            a,
            c_a,
            d,
        } => {
            let zeta = WeightSpec::Pod {
                seq: seq.scaled(inv_c2),
                order: order.clone(),
                a: *a,
                c_a: *c_a,
                d: *d,
            };
            // The zero lower bound is sharp for POD weights.
            Ok(SandwichBounds {
                lower: zeta.clone(),
                lower_constant: Bounds::zero(),
                upper: zeta,
                upper_constant: Bounds::one(),
            })
        }
        _ => Err(Error::UnsupportedFamily(
            "sandwich bounds cover product and POD weights".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// One-coordinate sums of POD weights.
// ---------------------------------------------------------------------------

/// Exact value of `Σ_{u ⊆ [j], j ∈ u} C^{2|u|} γ_u` for POD weights.
pub fn pod_onecoordinate_sum(spec: &WeightSpec, c: f64, j: u32) -> Result<f64> {
    let WeightSpec::Pod {
        seq,
        order,
        a,
        c_a,
        ..
    } = spec
    else {
        return Err(Error::UnsupportedFamily(
            "one-coordinate sums are a POD operation".into(),
        ));
    };
    let c2 = c * c;
    let inner = pod_order_sum(
        seq,
        order,
        *a,
        *c_a,
        c2,
        Dim::Finite(j.saturating_sub(1)),
        &[],
        1,
        &Truncation::default(),
    )?;
    Ok(c2 * seq.get(j) * inner.mid())
}

/// Certified lower and upper bounds for the one-coordinate sums: the lower
/// bound is `C² Γ₁ γ_j`; the upper bound is `coef · γ_j` where `coef` comes
/// from the factorial-envelope estimates.
pub fn pod_onecoordinate_sum_bounds(
    spec: &WeightSpec,
    c: f64,
    j: u32,
) -> Result<(f64, Bounds)> {
    let WeightSpec::Pod {
        seq,
        order,
        a,
        c_a,
        ..
    } = spec
    else {
        return Err(Error::UnsupportedFamily(
            "one-coordinate sums are a POD operation".into(),
        ));
    };
    let c2 = c * c;
    let lower = c2 * order.get(1)? * seq.get(j);
    let p = seq.decay_exponent();

    // Direct bound, valid for any ρ ≥ max(1, a) with Σ (C²γ_i)^{1/ρ} < 1:
    // coefficient C_a (1 - T_ρ)^{-2ρ} C². This covers the critical case
    // p = a ≥ 1 and is the tighter estimate when it applies.
    let rho = a.max(1.0);
    let t = seq.sum_powered(1.0 / rho).scale(c2.powf(1.0 / rho));
    if t.hi < 1.0 {
        let one_minus = Bounds::new(1.0 - t.hi, 1.0 - t.lo);
        let coef = Bounds::new(
            c_a * c2 / one_minus.hi.powf(2.0 * rho),
            c_a * c2 / one_minus.lo.powf(2.0 * rho),
        )
        .widen(1e-13);
        return Ok((lower, coef));
    }

    // Rescaling route for p > a with summable factors.
    if p > *a && seq.sum_powered_is_finite(1.0) && order.get(1).is_ok() {
        let tau = if *a < 1.0 {
            1.0
        } else {
            0.5 * (a + p.min(a + 2.0))
        };
        let s = seq.sum_powered(1.0 / tau).scale(c2.powf(1.0 / tau));
        if s.hi <= 0.0 {
            return Ok((lower, Bounds::point(c_a * c2)));
        }
        let r = Bounds::new((2.0 * s.lo).powf(tau), (2.0 * s.hi).powf(tau));
        // With the rescaled constant the powered sum is exactly 1/2, so the
        // geometric-series factor is (1 - 1/2)^{-2τ} = 4^τ.
        let exp_arg = Bounds::new(
            tau * r.lo.powf(1.0 / (tau - a)),
            tau * r.hi.powf(1.0 / (tau - a)),
        );
        let four_tau = (4.0f64).powf(tau);
        let coef = exp_arg
            .exp()
            .mul(&Bounds::new(c_a * four_tau * c2 / r.hi, c_a * four_tau * c2 / r.lo))
            .widen(1e-13);
        return Ok((lower, coef));
    }
    Err(Error::Undecidable(
        "one-coordinate upper bound needs p > a with summable factors, or p = a ≥ 1".into(),
    ))
}

// ---------------------------------------------------------------------------
// Extremal weights with maximal decay collapse.
// ---------------------------------------------------------------------------

/// Finitely supported weights `γ_{{1..2^j}} = 2^{-j}` for `j ≤ levels`.
pub fn extremal_example(levels: u32) -> Result<WeightSpec> {
    if levels > 6 {
        return Err(Error::DimensionTooLarge(levels, 6));
    }
    let mut entries = BTreeMap::new();
    for j in 1..=levels {
        let coords: Coords = (1..=(1u32 << j)).collect();
        entries.insert(coords, (2.0f64).powi(-(j as i32)));
    }
    Ok(WeightSpec::FinSupport {
        entries,
        d: Dim::Infinite,
    })
}

/// Lower bound `Σ_{j ≤ levels} 2^{2^j} · 2^{-(j+1)/τ}` on the powered sum of
/// the transformed extremal weights; grows without bound in the level.
pub fn extremal_lower_bound(levels: u32, tau: f64) -> Result<f64> {
    if tau <= 0.0 {
        return Err(Error::InvalidArgument("tau must be positive".into()));
    }
    if levels > 30 {
        return Err(Error::DimensionTooLarge(levels, 30));
    }
    let mut total = 0.0f64;
    for j in 1..=levels {
        let count = (2.0f64).powi(1 << j); // v with {1..2^j} ⊆ v ⊆ {1..2^{j+1}}
        total += count * (2.0f64).powf(-((j + 1) as f64) / tau);
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// POD shape recognition on dense tables.
// ---------------------------------------------------------------------------

/// Tests the necessary POD identities on a dense table: for all coordinate
/// pairs `i < j` and every `u` disjoint from both, the cross ratio
/// `γ_{u∪{i}} · γ_{{j}} = γ_{u∪{j}} · γ_{{i}}` must hold (order factors
/// cancel between sets of equal cardinality).
pub fn is_pod_table(table: &WeightTable<f64>, rel_tol: f64) -> bool {
    let d = table.dim();
    let scale = table.sup_norm().powi(2).max(f64::MIN_POSITIVE);
    for i in 1..=d {
        for j in (i + 1)..=d {
            let si = *table.get(Subset::from_members(&[i]));
            let sj = *table.get(Subset::from_members(&[j]));
            let pair_bits = Subset::from_members(&[i, j]);
            for (u, _) in table.iter() {
                if !u.intersection(pair_bits).is_empty() {
                    continue;
                }
                let ui = *table.get(u.union(Subset::from_members(&[i])));
                let uj = *table.get(u.union(Subset::from_members(&[j])));
                if (ui * sj - uj * si).abs() > rel_tol * scale {
                    return false;
                }
            }
        }
    }
    true
}
