//! Certified enclosures for quantities defined by infinite sums and
//! products.
//!
//! The structured weight families promise "certified" values: every reported
//! number carries an interval that provably contains the exact value. The
//! enclosures are derived mathematically (integral comparison plus
//! Euler-Maclaurin corrections for power-law tails, geometric closed forms,
//! truncated logarithm series for products) and widened by a small factor to
//! absorb floating-point rounding.

/// Closed interval `[lo, hi]` guaranteed to contain the exact value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

/// Relative slack applied after composite floating-point evaluations.
const ROUND_SLOP: f64 = 1e-14;

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Bounds { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Bounds { lo: x, hi: x }
    }

    pub fn zero() -> Self {
        Bounds::point(0.0)
    }

    pub fn one() -> Self {
        Bounds::point(1.0)
    }

    pub fn infinite() -> Self {
        Bounds {
            lo: f64::INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn mid(&self) -> f64 {
        if self.is_finite() {
            0.5 * (self.lo + self.hi)
        } else {
            f64::INFINITY
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn rel_width(&self) -> f64 {
        let scale = self.lo.abs().max(self.hi.abs());
        if scale == 0.0 {
            0.0
        } else {
            self.width() / scale
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn add(&self, other: &Bounds) -> Bounds {
        Bounds::new(self.lo + other.lo, self.hi + other.hi)
    }

    pub fn sub(&self, other: &Bounds) -> Bounds {
        Bounds::new(self.lo - other.hi, self.hi - other.lo)
    }

    pub fn neg(&self) -> Bounds {
        Bounds::new(-self.hi, -self.lo)
    }

    pub fn mul(&self, other: &Bounds) -> Bounds {
        let candidates = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ];
        let lo = candidates.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = candidates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Bounds::new(lo, hi)
    }

    /// Multiplication by a non-negative point value.
    pub fn scale(&self, k: f64) -> Bounds {
        debug_assert!(k >= 0.0);
        Bounds::new(self.lo * k, self.hi * k)
    }

    pub fn exp(&self) -> Bounds {
        Bounds::new(self.lo.exp(), self.hi.exp()).widen(ROUND_SLOP)
    }

    /// Intersection with `[0, ∞)`.
    pub fn max0(&self) -> Bounds {
        Bounds::new(self.lo.max(0.0), self.hi.max(0.0))
    }

    /// Widens both endpoints by a relative amount (plus a tiny absolute
    /// floor), used to absorb rounding in the interval computations
    /// themselves.
    pub fn widen(&self, rel: f64) -> Bounds {
        if !self.is_finite() {
            return *self;
        }
        let pad = rel * self.lo.abs().max(self.hi.abs()) + f64::MIN_POSITIVE;
        Bounds::new(self.lo - pad, self.hi + pad)
    }
}

/// Certified enclosure of the tail `Σ_{j ≥ a} j^{-s}` for `s > 1`.
///
/// Terms up to a threshold are summed directly; the remainder uses the
/// Euler-Maclaurin expansion, whose error after the first correction term is
/// bounded by the next one because all derivatives of `x^{-s}` alternate in
/// sign.
pub fn zeta_from(s: f64, a: u64) -> Bounds {
    assert!(s > 1.0, "tail requires s > 1");
    let a = a.max(1);
    let switch = a.max(1024);
    let mut head = 0.0f64;
    let mut j = a;
    while j < switch {
        head += (j as f64).powf(-s);
        j += 1;
    }
    let x = switch as f64;
    let integral = x.powf(1.0 - s) / (s - 1.0);
    let half = 0.5 * x.powf(-s);
    let t2 = s * x.powf(-s - 1.0) / 12.0;
    let t4 = s * (s + 1.0) * (s + 2.0) * x.powf(-s - 3.0) / 720.0;
    let estimate = integral + half + t2;
    Bounds::new(head + estimate - t4, head + estimate).widen(ROUND_SLOP)
}

/// Logarithm-series enclosure of `Σ_{j > J} ln(1 + x_j)` where
/// `x_j = k · c · j^{-λ}` and `x_{J+1} ≤ 1`.
pub fn log_one_plus_powerlaw_tail(kc: f64, lambda: f64, cutoff: u64) -> Bounds {
    debug_assert!(kc >= 0.0);
    if kc == 0.0 {
        return Bounds::zero();
    }
    assert!(lambda > 1.0, "summable tail requires lambda > 1");
    let a = cutoff + 1;
    debug_assert!(kc * (a as f64).powf(-lambda) <= 1.0);
    let z1 = zeta_from(lambda, a);
    let z2 = zeta_from(2.0 * lambda, a);
    let z3 = zeta_from(3.0 * lambda, a);
    let z4 = zeta_from(4.0 * lambda, a);
    // ln(1+x) = x - x²/2 + x³/3 - θ·x⁴/4 with θ ∈ [0, 1].
    let s3 = z1
        .scale(kc)
        .sub(&z2.scale(kc * kc / 2.0))
        .add(&z3.scale(kc.powi(3) / 3.0));
    let rem = z4.scale(kc.powi(4) / 4.0);
    Bounds::new(s3.lo - rem.hi, s3.hi).widen(ROUND_SLOP)
}

/// Logarithm-series enclosure of `Σ_{j > J} ln(1 - x_j)` (a non-positive
/// quantity) where `x_j = c · j^{-λ}` and `x_{J+1} < 1`.
pub fn log_one_minus_powerlaw_tail(c: f64, lambda: f64, cutoff: u64) -> Bounds {
    debug_assert!(c >= 0.0);
    if c == 0.0 {
        return Bounds::zero();
    }
    assert!(lambda > 1.0, "summable tail requires lambda > 1");
    let a = cutoff + 1;
    let xmax = c * (a as f64).powf(-lambda);
    debug_assert!(xmax < 1.0);
    let z1 = zeta_from(lambda, a);
    let z2 = zeta_from(2.0 * lambda, a);
    let z3 = zeta_from(3.0 * lambda, a);
    let z4 = zeta_from(4.0 * lambda, a);
    // -ln(1-x) = x + x²/2 + x³/3 + θ·x⁴/(4(1-x)) with θ ∈ [0, 1].
    let s3 = z1
        .scale(c)
        .add(&z2.scale(c * c / 2.0))
        .add(&z3.scale(c.powi(3) / 3.0));
    let rem = z4.scale(c.powi(4) / (4.0 * (1.0 - xmax)));
    Bounds::new(-(s3.hi + rem.hi), -s3.lo).widen(ROUND_SLOP)
}

/// Enclosure of the geometric power sum `Σ_{j > J} (c·q^j)^e` with
/// `0 ≤ q < 1`.
pub fn geometric_tail_powered(c: f64, q: f64, cutoff: u64, e: f64) -> Bounds {
    debug_assert!((0.0..1.0).contains(&q) && c >= 0.0 && e > 0.0);
    if c == 0.0 || q == 0.0 {
        return Bounds::zero();
    }
    let qe = q.powf(e);
    let value = c.powf(e) * qe.powi(cutoff as i32 + 1) / (1.0 - qe);
    Bounds::point(value).widen(8.0 * ROUND_SLOP).max0()
}
