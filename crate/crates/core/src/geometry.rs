//! Geometry of the completely monotone cone: maximal monotone minorants via
//! linear programming, the hypercube view of dense tables, the two-sided
//! difference identity, and the measure/CDF reading of the transforms.

use crate::error::{Error, Result};
use crate::lattice::{table_len, Subset};
use crate::scalar::Scalar;
use crate::simplex;
use crate::table::{check_completely_monotone, monotone_tolerance, SignedTable, WeightTable};
use crate::transforms::{mobius_superset, zeta_superset, TransformParams};

/// Outcome of the maximal-minorant search.
#[derive(Clone, Debug)]
pub struct MinorantResult<T: Scalar> {
    /// A completely monotone table below the input.
    pub minorant: WeightTable<T>,
    /// Total mass of the minorant (the objective that was maximized).
    pub objective: T,
    /// Whether no single entry can be increased while staying feasible.
    pub maximal: bool,
    /// Largest feasible increase per entry; all zero when maximal.
    pub headroom: SignedTable<T>,
}

/// Largest dimension accepted by the dense linear program.
pub const MAX_LP_DIM: u32 = 12;

/// Finds a maximal element of `{γ̃ completely monotone : γ̃ ≤ γ}` by
/// maximizing the total mass.
///
/// The cone is parameterized through the inverse transform: a table is
/// completely monotone exactly when it is the forward transform (at unit
/// constant) of a non-negative table `ρ`. In those coordinates the program
/// is `max Σ_v 2^{|v|} ρ_v` subject to `(T↑ρ)_u ≤ γ_u` and `ρ ≥ 0`, whose
/// constraint matrix is the superset indicator and whose origin is feasible.
/// A total-mass maximizer is maximal in the entrywise order: any strictly
/// larger feasible table would have strictly larger mass.
pub fn maximal_monotone_minorant<T: Scalar>(gamma: &WeightTable<T>) -> Result<MinorantResult<T>> {
    let d = gamma.dim();
    if d > MAX_LP_DIM {
        return Err(Error::DimensionTooLarge(d, MAX_LP_DIM));
    }
    let n = table_len(d);
    let mut a = vec![vec![T::zero(); n]; n];
    for (u, row) in a.iter_mut().enumerate() {
        for (v, slot) in row.iter_mut().enumerate() {
            if u & v == u {
                *slot = T::one();
            }
        }
    }
    let b: Vec<T> = gamma.values().to_vec();
    let c: Vec<T> = (0..n)
        .map(|v| T::from_u32(1 << (v as u32).count_ones()))
        .collect();
    let lp = simplex::maximize(&a, &b, &c)?;

    let rho = SignedTable::new(d, lp.solution)?;
    let minorant = zeta_superset(&rho).into_weights(1e-9 * gamma.sup_norm().max(1.0))?;
    let headroom = headroom_table(&minorant, gamma)?;
    let tol = monotone_tolerance::<T>(gamma.sup_norm()).max(if T::EXACT { 0.0 } else { 1e-9 });
    let maximal = headroom.values().iter().all(|h| h.to_f64() <= tol);
    Ok(MinorantResult {
        objective: lp.objective,
        minorant,
        maximal,
        headroom,
    })
}

/// Per-entry headroom: the largest `ε ≥ 0` such that increasing that single
/// entry by `ε` keeps the table monotone and below `γ`.
///
/// Increasing entry `u` by `ε` changes the inverse transform at `w ⊆ u` by
/// `(-1)^{|u|-|w|} ε`, so feasibility requires `ε` at most the smallest
/// inverse entry over `w ⊆ u` of odd co-cardinality, and at most the box gap
/// `γ_u - γ̃_u`.
pub fn headroom_table<T: Scalar>(
    candidate: &WeightTable<T>,
    gamma: &WeightTable<T>,
) -> Result<SignedTable<T>> {
    let d = gamma.dim();
    if candidate.dim() != d {
        return Err(Error::DimensionMismatch(candidate.dim(), d));
    }
    let inverse = mobius_superset(&candidate.as_signed());
    let n = table_len(d);
    let mut out = Vec::with_capacity(n);
    for u in 0..n {
        let mut h = gamma.values()[u].clone() - candidate.values()[u].clone();
        if h < T::zero() {
            h = T::zero();
        }
        let us = Subset(u as u32);
        for w in us.subsets() {
            if (us.cardinality() - w.cardinality()) % 2 == 1 {
                let slack = inverse.get(w).clone();
                if slack < h {
                    h = slack;
                }
            }
        }
        if h < T::zero() {
            h = T::zero();
        }
        out.push(h);
    }
    SignedTable::new(d, out)
}

/// Checks that a candidate is a maximal monotone minorant of `γ`: the
/// candidate must be monotone, lie below `γ`, and admit no single-entry
/// increase.
pub fn verify_maximal<T: Scalar>(
    candidate: &WeightTable<T>,
    gamma: &WeightTable<T>,
) -> Result<(bool, SignedTable<T>)> {
    if !candidate.le(gamma) {
        return Err(Error::InvalidArgument(
            "candidate exceeds the reference table".into(),
        ));
    }
    if !check_completely_monotone(candidate).is_member {
        return Err(Error::NotMonotone("candidate is not in the cone".into()));
    }
    let headroom = headroom_table(candidate, gamma)?;
    let tol = monotone_tolerance::<T>(gamma.sup_norm()).max(if T::EXACT { 0.0 } else { 1e-9 });
    let maximal = headroom.values().iter().all(|h| h.to_f64() <= tol);
    Ok((maximal, headroom))
}

/// A function on the binary hypercube `{0,1}^d`, identified with a table on
/// the subset lattice by reading ones as members.
#[derive(Clone, Debug)]
pub struct HypercubeFunction<T: Scalar> {
    table: SignedTable<T>,
}

impl<T: Scalar> HypercubeFunction<T> {
    pub fn from_table(table: &WeightTable<T>) -> Self {
        HypercubeFunction {
            table: table.as_signed(),
        }
    }

    pub fn dim(&self) -> u32 {
        self.table.dim()
    }

    /// Value at a vertex given as a bitmask.
    pub fn at(&self, vertex: u32) -> &T {
        self.table.get(Subset(vertex))
    }
}

/// Exhaustively checks the completely-monotonically-decreasing inequalities
/// of the hypercube extension: for every non-empty `v` and all vertices
/// `x ≤ y` on `v`, the alternating sum over replacements is non-negative.
/// Agrees with the dense monotonicity test.
pub fn hypercube_extension_check<T: Scalar>(gamma: &WeightTable<T>) -> Result<bool> {
    let d = gamma.dim();
    if d > 4 {
        return Err(Error::DimensionTooLarge(d, 4));
    }
    let f = HypercubeFunction::from_table(gamma);
    let n = table_len(d) as u32;
    let tol = monotone_tolerance::<T>(gamma.sup_norm());
    for v in 1..n {
        for x in 0..n {
            for y in 0..n {
                // Need x_j ≤ y_j for all j in v.
                if x & v & !y != 0 {
                    continue;
                }
                let mut acc = T::zero();
                for w in Subset(v).subsets() {
                    let vertex = (x & !w.bits()) | (y & w.bits());
                    let term = f.at(vertex).clone();
                    if w.cardinality() % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                if acc.to_f64() < -tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Single-set difference from the set-function calculus:
/// `(Δ'_v ρ)_u = ρ_{v ∪ u} - ρ_u` as a full table.
pub fn delta_prime<T: Scalar>(table: &SignedTable<T>, v: Subset) -> Result<SignedTable<T>> {
    v.valid_for(table.dim())?;
    let n = table_len(table.dim());
    let mut out = Vec::with_capacity(n);
    for u in 0..n {
        let joined = v.bits() as usize | u;
        out.push(table.values()[joined].clone() - table.values()[u].clone());
    }
    SignedTable::new(table.dim(), out)
}

/// Evaluates both routes of the difference identity at `u`: the
/// inclusion-exclusion difference along `{s_1, ..., s_n}` and the signed
/// composition `(-1)^n Δ'_{s_n} ··· Δ'_{s_1}`. Both values are returned;
/// they agree for every ordering of distinct coordinates.
pub fn delta_prime_equivalence<T: Scalar>(
    gamma: &WeightTable<T>,
    coordinates: &[u32],
    u: Subset,
) -> Result<(T, T)> {
    let d = gamma.dim();
    if d > 8 {
        return Err(Error::DimensionTooLarge(d, 8));
    }
    let mut seen = 0u32;
    for &s in coordinates {
        if s == 0 || s > d {
            return Err(Error::DimensionMismatch(s, d));
        }
        let bit = 1 << (s - 1);
        if seen & bit != 0 {
            return Err(Error::InvalidArgument(
                "coordinates must be distinct".into(),
            ));
        }
        seen |= bit;
    }
    let v = Subset(seen);
    let direct = gamma.delta_at(v, u)?;

    let mut cur = gamma.as_signed();
    for &s in coordinates {
        cur = delta_prime(&cur, Subset::from_members(&[s]))?;
    }
    let mut composed = cur.get(u).clone();
    if coordinates.len() % 2 == 1 {
        composed = -composed;
    }
    Ok((direct, composed))
}

/// Density/CDF view of a non-negative table: the table itself is the density
/// of a measure on the power set, and its forward transform at unit constant
/// collects the mass of all supersets.
#[derive(Clone, Debug)]
pub struct MeasureViews<T: Scalar> {
    pub density: WeightTable<T>,
    pub cdf: WeightTable<T>,
}

pub fn measure_views<T: Scalar>(gamma: &WeightTable<T>) -> Result<MeasureViews<T>> {
    let params = TransformParams::finite(T::one(), gamma.dim())?;
    let cdf = crate::transforms::t_up(gamma, &params)?;
    Ok(MeasureViews {
        density: gamma.clone(),
        cdf,
    })
}

/// Recovers the density from a CDF table; inverse of [`measure_views`].
pub fn density_from_cdf<T: Scalar>(cdf: &WeightTable<T>) -> Result<SignedTable<T>> {
    let params = TransformParams::finite(T::one(), cdf.dim())?;
    crate::transforms::t_down(cdf, &params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn table(values: &[f64]) -> WeightTable<f64> {
        let d = values.len().trailing_zeros();
        WeightTable::new(d, values.to_vec()).unwrap()
    }

    #[test]
    fn minorant_of_monotone_table_is_identity() {
        let g = table(&[5.0, 5.0, 1.0, 1.0]);
        assert!(check_completely_monotone(&g).is_member);
        let r = maximal_monotone_minorant(&g).unwrap();
        assert!(r.maximal);
        for (a, b) in r.minorant.values().iter().zip(g.values()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((r.objective - 12.0).abs() < 1e-9);
    }

    #[test]
    fn minorant_of_counterexample() {
        let g = table(&[5.0, 5.0, 3.0, 1.0]);
        let r = maximal_monotone_minorant(&g).unwrap();
        assert!((r.objective - 12.0).abs() < 1e-9);
        assert!(r.maximal);
        assert!(r.minorant.le(&g));
        assert!(check_completely_monotone(&r.minorant).is_member);
    }

    #[test]
    fn minorant_exact_mode() {
        let vals: Vec<Rational> = [5.0, 5.0, 3.0, 1.0]
            .iter()
            .map(|x| Rational::from_f64(*x))
            .collect();
        let g = WeightTable::new(2, vals).unwrap();
        let r = maximal_monotone_minorant(&g).unwrap();
        assert_eq!(r.objective, Rational::from_f64(12.0));
        assert!(r.maximal);
    }

    #[test]
    fn zero_table_minorant() {
        let g = table(&[0.0, 0.0, 0.0, 0.0]);
        let r = maximal_monotone_minorant(&g).unwrap();
        assert_eq!(r.objective, 0.0);
        assert!(r.maximal);
    }

    #[test]
    fn known_maximal_candidates_verify() {
        let gamma = table(&[5.0, 5.0, 3.0, 1.0]);
        let eta = table(&[5.0, 5.0, 1.0, 1.0]);
        let zeta = table(&[5.0, 3.0, 3.0, 1.0]);
        let (max_eta, _) = verify_maximal(&eta, &gamma).unwrap();
        let (max_zeta, _) = verify_maximal(&zeta, &gamma).unwrap();
        assert!(max_eta && max_zeta);
        // Mutually incomparable.
        assert!(!eta.le(&zeta) && !zeta.le(&eta));
        // The zero table is dominated, hence not maximal.
        let zero = table(&[0.0, 0.0, 0.0, 0.0]);
        let (max_zero, headroom) = verify_maximal(&zero, &gamma).unwrap();
        assert!(!max_zero);
        assert!(headroom.values().iter().any(|h| *h > 1.0));
    }

    #[test]
    fn hypercube_check_agrees_with_cone_test() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(77);
        for _ in 0..100 {
            let vals: Vec<f64> = (0..8).map(|_| rng.gen_range(0.0..1.0)).collect();
            let g = table(&vals);
            let via_cube = hypercube_extension_check(&g).unwrap();
            let via_cone = check_completely_monotone(&g).is_member;
            assert_eq!(via_cube, via_cone);
        }
        let bad = table(&[5.0, 5.0, 3.0, 1.0]);
        assert!(!hypercube_extension_check(&bad).unwrap());
        let constant = WeightTable::constant(3, 2.0).unwrap();
        assert!(hypercube_extension_check(&constant).unwrap());
    }

    #[test]
    fn difference_identity_routes_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let vals: Vec<f64> = (0..32).map(|_| rng.gen_range(0.0..2.0)).collect();
        let g = table(&vals);
        // Single coordinate: the two differences are negatives of each other,
        // so the signed composition matches the direct difference.
        let (a, b) = delta_prime_equivalence(&g, &[3], Subset::EMPTY).unwrap();
        assert!((a - b).abs() < 1e-12);
        // Order independence.
        let u = Subset::from_members(&[4]);
        let (d1, c1) = delta_prime_equivalence(&g, &[1, 2, 3], u).unwrap();
        let (d2, c2) = delta_prime_equivalence(&g, &[3, 1, 2], u).unwrap();
        assert!((d1 - c1).abs() < 1e-12);
        assert!((d2 - c2).abs() < 1e-12);
        assert!((d1 - d2).abs() < 1e-12);
        // Repeated coordinates are rejected.
        assert!(delta_prime_equivalence(&g, &[2, 2], Subset::EMPTY).is_err());
        // Constant tables: both routes vanish for non-empty sets.
        let c = WeightTable::constant(5, 1.5).unwrap();
        let (x, y) = delta_prime_equivalence(&c, &[1, 4], Subset::EMPTY).unwrap();
        assert_eq!(x, 0.0);
        assert_eq!(y, 0.0);
    }

    #[test]
    fn measure_views_roundtrip() {
        let g = table(&[0.0, 1.0, 2.0, 0.5]);
        let views = measure_views(&g).unwrap();
        // The empty-set CDF entry is the total mass.
        assert_eq!(*views.cdf.get(Subset::EMPTY), 3.5);
        let back = density_from_cdf(&views.cdf).unwrap();
        for (a, b) in back.values().iter().zip(g.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        // Point mass: the CDF indicates subsets of the carrier.
        let point = table(&[0.0, 0.0, 0.0, 2.0]);
        let views = measure_views(&point).unwrap();
        for (u, v) in views.cdf.iter() {
            let expect = if u.is_subset_of(Subset(0b11)) { 2.0 } else { 0.0 };
            assert_eq!(*v, expect);
        }
    }
}
