//! Dense weight tables over the subset lattice, difference operators, and
//! complete-monotonicity certificates.
//!
//! Non-negative tables ([`WeightTable`]) and signed tables ([`SignedTable`])
//! are distinct types: difference operators and the inverse transform produce
//! signed entries, and keeping the non-negativity invariant in the type makes
//! it checkable at the boundaries.

use crate::error::{Error, Result};
use crate::lattice::{check_dense_dim, table_len, Subset};
use crate::scalar::Scalar;

/// Dense table of non-negative weights, one entry per subset of `{1, ..., d}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable<T: Scalar> {
    d: u32,
    values: Vec<T>,
}

/// Dense table with arbitrary sign, the output type of difference operators
/// and of the inverse transform.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedTable<T: Scalar> {
    d: u32,
    values: Vec<T>,
}

impl<T: Scalar> WeightTable<T> {
    /// Builds a table after checking length and non-negativity.
    pub fn new(d: u32, values: Vec<T>) -> Result<Self> {
        check_dense_dim(d)?;
        if values.len() != table_len(d) {
            return Err(Error::InvalidArgument(format!(
                "table for d={} needs {} entries, got {}",
                d,
                table_len(d),
                values.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if *v < T::zero() {
                return Err(Error::NegativeWeight {
                    subset: Subset(i as u32).to_string(),
                    value: v.to_f64(),
                });
            }
        }
        Ok(WeightTable { d, values })
    }

    pub fn zeros(d: u32) -> Result<Self> {
        check_dense_dim(d)?;
        Ok(WeightTable {
            d,
            values: vec![T::zero(); table_len(d)],
        })
    }

    pub fn constant(d: u32, c: T) -> Result<Self> {
        if c < T::zero() {
            return Err(Error::NegativeWeight {
                subset: "{}".into(),
                value: c.to_f64(),
            });
        }
        check_dense_dim(d)?;
        Ok(WeightTable {
            d,
            values: vec![c; table_len(d)],
        })
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, u: Subset) -> &T {
        &self.values[u.bits() as usize]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (Subset, &T)> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (Subset(i as u32), v))
    }

    /// Largest absolute entry as `f64`; the scale used for tolerances.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.abs().to_f64())
            .fold(0.0, f64::max)
    }

    pub fn total(&self) -> T {
        let mut acc = T::zero();
        for v in &self.values {
            acc += v.clone();
        }
        acc
    }

    pub fn as_signed(&self) -> SignedTable<T> {
        SignedTable {
            d: self.d,
            values: self.values.clone(),
        }
    }

    /// Entrywise comparison `self[u] <= other[u]` for all `u`.
    pub fn le(&self, other: &WeightTable<T>) -> bool {
        self.d == other.d
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a <= b)
    }

    /// Single entry of the difference operator; zero whenever `u` meets `v`.
    pub fn delta_at(&self, v: Subset, u: Subset) -> Result<T> {
        self.as_ref_signed().delta_at(v, u)
    }

    /// Full signed table of the difference operator applied along `v`.
    pub fn delta(&self, v: Subset) -> Result<SignedTable<T>> {
        self.as_ref_signed().delta(v)
    }

    fn as_ref_signed(&self) -> SignedTableRef<'_, T> {
        SignedTableRef {
            d: self.d,
            values: &self.values,
        }
    }
}

impl<T: Scalar> From<WeightTable<T>> for SignedTable<T> {
    fn from(t: WeightTable<T>) -> Self {
        SignedTable {
            d: t.d,
            values: t.values,
        }
    }
}

impl<T: Scalar> SignedTable<T> {
    pub fn new(d: u32, values: Vec<T>) -> Result<Self> {
        check_dense_dim(d)?;
        if values.len() != table_len(d) {
            return Err(Error::InvalidArgument(format!(
                "table for d={} needs {} entries, got {}",
                d,
                table_len(d),
                values.len()
            )));
        }
        Ok(SignedTable { d, values })
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn get(&self, u: Subset) -> &T {
        &self.values[u.bits() as usize]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (Subset, &T)> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (Subset(i as u32), v))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.abs().to_f64())
            .fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> (Subset, &T) {
        let mut arg = 0usize;
        for i in 1..self.values.len() {
            if self.values[i] < self.values[arg] {
                arg = i;
            }
        }
        (Subset(arg as u32), &self.values[arg])
    }

    /// Converts back into a weight table, accepting round-off noise down to
    /// `-tol` (clamped to zero). Exact scalars must be non-negative as is.
    pub fn into_weights(self, tol: f64) -> Result<WeightTable<T>> {
        let mut values = self.values;
        for (i, v) in values.iter_mut().enumerate() {
            if *v < T::zero() {
                if !T::EXACT && v.to_f64() >= -tol {
                    *v = T::zero();
                } else {
                    return Err(Error::NegativeWeight {
                        subset: Subset(i as u32).to_string(),
                        value: v.to_f64(),
                    });
                }
            }
        }
        WeightTable::new(self.d, values)
    }

    /// Entrywise maximum deviation from another table, as `f64`.
    pub fn sup_distance(&self, other: &SignedTable<T>) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.clone() - b.clone()).abs().to_f64())
            .fold(0.0, f64::max)
    }

    /// Single entry `sum over w ⊆ v of (-1)^{|w|} table[u ∪ w]`.
    pub fn delta_at(&self, v: Subset, u: Subset) -> Result<T> {
        SignedTableRef {
            d: self.d,
            values: &self.values,
        }
        .delta_at(v, u)
    }

    /// Full table of iterated single-coordinate differences along `v`.
    pub fn delta(&self, v: Subset) -> Result<SignedTable<T>> {
        SignedTableRef {
            d: self.d,
            values: &self.values,
        }
        .delta(v)
    }
}

struct SignedTableRef<'a, T: Scalar> {
    d: u32,
    values: &'a [T],
}

impl<T: Scalar> SignedTableRef<'_, T> {
    fn delta_at(&self, v: Subset, u: Subset) -> Result<T> {
        v.valid_for(self.d)?;
        u.valid_for(self.d)?;
        if !u.intersection(v).is_empty() {
            return Ok(T::zero());
        }
        let mut acc = T::zero();
        for w in v.subsets() {
            let term = self.values[u.union(w).bits() as usize].clone();
            if w.cardinality() % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        Ok(acc)
    }

    fn delta(&self, v: Subset) -> Result<SignedTable<T>> {
        v.valid_for(self.d)?;
        let mut cur = self.values.to_vec();
        // One sweep per member of v, using the single-coordinate recursion
        // new[u] = cur[u] - cur[u ∪ {s}].
        for s in v.members() {
            let bit = 1usize << (s - 1);
            let mut next = cur.clone();
            for (i, slot) in next.iter_mut().enumerate() {
                *slot -= cur[i | bit].clone();
            }
            cur = next;
        }
        SignedTable::new(self.d, cur)
    }
}

/// Which monotonicity class a certificate refers to. For finite dimension the
/// vanishing-limit class coincides with the completely monotone cone, so
/// dense certificates always carry `CompletelyMonotone`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonotoneClass {
    CompletelyMonotone,
    VanishingLimit,
}

/// Evidence attached to a monotonicity verdict.
#[derive(Clone, Debug)]
pub enum Witness<T: Scalar> {
    /// Positive case: the full inverse-transform table, entrywise non-negative.
    InverseTable(SignedTable<T>),
    /// Negative case: a pair `(u, v)` with a strictly negative difference.
    Violation { u: Subset, v: Subset, value: T },
}

/// Outcome of a complete-monotonicity membership test.
#[derive(Clone, Debug)]
pub struct MonotonicityCertificate<T: Scalar> {
    pub is_member: bool,
    pub class: MonotoneClass,
    pub witness: Witness<T>,
    /// Smallest certificate entry (inverse-table entry or the violated
    /// difference), as `f64`.
    pub min_value: f64,
}

impl<T: Scalar> MonotonicityCertificate<T> {
    /// Re-evaluates the witness directly from the table.
    pub fn witness_holds(&self, gamma: &WeightTable<T>, tol: f64) -> bool {
        match &self.witness {
            Witness::InverseTable(t) => t.values().iter().all(|v| v.to_f64() >= -tol),
            Witness::Violation { u, v, value } => match gamma.delta_at(*v, *u) {
                Ok(recomputed) => {
                    recomputed.to_f64() < -tol
                        && (recomputed - value.clone()).abs().to_f64() <= tol
                }
                Err(_) => false,
            },
        }
    }
}

/// Absolute tolerance for sign tests on float tables; exact tables use zero.
pub fn monotone_tolerance<T: Scalar>(scale: f64) -> f64 {
    if T::EXACT {
        0.0
    } else {
        1e-12 * scale.max(1e-300)
    }
}

/// Membership test for the completely monotone cone via the inverse
/// transform: the table belongs to the cone exactly when every entry of the
/// unscaled inverse transform is non-negative.
pub fn check_completely_monotone<T: Scalar>(
    gamma: &WeightTable<T>,
) -> MonotonicityCertificate<T> {
    check_completely_monotone_with_tol(gamma, monotone_tolerance::<T>(gamma.sup_norm()))
}

/// [`check_completely_monotone`] with an explicit absolute tolerance for the
/// sign tests (ignored in exact mode, where zero is used).
pub fn check_completely_monotone_with_tol<T: Scalar>(
    gamma: &WeightTable<T>,
    tol_abs: f64,
) -> MonotonicityCertificate<T> {
    let inverse = crate::transforms::mobius_superset(&gamma.as_signed());
    let tol = if T::EXACT { 0.0 } else { tol_abs };
    let (min_u, min_v) = inverse.min_entry();
    let min_value = min_v.to_f64();
    if min_value >= -tol {
        return MonotonicityCertificate {
            is_member: true,
            class: MonotoneClass::CompletelyMonotone,
            witness: Witness::InverseTable(inverse),
            min_value,
        };
    }
    // Deterministic negative witness. Small tables re-scan all differences in
    // lexicographic (v, u) bitmask order; larger ones convert the first
    // negative inverse entry into the corresponding violated difference.
    if gamma.dim() <= 6 {
        if let Some((u, v, value)) = scan_first_violation(gamma, tol) {
            return MonotonicityCertificate {
                is_member: false,
                class: MonotoneClass::CompletelyMonotone,
                witness: Witness::Violation { u, v, value },
                min_value,
            };
        }
    }
    let first_u = inverse
        .iter()
        .find(|(_, v)| v.to_f64() < -tol)
        .map(|(u, _)| u)
        .unwrap_or(min_u);
    let v = first_u.complement(gamma.dim());
    let value = gamma
        .delta_at(v, first_u)
        .expect("witness indices are valid");
    MonotonicityCertificate {
        is_member: false,
        class: MonotoneClass::CompletelyMonotone,
        witness: Witness::Violation { u: first_u, v, value },
        min_value,
    }
}

fn scan_first_violation<T: Scalar>(
    gamma: &WeightTable<T>,
    tol: f64,
) -> Option<(Subset, Subset, T)> {
    let n = table_len(gamma.dim());
    for v_bits in 0..n {
        let v = Subset(v_bits as u32);
        let diff = gamma.delta(v).expect("valid dimension");
        for u_bits in 0..n {
            let val = &diff.values()[u_bits];
            if val.to_f64() < -tol {
                return Some((Subset(u_bits as u32), v, val.clone()));
            }
        }
    }
    None
}

/// Direct membership test evaluating every difference; the oracle for
/// [`check_completely_monotone`]. Quadratic in the table size, so the
/// dimension is capped.
pub fn check_monotone_bruteforce<T: Scalar>(
    gamma: &WeightTable<T>,
) -> Result<MonotonicityCertificate<T>> {
    if gamma.dim() > 6 {
        return Err(Error::DimensionTooLarge(gamma.dim(), 6));
    }
    let tol = monotone_tolerance::<T>(gamma.sup_norm());
    let n = table_len(gamma.dim());
    let mut min_value = f64::INFINITY;
    let mut violation: Option<(Subset, Subset, T)> = None;
    for v_bits in 0..n {
        let v = Subset(v_bits as u32);
        let diff = gamma.delta(v)?;
        for u_bits in 0..n {
            let val = &diff.values()[u_bits];
            let vf = val.to_f64();
            if vf < min_value {
                min_value = vf;
            }
            if violation.is_none() && vf < -tol {
                violation = Some((Subset(u_bits as u32), v, val.clone()));
            }
        }
    }
    Ok(match violation {
        None => MonotonicityCertificate {
            is_member: true,
            class: MonotoneClass::CompletelyMonotone,
            witness: Witness::InverseTable(crate::transforms::mobius_superset(
                &gamma.as_signed(),
            )),
            min_value,
        },
        Some((u, v, value)) => MonotonicityCertificate {
            is_member: false,
            class: MonotoneClass::CompletelyMonotone,
            witness: Witness::Violation { u, v, value },
            min_value,
        },
    })
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
    fn rejects_negative_and_bad_length() {
        assert!(WeightTable::new(1, vec![1.0, -0.5]).is_err());
        assert!(WeightTable::new(2, vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn delta_empty_is_identity() {
        let g = table(&[5.0, 5.0, 3.0, 1.0]);
        let d = g.delta(Subset::EMPTY).unwrap();
        assert_eq!(d.values(), g.values());
    }

    #[test]
    fn delta_vanishes_on_overlap() {
        let g = table(&[4.0, 3.0, 2.0, 1.0]);
        let v = Subset::from_members(&[1]);
        let u = Subset::from_members(&[1, 2]);
        assert_eq!(g.delta_at(v, u).unwrap(), 0.0);
        // The full-table sweep agrees entrywise with the defining sum.
        let full = g.delta(v).unwrap();
        assert_eq!(*full.get(u), 0.0);
    }

    #[test]
    fn delta_singleton_is_first_difference() {
        let g = table(&[4.0, 3.0, 2.0, 1.5]);
        let v = Subset::from_members(&[2]);
        let u = Subset::from_members(&[1]);
        assert_eq!(g.delta_at(v, u).unwrap(), 3.0 - 1.5);
    }

    #[test]
    fn product_weight_second_difference() {
        // Product weights (1/2, 1/3) at d = 2: the difference over the full
        // set at the empty set is (1 - 1/2)(1 - 1/3) = 1/3.
        let g = table(&[1.0, 0.5, 1.0 / 3.0, 0.5 / 3.0]);
        let val = g
            .delta_at(Subset::from_members(&[1, 2]), Subset::EMPTY)
            .unwrap();
        assert!((val - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_table_is_member() {
        let g = WeightTable::constant(3, 2.5).unwrap();
        let cert = check_completely_monotone(&g);
        assert!(cert.is_member);
        assert!(check_monotone_bruteforce(&g).unwrap().is_member);
    }

    #[test]
    fn zero_table_is_member() {
        let g: WeightTable<f64> = WeightTable::zeros(4).unwrap();
        assert!(check_completely_monotone(&g).is_member);
    }

    #[test]
    fn known_counterexample_rejected_with_witness() {
        let g = table(&[5.0, 5.0, 3.0, 1.0]);
        let cert = check_completely_monotone(&g);
        assert!(!cert.is_member);
        assert_eq!(cert.min_value, -2.0);
        match cert.witness {
            Witness::Violation { u, v, value } => {
                assert_eq!(u, Subset::EMPTY);
                assert_eq!(v, Subset::from_members(&[1, 2]));
                assert_eq!(value, -2.0);
                assert_eq!(g.delta_at(v, u).unwrap(), -2.0);
            }
            _ => panic!("expected a violation witness"),
        }
        let brute = check_monotone_bruteforce(&g).unwrap();
        assert!(!brute.is_member);
    }

    #[test]
    fn exact_mode_agrees() {
        let vals: Vec<Rational> = [5.0, 5.0, 3.0, 1.0]
            .iter()
            .map(|&x| Rational::from_f64(x))
            .collect();
        let g = WeightTable::new(2, vals).unwrap();
        let cert = check_completely_monotone(&g);
        assert!(!cert.is_member);
        assert_eq!(cert.min_value, -2.0);
    }
}
