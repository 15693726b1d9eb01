//! Worst-case integration error of equal-weight rules in weighted
//! superposition spaces, and the two-sided error-transfer chain.
//!
//! For equal-weight quadrature at nodes `x_1, ..., x_n` the squared
//! worst-case error has the closed form
//! `∬K - (2/n) Σ_i ∫K(x_i, ·) + (1/n²) Σ_{i,j} K(x_i, x_j)`,
//! which needs the univariate kernel's section and double integrals. All
//! three ingredients are instances of the same weighted product functional.

use crate::error::{Error, Result};
use crate::families::{SequenceSpec, WeightSpec};
use crate::geometry::maximal_monotone_minorant;
use crate::kernels::{SuperpositionKernel, UnivariateKernel, WeightsRepr};
use crate::lattice::Dim;
use crate::points::PointSet;
use crate::table::{check_completely_monotone, WeightTable};
use crate::transforms::{t_down, t_up, TransformParams};

/// Negative values of the squared error beyond this threshold are a
/// numerical failure; closer to zero they are clamped.
pub const WCE_NEGATIVE_TOL: f64 = 1e-10;

/// Worst-case integration error of the equal-weight rule at the given nodes.
pub fn wce_integration(points: &PointSet, kernel: &SuperpositionKernel) -> Result<f64> {
    if points.d != kernel.d {
        return Err(Error::DimensionMismatch(points.d, kernel.d));
    }
    let d = kernel.d as usize;
    let i2 = kernel
        .kernel
        .integral_double()
        .ok_or_else(|| Error::MissingIntegrals(kernel.kernel.name().into()))?;
    let double_integral = kernel.weights.product_functional(&vec![i2; d])?;

    let n = points.len() as f64;
    let mut cross = 0.0;
    for node in &points.nodes {
        let sections: Result<Vec<f64>> = node
            .iter()
            .map(|&x| {
                kernel
                    .kernel
                    .integral_section(x)
                    .ok_or_else(|| Error::MissingIntegrals(kernel.kernel.name().into()))
            })
            .collect();
        cross += kernel.weights.product_functional(&sections?)?;
    }

    let mut pair = 0.0;
    for (i, xi) in points.nodes.iter().enumerate() {
        // Diagonal once, off-diagonal twice by symmetry.
        pair += kernel.eval(xi, xi)?;
        for xj in points.nodes.iter().skip(i + 1) {
            pair += 2.0 * kernel.eval(xi, xj)?;
        }
    }

    let e2 = double_integral - 2.0 / n * cross + pair / (n * n);
    if e2 < -WCE_NEGATIVE_TOL {
        return Err(Error::Numerical(format!(
            "squared worst-case error {e2} is negative beyond tolerance"
        )));
    }
    Ok(e2.max(0.0).sqrt())
}

/// Weights and errors of one direction of the transfer.
#[derive(Clone, Debug)]
pub struct TransferSide {
    pub wce_base: f64,
    pub wce_transferred: f64,
    pub transformed: WeightTable<f64>,
    pub ordering_ok: bool,
}

/// Slack allowed when asserting the transfer orderings.
pub const ORDERING_SLACK: f64 = 1e-10;

fn densify(weights: &WeightsRepr, d: u32) -> Result<WeightTable<f64>> {
    match weights {
        WeightsRepr::Table(t) => {
            if t.dim() != d {
                return Err(Error::DimensionMismatch(t.dim(), d));
            }
            Ok(t.clone())
        }
        WeightsRepr::Spec(s) => s.truncate_to_table(d),
    }
}

/// Upper transfer: the worst-case error in the source space is at most the
/// one in the space with forward-transformed weights and target kernel
/// (valid once the constant dominates the univariate embedding norm).
pub fn transfer_upper(
    points: &PointSet,
    weights: &WeightsRepr,
    k: UnivariateKernel,
    l: UnivariateKernel,
    c_up: f64,
) -> Result<TransferSide> {
    let d = points.d;
    let table = densify(weights, d)?;
    let params = TransformParams::finite(c_up, d)?;
    let up = t_up(&table, &params)?;
    let base = SuperpositionKernel::new(WeightsRepr::Table(table), k, d)?;
    let lifted = SuperpositionKernel::new(WeightsRepr::Table(up.clone()), l, d)?;
    let wce_base = wce_integration(points, &base)?;
    let wce_transferred = wce_integration(points, &lifted)?;
    Ok(TransferSide {
        wce_base,
        wce_transferred,
        transformed: up,
        ordering_ok: wce_base <= wce_transferred + ORDERING_SLACK,
    })
}

/// Lower transfer: the worst-case error in the space with
/// inverse-transformed monotone-minorant weights and target kernel is at
/// most the one in the source space.
pub fn transfer_lower(
    points: &PointSet,
    weights: &WeightsRepr,
    k: UnivariateKernel,
    l: UnivariateKernel,
    c_down: f64,
) -> Result<TransferLowerSide> {
    let d = points.d;
    let table = densify(weights, d)?;
    let (monotone, minorant_used) = monotone_minorant_route(weights, &table, d)?;
    let params = TransformParams::finite(c_down, d)?;
    let down = t_down(&monotone, &params)?
        .into_weights(1e-9 * monotone.sup_norm().max(1.0))?;
    let base = SuperpositionKernel::new(WeightsRepr::Table(table), k, d)?;
    let lowered = SuperpositionKernel::new(WeightsRepr::Table(down.clone()), l, d)?;
    let wce_base = wce_integration(points, &base)?;
    let wce_transferred = wce_integration(points, &lowered)?;
    Ok(TransferLowerSide {
        side: TransferSide {
            wce_base,
            wce_transferred,
            transformed: down,
            ordering_ok: wce_transferred <= wce_base + ORDERING_SLACK,
        },
        minorant: monotone,
        minorant_used,
    })
}

#[derive(Clone, Debug)]
pub struct TransferLowerSide {
    pub side: TransferSide,
    /// The monotone weights that were inverted (the input itself when it is
    /// already monotone).
    pub minorant: WeightTable<f64>,
    pub minorant_used: bool,
}

/// Chooses the monotone weights for the lower route: the input when already
/// monotone; for product families the factor clip `min(γ_j, 1)` (a monotone
/// minorant in closed form); otherwise the dense maximal minorant.
fn monotone_minorant_route(
    weights: &WeightsRepr,
    table: &WeightTable<f64>,
    d: u32,
) -> Result<(WeightTable<f64>, bool)> {
    if check_completely_monotone(table).is_member {
        return Ok((table.clone(), false));
    }
    if let WeightsRepr::Spec(WeightSpec::Product { seq, .. }) = weights {
        let clipped: Vec<f64> = (1..=d).map(|j| seq.get(j).min(1.0)).collect();
        let spec = WeightSpec::Product {
            seq: SequenceSpec::Explicit(clipped),
            d: Dim::Finite(d),
        };
        return Ok((spec.truncate_to_table(d)?, true));
    }
    let r = maximal_monotone_minorant(table)?;
    Ok((r.minorant, true))
}

/// Outcome of the full two-sided transfer.
#[derive(Clone, Debug)]
pub struct TransferReport {
    pub wce_base: f64,
    pub wce_upper: f64,
    pub wce_lower: f64,
    pub c_up: f64,
    pub c_down: f64,
    pub upper_weights: WeightTable<f64>,
    pub lower_weights: WeightTable<f64>,
    pub minorant: WeightTable<f64>,
    pub minorant_used: bool,
    pub ordering_ok: bool,
}

/// Runs both transfer directions and checks the two-sided ordering
/// `wce_lower ≤ wce_base ≤ wce_upper`.
pub fn full_transfer(
    points: &PointSet,
    weights: &WeightsRepr,
    k: UnivariateKernel,
    l: UnivariateKernel,
    c_up: f64,
    c_down: f64,
) -> Result<TransferReport> {
    let upper = transfer_upper(points, weights, k, l, c_up)?;
    let lower = transfer_lower(points, weights, k, l, c_down)?;
    let ordering_ok = upper.ordering_ok && lower.side.ordering_ok;
    Ok(TransferReport {
        wce_base: upper.wce_base,
        wce_upper: upper.wce_transferred,
        wce_lower: lower.side.wce_transferred,
        c_up,
        c_down,
        upper_weights: upper.transformed,
        lower_weights: lower.side.transformed,
        minorant: lower.minorant,
        minorant_used: lower.minorant_used,
        ordering_ok,
    })
}
