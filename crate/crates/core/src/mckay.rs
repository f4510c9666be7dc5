//! Rank counts on both sides of the toric McKay correspondence.
//!
//! No categories are built: the report compares the number of maximal
//! cells of a resolution with the order of the group being quotiented.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fan::{cone_over_triangulation, is_crepant, is_smooth, orthant_fan, Fan};
use crate::lattice::{lattice_index, CongruenceLattice, IntMatrix, Lattice};
use crate::simplex::{interior_points, DilatedSimplex};
use crate::triangulation::{validate, Triangulation};

/// `A^{r+1}` modulo `μ_n^r`, embedded as `(η_1, ..., η_r, (η_1⋯η_r)^{-1})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientModel {
    pub r: usize,
    pub n: u64,
}

/// `n^r`.
pub fn group_order(model: QuotientModel) -> Result<u128> {
    (model.n as u128)
        .checked_pow(model.r as u32)
        .ok_or_else(|| {
            Error::InvalidInput(format!("n^r overflows for r={}, n={}", model.r, model.n))
        })
}

/// `[L_n : n·Z^{r+1}]`, the order of the group acting on the root-stack atlas,
/// read off the lattice data of the stacky fan.
pub fn stacky_order(model: QuotientModel) -> Result<BigInt> {
    let d = model.r + 1;
    let ln = Lattice::from(CongruenceLattice::new(d, model.n)?);
    let scaled = Lattice::Basis(IntMatrix::diagonal(&vec![model.n as i64; d]));
    lattice_index(&scaled, &ln)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McKayReport {
    pub r: usize,
    pub n: u64,
    /// Maximal cells of the triangulation (rank of the resolution side).
    pub cells: usize,
    pub group_order: u128,
    pub stacky_order: u128,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Interior rays of the resolution, reported for `r = 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<u64>,
    /// Only the numerical shadow of the equivalence is checked.
    pub shadow: &'static str,
}

impl McKayReport {
    /// One JSON object on a single line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub fn mckay_check(model: QuotientModel, t: &Triangulation) -> Result<McKayReport> {
    if t.r() != model.r || t.n() != model.n {
        return Err(Error::InvalidInput(format!(
            "triangulation of {}Δ^{} does not match the model (r={}, n={})",
            t.n(),
            t.r(),
            model.r,
            model.n
        )));
    }
    let group = group_order(model)?;
    let stacky = stacky_order(model)?
        .to_u128()
        .ok_or_else(|| Error::InvalidInput("stacky order overflows".into()))?;
    let cells = t.cells().len();
    let report = validate(t);
    let reason = if !report.is_valid() {
        Some(format!(
            "invalid triangulation ({} violations)",
            report.violations.len()
        ))
    } else if !(0..cells).all(|c| t.cell_volume(c) == 1) {
        Some("triangulation is not unimodular".to_string())
    } else if cells as u128 != group || group != stacky {
        Some(format!(
            "ranks differ: {cells} cells, group order {group}, stacky order {stacky}"
        ))
    } else {
        None
    };
    Ok(McKayReport {
        r: model.r,
        n: model.n,
        cells,
        group_order: group,
        stacky_order: stacky,
        verdict: reason.is_none(),
        reason,
        chain: (model.r == 1).then(|| exceptional_chain(model.n)),
        shadow: "rank",
    })
}

/// Interior lattice points of `n·Δ^1`, i.e. exceptional curves of the
/// minimal resolution of the `A_{n-1}` singularity.
pub fn exceptional_chain(n: u64) -> u64 {
    let s = DilatedSimplex::new(1, n.max(1)).expect("positive level");
    interior_points(&s).len() as u64
}

#[derive(Clone, Debug, Serialize)]
pub struct AnModel {
    pub singular: Fan,
    pub resolution: Fan,
    pub chain: u64,
    pub resolution_smooth: bool,
    pub resolution_crepant: bool,
    pub singular_smooth: bool,
}

/// `xy = t^n`: the orthant in `L_n` and its resolution by the unique
/// triangulation of `n·Δ^1`.
pub fn an_model(n: u64) -> Result<AnModel> {
    let singular = orthant_fan(1, n)?;
    let t = Triangulation::new(1, n, (0..n as usize).map(|i| vec![i, i + 1]).collect())?;
    let resolution = cone_over_triangulation(&t)?;
    Ok(AnModel {
        resolution_smooth: is_smooth(&resolution)?.smooth,
        resolution_crepant: is_crepant(&resolution, &singular)?,
        singular_smooth: is_smooth(&singular)?.smooth,
        chain: exceptional_chain(n),
        singular,
        resolution,
    })
}
