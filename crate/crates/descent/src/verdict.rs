//! Selmer dimension bounds and depth-2 finiteness verdicts.

use serde::{Deserialize, Serialize};

use crate::curve_model::RwpCase;
use crate::error::{DescentError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Finite,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Finite => "FINITE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundPath {
    Crude,
    Refined,
}

/// Upper bound on dim H¹_f(Q, ∧²V₂J) from the global kernel alone.
pub fn crude_bound(dim_a: usize, g: usize, case: RwpCase) -> i64 {
    let d = dim_a as i64;
    match case {
        RwpCase::OneRwp => d,
        RwpCase::NoRwp => (d - g as i64).max(0),
    }
}

/// Upper bound from dim Ker θ_dR.
pub fn refined_bound(ker_theta: usize, g: usize, case: RwpCase) -> i64 {
    let k = ker_theta as i64;
    match case {
        RwpCase::OneRwp => (k - 2).max(0),
        RwpCase::NoRwp => (k - g as i64 - 1).max(0),
    }
}

/// (3g² + g − 2)/2 − r.
pub fn crude_threshold(g: usize, rank: i64) -> i64 {
    let g = g as i64;
    (3 * g * g + g - 2) / 2 - rank
}

/// Bound on dim Ker θ_dR below which the depth-2 set is finite.
pub fn refined_threshold(g: usize, case: RwpCase, rank: i64) -> i64 {
    let g = g as i64;
    match case {
        RwpCase::OneRwp => (3 * g * g + g + 2) / 2 - rank,
        RwpCase::NoRwp => 3 * g * (g + 1) / 2 - rank,
    }
}

/// FINITE iff the value is strictly below the threshold for `path` at `rank`.
/// `value` is dim A on the crude path and dim Ker θ_dR on the refined path.
pub fn finiteness_verdict(value: usize, g: usize, rank: i64, case: RwpCase, path: BoundPath) -> Verdict {
    let finite = match path {
        BoundPath::Crude => crude_bound(value, g, case) < crude_threshold(g, rank),
        BoundPath::Refined => (value as i64) < refined_threshold(g, case, rank),
    };
    if finite {
        Verdict::Finite
    } else {
        Verdict::Inconclusive
    }
}

/// (g² + g − 2)/2 − ρ + 1, the dimension predicted by the Bloch-Kato conjectures.
pub fn conditional_bk_dim(g: usize, ns_rank: i64) -> i64 {
    let g = g as i64;
    (g * g + g - 2) / 2 - ns_rank + 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub label: Option<String>,
    pub genus: usize,
    pub case: RwpCase,
    pub path: BoundPath,
    #[serde(rename = "dim_A")]
    pub dim_a: usize,
    pub ker_theta_dr: Option<usize>,
    pub crude_bound: i64,
    pub refined_bound: Option<i64>,
    pub threshold_crude: i64,
    pub threshold_refined: i64,
    pub rank_lower: i64,
    pub rank_upper: i64,
    pub verdict: Verdict,
    pub verdict_at_rank_lower: Verdict,
    pub conditional_bk_dim: Option<i64>,
    pub expected_gap_note: usize,
}

pub struct ReportInput {
    pub label: Option<String>,
    pub genus: usize,
    pub case: RwpCase,
    pub dim_a: usize,
    /// None selects the crude path.
    pub ker_theta: Option<usize>,
    pub rank_lower: Option<i64>,
    pub rank_upper: Option<i64>,
    pub ns_rank: Option<i64>,
}

pub fn bounds_report(input: ReportInput) -> Result<BoundsReport> {
    let rank_upper = input.rank_upper.ok_or(DescentError::MissingRank)?;
    let rank_lower = input.rank_lower.unwrap_or(rank_upper);
    let g = input.genus;
    let (path, value) = match input.ker_theta {
        Some(k) => (BoundPath::Refined, k),
        None => (BoundPath::Crude, input.dim_a),
    };
    Ok(BoundsReport {
        label: input.label,
        genus: g,
        case: input.case,
        path,
        dim_a: input.dim_a,
        ker_theta_dr: input.ker_theta,
        crude_bound: crude_bound(input.dim_a, g, input.case),
        refined_bound: input.ker_theta.map(|k| refined_bound(k, g, input.case)),
        threshold_crude: crude_threshold(g, rank_upper),
        threshold_refined: refined_threshold(g, input.case, rank_upper),
        rank_lower,
        rank_upper,
        verdict: finiteness_verdict(value, g, rank_upper, input.case, path),
        verdict_at_rank_lower: finiteness_verdict(value, g, rank_lower, input.case, path),
        conditional_bk_dim: input.ns_rank.map(|r| conditional_bk_dim(g, r)),
        expected_gap_note: g - 1,
    })
}

impl BoundsReport {
    pub const TSV_HEADER: &'static str = "label\tg\tcase\tdim_A\tker_theta\tverdict";

    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.label.as_deref().unwrap_or("-"),
            self.genus,
            self.case.as_str(),
            self.dim_a,
            self.ker_theta_dr.map_or("-".to_string(), |k| k.to_string()),
            self.verdict.as_str()
        )
    }
}
