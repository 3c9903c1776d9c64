use crate::error::{Error, Result};
use crate::numfmt::{lenient, lenient_opt, lenient_vec, sig17, sig17_opt, sig17_vec};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    /// `|D_H ρ| = |x|/ρ`.
    Dhrho,
    /// The four closed forms for the derivatives of `F_α`.
    DerfaAll,
    /// `Δ_H u_α = (Q+α−2)F_α`.
    UalphaPde,
    /// `Δ_H ρ^{2−Q} = 0`.
    FundamentalSolution,
    /// `Z F_α = (α−2)F_α` and `Z ρ = ρ`.
    ZHomogeneity,
    Magik,
    Magikuno,
    Tordue,
    Cyln,
    TraceFormula,
    MatrixDeficit,
}

pub const ALL_IDENTITIES: [IdentityId; 11] = [
    IdentityId::Dhrho,
    IdentityId::DerfaAll,
    IdentityId::UalphaPde,
    IdentityId::FundamentalSolution,
    IdentityId::ZHomogeneity,
    IdentityId::Magik,
    IdentityId::Magikuno,
    IdentityId::Tordue,
    IdentityId::Cyln,
    IdentityId::TraceFormula,
    IdentityId::MatrixDeficit,
];

impl IdentityId {
    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::Dhrho => "dhrho",
            IdentityId::DerfaAll => "derfa_all",
            IdentityId::UalphaPde => "ualpha_pde",
            IdentityId::FundamentalSolution => "fundamental_solution",
            IdentityId::ZHomogeneity => "z_homogeneity",
            IdentityId::Magik => "magik",
            IdentityId::Magikuno => "magikuno",
            IdentityId::Tordue => "tordue",
            IdentityId::Cyln => "cyln",
            IdentityId::TraceFormula => "trace_formula",
            IdentityId::MatrixDeficit => "matrix_deficit",
        }
    }

    /// Whether `alpha` enters the identity at all.
    pub fn uses_alpha(self) -> bool {
        !matches!(self, IdentityId::Dhrho | IdentityId::FundamentalSolution)
    }

    pub fn accepts(self, n: usize) -> bool {
        let in_range = (1..=4).contains(&n);
        in_range
            && match self {
                IdentityId::Magik => n >= 2,
                IdentityId::Magikuno => n == 1,
                IdentityId::Tordue => n == 2,
                _ => true,
            }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            IdentityId::Dhrho => 1e-13,
            IdentityId::DerfaAll
            | IdentityId::UalphaPde
            | IdentityId::FundamentalSolution
            | IdentityId::ZHomogeneity => 1e-10,
            IdentityId::Magik | IdentityId::Magikuno | IdentityId::Tordue | IdentityId::Cyln => 1e-9,
            IdentityId::TraceFormula => 1e-11,
            IdentityId::MatrixDeficit => 1e-12,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_IDENTITIES
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown identity {s:?}")))
    }
}

/// A sample point: `group` coordinates are `(x_1, …, x_{2n}, t)`, `reduced`
/// ones are `(s_1, …, s_n, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub kind: String,
    pub index: u64,
    #[serde(serialize_with = "sig17_vec", deserialize_with = "lenient_vec")]
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub n: usize,
    #[serde(serialize_with = "sig17_opt", deserialize_with = "lenient_opt")]
    pub alpha: Option<f64>,
    pub num_points: usize,
    pub seed: u64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub max_rel_err: f64,
    pub argmax_point: Option<PointRecord>,
    pub pass: bool,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub reports: Vec<IdentityReport>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Parses a report and re-checks `pass` against the recorded errors.
    pub fn from_json(text: &str) -> Result<SuiteReport> {
        let report: SuiteReport = serde_json::from_str(text)?;
        for r in &report.reports {
            if r.pass != (r.max_rel_err <= r.tolerance) {
                return Err(Error::invalid(format!(
                    "report for {} claims pass = {} with error {} and tolerance {}",
                    r.identity_id, r.pass, r.max_rel_err, r.tolerance
                )));
            }
        }
        if report.pass != report.reports.iter().all(|r| r.pass) {
            return Err(Error::invalid("suite pass flag disagrees with its reports"));
        }
        Ok(report)
    }
}
