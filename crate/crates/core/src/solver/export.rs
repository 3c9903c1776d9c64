use super::domain::ReducedDomain;
use super::solve::{GridSolution, Provenance};
use super::trace::NeumannTrace;
use crate::error::Result;
use crate::numfmt::{fmt17, lenient, sig17};
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionMetadata {
    pub domain: ReducedDomain,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub h: f64,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub alpha: f64,
    pub n: usize,
    pub nodes: usize,
    pub axis_nodes: usize,
    pub bandwidth: usize,
    #[serde(serialize_with = "sig17", deserialize_with = "lenient")]
    pub linear_residual: f64,
    pub provenance: Provenance,
}

impl GridSolution {
    pub fn metadata(&self) -> SolutionMetadata {
        SolutionMetadata {
            domain: *self.grid().domain(),
            h: self.h(),
            alpha: self.alpha(),
            n: self.n(),
            nodes: self.grid().len(),
            axis_nodes: self.grid().axis_nodes().count(),
            bandwidth: self.grid().bandwidth(),
            linear_residual: self.residual(),
            provenance: self.provenance(),
        }
    }

    /// Columns `sigma,t,W`, one row per node.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["sigma", "t", "W"])?;
        for (p, v) in self.grid().nodes().iter().zip(self.values()) {
            w.write_record([fmt17(p.sigma), fmt17(p.t), fmt17(*v)])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl NeumannTrace {
    /// Columns `arc_param,q`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["arc_param", "q"])?;
        for s in &self.samples {
            w.write_record([fmt17(s.arc_param), fmt17(s.q)])?;
        }
        w.flush()?;
        Ok(())
    }
}
