use std::collections::BTreeMap;
use std::sync::Arc;

use super::{
    composite_cross_section, nuclear_only_cross_section, rutherford_reference, CrossSectionCurve, WavepacketSpec,
};
use crate::error::{Error, Result};
use crate::shifts::PhaseShiftTable;

pub struct CrossSectionInput<'a> {
    pub table: &'a PhaseShiftTable,
    pub wavepacket: WavepacketSpec,
}

pub trait CrossSectionMode: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, input: &CrossSectionInput<'_>, theta: &[f64]) -> Result<CrossSectionCurve>;
}

struct Composite;
struct CoulombOnly;
struct NuclearOnly;
struct Rutherford;

impl CrossSectionMode for Composite {
    fn name(&self) -> &'static str {
        "composite"
    }

    fn evaluate(&self, input: &CrossSectionInput<'_>, theta: &[f64]) -> Result<CrossSectionCurve> {
        composite_cross_section(input.table, input.wavepacket, theta)
    }
}

impl CrossSectionMode for CoulombOnly {
    fn name(&self) -> &'static str {
        "coulomb_only"
    }

    fn evaluate(&self, input: &CrossSectionInput<'_>, theta: &[f64]) -> Result<CrossSectionCurve> {
        let mut curve = composite_cross_section(&input.table.without_nuclear(), input.wavepacket, theta)?;
        curve.mode = self.name().to_string();
        Ok(curve)
    }
}

impl CrossSectionMode for NuclearOnly {
    fn name(&self) -> &'static str {
        "nuclear_only"
    }

    fn evaluate(&self, input: &CrossSectionInput<'_>, theta: &[f64]) -> Result<CrossSectionCurve> {
        let shifts = input
            .table
            .records
            .iter()
            .map(|r| {
                r.exact.ok_or_else(|| {
                    Error::InvalidInput("nuclear_only needs exact short-range shifts (step potential)".into())
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        nuclear_only_cross_section(&shifts, input.table.params.p, theta)
    }
}

impl CrossSectionMode for Rutherford {
    fn name(&self) -> &'static str {
        "rutherford"
    }

    fn evaluate(&self, input: &CrossSectionInput<'_>, theta: &[f64]) -> Result<CrossSectionCurve> {
        rutherford_reference(input.table.params.p, input.table.params.eta_coulomb, theta)
    }
}

/// Cross-section modes selectable by name.
#[derive(Clone)]
pub struct ModeRegistry {
    modes: BTreeMap<&'static str, Arc<dyn CrossSectionMode>>,
}

impl Default for ModeRegistry {
    fn default() -> Self {
        let mut reg = Self { modes: BTreeMap::new() };
        reg.register(Arc::new(Composite));
        reg.register(Arc::new(CoulombOnly));
        reg.register(Arc::new(NuclearOnly));
        reg.register(Arc::new(Rutherford));
        reg
    }
}

impl ModeRegistry {
    pub fn register(&mut self, mode: Arc<dyn CrossSectionMode>) {
        self.modes.insert(mode.name(), mode);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.modes.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn CrossSectionMode>> {
        self.modes.get(name).cloned().ok_or_else(|| Error::UnknownStrategy {
            kind: "cross-section mode",
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }
}
