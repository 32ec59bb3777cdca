//! One-shot verification of a weight system: structure, localization and,
//! when `C1` is known, Hattori's Laurent conditions.

use serde::Serialize;

use crate::error::Result;
use crate::hattori::{derive_levels, r_sequence, LevelData};
use crate::localization::{chern_battery, ChernReport};
use crate::model::{weight_system_checks, StructuralReport, WeightSystem};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HattoriSummary {
    pub levels: LevelData,
    pub r_values_at_1: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub structural: StructuralReport,
    pub localization: ChernReport,
    /// Present for minimal profiles with a positive integer `C1`.
    pub hattori: Option<HattoriSummary>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("plain data serializes");
        v["localization"] = self.localization.to_json();
        v
    }
}

pub fn verify(ws: &WeightSystem) -> Result<VerifyReport> {
    let structural = weight_system_checks(ws);
    let localization = chern_battery(ws)?;
    let mut hattori_ok = true;
    let hattori = match localization.c1 {
        Some(c1) => match derive_levels(ws, c1) {
            Some(levels) => match r_sequence(ws, &levels) {
                Ok(rs) => Some(HattoriSummary { levels, r_values_at_1: rs.iter().map(|r| r.at_one().to_string()).collect() }),
                Err(_) => {
                    hattori_ok = false;
                    None
                }
            },
            None => {
                hattori_ok = false;
                None
            }
        },
        None => None,
    };
    let passed = structural.passed() && localization.passed() && hattori_ok;
    Ok(VerifyReport { structural, localization, hattori, passed })
}
