//! Separation constants fitted once on pilot settings and pinned in a fixture.

use serde::{Deserialize, Serialize};

use super::pilot::Pilot;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinnedConstant {
    pub constant: f64,
    /// Power measured at `constant` during the pilot.
    pub power: f64,
    pub pilot: Pilot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinnedConstants {
    pub version: u32,
    pub continuous: PinnedConstant,
    pub discrete: PinnedConstant,
    pub adaptive: PinnedConstant,
}

pub const FIXTURE: &str = include_str!("../../fixtures/constants.json");

impl PinnedConstants {
    pub fn pinned() -> Result<Self> {
        Ok(serde_json::from_str(FIXTURE)?)
    }
}
