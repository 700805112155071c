//! Distribution files.
//!
//! A law is stored as one JSON object tagged by `kind`:
//!
//! ```json
//! {"kind":"grid","x0":-4.0,"h":0.01,"values":[...]}
//! {"kind":"atoms","atoms":[[-1.0,0.5],[1.0,0.5]]}
//! {"kind":"mixed","weight":0.7,"grid":{"x0":-4.0,"h":0.01,"values":[...]},"atoms":[[0.0,0.3]]}
//! {"kind":"gauss_mixture","components":[[0.5,-1.0,0.5],[0.5,1.0,0.5]]}
//! ```
//!
//! `gauss_mixture` takes an optional `"h"` for the sampling step. Floats are
//! written in shortest round-trip form, so a law written by [`to_json`] parses
//! back to the identical in-memory value.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use infodist_core::{Atom, GridDensity, MixedDistribution};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub x0: f64,
    pub h: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionFile {
    Grid {
        x0: f64,
        h: f64,
        values: Vec<f64>,
    },
    Atoms {
        atoms: Vec<[f64; 2]>,
    },
    Mixed {
        weight: f64,
        grid: GridFile,
        #[serde(default)]
        atoms: Vec<[f64; 2]>,
    },
    GaussMixture {
        components: Vec<[f64; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h: Option<f64>,
    },
}

fn atoms_of(pairs: &[[f64; 2]]) -> Result<Vec<Atom>> {
    pairs
        .iter()
        .map(|&[loc, mass]| Atom::new(loc, mass).map_err(Into::into))
        .collect()
}

impl DistributionFile {
    pub fn to_distribution(&self) -> Result<MixedDistribution> {
        let m = match self {
            DistributionFile::Grid { x0, h, values } => {
                MixedDistribution::continuous(GridDensity::new(*x0, *h, values.clone())?)?
            }
            DistributionFile::Atoms { atoms } => MixedDistribution::discrete(atoms_of(atoms)?)?,
            DistributionFile::Mixed { weight, grid, atoms } => MixedDistribution::new(
                Some((*weight, GridDensity::new(grid.x0, grid.h, grid.values.clone())?)),
                atoms_of(atoms)?,
            )?,
            DistributionFile::GaussMixture { components, h } => {
                let c: Vec<(f64, f64, f64)> = components.iter().map(|&[w, m, s]| (w, m, s)).collect();
                MixedDistribution::gauss_mixture(&c, *h)?
            }
        };
        Ok(m)
    }

    /// The most specific kind describing `m`.
    pub fn from_distribution(m: &MixedDistribution) -> Self {
        let atoms: Vec<[f64; 2]> = m.atoms().iter().map(|a| [a.location, a.mass]).collect();
        match m.ac() {
            None => DistributionFile::Atoms { atoms },
            Some((_, d)) if atoms.is_empty() => DistributionFile::Grid {
                x0: d.x0(),
                h: d.h(),
                values: d.values().to_vec(),
            },
            Some((weight, d)) => DistributionFile::Mixed {
                weight,
                grid: GridFile {
                    x0: d.x0(),
                    h: d.h(),
                    values: d.values().to_vec(),
                },
                atoms,
            },
        }
    }
}

pub fn parse_distribution(text: &str) -> Result<MixedDistribution> {
    let file: DistributionFile = serde_json::from_str(text).context("malformed distribution JSON")?;
    file.to_distribution()
}

pub fn read_distribution(path: &Path) -> Result<MixedDistribution> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_distribution(&text).with_context(|| format!("in {}", path.display()))
}

pub fn to_json(m: &MixedDistribution) -> String {
    serde_json::to_string(&DistributionFile::from_distribution(m)).expect("distribution serializes")
}
