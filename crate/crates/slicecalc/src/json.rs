//! JSON wire formats for Clifford numbers, operators, spectra and calculus results.
//!
//! Blade keys list generator numbers in increasing order: digits run together
//! for `n ≤ 9` (`""`, `"1"`, `"12"`) and are comma-separated for `n ≥ 10`
//! (`"1,12"`). Absent keys are zero.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use slicecalc_core::algebra::MAX_GENERATORS;
use slicecalc_core::calculus::CalcResult;
use slicecalc_core::spectrum::{SSpectrum, SpectralSphere};
use slicecalc_core::{CliffordElement, CliffordMatrix, ImaginaryUnit, MultiIndex};

use crate::error::CliError;

pub fn blade_key(index: MultiIndex, n: usize) -> String {
    let parts: Vec<String> = index.indices().map(|j| j.to_string()).collect();
    if n <= 9 {
        parts.concat()
    } else {
        parts.join(",")
    }
}

pub fn parse_blade_key(key: &str, n: usize) -> Result<MultiIndex, CliError> {
    let bad = |why: &str| CliError::Parse(format!("invalid blade key {key:?} for n = {n}: {why}"));
    if n > MAX_GENERATORS {
        return Err(bad("too many generators"));
    }
    if key.is_empty() {
        return Ok(MultiIndex::EMPTY);
    }
    let numbers: Vec<usize> = if n <= 9 {
        key.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| bad("expected digits")))
            .collect::<Result<_, _>>()?
    } else {
        key.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad("expected comma-separated indices")))
            .collect::<Result<_, _>>()?
    };
    if numbers.iter().any(|&j| j == 0 || j > n) {
        return Err(bad("index out of range"));
    }
    if numbers.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("indices must be strictly increasing"));
    }
    MultiIndex::from_indices(&numbers, n).map_err(|e| bad(&e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    pub n: usize,
    pub coeffs: BTreeMap<String, f64>,
}

impl ElementJson {
    pub fn from_element(a: &CliffordElement) -> Self {
        let coeffs = a.terms().map(|(b, x)| (blade_key(b, a.n()), x)).collect();
        ElementJson { n: a.n(), coeffs }
    }

    pub fn to_element(&self) -> Result<CliffordElement, CliError> {
        if self.n > MAX_GENERATORS {
            return Err(CliError::Parse(format!("n = {} exceeds {MAX_GENERATORS}", self.n)));
        }
        let mut out = CliffordElement::zero(self.n);
        for (key, x) in &self.coeffs {
            out.set_coeff(parse_blade_key(key, self.n)?, *x)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub d: usize,
    pub n: usize,
    pub components: BTreeMap<String, Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix(t: &CliffordMatrix) -> Self {
        let components = t
            .components()
            .map(|(b, m)| {
                let rows = m.row_iter().map(|r| r.iter().copied().collect()).collect();
                (blade_key(b, t.n()), rows)
            })
            .collect();
        MatrixJson { d: t.d(), n: t.n(), components }
    }

    pub fn to_matrix(&self) -> Result<CliffordMatrix, CliError> {
        if self.n > MAX_GENERATORS {
            return Err(CliError::Parse(format!("n = {} exceeds {MAX_GENERATORS}", self.n)));
        }
        if self.d == 0 {
            return Err(CliError::Parse("d must be at least 1".into()));
        }
        let d = self.d;
        let mut comps = Vec::with_capacity(self.components.len());
        for (key, rows) in &self.components {
            let blade = parse_blade_key(key, self.n)?;
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(CliError::Parse(format!("component {key:?} is not a {d}x{d} matrix")));
            }
            comps.push((blade, DMatrix::from_fn(d, d, |i, j| rows[i][j])));
        }
        Ok(CliffordMatrix::from_components(d, self.n, comps)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereJson {
    pub u: f64,
    pub v: f64,
    pub mult: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumJson {
    pub spheres: Vec<SphereJson>,
    pub radius: f64,
}

impl SpectrumJson {
    pub fn from_spectrum(s: &SSpectrum) -> Self {
        SpectrumJson {
            spheres: s.spheres.iter().map(|x| SphereJson { u: x.u, v: x.v, mult: x.multiplicity }).collect(),
            radius: s.radius,
        }
    }

    pub fn to_spectrum(&self) -> SSpectrum {
        SSpectrum {
            spheres: self
                .spheres
                .iter()
                .map(|x| SpectralSphere { u: x.u, v: x.v, multiplicity: x.mult })
                .collect(),
            radius: self.radius,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalcResultJson {
    pub value: MatrixJson,
    pub nodes: usize,
    pub richardson_error: f64,
    #[serde(rename = "J")]
    pub unit: Vec<f64>,
}

impl CalcResultJson {
    pub fn from_result(r: &CalcResult) -> Self {
        CalcResultJson {
            value: MatrixJson::from_matrix(&r.value),
            nodes: r.nodes,
            richardson_error: r.richardson_error,
            unit: r.unit.components().to_vec(),
        }
    }

    pub fn to_result(&self) -> Result<CalcResult, CliError> {
        Ok(CalcResult {
            value: self.value.to_matrix()?,
            nodes: self.nodes,
            richardson_error: self.richardson_error,
            unit: ImaginaryUnit::new(self.unit.clone())?,
        })
    }
}
