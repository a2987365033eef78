//! Run configuration: one JSON document, overridden by flags, resolved to
//! concrete values before any work starts.

use std::path::Path;

use mpgabor_core::weyl::WeylSymbol;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorSpec {
    Identity,
    FreeParticle { t: f64 },
    /// Row-major `2d × 2d` literal.
    Matrix { rows: Vec<Vec<f64>> },
    Random { seed: u64, sigma_max: f64 },
    /// `aʷμ(S)` with `S` given by `inner`.
    Generalized { symbol: WeylSymbol, inner: Box<OperatorSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SignalSpec {
    Gaussian,
    /// Hermite function of order `k` along the first axis.
    Hermite { k: usize },
    /// `π(x, ξ)` applied to the Gaussian.
    Packet { x: Vec<f64>, xi: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `S_t` over the configured times.
    FreeParticle,
    /// Random matrices from the configured seeds.
    Random,
    /// Both of the above.
    Declared,
}

/// Target lattice of `gabor`: `w` runs over `±half_count` steps around `Sz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseGridSpec {
    pub step: f64,
    pub half_count: usize,
    /// Source points `z`, `2d` coordinates each; empty means the origin and
    /// the unit vectors.
    pub sources: Vec<f64>,
}

impl Default for PhaseGridSpec {
    fn default() -> Self {
        PhaseGridSpec { step: 0.25, half_count: 8, sources: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvelopeSettings {
    pub family: Family,
    pub ts: Vec<f64>,
    pub seeds: Vec<u64>,
    pub sigma_max: f64,
    pub step: f64,
    pub reach: f64,
    pub margin: f64,
    pub refined_limit: f64,
    pub naive_floor: f64,
    pub bucket_width: f64,
    /// Decay order of the optional algebraic-window proxy.
    pub algebraic_s: Option<f64>,
}

impl Default for EnvelopeSettings {
    fn default() -> Self {
        EnvelopeSettings {
            family: Family::Declared,
            ts: vec![0.0, 1.0, 2.0, 4.0, 8.0],
            seeds: (0..10).collect(),
            sigma_max: 8.0,
            step: 0.25,
            reach: 3.0,
            margin: 3.0,
            refined_limit: 100.0,
            naive_floor: 1000.0,
            bucket_width: 0.5,
            algebraic_s: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionSettings {
    pub ts: Vec<f64>,
    pub n: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub sources: Vec<f64>,
    pub x_step: f64,
    pub xi_step: f64,
    pub half_count: usize,
    pub target: f64,
    pub slope_tol: f64,
}

impl Default for DispersionSettings {
    fn default() -> Self {
        DispersionSettings {
            ts: (0..7).map(|k| f64::from(1 << k)).collect(),
            n: 8192,
            half_width: 512.0,
            // S_t maps both onto the lattice
            sources: vec![0.0, 0.0, 0.0, 0.0625],
            x_step: 0.125,
            xi_step: 0.015625,
            half_count: 8,
            target: -0.5,
            slope_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaSettings {
    pub s: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub sigma: Vec<f64>,
    pub v: Vec<f64>,
    pub planar_sigma: Vec<f64>,
    pub planar_radii: Vec<f64>,
}

impl Default for LemmaSettings {
    fn default() -> Self {
        let line = mpgabor_core::verify::lemmas::LineGrid::default();
        let planar = mpgabor_core::verify::lemmas::PlanarGrid::default();
        LemmaSettings {
            s: vec![1.5, 2.0, 3.0],
            a: line.a,
            b: line.b,
            sigma: line.sigma,
            v: line.v,
            planar_sigma: planar.sigma,
            planar_radii: planar.radii,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConeSettings {
    pub ts: Vec<f64>,
    /// Half opening angles in degrees.
    pub outer_half_angle: f64,
    pub inner_half_angle: f64,
    pub r: f64,
    /// Required angular gap in radians.
    pub margin: f64,
    pub bound: f64,
    pub n: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
}

impl Default for ConeSettings {
    fn default() -> Self {
        ConeSettings {
            ts: vec![1.0, 2.0, 4.0],
            outer_half_angle: 30.0,
            inner_half_angle: 15.0,
            r: 1.0,
            margin: 0.01,
            bound: 1.0,
            n: 512,
            half_width: 32.0,
        }
    }
}

/// A Lebesgue exponent; `∞` is written as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() { s.serialize_str("inf") } else { s.serialize_f64(self.0) }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(Exponent(p)),
            Raw::Text(t) if t == "inf" => Ok(Exponent(f64::INFINITY)),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("unknown exponent {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormSettings {
    pub ts: Vec<f64>,
    pub p: Vec<Exponent>,
    pub bound: f64,
    pub n: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
}

impl Default for NormSettings {
    fn default() -> Self {
        NormSettings { ts: vec![1.0, 2.0, 4.0, 8.0], p: vec![Exponent(1.0), Exponent(2.0), Exponent(f64::INFINITY)], bound: 1.0, n: 1024, half_width: 64.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoxSettings {
    pub ts: Vec<f64>,
    pub threshold: f64,
}

impl Default for BoxSettings {
    fn default() -> Self {
        BoxSettings { ts: vec![0.0, 1.0, 2.0, 4.0], threshold: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    pub envelope: EnvelopeSettings,
    pub dispersion: DispersionSettings,
    pub lemmas: LemmaSettings,
    pub cone: ConeSettings,
    pub norms: NormSettings,
    #[serde(rename = "box")]
    pub boxed: BoxSettings,
}

/// Everything a run depends on. Grid fields left out are filled per
/// command; the resolved document is echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub d: usize,
    pub n: Option<usize>,
    #[serde(rename = "L")]
    pub half_width: Option<f64>,
    pub operator: OperatorSpec,
    pub input: SignalSpec,
    pub windows: (String, String),
    pub phase_grid: PhaseGridSpec,
    /// Decay order `N` of the envelope weight.
    #[serde(rename = "N")]
    pub n_order: f64,
    pub seed: u64,
    pub tol: f64,
    pub out: String,
    pub verify: VerifySettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            d: 1,
            n: None,
            half_width: None,
            operator: OperatorSpec::Identity,
            input: SignalSpec::Gaussian,
            windows: (String::from("gaussian"), String::from("gaussian")),
            phase_grid: PhaseGridSpec::default(),
            n_order: 4.0,
            seed: 0,
            tol: 1e-9,
            out: String::from("out"),
            verify: VerifySettings::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::validation(format!("bad config {}: {e}", path.display())))
    }

    /// Default grid for signal-level commands.
    pub fn default_grid(d: usize) -> (usize, f64) {
        if d == 1 { (512, 8.0) } else { (128, 6.0) }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(1..=3).contains(&self.d) {
            return Err(CliError::validation("d must be 1, 2 or 3"));
        }
        if !(self.tol > 0.0) {
            return Err(CliError::validation("tol must be positive"));
        }
        if self.windows.0 != "gaussian" || self.windows.1 != "gaussian" {
            return Err(CliError::validation("only gaussian windows are available"));
        }
        if !(self.n_order >= 0.0) {
            return Err(CliError::validation("N must be nonnegative"));
        }
        Ok(())
    }

    /// Pretty JSON with a trailing newline; the hashed form.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.to_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
