//! Chip profiles: the JSON document describing a crossbar under test and
//! the deterministic construction of a fixture from it.
//!
//! A profile names a default cell profile (`stable` or `unstable`), a
//! master seed, and optional per-cell overrides. Device-to-device spread
//! comes from per-cell lognormal parameter draws around the profile means;
//! every draw comes from a stream derived from (seed, cell index), so a
//! profile plus a seed pins the full behavior of the chip.

use crate::cell::{Cell, CellParams, TransistorModel};
use crate::frontend::{CrossbarFixture, COLS, GAIN_ERROR_BOUND, ROWS};
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 42;

/// Lognormal spread (sigma of ln) used for device-to-device draws.
const D2D_SIGMA_VOLTAGE: f64 = 0.03;
const D2D_SIGMA_CONDUCTANCE: f64 = 0.05;
const D2D_SIGMA_ALPHA: f64 = 0.10;
const D2D_SIGMA_DISTURB: f64 = 0.15;
const D2D_SIGMA_ENDURANCE: f64 = 0.20;
/// Endurance draws are clamped to this range of cycles.
const N_CMAX_RANGE: (u64, u64) = (1, 1_000_000_000);

#[derive(Debug, thiserror::Error)]
pub enum ProfileError {
    #[error("profile JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid profile: {0}")]
    Invalid(String),
    #[error("cell parameters: {0}")]
    Params(#[from] crate::cell::ParamError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    #[default]
    Stable,
    Unstable,
}

/// Profile means, plain `f64`. Converted into `CellParams<T>` per cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileMeans {
    pub v_form_th: f64,
    pub v_set_th: f64,
    pub v_reset_th: f64,
    pub g_max: f64,
    pub g_min: f64,
    pub alpha_set: f64,
    pub alpha_reset: f64,
    pub sigma_program: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub disturb_set: f64,
    pub disturb_reset: f64,
    pub disturb_jump: f64,
    pub n_cmax: u64,
    pub kappa: f64,
    pub transistor_v_th: f64,
    pub transistor_g_m: f64,
}

impl ProfileMeans {
    /// Cells that keep a stable high state: weak read disturb, long
    /// endurance, floor drift capped below the reset target.
    pub fn stable() -> Self {
        ProfileMeans {
            v_form_th: 1.6,
            v_set_th: 0.6,
            v_reset_th: 0.6,
            g_max: 500e-6,
            g_min: 5e-6,
            alpha_set: 3e5,
            alpha_reset: 3e5,
            sigma_program: 0.01,
            sigma0: 0.01,
            sigma1: 0.05,
            disturb_set: 750.0,
            disturb_reset: 40.0,
            disturb_jump: 0.05,
            n_cmax: 10_000,
            kappa: 0.03,
            transistor_v_th: 0.6,
            // 100 µA of compliance at a 1.5 V gate.
            transistor_g_m: 100e-6 / 0.9,
        }
    }

    /// Cells whose high state collapses under set-polarity reads and whose
    /// floor drift makes the reset target unreachable around 100 cycles.
    pub fn unstable() -> Self {
        ProfileMeans {
            disturb_set: 4e4,
            disturb_reset: 100.0,
            disturb_jump: 0.5,
            n_cmax: 100,
            kappa: 0.042,
            ..Self::stable()
        }
    }

    pub fn named(name: ProfileName) -> Self {
        match name {
            ProfileName::Stable => Self::stable(),
            ProfileName::Unstable => Self::unstable(),
        }
    }

    pub fn params<T: Real>(&self) -> CellParams<T> {
        CellParams {
            v_form_th: T::of(self.v_form_th),
            v_set_th: T::of(self.v_set_th),
            v_reset_th: T::of(self.v_reset_th),
            g_max: T::of(self.g_max),
            g_min: T::of(self.g_min),
            alpha_set: T::of(self.alpha_set),
            alpha_reset: T::of(self.alpha_reset),
            sigma_program: T::of(self.sigma_program),
            sigma0: T::of(self.sigma0),
            sigma1: T::of(self.sigma1),
            disturb_set: T::of(self.disturb_set),
            disturb_reset: T::of(self.disturb_reset),
            disturb_jump: T::of(self.disturb_jump),
            n_cmax: self.n_cmax,
            kappa: T::of(self.kappa),
            transistor: TransistorModel {
                v_th: T::of(self.transistor_v_th),
                g_m: T::of(self.transistor_g_m),
            },
        }
    }
}

/// Per-cell override. Unset fields fall back to the (possibly drawn)
/// profile values; set fields are pinned exactly.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CellOverride {
    pub sl: u8,
    pub bl: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileName>,
    /// Disable device-to-device draws for this cell.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2d: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_form_th: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_set_th: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_reset_th: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_set: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_reset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_program: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturb_set: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturb_reset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disturb_jump: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cmax: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

fn default_rows() -> usize {
    ROWS
}

fn default_cols() -> usize {
    COLS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_d2d() -> bool {
    true
}

/// The chip-under-test description loaded from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChipProfile {
    #[serde(default = "default_rows")]
    pub rows: usize,
    #[serde(default = "default_cols")]
    pub cols: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub default_profile: ProfileName,
    /// Master switch for device-to-device parameter draws.
    #[serde(default = "default_d2d")]
    pub d2d: bool,
    #[serde(default)]
    pub overrides: Vec<CellOverride>,
}

impl Default for ChipProfile {
    fn default() -> Self {
        ChipProfile {
            rows: ROWS,
            cols: COLS,
            seed: DEFAULT_SEED,
            default_profile: ProfileName::Stable,
            d2d: true,
            overrides: Vec::new(),
        }
    }
}

impl ChipProfile {
    pub fn from_json(text: &str) -> Result<Self, ProfileError> {
        let profile: ChipProfile = serde_json::from_str(text)?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        if self.rows != ROWS || self.cols != COLS {
            return Err(ProfileError::Invalid(format!(
                "fixture is {ROWS}x{COLS}, profile says {}x{}",
                self.rows, self.cols
            )));
        }
        for o in &self.overrides {
            if o.sl as usize >= ROWS || o.bl as usize >= COLS {
                return Err(ProfileError::Invalid(format!(
                    "override address ({}, {}) out of range",
                    o.sl, o.bl
                )));
            }
        }
        Ok(())
    }

    fn override_for(&self, sl: usize, bl: usize) -> Option<&CellOverride> {
        self.overrides
            .iter()
            .find(|o| o.sl as usize == sl && o.bl as usize == bl)
    }

    /// Build the fixture. `seed_override` (e.g. a CLI flag) wins over the
    /// profile's seed.
    pub fn build_fixture<T: Real>(
        &self,
        seed_override: Option<u64>,
    ) -> Result<CrossbarFixture<T>, ProfileError> {
        self.validate()?;
        let seed = seed_override.unwrap_or(self.seed);

        // Stream 0 carries fixture-level draws; stream 1 + index carries
        // cell parameter draws and then stays with the cell for life.
        let mut fixture_rng = ChaCha8Rng::seed_from_u64(seed);
        fixture_rng.set_stream(0);
        let gain_error = T::of((fixture_rng.gen::<f64>() * 2.0 - 1.0) * GAIN_ERROR_BOUND);

        let mut cells = Vec::with_capacity(ROWS * COLS);
        for sl in 0..ROWS {
            for bl in 0..COLS {
                let idx = (sl * COLS + bl) as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(1 + idx);
                let ov = self.override_for(sl, bl);
                let name = ov.and_then(|o| o.profile).unwrap_or(self.default_profile);
                let mut means = ProfileMeans::named(name);
                let draw = ov.and_then(|o| o.d2d).unwrap_or(self.d2d);
                if draw {
                    draw_d2d(&mut means, &mut rng);
                }
                if let Some(o) = ov {
                    apply_override(&mut means, o);
                }
                let params: CellParams<T> = means.params();
                cells.push(Cell::with_rng(params, rng)?);
            }
        }
        CrossbarFixture::from_cells(cells, gain_error)
            .map_err(|e| ProfileError::Invalid(e.to_string()))
    }
}

fn lognormal(rng: &mut ChaCha8Rng, mean: f64, sigma: f64) -> f64 {
    let z: f64 = f64::standard_normal(rng);
    mean * (sigma * z).exp()
}

/// Device-to-device draws in a fixed order; the order is part of the
/// determinism contract.
fn draw_d2d(means: &mut ProfileMeans, rng: &mut ChaCha8Rng) {
    means.v_form_th = lognormal(rng, means.v_form_th, D2D_SIGMA_VOLTAGE);
    means.v_set_th = lognormal(rng, means.v_set_th, D2D_SIGMA_VOLTAGE);
    means.v_reset_th = lognormal(rng, means.v_reset_th, D2D_SIGMA_VOLTAGE);
    means.g_max = lognormal(rng, means.g_max, D2D_SIGMA_CONDUCTANCE);
    means.g_min = lognormal(rng, means.g_min, D2D_SIGMA_CONDUCTANCE).min(means.g_max / 4.0);
    means.alpha_set = lognormal(rng, means.alpha_set, D2D_SIGMA_ALPHA);
    means.alpha_reset = lognormal(rng, means.alpha_reset, D2D_SIGMA_ALPHA);
    means.disturb_set = lognormal(rng, means.disturb_set, D2D_SIGMA_DISTURB);
    means.disturb_reset = lognormal(rng, means.disturb_reset, D2D_SIGMA_DISTURB);
    let n = lognormal(rng, means.n_cmax as f64, D2D_SIGMA_ENDURANCE).round() as u64;
    means.n_cmax = n.clamp(N_CMAX_RANGE.0, N_CMAX_RANGE.1);
}

fn apply_override(means: &mut ProfileMeans, o: &CellOverride) {
    if let Some(v) = o.v_form_th {
        means.v_form_th = v;
    }
    if let Some(v) = o.v_set_th {
        means.v_set_th = v;
    }
    if let Some(v) = o.v_reset_th {
        means.v_reset_th = v;
    }
    if let Some(v) = o.g_max {
        means.g_max = v;
    }
    if let Some(v) = o.g_min {
        means.g_min = v;
    }
    if let Some(v) = o.alpha_set {
        means.alpha_set = v;
    }
    if let Some(v) = o.alpha_reset {
        means.alpha_reset = v;
    }
    if let Some(v) = o.sigma_program {
        means.sigma_program = v;
    }
    if let Some(v) = o.sigma0 {
        means.sigma0 = v;
    }
    if let Some(v) = o.sigma1 {
        means.sigma1 = v;
    }
    if let Some(v) = o.disturb_set {
        means.disturb_set = v;
    }
    if let Some(v) = o.disturb_reset {
        means.disturb_reset = v;
    }
    if let Some(v) = o.disturb_jump {
        means.disturb_jump = v;
    }
    if let Some(v) = o.n_cmax {
        means.n_cmax = v;
    }
    if let Some(v) = o.kappa {
        means.kappa = v;
    }
}
