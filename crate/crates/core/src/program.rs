//! Forming, set and reset algorithms driven through the front end.
//!
//! The workhorse is the incremental step pulse program-and-verify loop:
//! pulses of increasing amplitude, each followed by a verify read, stopping
//! as soon as the target current is met. Two simpler baselines exist for
//! forming: a single pulse, and an unconditional ramp with one verify at
//! the end.
//!
//! Ramp parameters are carried in the same integer units as the wire
//! protocol (mV, µs, nA), so pulse amplitudes and counts are exact.

use crate::frontend::{CrossbarFixture, FrontendError};
use crate::scalar::Real;

/// Verify read amplitude used by all programming verifies, mV.
pub const V_VERIFY_MV: u16 = 200;

/// A ramp longer than this cannot be reported on the wire.
pub const MAX_RAMP_PULSES: u32 = 255;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProgramMode {
    Form,
    Set,
    Reset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProgramStatus {
    Ok,
    TargetNotReached,
    CellBroken,
}

/// Ramp configuration. Defaults below mirror the instrument's stock
/// set/reset/form recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IspvaParams {
    pub mode: ProgramMode,
    pub v_start_mv: u16,
    pub v_step_mv: u16,
    pub v_stop_mv: u16,
    pub t_pulse_us: u32,
    /// Gate voltage during programming pulses.
    pub v_gate_mv: u16,
    /// Gate voltage during verify reads.
    pub v_gate_read_mv: u16,
    /// Verify read amplitude.
    pub v_verify_mv: u16,
    /// Verify target: lower bound for FORM/SET, upper bound for RESET.
    pub i_target_na: u32,
}

impl IspvaParams {
    pub fn set_defaults() -> Self {
        IspvaParams {
            mode: ProgramMode::Set,
            v_start_mv: 500,
            v_step_mv: 100,
            v_stop_mv: 2000,
            t_pulse_us: 10,
            v_gate_mv: 1500,
            v_gate_read_mv: 1500,
            v_verify_mv: V_VERIFY_MV,
            i_target_na: 80_000,
        }
    }

    pub fn reset_defaults() -> Self {
        IspvaParams {
            mode: ProgramMode::Reset,
            v_gate_mv: 2700,
            i_target_na: 5_000,
            ..Self::set_defaults()
        }
    }

    pub fn form_defaults() -> Self {
        IspvaParams {
            mode: ProgramMode::Form,
            v_start_mv: 2000,
            v_step_mv: 100,
            v_stop_mv: 3200,
            v_gate_mv: 1800,
            ..Self::set_defaults()
        }
    }

    pub fn validate(&self) -> Result<(), ProgramError> {
        if self.v_step_mv == 0 {
            return Err(ProgramError::Invalid("v_step must be positive"));
        }
        if self.v_start_mv > self.v_stop_mv {
            return Err(ProgramError::Invalid("v_start must not exceed v_stop"));
        }
        if self.t_pulse_us == 0 {
            return Err(ProgramError::Invalid("t_pulse must be positive"));
        }
        if self.i_target_na == 0 {
            return Err(ProgramError::Invalid("i_target must be positive"));
        }
        if self.v_stop_mv > 5000 || self.v_gate_mv > 5000 || self.v_gate_read_mv > 5000 {
            return Err(ProgramError::Invalid("voltage exceeds the 5 V full scale"));
        }
        if self.v_verify_mv == 0 || self.v_verify_mv > 5000 {
            return Err(ProgramError::Invalid("verify voltage out of range"));
        }
        if self.ramp_len() > MAX_RAMP_PULSES {
            return Err(ProgramError::Invalid("ramp longer than 255 pulses"));
        }
        Ok(())
    }

    /// Number of pulse amplitudes in the ramp, exact integer arithmetic.
    pub fn ramp_len(&self) -> u32 {
        (self.v_stop_mv - self.v_start_mv) as u32 / self.v_step_mv as u32 + 1
    }

    /// Pulse amplitude of step `k`, mV.
    pub fn amplitude_mv(&self, k: u32) -> u16 {
        (self.v_start_mv as u32 + k * self.v_step_mv as u32) as u16
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgramResult {
    pub status: ProgramStatus,
    pub pulses: u32,
    pub final_v_mv: u16,
    pub final_i_na: u32,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ProgramError {
    #[error("invalid programming parameters: {0}")]
    Invalid(&'static str),
    #[error(transparent)]
    Frontend(#[from] FrontendError),
}

fn mv<T: Real>(v: u16) -> T {
    T::of(v as f64 * 1e-3)
}

fn us<T: Real>(t: u32) -> T {
    T::of(t as f64 * 1e-6)
}

fn to_na<T: Real>(amps: T) -> u32 {
    (amps.as_f64() * 1e9).round().clamp(0.0, u32::MAX as f64) as u32
}

/// Line polarity for one programming pulse: FORM/SET drive the word line
/// positive, RESET drives the bit line positive.
fn polarity(mode: ProgramMode, v_mv: u16) -> (u16, u16) {
    match mode {
        ProgramMode::Form | ProgramMode::Set => (v_mv, 0),
        ProgramMode::Reset => (0, v_mv),
    }
}

fn target_met<T: Real>(mode: ProgramMode, i: T, target: T) -> bool {
    match mode {
        ProgramMode::Form | ProgramMode::Set => i >= target,
        ProgramMode::Reset => i <= target,
    }
}

/// Program-and-verify ramp. Stops at the first verify meeting the target;
/// never pulses again after that. A reset that exhausts the ramp against a
/// floor that provably cannot reach the target reports `CellBroken`.
pub fn ispva<T: Real>(
    fixture: &mut CrossbarFixture<T>,
    sl: usize,
    bl: usize,
    params: &IspvaParams,
) -> Result<ProgramResult, ProgramError> {
    ispva_traced(fixture, sl, bl, params, None)
}

/// Same as [`ispva`] with an optional trace of applied pulse amplitudes.
pub fn ispva_traced<T: Real>(
    fixture: &mut CrossbarFixture<T>,
    sl: usize,
    bl: usize,
    params: &IspvaParams,
    mut trace: Option<&mut Vec<u16>>,
) -> Result<ProgramResult, ProgramError> {
    params.validate()?;
    let target = T::of(params.i_target_na as f64 * 1e-9);
    let mut last_v = params.v_start_mv;
    let mut last_i = T::zero();
    let n = params.ramp_len();
    for k in 0..n {
        let v = params.amplitude_mv(k);
        let (v_wl, v_bl) = polarity(params.mode, v);
        fixture.drive_cell(
            sl,
            bl,
            mv(v_wl),
            mv(v_bl),
            mv(params.v_gate_mv),
            us(params.t_pulse_us),
        )?;
        if let Some(t) = trace.as_deref_mut() {
            t.push(v);
        }
        let reading =
            fixture.measure_bl_current(bl, mv(params.v_verify_mv), mv(params.v_gate_read_mv), sl)?;
        last_v = v;
        last_i = reading.amps;
        if target_met(params.mode, reading.amps, target) {
            return Ok(ProgramResult {
                status: ProgramStatus::Ok,
                pulses: k + 1,
                final_v_mv: v,
                final_i_na: to_na(reading.amps),
            });
        }
    }
    let status = if params.mode == ProgramMode::Reset {
        let floor =
            fixture.hrs_floor_current(sl, bl, mv(params.v_verify_mv), mv(params.v_gate_read_mv))?;
        if floor > target {
            ProgramStatus::CellBroken
        } else {
            ProgramStatus::TargetNotReached
        }
    } else {
        ProgramStatus::TargetNotReached
    };
    Ok(ProgramResult { status, pulses: n, final_v_mv: last_v, final_i_na: to_na(last_i) })
}

/// One forming pulse followed by one verify read.
pub fn single_pulse_form<T: Real>(
    fixture: &mut CrossbarFixture<T>,
    sl: usize,
    bl: usize,
    v_mv: u16,
    t_pulse_us: u32,
    v_gate_mv: u16,
    i_target_na: u32,
    v_gate_read_mv: u16,
) -> Result<ProgramResult, ProgramError> {
    if t_pulse_us == 0 {
        return Err(ProgramError::Invalid("t_pulse must be positive"));
    }
    if v_mv > 5000 || v_gate_mv > 5000 || v_gate_read_mv > 5000 {
        return Err(ProgramError::Invalid("voltage exceeds the 5 V full scale"));
    }
    fixture.drive_cell(sl, bl, mv(v_mv), T::zero(), mv(v_gate_mv), us(t_pulse_us))?;
    let reading = fixture.measure_bl_current(bl, mv(V_VERIFY_MV), mv(v_gate_read_mv), sl)?;
    let target = T::of(i_target_na as f64 * 1e-9);
    let status = if reading.amps >= target {
        ProgramStatus::Ok
    } else {
        ProgramStatus::TargetNotReached
    };
    Ok(ProgramResult { status, pulses: 1, final_v_mv: v_mv, final_i_na: to_na(reading.amps) })
}

/// Incremental forming without intermediate verifies: the full ramp is
/// applied unconditionally, then a single verify read decides the status.
pub fn incremental_form<T: Real>(
    fixture: &mut CrossbarFixture<T>,
    sl: usize,
    bl: usize,
    params: &IspvaParams,
) -> Result<ProgramResult, ProgramError> {
    params.validate()?;
    let n = params.ramp_len();
    let mut last_v = params.v_start_mv;
    for k in 0..n {
        let v = params.amplitude_mv(k);
        let (v_wl, v_bl) = polarity(params.mode, v);
        fixture.drive_cell(
            sl,
            bl,
            mv(v_wl),
            mv(v_bl),
            mv(params.v_gate_mv),
            us(params.t_pulse_us),
        )?;
        last_v = v;
    }
    let reading =
        fixture.measure_bl_current(bl, mv(params.v_verify_mv), mv(params.v_gate_read_mv), sl)?;
    let target = T::of(params.i_target_na as f64 * 1e-9);
    let status = if target_met(params.mode, reading.amps, target) {
        ProgramStatus::Ok
    } else {
        ProgramStatus::TargetNotReached
    };
    Ok(ProgramResult { status, pulses: n, final_v_mv: last_v, final_i_na: to_na(reading.amps) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stock_recipes() {
        let set = IspvaParams::set_defaults();
        assert_eq!(
            (set.v_start_mv, set.v_step_mv, set.v_stop_mv),
            (500, 100, 2000)
        );
        assert_eq!(set.v_gate_mv, 1500);
        assert_eq!(set.i_target_na, 80_000);
        assert_eq!(set.v_gate_read_mv, 1500);
        assert_eq!(set.ramp_len(), 16);
        let reset = IspvaParams::reset_defaults();
        assert_eq!(reset.v_gate_mv, 2700);
        assert_eq!(reset.i_target_na, 5_000);
        let form = IspvaParams::form_defaults();
        assert_eq!((form.v_start_mv, form.v_stop_mv), (2000, 3200));
        assert_eq!(form.v_gate_mv, 1800);
    }

    #[test]
    fn ramp_arithmetic() {
        let mut p = IspvaParams::set_defaults();
        assert_eq!(p.amplitude_mv(0), 500);
        assert_eq!(p.amplitude_mv(15), 2000);
        p.v_step_mv = 70;
        assert_eq!(p.ramp_len(), (2000 - 500) / 70 + 1);
        p.v_start_mv = 2000;
        assert_eq!(p.ramp_len(), 1);
    }

    #[test]
    fn validation_rejects_bad_ramps() {
        let mut p = IspvaParams::set_defaults();
        p.v_step_mv = 0;
        assert!(p.validate().is_err());
        let mut p = IspvaParams::set_defaults();
        p.v_start_mv = 2100;
        assert!(p.validate().is_err());
        let mut p = IspvaParams::set_defaults();
        p.t_pulse_us = 0;
        assert!(p.validate().is_err());
        let mut p = IspvaParams::set_defaults();
        p.v_step_mv = 1;
        p.v_start_mv = 0;
        p.v_stop_mv = 5000;
        assert!(p.validate().is_err(), "5001 pulses must be rejected");
    }
}
