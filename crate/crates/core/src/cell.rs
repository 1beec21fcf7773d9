//! Behavioral model of one 1T1R cell: a filament-strength state variable
//! behind a select transistor.
//!
//! The memristor is lumped into a single state `x` in `[0, 1]`. Conductance
//! is linear in `x` between an effective high-resistive floor and `g_max`.
//! Pulses above the set (reset) threshold grow (dissolve) the filament at a
//! rate proportional to the overdrive; the select transistor limits the
//! current and thereby the state a set pulse can reach. Reads are weak
//! pulses of the same polarity physics: they disturb the state with a
//! shot-noise process whose mean rate is `disturb_* · |V| · t_read`.
//! Every completed set→reset transition ages the cell; with age the
//! high-resistive floor creeps towards `g_max` until the high state can no
//! longer be programmed.
use crate::scalar::Real;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Poisson};
/// Effective state exposure of a single read, seconds. Only the products
/// `disturb_* · t_read` matter, so this is a normalization.
pub const T_READ_S: f64 = 10e-6;
/// Default disturb shot-noise quantum (see [`CellParams::disturb_jump`]).
pub const DEFAULT_DISTURB_JUMP: f64 = 0.05;
/// Word/bit line full scale, volts.
pub const MAX_LINE_VOLTS: f64 = 5.0;
/// Post-forming filament strength is drawn uniformly from this range.
pub const X_INIT_RANGE: (f64, f64) = (0.8, 1.0);
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("g_min must be positive and below g_max")]
    ConductanceWindow,
    #[error("rates and noise coefficients must be non-negative")]
    NegativeRate,
    #[error("n_cmax must be at least 1")]
    EnduranceLimit,
    #[error("thresholds must be positive")]
    Threshold,
    #[error("transistor model must have g_m > 0 and v_th >= 0")]
    Transistor,
}
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PulseError {
    #[error("pulse duration must be positive")]
    Duration,
    #[error("line voltage magnitude exceeds the 5 V full scale")]
    Voltage,
}
/// Select-transistor compliance: the gate caps the cell current at
/// `g_m · max(v_gate − v_th, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransistorModel<T> {
    /// Gate threshold voltage (V).
    pub v_th: T,
    /// Transconductance above threshold (S).
    pub g_m: T,
}
impl<T: Real> TransistorModel<T> {
    pub fn i_compliance(&self, v_gate: T) -> T {
        self.g_m * (v_gate - self.v_th).max(T::zero())
    }
}
/// Static parameters of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellParams<T> {
    /// Forming threshold (V); first crossing creates the filament.
    pub v_form_th: T,
    /// Set threshold (V).
    pub v_set_th: T,
    /// Reset threshold (V), applied to the reverse polarity.
    pub v_reset_th: T,
    /// Fully-formed filament conductance (S).
    pub g_max: T,
    /// Pristine / high-resistive floor conductance (S).
    pub g_min: T,
    /// Filament growth rate, 1/(V·s).
    pub alpha_set: T,
    /// Filament dissolution rate, 1/(V·s).
    pub alpha_reset: T,
    /// Std of the state perturbation after any programming change.
    pub sigma_program: T,
    /// Read-noise offset in sigma_read(V) = sigma0 + sigma1·|V|.
    pub sigma0: T,
    /// Read-noise slope, 1/V.
    pub sigma1: T,
    /// Mean disturb rate for reads in the set polarity, 1/(V·s).
    pub disturb_set: T,
    /// Mean disturb rate for reads in the reset polarity, 1/(V·s).
    pub disturb_reset: T,
    /// Disturb event quantum in `(0, 1]`: one shot event moves `x` by this
    /// fraction of the remaining headroom times an Exp(1) draw. Events
    /// arrive at mean rate `disturb_*·|V|·t_read / disturb_jump`, so the
    /// mean drift is the rate itself; the quantum only sets how grainy it
    /// is (frequent small steps vs rare large jumps).
    pub disturb_jump: T,
    /// Endurance limit: programming cycles until the floor drift saturates.
    pub n_cmax: u64,
    /// High-resistive floor drift gain; 1 drives the floor all the way to
    /// `g_max` at `n_cmax` cycles.
    pub kappa: T,
    pub transistor: TransistorModel<T>,
}
impl<T: Real> CellParams<T> {
    pub fn validate(&self) -> Result<(), ParamError> {
        let zero = T::zero();
        if !(self.g_min > zero && self.g_min < self.g_max) {
            return Err(ParamError::ConductanceWindow);
        }
        if self.alpha_set < zero
            || self.alpha_reset < zero
            || self.sigma_program < zero
            || self.sigma0 < zero
            || self.sigma1 < zero
            || self.disturb_set < zero
            || self.disturb_reset < zero
            || self.kappa < zero
        {
            return Err(ParamError::NegativeRate);
        }
        if self.n_cmax < 1 {
            return Err(ParamError::EnduranceLimit);
        }
        if !(self.disturb_jump > zero && self.disturb_jump <= T::one()) {
            return Err(ParamError::NegativeRate);
        }
        if self.v_form_th <= zero || self.v_set_th <= zero || self.v_reset_th <= zero {
            return Err(ParamError::Threshold);
        }
        if self.transistor.g_m <= zero || self.transistor.v_th < zero {
            return Err(ParamError::Transistor);
        }
        Ok(())
    }
}
/// One voltage pulse as seen by a cell. Line voltages are signed; the
/// cell voltage is `v_wl − v_bl`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec<T> {
    pub v_wl: T,
    pub v_bl: T,
    pub v_gate: T,
    /// Pulse width (s), must be positive.
    pub duration: T,
}
impl<T: Real> PulseSpec<T> {
    pub fn validate(&self) -> Result<(), PulseError> {
        if !(self.duration > T::zero()) {
            return Err(PulseError::Duration);
        }
        let fs = T::of(MAX_LINE_VOLTS);
        if self.v_wl.abs() > fs || self.v_bl.abs() > fs {
            return Err(PulseError::Voltage);
        }
        Ok(())
    }
}
/// Net effect of one pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseOutcome<T> {
    /// Net state change including the post-program perturbation.
    pub delta_x: T,
    /// Compliance-limited cell current at the pulse voltage, noiseless (A).
    pub current: T,
}
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Pristine,
    Formed,
}
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WritePolarity {
    None,
    Set,
    Reset,
}
/// One 1T1R cell with its own seeded random stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell<T> {
    params: CellParams<T>,
    phase: Phase,
    x: T,
    /// Completed reset events (set→reset transitions).
    d: u64,
    last_write: WritePolarity,
    rng: ChaCha8Rng,
}
impl<T: Real> Cell<T> {
    /// Fresh pristine cell with a deterministic stream derived from `seed`.
    pub fn new(params: CellParams<T>, seed: u64) -> Result<Self, ParamError> {
        Self::with_rng(params, ChaCha8Rng::seed_from_u64(seed))
    }
    /// Fresh pristine cell taking over an existing stream (used by the
    /// fixture so per-cell parameter draws and the cell lifetime share one
    /// stream).
    pub fn with_rng(params: CellParams<T>, rng: ChaCha8Rng) -> Result<Self, ParamError> {
        params.validate()?;
        Ok(Cell {
            params,
            phase: Phase::Pristine,
            x: T::zero(),
            d: 0,
            last_write: WritePolarity::None,
            rng,
        })
    }
    pub fn params(&self) -> &CellParams<T> {
        &self.params
    }
    pub fn phase(&self) -> Phase {
        self.phase
    }
    pub fn filament(&self) -> T {
        self.x
    }
    /// Completed programming cycles (counted at each set→reset transition).
    pub fn reset_count(&self) -> u64 {
        self.d
    }
    /// Degradation-shifted high-resistive floor.
    pub fn g_min_eff(&self) -> T {
        let wear = T::of(self.d as f64 / self.params.n_cmax as f64).min(T::one());
        self.params.g_min + self.params.kappa * wear * (self.params.g_max - self.params.g_min)
    }
    /// Conductance at the current state; pure query.
    pub fn conductance(&self) -> T {
        match self.phase {
            Phase::Pristine => self.params.g_min,
            Phase::Formed => {
                let floor = self.g_min_eff();
                floor + self.x * (self.params.g_max - floor)
            }
        }
    }
    /// Lowest current a verify read at (`v_read`, `v_gate`) can possibly
    /// return, noiseless: the floor makes any smaller value unreachable.
    pub fn hrs_floor_current(&self, v_read: T, v_gate: T) -> T {
        let floor = match self.phase {
            Phase::Pristine => self.params.g_min,
            Phase::Formed => self.g_min_eff(),
        };
        (v_read.abs() * floor).min(self.params.transistor.i_compliance(v_gate))
    }
    fn clamp_state(&mut self) {
        self.x = self.x.max(T::zero()).min(T::one());
    }
    /// Apply one programming pulse. Sub-threshold pulses are no-ops.
    pub fn apply_pulse(&mut self, pulse: &PulseSpec<T>) -> Result<PulseOutcome<T>, PulseError> {
        pulse.validate()?;
        let p = self.params;
        let v_cell = pulse.v_wl - pulse.v_bl;
        let x_before = self.x;
        let mut changed = false;
        match self.phase {
            Phase::Pristine => {
                if v_cell >= p.v_form_th {
                    self.phase = Phase::Formed;
                    let (lo, hi) = X_INIT_RANGE;
                    let u = T::unit_uniform(&mut self.rng);
                    self.x = T::of(lo) + u * T::of(hi - lo);
                    self.last_write = WritePolarity::Set;
                    changed = true;
                }
            }
            Phase::Formed => {
                if v_cell > p.v_set_th {
                    let over = v_cell - p.v_set_th;
                    let raw = p.alpha_set * (T::one() - self.x) * over * pulse.duration;
                    // The transistor caps the pulse current; growth is
                    // scaled down by the remaining current headroom.
                    let i_entry = v_cell * self.conductance();
                    let i_comp = p.transistor.i_compliance(pulse.v_gate);
                    let factor = if i_entry > i_comp { i_comp / i_entry } else { T::one() };
                    let delta = raw * factor;
                    if delta > T::zero() {
                        self.x += delta;
                        self.clamp_state();
                        changed = true;
                    }
                    if self.last_write != WritePolarity::Set {
                        self.last_write = WritePolarity::Set;
                    }
                } else if -v_cell > p.v_reset_th {
                    let over = -v_cell - p.v_reset_th;
                    let delta = p.alpha_reset * self.x * over * pulse.duration;
                    if delta > T::zero() {
                        self.x -= delta;
                        self.clamp_state();
                        changed = true;
                    }
                    if self.last_write == WritePolarity::Set {
                        self.d += 1;
                        self.last_write = WritePolarity::Reset;
                    }
                }
            }
        }
        if changed && p.sigma_program > T::zero() {
            self.x += T::standard_normal(&mut self.rng) * p.sigma_program;
            self.clamp_state();
        }
        let i_comp = p.transistor.i_compliance(pulse.v_gate);
        let magnitude = (v_cell.abs() * self.conductance()).min(i_comp);
        let current = if v_cell >= T::zero() { magnitude } else { -magnitude };
        Ok(PulseOutcome { delta_x: self.x - x_before, current })
    }
    /// Read the cell current at `v_read` with the gate at `v_gate`.
    ///
    /// A deselected cell (gate at or below threshold) returns exactly zero.
    /// Otherwise the read first disturbs the state — set polarity pulls it
    /// up, reset polarity pulls it down, shot events at mean rate
    /// `disturb_* · |V| · t_read / jump` — and then returns
    /// `sign(V) · min(|V|·G, I_comp) · (1 + eps)` with
    /// `eps ~ N(0, sigma0 + sigma1·|V|)`.
    pub fn sense_current(&mut self, v_read: T, v_gate: T) -> T {
        let p = self.params;
        if v_gate <= p.transistor.v_th {
            return T::zero();
        }
        if v_read == T::zero() {
            return T::zero();
        }
        if self.phase == Phase::Formed {
            let up = v_read > T::zero();
            let rate = if up { p.disturb_set } else { p.disturb_reset };
            let exposure = rate * v_read.abs() * T::of(T_READ_S);
            let lambda = (exposure / p.disturb_jump).as_f64();
            if lambda > 0.0 {
                let events = Poisson::new(lambda)
                    .map(|dist| dist.sample(&mut self.rng) as u64)
                    .unwrap_or(0)
                    .min(10_000);
                for _ in 0..events {
                    let leverage = if up { T::one() - self.x } else { self.x };
                    if leverage <= T::zero() {
                        break;
                    }
                    let jump = p.disturb_jump * leverage * T::standard_exp(&mut self.rng);
                    if up {
                        self.x += jump;
                    } else {
                        self.x -= jump;
                    }
                    self.clamp_state();
                }
            }
        }
        let i_comp = p.transistor.i_compliance(v_gate);
        let mut magnitude = (v_read.abs() * self.conductance()).min(i_comp);
        let sigma = p.sigma0 + p.sigma1 * v_read.abs();
        if sigma > T::zero() {
            magnitude *= T::one() + T::standard_normal(&mut self.rng) * sigma;
        }
        if v_read > T::zero() {
            magnitude
        } else {
            -magnitude
        }
    }
}
#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    fn quiet_params() -> CellParams<f64> {
        CellParams {
            v_form_th: 1.6,
            v_set_th: 0.6,
            v_reset_th: 0.6,
            g_max: 500e-6,
            g_min: 5e-6,
            alpha_set: 1.0,
            alpha_reset: 1.0,
            sigma_program: 0.0,
            sigma0: 0.0,
            sigma1: 0.0,
            disturb_set: 0.0,
            disturb_reset: 0.0,
            disturb_jump: 0.05,
            n_cmax: 10_000,
            kappa: 0.03,
            transistor: TransistorModel { v_th: 0.6, g_m: 1.0 },
        }
    }
    fn pulse(v_wl: f64, v_bl: f64, v_gate: f64) -> PulseSpec<f64> {
        PulseSpec { v_wl, v_bl, v_gate, duration: 10e-6 }
    }
    #[test]
    fn construction_is_pristine() {
        let cell = Cell::new(quiet_params(), 42).unwrap();
        assert_eq!(cell.phase(), Phase::Pristine);
        assert_eq!(cell.filament(), 0.0);
        assert_eq!(cell.reset_count(), 0);
    }
    #[test]
    fn inverted_conductance_window_is_rejected() {
        let mut p = quiet_params();
        p.g_min = p.g_max;
        assert_eq!(Cell::new(p, 0).unwrap_err(), ParamError::ConductanceWindow);
    }
    #[test]
    fn same_seed_same_responses() {
        let mut p = quiet_params();
        p.sigma_program = 0.02;
        p.disturb_set = 1e4;
        p.sigma0 = 0.01;
        let mut a = Cell::new(p, 7).unwrap();
        let mut b = Cell::new(p, 7).unwrap();
        for k in 0..200u32 {
            let v = 0.5 + (k % 17) as f64 * 0.1;
            let out_a = a.apply_pulse(&pulse(v, 0.0, 1.5)).unwrap();
            let out_b = b.apply_pulse(&pulse(v, 0.0, 1.5)).unwrap();
            assert_eq!(out_a, out_b);
            assert_eq!(a.sense_current(0.2, 1.5), b.sense_current(0.2, 1.5));
        }
        assert_eq!(a, b);
    }
    #[test]
    fn forming_threshold_crossing() {
        let mut cell = Cell::new(quiet_params(), 42).unwrap();
        let out = cell.apply_pulse(&pulse(1.5, 0.0, 1.8)).unwrap();
        assert_eq!(cell.phase(), Phase::Pristine);
        assert_eq!(out.delta_x, 0.0);
        cell.apply_pulse(&pulse(2.0, 0.0, 1.8)).unwrap();
        assert_eq!(cell.phase(), Phase::Formed);
        assert!(cell.filament() >= 0.8 && cell.filament() <= 1.0);
    }
    #[test]
    fn sub_threshold_set_is_noop() {
        let mut cell = Cell::new(quiet_params(), 42).unwrap();
        cell.apply_pulse(&pulse(2.0, 0.0, 1.8)).unwrap();
        let before = cell.filament();
        let out = cell.apply_pulse(&pulse(0.2, 0.0, 1.5)).unwrap();
        assert_eq!(out.delta_x, 0.0);
        assert_eq!(cell.filament(), before);
    }
    #[test]
    fn growth_law_hand_evaluated() {
        // alpha_set = 1, x = 0.5, overdrive 1.0 V, 10 µs, compliance open:
        // delta = 1.0 · (1 − 0.5) · 1.0 · 1e−5 = 5e−6.
        let mut p = quiet_params();
        p.transistor.g_m = 10.0; // compliance far above any cell current
        let mut cell = Cell::new(p, 42).unwrap();
        cell.apply_pulse(&pulse(2.0, 0.0, 5.0)).unwrap();
        cell.x = 0.5;
        let out = cell.apply_pulse(&pulse(1.6, 0.0, 5.0)).unwrap();
        assert!((out.delta_x - 5e-6).abs() < 1e-15, "delta_x = {}", out.delta_x);
    }
    #[test]
    fn compliance_scales_growth_down() {
        let mut open = Cell::new(quiet_params(), 1).unwrap();
        open.apply_pulse(&pulse(2.0, 0.0, 1.8)).unwrap();
        open.x = 0.5;
        let mut limited = open.clone();
        // Open gate: compliance 1 S · 4.4 V, no limiting.
        let free = open.apply_pulse(&pulse(1.6, 0.0, 5.0)).unwrap().delta_x;
        // Just above threshold: compliance 1 S · 0.1 V = 0.1 A, still above
        // the entry current 1.6 V · ~252 µS, so equal; then a tiny gate.
        let mut tiny_gate = limited.clone();
        let same = tiny_gate.apply_pulse(&pulse(1.6, 0.0, 5.0)).unwrap().delta_x;
        assert_eq!(free, same);
        let mut p = quiet_params();
        p.transistor.g_m = 111.11e-6;
        let mut squeezed = Cell::new(p, 1).unwrap();
        squeezed.apply_pulse(&pulse(2.0, 0.0, 1.8)).unwrap();
        squeezed.x = 0.5;
        let capped = squeezed.apply_pulse(&pulse(1.6, 0.0, 1.5)).unwrap().delta_x;
        assert!(capped < free, "capped {capped} vs free {free}");
        assert!(capped > 0.0);
        let _ = limited.apply_pulse(&pulse(1.6, 0.0, 5.0));
    }
    #[test]
    fn reset_event_counting_is_per_transition() {
        let mut cell = Cell::new(quiet_params(), 3).unwrap();
        cell.apply_pulse(&pulse(2.0, 0.0, 1.8)).unwrap();
        assert_eq!(cell.reset_count(), 0);
        // A burst of reset pulses counts once.
        for _ in 0..5 {
            cell.apply_pulse(&pulse(0.0, 1.0, 2.7)).unwrap();
        }
        assert_eq!(cell.reset_count(), 1);
        // Set then reset again: second cycle.
        cell.apply_pulse(&pulse(1.5, 0.0, 1.5)).unwrap();
        cell.apply_pulse(&pulse(0.0, 1.0, 2.7)).unwrap();
        assert_eq!(cell.reset_count(), 2);
    }
    #[test]
    fn deselected_cell_reads_zero() {
        let mut cell = Cell::new(quiet_params(), 42).unwrap();
        cell.apply_pulse(&pulse(2.0, 0.0, 1.8)).unwrap();
        assert_eq!(cell.sense_current(0.2, 0.0), 0.0);
        assert_eq!(cell.sense_current(0.2, 0.6), 0.0);
        assert!(cell.sense_current(0.2, 1.5) > 0.0);
    }
    #[test]
    fn noiseless_read_is_ohmic_and_odd() {
        let mut p = quiet_params();
        p.transistor.g_m = 10.0;
        let mut cell = Cell::new(p, 42).unwrap();
        cell.apply_pulse(&pulse(2.0, 0.0, 1.8)).unwrap();
        // Pin x so that G = 500 µS exactly.
        cell.x = 1.0;
        let i = cell.sense_current(0.2, 5.0);
        assert!((i - 100e-6).abs() < 1e-12, "i = {i}");
        let neg = cell.sense_current(-0.2, 5.0);
        assert_eq!(neg, -i);
    }
    #[test]
    fn conductance_endpoints_and_floor_drift() {
        let mut p = quiet_params();
        p.kappa = 1.0;
        p.n_cmax = 4;
        let mut cell = Cell::new(p, 42).unwrap();
        cell.apply_pulse(&pulse(2.0, 0.0, 1.8)).unwrap();
        cell.x = 0.0;
        assert_eq!(cell.conductance(), p.g_min);
        cell.x = 1.0;
        assert_eq!(cell.conductance(), p.g_max);
        // Age the cell to its endurance limit: floor reaches g_max.
        for _ in 0..4 {
            cell.apply_pulse(&pulse(1.5, 0.0, 1.5)).unwrap();
            cell.apply_pulse(&pulse(0.0, 1.5, 2.7)).unwrap();
        }
        assert_eq!(cell.reset_count(), 4);
        cell.x = 0.0;
        assert_eq!(cell.conductance(), p.g_max);
    }
    #[test]
    fn state_stays_in_unit_interval() {
        let mut p = quiet_params();
        p.sigma_program = 0.05;
        p.disturb_set = 5e4;
        p.disturb_reset = 5e3;
        p.alpha_set = 3e5;
        p.alpha_reset = 3e5;
        let mut cell = Cell::new(p, 99).unwrap();
        let mut probe = ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..5000 {
            let v: f64 = probe.gen_range(-4.0..4.0);
            let gate: f64 = probe.gen_range(0.0..3.0);
            if probe.gen_bool(0.5) {
                cell.apply_pulse(&pulse(v.max(0.0), (-v).max(0.0), gate)).unwrap();
            } else {
                cell.sense_current(v, gate);
            }
            assert!(cell.filament() >= 0.0 && cell.filament() <= 1.0);
        }
    }
    #[test]
    fn set_direction_reads_disturb_faster_than_reset_direction() {
        let mut p = quiet_params();
        p.alpha_set = 3e5;
        p.alpha_reset = 3e5;
        p.disturb_set = 4e4;
        p.disturb_reset = 100.0;
        let midpoint = (p.g_max + p.g_min) / 2.0;
        let cap = 2_000u32;
        let count_until_cross = |v_read: f64, seed: u64| -> u32 {
            let mut cell = Cell::new(p, seed).unwrap();
            cell.apply_pulse(&pulse(2.0, 0.0, 1.8)).unwrap();
            // Drive to the high-resistive state.
            for _ in 0..6 {
                cell.apply_pulse(&pulse(0.0, 2.0, 2.7)).unwrap();
            }
            for n in 1..=cap {
                cell.sense_current(v_read, 1.5);
                if cell.conductance() >= midpoint {
                    return n;
                }
            }
            cap
        };
        let trials = 40;
        let up: u64 = (0..trials).map(|s| count_until_cross(0.3, s) as u64).sum();
        let down: u64 = (0..trials).map(|s| count_until_cross(-0.3, 1000 + s) as u64).sum();
        assert!(
            up < down,
            "mean reads to midpoint: set-polarity {} vs reset-polarity {}",
            up as f64 / trials as f64,
            down as f64 / trials as f64
        );
    }
    #[test]
    fn read_noise_grows_with_read_voltage() {
        let mut p = quiet_params();
        p.sigma0 = 0.01;
        p.sigma1 = 0.05;
        let std_at = |v: f64, x: f64| -> f64 {
            let mut cell = Cell::new(p, 5).unwrap();
            cell.apply_pulse(&pulse(2.0, 0.0, 1.8)).unwrap();
            let samples: Vec<f64> = (0..1000)
                .map(|_| {
                    cell.x = x;
                    cell.sense_current(v, 5.0)
                })
                .collect();
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64)
                .sqrt()
        };
        for &x in &[0.9, 0.02] {
            assert!(std_at(0.3, x) > std_at(0.1, x), "x = {x}");
        }
    }
    #[test]
    fn broken_cell_floor_is_unreachable() {
        let mut p = quiet_params();
        p.kappa = 1.0;
        p.n_cmax = 3;
        p.alpha_set = 3e5;
        p.alpha_reset = 3e5;
        p.transistor.g_m = 111.11e-6;
        let mut cell = Cell::new(p, 8).unwrap();
        cell.apply_pulse(&pulse(2.0, 0.0, 1.8)).unwrap();
        for _ in 0..3 {
            cell.apply_pulse(&pulse(1.5, 0.0, 1.5)).unwrap();
            cell.apply_pulse(&pulse(0.0, 2.0, 2.7)).unwrap();
        }
        // Any further reset ramp cannot bring the verify current below the
        // high-state target: the floor equals g_max.
        for step in 0..16 {
            cell.apply_pulse(&pulse(0.0, 0.5 + 0.1 * step as f64, 2.7)).unwrap();
        }
        let verify = cell.sense_current(0.2, 1.5);
        let floor = cell.hrs_floor_current(0.2, 1.5);
        assert!(verify >= floor);
        assert!(floor > 5e-6, "floor {floor}");
    }
}
