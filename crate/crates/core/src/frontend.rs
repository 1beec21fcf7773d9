//! Analog front end around the 12×7 pseudo crossbar: mux interconnect,
//! DAC pulse generation, TIA current sensing with auto-ranging and 18-bit
//! ADC quantization.
//!
//! Word lines and source lines (transistor gates) run horizontally, bit
//! lines vertically; bit-line pins sit on the south side and are the only
//! ones that can route into the sense path. Every pin is fed by an 8:1
//! mux: five DAC lines, ground, an external line (unconnected here) and —
//! south pins only — the TIA input.

use crate::cell::{Cell, PulseOutcome, PulseSpec};
use crate::scalar::Real;

pub const ROWS: usize = 12;
pub const COLS: usize = 7;

pub const DAC_CHANNELS: usize = 16;
pub const DAC_MAX_CODE: u16 = 4095;
/// DAC reference, volts; codes map linearly onto `[0, DAC_FULL_SCALE]`.
pub const DAC_FULL_SCALE: f64 = 5.0;

/// Bipolar ADC input range, volts.
pub const ADC_FULL_SCALE: f64 = 4.096;
pub const ADC_BITS: u32 = 18;

/// Selectable TIA feedback resistors, ohms.
pub const TIA_LADDER_OHMS: [f64; 8] =
    [43.0, 100.0, 430.0, 1e3, 4.3e3, 10e3, 43e3, 100e3];

/// Per-fixture relative gain error is drawn uniformly from
/// `[-GAIN_ERROR_BOUND, +GAIN_ERROR_BOUND]`, keeping the end-to-end
/// measurement error inside the 0.5 % contract with quantization included.
pub const GAIN_ERROR_BOUND: f64 = 0.0045;

/// Analog switch settling time, seconds. Recorded as a fixture constant;
/// pulse timing is treated as exact.
pub const ANALOG_SWITCH_TIME_S: f64 = 60e-9;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FrontendError {
    #[error("cell address out of range")]
    Address,
    #[error("invalid parameter: {0}")]
    Parameter(&'static str),
    #[error("sense path saturated at minimum feedback resistance")]
    Saturated,
}

/// A socket pin. Rows expose a word-line and a source-line (gate) pin,
/// columns a bit-line pin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pin {
    Wl(usize),
    Sl(usize),
    Bl(usize),
}

/// 8:1 mux inputs. Selector order: DAC0..DAC4, GROUND, EXTERNAL, SENSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuxSource {
    Dac(u8),
    Ground,
    External,
    Sense,
}

impl MuxSource {
    pub fn from_selector(sel: u8) -> Result<Self, FrontendError> {
        match sel {
            0..=4 => Ok(MuxSource::Dac(sel)),
            5 => Ok(MuxSource::Ground),
            6 => Ok(MuxSource::External),
            7 => Ok(MuxSource::Sense),
            _ => Err(FrontendError::Parameter("mux selector out of range")),
        }
    }

    pub fn selector(self) -> u8 {
        match self {
            MuxSource::Dac(ch) => ch,
            MuxSource::Ground => 5,
            MuxSource::External => 6,
            MuxSource::Sense => 7,
        }
    }
}

/// One DAC channel: a 12-bit code plus a polarity switch so lines can be
/// driven below ground.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DacChannel {
    pub code: u16,
    pub inverted: bool,
}

impl DacChannel {
    pub const ZERO: DacChannel = DacChannel { code: 0, inverted: false };
}

/// Exact DAC transfer function.
pub fn dac_code_to_voltage<T: Real>(code: u16) -> Result<T, FrontendError> {
    if code > DAC_MAX_CODE {
        return Err(FrontendError::Parameter("DAC code out of range"));
    }
    Ok(T::of(code as f64 * DAC_FULL_SCALE / DAC_MAX_CODE as f64))
}

/// Nearest code for a voltage magnitude; errors above full scale.
pub fn nearest_dac_code<T: Real>(volts: T) -> Result<u16, FrontendError> {
    let v = volts.as_f64();
    if !(0.0..=DAC_FULL_SCALE).contains(&v) {
        return Err(FrontendError::Parameter("voltage outside DAC range"));
    }
    Ok((v * DAC_MAX_CODE as f64 / DAC_FULL_SCALE).round() as u16)
}

/// Quantize a voltage magnitude to the DAC grid, keeping the sign.
pub fn dac_quantize_signed<T: Real>(volts: T) -> Result<(DacChannel, T), FrontendError> {
    let code = nearest_dac_code(volts.abs())?;
    let magnitude: T = dac_code_to_voltage(code)?;
    let inverted = volts < T::zero();
    let applied = if inverted { -magnitude } else { magnitude };
    Ok((DacChannel { code, inverted }, applied))
}

/// TIA feedback selection plus post-amplifier gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiaConfig<T> {
    pub feedback_ohms: T,
    pub gain: T,
}

impl<T: Real> TiaConfig<T> {
    pub fn new(feedback_ohms: f64) -> Self {
        TiaConfig { feedback_ohms: T::of(feedback_ohms), gain: T::one() }
    }

    /// Highest range; the setup state.
    pub fn max_range() -> Self {
        Self::new(TIA_LADDER_OHMS[TIA_LADDER_OHMS.len() - 1])
    }
}

/// Pick the largest feedback resistance whose output stays within the ADC
/// full scale for the given current estimate. If even the smallest
/// overloads, returns the smallest and flags saturation.
pub fn tia_autorange<T: Real>(i_estimate: T) -> (TiaConfig<T>, bool) {
    let i = i_estimate.abs().as_f64();
    for &r in TIA_LADDER_OHMS.iter().rev() {
        if i * r <= ADC_FULL_SCALE {
            return (TiaConfig::new(r), false);
        }
    }
    (TiaConfig::new(TIA_LADDER_OHMS[0]), true)
}

/// One ADC sample: the raw code plus its reconstructed voltage and, given
/// the active TIA range, the reconstructed current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcReading<T> {
    pub code: i32,
    pub volts: T,
    pub amps: T,
}

pub fn adc_lsb() -> f64 {
    2.0 * ADC_FULL_SCALE / (1u64 << ADC_BITS) as f64
}

/// Quantize a voltage onto the bipolar 18-bit grid.
pub fn adc_quantize<T: Real>(volts: T) -> (i32, T) {
    let lsb = adc_lsb();
    let half = (1i64 << (ADC_BITS - 1)) as f64;
    let code = (volts.as_f64() / lsb).round().clamp(-half, half - 1.0) as i32;
    (code, T::of(code as f64 * lsb))
}

/// The crossbar in its socket plus the configurable signal path.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossbarFixture<T> {
    cells: Vec<Cell<T>>,
    wl_route: [MuxSource; ROWS],
    sl_route: [MuxSource; ROWS],
    bl_route: [MuxSource; COLS],
    dac: [DacChannel; DAC_CHANNELS],
    tia: [TiaConfig<T>; COLS],
    gain_error: T,
}

// DAC channel assignment used by the drive/measure choreography.
const CH_WL: usize = 0;
const CH_GATE: usize = 1;
const CH_BL: usize = 2;

impl<T: Real> CrossbarFixture<T> {
    /// Build a fixture from `ROWS · COLS` cells in row-major order.
    /// `gain_error` is the fixture's relative sense-path gain error.
    pub fn from_cells(cells: Vec<Cell<T>>, gain_error: T) -> Result<Self, FrontendError> {
        if cells.len() != ROWS * COLS {
            return Err(FrontendError::Parameter("cell grid must be 12x7"));
        }
        if gain_error.abs().as_f64() > GAIN_ERROR_BOUND {
            return Err(FrontendError::Parameter("gain error outside the modeled bound"));
        }
        let mut fixture = CrossbarFixture {
            cells,
            wl_route: [MuxSource::Ground; ROWS],
            sl_route: [MuxSource::Ground; ROWS],
            bl_route: [MuxSource::Ground; COLS],
            dac: [DacChannel::ZERO; DAC_CHANNELS],
            tia: [TiaConfig::max_range(); COLS],
            gain_error,
        };
        fixture.reset_frontend();
        Ok(fixture)
    }

    /// Clear the DAC, route every mux to ground and put every TIA on its
    /// highest range. Idempotent.
    pub fn reset_frontend(&mut self) {
        self.dac = [DacChannel::ZERO; DAC_CHANNELS];
        self.wl_route = [MuxSource::Ground; ROWS];
        self.sl_route = [MuxSource::Ground; ROWS];
        self.bl_route = [MuxSource::Ground; COLS];
        self.tia = [TiaConfig::max_range(); COLS];
    }

    pub fn gain_error(&self) -> T {
        self.gain_error
    }

    pub fn cell(&self, sl: usize, bl: usize) -> Result<&Cell<T>, FrontendError> {
        if sl >= ROWS || bl >= COLS {
            return Err(FrontendError::Address);
        }
        Ok(&self.cells[sl * COLS + bl])
    }

    pub fn cell_mut(&mut self, sl: usize, bl: usize) -> Result<&mut Cell<T>, FrontendError> {
        if sl >= ROWS || bl >= COLS {
            return Err(FrontendError::Address);
        }
        Ok(&mut self.cells[sl * COLS + bl])
    }

    pub fn route(&mut self, pin: Pin, source: MuxSource) -> Result<(), FrontendError> {
        if let MuxSource::Dac(ch) = source {
            if ch > 4 {
                return Err(FrontendError::Parameter("mux DAC input out of range"));
            }
        }
        match pin {
            Pin::Wl(r) if r < ROWS => {
                if source == MuxSource::Sense {
                    return Err(FrontendError::Parameter("sense path only reaches south pins"));
                }
                self.wl_route[r] = source;
            }
            Pin::Sl(r) if r < ROWS => {
                if source == MuxSource::Sense {
                    return Err(FrontendError::Parameter("sense path only reaches south pins"));
                }
                self.sl_route[r] = source;
            }
            Pin::Bl(c) if c < COLS => self.bl_route[c] = source,
            _ => return Err(FrontendError::Address),
        }
        Ok(())
    }

    pub fn route_selector(&mut self, pin: Pin, selector: u8) -> Result<(), FrontendError> {
        self.route(pin, MuxSource::from_selector(selector)?)
    }

    pub fn routing(&self, pin: Pin) -> Result<MuxSource, FrontendError> {
        match pin {
            Pin::Wl(r) if r < ROWS => Ok(self.wl_route[r]),
            Pin::Sl(r) if r < ROWS => Ok(self.sl_route[r]),
            Pin::Bl(c) if c < COLS => Ok(self.bl_route[c]),
            _ => Err(FrontendError::Address),
        }
    }

    pub fn set_dac(&mut self, channel: usize, value: DacChannel) -> Result<(), FrontendError> {
        if channel >= DAC_CHANNELS {
            return Err(FrontendError::Parameter("DAC channel out of range"));
        }
        if value.code > DAC_MAX_CODE {
            return Err(FrontendError::Parameter("DAC code out of range"));
        }
        self.dac[channel] = value;
        Ok(())
    }

    pub fn dac_channel(&self, channel: usize) -> Result<DacChannel, FrontendError> {
        self.dac
            .get(channel)
            .copied()
            .ok_or(FrontendError::Parameter("DAC channel out of range"))
    }

    pub fn tia_config(&self, bl: usize) -> Result<TiaConfig<T>, FrontendError> {
        if bl >= COLS {
            return Err(FrontendError::Address);
        }
        Ok(self.tia[bl])
    }

    pub fn set_tia(&mut self, bl: usize, config: TiaConfig<T>) -> Result<(), FrontendError> {
        if bl >= COLS {
            return Err(FrontendError::Address);
        }
        self.tia[bl] = config;
        Ok(())
    }

    /// Potential a pin is driven to by its routed source. Ground, the
    /// external line (unconnected) and the sense virtual ground all read 0.
    pub fn pin_potential(&self, pin: Pin) -> Result<T, FrontendError> {
        let source = self.routing(pin)?;
        Ok(match source {
            MuxSource::Dac(ch) => {
                let d = self.dac[ch as usize];
                let v: T = dac_code_to_voltage(d.code).expect("stored codes are valid");
                if d.inverted {
                    -v
                } else {
                    v
                }
            }
            MuxSource::Ground | MuxSource::External | MuxSource::Sense => T::zero(),
        })
    }

    /// Apply one pulse to exactly the addressed cell: requested voltages
    /// are quantized onto the DAC grid, the addressed row is selected and
    /// every other row's gate is grounded.
    pub fn drive_cell(
        &mut self,
        sl: usize,
        bl: usize,
        v_wl: T,
        v_bl: T,
        v_gate: T,
        duration: T,
    ) -> Result<PulseOutcome<T>, FrontendError> {
        if sl >= ROWS || bl >= COLS {
            return Err(FrontendError::Address);
        }
        if !(duration > T::zero()) {
            return Err(FrontendError::Parameter("pulse duration must be positive"));
        }
        let (wl_dac, wl_q) = dac_quantize_signed(v_wl)?;
        let (bl_dac, bl_q) = dac_quantize_signed(v_bl)?;
        let (gate_dac, gate_q) = dac_quantize_signed(v_gate)?;
        self.dac[CH_WL] = wl_dac;
        self.dac[CH_GATE] = gate_dac;
        self.dac[CH_BL] = bl_dac;
        for r in 0..ROWS {
            self.wl_route[r] = MuxSource::Ground;
            self.sl_route[r] = MuxSource::Ground;
        }
        self.wl_route[sl] = MuxSource::Dac(CH_WL as u8);
        self.sl_route[sl] = MuxSource::Dac(CH_GATE as u8);
        self.bl_route[bl] = MuxSource::Dac(CH_BL as u8);
        let pulse = PulseSpec { v_wl: wl_q, v_bl: bl_q, v_gate: gate_q, duration };
        self.cells[sl * COLS + bl]
            .apply_pulse(&pulse)
            .map_err(|_| FrontendError::Parameter("pulse out of range"))
    }

    /// Total current flowing out of a bit line under the present routing.
    /// Each row contributes its cell's read current at that row's word-line
    /// and gate potentials; deselected rows contribute exactly zero.
    pub fn bl_current(&mut self, bl: usize) -> Result<T, FrontendError> {
        if bl >= COLS {
            return Err(FrontendError::Address);
        }
        let mut total = T::zero();
        for r in 0..ROWS {
            let v_wl = self.pin_potential(Pin::Wl(r))?;
            let v_gate = self.pin_potential(Pin::Sl(r))?;
            total += self.cells[r * COLS + bl].sense_current(v_wl, v_gate);
        }
        Ok(total)
    }

    /// Run a bit-line current through the active TIA and the ADC, with the
    /// fixture's gain error applied. Returns the reconstruction.
    fn sense_chain(&self, bl: usize, i_true: T) -> AdcReading<T> {
        let cfg = self.tia[bl];
        let v_out = i_true * cfg.feedback_ohms * cfg.gain * (T::one() + self.gain_error);
        let (code, volts) = adc_quantize(v_out);
        AdcReading { code, volts, amps: volts / (cfg.feedback_ohms * cfg.gain) }
    }

    /// Measure the current of one addressed cell: route the cell for
    /// reading, take a coarse pass on the safest (smallest) feedback
    /// resistor, auto-range from the coarse estimate and take the final
    /// pass on the selected range.
    pub fn measure_bl_current(
        &mut self,
        bl: usize,
        v_read: T,
        v_gate: T,
        sl: usize,
    ) -> Result<AdcReading<T>, FrontendError> {
        if sl >= ROWS || bl >= COLS {
            return Err(FrontendError::Address);
        }
        let (wl_dac, _) = dac_quantize_signed(v_read)?;
        let (gate_dac, _) = dac_quantize_signed(v_gate)?;
        self.dac[CH_WL] = wl_dac;
        self.dac[CH_GATE] = gate_dac;
        for r in 0..ROWS {
            self.wl_route[r] = MuxSource::Ground;
            self.sl_route[r] = MuxSource::Ground;
        }
        self.wl_route[sl] = MuxSource::Dac(CH_WL as u8);
        self.sl_route[sl] = MuxSource::Dac(CH_GATE as u8);
        self.bl_route[bl] = MuxSource::Sense;

        // Coarse pass: 43 Ω handles anything the DAC can push through a cell.
        self.tia[bl] = TiaConfig::new(TIA_LADDER_OHMS[0]);
        let coarse = self.bl_current(bl)?;
        let coarse_reading = self.sense_chain(bl, coarse);
        let rail = (1i64 << (ADC_BITS - 1)) as i32;
        if coarse_reading.code >= rail - 1 || coarse_reading.code <= -rail {
            // Railed even on the smallest feedback resistor.
            return Err(FrontendError::Saturated);
        }
        let (cfg, saturated) = tia_autorange(coarse_reading.amps.abs());
        if saturated {
            return Err(FrontendError::Saturated);
        }
        self.tia[bl] = cfg;
        let fine = self.bl_current(bl)?;
        Ok(self.sense_chain(bl, fine))
    }

    /// Noiseless lower bound on the verify current of the addressed cell,
    /// at the same quantized voltages a measurement would use.
    pub fn hrs_floor_current(
        &self,
        sl: usize,
        bl: usize,
        v_read: T,
        v_gate: T,
    ) -> Result<T, FrontendError> {
        if sl >= ROWS || bl >= COLS {
            return Err(FrontendError::Address);
        }
        let (_, v_read_q) = dac_quantize_signed(v_read)?;
        let (_, v_gate_q) = dac_quantize_signed(v_gate)?;
        Ok(self.cells[sl * COLS + bl].hrs_floor_current(v_read_q, v_gate_q))
    }
}
