//! Control-board firmware emulator: boot-time setup, then a strictly
//! serial receive → process → respond loop over a byte transport.
//!
//! The firmware owns the programming algorithms; hosts send targets and
//! ramps, never raw pulse trains. Every request produces exactly one
//! response, and firmware state after any command sequence is a pure
//! function of (chip profile, seed, command sequence).

pub mod serve;

use memrig_core::frontend::{FrontendError, COLS, ROWS};
use memrig_core::program::{self, IspvaParams, ProgramError, ProgramMode, MAX_RAMP_PULSES};
use memrig_core::CrossbarFixture;
use memrig_proto::{
    ErrorCode, ErrorResponse, ProgramKind, ProgramRequest, ProgramResponse, ReadRequest,
    ReadResponse, Request, Response,
};

pub const FW_VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Boot,
    Ready,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counters {
    pub requests: u64,
    pub errors: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Firmware {
    fixture: CrossbarFixture,
    phase: Phase,
    pub stats: Counters,
}

impl Firmware {
    /// Fixture plugged in, nothing initialized yet.
    pub fn new(fixture: CrossbarFixture) -> Self {
        Firmware { fixture, phase: Phase::Boot, stats: Counters::default() }
    }

    /// Boot a fixture: clear the DAC, route every mux to ground, put every
    /// TIA on its highest range, then accept commands.
    pub fn setup(fixture: CrossbarFixture) -> Self {
        let mut fw = Self::new(fixture);
        fw.run_setup();
        fw
    }

    /// The setup routine itself; running it again is a no-op state-wise.
    pub fn run_setup(&mut self) {
        self.fixture.reset_frontend();
        self.phase = Phase::Ready;
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn fixture(&self) -> &CrossbarFixture {
        &self.fixture
    }

    pub fn fixture_mut(&mut self) -> &mut CrossbarFixture {
        &mut self.fixture
    }

    /// Process one decoded request into exactly one response.
    pub fn handle_request(&mut self, req: &Request) -> Response {
        self.stats.requests += 1;
        let resp = match req {
            _ if self.phase != Phase::Ready => Response::Error(ErrorResponse::new(
                ErrorCode::BadFrame,
                "controller not ready",
            )),
            Request::Ping => Response::Pong { fw_version: FW_VERSION },
            Request::Read(r) => self.handle_read(r),
            Request::Program(p) => self.handle_program(p),
        };
        if matches!(resp, Response::Error(_)) {
            self.stats.errors += 1;
        }
        resp
    }

    fn handle_read(&mut self, r: &ReadRequest) -> Response {
        if r.sl as usize >= ROWS || r.bl as usize >= COLS {
            return Response::Error(ErrorResponse::new(ErrorCode::AddressError, "no such cell"));
        }
        if r.v_read_mv.unsigned_abs() > 5000 || r.v_gate_read_mv > 5000 {
            return Response::Error(ErrorResponse::new(
                ErrorCode::InvalidField,
                "voltage exceeds the 5 V full scale",
            ));
        }
        let v_read = r.v_read_mv as f64 * 1e-3;
        let v_gate = r.v_gate_read_mv as f64 * 1e-3;
        match self.fixture.measure_bl_current(r.bl as usize, v_read, v_gate, r.sl as usize) {
            Ok(reading) => {
                let i_na = (reading.amps * 1e9)
                    .round()
                    .clamp(i32::MIN as f64, i32::MAX as f64) as i32;
                Response::Read(ReadResponse { status: 0, i_na })
            }
            Err(FrontendError::Saturated) => Response::Error(ErrorResponse::new(
                ErrorCode::DeviceSaturated,
                "sense path saturated",
            )),
            Err(FrontendError::Address) => {
                Response::Error(ErrorResponse::new(ErrorCode::AddressError, "no such cell"))
            }
            Err(FrontendError::Parameter(msg)) => {
                Response::Error(ErrorResponse::new(ErrorCode::InvalidField, msg))
            }
        }
    }

    fn handle_program(&mut self, p: &ProgramRequest) -> Response {
        if p.sl as usize >= ROWS || p.bl as usize >= COLS {
            return Response::Error(ErrorResponse::new(ErrorCode::AddressError, "no such cell"));
        }
        let mode = match p.kind {
            ProgramKind::Form => ProgramMode::Form,
            ProgramKind::Set => ProgramMode::Set,
            ProgramKind::Reset => ProgramMode::Reset,
        };
        let params = IspvaParams {
            mode,
            v_start_mv: p.v_start_mv,
            v_step_mv: p.v_step_mv,
            v_stop_mv: p.v_stop_mv,
            t_pulse_us: p.t_pulse_us,
            v_gate_mv: p.v_gate_mv,
            v_gate_read_mv: p.v_gate_read_mv,
            v_verify_mv: program::V_VERIFY_MV,
            i_target_na: p.i_target_na,
        };
        match program::ispva(&mut self.fixture, p.sl as usize, p.bl as usize, &params) {
            Ok(result) => {
                debug_assert!(result.pulses <= MAX_RAMP_PULSES);
                Response::Program(ProgramResponse {
                    kind: p.kind,
                    status: match result.status {
                        program::ProgramStatus::Ok => memrig_proto::ProgramStatus::Ok,
                        program::ProgramStatus::TargetNotReached => {
                            memrig_proto::ProgramStatus::TargetNotReached
                        }
                        program::ProgramStatus::CellBroken => {
                            memrig_proto::ProgramStatus::CellBroken
                        }
                    },
                    pulses: result.pulses.min(u8::MAX as u32) as u8,
                    final_v_mv: result.final_v_mv,
                    final_i_na: result.final_i_na,
                })
            }
            Err(ProgramError::Invalid(msg)) => {
                Response::Error(ErrorResponse::new(ErrorCode::InvalidField, msg))
            }
            Err(ProgramError::Frontend(FrontendError::Address)) => {
                Response::Error(ErrorResponse::new(ErrorCode::AddressError, "no such cell"))
            }
            Err(ProgramError::Frontend(FrontendError::Saturated)) => Response::Error(
                ErrorResponse::new(ErrorCode::DeviceSaturated, "sense path saturated"),
            ),
            Err(ProgramError::Frontend(FrontendError::Parameter(msg))) => {
                Response::Error(ErrorResponse::new(ErrorCode::InvalidField, msg))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use memrig_core::frontend::{MuxSource, Pin, TIA_LADDER_OHMS};
    use memrig_core::profile::ChipProfile;

    fn booted() -> Firmware {
        let fixture = ChipProfile::default().build_fixture(None).unwrap();
        Firmware::setup(fixture)
    }

    #[test]
    fn setup_grounds_everything() {
        let fw = booted();
        for r in 0..ROWS {
            assert_eq!(fw.fixture().routing(Pin::Wl(r)).unwrap(), MuxSource::Ground);
            assert_eq!(fw.fixture().routing(Pin::Sl(r)).unwrap(), MuxSource::Ground);
            assert_eq!(fw.fixture().pin_potential(Pin::Wl(r)).unwrap(), 0.0);
        }
        for c in 0..COLS {
            assert_eq!(fw.fixture().routing(Pin::Bl(c)).unwrap(), MuxSource::Ground);
            let tia = fw.fixture().tia_config(c).unwrap();
            assert_eq!(tia.feedback_ohms, *TIA_LADDER_OHMS.last().unwrap());
        }
        assert_eq!(fw.phase(), Phase::Ready);
    }

    #[test]
    fn setup_is_idempotent() {
        let a = booted();
        let mut b = a.clone();
        b.run_setup();
        assert_eq!(a, b);
    }

    #[test]
    fn boot_phase_rejects_commands() {
        let fixture = ChipProfile::default().build_fixture(None).unwrap();
        let mut fw = Firmware::new(fixture);
        let resp = fw.handle_request(&Request::Ping);
        assert!(matches!(resp, Response::Error(e) if e.code == ErrorCode::BadFrame));
    }

    #[test]
    fn ping_pongs() {
        let mut fw = booted();
        assert_eq!(
            fw.handle_request(&Request::Ping),
            Response::Pong { fw_version: FW_VERSION }
        );
        assert_eq!(fw.stats.requests, 1);
        assert_eq!(fw.stats.errors, 0);
    }

    #[test]
    fn read_on_deselected_gate_is_zero() {
        let mut fw = booted();
        let resp = fw.handle_request(&Request::Read(ReadRequest {
            sl: 0,
            bl: 0,
            v_gate_read_mv: 0,
            v_read_mv: 200,
        }));
        assert_eq!(resp, Response::Read(ReadResponse { status: 0, i_na: 0 }));
    }

    #[test]
    fn address_and_field_errors() {
        let mut fw = booted();
        let mut req = ProgramRequest {
            kind: ProgramKind::Form,
            sl: 200,
            bl: 0,
            v_gate_mv: 1800,
            i_target_na: 80_000,
            v_gate_read_mv: 1500,
            v_start_mv: 2000,
            v_step_mv: 100,
            v_stop_mv: 3200,
            t_pulse_us: 10,
        };
        let resp = fw.handle_request(&Request::Program(req));
        assert!(matches!(resp, Response::Error(e) if e.code == ErrorCode::AddressError));
        req.sl = 0;
        req.v_step_mv = 0;
        let resp = fw.handle_request(&Request::Program(req));
        assert!(matches!(resp, Response::Error(e) if e.code == ErrorCode::InvalidField));
        let resp = fw.handle_request(&Request::Read(ReadRequest {
            sl: 0,
            bl: 9,
            v_gate_read_mv: 1500,
            v_read_mv: 200,
        }));
        assert!(matches!(resp, Response::Error(e) if e.code == ErrorCode::AddressError));
        assert_eq!(fw.stats.errors, 3);
    }

    #[test]
    fn form_then_set_reaches_the_target() {
        let mut fw = booted();
        let form = ProgramRequest {
            kind: ProgramKind::Form,
            sl: 1,
            bl: 5,
            v_gate_mv: 1800,
            i_target_na: 80_000,
            v_gate_read_mv: 1500,
            v_start_mv: 2000,
            v_step_mv: 100,
            v_stop_mv: 3200,
            t_pulse_us: 10,
        };
        let resp = fw.handle_request(&Request::Program(form));
        let Response::Program(p) = resp else { panic!("expected program response") };
        assert_eq!(p.status, memrig_proto::ProgramStatus::Ok);

        let set = ProgramRequest {
            kind: ProgramKind::Set,
            sl: 1,
            bl: 5,
            v_gate_mv: 1500,
            i_target_na: 80_000,
            v_gate_read_mv: 1500,
            v_start_mv: 500,
            v_step_mv: 100,
            v_stop_mv: 2000,
            t_pulse_us: 10,
        };
        let resp = fw.handle_request(&Request::Program(set));
        let Response::Program(p) = resp else { panic!("expected program response") };
        assert_eq!(p.status, memrig_proto::ProgramStatus::Ok);
        assert!(p.final_i_na >= 80_000, "final {} nA", p.final_i_na);
        assert_eq!(p.kind, ProgramKind::Set);
    }

    #[test]
    fn replay_is_deterministic() {
        let run = || {
            let mut fw = booted();
            let mut outputs = Vec::new();
            let form = ProgramRequest {
                kind: ProgramKind::Form,
                sl: 0,
                bl: 0,
                v_gate_mv: 1800,
                i_target_na: 80_000,
                v_gate_read_mv: 1500,
                v_start_mv: 2000,
                v_step_mv: 100,
                v_stop_mv: 3200,
                t_pulse_us: 10,
            };
            outputs.push(fw.handle_request(&Request::Program(form)));
            for _ in 0..20 {
                outputs.push(fw.handle_request(&Request::Read(ReadRequest {
                    sl: 0,
                    bl: 0,
                    v_gate_read_mv: 1500,
                    v_read_mv: 200,
                })));
            }
            outputs
        };
        assert_eq!(run(), run());
    }
}
