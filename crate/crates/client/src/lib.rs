//! Host-side client for the crossbar rig: typed cell operations over the
//! framed protocol, campaign automation, dataset handling and report
//! generation.

pub mod campaign;
pub mod report;

use memrig_core::frontend::{COLS, ROWS};
use memrig_core::program::IspvaParams;
use memrig_proto::{
    encode_request, Deframer, ErrorCode, Event, FrameError, Message, ProgramKind,
    ProgramRequest, ProgramResponse, ReadRequest, Request, Response,
};
use std::io::{Read, Write};
use std::net::TcpStream;
use std::time::Duration;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("cell ({0}, {1}) is outside the 12x7 grid")]
    Address(u8, u8),
    #[error("corrupt frame from server: {0:?}")]
    Frame(FrameError),
    #[error("device rejected the request ({code:?}): {detail}")]
    Device { code: ErrorCode, detail: String },
    #[error("sense path saturated")]
    Saturated,
    #[error("unexpected message from server")]
    Protocol,
    #[error("server closed the connection")]
    Disconnected,
    #[error("csv: {0}")]
    Csv(String),
}

/// A cell coordinate on the 12×7 grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellAddress {
    pub sl: u8,
    pub bl: u8,
}

impl CellAddress {
    pub fn new(sl: u8, bl: u8) -> Result<Self, ClientError> {
        if sl as usize >= ROWS || bl as usize >= COLS {
            return Err(ClientError::Address(sl, bl));
        }
        Ok(CellAddress { sl, bl })
    }

    pub fn all() -> Vec<CellAddress> {
        let mut cells = Vec::with_capacity(ROWS * COLS);
        for sl in 0..ROWS as u8 {
            for bl in 0..COLS as u8 {
                cells.push(CellAddress { sl, bl });
            }
        }
        cells
    }
}

impl std::fmt::Display for CellAddress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.sl, self.bl)
    }
}

/// Stock operation recipes; the field values are the instrument defaults
/// (form gate 1.8 V / 80 µA, set gate 1.5 V / 80 µA, reset gate 2.7 V /
/// 5 µA, read gate 1.5 V).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClientConfig {
    pub form: IspvaParams,
    pub set: IspvaParams,
    pub reset: IspvaParams,
    pub v_gate_read_mv: u16,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            form: IspvaParams::form_defaults(),
            set: IspvaParams::set_defaults(),
            reset: IspvaParams::reset_defaults(),
            v_gate_read_mv: 1500,
        }
    }
}

/// Per-call deviations from the configured recipe.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProgramOverrides {
    pub v_gate_mv: Option<u16>,
    pub i_target_na: Option<u32>,
    pub v_gate_read_mv: Option<u16>,
    pub v_start_mv: Option<u16>,
    pub v_step_mv: Option<u16>,
    pub v_stop_mv: Option<u16>,
    pub t_pulse_us: Option<u32>,
}

impl ProgramOverrides {
    fn apply(&self, base: &IspvaParams) -> IspvaParams {
        IspvaParams {
            mode: base.mode,
            v_start_mv: self.v_start_mv.unwrap_or(base.v_start_mv),
            v_step_mv: self.v_step_mv.unwrap_or(base.v_step_mv),
            v_stop_mv: self.v_stop_mv.unwrap_or(base.v_stop_mv),
            t_pulse_us: self.t_pulse_us.unwrap_or(base.t_pulse_us),
            v_gate_mv: self.v_gate_mv.unwrap_or(base.v_gate_mv),
            v_gate_read_mv: self.v_gate_read_mv.unwrap_or(base.v_gate_read_mv),
            v_verify_mv: base.v_verify_mv,
            i_target_na: self.i_target_na.unwrap_or(base.i_target_na),
        }
    }
}

/// Synchronous single-connection client. Every call is one request and
/// exactly one response; calls never interleave.
pub struct Client {
    stream: TcpStream,
    deframer: Deframer,
    pub config: ClientConfig,
}

impl Client {
    pub fn connect(addr: &str) -> Result<Self, ClientError> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        stream.set_read_timeout(Some(Duration::from_secs(30)))?;
        Ok(Client { stream, deframer: Deframer::new(), config: ClientConfig::default() })
    }

    pub fn ping(&mut self) -> Result<u16, ClientError> {
        match self.roundtrip(&Request::Ping)? {
            Response::Pong { fw_version } => Ok(fw_version),
            _ => Err(ClientError::Protocol),
        }
    }

    pub fn form_cell(
        &mut self,
        addr: CellAddress,
        overrides: &ProgramOverrides,
    ) -> Result<ProgramResponse, ClientError> {
        let params = overrides.apply(&self.config.form.clone());
        self.program(ProgramKind::Form, addr, &params)
    }

    pub fn set_cell(
        &mut self,
        addr: CellAddress,
        overrides: &ProgramOverrides,
    ) -> Result<ProgramResponse, ClientError> {
        let params = overrides.apply(&self.config.set.clone());
        self.program(ProgramKind::Set, addr, &params)
    }

    pub fn reset_cell(
        &mut self,
        addr: CellAddress,
        overrides: &ProgramOverrides,
    ) -> Result<ProgramResponse, ClientError> {
        let params = overrides.apply(&self.config.reset.clone());
        self.program(ProgramKind::Reset, addr, &params)
    }

    /// Measured cell current in nA; negative read voltages yield negative
    /// currents.
    pub fn read_cell_na(&mut self, addr: CellAddress, v_read_mv: i16) -> Result<i32, ClientError> {
        CellAddress::new(addr.sl, addr.bl)?;
        let req = Request::Read(ReadRequest {
            sl: addr.sl,
            bl: addr.bl,
            v_gate_read_mv: self.config.v_gate_read_mv,
            v_read_mv,
        });
        match self.roundtrip(&req)? {
            Response::Read(r) => Ok(r.i_na),
            Response::Error(e) => Err(device_error(e)),
            _ => Err(ClientError::Protocol),
        }
    }

    /// Measured cell current in amps.
    pub fn read_cell(&mut self, addr: CellAddress, v_read_mv: i16) -> Result<f64, ClientError> {
        Ok(self.read_cell_na(addr, v_read_mv)? as f64 * 1e-9)
    }

    fn program(
        &mut self,
        kind: ProgramKind,
        addr: CellAddress,
        params: &IspvaParams,
    ) -> Result<ProgramResponse, ClientError> {
        CellAddress::new(addr.sl, addr.bl)?;
        let req = Request::Program(ProgramRequest {
            kind,
            sl: addr.sl,
            bl: addr.bl,
            v_gate_mv: params.v_gate_mv,
            i_target_na: params.i_target_na,
            v_gate_read_mv: params.v_gate_read_mv,
            v_start_mv: params.v_start_mv,
            v_step_mv: params.v_step_mv,
            v_stop_mv: params.v_stop_mv,
            t_pulse_us: params.t_pulse_us,
        });
        match self.roundtrip(&req)? {
            Response::Program(p) if p.kind == kind => Ok(p),
            Response::Error(e) => Err(device_error(e)),
            _ => Err(ClientError::Protocol),
        }
    }

    fn roundtrip(&mut self, req: &Request) -> Result<Response, ClientError> {
        self.stream.write_all(&encode_request(req))?;
        self.stream.flush()?;
        let mut buf = [0u8; 4096];
        loop {
            let n = self.stream.read(&mut buf)?;
            if n == 0 {
                return Err(ClientError::Disconnected);
            }
            let mut events = self.deframer.feed(&buf[..n]);
            if events.is_empty() {
                continue;
            }
            if events.len() > 1 {
                return Err(ClientError::Protocol);
            }
            return match events.pop().unwrap() {
                Event::Message(Message::Response(resp)) => Ok(resp),
                Event::Message(Message::Request(_)) => Err(ClientError::Protocol),
                Event::Corrupt(e) => Err(ClientError::Frame(e)),
            };
        }
    }
}

fn device_error(e: memrig_proto::ErrorResponse) -> ClientError {
    if e.code == ErrorCode::DeviceSaturated {
        ClientError::Saturated
    } else {
        ClientError::Device { code: e.code, detail: e.detail }
    }
}
