//! Logical messages and their payload layouts.
//!
//! All integers little-endian, fixed field order, units as named:
//!
//! | type | message       | payload                                             |
//! |------|---------------|-----------------------------------------------------|
//! | 0x01 | FORM_REQ      | sl u8, bl u8, v_gate mV u16, i_target nA u32,       |
//! | 0x02 | SET_REQ       |   v_gate_read mV u16, v_start mV u16, v_step mV u16,|
//! | 0x03 | RESET_REQ     |   v_stop mV u16, t_pulse µs u32                     |
//! | 0x04 | READ_REQ      | sl u8, bl u8, v_gate_read mV u16, v_read mV i16     |
//! | 0x05 | PING_REQ      | (empty)                                             |
//! | 0x81 | FORM_RESP     | status u8, pulses u8, final_v mV u16, final_i nA u32|
//! | 0x82 | SET_RESP      |   (same layout)                                     |
//! | 0x83 | RESET_RESP    |   (same layout)                                     |
//! | 0x84 | READ_RESP     | status u8, i nA i32                                 |
//! | 0x85 | PONG          | firmware version u16                                |
//! | 0xFF | ERROR_RESP    | code u8, detail_len u8, detail ASCII                |

use crate::crc::crc16;
use crate::{MAGIC, VERSION};

/// Programming operation selected by a request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProgramKind {
    Form,
    Set,
    Reset,
}

impl ProgramKind {
    pub fn request_type(self) -> u8 {
        match self {
            ProgramKind::Form => 0x01,
            ProgramKind::Set => 0x02,
            ProgramKind::Reset => 0x03,
        }
    }

    pub fn response_type(self) -> u8 {
        self.request_type() | 0x80
    }
}

/// FORM/SET/RESET request body. The firmware owns the programming loop;
/// the host only supplies the ramp and targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgramRequest {
    pub kind: ProgramKind,
    pub sl: u8,
    pub bl: u8,
    pub v_gate_mv: u16,
    pub i_target_na: u32,
    pub v_gate_read_mv: u16,
    pub v_start_mv: u16,
    pub v_step_mv: u16,
    pub v_stop_mv: u16,
    pub t_pulse_us: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReadRequest {
    pub sl: u8,
    pub bl: u8,
    pub v_gate_read_mv: u16,
    pub v_read_mv: i16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Request {
    Program(ProgramRequest),
    Read(ReadRequest),
    Ping,
}

/// Programming outcome carried by FORM/SET/RESET responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProgramStatus {
    Ok,
    TargetNotReached,
    CellBroken,
}

impl ProgramStatus {
    pub fn to_u8(self) -> u8 {
        match self {
            ProgramStatus::Ok => 0,
            ProgramStatus::TargetNotReached => 1,
            ProgramStatus::CellBroken => 2,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(ProgramStatus::Ok),
            1 => Some(ProgramStatus::TargetNotReached),
            2 => Some(ProgramStatus::CellBroken),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgramResponse {
    pub kind: ProgramKind,
    pub status: ProgramStatus,
    pub pulses: u8,
    pub final_v_mv: u16,
    pub final_i_na: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReadResponse {
    pub status: u8,
    pub i_na: i32,
}

/// Error taxonomy for ERROR_RESP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    BadFrame = 1,
    UnknownType = 2,
    InvalidField = 3,
    AddressError = 4,
    DeviceSaturated = 5,
}

impl ErrorCode {
    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            1 => Some(ErrorCode::BadFrame),
            2 => Some(ErrorCode::UnknownType),
            3 => Some(ErrorCode::InvalidField),
            4 => Some(ErrorCode::AddressError),
            5 => Some(ErrorCode::DeviceSaturated),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorResponse {
    pub code: ErrorCode,
    /// ASCII detail, at most 255 bytes.
    pub detail: String,
}

impl ErrorResponse {
    pub fn new(code: ErrorCode, detail: impl Into<String>) -> Self {
        ErrorResponse { code, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Response {
    Program(ProgramResponse),
    Read(ReadResponse),
    Pong { fw_version: u16 },
    Error(ErrorResponse),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Message {
    Request(Request),
    Response(Response),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("error detail longer than 255 bytes")]
    DetailTooLong,
    #[error("error detail is not ASCII")]
    DetailNotAscii,
}

fn msg_type(msg: &Message) -> u8 {
    match msg {
        Message::Request(Request::Program(p)) => p.kind.request_type(),
        Message::Request(Request::Read(_)) => 0x04,
        Message::Request(Request::Ping) => 0x05,
        Message::Response(Response::Program(p)) => p.kind.response_type(),
        Message::Response(Response::Read(_)) => 0x84,
        Message::Response(Response::Pong { .. }) => 0x85,
        Message::Response(Response::Error(_)) => 0xFF,
    }
}

fn payload(msg: &Message) -> Result<Vec<u8>, EncodeError> {
    let mut out = Vec::new();
    match msg {
        Message::Request(Request::Program(p)) => {
            out.push(p.sl);
            out.push(p.bl);
            out.extend_from_slice(&p.v_gate_mv.to_le_bytes());
            out.extend_from_slice(&p.i_target_na.to_le_bytes());
            out.extend_from_slice(&p.v_gate_read_mv.to_le_bytes());
            out.extend_from_slice(&p.v_start_mv.to_le_bytes());
            out.extend_from_slice(&p.v_step_mv.to_le_bytes());
            out.extend_from_slice(&p.v_stop_mv.to_le_bytes());
            out.extend_from_slice(&p.t_pulse_us.to_le_bytes());
        }
        Message::Request(Request::Read(r)) => {
            out.push(r.sl);
            out.push(r.bl);
            out.extend_from_slice(&r.v_gate_read_mv.to_le_bytes());
            out.extend_from_slice(&r.v_read_mv.to_le_bytes());
        }
        Message::Request(Request::Ping) => {}
        Message::Response(Response::Program(p)) => {
            out.push(p.status.to_u8());
            out.push(p.pulses);
            out.extend_from_slice(&p.final_v_mv.to_le_bytes());
            out.extend_from_slice(&p.final_i_na.to_le_bytes());
        }
        Message::Response(Response::Read(r)) => {
            out.push(r.status);
            out.extend_from_slice(&r.i_na.to_le_bytes());
        }
        Message::Response(Response::Pong { fw_version }) => {
            out.extend_from_slice(&fw_version.to_le_bytes());
        }
        Message::Response(Response::Error(e)) => {
            if e.detail.len() > 255 {
                return Err(EncodeError::DetailTooLong);
            }
            if !e.detail.is_ascii() {
                return Err(EncodeError::DetailNotAscii);
            }
            out.push(e.code as u8);
            out.push(e.detail.len() as u8);
            out.extend_from_slice(e.detail.as_bytes());
        }
    }
    Ok(out)
}

/// Encode a message into one complete frame.
pub fn encode(msg: &Message) -> Result<Vec<u8>, EncodeError> {
    let body = payload(msg)?;
    debug_assert!(body.len() <= crate::MAX_PAYLOAD);
    let mut out = Vec::with_capacity(8 + body.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(msg_type(msg));
    out.extend_from_slice(&(body.len() as u16).to_le_bytes());
    out.extend_from_slice(&body);
    let crc = crc16(&out[2..]);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

pub fn encode_request(req: &Request) -> Vec<u8> {
    // Request payloads are fixed-size; encoding cannot fail.
    encode(&Message::Request(*req)).expect("request encoding is infallible")
}

pub fn encode_response(resp: &Response) -> Result<Vec<u8>, EncodeError> {
    encode(&Message::Response(resp.clone()))
}

pub(crate) struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(data: &'a [u8]) -> Self {
        Cursor { data, pos: 0 }
    }

    fn u8(&mut self) -> Option<u8> {
        let v = *self.data.get(self.pos)?;
        self.pos += 1;
        Some(v)
    }

    fn u16(&mut self) -> Option<u16> {
        let b = self.data.get(self.pos..self.pos + 2)?;
        self.pos += 2;
        Some(u16::from_le_bytes([b[0], b[1]]))
    }

    fn i16(&mut self) -> Option<i16> {
        self.u16().map(|v| v as i16)
    }

    fn u32(&mut self) -> Option<u32> {
        let b = self.data.get(self.pos..self.pos + 4)?;
        self.pos += 4;
        Some(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn i32(&mut self) -> Option<i32> {
        self.u32().map(|v| v as i32)
    }

    fn exhausted(&self) -> bool {
        self.pos == self.data.len()
    }
}

/// Result of decoding a checked payload.
pub(crate) enum PayloadDecode {
    Ok(Message),
    UnknownType,
    BadLayout,
}

/// Decode the payload of a frame whose CRC already checked out.
///
/// Exposed so tests can drive it directly; normal traffic goes through
/// [`crate::Deframer`].
pub fn decode_payload(msg_type: u8, body: &[u8]) -> Result<Option<Message>, ()> {
    match decode_payload_inner(msg_type, body) {
        PayloadDecode::Ok(m) => Ok(Some(m)),
        PayloadDecode::UnknownType => Ok(None),
        PayloadDecode::BadLayout => Err(()),
    }
}

pub(crate) fn decode_payload_inner(msg_type: u8, body: &[u8]) -> PayloadDecode {
    let mut c = Cursor::new(body);
    let msg = match msg_type {
        0x01 | 0x02 | 0x03 => {
            let kind = match msg_type {
                0x01 => ProgramKind::Form,
                0x02 => ProgramKind::Set,
                _ => ProgramKind::Reset,
            };
            let req = (|| {
                Some(ProgramRequest {
                    kind,
                    sl: c.u8()?,
                    bl: c.u8()?,
                    v_gate_mv: c.u16()?,
                    i_target_na: c.u32()?,
                    v_gate_read_mv: c.u16()?,
                    v_start_mv: c.u16()?,
                    v_step_mv: c.u16()?,
                    v_stop_mv: c.u16()?,
                    t_pulse_us: c.u32()?,
                })
            })();
            match req {
                Some(r) => Message::Request(Request::Program(r)),
                None => return PayloadDecode::BadLayout,
            }
        }
        0x04 => {
            let req = (|| {
                Some(ReadRequest {
                    sl: c.u8()?,
                    bl: c.u8()?,
                    v_gate_read_mv: c.u16()?,
                    v_read_mv: c.i16()?,
                })
            })();
            match req {
                Some(r) => Message::Request(Request::Read(r)),
                None => return PayloadDecode::BadLayout,
            }
        }
        0x05 => Message::Request(Request::Ping),
        0x81 | 0x82 | 0x83 => {
            let kind = match msg_type {
                0x81 => ProgramKind::Form,
                0x82 => ProgramKind::Set,
                _ => ProgramKind::Reset,
            };
            let resp = (|| {
                Some(ProgramResponse {
                    kind,
                    status: ProgramStatus::from_u8(c.u8()?)?,
                    pulses: c.u8()?,
                    final_v_mv: c.u16()?,
                    final_i_na: c.u32()?,
                })
            })();
            match resp {
                Some(r) => Message::Response(Response::Program(r)),
                None => return PayloadDecode::BadLayout,
            }
        }
        0x84 => {
            let resp = (|| Some(ReadResponse { status: c.u8()?, i_na: c.i32()? }))();
            match resp {
                Some(r) => Message::Response(Response::Read(r)),
                None => return PayloadDecode::BadLayout,
            }
        }
        0x85 => match c.u16() {
            Some(v) => Message::Response(Response::Pong { fw_version: v }),
            None => return PayloadDecode::BadLayout,
        },
        0xFF => {
            let resp = (|| {
                let code = ErrorCode::from_u8(c.u8()?)?;
                let len = c.u8()? as usize;
                let rest = body.get(c.pos..)?;
                if rest.len() != len || !rest.is_ascii() {
                    return None;
                }
                c.pos += len;
                Some(ErrorResponse {
                    code,
                    detail: String::from_utf8_lossy(rest).into_owned(),
                })
            })();
            match resp {
                Some(r) => Message::Response(Response::Error(r)),
                None => return PayloadDecode::BadLayout,
            }
        }
        _ => return PayloadDecode::UnknownType,
    };
    if !matches!(msg, Message::Response(Response::Error(_))) && !c.exhausted() {
        return PayloadDecode::BadLayout;
    }
    PayloadDecode::Ok(msg)
}
