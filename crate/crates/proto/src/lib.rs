//! Framed request/response protocol between the host and the instrument
//! firmware.
//!
//! Every message travels inside one frame:
//!
//! ```text
//! +------+------+---------+----------+-------------+---------+--------+
//! | 0xA5 | 0x5A | version | msg_type | payload_len | payload | crc16  |
//! +------+------+---------+----------+-------------+---------+--------+
//!   magic (2)      u8         u8        u16 LE        bytes    u16 LE
//! ```
//!
//! The CRC is CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection,
//! no final xor) computed over `version || msg_type || payload_len ||
//! payload`. All multi-byte integers are little-endian. Payloads are capped
//! at [`MAX_PAYLOAD`] bytes so a deframer never buffers unbounded input.
//!
//! Message payloads use fixed field layouts with explicit units (mV, nA,
//! µs); see [`msg`] for the per-type tables.

pub mod crc;
pub mod frame;
pub mod msg;

pub use frame::{Deframer, Event, FrameError};
pub use msg::{
    decode_payload, encode, encode_request, encode_response, EncodeError, ErrorCode,
    ErrorResponse, Message, ProgramKind, ProgramRequest, ProgramResponse, ProgramStatus,
    ReadRequest, ReadResponse, Request, Response,
};

/// Frame start marker.
pub const MAGIC: [u8; 2] = [0xA5, 0x5A];
/// Protocol version carried in every frame.
pub const VERSION: u8 = 0x01;
/// Upper bound on the payload length field.
pub const MAX_PAYLOAD: usize = 1024;
