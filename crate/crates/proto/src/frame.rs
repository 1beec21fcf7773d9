//! Incremental deframer.
//!
//! Accepts arbitrary byte chunks, yields decoded messages and per-incident
//! frame errors, and resynchronizes on the next magic after any failure.
//! It never panics on any input and never buffers more than one maximal
//! frame plus a partial magic.

use crate::crc::crc16;
use crate::msg::{decode_payload_inner, Message, PayloadDecode};
use crate::{MAGIC, MAX_PAYLOAD, VERSION};

/// A frame-level failure, reported as a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameError {
    /// Bytes skipped while hunting for the next magic.
    BadMagic { skipped: usize },
    BadVersion(u8),
    BadLength(u16),
    BadCrc,
    UnknownType(u8),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Message(Message),
    Corrupt(FrameError),
}

#[derive(Debug, Default)]
pub struct Deframer {
    buf: Vec<u8>,
    /// Garbage bytes discarded since the last emitted event.
    skipped: usize,
    /// Discarded bytes after a frame error are covered by that error and
    /// not reported again as a separate magic hunt.
    swallow_garbage: bool,
}

impl Deframer {
    pub fn new() -> Self {
        Deframer::default()
    }

    /// Feed a chunk; returns every event completed by it, in stream order.
    pub fn feed(&mut self, bytes: &[u8]) -> Vec<Event> {
        self.buf.extend_from_slice(bytes);
        let mut events = Vec::new();
        loop {
            self.hunt_magic();
            // Header: magic(2) version(1) type(1) len(2).
            if self.buf.len() < 6 {
                break;
            }
            let version = self.buf[2];
            let msg_type = self.buf[3];
            let len = u16::from_le_bytes([self.buf[4], self.buf[5]]) as usize;
            if version != VERSION {
                self.fail(&mut events, FrameError::BadVersion(version));
                continue;
            }
            if len > MAX_PAYLOAD {
                self.fail(&mut events, FrameError::BadLength(len as u16));
                continue;
            }
            let total = 6 + len + 2;
            if self.buf.len() < total {
                break;
            }
            let expect = u16::from_le_bytes([self.buf[total - 2], self.buf[total - 1]]);
            if crc16(&self.buf[2..total - 2]) != expect {
                self.fail(&mut events, FrameError::BadCrc);
                continue;
            }
            // CRC checked out: the frame boundary is trusted from here on,
            // so failures below consume the whole frame.
            match decode_payload_inner(msg_type, &self.buf[6..6 + len]) {
                PayloadDecode::Ok(msg) => {
                    self.flush_garbage(&mut events);
                    events.push(Event::Message(msg));
                }
                PayloadDecode::UnknownType => {
                    self.flush_garbage(&mut events);
                    events.push(Event::Corrupt(FrameError::UnknownType(msg_type)));
                }
                PayloadDecode::BadLayout => {
                    self.flush_garbage(&mut events);
                    events.push(Event::Corrupt(FrameError::BadLength(len as u16)));
                }
            }
            self.buf.drain(..total);
        }
        events
    }

    /// Discard bytes until the buffer starts with a full or partial magic.
    fn hunt_magic(&mut self) {
        let mut i = 0;
        while i < self.buf.len() {
            if self.buf[i] == MAGIC[0] {
                match self.buf.get(i + 1) {
                    Some(&b) if b == MAGIC[1] => break,
                    None => break, // possible magic start; wait for more
                    Some(_) => {}
                }
            }
            i += 1;
        }
        if i > 0 {
            if !self.swallow_garbage {
                self.skipped += i;
            }
            self.buf.drain(..i);
        }
    }

    fn flush_garbage(&mut self, events: &mut Vec<Event>) {
        if self.skipped > 0 {
            events.push(Event::Corrupt(FrameError::BadMagic { skipped: self.skipped }));
            self.skipped = 0;
        }
        self.swallow_garbage = false;
    }

    /// Emit one error for the failed candidate and resume the scan just
    /// past its magic.
    fn fail(&mut self, events: &mut Vec<Event>, err: FrameError) {
        self.flush_garbage(events);
        events.push(Event::Corrupt(err));
        self.buf.drain(..2);
        self.swallow_garbage = true;
    }
}
