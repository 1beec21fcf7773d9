//! Transport loops: a single-client TCP server and a stdio pipe mode.
//!
//! The command loop is strictly serial. While a session is active,
//! additional connection attempts are accepted and immediately closed.

use crate::Firmware;
use memrig_proto::{
    encode_response, Deframer, ErrorCode, ErrorResponse, Event, FrameError, Message, Response,
};
use std::io::{ErrorKind, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Duration;

fn frame_error_response(err: FrameError) -> Response {
    match err {
        FrameError::UnknownType(t) => Response::Error(ErrorResponse::new(
            ErrorCode::UnknownType,
            format!("unknown message type 0x{t:02X}"),
        )),
        other => Response::Error(ErrorResponse::new(
            ErrorCode::BadFrame,
            format!("{other:?}"),
        )),
    }
}

fn respond<W: Write>(writer: &mut W, resp: &Response) -> std::io::Result<()> {
    let frame = encode_response(resp)
        .expect("firmware responses are ASCII and within payload bounds");
    writer.write_all(&frame)?;
    writer.flush()
}

fn handle_chunk<W: Write>(
    fw: &mut Firmware,
    deframer: &mut Deframer,
    chunk: &[u8],
    writer: &mut W,
) -> std::io::Result<()> {
    for event in deframer.feed(chunk) {
        let resp = match event {
            Event::Message(Message::Request(req)) => fw.handle_request(&req),
            Event::Message(Message::Response(_)) => {
                fw.stats.errors += 1;
                Response::Error(ErrorResponse::new(
                    ErrorCode::UnknownType,
                    "unexpected response-type message",
                ))
            }
            Event::Corrupt(err) => {
                fw.stats.errors += 1;
                frame_error_response(err)
            }
        };
        respond(writer, &resp)?;
    }
    Ok(())
}

/// Serve one session over an arbitrary byte stream until EOF.
pub fn serve_stream<R: Read, W: Write>(
    mut reader: R,
    mut writer: W,
    fw: &mut Firmware,
) -> std::io::Result<()> {
    let mut deframer = Deframer::new();
    let mut buf = [0u8; 4096];
    loop {
        let n = match reader.read(&mut buf) {
            Ok(0) => return Ok(()),
            Ok(n) => n,
            Err(e) if e.kind() == ErrorKind::Interrupted => continue,
            Err(e) => return Err(e),
        };
        handle_chunk(fw, &mut deframer, &buf[..n], &mut writer)?;
    }
}

fn serve_tcp_session(
    listener: &TcpListener,
    stream: TcpStream,
    fw: &mut Firmware,
    shutdown: &AtomicBool,
) -> std::io::Result<()> {
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(Duration::from_millis(25)))?;
    let mut reader = stream.try_clone()?;
    let mut writer = stream;
    let mut deframer = Deframer::new();
    let mut buf = [0u8; 4096];
    loop {
        if shutdown.load(Ordering::SeqCst) {
            return Ok(());
        }
        // One client at a time: turn away anyone else who connects.
        while let Ok((extra, _)) = listener.accept() {
            drop(extra);
        }
        match reader.read(&mut buf) {
            Ok(0) => return Ok(()),
            Ok(n) => handle_chunk(fw, &mut deframer, &buf[..n], &mut writer)?,
            Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => continue,
            Err(e) if e.kind() == ErrorKind::Interrupted => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Accept and serve clients one after another until `shutdown` is set.
/// Connection attempts made while a session is active are refused.
pub fn run_tcp_server(
    listener: TcpListener,
    fw: &mut Firmware,
    shutdown: &AtomicBool,
) -> std::io::Result<()> {
    listener.set_nonblocking(true)?;
    loop {
        if shutdown.load(Ordering::SeqCst) {
            return Ok(());
        }
        match listener.accept() {
            Ok((stream, _)) => {
                // Errors from one session close it; the server stays up.
                let _ = serve_tcp_session(&listener, stream, fw, shutdown);
            }
            Err(e) if e.kind() == ErrorKind::WouldBlock => {
                std::thread::sleep(Duration::from_millis(5));
            }
            Err(e) if e.kind() == ErrorKind::Interrupted => continue,
            Err(e) => return Err(e),
        }
    }
}
