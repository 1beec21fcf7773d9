use memrig_core::profile::ChipProfile;
use memrig_fw::serve::run_tcp_server;
use memrig_fw::Firmware;
use memrig_proto::{encode_request, Deframer, Event, Message, Request, Response};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::process::{Child, Command, Stdio};
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Duration;

fn expect_one_response(stream: &mut TcpStream) -> Response {
    let mut deframer = Deframer::new();
    let mut buf = [0u8; 1024];
    loop {
        let n = stream.read(&mut buf).unwrap();
        assert!(n > 0, "server closed while awaiting a response");
        let mut events = deframer.feed(&buf[..n]);
        if let Some(event) = events.pop() {
            match event {
                Event::Message(Message::Response(resp)) => return resp,
                other => panic!("unexpected event {other:?}"),
            }
        }
    }
}

#[test]
fn tcp_sessions_are_serial_and_exclusive() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let shutdown = Arc::new(AtomicBool::new(false));
    let shutdown_thread = shutdown.clone();
    let server = std::thread::spawn(move || {
        let mut fw = Firmware::setup(ChipProfile::default().build_fixture(None).unwrap());
        run_tcp_server(listener, &mut fw, &shutdown_thread).unwrap();
        fw.stats.requests
    });

    let mut first = TcpStream::connect(addr).unwrap();
    first.set_nodelay(true).unwrap();
    first.write_all(&encode_request(&Request::Ping)).unwrap();
    assert!(matches!(expect_one_response(&mut first), Response::Pong { .. }));

    // A second client connecting mid-session is turned away.
    let mut second = TcpStream::connect(addr).unwrap();
    second
        .set_read_timeout(Some(Duration::from_secs(5)))
        .unwrap();
    second.write_all(&encode_request(&Request::Ping)).unwrap();
    let mut buf = [0u8; 64];
    let n = second.read(&mut buf).unwrap_or(0);
    assert_eq!(n, 0, "concurrent connection should be closed unanswered");

    // The first session keeps working, and a later sequential session is
    // accepted after the first one ends.
    first.write_all(&encode_request(&Request::Ping)).unwrap();
    assert!(matches!(expect_one_response(&mut first), Response::Pong { .. }));
    drop(first);

    let mut third = TcpStream::connect(addr).unwrap();
    third.set_nodelay(true).unwrap();
    third.write_all(&encode_request(&Request::Ping)).unwrap();
    assert!(matches!(expect_one_response(&mut third), Response::Pong { .. }));
    drop(third);

    shutdown.store(true, std::sync::atomic::Ordering::SeqCst);
    let served = server.join().unwrap();
    assert_eq!(served, 3);
}

struct KillOnDrop(Child);

impl Drop for KillOnDrop {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

#[test]
fn stdio_mode_exits_cleanly_on_eof() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_memrig-fw"))
        .args(["--stdio", "--seed", "7"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    {
        let stdin = child.stdin.as_mut().unwrap();
        stdin.write_all(&encode_request(&Request::Ping)).unwrap();
        stdin.flush().unwrap();
    }
    drop(child.stdin.take());
    let output = child.wait_with_output().unwrap();
    assert!(output.status.success(), "exit status {:?}", output.status);
    let mut deframer = Deframer::new();
    let events = deframer.feed(&output.stdout);
    assert!(matches!(
        events.as_slice(),
        [Event::Message(Message::Response(Response::Pong { .. }))]
    ));
}

#[test]
fn sigint_shuts_the_socket_server_down_cleanly() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_memrig-fw"))
        .args(["--listen", "127.0.0.1:0"])
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let stderr = child.stderr.take().unwrap();
    let mut lines = BufReader::new(stderr).lines();
    let first = lines.next().unwrap().unwrap();
    let addr = first
        .strip_prefix("listening on ")
        .unwrap_or_else(|| panic!("unexpected banner: {first}"))
        .to_string();
    let guard = KillOnDrop(child);

    let mut stream = TcpStream::connect(&addr).unwrap();
    stream.set_nodelay(true).unwrap();
    stream.write_all(&encode_request(&Request::Ping)).unwrap();
    assert!(matches!(expect_one_response(&mut stream), Response::Pong { .. }));
    drop(stream);

    let mut child = guard;
    unsafe {
        libc::kill(child.0.id() as i32, libc::SIGINT);
    }
    let status = child.0.wait().unwrap();
    assert!(status.success(), "exit status {status:?}");
    std::mem::forget(child);
}
