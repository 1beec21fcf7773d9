use anyhow::Context;
use clap::Parser;
use memrig_core::profile::ChipProfile;
use memrig_fw::serve::{run_tcp_server, serve_stream};
use memrig_fw::Firmware;
use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};

/// Crossbar control-board emulator.
#[derive(Parser, Debug)]
#[command(name = "memrig-fw", version)]
struct Args {
    /// Serve the protocol on a TCP address, e.g. 127.0.0.1:7272.
    #[arg(long, conflicts_with = "stdio")]
    listen: Option<String>,

    /// Serve the protocol on stdin/stdout.
    #[arg(long)]
    stdio: bool,

    /// Chip profile JSON; defaults to a stable 12x7 chip.
    #[arg(long)]
    chip: Option<PathBuf>,

    /// Master seed; overrides the profile's seed.
    #[arg(long)]
    seed: Option<u64>,
}

static SHUTDOWN: AtomicBool = AtomicBool::new(false);

extern "C" fn request_shutdown(_sig: libc::c_int) {
    SHUTDOWN.store(true, Ordering::SeqCst);
}

fn install_signal_handlers() {
    let handler = request_shutdown as extern "C" fn(libc::c_int) as libc::sighandler_t;
    unsafe {
        libc::signal(libc::SIGINT, handler);
        libc::signal(libc::SIGTERM, handler);
    }
}

fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let profile = match &args.chip {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading chip profile {}", path.display()))?;
            ChipProfile::from_json(&text).context("parsing chip profile")?
        }
        None => ChipProfile::default(),
    };
    let fixture = profile.build_fixture(args.seed).context("building fixture")?;
    let mut fw = Firmware::setup(fixture);

    if args.stdio {
        let stdin = std::io::stdin();
        let stdout = std::io::stdout();
        serve_stream(stdin.lock(), stdout.lock(), &mut fw).context("stdio session")?;
        return Ok(());
    }

    let addr = args
        .listen
        .ok_or_else(|| anyhow::anyhow!("one of --listen or --stdio is required"))?;
    let listener = TcpListener::bind(&addr).with_context(|| format!("binding {addr}"))?;
    eprintln!("listening on {}", listener.local_addr()?);
    install_signal_handlers();
    run_tcp_server(listener, &mut fw, &SHUTDOWN).context("serving")?;
    eprintln!(
        "shutting down after {} requests ({} errors)",
        fw.stats.requests, fw.stats.errors
    );
    Ok(())
}
