use memrig_core::profile::ChipProfile;
use memrig_fw::serve::run_tcp_server;
use memrig_fw::Firmware;
use std::net::TcpListener;
use std::sync::atomic::AtomicBool;

/// Boot a firmware instance on an ephemeral port in a background thread.
/// The thread lives for the rest of the test process.
pub fn spawn_rig(profile: &ChipProfile, seed: Option<u64>) -> String {
    let fixture = profile.build_fixture(seed).expect("fixture builds");
    let mut fw = Firmware::setup(fixture);
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind");
    let addr = listener.local_addr().unwrap().to_string();
    std::thread::spawn(move || {
        static RUN_FOREVER: AtomicBool = AtomicBool::new(false);
        let _ = run_tcp_server(listener, &mut fw, &RUN_FOREVER);
    });
    addr
}

/// A two-cell profile used by the reliability tests: both cells at the
/// named profile, device-to-device draws on unless disabled per override.
pub fn two_cell_profile(json_overrides: &str) -> ChipProfile {
    let text = format!(r#"{{ "seed": 42, "overrides": [{json_overrides}] }}"#);
    ChipProfile::from_json(&text).expect("profile parses")
}
