//! Manual calibration probe: prints the raw quantities the reliability
//! suite asserts on, so profile constants can be sanity-checked.
//! Run with: cargo test -p memrig --test calibration_probe -- --ignored --nocapture

mod common;

use common::spawn_rig;
use memrig::campaign::{run_c2c_campaign, run_endurance_campaign, run_read_disturb_campaign, StateLabel};
use memrig::report;
use memrig::{CellAddress, Client};
use memrig_core::profile::ChipProfile;
use memrig_core::stats::{box_stats, mean_std};

#[test]
#[ignore]
fn probe_c2c_std_profile() {
    let profile = ChipProfile::default();
    let addr = spawn_rig(&profile, None);
    let mut client = Client::connect(&addr).unwrap();
    let cells = [CellAddress::new(1, 5).unwrap(), CellAddress::new(5, 3).unwrap()];
    let started = std::time::Instant::now();
    let d = run_c2c_campaign(
        &mut client,
        &cells,
        &memrig::campaign::DEFAULT_READ_VOLTAGES_MV,
        100,
    )
    .unwrap();
    println!("c2c runtime: {:.2} s", started.elapsed().as_secs_f64());
    for v in report::voltages(&d) {
        for state in [StateLabel::Lrs, StateLabel::Hrs] {
            let samples = report::currents(&d, v, state);
            let (mean, std) = mean_std(&samples).unwrap();
            println!(
                "{v:+5} mV {:>3}: n={:3} mean={:9.3} uA std={:8.4} uA",
                state.as_str(),
                samples.len(),
                mean * 1e6,
                std * 1e6
            );
        }
    }
}

#[test]
#[ignore]
fn probe_read_disturb_unstable() {
    for v in [200i16, -200] {
        let profile = common::two_cell_profile(
            r#"{"sl": 0, "bl": 0, "profile": "unstable"}, {"sl": 0, "bl": 1, "profile": "unstable"}"#,
        );
        let addr = spawn_rig(&profile, None);
        let mut client = Client::connect(&addr).unwrap();
        let cells = [CellAddress::new(0, 0).unwrap()];
        let started = std::time::Instant::now();
        let d = run_read_disturb_campaign(&mut client, &cells, &[v], 100, 50).unwrap();
        println!("single-voltage burst runtime: {:.2} s", started.elapsed().as_secs_f64());
        for idx in [1u32, 2, 5, 10, 20, 50, 100] {
            let grab = |state: StateLabel| -> Vec<f64> {
                d.read_records()
                    .filter(|r| r.read_idx == idx && r.state == state)
                    .map(|r| r.current_na as f64 * 1e-9)
                    .collect()
            };
            let lrs = box_stats(&grab(StateLabel::Lrs));
            let hrs = box_stats(&grab(StateLabel::Hrs));
            if let (Ok(l), Ok(h)) = (lrs, hrs) {
                println!(
                    "{v:+} mV read {idx:3}: lrs [{:8.2}, {:8.2}] uA, hrs [{:8.2}, {:8.2}] uA, overlap={}",
                    l.w2_5 * 1e6,
                    l.w97_5 * 1e6,
                    h.w2_5 * 1e6,
                    h.w97_5 * 1e6,
                    overlaps(l.w2_5, l.w97_5, h.w2_5, h.w97_5)
                );
            }
        }
    }
}

fn overlaps(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64) -> bool {
    a_lo.max(b_lo) <= a_hi.min(b_hi)
}

#[test]
#[ignore]
fn probe_endurance_cycles() {
    let profile = common::two_cell_profile(
        r#"{"sl": 0, "bl": 0, "profile": "unstable", "d2d": false,
            "sigma0": 0.0, "sigma1": 0.0, "sigma_program": 0.0}"#,
    );
    let addr = spawn_rig(&profile, None);
    let mut client = Client::connect(&addr).unwrap();
    let cell = CellAddress::new(0, 0).unwrap();
    let started = std::time::Instant::now();
    let (report, _) = run_endurance_campaign(&mut client, cell, 500).unwrap();
    println!(
        "unstable noiseless: broken={} at cycle {} ({} transient misses), {:.2} s",
        report.broken,
        report.n_cmax_observed,
        report.transient_failures,
        started.elapsed().as_secs_f64()
    );

    let addr = spawn_rig(&ChipProfile::default(), None);
    let mut client = Client::connect(&addr).unwrap();
    let started = std::time::Instant::now();
    let (report, _) = run_endurance_campaign(&mut client, cell, 10_000).unwrap();
    println!(
        "stable default: broken={} after {} cycles ({} transient misses), {:.2} s",
        report.broken,
        report.n_cmax_observed,
        report.transient_failures,
        started.elapsed().as_secs_f64()
    );
}

#[test]
#[ignore]
fn probe_overlap_across_seeds() {
    for seed in [7u64, 99, 1234] {
        let profile = common::two_cell_profile(
            r#"{"sl": 0, "bl": 0, "profile": "unstable"}"#,
        );
        let addr = spawn_rig(&profile, Some(seed));
        let mut client = Client::connect(&addr).unwrap();
        let cells = [CellAddress::new(0, 0).unwrap()];
        let d = run_read_disturb_campaign(&mut client, &cells, &[200], 20, 50).unwrap();
        let mut first_overlap = None;
        for idx in 1..=20u32 {
            let grab = |state: StateLabel| -> Vec<f64> {
                d.read_records()
                    .filter(|r| r.read_idx == idx && r.state == state)
                    .map(|r| r.current_na as f64 * 1e-9)
                    .collect()
            };
            if let (Ok(l), Ok(h)) = (box_stats(&grab(StateLabel::Lrs)), box_stats(&grab(StateLabel::Hrs))) {
                if overlaps(l.w2_5, l.w97_5, h.w2_5, h.w97_5) && first_overlap.is_none() {
                    first_overlap = Some(idx);
                }
            }
        }
        println!("seed {seed}: first +200 mV whisker overlap at read {first_overlap:?}");
    }
}
