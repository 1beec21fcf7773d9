// Temporary probe: track d and statuses across endurance cycles.
use memrig_core::profile::ChipProfile;
use memrig_core::program::{ispva, IspvaParams, ProgramStatus};

fn main() {
    let json = r#"{ "seed": 42, "overrides": [
        {"sl": 0, "bl": 0, "profile": "unstable", "d2d": false,
         "sigma0": 0.0, "sigma1": 0.0, "sigma_program": 0.0}
    ]}"#;
    let chip = ChipProfile::from_json(json).unwrap();
    let mut fixture = chip.build_fixture::<f64>(None).unwrap();
    ispva(&mut fixture, 0, 0, &IspvaParams::form_defaults()).unwrap();
    ispva(&mut fixture, 0, 0, &IspvaParams::reset_defaults()).unwrap();
    ispva(&mut fixture, 0, 0, &IspvaParams::set_defaults()).unwrap();
    println!("after preamble: d = {}", fixture.cell(0, 0).unwrap().reset_count());
    for cycle in 1..=130u32 {
        let set = ispva(&mut fixture, 0, 0, &IspvaParams::set_defaults()).unwrap();
        let d_after_set = fixture.cell(0, 0).unwrap().reset_count();
        let reset = ispva(&mut fixture, 0, 0, &IspvaParams::reset_defaults()).unwrap();
        let d = fixture.cell(0, 0).unwrap().reset_count();
        let floor = fixture.hrs_floor_current(0, 0, 0.2, 1.5).unwrap();
        if cycle > 90 || set.status != ProgramStatus::Ok || reset.status != ProgramStatus::Ok {
            println!(
                "cycle {cycle:3}: set={:?}/{}p i={}nA, reset={:?}/{}p i={}nA, d_mid={d_after_set} d={d}, floor={:.4}uA",
                set.status, set.pulses, set.final_i_na, reset.status, reset.pulses, reset.final_i_na, d_after_set, d, floor * 1e6
            );
        }
        if reset.status == ProgramStatus::CellBroken {
            println!("broken at cycle {cycle}, d = {d}");
            break;
        }
    }
}
