use memrig_core::cell::{Cell, CellParams, TransistorModel};
use memrig_core::frontend::{
    dac_code_to_voltage, nearest_dac_code, CrossbarFixture, COLS, GAIN_ERROR_BOUND, ROWS,
};

/// A deterministic cell that behaves as a fixed resistor once formed and
/// fully set: conductance exactly 1/R, no noise, no compliance limit.
fn resistor_params(r_ohms: f64) -> CellParams<f64> {
    let g = 1.0 / r_ohms;
    CellParams {
        v_form_th: 1.6,
        v_set_th: 0.6,
        v_reset_th: 0.6,
        g_max: g,
        g_min: g / 1000.0,
        alpha_set: 1e12,
        alpha_reset: 1e12,
        sigma_program: 0.0,
        sigma0: 0.0,
        sigma1: 0.0,
        disturb_set: 0.0,
        disturb_reset: 0.0,
        disturb_jump: 0.05,
        n_cmax: 1_000_000,
        kappa: 0.0,
        transistor: TransistorModel { v_th: 0.6, g_m: 10.0 },
    }
}

fn resistor_fixture(resistors: &[f64], gain_error: f64) -> CrossbarFixture<f64> {
    let mut cells = Vec::new();
    for idx in 0..ROWS * COLS {
        let r = resistors[idx % resistors.len()];
        cells.push(Cell::new(resistor_params(r), idx as u64).unwrap());
    }
    let mut fixture = CrossbarFixture::from_cells(cells, gain_error).unwrap();
    for idx in 0..resistors.len() {
        let (sl, bl) = (idx / COLS, idx % COLS);
        // Form, then saturate the filament so G == 1/R exactly.
        fixture.drive_cell(sl, bl, 2.0, 0.0, 1.8, 10e-6).unwrap();
        fixture.drive_cell(sl, bl, 2.0, 0.0, 1.8, 10e-6).unwrap();
        assert_eq!(fixture.cell(sl, bl).unwrap().filament(), 1.0);
    }
    fixture
}

/// Reconstructed resistance stays within 0.5 % of truth across the
/// 1 kΩ – 100 kΩ decade span, at both gain-error extremes.
#[test]
fn reconstruction_error_under_half_percent() {
    let resistors: Vec<f64> = (0..20)
        .map(|j| 1e3 * 10f64.powf(2.0 * j as f64 / 19.0))
        .collect();
    let v_read: f64 = dac_code_to_voltage(nearest_dac_code(0.2f64).unwrap()).unwrap();
    let started = std::time::Instant::now();
    for &gain_error in &[GAIN_ERROR_BOUND, -GAIN_ERROR_BOUND, 0.0] {
        let mut fixture = resistor_fixture(&resistors, gain_error);
        for (idx, &r) in resistors.iter().enumerate() {
            let (sl, bl) = (idx / COLS, idx % COLS);
            let reading = fixture.measure_bl_current(bl, 0.2, 1.5, sl).unwrap();
            let r_rec = v_read / reading.amps;
            let rel = (r_rec - r).abs() / r;
            assert!(
                rel < 0.005,
                "R = {r:.1} Ω, reconstructed {r_rec:.1} Ω, error {:.4} %",
                rel * 100.0
            );
        }
    }
    assert!(started.elapsed().as_secs_f64() < 1.0);
}

/// Negative read voltages reconstruct with the same accuracy and sign.
#[test]
fn negative_reads_reconstruct_too() {
    let resistors = vec![4.7e3, 22e3];
    let mut fixture = resistor_fixture(&resistors, GAIN_ERROR_BOUND);
    let v_read: f64 = dac_code_to_voltage(nearest_dac_code(0.2f64).unwrap()).unwrap();
    for (idx, &r) in resistors.iter().enumerate() {
        let (sl, bl) = (idx / COLS, idx % COLS);
        let reading = fixture.measure_bl_current(bl, -0.2, 1.5, sl).unwrap();
        assert!(reading.amps < 0.0);
        let r_rec = v_read / (-reading.amps);
        assert!((r_rec - r).abs() / r < 0.005);
    }
}

/// Only the gate-selected row contributes to a bit line: a second formed
/// cell on the same column adds nothing while its gate is grounded.
#[test]
fn sneak_paths_are_cut_by_the_gate() {
    let resistors = vec![2e3; 14];
    let mut fixture = resistor_fixture(&resistors, 0.0);
    let clean = fixture.measure_bl_current(0, 0.2, 1.5, 0).unwrap();
    let v_read: f64 = dac_code_to_voltage(nearest_dac_code(0.2f64).unwrap()).unwrap();
    let single = v_read / 2e3;
    assert!((clean.amps - single).abs() / single < 0.005);

    // Open the second row's gate through the mux: now both rows conduct.
    use memrig_core::frontend::{MuxSource, Pin};
    fixture.set_tia(0, memrig_core::frontend::TiaConfig::new(10e3)).unwrap();
    fixture.route(Pin::Wl(0), MuxSource::Dac(0)).unwrap();
    fixture.route(Pin::Sl(0), MuxSource::Dac(1)).unwrap();
    fixture.route(Pin::Wl(1), MuxSource::Dac(0)).unwrap();
    fixture.route(Pin::Sl(1), MuxSource::Dac(1)).unwrap();
    let both = fixture.bl_current(0).unwrap();
    assert!((both - 2.0 * single).abs() / (2.0 * single) < 0.005);
}

/// A deselected cell measures as a zero code.
#[test]
fn deselected_cell_measures_zero() {
    let resistors = vec![10e3];
    let mut fixture = resistor_fixture(&resistors, 0.0);
    let reading = fixture.measure_bl_current(0, 0.2, 0.0, 0).unwrap();
    assert_eq!(reading.code, 0);
    assert_eq!(reading.amps, 0.0);
}

/// Currents beyond the smallest feedback resistor's range saturate.
#[test]
fn saturation_is_flagged() {
    use memrig_core::frontend::FrontendError;
    let mut params = resistor_params(10.0);
    params.transistor.g_m = 100.0;
    let mut cells = Vec::new();
    for idx in 0..ROWS * COLS {
        cells.push(Cell::new(params, idx as u64).unwrap());
    }
    let mut fixture = CrossbarFixture::from_cells(cells, 0.0).unwrap();
    fixture.drive_cell(0, 0, 2.0, 0.0, 1.8, 10e-6).unwrap();
    fixture.drive_cell(0, 0, 2.0, 0.0, 1.8, 10e-6).unwrap();
    // 2 V across 10 Ω wants 200 mA; 43 Ω · 200 mA is far over full scale.
    let err = fixture.measure_bl_current(0, 2.0, 5.0, 0).unwrap_err();
    assert_eq!(err, FrontendError::Saturated);
}
