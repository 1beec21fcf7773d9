//! Turn campaign datasets into statistics tables and figures.

use crate::campaign::{CampaignKind, Dataset, StateLabel};
use crate::ClientError;
use memrig_core::stats::{box_stats, empirical_cdf, mean_std, window_margin, BoxStats};
use memrig_core::svg::{BoxPanel, BoxSeries, CdfPlot};
use memrig_core::CdfSeries;
use std::io::Write;
use std::path::Path;

fn state_color(state: StateLabel) -> usize {
    match state {
        StateLabel::Lrs => 0,
        StateLabel::Hrs => 3,
        StateLabel::Broken => 7,
    }
}

fn voltage_label(mv: i16) -> String {
    format!("{:+.2} V", mv as f64 / 1000.0)
}

/// Distinct read voltages present in a dataset, ascending.
pub fn voltages(dataset: &Dataset) -> Vec<i16> {
    let mut vs: Vec<i16> = dataset.read_records().map(|r| r.voltage_mv).collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// Currents (amps) for one (voltage, state) cell-aggregated group.
pub fn currents(dataset: &Dataset, voltage_mv: i16, state: StateLabel) -> Vec<f64> {
    dataset
        .read_records()
        .filter(|r| r.voltage_mv == voltage_mv && r.state == state)
        .map(|r| r.current_na as f64 * 1e-9)
        .collect()
}

/// One empirical CDF per (voltage, state): 20 series for the stock ten
/// voltages. Curves of the same voltage share a color; the high state is
/// dashed.
pub fn cdf_series(dataset: &Dataset) -> Result<Vec<(i16, StateLabel, CdfSeries)>, ClientError> {
    let mut out = Vec::new();
    for v in voltages(dataset) {
        for state in [StateLabel::Lrs, StateLabel::Hrs] {
            let samples = currents(dataset, v, state);
            if samples.is_empty() {
                continue;
            }
            let series = empirical_cdf(&samples)
                .map_err(|e| ClientError::Csv(format!("cdf for {v} mV: {e}")))?;
            out.push((v, state, series));
        }
    }
    if out.is_empty() {
        return Err(ClientError::Csv("dataset has no read records".into()));
    }
    Ok(out)
}

pub fn render_cdf(dataset: &Dataset, svg_path: &Path) -> Result<usize, ClientError> {
    let series = cdf_series(dataset)?;
    let vs = voltages(dataset);
    let plots: Vec<CdfPlot<f64>> = series
        .iter()
        .map(|(v, state, s)| CdfPlot {
            label: format!("{} {}", voltage_label(*v), state.as_str()),
            color_group: vs.iter().position(|x| x == v).unwrap_or(0),
            dashed: *state == StateLabel::Hrs,
            x_scale: 1e6,
            series: s,
        })
        .collect();
    memrig_core::svg::render_cdf_svg(&plots, "read current (uA)", svg_path)
        .map_err(|e| ClientError::Csv(e.to_string()))?;
    Ok(plots.len())
}

/// Box statistics of a read-disturb burst at every `stride`-th read index,
/// per voltage and state.
pub fn disturb_panels(dataset: &Dataset, stride: u32) -> Result<Vec<BoxPanel<f64>>, ClientError> {
    let reads_max = dataset
        .read_records()
        .filter(|r| r.campaign == CampaignKind::ReadDisturb)
        .map(|r| r.read_idx)
        .max()
        .ok_or_else(|| ClientError::Csv("dataset has no read-disturb records".into()))?;
    let mut panels = Vec::new();
    for v in voltages(dataset) {
        let mut series = Vec::new();
        for state in [StateLabel::Lrs, StateLabel::Hrs] {
            let mut boxes = Vec::new();
            let mut idx = stride;
            while idx <= reads_max {
                let samples: Vec<f64> = dataset
                    .read_records()
                    .filter(|r| {
                        r.campaign == CampaignKind::ReadDisturb
                            && r.voltage_mv == v
                            && r.state == state
                            && r.read_idx == idx
                    })
                    .map(|r| r.current_na as f64 * 1e-9)
                    .collect();
                if samples.len() >= 2 {
                    let stats = box_stats(&samples)
                        .map_err(|e| ClientError::Csv(format!("boxes for {v} mV: {e}")))?;
                    boxes.push((format!("{idx}"), stats));
                }
                idx += stride;
            }
            if !boxes.is_empty() {
                series.push(BoxSeries {
                    label: state.as_str().to_string(),
                    color_group: state_color(state),
                    boxes,
                });
            }
        }
        if !series.is_empty() {
            panels.push(BoxPanel { title: voltage_label(v), series });
        }
    }
    if panels.is_empty() {
        return Err(ClientError::Csv("no read-disturb groups with enough repeats".into()));
    }
    Ok(panels)
}

pub fn render_boxplot(dataset: &Dataset, stride: u32, svg_path: &Path) -> Result<usize, ClientError> {
    let panels = disturb_panels(dataset, stride)?;
    let count = panels.len();
    memrig_core::svg::render_boxplot_svg(&panels, "read current (uA)", 1e6, svg_path)
        .map_err(|e| ClientError::Csv(e.to_string()))?;
    Ok(count)
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

/// Per-(voltage, state) descriptive statistics plus the per-voltage window
/// margin, in nA. Deterministic text for identical datasets.
pub fn stats_csv_string(dataset: &Dataset) -> Result<String, ClientError> {
    let mut out = String::from(
        "voltage_mv,state,n,mean_na,std_na,w2_5_na,q25_na,median_na,q75_na,w97_5_na,window_margin\n",
    );
    let mut any = false;
    for v in voltages(dataset) {
        let lrs = currents(dataset, v, StateLabel::Lrs);
        let hrs = currents(dataset, v, StateLabel::Hrs);
        let margin = if !lrs.is_empty() && !hrs.is_empty() {
            let wm = window_margin(&lrs, &hrs, v as f64 * 1e-3)
                .map_err(|e| ClientError::Csv(e.to_string()))?;
            if wm.is_finite() { fmt(wm) } else { "inf".to_string() }
        } else {
            String::new()
        };
        for (state, samples) in [(StateLabel::Lrs, &lrs), (StateLabel::Hrs, &hrs)] {
            if samples.len() < 2 {
                continue;
            }
            any = true;
            let (mean, std) = mean_std(samples).map_err(|e| ClientError::Csv(e.to_string()))?;
            let b: BoxStats<f64> =
                box_stats(samples).map_err(|e| ClientError::Csv(e.to_string()))?;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                v,
                state.as_str(),
                samples.len(),
                fmt(mean * 1e9),
                fmt(std * 1e9),
                fmt(b.w2_5 * 1e9),
                fmt(b.q25 * 1e9),
                fmt(b.median * 1e9),
                fmt(b.q75 * 1e9),
                fmt(b.w97_5 * 1e9),
                margin,
            ));
        }
    }
    if !any {
        return Err(ClientError::Csv("dataset has no groups to summarize".into()));
    }
    Ok(out)
}

pub fn write_stats_csv(dataset: &Dataset, path: &Path) -> Result<(), ClientError> {
    let text = stats_csv_string(dataset)?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}
