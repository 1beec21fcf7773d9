//! Dependency-free SVG 1.1 rendering of CDF curves and box plots.
//!
//! Output is a pure function of the input data: identical inputs produce
//! byte-identical documents, so rendered reports can be diffed.

use crate::scalar::Real;
use crate::stats::{BoxStats, CdfSeries};
use std::io::Write;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum SvgError {
    #[error("nothing to render")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn color(group: usize) -> &'static str {
    PALETTE[group % PALETTE.len()]
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1000.0 || v.abs() < 0.01 {
        format!("{v:.3e}")
    } else {
        format!("{v:.3}")
    }
}

struct Axis {
    min: f64,
    max: f64,
    lo_px: f64,
    hi_px: f64,
}

impl Axis {
    fn new(min: f64, max: f64, lo_px: f64, hi_px: f64) -> Self {
        let (min, max) = if min < max { (min, max) } else { (min - 1.0, max + 1.0) };
        let pad = (max - min) * 0.05;
        Axis { min: min - pad, max: max + pad, lo_px, hi_px }
    }

    fn place(&self, v: f64) -> f64 {
        self.lo_px + (v - self.min) / (self.max - self.min) * (self.hi_px - self.lo_px)
    }

    fn ticks(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// One curve of a CDF figure.
pub struct CdfPlot<'a, T> {
    pub label: String,
    /// Curves sharing a color group render in the same color.
    pub color_group: usize,
    pub dashed: bool,
    /// Multiplied into the sample values before plotting (e.g. 1e6 to show
    /// microamps).
    pub x_scale: f64,
    pub series: &'a CdfSeries<T>,
}

/// Render CDF curves into an SVG document string.
pub fn cdf_svg_document<T: Real>(plots: &[CdfPlot<T>], x_label: &str) -> Result<String, SvgError> {
    if plots.is_empty() || plots.iter().any(|p| p.series.points().is_empty()) {
        return Err(SvgError::Empty);
    }
    let (width, height) = (960.0, 600.0);
    let (left, right, top, bottom) = (70.0, 230.0, 30.0, 50.0);
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    for p in plots {
        for v in p.series.values() {
            let v = v.as_f64() * p.x_scale;
            x_min = x_min.min(v);
            x_max = x_max.max(v);
        }
    }
    let x_axis = Axis::new(x_min, x_max, left, width - right);
    let y_axis = Axis::new(0.0, 1.0, height - bottom, top);

    let mut doc = String::new();
    doc.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    doc.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    frame_and_ticks(&mut doc, &x_axis, &y_axis, x_label, "cumulative probability");

    for p in plots {
        let pts = p.series.points();
        let mut d = String::new();
        let first_x = x_axis.place(pts[0].0.as_f64() * p.x_scale);
        d.push_str(&format!("M {} {}", px(x_axis.lo_px), px(y_axis.place(0.0))));
        d.push_str(&format!(" L {} {}", px(first_x), px(y_axis.place(0.0))));
        let mut prev_p = 0.0;
        for &(v, prob) in pts {
            let x = x_axis.place(v.as_f64() * p.x_scale);
            d.push_str(&format!(" L {} {}", px(x), px(y_axis.place(prev_p))));
            d.push_str(&format!(" L {} {}", px(x), px(y_axis.place(prob.as_f64()))));
            prev_p = prob.as_f64();
        }
        d.push_str(&format!(" L {} {}", px(x_axis.hi_px), px(y_axis.place(1.0))));
        let dash = if p.dashed { " stroke-dasharray=\"6 3\"" } else { "" };
        doc.push_str(&format!(
            "<path class=\"cdf\" d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\"{dash}/>\n",
            color(p.color_group)
        ));
    }

    // Legend.
    let lx = width - right + 16.0;
    for (i, p) in plots.iter().enumerate() {
        let ly = top + 14.0 + i as f64 * 16.0;
        let dash = if p.dashed { " stroke-dasharray=\"6 3\"" } else { "" };
        doc.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.6\"{dash}/>\n",
            px(lx),
            px(ly - 4.0),
            px(lx + 22.0),
            px(ly - 4.0),
            color(p.color_group)
        ));
        doc.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            px(lx + 28.0),
            px(ly),
            escape(&p.label)
        ));
    }
    doc.push_str("</svg>\n");
    Ok(doc)
}

pub fn render_cdf_svg<T: Real>(
    plots: &[CdfPlot<T>],
    x_label: &str,
    path: &Path,
) -> Result<(), SvgError> {
    let doc = cdf_svg_document(plots, x_label)?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(doc.as_bytes())?;
    Ok(())
}

/// One box series inside a panel: boxes at consecutive slots plus a dashed
/// line through the means.
pub struct BoxSeries<T> {
    pub label: String,
    pub color_group: usize,
    /// (slot label, stats) per box position.
    pub boxes: Vec<(String, BoxStats<T>)>,
}

/// A titled panel of grouped box series (e.g. one read voltage).
pub struct BoxPanel<T> {
    pub title: String,
    pub series: Vec<BoxSeries<T>>,
}

/// Render box-plot panels into an SVG document string. Values are
/// multiplied by `y_scale` before plotting.
pub fn boxplot_svg_document<T: Real>(
    panels: &[BoxPanel<T>],
    y_label: &str,
    y_scale: f64,
) -> Result<String, SvgError> {
    if panels.is_empty()
        || panels
            .iter()
            .all(|p| p.series.iter().all(|s| s.boxes.is_empty()))
    {
        return Err(SvgError::Empty);
    }
    let slots = panels
        .iter()
        .map(|p| p.series.iter().map(|s| s.boxes.len()).max().unwrap_or(0))
        .collect::<Vec<_>>();
    let slot_w = 26.0;
    let panel_pad = 26.0;
    let (left, top, bottom) = (70.0, 46.0, 56.0);
    let height = 460.0;
    let width = left
        + panels
            .iter()
            .zip(&slots)
            .map(|(_, &n)| n as f64 * slot_w + panel_pad)
            .sum::<f64>()
        + 40.0;

    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for p in panels {
        for s in &p.series {
            for (_, b) in &s.boxes {
                y_min = y_min.min(b.w2_5.as_f64() * y_scale).min(b.mean.as_f64() * y_scale);
                y_max = y_max.max(b.w97_5.as_f64() * y_scale).max(b.mean.as_f64() * y_scale);
            }
        }
    }
    let y_axis = Axis::new(y_min, y_max, height - bottom, top);

    let mut doc = String::new();
    doc.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.0}\" height=\"{height}\" viewBox=\"0 0 {width:.0} {height}\">\n"
    ));
    doc.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    doc.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{}</text>\n",
        px((top + height - bottom) / 2.0),
        px((top + height - bottom) / 2.0),
        escape(y_label)
    ));
    for t in y_axis.ticks(6) {
        let y = y_axis.place(t);
        doc.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
            px(left),
            px(y),
            px(width - 20.0),
            px(y)
        ));
        doc.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            px(left - 6.0),
            px(y + 3.0),
            tick_label(t)
        ));
    }

    let mut x0 = left;
    for (panel, &n_slots) in panels.iter().zip(&slots) {
        let panel_w = n_slots as f64 * slot_w;
        doc.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            px(x0 + panel_w / 2.0),
            px(top - 14.0),
            escape(&panel.title)
        ));
        doc.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999999\"/>\n",
            px(x0),
            px(top),
            px(panel_w),
            px(height - top - bottom)
        ));
        for (si, series) in panel.series.iter().enumerate() {
            let col = color(series.color_group);
            let box_w = slot_w * 0.62 / panel.series.len() as f64;
            let offset = (si as f64 - (panel.series.len() as f64 - 1.0) / 2.0) * (box_w + 2.0);
            let mut mean_points = Vec::new();
            for (bi, (slot_label, b)) in series.boxes.iter().enumerate() {
                let cx = x0 + (bi as f64 + 0.5) * slot_w + offset;
                let y_lo = y_axis.place(b.w2_5.as_f64() * y_scale);
                let y_hi = y_axis.place(b.w97_5.as_f64() * y_scale);
                let y_q25 = y_axis.place(b.q25.as_f64() * y_scale);
                let y_q75 = y_axis.place(b.q75.as_f64() * y_scale);
                let y_med = y_axis.place(b.median.as_f64() * y_scale);
                doc.push_str(&format!(
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{col}\"/>\n",
                    px(cx),
                    px(y_lo),
                    px(cx),
                    px(y_hi)
                ));
                for y in [y_lo, y_hi] {
                    doc.push_str(&format!(
                        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{col}\"/>\n",
                        px(cx - box_w / 3.0),
                        px(y),
                        px(cx + box_w / 3.0),
                        px(y)
                    ));
                }
                doc.push_str(&format!(
                    "<rect class=\"box\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{col}\" fill-opacity=\"0.35\" stroke=\"{col}\"/>\n",
                    px(cx - box_w / 2.0),
                    px(y_q75.min(y_q25)),
                    px(box_w),
                    px((y_q25 - y_q75).abs().max(0.5))
                ));
                doc.push_str(&format!(
                    "<line class=\"median\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#ff7f0e\" stroke-width=\"1.6\"/>\n",
                    px(cx - box_w / 2.0),
                    px(y_med),
                    px(cx + box_w / 2.0),
                    px(y_med)
                ));
                mean_points.push((cx, y_axis.place(b.mean.as_f64() * y_scale)));
                if si == 0 && bi % 2 == 0 {
                    doc.push_str(&format!(
                        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"middle\">{}</text>\n",
                        px(x0 + (bi as f64 + 0.5) * slot_w),
                        px(height - bottom + 14.0),
                        escape(slot_label)
                    ));
                }
            }
            if mean_points.len() > 1 {
                let pts = mean_points
                    .iter()
                    .map(|&(x, y)| format!("{},{}", px(x), px(y)))
                    .collect::<Vec<_>>()
                    .join(" ");
                doc.push_str(&format!(
                    "<polyline class=\"mean\" points=\"{pts}\" fill=\"none\" stroke=\"{col}\" stroke-dasharray=\"4 3\"/>\n"
                ));
            }
        }
        x0 += panel_w + panel_pad;
    }

    // Legend from the first panel's series labels.
    if let Some(panel) = panels.first() {
        for (i, s) in panel.series.iter().enumerate() {
            let lx = left + i as f64 * 160.0;
            let ly = height - 18.0;
            doc.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"14\" height=\"10\" fill=\"{}\" fill-opacity=\"0.35\" stroke=\"{}\"/>\n",
                px(lx),
                px(ly - 9.0),
                color(s.color_group),
                color(s.color_group)
            ));
            doc.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                px(lx + 20.0),
                px(ly),
                escape(&s.label)
            ));
        }
    }
    doc.push_str("</svg>\n");
    Ok(doc)
}

pub fn render_boxplot_svg<T: Real>(
    panels: &[BoxPanel<T>],
    y_label: &str,
    y_scale: f64,
    path: &Path,
) -> Result<(), SvgError> {
    let doc = boxplot_svg_document(panels, y_label, y_scale)?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(doc.as_bytes())?;
    Ok(())
}

fn frame_and_ticks(doc: &mut String, x_axis: &Axis, y_axis: &Axis, x_label: &str, y_label: &str) {
    doc.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999999\"/>\n",
        px(x_axis.lo_px),
        px(y_axis.hi_px),
        px(x_axis.hi_px - x_axis.lo_px),
        px(y_axis.lo_px - y_axis.hi_px)
    ));
    for t in x_axis.ticks(6) {
        let x = x_axis.place(t);
        doc.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
            px(x),
            px(y_axis.lo_px),
            px(x),
            px(y_axis.hi_px)
        ));
        doc.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
            px(x),
            px(y_axis.lo_px + 16.0),
            tick_label(t)
        ));
    }
    for t in y_axis.ticks(6) {
        let y = y_axis.place(t);
        doc.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
            px(x_axis.lo_px),
            px(y),
            px(x_axis.hi_px),
            px(y)
        ));
        doc.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            px(x_axis.lo_px - 6.0),
            px(y + 3.0),
            tick_label(t)
        ));
    }
    doc.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        px((x_axis.lo_px + x_axis.hi_px) / 2.0),
        px(y_axis.lo_px + 38.0),
        escape(x_label)
    ));
    doc.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{}</text>\n",
        px((y_axis.lo_px + y_axis.hi_px) / 2.0),
        px((y_axis.lo_px + y_axis.hi_px) / 2.0),
        escape(y_label)
    ));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
