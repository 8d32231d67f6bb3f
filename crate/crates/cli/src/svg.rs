//! Static SVG result plots: heatmaps over the (M, T) plane and fixed-T line
//! cuts. Formatting is fixed-precision so output bytes are reproducible.

use anyhow::{Context, Result};
use interfgeo::pullback::MetricSample;
use std::path::Path;

const VIRIDIS: [(f64, f64, f64); 5] = [
    (0.267, 0.005, 0.329),
    (0.229, 0.322, 0.546),
    (0.128, 0.567, 0.551),
    (0.369, 0.789, 0.383),
    (0.993, 0.906, 0.144),
];

fn color(value: f64, lo: f64, hi: f64) -> String {
    let t = if hi > lo { ((value - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.5 };
    let scaled = t * (VIRIDIS.len() - 1) as f64;
    let idx = (scaled.floor() as usize).min(VIRIDIS.len() - 2);
    let f = scaled - idx as f64;
    let (r0, g0, b0) = VIRIDIS[idx];
    let (r1, g1, b1) = VIRIDIS[idx + 1];
    let channel = |a: f64, b: f64| ((a + (b - a) * f) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", channel(r0, r1), channel(g0, g1), channel(b0, b1))
}

fn axis_values(samples: &[MetricSample]) -> (Vec<f64>, Vec<f64>) {
    let mut ms: Vec<f64> = Vec::new();
    let mut ts: Vec<f64> = Vec::new();
    for s in samples {
        if !ms.contains(&s.m) {
            ms.push(s.m);
        }
        if !ts.contains(&s.t) {
            ts.push(s.t);
        }
    }
    (ms, ts)
}

/// Heatmap of one field over the (M, T) grid; one rect per scan cell.
pub fn write_heatmap<F>(path: &Path, samples: &[MetricSample], field: F, title: &str) -> Result<()>
where
    F: Fn(&MetricSample) -> f64,
{
    let (ms, ts) = axis_values(samples);
    let (width, height, margin) = (640.0, 480.0, 60.0);
    let cell_w = (width - 2.0 * margin) / ms.len() as f64;
    let cell_h = (height - 2.0 * margin) / ts.len() as f64;
    let lo = samples.iter().map(&field).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(&field).fold(f64::NEG_INFINITY, f64::max);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" font-family=\"monospace\" font-size=\"15\" text-anchor=\"middle\">{title}</text>\n",
        width / 2.0
    ));
    for s in samples {
        let mi = ms.iter().position(|&m| m == s.m).unwrap();
        let ti = ts.iter().position(|&t| t == s.t).unwrap();
        // T grows upward
        let x = margin + mi as f64 * cell_w;
        let y = height - margin - (ti as f64 + 1.0) * cell_h;
        svg.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>\n",
            cell_w + 0.5,
            cell_h + 0.5,
            color(field(s), lo, hi)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">M: {:.3} .. {:.3}</text>\n",
        width / 2.0,
        height - 18.0,
        ms.first().unwrap(),
        ms.last().unwrap()
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">T: {:.3} .. {:.3}</text>\n",
        height / 2.0,
        height / 2.0,
        ts.first().unwrap(),
        ts.last().unwrap()
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"40\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">range {:.6e} .. {:.6e}</text>\n",
        width / 2.0,
        lo,
        hi
    ));
    svg.push_str("</svg>\n");
    std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Fixed-T cuts of the interferometric (solid) and Bures (dashed) totals
/// against M.
pub fn write_line_cuts(path: &Path, samples: &[MetricSample]) -> Result<()> {
    let (ms, ts) = axis_values(samples);
    let (width, height, margin) = (640.0, 480.0, 60.0);
    let hi = samples
        .iter()
        .map(|s| s.g_interf.total.max(s.g_bures.total))
        .fold(f64::NEG_INFINITY, f64::max);
    let lo = 0.0_f64;
    let x_of = |m: f64| {
        let (m0, m1) = (ms[0], *ms.last().unwrap());
        let t = if m1 > m0 { (m - m0) / (m1 - m0) } else { 0.5 };
        margin + t * (width - 2.0 * margin)
    };
    let y_of = |v: f64| height - margin - (v - lo) / (hi - lo).max(1e-300) * (height - 2.0 * margin);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" font-family=\"monospace\" font-size=\"15\" text-anchor=\"middle\">metric totals vs M (solid: interferometric, dashed: Bures)</text>\n",
        width / 2.0
    ));
    for (ti, &t) in ts.iter().enumerate() {
        let shade = 40 + (160 * ti / ts.len().max(1)) as u8;
        let stroke = format!("#{:02x}{:02x}{:02x}", shade, 40, 200 - shade.min(200));
        for (dashed, field) in [
            (false, Box::new(|s: &MetricSample| s.g_interf.total) as Box<dyn Fn(&MetricSample) -> f64>),
            (true, Box::new(|s: &MetricSample| s.g_bures.total)),
        ] {
            let pts: Vec<String> = samples
                .iter()
                .filter(|s| s.t == t)
                .map(|s| format!("{:.2},{:.2}", x_of(s.m), y_of(field(s))))
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\"{}/>\n",
                pts.join(" "),
                if dashed { " stroke-dasharray=\"6 3\"" } else { "" }
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\" fill=\"{stroke}\">T = {t:.4}</text>\n",
            width - margin + 4.0,
            40.0 + 14.0 * ti as f64
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">M: {:.3} .. {:.3}, max {:.6e}</text>\n",
        width / 2.0,
        height - 18.0,
        ms.first().unwrap(),
        ms.last().unwrap(),
        hi
    ));
    svg.push_str("</svg>\n");
    std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
