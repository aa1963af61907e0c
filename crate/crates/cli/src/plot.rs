//! Minimal SVG time-series rendering for simulation traces.

use std::fmt::Write;

use acorbfn_core::sim::SimTrace;

const W: f64 = 640.0;
const H: f64 = 320.0;
const MARGIN: f64 = 48.0;
const MAX_POINTS: usize = 2000;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub values: Vec<f64>,
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() || !hi.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// One panel: shared time axis, any number of series, labelled y range.
pub fn line_plot(title: &str, y_label: &str, t: &[f64], series: &[Series]) -> String {
    let stride = t.len().div_ceil(MAX_POINTS).max(1);
    let (t0, t1) = bounds(t.iter().copied());
    let (y0, y1) = bounds(series.iter().flat_map(|s| s.values.iter().copied()).filter(|v| v.is_finite()));
    let px = |x: f64| MARGIN + (x - t0) / (t1 - t0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    // writes into a String cannot fail
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="18" text-anchor="middle" font-size="13">{title}</text>"#, W / 2.0);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">t (s)</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(svg, r#"<text x="12" y="{}" transform="rotate(-90 12 {})" text-anchor="middle">{y_label}</text>"#, H / 2.0, H / 2.0);
    for (v, y) in [(y0, H - MARGIN), (y1, MARGIN)] {
        let _ = writeln!(svg, r#"<text x="{}" y="{y}" text-anchor="end">{v:.3}</text>"#, MARGIN - 4.0);
    }
    for (v, x) in [(t0, MARGIN), (t1, W - MARGIN)] {
        let _ = writeln!(svg, r#"<text x="{x}" y="{}" text-anchor="middle">{v:.2}</text>"#, H - MARGIN + 14.0);
    }
    for (k, s) in series.iter().enumerate() {
        let points: Vec<String> = t
            .iter()
            .zip(&s.values)
            .step_by(stride)
            .filter(|(_, v)| v.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.2" points="{}"/>"#,
            s.color,
            points.join(" ")
        );
        let ly = MARGIN + 14.0 + 14.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly}" fill="{}" text-anchor="end">{}</text>"#,
            W - MARGIN - 6.0,
            s.color,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Position, tracking error and control input for each joint, as
/// `(file_stem, svg)` pairs.
pub fn trace_panels(trace: &SimTrace) -> Vec<(String, String)> {
    let t: Vec<f64> = trace.rows.iter().map(|r| r.t).collect();
    let col = |f: &dyn Fn(&acorbfn_core::sim::TraceRow) -> f64| trace.rows.iter().map(f).collect::<Vec<f64>>();
    let mut out = Vec::with_capacity(9);
    for j in 0..3 {
        let n = j + 1;
        out.push((
            format!("position_joint{n}"),
            line_plot(
                &format!("Position of joint {n}"),
                "q",
                &t,
                &[
                    Series { label: "desired", color: "#d62728", values: col(&|r| r.q_desired[j]) },
                    Series { label: "actual", color: "#1f77b4", values: col(&|r| r.q[j]) },
                ],
            ),
        ));
        out.push((
            format!("error_joint{n}"),
            line_plot(
                &format!("Tracking error of joint {n}"),
                "e",
                &t,
                &[Series { label: "e", color: "#1f77b4", values: col(&|r| r.e[j]) }],
            ),
        ));
        out.push((
            format!("control_joint{n}"),
            line_plot(
                &format!("Control input of joint {n}"),
                "tau",
                &t,
                &[Series { label: "tau", color: "#2ca02c", values: col(&|r| r.torque[j]) }],
            ),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_is_well_formed() {
        let t: Vec<f64> = (0..5000).map(|i| i as f64 * 1e-3).collect();
        let v: Vec<f64> = t.iter().map(|x| x.sin()).collect();
        let svg = line_plot("demo", "y", &t, &[Series { label: "sin", color: "red", values: v }]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert!(pts.split(' ').count() <= MAX_POINTS);
    }

    #[test]
    fn flat_series_does_not_divide_by_zero() {
        let svg = line_plot("flat", "y", &[0.0, 1.0], &[Series { label: "c", color: "red", values: vec![2.0, 2.0] }]);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
