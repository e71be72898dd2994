//! Minimal static line plots.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const PANEL_H: f64 = 300.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub series: Vec<Series>,
}

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-300 {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

pub fn plot(panels: &[Panel]) -> String {
    let height = PANEL_H * panels.len() as f64;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for (p, panel) in panels.iter().enumerate() {
        let top = p as f64 * PANEL_H;
        let (x0, x1) = range(panel.series.iter().flat_map(|s| s.x.iter().copied()));
        let (y0, y1) = range(panel.series.iter().flat_map(|s| s.y.iter().copied()));
        let (w, h) = (WIDTH - 2.0 * MARGIN, PANEL_H - 2.0 * MARGIN);
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * w;
        let py = |y: f64| top + MARGIN + (y1 - y) / (y1 - y0) * h;
        let _ = writeln!(
            s,
            "<rect x=\"{MARGIN}\" y=\"{}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"black\"/>",
            top + MARGIN
        );
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", WIDTH / 2.0, top + MARGIN - 10.0, panel.title);
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            WIDTH / 2.0,
            top + PANEL_H - 15.0,
            panel.x_label
        );
        for (v, anchor, x) in [(x0, "start", MARGIN), (x1, "end", WIDTH - MARGIN)] {
            let _ = writeln!(s, "<text x=\"{x}\" y=\"{}\" text-anchor=\"{anchor}\">{v:.3}</text>", top + PANEL_H - MARGIN + 15.0);
        }
        for (v, y) in [(y1, top + MARGIN + 10.0), (y0, top + PANEL_H - MARGIN)] {
            let _ = writeln!(s, "<text x=\"{}\" y=\"{y}\" text-anchor=\"end\">{v:.3e}</text>", MARGIN - 4.0);
        }
        if y0 < 0.0 && y1 > 0.0 {
            let _ = writeln!(
                s,
                "<line x1=\"{MARGIN}\" x2=\"{}\" y1=\"{z}\" y2=\"{z}\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>",
                WIDTH - MARGIN,
                z = py(0.0)
            );
        }
        for (k, series) in panel.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let pts: Vec<String> = series
                .x
                .iter()
                .zip(&series.y)
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(s, "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>", pts.join(" "));
            let _ = writeln!(
                s,
                "<text x=\"{}\" y=\"{}\" fill=\"{color}\" text-anchor=\"end\">{}</text>",
                WIDTH - MARGIN - 5.0,
                top + MARGIN + 15.0 * (k + 1) as f64,
                series.label
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_has_one_polyline_per_series() {
        let panel = |n: usize| Panel {
            title: "t".into(),
            x_label: "x".into(),
            series: (0..n)
                .map(|k| Series {
                    label: format!("s{k}"),
                    x: vec![0.0, 1.0, 2.0],
                    y: vec![k as f64, -1.0, f64::NAN],
                })
                .collect(),
        };
        let svg = plot(&[panel(2), panel(1)]);
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn flat_series_does_not_divide_by_zero() {
        let svg = plot(&[Panel {
            title: "flat".into(),
            x_label: "x".into(),
            series: vec![Series { label: "c".into(), x: vec![1.0, 1.0], y: vec![2.0, 2.0] }],
        }]);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
