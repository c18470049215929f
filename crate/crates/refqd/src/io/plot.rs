//! Run-log charts: a single SVG with three stacked panels showing QD-Score,
//! Coverage, and Max Fitness against the generation counter. Hand-rolled on
//! purpose; the output is a static artifact meant for quick inspection, not
//! an interactive dashboard.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::log::RunRecord;
use crate::Real;

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 160.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 15.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 22.0;
const PANEL_GAP: f64 = 12.0;

pub fn write_plot(records: &[RunRecord<Real>], path: &Path) -> Result<()> {
    let svg = render_plot(records)?;
    std::fs::write(path, svg)?;
    Ok(())
}

pub fn render_plot(records: &[RunRecord<Real>]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::config("nothing to plot: the log has no records"));
    }
    let panels = [
        (
            "QD-Score",
            "#1f77b4",
            series(records, |r| Some(r.qd_score)),
        ),
        ("Coverage", "#2ca02c", series(records, |r| Some(r.coverage))),
        ("Max Fitness", "#d62728", series(records, |r| r.max_fitness)),
    ];
    let total_h = MARGIN_T + 3.0 * PANEL_H + 2.0 * PANEL_GAP + MARGIN_B;
    let total_w = MARGIN_L + PANEL_W + MARGIN_R;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total_w}\" height=\"{total_h}\" \
         viewBox=\"0 0 {total_w} {total_h}\" font-family=\"sans-serif\" font-size=\"11\">"
    );
    let _ = writeln!(out, "<rect width=\"{total_w}\" height=\"{total_h}\" fill=\"white\"/>");
    for (i, (title, color, points)) in panels.iter().enumerate() {
        let top = MARGIN_T + i as f64 * (PANEL_H + PANEL_GAP);
        draw_panel(&mut out, title, color, points, top);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn series(records: &[RunRecord<Real>], get: impl Fn(&RunRecord<Real>) -> Option<Real>) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter_map(|r| get(r).map(|v| (r.generation as f64, v)))
        .collect()
}

fn draw_panel(out: &mut String, title: &str, color: &str, points: &[(f64, f64)], top: f64) {
    let left = MARGIN_L;
    let bottom = top + PANEL_H;
    let _ = writeln!(
        out,
        "<rect x=\"{left}\" y=\"{top}\" width=\"{PANEL_W}\" height=\"{PANEL_H}\" \
         fill=\"none\" stroke=\"#999\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{left}\" y=\"{}\" font-weight=\"bold\">{title}</text>",
        top - 6.0
    );
    if points.is_empty() {
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" fill=\"#999\">no data</text>",
            left + PANEL_W / 2.0 - 20.0,
            top + PANEL_H / 2.0
        );
        return;
    }
    let (x0, x1) = pad_if_flat(span(points.iter().map(|p| p.0)));
    let (y0, y1) = pad_if_flat(span(points.iter().map(|p| p.1)));
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * PANEL_W;
    let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * PANEL_H;

    if points.len() > 1 {
        let path: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            path.join(" ")
        );
    }
    for &(x, y) in points {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{color}\"/>",
            sx(x),
            sy(y)
        );
    }
    // Extremes of both axes, so the chart is readable without gridlines.
    let (lo, hi) = span(points.iter().map(|p| p.1));
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
        left - 4.0,
        top + 10.0,
        label(hi)
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{bottom}\" text-anchor=\"end\">{}</text>",
        left - 4.0,
        label(lo)
    );
    let (g0, g1) = span(points.iter().map(|p| p.0));
    let _ = writeln!(
        out,
        "<text x=\"{left}\" y=\"{}\">{}</text>",
        bottom + 14.0,
        g0 as usize
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
        left + PANEL_W,
        bottom + 14.0,
        g1 as usize
    );
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

fn pad_if_flat((lo, hi): (f64, f64)) -> (f64, f64) {
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

fn label(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(generation: usize, qd: f64, max: Option<f64>) -> RunRecord<Real> {
        RunRecord {
            generation,
            qd_score: qd,
            coverage: 0.25 + generation as f64 / 100.0,
            max_fitness: max,
            evaluations_so_far: 32 * (generation + 1),
            live_params: 100,
            archive_params: 300,
            compression_ratio: 0.5,
            lr: 1e-3,
            reeval_fired: false,
        }
    }

    #[test]
    fn two_records_draw_two_markers_per_series() {
        let svg = render_plot(&[record(0, 1.0, Some(-0.5)), record(1, 2.0, Some(-0.25))]).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 6);
        assert!(svg.contains("QD-Score"));
        assert!(svg.contains("Coverage"));
        assert!(svg.contains("Max Fitness"));
    }

    #[test]
    fn empty_log_is_an_error() {
        assert!(render_plot(&[]).is_err());
    }

    #[test]
    fn single_record_still_renders() {
        let svg = render_plot(&[record(0, 1.0, Some(0.5))]).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 0);
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn missing_max_fitness_points_are_skipped() {
        let svg = render_plot(&[
            record(0, 1.0, None),
            record(1, 2.0, Some(0.5)),
            record(2, 3.0, Some(0.75)),
        ])
        .unwrap();
        // 3 markers each for qd/coverage, 2 for max fitness.
        assert_eq!(svg.matches("<circle").count(), 8);
    }

    #[test]
    fn all_missing_max_fitness_says_no_data() {
        let svg = render_plot(&[record(0, 1.0, None), record(1, 2.0, None)]).unwrap();
        assert!(svg.contains("no data"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn axis_labels_cover_both_extremes() {
        let svg = render_plot(&[record(0, 12.0, Some(1.0)), record(9, 37.5, Some(2.0))]).unwrap();
        assert!(svg.contains(">12<"));
        assert!(svg.contains(">37.5<"));
        assert!(svg.contains(">0<"));
        assert!(svg.contains(">9<"));
    }
}
