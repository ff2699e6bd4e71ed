use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::format_significant;
use crate::bench::{SweepResult, SweepRow};
use crate::error::{Error, Result};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 710.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 440.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YRange {
    /// `[0, 1]`, for normalized importances.
    Unit,
    /// `[0, max(mean + stderr)]`, for raw variances.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub title: String,
    pub y_range: YRange,
}

impl ChartSpec {
    pub fn new(title: impl Into<String>, y_range: YRange) -> Self {
        ChartSpec {
            title: title.into(),
            y_range,
        }
    }

    /// Default title listing the methods in `result`.
    pub fn for_result(result: &SweepResult, raw: bool) -> Self {
        let mut methods: Vec<&str> = result.rows.iter().map(|r| r.method.as_str()).collect();
        methods.sort_unstable();
        methods.dedup();
        let what = if raw { "Raw variance" } else { "HPI" };
        ChartSpec::new(
            format!("{what} vs γ′ ({})", methods.join(", ")),
            if raw { YRange::Auto } else { YRange::Unit },
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders `result` as a standalone SVG document: one line per (parameter,
/// method) series with a ±stderr band.
pub fn render_svg(result: &SweepResult, spec: &ChartSpec) -> Result<String> {
    if result.rows.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot plot an empty sweep result".into(),
        ));
    }
    let mut series: BTreeMap<(&str, &str), Vec<&SweepRow>> = BTreeMap::new();
    for r in &result.rows {
        series
            .entry((r.method.as_str(), r.param.as_str()))
            .or_default()
            .push(r);
    }
    for ((method, param), rows) in series.iter_mut() {
        rows.sort_by(|a, b| a.gamma_prime.total_cmp(&b.gamma_prime));
        if rows
            .windows(2)
            .any(|w| w[0].gamma_prime >= w[1].gamma_prime)
        {
            return Err(Error::InvalidArgument(format!(
                "series {param} ({method}) repeats a γ′ value"
            )));
        }
    }
    let multi_method = series
        .keys()
        .map(|k| k.0)
        .collect::<std::collections::BTreeSet<_>>()
        .len()
        > 1;

    let y_max = match spec.y_range {
        YRange::Unit => 1.0,
        YRange::Auto => {
            let m = result
                .rows
                .iter()
                .map(|r| r.mean_hpi + r.stderr_hpi)
                .fold(0.0, f64::max);
            if m > 0.0 && m.is_finite() {
                m * 1.05
            } else {
                1.0
            }
        }
    };
    let px = |x: f64| LEFT + (RIGHT - LEFT) * x.clamp(0.0, 1.0);
    let py = |y: f64| BOTTOM - (BOTTOM - TOP) * (y / y_max).clamp(0.0, 1.0);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(&spec.title)
    );

    // Axes and ticks.
    let _ = writeln!(s, r##"<g class="axes" stroke="#000" stroke-width="1">"##);
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{BOTTOM}" x2="{RIGHT}" y2="{BOTTOM}"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{BOTTOM}"/>"#
    );
    for k in 0..=10 {
        let x = px(k as f64 / 10.0);
        let y = py(y_max * k as f64 / 10.0);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{:.2}"/>"#,
            BOTTOM + 5.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}"/>"#,
            LEFT - 5.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="tick-labels">"#);
    for k in 0..=10 {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{:.1}</text>"#,
            px(k as f64 / 10.0),
            BOTTOM + 20.0,
            k as f64 / 10.0
        );
        let v = y_max * k as f64 / 10.0;
        let label = match spec.y_range {
            YRange::Unit => format!("{v:.1}"),
            YRange::Auto => format_significant(v, 3),
        };
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            LEFT - 8.0,
            py(v) + 4.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">γ′</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 45.0
    );
    let y_label = match spec.y_range {
        YRange::Unit => "HPI",
        YRange::Auto => "raw variance",
    };
    let _ = writeln!(
        s,
        r#"<text x="20" y="{0:.2}" text-anchor="middle" transform="rotate(-90 20 {0:.2})">{y_label}</text>"#,
        (TOP + BOTTOM) / 2.0
    );

    // Series.
    for (i, ((method, param), rows)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if rows.len() == 1 {
            let r = rows[0];
            let x = px(r.gamma_prime);
            let _ = writeln!(
                s,
                r#"<line class="band" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}" stroke-opacity="0.4" stroke-width="6"/>"#,
                py(r.mean_hpi + r.stderr_hpi),
                py(r.mean_hpi - r.stderr_hpi)
            );
            let _ = writeln!(
                s,
                r#"<circle class="marker" cx="{x:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
                py(r.mean_hpi)
            );
        } else {
            let upper = rows.iter().map(|r| {
                format!(
                    "{:.2},{:.2}",
                    px(r.gamma_prime),
                    py(r.mean_hpi + r.stderr_hpi)
                )
            });
            let lower = rows.iter().rev().map(|r| {
                format!(
                    "{:.2},{:.2}",
                    px(r.gamma_prime),
                    py(r.mean_hpi - r.stderr_hpi)
                )
            });
            let band: Vec<String> = upper.chain(lower).collect();
            let _ = writeln!(
                s,
                r#"<polygon class="band" points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                band.join(" ")
            );
            let line: Vec<String> = rows
                .iter()
                .map(|r| format!("{:.2},{:.2}", px(r.gamma_prime), py(r.mean_hpi)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline class="series" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                line.join(" ")
            );
        }
        // Legend entry.
        let ly = TOP + 10.0 + 22.0 * i as f64;
        let label = if multi_method {
            format!("{param} ({method})")
        } else {
            param.to_string()
        };
        let _ = writeln!(
            s,
            r#"<line x1="730" y1="{ly:.2}" x2="760" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="768" y="{:.2}">{}</text>"#,
            ly + 4.0,
            escape(&label)
        );
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

/// Writes [`render_svg`] output to `path`.
pub fn render_line_chart(
    result: &SweepResult,
    spec: &ChartSpec,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let svg = render_svg(result, spec)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
