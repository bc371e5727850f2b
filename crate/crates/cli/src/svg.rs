//! SVG rendering of run metrics and population snapshots.
//!
//! Time series layout: a 2x2 grid of `PANEL_W` x `PANEL_H` panels, each with
//! a plot area inset by the `MARGIN_*` constants. A value `v` at step `t` is
//! drawn at
//!
//! ```text
//! x = left + (t - t_min) / (t_max - t_min) * plot_w
//! y = top + plot_h - (v - v_min) / (v_max - v_min) * plot_h
//! ```
//!
//! where the ranges cover the non-null values of the panel. A degenerate
//! range is widened by 0.5 on each side. Null values split the line; a
//! segment of a single point is drawn as a marker.
//!
//! Snapshot layout: living systems in id order on a square grid of
//! `CELL` px cells. Outer circle radius is `k * s` and the dashed inner
//! circle radius `k * r`, with `k = (CELL / 2 - CELL_PAD) / max(s_crit)` over
//! the living systems. Systems with agency are filled solid; systems without
//! it are filled with a dot pattern.

use std::fmt::Write as _;

use regsel_core::{MetricsFrame, SystemRecord};

use crate::error::CliError;

pub const PANEL_W: f64 = 480.0;
pub const PANEL_H: f64 = 280.0;
pub const MARGIN_LEFT: f64 = 64.0;
pub const MARGIN_RIGHT: f64 = 20.0;
pub const MARGIN_TOP: f64 = 36.0;
pub const MARGIN_BOTTOM: f64 = 40.0;

pub const CELL: f64 = 80.0;
pub const CELL_PAD: f64 = 4.0;

const COLOR_AXIS: &str = "#2c3e50";
const COLOR_LINE: &str = "#2a6fb0";
const COLOR_AGENT: &str = "#3b7dbf";
const FONT: &str = r#"font-family="Helvetica, Arial, sans-serif""#;

type Series = (&'static str, &'static str, fn(&MetricsFrame) -> Option<f64>);

const SERIES: [Series; 4] = [
    ("delta_ave", "average self-awareness \u{394}", |f| {
        f.delta_ave
    }),
    ("rho_ratio", "\u{3c1}=0 / \u{3c1}=1 ratio", |f| f.rho_ratio),
    ("tau_ave", "average agility \u{3c4}", |f| f.tau_ave),
    ("epsilon_ave", "average plasticity \u{3b5}", |f| {
        f.epsilon_ave
    }),
];

/// Affine map from data space to panel pixel space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelAxes {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub origin: (f64, f64),
}

impl PanelAxes {
    fn new(x: (f64, f64), y: (f64, f64), origin: (f64, f64)) -> Self {
        PanelAxes {
            x_range: widen(x),
            y_range: widen(y),
            origin,
        }
    }

    pub fn plot_w() -> f64 {
        PANEL_W - MARGIN_LEFT - MARGIN_RIGHT
    }

    pub fn plot_h() -> f64 {
        PANEL_H - MARGIN_TOP - MARGIN_BOTTOM
    }

    pub fn map(&self, t: f64, v: f64) -> (f64, f64) {
        let (x0, x1) = self.x_range;
        let (y0, y1) = self.y_range;
        let left = self.origin.0 + MARGIN_LEFT;
        let top = self.origin.1 + MARGIN_TOP;
        (
            left + (t - x0) / (x1 - x0) * Self::plot_w(),
            top + Self::plot_h() - (v - y0) / (y1 - y0) * Self::plot_h(),
        )
    }
}

fn widen((lo, hi): (f64, f64)) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn label(x: f64) -> String {
    if x.abs() >= 1000.0 || x == x.trunc() {
        format!("{x:.0}")
    } else {
        format!("{x:.3}")
    }
}

/// Four-panel line chart of the monitored aggregates against step.
pub fn render_timeseries(frames: &[MetricsFrame]) -> Result<String, CliError> {
    let (first, last) = match (frames.first(), frames.last()) {
        (Some(a), Some(b)) => (a.step as f64, b.step as f64),
        _ => return Err(CliError::Usage("cannot plot an empty frame list".into())),
    };
    let width = 2.0 * PANEL_W;
    let height = 2.0 * PANEL_H;
    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">
<rect width="{w}" height="{h}" fill="white"/>
"#,
        w = width,
        h = height
    );

    for (i, (key, title, get)) in SERIES.iter().enumerate() {
        let origin = ((i % 2) as f64 * PANEL_W, (i / 2) as f64 * PANEL_H);
        let values: Vec<f64> = frames.iter().filter_map(get).collect();
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let y = if values.is_empty() {
            (0.0, 1.0)
        } else {
            (lo, hi)
        };
        let axes = PanelAxes::new((first, last), y, origin);
        render_panel(&mut svg, key, title, &axes, frames, *get);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn render_panel(
    svg: &mut String,
    key: &str,
    title: &str,
    axes: &PanelAxes,
    frames: &[MetricsFrame],
    get: fn(&MetricsFrame) -> Option<f64>,
) {
    let (ox, oy) = axes.origin;
    let left = ox + MARGIN_LEFT;
    let top = oy + MARGIN_TOP;
    let bottom = top + PanelAxes::plot_h();
    let right = left + PanelAxes::plot_w();

    let _ = writeln!(svg, r#"<g class="panel" id="panel-{key}">"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" {FONT} font-size="14" fill="{COLOR_AXIS}">{title}</text>"#,
        num((left + right) / 2.0),
        num(oy + 22.0)
    );
    let _ = writeln!(
        svg,
        r#"<path class="axis" d="M{} {} L{} {} L{} {}" fill="none" stroke="{COLOR_AXIS}" stroke-width="1"/>"#,
        num(left),
        num(top),
        num(left),
        num(bottom),
        num(right),
        num(bottom)
    );
    let ticks = [
        (axes.y_range.0, left - 6.0, bottom + 4.0, "end"),
        (axes.y_range.1, left - 6.0, top + 4.0, "end"),
    ];
    for (v, x, y, anchor) in ticks {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="{anchor}" {FONT} font-size="11" fill="{COLOR_AXIS}">{}</text>"#,
            num(x),
            num(y),
            label(v)
        );
    }
    for (v, x) in [(axes.x_range.0, left), (axes.x_range.1, right)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" {FONT} font-size="11" fill="{COLOR_AXIS}">{}</text>"#,
            num(x),
            num(bottom + 16.0),
            label(v)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" {FONT} font-size="11" fill="{COLOR_AXIS}">step</text>"#,
        num((left + right) / 2.0),
        num(bottom + 32.0)
    );

    for segment in segments(frames, get) {
        let points: Vec<(f64, f64)> = segment.iter().map(|&(t, v)| axes.map(t, v)).collect();
        if let [(x, y)] = points[..] {
            let _ = writeln!(
                svg,
                r#"<circle class="marker" cx="{}" cy="{}" r="3" fill="{COLOR_LINE}"/>"#,
                num(x),
                num(y)
            );
        } else {
            let mut d = String::new();
            for (j, (x, y)) in points.iter().enumerate() {
                let _ = write!(
                    d,
                    "{}{} {}",
                    if j == 0 { "M" } else { " L" },
                    num(*x),
                    num(*y)
                );
            }
            let _ = writeln!(
                svg,
                r#"<path class="series" d="{d}" fill="none" stroke="{COLOR_LINE}" stroke-width="1.5"/>"#
            );
        }
    }
    svg.push_str("</g>\n");
}

/// Maximal runs of consecutive frames with a value.
fn segments(
    frames: &[MetricsFrame],
    get: fn(&MetricsFrame) -> Option<f64>,
) -> Vec<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for f in frames {
        match get(f) {
            Some(v) => cur.push((f.step as f64, v)),
            None if !cur.is_empty() => out.push(std::mem::take(&mut cur)),
            None => {}
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Bubble chart of the living systems at one step.
pub fn render_snapshot(step: u64, population: &[SystemRecord]) -> String {
    let alive: Vec<&SystemRecord> = population.iter().filter(|r| r.alive).collect();
    let cols = (alive.len() as f64).sqrt().ceil().max(1.0) as usize;
    let rows = alive.len().div_ceil(cols).max(1);
    let legend_h = 56.0;
    let width = (cols as f64 * CELL).max(360.0);
    let height = rows as f64 * CELL + legend_h + 30.0;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">
<defs>
<pattern id="dots" width="6" height="6" patternUnits="userSpaceOnUse"><circle cx="3" cy="3" r="1.2" fill="{COLOR_AGENT}"/></pattern>
</defs>
<rect width="{w}" height="{h}" fill="white"/>
<text x="8" y="20" {FONT} font-size="14" fill="{COLOR_AXIS}">step {step}: {n} living systems</text>
"#,
        w = num(width),
        h = num(height),
        n = alive.len()
    );

    if alive.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text class="empty" x="{}" y="{}" text-anchor="middle" {FONT} font-size="14" fill="{COLOR_AXIS}">no living systems</text>"#,
            num(width / 2.0),
            num(30.0 + CELL / 2.0)
        );
    } else {
        let max_s = alive.iter().map(|r| r.s_crit).fold(0.0, f64::max);
        let k = (CELL / 2.0 - CELL_PAD) / max_s;
        for (i, r) in alive.iter().enumerate() {
            let cx = (i % cols) as f64 * CELL + CELL / 2.0;
            let cy = 30.0 + (i / cols) as f64 * CELL + CELL / 2.0;
            let fill = if r.rho == 1 {
                COLOR_AGENT
            } else {
                "url(#dots)"
            };
            let _ = writeln!(
                svg,
                r#"<g class="system" data-id="{id}" data-rho="{rho}"><circle class="state" cx="{cx}" cy="{cy}" r="{rs}" fill="{fill}" fill-opacity="0.85" stroke="{COLOR_AGENT}" stroke-width="1"/><circle class="model" cx="{cx}" cy="{cy}" r="{rr}" fill="none" stroke="{COLOR_AXIS}" stroke-width="1.2" stroke-dasharray="3,2"/></g>"#,
                id = r.id,
                rho = r.rho,
                cx = num(cx),
                cy = num(cy),
                rs = k * r.s,
                rr = k * r.r,
            );
        }
    }

    let ly = height - legend_h + 14.0;
    let _ = write!(
        svg,
        r#"<g class="legend">
<circle cx="16" cy="{ly}" r="8" fill="{COLOR_AGENT}" fill-opacity="0.85" stroke="{COLOR_AGENT}"/>
<text x="30" y="{ty}" {FONT} font-size="12" fill="{COLOR_AXIS}">agency &#961;=1 (solid)</text>
<circle cx="186" cy="{ly}" r="8" fill="url(#dots)" stroke="{COLOR_AGENT}"/>
<text x="200" y="{ty}" {FONT} font-size="12" fill="{COLOR_AXIS}">agency &#961;=0 (dotted)</text>
<text x="8" y="{ty2}" {FONT} font-size="12" fill="{COLOR_AXIS}">outer radius &#8733; state s, dashed inner radius &#8733; model r</text>
</g>
</svg>
"#,
        ly = num(ly),
        ty = num(ly + 4.0),
        ty2 = num(ly + 28.0)
    );
    svg
}
