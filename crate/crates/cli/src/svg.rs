//! Hand-written SVG charts.
//!
//! Coordinates are printed with two decimals and elements are emitted in
//! input order, so identical input gives identical bytes.

use std::fmt::Write as _;

use chrono::NaiveDate;
use epicurve::analysis::{CorrelationMatrix, Histogram};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layout {
    pub width: f64,
    pub height: f64,
    pub margin_left: f64,
    pub margin_right: f64,
    pub margin_top: f64,
    pub margin_bottom: f64,
}

impl Default for Layout {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 450.0,
            margin_left: 70.0,
            margin_right: 150.0,
            margin_top: 40.0,
            margin_bottom: 50.0,
        }
    }
}

impl Layout {
    fn plot_width(&self) -> f64 {
        self.width - self.margin_left - self.margin_right
    }

    fn plot_height(&self) -> f64 {
        self.height - self.margin_top - self.margin_bottom
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSeries {
    pub name: String,
    pub points: Vec<(NaiveDate, f64)>,
    pub color: String,
    pub dashed: bool,
}

impl LineSeries {
    pub fn new(name: impl Into<String>, points: Vec<(NaiveDate, f64)>, color: &str) -> Self {
        Self { name: name.into(), points, color: color.to_string(), dashed: false }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

/// Shaded region between two curves sharing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub name: String,
    pub dates: Vec<NaiveDate>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SvgError {
    Empty,
    TooFewPoints(String),
}

impl std::fmt::Display for SvgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SvgError::Empty => write!(f, "nothing to plot"),
            SvgError::TooFewPoints(name) => write!(f, "series {name:?} needs at least 2 points"),
        }
    }
}

impl std::error::Error for SvgError {}

/// Data-to-pixel mapping of a line chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartScale {
    pub layout: Layout,
    pub first: NaiveDate,
    pub days: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl ChartScale {
    pub fn fit(series: &[LineSeries], bands: &[Band], layout: Layout) -> Result<Self, SvgError> {
        if series.is_empty() {
            return Err(SvgError::Empty);
        }
        if let Some(s) = series.iter().find(|s| s.points.len() < 2) {
            return Err(SvgError::TooFewPoints(s.name.clone()));
        }
        let dates = series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0))
            .chain(bands.iter().flat_map(|b| b.dates.iter().copied()));
        let (first, last) = dates.fold((NaiveDate::MAX, NaiveDate::MIN), |(a, b), d| (a.min(d), b.max(d)));
        let values = series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .chain(bands.iter().flat_map(|b| b.lower.iter().chain(&b.upper).copied()));
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let y_min = lo.min(0.0);
        let mut y_max = nice_ceiling(hi);
        if y_max <= y_min {
            y_max = y_min + 1.0;
        }
        Ok(Self {
            layout,
            first,
            days: ((last - first).num_days() as f64).max(1.0),
            y_min,
            y_max,
        })
    }

    pub fn x(&self, date: NaiveDate) -> f64 {
        let d = (date - self.first).num_days() as f64;
        self.layout.margin_left + d / self.days * self.layout.plot_width()
    }

    pub fn y(&self, value: f64) -> f64 {
        let frac = (value - self.y_min) / (self.y_max - self.y_min);
        self.layout.margin_top + (1.0 - frac) * self.layout.plot_height()
    }
}

/// Smallest 1, 2 or 5 times a power of ten at or above `v`.
fn nice_ceiling(v: f64) -> f64 {
    if !(v > 0.0) {
        return 1.0;
    }
    let p = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * p).find(|c| *c >= v).unwrap_or(10.0 * p)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, layout: &Layout, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = layout.width,
        h = layout.height
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, layout.width, layout.height);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        layout.width / 2.0,
        escape(title)
    );
}

fn format_tick(v: f64) -> String {
    if v.abs() >= 1e6 {
        format!("{:.1}M", v / 1e6)
    } else if v.abs() >= 1e4 {
        format!("{:.0}k", v / 1e3)
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

pub fn render_line_chart(title: &str, series: &[LineSeries], bands: &[Band], layout: Layout) -> Result<String, SvgError> {
    let scale = ChartScale::fit(series, bands, layout)?;
    let mut out = String::new();
    header(&mut out, &layout, title);
    let (left, right) = (layout.margin_left, layout.width - layout.margin_right);
    let (top, bottom) = (layout.margin_top, layout.height - layout.margin_bottom);

    for i in 0..=5 {
        let v = scale.y_min + (scale.y_max - scale.y_min) * i as f64 / 5.0;
        let y = scale.y(v);
        let _ = writeln!(out, r##"<line x1="{left:.2}" y1="{y:.2}" x2="{right:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, left - 6.0, y + 4.0, format_tick(v));
    }
    let ticks = 6.min(scale.days as i64);
    for i in 0..=ticks {
        let date = scale.first + chrono::Days::new((scale.days as i64 * i / ticks.max(1)) as u64);
        let x = scale.x(date);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, bottom + 18.0, date.format("%m-%d"));
    }
    let _ = writeln!(out, r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, right - left, bottom - top);

    for band in bands {
        let mut pts: Vec<String> = band.dates.iter().zip(&band.upper).map(|(d, v)| format!("{:.2},{:.2}", scale.x(*d), scale.y(*v))).collect();
        pts.extend(band.dates.iter().zip(&band.lower).rev().map(|(d, v)| format!("{:.2},{:.2}", scale.x(*d), scale.y(*v))));
        let _ = writeln!(
            out,
            r#"<polygon class="band" points="{}" fill="{}" fill-opacity="0.25" stroke="none"><title>{}</title></polygon>"#,
            pts.join(" "),
            band.color,
            escape(&band.name)
        );
    }
    for s in series {
        let pts: Vec<String> = s.points.iter().map(|(d, v)| format!("{:.2},{:.2}", scale.x(*d), scale.y(*v))).collect();
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline class="series" points="{}" fill="none" stroke="{}" stroke-width="2"{dash}><title>{}</title></polyline>"#,
            pts.join(" "),
            s.color,
            escape(&s.name)
        );
    }

    let legend_x = right + 12.0;
    let entries = bands.iter().map(|b| (&b.name, &b.color, false)).chain(series.iter().map(|s| (&s.name, &s.color, true)));
    for (i, (name, color, line)) in entries.enumerate() {
        let y = top + 10.0 + 20.0 * i as f64;
        if line {
            let _ = writeln!(out, r#"<line x1="{legend_x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#, legend_x + 18.0);
        } else {
            let _ = writeln!(out, r#"<rect x="{legend_x:.2}" y="{:.2}" width="18" height="10" fill="{color}" fill-opacity="0.25"/>"#, y - 5.0);
        }
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, legend_x + 24.0, y + 4.0, escape(name));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub const NEGATIVE: (u8, u8, u8) = (33, 102, 172);
pub const NEUTRAL: (u8, u8, u8) = (247, 247, 247);
pub const POSITIVE: (u8, u8, u8) = (178, 24, 43);
pub const UNDEFINED: (u8, u8, u8) = (190, 190, 190);

/// Diverging scale: -1 blue, 0 near-white, +1 red, linear in between.
pub fn diverging_color(r: f64) -> (u8, u8, u8) {
    let r = r.clamp(-1.0, 1.0);
    let (from, to, t) = if r < 0.0 { (NEUTRAL, NEGATIVE, -r) } else { (NEUTRAL, POSITIVE, r) };
    let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
    (mix(from.0, to.0), mix(from.1, to.1), mix(from.2, to.2))
}

fn hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

pub fn render_heatmap(title: &str, matrix: &CorrelationMatrix) -> String {
    let n = matrix.len();
    let cell = 56.0;
    let label_space = 170.0;
    let size = label_space + cell * n as f64 + 30.0;
    let layout = Layout { width: size, height: size, ..Layout::default() };
    let mut out = String::new();
    header(&mut out, &layout, title);
    for (i, name) in matrix.feature_names().iter().enumerate() {
        let c = label_space + cell * (i as f64 + 0.5);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{c:.2}" text-anchor="end" dominant-baseline="middle">{}</text>"#, label_space - 6.0, escape(name));
        let _ = writeln!(
            out,
            r#"<text x="{c:.2}" y="{:.2}" text-anchor="start" transform="rotate(-45 {c:.2} {:.2})">{}</text>"#,
            label_space - 6.0,
            label_space - 6.0,
            escape(name)
        );
    }
    for i in 0..n {
        for j in 0..n {
            let color = matrix.get(i, j).map_or(UNDEFINED, diverging_color);
            let x = label_space + cell * j as f64;
            let y = label_space + cell * i as f64;
            let _ = writeln!(
                out,
                r#"<rect class="cell" x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="{}" stroke="white"/>"#,
                hex(color)
            );
            let ink = if matrix.get(i, j).is_some_and(|v| v.abs() > 0.6) { "white" } else { "black" };
            let _ = writeln!(
                out,
                r#"<text class="label" x="{:.2}" y="{:.2}" text-anchor="middle" dominant-baseline="middle" fill="{ink}">{}</text>"#,
                x + cell / 2.0,
                y + cell / 2.0,
                matrix.label(i, j)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_histogram(title: &str, hist: &Histogram, layout: Layout) -> String {
    let mut out = String::new();
    header(&mut out, &layout, title);
    let max = hist.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let bins = hist.counts.len() as f64;
    let pw = layout.plot_width();
    let ph = layout.plot_height();
    let bottom = layout.margin_top + ph;
    for (i, &count) in hist.counts.iter().enumerate() {
        let h = count as f64 / max * ph;
        let x = layout.margin_left + pw * i as f64 / bins;
        let _ = writeln!(
            out,
            r##"<rect class="bar" x="{x:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="#4477aa" stroke="white"><title>{}: {}</title></rect>"##,
            bottom - h,
            pw / bins,
            format!("[{}, {})", format_tick(hist.bin_edges[i]), format_tick(hist.bin_edges[i + 1])),
            count
        );
    }
    for (i, edge) in hist.bin_edges.iter().enumerate() {
        let x = layout.margin_left + pw * i as f64 / bins;
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="10">{}</text>"#, bottom + 16.0, format_tick(*edge));
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, layout.margin_left - 6.0, layout.margin_top + 4.0, max);
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">0</text>"#, layout.margin_left - 6.0, bottom + 4.0);
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" transform="rotate(-90 18 {:.2})" text-anchor="middle">countries</text>"#,
        layout.margin_top + ph / 2.0,
        layout.margin_top + ph / 2.0
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 3, day).unwrap()
    }

    #[test]
    fn color_scale_endpoints() {
        assert_eq!(diverging_color(1.0), POSITIVE);
        assert_eq!(diverging_color(-1.0), NEGATIVE);
        assert_eq!(diverging_color(0.0), NEUTRAL);
    }

    #[test]
    fn nice_ceilings() {
        assert_eq!(nice_ceiling(199.0), 200.0);
        assert_eq!(nice_ceiling(7201.0), 10_000.0);
        assert_eq!(nice_ceiling(0.0), 1.0);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert_eq!(render_line_chart("t", &[], &[], Layout::default()), Err(SvgError::Empty));
        let one = LineSeries::new("a", vec![(d(1), 1.0)], "red");
        assert!(matches!(render_line_chart("t", &[one], &[], Layout::default()), Err(SvgError::TooFewPoints(_))));
    }

    #[test]
    fn identical_series_overlap() {
        let pts = vec![(d(1), 1.0), (d(2), 5.0), (d(3), 2.0)];
        let svg = render_line_chart("t", &[LineSeries::new("a", pts.clone(), "red"), LineSeries::new("b", pts, "blue")], &[], Layout::default()).unwrap();
        let lines: Vec<&str> = svg
            .lines()
            .filter(|l| l.starts_with("<polyline"))
            .map(|l| l.split("points=\"").nth(1).unwrap().split('"').next().unwrap())
            .collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], lines[1]);
    }
}
