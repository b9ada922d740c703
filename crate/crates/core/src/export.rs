//! CSV tables and the SVG phase portrait.
//!
//! Numbers are written with 17 significant digits so that every value
//! round-trips; lines end in `\n`.

use crate::error::{Error, Result};
use crate::phase::{Eigenvalues, FixedPoint, FixedPointKind, PhasePortrait, Window};
use std::fmt::Write as _;
use std::io::Write;

/// Round-trip formatting: 17 significant digits in scientific notation.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("csv: {e}"))
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Numeric table with a header row.
pub fn write_table<W, I, R>(out: W, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    let mut w = writer(out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.as_ref().iter().map(|&v| fmt_num(v)))
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("csv: {e}")))
}

/// Fixed points with trace, determinant, discriminant, kind, eigenvalues and
/// unit eigenvectors. Complex eigenvalues fill the `_re`/`_im` columns;
/// missing eigenvectors are left empty.
pub fn write_fixed_points<W: Write>(out: W, points: &[FixedPoint]) -> Result<()> {
    let mut w = writer(out);
    w.write_record([
        "X",
        "Y",
        "trace",
        "det",
        "discriminant",
        "kind",
        "theta1_re",
        "theta1_im",
        "theta2_re",
        "theta2_im",
        "u1_x",
        "u1_y",
        "u2_x",
        "u2_y",
    ])
    .map_err(csv_err)?;
    for fp in points {
        let c = &fp.class;
        let mut rec = vec![
            fmt_num(fp.coords.0),
            fmt_num(fp.coords.1),
            fmt_num(c.trace),
            fmt_num(c.det),
            fmt_num(c.discriminant),
            c.kind.name().to_string(),
        ];
        match c.eigenvalues {
            Eigenvalues::Real { values: (a, b) } => {
                rec.extend([fmt_num(a), fmt_num(0.0), fmt_num(b), fmt_num(0.0)]);
            }
            Eigenvalues::Complex { re, im } => {
                rec.extend([fmt_num(re), fmt_num(im), fmt_num(re), fmt_num(-im)]);
            }
        }
        match c.eigenvectors {
            Some([u, v]) => rec.extend([fmt_num(u.0), fmt_num(u.1), fmt_num(v.0), fmt_num(v.1)]),
            None => rec.extend(std::iter::repeat_n(String::new(), 4)),
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("csv: {e}")))
}

pub const SVG_SIZE: f64 = 800.0;
const MARGIN: f64 = 70.0;

struct Frame {
    window: Window,
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.window.x0) / (self.window.x1 - self.window.x0) * (SVG_SIZE - 2.0 * MARGIN)
    }
    fn sy(&self, y: f64) -> f64 {
        SVG_SIZE - MARGIN - (y - self.window.y0) / (self.window.y1 - self.window.y0) * (SVG_SIZE - 2.0 * MARGIN)
    }
}

/// Roughly `target` evenly spaced round values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{:.3}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Split a path into runs of consecutive points inside the window.
fn visible_runs(points: impl Iterator<Item = (f64, f64)>, window: &Window) -> Vec<Vec<(f64, f64)>> {
    let mut runs = Vec::new();
    let mut cur = Vec::new();
    for p in points {
        if window.contains(p) {
            cur.push(p);
        } else if !cur.is_empty() {
            runs.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    runs.retain(|r| r.len() > 1);
    runs
}

fn polyline(svg: &mut String, frame: &Frame, run: &[(f64, f64)], class: &str) {
    svg.push_str(&format!("<polyline class=\"{class}\" points=\""));
    for (i, &(x, y)) in run.iter().enumerate() {
        if i > 0 {
            svg.push(' ');
        }
        let _ = write!(svg, "{:.2},{:.2}", frame.sx(x), frame.sy(y));
    }
    svg.push_str("\"/>\n");
}

fn glyph(svg: &mut String, frame: &Frame, fp: &FixedPoint) {
    let (cx, cy) = (frame.sx(fp.coords.0), frame.sy(fp.coords.1));
    let kind = fp.kind();
    let class = kind.name();
    match kind {
        FixedPointKind::Saddle => {
            let r = 8.0;
            let _ = writeln!(
                svg,
                "<path class=\"fp {class}\" d=\"M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}\"/>",
                cx - r,
                cy - r,
                cx + r,
                cy + r,
                cx - r,
                cy + r,
                cx + r,
                cy - r
            );
        }
        k if k.is_node() => {
            let _ = writeln!(
                svg,
                "<circle class=\"fp {class}\" cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"7\"/>"
            );
        }
        _ => {
            let _ = writeln!(
                svg,
                "<rect class=\"fp {class}\" x=\"{:.2}\" y=\"{:.2}\" width=\"12\" height=\"12\"/>",
                cx - 6.0,
                cy - 6.0
            );
        }
    }
    let _ = writeln!(
        svg,
        "<text class=\"fplabel\" x=\"{:.2}\" y=\"{:.2}\">({}, {}) {class}</text>",
        cx + 10.0,
        cy - 10.0,
        tick_label(fp.coords.0),
        tick_label(fp.coords.1)
    );
}

/// Standalone SVG of a phase portrait. Identical input gives identical
/// bytes; the first comment records the generator version.
pub fn portrait_svg(pp: &PhasePortrait) -> String {
    let frame = Frame { window: pp.window };
    let w = &pp.window;
    let mut svg = String::new();
    let _ = writeln!(svg, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(svg, "<!-- generator: lamptf {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">",
        s = SVG_SIZE
    );
    svg.push_str(
        "<style>\n\
         .axis{stroke:#000;stroke-width:1.2;fill:none}\n\
         .tick{stroke:#000;stroke-width:1}\n\
         .label{font:12px sans-serif;fill:#000}\n\
         .traj{stroke:#1f4e9c;stroke-width:1;fill:none;stroke-opacity:0.8}\n\
         .nullM{stroke:#c0392b;stroke-width:1.2;stroke-dasharray:6,4;fill:none}\n\
         .nullN{stroke:#27ae60;stroke-width:1.2;stroke-dasharray:6,4;fill:none}\n\
         .fp{stroke:#000;stroke-width:2.5;fill:#000}\n\
         .Saddle{fill:none}\n\
         .fplabel{font:11px sans-serif;fill:#333}\n\
         </style>\n",
    );
    let (left, right) = (frame.sx(w.x0), frame.sx(w.x1));
    let (bottom, top) = (frame.sy(w.y0), frame.sy(w.y1));
    let _ = writeln!(
        svg,
        "<rect class=\"axis\" x=\"{left:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\"/>",
        right - left,
        bottom - top
    );
    for x in ticks(w.x0, w.x1, 8) {
        let sx = frame.sx(x);
        let _ = writeln!(
            svg,
            "<line class=\"tick\" x1=\"{sx:.2}\" y1=\"{bottom:.2}\" x2=\"{sx:.2}\" y2=\"{:.2}\"/>",
            bottom + 6.0
        );
        let _ = writeln!(
            svg,
            "<text class=\"label\" x=\"{sx:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            bottom + 20.0,
            tick_label(x)
        );
    }
    for y in ticks(w.y0, w.y1, 8) {
        let sy = frame.sy(y);
        let _ = writeln!(
            svg,
            "<line class=\"tick\" x1=\"{:.2}\" y1=\"{sy:.2}\" x2=\"{left:.2}\" y2=\"{sy:.2}\"/>",
            left - 6.0
        );
        let _ = writeln!(
            svg,
            "<text class=\"label\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            left - 9.0,
            sy + 4.0,
            tick_label(y)
        );
    }
    let _ = writeln!(
        svg,
        "<text class=\"label\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">X</text>",
        0.5 * (left + right),
        SVG_SIZE - 20.0
    );
    let _ = writeln!(
        svg,
        "<text class=\"label\" x=\"20\" y=\"{:.2}\" text-anchor=\"middle\">Y</text>",
        0.5 * (top + bottom)
    );
    svg.push_str("<g id=\"nullclines\">\n");
    for nc in &pp.nullclines {
        let class = match nc.component {
            crate::phase::Component::M => "nullM",
            crate::phase::Component::N => "nullN",
        };
        for run in visible_runs(nc.points.iter().copied(), w) {
            polyline(&mut svg, &frame, &run, class);
        }
    }
    svg.push_str("</g>\n<g id=\"trajectories\">\n");
    for t in &pp.trajectories {
        let pts = t.curve.samples.iter().map(|s| (s.state[0], s.state[1]));
        for run in visible_runs(pts, w) {
            polyline(&mut svg, &frame, &run, "traj");
        }
    }
    svg.push_str("</g>\n<g id=\"fixed-points\">\n");
    for fp in &pp.fixed_points {
        glyph(&mut svg, &frame, fp);
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}
