//! CSV and SVG writers. Files are written to a sibling temporary path and
//! renamed into place, so a failed run never leaves a partial file behind.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use dgopt::{DirectionKind, RunResult, TraceRecord};

pub const SUMMARY_HEADER: &str = "final_f,iters,evals,stop_reason";
pub const COMPARE_HEADER: &str = "strategy,seed,cum_evals,rel_obj";

pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let mut tmp = PathBuf::from(path);
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    tmp.set_file_name(format!(".{name}.partial"));
    let result = (|| {
        let mut out = BufWriter::new(fs::File::create(&tmp)?);
        fill(&mut out)?;
        out.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}

pub fn write_trace(path: &Path, trace: &[TraceRecord]) -> Result<()> {
    write_atomic(path, |out| {
        dgopt::trace::write_csv(trace, out).map_err(|e| io::Error::other(e.to_string()))
    })
}

pub fn summary_line(r: &RunResult) -> String {
    format!("{:e},{},{},{}", r.final_value, r.iterations, r.total_evals, r.stop_reason)
}

pub fn write_summary(path: &Path, r: &RunResult) -> Result<()> {
    write_atomic(path, |out| writeln!(out, "{SUMMARY_HEADER}\n{}", summary_line(r)))
}

/// One ensemble member as a relative-objective series, starting with the
/// initial point.
pub struct Series {
    pub kind: DirectionKind,
    pub seed: u64,
    pub points: Vec<(u64, f64)>,
}

impl Series {
    pub fn new(kind: DirectionKind, seed: u64, r: &RunResult, v_star: Option<f64>) -> Self {
        let rel = |f: f64| match v_star {
            Some(v) => (f - v) / (r.initial_value - v),
            None => f,
        };
        let mut points = vec![(1, rel(r.initial_value))];
        points.extend(r.trace.iter().map(|t| (t.cumulative_evals, rel(t.f_value))));
        Series { kind, seed, points }
    }
}

pub fn compare_csv(series: &[Series]) -> String {
    let mut s = String::from(COMPARE_HEADER);
    s.push('\n');
    for m in series {
        for (evals, rel) in &m.points {
            let _ = writeln!(s, "{},{},{evals},{rel:e}", m.kind.name(), m.seed);
        }
    }
    s
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Line chart of log10(rel_obj) against evaluations, one colour per strategy.
pub fn compare_svg(series: &[Series]) -> String {
    let (w, h, pad) = (720.0, 440.0, 60.0);
    let usable: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|m| {
            m.points
                .iter()
                .filter(|(_, r)| *r > 0.0 && r.is_finite())
                .map(|&(e, r)| (e as f64, r.log10()))
                .collect()
        })
        .collect();
    let all = usable.iter().flatten();
    let x_max = all.clone().map(|p| p.0).fold(1.0, f64::max);
    let (mut y_min, mut y_max) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    if !y_min.is_finite() {
        (y_min, y_max) = (-1.0, 0.0);
    }
    let (y_min, y_max) = (y_min.floor(), y_max.ceil().max(y_min.floor() + 1.0));
    let sx = |x: f64| pad + (w - 2.0 * pad) * x / x_max;
    let sy = |y: f64| h - pad - (h - 2.0 * pad) * (y - y_min) / (y_max - y_min);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{pad} {pad} V{} H{}" fill="none" stroke="black"/>"#,
        h - pad,
        w - pad
    );
    let mut tick = y_min;
    while tick <= y_max {
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">1e{tick}</text>"#, pad - 6.0, sy(tick) + 4.0);
        tick += ((y_max - y_min) / 8.0).ceil().max(1.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{x_max} evaluations</text>"#, w - pad, h - pad + 20.0);
    let mut kinds: Vec<DirectionKind> = Vec::new();
    for (m, pts) in series.iter().zip(&usable) {
        if !kinds.contains(&m.kind) {
            kinds.push(m.kind);
        }
        let colour = PALETTE[kinds.iter().position(|k| *k == m.kind).unwrap() % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y))).collect();
        if !path.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-opacity="0.7"/>"#,
                path.join(" ")
            );
        }
    }
    for (i, k) in kinds.iter().enumerate() {
        let y = pad + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" fill="{}">{}</text>"#,
            w - pad - 80.0,
            PALETTE[i % PALETTE.len()],
            k.name()
        );
    }
    s.push_str("</svg>\n");
    s
}
