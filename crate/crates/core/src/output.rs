//! Serialization helpers shared by reports and the command line.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;
use crate::experiment::Histogram;

pub const SIGNIFICANT_DIGITS: usize = 6;

/// `x` rounded to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Shortest decimal form of `x` after rounding to six significant digits.
pub fn fmt_sig(x: f64) -> String {
    format!("{}", round_sig(x, SIGNIFICANT_DIGITS))
}

fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            *value = serde_json::Number::from_f64(round_sig(x, SIGNIFICANT_DIGITS)).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to six significant digits and a
/// trailing newline. Non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut tree = serde_json::to_value(value)?;
    round_floats(&mut tree);
    let mut text = serde_json::to_string_pretty(&tree)?;
    text.push('\n');
    Ok(text)
}

/// Writes via a temporary file in the target directory and renames it into
/// place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn trials_csv(capacities: &[u64]) -> String {
    let mut out = String::from("trial,capacity\n");
    for (i, c) in capacities.iter().enumerate() {
        let _ = writeln!(out, "{i},{c}");
    }
    out
}

pub fn histogram_csv(hist: &Histogram) -> String {
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for (i, count) in hist.counts.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", fmt_sig(hist.bin_edges[i]), fmt_sig(hist.bin_edges[i + 1]), count);
    }
    out
}

/// Self-contained bar chart of a capacity histogram.
pub fn histogram_svg(hist: &Histogram, title: &str) -> String {
    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 400.0;
    const LEFT: f64 = 60.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 60.0;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let bins = hist.counts.len().max(1);
    let peak = hist.counts.iter().copied().max().unwrap_or(0).max(1);
    let bar_w = plot_w / bins as f64;
    let label_every = bins.div_ceil(20);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for (i, &count) in hist.counts.iter().enumerate() {
        let h = plot_h * count as f64 / peak as f64;
        let x = LEFT + bar_w * i as f64;
        let y = TOP + plot_h - h;
        let _ = writeln!(
            svg,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#4a74b4" stroke="#1f3b63" stroke-width="0.5"/>"##,
            fmt_sig(x),
            fmt_sig(y),
            fmt_sig(bar_w),
            fmt_sig(h)
        );
        if i % label_every == 0 {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"#,
                fmt_sig(x + bar_w / 2.0),
                TOP + plot_h + 14.0,
                fmt_sig(hist.bin_edges[i])
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{peak}</text>"#,
        LEFT - 4.0,
        TOP + 4.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">0</text>"#,
        LEFT - 4.0,
        TOP + plot_h
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">min-cut capacity</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">frequency</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
