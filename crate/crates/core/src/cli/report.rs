use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{FinbathError, Result};
use crate::numeric::round_sig;

/// Significant digits of every real in a report.
pub const REPORT_DIGITS: usize = 12;

/// A real rounded to [`REPORT_DIGITS`]; non-finite values become strings.
pub fn num(v: f64) -> Value {
    if v.is_nan() {
        Value::String("nan".into())
    } else if v.is_infinite() {
        Value::String(if v > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        let r = round_sig(v, REPORT_DIGITS);
        // -0 would print as "-0.0"
        serde_json::Number::from_f64(if r == 0.0 { 0.0 } else { r }).map_or(Value::Null, Value::Number)
    }
}

pub fn nums(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|&v| num(v)).collect())
}

/// A reported quantity with the operation that produced it.
pub fn sourced(value: f64, source: &str) -> Value {
    object([("source", Value::String(source.into())), ("value", num(value))])
}

pub fn object<'a>(entries: impl IntoIterator<Item = (&'a str, Value)>) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// Rounds every float and orders every object's keys.
pub fn canonicalize(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.iter().map(canonicalize).collect()),
        Value::Object(o) => {
            let sorted: BTreeMap<&String, Value> = o.iter().map(|(k, v)| (k, canonicalize(v))).collect();
            let mut m = Map::new();
            for (k, v) in sorted {
                m.insert(k.clone(), v);
            }
            Value::Object(m)
        }
        other => other.clone(),
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonicalize(v)).unwrap_or_default();
    s.push('\n');
    s
}

/// A file produced by a command, written under `--out-dir`.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
    /// Data for an optional SVG rendering.
    pub plot: Option<Plot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: Value,
    pub artifacts: Vec<Artifact>,
    /// False when any residual or validation check failed.
    pub valid: bool,
}

impl Report {
    pub fn render(&self) -> String {
        render(&self.body)
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| FinbathError::Argument(format!("cannot write {}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.flush().map_err(io)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))
            .map_err(io)?;
    }
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes every artifact, and an SVG beside each plottable one when `svg`
/// is set.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact], svg: bool) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)
        .map_err(|e| FinbathError::Argument(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for a in artifacts {
        write_atomic(&dir.join(&a.name), a.contents.as_bytes())?;
        written.push(a.name.clone());
        if let (true, Some(plot)) = (svg, &a.plot) {
            let name = match a.name.rsplit_once('.') {
                Some((stem, _)) => format!("{stem}.svg"),
                None => format!("{}.svg", a.name),
            };
            write_atomic(&dir.join(&name), render_svg(plot).as_bytes())?;
            written.push(name);
        }
    }
    Ok(written)
}

const SVG_W: f64 = 480.0;
const SVG_H: f64 = 360.0;
const MARGIN: f64 = 48.0;

/// Single-series line plot.
pub fn render_svg(plot: &Plot) -> String {
    let finite: Vec<(f64, f64)> = plot.points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
    let range = |f: fn(&(f64, f64)) -> f64| {
        let lo = finite.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = finite.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo <= 0.0 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = range(|p| p.0);
    let (y0, y1) = range(|p| p.1);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (SVG_W - 2.0 * MARGIN);
    let sy = |y: f64| SVG_H - MARGIN - (y - y0) / (y1 - y0) * (SVG_H - 2.0 * MARGIN);
    let path: Vec<String> = finite.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<path d=\"M{m},{b} H{r} M{m},{b} V{m}\" stroke=\"black\" fill=\"none\"/>\n",
        m = MARGIN,
        b = SVG_H - MARGIN,
        r = SVG_W - MARGIN
    ));
    s.push_str(&format!(
        "<polyline points=\"{}\" stroke=\"steelblue\" stroke-width=\"1.5\" fill=\"none\"/>\n",
        path.join(" ")
    ));
    let label = |x: f64, y: f64, anchor: &str, text: &str| {
        format!("<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"11\" text-anchor=\"{anchor}\">{}</text>\n", escape(text))
    };
    s.push_str(&label(SVG_W / 2.0, 20.0, "middle", &plot.title));
    s.push_str(&label(SVG_W / 2.0, SVG_H - 10.0, "middle", &plot.x_label));
    s.push_str(&label(12.0, SVG_H / 2.0, "start", &plot.y_label));
    for (v, x, y, a) in [
        (x0, MARGIN, SVG_H - MARGIN + 14.0, "start"),
        (x1, SVG_W - MARGIN, SVG_H - MARGIN + 14.0, "end"),
        (y0, MARGIN - 4.0, SVG_H - MARGIN, "end"),
        (y1, MARGIN - 4.0, MARGIN + 4.0, "end"),
    ] {
        s.push_str(&label(x, y, a, &format!("{:.4}", v)));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
