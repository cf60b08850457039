//! JSON, CSV and SVG rendering. Every rendered file carries the manifest hash.

use std::fmt::Write as _;

use cdgsk_core::{Complex64, FourierSeries};
use serde_json::{json, Value};

/// `{"N": N, "re": [...], "im": [...]}` ordered `n = −N..N`.
pub fn series_json(s: &FourierSeries) -> Value {
    let re: Vec<f64> = s.coeffs().iter().map(|c| c.re).collect();
    let im: Vec<f64> = s.coeffs().iter().map(|c| c.im).collect();
    json!({"N": s.n_max(), "re": re, "im": im})
}

/// `[re, im]`.
pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_list_json(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| complex_json(z)).collect())
}

/// Row-major nested arrays of `[re, im]` for a 3×3 matrix given by entry.
pub fn matrix3_json(entry: impl Fn(usize, usize) -> Complex64) -> Value {
    Value::Array(
        (0..3)
            .map(|i| Value::Array((0..3).map(|j| complex_json(entry(i, j))).collect()))
            .collect(),
    )
}

/// Non-finite floats become `null`.
pub fn opt_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// Adds the manifest hash to a JSON object and pretty-prints it.
pub fn render_json(mut v: Value, hash: &str) -> String {
    if let Value::Object(map) = &mut v {
        map.insert("manifest_sha256".into(), Value::String(hash.into()));
    }
    let mut s = serde_json::to_string_pretty(&v).expect("values are serializable");
    s.push('\n');
    s
}

/// A CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}

/// 17 significant digits round-trip every `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// `# manifest_sha256=…`, the header, then one line per row.
pub fn render_csv(t: &Table, hash: &str) -> String {
    let mut s = format!("# manifest_sha256={hash}\n{}\n", t.header.join(","));
    for row in &t.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::F(x) => fmt_f64(*x),
                Cell::I(i) => i.to_string(),
            })
            .collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const MARGIN: f64 = 48.0;

/// Scatter of eigenvalues in the complex plane. The imaginary axis is
/// `asinh(Im λ / s)` because the spectrum spans many decades.
pub fn render_svg(points: &[Complex64], title: &str, hash: &str) -> String {
    let re_max = points.iter().fold(0.0_f64, |m, z| m.max(z.re.abs()));
    let im_abs: Vec<f64> = points.iter().map(|z| z.im.abs()).filter(|x| *x > 0.0).collect();
    let s = im_abs.iter().copied().fold(f64::INFINITY, f64::min);
    let s = if s.is_finite() { s } else { 1.0 };
    let y = |z: &Complex64| (z.im / s).asinh();
    let y_max = points.iter().fold(0.0_f64, |m, z| m.max(y(z).abs())).max(1.0);
    // A flat real axis still gets a visible width.
    let x_half = if re_max > 0.0 { re_max } else { 1.0 };
    let px = |x: f64| MARGIN + (x / x_half + 1.0) / 2.0 * (SVG_W - 2.0 * MARGIN);
    let py = |v: f64| SVG_H - MARGIN - (v / y_max + 1.0) / 2.0 * (SVG_H - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">"#
    );
    let _ = writeln!(out, "<!-- manifest_sha256={hash} -->");
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999"/>"##,
        px(0.0),
        MARGIN,
        px(0.0),
        SVG_H - MARGIN
    );
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999"/>"##,
        MARGIN,
        py(0.0),
        SVG_W - MARGIN,
        py(0.0)
    );
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="24" font-family="monospace" font-size="13">{}</text>"#,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="{}" font-family="monospace" font-size="11">Re in [{}, {}]; vertical asinh(Im/{})</text>"#,
        SVG_H - 12.0,
        fmt_f64(-x_half),
        fmt_f64(x_half),
        fmt_f64(s)
    );
    for z in points {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="#1f4e9c"/>"##,
            px(z.re),
            py(y(z))
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, 105.000000000001] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["xi", "n"]);
        t.push(vec![Cell::F(0.5), Cell::I(3)]);
        let s = render_csv(&t, "abc");
        assert_eq!(s, "# manifest_sha256=abc\nxi,n\n5.0000000000000000e-1,3\n");
    }

    #[test]
    fn json_carries_hash() {
        let v: Value = serde_json::from_str(&render_json(json!({"z": 1}), "h")).unwrap();
        assert_eq!(v["manifest_sha256"], "h");
    }

    #[test]
    fn series_layout() {
        let v = series_json(&FourierSeries::cosine(1, 1, 2.0));
        assert_eq!(v["N"], 1);
        assert_eq!(v["re"], json!([1.0, 0.0, 1.0]));
    }

    #[test]
    fn svg_is_deterministic() {
        let pts = [Complex64::new(0.0, 1.0), Complex64::new(1e-9, -1e6)];
        assert_eq!(render_svg(&pts, "t", "h"), render_svg(&pts, "t", "h"));
        assert!(render_svg(&pts, "t", "h").contains("manifest_sha256=h"));
    }
}
