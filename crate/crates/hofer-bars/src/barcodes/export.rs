use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{Bar, Barcode};
use crate::error::{Error, Result};
use crate::scalar::{ExtendedScalar, Scalar};

pub fn barcode_to_json(b: &Barcode) -> Value {
    let bars: Vec<Value> =
        b.bars().iter().map(|x| json!({"left": x.left.to_string(), "right": x.right.to_string()})).collect();
    json!({"degree": b.degree, "bars": bars})
}

pub fn barcode_from_json(v: &Value) -> Result<Barcode> {
    let bad = |m: &str| Error::Parse(format!("barcode JSON: {m}"));
    let degree = v["degree"].as_i64().ok_or_else(|| bad("missing integer `degree`"))?;
    let arr = v["bars"].as_array().ok_or_else(|| bad("missing array `bars`"))?;
    let mut bars = Vec::with_capacity(arr.len());
    for item in arr {
        let left: Scalar = item["left"].as_str().ok_or_else(|| bad("`left` must be a string"))?.parse()?;
        let right: ExtendedScalar =
            item["right"].as_str().ok_or_else(|| bad("`right` must be a string"))?.parse()?;
        bars.push(Bar::new(left, right)?);
    }
    Ok(Barcode::new(degree, bars))
}

const WIDTH: f64 = 640.0;
const ROW: f64 = 14.0;
const MARGIN: f64 = 40.0;

fn span(codes: &[&Barcode]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for b in codes {
        for bar in b.bars() {
            let l = bar.left.to_f64();
            lo = lo.min(l);
            hi = hi.max(l);
            if let Some(r) = bar.right.finite() {
                hi = hi.max(r.to_f64());
            }
        }
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.1).max(0.1);
    (lo - pad, hi + pad)
}

fn draw(out: &mut String, b: &Barcode, y0: f64, lo: f64, hi: f64) -> f64 {
    let x = |v: f64| MARGIN + (v - lo) / (hi - lo) * (WIDTH - 2.0 * MARGIN);
    writeln!(out, r#"<text x="4" y="{:.1}" font-size="11">deg {}</text>"#, y0 + 10.0, b.degree).unwrap();
    let mut y = y0 + ROW;
    for bar in b.bars() {
        let x1 = x(bar.left.to_f64());
        match bar.right.finite() {
            Some(r) => {
                writeln!(out, r#"<line x1="{x1:.2}" y1="{y:.1}" x2="{:.2}" y2="{y:.1}" stroke="black" stroke-width="2"/>"#, x(r.to_f64()))
                    .unwrap();
            }
            None => {
                let x2 = WIDTH - MARGIN / 2.0;
                writeln!(out, r#"<line x1="{x1:.2}" y1="{y:.1}" x2="{x2:.2}" y2="{y:.1}" stroke="black" stroke-width="2"/>"#).unwrap();
                writeln!(
                    out,
                    r#"<polygon points="{x2:.2},{:.1} {:.2},{y:.1} {x2:.2},{:.1}" fill="black"/>"#,
                    y - 4.0,
                    x2 + 8.0,
                    y + 4.0
                )
                .unwrap();
            }
        }
        y += ROW;
    }
    y
}

/// One horizontal segment per bar, x-axis in 2π-units, arrowheads on
/// infinite bars.
pub fn barcode_to_svg(b: &Barcode) -> String {
    let mut m = BTreeMap::new();
    m.insert(b.degree, b.clone());
    barcodes_to_svg(&m, None)
}

pub fn barcodes_to_svg(codes: &BTreeMap<i64, Barcode>, title: Option<&str>) -> String {
    let list: Vec<&Barcode> = codes.values().collect();
    let (lo, hi) = span(&list);
    let mut body = String::new();
    let mut y = if title.is_some() { 20.0 } else { 4.0 };
    if let Some(t) = title {
        writeln!(body, r#"<text x="4" y="14" font-size="12">{}</text>"#, escape(t)).unwrap();
    }
    for b in list {
        y = draw(&mut body, b, y, lo, hi) + ROW / 2.0;
    }
    let axis = y + 4.0;
    writeln!(body, r#"<line x1="{MARGIN}" y1="{axis:.1}" x2="{:.1}" y2="{axis:.1}" stroke="gray"/>"#, WIDTH - MARGIN)
        .unwrap();
    writeln!(body, r#"<text x="{MARGIN}" y="{:.1}" font-size="10">{lo:.4}</text>"#, axis + 12.0).unwrap();
    writeln!(body, r#"<text x="{:.1}" y="{:.1}" font-size="10">{hi:.4}</text>"#, WIDTH - MARGIN - 30.0, axis + 12.0)
        .unwrap();
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{:.0}\">\n{body}</svg>\n",
        axis + 20.0
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
