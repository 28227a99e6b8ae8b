//! WebAssembly bindings behind the static page in `www/`.
//!
//! Every export returns a JSON string; the native functions of the same shape are public so
//! they can be tested without a browser.

use lpplab::busemann::{exact_busemann_sample, zeta};
use lpplab::coupling::{queue_trace, two_row_swap, TwoRowStrip};
use lpplab::environments::{sample_eta, EtaSpec};
use lpplab::lattice::{geodesic, increments_to_terminal, GridPoint};
use lpplab::rng::RngStream;
use lpplab::Result;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
pub struct EtaView {
    pub width: usize,
    pub height: usize,
    /// Row-major from the bottom row.
    pub weights: Vec<f64>,
    pub zero: Vec<bool>,
    pub terminals: Vec<(usize, usize)>,
    /// Increments towards the first terminal; `null` where undefined or infinite.
    pub horizontal: Vec<Option<f64>>,
    pub vertical: Vec<Option<f64>>,
    pub geodesic: Vec<(usize, usize)>,
}

/// One η environment with its increments and the geodesic from `(1,1)` to the first terminal.
pub fn eta_view(k: usize, l: usize, r: Vec<f64>, seed: u64) -> Result<EtaView> {
    let spec = EtaSpec::new(k, l, r)?;
    let w = sample_eta(&spec, &RngStream::new(seed));
    let b = w.bounds();
    let z = spec.terminal(1);
    let field = increments_to_terminal(&w, z)?;
    let finite = |v: Option<f64>| v.filter(|x| x.is_finite());
    let path = geodesic(&w, GridPoint::new(1, 1), z)?;
    Ok(EtaView {
        width: b.width(),
        height: b.height(),
        weights: w.values().to_vec(),
        zero: b.points().map(|p| spec.is_zero_cell(p)).collect(),
        terminals: (1..=spec.d()).map(|p| spec.terminal(p)).map(|t| (t.col, t.row)).collect(),
        horizontal: b.points().map(|p| finite(field.horizontal(p))).collect(),
        vertical: b.points().map(|p| finite(field.vertical(p))).collect(),
        geodesic: path.iter().map(|p| (p.col, p.row)).collect(),
    })
}

#[derive(Debug, Serialize)]
pub struct Histogram {
    pub zeta: f64,
    pub bin_width: f64,
    pub counts: Vec<usize>,
    /// Expected counts per bin under `Exp(zeta)`.
    pub expected: Vec<f64>,
    pub mean: f64,
}

/// Histogram of the exact boundary increment at `(1,1)` for one direction.
pub fn busemann_histogram(r: f64, replicas: usize, bins: usize, seed: u64) -> Result<Histogram> {
    let spec = EtaSpec::new(2, 1, vec![r])?;
    let z = zeta(r)?;
    let rng = RngStream::new(seed).fork("demo-histogram");
    let values: Vec<f64> = (0..replicas as u64)
        .map(|i| exact_busemann_sample(&spec, &rng.replica(i)).horizontal(GridPoint::new(1, 1), 1).unwrap())
        .collect();
    let bins = bins.max(1);
    let top = 5.0 / z;
    let width = top / bins as f64;
    let mut counts = vec![0; bins];
    for &v in &values {
        if v < top {
            counts[(v / width) as usize] += 1;
        }
    }
    let expected = (0..bins)
        .map(|b| {
            let (lo, hi) = (b as f64 * width, (b + 1) as f64 * width);
            replicas as f64 * ((-z * lo).exp() - (-z * hi).exp())
        })
        .collect();
    let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
    Ok(Histogram { zeta: z, bin_width: width, counts, expected, mean })
}

#[derive(Debug, Serialize)]
pub struct CouplingView {
    pub row1: Vec<f64>,
    pub row2: Vec<f64>,
    pub swapped1: Vec<f64>,
    pub swapped2: Vec<f64>,
    pub queue: Vec<f64>,
    pub unused: Vec<f64>,
}

/// A two-row strip with rates `b1` (row 1) and `b2` (row 2), its swapped strip and queue.
pub fn coupling_view(len: usize, b1: f64, b2: f64, seed: u64) -> Result<CouplingView> {
    let rng = RngStream::new(seed).fork("demo-coupling");
    let draw = |row: usize, rate: f64| (1..=len).map(|t| rng.cell_exponential(GridPoint::new(t, row), rate)).collect();
    if !(b1 > 0.0 && b2 > 0.0) {
        return Err(lpplab::LppError::InvalidInput("rates must be positive".into()));
    }
    let strip = TwoRowStrip::new(1, draw(1, b1), draw(2, b2))?;
    let swapped = two_row_swap(&strip);
    let trace = queue_trace(&strip, 0.0)?;
    Ok(CouplingView {
        row1: strip.row1().to_vec(),
        row2: strip.row2().to_vec(),
        swapped1: swapped.row1().to_vec(),
        swapped2: swapped.row2().to_vec(),
        queue: trace.q,
        unused: trace.unused,
    })
}

fn to_js<T: Serialize>(value: Result<T>) -> std::result::Result<String, JsValue> {
    value
        .and_then(|v| Ok(serde_json::to_string(&v)?))
        .map_err(|e| JsValue::from_str(&e.to_string()))
}

fn parse_directions(text: &str) -> std::result::Result<Vec<f64>, JsValue> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| JsValue::from_str(&format!("bad direction {s:?}"))))
        .collect()
}

#[wasm_bindgen(js_name = etaEnvironment)]
pub fn eta_environment(k: usize, l: usize, directions: &str, seed: u32) -> std::result::Result<String, JsValue> {
    to_js(eta_view(k, l, parse_directions(directions)?, u64::from(seed)))
}

#[wasm_bindgen(js_name = busemannHistogram)]
pub fn busemann_histogram_js(r: f64, replicas: usize, bins: usize, seed: u32) -> std::result::Result<String, JsValue> {
    to_js(busemann_histogram(r, replicas, bins, u64::from(seed)))
}

#[wasm_bindgen(js_name = twoRowCoupling)]
pub fn two_row_coupling(len: usize, b1: f64, b2: f64, seed: u32) -> std::result::Result<String, JsValue> {
    to_js(coupling_view(len, b1, b2, u64::from(seed)))
}
