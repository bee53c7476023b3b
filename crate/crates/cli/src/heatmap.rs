//! PNG heatmaps of `w0` with x horizontal and p increasing upwards, a
//! diverging blue-white-red map centered at zero and the potential region
//! shaded gray. Each image gets a JSON sidecar with its color range.

use std::fs;
use std::path::Path;

use image::{Rgb, RgbImage};
use serde::Serialize;

use crate::snapshot::{PayloadKind, Snapshot};

/// Percentile of `|w0|` that sets the symmetric color range.
pub const RANGE_PERCENTILE: f64 = 99.5;

/// Columns where `|A⁰(x)|` exceeds this fraction of its maximum are shaded.
pub const POTENTIAL_FRACTION: f64 = 0.5;

const GRAY: [f64; 3] = [128.0, 128.0, 128.0];
const GRAY_ALPHA: f64 = 0.35;

const BLUE: [f64; 3] = [33.0, 102.0, 172.0];
const WHITE: [f64; 3] = [247.0, 247.0, 247.0];
const RED: [f64; 3] = [178.0, 24.0, 43.0];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeatmapMeta {
    pub time: f64,
    pub width: usize,
    pub height: usize,
    pub x_range: [f64; 2],
    pub p_range: [f64; 2],
    /// Colors saturate at `±vmax`.
    pub vmax: f64,
    pub percentile: f64,
    pub colormap: &'static str,
    /// Shaded x intervals.
    pub potential_region: Vec<[f64; 2]>,
}

/// The `q`-th percentile (0..=100) of `|v|`, nearest rank.
pub fn abs_percentile(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    a.sort_by(f64::total_cmp);
    let rank = ((q / 100.0) * a.len() as f64).ceil() as usize;
    a[rank.clamp(1, a.len()) - 1]
}

fn lerp(a: [f64; 3], b: [f64; 3], s: f64) -> [f64; 3] {
    std::array::from_fn(|k| a[k] + (b[k] - a[k]) * s)
}

/// Diverging color for `v / vmax` clamped to `[-1, 1]`.
pub fn diverging(v: f64, vmax: f64) -> [f64; 3] {
    let s = if vmax > 0.0 { (v / vmax).clamp(-1.0, 1.0) } else { 0.0 };
    if s < 0.0 {
        lerp(WHITE, BLUE, -s)
    } else {
        lerp(WHITE, RED, s)
    }
}

/// Maximal runs of x samples where `|a0|` is above [`POTENTIAL_FRACTION`]
/// of its peak, as `[x_first, x_last]` pairs.
pub fn potential_region(x: &[f64], a0: &[f64]) -> Vec<[f64; 2]> {
    let peak = a0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for i in 0..=x.len() {
        let inside = i < x.len() && a0[i].abs() > POTENTIAL_FRACTION * peak;
        match (inside, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push([x[s], x[i - 1]]);
                start = None;
            }
            _ => {}
        }
    }
    out
}

/// Renders a `W0_REAL` snapshot. `a0` holds `A⁰` at the x grid points.
pub fn render(snapshot: &Snapshot, a0: &[f64]) -> (RgbImage, HeatmapMeta) {
    let h = &snapshot.header;
    assert_eq!(h.kind, PayloadKind::W0Real, "heatmaps need a w0 payload");
    let (n_x, n_p) = (h.n_x as usize, h.n_p as usize);
    assert_eq!(a0.len(), n_x, "one potential value per x point");
    let dx = (h.x_max - h.x_min) / n_x as f64;
    let x: Vec<f64> = (0..n_x).map(|i| h.x_min + i as f64 * dx).collect();
    let region = potential_region(&x, a0);
    let shaded: Vec<bool> = x.iter().map(|&xi| region.iter().any(|r| xi >= r[0] && xi <= r[1])).collect();

    let vmax = abs_percentile(&snapshot.payload, RANGE_PERCENTILE);
    let img = RgbImage::from_fn(n_x as u32, n_p as u32, |col, row| {
        let (i, j) = (col as usize, n_p - 1 - row as usize);
        let mut c = diverging(snapshot.payload[i * n_p + j], vmax);
        if shaded[i] {
            c = lerp(c, GRAY, GRAY_ALPHA);
        }
        Rgb(c.map(|v| v.round().clamp(0.0, 255.0) as u8))
    });
    let meta = HeatmapMeta {
        time: h.time,
        width: n_x,
        height: n_p,
        x_range: [h.x_min, h.x_max],
        p_range: [h.p_min, h.p_max],
        vmax,
        percentile: RANGE_PERCENTILE,
        colormap: "blue-white-red, centered at 0",
        potential_region: region,
    };
    (img, meta)
}

/// Writes `<stem>.png` and `<stem>.json` into `dir`.
pub fn write_heatmap(snapshot: &Snapshot, a0: &[f64], dir: &Path, stem: &str) -> std::io::Result<()> {
    let (img, meta) = render(snapshot, a0);
    img.save(dir.join(format!("{stem}.png"))).map_err(std::io::Error::other)?;
    let json = serde_json::to_string_pretty(&meta).map_err(std::io::Error::other)?;
    fs::write(dir.join(format!("{stem}.json")), json + "\n")
}
