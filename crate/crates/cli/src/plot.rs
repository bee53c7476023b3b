//! Minimal line plots: several series on shared axes, drawn into a PNG.

use image::{Rgb, RgbImage};

const WIDTH: u32 = 800;
const HEIGHT: u32 = 500;
const MARGIN: u32 = 40;

const PALETTE: [[u8; 3]; 6] = [
    [31, 119, 180],
    [214, 39, 40],
    [44, 160, 44],
    [148, 103, 189],
    [255, 127, 14],
    [23, 190, 207],
];

pub struct Series<'a> {
    pub t: &'a [f64],
    pub y: &'a [f64],
}

fn bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        return None;
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
    Some((lo - pad, hi + pad))
}

fn line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), c: Rgb<u8>) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, c);
        }
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Overlays the series in palette order inside a framed plot area. Axes
/// span the joint range of all data; no labels are drawn.
pub fn overlay(series: &[Series<'_>]) -> RgbImage {
    let mut img = RgbImage::from_pixel(WIDTH, HEIGHT, Rgb([255, 255, 255]));
    let (l, r, top, bottom) = (MARGIN as i64, (WIDTH - MARGIN) as i64, MARGIN as i64, (HEIGHT - MARGIN) as i64);
    let black = Rgb([0, 0, 0]);
    line(&mut img, (l, top), (r, top), black);
    line(&mut img, (l, bottom), (r, bottom), black);
    line(&mut img, (l, top), (l, bottom), black);
    line(&mut img, (r, top), (r, bottom), black);

    let tb = bounds(series.iter().flat_map(|s| s.t.iter().copied()));
    let yb = bounds(series.iter().flat_map(|s| s.y.iter().copied()));
    let (Some((t0, t1)), Some((y0, y1))) = (tb, yb) else {
        return img;
    };
    let px = |t: f64| l + ((t - t0) / (t1 - t0) * (r - l) as f64).round() as i64;
    let py = |y: f64| bottom - ((y - y0) / (y1 - y0) * (bottom - top) as f64).round() as i64;
    for (k, s) in series.iter().enumerate() {
        let c = Rgb(PALETTE[k % PALETTE.len()]);
        let pts: Vec<(i64, i64)> = s
            .t
            .iter()
            .zip(s.y)
            .filter(|(t, y)| t.is_finite() && y.is_finite())
            .map(|(&t, &y)| (px(t), py(y)))
            .collect();
        for w in pts.windows(2) {
            line(&mut img, w[0], w[1], c);
        }
    }
    img
}
