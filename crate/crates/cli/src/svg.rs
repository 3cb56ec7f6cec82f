//! Hand-rolled SVG output: boundary plots with dataset overlays, and
//! three-series training-trend charts. Rendering rounds to six significant
//! digits; all counts and clipping decisions are made exactly upstream.

use dcpa_core::counts::{BoundarySegment2D, Extent2D};
use dcpa_core::geometry::scalar::{scalar_from_f64, scalar_to_f64, Scalar};
use dcpa_core::train::{moving_average, Dataset, TrendRecord};
use num_traits::{Signed, Zero};

const W: f64 = 720.0;
const H: f64 = 760.0; // extra strip for the caption

fn fmt(v: f64) -> String {
    format!("{v:.6}")
        .trim_end_matches('0')
        .trim_end_matches('.')
        .to_string()
}

/// Clips one boundary piece to the box, returning endpoints in data
/// coordinates. The clipping is exact; only the final coordinates round.
fn clip_extent(extent: &Extent2D, bbox: (f64, f64, f64, f64)) -> Option<[(f64, f64); 2]> {
    let (x0, x1, y0, y1) = bbox;
    let bounds = [
        ([Scalar::from_integer(1.into()), Scalar::zero()], -scalar_from_f64(x0).ok()?),
        ([Scalar::from_integer((-1).into()), Scalar::zero()], scalar_from_f64(x1).ok()?),
        ([Scalar::zero(), Scalar::from_integer(1.into())], -scalar_from_f64(y0).ok()?),
        ([Scalar::zero(), Scalar::from_integer((-1).into())], scalar_from_f64(y1).ok()?),
    ];
    // parametrize the piece as base + s·dir over s in [lo, hi]
    let (base, dir, mut lo, mut hi): ([Scalar; 2], [Scalar; 2], Option<Scalar>, Option<Scalar>) =
        match extent {
            Extent2D::Segment(p, q) => (
                p.clone(),
                [&q[0] - &p[0], &q[1] - &p[1]],
                Some(Scalar::zero()),
                Some(Scalar::from_integer(1.into())),
            ),
            Extent2D::Ray { start, direction } => (
                start.clone(),
                direction.clone(),
                Some(Scalar::zero()),
                None,
            ),
            Extent2D::Line { point, direction } => {
                (point.clone(), direction.clone(), None, None)
            }
        };
    for (a, b) in &bounds {
        let alpha = &a[0] * &base[0] + &a[1] * &base[1] + b;
        let beta = &a[0] * &dir[0] + &a[1] * &dir[1];
        if beta.is_zero() {
            if alpha.is_negative() {
                return None;
            }
            continue;
        }
        let bound = -alpha / &beta;
        if beta.is_positive() {
            if lo.as_ref().is_none_or(|l| bound > *l) {
                lo = Some(bound);
            }
        } else if hi.as_ref().is_none_or(|h| bound < *h) {
            hi = Some(bound);
        }
    }
    let (lo, hi) = (lo?, hi?);
    if lo >= hi {
        return None;
    }
    let at = |s: &Scalar| {
        (
            scalar_to_f64(&(&base[0] + s * &dir[0])),
            scalar_to_f64(&(&base[1] + s * &dir[1])),
        )
    };
    Some([at(&lo), at(&hi)])
}

/// Renders the decision boundary of a planar classifier over a box, with an
/// optional dataset overlay and the piece count in a caption.
pub fn boundary_svg(
    segments: &[BoundarySegment2D],
    boundary_count: usize,
    bbox: (f64, f64, f64, f64),
    data: Option<&Dataset>,
    caption_extra: &str,
) -> String {
    let (x0, x1, y0, y1) = bbox;
    let sx = |x: f64| (x - x0) / (x1 - x0) * (W - 40.0) + 20.0;
    let sy = |y: f64| (y1 - y) / (y1 - y0) * (W - 40.0) + 20.0;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\">\n",
        fmt(W),
        fmt(H)
    ));
    out.push_str(&format!(
        "<title>decision boundary, {boundary_count} pieces</title>\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<rect x=\"20\" y=\"20\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>\n",
        fmt(W - 40.0),
        fmt(W - 40.0)
    ));
    if let Some(d) = data {
        for (p, label) in &d.points {
            if p[0] < x0 || p[0] > x1 || p[1] < y0 || p[1] > y1 {
                continue;
            }
            let color = if *label == 1 { "#d62728" } else { "#1f77b4" };
            out.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"2.2\" fill=\"{color}\" fill-opacity=\"0.55\"/>\n",
                fmt(sx(p[0])),
                fmt(sy(p[1]))
            ));
        }
    }
    for seg in segments {
        if let Some([a, b]) = clip_extent(&seg.extent, bbox) {
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"1.6\"/>\n",
                fmt(sx(a.0)),
                fmt(sy(a.1)),
                fmt(sx(b.0)),
                fmt(sy(b.1))
            ));
        }
    }
    out.push_str(&format!(
        "<text x=\"20\" y=\"{}\" font-family=\"monospace\" font-size=\"16\">#Boundary = {boundary_count}{caption_extra}</text>\n",
        fmt(W + 12.0)
    ));
    out.push_str("</svg>\n");
    out
}

/// Three-series trend chart: #Boundary, #Total and F-norm against the
/// iteration axis, each normalized to its own maximum after smoothing.
pub fn trend_svg(records: &[TrendRecord], window: usize) -> String {
    let iters: Vec<f64> = records.iter().map(|r| r.iteration as f64).collect();
    let series: [(&str, &str, Vec<f64>); 3] = [
        (
            "#Boundary",
            "#d62728",
            records.iter().map(|r| r.boundary as f64).collect(),
        ),
        (
            "#Total",
            "#2ca02c",
            records.iter().map(|r| r.total as f64).collect(),
        ),
        (
            "F-norm",
            "#1f77b4",
            records.iter().map(|r| r.fnorm).collect(),
        ),
    ];
    let (w, h, ml, mb) = (720.0, 480.0, 50.0, 40.0);
    let x_max = iters.last().copied().unwrap_or(1.0).max(1.0);
    let sx = |it: f64| ml + it / x_max * (w - ml - 20.0);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\">\n",
        fmt(w),
        fmt(h)
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#444\"/>\n",
        fmt(h - mb),
        fmt(w - 20.0),
        fmt(h - mb)
    ));
    out.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"20\" x2=\"{ml}\" y2=\"{}\" stroke=\"#444\"/>\n",
        fmt(h - mb)
    ));
    for (k, (name, color, values)) in series.iter().enumerate() {
        let smooth = moving_average(values, window.max(1));
        let v_max = smooth.iter().cloned().fold(1e-12, f64::max);
        let sy = |v: f64| (h - mb) - v / v_max * (h - mb - 30.0);
        let pts: Vec<String> = iters
            .iter()
            .zip(&smooth)
            .map(|(x, v)| format!("{},{}", fmt(sx(*x)), fmt(sy(*v))))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
            pts.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"14\" fill=\"{color}\">{name} (max {})</text>\n",
            fmt(ml + 10.0),
            fmt(34.0 + 18.0 * k as f64),
            fmt(v_max)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" fill=\"#444\">iteration (0..{})</text>\n",
        fmt(w / 2.0 - 60.0),
        fmt(h - 12.0),
        fmt(x_max)
    ));
    out.push_str("</svg>\n");
    out
}
