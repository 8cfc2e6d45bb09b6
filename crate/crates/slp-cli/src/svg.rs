//! Static SVG renderers.
//!
//! Both renderers draw exclusively from an already-computed [`Sweep`], so a
//! figure can never disagree with the CSV/JSON emitted for the same run.

use crate::output::{column_f64, Cell, Sweep};
use std::fmt::Write;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];

fn f(v: f64) -> String {
    format!("{v:.2}")
}

/// Shaded map of the omega column over the (delta0, delta1) diamond, with
/// the zero region outlined and the thermal path from the sweep's inset
/// table overlaid.
pub fn render_omega_grid(sweep: &Sweep) -> String {
    let d0 = column_f64(sweep, "delta0");
    let d1 = column_f64(sweep, "delta1");
    let om = column_f64(sweep, "omega");
    let masked = column_f64(sweep, "masked");

    let mut axis: Vec<f64> = d0.clone();
    axis.sort_by(f64::total_cmp);
    axis.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let n = axis.len();
    let lookup = |v: f64| -> usize {
        axis.iter().position(|a| (a - v).abs() < 1e-12).expect("grid value")
    };

    // Row-major field with NaN standing in for masked points.
    let mut field = vec![f64::NAN; n * n];
    for k in 0..om.len() {
        let (i, j) = (lookup(d0[k]), lookup(d1[k]));
        field[i * n + j] = if masked[k] != 0.0 { f64::NAN } else { om[k] };
    }
    let peak = field.iter().copied().filter(|v| v.is_finite()).fold(0.0f64, f64::max).max(1e-300);

    let (size, margin) = (640.0, 50.0);
    let span = size - 2.0 * margin;
    let lo = axis[0];
    let step = if n > 1 { axis[1] - axis[0] } else { 1.0 };
    let width = axis[n - 1] - lo;
    let px = |v: f64| margin + (v - lo) / width * span;
    let py = |v: f64| size - margin - (v - lo) / width * span;
    let cell = span / width * step;

    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" \
         viewBox=\"0 0 {size} {size}\">\n<rect width=\"{size}\" height=\"{size}\" fill=\"white\"/>\n"
    );
    let _ = write!(
        s,
        "<text x=\"{}\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">local energy over the population diamond (darker = larger)</text>\n",
        size / 2.0
    );

    for i in 0..n {
        for j in 0..n {
            let v = field[i * n + j];
            if !v.is_finite() {
                continue;
            }
            let shade = (235.0 - 215.0 * (v / peak)).round() as i32;
            let _ = write!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"rgb({shade},{shade},{shade})\"/>\n",
                f(px(axis[i]) - cell / 2.0),
                f(py(axis[j]) - cell / 2.0),
                f(cell),
                f(cell)
            );
        }
    }

    // Marching squares at a hair above zero picks out the passive region's
    // boundary; cells touching masked corners are skipped.
    let level = 1e-12;
    for i in 0..n.saturating_sub(1) {
        for j in 0..n.saturating_sub(1) {
            let corners = [
                field[i * n + j],
                field[(i + 1) * n + j],
                field[(i + 1) * n + j + 1],
                field[i * n + j + 1],
            ];
            if corners.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let above: Vec<bool> = corners.iter().map(|v| *v > level).collect();
            if above.iter().all(|a| *a) || above.iter().all(|a| !*a) {
                continue;
            }
            // Midpoint rule: join the centers of the sign-changing edges.
            let (x0, x1) = (axis[i], axis[i + 1]);
            let (y0, y1) = (axis[j], axis[j + 1]);
            let edges = [
                ((x0 + x1) / 2.0, y0),
                (x1, (y0 + y1) / 2.0),
                ((x0 + x1) / 2.0, y1),
                (x0, (y0 + y1) / 2.0),
            ];
            let mut hits: Vec<(f64, f64)> = Vec::new();
            for e in 0..4 {
                if above[e] != above[(e + 1) % 4] {
                    hits.push(edges[e]);
                }
            }
            if hits.len() >= 2 {
                let _ = write!(
                    s,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#c22\" stroke-width=\"1.4\"/>\n",
                    f(px(hits[0].0)),
                    f(py(hits[0].1)),
                    f(px(hits[1].0)),
                    f(py(hits[1].1))
                );
            }
        }
    }

    if let Some((cols, rows)) = &sweep.inset {
        let ci = cols.iter().position(|c| *c == "delta0");
        let cj = cols.iter().position(|c| *c == "delta1");
        if let (Some(ci), Some(cj)) = (ci, cj) {
            let pts: Vec<String> = rows
                .iter()
                .filter_map(|r| match (&r[ci], &r[cj]) {
                    (Cell::F(a), Cell::F(b)) => Some(format!("{},{}", f(px(*a)), f(py(*b)))),
                    _ => None,
                })
                .collect();
            if pts.len() > 1 {
                let _ = write!(
                    s,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"#26c\" stroke-width=\"2\" stroke-dasharray=\"6 3\"/>\n",
                    pts.join(" ")
                );
            }
        }
    }

    let _ = write!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">delta0</text>\n",
        size / 2.0,
        size - 12.0
    );
    let _ = write!(
        s,
        "<text x=\"16\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">delta1</text>\n",
        size / 2.0,
        size / 2.0
    );
    s.push_str("</svg>\n");
    s
}

/// Line chart of `y_col` against `x_col`, one polyline per distinct value
/// of `series_col`; non-finite points break the line. Inset rows, when
/// present, are drawn as markers on the x axis.
pub fn render_curves(sweep: &Sweep, x_col: &str, y_col: &str, series_col: &str) -> String {
    let xs = column_f64(sweep, x_col);
    let ys = column_f64(sweep, y_col);
    let series = column_f64(sweep, series_col);

    let mut keys: Vec<f64> = series.clone();
    keys.sort_by(f64::total_cmp);
    keys.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    fn finite(v: &[f64]) -> impl Iterator<Item = f64> + '_ {
        v.iter().copied().filter(|x| x.is_finite())
    }
    let (xmin, xmax) = (
        finite(&xs).fold(f64::INFINITY, f64::min),
        finite(&xs).fold(f64::NEG_INFINITY, f64::max),
    );
    let (ymin, ymax) = (
        finite(&ys).fold(f64::INFINITY, f64::min).min(0.0),
        finite(&ys).fold(f64::NEG_INFINITY, f64::max).max(1e-12),
    );

    let (w, h, m) = (640.0, 480.0, 56.0);
    let px = |v: f64| m + (v - xmin) / (xmax - xmin).max(1e-300) * (w - 2.0 * m);
    let py = |v: f64| h - m - (v - ymin) / (ymax - ymin).max(1e-300) * (h - 2.0 * m);

    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    );
    let _ = write!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>\n",
        f(m),
        f(h - m),
        f(w - m),
        f(h - m)
    );
    let _ = write!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>\n",
        f(m),
        f(m),
        f(m),
        f(h - m)
    );
    for (v, x, y, anchor) in [
        (xmin, px(xmin), h - m + 18.0, "middle"),
        (xmax, px(xmax), h - m + 18.0, "middle"),
    ] {
        let _ = write!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"{anchor}\">{v:.3}</text>\n",
            f(x),
            f(y)
        );
    }
    for v in [ymin, ymax] {
        let _ = write!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{v:.3}</text>\n",
            f(m - 6.0),
            f(py(v) + 4.0)
        );
    }
    let _ = write!(
        s,
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{x_col}</text>\n",
        w / 2.0,
        h - 14.0
    );
    let _ = write!(
        s,
        "<text x=\"18\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{y_col}</text>\n",
        h / 2.0,
        h / 2.0
    );

    for (ki, key) in keys.iter().enumerate() {
        let color = PALETTE[ki % PALETTE.len()];
        let mut segments: Vec<Vec<String>> = vec![Vec::new()];
        for i in 0..xs.len() {
            if (series[i] - key).abs() > 1e-12 {
                continue;
            }
            if xs[i].is_finite() && ys[i].is_finite() {
                segments.last_mut().unwrap().push(format!("{},{}", f(px(xs[i])), f(py(ys[i]))));
            } else if !segments.last().unwrap().is_empty() {
                segments.push(Vec::new());
            }
        }
        for seg in segments.iter().filter(|s| s.len() > 1) {
            let _ = write!(
                s,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                seg.join(" ")
            );
        }
        let _ = write!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{series_col} = {key:.3}</text>\n",
            f(w - m - 130.0),
            f(m + 16.0 * (ki as f64 + 1.0))
        );
    }

    if let Some((cols, rows)) = &sweep.inset {
        if let Some(cx) = cols.iter().position(|c| *c != "gamma" && *c != "n") {
            for row in rows {
                if let Cell::F(v) = &row[cx] {
                    if v.is_finite() {
                        let _ = write!(
                            s,
                            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"none\" stroke=\"#111\" stroke-width=\"1.5\"/>\n",
                            f(px(*v)),
                            f(py(ymin))
                        );
                    }
                }
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
