//! Minimal SVG renderings of the CSV outputs.

use std::fmt::Write;

use hull_limits::geometry::Point2;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 50.0;

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

fn polyline(out: &mut String, pts: &[(f64, f64)], stroke: &str, width: f64, closed: bool) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let tag = if closed { "polygon" } else { "polyline" };
    let _ = writeln!(
        out,
        r#"<{tag} points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
        coords.join(" ")
    );
}

/// Quantile bands against `log10 n`. `rows` are `(n, [q10, q50, q90])`.
pub fn curve_plot(rows: &[(u64, [f64; 3])], title: &str) -> String {
    let mut out = String::new();
    header(&mut out);
    let xs: Vec<f64> = rows.iter().map(|(n, _)| (*n as f64).log10()).collect();
    let (x0, x1) = (
        xs.iter().copied().fold(f64::INFINITY, f64::min),
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let ymax = rows
        .iter()
        .map(|(_, q)| q[2])
        .fold(0.0, f64::max)
        .max(1e-12)
        * 1.05;
    let span = if x1 > x0 { x1 - x0 } else { 1.0 };
    let sx = |x: f64| PAD + (x - x0) / span * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - y / ymax * (H - 2.0 * PAD);
    polyline(
        &mut out,
        &[(PAD, PAD), (PAD, H - PAD), (W - PAD, H - PAD)],
        "black",
        1.0,
        false,
    );
    for (k, (colour, width)) in [("#999", 1.0), ("#1f5fbf", 2.0), ("#999", 1.0)]
        .into_iter()
        .enumerate()
    {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .zip(&xs)
            .map(|((_, q), &x)| (sx(x), sy(q[k])))
            .collect();
        polyline(&mut out, &pts, colour, width, false);
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">log10 n</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}">{}</text>"#,
        PAD,
        PAD - 20.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">{ymax:.3}</text>"#,
        PAD - 4.0,
        PAD + 4.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">0</text>"#,
        PAD - 4.0,
        H - PAD + 4.0
    );
    for (&x, (n, _)) in xs.iter().zip(rows) {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{n}</text>"#,
            sx(x),
            H - PAD + 16.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Normalized hulls (grey, first path in blue) over the target polygon (red).
pub fn overlay_plot(target: &[Point2], hulls: &[Vec<Point2>], title: &str) -> String {
    let mut out = String::new();
    header(&mut out);
    let reach = target
        .iter()
        .chain(hulls.iter().flatten())
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(1e-12, f64::max)
        * 1.1;
    let scale = (H - 2.0 * PAD).min(W - 2.0 * PAD) / (2.0 * reach);
    let map = |p: &Point2| (W / 2.0 + p[0] * scale, H / 2.0 - p[1] * scale);
    polyline(
        &mut out,
        &[(PAD, H / 2.0), (W - PAD, H / 2.0)],
        "#ddd",
        1.0,
        false,
    );
    polyline(
        &mut out,
        &[(W / 2.0, PAD), (W / 2.0, H - PAD)],
        "#ddd",
        1.0,
        false,
    );
    for (i, hull) in hulls.iter().enumerate().rev() {
        let pts: Vec<(f64, f64)> = hull.iter().map(map).collect();
        let (colour, width) = if i == 0 {
            ("#1f5fbf", 2.0)
        } else {
            ("#bbb", 1.0)
        };
        polyline(&mut out, &pts, colour, width, true);
    }
    let pts: Vec<(f64, f64)> = target.iter().map(map).collect();
    polyline(&mut out, &pts, "#c0392b", 2.0, true);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}">{}</text>"#,
        PAD,
        PAD - 20.0,
        escape(title)
    );
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_plot_is_well_formed() {
        let svg = curve_plot(
            &[(100, [0.1, 0.2, 0.3]), (1000, [0.05, 0.1, 0.2])],
            "iid <b>",
        );
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.contains("iid &lt;b&gt;"));
    }

    #[test]
    fn overlay_draws_every_hull() {
        let diamond = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        let svg = overlay_plot(&diamond, &[diamond.to_vec(), diamond.to_vec()], "demo");
        assert_eq!(svg.matches("<polygon").count(), 3);
    }
}
