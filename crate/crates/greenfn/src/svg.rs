//! Minimal static SVG plots: kernel heatmaps and parameter-line curves.
//! Output depends only on the input data, byte for byte.

use std::fmt::Write as _;

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

/// Diverging palette around zero: blue for negative, red for positive.
fn color(v: f64, vmax: f64) -> String {
    if v.is_nan() {
        return "rgb(128,128,128)".to_string();
    }
    let t = if vmax > 0.0 { (v / vmax).clamp(-1.0, 1.0) } else { 0.0 };
    let (r, g, b) = if t < 0.0 {
        let u = -t;
        (lerp(255.0, 40.0, u), lerp(255.0, 80.0, u), 255.0)
    } else {
        (255.0, lerp(255.0, 80.0, t), lerp(255.0, 40.0, t))
    };
    format!("rgb({},{},{})", r.round() as u8, g.round() as u8, b.round() as u8)
}

/// Heatmap of values[j][i] at (t_axis[i], s_axis[j]). s grows upward.
pub fn heatmap(title: &str, t_axis: &[f64], s_axis: &[f64], values: &[Vec<f64>]) -> String {
    let (w, h) = (640.0, 640.0);
    let margin = 40.0;
    let nt = t_axis.len().max(1);
    let ns = s_axis.len().max(1);
    let cw = (w - 2.0 * margin) / nt as f64;
    let ch = (h - 2.0 * margin) / ns as f64;
    let vmax = values
        .iter()
        .flatten()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" font-family="monospace" font-size="14">{} (|max| = {:.6e})</text>"#,
        margin, title, vmax
    );
    for (j, row) in values.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            let x = margin + i as f64 * cw;
            let y = h - margin - (j + 1) as f64 * ch;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x,
                y,
                cw + 0.5,
                ch + 0.5,
                color(v, vmax)
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<rect x="{m}" y="{m}" width="{iw}" height="{ih}" fill="none" stroke="black"/>"#,
        m = margin,
        iw = w - 2.0 * margin,
        ih = h - 2.0 * margin
    );
    out.push_str("</svg>\n");
    out
}

/// Line plot of ys over xs with an optional set of marked x positions.
pub fn line_plot(title: &str, xs: &[f64], ys: &[f64], marks: &[f64]) -> String {
    let (w, h) = (720.0, 420.0);
    let margin = 50.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{margin}" y="24" font-family="monospace" font-size="14">{title}</text>"#
    );
    if xs.len() >= 2 {
        let xmin = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let xmax = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let finite: Vec<f64> = ys.iter().cloned().filter(|v| v.is_finite()).collect();
        let ymin = finite.iter().cloned().fold(f64::INFINITY, f64::min);
        let ymax = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let yspan = (ymax - ymin).max(1e-300);
        let xspan = (xmax - xmin).max(1e-300);
        let px = |x: f64| margin + (x - xmin) / xspan * (w - 2.0 * margin);
        let py = |y: f64| h - margin - (y - ymin) / yspan * (h - 2.0 * margin);
        // zero line when it is in range
        if ymin < 0.0 && ymax > 0.0 {
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 4"/>"#,
                px(xmin),
                py(0.0),
                px(xmax),
                py(0.0)
            );
        }
        for &m in marks {
            if m >= xmin && m <= xmax {
                let _ = writeln!(
                    out,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="red" stroke-dasharray="2 3"/>"#,
                    px(m),
                    py(ymin),
                    px(m),
                    py(ymax)
                );
            }
        }
        let mut path = String::new();
        let mut pen_down = false;
        for (&x, &y) in xs.iter().zip(ys) {
            if !y.is_finite() {
                pen_down = false;
                continue;
            }
            let cmd = if pen_down { 'L' } else { 'M' };
            let _ = write!(path, "{}{:.2} {:.2} ", cmd, px(x), py(y));
            pen_down = true;
        }
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="blue" stroke-width="1.5"/>"#,
            path.trim_end()
        );
        let _ = writeln!(
            out,
            r#"<rect x="{m}" y="{m}" width="{iw}" height="{ih}" fill="none" stroke="black"/>"#,
            m = margin,
            iw = w - 2.0 * margin,
            ih = h - 2.0 * margin
        );
        let _ = writeln!(
            out,
            r#"<text x="{margin}" y="{}" font-family="monospace" font-size="12">x: [{xmin}, {xmax}]  y: [{ymin}, {ymax}]</text>"#,
            h - 12.0
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_is_deterministic() {
        let t = vec![0.0, 0.5, 1.0];
        let s = vec![0.25, 0.75];
        let vals = vec![vec![-1.0, 0.0, 1.0], vec![0.5, f64::NAN, -0.5]];
        let a = heatmap("kernel", &t, &s, &vals);
        let b = heatmap("kernel", &t, &s, &vals);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("</svg>"));

        let xs = vec![0.0, 1.0, 2.0, 3.0];
        let ys = vec![1.0, -1.0, f64::INFINITY, 0.5];
        let p1 = line_plot("det", &xs, &ys, &[1.5]);
        let p2 = line_plot("det", &xs, &ys, &[1.5]);
        assert_eq!(p1, p2);
    }
}
