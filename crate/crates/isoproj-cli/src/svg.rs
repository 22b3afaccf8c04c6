//! Minimal SVG log-log scatter plot for dimension reports.

use std::io::Write;
use std::path::Path;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

/// Writes a log-log plot of `count` against `1/scale` with the fitted
/// window marked as a line of the given slope.
pub fn write_loglog(
    path: &Path,
    scales: &[f64],
    counts: &[usize],
    slope: f64,
    window: (usize, usize),
    title: &str,
) -> std::io::Result<()> {
    let xs: Vec<f64> = scales.iter().map(|s| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c.max(1) as f64).ln()).collect();
    let (xmin, xmax) = bounds(&xs);
    let (ymin, ymax) = bounds(&ys);
    let sx = |x: f64| MARGIN + (x - xmin) / (xmax - xmin).max(1e-12) * (WIDTH - 2.0 * MARGIN);
    let sy =
        |y: f64| HEIGHT - MARGIN - (y - ymin) / (ymax - ymin).max(1e-12) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{}</text>\n",
        MARGIN, title
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\">log(1/scale)</text>\n",
        WIDTH / 2.0 - 40.0,
        HEIGHT - 20.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" transform=\"rotate(-90 16 {:.1})\">log(count)</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));
    // fitted line over the window
    if window.1 > window.0 {
        let (x0, x1) = (xs[window.0], xs[window.1 - 1]);
        let anchor = ys[window.0];
        let y1 = anchor + slope * (x1 - x0);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#c22\" stroke-width=\"1.5\"/>\n",
            sx(x0),
            sy(anchor),
            sx(x1),
            sy(y1)
        ));
    }
    for (x, y) in xs.iter().zip(ys.iter()) {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"#225\"/>\n",
            sx(*x),
            sy(*y)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"44\" font-family=\"monospace\" font-size=\"12\">slope {:.4}</text>\n",
        MARGIN, slope
    ));
    svg.push_str("</svg>\n");

    let mut file = std::fs::File::create(path)?;
    file.write_all(svg.as_bytes())
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if (max - min).abs() < 1e-12 {
        (min - 1.0, max + 1.0)
    } else {
        (min, max)
    }
}
