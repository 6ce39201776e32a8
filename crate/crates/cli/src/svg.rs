//! Static SVG line chart of objective versus iteration with a log-scale
//! y-axis. Output is plain markup built with deterministic formatting, so
//! rerunning the same comparison yields byte-identical files.

pub struct Series {
    pub name: &'static str,
    pub color: &'static str,
    pub points: Vec<(usize, f64)>,
}

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

pub fn objective_chart(series: &[Series]) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let max_iter = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .max()
        .unwrap_or(1)
        .max(1);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in series.iter().flat_map(|s| s.points.iter().map(|p| p.1)) {
        if v > 0.0 {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    // Whole-decade bounds; a fallback window when nothing is positive.
    let (dec_lo, dec_hi) = if lo.is_finite() {
        let lo = lo.log10().floor() as i32;
        let hi = hi.log10().ceil() as i32;
        (lo, if hi > lo { hi } else { lo + 1 })
    } else {
        (-1, 0)
    };
    let span = (dec_hi - dec_lo) as f64;
    let x_of = |iter: usize| LEFT + plot_w * iter as f64 / max_iter as f64;
    let y_of = |v: f64| {
        if v > 0.0 {
            let frac = ((v.log10() - dec_lo as f64) / span).clamp(0.0, 1.0);
            TOP + plot_h * (1.0 - frac)
        } else {
            // Nonpositive objectives sit on the axis floor.
            TOP + plot_h
        }
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(&format!(
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // Decade grid lines and labels.
    let decade_step = (((dec_hi - dec_lo) as usize).div_ceil(10)).max(1) as i32;
    let mut dec = dec_lo;
    while dec <= dec_hi {
        let y = y_of(10f64.powi(dec));
        out.push_str(&format!(
            "  <line x1=\"{LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            LEFT + plot_w
        ));
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" fill=\"#333333\">1e{dec}</text>\n",
            LEFT - 8.0,
            y + 4.0
        ));
        dec += decade_step;
    }

    // X ticks at five even positions.
    for tick in 0..=4u32 {
        let iter = (max_iter as f64 * tick as f64 / 4.0).round() as usize;
        let x = x_of(iter);
        out.push_str(&format!(
            "  <line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#999999\" stroke-width=\"1\"/>\n",
            TOP + plot_h,
            TOP + plot_h + 5.0
        ));
        out.push_str(&format!(
            "  <text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333333\">{iter}</text>\n",
            TOP + plot_h + 20.0
        ));
    }

    // Axes.
    out.push_str(&format!(
        "  <line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{:.2}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        TOP + plot_h
    ));
    out.push_str(&format!(
        "  <line x1=\"{LEFT}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    ));
    out.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" fill=\"#333333\">iteration</text>\n",
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    ));
    out.push_str(&format!(
        "  <text x=\"20\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" fill=\"#333333\" transform=\"rotate(-90 20 {:.2})\">objective (log scale)</text>\n",
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    ));

    // Series polylines.
    for s in series {
        let mut points = String::new();
        for &(iter, v) in &s.points {
            points.push_str(&format!("{:.2},{:.2} ", x_of(iter), y_of(v)));
        }
        out.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            s.color,
            points.trim_end()
        ));
    }

    // Legend in the top-right corner of the plot area.
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 16.0 + 18.0 * i as f64;
        let x = LEFT + plot_w - 150.0;
        out.push_str(&format!(
            "  <line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            y - 4.0,
            x + 24.0,
            y - 4.0,
            s.color
        ));
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">{}</text>\n",
            x + 32.0,
            s.name
        ));
    }

    out.push_str("</svg>\n");
    out
}
