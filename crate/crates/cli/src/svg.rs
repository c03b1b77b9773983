//! Minimal static SVG renderer for profile curves (step functions on a
//! shared grid).

use gsdo::bench::ProfileTable;

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
];

pub fn render_profile(table: &ProfileTable, title: &str, x_label: &str) -> String {
    let width = 640.0;
    let height = 420.0;
    let margin_left = 60.0;
    let margin_right = 20.0;
    let margin_top = 40.0;
    let margin_bottom = 50.0;
    let plot_w = width - margin_left - margin_right;
    let plot_h = height - margin_top - margin_bottom;

    let x_min = table.grid.first().copied().unwrap_or(0.0);
    let x_max = table.grid.last().copied().unwrap_or(1.0).max(x_min + 1e-9);
    let to_x = |v: f64| margin_left + (v - x_min) / (x_max - x_min) * plot_w;
    let to_y = |v: f64| margin_top + (1.0 - v) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{title}</text>\n",
        width / 2.0
    ));

    // Axes and grid lines at fraction ticks.
    for i in 0..=5 {
        let frac = i as f64 / 5.0;
        let y = to_y(frac);
        svg.push_str(&format!(
            "<line x1=\"{margin_left}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#dddddd\"/>\n",
            margin_left + plot_w
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{frac:.1}</text>\n",
            margin_left - 6.0,
            y + 4.0
        ));
        let xv = x_min + frac * (x_max - x_min);
        let x = to_x(xv);
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{xv:.2}</text>\n",
            margin_top + plot_h + 16.0
        ));
    }
    svg.push_str(&format!(
        "<rect x=\"{margin_left}\" y=\"{margin_top}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{x_label}</text>\n",
        margin_left + plot_w / 2.0,
        height - 12.0
    ));

    for (s, curve) in table.curves.iter().enumerate() {
        let color = COLORS[s % COLORS.len()];
        let mut points = Vec::with_capacity(curve.len() * 2);
        let mut prev_y: Option<f64> = None;
        for (i, (&g, &v)) in table.grid.iter().zip(curve).enumerate() {
            let x = to_x(g);
            let y = to_y(v);
            if let Some(py) = prev_y {
                if i > 0 {
                    points.push(format!("{x},{py}")); // step style
                }
            }
            points.push(format!("{x},{y}"));
            prev_y = Some(y);
        }
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        let ly = margin_top + 14.0 + 16.0 * s as f64;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n",
            margin_left + 10.0,
            margin_left + 34.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            margin_left + 40.0,
            ly + 4.0,
            table.labels[s]
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
