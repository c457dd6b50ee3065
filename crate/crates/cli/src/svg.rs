//! Standalone SVG rendering of a ROC curve. No plotting dependency: the
//! figure is a 600x600 viewBox with an axis frame, a dashed diagonal
//! reference line, and the curve polyline.

const SIZE: f64 = 600.0;

fn to_plot(fpr: f64, tpr: f64) -> (f64, f64) {
    (fpr * SIZE, (1.0 - tpr) * SIZE)
}

fn fmt_coord(v: f64) -> String {
    // Trim trailing zeros so round coordinates stay short.
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

/// Renders the curve points (in [0,1] x [0,1]) as a complete SVG document.
pub fn render_roc(points: &[(f64, f64)], auc: f64) -> String {
    let polyline: Vec<String> = points
        .iter()
        .map(|&(fpr, tpr)| {
            let (x, y) = to_plot(fpr, tpr);
            format!("{},{}", fmt_coord(x), fmt_coord(y))
        })
        .collect();
    let polyline = polyline.join(" ");

    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {size} {size}\" ",
            "width=\"{size}\" height=\"{size}\">\n",
            "  <rect x=\"0\" y=\"0\" width=\"{size}\" height=\"{size}\" ",
            "fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n",
            "  <line x1=\"0\" y1=\"{size}\" x2=\"{size}\" y2=\"0\" ",
            "stroke=\"grey\" stroke-width=\"1\" stroke-dasharray=\"8 6\"/>\n",
            "  <polyline points=\"{points}\" fill=\"none\" ",
            "stroke=\"steelblue\" stroke-width=\"2\"/>\n",
            "  <text x=\"300\" y=\"592\" text-anchor=\"middle\" ",
            "font-family=\"sans-serif\" font-size=\"14\">FPR</text>\n",
            "  <text x=\"10\" y=\"300\" text-anchor=\"middle\" ",
            "font-family=\"sans-serif\" font-size=\"14\" ",
            "transform=\"rotate(-90 10 300)\">TPR</text>\n",
            "  <text x=\"420\" y=\"560\" font-family=\"sans-serif\" ",
            "font-size=\"14\">AUC = {auc:.5}</text>\n",
            "</svg>\n"
        ),
        size = SIZE,
        points = polyline,
        auc = auc,
    )
}
