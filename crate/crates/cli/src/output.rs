//! Deterministic CSV / JSON / SVG emission. Every file embeds the full
//! parameter record, floats are printed with 17 significant digits, and
//! identical inputs produce byte-identical output.

use polwig::states::StokesVector;
use polwig::wigner::WignerGrid;
use serde_json::json;

/// 17 significant digits, enough to reproduce any f64 exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub const GENERATOR: &str = concat!("polwig ", env!("CARGO_PKG_VERSION"));

/// The `# key=value` header block shared by all formats.
fn grid_metadata(grid: &WignerGrid, extra: &[(&str, String)]) -> Vec<(String, String)> {
    let mut meta: Vec<(String, String)> = vec![("generator".into(), GENERATOR.into())];
    for (k, v) in extra {
        meta.push((k.to_string(), v.clone()));
    }
    let p = &grid.params;
    let b = &grid.base;
    let pairs: [(&str, String); 16] = [
        ("evaluator", grid.evaluator.name().into()),
        ("proportional", grid.proportional.to_string()),
        ("beta_mod", fmt_float(p.beta_mod)),
        ("beta_phase", fmt_float(p.beta_phase)),
        ("p2_mod", fmt_float(p.p2_mod)),
        ("p2_phase", fmt_float(p.p2_phase)),
        ("phs_mod", fmt_float(p.phs_mod)),
        ("phs_phase", fmt_float(p.phs_phase)),
        ("gamma_mod", fmt_float(p.gamma_mod())),
        ("alpha_mod", fmt_float(b.alpha_mod)),
        ("phi_x", fmt_float(b.phi_x)),
        ("delta", fmt_float(b.delta)),
        ("m", b.m.to_string()),
        ("l", b.l.to_string()),
        ("k", b.k.to_string()),
        ("values", format!("{}x{}", grid.axis1.count, grid.axis2.count)),
    ];
    meta.extend(pairs.into_iter().map(|(k, v)| (k.to_string(), v)));
    for (tag, ax) in [("axis1", &grid.axis1), ("axis2", &grid.axis2)] {
        meta.push((format!("{tag}_name"), ax.axis.name().into()));
        meta.push((format!("{tag}_start"), fmt_float(ax.start)));
        meta.push((format!("{tag}_stop"), fmt_float(ax.stop)));
        meta.push((format!("{tag}_count"), ax.count.to_string()));
    }
    meta
}

/// CSV: `#` metadata lines, a column header, then one row per cell in
/// row-major axis1-outer order.
pub fn grid_csv(grid: &WignerGrid, extra: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in grid_metadata(grid, extra) {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str(&format!("{},{},w\n", grid.axis1.axis.name(), grid.axis2.axis.name()));
    for (i, v1) in grid.axis1.values().enumerate() {
        for (j, v2) in grid.axis2.values().enumerate() {
            out.push_str(&fmt_float(v1));
            out.push(',');
            out.push_str(&fmt_float(v2));
            out.push(',');
            out.push_str(&fmt_float(grid.at(i, j)));
            out.push('\n');
        }
    }
    out
}

pub fn grid_json(grid: &WignerGrid, extra: &[(&str, String)]) -> String {
    let meta: serde_json::Map<String, serde_json::Value> = grid_metadata(grid, extra)
        .into_iter()
        .map(|(k, v)| (k, serde_json::Value::String(v)))
        .collect();
    let rows: Vec<Vec<f64>> = (0..grid.axis1.count)
        .map(|i| (0..grid.axis2.count).map(|j| grid.at(i, j)).collect())
        .collect();
    let doc = json!({
        "metadata": meta,
        "axis1": grid.axis1.values().collect::<Vec<f64>>(),
        "axis2": grid.axis2.values().collect::<Vec<f64>>(),
        "values": rows,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("grid json");
    text.push('\n');
    text
}

// perceptually uniform ramp (viridis control points)
const RAMP: [(u8, u8, u8); 9] = [
    (68, 1, 84),
    (72, 40, 120),
    (62, 74, 137),
    (49, 104, 142),
    (38, 130, 142),
    (31, 158, 137),
    (53, 183, 121),
    (109, 205, 89),
    (253, 231, 37),
];

fn ramp_color(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let lo = (t.floor() as usize).min(RAMP.len() - 2);
    let frac = t - lo as f64;
    let (r0, g0, b0) = RAMP[lo];
    let (r1, g1, b1) = RAMP[lo + 1];
    let lerp = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * frac).round() as u8;
    (lerp(r0, r1), lerp(g0, g1), lerp(b0, b1))
}

/// SVG heatmap with the metadata embedded as a comment and the value range
/// annotated below the plot.
pub fn grid_svg(grid: &WignerGrid, extra: &[(&str, String)]) -> String {
    let (n1, n2) = grid.shape();
    let cell = 8usize;
    let margin = 40usize;
    let width = margin * 2 + n2 * cell;
    let height = margin * 2 + n1 * cell + 20;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in &grid.values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = hi - lo;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n<!--\n"
    ));
    for (k, v) in grid_metadata(grid, extra) {
        out.push_str(&format!("{k}={v}\n"));
    }
    out.push_str("-->\n");
    out.push_str(&format!(
        "<rect width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>\n"
    ));
    // axis1 runs upward, axis2 runs rightward
    for i in 0..n1 {
        for j in 0..n2 {
            let v = grid.at(i, j);
            let t = if span > 0.0 { (v - lo) / span } else { 0.5 };
            let (r, g, b) = ramp_color(t);
            let x = margin + j * cell;
            let y = margin + (n1 - 1 - i) * cell;
            out.push_str(&format!(
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" \
                 fill=\"#{r:02x}{g:02x}{b:02x}\"/>\n"
            ));
        }
    }
    let label_y = margin + n1 * cell + 16;
    out.push_str(&format!(
        "<text x=\"{margin}\" y=\"30\" font-family=\"monospace\" font-size=\"12\">{} \
         (vertical: {}, horizontal: {})</text>\n",
        grid.evaluator.name(),
        grid.axis1.axis.name(),
        grid.axis2.axis.name()
    ));
    out.push_str(&format!(
        "<text x=\"{margin}\" y=\"{label_y}\" font-family=\"monospace\" font-size=\"12\">min={} \
         max={}</text>\n",
        fmt_float(lo),
        fmt_float(hi)
    ));
    out.push_str("</svg>\n");
    out
}

/// Stokes sweep table: one row per scale factor, limit rows included.
pub fn stokes_csv(
    header: &[(&str, String)],
    rows: &[(f64, f64, f64, f64, f64, StokesVector)],
) -> String {
    let mut out = String::new();
    out.push_str(&format!("# generator={GENERATOR}\n"));
    for (k, v) in header {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str("scale,beta_mod,gamma_mod,j_sum,lambda,s0,s1,s2,s3\n");
    for (scale, beta_mod, gamma_mod, j_sum, lambda, sv) in rows {
        let cells = [*scale, *beta_mod, *gamma_mod, *j_sum, *lambda, sv.s0, sv.s1, sv.s2, sv.s3];
        let line: Vec<String> = cells.iter().map(|v| fmt_float(*v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
