//! Minimal SVG line plot of sweep fidelities.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::format::sig12;
use crate::sweep::SweepRow;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

type Axis = (&'static str, fn(&SweepRow) -> f64);

/// Which noise knob the x axis shows.
fn axis(rows: &[SweepRow]) -> Axis {
    let candidates: [Axis; 3] = [
        ("p_erase", |r| r.report.params.p_erase),
        ("p_dephase", |r| r.report.params.p_dephase),
        ("p_cnot", |r| r.report.params.p_cnot),
    ];
    for (name, get) in candidates {
        let first = rows.first().map(get);
        if rows.iter().any(|r| Some(get(r)) != first) {
            return (name, get);
        }
    }
    candidates[0]
}

/// Mean fidelity against the first varying noise parameter, one polyline
/// per combination of the remaining parameters and policy.
pub fn sweep_plot(rows: &[SweepRow]) -> String {
    let (name, get) = axis(rows);
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        let p = &r.report.params;
        let label = match name {
            "p_erase" => format!("{} dephase={} cnot={}", p.policy.as_str(), sig12(p.p_dephase), sig12(p.p_cnot)),
            "p_dephase" => format!("{} erase={} cnot={}", p.policy.as_str(), sig12(p.p_erase), sig12(p.p_cnot)),
            _ => format!("{} erase={} dephase={}", p.policy.as_str(), sig12(p.p_erase), sig12(p.p_dephase)),
        };
        series.entry(label).or_default().push((get(r), r.report.mean_fidelity));
    }
    let xs: Vec<f64> = rows.iter().map(get).collect();
    let xmin = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let xmax = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if xmax > xmin { xmax - xmin } else { 1.0 };
    let px = |x: f64| MARGIN + (x - xmin) / span * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - y.clamp(0.0, 1.0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, x1, y0, y1) = (px(xmin), px(xmin + span), py(0.0), py(1.0));
    let _ = writeln!(
        s,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{name}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="14" transform="rotate(-90 14 {})" text-anchor="middle">mean fidelity</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (label, y) in [("0", 0.0), ("1", 1.0)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{label}</text>"#,
            x0 - 6.0,
            py(y) + 4.0
        );
    }
    for (label, x) in [(sig12(xmin), xmin), (sig12(xmin + span), xmin + span)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{label}</text>"#,
            px(x),
            y0 + 16.0
        );
    }
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{label}</text>"#,
            MARGIN + 10.0,
            MARGIN + 14.0 * i as f64
        );
    }
    s.push_str("</svg>\n");
    s
}
