//! Tabular (CSV) and graphical (SVG) renderings of metric, regression,
//! word-frequency and structure results.

use std::fmt::Write as _;

use crate::metrics::{CategoryFrequency, Metric, MetricTable, RegressionResult};
use crate::structure::StructureReport;

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn num(v: f64, decimals: Option<usize>) -> String {
    Metric::Value(v).format(decimals)
}

fn opt(v: Option<f64>, decimals: Option<usize>) -> String {
    Metric::from_option(v).format(decimals)
}

/// Per-prompt-class table: hit outcome, concept validity, its signal-to-noise
/// ratio and profile match. `decimals = None` keeps full precision.
pub fn concept_csv(t: &MetricTable, decimals: Option<usize>) -> String {
    let mut rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            vec![
                r.row.clone(),
                r.parent.clone(),
                r.total.to_string(),
                r.hit.label(),
                r.concept_validity.format(decimals),
                r.concept_snr.format(decimals),
                r.profile_match.format(decimals),
            ]
        })
        .collect();
    let s = &t.summary;
    rows.push(vec![
        "Mean".into(),
        String::new(),
        String::new(),
        format!("{}/{}", s.row_hits, s.row_count),
        s.concept_validity.format(decimals),
        s.concept_snr.format(decimals),
        s.profile_match.format(decimals),
    ]);
    csv_string(
        &["prompt", "parent", "total", "hit", "concept_validity", "concept_snr", "profile_match"],
        rows,
    )
}

/// Per-dictionary-category table: column hit, discriminant validity, its
/// signal-to-noise ratio and profile match.
pub fn discriminant_csv(t: &MetricTable, decimals: Option<usize>) -> String {
    let mut rows: Vec<Vec<String>> = t
        .columns
        .iter()
        .map(|c| {
            vec![
                c.column.clone(),
                c.total.to_string(),
                c.hit.label(),
                c.discriminant_validity.format(decimals),
                c.discriminant_snr.format(decimals),
                c.discriminant_profile_match.format(decimals),
            ]
        })
        .collect();
    let s = &t.summary;
    rows.push(vec![
        "Mean".into(),
        String::new(),
        format!("{}/{}", s.column_hits, s.column_count),
        s.discriminant_validity.format(decimals),
        s.discriminant_snr.format(decimals),
        s.discriminant_profile_match.format(decimals),
    ]);
    csv_string(
        &["value", "total", "hit", "discriminant_validity", "discriminant_snr", "profile_match"],
        rows,
    )
}

pub fn regression_csv(r: &RegressionResult, decimals: Option<usize>) -> String {
    let row = |c: &crate::metrics::Coefficient| {
        vec![
            c.name.clone(),
            num(c.b, decimals),
            num(c.b_ci[0], decimals),
            num(c.b_ci[1], decimals),
            opt(c.beta, decimals),
            opt(c.beta_ci.map(|x| x[0]), decimals),
            opt(c.beta_ci.map(|x| x[1]), decimals),
            opt(c.sr2, decimals),
            opt(c.r, decimals),
            num(c.t, decimals),
            num(c.p, decimals),
        ]
    };
    let mut rows = vec![row(&r.intercept)];
    rows.extend(r.coefficients.iter().map(row));
    let mut fit = vec![String::new(); 11];
    fit[0] = format!("Fit: R2 = {}", num(r.r_squared, decimals));
    fit[1] = format!("adj R2 = {}", num(r.adj_r_squared, decimals));
    fit[2] = format!("F({}, {}) = {}", r.df_model, r.df_residual, num(r.f_statistic, decimals));
    fit[10] = num(r.f_p, decimals);
    rows.push(fit);
    csv_string(
        &["predictor", "b", "b_ci_low", "b_ci_high", "beta", "beta_ci_low", "beta_ci_high", "sr2", "r", "t", "p"],
        rows,
    )
}

/// Word-frequency statistics per category; categories without any matched
/// term are flagged.
pub fn wordfreq_csv(stats: &[CategoryFrequency], decimals: Option<usize>) -> String {
    let int = |v: Option<u64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
    let rows = stats
        .iter()
        .map(|c| {
            vec![
                c.category.clone(),
                c.terms.to_string(),
                c.matched.to_string(),
                c.missing.len().to_string(),
                opt(c.mean, decimals),
                opt(c.sd, decimals),
                opt(c.median, decimals),
                int(c.min),
                int(c.max),
                int(c.range),
                if c.matched == 0 { "no_matches".into() } else { String::new() },
            ]
        })
        .collect();
    csv_string(
        &["value", "terms", "matched", "missing", "mean", "sd", "median", "min", "max", "range", "flag"],
        rows,
    )
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Vertical bar chart of non-negative values.
pub fn bar_chart_svg(title: &str, bars: &[(String, f64)]) -> String {
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (60.0, 20.0, 40.0, 50.0);
    let plot_w = w - left - right;
    let plot_h = h - top - bottom;
    let max = bars.iter().map(|b| b.1).fold(0.0f64, f64::max);
    let ymax = if max > 0.0 { nice_ceiling(max) } else { 1.0 };
    let slot = plot_w / bars.len().max(1) as f64;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#, w / 2.0, esc(title));
    for k in 0..=4 {
        let v = ymax * k as f64 / 4.0;
        let y = top + plot_h - plot_h * k as f64 / 4.0;
        let _ = writeln!(s, r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, w - right);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#, left - 6.0, y + 4.0, trim_num(v));
    }
    for (i, (label, v)) in bars.iter().enumerate() {
        let bh = plot_h * v.max(0.0) / ymax;
        let x = left + slot * i as f64 + slot * 0.15;
        let y = top + plot_h - bh;
        let _ = writeln!(s, r##"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{bh:.2}" fill="#4a78a8"><title>{}: {}</title></rect>"##, slot * 0.7, esc(label), trim_num(*v));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#, left + slot * (i as f64 + 0.5), top + plot_h + 18.0, esc(label));
    }
    let _ = writeln!(s, r#"<line x1="{left}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#, top + plot_h, w - right, top + plot_h);
    s.push_str("</svg>\n");
    s
}

fn nice_ceiling(v: f64) -> f64 {
    let mag = 10f64.powf(v.log10().floor());
    for step in [1.0, 2.0, 2.5, 5.0, 10.0] {
        if step * mag >= v {
            return step * mag;
        }
    }
    10.0 * mag
}

fn trim_num(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Fitted configuration (filled) against the theoretical circle (hollow),
/// with a segment from each fitted point to its target.
pub fn structure_svg(r: &StructureReport) -> String {
    let size = 520.0;
    let c = size / 2.0;
    let extent = r
        .fit
        .fitted
        .iter()
        .flat_map(|p| p.iter().map(|v| v.abs()))
        .fold(1.0f64, f64::max)
        * 1.15;
    let scale = (size / 2.0 - 40.0) / extent;
    let px = |x: f64| c + x * scale;
    let py = |y: f64| c - y * scale;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" font-family="sans-serif">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{c}" y="22" text-anchor="middle" font-size="14">phi = {:.3}, alienation = {:.3}, stress = {:.3}</text>"#,
        r.fit.phi, r.fit.alienation, r.configuration.stress
    );
    let _ = writeln!(s, r##"<circle cx="{c}" cy="{c}" r="{:.2}" fill="none" stroke="#bbb" stroke-dasharray="4 3"/>"##, scale);
    for (i, label) in r.configuration.labels.iter().enumerate() {
        let t = r.target[i];
        let f = &r.fit.fitted[i];
        let _ = writeln!(s, r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c66" stroke-width="1"/>"##, px(t[0]), py(t[1]), px(f[0]), py(f[1]));
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="white" stroke="#888"/>"##, px(t[0]), py(t[1]));
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="5" fill="#4a78a8"/>"##, px(f[0]), py(f[1]));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#, px(f[0]) + 7.0, py(f[1]) - 6.0, esc(label));
    }
    s.push_str("</svg>\n");
    s
}

/// Plain-text digest of metric tables (one per probe kind) and an optional
/// structure result.
pub fn summary_text(tables: &[(String, &MetricTable)], structure: Option<&StructureReport>) -> String {
    let mut s = String::new();
    for (name, t) in tables {
        let m = &t.summary;
        let _ = writeln!(s, "[{name}]");
        let _ = writeln!(s, "row hits: {}/{}", m.row_hits, m.row_count);
        let _ = writeln!(s, "column hits: {}/{}", m.column_hits, m.column_count);
        let _ = writeln!(s, "mean concept validity: {} (SNR {})", m.concept_validity.format(Some(3)), m.concept_snr.format(Some(2)));
        let _ = writeln!(s, "mean discriminant validity: {} (SNR {})", m.discriminant_validity.format(Some(3)), m.discriminant_snr.format(Some(2)));
        let _ = writeln!(s, "mean profile match: rows {}, columns {}", m.profile_match.format(Some(2)), m.discriminant_profile_match.format(Some(2)));
        let misses: Vec<String> = t
            .rows
            .iter()
            .filter(|r| !r.hit.is_hit())
            .map(|r| format!("{} ({})", r.row, r.hit.label()))
            .collect();
        if !misses.is_empty() {
            let _ = writeln!(s, "non-hits: {}", misses.join(", "));
        }
        s.push('\n');
    }
    if let Some(r) = structure {
        let _ = writeln!(s, "[structure]");
        let _ = writeln!(s, "stress-1: {:.4}", r.configuration.stress);
        let _ = writeln!(s, "phi: {:.3} (alienation {:.3})", r.fit.phi, r.fit.alienation);
        let per: Vec<String> = r.fit.phi_per_dim.iter().map(|p| format!("{p:.3}")).collect();
        let _ = writeln!(s, "phi per dimension: {}", per.join(", "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::CountMatrix;
    use crate::metrics::compute_metrics;
    use crate::probes::DEFAULT_CIRCLE_ORDER;

    fn s2() -> MetricTable {
        let m = CountMatrix::from_csv(include_str!("../fixtures/items.csv")).unwrap();
        compute_metrics(&m, &DEFAULT_CIRCLE_ORDER)
    }

    #[test]
    fn rounded_view_matches_published_cells() {
        let csv = concept_csv(&s2(), Some(2));
        let line = csv.lines().find(|l| l.starts_with("Security—Personal")).unwrap();
        assert!(line.starts_with("Security—Personal,SE,624,hit,0.33,0.49,"), "{line}");
        assert!(csv.lines().last().unwrap().starts_with("Mean,,,17/17,0.42,"));
        let d = discriminant_csv(&s2(), Some(2));
        assert!(d.lines().any(|l| l.starts_with("TR,322,hit,0.65,1.82,")));
    }

    #[test]
    fn full_precision_view_keeps_digits() {
        let csv = concept_csv(&s2(), None);
        let line = csv.lines().find(|l| l.starts_with("Security—Personal")).unwrap();
        let v: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert_eq!(v, 205.0 / 624.0);
    }

    #[test]
    fn bar_chart_has_one_bar_per_value() {
        let bars: Vec<(String, f64)> = DEFAULT_CIRCLE_ORDER.iter().map(|v| (v.to_string(), 10.0)).collect();
        let svg = bar_chart_svg("counts <items>", &bars);
        assert_eq!(svg.matches("<rect x=").count(), 10);
        assert!(svg.contains("counts &lt;items&gt;"));
    }
}
