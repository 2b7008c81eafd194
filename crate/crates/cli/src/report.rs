//! Aligned text tables for evaluation reports.

use polyseg::EvalReport;

/// One row per song plus a corpus-mean row; columns follow the
/// P/R/F order per tolerance window (P_0, R_0, F_0, P_3, R_3, F_3, ...).
pub fn render_table(report: &EvalReport, ids: &[String]) -> String {
    let label_width = ids
        .iter()
        .map(String::len)
        .chain(["corpus (mean)".len(), "song".len()])
        .max()
        .unwrap_or(4);
    let mut out = String::new();
    let mut header = format!("{:label_width$}", "song");
    for &tol in &report.tolerances {
        for metric in ["P", "R", "F"] {
            header.push_str(&format!("  {:>7}", format!("{metric}_{tol}")));
        }
    }
    out.push_str(header.trim_end());
    out.push('\n');
    let pct = |x: f64| format!("{:.1}%", 100.0 * x);
    for (song, id) in report.songs.iter().zip(ids) {
        let mut row = format!("{id:label_width$}");
        for entry in &song.by_tolerance {
            for value in [entry.scores.precision, entry.scores.recall, entry.scores.f1] {
                row.push_str(&format!("  {:>7}", pct(value)));
            }
        }
        out.push_str(row.trim_end());
        out.push('\n');
    }
    let mut row = format!("{:label_width$}", "corpus (mean)");
    for means in &report.corpus {
        for value in [means.precision, means.recall, means.f1] {
            row.push_str(&format!("  {:>7}", pct(value)));
        }
    }
    out.push_str(row.trim_end());
    out.push('\n');
    out
}
