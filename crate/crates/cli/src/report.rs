//! Plain-text tables and CSV assembly.

use persuade_lab::OutcomeStats;

/// Left-aligned first column, right-aligned numbers, two-space gutters.
pub fn text_table(headers: &[String], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut out = String::new();
        for (c, cell) in cells.iter().enumerate().take(cols) {
            if c > 0 {
                out.push_str("  ");
            }
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                out.push_str(cell);
                out.push_str(&" ".repeat(pad));
            } else {
                out.push_str(&" ".repeat(pad));
                out.push_str(cell);
            }
        }
        out.trim_end().to_string()
    };
    let mut out = line(headers);
    out.push('\n');
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&line(&rule));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

pub fn csv_string(headers: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 records")
}

pub fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub fn fixed(x: f64) -> String {
    format!("{x:.6}")
}

/// Shortest representation that parses back to the same value.
pub fn exact(x: f64) -> String {
    format!("{x}")
}

/// Columns shared by every per-mechanism CSV report, with one cost column
/// per member.
pub fn outcome_header(leading: &[&str], n_members: usize) -> Vec<String> {
    let mut h = strings(leading);
    h.extend(strings(&[
        "mechanism",
        "p_enact_good",
        "p_enact_bad",
        "p_enact",
    ]));
    h.extend((1..=n_members).map(|i| format!("cost_{i}")));
    h.push("verdict".to_string());
    h
}

pub fn outcome_record(
    leading: Vec<String>,
    mechanism: &str,
    o: &OutcomeStats,
    verdict: &str,
) -> Vec<String> {
    let mut r = leading;
    r.push(mechanism.to_string());
    r.extend([o.p_enact_good, o.p_enact_bad, o.p_enact].map(exact));
    r.extend(o.expected_cost.iter().copied().map(exact));
    r.push(verdict.to_string());
    r
}
