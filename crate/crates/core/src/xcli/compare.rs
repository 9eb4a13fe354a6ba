//! Column-wise comparison of two CSV results sharing a grid column.

use std::path::Path;

use super::ScenarioError;
use crate::textfmt::parse_f64;

/// Relative tolerance for grid points to count as equal.
const GRID_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnDeviation {
    pub column: String,
    pub max_abs: f64,
    /// Grid value where the maximum occurs.
    pub at: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub grid_column: String,
    pub rows: usize,
    pub tol: f64,
    pub columns: Vec<ColumnDeviation>,
    /// Headers present in only one file.
    pub skipped: Vec<String>,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.columns.iter().all(|c| c.max_abs <= self.tol)
    }

    pub fn max_deviation(&self) -> f64 {
        self.columns.iter().map(|c| c.max_abs).fold(0.0, f64::max)
    }

    /// One line per column plus a verdict line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.columns {
            let mark = if c.max_abs <= self.tol { "ok" } else { "FAIL" };
            out.push_str(&format!(
                "{:<16} max_abs_dev {:.3e} at {} = {:.6e}  {mark}\n",
                c.column, c.max_abs, self.grid_column, c.at
            ));
        }
        for s in &self.skipped {
            out.push_str(&format!("{s:<16} skipped (not in both files)\n"));
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{verdict}: {} columns over {} rows, max deviation {:.3e}, tol {:.3e}\n",
            self.columns.len(),
            self.rows,
            self.max_deviation(),
            self.tol
        ));
        out
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn parse_csv(text: &str, name: &str) -> Result<Table, ScenarioError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (_, head) = lines
        .next()
        .ok_or_else(|| ScenarioError::Compare(format!("{name}: empty file")))?;
    let header: Vec<String> = head.split(',').map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let row: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
        if row.len() != header.len() {
            return Err(ScenarioError::Compare(format!(
                "{name}:{}: expected {} fields, found {}",
                idx + 1,
                header.len(),
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}

fn grid_value(field: &str, name: &str, row: usize) -> Result<f64, ScenarioError> {
    parse_f64(field).ok_or_else(|| ScenarioError::Compare(format!("{name}: row {row}: grid value {field:?} is not a number")))
}

/// Per-cell deviation; identical non-numeric cells count as zero.
fn cell_deviation(a: &str, b: &str) -> f64 {
    match (parse_f64(a), parse_f64(b)) {
        (Some(x), Some(y)) if x == y => 0.0,
        (Some(x), Some(y)) => (x - y).abs(),
        _ if a == b => 0.0,
        _ => f64::INFINITY,
    }
}

pub fn compare_texts(a: &str, b: &str, tol: f64, names: (&str, &str)) -> Result<CompareReport, ScenarioError> {
    if !(tol >= 0.0) {
        return Err(ScenarioError::Compare(format!("tolerance must be non-negative, got {tol}")));
    }
    let (ta, tb) = (parse_csv(a, names.0)?, parse_csv(b, names.1)?);
    if ta.header[0] != tb.header[0] {
        return Err(ScenarioError::Compare(format!(
            "grid mismatch: first columns are {:?} and {:?}",
            ta.header[0], tb.header[0]
        )));
    }
    if ta.rows.len() != tb.rows.len() {
        return Err(ScenarioError::Compare(format!(
            "grid mismatch: {} rows against {}",
            ta.rows.len(),
            tb.rows.len()
        )));
    }
    let mut grid = Vec::with_capacity(ta.rows.len());
    for (k, (ra, rb)) in ta.rows.iter().zip(&tb.rows).enumerate() {
        let (x, y) = (grid_value(&ra[0], names.0, k + 1)?, grid_value(&rb[0], names.1, k + 1)?);
        if (x - y).abs() > GRID_TOL * x.abs().max(y.abs()).max(1.0) {
            return Err(ScenarioError::Compare(format!(
                "grid mismatch at row {}: {} = {x} against {y}",
                k + 1,
                ta.header[0]
            )));
        }
        grid.push(x);
    }
    let mut columns = Vec::new();
    let mut skipped = Vec::new();
    for (ia, col) in ta.header.iter().enumerate().skip(1) {
        let Some(ib) = tb.header.iter().position(|h| h == col) else {
            skipped.push(col.clone());
            continue;
        };
        let mut dev = ColumnDeviation {
            column: col.clone(),
            max_abs: 0.0,
            at: grid.first().copied().unwrap_or(0.0),
        };
        for (k, (ra, rb)) in ta.rows.iter().zip(&tb.rows).enumerate() {
            let d = cell_deviation(&ra[ia], &rb[ib]);
            if d > dev.max_abs || d.is_nan() {
                dev.max_abs = if d.is_nan() { f64::INFINITY } else { d };
                dev.at = grid[k];
            }
        }
        columns.push(dev);
    }
    skipped.extend(tb.header.iter().skip(1).filter(|h| !ta.header.contains(h)).cloned());
    if columns.is_empty() {
        return Err(ScenarioError::Compare("no data columns in common".to_string()));
    }
    Ok(CompareReport {
        grid_column: ta.header[0].clone(),
        rows: grid.len(),
        tol,
        columns,
        skipped,
    })
}

pub fn compare_files(a: &Path, b: &Path, tol: f64) -> Result<CompareReport, ScenarioError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|source| ScenarioError::Io {
            path: p.display().to_string(),
            source,
        })
    };
    let (ta, tb) = (read(a)?, read(b)?);
    compare_texts(&ta, &tb, tol, (&a.display().to_string(), &b.display().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: &str = "t_s,re_s,im_s\n0,1,0\n0.5,0.25,0.1\n1,0,0\n";

    #[test]
    fn identical_files_pass_at_zero_tolerance() {
        let r = compare_texts(A, A, 0.0, ("a", "b")).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_deviation(), 0.0);
        assert_eq!(r.rows, 3);
    }

    #[test]
    fn deviation_located_and_thresholded() {
        let b = "t_s,re_s\n0.0,1.0\n5e-1,0.3\n1.0,0.0\n";
        let r = compare_texts(A, b, 0.01, ("a", "b")).unwrap();
        assert_eq!(r.columns.len(), 1);
        assert!((r.columns[0].max_abs - 0.05).abs() < 1e-12);
        assert_eq!(r.columns[0].at, 0.5);
        assert_eq!(r.skipped, vec!["im_s"]);
        assert!(!r.passed());
        assert!(compare_texts(A, b, 0.06, ("a", "b")).unwrap().passed());
    }

    #[test]
    fn grid_mismatches_are_errors() {
        let shifted = "t_s,re_s\n0,1\n0.6,0.25\n1,0\n";
        assert!(compare_texts(A, shifted, 1.0, ("a", "b")).is_err());
        let short = "t_s,re_s\n0,1\n";
        assert!(compare_texts(A, short, 1.0, ("a", "b")).is_err());
        let other = "freq_hz,re_s\n0,1\n0.5,0.25\n1,0\n";
        assert!(compare_texts(A, other, 1.0, ("a", "b")).is_err());
        assert!(compare_texts(A, "t_s,x\n0,1\n0.5,0\n1,0\n", 1.0, ("a", "b")).is_err());
    }

    #[test]
    fn text_cells() {
        let a = "site,label,arrival_s\n0,c0,0.1\n1,c1,\n";
        assert!(compare_texts(a, a, 0.0, ("a", "b")).unwrap().passed());
        let b = "site,label,arrival_s\n0,c0,0.1\n1,c1,0.2\n";
        let r = compare_texts(a, b, 1.0, ("a", "b")).unwrap();
        assert!(!r.passed());
    }
}
