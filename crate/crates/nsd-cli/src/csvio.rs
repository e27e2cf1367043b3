//! Convergence-table CSV, locale independent, full double precision
//! (shortest round-trip formatting).

use nsdarcy::scenario::{ConvergenceRow, ConvergenceTable};
use std::io::{self, Write};

pub const CONVERGENCE_HEADER: &str =
    "dt,h,err_u_l2H1,rate_u,err_p_linfL2,rate_p,err_phi_l2H1,rate_phi";

/// Serializes a table; rate fields are blank in the first row.
pub fn convergence_csv(table: &ConvergenceTable) -> String {
    let rates = table.rates();
    let mut out = String::from(CONVERGENCE_HEADER);
    out.push('\n');
    for (row, rate) in table.rows.iter().zip(&rates) {
        let fmt_rate = |r: Option<f64>| r.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.dt,
            row.h,
            row.err_u,
            fmt_rate(rate[0]),
            row.err_p,
            fmt_rate(rate[1]),
            row.err_phi,
            fmt_rate(rate[2]),
        ));
    }
    out
}

pub fn write_convergence_csv(path: &std::path::Path, table: &ConvergenceTable) -> io::Result<()> {
    if table.rows.is_empty() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "refusing to write an empty convergence table",
        ));
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(convergence_csv(table).as_bytes())
}

/// Parses the CSV back (errors and grid only; rates are derived data).
pub fn parse_convergence_csv(text: &str) -> Result<ConvergenceTable, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    if header != CONVERGENCE_HEADER {
        return Err(format!("unexpected header {header:?}"));
    }
    let mut table = ConvergenceTable::default();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 8 {
            return Err(format!(
                "row {} has {} columns, expected 8",
                i + 1,
                cols.len()
            ));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1));
        table.rows.push(ConvergenceRow {
            dt: num(cols[0])?,
            h: num(cols[1])?,
            err_u: num(cols[2])?,
            err_p: num(cols[4])?,
            err_phi: num(cols[6])?,
        });
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ConvergenceTable {
        ConvergenceTable {
            rows: vec![
                ConvergenceRow {
                    dt: 0.25,
                    h: 0.5,
                    err_u: 2.452e-2,
                    err_p: 6.862e-4,
                    err_phi: 5.456e-3,
                },
                ConvergenceRow {
                    dt: 0.0625,
                    h: 0.25,
                    err_u: 4.693e-3,
                    err_p: 1.822e-4,
                    err_phi: 1.103e-3,
                },
            ],
        }
    }

    #[test]
    fn one_row_table_has_blank_rates() {
        let table = ConvergenceTable {
            rows: sample().rows[..1].to_vec(),
        };
        let text = convergence_csv(&table);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CONVERGENCE_HEADER);
        let row = lines.next().unwrap();
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[3], "");
        assert_eq!(cols[5], "");
        assert_eq!(cols[7], "");
        assert!(lines.next().is_none());
    }

    #[test]
    fn five_level_table_layout() {
        // A table shaped like the first-order study (dt = 1/4 ... 1/1024,
        // factor 4) serializes as a header plus five data rows.
        let rows: Vec<ConvergenceRow> = (0..5)
            .map(|i| {
                let dt = 0.25 / 4f64.powi(i);
                ConvergenceRow {
                    dt,
                    h: dt.sqrt(),
                    err_u: 1e-2 / 4f64.powi(i),
                    err_p: 1e-3 / 4f64.powi(i),
                    err_phi: 1e-3 / 4f64.powi(i),
                }
            })
            .collect();
        let table = ConvergenceTable { rows };
        let text = convergence_csv(&table);
        assert_eq!(text.lines().count(), 6);
        assert!(text.lines().nth(5).unwrap().starts_with("0.0009765625,"));
        let parsed = parse_convergence_csv(&text).unwrap();
        assert_eq!(parsed.rows.len(), 5);
    }

    #[test]
    fn round_trip_is_exact() {
        let table = sample();
        let parsed = parse_convergence_csv(&convergence_csv(&table)).unwrap();
        assert_eq!(parsed.rows.len(), table.rows.len());
        for (a, b) in table.rows.iter().zip(&parsed.rows) {
            assert_eq!(a.dt, b.dt);
            assert_eq!(a.h, b.h);
            assert_eq!(a.err_u, b.err_u);
            assert_eq!(a.err_p, b.err_p);
            assert_eq!(a.err_phi, b.err_phi);
        }
    }
}
