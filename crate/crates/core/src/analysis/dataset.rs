//! Delay-scan tables: `delay_um,rate_hz,err_hz`.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScanDataset {
    pub positions_um: Vec<f64>,
    pub rates_hz: Vec<f64>,
    pub errors_hz: Vec<f64>,
}

pub const SCAN_HEADER: [&str; 3] = ["delay_um", "rate_hz", "err_hz"];

impl ScanDataset {
    pub fn new(positions_um: Vec<f64>, rates_hz: Vec<f64>, errors_hz: Vec<f64>) -> Result<Self> {
        if positions_um.len() != rates_hz.len() || rates_hz.len() != errors_hz.len() {
            return Err(Error::arg(format!(
                "scan columns differ in length ({}, {}, {})",
                positions_um.len(),
                rates_hz.len(),
                errors_hz.len()
            )));
        }
        if errors_hz.iter().any(|e| !(*e >= 0.0)) {
            return Err(Error::arg("rate errors must be >= 0"));
        }
        if positions_um.iter().chain(&rates_hz).any(|v| !v.is_finite()) {
            return Err(Error::arg("scan values must be finite"));
        }
        Ok(Self {
            positions_um,
            rates_hz,
            errors_hz,
        })
    }

    pub fn len(&self) -> usize {
        self.positions_um.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions_um.is_empty()
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, &path.display().to_string())
    }

    pub fn parse_csv(text: &str, source_name: &str) -> Result<Self> {
        let fail = |line: u64, message: String| Error::TableFormat {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut records = rdr.records();
        let header = match records.next() {
            Some(r) => r.map_err(|e| fail(1, e.to_string()))?,
            None => return Err(fail(1, "empty file".into())),
        };
        if header.iter().collect::<Vec<_>>() != SCAN_HEADER {
            return Err(fail(
                1,
                format!("expected header `{}`", SCAN_HEADER.join(",")),
            ));
        }
        let (mut d, mut r, mut e) = (Vec::new(), Vec::new(), Vec::new());
        for rec in records {
            let rec = rec.map_err(|err| {
                let line = err.position().map(|p| p.line()).unwrap_or(0);
                fail(line, err.to_string())
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            if rec.len() != 3 {
                return Err(fail(
                    line,
                    format!("expected 3 fields, found {}", rec.len()),
                ));
            }
            let mut vals = [0.0f64; 3];
            for (k, field) in rec.iter().enumerate() {
                vals[k] = field.parse().map_err(|_| {
                    fail(
                        line,
                        format!("`{field}` in column {} is not a number", SCAN_HEADER[k]),
                    )
                })?;
                if !vals[k].is_finite() {
                    return Err(fail(
                        line,
                        format!("non-finite value in column {}", SCAN_HEADER[k]),
                    ));
                }
            }
            if vals[2] < 0.0 {
                return Err(fail(line, "negative err_hz".into()));
            }
            d.push(vals[0]);
            r.push(vals[1]);
            e.push(vals[2]);
        }
        Self::new(d, r, e)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = SCAN_HEADER.join(",");
        out.push('\n');
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.positions_um[i], self.rates_hz[i], self.errors_hz[i]
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

/// Poisson standard error of a rate, `√N/T`.
pub fn rate_error(count: u64, duration_s: f64) -> f64 {
    (count as f64).sqrt() / duration_s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let s = ScanDataset::new(
            vec![-1.5, 0.0, 2.25],
            vec![4.0, 0.1, 3.9],
            vec![0.2, 0.05, 0.2],
        )
        .unwrap();
        let back = ScanDataset::parse_csv(&s.to_csv_string(), "t").unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn csv_errors_carry_line() {
        let text = "delay_um,rate_hz,err_hz\n0,1,0.1\n1,abc,0.1\n";
        match ScanDataset::parse_csv(text, "t") {
            Err(Error::TableFormat { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            ScanDataset::parse_csv("a,b,c\n", "t"),
            Err(Error::TableFormat { line: 1, .. })
        ));
    }

    #[test]
    fn rate_errors() {
        assert_eq!(rate_error(0, 10.0), 0.0);
        assert_eq!(rate_error(100, 10.0), 1.0);
    }
}
