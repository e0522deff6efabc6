use serde::Serialize;

use crate::error::{NskError, Result};

/// Time-stamped records of named diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DiagnosticSeries {
    pub columns: Vec<String>,
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl DiagnosticSeries {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            times: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(NskError::Incompatible(format!(
                "row has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(NskError::InvalidParameter(format!("stamps must increase ({t} after {last})")));
            }
        }
        self.times.push(t);
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn last(&self, name: &str) -> Option<f64> {
        let i = self.column_index(name)?;
        self.rows.last().map(|r| r[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stamps_must_increase() {
        let mut s = DiagnosticSeries::new(vec!["E".into()]);
        s.push(0.0, vec![1.0]).unwrap();
        assert!(s.push(0.0, vec![2.0]).is_err());
        assert!(s.push(1.0, vec![2.0, 3.0]).is_err());
        s.push(0.5, vec![2.0]).unwrap();
        assert_eq!(s.column("E").unwrap(), vec![1.0, 2.0]);
        assert_eq!(s.last("E"), Some(2.0));
        assert!(s.column("D").is_none());
    }
}
