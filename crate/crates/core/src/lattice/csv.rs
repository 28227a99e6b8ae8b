//! Plain-text CSV form of a [`WeightGrid`]:
//!
//! ```text
//! # lo=1,1 hi=3,2
//! w(1,1),w(2,1),w(3,1)
//! w(1,2),w(2,2),w(3,2)
//! ```
//!
//! Rows are written bottom to top. Values use the shortest representation that parses back to
//! the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

use super::{GridBox, GridPoint, WeightGrid};
use crate::error::{LppError, Result};

impl WeightGrid {
    pub fn to_csv(&self) -> String {
        let b = self.bounds();
        let mut out = format!("# lo={},{} hi={},{}\n", b.lo().col, b.lo().row, b.hi().col, b.hi().row);
        for row in b.lo().row..=b.hi().row {
            for (c, v) in self.row(row).iter().enumerate() {
                if c > 0 {
                    out.push(',');
                }
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| LppError::invalid("empty grid CSV"))?;
        let bounds = parse_header(header)?;
        let mut values = Vec::with_capacity(bounds.area());
        for line in lines {
            for field in line.split(',') {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| LppError::invalid(format!("bad weight {field:?}")))?;
                values.push(v);
            }
        }
        WeightGrid::from_row_major(bounds, values)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

fn parse_header(line: &str) -> Result<GridBox> {
    let bad = || LppError::invalid(format!("bad grid header {line:?}"));
    let rest = line.strip_prefix('#').ok_or_else(bad)?;
    let mut lo = None;
    let mut hi = None;
    for part in rest.split_whitespace() {
        let (key, val) = part.split_once('=').ok_or_else(bad)?;
        let (c, r) = val.split_once(',').ok_or_else(bad)?;
        let p = GridPoint::new(c.parse().map_err(|_| bad())?, r.parse().map_err(|_| bad())?);
        match key {
            "lo" => lo = Some(p),
            "hi" => hi = Some(p),
            _ => return Err(bad()),
        }
    }
    GridBox::new(lo.ok_or_else(bad)?, hi.ok_or_else(bad)?)
}
