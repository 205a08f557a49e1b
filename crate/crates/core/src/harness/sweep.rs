use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::report::run_point;
use crate::error::{Error, Result};
use crate::model::ModelConfig;

/// Column header of cutoff-sweep CSV files, in order.
pub const SWEEP_HEADER: [&str; 7] = [
    "L",
    "alpha_over_v",
    "delta_l",
    "mean_w [pi*v/l_final]",
    "m2_w [(pi*v/l_final)^2]",
    "mean_n",
    "m2_n",
];

/// Floats in CSV output: 12 significant digits, scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub cutoff: usize,
    pub alpha_over_v: f64,
    pub delta_l: f64,
    pub mean_w: f64,
    pub m2_w: f64,
    pub mean_n: f64,
    pub m2_n: f64,
}

impl SweepRow {
    fn key(&self) -> (f64, usize) {
        (self.alpha_over_v, self.cutoff)
    }

    fn is_finite(&self) -> bool {
        [self.alpha_over_v, self.delta_l, self.mean_w, self.m2_w, self.mean_n, self.m2_n]
            .iter()
            .all(|x| x.is_finite())
    }
}

/// Rows keyed by `(alpha/v, L)`, kept sorted and unique. All moments are
/// computed analytically; work columns are in units of `pi v / l_final`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn new(mut rows: Vec<SweepRow>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| !r.is_finite()) {
            return Err(Error::Numerical(format!("non-finite sweep row {bad:?}")));
        }
        rows.sort_by(|a, b| a.alpha_over_v.total_cmp(&b.alpha_over_v).then(a.cutoff.cmp(&b.cutoff)));
        for w in rows.windows(2) {
            if w[0].key() == w[1].key() {
                return Err(Error::InvalidConfig(format!(
                    "duplicate sweep row for alpha/v = {}, L = {}",
                    w[0].alpha_over_v, w[0].cutoff
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct speed ratios in ascending order.
    pub fn speeds(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.rows.iter().map(|r| r.alpha_over_v).collect();
        out.dedup();
        out
    }

    pub fn merge(self, other: SweepTable) -> Result<Self> {
        let mut rows = self.rows;
        rows.extend(other.rows);
        Self::new(rows)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SWEEP_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.cutoff.to_string(),
                format_float(r.alpha_over_v),
                format_float(r.delta_l),
                format_float(r.mean_w),
                format_float(r.m2_w),
                format_float(r.mean_n),
                format_float(r.m2_n),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is ASCII"))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != SWEEP_HEADER {
            return Err(Error::InvalidConfig(format!(
                "unexpected sweep CSV header {header:?}, expected {SWEEP_HEADER:?}"
            )));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec[i].trim().parse().map_err(|_| {
                    Error::InvalidConfig(format!("column {} is not a number: {:?}", SWEEP_HEADER[i], &rec[i]))
                })
            };
            let cutoff = rec[0]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("L is not an integer: {:?}", &rec[0])))?;
            rows.push(SweepRow {
                cutoff,
                alpha_over_v: num(1)?,
                delta_l: num(2)?,
                mean_w: num(3)?,
                m2_w: num(4)?,
                mean_n: num(5)?,
                m2_n: num(6)?,
            });
        }
        Self::new(rows)
    }
}

fn check_cutoffs(l_values: &[usize]) -> Result<()> {
    if l_values.is_empty() {
        return Err(Error::InvalidConfig("no cutoff values given".into()));
    }
    if l_values[0] < 1 || l_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(format!(
            "cutoff values must be >= 1 and strictly increasing, got {l_values:?}"
        )));
    }
    Ok(())
}

/// One row per cutoff with the other parameters of `base` fixed. A failing
/// point aborts the sweep; the rows computed so far travel with the error.
pub fn sweep_cutoff(base: &ModelConfig, l_values: &[usize]) -> Result<SweepTable> {
    check_cutoffs(l_values)?;
    let mut rows = Vec::with_capacity(l_values.len());
    for &cutoff in l_values {
        let cfg = base.with_cutoff(cutoff);
        match run_point(&cfg) {
            Ok(r) => rows.push(SweepRow {
                cutoff,
                alpha_over_v: cfg.speed_ratio,
                delta_l: cfg.delta_l,
                mean_w: r.mean_w.value,
                m2_w: r.m2_w.value,
                mean_n: r.mean_n.value,
                m2_n: r.m2_n.value,
            }),
            Err(e) => {
                return Err(Error::SweepAborted {
                    cutoff,
                    completed: rows,
                    source: Box::new(e),
                })
            }
        }
    }
    SweepTable::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(a: f64, l: usize) -> SweepRow {
        SweepRow {
            cutoff: l,
            alpha_over_v: a,
            delta_l: 0.5,
            mean_w: 1.0 / 3.0,
            m2_w: 2.0,
            mean_n: 1e-17,
            m2_n: 0.0,
        }
    }

    #[test]
    fn sorted_and_unique() {
        let t = SweepTable::new(vec![row(2.0, 4), row(0.5, 8), row(0.5, 2)]).unwrap();
        let keys: Vec<_> = t.rows().iter().map(|r| (r.alpha_over_v, r.cutoff)).collect();
        assert_eq!(keys, vec![(0.5, 2), (0.5, 8), (2.0, 4)]);
        assert!(SweepTable::new(vec![row(1.0, 2), row(1.0, 2)]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let t = SweepTable::new(vec![row(0.1, 16), row(0.1, 32)]).unwrap();
        let s = t.to_csv_string().unwrap();
        assert!(s.starts_with("L,alpha_over_v,delta_l,mean_w [pi*v/l_final],"));
        assert!(s.contains("3.33333333333e-1"));
        let back = SweepTable::read_csv(s.as_bytes()).unwrap();
        assert_eq!(back.len(), 2);
        assert!((back.rows()[0].mean_w - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_expansion_rows_vanish() {
        let t = sweep_cutoff(&ModelConfig::new(0.4, 0.0, 1), &[2, 4, 8]).unwrap();
        assert!(t.rows().iter().all(|r| r.mean_w == 0.0 && r.m2_n == 0.0));
    }

    #[test]
    fn rejects_unsorted_cutoffs() {
        let base = ModelConfig::new(0.4, 0.1, 1);
        assert!(sweep_cutoff(&base, &[4, 2]).is_err());
        assert!(sweep_cutoff(&base, &[0, 2]).is_err());
    }
}
