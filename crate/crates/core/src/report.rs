//! JSON and CSV emission with every float written to 17 significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::dimension::RankEstimate;
use crate::purity::PurityReport;
use crate::reconstruct::ReconstructionResult;
use crate::samples::GroupedSamples;
use crate::simulate::{Fig3Result, Fig4Result, MarginalizationReport, SweepResult};

/// `d.dddddddddddddddde±x`, which round-trips every finite `f64`.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

struct SigFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SigFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_float(v).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty-printed JSON with a trailing newline. Non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// Plot-ready table form of a report.
pub trait CsvTable {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;

    fn to_csv(&self) -> csv::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header())?;
        for row in self.rows() {
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
    }
}

impl CsvTable for PurityReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["from", "to", "ratio", "log_ratio"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.pair_ratios
            .iter()
            .map(|p| vec![p.from.clone(), p.to.clone(), fmt_float(p.ratio), fmt_float(p.log_ratio)])
            .collect()
    }
}

impl CsvTable for RankEstimate {
    fn header(&self) -> Vec<&'static str> {
        vec!["index", "eigenvalue", "above_threshold"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(i, &l)| vec![i.to_string(), fmt_float(l), (i < self.rank).to_string()])
            .collect()
    }
}

impl CsvTable for ReconstructionResult {
    fn header(&self) -> Vec<&'static str> {
        vec!["y", "density_z0", "density_z1"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.grid
            .iter()
            .zip(&self.density_z0)
            .zip(&self.density_z1)
            .map(|((y, a), b)| vec![fmt_float(*y), fmt_float(*a), fmt_float(*b)])
            .collect()
    }
}

impl CsvTable for GroupedSamples {
    fn header(&self) -> Vec<&'static str> {
        vec!["x", "y"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.groups()
            .iter()
            .flat_map(|(label, ys)| ys.iter().map(move |y| vec![label.clone(), fmt_float(*y)]))
            .collect()
    }
}

impl CsvTable for Fig3Result {
    fn header(&self) -> Vec<&'static str> {
        vec!["bin_lo", "bin_hi", "direct", "confounded"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.histogram
            .iter()
            .map(|b| vec![fmt_float(b.lo), fmt_float(b.hi), b.direct.to_string(), b.confounded.to_string()])
            .collect()
    }
}

impl CsvTable for Fig4Result {
    fn header(&self) -> Vec<&'static str> {
        vec!["pair", "causal", "snp", "r2", "purity_ratio", "neg_log_purity"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.records
            .iter()
            .map(|r| {
                vec![
                    r.pair.to_string(),
                    r.causal.to_string(),
                    r.snp.to_string(),
                    fmt_float(r.r2),
                    fmt_float(r.purity_ratio),
                    fmt_float(r.neg_log_purity),
                ]
            })
            .collect()
    }
}

impl CsvTable for SweepResult {
    fn header(&self) -> Vec<&'static str> {
        vec!["corruption_level", "auc_purity", "auc_correlation"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.corruption_levels
            .iter()
            .zip(&self.auc_purity)
            .zip(&self.auc_correlation)
            .map(|((l, p), c)| vec![fmt_float(*l), fmt_float(*p), fmt_float(*c)])
            .collect()
    }
}

impl CsvTable for MarginalizationReport {
    fn header(&self) -> Vec<&'static str> {
        self.report.header()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.report.rows()
    }
}
