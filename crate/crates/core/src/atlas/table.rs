//! Statistics table: one CSV row per graph.

use std::io::{Read, Write};

use serde::Deserialize;

use crate::error::Result;
use crate::stats::StatVector;

pub const COLUMNS: [&str; 15] = [
    "graph6", "n", "m", "triangles", "girth", "acc", "gcc", "scc", "apl", "r", "diam", "den",
    "rt", "cv", "ce",
];

/// Rounds to 12 significant digits; the result prints as its shortest
/// round-trip decimal.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn format_real(x: f64) -> String {
    format!("{}", round_sig12(x))
}

/// Applies the table's real-number precision to every real field.
pub fn quantize(sv: &StatVector) -> StatVector {
    StatVector {
        acc: round_sig12(sv.acc),
        gcc: round_sig12(sv.gcc),
        scc: round_sig12(sv.scc),
        apl: round_sig12(sv.apl),
        r: sv.r.map(round_sig12),
        den: round_sig12(sv.den),
        rt: round_sig12(sv.rt),
        ..sv.clone()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtlasRow {
    pub graph6: String,
    pub stats: StatVector,
}

#[derive(Deserialize)]
struct CsvRecord {
    graph6: String,
    n: usize,
    m: usize,
    triangles: usize,
    girth: usize,
    acc: f64,
    gcc: f64,
    scc: f64,
    apl: f64,
    r: Option<f64>,
    diam: usize,
    den: f64,
    rt: f64,
    cv: usize,
    ce: usize,
}

impl From<CsvRecord> for AtlasRow {
    fn from(c: CsvRecord) -> Self {
        AtlasRow {
            graph6: c.graph6,
            stats: StatVector {
                n: c.n,
                m: c.m,
                triangles: c.triangles,
                girth: c.girth,
                acc: c.acc,
                gcc: c.gcc,
                scc: c.scc,
                apl: c.apl,
                r: c.r,
                diam: c.diam,
                den: c.den,
                rt: c.rt,
                cv: c.cv,
                ce: c.ce,
            },
        }
    }
}

pub fn write_rows<'a, W, I>(out: W, rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, &'a StatVector)>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS)?;
    for (g6, s) in rows {
        let ints = |x: usize| x.to_string();
        w.write_record([
            g6.to_string(),
            ints(s.n),
            ints(s.m),
            ints(s.triangles),
            ints(s.girth),
            format_real(s.acc),
            format_real(s.gcc),
            format_real(s.scc),
            format_real(s.apl),
            s.r.map(format_real).unwrap_or_default(),
            ints(s.diam),
            format_real(s.den),
            format_real(s.rt),
            ints(s.cv),
            ints(s.ce),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<AtlasRow>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().ne(COLUMNS.iter().copied()) {
        return Err(crate::Error::CorruptAtlas(format!(
            "unexpected CSV header {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    r.deserialize::<CsvRecord>()
        .map(|rec| Ok(rec?.into()))
        .collect()
}
