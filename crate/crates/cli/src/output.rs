//! CSV files: one quantity per file, genomes rendered with locus 1 leftmost.

use std::path::Path;

use ipsga_core::{BitstringSet, RescueReport};

use crate::error::{CliError, Result};

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))
}

fn finish(path: &Path, mut w: csv::Writer<std::fs::File>) -> Result<()> {
    w.flush().map_err(|e| CliError::io(path, e))
}

fn genomes(order: u32) -> (BitstringSet, usize) {
    let set = BitstringSet::new(order).expect("order validated by the config");
    let size = set.size();
    (set, size)
}

/// `generation,genome_bits,value`, one row per generation and genome.
pub fn write_frequencies<R: AsRef<[f64]>>(path: &Path, order: u32, rows: &[R]) -> Result<()> {
    let (set, size) = genomes(order);
    let mut w = writer(path)?;
    let err = |e| CliError::csv(path, e);
    w.write_record(["generation", "genome_bits", "value"])
        .map_err(err)?;
    for (g, row) in rows.iter().enumerate() {
        for (x, v) in row.as_ref().iter().enumerate().take(size) {
            w.write_record([g.to_string(), set.render(x), v.to_string()])
                .map_err(err)?;
        }
    }
    finish(path, w)
}

/// `genome_bits,value`.
pub fn write_fvalues(path: &Path, order: u32, fvalues: &[f64]) -> Result<()> {
    let (set, _) = genomes(order);
    let mut w = writer(path)?;
    let err = |e| CliError::csv(path, e);
    w.write_record(["genome_bits", "value"]).map_err(err)?;
    for (x, v) in fvalues.iter().enumerate() {
        w.write_record([set.render(x), v.to_string()])
            .map_err(err)?;
    }
    finish(path, w)
}

/// Reads an `fvalues.csv`; rows may come in any order but must cover every
/// genome of one length exactly once.
pub fn read_fvalues(path: &Path) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let bad = |msg: String| CliError::usage(format!("{}: {msg}", path.display()));
    let mut entries = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| CliError::csv(path, e))?;
        let bits = record
            .get(0)
            .ok_or_else(|| bad("missing genome_bits".into()))?;
        let value: f64 = record
            .get(1)
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| bad(format!("bad value for genome {bits}")))?;
        entries.push((bits.trim().to_string(), value));
    }
    let length = entries.first().map(|(b, _)| b.len()).unwrap_or(0);
    let set = BitstringSet::new(length as u32).map_err(|e| bad(e.to_string()))?;
    if entries.len() != set.size() {
        return Err(bad(format!(
            "expected {} genomes, found {}",
            set.size(),
            entries.len()
        )));
    }
    let mut values = vec![None; set.size()];
    for (bits, v) in entries {
        let x = set.parse(&bits).map_err(|e| bad(e.to_string()))?;
        if values[x].replace(v).is_some() {
            return Err(bad(format!("genome {bits} listed twice")));
        }
    }
    Ok(values
        .into_iter()
        .map(|v| v.expect("every genome seen"))
        .collect())
}

pub fn write_rescue(path: &Path, order: u32, report: &RescueReport) -> Result<()> {
    let (set, _) = genomes(order);
    let mut w = writer(path)?;
    let err = |e| CliError::csv(path, e);
    w.write_record([
        "winner_bits",
        "winner_frequency",
        "winner_fvalue",
        "mean_fvalue",
        "above_average",
        "is_global_max",
        "degenerate_tie",
    ])
    .map_err(err)?;
    w.write_record([
        set.render(report.winner),
        report.winner_frequency.to_string(),
        report.winner_fvalue.to_string(),
        report.mean_fvalue.to_string(),
        report.above_average.to_string(),
        report.is_global_max.to_string(),
        report.degenerate_tie.to_string(),
    ])
    .map_err(err)?;
    finish(path, w)
}

/// `parameter,value,max_deviation`.
pub fn write_sweep(path: &Path, rows: &[crate::experiment::SweepRow]) -> Result<()> {
    let mut w = writer(path)?;
    let err = |e| CliError::csv(path, e);
    w.write_record(["parameter", "value", "max_deviation"])
        .map_err(err)?;
    for row in rows {
        w.write_record([
            row.parameter.to_string(),
            row.value.clone(),
            row.max_deviation.to_string(),
        ])
        .map_err(err)?;
    }
    finish(path, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fvalues_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fvalues.csv");
        let values = vec![2.0, 2.1, 2.25, 2.123456789012345, 3.0, 2.5, 2.6, 2.7];
        write_fvalues(&path, 3, &values).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("genome_bits,value\n000,2\n001,2.1\n"));
        assert_eq!(read_fvalues(&path).unwrap(), values);
    }

    #[test]
    fn malformed_fvalues_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        std::fs::write(&path, "genome_bits,value\n0,2\n0,3\n").unwrap();
        assert!(read_fvalues(&path).is_err());
        std::fs::write(&path, "genome_bits,value\n00,2\n01,3\n").unwrap();
        assert!(read_fvalues(&path).is_err());
        assert!(matches!(
            read_fvalues(&dir.path().join("missing.csv")),
            Err(CliError::Io { .. })
        ));
    }

    #[test]
    fn frequency_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("freq.csv");
        write_frequencies(&path, 1, &[&[0.5, 0.5], &[0.25, 0.75]]).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "generation,genome_bits,value\n0,0,0.5\n0,1,0.5\n1,0,0.25\n1,1,0.75\n"
        );
    }
}
