//! Minimal FASTA reading and writing.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::model::{Alphabet, Sequence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub id: String,
    pub seq: String,
}

pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    let mut current: Option<Record> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            if let Some(r) = current.take() {
                records.push(r);
            }
            let id = header.split_whitespace().next().unwrap_or("").to_string();
            current = Some(Record { id, seq: String::new() });
        } else {
            match current.as_mut() {
                Some(r) => r.seq.push_str(line),
                None => {
                    return Err(Error::Parse(format!(
                        "line {}: sequence data before first header",
                        lineno + 1
                    )))
                }
            }
        }
    }
    if let Some(r) = current {
        records.push(r);
    }
    Ok(records)
}

/// Reads all records and concatenates them into one [`Sequence`] with record
/// boundaries preserved.
pub fn read_sequence<R: BufRead>(reader: R, alphabet: &Alphabet) -> Result<Sequence> {
    let records = read_records(reader)?;
    if records.is_empty() {
        return Err(Error::Parse("no FASTA records found".into()));
    }
    let texts: Vec<&str> = records.iter().map(|r| r.seq.as_str()).collect();
    Sequence::parse_records(alphabet, &texts)
}

pub fn write_records<W: Write>(mut out: W, records: &[Record]) -> std::io::Result<()> {
    for r in records {
        writeln!(out, ">{}", r.id)?;
        for chunk in r.seq.as_bytes().chunks(60) {
            out.write_all(chunk)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}
