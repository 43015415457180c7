use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{AlignmentRow, DecayRow, SummaryRow};
use crate::error::Result;

fn write_all<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

fn read_all<R: Read, T: DeserializeOwned>(input: R) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for r in rdr.deserialize() {
        out.push(r?);
    }
    Ok(out)
}

pub fn write_rows<W: Write>(out: W, rows: &[AlignmentRow]) -> Result<()> {
    write_all(out, rows)
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    write_all(out, rows)
}

pub fn write_decay<W: Write>(out: W, rows: &[DecayRow]) -> Result<()> {
    write_all(out, rows)
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<AlignmentRow>> {
    read_all(input)
}

pub fn read_summary<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    read_all(input)
}

pub fn read_decay<R: Read>(input: R) -> Result<Vec<DecayRow>> {
    read_all(input)
}
