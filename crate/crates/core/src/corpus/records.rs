//! Line-delimited record files. Each line is a JSON envelope carrying an
//! explicit schema version and record kind, so files are self-describing and
//! version drift fails loudly instead of silently misparsing.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

/// Implemented by every record type that can live in a record file.
pub trait Record: Serialize + DeserializeOwned {
    const KIND: &'static str;
    const SCHEMA_VERSION: u32;
}

#[derive(serde::Serialize)]
struct EnvelopeOut<'a, T: Serialize> {
    v: u32,
    kind: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

#[derive(serde::Deserialize)]
struct EnvelopeIn<T> {
    v: u32,
    kind: String,
    #[serde(flatten)]
    body: T,
}

/// Writes one record per line. The file is written to a temporary sibling and
/// renamed into place, so a failed write leaves no partial file behind.
/// Returns the number of records written.
pub fn write_records<'a, T, I>(path: &Path, records: I) -> Result<usize>
where
    T: Record + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let tmp = path.with_extension("partial");
    let result = (|| -> Result<usize> {
        let file = fs::File::create(&tmp)?;
        let mut w = BufWriter::new(file);
        let mut count = 0usize;
        for record in records {
            let envelope = EnvelopeOut {
                v: T::SCHEMA_VERSION,
                kind: T::KIND,
                body: record,
            };
            let line = serde_json::to_string(&envelope).map_err(|e| Error::MalformedRecord {
                line: count + 1,
                message: e.to_string(),
            })?;
            w.write_all(line.as_bytes())?;
            w.write_all(b"\n")?;
            count += 1;
        }
        w.flush()?;
        Ok(count)
    })();
    match result {
        Ok(count) => {
            fs::rename(&tmp, path)?;
            Ok(count)
        }
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

fn parse_line<T: Record>(line: &str, lineno: usize) -> Result<T> {
    let envelope: EnvelopeIn<T> = serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
        line: lineno,
        message: e.to_string(),
    })?;
    if envelope.kind != T::KIND {
        return Err(Error::MalformedRecord {
            line: lineno,
            message: format!("expected kind {:?}, found {:?}", T::KIND, envelope.kind),
        });
    }
    if envelope.v != T::SCHEMA_VERSION {
        return Err(Error::MalformedRecord {
            line: lineno,
            message: format!(
                "unsupported schema version {} (this build reads {})",
                envelope.v,
                T::SCHEMA_VERSION
            ),
        });
    }
    Ok(envelope.body)
}

/// Strict read: any malformed line aborts with its line number.
pub fn read_records<T: Record>(path: &Path) -> Result<Vec<T>> {
    let file = fs::File::open(path)?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_line(&line, i + 1)?);
    }
    Ok(out)
}

/// Lenient read: malformed lines are skipped and logged. Returns the parsed
/// records and the number of lines skipped.
pub fn read_records_lenient<T: Record>(path: &Path) -> Result<(Vec<T>, usize)> {
    let file = fs::File::open(path)?;
    let mut out = Vec::new();
    let mut skipped = 0usize;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line::<T>(&line, i + 1) {
            Ok(record) => out.push(record),
            Err(e) => {
                log::warn!("{}: skipping malformed record: {e}", path.display());
                skipped += 1;
            }
        }
    }
    Ok((out, skipped))
}
