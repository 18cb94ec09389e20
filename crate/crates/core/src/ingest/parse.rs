use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use csv::{ReaderBuilder, StringRecord};

use super::{ColumnRef, FileFormat, Resolution, StationRecord};
use crate::error::{Error, Result};

/// A row that could not be turned into a record.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedRow {
    /// 1-based line in the source file.
    pub line: u64,
    pub raw: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    pub records: Vec<StationRecord>,
    pub rejects: Vec<RejectedRow>,
    /// Data rows seen (header excluded).
    pub total_rows: usize,
}

struct Resolved {
    station: usize,
    date: usize,
    tmin: Option<usize>,
    tmax: Option<usize>,
    tavg: Option<usize>,
}

fn resolve(col: &ColumnRef, header: Option<&StringRecord>, origin: &Path) -> Result<usize> {
    match (col, header) {
        (ColumnRef::Index(i), Some(h)) if *i >= h.len() => Err(Error::HeaderMismatch {
            path: origin.to_path_buf(),
            detail: format!("column index {i} but header has {} fields", h.len()),
        }),
        (ColumnRef::Index(i), _) => Ok(*i),
        (ColumnRef::Name(name), Some(h)) => h
            .iter()
            .position(|f| f.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::HeaderMismatch {
                path: origin.to_path_buf(),
                detail: format!("no column named `{name}`"),
            }),
        (ColumnRef::Name(name), None) => Err(Error::HeaderMismatch {
            path: origin.to_path_buf(),
            detail: format!("column `{name}` addressed by name but the format declares no header"),
        }),
    }
}

pub fn parse_station_file(path: &Path, format: &FileFormat) -> Result<ParseOutcome> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_station_reader(file, format, path)
}

/// Parses delimited text; `origin` only labels errors.
pub fn parse_station_reader<R: Read>(
    reader: R,
    format: &FileFormat,
    origin: &Path,
) -> Result<ParseOutcome> {
    if !format.delimiter.is_ascii() {
        return Err(Error::InvalidArgument(format!(
            "delimiter {:?} is not a single-byte character",
            format.delimiter
        )));
    }
    let mut rdr = ReaderBuilder::new()
        .delimiter(format.delimiter as u8)
        .has_headers(format.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header = if format.has_header {
        Some(
            rdr.headers()
                .map_err(|source| Error::Csv {
                    path: origin.to_path_buf(),
                    source,
                })?
                .clone(),
        )
    } else {
        None
    };
    let h = header.as_ref();
    let cols = &format.columns;
    let resolved = Resolved {
        station: resolve(&cols.station, h, origin)?,
        date: resolve(&cols.date, h, origin)?,
        tmin: cols
            .tmin
            .as_ref()
            .map(|c| resolve(c, h, origin))
            .transpose()?,
        tmax: cols
            .tmax
            .as_ref()
            .map(|c| resolve(c, h, origin))
            .transpose()?,
        tavg: cols
            .tavg
            .as_ref()
            .map(|c| resolve(c, h, origin))
            .transpose()?,
    };
    if resolved.tavg.is_none() && (resolved.tmin.is_none() || resolved.tmax.is_none()) {
        return Err(Error::HeaderMismatch {
            path: origin.to_path_buf(),
            detail: "need a tavg column or both tmin and tmax".to_owned(),
        });
    }

    let mut out = ParseOutcome::default();
    let mut row = StringRecord::new();
    loop {
        let line = rdr.position().line();
        match rdr.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {
                out.total_rows += 1;
                match parse_row(&row, &resolved, format) {
                    Ok(rec) => out.records.push(rec),
                    Err(reason) => out.rejects.push(RejectedRow {
                        line: row.position().map_or(line, |p| p.line()),
                        raw: row
                            .iter()
                            .collect::<Vec<_>>()
                            .join(&format.delimiter.to_string()),
                        reason,
                    }),
                }
            }
            Err(e) => {
                if e.is_io_error() {
                    return Err(Error::Csv {
                        path: origin.to_path_buf(),
                        source: e,
                    });
                }
                out.total_rows += 1;
                out.rejects.push(RejectedRow {
                    line: e.position().map_or(line, |p| p.line()),
                    raw: String::new(),
                    reason: e.to_string(),
                });
            }
        }
    }

    if out.rejects.len() * 2 > out.total_rows {
        return Err(Error::TooManyRejects {
            path: origin.to_path_buf(),
            rejected: out.rejects.len(),
            total: out.total_rows,
        });
    }
    if !out.rejects.is_empty() {
        log::warn!(
            "{}: {} of {} rows rejected",
            origin.display(),
            out.rejects.len(),
            out.total_rows
        );
    }
    Ok(out)
}

fn field<'a>(
    row: &'a StringRecord,
    idx: usize,
    what: &str,
) -> std::result::Result<&'a str, String> {
    row.get(idx)
        .ok_or_else(|| format!("missing {what} field (column {idx})"))
}

fn temperature(
    row: &StringRecord,
    idx: Option<usize>,
    what: &str,
    format: &FileFormat,
) -> std::result::Result<Option<f64>, String> {
    let Some(idx) = idx else { return Ok(None) };
    let raw = match row.get(idx) {
        Some(r) => r,
        None => return Ok(None),
    };
    if format.missing.iter().any(|m| m == raw) {
        return Ok(None);
    }
    // AEMET exports use a decimal comma.
    let normalized = if format.delimiter != ',' {
        raw.replace(',', ".")
    } else {
        raw.to_owned()
    };
    let v: f64 = normalized
        .parse()
        .map_err(|_| format!("{what} `{raw}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{what} `{raw}` is not finite"));
    }
    Ok(Some(v))
}

fn parse_date(raw: &str, format: &FileFormat) -> std::result::Result<NaiveDate, String> {
    if let Ok(d) = NaiveDate::parse_from_str(raw, &format.date_format) {
        return Ok(d);
    }
    if format.resolution == Resolution::Monthly {
        let padded = format!("{raw}-01");
        let fmt = format!("{}-%d", format.date_format);
        if let Ok(d) = NaiveDate::parse_from_str(&padded, &fmt) {
            return Ok(d);
        }
    }
    Err(format!("invalid date `{raw}`"))
}

fn parse_row(
    row: &StringRecord,
    cols: &Resolved,
    format: &FileFormat,
) -> std::result::Result<StationRecord, String> {
    let station_id = field(row, cols.station, "station")?;
    if station_id.is_empty() {
        return Err("empty station id".to_owned());
    }
    let date = parse_date(field(row, cols.date, "date")?, format)?;
    let tmin = temperature(row, cols.tmin, "tmin", format)?;
    let tmax = temperature(row, cols.tmax, "tmax", format)?;
    let tavg = match (temperature(row, cols.tavg, "tavg", format)?, tmin, tmax) {
        (Some(a), _, _) => a,
        (None, Some(lo), Some(hi)) => (lo + hi) / 2.0,
        _ => return Err("no average temperature and no min/max to derive it".to_owned()),
    };
    if let (Some(lo), Some(hi)) = (tmin, tmax) {
        if lo > hi {
            return Err(format!("tmin {lo} exceeds tmax {hi}"));
        }
    }
    if tmin.is_some_and(|lo| tavg < lo) || tmax.is_some_and(|hi| tavg > hi) {
        return Err(format!("tavg {tavg} outside [tmin, tmax]"));
    }
    Ok(StationRecord {
        station_id: station_id.to_owned(),
        date,
        tmin,
        tmax,
        tavg,
    })
}

/// Rejects report: `line,reason,raw`.
pub fn write_rejects<W: Write>(rejects: &[RejectedRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["line", "reason", "raw"])?;
    for r in rejects {
        w.write_record([r.line.to_string().as_str(), &r.reason, &r.raw])?;
    }
    w.flush()
}
