//! CSV ingestion and export.
//!
//! Point clouds are rows of floats; distance matrices are `n` rows of `n`
//! floats. Either may start with a header row, and a header column named
//! `weight` supplies the measure (normalised on load). Parsing uses Rust's
//! float grammar, so it is locale independent.

use super::{MMSpace, Metric};
use crate::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

/// Parsed numeric table with the optional weight column split off.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
}

fn parse_float(field: &str, line: u64) -> Result<f64> {
    field.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("not a number: {field:?}"),
    })
}

pub fn parse_table<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut header: Option<Vec<String>> = None;
    let mut weight_col = None;
    let mut rows = Vec::new();
    let mut weights = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(idx as u64 + 1);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if idx == 0 && rec.iter().any(|f| f.parse::<f64>().is_err()) {
            let names: Vec<String> = rec.iter().map(str::to_string).collect();
            weight_col = names.iter().position(|h| h.eq_ignore_ascii_case("weight"));
            header = Some(names);
            continue;
        }
        let mut row = Vec::with_capacity(rec.len());
        for (col, field) in rec.iter().enumerate() {
            let v = parse_float(field, line)?;
            if Some(col) == weight_col {
                weights.push(v);
            } else {
                row.push(v);
            }
        }
        if weight_col.is_some() && weights.len() != rows.len() + 1 {
            return Err(Error::Parse {
                line,
                message: "missing weight field".into(),
            });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptySpace);
    }
    Ok(Table {
        header,
        rows,
        weights: weight_col.map(|_| weights),
    })
}

fn normalise(weights: Option<Vec<f64>>) -> Result<Option<Vec<f64>>> {
    let Some(w) = weights else { return Ok(None) };
    for (index, &v) in w.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteWeight { index });
        }
        if v < 0.0 {
            return Err(Error::NegativeWeight { index, value: v });
        }
    }
    let sum: f64 = w.iter().sum();
    if sum <= 0.0 {
        return Err(Error::WeightsNotNormalized { sum });
    }
    Ok(Some(w.into_iter().map(|v| v / sum).collect()))
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| Error::Input {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_points<R: Read>(reader: R, metric: Metric) -> Result<MMSpace> {
    let t = parse_table(reader)?;
    MMSpace::from_points(&t.rows, normalise(t.weights)?, metric)
}

pub fn read_matrix<R: Read>(reader: R) -> Result<MMSpace> {
    let t = parse_table(reader)?;
    MMSpace::from_distance_matrix(&t.rows, normalise(t.weights)?)
}

pub fn load_points(path: &Path, metric: Metric) -> Result<MMSpace> {
    Ok(read_points(open(path)?, metric)?.with_label(path.display().to_string()))
}

pub fn load_matrix(path: &Path) -> Result<MMSpace> {
    Ok(read_matrix(open(path)?)?.with_label(path.display().to_string()))
}

/// Formats a float so that parsing it back yields the same bits.
pub fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

/// Writes a CSV with the given header; cells are already formatted.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let out_err = |source: std::io::Error| Error::Output {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(out_err)?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let csv_err = |e: csv::Error| out_err(std::io::Error::other(e));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush().map_err(out_err)
}

/// Writes the space as a point CSV (when coordinates exist) or a matrix CSV,
/// with a trailing `weight` column.
pub fn write_space(path: &Path, space: &MMSpace) -> Result<()> {
    let (header, rows): (Vec<String>, Vec<Vec<String>>) = match space.coords() {
        Some((c, _)) => (
            (0..c.dim()).map(|k| format!("x{k}")).chain(["weight".into()]).collect(),
            (0..space.len())
                .map(|i| {
                    c.point(i)
                        .iter()
                        .map(|&v| fmt_f64(v))
                        .chain([fmt_f64(space.weight(i))])
                        .collect()
                })
                .collect(),
        ),
        None => (
            (0..space.len()).map(|k| format!("d{k}")).chain(["weight".into()]).collect(),
            (0..space.len())
                .map(|i| {
                    (0..space.len())
                        .map(|j| fmt_f64(space.dist(i, j)))
                        .chain([fmt_f64(space.weight(i))])
                        .collect()
                })
                .collect(),
        ),
    };
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(path, &header, &rows)
}

/// Writes JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let out_err = |source: std::io::Error| Error::Output {
        path: path.display().to_string(),
        source,
    };
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Invariant(e.to_string()))?;
    text.push('\n');
    let mut f = std::fs::File::create(path).map_err(out_err)?;
    f.write_all(text.as_bytes()).map_err(out_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_with_header_and_weights() {
        let csv = "x,y,weight\n0,0,1\n1,0,3\n";
        let s = read_points(csv.as_bytes(), Metric::Euclidean).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.weights(), &[0.25, 0.75]);
        assert_eq!(s.dist(0, 1), 1.0);
    }

    #[test]
    fn headerless_matrix() {
        let s = read_matrix("0,1\n1,0\n".as_bytes()).unwrap();
        assert_eq!(s.dist(0, 1), 1.0);
        assert_eq!(s.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn parse_error_names_line() {
        let err = read_points("0,0\n1,abc\n".as_bytes(), Metric::Euclidean).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read_points("a,b\n0,0\n1,x\n".as_bytes(), Metric::Euclidean).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn floats_round_trip_through_text() {
        for v in [0.1 + 0.2, 1e-300, 2.0f64.sqrt(), -0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn write_and_reload_space() {
        let dir = tempfile::tempdir().unwrap();
        let s = MMSpace::from_points(&[vec![0.0, 0.5], vec![1.0, 2.0]], None, Metric::Euclidean).unwrap();
        let p = dir.path().join("s.csv");
        write_space(&p, &s).unwrap();
        let back = load_points(&p, Metric::Euclidean).unwrap();
        assert_eq!(back.to_matrix(), s.to_matrix());
        assert_eq!(back.weights(), s.weights());
    }
}
