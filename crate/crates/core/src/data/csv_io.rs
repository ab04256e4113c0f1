use std::io::Write;
use std::path::Path;

use super::TimeSeries;
use crate::error::{Error, Result};

const SERIES_HEADER: &str = "t,value";
const SPACING_TOLERANCE: f64 = 1e-6;

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn parse_cell(path: &Path, row: usize, column: &str, cell: &str) -> Result<f64> {
    let v: f64 = cell.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        row,
        message: format!("cannot parse {column} value `{cell}`"),
    })?;
    if !v.is_finite() {
        return Err(Error::NonFiniteRow {
            path: path.to_path_buf(),
            row,
        });
    }
    Ok(v)
}

fn record_error(path: &Path, row: usize, err: csv::Error) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Parse {
            path: path.to_path_buf(),
            row,
            message: format!("{other:?}"),
        },
    }
}

/// Reads a `t,value` CSV. Rows are numbered from 1 after the header. The
/// step is taken from the first two rows and every later spacing must
/// match it to within 1e-6 relative.
pub fn read_series_csv(path: &Path) -> Result<TimeSeries> {
    let mut reader = open_reader(path)?;
    let headers = reader.headers().map_err(|e| record_error(path, 0, e))?;
    if headers.iter().collect::<Vec<_>>() != ["t", "value"] {
        return Err(Error::MissingHeader {
            path: path.to_path_buf(),
            expected: SERIES_HEADER.into(),
        });
    }

    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut step = f64::NAN;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| record_error(path, row, e))?;
        if record.len() != 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                row,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let t = parse_cell(path, row, "t", &record[0])?;
        let v = parse_cell(path, row, "value", &record[1])?;
        if let Some(&prev) = times.last() {
            let spacing = t - prev;
            if row == 2 {
                if spacing <= 0.0 {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        row,
                        message: format!("time must increase strictly, got {prev} then {t}"),
                    });
                }
                step = spacing;
            } else if (spacing - step).abs() > SPACING_TOLERANCE * step {
                return Err(Error::NonConstantSpacing {
                    path: path.to_path_buf(),
                    row,
                    expected: step,
                    actual: spacing,
                });
            }
        }
        times.push(t);
        values.push(v);
    }
    if values.len() < 2 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            row: values.len(),
            message: "need at least two rows to infer the time step".into(),
        });
    }
    TimeSeries::new(step, times[0], values)
}

/// Reads the first column among `names` that the CSV header contains.
/// Used for loosely formatted prediction and observation files.
pub fn read_column_csv(path: &Path, names: &[&str]) -> Result<Vec<f64>> {
    let mut reader = open_reader(path)?;
    let headers = reader
        .headers()
        .map_err(|e| record_error(path, 0, e))?
        .clone();
    let (index, column) = names
        .iter()
        .find_map(|name| headers.iter().position(|h| h == *name).map(|i| (i, *name)))
        .ok_or_else(|| Error::MissingHeader {
            path: path.to_path_buf(),
            expected: format!("a column named one of {names:?}"),
        })?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| record_error(path, row, e))?;
        let cell = record.get(index).unwrap_or("");
        out.push(parse_cell(path, row, column, cell)?);
    }
    Ok(out)
}

/// Writes `t,value` rows using shortest round-trip decimal formatting.
pub fn write_series_csv(series: &TimeSeries, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(out, "{SERIES_HEADER}").map_err(io)?;
    for (k, v) in series.values.iter().enumerate() {
        writeln!(out, "{},{}", series.time(k), v).map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn two_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "t,value\n0,1\n100,2\n");
        let s = read_series_csv(&p).unwrap();
        assert_eq!(s.step, 100.0);
        assert_eq!(s.values, vec![1.0, 2.0]);
    }

    #[test]
    fn uneven_spacing_names_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "t,value\n0,1\n100,2\n200,3\n299,4\n");
        let err = read_series_csv(&p).unwrap_err();
        assert!(
            matches!(err, Error::NonConstantSpacing { row: 4, .. }),
            "{err}"
        );
        assert!(err.to_string().contains("row 4"));
    }

    #[test]
    fn header_and_value_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "time,v\n0,1\n1,2\n");
        assert!(matches!(
            read_series_csv(&p),
            Err(Error::MissingHeader { .. })
        ));
        let p = write(&dir, "b.csv", "t,value\n0,1\n1,NaN\n");
        assert!(matches!(
            read_series_csv(&p),
            Err(Error::NonFiniteRow { row: 2, .. })
        ));
        let p = write(&dir, "c.csv", "t,value\n0,1\n1,abc\n");
        assert!(matches!(
            read_series_csv(&p),
            Err(Error::Parse { row: 2, .. })
        ));
        let p = write(&dir, "d.csv", "t,value\n0,1\n");
        assert!(read_series_csv(&p).is_err());
    }

    #[test]
    fn write_then_read_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let values = vec![0.1, 1.0 / 3.0, -2.5e-300, 1e300, std::f64::consts::PI];
        let s = TimeSeries::new(100.0, 0.0, values).unwrap();
        write_series_csv(&s, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("t,value\n"));
        assert_eq!(read_series_csv(&p).unwrap(), s);
        // Overwriting is fine.
        write_series_csv(&s, &p).unwrap();
    }

    #[test]
    fn write_to_missing_directory_names_it() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope");
        let s = TimeSeries::new(1.0, 0.0, vec![1.0]).unwrap();
        let err = write_series_csv(&s, &missing.join("s.csv")).unwrap_err();
        assert!(
            err.to_string().contains(&*missing.to_string_lossy()),
            "{err}"
        );
    }

    #[test]
    fn column_reader_picks_first_match() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "f.csv", "t,prediction,observation\n0,1,2\n1,3,4\n");
        assert_eq!(
            read_column_csv(&p, &["prediction", "value"]).unwrap(),
            vec![1.0, 3.0]
        );
        assert_eq!(
            read_column_csv(&p, &["observation", "value"]).unwrap(),
            vec![2.0, 4.0]
        );
        assert!(read_column_csv(&p, &["value"]).is_err());
    }
}
