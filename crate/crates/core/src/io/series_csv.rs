//! Norm-series CSV.
//!
//! Leading `# key=value` lines carry metadata (`grid_n`, `sampling`,
//! `omega0_sup`, `stretch0_sup`, and `ballK=cx,cy,cz,radius` per ball).
//! The header is `t,hess_sup,vort_sup,gradu_sup,mu_sup,energy` followed by
//! `hess_sup_bK,vort_sup_bK,u_sup_bK` for each ball `K`. Values use the
//! shortest exponent form that reads back to the same `f64`.

use std::io::{BufRead, BufReader, Read, Write};

use crate::criteria::{NormSample, NormSeries, SeriesMeta};
use crate::error::{Error, Result};

pub const BASE_COLUMNS: [&str; 6] = ["t", "hess_sup", "vort_sup", "gradu_sup", "mu_sup", "energy"];

pub fn header(balls: usize) -> Vec<String> {
    let mut cols: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    for k in 0..balls {
        cols.push(format!("hess_sup_b{k}"));
        cols.push(format!("vort_sup_b{k}"));
        cols.push(format!("u_sup_b{k}"));
    }
    cols
}

pub fn meta_lines(series: &NormSeries) -> Vec<String> {
    let m = &series.meta;
    let mut out = Vec::new();
    if let Some(n) = m.grid_n {
        out.push(format!("# grid_n={n}"));
    }
    if let Some(s) = &m.sampling {
        out.push(format!("# sampling={s}"));
    }
    if let Some(v) = m.omega0_sup {
        out.push(format!("# omega0_sup={v:e}"));
    }
    if let Some(v) = m.stretch0_sup {
        out.push(format!("# stretch0_sup={v:e}"));
    }
    for (k, b) in series.balls.iter().enumerate() {
        let [x, y, z] = b.center;
        out.push(format!("# ball{k}={x:e},{y:e},{z:e},{:e}", b.radius));
    }
    out
}

/// Streams rows of a series as they are produced.
pub struct SeriesWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> SeriesWriter<W> {
    /// Writes the metadata and header of `series` (whose rows are not
    /// written).
    pub fn new(mut w: W, series: &NormSeries) -> Result<Self> {
        for line in meta_lines(series) {
            writeln!(w, "{line}")?;
        }
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(header(series.balls.len())).map_err(csv_err)?;
        Ok(Self { inner })
    }

    pub fn row(&mut self, s: &NormSample) -> Result<()> {
        let mut rec: Vec<String> = [s.t, s.hess, s.vort, s.gradu, s.mu, s.energy]
            .iter()
            .map(|v| format!("{v:e}"))
            .collect();
        for b in &s.balls {
            rec.extend(b.iter().map(|v| format!("{v:e}")));
        }
        self.inner.write_record(&rec).map_err(csv_err)?;
        Ok(())
    }

    pub fn finish(self) -> Result<W> {
        self.inner
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line,
            msg: format!("{other:?}"),
        },
    }
}

pub fn write_series<W: Write>(w: W, series: &NormSeries) -> Result<()> {
    series.validate()?;
    let mut sw = SeriesWriter::new(w, series)?;
    for i in 0..series.len() {
        sw.row(&NormSample {
            t: series.t[i],
            hess: series.hess[i],
            vort: series.vort[i],
            gradu: series.gradu[i],
            mu: series.mu[i],
            energy: series.energy[i],
            balls: series
                .balls
                .iter()
                .map(|b| [b.hess[i], b.vort[i], b.u[i]])
                .collect(),
        })?;
    }
    sw.finish()?.flush()?;
    Ok(())
}

pub fn series_to_string(series: &NormSeries) -> Result<String> {
    let mut buf = Vec::new();
    write_series(&mut buf, series)?;
    String::from_utf8(buf).map_err(|e| Error::Input(e.to_string()))
}

fn parse_f64(line: usize, what: &str, s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("{what}: cannot parse {s:?} as a number"),
    })
}

pub fn read_series<R: Read>(r: R) -> Result<NormSeries> {
    let mut reader = BufReader::new(r);
    let mut meta = SeriesMeta::default();
    let mut balls_meta: Vec<Option<([f64; 3], f64)>> = Vec::new();
    let mut line_no = 0usize;
    // Metadata block, then hand the rest to the CSV reader.
    let mut first = String::new();
    loop {
        first.clear();
        if reader.read_line(&mut first)? == 0 {
            return Err(Error::Parse {
                line: line_no + 1,
                msg: "missing header".into(),
            });
        }
        line_no += 1;
        let line = first.trim();
        if line.is_empty() {
            continue;
        }
        let Some(body) = line.strip_prefix('#') else {
            break;
        };
        let Some((k, v)) = body.trim().split_once('=') else {
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        match k {
            "grid_n" => {
                meta.grid_n = Some(v.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("grid_n: cannot parse {v:?}"),
                })?)
            }
            "sampling" => meta.sampling = Some(v.to_string()),
            "omega0_sup" => meta.omega0_sup = Some(parse_f64(line_no, k, v)?),
            "stretch0_sup" => meta.stretch0_sup = Some(parse_f64(line_no, k, v)?),
            _ if k.starts_with("ball") => {
                let idx: usize = k[4..].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad ball key {k:?}"),
                })?;
                let vals = v
                    .split(',')
                    .map(|s| parse_f64(line_no, k, s))
                    .collect::<Result<Vec<_>>>()?;
                if vals.len() != 4 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("{k} needs cx,cy,cz,radius"),
                    });
                }
                if balls_meta.len() <= idx {
                    balls_meta.resize(idx + 1, None);
                }
                balls_meta[idx] = Some(([vals[0], vals[1], vals[2]], vals[3]));
            }
            _ => {}
        }
    }

    let header_line = line_no;
    let cols: Vec<String> = first.trim().split(',').map(|s| s.trim().to_string()).collect();
    if cols.len() < BASE_COLUMNS.len() || !(cols.len() - BASE_COLUMNS.len()).is_multiple_of(3) {
        return Err(Error::Parse {
            line: header_line,
            msg: format!("unexpected column count {}", cols.len()),
        });
    }
    let nballs = (cols.len() - BASE_COLUMNS.len()) / 3;
    if cols != header(nballs) {
        return Err(Error::Parse {
            line: header_line,
            msg: format!("header must be {:?}", header(nballs).join(",")),
        });
    }
    if balls_meta.len() != nballs || balls_meta.iter().any(Option::is_none) {
        return Err(Error::Parse {
            line: header_line,
            msg: format!("{nballs} ball column groups need matching # ballK metadata"),
        });
    }
    let balls: Vec<([f64; 3], f64)> = balls_meta.into_iter().map(|b| b.expect("checked")).collect();
    let mut series = NormSeries::with_balls(&balls, meta);

    let mut rows = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .from_reader(reader);
    for rec in rows.records() {
        let rec = rec.map_err(|e| match csv_err(e) {
            Error::Parse { line, msg } => Error::Parse {
                line: line + header_line,
                msg,
            },
            other => other,
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0) + header_line;
        if rec.len() != cols.len() {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", cols.len(), rec.len()),
            });
        }
        let v = rec
            .iter()
            .zip(&cols)
            .map(|(s, c)| parse_f64(line, c, s))
            .collect::<Result<Vec<_>>>()?;
        let sample = NormSample {
            t: v[0],
            hess: v[1],
            vort: v[2],
            gradu: v[3],
            mu: v[4],
            energy: v[5],
            balls: v[6..].chunks(3).map(|c| [c[0], c[1], c[2]]).collect(),
        };
        if let Some(last) = series.t.last() {
            if !(sample.t > *last) {
                return Err(Error::Parse {
                    line,
                    msg: format!("time {} does not increase past {last}", sample.t),
                });
            }
        }
        if let Some(bad) = v[1..].iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::Parse {
                line,
                msg: format!("norm value {bad} must be finite and nonnegative"),
            });
        }
        series.push(&sample)?;
    }
    series.validate()?;
    Ok(series)
}
