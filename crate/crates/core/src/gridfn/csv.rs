//! Flat text serialization of grid functions.
//!
//! ```text
//! # dim=2 lower=0,0 upper=1,1 shape=3,3
//! 0.0000000000000000e0
//! ...
//! ```

use std::io::{BufRead, Write};

use super::{GridDomain, GridFunction};
use crate::error::{Error, Result};

fn join(xs: impl IntoIterator<Item = String>) -> String {
    xs.into_iter().collect::<Vec<_>>().join(",")
}

fn parse_list<T: std::str::FromStr>(s: &str, line: usize) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim().parse::<T>().map_err(|_| Error::Parse {
                line,
                reason: format!("cannot parse `{t}`"),
            })
        })
        .collect()
}

impl GridFunction {
    /// Writes the header line and then one value per line, row-major.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = &self.domain;
        writeln!(
            w,
            "# dim={} lower={} upper={} shape={}",
            d.dim(),
            join(d.lower().iter().map(|x| format!("{x:e}"))),
            join(d.upper().iter().map(|x| format!("{x:e}"))),
            join(d.shape().iter().map(|m| m.to_string())),
        )?;
        for v in &self.values {
            writeln!(w, "{v:.16e}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "missing header".into(),
        })?;
        let header = header?;
        let body = header.strip_prefix('#').ok_or(Error::Parse {
            line: 1,
            reason: "header must start with `#`".into(),
        })?;
        let (mut dim, mut lower, mut upper, mut shape) = (None, None, None, None);
        for field in body.split_whitespace() {
            let (key, val) = field.split_once('=').ok_or(Error::Parse {
                line: 1,
                reason: format!("expected key=value, got `{field}`"),
            })?;
            match key {
                "dim" => dim = Some(parse_list::<usize>(val, 1)?[0]),
                "lower" => lower = Some(parse_list::<f64>(val, 1)?),
                "upper" => upper = Some(parse_list::<f64>(val, 1)?),
                "shape" => shape = Some(parse_list::<usize>(val, 1)?),
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        reason: format!("unknown header key `{other}`"),
                    })
                }
            }
        }
        let missing = |k: &str| Error::Parse {
            line: 1,
            reason: format!("header lacks `{k}`"),
        };
        let dim = dim.ok_or_else(|| missing("dim"))?;
        let lower = lower.ok_or_else(|| missing("lower"))?;
        let upper = upper.ok_or_else(|| missing("upper"))?;
        let shape = shape.ok_or_else(|| missing("shape"))?;
        if lower.len() != dim {
            return Err(Error::Parse {
                line: 1,
                reason: format!("dim={dim} but {} lower bounds", lower.len()),
            });
        }
        let domain = GridDomain::new(lower, upper, shape)?;
        let mut values = Vec::with_capacity(domain.len());
        for (i, line) in lines {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let v = t.parse::<f64>().map_err(|_| Error::Parse {
                line: i + 1,
                reason: format!("cannot parse `{t}`"),
            })?;
            values.push(v);
        }
        GridFunction::new(domain, values)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_csv(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f))
    }
}
