//! Sample batches and their on-disk text format.
//!
//! ```text
//! #simplex-sphere v1 sampler=<id> n=<n> b=<b> seed=<seed> eps=<eps|->
//! <x_1> <x_2> ... <x_n>
//! ...
//! ```
//!
//! Coordinates are written with 17 significant digits, which round-trips
//! f64 exactly: loading a batch and saving it again is byte-identical.

use crate::error::{Error, Result};
use crate::geometry::{membership, ManifoldSpec, Membership, Point, ShellSpec};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

pub const BATCH_MAGIC: &str = "#simplex-sphere v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerId {
    Exact,
    Shell,
    Gibbs,
}

impl fmt::Display for SamplerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerId::Exact => "exact",
            SamplerId::Shell => "shell",
            SamplerId::Gibbs => "gibbs",
        })
    }
}

impl FromStr for SamplerId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SamplerId::Exact),
            "shell" => Ok(SamplerId::Shell),
            "gibbs" => Ok(SamplerId::Gibbs),
            other => Err(Error::BadBatchFile(format!("unknown sampler id {other:?}"))),
        }
    }
}

/// A set of points plus provenance.
#[derive(Debug, Clone, Serialize)]
pub struct SampleBatch {
    pub points: Vec<Point>,
    pub spec: ManifoldSpec,
    pub sampler_id: SamplerId,
    pub seed: u64,
    pub proposals: u64,
    pub accepts: u64,
    pub shell: Option<ShellSpec>,
    pub gibbs_sweeps: Option<u32>,
}

impl SampleBatch {
    /// Empirical acceptance rate of the producing sampler.
    pub fn acceptance_rate(&self) -> f64 {
        self.accepts as f64 / self.proposals.max(1) as f64
    }

    /// The target membership class for this batch's sampler.
    pub fn expected_membership(&self) -> Membership {
        match self.sampler_id {
            SamplerId::Shell => Membership::InShell,
            _ => Membership::OnK,
        }
    }

    /// Checks every point against its membership class at tolerance 1e-9 n.
    pub fn verify_membership(&self) -> Result<()> {
        let tol = self.spec.default_tol();
        let want = self.expected_membership();
        for (index, p) in self.points.iter().enumerate() {
            if membership(p, &self.spec, self.shell.as_ref(), tol) != want {
                return Err(Error::BatchMembership { index });
            }
        }
        Ok(())
    }

    /// The i-th coordinate across all points.
    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        self.points.iter().map(|p| p[i]).collect()
    }

    pub fn first_coordinates(&self) -> Vec<f64> {
        self.coordinate(0)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let eps = match &self.shell {
            Some(sh) => sh.eps.to_string(),
            None => "-".to_string(),
        };
        writeln!(
            w,
            "{BATCH_MAGIC} sampler={} n={} b={} seed={} eps={}",
            self.sampler_id, self.spec.n, self.spec.b, self.seed, eps
        )?;
        let mut line = String::with_capacity(self.spec.n * 25);
        for p in &self.points {
            line.clear();
            for (i, v) in p.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(&format!("{v:.16e}"));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Parses a batch and re-verifies membership of every point.
    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::BadBatchFile("empty file".into()))??;
        let rest = header
            .strip_prefix(BATCH_MAGIC)
            .ok_or_else(|| Error::BadBatchFile(format!("bad header {header:?}")))?;
        let mut sampler = None;
        let mut n = None;
        let mut b = None;
        let mut seed = None;
        let mut eps = None;
        for tok in rest.split_whitespace() {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| Error::BadBatchFile(format!("bad header token {tok:?}")))?;
            let parse_f64 = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| Error::BadBatchFile(format!("bad {key} value {v:?}")))
            };
            match key {
                "sampler" => sampler = Some(val.parse::<SamplerId>()?),
                "n" => {
                    n = Some(val.parse::<usize>().map_err(|_| {
                        Error::BadBatchFile(format!("bad n value {val:?}"))
                    })?)
                }
                "b" => b = Some(parse_f64(val)?),
                "seed" => {
                    seed = Some(val.parse::<u64>().map_err(|_| {
                        Error::BadBatchFile(format!("bad seed value {val:?}"))
                    })?)
                }
                "eps" => eps = if val == "-" { None } else { Some(parse_f64(val)?) },
                other => {
                    return Err(Error::BadBatchFile(format!("unknown header key {other:?}")))
                }
            }
        }
        let (sampler_id, n, b, seed) = match (sampler, n, b, seed) {
            (Some(s), Some(n), Some(b), Some(sd)) => (s, n, b, sd),
            _ => return Err(Error::BadBatchFile("incomplete header".into())),
        };
        let spec = ManifoldSpec::new(n, b)?;
        let shell = eps.map(|e| ShellSpec::new(n, b, e)).transpose()?;
        let mut points = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let coords: Vec<f64> = line
                .split(' ')
                .map(|t| {
                    t.parse::<f64>().map_err(|_| {
                        Error::BadBatchFile(format!("line {}: bad float {t:?}", lineno + 2))
                    })
                })
                .collect::<Result<_>>()?;
            if coords.len() != n {
                return Err(Error::BadBatchFile(format!(
                    "line {}: expected {} coordinates, got {}",
                    lineno + 2,
                    n,
                    coords.len()
                )));
            }
            points.push(coords);
        }
        let count = points.len() as u64;
        let batch = SampleBatch {
            points,
            spec,
            sampler_id,
            seed,
            // rejection counts are not persisted; a loaded batch records
            // only what the file proves
            proposals: count,
            accepts: count,
            shell,
            gibbs_sweeps: None,
        };
        batch.verify_membership()?;
        Ok(batch)
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::psi;

    fn k_point(spec: &ManifoldSpec, raw: &[f64]) -> Point {
        psi(raw, spec)
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let spec = ManifoldSpec::new(4, 1.5).unwrap();
        let batch = SampleBatch {
            points: vec![
                k_point(&spec, &[0.3, 1.9, 0.2, 0.7]),
                k_point(&spec, &[2.0, 0.1, 0.5, 0.4]),
            ],
            spec,
            sampler_id: SamplerId::Exact,
            seed: 99,
            proposals: 7,
            accepts: 2,
            shell: None,
            gibbs_sweeps: None,
        };
        let mut bytes = Vec::new();
        batch.write_to(&mut bytes).unwrap();
        let loaded = SampleBatch::read_from(&bytes[..]).unwrap();
        let mut bytes2 = Vec::new();
        loaded.write_to(&mut bytes2).unwrap();
        assert_eq!(bytes, bytes2);
        assert_eq!(loaded.points.len(), 2);
        assert_eq!(loaded.seed, 99);
    }

    #[test]
    fn membership_reverified_at_load() {
        let spec = ManifoldSpec::new(3, 1.5).unwrap();
        let batch = SampleBatch {
            points: vec![vec![1.0, 1.0, 1.2]], // not on K
            spec,
            sampler_id: SamplerId::Exact,
            seed: 1,
            proposals: 1,
            accepts: 1,
            shell: None,
            gibbs_sweeps: None,
        };
        let mut bytes = Vec::new();
        batch.write_to(&mut bytes).unwrap();
        assert!(matches!(
            SampleBatch::read_from(&bytes[..]),
            Err(Error::BatchMembership { index: 0 })
        ));
    }

    #[test]
    fn header_parsing_errors() {
        assert!(SampleBatch::read_from(&b"nonsense\n"[..]).is_err());
        let bad = b"#simplex-sphere v1 sampler=warp n=3 b=1.5 seed=1 eps=-\n";
        assert!(SampleBatch::read_from(&bad[..]).is_err());
    }
}
