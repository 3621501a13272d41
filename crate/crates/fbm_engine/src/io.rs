//! Path records: CSV with `# key=value` header lines, or a bincode binary file.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::grid::TimeGrid;
use crate::sampler::{FbmPath, SamplerScheme};
use crate::FbmError;

const MAGIC: &[u8; 8] = b"FBMREC01";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordHeader {
    pub hurst: f64,
    pub n: usize,
    pub dt: f64,
    pub seed: u64,
    pub scheme: String,
    /// Extra provenance, e.g. drift and θ for SDE paths.
    pub meta: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub header: RecordHeader,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl PathRecord {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), FbmError> {
        let mut out = BufWriter::new(out);
        let h = &self.header;
        writeln!(out, "# hurst={}", h.hurst)?;
        writeln!(out, "# n={}", h.n)?;
        writeln!(out, "# dt={}", h.dt)?;
        writeln!(out, "# seed={}", h.seed)?;
        writeln!(out, "# scheme={}", h.scheme)?;
        for (k, v) in &h.meta {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|(n, _)| n.as_str()))?;
        let rows = self.columns.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        for i in 0..rows {
            // shorter columns (increments) leave the last cell empty
            w.write_record(self.columns.iter().map(|(_, v)| v.get(i).map(|x| format!("{x:e}")).unwrap_or_default()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, FbmError> {
        let mut text = String::new();
        BufReader::new(input).read_to_string(&mut text)?;
        let mut kv = BTreeMap::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once('=') {
                    kv.insert(k.trim().to_string(), v.trim().to_string());
                }
            }
        }
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let names: Vec<String> = rdr.headers()?.iter().map(|s| s.to_string()).collect();
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for rec in rdr.records() {
            let rec = rec?;
            for (c, field) in rec.iter().enumerate() {
                if field.is_empty() {
                    continue;
                }
                let v: f64 = field
                    .parse()
                    .map_err(|_| FbmError::Format(format!("bad number '{field}' in column {}", names[c])))?;
                cols[c].push(v);
            }
        }
        let get = |kv: &mut BTreeMap<String, String>, k: &str| -> Result<String, FbmError> {
            kv.remove(k).ok_or_else(|| FbmError::Format(format!("missing header field '{k}'")))
        };
        let parse_err = |k: &str| FbmError::Format(format!("unparsable header field '{k}'"));
        let hurst = get(&mut kv, "hurst")?.parse().map_err(|_| parse_err("hurst"))?;
        let n = get(&mut kv, "n")?.parse().map_err(|_| parse_err("n"))?;
        let dt = get(&mut kv, "dt")?.parse().map_err(|_| parse_err("dt"))?;
        let seed = get(&mut kv, "seed")?.parse().map_err(|_| parse_err("seed"))?;
        let scheme = get(&mut kv, "scheme")?;
        Ok(Self {
            header: RecordHeader { hurst, n, dt, seed, scheme, meta: kv },
            columns: names.into_iter().zip(cols).collect(),
        })
    }

    pub fn write_binary<W: Write>(&self, out: W) -> Result<(), FbmError> {
        let mut out = BufWriter::new(out);
        out.write_all(MAGIC)?;
        bincode::serialize_into(&mut out, self)?;
        out.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(input: R) -> Result<Self, FbmError> {
        let mut input = BufReader::new(input);
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(FbmError::Format("not a path record (bad magic)".into()));
        }
        Ok(bincode::deserialize_from(input)?)
    }

    /// Reads CSV or binary depending on the extension (`.bin` means binary).
    pub fn load(path: &Path) -> Result<Self, FbmError> {
        let f = File::open(path).map_err(|e| FbmError::io_at(path, e))?;
        if path.extension().is_some_and(|e| e == "bin") {
            Self::read_binary(f)
        } else {
            Self::read_csv(f)
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), FbmError> {
        let f = File::create(path).map_err(|e| FbmError::io_at(path, e))?;
        if path.extension().is_some_and(|e| e == "bin") {
            self.write_binary(f)
        } else {
            self.write_csv(f)
        }
    }
}

impl FbmPath {
    pub fn to_record(&self) -> PathRecord {
        let mut columns = vec![("t".to_string(), self.grid.times()), ("B".to_string(), self.values.clone())];
        if let Some(d) = &self.driver {
            columns.push(("dW".to_string(), d.clone()));
        }
        let mut meta = BTreeMap::new();
        meta.insert("rep".to_string(), self.rep.to_string());
        PathRecord {
            header: RecordHeader {
                hurst: self.hurst,
                n: self.grid.n,
                dt: self.grid.dt,
                seed: self.seed,
                scheme: self.scheme.tag().to_string(),
                meta,
            },
            columns,
        }
    }

    pub fn from_record(rec: &PathRecord) -> Result<Self, FbmError> {
        let h = &rec.header;
        let grid = TimeGrid::new(h.n, h.dt)?;
        let values = rec.column("B").ok_or_else(|| FbmError::Format("missing column B".into()))?.to_vec();
        if values.len() != h.n + 1 {
            return Err(FbmError::Format(format!("expected {} values, found {}", h.n + 1, values.len())));
        }
        let scheme = SamplerScheme::from_tag(&h.scheme)
            .ok_or_else(|| FbmError::Format(format!("unknown scheme '{}'", h.scheme)))?;
        Ok(Self {
            hurst: h.hurst,
            grid,
            values,
            driver: rec.column("dW").map(|d| d.to_vec()),
            seed: h.seed,
            rep: h.meta.get("rep").and_then(|r| r.parse().ok()).unwrap_or(0),
            scheme,
        })
    }
}
