//! Text formats: SYMMAT matrices, NETSET collections, parcellation CSV,
//! label CSV, and the weight-estimation JSON report.
//!
//! Floating-point values are written with 17 significant digits
//! (`{:.16e}`), which round-trips `f64` exactly; reading a written file and
//! writing it again reproduces the bytes.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::celltest::{CellTestReport, Parcellation};
use crate::error::{Error, Result};
use crate::model::NetworkCollection;
use crate::noise::NoiseSpec;
use crate::scalar::{cast, Scalar};
use crate::sym::SymmetricMatrix;

/// Canonical decimal form used in all matrix files.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

struct LineReader<R> {
    inner: BufReader<R>,
    line_no: usize,
}

impl<R: Read> LineReader<R> {
    fn new(r: R) -> Self {
        Self { inner: BufReader::new(r), line_no: 0 }
    }

    fn next_line(&mut self) -> Result<String> {
        let mut buf = String::new();
        let read = self.inner.read_line(&mut buf)?;
        self.line_no += 1;
        if read == 0 {
            return Err(Error::Parse {
                line: self.line_no,
                msg: "unexpected end of file".into(),
            });
        }
        Ok(buf.trim_end_matches(['\n', '\r']).to_string())
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line_no, msg: msg.into() }
    }
}

/// Write one matrix in SYMMAT form: header `SYMMAT n`, then n rows of n
/// values.
pub fn write_symmat<F: Scalar, W: Write>(w: &mut W, m: &SymmetricMatrix<F>) -> Result<()> {
    let n = m.n();
    writeln!(w, "SYMMAT {n}")?;
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| format_value(m[(i, j)].to_f64().unwrap()))
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

fn read_symmat_body<F: Scalar, R: Read>(lr: &mut LineReader<R>) -> Result<SymmetricMatrix<F>> {
    let header = lr.next_line()?;
    let mut parts = header.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some("SYMMAT"), Some(ns), None) => {
            let n: usize = ns
                .parse()
                .map_err(|_| lr.err(format!("invalid vertex count '{ns}'")))?;
            if n == 0 {
                return Err(lr.err("SYMMAT order must be positive"));
            }
            let mut data = ndarray::Array2::<F>::zeros((n, n));
            for i in 0..n {
                let line = lr.next_line()?;
                let mut count = 0usize;
                for (j, tok) in line.split_whitespace().enumerate() {
                    if j >= n {
                        return Err(lr.err(format!("row {i} has more than {n} values")));
                    }
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| lr.err(format!("invalid value '{tok}'")))?;
                    data[(i, j)] = cast::<F>(v);
                    count += 1;
                }
                if count != n {
                    return Err(lr.err(format!("row {i} has {count} values, expected {n}")));
                }
            }
            SymmetricMatrix::new(data)
        }
        _ => Err(lr.err(format!("expected 'SYMMAT n' header, found '{header}'"))),
    }
}

/// Read one SYMMAT matrix; symmetry is enforced to 1e-9 or the read is
/// rejected with the offending entry named.
pub fn read_symmat<F: Scalar, R: Read>(r: R) -> Result<SymmetricMatrix<F>> {
    let mut lr = LineReader::new(r);
    read_symmat_body(&mut lr)
}

/// Write a collection in NETSET form: header `NETSET N n`, then N SYMMAT
/// blocks.
pub fn write_netset<F: Scalar, W: Write>(w: &mut W, nets: &NetworkCollection<F>) -> Result<()> {
    writeln!(w, "NETSET {} {}", nets.len(), nets.n())?;
    for net in nets.networks() {
        write_symmat(w, net)?;
    }
    Ok(())
}

/// Read a NETSET collection (without sidecar metadata).
pub fn read_netset<F: Scalar, R: Read>(r: R) -> Result<NetworkCollection<F>> {
    let mut lr = LineReader::new(r);
    let header = lr.next_line()?;
    let mut parts = header.split_whitespace();
    match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some("NETSET"), Some(ns), Some(vs), None) => {
            let count: usize = ns
                .parse()
                .map_err(|_| lr.err(format!("invalid network count '{ns}'")))?;
            let n: usize = vs
                .parse()
                .map_err(|_| lr.err(format!("invalid vertex count '{vs}'")))?;
            if count == 0 {
                return Err(lr.err("NETSET must contain at least one network"));
            }
            let mut networks = Vec::with_capacity(count);
            for s in 0..count {
                let m = read_symmat_body::<F, R>(&mut lr)?;
                if m.n() != n {
                    return Err(lr.err(format!(
                        "network {s} has order {} but header declared {n}",
                        m.n()
                    )));
                }
                networks.push(m);
            }
            NetworkCollection::new(networks, None)
        }
        _ => Err(lr.err(format!("expected 'NETSET N n' header, found '{header}'"))),
    }
}

pub fn write_netset_file<F: Scalar>(path: &Path, nets: &NetworkCollection<F>) -> Result<()> {
    let mut buf = Vec::new();
    write_netset(&mut buf, nets)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_netset_file<F: Scalar>(path: &Path) -> Result<NetworkCollection<F>> {
    read_netset(fs::File::open(path)?)
}

pub fn write_symmat_file<F: Scalar>(path: &Path, m: &SymmetricMatrix<F>) -> Result<()> {
    let mut buf = Vec::new();
    write_symmat(&mut buf, m)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_symmat_file<F: Scalar>(path: &Path) -> Result<SymmetricMatrix<F>> {
    read_symmat(fs::File::open(path)?)
}

/// Sidecar JSON carrying the per-network noise metadata of a NETSET file.
pub fn write_noise_specs(path: &Path, specs: &[NoiseSpec]) -> Result<()> {
    let json = serde_json::to_string_pretty(specs)
        .map_err(|e| Error::Config(format!("serializing noise specs: {e}")))?;
    fs::write(path, json)?;
    Ok(())
}

pub fn read_noise_specs(path: &Path) -> Result<Vec<NoiseSpec>> {
    let text = fs::read_to_string(path)?;
    let specs: Vec<NoiseSpec> =
        serde_json::from_str(&text).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
    for s in &specs {
        s.validate()?;
    }
    Ok(specs)
}

/// Parcellation CSV `vertex,region[,region_name]` with 1-based vertex and
/// region ids; an optional header line is skipped. Every vertex 1..=n must
/// appear exactly once.
pub fn read_parcellation<R: Read>(r: R) -> Result<Parcellation> {
    let reader = BufReader::new(r);
    let mut rows: Vec<(usize, usize, Option<String>)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 'vertex,region[,region_name]', found '{trimmed}'"),
            });
        }
        let vertex: usize = match fields[0].parse() {
            Ok(v) => v,
            Err(_) if line_no == 1 => continue, // header line
            Err(_) => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("invalid vertex id '{}'", fields[0]),
                })
            }
        };
        let region: usize = fields[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid region id '{}'", fields[1]),
        })?;
        if vertex == 0 || region == 0 {
            return Err(Error::Parse {
                line: line_no,
                msg: "vertex and region ids are 1-based".into(),
            });
        }
        let name = fields.get(2).map(|s| s.to_string());
        rows.push((vertex - 1, region - 1, name));
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no parcellation rows".into() });
    }
    let n = rows.len();
    let k = rows.iter().map(|&(_, r, _)| r + 1).max().unwrap();
    let mut assignment = vec![usize::MAX; n];
    let mut any_name = false;
    let mut names = vec![String::new(); k];
    for (vertex, region, name) in rows {
        if vertex >= n {
            return Err(Error::Parse {
                line: 0,
                msg: format!("vertex id {} exceeds row count {n}", vertex + 1),
            });
        }
        if assignment[vertex] != usize::MAX {
            return Err(Error::Parse {
                line: 0,
                msg: format!("vertex {} assigned twice", vertex + 1),
            });
        }
        assignment[vertex] = region;
        if let Some(name) = name {
            if !name.is_empty() && names[region].is_empty() {
                names[region] = name;
                any_name = true;
            }
        }
    }
    if let Some(missing) = assignment.iter().position(|&r| r == usize::MAX) {
        return Err(Error::Parse {
            line: 0,
            msg: format!("vertex {} missing from parcellation", missing + 1),
        });
    }
    let names = if any_name {
        for (r, name) in names.iter_mut().enumerate() {
            if name.is_empty() {
                *name = format!("region{}", r + 1);
            }
        }
        Some(names)
    } else {
        None
    };
    Parcellation::new(assignment, k, names)
}

pub fn read_parcellation_file(path: &Path) -> Result<Parcellation> {
    read_parcellation(fs::File::open(path)?)
}

/// Cluster labels as CSV `vertex,label`, both 1-based.
pub fn write_labels_csv<W: Write>(w: &mut W, labels: &[usize]) -> Result<()> {
    writeln!(w, "vertex,label")?;
    for (i, &l) in labels.iter().enumerate() {
        writeln!(w, "{},{}", i + 1, l + 1)?;
    }
    Ok(())
}

/// Embedding coordinates as CSV `vertex,x1,...,xd`.
pub fn write_coords_csv<F: Scalar, W: Write>(
    w: &mut W,
    coords: &ndarray::Array2<F>,
) -> Result<()> {
    let d = coords.ncols();
    let header: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
    writeln!(w, "vertex,{}", header.join(","))?;
    for (i, row) in coords.rows().into_iter().enumerate() {
        let vals: Vec<String> = row.iter().map(|v| format_value(v.to_f64().unwrap())).collect();
        writeln!(w, "{},{}", i + 1, vals.join(","))?;
    }
    Ok(())
}

/// Cell-test results as CSV, regions 1-based.
pub fn write_cells_csv<F: Scalar, W: Write>(w: &mut W, report: &CellTestReport<F>) -> Result<()> {
    writeln!(w, "region_a,region_b,t_stat,p_value,rejected,degenerate")?;
    for c in &report.cells {
        let t = c.t_stat.map(|v| format_value(v.to_f64().unwrap())).unwrap_or_default();
        let p = c.p_value.map(|v| format_value(v.to_f64().unwrap())).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{}",
            c.region_a + 1,
            c.region_b + 1,
            t,
            p,
            c.rejected,
            c.degenerate
        )?;
    }
    Ok(())
}

/// JSON payload of the weight-estimation command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateReport {
    pub rho: Vec<f64>,
    pub weights: Vec<f64>,
    pub variant: String,
}
