//! Cell-level two-sample comparison of two group-average networks under a
//! vertex parcellation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sym::SymmetricMatrix;
use crate::ttest::{bh_adjust, by_adjust, welch_ttest};

/// Assignment of each vertex to exactly one of K nonempty regions.
#[derive(Debug, Clone)]
pub struct Parcellation {
    k: usize,
    assignment: Vec<usize>,
    names: Option<Vec<String>>,
}

impl Parcellation {
    pub fn new(assignment: Vec<usize>, k: usize, names: Option<Vec<String>>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidParameter("empty parcellation".into()));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("parcellation needs K >= 1".into()));
        }
        let mut seen = vec![false; k];
        for &r in &assignment {
            if r >= k {
                return Err(Error::InvalidParameter(format!(
                    "region label {r} out of range for K={k}"
                )));
            }
            seen[r] = true;
        }
        if let Some(empty) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidParameter(format!("region {empty} is empty")));
        }
        if let Some(names) = &names {
            if names.len() != k {
                return Err(Error::ShapeMismatch(format!(
                    "{} region names vs K={k}",
                    names.len()
                )));
            }
        }
        Ok(Self { k, assignment, names })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Vertices of one region, in index order.
    pub fn region(&self, r: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c == r).then_some(i))
            .collect()
    }
}

/// Entries of cell (k, l), `k <= l`: the full rectangular block for
/// off-diagonal cells, the upper triangle with diagonal for diagonal cells
/// (no double counting).
pub fn cell_entries<F: Scalar>(
    p_hat: &SymmetricMatrix<F>,
    parcellation: &Parcellation,
    k: usize,
    l: usize,
) -> Result<Vec<F>> {
    if k > l || l >= parcellation.k() {
        return Err(Error::InvalidParameter(format!(
            "cell ({k},{l}) out of range for K={}",
            parcellation.k()
        )));
    }
    if p_hat.n() != parcellation.n() {
        return Err(Error::ShapeMismatch(format!(
            "matrix of order {} vs parcellation over {} vertices",
            p_hat.n(),
            parcellation.n()
        )));
    }
    let rows = parcellation.region(k);
    let cols = parcellation.region(l);
    let mut out = Vec::new();
    if k == l {
        for (a, &i) in rows.iter().enumerate() {
            for &j in rows.iter().skip(a) {
                out.push(p_hat[(i, j)]);
            }
        }
    } else {
        for &i in &rows {
            for &j in &cols {
                out.push(p_hat[(i, j)]);
            }
        }
    }
    Ok(out)
}

/// Multiple-testing procedure used across the cell family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FdrMethod {
    Bh,
    By,
}

impl FdrMethod {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bh" => Ok(FdrMethod::Bh),
            "by" => Ok(FdrMethod::By),
            other => Err(Error::InvalidParameter(format!("unknown FDR method '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FdrMethod::Bh => "bh",
            FdrMethod::By => "by",
        }
    }
}

/// One cell's test outcome. Degenerate cells (too few entries or zero
/// pooled variance) carry no statistic and are excluded from the FDR
/// family.
#[derive(Debug, Clone, Serialize)]
pub struct CellTest<F> {
    pub region_a: usize,
    pub region_b: usize,
    pub t_stat: Option<F>,
    pub p_value: Option<F>,
    pub rejected: bool,
    pub degenerate: bool,
}

/// All `K (K+1) / 2` cells with their FDR-adjusted rejection flags.
#[derive(Debug, Clone, Serialize)]
pub struct CellTestReport<F> {
    pub cells: Vec<CellTest<F>>,
    pub method: FdrMethod,
    pub alpha: f64,
}

impl<F: Scalar> CellTestReport<F> {
    pub fn rejected_count(&self) -> usize {
        self.cells.iter().filter(|c| c.rejected).count()
    }

    pub fn tested_count(&self) -> usize {
        self.cells.iter().filter(|c| !c.degenerate).count()
    }
}

/// Welch test per cell comparing the two group averages, then a single FDR
/// adjustment across all non-degenerate cells.
pub fn cell_test_report<F: Scalar>(
    p_hat_a: &SymmetricMatrix<F>,
    p_hat_b: &SymmetricMatrix<F>,
    parcellation: &Parcellation,
    alpha: f64,
    method: FdrMethod,
) -> Result<CellTestReport<F>> {
    if p_hat_a.n() != p_hat_b.n() {
        return Err(Error::ShapeMismatch("group averages differ in order".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0, 1)".into()));
    }
    let kk = parcellation.k();
    let mut cells = Vec::with_capacity(kk * (kk + 1) / 2);
    let mut family: Vec<(usize, F)> = Vec::new(); // (cell index, p)
    for k in 0..kk {
        for l in k..kk {
            let x = cell_entries(p_hat_a, parcellation, k, l)?;
            let y = cell_entries(p_hat_b, parcellation, k, l)?;
            let idx = cells.len();
            match welch_ttest(&x, &y) {
                Ok((t, p)) => {
                    family.push((idx, p));
                    cells.push(CellTest {
                        region_a: k,
                        region_b: l,
                        t_stat: Some(t),
                        p_value: Some(p),
                        rejected: false,
                        degenerate: false,
                    });
                }
                Err(Error::DegenerateSample(_)) => {
                    cells.push(CellTest {
                        region_a: k,
                        region_b: l,
                        t_stat: None,
                        p_value: None,
                        rejected: false,
                        degenerate: true,
                    });
                }
                Err(e) => return Err(e),
            }
        }
    }
    if !family.is_empty() {
        let pvals: Vec<F> = family.iter().map(|&(_, p)| p).collect();
        let alpha_f = crate::scalar::cast::<F>(alpha);
        let flags = match method {
            FdrMethod::Bh => bh_adjust(&pvals, alpha_f)?,
            FdrMethod::By => by_adjust(&pvals, alpha_f)?,
        };
        for (&(idx, _), &flag) in family.iter().zip(flags.iter()) {
            cells[idx].rejected = flag;
        }
    }
    Ok(CellTestReport { cells, method, alpha })
}
