//! Two-sample testing and step-up false-discovery-rate procedures.

use crate::error::{Error, Result};
use crate::scalar::{cast_n, Scalar};
use crate::special::student_t_two_sided;

/// Welch (unequal-variance) two-sample t-test with Welch-Satterthwaite
/// degrees of freedom and a two-sided p-value. Requires at least two
/// observations per sample and a nonzero pooled variance.
pub fn welch_ttest<F: Scalar>(x: &[F], y: &[F]) -> Result<(F, F)> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::DegenerateSample(format!(
            "need at least 2 observations per sample, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let (mx, vx) = mean_var(x);
    let (my, vy) = mean_var(y);
    let nx = cast_n::<F>(x.len());
    let ny = cast_n::<F>(y.len());
    let se2 = vx / nx + vy / ny;
    if se2 <= F::zero() {
        return Err(Error::DegenerateSample("zero pooled variance".into()));
    }
    let t = (mx - my) / se2.sqrt();
    let df = se2 * se2
        / ((vx / nx) * (vx / nx) / (nx - F::one()) + (vy / ny) * (vy / ny) / (ny - F::one()));
    let p = student_t_two_sided(t, df)?;
    Ok((t, p))
}

fn mean_var<F: Scalar>(x: &[F]) -> (F, F) {
    let n = cast_n::<F>(x.len());
    let mean = x.iter().cloned().sum::<F>() / n;
    let mut ss = F::zero();
    for &v in x {
        let d = v - mean;
        ss += d * d;
    }
    (mean, ss / (n - F::one()))
}

/// Benjamini-Hochberg step-up rule at level `alpha`: reject the k* smallest
/// p-values where `k* = max{k : p_(k) <= k alpha / m}` (none if the set is
/// empty).
pub fn bh_adjust<F: Scalar>(p: &[F], alpha: F) -> Result<Vec<bool>> {
    validate_pvalues(p, alpha)?;
    let m = p.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).expect("finite p-values"));
    let mf = cast_n::<F>(m);
    let mut threshold: Option<F> = None;
    for (rank, &idx) in order.iter().enumerate() {
        let k = cast_n::<F>(rank + 1);
        if p[idx] <= k * alpha / mf {
            threshold = Some(p[idx]);
        }
    }
    let mut reject = vec![false; m];
    if let Some(t) = threshold {
        for (i, &pi) in p.iter().enumerate() {
            reject[i] = pi <= t;
        }
    }
    Ok(reject)
}

/// Benjamini-Yekutieli: BH with `alpha` deflated by the harmonic number
/// `H_m = sum_{i=1..m} 1/i`, valid under arbitrary dependence.
pub fn by_adjust<F: Scalar>(p: &[F], alpha: F) -> Result<Vec<bool>> {
    validate_pvalues(p, alpha)?;
    let m = p.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut harmonic = F::zero();
    for i in 1..=m {
        harmonic += F::one() / cast_n::<F>(i);
    }
    bh_adjust(p, alpha / harmonic)
}

fn validate_pvalues<F: Scalar>(p: &[F], alpha: F) -> Result<()> {
    if !(alpha > F::zero() && alpha < F::one()) {
        return Err(Error::InvalidParameter("alpha must lie in (0, 1)".into()));
    }
    for (i, &v) in p.iter().enumerate() {
        if !(v >= F::zero() && v <= F::one()) {
            return Err(Error::InvalidParameter(format!("p[{i}] outside [0, 1]")));
        }
    }
    Ok(())
}
