//! Statistical testing: Welch p-values against an independent
//! high-precision oracle, null uniformity, FDR brute-force agreement, and
//! cell-level detection.

mod common;

use common::*;
use specnet_core::celltest::{cell_test_report, FdrMethod, Parcellation};
use specnet_core::rng::RngStream;
use specnet_core::special::student_t_two_sided;
use specnet_core::ttest::{bh_adjust, welch_ttest};
use specnet_core::Sym64;
use statrs::distribution::{ContinuousCDF, StudentsT};

fn oracle_two_sided(t: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).unwrap();
    2.0 * (1.0 - dist.cdf(t.abs()))
}

#[test]
fn t_tail_matches_reference_distribution() {
    for &df in &[1.0, 2.0, 4.5, 8.0, 20.0, 100.0, 500.0] {
        for &t in &[0.0, 0.1, 0.5, 1.0, 1.96, 3.0, 6.5] {
            let ours: f64 = student_t_two_sided(t, df).unwrap();
            let oracle = oracle_two_sided(t, df);
            assert!(
                (ours - oracle).abs() <= 1e-10,
                "t={t}, df={df}: {ours} vs oracle {oracle}"
            );
        }
    }
}

#[test]
fn welch_p_matches_reference_on_random_samples() {
    let mut rng = RngStream::new(400, 0).rng();
    for case in 0..200 {
        let nx = 3 + (rng.next_u64() % 20) as usize;
        let ny = 3 + (rng.next_u64() % 20) as usize;
        let x: Vec<f64> = (0..nx).map(|_| rng.standard_normal() * 2.0).collect();
        let y: Vec<f64> = (0..ny).map(|_| rng.standard_normal() + 0.3).collect();
        let (t, p) = welch_ttest(&x, &y).unwrap();
        // recompute df independently and evaluate the reference tail
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let var = |v: &[f64]| {
            let m = mean(v);
            v.iter().map(|&a| (a - m) * (a - m)).sum::<f64>() / (v.len() - 1) as f64
        };
        let (vx, vy) = (var(&x) / nx as f64, var(&y) / ny as f64);
        let df = (vx + vy) * (vx + vy)
            / (vx * vx / (nx as f64 - 1.0) + vy * vy / (ny as f64 - 1.0));
        let oracle = oracle_two_sided(t, df);
        assert!((p - oracle).abs() <= 1e-10, "case {case}: {p} vs {oracle}");
    }
}

#[test]
fn null_pvalues_are_uniform() {
    // Kolmogorov-Smirnov distance of null Welch p-values against U(0,1)
    let reps = 2000usize;
    let mut rng = RngStream::new(401, 0).rng();
    let mut pvals: Vec<f64> = Vec::with_capacity(reps);
    for _ in 0..reps {
        let x: Vec<f64> = (0..50).map(|_| rng.standard_normal()).collect();
        let y: Vec<f64> = (0..50).map(|_| rng.standard_normal()).collect();
        let (_, p) = welch_ttest(&x, &y).unwrap();
        pvals.push(p);
    }
    pvals.sort_by(f64::total_cmp);
    let mut ks = 0.0f64;
    for (i, &p) in pvals.iter().enumerate() {
        let lo = i as f64 / reps as f64;
        let hi = (i + 1) as f64 / reps as f64;
        ks = ks.max((p - lo).abs()).max((p - hi).abs());
    }
    assert!(ks <= 0.05, "KS distance {ks} exceeds 0.05");
}

#[test]
fn bh_matches_stepup_definition() {
    let mut rng = RngStream::new(402, 0).rng();
    for case in 0..400 {
        let m = 1 + (rng.next_u64() % 20) as usize;
        let p: Vec<f64> = (0..m)
            .map(|_| {
                let u = rng.uniform();
                u * u // push some mass toward zero
            })
            .collect();
        let ours = bh_adjust(&p, 0.05).unwrap();
        let brute = brute_bh(&p, 0.05);
        assert_eq!(ours, brute, "case {case}: BH mismatch on {p:?}");
    }
}

#[test]
fn shifted_cell_detected_exactly() {
    // two regions of five vertices; the (0,0) diagonal cell of group B is
    // shifted by +10 against small background noise
    let n = 10;
    let parc = Parcellation::new(vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1], 2, None).unwrap();
    let eps = 0.01;
    for trial in 0..20u64 {
        let mut rng = RngStream::new(403, trial).rng();
        let base_a = Sym64::from_upper(n, |_, _| eps * rng.standard_normal());
        let base_b = Sym64::from_upper(n, |i, j| {
            let shift = if i < 5 && j < 5 { 10.0 } else { 0.0 };
            shift + eps * rng.standard_normal()
        });
        let report = cell_test_report(&base_a, &base_b, &parc, 0.01, FdrMethod::Bh).unwrap();
        assert_eq!(report.cells.len(), 3);
        for c in &report.cells {
            let should_reject = c.region_a == 0 && c.region_b == 0;
            assert_eq!(
                c.rejected, should_reject,
                "trial {trial}: cell ({},{}) rejected={}",
                c.region_a, c.region_b, c.rejected
            );
        }
    }
}

#[test]
fn null_cells_rarely_reject() {
    // small-scale version of the global-null calibration: rejections under
    // the null should be rare with BH at the 5% level
    let n = 12;
    let parc = Parcellation::new(
        (0..n).map(|i| i % 3).collect::<Vec<_>>(),
        3,
        None,
    )
    .unwrap();
    let reps = 200;
    let mut total_rejections = 0usize;
    let mut total_cells = 0usize;
    for trial in 0..reps {
        let mut rng = RngStream::new(404, trial).rng();
        let a = Sym64::from_upper(n, |_, _| rng.standard_normal());
        let b = Sym64::from_upper(n, |_, _| rng.standard_normal());
        let report = cell_test_report(&a, &b, &parc, 0.05, FdrMethod::Bh).unwrap();
        total_rejections += report.rejected_count();
        total_cells += report.tested_count();
    }
    let proportion = total_rejections as f64 / total_cells as f64;
    assert!(proportion <= 0.08, "null rejection proportion {proportion}");
}
