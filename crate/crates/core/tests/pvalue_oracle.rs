//! Frozen high-precision reference values for the correlation p-value.
//!
//! Generated by `oracle/pvalue_grid.py` (mpmath, 400 digits, hypergeometric
//! form of the Student-t CDF). Rerun the script to regenerate
//! `oracle/pvalue_grid.txt`.

use embias::pearson;
use embias::stats::correlation_p_value;

/// Lines of `r n p`, two-tailed.
const GRID: &str = include_str!("oracle/pvalue_grid.txt");

fn grid() -> Vec<(f64, usize, f64)> {
    GRID.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
            )
        })
        .collect()
}

const REL_TOL: f64 = 1e-9;

fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

#[test]
fn p_value_grid_matches_reference() {
    let mut worst = 0.0f64;
    let grid = grid();
    assert_eq!(grid.len(), 50);
    for &(r, n, want) in &grid {
        let got = correlation_p_value(r, n).unwrap();
        let err = rel_err(got, want);
        assert!(
            err <= REL_TOL,
            "r={r} n={n}: got {got:e}, want {want:e} (rel {err:e})"
        );
        worst = worst.max(err);
    }
    eprintln!("worst relative error over grid: {worst:e}");
}

#[test]
fn eight_point_dataset() {
    let xs = [1.2, 2.4, 3.1, 4.8, 5.0, 6.3, 7.7, 8.1];
    let ys = [2.0, 1.9, 3.7, 3.1, 5.9, 4.4, 7.2, 6.0];
    let r = pearson(&xs, &ys).unwrap();
    assert_eq!(r.n, 8);
    assert!(
        rel_err(r.rho, 0.870_034_822_446_487_5) <= REL_TOL,
        "{}",
        r.rho
    );
    assert!(
        rel_err(r.p_value, 0.004_967_047_092_861_555) <= REL_TOL,
        "{}",
        r.p_value
    );
}
