//! The printed exponent/critical-line table: for each requested
//! (regime, alpha, gamma, beta) the moment exponent `p` at `kappa = gamma`,
//! the rate exponent `theta`, and the critical decay `beta*`.

use ske_core::moment_lab::{theoretical_exponent, ExponentQuery, Regime};

#[derive(Debug, Clone)]
pub struct BranchRow {
    pub regime: &'static str,
    pub alpha: f64,
    pub gamma: f64,
    pub branch: String,
    pub p: f64,
    pub theta: f64,
    pub beta_critical: f64,
}

/// Build the sweep table.  Queries without an applicable estimate (for
/// example `kappa = gamma >= alpha` in the stable regime) are skipped.
pub fn branch_table(
    alphas: &[f64],
    gammas: &[f64],
    beta: f64,
    alpha0: Option<f64>,
) -> Vec<BranchRow> {
    let mut rows = Vec::new();
    for &alpha in alphas {
        for &gamma in gammas {
            let base = ExponentQuery {
                regime: Regime::Stable,
                alpha,
                alpha0: None,
                gamma,
                kappa: gamma,
                beta,
                sign_ok: true,
                b_zero: true,
            };
            let cases: [(&'static str, ExponentQuery); 3] = [
                ("stable", base),
                ("h1", ExponentQuery { regime: Regime::H1, ..base }),
                (
                    "h2",
                    ExponentQuery {
                        regime: Regime::H2,
                        alpha0: Some(alpha0.unwrap_or(if alpha > 1.0 { alpha } else { 2.0 })),
                        ..base
                    },
                ),
            ];
            for (label, q) in cases {
                if let Ok(ans) = theoretical_exponent(&q) {
                    rows.push(BranchRow {
                        regime: label,
                        alpha,
                        gamma,
                        branch: ans.branch,
                        p: ans.p,
                        theta: ans.theta,
                        beta_critical: ans.beta_critical,
                    });
                }
            }
        }
    }
    rows
}

pub fn print_table(rows: &[BranchRow]) {
    println!(
        "{:<8} {:>6} {:>6}  {:<28} {:>8} {:>8} {:>8}",
        "regime", "alpha", "gamma", "branch", "p", "theta", "beta*"
    );
    for r in rows {
        println!(
            "{:<8} {:>6} {:>6}  {:<28} {:>8.4} {:>8.4} {:>8.4}",
            r.regime, r.alpha, r.gamma, r.branch, r.p, r.theta, r.beta_critical
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find(rows: &[BranchRow], regime: &str, alpha: f64, gamma: f64) -> BranchRow {
        rows.iter()
            .find(|r| r.regime == regime && r.alpha == alpha && r.gamma == gamma)
            .cloned()
            .unwrap_or_else(|| panic!("missing row {regime}/{alpha}/{gamma}"))
    }

    #[test]
    fn linear_stable_row() {
        let rows = branch_table(&[1.5], &[1.0], 2.0, None);
        let r = find(&rows, "stable", 1.5, 1.0);
        assert!((r.p - 1.0).abs() < 1e-12);
        assert!((r.theta - 1.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn sublinear_heavy_row() {
        let rows = branch_table(&[0.5], &[0.3], 2.0, None);
        let r = find(&rows, "stable", 0.5, 0.3);
        assert!((r.p - 0.6).abs() < 1e-12, "{}", r.p);
    }

    #[test]
    fn h2_row_takes_min() {
        let rows = branch_table(&[1.5], &[0.5], 2.0, Some(1.5));
        let r = find(&rows, "h2", 1.5, 0.5);
        let want = (0.5f64).min(0.5 / 1.5 + 0.25);
        assert!((r.p - want).abs() < 1e-12, "{}", r.p);
    }

    #[test]
    fn infeasible_queries_are_skipped() {
        // kappa = gamma = 1 >= alpha = 0.5: no stable/H1 row survives.
        let rows = branch_table(&[0.5], &[1.0], 2.0, None);
        assert!(rows.iter().all(|r| r.regime == "h2"));
    }
}
