use super::gamma::{ln_gamma, reg_gamma_pq};
use super::Accuracy;
use crate::error::{domain, Error, Result};

/// Generalized Marcum Q function `Q_mu(a, b)` for integer order.
pub fn marcum_q(mu: u32, a: f64, b: f64) -> Result<f64> {
    marcum_q_with(mu, a, b, &Accuracy::default())
}

pub fn marcum_q_with(mu: u32, a: f64, b: f64, acc: &Accuracy) -> Result<f64> {
    marcum_q_pair(mu, a, b, acc).map(|(q, _)| q)
}

/// Returns `(Q_mu(a, b), 1 - Q_mu(a, b))`, each to relative accuracy.
///
/// Uses the Poisson mixture of central chi-square tails
///
/// ```text
/// Q_mu(a, b) = sum_k e^{-a²/2} (a²/2)^k / k! · Q(mu + k, b²/2)
/// ```
///
/// summed outward from the Poisson mode so that large non-centralities do
/// not underflow. When `b²/2` lies above the mean `mu + a²/2` the survival
/// side is summed; otherwise the CDF side `sum w_k P(mu + k, b²/2)` is summed
/// and Q is its complement. Either way the smaller quantity is accumulated
/// directly.
pub fn marcum_q_pair(mu: u32, a: f64, b: f64, acc: &Accuracy) -> Result<(f64, f64)> {
    if mu == 0 {
        return Err(domain("Marcum Q order must be at least 1"));
    }
    if !a.is_finite() || !b.is_finite() || a < 0.0 || b < 0.0 {
        return Err(domain(format!(
            "Marcum Q needs finite non-negative arguments, got a = {a}, b = {b}"
        )));
    }
    if b == 0.0 {
        return Ok((1.0, 0.0));
    }
    let order = mu as f64;
    let y = 0.5 * b * b;
    if a == 0.0 {
        let (p, q) = reg_gamma_pq(order, y)?;
        return Ok((q, p));
    }
    let lambda = 0.5 * a * a;
    let survival_side = y > order + lambda;
    let sum = poisson_mixture(order, lambda, y, survival_side, acc)?;
    let sum = sum.clamp(0.0, 1.0);
    Ok(if survival_side {
        (sum, 1.0 - sum)
    } else {
        (1.0 - sum, sum)
    })
}

/// Sum of `w_k G_k` where `w_k` is the Poisson(lambda) mass and `G_k` is
/// `Q(order + k, y)` (survival side) or `P(order + k, y)`.
fn poisson_mixture(
    order: f64,
    lambda: f64,
    y: f64,
    survival_side: bool,
    acc: &Accuracy,
) -> Result<f64> {
    let mode = lambda.floor();
    let k0 = mode as usize;
    let ln_y = y.ln();
    let w0 = (-lambda + mode * lambda.ln() - ln_gamma(mode + 1.0)).exp();

    let term_at = |k: usize| -> Result<f64> {
        let (p, q) = reg_gamma_pq(order + k as f64, y)?;
        Ok(if survival_side { q } else { p })
    };
    // d_k = y^{order+k} e^{-y} / Γ(order+k+1), the step between Q(order+k) and Q(order+k+1)
    let step_at = |k: usize| -> f64 {
        let s = order + k as f64;
        (s * ln_y - y - ln_gamma(s + 1.0)).exp()
    };

    let g0 = term_at(k0)?;
    let mut sum = w0 * g0;
    let mut terms = 1usize;

    // Forward: Q grows by adding steps (stable); P shrinks, so it is re-evaluated.
    let mut w = w0;
    let mut g = g0;
    let mut step = step_at(k0);
    let mut k = k0;
    loop {
        let kf = k as f64;
        if kf + 2.0 > lambda {
            let mass_bound = w * lambda / (kf + 1.0) / (1.0 - lambda / (kf + 2.0));
            let g_bound = if survival_side { 1.0 } else { g };
            let bound = mass_bound * g_bound;
            if bound <= acc.rel_tol() * sum || bound < f64::MIN_POSITIVE {
                break;
            }
        }
        if terms >= acc.max_terms() {
            return Err(series_failure(sum, terms));
        }
        w *= lambda / (kf + 1.0);
        if survival_side {
            g = (g + step).min(1.0);
            step *= y / (order + kf + 1.0);
        } else {
            g = term_at(k + 1)?;
        }
        k += 1;
        sum += w * g;
        terms += 1;
    }

    // Backward: P grows by adding steps (stable); Q shrinks, so it is re-evaluated.
    let mut w = w0;
    let mut g = g0;
    let mut k = k0;
    while k > 0 {
        let kf = k as f64;
        // mass of indices < k is at most w_{k-1} / (1 - (k-1)/lambda)
        let prev_w = w * kf / lambda;
        let ratio = (kf - 1.0) / lambda;
        if ratio < 1.0 {
            let g_bound = if survival_side { g } else { 1.0 };
            let bound = prev_w / (1.0 - ratio) * g_bound;
            if bound <= acc.rel_tol() * sum || bound < f64::MIN_POSITIVE {
                break;
            }
        }
        if terms >= acc.max_terms() {
            return Err(series_failure(sum, terms));
        }
        w = prev_w;
        if survival_side {
            g = term_at(k - 1)?;
        } else {
            g = (g + step_at(k - 1)).min(1.0);
        }
        k -= 1;
        sum += w * g;
        terms += 1;
    }
    Ok(sum)
}

fn series_failure(partial: f64, iterations: usize) -> Error {
    Error::Accuracy {
        what: "Marcum Q series",
        partial,
        previous: None,
        iterations,
    }
}

/// CDF of the non-central chi-square law with `dof` degrees of freedom
/// (even, so that the order `dof / 2` is an integer) and non-centrality
/// `noncentrality`, evaluated at `x`.
pub fn ncx2_cdf(dof: u32, noncentrality: f64, x: f64) -> Result<f64> {
    if dof == 0 || !dof.is_multiple_of(2) {
        return Err(domain(format!(
            "ncx2_cdf supports even positive degrees of freedom, got {dof}"
        )));
    }
    if !noncentrality.is_finite() || noncentrality < 0.0 || !x.is_finite() || x < 0.0 {
        return Err(domain(format!(
            "ncx2_cdf needs finite non-negative arguments, got noncentrality = {noncentrality}, x = {x}"
        )));
    }
    let (_, p) = marcum_q_pair(
        dof / 2,
        noncentrality.sqrt(),
        x.sqrt(),
        &Accuracy::default(),
    )?;
    Ok(p)
}

#[cfg(test)]
// reference values are kept exactly as printed by mpmath
#[allow(clippy::excessive_precision)]
mod tests {
    use super::super::reg_gamma_upper;
    use super::*;

    // (mu, a, b, Q, 1 - Q) from 40-digit density quadrature in mpmath
    const REFERENCE: &[(u32, f64, f64, f64, f64)] = &[
        (
            1,
            1.0,
            1.0,
            0.732_879_803_796_820_2,
            0.267_120_196_203_179_8,
        ),
        (
            1,
            0.5,
            3.0,
            0.017_843_673_386_482_212,
            0.982_156_326_613_517_8,
        ),
        (
            2,
            1.5,
            1.0,
            0.965_086_743_389_135_7,
            0.034_913_256_610_864_33,
        ),
        (
            2,
            3.0,
            6.0,
            0.004_011_387_494_267_928,
            0.995_988_612_505_732_1,
        ),
        (
            3,
            5.0,
            2.0,
            0.999_922_221_647_329_3,
            7.777_835_267_074_396e-5,
        ),
        (
            4,
            2.0,
            8.0,
            1.028_273_875_858_342_6e-7,
            0.999_999_897_172_612_4,
        ),
        (
            1,
            40.0,
            38.0,
            0.977_933_464_822_205_4,
            0.022_066_535_177_794_57,
        ),
        (
            2,
            45.0,
            46.0,
            0.166_764_766_465_268_07,
            0.833_235_233_534_731_9,
        ),
        (
            1,
            10.0,
            16.0,
            1.255_070_271_635_219_2e-9,
            0.999_999_998_744_929_7,
        ),
        (
            3,
            0.1,
            0.2,
            0.999_998_693_025_981_5,
            1.306_974_018_457_446_8e-6,
        ),
    ];

    #[test]
    fn matches_density_quadrature() {
        for &(mu, a, b, q_want, p_want) in REFERENCE {
            let (q, p) = marcum_q_pair(mu, a, b, &Accuracy::default()).unwrap();
            assert!(
                ((q - q_want) / q_want).abs() < 1e-10,
                "Q_{mu}({a},{b}) = {q}"
            );
            assert!(
                ((p - p_want) / p_want).abs() < 1e-10,
                "1-Q_{mu}({a},{b}) = {p}"
            );
        }
    }

    #[test]
    fn zero_threshold_is_certain() {
        for mu in 1..5 {
            assert_eq!(marcum_q(mu, 2.3, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn zero_noncentrality_is_central_tail() {
        for mu in 1..5 {
            for b in [0.3, 1.0, 4.0] {
                let q = marcum_q(mu, 0.0, b).unwrap();
                let want = reg_gamma_upper(mu as f64, b * b / 2.0).unwrap();
                assert!((q - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn huge_noncentrality_stays_finite() {
        // a²/2 = 1250 would underflow e^{-a²/2}
        let q = marcum_q(2, 50.0, 50.0).unwrap();
        assert!(q > 0.4 && q < 0.6, "{q}");
        assert!(marcum_q(1, 60.0, 10.0).unwrap() > 1.0 - 1e-12);
        assert!(marcum_q(1, 60.0, 90.0).unwrap() < 1e-100);
    }

    #[test]
    fn monotone_in_threshold_with_limits() {
        for mu in [1, 2, 4] {
            for a in [0.0, 0.7, 3.0, 12.0] {
                let values: Vec<f64> = [0.0, 1.0, 10.0, 50.0]
                    .iter()
                    .map(|&b| marcum_q(mu, a, b).unwrap())
                    .collect();
                assert_eq!(values[0], 1.0);
                assert!(values.windows(2).all(|w| w[1] <= w[0]));
                assert!(values[3] < 1e-100);
            }
        }
    }

    #[test]
    fn nondecreasing_in_order() {
        for a in [0.2, 1.0, 5.0] {
            for b in [0.5, 2.0, 6.0] {
                let mut last = 0.0;
                for mu in 1..8 {
                    let q = marcum_q(mu, a, b).unwrap();
                    assert!(q >= last - 1e-15);
                    last = q;
                }
            }
        }
    }

    #[test]
    fn ncx2_reductions() {
        for x in [0.1, 1.0, 7.5] {
            let got = ncx2_cdf(2, 0.0, x).unwrap();
            assert!((got - (1.0 - (-x / 2.0f64).exp())).abs() < 1e-15);
        }
        assert_eq!(ncx2_cdf(4, 0.0, 0.0).unwrap(), 0.0);
        let got = ncx2_cdf(4, 1.5, 3.0).unwrap();
        assert!((got - 0.285_955_669_565_496_9).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(marcum_q(0, 1.0, 1.0).is_err());
        assert!(marcum_q(1, f64::NAN, 1.0).is_err());
        assert!(marcum_q(1, 1.0, f64::INFINITY).is_err());
        assert!(marcum_q(1, -1.0, 1.0).is_err());
        assert!(ncx2_cdf(3, 1.0, 1.0).is_err());
    }

    #[test]
    fn tiny_budget_reports_partial_sum() {
        let acc = Accuracy::new(1e-12, 100).unwrap();
        match marcum_q_pair(1, 200.0, 200.0, &acc) {
            Err(Error::Accuracy { partial, .. }) => assert!(partial > 0.0),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }
}
