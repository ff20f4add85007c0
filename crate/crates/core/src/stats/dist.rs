use super::StatsError;

const CF_EPS: f64 = 1e-14;
const CF_TINY: f64 = 1e-300;
const CF_MAX_ITER: usize = 10_000;

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64, StatsError> {
    if !(a > 0.0 && b > 0.0) || !(0.0..=1.0).contains(&x) {
        return Err(StatsError::DomainError(format!(
            "incomplete beta needs a, b > 0 and 0 <= x <= 1 (a={a}, b={b}, x={x})"
        )));
    }
    Ok(beta_reg(a, b, x, 1.0 - x))
}

/// `I_x(a, b)` with `y = 1 - x` supplied by the caller so it can be computed
/// without cancellation.
fn beta_reg(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_beta = libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b);
    let front = (a * x.ln() + b * y.ln() - ln_beta).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, y) / b
    }
}

/// Continued fraction for the incomplete beta, modified Lentz evaluation.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Two-sided p-value `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn t_sf_two_sided(t_stat: f64, df: usize) -> Result<f64, StatsError> {
    if df == 0 {
        return Err(StatsError::DomainError("t distribution needs df >= 1".into()));
    }
    if t_stat.is_nan() {
        return Err(StatsError::DomainError("t statistic is NaN".into()));
    }
    if t_stat.is_infinite() {
        return Ok(0.0);
    }
    let nu = df as f64;
    let t2 = t_stat * t_stat;
    let denom = nu + t2;
    Ok(beta_reg(nu / 2.0, 0.5, nu / denom, t2 / denom))
}

/// Upper tail `P(F >= f)` for Fisher's F with `(df1, df2)` degrees of freedom.
pub fn f_sf(f_stat: f64, df1: usize, df2: usize) -> Result<f64, StatsError> {
    if df1 == 0 || df2 == 0 {
        return Err(StatsError::DomainError(
            "F distribution needs df1, df2 >= 1".into(),
        ));
    }
    if f_stat.is_nan() || f_stat < 0.0 {
        return Err(StatsError::DomainError(format!(
            "F statistic must be >= 0 (got {f_stat})"
        )));
    }
    if f_stat.is_infinite() {
        return Ok(0.0);
    }
    let (d1, d2) = (df1 as f64, df2 as f64);
    let denom = d2 + d1 * f_stat;
    Ok(beta_reg(d2 / 2.0, d1 / 2.0, d2 / denom, d1 * f_stat / denom))
}
