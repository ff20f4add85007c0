//! Reference implementations used only by the tests. None of these call
//! into the library's numerics.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::FRAC_PI_2;

use borrowscope::series::{EventWindow, MonthKey};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite 20-point Gauss–Legendre over `panels` equal pieces of `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            rule.iter().map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// Two-sided Student t tail by quadrature. With `t = sqrt(nu) tan(theta)`
/// the density becomes `cos^(nu - 1)(theta)` on `[0, pi/2]`.
pub fn t_two_sided_quad(t: f64, nu: usize) -> f64 {
    let k = nu as f64 - 1.0;
    let g = |th: f64| th.cos().powf(k);
    let theta0 = (t.abs() / (nu as f64).sqrt()).atan();
    integrate(g, theta0, FRAC_PI_2, 200) / integrate(g, 0.0, FRAC_PI_2, 200)
}

/// F upper tail by quadrature. With `x = sin^2(phi)` the Beta(d1/2, d2/2)
/// density becomes `sin^(d1-1) cos^(d2-1)` on `[0, pi/2]`.
pub fn f_upper_quad(f: f64, d1: usize, d2: usize) -> f64 {
    let (p, q) = (d1 as f64 - 1.0, d2 as f64 - 1.0);
    let g = |phi: f64| phi.sin().powf(p) * phi.cos().powf(q);
    let x0 = d1 as f64 * f / (d1 as f64 * f + d2 as f64);
    let phi0 = x0.sqrt().asin();
    integrate(g, phi0, FRAC_PI_2, 200) / integrate(g, 0.0, FRAC_PI_2, 200)
}

/// Least squares through the normal equations, solved by Gaussian
/// elimination with partial pivoting. Returns `(beta, ssr)`.
pub fn normal_equations(rows: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let p = rows[0].len();
    let mut a = vec![vec![0.0; p + 1]; p];
    for (row, &yi) in rows.iter().zip(y) {
        for i in 0..p {
            for j in 0..p {
                a[i][j] += row[i] * row[j];
            }
            a[i][p] += row[i] * yi;
        }
    }
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for r in 0..p {
            if r != col {
                let factor = a[r][col] / a[col][col];
                for c in col..=p {
                    a[r][c] -= factor * a[col][c];
                }
            }
        }
    }
    let beta: Vec<f64> = (0..p).map(|i| a[i][p] / a[i][i]).collect();
    let ssr = rows
        .iter()
        .zip(y)
        .map(|(row, yi)| {
            let fit: f64 = row.iter().zip(&beta).map(|(x, b)| x * b).sum();
            (yi - fit).powi(2)
        })
        .sum();
    (beta, ssr)
}

/// Per-lag `(F, p)` of the nested lag regressions, via the normal equations.
pub fn granger_reference(target: &[f64], predictor: &[f64], max_lag: usize) -> Vec<(f64, f64)> {
    let n = target.len();
    (1..=max_lag)
        .take_while(|&lag| n >= 3 * lag + 2)
        .map(|lag| {
            let mut r_rows = Vec::new();
            let mut u_rows = Vec::new();
            for t in lag..n {
                let own: Vec<f64> = (1..=lag).map(|k| target[t - k]).collect();
                let cross: Vec<f64> = (1..=lag).map(|k| predictor[t - k]).collect();
                let mut r = vec![1.0];
                r.extend(&own);
                let mut u = r.clone();
                u.extend(&cross);
                r_rows.push(r);
                u_rows.push(u);
            }
            let y = &target[lag..];
            let (_, ssr_r) = normal_equations(&r_rows, y);
            let (_, ssr_u) = normal_equations(&u_rows, y);
            let df2 = n - 3 * lag - 1;
            let f = ((ssr_r - ssr_u) / lag as f64) / (ssr_u / df2 as f64);
            (f, f_upper_quad(f, lag, df2))
        })
        .collect()
}

/// The four-parameter window model is two independent lines, one per side
/// of the cutoff. Returns `(b0, b1, b2, b3, ssr)` from closed-form simple
/// regressions.
pub fn rdd_reference(window: &EventWindow) -> [f64; 5] {
    fn line(ts: &[f64], ys: &[f64]) -> (f64, f64, f64) {
        let n = ts.len() as f64;
        let tm = ts.iter().sum::<f64>() / n;
        let ym = ys.iter().sum::<f64>() / n;
        let sxy: f64 = ts.iter().zip(ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
        let sxx: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
        let slope = sxy / sxx;
        let icpt = ym - slope * tm;
        let ssr = ts.iter().zip(ys).map(|(t, y)| (y - icpt - slope * t).powi(2)).sum();
        (icpt, slope, ssr)
    }
    let pre_t: Vec<f64> = (-12..=-1).map(f64::from).collect();
    let post_t: Vec<f64> = (1..=12).map(f64::from).collect();
    let (a0, a1, s0) = line(&pre_t, &window.pre);
    let (c0, c1, s1) = line(&post_t, &window.post);
    [a0, a1, c0 - a0, c1 - a1, s0 + s1]
}

pub fn window(pre: [f64; 12], post: [f64; 12]) -> EventWindow {
    EventWindow {
        borrowed_id: "orig".into(),
        borrowee_id: "new".into(),
        release: MonthKey::new(2015, 3).unwrap(),
        pre,
        post,
    }
}

pub fn rel_close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(1.0)
}
