//! Small numerical helpers shared by kernels and verifiers.

/// Linear resampling of `grid` (uniform in time) onto `steps` points.
/// Endpoints are reproduced exactly.
pub fn resample(grid: &[f64], steps: usize) -> Vec<f64> {
    let n = grid.len();
    if n == 1 {
        return vec![grid[0]; steps];
    }
    (0..steps)
        .map(|k| {
            if k == 0 {
                return grid[0];
            }
            if k == steps - 1 {
                return grid[n - 1];
            }
            let pos = k as f64 * (n - 1) as f64 / (steps - 1) as f64;
            let i = pos.floor() as usize;
            let frac = pos - i as f64;
            if frac == 0.0 {
                grid[i]
            } else {
                grid[i] + frac * (grid[i + 1] - grid[i])
            }
        })
        .collect()
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// P_n(z) and P_n'(z) by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// All Legendre polynomials P_0..=P_n at z.
pub fn legendre_all(n: usize, z: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(z);
    }
    for k in 2..=n {
        let v = ((2 * k - 1) as f64 * z * out[k - 1] - (k - 1) as f64 * out[k - 2]) / k as f64;
        out.push(v);
    }
    out
}

/// Standard normal CDF.
pub fn phi(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Solves the symmetric positive definite system `a x = b` in place by
/// Cholesky. `a` is row-major `n x n`. Returns `None` if not SPD.
pub fn cholesky_solve(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resample_keeps_endpoints_and_interpolates() {
        let g = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(resample(&g, 2), vec![0.0, 4.0]);
        assert_eq!(resample(&g, 5), g.to_vec());
        assert_eq!(resample(&g, 3), vec![0.0, 2.0, 4.0]);
        let r = resample(&[0.0, 10.0], 5);
        assert!((r[1] - 2.5).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 8, 32, 64] {
            let (x, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n} weight sum {total}");
            // degree 2n-1 is integrated exactly
            let deg = 2 * n - 2;
            let integral: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
            let exact = 2.0 / (deg as f64 + 1.0);
            assert!((integral - exact).abs() < 1e-12, "n={n}: {integral} vs {exact}");
        }
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = [4.0, 1.0, 1.0, 3.0];
        let x = cholesky_solve(&a, &[1.0, 2.0], 2).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14);
        assert!((x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);
        assert!(cholesky_solve(&[1.0, 2.0, 2.0, 1.0], &[1.0, 1.0], 2).is_none());
    }

    #[test]
    fn phi_matches_known_values() {
        assert!((phi(0.0) - 0.5).abs() < 1e-16);
        assert!((phi(1.959963984540054) - 0.975).abs() < 1e-9);
    }
}
