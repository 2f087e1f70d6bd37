//! A2: determinant of a discretised operator by LU decomposition.
//!
//! The matrix is `T = tridiag(-1, 2 + c h^2, -1)` of size `n = 8 * 2^level`
//! with its first row scaled by the input `x`. Rows are rotated within each
//! block of eight so the leading entry of every block is a tiny coupling
//! `eta`: without partial pivoting the elimination divides by it. The output
//! `h * det(T)` is linear in `x` and tends to `x sinh(sqrt(c)) / sqrt(c)` as
//! the grid refines, with second-order error in `h`.

use super::{Domain, Model};
use crate::numeric::resample;
use serde::{Deserialize, Serialize};

pub(super) const DOMAIN: Domain = Domain::new(1.0, 3.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PivotRule {
    /// Largest magnitude in the column; first one wins ties.
    Partial,
    /// Largest magnitude, last one wins ties (`>=` comparison).
    PartialLastTie,
    /// No row exchanges.
    None,
    /// Smallest magnitude above `1e-3` in the column.
    SmallestSafe,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LuFault {
    /// Skip the update of the row directly below the pivot at every step.
    OmitMultiplier,
    /// Report `h * sum(diag(U))` instead of the product.
    SumDiagonal,
    /// Add the multiple instead of subtracting it in the first elimination step.
    FlipFirstUpdate,
    /// Drop the pivot in the middle of the matrix from the product.
    DropMiddlePivot,
    /// Square the pivots of the first block.
    SquareFirstBlock,
    /// Round every elimination update to single precision.
    SinglePrecision,
    /// Normalise by the level-0 spacing at every level.
    StaleSpacing,
    /// Ignore the level knob.
    FixedSize,
    /// Grow the size by eight rows per level instead of doubling.
    LinearRefinement,
    /// Normalise by `1/n` instead of `1/(n+1)`.
    SpacingOffByOne,
    /// Apply the input scaling to an extra row at `n/2` as `x^power`.
    ExtraRowScale { power: f64 },
    /// Add `offset` to `h * det`.
    OutputOffset { offset: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuConfig {
    pub c: f64,
    pub eta: f64,
    pub base_n: usize,
    /// The scaled row is multiplied by `x^row_power`.
    pub row_power: f64,
    /// Diagonal is `2 + c h^diag_exponent`.
    pub diag_exponent: f64,
    pub pivot: PivotRule,
    pub fault: Option<LuFault>,
}

impl Default for LuConfig {
    fn default() -> Self {
        LuConfig {
            c: 4.0,
            eta: 1e-13,
            base_n: 8,
            row_power: 1.0,
            diag_exponent: 2.0,
            pivot: PivotRule::Partial,
            fault: None,
        }
    }
}

/// Result of an LU factorisation `P A = L U`, stored compactly.
#[derive(Debug, Clone, PartialEq)]
pub struct LuFactors {
    pub n: usize,
    /// Row-major combined factors: strict lower part holds L, upper holds U.
    pub lu: Vec<f64>,
    pub perm: Vec<usize>,
    /// Sign of the row permutation.
    pub sign: f64,
}

impl LuFactors {
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.lu[i * self.n + i]).collect()
    }

    pub fn determinant(&self) -> f64 {
        self.sign * self.diagonal().iter().product::<f64>()
    }
}

/// Doolittle LU with the given pivot rule on a row-major `n x n` matrix.
pub fn lu_decompose(matrix: &[f64], n: usize, rule: PivotRule) -> LuFactors {
    factor(matrix, n, rule, None)
}

fn factor(matrix: &[f64], n: usize, rule: PivotRule, fault: Option<LuFault>) -> LuFactors {
    assert_eq!(matrix.len(), n * n, "matrix must be n x n");
    let mut a = matrix.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for k in 0..n {
        let p = choose_pivot(&a, n, k, rule);
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            if fault == Some(LuFault::OmitMultiplier) && i == k + 1 {
                continue;
            }
            let m = a[i * n + k] / pivot;
            a[i * n + k] = m;
            if m == 0.0 {
                continue;
            }
            let s = if fault == Some(LuFault::FlipFirstUpdate) && k == 0 { -1.0 } else { 1.0 };
            for j in k + 1..n {
                let mut v = a[i * n + j] - s * m * a[k * n + j];
                if fault == Some(LuFault::SinglePrecision) {
                    v = v as f32 as f64;
                }
                a[i * n + j] = v;
            }
        }
    }
    LuFactors { n, lu: a, perm, sign }
}

fn choose_pivot(a: &[f64], n: usize, k: usize, rule: PivotRule) -> usize {
    let col = |i: usize| a[i * n + k].abs();
    match rule {
        PivotRule::None => k,
        PivotRule::Partial => {
            let mut best = k;
            for i in k + 1..n {
                if col(i) > col(best) {
                    best = i;
                }
            }
            best
        }
        PivotRule::PartialLastTie => {
            let mut best = k;
            for i in k + 1..n {
                if col(i) >= col(best) {
                    best = i;
                }
            }
            best
        }
        PivotRule::SmallestSafe => {
            let mut best: Option<usize> = None;
            for i in k..n {
                if col(i) > 1e-3 && best.is_none_or(|b| col(i) < col(b)) {
                    best = Some(i);
                }
            }
            best.unwrap_or(k)
        }
    }
}

pub struct LuKernel<'a> {
    cfg: &'a LuConfig,
    n: usize,
}

impl LuConfig {
    pub fn fit(&self, level: u32) -> LuKernel<'_> {
        let n = match self.fault {
            Some(LuFault::FixedSize) => self.base_n,
            Some(LuFault::LinearRefinement) => self.base_n + 8 * level as usize,
            _ => self.base_n << level,
        };
        LuKernel { cfg: self, n }
    }
}

impl LuKernel<'_> {
    fn spacing(&self) -> f64 {
        match self.cfg.fault {
            Some(LuFault::StaleSpacing) => 1.0 / (self.cfg.base_n + 1) as f64,
            Some(LuFault::SpacingOffByOne) => 1.0 / self.n as f64,
            _ => 1.0 / (self.n + 1) as f64,
        }
    }

    fn matrix(&self, x: f64) -> Vec<f64> {
        let n = self.n;
        let c = self.cfg;
        let h = 1.0 / (n + 1) as f64;
        let mut t = vec![0.0; n * n];
        for i in 0..n {
            t[i * n + i] = 2.0 + c.c * h.powf(c.diag_exponent);
            if i > 0 {
                t[i * n + i - 1] = -1.0;
            }
            if i + 1 < n {
                t[i * n + i + 1] = -1.0;
            }
        }
        let block = 8.min(n);
        for b in (0..n).step_by(block) {
            let last = (b + block - 1).min(n - 1);
            t[last * n + b] += c.eta;
        }
        let scale = x.powf(c.row_power);
        for j in 0..n {
            t[j] *= scale;
        }
        if let Some(LuFault::ExtraRowScale { power }) = c.fault {
            let r = n / 2;
            for j in 0..n {
                t[r * n + j] *= x.powf(power);
            }
        }
        // rotate rows within each block: the block's last row moves to its top
        let mut m = vec![0.0; n * n];
        for b in (0..n).step_by(block) {
            let last = (b + block - 1).min(n - 1);
            m[b * n..(b + 1) * n].copy_from_slice(&t[last * n..(last + 1) * n]);
            for i in b + 1..=last {
                m[i * n..(i + 1) * n].copy_from_slice(&t[(i - 1) * n..i * n]);
            }
        }
        m
    }

    /// Sign of the block rotation: each block of size b is a b-cycle.
    fn rotation_sign(&self) -> f64 {
        let block = 8.min(self.n);
        let mut sign = 1.0;
        for b in (0..self.n).step_by(block) {
            let len = (b + block).min(self.n) - b;
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }

    fn pivots(&self, x: f64) -> (LuFactors, Vec<f64>) {
        let f = factor(&self.matrix(x), self.n, self.cfg.pivot, self.cfg.fault);
        let mut d = f.diagonal();
        match self.cfg.fault {
            Some(LuFault::DropMiddlePivot) => d[self.n / 2] = 1.0,
            Some(LuFault::SquareFirstBlock) => {
                for v in d.iter_mut().take(8.min(self.n)) {
                    *v *= *v;
                }
            }
            _ => {}
        }
        (f, d)
    }
}

impl Model for LuKernel<'_> {
    fn eval(&self, x: f64) -> f64 {
        let (f, d) = self.pivots(x);
        let h = self.spacing();
        let core = match self.cfg.fault {
            Some(LuFault::SumDiagonal) => d.iter().sum::<f64>(),
            _ => f.sign * d.iter().product::<f64>() * self.rotation_sign(),
        };
        let offset = match self.cfg.fault {
            Some(LuFault::OutputOffset { offset }) => offset,
            _ => 0.0,
        };
        h * core + offset
    }

    /// Running products of pivot magnitudes, normalised so the last element
    /// is the reported output.
    fn trajectory(&self, x: f64, steps: usize) -> Option<Vec<f64>> {
        let (_, d) = self.pivots(x);
        let h = self.spacing();
        let n = d.len() as f64;
        let mut acc = 1.0;
        let mut traj: Vec<f64> = d
            .iter()
            .enumerate()
            .map(|(k, u)| {
                acc *= u.abs();
                acc * h.powf((k + 1) as f64 / n)
            })
            .collect();
        *traj.last_mut().unwrap() = self.eval(x);
        Some(resample(&traj, steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_system_determinant_is_product_of_diagonal() {
        let diag = [2.5, -0.5, 4.0, 1e-3, 7.0];
        let n = diag.len();
        let mut m = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            m[i * n + i] = *d;
        }
        let expected: f64 = diag.iter().product();
        for rule in [PivotRule::Partial, PivotRule::None] {
            let det = lu_decompose(&m, n, rule).determinant();
            assert!(((det - expected) / expected).abs() < 1e-12, "{rule:?}: {det} vs {expected}");
        }
    }

    #[test]
    fn lu_reconstructs_permuted_matrix() {
        let m = [0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let f = lu_decompose(&m, 3, PivotRule::Partial);
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    let l = if k == i { 1.0 } else if k < i { f.lu[i * 3 + k] } else { 0.0 };
                    let u = if k <= j { f.lu[k * 3 + j] } else { 0.0 };
                    s += l * u;
                }
                assert!((s - m[f.perm[i] * 3 + j]).abs() < 1e-14);
            }
        }
        assert!((f.determinant() - (-5.0)).abs() < 1e-13);
    }

    #[test]
    fn output_is_linear_and_converges_to_sinh_limit() {
        let c = LuConfig::default();
        let m = c.fit(0);
        assert!((m.eval(3.0) - 1.5 * m.eval(2.0)).abs() < 1e-12);
        let limit = 2.0f64.sinh() / 2.0;
        let e: Vec<f64> = (0..3).map(|l| (c.fit(l).eval(1.0) - limit).abs()).collect();
        let order = (e[0] / e[2]).log2() / 2.0;
        assert!((order - 2.0).abs() < 0.2, "observed order {order}");
    }

    #[test]
    fn no_pivoting_is_visibly_inaccurate() {
        let good = LuConfig::default().fit(2).eval(2.0);
        let bad = LuConfig { pivot: PivotRule::None, ..Default::default() }.fit(2).eval(2.0);
        assert!((good - bad).abs() > 1e-3, "{good} vs {bad}");
    }
}
