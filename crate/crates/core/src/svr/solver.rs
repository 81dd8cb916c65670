//! Pairwise (SMO) solver for the ε-insensitive regression dual.
//!
//! The dual is written over `2l` variables `a = [α; α*]` with signs
//! `s = [+1; -1]`:
//!
//! ```text
//! min  ½ aᵀQa + pᵀa
//! s.t. sᵀa = 0,  0 ≤ a ≤ C
//! Q_st = s_s s_t K(x_s, x_t),  p = [ε - z; ε + z]
//! ```
//!
//! Each step picks the maximal KKT-violating pair and solves the
//! two-variable subproblem exactly, so the objective never gets worse.

use std::collections::VecDeque;
use std::sync::Arc;

use super::KernelSpec;

const TAU: f64 = 1e-12;
/// Kernel-row cache budget per solver, in bytes.
const CACHE_BYTES: usize = 256 << 20;

pub(crate) struct Solution {
    pub beta: Vec<f64>,
    pub bias: f64,
    /// Dual objective in maximization form after each sweep; the last
    /// entry is the final value.
    pub trace: Vec<f64>,
    pub converged: bool,
}

struct KernelRows<'a> {
    inputs: &'a [Vec<f64>],
    kernel: KernelSpec,
    rows: Vec<Option<Arc<Vec<f64>>>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelRows<'a> {
    fn new(inputs: &'a [Vec<f64>], kernel: KernelSpec) -> Self {
        let l = inputs.len();
        let capacity = (CACHE_BYTES / (8 * l.max(1))).clamp(2, l.max(2));
        Self {
            inputs,
            kernel,
            rows: vec![None; l],
            order: VecDeque::new(),
            capacity,
        }
    }

    fn row(&mut self, i: usize) -> Arc<Vec<f64>> {
        if let Some(row) = &self.rows[i] {
            return Arc::clone(row);
        }
        if self.order.len() >= self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.rows[old] = None;
            }
        }
        let xi = &self.inputs[i];
        let row: Arc<Vec<f64>> = Arc::new(
            self.inputs
                .iter()
                .map(|xj| self.kernel.eval(xi, xj))
                .collect(),
        );
        self.rows[i] = Some(Arc::clone(&row));
        self.order.push_back(i);
        row
    }
}

struct Pair {
    i: usize,
    j: usize,
    gmax: f64,
    gmin: f64,
}

/// Applies a pending gradient update, then finds the maximal violating
/// pair. Among equal violations the lowest index wins.
fn scan(a: &[f64], grad: &mut [f64], c: f64, update: Option<(&[f64], &[f64], f64, f64)>) -> Pair {
    let l = a.len() / 2;
    let (gp, gn) = grad.split_at_mut(l);
    if let Some((row_i, row_j, ci, cj)) = update {
        for (k, (p, n)) in gp.iter_mut().zip(gn.iter_mut()).enumerate() {
            let u = ci * row_i[k] + cj * row_j[k];
            *p += u;
            *n -= u;
        }
    }
    let (ap, an) = a.split_at(l);
    // Positive half: v = -G, can rise while a < C, can fall while a > 0.
    // Negative half: v = G, can rise while a > 0, can fall while a < C.
    let (mut up_p, mut up_n) = ((f64::NEG_INFINITY, usize::MAX), (f64::NEG_INFINITY, usize::MAX));
    let (mut low_p, mut low_n) = ((f64::INFINITY, usize::MAX), (f64::INFINITY, usize::MAX));
    for k in 0..l {
        let (vp, vn) = (-gp[k], gn[k]);
        if ap[k] < c && vp > up_p.0 {
            up_p = (vp, k);
        }
        if ap[k] > 0.0 && vp < low_p.0 {
            low_p = (vp, k);
        }
        if an[k] > 0.0 && vn > up_n.0 {
            up_n = (vn, k);
        }
        if an[k] < c && vn < low_n.0 {
            low_n = (vn, k);
        }
    }
    let (gmax, i) = if up_n.0 > up_p.0 { (up_n.0, up_n.1 + l) } else { up_p };
    let (gmin, j) = if low_n.0 < low_p.0 { (low_n.0, low_n.1 + l) } else { low_p };
    Pair { i, j, gmax, gmin }
}

pub(crate) fn solve(
    inputs: &[Vec<f64>],
    targets: &[f64],
    kernel: KernelSpec,
    c: f64,
    epsilon: f64,
    tol: f64,
    max_sweeps: usize,
) -> Solution {
    let l = targets.len();
    let n = 2 * l;
    let sign = |t: usize| if t < l { 1.0 } else { -1.0 };
    let base = |t: usize| if t < l { t } else { t - l };

    let p: Vec<f64> = (0..n)
        .map(|t| {
            if t < l {
                epsilon - targets[t]
            } else {
                epsilon + targets[t - l]
            }
        })
        .collect();
    let diag: Vec<f64> = inputs.iter().map(|x| kernel.eval(x, x)).collect();

    let mut a = vec![0.0; n];
    let mut grad = p.clone();
    let mut rows = KernelRows::new(inputs, kernel);

    let objective = |a: &[f64], grad: &[f64]| -> f64 {
        // f = ½ aᵀ(G + p); report the maximization form -f.
        -0.5 * a
            .iter()
            .zip(grad.iter().zip(&p))
            .map(|(ai, (g, pi))| ai * (g + pi))
            .sum::<f64>()
    };

    let mut trace = vec![0.0];
    let max_updates = max_sweeps.saturating_mul(l.max(1));
    let mut updates = 0;
    let mut pair = scan(&a, &mut grad, c, None);

    let converged = loop {
        if pair.i == usize::MAX || pair.j == usize::MAX || pair.gmax - pair.gmin < tol {
            break true;
        }
        if updates >= max_updates {
            break false;
        }
        let (i, j) = (pair.i, pair.j);
        let (bi, bj) = (base(i), base(j));
        let (si, sj) = (sign(i), sign(j));
        let row_i = rows.row(bi);
        let row_j = rows.row(bj);
        let qij = si * sj * row_i[bj];
        let (old_i, old_j) = (a[i], a[j]);

        if si != sj {
            let quad = (diag[bi] + diag[bj] + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if diff > 0.0 {
                if a[j] < 0.0 {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if diff > 0.0 {
                if a[i] > c {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if a[j] > c {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            let quad = (diag[bi] + diag[bj] - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if sum > c {
                if a[i] > c {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if a[j] < 0.0 {
                a[j] = 0.0;
                a[i] = sum;
            }
            if sum > c {
                if a[j] > c {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = sum;
            }
        }

        let (di, dj) = (a[i] - old_i, a[j] - old_j);
        pair = scan(&a, &mut grad, c, Some((&row_i, &row_j, si * di, sj * dj)));

        updates += 1;
        if updates % l.max(1) == 0 {
            trace.push(objective(&a, &grad));
        }
    };
    trace.push(objective(&a, &grad));

    // Bias from free variables, or the midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free_sum, mut free_count) = (0.0, 0usize);
    for t in 0..n {
        let s = sign(t);
        let yg = s * grad[t];
        if a[t] >= c {
            if s < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if a[t] <= 0.0 {
            if s > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free_sum += yg;
            free_count += 1;
        }
    }
    let rho = if free_count > 0 {
        free_sum / free_count as f64
    } else {
        0.5 * (ub + lb)
    };

    Solution {
        beta: (0..l).map(|i| a[i] - a[i + l]).collect(),
        bias: -rho,
        trace,
        converged,
    }
}
