//! Max-min fair transmit covariance for full-CSI energy beamforming.
//!
//! Solves `max_{V >= 0, tr V = 1} min_n tr(V A_n)` with rank-one payoffs
//! `A_n = a_n a_n^H` through its dual `min_{w in simplex} lambda_max(sum_n w_n A_n)`.
//! The dual is driven by exponentiated-gradient steps. The primal is
//! the best convex mixture of recently seen top eigenvectors, found by an
//! exact simplex solve of the small matrix game they induce. When the optimum
//! has high rank the subgradient steps stall, and a log-barrier Newton method
//! on the same dual finishes the job.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone)]
pub struct MaxMinInstance {
    /// `a_n`; the payoff of sensor n under covariance V is `a_n^H V a_n`.
    pub payoffs: Vec<CVector>,
    /// Relative primal-dual gap at which the solver stops.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl MaxMinInstance {
    pub fn new(payoffs: Vec<CVector>) -> Self {
        Self { payoffs, tolerance: 1e-4, max_iterations: 5000 }
    }

    /// Payoffs `(p / delta_n) h_n^T V conj(h_n)` for channel vectors `h_n`.
    pub fn from_channels(channels: &[&[Complex64]], p: f64, deltas: &[f64]) -> Self {
        let payoffs = channels
            .iter()
            .zip(deltas)
            .map(|(h, d)| {
                let s = (p / d).sqrt();
                CVector::from_iterator(h.len(), h.iter().map(|e| e.conj() * s))
            })
            .collect();
        Self::new(payoffs)
    }

    pub fn dim(&self) -> usize {
        self.payoffs.first().map_or(0, |a| a.len())
    }

    pub fn payoff(&self, v: &CMatrix) -> Vec<f64> {
        self.payoffs.iter().map(|a| quad_form(v, a)).collect()
    }

    fn check(&self) -> Result<usize> {
        let q = self.dim();
        if self.payoffs.is_empty() || q == 0 {
            return Err(Error::Infeasible("max-min needs at least one sensor and one antenna".into()));
        }
        if let Some(a) = self.payoffs.iter().find(|a| a.len() != q) {
            return Err(Error::DimensionMismatch { expected: q, got: a.len() });
        }
        Ok(q)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxMinSolution {
    #[serde(skip)]
    pub v: CMatrix,
    pub xi_csi: f64,
    pub dual_bound: f64,
    pub dual_weights: Vec<f64>,
    pub gap: f64,
    /// Mirror-descent iterations.
    pub iterations: usize,
    /// Newton steps spent in the barrier refinement; zero when mirror descent converged.
    pub newton_steps: usize,
    pub converged: bool,
}

fn quad_form(v: &CMatrix, a: &CVector) -> f64 {
    (a.adjoint() * v * a)[(0, 0)].re
}

/// Largest eigenvalue and a unit eigenvector of a Hermitian matrix.
pub fn top_eigenpair(m: &CMatrix) -> (f64, CVector) {
    let eig = m.clone().symmetric_eigen();
    let (idx, &lam) = eig.eigenvalues.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).expect("non-empty matrix");
    (lam, eig.eigenvectors.column(idx).into_owned())
}

fn hermitize(v: &CMatrix) -> CMatrix {
    let h = (v + v.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = h.trace().re;
    h / Complex64::new(tr, 0.0)
}

const STEP_SCALE: f64 = 10.0;
/// Mirror-descent iterations before handing over to the barrier method.
const MIRROR_BUDGET: usize = 100;
/// Distinct eigenvectors kept for primal recovery.
const POOL_SIZE: usize = 64;
const POLISH_EVERY: usize = 25;

/// Exact solution of the matrix game `max_theta min_n sum_k theta_k g[k][n]`
/// over the pooled eigenvectors. Returns the value, the mixture `theta` and
/// the optimal sensor weights.
///
/// After shifting payoffs onto `[1, 2]` the game is the LP
/// `max 1'y  s.t.  G'y <= 1, y >= 0`, whose slack basis is feasible, so a
/// plain tableau simplex with Bland's rule suffices.
fn solve_game(raw: &[Vec<f64>]) -> (f64, Vec<f64>, Vec<f64>) {
    let (k, n) = (raw.len(), raw[0].len());
    let lo = raw.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let cols = n + k;
    // Rows 0..k are constraints, row k the reduced costs; last column is the rhs.
    let mut t = vec![vec![0.0; cols + 1]; k + 1];
    for (j, g) in raw.iter().enumerate() {
        for (i, x) in g.iter().enumerate() {
            t[j][i] = (x - lo) / span + 1.0;
        }
        t[j][n + j] = 1.0;
        t[j][cols] = 1.0;
    }
    t[k][..n].iter_mut().for_each(|c| *c = -1.0);
    let mut basis: Vec<usize> = (n..cols).collect();
    const EPS: f64 = 1e-12;
    for _ in 0..50 * (cols + k) {
        let Some(e) = (0..cols).find(|&c| t[k][c] < -EPS) else { break };
        let mut leave: Option<usize> = None;
        for r in 0..k {
            if t[r][e] > EPS {
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let (a, b) = (t[r][cols] / t[r][e], t[l][cols] / t[l][e]);
                        a < b - EPS || (a <= b + EPS && basis[r] < basis[l])
                    }
                };
                if better {
                    leave = Some(r);
                }
            }
        }
        let Some(l) = leave else { break };
        let pivot = t[l][e];
        t[l].iter_mut().for_each(|x| *x /= pivot);
        let prow = t[l].clone();
        for (r, row) in t.iter_mut().enumerate() {
            let f = row[e];
            if r != l && f != 0.0 {
                row.iter_mut().zip(&prow).for_each(|(x, p)| *x -= f * p);
            }
        }
        basis[l] = e;
    }
    let mut y = vec![0.0; n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            y[b] = t[r][cols].max(0.0);
        }
    }
    let mut theta: Vec<f64> = (0..k).map(|j| t[k][n + j].max(0.0)).collect();
    let (sy, sx) = (y.iter().sum::<f64>(), theta.iter().sum::<f64>());
    y.iter_mut().for_each(|v| *v /= sy);
    theta.iter_mut().for_each(|v| *v /= sx);
    // Evaluate the mixture directly rather than trusting 1 / sum(y).
    let value =
        (0..n).map(|i| theta.iter().zip(raw).map(|(th, g)| th * g[i]).sum::<f64>()).fold(f64::INFINITY, f64::min);
    (value, theta, y)
}

/// Cholesky factor of a Hermitian matrix, or `None` unless it is positive definite.
/// nalgebra takes complex square roots of negative pivots, so the diagonal is checked here.
fn hpd_cholesky(z: CMatrix) -> Option<nalgebra::Cholesky<Complex64, nalgebra::Dyn>> {
    let c = z.cholesky()?;
    let ok = c.l_dirty().diagonal().iter().all(|d| d.re > 0.0 && d.im.abs() <= 1e-12 * d.re);
    ok.then_some(c)
}

fn weighted_sum(a: &[CVector], w: &[f64]) -> CMatrix {
    let q = a[0].len();
    let mut m = CMatrix::zeros(q, q);
    for (wn, an) in w.iter().zip(a) {
        m.gerc(Complex64::new(*wn, 0.0), an, an, Complex64::new(1.0, 0.0));
    }
    m
}

/// Best bounds seen so far plus the eigenvector pool.
struct Search<'a> {
    a: &'a [CVector],
    dual: f64,
    best_w: Vec<f64>,
    primal: f64,
    best_v: CMatrix,
    pool: Vec<(CVector, Vec<f64>)>,
}

impl Search<'_> {
    /// Top eigenpair of `sum_n w_n A_n`; updates both bounds and the pool.
    fn visit(&mut self, w: &[f64]) -> (f64, Vec<f64>) {
        let (lam, u) = top_eigenpair(&weighted_sum(self.a, w));
        let g: Vec<f64> = self.a.iter().map(|an| an.dotc(&u).norm_sqr()).collect();
        if !lam.is_finite() || g.iter().any(|x| !x.is_finite()) {
            return (lam, g);
        }
        if lam < self.dual {
            self.dual = lam;
            self.best_w = w.to_vec();
        }
        let rank1 = g.iter().copied().fold(f64::INFINITY, f64::min);
        if rank1 > self.primal {
            self.primal = rank1;
            self.best_v = &u * u.adjoint();
        }
        if !self.pool.iter().rev().take(8).any(|(p, _)| p.dotc(&u).norm_sqr() > 1.0 - 1e-12) {
            if self.pool.len() == POOL_SIZE {
                self.pool.remove(0);
            }
            self.pool.push((u, g.clone()));
        }
        (lam, g)
    }

    /// Re-mixes the pool exactly, then probes the game's sensor weights,
    /// which sit near the dual optimum even when the iterates cycle around it.
    fn polish(&mut self) {
        if self.pool.len() < 2 {
            return;
        }
        let cols: Vec<Vec<f64>> = self.pool.iter().map(|(_, c)| c.clone()).collect();
        let (value, theta, y) = solve_game(&cols);
        if value > self.primal {
            self.primal = value;
            let q = self.a[0].len();
            let mut v = CMatrix::zeros(q, q);
            for ((u, _), th) in self.pool.iter().zip(theta) {
                v.gerc(Complex64::new(th, 0.0), u, u, Complex64::new(1.0, 0.0));
            }
            self.best_v = v;
        }
        self.visit(&y);
    }

    /// Barrier method on `min lambda  s.t.  lambda I - sum_n w_n A_n > 0, w in simplex`.
    /// On the central path `V = mu (lambda I - M(w))^-1` has unit trace and is the
    /// primal estimate. Returns the number of Newton steps taken.
    fn refine(&mut self, tol: f64) -> usize {
        let (q, n) = (self.a[0].len(), self.a.len());
        let amat = CMatrix::from_columns(self.a);
        let mut w: Vec<f64> = vec![1.0 / n as f64; n];
        let mut lam = 1.1 * top_eigenpair(&weighted_sum(self.a, &w)).0 + 1e-3;
        let mut mu = lam / (q + n) as f64;
        let mut steps = 0;
        // Barrier objective, infinite outside the domain.
        let merit = |lam: f64, w: &[f64], mu: f64| -> f64 {
            if w.iter().any(|&x| x <= 0.0) {
                return f64::INFINITY;
            }
            let z = CMatrix::identity(q, q) * Complex64::new(lam, 0.0) - weighted_sum(self.a, w);
            match hpd_cholesky(z) {
                Some(c) => {
                    let logdet: f64 = (0..q).map(|i| 2.0 * c.l_dirty()[(i, i)].re.ln()).sum();
                    lam / mu - logdet - w.iter().map(|x| x.ln()).sum::<f64>()
                }
                None => f64::INFINITY,
            }
        };
        for _ in 0..60 {
            for _ in 0..50 {
                let z = CMatrix::identity(q, q) * Complex64::new(lam, 0.0) - weighted_sum(self.a, &w);
                let Some(chol) = hpd_cholesky(z) else { return steps };
                steps += 1;
                let sinv = chol.inverse();
                let sa = &sinv * &amat;
                let cross = amat.adjoint() * &sa;
                let qn: Vec<f64> = (0..n).map(|i| cross[(i, i)].re).collect();
                let s2a: Vec<f64> = (0..n).map(|i| sa.column(i).norm_squared()).collect();
                let tr_s = sinv.trace().re;
                let tr_s2 = sinv.norm_squared();
                // Newton system on (lambda, w) with the constraint sum w = 1.
                let dim = n + 2;
                let mut kkt = DMatrix::<f64>::zeros(dim, dim);
                let mut rhs = DVector::<f64>::zeros(dim);
                kkt[(0, 0)] = tr_s2;
                rhs[0] = -(1.0 / mu - tr_s);
                for i in 0..n {
                    kkt[(0, i + 1)] = -s2a[i];
                    kkt[(i + 1, 0)] = -s2a[i];
                    for j in 0..n {
                        kkt[(i + 1, j + 1)] = cross[(i, j)].norm_sqr();
                    }
                    kkt[(i + 1, i + 1)] += 1.0 / (w[i] * w[i]);
                    kkt[(i + 1, n + 1)] = 1.0;
                    kkt[(n + 1, i + 1)] = 1.0;
                    rhs[i + 1] = -(qn[i] - 1.0 / w[i]);
                }
                // Solve in the relative coordinates dw_i / w_i; the 1 / w_i^2
                // barrier terms otherwise ruin the conditioning near the boundary.
                let mut d = DVector::<f64>::from_element(dim, 1.0);
                d.rows_mut(1, n).copy_from(&DVector::from_column_slice(&w));
                let scaled = DMatrix::from_fn(dim, dim, |i, j| d[i] * kkt[(i, j)] * d[j]);
                let Some(y) = scaled.lu().solve(&rhs.component_mul(&d)) else { return steps };
                let dx = y.component_mul(&d);
                let decrement: f64 = (0..=n).map(|i| rhs[i] * dx[i]).sum();
                if decrement < 2e-10 {
                    break;
                }
                let f0 = merit(lam, &w, mu);
                let mut step = 1.0;
                loop {
                    let trial: Vec<f64> = w.iter().enumerate().map(|(i, x)| x + step * dx[i + 1]).collect();
                    if merit(lam + step * dx[0], &trial, mu) <= f0 - 0.25 * step * decrement {
                        lam += step * dx[0];
                        w = trial;
                        break;
                    }
                    step *= 0.5;
                    if step < 1e-12 {
                        return steps;
                    }
                }
            }
            let z = CMatrix::identity(q, q) * Complex64::new(lam, 0.0) - weighted_sum(self.a, &w);
            if let Some(chol) = hpd_cholesky(z) {
                let v = hermitize(&chol.inverse());
                let value = self.a.iter().map(|an| quad_form(&v, an)).fold(f64::INFINITY, f64::min);
                if value > self.primal {
                    self.primal = value;
                    self.best_v = v;
                }
            }
            let top = top_eigenpair(&weighted_sum(self.a, &w)).0;
            if top < self.dual {
                self.dual = top;
                self.best_w.clone_from(&w);
            }
            if (self.dual - self.primal) / self.dual <= tol {
                break;
            }
            mu /= 8.0;
        }
        steps
    }
}

pub fn solve_maxmin(inst: &MaxMinInstance) -> Result<MaxMinSolution> {
    let q = inst.check()?;
    let n = inst.payoffs.len();
    let scale = inst.payoffs.iter().map(|a| a.norm_squared()).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Ok(MaxMinSolution {
            v: CMatrix::identity(q, q) / Complex64::new(q as f64, 0.0),
            xi_csi: 0.0,
            dual_bound: 0.0,
            dual_weights: vec![1.0 / n as f64; n],
            gap: 0.0,
            iterations: 0,
            newton_steps: 0,
            converged: true,
        });
    }
    let a: Vec<CVector> = inst.payoffs.iter().map(|x| x / Complex64::new(scale.sqrt(), 0.0)).collect();
    let mut search = Search {
        a: &a,
        dual: f64::INFINITY,
        best_w: Vec::new(),
        primal: f64::NEG_INFINITY,
        best_v: CMatrix::zeros(q, q),
        pool: Vec::new(),
    };
    let mut w = vec![1.0 / n as f64; n];
    let mut window = vec![0.0; n];
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let cap = inst.max_iterations.clamp(1, MIRROR_BUDGET);

    for t in 1..=cap {
        iterations = t;
        let (lam, g) = search.visit(&w);
        window.iter_mut().zip(&w).for_each(|(s, x)| *s += x);
        if t % POLISH_EVERY == 0 || t == cap {
            let total: f64 = window.iter().sum();
            let avg: Vec<f64> = window.iter().map(|s| s / total).collect();
            window.iter_mut().for_each(|s| *s = 0.0);
            search.visit(&avg);
            search.polish();
        }
        let (dual, primal) = (search.dual, search.primal);
        debug_assert!(dual >= primal * (1.0 - 1e-9), "weak duality violated: {dual} < {primal}");

        gap = (dual - primal) / dual;
        if gap <= inst.tolerance {
            break;
        }
        let eta = STEP_SCALE / ((t as f64).sqrt() * lam);
        // Shifting by the smallest payoff keeps every factor in (0, 1].
        let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
        let mut total = 0.0;
        for (wn, gn) in w.iter_mut().zip(&g) {
            *wn *= (-eta * (gn - gmin)).exp();
            total += *wn;
        }
        w.iter_mut().for_each(|x| *x /= total);
    }
    let newton_steps = if gap > inst.tolerance { search.refine(inst.tolerance) } else { 0 };
    gap = ((search.dual - search.primal) / search.dual).max(0.0);
    log::debug!("max-min N = {n}, Q = {q}: {iterations} mirror steps, {newton_steps} Newton steps, gap {gap:.2e}");

    let v = hermitize(&search.best_v);
    Ok(MaxMinSolution {
        xi_csi: inst.payoffs.iter().map(|an| quad_form(&v, an)).fold(f64::INFINITY, f64::min),
        v,
        dual_bound: search.dual * scale,
        dual_weights: search.best_w,
        gap: gap.max(0.0),
        iterations,
        newton_steps,
        converged: gap <= inst.tolerance,
    })
}

/// Exhaustive search over all 2x2 trace-one PSD matrices
/// `V = (I + r_x X + r_y Y + r_z Z) / 2`, `|r| <= 1`, with iterative grid refinement.
pub fn brute_force_maxmin(inst: &MaxMinInstance) -> Result<(f64, CMatrix)> {
    let q = inst.check()?;
    if q != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: q });
    }
    // tr(V A) = (tr A + r . s) / 2 with s = (2 Re A12, -2 Im A12, A11 - A22).
    let terms: Vec<(f64, [f64; 3])> = inst
        .payoffs
        .iter()
        .map(|a| {
            let a12 = a[0] * a[1].conj();
            let (a11, a22) = (a[0].norm_sqr(), a[1].norm_sqr());
            (a11 + a22, [2.0 * a12.re, -2.0 * a12.im, a11 - a22])
        })
        .collect();
    let value = |r: [f64; 3]| {
        terms.iter().map(|(t, s)| 0.5 * (t + r[0] * s[0] + r[1] * s[1] + r[2] * s[2])).fold(f64::INFINITY, f64::min)
    };
    let project = |mut r: [f64; 3]| {
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if norm > 1.0 {
            r.iter_mut().for_each(|x| *x /= norm);
        }
        r
    };

    let mut centre = [0.0; 3];
    let mut half = 1.0;
    let mut best = (value(centre), centre);
    for pass in 0..40 {
        let steps: i32 = if pass == 0 { 40 } else { 10 };
        for i in -steps..=steps {
            for j in -steps..=steps {
                for k in -steps..=steps {
                    let h = half / steps as f64;
                    let r = project([centre[0] + i as f64 * h, centre[1] + j as f64 * h, centre[2] + k as f64 * h]);
                    let v = value(r);
                    if v > best.0 {
                        best = (v, r);
                    }
                }
            }
        }
        centre = best.1;
        half *= if pass == 0 { 0.1 } else { 0.3 };
        if half < 1e-12 {
            break;
        }
    }
    let r = best.1;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let v = CMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + r[2]), 0.0),
            c(0.5 * r[0], -0.5 * r[1]),
            c(0.5 * r[0], 0.5 * r[1]),
            c(0.5 * (1.0 - r[2]), 0.0),
        ],
    );
    Ok((best.0, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(xs: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(xs.len(), xs.iter().map(|&(r, i)| Complex64::new(r, i)))
    }

    #[test]
    fn single_sensor_is_mrt() {
        let h = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        let inst = MaxMinInstance::from_channels(&[&h], 1.0, &[1.0]);
        let s = solve_maxmin(&inst).unwrap();
        assert!((s.xi_csi - 2.0).abs() < 1e-9);
        for i in 0..2 {
            for j in 0..2 {
                assert!((s.v[(i, j)] - Complex64::new(0.5, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn orthogonal_pair_splits_evenly() {
        let inst = MaxMinInstance::new(vec![cv(&[(1.0, 0.0), (0.0, 0.0)]), cv(&[(0.0, 0.0), (1.0, 0.0)])]);
        let s = solve_maxmin(&inst).unwrap();
        assert!((s.xi_csi - 0.5).abs() < 1e-4, "{}", s.xi_csi);
        assert!((s.v[(0, 0)].re - 0.5).abs() < 1e-3 && s.v[(0, 1)].norm() < 1e-3);
        let (b, _) = brute_force_maxmin(&inst).unwrap();
        assert!((b - 0.5).abs() < 1e-9);
    }

    #[test]
    fn game_matches_hand_solution() {
        // Matching pennies, and a dominated column that must get zero weight.
        let (v, theta, y) = solve_game(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!((v - 0.5).abs() < 1e-12 && (theta[0] - 0.5).abs() < 1e-12 && (y[1] - 0.5).abs() < 1e-12);
        let (v, theta, _) = solve_game(&[vec![0.9, 0.8], vec![0.2, 0.3], vec![0.85, 0.85]]);
        assert!((v - 0.85).abs() < 1e-12 && theta[1] < 1e-12, "{v} {theta:?}");
    }

    #[test]
    fn brute_force_single_sensor() {
        let a = cv(&[(0.3, -1.2), (0.7, 0.4)]);
        let (b, v) = brute_force_maxmin(&MaxMinInstance::new(vec![a.clone()])).unwrap();
        assert!((b / a.norm_squared() - 1.0).abs() < 1e-9);
        assert!((v.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn brute_force_rejects_other_sizes() {
        let inst = MaxMinInstance::new(vec![cv(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)])]);
        assert!(brute_force_maxmin(&inst).is_err());
    }
}
