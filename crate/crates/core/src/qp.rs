//! Small dense convex quadratic programs
//! `min 1/2 z'Hz + g'z  subject to  A z <= b`
//! solved by a primal active-set method.
//!
//! The working set always holds linearly independent rows. On each working
//! set the step is the Newton step on the positive-curvature part of the
//! reduced Hessian; when the reduced gradient has a component along a
//! zero-curvature direction the method follows that descent ray instead, so
//! singular Hessians and plain linear programs are handled by the same loop.
//! Entering and leaving constraints are chosen by smallest index among the
//! candidates (Bland's rule), which rules out cycling on degenerate vertices.

use nalgebra::{DMatrix, DVector};

use crate::geom::null_space;

/// Problem data; `h` must be symmetric positive semidefinite.
#[derive(Debug, Clone)]
pub struct QuadProgram {
    pub h: DMatrix<f64>,
    pub g: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

/// An optimal point with its working set and multipliers.
#[derive(Debug, Clone)]
pub struct QpSolution {
    pub z: DVector<f64>,
    pub objective: f64,
    /// Working set at the optimum (constraint indices, ascending).
    pub active: Vec<usize>,
    /// Multipliers aligned with `active`.
    pub multipliers: Vec<f64>,
    pub iterations: usize,
}

/// Result of [`solve`].
#[derive(Debug, Clone)]
pub enum QpOutcome {
    Optimal(QpSolution),
    /// No feasible point; `witness` lists constraints that are jointly
    /// infeasible and `violation` the smallest achievable maximal violation.
    Infeasible { witness: Vec<usize>, violation: f64 },
    Unbounded,
}

impl QuadProgram {
    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn objective(&self, z: &DVector<f64>) -> f64 {
        0.5 * z.dot(&(&self.h * z)) + self.g.dot(z)
    }

    fn slack(&self, i: usize, z: &DVector<f64>) -> f64 {
        self.b[i] - self.a.row(i).transpose().dot(z)
    }
}

enum Step {
    Stationary,
    Direction { d: DVector<f64>, ray: bool },
}

fn working_matrix(a: &DMatrix<f64>, work: &[usize], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(work.len(), n);
    for (r, &i) in work.iter().enumerate() {
        m.row_mut(r).copy_from(&a.row(i));
    }
    m
}

fn step(qp: &QuadProgram, z: &DVector<f64>, work: &[usize], tol: f64) -> Step {
    let n = qp.dim();
    let grad = &qp.h * z + &qp.g;
    let basis = if work.is_empty() {
        DMatrix::identity(n, n)
    } else {
        null_space(&working_matrix(&qp.a, work, n), 1e-12).0
    };
    if basis.ncols() == 0 {
        return Step::Stationary;
    }
    let hr = basis.transpose() * &qp.h * &basis;
    let gr = basis.transpose() * &grad;
    let eig = hr.symmetric_eigen();
    let hscale = eig.eigenvalues.amax().max(1.0);
    let mut newton = DVector::zeros(basis.ncols());
    let mut ray = DVector::zeros(basis.ncols());
    for k in 0..basis.ncols() {
        let v = eig.eigenvectors.column(k);
        let coef = v.dot(&gr);
        if eig.eigenvalues[k] > 1e-12 * hscale {
            newton -= v * (coef / eig.eigenvalues[k]);
        } else {
            ray -= v * coef;
        }
    }
    if ray.norm() > tol {
        return Step::Direction {
            d: &basis * ray,
            ray: true,
        };
    }
    let d = &basis * newton;
    if d.norm() <= tol {
        Step::Stationary
    } else {
        Step::Direction { d, ray: false }
    }
}

fn multipliers(qp: &QuadProgram, z: &DVector<f64>, work: &[usize]) -> Vec<f64> {
    if work.is_empty() {
        return Vec::new();
    }
    let n = qp.dim();
    let grad = &qp.h * z + &qp.g;
    let aw = working_matrix(&qp.a, work, n);
    let svd = aw.transpose().svd(true, true);
    let lambda = svd
        .solve(&(-grad), 1e-14)
        .unwrap_or_else(|_| DVector::zeros(work.len()));
    lambda.iter().copied().collect()
}

/// Runs the active-set loop from a feasible `z` with an initial working set.
fn active_set(qp: &QuadProgram, mut z: DVector<f64>, mut work: Vec<usize>, tol: f64) -> QpOutcome {
    let max_iter = 200 * (qp.a.nrows() + qp.dim() + 1);
    for iter in 0..max_iter {
        match step(qp, &z, &work, tol) {
            Step::Stationary => {
                let lambda = multipliers(qp, &z, &work);
                let leaving = work
                    .iter()
                    .zip(&lambda)
                    .filter(|(_, l)| **l < -tol)
                    .map(|(i, _)| *i)
                    .min();
                match leaving {
                    Some(i) => work.retain(|&j| j != i),
                    None => {
                        let mut pairs: Vec<(usize, f64)> = work.iter().copied().zip(lambda).collect();
                        pairs.sort_by_key(|p| p.0);
                        return QpOutcome::Optimal(QpSolution {
                            objective: qp.objective(&z),
                            active: pairs.iter().map(|p| p.0).collect(),
                            multipliers: pairs.iter().map(|p| p.1).collect(),
                            z,
                            iterations: iter,
                        });
                    }
                }
            }
            Step::Direction { d, ray } => {
                let mut alpha = if ray { f64::INFINITY } else { 1.0 };
                let mut blocking = None;
                for i in 0..qp.a.nrows() {
                    if work.contains(&i) {
                        continue;
                    }
                    let ad = qp.a.row(i).transpose().dot(&d);
                    if ad > tol * d.norm().max(1.0) * 1e-3 {
                        let ai = (qp.slack(i, &z) / ad).max(0.0);
                        if ai < alpha {
                            alpha = ai;
                            blocking = Some(i);
                        }
                    }
                }
                if alpha.is_infinite() {
                    return QpOutcome::Unbounded;
                }
                z += &d * alpha;
                if let Some(i) = blocking {
                    work.push(i);
                }
            }
        }
    }
    QpOutcome::Unbounded
}

/// Greedy selection of linearly independent constraints tight at `z`.
fn tight_set(qp: &QuadProgram, z: &DVector<f64>, tol: f64) -> Vec<usize> {
    let n = qp.dim();
    let mut work: Vec<usize> = Vec::new();
    for i in 0..qp.a.nrows() {
        if qp.slack(i, z).abs() > tol || work.len() == n {
            continue;
        }
        let mut trial = work.clone();
        trial.push(i);
        let (_, rank) = null_space(&working_matrix(&qp.a, &trial, n), 1e-9);
        if rank == trial.len() {
            work = trial;
        }
    }
    work
}

/// Solves from a known feasible starting point.
pub fn solve_from(qp: &QuadProgram, z0: DVector<f64>, tol: f64) -> QpOutcome {
    let work = tight_set(qp, &z0, tol);
    active_set(qp, z0, work, tol)
}

/// Finds a feasible point by minimizing the maximal violation, then solves.
pub fn solve(qp: &QuadProgram, tol: f64) -> QpOutcome {
    let n = qp.dim();
    let m = qp.a.nrows();
    if m == 0 {
        return active_set(qp, DVector::zeros(n), Vec::new(), tol);
    }
    // Phase one: min s subject to A z - s <= b, -s <= 0.
    let mut a1 = DMatrix::zeros(m + 1, n + 1);
    a1.view_mut((0, 0), (m, n)).copy_from(&qp.a);
    for i in 0..m {
        a1[(i, n)] = -1.0;
    }
    a1[(m, n)] = -1.0;
    let mut b1 = DVector::zeros(m + 1);
    b1.rows_mut(0, m).copy_from(&qp.b);
    let mut g1 = DVector::zeros(n + 1);
    g1[n] = 1.0;
    let phase1 = QuadProgram {
        h: DMatrix::zeros(n + 1, n + 1),
        g: g1,
        a: a1,
        b: b1,
    };
    let mut z1 = DVector::zeros(n + 1);
    z1[n] = qp.b.iter().map(|v| -v).fold(0.0, f64::max) + 1.0;
    let sol = match active_set(&phase1, z1, Vec::new(), tol) {
        QpOutcome::Optimal(s) => s,
        other => return other,
    };
    let violation = sol.z[n];
    if violation > tol {
        let witness = sol
            .active
            .iter()
            .zip(&sol.multipliers)
            .filter(|(i, l)| **i < m && **l > tol)
            .map(|(i, _)| *i)
            .collect();
        return QpOutcome::Infeasible { witness, violation };
    }
    let z0 = sol.z.rows(0, n).into_owned();
    solve_from(qp, z0, tol)
}
