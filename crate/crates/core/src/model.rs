//! Discrete-time LPV state-space models with affine scheduling dependence.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, MatrixFamily, Result, ValidationIssue, ValidationReport};

/// A discrete-time linear parameter-varying state-space model
///
/// ```text
/// x(t+1) = A(p(t)) x(t) + B(p(t)) u(t)
/// y(t)   = C(p(t)) x(t)
/// ```
///
/// whose matrices depend affinely on the scheduling vector `p`:
///
/// ```text
/// A(p) = A_0 + A_1 p_1 + ... + A_{n_p} p_{n_p}
/// ```
///
/// and likewise for `B(p)` and `C(p)`. Index 0 holds the constant term, so each
/// coefficient list contains `n_p + 1` matrices. The state dimension may be
/// zero (the empty model is the fixed point of repeated reduction); the signal
/// dimensions `n_u`, `n_y` and the scheduling dimension `n_p` must be positive.
#[derive(Debug, Clone, PartialEq)]
pub struct LpvSsModel {
    n_x: usize,
    n_u: usize,
    n_y: usize,
    n_p: usize,
    a: Vec<DMatrix<f64>>,
    b: Vec<DMatrix<f64>>,
    c: Vec<DMatrix<f64>>,
}

fn check_family(
    report: &mut ValidationReport,
    family: MatrixFamily,
    mats: &[DMatrix<f64>],
    n_p: usize,
    expected: (usize, usize),
) {
    if mats.len() != n_p + 1 {
        report.push(ValidationIssue::MatrixListLength {
            family,
            expected: n_p + 1,
            got: mats.len(),
        });
    }
    for (index, m) in mats.iter().enumerate() {
        if m.shape() != expected {
            report.push(ValidationIssue::DimensionMismatch {
                family,
                index,
                expected,
                got: m.shape(),
            });
            continue;
        }
        for col in 0..m.ncols() {
            for row in 0..m.nrows() {
                if !m[(row, col)].is_finite() {
                    report.push(ValidationIssue::NonFiniteEntry {
                        family,
                        index,
                        row,
                        col,
                    });
                }
            }
        }
    }
}

impl LpvSsModel {
    /// Validate the given dimensions and coefficient lists and assemble a
    /// model. The report collects every defect found, not just the first.
    pub fn new(
        n_x: usize,
        n_u: usize,
        n_y: usize,
        n_p: usize,
        a: Vec<DMatrix<f64>>,
        b: Vec<DMatrix<f64>>,
        c: Vec<DMatrix<f64>>,
    ) -> std::result::Result<Self, ValidationReport> {
        let mut report = ValidationReport::default();
        for (name, value) in [("n_u", n_u), ("n_y", n_y), ("n_p", n_p)] {
            if value == 0 {
                report.push(ValidationIssue::ZeroDimension { name });
            }
        }
        if report.is_empty() {
            check_family(&mut report, MatrixFamily::A, &a, n_p, (n_x, n_x));
            check_family(&mut report, MatrixFamily::B, &b, n_p, (n_x, n_u));
            check_family(&mut report, MatrixFamily::C, &c, n_p, (n_y, n_x));
        }
        if report.is_empty() {
            Ok(Self {
                n_x,
                n_u,
                n_y,
                n_p,
                a,
                b,
                c,
            })
        } else {
            Err(report)
        }
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_u(&self) -> usize {
        self.n_u
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    /// State coefficients `A_0, ..., A_{n_p}`, each `n_x x n_x`.
    pub fn a(&self) -> &[DMatrix<f64>] {
        &self.a
    }

    /// Input coefficients `B_0, ..., B_{n_p}`, each `n_x x n_u`.
    pub fn b(&self) -> &[DMatrix<f64>] {
        &self.b
    }

    /// Output coefficients `C_0, ..., C_{n_p}`, each `n_y x n_x`.
    pub fn c(&self) -> &[DMatrix<f64>] {
        &self.c
    }

    fn check_scheduling(&self, p: &DVector<f64>, what: &str) -> Result<()> {
        if p.len() != self.n_p {
            return Err(Error::DimensionMismatch(format!(
                "{what} has {} components, model expects n_p = {}",
                p.len(),
                self.n_p
            )));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("{what} contains a non-finite component")));
        }
        Ok(())
    }

    fn eval_family(&self, mats: &[DMatrix<f64>], p: &DVector<f64>) -> DMatrix<f64> {
        let mut out = mats[0].clone();
        for (i, m) in mats.iter().enumerate().skip(1) {
            out += m * p[i - 1];
        }
        out
    }

    /// Evaluate `(A(p), B(p), C(p))` at one scheduling point.
    pub fn eval_matrices(
        &self,
        p: &DVector<f64>,
    ) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
        self.check_scheduling(p, "scheduling vector")?;
        Ok((
            self.eval_family(&self.a, p),
            self.eval_family(&self.b, p),
            self.eval_family(&self.c, p),
        ))
    }

    fn check_signals(&self, u: &[DVector<f64>], p: &[DVector<f64>]) -> Result<()> {
        if u.len() != p.len() {
            return Err(Error::DimensionMismatch(format!(
                "input sequence has {} samples, scheduling sequence has {}",
                u.len(),
                p.len()
            )));
        }
        for (t, ut) in u.iter().enumerate() {
            if ut.len() != self.n_u {
                return Err(Error::DimensionMismatch(format!(
                    "u({t}) has {} components, model expects n_u = {}",
                    ut.len(),
                    self.n_u
                )));
            }
            if ut.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("u({t}) contains a non-finite component")));
            }
        }
        for (t, pt) in p.iter().enumerate() {
            self.check_scheduling(pt, &format!("p({t})"))?;
        }
        Ok(())
    }

    /// Run the state recursion from `x0` over the given input and scheduling
    /// sequences (one sample per time step, equal lengths). The returned state
    /// sequence has one more entry than the signals: the state after the final
    /// update.
    pub fn simulate(
        &self,
        x0: &DVector<f64>,
        u: &[DVector<f64>],
        p: &[DVector<f64>],
    ) -> Result<Trajectory> {
        if x0.len() != self.n_x {
            return Err(Error::DimensionMismatch(format!(
                "x0 has {} components, model expects n_x = {}",
                x0.len(),
                self.n_x
            )));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("x0 contains a non-finite component".into()));
        }
        self.check_signals(u, p)?;

        let mut x = Vec::with_capacity(u.len() + 1);
        let mut y = Vec::with_capacity(u.len());
        x.push(x0.clone());
        for t in 0..u.len() {
            let (at, bt, ct) = self.eval_matrices(&p[t])?;
            y.push(&ct * &x[t]);
            x.push(&at * &x[t] + &bt * &u[t]);
        }
        Ok(Trajectory {
            u: u.to_vec(),
            p: p.to_vec(),
            x,
            y,
        })
    }

    /// Evaluate the output at time `t` for zero initial state directly from the
    /// impulse-response expansion
    ///
    /// ```text
    /// y(t) = sum_{m=1}^{t} C(p(t)) A(p(t-1)) ... A(p(t-m+1)) B(p(t-m)) u(t-m),
    /// ```
    ///
    /// computed with a single running product instead of one matrix chain per
    /// term. There is no feedthrough: the `m = 0` term is identically zero, so
    /// `y(0) = 0`.
    pub fn iir_response(
        &self,
        u: &[DVector<f64>],
        p: &[DVector<f64>],
        t: usize,
    ) -> Result<DVector<f64>> {
        self.check_signals(u, p)?;
        if t >= p.len() {
            return Err(Error::TimeOutOfRange { t, len: p.len() });
        }
        let mut y = DVector::zeros(self.n_y);
        // g holds C(p(t)) A(p(t-1)) ... A(p(t-m+1)) as m advances.
        let mut g = self.eval_family(&self.c, &p[t]);
        for m in 1..=t {
            y += &g * self.eval_family(&self.b, &p[t - m]) * &u[t - m];
            if m < t {
                g *= self.eval_family(&self.a, &p[t - m]);
            }
        }
        Ok(y)
    }
}

/// Signals produced by one simulation run: the inputs and scheduling sequences
/// that drove it, the visited states (one entry longer), and the outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub u: Vec<DVector<f64>>,
    pub p: Vec<DVector<f64>>,
    pub x: Vec<DVector<f64>>,
    pub y: Vec<DVector<f64>>,
}
