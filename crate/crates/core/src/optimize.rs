//! Derivative-free scalar optimization on compact intervals.
//!
//! Every search is a coarse grid scan that brackets the best grid point,
//! followed by golden-section refinement inside the bracket. For
//! quasi-concave objectives (quasi-convex when minimizing) the bracket
//! contains the optimum. Flat optima resolve to the smallest argument.

use crate::error::{GameError, Result};
use crate::game::Interval;
use crate::scalar::Scalar;

/// Grid points used to bracket the optimum before golden-section refinement.
pub const BRACKET_POINTS: usize = 64;

/// Points in the dense grid used by [`diagnose`].
pub const DIAGNOSTIC_POINTS: usize = 10_001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptResult<T> {
    pub arg: T,
    pub value: T,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sense {
    Max,
    Min,
}

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F> Counted<F> {
    fn eval<T: Scalar>(&mut self, x: T, sense: Sense) -> Result<T>
    where
        F: FnMut(T) -> Result<T>,
    {
        self.evaluations += 1;
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(GameError::Evaluation { at: x.as_f64() });
        }
        // searches always maximize internally
        Ok(match sense {
            Sense::Max => v,
            Sense::Min => -v,
        })
    }
}

fn better<T: Scalar>(cand: (T, T), best: (T, T)) -> bool {
    cand.1 > best.1 || (cand.1 == best.1 && cand.0 < best.0)
}

fn search<T, F>(objective: F, domain: Interval<T>, tol: T, sense: Sense) -> Result<OptResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    if !(tol > T::zero()) {
        return Err(GameError::invalid("optimizer tolerance must be positive"));
    }
    let mut f = Counted { f: objective, evaluations: 0 };

    let grid: Vec<T> = domain.grid(BRACKET_POINTS).collect();
    let mut best_k = 0;
    let mut best = (grid[0], f.eval(grid[0], sense)?);
    for (k, &x) in grid.iter().enumerate().skip(1) {
        let v = f.eval(x, sense)?;
        if v > best.1 {
            best = (x, v);
            best_k = k;
        }
    }

    let mut a = grid[best_k.saturating_sub(1)];
    let mut b = grid[(best_k + 1).min(grid.len() - 1)];
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f.eval(c, sense)?;
    let mut fd = f.eval(d, sense)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f.eval(c, sense)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f.eval(d, sense)?;
        }
        // bracket stopped shrinking in floating point
        if c >= d {
            break;
        }
    }
    for cand in [(c, fc), (d, fd)] {
        if better(cand, best) {
            best = cand;
        }
    }
    let mid = a + (b - a) / T::lit(2.0);
    let mid_val = f.eval(mid, sense)?;
    if better((mid, mid_val), best) {
        best = (mid, mid_val);
    }

    Ok(OptResult {
        arg: best.0,
        value: match sense {
            Sense::Max => best.1,
            Sense::Min => -best.1,
        },
        evaluations: f.evaluations,
    })
}

/// Maximizes a quasi-concave objective over `domain`.
pub fn maximize<T: Scalar>(objective: impl Fn(T) -> T, domain: Interval<T>, tol: T) -> Result<OptResult<T>> {
    search(|x| Ok(objective(x)), domain, tol, Sense::Max)
}

/// Minimizes a quasi-convex objective over `domain`.
pub fn minimize<T: Scalar>(objective: impl Fn(T) -> T, domain: Interval<T>, tol: T) -> Result<OptResult<T>> {
    search(|x| Ok(objective(x)), domain, tol, Sense::Min)
}

/// [`maximize`] for objectives whose evaluation can fail.
pub fn try_maximize<T, F>(objective: F, domain: Interval<T>, tol: T) -> Result<OptResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    search(objective, domain, tol, Sense::Max)
}

/// [`minimize`] for objectives whose evaluation can fail.
pub fn try_minimize<T, F>(objective: F, domain: Interval<T>, tol: T) -> Result<OptResult<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    search(objective, domain, tol, Sense::Min)
}

/// `max_x min_y objective(x, y)`; the reported arg is the outer maximizer.
pub fn max_min<T: Scalar>(
    objective: impl Fn(T, T) -> T,
    x_domain: Interval<T>,
    y_domain: Interval<T>,
    tol: T,
) -> Result<OptResult<T>> {
    try_max_min(|x, y| Ok(objective(x, y)), x_domain, y_domain, tol)
}

/// `min_y max_x objective(x, y)`; the reported arg is the outer minimizer.
pub fn min_max<T: Scalar>(
    objective: impl Fn(T, T) -> T,
    x_domain: Interval<T>,
    y_domain: Interval<T>,
    tol: T,
) -> Result<OptResult<T>> {
    try_min_max(|x, y| Ok(objective(x, y)), x_domain, y_domain, tol)
}

pub fn try_max_min<T, F>(objective: F, x_domain: Interval<T>, y_domain: Interval<T>, tol: T) -> Result<OptResult<T>>
where
    T: Scalar,
    F: Fn(T, T) -> Result<T>,
{
    let mut inner_evals = 0;
    let mut outer = try_maximize(
        |x| {
            let inner = try_minimize(|y| objective(x, y), y_domain, tol)?;
            inner_evals += inner.evaluations;
            Ok(inner.value)
        },
        x_domain,
        tol,
    )?;
    outer.evaluations += inner_evals;
    Ok(outer)
}

pub fn try_min_max<T, F>(objective: F, x_domain: Interval<T>, y_domain: Interval<T>, tol: T) -> Result<OptResult<T>>
where
    T: Scalar,
    F: Fn(T, T) -> Result<T>,
{
    let mut inner_evals = 0;
    let mut outer = try_minimize(
        |y| {
            let inner = try_maximize(|x| objective(x, y), x_domain, tol)?;
            inner_evals += inner.evaluations;
            Ok(inner.value)
        },
        y_domain,
        tol,
    )?;
    outer.evaluations += inner_evals;
    Ok(outer)
}

/// Golden-section result checked against a dense grid scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostic<T> {
    pub refined: OptResult<T>,
    pub grid_arg: T,
    pub grid_value: T,
    /// True when the grid found a value better than the refined optimum by
    /// more than `10 * tol`: the objective is likely not quasi-concave.
    pub warn: bool,
}

/// Runs [`maximize`] and a [`DIAGNOSTIC_POINTS`]-point grid scan side by side.
pub fn diagnose<T: Scalar>(objective: impl Fn(T) -> T, domain: Interval<T>, tol: T) -> Result<Diagnostic<T>> {
    let refined = maximize(&objective, domain, tol)?;
    let mut grid_best = (domain.lo(), T::neg_infinity());
    for x in domain.grid(DIAGNOSTIC_POINTS) {
        let v = objective(x);
        if v > grid_best.1 {
            grid_best = (x, v);
        }
    }
    Ok(Diagnostic {
        refined,
        grid_arg: grid_best.0,
        grid_value: grid_best.1,
        warn: grid_best.1 - refined.value > T::lit(10.0) * tol,
    })
}
