use super::{check_points, distinct_x, FitError, FitOptions, FitResult, FitWarning, Model};
use crate::scalar::Real;

/// `y = d + (a - d) / (1 + (x/c)^b)`: `a` is the value at `x = 0`, `d` the
/// far asymptote, `c` the inflection point and `b` the Hill slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourPl<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

const EXP_CLAMP: f64 = 700.0;

impl<T: Real> FourPl<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn eval(&self, x: T) -> Result<T, FitError> {
        eval_4pl(self, x)
    }
}

fn clamp_exponent<T: Real>(s: T) -> T {
    let lim = T::of(EXP_CLAMP);
    s.max(-lim).min(lim)
}

fn logistic<T: Real>(s: T) -> T {
    if s >= T::zero() {
        T::one() / (T::one() + (-s).exp())
    } else {
        let e = s.exp();
        e / (T::one() + e)
    }
}

pub fn eval_4pl<T: Real>(model: &FourPl<T>, x: T) -> Result<T, FitError> {
    if x < T::zero() {
        return Err(FitError::NegativeX(x.as_f64()));
    }
    if x == T::zero() {
        if model.b <= T::zero() {
            return Err(FitError::UndefinedAtZero);
        }
        return Ok(model.a);
    }
    let u = clamp_exponent(model.b * (x / model.c).ln()).exp();
    Ok(model.d + (model.a - model.d) / (T::one() + u))
}

/// Least-squares 4PL fit.
///
/// For fixed `(b, c)` the model is linear in `a` and `d`, so those two are
/// solved exactly and Levenberg-Marquardt runs over `(ln b, ln c)` alone on
/// the projected residual. Starts cover `b ∈ {0.5, 1, 2, 5}` crossed with
/// multiples of the median x; the lowest-RSS result wins, ties going to the
/// earlier start.
pub fn fit_4pl<T: Real>(points: &[(T, T)], options: &FitOptions) -> Result<FitResult<T>, FitError> {
    options.validate()?;
    check_points(points, 4)?;
    if let Some(&(x, _)) = points.iter().find(|p| p.0 < T::zero()) {
        return Err(FitError::NegativeX(x.as_f64()));
    }
    if distinct_x(points) < 2 {
        return Err(FitError::DegenerateX);
    }
    let xs: Vec<T> = points.iter().map(|p| p.0).collect();
    let ys: Vec<T> = points.iter().map(|p| p.1).collect();
    let x_max = xs.iter().fold(T::zero(), |m, &x| m.max(x));
    if x_max == T::zero() {
        return Err(FitError::DegenerateX);
    }

    let bounds = Bounds {
        lnb: (T::of(options.b_bounds.0.ln()), T::of(options.b_bounds.1.ln())),
        lnc: (
            T::of(options.c_min.ln()),
            (x_max * T::of(options.c_max_factor)).max(T::of(options.c_min)).ln(),
        ),
    };
    let problem = Problem { xs: &xs, ys: &ys };

    let mut best: Option<Candidate<T>> = None;
    let mut any_converged = false;
    for (b0, c0) in starts(&xs, options.multistart_count) {
        let theta = bounds.clamp([T::of(b0.ln()), c0.ln()]);
        let mut cand = problem.levenberg_marquardt(theta, &bounds, options);
        any_converged |= cand.converged;
        // rank on the RSS that will be reported
        cand.rss = points
            .iter()
            .map(|&(x, y)| cand.model.eval(x).map(|p| (p - y) * (p - y)))
            .sum::<Result<T, _>>()?;
        if best.as_ref().is_none_or(|b| cand.rss < b.rss) {
            best = Some(cand);
        }
    }
    let best = best.expect("at least one start");
    let mut warnings = Vec::new();
    if bounds.touches(best.theta) {
        warnings.push(FitWarning::AtBound);
    }
    FitResult::assemble(
        Model::FourPl(best.model),
        points,
        any_converged,
        best.iterations,
        warnings,
    )
}

fn starts<T: Real>(xs: &[T], count: usize) -> Vec<(f64, T)> {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let x_max = sorted[sorted.len() - 1];
    let median = match sorted[sorted.len() / 2] {
        m if m > T::zero() => m,
        _ => x_max / T::of(2.0),
    };
    const SLOPES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
    const SCALES: [f64; 8] = [1.0, 0.5, 2.0, 0.25, 4.0, 10.0, 0.1, 100.0];
    let mut out = Vec::with_capacity(count);
    'outer: for round in 0.. {
        for &s in &SCALES {
            for &b in &SLOPES {
                if out.len() == count {
                    break 'outer;
                }
                out.push((b, median * T::of(s * 10f64.powi(round))));
            }
        }
    }
    out
}

struct Bounds<T> {
    lnb: (T, T),
    lnc: (T, T),
}

impl<T: Real> Bounds<T> {
    fn clamp(&self, t: [T; 2]) -> [T; 2] {
        [t[0].max(self.lnb.0).min(self.lnb.1), t[1].max(self.lnc.0).min(self.lnc.1)]
    }

    /// Whether each coordinate may move given gradient `g` of ½RSS.
    fn free(&self, t: [T; 2], g: [T; 2]) -> [bool; 2] {
        let eps = T::of(1e-12);
        let one = |v: T, (lo, hi): (T, T), g: T| !((v - lo <= eps && g > T::zero()) || (hi - v <= eps && g < T::zero()));
        [one(t[0], self.lnb, g[0]), one(t[1], self.lnc, g[1])]
    }

    fn touches(&self, t: [T; 2]) -> bool {
        let eps = T::of(1e-9);
        (t[0] - self.lnb.0).abs() < eps
            || (t[0] - self.lnb.1).abs() < eps
            || (t[1] - self.lnc.0).abs() < eps
            || (t[1] - self.lnc.1).abs() < eps
    }
}

struct Candidate<T> {
    model: FourPl<T>,
    theta: [T; 2],
    rss: T,
    iterations: usize,
    converged: bool,
}

struct Problem<'a, T> {
    xs: &'a [T],
    ys: &'a [T],
}

/// Linear part of the fit at one `(b, c)`.
struct Projection<T> {
    model: FourPl<T>,
    residual: Vec<T>,
    rss: T,
    /// Orthonormal basis of span{1, h}; second vector absent when h is constant.
    basis: Vec<Vec<T>>,
    /// `h` and its derivatives with respect to ln b and ln c.
    dh: [Vec<T>; 2],
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

impl<T: Real> Problem<'_, T> {
    fn project(&self, theta: [T; 2]) -> Projection<T> {
        let (b, c) = (theta[0].exp(), theta[1].exp());
        let n = self.xs.len();
        let mut h = Vec::with_capacity(n);
        let mut dlnb = Vec::with_capacity(n);
        let mut dlnc = Vec::with_capacity(n);
        for &x in self.xs {
            if x == T::zero() {
                h.push(T::zero());
                dlnb.push(T::zero());
                dlnc.push(T::zero());
                continue;
            }
            let log_ratio = (x / c).ln();
            let s = clamp_exponent(b * log_ratio);
            let hv = logistic(s);
            let slope = hv * (T::one() - hv);
            h.push(hv);
            dlnb.push(slope * b * log_ratio);
            dlnc.push(-slope * b);
        }

        let nt = T::of_usize(n);
        let q0 = vec![T::one() / nt.sqrt(); n];
        let h_mean = h.iter().copied().sum::<T>() / nt;
        let centred: Vec<T> = h.iter().map(|&v| v - h_mean).collect();
        let norm = dot(&centred, &centred).sqrt();
        let y_mean = self.ys.iter().copied().sum::<T>() / nt;

        let mut basis = vec![q0];
        let (a, d) = if norm > T::epsilon() * nt {
            let q1: Vec<T> = centred.iter().map(|&v| v / norm).collect();
            // y ≈ alpha + beta·h
            let beta = dot(&q1, self.ys) / norm;
            let alpha = y_mean - beta * h_mean;
            basis.push(q1);
            (alpha, alpha + beta)
        } else {
            (y_mean, y_mean)
        };
        let model = FourPl { a, b, c, d };
        let residual: Vec<T> = self
            .xs
            .iter()
            .zip(&h)
            .zip(self.ys)
            .map(|((_, &hv), &y)| a + (d - a) * hv - y)
            .collect();
        let rss = dot(&residual, &residual);
        Projection {
            model,
            residual,
            rss,
            basis,
            dh: [dlnb, dlnc],
        }
    }

    /// Jacobian of the projected residual, `P⊥ (d - a) ∂h/∂θ`.
    fn jacobian(&self, p: &Projection<T>) -> [Vec<T>; 2] {
        let amp = p.model.d - p.model.a;
        let col = |dh: &[T]| {
            let mut v: Vec<T> = dh.iter().map(|&g| amp * g).collect();
            for q in &p.basis {
                let k = dot(q, &v);
                for (vi, &qi) in v.iter_mut().zip(q) {
                    *vi = *vi - k * qi;
                }
            }
            v
        };
        [col(&p.dh[0]), col(&p.dh[1])]
    }

    fn levenberg_marquardt(&self, theta0: [T; 2], bounds: &Bounds<T>, options: &FitOptions) -> Candidate<T> {
        let tol = T::of(options.tolerance);
        let tiny = T::min_positive_value().sqrt();
        let mut theta = theta0;
        let mut cur = self.project(theta);
        let mut lambda = T::of(1e-3);
        let mut converged = false;
        let mut iterations = 0;

        while iterations < options.max_iterations {
            iterations += 1;
            if cur.rss <= tiny {
                converged = true;
                break;
            }
            let [j0, j1] = self.jacobian(&cur);
            let g = [dot(&j0, &cur.residual), dot(&j1, &cur.residual)];
            let (a00, a01, a11) = (dot(&j0, &j0), dot(&j0, &j1), dot(&j1, &j1));
            if a00 + a11 <= tiny {
                converged = true;
                break;
            }

            // coordinates pinned at a bound with the gradient pushing outward stay fixed
            let free = bounds.free(theta, g);
            if !free[0] && !free[1] {
                converged = true;
                break;
            }
            let mut accepted = false;
            while lambda < T::of(1e16) {
                let m00 = a00 + lambda * a00.max(tiny);
                let m11 = a11 + lambda * a11.max(tiny);
                let step = match free {
                    [true, true] => {
                        let det = m00 * m11 - a01 * a01;
                        (det > T::zero())
                            .then(|| [(-g[0] * m11 + g[1] * a01) / det, (-g[1] * m00 + g[0] * a01) / det])
                    }
                    [true, false] => Some([-g[0] / m00, T::zero()]),
                    _ => Some([T::zero(), -g[1] / m11]),
                };
                if let Some(step) = step {
                    let trial_theta = bounds.clamp([theta[0] + step[0], theta[1] + step[1]]);
                    let trial = self.project(trial_theta);
                    if trial.rss.is_finite() && trial.rss < cur.rss {
                        let change = (cur.rss - trial.rss) / cur.rss;
                        let moved = (trial_theta[0] - theta[0]).abs() + (trial_theta[1] - theta[1]).abs();
                        theta = trial_theta;
                        cur = trial;
                        lambda = (lambda / T::of(3.0)).max(T::of(1e-12));
                        accepted = true;
                        if change < tol || moved < tol {
                            converged = true;
                        }
                        break;
                    }
                }
                lambda = lambda * T::of(4.0);
            }
            if !accepted {
                // no descent direction left at any damping: a stationary point
                converged = true;
                break;
            }
            if converged {
                break;
            }
        }
        Candidate {
            model: cur.model,
            theta,
            rss: cur.rss,
            iterations,
            converged,
        }
    }
}
