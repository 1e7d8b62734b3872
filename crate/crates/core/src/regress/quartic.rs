use super::{check_points, distinct_x, FitError, FitResult, Model};
use crate::scalar::Real;

/// `y = a + b·x + c·x² + d·x³ + e·x⁴`, coefficients stored degree 0 first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartic<T> {
    pub coefficients: [T; 5],
}

impl<T: Real> Quartic<T> {
    pub fn new(coefficients: [T; 5]) -> Self {
        Self { coefficients }
    }

    pub fn eval(&self, x: T) -> T {
        self.coefficients.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }
}

/// Least-squares quartic by Householder QR on the monomial basis. The
/// abscissae are scaled to `[-1, 1]` before factorising.
pub fn fit_quartic<T: Real>(points: &[(T, T)]) -> Result<FitResult<T>, FitError> {
    check_points(points, 5)?;
    if distinct_x(points) < 5 {
        return Err(FitError::DegenerateX);
    }
    let scale = points.iter().fold(T::zero(), |m, p| m.max(p.0.abs()));
    let n = points.len();
    // column-major n×5 design matrix
    let mut a: Vec<Vec<T>> = (0..5)
        .map(|k| points.iter().map(|p| (p.0 / scale).powi(k)).collect())
        .collect();
    let mut rhs: Vec<T> = points.iter().map(|p| p.1).collect();

    for k in 0..5 {
        let norm = a[k][k..].iter().map(|&v| v * v).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(FitError::DegenerateX);
        }
        let alpha = if a[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = a[k][k..].to_vec();
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2 > T::zero() {
            let reflect = |col: &mut [T]| {
                let s = T::of(2.0) * v.iter().zip(col.iter()).map(|(&x, &y)| x * y).sum::<T>() / vnorm2;
                for (c, &vi) in col.iter_mut().zip(&v) {
                    *c = *c - s * vi;
                }
            };
            for col in a.iter_mut().skip(k) {
                reflect(&mut col[k..]);
            }
            reflect(&mut rhs[k..]);
        }
    }

    let mut coef = [T::zero(); 5];
    for k in (0..5).rev() {
        let mut s = rhs[k];
        for j in k + 1..5 {
            s = s - a[j][k] * coef[j];
        }
        if a[k][k] == T::zero() {
            return Err(FitError::DegenerateX);
        }
        coef[k] = s / a[k][k];
    }
    for (k, c) in coef.iter_mut().enumerate() {
        *c = *c / scale.powi(k as i32);
    }
    debug_assert!(n >= 5);
    FitResult::assemble(Model::Quartic(Quartic::new(coef)), points, true, 1, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::FitWarning;

    #[test]
    fn eval_horner() {
        let q = Quartic::new([1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(q.eval(2.0), 1.0 + 4.0 + 12.0 + 32.0 + 80.0);
    }

    #[test]
    fn constant_data() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64 * 3.0, 1.25)).collect();
        let fit = fit_quartic(&pts).unwrap();
        let Model::Quartic(q) = fit.model else { panic!() };
        approx::assert_abs_diff_eq!(q.coefficients[0], 1.25, epsilon = 1e-12);
        for c in &q.coefficients[1..] {
            assert!(c.abs() < 1e-12);
        }
        assert!(fit.warnings.contains(&FitWarning::ConstantObservations));
    }

    #[test]
    fn collinear_points() {
        let pts: Vec<(f64, f64)> = [0.0, 15.0, 30.0, 45.0, 60.0].iter().map(|&x| (x, 0.5 + 0.02 * x)).collect();
        let fit = fit_quartic(&pts).unwrap();
        let Model::Quartic(q) = fit.model else { panic!() };
        for c in &q.coefficients[2..] {
            assert!(c.abs() < 1e-9);
        }
        approx::assert_abs_diff_eq!(q.coefficients[1], 0.02, epsilon = 1e-10);
    }

    #[test]
    fn five_points_interpolate() {
        let pts = [(0.0, 0.701), (15.0, 0.729), (30.0, 0.874), (45.0, 1.297), (60.0, 1.541)];
        let fit = fit_quartic(&pts).unwrap();
        assert!(fit.is_interpolating());
        assert_eq!(fit.aic, f64::NEG_INFINITY);
        assert!(fit.rss < 1e-9);
        approx::assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_repeated_x() {
        let pts = [(0.0, 1.0), (1.0, 2.0), (1.0, 2.5), (2.0, 3.0), (3.0, 1.0), (3.0, 1.0)];
        assert_eq!(fit_quartic(&pts).unwrap_err(), FitError::DegenerateX);
        assert!(matches!(fit_quartic(&pts[..4]), Err(FitError::TooFewPoints { .. })));
    }
}
