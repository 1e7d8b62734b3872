use std::cmp::Ordering;

use super::{FitError, FitResult};
use crate::scalar::Real;

/// Fits ordered best first.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    /// Indices into the input slice.
    pub order: Vec<usize>,
    /// The top-ranked fit interpolates its data, so its AIC advantage
    /// reflects overfitting rather than a better model.
    pub overfit_warning: bool,
}

/// Rank by ascending AIC, then fewer parameters, then smaller RSS.
pub fn compare_models<T: Real>(fits: &[FitResult<T>]) -> Result<Ranking, FitError> {
    if fits.len() < 2 {
        return Err(FitError::TooFewPoints {
            needed: 2,
            found: fits.len(),
        });
    }
    if fits.iter().any(|f| f.points != fits[0].points) {
        return Err(FitError::MismatchedData);
    }
    let mut order: Vec<usize> = (0..fits.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&fits[i], &fits[j]);
        a.aic
            .as_f64()
            .total_cmp(&b.aic.as_f64())
            .then(a.k.cmp(&b.k))
            .then(a.rss.partial_cmp(&b.rss).unwrap_or(Ordering::Equal))
    });
    let overfit_warning = fits[order[0]].is_interpolating();
    Ok(Ranking { order, overfit_warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::{fit_4pl, fit_quartic, FitOptions, FourPl, Model};

    fn stub(aic: f64, k: usize, rss: f64) -> FitResult<f64> {
        FitResult {
            model: Model::FourPl(FourPl::new(0.0, 1.0, 1.0, 1.0)),
            points: vec![(0.0, 1.0)],
            rss,
            r_squared: 0.9,
            aic,
            k,
            n: 5,
            converged: true,
            iterations: 1,
            warnings: vec![],
        }
    }

    #[test]
    fn ordering_rules() {
        let r = compare_models(&[stub(-27.0, 4, 1.0), stub(-40.0, 4, 1.0)]).unwrap();
        assert_eq!(r.order, vec![1, 0]);
        let r = compare_models(&[stub(-5.0, 5, 1.0), stub(-5.0, 4, 1.0)]).unwrap();
        assert_eq!(r.order, vec![1, 0]);
        let r = compare_models(&[stub(-5.0, 4, 2.0), stub(-5.0, 4, 1.0)]).unwrap();
        assert_eq!(r.order, vec![1, 0]);
        assert!(!r.overfit_warning);
    }

    #[test]
    fn mismatched_data() {
        let mut other = stub(1.0, 4, 1.0);
        other.points = vec![(1.0, 1.0)];
        assert_eq!(compare_models(&[stub(0.0, 4, 1.0), other]), Err(FitError::MismatchedData));
        assert!(compare_models(&[stub(0.0, 4, 1.0)]).is_err());
    }

    #[test]
    fn interpolating_quartic_ranks_first_with_warning() {
        let pts = [(0.0, 0.701), (15.0, 0.729), (30.0, 0.874), (45.0, 1.297), (60.0, 1.541)];
        let q = fit_quartic(&pts).unwrap();
        let s = fit_4pl(&pts, &FitOptions::default()).unwrap();
        let r = compare_models(&[s, q]).unwrap();
        assert_eq!(r.order, vec![1, 0]);
        assert!(r.overfit_warning);
    }
}
