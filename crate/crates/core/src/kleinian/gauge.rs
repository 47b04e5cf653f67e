//! Neighbourhood bounds for quasi-geodesics avoiding a divergent region.

use num_traits::{Num, ToPrimitive};
use serde::Serialize;

use super::KleinianError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeBound<T> {
    /// Least sampled `R` with `f(R) ≥ K² + K`.
    pub r: T,
    /// `K C f(R) + K f(R) + K C + C`.
    pub d: T,
    /// `R + D`.
    pub bound: T,
}

/// Reads `R` off a sampled divergence profile `[(R, f(R))]` and returns the
/// resulting constants. Works over `f64` or exact rationals.
pub fn morse_gauge_bound<T>(profile: &[(T, T)], k: &T, c: &T) -> Result<GaugeBound<T>, KleinianError>
where
    T: Num + PartialOrd + Clone + ToPrimitive,
{
    if *k < T::one() || *c < T::zero() {
        return Err(KleinianError::Precondition("need K ≥ 1 and C ≥ 0".into()));
    }
    if profile.windows(2).any(|w| w[1].0 <= w[0].0 || w[1].1 < w[0].1) {
        return Err(KleinianError::Precondition("profile must be sampled at increasing R and nondecreasing".into()));
    }
    let need = k.clone() * k.clone() + k.clone();
    let (r, f) = profile
        .iter()
        .find(|(_, f)| *f >= need)
        .cloned()
        .ok_or_else(|| KleinianError::Range { required: need.to_f64().unwrap_or(f64::INFINITY) })?;
    let d = k.clone() * c.clone() * f.clone() + k.clone() * f + k.clone() * c.clone() + c.clone();
    Ok(GaugeBound { bound: r.clone() + d.clone(), r, d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_profile(n: usize) -> Vec<(f64, f64)> {
        (0..=n).map(|i| (i as f64, i as f64)).collect()
    }

    #[test]
    fn direct_substitution() {
        let f = identity_profile(50);
        assert_eq!(morse_gauge_bound(&f, &1.0, &0.0).unwrap(), GaugeBound { r: 2.0, d: 2.0, bound: 4.0 });
        assert_eq!(morse_gauge_bound(&f, &2.0, &1.0).unwrap(), GaugeBound { r: 6.0, d: 27.0, bound: 33.0 });
    }

    #[test]
    fn short_profile_is_a_range_error() {
        let f = identity_profile(5);
        assert_eq!(morse_gauge_bound(&f, &2.0, &1.0).unwrap_err(), KleinianError::Range { required: 6.0 });
    }

    #[test]
    fn rejects_decreasing_profile() {
        let f = vec![(0.0, 1.0), (1.0, 0.5)];
        assert!(matches!(morse_gauge_bound(&f, &1.0, &0.0), Err(KleinianError::Precondition(_))));
    }
}
