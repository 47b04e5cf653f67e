use serde::{Deserialize, Serialize};

use super::{SierpinskiError, STAGE_RATIO};

/// Constants of the quasi-arc condition: whenever `d(x, y) < s ι` the
/// subarc between `x` and `y` has diameter below `S ι`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiArcParams {
    pub s: f64,
    #[serde(rename = "S")]
    pub big_s: f64,
    /// Comparison tolerance for sampled geometry.
    pub eps: f64,
}

impl Default for QuasiArcParams {
    fn default() -> Self {
        Self { s: 0.5, big_s: 8.0, eps: 1e-6 }
    }
}

impl QuasiArcParams {
    /// Scale ratio between stages.
    pub fn delta(&self) -> f64 {
        1.0 / STAGE_RATIO
    }

    pub fn validate(&self) -> Result<(), SierpinskiError> {
        if !(self.s > 0.0 && self.big_s > self.s && self.eps > 0.0) {
            return Err(SierpinskiError::Precondition(format!("need 0 < s < S and eps > 0, got s = {}, S = {}, eps = {}", self.s, self.big_s, self.eps)));
        }
        let bound = (self.s / (4.0 + 2.0 * self.big_s)).min(0.1);
        if self.delta() > bound {
            return Err(SierpinskiError::Precondition(format!("stage ratio {} exceeds min(s/(4+2S), 1/10) = {bound}", self.delta())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fit_the_stage_ratio() {
        let p = QuasiArcParams::default();
        p.validate().unwrap();
        assert!(p.delta() <= p.s / (4.0 + 2.0 * p.big_s));
        let tight = QuasiArcParams { s: 0.3, ..p };
        assert!(tight.validate().is_err());
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"s":0.5,"S":8.0,"eps":1e-6}"#);
    }
}
