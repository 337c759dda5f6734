//! Check-node update rules.
//!
//! Messages here use the conventional orientation `ln P(0)/P(1)`, in which the
//! output sign is the product of the input signs. The decoder negates
//! positive-favours-1 LLRs on the way in and out.

/// Magnitude cap for LLR messages leaving a check node.
pub const LLR_CAP: f64 = 50.0;

/// Probability clamp used by the probability-domain decoder.
pub const PROB_EPS: f64 = 1e-12;

/// Channel LLR `2y/σ²`, positive favouring bit value 1.
#[inline]
pub(crate) fn channel_llr(y: f64, sigma2: f64) -> f64 {
    2.0 * y / sigma2
}

/// `2·atanh(product)`, saturated at [`LLR_CAP`].
#[inline]
pub(crate) fn atanh_capped(product: f64) -> f64 {
    if product >= 1.0 {
        return LLR_CAP;
    }
    if product <= -1.0 {
        return -LLR_CAP;
    }
    (2.0 * product.atanh()).clamp(-LLR_CAP, LLR_CAP)
}

/// Exact sum-product (tanh rule) check update over the extrinsic inputs.
pub fn check_update_bp(incoming: &[f64]) -> f64 {
    let product: f64 = incoming.iter().map(|&m| (0.5 * m).tanh()).product();
    atanh_capped(product)
}

/// Min-sum correction applied to the minimum magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MinSumRule {
    /// Multiply the magnitude by a factor in (0, 1].
    Normalized(f64),
    /// Subtract an offset and clamp at zero.
    Offset(f64),
}

impl MinSumRule {
    #[inline]
    pub(crate) fn correct(self, magnitude: f64) -> f64 {
        match self {
            MinSumRule::Normalized(f) => magnitude * f,
            MinSumRule::Offset(b) => (magnitude - b).max(0.0),
        }
    }
}

/// Signed-minimum check update with normalization or offset correction.
pub fn check_update_minsum(incoming: &[f64], rule: MinSumRule) -> f64 {
    let mut negative = false;
    let mut min = f64::INFINITY;
    for &m in incoming {
        negative ^= m < 0.0;
        min = min.min(m.abs());
    }
    let mag = rule.correct(min);
    if mag == 0.0 {
        0.0
    } else if negative {
        -mag
    } else {
        mag
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bp_single_input_is_identity() {
        assert!((check_update_bp(&[1.7]) - 1.7).abs() < 1e-12);
        assert!((check_update_bp(&[-3.2]) + 3.2).abs() < 1e-12);
    }

    #[test]
    fn bp_two_inputs_closed_form() {
        // 2 atanh(tanh(0.5) tanh(1.0)), evaluated independently
        let expected = 0.735_325_664_055_519_f64;
        assert!((check_update_bp(&[1.0, 2.0]) - expected).abs() < 1e-9);
    }

    #[test]
    fn bp_zero_annihilates() {
        assert_eq!(check_update_bp(&[0.0, 4.0, -2.0]), 0.0);
    }

    #[test]
    fn bp_saturates() {
        assert_eq!(check_update_bp(&[200.0, 300.0]), LLR_CAP);
        assert_eq!(check_update_bp(&[-200.0, 300.0]), -LLR_CAP);
    }

    #[test]
    fn minsum_examples() {
        assert!((check_update_minsum(&[-3.0, 4.0], MinSumRule::Normalized(0.8)) + 2.4).abs() < 1e-12);
        assert!((check_update_minsum(&[-3.0, 4.0], MinSumRule::Offset(0.5)) + 2.5).abs() < 1e-12);
        let clamped = check_update_minsum(&[0.1, -5.0], MinSumRule::Offset(0.5));
        assert_eq!(clamped, 0.0);
        assert!(clamped.is_sign_positive());
    }

    #[test]
    fn channel_llr_examples() {
        assert_eq!(channel_llr(1.0, 1.0), 2.0);
        assert_eq!(channel_llr(0.0, 1.0), 0.0);
        assert!((channel_llr(-0.3, 0.5) + 1.2).abs() < 1e-12);
    }
}
