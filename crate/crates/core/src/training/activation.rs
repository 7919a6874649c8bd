/// Logistic function `1 / (1 + e^-x)`.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `sigmoid(x) * (1 - sigmoid(x))`.
pub fn sigmoid_deriv(x: f64) -> f64 {
    let s = sigmoid(x);
    s * (1.0 - s)
}

/// Output nonlinearity applied to the readout probability.
///
/// `Identity` exists so gradient rules can be compared with the
/// nonlinearity switched off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Logistic,
    Identity,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Logistic => sigmoid(x),
            Activation::Identity => x,
        }
    }

    pub fn deriv(self, x: f64) -> f64 {
        match self {
            Activation::Logistic => sigmoid_deriv(x),
            Activation::Identity => 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(sigmoid_deriv(0.0), 0.25);
        assert!((sigmoid(1.0) - 0.731_058_578_630_004_9).abs() < 1e-15);
        assert!(sigmoid(-800.0).is_finite() && sigmoid(800.0) <= 1.0);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-5;
        for i in -30..=30 {
            let x = i as f64 / 10.0;
            let fd = (sigmoid(x + h) - sigmoid(x - h)) / (2.0 * h);
            assert!((fd - sigmoid_deriv(x)).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn identity_hook() {
        assert_eq!(Activation::Identity.apply(0.3), 0.3);
        assert_eq!(Activation::Identity.deriv(0.3), 1.0);
    }
}
