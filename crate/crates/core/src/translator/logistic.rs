//! Single-layer logistic model: parameters are weights followed by a bias.

pub const LEARNING_RATE: f64 = 0.5;

/// Probabilities are clamped this far from 0 and 1 inside the loss.
const CLAMP: f64 = 1e-12;

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// `w . phi + b`, summed left to right.
pub fn logit(params: &[f64], phi: &[f64]) -> f64 {
    let (w, b) = params.split_at(params.len() - 1);
    w.iter().zip(phi).fold(0.0, |acc, (wi, xi)| acc + wi * xi) + b[0]
}

pub fn predict(params: &[f64], phi: &[f64]) -> f64 {
    sigmoid(logit(params, phi))
}

/// Binary cross-entropy of `p` against a 0/1 label.
pub fn bce(p: f64, label: f64) -> f64 {
    let p = p.clamp(CLAMP, 1.0 - CLAMP);
    let loss = -(label * p.ln() + (1.0 - label) * (1.0 - p).ln());
    loss.max(0.0)
}

pub fn bce_loss(params: &[f64], phi: &[f64], label: f64) -> f64 {
    bce(predict(params, phi), label)
}

/// Gradient of [`bce_loss`] with respect to the parameters, given the
/// prediction `p` already computed for `phi`.
pub fn bce_gradient_at(p: f64, phi: &[f64], label: f64) -> Vec<f64> {
    let r = p - label;
    phi.iter().map(|x| r * x).chain(std::iter::once(r)).collect()
}

pub fn bce_gradient(params: &[f64], phi: &[f64], label: f64) -> Vec<f64> {
    bce_gradient_at(predict(params, phi), phi, label)
}

/// One gradient-descent step.
pub fn gd_step(params: &[f64], grad: &[f64]) -> Vec<f64> {
    params.iter().zip(grad).map(|(p, g)| p - LEARNING_RATE * g).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_parameters_predict_one_half() {
        assert_eq!(predict(&[0.0, 0.0, 0.0], &[0.3, -7.0]), 0.5);
        assert!((bce(0.5, 1.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn loss_is_nonnegative_and_finite_at_extremes() {
        for p in [0.0, 1e-300, 0.5, 1.0] {
            for y in [0.0, 1.0] {
                let l = bce(p, y);
                assert!(l >= 0.0 && l.is_finite());
            }
        }
    }

    #[test]
    fn gradient_step_reduces_loss() {
        let params = [0.2, -0.1, 0.05];
        let phi = [0.7, 0.4];
        let next = gd_step(&params, &bce_gradient(&params, &phi, 1.0));
        assert!(bce_loss(&next, &phi, 1.0) < bce_loss(&params, &phi, 1.0));
    }
}
