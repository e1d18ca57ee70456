use rand::Rng;
use thiserror::Error;

/// Dense network shape: input, hidden layers, output. Hidden layers use
/// ReLU, the output layer is linear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlpSpec {
    pub layer_dims: Vec<usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum MlpError {
    #[error("spec needs at least input and output dims, got {0}")]
    TooFewLayers(usize),
    #[error("layer dims must all be >= 1")]
    ZeroDim,
    #[error("input length {got} does not match network input dim {expected}")]
    InputDimMismatch { expected: usize, got: usize },
    #[error("action index {index} out of range for {actions} outputs")]
    ActionOutOfRange { index: usize, actions: usize },
    #[error("input contains a non-finite value")]
    NonFiniteInput,
}

impl MlpSpec {
    pub fn new(layer_dims: Vec<usize>) -> Result<Self, MlpError> {
        if layer_dims.len() < 2 {
            return Err(MlpError::TooFewLayers(layer_dims.len()));
        }
        if layer_dims.iter().any(|&d| d == 0) {
            return Err(MlpError::ZeroDim);
        }
        Ok(Self { layer_dims })
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn layer_count(&self) -> usize {
        self.layer_dims.len() - 1
    }
}

/// MLP parameters mapping an observation to per-action Q-values. Weight
/// matrices are row-major with shape (out, in).
#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork {
    spec: MlpSpec,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

/// Per-parameter gradients shaped like a [`QNetwork`].
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &QNetwork) -> Self {
        Self {
            weights: net.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: net.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for layer in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            for g in layer {
                *g *= factor;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.weights
            .iter()
            .chain(self.biases.iter())
            .all(|layer| layer.iter().all(|g| g.is_finite()))
    }
}

/// He-uniform initialization: weights uniform in +/- sqrt(6 / fan_in),
/// biases zero. Deterministic for a given RNG state.
pub fn init_network<R: Rng>(spec: &MlpSpec, rng: &mut R) -> QNetwork {
    let mut weights = Vec::with_capacity(spec.layer_count());
    let mut biases = Vec::with_capacity(spec.layer_count());
    for l in 0..spec.layer_count() {
        let fan_in = spec.layer_dims[l];
        let fan_out = spec.layer_dims[l + 1];
        let bound = (6.0 / fan_in as f64).sqrt();
        let w: Vec<f64> = (0..fan_in * fan_out)
            .map(|_| rng.gen_range(-bound..bound))
            .collect();
        weights.push(w);
        biases.push(vec![0.0; fan_out]);
    }
    QNetwork {
        spec: spec.clone(),
        weights,
        biases,
    }
}

impl QNetwork {
    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn from_parts(
        spec: MlpSpec,
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    ) -> Result<Self, MlpError> {
        if weights.len() != spec.layer_count() || biases.len() != spec.layer_count() {
            return Err(MlpError::TooFewLayers(weights.len()));
        }
        for l in 0..spec.layer_count() {
            if weights[l].len() != spec.layer_dims[l] * spec.layer_dims[l + 1]
                || biases[l].len() != spec.layer_dims[l + 1]
            {
                return Err(MlpError::ZeroDim);
            }
        }
        Ok(Self {
            spec,
            weights,
            biases,
        })
    }

    pub(crate) fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub(crate) fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    /// Applies one parameter update in place: `p += delta` elementwise.
    pub(crate) fn apply_delta(&mut self, f: impl Fn(usize, bool, usize, f64) -> f64) {
        for (l, layer) in self.weights.iter_mut().enumerate() {
            for (i, w) in layer.iter_mut().enumerate() {
                *w += f(l, true, i, *w);
            }
        }
        for (l, layer) in self.biases.iter_mut().enumerate() {
            for (i, b) in layer.iter_mut().enumerate() {
                *b += f(l, false, i, *b);
            }
        }
    }
}

fn check_input(net: &QNetwork, x: &[f64]) -> Result<(), MlpError> {
    if x.len() != net.spec.input_dim() {
        return Err(MlpError::InputDimMismatch {
            expected: net.spec.input_dim(),
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(MlpError::NonFiniteInput);
    }
    Ok(())
}

fn affine(weights: &[f64], bias: &[f64], input: &[f64], out: &mut Vec<f64>) {
    let in_dim = input.len();
    out.clear();
    for (o, b) in bias.iter().enumerate() {
        let row = &weights[o * in_dim..(o + 1) * in_dim];
        let mut acc = *b;
        for (w, x) in row.iter().zip(input) {
            acc += w * x;
        }
        out.push(acc);
    }
}

/// Q-values for every action. Pure: two calls with the same input yield
/// identical outputs.
pub fn forward(net: &QNetwork, x: &[f64]) -> Result<Vec<f64>, MlpError> {
    check_input(net, x)?;
    let mut current = x.to_vec();
    let mut next = Vec::new();
    let layers = net.spec.layer_count();
    for l in 0..layers {
        affine(&net.weights[l], &net.biases[l], &current, &mut next);
        if l + 1 < layers {
            for v in &mut next {
                *v = v.max(0.0);
            }
        }
        std::mem::swap(&mut current, &mut next);
    }
    Ok(current)
}

/// Forward pass keeping post-activation values of every layer (input first),
/// for backpropagation.
fn forward_trace(net: &QNetwork, x: &[f64]) -> Vec<Vec<f64>> {
    let layers = net.spec.layer_count();
    let mut activations = Vec::with_capacity(layers + 1);
    activations.push(x.to_vec());
    for l in 0..layers {
        let mut out = Vec::new();
        affine(&net.weights[l], &net.biases[l], &activations[l], &mut out);
        if l + 1 < layers {
            for v in &mut out {
                *v = v.max(0.0);
            }
        }
        activations.push(out);
    }
    activations
}

/// Gradient of the half-squared TD error on the chosen action:
/// loss = 0.5 * (Q(x)[action] - td_target)^2. Other outputs contribute no
/// gradient. Returns the loss and accumulates `scale * grad` into `grads`.
pub fn backward_accumulate(
    net: &QNetwork,
    x: &[f64],
    action_index: usize,
    td_target: f64,
    scale: f64,
    grads: &mut Gradients,
) -> Result<f64, MlpError> {
    check_input(net, x)?;
    let actions = net.spec.output_dim();
    if action_index >= actions {
        return Err(MlpError::ActionOutOfRange {
            index: action_index,
            actions,
        });
    }

    let activations = forward_trace(net, x);
    let layers = net.spec.layer_count();
    let output = &activations[layers];
    let residual = output[action_index] - td_target;
    let loss = 0.5 * residual * residual;

    // Delta at the output layer: residual on the chosen action only.
    let mut delta = vec![0.0; actions];
    delta[action_index] = residual;

    for l in (0..layers).rev() {
        let input = &activations[l];
        let in_dim = input.len();
        {
            let gw = &mut grads.weights[l];
            let gb = &mut grads.biases[l];
            for (o, d) in delta.iter().enumerate() {
                if *d == 0.0 {
                    continue;
                }
                gb[o] += scale * d;
                let row = &mut gw[o * in_dim..(o + 1) * in_dim];
                for (g, a) in row.iter_mut().zip(input) {
                    *g += scale * d * a;
                }
            }
        }
        if l == 0 {
            break;
        }
        // Propagate through the affine layer and the preceding ReLU.
        let mut prev_delta = vec![0.0; in_dim];
        for (o, d) in delta.iter().enumerate() {
            if *d == 0.0 {
                continue;
            }
            let row = &net.weights[l][o * in_dim..(o + 1) * in_dim];
            for (pd, w) in prev_delta.iter_mut().zip(row) {
                *pd += d * w;
            }
        }
        for (pd, a) in prev_delta.iter_mut().zip(input) {
            if *a <= 0.0 {
                *pd = 0.0;
            }
        }
        delta = prev_delta;
    }

    Ok(loss)
}

/// Exact analytic gradient of the half-squared TD error on the chosen
/// action, plus the scalar loss.
pub fn backward(
    net: &QNetwork,
    x: &[f64],
    action_index: usize,
    td_target: f64,
) -> Result<(Gradients, f64), MlpError> {
    let mut grads = Gradients::zeros_like(net);
    let loss = backward_accumulate(net, x, action_index, td_target, 1.0, &mut grads)?;
    Ok((grads, loss))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spec_validation() {
        assert!(MlpSpec::new(vec![4]).is_err());
        assert!(MlpSpec::new(vec![4, 0, 2]).is_err());
        assert!(MlpSpec::new(vec![4, 8, 2]).is_ok());
    }

    #[test]
    fn init_is_deterministic_with_zero_biases() {
        let spec = MlpSpec::new(vec![18, 64, 64, 2]).unwrap();
        let a = init_network(&spec, &mut ChaCha8Rng::seed_from_u64(5));
        let b = init_network(&spec, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
        for bias in a.biases() {
            assert!(bias.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn init_weights_respect_he_bound() {
        let spec = MlpSpec::new(vec![24, 64, 2]).unwrap();
        let net = init_network(&spec, &mut ChaCha8Rng::seed_from_u64(5));
        for (l, layer) in net.weights().iter().enumerate() {
            let bound = (6.0 / spec.layer_dims[l] as f64).sqrt();
            let max = layer.iter().fold(0.0f64, |m, w| m.max(w.abs()));
            assert!(max <= bound, "layer {l}: |w| max {max} above bound {bound}");
            // With this many draws the sampler should get close to the bound.
            assert!(max > 0.8 * bound, "layer {l}: max {max} suspiciously small");
        }
    }

    #[test]
    fn zero_weights_forward_returns_last_bias() {
        let spec = MlpSpec::new(vec![3, 4, 2]).unwrap();
        let weights = vec![vec![0.0; 12], vec![0.0; 8]];
        let biases = vec![vec![0.5; 4], vec![1.5, -2.5]];
        let net = QNetwork::from_parts(spec, weights, biases).unwrap();
        let out = forward(&net, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(out, vec![1.5, -2.5]);
    }

    #[test]
    fn single_layer_hand_arithmetic() {
        let spec = MlpSpec::new(vec![2, 1]).unwrap();
        let net = QNetwork::from_parts(spec, vec![vec![1.0, -1.0]], vec![vec![0.0]]).unwrap();
        let out = forward(&net, &[3.0, 2.0]).unwrap();
        assert_eq!(out, vec![1.0]);
    }

    #[test]
    fn forward_is_pure() {
        let spec = MlpSpec::new(vec![5, 8, 2]).unwrap();
        let net = init_network(&spec, &mut ChaCha8Rng::seed_from_u64(1));
        let x = [0.3, -1.2, 4.0, 0.0, 2.2];
        assert_eq!(forward(&net, &x).unwrap(), forward(&net, &x).unwrap());
    }

    #[test]
    fn forward_rejects_dimension_mismatch() {
        let spec = MlpSpec::new(vec![5, 8, 2]).unwrap();
        let net = init_network(&spec, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(matches!(
            forward(&net, &[1.0, 2.0]),
            Err(MlpError::InputDimMismatch { expected: 5, got: 2 })
        ));
    }

    #[test]
    fn gradient_zero_at_optimum() {
        let spec = MlpSpec::new(vec![4, 6, 2]).unwrap();
        let net = init_network(&spec, &mut ChaCha8Rng::seed_from_u64(2));
        let x = [0.5, -0.5, 1.0, 2.0];
        let q = forward(&net, &x).unwrap();
        let (grads, loss) = backward(&net, &x, 1, q[1]).unwrap();
        assert_eq!(loss, 0.0);
        for layer in grads.weights.iter().chain(grads.biases.iter()) {
            assert!(layer.iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn gradient_scales_linearly_with_residual() {
        let spec = MlpSpec::new(vec![3, 5, 2]).unwrap();
        let net = init_network(&spec, &mut ChaCha8Rng::seed_from_u64(3));
        let x = [1.0, 0.25, -0.75];
        let q = forward(&net, &x).unwrap();
        // Residuals of 1 and 3 relative to the current output.
        let (g1, _) = backward(&net, &x, 0, q[0] - 1.0).unwrap();
        let (g3, _) = backward(&net, &x, 0, q[0] - 3.0).unwrap();
        for (a, b) in g1.weights.iter().flatten().zip(g3.weights.iter().flatten()) {
            assert!((3.0 * a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    // Central-difference oracle for the analytic gradient. Perturbs every
    // parameter of a small random net and compares slopes.
    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..10 {
            let spec = MlpSpec::new(vec![4, 6, 5, 2]).unwrap();
            let mut net = init_network(&spec, &mut rng);
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let action = trial % 2;
            let target = rng.gen_range(-1.0..1.0);
            let (grads, _) = backward(&net, &x, action, target).unwrap();

            let h = 1e-5;
            let mut max_rel = 0.0f64;
            for l in 0..net.weights.len() {
                for i in 0..net.weights[l].len() {
                    let orig = net.weights[l][i];
                    net.weights[l][i] = orig + h;
                    let up = eval_loss(&net, &x, action, target);
                    net.weights[l][i] = orig - h;
                    let down = eval_loss(&net, &x, action, target);
                    net.weights[l][i] = orig;
                    let numeric = (up - down) / (2.0 * h);
                    let analytic = grads.weights[l][i];
                    let denom = numeric.abs().max(analytic.abs()).max(1e-8);
                    max_rel = max_rel.max((numeric - analytic).abs() / denom);
                }
            }
            assert!(max_rel < 1e-4, "trial {trial}: max relative error {max_rel}");
        }
    }

    fn eval_loss(net: &QNetwork, x: &[f64], action: usize, target: f64) -> f64 {
        let q = forward(net, x).unwrap();
        let r = q[action] - target;
        0.5 * r * r
    }
}
