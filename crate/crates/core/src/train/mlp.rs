//! Plain float MLP with hand-rolled backprop. Training runs in standard
//! f64 arithmetic; checkpoints are converted exactly to rationals before
//! any counting.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::tropical::{network_from_f64, Activation, FloatLayer, NetworkSpec};

#[derive(Clone, Debug)]
pub struct FloatNet {
    pub widths: Vec<usize>,
    /// Row-major weight matrices, one per layer.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

/// Gradients in the same layout as the parameters.
#[derive(Clone, Debug)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl FloatNet {
    /// Uniform init on ±√(1/fan_in) for weights and biases.
    pub fn init(widths: &[usize], rng: &mut ChaCha8Rng) -> FloatNet {
        assert!(widths.len() >= 2);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for w in widths.windows(2) {
            let (fan_in, rows) = (w[0], w[1]);
            let bound = (1.0 / fan_in as f64).sqrt();
            weights.push((0..rows * fan_in).map(|_| rng.gen_range(-bound..bound)).collect());
            biases.push((0..rows).map(|_| rng.gen_range(-bound..bound)).collect());
        }
        FloatNet {
            widths: widths.to_vec(),
            weights,
            biases,
        }
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn zero_grads(&self) -> Gradients {
        Gradients {
            weights: self.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: self.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    /// Hidden activations per layer (post-ReLU) plus the final logit.
    fn forward_trace(&self, x: &[f64]) -> (Vec<Vec<f64>>, f64) {
        let mut acts: Vec<Vec<f64>> = vec![x.to_vec()];
        for l in 0..self.num_layers() {
            let (rows, cols) = (self.widths[l + 1], self.widths[l]);
            let prev = &acts[l];
            let mut out = Vec::with_capacity(rows);
            for r in 0..rows {
                let mut z = self.biases[l][r];
                let row = &self.weights[l][r * cols..(r + 1) * cols];
                for (w, a) in row.iter().zip(prev) {
                    z += w * a;
                }
                if l + 1 < self.num_layers() {
                    z = z.max(0.0);
                }
                out.push(z);
            }
            acts.push(out);
        }
        let logit = acts.last().unwrap()[0];
        (acts, logit)
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.forward_trace(x).1
    }

    /// Predicted label: +1 for a non-negative logit.
    pub fn predict(&self, x: &[f64]) -> i8 {
        if self.logit(x) >= 0.0 {
            1
        } else {
            -1
        }
    }

    /// Binary cross-entropy with logits against a {−1, +1} label;
    /// numerically stable form.
    pub fn bce_loss(logit: f64, label: i8) -> f64 {
        let t = f64::from(label == 1);
        logit.max(0.0) - t * logit + (-logit.abs()).exp().ln_1p()
    }

    /// Backprop of the mean BCE loss over a batch; accumulates parameter
    /// gradients and returns the per-sample input gradients.
    pub fn backward_batch(
        &self,
        batch: &[([f64; 2], i8)],
        grads: &mut Gradients,
    ) -> (f64, Vec<[f64; 2]>) {
        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        let mut input_grads = Vec::with_capacity(batch.len());
        for (x, label) in batch {
            let (acts, logit) = self.forward_trace(x);
            loss += Self::bce_loss(logit, *label) * scale;
            let t = f64::from(*label == 1);
            // dL/dz for the single logit
            let mut delta = vec![sigmoid(logit) - t];
            for l in (0..self.num_layers()).rev() {
                let (rows, cols) = (self.widths[l + 1], self.widths[l]);
                let prev = &acts[l];
                let mut prev_delta = vec![0.0; cols];
                for (r, &d) in delta.iter().enumerate().take(rows) {
                    if d == 0.0 {
                        continue;
                    }
                    grads.biases[l][r] += d * scale;
                    let row = &self.weights[l][r * cols..(r + 1) * cols];
                    for c in 0..cols {
                        grads.weights[l][r * cols + c] += d * prev[c] * scale;
                        prev_delta[c] += d * row[c];
                    }
                }
                if l > 0 {
                    // gate through the ReLU of the previous layer
                    for (pd, a) in prev_delta.iter_mut().zip(&acts[l]) {
                        if *a <= 0.0 {
                            *pd = 0.0;
                        }
                    }
                }
                delta = prev_delta;
            }
            input_grads.push([delta[0], delta[1]]);
        }
        (loss, input_grads)
    }

    /// Exact snapshot: hidden layers ReLU, final layer linear.
    pub fn to_network_spec(&self) -> Result<NetworkSpec> {
        let last = self.num_layers() - 1;
        let layers: Vec<FloatLayer> = (0..self.num_layers())
            .map(|l| {
                (
                    self.widths[l + 1],
                    self.widths[l],
                    self.weights[l].clone(),
                    self.biases[l].clone(),
                    if l == last {
                        Activation::Linear
                    } else {
                        Activation::Relu
                    },
                )
            })
            .collect();
        network_from_f64(self.widths[0], &layers)
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// SGD with momentum and decoupled-into-gradient weight decay, matching
/// the usual torch semantics: `v = μ v + (g + λ θ)`, `θ -= lr · v`.
#[derive(Clone, Debug)]
pub struct SgdMomentum {
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    vel_w: Vec<Vec<f64>>,
    vel_b: Vec<Vec<f64>>,
}

impl SgdMomentum {
    pub fn new(net: &FloatNet, learning_rate: f64, momentum: f64, weight_decay: f64) -> Self {
        SgdMomentum {
            learning_rate,
            momentum,
            weight_decay,
            vel_w: net.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            vel_b: net.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn step(&mut self, net: &mut FloatNet, grads: &Gradients) {
        for l in 0..net.num_layers() {
            for (i, w) in net.weights[l].iter_mut().enumerate() {
                let g = grads.weights[l][i] + self.weight_decay * *w;
                self.vel_w[l][i] = self.momentum * self.vel_w[l][i] + g;
                *w -= self.learning_rate * self.vel_w[l][i];
            }
            for (i, b) in net.biases[l].iter_mut().enumerate() {
                let g = grads.biases[l][i] + self.weight_decay * *b;
                self.vel_b[l][i] = self.momentum * self.vel_b[l][i] + g;
                *b -= self.learning_rate * self.vel_b[l][i];
            }
        }
    }
}

/// One-step l∞ adversarial perturbation: `x + ε · sign(∇ₓ loss)`.
pub fn fgsm_perturb(net: &FloatNet, x: [f64; 2], label: i8, eps: f64) -> [f64; 2] {
    let mut grads = net.zero_grads();
    let (_, input_grads) = net.backward_batch(&[(x, label)], &mut grads);
    let g = input_grads[0];
    [x[0] + eps * sign(g[0]), x[1] + eps * sign(g[1])]
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn tiny_net(seed: u64) -> FloatNet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FloatNet::init(&[2, 5, 4, 1], &mut rng)
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        'outer: for round in 0..20 {
            let net = tiny_net(round);
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let label: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
            // keep away from ReLU kinks so the function is differentiable:
            // every hidden pre-activation must be clearly nonzero
            let mut cur = x.to_vec();
            for l in 0..net.num_layers() - 1 {
                let (rows, cols) = (net.widths[l + 1], net.widths[l]);
                let mut out = Vec::with_capacity(rows);
                for r in 0..rows {
                    let mut z = net.biases[l][r];
                    for c in 0..cols {
                        z += net.weights[l][r * cols + c] * cur[c];
                    }
                    if z.abs() < 1e-4 {
                        continue 'outer;
                    }
                    out.push(z.max(0.0));
                }
                cur = out;
            }
            let mut grads = net.zero_grads();
            let (_, ig) = net.backward_batch(&[(x, label)], &mut grads);
            let h = 1e-6;
            for l in 0..net.num_layers() {
                for i in [0usize, net.weights[l].len() - 1] {
                    let mut plus = net.clone();
                    plus.weights[l][i] += h;
                    let mut minus = net.clone();
                    minus.weights[l][i] -= h;
                    let fd = (FloatNet::bce_loss(plus.logit(&x), label)
                        - FloatNet::bce_loss(minus.logit(&x), label))
                        / (2.0 * h);
                    let an = grads.weights[l][i];
                    assert!(
                        (fd - an).abs() <= 1e-4 * fd.abs().max(an.abs()).max(1e-3),
                        "layer {l} weight {i}: fd {fd} vs {an}"
                    );
                    checked += 1;
                }
            }
            // input gradient against finite differences
            for c in 0..2 {
                let mut xp = x;
                xp[c] += h;
                let mut xm = x;
                xm[c] -= h;
                let fd = (FloatNet::bce_loss(net.logit(&xp), label)
                    - FloatNet::bce_loss(net.logit(&xm), label))
                    / (2.0 * h);
                assert!((fd - ig[0][c]).abs() <= 1e-4 * fd.abs().max(1e-3));
                checked += 1;
            }
        }
        assert!(checked >= 60, "enough differentiable samples ({checked})");
    }

    #[test]
    fn weight_decay_shrinks_parameters_without_data_gradient() {
        let mut net = tiny_net(3);
        let mut opt = SgdMomentum::new(&net, 0.1, 0.0, 0.001);
        let before: f64 = net.weights.iter().flatten().map(|w| w * w).sum();
        let grads = net.zero_grads();
        opt.step(&mut net, &grads);
        let after: f64 = net.weights.iter().flatten().map(|w| w * w).sum();
        let factor = (1.0f64 - 0.1 * 0.001).powi(2);
        assert!((after / before - factor).abs() < 1e-12);
    }

    #[test]
    fn fgsm_properties() {
        let net = tiny_net(5);
        let x = [0.3, -0.2];
        assert_eq!(fgsm_perturb(&net, x, 1, 0.0), x);
        let x2 = fgsm_perturb(&net, x, 1, 0.05);
        let linf = (x2[0] - x[0]).abs().max((x2[1] - x[1]).abs());
        assert!(linf <= 0.05 + 1e-15);

        // first-order ascent: the loss does not decrease for small ε in
        // the vast majority of draws
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut up = 0;
        for round in 0..100 {
            let net = tiny_net(round + 1000);
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let label: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
            let xp = fgsm_perturb(&net, x, label, 1e-4);
            let l0 = FloatNet::bce_loss(net.logit(&x), label);
            let l1 = FloatNet::bce_loss(net.logit(&xp), label);
            if l1 >= l0 - 1e-12 {
                up += 1;
            }
        }
        assert!(up >= 95, "loss rose in {up}/100 draws");
    }

    #[test]
    fn snapshot_is_exact() {
        let net = tiny_net(7);
        let spec = net.to_network_spec().unwrap();
        assert_eq!(spec.widths(), vec![2, 5, 4, 1]);
        // float forward and exact forward agree to f64 round-off
        let x = [0.125, -0.75];
        let exact = crate::tropical::net_eval(
            &spec,
            &[
                crate::geometry::scalar::scalar_from_f64(x[0]).unwrap(),
                crate::geometry::scalar::scalar_from_f64(x[1]).unwrap(),
            ],
        )
        .unwrap();
        let approx = crate::geometry::scalar::scalar_to_f64(&exact);
        assert!((approx - net.logit(&x)).abs() < 1e-9);
    }
}
