//! Fixed-architecture feedforward network (tanh hidden layers, linear output)
//! with hand-written backpropagation. Parameters live in one flat buffer so
//! optimizers and finite-difference checks can treat them uniformly.

use serde::{Deserialize, Serialize};

use crate::rng::NoiseStream;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Mlp {
    /// Layer widths, input first.
    pub sizes: Vec<usize>,
    /// All weights and biases: per layer, the (out x in) weight matrix
    /// row-major, then the bias vector.
    pub params: Vec<f64>,
}

/// Forward-pass cache needed for the backward pass.
pub struct ForwardCache {
    /// Post-activation values per layer, input included.
    pub activations: Vec<Vec<f64>>,
}

impl Mlp {
    pub fn n_params_for(sizes: &[usize]) -> usize {
        sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    pub fn zeros(sizes: &[usize]) -> Self {
        Self { sizes: sizes.to_vec(), params: vec![0.0; Self::n_params_for(sizes)] }
    }

    /// Orthogonal-style init: Gram-Schmidt over a Gaussian matrix, scaled by
    /// `hidden_gain` for hidden layers and `final_gain` for the output layer.
    pub fn init(sizes: &[usize], hidden_gain: f64, final_gain: f64, rng: &mut NoiseStream) -> Self {
        let mut net = Self::zeros(sizes);
        let n_layers = sizes.len() - 1;
        for layer in 0..n_layers {
            let gain = if layer + 1 == n_layers { final_gain } else { hidden_gain };
            let (rows, cols) = (sizes[layer + 1], sizes[layer]);
            let w = orthogonal_matrix(rows, cols, gain, rng);
            let (w_off, _) = net.layer_offsets(layer);
            net.params[w_off..w_off + rows * cols].copy_from_slice(&w);
            // biases stay zero
        }
        net
    }

    pub fn n_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn input_len(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_len(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    /// (weight offset, bias offset) of a layer inside the flat buffer.
    pub fn layer_offsets(&self, layer: usize) -> (usize, usize) {
        let mut off = 0;
        for l in 0..layer {
            off += self.sizes[l] * self.sizes[l + 1] + self.sizes[l + 1];
        }
        (off, off + self.sizes[layer] * self.sizes[layer + 1])
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.forward_cached(input).activations.pop().unwrap()
    }

    #[allow(clippy::needless_range_loop)]
    pub fn forward_cached(&self, input: &[f64]) -> ForwardCache {
        assert_eq!(input.len(), self.input_len(), "mlp input length mismatch");
        let mut activations = Vec::with_capacity(self.sizes.len());
        activations.push(input.to_vec());
        for layer in 0..self.n_layers() {
            let (n_in, n_out) = (self.sizes[layer], self.sizes[layer + 1]);
            let (w_off, b_off) = self.layer_offsets(layer);
            let prev = &activations[layer];
            let mut out = vec![0.0; n_out];
            for o in 0..n_out {
                let row = &self.params[w_off + o * n_in..w_off + (o + 1) * n_in];
                let mut z = self.params[b_off + o];
                for (wi, xi) in row.iter().zip(prev) {
                    z += wi * xi;
                }
                out[o] = if layer + 1 == self.n_layers() { z } else { z.tanh() };
            }
            activations.push(out);
        }
        ForwardCache { activations }
    }

    /// Accumulates parameter gradients for one sample given dLoss/dOutput.
    /// Returns nothing extra; `grads` must have `params.len()` entries.
    #[allow(clippy::needless_range_loop)]
    pub fn backward(&self, cache: &ForwardCache, grad_output: &[f64], grads: &mut [f64]) {
        debug_assert_eq!(grads.len(), self.params.len());
        let mut grad = grad_output.to_vec();
        for layer in (0..self.n_layers()).rev() {
            let (n_in, n_out) = (self.sizes[layer], self.sizes[layer + 1]);
            let (w_off, b_off) = self.layer_offsets(layer);
            let input = &cache.activations[layer];
            let mut grad_in = vec![0.0; n_in];
            for o in 0..n_out {
                let g = grad[o];
                if g == 0.0 {
                    continue;
                }
                grads[b_off + o] += g;
                let row_off = w_off + o * n_in;
                for i in 0..n_in {
                    grads[row_off + i] += g * input[i];
                    grad_in[i] += g * self.params[row_off + i];
                }
            }
            if layer > 0 {
                // The input of this layer is the tanh output of the previous.
                for i in 0..n_in {
                    let a = cache.activations[layer][i];
                    grad_in[i] *= 1.0 - a * a;
                }
            }
            grad = grad_in;
        }
    }
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().unwrap()
    }
}

fn orthogonal_matrix(rows: usize, cols: usize, gain: f64, rng: &mut NoiseStream) -> Vec<f64> {
    // Orthonormalize along the shorter side via modified Gram-Schmidt.
    let (vecs, veclen, transpose) =
        if rows <= cols { (rows, cols, false) } else { (cols, rows, true) };
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vecs);
    for _ in 0..vecs {
        let mut v: Vec<f64> = (0..veclen).map(|_| rng.next_standard_normal()).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= dot * bi;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        // Degenerate draws are vanishingly rare at these sizes.
        for vi in &mut v {
            *vi /= norm;
        }
        basis.push(v);
    }
    let mut out = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let v = if transpose { basis[c][r] } else { basis[r][c] };
            out[r * cols + c] = gain * v;
        }
    }
    out
}
