use rand::Rng;

use super::{axpy, check_len, dot, NnError};
use crate::checkpoint::{CheckpointError, Reader, Writer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Tanh,
    Relu,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(0.0),
        }
    }

    /// Derivative expressed through the activation's output.
    #[inline]
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Tanh => 1.0 - y * y,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn tag(self) -> u8 {
        match self {
            Activation::Identity => 0,
            Activation::Tanh => 1,
            Activation::Relu => 2,
        }
    }

    fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Activation::Identity),
            1 => Some(Activation::Tanh),
            2 => Some(Activation::Relu),
            _ => None,
        }
    }
}

/// Multilayer perceptron with ReLU hidden layers.
///
/// Layer `k` maps `sizes[k]` inputs to `sizes[k + 1]` outputs. Its weight
/// matrix is stored row-major (`out × in`) in the flat parameter vector,
/// immediately followed by its bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    output_activation: Activation,
    params: Vec<f64>,
    offsets: Vec<usize>,
}

/// Activations recorded by [`Mlp::forward_batch`]. `acts[0]` is the input
/// batch and `acts[k + 1]` the post-activation output of layer `k`.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    batch: usize,
    acts: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn output(&self) -> &[f64] {
        self.acts.last().expect("cache holds at least the input")
    }

    pub fn layer_outputs(&self) -> &[Vec<f64>] {
        &self.acts[1..]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub params: Vec<f64>,
    pub input: Vec<f64>,
}

fn layer_offsets(sizes: &[usize]) -> Result<Vec<usize>, NnError> {
    if sizes.len() < 2 {
        return Err(NnError::Shape("need at least an input and an output size".into()));
    }
    if sizes.iter().any(|&s| s == 0) {
        return Err(NnError::Shape(format!("zero-width layer in {sizes:?}")));
    }
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut at = 0;
    for w in sizes.windows(2) {
        offsets.push(at);
        at += w[1] * w[0] + w[1];
    }
    offsets.push(at);
    Ok(offsets)
}

impl Mlp {
    /// Builds a network with weights and biases drawn from
    /// `U[-1/√fan_in, 1/√fan_in]`.
    pub fn new<R: Rng + ?Sized>(
        sizes: &[usize],
        output_activation: Activation,
        rng: &mut R,
    ) -> Result<Self, NnError> {
        let offsets = layer_offsets(sizes)?;
        let mut params = vec![0.0; *offsets.last().unwrap()];
        for (k, w) in sizes.windows(2).enumerate() {
            let bound = 1.0 / (w[0] as f64).sqrt();
            for p in &mut params[offsets[k]..offsets[k + 1]] {
                *p = rng.gen_range(-bound..bound);
            }
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            output_activation,
            params,
            offsets,
        })
    }

    pub fn from_params(
        sizes: &[usize],
        output_activation: Activation,
        params: Vec<f64>,
    ) -> Result<Self, NnError> {
        let offsets = layer_offsets(sizes)?;
        check_len("parameter vector", *offsets.last().unwrap(), params.len())?;
        Ok(Self {
            sizes: sizes.to_vec(),
            output_activation,
            params,
            offsets,
        })
    }

    pub fn zeros(sizes: &[usize], output_activation: Activation) -> Result<Self, NnError> {
        let n = *layer_offsets(sizes)?.last().unwrap();
        Self::from_params(sizes, output_activation, vec![0.0; n])
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn output_activation(&self) -> Activation {
        self.output_activation
    }

    pub fn activation(&self, layer: usize) -> Activation {
        if layer + 1 == self.num_layers() {
            self.output_activation
        } else {
            Activation::Relu
        }
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    /// Weight matrix (row-major, `out × in`) and bias of one layer.
    pub fn layer(&self, k: usize) -> (&[f64], &[f64]) {
        let (n_in, n_out) = (self.sizes[k], self.sizes[k + 1]);
        let w_end = self.offsets[k] + n_in * n_out;
        (
            &self.params[self.offsets[k]..w_end],
            &self.params[w_end..self.offsets[k + 1]],
        )
    }

    fn layer_range(&self, k: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let w_end = self.offsets[k] + self.sizes[k] * self.sizes[k + 1];
        (self.offsets[k]..w_end, w_end..self.offsets[k + 1])
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, NnError> {
        let mut cache = self.forward_batch(input, 1)?;
        Ok(cache.acts.pop().unwrap())
    }

    /// Row-major batch forward pass; keeps every layer's output for
    /// [`Mlp::backward`].
    pub fn forward_batch(&self, inputs: &[f64], batch: usize) -> Result<ForwardCache, NnError> {
        check_len("network input", batch * self.input_dim(), inputs.len())?;
        let mut acts = Vec::with_capacity(self.sizes.len());
        acts.push(inputs.to_vec());
        for k in 0..self.num_layers() {
            let (n_in, n_out) = (self.sizes[k], self.sizes[k + 1]);
            let (w, b) = self.layer(k);
            let act = self.activation(k);
            let x = &acts[k];
            let mut y = vec![0.0; batch * n_out];
            for s in 0..batch {
                let xs = &x[s * n_in..(s + 1) * n_in];
                let ys = &mut y[s * n_out..(s + 1) * n_out];
                for (o, yo) in ys.iter_mut().enumerate() {
                    *yo = act.apply(b[o] + dot(&w[o * n_in..(o + 1) * n_in], xs));
                }
            }
            acts.push(y);
        }
        Ok(ForwardCache { batch, acts })
    }

    /// Backpropagates `cotangent` (same shape as the cached output) through
    /// the cached pass. Parameter gradients of `⟨cotangent, output⟩` are
    /// *added* into `grads` when a buffer is given; the input gradient is
    /// returned when requested.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        cotangent: &[f64],
        mut grads: Option<&mut [f64]>,
        want_input: bool,
    ) -> Result<Option<Vec<f64>>, NnError> {
        let batch = cache.batch;
        check_len("output cotangent", batch * self.output_dim(), cotangent.len())?;
        if let Some(g) = grads.as_deref() {
            check_len("gradient buffer", self.params.len(), g.len())?;
        }
        if cache.acts.len() != self.sizes.len() || cache.acts[0].len() != batch * self.input_dim() {
            return Err(NnError::Shape("forward cache does not belong to this network".into()));
        }

        let mut upstream = cotangent.to_vec();
        let mut input_grad = None;
        for k in (0..self.num_layers()).rev() {
            let (n_in, n_out) = (self.sizes[k], self.sizes[k + 1]);
            let act = self.activation(k);
            let y = &cache.acts[k + 1];
            let x = &cache.acts[k];
            for (d, yv) in upstream.iter_mut().zip(y) {
                *d *= act.derivative_from_output(*yv);
            }
            let delta = upstream;

            let (wr, br) = self.layer_range(k);
            if let Some(grads) = grads.as_deref_mut() {
                let (gw, gb) = grads[wr.start..br.end].split_at_mut(wr.len());
                for s in 0..batch {
                    let xs = &x[s * n_in..(s + 1) * n_in];
                    let ds = &delta[s * n_out..(s + 1) * n_out];
                    for (o, &d) in ds.iter().enumerate() {
                        if d != 0.0 {
                            axpy(d, xs, &mut gw[o * n_in..(o + 1) * n_in]);
                            gb[o] += d;
                        }
                    }
                }
            }

            if k == 0 && !want_input {
                break;
            }
            let w = &self.params[wr];
            let mut dx = vec![0.0; batch * n_in];
            for s in 0..batch {
                let ds = &delta[s * n_out..(s + 1) * n_out];
                let dxs = &mut dx[s * n_in..(s + 1) * n_in];
                for (o, &d) in ds.iter().enumerate() {
                    if d != 0.0 {
                        axpy(d, &w[o * n_in..(o + 1) * n_in], dxs);
                    }
                }
            }
            if k == 0 {
                input_grad = Some(dx);
                break;
            }
            upstream = dx;
        }
        Ok(input_grad)
    }

    /// Gradient of `⟨cotangent, f(input)⟩` with respect to all parameters and
    /// the input.
    pub fn gradients(&self, input: &[f64], cotangent: &[f64]) -> Result<Gradients, NnError> {
        let cache = self.forward_batch(input, 1)?;
        let mut params = vec![0.0; self.params.len()];
        let input = self
            .backward(&cache, cotangent, Some(&mut params), true)?
            .expect("input gradient requested");
        Ok(Gradients { params, input })
    }

    /// `θ ← τ·θ_online + (1−τ)·θ`
    pub fn polyak_from(&mut self, online: &Mlp, tau: f64) -> Result<(), NnError> {
        if online.sizes != self.sizes {
            return Err(NnError::Shape(format!(
                "polyak source {:?} vs target {:?}",
                online.sizes, self.sizes
            )));
        }
        for (t, o) in self.params.iter_mut().zip(&online.params) {
            *t = tau * o + (1.0 - tau) * *t;
        }
        Ok(())
    }

    pub fn write(&self, w: &mut Writer) {
        w.usizes(&self.sizes);
        w.u8(self.output_activation.tag());
        w.f64s(&self.params);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, CheckpointError> {
        let at = r.offset();
        let sizes = r.usizes()?;
        let tag_at = r.offset();
        let act = Activation::from_tag(r.u8()?).ok_or(CheckpointError::Invalid {
            what: "activation tag",
            offset: tag_at,
        })?;
        let params = r.f64s()?;
        Mlp::from_params(&sizes, act, params).map_err(|_| CheckpointError::Invalid {
            what: "network shape",
            offset: at,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn zero_network_outputs_zero() {
        let net = Mlp::zeros(&[3, 5, 2], Activation::Identity).unwrap();
        assert_eq!(net.forward(&[1.0, -2.0, 3.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn identity_layer_passes_input_through() {
        let mut p = vec![0.0; 3 * 3 + 3];
        for i in 0..3 {
            p[i * 3 + i] = 1.0;
        }
        let net = Mlp::from_params(&[3, 3], Activation::Identity, p).unwrap();
        let v = [0.25, -1.5, 7.0];
        assert_eq!(net.forward(&v).unwrap(), v.to_vec());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let net = Mlp::zeros(&[3, 2], Activation::Tanh).unwrap();
        assert!(matches!(
            net.forward(&[1.0]),
            Err(NnError::Dimension { expected: 3, got: 1, .. })
        ));
        assert!(net.gradients(&[0.0; 3], &[1.0]).is_err());
        assert!(Mlp::zeros(&[3], Activation::Tanh).is_err());
        assert!(Mlp::zeros(&[3, 0, 1], Activation::Tanh).is_err());
    }

    #[test]
    fn tanh_output_is_bounded() {
        let mut rng = seeded(3);
        let mut net = Mlp::new(&[4, 16, 3], Activation::Tanh, &mut rng).unwrap();
        for p in net.params_mut() {
            *p *= 50.0;
        }
        let y = net.forward(&[10.0, -10.0, 3.0, 1.0]).unwrap();
        assert!(y.iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn zero_cotangent_gives_zero_gradients() {
        let mut rng = seeded(5);
        let net = Mlp::new(&[3, 8, 8, 2], Activation::Tanh, &mut rng).unwrap();
        let g = net.gradients(&[0.1, 0.2, 0.3], &[0.0, 0.0]).unwrap();
        assert!(g.params.iter().all(|v| *v == 0.0));
        assert!(g.input.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn linear_layer_gradients_are_analytic() {
        // y = Wx + b with W = [[1,2],[3,4],[5,6]], b = [0.5,-0.5,1]
        let p = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 0.5, -0.5, 1.0];
        let net = Mlp::from_params(&[2, 3], Activation::Identity, p).unwrap();
        let x = [0.7, -1.1];
        let g = [1.0, -2.0, 0.5];
        let grads = net.gradients(&x, &g).unwrap();
        for o in 0..3 {
            for i in 0..2 {
                assert_eq!(grads.params[o * 2 + i], g[o] * x[i]);
            }
            assert_eq!(grads.params[6 + o], g[o]);
        }
        let wt_g = [1.0 * 1.0 + 3.0 * -2.0 + 5.0 * 0.5, 2.0 * 1.0 + 4.0 * -2.0 + 6.0 * 0.5];
        assert_eq!(grads.input, wt_g.to_vec());
    }

    #[test]
    fn batch_forward_matches_single() {
        let mut rng = seeded(9);
        let net = Mlp::new(&[3, 7, 2], Activation::Tanh, &mut rng).unwrap();
        let xs = [0.1, 0.2, 0.3, -1.0, 0.5, 2.0];
        let cache = net.forward_batch(&xs, 2).unwrap();
        let a = net.forward(&xs[..3]).unwrap();
        let b = net.forward(&xs[3..]).unwrap();
        assert_eq!(&cache.output()[..2], &a[..]);
        assert_eq!(&cache.output()[2..], &b[..]);
    }

    #[test]
    fn polyak_limits() {
        let mut rng = seeded(1);
        let online = Mlp::new(&[2, 4, 1], Activation::Identity, &mut rng).unwrap();
        let mut target = Mlp::new(&[2, 4, 1], Activation::Identity, &mut rng).unwrap();
        let before = target.clone();
        target.polyak_from(&online, 0.0).unwrap();
        assert_eq!(target, before);
        target.polyak_from(&online, 1.0).unwrap();
        assert_eq!(target.params(), online.params());
        let other = Mlp::zeros(&[2, 3, 1], Activation::Identity).unwrap();
        assert!(target.polyak_from(&other, 0.5).is_err());
    }

    #[test]
    fn checkpoint_round_trip_is_byte_exact() {
        let mut rng = seeded(11);
        let net = Mlp::new(&[5, 6, 3], Activation::Tanh, &mut rng).unwrap();
        let mut w = Writer::new();
        net.write(&mut w);
        let bytes = w.into_bytes();
        let mut r = Reader::new(&bytes);
        let back = Mlp::read(&mut r).unwrap();
        r.finish().unwrap();
        assert_eq!(back, net);
        let mut w2 = Writer::new();
        back.write(&mut w2);
        assert_eq!(w2.into_bytes(), bytes);
    }
}
