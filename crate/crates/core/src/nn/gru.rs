use rand::Rng;

use super::{check_len, dot, NnError};
use crate::checkpoint::{CheckpointError, Reader, Writer};
use crate::rng::seeded;

/// Gate parameters of a GRU cell. Input matrices are `hidden × input`,
/// recurrent matrices `hidden × hidden`, both row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GruWeights {
    pub w_update: Vec<f64>,
    pub u_update: Vec<f64>,
    pub b_update: Vec<f64>,
    pub w_reset: Vec<f64>,
    pub u_reset: Vec<f64>,
    pub b_reset: Vec<f64>,
    pub w_candidate: Vec<f64>,
    pub u_candidate: Vec<f64>,
    pub b_candidate: Vec<f64>,
}

impl GruWeights {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        let wi = vec![0.0; hidden_dim * input_dim];
        let wh = vec![0.0; hidden_dim * hidden_dim];
        let b = vec![0.0; hidden_dim];
        Self {
            w_update: wi.clone(),
            u_update: wh.clone(),
            b_update: b.clone(),
            w_reset: wi.clone(),
            u_reset: wh.clone(),
            b_reset: b.clone(),
            w_candidate: wi,
            u_candidate: wh,
            b_candidate: b,
        }
    }

    fn arrays(&self) -> [&Vec<f64>; 9] {
        [
            &self.w_update,
            &self.u_update,
            &self.b_update,
            &self.w_reset,
            &self.u_reset,
            &self.b_reset,
            &self.w_candidate,
            &self.u_candidate,
            &self.b_candidate,
        ]
    }

    fn check(&self, input_dim: usize, hidden_dim: usize) -> Result<(), NnError> {
        let expected = [
            hidden_dim * input_dim,
            hidden_dim * hidden_dim,
            hidden_dim,
        ];
        for (i, a) in self.arrays().iter().enumerate() {
            check_len("gru weight array", expected[i % 3], a.len())?;
        }
        Ok(())
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Untrained GRU that folds an observation sequence into a fixed-length
/// hidden vector.
///
/// Weights are fixed at construction; the only mutable state is the hidden
/// vector, advanced one observation at a time by [`GruEncoder::step`].
#[derive(Debug, Clone, PartialEq)]
pub struct GruEncoder {
    input_dim: usize,
    hidden_dim: usize,
    seed: Option<u64>,
    weights: GruWeights,
    hidden: Vec<f64>,
}

impl GruEncoder {
    /// Draws every weight and bias from `U[-1/√hidden, 1/√hidden]`.
    pub fn new(input_dim: usize, hidden_dim: usize, seed: u64) -> Result<Self, NnError> {
        if input_dim == 0 || hidden_dim == 0 {
            return Err(NnError::Shape("gru dimensions must be positive".into()));
        }
        let bound = 1.0 / (hidden_dim as f64).sqrt();
        let mut rng = seeded(seed);
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-bound..bound)).collect() };
        let (hi, hh, h) = (hidden_dim * input_dim, hidden_dim * hidden_dim, hidden_dim);
        let weights = GruWeights {
            w_update: draw(hi),
            u_update: draw(hh),
            b_update: draw(h),
            w_reset: draw(hi),
            u_reset: draw(hh),
            b_reset: draw(h),
            w_candidate: draw(hi),
            u_candidate: draw(hh),
            b_candidate: draw(h),
        };
        Ok(Self {
            input_dim,
            hidden_dim,
            seed: Some(seed),
            weights,
            hidden: vec![0.0; hidden_dim],
        })
    }

    pub fn from_weights(input_dim: usize, hidden_dim: usize, weights: GruWeights) -> Result<Self, NnError> {
        weights.check(input_dim, hidden_dim)?;
        Ok(Self {
            input_dim,
            hidden_dim,
            seed: None,
            weights,
            hidden: vec![0.0; hidden_dim],
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn weights(&self) -> &GruWeights {
        &self.weights
    }

    pub fn hidden(&self) -> &[f64] {
        &self.hidden
    }

    pub fn reset(&mut self) {
        self.hidden.iter_mut().for_each(|h| *h = 0.0);
    }

    /// Raw little-endian bytes of every weight, in declaration order.
    pub fn weight_bytes(&self) -> Vec<u8> {
        self.weights
            .arrays()
            .iter()
            .flat_map(|a| a.iter().flat_map(|v| v.to_le_bytes()))
            .collect()
    }

    /// One unroll: `z = σ(W_z x + U_z h + b_z)`, `r = σ(W_r x + U_r h + b_r)`,
    /// `h̃ = tanh(W_h x + U_h (r∘h) + b_h)`, `h′ = (1−z)∘h + z∘h̃`.
    pub fn step(&mut self, obs: &[f64]) -> Result<&[f64], NnError> {
        check_len("gru observation", self.input_dim, obs.len())?;
        let (n_in, n_h) = (self.input_dim, self.hidden_dim);
        let w = &self.weights;
        let h = &self.hidden;
        let row = |i: usize, n: usize| i * n..(i + 1) * n;

        let mut update = vec![0.0; n_h];
        let mut gated = vec![0.0; n_h];
        for i in 0..n_h {
            let ri = row(i, n_in);
            let rh = row(i, n_h);
            update[i] = sigmoid(dot(&w.w_update[ri.clone()], obs) + dot(&w.u_update[rh.clone()], h) + w.b_update[i]);
            let r = sigmoid(dot(&w.w_reset[ri], obs) + dot(&w.u_reset[rh], h) + w.b_reset[i]);
            gated[i] = r * h[i];
        }
        let mut next = vec![0.0; n_h];
        for i in 0..n_h {
            let ri = row(i, n_in);
            let rh = row(i, n_h);
            let cand = (dot(&w.w_candidate[ri], obs) + dot(&w.u_candidate[rh], &gated) + w.b_candidate[i]).tanh();
            next[i] = (1.0 - update[i]) * h[i] + update[i] * cand;
        }
        self.hidden = next;
        Ok(&self.hidden)
    }

    /// Resets to the zero hidden state and folds [`GruEncoder::step`] over
    /// the sequence. Every element is checked before any state changes.
    pub fn encode<S: AsRef<[f64]>>(&mut self, sequence: &[S]) -> Result<Vec<f64>, NnError> {
        for obs in sequence {
            check_len("gru observation", self.input_dim, obs.as_ref().len())?;
        }
        self.reset();
        for obs in sequence {
            self.step(obs.as_ref())?;
        }
        Ok(self.hidden.clone())
    }

    pub fn write(&self, w: &mut Writer) {
        w.u64(self.input_dim as u64);
        w.u64(self.hidden_dim as u64);
        match self.seed {
            Some(s) => {
                w.u8(1);
                w.u64(s);
            }
            None => w.u8(0),
        }
        for a in self.weights.arrays() {
            w.f64s(a);
        }
        w.f64s(&self.hidden);
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self, CheckpointError> {
        let at = r.offset();
        let input_dim = r.u64()? as usize;
        let hidden_dim = r.u64()? as usize;
        let seed = match r.u8()? {
            0 => None,
            1 => Some(r.u64()?),
            _ => {
                return Err(CheckpointError::Invalid {
                    what: "gru seed flag",
                    offset: at,
                })
            }
        };
        let weights = GruWeights {
            w_update: r.f64s()?,
            u_update: r.f64s()?,
            b_update: r.f64s()?,
            w_reset: r.f64s()?,
            u_reset: r.f64s()?,
            b_reset: r.f64s()?,
            w_candidate: r.f64s()?,
            u_candidate: r.f64s()?,
            b_candidate: r.f64s()?,
        };
        let hidden = r.f64s()?;
        let invalid = CheckpointError::Invalid {
            what: "gru shape",
            offset: at,
        };
        weights.check(input_dim, hidden_dim).map_err(|_| invalid)?;
        if hidden.len() != hidden_dim {
            return Err(CheckpointError::Invalid {
                what: "gru hidden length",
                offset: at,
            });
        }
        Ok(Self {
            input_dim,
            hidden_dim,
            seed,
            weights,
            hidden,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_keep_zero_hidden() {
        let mut enc = GruEncoder::from_weights(3, 4, GruWeights::zeros(3, 4)).unwrap();
        let h = enc.step(&[5.0, -2.0, 1.0]).unwrap();
        assert_eq!(h, &[0.0; 4]);
    }

    #[test]
    fn same_seed_same_hidden() {
        let mut a = GruEncoder::new(3, 8, 42).unwrap();
        let mut b = GruEncoder::new(3, 8, 42).unwrap();
        for t in 0..20 {
            let x = [t as f64 * 0.1, (t as f64).sin(), -1.0];
            a.step(&x).unwrap();
            b.step(&x).unwrap();
        }
        assert_eq!(a.hidden(), b.hidden());
    }

    #[test]
    fn empty_and_single_sequences() {
        let mut enc = GruEncoder::new(2, 5, 1).unwrap();
        let empty: Vec<Vec<f64>> = vec![];
        assert_eq!(enc.encode(&empty).unwrap(), vec![0.0; 5]);
        let one = enc.encode(&[[0.3, -0.4]]).unwrap();
        let mut fresh = GruEncoder::new(2, 5, 1).unwrap();
        assert_eq!(fresh.step(&[0.3, -0.4]).unwrap(), &one[..]);
    }

    #[test]
    fn dimension_errors() {
        let mut enc = GruEncoder::new(2, 3, 1).unwrap();
        assert!(enc.step(&[1.0]).is_err());
        enc.step(&[1.0, 1.0]).unwrap();
        let before = enc.hidden().to_vec();
        assert!(enc.encode(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        assert_eq!(enc.hidden(), &before[..], "failed encode must not touch state");
        assert!(GruEncoder::from_weights(2, 3, GruWeights::zeros(3, 3)).is_err());
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut enc = GruEncoder::new(4, 6, 77).unwrap();
        enc.step(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let mut w = Writer::new();
        enc.write(&mut w);
        let bytes = w.into_bytes();
        let mut r = Reader::new(&bytes);
        let back = GruEncoder::read(&mut r).unwrap();
        r.finish().unwrap();
        assert_eq!(back, enc);
        let mut w2 = Writer::new();
        back.write(&mut w2);
        assert_eq!(w2.into_bytes(), bytes);
    }

    proptest::proptest! {
        #[test]
        fn hidden_stays_bounded(seq in proptest::collection::vec(proptest::collection::vec(-1e3f64..1e3, 3), 1..30), seed in 0u64..1000) {
            let mut enc = GruEncoder::new(3, 8, seed).unwrap();
            for x in &seq {
                let h = enc.step(x).unwrap();
                proptest::prop_assert!(h.iter().all(|v| (-1.0..=1.0).contains(v)));
            }
        }
    }
}
