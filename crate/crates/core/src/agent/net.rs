use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};
use rand::Rng;

/// Scalar type of the networks: `f32` for training, `f64` for checks.
pub trait Real:
    Float
    + FromPrimitive
    + Default
    + Debug
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + Send
    + Sync
    + 'static
{
    fn of(x: f64) -> Self {
        Self::from_f64(x).unwrap()
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
fn axpy<F: Real>(y: &mut [F], a: F, x: &[F]) {
    for (y, x) in y.iter_mut().zip(x) {
        *y += a * *x;
    }
}

#[inline]
fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |s, (a, b)| s + *a * *b)
}

/// Fully connected ReLU network with a linear output layer. Parameters
/// live in one flat vector: per layer, the `[in][out]` weight matrix row
/// by row, then the bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<F> {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    pub params: Vec<F>,
}

impl<F: Real> Mlp<F> {
    /// He-uniform hidden layers, LeCun-uniform output layer, zero biases.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Mlp<F> {
        assert!(sizes.len() >= 2 && sizes.iter().all(|s| *s > 0));
        let mut offsets = Vec::with_capacity(sizes.len() - 1);
        let mut n = 0;
        for l in 0..sizes.len() - 1 {
            offsets.push(n);
            n += sizes[l] * sizes[l + 1] + sizes[l + 1];
        }
        let mut params = vec![F::zero(); n];
        for l in 0..sizes.len() - 1 {
            let (fan_in, out) = (sizes[l], sizes[l + 1]);
            let last = l == sizes.len() - 2;
            let bound = if last {
                (3.0 / fan_in as f64).sqrt()
            } else {
                (6.0 / fan_in as f64).sqrt()
            };
            for p in &mut params[offsets[l]..offsets[l] + fan_in * out] {
                *p = F::of(rng.gen_range(-bound..bound));
            }
        }
        Mlp {
            sizes: sizes.to_vec(),
            offsets,
            params,
        }
    }

    pub fn from_params(sizes: &[usize], params: Vec<F>) -> Option<Mlp<F>> {
        let mut m = Mlp {
            sizes: sizes.to_vec(),
            offsets: Vec::new(),
            params: Vec::new(),
        };
        let mut n = 0;
        for l in 0..sizes.len().checked_sub(1)? {
            m.offsets.push(n);
            n += sizes[l] * sizes[l + 1] + sizes[l + 1];
        }
        (n == params.len() && sizes.len() >= 2).then(|| Mlp { params, ..m })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_len(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_len(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    /// Length of the activation buffer used by `forward`.
    pub fn acts_len(&self) -> usize {
        self.sizes[1..].iter().sum()
    }

    fn weights(&self, l: usize) -> (usize, usize) {
        (
            self.offsets[l],
            self.offsets[l] + self.sizes[l] * self.sizes[l + 1],
        )
    }

    /// Scales the output-layer weights of columns `cols` by `s`.
    pub fn scale_output_columns(&mut self, cols: std::ops::Range<usize>, s: F) {
        let l = self.sizes.len() - 2;
        let (w, _) = self.weights(l);
        let out = self.sizes[l + 1];
        for i in 0..self.sizes[l] {
            for c in cols.clone() {
                self.params[w + i * out + c] *= s;
            }
        }
    }

    /// Writes every layer's output into `acts` (hidden layers after ReLU)
    /// and returns the final layer's slice. Zero inputs are skipped, which
    /// makes one-hot observations cheap.
    pub fn forward<'a>(&self, x: &[F], acts: &'a mut [F]) -> &'a [F] {
        debug_assert_eq!(x.len(), self.sizes[0]);
        let layers = self.sizes.len() - 1;
        let mut start = 0;
        for l in 0..layers {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let (w, b) = self.weights(l);
            let (prev, rest) = acts.split_at_mut(start);
            let input: &[F] = if l == 0 { x } else { &prev[start - n_in..] };
            let y = &mut rest[..n_out];
            y.copy_from_slice(&self.params[b..b + n_out]);
            for i in 0..n_in {
                let xi = input[i];
                if xi != F::zero() {
                    axpy(y, xi, &self.params[w + i * n_out..w + (i + 1) * n_out]);
                }
            }
            if l + 1 < layers {
                for v in y.iter_mut() {
                    if *v < F::zero() {
                        *v = F::zero();
                    }
                }
            }
            start += n_out;
        }
        &acts[start - self.sizes[layers]..start]
    }

    /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
    /// `acts` must come from `forward` on the same `x`.
    pub fn backward(&self, x: &[F], acts: &[F], dout: &[F], grad: &mut [F], scratch: &mut Vec<F>) {
        let layers = self.sizes.len() - 1;
        let widest = *self.sizes.iter().max().unwrap();
        scratch.clear();
        scratch.resize(2 * widest, F::zero());
        let (cur, next) = scratch.split_at_mut(widest);
        cur[..dout.len()].copy_from_slice(dout);
        let mut end = acts.len();
        for l in (0..layers).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let (w, b) = self.weights(l);
            end -= n_out;
            let input: &[F] = if l == 0 { x } else { &acts[end - n_in..end] };
            let delta = &cur[..n_out];
            for (g, d) in grad[b..b + n_out].iter_mut().zip(delta) {
                *g += *d;
            }
            for i in 0..n_in {
                let xi = input[i];
                if xi != F::zero() {
                    axpy(&mut grad[w + i * n_out..w + (i + 1) * n_out], xi, delta);
                }
            }
            if l > 0 {
                for i in 0..n_in {
                    // Post-ReLU activation: zero means the unit was off.
                    next[i] = if input[i] > F::zero() {
                        dot(&self.params[w + i * n_out..w + (i + 1) * n_out], delta)
                    } else {
                        F::zero()
                    };
                }
                cur[..n_in].copy_from_slice(&next[..n_in]);
            }
        }
    }

    pub fn cast<G: Real>(&self) -> Mlp<G> {
        Mlp {
            sizes: self.sizes.clone(),
            offsets: self.offsets.clone(),
            params: self
                .params
                .iter()
                .map(|p| G::of(p.to_f64().unwrap()))
                .collect(),
        }
    }
}
