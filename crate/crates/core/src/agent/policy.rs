use rand::Rng;

use super::net::{Mlp, Real};

/// `logits * m + (1 - m) * (-c)` with `m` the mask bit of each slot.
pub fn mask_logits<F: Real>(logits: &[F], mask: u32, c: F, out: &mut [F]) {
    for (j, (o, z)) in out.iter_mut().zip(logits).enumerate() {
        let m = if mask >> j & 1 == 1 {
            F::one()
        } else {
            F::zero()
        };
        *o = *z * m + (F::one() - m) * -c;
    }
}

/// Log-sum-exp with max subtraction.
pub fn logsumexp<F: Real>(z: &[F]) -> F {
    let m = z.iter().copied().fold(F::neg_infinity(), F::max);
    m + z.iter().map(|v| (*v - m).exp()).sum::<F>().ln()
}

pub fn log_softmax<F: Real>(z: &[F], out: &mut [F]) {
    let lse = logsumexp(z);
    for (o, v) in out.iter_mut().zip(z) {
        *o = *v - lse;
    }
}

pub fn softmax<F: Real>(z: &[F]) -> Vec<F> {
    let lse = logsumexp(z);
    z.iter().map(|v| (*v - lse).exp()).collect()
}

pub fn entropy<F: Real>(z: &[F]) -> F {
    let lse = logsumexp(z);
    -z.iter()
        .map(|v| {
            let lp = *v - lse;
            lp.exp() * lp
        })
        .sum::<F>()
}

/// Samples from `softmax(logits)` by inverse CDF with one uniform draw.
/// Slots whose probability is exactly zero are never returned.
pub fn sample_action<F: Real, R: Rng + ?Sized>(logits: &[F], rng: &mut R) -> (usize, F) {
    let lse = logsumexp(logits);
    let u = F::of(rng.gen::<f64>());
    let mut acc = F::zero();
    let mut last = 0;
    for (j, z) in logits.iter().enumerate() {
        let p = (*z - lse).exp();
        if p > F::zero() {
            last = j;
            acc += p;
            if u < acc {
                return (j, *z - lse);
            }
        }
    }
    (last, logits[last] - lse)
}

/// Argmax with ties to the lower index, and its log-probability.
pub fn greedy_action<F: Real>(logits: &[F]) -> (usize, F) {
    let mut best = 0;
    for (j, z) in logits.iter().enumerate() {
        if *z > logits[best] {
            best = j;
        }
    }
    (best, logits[best] - logsumexp(logits))
}

/// Shared trunk with a combined head: `n_actions` logits then one value.
#[derive(Debug, Clone, PartialEq)]
pub struct ActorCritic<F> {
    pub net: Mlp<F>,
    pub n_actions: usize,
}

impl<F: Real> ActorCritic<F> {
    /// Actor weights start small so the initial policy is near uniform.
    pub fn new<R: Rng + ?Sized>(
        input: usize,
        hidden: &[usize],
        n_actions: usize,
        rng: &mut R,
    ) -> Self {
        let mut sizes = vec![input];
        sizes.extend_from_slice(hidden);
        sizes.push(n_actions + 1);
        let mut net = Mlp::new(&sizes, rng);
        net.scale_output_columns(0..n_actions, F::of(0.01));
        ActorCritic { net, n_actions }
    }

    pub fn from_params(sizes: &[usize], n_actions: usize, params: Vec<F>) -> Option<Self> {
        if sizes.last() != Some(&(n_actions + 1)) {
            return None;
        }
        Mlp::from_params(sizes, params).map(|net| ActorCritic { net, n_actions })
    }

    pub fn input_len(&self) -> usize {
        self.net.input_len()
    }

    pub fn acts_len(&self) -> usize {
        self.net.acts_len()
    }

    /// Raw logits and value for one input row.
    pub fn forward<'a>(&self, x: &[F], acts: &'a mut [F]) -> (&'a [F], F) {
        let out = self.net.forward(x, acts);
        (&out[..self.n_actions], out[self.n_actions])
    }

    pub fn cast<G: Real>(&self) -> ActorCritic<G> {
        ActorCritic {
            net: self.net.cast(),
            n_actions: self.n_actions,
        }
    }
}
