use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::net::Real;
use super::policy::{mask_logits, ActorCritic};
use super::AgentError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpoConfig {
    pub lr: f64,
    pub batch: usize,
    pub num_envs: usize,
    pub rollout_len: usize,
    pub update_epochs: usize,
    pub clip: f64,
    pub gamma: f64,
    pub gae_lambda: f64,
    pub ent_coef: f64,
    pub vf_coef: f64,
    pub max_grad_norm: f64,
    /// Logit assigned to masked actions is `-mask_c`.
    pub mask_c: f64,
    pub weight_decay: f64,
    pub hidden: Vec<usize>,
}

impl Default for PpoConfig {
    fn default() -> Self {
        PpoConfig {
            lr: 7e-4,
            batch: 512,
            num_envs: 256,
            rollout_len: 16,
            update_epochs: 4,
            clip: 0.2,
            gamma: 0.97,
            gae_lambda: 0.95,
            ent_coef: 0.01,
            vf_coef: 0.5,
            max_grad_norm: 0.5,
            mask_c: 1e6,
            weight_decay: 0.0,
            hidden: vec![256, 256],
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |field: &'static str, reason: &str| {
            Err(AgentError::Config {
                field,
                reason: reason.into(),
            })
        };
        if !(self.clip > 0.0 && self.clip < 1.0) {
            return bad("clip", "must be in (0, 1)");
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gamma", "must be in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.gae_lambda) {
            return bad("gae_lambda", "must be in [0, 1]");
        }
        if !(self.mask_c > 0.0 && self.mask_c.is_finite()) {
            return bad("mask_c", "must be positive");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr", "must be positive");
        }
        if self.batch == 0 {
            return bad("batch", "must be positive");
        }
        if self.num_envs == 0 {
            return bad("num_envs", "must be positive");
        }
        if self.rollout_len == 0 {
            return bad("rollout_len", "must be positive");
        }
        if self.update_epochs == 0 {
            return bad("update_epochs", "must be positive");
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return bad("hidden", "needs at least one nonzero layer");
        }
        if self.max_grad_norm <= 0.0
            || self.ent_coef < 0.0
            || self.vf_coef < 0.0
            || self.weight_decay < 0.0
        {
            return bad("coefficients", "must be non-negative");
        }
        Ok(())
    }
}

/// Advantages and returns by the GAE recursion over a `[steps][envs]`
/// layout. `last_values` bootstraps the state after the final step.
pub fn compute_gae<F: Real>(
    rewards: &[F],
    values: &[F],
    dones: &[bool],
    last_values: &[F],
    envs: usize,
    gamma: F,
    lambda: F,
) -> (Vec<F>, Vec<F>) {
    let steps = rewards.len() / envs;
    let mut adv = vec![F::zero(); rewards.len()];
    let mut next_adv = vec![F::zero(); envs];
    for t in (0..steps).rev() {
        for e in 0..envs {
            let i = t * envs + e;
            let next_v = if t + 1 < steps {
                values[i + envs]
            } else {
                last_values[e]
            };
            let live = if dones[i] { F::zero() } else { F::one() };
            let delta = rewards[i] + gamma * next_v * live - values[i];
            let a = delta + gamma * lambda * live * next_adv[e];
            adv[i] = a;
            next_adv[e] = a;
        }
    }
    let ret = adv.iter().zip(values).map(|(a, v)| *a + *v).collect();
    (adv, ret)
}

/// Mean 0, std 1, with the std floored at 1e-8.
pub fn normalize<F: Real>(x: &mut [F]) {
    if x.is_empty() {
        return;
    }
    let n = F::of(x.len() as f64);
    let mean = x.iter().copied().sum::<F>() / n;
    let var = x.iter().map(|v| (*v - mean) * (*v - mean)).sum::<F>() / n;
    let std = var.sqrt().max(F::of(1e-8));
    for v in x.iter_mut() {
        *v = (*v - mean) / std;
    }
}

/// Rows of one optimization batch.
#[derive(Debug, Clone, Copy)]
pub struct Batch<'a, F> {
    pub inputs: &'a [F],
    pub actions: &'a [u8],
    pub logp_old: &'a [F],
    pub advantages: &'a [F],
    pub returns: &'a [F],
    pub masks: &'a [u32],
}

impl<F> Batch<'_, F> {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub loss: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub clip_fraction: f64,
    pub approx_kl: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct LossCoefs {
    pub clip: f64,
    pub vf_coef: f64,
    pub ent_coef: f64,
    pub mask_c: f64,
}

impl From<&PpoConfig> for LossCoefs {
    fn from(c: &PpoConfig) -> Self {
        LossCoefs {
            clip: c.clip,
            vf_coef: c.vf_coef,
            ent_coef: c.ent_coef,
            mask_c: c.mask_c,
        }
    }
}

/// Scratch buffers reused across calls.
#[derive(Debug, Default)]
pub struct Workspace<F> {
    acts: Vec<F>,
    zm: Vec<F>,
    lp: Vec<F>,
    dout: Vec<F>,
    scratch: Vec<F>,
}

/// Mean clipped-surrogate loss plus value and entropy terms over `batch`,
/// with log-probabilities recomputed through the stored masks. When
/// `grad` is given, the gradient of the mean is added into it.
pub fn ppo_loss<F: Real>(
    ac: &ActorCritic<F>,
    batch: &Batch<'_, F>,
    k: &LossCoefs,
    mut grad: Option<&mut [F]>,
    ws: &mut Workspace<F>,
) -> LossReport {
    let n = batch.len();
    let na = ac.n_actions;
    let d = ac.input_len();
    let inv_n = F::of(1.0 / n as f64);
    let (eps, vf, ent, c) = (
        F::of(k.clip),
        F::of(k.vf_coef),
        F::of(k.ent_coef),
        F::of(k.mask_c),
    );
    ws.acts.resize(ac.acts_len(), F::zero());
    ws.zm.resize(na, F::zero());
    ws.lp.resize(na, F::zero());
    ws.dout.resize(na + 1, F::zero());
    let mut rep = LossReport::default();
    for i in 0..n {
        let x = &batch.inputs[i * d..(i + 1) * d];
        let a = batch.actions[i] as usize;
        let mask = batch.masks[i];
        let (adv, ret) = (batch.advantages[i], batch.returns[i]);
        let (logits, v) = ac.forward(x, &mut ws.acts);
        mask_logits(logits, mask, c, &mut ws.zm);
        super::policy::log_softmax(&ws.zm, &mut ws.lp);
        let h = -ws.lp.iter().map(|l| l.exp() * *l).sum::<F>();
        let log_ratio = ws.lp[a] - batch.logp_old[i];
        let ratio = log_ratio.exp();
        let s1 = ratio * adv;
        let s2 = ratio.max(F::one() - eps).min(F::one() + eps) * adv;
        let pg = -s1.min(s2);
        let verr = v - ret;
        rep.policy_loss += pg.to_f64().unwrap();
        rep.value_loss += (verr * verr).to_f64().unwrap();
        rep.entropy += h.to_f64().unwrap();
        rep.approx_kl += ((ratio - F::one()) - log_ratio).to_f64().unwrap();
        if (ratio - F::one()).abs() > eps {
            rep.clip_fraction += 1.0;
        }
        if let Some(g) = grad.as_deref_mut() {
            // d(pg)/d(lp_a): zero once the clipped term is the minimum.
            let g_pg = if s1 <= s2 { -adv * ratio } else { F::zero() };
            for j in 0..na {
                let p = ws.lp[j].exp();
                let onehot = if j == a { F::one() } else { F::zero() };
                let dzm = g_pg * (onehot - p) + ent * p * (ws.lp[j] + h);
                let m = if mask >> j & 1 == 1 {
                    F::one()
                } else {
                    F::zero()
                };
                ws.dout[j] = dzm * m * inv_n;
            }
            ws.dout[na] = vf * F::of(2.0) * verr * inv_n;
            ac.net.backward(x, &ws.acts, &ws.dout, g, &mut ws.scratch);
        }
    }
    let nf = n as f64;
    rep.policy_loss /= nf;
    rep.value_loss /= nf;
    rep.entropy /= nf;
    rep.clip_fraction /= nf;
    rep.approx_kl /= nf;
    rep.loss = rep.policy_loss + k.vf_coef * rep.value_loss - k.ent_coef * rep.entropy;
    rep
}

/// Adam with decoupled weight decay.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamW {
    pub m: Vec<f32>,
    pub v: Vec<f32>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl AdamW {
    pub fn new(n: usize, weight_decay: f64) -> AdamW {
        AdamW {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay,
        }
    }

    pub fn step(&mut self, params: &mut [f32], grad: &[f32], lr: f64) {
        self.t += 1;
        let (b1, b2) = (self.beta1 as f32, self.beta2 as f32);
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        let step = (lr * c2.sqrt() / c1) as f32;
        let eps = (self.eps * c2.sqrt()) as f32;
        let decay = (lr * self.weight_decay) as f32;
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = b1 * self.m[i] + (1.0 - b1) * g;
            self.v[i] = b2 * self.v[i] + (1.0 - b2) * g * g;
            params[i] -= decay * params[i];
            params[i] -= step * self.m[i] / (self.v[i].sqrt() + eps);
        }
    }
}

/// Scales `grad` so its Euclidean norm is at most `max_norm`; returns the
/// norm before clipping.
pub fn clip_grad_norm(grad: &mut [f32], max_norm: f64) -> f64 {
    let norm = grad
        .iter()
        .map(|g| (*g as f64) * (*g as f64))
        .sum::<f64>()
        .sqrt();
    if norm > max_norm {
        let s = (max_norm / (norm + 1e-6)) as f32;
        for g in grad.iter_mut() {
            *g *= s;
        }
    }
    norm
}

/// Transitions from one rollout, `[steps][envs]` row-major.
#[derive(Debug, Clone)]
pub struct RolloutBuffer {
    pub steps: usize,
    pub envs: usize,
    pub input_len: usize,
    pub inputs: Vec<f32>,
    pub actions: Vec<u8>,
    pub logp: Vec<f32>,
    pub values: Vec<f32>,
    pub rewards: Vec<f32>,
    pub dones: Vec<bool>,
    pub masks: Vec<u32>,
    pub advantages: Vec<f32>,
    pub returns: Vec<f32>,
}

impl RolloutBuffer {
    pub fn new(steps: usize, envs: usize, input_len: usize) -> RolloutBuffer {
        let n = steps * envs;
        RolloutBuffer {
            steps,
            envs,
            input_len,
            inputs: vec![0.0; n * input_len],
            actions: vec![0; n],
            logp: vec![0.0; n],
            values: vec![0.0; n],
            rewards: vec![0.0; n],
            dones: vec![false; n],
            masks: vec![0; n],
            advantages: vec![0.0; n],
            returns: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn input(&self, i: usize) -> &[f32] {
        &self.inputs[i * self.input_len..(i + 1) * self.input_len]
    }

    pub fn input_mut(&mut self, i: usize) -> &mut [f32] {
        &mut self.inputs[i * self.input_len..(i + 1) * self.input_len]
    }

    pub fn finish(&mut self, last_values: &[f32], gamma: f64, lambda: f64) {
        let (adv, ret) = compute_gae(
            &self.rewards,
            &self.values,
            &self.dones,
            last_values,
            self.envs,
            gamma as f32,
            lambda as f32,
        );
        self.advantages = adv;
        self.returns = ret;
    }
}

/// Optimizer state plus reusable minibatch storage.
#[derive(Debug)]
pub struct Learner {
    pub adam: AdamW,
    grad: Vec<f32>,
    ws: Workspace<f32>,
    mb_inputs: Vec<f32>,
    mb_actions: Vec<u8>,
    mb_logp: Vec<f32>,
    mb_adv: Vec<f32>,
    mb_ret: Vec<f32>,
    mb_masks: Vec<u32>,
}

impl Learner {
    pub fn new(n_params: usize, weight_decay: f64) -> Learner {
        Learner {
            adam: AdamW::new(n_params, weight_decay),
            grad: vec![0.0; n_params],
            ws: Workspace::default(),
            mb_inputs: Vec::new(),
            mb_actions: Vec::new(),
            mb_logp: Vec::new(),
            mb_adv: Vec::new(),
            mb_ret: Vec::new(),
            mb_masks: Vec::new(),
        }
    }

    /// `update_epochs` passes of shuffled minibatches. On a non-finite loss
    /// or parameter the parameters and optimizer are restored.
    pub fn update<R: Rng + ?Sized>(
        &mut self,
        ac: &mut ActorCritic<f32>,
        buf: &RolloutBuffer,
        cfg: &PpoConfig,
        rng: &mut R,
    ) -> Result<LossReport, AgentError> {
        let saved = (ac.net.params.clone(), self.adam.clone());
        let coefs = LossCoefs::from(cfg);
        let d = buf.input_len;
        let mut order: Vec<usize> = (0..buf.len()).collect();
        let mut total = LossReport::default();
        let mut batches = 0usize;
        for _ in 0..cfg.update_epochs {
            order.shuffle(rng);
            for chunk in order.chunks(cfg.batch) {
                self.mb_inputs.clear();
                self.mb_actions.clear();
                self.mb_logp.clear();
                self.mb_adv.clear();
                self.mb_ret.clear();
                self.mb_masks.clear();
                for &i in chunk {
                    self.mb_inputs
                        .extend_from_slice(&buf.inputs[i * d..(i + 1) * d]);
                    self.mb_actions.push(buf.actions[i]);
                    self.mb_logp.push(buf.logp[i]);
                    self.mb_adv.push(buf.advantages[i]);
                    self.mb_ret.push(buf.returns[i]);
                    self.mb_masks.push(buf.masks[i]);
                }
                normalize(&mut self.mb_adv);
                let batch = Batch {
                    inputs: &self.mb_inputs,
                    actions: &self.mb_actions,
                    logp_old: &self.mb_logp,
                    advantages: &self.mb_adv,
                    returns: &self.mb_ret,
                    masks: &self.mb_masks,
                };
                self.grad.fill(0.0);
                let rep = ppo_loss(ac, &batch, &coefs, Some(&mut self.grad), &mut self.ws);
                if !rep.loss.is_finite() || self.grad.iter().any(|g| !g.is_finite()) {
                    ac.net.params = saved.0;
                    self.adam = saved.1;
                    return Err(AgentError::NonFinite("loss"));
                }
                clip_grad_norm(&mut self.grad, cfg.max_grad_norm);
                self.adam.step(&mut ac.net.params, &self.grad, cfg.lr);
                if ac.net.params.iter().any(|p| !p.is_finite()) {
                    ac.net.params = saved.0;
                    self.adam = saved.1;
                    return Err(AgentError::NonFinite("parameters"));
                }
                total.loss += rep.loss;
                total.policy_loss += rep.policy_loss;
                total.value_loss += rep.value_loss;
                total.entropy += rep.entropy;
                total.clip_fraction += rep.clip_fraction;
                total.approx_kl += rep.approx_kl;
                batches += 1;
            }
        }
        let b = batches.max(1) as f64;
        Ok(LossReport {
            loss: total.loss / b,
            policy_loss: total.policy_loss / b,
            value_loss: total.value_loss / b,
            entropy: total.entropy / b,
            clip_fraction: total.clip_fraction / b,
            approx_kl: total.approx_kl / b,
        })
    }
}
