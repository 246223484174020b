//! AdamW with decoupled weight decay and a linear-warmup cosine schedule.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::model::{LogisticModel, LossGrad};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub lr: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub warmup_epochs: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 5e-3,
            weight_decay: 0.01,
            batch_size: 32,
            epochs: 20,
            warmup_epochs: 1,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad(format!("lr = {} must be positive", self.lr));
        }
        if self.weight_decay.is_nan() || self.weight_decay < 0.0 {
            return bad(format!("weight_decay = {} must be >= 0", self.weight_decay));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return bad(format!("{name} = {b} must lie in [0, 1)"));
            }
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return bad("eps must be positive".into());
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if self.epochs < self.warmup_epochs {
            return bad(format!(
                "epochs ({}) must be >= warmup_epochs ({})",
                self.epochs, self.warmup_epochs
            ));
        }
        Ok(())
    }
}

/// Learning rate for update `step` (0-based): linear ramp `0 → base_lr` over
/// `warmup_steps`, then half-cosine decay to 0 at `total_steps`.
pub fn lr_schedule(step: usize, total_steps: usize, warmup_steps: usize, base_lr: f64) -> f64 {
    if step < warmup_steps {
        return base_lr * step as f64 / warmup_steps as f64;
    }
    let span = total_steps.saturating_sub(warmup_steps);
    if span == 0 {
        return 0.0;
    }
    let progress = ((step - warmup_steps) as f64 / span as f64).min(1.0);
    base_lr * 0.5 * (1.0 + (PI * progress).cos())
}

/// First and second moment accumulators.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m_w: Vec<f64>,
    pub v_w: Vec<f64>,
    pub m_b: f64,
    pub v_b: f64,
    /// Updates taken so far.
    pub t: u64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        Self {
            m_w: vec![0.0; dim],
            v_w: vec![0.0; dim],
            m_b: 0.0,
            v_b: 0.0,
            t: 0,
        }
    }
}

#[inline]
#[allow(clippy::too_many_arguments)]
fn update(
    theta: &mut f64,
    g: f64,
    m: &mut f64,
    v: &mut f64,
    lr: f64,
    bc1: f64,
    bc2: f64,
    cfg: &TrainConfig,
) {
    *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
    *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
    let m_hat = *m / bc1;
    let v_hat = *v / bc2;
    *theta = *theta - lr * (m_hat / (v_hat.sqrt() + cfg.eps)) - lr * cfg.weight_decay * *theta;
}

/// One AdamW update at learning rate `lr`; decay applies to every parameter.
pub fn adamw_step(
    model: &mut LogisticModel,
    grads: &LossGrad,
    state: &mut AdamState,
    lr: f64,
    cfg: &TrainConfig,
) {
    state.t += 1;
    let t = state.t as i32;
    let bc1 = 1.0 - cfg.beta1.powi(t);
    let bc2 = 1.0 - cfg.beta2.powi(t);
    for i in 0..model.weights.len() {
        update(
            &mut model.weights[i],
            grads.grad_w[i],
            &mut state.m_w[i],
            &mut state.v_w[i],
            lr,
            bc1,
            bc2,
            cfg,
        );
    }
    update(
        &mut model.bias,
        grads.grad_b,
        &mut state.m_b,
        &mut state.v_b,
        lr,
        bc1,
        bc2,
        cfg,
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::featurize::FEATURE_DIM;

    fn grads(g: f64) -> LossGrad {
        LossGrad {
            loss: 0.0,
            grad_w: vec![g; FEATURE_DIM],
            grad_b: g,
        }
    }

    #[test]
    fn schedule_endpoints() {
        assert_eq!(lr_schedule(0, 100, 10, 5e-3), 0.0);
        assert_eq!(lr_schedule(10, 100, 10, 5e-3), 5e-3);
        assert!(lr_schedule(100, 100, 10, 5e-3).abs() < 1e-12);
        assert!((lr_schedule(5, 100, 10, 1.0) - 0.5).abs() < 1e-15);
        assert!((lr_schedule(55, 100, 10, 1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn schedule_is_monotone_after_warmup() {
        let mut prev = f64::INFINITY;
        for s in 10..=100 {
            let lr = lr_schedule(s, 100, 10, 1.0);
            assert!(lr <= prev);
            prev = lr;
        }
    }

    #[test]
    fn zero_gradient_without_decay_is_a_no_op() {
        let cfg = TrainConfig {
            weight_decay: 0.0,
            ..TrainConfig::default()
        };
        let mut m = LogisticModel::default();
        m.weights[2] = 0.7;
        m.bias = -0.3;
        let before = m.clone();
        let mut st = AdamState::new(FEATURE_DIM);
        adamw_step(&mut m, &grads(0.0), &mut st, 1e-2, &cfg);
        assert_eq!(m, before);
    }

    #[test]
    fn first_step_moves_against_the_gradient_sign() {
        let cfg = TrainConfig {
            weight_decay: 0.0,
            ..TrainConfig::default()
        };
        for g in [-3.0, -1e-3, 0.5, 20.0] {
            let mut m = LogisticModel::default();
            let mut st = AdamState::new(FEATURE_DIM);
            let lr = 1e-2;
            adamw_step(&mut m, &grads(g), &mut st, lr, &cfg);
            let want = -lr * g / (g.abs() + cfg.eps);
            assert!((m.bias - want).abs() <= 1e-12);
            assert!((m.bias + lr * g.signum()).abs() < 1e-7);
        }
    }

    #[test]
    fn pure_decay_shrinks_multiplicatively() {
        let cfg = TrainConfig::default();
        let mut m = LogisticModel::default();
        m.weights.iter_mut().enumerate().for_each(|(i, w)| *w = i as f64 - 5.0);
        m.bias = 2.0;
        let before = m.clone();
        let mut st = AdamState::new(FEATURE_DIM);
        let lr = 5e-3;
        adamw_step(&mut m, &grads(0.0), &mut st, lr, &cfg);
        let k = 1.0 - lr * cfg.weight_decay;
        for (a, b) in m.weights.iter().zip(&before.weights) {
            assert!((a - k * b).abs() <= 1e-12);
        }
        assert!((m.bias - k * before.bias).abs() <= 1e-12);
    }

    #[test]
    fn config_validation() {
        TrainConfig::default().validate().unwrap();
        for bad in [
            TrainConfig { lr: 0.0, ..Default::default() },
            TrainConfig { beta1: 1.0, ..Default::default() },
            TrainConfig { epochs: 0, warmup_epochs: 1, ..Default::default() },
            TrainConfig { batch_size: 0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
