use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{backward, batch_loss, EgatError, EgatModel, GraphBatch, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { lr: 1.5e-3, epochs: 50, seed: 0, batch_size: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainReport {
    /// Dropout-free mean loss over the whole training set after each epoch.
    pub loss_history: Vec<f64>,
    /// Edge-weighted mean of the sampled (dropout) minibatch losses per epoch.
    pub train_loss_history: Vec<f64>,
    pub steps: usize,
}

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: i32,
    m: Vec<Matrix>,
    v: Vec<Matrix>,
}

impl Adam {
    pub fn new(lr: f64, shapes: &[(usize, usize)]) -> Adam {
        let zeros = || shapes.iter().map(|&(r, c)| Matrix::zeros(r, c)).collect::<Vec<_>>();
        Adam { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, t: 0, m: zeros(), v: zeros() }
    }

    pub fn step(&mut self, params: Vec<&mut Matrix>, grads: &[Matrix]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for (k, p) in params.into_iter().enumerate() {
            let (m, v, g) = (self.m[k].data_mut(), self.v[k].data_mut(), grads[k].data());
            for (i, w) in p.data_mut().iter_mut().enumerate() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                let mh = m[i] / c1;
                let vh = v[i] / c2;
                *w -= self.lr * mh / (vh.sqrt() + self.eps);
            }
        }
    }
}

fn dataset_loss(model: &EgatModel, data: &[GraphBatch]) -> Result<f64, EgatError> {
    let (mut total, mut edges) = (0.0, 0usize);
    for b in data.iter().filter(|b| b.n_edges() > 0) {
        total += batch_loss(model, b, None)? * b.n_edges() as f64;
        edges += b.n_edges();
    }
    Ok(if edges == 0 { 0.0 } else { total / edges as f64 })
}

/// Trains in place. Minibatches are disjoint unions of graphs, reshuffled
/// every epoch; shuffling and dropout draw from separate streams of `seed`.
pub fn train(model: &mut EgatModel, dataset: &[GraphBatch], cfg: &TrainConfig) -> Result<TrainReport, EgatError> {
    if dataset.iter().all(|b| b.n_edges() == 0) {
        return Err(EgatError::EmptyDataset);
    }
    model.validate()?;
    let shapes: Vec<(usize, usize)> = model.params().iter().map(|m| m.shape()).collect();
    let mut adam = Adam::new(cfg.lr, &shapes);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut dropout_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    dropout_rng.set_stream(1);

    let mut order: Vec<usize> = (0..dataset.len()).filter(|&i| dataset[i].n_edges() > 0).collect();
    let mut report = TrainReport::default();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let (mut total, mut edges) = (0.0, 0usize);
        for (step, chunk) in order.chunks(cfg.batch_size.max(1)).enumerate() {
            let parts: Vec<&GraphBatch> = chunk.iter().map(|&i| &dataset[i]).collect();
            let batch = GraphBatch::union(&parts)?;
            let (loss, grads) = backward(model, &batch, Some(&mut dropout_rng))?;
            if !loss.is_finite() || grads.iter().any(|g| !g.is_finite()) {
                return Err(EgatError::NonFiniteLoss { epoch, step });
            }
            adam.step(model.params_mut(), &grads);
            total += loss * batch.n_edges() as f64;
            edges += batch.n_edges();
            report.steps += 1;
        }
        let eval = dataset_loss(model, dataset)?;
        if !eval.is_finite() {
            return Err(EgatError::NonFiniteLoss { epoch, step: report.steps });
        }
        report.train_loss_history.push(total / edges as f64);
        report.loss_history.push(eval);
    }
    Ok(report)
}
