//! Reverse-mode differentiation over the handful of matrix operations the
//! attention network needs.
//!
//! Every operation appends its result to the tape; [`Tape::backward`] walks
//! the tape in reverse and accumulates adjoints for every recorded value.

use super::matrix::{dot, Matrix};

pub type Var = usize;

/// Probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]` inside the loss.
pub const PROB_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    MatMulT(Var, Var),
    AddRowBias(Var, Var),
    Gather(Var, Vec<usize>),
    ScatterAdd(Var, Vec<usize>),
    Concat(Vec<Var>),
    LeakyRelu(Var, f64),
    MulConst(Var, Matrix),
    Add(Var, Var),
    HeadDot(Var, Var, usize),
    SegmentSoftmax(Var, Vec<usize>),
    HeadScale(Var, Var),
    Sigmoid(Var),
    Bce(Var, Vec<f64>),
}

#[derive(Debug, Clone, Default)]
pub struct Tape {
    values: Vec<Matrix>,
    ops: Vec<Op>,
}

fn leaky(x: f64, slope: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        slope * x
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean binary cross-entropy with clamped probabilities.
pub fn bce_mean(probs: &[f64], labels: &[f64]) -> f64 {
    if probs.is_empty() {
        return 0.0;
    }
    let total: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    total / probs.len() as f64
}

impl Tape {
    pub fn new() -> Tape {
        Tape::default()
    }

    fn push(&mut self, value: Matrix, op: Op) -> Var {
        self.values.push(value);
        self.ops.push(op);
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, v: Var) -> &Matrix {
        &self.values[v]
    }

    pub fn leaf(&mut self, m: Matrix) -> Var {
        self.push(m, Op::Leaf)
    }

    /// `x · wᵀ`.
    pub fn matmul_t(&mut self, x: Var, w: Var) -> Var {
        let out = self.values[x].matmul_t(&self.values[w]);
        self.push(out, Op::MatMulT(x, w))
    }

    pub fn add_row_bias(&mut self, x: Var, b: Var) -> Var {
        let mut out = self.values[x].clone();
        let bias = self.values[b].row(0).to_vec();
        for r in 0..out.rows() {
            for (o, v) in out.row_mut(r).iter_mut().zip(&bias) {
                *o += v;
            }
        }
        self.push(out, Op::AddRowBias(x, b))
    }

    pub fn gather(&mut self, x: Var, idx: &[usize]) -> Var {
        let src = &self.values[x];
        let mut out = Matrix::zeros(idx.len(), src.cols());
        for (r, &i) in idx.iter().enumerate() {
            out.row_mut(r).copy_from_slice(src.row(i));
        }
        self.push(out, Op::Gather(x, idx.to_vec()))
    }

    /// Sums rows of `x` into `n` output rows selected by `idx`.
    pub fn scatter_add(&mut self, x: Var, idx: &[usize], n: usize) -> Var {
        let src = &self.values[x];
        let mut out = Matrix::zeros(n, src.cols());
        for (r, &i) in idx.iter().enumerate() {
            for (o, v) in out.row_mut(i).iter_mut().zip(src.row(r)) {
                *o += v;
            }
        }
        self.push(out, Op::ScatterAdd(x, idx.to_vec()))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        let rows = self.values[parts[0]].rows();
        let cols: usize = parts.iter().map(|&p| self.values[p].cols()).sum();
        let mut out = Matrix::zeros(rows, cols);
        for r in 0..rows {
            let mut off = 0;
            for &p in parts {
                let src = self.values[p].row(r);
                out.row_mut(r)[off..off + src.len()].copy_from_slice(src);
                off += src.len();
            }
        }
        self.push(out, Op::Concat(parts.to_vec()))
    }

    pub fn leaky_relu(&mut self, x: Var, slope: f64) -> Var {
        let mut out = self.values[x].clone();
        out.data_mut().iter_mut().for_each(|v| *v = leaky(*v, slope));
        self.push(out, Op::LeakyRelu(x, slope))
    }

    /// Elementwise product with a constant (dropout masks, row selectors).
    pub fn mul_const(&mut self, x: Var, c: Matrix) -> Var {
        let mut out = self.values[x].clone();
        out.data_mut().iter_mut().zip(c.data()).for_each(|(v, k)| *v *= k);
        self.push(out, Op::MulConst(x, c))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let mut out = self.values[a].clone();
        out.add_assign(&self.values[b]);
        self.push(out, Op::Add(a, b))
    }

    /// Per-head dot product of each row of `x: (m, d)` with `a: (1, d)`,
    /// giving `(m, heads)`.
    pub fn head_dot(&mut self, x: Var, a: Var, heads: usize) -> Var {
        let xs = &self.values[x];
        let av = self.values[a].row(0);
        let w = xs.cols() / heads;
        let mut out = Matrix::zeros(xs.rows(), heads);
        for r in 0..xs.rows() {
            let row = xs.row(r);
            for h in 0..heads {
                out.set(r, h, dot(&row[h * w..(h + 1) * w], &av[h * w..(h + 1) * w]));
            }
        }
        self.push(out, Op::HeadDot(x, a, heads))
    }

    /// Softmax of each column of `e` over the rows sharing a segment id.
    pub fn segment_softmax(&mut self, e: Var, seg: &[usize]) -> Var {
        let ev = &self.values[e];
        let n_seg = seg.iter().copied().max().map_or(0, |m| m + 1);
        let heads = ev.cols();
        let mut max = Matrix::filled(n_seg, heads, f64::NEG_INFINITY);
        for (r, &s) in seg.iter().enumerate() {
            for h in 0..heads {
                if ev.get(r, h) > max.get(s, h) {
                    max.set(s, h, ev.get(r, h));
                }
            }
        }
        let mut out = Matrix::zeros(ev.rows(), heads);
        let mut sum = Matrix::zeros(n_seg, heads);
        for (r, &s) in seg.iter().enumerate() {
            for h in 0..heads {
                let v = (ev.get(r, h) - max.get(s, h)).exp();
                out.set(r, h, v);
                sum.set(s, h, sum.get(s, h) + v);
            }
        }
        for (r, &s) in seg.iter().enumerate() {
            for h in 0..heads {
                out.set(r, h, out.get(r, h) / sum.get(s, h));
            }
        }
        self.push(out, Op::SegmentSoftmax(e, seg.to_vec()))
    }

    /// Scales head block `h` of each row of `x: (m, d)` by `alpha[r, h]`.
    pub fn head_scale(&mut self, x: Var, alpha: Var) -> Var {
        let xs = &self.values[x];
        let al = &self.values[alpha];
        let w = xs.cols() / al.cols();
        let mut out = xs.clone();
        for r in 0..xs.rows() {
            for (c, v) in out.row_mut(r).iter_mut().enumerate() {
                *v *= al.get(r, c / w);
            }
        }
        self.push(out, Op::HeadScale(x, alpha))
    }

    pub fn sigmoid(&mut self, z: Var) -> Var {
        let mut out = self.values[z].clone();
        out.data_mut().iter_mut().for_each(|v| *v = sigmoid(*v));
        self.push(out, Op::Sigmoid(z))
    }

    /// Mean clamped binary cross-entropy of `sigmoid(z)` against `labels`,
    /// as a `(1, 1)` value.
    pub fn bce_with_logits(&mut self, z: Var, labels: &[f64]) -> Var {
        let probs: Vec<f64> = self.values[z].data().iter().map(|&v| sigmoid(v)).collect();
        let loss = bce_mean(&probs, labels);
        self.push(Matrix::filled(1, 1, loss), Op::Bce(z, labels.to_vec()))
    }

    /// Signs of every leaky-ReLU input, in tape order. Finite-difference
    /// checks use this to detect perturbations that cross a kink.
    pub fn kink_pattern(&self) -> Vec<bool> {
        self.ops
            .iter()
            .filter_map(|op| match op {
                Op::LeakyRelu(x, _) => Some(*x),
                _ => None,
            })
            .flat_map(|x| self.values[x].data().iter().map(|v| *v >= 0.0))
            .collect()
    }

    /// Adjoints of every tape value with respect to the scalar `loss`.
    /// Values that do not influence `loss` get `None`.
    pub fn backward(&self, loss: Var) -> Vec<Option<Matrix>> {
        let mut grads: Vec<Option<Matrix>> = vec![None; self.values.len()];
        grads[loss] = Some(Matrix::filled(1, 1, 1.0));
        for v in (0..=loss).rev() {
            let Some(g) = grads[v].take() else { continue };
            self.backprop_one(v, &g, &mut grads);
            grads[v] = Some(g);
        }
        grads
    }

    fn backprop_one(&self, v: Var, g: &Matrix, grads: &mut [Option<Matrix>]) {
        let acc = |grads: &mut [Option<Matrix>], target: Var, delta: Matrix| match &mut grads[target] {
            Some(existing) => existing.add_assign(&delta),
            slot => *slot = Some(delta),
        };
        match &self.ops[v] {
            Op::Leaf => {}
            Op::MatMulT(x, w) => {
                acc(grads, *x, g.matmul(&self.values[*w]));
                acc(grads, *w, g.t_matmul(&self.values[*x]));
            }
            Op::AddRowBias(x, b) => {
                acc(grads, *x, g.clone());
                let mut db = Matrix::zeros(1, g.cols());
                for r in 0..g.rows() {
                    for (o, v) in db.row_mut(0).iter_mut().zip(g.row(r)) {
                        *o += v;
                    }
                }
                acc(grads, *b, db);
            }
            Op::Gather(x, idx) => {
                let src = &self.values[*x];
                let mut dx = Matrix::zeros(src.rows(), src.cols());
                for (r, &i) in idx.iter().enumerate() {
                    for (o, v) in dx.row_mut(i).iter_mut().zip(g.row(r)) {
                        *o += v;
                    }
                }
                acc(grads, *x, dx);
            }
            Op::ScatterAdd(x, idx) => {
                let mut dx = Matrix::zeros(idx.len(), g.cols());
                for (r, &i) in idx.iter().enumerate() {
                    dx.row_mut(r).copy_from_slice(g.row(i));
                }
                acc(grads, *x, dx);
            }
            Op::Concat(parts) => {
                let mut off = 0;
                for &p in parts {
                    let cols = self.values[p].cols();
                    let mut dp = Matrix::zeros(g.rows(), cols);
                    for r in 0..g.rows() {
                        dp.row_mut(r).copy_from_slice(&g.row(r)[off..off + cols]);
                    }
                    acc(grads, p, dp);
                    off += cols;
                }
            }
            Op::LeakyRelu(x, slope) => {
                let mut dx = g.clone();
                for (d, xv) in dx.data_mut().iter_mut().zip(self.values[*x].data()) {
                    if *xv < 0.0 {
                        *d *= slope;
                    }
                }
                acc(grads, *x, dx);
            }
            Op::MulConst(x, c) => {
                let mut dx = g.clone();
                dx.data_mut().iter_mut().zip(c.data()).for_each(|(d, k)| *d *= k);
                acc(grads, *x, dx);
            }
            Op::Add(a, b) => {
                acc(grads, *a, g.clone());
                acc(grads, *b, g.clone());
            }
            Op::HeadDot(x, a, heads) => {
                let xs = &self.values[*x];
                let av = self.values[*a].row(0);
                let w = xs.cols() / heads;
                let mut dx = Matrix::zeros(xs.rows(), xs.cols());
                let mut da = Matrix::zeros(1, xs.cols());
                for r in 0..xs.rows() {
                    for c in 0..xs.cols() {
                        let gh = g.get(r, c / w);
                        dx.set(r, c, gh * av[c]);
                        da.set(0, c, da.get(0, c) + gh * xs.get(r, c));
                    }
                }
                acc(grads, *x, dx);
                acc(grads, *a, da);
            }
            Op::SegmentSoftmax(e, seg) => {
                let alpha = &self.values[v];
                let n_seg = seg.iter().copied().max().map_or(0, |m| m + 1);
                let mut inner = Matrix::zeros(n_seg, alpha.cols());
                for (r, &s) in seg.iter().enumerate() {
                    for h in 0..alpha.cols() {
                        inner.set(s, h, inner.get(s, h) + alpha.get(r, h) * g.get(r, h));
                    }
                }
                let mut de = Matrix::zeros(alpha.rows(), alpha.cols());
                for (r, &s) in seg.iter().enumerate() {
                    for h in 0..alpha.cols() {
                        de.set(r, h, alpha.get(r, h) * (g.get(r, h) - inner.get(s, h)));
                    }
                }
                acc(grads, *e, de);
            }
            Op::HeadScale(x, alpha) => {
                let xs = &self.values[*x];
                let al = &self.values[*alpha];
                let w = xs.cols() / al.cols();
                let mut dx = g.clone();
                let mut dal = Matrix::zeros(al.rows(), al.cols());
                for r in 0..xs.rows() {
                    for c in 0..xs.cols() {
                        let h = c / w;
                        dx.set(r, c, g.get(r, c) * al.get(r, h));
                        dal.set(r, h, dal.get(r, h) + g.get(r, c) * xs.get(r, c));
                    }
                }
                acc(grads, *x, dx);
                acc(grads, *alpha, dal);
            }
            Op::Sigmoid(z) => {
                let mut dz = g.clone();
                for (d, p) in dz.data_mut().iter_mut().zip(self.values[v].data()) {
                    *d *= p * (1.0 - p);
                }
                acc(grads, *z, dz);
            }
            Op::Bce(z, labels) => {
                let zs = &self.values[*z];
                let m = labels.len().max(1) as f64;
                let scale = g.get(0, 0) / m;
                let mut dz = Matrix::zeros(zs.rows(), zs.cols());
                for (d, (&zv, &y)) in dz.data_mut().iter_mut().zip(zs.data().iter().zip(labels)) {
                    let p = sigmoid(zv);
                    // the clamp makes the loss flat in z outside the band
                    if p > PROB_CLAMP && p < 1.0 - PROB_CLAMP {
                        *d = scale * (p - y);
                    }
                }
                acc(grads, *z, dz);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<f64>]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn bce_values() {
        assert!(bce_mean(&[1.0], &[1.0]) < 1e-6);
        assert!((bce_mean(&[0.5], &[1.0]) - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((bce_mean(&[0.9], &[0.0]) - 2.302585092994046).abs() < 1e-9);
        assert_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn segment_softmax_normalizes() {
        let mut t = Tape::new();
        let e = t.leaf(m(&[vec![1.0, 0.0], vec![2.0, 5.0], vec![-3.0, 1.0]]));
        let a = t.segment_softmax(e, &[0, 0, 1]);
        let v = t.value(a);
        assert!((v.get(0, 0) + v.get(1, 0) - 1.0).abs() < 1e-12);
        assert_eq!(v.get(2, 0), 1.0);
        assert_eq!(v.get(2, 1), 1.0);
    }

    #[test]
    fn scalar_chain_gradient() {
        // loss = bce(sigmoid(x·wᵀ)), checked against the closed form (p - y)·x / m
        let mut t = Tape::new();
        let x = t.leaf(m(&[vec![1.0, 2.0], vec![-1.0, 0.5]]));
        let w = t.leaf(m(&[vec![0.3, -0.2]]));
        let z = t.matmul_t(x, w);
        let l = t.bce_with_logits(z, &[1.0, 0.0]);
        let g = t.backward(l);
        let zs = t.value(z).data().to_vec();
        let p: Vec<f64> = zs.iter().map(|&v| sigmoid(v)).collect();
        let want0 = ((p[0] - 1.0) * 1.0 + p[1] * -1.0) / 2.0;
        let want1 = ((p[0] - 1.0) * 2.0 + p[1] * 0.5) / 2.0;
        let gw = g[w].as_ref().unwrap();
        assert!((gw.get(0, 0) - want0).abs() < 1e-15);
        assert!((gw.get(0, 1) - want1).abs() < 1e-15);
    }

    #[test]
    fn unused_values_have_no_gradient() {
        let mut t = Tape::new();
        let x = t.leaf(m(&[vec![1.0]]));
        let unused = t.leaf(m(&[vec![2.0]]));
        let l = t.bce_with_logits(x, &[1.0]);
        let g = t.backward(l);
        assert!(g[unused].is_none());
        assert!(g[x].is_some());
    }
}
