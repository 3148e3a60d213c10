//! Tape-based reverse-mode differentiation over [`Tensor`]s.
//!
//! A [`Graph`] borrows a [`ParamStore`] for the length of one forward pass.
//! Every operation appends a node holding its output; [`Graph::backward`]
//! walks the tape in reverse and returns the gradient of each parameter.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::param::{Gradients, ParamId, ParamStore};
use super::tensor::{Scalar, Tensor};
use crate::error::{Error, Result};

/// Handle to a node in a [`Graph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var(usize);

enum Op<T: Scalar> {
    Leaf,
    Param(ParamId),
    MatMul(Var, Var),
    Add(Var, Var),
    AddRow(Var, Var),
    Mul(Var, Var),
    Sigmoid(Var),
    Tanh(Var),
    SliceCols(Var, usize),
    ConcatCols(Vec<Var>),
    Softmax(Var),
    LogSoftmax(Var),
    Embed(Var, Vec<u32>),
    Dropout(Var, Vec<T>),
    Blend(Var, Var, Vec<bool>),
    CrossEntropy {
        logits: Var,
        targets: Vec<u32>,
        weights: Vec<T>,
        probs: Tensor<T>,
    },
    Interleave(Vec<Var>),
    BatchedDot(Var, Var),
    WeightedSum(Var, Var),
    Sum(Var),
    Scale(Var, T),
}

struct Node<T: Scalar> {
    /// `None` for parameter nodes, whose value lives in the store.
    value: Option<Tensor<T>>,
    op: Op<T>,
    needs_grad: bool,
}

pub struct Graph<'p, T: Scalar = f32> {
    params: &'p ParamStore<T>,
    nodes: Vec<Node<T>>,
    param_vars: Vec<Option<Var>>,
    dropout_rng: Option<ChaCha8Rng>,
    backward_done: bool,
}

impl<'p, T: Scalar> Graph<'p, T> {
    /// A graph in evaluation mode: dropout is the identity.
    pub fn new(params: &'p ParamStore<T>) -> Self {
        Graph {
            params,
            nodes: Vec::new(),
            param_vars: vec![None; params.len()],
            dropout_rng: None,
            backward_done: false,
        }
    }

    /// A graph in training mode; dropout masks are drawn from `rng`.
    pub fn training(params: &'p ParamStore<T>, rng: ChaCha8Rng) -> Self {
        Graph {
            dropout_rng: Some(rng),
            ..Graph::new(params)
        }
    }

    pub fn is_training(&self) -> bool {
        self.dropout_rng.is_some()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor<T> {
        let node = &self.nodes[v.0];
        match (&node.value, &node.op) {
            (Some(t), _) => t,
            (None, Op::Param(id)) => self.params.value(*id),
            (None, _) => unreachable!("only parameter nodes borrow their value"),
        }
    }

    pub fn shape(&self, v: Var) -> [usize; 2] {
        self.value(v).shape()
    }

    fn push(&mut self, value: Tensor<T>, op: Op<T>, inputs: &[Var]) -> Var {
        let needs_grad = inputs.iter().any(|v| self.nodes[v.0].needs_grad);
        self.nodes.push(Node {
            value: Some(value),
            op,
            needs_grad,
        });
        Var(self.nodes.len() - 1)
    }

    /// A constant input; receives no gradient.
    pub fn constant(&mut self, value: Tensor<T>) -> Var {
        self.nodes.push(Node {
            value: Some(value),
            op: Op::Leaf,
            needs_grad: false,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn zeros(&mut self, rows: usize, cols: usize) -> Var {
        self.constant(Tensor::zeros(rows, cols))
    }

    /// The node for a stored parameter. Repeated calls return the same node.
    pub fn param(&mut self, id: ParamId) -> Var {
        if let Some(v) = self.param_vars[id.index()] {
            return v;
        }
        self.nodes.push(Node {
            value: None,
            op: Op::Param(id),
            needs_grad: true,
        });
        let v = Var(self.nodes.len() - 1);
        self.param_vars[id.index()] = Some(v);
        v
    }

    fn mismatch(op: &'static str, left: [usize; 2], right: [usize; 2]) -> Error {
        Error::Shape { op, left, right }
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = self.value(a).matmul(self.value(b))?;
        Ok(self.push(out, Op::MatMul(a, b), &[a, b]))
    }

    fn same_shape(&self, op: &'static str, a: Var, b: Var) -> Result<()> {
        let (sa, sb) = (self.shape(a), self.shape(b));
        if sa != sb {
            return Err(Self::mismatch(op, sa, sb));
        }
        Ok(())
    }

    fn zip_map(&self, a: Var, b: Var, f: impl Fn(T, T) -> T) -> Tensor<T> {
        let (ta, tb) = (self.value(a), self.value(b));
        let data = ta
            .data()
            .iter()
            .zip(tb.data())
            .map(|(&x, &y)| f(x, y))
            .collect();
        Tensor::from_vec(ta.rows(), ta.cols(), data).expect("same shape")
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("add", a, b)?;
        let out = self.zip_map(a, b, |x, y| x + y);
        Ok(self.push(out, Op::Add(a, b), &[a, b]))
    }

    /// Add a `1 x n` row to every row of `a`.
    pub fn add_row(&mut self, a: Var, bias: Var) -> Result<Var> {
        let (sa, sb) = (self.shape(a), self.shape(bias));
        if sb[0] != 1 || sb[1] != sa[1] {
            return Err(Self::mismatch("add_row", sa, sb));
        }
        let mut out = self.value(a).clone();
        let b = self.value(bias).data();
        for r in 0..sa[0] {
            for (x, &y) in out.row_mut(r).iter_mut().zip(b) {
                *x = *x + y;
            }
        }
        Ok(self.push(out, Op::AddRow(a, bias), &[a, bias]))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("mul", a, b)?;
        let out = self.zip_map(a, b, |x, y| x * y);
        Ok(self.push(out, Op::Mul(a, b), &[a, b]))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let one = T::one();
        let out = self.value(a).map(|x| one / (one + (-x).exp()));
        self.push(out, Op::Sigmoid(a), &[a])
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let out = self.value(a).map(|x| x.tanh());
        self.push(out, Op::Tanh(a), &[a])
    }

    /// Columns `start..start + width`.
    pub fn slice_cols(&mut self, a: Var, start: usize, width: usize) -> Result<Var> {
        let src = self.value(a);
        if start + width > src.cols() {
            return Err(Self::mismatch("slice_cols", src.shape(), [start, width]));
        }
        let mut data = Vec::with_capacity(src.rows() * width);
        for r in 0..src.rows() {
            data.extend_from_slice(&src.row(r)[start..start + width]);
        }
        let out = Tensor::from_vec(src.rows(), width, data)?;
        Ok(self.push(out, Op::SliceCols(a, start), &[a]))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Result<Var> {
        let rows = self.shape(parts[0])[0];
        let mut cols = 0;
        for &p in parts {
            let s = self.shape(p);
            if s[0] != rows {
                return Err(Self::mismatch("concat_cols", self.shape(parts[0]), s));
            }
            cols += s[1];
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for &p in parts {
                data.extend_from_slice(self.value(p).row(r));
            }
        }
        let out = Tensor::from_vec(rows, cols, data)?;
        Ok(self.push(out, Op::ConcatCols(parts.to_vec()), parts))
    }

    /// Row-wise softmax.
    pub fn softmax(&mut self, a: Var) -> Var {
        let out = softmax_rows(self.value(a), None);
        self.push(out, Op::Softmax(a), &[a])
    }

    /// Row-wise softmax over the first `lengths[r]` columns of row `r`; the
    /// remaining columns get probability zero.
    pub fn masked_softmax(&mut self, a: Var, lengths: &[usize]) -> Result<Var> {
        let s = self.shape(a);
        if lengths.len() != s[0] || lengths.iter().any(|&l| l > s[1]) {
            return Err(Self::mismatch("masked_softmax", s, [lengths.len(), 1]));
        }
        let out = softmax_rows(self.value(a), Some(lengths));
        Ok(self.push(out, Op::Softmax(a), &[a]))
    }

    pub fn log_softmax(&mut self, a: Var) -> Var {
        let src = self.value(a);
        let mut out = src.clone();
        for r in 0..src.rows() {
            let lse = log_sum_exp(src.row(r));
            for x in out.row_mut(r) {
                *x = *x - lse;
            }
        }
        self.push(out, Op::LogSoftmax(a), &[a])
    }

    /// Rows of `table` selected by `ids`.
    pub fn embed(&mut self, table: Var, ids: &[u32]) -> Result<Var> {
        let t = self.value(table);
        if let Some(&bad) = ids.iter().find(|&&i| i as usize >= t.rows()) {
            return Err(Self::mismatch("embed", t.shape(), [bad as usize, 0]));
        }
        let idx: Vec<usize> = ids.iter().map(|&i| i as usize).collect();
        let out = t.gather_rows(&idx);
        Ok(self.push(out, Op::Embed(table, ids.to_vec()), &[table]))
    }

    /// Inverted dropout with drop probability `p`; the identity outside
    /// training mode.
    pub fn dropout(&mut self, a: Var, p: f64) -> Var {
        if self.dropout_rng.is_none() || p <= 0.0 {
            return a;
        }
        let n = self.value(a).data().len();
        let keep = T::from_f64_lossy(1.0 / (1.0 - p));
        let rng = self.dropout_rng.as_mut().expect("training mode");
        let mask: Vec<T> = (0..n)
            .map(|_| if rng.gen::<f64>() < p { T::zero() } else { keep })
            .collect();
        let src = self.value(a);
        let data = src.data().iter().zip(&mask).map(|(&x, &m)| x * m).collect();
        let out = Tensor::from_vec(src.rows(), src.cols(), data).expect("same shape");
        self.push(out, Op::Dropout(a, mask), &[a])
    }

    /// Row `r` from `new` where `mask[r]`, otherwise from `old`.
    pub fn blend_rows(&mut self, new: Var, old: Var, mask: &[bool]) -> Result<Var> {
        self.same_shape("blend_rows", new, old)?;
        let s = self.shape(new);
        if mask.len() != s[0] {
            return Err(Self::mismatch("blend_rows", s, [mask.len(), 1]));
        }
        let mut out = self.value(old).clone();
        let src = self.value(new);
        for (r, &m) in mask.iter().enumerate() {
            if m {
                out.row_mut(r).copy_from_slice(src.row(r));
            }
        }
        Ok(self.push(out, Op::Blend(new, old, mask.to_vec()), &[new, old]))
    }

    /// Weighted sum over rows of `-log softmax(logits)[target]`, as a `1 x 1`
    /// tensor.
    pub fn cross_entropy(&mut self, logits: Var, targets: &[u32], weights: &[T]) -> Result<Var> {
        let src = self.value(logits);
        let s = src.shape();
        if targets.len() != s[0] || weights.len() != s[0] {
            return Err(Self::mismatch("cross_entropy", s, [targets.len(), 1]));
        }
        if let Some(&bad) = targets.iter().find(|&&t| t as usize >= s[1]) {
            return Err(Self::mismatch("cross_entropy", s, [bad as usize, 0]));
        }
        let probs = softmax_rows(src, None);
        let mut loss = T::zero();
        for (r, (&t, &w)) in targets.iter().zip(weights).enumerate() {
            if w != T::zero() {
                let row = src.row(r);
                loss = loss + w * (log_sum_exp(row) - row[t as usize]);
            }
        }
        let op = Op::CrossEntropy {
            logits,
            targets: targets.to_vec(),
            weights: weights.to_vec(),
            probs,
        };
        Ok(self.push(Tensor::scalar(loss), op, &[logits]))
    }

    /// Stack `S` tensors of shape `B x H` into `(B*S) x H`, with step `s` of
    /// batch row `b` at row `b * S + s`.
    pub fn interleave(&mut self, steps: &[Var]) -> Result<Var> {
        let shape = self.shape(steps[0]);
        for &v in steps {
            if self.shape(v) != shape {
                return Err(Self::mismatch("interleave", shape, self.shape(v)));
            }
        }
        let (b, h, s) = (shape[0], shape[1], steps.len());
        let mut data = Vec::with_capacity(b * s * h);
        for r in 0..b {
            for &v in steps {
                data.extend_from_slice(self.value(v).row(r));
            }
        }
        let out = Tensor::from_vec(b * s, h, data)?;
        Ok(self.push(out, Op::Interleave(steps.to_vec()), steps))
    }

    /// `out[b, s] = query[b] . keys[b * S + s]` for queries `B x H` and keys
    /// `(B*S) x H`.
    pub fn batched_dot(&mut self, query: Var, keys: Var) -> Result<Var> {
        let (q, k) = (self.value(query), self.value(keys));
        let (b, h) = (q.rows(), q.cols());
        if k.cols() != h || b == 0 || k.rows() % b != 0 {
            return Err(Self::mismatch("batched_dot", q.shape(), k.shape()));
        }
        let s = k.rows() / b;
        let mut out = Tensor::zeros(b, s);
        for r in 0..b {
            let qr = q.row(r);
            for j in 0..s {
                out.row_mut(r)[j] = dot(qr, k.row(r * s + j));
            }
        }
        Ok(self.push(out, Op::BatchedDot(query, keys), &[query, keys]))
    }

    /// `out[b] = sum_s weights[b, s] * values[b * S + s]`.
    pub fn weighted_sum(&mut self, weights: Var, values: Var) -> Result<Var> {
        let (w, v) = (self.value(weights), self.value(values));
        let (b, s) = (w.rows(), w.cols());
        if v.rows() != b * s {
            return Err(Self::mismatch("weighted_sum", w.shape(), v.shape()));
        }
        let h = v.cols();
        let mut out = Tensor::zeros(b, h);
        for r in 0..b {
            for j in 0..s {
                let wj = w.get(r, j);
                let src = v.row(r * s + j);
                for (o, &x) in out.row_mut(r).iter_mut().zip(src) {
                    *o = *o + wj * x;
                }
            }
        }
        Ok(self.push(out, Op::WeightedSum(weights, values), &[weights, values]))
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let total = self.value(a).data().iter().copied().sum();
        self.push(Tensor::scalar(total), Op::Sum(a), &[a])
    }

    pub fn scale(&mut self, a: Var, factor: T) -> Var {
        let out = self.value(a).map(|x| x * factor);
        self.push(out, Op::Scale(a, factor), &[a])
    }

    /// Gradients of the `1 x 1` node `loss` with respect to every parameter.
    /// May run once per graph.
    pub fn backward(&mut self, loss: Var) -> Result<Gradients<T>> {
        if self.backward_done {
            return Err(Error::BackwardTwice);
        }
        let s = self.shape(loss);
        if s != [1, 1] {
            return Err(Self::mismatch("backward", s, [1, 1]));
        }
        self.backward_done = true;

        let mut grads: Vec<Option<Tensor<T>>> = Vec::with_capacity(loss.0 + 1);
        grads.resize_with(loss.0 + 1, || None);
        grads[loss.0] = Some(Tensor::scalar(T::one()));
        let mut param_grads: Vec<Option<Tensor<T>>> = vec![None; self.params.len()];

        for i in (0..=loss.0).rev() {
            if !self.nodes[i].needs_grad {
                continue;
            }
            let Some(g) = grads[i].take() else { continue };
            self.backward_node(i, g, &mut grads, &mut param_grads);
        }
        Ok(Gradients(param_grads))
    }

    fn backward_node(
        &self,
        i: usize,
        g: Tensor<T>,
        grads: &mut [Option<Tensor<T>>],
        param_grads: &mut [Option<Tensor<T>>],
    ) {
        let one = T::one();
        let y = || self.nodes[i].value.as_ref().expect("op output");
        match &self.nodes[i].op {
            Op::Leaf => {}
            Op::Param(id) => match &mut param_grads[id.index()] {
                Some(acc) => acc.add_assign(&g),
                slot @ None => *slot = Some(g),
            },
            Op::MatMul(a, b) => {
                let (ta, tb) = (self.value(*a), self.value(*b));
                self.acc(grads, *a, |ga| ga.gemm_from(one, &g, false, tb, true, one));
                self.acc(grads, *b, |gb| gb.gemm_from(one, ta, true, &g, false, one));
            }
            Op::Add(a, b) => {
                self.acc(grads, *a, |ga| ga.add_assign(&g));
                self.acc(grads, *b, |gb| gb.add_assign(&g));
            }
            Op::AddRow(a, bias) => {
                self.acc(grads, *a, |ga| ga.add_assign(&g));
                self.acc(grads, *bias, |gb| {
                    for r in 0..g.rows() {
                        for (x, &d) in gb.data_mut().iter_mut().zip(g.row(r)) {
                            *x = *x + d;
                        }
                    }
                });
            }
            Op::Mul(a, b) => {
                let (ta, tb) = (self.value(*a), self.value(*b));
                self.acc(grads, *a, |ga| axpy_prod(ga.data_mut(), g.data(), tb.data()));
                self.acc(grads, *b, |gb| axpy_prod(gb.data_mut(), g.data(), ta.data()));
            }
            Op::Sigmoid(a) => {
                let y = y();
                self.acc(grads, *a, |ga| {
                    for ((x, &d), &s) in ga.data_mut().iter_mut().zip(g.data()).zip(y.data()) {
                        *x = *x + d * s * (one - s);
                    }
                });
            }
            Op::Tanh(a) => {
                let y = y();
                self.acc(grads, *a, |ga| {
                    for ((x, &d), &t) in ga.data_mut().iter_mut().zip(g.data()).zip(y.data()) {
                        *x = *x + d * (one - t * t);
                    }
                });
            }
            Op::SliceCols(a, start) => {
                let w = g.cols();
                self.acc(grads, *a, |ga| {
                    for r in 0..g.rows() {
                        let dst = &mut ga.row_mut(r)[*start..*start + w];
                        for (x, &d) in dst.iter_mut().zip(g.row(r)) {
                            *x = *x + d;
                        }
                    }
                });
            }
            Op::ConcatCols(parts) => {
                let mut offset = 0;
                for &p in parts {
                    let w = self.shape(p)[1];
                    self.acc(grads, p, |gp| {
                        for r in 0..g.rows() {
                            let src = &g.row(r)[offset..offset + w];
                            for (x, &d) in gp.row_mut(r).iter_mut().zip(src) {
                                *x = *x + d;
                            }
                        }
                    });
                    offset += w;
                }
            }
            Op::Softmax(a) => {
                let y = y();
                self.acc(grads, *a, |ga| {
                    for r in 0..g.rows() {
                        let (yr, gr) = (y.row(r), g.row(r));
                        let inner = dot(yr, gr);
                        for ((x, &p), &d) in ga.row_mut(r).iter_mut().zip(yr).zip(gr) {
                            *x = *x + p * (d - inner);
                        }
                    }
                });
            }
            Op::LogSoftmax(a) => {
                let y = y();
                self.acc(grads, *a, |ga| {
                    for r in 0..g.rows() {
                        let gr = g.row(r);
                        let total: T = gr.iter().copied().sum();
                        for ((x, &l), &d) in ga.row_mut(r).iter_mut().zip(y.row(r)).zip(gr) {
                            *x = *x + d - l.exp() * total;
                        }
                    }
                });
            }
            Op::Embed(table, ids) => {
                self.acc(grads, *table, |gt| {
                    for (r, &id) in ids.iter().enumerate() {
                        for (x, &d) in gt.row_mut(id as usize).iter_mut().zip(g.row(r)) {
                            *x = *x + d;
                        }
                    }
                });
            }
            Op::Dropout(a, mask) => {
                self.acc(grads, *a, |ga| axpy_prod(ga.data_mut(), g.data(), mask));
            }
            Op::Blend(new, old, mask) => {
                for (v, take) in [(*new, true), (*old, false)] {
                    self.acc(grads, v, |gv| {
                        for (r, &m) in mask.iter().enumerate() {
                            if m == take {
                                for (x, &d) in gv.row_mut(r).iter_mut().zip(g.row(r)) {
                                    *x = *x + d;
                                }
                            }
                        }
                    });
                }
            }
            Op::CrossEntropy {
                logits,
                targets,
                weights,
                probs,
            } => {
                let upstream = g.item();
                self.acc(grads, *logits, |gl| {
                    for (r, (&t, &w)) in targets.iter().zip(weights).enumerate() {
                        if w == T::zero() {
                            continue;
                        }
                        let scale = upstream * w;
                        let row = gl.row_mut(r);
                        for (x, &p) in row.iter_mut().zip(probs.row(r)) {
                            *x = *x + scale * p;
                        }
                        row[t as usize] = row[t as usize] - scale;
                    }
                });
            }
            Op::Interleave(steps) => {
                let s = steps.len();
                for (j, &v) in steps.iter().enumerate() {
                    self.acc(grads, v, |gv| {
                        for r in 0..gv.rows() {
                            let src = g.row(r * s + j);
                            for (x, &d) in gv.row_mut(r).iter_mut().zip(src) {
                                *x = *x + d;
                            }
                        }
                    });
                }
            }
            Op::BatchedDot(query, keys) => {
                let (q, k) = (self.value(*query), self.value(*keys));
                let s = g.cols();
                self.acc(grads, *query, |gq| {
                    for r in 0..g.rows() {
                        for j in 0..s {
                            let d = g.get(r, j);
                            for (x, &kv) in gq.row_mut(r).iter_mut().zip(k.row(r * s + j)) {
                                *x = *x + d * kv;
                            }
                        }
                    }
                });
                self.acc(grads, *keys, |gk| {
                    for r in 0..g.rows() {
                        for j in 0..s {
                            let d = g.get(r, j);
                            for (x, &qv) in gk.row_mut(r * s + j).iter_mut().zip(q.row(r)) {
                                *x = *x + d * qv;
                            }
                        }
                    }
                });
            }
            Op::WeightedSum(weights, values) => {
                let (w, v) = (self.value(*weights), self.value(*values));
                let s = w.cols();
                self.acc(grads, *weights, |gw| {
                    for r in 0..w.rows() {
                        for j in 0..s {
                            gw.row_mut(r)[j] = gw.row(r)[j] + dot(g.row(r), v.row(r * s + j));
                        }
                    }
                });
                self.acc(grads, *values, |gv| {
                    for r in 0..w.rows() {
                        for j in 0..s {
                            let wj = w.get(r, j);
                            for (x, &d) in gv.row_mut(r * s + j).iter_mut().zip(g.row(r)) {
                                *x = *x + wj * d;
                            }
                        }
                    }
                });
            }
            Op::Sum(a) => {
                let d = g.item();
                self.acc(grads, *a, |ga| {
                    for x in ga.data_mut() {
                        *x = *x + d;
                    }
                });
            }
            Op::Scale(a, factor) => {
                self.acc(grads, *a, |ga| {
                    for (x, &d) in ga.data_mut().iter_mut().zip(g.data()) {
                        *x = *x + *factor * d;
                    }
                });
            }
        }
    }

    /// Run `f` on the gradient buffer of `v`, creating it zeroed if needed.
    fn acc(&self, grads: &mut [Option<Tensor<T>>], v: Var, f: impl FnOnce(&mut Tensor<T>)) {
        if !self.nodes[v.0].needs_grad {
            return;
        }
        let slot = &mut grads[v.0];
        if slot.is_none() {
            let [r, c] = self.shape(v);
            *slot = Some(Tensor::zeros(r, c));
        }
        f(slot.as_mut().expect("just created"));
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn axpy_prod<T: Scalar>(dst: &mut [T], a: &[T], b: &[T]) {
    for ((x, &p), &q) in dst.iter_mut().zip(a).zip(b) {
        *x = *x + p * q;
    }
}

pub(crate) fn log_sum_exp<T: Scalar>(row: &[T]) -> T {
    let max = row.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    let total: T = row.iter().map(|&x| (x - max).exp()).sum();
    max + total.ln()
}

fn softmax_rows<T: Scalar>(src: &Tensor<T>, lengths: Option<&[usize]>) -> Tensor<T> {
    let mut out = Tensor::zeros(src.rows(), src.cols());
    for r in 0..src.rows() {
        let n = lengths.map_or(src.cols(), |l| l[r]);
        if n == 0 {
            continue;
        }
        let row = &src.row(r)[..n];
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        let dst = &mut out.row_mut(r)[..n];
        let mut total = T::zero();
        for (d, &x) in dst.iter_mut().zip(row) {
            *d = (x - max).exp();
            total = total + *d;
        }
        for d in dst {
            *d = *d / total;
        }
    }
    out
}
