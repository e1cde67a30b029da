//! Minimal dense-tensor kernel with reverse-mode differentiation.
//!
//! Covers exactly the operations the retrieval pipeline needs: 64-bit,
//! row-major, rank-1/rank-2 tensors, no broadcasting beyond bias-add and
//! row-wise ops. Every differentiable op is validated against central
//! finite differences by [`grad_check`].
//!
//! Tensors are immutable after construction; the only mutation is gradient
//! accumulation during a single-threaded backward pass, so values can be
//! shared read-only across threads.

mod backward;
mod grad_check;
mod ops;

pub use grad_check::{grad_check, GradCheckReport};
pub use ops::Op;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use crate::error::{CirError, Result};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Dense row-major f64 tensor, shared by handle.
///
/// Cloning is O(1) and shares the underlying node; ops build a computation
/// graph over these nodes for reverse-mode differentiation.
#[derive(Clone)]
pub struct Tensor {
    inner: Arc<TensorInner>,
}

pub(crate) struct TensorInner {
    id: u64,
    shape: Vec<usize>,
    data: Vec<f64>,
    requires_grad: bool,
    grad: Mutex<Option<Vec<f64>>>,
    parents: Vec<Tensor>,
    op: Op,
}

fn check_shape(shape: &[usize], len: usize) -> Result<()> {
    let numel: usize = shape.iter().product();
    if numel != len {
        return Err(CirError::Shape(format!(
            "shape {:?} implies {} elements, data has {}",
            shape, numel, len
        )));
    }
    if shape.is_empty() || shape.len() > 2 {
        return Err(CirError::Shape(format!(
            "only rank-1 and rank-2 tensors are supported, got shape {:?}",
            shape
        )));
    }
    Ok(())
}

impl Tensor {
    /// Leaf tensor that does not track gradients.
    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Tensor> {
        check_shape(shape, data.len())?;
        Ok(Tensor::leaf(shape.to_vec(), data, false))
    }

    /// Leaf tensor that accumulates gradients during backward passes.
    pub fn param(shape: &[usize], data: Vec<f64>) -> Result<Tensor> {
        check_shape(shape, data.len())?;
        Ok(Tensor::leaf(shape.to_vec(), data, true))
    }

    pub fn zeros(shape: &[usize]) -> Tensor {
        let numel = shape.iter().product();
        Tensor::leaf(shape.to_vec(), vec![0.0; numel], false)
    }

    pub fn scalar(v: f64) -> Tensor {
        Tensor::leaf(vec![1], vec![v], false)
    }

    /// n x n identity matrix.
    pub fn identity(n: usize) -> Tensor {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Tensor::leaf(vec![n, n], data, false)
    }

    fn leaf(shape: Vec<usize>, data: Vec<f64>, requires_grad: bool) -> Tensor {
        Tensor {
            inner: Arc::new(TensorInner {
                id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
                shape,
                data,
                requires_grad,
                grad: Mutex::new(None),
                parents: Vec::new(),
                op: Op::Leaf,
            }),
        }
    }

    pub(crate) fn from_op(shape: Vec<usize>, data: Vec<f64>, parents: Vec<Tensor>, op: Op) -> Tensor {
        let requires_grad = parents.iter().any(|p| p.requires_grad());
        Tensor {
            inner: Arc::new(TensorInner {
                id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
                shape,
                data,
                requires_grad,
                grad: Mutex::new(None),
                parents,
                op,
            }),
        }
    }

    pub(crate) fn id(&self) -> u64 {
        self.inner.id
    }

    pub fn shape(&self) -> &[usize] {
        &self.inner.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.inner.data
    }

    pub fn numel(&self) -> usize {
        self.inner.data.len()
    }

    /// Row count for matrices; vectors count as a single row.
    pub fn rows(&self) -> usize {
        if self.inner.shape.len() == 2 {
            self.inner.shape[0]
        } else {
            1
        }
    }

    /// Column count for matrices; the length for vectors.
    pub fn cols(&self) -> usize {
        *self.inner.shape.last().unwrap()
    }

    pub fn is_matrix(&self) -> bool {
        self.inner.shape.len() == 2
    }

    /// Value of a single-element tensor.
    pub fn item(&self) -> f64 {
        assert_eq!(self.numel(), 1, "item() on a non-scalar tensor");
        self.inner.data[0]
    }

    pub fn requires_grad(&self) -> bool {
        self.inner.requires_grad
    }

    /// Copy of the accumulated gradient, if a backward pass reached this node.
    pub fn grad(&self) -> Option<Vec<f64>> {
        self.inner.grad.lock().unwrap().clone()
    }

    pub fn zero_grad(&self) {
        *self.inner.grad.lock().unwrap() = None;
    }

    pub(crate) fn accumulate_grad(&self, contribution: &[f64]) {
        let mut guard = self.inner.grad.lock().unwrap();
        match guard.as_mut() {
            Some(g) => {
                for (gi, ci) in g.iter_mut().zip(contribution) {
                    *gi += ci;
                }
            }
            None => *guard = Some(contribution.to_vec()),
        }
    }

    pub(crate) fn parents(&self) -> &[Tensor] {
        &self.inner.parents
    }

    pub(crate) fn op(&self) -> &Op {
        &self.inner.op
    }

    /// Errors with the first offending index if any value is NaN/Inf.
    pub fn assert_finite(&self, what: &str) -> Result<()> {
        for (i, v) in self.inner.data.iter().enumerate() {
            if !v.is_finite() {
                return Err(CirError::Numeric(format!(
                    "non-finite value {} at index {} in {}",
                    v, i, what
                )));
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for Tensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Tensor(shape={:?}, requires_grad={}",
            self.inner.shape, self.inner.requires_grad
        )?;
        if self.numel() <= 8 {
            write!(f, ", data={:?}", self.inner.data)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_validation() {
        assert!(Tensor::from_vec(&[2, 2], vec![1.0; 4]).is_ok());
        assert!(Tensor::from_vec(&[2, 3], vec![1.0; 4]).is_err());
        assert!(Tensor::from_vec(&[2, 2, 2], vec![1.0; 8]).is_err());
    }

    #[test]
    fn finite_check_names_index() {
        let t = Tensor::from_vec(&[3], vec![1.0, f64::NAN, 2.0]).unwrap();
        let err = t.assert_finite("probe").unwrap_err();
        assert!(err.to_string().contains("index 1"));
    }

    #[test]
    fn identity_matrix() {
        let i = Tensor::identity(2);
        assert_eq!(i.data(), &[1.0, 0.0, 0.0, 1.0]);
    }
}
