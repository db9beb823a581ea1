//! Dense real tensors, first index fastest.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub dims: Vec<usize>,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(dims: &[usize]) -> Self {
        Self { dims: dims.to_vec(), data: vec![0.0; dims.iter().product()] }
    }

    pub fn from_data(dims: &[usize], data: Vec<f64>) -> Self {
        assert_eq!(dims.iter().product::<usize>(), data.len(), "shape mismatch");
        Self { dims: dims.to_vec(), data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn strides(dims: &[usize]) -> Vec<usize> {
        let mut s = Vec::with_capacity(dims.len());
        let mut acc = 1;
        for &d in dims {
            s.push(acc);
            acc *= d;
        }
        s
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        let mut off = 0;
        let mut acc = 1;
        for (i, d) in idx.iter().zip(&self.dims) {
            off += i * acc;
            acc *= d;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn reshape(mut self, dims: &[usize]) -> Self {
        assert_eq!(dims.iter().product::<usize>(), self.data.len(), "reshape size mismatch");
        self.dims = dims.to_vec();
        self
    }

    /// Axis `k` of the result is axis `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Tensor {
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return self.clone();
        }
        let src = Self::strides(&self.dims);
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let st: Vec<usize> = perm.iter().map(|&p| src[p]).collect();
        let mut out = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; dims.len()];
        let mut off = 0usize;
        if self.data.is_empty() {
            return Tensor { dims, data: out };
        }
        let d0 = dims[0];
        let s0 = st[0];
        loop {
            for i in 0..d0 {
                out.push(self.data[off + i * s0]);
            }
            // advance the odometer over axes 1..
            let mut k = 1;
            loop {
                if k == dims.len() {
                    return Tensor { dims, data: out };
                }
                idx[k] += 1;
                off += st[k];
                if idx[k] < dims[k] {
                    break;
                }
                off -= st[k] * dims[k];
                idx[k] = 0;
                k += 1;
            }
        }
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, c: f64) {
        self.data.iter_mut().for_each(|x| *x *= c);
    }
}

/// Thin SVD `(U, s, Vᵀ)` with a reconstruction check.
///
/// The default deflation threshold of nalgebra can stop early with a wrong
/// factorization, so this runs at machine epsilon and falls back to the
/// transpose when `U diag(s) Vᵀ` misses `m` by more than `1e-12 ‖m‖`.
pub fn svd_checked(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let tol = 1e-12 * m.amax().max(f64::MIN_POSITIVE);
    let direct = |a: &DMatrix<f64>| {
        let svd = a.clone().try_svd(true, true, f64::EPSILON, 0)?;
        Some((svd.u?, svd.singular_values, svd.v_t?))
    };
    let error = |(u, s, vt): &(DMatrix<f64>, DVector<f64>, DMatrix<f64>)| (u * DMatrix::from_diagonal(s) * vt - m).amax();
    let first = direct(m);
    if let Some(f) = &first {
        if error(f) <= tol {
            return first.unwrap();
        }
    }
    let second = direct(&m.transpose()).map(|(u, s, vt)| (vt.transpose(), s, u.transpose()));
    [first, second]
        .into_iter()
        .flatten()
        .min_by(|a, b| error(a).total_cmp(&error(b)))
        .expect("SVD did not converge")
}

/// `C = A B` for column-major `A (m×k)`, `B (k×n)`.
pub fn matmul(m: usize, k: usize, n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; m * n];
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // SAFETY: slices hold m*k, k*n and m*n elements with the given strides.
    unsafe {
        matrixmultiply::dgemm(
            m, k, n, 1.0,
            a.as_ptr(), 1, m as isize,
            b.as_ptr(), 1, k as isize,
            0.0,
            c.as_mut_ptr(), 1, m as isize,
        );
    }
    c
}

/// Contracts axes `ca` of `a` with axes `cb` of `b`; the result carries the
/// free axes of `a` followed by the free axes of `b`.
pub fn tensordot(a: &Tensor, b: &Tensor, ca: &[usize], cb: &[usize]) -> Tensor {
    assert_eq!(ca.len(), cb.len());
    for (&i, &j) in ca.iter().zip(cb) {
        assert_eq!(a.dims[i], b.dims[j], "contracted dimensions differ");
    }
    let fa: Vec<usize> = (0..a.dims.len()).filter(|i| !ca.contains(i)).collect();
    let fb: Vec<usize> = (0..b.dims.len()).filter(|i| !cb.contains(i)).collect();
    let pa: Vec<usize> = fa.iter().chain(ca).copied().collect();
    let pb: Vec<usize> = cb.iter().chain(&fb).copied().collect();
    let at = a.permute(&pa);
    let bt = b.permute(&pb);
    let m: usize = fa.iter().map(|&i| a.dims[i]).product();
    let k: usize = ca.iter().map(|&i| a.dims[i]).product();
    let n: usize = fb.iter().map(|&i| b.dims[i]).product();
    let data = matmul(m, k, n, &at.data, &bt.data);
    let dims: Vec<usize> = fa.iter().map(|&i| a.dims[i]).chain(fb.iter().map(|&i| b.dims[i])).collect();
    Tensor { dims, data }
}
