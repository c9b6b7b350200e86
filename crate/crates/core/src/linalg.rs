//! Dense complex matrices and the one-sided Jacobi SVD used as the
//! factorization kernel.
//!
//! Matrices are row-major `Vec<Complex64>`; all dimensions in this crate are
//! small (tens of antennas), so clarity wins over blocking or SIMD. The SVD
//! orthogonalizes column pairs with complex Jacobi rotations, which keeps
//! small singular values at high relative accuracy — enough for the
//! reconstruction bound `‖H − UΣVᴴ‖ ≤ 1e-10 ‖H‖` the oracle promises.

use num_complex::Complex64;

pub type C64 = Complex64;

/// Hermitian inner product `Σ conj(a_i) b_i`.
pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm.
pub fn vnorm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Scale `v` to unit norm in place. Returns the original norm, or `None`
/// (leaving `v` untouched) when it is numerically zero.
pub fn normalize(v: &mut [C64]) -> Option<f64> {
    let n = vnorm(v);
    if n <= 1e-300 {
        return None;
    }
    for z in v.iter_mut() {
        *z /= n;
    }
    Some(n)
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_col(&mut self, c: usize, v: &[C64]) {
        debug_assert_eq!(v.len(), self.rows);
        for (r, z) in v.iter().enumerate() {
            self[(r, c)] = *z;
        }
    }

    /// `A v`
    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// `Aᴴ u`
    pub fn h_matvec(&self, u: &[C64]) -> Vec<C64> {
        debug_assert_eq!(u.len(), self.rows);
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for r in 0..self.rows {
            let ur = u[r];
            for (c, a) in self.row(r).iter().enumerate() {
                out[c] += a.conj() * ur;
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Rank-1 update `self += s · x yᵀ` (no conjugation on `y`).
    pub fn add_outer(&mut self, s: C64, x: &[C64], y: &[C64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(y.len(), self.cols);
        for r in 0..self.rows {
            let xr = s * x[r];
            for c in 0..self.cols {
                self[(r, c)] += xr * y[c];
            }
        }
    }

    /// `x yᵀ` (no conjugation).
    pub fn outer(x: &[C64], y: &[C64]) -> CMat {
        let mut m = CMat::zeros(x.len(), y.len());
        m.add_outer(C64::new(1.0, 0.0), x, y);
        m
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Copy of the `rows × cols` block with top-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> CMat {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        CMat::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)])
    }

    /// Stack matrices with equal column counts on top of each other.
    pub fn vstack<'a>(mats: impl IntoIterator<Item = &'a CMat>) -> CMat {
        let mats: Vec<&CMat> = mats.into_iter().collect();
        assert!(!mats.is_empty());
        let cols = mats[0].cols;
        let rows: usize = mats.iter().map(|m| m.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for m in mats {
            assert_eq!(m.cols, cols);
            data.extend_from_slice(&m.data);
        }
        CMat { rows, cols, data }
    }

    /// Concatenate matrices with equal row counts side by side.
    pub fn hstack<'a>(mats: impl IntoIterator<Item = &'a CMat>) -> CMat {
        let mats: Vec<&CMat> = mats.into_iter().collect();
        assert!(!mats.is_empty());
        let rows = mats[0].rows;
        let cols: usize = mats.iter().map(|m| m.cols).sum();
        let mut out = CMat::zeros(rows, cols);
        let mut offset = 0;
        for m in mats {
            assert_eq!(m.rows, rows);
            for r in 0..rows {
                for c in 0..m.cols {
                    out[(r, offset + c)] = m[(r, c)];
                }
            }
            offset += m.cols;
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Full factorization `A = U Σ Vᴴ` with singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMat,
    pub singular_values: Vec<f64>,
    pub v: CMat,
}

impl Svd {
    /// `U Σ Vᴴ`, for reconstruction checks.
    pub fn reconstruct(&self) -> CMat {
        let mut scaled = self.u.clone();
        for c in 0..scaled.cols() {
            let s = self.singular_values[c];
            for r in 0..scaled.rows() {
                scaled[(r, c)] *= s;
            }
        }
        scaled.mul(&self.v.conj_transpose())
    }
}

const JACOBI_TOL: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 128;

/// One-sided complex Jacobi SVD.
pub fn svd(a: &CMat) -> Svd {
    if a.rows() < a.cols() {
        // Work on Aᴴ = V Σ Uᴴ and swap the factors back.
        let t = svd(&a.conj_transpose());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let m = a.rows();
    let n = a.cols();
    let mut w: Vec<Vec<C64>> = (0..n).map(|c| a.col(c)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|c| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[c] = C64::new(1.0, 0.0);
            e
        })
        .collect();

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                let aii: f64 = w[i].iter().map(|z| z.norm_sqr()).sum();
                let ajj: f64 = w[j].iter().map(|z| z.norm_sqr()).sum();
                let c = vdot(&w[i], &w[j]);
                if c.norm_sqr() <= JACOBI_TOL * JACOBI_TOL * aii * ajj || aii == 0.0 || ajj == 0.0
                {
                    continue;
                }
                rotated = true;
                let abs_c = c.norm();
                let phase = c / abs_c;
                let tau = (ajj - aii) / (2.0 * abs_c);
                // Smaller-magnitude root of t² − 2τt − 1 = 0.
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let s = phase.conj() * (cs * t);
                // Columns (i, j) ← (cs·wi + s·wj, −conj(s)·wi + cs·wj); same for V.
                for col_pair in [&mut w, &mut v] {
                    let (left, right) = col_pair.split_at_mut(j);
                    let wi = &mut left[i];
                    let wj = &mut right[0];
                    for (zi, zj) in wi.iter_mut().zip(wj.iter_mut()) {
                        let a0 = *zi;
                        let b0 = *zj;
                        *zi = a0 * cs + b0 * s;
                        *zj = -(s.conj()) * a0 + b0 * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort descending (stable on ties).
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|c| vnorm(c)).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut u = CMat::zeros(m, n);
    let mut v_out = CMat::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    let cutoff = norms.iter().cloned().fold(0.0_f64, f64::max) * 1e-14;
    let mut deficient = Vec::new();
    for (k, &idx) in order.iter().enumerate() {
        sigma.push(norms[idx]);
        v_out.set_col(k, &v[idx]);
        if norms[idx] > cutoff && norms[idx] > 0.0 {
            let unit: Vec<C64> = w[idx].iter().map(|z| z / norms[idx]).collect();
            u.set_col(k, &unit);
        } else {
            deficient.push(k);
        }
    }
    // Complete U to an orthonormal set for (numerically) zero singular
    // values: take the basis vector with the largest residual against the
    // columns placed so far, with a second orthogonalization pass.
    for k in deficient {
        let mut best_resid = -1.0;
        let mut best = vec![C64::new(0.0, 0.0); m];
        for b in 0..m {
            let mut cand = vec![C64::new(0.0, 0.0); m];
            cand[b] = C64::new(1.0, 0.0);
            for _pass in 0..2 {
                for c in 0..n {
                    if c == k {
                        continue;
                    }
                    let col = u.col(c);
                    let proj = vdot(&col, &cand);
                    for (x, y) in cand.iter_mut().zip(&col) {
                        *x -= proj * y;
                    }
                }
            }
            let r = vnorm(&cand);
            if r > best_resid {
                best_resid = r;
                best = cand;
            }
        }
        normalize(&mut best);
        u.set_col(k, &best);
    }

    Svd {
        u,
        singular_values: sigma,
        v: v_out,
    }
}
