//! Dense complex Householder QR, enough for the weighted Vandermonde.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use crate::float::Float;
use crate::{Error, Result, C64};

/// Column-major `rows × cols` complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ColMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ColMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[C64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[j * self.rows + i] = v;
    }
}

/// Upper-triangular `n × n` factor, stored densely row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct UpperTriangular {
    n: usize,
    data: Vec<C64>,
}

impl UpperTriangular {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Solves `Rᵀ x = b` (plain transpose) by forward substitution, in place.
    pub fn solve_transpose_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        for k in 0..n {
            let mut acc = b[k];
            for j in 0..k {
                acc -= self.data[j * n + k] * b[j];
            }
            b[k] = acc / self.data[k * n + k];
        }
    }
}

/// Householder QR of `a` (consumed), returning `R` with a positive real
/// diagonal. Fails when a diagonal entry falls below `rank_tol · ‖R‖_F`.
pub fn householder_r(mut a: ColMatrix, rank_tol: f64) -> Result<UpperTriangular> {
    let (m, n) = (a.rows, a.cols);
    if m < n {
        return Err(Error::RankDeficient { column: m });
    }
    let mut r = vec![C64::new(0.0, 0.0); n * n];
    let mut v = vec![C64::new(0.0, 0.0); m];
    for k in 0..n {
        let col = a.column(k);
        let norm = col[k..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let x0 = col[k];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        let vk = &mut v[k..m];
        vk.copy_from_slice(&col[k..]);
        vk[0] -= alpha;
        let vnorm2: f64 = vk.iter().map(|z| z.norm_sqr()).sum();
        for j in k..n {
            let cj = &mut a.data[j * m + k..(j + 1) * m];
            if vnorm2 > 0.0 {
                let dot: C64 = vk.iter().zip(cj.iter()).map(|(vi, ci)| vi.conj() * ci).sum();
                let f = dot * (2.0 / vnorm2);
                for (ci, vi) in cj.iter_mut().zip(vk.iter()) {
                    *ci -= vi * f;
                }
            }
            r[k * n + j] = cj[0];
        }
        // Rotate row k so the diagonal is real and positive.
        let d = r[k * n + k];
        if d.norm() > 0.0 {
            let rot = d.conj() / d.norm();
            for j in k..n {
                r[k * n + j] *= rot;
            }
            r[k * n + k] = C64::new(r[k * n + k].re, 0.0);
        }
    }
    let out = UpperTriangular { n, data: r };
    let threshold = rank_tol * out.frobenius_norm();
    for k in 0..n {
        if !(out.get(k, k).re > threshold) {
            return Err(Error::RankDeficient { column: k });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn r_reproduces_gram_matrix() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let (m, n) = (40, 7);
        let mut a = ColMatrix::zeros(m, n);
        for j in 0..n {
            for i in 0..m {
                a.set(i, j, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        let r = householder_r(a.clone(), 1e-13).unwrap();
        for j in 0..n {
            for k in 0..n {
                let gram: C64 = a.column(j).iter().zip(a.column(k)).map(|(x, y)| x.conj() * y).sum();
                let rr: C64 = (0..n).map(|i| r.get(i, j).conj() * r.get(i, k)).sum();
                assert!((gram - rr).norm() < 1e-12 * (1.0 + gram.norm()));
                if j > k {
                    assert_eq!(r.get(j, k), C64::new(0.0, 0.0));
                }
            }
            assert!(r.get(j, j).re > 0.0 && r.get(j, j).im == 0.0);
        }
    }

    #[test]
    fn dependent_columns_rejected() {
        let mut a = ColMatrix::zeros(5, 2);
        for i in 0..5 {
            a.set(i, 0, C64::new(i as f64, 1.0));
            a.set(i, 1, C64::new(2.0 * i as f64, 2.0));
        }
        assert_eq!(householder_r(a, 1e-13), Err(Error::RankDeficient { column: 1 }));
    }

    #[test]
    fn transpose_solve() {
        let r = UpperTriangular {
            n: 2,
            data: vec![C64::new(2.0, 0.0), C64::new(1.0, 1.0), C64::new(0.0, 0.0), C64::new(4.0, 0.0)],
        };
        let mut b = vec![C64::new(2.0, 0.0), C64::new(5.0, 1.0)];
        r.solve_transpose_in_place(&mut b);
        // x0 = 1, x1 = (5+i − (1+i)) / 4 = 1
        assert!((b[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((b[1] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }
}
