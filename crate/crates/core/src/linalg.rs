//! Banded complex linear algebra.
//!
//! Every system the library solves (division by `r` or `sin θ`, the
//! bordered Helmholtz modes, the poloidal/toroidal θ-systems) is banded, so a
//! single LU with partial pivoting on band storage covers them all.

use crate::real::{czero, Real, C};

/// Square banded matrix with `kl` sub- and `ku` super-diagonals.
///
/// Storage reserves `kl` extra super-diagonals for pivoting fill, so entry
/// `(r, c)` with `-kl <= c - r <= ku + kl` lives at `r * width + (c + kl - r)`.
#[derive(Clone, Debug)]
pub struct BandMatrix<T: Real> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<C<T>>,
}

impl<T: Real> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![czero(); n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn off(&self, r: usize, c: usize) -> Option<usize> {
        let d = c as isize - r as isize;
        if d < -(self.kl as isize) || d > (self.ku + self.kl) as isize || r >= self.n || c >= self.n {
            None
        } else {
            Some(r * self.width + (d + self.kl as isize) as usize)
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C<T> {
        self.off(r, c).map_or_else(czero, |o| self.data[o])
    }

    /// Adds `v` to entry `(r, c)`; panics if outside the declared band.
    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: C<T>) {
        let d = c as isize - r as isize;
        assert!(
            d >= -(self.kl as isize) && d <= self.ku as isize,
            "entry ({r}, {c}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let o = self.off(r, c).expect("in band");
        self.data[o] += v;
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C<T>) {
        let o = self.off(r, c).expect("in band");
        self.data[o] = v;
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        (0..self.n)
            .map(|r| {
                let lo = r.saturating_sub(self.kl);
                let hi = (r + self.ku).min(self.n - 1);
                (lo..=hi).fold(czero(), |acc, c| acc + self.get(r, c) * x[c])
            })
            .collect()
    }

    fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, z| a.max(z.norm()))
    }

    /// LU factorisation with partial pivoting. Fails if a pivot is
    /// negligible relative to the largest matrix entry.
    pub fn factor(mut self) -> Result<BandLu<T>, SingularPivot> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let scale = self.max_abs();
        let tiny = scale * T::epsilon() * T::from_usize_lossy(n.max(1)) * T::lit(1e-3);
        let mut piv = vec![0usize; n];
        let mut lmul = vec![czero::<T>(); n * kl];
        let mut min_pivot = T::infinity();
        for j in 0..n {
            let last = (j + kl).min(n - 1);
            let (mut p, mut best) = (j, T::zero());
            for r in j..=last {
                let a = self.get(r, j).norm();
                if a > best {
                    best = a;
                    p = r;
                }
            }
            if best <= tiny || best == T::zero() {
                return Err(SingularPivot { column: j, magnitude: best.as_f64() });
            }
            min_pivot = min_pivot.min(best);
            piv[j] = p;
            let cend = (j + kl + ku).min(n - 1);
            if p != j {
                for c in j..=cend {
                    let (a, b) = (self.off(j, c).unwrap(), self.off(p, c).unwrap());
                    self.data.swap(a, b);
                }
            }
            let d = self.get(j, j);
            for r in j + 1..=last {
                let l = self.get(r, j) / d;
                lmul[j * kl + (r - j - 1)] = l;
                if l == czero() {
                    continue;
                }
                for c in j + 1..=cend {
                    let u = self.data[self.off(j, c).unwrap()];
                    let o = self.off(r, c).unwrap();
                    self.data[o] -= l * u;
                }
                let o = self.off(r, j).unwrap();
                self.data[o] = czero();
            }
        }
        Ok(BandLu { a: self, piv, lmul, min_pivot })
    }
}

/// Failure to factor: the pivot column and its best available magnitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularPivot {
    pub column: usize,
    pub magnitude: f64,
}

/// Factors produced by [`BandMatrix::factor`].
#[derive(Clone, Debug)]
pub struct BandLu<T: Real> {
    a: BandMatrix<T>,
    piv: Vec<usize>,
    lmul: Vec<C<T>>,
    min_pivot: T,
}

impl<T: Real> BandLu<T> {
    pub fn min_pivot(&self) -> T {
        self.min_pivot
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C<T>]) {
        let a = &self.a;
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        assert_eq!(b.len(), n);
        for j in 0..n {
            b.swap(j, self.piv[j]);
            let bj = b[j];
            if bj == czero() {
                continue;
            }
            let last = (j + kl).min(n - 1);
            for r in j + 1..=last {
                b[r] -= self.lmul[j * kl + (r - j - 1)] * bj;
            }
        }
        for j in (0..n).rev() {
            let cend = (j + kl + ku).min(n - 1);
            let mut s = b[j];
            for c in j + 1..=cend {
                s -= a.data[a.off(j, c).unwrap()] * b[c];
            }
            b[j] = s / a.data[a.off(j, j).unwrap()];
        }
    }
}

/// Dense row-major square matrix → band storage with detected bandwidths.
pub fn band_from_dense<T: Real>(n: usize, dense: &[C<T>]) -> BandMatrix<T> {
    let (mut kl, mut ku) = (0usize, 0usize);
    for r in 0..n {
        for c in 0..n {
            if dense[r * n + c] != czero() {
                if c < r {
                    kl = kl.max(r - c);
                } else {
                    ku = ku.max(c - r);
                }
            }
        }
    }
    let mut b = BandMatrix::zeros(n, kl, ku);
    for r in 0..n {
        for c in 0..n {
            let v = dense[r * n + c];
            if v != czero() {
                b.add(r, c, v);
            }
        }
    }
    b
}
