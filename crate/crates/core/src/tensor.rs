//! Chebyshev–Fourier–Fourier coefficient tensors.

use std::ops::{Index, IndexMut};

use crate::error::{BallError, Result};
use crate::real::{czero, Real, C};

/// Coefficients `α_{ijk}` of
///
/// ```text
/// f(r, λ, θ) = Σ_i Σ_j Σ_k α_{ijk} T_i(r) e^{i j λ} e^{i k θ}
/// ```
///
/// on the doubled domain `[-1, 1] × [-π, π] × [-π, π]`.
///
/// The radial index `i` runs over `0..m`. The azimuthal mode `j` runs over
/// `-n/2..n/2` and is stored at slot `j + n/2`; the polar mode `k` runs over
/// `-p/2..p/2` and is stored at slot `k + p/2`. Storage is radial-fastest:
/// slot `(i, s, t)` lives at `i + m * (s + n * t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CffTensor<T: Real> {
    m: usize,
    n: usize,
    p: usize,
    data: Vec<C<T>>,
}

pub(crate) fn check_sizes(m: usize, n: usize, p: usize) -> Result<()> {
    if m == 0 {
        return Err(BallError::InvalidSize("radial length must be at least 1".into()));
    }
    if n < 2 || n % 2 != 0 {
        return Err(BallError::InvalidSize(format!("azimuthal length {n} must be even and >= 2")));
    }
    if p < 2 || p % 2 != 0 {
        return Err(BallError::InvalidSize(format!("polar length {p} must be even and >= 2")));
    }
    m.checked_mul(n)
        .and_then(|x| x.checked_mul(p))
        .ok_or_else(|| BallError::InvalidSize("tensor size overflows".into()))?;
    Ok(())
}

impl<T: Real> CffTensor<T> {
    pub fn zeros(m: usize, n: usize, p: usize) -> Result<Self> {
        check_sizes(m, n, p)?;
        Ok(Self { m, n, p, data: vec![czero(); m * n * p] })
    }

    /// Wraps raw storage in the documented layout.
    pub fn from_vec(m: usize, n: usize, p: usize, data: Vec<C<T>>) -> Result<Self> {
        check_sizes(m, n, p)?;
        if data.len() != m * n * p {
            return Err(BallError::ShapeMismatch {
                expected: format!("{} entries", m * n * p),
                got: format!("{} entries", data.len()),
            });
        }
        Ok(Self { m, n, p, data })
    }

    /// A single unit coefficient at radial index `i`, modes `(j, k)`.
    pub fn unit(m: usize, n: usize, p: usize, i: usize, j: isize, k: isize) -> Result<Self> {
        let mut t = Self::zeros(m, n, p)?;
        let slot = t.slot(i, j, k).ok_or_else(|| {
            BallError::InvalidSize(format!("mode ({i}, {j}, {k}) does not fit in {m}x{n}x{p}"))
        })?;
        t.data[slot] = C::new(T::one(), T::zero());
        Ok(t)
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }
    #[inline]
    pub fn sizes(&self) -> [usize; 3] {
        [self.m, self.n, self.p]
    }
    #[inline]
    pub fn data(&self) -> &[C<T>] {
        &self.data
    }
    #[inline]
    pub fn data_mut(&mut self) -> &mut [C<T>] {
        &mut self.data
    }
    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    #[inline]
    pub(crate) fn idx(&self, i: usize, s: usize, t: usize) -> usize {
        i + self.m * (s + self.n * t)
    }

    /// Storage offset of coefficient `(i, j, k)` or `None` if out of range.
    pub fn slot(&self, i: usize, j: isize, k: isize) -> Option<usize> {
        let s = j + (self.n / 2) as isize;
        let t = k + (self.p / 2) as isize;
        if i < self.m && (0..self.n as isize).contains(&s) && (0..self.p as isize).contains(&t) {
            Some(self.idx(i, s as usize, t as usize))
        } else {
            None
        }
    }

    /// Coefficient `α_{ijk}`; zero outside the stored range.
    pub fn get(&self, i: usize, j: isize, k: isize) -> C<T> {
        self.slot(i, j, k).map_or_else(czero, |o| self.data[o])
    }

    pub fn set(&mut self, i: usize, j: isize, k: isize, v: C<T>) {
        let o = self.slot(i, j, k).expect("coefficient index in range");
        self.data[o] = v;
    }

    /// Azimuthal mode stored at slot `s`.
    #[inline]
    pub fn lambda_mode(&self, s: usize) -> isize {
        s as isize - (self.n / 2) as isize
    }

    /// Polar mode stored at slot `t`.
    #[inline]
    pub fn theta_mode(&self, t: usize) -> isize {
        t as isize - (self.p / 2) as isize
    }

    /// Centred zero-padding or truncation to the requested sizes.
    pub fn resized(&self, m: usize, n: usize, p: usize) -> Result<Self> {
        let mut out = Self::zeros(m, n, p)?;
        let mm = m.min(self.m);
        let span = |a: usize, b: usize| {
            let (ha, hb) = ((a / 2) as isize, (b / 2) as isize);
            (-ha.min(hb), (a as isize - ha).min(b as isize - hb))
        };
        let (jlo, jhi) = span(self.n, n);
        let (klo, khi) = span(self.p, p);
        for k in klo..khi {
            for j in jlo..jhi {
                let src = self.slot(0, j, k).expect("in range");
                let dst = out.slot(0, j, k).expect("in range");
                out.data[dst..dst + mm].copy_from_slice(&self.data[src..src + mm]);
            }
        }
        Ok(out)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, z| a.max(z.norm()))
    }

    pub fn scale(&mut self, a: C<T>) {
        for z in &mut self.data {
            *z = *z * a;
        }
    }

    /// `self + b * other`, padding both operands to the elementwise maximum sizes.
    pub fn axpy(&self, b: C<T>, other: &Self) -> Self {
        let [m, n, p] = max_sizes(self.sizes(), other.sizes());
        let mut out = self.resized(m, n, p).expect("valid sizes");
        let o = other.resized(m, n, p).expect("valid sizes");
        for (x, y) in out.data.iter_mut().zip(o.data.iter()) {
            *x += b * *y;
        }
        out
    }

    /// Applies `f(i, j, k, α)` to every coefficient in place.
    pub fn map_indexed(&mut self, mut f: impl FnMut(usize, isize, isize, C<T>) -> C<T>) {
        let (m, n, p) = (self.m, self.n, self.p);
        for t in 0..p {
            let k = t as isize - (p / 2) as isize;
            for s in 0..n {
                let j = s as isize - (n / 2) as isize;
                let base = m * (s + n * t);
                for i in 0..m {
                    self.data[base + i] = f(i, j, k, self.data[base + i]);
                }
            }
        }
    }

    /// Zeroes all coefficients with `|α| <= thresh`.
    pub fn zero_small(&mut self, thresh: T) {
        for z in &mut self.data {
            if z.norm() <= thresh {
                *z = czero();
            }
        }
    }

    /// Radial line `(·, s, t)` as a slice.
    #[inline]
    pub(crate) fn radial_line(&self, s: usize, t: usize) -> &[C<T>] {
        let b = self.idx(0, s, t);
        &self.data[b..b + self.m]
    }
}

impl<T: Real> Index<(usize, usize, usize)> for CffTensor<T> {
    type Output = C<T>;
    /// Indexing by storage slots `(i, s, t)`.
    fn index(&self, (i, s, t): (usize, usize, usize)) -> &C<T> {
        &self.data[self.idx(i, s, t)]
    }
}

impl<T: Real> IndexMut<(usize, usize, usize)> for CffTensor<T> {
    fn index_mut(&mut self, (i, s, t): (usize, usize, usize)) -> &mut C<T> {
        let o = self.idx(i, s, t);
        &mut self.data[o]
    }
}

pub(crate) fn max_sizes(a: [usize; 3], b: [usize; 3]) -> [usize; 3] {
    [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])]
}

/// Smallest even number `>= x` (and at least 2).
pub(crate) fn even_at_least(x: usize) -> usize {
    let x = x.max(2);
    x + (x % 2)
}
