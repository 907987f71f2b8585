//! Fast value ↔ coefficient transforms on the doubled grid.
//!
//! The radial direction uses a type-I cosine transform (via an FFT of the
//! even extension) on Chebyshev extreme points; both angular directions use
//! plain FFTs with the mode ordering of [`CffTensor`].

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::grid::GridValues;
use crate::real::{czero, Real, C};
use crate::tensor::CffTensor;

/// Chebyshev-point values → Chebyshev coefficients, in place.
pub(crate) struct ChebTransform<T: Real> {
    m: usize,
    fft: Option<Arc<dyn Fft<T>>>,
    buf: Vec<C<T>>,
    scratch: Vec<C<T>>,
}

impl<T: Real> ChebTransform<T> {
    pub(crate) fn new(m: usize, planner: &mut FftPlanner<T>) -> Self {
        if m < 2 {
            return Self { m, fft: None, buf: Vec::new(), scratch: Vec::new() };
        }
        let len = 2 * (m - 1);
        let fft = planner.plan_fft_forward(len);
        let scratch = vec![czero(); fft.get_inplace_scratch_len()];
        Self { m, fft: Some(fft), buf: vec![czero(); len], scratch }
    }

    /// Even extension `w` of `v` and its DFT, left in `self.buf`.
    fn dct1(&mut self, v: &[C<T>]) {
        let nn = self.m - 1;
        self.buf[..=nn].copy_from_slice(v);
        for i in 1..nn {
            self.buf[2 * nn - i] = v[i];
        }
        let fft = self.fft.as_ref().expect("planned");
        fft.process_with_scratch(&mut self.buf, &mut self.scratch);
    }

    pub(crate) fn vals_to_coeffs(&mut self, v: &mut [C<T>]) {
        if self.m < 2 {
            return;
        }
        let nn = self.m - 1;
        self.dct1(v);
        let inv = T::one() / T::from_usize_lossy(nn);
        for k in 0..=nn {
            v[k] = self.buf[k] * inv;
        }
        let half = T::lit(0.5);
        v[0] = v[0] * half;
        v[nn] = v[nn] * half;
    }

    pub(crate) fn coeffs_to_vals(&mut self, c: &mut [C<T>]) {
        if self.m < 2 {
            return;
        }
        let nn = self.m - 1;
        let (c0, cn) = (c[0], c[nn]);
        self.dct1(c);
        let half = T::lit(0.5);
        for i in 0..=nn {
            let edge = if i % 2 == 0 { c0 + cn } else { c0 - cn };
            c[i] = (self.buf[i] + edge) * half;
        }
    }
}

/// Equispaced values at `-π + 2πs/n` ↔ Fourier modes `-n/2..n/2` (slot `j + n/2`).
pub(crate) struct FourierTransform<T: Real> {
    n: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    buf: Vec<C<T>>,
    scratch: Vec<C<T>>,
}

impl<T: Real> FourierTransform<T> {
    pub(crate) fn new(n: usize, planner: &mut FftPlanner<T>) -> Self {
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let sl = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self { n, fwd, inv, buf: vec![czero(); n], scratch: vec![czero(); sl] }
    }

    /// `v_s = Σ_j α_j e^{ij(-π + 2πs/n)}`, so `α_j = (-1)^j DFT(v)_j / n`.
    pub(crate) fn vals_to_coeffs(&mut self, v: &mut [C<T>]) {
        let n = self.n;
        let h = n / 2;
        self.buf.copy_from_slice(v);
        self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
        let inv = T::one() / T::from_usize_lossy(n);
        for slot in 0..n {
            let j = slot as isize - h as isize;
            let src = j.rem_euclid(n as isize) as usize;
            let sgn = if j.rem_euclid(2) == 0 { inv } else { -inv };
            v[slot] = self.buf[src] * sgn;
        }
    }

    pub(crate) fn coeffs_to_vals(&mut self, c: &mut [C<T>]) {
        let n = self.n;
        let h = n / 2;
        for slot in 0..n {
            let j = slot as isize - h as isize;
            let dst = j.rem_euclid(n as isize) as usize;
            self.buf[dst] = if j.rem_euclid(2) == 0 { c[slot] } else { -c[slot] };
        }
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        c.copy_from_slice(&self.buf);
    }
}

#[derive(Clone, Copy)]
enum Dir {
    Forward,
    Inverse,
}

fn transform_all<T: Real>(sizes: [usize; 3], data: &mut [C<T>], dir: Dir) {
    let [m, n, p] = sizes;
    let mut planner = FftPlanner::<T>::new();

    // radial lines are contiguous
    let mut cheb = ChebTransform::new(m, &mut planner);
    for line in data.chunks_exact_mut(m) {
        match dir {
            Dir::Forward => cheb.vals_to_coeffs(line),
            Dir::Inverse => cheb.coeffs_to_vals(line),
        }
    }

    // λ lines: stride m
    let mut four = FourierTransform::new(n, &mut planner);
    let mut line = vec![czero::<T>(); n.max(p)];
    for t in 0..p {
        for i in 0..m {
            let base = i + m * n * t;
            for s in 0..n {
                line[s] = data[base + m * s];
            }
            match dir {
                Dir::Forward => four.vals_to_coeffs(&mut line[..n]),
                Dir::Inverse => four.coeffs_to_vals(&mut line[..n]),
            }
            for s in 0..n {
                data[base + m * s] = line[s];
            }
        }
    }

    // θ lines: stride m n
    let mut four = FourierTransform::new(p, &mut planner);
    let stride = m * n;
    for base in 0..stride {
        for t in 0..p {
            line[t] = data[base + stride * t];
        }
        match dir {
            Dir::Forward => four.vals_to_coeffs(&mut line[..p]),
            Dir::Inverse => four.coeffs_to_vals(&mut line[..p]),
        }
        for t in 0..p {
            data[base + stride * t] = line[t];
        }
    }
}

/// Values on the doubled grid → CFF coefficients, in `O(mnp log(mnp))`.
pub fn vals2coeffs<T: Real>(values: &GridValues<T>) -> Result<CffTensor<T>> {
    let [m, n, p] = values.sizes;
    let mut data = values.data.clone();
    transform_all(values.sizes, &mut data, Dir::Forward);
    CffTensor::from_vec(m, n, p, data)
}

/// CFF coefficients → values on the doubled grid of the same size.
pub fn coeffs2vals<T: Real>(coeffs: &CffTensor<T>) -> GridValues<T> {
    let sizes = coeffs.sizes();
    let mut data = coeffs.data().to_vec();
    transform_all(sizes, &mut data, Dir::Inverse);
    GridValues { sizes, data }
}

/// Clenshaw evaluation of `Σ c_i T_i(x)`.
pub(crate) fn clenshaw<T: Real>(c: &[C<T>], x: T) -> C<T> {
    let mut b1 = czero::<T>();
    let mut b2 = czero::<T>();
    let two_x = x + x;
    for i in (1..c.len()).rev() {
        let b0 = c[i] + b1 * two_x - b2;
        b2 = b1;
        b1 = b0;
    }
    match c.first() {
        Some(&c0) => c0 + b1 * x - b2,
        None => czero(),
    }
}
