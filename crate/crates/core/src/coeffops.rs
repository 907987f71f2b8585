//! Operators acting directly on CFF coefficient tensors: multiplication by
//! `r` and by the angular trigonometric factors, differentiation in the
//! spherical variables, and division by `r` or `sin θ` through banded solves.
//!
//! Multiplications grow the tensor by exactly the number of modes they can
//! create, so they are exact on the series.

use crate::linalg::{BandLu, BandMatrix};
use crate::real::{c, czero, Real, C};
use crate::tensor::{even_at_least, CffTensor};

/// `r · f`; radial length grows by one.
pub fn mul_r<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    let [m, n, p] = a.sizes();
    let mut out = CffTensor::zeros(m + 1, n, p).expect("valid");
    let half = T::lit(0.5);
    for t in 0..p {
        for s in 0..n {
            let src = a.radial_line(s, t);
            for (k, &v) in src.iter().enumerate() {
                let v = v * half;
                out[(k + 1, s, t)] += v;
                if k == 0 {
                    out[(1, s, t)] += v;
                } else {
                    out[(k - 1, s, t)] += v;
                }
            }
        }
    }
    out
}

/// Derivative of a Chebyshev series (length preserved, last entry zero).
pub fn cheb_diff_line<T: Real>(cf: &[C<T>], out: &mut [C<T>]) {
    let m = cf.len();
    for z in out.iter_mut() {
        *z = czero();
    }
    if m < 2 {
        return;
    }
    // d_{k-1} = d_{k+1} + 2k c_k
    let mut dk1 = czero::<T>(); // d_{k+1}
    let mut dk = czero::<T>(); // d_k
    for k in (1..m).rev() {
        let dkm1 = dk1 + cf[k] * T::from_usize_lossy(2 * k);
        out[k - 1] = dkm1;
        dk1 = dk;
        dk = dkm1;
    }
    out[0] = out[0] * T::lit(0.5);
}

/// `∂f/∂r` on the doubled radial variable.
pub fn diff_r<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    let [m, n, p] = a.sizes();
    let mut out = CffTensor::zeros(m, n, p).expect("valid");
    let mut buf = vec![czero(); m];
    for t in 0..p {
        for s in 0..n {
            cheb_diff_line(a.radial_line(s, t), &mut buf);
            for i in 0..m {
                out[(i, s, t)] = buf[i];
            }
        }
    }
    out
}

/// `∂f/∂λ`.
pub fn diff_lambda<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    let mut out = a.clone();
    out.map_indexed(|_, j, _, v| v * c(T::zero(), T::from_isize_lossy(j)));
    out
}

/// `∂f/∂θ`.
pub fn diff_theta<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    let mut out = a.clone();
    out.map_indexed(|_, _, k, v| v * c(T::zero(), T::from_isize_lossy(k)));
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Axis {
    Lambda,
    Theta,
}

/// Multiplies by `Σ_d w_d e^{i d x}` in the given angular variable; the
/// length grows by `2 * max|d|`.
pub(crate) fn mul_trig<T: Real>(a: &CffTensor<T>, axis: Axis, terms: &[(isize, C<T>)]) -> CffTensor<T> {
    let [m, n, p] = a.sizes();
    let grow = 2 * terms.iter().map(|(d, _)| d.unsigned_abs()).max().unwrap_or(0);
    let (n2, p2) = match axis {
        Axis::Lambda => (n + grow, p),
        Axis::Theta => (n, p + grow),
    };
    let mut out = CffTensor::zeros(m, n2, p2).expect("valid");
    let (nh, ph) = ((n / 2) as isize, (p / 2) as isize);
    for k in -ph..ph {
        for j in -nh..nh {
            let src = a.slot(0, j, k).unwrap();
            for &(d, w) in terms {
                let (jj, kk) = match axis {
                    Axis::Lambda => (j + d, k),
                    Axis::Theta => (j, k + d),
                };
                let dst = out.slot(0, jj, kk).expect("grown to fit");
                for i in 0..m {
                    let v = a.data()[src + i] * w;
                    out.data_mut()[dst + i] += v;
                }
            }
        }
    }
    out
}

fn cos_terms<T: Real>() -> [(isize, C<T>); 2] {
    let h = c(T::lit(0.5), T::zero());
    [(1, h), (-1, h)]
}

fn sin_terms<T: Real>() -> [(isize, C<T>); 2] {
    // sin x = (e^{ix} - e^{-ix}) / (2i) = -i/2 e^{ix} + i/2 e^{-ix}
    [(1, c(T::zero(), T::lit(-0.5))), (-1, c(T::zero(), T::lit(0.5)))]
}

pub fn mul_cos_lambda<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    mul_trig(a, Axis::Lambda, &cos_terms())
}
pub fn mul_sin_lambda<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    mul_trig(a, Axis::Lambda, &sin_terms())
}
pub fn mul_cos_theta<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    mul_trig(a, Axis::Theta, &cos_terms())
}
pub fn mul_sin_theta<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    mul_trig(a, Axis::Theta, &sin_terms())
}

/// Multiplication by `sin θ` in the Fourier basis: `(M y)_k = i/2 (y_{k+1} - y_{k-1})`.
pub fn sin_theta_matrix<T: Real>(p: usize) -> BandMatrix<T> {
    let mut mat = BandMatrix::zeros(p, 1, 1);
    let hi = c(T::zero(), T::lit(0.5));
    for r in 0..p {
        if r + 1 < p {
            mat.add(r, r + 1, hi);
        }
        if r > 0 {
            mat.add(r, r - 1, -hi);
        }
    }
    mat
}

/// Multiplication by `r` in the Chebyshev basis (first row `[0, 1/2]`,
/// second row `[1, 0, 1/2]`, then `[1/2, 0, 1/2]`).
pub fn r_matrix<T: Real>(m: usize) -> BandMatrix<T> {
    let mut mat = BandMatrix::zeros(m, 1, 1);
    let h = c(T::lit(0.5), T::zero());
    for r in 0..m {
        if r + 1 < m {
            mat.add(r, r + 1, h);
        }
        if r == 1 {
            mat.add(1, 0, c(T::one(), T::zero()));
        } else if r > 1 {
            mat.add(r, r - 1, h);
        }
    }
    mat
}

fn factor_or_panic<T: Real>(m: BandMatrix<T>, what: &str) -> BandLu<T> {
    // Both operators are nonsingular for even sizes, which callers guarantee.
    m.factor().unwrap_or_else(|e| panic!("{what} matrix singular: {e:?}"))
}

/// `f / sin θ` for `f` vanishing on the pole lines, computed by solving with
/// the multiplication matrix along each θ-line. The θ length is padded by 2
/// so that the quotient's modes fit.
pub fn div_sin_theta<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    let [m, n, p] = a.sizes();
    let p2 = even_at_least(p + 2);
    let src = a.resized(m, n, p2).expect("valid");
    let lu = factor_or_panic(sin_theta_matrix::<T>(p2), "sin θ");
    let mut out = src.clone();
    let mut line = vec![czero(); p2];
    for s in 0..n {
        for i in 0..m {
            for t in 0..p2 {
                line[t] = src[(i, s, t)];
            }
            lu.solve_in_place(&mut line);
            for t in 0..p2 {
                out[(i, s, t)] = line[t];
            }
        }
    }
    out
}

/// `f / r` for `f` vanishing at the origin, via the Chebyshev
/// multiplication-by-`r` matrix. Radial length is padded to an even size.
pub fn div_r<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    let [m, n, p] = a.sizes();
    let m2 = even_at_least(m + 2);
    let src = a.resized(m2, n, p).expect("valid");
    let lu = factor_or_panic(r_matrix::<T>(m2), "r");
    let mut out = src.clone();
    let mut line = vec![czero(); m2];
    for t in 0..p {
        for s in 0..n {
            line.copy_from_slice(src.radial_line(s, t));
            lu.solve_in_place(&mut line);
            for i in 0..m2 {
                out[(i, s, t)] = line[i];
            }
        }
    }
    out
}

/// Multiplication by the Cartesian coordinate functions, exactly.
pub fn mul_x<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    mul_cos_lambda(&mul_sin_theta(&mul_r(a)))
}
pub fn mul_y<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    mul_sin_lambda(&mul_sin_theta(&mul_r(a)))
}
pub fn mul_z<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    mul_cos_theta(&mul_r(a))
}

/// Sum of tensors after padding to common sizes.
pub fn sum_all<T: Real>(parts: &[CffTensor<T>]) -> CffTensor<T> {
    let one = c(T::one(), T::zero());
    let mut it = parts.iter();
    let first = it.next().expect("at least one term").clone();
    it.fold(first, |acc, x| acc.axpy(one, x))
}

pub(crate) fn neg<T: Real>(a: &CffTensor<T>) -> CffTensor<T> {
    let mut out = a.clone();
    out.scale(c(-T::one(), T::zero()));
    out
}
