//! Evaluation, arithmetic, integration and differentiation of ball functions.

use std::ops::{Add, Mul, Neg, Sub};

use crate::ball::{cart_to_sph, sph_to_cart, BallScalar};
use crate::coeffops::{
    diff_lambda, diff_r, diff_theta, div_r, div_sin_theta, mul_cos_lambda, mul_cos_theta, mul_sin_lambda,
    mul_sin_theta, neg, sum_all,
};
use crate::error::{BallError, Result};
use crate::grid::GridValues;
use crate::real::{c, cis, creal, czero, Real, C};
use crate::tensor::CffTensor;
use crate::transform::{clenshaw, coeffs2vals, vals2coeffs};

/// Cartesian direction of differentiation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Tolerance on `|q| - 1` for points accepted as lying in the closed ball.
const BALL_SLACK: f64 = 1e-12;

/// Evaluates the CFF series at one point of the doubled domain: Clenshaw in
/// `r`, then the two Fourier sums.
pub(crate) fn eval_tensor<T: Real>(a: &CffTensor<T>, r: T, lam: T, th: T) -> C<T> {
    let [_, n, p] = a.sizes();
    let ej: Vec<C<T>> = (0..n).map(|s| cis(T::from_isize_lossy(a.lambda_mode(s)) * lam)).collect();
    let mut total = czero();
    for t in 0..p {
        let ek = cis(T::from_isize_lossy(a.theta_mode(t)) * th);
        let mut row = czero::<T>();
        for (s, e) in ej.iter().enumerate() {
            row += clenshaw(a.radial_line(s, t), r) * *e;
        }
        total += row * ek;
    }
    total
}

/// θ-weights `∫_0^π sin θ e^{ikθ} dθ`.
pub(crate) fn theta_weight<T: Real>(k: isize) -> C<T> {
    match k {
        1 => c(T::zero(), T::FRAC_PI_2()),
        -1 => c(T::zero(), -T::FRAC_PI_2()),
        _ if k.rem_euclid(2) == 1 => czero(),
        _ => creal(T::lit(2.0) / (T::one() - T::from_isize_lossy(k * k))),
    }
}

/// `∫_0^1 r² T_i(r) dr` for even `i`; odd terms never contribute.
pub(crate) fn radial_weight<T: Real>(i: usize) -> T {
    if i % 2 == 1 {
        return T::zero();
    }
    let i2 = T::from_usize_lossy(i * i);
    (T::lit(3.0) - i2) / ((i2 - T::one()) * (i2 - T::lit(9.0)))
}

impl<T: Real> BallScalar<T> {
    /// Value at a doubled-domain point `(r, λ, θ)`; `r` may be negative.
    pub fn eval_sph(&self, r: T, lam: T, th: T) -> C<T> {
        eval_tensor(self.coeffs(), r, lam, th)
    }

    /// Value at a Cartesian point of the closed ball.
    pub fn eval_cart(&self, x: T, y: T, z: T) -> Result<C<T>> {
        let (r, lam, th) = cart_to_sph(x, y, z);
        if !(r <= T::one() + T::lit(BALL_SLACK)) {
            return Err(BallError::OutsideBall(x.as_f64(), y.as_f64(), z.as_f64()));
        }
        Ok(self.eval_sph(r.min(T::one()), lam, th))
    }

    /// Real part of [`Self::eval_cart`], for real-valued functions.
    pub fn eval(&self, x: T, y: T, z: T) -> Result<T> {
        self.eval_cart(x, y, z).map(|v| v.re)
    }

    /// Values on the tensor's own doubled grid.
    pub fn values(&self) -> GridValues<T> {
        coeffs2vals(self.coeffs())
    }

    fn combine(&self, other: &Self, b: C<T>) -> Self {
        let out = self.coeffs().axpy(b, other.coeffs());
        let mut res = BallScalar::from_coeffs(out, self.is_real() && other.is_real() && b.im == T::zero());
        res.set_resolved(res.is_resolved() && self.is_resolved() && other.is_resolved());
        res
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, creal(T::one()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, creal(-T::one()))
    }

    /// `a * self`.
    pub fn scale(&self, a: T) -> Self {
        let mut t = self.coeffs().clone();
        t.scale(creal(a));
        let mut out = BallScalar::from_coeffs(t, self.is_real());
        out.set_resolved(self.is_resolved());
        out
    }

    /// `self + a`.
    pub fn add_scalar(&self, a: T) -> Self {
        self.add(&BallScalar::constant(a))
    }

    /// Pointwise product, exact on the padded grid before re-trimming.
    pub fn mul(&self, other: &Self) -> Self {
        let [mf, nf, pf] = self.sizes();
        let [mg, ng, pg] = other.sizes();
        let (m, n, p) = (mf + mg - 1, nf + ng, pf + pg);
        let fv = coeffs2vals(&self.coeffs().resized(m, n, p).expect("valid"));
        let gv = coeffs2vals(&other.coeffs().resized(m, n, p).expect("valid"));
        let data = fv.data.iter().zip(&gv.data).map(|(a, b)| a * b).collect();
        let prod = vals2coeffs(&GridValues { sizes: [m, n, p], data }).expect("valid");
        let mut res = BallScalar::from_coeffs(prod, self.is_real() && other.is_real());
        res.set_resolved(res.is_resolved() && self.is_resolved() && other.is_resolved());
        res
    }

    /// Definite integral over the unit ball.
    pub fn sum3(&self) -> C<T> {
        let a = self.coeffs();
        let [m, _, p] = a.sizes();
        let ph = (p / 2) as isize;
        let mut s = czero();
        for k in -ph..ph {
            let w = theta_weight::<T>(k);
            if w == czero() {
                continue;
            }
            let mut inner = czero::<T>();
            for i in (0..m).step_by(2) {
                inner += a.get(i, 0, k) * radial_weight::<T>(i);
            }
            s += inner * w;
        }
        s * T::TAU()
    }

    /// Cartesian partial derivative computed in coefficient space.
    pub fn diff(&self, axis: Axis) -> Self {
        let out = diff_cart_tensor(self.coeffs(), axis);
        // differentiation amplifies the noise floor by roughly the degree
        let deg = self.sizes().into_iter().max().unwrap_or(1).max(1);
        let tol = T::chop_tol() * T::from_usize_lossy(deg);
        let mut res = BallScalar::from_coeffs_tol(out, self.is_real(), tol);
        res.set_resolved(res.is_resolved() && self.is_resolved());
        res
    }

    pub fn laplacian(&self) -> Self {
        let parts: Vec<CffTensor<T>> = [Axis::X, Axis::Y, Axis::Z]
            .iter()
            .map(|&ax| self.diff(ax).diff(ax).into_coeffs())
            .collect();
        let deg = self.sizes().into_iter().max().unwrap_or(1).max(1);
        let tol = T::chop_tol() * T::from_usize_lossy(deg * deg);
        let mut res = BallScalar::from_coeffs_tol(sum_all(&parts), self.is_real(), tol);
        res.set_resolved(res.is_resolved() && self.is_resolved());
        res
    }

    /// Restriction to the unit sphere.
    pub fn boundary_trace(&self) -> BoundaryTrace<T> {
        let a = self.coeffs();
        let [m, n, p] = a.sizes();
        let mut data = vec![czero(); n * p];
        for t in 0..p {
            for s in 0..n {
                data[s + n * t] = a.radial_line(s, t).iter().take(m).fold(czero(), |acc, z| acc + *z);
            }
        }
        BoundaryTrace { n, p, data }
    }
}

/// Coefficients of `∂f/∂x`, `∂f/∂y` or `∂f/∂z` from those of `f`.
pub(crate) fn diff_cart_tensor<T: Real>(a: &CffTensor<T>, axis: Axis) -> CffTensor<T> {
    let dr = diff_r(a);
    let dt = diff_theta(a);
    match axis {
        Axis::Z => {
            let radial = mul_cos_theta(&dr);
            let num = neg(&mul_sin_theta(&dt));
            sum_all(&[radial, div_r(&num)])
        }
        Axis::X | Axis::Y => {
            let dl_over_sin = div_sin_theta(&diff_lambda(a));
            let (radial, num) = if axis == Axis::X {
                (
                    mul_cos_lambda(&mul_sin_theta(&dr)),
                    sum_all(&[neg(&mul_sin_lambda(&dl_over_sin)), mul_cos_lambda(&mul_cos_theta(&dt))]),
                )
            } else {
                (
                    mul_sin_lambda(&mul_sin_theta(&dr)),
                    sum_all(&[mul_cos_lambda(&dl_over_sin), mul_sin_lambda(&mul_cos_theta(&dt))]),
                )
            };
            sum_all(&[radial, div_r(&num)])
        }
    }
}

impl<'a, T: Real> Add for &'a BallScalar<T> {
    type Output = BallScalar<T>;
    fn add(self, rhs: Self) -> BallScalar<T> {
        BallScalar::add(self, rhs)
    }
}

impl<'a, T: Real> Sub for &'a BallScalar<T> {
    type Output = BallScalar<T>;
    fn sub(self, rhs: Self) -> BallScalar<T> {
        BallScalar::sub(self, rhs)
    }
}

impl<'a, T: Real> Mul for &'a BallScalar<T> {
    type Output = BallScalar<T>;
    fn mul(self, rhs: Self) -> BallScalar<T> {
        BallScalar::mul(self, rhs)
    }
}

impl<'a, T: Real> Neg for &'a BallScalar<T> {
    type Output = BallScalar<T>;
    fn neg(self) -> BallScalar<T> {
        self.scale(-T::one())
    }
}

/// Fourier–Fourier coefficients `g_{jk}` of a function on the unit sphere,
/// doubled in θ like the ball functions. Slot `(s, t)` lives at `s + n t`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTrace<T: Real> {
    n: usize,
    p: usize,
    data: Vec<C<T>>,
}

impl<T: Real> BoundaryTrace<T> {
    pub fn zeros(n: usize, p: usize) -> Result<Self> {
        crate::tensor::check_sizes(1, n, p)?;
        Ok(Self { n, p, data: vec![czero(); n * p] })
    }

    /// Samples `g(x, y, z)` on the doubled `n × p` sphere grid.
    pub fn from_cart(n: usize, p: usize, mut g: impl FnMut(T, T, T) -> T) -> Result<Self> {
        crate::tensor::check_sizes(1, n, p)?;
        let lams = crate::grid::lambda_points::<T>(n);
        let ths = crate::grid::theta_points::<T>(p);
        let mut data = Vec::with_capacity(n * p);
        for &th in &ths {
            for &la in &lams {
                let (x, y, z) = sph_to_cart(T::one(), la, th);
                let v = g(x, y, z);
                if !v.is_finite() {
                    return Err(BallError::NonFiniteSample(1.0, la.as_f64(), th.as_f64()));
                }
                data.push(creal(v));
            }
        }
        let coeffs = vals2coeffs(&GridValues::new([1, n, p], data)?)?;
        Ok(Self { n, p, data: coeffs.into_vec() })
    }

    pub fn sizes(&self) -> [usize; 2] {
        [self.n, self.p]
    }

    pub fn get(&self, j: isize, k: isize) -> C<T> {
        let s = j + (self.n / 2) as isize;
        let t = k + (self.p / 2) as isize;
        if (0..self.n as isize).contains(&s) && (0..self.p as isize).contains(&t) {
            self.data[s as usize + self.n * t as usize]
        } else {
            czero()
        }
    }

    pub fn set(&mut self, j: isize, k: isize, v: C<T>) {
        let s = (j + (self.n / 2) as isize) as usize;
        let t = (k + (self.p / 2) as isize) as usize;
        self.data[s + self.n * t] = v;
    }

    /// Centred pad/truncate.
    pub fn resized(&self, n: usize, p: usize) -> Result<Self> {
        let t = CffTensor::from_vec(1, self.n, self.p, self.data.clone())?.resized(1, n, p)?;
        Ok(Self { n, p, data: t.into_vec() })
    }

    pub fn eval(&self, lam: T, th: T) -> C<T> {
        let (nh, ph) = ((self.n / 2) as isize, (self.p / 2) as isize);
        let mut s = czero();
        for k in -ph..ph {
            for j in -nh..nh {
                s += self.get(j, k) * cis(T::from_isize_lossy(j) * lam + T::from_isize_lossy(k) * th);
            }
        }
        s
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, z| a.max(z.norm()))
    }

    /// Largest value magnitude on the trace's own grid.
    pub fn vscale(&self) -> T {
        let t = CffTensor::from_vec(1, self.n, self.p, self.data.clone()).expect("valid");
        coeffs2vals(&t).max_abs()
    }

    /// Trace as a radially constant ball function (for evaluation).
    pub fn to_tensor(&self) -> CffTensor<T> {
        CffTensor::from_vec(1, self.n, self.p, self.data.clone()).expect("valid")
    }
}

/// Surface integral of `g` over the unit sphere.
pub fn sum2_boundary<T: Real>(g: &BoundaryTrace<T>) -> C<T> {
    let ph = (g.p / 2) as isize;
    let s = (-ph..ph).fold(czero(), |acc, k| acc + g.get(0, k) * theta_weight::<T>(k));
    s * T::TAU()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn radial_weights() {
        assert!((radial_weight::<f64>(0) - 1.0 / 3.0).abs() < 1e-16);
        assert!((radial_weight::<f64>(2) - 1.0 / 15.0).abs() < 1e-16);
        assert!((radial_weight::<f64>(4) + 13.0 / 105.0).abs() < 1e-16);
    }

    #[test]
    fn volume_and_area() {
        let one = BallScalar::<f64>::constant(1.0);
        assert!((one.sum3().re - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((sum2_boundary(&one.boundary_trace()).re - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn x_squared_integral() {
        let f = BallScalar::<f64>::from_cart(|x, _, _| x * x).unwrap();
        assert!((f.sum3().re - 4.0 * PI / 15.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_x_is_one() {
        let f = BallScalar::<f64>::from_cart(|x, _, _| x).unwrap();
        let d = f.diff(Axis::X);
        for &(x, y, z) in &[(0.1, 0.2, 0.3), (0.0, 0.0, 0.0), (-0.5, 0.5, 0.1), (0.0, 0.0, 1.0)] {
            assert!((d.eval(x, y, z).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_z_squared() {
        let f = BallScalar::<f64>::from_cart(|_, _, z| z * z).unwrap();
        let d = f.diff(Axis::Z);
        let dy = f.diff(Axis::Y);
        for &(x, y, z) in &[(0.1, 0.2, 0.3), (0.0, 0.0, -0.7), (0.6, -0.5, 0.1)] {
            assert!((d.eval(x, y, z).unwrap() - 2.0 * z).abs() < 1e-12);
            assert!(dy.eval(x, y, z).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn outside_points_rejected() {
        let f = BallScalar::<f64>::constant(2.0);
        assert!(f.eval(1.0, 1.0, 0.0).is_err());
        assert_eq!(f.eval(1.0, 0.0, 0.0).unwrap(), 2.0);
    }

    #[test]
    fn trace_of_z() {
        let f = BallScalar::<f64>::from_cart(|_, _, z| z).unwrap();
        let g = f.boundary_trace();
        assert!((g.get(0, 1).re - 0.5).abs() < 1e-14);
        assert!((g.get(0, -1).re - 0.5).abs() < 1e-14);
    }
}
