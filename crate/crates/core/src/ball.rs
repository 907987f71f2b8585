//! Scalar functions on the unit ball and their adaptive construction.

use crate::chop::{resolution_report, ResolutionReport};
use crate::error::{BallError, Result};
use crate::grid::{double_samples, make_grid, GridValues, HalfSamples, SampleGrid};
use crate::real::{c, czero, Real, C};
use crate::tensor::CffTensor;
use crate::transform::{coeffs2vals, vals2coeffs};

/// Coordinate system in which an evaluator receives its arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Coords {
    /// `(x, y, z)`.
    #[default]
    Cartesian,
    /// `(r, λ, θ)` with `x = r cos λ sin θ`, `y = r sin λ sin θ`, `z = r cos θ`.
    Spherical,
}

/// Knobs for [`BallScalar::construct_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructOptions {
    /// Initial `(m, n, p)`; `m` may be odd, `n` and `p` must be even.
    pub start: [usize; 3],
    /// Largest sizes the refinement may reach.
    pub cap: [usize; 3],
    /// Largest coefficient count `m n p` the refinement may reach.
    pub max_total: usize,
    /// Relative chop tolerance; `None` uses the scalar type's default.
    pub tol: Option<f64>,
    /// Sample once at exactly these sizes, skipping refinement and trimming.
    pub fixed: Option<[usize; 3]>,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        Self { start: [17, 16, 16], cap: [8193, 8192, 8192], max_total: 1 << 24, tol: None, fixed: None }
    }
}

impl ConstructOptions {
    pub fn fixed(m: usize, n: usize, p: usize) -> Self {
        Self { fixed: Some([m, n, p]), ..Self::default() }
    }

    fn tol<T: Real>(&self) -> T {
        self.tol.map_or_else(T::chop_tol, T::lit)
    }
}

/// A function on the unit ball stored as its doubled CFF expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct BallScalar<T: Real> {
    coeffs: CffTensor<T>,
    resolved: bool,
    vscale: T,
    real: bool,
}

/// Cartesian → spherical, with `θ = 0` and `λ = 0` at the origin and `λ = 0`
/// on the polar axis.
pub fn cart_to_sph<T: Real>(x: T, y: T, z: T) -> (T, T, T) {
    let r = (x * x + y * y + z * z).sqrt();
    if r == T::zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    let lam = y.atan2(x);
    let th = (x * x + y * y).sqrt().atan2(z);
    (r, lam, th)
}

pub fn sph_to_cart<T: Real>(r: T, lam: T, th: T) -> (T, T, T) {
    let (sl, cl) = lam.sin_cos();
    let (st, ct) = th.sin_cos();
    (r * cl * st, r * sl * st, r * ct)
}

impl<T: Real> BallScalar<T> {
    /// Adaptive construction from a complex-valued evaluator on the half
    /// domain. Evaluator errors abort the construction.
    pub fn construct_with(
        coords: Coords,
        opts: &ConstructOptions,
        mut f: impl FnMut(T, T, T) -> Result<C<T>>,
        real: bool,
    ) -> Result<Self> {
        let mut eval = |r: T, lam: T, th: T| -> Result<C<T>> {
            let v = match coords {
                Coords::Spherical => f(r, lam, th)?,
                Coords::Cartesian => {
                    let (x, y, z) = sph_to_cart(r, lam, th);
                    f(x, y, z)?
                }
            };
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(BallError::NonFiniteSample(r.as_f64(), lam.as_f64(), th.as_f64()));
            }
            Ok(v)
        };
        Self::construct_from_sampler(opts, real, |grid| grid.sample(&mut eval))
    }

    /// Adaptive construction where `sampler` fills a whole half grid at once.
    /// Useful when per-point evaluation would repeat shared work.
    pub fn construct_from_sampler(
        opts: &ConstructOptions,
        real: bool,
        mut sampler: impl FnMut(&SampleGrid<T>) -> Result<HalfSamples<T>>,
    ) -> Result<Self> {
        let tol: T = opts.tol();
        let mut sample_at = |m: usize, n: usize, p: usize| -> Result<(GridValues<T>, T)> {
            let grid = make_grid::<T>(m, n, p)?;
            let half = sampler(&grid)?;
            let vscale = half.data.iter().fold(T::zero(), |a, z| a.max(z.norm()));
            Ok((double_samples([m, n, p], &half)?, vscale))
        };
        if let Some([m, n, p]) = opts.fixed {
            let (vals, vscale) = sample_at(m, n, p)?;
            let coeffs = vals2coeffs(&vals)?;
            let rep = resolution_report(&coeffs, vscale, tol);
            let mut out = Self { coeffs, resolved: rep.converged(), vscale, real };
            if real {
                out.realify();
            }
            return Ok(out);
        }
        let [mut m, mut n, mut p] = opts.start;
        let mut failed_check: Option<[usize; 3]> = None;
        loop {
            let (vals, vscale) = sample_at(m, n, p)?;
            let coeffs = vals2coeffs(&vals)?;
            let rep = resolution_report(&coeffs, vscale, tol);
            let mut refine = rep.resolved.map(|r| !r);
            if rep.converged() {
                let [mt, nt, pt] = rep.trimmed_sizes();
                let coeffs = coeffs.resized(mt, nt, pt)?;
                // Sparse spectra can alias onto a tail that looks converged, so
                // confirm on a slightly larger grid before accepting.
                let (check, check_scale) = sample_at(m + 2, n + 2, p + 2)?;
                let approx = coeffs2vals(&coeffs.resized(m + 2, n + 2, p + 2)?);
                let mismatch = approx.data.iter().zip(&check.data).fold(T::zero(), |a, (u, v)| a.max((*u - *v).norm()));
                let scale = vscale.max(check_scale);
                let allowed = T::lit(1e3) * tol * if scale > T::zero() { scale } else { T::one() };
                let trimmed = [mt, nt, pt];
                if mismatch <= allowed || failed_check == Some(trimmed) {
                    let mut out = Self { coeffs, resolved: true, vscale, real };
                    if real {
                        out.realify();
                    }
                    return Ok(out);
                }
                log::debug!("sample check failed at {m}x{n}x{p} (mismatch {:e})", mismatch.as_f64());
                failed_check = Some(trimmed);
                let rep2 = resolution_report(&vals2coeffs(&check)?, scale, tol);
                refine = [0, 1, 2].map(|d| rep2.chop[d] > rep.chop[d]);
                if !refine.iter().any(|&r| r) {
                    refine = [true; 3];
                }
            }
            let next = [
                if refine[0] { 2 * m - 1 } else { m },
                if refine[1] { 2 * n } else { n },
                if refine[2] { 2 * p } else { p },
            ];
            if (0..3).any(|d| next[d] > opts.cap[d]) || next.iter().product::<usize>() > opts.max_total {
                log::debug!("construction stopped at {m}x{n}x{p}");
                return Err(BallError::Unresolved { report: Box::new(rep) });
            }
            log::trace!("refining {m}x{n}x{p} -> {next:?}");
            [m, n, p] = next;
        }
    }

    /// Adaptive construction of a real function given in `coords`.
    pub fn construct(coords: Coords, mut f: impl FnMut(T, T, T) -> T) -> Result<Self> {
        Self::construct_with(coords, &ConstructOptions::default(), |a, b, c_| Ok(c(f(a, b, c_), T::zero())), true)
    }

    /// Adaptive construction from `f(x, y, z)`.
    pub fn from_cart(f: impl FnMut(T, T, T) -> T) -> Result<Self> {
        Self::construct(Coords::Cartesian, f)
    }

    /// Adaptive construction from `f(r, λ, θ)`.
    pub fn from_sph(f: impl FnMut(T, T, T) -> T) -> Result<Self> {
        Self::construct(Coords::Spherical, f)
    }

    /// Real function sampled at fixed sizes without refinement or trimming.
    pub fn from_cart_sized(sizes: [usize; 3], mut f: impl FnMut(T, T, T) -> T) -> Result<Self> {
        let [m, n, p] = sizes;
        Self::construct_with(
            Coords::Cartesian,
            &ConstructOptions::fixed(m, n, p),
            |a, b, c_| Ok(c(f(a, b, c_), T::zero())),
            true,
        )
    }

    /// The constant function `v`.
    pub fn constant(v: T) -> Self {
        let mut coeffs = CffTensor::zeros(1, 2, 2).expect("valid");
        coeffs.set(0, 0, 0, c(v, T::zero()));
        Self { coeffs, resolved: true, vscale: v.abs(), real: true }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// Wraps coefficients produced by an operation: computes `vscale` on the
    /// tensor's own grid, projects onto real functions if `real`, and trims.
    pub fn from_coeffs(coeffs: CffTensor<T>, real: bool) -> Self {
        Self::from_coeffs_tol(coeffs, real, T::chop_tol())
    }

    pub(crate) fn from_coeffs_tol(coeffs: CffTensor<T>, real: bool, tol: T) -> Self {
        let vscale = coeffs2vals(&coeffs).max_abs();
        let mut out = Self { coeffs, resolved: true, vscale, real };
        if real {
            out.realify();
        }
        let rep = resolution_report(&out.coeffs, vscale, tol);
        let [m, n, p] = rep.trimmed_sizes();
        out.resolved = rep.converged();
        out.coeffs = out.coeffs.resized(m, n, p).expect("valid");
        out
    }

    /// Wraps coefficients verbatim (no trimming or projection).
    pub fn from_coeffs_raw(coeffs: CffTensor<T>, real: bool) -> Self {
        let vscale = coeffs2vals(&coeffs).max_abs();
        let rep = resolution_report(&coeffs, vscale, T::chop_tol());
        Self { coeffs, resolved: rep.converged(), vscale, real }
    }

    pub fn coeffs(&self) -> &CffTensor<T> {
        &self.coeffs
    }
    pub fn into_coeffs(self) -> CffTensor<T> {
        self.coeffs
    }
    pub fn sizes(&self) -> [usize; 3] {
        self.coeffs.sizes()
    }
    pub fn is_resolved(&self) -> bool {
        self.resolved
    }
    pub fn vscale(&self) -> T {
        self.vscale
    }
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub(crate) fn set_resolved(&mut self, r: bool) {
        self.resolved = r;
    }

    /// Resolution report of the stored coefficients.
    pub fn report(&self) -> ResolutionReport {
        resolution_report(&self.coeffs, self.vscale, T::chop_tol())
    }

    /// Same function, coefficients padded or truncated to `sizes`.
    pub fn resized(&self, sizes: [usize; 3]) -> Result<Self> {
        let [m, n, p] = sizes;
        Ok(Self { coeffs: self.coeffs.resized(m, n, p)?, ..self.clone() })
    }

    /// Imposes `α_{-j,-k} = conj(α_{jk})`, the coefficient symmetry of a real
    /// function. Nyquist slots pair with themselves.
    pub fn realify(&mut self) {
        let a = &mut self.coeffs;
        let [m, n, p] = a.sizes();
        let (nh, ph) = ((n / 2) as isize, (p / 2) as isize);
        let partner = |j: isize, h: isize| if j == -h { j } else { -j };
        let mut residue = T::zero();
        let mut out = a.clone();
        for k in -ph..ph {
            for j in -nh..nh {
                let (jj, kk) = (partner(j, nh), partner(k, ph));
                let (s, q) = (a.slot(0, j, k).unwrap(), a.slot(0, jj, kk).unwrap());
                for i in 0..m {
                    let x = a.data()[s + i];
                    let y = a.data()[q + i].conj();
                    residue = residue.max((x - y).norm());
                    out.data_mut()[s + i] = (x + y) * T::lit(0.5);
                }
            }
        }
        let warn = T::lit(1e-13) * self.vscale.max(T::epsilon());
        if residue > warn {
            log::debug!(
                "imaginary residue {:e} exceeds 1e-13 * vscale while projecting onto real functions",
                residue.as_f64() / 2.0
            );
        }
        self.coeffs = out;
    }

    /// Checks the doubled-function symmetries of the stored tensor.
    pub fn is_bmc(&self, tol: T) -> bool {
        is_bmc(&self.coeffs, tol)
    }
}

/// True when `a` satisfies, to `tol * vscale`, the symmetries of a doubled
/// ball function: `f(r, λ, θ) = f(-r, λ+π, π-θ) = f(r, λ+π, -θ)`, constancy at
/// the origin, and λ-independence along both pole lines.
pub fn is_bmc<T: Real>(a: &CffTensor<T>, tol: T) -> bool {
    let [m, n, p] = a.sizes();
    let vscale = coeffs2vals(a).max_abs();
    let thr = tol * if vscale > T::zero() { vscale } else { T::one() };
    let (nh, ph) = ((n / 2) as isize, (p / 2) as isize);
    let flip = |k: isize| if k == -ph { k } else { -k };
    for k in -ph..ph {
        for j in -nh..nh {
            let sj = crate::real::sign_pow::<T>(j);
            for i in 0..m {
                let x = a.get(i, j, k);
                // f(r, λ+π, -θ) = f
                if (x - a.get(i, j, flip(k)) * sj).norm() > thr {
                    return false;
                }
                // combined with the first: parity in i + k
                if (i as isize + k).rem_euclid(2) == 1 && x.norm() > thr {
                    return false;
                }
            }
        }
    }
    // origin: Σ_i α_{ijk} T_i(0) = 0 unless j = k = 0
    for k in -ph..ph {
        for j in -nh..nh {
            if j == 0 && k == 0 {
                continue;
            }
            let mut s = czero::<T>();
            for i in (0..m).step_by(2) {
                let t0 = if (i / 2) % 2 == 0 { T::one() } else { -T::one() };
                s += a.get(i, j, k) * t0;
            }
            if s.norm() > thr {
                return false;
            }
        }
    }
    // poles: Σ_k α_{ijk} and Σ_k (-1)^k α_{ijk} vanish for j ≠ 0
    for j in -nh..nh {
        if j == 0 {
            continue;
        }
        for i in 0..m {
            let (mut north, mut south) = (czero::<T>(), czero::<T>());
            for k in -ph..ph {
                let x = a.get(i, j, k);
                north += x;
                south += x * crate::real::sign_pow::<T>(k);
            }
            if north.norm() > thr || south.norm() > thr {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_trims_to_single_coefficient() {
        let f = BallScalar::<f64>::from_cart(|_, _, _| 1.0).unwrap();
        assert_eq!(f.sizes(), [1, 2, 2]);
        assert!((f.coeffs().get(0, 0, 0).re - 1.0).abs() < 1e-15);
        assert!(f.is_resolved());
    }

    #[test]
    fn zero_function_has_zero_vscale() {
        let f = BallScalar::<f64>::from_cart(|_, _, _| 0.0).unwrap();
        assert_eq!(f.vscale(), 0.0);
        assert_eq!(f.sizes(), [1, 2, 2]);
    }

    #[test]
    fn r_e_i_lambda_is_not_bmc() {
        let t = CffTensor::<f64>::unit(3, 4, 4, 1, 1, 0).unwrap();
        assert!(!is_bmc(&t, 1e-10));
    }

    #[test]
    fn constructed_functions_are_bmc() {
        let f = BallScalar::<f64>::from_cart(|x, y, z| (x * y).cos() + z.powi(3)).unwrap();
        assert!(f.is_bmc(1e-10));
    }

    #[test]
    fn nonfinite_samples_are_errors() {
        let r = BallScalar::<f64>::from_cart(|x, _, _| 1.0 / x);
        assert!(matches!(r, Err(BallError::NonFiniteSample(..))));
    }

    #[test]
    fn unresolvable_function_reports() {
        let opts = ConstructOptions { cap: [65, 64, 64], ..Default::default() };
        let r = BallScalar::<f64>::construct_with(
            Coords::Cartesian,
            &opts,
            |x, _, _| Ok(C::new((200.0 * x).sin(), 0.0)),
            true,
        );
        match r {
            Err(BallError::Unresolved { report }) => assert!(!report.converged()),
            other => panic!("expected unresolved, got {other:?}"),
        }
    }

    #[test]
    fn f32_construction() {
        let f = BallScalar::<f32>::from_cart(|x, y, _| x * y).unwrap();
        assert!(f.is_resolved());
        assert!(f.sizes()[0] <= 5);
    }
}
