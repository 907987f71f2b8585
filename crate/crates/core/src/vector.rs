//! Vector fields stored by Cartesian components, their calculus, and the
//! poloidal–toroidal and Helmholtz–Hodge decompositions.
//!
//! Spherical unit vectors are singular on the pole lines, so every field is
//! held as three smooth scalar functions `(Vx, Vy, Vz)`. Spherical components
//! are available on request but are never used internally.

use crate::ball::BallScalar;
use crate::calculus::{Axis, BoundaryTrace};
use crate::coeffops::{mul_cos_lambda, mul_cos_theta, mul_sin_lambda, mul_sin_theta, mul_x, mul_y, mul_z, neg, sum_all};
use crate::error::{BallError, Result};
use crate::helmholtz::{helmholtz_solve, BcKind, BoundaryData};
use crate::linalg::BandMatrix;
use crate::real::{creal, czero, Real};
use crate::tensor::CffTensor;

/// Vector field with Cartesian components.
#[derive(Clone, Debug)]
pub struct BallVector<T: Real> {
    pub vx: BallScalar<T>,
    pub vy: BallScalar<T>,
    pub vz: BallScalar<T>,
}

/// `V_r`, `V_λ`, `V_θ` on the doubled domain. These are not smooth ball
/// functions in general; they are kept for inspection and plotting.
#[derive(Clone, Debug)]
pub struct SphericalComponents<T: Real> {
    pub vr: BallScalar<T>,
    pub vlam: BallScalar<T>,
    pub vth: BallScalar<T>,
}

/// Poloidal and toroidal scalars with `V = ∇×∇×(Φ q) + ∇×(Ψ q)`, `q = (x, y, z)`.
#[derive(Clone, Debug)]
pub struct PtScalars<T: Real> {
    pub phi: BallScalar<T>,
    pub psi: BallScalar<T>,
    /// Both scalars have vanishing `(j, k) = (0, 0)` angular modes.
    pub gauge: bool,
}

/// Result of [`helmholtz_hodge`]: `V = ∇f + ψ` with `ψ` solenoidal and
/// tangent to the sphere.
#[derive(Clone, Debug)]
pub struct HodgeDecomposition<T: Real> {
    pub f: BallScalar<T>,
    pub psi: BallVector<T>,
    pub pt: PtScalars<T>,
}

fn wrap<T: Real>(t: CffTensor<T>, like: &[&BallScalar<T>]) -> BallScalar<T> {
    let real = like.iter().all(|f| f.is_real());
    let mut out = BallScalar::from_coeffs(t, real);
    out.set_resolved(out.is_resolved() && like.iter().all(|f| f.is_resolved()));
    out
}

/// `x f`, `y f` or `z f`.
pub fn mul_coord<T: Real>(f: &BallScalar<T>, axis: Axis) -> BallScalar<T> {
    let t = match axis {
        Axis::X => mul_x(f.coeffs()),
        Axis::Y => mul_y(f.coeffs()),
        Axis::Z => mul_z(f.coeffs()),
    };
    wrap(t, &[f])
}

impl<T: Real> BallScalar<T> {
    /// `∇f`.
    pub fn grad(&self) -> BallVector<T> {
        BallVector { vx: self.diff(Axis::X), vy: self.diff(Axis::Y), vz: self.diff(Axis::Z) }
    }
}

impl<T: Real> BallVector<T> {
    pub fn new(vx: BallScalar<T>, vy: BallScalar<T>, vz: BallScalar<T>) -> Self {
        Self { vx, vy, vz }
    }

    /// Adaptively constructs each component from a Cartesian evaluator.
    pub fn from_cart(
        fx: impl FnMut(T, T, T) -> T,
        fy: impl FnMut(T, T, T) -> T,
        fz: impl FnMut(T, T, T) -> T,
    ) -> Result<Self> {
        Ok(Self { vx: BallScalar::from_cart(fx)?, vy: BallScalar::from_cart(fy)?, vz: BallScalar::from_cart(fz)? })
    }

    pub fn zero() -> Self {
        Self { vx: BallScalar::zero(), vy: BallScalar::zero(), vz: BallScalar::zero() }
    }

    pub fn components(&self) -> [&BallScalar<T>; 3] {
        [&self.vx, &self.vy, &self.vz]
    }

    pub fn is_resolved(&self) -> bool {
        self.components().iter().all(|c| c.is_resolved())
    }

    /// Largest component `vscale`.
    pub fn vscale(&self) -> T {
        self.components().iter().fold(T::zero(), |a, c| a.max(c.vscale()))
    }

    pub fn eval(&self, x: T, y: T, z: T) -> Result<[T; 3]> {
        Ok([self.vx.eval(x, y, z)?, self.vy.eval(x, y, z)?, self.vz.eval(x, y, z)?])
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { vx: self.vx.add(&o.vx), vy: self.vy.add(&o.vy), vz: self.vz.add(&o.vz) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { vx: self.vx.sub(&o.vx), vy: self.vy.sub(&o.vy), vz: self.vz.sub(&o.vz) }
    }

    pub fn scale(&self, a: T) -> Self {
        Self { vx: self.vx.scale(a), vy: self.vy.scale(a), vz: self.vz.scale(a) }
    }

    /// Scalar field times vector field.
    pub fn scale_by(&self, f: &BallScalar<T>) -> Self {
        Self { vx: f.mul(&self.vx), vy: f.mul(&self.vy), vz: f.mul(&self.vz) }
    }

    pub fn div(&self) -> BallScalar<T> {
        self.vx.diff(Axis::X).add(&self.vy.diff(Axis::Y)).add(&self.vz.diff(Axis::Z))
    }

    pub fn curl(&self) -> Self {
        Self {
            vx: self.vz.diff(Axis::Y).sub(&self.vy.diff(Axis::Z)),
            vy: self.vx.diff(Axis::Z).sub(&self.vz.diff(Axis::X)),
            vz: self.vy.diff(Axis::X).sub(&self.vx.diff(Axis::Y)),
        }
    }

    pub fn dot(&self, o: &Self) -> BallScalar<T> {
        self.vx.mul(&o.vx).add(&self.vy.mul(&o.vy)).add(&self.vz.mul(&o.vz))
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self {
            vx: self.vy.mul(&o.vz).sub(&self.vz.mul(&o.vy)),
            vy: self.vz.mul(&o.vx).sub(&self.vx.mul(&o.vz)),
            vz: self.vx.mul(&o.vy).sub(&self.vy.mul(&o.vx)),
        }
    }

    /// `q · V = x Vx + y Vy + z Vz`, which equals `r V_r`.
    pub fn position_dot(&self) -> BallScalar<T> {
        let t = sum_all(&[mul_x(self.vx.coeffs()), mul_y(self.vy.coeffs()), mul_z(self.vz.coeffs())]);
        wrap(t, &self.components())
    }

    /// `V · n̂` on the unit sphere.
    pub fn normal_trace(&self) -> BoundaryTrace<T> {
        self.position_dot().boundary_trace()
    }

    /// Spherical components, computed by exact coefficient multiplications.
    pub fn to_spherical(&self) -> SphericalComponents<T> {
        let (x, y, z) = (self.vx.coeffs(), self.vy.coeffs(), self.vz.coeffs());
        let horiz = sum_all(&[mul_cos_lambda(x), mul_sin_lambda(y)]);
        let all = self.components();
        SphericalComponents {
            vr: wrap(sum_all(&[mul_sin_theta(&horiz), mul_cos_theta(z)]), &all),
            vlam: wrap(sum_all(&[neg(&mul_sin_lambda(x)), mul_cos_lambda(y)]), &all),
            vth: wrap(sum_all(&[mul_cos_theta(&horiz), neg(&mul_sin_theta(z))]), &all),
        }
    }
}

impl<T: Real> SphericalComponents<T> {
    /// Recombines into Cartesian components.
    pub fn to_cartesian(&self) -> BallVector<T> {
        let (r, l, t) = (self.vr.coeffs(), self.vlam.coeffs(), self.vth.coeffs());
        let rho = sum_all(&[mul_sin_theta(r), mul_cos_theta(t)]);
        let all = [&self.vr, &self.vlam, &self.vth];
        BallVector {
            vx: wrap(sum_all(&[mul_cos_lambda(&rho), neg(&mul_sin_lambda(l))]), &all),
            vy: wrap(sum_all(&[mul_sin_lambda(&rho), mul_cos_lambda(l)]), &all),
            vz: wrap(sum_all(&[mul_cos_theta(r), neg(&mul_sin_theta(t))]), &all),
        }
    }
}

/// Band matrix of `sin²θ ∂²_θ + sinθ cosθ ∂_θ - j²` on `p` θ-modes.
///
/// Column `k'` of the coupling to row `k = k' ∓ 2` is `k'(k' ± 1)/4`; the
/// diagonal is `-k²/2 - j²`. For `j = 0` the row of `k = 0` is replaced by the
/// gauge condition `x_0 = 0`, since constants span the kernel.
fn surface_operator<T: Real>(j: isize, p: usize) -> BandMatrix<T> {
    let mut mat = BandMatrix::zeros(p, 2, 2);
    let ph = (p / 2) as isize;
    let quarter = T::lit(0.25);
    for t in 0..p {
        let k = t as isize - ph;
        if j == 0 && k == 0 {
            mat.add(t, t, creal(T::one()));
            continue;
        }
        mat.add(t, t, creal(-T::from_isize_lossy(k * k) * T::lit(0.5) - T::from_isize_lossy(j * j)));
        if t >= 2 {
            let kk = T::from_isize_lossy(k - 2);
            mat.add(t, t - 2, creal(kk * (kk + T::one()) * quarter));
        }
        if t + 2 < p {
            let kk = T::from_isize_lossy(k + 2);
            mat.add(t, t + 2, creal(kk * (kk - T::one()) * quarter));
        }
    }
    mat
}

/// Solves `sin²θ ∇₁² u = rhs` shell by shell, `∇₁²` being the Laplacian on
/// the unit sphere, with the `(j, k) = (0, 0)` modes of `u` set to zero.
pub fn solve_surface_laplacian<T: Real>(rhs: &CffTensor<T>) -> Result<CffTensor<T>> {
    let [m, n, p] = rhs.sizes();
    let mut out = CffTensor::zeros(m, n, p)?;
    let nh = (n / 2) as isize;
    let mut line = vec![czero::<T>(); p];
    for s in 0..n {
        let j = s as isize - nh;
        let lu = surface_operator::<T>(j, p)
            .factor()
            .map_err(|e| BallError::Singular { mode: j, detail: format!("surface Laplacian: {e:?}") })?;
        for i in 0..m {
            for (t, v) in line.iter_mut().enumerate() {
                *v = rhs[(i, s, t)];
            }
            if j == 0 {
                line[p / 2] = czero();
            }
            lu.solve_in_place(&mut line);
            for (t, v) in line.iter().enumerate() {
                out[(i, s, t)] = *v;
            }
        }
    }
    Ok(out)
}

/// Right-hand side `-sin²θ g` of the scaled surface problem, with
/// coefficients below `floor` treated as zero.
fn surface_rhs<T: Real>(g: &BallScalar<T>, floor: T) -> CffTensor<T> {
    let mut t = neg(&mul_sin_theta(&mul_sin_theta(g.coeffs())));
    t.zero_small(floor);
    t
}

/// Splits a divergence-free field into poloidal and toroidal scalars.
///
/// With `q = (x, y, z)` the scalars satisfy `∇₁²Φ = -q·V` and
/// `∇₁²Ψ = -q·(∇×V)` on every sphere. Both right-hand sides are formed from
/// Cartesian components, so `V_λ` and `V_θ` never appear.
pub fn pt_decompose<T: Real>(v: &BallVector<T>) -> Result<PtScalars<T>> {
    pt_decompose_with_scale(v, T::zero())
}

/// As [`pt_decompose`], with divergence noise measured against at least
/// `reference`. A field formed as a difference of larger fields carries
/// noise set by those, not by its own size.
fn pt_decompose_with_scale<T: Real>(v: &BallVector<T>, reference: T) -> Result<PtScalars<T>> {
    let scale = v.vscale();
    let partials = [v.vx.diff(Axis::X), v.vy.diff(Axis::Y), v.vz.diff(Axis::Z)];
    // cancellation noise in the sum is relative to the largest term
    let term_scale = partials.iter().fold(scale.max(reference), |a, d| a.max(d.vscale()));
    let residual = partials[0].add(&partials[1]).add(&partials[2]).vscale();
    let allowed = T::lit(1e-8) * term_scale.max(T::epsilon());
    if residual > allowed {
        return Err(BallError::NotDivergenceFree { residual: residual.as_f64(), allowed: allowed.as_f64() });
    }
    if scale == T::zero() {
        return Ok(PtScalars { phi: BallScalar::zero(), psi: BallScalar::zero(), gauge: true });
    }
    let deg = v.components().iter().flat_map(|c| c.sizes()).max().unwrap_or(1);
    let floor = T::chop_tol() * T::from_usize_lossy(deg) * scale;
    let all = v.components();
    let phi = solve_surface_laplacian(&surface_rhs(&v.position_dot(), floor))?;
    let curl = v.curl();
    let psi = solve_surface_laplacian(&surface_rhs(&curl.position_dot(), floor * T::from_usize_lossy(deg)))?;
    Ok(PtScalars { phi: wrap(phi, &all), psi: wrap(psi, &all), gauge: true })
}

impl<T: Real> PtScalars<T> {
    /// `(∇×∇×(Φ q), ∇×(Ψ q))`.
    pub fn parts(&self) -> (BallVector<T>, BallVector<T>) {
        let q_times = |f: &BallScalar<T>| BallVector {
            vx: mul_coord(f, Axis::X),
            vy: mul_coord(f, Axis::Y),
            vz: mul_coord(f, Axis::Z),
        };
        let poloidal = q_times(&self.phi).curl().curl();
        let toroidal = q_times(&self.psi).curl();
        (poloidal, toroidal)
    }
}

/// `P + T` rebuilt from the scalars.
pub fn pt_to_vector<T: Real>(pt: &PtScalars<T>) -> BallVector<T> {
    let (p, t) = pt.parts();
    p.add(&t)
}

/// Helmholtz–Hodge decomposition `V = ∇f + ψ` with `∇·ψ = 0` and `ψ·n̂ = 0`
/// on the sphere. `f` solves `∇²f = ∇·V` with `∂f/∂r = V·n̂`; its free
/// constant follows the Neumann solver's gauge.
pub fn helmholtz_hodge<T: Real>(v: &BallVector<T>) -> Result<HodgeDecomposition<T>> {
    let div = v.div();
    let g = v.normal_trace();
    // The solution is about as complicated as the data, so a cube covering
    // the largest data size resolves it.
    let side = [div.sizes(), v.vx.sizes(), v.vy.sizes(), v.vz.sizes()]
        .iter()
        .flatten()
        .chain(g.sizes().iter())
        .copied()
        .max()
        .unwrap_or(1);
    let side = (side.max(16) + 1) & !1;
    let sizes = [side; 3];
    let bc = BoundaryData::new(BcKind::Neumann, g.resized(sizes[1], sizes[2])?);
    let f = helmholtz_solve(&div, T::zero(), &bc, sizes)?;
    let grad = f.grad();
    let psi = v.sub(&grad);
    let reference = [v.vscale(), grad.vscale(), div.vscale()].into_iter().fold(T::zero(), T::max);
    let pt = pt_decompose_with_scale(&psi, reference)?;
    Ok(HodgeDecomposition { f, psi, pt })
}
