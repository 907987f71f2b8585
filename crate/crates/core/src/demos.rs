//! Time-stepping examples built on the Helmholtz solver: advection-diffusion
//! of a passive scalar and the kinematic induction equation.
//!
//! Both use first-order implicit-explicit stepping. Diffusion is implicit,
//! which turns every step into `Δu + K² u = rhs` with `K² = -1/(D Δt)`.

use crate::ball::BallScalar;
use crate::error::Result;
use crate::helmholtz::{helmholtz_solve, BcKind, BoundaryData};
use crate::vector::{pt_decompose, pt_to_vector, BallVector, PtScalars};

type Ball = BallScalar<f64>;
type BallV = BallVector<f64>;

pub const ADVDIFF_D: f64 = 1.0 / 5000.0;
pub const INDUCTION_D: f64 = 1.0 / 3000.0;
pub const DT: f64 = 5e-2;

fn gauss(x: f64, y: f64, z: f64) -> f64 {
    (-5.0 * (x * x + y * y + z * z)).exp()
}

/// `∇×[z e^{-5|q|²} q]`, tangent to the sphere and divergence-free.
pub fn swirl_field() -> Result<BallV> {
    BallV::from_cart(
        |x, y, z| x * z * gauss(x, y, z),
        |x, y, z| y * z * gauss(x, y, z),
        |x, y, z| z * z * gauss(x, y, z),
    )
    .map(|a| a.curl())
}

/// `-x e^{-5|q|²}`.
pub fn advdiff_initial() -> Result<Ball> {
    Ball::from_cart(|x, y, z| -x * gauss(x, y, z))
}

/// `∇×[e^{-5|q|²} (x², y², xz)]`.
pub fn induction_velocity() -> Result<BallV> {
    BallV::from_cart(
        |x, y, z| x * x * gauss(x, y, z),
        |x, y, z| y * y * gauss(x, y, z),
        |x, y, z| x * z * gauss(x, y, z),
    )
    .map(|a| a.curl())
}

/// Advection-diffusion `c_t = D Δc - v·∇c` with no-flux walls. Returns
/// `steps + 1` snapshots starting with `c0`. With `v = None` the scheme
/// reduces to implicit pure diffusion.
pub fn advdiff_run(c0: &Ball, v: Option<&BallV>, d: f64, dt: f64, steps: usize, n: usize) -> Result<Vec<Ball>> {
    let k2 = -1.0 / (d * dt);
    let bc = BoundaryData::zero(BcKind::Neumann);
    let mut out = vec![c0.clone()];
    for _ in 0..steps {
        let c = out.last().expect("non-empty");
        let mut rhs = c.scale(k2);
        if let Some(v) = v {
            rhs = rhs.add(&v.dot(&c.grad()).scale(1.0 / d));
        }
        out.push(helmholtz_solve(&rhs, k2, &bc, [n, n, n])?);
    }
    Ok(out)
}

/// The advection-diffusion example with its standard data.
pub fn demo_advection_diffusion(steps: usize, n: usize) -> Result<Vec<Ball>> {
    let v = swirl_field()?;
    advdiff_run(&advdiff_initial()?, Some(&v), ADVDIFF_D, DT, steps, n)
}

/// One induction step for the scalars of `B`.
///
/// With `N = ∇×(u×B)` decomposed into `(Φ_N, Ψ_N)`, each scalar obeys
/// `∂_t Φ = Φ_N + D ΔΦ`, so the implicit update solves
/// `ΔΦ' + K² Φ' = K² Φ - Φ_N / D` with `Φ' = 0` on the sphere.
pub fn induction_step(pt: &PtScalars<f64>, u: &BallV, d: f64, dt: f64, n: usize) -> Result<PtScalars<f64>> {
    let k2 = -1.0 / (d * dt);
    let bc = BoundaryData::zero(BcKind::Dirichlet);
    let b = pt_to_vector(pt);
    let nl = pt_decompose(&u.cross(&b).curl())?;
    let advance = |s: &Ball, forcing: &Ball| helmholtz_solve(&s.scale(k2).sub(&forcing.scale(1.0 / d)), k2, &bc, [n, n, n]);
    Ok(PtScalars { phi: advance(&pt.phi, &nl.phi)?, psi: advance(&pt.psi, &nl.psi)?, gauge: false })
}

/// The induction example: `B₀ = ∇×[z e^{-5|q|²} q]` advected by
/// [`induction_velocity`]. Returns `steps + 1` snapshots of the scalars.
pub fn demo_induction(steps: usize, n: usize) -> Result<Vec<PtScalars<f64>>> {
    let u = induction_velocity()?;
    let mut out = vec![pt_decompose(&swirl_field()?)?];
    for _ in 0..steps {
        let next = induction_step(out.last().expect("non-empty"), &u, INDUCTION_D, DT, n)?;
        out.push(next);
    }
    Ok(out)
}
