//! Rigid rotations of ball functions.
//!
//! A rotation leaves every radius fixed, so the rotated function is sampled
//! shell by shell: the angular part of the series is summed once per rotated
//! direction and the resulting Chebyshev series is then evaluated at all
//! grid radii.

use crate::ball::{cart_to_sph, sph_to_cart, BallScalar, ConstructOptions};
use crate::error::{BallError, Result};
use crate::grid::{cheb_points, HalfSamples};
use crate::real::{cis, czero, Real, C};
use crate::tensor::CffTensor;
use crate::transform::clenshaw;

/// Euler angles in the Z-X-Z convention.
///
/// The rotation matrix is `R = Rz(γ) Rx(β) Rz(α)`: a turn by `α` about `z`,
/// then `β` about the fixed `x`-axis, then `γ` about the fixed `z`-axis.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct EulerAngles<T: Real> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

fn rz<T: Real>(a: T) -> [[T; 3]; 3] {
    let (s, c) = a.sin_cos();
    let (o, z) = (T::one(), T::zero());
    [[c, -s, z], [s, c, z], [z, z, o]]
}

fn rx<T: Real>(a: T) -> [[T; 3]; 3] {
    let (s, c) = a.sin_cos();
    let (o, z) = (T::one(), T::zero());
    [[o, z, z], [z, c, -s], [z, s, c]]
}

fn matmul<T: Real>(a: &[[T; 3]; 3], b: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).fold(T::zero(), |acc, k| acc + a[i][k] * b[k][j]);
        }
    }
    out
}

impl<T: Real> EulerAngles<T> {
    pub fn new(alpha: T, beta: T, gamma: T) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn matrix(&self) -> [[T; 3]; 3] {
        matmul(&rz(self.gamma), &matmul(&rx(self.beta), &rz(self.alpha)))
    }

    /// Angles of the inverse rotation.
    pub fn inverse(&self) -> Self {
        Self { alpha: -self.gamma, beta: -self.beta, gamma: -self.alpha }
    }

    /// `R q`.
    pub fn apply(&self, q: [T; 3]) -> [T; 3] {
        let r = self.matrix();
        [0, 1, 2].map(|i| r[i][0] * q[0] + r[i][1] * q[1] + r[i][2] * q[2])
    }
}

/// Radial Chebyshev coefficients `a_i = Σ_{jk} α_{ijk} e^{ijλ} e^{ikθ}`.
fn angular_reduce<T: Real>(a: &CffTensor<T>, lam: T, th: T, out: &mut [C<T>]) {
    let [m, n, p] = a.sizes();
    let ej: Vec<C<T>> = (0..n).map(|s| cis(T::from_isize_lossy(a.lambda_mode(s)) * lam)).collect();
    out.iter_mut().for_each(|z| *z = czero());
    for t in 0..p {
        let ek = cis(T::from_isize_lossy(a.theta_mode(t)) * th);
        for (s, e) in ej.iter().enumerate() {
            let w = *e * ek;
            for (o, x) in out.iter_mut().zip(a.radial_line(s, t)).take(m) {
                *o += *x * w;
            }
        }
    }
}

/// Evaluates the series of `a` at `points = (r, λ, θ)` whose radii are nodes
/// of the doubled Chebyshev grid with `m_grid` points.
///
/// Consecutive points sharing their angles reuse one angular summation, so
/// shell-major orderings cost `O(m n p)` per direction plus `O(m)` per point.
pub fn nonuniform_eval<T: Real>(a: &CffTensor<T>, m_grid: usize, points: &[(T, T, T)]) -> Result<Vec<C<T>>> {
    if m_grid == 0 {
        return Err(BallError::Precondition("radial grid must have at least one node".into()));
    }
    let nodes = cheb_points::<T>(m_grid);
    let tol = T::lit(64.0) * T::epsilon();
    let mut radial = vec![czero(); a.m()];
    let mut last: Option<(T, T)> = None;
    let mut out = Vec::with_capacity(points.len());
    for &(r, lam, th) in points {
        if !nodes.iter().any(|&x| (x - r).abs() <= tol) {
            return Err(BallError::Precondition(format!(
                "radius {} is not a node of the {m_grid}-point Chebyshev grid",
                r.as_f64()
            )));
        }
        if last != Some((lam, th)) {
            angular_reduce(a, lam, th, &mut radial);
            last = Some((lam, th));
        }
        out.push(clenshaw(&radial, r));
    }
    Ok(out)
}

impl<T: Real> BallScalar<T> {
    /// Returns `g` with `g(q) = f(R⁻¹ q)`, resolved adaptively.
    pub fn rotate(&self, angles: EulerAngles<T>) -> Result<Self> {
        let inv = angles.inverse();
        let coeffs = self.coeffs();
        let opts = ConstructOptions::default();
        let mut radial = vec![czero(); coeffs.m()];
        let mut g = BallScalar::construct_from_sampler(&opts, self.is_real(), |grid| {
            let [mh, n, ph] = grid.half_shape();
            let mut data = vec![czero(); mh * n * ph];
            for (k, &th) in grid.thetas.iter().enumerate() {
                for (s, &la) in grid.lambdas.iter().enumerate() {
                    let (x, y, z) = sph_to_cart(T::one(), la, th);
                    let [x2, y2, z2] = inv.apply([x, y, z]);
                    let (_, la2, th2) = cart_to_sph(x2, y2, z2);
                    angular_reduce(coeffs, la2, th2, &mut radial);
                    for (h, &r) in grid.radii.iter().enumerate() {
                        data[h + mh * (s + n * k)] = clenshaw(&radial, r);
                    }
                }
            }
            Ok(HalfSamples { shape: [mh, n, ph], data })
        })?;
        g.set_resolved(g.is_resolved() && self.is_resolved());
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identity_angles_give_identity_matrix() {
        let r = EulerAngles::<f64>::default().matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(r[i][j], if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn matrix_is_orthogonal_with_unit_determinant() {
        let r = EulerAngles::<f64>::new(0.3, -1.1, 2.0).matrix();
        let rt = [0, 1, 2].map(|i| [0, 1, 2].map(|j| r[j][i]));
        let p = matmul(&r, &rt);
        for i in 0..3 {
            for j in 0..3 {
                assert!((p[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        assert!((det - 1.0).abs() < 1e-15);
    }

    #[test]
    fn composition_order() {
        // α about z takes e_x to e_y; β = π/2 about x then takes e_y to e_z.
        let q = EulerAngles::new(PI / 2.0, PI / 2.0, 0.0).apply([1.0, 0.0, 0.0]);
        assert!((q[2] - 1.0).abs() < 1e-15 && q[0].abs() < 1e-15 && q[1].abs() < 1e-15);
        let inv = EulerAngles::<f64>::new(0.4, 0.7, -0.2).inverse();
        let q = inv.apply(EulerAngles::new(0.4, 0.7, -0.2).apply([0.1, 0.2, 0.3]));
        assert!((q[0] - 0.1).abs() < 1e-15 && (q[1] - 0.2).abs() < 1e-15 && (q[2] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn off_grid_radius_rejected() {
        let a = CffTensor::<f64>::unit(3, 2, 2, 0, 0, 0).unwrap();
        assert!(nonuniform_eval(&a, 5, &[(0.3, 0.0, 0.0)]).is_err());
        let v = nonuniform_eval(&a, 5, &[(0.0, 1.0, 2.0)]).unwrap();
        assert!((v[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotating_x_gives_rotated_coordinate() {
        // g(q) = x-coordinate of R⁻¹q; for a z-rotation by π/2 that is y.
        let f = BallScalar::<f64>::from_cart(|x, _, _| x).unwrap();
        let g = f.rotate(EulerAngles::new(PI / 2.0, 0.0, 0.0)).unwrap();
        for &(x, y, z) in &[(0.1, 0.2, 0.3), (-0.4, 0.5, 0.0)] {
            assert!((g.eval(x, y, z).unwrap() - y).abs() < 1e-13);
        }
    }
}
