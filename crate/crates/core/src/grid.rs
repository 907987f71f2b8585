//! Sampling grids and the doubling of half-domain samples onto the full
//! `[-1, 1] × [-π, π] × [-π, π]` cuboid.

use crate::error::{BallError, Result};
use crate::real::{Real, C};
use crate::tensor::check_sizes;

/// Doubled Chebyshev extreme points `cos(iπ/(m-1))`, `i = 0..m`, ordered
/// from `1` down to `-1`. Computed in the sine form so that the grid is
/// exactly antisymmetric and contains an exact `0` for odd `m`.
pub fn cheb_points<T: Real>(m: usize) -> Vec<T> {
    if m == 1 {
        return vec![T::one()];
    }
    let nm = T::from_usize_lossy(m - 1);
    (0..m)
        .map(|i| {
            let num = T::from_isize_lossy(m as isize - 1 - 2 * i as isize);
            (T::FRAC_PI_2() * num / nm).sin()
        })
        .collect()
}

/// Full azimuthal grid `2jπ/n`, `j = -n/2..n/2`.
pub fn lambda_points<T: Real>(n: usize) -> Vec<T> {
    let h = (n / 2) as isize;
    (-h..h)
        .map(|j| T::TAU() * T::from_isize_lossy(j) / T::from_usize_lossy(n))
        .collect()
}

/// Full (doubled) polar grid `2kπ/p`, `k = -p/2..p/2`.
pub fn theta_points<T: Real>(p: usize) -> Vec<T> {
    lambda_points(p)
}

/// Number of nonnegative radii on a doubled Chebyshev grid of length `m`.
#[inline]
pub fn half_radial_len(m: usize) -> usize {
    m.div_ceil(2)
}

/// Half-domain sampling grid over `[0, 1] × [-π, π] × [0, π]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleGrid<T: Real> {
    /// Sizes `(m, n, p)` of the doubled tensor this grid feeds.
    pub sizes: [usize; 3],
    /// Nonnegative Chebyshev radii in ascending order.
    pub radii: Vec<T>,
    /// Azimuthal nodes `2jπ/n`, `j = -n/2..n/2`.
    pub lambdas: Vec<T>,
    /// Polar nodes `2kπ/p`, `k = 0..=p/2`.
    pub thetas: Vec<T>,
}

/// Builds the half-domain grid for a doubled `m × n × p` tensor.
pub fn make_grid<T: Real>(m: usize, n: usize, p: usize) -> Result<SampleGrid<T>> {
    check_sizes(m, n, p)?;
    let full = cheb_points::<T>(m);
    let mh = half_radial_len(m);
    let radii = (0..mh).map(|h| full[mh - 1 - h]).collect();
    let thetas = (0..=p / 2)
        .map(|k| T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(p))
        .collect();
    Ok(SampleGrid { sizes: [m, n, p], radii, lambdas: lambda_points(n), thetas })
}

impl<T: Real> SampleGrid<T> {
    /// Shape `(radii, lambdas, thetas)` of the half-sample array.
    pub fn half_shape(&self) -> [usize; 3] {
        [self.radii.len(), self.lambdas.len(), self.thetas.len()]
    }

    /// Evaluates `f(r, λ, θ)` at every half-grid node.
    pub fn sample<E>(
        &self,
        mut f: impl FnMut(T, T, T) -> std::result::Result<C<T>, E>,
    ) -> std::result::Result<HalfSamples<T>, E> {
        let [mh, n, ph] = self.half_shape();
        let mut data = Vec::with_capacity(mh * n * ph);
        for &th in &self.thetas {
            for &la in &self.lambdas {
                for &r in &self.radii {
                    data.push(f(r, la, th)?);
                }
            }
        }
        Ok(HalfSamples { shape: [mh, n, ph], data })
    }
}

/// Samples on a half grid; layout radius-fastest, then λ, then θ.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSamples<T: Real> {
    pub shape: [usize; 3],
    pub data: Vec<C<T>>,
}

impl<T: Real> HalfSamples<T> {
    #[inline]
    pub fn get(&self, h: usize, s: usize, k: usize) -> C<T> {
        self.data[h + self.shape[0] * (s + self.shape[1] * k)]
    }
}

/// Values on the full doubled grid; same layout as [`crate::CffTensor`]:
/// `r_i = cos(iπ/(m-1))`, `λ_s = -π + 2πs/n`, `θ_t = -π + 2πt/p`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridValues<T: Real> {
    pub sizes: [usize; 3],
    pub data: Vec<C<T>>,
}

impl<T: Real> GridValues<T> {
    pub fn new(sizes: [usize; 3], data: Vec<C<T>>) -> Result<Self> {
        check_sizes(sizes[0], sizes[1], sizes[2])?;
        if data.len() != sizes.iter().product::<usize>() {
            return Err(BallError::ShapeMismatch {
                expected: format!("{} values", sizes.iter().product::<usize>()),
                got: format!("{} values", data.len()),
            });
        }
        Ok(Self { sizes, data })
    }

    #[inline]
    pub fn get(&self, i: usize, s: usize, t: usize) -> C<T> {
        let [m, n, _] = self.sizes;
        self.data[i + m * (s + n * t)]
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, z| a.max(z.norm()))
    }
}

/// Maps a full-grid node `(i, s, t)` to the half-grid node it copies.
///
/// Uses the two reflections that leave the Cartesian point unchanged:
/// `(r, λ, θ) ~ (-r, λ+π, π-θ)` and `(r, λ, θ) ~ (r, λ+π, -θ)`, plus
/// periodicity `θ = -π ~ π`.
pub(crate) fn half_source(sizes: [usize; 3], i: usize, s: usize, t: usize) -> (usize, usize, usize) {
    let [m, n, p] = sizes;
    let mh = half_radial_len(m);
    let (ph, nh) = (p as isize / 2, n / 2);
    let (mut i, mut s, mut k) = (i, s, t as isize - ph);
    if i >= mh {
        // negative radius
        i = m - 1 - i;
        s = (s + nh) % n;
        k = ph - k;
    }
    // wrap k into [-p/2, p/2]
    if k > ph {
        k -= 2 * ph;
    }
    if k < 0 {
        if k == -ph {
            k = ph;
        } else {
            s = (s + nh) % n;
            k = -k;
        }
    }
    (mh - 1 - i, s, k as usize)
}

/// Extends half-domain samples to the doubled grid by copying (no new
/// evaluations, no arithmetic).
pub fn double_samples<T: Real>(sizes: [usize; 3], half: &HalfSamples<T>) -> Result<GridValues<T>> {
    let [m, n, p] = sizes;
    check_sizes(m, n, p)?;
    let expect = [half_radial_len(m), n, p / 2 + 1];
    if half.shape != expect || half.data.len() != expect.iter().product::<usize>() {
        return Err(BallError::ShapeMismatch {
            expected: format!("{expect:?}"),
            got: format!("{:?}", half.shape),
        });
    }
    let mut data = Vec::with_capacity(m * n * p);
    for t in 0..p {
        for s in 0..n {
            for i in 0..m {
                let (h, ss, kk) = half_source(sizes, i, s, t);
                data.push(half.get(h, ss, kk));
            }
        }
    }
    Ok(GridValues { sizes, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::creal;
    use std::f64::consts::PI;

    #[test]
    fn radial_half_grid_for_four_points() {
        let full = cheb_points::<f64>(4);
        let want = [1.0, 0.5, -0.5, -1.0];
        for (a, b) in full.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let g = make_grid::<f64>(4, 4, 4).unwrap();
        assert!((g.radii[0] - 0.5).abs() < 1e-15);
        assert!((g.radii[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn angular_grids() {
        let g = make_grid::<f64>(4, 4, 4).unwrap();
        let want = [-PI, -PI / 2.0, 0.0, PI / 2.0];
        for (a, b) in g.lambdas.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let want = [0.0, PI / 2.0, PI];
        for (a, b) in g.thetas.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn odd_sizes_rejected() {
        assert!(make_grid::<f64>(4, 5, 4).is_err());
        assert!(make_grid::<f64>(4, 4, 7).is_err());
    }

    #[test]
    fn odd_radial_grid_contains_origin() {
        let g = make_grid::<f64>(5, 4, 4).unwrap();
        assert_eq!(g.radii.len(), 3);
        assert_eq!(g.radii[0], 0.0);
    }

    #[test]
    fn constant_doubles_to_constant() {
        let sizes = [6, 8, 6];
        let g = make_grid::<f64>(6, 8, 6).unwrap();
        let half = g
            .sample(|_, _, _| Ok::<_, ()>(creal(3.25)))
            .unwrap();
        let full = double_samples(sizes, &half).unwrap();
        assert!(full.data.iter().all(|z| *z == creal(3.25)));
    }

    /// The doubled samples of `r cos θ` must satisfy the reflection
    /// `value(-r, λ+π, π-θ) = value(r, λ, θ)` at every node.
    #[test]
    fn doubling_respects_block_reflection() {
        let (m, n, p) = (8, 10, 12);
        let g = make_grid::<f64>(m, n, p).unwrap();
        let half = g
            .sample(|r, _, th| Ok::<_, ()>(creal(r * th.cos())))
            .unwrap();
        let full = double_samples([m, n, p], &half).unwrap();
        for t in 0..p {
            for s in 0..n {
                for i in 0..m {
                    let v = full.get(i, s, t);
                    let im = m - 1 - i;
                    let sm = (s + n / 2) % n;
                    // θ_t = -π + 2πt/p ; π - θ_t = -π + 2π(p/2 - t)/p  (mod 2π)
                    let tm = (p / 2 + p - t) % p;
                    assert_eq!(v, full.get(im, sm, tm));
                }
            }
        }
        // and the values are those of the natural extension
        let r = cheb_points::<f64>(m);
        let th = theta_points::<f64>(p);
        for t in 0..p {
            for i in 0..m {
                let want = r[i] * th[t].cos();
                assert!((full.get(i, 0, t).re - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn lambda_independent_stays_lambda_independent() {
        let (m, n, p) = (7, 6, 8);
        let g = make_grid::<f64>(m, n, p).unwrap();
        let half = g
            .sample(|r, _, th| Ok::<_, ()>(creal(r * r + th.cos().powi(2))))
            .unwrap();
        let full = double_samples([m, n, p], &half).unwrap();
        for t in 0..p {
            for i in 0..m {
                let v0 = full.get(i, 0, t);
                for s in 1..n {
                    assert_eq!(full.get(i, s, t), v0);
                }
            }
        }
    }

    #[test]
    fn double_rejects_wrong_shape() {
        let half = HalfSamples::<f64> { shape: [2, 4, 3], data: vec![creal(0.0); 24] };
        assert!(double_samples([4, 4, 6], &half).is_err());
    }
}
