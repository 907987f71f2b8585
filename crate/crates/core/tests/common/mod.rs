#![allow(dead_code)]

use ballkit::{Ball, Tensor, C};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Uniform points in the ball of radius `rmax`.
pub fn ball_points(rng: &mut StdRng, count: usize, rmax: f64) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if q.iter().map(|v| v * v).sum::<f64>() <= rmax * rmax {
            out.push(q);
        }
    }
    out
}

/// Uniform directions on the sphere as `(λ, θ)`.
pub fn sphere_angles(rng: &mut StdRng, count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|_| {
            let lam = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let th = rng.gen_range(-1.0f64..1.0).acos();
            (lam, th)
        })
        .collect()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// `∫_ball f dV` by Gauss-Legendre in `r` and `cos θ`, trapezoid in `λ`.
/// Sums are nested per axis to keep rounding at the level of one axis.
pub fn ball_quadrature(f: impl Fn(f64, f64, f64) -> f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let dl = 2.0 * std::f64::consts::PI / n as f64;
    x.iter()
        .zip(&w)
        .map(|(&xr, &wr)| {
            let r = 0.5 * (xr + 1.0);
            let shell: f64 = x
                .iter()
                .zip(&w)
                .map(|(&ct, &wt)| {
                    let st = (1.0 - ct * ct).sqrt();
                    let ring: f64 = (0..n)
                        .map(|l| {
                            let lam = dl * l as f64;
                            f(r * lam.cos() * st, r * lam.sin() * st, r * ct)
                        })
                        .sum();
                    wt * ring * dl
                })
                .sum();
            0.5 * wr * r * r * shell
        })
        .sum()
}

/// `∮_sphere g dS` by the same rule.
pub fn sphere_quadrature(g: impl Fn(f64, f64, f64) -> f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let mut total = 0.0;
    for (b, &ct) in x.iter().enumerate() {
        let st = (1.0 - ct * ct).sqrt();
        for l in 0..n {
            let lam = 2.0 * std::f64::consts::PI * l as f64 / n as f64;
            total += w[b] * (2.0 * std::f64::consts::PI / n as f64) * g(lam.cos() * st, lam.sin() * st, ct);
        }
    }
    total
}

/// The series `Σ α_{ijk} T_i(r) e^{ijλ} e^{ikθ}` summed term by term.
pub fn brute_eval(a: &Tensor, r: f64, lam: f64, th: f64) -> C<f64> {
    let [m, n, p] = a.sizes();
    let (nh, ph) = ((n / 2) as isize, (p / 2) as isize);
    let acos = r.clamp(-1.0, 1.0).acos();
    let mut s = C::new(0.0, 0.0);
    for k in -ph..ph {
        for j in -nh..nh {
            let e = C::from_polar(1.0, j as f64 * lam + k as f64 * th);
            for i in 0..m {
                s += a.get(i, j, k) * e * (i as f64 * acos).cos();
            }
        }
    }
    s
}

pub fn to_sph(q: [f64; 3]) -> (f64, f64, f64) {
    ballkit::cart_to_sph(q[0], q[1], q[2])
}

/// Largest `|f(q) - exact(q)|` over `pts`.
pub fn max_err(f: &Ball, exact: impl Fn(f64, f64, f64) -> f64, pts: &[[f64; 3]]) -> f64 {
    pts.iter().map(|q| (f.eval(q[0], q[1], q[2]).unwrap() - exact(q[0], q[1], q[2])).abs()).fold(0.0, f64::max)
}
