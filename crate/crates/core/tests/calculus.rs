mod common;

use std::f64::consts::PI;

use ballkit::{sum2_boundary, Axis, Ball, BallError, BoundaryTrace, C};
use common::*;

fn cart(f: impl FnMut(f64, f64, f64) -> f64) -> Ball {
    Ball::from_cart(f).unwrap()
}

#[test]
fn constant_evaluates_to_itself() {
    let f = cart(|_, _, _| 5.0);
    for q in [[0.0, 0.0, 0.0], [0.3, -0.2, 0.9], [0.0, 0.0, 1.0]] {
        assert!((f.eval(q[0], q[1], q[2]).unwrap() - 5.0).abs() < 1e-14);
    }
}

#[test]
fn x_squared_at_a_point() {
    let f = cart(|x, _, _| x * x);
    assert!((f.eval(0.3, 0.2, 0.1).unwrap() - 0.09).abs() < 1e-15);
}

#[test]
fn eval_matches_brute_force_sum() {
    let f = cart(|x, y, z| (x + y * y - z).cos() * (1.0 + x * z));
    let mut g = rng(21);
    for q in ball_points(&mut g, 50, 1.0) {
        let (r, l, t) = to_sph(q);
        let want = brute_eval(f.coeffs(), r, l, t);
        let got = f.eval_cart(q[0], q[1], q[2]).unwrap();
        assert!((got - want).norm() <= 1e-12 * f.vscale());
        assert!(got.im.abs() <= 1e-13 * f.vscale());
    }
}

#[test]
fn points_outside_are_rejected() {
    let f = cart(|x, _, _| x);
    assert!(matches!(f.eval(1.0, 0.1, 0.0), Err(BallError::OutsideBall(..))));
    assert!(f.eval(1.0 + 1e-13, 0.0, 0.0).is_ok());
}

#[test]
fn arithmetic() {
    let f = cart(|_, y, _| y.cos().sin());
    let zero = Ball::zero();
    let s = f.add(&zero);
    for (a, b) in s.coeffs().data().iter().zip(f.coeffs().data()) {
        assert!((*a - *b).norm() <= 1e-15);
    }
    let x = cart(|x, _, _| x);
    let xx = x.mul(&x);
    let x2 = cart(|x, _, _| x * x);
    let mut g = rng(1);
    let pts = ball_points(&mut g, 40, 1.0);
    assert!(max_err(&xx, |x, _, _| x * x, &pts) <= 1e-13);
    assert!(max_err(&xx.sub(&x2), |_, _, _| 0.0, &pts) <= 1e-13);
    let one = Ball::constant(1.0);
    let same = f.mul(&one);
    assert_eq!(same.sizes(), f.sizes());
    for (a, b) in same.coeffs().data().iter().zip(f.coeffs().data()) {
        assert!((*a - *b).norm() <= 1e-15);
    }
}

#[test]
fn integrals() {
    assert!((cart(|_, _, _| 1.0).sum3().re - 4.0 * PI / 3.0).abs() < 1e-14);
    assert!((cart(|x, _, _| x * x).sum3().re - 0.837758040957278).abs() < 1e-15);
    let f = cart(|_, y, _| y.cos().sin());
    let want = ball_quadrature(|_, y, _| y.cos().sin(), 200);
    assert!((f.sum3().re - want).abs() <= 1e-12);
}

#[test]
fn integral_is_linear() {
    let f = cart(|x, y, z| (x * y * z).exp());
    let g = cart(|x, _, z| x * x - z);
    let (a, b) = (1.7, -0.4);
    let lhs = f.scale(a).add(&g.scale(b)).sum3().re;
    let rhs = a * f.sum3().re + b * g.sum3().re;
    assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
}

#[test]
fn derivative_examples() {
    let mut g = rng(8);
    let pts = ball_points(&mut g, 50, 1.0);
    let c = cart(|_, _, _| 3.0).diff(Axis::X);
    assert!(c.vscale() <= 1e-14);
    let dx = cart(|x, _, _| x).diff(Axis::X);
    assert!(max_err(&dx, |_, _, _| 1.0, &pts) <= 1e-12);
    let d = cart(|x, y, _| (x * y).cos()).diff(Axis::X);
    assert!(max_err(&d, |x, y, _| -y * (x * y).sin(), &pts) <= 1e-10);
    let dz = cart(|x, y, z| x * y * z * z).diff(Axis::Z);
    assert!(max_err(&dz, |x, y, z| 2.0 * x * y * z, &pts) <= 1e-12);
    let dy = cart(|x, y, z| (x + 2.0 * y - z).sin()).diff(Axis::Y);
    assert!(max_err(&dy, |x, y, z| 2.0 * (x + 2.0 * y - z).cos(), &pts) <= 1e-10);
}

#[test]
fn laplacian_examples() {
    let mut g = rng(4);
    let pts = ball_points(&mut g, 40, 1.0);
    assert!(cart(|_, _, _| 1.0).laplacian().vscale() <= 1e-13);
    let l = cart(|x, y, z| x * x + y * y + z * z).laplacian();
    assert!(max_err(&l, |_, _, _| 6.0, &pts) <= 1e-10);
    let l = cart(|x, _, _| (10.0 * x).sin()).laplacian();
    assert!(max_err(&l, |x, _, _| -100.0 * (10.0 * x).sin(), &pts) <= 1e-8);
}

#[test]
fn mixed_partials_commute() {
    let f = cart(|x, y, z| x * x * y * y * z + x * y * y * y - 2.0 * x * z * z * y);
    let a = f.diff(Axis::X).diff(Axis::Y);
    let b = f.diff(Axis::Y).diff(Axis::X);
    let mut g = rng(5);
    for q in ball_points(&mut g, 30, 1.0) {
        assert!((a.eval(q[0], q[1], q[2]).unwrap() - b.eval(q[0], q[1], q[2]).unwrap()).abs() <= 1e-8);
    }
}

#[test]
fn derivatives_agree_with_finite_differences() {
    let h = 1e-5;
    let ex = |x: f64, y: f64, z: f64| (x * y + z).sin() * (-x * x).exp();
    let f = cart(ex);
    let ds = [f.diff(Axis::X), f.diff(Axis::Y), f.diff(Axis::Z)];
    let mut g = rng(6);
    for q in ball_points(&mut g, 20, 0.9) {
        for (d, e) in ds.iter().zip([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]) {
            let fd = (ex(q[0] + h * e[0], q[1] + h * e[1], q[2] + h * e[2])
                - ex(q[0] - h * e[0], q[1] - h * e[1], q[2] - h * e[2]))
                / (2.0 * h);
            assert!((d.eval(q[0], q[1], q[2]).unwrap() - fd).abs() <= 1e-6);
        }
    }
}

#[test]
fn boundary_traces() {
    let t = cart(|x, y, z| x * x + y * y + z * z).boundary_trace();
    let mut g = rng(2);
    for (l, th) in sphere_angles(&mut g, 10) {
        assert!((t.eval(l, th).re - 1.0).abs() < 1e-13);
    }
    let t = cart(|_, _, z| z).boundary_trace();
    assert!((t.get(0, 1) - C::new(0.5, 0.0)).norm() < 1e-14);
    assert!((t.get(0, -1) - C::new(0.5, 0.0)).norm() < 1e-14);
    assert!(t.get(1, 1).norm() < 1e-14 && t.get(0, 0).norm() < 1e-14);
    let f = cart(|x, y, z| (x * y - z).exp());
    let t = f.boundary_trace();
    for (l, th) in sphere_angles(&mut g, 20) {
        assert!((t.eval(l, th) - f.eval_sph(1.0, l, th)).norm() <= 1e-12);
    }
}

#[test]
fn surface_integrals() {
    let one = BoundaryTrace::<f64>::from_cart(4, 4, |_, _, _| 1.0).unwrap();
    assert!((sum2_boundary(&one).re - 4.0 * PI).abs() < 1e-13);
    let z = BoundaryTrace::<f64>::from_cart(4, 4, |_, _, z| z).unwrap();
    assert!(sum2_boundary(&z).norm() < 1e-14);
    let x2 = cart(|x, _, _| x * x).boundary_trace();
    let want = sphere_quadrature(|x, _, _| x * x, 40);
    assert!((want - 4.0 * PI / 3.0).abs() < 1e-12);
    assert!((sum2_boundary(&x2).re - want).abs() < 1e-13);
}
