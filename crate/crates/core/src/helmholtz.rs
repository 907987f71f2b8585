//! Spectral solver for `Δu + K²u = f` on the unit ball.
//!
//! After multiplying by `r² sin²θ` the equation separates in `λ`; every
//! azimuthal mode `j` becomes a matrix equation
//!
//! ```text
//! L_r U M_sin²ᵀ + S02 U L_θᵀ = S02 F
//! ```
//!
//! where `U` holds the Chebyshev (rows) × Fourier-in-θ (columns)
//! coefficients, `L_r` and `S02` are ultraspherical operators and `L_θ`,
//! `M_sin²` act on θ-modes. Boundary conditions at `r = ±1` replace the last
//! two ultraspherical rows for each θ-mode. The θ-operators only couple modes
//! `k` and `k ± 2`, so each mode splits into two independent parity classes,
//! each a banded linear system.
//!
//! The pure Neumann problem with `K = 0` has constants in its kernel. Its
//! `j = 0` mode is therefore solved in a Legendre basis in `cos θ`, where it
//! decouples into radial ODEs, and the free constant is fixed by setting the
//! leading coefficient of the degree-0 radial solution to zero.

use crate::ball::BallScalar;
use crate::calculus::{sum2_boundary, BoundaryTrace};
use crate::coeffops::{mul_r, mul_sin_theta};
use crate::error::{BallError, Result};
use crate::linalg::{band_from_dense, BandLu, BandMatrix};
use crate::real::{c, creal, czero, sign_pow, Real, C};
use crate::tensor::CffTensor;

/// Small dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Dense<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut d = Self::zeros(n, n);
        for i in 0..n {
            d.set(i, i, creal(T::one()));
        }
        d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C<T> {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C<T>) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    fn add_at(&mut self, r: usize, c: usize, v: C<T>) {
        if r < self.rows && c < self.cols {
            self.data[r * self.cols + c] += v;
        }
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == czero() {
                    continue;
                }
                for c in 0..o.cols {
                    out.data[r * o.cols + c] += a * o.get(k, c);
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: C<T>) -> Self {
        Self { data: self.data.iter().map(|z| *z * s).collect(), ..self.clone() }
    }

    pub fn plus(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self { data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(), ..self.clone() }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Leading `rows × cols` block (zero padded if larger).
    pub fn block(&self, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for r in 0..rows.min(self.rows) {
            for c in 0..cols.min(self.cols) {
                out.set(r, c, self.get(r, c));
            }
        }
        out
    }

    /// `(lower, upper)` bandwidths of the nonzero pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut lo, mut up) = (0, 0);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) != czero() {
                    if r > c {
                        lo = lo.max(r - c);
                    } else {
                        up = up.max(c - r);
                    }
                }
            }
        }
        (lo, up)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, z| a.max(z.norm()))
    }
}

/// Banded ultraspherical operators of size `size × size`.
#[derive(Clone, Debug)]
pub struct UltraOperators<T: Real> {
    /// `d/dr`: Chebyshev → `C⁽¹⁾`.
    pub d1: Dense<T>,
    /// `d²/dr²`: Chebyshev → `C⁽²⁾`.
    pub d2: Dense<T>,
    /// Chebyshev → `C⁽¹⁾`.
    pub s0: Dense<T>,
    /// `C⁽¹⁾` → `C⁽²⁾`.
    pub s1: Dense<T>,
    /// Multiplication by `r` in `C⁽²⁾`.
    pub mr: Dense<T>,
}

impl<T: Real> UltraOperators<T> {
    pub fn new(size: usize) -> Self {
        let one = T::one();
        let half = T::lit(0.5);
        let f = T::from_usize_lossy;
        let mut d1 = Dense::zeros(size, size);
        let mut d2 = Dense::zeros(size, size);
        let mut s0 = Dense::zeros(size, size);
        let mut s1 = Dense::zeros(size, size);
        let mut mr = Dense::zeros(size, size);
        for k in 0..size {
            if k >= 1 {
                d1.set(k - 1, k, creal(f(k)));
            }
            if k >= 2 {
                d2.set(k - 2, k, creal(f(2 * k)));
            }
            s0.set(k, k, creal(if k == 0 { one } else { half }));
            if k >= 2 {
                s0.set(k - 2, k, creal(-half));
            }
            s1.set(k, k, creal(one / f(k + 1)));
            if k >= 2 {
                s1.set(k - 2, k, creal(-one / f(k + 1)));
            }
            // r C²_k = [(k+1) C²_{k+1} + (k+3) C²_{k-1}] / (2(k+2))
            let den = f(2 * (k + 2));
            mr.add_at(k + 1, k, creal(f(k + 1) / den));
            if k >= 1 {
                mr.add_at(k - 1, k, creal(f(k + 3) / den));
            }
        }
        Self { d1, d2, s0, s1, mr }
    }

    /// Chebyshev → `C⁽²⁾` conversion.
    pub fn s02(&self) -> Dense<T> {
        self.s1.matmul(&self.s0)
    }

    pub fn mr2(&self) -> Dense<T> {
        self.mr.matmul(&self.mr)
    }

    /// `r² d²/dr² + 2r d/dr + shift r²`, mapping Chebyshev → `C⁽²⁾`.
    pub fn radial(&self, shift: T) -> Dense<T> {
        let mr2 = self.mr2();
        let a = mr2.matmul(&self.d2);
        let b = self.mr.matmul(&self.s1).matmul(&self.d1).scaled(creal(T::lit(2.0)));
        let mut l = a.plus(&b);
        if shift != T::zero() {
            l = l.plus(&mr2.matmul(&self.s02()).scaled(creal(shift)));
        }
        l
    }
}

/// Fourier operators in θ on `p` modes `k = -p/2..p/2`.
#[derive(Clone, Debug)]
pub struct FourierThetaOperators<T: Real> {
    /// Multiplication by `sin²θ`.
    pub msin2: Dense<T>,
    /// Multiplication by `sin θ cos θ`.
    pub msincos: Dense<T>,
    /// `d/dθ`.
    pub dtheta: Dense<T>,
}

impl<T: Real> FourierThetaOperators<T> {
    pub fn new(p: usize) -> Self {
        let quarter = T::lit(0.25);
        let mut msin2 = Dense::zeros(p, p);
        let mut msincos = Dense::zeros(p, p);
        let mut dtheta = Dense::zeros(p, p);
        let ph = (p / 2) as isize;
        for t in 0..p {
            let k = t as isize - ph;
            msin2.set(t, t, creal(T::lit(0.5)));
            dtheta.set(t, t, c(T::zero(), T::from_isize_lossy(k)));
            // sin²θ = 1/2 - (e^{2iθ} + e^{-2iθ})/4 ; sinθcosθ = (e^{2iθ} - e^{-2iθ})/(4i)
            if t >= 2 {
                msin2.set(t, t - 2, creal(-quarter));
                msincos.set(t, t - 2, c(T::zero(), -quarter));
            }
            if t + 2 < p {
                msin2.set(t, t + 2, creal(-quarter));
                msincos.set(t, t + 2, c(T::zero(), quarter));
            }
        }
        Self { msin2, msincos, dtheta }
    }

    /// `sin²θ ∂²_θ + sinθ cosθ ∂_θ - j²`, i.e. `u ↦ sinθ ∂_θ(sinθ ∂_θ u) - j²u`.
    pub fn ltheta(&self, j: isize) -> Dense<T> {
        let d2 = self.dtheta.matmul(&self.dtheta);
        let p = self.dtheta.rows();
        self.msin2
            .matmul(&d2)
            .plus(&self.msincos.matmul(&self.dtheta))
            .plus(&Dense::identity(p).scaled(creal(-T::from_isize_lossy(j * j))))
    }
}

/// Kind of boundary condition at `r = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcKind {
    Dirichlet,
    Neumann,
}

/// Boundary values `g(λ, θ)` (Dirichlet) or normal derivatives (Neumann).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData<T: Real> {
    pub kind: BcKind,
    pub gplus: BoundaryTrace<T>,
    /// Whether `g` is real-valued.
    pub real: bool,
}

impl<T: Real> BoundaryData<T> {
    pub fn new(kind: BcKind, gplus: BoundaryTrace<T>) -> Self {
        Self { kind, gplus, real: true }
    }

    /// Samples `g(x, y, z)` on the `n × p` sphere grid.
    pub fn from_cart(kind: BcKind, n: usize, p: usize, g: impl FnMut(T, T, T) -> T) -> Result<Self> {
        Ok(Self::new(kind, BoundaryTrace::from_cart(n, p, g)?))
    }

    /// Homogeneous data.
    pub fn zero(kind: BcKind) -> Self {
        Self::new(kind, BoundaryTrace::zeros(2, 2).expect("valid"))
    }

    /// Coefficients at `r = -1`: the doubling maps `r = -1` to the reflected
    /// point `(1, λ+π, π-θ)`, which multiplies θ-mode `k` by `(-1)^k` and,
    /// for normal derivatives, flips the sign.
    pub fn gminus(&self, j: isize, k: isize) -> C<T> {
        self.gminus_of(&self.gplus, j, k)
    }

    /// Boundary functionals `(B⁺, B⁻)` on Chebyshev coefficients of length `m`.
    pub fn rows(&self, m: usize) -> (Vec<T>, Vec<T>) {
        boundary_rows(self.kind, m)
    }
}

fn boundary_rows<T: Real>(kind: BcKind, m: usize) -> (Vec<T>, Vec<T>) {
    (0..m)
        .map(|i| {
            let fi = T::from_usize_lossy(i);
            match kind {
                BcKind::Dirichlet => (T::one(), sign_pow::<T>(i as isize)),
                BcKind::Neumann => (fi * fi, sign_pow::<T>(i as isize + 1) * fi * fi),
            }
        })
        .unzip()
}

/// Operators for one azimuthal mode.
#[derive(Clone, Debug)]
pub struct ModeOperators<T: Real> {
    pub j: isize,
    pub m: usize,
    pub p: usize,
    /// `L_r`, first `m - 2` rows.
    pub lr: Dense<T>,
    /// `S02`, first `m - 2` rows and `m` columns.
    pub s02: Dense<T>,
    /// `S02` with `m + 2` columns, for right-hand sides.
    pub s02_rhs: Dense<T>,
    pub msin2: Dense<T>,
    pub ltheta: Dense<T>,
    pub bplus: Vec<T>,
    pub bminus: Vec<T>,
}

/// Assembles the operators of mode `j` for `Δu + K²u` with `m` radial and
/// `p` polar coefficients.
pub fn assemble_mode<T: Real>(j: isize, k2: T, m: usize, p: usize, kind: BcKind) -> Result<ModeOperators<T>> {
    if m < 3 {
        return Err(BallError::InvalidSize(format!("radial size {m} must be at least 3 for a boundary value problem")));
    }
    crate::tensor::check_sizes(m, 2, p)?;
    let big = m + 6;
    let ultra = UltraOperators::<T>::new(big);
    let lr = ultra.radial(k2).block(m - 2, m);
    let s02_full = ultra.s02();
    let th = FourierThetaOperators::<T>::new(p);
    let (bplus, bminus) = boundary_rows(kind, m);
    Ok(ModeOperators {
        j,
        m,
        p,
        lr,
        s02: s02_full.block(m - 2, m),
        s02_rhs: s02_full.block(m - 2, m + 2),
        msin2: th.msin2.clone(),
        ltheta: th.ltheta(j),
        bplus,
        bminus,
    })
}

impl<T: Real> ModeOperators<T> {
    /// `L_r U M_sin²ᵀ + S02 U L_θᵀ` for `U` of size `m × p`.
    pub fn apply(&self, u: &Dense<T>) -> Dense<T> {
        let a = self.lr.matmul(u).matmul(&self.msin2.transpose());
        let b = self.s02.matmul(u).matmul(&self.ltheta.transpose());
        a.plus(&b)
    }

    /// `S02 F` for `F` of size `(m + 2) × p`.
    pub fn rhs(&self, f: &Dense<T>) -> Dense<T> {
        self.s02_rhs.matmul(f)
    }

    /// Boundary functionals applied to every column of `U`.
    pub fn boundary_values(&self, u: &Dense<T>) -> (Vec<C<T>>, Vec<C<T>>) {
        let col = |b: &[T], t: usize| (0..self.m).fold(czero::<T>(), |acc, i| acc + u.get(i, t) * b[i]);
        ((0..self.p).map(|t| col(&self.bplus, t)).collect(), (0..self.p).map(|t| col(&self.bminus, t)).collect())
    }
}

/// Factored bordered systems of one mode, one per θ-parity class.
struct ModeSolver<T: Real> {
    m: usize,
    p: usize,
    classes: [Vec<usize>; 2],
    lus: [Option<BandLu<T>>; 2],
}

impl<T: Real> ModeSolver<T> {
    fn new(ops: &ModeOperators<T>) -> Result<Self> {
        let (m, p) = (ops.m, ops.p);
        let ph = (p / 2) as isize;
        let classes: [Vec<usize>; 2] =
            [0, 1].map(|par| (0..p).filter(|&t| (t as isize - ph).rem_euclid(2) == par).collect());
        let mut lus: [Option<BandLu<T>>; 2] = [None, None];
        for (par, ts) in classes.iter().enumerate() {
            if ts.is_empty() {
                continue;
            }
            let mut trip: Vec<(usize, usize, C<T>)> = Vec::new();
            for (q, &t) in ts.iter().enumerate() {
                let row0 = q * m;
                for i in 0..m {
                    trip.push((row0, row0 + i, creal(ops.bplus[i])));
                    trip.push((row0 + 1, row0 + i, creal(ops.bminus[i])));
                }
                for (q2, &t2) in ts.iter().enumerate() {
                    if q2.abs_diff(q) > 1 {
                        continue;
                    }
                    let (ms, lt) = (ops.msin2.get(t, t2), ops.ltheta.get(t, t2));
                    if ms == czero() && lt == czero() {
                        continue;
                    }
                    for a in 0..m - 2 {
                        let lo = a.saturating_sub(2);
                        let hi = (a + 7).min(m);
                        for i in lo..hi {
                            let v = ops.lr.get(a, i) * ms + ops.s02.get(a, i) * lt;
                            if v != czero() {
                                trip.push((row0 + 2 + a, q2 * m + i, v));
                            }
                        }
                    }
                }
            }
            let nn = ts.len() * m;
            let (mut kl, mut ku) = (0usize, 0usize);
            for &(r, c_, _) in &trip {
                if r > c_ {
                    kl = kl.max(r - c_);
                } else {
                    ku = ku.max(c_ - r);
                }
            }
            let mut band = BandMatrix::zeros(nn, kl, ku);
            for (r, c_, v) in trip {
                band.add(r, c_, v);
            }
            let lu = band.factor().map_err(|e| BallError::Singular {
                mode: ops.j,
                detail: format!(
                    "θ-parity {par}: pivot {:e} in column {} of the bordered system",
                    e.magnitude, e.column
                ),
            })?;
            lus[par] = Some(lu);
        }
        Ok(Self { m, p, classes, lus })
    }

    /// Solves for `U` given `S02 F` (`(m-2) × p`) and the boundary values.
    fn solve(&self, sf: &Dense<T>, gp: &[C<T>], gm: &[C<T>]) -> Dense<T> {
        let m = self.m;
        let mut u = Dense::zeros(m, self.p);
        for (ts, lu) in self.classes.iter().zip(&self.lus) {
            let Some(lu) = lu else { continue };
            let mut b = vec![czero(); ts.len() * m];
            for (q, &t) in ts.iter().enumerate() {
                b[q * m] = gp[t];
                b[q * m + 1] = gm[t];
                for a in 0..m - 2 {
                    b[q * m + 2 + a] = sf.get(a, t);
                }
            }
            lu.solve_in_place(&mut b);
            for (q, &t) in ts.iter().enumerate() {
                for i in 0..m {
                    u.set(i, t, b[q * m + i]);
                }
            }
        }
        u
    }
}

/// Solves one mode's bordered matrix equation.
///
/// `f` holds the Chebyshev × Fourier coefficients of `r² sin²θ f_j` with
/// `m + 2` rows; `gplus`, `gminus` are the `p` boundary coefficients at
/// `r = ±1`.
pub fn solve_mode_sylvester<T: Real>(
    ops: &ModeOperators<T>,
    f: &Dense<T>,
    gplus: &[C<T>],
    gminus: &[C<T>],
) -> Result<Dense<T>> {
    let solver = ModeSolver::new(ops)?;
    Ok(solver.solve(&ops.rhs(f), gplus, gminus))
}

/// Chebyshev → Legendre coefficients on `[-1, 1]`.
pub fn cheb_to_legendre<T: Real>(c_: &[C<T>]) -> Vec<C<T>> {
    let n = c_.len();
    if n == 0 {
        return Vec::new();
    }
    // columns: T_k in the Legendre basis, via T_{k+1} = 2t T_k - T_{k-1}
    let mut out = vec![czero(); n];
    let mut prev = vec![T::zero(); n];
    let mut cur = vec![T::zero(); n];
    cur[0] = T::one();
    for (k, ck) in c_.iter().enumerate() {
        for l in 0..=k.min(n - 1) {
            out[l] += *ck * cur[l];
        }
        if k + 1 == n {
            break;
        }
        let mut next = vec![T::zero(); n];
        // t P_l = ((l+1) P_{l+1} + l P_{l-1}) / (2l+1)
        for l in 0..=k {
            let v = cur[l];
            if v == T::zero() {
                continue;
            }
            let fl = T::from_usize_lossy(l);
            let den = T::lit(2.0) * fl + T::one();
            let scale = if k == 0 { T::one() } else { T::lit(2.0) };
            if l + 1 < n {
                next[l + 1] += scale * v * (fl + T::one()) / den;
            }
            if l >= 1 {
                next[l - 1] += scale * v * fl / den;
            }
        }
        if k >= 1 {
            for l in 0..n {
                next[l] -= prev[l];
            }
        }
        prev = std::mem::replace(&mut cur, next);
    }
    out
}

/// Legendre → Chebyshev coefficients on `[-1, 1]`.
pub fn legendre_to_cheb<T: Real>(l_: &[C<T>]) -> Vec<C<T>> {
    let n = l_.len();
    if n == 0 {
        return Vec::new();
    }
    // columns: P_l in the Chebyshev basis, via (l+1) P_{l+1} = (2l+1) t P_l - l P_{l-1}
    let mut out = vec![czero(); n];
    let mut prev = vec![T::zero(); n];
    let mut cur = vec![T::zero(); n];
    cur[0] = T::one();
    for (l, cl) in l_.iter().enumerate() {
        for k in 0..=l.min(n - 1) {
            out[k] += *cl * cur[k];
        }
        if l + 1 == n {
            break;
        }
        // t T_k = (T_{k+1} + T_{|k-1|}) / 2
        let mut tcur = vec![T::zero(); n];
        for k in 0..=l {
            let v = cur[k];
            if v == T::zero() {
                continue;
            }
            if k == 0 {
                tcur[1] += v;
            } else {
                if k + 1 < n {
                    tcur[k + 1] += v * T::lit(0.5);
                }
                tcur[k - 1] += v * T::lit(0.5);
            }
        }
        let fl = T::from_usize_lossy(l);
        let mut next = vec![T::zero(); n];
        for k in 0..n {
            next[k] = ((T::lit(2.0) * fl + T::one()) * tcur[k] - fl * prev[k]) / (fl + T::one());
        }
        prev = std::mem::replace(&mut cur, next);
    }
    out
}

/// Even Fourier series in θ (slots `k = -p/2..p/2`) → cosine coefficients
/// `c_0..c_{p/2}`, which are Chebyshev coefficients in `cos θ`.
fn fold_even<T: Real>(v: &[C<T>]) -> Vec<C<T>> {
    let p = v.len();
    let ph = p / 2;
    (0..=ph)
        .map(|k| match k {
            0 => v[ph],
            _ if k == ph => v[0],
            _ => v[ph + k] + v[ph - k],
        })
        .collect()
}

fn unfold_even<T: Real>(cs: &[C<T>], p: usize) -> Vec<C<T>> {
    let ph = p / 2;
    let mut v = vec![czero(); p];
    v[ph] = cs[0];
    for k in 1..ph {
        let h = cs[k] * T::lit(0.5);
        v[ph + k] = h;
        v[ph - k] = h;
    }
    v[0] = cs[ph];
    v
}

/// The `j = 0` mode of the Neumann problem with `K = 0`, through the
/// Legendre basis in `cos θ`. `f` holds coefficients of `r² f_0` with
/// `m + 2` rows and `p` columns.
fn solve_neumann_axisymmetric<T: Real>(m: usize, p: usize, f: &Dense<T>, gplus: &[C<T>]) -> Result<Dense<T>> {
    let big = m + 6;
    let ultra = UltraOperators::<T>::new(big);
    let lr0 = ultra.radial(T::zero()).block(m - 2, m);
    let s02_full = ultra.s02();
    let s02 = s02_full.block(m - 2, m);
    let s02_rhs = s02_full.block(m - 2, m + 2);
    let (bplus, bminus) = boundary_rows::<T>(BcKind::Neumann, m);
    let nl = p / 2 + 1;

    // Legendre coefficients of the data, row by row
    let fl: Vec<Vec<C<T>>> = (0..m + 2)
        .map(|i| cheb_to_legendre(&fold_even(&(0..p).map(|t| f.get(i, t)).collect::<Vec<_>>())))
        .collect();
    let gl = cheb_to_legendre(&fold_even(gplus));

    let mut ul = vec![vec![czero::<T>(); nl]; m];
    for l in 0..nl {
        let ll = T::from_usize_lossy(l * (l + 1));
        let op = lr0.plus(&s02.scaled(creal(-ll)));
        let mut dense = vec![czero::<T>(); m * m];
        let mut b = vec![czero::<T>(); m];
        for i in 0..m {
            dense[i] = creal(bplus[i]);
            dense[m + i] = if l == 0 {
                creal(if i == 0 { T::one() } else { T::zero() })
            } else {
                creal(bminus[i])
            };
        }
        b[0] = gl[l];
        b[1] = if l == 0 { czero() } else { -gl[l] * sign_pow::<T>(l as isize) };
        for a in 0..m - 2 {
            for i in 0..m {
                dense[(a + 2) * m + i] = op.get(a, i);
            }
            b[a + 2] = (0..m + 2).fold(czero(), |acc, i| acc + s02_rhs.get(a, i) * fl[i][l]);
        }
        let lu = band_from_dense(m, &dense).factor().map_err(|e| BallError::Singular {
            mode: 0,
            detail: format!("Legendre degree {l}: pivot {:e} in column {}", e.magnitude, e.column),
        })?;
        lu.solve_in_place(&mut b);
        for i in 0..m {
            ul[i][l] = b[i];
        }
    }
    let mut u = Dense::zeros(m, p);
    for (i, row) in ul.iter().enumerate() {
        let back = unfold_even(&legendre_to_cheb(row), p);
        for (t, v) in back.into_iter().enumerate() {
            u.set(i, t, v);
        }
    }
    Ok(u)
}

fn mode_matrix<T: Real>(a: &CffTensor<T>, j: isize) -> Dense<T> {
    let [m, _, p] = a.sizes();
    let s = (j + (a.n() / 2) as isize) as usize;
    let mut d = Dense::zeros(m, p);
    for t in 0..p {
        for i in 0..m {
            d.set(i, t, a[(i, s, t)]);
        }
    }
    d
}

/// Solves `Δu + k2 u = rhs` on the unit ball with `m × n × p` coefficients.
///
/// `k2` is a signed real, so negative shifts (implicit time steps) are
/// allowed. For Neumann data with `k2 = 0` the data must satisfy
/// `∮ g dS = ∫ rhs dV`; the returned solution is then normalised so that the
/// leading coefficient of its axisymmetric degree-0 radial part is zero.
pub fn helmholtz_solve<T: Real>(
    rhs: &BallScalar<T>,
    k2: T,
    bc: &BoundaryData<T>,
    sizes: [usize; 3],
) -> Result<BallScalar<T>> {
    let [m, n, p] = sizes;
    crate::tensor::check_sizes(m, n, p)?;
    if m < 3 {
        return Err(BallError::InvalidSize(format!("radial size {m} must be at least 3")));
    }
    let g = bc.gplus.resized(n, p)?;
    let neumann_zero = bc.kind == BcKind::Neumann && k2 == T::zero();
    if neumann_zero {
        let flux = sum2_boundary(&g).re;
        let volume = rhs.sum3().re;
        let four_pi = T::lit(4.0) * T::PI();
        let scale = (rhs.vscale() * four_pi / T::lit(3.0)).max(g.vscale() * four_pi);
        let residual = (flux - volume).abs();
        if scale > T::zero() && residual > T::lit(1e-8) * scale {
            return Err(BallError::Incompatible {
                flux: flux.as_f64(),
                volume: volume.as_f64(),
                residual: residual.as_f64(),
            });
        }
    }

    let f = rhs.coeffs().resized(m, n, p)?;
    let r2f = mul_r(&mul_r(&f));
    let scaled = mul_sin_theta(&mul_sin_theta(&r2f)).resized(m + 2, n, p)?;
    let r2f = r2f.resized(m + 2, n, p)?;

    let mut out = CffTensor::zeros(m, n, p)?;
    let nh = (n / 2) as isize;
    let mut cache: Option<(isize, ModeSolver<T>, ModeOperators<T>)> = None;
    // modes ±j share their operators
    let mut order: Vec<isize> = Vec::with_capacity(n);
    for a in 0..=nh {
        order.push(a);
        if a > 0 && -a >= -nh {
            order.push(-a);
        }
    }
    order.retain(|&j| j >= -nh && j < nh);
    for j in order {
        let s = (j + nh) as usize;
        let gp: Vec<C<T>> = (0..p).map(|t| g.get(j, t as isize - (p / 2) as isize)).collect();
        let gm: Vec<C<T>> = (0..p).map(|t| bc.gminus_of(&g, j, t as isize - (p / 2) as isize)).collect();
        let u = if neumann_zero && j == 0 {
            solve_neumann_axisymmetric(m, p, &mode_matrix(&r2f, 0), &gp)?
        } else {
            let reuse = matches!(&cache, Some((jj, _, _)) if jj.abs() == j.abs());
            if !reuse {
                let ops = assemble_mode(j, k2, m, p, bc.kind)?;
                let solver = ModeSolver::new(&ops)?;
                cache = Some((j, solver, ops));
            }
            let (_, solver, ops) = cache.as_ref().expect("assembled");
            solver.solve(&ops.rhs(&mode_matrix(&scaled, j)), &gp, &gm)
        };
        for t in 0..p {
            for i in 0..m {
                out[(i, s, t)] = u.get(i, t);
            }
        }
    }
    project_origin(&mut out);
    if neumann_zero {
        out[(0, nh as usize, p / 2)] = C::new(T::zero(), T::zero());
    }
    let mut sol = BallScalar::from_coeffs(out, rhs.is_real() && bc.real);
    sol.set_resolved(sol.is_resolved() && rhs.is_resolved());
    Ok(sol)
}

/// Removes the value at `r = 0` of every angular mode other than `(0, 0)`.
///
/// The r²-weighted equations leave that value unconstrained, so an
/// under-resolved solve can return a function that is not single-valued at
/// the origin, and Cartesian derivatives then blow up there. The correction
/// uses `(1 - r²)² = (3 T₀ - 4 T₂ + T₄) / 8`, which has zero value and zero
/// slope at `r = ±1`, so either kind of boundary data is preserved.
fn project_origin<T: Real>(a: &mut CffTensor<T>) {
    let [m, n, p] = a.sizes();
    if m < 5 {
        return;
    }
    let (nh, ph) = ((n / 2) as isize, (p / 2) as isize);
    let bump = [T::lit(0.375), T::lit(-0.5), T::lit(0.125)];
    for k in (-ph..ph).filter(|k| k % 2 == 0) {
        for j in -nh..nh {
            if j == 0 && k == 0 {
                continue;
            }
            let base = a.slot(0, j, k).expect("in range");
            let line = &mut a.data_mut()[base..base + m];
            let mut at0 = C::new(T::zero(), T::zero());
            for (q, c) in line.iter().step_by(2).enumerate() {
                at0 += if q % 2 == 0 { *c } else { -*c };
            }
            for (q, b) in bump.iter().enumerate() {
                line[2 * q] -= at0 * *b;
            }
        }
    }
}

impl<T: Real> BoundaryData<T> {
    fn gminus_of(&self, g: &BoundaryTrace<T>, j: isize, k: isize) -> C<T> {
        let v = g.get(j, k) * sign_pow::<T>(k);
        match self.kind {
            BcKind::Dirichlet => v,
            BcKind::Neumann => -v,
        }
    }
}
