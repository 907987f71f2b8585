//! Resolution checks and trimming of coefficient tensors.
//!
//! The rule: build the coefficient envelope per variable (maximum modulus
//! over the other two indices), make it monotone from the tail, and take the
//! last index above `tol * vscale` as the chop index. A variable counts as
//! resolved when at least the two trailing envelope entries are below the
//! threshold. Fourier envelopes are folded over `±j` first.

use crate::real::Real;
use crate::tensor::CffTensor;

/// Per-variable coefficient envelopes and the chop decision.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolutionReport {
    /// Tensor sizes the report was computed for.
    pub sizes: [usize; 3],
    /// `max_{j,k} |α_{ijk}|` per radial index.
    pub cols: Vec<f64>,
    /// `max_{i,k} |α_{ijk}|` per azimuthal slot (`j + n/2`).
    pub rows: Vec<f64>,
    /// `max_{i,j} |α_{ijk}|` per polar slot (`k + p/2`).
    pub tubes: Vec<f64>,
    /// Last significant index per variable: radial index `i`, then `|j|`, then `|k|`.
    pub chop: [usize; 3],
    /// Whether each variable is resolved.
    pub resolved: [bool; 3],
    /// Absolute threshold used (`tol * vscale`, or `tol` when `vscale == 0`).
    pub threshold: f64,
}

impl ResolutionReport {
    pub fn converged(&self) -> bool {
        self.resolved.iter().all(|&b| b)
    }

    /// Sizes after discarding everything past the chop indices.
    pub fn trimmed_sizes(&self) -> [usize; 3] {
        let [m, n, p] = self.sizes;
        [
            (self.chop[0] + 1).min(m),
            (2 * self.chop[1] + 2).min(n),
            (2 * self.chop[2] + 2).min(p),
        ]
    }
}

fn last_significant(env: &[f64], thresh: f64) -> usize {
    env.iter().rposition(|&e| e > thresh).unwrap_or(0)
}

fn fold(v: &[f64]) -> Vec<f64> {
    let h = v.len() / 2;
    (0..=h)
        .map(|kk| {
            let neg = v[h - kk];
            let pos = if h + kk < v.len() { v[h + kk] } else { 0.0 };
            neg.max(pos)
        })
        .collect()
}

/// Computes envelopes and chop indices for `coeffs` relative to `vscale`.
pub fn resolution_report<T: Real>(coeffs: &CffTensor<T>, vscale: T, tol: T) -> ResolutionReport {
    let [m, n, p] = coeffs.sizes();
    let mut cols = vec![0.0f64; m];
    let mut rows = vec![0.0f64; n];
    let mut tubes = vec![0.0f64; p];
    for t in 0..p {
        for s in 0..n {
            for (i, z) in coeffs.radial_line(s, t).iter().enumerate() {
                let a = z.norm().as_f64();
                cols[i] = cols[i].max(a);
                rows[s] = rows[s].max(a);
                tubes[t] = tubes[t].max(a);
            }
        }
    }
    let vs = vscale.as_f64();
    let tol = tol.as_f64();
    let threshold = if vs > 0.0 && vs.is_finite() { tol * vs } else { tol };

    let fr = fold(&rows);
    let ft = fold(&tubes);
    let chop = [
        last_significant(&cols, threshold),
        last_significant(&fr, threshold),
        last_significant(&ft, threshold),
    ];
    let lens = [cols.len(), fr.len(), ft.len()];
    let resolved = [0, 1, 2].map(|d| chop[d] + 2 < lens[d]);
    ResolutionReport { sizes: [m, n, p], cols, rows, tubes, chop, resolved, threshold }
}

/// Trims `coeffs` to the chop indices of its own report.
pub fn trim<T: Real>(coeffs: &CffTensor<T>, vscale: T, tol: T) -> CffTensor<T> {
    let rep = resolution_report(coeffs, vscale, tol);
    let [m, n, p] = rep.trimmed_sizes();
    coeffs.resized(m, n, p).expect("trimmed sizes are valid")
}
