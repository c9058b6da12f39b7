//! Dense eigenvalues of general complex matrices.
//!
//! Householder reduction to upper Hessenberg form followed by implicitly
//! shifted complex QR iterations (Wilkinson shifts, Givens bulge chasing).
//! Only eigenvalues are computed, so each sweep touches the active window only.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::LinalgError;
use crate::matrix::DenseMatrix;
use crate::scalar::Complex64;

const EPS: f64 = f64::EPSILON;

#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// All eigenvalues of a square complex matrix, with algebraic multiplicity,
/// in no particular order.
pub fn eig_general(a: &DenseMatrix<Complex64>) -> Result<Vec<Complex64>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![a[(0, 0)]]),
        _ => {}
    }
    let mut h: Vec<Complex64> = a.as_slice().to_vec();
    hessenberg(&mut h, n);
    hessenberg_qr(&mut h, n)
}

/// Eigenvalues sorted by real part, then imaginary part.
pub fn eig_sorted(a: &DenseMatrix<Complex64>) -> Result<Vec<Complex64>, LinalgError> {
    let mut e = eig_general(a)?;
    sort_spectrum(&mut e);
    Ok(e)
}

/// Relative gap below which two real parts count as equal when ordering a
/// spectrum.
pub const SPECTRUM_ORDER_TOL: f64 = 1e-8;

/// Sorts by real part, then imaginary part.
///
/// Real parts joined by a chain of gaps at most
/// `SPECTRUM_ORDER_TOL · max(1, max|λ|)` are treated as equal, so spectra that
/// differ only by rounding come out in the same order.
pub fn sort_spectrum(values: &mut [Complex64]) {
    sort_spectrum_by(values, |z| *z);
}

/// [`sort_spectrum`] for items carrying an eigenvalue.
pub fn sort_spectrum_by<T>(items: &mut [T], key: impl Fn(&T) -> Complex64) {
    items.sort_by(|x, y| {
        let (a, b) = (key(x), key(y));
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    let scale = items.iter().map(|x| key(x).norm()).fold(1.0, f64::max);
    let tol = SPECTRUM_ORDER_TOL * scale;
    let mut start = 0;
    for i in 1..=items.len() {
        if i == items.len() || key(&items[i]).re - key(&items[i - 1]).re > tol {
            items[start..i].sort_by(|x, y| {
                let (a, b) = (key(x), key(y));
                a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re))
            });
            start = i;
        }
    }
}

fn hessenberg(h: &mut [Complex64], n: usize) {
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; n];
    let mut w = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut tail = 0.0;
        for i in 1..m {
            tail += h[(k + 1 + i) * n + k].norm_sqr();
        }
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1) * n + k];
        let xnorm = libm::sqrt(x0.norm_sqr() + tail);
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        for i in 0..m {
            v[i] = h[(k + 1 + i) * n + k];
        }
        v[0] -= alpha;
        let vnorm2: f64 = v[..m].iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // left: rows k+1.., columns k..
        for x in w[k..n].iter_mut() {
            *x = zero;
        }
        for i in 0..m {
            let cv = v[i].conj();
            let row = &h[(k + 1 + i) * n..(k + 2 + i) * n];
            for j in k..n {
                w[j] += cv * row[j];
            }
        }
        for i in 0..m {
            let f = v[i] * tau;
            let row = &mut h[(k + 1 + i) * n..(k + 2 + i) * n];
            for j in k..n {
                row[j] -= f * w[j];
            }
        }
        // right: all rows, columns k+1..
        for r in 0..n {
            let row = &mut h[r * n..(r + 1) * n];
            let mut s = zero;
            for i in 0..m {
                s += row[k + 1 + i] * v[i];
            }
            let f = s * tau;
            for i in 0..m {
                row[k + 1 + i] -= f * v[i].conj();
            }
        }
        h[(k + 1) * n + k] = alpha;
        for i in 1..m {
            h[(k + 1 + i) * n + k] = zero;
        }
    }
}

fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    if y == Complex64::new(0.0, 0.0) {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if x == Complex64::new(0.0, 0.0) {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let ax = x.norm();
    let norm = libm::hypot(ax, y.norm());
    (ax / norm, (x / ax) * y.conj() / norm)
}

fn eig2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let t = (a - d) * 0.5;
    let disc = (t * t + b * c).sqrt();
    let mid = (a + d) * 0.5;
    (mid - disc, mid + disc)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let t = (a - d) * 0.5;
    let disc = (t * t + b * c).sqrt();
    let (p, m) = (t + disc, t - disc);
    let den = if p.norm() >= m.norm() { p } else { m };
    if den == Complex64::new(0.0, 0.0) {
        d
    } else {
        d - b * c / den
    }
}

fn hessenberg_qr(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>, LinalgError> {
    let zero = Complex64::new(0.0, 0.0);
    let norm = h.iter().map(|z| cabs1(*z)).fold(0.0, f64::max);
    let mut eigs = vec![zero; n];
    let max_iter = 30 * n.max(10);
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    let at = |i: usize, j: usize| i * n + j;
    loop {
        // locate the start of the unreduced trailing block
        let mut l = hi;
        while l > 0 {
            let mut s = cabs1(h[at(l, l)]) + cabs1(h[at(l - 1, l - 1)]);
            if s == 0.0 {
                s = norm;
            }
            if cabs1(h[at(l, l - 1)]) <= EPS * s {
                h[at(l, l - 1)] = zero;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eigs[hi] = h[at(hi, hi)];
            since_deflation = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        if l + 1 == hi {
            let (e1, e2) = eig2x2(h[at(l, l)], h[at(l, hi)], h[at(hi, l)], h[at(hi, hi)]);
            eigs[l] = e1;
            eigs[hi] = e2;
            since_deflation = 0;
            if l == 0 {
                break;
            }
            hi = l - 1;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > max_iter {
            return Err(LinalgError::ConvergenceFailure { iterations: total });
        }
        let mu = if since_deflation % 10 == 0 {
            h[at(hi, hi)] + Complex64::new(1.5 * cabs1(h[at(hi, hi - 1)]), 0.0)
        } else {
            wilkinson_shift(h[at(hi - 1, hi - 1)], h[at(hi - 1, hi)], h[at(hi, hi - 1)], h[at(hi, hi)])
        };
        for k in l..hi {
            let (x, y) = if k == l {
                (h[at(l, l)] - mu, h[at(l + 1, l)])
            } else {
                (h[at(k, k - 1)], h[at(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let start = if k > l { k - 1 } else { l };
            let sc = s.conj();
            let (top, bottom) = h.split_at_mut((k + 1) * n);
            let row_k = &mut top[k * n..];
            let row_k1 = &mut bottom[..n];
            for j in start..=hi {
                let a = row_k[j];
                let b = row_k1[j];
                row_k[j] = a * c + s * b;
                row_k1[j] = b * c - sc * a;
            }
            if k > l {
                h[at(k + 1, k - 1)] = zero;
            }
            let last = (k + 2).min(hi);
            for i in l..=last {
                let a = h[at(i, k)];
                let b = h[at(i, k + 1)];
                h[at(i, k)] = a * c + sc * b;
                h[at(i, k + 1)] = b * c - s * a;
            }
        }
    }
    Ok(eigs)
}
