//! Sphere areas, generalized determinants, the densities `s_{d,n}`, and
//! samplers on spheres, subspheres and caps.

use std::ops::Deref;

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pirational::PiRational;

/// Smallest orthogonalization factor below which a tuple counts as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// A point of `S^{d-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Accepts coordinates whose norm is 1 within `1e-12`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let n = norm(&coords);
        if coords.is_empty() || (n - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("vector norm {n} is not 1")));
        }
        Ok(UnitVector(coords))
    }

    /// Rescales to unit length; `None` for the zero vector.
    pub fn normalize(mut coords: Vec<f64>) -> Option<Self> {
        let n = norm(&coords);
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        coords.iter_mut().for_each(|c| *c /= n);
        Some(UnitVector(coords))
    }

    /// The standard basis vector `e_i` of `R^d`.
    pub fn basis(d: usize, i: usize) -> Self {
        assert!(i < d, "basis index out of range");
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        UnitVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        UnitVector(coords)
    }
}

impl Deref for UnitVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn double_factorial(k: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut j = k;
    while j > 1 {
        acc *= j;
        j -= 2;
    }
    acc
}

/// Surface area `A_k` of the unit sphere `S^k`.
pub fn surface_area(k: usize) -> PiRational {
    let k = k as i64;
    let df = double_factorial(k - 1);
    if k % 2 == 0 {
        let h = k / 2;
        PiRational::new(BigInt::from(2) * BigInt::from(2).pow(h as u32), df, h as i32)
    } else {
        let h = (k + 1) / 2;
        PiRational::new(BigInt::from(2).pow(h as u32), df, h as i32)
    }
}

/// `∫_0^{π/2} sin^a θ cos^b θ dθ`.
pub fn sin_cos_moment(a: usize, b: usize) -> PiRational {
    &surface_area(a + b + 1) / &(&surface_area(a) * &surface_area(b))
}

/// The value of an expectation that may diverge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Moment {
    Finite(PiRational),
    Infinite,
}

impl Moment {
    pub fn to_f64(&self) -> f64 {
        match self {
            Moment::Finite(v) => v.to_f64(),
            Moment::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<&PiRational> {
        match self {
            Moment::Finite(v) => Some(v),
            Moment::Infinite => None,
        }
    }
}

fn check_moment_domain(d: usize, n: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::domain(format!("dimension d={d} must be at least 3")));
    }
    if n < 1 || n >= d {
        return Err(Error::domain(format!("tuple size n={n} must satisfy 1 <= n < d={d}")));
    }
    Ok(())
}

/// `E[Det(x_1,…,x_n)^p]` for iid uniform points of `S^{d-1}`.
pub fn det_moment(d: usize, n: usize, p: i64) -> Result<Moment> {
    check_moment_domain(d, n)?;
    let (di, ni) = (d as i64, n as i64);
    if n == 1 {
        return Ok(Moment::Finite(PiRational::one()));
    }
    if p < ni - di {
        return Ok(Moment::Infinite);
    }
    let a = |k: i64| surface_area(k as usize);
    let ratio = &a(di + p - 1) / &a(di - 1);
    let mut value = ratio.powi((n - 1) as i32);
    for r in 2..=ni {
        value = &value * &(&a(di - r) / &a(di + p - r));
    }
    Ok(Moment::Finite(value))
}

/// `A_{d+p-1} A_{d-n} / (A_{d-1} A_{d-n+p})`: the expected `p`-th power of
/// the height of a uniform point over the span of `n-1` others.
pub fn ratio_det_moment(d: usize, n: usize, p: i64) -> Result<Moment> {
    check_moment_domain(d, n)?;
    let (di, ni) = (d as i64, n as i64);
    if n == 1 {
        return Ok(Moment::Finite(PiRational::one()));
    }
    if p < ni - di {
        return Ok(Moment::Infinite);
    }
    let a = |k: i64| surface_area(k as usize);
    let num = &a(di + p - 1) * &a(di - ni);
    let den = &a(di - 1) * &a(di - ni + p);
    Ok(Moment::Finite(&num / &den))
}

/// Normalizing constant `c_{d,n} = A_{d-1}^{n-1} A_{d-n-1} / A_{d-2}^n` of `s_{d,n}`.
pub fn s_constant(d: usize, n: usize) -> Result<PiRational> {
    if d < 3 {
        return Err(Error::domain(format!("dimension d={d} must be at least 3")));
    }
    if n + 1 > d {
        return Err(Error::domain(format!("s_{{d,n}} needs n <= d-1, got n={n}, d={d}")));
    }
    if n <= 1 {
        return Ok(PiRational::one());
    }
    let num = &surface_area(d - 1).powi(n as i32 - 1) * &surface_area(d - n - 1);
    Ok(&num / &surface_area(d - 2).powi(n as i32))
}

/// Floating constants `c_{d,n}` for `n = 0..d-1`.
pub fn s_constants_f64(d: usize) -> Result<Vec<f64>> {
    (0..d).map(|n| s_constant(d, n).map(|c| c.to_f64())).collect()
}

/// Result of orthogonalizing a tuple of vectors.
#[derive(Clone, Debug)]
pub struct Orthogonalization {
    /// Orthonormal basis of the span, one vector per nonsingular pivot.
    pub basis: Vec<Vec<f64>>,
    /// Product of the diagonal factors, i.e. the generalized determinant.
    pub det: f64,
    /// Smallest diagonal factor (`1` for the empty tuple).
    pub min_factor: f64,
}

impl Orthogonalization {
    pub fn is_singular(&self) -> bool {
        self.min_factor <= SINGULAR_TOL
    }
}

/// Column-pivoted modified Gram–Schmidt with one reorthogonalization pass.
pub fn orthogonalize<V: AsRef<[f64]>>(xs: &[V]) -> Orthogonalization {
    let d = xs.first().map_or(0, |x| x.as_ref().len());
    let mut rows: Vec<f64> = xs.iter().flat_map(|x| x.as_ref().iter().copied()).collect();
    let f = orthogonalize_rows(&mut rows, xs.len(), d);
    let basis = rows.chunks(d.max(1)).take(f.rank).map(<[f64]>::to_vec).collect();
    Orthogonalization { basis, det: f.det, min_factor: f.min_factor }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Factors {
    pub det: f64,
    pub min_factor: f64,
    pub rank: usize,
}

/// In-place version of [`orthogonalize`] on `k` row-major rows of length
/// `d`. Afterwards the first `rank` rows are an orthonormal basis.
pub(crate) fn orthogonalize_rows(rows: &mut [f64], k: usize, d: usize) -> Factors {
    let mut det = 1.0;
    let mut min_factor = 1.0_f64;
    let mut rank = 0;
    while rank < k {
        let row_norm = |rows: &[f64], i: usize| norm(&rows[i * d..(i + 1) * d]);
        let pivot = (rank..k).max_by(|&a, &b| row_norm(rows, a).total_cmp(&row_norm(rows, b))).expect("rows remain");
        if pivot != rank {
            for c in 0..d {
                rows.swap(rank * d + c, pivot * d + c);
            }
        }
        let (done, rest) = rows.split_at_mut(rank * d);
        let (v, later) = rest.split_at_mut(d);
        for q in done.chunks_exact(d) {
            let c = dot(q, v);
            v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= c * qi);
        }
        let r = norm(v);
        if r <= SINGULAR_TOL {
            det *= r;
            min_factor = min_factor.min(r);
            for w in later[..(k - rank - 1) * d].chunks_exact(d) {
                det *= norm(w);
            }
            break;
        }
        det *= r;
        min_factor = min_factor.min(r);
        v.iter_mut().for_each(|vi| *vi /= r);
        for w in later[..(k - rank - 1) * d].chunks_exact_mut(d) {
            let c = dot(v, w);
            w.iter_mut().zip(v.iter()).for_each(|(wi, qi)| *wi -= c * qi);
        }
        rank += 1;
    }
    Factors { det, min_factor, rank }
}

/// Generalized determinant `|x_1 ∧ … ∧ x_m|`.
pub fn gram_det<V: AsRef<[f64]>>(xs: &[V]) -> f64 {
    orthogonalize(xs).det
}

/// Density `s_{d,n}` at a tuple of `n <= d-1` unit vectors; `+inf` at
/// numerically singular tuples.
pub fn s_density<V: AsRef<[f64]>>(d: usize, points: &[V]) -> Result<f64> {
    let c = s_constant(d, points.len())?.to_f64();
    if points.len() <= 1 {
        return Ok(1.0);
    }
    let o = orthogonalize(points);
    if o.is_singular() {
        return Ok(f64::INFINITY);
    }
    Ok(c / o.det)
}

/// Uniform point of `S^{d-1}`.
pub fn sample_uniform_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitVector {
    assert!(d >= 1, "sphere dimension must be positive");
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(u) = UnitVector::normalize(v) {
            return u;
        }
    }
}

/// Uniform point on the unit sphere of the orthogonal complement of an
/// orthonormal `basis` in `R^d`. Returns `None` if the projected draw
/// vanishes (probability zero).
pub(crate) fn sample_complement<R: Rng + ?Sized>(d: usize, basis: &[Vec<f64>], rng: &mut R) -> Option<UnitVector> {
    let flat: Vec<f64> = basis.iter().flatten().copied().collect();
    let mut v = vec![0.0; d];
    sample_complement_into(&flat, &mut v, rng).then_some(UnitVector(v))
}

/// Writes into `out` a uniform unit vector orthogonal to the orthonormal
/// rows of `basis`. Returns `false` if the projected draw vanished.
pub(crate) fn sample_complement_into<R: Rng + ?Sized>(basis: &[f64], out: &mut [f64], rng: &mut R) -> bool {
    let d = out.len();
    if basis.len() >= d * d {
        return false;
    }
    out.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
    for _ in 0..2 {
        for q in basis.chunks_exact(d) {
            let c = dot(q, out);
            out.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= c * qi);
        }
    }
    let n = norm(out);
    if n <= SINGULAR_TOL {
        return false;
    }
    out.iter_mut().for_each(|vi| *vi /= n);
    true
}

/// Uniform point of `S^{d-1}` orthogonal to every constraint vector.
pub fn sample_orthogonal_subsphere<R: Rng + ?Sized>(d: usize, constraints: &[UnitVector], rng: &mut R) -> Result<UnitVector> {
    if constraints.iter().any(|c| c.dim() != d) {
        return Err(Error::domain("constraint dimension differs from d"));
    }
    if constraints.len() + 1 > d {
        return Err(Error::domain(format!("{} constraints leave no sphere in R^{d}", constraints.len())));
    }
    let o = orthogonalize(constraints);
    if o.is_singular() {
        return Err(Error::SingularConstraints { factor: o.min_factor });
    }
    loop {
        if let Some(v) = sample_complement(d, &o.basis, rng) {
            return Ok(v);
        }
    }
}

fn check_cap(d: usize, r: f64) -> Result<()> {
    if !(r > 0.0 && r <= std::f64::consts::PI) {
        return Err(Error::domain(format!("cap radius {r} outside (0, π]")));
    }
    if d < 2 {
        return Err(Error::domain("caps need d >= 2"));
    }
    Ok(())
}

/// Uniform point of the spherical cap of geodesic radius `r` around `center`.
pub fn sample_in_cap<R: Rng + ?Sized>(center: &UnitVector, r: f64, rng: &mut R) -> Result<UnitVector> {
    check_cap(center.dim(), r)?;
    let mut x = vec![0.0; center.dim()];
    sample_in_cap_into(center, r, &mut x, rng);
    Ok(UnitVector(x))
}

/// In-place [`sample_in_cap`] for a validated radius.
pub(crate) fn sample_in_cap_into<R: Rng + ?Sized>(center: &[f64], r: f64, out: &mut [f64], rng: &mut R) {
    let d = center.len();
    let power = (d - 2) as i32;
    let peak = r.min(std::f64::consts::FRAC_PI_2).sin().powi(power);
    let theta = loop {
        let t = r * rng.random::<f64>();
        if power == 0 || rng.random::<f64>() * peak < t.sin().powi(power) {
            break t;
        }
    };
    while !sample_complement_into(center, out, rng) {}
    let (s, c) = theta.sin_cos();
    out.iter_mut().zip(center).for_each(|(o, ci)| *o = c * ci + s * *o);
    let n = norm(out);
    out.iter_mut().for_each(|o| *o /= n);
}

/// Monte Carlo average of `1/Det` over a product of caps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallAverage {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    /// Draws discarded because the perturbed tuple was numerically singular.
    pub excluded: usize,
}

/// Estimates `D_r(X)`, the average of `1/Det(y_1,…,y_n)` over independent
/// `y_i` uniform in the caps `B_r(x_i)`.
pub fn ball_avg_inv_det<R: Rng + ?Sized>(xs: &[UnitVector], r: f64, inner_samples: usize, rng: &mut R) -> Result<BallAverage> {
    let d = xs.first().map(|x| x.dim()).ok_or_else(|| Error::domain("empty tuple"))?;
    if xs.len() >= d {
        return Err(Error::domain(format!("tuple size {} must be below d={d}", xs.len())));
    }
    if xs.iter().any(|x| x.dim() != d) {
        return Err(Error::domain("tuple vectors differ in dimension"));
    }
    if inner_samples == 0 {
        return Err(Error::domain("inner sample count must be positive"));
    }
    check_cap(d, r)?;
    let centers: Vec<f64> = xs.iter().flat_map(|x| x.iter().copied()).collect();
    let mut scratch = vec![0.0; centers.len()];
    let avg = ball_avg_inv_det_flat(&centers, d, r, inner_samples, &mut scratch, rng);
    if avg.samples == 0 {
        return Err(Error::SingularConstraints { factor: 0.0 });
    }
    Ok(avg)
}

/// [`ball_avg_inv_det`] on `k` row-major centers with caller scratch of the
/// same length. A single center averages to exactly 1. Returns zero kept
/// samples if every draw was singular.
pub(crate) fn ball_avg_inv_det_flat<R: Rng + ?Sized>(
    centers: &[f64],
    d: usize,
    r: f64,
    inner_samples: usize,
    scratch: &mut [f64],
    rng: &mut R,
) -> BallAverage {
    let k = centers.len() / d;
    if k <= 1 {
        if k == 1 {
            sample_in_cap_into(centers, r, &mut scratch[..d], rng);
        }
        return BallAverage { mean: 1.0, std_error: 0.0, samples: inner_samples, excluded: 0 };
    }
    let (mut sum, mut sum_sq, mut kept, mut excluded) = (0.0, 0.0, 0usize, 0usize);
    for _ in 0..inner_samples {
        for (c, y) in centers.chunks_exact(d).zip(scratch.chunks_exact_mut(d)) {
            sample_in_cap_into(c, r, y, rng);
        }
        let f = orthogonalize_rows(scratch, k, d);
        if f.min_factor <= SINGULAR_TOL {
            excluded += 1;
            continue;
        }
        let v = 1.0 / f.det;
        sum += v;
        sum_sq += v * v;
        kept += 1;
    }
    if kept == 0 {
        return BallAverage { mean: f64::INFINITY, std_error: f64::INFINITY, samples: 0, excluded };
    }
    let mean = sum / kept as f64;
    let var = if kept > 1 { ((sum_sq - sum * mean) / (kept - 1) as f64).max(0.0) } else { 0.0 };
    BallAverage { mean, std_error: (var / kept as f64).sqrt(), samples: kept, excluded }
}
