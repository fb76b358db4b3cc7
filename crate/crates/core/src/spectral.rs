//! Eigen-data of the orthogonality operator and the series built from it.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::CompensatedSum;

/// Default cap on the number of series terms.
pub const MAX_TERMS: usize = 1 << 27;

fn double_factorial(k: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut j = k;
    while j > 1 {
        acc *= j;
        j -= 2;
    }
    acc
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn check_dim(d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::domain(format!("dimension d={d} must be at least 3")));
    }
    Ok(())
}

/// Exact eigenvalue `λ_n` on degree-`n` harmonics; zero for odd `n`.
pub fn eigenvalue(d: usize, n: usize) -> Result<BigRational> {
    check_dim(d)?;
    if n % 2 == 1 {
        return Ok(BigRational::zero());
    }
    let r = (n / 2) as i64;
    let di = d as i64;
    let num = double_factorial(di - 3) * double_factorial(2 * r - 1);
    let den = double_factorial(2 * r + di - 3);
    let sign = if r % 2 == 0 { 1 } else { -1 };
    Ok(BigRational::new(num * sign, den))
}

/// Multiplicity `dim(W_n)`.
pub fn multiplicity(d: usize, n: usize) -> Result<BigInt> {
    check_dim(d)?;
    let a = binomial(n + d - 1, d - 1);
    let b = if n >= 2 { binomial(n + d - 3, d - 1) } else { BigInt::zero() };
    Ok(a - b)
}

/// `dim(W_n)` in floating point via `(2n+d-2)/(d-2)! · Π_{j=1}^{d-3} (n+j)`.
pub fn multiplicity_f64(d: usize, n: usize) -> f64 {
    let mut v = (2 * n + d - 2) as f64;
    for j in 1..=d - 3 {
        v *= (n + j) as f64 / (j + 1) as f64;
    }
    v
}

/// `C_n^{(α)}(t)` by the three-term recurrence.
pub fn gegenbauer_at(alpha: f64, n: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * alpha * t);
    if n == 0 {
        return prev;
    }
    for m in 2..=n {
        let m = m as f64;
        let next = (2.0 * t * (m + alpha - 1.0) * cur - (m + 2.0 * alpha - 2.0) * prev) / m;
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized values `C_n^{(α)}(t) / C_n^{(α)}(1)` for increasing `n`.
#[derive(Clone, Debug)]
struct NormalizedGegenbauer {
    alpha: f64,
    t: f64,
    n: usize,
    prev: f64,
    cur: f64,
}

impl NormalizedGegenbauer {
    fn new(alpha: f64, t: f64) -> Self {
        NormalizedGegenbauer { alpha, t, n: 0, prev: 0.0, cur: 1.0 }
    }

    /// Returns the value at the current degree, then advances.
    fn next_value(&mut self) -> f64 {
        let out = self.cur;
        let n = (self.n + 1) as f64;
        let a = self.alpha;
        let next = if self.n == 0 { self.t } else { (2.0 * self.t * (n + a - 1.0) * self.cur - (n - 1.0) * self.prev) / (n + 2.0 * a - 1.0) };
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        out
    }
}

/// One row of a spectral table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralEntry {
    pub n: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub lambda: BigRational,
    #[serde(serialize_with = "ser_int")]
    pub dim: BigInt,
}

fn ser_ratio<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_int<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Eigenvalues and multiplicities for `n = 0..=n_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralTable {
    pub d: usize,
    pub entries: Vec<SpectralEntry>,
}

impl SpectralTable {
    pub fn new(d: usize, n_max: usize) -> Result<Self> {
        let entries = (0..=n_max)
            .map(|n| Ok(SpectralEntry { n, lambda: eigenvalue(d, n)?, dim: multiplicity(d, n)? }))
            .collect::<Result<_>>()?;
        Ok(SpectralTable { d, entries })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,lambda,dim\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{}\n", e.n, e.lambda, e.dim));
        }
        s
    }
}

type TableCache = RwLock<HashMap<(usize, usize), Arc<SpectralTable>>>;

/// Memoized [`SpectralTable::new`].
pub fn spectral_table(d: usize, n_max: usize) -> Result<Arc<SpectralTable>> {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().expect("cache lock").get(&(d, n_max)) {
        return Ok(Arc::clone(t));
    }
    let t = Arc::new(SpectralTable::new(d, n_max)?);
    cache.write().expect("cache lock").insert((d, n_max), Arc::clone(&t));
    Ok(t)
}

/// How a series result is certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesMode {
    /// Absolutely convergent; the tail is bounded by a power envelope.
    Absolute,
    /// Conditionally convergent, summed in increasing order with an
    /// alternating-series bracket.
    Conditional,
    /// Integral-comparison bounds on a positive decreasing series.
    Exact,
}

/// A partial sum with a bracket that contains the true sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Half-width guarantee: `|value - true sum| <= tail_bound`.
    pub tail_bound: f64,
    pub terms: usize,
    pub mode: SeriesMode,
    pub converged: bool,
}

impl SeriesResult {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    fn scaled(self, f: f64) -> SeriesResult {
        SeriesResult { value: self.value * f, lower: self.lower * f, upper: self.upper * f, tail_bound: self.tail_bound * f, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum TailRule {
    /// All terms positive; bound `Σ_{r>=N} c r^{-s}`.
    Positive,
    /// Alternating signs with eventually decreasing magnitudes.
    Alternating,
    /// Terms dominated in magnitude by a positive envelope.
    Dominated,
}

/// Sums `term(r) = (value, envelope)` for `r = 0, 1, …` and stops once the
/// certified tail is below `tol`. `s` is the decay exponent of the envelope.
fn sum_series(mut term: impl FnMut() -> (f64, f64), s: f64, rule: TailRule, tol: f64, max_terms: usize, mode: SeriesMode) -> SeriesResult {
    let mut sum = CompensatedSum::default();
    let mut n = 0usize;
    let mut last_env = f64::INFINITY;
    let mut next = term();
    let mut target = 64usize;
    loop {
        let mut window_max: f64 = 0.0;
        let mut monotone = true;
        let mut last_scaled = 0.0;
        while n < target {
            let (v, env) = next;
            sum.add(v);
            if n >= target / 2 {
                let scaled = env * (n as f64).powf(s);
                window_max = window_max.max(scaled);
                last_scaled = scaled;
                monotone &= env <= last_env;
            }
            last_env = env;
            n += 1;
            next = term();
        }
        let partial = sum.value();
        let nf = n as f64;
        let result = match rule {
            TailRule::Alternating => {
                let t = next.0;
                let (lo, hi) = if t >= 0.0 { (partial, partial + t) } else { (partial + t, partial) };
                let ok = monotone && next.1 <= last_env;
                (ok, SeriesResult { value: partial + t / 2.0, lower: lo, upper: hi, tail_bound: t.abs() / 2.0, terms: n, mode, converged: false })
            }
            TailRule::Positive | TailRule::Dominated => {
                let c = 2.0 * window_max;
                let u = c * (nf.powf(-s) + nf.powf(1.0 - s) / (s - 1.0));
                if rule == TailRule::Positive {
                    let est = (last_scaled * (nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s))).clamp(0.0, u);
                    let value = partial + est;
                    (monotone, SeriesResult { value, lower: partial, upper: partial + u, tail_bound: est.max(u - est), terms: n, mode, converged: false })
                } else {
                    (monotone, SeriesResult { value: partial, lower: partial - u, upper: partial + u, tail_bound: u, terms: n, mode, converged: false })
                }
            }
        };
        let (ok, mut r) = result;
        if ok && r.tail_bound < tol {
            r.converged = true;
            return r;
        }
        if target >= max_terms {
            return r;
        }
        target = (target * 2).min(max_terms);
    }
}

/// Floating eigenvalues `λ_{2r}` for `r = 0, 1, …` via `λ_{2r+2} = -λ_{2r}(2r+1)/(2r+d-1)`.
struct EvenEigenvalues {
    d: f64,
    r: usize,
    lambda: f64,
}

impl EvenEigenvalues {
    fn new(d: usize) -> Self {
        EvenEigenvalues { d: d as f64, r: 0, lambda: 1.0 }
    }

    fn next_value(&mut self) -> f64 {
        let out = self.lambda;
        let r = self.r as f64;
        self.lambda *= -(2.0 * r + 1.0) / (2.0 * r + self.d - 1.0);
        self.r += 1;
        out
    }
}

/// Decay exponent of `dim(W_{2r}) |λ_{2r}|^k` in `r`.
fn cycle_decay(d: usize, k: usize) -> f64 {
    (d as f64 - 2.0) * (k as f64 - 2.0) / 2.0
}

/// Convergence mode of the cycle series, or a domain error.
pub fn cycle_mode(d: usize, k: usize) -> Result<SeriesMode> {
    check_dim(d)?;
    if k < 3 {
        return Err(Error::domain(format!("cycle length k={k} must be at least 3")));
    }
    if cycle_decay(d, k) > 1.0 {
        Ok(SeriesMode::Absolute)
    } else if d == 4 && k % 2 == 1 {
        Ok(SeriesMode::Conditional)
    } else {
        Err(Error::domain(format!("the cycle series for k={k}, d={d} does not converge (the density is infinite or not defined)")))
    }
}

/// `t(C_k, d) = Σ_r dim(W_{2r}) λ_{2r}^k` with a certified bracket.
pub fn cycle_density(d: usize, k: usize, tol: f64) -> Result<SeriesResult> {
    cycle_density_capped(d, k, tol, MAX_TERMS)
}

/// As [`cycle_density`] with an explicit cap on the number of terms.
pub fn cycle_density_capped(d: usize, k: usize, tol: f64, max_terms: usize) -> Result<SeriesResult> {
    let mode = cycle_mode(d, k)?;
    let mut lambdas = EvenEigenvalues::new(d);
    let mut r = 0usize;
    let ki = k as i32;
    let term = move || {
        let lam = lambdas.next_value();
        let v = multiplicity_f64(d, 2 * r) * lam.powi(ki);
        r += 1;
        (v, v.abs())
    };
    let rule = if k.is_multiple_of(2) { TailRule::Positive } else { TailRule::Alternating };
    Ok(sum_series(term, cycle_decay(d, k), rule, tol, max_terms, mode))
}

/// `Σ_{r>=0} (2r+1)^{2-k}`, the four-dimensional cycle density for even
/// `k >= 4`, bracketed by exact integral comparison.
pub fn zeta_form(k: usize, tol: f64) -> Result<SeriesResult> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::domain(format!("zeta form needs even k >= 4, got {k}")));
    }
    let s = (k - 2) as i32;
    let f = |r: usize| ((2 * r + 1) as f64).powi(-s);
    let integral = |r: usize| ((2 * r + 1) as f64).powi(1 - s) / (2.0 * (s as f64 - 1.0));
    let mut sum = CompensatedSum::default();
    let mut n = 0;
    let mut target = 64;
    loop {
        while n < target {
            sum.add(f(n));
            n += 1;
        }
        let lower = sum.value() + integral(n);
        let upper = lower + f(n);
        let done = f(n) / 2.0 < tol;
        if done || n >= MAX_TERMS {
            return Ok(SeriesResult {
                value: 0.5 * (lower + upper),
                lower,
                upper,
                tail_bound: f(n) / 2.0,
                terms: n,
                mode: SeriesMode::Exact,
                converged: done,
            });
        }
        target *= 2;
    }
}

/// Zonal kernel of `A^k`: `u_{d,k}(x, y)` at `t = x·y`, for the absolutely
/// convergent range.
pub fn path_kernel(d: usize, k: usize, t: f64, tol: f64) -> Result<SeriesResult> {
    check_dim(d)?;
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("t={t} is not a cosine")));
    }
    if k < 3 || cycle_decay(d, k) <= 1.0 {
        return Err(Error::domain(format!("the kernel series for k={k}, d={d} is not absolutely convergent")));
    }
    let alpha = d as f64 / 2.0 - 1.0;
    let mut lambdas = EvenEigenvalues::new(d);
    let mut geg = NormalizedGegenbauer::new(alpha, t);
    let mut r = 0usize;
    let ki = k as i32;
    let term = move || {
        let lam = lambdas.next_value();
        let env = multiplicity_f64(d, 2 * r) * lam.abs().powi(ki);
        let p = geg.next_value();
        geg.next_value();
        let sign = if lam < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        r += 1;
        (sign * env * p, env)
    };
    Ok(sum_series(term, cycle_decay(d, k), TailRule::Dominated, tol, MAX_TERMS, SeriesMode::Absolute))
}

/// `(π⁴/2) Σ_r (4r+1) 4^{-6r} C(2r,r)^6`, the right side of the angle-integral
/// identity for six-cycles in three dimensions.
pub fn c6_identity_rhs(tol: f64) -> Result<SeriesResult> {
    let scale = std::f64::consts::PI.powi(4) / 2.0;
    Ok(cycle_density(3, 6, tol / scale)?.scaled(scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use std::f64::consts::PI;

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue(4, 2).unwrap(), BigRational::new((-1).into(), 3.into()));
        assert_eq!(eigenvalue(3, 2).unwrap(), BigRational::new((-1).into(), 2.into()));
        for d in 3..9 {
            assert!(eigenvalue(d, 0).unwrap().is_one());
            assert!(eigenvalue(d, 7).unwrap().is_zero());
        }
    }

    #[test]
    fn eigenvalues_match_closed_families() {
        // d=3: (-1/4)^r C(2r, r); d=4: (-1)^r / (2r+1).
        for r in 0..30usize {
            let three = BigRational::new((if r % 2 == 0 { 1 } else { -1 }) * binomial(2 * r, r), BigInt::from(4).pow(r as u32));
            assert_eq!(eigenvalue(3, 2 * r).unwrap(), three);
            let four = BigRational::new(BigInt::from(if r % 2 == 0 { 1 } else { -1 }), BigInt::from(2 * r + 1));
            assert_eq!(eigenvalue(4, 2 * r).unwrap(), four);
        }
    }

    #[test]
    fn multiplicity_examples() {
        for d in 3..9 {
            assert_eq!(multiplicity(d, 0).unwrap(), BigInt::one());
            assert_eq!(multiplicity(d, 1).unwrap(), BigInt::from(d));
        }
        for n in 0..=100usize {
            assert_eq!(multiplicity(4, n).unwrap(), BigInt::from((n + 1) * (n + 1)));
            if n % 2 == 0 {
                assert_eq!(multiplicity(3, n).unwrap(), BigInt::from(2 * n + 1));
            }
            for d in 3..9 {
                let m = multiplicity(d, n).unwrap();
                assert!(m > BigInt::zero());
                let f = multiplicity_f64(d, n);
                assert!((f - m.to_f64().unwrap()).abs() <= 1e-9 * f);
            }
        }
    }

    #[test]
    fn table_invariants() {
        for d in 3..8 {
            let t = spectral_table(d, 60).unwrap();
            let mut last: Option<BigRational> = None;
            for e in t.entries.iter().filter(|e| e.n % 2 == 0) {
                let r = e.n / 2;
                assert_eq!(e.lambda > BigRational::zero(), r % 2 == 0);
                let abs = if e.lambda < BigRational::zero() { -e.lambda.clone() } else { e.lambda.clone() };
                if let Some(prev) = &last {
                    assert!(&abs < prev);
                }
                last = Some(abs);
            }
            assert!(Arc::ptr_eq(&t, &spectral_table(d, 60).unwrap()));
        }
        let csv = SpectralTable::new(4, 2).unwrap().to_csv();
        assert_eq!(csv, "n,lambda,dim\n0,1,1\n1,0,4\n2,-1/3,9\n");
    }

    #[test]
    fn gegenbauer_examples() {
        assert!((gegenbauer_at(0.5, 2, 0.5) + 0.125).abs() < 1e-15);
        for alpha in [0.5, 1.0, 1.5, 2.0, 3.5] {
            assert!(gegenbauer_at(alpha, 3, 0.0).abs() < 1e-15);
            for n in 0..30usize {
                // C_n(1) = C(n + 2α - 1, n) = Π_{j<n} (2α + j) / n!.
                let exact: f64 = (0..n).map(|j| (2.0 * alpha + j as f64) / (j + 1) as f64).product();
                assert!((gegenbauer_at(alpha, n, 1.0) - exact).abs() < 1e-9 * exact);
            }
        }
        // Legendre against the explicit degree-4 polynomial.
        let t = 0.3f64;
        let p4 = (35.0 * t.powi(4) - 30.0 * t * t + 3.0) / 8.0;
        assert!((gegenbauer_at(0.5, 4, t) - p4).abs() < 1e-14);
    }

    #[test]
    fn eigenvalue_is_zonal_ratio() {
        for d in 3..7usize {
            let alpha = d as f64 / 2.0 - 1.0;
            let mut g = NormalizedGegenbauer::new(alpha, 0.0);
            for n in 0..=50 {
                let ratio = gegenbauer_at(alpha, n, 0.0) / gegenbauer_at(alpha, n, 1.0);
                let lam = eigenvalue(d, n).unwrap().to_f64().unwrap();
                assert!((ratio - lam).abs() < 1e-12, "d={d} n={n}");
                assert!((g.next_value() - lam).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn four_dimensional_cycles() {
        let c4 = cycle_density(4, 4, 1e-8).unwrap();
        assert!(c4.converged && c4.tail_bound <= 1e-8);
        assert!((c4.value - PI * PI / 8.0).abs() <= c4.tail_bound, "{c4:?}");
        let c6 = cycle_density(4, 6, 1e-8).unwrap();
        assert!((c6.value - PI.powi(4) / 96.0).abs() <= 1e-8);
        for k in [4, 6, 8, 10] {
            let a = cycle_density(4, k, 1e-9).unwrap();
            let z = zeta_form(k, 1e-9).unwrap();
            assert!((a.value - z.value).abs() <= a.tail_bound + z.tail_bound, "k={k}");
        }
    }

    #[test]
    fn conditional_triangle() {
        let c3 = cycle_density(4, 3, 1e-7).unwrap();
        assert_eq!(c3.mode, SeriesMode::Conditional);
        assert!(c3.contains(PI / 4.0));
    }

    #[test]
    fn odd_cycles_match_triangle_closed_forms() {
        for d in 5..9 {
            let series = cycle_density(d, 3, 1e-9).unwrap();
            let exact = crate::closed_form::t_complete(3, d).unwrap().value.to_f64();
            assert!((series.value - exact).abs() <= series.tail_bound + 1e-12, "d={d}");
        }
        // In d=6 the four-cycle is K_{2,2}.
        let s = cycle_density(6, 4, 1e-9).unwrap();
        let e = crate::closed_form::t_complete_bipartite(2, 2, 6).unwrap().value.to_f64();
        assert!((s.value - e).abs() <= s.tail_bound);
    }

    #[test]
    fn three_dimensional_six_cycle() {
        let c = cycle_density(3, 6, 1e-8).unwrap();
        assert!(c.lower >= 1.13 && c.upper <= 1.17, "{c:?}");
        let rhs = c6_identity_rhs(1e-6).unwrap();
        assert!((rhs.value / (PI.powi(4) / 2.0) - c.value).abs() < 1e-6);
        let first = cycle_density_capped(3, 6, 0.0, 64).unwrap();
        assert!(first.lower * PI.powi(4) / 2.0 > PI.powi(4) / 2.0);
    }

    #[test]
    fn domain_errors() {
        assert!(cycle_density(3, 4, 1e-6).is_err());
        assert!(cycle_density(3, 3, 1e-6).is_err());
        assert!(cycle_density(2, 6, 1e-6).is_err());
        assert!(zeta_form(5, 1e-6).is_err());
        assert!(path_kernel(3, 4, 0.0, 1e-6).is_err());
        assert_eq!(cycle_mode(3, 5).unwrap(), SeriesMode::Absolute);
    }

    #[test]
    fn brackets_are_nested() {
        for (d, k) in [(3, 5), (3, 6), (4, 4), (4, 5), (5, 4), (4, 3)] {
            let coarse = cycle_density(d, k, 1e-4).unwrap();
            let fine = cycle_density(d, k, 1e-8).unwrap();
            assert!(coarse.contains(fine.value), "d={d} k={k}: {coarse:?} vs {fine:?}");
        }
        let coarse = zeta_form(4, 1e-4).unwrap();
        assert!(coarse.contains(zeta_form(4, 1e-9).unwrap().value));
    }

    #[test]
    fn zeta_examples() {
        let z4 = zeta_form(4, 1e-10).unwrap();
        assert!(z4.contains(PI * PI / 8.0));
        assert!(zeta_form(6, 1e-12).unwrap().contains(PI.powi(4) / 96.0));
        assert!((zeta_form(40, 1e-12).unwrap().value - 1.0).abs() < 1e-15);
    }

    /// Double-exponential quadrature on (a, b).
    fn tanh_sinh(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let (h, m) = (1.0 / 64.0, 6 * 64);
        let (c, half) = ((a + b) / 2.0, (b - a) / 2.0);
        let mut s = 0.0;
        for j in -m..=m {
            let t = j as f64 * h;
            let u = PI / 2.0 * t.sinh();
            let x = u.tanh();
            let w = PI / 2.0 * t.cosh() / u.cosh().powi(2);
            let y = c + half * x;
            if y > a && y < b && w > 1e-300 {
                s += w * f(y);
            }
        }
        s * h * half
    }

    #[test]
    fn path_kernel_composition_oracle() {
        // u_{4,2}(x, z) = (π/4) / sin∠(x, z). For x = e1, y = e2 and z uniform on
        // S^3, (z1, z2) is uniform on the unit disk, so
        // u_{4,4}(x, y) = (π/4)² (1/π) ∫∫_disk dz1 dz2 / (√(1-z1²) √(1-z2²)).
        let inner = |z1: f64| {
            let h = (1.0 - z1 * z1).sqrt();
            tanh_sinh(&|z2: f64| 1.0 / (1.0 - z2 * z2).sqrt(), -h, h) / (1.0 - z1 * z1).sqrt()
        };
        let composed = PI / 16.0 * tanh_sinh(&inner, -1.0, 1.0);
        let series = path_kernel(4, 4, 0.0, 1e-9).unwrap();
        assert!((series.value - composed).abs() < 1e-4, "{series:?} vs {composed}");
        assert!((series.value - PI.powi(3) / 32.0).abs() < 1e-8);
    }

    #[test]
    fn path_kernel_diagonal_integrates_to_cycle() {
        // The kernel is zonal, so ∫ u(x, x) dx = u(1).
        let u = path_kernel(3, 6, 1.0, 1e-7).unwrap();
        let c = cycle_density(3, 6, 1e-7).unwrap();
        assert!((u.value - c.value).abs() < u.tail_bound + c.tail_bound);
    }

    #[test]
    fn path_kernel_has_unit_mean() {
        // Only the n=0 harmonic survives integration against the uniform measure.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let x = crate::sphere::UnitVector::basis(4, 0);
        let grid: Vec<f64> = (0..=400).map(|i| -1.0 + 2.0 * i as f64 / 400.0).collect();
        let vals: Vec<f64> = grid.iter().map(|&t| path_kernel(4, 5, t, 1e-5).unwrap().value).collect();
        let n = 100_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let y = crate::sphere::sample_uniform_sphere(4, &mut rng);
            let t = crate::sphere::dot(&x, &y);
            let pos = (t + 1.0) * 200.0;
            let i = (pos.floor() as usize).min(399);
            let f = pos - i as f64;
            let v = vals[i] * (1.0 - f) + vals[i + 1] * f;
            s += v;
            s2 += v * v;
        }
        let m = s / n as f64;
        let se = ((s2 / n as f64 - m * m) / n as f64).sqrt();
        assert!((m - 1.0).abs() < 4.0 * se + 1e-3, "{m} ± {se}");
    }
}
