//! Classical polynomial tools: basis conversion, sup-norm rescaling, the
//! Chebyshev series of 1/x, and the Jacobi–Anger expansion of e^{−itx}.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{C64, ONE, ZERO};

/// Points in the sup-norm scan over [−1, 1].
pub const SCAN_POINTS: usize = 4096;
/// Points in the check grid over the inversion domain.
pub const DOMAIN_POINTS: usize = 2001;
/// Default distance kept from 1 when rescaling for signal processing.
pub const DEFAULT_MARGIN: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Monomial,
    Chebyshev,
}

/// A polynomial on [−1, 1]; `coeffs[k]` multiplies x^k or T_k(x).
#[derive(Clone, Debug, PartialEq)]
pub struct ChebSeries {
    basis: Basis,
    coeffs: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    basis: Basis,
    coeffs: Vec<[f64; 2]>,
}

impl ChebSeries {
    /// Trailing coefficients below 1e-15 in magnitude are dropped (one
    /// coefficient is always kept).
    pub fn new(basis: Basis, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(invalid("non-finite coefficient"));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() < 1e-15 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Ok(ChebSeries { basis, coeffs })
    }

    pub fn real(basis: Basis, coeffs: &[f64]) -> Result<Self> {
        Self::new(basis, coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    pub fn real_coeffs(&self) -> Result<Vec<f64>> {
        if !self.is_real() {
            return Err(invalid("series has complex coefficients"));
        }
        Ok(self.coeffs.iter().map(|c| c.re).collect())
    }

    pub fn eval(&self, x: f64) -> C64 {
        match self.basis {
            Basis::Monomial => self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * x + c),
            Basis::Chebyshev => clenshaw(&self.coeffs, x),
        }
    }

    pub fn scaled(&self, s: C64) -> ChebSeries {
        ChebSeries {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Exact conversion to the Chebyshev basis, Horner-style with
    /// x·T_k = (T_{k+1} + T_{|k−1|})/2.
    pub fn to_chebyshev(&self) -> ChebSeries {
        if self.basis == Basis::Chebyshev {
            return self.clone();
        }
        let mut acc: Vec<C64> = vec![ZERO];
        for &c in self.coeffs.iter().rev() {
            let mut next = vec![ZERO; acc.len() + 1];
            for (k, &a) in acc.iter().enumerate() {
                if k == 0 {
                    next[1] += a;
                } else {
                    next[k + 1] += a / 2.0;
                    next[k - 1] += a / 2.0;
                }
            }
            next[0] += c;
            acc = next;
        }
        acc.truncate(self.coeffs.len());
        ChebSeries {
            basis: Basis::Chebyshev,
            coeffs: acc,
        }
    }

    /// Conversion to monomials by expanding each T_k.
    pub fn to_monomial(&self) -> ChebSeries {
        if self.basis == Basis::Monomial {
            return self.clone();
        }
        let n = self.coeffs.len();
        let mut out = vec![ZERO; n];
        // monomial coefficients of T_{k−1} and T_k
        let mut prev = vec![0.0; n];
        let mut cur = vec![0.0; n];
        cur[0] = 1.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            for (o, &v) in out.iter_mut().zip(&cur) {
                *o += c * v;
            }
            let mut next = vec![0.0; n];
            if k == 0 {
                if n > 1 {
                    next[1] = 1.0;
                }
            } else {
                for j in 0..n - 1 {
                    next[j + 1] += 2.0 * cur[j];
                }
                for (x, p) in next.iter_mut().zip(&prev) {
                    *x -= p;
                }
            }
            prev = std::mem::replace(&mut cur, next);
        }
        ChebSeries {
            basis: Basis::Monomial,
            coeffs: out,
        }
    }

    /// Substitutes x ↦ s·x.
    pub fn compose_scale(&self, s: f64) -> ChebSeries {
        let m = self.to_monomial();
        let mut p = 1.0;
        let coeffs = m
            .coeffs
            .iter()
            .map(|c| {
                let v = c * p;
                p *= s;
                v
            })
            .collect();
        let out = ChebSeries {
            basis: Basis::Monomial,
            coeffs,
        };
        match self.basis {
            Basis::Monomial => out,
            Basis::Chebyshev => out.to_chebyshev(),
        }
    }

    /// max |p(x)| over the Chebyshev–Lobatto scan grid.
    pub fn sup_norm(&self) -> f64 {
        scan_grid().map(|x| self.eval(x).norm()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SeriesJson {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        })
        .expect("series always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SeriesJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::new(raw.basis, raw.coeffs.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }
}

/// Σ c_k T_k(x) by the Clenshaw recurrence.
pub fn clenshaw(c: &[C64], x: f64) -> C64 {
    let (mut b1, mut b2) = (ZERO, ZERO);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * x) - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(ZERO) + b1 * x - b2
}

/// cos(πi/(N−1)) for i in 0..N.
pub fn scan_grid() -> impl Iterator<Item = f64> {
    let n = SCAN_POINTS;
    (0..n).map(move |i| (std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
}

/// Divides `series` by `scale` so its grid maximum is 1 − margin; returns
/// the scaled series and `scale`.
pub fn sup_norm_rescale(series: &ChebSeries, margin: f64) -> Result<(ChebSeries, f64)> {
    if !(margin > 0.0 && margin <= 0.1) {
        return Err(invalid(format!("margin {margin} outside (0, 0.1]")));
    }
    let m = series.sup_norm();
    if m == 0.0 {
        return Err(invalid("zero polynomial"));
    }
    let scale = m / (1.0 - margin);
    Ok((series.scaled(ONE / scale), scale))
}

/// Odd Chebyshev series for 1/x on [−1, −1/κ] ∪ [1/κ, 1], and the factor
/// that bounds it for signal processing.
#[derive(Clone, Debug, PartialEq)]
pub struct InversePlan {
    pub eps: f64,
    pub kappa: f64,
    /// binomial exponent of the smoothed inverse (1 − (1 − x²)^b)/x
    pub b: usize,
    /// truncation index; the series has degree 2·j0 + 1
    pub j0: usize,
    /// series approximating 1/x within eps on the domain
    pub raw: ChebSeries,
    /// raw·rescale, bounded by 1 − margin on [−1, 1]
    pub series: ChebSeries,
    pub rescale: f64,
}

impl InversePlan {
    /// max |series(x) − rescale/x| over the domain grid.
    pub fn domain_error(&self) -> f64 {
        domain_grid(self.kappa)
            .map(|x| (self.series.eval(x) - self.rescale / x).norm())
            .fold(0.0, f64::max)
    }
}

/// 2001 points: 1001 evenly spaced on [1/κ, 1], 1000 on [−1, −1/κ].
pub fn domain_grid(kappa: f64) -> impl Iterator<Item = f64> {
    let lo = 1.0 / kappa;
    let pos = DOMAIN_POINTS / 2 + 1;
    let neg = DOMAIN_POINTS - pos;
    let line = move |i: usize, n: usize| lo + (1.0 - lo) * i as f64 / (n - 1) as f64;
    (0..pos).map(move |i| line(i, pos)).chain((0..neg).map(move |i| -line(i, neg)))
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

/// Binomial exponent and truncation index for target error `eps`.
pub fn inverse_degrees(eps: f64, kappa: f64) -> (usize, usize) {
    let b = (kappa * kappa * (kappa / eps).ln()).ceil().max(1.0) as usize;
    let j0 = ((b as f64) * (4.0 * b as f64 / eps).ln()).sqrt().ceil() as usize;
    (b, j0.min(b.saturating_sub(1)))
}

/// Chebyshev coefficients c_{2j+1} = 4(−1)^j Σ_{i>j} C(2b, b+i)/4^b,
/// j = 0..=j0, of the truncated smoothed inverse.
pub fn inverse_coefficients(b: usize, j0: usize) -> Vec<f64> {
    let lf = ln_factorials(2 * b);
    let ln4b = 2.0 * b as f64 * std::f64::consts::LN_2;
    // tail[i] = Σ_{i' ≥ i} C(2b, b+i')/4^b
    let mut tail = vec![0.0; b + 2];
    for i in (0..=b).rev() {
        let term = (lf[2 * b] - lf[b + i] - lf[b - i] - ln4b).exp();
        tail[i] = tail[i + 1] + term;
    }
    let mut c = vec![0.0; 2 * j0 + 2];
    for j in 0..=j0 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        c[2 * j + 1] = 4.0 * sign * tail[j + 1];
    }
    c
}

pub fn inverse_series(eps: f64, kappa: f64) -> Result<InversePlan> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(invalid(format!("eps {eps} outside (0, 0.5)")));
    }
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(invalid(format!("kappa {kappa} must be at least 1")));
    }
    let (b, j0) = inverse_degrees(eps, kappa);
    let raw = ChebSeries::real(Basis::Chebyshev, &inverse_coefficients(b, j0))?;
    let (series, scale) = sup_norm_rescale(&raw, DEFAULT_MARGIN)?;
    Ok(InversePlan {
        eps,
        kappa,
        b,
        j0,
        raw,
        series,
        rescale: 1.0 / scale,
    })
}

/// J_0(t)..=J_n(t) by Miller's downward recurrence, normalized with
/// J_0 + 2 Σ J_{2k} = 1.
pub fn bessel_j(t: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if t == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let x = t.abs();
    let start = {
        let m = n.max(x.ceil() as usize);
        let s = m + 20 + (40.0 * m as f64).sqrt() as usize;
        s + (s & 1)
    };
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().step_by(2).skip(1).sum::<f64>();
    for k in 0..=n {
        let v = vals[k] / norm;
        out[k] = if t < 0.0 && k % 2 == 1 { -v } else { v };
    }
    out
}

/// Bound on 2 Σ_{k>n} |J_k(t)| from |J_k(t)| ≤ (|t|/2)^k / k!.
pub fn jacobi_anger_tail(t: f64, n: usize) -> f64 {
    let h = t.abs() / 2.0;
    if h == 0.0 {
        return 0.0;
    }
    let mut k = n + 1;
    let mut term = (k as f64 * h.ln() - ln_factorials(k)[k]).exp();
    let mut sum = 0.0;
    while term > 0.0 {
        sum += term;
        k += 1;
        term *= h / k as f64;
        if term < sum * 1e-17 {
            break;
        }
    }
    2.0 * sum
}

/// Chebyshev series of e^{−itx} truncated at order n, with its tail bound.
pub fn jacobi_anger(t: f64, n: usize) -> (ChebSeries, f64) {
    let j = bessel_j(t, n);
    let minus_i = [ONE, C64::new(0.0, -1.0), -ONE, C64::new(0.0, 1.0)];
    let coeffs = (0..=n)
        .map(|k| {
            if k == 0 {
                C64::new(j[0], 0.0)
            } else {
                minus_i[k % 4] * (2.0 * j[k])
            }
        })
        .collect();
    let series = ChebSeries::new(Basis::Chebyshev, coeffs).expect("Bessel values are finite");
    (series, jacobi_anger_tail(t, n))
}
