//! Generalized quantum signal processing over the walk operator.
//!
//! A phase sequence describes M(z) = R_d·A(z)·R_{d−1}···A(z)·R_0 with
//! A(z) = diag(z, 1) and R(θ, φ, λ) = [[e^{i(λ+φ)}cosθ, e^{iφ}sinθ],
//! [e^{iλ}sinθ, −cosθ]], where λ is nonzero only in R_0. The top-left entry
//! of M is a degree-d polynomial P(z). On the circuit, z is the walk
//! eigenvalue and A becomes W controlled on the signal qubit being |0⟩.
//!
//! A Chebyshev series Σ c_k T_k(x) of degree n becomes the circle
//! polynomial P(z) = z^n Σ c_k (z^k + z^{−k})/2 of degree 2n; the z^n shift
//! is undone by n trailing applications of W†.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::linalg::Schur;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::approx::{self, Basis, ChebSeries, DEFAULT_MARGIN};
use crate::circuit::{control_gates, Gate, Qubit};
use crate::encoding::{AncillaTemplate, BlockEncoding, Program};
use crate::error::{invalid, Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::qubitization::{emit_walk_power, walk};

/// Circle points used to validate completions and reconstructions.
pub const CIRCLE_POINTS: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GQSPPhases {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub lambda: f64,
    /// trailing W† applications; the realized function is z^{−shift}·P(z)
    #[serde(default)]
    pub shift: usize,
}

impl GQSPPhases {
    pub fn degree(&self) -> usize {
        self.thetas.len() - 1
    }

    /// Top-left entry of the signal-processing product at signal value z.
    pub fn reconstruct(&self, z: C64) -> C64 {
        let mut v = rotation(self.thetas[0], self.phis[0], self.lambda) * [ONE, ZERO];
        for j in 1..self.thetas.len() {
            v[0] *= z;
            v = rotation(self.thetas[j], self.phis[j], 0.0) * v;
        }
        v[0]
    }

    /// The realized scalar function at x = cos θ, evaluated on the circle.
    pub fn eval_chebyshev(&self, x: f64) -> C64 {
        let z = C64::from_polar(1.0, x.clamp(-1.0, 1.0).acos());
        self.reconstruct(z) * z.powi(-(self.shift as i32))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("phases always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: GQSPPhases = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if p.thetas.is_empty() || p.thetas.len() != p.phis.len() {
            return Err(Error::Format("thetas and phis must be nonempty and equally long".into()));
        }
        Ok(p)
    }
}

#[derive(Clone, Copy)]
struct Mat2([[C64; 2]; 2]);

impl std::ops::Mul<[C64; 2]> for Mat2 {
    type Output = [C64; 2];
    fn mul(self, v: [C64; 2]) -> [C64; 2] {
        let m = self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

fn rotation(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2([
        [C64::from_polar(c, lambda + phi), C64::from_polar(s, phi)],
        [C64::from_polar(s, lambda), C64::new(-c, 0.0)],
    ])
}

/// Time-ordered gates realizing R(θ, φ, λ) on `q`.
pub fn rotation_gates(q: Qubit, theta: f64, phi: f64, lambda: f64, out: &mut Vec<Gate>) {
    if lambda != 0.0 {
        out.push(Gate::phase(q, -lambda));
        out.push(Gate::gphase(q, lambda));
    }
    out.push(Gate::z(q));
    out.push(Gate::ry(q, 2.0 * theta));
    if phi != 0.0 {
        out.push(Gate::phase(q, -phi));
        out.push(Gate::gphase(q, phi));
    }
}

/// Evaluates Σ p_k z^k.
pub fn poly_eval(p: &[C64], z: C64) -> C64 {
    p.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

pub fn circle_grid(n: usize) -> impl Iterator<Item = C64> {
    (0..n).map(move |k| C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
}

/// Circle polynomial of a Chebyshev series (degree doubles).
pub fn circle_from_chebyshev(c: &[C64]) -> Vec<C64> {
    let d = c.len() - 1;
    let mut p = vec![ZERO; 2 * d + 1];
    p[d] = c[0];
    for (k, &ck) in c.iter().enumerate().skip(1) {
        p[d + k] += ck / 2.0;
        p[d - k] += ck / 2.0;
    }
    p
}

fn polynomial_roots(a: &[C64]) -> Result<Vec<C64>> {
    let deg = a.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = a[deg];
    let mut comp = CMatrix::zeros(deg, deg);
    for j in 0..deg {
        comp[(0, j)] = -a[deg - 1 - j] / lead;
    }
    for i in 1..deg {
        comp[(i, i - 1)] = ONE;
    }
    balance(&mut comp);
    // spectra symmetric under z ↦ −z stall the unshifted QR sweep; an
    // off-axis offset breaks the symmetry and is removed afterwards
    let offset = C64::new(0.3141, 0.2718);
    for i in 0..deg {
        comp[(i, i)] += offset;
    }
    let schur = Schur::try_new(comp, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Completion("companion eigenvalues did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..deg).map(|i| t[(i, i)] - offset).collect())
}

/// Parlett–Reinsch diagonal similarity equalizing row and column norms.
fn balance(m: &mut CMatrix) {
    let n = m.nrows();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                c += m[(j, i)].l1_norm();
                r += m[(i, j)].l1_norm();
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let total = c + r;
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (c + r) < 0.95 * total {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

fn poly_derivative_eval(p: &[C64], z: C64) -> (C64, C64) {
    let mut v = ZERO;
    let mut dv = ZERO;
    for &c in p.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

/// Highest circle degree attempted by root finding.
pub const ROOT_DEGREE_LIMIT: usize = 64;

/// Tolerance on | |P|² + |Q|² − 1 | accepted from a completion.
pub const COMPLETION_TOL: f64 = 1e-8;

/// Q with |P(z)|² + |Q(z)|² = 1 on the unit circle. Requires max|P| < 1
/// on the circle. Tries the roots inside the disk of z^n(1 − P(z)·P*(1/z))
/// first and falls back to the outer function of √(1 − |P|²), which stays
/// accurate at degrees where products of many roots do not.
pub fn complementary(p: &[C64]) -> Result<Vec<C64>> {
    if p.is_empty() {
        return Err(invalid("empty polynomial"));
    }
    let n = p.len() - 1;
    let peak = circle_grid(CIRCLE_POINTS).map(|z| poly_eval(p, z).norm()).fold(0.0, f64::max);
    if peak >= 1.0 - 1e-12 {
        return Err(Error::Completion(format!(
            "polynomial reaches {peak} on the unit circle; it must stay below 1"
        )));
    }
    if n == 0 {
        return Ok(vec![C64::new((1.0 - p[0].norm_sqr()).sqrt(), 0.0)]);
    }
    if n <= ROOT_DEGREE_LIMIT {
        if let Ok(q) = complement_by_roots(p) {
            if completion_error(p, &q) <= COMPLETION_TOL {
                return Ok(q);
            }
        }
    }
    let q = outer_complement(p);
    let err = completion_error(p, &q);
    if err > COMPLETION_TOL {
        return Err(Error::Completion(format!("completion residual {err:e}")));
    }
    Ok(q)
}

fn complement_by_roots(p: &[C64]) -> Result<Vec<C64>> {
    let n = p.len() - 1;
    let mut l = vec![ZERO; 2 * n + 1];
    for (i, &pi) in p.iter().enumerate() {
        for (j, &pj) in p.iter().enumerate() {
            // P(z)·P*(1/z)·z^n places p_i·conj(p_j) at z^{i − j + n}
            l[i + n - j] -= pi * pj.conj();
        }
    }
    l[n] += ONE;
    let tol = 1e-14 * l.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let lo = l.iter().take_while(|c| c.norm() <= tol).count();
    let hi = l.iter().rev().take_while(|c| c.norm() <= tol).count();
    let core = &l[lo..l.len() - hi];
    let mut roots = polynomial_roots(core)?;
    for r in roots.iter_mut() {
        for _ in 0..50 {
            let (v, dv) = poly_derivative_eval(core, *r);
            let step = v / dv;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *r -= step;
            if step.norm() <= 1e-15 * r.norm().max(1.0) {
                break;
            }
        }
    }
    let mut inside: Vec<C64> = roots.into_iter().filter(|r| r.norm() < 1.0).collect();
    inside.extend(std::iter::repeat(ZERO).take(lo));
    if inside.len() != n {
        return Err(Error::Completion(format!(
            "found {} roots inside the unit disk, expected {n}",
            inside.len()
        )));
    }
    let mut q = vec![ONE];
    for r in inside {
        let mut next = vec![ZERO; q.len() + 1];
        for (k, &c) in q.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        q = next;
    }
    let ratio: f64 = circle_grid(CIRCLE_POINTS)
        .map(|z| (1.0 - poly_eval(p, z).norm_sqr()) / poly_eval(&q, z).norm_sqr())
        .sum::<f64>()
        / CIRCLE_POINTS as f64;
    let k = ratio.sqrt();
    q.iter_mut().for_each(|c| *c *= k);
    Ok(q)
}

/// Coefficients 0..=n of exp(h), where h is the analytic projection of
/// ½·log(1 − |P|²) sampled on a fine circle grid.
fn outer_complement(p: &[C64]) -> Vec<C64> {
    let n = p.len() - 1;
    let size = (64 * (n + 1)).max(1 << 14).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let scale = 1.0 / size as f64;

    // samples P(e^{2πij/size}) = Σ p_k e^{2πijk/size}
    let mut buf = vec![ZERO; size];
    buf[..p.len()].copy_from_slice(p);
    inverse.process(&mut buf);
    for v in buf.iter_mut() {
        *v = C64::new(0.5 * (1.0 - v.norm_sqr()).ln(), 0.0);
    }
    forward.process(&mut buf);
    // keep nonnegative frequencies, doubling the positive ones
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= scale
            * match k {
                0 => 1.0,
                k if k < size / 2 => 2.0,
                _ => 0.0,
            };
    }
    inverse.process(&mut buf);
    for v in buf.iter_mut() {
        *v = v.exp();
    }
    forward.process(&mut buf);
    buf.truncate(n + 1);
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

/// max | |P|² + |Q|² − 1 | on the circle grid.
pub fn completion_error(p: &[C64], q: &[C64]) -> f64 {
    circle_grid(CIRCLE_POINTS)
        .map(|z| (poly_eval(p, z).norm_sqr() + poly_eval(q, z).norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Phases realizing the circle polynomial `p` (max |p| < 1 on the circle),
/// by stripping one rotation layer at a time from the left.
pub fn find_phases_circle(p: &[C64]) -> Result<GQSPPhases> {
    let q = complementary(p)?;
    let d = p.len() - 1;
    let mut thetas = vec![0.0; d + 1];
    let mut phis = vec![0.0; d + 1];
    let (mut p, mut q) = (p.to_vec(), q);
    for step in (1..=d).rev() {
        let (pd, qd, p0, q0) = (p[step], q[step], p[0], q[0]);
        let (theta, phi) = if pd.norm_sqr() + qd.norm_sqr() >= p0.norm_sqr() + q0.norm_sqr() {
            (qd.norm().atan2(pd.norm()), pd.arg() - qd.arg())
        } else {
            (p0.norm().atan2(q0.norm()), p0.arg() - (-q0).arg())
        };
        let (s, c) = theta.sin_cos();
        let e = C64::from_polar(1.0, -phi);
        let first: Vec<C64> = p.iter().zip(&q).map(|(&a, &b)| e * c * a + b * s).collect();
        let second: Vec<C64> = p.iter().zip(&q).map(|(&a, &b)| e * s * a - b * c).collect();
        p = first[1..].to_vec();
        q = second[..step].to_vec();
        thetas[step] = theta;
        phis[step] = phi;
    }
    let lambda = q[0].arg();
    thetas[0] = q[0].norm().atan2(p[0].norm());
    phis[0] = p[0].arg() - lambda;
    Ok(GQSPPhases {
        thetas,
        phis,
        lambda,
        shift: 0,
    })
}

/// Phases realizing a Chebyshev series bounded below 1 on [−1, 1].
pub fn find_phases(series: &ChebSeries) -> Result<GQSPPhases> {
    let c = series.to_chebyshev();
    let mut phases = find_phases_circle(&circle_from_chebyshev(c.coeffs()))?;
    phases.shift = c.degree();
    Ok(phases)
}

/// max |phases(z) − target(z)| over the circle grid, for a circle target.
pub fn reconstruction_error(phases: &GQSPPhases, target: &[C64]) -> f64 {
    circle_grid(CIRCLE_POINTS)
        .map(|z| (phases.reconstruct(z) - poly_eval(target, z)).norm())
        .fold(0.0, f64::max)
}

/// Block f(A/α) where f is the function realized by `phases`, reported
/// with α = 1.
pub fn gqet(enc: &BlockEncoding, phases: &GQSPPhases) -> Result<BlockEncoding> {
    if phases.thetas.is_empty() || phases.thetas.len() != phases.phis.len() {
        return Err(invalid("malformed phase sequence"));
    }
    let w = walk(enc)?;
    let m = enc.num_ancillas();
    let mut templates = enc.ancilla_templates().to_vec();
    templates.push(AncillaTemplate::new("signal", 1));
    let ph = phases.clone();
    let program: Program = Arc::new(move |sys, anc, out| {
        let (walk_anc, signal) = (&anc[..m], anc[m]);
        let mut wg = Vec::new();
        w.emit(sys, walk_anc, &mut wg);
        let mut cw = Vec::with_capacity(wg.len());
        control_gates(&wg, &[signal], &[false], &mut cw);
        rotation_gates(signal, ph.thetas[0], ph.phis[0], ph.lambda, out);
        for j in 1..ph.thetas.len() {
            out.extend(cw.iter().cloned());
            rotation_gates(signal, ph.thetas[j], ph.phis[j], 0.0, out);
        }
        emit_walk_power(&w, -(ph.shift as i64), sys, walk_anc, out);
    });
    BlockEncoding::custom(1.0, templates, enc.operand_shape().to_vec(), false, 0.0, program)
}

/// p(A) for a polynomial in the operator itself: the series is composed
/// with x ↦ αx, rescaled below 1 on [−1, 1], and the rescale factor is
/// reported as α so that α·block ≈ p(A).
pub fn poly(enc: &BlockEncoding, series: &ChebSeries) -> Result<BlockEncoding> {
    poly_normalized(enc, &series.compose_scale(enc.alpha()))
}

/// p(A/α): the transform on the normalized spectrum.
pub fn poly_normalized(enc: &BlockEncoding, series: &ChebSeries) -> Result<BlockEncoding> {
    let (scaled, scale) = approx::sup_norm_rescale(&series.to_chebyshev(), DEFAULT_MARGIN)?;
    let e = gqet(enc, &find_phases(&scaled)?)?;
    Ok(e.with_params(scale, 0.0, false))
}

/// Approximate A⁻¹ for A/α with spectrum in [−1, −1/κ] ∪ [1/κ, 1];
/// α·block ≈ A⁻¹ within eps/α.
pub fn inv(enc: &BlockEncoding, eps: f64, kappa: f64) -> Result<BlockEncoding> {
    let plan = approx::inverse_series(eps, kappa)?;
    let e = gqet(enc, &find_phases(&plan.series)?)?;
    let a = enc.alpha();
    Ok(e.with_params(1.0 / (plan.rescale * a), eps / a, false))
}

/// Approximate e^{−itA} with truncation order n; ε is the Bessel tail bound.
pub fn sim(enc: &BlockEncoding, t: f64, n: usize) -> Result<BlockEncoding> {
    let (series, tail) = approx::jacobi_anger(t * enc.alpha(), n);
    let (scaled, scale) = approx::sup_norm_rescale(&series, DEFAULT_MARGIN)?;
    let e = gqet(enc, &find_phases(&scaled)?)?;
    Ok(e.with_params(scale, tail, false))
}

/// Monomial-basis convenience wrapper for [`poly`].
pub fn poly_monomial(enc: &BlockEncoding, coeffs: &[f64]) -> Result<BlockEncoding> {
    poly(enc, &ChebSeries::real(Basis::Monomial, coeffs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::from_array;
    use crate::linalg::{max_abs_diff, real_matrix};
    use crate::sim::extract_block;

    #[test]
    fn zero_completes_to_one() {
        let q = complementary(&[ZERO]).unwrap();
        assert!((q[0] - ONE).norm() < 1e-15);
    }

    #[test]
    fn cosine_completion() {
        let p = vec![C64::new(0.4995, 0.0), ZERO, C64::new(0.4995, 0.0)];
        let q = complementary(&p).unwrap();
        assert!(completion_error(&p, &q) < 1e-12);
        // at θ = 0 the circle polynomial is z·0.999
        let want = (1.0 - 0.999f64 * 0.999).sqrt();
        assert!((poly_eval(&q, ONE).norm() - want).abs() < 1e-12);
    }

    #[test]
    fn bounded_check() {
        assert!(complementary(&[ONE]).is_err());
    }

    #[test]
    fn constant_phases() {
        let s = ChebSeries::real(Basis::Chebyshev, &[0.3]).unwrap();
        let ph = find_phases(&s).unwrap();
        assert_eq!(ph.degree(), 0);
        for x in [-1.0, 0.0, 0.5] {
            assert!((ph.eval_chebyshev(x) - C64::new(0.3, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn scaled_t1_phases() {
        let s = ChebSeries::real(Basis::Chebyshev, &[0.0, 0.999]).unwrap();
        let ph = find_phases(&s).unwrap();
        for (x, want) in [(-1.0, -0.999), (0.0, 0.0), (1.0, 0.999)] {
            assert!((ph.eval_chebyshev(x) - C64::new(want, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn gqet_t2_on_z() {
        let z = real_matrix(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let e = from_array(&z).unwrap();
        let s = ChebSeries::real(Basis::Chebyshev, &[0.0, 0.0, 0.999]).unwrap();
        let g = gqet(&e, &find_phases(&s).unwrap()).unwrap();
        let want = CMatrix::identity(2, 2) * C64::new(0.999, 0.0);
        assert!(max_abs_diff(&extract_block(&g).unwrap(), &want) < 1e-8);
    }

    #[test]
    fn sim_on_z_quarter_turn() {
        let z = real_matrix(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let e = from_array(&z).unwrap();
        let s = sim(&e, PI / 2.0, 12).unwrap();
        let got = extract_block(&s).unwrap() * C64::new(s.alpha(), 0.0);
        let mut want = CMatrix::zeros(2, 2);
        want[(0, 0)] = C64::new(0.0, -1.0);
        want[(1, 1)] = C64::new(0.0, 1.0);
        assert!(max_abs_diff(&got, &want) < 1e-6);
    }
}
