//! Signature extraction from intensity curves.
//!
//! Input is a uniformly sampled probability series P_θ(t). The module
//! locates Fourier peaks (the Berry-split doublet at 2ω ± λ), measures
//! the exponential damping rate from the oscillation envelope, and fits
//! the full damped-oscillation model by nonlinear least squares.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::solvers::effective_frequency;

/// Uniformly sampled intensity curve, values in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct IntensitySeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

/// Relative tolerance on grid uniformity.
const GRID_TOL: f64 = 1e-9;

impl IntensitySeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "length mismatch: {} times vs {} values",
                times.len(),
                values.len()
            )));
        }
        if times.is_empty() {
            return Err(Error::InvalidSeries("empty series".into()));
        }
        if times.iter().any(|t| !t.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries("non-finite entry".into()));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidSeries(format!("value {v} outside [0, 1]")));
        }
        if times.len() > 1 {
            let dt = times[1] - times[0];
            if dt.is_nan() || dt <= 0.0 {
                return Err(Error::InvalidSeries(
                    "times must be strictly increasing".into(),
                ));
            }
            for w in times.windows(2) {
                let step = w[1] - w[0];
                let dev = (step - dt).abs() / dt.max(f64::MIN_POSITIVE);
                if dev > GRID_TOL {
                    return Err(Error::NonUniformGrid(dev));
                }
            }
        }
        Ok(Self { times, values })
    }

    /// Sample a function on n uniform points over [0, t_final].
    pub fn sample(t_final: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewSamples { got: n, need: 2 });
        }
        let step = t_final / (n - 1) as f64;
        let times: Vec<f64> = (0..n)
            .map(|k| if k + 1 == n { t_final } else { k as f64 * step })
            .collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Grid step (0 for a single-point series).
    pub fn dt(&self) -> f64 {
        if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }

    /// Add seeded Gaussian noise, clamping back into [0, 1].
    pub fn with_noise(&self, sigma: f64, seed: u64) -> IntensitySeries {
        let mut rng = SplitMix64::new(seed);
        let values = self
            .values
            .iter()
            .map(|v| (v + sigma * rng.next_normal()).clamp(0.0, 1.0))
            .collect();
        IntensitySeries {
            times: self.times.clone(),
            values,
        }
    }

    /// Parse the `t,p_theta` CSV emitted by the probability writer.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        match lines.next() {
            Some(header) if header.eq_ignore_ascii_case("t,p_theta") => {}
            Some(other) => {
                return Err(Error::InvalidSeries(format!(
                    "expected header 't,p_theta', got '{}'",
                    other.chars().take(40).collect::<String>()
                )))
            }
            None => return Err(Error::InvalidSeries("empty document".into())),
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (k, line) in lines.enumerate() {
            let mut fields = line.split(',');
            let (t, v) = match (fields.next(), fields.next(), fields.next()) {
                (Some(t), Some(v), None) => (t, v),
                _ => {
                    return Err(Error::InvalidSeries(format!(
                        "row {}: expected two comma-separated fields",
                        k + 2
                    )))
                }
            };
            let t: f64 = t
                .trim()
                .parse()
                .map_err(|e| Error::InvalidSeries(format!("row {}: bad time: {e}", k + 2)))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|e| Error::InvalidSeries(format!("row {}: bad value: {e}", k + 2)))?;
            times.push(t);
            values.push(v);
        }
        Self::new(times, values)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,p_theta\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            out.push_str(&format!("{t:.16e},{v:.16e}\n"));
        }
        out
    }
}

/// Window applied before the transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    Rectangular,
    Hann,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Peak {
    /// Angular frequency after parabolic refinement.
    pub frequency: f64,
    pub magnitude: f64,
}

/// Magnitude spectrum with detected peaks, strongest first.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// Angular frequency grid, 0..π/dt.
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub peaks: Vec<Peak>,
}

/// Minimum sample count for a meaningful transform.
const SPECTRUM_MIN_SAMPLES: usize = 64;
/// Peaks must rise above this multiple of the median magnitude.
const PEAK_MEDIAN_FACTOR: f64 = 5.0;

/// Magnitude DFT of the mean-subtracted, windowed series, with local
/// maxima above 5× the median magnitude refined by 3-point parabolic
/// interpolation (on log magnitude).
pub fn spectrum(series: &IntensitySeries, window: Window) -> Result<SpectrumReport> {
    let n = series.len();
    if n < SPECTRUM_MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: n,
            need: SPECTRUM_MIN_SAMPLES,
        });
    }
    let dt = series.dt();
    let mean = series.values.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = series
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let w = match window {
                Window::Rectangular => 1.0,
                Window::Hann => {
                    let phase = std::f64::consts::TAU * k as f64 / (n - 1) as f64;
                    0.5 * (1.0 - phase.cos())
                }
            };
            (v - mean) * w
        })
        .collect();

    let half = n / 2;
    let mut frequencies = Vec::with_capacity(half + 1);
    let mut magnitudes = Vec::with_capacity(half + 1);
    let bin = std::f64::consts::TAU / (n as f64 * dt);
    for m in 0..=half {
        let angle = -std::f64::consts::TAU * m as f64 / n as f64;
        let rot = num_complex::Complex64::from_polar(1.0, angle);
        let mut phasor = num_complex::Complex64::new(1.0, 0.0);
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for &xk in &x {
            acc += phasor * xk;
            phasor *= rot;
        }
        frequencies.push(m as f64 * bin);
        magnitudes.push(acc.norm());
    }

    let mut sorted = magnitudes.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = sorted[sorted.len() / 2];
    let threshold = PEAK_MEDIAN_FACTOR * median.max(f64::MIN_POSITIVE);

    let mut peaks = Vec::new();
    for m in 1..magnitudes.len().saturating_sub(1) {
        let (l, c, r) = (magnitudes[m - 1], magnitudes[m], magnitudes[m + 1]);
        if c > threshold && c > l && c >= r {
            let (freq, mag) = refine_peak(frequencies[m], bin, l, c, r);
            peaks.push(Peak {
                frequency: freq,
                magnitude: mag,
            });
        }
    }
    peaks.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    Ok(SpectrumReport {
        frequencies,
        magnitudes,
        peaks,
    })
}

/// 3-point parabolic refinement on log magnitude.
fn refine_peak(freq: f64, bin: f64, l: f64, c: f64, r: f64) -> (f64, f64) {
    let floor = 1e-300;
    if l < floor || c < floor || r < floor {
        return (freq, c);
    }
    let (ll, lc, lr) = (l.ln(), c.ln(), r.ln());
    let denom = ll - 2.0 * lc + lr;
    if denom.abs() < 1e-300 {
        return (freq, c);
    }
    let delta = (0.5 * (ll - lr) / denom).clamp(-0.5, 0.5);
    let refined_log = lc - 0.25 * (ll - lr) * delta;
    (freq + delta * bin, refined_log.exp())
}

/// Center and half-split of the two dominant peaks: for a Berry-split
/// doublet these estimate 2ω and λ.
pub fn berry_split(report: &SpectrumReport) -> Result<(f64, f64)> {
    if report.peaks.len() < 2 {
        return Err(Error::InsufficientPeaks {
            got: report.peaks.len(),
            need: 2,
        });
    }
    let (f1, f2) = (report.peaks[0].frequency, report.peaks[1].frequency);
    Ok(((f1 + f2) / 2.0, (f1 - f2).abs() / 2.0))
}

/// Damped-oscillation model parameters: P(t) = 1/2 +
/// amplitude · e^{−αt} sin(2Ωt) sin(2θ₀ − λt), Ω = (ω² − α²/4)^{1/2}.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FitEstimates {
    pub omega: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub theta0: f64,
    pub amplitude: f64,
}

impl FitEstimates {
    fn as_array(&self) -> [f64; 5] {
        [
            self.omega,
            self.alpha,
            self.lambda,
            self.theta0,
            self.amplitude,
        ]
    }

    fn from_array(p: [f64; 5]) -> Self {
        Self {
            omega: p[0],
            alpha: p[1],
            lambda: p[2],
            theta0: p[3],
            amplitude: p[4],
        }
    }

    /// Amplitude the damped closed form implies, ω/2Ω. The fit leaves the
    /// amplitude free and this value cross-checks it after the fact.
    pub fn model_amplitude(&self) -> f64 {
        self.omega / (2.0 * effective_frequency(self.omega, self.alpha))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FitResult {
    pub estimates: FitEstimates,
    pub residual_rms: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn model_value(p: &[f64; 5], t: f64) -> f64 {
    let [omega, alpha, lambda, theta0, amplitude] = *p;
    let big = (omega * omega - alpha * alpha / 4.0).max(1e-300).sqrt();
    0.5 + amplitude * (-alpha * t).exp() * (2.0 * big * t).sin() * (2.0 * theta0 - lambda * t).sin()
}

fn ssr(p: &[f64; 5], series: &IntensitySeries) -> f64 {
    series
        .times
        .iter()
        .zip(&series.values)
        .map(|(&t, &y)| {
            let r = model_value(p, t) - y;
            r * r
        })
        .sum()
}

/// Solve a 5×5 linear system by Gaussian elimination with partial
/// pivoting; `None` when singular.
fn solve5(mut a: [[f64; 5]; 5], mut b: [f64; 5]) -> Option<[f64; 5]> {
    for col in 0..5 {
        let pivot = (col..5).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..5 {
            let f = a[row][col] / a[col][col];
            let (above, below) = a.split_at_mut(row);
            for (k, entry) in below[0].iter_mut().enumerate().skip(col) {
                *entry -= f * above[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 5];
    for col in (0..5).rev() {
        let mut s = b[col];
        for k in col + 1..5 {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

const FIT_MAX_ITERATIONS: usize = 200;
const FIT_STEP_TOL: f64 = 1e-10;

/// Spectral warm start: doublet peaks give (Ω, λ), the envelope gives α,
/// and the phase/amplitude follow from a linear subproblem.
fn spectral_init(series: &IntensitySeries, guess: &FitEstimates) -> Option<FitEstimates> {
    let report = spectrum(series, Window::Hann).ok()?;
    let (center, split) = match berry_split(&report) {
        Ok(pair) => pair,
        Err(_) => {
            let single = report.peaks.first()?;
            (single.frequency, guess.lambda.abs())
        }
    };
    let alpha = damping_envelope(series).unwrap_or(guess.alpha).max(0.0);
    let big = center / 2.0;
    let omega = (big * big + alpha * alpha / 4.0).sqrt();
    let lambda = split;

    // P − 1/2 = e^{−αt} sin(2Ωt) [p cos λt + q sin λt],
    // p = A sin 2θ₀, q = −A cos 2θ₀: linear least squares in (p, q).
    let (mut spp, mut spq, mut sqq, mut sy_p, mut sy_q) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &y) in series.times.iter().zip(&series.values) {
        let base = (-alpha * t).exp() * (2.0 * big * t).sin();
        let (bp, bq) = (base * (lambda * t).cos(), base * (lambda * t).sin());
        let r = y - 0.5;
        spp += bp * bp;
        spq += bp * bq;
        sqq += bq * bq;
        sy_p += bp * r;
        sy_q += bq * r;
    }
    let det = spp * sqq - spq * spq;
    if det.abs() < 1e-30 {
        return None;
    }
    let p = (sy_p * sqq - sy_q * spq) / det;
    let q = (spp * sy_q - spq * sy_p) / det;
    let amplitude = p.hypot(q);
    if amplitude < 1e-12 {
        return None;
    }
    let theta0 = 0.5 * f64::atan2(p, -q);
    Some(FitEstimates {
        omega,
        alpha,
        lambda,
        theta0,
        amplitude,
    })
}

/// Least-squares fit of the damped-oscillation model by damped
/// Gauss–Newton (Levenberg-style damping on the normal equations) with a
/// central-difference Jacobian and α ≥ 0 enforced by projection.
///
/// A ±10% frequency error over a long record puts plain Gauss–Newton
/// outside the carrier's basin of attraction, so the fit also derives a
/// candidate start from the series' own spectrum and envelope and begins
/// from whichever start has the lower residual.
///
/// Returns `converged = false` (with the best parameters found) when 200
/// iterations pass without meeting the step tolerance.
pub fn fit_dissipative(series: &IntensitySeries, guess: &FitEstimates) -> Result<FitResult> {
    if series.len() < 16 {
        return Err(Error::TooFewSamples {
            got: series.len(),
            need: 16,
        });
    }
    if !guess.as_array().iter().all(|v| v.is_finite()) {
        return Err(Error::BadInitialGuess("non-finite parameter".into()));
    }
    if guess.alpha < 0.0 {
        return Err(Error::BadInitialGuess(format!(
            "alpha must be >= 0, got {}",
            guess.alpha
        )));
    }

    let mut p = guess.as_array();
    let mut best_ssr = ssr(&p, series);
    if let Some(candidate) = spectral_init(series, guess) {
        let candidate_ssr = ssr(&candidate.as_array(), series);
        if candidate_ssr < best_ssr {
            p = candidate.as_array();
            best_ssr = candidate_ssr;
        }
    }

    let n = series.len();
    let mut lm = 1e-3;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < FIT_MAX_ITERATIONS {
        iterations += 1;

        // residuals and central-difference Jacobian
        let mut jtj = [[0.0f64; 5]; 5];
        let mut jtr = [0.0f64; 5];
        let mut jac = vec![[0.0f64; 5]; n];
        for j in 0..5 {
            let h = 6e-6 * p[j].abs().max(1e-3);
            let mut plus = p;
            plus[j] += h;
            let mut minus = p;
            minus[j] -= h;
            for (i, &t) in series.times.iter().enumerate() {
                jac[i][j] = (model_value(&plus, t) - model_value(&minus, t)) / (2.0 * h);
            }
        }
        for (i, (&t, &y)) in series.times.iter().zip(&series.values).enumerate() {
            let r = model_value(&p, t) - y;
            for a in 0..5 {
                jtr[a] += jac[i][a] * r;
                for b in a..5 {
                    jtj[a][b] += jac[i][a] * jac[i][b];
                }
            }
        }
        for a in 1..5 {
            let (upper, lower) = jtj.split_at_mut(a);
            for (b, row) in upper.iter().enumerate() {
                lower[0][b] = row[a];
            }
        }

        // one Levenberg-damped step, retried with stronger damping on failure
        let mut stepped = false;
        for _ in 0..16 {
            let mut lhs = jtj;
            for d in 0..5 {
                lhs[d][d] += lm * jtj[d][d].max(1e-300);
            }
            let rhs = [-jtr[0], -jtr[1], -jtr[2], -jtr[3], -jtr[4]];
            let Some(step) = solve5(lhs, rhs) else {
                lm = (lm * 10.0).min(1e12);
                continue;
            };
            let mut trial = p;
            for k in 0..5 {
                trial[k] += step[k];
            }
            trial[1] = trial[1].max(0.0); // α ≥ 0
            let trial_ssr = ssr(&trial, series);
            if trial_ssr <= best_ssr {
                let rel_step = (0..5)
                    .map(|k| (trial[k] - p[k]).abs() / (p[k].abs() + 1e-12))
                    .fold(0.0, f64::max);
                let stalled = best_ssr - trial_ssr <= 1e-16 * (1.0 + best_ssr);
                p = trial;
                best_ssr = trial_ssr;
                lm = (lm / 10.0).max(1e-12);
                stepped = true;
                if rel_step < FIT_STEP_TOL || stalled {
                    converged = true;
                }
                break;
            }
            lm = (lm * 10.0).min(1e12);
        }
        if converged {
            break;
        }
        if !stepped {
            // no productive step at maximum damping: the iteration has
            // stalled; call it converged only if the residual is tiny
            converged = best_ssr <= 1e-20 * n as f64;
            break;
        }
    }

    Ok(FitResult {
        estimates: FitEstimates::from_array(p),
        residual_rms: (best_ssr / n as f64).sqrt(),
        converged,
        iterations,
    })
}

/// Minimum extrema count for the envelope estimate.
const ENVELOPE_MIN_EXTREMA: usize = 5;

/// Exponential damping rate from the log-linear decay of successive
/// oscillation extrema of |P − 1/2| (the depolarized asymptote). Assumes
/// the slow modulation factor is constant over the record (λt ≪ 1 or
/// λ = 0).
pub fn damping_envelope(series: &IntensitySeries) -> Result<f64> {
    let n = series.len();
    let x: Vec<f64> = series.values.iter().map(|v| (v - 0.5).abs()).collect();

    let mut points = Vec::new();
    for k in 1..n.saturating_sub(1) {
        if x[k] > x[k - 1] && x[k] >= x[k + 1] && x[k] > 1e-12 {
            // parabolic refinement of the extremum height
            let (l, c, r) = (x[k - 1], x[k], x[k + 1]);
            let denom = l + r - 2.0 * c;
            let height = if denom.abs() < 1e-300 {
                c
            } else {
                let delta = ((l - r) / (2.0 * denom)).clamp(-0.5, 0.5);
                c - (r - l) * delta / 4.0 + denom * delta * delta / 2.0
            };
            points.push((series.times[k], height.max(1e-300).ln()));
        }
    }
    if points.len() < ENVELOPE_MIN_EXTREMA {
        return Err(Error::TooFewExtrema {
            got: points.len(),
            need: ENVELOPE_MIN_EXTREMA,
        });
    }

    // least-squares line through (t_k, ln m_k)
    let m = points.len() as f64;
    let st: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let stt: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sty: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = m * stt - st * st;
    if denom.abs() < 1e-30 {
        return Err(Error::TooFewExtrema {
            got: points.len(),
            need: ENVELOPE_MIN_EXTREMA,
        });
    }
    let slope = (m * sty - st * sy) / denom;
    Ok(-slope)
}

/// SplitMix64 with a Box–Muller normal sampler; self-contained so that
/// seeded artifacts stay byte-stable across toolchain updates.
struct SplitMix64 {
    state: u64,
    cached: Option<f64>,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        Self {
            state: seed,
            cached: None,
        }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in (0, 1].
    fn next_f64(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) / (1u64 << 53) as f64
    }

    fn next_normal(&mut self) -> f64 {
        if let Some(v) = self.cached.take() {
            return v;
        }
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.cached = Some(r * s);
        r * c
    }
}
