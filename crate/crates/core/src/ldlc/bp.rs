//! Belief propagation for LDLC with messages sampled on a uniform grid.
//!
//! Variable messages live on a grid of `span / step` points centered at the
//! channel output of their variable. Each variable only keeps the part of the
//! grid where its channel likelihood is non-negligible, and variable-to-check
//! messages are further trimmed to where they carry mass, so the check-node
//! convolutions shrink as the decoder converges.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::parity::LdlcCode;
use super::shaping::IntegerRange;
use crate::{Error, Result};

pub const DEFAULT_STEP: f64 = 1.0 / 128.0;
pub const DEFAULT_SPAN: f64 = 8.0;
pub const DEFAULT_ITERATIONS: usize = 100;

/// Channel likelihood below this fraction of its peak is treated as zero.
const CHANNEL_FLOOR: f64 = 1e-15;
/// Variable-to-check messages are trimmed below this fraction of their peak.
const MESSAGE_FLOOR: f64 = 1e-10;
const MIN_HALF_WINDOW: usize = 4;
/// Grid points kept on each side of a variable's active region.
const ACTIVE_MARGIN: usize = 16;

/// A probability density sampled at `center + (t - len/2) * step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedDensity {
    pub center: f64,
    pub step: f64,
    pub span: f64,
    pub weights: Vec<f64>,
}

impl DiscretizedDensity {
    pub fn zeros(center: f64, step: f64, span: f64) -> Result<Self> {
        let len = grid_len(step, span)?;
        Ok(Self {
            center,
            step,
            span,
            weights: vec![0.0; len],
        })
    }

    /// Normalized Gaussian samples.
    pub fn gaussian(center: f64, mean: f64, variance: f64, step: f64, span: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::NonPositiveInput("variance"));
        }
        let mut d = Self::zeros(center, step, span)?;
        for t in 0..d.weights.len() {
            let x = d.point(t) - mean;
            d.weights[t] = (-x * x / (2.0 * variance)).exp();
        }
        d.normalize()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, t: usize) -> f64 {
        self.center + (t as f64 - (self.weights.len() / 2) as f64) * self.step
    }

    /// `Σ w * step`.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum::<f64>() * self.step
    }

    /// Rescales to unit mass and returns the remaining deviation `|mass - 1|`.
    pub fn normalize(&mut self) -> Result<f64> {
        let mass = self.mass();
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::NonFinite("density mass"));
        }
        let inv = 1.0 / mass;
        self.weights.iter_mut().for_each(|w| *w *= inv);
        Ok((self.mass() - 1.0).abs())
    }

    /// Grid point of the largest weight (first one on ties).
    pub fn argmax(&self) -> f64 {
        let (t, _) =
            self.weights
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (t, w)| {
                    if *w > best.1 {
                        (t, *w)
                    } else {
                        best
                    }
                });
        self.point(t)
    }
}

fn grid_len(step: f64, span: f64) -> Result<usize> {
    if !(step > 0.0) || !(span > 0.0) || !step.is_finite() || !span.is_finite() {
        return Err(Error::NonPositiveInput("step/span"));
    }
    let len = (span / step).round();
    if (len * step - span).abs() > 1e-9 * span || len < 2.0 {
        return Err(Error::InvalidArgument(
            "span must be a multiple of step".into(),
        ));
    }
    Ok(len as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BpConfig {
    pub iterations: usize,
    pub step: f64,
    pub span: f64,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self {
            iterations: DEFAULT_ITERATIONS,
            step: DEFAULT_STEP,
            span: DEFAULT_SPAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpOutput {
    /// Decoded integer vector, one entry per check, each inside its range.
    pub b_prime: Vec<i64>,
    /// Per-variable belief maxima.
    pub x_hat: Vec<f64>,
    /// Largest `|Σ w * step - 1|` seen after any variable-node normalization.
    pub max_normalization_error: f64,
}

struct Edge {
    var: usize,
    h: f64,
}

struct Message {
    start: usize,
    weights: Vec<f64>,
}

/// Reusable decoder for one code and one set of check ranges.
pub struct BpDecoder<'a> {
    code: &'a LdlcCode,
    ranges: Vec<IntegerRange>,
    config: BpConfig,
    grid: usize,
    per_unit: i64,
    edges: Vec<Edge>,
    check_edges: Vec<std::ops::Range<usize>>,
    var_edges: Vec<Vec<usize>>,
    plans: HashMap<usize, (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
    planner: FftPlanner<f64>,
    scratch: Vec<Complex64>,
    spectra: Vec<Complex64>,
    suffix: Vec<Complex64>,
    buf: Vec<Complex64>,
    prefix: Vec<Complex64>,
    beliefs: Vec<DiscretizedDensity>,
}

impl<'a> BpDecoder<'a> {
    pub fn new(code: &'a LdlcCode, ranges: Vec<IntegerRange>, config: BpConfig) -> Result<Self> {
        let n = code.n();
        if ranges.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: ranges.len(),
            });
        }
        if ranges.iter().any(|r| r.stride < 1 || r.high < r.low) {
            return Err(Error::InvalidArgument("empty check range".into()));
        }
        if config.iterations == 0 {
            return Err(Error::InvalidArgument(
                "iterations must be at least 1".into(),
            ));
        }
        let grid = grid_len(config.step, config.span)?;
        let per_unit = (1.0 / config.step).round();
        if (per_unit * config.step - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("1/step must be an integer".into()));
        }
        let mut edges = Vec::new();
        let mut check_edges = Vec::with_capacity(n);
        let mut var_edges = vec![Vec::new(); n];
        for row in code.check_rows() {
            let first = edges.len();
            for &(var, h) in row {
                var_edges[var].push(edges.len());
                edges.push(Edge { var, h });
            }
            check_edges.push(first..edges.len());
        }
        Ok(Self {
            code,
            ranges,
            config,
            grid,
            per_unit: per_unit as i64,
            edges,
            check_edges,
            var_edges,
            plans: HashMap::new(),
            planner: FftPlanner::new(),
            scratch: Vec::new(),
            spectra: Vec::new(),
            suffix: Vec::new(),
            buf: Vec::new(),
            prefix: Vec::new(),
            beliefs: Vec::new(),
        })
    }

    /// Final per-variable beliefs of the last [`BpDecoder::decode`] call.
    pub fn beliefs(&self) -> &[DiscretizedDensity] {
        &self.beliefs
    }

    /// Decodes a channel-gain-normalized observation with per-dimension noise
    /// variance `noise_var`. Always runs the configured number of iterations.
    pub fn decode(&mut self, y: &[f64], noise_var: f64) -> Result<BpOutput> {
        let n = self.code.n();
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
        if !(noise_var > 0.0) || !noise_var.is_finite() {
            return Err(Error::NonPositiveInput("noise_var"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observation"));
        }
        let step = self.config.step;
        let half = self.grid / 2;
        let reach = (2.0 * (1.0 / CHANNEL_FLOOR).ln()).sqrt() * noise_var.sqrt() / step;
        let half_window = (reach.ceil() as usize).max(MIN_HALF_WINDOW).min(half);
        let lo = half - half_window;
        let hi = (half + half_window + 1).min(self.grid);
        let width = hi - lo;
        let channel: Vec<f64> = (lo..hi)
            .map(|t| {
                let dx = (t as f64 - half as f64) * step;
                (-dx * dx / (2.0 * noise_var)).exp()
            })
            .collect();

        let mut max_err = 0.0f64;
        let mut to_check: Vec<Message> = Vec::with_capacity(self.edges.len());
        for _ in 0..self.edges.len() {
            let (msg, err) = finish_variable_message(channel.clone(), lo, step);
            max_err = max_err.max(err);
            to_check.push(msg);
        }
        let mut to_var: Vec<Vec<f64>> = vec![vec![1.0; width]; self.edges.len()];
        // nonzero part of each check-to-variable message
        let mut written = vec![(0usize, width); self.edges.len()];

        // Per-variable sub-window, relative to `lo`, outside which every
        // variable-to-check message is below the trimming floor.
        let mut active = vec![(0usize, width); n];
        for _ in 0..self.config.iterations {
            for c in 0..n {
                self.check_update(c, y, &to_check, &mut to_var, &mut written, lo, &active);
            }
            for v in 0..n {
                let edges = &self.var_edges[v];
                let d = edges.len();
                let (a0, a1) = active[v];
                let len = a1 - a0;
                // suffix[k] = Π_{j >= k} to_var[edges[j]] on the active part
                let mut suffix = vec![1.0; (d + 1) * len];
                for k in (0..d).rev() {
                    let (head, tail) = suffix.split_at_mut((k + 1) * len);
                    let src = &to_var[edges[k]][a0..a1];
                    for ((s, t), m) in head[k * len..].iter_mut().zip(&tail[..len]).zip(src) {
                        *s = t * m;
                    }
                }
                let mut prefix = channel[a0..a1].to_vec();
                let mut first = usize::MAX;
                let mut last = 0;
                for k in 0..d {
                    let weights: Vec<f64> = prefix
                        .iter()
                        .zip(&suffix[(k + 1) * len..(k + 2) * len])
                        .map(|(p, s)| p * s)
                        .collect();
                    let usable =
                        weights.iter().any(|w| *w > 0.0) && weights.iter().all(|w| w.is_finite());
                    let weights = if usable {
                        weights
                    } else {
                        channel[a0..a1].to_vec()
                    };
                    let (msg, err) = finish_variable_message(weights, lo + a0, step);
                    max_err = max_err.max(err);
                    first = first.min(msg.start - lo);
                    last = last.max(msg.start - lo + msg.weights.len());
                    to_check[edges[k]] = msg;
                    for (p, m) in prefix.iter_mut().zip(&to_var[edges[k]][a0..a1]) {
                        *p *= m;
                    }
                }
                active[v] = (
                    first.saturating_sub(ACTIVE_MARGIN),
                    (last + ACTIVE_MARGIN).min(width),
                );
            }
        }

        let mut x_hat = Vec::with_capacity(n);
        self.beliefs.clear();
        for v in 0..n {
            let mut belief: Vec<f64> = channel.clone();
            for &e in &self.var_edges[v] {
                for (b, m) in belief.iter_mut().zip(&to_var[e]) {
                    *b *= m;
                }
            }
            if !belief.iter().any(|w| *w > 0.0) || belief.iter().any(|w| !w.is_finite()) {
                belief = channel.clone();
            }
            let mut density = DiscretizedDensity {
                center: y[v],
                step,
                span: self.config.span,
                weights: vec![0.0; self.grid],
            };
            density.weights[lo..hi].copy_from_slice(&belief);
            density.normalize()?;
            x_hat.push(density.argmax());
            self.beliefs.push(density);
        }
        let syndrome = self.code.syndrome(&x_hat)?;
        let b_prime = syndrome
            .iter()
            .zip(&self.ranges)
            .map(|(s, r)| r.nearest(*s))
            .collect();
        Ok(BpOutput {
            b_prime,
            x_hat,
            max_normalization_error: max_err,
        })
    }

    fn plans(&mut self, size: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
        let planner = &mut self.planner;
        self.plans
            .entry(size)
            .or_insert_with(|| {
                (
                    planner.plan_fft_forward(size),
                    planner.plan_fft_inverse(size),
                )
            })
            .clone()
    }

    fn check_update(
        &mut self,
        c: usize,
        y: &[f64],
        to_check: &[Message],
        to_var: &mut [Vec<f64>],
        written: &mut [(usize, usize)],
        lo: usize,
        active: &[(usize, usize)],
    ) {
        let span = self.check_edges[c].clone();
        let d = span.len();
        let half = (self.grid / 2) as f64;
        // Density of h_j x_j on the integer grid w (value w * step), unit sum.
        let mut stretched: Vec<(i64, Vec<f64>)> = Vec::with_capacity(d);
        for e in span.clone() {
            let edge = &self.edges[e];
            let msg = &to_check[e];
            let a = edge.h * (y[edge.var] / self.config.step - half);
            let (offset, mut p) = stretch(&msg.weights, msg.start, a, edge.h);
            let sum: f64 = p.iter().sum();
            if sum > 0.0 {
                p.iter_mut().for_each(|v| *v /= sum);
            }
            stretched.push((offset, p));
        }
        let total: usize = stretched.iter().map(|(_, p)| p.len()).sum();
        let size = fast_len(total);
        let (forward, inverse) = self.plans(size);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        if self.scratch.len() < scratch_len {
            self.scratch.resize(scratch_len, Complex64::new(0.0, 0.0));
        }
        let scratch = &mut self.scratch[..scratch_len];

        // Two real sequences per complex transform.
        let zero = Complex64::new(0.0, 0.0);
        let mut spectra = std::mem::take(&mut self.spectra);
        let mut suffix = std::mem::take(&mut self.suffix);
        spectra.resize(d * size, zero);
        suffix.resize((d + 1) * size, zero);
        let mut buf = std::mem::take(&mut self.buf);
        buf.resize(size, zero);
        for pair in (0..d).step_by(2) {
            buf.iter_mut().for_each(|z| *z = zero);
            for (z, v) in buf.iter_mut().zip(&stretched[pair].1) {
                z.re = *v;
            }
            if pair + 1 < d {
                for (z, v) in buf.iter_mut().zip(&stretched[pair + 1].1) {
                    z.im = *v;
                }
            }
            forward.process_with_scratch(&mut buf, scratch);
            for k in 0..size {
                let z = buf[k];
                let zc = buf[(size - k) % size].conj();
                spectra[pair * size + k] = (z + zc) * 0.5;
                if pair + 1 < d {
                    spectra[(pair + 1) * size + k] = Complex64::new(0.0, -0.5) * (z - zc);
                }
            }
        }
        suffix[d * size..]
            .iter_mut()
            .for_each(|s| *s = Complex64::new(1.0, 0.0));
        for k in (0..d).rev() {
            let (head, tail) = suffix.split_at_mut((k + 1) * size);
            for ((s, t), f) in head[k * size..]
                .iter_mut()
                .zip(&tail[..size])
                .zip(&spectra[k * size..(k + 1) * size])
            {
                *s = t * f;
            }
        }
        let mut prefix = std::mem::take(&mut self.prefix);
        prefix.clear();
        prefix.resize(size, Complex64::new(1.0, 0.0));
        let offsets_total: i64 = stretched.iter().map(|(o, _)| *o).sum();
        let scale = 1.0 / size as f64;
        let mut conv = Vec::with_capacity(size);
        for pair in (0..d).step_by(2) {
            let second = pair + 1 < d;
            for (k, z) in buf.iter_mut().enumerate() {
                *z = prefix[k] * suffix[(pair + 1) * size + k];
            }
            for (p, f) in prefix.iter_mut().zip(&spectra[pair * size..]) {
                *p *= f;
            }
            if second {
                for (k, z) in buf.iter_mut().enumerate() {
                    *z += Complex64::new(0.0, 1.0) * prefix[k] * suffix[(pair + 2) * size + k];
                }
                for (p, f) in prefix.iter_mut().zip(&spectra[(pair + 1) * size..]) {
                    *p *= f;
                }
            }
            inverse.process_with_scratch(&mut buf, scratch);
            for (k, imag) in [(pair, false), (pair + 1, true)] {
                if k >= d {
                    break;
                }
                let len = (total + 2 - stretched[k].1.len() - d).min(size);
                // padded: conv[j] holds lag j - 1
                conv.clear();
                conv.push(0.0);
                conv.extend(
                    buf[..len]
                        .iter()
                        .map(|v| (if imag { v.im } else { v.re } * scale).max(0.0)),
                );
                conv.extend([0.0, 0.0]);
                let offset = offsets_total - stretched[k].0;
                let edge = &self.edges[span.start + k];
                let out = &mut to_var[span.start + k];
                let (w0, w1) = written[span.start + k];
                out[w0..w1].iter_mut().for_each(|o| *o = 0.0);
                written[span.start + k] = active[edge.var];
                periodic_message(
                    &conv,
                    offset,
                    edge.h,
                    y[edge.var] / self.config.step - half + lo as f64,
                    self.per_unit,
                    self.ranges[c],
                    active[edge.var],
                    out,
                );
            }
        }
        self.spectra = spectra;
        self.suffix = suffix;
        self.buf = buf;
        self.prefix = prefix;
    }
}

/// `m(x) = Σ_b P(b - h x)` on the grid points `a0..a1` of a variable window,
/// where point `k` sits at `(first + k) * step`. Points outside the window
/// are left untouched. Scaled to a peak of one.
#[allow(clippy::too_many_arguments)]
fn periodic_message(
    conv: &[f64],
    offset: i64,
    h: f64,
    first: f64,
    per_unit: i64,
    range: IntegerRange,
    (a0, a1): (usize, usize),
    out: &mut [f64],
) {
    out[a0..a1].iter_mut().for_each(|o| *o = 0.0);
    // conv carries one leading and two trailing zeros around the lags
    if a0 >= a1 || conv.len() < 4 {
        return;
    }
    let lenf = (conv.len() - 3) as f64;
    // lag at point k for integer b: D b + r0 - h k
    let r0 = -h * first - offset as f64;
    let (e0, e1) = (r0 - h * a0 as f64, r0 - h * (a1 - 1) as f64);
    let (v_min, v_max) = if e0 <= e1 { (e0, e1) } else { (e1, e0) };
    let d = per_unit as f64;
    let b_min = ((-1.0 - v_max) / d).ceil() as i64;
    let b_max = ((lenf - v_min) / d).ceil() as i64 - 1;
    let top = (range.high - range.low) / range.stride;
    let q_min = ceil_div(b_min - range.low, range.stride);
    let q_max = floor_div(b_max - range.low, range.stride);
    if q_min >= 0 && q_max <= top {
        // every overlapping b lies in the range: fold the lags by the period
        let period = (per_unit * range.stride) as usize;
        let mut folded = vec![0.0; period];
        for (j, v) in conv.iter().enumerate() {
            folded[j % period] += v;
        }
        let c0 = (per_unit * range.low) as f64 + r0 + 1.0;
        for (k, o) in out.iter_mut().enumerate().take(a1).skip(a0) {
            let t = c0 - h * k as f64;
            let j = floor_i64(t);
            let f = t - j as f64;
            let u = j.rem_euclid(period as i64) as usize;
            let next = if u + 1 == period { 0 } else { u + 1 };
            *o = (1.0 - f) * folded[u] + f * folded[next];
        }
        scale_to_peak(&mut out[a0..a1]);
        return;
    }
    let (q_min, q_max) = (q_min.max(0), q_max.min(top));
    let last = (conv.len() - 2) as f64;
    for q in q_min..=q_max {
        let c0 = (per_unit * (range.low + q * range.stride)) as f64 + r0;
        let (k_lo, k_hi) = if h > 0.0 {
            (((c0 - lenf) / h).floor() + 1.0, ((c0 + 1.0) / h).floor())
        } else {
            let g = -h;
            (((-1.0 - c0) / g).ceil(), ((lenf - c0) / g).ceil() - 1.0)
        };
        let k_lo = k_lo.max(a0 as f64) as usize;
        let k_hi = k_hi.min((a1 - 1) as f64);
        if k_hi < k_lo as f64 {
            continue;
        }
        for (k, o) in out
            .iter_mut()
            .enumerate()
            .take(k_hi as usize + 1)
            .skip(k_lo)
        {
            // shifted by one so the padded index is never negative
            let t = (c0 - h * k as f64 + 1.0).clamp(0.0, last);
            let j = t as usize;
            let f = t - j as f64;
            *o += (1.0 - f) * conv[j] + f * conv[j + 1];
        }
    }
    scale_to_peak(&mut out[a0..a1]);
}

fn scale_to_peak(values: &mut [f64]) {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(*v));
    if peak > 0.0 && peak.is_finite() {
        let inv = 1.0 / peak;
        values.iter_mut().for_each(|o| *o *= inv);
    } else {
        values.iter_mut().for_each(|o| *o = 1.0);
    }
}

fn floor_i64(x: f64) -> i64 {
    let i = x as i64;
    if (i as f64) > x {
        i - 1
    } else {
        i
    }
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Smallest `2^a 3^b 5^c` not below `n`.
fn fast_len(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p5 = 1;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut v = p35;
            while v < n {
                v *= 2;
            }
            best = best.min(v);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

/// Trims, normalizes to unit mass and returns the message with the remaining
/// normalization error.
fn finish_variable_message(weights: Vec<f64>, lo: usize, step: f64) -> (Message, f64) {
    let peak = weights.iter().fold(0.0f64, |m, w| m.max(*w));
    let floor = peak * MESSAGE_FLOOR;
    let first = weights.iter().position(|w| *w > floor).unwrap_or(0);
    let last = weights
        .iter()
        .rposition(|w| *w > floor)
        .unwrap_or(weights.len() - 1);
    let mut kept = weights[first..=last].to_vec();
    let mass: f64 = kept.iter().sum::<f64>() * step;
    let inv = 1.0 / mass;
    kept.iter_mut().for_each(|w| *w *= inv);
    let err = (kept.iter().sum::<f64>() * step - 1.0).abs();
    (
        Message {
            start: lo + first,
            weights: kept,
        },
        err,
    )
}

/// Maps a message on variable grid points `start..` to the density of `h x`
/// on the integer grid `w`, where grid point `t` sits at `w = a + h t`.
/// Returns the first grid index and the samples.
fn stretch(q: &[f64], start: usize, a: f64, h: f64) -> (i64, Vec<f64>) {
    let first = a + h * start as f64;
    let last = a + h * (start + q.len() - 1) as f64;
    let (w_min, w_max) = if first <= last {
        (first, last)
    } else {
        (last, first)
    };
    if h.abs() <= 1.0 || h.abs() * (q.len() as f64 - 1.0) < 2.0 {
        let lo = w_min.floor() as i64;
        let hi = w_max.floor() as i64 + 1;
        let mut p = vec![0.0; (hi - lo + 1) as usize];
        for (k, v) in q.iter().enumerate() {
            let w = a + h * (start + k) as f64;
            let w0 = floor_i64(w);
            let f = w - w0 as f64;
            let idx = (w0 - lo) as usize;
            p[idx] += (1.0 - f) * v;
            p[idx + 1] += f * v;
        }
        (lo, p)
    } else {
        let lo = w_min.ceil() as i64;
        let hi = w_max.floor() as i64;
        let inv_h = 1.0 / h;
        let len = q.len();
        let p = (lo..=hi)
            .map(|w| {
                let t = (w as f64 - a) * inv_h - start as f64;
                let t0 = t.floor().clamp(0.0, (len - 1) as f64);
                let f = (t - t0).clamp(0.0, 1.0);
                let i = t0 as usize;
                let next = if i + 1 < len { q[i + 1] } else { 0.0 };
                ((1.0 - f) * q[i] + f * next) * inv_h.abs()
            })
            .collect();
        (lo, p)
    }
}

/// One-shot BP decode returning the decoded integer vector.
pub fn bp_decode(
    code: &LdlcCode,
    ranges: &[IntegerRange],
    y: &[f64],
    noise_var: f64,
    iterations: usize,
    step: f64,
    span: f64,
) -> Result<Vec<i64>> {
    let mut decoder = BpDecoder::new(
        code,
        ranges.to_vec(),
        BpConfig {
            iterations,
            step,
            span,
        },
    )?;
    Ok(decoder.decode(y, noise_var)?.b_prime)
}
