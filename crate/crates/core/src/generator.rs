//! Generator functions `f` with evaluable Fourier transforms.
//!
//! The transform convention is `f̂(ξ) = ∫ f(x) e^{−2πi ξ·x} dx`. Every catalog
//! entry knows `f̂` and `f` in closed form, its squared norm, its
//! autocorrelation `⟨f, T_{−y} f⟩ = ∫ f(x) conj(f(x+y)) dx`, and a
//! [`DecayBound`] envelope for `|f̂|²` that makes truncated lattice sums
//! certifiable.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{mat_vec, LatticeSpec, MAX_DIM};
use crate::quadrature;

/// `sin(πx)/(πx)`, with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    let t = PI * x;
    if t.abs() < 1e-6 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// Centered cardinal B-spline of degree `m`: the `(m+1)`-fold convolution of
/// `χ_{[−1/2,1/2]}`, supported on `[−(m+1)/2, (m+1)/2]`.
pub fn cardinal_bspline(m: u32, x: f64) -> f64 {
    let half = (m + 1) as f64 / 2.0;
    if x.abs() >= half {
        return 0.0;
    }
    if m == 0 {
        return 1.0;
    }
    // symmetric, and the truncated-power sum is better conditioned on the left
    let x = -x.abs();
    let mut acc = 0.0;
    let mut binom = 1.0;
    for k in 0..=(m + 1) {
        let t = x + half - k as f64;
        if t > 0.0 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * t.powi(m as i32);
        }
        binom = binom * ((m + 1 - k) as f64) / ((k + 1) as f64);
    }
    let fact: f64 = (1..=m).map(|i| i as f64).product();
    acc / fact
}

/// Envelope for `|f̂(ξ)|²` as a nonincreasing function of `r = ‖ξ‖_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class")]
pub enum DecayBound {
    /// `|f̂|² ≤ peak` on `‖ξ‖_∞ ≤ radius`, zero outside.
    CompactFrequencySupport { radius: f64, peak: f64 },
    /// `|f̂|² ≤ min(peak, constant·r^{−order})`, with `order > d`.
    Polynomial { order: f64, constant: f64, peak: f64 },
    /// `|f̂|² ≤ constant·e^{−rate·r²}`.
    Gaussian { rate: f64, constant: f64 },
}

impl DecayBound {
    pub fn envelope(&self, r: f64) -> f64 {
        match *self {
            DecayBound::CompactFrequencySupport { radius, peak } => {
                if r <= radius {
                    peak
                } else {
                    0.0
                }
            }
            DecayBound::Polynomial {
                order,
                constant,
                peak,
            } => {
                if r <= 0.0 {
                    peak
                } else {
                    peak.min(constant * r.powf(-order))
                }
            }
            DecayBound::Gaussian { rate, constant } => constant * (-rate * r * r).exp(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            DecayBound::CompactFrequencySupport { radius, peak } => {
                DecayBound::CompactFrequencySupport {
                    radius,
                    peak: peak * factor,
                }
            }
            DecayBound::Polynomial {
                order,
                constant,
                peak,
            } => DecayBound::Polynomial {
                order,
                constant: constant * factor,
                peak: peak * factor,
            },
            DecayBound::Gaussian { rate, constant } => DecayBound::Gaussian {
                rate,
                constant: constant * factor,
            },
        }
    }

    /// Largest value of the envelope.
    pub fn peak(&self) -> f64 {
        self.envelope(0.0)
    }

    /// Envelope for `|ĝ|·|ĥ|` given envelopes for `|ĝ|²` and `|ĥ|²`.
    pub fn geometric_mean(&self, other: &DecayBound) -> DecayBound {
        use DecayBound::*;
        let peak = (self.peak() * other.peak()).sqrt();
        match (*self, *other) {
            (CompactFrequencySupport { radius: a, .. }, CompactFrequencySupport { radius: b, .. }) => {
                CompactFrequencySupport {
                    radius: a.min(b),
                    peak,
                }
            }
            (CompactFrequencySupport { radius, .. }, _) | (_, CompactFrequencySupport { radius, .. }) => {
                CompactFrequencySupport { radius, peak }
            }
            (
                Polynomial {
                    order: p,
                    constant: c,
                    ..
                },
                Polynomial {
                    order: q,
                    constant: e,
                    ..
                },
            ) => Polynomial {
                order: 0.5 * (p + q),
                constant: (c * e).sqrt(),
                peak,
            },
            (Gaussian { rate: a, constant: c }, Gaussian { rate: b, constant: e }) => Gaussian {
                rate: 0.5 * (a + b),
                constant: (c * e).sqrt(),
            },
            (Gaussian { rate, .. }, Polynomial { .. }) | (Polynomial { .. }, Gaussian { rate, .. }) => {
                Gaussian {
                    rate: 0.5 * rate,
                    constant: peak,
                }
            }
        }
    }

    /// Upper bound on `∫_{‖ξ‖_∞ > radius} envelope(‖ξ‖_∞) dξ` over `ℝ^dim`.
    pub fn tail_integral(&self, radius: f64, dim: usize) -> f64 {
        let d = dim as f64;
        // surface measure of the sup-norm sphere of radius r is 2d(2r)^{d-1}
        match *self {
            DecayBound::CompactFrequencySupport { radius: rs, peak } => {
                if radius >= rs {
                    0.0
                } else {
                    peak * ((2.0 * rs).powf(d) - (2.0 * radius.max(0.0)).powf(d))
                }
            }
            DecayBound::Polynomial {
                order,
                constant,
                peak,
            } => {
                if order <= d {
                    return f64::INFINITY;
                }
                // below the knee the envelope is capped by `peak`
                let knee = (constant / peak).powf(1.0 / order);
                let r = radius.max(knee);
                let mut t = constant * d * 2f64.powf(d) * r.powf(d - order) / (order - d);
                if radius < knee {
                    t += peak * ((2.0 * knee).powf(d) - (2.0 * radius.max(0.0)).powf(d));
                }
                t
            }
            DecayBound::Gaussian { rate, constant } => {
                let k = d - 1.0;
                let r = radius.max(1e-300);
                let beta = 2.0 * rate * r - k / r;
                if beta <= 0.0 {
                    return f64::INFINITY;
                }
                constant * 2.0 * d * 2f64.powf(k) * r.powf(k) * (-rate * r * r).exp() / beta
            }
        }
    }

    /// Smallest radius (up to bisection accuracy) whose
    /// [`tail_integral`](Self::tail_integral) is at most `tol`.
    pub fn radius_for(&self, tol: f64, dim: usize) -> f64 {
        if let DecayBound::CompactFrequencySupport { radius, .. } = *self {
            return radius;
        }
        let mut hi = 1.0;
        while self.tail_integral(hi, dim) > tol {
            hi *= 2.0;
            if hi > 1e7 {
                return hi;
            }
        }
        let mut lo = 0.0;
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.tail_integral(mid, dim) > tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Indicator of `{ξ : lower ≤ Mξ < upper}` in frequency, with `M = I` when
/// no frame is given. Half-open boxes tile exactly under integer shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
    frame: Option<BoxFrame>,
}

#[derive(Debug, Clone, PartialEq)]
struct BoxFrame {
    forward: DMatrix<f64>,
    inv_transpose: DMatrix<f64>,
    inverse_inf_norm: f64,
    det_abs: f64,
    diagonal: bool,
}

impl FrequencyBox {
    fn contains(&self, xi: &[f64]) -> bool {
        match &self.frame {
            None => xi
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&x, (&lo, &hi))| lo <= x && x < hi),
            Some(frame) => {
                let eta = mat_vec(&frame.forward, xi);
                eta.iter()
                    .zip(self.lower.iter().zip(&self.upper))
                    .all(|(&x, (&lo, &hi))| lo <= x && x < hi)
            }
        }
    }

    /// `∫_box e^{+2πi η·z} dη` as a product of one-dimensional integrals.
    fn box_transform(&self, z: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for ((&lo, &hi), &zi) in self.lower.iter().zip(&self.upper).zip(z) {
            let w = hi - lo;
            let c = 0.5 * (hi + lo);
            acc *= Complex64::from_polar(w * sinc(w * zi), 2.0 * PI * c * zi);
        }
        acc
    }

    fn spatial(&self, x: &[f64]) -> Complex64 {
        match &self.frame {
            None => self.box_transform(x),
            Some(f) => self.box_transform(&mat_vec(&f.inv_transpose, x)) / f.det_abs,
        }
    }

    fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product::<f64>()
            / self.frame.as_ref().map_or(1.0, |f| f.det_abs)
    }

    fn support_radius(&self) -> f64 {
        let corner = self
            .lower
            .iter()
            .chain(&self.upper)
            .fold(0.0_f64, |m, x| m.max(x.abs()));
        corner * self.frame.as_ref().map_or(1.0, |f| f.inverse_inf_norm)
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        match &self.frame {
            None => vec![self.lower[axis], self.upper[axis]],
            Some(f) if f.diagonal => {
                let s = f.forward[(axis, axis)];
                vec![self.lower[axis] / s, self.upper[axis] / s]
            }
            Some(_) => Vec::new(),
        }
    }
}

/// Uniformly sampled, compactly supported spatial data.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpatial {
    step: f64,
    origin: Vec<f64>,
    samples: Vec<(Vec<i64>, Complex64)>,
    lookup: HashMap<Vec<i64>, Complex64>,
    band_limit: Option<f64>,
}

impl SampledSpatial {
    /// Samples `value` at `origin + step·index`. `band_limit` is a frequency
    /// radius (sup-norm) beyond which the transform is treated as zero; it
    /// must not exceed the Nyquist radius `1/(2·step)`.
    pub fn new(
        step: f64,
        origin: Vec<f64>,
        samples: Vec<(Vec<i64>, Complex64)>,
        band_limit: Option<f64>,
    ) -> Result<Self> {
        let dim = origin.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Samples(format!("grid step must be positive, got {step}")));
        }
        if samples.is_empty() {
            return Err(Error::Samples("no samples".into()));
        }
        if let Some((idx, _)) = samples.iter().find(|(idx, _)| idx.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: idx.len(),
            });
        }
        if samples.iter().any(|(_, v)| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(b) = band_limit {
            let nyquist = 0.5 / step;
            if !(b > 0.0 && b <= nyquist * (1.0 + 1e-12)) {
                return Err(Error::Samples(format!(
                    "band limit {b} must lie in (0, {nyquist}] for step {step}"
                )));
            }
        }
        let mut samples = samples;
        samples.sort_by(|a, b| a.0.cmp(&b.0));
        samples.dedup_by(|a, b| a.0 == b.0);
        let lookup = samples.iter().cloned().collect();
        Ok(Self {
            step,
            origin,
            samples,
            lookup,
            band_limit,
        })
    }

    /// Infers the grid from sample positions and validates uniformity.
    pub fn from_points(points: &[(Vec<f64>, Complex64)], band_limit: Option<f64>) -> Result<Self> {
        let dim = points.first().map(|p| p.0.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::Samples("no samples".into()));
        }
        if points.iter().any(|p| p.0.len() != dim) {
            return Err(Error::Samples("rows have differing dimensions".into()));
        }
        let mut step = f64::INFINITY;
        let mut origin = vec![0.0; dim];
        let mut span = 0.0_f64;
        for (axis, o) in origin.iter_mut().enumerate() {
            let mut coords: Vec<f64> = points.iter().map(|p| p.0[axis]).collect();
            coords.sort_by(f64::total_cmp);
            *o = coords[0];
            span = span.max(coords[coords.len() - 1] - coords[0]);
            for w in coords.windows(2) {
                let gap = w[1] - w[0];
                if gap > 0.0 {
                    step = step.min(gap);
                }
            }
        }
        if !step.is_finite() {
            // a single sample along every axis; its cell size is undetermined
            return Err(Error::Samples("cannot infer grid step from a single point".into()));
        }
        if step <= 1e-12 * span.max(1.0) {
            return Err(Error::Samples(format!("grid step {step:e} is degenerate")));
        }
        let mut samples = Vec::with_capacity(points.len());
        for (x, v) in points {
            let mut idx = Vec::with_capacity(dim);
            for axis in 0..dim {
                let u = (x[axis] - origin[axis]) / step;
                let r = u.round();
                if (u - r).abs() > 1e-6 {
                    return Err(Error::Samples(format!(
                        "coordinate {} on axis {} is off the uniform grid (step {step})",
                        x[axis],
                        axis + 1
                    )));
                }
                idx.push(r as i64);
            }
            samples.push((idx, *v));
        }
        Self::new(step, origin, samples, band_limit)
    }

    /// Reads `x_1,...,x_d,re,im` rows. A non-numeric first line is treated
    /// as a header.
    pub fn from_csv_reader<R: Read>(reader: R, band_limit: Option<f64>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut points = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Samples(e.to_string()))?;
            let parsed: std::result::Result<Vec<f64>, _> =
                rec.iter().map(str::parse::<f64>).collect();
            let vals = match parsed {
                Ok(v) => v,
                Err(_) if line == 0 => continue,
                Err(e) => return Err(Error::Samples(format!("line {}: {e}", line + 1))),
            };
            if vals.len() < 3 {
                return Err(Error::Samples(format!(
                    "line {}: expected x_1,...,x_d,re,im",
                    line + 1
                )));
            }
            let d = vals.len() - 2;
            points.push((vals[..d].to_vec(), Complex64::new(vals[d], vals[d + 1])));
        }
        Self::from_points(&points, band_limit)
    }

    pub fn from_csv_path(path: &Path, band_limit: Option<f64>) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Samples(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file, band_limit)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn band_limit(&self) -> Option<f64> {
        self.band_limit
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn position(&self, idx: &[i64]) -> Vec<f64> {
        idx.iter()
            .zip(&self.origin)
            .map(|(&i, &o)| o + self.step * i as f64)
            .collect()
    }

    /// `(position, value)` pairs in index order.
    pub fn points(&self) -> impl Iterator<Item = (Vec<f64>, Complex64)> + '_ {
        self.samples.iter().map(|(i, v)| (self.position(i), *v))
    }

    /// Unrestricted Riemann-sum transform `h^d Σ f(x_j) e^{−2πi ξ·x_j}`.
    pub fn riemann_transform(&self, xi: &[f64]) -> Complex64 {
        let scale = self.step.powi(self.dim() as i32);
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, v) in &self.samples {
            let phase: f64 = idx
                .iter()
                .zip(&self.origin)
                .zip(xi)
                .map(|((&i, &o), &x)| x * (o + self.step * i as f64))
                .sum();
            acc += v * Complex64::from_polar(1.0, -2.0 * PI * phase);
        }
        acc * scale
    }

    fn fourier(&self, xi: &[f64]) -> Complex64 {
        if let Some(b) = self.band_limit {
            if xi.iter().any(|x| x.abs() > b) {
                return Complex64::new(0.0, 0.0);
            }
        }
        self.riemann_transform(xi)
    }

    /// Multilinear interpolation; samples missing from the grid are zero.
    fn spatial(&self, x: &[f64]) -> Complex64 {
        let d = self.dim();
        let mut base = Vec::with_capacity(d);
        let mut frac = Vec::with_capacity(d);
        for axis in 0..d {
            let u = (x[axis] - self.origin[axis]) / self.step;
            let b = u.floor();
            base.push(b as i64);
            frac.push(u - b);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = vec![0i64; d];
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            for axis in 0..d {
                let up = (corner >> axis) & 1 == 1;
                idx[axis] = base[axis] + up as i64;
                w *= if up { frac[axis] } else { 1.0 - frac[axis] };
            }
            if w != 0.0 {
                if let Some(v) = self.lookup.get(&idx) {
                    acc += v * w;
                }
            }
        }
        acc
    }

    fn spatial_radius(&self) -> f64 {
        self.samples
            .iter()
            .map(|(i, _)| {
                self.position(i)
                    .iter()
                    .fold(0.0_f64, |m, x| m.max(x.abs()))
            })
            .fold(0.0, f64::max)
            + self.step
    }

    fn diameter(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .map(|axis| {
                let (lo, hi) = self.samples.iter().fold((i64::MAX, i64::MIN), |(lo, hi), (i, _)| {
                    (lo.min(i[axis]), hi.max(i[axis]))
                });
                (hi - lo) as f64 * self.step
            })
            .fold(0.0, f64::max)
    }

    fn frequency_radius(&self) -> f64 {
        self.band_limit.unwrap_or(0.5 / self.step)
    }
}

/// The kinds of generator the crate can evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    FrequencyBox(FrequencyBox),
    /// Tensor sinc, `f̂ = χ_{[−1/2,1/2)^d}`.
    Sinc,
    /// Tensor cardinal B-spline of degree `order ≥ 1`, `f̂ = Π sinc^{order+1}(ξ_i)`.
    BSpline { order: u32 },
    /// `f(x) = exp(−π‖x‖²/width²)`, `f̂(ξ) = width^d exp(−π width² ‖ξ‖²)`.
    Gaussian { width: f64 },
    SampledSpatial(SampledSpatial),
    /// `Σ_j a_j f(· − s_j)` for a base generator `f`.
    TranslateCombination {
        base: Box<Generator>,
        terms: Vec<(Complex64, Vec<f64>)>,
    },
}

/// A generator `f ∈ L²(ℝ^d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    dim: usize,
    kind: GeneratorKind,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(Error::UnsupportedDimension(dim))
    } else {
        Ok(())
    }
}

impl Generator {
    pub fn sinc(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            kind: GeneratorKind::Sinc,
        })
    }

    pub fn bspline(dim: usize, order: u32) -> Result<Self> {
        check_dim(dim)?;
        if order == 0 {
            return Err(Error::InvalidGenerator("B-spline order must be at least 1".into()));
        }
        if order > 12 {
            return Err(Error::InvalidGenerator(format!("B-spline order {order} is too large")));
        }
        Ok(Self {
            dim,
            kind: GeneratorKind::BSpline { order },
        })
    }

    pub fn gaussian(dim: usize, width: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidGenerator(format!("Gaussian width must be positive, got {width}")));
        }
        Ok(Self {
            dim,
            kind: GeneratorKind::Gaussian { width },
        })
    }

    /// `f̂ = χ_{[lower, upper)}`.
    pub fn frequency_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Self::frequency_box_in_frame(lower, upper, None)
    }

    /// `f̂ = χ_{(A^T)^{-1}[lower, upper)}`: the box corners are mapped through
    /// the dual basis of `lattice`.
    pub fn frequency_box_dual(lattice: &LatticeSpec, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Self::frequency_box_in_frame(lower, upper, Some(lattice.basis().transpose()))
    }

    /// `f̂(ξ) = 1` iff `lower ≤ Mξ < upper` componentwise.
    pub fn frequency_box_in_frame(
        lower: Vec<f64>,
        upper: Vec<f64>,
        frame: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        let dim = lower.len();
        check_dim(dim)?;
        if upper.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: upper.len(),
            });
        }
        if lower.iter().chain(&upper).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if lower.iter().zip(&upper).any(|(lo, hi)| lo >= hi) {
            return Err(Error::InvalidGenerator("box corners must satisfy lower < upper".into()));
        }
        let frame = match frame {
            None => None,
            Some(m) => {
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: m.nrows(),
                    });
                }
                let inv = m.clone().try_inverse().ok_or(Error::SingularMatrix {
                    det: 0.0,
                    threshold: 0.0,
                })?;
                let inverse_inf_norm = (0..dim)
                    .map(|i| (0..dim).map(|j| inv[(i, j)].abs()).sum::<f64>())
                    .fold(0.0, f64::max);
                let diagonal = (0..dim).all(|i| (0..dim).all(|j| i == j || m[(i, j)] == 0.0));
                Some(BoxFrame {
                    det_abs: m.determinant().abs(),
                    inv_transpose: inv.transpose(),
                    forward: m,
                    inverse_inf_norm,
                    diagonal,
                })
            }
        };
        Ok(Self {
            dim,
            kind: GeneratorKind::FrequencyBox(FrequencyBox {
                lower,
                upper,
                frame,
            }),
        })
    }

    pub fn sampled(data: SampledSpatial) -> Self {
        Self {
            dim: data.dim(),
            kind: GeneratorKind::SampledSpatial(data),
        }
    }

    /// `Σ_j a_j f(· − s_j)`.
    pub fn combination(&self, terms: Vec<(Complex64, Vec<f64>)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidGenerator("empty translate combination".into()));
        }
        for (a, s) in &terms {
            if s.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: s.len(),
                });
            }
            if !a.re.is_finite() || !a.im.is_finite() || s.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self {
            dim: self.dim,
            kind: GeneratorKind::TranslateCombination {
                base: Box::new(self.clone()),
                terms,
            },
        })
    }

    /// `f(· − shift)`.
    pub fn translated(&self, shift: Vec<f64>) -> Result<Self> {
        self.combination(vec![(Complex64::new(1.0, 0.0), shift)])
    }

    /// `c·f`.
    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        self.combination(vec![(c, vec![0.0; self.dim])])
    }

    /// `f + T_{A·n} f`.
    pub fn perturbed(&self, lattice: &LatticeSpec, n: &[i64]) -> Result<Self> {
        if n.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: n.len(),
            });
        }
        let one = Complex64::new(1.0, 0.0);
        self.combination(vec![
            (one, vec![0.0; self.dim]),
            (one, lattice.spatial_point(n)),
        ])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    /// Short provenance string.
    pub fn tag(&self) -> String {
        match &self.kind {
            GeneratorKind::FrequencyBox(b) => {
                let frame = if b.frame.is_some() { ",framed" } else { "" };
                format!("frequency_box(lower={:?},upper={:?}{frame})", b.lower, b.upper)
            }
            GeneratorKind::Sinc => format!("sinc(d={})", self.dim),
            GeneratorKind::BSpline { order } => format!("bspline(order={order},d={})", self.dim),
            GeneratorKind::Gaussian { width } => format!("gaussian(width={width},d={})", self.dim),
            GeneratorKind::SampledSpatial(s) => {
                format!("sampled(n={},step={},band={:?})", s.len(), s.step, s.band_limit)
            }
            GeneratorKind::TranslateCombination { base, terms } => {
                format!("combination({},terms={})", base.tag(), terms.len())
            }
        }
    }

    /// `f̂(ξ)`.
    pub fn eval_fourier(&self, xi: &[f64]) -> Complex64 {
        debug_assert_eq!(xi.len(), self.dim);
        match &self.kind {
            GeneratorKind::FrequencyBox(b) => Complex64::new(b.contains(xi) as u8 as f64, 0.0),
            GeneratorKind::Sinc => {
                let inside = xi.iter().all(|&x| (-0.5..0.5).contains(&x));
                Complex64::new(inside as u8 as f64, 0.0)
            }
            GeneratorKind::BSpline { order } => {
                let p = (*order + 1) as i32;
                Complex64::new(xi.iter().map(|&x| sinc(x).powi(p)).product(), 0.0)
            }
            GeneratorKind::Gaussian { width } => {
                let r2: f64 = xi.iter().map(|x| x * x).sum();
                Complex64::new(width.powi(self.dim as i32) * (-PI * width * width * r2).exp(), 0.0)
            }
            GeneratorKind::SampledSpatial(s) => s.fourier(xi),
            GeneratorKind::TranslateCombination { base, terms } => {
                let fb = base.eval_fourier(xi);
                if fb == Complex64::new(0.0, 0.0) {
                    return fb;
                }
                fb * modulation(terms, xi)
            }
        }
    }

    /// `|f̂(ξ)|²`.
    pub fn fourier_norm_sqr(&self, xi: &[f64]) -> f64 {
        match &self.kind {
            GeneratorKind::BSpline { order } => {
                let p = 2 * (*order + 1) as i32;
                xi.iter().map(|&x| sinc(x).powi(p)).product()
            }
            _ => self.eval_fourier(xi).norm_sqr(),
        }
    }

    /// `f(x)`.
    pub fn eval_spatial(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            GeneratorKind::FrequencyBox(b) => b.spatial(x),
            GeneratorKind::Sinc => Complex64::new(x.iter().map(|&t| sinc(t)).product(), 0.0),
            GeneratorKind::BSpline { order } => {
                Complex64::new(x.iter().map(|&t| cardinal_bspline(*order, t)).product(), 0.0)
            }
            GeneratorKind::Gaussian { width } => {
                let r2: f64 = x.iter().map(|t| t * t).sum();
                Complex64::new((-PI * r2 / (width * width)).exp(), 0.0)
            }
            GeneratorKind::SampledSpatial(s) => s.spatial(x),
            GeneratorKind::TranslateCombination { base, terms } => {
                let mut y = vec![0.0; self.dim];
                terms
                    .iter()
                    .map(|(a, s)| {
                        for i in 0..self.dim {
                            y[i] = x[i] - s[i];
                        }
                        a * base.eval_spatial(&y)
                    })
                    .sum()
            }
        }
    }

    /// `‖f‖²_{L²}`.
    pub fn l2_norm_squared(&self) -> Result<f64> {
        let v = match &self.kind {
            GeneratorKind::FrequencyBox(b) => b.volume(),
            GeneratorKind::SampledSpatial(s) if s.band_limit.is_none() => {
                s.samples.iter().map(|(_, v)| v.norm_sqr()).sum::<f64>() * s.step.powi(self.dim as i32)
            }
            _ => self.autocorrelation_at(&vec![0.0; self.dim]).re,
        };
        if !(v >= 1e-14) {
            return Err(Error::ZeroGenerator(v));
        }
        Ok(v)
    }

    /// `⟨f, T_{−y} f⟩ = ∫ f(x) conj(f(x+y)) dx = ∫ |f̂(ξ)|² e^{−2πi ξ·y} dξ`.
    pub fn autocorrelation_at(&self, y: &[f64]) -> Complex64 {
        let d = self.dim as i32;
        match &self.kind {
            // |f̂|² = f̂ for an indicator, so the autocorrelation is f(−y)
            GeneratorKind::FrequencyBox(b) => {
                let neg: Vec<f64> = y.iter().map(|t| -t).collect();
                b.spatial(&neg)
            }
            GeneratorKind::Sinc => Complex64::new(y.iter().map(|&t| sinc(t)).product(), 0.0),
            GeneratorKind::BSpline { order } => Complex64::new(
                y.iter().map(|&t| cardinal_bspline(2 * order + 1, t)).product(),
                0.0,
            ),
            GeneratorKind::Gaussian { width } => {
                let r2: f64 = y.iter().map(|t| t * t).sum();
                let amp = (width / 2f64.sqrt()).powi(d);
                Complex64::new(amp * (-PI * r2 / (2.0 * width * width)).exp(), 0.0)
            }
            GeneratorKind::SampledSpatial(_) => {
                let osc = y.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
                let tol = 1e-13 * self.decay_bound().map_or(1.0, |b| b.peak());
                self.frequency_integral(&[], osc, tol, |xi| {
                    let phase: f64 = xi.iter().zip(y).map(|(a, b)| a * b).sum();
                    self.eval_fourier(xi).norm_sqr() * Complex64::from_polar(1.0, -2.0 * PI * phase)
                })
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            }
            GeneratorKind::TranslateCombination { base, terms } => {
                let mut z = vec![0.0; self.dim];
                let mut acc = Complex64::new(0.0, 0.0);
                for (aj, sj) in terms {
                    for (al, sl) in terms {
                        for i in 0..self.dim {
                            z[i] = y[i] + sj[i] - sl[i];
                        }
                        acc += aj * al.conj() * base.autocorrelation_at(&z);
                    }
                }
                acc
            }
        }
    }

    /// Envelope for `|f̂|²`, or `None` when no certified decay is known.
    pub fn decay_bound(&self) -> Option<DecayBound> {
        let d = self.dim as i32;
        match &self.kind {
            GeneratorKind::FrequencyBox(b) => Some(DecayBound::CompactFrequencySupport {
                radius: b.support_radius(),
                peak: 1.0,
            }),
            GeneratorKind::Sinc => Some(DecayBound::CompactFrequencySupport {
                radius: 0.5,
                peak: 1.0,
            }),
            GeneratorKind::BSpline { order } => {
                // every factor is ≤ 1 and the largest coordinate's factor is ≤ (π r)^{-p}
                let p = 2.0 * (*order + 1) as f64;
                Some(DecayBound::Polynomial {
                    order: p,
                    constant: PI.powf(-p),
                    peak: 1.0,
                })
            }
            GeneratorKind::Gaussian { width } => Some(DecayBound::Gaussian {
                rate: 2.0 * PI * width * width,
                constant: width.powi(2 * d),
            }),
            GeneratorKind::SampledSpatial(s) => s.band_limit.map(|radius| {
                let l1: f64 = s.samples.iter().map(|(_, v)| v.norm()).sum::<f64>() * s.step.powi(d);
                DecayBound::CompactFrequencySupport {
                    radius,
                    peak: l1 * l1,
                }
            }),
            GeneratorKind::TranslateCombination { base, terms } => {
                let w: f64 = terms.iter().map(|(a, _)| a.norm()).sum();
                base.decay_bound().map(|b| b.scaled(w * w))
            }
        }
    }

    pub fn is_compactly_supported(&self) -> bool {
        match &self.kind {
            GeneratorKind::BSpline { .. } | GeneratorKind::SampledSpatial(_) => true,
            GeneratorKind::TranslateCombination { base, .. } => base.is_compactly_supported(),
            _ => false,
        }
    }

    /// Sup-norm radius outside which `f` vanishes (compact kinds) or is below
    /// `1e-17` relative to its peak (Gaussian). `None` for slowly decaying `f`.
    pub fn spatial_radius(&self) -> Option<f64> {
        match &self.kind {
            GeneratorKind::BSpline { order } => Some((order + 1) as f64 / 2.0),
            GeneratorKind::Gaussian { width } => Some(width * (17.0 * 10f64.ln() / PI).sqrt()),
            GeneratorKind::SampledSpatial(s) => Some(s.spatial_radius()),
            GeneratorKind::TranslateCombination { base, terms } => {
                let shift = terms
                    .iter()
                    .map(|(_, s)| s.iter().fold(0.0_f64, |m, x| m.max(x.abs())))
                    .fold(0.0, f64::max);
                base.spatial_radius().map(|r| r + shift)
            }
            GeneratorKind::FrequencyBox(_) | GeneratorKind::Sinc => None,
        }
    }

    /// Points along `axis` where `f` is not smooth.
    pub(crate) fn spatial_breakpoints(&self, axis: usize) -> Vec<f64> {
        match &self.kind {
            GeneratorKind::BSpline { order } => {
                let half = (order + 1) as f64 / 2.0;
                (0..=order + 1).map(|i| -half + i as f64).collect()
            }
            GeneratorKind::SampledSpatial(s) => {
                let mut v: Vec<f64> = s.samples.iter().map(|(i, _)| s.position(i)[axis]).collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            }
            GeneratorKind::TranslateCombination { base, terms } => {
                let b = base.spatial_breakpoints(axis);
                terms
                    .iter()
                    .flat_map(|(_, s)| b.iter().map(move |x| x + s[axis]))
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    /// Points along `axis` where `f̂` jumps.
    pub(crate) fn frequency_breakpoints(&self, axis: usize) -> Vec<f64> {
        match &self.kind {
            GeneratorKind::FrequencyBox(b) => b.breakpoints(axis),
            GeneratorKind::Sinc => vec![-0.5, 0.5],
            GeneratorKind::SampledSpatial(s) => s
                .band_limit
                .map(|b| vec![-b, b])
                .unwrap_or_default(),
            GeneratorKind::TranslateCombination { base, .. } => base.frequency_breakpoints(axis),
            _ => Vec::new(),
        }
    }

    /// Panel width that resolves the oscillation of `f̂` itself.
    fn frequency_panel_width(&self) -> f64 {
        match &self.kind {
            GeneratorKind::FrequencyBox(_) | GeneratorKind::Sinc => 0.5,
            GeneratorKind::BSpline { .. } => 1.0,
            GeneratorKind::Gaussian { width } => 0.5 / width.max(1.0),
            GeneratorKind::SampledSpatial(s) => 0.5 / (s.diameter() + 1.0),
            GeneratorKind::TranslateCombination { base, terms } => {
                let shift = terms
                    .iter()
                    .map(|(_, s)| s.iter().fold(0.0_f64, |m, x| m.max(x.abs())))
                    .fold(0.0, f64::max);
                base.frequency_panel_width().min(1.0 / (2.0 * shift).max(1.0))
            }
        }
    }

    /// `∫ integrand(ξ) dξ` over the frequency region where `self` and every
    /// generator in `others` are non-negligible. The integrand is assumed to be
    /// bounded by the product of the generators' envelopes times a bounded
    /// weight oscillating at most at spatial scale `oscillation`; `tail_tol` is
    /// the admissible tail mass of that envelope product.
    pub(crate) fn frequency_integral<F>(
        &self,
        others: &[&Generator],
        oscillation: f64,
        tail_tol: f64,
        integrand: F,
    ) -> Result<Complex64>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let mut bound = self
            .frequency_region_bound()
            .ok_or_else(|| Error::NoDecayInfo(self.tag()))?;
        let mut width = self.frequency_panel_width();
        let mut gens: Vec<&Generator> = vec![self];
        for g in others {
            if g.dim != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: g.dim,
                });
            }
            let b = g
                .frequency_region_bound()
                .ok_or_else(|| Error::NoDecayInfo(g.tag()))?;
            bound = bound.geometric_mean(&b);
            width = width.min(g.frequency_panel_width());
            gens.push(g);
        }
        if others.is_empty() {
            // integrand scales like |f̂|², which is the envelope itself
        } else if others.len() == 1 {
            // geometric mean already bounds |ĝ||ĥ|
        }
        // a 16-node panel spanning one period of the oscillatory factor is exact to ~1e-18
        width = width.min(1.0 / oscillation.max(1.0));
        let radius = bound.radius_for(tail_tol, self.dim);
        let count = (2.0 * radius / width).ceil() * 16.0;
        if count.powi(self.dim as i32) > 2e9 {
            return Err(Error::InvalidParameter(format!(
                "frequency quadrature over radius {radius:.3e} is too large in d = {}",
                self.dim
            )));
        }
        let axes: Vec<Vec<(f64, f64)>> = (0..self.dim)
            .map(|axis| {
                let mut breaks: Vec<f64> = gens
                    .iter()
                    .flat_map(|g| g.frequency_breakpoints(axis))
                    .collect();
                breaks.sort_by(f64::total_cmp);
                breaks.dedup();
                quadrature::axis_rule(-radius, radius, width, &breaks)
            })
            .collect();
        Ok(quadrature::integrate(&axes, integrand))
    }

    /// Decay bound used to size quadrature regions. Unlike
    /// [`decay_bound`](Self::decay_bound), sampled data without a band limit
    /// falls back to its Nyquist box.
    fn frequency_region_bound(&self) -> Option<DecayBound> {
        match &self.kind {
            GeneratorKind::SampledSpatial(s) => {
                let l1: f64 =
                    s.samples.iter().map(|(_, v)| v.norm()).sum::<f64>() * s.step.powi(self.dim as i32);
                Some(DecayBound::CompactFrequencySupport {
                    radius: s.frequency_radius(),
                    peak: l1 * l1,
                })
            }
            GeneratorKind::TranslateCombination { base, terms } => {
                let w: f64 = terms.iter().map(|(a, _)| a.norm()).sum();
                base.frequency_region_bound().map(|b| b.scaled(w * w))
            }
            _ => self.decay_bound(),
        }
    }

    /// `∫_{ℝ^d} f(x) dx` by tensor Gauss–Legendre over the spatial support.
    pub(crate) fn spatial_integral(&self) -> Result<Complex64> {
        if let GeneratorKind::SampledSpatial(s) = &self.kind {
            // the multilinear interpolant integrates to the Riemann sum
            let sum: Complex64 = s.samples.iter().map(|(_, v)| *v).sum();
            return Ok(sum * s.step.powi(self.dim as i32));
        }
        let radius = self
            .spatial_radius()
            .ok_or_else(|| Error::NoDecayInfo(format!("spatial decay of {}", self.tag())))?;
        let axes: Vec<Vec<(f64, f64)>> = (0..self.dim)
            .map(|axis| {
                quadrature::axis_rule(-radius, radius, 0.5, &self.spatial_breakpoints(axis))
            })
            .collect();
        Ok(quadrature::integrate(&axes, |x| self.eval_spatial(x)))
    }
}

fn modulation(terms: &[(Complex64, Vec<f64>)], xi: &[f64]) -> Complex64 {
    terms
        .iter()
        .map(|(a, s)| {
            let phase: f64 = s.iter().zip(xi).map(|(p, q)| p * q).sum();
            a * Complex64::from_polar(1.0, -2.0 * PI * phase)
        })
        .sum()
}

/// Certified upper bound on
/// `sup_{γ∈[0,1)^d} (1/|det A|) Σ_{‖k‖_∞>K} |f̂((A^T)^{-1}(γ+k))|²`.
///
/// Shell `j = ‖k‖_∞` holds `(2j+1)^d − (2j−1)^d` indices, each with
/// `‖γ+k‖_∞ ≥ j−1` and hence `‖ξ‖_∞ ≥ (j−1)/‖A^T‖_∞`.
pub fn tail_bound(g: &Generator, lattice: &LatticeSpec, radius: usize) -> Result<f64> {
    if lattice.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            found: g.dim(),
        });
    }
    if radius < 1 {
        return Err(Error::InvalidParameter("tail bound needs K >= 1".into()));
    }
    let bound = g
        .decay_bound()
        .ok_or_else(|| Error::NoDecayInfo(format!("{} (supply a band limit)", g.tag())))?;
    let d = g.dim() as i32;
    let s = 1.0 / lattice.transpose_inf_norm();
    let scale = 1.0 / lattice.det_abs();
    let shell = |j: f64| (2.0 * j + 1.0).powi(d) - (2.0 * j - 1.0).powi(d);
    let term = |j: usize| {
        let j = j as f64;
        shell(j) * bound.envelope(s * (j - 1.0))
    };
    let k = radius;
    let total = match bound {
        DecayBound::CompactFrequencySupport { radius: rs, .. } => {
            // excluded terms have ‖ξ‖_∞ > K·s
            if k as f64 * s >= rs {
                0.0
            } else {
                let last = (rs / s).floor() as usize + 1;
                (k + 1..=last).map(term).sum()
            }
        }
        DecayBound::Polynomial {
            order, constant, ..
        } => {
            const EXPLICIT: usize = 2048;
            let stop = k + EXPLICIT;
            let explicit: f64 = (k + 1..=stop).map(term).sum();
            // Σ_{j>J} term(j) ≤ ∫_J^∞ u, with u(x) = 2d·5^{d−1}·C·(s(x−1))^{−p} ≥ term
            let dd = d as f64;
            if order <= dd {
                f64::INFINITY
            } else {
                let c = 2.0 * dd * 5f64.powi(d - 1) * constant * s.powf(-order);
                explicit + c * ((stop - 1) as f64).powf(dd - order) / (order - dd)
            }
        }
        DecayBound::Gaussian { .. } => {
            // terms decay super-geometrically; once the ratio drops below 1/2
            // the remainder is bounded by the last term
            let mut acc = 0.0;
            let mut j = k + 1;
            loop {
                let t = term(j);
                let next = term(j + 1);
                acc += t;
                if t == 0.0 || next <= 0.5 * t {
                    acc += t;
                    break;
                }
                j += 1;
                if j > k + 1_000_000 {
                    acc = f64::INFINITY;
                    break;
                }
            }
            acc
        }
    };
    Ok(scale * total)
}
