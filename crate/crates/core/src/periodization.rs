//! Grids of `Φ_f^A(γ) = (1/|det A|) Σ_k |f̂((A^T)^{-1}(γ+k))|²` on `[0,1)^d`,
//! spatial periodizations over `Q_A`, and the Fourier coefficients of `Φ`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::generator::{tail_bound, Generator};
use crate::lattice::{as_f64, index_box, mat_vec, LatticeSpec};

/// Truncation radius cap per dimension.
pub fn default_radius_cap(dim: usize) -> usize {
    match dim {
        1 => 10_000,
        2 => 1_000,
        _ => 100,
    }
}

/// Grid sizes above this many points are rejected.
pub const MAX_GRID_POINTS: usize = 1 << 24;

const PILOT_RADIUS: usize = 8;
const PILOT_GRID: usize = 64;

/// Relative target for the truncation tail against the pilot maximum.
pub const DEFAULT_TAIL_FACTOR: f64 = 1e-10;

/// `N` must be a power of two, at least 2.
pub fn check_grid(n: usize, dim: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidGrid(n));
    }
    match n.checked_pow(dim as u32) {
        Some(total) if total <= MAX_GRID_POINTS => Ok(()),
        _ => Err(Error::InvalidParameter(format!(
            "grid {n}^{dim} exceeds {MAX_GRID_POINTS} points"
        ))),
    }
}

/// Frequency offsets `(A^T)^{-1} k` for `‖k‖_∞ ≤ K`, in lexicographic order.
pub(crate) struct DualShifts {
    dual: nalgebra::DMatrix<f64>,
    scale: f64,
    shifts: Vec<Vec<f64>>,
}

impl DualShifts {
    pub(crate) fn new(lattice: &LatticeSpec, radius: usize) -> Self {
        let shifts = index_box(lattice.dim(), radius)
            .iter()
            .map(|k| mat_vec(lattice.dual_basis(), &as_f64(k)))
            .collect();
        Self {
            dual: lattice.dual_basis().clone(),
            scale: 1.0 / lattice.det_abs(),
            shifts,
        }
    }

    /// `(1/|det A|) Σ_k term((A^T)^{-1}(γ+k))`, summed in index order.
    pub(crate) fn sum<T, F>(&self, gamma: &[f64], term: F) -> T
    where
        T: std::ops::AddAssign + std::ops::Mul<f64, Output = T> + Default,
        F: Fn(&[f64]) -> T,
    {
        let base = mat_vec(&self.dual, gamma);
        let mut xi = vec![0.0; base.len()];
        let mut acc = T::default();
        for s in &self.shifts {
            for i in 0..xi.len() {
                xi[i] = base[i] + s[i];
            }
            acc += term(&xi);
        }
        acc * self.scale
    }
}

/// `Φ_f^A(γ)` truncated to `‖k‖_∞ ≤ radius`.
pub fn phi_value(g: &Generator, lattice: &LatticeSpec, radius: usize, gamma: &[f64]) -> f64 {
    DualShifts::new(lattice, radius).sum(gamma, |xi| g.fourier_norm_sqr(xi))
}

/// How to re-evaluate `Φ` off the grid.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum PhiSource {
    Direct { generator: Generator, radius: usize },
    Perturbed { base: Box<PhiSource>, n: Vec<i64> },
}

impl PhiSource {
    fn evaluate(&self, lattice: &LatticeSpec, gamma: &[f64]) -> f64 {
        match self {
            PhiSource::Direct { generator, radius } => phi_value(generator, lattice, *radius, gamma),
            PhiSource::Perturbed { base, n } => {
                perturbation_factor(gamma, n) * base.evaluate(lattice, gamma)
            }
        }
    }
}

/// `|1 + e^{−2πi γ·n}|² = 2 + 2cos(2π γ·n)`.
pub fn perturbation_factor(gamma: &[f64], n: &[i64]) -> f64 {
    let t: f64 = gamma.iter().zip(n).map(|(g, &k)| g * k as f64).sum();
    2.0 + 2.0 * (2.0 * PI * t).cos()
}

/// Samples of `Φ_f^A` at `γ_j = j/N`, `j ∈ {0..N−1}^d`, stored with the
/// first coordinate varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodizationTable {
    lattice: LatticeSpec,
    grid_res: usize,
    values: Vec<f64>,
    trunc_radius: usize,
    tail: f64,
    generator_tag: String,
    source: Option<PhiSource>,
}

impl PeriodizationTable {
    /// A table from precomputed values; `values.len()` must be `N^d`.
    pub fn from_values(
        lattice: LatticeSpec,
        grid_res: usize,
        values: Vec<f64>,
        trunc_radius: usize,
        tail: f64,
        generator_tag: String,
    ) -> Result<Self> {
        check_grid(grid_res, lattice.dim())?;
        let expected = grid_res.pow(lattice.dim() as u32);
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) || !tail.is_finite() {
            return Err(Error::NonFinite);
        }
        if values.iter().any(|&v| v < 0.0) || tail < 0.0 {
            return Err(Error::InvalidParameter("periodization values must be nonnegative".into()));
        }
        Ok(Self {
            lattice,
            grid_res,
            values,
            trunc_radius,
            tail,
            generator_tag,
            source: None,
        })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn grid_res(&self) -> usize {
        self.grid_res
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn trunc_radius(&self) -> usize {
        self.trunc_radius
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn generator_tag(&self) -> &str {
        &self.generator_tag
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid index `j` of the flat position `flat`.
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        multi_index(flat, self.grid_res, self.dim())
    }

    /// Flat position of grid index `j` (taken modulo `N`).
    pub fn flat_index(&self, j: &[usize]) -> usize {
        j.iter().fold(0, |acc, &x| acc * self.grid_res + x % self.grid_res)
    }

    /// `γ_j = j/N`.
    pub fn gamma(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .map(|&j| j as f64 / self.grid_res as f64)
            .collect()
    }

    /// Grid mean, the periodic rectangle rule for `∫_{[0,1)^d} Φ`.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Off-grid value of `Φ` with the table's truncation, when the table
    /// records how it was computed.
    pub fn evaluate(&self, gamma: &[f64]) -> Option<f64> {
        self.source.as_ref().map(|s| s.evaluate(&self.lattice, gamma))
    }

    pub fn can_evaluate(&self) -> bool {
        self.source.is_some()
    }

    /// Writes `gamma_1,...,gamma_d,phi` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.dim()).map(|i| format!("gamma_{i}")).collect();
        header.push("phi".into());
        let io = |e: csv::Error| Error::InvalidParameter(format!("csv output: {e}"));
        w.write_record(&header).map_err(io)?;
        for (flat, v) in self.values.iter().enumerate() {
            let mut row: Vec<String> = self.gamma(flat).iter().map(|g| fmt_num(*g)).collect();
            row.push(fmt_num(*v));
            w.write_record(&row).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidParameter(format!("csv output: {e}")))?;
        Ok(())
    }

    /// Metadata plus the value array.
    pub fn to_json(&self) -> Value {
        json!({
            "generator": self.generator_tag,
            "lattice": self.lattice.rows(),
            "dim": self.dim(),
            "grid_res": self.grid_res,
            "trunc_radius": self.trunc_radius,
            "tail": round_sig(self.tail),
            "values": self.values.iter().map(|v| round_sig(*v)).collect::<Vec<_>>(),
        })
    }
}

fn multi_index(flat: usize, n: usize, dim: usize) -> Vec<usize> {
    let mut idx = vec![0; dim];
    let mut rem = flat;
    for i in (0..dim).rev() {
        idx[i] = rem % n;
        rem /= n;
    }
    idx
}

/// Rounds to 12 significant digits, so that reports are stable across
/// platforms and summation noise.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub(crate) fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

/// Smallest `K ≤ cap` with `tail_bound(K) ≤ target`, and that tail.
pub fn select_radius(g: &Generator, lattice: &LatticeSpec, target: f64, cap: usize) -> Result<(usize, f64)> {
    if !(target > 0.0) {
        return Err(Error::InvalidParameter(format!("target tail must be positive, got {target}")));
    }
    let t1 = tail_bound(g, lattice, 1)?;
    if t1 <= target {
        return Ok((1, t1));
    }
    let tcap = tail_bound(g, lattice, cap)?;
    if tcap > target {
        return Err(Error::TailNotAchievable { target, cap });
    }
    // invariant: tail(lo) > target >= tail(hi)
    let (mut lo, mut hi) = (1usize, cap);
    let mut probe = 2usize;
    while probe < cap {
        if tail_bound(g, lattice, probe)? <= target {
            hi = probe;
            break;
        }
        lo = probe;
        probe *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail_bound(g, lattice, mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, tail_bound(g, lattice, hi)?))
}

fn grid_values(g: &Generator, lattice: &LatticeSpec, radius: usize, n: usize) -> Vec<f64> {
    let dim = lattice.dim();
    let shifts = DualShifts::new(lattice, radius);
    (0..n.pow(dim as u32))
        .into_par_iter()
        .map(|flat| {
            let gamma: Vec<f64> = multi_index(flat, n, dim)
                .iter()
                .map(|&j| j as f64 / n as f64)
                .collect();
            shifts.sum(&gamma, |xi| g.fourier_norm_sqr(xi))
        })
        .collect()
}

/// Tabulates `Φ_f^A` on the `N^d` grid. `K` is the smallest radius whose
/// certified tail is at most `target_tail`; when no target is given it is
/// `1e-10` times the maximum of a pilot pass at `K = 8`.
pub fn compute_phi(
    g: &Generator,
    lattice: &LatticeSpec,
    grid_res: usize,
    target_tail: Option<f64>,
) -> Result<PeriodizationTable> {
    compute_phi_capped(g, lattice, grid_res, target_tail, default_radius_cap(lattice.dim()))
}

/// [`compute_phi`] with an explicit truncation radius cap.
pub fn compute_phi_capped(
    g: &Generator,
    lattice: &LatticeSpec,
    grid_res: usize,
    target_tail: Option<f64>,
    cap: usize,
) -> Result<PeriodizationTable> {
    if g.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            found: g.dim(),
        });
    }
    check_grid(grid_res, lattice.dim())?;
    // surfaces missing decay information before any grid work
    tail_bound(g, lattice, 1)?;
    let target = match target_tail {
        Some(t) => t,
        None => {
            let pilot = grid_values(g, lattice, PILOT_RADIUS, grid_res.min(PILOT_GRID));
            let peak = pilot.iter().copied().fold(0.0, f64::max);
            if peak <= 0.0 {
                return Err(Error::ZeroGenerator(peak));
            }
            DEFAULT_TAIL_FACTOR * peak
        }
    };
    let (radius, tail) = select_radius(g, lattice, target, cap)?;
    Ok(compute_phi_with_radius(g, lattice, grid_res, radius, tail))
}

/// Tabulates `Φ_f^A` at a fixed truncation radius with a caller-supplied tail.
pub(crate) fn compute_phi_with_radius(
    g: &Generator,
    lattice: &LatticeSpec,
    grid_res: usize,
    radius: usize,
    tail: f64,
) -> PeriodizationTable {
    PeriodizationTable {
        lattice: lattice.clone(),
        grid_res,
        values: grid_values(g, lattice, radius, grid_res),
        trunc_radius: radius,
        tail,
        generator_tag: g.tag(),
        source: Some(PhiSource::Direct {
            generator: g.clone(),
            radius,
        }),
    }
}

/// Result of [`periodize_l1`].
#[derive(Debug, Clone, PartialEq)]
pub struct L1Periodization {
    /// `ψ(x_j) = Σ_{‖k‖_∞≤K} f(x_j + Ak)`.
    pub values: Vec<Complex64>,
    /// `(∫_{Q_A} ψ, ∫_{ℝ^d} f)`.
    pub integral_check: (Complex64, Complex64),
}

/// Points per axis of the rectangle rule over `Q_A`.
pub const L1_QUADRATURE_POINTS: usize = 64;

fn spatial_periodization(g: &Generator, lattice: &LatticeSpec, radius: usize, x: &[f64]) -> Complex64 {
    let mut y = vec![0.0; x.len()];
    let mut acc = Complex64::new(0.0, 0.0);
    for k in index_box(lattice.dim(), radius) {
        let shift = lattice.spatial_point(&k);
        for i in 0..y.len() {
            y[i] = x[i] + shift[i];
        }
        acc += g.eval_spatial(&y);
    }
    acc
}

/// Λ-periodization `ψ(x) = Σ_{‖k‖_∞≤K} f(x + Ak)` at `points`, with the
/// pair of integrals whose equality expresses absolute convergence over `Q_A`.
pub fn periodize_l1(
    g: &Generator,
    lattice: &LatticeSpec,
    points: &[Vec<f64>],
    radius: usize,
) -> Result<L1Periodization> {
    let dim = lattice.dim();
    if g.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: g.dim(),
        });
    }
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.len(),
        });
    }
    let full = g.spatial_integral()?;
    let values = points
        .par_iter()
        .map(|x| spatial_periodization(g, lattice, radius, x))
        .collect();
    // Q_A = A[0,1)^d; ψ∘A is Z^d-periodic, so the rectangle rule in u is periodic
    let n = L1_QUADRATURE_POINTS;
    let cells = n.pow(dim as u32);
    let partial: Vec<Complex64> = (0..cells)
        .into_par_iter()
        .map(|flat| {
            let u: Vec<f64> = multi_index(flat, n, dim)
                .iter()
                .map(|&j| j as f64 / n as f64)
                .collect();
            spatial_periodization(g, lattice, radius, &lattice.to_spatial(&u))
        })
        .collect();
    let over_cell = partial.into_iter().sum::<Complex64>() * lattice.det_abs() / cells as f64;
    Ok(L1Periodization {
        values,
        integral_check: (over_cell, full),
    })
}

/// `c_n = ⟨f, T_{−An} f⟩ = ∫ f(x) conj(f(x + An)) dx`, the `n`-th Fourier
/// coefficient of `Φ_f^A`.
pub fn autocorrelation(g: &Generator, lattice: &LatticeSpec, n: &[i64]) -> Result<Complex64> {
    if g.dim() != lattice.dim() || n.len() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            found: if g.dim() != lattice.dim() { g.dim() } else { n.len() },
        });
    }
    let v = g.autocorrelation_at(&lattice.spatial_point(n));
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::NoDecayInfo(g.tag()));
    }
    Ok(v)
}

/// Coefficients `c_n` for `‖n‖_∞ ≤ n_max`, in lexicographic order of `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    dim: usize,
    n_max: usize,
    entries: Vec<(Vec<i64>, Complex64)>,
}

impl CoefficientTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(Vec<i64>, Complex64)] {
        &self.entries
    }

    pub fn get(&self, n: &[i64]) -> Option<Complex64> {
        if n.len() != self.dim || n.iter().any(|x| x.unsigned_abs() as usize > self.n_max) {
            return None;
        }
        let m = 2 * self.n_max as i64 + 1;
        let flat = n.iter().fold(0i64, |acc, &x| acc * m + x + self.n_max as i64);
        Some(self.entries[flat as usize].1)
    }
}

/// Discrete Fourier sums `(1/N^d) Σ_j Φ(γ_j) e^{−2πi γ_j·n}`.
pub fn phi_fourier_coeffs(table: &PeriodizationTable, n_max: usize) -> Result<CoefficientTable> {
    let n = table.grid_res();
    let dim = table.dim();
    if n_max > n / 4 {
        return Err(Error::AliasRisk {
            n_max,
            grid: n,
            limit: n / 4,
        });
    }
    let twiddle: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / n as f64))
        .collect();
    let m = 2 * n_max + 1;
    // separable transform, one axis at a time, keeping only |n_i| ≤ n_max
    let mut data: Vec<Complex64> = table.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut shape = vec![n; dim];
    for axis in 0..dim {
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let len = shape[axis];
        let mut next = vec![Complex64::new(0.0, 0.0); outer * m * inner];
        next.par_chunks_mut(m * inner).enumerate().for_each(|(o, chunk)| {
            for (t, freq) in (-(n_max as i64)..=n_max as i64).enumerate() {
                let f = freq.rem_euclid(n as i64) as usize;
                for i in 0..inner {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..len {
                        acc += data[(o * len + j) * inner + i] * twiddle[(j * f) % n];
                    }
                    chunk[t * inner + i] = acc;
                }
            }
        });
        data = next;
        shape[axis] = m;
    }
    let scale = 1.0 / (n as f64).powi(dim as i32);
    let entries = index_box(dim, n_max)
        .into_iter()
        .zip(data)
        .map(|(k, v)| (k, v * scale))
        .collect();
    Ok(CoefficientTable {
        dim,
        n_max,
        entries,
    })
}

/// `Φ` of `f + T_{An} f`: the table multiplied by `|1 + e^{−2πi γ·n}|²`.
pub fn perturbed_phi(table: &PeriodizationTable, n: &[i64]) -> Result<PeriodizationTable> {
    if n.len() != table.dim() {
        return Err(Error::DimensionMismatch {
            expected: table.dim(),
            found: n.len(),
        });
    }
    let values = table
        .values
        .iter()
        .enumerate()
        .map(|(flat, &v)| perturbation_factor(&table.gamma(flat), n) * v)
        .collect();
    Ok(PeriodizationTable {
        lattice: table.lattice.clone(),
        grid_res: table.grid_res,
        values,
        trunc_radius: table.trunc_radius,
        tail: 4.0 * table.tail,
        generator_tag: format!("perturbed({},n={:?})", table.generator_tag, n),
        source: table.source.as_ref().map(|s| PhiSource::Perturbed {
            base: Box::new(s.clone()),
            n: n.to_vec(),
        }),
    })
}
