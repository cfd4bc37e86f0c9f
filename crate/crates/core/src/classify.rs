//! Verdicts on `τ_A(f)` from the range of `Φ_f^A`, and the same decision
//! tree applied to weighted exponentials and perturbed generators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::lattice::LatticeSpec;
use crate::periodization::{perturbation_factor, perturbed_phi, PeriodizationTable};

/// Relative size of a grid step that counts as a jump.
pub const JUMP_FRACTION: f64 = 0.5;
/// Default `eps_zero` relative to `sup_all`.
pub const DEFAULT_EPS_ZERO_FACTOR: f64 = 1e-8;
/// Default `eps_frame` relative to `sup_all`.
pub const DEFAULT_EPS_FRAME_FACTOR: f64 = 1e-4;
pub const DEFAULT_CLASS_TOL: f64 = 1e-6;
/// Grid maxima above this are reported as unbounded.
pub const DEFAULT_CEILING: f64 = 1e12;
/// Jumps beyond this count are excluded but not refined.
const MAX_REFINED_JUMPS: usize = 4096;
const BISECTION_STEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    NotBessel,
    BesselNotFrameSeq,
    FrameSequence,
    RieszSequence,
    ParsevalFrameSequence,
    OrthonormalSequence,
}

impl Verdict {
    pub fn is_bessel(self) -> bool {
        self != Verdict::NotBessel
    }

    pub fn is_frame_sequence(self) -> bool {
        !matches!(self, Verdict::NotBessel | Verdict::BesselNotFrameSeq)
    }

    pub fn is_riesz(self) -> bool {
        matches!(self, Verdict::RieszSequence | Verdict::OrthonormalSequence)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NotBessel => "NotBessel",
            Verdict::BesselNotFrameSeq => "BesselNotFrameSeq",
            Verdict::FrameSequence => "FrameSequence",
            Verdict::RieszSequence => "RieszSequence",
            Verdict::ParsevalFrameSequence => "ParsevalFrameSequence",
            Verdict::OrthonormalSequence => "OrthonormalSequence",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One side of a located jump of `Φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryValue {
    pub gamma: Vec<f64>,
    pub value: f64,
}

/// Grid estimates of the essential range of `Φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBounds {
    /// Grid maximum plus the truncation tail.
    pub sup_all: f64,
    pub inf_all: f64,
    /// Minimum over retained points with `Φ ≥ eps_zero`.
    pub inf_offzero: f64,
    /// Fraction of all grid points with `Φ < eps_zero`.
    pub zero_fraction: f64,
    pub eps_zero: f64,
    pub grid_res: usize,
    pub trunc_radius: usize,
    pub tail: f64,
    /// Grid points dropped for being adjacent to a jump.
    pub excluded_points: usize,
    /// One-sided limits at refined jumps; empty when the table cannot be
    /// evaluated off the grid.
    pub boundary: Vec<BoundaryValue>,
}

/// Options for [`classify`] and friends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Zero-detection threshold; defaults to `1e-8·sup_all`.
    pub eps_zero: Option<f64>,
    pub class_tol: f64,
    pub eps_frame_factor: f64,
    pub ceiling: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            eps_zero: None,
            class_tol: DEFAULT_CLASS_TOL,
            eps_frame_factor: DEFAULT_EPS_FRAME_FACTOR,
            ceiling: DEFAULT_CEILING,
        }
    }
}

/// A verdict with the evidence it rests on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub zero_fraction: f64,
    pub grid_res: usize,
    pub trunc_radius: usize,
    pub tail: f64,
    pub eps_zero: f64,
    pub class_tol: f64,
}

struct Grid<'a> {
    values: &'a [f64],
    n: usize,
    dim: usize,
    tail: f64,
    trunc_radius: usize,
    eval: Option<&'a dyn Fn(&[f64]) -> f64>,
}

fn neighbor(flat: usize, axis: usize, n: usize, dim: usize) -> usize {
    let stride = n.pow((dim - 1 - axis) as u32);
    let j = (flat / stride) % n;
    if j + 1 == n {
        flat - j * stride
    } else {
        flat + stride
    }
}

fn gamma_of(flat: usize, n: usize, dim: usize) -> Vec<f64> {
    let mut g = vec![0.0; dim];
    let mut rem = flat;
    for i in (0..dim).rev() {
        g[i] = (rem % n) as f64 / n as f64;
        rem /= n;
    }
    g
}

/// Bisects the segment from `a` along `axis` by one cell for the jump and
/// returns the values just left and right of it.
fn refine_jump(
    eval: &dyn Fn(&[f64]) -> f64,
    a: &[f64],
    axis: usize,
    n: usize,
    va: f64,
    vb: f64,
) -> [BoundaryValue; 2] {
    let mut lo = a[axis];
    let mut hi = a[axis] + 1.0 / n as f64;
    let mut point = a.to_vec();
    let mut vlo = va;
    let mut vhi = vb;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        point[axis] = mid;
        let vm = eval(&point);
        if (vm - va).abs() <= (vm - vb).abs() {
            lo = mid;
            vlo = vm;
        } else {
            hi = mid;
            vhi = vm;
        }
    }
    let mut left = a.to_vec();
    left[axis] = lo;
    let mut right = a.to_vec();
    right[axis] = hi;
    [
        BoundaryValue {
            gamma: left,
            value: vlo,
        },
        BoundaryValue {
            gamma: right,
            value: vhi,
        },
    ]
}

fn grid_bounds(grid: &Grid, eps_zero: Option<f64>) -> Result<SpectralBounds> {
    let values = grid.values;
    if values.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite);
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    let sup_all = max + grid.tail;
    let min_eps = 4.0 * grid.tail;
    let eps = match eps_zero {
        Some(e) => e,
        None => (DEFAULT_EPS_ZERO_FACTOR * sup_all).max(min_eps).max(f64::MIN_POSITIVE),
    };
    if !(eps > 0.0) || eps < min_eps {
        return Err(Error::EpsilonTooSmall { eps, min: min_eps });
    }

    let threshold = JUMP_FRACTION * max;
    let mut excluded = vec![false; values.len()];
    let mut jumps = Vec::new();
    if max.is_finite() && max > 0.0 {
        for flat in 0..values.len() {
            for axis in 0..grid.dim {
                let nb = neighbor(flat, axis, grid.n, grid.dim);
                if (values[nb] - values[flat]).abs() > threshold {
                    excluded[flat] = true;
                    excluded[nb] = true;
                    jumps.push((flat, axis, nb));
                }
            }
        }
    }
    let mut boundary = Vec::new();
    if let Some(eval) = grid.eval {
        if jumps.len() <= MAX_REFINED_JUMPS {
            for &(flat, axis, nb) in &jumps {
                let a = gamma_of(flat, grid.n, grid.dim);
                boundary.extend(refine_jump(eval, &a, axis, grid.n, values[flat], values[nb]));
            }
        }
    }

    let excluded_points = excluded.iter().filter(|&&e| e).count();
    let keep_all = excluded_points == values.len();
    let retained = || {
        values
            .iter()
            .zip(&excluded)
            .filter(move |(_, &e)| keep_all || !e)
            .map(|(&v, _)| v)
            .chain(boundary.iter().map(|b| b.value))
    };
    let inf_all = retained().fold(f64::INFINITY, f64::min);
    let inf_offzero = retained()
        .filter(|&v| v >= eps)
        .fold(f64::INFINITY, f64::min);
    let zeros = values.iter().filter(|&&v| v < eps).count();
    let zero_fraction = zeros as f64 / values.len() as f64;
    let boundary_max = boundary.iter().map(|b| b.value).fold(0.0, f64::max);
    Ok(SpectralBounds {
        sup_all: sup_all.max(boundary_max + grid.tail),
        inf_all,
        inf_offzero: if zero_fraction == 0.0 { inf_all } else { inf_offzero },
        zero_fraction,
        eps_zero: eps,
        grid_res: grid.n,
        trunc_radius: grid.trunc_radius,
        tail: grid.tail,
        excluded_points,
        boundary,
    })
}

/// Grid extrema, zero fraction and jump-refined limits of `Φ`.
/// `eps_zero` defaults to `1e-8·sup_all` and must be at least `4·tail`.
pub fn spectral_bounds(table: &PeriodizationTable, eps_zero: Option<f64>) -> Result<SpectralBounds> {
    let eval = |g: &[f64]| table.evaluate(g).unwrap_or(f64::NAN);
    let grid = Grid {
        values: table.values(),
        n: table.grid_res(),
        dim: table.dim(),
        tail: table.tail(),
        trunc_radius: table.trunc_radius(),
        eval: if table.can_evaluate() { Some(&eval) } else { None },
    };
    grid_bounds(&grid, eps_zero)
}

/// Decision tree on estimated bounds.
pub fn classify_translates(bounds: &SpectralBounds, class_tol: f64) -> Classification {
    classify_with(
        bounds,
        &ClassifyOptions {
            class_tol,
            ..Default::default()
        },
    )
}

fn classify_with(bounds: &SpectralBounds, opts: &ClassifyOptions) -> Classification {
    let mut out = Classification {
        verdict: Verdict::NotBessel,
        lower: None,
        upper: None,
        zero_fraction: bounds.zero_fraction,
        grid_res: bounds.grid_res,
        trunc_radius: bounds.trunc_radius,
        tail: bounds.tail,
        eps_zero: bounds.eps_zero,
        class_tol: opts.class_tol,
    };
    let sup = bounds.sup_all;
    if !sup.is_finite() || sup > opts.ceiling {
        return out;
    }
    out.upper = Some(sup);
    let eps_frame = opts.eps_frame_factor * sup;
    if !(bounds.inf_offzero.is_finite() && bounds.inf_offzero >= eps_frame && bounds.inf_offzero > 0.0) {
        out.verdict = Verdict::BesselNotFrameSeq;
        return out;
    }
    let lower = bounds.inf_offzero;
    out.lower = Some(lower);
    let riesz = bounds.zero_fraction == 0.0;
    let tight = (lower - 1.0).abs() <= opts.class_tol && (sup - 1.0).abs() <= opts.class_tol;
    out.verdict = match (riesz, tight) {
        (true, true) => Verdict::OrthonormalSequence,
        (false, true) => Verdict::ParsevalFrameSequence,
        (true, false) => Verdict::RieszSequence,
        (false, false) => Verdict::FrameSequence,
    };
    out
}

/// [`spectral_bounds`] followed by the decision tree.
pub fn classify(table: &PeriodizationTable, opts: &ClassifyOptions) -> Result<Classification> {
    let bounds = spectral_bounds(table, opts.eps_zero)?;
    Ok(classify_with(&bounds, opts))
}

fn grid_side(len: usize, dim: usize) -> Result<usize> {
    if dim == 0 || dim > crate::lattice::MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    let n = (len as f64).powf(1.0 / dim as f64).round() as usize;
    if n == 0 || n.pow(dim as u32) != len {
        return Err(Error::InvalidParameter(format!(
            "{len} samples do not form an N^{dim} grid"
        )));
    }
    Ok(n)
}

/// Classifies the exponential system weighted by `ψ` from samples of `ψ` on
/// the grid `j/N` of `[0,1)^d` (first coordinate slowest), using `|ψ|²` in
/// place of `Φ`.
pub fn classify_weighted_exponentials(
    psi_samples: &[Complex64],
    dim: usize,
    eps_zero: Option<f64>,
    class_tol: f64,
) -> Result<Classification> {
    let n = grid_side(psi_samples.len(), dim)?;
    let values: Vec<f64> = psi_samples.iter().map(|z| z.norm_sqr()).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let grid = Grid {
        values: &values,
        n,
        dim,
        tail: 0.0,
        trunc_radius: 0,
        eval: None,
    };
    let bounds = grid_bounds(&grid, eps_zero)?;
    Ok(classify_translates(&bounds, class_tol))
}

/// Outcome of [`compact_support_riesz_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct RieszCheck {
    pub is_riesz: bool,
    pub min: f64,
    /// Grid point attaining the minimum.
    pub witness: Vec<f64>,
}

/// For compactly supported `f`, `Φ` is continuous, so `τ_A(f)` is a frame
/// sequence only if it is a Riesz sequence, which holds iff `Φ` has no zero.
pub fn compact_support_riesz_check(
    g: &Generator,
    lattice: &LatticeSpec,
    table: &PeriodizationTable,
    eps_zero: Option<f64>,
) -> Result<RieszCheck> {
    if !g.is_compactly_supported() {
        return Err(Error::NotCompactlySupported);
    }
    if g.dim() != lattice.dim() || table.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            found: g.dim(),
        });
    }
    let sup = table.max() + table.tail();
    let min_eps = 4.0 * table.tail();
    let eps = eps_zero.unwrap_or_else(|| (DEFAULT_EPS_ZERO_FACTOR * sup).max(min_eps));
    if !(eps > 0.0) || eps < min_eps {
        return Err(Error::EpsilonTooSmall { eps, min: min_eps });
    }
    let (arg, min) = table
        .values()
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(i, m), (j, &v)| if v < m { (j, v) } else { (i, m) });
    Ok(RieszCheck {
        is_riesz: min >= eps,
        min,
        witness: table.gamma(arg),
    })
}

/// Outcome of [`perturbation_frame_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationCheck {
    /// Classification of `τ_A(f + T_{An} f)` as a frame sequence.
    pub classification: Classification,
    /// Whether `τ_A(f + T_{An} f)` is a frame for the closed span of `τ_A(f)`.
    pub frame_for_original: bool,
    /// Infimum of the perturbed `Φ` over the support of the original `Φ`.
    pub lower_on_original: f64,
    pub upper_on_original: f64,
}

/// Classifies `f + T_{An} f` and decides whether it still spans `V(f)`: the
/// factor `|1 + e^{−2πiγ·n}|²` must stay away from zero on the support of
/// the original `Φ`.
pub fn perturbation_frame_check(
    table: &PeriodizationTable,
    n: &[i64],
    eps_zero: Option<f64>,
    class_tol: f64,
) -> Result<PerturbationCheck> {
    let perturbed = perturbed_phi(table, n)?;
    let opts = ClassifyOptions {
        eps_zero: eps_zero.map(|e| e.max(4.0 * perturbed.tail())),
        class_tol,
        ..Default::default()
    };
    let classification = classify(&perturbed, &opts)?;

    let original = spectral_bounds(table, eps_zero)?;
    let eps = original.eps_zero;
    let mut inf = f64::INFINITY;
    for (&v, &p) in table.values().iter().zip(perturbed.values()) {
        if v >= eps {
            inf = inf.min(p);
        }
    }
    for b in &original.boundary {
        if b.value >= eps {
            inf = inf.min(perturbation_factor(&b.gamma, n) * b.value);
        }
    }
    if !inf.is_finite() {
        return Err(Error::DegenerateSpan);
    }
    Ok(PerturbationCheck {
        frame_for_original: inf > eps,
        lower_on_original: inf,
        upper_on_original: perturbed.max() + perturbed.tail(),
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodization::compute_phi;
    use approx::assert_abs_diff_eq;

    fn unit() -> LatticeSpec {
        LatticeSpec::scalar(1.0).unwrap()
    }

    fn example_table(n: usize) -> PeriodizationTable {
        let g = Generator::frequency_box_dual(&unit(), vec![-1.0 / 3.0], vec![1.0 / 3.0]).unwrap();
        compute_phi(&g, &unit(), n, None).unwrap()
    }

    #[test]
    fn bounds_examples() {
        let sinc = compute_phi(&Generator::sinc(1).unwrap(), &unit(), 64, None).unwrap();
        let b = spectral_bounds(&sinc, None).unwrap();
        assert_eq!((b.sup_all, b.inf_all, b.zero_fraction), (1.0, 1.0, 0.0));

        let b = spectral_bounds(&example_table(1024), None).unwrap();
        assert_eq!(b.sup_all, 1.0);
        assert_eq!(b.inf_offzero, 1.0);
        assert!((b.zero_fraction - 1.0 / 3.0).abs() <= 2.0 / 1024.0);
        assert_eq!(b.boundary.len(), 4);
        assert!(b.inf_all <= b.inf_offzero && b.inf_offzero <= b.sup_all);

        let hat = compute_phi(&Generator::bspline(1, 1).unwrap(), &unit(), 64, None).unwrap();
        let b = spectral_bounds(&hat, None).unwrap();
        assert_abs_diff_eq!(b.inf_all, 1.0 / 3.0, epsilon = 1e-6);
        assert_abs_diff_eq!(b.sup_all, 1.0, epsilon = 1e-6);
        assert_eq!(b.zero_fraction, 0.0);
        assert_eq!(b.excluded_points, 0);
    }

    #[test]
    fn epsilon_must_dominate_tail() {
        let hat = compute_phi(&Generator::bspline(1, 1).unwrap(), &unit(), 16, Some(1e-6)).unwrap();
        assert!(matches!(
            spectral_bounds(&hat, Some(1e-7)),
            Err(Error::EpsilonTooSmall { .. })
        ));
        assert!(spectral_bounds(&hat, Some(1e-5)).is_ok());
    }

    #[test]
    fn classification_examples() {
        let opts = ClassifyOptions::default();
        let c = classify(&example_table(1024), &opts).unwrap();
        assert_eq!(c.verdict, Verdict::ParsevalFrameSequence);
        assert_eq!((c.lower, c.upper), (Some(1.0), Some(1.0)));
        assert!(!c.verdict.is_riesz());

        let sinc = compute_phi(&Generator::sinc(1).unwrap(), &unit(), 64, None).unwrap();
        assert_eq!(classify(&sinc, &opts).unwrap().verdict, Verdict::OrthonormalSequence);

        let hat = compute_phi(&Generator::bspline(1, 1).unwrap(), &unit(), 64, None).unwrap();
        let c = classify(&hat, &opts).unwrap();
        assert_eq!(c.verdict, Verdict::RieszSequence);
        assert_abs_diff_eq!(c.lower.unwrap(), 1.0 / 3.0, epsilon = 1e-6);
        assert_abs_diff_eq!(c.upper.unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn not_bessel_above_ceiling() {
        let t = PeriodizationTable::from_values(unit(), 4, vec![1.0, 2e12, 1.0, 1.0], 1, 0.0, "x".into())
            .unwrap();
        assert_eq!(classify(&t, &ClassifyOptions::default()).unwrap().verdict, Verdict::NotBessel);
    }

    #[test]
    fn weighted_exponential_examples() {
        let n = 4096;
        let ones = vec![Complex64::new(1.0, 0.0); n];
        assert_eq!(
            classify_weighted_exponentials(&ones, 1, None, 1e-6).unwrap().verdict,
            Verdict::OrthonormalSequence
        );
        let half: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(if j < n / 2 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        let c = classify_weighted_exponentials(&half, 1, None, 1e-6).unwrap();
        assert_eq!(c.verdict, Verdict::ParsevalFrameSequence);
        assert_abs_diff_eq!(c.zero_fraction, 0.5, epsilon = 1e-12);
        let ramp: Vec<Complex64> = (0..n).map(|j| Complex64::new(j as f64 / n as f64, 0.0)).collect();
        let c = classify_weighted_exponentials(&ramp, 1, Some(1e-8), 1e-6).unwrap();
        assert_eq!(c.verdict, Verdict::BesselNotFrameSeq);
        assert!(classify_weighted_exponentials(&ones[..10], 2, None, 1e-6).is_err());
    }

    #[test]
    fn compact_support_examples() {
        let hat = Generator::bspline(1, 1).unwrap();
        let t = compute_phi(&hat, &unit(), 256, None).unwrap();
        let r = compact_support_riesz_check(&hat, &unit(), &t, None).unwrap();
        assert!(r.is_riesz);
        assert_abs_diff_eq!(r.min, 1.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.witness[0], 0.5, epsilon = 1e-12);

        // the integer translates of the hat at spacing 1/2 are linearly dependent
        let half = LatticeSpec::scalar(0.5).unwrap();
        let t = compute_phi(&hat, &half, 256, None).unwrap();
        let r = compact_support_riesz_check(&hat, &half, &t, None).unwrap();
        assert!(!r.is_riesz);
        assert_abs_diff_eq!(r.witness[0], 0.5, epsilon = 1e-12);

        // spacing 2: disjoint supports make Φ ≡ ‖f‖²
        let two = LatticeSpec::scalar(2.0).unwrap();
        let t = compute_phi(&hat, &two, 256, None).unwrap();
        let r = compact_support_riesz_check(&hat, &two, &t, None).unwrap();
        assert!(r.is_riesz);
        assert_abs_diff_eq!(r.min, 2.0 / 3.0, epsilon = 1e-8);

        let sinc = Generator::sinc(1).unwrap();
        let t = compute_phi(&sinc, &unit(), 16, None).unwrap();
        assert_eq!(
            compact_support_riesz_check(&sinc, &unit(), &t, None).unwrap_err(),
            Error::NotCompactlySupported
        );
    }

    #[test]
    fn perturbation_examples() {
        let sinc = compute_phi(&Generator::sinc(1).unwrap(), &unit(), 256, None).unwrap();
        let p = perturbation_frame_check(&sinc, &[1], None, 1e-6).unwrap();
        assert!(!p.frame_for_original);

        let ex = example_table(1024);
        let p = perturbation_frame_check(&ex, &[1], None, 1e-6).unwrap();
        assert!(p.frame_for_original);
        assert_abs_diff_eq!(p.lower_on_original, 1.0, epsilon = 1e-6);

        let hat = compute_phi(&Generator::bspline(1, 1).unwrap(), &unit(), 64, None).unwrap();
        let base = classify(&hat, &ClassifyOptions::default()).unwrap();
        let p = perturbation_frame_check(&hat, &[0], None, 1e-6).unwrap();
        assert!(p.frame_for_original);
        assert_eq!(p.classification.lower, base.lower.map(|l| 4.0 * l));
        assert_abs_diff_eq!(p.classification.upper.unwrap(), 4.0 * base.upper.unwrap(), epsilon = 1e-15);
    }
}
