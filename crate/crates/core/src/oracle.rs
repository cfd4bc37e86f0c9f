//! Definition-level cross-checks: truncated Gram matrices of `τ_A(f)`,
//! synthesis norms by three independent routes, analysis coefficients and
//! orthogonal projection onto the closed span of the translates.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::classify::spectral_bounds;
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::lattice::{index_box, LatticeSpec};
use crate::periodization::{autocorrelation, select_radius, DualShifts, PeriodizationTable};
use crate::quadrature;

/// Largest Gram matrix order accepted.
pub const MAX_GRAM_ORDER: usize = 4096;
/// Default relative tolerance for span membership.
pub const DEFAULT_MEMBER_TOL: f64 = 1e-6;
const DIRECT_REL_TOL: f64 = 1e-8;
const ANALYSIS_TAIL_TOL: f64 = 1e-11;

fn lex_position(n: &[i64], radius: usize) -> Option<usize> {
    let m = 2 * radius as i64 + 1;
    let mut flat = 0i64;
    for &x in n {
        if x.unsigned_abs() as usize > radius {
            return None;
        }
        flat = flat * m + x + radius as i64;
    }
    Some(flat as usize)
}

/// Finite section `G[j,k] = ⟨T_{Ak} f, T_{Aj} f⟩ = c_{k−j}` over
/// `‖j‖_∞, ‖k‖_∞ ≤ M`, stored as its `(4M+1)^d` distinct entries.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    dim: usize,
    half_width: usize,
    indices: Vec<Vec<i64>>,
    symbol: Vec<Complex64>,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Number of rows, `(2M+1)^d`.
    pub fn order(&self) -> usize {
        self.indices.len()
    }

    /// Row/column labels in lexicographic order.
    pub fn indices(&self) -> &[Vec<i64>] {
        &self.indices
    }

    /// `c_n` for `‖n‖_∞ ≤ 2M`.
    pub fn symbol(&self, n: &[i64]) -> Option<Complex64> {
        lex_position(n, 2 * self.half_width).map(|p| self.symbol[p])
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        let diff: Vec<i64> = self.indices[col]
            .iter()
            .zip(&self.indices[row])
            .map(|(k, j)| k - j)
            .collect();
        self.symbol(&diff).expect("difference within 2M")
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.order();
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }

    /// `Σ_{j,k} conj(c_j) G[j,k] c_k = ‖Σ_k c_k T_{Ak} f‖²`.
    pub fn quadratic_form(&self, c: &CoefficientVector) -> Result<f64> {
        if c.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: c.dim(),
            });
        }
        if c.support_radius() > self.half_width {
            return Err(Error::InvalidParameter(format!(
                "coefficient support radius {} exceeds Gram half-width {}",
                c.support_radius(),
                self.half_width
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, cj) in c.entries() {
            for (k, ck) in c.entries() {
                let diff: Vec<i64> = k.iter().zip(j).map(|(a, b)| a - b).collect();
                acc += cj.conj() * self.symbol(&diff).expect("within 2M") * ck;
            }
        }
        Ok(acc.re)
    }

    /// Dense matrix, one row per line as `re,im` pairs.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidParameter(format!("csv output: {e}"));
        let n = self.order();
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .flat_map(|j| {
                    let z = self.entry(i, j);
                    [crate::periodization::fmt_num(z.re), crate::periodization::fmt_num(z.im)]
                })
                .collect();
            w.write_record(&row).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidParameter(format!("csv output: {e}")))?;
        Ok(())
    }
}

/// Gram matrix of `τ_A(f)` restricted to `‖k‖_∞ ≤ M`.
pub fn gram_matrix(g: &Generator, lattice: &LatticeSpec, half_width: usize) -> Result<GramMatrix> {
    if half_width < 1 {
        return Err(Error::InvalidParameter("Gram half-width must be at least 1".into()));
    }
    let dim = lattice.dim();
    if g.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: g.dim(),
        });
    }
    let order = (2 * half_width + 1)
        .checked_pow(dim as u32)
        .unwrap_or(usize::MAX);
    if order > MAX_GRAM_ORDER {
        return Err(Error::TooLarge(order));
    }
    let symbol = index_box(dim, 2 * half_width)
        .par_iter()
        .map(|n| autocorrelation(g, lattice, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(GramMatrix {
        dim,
        half_width,
        indices: index_box(dim, half_width),
        symbol,
    })
}

/// Smallest and largest eigenvalue of the Hermitian finite section.
pub fn gram_eigen_bounds(gram: &GramMatrix) -> Result<(f64, f64)> {
    let n = gram.order();
    let max_iter = 1000 * n.max(1);
    let eig = SymmetricEigen::try_new(gram.to_dense(), f64::EPSILON, max_iter)
        .ok_or(Error::ConvergenceFailure(max_iter))?;
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Finitely supported coefficients `{c_k}`, sorted by index.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    dim: usize,
    entries: Vec<(Vec<i64>, Complex64)>,
}

impl CoefficientVector {
    pub fn new(dim: usize, entries: Vec<(Vec<i64>, Complex64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient vector".into()));
        }
        if let Some((k, _)) = entries.iter().find(|(k, _)| k.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: k.len(),
            });
        }
        if entries.iter().any(|(_, c)| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut entries = entries;
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParameter(format!("duplicate index {:?}", w[0].0)));
            }
        }
        Ok(Self { dim, entries })
    }

    /// Unit coefficient at the origin.
    pub fn delta(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![(vec![0; dim], Complex64::new(1.0, 0.0))],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(Vec<i64>, Complex64)] {
        &self.entries
    }

    pub fn support_radius(&self) -> usize {
        self.entries
            .iter()
            .flat_map(|(k, _)| k.iter().map(|x| x.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    /// `Σ |c_k|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    /// `ψ_c(γ) = Σ c_k e^{−2πi k·γ}`.
    pub fn symbol(&self, gamma: &[f64]) -> Complex64 {
        self.entries
            .iter()
            .map(|(k, c)| {
                let t: f64 = k.iter().zip(gamma).map(|(&a, b)| a as f64 * b).sum();
                c * Complex64::from_polar(1.0, -2.0 * PI * t)
            })
            .sum()
    }

    /// `(Σ c_k T_{Ak} f)(x)`.
    pub fn synthesize(&self, g: &Generator, lattice: &LatticeSpec, x: &[f64]) -> Complex64 {
        let mut y = vec![0.0; x.len()];
        self.entries
            .iter()
            .map(|(k, c)| {
                let s = lattice.spatial_point(k);
                for i in 0..y.len() {
                    y[i] = x[i] - s[i];
                }
                c * g.eval_spatial(&y)
            })
            .sum()
    }
}

/// `‖Σ c_k T_{Ak} f‖²` by three routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisNorms {
    /// Frequency quadrature of `|f̂(ξ)|² |Σ c_k e^{−2πi ξ·Ak}|²`.
    pub direct: f64,
    /// `∫_{[0,1)^d} |ψ_c|² Φ` from the table.
    pub spectral: f64,
    /// `cᴴ G c`.
    pub quadratic: f64,
}

impl SynthesisNorms {
    pub fn max_deviation(&self) -> f64 {
        let v = [self.direct, self.spectral, self.quadratic];
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

fn check_table(g: &Generator, lattice: &LatticeSpec, table: &PeriodizationTable) -> Result<()> {
    if g.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            found: g.dim(),
        });
    }
    if table.lattice() != lattice {
        return Err(Error::InvalidParameter("table was computed for a different lattice".into()));
    }
    Ok(())
}

/// Frequency-domain quadrature of `‖Σ c_k T_{Ak} f‖²`.
pub fn synthesis_norm_direct(g: &Generator, lattice: &LatticeSpec, c: &CoefficientVector) -> Result<f64> {
    let shifts: Vec<(Complex64, Vec<f64>)> = c
        .entries()
        .iter()
        .map(|(k, a)| (*a, lattice.spatial_point(k)))
        .collect();
    let spread = shifts
        .iter()
        .flat_map(|(_, s)| s.iter().map(|x| x.abs()))
        .fold(0.0_f64, f64::max);
    let l1: f64 = c.entries().iter().map(|(_, a)| a.norm()).sum();
    let tol = DIRECT_REL_TOL * g.l2_norm_squared()? * c.norm_sqr() / (l1 * l1);
    let v = g.frequency_integral(&[], 2.0 * spread, tol, |xi| {
        let m: Complex64 = shifts
            .iter()
            .map(|(a, s)| {
                let t: f64 = s.iter().zip(xi).map(|(p, q)| p * q).sum();
                a * Complex64::from_polar(1.0, -2.0 * PI * t)
            })
            .sum();
        Complex64::new(g.fourier_norm_sqr(xi) * m.norm_sqr(), 0.0)
    })?;
    Ok(v.re)
}

/// `∫_{[0,1)^d} |ψ_c(γ)|² Φ(γ) dγ`. The periodic rectangle rule is used on
/// the grid; in d = 1, tables with located jumps are integrated piecewise by
/// Gauss–Legendre with off-grid evaluation of `Φ`.
pub fn synthesis_norm_spectral(table: &PeriodizationTable, c: &CoefficientVector) -> Result<f64> {
    if c.dim() != table.dim() {
        return Err(Error::DimensionMismatch {
            expected: table.dim(),
            found: c.dim(),
        });
    }
    if table.dim() == 1 && table.can_evaluate() {
        let bounds = spectral_bounds(table, None)?;
        if !bounds.boundary.is_empty() {
            let breaks: Vec<f64> = bounds
                .boundary
                .chunks(2)
                .map(|p| 0.5 * (p[0].gamma[0] + p[1].gamma[0]))
                .collect();
            let span = c.support_radius().max(1) as f64;
            let width = (1.0 / 16.0_f64).min(0.25 / span);
            let axes = vec![quadrature::axis_rule(0.0, 1.0, width, &breaks)];
            let v = quadrature::integrate(&axes, |g| {
                let phi = table.evaluate(g).unwrap_or(f64::NAN);
                Complex64::new(c.symbol(g).norm_sqr() * phi, 0.0)
            });
            return Ok(v.re);
        }
    }
    let sum: f64 = (0..table.len())
        .map(|flat| c.symbol(&table.gamma(flat)).norm_sqr() * table.values()[flat])
        .sum();
    Ok(sum / table.len() as f64)
}

/// Direct, spectral and quadratic-form values of `‖Σ c_k T_{Ak} f‖²`.
pub fn synthesis_norm(
    g: &Generator,
    lattice: &LatticeSpec,
    c: &CoefficientVector,
    table: &PeriodizationTable,
) -> Result<SynthesisNorms> {
    check_table(g, lattice, table)?;
    let gram = gram_matrix(g, lattice, c.support_radius().max(1))?;
    Ok(SynthesisNorms {
        direct: synthesis_norm_direct(g, lattice, c)?,
        spectral: synthesis_norm_spectral(table, c)?,
        quadratic: gram.quadratic_form(c)?,
    })
}

/// `⟨h, T_{Ak} f⟩ = ∫ ĥ(ξ) conj(f̂(ξ)) e^{2πi ξ·Ak} dξ` for `‖k‖_∞ ≤ M`.
pub fn analysis_coefficients(
    g: &Generator,
    lattice: &LatticeSpec,
    h: &Generator,
    half_width: usize,
) -> Result<Vec<(Vec<i64>, Complex64)>> {
    if g.dim() != lattice.dim() || h.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            found: if g.dim() != lattice.dim() { g.dim() } else { h.dim() },
        });
    }
    index_box(lattice.dim(), half_width)
        .into_iter()
        .map(|k| {
            let s = lattice.spatial_point(&k);
            let osc = s.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            let v = h.frequency_integral(&[g], osc, ANALYSIS_TAIL_TOL, |xi| {
                let t: f64 = s.iter().zip(xi).map(|(p, q)| p * q).sum();
                h.eval_fourier(xi) * g.eval_fourier(xi).conj() * Complex64::from_polar(1.0, 2.0 * PI * t)
            })?;
            Ok((k, v))
        })
        .collect()
}

/// Orthogonal projection of `ψ` onto the closed span of `τ_A(f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// `‖ψ − Pψ‖²`.
    pub residual_norm_sq: f64,
    pub psi_norm_sq: f64,
    pub is_member: bool,
    /// `F(γ_j) = Φ_{ψ,f}/Φ_f` on the grid; `None` on the zero set.
    pub multiplier: Vec<Option<Complex64>>,
    pub grid_res: usize,
    pub dim: usize,
    pub trunc_radius: usize,
}

impl Projection {
    /// Coefficients `d_k` with `F(γ) = Σ d_k e^{−2πi k·γ}`, so that
    /// `Pψ = Σ d_k T_{Ak} f`, for `‖k‖_∞ ≤ n_max`.
    pub fn coefficients(&self, n_max: usize) -> Result<CoefficientVector> {
        let n = self.grid_res;
        if n_max > n / 4 {
            return Err(Error::AliasRisk {
                n_max,
                grid: n,
                limit: n / 4,
            });
        }
        let total = self.multiplier.len() as f64;
        let entries = index_box(self.dim, n_max)
            .into_par_iter()
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (flat, f) in self.multiplier.iter().enumerate() {
                    if let Some(f) = f {
                        let mut rem = flat;
                        let mut t = 0.0;
                        for i in (0..self.dim).rev() {
                            t += k[i] as f64 * (rem % n) as f64 / n as f64;
                            rem /= n;
                        }
                        acc += f * Complex64::from_polar(1.0, 2.0 * PI * t);
                    }
                }
                (k, acc / total)
            })
            .collect();
        CoefficientVector::new(self.dim, entries)
    }
}

/// Projects `ψ` onto `V(f)`. `F = Φ_{ψ,f}/Φ_f` off the zero set of the
/// table, with `Φ_{ψ,f}(γ) = (1/|det A|) Σ_k ψ̂ conj(f̂)` at `(A^T)^{-1}(γ+k)`;
/// the residual is `‖ψ‖² − ∫ |Φ_{ψ,f}|²/Φ_f`, evaluated pointwise on the grid.
pub fn project_onto_span(
    g: &Generator,
    lattice: &LatticeSpec,
    psi: &Generator,
    table: &PeriodizationTable,
    eps_zero: Option<f64>,
    member_tol: f64,
) -> Result<Projection> {
    check_table(g, lattice, table)?;
    if psi.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: lattice.dim(),
            found: psi.dim(),
        });
    }
    let eps = spectral_bounds(table, eps_zero)?.eps_zero;
    if table.values().iter().all(|&v| v < eps) {
        return Err(Error::DegenerateSpan);
    }
    let psi_norm_sq = psi.l2_norm_squared()?;
    let cap = crate::periodization::default_radius_cap(lattice.dim());
    let (k_psi, _) = select_radius(psi, lattice, 1e-10 * psi_norm_sq, cap)?;
    let radius = table.trunc_radius().max(k_psi);
    let shifts = DualShifts::new(lattice, radius);

    #[derive(Default, Clone, Copy)]
    struct Sums {
        f: f64,
        psi: f64,
        cross: Complex64,
    }
    impl std::ops::AddAssign for Sums {
        fn add_assign(&mut self, o: Self) {
            self.f += o.f;
            self.psi += o.psi;
            self.cross += o.cross;
        }
    }
    impl std::ops::Mul<f64> for Sums {
        type Output = Sums;
        fn mul(self, s: f64) -> Sums {
            Sums {
                f: self.f * s,
                psi: self.psi * s,
                cross: self.cross * s,
            }
        }
    }

    let rows: Vec<(f64, Option<Complex64>)> = (0..table.len())
        .into_par_iter()
        .map(|flat| {
            let s = shifts.sum(&table.gamma(flat), |xi| {
                let fh = g.eval_fourier(xi);
                let ph = psi.eval_fourier(xi);
                Sums {
                    f: fh.norm_sqr(),
                    psi: ph.norm_sqr(),
                    cross: ph * fh.conj(),
                }
            });
            if table.values()[flat] >= eps && s.f > 0.0 {
                (s.psi - s.cross.norm_sqr() / s.f, Some(s.cross / s.f))
            } else {
                (s.psi, None)
            }
        })
        .collect();
    let residual = rows.iter().map(|r| r.0).sum::<f64>() / rows.len() as f64;
    let residual_norm_sq = residual.max(0.0);
    Ok(Projection {
        residual_norm_sq,
        psi_norm_sq,
        is_member: residual_norm_sq <= member_tol * psi_norm_sq,
        multiplier: rows.into_iter().map(|r| r.1).collect(),
        grid_res: table.grid_res(),
        dim: table.dim(),
        trunc_radius: radius,
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

    fn one(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gram_examples() {
        let sinc = Generator::sinc(1).unwrap();
        let g = gram_matrix(&sinc, &unit(), 2).unwrap();
        assert_eq!(g.order(), 5);
        for i in 0..5 {
            for j in 0..5 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!((g.entry(i, j) - one(e)).norm(), 0.0, epsilon = 1e-9);
            }
        }
        let hat = Generator::bspline(1, 1).unwrap();
        let g = gram_matrix(&hat, &unit(), 2).unwrap();
        for i in 0..5usize {
            for j in 0..5usize {
                let e = match i.abs_diff(j) {
                    0 => 2.0 / 3.0,
                    1 => 1.0 / 6.0,
                    _ => 0.0,
                };
                assert_abs_diff_eq!(g.entry(i, j).re, e, epsilon = 1e-12);
            }
        }
        assert!(matches!(gram_matrix(&hat, &unit(), 2048), Err(Error::TooLarge(4097))));
        assert!(gram_matrix(&hat, &unit(), 0).is_err());
    }

    #[test]
    fn eigen_examples() {
        let sinc = gram_matrix(&Generator::sinc(1).unwrap(), &unit(), 2).unwrap();
        let (lo, hi) = gram_eigen_bounds(&sinc).unwrap();
        assert_abs_diff_eq!(lo, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
        let hat = gram_matrix(&Generator::bspline(1, 1).unwrap(), &unit(), 32).unwrap();
        let (lo, hi) = gram_eigen_bounds(&hat).unwrap();
        assert!(lo > 1.0 / 3.0 && lo < 1.0 / 3.0 + 0.01, "{lo}");
        assert!(hi < 1.0 && hi > 0.99, "{hi}");
        let ex = Generator::frequency_box_dual(&unit(), vec![-1.0 / 3.0], vec![1.0 / 3.0]).unwrap();
        let (lo, hi) = gram_eigen_bounds(&gram_matrix(&ex, &unit(), 32).unwrap()).unwrap();
        assert!(lo < 0.01);
        assert!(hi <= 1.0 + 1e-8);
    }

    #[test]
    fn synthesis_examples() {
        let l = unit();
        let sinc = Generator::sinc(1).unwrap();
        let t = compute_phi(&sinc, &l, 64, None).unwrap();
        let c = CoefficientVector::new(1, vec![(vec![0], one(1.0)), (vec![1], one(1.0))]).unwrap();
        let s = synthesis_norm(&sinc, &l, &c, &t).unwrap();
        for v in [s.direct, s.spectral, s.quadratic] {
            assert_abs_diff_eq!(v, 2.0, epsilon = 1e-9);
        }
        let hat = Generator::bspline(1, 1).unwrap();
        let t = compute_phi(&hat, &l, 64, None).unwrap();
        let c = CoefficientVector::new(1, vec![(vec![0], one(1.0)), (vec![1], one(-1.0))]).unwrap();
        let s = synthesis_norm(&hat, &l, &c, &t).unwrap();
        for v in [s.direct, s.spectral, s.quadratic] {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-8);
        }
        let s = synthesis_norm(&hat, &l, &CoefficientVector::delta(1), &t).unwrap();
        for v in [s.direct, s.spectral, s.quadratic] {
            assert_abs_diff_eq!(v, 2.0 / 3.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn analysis_examples() {
        let l = unit();
        let sinc = Generator::sinc(1).unwrap();
        let a = analysis_coefficients(&sinc, &l, &sinc, 3).unwrap();
        for (k, v) in &a {
            let e = if k[0] == 0 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!((v - one(e)).norm(), 0.0, epsilon = 1e-8);
        }
        let hat = Generator::bspline(1, 1).unwrap();
        let shifted = hat.translated(l.spatial_point(&[1])).unwrap();
        for (k, v) in analysis_coefficients(&hat, &l, &shifted, 3).unwrap() {
            let c = autocorrelation(&hat, &l, &[k[0] - 1]).unwrap();
            assert_abs_diff_eq!((v - c).norm(), 0.0, epsilon = 1e-8);
        }
        let gauss = Generator::gaussian(1, 1.0).unwrap();
        let a = analysis_coefficients(&sinc, &l, &gauss, 8).unwrap();
        let energy: f64 = a.iter().map(|(_, v)| v.norm_sqr()).sum();
        assert!(energy <= gauss.l2_norm_squared().unwrap() + 1e-6);
    }

    #[test]
    fn projection_examples() {
        let l = unit();
        let hat = Generator::bspline(1, 1).unwrap();
        let t = compute_phi(&hat, &l, 128, None).unwrap();
        let p = project_onto_span(&hat, &l, &hat, &t, None, DEFAULT_MEMBER_TOL).unwrap();
        assert!(p.is_member);
        assert!(p.residual_norm_sq <= 1e-12);
        for f in p.multiplier.iter().flatten() {
            assert_abs_diff_eq!((f - one(1.0)).norm(), 0.0, epsilon = 1e-12);
        }

        let shifted = hat.translated(l.spatial_point(&[1])).unwrap();
        let p = project_onto_span(&hat, &l, &shifted, &t, None, DEFAULT_MEMBER_TOL).unwrap();
        assert!(p.residual_norm_sq <= 1e-8);
        for (flat, f) in p.multiplier.iter().enumerate() {
            let gamma = t.gamma(flat)[0];
            let e = Complex64::from_polar(1.0, -2.0 * PI * gamma);
            assert_abs_diff_eq!((f.unwrap() - e).norm(), 0.0, epsilon = 1e-9);
        }
        let d = p.coefficients(4).unwrap();
        for (k, v) in d.entries() {
            let e = if k[0] == 1 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!((v - one(e)).norm(), 0.0, epsilon = 1e-9);
        }

        let sinc = Generator::sinc(1).unwrap();
        let t = compute_phi(&sinc, &l, 128, None).unwrap();
        let wide = Generator::frequency_box(vec![-1.0], vec![1.0]).unwrap();
        let p = project_onto_span(&sinc, &l, &wide, &t, None, DEFAULT_MEMBER_TOL).unwrap();
        assert!(!p.is_member);
        assert_abs_diff_eq!(p.residual_norm_sq, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_span() {
        let l = unit();
        let hat = Generator::bspline(1, 1).unwrap();
        let t = PeriodizationTable::from_values(l.clone(), 4, vec![0.0; 4], 1, 0.0, "zero".into()).unwrap();
        assert_eq!(
            project_onto_span(&hat, &l, &hat, &t, Some(1e-8), 1e-6).unwrap_err(),
            Error::DegenerateSpan
        );
    }

    #[test]
    fn gram_csv_shape() {
        let g = gram_matrix(&Generator::bspline(1, 1).unwrap(), &unit(), 1).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0].split(',').count(), 6);
        assert!(lines[1].starts_with("0.166666666667,0,0.666666666667,0"));
    }
}
