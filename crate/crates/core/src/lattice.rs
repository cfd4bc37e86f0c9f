//! Translation lattices `Λ = A·Z^d`, their duals `(A^T)^{-1}·Z^d`, and the
//! bookkeeping shared by every lattice sum in the crate.
//!
//! Spatial translates live on `A·k`; the periodization of `|f̂|²` samples the
//! frequency side at `(A^T)^{-1}(γ + k)`. The two are tied together by the
//! duality `(A·j)·((A^T)^{-1}·k) = j·k`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest dimension handled by the crate. Grids grow as `N^d`.
pub const MAX_DIM: usize = 3;

/// Matrices whose 2-norm condition number exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e8;

/// Which side of the duality a lattice point lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `A·k`, spatial units.
    Spatial,
    /// `(A^T)^{-1}·k`, frequency units (cycles).
    Frequency,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticePoint {
    pub index: Vec<i64>,
    pub coords: Vec<f64>,
}

/// An invertible `d×d` matrix `A` together with its derived quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    dim: usize,
    basis: DMatrix<f64>,
    det_abs: f64,
    dual_basis: DMatrix<f64>,
}

impl LatticeSpec {
    /// Builds a lattice from row-major rows of `A`.
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::NotSquare {
                rows: d,
                cols: rows.iter().map(Vec::len).collect(),
            });
        }
        if d > MAX_DIM {
            return Err(Error::UnsupportedDimension(d));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let basis = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        Self::from_matrix(basis)
    }

    pub fn from_matrix(basis: DMatrix<f64>) -> Result<Self> {
        let d = basis.nrows();
        if d == 0 || basis.ncols() != d {
            return Err(Error::NotSquare {
                rows: d,
                cols: vec![basis.ncols(); d],
            });
        }
        if d > MAX_DIM {
            return Err(Error::UnsupportedDimension(d));
        }
        let max_entry = basis.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let det = basis.determinant();
        let threshold = 1e-10 * max_entry.powi(d as i32);
        if !(det.abs() >= threshold) || det == 0.0 {
            return Err(Error::SingularMatrix {
                det: det.abs(),
                threshold,
            });
        }
        let sv = basis.clone().singular_values();
        let cond = sv.max() / sv.min();
        if !(cond <= MAX_CONDITION) {
            return Err(Error::IllConditioned(cond));
        }
        let dual_basis = basis
            .transpose()
            .try_inverse()
            .ok_or(Error::SingularMatrix {
                det: det.abs(),
                threshold,
            })?;
        Ok(Self {
            dim: d,
            basis,
            det_abs: det.abs(),
            dual_basis,
        })
    }

    /// `A = I_d`.
    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_matrix(DMatrix::identity(dim, dim))
    }

    /// The one-dimensional lattice `a·Z`.
    pub fn scalar(a: f64) -> Result<Self> {
        Self::new(&[vec![a]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn det_abs(&self) -> f64 {
        self.det_abs
    }

    /// `(A^T)^{-1}`.
    pub fn dual_basis(&self) -> &DMatrix<f64> {
        &self.dual_basis
    }

    /// Row-major copy of `A`, as accepted by [`LatticeSpec::new`].
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.basis[(i, j)]).collect())
            .collect()
    }

    /// `A·v` for a real vector.
    pub fn to_spatial(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.basis, v)
    }

    /// `(A^T)^{-1}·v` for a real vector.
    pub fn to_frequency(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.dual_basis, v)
    }

    /// `A·k`.
    pub fn spatial_point(&self, k: &[i64]) -> Vec<f64> {
        self.to_spatial(&as_f64(k))
    }

    /// `(A^T)^{-1}·k`.
    pub fn frequency_point(&self, k: &[i64]) -> Vec<f64> {
        self.to_frequency(&as_f64(k))
    }

    /// `‖A^T‖_∞`, the largest absolute column sum of `A`. Frequencies
    /// `ξ = (A^T)^{-1}(γ+k)` satisfy `‖ξ‖_∞ ≥ ‖γ+k‖_∞ / ‖A^T‖_∞`.
    pub fn transpose_inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.basis[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `‖A‖_∞`, the largest absolute row sum of `A`.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.basis[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// All `k` with `‖k‖_∞ ≤ radius` in lexicographic order.
    pub fn lattice_points_in_box(&self, radius: usize, side: Side) -> Vec<LatticePoint> {
        index_box(self.dim, radius)
            .into_iter()
            .map(|index| {
                let coords = match side {
                    Side::Spatial => self.spatial_point(&index),
                    Side::Frequency => self.frequency_point(&index),
                };
                LatticePoint { index, coords }
            })
            .collect()
    }
}

/// Reduces each coordinate modulo 1 into `[0, 1)`.
pub fn wrap_to_unit_cell(gamma: &[f64]) -> Result<Vec<f64>> {
    gamma
        .iter()
        .map(|&x| {
            if !x.is_finite() {
                return Err(Error::NonFinite);
            }
            let w = x - x.floor();
            // -1e-17 - floor(-1e-17) rounds to 1.0
            Ok(if w >= 1.0 { 0.0 } else { w })
        })
        .collect()
}

/// Integer vectors `k ∈ Z^d` with `‖k‖_∞ ≤ radius`, lexicographically
/// ascending (first coordinate slowest).
pub fn index_box(dim: usize, radius: usize) -> Vec<Vec<i64>> {
    let r = radius as i64;
    let side = 2 * radius + 1;
    let count = side.pow(dim as u32);
    let mut out = Vec::with_capacity(count);
    let mut cur = vec![-r; dim];
    for _ in 0..count {
        out.push(cur.clone());
        for i in (0..dim).rev() {
            if cur[i] < r {
                cur[i] += 1;
                break;
            }
            cur[i] = -r;
        }
    }
    out
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

pub(crate) fn as_f64(k: &[i64]) -> Vec<f64> {
    k.iter().map(|&x| x as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn identity_1d() {
        let l = LatticeSpec::scalar(1.0).unwrap();
        assert_eq!(l.det_abs(), 1.0);
        assert_eq!(l.dual_basis()[(0, 0)], 1.0);
    }

    #[test]
    fn diagonal_dual() {
        let l = LatticeSpec::new(&[vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert_abs_diff_eq!(l.det_abs(), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(l.dual_basis()[(0, 0)], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(l.dual_basis()[(1, 1)], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l.dual_basis()[(0, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn shear_dual() {
        let l = LatticeSpec::new(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_abs_diff_eq!(l.det_abs(), 1.0, epsilon = 1e-12);
        let expected = [[1.0, 0.0], [-1.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(l.dual_basis()[(i, j)], expected[i][j], epsilon = 1e-12);
            }
        }
        let prod = l.dual_basis() * l.basis().transpose();
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(prod[(i, j)], id, epsilon = 1e-12);
            }
        }
        assert_eq!(l.transpose_inf_norm(), 2.0);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(
            LatticeSpec::new(&[vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(Error::SingularMatrix { .. })
        ));
        assert!(matches!(
            LatticeSpec::new(&[vec![1.0, 0.0], vec![0.0, 1e-9]]),
            Err(Error::IllConditioned(_)) | Err(Error::SingularMatrix { .. })
        ));
        assert!(matches!(
            LatticeSpec::new(&[vec![1.0, 0.0], vec![0.0, 1e-9], vec![0.0, 0.0]]),
            Err(Error::NotSquare { .. })
        ));
        let four: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        assert_eq!(LatticeSpec::new(&four), Err(Error::UnsupportedDimension(4)));
        assert_eq!(LatticeSpec::new(&[vec![f64::NAN]]), Err(Error::NonFinite));
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_to_unit_cell(&[0.25]).unwrap(), vec![0.25]);
        assert_eq!(wrap_to_unit_cell(&[-0.25]).unwrap(), vec![0.75]);
        let w = wrap_to_unit_cell(&[3.5, -1.2]).unwrap();
        assert_abs_diff_eq!(w[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 0.8, epsilon = 1e-12);
        assert_eq!(wrap_to_unit_cell(&[-1e-17]).unwrap(), vec![0.0]);
        assert_eq!(wrap_to_unit_cell(&[f64::INFINITY]), Err(Error::NonFinite));
    }

    #[test]
    fn boxes() {
        let l = LatticeSpec::scalar(1.0).unwrap();
        let p0 = l.lattice_points_in_box(0, Side::Spatial);
        assert_eq!(p0.len(), 1);
        assert_eq!(p0[0].index, vec![0]);
        let p2: Vec<i64> = l
            .lattice_points_in_box(2, Side::Spatial)
            .into_iter()
            .map(|p| p.index[0])
            .collect();
        assert_eq!(p2, vec![-2, -1, 0, 1, 2]);

        let l2 = LatticeSpec::new(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let pts = l2.lattice_points_in_box(1, Side::Frequency);
        assert_eq!(pts.len(), 9);
        for w in pts.windows(2) {
            assert!(w[0].index < w[1].index);
        }
        for p in &pts {
            assert_eq!(p.coords, l2.frequency_point(&p.index));
        }
    }

    fn lattice_strategy() -> impl Strategy<Value = LatticeSpec> {
        prop::collection::vec(-3.0..3.0_f64, 4)
            .prop_filter_map("well conditioned", |v| {
                LatticeSpec::new(&[vec![v[0], v[1]], vec![v[2], v[3]]])
                    .ok()
                    .filter(|l| l.det_abs() > 0.1)
            })
    }

    proptest! {
        #[test]
        fn wrap_is_integer_periodic(x in -50.0..50.0_f64, y in -50.0..50.0_f64,
                                    k in -20i64..20, j in -20i64..20) {
            let a = wrap_to_unit_cell(&[x, y]).unwrap();
            let b = wrap_to_unit_cell(&[x + k as f64, y + j as f64]).unwrap();
            for i in 0..2 {
                let d = (a[i] - b[i]).abs();
                prop_assert!(d <= 1e-12 || (1.0 - d) <= 1e-12);
                prop_assert!((0.0..1.0).contains(&a[i]));
            }
        }

        #[test]
        fn duality_pairing(l in lattice_strategy(),
                           j in prop::collection::vec(-5i64..5, 2),
                           k in prop::collection::vec(-5i64..5, 2)) {
            let x = l.spatial_point(&j);
            let xi = l.frequency_point(&k);
            let pairing: f64 = x.iter().zip(&xi).map(|(a, b)| a * b).sum();
            let expected = (j[0] * k[0] + j[1] * k[1]) as f64;
            prop_assert!((pairing - expected).abs() <= 1e-10 * (1.0 + expected.abs()));
        }

        #[test]
        fn dual_volume(l in lattice_strategy()) {
            let dual_det = l.dual_basis().determinant().abs();
            prop_assert!((dual_det * l.det_abs() - 1.0).abs() <= 1e-12);
        }
    }
}
