//! Composite Gauss–Legendre rules on boxes, used for every integral over
//! frequency or spatial space.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

const NODES_PER_PANEL: usize = 16;

fn reference_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut pairs: Vec<(f64, f64)> =
            GaussLegendre::new(NonZeroUsize::new(NODES_PER_PANEL).unwrap())
                .as_node_weight_pairs()
                .to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

/// Nodes and weights of a composite rule on `[lo, hi]`. Panels are at most
/// `width` wide and never straddle one of `breaks`.
pub(crate) fn axis_rule(lo: f64, hi: f64, width: f64, breaks: &[f64]) -> Vec<(f64, f64)> {
    let mut edges: Vec<f64> = vec![lo, hi];
    edges.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let rule = reference_rule();
    let mut out = Vec::new();
    for seg in edges.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let panels = ((b - a) / width).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let pa = a + p as f64 * h;
            let mid = pa + 0.5 * h;
            for &(x, w) in rule {
                out.push((mid + 0.5 * h * x, 0.5 * h * w));
            }
        }
    }
    out
}

/// Tensor-product rule `∫ f` over the box described by one rule per axis.
/// Summation order is fixed, so results are deterministic.
pub(crate) fn integrate<F>(axes: &[Vec<(f64, f64)>], f: F) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let d = axes.len();
    let first = &axes[0];
    let partials: Vec<Complex64> = first
        .par_iter()
        .map(|&(x0, w0)| {
            let mut point = vec![0.0; d];
            point[0] = x0;
            w0 * inner(axes, 1, &mut point, &f)
        })
        .collect();
    partials.into_iter().sum()
}

fn inner<F>(axes: &[Vec<(f64, f64)>], axis: usize, point: &mut [f64], f: &F) -> Complex64
where
    F: Fn(&[f64]) -> Complex64,
{
    if axis == axes.len() {
        return f(point);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in &axes[axis] {
        point[axis] = x;
        acc += w * inner(axes, axis + 1, point, f);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_and_breaks() {
        let rule = axis_rule(-1.0, 2.0, 0.5, &[0.3, 5.0]);
        let v = integrate(&[rule], |x| Complex64::new(if x[0] < 0.3 { 1.0 } else { 0.0 }, 0.0));
        assert_abs_diff_eq!(v.re, 1.3, epsilon = 1e-14);
    }

    #[test]
    fn gaussian_2d() {
        let r = axis_rule(-8.0, 8.0, 0.5, &[]);
        let v = integrate(&[r.clone(), r], |x| {
            Complex64::new((-std::f64::consts::PI * (x[0] * x[0] + x[1] * x[1])).exp(), 0.0)
        });
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-13);
    }
}
