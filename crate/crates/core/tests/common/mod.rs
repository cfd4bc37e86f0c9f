#![allow(dead_code)]

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use translates::cli::RunConfig;
use translates::oracle::CoefficientVector;
use translates::{Generator, LatticeSpec};

/// Seed shared by every randomized cross-check.
pub const SEED: u64 = 0x7a11_5eed;

pub fn preset(name: &str) -> (RunConfig, LatticeSpec, Generator) {
    let cfg = RunConfig::preset(name).expect("known preset");
    let (l, g) = cfg.build().expect("preset builds");
    (cfg, l, g)
}

pub fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

/// Random coefficients on a window of at most 9 consecutive indices in d = 1.
pub fn random_coefficients(rng: &mut ChaCha8Rng) -> CoefficientVector {
    let width = rng.random_range(1..=9i64);
    let start = rng.random_range(-4..=4i64);
    let entries = (start..start + width)
        .map(|k| {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (vec![k], z)
        })
        .collect();
    CoefficientVector::new(1, entries).unwrap()
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix via its real 2n×2n embedding
/// `[[X, −Y], [Y, X]]`, which carries each eigenvalue twice.
pub fn hermitian_eigenvalues(h: &[Vec<Complex64>]) -> Vec<f64> {
    let n = h.len();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = h[i][j].re;
            a[i + n][j + n] = h[i][j].re;
            a[i][j + n] = -h[i][j].im;
            a[i + n][j] = h[i][j].im;
        }
    }
    let ev = jacobi_eigenvalues(a);
    ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}
