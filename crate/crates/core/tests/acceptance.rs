//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::time::Instant;

use common::{preset, random_coefficients, rng};
use translates::classify::{classify, perturbation_frame_check, ClassifyOptions, Verdict};
use translates::oracle::{gram_eigen_bounds, gram_matrix, synthesis_norm};
use translates::periodization::{
    autocorrelation, compute_phi, periodize_l1, perturbed_phi, phi_fourier_coeffs,
};
use translates::{Generator, LatticeSpec, Result};

type Outcome = Result<(bool, String)>;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn table_for(name: &str) -> Result<(LatticeSpec, Generator, translates::PeriodizationTable)> {
    let (cfg, l, g) = preset(name);
    let t = compute_phi(&g, &l, cfg.grid, cfg.target_tail)?;
    Ok((l, g, t))
}

fn c1_example() -> Outcome {
    let start = Instant::now();
    let (_, _, t) = table_for("example")?;
    let c = classify(&t, &ClassifyOptions::default())?;
    let secs = start.elapsed().as_secs_f64();
    let lower = c.lower.unwrap_or(f64::NAN);
    let upper = c.upper.unwrap_or(f64::NAN);
    let ok = c.verdict == Verdict::ParsevalFrameSequence
        && close(lower, 1.0, 1e-9)
        && close(upper, 1.0, 1e-9)
        && close(c.zero_fraction, 1.0 / 3.0, 2.0 / 1024.0)
        && !c.verdict.is_riesz()
        && secs < 1.0;
    Ok((
        ok,
        format!(
            "{} lower={lower} upper={upper} zero_fraction={} time={secs:.3}s",
            c.verdict, c.zero_fraction
        ),
    ))
}

fn c2_sinc() -> Outcome {
    let (l, g, t) = table_for("sinc")?;
    let dev = t.values().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let c = classify(&t, &ClassifyOptions::default())?;
    let gram = gram_matrix(&g, &l, 8)?;
    let n = gram.order();
    let mut gdev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            gdev = gdev.max((gram.entry(i, j) - id).norm());
        }
    }
    let ok = t.len() == 4096 && dev <= 1e-12 && c.verdict == Verdict::OrthonormalSequence && gdev <= 1e-9;
    Ok((ok, format!("max|Φ−1|={dev:.2e} verdict={} gram_dev={gdev:.2e}", c.verdict)))
}

fn c3_bspline1() -> Outcome {
    let (l, g, t) = table_for("bspline1")?;
    let c = classify(&t, &ClassifyOptions::default())?;
    let lower = c.lower.unwrap_or(f64::NAN);
    let upper = c.upper.unwrap_or(f64::NAN);
    let mut ok = close(lower, 1.0 / 3.0, 1e-6) && close(upper, 1.0, 1e-6) && c.verdict.is_riesz();
    let mut prev = (f64::INFINITY, f64::NEG_INFINITY);
    let mut detail = format!("bounds=({lower:.9}, {upper:.9})");
    for m in [4, 8, 16, 32] {
        let (lo, hi) = gram_eigen_bounds(&gram_matrix(&g, &l, m)?)?;
        // eigenvalues of nested sections spread out with M
        ok &= lo <= prev.0 + 1e-12 && hi >= prev.1 - 1e-12;
        ok &= lo >= 1.0 / 3.0 - 1e-9 && hi <= 1.0 + 1e-9;
        if m == 32 {
            ok &= lo - 1.0 / 3.0 <= 0.01 && 1.0 - hi <= 0.01;
        }
        detail.push_str(&format!(" M={m}:[{lo:.5},{hi:.5}]"));
        prev = (lo, hi);
    }
    Ok((ok, detail))
}

fn c4_norm_identity() -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    for name in ["sinc", "bspline1", "gauss", "example"] {
        let (_, g, t) = table_for(name)?;
        let err = (t.mean() - g.l2_norm_squared()?).abs();
        let tol = if name == "example" { 2.0 / t.grid_res() as f64 } else { 1e-6 };
        ok &= err <= tol;
        detail.push_str(&format!("{name}:{err:.2e} "));
    }
    Ok((ok, detail.trim_end().to_string()))
}

fn c5_coefficients() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for name in ["sinc", "bspline1", "gauss"] {
        let (l, g, t) = table_for(name)?;
        let coeffs = phi_fourier_coeffs(&t, 2)?;
        for n in -2..=2i64 {
            let dft = coeffs.get(&[n]).expect("in range");
            let direct = autocorrelation(&g, &l, &[n])?;
            let e = (dft - direct).norm();
            worst = worst.max(e);
            ok &= e <= 1e-6;
        }
    }
    let (_, _, t) = table_for("bspline1")?;
    let coeffs = phi_fourier_coeffs(&t, 2)?;
    let hat: Vec<f64> = (0..=2).map(|n| coeffs.get(&[n]).unwrap().re).collect();
    ok &= close(hat[0], 2.0 / 3.0, 1e-6) && close(hat[1], 1.0 / 6.0, 1e-6) && close(hat[2], 0.0, 1e-6);
    Ok((ok, format!("max deviation={worst:.2e} hat c0..c2={hat:.9?}")))
}

fn c6_synthesis() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for name in ["example", "sinc", "bspline1", "gauss"] {
        let (l, g, t) = table_for(name)?;
        let mut r = rng();
        for _ in 0..100 {
            let c = random_coefficients(&mut r);
            let s = synthesis_norm(&g, &l, &c, &t)?;
            let rel = s.max_deviation() / s.direct.abs().max(1e-300);
            worst = worst.max(rel);
            ok &= rel <= 1e-6;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 10.0;
    Ok((ok, format!("max relative deviation={worst:.2e} time={secs:.2}s")))
}

fn c7_perturbation() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for name in ["sinc", "bspline1"] {
        let (l, g, t) = table_for(name)?;
        for n in [1i64, 2] {
            let fast = perturbed_phi(&t, &[n])?;
            let direct = compute_phi(&g.perturbed(&l, &[n])?, &l, t.grid_res(), None)?;
            let dev = fast
                .values()
                .iter()
                .zip(direct.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst = worst.max(dev);
            ok &= dev <= 1e-8;
        }
    }
    let (_, _, ex) = table_for("example")?;
    let pe = perturbation_frame_check(&ex, &[1], None, 1e-9)?;
    ok &= pe.frame_for_original && close(pe.lower_on_original, 1.0, 1e-6);
    let (_, _, sinc) = table_for("sinc")?;
    let ps = perturbation_frame_check(&sinc, &[1], None, 1e-9)?;
    ok &= !ps.frame_for_original;
    Ok((
        ok,
        format!(
            "pointwise={worst:.2e} example frame={} lower={} sinc frame={}",
            pe.frame_for_original, pe.lower_on_original, ps.frame_for_original
        ),
    ))
}

fn c8_l1() -> Outcome {
    let l = LatticeSpec::scalar(1.0)?;
    let points: Vec<Vec<f64>> = (0..32).map(|j| vec![j as f64 / 32.0]).collect();
    let gauss = Generator::gaussian(1, 1.0)?;
    let pg = periodize_l1(&gauss, &l, &points, 20)?;
    let (a, b) = pg.integral_check;
    let gap = (a - b).norm();
    let hat = Generator::bspline(1, 1)?;
    let ph = periodize_l1(&hat, &l, &points, 20)?;
    let hdev = ph.values.iter().map(|v| (v - 1.0).norm()).fold(0.0, f64::max);
    let ok = gap <= 1e-8 && hdev <= 1e-12;
    Ok((ok, format!("gaussian integral gap={gap:.2e} hat max|ψ−1|={hdev:.2e}")))
}

fn c9_compact_support() -> Outcome {
    let mut ok = true;
    let mut detail = String::new();
    for name in ["bspline1", "bspline3"] {
        let (_, _, g) = preset(name);
        for a in [1.0, 2.0, 0.5, 0.75] {
            let l = LatticeSpec::scalar(a)?;
            for n in [256, 512, 1024, 2048, 4096] {
                let t = compute_phi(&g, &l, n, None)?;
                let c = classify(&t, &ClassifyOptions::default())?;
                let sup = t.max() + t.tail();
                ok &= c.verdict.is_bessel() && sup.is_finite() && t.tail() <= 1e-9 * sup;
                if c.verdict.is_frame_sequence() && !c.verdict.is_riesz() {
                    ok = false;
                    detail.push_str(&format!("{name} A={a} N={n}: {} ", c.verdict));
                }
            }
        }
    }
    if detail.is_empty() {
        detail = "no frame sequence without Riesz over A∈{1,2,0.5,0.75}, N∈{256..4096}".into();
    }
    Ok((ok, detail))
}

fn c10_sinc2d() -> Outcome {
    let start = Instant::now();
    let (_, _, t) = table_for("sinc2d")?;
    let c = classify(&t, &ClassifyOptions::default())?;
    let secs = start.elapsed().as_secs_f64();
    let dev = t.values().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let ok = c.verdict == Verdict::OrthonormalSequence && t.len() == 256 * 256 && dev <= 1e-10 && secs < 30.0;
    Ok((ok, format!("{} max|Φ−1|={dev:.2e} time={secs:.2}s", c.verdict)))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("example box reproduces its spectral picture", c1_example),
        ("sinc on Z is orthonormal", c2_sinc),
        ("hat function bounds and Gram sections", c3_bspline1),
        ("mean of the periodization equals the norm", c4_norm_identity),
        ("Fourier coefficients equal autocorrelations", c5_coefficients),
        ("three synthesis routes agree", c6_synthesis),
        ("perturbation by a lattice translate", c7_perturbation),
        ("L1 periodization", c8_l1),
        ("compactly supported generators: frame implies Riesz", c9_compact_support),
        ("sinc on a sheared 2D lattice", c10_sinc2d),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!("criterion {:>2} {}: {name} ({detail})", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
