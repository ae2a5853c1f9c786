//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs under `cargo test` with its own harness.

mod support;

use std::process::ExitCode;
use std::time::Instant;

use asymdiff::basis::{forward_transform, inverse_transform, TensorBasis};
use asymdiff::dataset::synth_temperature_field;
use asymdiff::diffusion::{coeff_power, distance_matrix_repr, pair_sum};
use asymdiff::experiment::{run_changedata, run_mobius, ChangeConfig, MobiusConfig};
use asymdiff::kernel::{random_kernel, temperature_kernel};
use asymdiff::oracle::{time_coefficients, SpectralDecomp, SpectralExponent, TimingProtocol};
use asymdiff::{embed, global_distance_sq, weak_pipeline_distance_sq, CoefficientGrid, DiffusionTime, TruncationParams};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use support::*;

type Check = Result<(bool, String), asymdiff::Error>;
type Criterion = (&'static str, fn() -> Check);

fn time(t: u32) -> DiffusionTime {
    DiffusionTime::new(t).expect("positive time")
}

fn reconstruction() -> Check {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut names = Vec::new();
    for f in fixture_families() {
        let basis = TensorBasis::fourier(f.kernel.n())?;
        let back = inverse_transform(&forward_transform(&f.kernel, &basis)?, &basis)?.values;
        worst = worst.max((back - f.kernel.entries()).amax());
        names.push(format!("{}(n={})", f.name, f.kernel.n()));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        worst <= 1e-10 && secs < 5.0,
        format!("max |inverse(forward(K)) - K| = {worst:.2e} over {}; {secs:.2} s", names.join(", ")),
    ))
}

fn representation() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0;
    for f in fixture_families() {
        let n = f.kernel.n();
        let basis = TensorBasis::fourier(n)?;
        let c = forward_transform(&f.kernel, &basis)?;
        let repr = distance_matrix_repr(&c, &basis, n / 2, n / 2)?;
        worst = worst.max(max_rel(&repr, &brute_distances(f.kernel.entries(), 1)));
        count += 1;
    }
    Ok((
        worst <= 1e-8,
        format!("max relative deviation from row-difference norms {worst:.2e} over {count} fixtures, all pairs"),
    ))
}

fn coefficient_power() -> Check {
    // Unnormalized kernels reach coefficients of order 1e8 at t = 4, so the
    // tolerance scales with the largest coefficient once that exceeds one.
    let (mut worst_abs, mut worst_scaled) = (0.0f64, 0.0f64);
    for f in asymmetric_small() {
        let n = f.kernel.n();
        let basis = TensorBasis::fourier(n)?;
        let c = forward_transform(&f.kernel, &basis)?;
        for t in 1..=4 {
            let h = coeff_power(&c, &basis, time(t), n / 2)?;
            let direct = naive_coefficients(&real_power(f.kernel.entries(), t));
            let err = max_abs_complex(h.coeffs(), &direct);
            let scale = direct.iter().map(|z| z.norm()).fold(1.0, f64::max);
            worst_abs = worst_abs.max(err);
            worst_scaled = worst_scaled.max(err / scale);
        }
    }
    Ok((
        worst_scaled <= 1e-8,
        format!(
            "max |coeff_power - coefficients(K^t)| = {worst_abs:.2e}, over max(1, max|C|) = {worst_scaled:.2e}, t = 1..4, n <= 32"
        ),
    ))
}

fn global_parseval() -> Check {
    let mut worst = 0.0f64;
    let pairs = [(8, 1, 2), (16, 3, 4), (32, 5, 6), (31, 7, 8)];
    for (n, sg, sb) in pairs {
        let (kg, kb) = (random_kernel(n, sg)?, random_kernel(n, sb)?);
        let basis = TensorBasis::fourier(n)?;
        let (cg, cb) = (forward_transform(&kg, &basis)?, forward_transform(&kb, &basis)?);
        for t in [1, 2] {
            let got = global_distance_sq(&cg, &cb, &basis, time(t))?;
            let diff = real_power(kg.entries(), t) - real_power(kb.entries(), t);
            let want = diff.norm_squared();
            worst = worst.max((got - want).abs() / want);
        }
    }
    Ok((
        worst <= 1e-8,
        format!("max relative |global - ‖K_γ^t - K_β^t‖_F²| = {worst:.2e}, t ∈ {{1, 2}}"),
    ))
}

fn embedding_identity() -> Check {
    let n = 32;
    let kernels = [
        random_kernel(n, 77)?,
        asymdiff::DatasetSpec::sphere(n, 2)?.build_kernel()?,
        asymdiff::DatasetSpec::mobius(n, 3)?.build_kernel()?,
    ];
    let basis = TensorBasis::fourier(n)?;
    let radii = [0, 1, 3, 8, 16];
    let mut worst = 0.0f64;
    let mut cases = 0;
    for k in &kernels {
        let c = forward_transform(k, &basis)?;
        for t in [1, 2] {
            let h = coeff_power(&c, &basis, time(t), n / 2)?;
            for k1 in radii {
                for k2 in radii {
                    let e = embed(&c, &basis, time(t), &TruncationParams::new(k1, k2, n / 2))?;
                    let d = e.pairwise_sq_distances();
                    for x in 0..n {
                        for y in 0..n {
                            worst = worst.max((d[(x, y)] - pair_sum(&h, &h, &basis, x, y, k1, k2)?).abs());
                        }
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok((
        worst <= 1e-12,
        format!("max |‖φ(x) - φ(y)‖² - f_(k1,k2)| = {worst:.2e} over {cases} (kernel, t, k1, k2) cases"),
    ))
}

fn perturbed(a: &CoefficientGrid, basis: &TensorBasis, delta: f64, rng: &mut ChaCha8Rng) -> asymdiff::Result<CoefficientGrid> {
    let n = a.n();
    let p = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let l1: f64 = p.iter().map(|z| z.norm()).sum();
    CoefficientGrid::from_parts(a.coeffs() + p * Complex64::new(delta / l1, 0.0), basis)
}

fn continuity() -> Check {
    let n = 16;
    let basis = TensorBasis::fourier(n)?;
    let a = forward_transform(&random_kernel(n, 1)?, &basis)?;
    let b = forward_transform(&random_kernel(n, 2)?, &basis)?;
    let m = basis.row().uniform_bound();
    let ab = a.l1_norm() + b.l1_norm();
    let radii = [(8, 8), (3, 5), (0, 2), (6, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_ratio = 0.0f64;
    let mut violations = 0;
    for delta in [1e-3, 1e-2, 1e-1] {
        for i in 0..100 {
            let (c, d) = (perturbed(&a, &basis, delta, &mut rng)?, perturbed(&b, &basis, delta, &mut rng)?);
            let e = (a.coeffs() - c.coeffs()).iter().map(|z| z.norm()).sum::<f64>()
                + (b.coeffs() - d.coeffs()).iter().map(|z| z.norm()).sum::<f64>();
            let bound = m * (e * e + 2.0 * ab * e);
            let (k1, k2) = radii[i % radii.len()];
            for x in 0..n {
                for y in 0..n {
                    let dev = (pair_sum(&a, &b, &basis, x, y, k1, k2)? - pair_sum(&c, &d, &basis, x, y, k1, k2)?).abs();
                    worst_ratio = worst_ratio.max(dev / bound);
                    if dev > bound {
                        violations += 1;
                    }
                }
            }
        }
    }
    Ok((
        violations == 0,
        format!("300 perturbations × 256 pairs, {violations} violations; max deviation/bound = {worst_ratio:.3}"),
    ))
}

fn truncation_convergence() -> Check {
    let mut ok = true;
    let mut summary = Vec::new();
    for f in fixture_families() {
        let n = f.kernel.n();
        let basis = TensorBasis::fourier(n)?;
        let c = forward_transform(&f.kernel, &basis)?;
        let exact = brute_distances(f.kernel.entries(), 1);
        let errors: Vec<f64> = (0..=n / 2)
            .map(|k| Ok((distance_matrix_repr(&c, &basis, k, k)? - &exact).amax()))
            .collect::<asymdiff::Result<_>>()?;
        let last = *errors.last().expect("at least one radius");
        let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
        ok &= last <= 1e-8 && last <= min;
        summary.push(format!("{} {:.1e}→{:.1e}", f.name, errors[0], last));
    }
    Ok((ok, format!("error at k = 0 → k = ⌊n/2⌋: {}", summary.join(", "))))
}

fn spectral() -> Check {
    let mut worst = 0.0f64;
    let mut printed = 0.0f64;
    for f in symmetric_markov() {
        let n = f.kernel.n();
        let s = SpectralDecomp::new(&f.kernel)?;
        for t in [1, 2, 3] {
            let brute = brute_distances(f.kernel.entries(), t);
            let mut doubled = DMatrix::zeros(n, n);
            let mut single = DMatrix::zeros(n, n);
            for x in 0..n {
                for y in 0..n {
                    doubled[(x, y)] = s.distance_sq(time(t), x, y, SpectralExponent::Doubled)?;
                    single[(x, y)] = s.distance_sq(time(t), x, y, SpectralExponent::Printed)?;
                }
            }
            worst = worst.max(max_rel(&doubled, &brute));
            printed = printed.max(max_rel(&single, &brute));
        }
    }
    Ok((
        worst <= 1e-8,
        format!("λ^(2t): max relative error {worst:.2e}; λ^t (reported only): {printed:.2e}"),
    ))
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / lx.len() as f64, ly.iter().sum::<f64>() / ly.len() as f64);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

fn performance() -> Check {
    let start = Instant::now();
    let sizes = [256usize, 512, 1024, 2048];
    let protocol = TimingProtocol::default();
    let mut fft = Vec::new();
    let mut svd = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let (f, s) = time_coefficients(&random_kernel(n, 500 + i as u64)?, &protocol)?;
        fft.push(f);
        svd.push(s);
    }
    let ns: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let (fs, ss) = (slope(&ns, &fft), slope(&ns, &svd));
    let faster = fft.iter().zip(&svd).all(|(f, s)| f < s);
    let ratio = svd[2] / fft[2];
    let pairs: Vec<String> = sizes
        .iter()
        .zip(fft.iter().zip(&svd))
        .map(|(n, (f, s))| format!("n={n}: {f:.1e}/{s:.1e} s"))
        .collect();
    let elapsed = start.elapsed().as_secs_f64();
    Ok((
        faster && ratio >= 5.0 && fs <= 2.6 && ss >= 2.5 && elapsed < 600.0,
        format!(
            "fft/svd ({} SVD) {}; ratio at 1024 = {ratio:.0}; slopes fft {fs:.2}, svd {ss:.2}; {elapsed:.0} s",
            asymdiff::oracle::svd_backend(),
            pairs.join(", "),
        ),
    ))
}

fn mobius_rotation() -> Check {
    let r = run_mobius(&MobiusConfig::default())?;
    Ok((
        r.fourier_circular_correlation > r.svd_circular_correlation,
        format!(
            "n=300 circular correlation with u: fourier {:.3}, svd {:.3}; ‖K-Kᵀ‖/‖K‖ = {:.2}",
            r.fourier_circular_correlation, r.svd_circular_correlation, r.raw_relative_asymmetry
        ),
    ))
}

fn changedata_ordering() -> Check {
    let side = 24;
    let reference = synth_temperature_field(side, side, "2000", 7)?;
    let a = synth_temperature_field(side, side, "2010", 7)?;
    let b = synth_temperature_field(side, side, "2018", 7)?;
    let cells = reference.valid_cells();
    let mut strict = false;
    for &(r, c) in &cells {
        let (da, db) = (a.value(r, c) - reference.value(r, c), b.value(r, c) - reference.value(r, c));
        if db < da {
            return Ok((false, format!("fixture not dominated at ({r}, {c})")));
        }
        strict |= db > da;
    }
    let mut ok = strict;
    let mut detail = Vec::new();
    for t in [1, 2] {
        let cfg = ChangeConfig {
            t: time(t),
            k2_sweep: vec![5],
            ..ChangeConfig::default()
        };
        let out = run_changedata(("2000", &reference), &[("A".into(), a.clone()), ("B".into(), b.clone())], &cfg)?;
        let (ga, gb) = (out.globals[0].global_distance, out.globals[1].global_distance);
        let kr = real_power(temperature_kernel(&reference, 650.0)?.entries(), t);
        let kb = real_power(temperature_kernel(&b, 650.0)?.entries(), t);
        let parseval = (kr - kb).norm_squared();
        ok &= gb > ga && (gb * gb - parseval).abs() <= 1e-8 * parseval;
        detail.push(format!("t={t}: √global A {ga:.4}, B {gb:.4}"));
    }
    Ok((ok, format!("{} cells; {}", cells.len(), detail.join("; "))))
}

fn weak_pipeline() -> Check {
    let mut full_err = 0.0f64;
    let mut trunc_err = 0.0f64;
    for (n, sg, sb) in [(8, 11, 12), (16, 13, 14), (9, 15, 16)] {
        let (kg, kb) = (random_kernel(n, sg)?, random_kernel(n, sb)?);
        let basis = TensorBasis::fourier(n)?;
        let (cg, cb) = (forward_transform(&kg, &basis)?, forward_transform(&kb, &basis)?);
        let (ng, nb) = (naive_coefficients(kg.entries()), naive_coefficients(kb.entries()));
        for t in [1, 2] {
            for k in 0..=n / 2 {
                let (rg, rb) = if k == n / 2 {
                    let (pg, pb) = (real_power(kg.entries(), t), real_power(kb.entries(), t));
                    (pg.map(|v| Complex64::new(v, 0.0)), pb.map(|v| Complex64::new(v, 0.0)))
                } else {
                    (
                        complex_power(&naive_synthesis(&box_truncate(&ng, k, k)), t),
                        complex_power(&naive_synthesis(&box_truncate(&nb, k, k)), t),
                    )
                };
                let mut got = DMatrix::zeros(n, n);
                let mut want = DMatrix::zeros(n, n);
                for x in 0..n {
                    for y in 0..n {
                        got[(x, y)] = weak_pipeline_distance_sq(&cg, &cb, &basis, time(t), k, x, y)?;
                        want[(x, y)] = cross_rows_complex(&rg, x, &rb, y);
                    }
                }
                let err = max_rel(&got, &want);
                if k == n / 2 {
                    full_err = full_err.max(err);
                } else {
                    trunc_err = trunc_err.max(err);
                }
            }
        }
    }
    Ok((
        full_err <= 1e-8 && trunc_err <= 1e-8,
        format!("full radius vs dynamic distance {full_err:.2e}; k < ⌊n/2⌋ vs truncated-kernel construction {trunc_err:.2e}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("reconstruction exactness", reconstruction),
        ("representation equals brute force", representation),
        ("coefficient power equals transform of matrix power", coefficient_power),
        ("global distance Parseval identity", global_parseval),
        ("embedding distance identity", embedding_identity),
        ("continuity bound", continuity),
        ("truncation convergence", truncation_convergence),
        ("spectral oracle with doubled exponent", spectral),
        ("performance ordering FFT vs SVD", performance),
        ("Möbius rotation detection", mobius_rotation),
        ("changing-data ordering", changedata_ordering),
        ("weak pipeline consistency", weak_pipeline),
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
        println!("criterion {:>2} {} {name}: {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
