//! End-to-end acceptance checks, one line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tripoint::bounds::{
    default_perturbation_roots, primal_restricted, two_point_bound, verify_two_point, DualProgram,
};
use tripoint::certify::{
    certify_potential, equality_set, uniqueness_counts, verify_certificate, PipelineOptions,
    PotentialReport,
};
use tripoint::codes::{
    builtin, catalog_instances, design_strength, energy, rhombic7, triple_distribution,
    verify_code, Convention, Space,
};
use tripoint::exact_arith::{
    det, int, parse_rational, psd_check, rat, ExactScalar, Matrix, Rational,
};
use tripoint::kernels::{eval_kernel, projective_s, sphere_s};
use tripoint::orthoplex::{applicable_bound, check_code, OrthoplexStatus};
use tripoint::polynomials::{
    default_mult_zero, interpolation_gap, partial_products, reduction_multiset, Multiset, UniPoly,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rhombic_potentials() -> Vec<UniPoly> {
    let t = UniPoly::from_ints(&[0, 1]);
    let a = UniPoly::linear_root(&rat(1, 9));
    let b = UniPoly::linear_root(&rat(1, 3));
    let t3 = t.pow(3);
    vec![
        UniPoly::from_ints(&[1]),
        t.clone(),
        t.pow(2),
        t3.clone(),
        &t3 * &a,
        &t3 * &a.pow(2),
        &(&t3 * &a.pow(2)) * &b,
    ]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let t = UniPoly::from_ints(&[0, 1]);
    let cert = two_point_bound(7, 3, &t, 6).map_err(err)?;
    let elapsed = start.elapsed();
    let e = energy(&rhombic7().map_err(err)?, &t, Convention::Hat).map_err(err)?;
    ensure!(verify_two_point(&cert), "certificate does not verify");
    ensure!(cert.bound == rat(14, 3), "bound {} != 14/3", cert.bound);
    ensure!(
        e == ExactScalar::rational(cert.bound.clone()),
        "energy {e} != bound {}",
        cert.bound
    );
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!("bound 14/3 = energy in {:.2?}", elapsed))
}

fn criterion_2(reports: &mut Vec<PotentialReport>) -> Outcome {
    let code = rhombic7().map_err(err)?;
    let opts = PipelineOptions::default();
    let targets = [rat(38, 27), rat(110, 243), rat(8, 81), rat(16, 729), int(0)];
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for (f, target) in rhombic_potentials()[2..].iter().zip(&targets) {
        let start = Instant::now();
        let rep = certify_potential(&code, f, &default_perturbation_roots(), &opts).map_err(err)?;
        let elapsed = start.elapsed();
        let bound = rep.bound.first().cloned();
        if !rep.sharp || bound.as_ref() != Some(target) {
            failures.push(format!(
                "{}: bound {:?}, sharp {}",
                rep.label, bound, rep.sharp
            ));
        } else if elapsed > Duration::from_secs(30 * 60) {
            failures.push(format!("{}: took {elapsed:?}", rep.label));
        } else {
            parts.push(format!("{target} ({:.0?})", elapsed));
        }
        reports.push(rep);
    }
    ensure!(failures.is_empty(), "{}", failures.join("; "));
    Ok(format!(
        "sharp at {} bits: {}",
        opts.precision_bits,
        parts.join(", ")
    ))
}

fn criterion_3(reports: &[PotentialReport]) -> Outcome {
    let start = Instant::now();
    let rep = reports
        .first()
        .ok_or("no certificate from the previous criterion")?;
    let cert = rep.certificate.as_ref().ok_or("no certificate")?;
    let prog: &DualProgram = rep.program.as_ref().ok_or("no program")?;
    let cands: Vec<ExactScalar> = [int(0), rat(1, 9), rat(1, 3)]
        .into_iter()
        .map(ExactScalar::rational)
        .collect();
    let set = equality_set(cert, prog, &prog.f0, &cands).map_err(err)?;
    let mut counts = uniqueness_counts(cert, prog, &set, 7).map_err(err)?;
    counts.sort();
    let expect: Vec<Rational> = [6, 24, 36, 72, 72].into_iter().map(int).collect();
    ensure!(counts == expect, "counts {counts:?}");
    let total: Rational = counts.iter().sum();
    ensure!(total == int(210), "total {total}");
    ensure!(
        start.elapsed() < Duration::from_secs(60),
        "took {:?}",
        start.elapsed()
    );
    Ok(format!(
        "(6, 24, 36, 72, 72), total 210 in {:.2?}",
        start.elapsed()
    ))
}

fn criterion_4() -> Outcome {
    let dist = triple_distribution(&rhombic7().map_err(err)?).map_err(err)?;
    let mut counts: Vec<u64> = dist.domain_classes().map(|c| c.count).collect();
    counts.sort();
    ensure!(
        counts == vec![6, 24, 36, 72, 72],
        "rhombic7 classes {counts:?}"
    );
    ensure!(dist.domain_total() == 210, "total {}", dist.domain_total());
    let names = catalog_instances();
    for name in &names {
        let d = triple_distribution(&builtin(name).map_err(err)?).map_err(err)?;
        for id in d.identities() {
            ensure!(
                id.ok,
                "{name}: {} expected {} found {}",
                id.name,
                id.expected,
                id.found
            );
        }
    }
    Ok(format!(
        "rhombic7 classes ok; identities hold for {} codes",
        names.len()
    ))
}

fn criterion_5() -> Outcome {
    let cases = [("rhombic7", 1), ("icosaVF16", 2), ("icosa6", 2)];
    for (name, want) in cases {
        let s = design_strength(&builtin(name).map_err(err)?, 6).map_err(err)?;
        ensure!(s == want, "{name}: strength {s}, expected {want}");
    }
    Ok("rhombic7 1, icosaVF16 2 (not 3), icosa6 2".into())
}

fn criterion_6() -> Outcome {
    for (lines, n) in [(7, 3), (11, 4), (12, 4), (16, 5), (22, 6)] {
        let b = applicable_bound(n, 2 * lines).map_err(err)?;
        let expect = ExactScalar::sqrt_of(&rat(1, n as i64)).map_err(err)?;
        ensure!(b.applicable, "({lines}, {n}) not applicable");
        ensure!(
            b.bound_cos == expect,
            "({lines}, {n}): bound {}",
            b.bound_cos
        );
    }
    let v = check_code(&rhombic7().map_err(err)?).map_err(err)?;
    ensure!(
        v.status == OrthoplexStatus::Sharp,
        "rhombic7: {:?}",
        v.status
    );
    let v = check_code(&builtin("antipodal22_S3").map_err(err)?).map_err(err)?;
    ensure!(
        v.status == OrthoplexStatus::Sharp,
        "antipodal22_S3: {:?}",
        v.status
    );
    ensure!(
        v.bound_cos == ExactScalar::rational(rat(1, 2)),
        "antipodal22_S3 bound {}",
        v.bound_cos
    );
    for x in [rat(1, 3), rat(-1, 3), rat(1, 4), rat(-1, 4)] {
        ensure!(
            v.inner_products.contains(&ExactScalar::rational(x.clone())),
            "antipodal22_S3 lacks inner product {x}"
        );
    }
    Ok("5 applicable cases; rhombic7 and antipodal22_S3 sharp".into())
}

fn criterion_7() -> Outcome {
    let values = verify_code(&rhombic7().map_err(err)?).map_err(err)?.values;
    let ms = reduction_multiset(&values, default_mult_zero(&values)).map_err(err)?;
    let rms = ms.to_rational().ok_or("irrational multiset")?;
    let basis = partial_products(&rms.expanded());
    ensure!(basis == rhombic_potentials(), "rhombic7 basis differs");

    let cell = builtin("cell600").map_err(err)?;
    let minus_one = ExactScalar::from_int(-1);
    let cell_values = verify_code(&cell).map_err(err)?.values;
    let cms = Multiset::new(
        cell_values
            .iter()
            .map(|v| (v.clone(), if *v == minus_one { 1 } else { 2 }))
            .collect(),
    )
    .map_err(err)?;
    let cbasis = partial_products(&cms.expanded());
    ensure!(
        cbasis.len() == 15,
        "600-cell basis has {} entries",
        cbasis.len()
    );
    ensure!(
        cbasis.last().and_then(|p| p.degree()) == Some(14),
        "last 600-cell polynomial has the wrong degree"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let den: i64 = rng.gen_range(1..=1000);
        let x = rat(rng.gen_range(0..den), den);
        for m in 0..=20 {
            let f = UniPoly::monomial(m, int(1));
            let gap = interpolation_gap(&rms, &f, &x).map_err(err)?;
            ensure!(gap >= int(0), "t^{m} at {x}: gap {gap}");
        }
    }
    Ok("7 rhombic potentials, 15 600-cell polynomials, 1000 x 21 samples nonnegative".into())
}

fn random_symmetric(rng: &mut ChaCha8Rng) -> Matrix<Rational> {
    let n = rng.gen_range(1..=5);
    if rng.gen_bool(0.5) {
        // Gram matrix of random vectors, often singular
        let r = rng.gen_range(1..=n);
        let b: Vec<Vec<Rational>> = (0..n)
            .map(|_| {
                (0..r)
                    .map(|_| rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)))
                    .collect()
            })
            .collect();
        Matrix::from_fn(n, n, |i, j| (0..r).map(|k| &b[i][k] * &b[j][k]).sum())
    } else {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let lo = if i == j { 0 } else { -4 };
                let v = rat(rng.gen_range(lo..=4), rng.gen_range(1..=4));
                m.set(i, j, v.clone());
                m.set(j, i, v);
            }
        }
        m
    }
}

fn minors_nonnegative(m: &Matrix<Rational>) -> bool {
    let n = m.rows();
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        det(&m.principal(&idx)).unwrap() >= int(0)
    })
}

fn criterion_8(reports: &[PotentialReport]) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut psd = 0;
    for _ in 0..500 {
        let m = random_symmetric(&mut rng);
        let a = psd_check(&m).map_err(err)?;
        ensure!(a == minors_nonnegative(&m), "disagreement on {m:?}");
        psd += a as usize;
    }
    let rep = reports
        .first()
        .ok_or("no certificate from the earlier criterion")?;
    let cert = rep.certificate.as_ref().ok_or("no certificate")?;
    let prog = rep.program.as_ref().ok_or("no program")?;
    let eps = rat(1, 1_000_000_000);
    let mut trials = 0;
    let mut perturbed = Vec::new();
    let mut c = cert.clone();
    c.c += &eps;
    perturbed.push(c);
    for _ in 0..4 {
        let mut c = cert.clone();
        let k = rng.gen_range(0..c.f.len());
        let n = c.f[k].rows();
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let v = c.f[k].get(i, j) + &eps;
        c.f[k].set(i, j, v.clone());
        c.f[k].set(j, i, v);
        perturbed.push(c);
        let mut c = cert.clone();
        let n = c.m.rows();
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let v = c.m.get(i, j) + &eps;
        c.m.set(i, j, v.clone());
        c.m.set(j, i, v);
        perturbed.push(c);
    }
    for c in &perturbed {
        let v = verify_certificate(c, prog, &rep.target).map_err(err)?;
        ensure!(!v.identity_ok && !v.sharp, "perturbation not detected");
        trials += 1;
    }
    Ok(format!(
        "500 matrices agree ({psd} psd); {trials} perturbations of 1e-9 caught in {:.1?}",
        start.elapsed()
    ))
}

fn criterion_9(reports: &[PotentialReport]) -> Outcome {
    let rep = reports
        .first()
        .ok_or("no certificate from the earlier criterion")?;
    let prog = rep.program.as_ref().ok_or("no program")?;
    let dual = rep.bound.first().ok_or("no dual bound")?.clone();
    let code = rhombic7().map_err(err)?;
    let dist = triple_distribution(&code).map_err(err)?;
    let support: Vec<[ExactScalar; 3]> = dist
        .domain_classes()
        .map(|c| c.values.clone().ok_or("class without values"))
        .collect::<Result<_, _>>()?;
    let res = primal_restricted(
        7,
        3,
        Space::Projective,
        &prog.f0,
        &support,
        &prog.blocks,
        256,
    )
    .map_err(err)?;
    let value = parse_rational(&res.value).map_err(err)?;
    let tol = Rational::new(1.into(), num_bigint::BigInt::from(10).pow(20));
    ensure!(
        value >= &dual - &tol && value <= rat(38, 27) + &tol,
        "primal {} outside [{dual}, 38/27]",
        res.value
    );
    let shown: String = res.value.chars().take(32).collect();
    Ok(format!("primal {shown}... in [{dual}, 38/27]"))
}

fn stereographic(a: &Rational, b: &Rational) -> Vec<ExactScalar> {
    let s = a * a + b * b;
    let d = &s + int(1);
    [int(2) * a / &d, int(2) * b / &d, (&s - int(1)) / &d]
        .into_iter()
        .map(ExactScalar::rational)
        .collect()
}

fn dot(x: &[ExactScalar], y: &[ExactScalar]) -> ExactScalar {
    x.iter()
        .zip(y)
        .fold(ExactScalar::from_int(0), |acc, (a, b)| {
            acc + &(a.clone() * b)
        })
}

fn random_code(rng: &mut ChaCha8Rng) -> Vec<Vec<ExactScalar>> {
    let m = rng.gen_range(1..=6);
    (0..m)
        .map(|_| {
            let a = rat(rng.gen_range(-5..=5), rng.gen_range(1..=4));
            let b = rat(rng.gen_range(-5..=5), rng.gen_range(1..=4));
            stereographic(&a, &b)
        })
        .collect()
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut kernels = Vec::new();
    for k in 0..=3 {
        for d in 1..=3 {
            kernels.push((
                format!("sphere k={k} d={d}"),
                sphere_s(3, k, d).map_err(err)?,
            ));
            kernels.push((
                format!("projective k={k} d={d}"),
                projective_s(3, k, d).map_err(err)?,
            ));
        }
    }
    let codes = 30;
    for _ in 0..codes {
        let pts = random_code(&mut rng);
        let m = pts.len();
        let g: Vec<Vec<ExactScalar>> = (0..m)
            .map(|i| (0..m).map(|j| dot(&pts[i], &pts[j])).collect())
            .collect();
        for (name, kern) in &kernels {
            let mut acc: Option<Matrix<ExactScalar>> = None;
            for x in 0..m {
                for y in 0..m {
                    for z in 0..m {
                        let e = eval_kernel(kern, [&g[x][y], &g[y][z], &g[z][x]]).map_err(err)?;
                        acc = Some(match acc {
                            None => e,
                            Some(a) => a.add(&e).map_err(err)?,
                        });
                    }
                }
            }
            let acc = acc.ok_or("empty code")?;
            ensure!(
                psd_check(&acc).map_err(err)?,
                "{name} fails on a {m}-point code"
            );
        }
    }
    Ok(format!(
        "{} kernels psd on {codes} random codes in {:.1?}",
        kernels.len(),
        start.elapsed()
    ))
}

fn report(i: usize, name: &str, r: Outcome) -> bool {
    match r {
        Ok(msg) => {
            println!("criterion {i:>2} PASS {name}: {msg}");
            true
        }
        Err(msg) => {
            println!("criterion {i:>2} FAIL {name}: {msg}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut reports = Vec::new();
    let results = [
        report(1, "two-point sharpness", criterion_1()),
        report(2, "three-point certificates", criterion_2(&mut reports)),
        report(3, "uniqueness counts", criterion_3(&reports)),
        report(4, "triple distribution", criterion_4()),
        report(5, "design strengths", criterion_5()),
        report(6, "orthoplex bound", criterion_6()),
        report(7, "hermite machinery", criterion_7()),
        report(8, "exact verifier soundness", criterion_8(&reports)),
        report(9, "sandwich", criterion_9(&reports)),
        report(10, "kernel psd sums", criterion_10()),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed} of {} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
