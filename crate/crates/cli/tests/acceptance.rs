//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its runtime (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! 1. minimal-basis theorem suite (ratio <= 2^n - 1, lower side) over seeded
//!    random norms, n = 1..4
//! 2. the same for maximal bases
//! 3. min-family sharpness: closed-form witness ratios and basis recovery
//! 4. max-family sharpness: predicted ratios, values, basis recovery
//! 5. sphere-optimizer agreement with the brute-force grid oracle
//! 6. comparability bounds for basis pairs plus the hereditary cascade
//! 7. known l-infinity values against the grid oracle
//! 8. byte-identical CSV artifacts for identical seeds

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use extremal_core::construct::{
    build_max_construction, build_min_construction, verify_construction, ConstructionMode,
};
use extremal_core::extremal::{maximal_basis, minimal_basis_seeded};
use extremal_core::linalg::{ScalarField, Subspace};
use extremal_core::norm::{coordinate_support, NormSpec};
use extremal_core::random::random_norm;
use extremal_core::sphere::{grid_oracle, max_on_sphere, min_on_sphere_seeded, OptMode};
use extremal_core::verify::{
    check_hpf, equivalence_ratios, lower_side_check, upper_ratio, weighted_l1,
};

const NORMS_PER_DIM: usize = 200;

fn bound(n: usize) -> f64 {
    2f64.powi(n as i32) - 1.0
}

fn suite_norms(n: usize, count: usize) -> Vec<NormSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + n as u64);
    (0..count)
        .map(|_| random_norm(ScalarField::Real, n, 3 * n, &mut rng).expect("valid params"))
        .collect()
}

fn pass(criterion: &str, what: &str, t0: Instant, budget_s: f64) {
    let dt = t0.elapsed().as_secs_f64();
    println!("criterion {criterion}: PASS — {what} ({dt:.2} s, budget {budget_s} s)");
    assert!(
        dt < budget_s,
        "criterion {criterion} exceeded its {budget_s} s budget: {dt:.2} s"
    );
}

fn theorem_suite(kind: ConstructionMode) {
    for n in 1..=4usize {
        for (trial, f) in suite_norms(n, NORMS_PER_DIM).iter().enumerate() {
            let basis = match kind {
                ConstructionMode::Min => {
                    minimal_basis_seeded(f, 9000 + trial as u64).expect("minimal basis converges")
                }
                ConstructionMode::Max => maximal_basis(f).expect("maximal basis exists"),
            };
            let rep = upper_ratio(f, &basis).expect("ratio computed");
            assert!(
                rep.ratio <= bound(n) + 1e-6,
                "n={n} trial={trial}: ratio {} exceeds {}",
                rep.ratio,
                bound(n)
            );
            let low = lower_side_check(f, &basis, 10_000, 500 + trial as u64).expect("check runs");
            assert!(low.ok, "n={n} trial={trial}: lower side violated");
        }
    }
}

#[test]
fn criterion_1_minimal_theorem_suite() {
    let t0 = Instant::now();
    theorem_suite(ConstructionMode::Min);
    pass(
        "1",
        "200 random norms per n in 1..4: minimal-basis ratio within 2^n-1, lower side holds",
        t0,
        120.0,
    );
}

#[test]
fn criterion_2_maximal_theorem_suite() {
    let t0 = Instant::now();
    theorem_suite(ConstructionMode::Max);
    pass(
        "2",
        "200 random norms per n in 1..4: maximal-basis ratio within 2^n-1, lower side holds",
        t0,
        120.0,
    );
}

#[test]
fn criterion_3_min_family_sharpness() {
    let t0 = Instant::now();
    for s in [0.1, 0.01, 0.001] {
        let out = build_min_construction(2, s).unwrap();
        let fw = out.norm.evaluate(&out.witness).unwrap();
        let measured = weighted_l1(&out.norm, &out.expected_basis, &out.witness).unwrap() / fw;
        let closed_form = (2.0 * s + 3.0) / (4.0 * s + 1.0);
        assert!(
            (measured - closed_form).abs() < 1e-9,
            "s={s}: measured {measured} vs closed form {closed_form}"
        );
    }
    let out = build_min_construction(3, 0.001).unwrap();
    let rep = verify_construction(&out, ConstructionMode::Min).unwrap();
    assert!(
        rep.measured_ratio >= 7.0 - 0.1,
        "n=3 s=0.001 ratio {}",
        rep.measured_ratio
    );
    assert!(
        rep.basis_equivalent,
        "recomputed minimal basis not equivalent"
    );
    assert!(rep.bound_ok);
    pass(
        "3",
        "min family: n=2 closed-form ratios at s in {0.1,0.01,0.001}; n=3 ratio >= 6.9 with basis recovery",
        t0,
        60.0,
    );
}

#[test]
fn criterion_4_max_family_sharpness() {
    let t0 = Instant::now();
    let pi = std::f64::consts::PI;
    for n in [2usize, 3] {
        for c in [0.9f64, 0.999] {
            for alpha in [3.0 * pi / 4.0, 0.995 * pi] {
                let out = build_max_construction(n, c, alpha).unwrap();
                let rep = verify_construction(&out, ConstructionMode::Max).unwrap();
                let predicted = rep.predicted_ratio.unwrap();
                assert!(
                    (rep.measured_ratio - predicted).abs() < 1e-9,
                    "n={n} c={c} alpha={alpha}: {} vs {predicted}",
                    rep.measured_ratio
                );
                assert!(rep.basis_equivalent, "n={n} c={c} alpha={alpha}");
                assert!(rep.bound_ok);
                for (i, v) in out.expected_basis.values().iter().enumerate() {
                    let expect = (c * alpha.sin()).powi(i as i32);
                    assert!(
                        (v - expect).abs() < 1e-9,
                        "n={n} c={c} alpha={alpha}: value {i} = {v}, expected {expect}"
                    );
                }
            }
        }
    }
    let out = build_max_construction(3, 0.999, 0.995 * pi).unwrap();
    let rep = verify_construction(&out, ConstructionMode::Max).unwrap();
    assert!(rep.measured_ratio >= 6.8, "ratio {}", rep.measured_ratio);
    pass(
        "4",
        "max family grid {2,3}x{0.9,0.999}x{3pi/4,0.995pi}: predicted ratios and basis recovery",
        t0,
        60.0,
    );
}

#[test]
fn criterion_5_oracle_agreement() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for trial in 0..100 {
        let f2 = random_norm(ScalarField::Real, 2, 8, &mut rng).unwrap();
        let s2 = Subspace::full(ScalarField::Real, 2);
        let analytic = max_on_sphere(&f2, &s2).unwrap();
        let grid = grid_oracle(&f2, &s2, OptMode::Max, 4096).unwrap();
        assert!(
            (analytic.value - grid.value).abs() <= 1e-9 * analytic.value.max(1.0),
            "trial {trial} max R2: {} vs {}",
            analytic.value,
            grid.value
        );

        let ms = min_on_sphere_seeded(&f2, &s2, 600 + trial).unwrap();
        let grid_min = grid_oracle(&f2, &s2, OptMode::Min, 4096).unwrap();
        assert!(
            (ms.value - grid_min.value).abs() <= 1e-4 * grid_min.value.max(1.0),
            "trial {trial} min R2: {} vs {}",
            ms.value,
            grid_min.value
        );

        let f3 = random_norm(ScalarField::Real, 3, 8, &mut rng).unwrap();
        let s3 = Subspace::full(ScalarField::Real, 3);
        let analytic3 = max_on_sphere(&f3, &s3).unwrap();
        let grid3 = grid_oracle(&f3, &s3, OptMode::Max, 181).unwrap();
        assert!(
            (analytic3.value - grid3.value).abs() <= 1e-9 * analytic3.value.max(1.0),
            "trial {trial} max R3: {} vs {}",
            analytic3.value,
            grid3.value
        );
    }
    pass(
        "5",
        "analytic max vs grid (1e-9) on 100 norms in R2 and R3; multistart min vs grid (1e-4) on 100 norms in R2",
        t0,
        300.0,
    );
}

#[test]
fn criterion_6_equivalence_suite() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for trial in 0..200usize {
        let n = 1 + trial % 3;
        let f = random_norm(ScalarField::Real, n, 3 * n + 1, &mut rng).unwrap();
        let bmin_a = minimal_basis_seeded(&f, 7000 + trial as u64).unwrap();
        let bmin_b = minimal_basis_seeded(&f, 8000 + trial as u64).unwrap();
        let bmax = maximal_basis(&f).unwrap();

        let mm = equivalence_ratios(&f, &bmin_a, &bmin_b).unwrap();
        assert!(mm.ok, "trial {trial} (min,min): {mm:?}");
        let mx = equivalence_ratios(&f, &bmin_a, &bmax).unwrap();
        assert!(mx.ok, "trial {trial} (min,max): {mx:?}");
        let xx = equivalence_ratios(&f, &bmax, &bmax).unwrap();
        assert!(xx.ok, "trial {trial} (max,max): {xx:?}");

        let cs: Vec<f64> = (1..=n).map(|i| bound(n - i + 1)).collect();
        let hp = check_hpf(&f, &bmax.sorted_ascending(), &cs).unwrap();
        assert!(hp.holds, "trial {trial}: HPf(2^n-1,..,1) failed: {hp:?}");
    }
    pass(
        "6",
        "200 random norms (n <= 3): comparability bounds for (min,min), (min,max), (max,max); HPf cascade for maximal bases",
        t0,
        180.0,
    );
}

#[test]
fn criterion_7_known_linf_values() {
    let t0 = Instant::now();
    let f = coordinate_support(ScalarField::Real, 2);
    let full = Subspace::full(ScalarField::Real, 2);

    let bmin = minimal_basis_seeded(&f, 77).unwrap();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for v in bmin.values() {
        assert!((v - inv_sqrt2).abs() < 1e-9, "minimal value {v}");
    }
    let oracle_min = grid_oracle(&f, &full, OptMode::Min, 1_000_000).unwrap();
    assert!((oracle_min.value - inv_sqrt2).abs() < 1e-9);
    assert!((bmin.values()[0] - oracle_min.value).abs() < 1e-9);

    let rep_min = upper_ratio(&f, &bmin).unwrap();
    assert!(
        (rep_min.ratio - 1.0).abs() < 1e-9,
        "minimal ratio {}",
        rep_min.ratio
    );

    let bmax = maximal_basis(&f).unwrap();
    let rep_max = upper_ratio(&f, &bmax).unwrap();
    assert!(
        (rep_max.ratio - 2.0).abs() < 1e-9,
        "maximal ratio {}",
        rep_max.ratio
    );

    pass(
        "7",
        "l-infinity in R2: minimal value 1/sqrt(2), minimal ratio 1, maximal ratio 2 (grid oracle cross-check)",
        t0,
        1.0,
    );
}

fn run_csv_suite(dir: &Path, tag: &str) -> Vec<u8> {
    let exe = env!("CARGO_BIN_EXE_extremal");
    let run = |args: &[&str]| {
        let out = Command::new(exe)
            .args(args)
            .current_dir(dir)
            .env_remove("EXTREMAL_SEED")
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    let sweep_min = format!("sweep_min_{tag}.csv");
    let sweep_max = format!("sweep_max_{tag}.csv");
    let verify = format!("verify_{tag}.csv");
    let equiv = format!("equiv_{tag}.csv");
    run(&[
        "sweep",
        "--construct",
        "min",
        "--n",
        "2",
        "--grid",
        "s=0.1,0.01,0.001",
        "--seed",
        "11",
        "--csv",
        &sweep_min,
        "--no-timestamp",
    ]);
    run(&[
        "sweep",
        "--construct",
        "max",
        "--n",
        "3",
        "--grid",
        "c=0.9,0.999;alpha=2.356,3.126",
        "--seed",
        "11",
        "--csv",
        &sweep_max,
        "--no-timestamp",
    ]);
    run(&[
        "verify",
        "--norm",
        "linf2.json",
        "--kind",
        "minimal",
        "--seed",
        "11",
        "--csv",
        &verify,
        "--no-timestamp",
    ]);
    run(&[
        "equiv",
        "--norm",
        "linf2.json",
        "--kind-a",
        "minimal",
        "--kind-b",
        "maximal",
        "--seed",
        "11",
        "--csv",
        &equiv,
        "--no-timestamp",
    ]);
    let mut bytes = Vec::new();
    for f in [sweep_min, sweep_max, verify, equiv] {
        bytes.extend_from_slice(&std::fs::read(dir.join(f)).unwrap());
        bytes.push(b'\n');
    }
    bytes
}

#[test]
fn criterion_8_determinism_byte_identical_csv() {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("linf2.json"),
        r#"{"field":"R","dim":2,"support":[[1.0,0.0],[0.0,1.0]]}"#,
    )
    .unwrap();
    let first = run_csv_suite(dir.path(), "a");
    let second = run_csv_suite(dir.path(), "b");
    assert_eq!(
        first, second,
        "same seed must give byte-identical CSV output"
    );
    pass(
        "8",
        "two same-seed runs of the CSV-producing pipeline are byte-identical (timestamps suppressed)",
        t0,
        60.0,
    );
}
