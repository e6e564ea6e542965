//! Acceptance suite: seeded randomized sweeps for every contract the crate
//! makes, with one printed pass/fail line per criterion (visible under
//! `cargo test -- --nocapture`).

use num::BigRational;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use quadhess::identity::{
    constant_bracket, det_scaling, disc_hessian_det, lhs_exact, rhs, schur_det_factorization,
    verify_identity, xi_consistency, VerifyOutcome,
};
use quadhess::linalg::{
    det_rank_one_like_update, determinant, inv_rank_one_update, ColVector, Matrix,
};
use quadhess::oracle::{
    fd_gradient, fd_hessian, implicit_derivatives, random_complex_quadric,
    random_degenerate_quadric, random_quadric, random_singular_quadric, FdConfig, GenConfig,
};
use quadhess::quadric::{
    decompose, discriminant_data, discriminant_value, gradient_y, hessian_y, solve_y, BranchSign,
    ExactEmbed, QuadricSurface,
};
use quadhess::scalar::{rat, Scalar};
use quadhess::Error;

const BRANCHES: [BranchSign; 2] = [BranchSign::Plus, BranchSign::Minus];

fn seed_for(tag: u64, n: u64, i: u64) -> u64 {
    tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ n.wrapping_mul(0x85EB_CA6B_07AB_12CD)
        ^ i
}

fn report(name: &str, failures: usize, total: usize) {
    let status = if failures == 0 { "PASS" } else { "FAIL" };
    println!("[{status}] {name}: {failures} failures / {total} checks");
    assert_eq!(failures, 0, "{name}: {failures} failures out of {total}");
}

fn to_f64_surface(q: &QuadricSurface<BigRational>) -> QuadricSurface<f64> {
    q.convert::<f64>()
}

fn to_f64_point(x: &ColVector<BigRational>) -> ColVector<f64> {
    x.map(ExactEmbed::embed)
}

#[test]
fn criterion_1_exact_identity_zero_tolerance() {
    let mut failures = 0;
    let mut total = 0;
    for n in 1..=6usize {
        for i in 0..1000u64 {
            let cfg = GenConfig::new(n, seed_for(0xC1, n as u64, i));
            let (q, x) = random_quadric(&cfg).expect("generation");
            let parts = decompose(&q);
            let dd = discriminant_data(&parts);
            let want = rhs(&q);
            for branch in BRANCHES {
                total += 1;
                let got = lhs_exact(&parts, &dd, &x, branch).expect("preconditions hold");
                if got != want {
                    failures += 1;
                }
            }
        }
    }
    report(
        "exact identity, n in 1..=6 x 1000 instances, both branches, zero tolerance",
        failures,
        total,
    );
}

#[test]
fn criterion_2_float_identity() {
    let mut failures = 0;
    let mut total = 0;
    for n in 1..=8usize {
        for i in 0..500u64 {
            let mut cfg = GenConfig::new(n, seed_for(0xC2, n as u64, i));
            cfg.min_discriminant = Some(0.1);
            let (q, x) = random_quadric(&cfg).expect("generation");
            let qf = to_f64_surface(&q);
            let xf = to_f64_point(&x);
            let branch = if i % 2 == 0 { BranchSign::Plus } else { BranchSign::Minus };
            total += 1;
            match verify_identity(&qf, &xf, branch, 1e-8) {
                VerifyOutcome::Report(r) if r.passed => {}
                _ => failures += 1,
            }
        }
    }
    report(
        "float identity, n in 1..=8 x 500 instances, |lhs-rhs| <= 1e-8 max(1,|rhs|)",
        failures,
        total,
    );
}

#[test]
fn criterion_3_degenerate_leading_coefficient_closure() {
    let mut failures = 0;
    let mut total = 0;
    for n in [2usize, 4] {
        for i in 0..200u64 {
            let mut cfg = GenConfig::new(n, seed_for(0xC3, n as u64, i));
            // d = 0 makes the discriminant the squared linear coefficient,
            // so this bounds |b2| away from zero.
            cfg.min_discriminant = Some(0.25);
            let (q, x) = random_degenerate_quadric(&cfg).expect("generation");
            let qf = to_f64_surface(&q);
            let xf = to_f64_point(&x);
            total += 1;
            match verify_identity(&qf, &xf, BranchSign::Plus, 1e-6) {
                VerifyOutcome::Report(r) if r.passed => {}
                _ => failures += 1,
            }
        }
    }
    report(
        "d = 0 closure via implicit Hessian, n in {2,4} x 200 instances, tol 1e-6",
        failures,
        total,
    );
}

#[test]
fn criterion_4_singular_coefficient_matrix_kills_hessian_det() {
    let mut failures = 0;
    let mut total = 0;
    for i in 0..100u64 {
        let n = 1 + (i % 3) as usize;
        let mut cfg = GenConfig::new(n, seed_for(0xC4, n as u64, i));
        // Small, well-scaled instances: the Hessian determinant is exactly
        // zero in exact arithmetic, so all that remains is rounding noise.
        cfg.entry_range = 2;
        cfg.point_range = Some(1);
        cfg.min_discriminant = Some(1.0);
        cfg.min_d = Some(1.0);
        let (q, x) = random_singular_quadric(&cfg).expect("generation");
        assert!(determinant(q.sym_q()).unwrap().is_zero());
        let qf = to_f64_surface(&q);
        let xf = to_f64_point(&x);
        let parts = decompose(&qf);
        let dd = discriminant_data(&parts);
        let hess = hessian_y(&parts, &dd, &xf, BranchSign::Plus).expect("hessian exists");
        total += 1;
        if determinant(&hess).unwrap().abs() > 1e-6 {
            failures += 1;
        }
    }

    // Cone: x1^2 + x2^2 - y^2 = 0 at x = (3, 4); its graph branches are
    // developable, so the Hessian determinant vanishes identically.
    let mut m = Matrix::zeros(4, 4);
    m.set(0, 0, rat(1, 1));
    m.set(1, 1, rat(1, 1));
    m.set(2, 2, rat(-1, 1));
    let cone = QuadricSurface::new(2, m).unwrap();
    assert!(determinant(cone.sym_q()).unwrap().is_zero());
    let conef = to_f64_surface(&cone);
    let parts = decompose(&conef);
    let dd = discriminant_data(&parts);
    let x = ColVector::from_vec(vec![3.0, 4.0]);
    let hess = hessian_y(&parts, &dd, &x, BranchSign::Plus).unwrap();
    total += 1;
    if determinant(&hess).unwrap().abs() > 1e-6 {
        failures += 1;
    }

    report(
        "singular coefficient matrix => |det H_y| <= 1e-6 (100 instances + cone)",
        failures,
        total,
    );
}

#[test]
fn criterion_5_branch_parity_of_hessian_determinant() {
    let mut failures = 0;
    let mut total = 0;
    for n in 1..=3usize {
        for i in 0..100u64 {
            let mut cfg = GenConfig::new(n, seed_for(0xC5, n as u64, i));
            cfg.min_discriminant = Some(0.1);
            let (q, x) = random_quadric(&cfg).expect("generation");
            let qf = to_f64_surface(&q);
            let xf = to_f64_point(&x);
            let parts = decompose(&qf);
            let dd = discriminant_data(&parts);
            let det_plus =
                determinant(&hessian_y(&parts, &dd, &xf, BranchSign::Plus).unwrap()).unwrap();
            let det_minus =
                determinant(&hessian_y(&parts, &dd, &xf, BranchSign::Minus).unwrap()).unwrap();
            let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
            total += 1;
            if (det_plus - parity * det_minus).abs() > 1e-8 * det_plus.abs().max(1.0) {
                failures += 1;
            }
        }
    }
    report(
        "branch parity det H(plus) = (-1)^n det H(minus), n in 1..=3 x 100, tol 1e-8",
        failures,
        total,
    );
}

#[test]
fn criterion_6_complex_holomorphic_identity() {
    let mut failures = 0;
    let mut total = 0;
    for n in 1..=3usize {
        for i in 0..200u64 {
            let cfg = GenConfig::new(n, seed_for(0xC6, n as u64, i));
            let (q, x) = random_complex_quadric(&cfg).expect("generation");
            let branch = if i % 2 == 0 { BranchSign::Plus } else { BranchSign::Minus };
            total += 1;
            match verify_identity(&q, &x, branch, 1e-6) {
                VerifyOutcome::Report(r) if r.passed => {}
                _ => failures += 1,
            }
        }
    }
    report(
        "complex conjugation-free identity, n in 1..=3 x 200 instances, tol 1e-6",
        failures,
        total,
    );
}

fn draw_int(rng: &mut ChaCha20Rng, lo: i64, hi: i64) -> i64 {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as i64
}

fn draw_rat(rng: &mut ChaCha20Rng) -> BigRational {
    rat(draw_int(rng, -10, 10), draw_int(rng, 1, 10))
}

fn draw_matrix(rng: &mut ChaCha20Rng, rows: usize, cols: usize) -> Matrix<BigRational> {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, draw_rat(rng));
        }
    }
    m
}

fn draw_nonsingular(rng: &mut ChaCha20Rng, n: usize) -> Matrix<BigRational> {
    loop {
        let m = draw_matrix(rng, n, n);
        if !determinant(&m).unwrap().is_zero() {
            return m;
        }
    }
}

#[test]
fn criterion_7_rank_one_update_lemmas() {
    let mut failures = 0;
    let mut total = 0;

    let mut rng = ChaCha20Rng::seed_from_u64(seed_for(0xC7, 1, 0));
    for _ in 0..1000 {
        let n = draw_int(&mut rng, 1, 6) as usize;
        let m = draw_int(&mut rng, 1, 3) as usize;
        let r = draw_nonsingular(&mut rng, n);
        let t = draw_nonsingular(&mut rng, m);
        let s = draw_matrix(&mut rng, n, m);
        let u = draw_matrix(&mut rng, m, n);
        let via_lemma = det_rank_one_like_update(&r, &s, &t, &u).unwrap();
        let direct = determinant(&r.add(&s.mul(&t).mul(&u))).unwrap();
        total += 1;
        if via_lemma != direct {
            failures += 1;
        }
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed_for(0xC7, 2, 0));
    let mut done = 0;
    while done < 1000 {
        let n = draw_int(&mut rng, 1, 6) as usize;
        let r = draw_nonsingular(&mut rng, n);
        let s = ColVector::from_fn(n, |_| draw_rat(&mut rng));
        let u = ColVector::from_fn(n, |_| draw_rat(&mut rng));
        match inv_rank_one_update(&r, &s, &u) {
            Ok(inv) => {
                done += 1;
                total += 1;
                if inv.mul(&r.add(&s.outer(&u))) != Matrix::identity(n) {
                    failures += 1;
                }
            }
            Err(Error::UpdateSingular) => continue,
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }

    report(
        "rank-one determinant and inverse updates vs direct computation, 1000 each, exact",
        failures,
        total,
    );
}

#[test]
fn criterion_8_proof_checkpoints() {
    let mut failures = 0;
    let mut total = 0;
    let mut rng = ChaCha20Rng::seed_from_u64(seed_for(0xC8, 0, 0));
    let mut produced = 0u64;
    let mut attempt = 0u64;
    while produced < 500 {
        attempt += 1;
        let n = 1 + (produced % 4) as usize;
        let cfg = GenConfig::new(n, seed_for(0xC8, n as u64, attempt));
        let (q, x) = random_quadric(&cfg).expect("generation");
        let parts = decompose(&q);
        let dd = discriminant_data(&parts);
        // Each checkpoint needs its own nonsingularity preconditions.
        if determinant(&parts.a).unwrap().is_zero()
            || determinant(&dd.lambda).unwrap().is_zero()
        {
            continue;
        }
        produced += 1;

        let (factored, direct) = disc_hessian_det(&parts, &dd).unwrap();
        total += 1;
        if factored != direct {
            failures += 1;
        }

        // Constancy: the literal bracket takes the same value at 10 points.
        let (closed_ref, closed_form) = {
            let (lit, closed) = constant_bracket(&dd, &x).unwrap();
            (lit, closed)
        };
        total += 1;
        if closed_ref != closed_form {
            failures += 1;
        }
        for _ in 0..10 {
            let y = ColVector::from_fn(n, |_| draw_rat(&mut rng));
            let (lit, _) = constant_bracket(&dd, &y).unwrap();
            total += 1;
            if lit != closed_ref {
                failures += 1;
            }
        }

        let (product, scaled) = det_scaling(&q, &parts, &dd, &x).unwrap();
        total += 1;
        if product != scaled {
            failures += 1;
        }

        let (triple, d2_xi) = xi_consistency(&parts, &dd).unwrap();
        total += 1;
        if triple != d2_xi {
            failures += 1;
        }

        let (det_q, det_a_xi) = schur_det_factorization(&q, &parts).unwrap();
        total += 1;
        if det_q != det_a_xi {
            failures += 1;
        }
    }
    report(
        "proof checkpoints exact on 500 instances (incl. bracket constancy at 10 points)",
        failures,
        total,
    );
}

#[test]
fn criterion_9_oracle_agreement() {
    let mut failures = 0;
    let mut total = 0;
    for i in 0..200u64 {
        let n = 1 + (i % 3) as usize;
        let mut cfg = GenConfig::new(n, seed_for(0xC9, n as u64, i));
        // Well-conditioned for differentiation: moderate coefficients, the
        // point inside a small box, and the discriminant bounded away from
        // zero so the derivative scales stay tame.
        cfg.entry_range = 4;
        cfg.point_range = Some(2);
        cfg.min_discriminant = Some(1.0);
        cfg.min_d = Some(0.5);
        let (q, x) = random_quadric(&cfg).expect("generation");
        let qf = to_f64_surface(&q);
        let xf = to_f64_point(&x);
        let parts = decompose(&qf);
        let dd = discriminant_data(&parts);
        let branch = if i % 2 == 0 { BranchSign::Plus } else { BranchSign::Minus };

        let grad = gradient_y(&parts, &dd, &xf, branch).unwrap();
        let hess = hessian_y(&parts, &dd, &xf, branch).unwrap();

        let fd_g = fd_gradient(&parts, &xf, branch, &FdConfig::gradient_default()).unwrap();
        let fd_h = fd_hessian(&parts, &xf, branch, &FdConfig::hessian_default()).unwrap();
        for k in 0..n {
            total += 1;
            if (grad[k] - fd_g[k]).abs() > 1e-4 {
                failures += 1;
            }
            for l in 0..n {
                total += 1;
                if (hess[(k, l)] - fd_h[(k, l)]).abs() > 1e-4 {
                    failures += 1;
                }
            }
        }

        // Implicit-differentiation route at the solved root.
        let y0 = solve_y(&parts, &xf, branch).unwrap();
        let (im_g, im_h) = implicit_derivatives(&qf, &xf, &y0).unwrap();
        for k in 0..n {
            total += 1;
            if (grad[k] - im_g[k]).abs() > 1e-8 * grad[k].abs().max(1.0) {
                failures += 1;
            }
            for l in 0..n {
                total += 1;
                if (hess[(k, l)] - im_h[(k, l)]).abs() > 1e-8 * hess[(k, l)].abs().max(1.0) {
                    failures += 1;
                }
            }
        }
    }
    report(
        "closed forms vs finite differences (1e-4 abs) and implicit route (1e-8 rel), 200 instances",
        failures,
        total,
    );
}

#[test]
fn discriminant_positivity_is_required_for_real_branches() {
    // The verifier reports structured skips outside the real surface.
    let mut m = Matrix::zeros(3, 3);
    m.set(0, 0, rat(1, 1));
    m.set(1, 1, rat(1, 1));
    m.set(2, 2, rat(-1, 1));
    let circle = QuadricSurface::new(1, m).unwrap();
    let outcome = verify_identity(
        &circle,
        &ColVector::from_vec(vec![rat(2, 1)]),
        BranchSign::Plus,
        1e-8,
    );
    match outcome {
        VerifyOutcome::Skipped { reason, .. } => assert_eq!(reason, Error::NoRealSolution),
        other => panic!("expected skip, got {other:?}"),
    }

    // On the locus itself (x = 1) the exact path also skips.
    let outcome = verify_identity(
        &circle,
        &ColVector::from_vec(vec![rat(1, 1)]),
        BranchSign::Plus,
        1e-8,
    );
    assert!(matches!(
        outcome,
        VerifyOutcome::Skipped { reason: Error::OnDiscriminantLocus, .. }
    ));
}

#[test]
fn discriminant_value_magnitude_respects_generator_floor() {
    for seed in 0..50u64 {
        let mut cfg = GenConfig::new(3, seed);
        cfg.min_discriminant = Some(0.1);
        let (q, x) = random_quadric(&cfg).unwrap();
        let parts = decompose(&q);
        let dd = discriminant_data(&parts);
        assert!(discriminant_value(&dd, &x).unwrap().magnitude() >= 0.1);
    }
}
