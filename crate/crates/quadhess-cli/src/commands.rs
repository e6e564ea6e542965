//! The four subcommands: verify, sample, bench, checkpoints.

use std::time::Instant;

use num::BigRational;
use rayon::prelude::*;

use quadhess::identity::{
    constant_bracket, det_scaling, disc_hessian_det, schur_complement_det,
    schur_det_factorization, verify_identity, xi_consistency, VerifyOutcome, DEFAULT_FLOAT_TOL,
};
use quadhess::linalg::{determinant, ColVector, Matrix};
use quadhess::oracle::{
    fd_hessian, fd_hessian_root_evals, random_complex_quadric, random_quadric, FdConfig,
    GenConfig,
};
use quadhess::quadric::{
    decompose, discriminant_data, discriminant_value, hessian_y, BranchSign, ExactEmbed,
    QuadricSurface,
};
use crate::io::{load_quadric, parse_point, Mode, RenderScalar, TypedPoint, TypedQuadric};
use crate::report::{
    record_from_outcome, summarize, write_report, Record, ReportFile,
};
use crate::{BenchArgs, CheckpointsArgs, CliError, SampleArgs, VerifyArgs};

/// Seed for the i-th instance of a sweep; a fixed odd multiplier keeps the
/// derived streams disjoint and the mapping reproducible everywhere.
pub fn instance_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add((index + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Root evaluations consumed per Hessian by the closed form: one
/// discriminant square root at the point itself.
pub fn closed_form_root_evals(_n: usize) -> usize {
    1
}

fn exit_code_for(status: &str) -> i32 {
    match status {
        "verified" => 0,
        "skipped" => 2,
        _ => 1,
    }
}

/// Build the rayon pool honoring the `QUADHESS_THREADS` cap.
fn build_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("QUADHESS_THREADS") {
        let threads: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| {
                CliError::Usage(format!("QUADHESS_THREADS must be a positive integer, got `{v}`"))
            })?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| CliError::Parse(e.to_string()))
}

fn verify_one<S: RenderScalar>(
    q: &QuadricSurface<S>,
    x: &ColVector<S>,
    branch: BranchSign,
    tol: f64,
    mode: Mode,
) -> (Record, String) {
    let outcome = verify_identity(q, x, branch, tol);
    let record = record_from_outcome(0, &mode.to_string(), &outcome);
    let mut human = format!(
        "quadric: n={} ({mode})\npoint: {}\nbranch: {}\nmode: {mode}\n",
        q.n(),
        record.point,
        record.branch,
    );
    match &outcome {
        VerifyOutcome::Report(r) => {
            human.push_str(&format!(
                "lhs = {}\nrhs = {}\ndiscrepancy = {}\nstatus: {}\n",
                r.lhs.render(),
                r.rhs.render(),
                r.discrepancy.render(),
                record.status
            ));
        }
        VerifyOutcome::Skipped { reason, .. } => {
            human.push_str(&format!("status: skipped ({reason})\n"));
        }
    }
    (record, human)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let quadric = load_quadric(&args.q, args.mode)?;
    let point = parse_point(&args.point, args.mode, quadric.n())?;
    let tol = args.tol.unwrap_or(DEFAULT_FLOAT_TOL);
    let branch = args.branch.into();
    let n = quadric.n();

    let (record, human) = match (quadric, point) {
        (TypedQuadric::Rational(q), TypedPoint::Rational(x)) => {
            verify_one(&q, &x, branch, tol, args.mode)
        }
        (TypedQuadric::Float(q), TypedPoint::Float(x)) => {
            verify_one(&q, &x, branch, tol, args.mode)
        }
        (TypedQuadric::Complex(q), TypedPoint::Complex(x)) => {
            verify_one(&q, &x, branch, tol, args.mode)
        }
        _ => unreachable!("mode fixes both parse kinds"),
    };
    print!("{human}");

    let code = exit_code_for(&record.status);
    if let Some(path) = &args.json {
        let records = vec![record];
        let summary = summarize(&records);
        write_report(
            path,
            &ReportFile {
                command: "verify".into(),
                mode: args.mode.to_string(),
                tol,
                n: Some(n),
                trials: None,
                seed: None,
                records,
                summary,
            },
        )?;
    }
    Ok(code)
}

fn sample_one(args: &SampleArgs, index: u64, tol: f64) -> Record {
    let seed = instance_seed(args.seed, index);
    let branch = if index.is_multiple_of(2) { BranchSign::Plus } else { BranchSign::Minus };
    let mode = args.mode;
    let idx = index as usize;
    match mode {
        Mode::Exact => {
            let cfg = GenConfig::new(args.n, seed);
            match random_quadric(&cfg) {
                Ok((q, x)) => {
                    record_from_outcome(idx, "exact", &verify_identity(&q, &x, branch, tol))
                }
                Err(e) => generation_skip(idx, mode, branch, e),
            }
        }
        Mode::Float => {
            let mut cfg = GenConfig::new(args.n, seed);
            // Floating sweeps keep the discriminant away from zero so the
            // Hessian scale stays representable.
            cfg.min_discriminant = Some(0.1);
            match random_quadric(&cfg) {
                Ok((q, x)) => {
                    let qf = q.convert::<f64>();
                    let xf = x.map(ExactEmbed::embed);
                    record_from_outcome(idx, "float", &verify_identity(&qf, &xf, branch, tol))
                }
                Err(e) => generation_skip(idx, mode, branch, e),
            }
        }
        Mode::Complex => {
            let cfg = GenConfig::new(args.n, seed);
            match random_complex_quadric(&cfg) {
                Ok((q, x)) => {
                    record_from_outcome(idx, "complex", &verify_identity(&q, &x, branch, tol))
                }
                Err(e) => generation_skip(idx, mode, branch, e),
            }
        }
    }
}

fn generation_skip(index: usize, mode: Mode, branch: BranchSign, err: quadhess::Error) -> Record {
    Record {
        index,
        status: "skipped".into(),
        mode: mode.to_string(),
        branch: branch.to_string(),
        point: "-".into(),
        lhs: None,
        rhs: None,
        discrepancy: None,
        reason: Some(err.to_string()),
        checkpoints: Vec::new(),
    }
}

pub fn cmd_sample(args: &SampleArgs) -> Result<i32, CliError> {
    let tol = args.tol.unwrap_or(DEFAULT_FLOAT_TOL);
    let pool = build_pool()?;
    let mut records: Vec<Record> = pool.install(|| {
        (0..args.trials as u64)
            .into_par_iter()
            .map(|i| sample_one(args, i, tol))
            .collect()
    });
    // Parallel collect already preserves order; re-assert the indices so
    // reports are reproducible regardless of scheduling.
    records.sort_by_key(|r| r.index);
    let summary = summarize(&records);
    println!(
        "mode: {}  n: {}  trials: {}  seed: {}  tol: {}",
        args.mode, args.n, args.trials, args.seed, tol
    );
    println!(
        "verified: {}  skipped: {}  failed: {}",
        summary.verified, summary.skipped, summary.failed
    );
    let code = if summary.failed == 0 { 0 } else { 1 };
    if let Some(path) = &args.json {
        write_report(
            path,
            &ReportFile {
                command: "sample".into(),
                mode: args.mode.to_string(),
                tol,
                n: Some(args.n),
                trials: Some(args.trials),
                seed: Some(args.seed),
                records,
                summary,
            },
        )?;
    }
    Ok(code)
}

fn signed_hessian_det_lhs(hess: &Matrix<f64>, branch: BranchSign, delta: f64, n: usize) -> f64 {
    let flip: f64 = branch.opposite().scalar();
    determinant(&hess.scale(&flip)).expect("square")
        * delta.sqrt().powi(n as i32 + 2)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<i32, CliError> {
    let ns: Vec<usize> = args
        .n_list
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| CliError::Parse(format!("bad dimension `{t}` in --n-list")))
        })
        .collect::<Result<_, _>>()?;
    if args.reps == 0 {
        return Err(CliError::Usage("--reps must be positive".into()));
    }

    let mut csv = String::from("n,method,mean_ns,max_abs_discrepancy\n");
    println!("{:>3}  {:>18}  {:>12}  {:>22}  {:>11}", "n", "method", "mean_ns", "max_abs_discrepancy", "root_evals");
    for &n in &ns {
        let mut closed_total = 0u128;
        let mut fd_total = 0u128;
        let mut max_disc = 0.0f64;
        for rep in 0..args.reps as u64 {
            let mut cfg = GenConfig::new(n, instance_seed(args.seed ^ ((n as u64) << 32), rep));
            // The truncation error of the second-difference stencil grows
            // with the derivative scale, which grows with n; the floor on
            // the discriminant has to grow along with it.
            cfg.entry_range = 3;
            cfg.point_range = Some(1);
            cfg.min_discriminant = Some(4.0 * (n * n) as f64);
            cfg.min_d = Some(1.0);
            let (q, x) = random_quadric(&cfg).map_err(|e| CliError::Parse(e.to_string()))?;
            let qf = q.convert::<f64>();
            let xf = x.map(ExactEmbed::embed);
            let parts = decompose(&qf);
            let dd = discriminant_data(&parts);
            let delta = discriminant_value(&dd, &xf).expect("dimension");
            let branch = BranchSign::Plus;

            let start = Instant::now();
            let hess_closed = hessian_y(&parts, &dd, &xf, branch).expect("well-conditioned");
            std::hint::black_box(signed_hessian_det_lhs(&hess_closed, branch, delta, n));
            closed_total += start.elapsed().as_nanos();

            let start = Instant::now();
            let hess_fd = fd_hessian(&parts, &xf, branch, &FdConfig::hessian_default())
                .expect("well-conditioned");
            std::hint::black_box(signed_hessian_det_lhs(&hess_fd, branch, delta, n));
            fd_total += start.elapsed().as_nanos();

            // Cross-discrepancy between the methods, entry by entry.
            for i in 0..n {
                for j in 0..n {
                    max_disc = max_disc.max((hess_closed[(i, j)] - hess_fd[(i, j)]).abs());
                }
            }
        }
        let closed_mean = closed_total / args.reps as u128;
        let fd_mean = fd_total / args.reps as u128;
        for (method, mean, evals) in [
            ("closed_form", closed_mean, closed_form_root_evals(n)),
            ("finite_difference", fd_mean, fd_hessian_root_evals(n)),
        ] {
            csv.push_str(&format!("{n},{method},{mean},{max_disc:e}\n"));
            println!("{n:>3}  {method:>18}  {mean:>12}  {max_disc:>22e}  {evals:>11}");
        }
    }

    if let Some(path) = &args.csv {
        std::fs::write(path, csv)
            .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(0)
}

pub fn cmd_checkpoints(args: &CheckpointsArgs) -> Result<i32, CliError> {
    if args.mode != Mode::Exact {
        return Err(CliError::Usage(
            "checkpoints are exact-only; pass --mode exact".into(),
        ));
    }
    let quadric = load_quadric(&args.q, Mode::Exact)?;
    let point = parse_point(&args.point, Mode::Exact, quadric.n())?;
    let (q, x) = match (quadric, point) {
        (TypedQuadric::Rational(q), TypedPoint::Rational(x)) => (q, x),
        _ => unreachable!("exact mode parses rationals"),
    };
    let parts = decompose(&q);
    let dd = discriminant_data(&parts);

    println!("quadric: n={} (exact)", q.n());
    println!("point: {}", crate::io::render_point(&x));

    let mut all_ok = true;
    let mut pair = |label: &str,
                    undefined: &str,
                    result: Result<(BigRational, BigRational), quadhess::Error>| {
        match result {
            Ok((lhs, rhs)) => {
                let ok = lhs == rhs;
                all_ok &= ok;
                println!("{label}: {lhs} = {rhs} [{}]", if ok { "ok" } else { "MISMATCH" });
            }
            Err(_) => println!("{label}: undefined ({undefined})"),
        }
    };

    pair("disc_hessian_det", "singular A", disc_hessian_det(&parts, &dd));
    pair("constant_bracket", "singular Lambda", constant_bracket(&dd, &x));
    pair("det_scaling", "singular Lambda", det_scaling(&q, &parts, &dd, &x));
    pair(
        "xi_consistency",
        "singular A or Lambda",
        xi_consistency(&parts, &dd),
    );
    match schur_complement_det(&parts) {
        Ok(xi) => println!("schur_complement_det: {xi}"),
        Err(_) => println!("schur_complement_det: undefined (singular A)"),
    }
    pair(
        "schur_factorization",
        "singular A",
        schur_det_factorization(&q, &parts),
    );

    if all_ok {
        println!("all defined checkpoints agree");
        Ok(0)
    } else {
        println!("checkpoint mismatch detected");
        Ok(1)
    }
}
