//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one `[PASS]`/`[FAIL]` line.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use invar::chern::Partition;
use invar::verify::{
    check_a1, check_a2, check_a3, check_adjoint_pin, check_chern_integral, check_chern_reduce,
    check_fubini_study, check_linear, check_oracle_agreement, check_roundtrip, CheckRecord,
    JetSettings, VerifyError,
};

/// Every identity below is compared with exact rational arithmetic.
const TOLERANCE: &str = "exact";

const A3_POINTS: u64 = 10;
const CHERN_TRIALS: usize = 20;
const ORACLE_INVARIANTS: u64 = 100;
const ORACLE_TRIALS: usize = 20;
const ROUNDTRIPS: u64 = 50;
const REDUCTIONS: u64 = 50;
const MODE_BOUND: i32 = 2;

struct Outcome {
    checks: usize,
    failures: Vec<String>,
}

fn run(records: Result<Vec<CheckRecord>, VerifyError>) -> Outcome {
    match records {
        Ok(rs) => Outcome {
            checks: rs.len(),
            failures: rs
                .iter()
                .filter(|r| !r.passed())
                .map(|r| {
                    format!(
                        "{} (dim {}, seed {:?}): {} vs {}",
                        r.check, r.dim, r.seed, r.lhs, r.rhs
                    )
                })
                .collect(),
        },
        Err(e) => Outcome {
            checks: 0,
            failures: vec![format!("error: {}", e)],
        },
    }
}

fn criterion_01_a1_identity() -> Outcome {
    let cfg = JetSettings { audit: true };
    run([1, 2, 3].into_iter().map(|n| check_a1(n, cfg)).collect())
}

fn criterion_02_a2_identity() -> Outcome {
    let cfg = JetSettings { audit: true };
    run([1, 2].into_iter().map(|n| check_a2(n, cfg)).collect())
}

fn criterion_03_a3_identity() -> Outcome {
    let cfg = JetSettings { audit: true };
    run((0..A3_POINTS)
        .map(|seed| check_a3(2, 1000 + seed, cfg))
        .collect())
}

fn criterion_04_linear_terms() -> Outcome {
    let cfg = JetSettings { audit: false };
    run([1, 2]
        .into_iter()
        .flat_map(|n| (1..=5).map(move |j| check_linear(n, j, cfg)))
        .collect())
}

fn criterion_05_fubini_study() -> Outcome {
    run([1, 2]
        .into_iter()
        .map(|n| check_fubini_study(n, 3))
        .collect())
}

fn criterion_06_chern_vanishing() -> Outcome {
    let mut out = Vec::new();
    for sigma in 1..=4 {
        for p in Partition::all(sigma) {
            for n in [sigma - 1, sigma] {
                if n == 0 {
                    continue;
                }
                out.push(check_chern_integral(
                    &p,
                    n,
                    CHERN_TRIALS,
                    MODE_BOUND,
                    60 + sigma as u64,
                ));
            }
        }
    }
    run(out.into_iter().collect())
}

fn criterion_07_oracle_agreement() -> Outcome {
    run((0..ORACLE_INVARIANTS)
        .map(|seed| check_oracle_agreement(700 + seed, ORACLE_TRIALS, MODE_BOUND))
        .collect())
}

fn criterion_08_decomposition_roundtrip() -> Outcome {
    run((0..ROUNDTRIPS)
        .map(|seed| check_roundtrip(800 + seed))
        .collect())
}

fn criterion_09_chern_reduce() -> Outcome {
    run((0..REDUCTIONS)
        .map(|seed| check_chern_reduce(900 + seed))
        .collect())
}

fn criterion_10_adjoint_pin() -> Outcome {
    run([1, 2]
        .into_iter()
        .map(|n| check_adjoint_pin(n, 5))
        .collect())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        (
            "01 a1 = S/2, n in {1,2,3}",
            criterion_01_a1_identity,
            Duration::from_secs(10),
        ),
        (
            "02 a2 = P2 + ΔS/3, n in {1,2}",
            criterion_02_a2_identity,
            Duration::from_secs(300),
        ),
        (
            "03 a3 = P3 + divQ + Δ²S/8, n = 2, 10 points",
            criterion_03_a3_identity,
            Duration::from_secs(1800),
        ),
        (
            "04 linear part of a_j, j <= 5, n in {1,2}",
            criterion_04_linear_terms,
            Duration::from_secs(300),
        ),
        (
            "05 Fubini-Study a_j = e_j(1..n)",
            criterion_05_fubini_study,
            Duration::from_secs(300),
        ),
        (
            "06 Chern polynomials integrate to zero",
            criterion_06_chern_vanishing,
            Duration::from_secs(300),
        ),
        (
            "07 oracle agrees with the formal test",
            criterion_07_oracle_agreement,
            Duration::from_secs(600),
        ),
        (
            "08 decomposition round-trip",
            criterion_08_decomposition_roundtrip,
            Duration::from_secs(900),
        ),
        (
            "09 chern_reduce structure",
            criterion_09_chern_reduce,
            Duration::from_secs(300),
        ),
        (
            "10 adjoint pin, t-order <= 5",
            criterion_10_adjoint_pin,
            Duration::from_secs(60),
        ),
    ];
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let ok = outcome.failures.is_empty() && outcome.checks > 0;
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] criterion {} ({} checks, {}, {:.2?}{})",
            if ok { "PASS" } else { "FAIL" },
            name,
            outcome.checks,
            TOLERANCE,
            elapsed,
            if elapsed > budget {
                ", over budget"
            } else {
                ""
            }
        );
        for msg in outcome.failures.iter().take(3) {
            println!("       {}", msg);
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
