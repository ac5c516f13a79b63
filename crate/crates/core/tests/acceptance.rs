//! Acceptance criteria. Runs as a plain binary (`harness = false`) so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gaussform::engineering::{engineer, parameter_count, random_recipe};
use gaussform::entanglement::{entropy_from_schmidt, entropy_one_vs_rest, entropy_via_pairwise, full_report, log_negativity_pair};
use gaussform::gmps::{min_bonds_general, parity_table};
use gaussform::standard_form::{
    det_identity_residual, harmonic_ground_state, reconstruct_diagonal, reduce, ring_potential, williamson_jacobian,
    williamson_residual,
};
use gaussform::symplectic::{squeezer, SymplecticMatrix};
use gaussform::{CovarianceMatrix, Tolerances};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SQUEEZE_MAX: f64 = 4.0;
const SWEEP_SEEDS: u64 = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn sweep_state(n: usize, k: u64) -> CovarianceMatrix {
    engineer(&random_recipe(n, 1000 * n as u64 + k, SQUEEZE_MAX).unwrap()).unwrap().cm
}

fn sweep() -> impl Iterator<Item = (usize, u64)> {
    (2..=10).flat_map(|n| (0..SWEEP_SEEDS).map(move |k| (n, k)))
}

fn c1_parameter_count() -> Outcome {
    for n in 2..=12 {
        let e = engineer(&random_recipe(n, n as u64, SQUEEZE_MAX).unwrap()).unwrap();
        let expected = n * (n - 1) / 2;
        if e.free_parameters() != expected || parameter_count(n) != expected {
            return check(false, format!("N = {n}: audited {} != {expected}", e.free_parameters()));
        }
        let sf = reduce(&e.cm, &Tolerances::default()).unwrap().form;
        if sf.parameters().len() != expected {
            return check(false, format!("N = {n}: extracted {} values", sf.parameters().len()));
        }
    }
    check(true, "N = 2..12: audited and extracted counts equal N(N-1)/2")
}

fn c2_purity() -> Outcome {
    let mut worst = 0.0f64;
    for (n, k) in sweep() {
        let cm = sweep_state(n, k);
        let p = cm.purity();
        let sigma = cm.max_abs();
        let ratio = p.residual / (1e-9 * (1.0 + sigma * sigma));
        worst = worst.max(ratio);
    }
    check(worst <= 1.0, format!("max residual / (1e-9(1+|σ|²)) = {worst:.3e} over 900 states"))
}

fn c3_schmidt_spectrum() -> Outcome {
    let mut worst = 0.0f64;
    for (n, k) in sweep() {
        let cm = sweep_state(n, k);
        let a = cm.block(1, 1).unwrap().determinant().sqrt();
        let spec = cm.without_mode(1).unwrap().spectrum().unwrap();
        worst = worst.max((spec.values[0] - a).abs());
        for v in &spec.values[1..] {
            worst = worst.max((v - 1.0).abs());
        }
    }
    check(worst <= 1e-7, format!("max deviation from {{a,1,…,1}} = {worst:.3e} (tol 1e-7)"))
}

fn c4_det_identity() -> Outcome {
    let mut worst = 0.0f64;
    for (n, k) in sweep() {
        let cm = sweep_state(n, k);
        for mode in 1..=n {
            worst = worst.max(det_identity_residual(&cm, mode).unwrap().abs());
        }
    }
    check(worst <= 1e-8, format!("max |det σᵢ - 1 + Σ det εᵢⱼ| = {worst:.3e} (tol 1e-8)"))
}

fn c5_reconstruction() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for k in 0..100u64 {
        let n = 2 + (k as usize % 7);
        let cm = engineer(&random_recipe(n, 5000 + k, SQUEEZE_MAX).unwrap()).unwrap().cm;
        let sf = reduce(&cm, &Tolerances::default()).unwrap().form;
        let rec = match reconstruct_diagonal(&sf.parameters(), n) {
            Ok(r) => r,
            Err(e) => return check(false, format!("recipe {k} (N = {n}): {e}")),
        };
        for i in 0..n {
            worst = worst.max((rec.form.vq()[(i, i)] - sf.vq()[(i, i)]).abs());
        }
        count += 1;
    }

    // Central differences of the diagonal residual, step 1e-6.
    let mut jac_worst = 0.0f64;
    for k in 0..20u64 {
        let n = 2 + (k as usize % 7);
        let cm = engineer(&random_recipe(n, 7000 + k, SQUEEZE_MAX).unwrap()).unwrap().cm;
        let mut v = reduce(&cm, &Tolerances::default()).unwrap().form.vq().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(k);
        for i in 0..n {
            v[(i, i)] *= rng.random_range(1.0..1.5);
        }
        let jac = williamson_jacobian(&v).unwrap();
        let h = 1e-6;
        let mut fd = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut plus = v.clone();
            let mut minus = v.clone();
            plus[(j, j)] += h;
            minus[(j, j)] -= h;
            let col = (williamson_residual(&plus).unwrap() - williamson_residual(&minus).unwrap()) / (2.0 * h);
            fd.set_column(j, &col);
        }
        jac_worst = jac_worst.max((&fd - &jac).amax() / jac.amax());
    }
    check(
        worst <= 1e-6 && jac_worst <= 1e-5,
        format!("{count} recipes: max diagonal error {worst:.3e} (tol 1e-6); Jacobian vs FD relative {jac_worst:.3e} (tol 1e-5)"),
    )
}

fn c6_gmps() -> Outcome {
    let table = parity_table(2, 100).unwrap();
    for r in &table {
        let (n, m) = (r.n_modes, r.min_bonds_general);
        if !(2 * (m - 1) * (2 * m - 1) < n - 1 && n - 1 <= 2 * m * (2 * m + 1)) {
            return check(false, format!("bracket fails at N = {n}, M = {m}"));
        }
        if n <= 7 && m != 1 {
            return check(false, format!("N = {n} needs M = {m}, expected 1"));
        }
    }
    if min_bonds_general(8) != 2 {
        return check(false, "N = 8 does not need two bonds");
    }
    let (lo, hi) = table
        .iter()
        .filter(|r| (50..=100).contains(&r.n_modes))
        .fold((f64::MAX, f64::MIN), |(lo, hi), r| (lo.min(r.scaling), hi.max(r.scaling)));
    check(
        (0.40..=0.75).contains(&lo) && (0.40..=0.75).contains(&hi),
        format!("bracket holds for N = 2..100; M=1 up to N=7, M=2 at N=8; M/√N in [{lo:.3}, {hi:.3}] for N in [50,100]"),
    )
}

fn nearest_neighbor_logneg(n: usize, coupling: f64) -> f64 {
    let cm = harmonic_ground_state(&ring_potential(n, coupling).unwrap()).unwrap();
    log_negativity_pair(&cm, 1, 2).unwrap()
}

fn c7_ring_parity() -> Outcome {
    let (e4, e5, e6) = (
        nearest_neighbor_logneg(4, 0.5),
        nearest_neighbor_logneg(5, 0.5),
        nearest_neighbor_logneg(6, 0.5),
    );
    let mid = 0.5 * (e4 + e6);
    check(e5 < mid, format!("E_N(5) = {e5:.6} < (E_N(4) + E_N(6))/2 = {mid:.6}"))
}

fn c8_entropy() -> Outcome {
    let mut worst = 0.0f64;
    for (n, k) in sweep() {
        let cm = sweep_state(n, k);
        let sf = reduce(&cm, &Tolerances::default()).unwrap().form;
        for mode in 1..=n {
            let a = entropy_one_vs_rest(&cm, mode).unwrap();
            let b = entropy_via_pairwise(&sf, mode).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    let f = entropy_from_schmidt(1.25);
    check(
        worst <= 1e-8 && (f - 0.5662).abs() <= 5e-4,
        format!("max route disagreement {worst:.3e} (tol 1e-8); f(1.25) = {f:.6}"),
    )
}

fn random_local(n: usize, rng: &mut ChaCha8Rng) -> SymplecticMatrix {
    let mut s = SymplecticMatrix::identity(n).unwrap();
    for k in 1..=n {
        let parts = [
            SymplecticMatrix::rotation(n, k, rng.random_range(0.0..std::f64::consts::TAU)).unwrap(),
            squeezer(n, k, rng.random_range(-1.0f64..1.0).exp()).unwrap(),
            SymplecticMatrix::rotation(n, k, rng.random_range(0.0..std::f64::consts::TAU)).unwrap(),
        ];
        for p in &parts {
            s = s.then(p).unwrap();
        }
    }
    s
}

fn c9_local_invariance() -> Outcome {
    let mut worst = 0.0f64;
    let mut states = 0;
    for n in 2..=8 {
        for k in 0..5u64 {
            let cm = sweep_state(n, k);
            let base = full_report(&cm).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(90_000 + 10 * n as u64 + k);
            for _ in 0..20 {
                let moved = full_report(&cm.transform(&random_local(n, &mut rng)).unwrap()).unwrap();
                for i in 0..n {
                    worst = worst.max((base.per_mode_entropy[i] - moved.per_mode_entropy[i]).abs());
                    for j in 0..n {
                        worst = worst.max((base.pairwise_logneg[i][j] - moved.pairwise_logneg[i][j]).abs());
                    }
                }
            }
            states += 1;
        }
    }
    check(worst <= 1e-8, format!("{states} states × 20 local symplectics: max change {worst:.3e} (tol 1e-8)"))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 9] = [
        ("1 parameter count", c1_parameter_count, Some(Duration::from_secs(1))),
        ("2 purity identity", c2_purity, Some(Duration::from_secs(10))),
        ("3 Schmidt spectrum", c3_schmidt_spectrum, None),
        ("4 standard-form det identity", c4_det_identity, None),
        ("5 reconstruction round trip", c5_reconstruction, None),
        ("6 GMPS thresholds", c6_gmps, Some(Duration::from_secs(1))),
        ("7 ring parity probe", c7_ring_parity, Some(Duration::from_secs(1))),
        ("8 entropy consistency", c8_entropy, None),
        ("9 local-unitary invariance", c9_local_invariance, None),
    ];

    let mut failures = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let Some(limit) = budget {
            if elapsed > limit {
                outcome.pass = false;
                outcome.detail.push_str(&format!("; runtime {elapsed:.2?} exceeds {limit:?}"));
            }
        }
        if !outcome.pass {
            failures += 1;
        }
        println!(
            "[{}] criterion {name}: {} ({elapsed:.2?})",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
