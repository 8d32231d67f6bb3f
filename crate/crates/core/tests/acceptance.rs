//! Acceptance suite: each test prints one pass/fail line and enforces its
//! runtime budget. Criteria 9 and 10 (the scan-level checks) live in the CLI
//! crate's acceptance suite, next to the binary they exercise.

use interfgeo::bandmodels::{bloch_point, dirac_model};
use interfgeo::geometry::{
    dist_base, dist_base_bruteforce, hermitian_form, interferometric_metric_fd,
    purification_inner, BundlePoint,
};
use interfgeo::interferometer::{
    max_port_probability, port_probability, InterferometerSetup,
};
use interfgeo::numerics::{eigh, ginibre, haar_unitary, CMatrix};
use interfgeo::pullback::{
    bures_integrand, chern_number, interf_integrand, metric_scan, per_momentum_oracle,
};
use interfgeo::states::{decompose, gibbs, MixedState, DEFAULT_EPS_DEG, DEFAULT_EPS_ZERO};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

fn report(number: u32, name: &str, started: Instant, budget_secs: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("criterion {number:02} ({name}): PASS in {elapsed:.2} s (budget {budget_secs} s)");
    assert!(
        elapsed < budget_secs,
        "criterion {number} exceeded its runtime budget: {elapsed:.2} s"
    );
}

/// Random state with the given block ranks (descending-eigenvalue order) in
/// dimension `n`; leftover dimensions form the kernel. Probabilities are
/// drawn with comfortable gaps so clustering never becomes ambiguous.
fn random_state_of_type(rng: &mut ChaCha8Rng, n: usize, ranks: &[usize]) -> MixedState {
    let total_rank: usize = ranks.iter().sum();
    assert!(total_rank <= n);
    let probs = loop {
        let mut raw: Vec<f64> = (0..ranks.len()).map(|_| rng.random::<f64>() + 0.05).collect();
        raw.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let norm: f64 = raw.iter().zip(ranks).map(|(p, &r)| p * r as f64).sum();
        let probs: Vec<f64> = raw.iter().map(|p| p / norm).collect();
        let separated = probs
            .windows(2)
            .all(|w| w[0] - w[1] > 0.03 * probs[0]);
        if separated {
            break probs;
        }
    };
    let basis = haar_unitary(rng, n);
    let mut matrix = CMatrix::zeros(n, n);
    let mut offset = 0usize;
    for (&p, &r) in probs.iter().zip(ranks) {
        let frame = CMatrix::from_fn(n, r, |row, col| basis[(row, offset + col)]);
        matrix += (&frame * frame.adjoint()).scale(p);
        offset += r;
    }
    MixedState::new(matrix).expect("constructed state is valid")
}

fn random_bundle_point(rng: &mut ChaCha8Rng, n: usize, ranks: &[usize]) -> BundlePoint {
    let state = random_state_of_type(rng, n, ranks);
    decompose(&state, DEFAULT_EPS_DEG, DEFAULT_EPS_ZERO)
        .expect("decomposition of a freshly composed state")
        .into()
}

#[test]
fn criterion_01_gauge_infimum_correctness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let type_table: [(usize, &[usize]); 5] = [
        (4, &[1, 2, 1]),
        (4, &[2, 2]),
        (3, &[1, 1, 1]),
        (5, &[2, 1]),
        (6, &[2, 2]),
    ];
    for case in 0..50 {
        let (n, ranks) = type_table[case % type_table.len()];
        let rho = random_state_of_type(&mut rng, n, ranks);
        let sigma = random_state_of_type(&mut rng, n, ranks);
        let closed = dist_base(&rho, &sigma, DEFAULT_EPS_DEG, DEFAULT_EPS_ZERO).unwrap();
        let sampled = dist_base_bruteforce(&rho, &sigma, 10_000, 9000 + case as u64).unwrap();
        assert!(
            sampled >= closed - 1e-9,
            "case {case}: sampled infimum {sampled} undercut the closed form {closed}"
        );
        assert!(
            (sampled - closed).abs() < 1e-6,
            "case {case}: |{sampled} - {closed}| >= 1e-6"
        );
    }
    report(1, "gauge-infimum correctness", started, 60.0);
}

#[test]
fn criterion_02_purification_identity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let type_table: [(usize, &[usize]); 3] = [(4, &[1, 2, 1]), (4, &[2, 2]), (3, &[1, 1, 1])];
    let mut worst = 0.0_f64;
    for case in 0..500 {
        let (n, ranks) = type_table[case % type_table.len()];
        let p = random_bundle_point(&mut rng, n, ranks);
        let q = random_bundle_point(&mut rng, n, ranks);
        let direct = hermitian_form(&p, &q).unwrap();
        let purified = purification_inner(&p, &q).unwrap();
        worst = worst.max((direct - purified).norm());
    }
    assert!(worst < 1e-12, "max deviation {worst:.3e}");
    report(2, "purification identity", started, 5.0);
}

#[test]
fn criterion_03_metric_distance_consistency() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for case in 0..20 {
        let n = 2 + case % 2;
        let h0 = {
            let g = ginibre(&mut rng, n, n);
            let h = (&g + g.adjoint()).scale(0.5);
            let norm = h.norm();
            h.unscale(norm)
        };
        let h1 = {
            let g = ginibre(&mut rng, n, n);
            let h = (&g + g.adjoint()).scale(0.5);
            let norm = h.norm();
            h.unscale(norm)
        };
        let beta = 0.8 + 0.6 * rng.random::<f64>();
        let curve = move |t: f64| gibbs(&(&h0 + h1.scale(t)), beta).unwrap();
        let t0 = 0.3;
        let metric = interferometric_metric_fd(&curve, t0, 3e-6).unwrap();

        let coeff = |delta: f64| {
            let d = dist_base(
                &curve(t0),
                &curve(t0 + delta),
                DEFAULT_EPS_DEG,
                DEFAULT_EPS_ZERO,
            )
            .unwrap();
            d * d / (delta * delta)
        };

        // log-log slope of d^2 against delta
        let deltas: [f64; 4] = [2e-2, 1e-2, 5e-3, 2.5e-3];
        let points: Vec<(f64, f64)> = deltas
            .iter()
            .map(|&d| (d.ln(), (coeff(d) * d * d).ln()))
            .collect();
        let len = points.len() as f64;
        let sx: f64 = points.iter().map(|p| p.0).sum();
        let sy: f64 = points.iter().map(|p| p.1).sum();
        let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
        let slope = (len * sxy - sx * sy) / (len * sxx - sx * sx);
        assert!(
            (slope - 2.0).abs() <= 0.1,
            "case {case}: log-log slope {slope}"
        );

        // Richardson-extrapolated quadratic coefficient vs the metric
        let d0 = 4e-3;
        let extrapolated = (8.0 * coeff(d0 / 4.0) - 6.0 * coeff(d0 / 2.0) + coeff(d0)) / 3.0;
        let relative = (extrapolated - metric.total).abs() / metric.total.max(1e-300);
        assert!(
            relative < 1e-5,
            "case {case}: coefficient {extrapolated} vs metric {} (rel {relative:.3e})",
            metric.total
        );
    }
    report(3, "metric-distance consistency", started, 30.0);
}

#[test]
fn criterion_04_interferometer_theorem() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let type_table: [(usize, &[usize]); 2] = [(4, &[1, 2, 1]), (4, &[2, 2])];
    for case in 0..20 {
        let (n, ranks) = type_table[case % type_table.len()];
        let rho = random_state_of_type(&mut rng, n, ranks);
        let u = haar_unitary(&mut rng, n);
        let (pr_max, v_opt) =
            max_port_probability(&rho, &u, DEFAULT_EPS_DEG, DEFAULT_EPS_ZERO).unwrap();

        let rotated = MixedState::new(&u * rho.matrix() * u.adjoint()).unwrap();
        let distance = dist_base(&rho, &rotated, DEFAULT_EPS_DEG, DEFAULT_EPS_ZERO).unwrap();
        assert!(
            (pr_max - (1.0 - 0.25 * distance * distance)).abs() < 1e-12,
            "case {case}: theorem identity violated"
        );

        let attained = port_probability(
            &InterferometerSetup::new(rho.clone(), u.clone(), v_opt).unwrap(),
        );
        assert!((attained - pr_max).abs() < 1e-10, "case {case}: optimum not attained");

        let d = decompose(&rho, DEFAULT_EPS_DEG, DEFAULT_EPS_ZERO).unwrap();
        for _ in 0..100 {
            let mut v = CMatrix::identity(n, n);
            for block in d.blocks() {
                v -= block.projector();
                let g = haar_unitary(&mut rng, block.rank());
                v += block.frame() * g * block.frame().adjoint();
            }
            let setup = InterferometerSetup::new(rho.clone(), u.clone(), v).unwrap();
            assert!(
                port_probability(&setup) <= pr_max + 1e-10,
                "case {case}: a random gauge beat the optimum"
            );
        }
    }
    report(4, "interferometer theorem", started, 10.0);
}

#[test]
fn criterion_05_closed_form_oracle_equivalence() {
    let started = Instant::now();
    let model = dirac_model();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < 50 {
        attempts += 1;
        assert!(attempts < 5000, "sampling the gapped region should not starve");
        let k = [
            rng.random::<f64>() * 2.0 * PI - PI,
            rng.random::<f64>() * 2.0 * PI - PI,
        ];
        let m = rng.random::<f64>() * 6.0 - 3.0;
        let beta = 0.1 + 19.9 * rng.random::<f64>();
        let Ok(bp) = bloch_point(&model, &k, m) else {
            continue;
        };
        // gap check: exclude the neighborhoods of the transitions, where the
        // per-momentum evaluation is legitimate but the relative comparison
        // degenerates with the integrand itself
        if bp.energy < 0.2 {
            continue;
        }
        let interf = interf_integrand(&bp, beta);
        let bures = bures_integrand(&bp, beta);
        if interf < 1e-4 {
            continue;
        }
        let delta = 1e-5 * m.abs().max(1.0);
        let Ok((oracle_interf, oracle_bures)) = per_momentum_oracle(&model, &k, m, beta, delta)
        else {
            // a Boltzmann weight straddled the kernel threshold inside the
            // stencil; this (k, M, beta) draw is not usable for the check
            continue;
        };
        assert!(
            (oracle_interf - interf).abs() <= 1e-6 * interf.abs(),
            "interferometric mismatch at k={k:?} M={m} beta={beta}: oracle {oracle_interf}, closed {interf}"
        );
        assert!(
            (oracle_bures - bures).abs() <= 1e-6 * bures.abs().max(1e-9),
            "Bures mismatch at k={k:?} M={m} beta={beta}: oracle {oracle_bures}, closed {bures}"
        );
        accepted += 1;
    }
    report(5, "closed-form oracle equivalence", started, 60.0);
}

#[test]
fn criterion_06_tensor_product_additivity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let unit_hermitian = |rng: &mut ChaCha8Rng| {
        let g = ginibre(rng, 2, 2);
        let h = (&g + g.adjoint()).scale(0.5);
        let norm = h.norm();
        h.unscale(norm)
    };
    for case in 0..20 {
        let h0a = unit_hermitian(&mut rng);
        let h1a = unit_hermitian(&mut rng);
        let h0b = unit_hermitian(&mut rng);
        let h1b = unit_hermitian(&mut rng);
        let beta_a = 0.7 + 0.8 * rng.random::<f64>();
        let beta_b = 0.7 + 0.8 * rng.random::<f64>();
        let curve_a = {
            let (h0, h1) = (h0a.clone(), h1a.clone());
            move |t: f64| gibbs(&(&h0 + h1.scale(t)), beta_a).unwrap()
        };
        let curve_b = {
            let (h0, h1) = (h0b.clone(), h1b.clone());
            move |t: f64| gibbs(&(&h0 + h1.scale(t)), beta_b).unwrap()
        };
        let product = {
            let (ca, cb) = (curve_a.clone(), curve_b.clone());
            move |t: f64| ca(t).tensor(&cb(t))
        };
        let ga = interferometric_metric_fd(curve_a, 0.2, 3e-6).unwrap();
        let gb = interferometric_metric_fd(curve_b, 0.2, 3e-6).unwrap();
        let gp = interferometric_metric_fd(product, 0.2, 3e-6).unwrap();
        assert!(
            (gp.total - ga.total - gb.total).abs() < 1e-9,
            "case {case}: additivity residual {:e}",
            (gp.total - ga.total - gb.total).abs()
        );
    }
    report(6, "tensor-product additivity", started, 10.0);
}

#[test]
fn criterion_07_limit_checks() {
    let started = Instant::now();
    let model = dirac_model();

    // beta -> 0: the interferometric quantum part halves the Fubini-Study total
    let hot = &metric_scan(&model, &[1.0], &[1e10], 201)[0];
    let halving = (hot.g_interf.quantum - 0.5 * hot.g_fs).abs() / (0.5 * hot.g_fs);
    assert!(halving < 1e-8, "halving residual {halving:.3e}");

    // beta -> infinity at gapped M = 1: both quantum parts recover Fubini-Study
    let cold = &metric_scan(&model, &[1.0], &[1.0 / 200.0], 201)[0];
    let interf_residual = (cold.g_interf.quantum - cold.g_fs).abs() / cold.g_fs;
    let bures_residual = (cold.g_bures.quantum - cold.g_fs).abs() / cold.g_fs;
    assert!(interf_residual < 1e-6, "interferometric residual {interf_residual:.3e}");
    assert!(bures_residual < 1e-6, "Bures residual {bures_residual:.3e}");
    report(7, "limit checks", started, 120.0);
}

#[test]
fn criterion_08_chern_phase_map() {
    let started = Instant::now();
    let model = dirac_model();
    assert_eq!(chern_number(&model, -1.0, 41).unwrap(), 1);
    assert_eq!(chern_number(&model, 1.0, 41).unwrap(), -1);
    assert_eq!(chern_number(&model, 3.0, 41).unwrap(), 0);
    report(8, "Chern phase map", started, 5.0);
}

/// Spot check shared with the eigensolver contract: reconstruction residual
/// for a random 6x6 Hermitian matrix stays below the documented bound.
#[test]
fn eigensolver_contract_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let g = ginibre(&mut rng, 6, 6);
    let h = (&g + g.adjoint()).scale(0.5);
    let r = eigh(&h).unwrap();
    let lam = CMatrix::from_fn(6, 6, |i, j| {
        if i == j {
            Complex64::new(r.eigenvalues[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let residual = (&r.eigenvectors * lam * r.eigenvectors.adjoint() - &h).norm();
    assert!(residual <= 1e-12 * (1.0 + h.norm()));
}
