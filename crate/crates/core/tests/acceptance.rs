//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (run with `--nocapture` to see them). Tolerances are
//! pinned here, not configurable.

use cemsim_core::closedform::{self, Scheme};
use cemsim_core::device;
use cemsim_core::fock::{self, FockSpace, SqueezeSign};
use cemsim_core::gaussian::{self, GaussianState};
use cemsim_core::lindblad::{self, SolverOptions, StepSize};
use cemsim_core::metrics;
use cemsim_core::model;
use cemsim_core::Complex64;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(n: usize, name: &str, detail: String) {
    println!("ACCEPTANCE {n:>2} {name}: PASS ({detail})");
}

fn lin_grid(t_max: f64, samples: usize) -> Vec<f64> {
    (0..=samples).map(|k| t_max * k as f64 / samples as f64).collect()
}

fn max_abs(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// 1. TMSV variance law: duan v_min = 2e^{−2ζ} for ζ ∈ {0.1, 0.5, 1.0};
/// relative error ≤ 1e-6 on the Gaussian path, ≤ 1e-4 on the Fock path
/// (dims 30).
#[test]
fn criterion_01_tmsv_variance_law() {
    let mut worst_gauss = 0.0f64;
    let mut worst_fock = 0.0f64;
    for zeta in [0.1f64, 0.5, 1.0] {
        let expected = 2.0 * (-2.0 * zeta).exp();

        let g = GaussianState::from_parts(
            DVector::zeros(4),
            metrics::tmsv_covariance(zeta, SqueezeSign::Plus),
        );
        let d = metrics::duan_variance_gaussian(&g, (0, 1)).unwrap();
        let rel = ((d.v_min - expected) / expected).abs();
        assert!(rel <= 1e-6, "gaussian path rel error {rel} at zeta={zeta}");
        worst_gauss = worst_gauss.max(rel);

        let space = FockSpace::new(vec![30, 30], vec!["c1", "c2"]).unwrap();
        let psi = fock::tmsv_state(&space, zeta, SqueezeSign::Plus, 1e-6).unwrap();
        let d = metrics::duan_variance_fock(&psi, "c1", "c2").unwrap();
        let rel = ((d.v_min - expected) / expected).abs();
        assert!(rel <= 1e-4, "fock path rel error {rel} at zeta={zeta}");
        worst_fock = worst_fock.max(rel);
    }
    pass(
        1,
        "tmsv variance law",
        format!("max rel err gaussian {worst_gauss:.2e}, fock {worst_fock:.2e}"),
    );
}

/// 2. Thermal insensitivity at the half period: r = 1+2.5⁻⁵,
/// n_th ∈ {0, 10, 100}; V(T_π) pairwise equal to 1e-8 on both engines, and
/// the V(t) curves differ by > 0.1 away from T_π.
#[test]
fn criterion_02_half_period_thermal_insensitivity() {
    let theta1 = 1.0;
    let r = 1.0 + 2.5f64.powi(-5);
    let t_pi = closedform::half_period(theta1, r).unwrap();
    let n_samples = 200;
    let grid = lin_grid(t_pi, n_samples);

    let spec = model::scheme_a(theta1, r).unwrap();
    let dd = gaussian::drift_diffusion(&spec).unwrap();

    let mut v_tpi_closed = Vec::new();
    let mut v_tpi_gauss = Vec::new();
    let mut curves: Vec<Vec<f64>> = Vec::new();
    for n_th in [0.0, 10.0, 100.0] {
        let g0 = GaussianState::thermal(&[0.0, 0.0, n_th]);

        // closed-form engine: exact map at each sample
        let mut curve = Vec::with_capacity(grid.len());
        for &t in &grid {
            let map = closedform::propagator(theta1, r, t).unwrap();
            let g = map.apply_to_gaussian(&g0).unwrap();
            curve.push(metrics::duan_variance_gaussian(&g, (0, 1)).unwrap().v_min);
        }
        v_tpi_closed.push(*curve.last().unwrap());
        curves.push(curve);

        // gaussian engine: moment ODE integration
        let states = gaussian::evolve_moments(&dd, &g0, &grid).unwrap();
        let v = metrics::duan_variance_gaussian(states.last().unwrap(), (0, 1))
            .unwrap()
            .v_min;
        v_tpi_gauss.push(v);
    }
    let mut worst_pair = 0.0f64;
    for vals in [&v_tpi_closed, &v_tpi_gauss] {
        for i in 0..3 {
            for j in (i + 1)..3 {
                worst_pair = worst_pair.max((vals[i] - vals[j]).abs());
            }
        }
    }
    assert!(
        worst_pair <= 1e-8,
        "V(T_pi) values disagree by {worst_pair:.3e}: closed {v_tpi_closed:?}, gauss {v_tpi_gauss:?}"
    );

    // away from T_π the hot and cold curves separate
    let max_pointwise = curves[0]
        .iter()
        .zip(&curves[2])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(
        max_pointwise > 0.1,
        "curves should differ away from T_pi, max diff {max_pointwise}"
    );
    pass(
        2,
        "half-period thermal insensitivity",
        format!("V(T_pi) spread {worst_pair:.2e}, mid-curve spread {max_pointwise:.2}"),
    );
}

/// 3. r-scan: V(T_π) = 2((r−1)/(r+1))² for r ∈ {1+2.5⁻², 1+2.5⁻³, 1+2.5⁻⁵}
/// at n_th = 10, relative error ≤ 1e-6.
#[test]
fn criterion_03_half_period_r_scan() {
    let theta1 = 1.0;
    let mut worst = 0.0f64;
    for exp in [2, 3, 5] {
        let r = 1.0 + 2.5f64.powi(-exp);
        let t_pi = closedform::half_period(theta1, r).unwrap();
        let map = closedform::propagator(theta1, r, t_pi).unwrap();
        let g0 = GaussianState::thermal(&[0.0, 0.0, 10.0]);
        let g = map.apply_to_gaussian(&g0).unwrap();
        let v = metrics::duan_variance_gaussian(&g, (0, 1)).unwrap().v_min;
        let expected = 2.0 * ((r - 1.0) / (r + 1.0)).powi(2);
        let rel = ((v - expected) / expected).abs();
        assert!(rel <= 1e-6, "rel error {rel} at r={r}");
        worst = worst.max(rel);

        // consistency with the squeeze-parameter algebra
        let zeta = closedform::squeeze_parameter(theta1, r, Scheme::A).unwrap();
        let rel2 = ((2.0 * (-2.0 * zeta).exp() - expected) / expected).abs();
        assert!(rel2 <= 1e-9);
    }
    pass(3, "half-period r-scan", format!("max rel err {worst:.2e}"));
}

/// 4. Two-resonator steady state (Gaussian engine), Θ₂ = 2Θ₁, γ_m = 15Θ₁,
/// n_th = 0.01, κ = 10⁻³Θ₁: V(0) = 2, steady V within 2% of 0.667, and the
/// time to |V − V_ss| < 0.05(2 − V_ss) within a factor 2 of 4/Γ_c, Γ_c = 0.8.
#[test]
fn criterion_04_two_resonator_steady_state() {
    let spec = model::two_mr_system(1.0, 2.0, 15.0, 15.0, 0.01, 1e-3, 1e-3).unwrap();
    let dd = gaussian::drift_diffusion(&spec).unwrap();

    let steady = gaussian::lyapunov_steady(&dd).unwrap();
    let v_ss = metrics::duan_variance_gaussian(&steady, (0, 1)).unwrap().v_min;
    let rel = ((v_ss - 0.667) / 0.667).abs();
    assert!(rel <= 0.02, "steady V {v_ss} deviates {rel:.3} from 0.667");

    let gamma_c = 0.8;
    let t_max = 16.0 / gamma_c;
    let grid = lin_grid(t_max, 800);
    let g0 = GaussianState::vacuum(4);
    let states = gaussian::evolve_moments(&dd, &g0, &grid).unwrap();
    let v0 = metrics::duan_variance_gaussian(&states[0], (0, 1)).unwrap().v_min;
    assert!((v0 - 2.0).abs() < 1e-12, "V(0) = {v0}");

    let threshold = 0.05 * (2.0 - v_ss);
    let mut t_conv = None;
    for (t, s) in grid.iter().zip(&states) {
        let v = metrics::duan_variance_gaussian(s, (0, 1)).unwrap().v_min;
        if (v - v_ss).abs() < threshold {
            t_conv = Some(*t);
            break;
        }
    }
    let t_conv = t_conv.expect("V should reach its steady value");
    let t_target = 4.0 / gamma_c;
    assert!(
        t_conv >= t_target / 2.0 && t_conv <= t_target * 2.0,
        "convergence time {t_conv} outside factor 2 of {t_target}"
    );
    pass(
        4,
        "two-resonator steady state",
        format!("V_ss = {v_ss:.4} (target 0.667), t_conv = {t_conv:.2} vs 4/Gamma_c = {t_target}"),
    );
}

/// 5. Steady fidelity: both-Bogoliubov-channel effective system, Fock
/// engine, dims [10,10], κ = 0: fidelity with tmsv(tanh ς = 0.5, −) ≥ 0.999.
#[test]
fn criterion_05_effective_steady_fidelity() {
    let space = FockSpace::new(vec![10, 10], vec!["c1", "c2"]).unwrap();
    let spec = model::effective_cooling(1.0, 2.0, 15.0, true).unwrap();
    let sys = model::compile(&spec, &space).unwrap();
    let ss = lindblad::steady_state(
        &sys.hamiltonian,
        &sys.channels,
        &fock::vacuum(&space),
        &SolverOptions::default(),
    )
    .unwrap();
    let zeta = 0.5f64.atanh();
    let f = metrics::fidelity_with_tmsv_fock(&ss, zeta, SqueezeSign::Minus).unwrap();
    assert!(f >= 0.999, "steady fidelity {f}");
    pass(5, "effective-system steady fidelity", format!("F = {f:.6}"));
}

/// 6. Degenerate steady-state family: the single-channel system converges
/// to different fixed points from different seeds (trace distance > 0.01),
/// the two-channel system to the same one (trace distance < 1e-4).
#[test]
fn criterion_06_degenerate_vs_unique_steady_state() {
    let space = FockSpace::new(vec![8, 8], vec!["c1", "c2"]).unwrap();
    let seed_a = fock::vacuum(&space);
    let seed_b = fock::fock_state(&space, &[1, 0]).unwrap();
    let opts = SolverOptions::default();

    let m7 = model::compile(
        &model::effective_cooling(1.0, 2.0, 15.0, false).unwrap(),
        &space,
    )
    .unwrap();
    let ss_a = lindblad::steady_state(&m7.hamiltonian, &m7.channels, &seed_a, &opts).unwrap();
    let ss_b = lindblad::steady_state(&m7.hamiltonian, &m7.channels, &seed_b, &opts).unwrap();
    let d_m7 = metrics::trace_distance(&ss_a, &ss_b).unwrap();
    assert!(d_m7 > 0.01, "single-channel fixed points coincide: {d_m7}");

    let m8 = model::compile(
        &model::effective_cooling(1.0, 2.0, 15.0, true).unwrap(),
        &space,
    )
    .unwrap();
    let ss_a = lindblad::steady_state(&m8.hamiltonian, &m8.channels, &seed_a, &opts).unwrap();
    let ss_b = lindblad::steady_state(&m8.hamiltonian, &m8.channels, &seed_b, &opts).unwrap();
    let d_m8 = metrics::trace_distance(&ss_a, &ss_b).unwrap();
    assert!(d_m8 < 1e-4, "two-channel fixed point not unique: {d_m8}");
    pass(
        6,
        "degenerate vs unique steady state",
        format!("single-channel distance {d_m7:.3}, two-channel {d_m8:.2e}"),
    );
}

/// 7. Oracle equivalence: for 10 randomized small systems (2–3 modes,
/// dims ≤ 8, mixed local/collective channels, random phases), Fock
/// first/second moments match the moment ODEs to 1e-6 over t ∈ [0, 5/ω].
#[test]
fn criterion_07_fock_vs_gaussian_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut worst = 0.0f64;
    for case in 0..10 {
        let n_modes = if case % 2 == 0 { 2 } else { 3 };
        let dims = vec![if n_modes == 2 { 8 } else { 6 }; n_modes];
        let labels: Vec<String> = (0..n_modes).map(|k| format!("q{k}")).collect();
        let space = FockSpace::new(dims, labels.clone()).unwrap();

        let mut modes = Vec::new();
        for l in &labels {
            modes.push((l.clone(), model::ModeRole::Cavity));
        }
        // couplings: one beam splitter, sometimes a weak two-mode squeeze,
        // occasionally with a drive phase
        let mut couplings = Vec::new();
        let mut bs = model::QuadraticCoupling::new(
            labels[0].clone(),
            labels[1].clone(),
            model::CouplingKind::BeamSplitter,
            rng.gen_range(0.2..0.9),
        )
        .unwrap();
        if case % 3 == 0 {
            bs.phase = rng.gen_range(0.0..std::f64::consts::TAU);
        }
        couplings.push(bs);
        if n_modes == 3 {
            let mut tms = model::QuadraticCoupling::new(
                labels[1].clone(),
                labels[2].clone(),
                model::CouplingKind::TwoModeSqueeze,
                rng.gen_range(0.03..0.10),
            )
            .unwrap();
            if case % 4 == 1 {
                tms.phase = rng.gen_range(0.0..std::f64::consts::TAU);
            }
            couplings.push(tms);
        }

        // channels: local damping everywhere, plus a collective Bogoliubov
        // channel on the first pair for odd cases
        let mut channels = Vec::new();
        for l in &labels {
            let gamma = rng.gen_range(0.8..1.5);
            let n_th = rng.gen_range(0.0..0.05);
            channels.push(model::LindbladChannel::Damping {
                mode: l.clone(),
                down_rate: gamma * (n_th + 1.0),
                up_rate: gamma * n_th,
            });
        }
        if case % 2 == 1 {
            let sh: f64 = rng.gen_range(0.05..0.25);
            let ch = (1.0 + sh * sh).sqrt();
            channels.push(model::LindbladChannel::Collective {
                terms: vec![
                    model::CollectiveTerm {
                        mode: labels[0].clone(),
                        lower: ch,
                        raise: 0.0,
                    },
                    model::CollectiveTerm {
                        mode: labels[1].clone(),
                        lower: 0.0,
                        raise: sh,
                    },
                ],
                rate: rng.gen_range(0.3..0.8),
            });
        }
        let spec = model::SystemSpec {
            modes,
            couplings,
            channels,
        };

        let occ: Vec<f64> = (0..n_modes).map(|_| rng.gen_range(0.0..0.08)).collect();
        let rho0 = fock::thermal_state(&space, &occ, 1e-6).unwrap();
        let g0 = GaussianState::thermal(&occ);

        let omega = 1.5f64; // dominant rate scale by construction
        let grid = lin_grid(5.0 / omega, 10);

        let sys = model::compile(&spec, &space).unwrap();
        let res = lindblad::evolve(
            &sys.hamiltonian,
            &sys.channels,
            &rho0,
            &grid,
            &SolverOptions::default(),
        )
        .unwrap();
        let dd = gaussian::drift_diffusion(&spec).unwrap();
        let moments = gaussian::evolve_moments(&dd, &g0, &grid).unwrap();

        for (state, gauss) in res.states.iter().zip(&moments) {
            let from_fock =
                gaussian::gaussian_from_fock(state, &(0..n_modes).collect::<Vec<_>>()).unwrap();
            let cov_diff = max_abs(from_fock.cov(), gauss.cov());
            let mean_diff = (from_fock.mean() - gauss.mean()).abs().max();
            let diff = cov_diff.max(mean_diff);
            assert!(
                diff <= 1e-6,
                "case {case}: moment mismatch {diff:.3e} (cov {cov_diff:.3e})"
            );
            worst = worst.max(diff);
        }
    }
    pass(
        7,
        "fock vs gaussian moment oracle",
        format!("10 random systems, worst moment mismatch {worst:.2e}"),
    );
}

/// 8. Closed form vs numerics: scheme A (θ₁=1, θ₂=2) pure-state propagation
/// matches the analytic propagator's moments to 1e-6 at 20 sample times;
/// the symplectic invariant holds to 1e-12 at 100 random times.
#[test]
fn criterion_08_closed_form_vs_numerics() {
    let (theta1, theta2) = (1.0, 2.0);
    let t_pi = closedform::half_period(theta1, theta2).unwrap();
    let space = FockSpace::new(vec![42, 42, 14], vec!["c1", "c2", "m"]).unwrap();
    let sys = model::compile(&model::scheme_a(theta1, theta2).unwrap(), &space).unwrap();
    let grid = lin_grid(t_pi, 20);
    let opts = SolverOptions {
        step: StepSize::Fixed(1.0e-3),
        ..SolverOptions::default()
    };
    let states = lindblad::evolve_pure(&sys.hamiltonian, &fock::vacuum(&space), &grid, &opts)
        .unwrap();

    let g0 = GaussianState::vacuum(3);
    let mut worst = 0.0f64;
    for (t, state) in grid.iter().zip(&states) {
        let map = closedform::propagator(theta1, theta2, *t).unwrap();
        let predicted = map.apply_to_gaussian(&g0).unwrap();
        let from_fock = gaussian::gaussian_from_fock(state, &[0, 1, 2]).unwrap();
        let diff = max_abs(from_fock.cov(), predicted.cov())
            .max((from_fock.mean() - predicted.mean()).abs().max());
        assert!(diff <= 1e-6, "moment mismatch {diff:.3e} at t={t}");
        worst = worst.max(diff);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_sympl = 0.0f64;
    for _ in 0..100 {
        let t = rng.gen_range(0.0..4.0 * t_pi);
        let map = closedform::propagator(theta1, theta2, t).unwrap();
        let defect = map.symplectic_defect();
        assert!(defect <= 1e-12, "symplectic defect {defect:.3e} at t={t}");
        worst_sympl = worst_sympl.max(defect);
    }
    pass(
        8,
        "closed form vs numerics",
        format!("worst moment mismatch {worst:.2e}, worst symplectic defect {worst_sympl:.2e}"),
    );
}

/// 9. Adiabatic elimination: full vs effective dynamics at γ_m = 50 on dims
/// [8,8,4] stays within trace distance 0.05, and the γ_m = 500 distance is
/// strictly smaller. Both runs use the same absolute window, 4/Γ_c at
/// γ_m = 50; the faster-damped run uses a dim-2 mechanical truncation
/// (occupation there is ~(θ/γ)² ≈ 10⁻⁵).
#[test]
fn criterion_09_adiabatic_elimination() {
    let gamma_c_50 = 4.0 * 3.0 / 50.0;
    let t_max = 4.0 / gamma_c_50;
    let grid = lin_grid(t_max, 16);

    let report_50 =
        lindblad::adiabatic_equivalence_check(1.0, 2.0, 50.0, &grid, [8, 8, 4]).unwrap();
    assert!(
        report_50.max_distance <= 0.05,
        "gamma_m=50 distance {}",
        report_50.max_distance
    );

    let report_500 =
        lindblad::adiabatic_equivalence_check(1.0, 2.0, 500.0, &grid, [8, 8, 2]).unwrap();
    assert!(
        report_500.max_distance < report_50.max_distance,
        "distance should shrink with damping: {} vs {}",
        report_500.max_distance,
        report_50.max_distance
    );
    pass(
        9,
        "adiabatic elimination",
        format!(
            "max trace distance {:.4} at gamma_m=50, {:.4} at gamma_m=500",
            report_50.max_distance, report_500.max_distance
        ),
    );
}

/// 10. Stroboscopic convergence: alternating the two coherent schemes with
/// δt·Γ_c ∈ {0.1, 0.05, 0.025} drives V toward the two-channel steady
/// value; the deviation decreases monotonically with δt and the smallest δt
/// lands within 5%.
#[test]
fn criterion_10_stroboscopic_convergence() {
    let (theta1, theta2) = (1.0, 2.0);
    let gamma_m = 30.0;
    let gamma_c = 4.0 * (theta2 * theta2 - theta1 * theta1) / gamma_m;
    let space = FockSpace::new(vec![8, 8, 3], vec!["c1", "c2", "m"]).unwrap();
    let h_a = model::compile(&model::scheme_a(theta1, theta2).unwrap(), &space)
        .unwrap()
        .hamiltonian;
    // the partner scheme with the strengths swapped cools the second
    // Bogoliubov mode at the same engineered rate
    let h_b = model::compile(&model::scheme_a_prime(theta2, theta1).unwrap(), &space)
        .unwrap()
        .hamiltonian;
    let channels = vec![(fock::annihilation(&space, "m").unwrap(), gamma_m)];

    let duan = metrics::DuanAnalyzer::new(&space, "c1", "c2").unwrap();
    let v_target = 2.0 / 3.0;
    // each channel is active half the time: effective rate Γ_c/2
    let t_total = 6.0 / (gamma_c / 2.0);
    let opts = SolverOptions {
        step: StepSize::Fixed(0.008),
        eig_stride: 0,
        ..SolverOptions::default()
    };

    let mut deviations = Vec::new();
    for dt_gamma in [0.1, 0.05, 0.025] {
        let delta_t = dt_gamma / gamma_c;
        let n_cycles = (t_total / (2.0 * delta_t)).ceil() as usize;
        let res = lindblad::stroboscopic_evolve(
            &h_a,
            &h_b,
            &channels,
            delta_t,
            n_cycles,
            &fock::vacuum(&space),
            &opts,
            Some(gamma_c),
        )
        .unwrap();
        let v = duan.eval(res.final_state()).unwrap().v_min;
        deviations.push((v - v_target).abs());
    }
    assert!(
        deviations[0] > deviations[1] && deviations[1] > deviations[2],
        "deviation not monotone in delta_t: {deviations:?}"
    );
    let rel = deviations[2] / v_target;
    assert!(rel <= 0.05, "final V deviates {rel:.3} from the target");
    pass(
        10,
        "stroboscopic convergence",
        format!(
            "deviations {:.4} > {:.4} > {:.4}, final rel {:.3}",
            deviations[0], deviations[1], deviations[2], rel
        ),
    );
}

/// 11. Device bounds: n_th(2π·6 GHz, 25 mK) < 0.07; coupling homogeneity in
/// V_x and 1/d; the quoted coupling magnitudes are reproduced only at order
/// of magnitude (the effective mass and cavity capacitance are not
/// published device values — chosen representative ones are used).
#[test]
fn criterion_11_device_bounds() {
    let n_th = device::thermal_occupation(2.0 * std::f64::consts::PI * 6e9, 0.025);
    assert!(n_th < 0.07, "n_th = {n_th}");

    // dilatational-resonator scenario with representative m and C_j
    let params = device::DeviceParams {
        c0: 25e-15,
        d: 50e-9,
        m: 0.1e-15,
        omega_m: 2.0 * std::f64::consts::PI * 6e9,
        omega_c: [
            2.0 * std::f64::consts::PI * 10e9,
            2.0 * std::f64::consts::PI * 10e9,
        ],
        c_cavity: [0.2e-12, 0.2e-12],
        vx: [1.0, 2.0],
        q_m: 260.0,
        q_c: 1e6,
        temperature: 0.025,
    };
    let theta = device::effective_theta(&params, 1).unwrap();
    // quoted scale ~17 MHz; demand the same order of magnitude only
    let quoted = 17e6;
    let ratio = theta / (2.0 * std::f64::consts::PI) / quoted;
    assert!(
        (0.1..=10.0).contains(&ratio),
        "theta {theta:.3e} rad/s not within an order of magnitude of the quoted scale"
    );

    // homogeneity: degree 1 in V_x, degree −1 in d
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..25 {
        let s = rng.gen_range(0.3..3.0);
        let g0 = device::coupling_g(&params, 1, 1.0).unwrap();
        let g_v = device::coupling_g(&params, 1, s).unwrap();
        assert!((g_v / g0 - s).abs() < 1e-12);
        let mut p2 = params.clone();
        p2.d *= s;
        let g_d = device::coupling_g(&p2, 1, 1.0).unwrap();
        assert!((g_d / g0 - 1.0 / s).abs() < 1e-12);
    }

    // regime verdicts behave at the quoted operating point
    let gamma_m = params.gamma_m();
    let big_theta = theta * 3.0f64.sqrt(); // θ₂ = 2θ₁ geometry
    let report = device::regime_check(theta, 2.0 * theta, gamma_m, 0.0, n_th, 10.0);
    assert!(report.margins.iter().any(|m| m.name == "gamma_m/Theta"));
    pass(
        11,
        "device bounds",
        format!(
            "n_th = {n_th:.2e}, theta = 2pi x {:.1} MHz (quoted-scale ratio {ratio:.2}), gamma_m/Theta = {:.1}",
            theta / (2.0 * std::f64::consts::PI) / 1e6,
            gamma_m / big_theta
        ),
    );
}

// Complex64 is re-exported for downstream users; keep the import exercised.
#[allow(dead_code)]
fn _type_check(_: Complex64) {}
