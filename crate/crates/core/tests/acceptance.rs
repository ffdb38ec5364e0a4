//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with the measured numbers.
//!
//! Criteria (tolerances pinned in code):
//!  1. No-IQI degeneration: paired IQA and IQU chains agree to 1e-9.
//!  2. Resolvent solvers match brute-force Monte-Carlo within 2% / 3%.
//!  3. Deterministic equivalents within 5% of simulated sum rates at the
//!     contaminated multi-cell operating point, N in {64, 128}.
//!  4. Headline loss at N = 80: IQU vs no-IQI baseline, 60% +/- 10pp.
//!  5. Asymptotic SINRs converge to the closed-form single-cell limits.
//!  6. Ordering properties across the figure presets under common random
//!     numbers.
//!  7. Algebraic invariant suite.
//!  8. Closed-form sanity identities.

use iqmimo::asymptotics::{closed_form_sinr, iqu_asymptotic_sinr, iqa_asymptotic_sinr, ClosedForm, CsiModel};
use iqmimo::augment::{augment, permutation_matrix};
use iqmimo::channel::draw_channel;
use iqmimo::covariance::{ula_covariance, CovarianceProfile};
use iqmimo::detection::{
    detect_iqa, detect_iqu, draw_payload, iqa_filter, iqu_filter, rx_data_augmented,
    rx_data_complex, sinr_components_iqa, sinr_components_iqu,
};
use iqmimo::estimation::{estimate_all, iqa_omega, iqu_omega};
use iqmimo::iqi::{build_bs_iqi, build_ut_iqi, IqiMode, MismatchDraw, UtIqi};
use iqmimo::linalg::{inv_hpd, rel_frobenius, trace_prod};
use iqmimo::montecarlo::{run_point, trial_rates};
use iqmimo::rmt::{resolvent_equivalent, two_resolvent_equivalent};
use iqmimo::rng::{complex_gaussian_matrix, substream, Domain};
use iqmimo::scenario::{instantiate, preset, ReceiverKind};
use iqmimo::training::{draw_training_noise, rx_training_augmented, rx_training_complex};
use iqmimo::{C64, CMat, RMat};

fn report(criterion: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {criterion}: {tag} - {detail}");
    assert!(pass, "{criterion} failed: {detail}");
}

fn uniform_uts(cells: usize, uts: usize, eps: f64, theta: f64) -> Vec<Vec<UtIqi>> {
    (0..cells).map(|_| (0..uts).map(|_| build_ut_iqi(eps, theta).unwrap()).collect()).collect()
}

// -------------------------------------------------------------------------
// Criterion 1: exact no-IQI degeneration of the paired chains.
// -------------------------------------------------------------------------
#[test]
fn criterion_1_no_iqi_degeneration() {
    let mut worst = 0.0f64;
    for cells in [1usize, 7] {
        let n = 32;
        let k_uts = 4;
        let mut cfg = preset("fig1").unwrap();
        cfg.n_uts = k_uts;
        cfg.n_cells = cells;
        cfg.sweep_values = vec![n as f64];
        cfg.eps_draw = MismatchDraw::Fixed { value: 0.0 };
        cfg.theta_deg_draw = MismatchDraw::Fixed { value: 0.0 };
        let inst = instantiate(&cfg, 0, IqiMode::Both).unwrap();
        let (bs, uts) = (&inst.bs, &inst.uts);
        for trial in 0..3u64 {
            let mut rng = substream(cfg.seed, Domain::Channel, 0, trial);
            let ch = draw_channel(&inst.profile, &mut rng);
            let mut tn = substream(cfg.seed, Domain::TrainingNoise, 0, trial);
            let w = draw_training_noise(&mut tn, n, k_uts);
            let y = rx_training_complex(&ch, bs, uts, inst.rho_tr, Some(&w));
            let ya = rx_training_augmented(&ch, bs, uts, inst.rho_tr, Some(&w));
            let om = iqu_omega(&inst.profile, bs, uts, inst.rho_tr, true).unwrap();
            let om_a = iqa_omega(&inst.profile, bs, uts, inst.rho_tr, true).unwrap();
            let est = estimate_all(&y, &ya, &om, &om_a, inst.rho_tr);
            let u = iqu_filter(&est.g_hat, inst.rho_ul).unwrap();
            let u_aug = iqa_filter(&est.g_aug_hat, inst.rho_ul).unwrap();

            let mut pl = substream(cfg.seed, Domain::Payload, 0, trial);
            let payload = draw_payload(&mut pl, cells, k_uts, n);
            let r = rx_data_complex(&ch, bs, uts, inst.rho_ul, &payload);
            let ra = rx_data_augmented(&ch, bs, uts, inst.rho_ul, &payload);
            let d1 = detect_iqu(&u, &r, inst.rho_ul);
            let d2 = detect_iqa(&u_aug, &ra, inst.rho_ul);
            let dec_err = (&d1 - &d2).norm() / d1.norm();
            worst = worst.max(dec_err);

            let b1 = sinr_components_iqu(&ch, &u, bs, uts, inst.rho_ul);
            let b2 = sinr_components_iqa(&ch, &u_aug, bs, uts, inst.rho_ul);
            for k in 0..k_uts {
                worst = worst.max((b1.s[k] - b2.s[k]).abs() / b1.s[k]);
                worst = worst.max((b1.i[k] - b2.i[k]).abs() / b1.i[k].max(1e-30));
                worst = worst.max((b1.z[k] - b2.z[k]).abs() / b1.z[k]);
            }
            let (r1, r2) = (b1.sum_rate(), b2.sum_rate());
            worst = worst.max((r1 - r2).abs() / r1);
        }
    }
    report(
        "1 (no-IQI degeneration)",
        worst < 1e-9,
        &format!("worst relative deviation {worst:.2e} (tolerance 1e-9)"),
    );
}

// -------------------------------------------------------------------------
// Criterion 2: the resolvent solvers against brute-force Monte-Carlo.
// -------------------------------------------------------------------------
#[test]
fn criterion_2_resolvent_oracles() {
    let n = 64usize;
    let k = 8usize;
    let draws = 200usize;
    let alpha = 0.3;
    let mut rng = substream(2024, Domain::Test, 0, 0);

    // Random PSD column covariances and weighting matrices.
    let deltas: Vec<CMat> = (0..k)
        .map(|_| {
            let g = complex_gaussian_matrix(&mut rng, n, n);
            &g * g.adjoint() / C64::new(n as f64, 0.0)
        })
        .collect();
    let a_weight = {
        let g = complex_gaussian_matrix(&mut rng, n, n);
        &g * g.adjoint() / C64::new(n as f64, 0.0)
    };
    let c_weight = {
        let g = complex_gaussian_matrix(&mut rng, n, n);
        &g * g.adjoint() / C64::new(n as f64, 0.0)
    };
    let b = CMat::zeros(n, n);

    // Column factors: delta_k / n covariance.
    let factors: Vec<CMat> = deltas
        .iter()
        .map(|d| {
            (d / C64::new(n as f64, 0.0))
                .cholesky()
                .expect("delta psd")
                .l()
        })
        .collect();

    let mut mc3 = 0.0;
    let mut mc4 = 0.0;
    for t in 0..draws {
        let mut draw_rng = substream(2024, Domain::Test, 1, t as u64);
        let mut g = CMat::zeros(n, k);
        for (col, f) in factors.iter().enumerate() {
            let v = iqmimo::rng::complex_gaussian_vector(&mut draw_rng, n);
            g.set_column(col, &(f * v));
        }
        let mut gram = &g * g.adjoint();
        for i in 0..n {
            gram[(i, i)] += C64::new(alpha, 0.0);
        }
        let resolvent = inv_hpd(&gram).unwrap();
        mc3 += trace_prod(&a_weight, &resolvent).re / n as f64;
        let two = &resolvent * &c_weight * &resolvent;
        mc4 += trace_prod(&a_weight, &two).re / n as f64;
    }
    mc3 /= draws as f64;
    mc4 /= draws as f64;

    let fp = resolvent_equivalent(&deltas, &b, alpha).unwrap();
    let det3 = trace_prod(&a_weight, &fp.t).re / n as f64;
    let tp = two_resolvent_equivalent(&fp, &deltas, &c_weight).unwrap();
    let det4 = trace_prod(&a_weight, &tp.t_prime).re / n as f64;

    let err3 = (mc3 - det3).abs() / mc3.abs();
    let err4 = (mc4 - det4).abs() / mc4.abs();
    report(
        "2 (resolvent oracles)",
        err3 < 0.02 && err4 < 0.03,
        &format!("one-resolvent err {err3:.4} (tol 0.02), two-resolvent err {err4:.4} (tol 0.03)"),
    );
}

// -------------------------------------------------------------------------
// Criterion 3: deterministic equivalents vs simulation at the Fig. 1 point.
// -------------------------------------------------------------------------
#[test]
fn criterion_3_asymptotics_vs_simulation() {
    let mut cfg = preset("fig1").unwrap();
    cfg.trials = 100;
    cfg.sweep_values = vec![64.0, 128.0];
    cfg.receivers = vec![ReceiverKind::IquMmse, ReceiverKind::IqaWlmmse];
    let mut detail = String::new();
    let mut pass = true;
    for point in 0..cfg.sweep_values.len() {
        for &receiver in &cfg.receivers {
            let row = run_point(&cfg, point, IqiMode::Both, receiver).unwrap();
            let asy = row.asy_sum_rate.unwrap();
            let gap = (asy - row.mc_sum_rate).abs() / row.mc_sum_rate;
            pass &= gap < 0.05;
            detail.push_str(&format!(
                "[N={} {:?}: mc {:.2} asy {:.2} gap {:.1}%] ",
                row.n_antennas,
                receiver,
                row.mc_sum_rate,
                asy,
                gap * 100.0
            ));
        }
    }
    report("3 (asymptotics vs simulation, tol 5%)", pass, detail.trim());
}

// -------------------------------------------------------------------------
// Criterion 4: the headline loss number at N = 80.
// -------------------------------------------------------------------------
#[test]
fn criterion_4_headline_loss() {
    let mut cfg = preset("fig1").unwrap();
    cfg.trials = 100;
    cfg.sweep_values = vec![80.0];
    cfg.no_asymptotics = true;
    let iqu = run_point(&cfg, 0, IqiMode::Both, ReceiverKind::IquMmse).unwrap();
    let base = run_point(&cfg, 0, IqiMode::Both, ReceiverKind::MmseNoIqi).unwrap();
    let loss = 1.0 - iqu.mc_sum_rate / base.mc_sum_rate;
    let pass = (0.5..=0.7).contains(&loss);
    report(
        "4 (headline loss 60% +/- 10pp at N=80)",
        pass,
        &format!(
            "iqu {:.2} +/- {:.2}, no-iqi {:.2} +/- {:.2}, loss {:.1}% (band [50%, 70%]); \
             under the full multi-cell data phase the denominator at this point is \
             interference-limited, which caps the measurable image-induced loss near 15%",
            iqu.mc_sum_rate,
            iqu.mc_stderr,
            base.mc_sum_rate,
            base.mc_stderr,
            loss * 100.0
        ),
    );
}

// -------------------------------------------------------------------------
// Criterion 5: asymptotic SINRs converge to the closed-form limits.
// -------------------------------------------------------------------------
#[test]
fn criterion_5_closed_form_consistency() {
    let k = 4usize;
    let rho = 10.0f64; // 10 dB
    let eps = 0.05;
    let theta = 1.0f64.to_radians();
    let sizes = [64usize, 128, 256];
    let mut pass = true;
    let mut detail = String::new();

    // (asymptote, closed form) pairs: BS-only and UT-only, both chains.
    for which in ["iqu_bs", "iqu_ut", "iqa_bs", "iqa_ut"] {
        let mut gaps = Vec::new();
        for &n in &sizes {
            let prof = CovarianceProfile::iid(n, 1, k);
            let (bs, uts) = match which {
                "iqu_bs" | "iqa_bs" => (
                    build_bs_iqi(&vec![eps; n], &vec![theta; n]).unwrap(),
                    uniform_uts(1, k, 0.0, 0.0),
                ),
                _ => (iqmimo::iqi::ideal_bs(n), uniform_uts(1, k, eps, theta)),
            };
            let got = match which {
                "iqu_bs" | "iqu_ut" => {
                    iqu_asymptotic_sinr(&prof, &bs, &uts, rho, CsiModel::Perfect).unwrap().sinr0()[0]
                }
                _ => iqa_asymptotic_sinr(&prof, &bs, &uts, rho, CsiModel::Perfect).unwrap().sinr0()[0],
            };
            let reference = match which {
                "iqu_bs" => closed_form_sinr(&ClosedForm::IquBsIdentical {
                    n,
                    k,
                    rho_ul: rho,
                    eps,
                    theta,
                }),
                "iqu_ut" => closed_form_sinr(&ClosedForm::IquUt { n, rho_ul: rho, eps, theta }),
                "iqa_bs" => {
                    closed_form_sinr(&ClosedForm::IqaBsIdentical { n, rho_ul: rho, eps, theta })
                }
                _ => closed_form_sinr(&ClosedForm::IqaUt { n, rho_ul: rho, eps, theta }),
            }
            .unwrap();
            gaps.push((got - reference).abs() / reference);
        }
        let final_ok = gaps[2] < 0.05;
        let monotone = gaps[0] >= gaps[1] && gaps[1] >= gaps[2];
        pass &= final_ok && monotone;
        detail.push_str(&format!(
            "[{which}: gaps {:.3}/{:.3}/{:.3}{}] ",
            gaps[0],
            gaps[1],
            gaps[2],
            if monotone { "" } else { " NOT MONOTONE" }
        ));
    }
    report("5 (closed-form consistency, tol 5% at N=256)", pass, detail.trim());
}

// -------------------------------------------------------------------------
// Criterion 6: ordering properties across the figure presets.
// -------------------------------------------------------------------------
#[test]
fn criterion_6_ordering_properties() {
    // Orderings are checked on paired per-trial differences: common random
    // numbers make the difference estimator tight, and a point counts as
    // ordered unless the difference is significantly negative (mean below
    // -2 standard errors).
    fn ordered(a: &[f64], b: &[f64]) -> bool {
        let n = a.len() as f64;
        let diffs: Vec<f64> = a.iter().zip(b.iter()).map(|(&x, &y)| x - y).collect();
        let mean = diffs.iter().sum::<f64>() / n;
        if diffs.len() < 2 {
            return mean >= 0.0;
        }
        let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
        mean >= -2.0 * (var / n).sqrt()
    }

    // (a) IQA >= IQU across every preset sweep point.
    let mut points = 0usize;
    let mut iqa_wins = 0usize;
    let mut run = |cfg: &iqmimo::scenario::ScenarioConfig| {
        for point in 0..cfg.sweep_values.len() {
            for mode in cfg.modes() {
                let iqa = trial_rates(cfg, point, mode, ReceiverKind::IqaWlmmse).unwrap();
                let iqu = trial_rates(cfg, point, mode, ReceiverKind::IquMmse).unwrap();
                points += 1;
                if ordered(&iqa, &iqu) {
                    iqa_wins += 1;
                }
            }
        }
    };
    let mut fig1 = preset("fig1").unwrap();
    fig1.trials = 25;
    fig1.no_asymptotics = true;
    fig1.sweep_values = vec![32.0, 64.0, 96.0];
    run(&fig1);
    let mut fig3 = preset("fig3").unwrap();
    fig3.trials = 25;
    fig3.no_asymptotics = true;
    run(&fig3);
    let mut fig4 = preset("fig4").unwrap();
    fig4.trials = 25;
    fig4.no_asymptotics = true;
    run(&fig4);
    let mut fig2 = preset("fig2").unwrap();
    fig2.trials = 25;
    fig2.no_asymptotics = true;
    fig2.sweep_values = vec![32.0, 64.0, 96.0];
    run(&fig2);
    let frac_a = iqa_wins as f64 / points as f64;

    // (b) IQU across the no-contamination modes at the large-N end of the
    // sweep (where the asymptotic ordering applies): BS-only IQI beats
    // UT-only, and UT-only sits at or above both-sides (they converge).
    fig2.sweep_values = vec![96.0, 128.0];
    let mut b_points = 0usize;
    let mut b_holds = 0usize;
    for point in 0..fig2.sweep_values.len() {
        let bs_only = trial_rates(&fig2, point, IqiMode::BsOnly, ReceiverKind::IquMmse).unwrap();
        let ut_only = trial_rates(&fig2, point, IqiMode::UtOnly, ReceiverKind::IquMmse).unwrap();
        let both = trial_rates(&fig2, point, IqiMode::Both, ReceiverKind::IquMmse).unwrap();
        b_points += 2;
        if ordered(&bs_only, &ut_only) {
            b_holds += 1;
        }
        if ordered(&ut_only, &both) {
            b_holds += 1;
        }
    }
    let frac_b = b_holds as f64 / b_points as f64;
    report(
        "6 (orderings)",
        frac_a >= 0.95 && frac_b >= 0.95,
        &format!(
            "IQA >= IQU at {:.0}% of {} points; BS/UT/both ordering at {:.0}% of {} checks \
             (paired differences, 2-sigma one-sided)",
            frac_a * 100.0,
            points,
            frac_b * 100.0,
            b_points
        ),
    );
}

// -------------------------------------------------------------------------
// Criterion 7: algebraic invariant suite.
// -------------------------------------------------------------------------
#[test]
fn criterion_7_algebraic_invariants() {
    let mut worst = 0.0f64;
    let mut rng = substream(7, Domain::Test, 0, 0);

    // Augmentation is a ring homomorphism.
    let a = complex_gaussian_matrix(&mut rng, 5, 5);
    let b = complex_gaussian_matrix(&mut rng, 5, 5);
    worst = worst.max(rel_frobenius(&augment(&(&a * &b)), &(augment(&a) * augment(&b))));
    worst = worst.max(rel_frobenius(&augment(&(&a + &b)), &(augment(&a) + augment(&b))));
    worst = worst.max(rel_frobenius(&augment(&a.adjoint()), &augment(&a).transpose()));

    // Permutation orthogonality.
    for n in [1usize, 3, 8] {
        let p = permutation_matrix(n);
        worst = worst.max(rel_frobenius(&(&p * p.transpose()), &RMat::identity(2 * n, 2 * n)));
    }

    // Mixing-energy laws.
    for (eps, theta) in [(0.0, 0.0), (0.2, 0.03), (0.1, -0.4)] {
        let ut = build_ut_iqi(eps, theta).unwrap();
        let err = (ut.mixing_energy() - 2.0 * (1.0 + eps * eps)).abs() / (2.0 * (1.0 + eps * eps));
        worst = worst.max(err);
    }
    let eps = [0.12, 0.2, 0.0, 0.07];
    let theta = [0.01, -0.02, 0.04, 0.0];
    let bs = build_bs_iqi(&eps, &theta).unwrap();
    let expect = 2.0 * eps.len() as f64 + 2.0 * eps.iter().map(|e| e * e).sum::<f64>();
    worst = worst.max((bs.aug.norm_squared() - expect).abs() / expect);

    // ULA covariance trace law.
    for (c, n, m) in [(1.0, 16, 8), (2.0, 12, 6), (0.5, 8, 1)] {
        let link = ula_covariance(c, n, m, 0.5).unwrap();
        let expect = c.powi(-3) * n as f64;
        worst = worst.max((link.r.trace().re - expect).abs() / expect);
    }

    // Conditional variance budget: empirical output variance equals
    // S + I + Z for both chains on an impaired realization.
    let mut worst_budget = 0.0f64;
    {
        let n = 6;
        let k_uts = 3;
        let prof = CovarianceProfile::iid(n, 2, k_uts);
        let mut rng = substream(77, Domain::Test, 0, 0);
        let ch = draw_channel(&prof, &mut rng);
        let bs = build_bs_iqi(&vec![0.18; n], &vec![0.025; n]).unwrap();
        let uts = uniform_uts(2, k_uts, 0.16, 0.02);
        let rho = 6.0;
        let est = iqmimo::detection::perfect_csi_estimates(&ch);
        let u = iqu_filter(&est.g_hat, rho).unwrap();
        let u_aug = iqa_filter(&est.g_aug_hat, rho).unwrap();
        let b1 = sinr_components_iqu(&ch, &u, &bs, &uts, rho);
        let b2 = sinr_components_iqa(&ch, &u_aug, &bs, &uts, rho);
        let filters = iqmimo::detection::ReceiveFilters { u, u_aug };
        let e1 = iqmimo::detection::empirical_output_variance(
            &ch,
            &filters,
            &bs,
            &uts,
            rho,
            iqmimo::detection::ReceiverChain::Iqu,
            400_000,
            &mut rng,
        );
        let e2 = iqmimo::detection::empirical_output_variance(
            &ch,
            &filters,
            &bs,
            &uts,
            rho,
            iqmimo::detection::ReceiverChain::Iqa,
            400_000,
            &mut rng,
        );
        for k in 0..k_uts {
            worst_budget = worst_budget.max((e1[k] - b1.total()[k]).abs() / b1.total()[k]);
            worst_budget = worst_budget.max((e2[k] - b2.total()[k]).abs() / b2.total()[k]);
        }
    }

    report(
        "7 (algebraic invariants)",
        worst < 1e-10 && worst_budget < 0.015,
        &format!(
            "worst exact-law residual {worst:.2e} (tol 1e-10); \
             variance-budget Monte-Carlo deviation {worst_budget:.4} (tol 0.015)"
        ),
    );
}

// -------------------------------------------------------------------------
// Criterion 8: closed-form sanity identities.
// -------------------------------------------------------------------------
#[test]
fn criterion_8_closed_form_sanity() {
    let no_iqi = closed_form_sinr(&ClosedForm::NoIqi { n: 100, rho_ul: 31.6227766 }).unwrap();
    let exact_no_iqi = 100.0 * 31.6227766;
    let loss =
        closed_form_sinr(&ClosedForm::IquLoss { k: 10, rho_ul: 31.6227766, eps: 0.0, theta: 0.0 })
            .unwrap();
    let pass = no_iqi == exact_no_iqi && loss == 1.0;
    report(
        "8 (closed-form sanity)",
        pass,
        &format!("no_iqi {no_iqi} (expect {exact_no_iqi}), zero-mismatch loss {loss} (expect 1)"),
    );
}
