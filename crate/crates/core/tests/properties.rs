use proptest::prelude::*;

use crawlsim::actuator::{self, ActuatorParams, ActuatorState, ActuatorTemplate};
use crawlsim::analytic::{self, SpeedModelInput};
use crawlsim::beam::{self, BeamParams};
use crawlsim::locomotion::{self, RobotParams};
use crawlsim::oscillator::{self, OscillatorConfig, Side, SnapKind};
use crawlsim::trace::{self, Sample, Trace, TraceEvent};

fn beam_params() -> impl Strategy<Value = BeamParams> {
    (1e-7f64..1e-2, 1e-4f64..1e-1).prop_map(|(e, a)| BeamParams::new(e, a).unwrap())
}

fn actuator_params() -> impl Strategy<Value = ActuatorParams> {
    (1.0f64..10.0, 1e-3f64..0.5, 1e-3f64..0.5, 1e-4f64..0.05, 250.0f64..330.0).prop_map(|(r, c, h, k, amb)| {
        ActuatorParams {
            resistance_ohm: r,
            thermal_capacitance_j_per_k: c,
            heat_loss_w_per_k: h,
            tension_coeff_n_per_k: k,
            ambient_k: amb,
        }
    })
}

fn robot_params() -> impl Strategy<Value = RobotParams> {
    (
        0.2e-3f64..10e-3,
        0.2e-3f64..10e-3,
        0.05f64..1.0,
        1.0f64..3.0,
        0.05f64..=1.0,
        0.0f64..=1.0,
    )
        .prop_map(|(big_m, m, mu_f, ratio, eta, beta)| RobotParams {
            body_mass_kg: big_m,
            attached_mass_kg: m,
            mu_forward: mu_f,
            mu_backward: mu_f * ratio,
            efficiency: eta,
            gravity_m_s2: 9.81,
            thru_velocity_factor: beta,
        })
}

/// Oscillator around the default operating point with randomized current
/// and thermal constants; always able to oscillate.
fn oscillating_config() -> impl Strategy<Value = OscillatorConfig> {
    (0.62f64..0.9, 0.01f64..0.05, 0.6f64..0.95, 0.002f64..0.05).prop_map(|(current, c_th, margin, dt)| {
        let beam = BeamParams::default();
        let tpl = ActuatorTemplate {
            thermal_capacitance_j_per_k: c_th,
            ..ActuatorTemplate::default()
        };
        // place the equilibrium pull at critical / margin
        let q = current * current * tpl.resistance_ohm;
        let h = margin * tpl.tension_coeff_n_per_k * q / beam::critical_force(&beam);
        OscillatorConfig {
            beam,
            left: tpl.with_heat_loss(h),
            right: tpl.with_heat_loss(h),
            supply_current_a: current,
            dt_s: dt,
            ..OscillatorConfig::default()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn potential_nonnegative_and_zero_only_at_wells(p in beam_params(), r in -3.0f64..3.0) {
        let x = r * p.half_separation_m;
        let u = beam::potential(x, &p);
        prop_assert!(u >= 0.0);
        prop_assert_eq!(beam::potential(p.half_separation_m, &p), 0.0);
        prop_assert_eq!(beam::potential(-p.half_separation_m, &p), 0.0);
        prop_assert_eq!(beam::potential(0.0, &p) - beam::potential(p.half_separation_m, &p), p.barrier_energy_j);
        prop_assert!((beam::potential(x, &p) - beam::potential(-x, &p)).abs() <= 1e-15 * u.max(1e-300));
        if (r.abs() - 1.0).abs() > 1e-6 {
            prop_assert!(u > 0.0);
        }
    }

    #[test]
    fn force_is_negative_gradient(p in beam_params(), rs in prop::collection::vec(-2.0f64..2.0, 20)) {
        let a = p.half_separation_m;
        let h = 1e-8 * a;
        let scale = beam::critical_force(&p);
        for r in rs {
            let x = r * a;
            let fd = -(beam::potential(x + h, &p) - beam::potential(x - h, &p)) / (2.0 * h);
            let f = beam::restoring_force(x, &p);
            prop_assert!((f - fd).abs() <= 1e-6 * f.abs().max(scale), "x={x} f={f} fd={fd}");
            prop_assert!((f + beam::restoring_force(-x, &p)).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn exact_thermal_step_is_a_semigroup(
        p in actuator_params(),
        rise in 0.0f64..80.0,
        current in 0.0f64..1.5,
        powered in any::<bool>(),
        dt in 1e-4f64..5.0,
    ) {
        let s = ActuatorState { temperature_k: p.ambient_k + rise, powered };
        let one = actuator::step_thermal(&s, current, dt, &p).unwrap();
        let half = actuator::step_thermal(&s, current, dt / 2.0, &p).unwrap();
        let two = actuator::step_thermal(&half, current, dt / 2.0, &p).unwrap();
        prop_assert!((one.temperature_k - two.temperature_k).abs() <= 1e-12 * one.temperature_k);

        // no overshoot: the new temperature lies between the old one and equilibrium
        let t_eq = actuator::equilibrium_temp(current, powered, &p);
        let (lo, hi) = if s.temperature_k < t_eq { (s.temperature_k, t_eq) } else { (t_eq, s.temperature_k) };
        prop_assert!(one.temperature_k >= lo - 1e-9 && one.temperature_k <= hi + 1e-9);
    }

    #[test]
    fn stepped_heating_crosses_within_one_step(
        p in actuator_params(),
        current in 0.3f64..1.5,
        frac in 0.05f64..0.95,
        divisions in 10u32..400,
    ) {
        let q = actuator::electrical_power(current, &p);
        let threshold = frac * q / p.heat_loss_w_per_k;
        let t_star = actuator::heating_time(threshold, current, &p).unwrap();
        let dt = t_star / divisions as f64;
        let mut s = ActuatorState { temperature_k: p.ambient_k, powered: true };
        let mut k = 0u64;
        while s.temperature_k - p.ambient_k < threshold {
            s = actuator::step_thermal(&s, current, dt, &p).unwrap();
            k += 1;
            prop_assert!(k < 10 * divisions as u64);
        }
        let crossing = k as f64 * dt;
        prop_assert!(crossing >= t_star - 1e-9 * t_star && crossing < t_star + dt * (1.0 + 1e-9));
    }

    #[test]
    fn unreachable_threshold_never_crossed(p in actuator_params(), current in 0.0f64..1.5, excess in 1.0f64..3.0) {
        let rise = excess * actuator::electrical_power(current, &p) / p.heat_loss_w_per_k;
        prop_assert!(actuator::heating_time(rise, current, &p).is_none());
    }

    #[test]
    fn event_times_stable_under_step_halving(cfg in oscillating_config()) {
        let coarse = oscillator::simulate_oscillator(&cfg, 20.0).unwrap();
        let fine_cfg = OscillatorConfig { dt_s: cfg.dt_s / 2.0, ..cfg };
        let fine = oscillator::simulate_oscillator(&fine_cfg, 20.0).unwrap();
        let n = coarse.events.len().min(fine.events.len());
        prop_assert!(n >= 3);
        prop_assert!(coarse.events.len().abs_diff(fine.events.len()) <= 1);
        for (a, b) in coarse.events.iter().zip(&fine.events) {
            prop_assert_eq!(a.kind, b.kind);
            prop_assert!((a.time_s - b.time_s).abs() < cfg.dt_s);
        }
    }

    #[test]
    fn oscillator_trace_invariants(cfg in oscillating_config()) {
        let run = oscillator::simulate_oscillator(&cfg, 20.0).unwrap();
        let events = &run.events;
        prop_assert!(events.len() >= 3);
        prop_assert_eq!(events[0].kind, SnapKind::SnapThrough);
        for w in events.windows(2) {
            prop_assert!(w[0].kind != w[1].kind);
        }

        // duty symmetry with identical actuators
        let halves: Vec<f64> = events.windows(2).skip(1).map(|w| w[1].time_s - w[0].time_s).collect();
        for w in halves.windows(2) {
            prop_assert!((w[0] - w[1]).abs() <= 2.0 * cfg.dt_s);
        }

        // between events after the first, the unpowered side cools and the powered side heats
        let samples = run.trace.samples();
        for w in samples.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.time_s <= events[0].time_s {
                continue;
            }
            let snapped = events.iter().any(|e| e.time_s > a.time_s && e.time_s <= b.time_s);
            if snapped {
                continue;
            }
            let (p0, p1, u0, u1) = match a.powered {
                Side::Left => (a.temp_left_k, b.temp_left_k, a.temp_right_k, b.temp_right_k),
                Side::Right => (a.temp_right_k, b.temp_right_k, a.temp_left_k, b.temp_left_k),
            };
            prop_assert!(u1 < u0);
            prop_assert!(p1 > p0);
        }

        // zero-crossing period agrees with the event period within one sample
        let from_events = oscillator::measure_period(events).unwrap();
        let from_signal = trace::zero_crossing_period(&run.trace).unwrap();
        prop_assert!((from_events - from_signal).abs() <= cfg.dt_s);
        prop_assert_eq!(trace::detect_period(&run.trace).unwrap(), from_events);
    }

    #[test]
    fn period_decreases_with_current(cfg in oscillating_config(), bump in 0.02f64..0.3) {
        let base = oscillator::simulate_oscillator(&cfg, 30.0).unwrap();
        let hot = OscillatorConfig { supply_current_a: cfg.supply_current_a + bump, ..cfg };
        let faster = oscillator::simulate_oscillator(&hot, 30.0).unwrap();
        let p0 = oscillator::measure_period(&base.events).unwrap();
        let p1 = oscillator::measure_period(&faster.events).unwrap();
        prop_assert!(p1 < p0);
        prop_assert!((p0 - oscillator::steady_period(&cfg).unwrap()).abs() < 1e-9 * p0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ratchet_is_monotone(r in robot_params(), current in 0.62f64..0.8, duration in 2.0f64..12.0) {
        let osc = OscillatorConfig { supply_current_a: current, ..OscillatorConfig::default() };
        let run = locomotion::simulate_crawl(&osc, &r, duration).unwrap();
        let samples = run.trace.samples();
        for w in samples.windows(2) {
            prop_assert!(w[1].robot_x_m >= w[0].robot_x_m);
            let moved = w[1].robot_x_m != w[0].robot_x_m;
            let snapped = run.steps.iter().any(|s| s.time_s > w[0].time_s && s.time_s <= w[1].time_s);
            prop_assert!(!moved || snapped);
        }
        for s in &run.steps {
            prop_assert!(s.distance_m >= 0.0);
        }
        if let Ok(summary) = locomotion::step_decomposition(&run.steps) {
            if summary.mean_back_m > 0.0 && summary.mean_thru_m > 0.0 {
                prop_assert!(summary.mean_thru_m <= summary.mean_back_m * (1.0 + 1e-12));
                if r.thru_velocity_factor < 1.0 {
                    prop_assert!(summary.mean_thru_m < summary.mean_back_m);
                }
            }
        }
        let total: f64 = run.steps.iter().map(|s| s.distance_m).sum();
        prop_assert!((run.trace.total_displacement_m() - total).abs() <= 1e-12 * total.max(1e-300));
    }
}

fn arbitrary_trace() -> impl Strategy<Value = Trace> {
    let sample_row = (
        -1.0f64..1.0,
        0.0f64..1e-3,
        200.0f64..400.0,
        200.0f64..400.0,
        any::<bool>(),
    );
    (
        1e-4f64..1.0,
        prop::collection::vec(sample_row, 0..60),
        prop::collection::vec((0.0f64..10.0, any::<bool>(), prop::option::of(0.0f64..1e-2)), 0..12),
    )
        .prop_map(|(dt, rows, evs)| {
            let mut x = 0.0;
            let samples = rows
                .into_iter()
                .enumerate()
                .map(|(i, (beam, inc, tl, tr, left))| {
                    x += inc;
                    Sample {
                        time_s: i as f64 * dt,
                        beam_x_m: beam,
                        robot_x_m: x,
                        temp_left_k: tl,
                        temp_right_k: tr,
                        powered: if left { Side::Left } else { Side::Right },
                    }
                })
                .collect();
            let mut t = 0.0;
            let events = evs
                .into_iter()
                .map(|(gap, back, step)| {
                    t += gap;
                    TraceEvent {
                        time_s: t,
                        kind: if back {
                            SnapKind::SnapBack
                        } else {
                            SnapKind::SnapThrough
                        },
                        step_m: step,
                    }
                })
                .collect();
            Trace::new(samples, events)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip_is_bit_exact(tr in arbitrary_trace()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        trace::write_csv(&tr, &path).unwrap();
        let back = trace::read_csv(&path).unwrap();
        prop_assert_eq!(back.samples().len(), tr.samples().len());
        for (a, b) in tr.samples().iter().zip(back.samples()) {
            prop_assert_eq!(a.time_s.to_bits(), b.time_s.to_bits());
            prop_assert_eq!(a.beam_x_m.to_bits(), b.beam_x_m.to_bits());
            prop_assert_eq!(a.robot_x_m.to_bits(), b.robot_x_m.to_bits());
            prop_assert_eq!(a.temp_left_k.to_bits(), b.temp_left_k.to_bits());
            prop_assert_eq!(a.temp_right_k.to_bits(), b.temp_right_k.to_bits());
        }
        prop_assert_eq!(back, tr);
    }
}

fn random_input() -> impl Strategy<Value = SpeedModelInput> {
    (robot_params(), 1e-7f64..1e-3, 0.5f64..10.0).prop_map(|(robot, e, t)| SpeedModelInput {
        robot,
        eta_e_j: e,
        period_s: t,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn composed_speed_equals_composition(input in random_input()) {
        let closed = analytic::avg_speed_composed(&input);
        let chained = analytic::avg_speed_by_composition(&input).unwrap();
        prop_assert!((closed - chained).abs() <= 1e-12 * closed);
    }

    #[test]
    fn calibration_inverts_speed(input in random_input(), speed in 1e-6f64..1e-1) {
        let e = analytic::calibrate_eta_e(speed, &input.robot, input.period_s).unwrap();
        let back = analytic::avg_speed_composed(&SpeedModelInput { eta_e_j: e, ..input });
        prop_assert!((back - speed).abs() <= 1e-12 * speed);
    }

    #[test]
    fn printed_over_composed_is_attached_mass(input in random_input()) {
        let ratio = analytic::avg_speed_printed(&input) / analytic::avg_speed_composed(&input);
        prop_assert!((ratio - input.robot.attached_mass_kg).abs() <= 1e-12 * input.robot.attached_mass_kg);
    }

    #[test]
    fn unit_change_separates_the_two_forms(input in random_input()) {
        // grams instead of kilograms: masses and energy (g*m^2/s^2) scale by 1000
        let mut grams = input;
        grams.robot.body_mass_kg *= 1e3;
        grams.robot.attached_mass_kg *= 1e3;
        grams.eta_e_j *= 1e3;
        let c0 = analytic::avg_speed_composed(&input);
        let c1 = analytic::avg_speed_composed(&grams);
        prop_assert!((c0 - c1).abs() <= 1e-12 * c0);
        let p0 = analytic::avg_speed_printed(&input);
        let p1 = analytic::avg_speed_printed(&grams);
        prop_assert!((p1 / p0 - 1e3).abs() < 1e-9);
    }

    #[test]
    fn printed_ratio_ignores_shared_terms(input in random_input(), other in random_input(), m1 in 0.2e-3f64..10e-3, m2 in 0.2e-3f64..10e-3) {
        let mut mixed = other;
        mixed.robot.body_mass_kg = input.robot.body_mass_kg;
        let a = analytic::speed_ratio_printed(&input, m1, m2).unwrap();
        let b = analytic::speed_ratio_printed(&mixed, m1, m2).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
        let big_m = input.robot.body_mass_kg;
        let closed = (big_m / m2 + 1.0).powi(2) / (big_m / m1 + 1.0).powi(2);
        prop_assert!((a - closed).abs() <= 1e-12 * closed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn golden_section_matches_grid(input in random_input(), lo in 0.05e-3f64..1e-3, span in 2.0f64..100.0) {
        let hi = lo * span;
        let best = analytic::optimize_attached_mass(&input, (lo, hi)).unwrap();
        let speed = |m: f64| analytic::avg_speed_composed(&input.with_attached_mass(m));
        let n = 10_000;
        let (grid_m, grid_v) = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .map(|m| (m, speed(m)))
            .fold((lo, f64::MIN), |acc, (m, v)| if v > acc.1 { (m, v) } else { acc });
        let spacing = (hi - lo) / (n - 1) as f64;
        prop_assert!(speed(best) >= grid_v * (1.0 - 1e-12));
        prop_assert!((speed(best) - grid_v).abs() <= 1e-6 * grid_v);
        prop_assert!((best - grid_m).abs() <= spacing);
    }
}

#[test]
fn critical_force_matches_grid_search() {
    for (e, a) in [(1.0, 1.0), (17.5e-6, 0.5e-3), (1.0, 0.0005), (3.3e-4, 2.0e-2)] {
        let p = BeamParams::new(e, a).unwrap();
        let n = 1_000_000;
        let grid_max = (0..=n)
            .map(|i| -a + a * i as f64 / n as f64)
            .map(|x| beam::restoring_force(x, &p).abs())
            .fold(0.0f64, f64::max);
        let cf = beam::critical_force(&p);
        assert!((cf - grid_max).abs() <= 1e-9 * cf, "E={e} a={a}: {cf} vs {grid_max}");
    }
}

#[test]
fn optimum_equals_body_mass_over_log_grid() {
    let base = SpeedModelInput::new(RobotParams::default(), analytic::SpeedModel::default());
    for k in 0..25 {
        let big_m = 0.1e-3 * 10f64.powf(k as f64 / 12.0);
        let input = SpeedModelInput {
            robot: RobotParams {
                body_mass_kg: big_m,
                ..base.robot
            },
            ..base
        };
        let best = analytic::optimize_attached_mass(&input, (big_m / 20.0, big_m * 20.0)).unwrap();
        assert!((best - big_m).abs() <= 1e-6 * big_m, "M={big_m} m*={best}");
    }
}

#[test]
fn thermal_fit_period_grows_with_heat_loss() {
    let tpl = ActuatorTemplate::default();
    let beam = BeamParams::default();
    let mut last = 0.0;
    for target in [2.2, 2.8, 3.4, 4.5, 6.0] {
        let fit = analytic::calibrate_thermal(target, 0.62, &tpl, &beam, 0.01).unwrap();
        assert!(fit.heat_loss_w_per_k > last);
        last = fit.heat_loss_w_per_k;
    }
}
