//! Randomized invariants across modules.

use proptest::prelude::*;

use crate::analysis::{thermo_point, RunOptions};
use crate::dynamics::{closed_form_trajectory, full_cycle_grid, integrate_psi, Method};
use crate::pulse::PulseEnvelope;
use crate::semiclassical::{integrate_bloch, work_total_and_decomposition};
use crate::thermo::{analyze, CyclePolicy};
use crate::{PulseParams, SystemParams};

const OMEGA0: f64 = 100.0;

fn envelope(delta: f64, delta_l: f64) -> PulseEnvelope {
    let s = SystemParams::natural(OMEGA0).unwrap();
    PulseEnvelope::new(s, PulseParams::detuned(delta, delta_l, &s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_law_and_splits_hold(delta in 0.3f64..5.0, delta_l in -3.0f64..3.0) {
        let p = envelope(delta, delta_l);
        let grid = full_cycle_grid(&p, 1e-12, 2e-3).unwrap();
        let r = analyze(&closed_form_trajectory(&p, &grid), &CyclePolicy::default()).unwrap();
        prop_assert!(r.residual_first_law.abs() < 1e-8 * OMEGA0);
        prop_assert!(r.residual_q_split.abs() < 1e-8 * OMEGA0);
        prop_assert!(r.residual_w_split.abs() < 1e-8);
        prop_assert!(r.q1_abs > 0.0 && r.q1_em < 0.0);
    }

    #[test]
    fn ode_tracks_closed_form(delta in 0.3f64..5.0, delta_l in -3.0f64..3.0) {
        let p = envelope(delta, delta_l);
        let grid = full_cycle_grid(&p, 1e-10, 2e-3).unwrap();
        let ode = integrate_psi(p.system(), &p, &grid).unwrap();
        let exact = closed_form_trajectory(&p, &grid);
        let err = ode.psi.iter().zip(&exact.psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-6, "err = {err:e}");
    }

    #[test]
    fn work_is_odd_in_detuning(delta in 0.1f64..3.0, delta_l in 0.05f64..3.0) {
        let s = SystemParams::natural(OMEGA0).unwrap();
        let opts = RunOptions::default();
        let w = |dl: f64| {
            thermo_point(&s, PulseParams::detuned(delta, dl, &s).unwrap(), Method::ClosedForm, &opts)
                .unwrap()
                .report
                .w1
        };
        let (plus, minus) = (w(delta_l), w(-delta_l));
        prop_assert!((plus + minus).abs() < 1e-6);
        prop_assert!(plus * (1.0 - delta) >= 0.0);
    }

    #[test]
    fn matched_bandwidth_does_no_work(delta_l in -3.0f64..3.0) {
        let s = SystemParams::natural(OMEGA0).unwrap();
        let pulse = PulseParams::detuned(1.0, delta_l, &s).unwrap();
        let r = thermo_point(&s, pulse, Method::ClosedForm, &RunOptions::default()).unwrap().report;
        prop_assert!(r.w1.abs() < 1e-10, "W1 = {:e}", r.w1);
    }

    #[test]
    fn bloch_decomposition_is_exact(delta in 0.3f64..5.0, delta_l in -3.0f64..3.0) {
        let p = envelope(delta, delta_l);
        let grid = full_cycle_grid(&p, 1e-12, 2e-3).unwrap();
        let traj = integrate_bloch(p.system(), &p, &grid).unwrap();
        let r = work_total_and_decomposition(&traj, &CyclePolicy::default()).unwrap();
        prop_assert!(r.residual_decomposition.abs() < 1e-8);
        prop_assert!(r.residual_first_law.abs() < 1e-8 * OMEGA0);
    }
}
