//! Fast cross-checks between independent code paths.

use vsys_core::closedform;
use vsys_core::output::Table;
use vsys_core::poleatlas;
use vsys_core::state::BlochState;
use vsys_core::{grid, master, Result, SystemParams};

type Check = fn() -> Result<(bool, String)>;

fn two_level_closure() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for (e1, d1) in [(0.3, 0.0), (1.3, 0.4), (5.0, -2.0)] {
        let p = SystemParams::with_rabi(e1, 0.0).gamma_l(0.0).delta1(d1);
        let exact = e1 * e1 / (2.0 * e1 * e1 + 1.0 + d1 * d1);
        worst = worst.max((master::solve(&p)?.rho11() - exact).abs());
    }
    Ok((worst < 1e-10, format!("max |error| {worst:.2e}")))
}

fn physical_states() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for (e1, e2, d1, d2) in [(2.0, 0.01, 0.0, 1.9), (0.8, 0.2, 7.0, 7.0), (10.0, 1e-3, 7.0, -7.1)] {
        let p = SystemParams::with_rabi(e1, e2).delta1(d1).delta2(d2);
        let g = master::build_generator(&p);
        let s = master::steady_state(&g)?;
        if !s.is_physical(1e-9) {
            return Ok((false, format!("unphysical state at {p:?}")));
        }
        worst = worst.max(g.residual(&s));
    }
    Ok((worst < 1e-12, format!("max residual {worst:.2e}")))
}

fn closed_form_matches_numeric() -> Result<(bool, String)> {
    let p = SystemParams::with_rabi(2.0, 0.01).nu(1e-5).gamma_l(0.0);
    let mut worst: f64 = 0.0;
    for d in grid::symmetric(6.0, 121)? {
        let numeric = master::solve(&p.delta2(d))?.rho11();
        worst = worst.max((closedform::rho11_closed(&p, d)? / numeric - 1.0).abs());
    }
    Ok((worst < 0.02, format!("max relative deviation {worst:.2e}")))
}

fn poles_match_closed_form() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for eps2 in [0.01, 0.1] {
        let p = SystemParams::with_rabi(2.0, eps2).nu(1e-5).gamma_l(0.0);
        let set = poleatlas::physical_poles(&p)?;
        for root in closedform::lambdas(&p).value.quartic_roots() {
            let nearest = set.poles.iter().map(|q| (q.location - root).norm()).fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest / root.norm());
        }
    }
    Ok((worst < 2e-3, format!("max relative distance {worst:.2e}")))
}

fn relaxation_reaches_steady_state() -> Result<(bool, String)> {
    let p = SystemParams::with_rabi(1.0, 0.3).nu(0.1).gamma_l(0.05).delta2(0.4);
    let g = master::build_generator(&p);
    let target = master::steady_state(&g)?;
    let end = master::evolve(&g, &BlochState::GROUND, 20.0 / p.nu, g.stable_step())?;
    let diff = end.max_abs_diff(&target);
    Ok((diff < 1e-6, format!("|x(t) - x_ss| {diff:.2e}")))
}

fn csv_round_trip() -> Result<(bool, String)> {
    let mut t = Table::new("check", &["a", "b"]);
    t.push(vec![Some(0.1), None]);
    t.push(vec![Some(-1.0 / 3.0), Some(2.28e-6)]);
    let first = t.to_csv()?;
    let again = Table::from_csv("check", &first)?.to_csv()?;
    Ok((first == again, format!("{} bytes", first.len())))
}

const CHECKS: [(&str, Check); 6] = [
    ("two-level closure", two_level_closure),
    ("physical steady states", physical_states),
    ("closed form vs numeric", closed_form_matches_numeric),
    ("poles vs closed form", poles_match_closed_form),
    ("relaxation to steady state", relaxation_reaches_steady_state),
    ("csv round trip", csv_round_trip),
];

/// Print one line per check; true when all pass.
pub fn run() -> bool {
    let mut ok = true;
    for (name, check) in CHECKS {
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, e.to_string()),
        };
        ok &= pass;
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
    ok
}
