use rayon::prelude::*;

use pathological::wave::{
    basic_ingredient, blowup_demo, energy_bounds_check, integrate_mode, random_lipschitz_speed, verify_ode_identity,
    BlowupConfig, EnergyBounds,
};

use crate::config::RunConfig;
use crate::experiment::{num, Experiment, Failure, Outcome};

const IDENTITY_TOL: f64 = 1e-9;
const V_AT_DELTA_TOL: f64 = 1e-8;
// The derivative error tracks the integrator tolerance at roughly 1e4 times it.
const VPRIME_TOL: f64 = 1e-6;
const VPRIME_PER_TOL: f64 = 2e4;
const ENERGY_SLACK_TOL: f64 = 1e-8;

pub struct WaveCmd;

fn blowup_config(cfg: &RunConfig) -> Result<BlowupConfig, Failure> {
    let levels = cfg.levels("wave.n", "wave.n_min", "wave.n_max")?;
    Ok(BlowupConfig {
        alpha: cfg.get("wave.alpha")?,
        beta: cfg.get("wave.beta")?,
        big_b: cfg.get("wave.big_b")?,
        mu1: cfg.get("wave.mu1")?,
        mu2: cfg.get("wave.mu2")?,
        h: cfg.get("wave.h")?,
        eps1: cfg.get("wave.eps1")?,
        delta: cfg.get("wave.delta")?,
        k0: cfg.get("wave.k0")?,
        c0: cfg.get("wave.c0")?,
        lambdas: levels.iter().map(|&n| f64::from(n).exp2()).collect(),
        tol: cfg.get("wave.tol")?,
        integrator: cfg.raw("wave.integrator").to_string(),
        samples: cfg.get("wave.samples")?,
        h_gamma: cfg.get_opt("wave.h_gamma")?,
    })
}

impl Experiment for WaveCmd {
    fn name(&self) -> &'static str {
        "wave"
    }

    fn default_csv(&self) -> &'static str {
        "wave_modes.csv"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome, Failure> {
        let bc = blowup_config(cfg)?;
        let mut out = Outcome::with_columns(&[
            ("lambda_n", "eigenvalue"),
            ("eps_n", "oscillation amplitude"),
            ("delta_n", "end of the oscillation window"),
            ("t", "time"),
            ("v", "mode amplitude"),
            ("vprime", "mode velocity"),
            ("log_E", "ln(v'^2 + lambda^2 v^2)"),
            ("log_ultra_norm_lb", "min over [1/k0,k0] of ln(v^2+v'^2) - 2 k0 lambda^(1/B)"),
            ("predicted_exponent", "r0 lambda^(1-alpha) - 2 lambda^(1/beta) ln(1+lambda)"),
        ]);

        for eps in cfg.get_list("wave.ingredient_eps")? {
            let r = verify_ode_identity(&basic_ingredient(eps)?, 20.0, 20_001)?;
            out.check(format!("ingredient identity eps={eps}"), r <= IDENTITY_TOL, format!("max residual {}", num(r)));
        }

        let table = blowup_demo(&bc)?;
        out.notes.push(format!("H_gamma = {}, r0 = {}", num(table.h_gamma), num(table.r0)));
        for row in &table.rows {
            let p = &row.profile;
            for s in &row.samples {
                out.rows.push(vec![
                    num(row.lambda),
                    num(p.eps_n),
                    num(p.delta_n),
                    num(s.t),
                    num(s.v),
                    num(s.vprime),
                    num(s.log_e),
                    num(row.log_ultra_lb),
                    num(row.predicted_exponent),
                ]);
            }
            let lam = row.lambda;
            out.check(format!("speed within [mu1, mu2] (lambda={lam})"), row.speed_in_range, "sampled range");
            out.check(
                format!("v(delta_n) = 0 (lambda={lam})"),
                row.v_at_delta_rel <= V_AT_DELTA_TOL,
                format!("relative {}", num(row.v_at_delta_rel)),
            );
            out.check(
                format!("v'(delta_n) exponential (lambda={lam})"),
                row.vprime_at_delta_rel_err <= VPRIME_TOL.max(VPRIME_PER_TOL * bc.tol),
                format!("relative error {}", num(row.vprime_at_delta_rel_err)),
            );
        }
        let lbs: Vec<String> = table.rows.iter().map(|r| format!("{:.3}", r.log_ultra_lb)).collect();
        out.check("ultradistribution lower bound increasing", table.strictly_increasing(), lbs.join(" < "));
        if let (Some(raw), Some(g)) = (table.slope_fit(), table.growth_fit()) {
            out.notes.push(format!(
                "top-half fit against lambda^(1-alpha): slope {} (growth part {}), r0 = {}",
                num(raw.slope),
                num(g.slope),
                num(table.r0)
            ));
        }

        // Energy sandwich on random Lipschitz speeds.
        let count: u64 = cfg.get("wave.energy_speeds")?;
        let seed: u64 = cfg.get("run.seed")?;
        let (mu1, mu2): (f64, f64) = (cfg.get("wave.energy_mu1")?, cfg.get("wave.energy_mu2")?);
        let (knots, lam, tmax): (usize, f64, f64) =
            (cfg.get("wave.energy_knots")?, cfg.get("wave.energy_lambda")?, cfg.get("wave.energy_tmax")?);
        let tol = bc.tol;
        let reports = (0..count)
            .into_par_iter()
            .map(|i| -> Result<_, Failure> {
                let c = random_lipschitz_speed(seed.wrapping_add(i), mu1, mu2, tmax, knots)?;
                let sol = integrate_mode(&c, lam, 1.0, 0.5, tmax, tol)?;
                Ok(energy_bounds_check(&sol, &EnergyBounds::new(mu1, mu2, c.lipschitz())?, 0.0)?)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let worst = reports.iter().map(|r| r.lower_slack.min(r.upper_slack)).fold(f64::INFINITY, f64::min);
        out.check(
            format!("energy sandwich on {count} random speeds"),
            reports.iter().all(|r| r.holds(ENERGY_SLACK_TOL)),
            format!("min log slack {}", num(worst)),
        );
        Ok(out)
    }
}
