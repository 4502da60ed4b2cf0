use pathological::multibump::{
    bump_by_name, kohn_build_candidate, kohn_measure_budget, verify_multibump_lemma, KohnInputs, MultiBumpParams,
};
use pathological::fn1d::linspace;

use crate::config::RunConfig;
use crate::experiment::{num, Experiment, Failure, Outcome};

/// Spread of the measured Hölder constant across levels allowed by the uniformity check.
const HOLDER_SPREAD: f64 = 0.05;

pub struct BumpCmd;

impl Experiment for BumpCmd {
    fn name(&self) -> &'static str {
        "bump"
    }

    fn default_csv(&self) -> &'static str {
        "bump_report.csv"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome, Failure> {
        let bump = bump_by_name(cfg.raw("bump.shape"))?;
        let (alpha, beta): (f64, f64) = (cfg.get("bump.alpha")?, cfg.get("bump.beta")?);
        let ns = cfg.levels("bump.n", "bump.n_min", "bump.n_max")?;
        let ks = cfg.range("bump.k_min", "bump.k_max")?;
        let points: usize = cfg.get("bump.grid_points")?;
        let mut out = Outcome::with_columns(&[
            ("alpha", "1"),
            ("beta", "1"),
            ("n", "level"),
            ("k", "window half-width"),
            ("support_violation", "max |phi| off U_n"),
            ("sup_phi", "max |phi|"),
            ("sup_phi_bound", "bound"),
            ("sup_psi", "max |psi|"),
            ("sup_psi_bound", "bound"),
            ("lipschitz", "estimated order-1 constant"),
            ("lipschitz_bound", "2^((1-alpha)beta n) L_phi"),
            ("holder", "estimated order-alpha constant"),
            ("holder_bound", "H_phi"),
            ("min_gap", "min psi(y)-psi(x) over y-x >= 3/2^n"),
            ("gap_bound", "2^(-(alpha+1)beta n)"),
            ("gap_pairs", "count"),
            ("ok", "all five estimates"),
        ]);
        for &k in &ks {
            let mut holders = Vec::new();
            for &n in &ns {
                let mut p = MultiBumpParams::new(alpha, beta, n, k);
                p.h = cfg.get("bump.h")?;
                p.lambda_scale = cfg.get("bump.lambda_scale")?;
                let w = f64::from(k) + 1.5;
                let r = verify_multibump_lemma(&bump, &p, &linspace(-w, w, points))?;
                out.rows.push(vec![
                    num(alpha),
                    num(beta),
                    n.to_string(),
                    k.to_string(),
                    num(r.support_violation),
                    num(r.sup_phi),
                    num(r.sup_phi_bound),
                    num(r.sup_psi),
                    num(r.sup_psi_bound),
                    num(r.lipschitz),
                    num(r.lipschitz_bound),
                    num(r.holder),
                    num(r.holder_bound),
                    num(r.min_gap),
                    num(r.gap_bound),
                    r.gap_pairs.to_string(),
                    r.all_ok().to_string(),
                ]);
                out.check(
                    format!("multi-bump estimates n={n} k={k}"),
                    r.all_ok(),
                    r.first_failure().map_or("all hold".to_string(), |f| format!("{f} fails")),
                );
                holders.push(r.holder);
            }
            let (lo, hi) = holders.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &h| (a.min(h), b.max(h)));
            out.check(
                format!("Hölder constant uniform in n (k={k})"),
                hi <= lo * (1.0 + HOLDER_SPREAD),
                format!("range [{lo:.6}, {hi:.6}]"),
            );
        }

        if cfg.get::<bool>("bump.kohn")? {
            let mut inp = KohnInputs::new(alpha, beta);
            inp.h = cfg.get("bump.h")?;
            inp.eps1 = cfg.get("bump.eps1")?;
            inp.eps0 = cfg.get("bump.eps0")?;
            inp.k0 = cfg.get("bump.k0")?;
            let cand = kohn_build_candidate(&bump, &inp)?;
            let budget = kohn_measure_budget(cand.n0, beta, cand.k0);
            out.notes.push(format!(
                "candidate: n0 = {}, eps2 = {}, C1 distance bound = {}, gap margin (log2) = {}",
                cand.n0, num(cand.eps2), num(cand.c1_bound), num(cand.n_conditions.gap_margin_log2)
            ));
            let exact = budget.slack_exact.as_ref().map_or("n/a".to_string(), |s| s.to_string());
            out.notes.push(format!("measure budget slack = {} (exact {exact})", num(budget.slack)));
            out.check("candidate eps conditions", cand.eps_conditions.iter().all(|&b| b), format!("{:?}", cand.eps_conditions));
            out.check("candidate n0 conditions", cand.n_conditions.all(), format!("{:?}", cand.n_conditions));
            out.check("measure budget positive", budget.positive, format!("exact sign: {}", budget.sign_is_exact));
        }
        Ok(out)
    }
}
