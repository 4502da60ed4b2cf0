use pathological::fn1d::{linspace, Fn1D};
use pathological::holder::{holder_constant, sawtooth_holder_half, sawtooth_perturb};

use crate::config::RunConfig;
use crate::experiment::{num, Experiment, Failure, Outcome};

pub struct ExerciseCmd;

impl Experiment for ExerciseCmd {
    fn name(&self) -> &'static str {
        "exercise"
    }

    fn default_csv(&self) -> &'static str {
        "exercise.csv"
    }

    fn run(&self, cfg: &RunConfig) -> Result<Outcome, Failure> {
        let (h, eps1): (f64, f64) = (cfg.get("exercise.h")?, cfg.get("exercise.eps1")?);
        let ns = cfg.range("exercise.n_min", "exercise.n_max")?;
        let hol_grid = linspace(0.0, 1.0, cfg.get("exercise.holder_points")?);
        let lip_grid = linspace(0.0, 0.1, cfg.get("exercise.lip_points")?);
        let f0 = Fn1D::zero();
        let mut out = Outcome::with_columns(&[
            ("n", "1"),
            ("holder_const", "order-1/2 constant on [0,1]"),
            ("local_lip_const", "order-1 constant on [0,0.1]"),
            ("sup_distance", "max |f_n - f0| on [0,1]"),
        ]);
        out.notes.push(format!("sawtooth order-1/2 constant H_saw = {}", num(sawtooth_holder_half())));
        let mut worst = 0.0f64;
        for &n in &ns {
            let f = sawtooth_perturb(&f0, n, h, eps1)?;
            let hc = holder_constant(&f, 0.5, &hol_grid)?.constant;
            let lc = holder_constant(&f, 1.0, &lip_grid)?.constant;
            let sup = hol_grid.iter().map(|&x| f.eval(x).abs()).fold(0.0, f64::max);
            worst = worst.max(hc);
            out.rows.push(vec![n.to_string(), num(hc), num(lc), num(sup)]);
        }
        out.check("order-1/2 constant within H", worst <= h * (1.0 + 1e-9), format!("max {} vs H = {}", num(worst), num(h)));
        Ok(out)
    }
}
