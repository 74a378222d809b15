#![allow(clippy::too_many_arguments)]

use serde::Serialize;
use serde_json::json;

use crate::boundary::RobinMeasure;
use crate::error::{Error, Result};
use crate::estimators::{
    coupled_resolvent, coupled_semigroup, mean_and_stderr, potential_truncation_bound,
    potential_u_samples, revuz_rate_samples, semigroup_samples, KilledEstimator, TestFunction,
    WeightEstimator,
};
use crate::geometry::{Domain, Point};
use crate::oracle::{resolvent_reference, semigroup_reference, FdSolution, OracleConfig};
use crate::rng::derived_seed;
use crate::sampler::{Level, SimConfig};

use super::{allowance, CheckRecord, SuiteReport, COARSENING, ROUNDING_SLACK};

/// `Ok(None)` when no oracle covers the problem.
fn optional(r: Result<FdSolution>) -> Result<Option<FdSolution>> {
    match r {
        Ok(s) => Ok(Some(s)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn mean(v: &[f64]) -> f64 {
    mean_and_stderr(v).0
}

/// Mean and standard error of `a_i - b_i`.
fn paired(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    mean_and_stderr(&d)
}

/// Paths `i` where `ordered(columns[j][i], columns[j + 1][i])` fails for some `j`.
fn pathwise_violations(columns: &[Vec<f64>], ordered: impl Fn(f64, f64) -> bool) -> u64 {
    let n = columns.first().map_or(0, Vec::len);
    (0..n)
        .filter(|&i| columns.windows(2).any(|w| !ordered(w[0][i], w[1][i])))
        .count() as u64
}

fn check_ladder(ladder: &[RobinMeasure]) -> Result<()> {
    if ladder.len() < 2 {
        return Err(Error::InvalidArgument(
            "a ladder needs at least two measures".into(),
        ));
    }
    if let Some(i) = ladder.windows(2).position(|w| !w[0].is_dominated_by(&w[1])) {
        return Err(Error::InvalidArgument(format!(
            "ladder is not increasing between rungs {i} and {}",
            i + 1
        )));
    }
    Ok(())
}

/// Compares each column mean with its oracle value at `x`, with the allowance
/// taken from the matching coarse column.
fn oracle_checks(
    report: &mut SuiteReport,
    labels: &[String],
    fine: &[Vec<f64>],
    coarse: &[Vec<f64>],
    oracles: &[Option<FdSolution>],
    x: Point,
    inputs: &serde_json::Value,
) {
    for (k, label) in labels.iter().enumerate() {
        let Some(sol) = &oracles[k] else { continue };
        let (m, se) = mean_and_stderr(&fine[k]);
        let mc = mean(&coarse[k]);
        let mut inp = inputs.clone();
        inp["fine_mean"] = json!(m);
        inp["coarse_mean"] = json!(mc);
        report.push(CheckRecord::within(
            format!("{label} mean vs oracle"),
            inp,
            m,
            sol.value_at(x),
            se,
            3.0,
            allowance(m, mc) + ROUNDING_SLACK,
        ));
    }
}

/// Dirichlet <= Robin <= Neumann per coupled path, and each mean against
/// its oracle.
pub fn check_sandwich(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    t: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
    oracle: &OracleConfig,
) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("sandwich", cfg);
    let measures = [
        RobinMeasure::neumann(domain),
        measure.clone(),
        RobinMeasure::dirichlet(domain),
    ];
    let inputs = json!({
        "domain": domain, "measure": measure, "f": f.name(), "t": t, "x": x, "n": n,
    });
    let fine = coupled_semigroup(domain, &measures, f, t, x, n, cfg, cfg.level())?;
    report.push(CheckRecord::exact(
        "pathwise dirichlet <= robin <= neumann",
        inputs.clone(),
        pathwise_violations(
            &[fine[2].clone(), fine[1].clone(), fine[0].clone()],
            |a, b| a <= b,
        ),
    ));
    if measure.is_neumann() {
        let differ = fine[0].iter().zip(&fine[1]).filter(|(a, b)| a != b).count() as u64;
        report.push(CheckRecord::exact(
            "zero rate: robin equals neumann per path",
            inputs.clone(),
            differ,
        ));
    }
    let oracles = measures
        .iter()
        .map(|m| optional(semigroup_reference(domain, m, f, t, oracle)))
        .collect::<Result<Vec<_>>>()?;
    if oracles.iter().any(Option::is_some) {
        let coarse = coupled_semigroup(
            domain,
            &measures,
            f,
            t,
            x,
            n,
            cfg,
            cfg.level().coarsened(COARSENING),
        )?;
        let labels = ["neumann", "robin", "dirichlet"].map(String::from);
        oracle_checks(&mut report, &labels, &fine, &coarse, &oracles, x, &inputs);
    }
    Ok(report)
}

/// Weights nonincreasing along an increasing ladder, per coupled path.
pub fn check_monotone(
    domain: &Domain,
    ladder: &[RobinMeasure],
    f: &dyn TestFunction,
    t: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
    oracle: &OracleConfig,
) -> Result<SuiteReport> {
    check_ladder(ladder)?;
    let mut report = SuiteReport::new("monotone", cfg);
    let inputs = json!({
        "domain": domain, "ladder": ladder, "f": f.name(), "t": t, "x": x, "n": n,
    });
    let fine = coupled_semigroup(domain, ladder, f, t, x, n, cfg, cfg.level())?;
    report.push(CheckRecord::exact(
        "pathwise weights nonincreasing along the ladder",
        inputs.clone(),
        pathwise_violations(&fine, |a, b| a >= b),
    ));
    let means: Vec<f64> = fine.iter().map(|c| mean(c)).collect();
    let mean_violations = means.windows(2).filter(|w| w[1] > w[0]).count() as u64;
    let mut inp = inputs.clone();
    inp["means"] = json!(means);
    report.push(CheckRecord::exact(
        "means nonincreasing along the ladder",
        inp,
        mean_violations,
    ));
    let top = ladder.len() - 1;
    if (0..domain.num_components()).all(|c| ladder[top].is_dirichlet(c)) {
        let above = (0..n as usize)
            .filter(|&i| (0..top).any(|j| fine[top][i] > fine[j][i]))
            .count() as u64;
        report.push(CheckRecord::exact(
            "dirichlet rung is a pathwise lower bound",
            inputs.clone(),
            above,
        ));
    }
    let oracles = ladder
        .iter()
        .map(|m| optional(semigroup_reference(domain, m, f, t, oracle)))
        .collect::<Result<Vec<_>>>()?;
    if oracles.iter().any(Option::is_some) {
        let coarse = coupled_semigroup(
            domain,
            ladder,
            f,
            t,
            x,
            n,
            cfg,
            cfg.level().coarsened(COARSENING),
        )?;
        let labels: Vec<String> = (0..ladder.len()).map(|j| format!("rung {j}")).collect();
        oracle_checks(&mut report, &labels, &fine, &coarse, &oracles, x, &inputs);
    }
    Ok(report)
}

/// Per-path pieces of `R^A f - R f + U g`, all driven by the same streams.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySamples {
    pub killed: Vec<f64>,
    pub free: Vec<f64>,
    pub potential: Vec<f64>,
    pub truncation_bound: f64,
}

impl IdentitySamples {
    pub fn residuals(&self) -> Vec<f64> {
        self.killed
            .iter()
            .zip(&self.free)
            .zip(&self.potential)
            .map(|((k, r), u)| k - r + u)
            .collect()
    }

    /// The first `n` paths, which are exactly a run with `n` paths.
    pub fn prefix(&self, n: usize) -> IdentitySamples {
        IdentitySamples {
            killed: self.killed[..n].to_vec(),
            free: self.free[..n].to_vec(),
            potential: self.potential[..n].to_vec(),
            truncation_bound: self.truncation_bound,
        }
    }
}

pub fn resolvent_identity_samples(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    g: &dyn TestFunction,
    alpha: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
    level: Level,
) -> Result<IdentitySamples> {
    let pair = [measure.clone(), RobinMeasure::neumann(domain)];
    let mut res = coupled_resolvent(domain, &pair, f, alpha, x, n, cfg, level)?;
    let free = res.pop().expect("two columns");
    let killed = res.pop().expect("two columns");
    let potential = potential_u_samples(domain, measure, g, alpha, x, n, cfg, level)?;
    Ok(IdentitySamples {
        killed,
        free,
        potential,
        truncation_bound: potential_truncation_bound(domain, measure, g, alpha, cfg.horizon),
    })
}

/// `R_alpha^A f - R_alpha f + U_A^alpha g = 0` with `g` the oracle
/// `R_alpha^A f`. The potential is truncated at `cfg.horizon` and its bound
/// joins the tolerance.
pub fn check_resolvent_identity(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    alpha: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
    oracle: &OracleConfig,
) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("resolvent", cfg);
    let g = resolvent_reference(domain, measure, f, alpha, oracle)?.to_function("oracle resolvent");
    let inputs = json!({
        "domain": domain, "measure": measure, "f": f.name(), "alpha": alpha, "x": x, "n": n,
        "horizon": cfg.horizon,
    });
    let fine = resolvent_identity_samples(domain, measure, f, &g, alpha, x, n, cfg, cfg.level())?;
    let res = fine.residuals();
    if measure.is_neumann() {
        let nonzero = res.iter().filter(|&&r| r != 0.0).count() as u64;
        report.push(CheckRecord::exact(
            "zero rate: residual vanishes per path",
            inputs.clone(),
            nonzero,
        ));
        return Ok(report);
    }
    let coarse = resolvent_identity_samples(
        domain,
        measure,
        f,
        &g,
        alpha,
        x,
        n,
        cfg,
        cfg.level().coarsened(COARSENING),
    )?;
    let (m, se) = mean_and_stderr(&res);
    let mc = mean(&coarse.residuals());
    let mut inp = inputs.clone();
    inp["killed_mean"] = json!(mean(&fine.killed));
    inp["free_mean"] = json!(mean(&fine.free));
    inp["potential_mean"] = json!(mean(&fine.potential));
    inp["coarse_residual"] = json!(mc);
    inp["truncation_bound"] = json!(fine.truncation_bound);
    report.push(CheckRecord::within(
        "residual",
        inp,
        m,
        0.0,
        se,
        3.0,
        allowance(m, mc) + fine.truncation_bound,
    ));
    Ok(report)
}

/// Weight and killed estimators on independent seeds agree within four
/// combined standard errors.
pub fn check_estimator_equivalence(
    domain: &Domain,
    measure: &RobinMeasure,
    f: &dyn TestFunction,
    t: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("equivalence", cfg);
    let inputs = json!({
        "domain": domain, "measure": measure, "f": f.name(), "t": t, "x": x, "n": n,
    });
    let level = cfg.level();
    let w = semigroup_samples(domain, measure, f, t, x, n, cfg, &WeightEstimator, level)?;
    let killed_cfg = cfg.clone().with_seed(derived_seed(cfg.seed, 1));
    let k = semigroup_samples(
        domain,
        measure,
        f,
        t,
        x,
        n,
        &killed_cfg,
        &KilledEstimator,
        level,
    )?;
    let (mw, sw) = mean_and_stderr(&w);
    let (mk, sk) = mean_and_stderr(&k);
    let mut inp = inputs.clone();
    inp["killed_seed"] = json!(killed_cfg.seed);
    inp["weight_mean"] = json!(mw);
    inp["killed_mean"] = json!(mk);
    report.push(CheckRecord::within(
        "weight vs killed",
        inp,
        mw,
        mk,
        sw.hypot(sk),
        4.0,
        0.0,
    ));
    if measure.is_neumann() {
        let same = semigroup_samples(domain, measure, f, t, x, n, cfg, &KilledEstimator, level)?;
        let differ = w.iter().zip(&same).filter(|(a, b)| a != b).count() as u64;
        report.push(CheckRecord::exact(
            "zero rate: estimators agree per path",
            inputs,
            differ,
        ));
    } else if sw > 0.0 {
        report.push(CheckRecord::at_least(
            "killed to weight variance ratio",
            inputs,
            (sk / sw).powi(2),
            1.0,
        ));
    }
    Ok(report)
}

/// Resolvents along `beta / k` (toward Neumann) and `k beta` (toward
/// Dirichlet), coupled.
pub fn check_mu_convergence(
    domain: &Domain,
    base: &RobinMeasure,
    f: &dyn TestFunction,
    alpha: f64,
    x: Point,
    n: u64,
    cfg: &SimConfig,
    oracle: &OracleConfig,
) -> Result<SuiteReport> {
    if base.has_dirichlet() {
        return Err(Error::InvalidArgument(
            "the base measure must be finite".into(),
        ));
    }
    let mut report = SuiteReport::new("mu-convergence", cfg);
    let inputs = json!({
        "domain": domain, "measure": base, "f": f.name(), "alpha": alpha, "x": x, "n": n,
    });

    let down = [1.0, 2.0, 4.0, 8.0, 16.0];
    let mut family: Vec<RobinMeasure> = down.iter().map(|k| base.scale(1.0 / k)).collect();
    family.push(RobinMeasure::neumann(domain));
    let fine = coupled_resolvent(domain, &family, f, alpha, x, n, cfg, cfg.level())?;
    let last = family.len() - 1;
    report.push(CheckRecord::exact(
        "decreasing family: pathwise nondecreasing toward neumann",
        inputs.clone(),
        pathwise_violations(&fine, |a, b| a <= b),
    ));
    let gaps: Vec<(f64, f64)> = (0..down.len())
        .map(|j| paired(&fine[last], &fine[j]))
        .collect();
    let gap_violations = gaps.windows(2).filter(|w| w[1].0 > w[0].0).count() as u64;
    let mut inp = inputs.clone();
    inp["k"] = json!(down);
    inp["gaps"] = json!(gaps.iter().map(|g| g.0).collect::<Vec<_>>());
    report.push(CheckRecord::exact(
        "decreasing family: gaps shrink in k",
        inp.clone(),
        gap_violations,
    ));

    let oracle_of = |m: &RobinMeasure| optional(resolvent_reference(domain, m, f, alpha, oracle));
    let oracle_vals = family
        .iter()
        .map(|m| Ok(oracle_of(m)?.map(|s| s.value_at(x))))
        .collect::<Result<Vec<_>>>()?;
    if oracle_vals.iter().all(Option::is_some) {
        let o: Vec<f64> = oracle_vals.into_iter().flatten().collect();
        let o_gap = |j: usize| o[last] - o[j];
        let o_ratio = o_gap(4) / o_gap(0);
        let ratio = gaps[4].0 / gaps[0].0;
        // delta method on the paired per-path gaps
        let z: Vec<f64> = (0..n as usize)
            .map(|i| (fine[last][i] - fine[4][i]) - ratio * (fine[last][i] - fine[0][i]))
            .collect();
        let ratio_se = mean_and_stderr(&z).1 / gaps[0].0;
        inp["oracle_gaps"] = json!((0..down.len()).map(o_gap).collect::<Vec<_>>());
        report.push(CheckRecord::within_relative(
            "gap ratio k=16 / k=1 vs oracle",
            inp,
            ratio,
            o_ratio,
            ratio_se,
            0.2,
        ));
    }

    let up = [1.0, 10.0, 100.0, 1000.0];
    let mut family: Vec<RobinMeasure> = up.iter().map(|&k| base.scale(k)).collect();
    family.push(RobinMeasure::dirichlet(domain));
    let fine = coupled_resolvent(domain, &family, f, alpha, x, n, cfg, cfg.level())?;
    let mut inp = inputs.clone();
    inp["k"] = json!(up);
    inp["means"] = json!(fine.iter().map(|c| mean(c)).collect::<Vec<_>>());
    report.push(CheckRecord::exact(
        "increasing family: pathwise nonincreasing toward dirichlet",
        inp.clone(),
        pathwise_violations(&fine, |a, b| a >= b),
    ));
    if let Some(dir) = oracle_of(&family[up.len()])? {
        let top = up.len() - 1;
        let coarse = coupled_resolvent(
            domain,
            &family,
            f,
            alpha,
            x,
            n,
            cfg,
            cfg.level().coarsened(COARSENING),
        )?;
        let (m, se) = mean_and_stderr(&fine[top]);
        let mc = mean(&coarse[top]);
        inp["coarse_mean"] = json!(mc);
        report.push(CheckRecord::within(
            "k=1000 vs dirichlet oracle",
            inp,
            m,
            dir.value_at(x),
            se,
            3.0,
            allowance(m, mc),
        ));
    }
    Ok(report)
}

/// Least-squares line through `(t_i, y_i)` evaluated at `t = 0`, with its
/// standard error for independent `y_i`.
pub fn extrapolate_to_zero(ts: &[f64], ys: &[f64], ses: &[f64]) -> (f64, f64) {
    let n = ts.len() as f64;
    if ts.len() == 1 {
        return (ys[0], ses[0]);
    }
    let tbar = ts.iter().sum::<f64>() / n;
    let sxx: f64 = ts.iter().map(|t| (t - tbar) * (t - tbar)).sum();
    let w: Vec<f64> = ts
        .iter()
        .map(|t| 1.0 / n - tbar * (t - tbar) / sxx)
        .collect();
    let intercept = w.iter().zip(ys).map(|(w, y)| w * y).sum();
    let se = w
        .iter()
        .zip(ses)
        .map(|(w, s)| (w * s).powi(2))
        .sum::<f64>()
        .sqrt();
    (intercept, se)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevuzProblem {
    pub domain: Domain,
    pub measure: RobinMeasure,
}

/// Small-time rates, their extrapolation to `t = 0` and the implied
/// local-time constant `c = rate(0) / mu(boundary)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevuzOutcome {
    pub domain: String,
    pub t_small: Vec<f64>,
    pub rates: Vec<f64>,
    pub rate_errors: Vec<f64>,
    pub intercept: f64,
    pub intercept_error: f64,
    pub mass: f64,
    pub c: f64,
    pub c_error: f64,
}

fn revuz_outcome(
    index: u64,
    p: &RevuzProblem,
    t_ladder: &[f64],
    steps_per_window: u64,
    n: u64,
    cfg: &SimConfig,
) -> Result<RevuzOutcome> {
    let one = crate::estimators::Constant(1.0);
    let mass = p
        .measure
        .total_mass(&p.domain)
        .ok_or_else(|| Error::InvalidArgument("the Revuz check needs a finite measure".into()))?;
    let mut rates = Vec::new();
    let mut errs = Vec::new();
    for (ti, &t) in t_ladder.iter().enumerate() {
        let h = t / steps_per_window as f64;
        let c = cfg
            .clone()
            .with_h(h)
            .with_seed(derived_seed(cfg.seed, (index << 16) | ti as u64));
        let s = revuz_rate_samples(&p.domain, &p.measure, &one, t, n, &c, c.level())?;
        let (m, se) = mean_and_stderr(&s);
        rates.push(m);
        errs.push(se);
    }
    let (intercept, intercept_error) = extrapolate_to_zero(t_ladder, &rates, &errs);
    Ok(RevuzOutcome {
        domain: p.domain.name().to_string(),
        t_small: t_ladder.to_vec(),
        rates,
        rate_errors: errs,
        intercept,
        intercept_error,
        mass,
        c: intercept / mass,
        c_error: intercept_error / mass,
    })
}

/// Revuz rates on every problem with `h = t / steps_per_window`, so the
/// scheme's relative local-time deficit is the same at every `t`. The first
/// problem's `c` is the reference for the others.
pub fn check_revuz(
    problems: &[RevuzProblem],
    t_ladder: &[f64],
    steps_per_window: u64,
    n: u64,
    cfg: &SimConfig,
) -> Result<(SuiteReport, Vec<RevuzOutcome>)> {
    if problems.is_empty() || t_ladder.is_empty() || steps_per_window == 0 {
        return Err(Error::InvalidArgument("empty Revuz check".into()));
    }
    let mut report = SuiteReport::new("revuz", cfg);
    let one = crate::estimators::Constant(1.0);
    let mut outcomes = Vec::new();
    for (pi, p) in problems.iter().enumerate() {
        let inputs = json!({
            "domain": p.domain, "measure": p.measure, "t_small": t_ladder,
            "steps_per_window": steps_per_window, "n": n,
        });
        if p.measure.is_neumann() {
            let t = t_ladder[0];
            let c = cfg.clone().with_h(t / steps_per_window as f64);
            let s = revuz_rate_samples(&p.domain, &p.measure, &one, t, n, &c, c.level())?;
            let nonzero = s.iter().filter(|&&v| v != 0.0).count() as u64;
            report.push(CheckRecord::exact(
                format!("zero rate on {}", p.domain.name()),
                inputs,
                nonzero,
            ));
            continue;
        }
        let o = revuz_outcome(pi as u64, p, t_ladder, steps_per_window, n, cfg)?;
        let mut inp = inputs.clone();
        inp["rates"] = json!(o.rates);
        inp["mass"] = json!(o.mass);
        report.push(CheckRecord::info(
            format!("c on {}", o.domain),
            inp,
            o.c,
            o.c_error,
        ));

        // linearity in the measure, on the first window's seed
        let t = t_ladder[0];
        let c = cfg
            .clone()
            .with_h(t / steps_per_window as f64)
            .with_seed(derived_seed(cfg.seed, (pi as u64) << 16));
        let a = revuz_rate_samples(&p.domain, &p.measure, &one, t, n, &c, c.level())?;
        let b = revuz_rate_samples(&p.domain, &p.measure.scale(2.0), &one, t, n, &c, c.level())?;
        let (ma, sa) = mean_and_stderr(&a);
        let (mb, sb) = mean_and_stderr(&b);
        report.push(CheckRecord::within(
            format!("doubling beta doubles the rate on {}", o.domain),
            inputs,
            mb,
            2.0 * ma,
            sb.hypot(2.0 * sa),
            3.0,
            0.0,
        ));
        outcomes.push(o);
    }
    if let Some((first, rest)) = outcomes.split_first() {
        for o in rest {
            report.push(CheckRecord::within_relative(
                format!("c on {} vs {}", o.domain, first.domain),
                json!({ "c": [first.c, o.c], "c_error": [first.c_error, o.c_error] }),
                o.c,
                first.c,
                first.c_error.hypot(o.c_error),
                0.05,
            ));
        }
    }
    Ok((report, outcomes))
}
