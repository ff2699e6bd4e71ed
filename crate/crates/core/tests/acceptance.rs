//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Tolerances are pinned below.

use std::collections::BTreeMap;
use std::time::Instant;

use cped_core::bench::{run_sweep, SweepConfig};
use cped_core::hpi::{
    cped_within_variance, regime_stats, standard_local_variance, Prepared, RegimeStats,
};
use cped_core::report::{render_svg, write_csv_to, ChartSpec};
use cped_core::stats::pearson_divergence_discrete;
use cped_core::{
    analyze, Domain, EstimatorConfig, EvaluationSet, Extension, Method, ParamValue, ParameterSpec,
    QuantilePair, RegimeCondition, RegimeSpec, SearchSpace, SweepResult, SyntheticObjective, Trial,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg32;

/// Closed form vs brute-force oracle (criteria 1–3).
const ORACLE_TOL: f64 = 1e-10;
/// cped vs ped on unconditional parameters (criterion 4).
const REDUCTION_TOL: f64 = 1e-12;
/// Upper bound on a "near zero" mean HPI (criterion 5).
const NEAR_ZERO_HPI: f64 = 0.05;
/// Largest allowed |HPI(x) − HPI(y)| under filtering (criterion 7).
const FILTERING_GAP: f64 = 0.1;
/// Normalized importances must sum to one within this (criterion 8).
const SUM_TOL: f64 = 1e-9;
/// Random discrete instances for criteria 1–3.
const INSTANCES: usize = 60;

type Check = Result<String, String>;

fn label(v: &ParamValue) -> String {
    match v {
        ParamValue::Number(x) => format!("{x:?}"),
        ParamValue::Category(s) => s.clone(),
        ParamValue::Inactive => "⊥".into(),
    }
}

/// Brute-force quantities on the top-γ set for one parameter. Atoms are
/// (regime, value) pairs; `g` at an atom is the share of its top-γ trials
/// that are also in the top-γ′ set.
struct Oracle {
    /// `E_I[Var_Z(g | I)]`.
    within: f64,
    /// `Var_{I,Z}(g)`.
    total: f64,
    /// `D_PE` between the top-γ′ and top-γ distributions over atoms.
    extended_divergence: f64,
}

fn oracle(set: &EvaluationSet, param: &str, k: usize, m: usize) -> Oracle {
    let d = set.space().position(param).unwrap();
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&a, &b| {
        set.trials()[a]
            .objective
            .total_cmp(&set.trials()[b].objective)
    });
    let top = &order[..m];
    // atom -> (count in top-γ, count in top-γ′)
    let mut atoms: BTreeMap<(usize, String), (f64, f64)> = BTreeMap::new();
    for (rank, &n) in top.iter().enumerate() {
        let t = &set.trials()[n];
        let regime = set.space().assign_regime(param, t).unwrap();
        let e = atoms.entry((regime, label(&t.values[d]))).or_default();
        e.0 += 1.0;
        if rank < k {
            e.1 += 1.0;
        }
    }
    let (m, k) = (m as f64, k as f64);
    let g = |c: &(f64, f64)| c.1 / c.0;
    let mean: f64 = atoms.values().map(|c| c.0 / m * g(c)).sum();
    let total = atoms
        .values()
        .map(|c| c.0 / m * (g(c) - mean).powi(2))
        .sum();
    let mut regimes: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for ((i, _), c) in &atoms {
        regimes.entry(*i).or_default().push(*c);
    }
    let within = regimes
        .values()
        .map(|cells| {
            let n_i: f64 = cells.iter().map(|c| c.0).sum();
            let mean_i: f64 = cells.iter().map(|c| c.0 / n_i * g(c)).sum();
            let var_i: f64 = cells
                .iter()
                .map(|c| c.0 / n_i * (g(c) - mean_i).powi(2))
                .sum();
            n_i / m * var_i
        })
        .sum();
    let extended_divergence = atoms
        .values()
        .map(|c| {
            let (p, q) = (c.1 / k, c.0 / m);
            (p - q).powi(2) / q
        })
        .sum();
    Oracle {
        within,
        total,
        extended_divergence,
    }
}

fn random_labels(rng: &mut Pcg32, prefix: &str) -> Vec<String> {
    let n = rng.random_range(2..=4);
    (0..n).map(|j| format!("{prefix}{j}")).collect()
}

/// A categorical gate `c`, a child `x` with one regime per gate label (some
/// inactive), and optionally a second child `z` gated the same way or
/// unconditional. Trials enumerate every configuration one to three times
/// with distinct objectives.
fn random_discrete_instance(rng: &mut Pcg32) -> (EvaluationSet, usize, usize) {
    let gate = random_labels(rng, "c");
    let child = |rng: &mut Pcg32, name: &str| {
        let regimes: Vec<RegimeSpec> = gate
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let domain = if j > 0 && rng.random_bool(0.3) {
                    Domain::Inactive
                } else {
                    Domain::categorical(random_labels(rng, name))
                };
                RegimeSpec::new(vec![RegimeCondition::equals("c", l.clone())], domain)
            })
            .collect();
        ParameterSpec::new(name, regimes)
    };
    let mut params = vec![
        ParameterSpec::unconditional("c", Domain::categorical(gate.clone())),
        child(rng, "x"),
    ];
    match rng.random_range(0..3) {
        0 => {}
        1 => params.push(child(rng, "z")),
        _ => params.push(ParameterSpec::unconditional(
            "z",
            Domain::categorical(random_labels(rng, "z")),
        )),
    }
    let space = SearchSpace::new(params).unwrap();

    // Enumerate every configuration in declaration order.
    let mut configs: Vec<Vec<ParamValue>> = vec![vec![]];
    for p in space.parameters() {
        let mut next = Vec::new();
        for partial in configs {
            let mut padded = partial.clone();
            padded.resize(space.len(), ParamValue::Inactive);
            let probe = Trial::new(padded, 0.0);
            let r = space.assign_regime(&p.name, &probe).unwrap() - 1;
            let values: Vec<ParamValue> = match &p.regimes[r].domain {
                Domain::Categorical { labels } => {
                    labels.iter().cloned().map(ParamValue::Category).collect()
                }
                Domain::Inactive => vec![ParamValue::Inactive],
                Domain::Continuous { .. } => unreachable!(),
            };
            for v in values {
                let mut c = partial.clone();
                c.push(v);
                next.push(c);
            }
        }
        configs = next;
    }
    let mut values = Vec::new();
    for c in configs {
        // Near-exhaustive: a few configurations are dropped.
        let copies = if rng.random_bool(0.1) {
            0
        } else {
            rng.random_range(1..=3)
        };
        for _ in 0..copies {
            values.push(c.clone());
        }
    }
    if values.len() < 3 {
        return random_discrete_instance(rng);
    }
    let mut objectives: Vec<f64> = (0..values.len()).map(|i| i as f64).collect();
    objectives.shuffle(rng);
    let trials: Vec<Trial> = values
        .into_iter()
        .zip(objectives)
        .map(|(v, f)| Trial::new(v, f))
        .collect();
    let n = trials.len();
    let m = rng.random_range(2..=n);
    let k = rng.random_range(1..m);
    (EvaluationSet::new(space, trials).unwrap(), m, k)
}

fn quantiles(n: usize, m: usize, k: usize) -> QuantilePair {
    QuantilePair::new(m as f64 / n as f64, k as f64 / n as f64).unwrap()
}

fn stats(set: &EvaluationSet, param: &str, q: QuantilePair) -> Vec<RegimeStats> {
    regime_stats(set, param, q, &EstimatorConfig::empirical()).unwrap()
}

fn criterion_1_and_2() -> (Check, Check) {
    let mut rng = Pcg32::seed_from_u64(1);
    let (mut worst_within, mut worst_decomp, mut params) = (0.0f64, 0.0f64, 0);
    let mut largest = 0.0f64;
    for _ in 0..INSTANCES {
        let (set, m, k) = random_discrete_instance(&mut rng);
        let q = quantiles(set.len(), m, k);
        let names: Vec<String> = set.space().names().map(String::from).collect();
        for p in &names {
            let o = oracle(&set, p, k, m);
            largest = largest.max(o.within);
            let s = stats(&set, p, q);
            worst_within = worst_within.max((cped_within_variance(&s, q) - o.within).abs());
            let present: Vec<&RegimeStats> = s.iter().filter(|r| r.beta > 0.0).collect();
            let alpha: Vec<f64> = present.iter().map(|r| r.alpha).collect();
            let beta: Vec<f64> = present.iter().map(|r| r.beta).collect();
            let weighted: f64 = present
                .iter()
                .map(|r| r.alpha * r.alpha / r.beta * r.divergence)
                .sum();
            let decomposed = weighted + pearson_divergence_discrete(&alpha, &beta).unwrap();
            worst_decomp = worst_decomp.max((decomposed - o.extended_divergence).abs());
            let total = standard_local_variance(p, &s, q).unwrap().total;
            worst_within = worst_within.max((total - o.total).abs());
            params += 1;
        }
    }
    let c1 = if worst_within <= ORACLE_TOL {
        Ok(format!("{INSTANCES} instances, {params} parameters, max |closed form − oracle| = {worst_within:.2e} (largest oracle value {largest:.3})"))
    } else {
        Err(format!(
            "max |closed form − oracle| = {worst_within:.2e} > {ORACLE_TOL:e}"
        ))
    };
    let c2 = if worst_decomp <= ORACLE_TOL {
        Ok(format!(
            "{params} parameters, max |decomposition error| = {worst_decomp:.2e}"
        ))
    } else {
        Err(format!(
            "max |decomposition error| = {worst_decomp:.2e} > {ORACLE_TOL:e}"
        ))
    };
    (c1, c2)
}

/// A continuous gate `c` taking a few discrete values, a child `d` whose
/// regimes are intervals of `c`, and an unconditional categorical `z`. When
/// a regime holds two gate values, every trial at the first has a twin at
/// the second with the next objective, so the gate acts only through the
/// regime.
fn random_gating_instance(rng: &mut Pcg32) -> (EvaluationSet, usize, usize) {
    let regimes_n = rng.random_range(2..=3);
    let twins = rng.random_bool(0.5);
    let width = 1.0 / regimes_n as f64;
    let edges: Vec<f64> = (0..=regimes_n).map(|i| i as f64 * width).collect();
    let regimes: Vec<RegimeSpec> = (0..regimes_n)
        .map(|i| {
            let domain = if i > 0 && rng.random_bool(0.3) {
                Domain::Inactive
            } else {
                Domain::categorical(random_labels(rng, "d"))
            };
            RegimeSpec::new(
                vec![RegimeCondition::in_interval("c", edges[i], edges[i + 1])],
                domain,
            )
        })
        .collect();
    let z_labels = random_labels(rng, "z");
    let space = SearchSpace::new(vec![
        ParameterSpec::unconditional("c", Domain::continuous(0.0, 1.0)),
        ParameterSpec::new("d", regimes.clone()),
        ParameterSpec::unconditional("z", Domain::categorical(z_labels.clone())),
    ])
    .unwrap();

    let mut base: Vec<(usize, Vec<ParamValue>)> = Vec::new();
    for (i, r) in regimes.iter().enumerate() {
        let c1 = edges[i] + 0.25 * width;
        let d_values: Vec<ParamValue> = match &r.domain {
            Domain::Categorical { labels } => {
                labels.iter().cloned().map(ParamValue::Category).collect()
            }
            _ => vec![ParamValue::Inactive],
        };
        for dv in &d_values {
            for z in &z_labels {
                let copies = rng.random_range(1..=2);
                for _ in 0..copies {
                    base.push((
                        i,
                        vec![
                            ParamValue::Number(c1),
                            dv.clone(),
                            ParamValue::Category(z.clone()),
                        ],
                    ));
                }
            }
        }
    }
    base.shuffle(rng);
    let mut trials = Vec::new();
    for (rank, (i, values)) in base.into_iter().enumerate() {
        if twins {
            let mut twin = values.clone();
            twin[0] = ParamValue::Number(edges[i] + 0.75 * width);
            trials.push(Trial::new(values, 2.0 * rank as f64));
            trials.push(Trial::new(twin, 2.0 * rank as f64 + 1.0));
        } else {
            trials.push(Trial::new(values, rank as f64));
        }
    }
    let n = trials.len();
    let (m, k) = if twins {
        let m = 2 * rng.random_range(2..=n / 2);
        (m, 2 * rng.random_range(1..m / 2))
    } else {
        let m = rng.random_range(2..=n);
        (m, rng.random_range(1..m))
    };
    (EvaluationSet::new(space, trials).unwrap(), m, k)
}

fn criterion_3() -> Check {
    let mut rng = Pcg32::seed_from_u64(3);
    let (mut worst, mut largest) = (0.0f64, 0.0f64);
    for _ in 0..INSTANCES {
        let (set, m, k) = random_gating_instance(&mut rng);
        let q = quantiles(set.len(), m, k);
        let d = standard_local_variance("d", &stats(&set, "d", q), q).unwrap();
        let c = standard_local_variance("c", &stats(&set, "c", q), q).unwrap();
        worst = worst.max((d.total - (d.within + c.total)).abs());
        largest = largest.max(c.total.min(d.within));
        if c.total > d.total + ORACLE_TOL {
            return Err(format!(
                "total(c) = {} exceeds total(d) = {}",
                c.total, d.total
            ));
        }
        // Cross-check against the brute-force variances.
        let (od, oc) = (oracle(&set, "d", k, m), oracle(&set, "c", k, m));
        worst = worst.max((od.total - (od.within + oc.total)).abs());
    }
    if worst <= ORACLE_TOL {
        Ok(format!("{INSTANCES} instances, max |total(d) − within(d) − total(c)| = {worst:.2e}, total(c) ≤ total(d) everywhere (largest min(within(d), total(c)) {largest:.3})"))
    } else {
        Err(format!(
            "max leakage identity error {worst:.2e} > {ORACLE_TOL:e}"
        ))
    }
}

fn criterion_4() -> Check {
    let mut rng = Pcg32::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let dims = rng.random_range(2..=4);
        let params: Vec<ParameterSpec> = (0..dims)
            .map(|j| {
                let lo = rng.random_range(-10.0..10.0);
                ParameterSpec::unconditional(
                    format!("p{j}"),
                    Domain::continuous(lo, lo + rng.random_range(0.5..20.0)),
                )
            })
            .collect();
        let weights: Vec<f64> = (0..dims).map(|_| rng.random_range(-3.0..3.0)).collect();
        let space = SearchSpace::new(params.clone()).unwrap();
        let trials = (0..200)
            .map(|_| {
                let values: Vec<f64> = params
                    .iter()
                    .map(|p| match p.regimes[0].domain {
                        Domain::Continuous { lo, hi } => rng.random_range(lo..hi),
                        _ => unreachable!(),
                    })
                    .collect();
                let f = values.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>()
                    + values[0] * values[1]
                    + rng.random_range(-1.0..1.0);
                Trial::new(values.into_iter().map(ParamValue::Number).collect(), f)
            })
            .collect();
        let set = EvaluationSet::new(space, trials).unwrap();
        let gamma = [1.0, 0.75, 0.5][rng.random_range(0..3)];
        let q = QuantilePair::new(gamma, rng.random_range(0.05..gamma - 0.01)).unwrap();
        let config = EstimatorConfig::default();
        let cped = analyze(&set, q, Method::Cped, None, &config).unwrap();
        let ped = analyze(&set, q, Method::Ped, None, &config).unwrap();
        for p in set.space().names() {
            worst = worst.max((cped.raw[p] - ped.raw[p]).abs());
        }
    }
    if worst <= REDUCTION_TOL {
        Ok(format!(
            "20 datasets of N=200, max |cped − ped| = {worst:.2e}"
        ))
    } else {
        Err(format!(
            "max |cped − ped| = {worst:.2e} > {REDUCTION_TOL:e}"
        ))
    }
}

fn sweep(
    objective: SyntheticObjective,
    grid: usize,
    method: Method,
    extension: Option<Extension>,
) -> SweepResult {
    let mut config = SweepConfig::new(objective);
    config.estimator = EstimatorConfig::with_grid_size(grid);
    run_sweep(&config, method, extension).unwrap()
}

fn at(result: &SweepResult, method: &str, param: &str, gp: f64) -> f64 {
    result.mean_at(method, param, gp).unwrap()
}

fn points(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let (a, b) = ((lo * 100.0).round() as i64, (hi * 100.0).round() as i64);
    (a..=b).map(|k| k as f64 / 100.0)
}

fn check_fig1a(result: &SweepResult) -> Check {
    let h = |p: &str, gp: f64| at(result, "cped", p, gp);
    let (c, x, y) = (h("c", 0.5), h("x", 0.5), h("y", 0.5));
    if !(c > x && c > y) {
        return Err(format!(
            "at γ′=0.50 HPI(c)={c:.3} is not the maximum (x={x:.3}, y={y:.3})"
        ));
    }
    let y_max = points(0.05, 0.45).map(|g| h("y", g)).fold(0.0, f64::max);
    if y_max > NEAR_ZERO_HPI {
        return Err(format!("max HPI(y) on [0.05, 0.45] = {y_max:.3}"));
    }
    let x_max = points(0.55, 0.95).map(|g| h("x", g)).fold(0.0, f64::max);
    if x_max > NEAR_ZERO_HPI {
        return Err(format!("max HPI(x) on [0.55, 0.95] = {x_max:.3}"));
    }
    let (c5, x5, y5) = (h("c", 0.05), h("x", 0.05), h("y", 0.05));
    if !(x5 > c5 && x5 > y5) {
        return Err(format!(
            "at γ′=0.05 HPI(x)={x5:.3} is not the maximum (c={c5:.3}, y={y5:.3})"
        ));
    }
    Ok(format!(
        "γ′=0.50: c={c:.3} x={x:.3} y={y:.3}; max y on [0.05,0.45]={y_max:.4}; max x on [0.55,0.95]={x_max:.4}; γ′=0.05: x={x5:.3}"
    ))
}

fn criterion_6() -> Check {
    let r = sweep(SyntheticObjective::RegimeDomains, 128, Method::Cped, None);
    let h = |p: &str, gp: f64| at(&r, "cped", p, gp);
    let (c, x, y) = (h("c", 0.5), h("x", 0.5), h("y", 0.5));
    if !(c > x && c > y) {
        return Err(format!(
            "at γ′=0.50 HPI(c)={c:.3} is not the maximum (x={x:.3}, y={y:.3})"
        ));
    }
    let tails: Vec<f64> = points(0.01, 0.2).chain(points(0.8, 0.99)).collect();
    let mean = |p: &str| tails.iter().map(|&g| h(p, g)).sum::<f64>() / tails.len() as f64;
    let (mx, my) = (mean("x"), mean("y"));
    if mx <= my {
        return Err(format!("tail mean HPI(x)={mx:.3} ≤ HPI(y)={my:.3}"));
    }
    Ok(format!(
        "γ′=0.50: c={c:.3} x={x:.3} y={y:.3}; tail means x={mx:.3} > y={my:.3}"
    ))
}

fn criterion_7() -> Check {
    let r = sweep(
        SyntheticObjective::ActivationDisjoint,
        128,
        Method::Ped,
        Some(Extension::Filtering),
    );
    let (mut worst, mut at_gp) = (0.0f64, 0.0);
    for g in points(0.05, 0.95) {
        let gap = (at(&r, "ped-filtering", "x", g) - at(&r, "ped-filtering", "y", g)).abs();
        if gap > worst {
            worst = gap;
            at_gp = g;
        }
    }
    if worst <= FILTERING_GAP {
        Ok(format!(
            "max |HPI(x) − HPI(y)| = {worst:.3} (at γ′={at_gp:.2})"
        ))
    } else {
        Err(format!("|HPI(x) − HPI(y)| = {worst:.3} at γ′={at_gp:.2}"))
    }
}

fn criterion_8() -> Check {
    // Every report of every method on a few seeds sums to one.
    let mut reports = 0;
    for objective in SyntheticObjective::ALL {
        for seed in 0..3 {
            let set = cped_core::bench::generate(objective, 300, seed).unwrap();
            let mut methods: Vec<(Method, Option<Extension>)> = vec![
                (Method::Cped, None),
                (Method::Standard, None),
                (Method::NaiveWithin, None),
            ];
            methods.push((Method::Ped, Some(Extension::Filtering)));
            methods.push((Method::Ped, Some(Extension::Imputation)));
            if objective == SyntheticObjective::RegimeDomains {
                methods.push((Method::Ped, Some(Extension::Expansion)));
            }
            for (method, ext) in methods {
                for gamma in [1.0, 0.75, 0.5] {
                    let prepared =
                        Prepared::new(&set, gamma, method, ext, EstimatorConfig::default())
                            .unwrap();
                    for k in 1..10 {
                        let gp = gamma * k as f64 / 10.0;
                        let r = prepared.report(gp).unwrap();
                        reports += 1;
                        let sum: f64 = r.normalized.values().sum();
                        if !r.degenerate && (sum - 1.0).abs() > SUM_TOL {
                            return Err(format!("{method} {ext:?} γ′={gp}: normalized sum {sum}"));
                        }
                    }
                }
            }
        }
    }
    // Bit-identical reruns, independent of the worker count.
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let mut config = SweepConfig::new(SyntheticObjective::ActivationOverlap);
            config.n = 400;
            config.seeds = vec![3, 1, 4];
            config.gamma_prime_step = 0.05;
            let r = run_sweep(&config, Method::Cped, None).unwrap();
            let mut csv = Vec::new();
            write_csv_to(&r, &mut csv).unwrap();
            let svg = render_svg(&r, &ChartSpec::for_result(&r, false)).unwrap();
            (r, csv, svg)
        })
    };
    let (a, b, c) = (run(1), run(4), run(4));
    let bits = |r: &SweepResult| -> Vec<u64> {
        r.rows
            .iter()
            .flat_map(|x| {
                [
                    x.gamma_prime.to_bits(),
                    x.mean_hpi.to_bits(),
                    x.stderr_hpi.to_bits(),
                ]
            })
            .collect()
    };
    if bits(&a.0) != bits(&b.0) || bits(&b.0) != bits(&c.0) || a.0 != b.0 {
        return Err("sweep results differ between runs".into());
    }
    if a.1 != b.1 || b.1 != c.1 {
        return Err("CSV bytes differ between runs".into());
    }
    if a.2 != b.2 || b.2 != c.2 {
        return Err("SVG bytes differ between runs".into());
    }
    Ok(format!(
        "{reports} reports sum to 1 within {SUM_TOL:e}; sweep, CSV and SVG ({} bytes) identical across 3 runs and 1/4 workers",
        a.2.len()
    ))
}

fn report(n: usize, name: &str, check: &Check) -> bool {
    match check {
        Ok(detail) => println!("PASS criterion {n}: {name}: {detail}"),
        Err(detail) => println!("FAIL criterion {n}: {name}: {detail}"),
    }
    check.is_ok()
}

fn main() {
    let start = Instant::now();
    let mut ok = true;
    let (c1, c2) = criterion_1_and_2();
    ok &= report(
        1,
        "closed form matches brute-force within-regime variance",
        &c1,
    );
    ok &= report(
        2,
        "regime-wise decomposition of the Pearson divergence",
        &c2,
    );
    ok &= report(3, "gating leakage identity", &criterion_3());
    ok &= report(
        4,
        "cped reduces to ped on unconditional parameters",
        &criterion_4(),
    );

    let t5 = Instant::now();
    let fig1a = sweep(
        SyntheticObjective::ActivationDisjoint,
        128,
        Method::Cped,
        None,
    );
    let c5 = check_fig1a(&fig1a).map(|s| format!("{s} [{:.1}s]", t5.elapsed().as_secs_f64()));
    ok &= report(5, "activation-disjoint trends", &c5);
    ok &= report(6, "regime-domains trends", &criterion_6());
    ok &= report(
        7,
        "filtering baseline gives x and y the same importance",
        &criterion_7(),
    );
    ok &= report(8, "normalization and determinism", &criterion_8());

    let outcomes: Vec<(usize, bool)> = [64, 256]
        .into_iter()
        .map(|g| {
            (
                g,
                check_fig1a(&sweep(
                    SyntheticObjective::ActivationDisjoint,
                    g,
                    Method::Cped,
                    None,
                ))
                .is_ok(),
            )
        })
        .chain([(128, c5.is_ok())])
        .collect();
    let c9 = if outcomes.iter().all(|o| o.1 == c5.is_ok()) {
        Ok(format!(
            "criterion 5 outcome {:?} at grid sizes 64, 128, 256",
            c5.is_ok()
        ))
    } else {
        Err(format!("outcomes differ by grid size: {outcomes:?}"))
    };
    ok &= report(9, "grid-size robustness", &c9);

    println!("acceptance: {:.1}s", start.elapsed().as_secs_f64());
    if !ok {
        std::process::exit(1);
    }
}
