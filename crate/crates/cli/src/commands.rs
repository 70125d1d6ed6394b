use std::fs::File;
use std::io::BufWriter;

use flatlab_core::barker::{
    autocorrelate_signs, barker_flatness, search_barker, turyn_storer_probe, existence_consistent,
};
use flatlab_core::criterion::{
    clarkson_classical, clarkson_general, conjugate, convexity_delta, estimate_gap, flatness_verdict,
    markov_bound_check, minimal_k_of, sublevel_bound_check, ClarksonCheck, GapSample,
};
use flatlab_core::generators::{gen_gauss_fresnel, random_complex};
use flatlab_core::liouville::{liouville_norm_sweep, liouville_sieve, partial_sum_ratio, SweepRow};
use flatlab_core::norm::flatness_report_with;
use flatlab_core::riesz::{
    coefficient_stability_all, dissociated_check, gauss_fresnel_mahler_demo, mahler_of_plan, DemoRow,
    RieszPlan,
};
use flatlab_core::rng::{derive_seed, rng_from_seed};
use flatlab_core::{CirclePolynomial, Error, Family, GeneratorSpec};
use serde_json::{json, Value};

use crate::config::{FactorFamily, RunConfig, Subcommand};
use crate::report::Outcome;
use crate::CliError;

pub const DEFAULT_K: f64 = 3.0;
pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_PAIRS: usize = 100;
pub const DEFAULT_PAIR_DEGREE: usize = 64;
pub const DEFAULT_ZETA2: f64 = 0.2;

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn generator(cfg: &RunConfig) -> Result<&GeneratorSpec, CliError> {
    cfg.generator.as_ref().ok_or_else(|| usage("this command needs a generator (--family, --n)"))
}

fn finite_alphas(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    cfg.alphas
        .iter()
        .map(|a| a.finite().ok_or_else(|| usage("alpha = inf is only accepted by liouville sweep")))
        .collect()
}

fn single_alpha(cfg: &RunConfig) -> Result<f64, CliError> {
    match finite_alphas(cfg)?.as_slice() {
        [a] => Ok(*a),
        other => Err(usage(format!("expected exactly one --alpha, got {}", other.len()))),
    }
}

fn required<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| usage(format!("missing required {flag}")))
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.subcommand {
        Subcommand::Flatness => flatness(cfg),
        Subcommand::Criterion => criterion(cfg),
        Subcommand::Gap => gap(cfg),
        Subcommand::Clarkson => clarkson(cfg),
        Subcommand::Measure => measure(cfg),
        Subcommand::BarkerSearch => barker_search(cfg),
        Subcommand::BarkerProfile => barker_profile(cfg),
        Subcommand::BarkerFlatness => barker_flat(cfg),
        Subcommand::LiouvilleSweep => liouville_sweep(cfg),
        Subcommand::LiouvillePartial => liouville_partial(cfg),
        Subcommand::LiouvilleTable => liouville_table(cfg),
        Subcommand::RieszDemo => riesz_demo(cfg),
        Subcommand::RieszPlan => riesz_plan(cfg),
    }
}

fn flatness(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = generator(cfg)?;
    let p = spec.generate()?;
    let alphas = finite_alphas(cfg)?;
    if alphas.is_empty() {
        return Err(usage("flatness needs at least one --alpha"));
    }
    let reports = alphas
        .iter()
        .map(|&a| flatness_report_with(&p, a, &cfg.eps_ladder, cfg.oversample))
        .collect::<Result<Vec<_>, Error>>()?;
    let grid_m = reports.iter().map(|r| r.grid_m).max();
    let header = reports[0].csv_header();
    let rows = reports.iter().map(|r| r.csv_row()).collect();
    Ok(Outcome::json(json!({ "n": p.len(), "reports": to_value(&reports) }))
        .with_grid(grid_m)
        .with_table(header, rows))
}

fn criterion(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = generator(cfg)?;
    let p = spec.generate()?;
    let alpha = single_alpha(cfg)?;
    let k = cfg.params.k.unwrap_or(DEFAULT_K);
    let verdict = flatness_verdict(&p, alpha, k)?;
    let mut report = minimal_k_of(&p)?;
    report.family_tag = spec.family.to_string();
    Ok(Outcome::json(json!({ "criterion": to_value(&report), "verdict": to_value(&verdict) })))
}

fn gap(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = generator(cfg)?;
    let alpha = single_alpha(cfg)?;
    let n_list = required(&cfg.params.n_list, "--n-list")?;
    let samples = cfg.params.samples.unwrap_or(DEFAULT_SAMPLES);
    let est = estimate_gap(spec, alpha, &n_list, samples)?;
    let rows = est.samples.iter().map(GapSample::csv).collect();
    Ok(Outcome::json(to_value(&est)).with_table(GapSample::CSV_HEADER, rows))
}

fn clarkson(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = required(&cfg.params.p, "--p")?;
    let classical = cfg.params.classical.unwrap_or(false);
    let seed = cfg.seed.unwrap_or(0);
    let pairs = cfg.params.pairs.unwrap_or(DEFAULT_PAIRS);
    let degree = cfg.params.degree.unwrap_or(DEFAULT_PAIR_DEGREE);
    let (r, s) = if classical {
        (conjugate(p), p)
    } else {
        (cfg.params.r.unwrap_or(conjugate(p)), cfg.params.s.unwrap_or(p))
    };
    let checks = (0..pairs as u64)
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, degree as u64, i));
            let f = random_complex(degree, &mut rng);
            let g = random_complex(degree, &mut rng);
            if classical {
                clarkson_classical(&f, &g, p)
            } else {
                clarkson_general(&f, &g, p, r, s)
            }
        })
        .collect::<Result<Vec<ClarksonCheck>, Error>>()?;
    let min_slack = checks.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    let deltas = cfg
        .params
        .delta_eps
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(|&e| Ok(json!({ "eps": e, "delta": convexity_delta(e, p)? })))
        .collect::<Result<Vec<_>, Error>>()?;
    let grid_m = checks.first().map(|c| c.grid_m);
    let rows = checks
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{i},{},{},{},{},{},{}", c.p, c.r, c.s, c.lhs, c.rhs, c.slack))
        .collect();
    Ok(Outcome::json(json!({
        "form": if classical { "classical" } else { "general" },
        "p": p,
        "r": r,
        "s": s,
        "pairs": pairs,
        "degree": degree,
        "min_slack": min_slack,
        "all_hold": min_slack >= -1e-9,
        "convexity_delta": deltas,
    }))
    .with_grid(grid_m)
    .with_table("index,p,r,s,lhs,rhs,slack", rows))
}

fn measure(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = generator(cfg)?.generate()?;
    let zeta2 = cfg.params.zeta2.unwrap_or(DEFAULT_ZETA2);
    let sub = sublevel_bound_check(&p, zeta2)?;
    let markov = match markov_bound_check(&p) {
        Ok(m) => to_value(&m),
        Err(Error::NotApplicable(msg)) => json!({ "not_applicable": msg }),
        Err(e) => return Err(e.into()),
    };
    let grid_m = Some(default_measure_grid(&p));
    Ok(Outcome::json(json!({ "sublevel": to_value(&sub), "markov": markov })).with_grid(grid_m))
}

fn default_measure_grid(p: &CirclePolynomial) -> usize {
    use flatlab_core::criterion::measure::MIN_MEASURE_GRID;
    use flatlab_core::grid::{default_size, DEFAULT_OVERSAMPLE};
    default_size(p.degree(), DEFAULT_OVERSAMPLE).max(MIN_MEASURE_GRID)
}

fn barker_search(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let reduce = cfg.params.symmetry_reduce.unwrap_or(false);
    match (cfg.params.n, cfg.params.n_max) {
        (Some(n), None) => {
            let r = search_barker(n, reduce)?;
            let consistent = existence_consistent(n, !r.sequences_found.is_empty());
            let verdict = if consistent { "consistent" } else { "inconsistent" };
            let rows = r.sequences_found.iter().map(|s| s.to_csv_row()).collect();
            let header = (0..n).map(|j| format!("b{j}")).collect::<Vec<_>>().join(",");
            Ok(Outcome::json(json!({
                "search": to_value(&r),
                "count": r.sequences_found.len(),
                "verdict": verdict,
            }))
            .with_table(header, rows))
        }
        (None, Some(n_max)) => {
            let r = turyn_storer_probe(n_max)?;
            let rows = r
                .lengths
                .iter()
                .map(|l| format!("{},{},{},{}", l.n, l.count, l.exists, l.consistent))
                .collect();
            Ok(Outcome::json(json!({ "probe": to_value(&r), "verdict": "consistent" }))
                .with_table("n,count,exists,consistent", rows))
        }
        _ => Err(usage("barker search needs exactly one of --n or --n-max")),
    }
}

fn barker_profile(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let b = required(&cfg.params.sequence, "--sequence")?;
    Ok(Outcome::json(to_value(&autocorrelate_signs(&b))))
}

fn barker_flat(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let b = required(&cfg.params.sequence, "--sequence")?;
    let alpha = single_alpha(cfg)?;
    let f = barker_flatness(&b, alpha)?;
    let grid_m = Some(f.report.grid_m);
    Ok(Outcome::json(to_value(&f)).with_grid(grid_m))
}

fn liouville_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n_list = required(&cfg.params.n_list, "--n-list")?;
    if cfg.alphas.is_empty() {
        return Err(usage("liouville sweep needs at least one --alpha"));
    }
    let alphas: Vec<Option<f64>> = cfg.alphas.iter().map(|a| a.finite()).collect();
    let rows = liouville_norm_sweep(&n_list, &alphas)?;
    let csv = rows.iter().map(SweepRow::csv).collect();
    Ok(Outcome::json(to_value(&rows)).with_table(SweepRow::CSV_HEADER, csv))
}

fn liouville_partial(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = required(&cfg.params.n, "--n")?;
    Ok(Outcome::json(to_value(&partial_sum_ratio(n)?)))
}

fn liouville_table(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = required(&cfg.params.n, "--n")?;
    let path = cfg.bits.as_ref().ok_or_else(|| usage("liouville table needs --bits FILE"))?;
    let table = liouville_sieve(n)?;
    let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    table
        .write_bits(BufWriter::new(file))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let negative = table.values().iter().filter(|&&v| v < 0).count();
    Ok(Outcome::json(json!({
        "n": n,
        "negative_count": negative,
        "positive_count": n - negative,
        "bit_format": "magic LIOU, u32 version 1, u64 N little-endian, then N bits LSB-first; set bit means lambda = -1",
    })))
}

fn riesz_demo(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n_list = required(&cfg.params.n_list, "--n-list")?;
    let rows = gauss_fresnel_mahler_demo(&n_list)?;
    let csv = rows.iter().map(DemoRow::csv).collect();
    Ok(Outcome::json(to_value(&rows)).with_table(DemoRow::CSV_HEADER, csv))
}

fn plan_factors(cfg: &RunConfig, degrees: &[usize]) -> Result<Vec<CirclePolynomial>, CliError> {
    let family = cfg.params.factor_family.unwrap_or(FactorFamily::Random);
    let seed = cfg.seed.unwrap_or(0);
    degrees
        .iter()
        .enumerate()
        .map(|(j, &d)| {
            let p = match family {
                FactorFamily::Random => {
                    let mut rng = rng_from_seed(derive_seed(seed, d as u64, j as u64));
                    random_complex(d, &mut rng).normalized()?
                }
                FactorFamily::GaussFresnel => gen_gauss_fresnel(d + 1, true)?,
            };
            Ok(p)
        })
        .collect::<Result<Vec<_>, Error>>()
        .map_err(Into::into)
}

fn riesz_plan(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let degrees = required(&cfg.params.degrees, "--degrees")?;
    if degrees.is_empty() {
        return Err(usage("--degrees must list at least one factor degree"));
    }
    let plan = RieszPlan::from_factors(plan_factors(cfg, &degrees)?)?;
    let dissociated = match dissociated_check(&plan.factors, &plan.spacings) {
        Ok(d) => json!(d),
        Err(Error::Capability(msg)) => json!({ "skipped": msg }),
        Err(e) => return Err(e.into()),
    };
    let stability = coefficient_stability_all(&plan)?;
    let mahler = mahler_of_plan(&plan)?;
    Ok(Outcome::json(json!({
        "summary": to_value(&plan.summary()),
        "dissociated": dissociated,
        "stability": to_value(&stability),
        "mahler": to_value(&mahler),
        "plan": to_value(&plan.state()),
    }))
    .with_grid(Some(mahler.grid_m)))
}

/// Generator built from flags. Random families fall back to seed 0.
pub fn resolve_generator(
    family: Family,
    n: usize,
    seed: Option<u64>,
    a: Option<f64>,
    phases: Option<Vec<f64>>,
    normalized: bool,
) -> (GeneratorSpec, Option<u64>) {
    let seed = match family {
        Family::LittlewoodRandom => Some(seed.unwrap_or(0)),
        _ => seed,
    };
    let spec = GeneratorSpec {
        family,
        n,
        seed: if family == Family::LittlewoodRandom { seed } else { None },
        a,
        phases,
        normalized,
    };
    (spec, seed)
}
