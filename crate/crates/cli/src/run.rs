//! Validation of a parsed config and dispatch to the experiments.

use crate::config::{ExperimentConfig, Kind};
use crate::error::{CliError, CliResult};
use outlab::free_group::{parse_automorphism_parts, parse_word, Automorphism, CyclicWord, LetterBudget};
use outlab::matrix_oracle::{IntMatrix, DEFAULT_BIT_BUDGET};
use outlab::outer_metric::{dist, four_point_delta, sym_dist, FiniteMetricSample};
use outlab::spectral::{bracket, STANDALONE_K_MAX, WALK_K_MAX};
use outlab::walk::{
    conjugacy_growth_experiment, drift_experiment, gromov_decay_experiment, matrix_experiment, spectral_experiment,
    MatrixObservable, MatrixSettings, ProbMeasure, Record, WalkPath, WalkSettings, WEIGHT_TOLERANCE,
};
use num_bigint::BigInt;

/// Command-line overrides of config values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub master_seed: Option<u64>,
    pub paths: Option<u64>,
    pub out: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    /// The config with overrides and defaults filled in.
    pub resolved: ExperimentConfig,
    pub records: Vec<Record>,
    /// Human-readable result lines for standalone kinds.
    pub report: Vec<String>,
    /// Every sampled path hit its budget.
    pub budget_exhausted: bool,
}

/// Fills overrides and defaults into `cfg`.
pub fn resolve(cfg: &ExperimentConfig, overrides: &Overrides) -> ExperimentConfig {
    let mut c = cfg.clone();
    if overrides.master_seed.is_some() {
        c.master_seed = overrides.master_seed;
    }
    if overrides.paths.is_some() {
        c.paths = overrides.paths;
    }
    if overrides.out.is_some() {
        c.out = overrides.out.clone();
    }
    c.master_seed.get_or_insert(0);
    if c.kind.is_walk() {
        c.paths.get_or_insert(1);
    }
    if c.kind.is_matrix() {
        c.bit_budget.get_or_insert(DEFAULT_BIT_BUDGET);
    } else {
        c.letter_budget.get_or_insert(LetterBudget::DEFAULT.0);
    }
    match c.kind {
        Kind::Spectral => {
            c.k_max.get_or_insert(WALK_K_MAX);
        }
        Kind::Stretch => {
            c.k_max.get_or_insert(STANDALONE_K_MAX);
        }
        _ => {}
    }
    c
}

fn require<T: Copy>(v: Option<T>, field: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::field(field, "required for this kind"))
}

fn positive<T: Copy + PartialOrd + Default>(v: Option<T>, field: &str) -> CliResult<T> {
    let x = require(v, field)?;
    if x <= T::default() {
        return Err(CliError::field(field, "must be positive"));
    }
    Ok(x)
}

fn weights(cfg: &ExperimentConfig) -> CliResult<Vec<f64>> {
    let n = cfg.gens.len();
    let given: Vec<Option<f64>> = cfg.gens.iter().map(|g| g.weight).collect();
    if given.iter().all(Option::is_none) {
        return Ok(vec![1.0 / n as f64; n]);
    }
    let mut out = Vec::with_capacity(n);
    for (i, w) in given.into_iter().enumerate() {
        let field = format!("gen.{}.weight", i + 1);
        let w = w.ok_or_else(|| CliError::field(&field, "missing (give all weights or none)"))?;
        if !(w.is_finite() && w > 0.0) {
            return Err(CliError::field(field, format!("{w} is not a positive number")));
        }
        out.push(w);
    }
    let total: f64 = out.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(CliError::field(
            "gen.*.weight",
            format!("weights sum to {total}, expected 1"),
        ));
    }
    Ok(out)
}

fn automorphisms(cfg: &ExperimentConfig) -> CliResult<Vec<Automorphism>> {
    let rank = positive(cfg.rank, "rank")?;
    if cfg.gens.is_empty() {
        return Err(CliError::field("gen.1.map", "the measure needs at least one element"));
    }
    cfg.gens
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let field = |f: &str| format!("gen.{}.{f}", i + 1);
            if g.matrix.is_some() {
                return Err(CliError::field(field("matrix"), "not allowed for automorphism kinds"));
            }
            let map = g.map.as_deref().ok_or_else(|| CliError::field(field("map"), "missing"))?;
            let inv = g.inv.as_deref().ok_or_else(|| CliError::field(field("inv"), "missing"))?;
            let phi = parse_automorphism_parts(map, inv).map_err(|e| CliError::field(field("map"), e.to_string()))?;
            if phi.rank() != rank {
                return Err(CliError::field(
                    field("map"),
                    format!("has rank {} but rank = {rank}", phi.rank()),
                ));
            }
            Ok(phi)
        })
        .collect()
}

fn matrices(cfg: &ExperimentConfig) -> CliResult<Vec<IntMatrix>> {
    let dim = positive(cfg.dim, "dim")?;
    if cfg.gens.is_empty() {
        return Err(CliError::field("gen.1.matrix", "the measure needs at least one element"));
    }
    cfg.gens
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let field = format!("gen.{}.matrix", i + 1);
            if g.map.is_some() || g.inv.is_some() {
                return Err(CliError::field(format!("gen.{}.map", i + 1), "not allowed for matrix kinds"));
            }
            let text = g.matrix.as_deref().ok_or_else(|| CliError::field(&field, "missing"))?;
            let m: IntMatrix = text.parse().map_err(|e: outlab::Error| CliError::field(&field, e.to_string()))?;
            if m.dim() != dim {
                return Err(CliError::field(field, format!("is {0}x{0} but dim = {dim}", m.dim())));
            }
            Ok(m)
        })
        .collect()
}

fn seed_words(cfg: &ExperimentConfig, rank: usize) -> CliResult<Vec<CyclicWord>> {
    cfg.words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let field = format!("word.{}", i + 1);
            let word = parse_word(w, rank).map_err(|e| CliError::field(&field, e.to_string()))?;
            let c = word.cyclic_reduce();
            if c.is_empty() {
                return Err(CliError::field(field, "is trivial up to conjugacy"));
            }
            Ok(c)
        })
        .collect()
}

fn vector(cfg: &ExperimentConfig, dim: usize) -> CliResult<Vec<BigInt>> {
    match cfg.words.as_slice() {
        [] => {
            let mut v = vec![BigInt::from(0); dim];
            v[0] = BigInt::from(1);
            Ok(v)
        }
        [text] => {
            let bad = |m: String| CliError::field("word.1", m);
            let inner = text
                .trim()
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| bad(format!("expected a vector such as [1,0], got `{text}`")))?;
            let v: Vec<BigInt> = inner
                .split(',')
                .map(|x| x.trim().parse::<BigInt>().map_err(|e| bad(format!("`{x}`: {e}"))))
                .collect::<CliResult<_>>()?;
            if v.len() != dim {
                return Err(bad(format!("has {} entries but dim = {dim}", v.len())));
            }
            if v.iter().all(|x| x == &BigInt::from(0)) {
                return Err(bad("must be nonzero".into()));
            }
            Ok(v)
        }
        _ => Err(CliError::field("word.2", "matrix walks take a single vector")),
    }
}

fn walk_settings(c: &ExperimentConfig) -> CliResult<WalkSettings> {
    Ok(WalkSettings {
        master_seed: c.master_seed.unwrap_or(0),
        paths: positive(c.paths, "paths")?,
        n_max: positive(c.n_max, "n_max")?,
        letter_budget: LetterBudget(positive(c.letter_budget, "letter_budget")?),
    })
}

fn aut_measure(c: &ExperimentConfig) -> CliResult<ProbMeasure<Automorphism>> {
    Ok(ProbMeasure::new(automorphisms(c)?, weights(c)?)?)
}

/// Runs a resolved config.
pub fn execute(c: &ExperimentConfig) -> CliResult<RunOutput> {
    let mut report = Vec::new();
    let records = match c.kind {
        Kind::Drift => drift_experiment(&aut_measure(c)?, &walk_settings(c)?)?.records,
        Kind::Conjugacy => {
            let m = aut_measure(c)?;
            if c.words.is_empty() {
                return Err(CliError::field("word.1", "conjugacy experiments need at least one seed word"));
            }
            let seeds = seed_words(c, m.rank())?;
            conjugacy_growth_experiment(&m, &seeds, &walk_settings(c)?)?.records
        }
        Kind::Spectral => {
            let k = positive(c.k_max, "k_max")?;
            spectral_experiment(&aut_measure(c)?, k, &walk_settings(c)?)?.records
        }
        Kind::Gromov => gromov_decay_experiment(&aut_measure(c)?, &walk_settings(c)?)?.records,
        Kind::MatrixGuivarch | Kind::MatrixFurstenberg => {
            let dim = positive(c.dim, "dim")?;
            let observable = if c.kind == Kind::MatrixGuivarch {
                if !c.words.is_empty() {
                    return Err(CliError::field("word.1", "not used by matrix-guivarch"));
                }
                MatrixObservable::Guivarch
            } else {
                MatrixObservable::Furstenberg(vector(c, dim)?)
            };
            let m = ProbMeasure::new(matrices(c)?, weights(c)?)?;
            let s = MatrixSettings {
                master_seed: c.master_seed.unwrap_or(0),
                paths: positive(c.paths, "paths")?,
                n_max: positive(c.n_max, "n_max")?,
                bit_budget: positive(c.bit_budget, "bit_budget")?,
            };
            matrix_experiment(&m, &observable, &s)?.records
        }
        Kind::Distance => {
            let mut out = Vec::new();
            for (i, theta) in automorphisms(c)?.iter().enumerate() {
                let (d, s) = (dist(theta), sym_dist(theta));
                report.push(format!("gen.{}: dist = {d:.6}, sym = {s:.6}", i + 1));
                out.push(Record::ok(i as u64, 0, "dist", d));
                out.push(Record::ok(i as u64, 0, "sym_dist", s));
            }
            out
        }
        Kind::Stretch => {
            let k = positive(c.k_max, "k_max")?;
            let budget = LetterBudget(positive(c.letter_budget, "letter_budget")?);
            let mut out = Vec::new();
            for (i, phi) in automorphisms(c)?.iter().enumerate() {
                let b = bracket(phi, k, &[], budget);
                report.push(format!(
                    "gen.{}: lower = {:.6}, upper = {:.6}, point = {:.6}, k = {}, converged = {}",
                    i + 1,
                    b.lower,
                    b.upper,
                    b.point,
                    b.k_used,
                    b.converged
                ));
                let pid = i as u64;
                out.push(Record::ok(pid, 0, "stretch.lower", b.lower));
                out.push(Record::ok(pid, 0, "stretch.upper", b.upper));
                out.push(Record::ok(pid, 0, "stretch.point", b.point));
                out.push(Record::ok(pid, 0, "stretch.k_used", b.k_used as f64));
                out.push(Record::ok(pid, 0, "stretch.converged", if b.converged { 1.0 } else { 0.0 }));
            }
            out
        }
        Kind::Delta => delta(c, &mut report)?,
    };
    let budget_exhausted = c.kind.is_walk() && {
        let paths = c.paths.unwrap_or(1);
        let truncated: std::collections::BTreeSet<u64> = records
            .iter()
            .filter(|r| r.status == outlab::walk::Status::Truncated)
            .map(|r| r.path_id)
            .collect();
        truncated.len() as u64 == paths
    };
    Ok(RunOutput {
        resolved: c.clone(),
        records,
        report,
        budget_exhausted,
    })
}

/// Four-point `delta` of the orbit points `{y0} ∪ {Φ_n.y0}` over all paths
/// and `n <= n_max`, in the half-symmetrized metric.
fn delta(c: &ExperimentConfig, report: &mut Vec<String>) -> CliResult<Vec<Record>> {
    let m = aut_measure(c)?;
    let s = walk_settings(c)?;
    let mut points = vec![("y0".to_string(), Automorphism::identity(m.rank()))];
    for pid in 0..s.paths {
        let mut path = WalkPath::new(&m, s.master_seed, pid, s.letter_budget);
        for n in 1..=s.n_max {
            path.step()?;
            points.push((format!("p{pid}n{n}"), path.product().clone()));
        }
    }
    let sample = FiniteMetricSample::from_orbit(&points, s.letter_budget)?;
    let est = four_point_delta(&sample)?;
    report.push(format!(
        "delta = {:.6}, points = {}, quadruples = {}, exhaustive = {}",
        est.delta,
        sample.len(),
        est.quadruples,
        est.exhaustive
    ));
    Ok(vec![
        Record::ok(0, s.n_max, "delta", est.delta),
        Record::ok(0, s.n_max, "points", sample.len() as f64),
    ])
}
