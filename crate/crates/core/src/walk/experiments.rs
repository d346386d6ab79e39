use super::measure::ProbMeasure;
use super::path::{matrix_increments, WalkPath};
use super::series::{EstimateSeries, Record, Status};
use crate::error::{Error, Result};
use crate::free_group::{Automorphism, CyclicWord, LetterBudget};
use crate::matrix_oracle::{log_norm, log_vec_norm, spectral_radius, IntMatrix, MatrixProduct};
use crate::outer_metric::{gromov_product, max_ratio, StretchRatio};
use crate::spectral::bracket;
use num_bigint::BigInt;
use rayon::prelude::*;

/// Parameters shared by the automorphism experiments.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkSettings {
    pub master_seed: u64,
    pub paths: u64,
    pub n_max: usize,
    pub letter_budget: LetterBudget,
}

impl WalkSettings {
    fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        if self.paths == 0 {
            return Err(Error::InvalidArgument("paths must be at least 1".into()));
        }
        Ok(())
    }

    fn metadata(&self, measure_len: usize) -> Vec<(String, String)> {
        vec![
            ("master_seed".into(), self.master_seed.to_string()),
            ("paths".into(), self.paths.to_string()),
            ("n_max".into(), self.n_max.to_string()),
            ("letter_budget".into(), self.letter_budget.0.to_string()),
            ("support_size".into(), measure_len.to_string()),
        ]
    }
}

/// `{1, 2, 4, ...} ∪ {n_max}`, the times at which expensive observables run.
pub fn geometric_schedule(n_max: usize) -> Vec<usize> {
    let mut s: Vec<usize> = std::iter::successors(Some(1usize), |&n| n.checked_mul(2))
        .take_while(|&n| n <= n_max)
        .collect();
    if s.last() != Some(&n_max) && n_max > 0 {
        s.push(n_max);
    }
    s
}

/// Runs `paths` independent tasks in parallel and concatenates their records
/// in `path_id` order, so output does not depend on the thread count.
fn run_paths<F>(paths: u64, task: F) -> Vec<Record>
where
    F: Fn(u64) -> Vec<Record> + Sync + Send,
{
    let per_path: Vec<Vec<Record>> = (0..paths).into_par_iter().map(task).collect();
    per_path.into_iter().flatten().collect()
}

/// Drives every path for `n = 1..=n_max`. `observe` gets per-path state and
/// writes the records of one time step; any error truncates the path there.
fn run_walk<S, I, F>(measure: &ProbMeasure<Automorphism>, settings: &WalkSettings, init: I, observe: F) -> Vec<Record>
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &WalkPath<'_>, &mut Vec<Record>) -> Result<()> + Sync + Send,
{
    run_paths(settings.paths, |path_id| {
        let mut out = Vec::new();
        let mut state = init();
        let mut path = WalkPath::new(measure, settings.master_seed, path_id, settings.letter_budget);
        let mut rows = Vec::new();
        for n in 1..=settings.n_max {
            rows.clear();
            let step = path.step().and_then(|_| observe(&mut state, &path, &mut rows));
            if step.is_err() {
                out.push(Record::truncated(path_id, n));
                break;
            }
            out.append(&mut rows);
        }
        out
    })
}

fn drift_record(path: &WalkPath<'_>) -> Record {
    let n = path.n();
    Record::ok(path.path_id(), n, "drift", max_ratio(path.inverse()).ln() / n as f64)
}

/// Exact check of `r_total <= r_head * r_tail` on rational ratios.
pub fn ratio_subadditive(total: StretchRatio, head: StretchRatio, tail: StretchRatio) -> bool {
    let lhs = total.image_len as u128 * head.loop_len as u128 * tail.loop_len as u128;
    let rhs = head.image_len as u128 * tail.image_len as u128 * total.loop_len as u128;
    lhs <= rhs
}

/// Segment `s_{m+1} ∘ ... ∘ s_{2m}` accumulated for the subadditivity check.
struct Segment {
    m: usize,
    head: StretchRatio,
    product: Automorphism,
}

/// `(1/n) dist(Φ_n^-1)` at every `n`, i.e. `(1/n) d(y0, Φ_n.y0)`.
///
/// At `n = 2m` for `m` a power of two, also checks
/// `dist(Φ_{2m}^-1) <= dist(Φ_m^-1) + dist(P^-1)` with `P = Φ_m^-1 Φ_{2m}`,
/// exactly on integer ratios (`subadditive`, 1 or 0) and as a log slack.
pub fn drift_experiment(measure: &ProbMeasure<Automorphism>, settings: &WalkSettings) -> Result<EstimateSeries> {
    settings.validate()?;
    let n_max = settings.n_max;
    let budget = settings.letter_budget;
    let records = run_walk(
        measure,
        settings,
        || None::<Segment>,
        |seg, path, rows| {
            let n = path.n();
            let pid = path.path_id();
            let ratio = max_ratio(path.inverse());
            rows.push(Record::ok(pid, n, "drift", ratio.ln() / n as f64));
            if let Some(s) = seg.as_mut() {
                let inc = &measure.support()[*path.increments().last().expect("n >= 1")];
                s.product = s.product.compose_with_budget(inc, budget)?;
                if n == 2 * s.m {
                    let tail = max_ratio(&s.product.invert());
                    let holds = ratio_subadditive(ratio, s.head, tail);
                    rows.push(Record::ok(pid, n, "subadditive", if holds { 1.0 } else { 0.0 }));
                    rows.push(Record::ok(pid, n, "subadditivity.slack", s.head.ln() + tail.ln() - ratio.ln()));
                    *seg = None;
                }
            }
            if n.is_power_of_two() && 2 * n <= n_max {
                *seg = Some(Segment {
                    m: n,
                    head: ratio,
                    product: Automorphism::identity(measure.rank()),
                });
            }
            Ok(())
        },
    );
    let mut series = EstimateSeries::new("drift", records);
    series.metadata = settings.metadata(measure.len());
    Ok(series)
}

/// `(1/n) log ||Φ_n^-1(g)||` for each seed `g`, as estimator `conj:<g>`,
/// alongside the drift.
pub fn conjugacy_growth_experiment(
    measure: &ProbMeasure<Automorphism>,
    seeds: &[CyclicWord],
    settings: &WalkSettings,
) -> Result<EstimateSeries> {
    settings.validate()?;
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("at least one seed word is required".into()));
    }
    for g in seeds {
        if g.is_empty() {
            return Err(Error::InvalidArgument("seed words must be nontrivial".into()));
        }
        if g.to_word().rank() != measure.rank() {
            return Err(Error::RankMismatch {
                left: measure.rank(),
                right: g.to_word().rank(),
            });
        }
    }
    let names: Vec<String> = seeds.iter().map(|g| format!("conj:{}", g.to_word())).collect();
    let records = run_walk(
        measure,
        settings,
        || (),
        |_, path, rows| {
            let n = path.n();
            rows.push(drift_record(path));
            for (g, name) in seeds.iter().zip(&names) {
                let len = path.inverse().image_conjugacy_len(g.letters());
                rows.push(Record::ok(path.path_id(), n, name.clone(), (len as f64).ln() / n as f64));
            }
            Ok(())
        },
    );
    let mut series = EstimateSeries::new("conjugacy", records);
    series.metadata = settings.metadata(measure.len());
    Ok(series)
}

/// Bracket of `log λ(Φ_n^-1)`, divided by `n`, on the geometric schedule:
/// `spectral.lower`, `spectral.upper`, `spectral.point` and the unit-rose
/// bounds `spectral.upper_k<k>`. Rows are `downgraded` when the budget
/// stopped the iteration before `k_max`. Drift is recorded at every `n`.
pub fn spectral_experiment(
    measure: &ProbMeasure<Automorphism>,
    k_max: u32,
    settings: &WalkSettings,
) -> Result<EstimateSeries> {
    settings.validate()?;
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let schedule = geometric_schedule(settings.n_max);
    let records = run_walk(
        measure,
        settings,
        || (),
        |_, path, rows| {
            let n = path.n();
            let pid = path.path_id();
            rows.push(drift_record(path));
            if schedule.binary_search(&n).is_err() {
                return Ok(());
            }
            let b = bracket(path.inverse(), k_max, &[], settings.letter_budget);
            let status = if b.k_used < k_max { Status::Downgraded } else { Status::Ok };
            let inv_n = 1.0 / n as f64;
            let mut push = |name: String, v: f64| rows.push(Record::ok(pid, n, name, v * inv_n).with_status(status));
            push("spectral.lower".into(), b.lower);
            push("spectral.upper".into(), b.upper);
            push("spectral.point".into(), b.point);
            for (k, u) in b.upper_unit.iter().enumerate() {
                push(format!("spectral.upper_k{}", k + 1), *u);
            }
            Ok(())
        },
    );
    let mut series = EstimateSeries::new("spectral", records);
    series.metadata = settings.metadata(measure.len());
    series.metadata.push(("k_max".into(), k_max.to_string()));
    Ok(series)
}

/// `(1/n) (Φ_n.y0 | Φ_n^-1.y0)_{y0}` in the half-symmetrized orbit metric,
/// alongside the drift.
pub fn gromov_decay_experiment(measure: &ProbMeasure<Automorphism>, settings: &WalkSettings) -> Result<EstimateSeries> {
    settings.validate()?;
    let records = run_walk(
        measure,
        settings,
        || (),
        |_, path, rows| {
            let n = path.n();
            rows.push(drift_record(path));
            let g = gromov_product(path.product(), path.inverse(), settings.letter_budget)?;
            rows.push(Record::ok(path.path_id(), n, "gromov", g / n as f64));
            Ok(())
        },
    );
    let mut series = EstimateSeries::new("gromov", records);
    series.metadata = settings.metadata(measure.len());
    Ok(series)
}

/// Which matrix observables to record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixObservable {
    /// `(1/n) log ρ(A_n ... A_1)` next to `(1/n) log ||A_n ... A_1||`.
    Guivarch,
    /// `(1/n) log ||A_n ... A_1 v||` next to the norm series.
    Furstenberg(Vec<BigInt>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSettings {
    pub master_seed: u64,
    pub paths: u64,
    pub n_max: usize,
    pub bit_budget: u64,
}

/// Matrix walk series. `log_norm` at every `n`; `log_rho` at every `n` in
/// dimension <= 2 (exact) and `log_rho.lower` / `log_rho.upper` on the
/// geometric schedule otherwise; `vector` at every `n`.
pub fn matrix_experiment(
    measure: &ProbMeasure<IntMatrix>,
    observable: &MatrixObservable,
    settings: &MatrixSettings,
) -> Result<EstimateSeries> {
    if settings.n_max == 0 || settings.paths == 0 {
        return Err(Error::InvalidArgument("n_max and paths must be at least 1".into()));
    }
    let dim = measure.dim();
    if let MatrixObservable::Furstenberg(v) = observable {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: v.len() });
        }
        if v.iter().all(|x| x == &BigInt::from(0)) {
            return Err(Error::InvalidArgument("vector must be nonzero".into()));
        }
    }
    let schedule = geometric_schedule(settings.n_max);
    let records = run_paths(settings.paths, |path_id| {
        let incs = matrix_increments(measure, settings.master_seed, path_id, settings.n_max);
        let mut prod = MatrixProduct::new(dim, settings.bit_budget);
        let mut vec = match observable {
            MatrixObservable::Furstenberg(v) => Some(v.clone()),
            MatrixObservable::Guivarch => None,
        };
        let mut out = Vec::new();
        for (i, a) in incs.into_iter().enumerate() {
            let n = i + 1;
            if prod.push(a).is_err() {
                out.push(Record::truncated(path_id, n));
                break;
            }
            let inv_n = 1.0 / n as f64;
            out.push(Record::ok(path_id, n, "log_norm", log_norm(prod.product()) * inv_n));
            match vec.as_mut() {
                Some(v) => {
                    *v = a.mul_vec(v).expect("dimension checked");
                    out.push(Record::ok(path_id, n, "vector", log_vec_norm(v) * inv_n));
                }
                None if dim <= 2 => {
                    let r = spectral_radius(prod.product());
                    out.push(Record::ok(path_id, n, "log_rho", r.upper * inv_n));
                }
                None if schedule.binary_search(&n).is_ok() => {
                    let r = spectral_radius(prod.product());
                    out.push(Record::ok(path_id, n, "log_rho.lower", r.lower * inv_n));
                    out.push(Record::ok(path_id, n, "log_rho.upper", r.upper * inv_n));
                }
                None => {}
            }
        }
        out
    });
    let name = match observable {
        MatrixObservable::Guivarch => "matrix-guivarch",
        MatrixObservable::Furstenberg(_) => "matrix-furstenberg",
    };
    let mut series = EstimateSeries::new(name, records);
    series.metadata = vec![
        ("master_seed".into(), settings.master_seed.to_string()),
        ("paths".into(), settings.paths.to_string()),
        ("n_max".into(), settings.n_max.to_string()),
        ("bit_budget".into(), settings.bit_budget.to_string()),
        ("support_size".into(), measure.len().to_string()),
    ];
    Ok(series)
}
