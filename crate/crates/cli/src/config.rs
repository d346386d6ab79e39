//! Experiment configuration files.
//!
//! Grammar, one item per line:
//!
//! ```text
//! line     = blank | comment | section | entry
//! comment  = "#" anything
//! section  = "[" prefix "]"          e.g. [gen.1]; "[]" returns to the top level
//! entry    = key "=" value           key is prefixed by "<section>." inside a section
//! ```
//!
//! Keys: `kind, rank, dim, n_max, paths, k_max, master_seed, letter_budget,
//! bit_budget, out`; measure entries `gen.<i>.map`, `gen.<i>.inv`,
//! `gen.<i>.weight` or `gen.<i>.matrix`, `gen.<i>.weight`; seeds `word.<i>`.
//! Indices start at 1 and must be contiguous. A matrix walk takes its
//! Furstenberg vector from `word.1`, written as a list such as `[1,0]`.

use crate::error::{CliError, CliResult};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Drift,
    Conjugacy,
    Spectral,
    Gromov,
    MatrixGuivarch,
    MatrixFurstenberg,
    Distance,
    Stretch,
    Delta,
}

impl Kind {
    pub const ALL: [Kind; 9] = [
        Kind::Drift,
        Kind::Conjugacy,
        Kind::Spectral,
        Kind::Gromov,
        Kind::MatrixGuivarch,
        Kind::MatrixFurstenberg,
        Kind::Distance,
        Kind::Stretch,
        Kind::Delta,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Drift => "drift",
            Kind::Conjugacy => "conjugacy",
            Kind::Spectral => "spectral",
            Kind::Gromov => "gromov",
            Kind::MatrixGuivarch => "matrix-guivarch",
            Kind::MatrixFurstenberg => "matrix-furstenberg",
            Kind::Distance => "distance",
            Kind::Stretch => "stretch",
            Kind::Delta => "delta",
        }
    }

    pub fn is_matrix(self) -> bool {
        matches!(self, Kind::MatrixGuivarch | Kind::MatrixFurstenberg)
    }

    /// Kinds that sample random walks.
    pub fn is_walk(self) -> bool {
        !matches!(self, Kind::Distance | Kind::Stretch)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Kind, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown kind `{s}`"))
    }
}

/// One support element of the measure, exactly as written.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GenEntry {
    pub map: Option<String>,
    pub inv: Option<String>,
    pub matrix: Option<String>,
    pub weight: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub rank: Option<usize>,
    pub dim: Option<usize>,
    pub n_max: Option<usize>,
    pub paths: Option<u64>,
    pub k_max: Option<u32>,
    pub master_seed: Option<u64>,
    pub letter_budget: Option<usize>,
    pub bit_budget: Option<u64>,
    pub out: Option<String>,
    pub gens: Vec<GenEntry>,
    pub words: Vec<String>,
}

impl ExperimentConfig {
    pub fn new(kind: Kind) -> ExperimentConfig {
        ExperimentConfig {
            kind,
            rank: None,
            dim: None,
            n_max: None,
            paths: None,
            k_max: None,
            master_seed: None,
            letter_budget: None,
            bit_budget: None,
            out: None,
            gens: Vec::new(),
            words: Vec::new(),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| CliError::field(key, format!("cannot parse `{value}`: {e}")))
}

/// Splits `prefix.<i>.rest` into `(i, rest)`.
fn indexed<'k>(key: &'k str, prefix: &str) -> Option<CliResult<(usize, &'k str)>> {
    let tail = key.strip_prefix(prefix)?.strip_prefix('.')?;
    let (idx, rest) = tail.split_once('.').unwrap_or((tail, ""));
    Some(match idx.parse::<usize>() {
        Ok(i) if i >= 1 => Ok((i, rest)),
        _ => Err(CliError::field(key, "index must be a positive integer")),
    })
}

/// Collects `index -> item` maps into a list, requiring indices `1..=len`.
fn contiguous<T>(what: &str, map: BTreeMap<usize, T>) -> CliResult<Vec<T>> {
    for (pos, &i) in map.keys().enumerate() {
        if i != pos + 1 {
            return Err(CliError::field(format!("{what}.{}", pos + 1), "missing (indices must be 1, 2, ...)"));
        }
    }
    Ok(map.into_values().collect())
}

impl FromStr for ExperimentConfig {
    type Err = CliError;

    fn from_str(text: &str) -> CliResult<ExperimentConfig> {
        let mut section = String::new();
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut entries: Vec<(String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[') {
                let name = inner.strip_suffix(']').ok_or_else(|| CliError::Syntax {
                    line: line_no,
                    message: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| CliError::Syntax {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(CliError::Syntax {
                    line: line_no,
                    message: "empty key".into(),
                });
            }
            let key = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
            if let Some(prev) = seen.insert(key.clone(), line_no) {
                return Err(CliError::Syntax {
                    line: line_no,
                    message: format!("duplicate key `{key}` (first set on line {prev})"),
                });
            }
            entries.push((key, v.trim().to_string()));
        }

        let mut kind = None;
        let mut cfg = ExperimentConfig::new(Kind::Drift);
        let mut gens: BTreeMap<usize, GenEntry> = BTreeMap::new();
        let mut words: BTreeMap<usize, String> = BTreeMap::new();
        for (key, value) in entries {
            let k = key.as_str();
            match k {
                "kind" => kind = Some(value.parse::<Kind>().map_err(|m| CliError::field("kind", m))?),
                "rank" => cfg.rank = Some(parse_value(k, &value)?),
                "dim" => cfg.dim = Some(parse_value(k, &value)?),
                "n_max" => cfg.n_max = Some(parse_value(k, &value)?),
                "paths" => cfg.paths = Some(parse_value(k, &value)?),
                "k_max" => cfg.k_max = Some(parse_value(k, &value)?),
                "master_seed" => cfg.master_seed = Some(parse_value(k, &value)?),
                "letter_budget" => cfg.letter_budget = Some(parse_value(k, &value)?),
                "bit_budget" => cfg.bit_budget = Some(parse_value(k, &value)?),
                "out" => cfg.out = Some(value),
                _ => {
                    if let Some(r) = indexed(k, "gen") {
                        let (i, field) = r?;
                        let g = gens.entry(i).or_default();
                        match field {
                            "map" => g.map = Some(value),
                            "inv" => g.inv = Some(value),
                            "matrix" => g.matrix = Some(value),
                            "weight" => g.weight = Some(parse_value(k, &value)?),
                            _ => return Err(CliError::field(k, "unknown measure field (map, inv, matrix, weight)")),
                        }
                    } else if let Some(r) = indexed(k, "word") {
                        let (i, rest) = r?;
                        if !rest.is_empty() {
                            return Err(CliError::field(k, "seed keys have the form word.<i>"));
                        }
                        words.insert(i, value);
                    } else {
                        return Err(CliError::field(k, "unknown key"));
                    }
                }
            }
        }
        cfg.kind = kind.ok_or_else(|| CliError::field("kind", "missing"))?;
        cfg.gens = contiguous("gen", gens)?;
        cfg.words = contiguous("word", words)?;
        Ok(cfg)
    }
}

/// Canonical form: scalar keys, then one `[gen.<i>]` section per support
/// element, then the seeds.
impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind = {}", self.kind)?;
        macro_rules! opt {
            ($($name:ident),*) => {$(
                if let Some(v) = &self.$name {
                    writeln!(f, "{} = {}", stringify!($name), v)?;
                }
            )*};
        }
        opt!(rank, dim, n_max, paths, k_max, master_seed, letter_budget, bit_budget, out);
        for (i, w) in self.words.iter().enumerate() {
            writeln!(f, "word.{} = {}", i + 1, w)?;
        }
        for (i, g) in self.gens.iter().enumerate() {
            writeln!(f, "\n[gen.{}]", i + 1)?;
            if let Some(m) = &g.map {
                writeln!(f, "map = {m}")?;
            }
            if let Some(m) = &g.inv {
                writeln!(f, "inv = {m}")?;
            }
            if let Some(m) = &g.matrix {
                writeln!(f, "matrix = {m}")?;
            }
            if let Some(w) = g.weight {
                writeln!(f, "weight = {w}")?;
            }
        }
        Ok(())
    }
}
