use explab::freegroup::stallings_build;
use explab::maps::InjectionCase;
use explab::{Isometry, MarkedGroup, QuotientHom, ReducedWord};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;
use std::path::{Path, PathBuf};

/// A configuration error, reported with the offending key.
#[derive(Debug)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl fmt::Display) -> Self {
        ConfigError { key: key.into(), message: message.to_string() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.key, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

type CResult<T> = std::result::Result<T, ConfigError>;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    SchottkySymmetric { k: usize, t: f64 },
    /// Generator matrices as `[Re a, Im a, Re b, Im b]`.
    Generators { matrices: Vec<[f64; 4]> },
}

impl Default for GroupSpec {
    fn default() -> Self {
        GroupSpec::SchottkySymmetric { k: 2, t: 3.0 }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchottkyFields {
    #[allow(dead_code)]
    kind: String,
    #[serde(default = "default_k")]
    k: usize,
    #[serde(default = "default_t")]
    t: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFields {
    #[allow(dead_code)]
    kind: String,
    matrices: Vec<[f64; 4]>,
}

fn default_k() -> usize {
    2
}

fn default_t() -> f64 {
    3.0
}

/// Deserializes with the failing path prefixed by `prefix`.
fn decode<T: serde::de::DeserializeOwned>(value: Value, prefix: &str) -> CResult<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let key = match (prefix, path.as_str()) {
            (p, ".") => p.to_string(),
            ("", q) => q.to_string(),
            (p, q) => format!("{p}.{q}"),
        };
        ConfigError::new(key, e.into_inner())
    })
}

impl GroupSpec {
    /// Decodes the config-file form `{"kind": "schottky_symmetric", "k": 2, "t": 3.0}`.
    pub fn from_value(value: Value) -> CResult<Self> {
        let kind = value.get("kind").and_then(Value::as_str).ok_or_else(|| ConfigError::new("group.kind", "missing or not a string"))?;
        match kind {
            "schottky_symmetric" => {
                let f: SchottkyFields = decode(value, "group")?;
                Ok(GroupSpec::SchottkySymmetric { k: f.k, t: f.t })
            }
            "generators" => {
                let f: MatrixFields = decode(value, "group")?;
                Ok(GroupSpec::Generators { matrices: f.matrices })
            }
            other => Err(ConfigError::new("group.kind", format!("unknown kind {other:?} (expected schottky_symmetric or generators)"))),
        }
    }

    /// Parses the flag form `schottky:k=2,t=3`.
    pub fn parse(s: &str) -> CResult<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        if kind != "schottky" && kind != "schottky_symmetric" {
            return Err(ConfigError::new("group", format!("unknown group kind {kind:?} (expected schottky)")));
        }
        let (mut k, mut t) = (2usize, 3.0f64);
        for (key, value) in key_values("group", rest)? {
            match key {
                "k" => k = value.parse().map_err(|_| ConfigError::new("group.k", format!("not a count: {value:?}")))?,
                "t" => t = value.parse().map_err(|_| ConfigError::new("group.t", format!("not a number: {value:?}")))?,
                _ => return Err(ConfigError::new(format!("group.{key}"), "unknown key")),
            }
        }
        Ok(GroupSpec::SchottkySymmetric { k, t })
    }

    pub fn build(&self) -> CResult<MarkedGroup> {
        match self {
            GroupSpec::SchottkySymmetric { k, t } => {
                if !(t.is_finite() && *t > 0.0) {
                    return Err(ConfigError::new("group.t", format!("must be positive, got {t}")));
                }
                MarkedGroup::schottky_symmetric(*k, *t).map_err(|e| ConfigError::new("group", e))
            }
            GroupSpec::Generators { matrices } => {
                let gens = matrices.iter().map(|&m| Isometry::from(m)).collect();
                MarkedGroup::from_generators(gens).map_err(|e| ConfigError::new("group.matrices", e))
            }
        }
    }
}

/// Parses the flag form `abelian`, `trivial` or `cyclic:n=2,images=1;0`.
pub fn parse_hom(s: &str, rank: usize) -> CResult<QuotientHom> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    match kind {
        "abelian" | "trivial" if !rest.is_empty() => Err(ConfigError::new("hom", format!("{kind} takes no parameters"))),
        "abelian" => Ok(QuotientHom::abelianization(rank)),
        "trivial" => Ok(QuotientHom::trivial(rank)),
        "cyclic" => {
            let (mut n, mut images) = (None, None);
            for (key, value) in key_values("hom", rest)? {
                match key {
                    "n" => n = Some(value.parse::<usize>().map_err(|_| ConfigError::new("hom.n", format!("not a count: {value:?}")))?),
                    "images" => {
                        images = Some(
                            value
                                .split(';')
                                .map(|x| x.parse::<usize>())
                                .collect::<Result<Vec<_>, _>>()
                                .map_err(|_| ConfigError::new("hom.images", format!("expected counts separated by ';', got {value:?}")))?,
                        )
                    }
                    _ => return Err(ConfigError::new(format!("hom.{key}"), "unknown key")),
                }
            }
            let n = n.ok_or_else(|| ConfigError::new("hom.n", "missing"))?;
            let images = images.ok_or_else(|| ConfigError::new("hom.images", "missing"))?;
            if images.len() != rank {
                return Err(ConfigError::new("hom.images", format!("expected {rank} images, got {}", images.len())));
            }
            QuotientHom::cyclic(rank, n, &images).map_err(|e| ConfigError::new("hom", e))
        }
        _ => Err(ConfigError::new("hom", format!("unknown homomorphism {kind:?} (expected abelian, trivial or cyclic)"))),
    }
}

fn key_values<'a>(key: &str, s: &'a str) -> CResult<Vec<(&'a str, &'a str)>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|kv| kv.split_once('=').ok_or_else(|| ConfigError::new(key, format!("expected key=value, got {kv:?}"))))
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    #[default]
    Free,
    Malnormal,
}

/// Every key accepted in a config file; each is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    /// Decoded separately by [`GroupSpec::from_value`].
    #[serde(skip_deserializing, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hom: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<String>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<Case>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_window: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_len: Option<usize>,
}

impl PartialConfig {
    pub fn from_json(text: &str) -> CResult<Self> {
        if text.trim().is_empty() {
            return Ok(PartialConfig::default());
        }
        let mut value: Value = serde_json::from_str(text).map_err(|e| ConfigError::new("", format!("invalid JSON: {e}")))?;
        let group = match value.as_object_mut() {
            Some(map) => map.remove("group").map(GroupSpec::from_value).transpose()?,
            None => return Err(ConfigError::new("", "config must be a JSON object")),
        };
        Ok(PartialConfig { group, ..decode(value, "")? })
    }

    pub fn from_file(path: &Path) -> CResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        PartialConfig::from_json(&text)
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: PartialConfig) -> PartialConfig {
        PartialConfig {
            group: over.group.or(self.group),
            hom: over.hom.or(self.hom),
            h: over.h.or(self.h),
            h0: over.h0.or(self.h0),
            len: over.len.or(self.len),
            s: over.s.or(self.s),
            workers: over.workers.or(self.workers),
            out: over.out.or(self.out),
            case: over.case.or(self.case),
            subgroup: over.subgroup.or(self.subgroup),
            window: over.window.or(self.window),
            n_window: over.n_window.or(self.n_window),
            samples: over.samples.or(self.samples),
            seed: over.seed.or(self.seed),
            csv_len: over.csv_len.or(self.csv_len),
        }
    }
}

/// A fully resolved run configuration. `workers` and `out` are execution
/// details and are left out of serialized reports, so reports do not depend
/// on them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub group: GroupSpec,
    pub hom: String,
    pub h: ReducedWord,
    pub h0: ReducedWord,
    #[serde(rename = "L")]
    pub len: usize,
    pub s: f64,
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub out: PathBuf,
    pub case: Case,
    pub subgroup: Vec<ReducedWord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    pub n_window: i64,
    pub samples: u64,
    pub seed: u64,
    pub csv_len: usize,
}

pub const DEFAULT_H: &str = "abAB";
pub const DEFAULT_SUBGROUP: [&str; 2] = ["aabAAB", "abbABB"];
pub const WORKERS_ENV: &str = "EXPLAB_WORKERS";

fn word(key: &str, s: &str) -> CResult<ReducedWord> {
    s.parse().map_err(|e| ConfigError::new(key, e))
}

impl RunConfig {
    /// Applies defaults to unset fields and validates. `env_workers` is the
    /// fallback for an unset worker count.
    pub fn resolve(p: PartialConfig, env_workers: Option<&str>) -> CResult<Self> {
        let workers = match (p.workers, env_workers) {
            (Some(w), _) => w,
            (None, Some(v)) => v.trim().parse().map_err(|_| ConfigError::new(WORKERS_ENV, format!("not a count: {v:?}")))?,
            (None, None) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        if workers == 0 {
            return Err(ConfigError::new("workers", "must be positive"));
        }
        let len = p.len.unwrap_or(10);
        if len == 0 {
            return Err(ConfigError::new("L", "must be positive"));
        }
        let s = p.s.unwrap_or(0.5);
        if !(s.is_finite() && s > 0.0) {
            return Err(ConfigError::new("s", format!("must be positive, got {s}")));
        }
        let n_window = p.n_window.unwrap_or(20);
        if n_window <= 0 {
            return Err(ConfigError::new("n_window", "must be positive"));
        }
        let samples = p.samples.unwrap_or(10_000);
        if samples == 0 {
            return Err(ConfigError::new("samples", "must be positive"));
        }
        if let Some([lo, hi]) = p.window {
            if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
                return Err(ConfigError::new("window", format!("need 0 < lo < hi, got [{lo}, {hi}]")));
            }
        }
        let subgroup = match p.subgroup {
            Some(v) => v.iter().enumerate().map(|(i, s)| word(&format!("subgroup[{i}]"), s)).collect::<CResult<_>>()?,
            None => DEFAULT_SUBGROUP.iter().map(|s| s.parse().expect("default words parse")).collect(),
        };
        let cfg = RunConfig {
            group: p.group.unwrap_or_default(),
            hom: p.hom.unwrap_or_else(|| "abelian".to_string()),
            h: word("h", p.h.as_deref().unwrap_or(DEFAULT_H))?,
            h0: word("h0", p.h0.as_deref().unwrap_or(DEFAULT_H))?,
            len,
            s,
            workers,
            out: p.out.unwrap_or_else(|| PathBuf::from("out")),
            case: p.case.unwrap_or_default(),
            subgroup,
            window: p.window,
            n_window,
            samples,
            seed: p.seed.unwrap_or(0),
            csv_len: p.csv_len.unwrap_or(8),
        };
        let group = cfg.group.build()?;
        parse_hom(&cfg.hom, group.rank())?;
        for (key, w) in [("h", &cfg.h), ("h0", &cfg.h0)] {
            w.check_rank(group.rank()).map_err(|e| ConfigError::new(key, e))?;
        }
        Ok(cfg)
    }

    pub fn group(&self) -> CResult<MarkedGroup> {
        self.group.build()
    }

    pub fn quotient(&self, rank: usize) -> CResult<QuotientHom> {
        parse_hom(&self.hom, rank)
    }

    pub fn injection_case(&self) -> CResult<InjectionCase> {
        Ok(match self.case {
            Case::Free => InjectionCase::Free { h0: self.h0.clone() },
            Case::Malnormal => InjectionCase::Malnormal { graph: stallings_build(&self.subgroup).map_err(|e| ConfigError::new("subgroup", e))? },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = RunConfig::resolve(PartialConfig::from_json("").unwrap(), Some("1")).unwrap();
        assert_eq!(cfg.group, GroupSpec::SchottkySymmetric { k: 2, t: 3.0 });
        assert_eq!(cfg.len, 10);
        assert_eq!(cfg.workers, 1);
        assert_eq!(cfg, RunConfig::resolve(PartialConfig::from_json("{}").unwrap(), Some("1")).unwrap());
    }

    #[test]
    fn malformed_value_names_its_key() {
        let err = PartialConfig::from_json(r#"{"group": {"kind": "schottky_symmetric", "k": 2, "t": "x"}}"#).unwrap_err();
        assert_eq!(err.key, "group.t");
        let err = GroupSpec::parse("schottky:k=2,t=x").unwrap_err();
        assert_eq!(err.key, "group.t");
        let err = PartialConfig::from_json(r#"{"L": -3}"#).unwrap_err();
        assert_eq!(err.key, "L");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = PartialConfig::from_json(r#"{"lenght": 3}"#).unwrap_err();
        assert!(err.to_string().contains("lenght"), "{err}");
        assert!(PartialConfig::from_json(r#"{"group": {"kind": "schottky_symmetric", "k": 2, "t": 3, "x": 1}}"#).is_err());
        assert_eq!(GroupSpec::parse("schottky:k=2,q=1").unwrap_err().key, "group.q");
    }

    #[test]
    fn flags_override_file() {
        let file = PartialConfig::from_json(r#"{"L": 7, "s": 0.3}"#).unwrap();
        let flags = PartialConfig { len: Some(9), ..Default::default() };
        let cfg = RunConfig::resolve(file.overlay(flags), None).unwrap();
        assert_eq!((cfg.len, cfg.s), (9, 0.3));
    }

    #[test]
    fn workers_precedence() {
        let p = PartialConfig { workers: Some(3), ..Default::default() };
        assert_eq!(RunConfig::resolve(p, Some("5")).unwrap().workers, 3);
        assert_eq!(RunConfig::resolve(PartialConfig::default(), Some("5")).unwrap().workers, 5);
        assert_eq!(RunConfig::resolve(PartialConfig::default(), Some("many")).unwrap_err().key, WORKERS_ENV);
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = RunConfig::resolve(PartialConfig::from_json(r#"{"hom": "cyclic:n=2,images=1;0", "window": [10, 20]}"#).unwrap(), Some("2")).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back = RunConfig::resolve(PartialConfig::from_json(&text).unwrap(), Some("2")).unwrap();
        assert_eq!(back, RunConfig { out: cfg.out.clone(), ..back.clone() });
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn group_and_hom_flags() {
        assert_eq!(GroupSpec::parse("schottky:k=3,t=4.5").unwrap(), GroupSpec::SchottkySymmetric { k: 3, t: 4.5 });
        assert!(GroupSpec::parse("fuchsian:k=2").is_err());
        assert_eq!(parse_hom("cyclic:n=2,images=1;0", 2).unwrap().describe(), "cyclic:n=2,images=1;0");
        assert_eq!(parse_hom("abelian", 2).unwrap(), QuotientHom::abelianization(2));
        assert_eq!(parse_hom("cyclic:n=2,images=1", 2).unwrap_err().key, "hom.images");
        assert_eq!(parse_hom("cyclic:images=1;1", 2).unwrap_err().key, "hom.n");
        assert!(parse_hom("free", 2).is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        for (json, key) in [
            (r#"{"L": 0}"#, "L"),
            (r#"{"s": -1}"#, "s"),
            (r#"{"h": "aA"}"#, "h"),
            (r#"{"window": [5, 2]}"#, "window"),
            (r#"{"group": {"kind": "schottky_symmetric", "k": 2, "t": 0.5}}"#, "group"),
        ] {
            let err = RunConfig::resolve(PartialConfig::from_json(json).unwrap(), Some("1")).unwrap_err();
            assert_eq!(err.key, key, "{json}: {err}");
        }
    }
}
