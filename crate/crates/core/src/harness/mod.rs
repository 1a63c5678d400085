//! Verification campaigns: parameter files, execution and reports.
//!
//! A campaign file is a flat list of `key = value` lines; `#` starts a
//! comment and lists are comma separated.
//!
//! ```text
//! campaign = tightness
//! r = 3
//! pattern = K4
//! n_values = 6, 9, 12, 30, 60
//! ```

mod campaigns;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{read_graph, Graph};
use crate::pattern::named_pattern;

pub use campaigns::{
    campaign_mubayi_sweep, campaign_nikiforov, campaign_ning_zhai, campaign_peel_properties,
    campaign_tightness, generate_peel_instance, ning_zhai_bound, PeelCampaign, PeelInstance,
};

pub const SCHEMA: &str = "supersat-report/1";
/// Slack on every spectral inequality evaluated by a campaign.
pub const CAMPAIGN_SLACK: f64 = 1e-8;
pub const WORKERS_ENV: &str = "SUPERSAT_WORKERS";

#[derive(Clone, Debug, PartialEq)]
pub enum Campaign {
    Nikiforov {
        max_m: usize,
        r: usize,
    },
    NingZhai {
        max_m: usize,
    },
    Tightness {
        r: usize,
        pattern: String,
        n_values: Vec<usize>,
    },
    PeelProperties(PeelCampaign),
    MubayiSweep {
        r: usize,
        pattern: String,
        n_values: Vec<usize>,
        q_values: Vec<usize>,
    },
}

impl Campaign {
    pub fn name(&self) -> &'static str {
        match self {
            Campaign::Nikiforov { .. } => "nikiforov",
            Campaign::NingZhai { .. } => "ning_zhai",
            Campaign::Tightness { .. } => "tightness",
            Campaign::PeelProperties(_) => "peel_properties",
            Campaign::MubayiSweep { .. } => "mubayi_sweep",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignSpec {
    pub campaign: Campaign,
    /// Lift enumeration and pattern-size guardrails.
    pub allow_large: bool,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
}

struct Entries {
    values: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.values.remove(key)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str, default: Option<T>) -> Result<T> {
        match self.take(key) {
            Some((line, v)) => v.parse().map_err(|_| Error::Config {
                line,
                msg: format!("cannot parse {key} = {v}"),
            }),
            None => default.ok_or_else(|| Error::Config {
                line: 0,
                msg: format!("missing required key {key}"),
            }),
        }
    }

    fn list(&mut self, key: &str, default: Option<Vec<usize>>) -> Result<Vec<usize>> {
        match self.take(key) {
            Some((line, v)) => v
                .split(',')
                .map(|s| {
                    s.trim().parse().map_err(|_| Error::Config {
                        line,
                        msg: format!("cannot parse list entry {s:?} of {key}"),
                    })
                })
                .collect(),
            None => default.ok_or_else(|| Error::Config {
                line: 0,
                msg: format!("missing required key {key}"),
            }),
        }
    }

    fn string(&mut self, key: &str) -> Result<String> {
        self.take(key).map(|(_, v)| v).ok_or_else(|| Error::Config {
            line: 0,
            msg: format!("missing required key {key}"),
        })
    }
}

impl CampaignSpec {
    pub fn new(campaign: Campaign) -> Self {
        CampaignSpec {
            campaign,
            allow_large: false,
            workers: None,
            output: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                msg: format!("expected key = value, got {content:?}"),
            })?;
            let k = k.trim().to_string();
            if values
                .insert(k.clone(), (line, v.trim().to_string()))
                .is_some()
            {
                return Err(Error::Config {
                    line,
                    msg: format!("duplicate key {k}"),
                });
            }
        }
        let mut e = Entries { values };
        let kind = e.string("campaign")?;
        let campaign = match kind.as_str() {
            "nikiforov" => Campaign::Nikiforov {
                max_m: e.parse("max_m", None)?,
                r: e.parse("r", None)?,
            },
            "ning_zhai" => Campaign::NingZhai {
                max_m: e.parse("max_m", None)?,
            },
            "tightness" => Campaign::Tightness {
                r: e.parse("r", None)?,
                pattern: e.string("pattern")?,
                n_values: e.list("n_values", None)?,
            },
            "peel_properties" => {
                let d = PeelCampaign::default();
                let instances = e.parse("instances", Some(d.instances))?;
                Campaign::PeelProperties(PeelCampaign {
                    instances,
                    seed: e.parse("seed", Some(d.seed))?,
                    max_seeds: e.parse("max_seeds", Some(20 * instances as u64))?,
                    n_min: e.parse("n_min", Some(d.n_min))?,
                    n_max: e.parse("n_max", Some(d.n_max))?,
                    a: e.parse("a", Some(d.a))?,
                    epsilon: e.parse("epsilon", Some(d.epsilon))?,
                })
            }
            "mubayi_sweep" => Campaign::MubayiSweep {
                r: e.parse("r", None)?,
                pattern: e.string("pattern")?,
                n_values: e.list("n_values", None)?,
                q_values: e.list("q_values", None)?,
            },
            other => {
                return Err(Error::Config {
                    line: 0,
                    msg: format!("unknown campaign {other:?}"),
                })
            }
        };
        let spec = CampaignSpec {
            campaign,
            allow_large: e.parse("allow_large", Some(false))?,
            workers: match e.take("workers") {
                Some((line, v)) => Some(v.parse().map_err(|_| Error::Config {
                    line,
                    msg: format!("cannot parse workers = {v}"),
                })?),
                None => None,
            },
            output: e.take("output").map(|(_, v)| PathBuf::from(v)),
        };
        if let Some((key, (line, _))) = e.values.into_iter().next() {
            return Err(Error::Config {
                line,
                msg: format!("unknown key {key} for campaign {kind}"),
            });
        }
        Ok(spec)
    }

    pub fn grid(&self) -> BTreeMap<String, Value> {
        let mut g = BTreeMap::new();
        let mut put = |k: &str, v: Value| {
            g.insert(k.to_string(), v);
        };
        match &self.campaign {
            Campaign::Nikiforov { max_m, r } => {
                put("max_m", (*max_m).into());
                put("r", (*r).into());
            }
            Campaign::NingZhai { max_m } => put("max_m", (*max_m).into()),
            Campaign::Tightness {
                r,
                pattern,
                n_values,
            } => {
                put("r", (*r).into());
                put("pattern", pattern.clone().into());
                put("n_values", n_values.clone().into());
            }
            Campaign::PeelProperties(p) => {
                put("instances", p.instances.into());
                put("seed", p.seed.into());
                put("max_seeds", p.max_seeds.into());
                put("n_min", p.n_min.into());
                put("n_max", p.n_max.into());
                put("a", p.a.into());
                put("epsilon", p.epsilon.into());
            }
            Campaign::MubayiSweep {
                r,
                pattern,
                n_values,
                q_values,
            } => {
                put("r", (*r).into());
                put("pattern", pattern.clone().into());
                put("n_values", n_values.clone().into());
                put("q_values", q_values.clone().into());
            }
        }
        put("allow_large", self.allow_large.into());
        g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordStatus {
    Pass,
    Fail,
    /// A small-instance failure of a statement only claimed for large `n`.
    Finding,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub status: RecordStatus,
    pub margin: Option<f64>,
    pub inputs: BTreeMap<String, Value>,
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

/// Converts a `json!({...})` object into a sorted map.
pub(crate) fn fields(v: Value) -> BTreeMap<String, Value> {
    match v {
        Value::Object(m) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    pub findings: usize,
    /// Inputs examined but not evaluated because a hypothesis failed.
    pub skipped: usize,
    pub min_margin: Option<f64>,
    /// Records whose margin lies within the slack of zero.
    pub near_equalities: Vec<String>,
    pub counterexamples: Vec<String>,
    pub notes: Vec<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema: String,
    pub campaign: String,
    pub grid: BTreeMap<String, Value>,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl CampaignReport {
    pub(crate) fn assemble(
        spec: &CampaignSpec,
        records: Vec<Record>,
        skipped: usize,
        notes: Vec<String>,
    ) -> Self {
        let mut s = Summary {
            instances: records.len(),
            skipped,
            notes,
            ..Summary::default()
        };
        for r in &records {
            match r.status {
                RecordStatus::Pass => s.passed += 1,
                RecordStatus::Fail => {
                    s.failed += 1;
                    s.counterexamples.push(r.id.clone());
                }
                RecordStatus::Finding => s.findings += 1,
            }
            if let Some(m) = r.margin {
                if m.is_finite() {
                    s.min_margin = Some(s.min_margin.map_or(m, |x: f64| x.min(m)));
                    if m.abs() <= CAMPAIGN_SLACK {
                        s.near_equalities.push(r.id.clone());
                    }
                }
            }
        }
        s.pass = s.counterexamples.is_empty();
        CampaignReport {
            schema: SCHEMA.to_string(),
            campaign: spec.campaign.name().to_string(),
            grid: spec.grid(),
            records,
            summary: s,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.pass
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Records as CSV. Columns: `id,status,margin,note`, then every input key
    /// as `in.<key>` and every value key as `out.<key>`, each group sorted.
    pub fn to_csv(&self) -> Result<String> {
        let mut in_keys: Vec<&String> = self.records.iter().flat_map(|r| r.inputs.keys()).collect();
        let mut out_keys: Vec<&String> =
            self.records.iter().flat_map(|r| r.values.keys()).collect();
        in_keys.sort();
        in_keys.dedup();
        out_keys.sort();
        out_keys.dedup();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "id".to_string(),
            "status".into(),
            "margin".into(),
            "note".into(),
        ];
        header.extend(in_keys.iter().map(|k| format!("in.{k}")));
        header.extend(out_keys.iter().map(|k| format!("out.{k}")));
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.records {
            let status = serde_json::to_value(r.status)?;
            let mut row = vec![
                r.id.clone(),
                cell(&status),
                r.margin.map(|m| m.to_string()).unwrap_or_default(),
                r.note.clone().unwrap_or_default(),
            ];
            row.extend(
                in_keys
                    .iter()
                    .map(|k| r.inputs.get(*k).map(cell).unwrap_or_default()),
            );
            row.extend(
                out_keys
                    .iter()
                    .map(|k| r.values.get(*k).map(cell).unwrap_or_default()),
            );
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidParameter(format!("csv: {e}"))
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Number of worker threads: explicit value, else `SUPERSAT_WORKERS`, else all cores.
pub fn resolve_workers(explicit: Option<usize>) -> Option<usize> {
    explicit.or_else(|| std::env::var(WORKERS_ENV).ok()?.trim().parse().ok())
}

/// Runs `f` inside a rayon pool sized by [`resolve_workers`].
pub fn with_workers<T: Send>(explicit: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = resolve_workers(explicit) {
        if n == 0 {
            return Err(Error::InvalidParameter("workers must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs the campaign described by `spec` on its own worker pool.
pub fn run_campaign(spec: &CampaignSpec) -> Result<CampaignReport> {
    with_workers(spec.workers, || match &spec.campaign {
        Campaign::Nikiforov { .. } => campaign_nikiforov(spec),
        Campaign::NingZhai { .. } => campaign_ning_zhai(spec),
        Campaign::Tightness { .. } => campaign_tightness(spec),
        Campaign::PeelProperties(_) => campaign_peel_properties(spec),
        Campaign::MubayiSweep { .. } => campaign_mubayi_sweep(spec),
    })?
}

/// Resolves a pattern given by registry name or by file path. Names take
/// precedence; the second value is a warning when a file of the same name
/// also exists.
pub fn resolve_pattern(name_or_path: &str) -> Result<(Graph, Option<String>)> {
    let file_exists = Path::new(name_or_path).is_file();
    match named_pattern(name_or_path) {
        Ok(g) => {
            let warning = file_exists.then(|| {
                format!("pattern {name_or_path:?} resolved by name; the file of the same name is ignored")
            });
            Ok((g, warning))
        }
        Err(e) => {
            if file_exists {
                Ok((read_graph(&std::fs::read_to_string(name_or_path)?)?, None))
            } else {
                Err(e)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_spec() {
        let spec = CampaignSpec::parse(
            "# sweep\ncampaign = tightness\nr = 3\npattern = K4  # clique\nn_values = 6, 9\nworkers = 2\n",
        )
        .unwrap();
        assert_eq!(
            spec.campaign,
            Campaign::Tightness {
                r: 3,
                pattern: "K4".into(),
                n_values: vec![6, 9]
            }
        );
        assert_eq!(spec.workers, Some(2));
        assert!(!spec.allow_large);
    }

    #[test]
    fn parse_errors_carry_lines() {
        match CampaignSpec::parse("campaign = nikiforov\nmax_m = x\nr = 2\n") {
            Err(Error::Config { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match CampaignSpec::parse("campaign = nikiforov\nmax_m = 3\nr = 2\nbogus = 1\n") {
            Err(Error::Config { line: 4, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(CampaignSpec::parse("campaign = nope\n").is_err());
        assert!(CampaignSpec::parse("campaign = ning_zhai\n").is_err());
        assert!(CampaignSpec::parse("just text\n").is_err());
        assert!(CampaignSpec::parse("campaign = ning_zhai\nmax_m = 3\nmax_m = 4\n").is_err());
    }

    #[test]
    fn peel_defaults() {
        let spec = CampaignSpec::parse("campaign = peel_properties\ninstances = 5\n").unwrap();
        match spec.campaign {
            Campaign::PeelProperties(p) => {
                assert_eq!(p.instances, 5);
                assert_eq!(p.max_seeds, 100);
                assert_eq!(p.a, 1.2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_projection() {
        let spec = CampaignSpec::new(Campaign::NingZhai { max_m: 4 });
        let rec = Record {
            id: "a,b".into(),
            status: RecordStatus::Pass,
            margin: Some(0.5),
            inputs: fields(serde_json::json!({"m": 3})),
            values: fields(serde_json::json!({"rho": 1.5, "g6": "Bw"})),
            note: None,
        };
        let report = CampaignReport::assemble(&spec, vec![rec], 0, vec![]);
        let csv = report.to_csv().unwrap();
        assert_eq!(
            csv,
            "id,status,margin,note,in.m,out.g6,out.rho\n\"a,b\",pass,0.5,,3,Bw,1.5\n"
        );
        assert!(report.passed());
    }

    #[test]
    fn pattern_resolution() {
        let (g, w) = resolve_pattern("K3").unwrap();
        assert_eq!(g.m(), 3);
        assert!(w.is_none());
        assert!(resolve_pattern("no-such-pattern").is_err());
    }
}
