use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{
    fields, resolve_pattern, Campaign, CampaignReport, CampaignSpec, Record, RecordStatus,
    CAMPAIGN_SLACK,
};
use crate::counting::{c_bruteforce, c_exact, count_copies, count_copies_with, CountLimits};
use crate::error::{Error, Result};
use crate::graph::{
    build_turan, build_turan_plus_edge, enumerate_levels, write_graph6, Graph, Guardrails,
};
use crate::pattern::{named_pattern, PatternProfile};
use crate::spectral::{
    check_peel_bounds, check_terminal_bounds, peel, spectral_radius, SpectralConfig, TerminalReason,
};

const EXHAUSTIVE_MAX_M: usize = 10;
const MUBAYI_MAX_N: usize = 9;
const MUBAYI_MAX_Q: usize = 3;

fn g6(g: &Graph) -> String {
    write_graph6(g).unwrap_or_else(|_| format!("n{}m{}", g.n(), g.m()))
}

fn check_max_m(spec: &CampaignSpec, max_m: usize) -> Result<()> {
    if max_m > EXHAUSTIVE_MAX_M && !spec.allow_large {
        return Err(Error::Guardrail(format!(
            "exhaustive campaigns are limited to m <= {EXHAUSTIVE_MAX_M}, got {max_m}"
        )));
    }
    Ok(())
}

fn profile(spec: &CampaignSpec, name: &str) -> Result<PatternProfile> {
    let (g, _) = resolve_pattern(name)?;
    PatternProfile::build(&g, spec.allow_large)
}

/// All graphs with `1..=max_m` edges and no isolated vertices, by edge count.
fn exhaustive_levels(max_m: usize) -> Result<Vec<Vec<Graph>>> {
    enumerate_levels(2 * max_m, max_m, &Guardrails::unrestricted())
}

/// Checks `rho <= sqrt((1 - 1/r) 2m)` on every `K_{r+1}`-free graph with at most
/// `max_m` edges, and that equality occurs exactly on complete bipartite graphs
/// (`r = 2`) or regular complete `r`-partite graphs (`r >= 3`).
pub fn campaign_nikiforov(spec: &CampaignSpec) -> Result<CampaignReport> {
    let Campaign::Nikiforov { max_m, r } = spec.campaign else {
        return Err(Error::InvalidParameter("not a nikiforov campaign".into()));
    };
    check_max_m(spec, max_m)?;
    if r < 2 {
        return Err(Error::InvalidParameter("r must be at least 2".into()));
    }
    let cfg = SpectralConfig::default();
    let levels = exhaustive_levels(max_m)?;
    let mut records = Vec::new();
    let mut skipped = 0;
    let mut notes = Vec::new();
    for (m, level) in levels.iter().enumerate().skip(1) {
        let evaluated: Vec<Option<Record>> = level
            .par_iter()
            .map(|g| -> Result<Option<Record>> {
                if g.contains_clique(r + 1) {
                    return Ok(None);
                }
                let rho = spectral_radius(g, &cfg)?.rho;
                let bound = ((1.0 - 1.0 / r as f64) * 2.0 * m as f64).sqrt();
                let margin = bound - rho;
                let equality = margin.abs() <= CAMPAIGN_SLACK;
                let family = if r == 2 {
                    g.is_complete_bipartite()
                } else {
                    g.is_regular_complete_multipartite(r)
                };
                let holds = margin >= -CAMPAIGN_SLACK && equality == family;
                let code = g6(g);
                Ok(Some(Record {
                    id: format!("m{m}-{code}"),
                    status: if holds {
                        RecordStatus::Pass
                    } else {
                        RecordStatus::Fail
                    },
                    margin: Some(margin),
                    inputs: fields(json!({ "m": m, "graph6": code })),
                    values: fields(json!({
                        "n": g.n(),
                        "rho": rho,
                        "bound": bound,
                        "equality": equality,
                        "extremal_family": family,
                    })),
                    note: (equality != family).then(|| {
                        "numerical equality disagrees with structural recognition".to_string()
                    }),
                }))
            })
            .collect::<Result<_>>()?;
        let kept = evaluated.iter().filter(|r| r.is_some()).count();
        notes.push(format!(
            "m = {m}: {} isomorphism classes enumerated, {kept} K{}-free",
            level.len(),
            r + 1
        ));
        skipped += level.len() - kept;
        records.extend(evaluated.into_iter().flatten());
    }
    Ok(CampaignReport::assemble(spec, records, skipped, notes))
}

/// Largest `k` with `(2k + 1)^2 <= m`, that is `floor((sqrt(m) - 1) / 2)`.
pub fn ning_zhai_bound(m: usize) -> usize {
    let mut k = 0;
    while (2 * k + 3) * (2 * k + 3) <= m {
        k += 1;
    }
    k
}

/// Over all graphs with at most `max_m` edges, `rho >= sqrt(m)` and not
/// complete bipartite, checks that the triangle count is at least
/// `floor((sqrt(m) - 1) / 2)`.
pub fn campaign_ning_zhai(spec: &CampaignSpec) -> Result<CampaignReport> {
    let Campaign::NingZhai { max_m } = spec.campaign else {
        return Err(Error::InvalidParameter("not a ning_zhai campaign".into()));
    };
    check_max_m(spec, max_m)?;
    let cfg = SpectralConfig::default();
    let k3 = PatternProfile::new(&named_pattern("K3")?)?;
    let levels = exhaustive_levels(max_m)?;
    let mut records = Vec::new();
    let mut skipped = 0;
    let mut notes = Vec::new();
    for (m, level) in levels.iter().enumerate().skip(1) {
        let bound = ning_zhai_bound(m);
        let evaluated: Vec<Option<Record>> = level
            .par_iter()
            .map(|g| -> Result<Option<Record>> {
                let rho = spectral_radius(g, &cfg)?.rho;
                if rho < (m as f64).sqrt() - CAMPAIGN_SLACK || g.is_complete_bipartite() {
                    return Ok(None);
                }
                let triangles = count_copies(g, &k3)?;
                let code = g6(g);
                Ok(Some(Record {
                    id: format!("m{m}-{code}"),
                    status: if triangles >= bound as u64 {
                        RecordStatus::Pass
                    } else {
                        RecordStatus::Fail
                    },
                    margin: Some(triangles as f64 - bound as f64),
                    inputs: fields(json!({ "m": m, "graph6": code })),
                    values: fields(json!({
                        "rho": rho,
                        "triangles": triangles,
                        "bound": bound,
                    })),
                    note: (bound == 0).then(|| "bound is 0: vacuous".to_string()),
                }))
            })
            .collect::<Result<_>>()?;
        let kept = evaluated.iter().filter(|r| r.is_some()).count();
        notes.push(format!(
            "m = {m}: {} isomorphism classes enumerated, {kept} with rho >= sqrt(m) and not complete bipartite, bound {bound}{}",
            level.len(),
            if bound == 0 { " (vacuous)" } else { "" }
        ));
        skipped += level.len() - kept;
        records.extend(evaluated.into_iter().flatten());
    }
    Ok(CampaignReport::assemble(spec, records, skipped, notes))
}

/// On `T*_{n,r}`: `rho > sqrt((1 - 1/r) 2m)` strictly and `N_F = c(n, F)`
/// exactly; tabulates `N_F / m^((f-2)/2)` against `(2r/(r-1))^((f-2)/2) alpha_F`.
pub fn campaign_tightness(spec: &CampaignSpec) -> Result<CampaignReport> {
    let Campaign::Tightness {
        r,
        ref pattern,
        ref n_values,
    } = spec.campaign
    else {
        return Err(Error::InvalidParameter("not a tightness campaign".into()));
    };
    let f = profile(spec, pattern)?;
    if f.chi != r + 1 {
        return Err(Error::InvalidParameter(format!(
            "pattern {pattern} has chromatic number {}, expected {}",
            f.chi,
            r + 1
        )));
    }
    f.require_color_critical()?;
    let alpha = crate::counting::alpha_exact(&f)?;
    let alpha_f = num_traits::ToPrimitive::to_f64(&alpha).unwrap_or(f64::NAN);
    let half = (f.f as f64 - 2.0) / 2.0;
    let target = (2.0 * r as f64 / (r as f64 - 1.0)).powf(half) * alpha_f;
    let cfg = SpectralConfig::default();
    let limits = CountLimits {
        max_pattern_order: if spec.allow_large {
            usize::MAX
        } else {
            crate::counting::MAX_PATTERN_ORDER
        },
        ..CountLimits::default()
    };
    let mut records = Vec::new();
    for &n in n_values {
        if n % r != 0 {
            return Err(Error::NotDivisible { n, r });
        }
        let g = build_turan_plus_edge(n, r)?.graph;
        let m = g.m();
        let rho = spectral_radius(&g, &cfg)?.rho;
        let bound = ((1.0 - 1.0 / r as f64) * 2.0 * m as f64).sqrt();
        let rho_turan = spectral_radius(&build_turan(n, r)?.graph, &cfg)?.rho;
        let copies = count_copies_with(&g, &f, &limits)?;
        let c = c_exact(n, &f)?;
        let ratio = copies as f64 / (m as f64).powf(half);
        let identity = num_bigint::BigInt::from(copies) == c;
        let margin = rho - bound;
        let strict = margin > 0.0;
        records.push(Record {
            id: format!("n{n}"),
            status: if strict && identity {
                RecordStatus::Pass
            } else {
                RecordStatus::Fail
            },
            margin: Some(margin),
            inputs: fields(json!({ "n": n, "r": r, "pattern": pattern })),
            values: fields(json!({
                "m": m,
                "rho": rho,
                "rho_turan": rho_turan,
                "bound": bound,
                "copies": copies,
                "c_exact": c.to_string(),
                "ratio": ratio,
                "ratio_target": target,
                "ratio_relative_gap": (ratio - target) / target,
            })),
            note: None,
        });
    }
    let notes = vec![format!(
        "ratio target (2r/(r-1))^((f-2)/2) * alpha_F with alpha_F = {}",
        crate::counting::fraction_string(&alpha)
    )];
    Ok(CampaignReport::assemble(spec, records, 0, notes))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeelCampaign {
    /// Number of instances meeting `rho >= sqrt(a m)` to evaluate.
    pub instances: usize,
    pub seed: u64,
    /// Seeds tried before giving up on reaching `instances`.
    pub max_seeds: u64,
    pub n_min: usize,
    pub n_max: usize,
    pub a: f64,
    pub epsilon: f64,
}

impl Default for PeelCampaign {
    fn default() -> Self {
        PeelCampaign {
            instances: 1000,
            seed: 0,
            max_seeds: 20_000,
            n_min: 10,
            n_max: 60,
            a: 1.2,
            epsilon: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeelInstance {
    pub seed: u64,
    /// `gnp` or `planted`.
    pub model: &'static str,
    /// Edge probability for `gnp`, number of classes for `planted`.
    pub param: f64,
    /// Vertices in a pendant path attached to the random core (0 = none).
    pub appendage: usize,
    pub graph: Graph,
}

/// Random instance for seed `seed`: half `G(n, p)` with `p` in {0.3, 0.5, 0.8},
/// half a complete `r`-partite graph (`r` in {3, 4, 5}) with each pair flipped
/// with probability 0.05. Half of all instances also get a pendant path of 2 to
/// 6 vertices, so that light edges exist. Total order lies in `n_min..=n_max`.
pub fn generate_peel_instance(seed: u64, n_min: usize, n_max: usize) -> PeelInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let appendage = if rng.gen_bool(0.5) {
        rng.gen_range(2..=6)
    } else {
        0
    };
    let core = rng
        .gen_range(n_min.saturating_sub(appendage).max(2)..=n_max.saturating_sub(appendage).max(2));
    let mut edges = Vec::new();
    let (model, param) = if rng.gen_bool(0.5) {
        let p = [0.3, 0.5, 0.8][rng.gen_range(0..3)];
        for u in 0..core {
            for v in u + 1..core {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        ("gnp", p)
    } else {
        let r = rng.gen_range(3..=5);
        let class: Vec<usize> = (0..core).map(|_| rng.gen_range(0..r)).collect();
        for u in 0..core {
            for v in u + 1..core {
                if (class[u] != class[v]) != rng.gen_bool(0.05) {
                    edges.push((u, v));
                }
            }
        }
        ("planted", r as f64)
    };
    if appendage > 0 {
        let anchor = rng.gen_range(0..core);
        edges.push((anchor, core));
        for i in 1..appendage {
            edges.push((core + i - 1, core + i));
        }
    }
    PeelInstance {
        seed,
        model,
        param,
        appendage,
        graph: Graph::new(core + appendage, edges).expect("generated pairs are valid"),
    }
}

fn evaluate_peel_instance(
    inst: &PeelInstance,
    a: f64,
    epsilon: f64,
    cfg: &SpectralConfig,
) -> Option<Record> {
    let g = &inst.graph;
    let m = g.m();
    if m == 0 {
        return None;
    }
    let inputs = fields(json!({
        "seed": inst.seed,
        "model": inst.model,
        "param": inst.param,
        "appendage": inst.appendage,
        "n": g.n(),
    }));
    let trace = match peel(g, epsilon, cfg) {
        Ok(t) => t,
        Err(e) => {
            return Some(Record {
                id: format!("seed-{}", inst.seed),
                status: RecordStatus::Fail,
                margin: None,
                inputs,
                values: fields(json!({ "m": m })),
                note: Some(format!("peeling failed: {e}")),
            })
        }
    };
    let report = check_peel_bounds(&trace, a);
    if !report.hypothesis.is_met() {
        return None;
    }
    let mut holds = report.holds();
    let mut note = report.first_violation.as_ref().map(|v| {
        format!(
            "violation at step {}: {:?} lhs {} rhs {}",
            v.step, v.bound, v.lhs, v.rhs
        )
    });
    let mut iii_checked = false;
    let mut iii = serde_json::Value::Null;
    if trace.terminal_reason == TerminalReason::NoLightEdges && a > 1.0 {
        let bounds = check_terminal_bounds(&trace.terminal, &trace.terminal_spectral, a);
        if bounds.hypothesis.is_met() {
            iii_checked = true;
            if !bounds.all_hold() {
                holds = false;
                note.get_or_insert_with(|| {
                    "bounds on the light-edge-free terminal graph fail".into()
                });
            }
        } else {
            note.get_or_insert_with(|| {
                format!("terminal bounds not evaluated: {:?}", bounds.hypothesis)
            });
        }
        iii = serde_json::to_value(&bounds).unwrap_or_default();
    }
    let margins = [
        report.min_margin_radius,
        report.min_margin_phi,
        report.min_margin_step,
    ];
    let margin = margins
        .iter()
        .flatten()
        .copied()
        .fold(None, |acc: Option<f64>, x| {
            Some(acc.map_or(x, |y| y.min(x)))
        });
    Some(Record {
        id: format!("seed-{}", inst.seed),
        status: if holds {
            RecordStatus::Pass
        } else {
            RecordStatus::Fail
        },
        margin,
        inputs,
        values: fields(json!({
            "m": m,
            "rho": trace.steps[0].rho,
            "steps": trace.steps.len(),
            "removed": trace.steps.len() - 1,
            "terminal_reason": trace.terminal_reason,
            "min_margin_radius": report.min_margin_radius,
            "min_margin_phi": report.min_margin_phi,
            "min_margin_step": report.min_margin_step,
            "terminal_checked": iii_checked,
            "terminal_bounds": iii,
        })),
        note,
    })
}

/// Peels seeded random graphs with `rho >= sqrt(a m)` and checks the radius,
/// `Phi`-gain and step bounds along every trace, plus the entry, order and
/// degree bounds on light-edge-free terminal graphs.
pub fn campaign_peel_properties(spec: &CampaignSpec) -> Result<CampaignReport> {
    let Campaign::PeelProperties(ref p) = spec.campaign else {
        return Err(Error::InvalidParameter(
            "not a peel_properties campaign".into(),
        ));
    };
    if !(0.81..=2.0).contains(&p.a) {
        return Err(Error::InvalidParameter(format!(
            "a = {} outside [0.81, 2]",
            p.a
        )));
    }
    if !(p.epsilon > 0.0 && p.epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {} outside (0, 1)",
            p.epsilon
        )));
    }
    if p.n_min < 2 || p.n_min > p.n_max {
        return Err(Error::InvalidParameter("need 2 <= n_min <= n_max".into()));
    }
    let cfg = SpectralConfig::default();
    let mut records = Vec::new();
    let mut skipped = 0;
    let mut next = p.seed;
    let end = p.seed.saturating_add(p.max_seeds);
    const BATCH: u64 = 64;
    while records.len() < p.instances && next < end {
        let hi = (next + BATCH).min(end);
        let batch: Vec<Option<Record>> = (next..hi)
            .into_par_iter()
            .map(|s| {
                let inst = generate_peel_instance(s, p.n_min, p.n_max);
                evaluate_peel_instance(&inst, p.a, p.epsilon, &cfg)
            })
            .collect();
        for (s, r) in (next..hi).zip(batch) {
            if records.len() == p.instances {
                break;
            }
            match r {
                Some(r) => records.push(r),
                None => skipped += 1,
            }
            next = s + 1;
        }
    }
    let mut notes = vec![format!(
        "seeds {}..{} examined; {} met the hypothesis, {} skipped",
        p.seed,
        next,
        records.len(),
        skipped
    )];
    let short = records.len() < p.instances;
    if short {
        notes.push(format!(
            "only {} of {} requested instances met the hypothesis",
            records.len(),
            p.instances
        ));
    }
    let mut report = CampaignReport::assemble(spec, records, skipped, notes);
    // too few instances is a failed run, not a vacuous pass
    report.summary.pass &= !short;
    Ok(report)
}

/// For each `n` and `q`, the minimum of `N_F(G)` over all `n`-vertex graphs with
/// `e(T_{n,r}) + q` edges, against `q c(n, F)`. Shortfalls are findings.
pub fn campaign_mubayi_sweep(spec: &CampaignSpec) -> Result<CampaignReport> {
    let Campaign::MubayiSweep {
        r,
        ref pattern,
        ref n_values,
        ref q_values,
    } = spec.campaign
    else {
        return Err(Error::InvalidParameter(
            "not a mubayi_sweep campaign".into(),
        ));
    };
    let f = profile(spec, pattern)?;
    if f.chi != r + 1 {
        return Err(Error::InvalidParameter(format!(
            "pattern {pattern} has chromatic number {}, expected {}",
            f.chi,
            r + 1
        )));
    }
    for &n in n_values {
        if n > MUBAYI_MAX_N && !spec.allow_large {
            return Err(Error::Guardrail(format!(
                "sweep limited to n <= {MUBAYI_MAX_N}, got {n}"
            )));
        }
    }
    for &q in q_values {
        if q > MUBAYI_MAX_Q && !spec.allow_large {
            return Err(Error::Guardrail(format!(
                "sweep limited to q <= {MUBAYI_MAX_Q}, got {q}"
            )));
        }
    }
    let guard = if spec.allow_large {
        Guardrails::unrestricted()
    } else {
        Guardrails::default()
    };
    let mut records = Vec::new();
    let mut notes = Vec::new();
    for &n in n_values {
        let turan_edges = build_turan(n, r)?.graph.m();
        let pairs = n * (n - 1) / 2;
        let c = c_bruteforce(n, &f)?;
        // graphs with e edges are complements of graphs with pairs - e edges
        let wanted: Vec<(usize, usize)> = q_values
            .iter()
            .filter(|&&q| turan_edges + q <= pairs)
            .map(|&q| (q, pairs - turan_edges - q))
            .collect();
        let Some(deepest) = wanted.iter().map(|w| w.1).max() else {
            continue;
        };
        let levels = enumerate_levels(n, deepest, &guard)?;
        for &(q, comp_m) in &wanted {
            let counted: Vec<(u64, Graph)> = levels[comp_m]
                .par_iter()
                .map(|h| {
                    let g = Graph::new(n, h.edges().iter().copied())?.complement();
                    Ok((count_copies(&g, &f)?, g))
                })
                .collect::<Result<_>>()?;
            let (min, argmin) = counted
                .iter()
                .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
                .map(|(k, g)| (*k, g.clone()))
                .expect("some graph has the requested edge count");
            let bound = q as u64 * c;
            records.push(Record {
                id: format!("n{n}-q{q}"),
                status: if min >= bound {
                    RecordStatus::Pass
                } else {
                    RecordStatus::Finding
                },
                margin: Some(min as f64 - bound as f64),
                inputs: fields(json!({ "n": n, "q": q, "r": r, "pattern": pattern })),
                values: fields(json!({
                    "edges": turan_edges + q,
                    "graphs": counted.len(),
                    "min_copies": min,
                    "c": c,
                    "bound": bound,
                    "argmin_graph6": g6(&argmin),
                })),
                note: None,
            });
        }
        notes.push(format!("n = {n}: e(T_n,r) = {turan_edges}, c(n, F) = {c}"));
    }
    Ok(CampaignReport::assemble(spec, records, 0, notes))
}
