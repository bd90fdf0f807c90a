//! Command dispatch: every CLI subcommand maps to an engine computation and
//! fills a deterministic report.

use std::collections::BTreeMap;

use ahmd_core::branched::cuntz_mean_dimension_sequence;
use ahmd_core::capacity::{ocap_closed_set, ocap_element, sbp_probe, sbrp_probe, svt_probe, CapacityReport};
use ahmd_core::cover::refinement_dimension;
use ahmd_core::nerve::{nerve, subordinate_partition};
use ahmd_core::rat::{parse_rat, rat, Rat};
use ahmd_core::simplicial::PLFunction;
use ahmd_core::system::mean_dimension_sequence;
use ahmd_core::variation::variation_mean_dimension_sequence;

use crate::description::SystemDescription;
use crate::report::{
    rat_string, CertificateDump, ComplexDump, ConfigEcho, Report, ResultEntry, SeqEntry,
    StageEntry,
};
use crate::CliError;

/// Resolved command configuration (defaults already applied).
#[derive(Clone, Debug)]
pub struct Config {
    pub system_path: String,
    pub level: usize,
    pub budget: u64,
    pub stage: Option<usize>,
    pub epsilon: Option<Rat>,
    pub radius: usize,
    pub block: Option<usize>,
    pub cover: Option<String>,
    pub trace: Option<String>,
    pub closed_set: Option<String>,
    pub open_set: Option<String>,
    pub family: Option<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            system_path: String::new(),
            level: 1,
            budget: 1_000_000,
            stage: None,
            epsilon: None,
            radius: 1,
            block: None,
            cover: None,
            trace: None,
            closed_set: None,
            open_set: None,
            family: None,
        }
    }
}

impl Config {
    fn echo(&self, selectors: BTreeMap<String, String>) -> ConfigEcho {
        ConfigEcho {
            system: self.system_path.clone(),
            level: self.level,
            budget: self.budget,
            stage: self.stage,
            epsilon: self.epsilon.as_ref().map(rat_string),
            radius: self.radius,
            selectors,
        }
    }

    fn last_stage(&self, desc: &SystemDescription) -> usize {
        self.stage.unwrap_or(desc.system.stage_count() - 1)
    }

    fn need_epsilon(&self) -> Result<Rat, CliError> {
        self.epsilon
            .clone()
            .ok_or_else(|| CliError::validation("--epsilon is required for this command".into()))
    }
}

pub fn parse_epsilon(text: &str) -> Result<Rat, CliError> {
    parse_rat(text)
        .filter(|r| r > &ahmd_core::rat::rat_zero())
        .ok_or_else(|| CliError::validation(format!("--epsilon: not a positive rational: {text}")))
}

fn named_cover<'a>(
    desc: &'a SystemDescription,
    cfg: &'a Config,
) -> Result<(&'a str, usize, &'a [ahmd_core::cover::Cover]), CliError> {
    let name = cfg
        .cover
        .as_deref()
        .ok_or_else(|| CliError::validation("--cover is required for this command".into()))?;
    let (stage, covers) = desc
        .covers
        .get(name)
        .ok_or_else(|| CliError::validation(format!("unknown cover {name:?}")))?;
    Ok((name, *stage, covers))
}

fn selectors_of(cfg: &Config) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    for (key, v) in [
        ("cover", &cfg.cover),
        ("trace", &cfg.trace),
        ("closed_set", &cfg.closed_set),
        ("open_set", &cfg.open_set),
        ("family", &cfg.family),
    ] {
        if let Some(v) = v {
            m.insert(key.to_string(), v.clone());
        }
    }
    if let Some(b) = cfg.block {
        m.insert("block".to_string(), b.to_string());
    }
    m
}

fn capacity_entry(source: &str, of: &str, report: &CapacityReport) -> ResultEntry {
    let entries: Vec<SeqEntry> = report
        .per_stage
        .iter()
        .flat_map(|s| {
            s.per_block.iter().enumerate().map(move |(k, v)| SeqEntry {
                stage: s.stage,
                block: k,
                value: rat_string(v),
                exact: true,
            })
        })
        .collect();
    let stage_values: Vec<StageEntry> = report
        .per_stage
        .iter()
        .map(|s| StageEntry { stage: s.stage, value: rat_string(&s.max), exact: true })
        .collect();
    ResultEntry::Capacity {
        source: source.to_string(),
        of: of.to_string(),
        entries,
        stage_values,
        monotone_max: report.monotone_max,
        limit_estimate: rat_string(&report.limit_estimate),
    }
}

fn dim_cover_entries(
    desc: &SystemDescription,
    cfg: &Config,
) -> Result<Vec<ResultEntry>, CliError> {
    let (name, stage, covers) = named_cover(desc, cfg)?;
    let mut out = Vec::new();
    for (k, cover) in covers.iter().enumerate() {
        let r = refinement_dimension(cover, cfg.level, cfg.budget)?;
        r.certificate
            .verify(cover)
            .map_err(|e| CliError::internal(format!("certificate failed recheck: {e}")))?;
        out.push(ResultEntry::Refinement {
            cover: name.to_string(),
            stage,
            block: k,
            value: r.value,
            exact: r.exact,
            certificate: CertificateDump::from_certificate(&r.certificate),
        });
    }
    Ok(out)
}

fn mean_dim_entries(desc: &SystemDescription, cfg: &Config) -> Result<Vec<ResultEntry>, CliError> {
    let (name, stage, covers) = named_cover(desc, cfg)?;
    let upto = cfg.last_stage(desc).max(stage);
    let est = mean_dimension_sequence(&desc.system, stage, covers, upto, cfg.level, cfg.budget)?;
    let entries: Vec<SeqEntry> = est
        .values
        .iter()
        .flat_map(|s| {
            s.per_block.iter().map(move |b| SeqEntry {
                stage: s.stage,
                block: b.block,
                value: rat_string(&b.value),
                exact: b.exact,
            })
        })
        .collect();
    let stage_values: Vec<StageEntry> = est
        .values
        .iter()
        .map(|s| StageEntry { stage: s.stage, value: rat_string(&s.value), exact: s.exact })
        .collect();
    Ok(vec![ResultEntry::Sequence {
        name: "mean-dim".to_string(),
        source: name.to_string(),
        entries,
        stage_values,
    }])
}

fn ocap_entries(desc: &SystemDescription, cfg: &Config) -> Result<Vec<ResultEntry>, CliError> {
    match (&cfg.trace, &cfg.closed_set) {
        (Some(tname), None) => {
            let trace = desc
                .traces
                .get(tname)
                .ok_or_else(|| CliError::validation(format!("unknown trace {tname:?}")))?;
            let upto = cfg.last_stage(desc).max(trace.stage);
            let report = ocap_element(&desc.system, trace, upto)?;
            Ok(vec![capacity_entry(tname, "ocap-element", &report)])
        }
        (None, Some(ename)) => {
            let (stage, block, set) = desc
                .closed_sets
                .get(ename)
                .ok_or_else(|| CliError::validation(format!("unknown closed set {ename:?}")))?;
            let upto = cfg.last_stage(desc).max(*stage);
            let report = ocap_closed_set(&desc.system, *stage, *block, set, upto)?;
            Ok(vec![capacity_entry(ename, "ocap-closed-set", &report)])
        }
        _ => Err(CliError::validation(
            "ocap needs exactly one of --trace / --closed-set".into(),
        )),
    }
}

fn svt_entries(desc: &SystemDescription, cfg: &Config) -> Result<Vec<ResultEntry>, CliError> {
    let epsilon = cfg.need_epsilon()?;
    let tname = cfg
        .trace
        .as_deref()
        .ok_or_else(|| CliError::validation("--trace is required for svt".into()))?;
    let trace = desc
        .traces
        .get(tname)
        .ok_or_else(|| CliError::validation(format!("unknown trace {tname:?}")))?;
    let stage = trace.stage;
    let profiles: Vec<PLFunction> = desc
        .system
        .blocks(stage)
        .iter()
        .enumerate()
        .map(|(l, b)| {
            if l == trace.block {
                trace.profile.clone()
            } else {
                PLFunction::constant(b.space.clone(), ahmd_core::rat::rat_zero())
            }
        })
        .collect();
    let upto = cfg.last_stage(desc).max(stage);
    let r = svt_probe(&desc.system, stage, &profiles, upto, &epsilon)?;
    let values: Vec<StageEntry> = r
        .values
        .iter()
        .enumerate()
        .map(|(o, v)| StageEntry { stage: stage + o, value: rat_string(v), exact: true })
        .collect();
    Ok(vec![ResultEntry::Svt {
        trace: tname.to_string(),
        epsilon: rat_string(&epsilon),
        satisfied_by_stage: r.satisfied_by_stage,
        values,
    }])
}

fn sbp_entries(desc: &SystemDescription, cfg: &Config) -> Result<Vec<ResultEntry>, CliError> {
    let epsilon = cfg.need_epsilon()?;
    let name = cfg
        .open_set
        .as_deref()
        .ok_or_else(|| CliError::validation("--open-set is required for sbp".into()))?;
    let (stage, block, set) = desc
        .open_sets
        .get(name)
        .ok_or_else(|| CliError::validation(format!("unknown open set {name:?}")))?;
    let upto = cfg.last_stage(desc).max(*stage);
    let r = sbp_probe(&desc.system, *stage, *block, set, upto, &epsilon, cfg.budget)?;
    Ok(vec![ResultEntry::Sbp {
        open_set: name.to_string(),
        epsilon: rat_string(&epsilon),
        found: r.found.is_some(),
        best_value: r.best_value.as_ref().map(rat_string),
        best_set_simplices: r.best_set.as_ref().map(|s| {
            s.members()
                .iter()
                .map(|id| s.complex().simplex(id).to_vec())
                .collect()
        }),
        candidates_tested: r.candidates_tested,
    }])
}

fn sbrp_entries(desc: &SystemDescription, cfg: &Config) -> Result<Vec<ResultEntry>, CliError> {
    let epsilon = cfg.need_epsilon()?;
    let (name, stage, covers) = named_cover(desc, cfg)?;
    let j = cfg.last_stage(desc).max(stage);
    let k = cfg.block.unwrap_or(0);
    desc.system.block(j, k)?;
    let mut out = Vec::new();
    for (l, cover) in covers.iter().enumerate() {
        let r = sbrp_probe(
            &desc.system,
            stage,
            l,
            cover,
            &epsilon,
            j,
            k,
            cfg.radius,
            cfg.budget,
        )?;
        out.push(ResultEntry::Sbrp {
            cover: name.to_string(),
            source_block: l,
            epsilon: rat_string(&epsilon),
            stage: j,
            block: k,
            radius: cfg.radius,
            found: r.refinement.is_some(),
            best_value: r.best_value.as_ref().map(rat_string),
            candidates_tested: r.candidates_tested,
        });
    }
    Ok(out)
}

fn cuntz_entries(desc: &SystemDescription, cfg: &Config) -> Result<Vec<ResultEntry>, CliError> {
    let (name, stage, covers) = named_cover(desc, cfg)?;
    let upto = cfg.last_stage(desc);
    if upto <= stage {
        return Err(CliError::validation(
            "cuntz-dim needs a truncation stage beyond the cover's stage".into(),
        ));
    }
    let seq = cuntz_mean_dimension_sequence(&desc.system, stage, covers, upto, cfg.level, cfg.budget)?;
    let entries: Vec<SeqEntry> = seq
        .iter()
        .flat_map(|s| {
            s.per_block.iter().enumerate().map(move |(k, v)| SeqEntry {
                stage: s.stage,
                block: k,
                value: rat_string(v),
                exact: s.exact,
            })
        })
        .collect();
    let stage_values: Vec<StageEntry> = seq
        .iter()
        .map(|s| StageEntry { stage: s.stage, value: rat_string(&s.value), exact: s.exact })
        .collect();
    Ok(vec![ResultEntry::Sequence {
        name: "cuntz-dim".to_string(),
        source: name.to_string(),
        entries,
        stage_values,
    }])
}

fn var_dim_entries(desc: &SystemDescription, cfg: &Config) -> Result<Vec<ResultEntry>, CliError> {
    let epsilon = cfg.need_epsilon()?;
    let name = cfg
        .family
        .as_deref()
        .ok_or_else(|| CliError::validation("--family is required for var-dim".into()))?;
    let (stage, families) = desc
        .families
        .get(name)
        .ok_or_else(|| CliError::validation(format!("unknown family {name:?}")))?;
    let upto = cfg.last_stage(desc).max(*stage);
    let seq = variation_mean_dimension_sequence(
        &desc.system,
        *stage,
        families,
        &epsilon,
        upto,
        cfg.level,
        cfg.budget,
    )?;
    let entries: Vec<SeqEntry> = seq
        .iter()
        .flat_map(|s| {
            s.per_block.iter().enumerate().map(move |(k, v)| SeqEntry {
                stage: s.stage,
                block: k,
                value: rat_string(v),
                exact: s.exact,
            })
        })
        .collect();
    let stage_values: Vec<StageEntry> = seq
        .iter()
        .map(|s| StageEntry { stage: s.stage, value: rat_string(&s.value), exact: s.exact })
        .collect();
    Ok(vec![ResultEntry::Sequence {
        name: "var-dim".to_string(),
        source: name.to_string(),
        entries,
        stage_values,
    }])
}

fn nerve_entries(desc: &SystemDescription, cfg: &Config) -> Result<Vec<ResultEntry>, CliError> {
    let (name, stage, covers) = named_cover(desc, cfg)?;
    let mut out = Vec::new();
    for (k, cover) in covers.iter().enumerate() {
        let nv = nerve(cover);
        let p = subordinate_partition(cover, cfg.level)?;
        out.push(ResultEntry::Nerve {
            cover: name.to_string(),
            stage,
            block: k,
            dimension: nv.dimension,
            ord: ahmd_core::cover::ord(cover),
            complex: ComplexDump::new(format!("{name}-nerve-{stage}-{k}"), &nv.nerve),
            partition_level: cfg.level,
            anchors: p.anchors().to_vec(),
        });
    }
    Ok(out)
}

fn report_all_entries(desc: &SystemDescription, cfg: &Config) -> Vec<ResultEntry> {
    let mut out = Vec::new();
    let epsilon = cfg.epsilon.clone().unwrap_or_else(|| rat(1, 10));
    for name in desc.covers.keys() {
        let mut c = cfg.clone();
        c.cover = Some(name.clone());
        for (label, f) in [
            ("dim-cover", dim_cover_entries as fn(&SystemDescription, &Config) -> _),
            ("mean-dim", mean_dim_entries),
            ("nerve", nerve_entries),
        ] {
            match f(desc, &c) {
                Ok(entries) => out.extend(entries),
                Err(e) => out.push(ResultEntry::Skipped {
                    item: format!("{label} {name}"),
                    reason: e.to_string(),
                }),
            }
        }
        // cuntz only when every leg carries a projection class
        let classed = desc
            .system
            .maps()
            .iter()
            .all(|m| m.legs.iter().flatten().flatten().all(|l| l.class.is_some()));
        if classed && desc.system.stage_count() > desc.covers[name].0 + 1 {
            match cuntz_entries(desc, &c) {
                Ok(entries) => out.extend(entries),
                Err(e) => out.push(ResultEntry::Skipped {
                    item: format!("cuntz-dim {name}"),
                    reason: e.to_string(),
                }),
            }
        }
    }
    for name in desc.traces.keys() {
        let mut c = cfg.clone();
        c.trace = Some(name.clone());
        c.epsilon = Some(epsilon.clone());
        for (label, f) in [
            ("ocap", ocap_entries as fn(&SystemDescription, &Config) -> _),
            ("svt", svt_entries),
        ] {
            match f(desc, &c) {
                Ok(entries) => out.extend(entries),
                Err(e) => out.push(ResultEntry::Skipped {
                    item: format!("{label} {name}"),
                    reason: e.to_string(),
                }),
            }
        }
    }
    for name in desc.closed_sets.keys() {
        let mut c = cfg.clone();
        c.closed_set = Some(name.clone());
        match ocap_entries(desc, &c) {
            Ok(entries) => out.extend(entries),
            Err(e) => out.push(ResultEntry::Skipped {
                item: format!("ocap {name}"),
                reason: e.to_string(),
            }),
        }
    }
    for name in desc.open_sets.keys() {
        let mut c = cfg.clone();
        c.open_set = Some(name.clone());
        c.epsilon = Some(epsilon.clone());
        match sbp_entries(desc, &c) {
            Ok(entries) => out.extend(entries),
            Err(e) => out.push(ResultEntry::Skipped {
                item: format!("sbp {name}"),
                reason: e.to_string(),
            }),
        }
    }
    for name in desc.families.keys() {
        let mut c = cfg.clone();
        c.family = Some(name.clone());
        c.epsilon = Some(epsilon.clone());
        match var_dim_entries(desc, &c) {
            Ok(entries) => out.extend(entries),
            Err(e) => out.push(ResultEntry::Skipped {
                item: format!("var-dim {name}"),
                reason: e.to_string(),
            }),
        }
    }
    out
}

/// Runs one command against a loaded description.
pub fn run(command: &str, desc: &SystemDescription, cfg: &Config) -> Result<Report, CliError> {
    let results = match command {
        "dim-cover" => dim_cover_entries(desc, cfg)?,
        "mean-dim" => mean_dim_entries(desc, cfg)?,
        "ocap" => ocap_entries(desc, cfg)?,
        "svt" => svt_entries(desc, cfg)?,
        "sbp" => sbp_entries(desc, cfg)?,
        "sbrp" => sbrp_entries(desc, cfg)?,
        "cuntz-dim" => cuntz_entries(desc, cfg)?,
        "var-dim" => var_dim_entries(desc, cfg)?,
        "nerve" => nerve_entries(desc, cfg)?,
        "report-all" => report_all_entries(desc, cfg),
        other => return Err(CliError::validation(format!("unknown command {other:?}"))),
    };
    Ok(Report {
        command: command.to_string(),
        config: cfg.echo(selectors_of(cfg)),
        results,
    })
}
