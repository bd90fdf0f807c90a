//! Report data model: everything a command computed, serialized with stable
//! field order so identical runs produce identical bytes.

use std::collections::BTreeMap;

use serde::Serialize;

use ahmd_core::cover::RefinementCertificate;
use ahmd_core::rat::{format_rat, Rat};
use ahmd_core::simplicial::Complex;

#[derive(Serialize, Clone, Debug)]
pub struct ConfigEcho {
    pub system: String,
    pub level: usize,
    pub budget: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    pub radius: usize,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub selectors: BTreeMap<String, String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub command: String,
    pub config: ConfigEcho,
    pub results: Vec<ResultEntry>,
}

#[derive(Serialize, Clone, Debug)]
pub struct CertificateDump {
    pub level: usize,
    pub achieved_order: usize,
    pub elements: Vec<CertificateElement>,
}

#[derive(Serialize, Clone, Debug)]
pub struct CertificateElement {
    pub witness: usize,
    pub simplices: Vec<Vec<u32>>,
}

impl CertificateDump {
    pub fn from_certificate(cert: &RefinementCertificate) -> CertificateDump {
        CertificateDump {
            level: cert.level,
            achieved_order: cert.achieved_order,
            elements: cert
                .shrinking
                .iter()
                .map(|(w, v)| CertificateElement {
                    witness: *w,
                    simplices: v
                        .members()
                        .iter()
                        .map(|s| v.complex().simplex(s).to_vec())
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct SeqEntry {
    pub stage: usize,
    pub block: usize,
    pub value: String,
    pub exact: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct StageEntry {
    pub stage: usize,
    pub value: String,
    pub exact: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct ComplexDump {
    pub name: String,
    pub vertex_count: u32,
    pub maximal_simplices: Vec<Vec<u32>>,
}

impl ComplexDump {
    pub fn new(name: String, c: &Complex) -> ComplexDump {
        ComplexDump {
            name,
            vertex_count: c.vertex_count(),
            maximal_simplices: c.maximal_simplices(),
        }
    }
}

#[derive(Serialize, Clone, Debug)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ResultEntry {
    Refinement {
        cover: String,
        stage: usize,
        block: usize,
        value: usize,
        exact: bool,
        certificate: CertificateDump,
    },
    Sequence {
        name: String,
        source: String,
        entries: Vec<SeqEntry>,
        stage_values: Vec<StageEntry>,
    },
    Capacity {
        source: String,
        of: String,
        entries: Vec<SeqEntry>,
        stage_values: Vec<StageEntry>,
        monotone_max: bool,
        limit_estimate: String,
    },
    Svt {
        trace: String,
        epsilon: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        satisfied_by_stage: Option<usize>,
        values: Vec<StageEntry>,
    },
    Sbp {
        open_set: String,
        epsilon: String,
        found: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        best_value: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        best_set_simplices: Option<Vec<Vec<u32>>>,
        candidates_tested: usize,
    },
    Sbrp {
        cover: String,
        source_block: usize,
        epsilon: String,
        stage: usize,
        block: usize,
        radius: usize,
        found: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        best_value: Option<String>,
        candidates_tested: u64,
    },
    Nerve {
        cover: String,
        stage: usize,
        block: usize,
        dimension: usize,
        ord: usize,
        complex: ComplexDump,
        partition_level: usize,
        anchors: Vec<Option<u32>>,
    },
    Skipped {
        item: String,
        reason: String,
    },
}

impl ResultEntry {
    /// Rows for the CSV companion file: (result kind, name, stage, block,
    /// value, exact).
    pub fn csv_rows(&self) -> Vec<(String, String, String, String, String, String)> {
        let fmt = |e: &SeqEntry, kind: &str, name: &str| {
            (
                kind.to_string(),
                name.to_string(),
                e.stage.to_string(),
                e.block.to_string(),
                e.value.clone(),
                e.exact.to_string(),
            )
        };
        match self {
            ResultEntry::Sequence { name, source, entries, .. } => entries
                .iter()
                .map(|e| fmt(e, name, source))
                .collect(),
            ResultEntry::Capacity { source, of, entries, .. } => entries
                .iter()
                .map(|e| fmt(e, of, source))
                .collect(),
            ResultEntry::Svt { trace, values, .. } => values
                .iter()
                .map(|v| {
                    (
                        "svt".to_string(),
                        trace.clone(),
                        v.stage.to_string(),
                        String::new(),
                        v.value.clone(),
                        v.exact.to_string(),
                    )
                })
                .collect(),
            ResultEntry::Refinement { cover, stage, block, value, exact, .. } => vec![(
                "dim-cover".to_string(),
                cover.clone(),
                stage.to_string(),
                block.to_string(),
                value.to_string(),
                exact.to_string(),
            )],
            _ => Vec::new(),
        }
    }
}

pub fn rat_string(r: &Rat) -> String {
    format_rat(r)
}

pub fn render_csv(report: &Report) -> String {
    let mut out = String::from("result,name,stage,block,value,exact\n");
    for entry in &report.results {
        for (a, b, c, d, e, f) in entry.csv_rows() {
            out.push_str(&format!("{a},{b},{c},{d},{e},{f}\n"));
        }
    }
    out
}

pub fn render_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("serializable report") + "\n"
}
