//! Input files.
//!
//! Quiver file: a JSON object `{"vertices": [ids], "cartan": [[..]] |
//! "arrows": [{"out": id, "inc": id}], "allow_loops": bool}` with exactly one
//! of `cartan` / `arrows`. Ids may be numbers or strings; order in
//! `vertices` fixes the internal indexing.
//!
//! Element file: a JSON array of `{"weight": [ints], "poly": "expr"}` in the
//! shared expression grammar. A whitespace-only file counts as the empty
//! list.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use ysh_core::expr;
use ysh_core::quiver::{DimVec, Quiver};
use ysh_core::shuffle::ShuffleElement;

use crate::report::QuiverInfo;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuiverFile {
    vertices: Vec<VertexId>,
    #[serde(default)]
    cartan: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    arrows: Option<Vec<ArrowEntry>>,
    #[serde(default)]
    allow_loops: bool,
}

#[derive(Deserialize, Clone, PartialEq, Debug)]
#[serde(untagged)]
enum VertexId {
    Num(u64),
    Name(String),
}

impl VertexId {
    fn label(&self) -> String {
        match self {
            VertexId::Num(k) => k.to_string(),
            VertexId::Name(s) => s.clone(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowEntry {
    out: VertexId,
    inc: VertexId,
}

#[derive(Debug)]
pub struct LoadedQuiver {
    pub quiver: Quiver,
    /// Display labels in index order.
    pub labels: Vec<String>,
    pub path: String,
    pub fingerprint: String,
    /// The matrix as given, when the file used `cartan`.
    pub cartan_input: Option<Vec<Vec<i64>>>,
}

pub fn load_quiver(path: &Path) -> Result<LoadedQuiver, String> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| format!("{shown}: {e}"))?;
    let file: QuiverFile = serde_json::from_str(&text).map_err(|e| format!("{shown}: {e}"))?;
    let n = file.vertices.len();
    if n == 0 {
        return Err(format!("{shown}: quiver needs at least one vertex"));
    }
    let labels: Vec<String> = file.vertices.iter().map(VertexId::label).collect();
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].contains(a) {
            return Err(format!("{shown}: duplicate vertex id {a:?}"));
        }
    }
    let quiver = match (&file.cartan, &file.arrows) {
        (Some(_), Some(_)) => {
            return Err(format!("{shown}: give cartan or arrows, not both"));
        }
        (None, None) => {
            return Err(format!("{shown}: need one of cartan or arrows"));
        }
        (Some(c), None) => {
            if file.allow_loops {
                return Err(format!("{shown}: allow_loops needs an explicit arrow list"));
            }
            if c.len() != n {
                return Err(format!(
                    "{shown}: cartan is {}x{} but there are {n} vertices",
                    c.len(),
                    c.first().map_or(0, Vec::len)
                ));
            }
            Quiver::from_cartan(c).map_err(|e| format!("{shown}: {e}"))?
        }
        (None, Some(entries)) => {
            let index_of = |id: &VertexId| {
                file.vertices.iter().position(|v| v == id).ok_or_else(|| {
                    format!("{shown}: arrow endpoint {:?} is not in vertices", id.label())
                })
            };
            let mut pairs = Vec::with_capacity(entries.len());
            for e in entries {
                pairs.push((index_of(&e.out)?, index_of(&e.inc)?));
            }
            Quiver::from_arrows(n, &pairs, file.allow_loops)
                .map_err(|e| format!("{shown}: {e}"))?
        }
    };
    let fingerprint = fingerprint_of(&quiver);
    Ok(LoadedQuiver {
        quiver,
        labels,
        path: shown,
        fingerprint,
        cartan_input: file.cartan,
    })
}

/// SHA-256 over a canonical structural form: vertex count, the sorted arrow
/// list with class weights, and the loop flag. Input order of arrows and the
/// cartan-vs-arrows choice do not change it.
pub fn fingerprint_of(q: &Quiver) -> String {
    let mut arrows: Vec<(usize, usize, i64)> =
        q.arrows().iter().map(|a| (a.out, a.inc, a.weight)).collect();
    arrows.sort_unstable();
    let mut canon = String::from("ysh-quiver/1;");
    let _ = write!(canon, "n={};arrows=", q.vertex_count());
    for (k, (o, c, w)) in arrows.iter().enumerate() {
        if k > 0 {
            canon.push(',');
        }
        let _ = write!(canon, "{o}>{c}:{w}");
    }
    let _ = write!(canon, ";loops={}", q.allow_loops());
    let digest = Sha256::digest(canon.as_bytes());
    let mut hex = String::with_capacity(64);
    for b in digest {
        let _ = write!(hex, "{b:02x}");
    }
    hex
}

pub fn quiver_info(lq: &LoadedQuiver) -> QuiverInfo {
    QuiverInfo {
        path: lq.path.clone(),
        fingerprint: lq.fingerprint.clone(),
        vertices: lq.labels.clone(),
        arrows: lq
            .quiver
            .arrows()
            .iter()
            .map(|a| format!("{}>{}", lq.labels[a.out], lq.labels[a.inc]))
            .collect(),
        allow_loops: lq.quiver.allow_loops(),
        warnings: lq.quiver.warnings().to_vec(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementEntry {
    weight: Vec<u32>,
    poly: String,
}

pub fn parse_element_file(path: &Path, n_vertices: usize) -> Result<Vec<ShuffleElement>, String> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| format!("{shown}: {e}"))?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let entries: Vec<ElementEntry> =
        serde_json::from_str(&text).map_err(|e| format!("{shown}: {e}"))?;
    let mut out = Vec::with_capacity(entries.len());
    for (k, entry) in entries.iter().enumerate() {
        if entry.weight.len() != n_vertices {
            return Err(format!(
                "{shown}: entry {k}: weight has {} entries, quiver has {n_vertices} vertices",
                entry.weight.len()
            ));
        }
        let poly = expr::parse_poly(&entry.poly)
            .map_err(|e| format!("{shown}: entry {k}: {e}"))?;
        let element = ShuffleElement::new(DimVec(entry.weight.clone()), poly)
            .map_err(|e| format!("{shown}: entry {k}: {e}"))?;
        out.push(element);
    }
    Ok(out)
}
