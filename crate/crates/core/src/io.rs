//! JSON documents for diagrams and fork scripts, and DOT export.
//!
//! All JSON is written with sorted keys through `serde_json::Value`, so
//! saving the same diagram twice yields identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::PlanarDiagram;
use crate::lattice::DiagramError;
use crate::rect::ForkScript;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid document: {0}")]
    Schema(String),
    #[error("invalid diagram: {0}")]
    Validation(DiagramError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDoc {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramDocument {
    pub name: String,
    pub elements: Vec<ElementDoc>,
    pub upper_covers: BTreeMap<String, Vec<usize>>,
}

impl DiagramDocument {
    pub fn from_diagram(d: &PlanarDiagram, name: &str) -> Self {
        DiagramDocument {
            name: name.to_owned(),
            elements: (0..d.len())
                .map(|id| ElementDoc {
                    id,
                    label: d.label(id).map(str::to_owned),
                })
                .collect(),
            upper_covers: (0..d.len()).map(|x| (x.to_string(), d.upper(x).to_vec())).collect(),
        }
    }

    /// Element ids are mapped onto `0..n` in ascending order.
    pub fn to_diagram(&self) -> Result<PlanarDiagram, IoError> {
        let ids: BTreeSet<usize> = self.elements.iter().map(|e| e.id).collect();
        if ids.len() != self.elements.len() {
            return Err(IoError::Schema("duplicate element id".into()));
        }
        let original: Vec<usize> = ids.iter().copied().collect();
        let dense = |id: usize| original.binary_search(&id).ok();

        let n = original.len();
        let mut upper = vec![Vec::new(); n];
        let mut labels = vec![None; n];
        for e in &self.elements {
            labels[dense(e.id).expect("collected")] = e.label.clone();
        }
        for (key, targets) in &self.upper_covers {
            let id: usize = key
                .parse()
                .map_err(|_| IoError::Schema(format!("cover key {key:?} is not an element id")))?;
            let x = dense(id).ok_or_else(|| IoError::Schema(format!("cover key {id} is not a listed element")))?;
            for &t in targets {
                let y =
                    dense(t).ok_or_else(|| IoError::Schema(format!("cover {id} -> {t} names an unlisted element")))?;
                upper[x].push(y);
            }
        }
        PlanarDiagram::build_labelled(upper, labels)
            .map_err(|e| IoError::Validation(e.relabel(|x| original.get(x).copied().unwrap_or(x))))
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serialisable");
    let mut s = serde_json::to_string_pretty(&v).expect("serialisable");
    s.push('\n');
    s
}

pub fn diagram_to_json(d: &PlanarDiagram, name: &str) -> String {
    pretty(&DiagramDocument::from_diagram(d, name))
}

pub fn diagram_from_json(text: &str) -> Result<(PlanarDiagram, String), IoError> {
    let doc: DiagramDocument = serde_json::from_str(text)?;
    let d = doc.to_diagram()?;
    Ok((d, doc.name))
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| IoError::Io {
            path: dir.to_owned(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn load(path: &Path) -> Result<(PlanarDiagram, String), IoError> {
    diagram_from_json(&read(path)?)
}

pub fn save(d: &PlanarDiagram, name: &str, path: &Path) -> Result<(), IoError> {
    write_text(path, &diagram_to_json(d, name))
}

pub fn script_to_json(s: &ForkScript) -> String {
    pretty(s)
}

pub fn load_script(path: &Path) -> Result<ForkScript, IoError> {
    Ok(serde_json::from_str(&read(path)?)?)
}

pub fn json<T: Serialize>(value: &T) -> String {
    pretty(value)
}

#[derive(Clone, Debug, Default)]
pub struct DotOptions {
    pub name: Option<String>,
    pub show_labels: bool,
}

/// Ranked Hasse diagram, bottom rank first. Nodes within a rank appear
/// left to right; edges follow the upper cover lists.
pub fn render_dot(d: &PlanarDiagram, opts: &DotOptions) -> String {
    let name = opts.name.as_deref().unwrap_or("lattice");
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
    out.push_str("  rankdir=BT;\n  node [shape=circle];\n");

    let max_h = d.height(d.top());
    for h in 0..=max_h {
        let rank: Vec<usize> = (0..d.len()).filter(|&x| d.height(x) == h).collect();
        let ordered = d.left_to_right(&rank);
        out.push_str("  { rank=same;");
        for x in &ordered {
            let _ = write!(out, " n{x};");
        }
        out.push_str(" }\n");
        for &x in &ordered {
            let label = match (opts.show_labels, d.label(x)) {
                (true, Some(l)) => l.to_owned(),
                _ => x.to_string(),
            };
            let _ = writeln!(out, "  n{x} [label=\"{}\"];", escape(&label));
        }
    }
    for (x, y) in d.cover_pairs() {
        let _ = writeln!(out, "  n{x} -> n{y};");
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
