//! The line-oriented `.diagram` format.
//!
//! ```text
//! system Hunting
//! component Pilgrim pilgrim.compos
//! component G2 {
//!   component G2 variables actions events e4 *[ ]
//! }
//! morphism g1_pilgrim : G1 -> Pilgrim
//!   var l -> l
//!   action ld -> ld
//!   event e2 -> e2
//! environment Environment environment.compos
//! leg Pilgrim -> Environment
//!   var h -> h
//! ```
//!
//! Component paths are resolved by a [`SourceLoader`]. Every edge map must be
//! total on its source; legs are checked later, by cocone checking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use super::component::parse_component_unit;
use super::{DslError, SourceUnit, SyntaxError, Warning};
use crate::colimit::{Cocone, Diagram};
use crate::diagnostics::Sort;
use crate::model::{Component, ComponentMorphism, SignatureMorphism};

/// Resolves component paths mentioned in a diagram file.
pub trait SourceLoader {
    fn load(&self, path: &str) -> Result<String, String>;
}

/// Reads paths relative to a base directory.
#[derive(Debug, Clone)]
pub struct FsLoader {
    pub base: PathBuf,
}

impl FsLoader {
    pub fn new(base: impl Into<PathBuf>) -> Self {
        FsLoader { base: base.into() }
    }
}

impl SourceLoader for FsLoader {
    fn load(&self, path: &str) -> Result<String, String> {
        std::fs::read_to_string(self.base.join(path)).map_err(|e| e.to_string())
    }
}

/// In-memory files, keyed by path.
#[derive(Debug, Clone, Default)]
pub struct MapLoader(pub BTreeMap<String, String>);

impl MapLoader {
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        MapLoader(
            pairs
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
    }
}

impl SourceLoader for MapLoader {
    fn load(&self, path: &str) -> Result<String, String> {
        self.0
            .get(path)
            .cloned()
            .ok_or_else(|| "no such file".to_string())
    }
}

/// A resolved diagram plus the environment cocones declared alongside it.
#[derive(Debug, Clone)]
pub struct DiagramFile {
    pub diagram: Diagram,
    pub cocones: BTreeMap<String, Cocone>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug)]
struct Word<'a> {
    text: &'a str,
    col: usize,
}

#[derive(Debug)]
enum Source {
    Path(String),
    Inline(String, usize),
}

#[derive(Debug)]
struct Decl {
    name: String,
    source: Source,
    line: usize,
    col: usize,
}

#[derive(Debug)]
struct MapLine {
    sort: Sort,
    from: String,
    to: String,
    line: usize,
    from_col: usize,
    to_col: usize,
}

#[derive(Debug)]
struct MapBlock {
    /// Edge name, or the leg's node for cocone legs.
    name: String,
    name_col: usize,
    source: (String, usize),
    target: (String, usize),
    line: usize,
    maps: Vec<MapLine>,
}

fn words(line: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (i, c)) in line.char_indices().enumerate() {
        if c.is_whitespace() {
            if let Some((s, scol)) = start.take() {
                out.push(Word {
                    text: &line[s..i],
                    col: scol,
                });
            }
        } else if start.is_none() {
            start = Some((i, col + 1));
        }
    }
    if let Some((s, scol)) = start {
        out.push(Word {
            text: &line[s..],
            col: scol,
        });
    }
    out
}

fn strip_comment(line: &str) -> &str {
    let mut from = 0;
    while let Some(i) = line[from..].find("--") {
        let at = from + i;
        if line[at..].starts_with("-->") {
            from = at + 3;
            continue;
        }
        return &line[..at];
    }
    line
}

fn syntax(line: usize, col: usize, found: &str, expected: &[&str]) -> DslError {
    DslError::Syntax(SyntaxError {
        line,
        col,
        found: found.to_string(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    })
}

fn end_col(line: &str) -> usize {
    line.chars().count() + 1
}

/// Expects `NAME SEP NAME` (e.g. `Pilgrim -> Environment`) in `ws`.
fn arrow_pair<'a>(
    ws: &'a [Word<'a>],
    lineno: usize,
    raw: &str,
) -> Result<(&'a Word<'a>, &'a Word<'a>), DslError> {
    match ws {
        [a, arrow, b] if arrow.text == "->" => Ok((a, b)),
        [_, w, ..] if w.text != "->" => {
            Err(syntax(lineno, w.col, &format!("`{}`", w.text), &["`->`"]))
        }
        [_, _, _, extra, ..] => Err(syntax(
            lineno,
            extra.col,
            &format!("`{}`", extra.text),
            &["end of line"],
        )),
        _ => Err(syntax(
            lineno,
            end_col(raw),
            "end of line",
            &["name -> name"],
        )),
    }
}

/// Parses a diagram text, loading referenced components through `loader`.
pub fn parse_diagram(text: &str, loader: &dyn SourceLoader) -> Result<DiagramFile, DslError> {
    let mut system = None;
    let mut components: Vec<Decl> = Vec::new();
    let mut environments: Vec<Decl> = Vec::new();
    let mut morphisms: Vec<MapBlock> = Vec::new();
    let mut legs: Vec<MapBlock> = Vec::new();
    // which block map lines attach to: (is_leg, index)
    let mut current: Option<(bool, usize)> = None;

    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let lineno = i + 1;
        let raw = strip_comment(lines[i]);
        i += 1;
        let ws = words(raw);
        let Some(head) = ws.first() else { continue };
        match head.text {
            "system" => {
                let [_, name] = ws.as_slice() else {
                    return Err(syntax(
                        lineno,
                        ws.get(2).map_or(end_col(raw), |w| w.col),
                        "token",
                        &["system name"],
                    ));
                };
                system = Some(name.text.to_string());
                current = None;
            }
            "component" | "environment" => {
                let decl = match ws.as_slice() {
                    [_, name, brace] if brace.text == "{" => {
                        let start = i + 1;
                        let mut body = String::new();
                        loop {
                            let Some(l) = lines.get(i) else {
                                return Err(syntax(lines.len() + 1, 1, "end of input", &["`}`"]));
                            };
                            i += 1;
                            if l.trim() == "}" {
                                break;
                            }
                            body.push_str(l);
                            body.push('\n');
                        }
                        Decl {
                            name: name.text.to_string(),
                            source: Source::Inline(body, start),
                            line: lineno,
                            col: name.col,
                        }
                    }
                    [_, name, path] => Decl {
                        name: name.text.to_string(),
                        source: Source::Path(path.text.to_string()),
                        line: lineno,
                        col: name.col,
                    },
                    [_, _, _, extra, ..] => {
                        return Err(syntax(
                            lineno,
                            extra.col,
                            &format!("`{}`", extra.text),
                            &["end of line"],
                        ))
                    }
                    _ => {
                        return Err(syntax(
                            lineno,
                            end_col(raw),
                            "end of line",
                            &["name and path"],
                        ))
                    }
                };
                if head.text == "component" {
                    components.push(decl);
                } else {
                    environments.push(decl);
                }
                current = None;
            }
            "morphism" => {
                let (name, rest) = match ws.as_slice() {
                    [_, name, colon, rest @ ..] if colon.text == ":" => (name, rest),
                    [_, _, w, ..] => {
                        return Err(syntax(lineno, w.col, &format!("`{}`", w.text), &["`:`"]))
                    }
                    _ => return Err(syntax(lineno, end_col(raw), "end of line", &["edge name"])),
                };
                let (s, t) = arrow_pair(rest, lineno, raw)?;
                morphisms.push(MapBlock {
                    name: name.text.to_string(),
                    name_col: name.col,
                    source: (s.text.to_string(), s.col),
                    target: (t.text.to_string(), t.col),
                    line: lineno,
                    maps: Vec::new(),
                });
                current = Some((false, morphisms.len() - 1));
            }
            "leg" => {
                let (s, t) = arrow_pair(&ws[1..], lineno, raw)?;
                legs.push(MapBlock {
                    name: s.text.to_string(),
                    name_col: s.col,
                    source: (s.text.to_string(), s.col),
                    target: (t.text.to_string(), t.col),
                    line: lineno,
                    maps: Vec::new(),
                });
                current = Some((true, legs.len() - 1));
            }
            kw => {
                let Some(sort) = Sort::from_keyword(kw) else {
                    return Err(syntax(
                        lineno,
                        head.col,
                        &format!("`{kw}`"),
                        &[
                            "`system`",
                            "`component`",
                            "`morphism`",
                            "`environment`",
                            "`leg`",
                            "`var`",
                            "`action`",
                            "`event`",
                        ],
                    ));
                };
                let Some((is_leg, idx)) = current else {
                    return Err(syntax(
                        lineno,
                        head.col,
                        &format!("`{kw}`"),
                        &["`morphism` or `leg` before map lines"],
                    ));
                };
                let (from, to) = arrow_pair(&ws[1..], lineno, raw)?;
                let block = if is_leg {
                    &mut legs[idx]
                } else {
                    &mut morphisms[idx]
                };
                block.maps.push(MapLine {
                    sort,
                    from: from.text.to_string(),
                    to: to.text.to_string(),
                    line: lineno,
                    from_col: from.col,
                    to_col: to.col,
                });
            }
        }
    }

    let mut warnings = Vec::new();
    let mut diagram = Diagram::new(system.unwrap_or_else(|| "System".to_string()));
    for decl in &components {
        let c = load_component(decl, loader, &mut warnings)?;
        diagram
            .add_node(&decl.name, Arc::new(c))
            .map_err(|_| DslError::Duplicate {
                line: decl.line,
                col: decl.col,
                what: "component".into(),
                name: decl.name.clone(),
            })?;
    }

    let mut edge_names = BTreeSet::new();
    for block in &morphisms {
        if !edge_names.insert(block.name.clone()) {
            return Err(DslError::Duplicate {
                line: block.line,
                col: block.name_col,
                what: "morphism".into(),
                name: block.name.clone(),
            });
        }
        let source = resolve_node(&diagram, &block.source, block.line)?;
        let target = resolve_node(&diagram, &block.target, block.line)?;
        let sigma = build_maps(block, &block.name, &source, &target)?;
        let m = ComponentMorphism::new(source, target, sigma);
        let report = m.validate();
        if !report.is_empty() {
            return Err(DslError::Validation {
                subject: format!("edge `{}`", block.name),
                report,
            });
        }
        diagram
            .add_edge_morphism(&block.name, &block.source.0, &block.target.0, m)
            .expect("endpoints resolved from the diagram");
    }

    let mut cocones = BTreeMap::new();
    for decl in &environments {
        if diagram.node(&decl.name).is_some() || cocones.contains_key(&decl.name) {
            return Err(DslError::Duplicate {
                line: decl.line,
                col: decl.col,
                what: "environment".into(),
                name: decl.name.clone(),
            });
        }
        let apex = Arc::new(load_component(decl, loader, &mut warnings)?);
        cocones.insert(
            decl.name.clone(),
            Cocone {
                apex,
                legs: BTreeMap::new(),
            },
        );
    }
    for block in &legs {
        let source = resolve_node(&diagram, &block.source, block.line)?;
        let Some(cocone) = cocones.get_mut(&block.target.0) else {
            return Err(DslError::UnresolvedReference {
                line: block.line,
                col: block.target.1,
                what: "environment".into(),
                name: block.target.0.clone(),
            });
        };
        if cocone.legs.contains_key(&block.name) {
            return Err(DslError::Duplicate {
                line: block.line,
                col: block.name_col,
                what: "leg".into(),
                name: block.name.clone(),
            });
        }
        let label = format!("leg {}", block.name);
        let sigma = build_maps(block, &label, &source, &cocone.apex)?;
        let leg = ComponentMorphism::new(source, cocone.apex.clone(), sigma);
        cocone.legs.insert(block.name.clone(), leg);
    }

    Ok(DiagramFile {
        diagram,
        cocones,
        warnings,
    })
}

fn load_component(
    decl: &Decl,
    loader: &dyn SourceLoader,
    warnings: &mut Vec<Warning>,
) -> Result<Component, DslError> {
    let (origin, text, offset) = match &decl.source {
        Source::Path(p) => (
            p.clone(),
            loader.load(p).map_err(|message| DslError::Io {
                path: p.clone(),
                message,
            })?,
            None,
        ),
        Source::Inline(body, start) => (
            format!("<inline {} at line {start}>", decl.name),
            body.clone(),
            Some(start - 1),
        ),
    };
    let unit = SourceUnit::new(origin.clone(), text);
    let parsed = parse_component_unit(&unit).map_err(|e| DslError::InFile {
        path: origin.clone(),
        error: Box::new(e),
    })?;
    warnings.extend(parsed.warnings.into_iter().map(|w| match offset {
        Some(offset) => Warning {
            line: w.line + offset,
            ..w
        },
        None => Warning {
            file: Some(origin.clone()),
            ..w
        },
    }));
    Ok(parsed.component)
}

fn resolve_node(
    d: &Diagram,
    (name, col): &(String, usize),
    line: usize,
) -> Result<Arc<Component>, DslError> {
    d.node(name)
        .cloned()
        .ok_or_else(|| DslError::UnresolvedReference {
            line,
            col: *col,
            what: "component".into(),
            name: name.clone(),
        })
}

fn build_maps(
    block: &MapBlock,
    label: &str,
    source: &Component,
    target: &Component,
) -> Result<SignatureMorphism, DslError> {
    let mut sigma = SignatureMorphism::default();
    for m in &block.maps {
        if !source.signature.names(m.sort).contains(&m.from) {
            return Err(DslError::UnresolvedReference {
                line: m.line,
                col: m.from_col,
                what: format!("{} in `{}`", m.sort, block.source.0),
                name: m.from.clone(),
            });
        }
        if !target.signature.names(m.sort).contains(&m.to) {
            return Err(DslError::UnresolvedReference {
                line: m.line,
                col: m.to_col,
                what: format!("{} in `{}`", m.sort, block.target.0),
                name: m.to.clone(),
            });
        }
        if sigma
            .map_mut(m.sort)
            .insert(m.from.clone(), m.to.clone())
            .is_some()
        {
            return Err(DslError::Duplicate {
                line: m.line,
                col: m.from_col,
                what: format!("{} mapping", m.sort),
                name: m.from.clone(),
            });
        }
    }
    for sort in Sort::ALL {
        for name in source.signature.names(sort) {
            if !sigma.map(sort).contains_key(name) {
                return Err(DslError::TotalityViolation {
                    line: block.line,
                    edge: label.to_string(),
                    sort,
                    name: name.clone(),
                });
            }
        }
    }
    Ok(sigma)
}

fn write_maps(out: &mut String, sigma: &SignatureMorphism) {
    for sort in Sort::ALL {
        for (from, to) in sigma.map(sort) {
            writeln!(out, "  {} {from} -> {to}", sort.keyword()).unwrap();
        }
    }
}

/// A `morphism` block for `m`, e.g. a mediating morphism.
pub fn emit_morphism(name: &str, source: &str, target: &str, m: &ComponentMorphism) -> String {
    let mut out = format!("morphism {name} : {source} -> {target}\n");
    write_maps(&mut out, &m.sigma);
    out
}

/// `leg` blocks for every leg of a cocone, in node order.
pub fn emit_legs(cocone: &Cocone, apex_name: &str) -> String {
    let mut out = String::new();
    for (i, (node, leg)) in cocone.legs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        writeln!(out, "leg {node} -> {apex_name}").unwrap();
        write_maps(&mut out, &leg.sigma);
    }
    out
}
