//! Tangle encodings: extended planar-diagram (PD) codes with `|` boundary
//! markers, and signed Gauss codes with open/closed component flags.
//!
//! PD documents are JSON, either `{"pd": [[a,b,c,d], ...], "signs": "+-"}`
//! or a bare list of 4-tuples. Labels may be strings or integers. The
//! unquoted bracket notation `[[|1,4,2,5],[2,5,3,6|]]` is accepted as well.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("malformed input: {0}")]
    MalformedSyntax(String),
    #[error("label `{label}` occurs {count} time(s); {} labels must occur exactly {}",
        if *boundary { "boundary" } else { "internal" },
        if *boundary { "once" } else { "twice" })]
    LabelMultiplicity { label: String, count: usize, boundary: bool },
    #[error("label `{0}` is marked as a boundary strand in one place but not another")]
    BoundaryMismatch(String),
    #[error("sign string has length {signs} but the diagram has {crossings} crossing(s)")]
    SignLengthMismatch { signs: usize, crossings: usize },
    #[error("invalid sign character `{0}` (expected `+` or `-`)")]
    InvalidSign(char),
    #[error("crossing {0} appears twice with the same over/under sign")]
    SignPairing(u64),
    #[error("{components} component(s) but {flags} topology flag(s)")]
    TopologyLengthMismatch { components: usize, flags: usize },
}

/// Total order on stripped identifiers: integers numerically, before any
/// non-integer identifier; non-integers lexicographically.
pub fn label_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// One strand label as written, e.g. `"7"`, `"|1"` or `"10|"`.
#[derive(Clone, Debug, Eq)]
pub struct StrandLabel {
    text: String,
    id_start: usize,
    id_end: usize,
}

impl StrandLabel {
    pub fn parse(token: &str) -> Result<Self, CodecError> {
        let text = token.trim().to_string();
        let bars = text.matches('|').count();
        let (start, end) = match bars {
            0 => (0, text.len()),
            1 if text.starts_with('|') => (1, text.len()),
            1 if text.ends_with('|') => (0, text.len() - 1),
            _ => {
                return Err(CodecError::MalformedSyntax(format!(
                    "label `{text}`: `|` may appear once, at either end"
                )))
            }
        };
        if start >= end {
            return Err(CodecError::MalformedSyntax(format!("label `{text}` has an empty identifier")));
        }
        Ok(StrandLabel { text, id_start: start, id_end: end })
    }

    /// Internal label with the given identifier.
    pub fn internal(id: &str) -> Self {
        StrandLabel { text: id.to_string(), id_start: 0, id_end: id.len() }
    }

    /// Boundary label written with the marker in front (`|id`).
    pub fn boundary_front(id: &str) -> Self {
        StrandLabel { text: format!("|{id}"), id_start: 1, id_end: id.len() + 1 }
    }

    /// Boundary label written with the marker behind (`id|`).
    pub fn boundary_back(id: &str) -> Self {
        StrandLabel { text: format!("{id}|"), id_start: 0, id_end: id.len() }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn id(&self) -> &str {
        &self.text[self.id_start..self.id_end]
    }

    pub fn is_boundary(&self) -> bool {
        self.text.len() != self.id_end - self.id_start
    }
}

impl PartialEq for StrandLabel {
    fn eq(&self, other: &Self) -> bool {
        self.id() == other.id()
    }
}

impl fmt::Display for StrandLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Strands around a crossing, starting with the incoming understrand and
/// going counterclockwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub strands: [StrandLabel; 4],
}

impl Crossing {
    pub fn new(strands: [StrandLabel; 4]) -> Self {
        Crossing { strands }
    }

    pub fn from_tokens(tokens: [&str; 4]) -> Result<Self, CodecError> {
        Ok(Crossing {
            strands: [
                StrandLabel::parse(tokens[0])?,
                StrandLabel::parse(tokens[1])?,
                StrandLabel::parse(tokens[2])?,
                StrandLabel::parse(tokens[3])?,
            ],
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_char(c: char) -> Result<Self, CodecError> {
        match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            other => Err(CodecError::InvalidSign(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// One sign per crossing, in crossing order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SignType(pub Vec<Sign>);

impl SignType {
    pub fn all_plus(n: usize) -> Self {
        SignType(vec![Sign::Plus; n])
    }

    pub fn parse(s: &str) -> Result<Self, CodecError> {
        s.trim().chars().map(Sign::from_char).collect::<Result<Vec<_>, _>>().map(SignType)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn n_plus(&self) -> usize {
        self.0.iter().filter(|s| **s == Sign::Plus).count()
    }

    pub fn n_minus(&self) -> usize {
        self.0.iter().filter(|s| **s == Sign::Minus).count()
    }
}

impl fmt::Display for SignType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

/// Circles and arcs that touch no crossing. PD codes cannot express them, so
/// documents declare them as `"free": {"circles": r, "arcs": t}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct FreeComponents {
    pub circles: usize,
    pub arcs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelInfo {
    pub id: String,
    pub boundary: bool,
}

/// A validated extended PD code with its sign type.
#[derive(Clone, Debug)]
pub struct TangleDiagram {
    crossings: Vec<Crossing>,
    sign_type: SignType,
    free: FreeComponents,
    label_index: BTreeMap<String, Vec<(usize, usize)>>,
    // labels sorted by `label_cmp`; crossings re-expressed as indices into it
    labels: Vec<LabelInfo>,
    crossing_ids: Vec<[usize; 4]>,
}

impl PartialEq for TangleDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.free == other.free
            && self.sign_type == other.sign_type
            && self.crossings.len() == other.crossings.len()
            && self
                .crossings
                .iter()
                .zip(&other.crossings)
                .all(|(a, b)| a.strands.iter().zip(&b.strands).all(|(x, y)| x.text() == y.text()))
    }
}

impl TangleDiagram {
    pub fn new(crossings: Vec<Crossing>, sign_type: SignType, free: FreeComponents) -> Result<Self, CodecError> {
        if sign_type.len() != crossings.len() {
            return Err(CodecError::SignLengthMismatch { signs: sign_type.len(), crossings: crossings.len() });
        }
        let mut label_index: BTreeMap<String, Vec<(usize, usize)>> = BTreeMap::new();
        let mut boundary: BTreeMap<String, bool> = BTreeMap::new();
        for (ci, crossing) in crossings.iter().enumerate() {
            for (pos, label) in crossing.strands.iter().enumerate() {
                label_index.entry(label.id().to_string()).or_default().push((ci, pos));
                match boundary.get(label.id()) {
                    Some(&b) if b != label.is_boundary() => {
                        return Err(CodecError::BoundaryMismatch(label.id().to_string()))
                    }
                    _ => {
                        boundary.insert(label.id().to_string(), label.is_boundary());
                    }
                }
            }
        }
        // overused labels first: they pin down the mistake better than the
        // labels left short as a consequence
        let expected = |id: &String| if boundary[id] { 1 } else { 2 };
        let offender = label_index
            .iter()
            .find(|(id, occ)| occ.len() > expected(id))
            .or_else(|| label_index.iter().find(|(id, occ)| occ.len() < expected(id)));
        if let Some((id, occurrences)) = offender {
            return Err(CodecError::LabelMultiplicity {
                label: id.clone(),
                count: occurrences.len(),
                boundary: boundary[id],
            });
        }
        let mut ids: Vec<&String> = label_index.keys().collect();
        ids.sort_by(|a, b| label_cmp(a, b));
        let labels: Vec<LabelInfo> =
            ids.iter().map(|id| LabelInfo { id: (*id).clone(), boundary: boundary[*id] }).collect();
        let position: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let crossing_ids = crossings
            .iter()
            .map(|c| {
                let mut out = [0usize; 4];
                for (slot, label) in out.iter_mut().zip(&c.strands) {
                    *slot = position[label.id()];
                }
                out
            })
            .collect();
        Ok(TangleDiagram { crossings, sign_type, free, label_index, labels, crossing_ids })
    }

    pub fn empty(free: FreeComponents) -> Self {
        TangleDiagram::new(Vec::new(), SignType::default(), free).expect("empty diagram is valid")
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn sign_type(&self) -> &SignType {
        &self.sign_type
    }

    pub fn free(&self) -> FreeComponents {
        self.free
    }

    pub fn n_plus(&self) -> usize {
        self.sign_type.n_plus()
    }

    pub fn n_minus(&self) -> usize {
        self.sign_type.n_minus()
    }

    pub fn label_index(&self) -> &BTreeMap<String, Vec<(usize, usize)>> {
        &self.label_index
    }

    /// All labels in canonical order.
    pub fn labels(&self) -> &[LabelInfo] {
        &self.labels
    }

    /// Crossing `i` as indices into [`labels`](Self::labels).
    pub fn crossing_label_ids(&self, i: usize) -> [usize; 4] {
        self.crossing_ids[i]
    }

    /// Original token for a label index (first occurrence).
    pub fn label_text(&self, label: usize) -> &str {
        let (c, p) = self.label_index[&self.labels[label].id][0];
        self.crossings[c].strands[p].text()
    }

    pub fn boundary_labels(&self) -> Vec<&str> {
        self.labels.iter().filter(|l| l.boundary).map(|l| l.id.as_str()).collect()
    }

    pub fn internal_labels(&self) -> Vec<&str> {
        self.labels.iter().filter(|l| !l.boundary).map(|l| l.id.as_str()).collect()
    }

    pub fn with_signs(&self, sign_type: SignType) -> Result<Self, CodecError> {
        TangleDiagram::new(self.crossings.clone(), sign_type, self.free)
    }

    /// Side-by-side union. Labels of `other` that collide with ours are renamed.
    pub fn disjoint_union(&self, other: &TangleDiagram) -> TangleDiagram {
        let mut fresh = FreshLabels::for_diagram(self);
        fresh.reserve(other.labels.iter().map(|l| l.id.as_str()));
        let mine: HashSet<&str> = self.labels.iter().map(|l| l.id.as_str()).collect();
        let rename: BTreeMap<&str, String> = other
            .labels
            .iter()
            .map(|l| {
                let id = if mine.contains(l.id.as_str()) { fresh.next() } else { l.id.clone() };
                (l.id.as_str(), id)
            })
            .collect();
        let mut crossings = self.crossings.clone();
        crossings.extend(other.crossings.iter().map(|c| Crossing {
            strands: c.strands.clone().map(|s| relabel(&s, &rename[s.id()])),
        }));
        let mut signs = self.sign_type.0.clone();
        signs.extend(other.sign_type.0.iter().copied());
        let free = FreeComponents {
            circles: self.free.circles + other.free.circles,
            arcs: self.free.arcs + other.free.arcs,
        };
        TangleDiagram::new(crossings, SignType(signs), free).expect("union of valid diagrams is valid")
    }
}

/// Keeps the marker style of `old` while swapping in a new identifier.
pub(crate) fn relabel(old: &StrandLabel, id: &str) -> StrandLabel {
    if !old.is_boundary() {
        StrandLabel::internal(id)
    } else if old.text().starts_with('|') {
        StrandLabel::boundary_front(id)
    } else {
        StrandLabel::boundary_back(id)
    }
}

/// Allocates identifiers unused by a diagram: integers above the largest
/// integer label.
#[derive(Clone, Debug)]
pub(crate) struct FreshLabels {
    next: u64,
    taken: HashSet<String>,
}

impl FreshLabels {
    pub(crate) fn for_diagram(d: &TangleDiagram) -> Self {
        let mut f = FreshLabels { next: 1, taken: HashSet::new() };
        f.reserve(d.labels.iter().map(|l| l.id.as_str()));
        f
    }

    pub(crate) fn reserve<'a>(&mut self, ids: impl IntoIterator<Item = &'a str>) {
        for id in ids {
            if let Ok(v) = id.parse::<u64>() {
                self.next = self.next.max(v + 1);
            }
            self.taken.insert(id.to_string());
        }
    }

    pub(crate) fn next(&mut self) -> String {
        loop {
            let candidate = self.next.to_string();
            self.next += 1;
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

/// Result of [`parse_pd_code`].
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedPd {
    pub diagram: TangleDiagram,
    /// No sign string was given; every crossing defaulted to `+`.
    pub signs_defaulted: bool,
}

pub fn parse_pd_code(text: &str) -> Result<ParsedPd, CodecError> {
    let (tuples, signs, free) = match serde_json::from_str::<Value>(text) {
        Ok(value) => pd_from_json(&value)?,
        Err(json_err) => {
            let node = bracket::parse(text).map_err(|e| {
                CodecError::MalformedSyntax(format!("not JSON ({json_err}) nor bracket notation ({e})"))
            })?;
            (pd_from_node(&node)?, None, FreeComponents::default())
        }
    };
    let crossings = tuples
        .iter()
        .map(|t| Crossing::from_tokens([&t[0], &t[1], &t[2], &t[3]]))
        .collect::<Result<Vec<_>, _>>()?;
    let signs_defaulted = signs.is_none();
    let sign_type = match signs {
        Some(s) => SignType::parse(&s)?,
        None => SignType::all_plus(crossings.len()),
    };
    let diagram = TangleDiagram::new(crossings, sign_type, free)?;
    Ok(ParsedPd { diagram, signs_defaulted })
}

type PdParts = (Vec<[String; 4]>, Option<String>, FreeComponents);

fn pd_from_json(value: &Value) -> Result<PdParts, CodecError> {
    match value {
        Value::Array(_) => Ok((pd_tuples(value)?, None, FreeComponents::default())),
        Value::Object(map) => {
            let pd = map.get("pd").ok_or_else(|| CodecError::MalformedSyntax("missing `pd` field".into()))?;
            let signs = match map.get("signs") {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) => Some(s.clone()),
                Some(other) => {
                    return Err(CodecError::MalformedSyntax(format!("`signs` must be a string, got {other}")))
                }
            };
            let free = match map.get("free") {
                None | Some(Value::Null) => FreeComponents::default(),
                Some(Value::Object(f)) => FreeComponents {
                    circles: json_count(f.get("circles"), "free.circles")?,
                    arcs: json_count(f.get("arcs"), "free.arcs")?,
                },
                Some(other) => {
                    return Err(CodecError::MalformedSyntax(format!("`free` must be an object, got {other}")))
                }
            };
            Ok((pd_tuples(pd)?, signs, free))
        }
        other => Err(CodecError::MalformedSyntax(format!("expected a list or object, got {other}"))),
    }
}

fn json_count(v: Option<&Value>, what: &str) -> Result<usize, CodecError> {
    match v {
        None => Ok(0),
        Some(v) => v
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| CodecError::MalformedSyntax(format!("`{what}` must be a nonnegative integer"))),
    }
}

fn pd_tuples(value: &Value) -> Result<Vec<[String; 4]>, CodecError> {
    let list = value
        .as_array()
        .ok_or_else(|| CodecError::MalformedSyntax("`pd` must be a list of 4-tuples".into()))?;
    list.iter()
        .enumerate()
        .map(|(i, entry)| {
            let items = entry
                .as_array()
                .filter(|a| a.len() == 4)
                .ok_or_else(|| CodecError::MalformedSyntax(format!("crossing {i} is not a 4-tuple: {entry}")))?;
            let mut out: [String; 4] = Default::default();
            for (slot, item) in out.iter_mut().zip(items) {
                *slot = match item {
                    Value::String(s) => s.clone(),
                    Value::Number(n) if n.is_u64() => n.to_string(),
                    other => {
                        return Err(CodecError::MalformedSyntax(format!(
                            "crossing {i}: label {other} is not a string or nonnegative integer"
                        )))
                    }
                };
            }
            Ok(out)
        })
        .collect()
}

fn pd_from_node(node: &bracket::Node) -> Result<Vec<[String; 4]>, CodecError> {
    let bracket::Node::List(items) = node else {
        return Err(CodecError::MalformedSyntax("expected a bracketed list of crossings".into()));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, item)| match item {
            bracket::Node::List(xs) if xs.len() == 4 => {
                let mut out: [String; 4] = Default::default();
                for (slot, x) in out.iter_mut().zip(xs) {
                    let bracket::Node::Atom(a) = x else {
                        return Err(CodecError::MalformedSyntax(format!("crossing {i}: nested list")));
                    };
                    *slot = a.clone();
                }
                Ok(out)
            }
            _ => Err(CodecError::MalformedSyntax(format!("crossing {i} is not a 4-tuple"))),
        })
        .collect()
}

/// Canonical whitespace-free JSON: keys sorted, crossing order preserved,
/// `free` omitted when there are no free components.
pub fn serialize_pd_code(diagram: &TangleDiagram) -> String {
    let mut out = String::from("{");
    if diagram.free != FreeComponents::default() {
        out.push_str(&format!(
            "\"free\":{{\"arcs\":{},\"circles\":{}}},",
            diagram.free.arcs, diagram.free.circles
        ));
    }
    out.push_str("\"pd\":[");
    for (i, c) in diagram.crossings.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for (j, s) in c.strands.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&Value::String(s.text().to_string()).to_string());
        }
        out.push(']');
    }
    out.push_str("],\"signs\":");
    out.push_str(&Value::String(diagram.sign_type.to_string()).to_string());
    out.push('}');
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    Open,
    Closed,
}

/// Per-component signed crossing sequences: `+k` passes over crossing `k`,
/// `-k` passes under it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussCode {
    pub components: Vec<Vec<i64>>,
    pub topologies: Vec<Topology>,
}

impl GaussCode {
    pub fn crossing_count(&self) -> usize {
        self.components.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Parses `{"gauss": [[...]], "topology": ["o", "c"]}` or the plain notation
/// `[[+1,-2],[...]] (o,c)`. Handedness suffixes such as `+1L` are dropped.
pub fn parse_gauss_code(text: &str) -> Result<GaussCode, CodecError> {
    let (components, flags) = match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(map)) => {
            let gauss = map.get("gauss").ok_or_else(|| CodecError::MalformedSyntax("missing `gauss` field".into()))?;
            let comps = gauss
                .as_array()
                .ok_or_else(|| CodecError::MalformedSyntax("`gauss` must be a list of lists".into()))?
                .iter()
                .map(|c| {
                    c.as_array()
                        .ok_or_else(|| CodecError::MalformedSyntax("component is not a list".into()))?
                        .iter()
                        .map(|e| match e {
                            Value::Number(n) => {
                                n.as_i64().ok_or_else(|| CodecError::MalformedSyntax(format!("bad entry {n}")))
                            }
                            Value::String(s) => gauss_entry(s),
                            other => Err(CodecError::MalformedSyntax(format!("bad entry {other}"))),
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let flags = map
                .get("topology")
                .and_then(Value::as_array)
                .ok_or_else(|| CodecError::MalformedSyntax("missing `topology` list".into()))?
                .iter()
                .map(|f| f.as_str().map(str::to_string).ok_or_else(|| CodecError::MalformedSyntax(format!("bad flag {f}"))))
                .collect::<Result<Vec<_>, _>>()?;
            (comps, flags)
        }
        Ok(other) => return Err(CodecError::MalformedSyntax(format!("expected an object, got {other}"))),
        Err(_) => {
            let nodes = bracket::parse_sequence(text).map_err(CodecError::MalformedSyntax)?;
            let [bracket::Node::List(comps), bracket::Node::Tuple(flags)] = nodes.as_slice() else {
                return Err(CodecError::MalformedSyntax("expected `[[...],...] (o,c,...)`".into()));
            };
            let comps = comps
                .iter()
                .map(|c| match c {
                    bracket::Node::List(xs) => xs
                        .iter()
                        .map(|x| match x {
                            bracket::Node::Atom(a) => gauss_entry(a),
                            _ => Err(CodecError::MalformedSyntax("nested list in component".into())),
                        })
                        .collect::<Result<Vec<_>, _>>(),
                    _ => Err(CodecError::MalformedSyntax("component is not a list".into())),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let flags = flags
                .iter()
                .map(|f| match f {
                    bracket::Node::Atom(a) => Ok(a.clone()),
                    _ => Err(CodecError::MalformedSyntax("bad topology flag".into())),
                })
                .collect::<Result<Vec<_>, _>>()?;
            (comps, flags)
        }
    };
    let topologies = flags
        .iter()
        .map(|f| match f.as_str() {
            "o" | "open" => Ok(Topology::Open),
            "c" | "closed" => Ok(Topology::Closed),
            other => Err(CodecError::MalformedSyntax(format!("topology flag `{other}` is not o or c"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if topologies.len() != components.len() {
        return Err(CodecError::TopologyLengthMismatch { components: components.len(), flags: topologies.len() });
    }
    let mut seen: BTreeMap<u64, Vec<bool>> = BTreeMap::new();
    for &entry in components.iter().flatten() {
        seen.entry(entry.unsigned_abs()).or_default().push(entry > 0);
    }
    for (label, passes) in &seen {
        if passes.len() != 2 {
            return Err(CodecError::LabelMultiplicity { label: label.to_string(), count: passes.len(), boundary: false });
        }
        if passes[0] == passes[1] {
            return Err(CodecError::SignPairing(*label));
        }
    }
    Ok(GaussCode { components, topologies })
}

fn gauss_entry(token: &str) -> Result<i64, CodecError> {
    let t = token.trim().trim_end_matches(['L', 'R', 'l', 'r']);
    let (sign, digits) = match t.as_bytes().first() {
        Some(b'+') => (1, &t[1..]),
        Some(b'-') => (-1, &t[1..]),
        _ => (1, t),
    };
    let v: i64 = digits
        .parse()
        .map_err(|_| CodecError::MalformedSyntax(format!("Gauss entry `{token}` is not a signed integer")))?;
    if v <= 0 {
        return Err(CodecError::MalformedSyntax(format!("Gauss entry `{token}` must be a nonzero label")));
    }
    Ok(sign * v)
}

/// Minimal reader for unquoted list notation: `[...]` lists, `(...)` tuples
/// and bare or quoted atoms separated by commas.
mod bracket {
    #[derive(Clone, Debug, PartialEq)]
    pub enum Node {
        List(Vec<Node>),
        Tuple(Vec<Node>),
        Atom(String),
    }

    pub fn parse(text: &str) -> Result<Node, String> {
        let mut nodes = parse_sequence(text)?;
        match nodes.len() {
            1 => Ok(nodes.remove(0)),
            n => Err(format!("expected one value, found {n}")),
        }
    }

    pub fn parse_sequence(text: &str) -> Result<Vec<Node>, String> {
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0;
        let mut out = Vec::new();
        loop {
            skip_ws(&chars, &mut pos);
            if pos == chars.len() {
                return Ok(out);
            }
            out.push(value(&chars, &mut pos)?);
        }
    }

    fn skip_ws(chars: &[char], pos: &mut usize) {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    }

    fn value(chars: &[char], pos: &mut usize) -> Result<Node, String> {
        skip_ws(chars, pos);
        match chars.get(*pos) {
            Some('[') => group(chars, pos, ']').map(Node::List),
            Some('(') => group(chars, pos, ')').map(Node::Tuple),
            Some(&q) if q == '"' || q == '\'' => {
                let start = *pos + 1;
                let len = chars[start..].iter().position(|&c| c == q).ok_or("unterminated quote")?;
                *pos = start + len + 1;
                Ok(Node::Atom(chars[start..start + len].iter().collect()))
            }
            Some(_) => {
                let start = *pos;
                while *pos < chars.len() && !"[](),".contains(chars[*pos]) && !chars[*pos].is_whitespace() {
                    *pos += 1;
                }
                if start == *pos {
                    return Err(format!("unexpected `{}` at offset {start}", chars[start]));
                }
                Ok(Node::Atom(chars[start..*pos].iter().collect()))
            }
            None => Err("unexpected end of input".to_string()),
        }
    }

    fn group(chars: &[char], pos: &mut usize, close: char) -> Result<Vec<Node>, String> {
        *pos += 1;
        let mut items = Vec::new();
        skip_ws(chars, pos);
        if chars.get(*pos) == Some(&close) {
            *pos += 1;
            return Ok(items);
        }
        loop {
            items.push(value(chars, pos)?);
            skip_ws(chars, pos);
            match chars.get(*pos) {
                Some(',') => *pos += 1,
                Some(&c) if c == close => {
                    *pos += 1;
                    return Ok(items);
                }
                Some(c) => return Err(format!("expected `,` or `{close}`, found `{c}`")),
                None => return Err(format!("missing `{close}`")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) const EXAMPLE_PD: &str =
        r#"[["3","10|","4","9"],["|1","8","2","|7"],["9","4","8","5"],["2","5","3","6|"]]"#;

    #[test]
    fn parses_four_crossing_example() {
        let parsed = parse_pd_code(EXAMPLE_PD).unwrap();
        let d = &parsed.diagram;
        assert!(parsed.signs_defaulted);
        assert_eq!(d.crossing_count(), 4);
        assert_eq!(d.boundary_labels(), ["1", "6", "7", "10"]);
        assert_eq!(d.internal_labels(), ["2", "3", "4", "5", "8", "9"]);
        for id in d.internal_labels() {
            assert_eq!(d.label_index()[id].len(), 2);
        }
        assert_eq!(d.sign_type().to_string(), "++++");
    }

    #[test]
    fn empty_diagram() {
        let d = parse_pd_code("[]").unwrap().diagram;
        assert_eq!(d.crossing_count(), 0);
        assert!(d.label_index().is_empty());
        assert_eq!(serialize_pd_code(&d), r#"{"pd":[],"signs":""}"#);
    }

    #[test]
    fn triple_label_rejected() {
        let err = parse_pd_code(r#"[["2","5","3","5"],["|1","4","2","5"]]"#).unwrap_err();
        assert!(matches!(err, CodecError::LabelMultiplicity { ref label, count: 3, .. } if label == "5"));
        assert!(err.to_string().contains("`5`"));
    }

    #[test]
    fn bracket_notation_with_repeated_label() {
        let err = parse_pd_code("[[|1,4,2,5], [2,5,3,5], [6,4,7|,3]]").unwrap_err();
        assert!(matches!(err, CodecError::LabelMultiplicity { ref label, .. } if label == "5"));
    }

    #[test]
    fn malformed_inputs() {
        for bad in [r#"{"signs":"+"}"#, r#"[["1","2","3"]]"#, r#"[[1,2,3,{}]]"#, "[[1,2", r#""x""#, r#"[["1|2","1","2","2"]]"#] {
            assert!(matches!(parse_pd_code(bad), Err(CodecError::MalformedSyntax(_))), "{bad}");
        }
    }

    #[test]
    fn boundary_flags_must_agree() {
        let err = parse_pd_code(r#"[["|1","1","2","2"]]"#).unwrap_err();
        assert_eq!(err, CodecError::BoundaryMismatch("1".into()));
    }

    #[test]
    fn sign_string_checks() {
        let ok = parse_pd_code(r#"{"pd":[["|1","|2","|3","|4"]],"signs":"-"}"#).unwrap();
        assert!(!ok.signs_defaulted);
        assert_eq!(ok.diagram.n_minus(), 1);
        assert!(matches!(
            parse_pd_code(r#"{"pd":[["|1","|2","|3","|4"]],"signs":"+-"}"#),
            Err(CodecError::SignLengthMismatch { signs: 2, crossings: 1 })
        ));
        assert_eq!(
            parse_pd_code(r#"{"pd":[["|1","|2","|3","|4"]],"signs":"x"}"#).unwrap_err(),
            CodecError::InvalidSign('x')
        );
    }

    #[test]
    fn serialization_examples() {
        let d = parse_pd_code(EXAMPLE_PD).unwrap().diagram;
        let s = serialize_pd_code(&d);
        assert_eq!(
            s,
            r#"{"pd":[["3","10|","4","9"],["|1","8","2","|7"],["9","4","8","5"],["2","5","3","6|"]],"signs":"++++"}"#
        );
        assert_eq!(parse_pd_code(&s).unwrap().diagram, d);

        let two = parse_pd_code(r#"{"pd":[["|1","2","2","3"],["3","4","4","5|"]],"signs":"+-"}"#).unwrap();
        assert!(serialize_pd_code(&two.diagram).contains(r#""signs":"+-""#));

        let free = parse_pd_code(r#"{"pd":[],"free":{"circles":2,"arcs":1}}"#).unwrap().diagram;
        assert_eq!(serialize_pd_code(&free), r#"{"free":{"arcs":1,"circles":2},"pd":[],"signs":""}"#);
    }

    #[test]
    fn gauss_paper_example_verbatim() {
        let text = "[[+1,-2,-3,+4,-5,+6,-7,+8,-4,+9],\n [+10,-11,+7,-12,+13,-8,+3],\n [-9,+5,-13,+12,-6],\n [-1,+2,+11,-10]]\n(o,o,o,c)";
        let g = parse_gauss_code(text).unwrap();
        assert_eq!(g.components.len(), 4);
        assert_eq!(g.crossing_count(), 13);
        assert_eq!(g.topologies, [Topology::Open, Topology::Open, Topology::Open, Topology::Closed]);
    }

    #[test]
    fn gauss_json_and_errors() {
        let g = parse_gauss_code(r#"{"gauss":[["+1L","-1R"]],"topology":["c"]}"#).unwrap();
        assert_eq!(g.components, vec![vec![1, -1]]);
        assert_eq!(parse_gauss_code("[[+1,-1]] (c)").unwrap().crossing_count(), 1);
        assert_eq!(parse_gauss_code("[[+1,+1]] (c)").unwrap_err(), CodecError::SignPairing(1));
        assert!(matches!(
            parse_gauss_code("[[+1,-1,+2]] (c)").unwrap_err(),
            CodecError::LabelMultiplicity { count: 1, .. }
        ));
        assert_eq!(
            parse_gauss_code("[[+1,-1]] (c,o)").unwrap_err(),
            CodecError::TopologyLengthMismatch { components: 1, flags: 2 }
        );
        assert!(matches!(parse_gauss_code("[[+0,-0]] (c)"), Err(CodecError::MalformedSyntax(_))));
    }

    #[test]
    fn disjoint_union_renames_collisions() {
        let a = parse_pd_code(r#"{"pd":[["|1","2","2","3|"]],"signs":"-"}"#).unwrap().diagram;
        let u = a.disjoint_union(&a);
        assert_eq!(u.crossing_count(), 2);
        assert_eq!(u.labels().len(), 6);
        assert_eq!(u.sign_type().to_string(), "--");
    }

    #[test]
    fn label_order_is_numeric_aware() {
        let mut v = vec!["10", "b", "2", "a", "1"];
        v.sort_by(|a, b| label_cmp(a, b));
        assert_eq!(v, ["1", "2", "10", "a", "b"]);
    }

    fn mutated_example() -> impl Strategy<Value = (usize, usize, usize, usize)> {
        (0usize..4, 0usize..4, 0usize..4, 0usize..4)
    }

    proptest! {
        // Overwriting one slot with another label breaks the once/twice rule
        // unless the two labels coincide.
        #[test]
        fn mutations_are_rejected((c1, p1, c2, p2) in mutated_example()) {
            let base = parse_pd_code(EXAMPLE_PD).unwrap().diagram;
            let mut crossings = base.crossings().to_vec();
            let replacement = crossings[c2].strands[p2].clone();
            let replaced = std::mem::replace(&mut crossings[c1].strands[p1], replacement);
            let result = TangleDiagram::new(crossings, base.sign_type().clone(), base.free());
            if replaced.id() == base.crossings()[c2].strands[p2].id() {
                prop_assert!(result.is_ok());
            } else {
                prop_assert!(result.is_err());
            }
        }

        #[test]
        fn round_trip(signs in proptest::collection::vec(any::<bool>(), 4), circles in 0usize..3, arcs in 0usize..3) {
            let base = parse_pd_code(EXAMPLE_PD).unwrap().diagram;
            let st = SignType(signs.iter().map(|&b| if b { Sign::Plus } else { Sign::Minus }).collect());
            let d = TangleDiagram::new(base.crossings().to_vec(), st, FreeComponents { circles, arcs }).unwrap();
            let text = serialize_pd_code(&d);
            let back = parse_pd_code(&text).unwrap();
            prop_assert_eq!(&back.diagram, &d);
            prop_assert_eq!(serialize_pd_code(&back.diagram), text);
        }
    }
}
