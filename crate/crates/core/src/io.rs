//! Text formats for instances and maps.
//!
//! Instance files:
//!
//! ```text
//! terrain 1.5d
//! n 3
//! 0 0
//! 1 2
//! 2 0
//! viewpoints 0 2
//! radius 3/2
//! ```
//!
//! Map files start with `map vis|colvis|vorvis` followed by one line per
//! interval, `[lo, hi] label`. Numbers are exact: `p/q`, integers, or
//! `a+b*sqrt(c)` for quadratic irrationals. Blank lines and `#` comments are
//! ignored in both formats.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{parse_rational, ExactX, Point2};
use crate::intervals::{IntervalMap, VisMap, VorVisMap};
use crate::terrain::{Instance, Terrain, ViewpointSet};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-empty, comment-stripped lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| parse_err(0, format!("unexpected end of input, expected {what}")))
    };
    let (ln, header) = next("header")?;
    if header.split_whitespace().collect::<Vec<_>>() != ["terrain", "1.5d"] {
        return Err(parse_err(ln, "expected header `terrain 1.5d`"));
    }
    let (ln, count) = next("vertex count")?;
    let n: usize = match count.split_whitespace().collect::<Vec<_>>()[..] {
        ["n", c] => c
            .parse()
            .map_err(|_| parse_err(ln, format!("bad count {c:?}")))?,
        _ => return Err(parse_err(ln, "expected `n <count>`")),
    };
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = next("a vertex")?;
        let [x, y] = l.split_whitespace().collect::<Vec<_>>()[..] else {
            return Err(parse_err(ln, "expected `x y`"));
        };
        let x = parse_rational(x).map_err(|e| parse_err(ln, e))?;
        let y = parse_rational(y).map_err(|e| parse_err(ln, e))?;
        vertices.push(Point2::new(x, y));
    }
    let (ln, l) = next("viewpoints")?;
    let mut words = l.split_whitespace();
    if words.next() != Some("viewpoints") {
        return Err(parse_err(ln, "expected `viewpoints <i> ...`"));
    }
    let indices = words
        .map(|w| {
            w.parse::<usize>()
                .map_err(|_| parse_err(ln, format!("bad index {w:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut radius = None;
    if let Some((ln, l)) = lines.next() {
        match l.split_whitespace().collect::<Vec<_>>()[..] {
            ["radius", r] => radius = Some(parse_rational(r).map_err(|e| parse_err(ln, e))?),
            _ => return Err(parse_err(ln, "expected `radius <r>` or end of input")),
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing input"));
    }
    let terrain = Terrain::new(vertices)?;
    let viewpoints = ViewpointSet::new(indices, radius, terrain.n())?;
    Instance::new(terrain, viewpoints)
}

pub fn write_instance(inst: &Instance) -> String {
    let mut s = String::from("terrain 1.5d\n");
    let _ = writeln!(s, "n {}", inst.terrain.n());
    for v in inst.terrain.vertices() {
        let _ = writeln!(s, "{} {}", v.x, v.y);
    }
    s.push_str("viewpoints");
    for i in inst.viewpoints.indices() {
        let _ = write!(s, " {i}");
    }
    s.push('\n');
    if let Some(r) = inst.viewpoints.radius() {
        let _ = writeln!(s, "radius {r}");
    }
    s
}

/// A map of any of the three kinds, as stored in map files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyMap {
    Vis(VisMap),
    Colvis(IntervalMap<Vec<usize>>),
    Vorvis(VorVisMap),
}

impl AnyMap {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyMap::Vis(_) => "vis",
            AnyMap::Colvis(_) => "colvis",
            AnyMap::Vorvis(_) => "vorvis",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnyMap::Vis(m) => m.len(),
            AnyMap::Colvis(m) => m.len(),
            AnyMap::Vorvis(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn breaks(&self) -> &[ExactX] {
        match self {
            AnyMap::Vis(m) => m.breaks(),
            AnyMap::Colvis(m) => m.breaks(),
            AnyMap::Vorvis(m) => m.breaks(),
        }
    }

    /// Renames viewpoint labels, e.g. from ordinals to vertex indices.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> AnyMap {
        match self {
            AnyMap::Vis(m) => AnyMap::Vis(m.clone()),
            AnyMap::Colvis(m) => AnyMap::Colvis(m.map_labels(|l| {
                let mut v: Vec<usize> = l.iter().map(|&i| f(i)).collect();
                v.sort_unstable();
                v
            })),
            AnyMap::Vorvis(m) => AnyMap::Vorvis(m.map_labels(|l| l.map(&f))),
        }
    }

    /// Labels as they appear in map files.
    pub fn label_strings(&self) -> Vec<String> {
        match self {
            AnyMap::Vis(m) => m
                .labels()
                .iter()
                .map(|&v| if v { "visible" } else { "invisible" }.to_string())
                .collect(),
            AnyMap::Colvis(m) => m
                .labels()
                .iter()
                .map(|l| {
                    let inner: Vec<String> = l.iter().map(|i| i.to_string()).collect();
                    format!("{{{}}}", inner.join(","))
                })
                .collect(),
            AnyMap::Vorvis(m) => m
                .labels()
                .iter()
                .map(|l| l.map_or_else(|| "none".to_string(), |i| i.to_string()))
                .collect(),
        }
    }
}

pub fn write_map(map: &AnyMap) -> String {
    let mut s = format!("map {}\n", map.kind());
    let b = map.breaks();
    for (i, label) in map.label_strings().iter().enumerate() {
        let _ = writeln!(s, "[{}, {}] {}", b[i], b[i + 1], label);
    }
    s
}

fn parse_index_set(ln: usize, s: &str) -> Result<Vec<usize>> {
    let inner = s
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| parse_err(ln, format!("expected an index set, got {s:?}")))?;
    let mut v = inner
        .split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(|w| {
            w.parse::<usize>()
                .map_err(|_| parse_err(ln, format!("bad index {w:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    v.sort_unstable();
    Ok(v)
}

pub fn parse_map(text: &str) -> Result<AnyMap> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty map file"))?;
    let kind = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["map", k @ ("vis" | "colvis" | "vorvis")] => k,
        _ => return Err(parse_err(ln, "expected `map vis|colvis|vorvis`")),
    };
    let mut breaks: Vec<ExactX> = Vec::new();
    let mut raw: Vec<(usize, String)> = Vec::new();
    for (ln, l) in lines {
        let rest = l
            .strip_prefix('[')
            .ok_or_else(|| parse_err(ln, "expected `[lo, hi] label`"))?;
        let (range, label) = rest
            .split_once(']')
            .ok_or_else(|| parse_err(ln, "missing `]`"))?;
        let (lo, hi) = range
            .split_once(',')
            .ok_or_else(|| parse_err(ln, "expected `lo, hi`"))?;
        let lo: ExactX = lo.parse().map_err(|e: String| parse_err(ln, e))?;
        let hi: ExactX = hi.parse().map_err(|e: String| parse_err(ln, e))?;
        match breaks.last() {
            None => breaks.push(lo),
            Some(prev) if *prev == lo => {}
            Some(_) => return Err(parse_err(ln, "intervals are not contiguous")),
        }
        if hi <= breaks[breaks.len() - 1] {
            return Err(parse_err(ln, "empty or reversed interval"));
        }
        breaks.push(hi);
        raw.push((ln, label.trim().to_string()));
    }
    if raw.is_empty() {
        return Err(parse_err(ln, "map has no intervals"));
    }
    Ok(match kind {
        "vis" => AnyMap::Vis(IntervalMap::from_pieces(
            breaks,
            raw.iter()
                .map(|(ln, l)| match l.as_str() {
                    "visible" => Ok(true),
                    "invisible" => Ok(false),
                    _ => Err(parse_err(*ln, format!("bad vis label {l:?}"))),
                })
                .collect::<Result<_>>()?,
        )),
        "colvis" => AnyMap::Colvis(IntervalMap::from_pieces(
            breaks,
            raw.iter()
                .map(|(ln, l)| parse_index_set(*ln, l))
                .collect::<Result<_>>()?,
        )),
        _ => AnyMap::Vorvis(IntervalMap::from_pieces(
            breaks,
            raw.iter()
                .map(|(ln, l)| match l.as_str() {
                    "none" => Ok(None),
                    w => w
                        .parse()
                        .map(Some)
                        .map_err(|_| parse_err(*ln, format!("bad vorvis label {w:?}"))),
                })
                .collect::<Result<_>>()?,
        )),
    })
}

/// The map as JSON, with numbers kept as exact strings.
pub fn map_to_json(map: &AnyMap) -> Value {
    let b = map.breaks();
    let labels: Vec<Value> = match map {
        AnyMap::Vis(m) => m.labels().iter().map(|&v| json!(v)).collect(),
        AnyMap::Colvis(m) => m.labels().iter().map(|l| json!(l)).collect(),
        AnyMap::Vorvis(m) => m.labels().iter().map(|l| json!(l)).collect(),
    };
    let intervals: Vec<Value> = labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            json!({
                "lo": b[i].to_string(),
                "hi": b[i + 1].to_string(),
                "label": label,
            })
        })
        .collect();
    json!({ "kind": map.kind(), "intervals": intervals })
}
