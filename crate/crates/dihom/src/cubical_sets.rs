//! Finite precubical sets, PV-style grid models, and their compilation to
//! 2-polygraphs.
//!
//! Orientation: direction 1 is vertical and direction 2 horizontal. The unit
//! square `sq(x,y)` has `∂_1^- = ex(x,y)` (bottom), `∂_1^+ = ex(x,y+1)` (top),
//! `∂_2^- = ey(x,y)` (left) and `∂_2^+ = ey(x+1,y)` (right). A compiled square
//! rewrites `∂_1^-·∂_2^+` into `∂_2^-·∂_1^+`, matching `s_1 R(00) = R(-0) *_0 R(0+)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::cube_model::Sign;
use crate::free_cat::{Gen1, Gen2, Polygraph2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error: unknown keys {}", .unknown.join(", "))]
    Schema { unknown: Vec<String> },
    #[error("invalid field {field}: {message}")]
    Field { field: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("grid has zero width or height")]
    DegenerateGrid,
    #[error("hole {0:?} is empty or leaves the grid")]
    BadHole([i64; 4]),
    #[error("cell {0} has dimension {1}; only dimensions up to 2 compile")]
    UnsupportedDimension(String, usize),
    #[error("cubical set is invalid: {0}")]
    Invalid(ValidationReport),
}

/// Face key `(i, α)`, written `"1-"`, `"2+"`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaceKey {
    pub index: usize,
    pub sign: Sign,
}

impl fmt::Display for FaceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.index, self.sign.symbol())
    }
}

impl std::str::FromStr for FaceKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, sign) = s.split_at(s.len().saturating_sub(1));
        let sign = match sign {
            "-" => Sign::Minus,
            "+" => Sign::Plus,
            _ => return Err(format!("bad face key {s:?}")),
        };
        let index = num.parse::<usize>().map_err(|_| format!("bad face key {s:?}"))?;
        if index == 0 {
            return Err(format!("bad face key {s:?}"));
        }
        Ok(FaceKey { index, sign })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
    pub faces: BTreeMap<FaceKey, String>,
}

/// A degeneracy-free cubical set. Cells keep their insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CubicalSet {
    cells: Vec<Cell>,
    index: HashMap<String, usize>,
}

impl CubicalSet {
    pub fn new() -> CubicalSet {
        CubicalSet::default()
    }

    /// Adds a cell; `faces` lists `(key, face id)` pairs. A repeated id
    /// replaces the earlier cell.
    pub fn add(&mut self, id: &str, dim: usize, faces: &[(&str, &str)]) {
        let faces = faces.iter().map(|(k, v)| (k.parse().expect("face key literal"), v.to_string())).collect();
        self.insert(Cell { id: id.to_string(), dim, faces });
    }

    pub fn insert(&mut self, cell: Cell) {
        match self.index.get(&cell.id) {
            Some(&i) => self.cells[i] = cell,
            None => {
                self.index.insert(cell.id.clone(), self.cells.len());
                self.cells.push(cell);
            }
        }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn get(&self, id: &str) -> Option<&Cell> {
        self.index.get(id).map(|&i| &self.cells[i])
    }

    pub fn cells_of_dim(&self, d: usize) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(move |c| c.dim == d)
    }

    pub fn dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    pub fn face(&self, id: &str, index: usize, sign: Sign) -> Option<&str> {
        self.get(id)?.faces.get(&FaceKey { index, sign }).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    MissingFace { cell: String, key: String },
    ExtraFace { cell: String, key: String },
    UnknownFace { cell: String, key: String, face: String },
    WrongFaceDim { cell: String, key: String, face: String, expected: usize, found: usize },
    /// `∂_i^α ∂_j^β x ≠ ∂_{j-1}^β ∂_i^α x` for some `i < j`.
    Relation { relation: u8, cell: String, lhs: String, rhs: String, left: String, right: String },
}

/// Every violated instance found by [`validate`]; empty iff valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| match v {
                Violation::MissingFace { cell, key } => format!("{cell}: missing face {key}"),
                Violation::ExtraFace { cell, key } => format!("{cell}: face {key} out of range"),
                Violation::UnknownFace { cell, key, face } => format!("{cell}: face {key} = {face} does not exist"),
                Violation::WrongFaceDim { cell, key, face, expected, found } => {
                    format!("{cell}: face {key} = {face} has dimension {found}, expected {expected}")
                }
                Violation::Relation { relation, cell, lhs, rhs, left, right } => {
                    format!("{cell}: relation {relation} fails, {lhs} = {left} but {rhs} = {right}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks face references and the face relation
/// `∂_i^α ∂_j^β = ∂_{j-1}^β ∂_i^α` (`i < j`) on every cell.
pub fn validate(k: &CubicalSet) -> ValidationReport {
    let mut violations = Vec::new();
    for c in k.cells() {
        for (key, _) in c.faces.iter().filter(|(key, _)| key.index > c.dim) {
            violations.push(Violation::ExtraFace { cell: c.id.clone(), key: key.to_string() });
        }
        for i in 1..=c.dim {
            for sign in Sign::BOTH {
                let key = FaceKey { index: i, sign };
                match c.faces.get(&key) {
                    None => violations.push(Violation::MissingFace { cell: c.id.clone(), key: key.to_string() }),
                    Some(f) => match k.get(f) {
                        None => violations.push(Violation::UnknownFace {
                            cell: c.id.clone(),
                            key: key.to_string(),
                            face: f.clone(),
                        }),
                        Some(fc) if fc.dim + 1 != c.dim => violations.push(Violation::WrongFaceDim {
                            cell: c.id.clone(),
                            key: key.to_string(),
                            face: f.clone(),
                            expected: c.dim - 1,
                            found: fc.dim,
                        }),
                        _ => {}
                    },
                }
            }
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }
    for c in k.cells().iter().filter(|c| c.dim >= 2) {
        for i in 1..c.dim {
            for j in i + 1..=c.dim {
                for a in Sign::BOTH {
                    for b in Sign::BOTH {
                        let left = k.face(k.face(&c.id, j, b).unwrap(), i, a).unwrap();
                        let right = k.face(k.face(&c.id, i, a).unwrap(), j - 1, b).unwrap();
                        if left != right {
                            let (sa, sb) = (a.symbol(), b.symbol());
                            violations.push(Violation::Relation {
                                relation: 1,
                                cell: c.id.clone(),
                                lhs: format!("∂_{i}^{sa}∂_{j}^{sb}"),
                                rhs: format!("∂_{}^{sb}∂_{i}^{sa}", j - 1),
                                left: left.to_string(),
                                right: right.to_string(),
                            });
                        }
                    }
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Unit-square grid `[0,width] × [0,height]` with rectangular holes
/// `[x0, y0, x1, y1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridModel {
    pub width: usize,
    pub height: usize,
    pub holes: Vec<[i64; 4]>,
}

impl GridModel {
    pub fn new(width: usize, height: usize, holes: Vec<[i64; 4]>) -> GridModel {
        GridModel { width, height, holes }
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if self.width == 0 || self.height == 0 {
            return Err(ModelError::DegenerateGrid);
        }
        for h in &self.holes {
            let [x0, y0, x1, y1] = *h;
            if x0 < 0 || y0 < 0 || x1 > self.width as i64 || y1 > self.height as i64 || x0 >= x1 || y0 >= y1 {
                return Err(ModelError::BadHole(*h));
            }
        }
        Ok(())
    }

    /// Whether unit square `sq(x,y)` exists in the grid and lies in a hole.
    fn is_hole(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && x < self.width as i64
            && y < self.height as i64
            && self.holes.iter().any(|[x0, y0, x1, y1]| *x0 <= x && x < *x1 && *y0 <= y && y < *y1)
    }
}

pub fn vertex_id(x: i64, y: i64) -> String {
    format!("v({x},{y})")
}

/// The cubical set of a grid: squares outside holes, every edge not strictly
/// inside a hole, every vertex not strictly inside a hole.
pub fn grid_complex(g: &GridModel) -> Result<CubicalSet, ModelError> {
    g.check()?;
    let (w, h) = (g.width as i64, g.height as i64);
    let mut k = CubicalSet::new();
    for y in 0..=h {
        for x in 0..=w {
            let hidden = g.is_hole(x - 1, y - 1) && g.is_hole(x, y - 1) && g.is_hole(x - 1, y) && g.is_hole(x, y);
            if !hidden {
                k.add(&vertex_id(x, y), 0, &[]);
            }
        }
    }
    for y in 0..=h {
        for x in 0..w {
            if !(g.is_hole(x, y - 1) && g.is_hole(x, y)) {
                k.add(&format!("ex({x},{y})"), 1, &[("1-", &vertex_id(x, y)), ("1+", &vertex_id(x + 1, y))]);
            }
        }
    }
    for y in 0..h {
        for x in 0..=w {
            if !(g.is_hole(x - 1, y) && g.is_hole(x, y)) {
                k.add(&format!("ey({x},{y})"), 1, &[("1-", &vertex_id(x, y)), ("1+", &vertex_id(x, y + 1))]);
            }
        }
    }
    for y in 0..h {
        for x in 0..w {
            if !g.is_hole(x, y) {
                k.add(
                    &format!("sq({x},{y})"),
                    2,
                    &[
                        ("1-", &format!("ex({x},{y})")),
                        ("1+", &format!("ex({x},{})", y + 1)),
                        ("2-", &format!("ey({x},{y})")),
                        ("2+", &format!("ey({},{y})", x + 1)),
                    ],
                );
            }
        }
    }
    Ok(k)
}

/// Generators of `F(K)` truncated at dimension 2: each square becomes a
/// 2-generator from `∂_1^-·∂_2^+` to `∂_2^-·∂_1^+`.
pub fn compile_to_polygraph(k: &CubicalSet) -> Result<Polygraph2, ModelError> {
    if let Some(c) = k.cells().iter().find(|c| c.dim > 2) {
        return Err(ModelError::UnsupportedDimension(c.id.clone(), c.dim));
    }
    let report = validate(k);
    if !report.is_valid() {
        return Err(ModelError::Invalid(report));
    }
    let face = |c: &Cell, i: usize, s: Sign| c.faces[&FaceKey { index: i, sign: s }].clone();
    Ok(Polygraph2 {
        vertices: k.cells_of_dim(0).map(|c| c.id.clone()).collect(),
        gen1: k
            .cells_of_dim(1)
            .map(|c| Gen1 { id: c.id.clone(), src: face(c, 1, Sign::Minus), tgt: face(c, 1, Sign::Plus) })
            .collect(),
        gen2: k
            .cells_of_dim(2)
            .map(|c| Gen2 {
                id: c.id.clone(),
                src: vec![face(c, 1, Sign::Minus), face(c, 2, Sign::Plus)],
                tgt: vec![face(c, 2, Sign::Minus), face(c, 1, Sign::Plus)],
            })
            .collect(),
    })
}

/// Any of the three input formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    Cubical(CubicalSet),
    Grid(GridModel),
    Polygraph(Polygraph2),
}

impl Model {
    /// The polygraph of the model, compiling when needed.
    pub fn to_polygraph(&self) -> Result<Polygraph2, ModelError> {
        match self {
            Model::Cubical(k) => compile_to_polygraph(k),
            Model::Grid(g) => compile_to_polygraph(&grid_complex(g)?),
            Model::Polygraph(p) => Ok(p.clone()),
        }
    }

    /// The cubical set when the model has one.
    pub fn cubical_set(&self) -> Result<Option<CubicalSet>, ModelError> {
        match self {
            Model::Cubical(k) => Ok(Some(k.clone())),
            Model::Grid(g) => Ok(Some(grid_complex(g)?)),
            Model::Polygraph(_) => Ok(None),
        }
    }
}

fn check_keys(v: &Value, path: &str, allowed: &[&str], unknown: &mut Vec<String>) {
    if let Some(obj) = v.as_object() {
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                unknown.push(format!("{path}{k}"));
            }
        }
    }
}

fn field_err(field: &str, message: impl Into<String>) -> ModelError {
    ModelError::Field { field: field.to_string(), message: message.into() }
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value, field: &str) -> Result<T, ModelError> {
    serde_json::from_value(v).map_err(|e| field_err(field, e.to_string()))
}

/// Parse a model from JSON text.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let v: Value = serde_json::from_str(text).map_err(|e| ModelError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let ty = v.get("type").and_then(Value::as_str).ok_or_else(|| field_err("type", "missing or not a string"))?;
    let mut unknown = Vec::new();
    match ty {
        "grid2" => {
            check_keys(&v, "", &["type", "width", "height", "holes"], &mut unknown);
            if !unknown.is_empty() {
                return Err(ModelError::Schema { unknown });
            }
            let width = from_value(v.get("width").cloned().unwrap_or(Value::Null), "width")?;
            let height = from_value(v.get("height").cloned().unwrap_or(Value::Null), "height")?;
            let holes = match v.get("holes") {
                Some(h) => from_value(h.clone(), "holes")?,
                None => Vec::new(),
            };
            let g = GridModel { width, height, holes };
            g.check()?;
            Ok(Model::Grid(g))
        }
        "polygraph2" => {
            check_keys(&v, "", &["type", "vertices", "gen1", "gen2"], &mut unknown);
            for (i, e) in v.get("gen1").and_then(Value::as_array).into_iter().flatten().enumerate() {
                check_keys(e, &format!("gen1[{i}]."), &["id", "src", "tgt"], &mut unknown);
            }
            for (i, e) in v.get("gen2").and_then(Value::as_array).into_iter().flatten().enumerate() {
                check_keys(e, &format!("gen2[{i}]."), &["id", "src", "tgt"], &mut unknown);
            }
            if !unknown.is_empty() {
                return Err(ModelError::Schema { unknown });
            }
            let get = |k: &str| v.get(k).cloned().unwrap_or(Value::Array(Vec::new()));
            Ok(Model::Polygraph(Polygraph2 {
                vertices: from_value(get("vertices"), "vertices")?,
                gen1: from_value(get("gen1"), "gen1")?,
                gen2: from_value(get("gen2"), "gen2")?,
            }))
        }
        "cubical" => {
            check_keys(&v, "", &["type", "dim", "cells"], &mut unknown);
            let cells = v.get("cells").and_then(Value::as_array).cloned().unwrap_or_default();
            for (i, c) in cells.iter().enumerate() {
                check_keys(c, &format!("cells[{i}]."), &["id", "dim", "faces"], &mut unknown);
            }
            if !unknown.is_empty() {
                return Err(ModelError::Schema { unknown });
            }
            let mut k = CubicalSet::new();
            for (i, c) in cells.into_iter().enumerate() {
                let id: String = from_value(c.get("id").cloned().unwrap_or(Value::Null), &format!("cells[{i}].id"))?;
                let dim: usize = from_value(c.get("dim").cloned().unwrap_or(Value::Null), &format!("cells[{i}].dim"))?;
                let raw: BTreeMap<String, String> = match c.get("faces") {
                    Some(f) => from_value(f.clone(), &format!("cells[{i}].faces"))?,
                    None => BTreeMap::new(),
                };
                let mut faces = BTreeMap::new();
                for (key, face) in raw {
                    let key: FaceKey = key.parse().map_err(|m: String| field_err(&format!("cells[{i}].faces"), m))?;
                    faces.insert(key, face);
                }
                k.insert(Cell { id, dim, faces });
            }
            if let Some(d) = v.get("dim") {
                let d: usize = from_value(d.clone(), "dim")?;
                if k.dim() > d {
                    return Err(field_err("dim", format!("declared {d} but a cell has dimension {}", k.dim())));
                }
            }
            Ok(Model::Cubical(k))
        }
        other => Err(field_err("type", format!("unknown model type {other:?}"))),
    }
}

/// Serialize a model to pretty JSON.
pub fn model_to_json(m: &Model) -> Value {
    match m {
        Model::Grid(g) => serde_json::json!({
            "type": "grid2", "width": g.width, "height": g.height, "holes": g.holes,
        }),
        Model::Polygraph(p) => serde_json::json!({
            "type": "polygraph2", "vertices": p.vertices, "gen1": p.gen1, "gen2": p.gen2,
        }),
        Model::Cubical(k) => {
            let cells: Vec<Value> = k
                .cells()
                .iter()
                .map(|c| {
                    let faces: serde_json::Map<String, Value> =
                        c.faces.iter().map(|(key, f)| (key.to_string(), Value::String(f.clone()))).collect();
                    serde_json::json!({ "id": c.id, "dim": c.dim, "faces": faces })
                })
                .collect();
            serde_json::json!({ "type": "cubical", "dim": k.dim(), "cells": cells })
        }
    }
}

pub fn read_model(path: &Path) -> Result<Model, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))?;
    parse_model(&text)
}

pub fn write_model(m: &Model, path: &Path) -> Result<(), ModelError> {
    let text = serde_json::to_string_pretty(&model_to_json(m)).expect("models serialize");
    std::fs::write(path, text + "\n").map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))
}
