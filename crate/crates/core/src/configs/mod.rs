//! Finite point configurations and their distance graphs.

mod graph;
mod mis;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use graph::{connected_graphs, distance_graph, FiniteGraph, DEFAULT_MATCH_TOL};
pub use mis::{independence_number, is_alpha_critical, maximum_independent_set, MAX_VERTICES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Sphere,
    Euclidean,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Sphere => "sphere",
            Space::Euclidean => "euclidean",
        })
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(Space::Sphere),
            "euclidean" => Ok(Space::Euclidean),
            _ => Err(Error::InvalidParameter(format!("unknown space tag `{s}`"))),
        }
    }
}

const UNIT_NORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointConfig {
    dim: usize,
    points: Vec<Vec<f64>>,
    space: Space,
}

impl PointConfig {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, space: Space) -> Result<Self> {
        if dim == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!("point {i} is not finite")));
            }
            if space == Space::Sphere && (norm(p) - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::InvalidParameter(format!(
                    "point {i} is not on the unit sphere (norm {})",
                    norm(p)
                )));
            }
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(Error::InvalidParameter(format!("points {j} and {i} coincide")));
                }
            }
        }
        Ok(PointConfig { dim, points, space })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// Multiply every coordinate by `factor`; the result is euclidean-tagged
    /// unless the factor is 1.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| p.iter().map(|x| x * factor).collect())
            .collect();
        let space = if factor == 1.0 { self.space } else { Space::Euclidean };
        PointConfig::new(self.dim, points, space)
    }

    /// Same points, euclidean tag.
    pub fn as_euclidean(&self) -> Self {
        PointConfig {
            dim: self.dim,
            points: self.points.clone(),
            space: Space::Euclidean,
        }
    }

    /// Smallest nonzero pairwise euclidean distance.
    pub fn min_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.len() {
            for j in 0..i {
                let d = distance(&self.points[i], &self.points[j]);
                if d > 0.0 && best.map_or(true, |b| d < b) {
                    best = Some(d);
                }
            }
        }
        best
    }

    /// Append a point (used for the extra vertex of subgraph constraints).
    pub fn with_point(&self, p: Vec<f64>) -> Result<Self> {
        let mut points = self.points.clone();
        points.push(p);
        PointConfig::new(self.dim, points, self.space)
    }

    /// Points in the order given by `idx`.
    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        let points = idx.iter().map(|&i| self.points[i].clone()).collect();
        PointConfig::new(self.dim, points, self.space)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, Space)> = None;
        let mut points = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match header {
                None => {
                    let toks: Vec<&str> = line.split_whitespace().collect();
                    if toks.len() != 4 || toks[0] != "dim" || toks[2] != "space" {
                        return Err(Error::parse(line_no, "expected `dim <n> space <sphere|euclidean>`"));
                    }
                    let n = toks[1]
                        .parse::<usize>()
                        .map_err(|e| Error::parse(line_no, format!("bad dimension: {e}")))?;
                    let space = toks[3].parse::<Space>().map_err(|e| Error::parse(line_no, e.to_string()))?;
                    header = Some((n, space));
                }
                Some((n, _)) => {
                    let p = line
                        .split_whitespace()
                        .map(|t| t.parse::<f64>())
                        .collect::<std::result::Result<Vec<f64>, _>>()
                        .map_err(|e| Error::parse(line_no, format!("bad coordinate: {e}")))?;
                    if p.len() != n {
                        return Err(Error::parse(
                            line_no,
                            format!("expected {n} coordinates, found {}", p.len()),
                        ));
                    }
                    points.push(p);
                }
            }
        }
        let (n, space) = header.ok_or_else(|| Error::parse(0, "missing header"))?;
        PointConfig::new(n, points, space)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("dim {} space {}\n", self.dim, self.space);
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|x| format!("{x:e}")).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

pub(crate) fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConfigName {
    /// 120 vertices of the 600-cell on the unit sphere of R^4.
    Cell600,
    /// The 240 minimal vectors of E8, multiplied by `scale` (the default
    /// 1/√2 puts them on the unit sphere with minimal distance 1).
    E8Kissing { scale: f64 },
    /// Regular simplex of side 1 in R^n.
    Simplex(usize),
    Moser,
    File(PathBuf),
}

impl FromStr for ConfigName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "600cell" => return Ok(ConfigName::Cell600),
            "e8" | "e8kissing" => {
                return Ok(ConfigName::E8Kissing {
                    scale: std::f64::consts::FRAC_1_SQRT_2,
                })
            }
            "moser" => return Ok(ConfigName::Moser),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("simplex") {
            let inner = rest.trim_start_matches('(').trim_end_matches(')');
            let n = inner
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad simplex dimension in `{s}`")))?;
            return Ok(ConfigName::Simplex(n));
        }
        if let Some(rest) = s.strip_prefix("file:") {
            return Ok(ConfigName::File(PathBuf::from(rest)));
        }
        Err(Error::InvalidParameter(format!("unknown configuration `{s}`")))
    }
}

pub fn generate_config(name: &ConfigName) -> Result<PointConfig> {
    match name {
        ConfigName::Cell600 => PointConfig::new(4, cell600(), Space::Sphere),
        ConfigName::E8Kissing { scale } => {
            let pts: Vec<Vec<f64>> = e8_roots()
                .into_iter()
                .map(|p| p.into_iter().map(|x| x * scale).collect())
                .collect();
            let space = if (scale * scale * 2.0 - 1.0).abs() < 1e-15 {
                Space::Sphere
            } else {
                Space::Euclidean
            };
            // unit vectors carry a norm error of one ulp at most; renormalize
            let pts = if space == Space::Sphere {
                pts.into_iter()
                    .map(|p| {
                        let r = norm(&p);
                        p.into_iter().map(|x| x / r).collect()
                    })
                    .collect()
            } else {
                pts
            };
            PointConfig::new(8, pts, space)
        }
        ConfigName::Simplex(n) => {
            if *n == 0 {
                return Err(Error::UnsupportedDimension(0));
            }
            PointConfig::new(*n, simplex(*n), Space::Euclidean)
        }
        ConfigName::Moser => PointConfig::new(2, moser(), Space::Euclidean),
        ConfigName::File(path) => read_config(path),
    }
}

pub fn read_config(path: &Path) -> Result<PointConfig> {
    PointConfig::parse(&std::fs::read_to_string(path)?)
}

fn cell600() -> Vec<Vec<f64>> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts = Vec::with_capacity(120);
    for i in 0..4 {
        for s in [-1.0, 1.0] {
            let mut p = vec![0.0; 4];
            p[i] = s;
            pts.push(p);
        }
    }
    for mask in 0..16u32 {
        pts.push((0..4).map(|i| if mask >> i & 1 == 1 { -0.5 } else { 0.5 }).collect());
    }
    // even permutations of (±φ, ±1, ±1/φ, 0)/2
    let base = [phi / 2.0, 0.5, 0.5 / phi, 0.0];
    for perm in even_permutations4() {
        for mask in 0..8u32 {
            let mut p = vec![0.0; 4];
            for (slot, &src) in perm.iter().enumerate() {
                let mut v = base[src];
                if src < 3 && mask >> src & 1 == 1 {
                    v = -v;
                }
                p[slot] = v;
            }
            pts.push(p);
        }
    }
    pts
}

fn even_permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (0..i).all(|j| p[i] != p[j]));
                    if distinct && inversions(&p) % 2 == 0 {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn inversions(p: &[usize]) -> usize {
    (0..p.len())
        .map(|i| (i + 1..p.len()).filter(|&j| p[i] > p[j]).count())
        .sum()
}

fn e8_roots() -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(240);
    for i in 0..8 {
        for j in i + 1..8 {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut p = vec![0.0; 8];
                p[i] = si;
                p[j] = sj;
                pts.push(p);
            }
        }
    }
    for mask in 0..256u32 {
        if mask.count_ones() % 2 == 0 {
            pts.push((0..8).map(|i| if mask >> i & 1 == 1 { -0.5 } else { 0.5 }).collect());
        }
    }
    pts
}

fn simplex(n: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![0.0; n]];
    for k in 1..=n {
        let mut c = vec![0.0; n];
        for p in &pts {
            for (ci, x) in c.iter_mut().zip(p) {
                *ci += x / pts.len() as f64;
            }
        }
        let r2: f64 = c.iter().map(|x| x * x).sum();
        c[k - 1] = (1.0 - r2).sqrt();
        pts.push(c);
    }
    pts
}

fn moser() -> Vec<Vec<f64>> {
    let h = 3f64.sqrt() / 2.0;
    let rhombus = [[0.0, 0.0], [h, 0.5], [h, -0.5], [2.0 * h, 0.0]];
    // second rhombus: rotate about the origin so the far tips are at distance 1
    let c: f64 = 5.0 / 6.0;
    let s = (1.0 - c * c).sqrt();
    let rot = |p: [f64; 2]| vec![c * p[0] - s * p[1], s * p[0] + c * p[1]];
    let mut pts: Vec<Vec<f64>> = rhombus.iter().map(|p| p.to_vec()).collect();
    for p in &rhombus[1..] {
        pts.push(rot(*p));
    }
    pts
}
