//! Quadrature grids and sampled functions on them.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::omega;
use crate::report::fmt_f64;

use super::domain::{Domain, DomainKind};

/// How the nodes of a [`Grid`] were laid out.
#[derive(Clone, Debug)]
pub enum Layout {
    /// Midpoints of a tensor product of cells. `edges[k]` are the cell edges
    /// along axis `k`; `half[i]` are the half-widths of the cell of node `i`.
    Tensor { edges: Vec<Vec<f64>>, half: Vec<Vec<f64>> },
    /// Spherical shells `edges[i] <= |x - c| < edges[i+1]` about the domain
    /// center, node `i` at the mid radius on the first axis.
    Radial { edges: Vec<f64> },
    /// Nodes and weights read from a file, with no cell structure.
    Scattered,
}

/// Nodes with quadrature weights over a domain.
#[derive(Clone, Debug)]
pub struct Grid {
    pub domain: Domain,
    pub layout: Layout,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

fn uniform_edges(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    (0..=m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect()
}

fn merge_breaks(mut edges: Vec<f64>, breaks: &[f64]) -> Vec<f64> {
    let (lo, hi) = (edges[0], *edges.last().unwrap());
    let span = hi - lo;
    for &b in breaks {
        if b > lo && b < hi && !edges.iter().any(|e| (e - b).abs() <= 1e-14 * span) {
            edges.push(b);
        }
    }
    edges.sort_by(f64::total_cmp);
    edges
}

impl Grid {
    /// `m` cells per axis over the domain's bounding box. For a ball, cells
    /// whose midpoint falls outside are dropped and the rest are rescaled to
    /// the exact ball volume.
    pub fn tensor(domain: &Domain, m: usize) -> Result<Grid> {
        Grid::tensor_with_breaks(domain, m, &vec![Vec::new(); domain.n])
    }

    /// As [`Grid::tensor`], with extra cell edges inserted along each axis so
    /// that sets bounded by those coordinates are resolved exactly.
    pub fn tensor_with_breaks(domain: &Domain, m: usize, breaks: &[Vec<f64>]) -> Result<Grid> {
        let n = domain.n;
        if !(1..=3).contains(&n) {
            return Err(Error::Argument(format!("tensor grids support 1 <= n <= 3, got n = {n}")));
        }
        if m == 0 {
            return Err(Error::Argument("a grid needs at least one cell per axis".into()));
        }
        if breaks.len() != n {
            return Err(Error::Argument(format!("expected {n} break lists, got {}", breaks.len())));
        }
        let (lo, hi) = domain.bounds();
        let edges: Vec<Vec<f64>> = (0..n).map(|k| merge_breaks(uniform_edges(lo[k], hi[k], m), &breaks[k])).collect();
        let counts: Vec<usize> = edges.iter().map(|e| e.len() - 1).collect();
        let total: usize = counts.iter().product();
        let mut nodes = Vec::new();
        let mut half = Vec::new();
        let mut weights = Vec::new();
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            let x: Vec<f64> = (0..n).map(|k| 0.5 * (edges[k][idx[k]] + edges[k][idx[k] + 1])).collect();
            let h: Vec<f64> = (0..n).map(|k| 0.5 * (edges[k][idx[k] + 1] - edges[k][idx[k]])).collect();
            if domain.contains(&x) {
                weights.push(h.iter().map(|v| 2.0 * v).product());
                nodes.push(x);
                half.push(h);
            }
            for k in 0..n {
                idx[k] += 1;
                if idx[k] < counts[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        if nodes.is_empty() {
            return Err(Error::Argument("grid has no nodes inside the domain".into()));
        }
        if matches!(domain.kind, DomainKind::Ball { .. }) {
            let s: f64 = weights.iter().sum();
            let f = domain.measure() / s;
            weights.iter_mut().for_each(|w| *w *= f);
        }
        Ok(Grid {
            domain: domain.clone(),
            layout: Layout::Tensor { edges, half },
            nodes,
            weights,
        })
    }

    /// `m` equal-width shells over a ball.
    pub fn radial(domain: &Domain, m: usize) -> Result<Grid> {
        let r = match domain.kind {
            DomainKind::Ball { radius, .. } => radius,
            _ => return Err(Error::Argument("radial grids need a ball domain".into())),
        };
        Grid::radial_edges(domain.n, domain.center().to_vec(), uniform_edges(0.0, r, m.max(1)))
    }

    /// Shells with the given radii `0 = r_0 < r_1 < ... < r_m` about `center`.
    pub fn radial_edges(n: usize, center: Vec<f64>, edges: Vec<f64>) -> Result<Grid> {
        if center.len() != n || n == 0 {
            return Err(Error::Argument("radial grid center must have n coordinates".into()));
        }
        if edges.len() < 2 || edges[0] != 0.0 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Argument("shell radii must start at 0 and increase strictly".into()));
        }
        let w = omega(n);
        let nf = n as i32;
        let mut nodes = Vec::with_capacity(edges.len() - 1);
        let mut weights = Vec::with_capacity(edges.len() - 1);
        for e in edges.windows(2) {
            let mut x = center.clone();
            x[0] += 0.5 * (e[0] + e[1]);
            nodes.push(x);
            weights.push(w * (e[1].powi(nf) - e[0].powi(nf)));
        }
        let domain = Domain::ball(center, *edges.last().unwrap())?;
        Ok(Grid {
            domain,
            layout: Layout::Radial { edges },
            nodes,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.domain.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Shell radii of a radial grid.
    pub fn shell_edges(&self) -> Option<&[f64]> {
        match &self.layout {
            Layout::Radial { edges } => Some(edges),
            _ => None,
        }
    }

    /// Distance of node `i` from the domain center.
    pub fn radius(&self, i: usize) -> f64 {
        super::domain::dist(&self.nodes[i], self.domain.center())
    }
}

/// Values sampled on the nodes of a shared grid.
#[derive(Clone, Debug)]
pub struct GridFunction {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<GridFunction> {
        if values.len() != grid.len() {
            return Err(Error::Argument(format!("{} values for a grid of {} nodes", values.len(), grid.len())));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn<F: FnMut(&[f64]) -> f64>(grid: Arc<Grid>, mut f: F) -> GridFunction {
        let values = grid.nodes.iter().map(|x| f(x)).collect();
        GridFunction { grid, values }
    }

    pub fn zeros(grid: Arc<Grid>) -> GridFunction {
        let values = vec![0.0; grid.len()];
        GridFunction { grid, values }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    pub fn abs(&self) -> GridFunction {
        self.map(f64::abs)
    }

    /// Pointwise product with another function on the same grid.
    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.len() != other.grid.len() {
            return Err(Error::Argument("functions live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(GridFunction {
            grid: self.grid.clone(),
            values,
        })
    }

    /// `int u` with the grid weights.
    pub fn integral(&self) -> f64 {
        self.values.iter().zip(&self.grid.weights).map(|(v, w)| v * w).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().zip(&self.grid.weights).all(|(v, w)| *v == 0.0 || *w == 0.0)
    }

    /// CSV text: a `#` line with `n`, layout and domain, then
    /// `x1..xn,weight,value` rows.
    pub fn to_csv(&self) -> String {
        let g = &self.grid;
        let layout = match g.layout {
            Layout::Tensor { .. } => "tensor",
            Layout::Radial { .. } => "radial",
            Layout::Scattered => "scattered",
        };
        let mut s = String::new();
        let _ = writeln!(s, "# n={} layout={} domain={}", g.n(), layout, g.domain.describe());
        let coords: Vec<String> = (1..=g.n()).map(|k| format!("x{k}")).collect();
        let _ = writeln!(s, "{},weight,value", coords.join(","));
        for ((x, w), v) in g.nodes.iter().zip(&g.weights).zip(&self.values) {
            let mut row: Vec<String> = x.iter().map(|c| fmt_f64(*c)).collect();
            row.push(fmt_f64(*w));
            row.push(fmt_f64(*v));
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parses [`GridFunction::to_csv`] output. The result has a scattered layout.
    pub fn from_csv(text: &str) -> Result<GridFunction> {
        let cfg = |msg: String| Error::Config {
            path: "grid csv".into(),
            msg,
        };
        let mut lines = text.lines();
        let head = lines.next().ok_or_else(|| cfg("empty file".into()))?;
        let head = head.strip_prefix('#').ok_or_else(|| cfg("first line must start with `#`".into()))?.trim();
        let n_part = head.split_whitespace().next().ok_or_else(|| cfg("missing n".into()))?;
        let n: usize = n_part
            .strip_prefix("n=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| cfg(format!("expected `n=<int>`, found `{n_part}`")))?;
        let dom = head.split_once("domain=").map(|(_, d)| d).ok_or_else(|| cfg("missing domain".into()))?;
        let domain = Domain::parse(n, dom)?;
        lines.next().ok_or_else(|| cfg("missing column header".into()))?;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<f64> = line
                .split(',')
                .map(|c| parse_cell(c.trim()))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| cfg(format!("row {}: {e}", i + 1)))?;
            if cells.len() != n + 2 {
                return Err(cfg(format!("row {} has {} columns, expected {}", i + 1, cells.len(), n + 2)));
            }
            nodes.push(cells[..n].to_vec());
            weights.push(cells[n]);
            values.push(cells[n + 1]);
        }
        let grid = Arc::new(Grid {
            domain,
            layout: Layout::Scattered,
            nodes,
            weights,
        });
        GridFunction::new(grid, values)
    }

    pub fn read_csv(path: &Path) -> Result<GridFunction> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        GridFunction::from_csv(&text)
    }
}

fn parse_cell(c: &str) -> std::result::Result<f64, String> {
    match c {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => c.parse::<f64>().map_err(|_| format!("`{c}` is not a number")),
    }
}
