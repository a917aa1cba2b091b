//! Grid check of the sublevel-set bound `|{x ∈ B : ‖g(x)‖ < ε}| ≤ 4d(ε/‖g‖_B)^{1/k}|B|`
//! for polynomial maps of degree `k`.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::rational::to_f64;
use crate::symord::PolynomialMap;

/// Largest number of grid points evaluated for one map.
pub const MAX_GRID_POINTS: usize = 1 << 24;

/// One `ε` of the check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoodnessRow {
    pub eps: f64,
    /// Grid estimate of the sublevel-set measure.
    pub measure: f64,
    pub bound: f64,
    pub violation: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodnessReport {
    /// Grid estimate of `sup_B ‖g‖∞`.
    pub norm: f64,
    pub degree: u32,
    pub rows: Vec<GoodnessRow>,
}

impl GoodnessReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violation).count()
    }
}

/// Dense term list `(coefficient, exponents)` of one component.
type Terms = Vec<(f64, Vec<usize>)>;

/// Component values at every point of the product grid `axes` (first axis
/// fastest), flattened as `point·N + component`, via per-axis power tables.
fn grid_values(terms: &[Terms], axes: &[Vec<f64>], max_degree: usize) -> Vec<f64> {
    let d = axes.len();
    let powers: Vec<Vec<Vec<f64>>> = axes
        .iter()
        .map(|axis| axis.iter().map(|&x| (0..=max_degree).map(|e| x.powi(e as i32)).collect()).collect())
        .collect();
    let per_axis = axes[0].len();
    let total = per_axis.pow(d as u32);
    (0..total)
        .into_par_iter()
        .flat_map_iter(|flat| {
            let mut idx = vec![0usize; d];
            let mut rest = flat;
            for slot in idx.iter_mut() {
                *slot = rest % per_axis;
                rest /= per_axis;
            }
            terms
                .iter()
                .map(|component| {
                    component
                        .iter()
                        .map(|(c, e)| c * e.iter().enumerate().map(|(v, &k)| powers[v][idx[v]][k]).product::<f64>())
                        .sum::<f64>()
                })
                .collect::<Vec<f64>>()
        })
        .collect()
}

/// Length of `{t ∈ [0, 1] : |a_i + (b_i − a_i)t| < ε for all i}`.
fn segment_fraction(a: &[f64], b: &[f64], eps: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for (x, y) in a.iter().zip(b) {
        let s = y - x;
        if s == 0.0 {
            if x.abs() >= eps {
                return 0.0;
            }
            continue;
        }
        let (t1, t2) = ((-eps - x) / s, (eps - x) / s);
        lo = lo.max(t1.min(t2));
        hi = hi.min(t1.max(t2));
        if lo >= hi {
            return 0.0;
        }
    }
    hi - lo
}

/// A polygon vertex in cell coordinates with the interpolated component values.
#[derive(Clone)]
struct Vertex {
    u: f64,
    v: f64,
    vals: Vec<f64>,
}

fn lerp(p: &Vertex, q: &Vertex, t: f64) -> Vertex {
    Vertex {
        u: p.u + t * (q.u - p.u),
        v: p.v + t * (q.v - p.v),
        vals: p.vals.iter().zip(&q.vals).map(|(a, b)| a + t * (b - a)).collect(),
    }
}

/// Area of `{max_i |L_i| < ε}` inside a triangle on which every `L_i` is the
/// affine interpolant of the vertex values, by Sutherland–Hodgman clipping.
/// Corners are given in cell coordinates with their component values.
fn triangle_area(corners: [((f64, f64), &[f64]); 3], eps: f64) -> f64 {
    let n = corners[0].1.len();
    let outside = (0..n).any(|i| corners.iter().all(|c| c.1[i] >= eps) || corners.iter().all(|c| c.1[i] <= -eps));
    if outside {
        return 0.0;
    }
    if corners.iter().all(|c| c.1.iter().all(|x| x.abs() < eps)) {
        return 0.5;
    }
    let mut poly: Vec<Vertex> = corners.iter().map(|&((u, v), vals)| Vertex { u, v, vals: vals.to_vec() }).collect();
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let slack = |p: &Vertex| eps - sign * p.vals[i];
            let mut next = Vec::with_capacity(poly.len() + 2);
            for (j, p) in poly.iter().enumerate() {
                let q = &poly[(j + 1) % poly.len()];
                let (sp, sq) = (slack(p), slack(q));
                if sp > 0.0 {
                    next.push(p.clone());
                }
                if (sp > 0.0) != (sq > 0.0) {
                    next.push(lerp(p, q, sp / (sp - sq)));
                }
            }
            poly = next;
            if poly.len() < 3 {
                return 0.0;
            }
        }
    }
    let twice: f64 = (0..poly.len())
        .map(|j| {
            let (p, q) = (&poly[j], &poly[(j + 1) % poly.len()]);
            p.u * q.v - q.u * p.v
        })
        .sum();
    twice.abs() / 2.0
}

/// Sublevel measure from the vertex values, as a fraction of the box. Cells
/// are interpolated linearly (split into two triangles in the plane); above
/// two dimensions each cell counts by its centre value instead.
fn sublevel_fraction(values: &[f64], n: usize, d: usize, resolution: usize, eps: f64, centres: &[f64]) -> f64 {
    let per_axis = resolution + 1;
    let at = |point: usize| &values[point * n..(point + 1) * n];
    match d {
        1 => {
            (0..resolution).into_par_iter().map(|j| segment_fraction(at(j), at(j + 1), eps)).sum::<f64>()
                / resolution as f64
        }
        2 => {
            (0..resolution * resolution)
                .into_par_iter()
                .map(|cell| {
                    let (i, j) = (cell % resolution, cell / resolution);
                    let c00 = ((0.0, 0.0), at(j * per_axis + i));
                    let c10 = ((1.0, 0.0), at(j * per_axis + i + 1));
                    let c01 = ((0.0, 1.0), at((j + 1) * per_axis + i));
                    let c11 = ((1.0, 1.0), at((j + 1) * per_axis + i + 1));
                    triangle_area([c00, c10, c11], eps) + triangle_area([c00, c11, c01], eps)
                })
                .sum::<f64>()
                / (resolution * resolution) as f64
        }
        _ => {
            let cells = centres.len() / n;
            (0..cells).filter(|&c| centres[c * n..(c + 1) * n].iter().all(|x| x.abs() < eps)).count() as f64
                / cells as f64
        }
    }
}

/// Grid check over the box `[lo, hi]` with `resolution` cells per axis. The
/// norm is the maximum over the cell vertices. In one and two dimensions the
/// measure integrates the piecewise-linear interpolant of the vertex values,
/// which is exact for affine maps and sees sublevel sets thinner than a cell;
/// higher dimensions count cell centres. A violation is a measure above
/// `bound·(1 + slack)`.
pub fn goodness_bound_check(
    g: &PolynomialMap,
    lo: &[f64],
    hi: &[f64],
    epsilons: &[f64],
    resolution: usize,
    slack: f64,
) -> Result<GoodnessReport> {
    let d = g.input_arity();
    if lo.len() != d || hi.len() != d {
        return Err(Error::ArityMismatch { expected: d, found: lo.len().min(hi.len()) });
    }
    if lo.iter().zip(hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
        return invalid("the box must be nondegenerate and finite");
    }
    if resolution == 0 || (resolution + 1).checked_pow(d as u32).is_none_or(|n| n > MAX_GRID_POINTS) {
        return invalid(format!("resolution {resolution} in dimension {d} exceeds the grid limit"));
    }
    if epsilons.iter().any(|e| !(*e > 0.0)) {
        return invalid("epsilons must be positive");
    }
    let degree = g.degree();
    let max_degree = degree as usize;
    let n = g.components().len();
    let terms: Vec<Terms> = g
        .components()
        .iter()
        .map(|c| c.terms().map(|(e, k)| (to_f64(k), e.0[..d].iter().map(|&x| x as usize).collect())).collect())
        .collect();
    let axis = |k: usize, count: usize, offset: f64| -> Vec<f64> {
        let step = (hi[k] - lo[k]) / resolution as f64;
        (0..count).map(|i| lo[k] + (i as f64 + offset) * step).collect()
    };
    let vertices: Vec<Vec<f64>> = (0..d).map(|k| axis(k, resolution + 1, 0.0)).collect();
    let values = grid_values(&terms, &vertices, max_degree);
    let centres = if d > 2 {
        let midpoints: Vec<Vec<f64>> = (0..d).map(|k| axis(k, resolution, 0.5)).collect();
        grid_values(&terms, &midpoints, max_degree)
    } else {
        Vec::new()
    };
    let norm = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let volume: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    // the bound only needs a degree bound, and a constant map has degree ≤ 1
    let k = degree.max(1) as f64;
    let rows = epsilons
        .iter()
        .map(|&eps| {
            let measure = sublevel_fraction(&values, n, d, resolution, eps, &centres) * volume;
            let bound = if norm > 0.0 { 4.0 * d as f64 * (eps / norm).powf(1.0 / k) * volume } else { f64::INFINITY };
            GoodnessRow { eps, measure, bound, violation: measure > bound * (1.0 + slack) }
        })
        .collect();
    Ok(GoodnessReport { norm, degree, rows })
}

/// `count` values spaced evenly in log scale over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}
