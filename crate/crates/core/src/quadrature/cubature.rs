//! Adaptive tensor-product Gauss–Kronrod cubature on axis-aligned 3D boxes.

use std::cmp::Ordering;

use rayon::prelude::*;

use super::rules::{GK7_GAUSS_WEIGHTS, GK7_KRONROD_WEIGHTS, GK7_NODES};
use super::{IntegralResult, QuadratureConfig, QuadratureError, Quantity};

pub(crate) const EVALS_PER_CELL: u64 = 343;

/// Upper bound on cells split per round.
const MAX_BATCH: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Box3 {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Box3 {
    pub fn new(lo: [f64; 3], hi: [f64; 3]) -> Self {
        Self { lo, hi }
    }

    fn bisect(&self, dim: usize) -> (Box3, Box3) {
        let mid = 0.5 * (self.lo[dim] + self.hi[dim]);
        let mut a = *self;
        let mut b = *self;
        a.hi[dim] = mid;
        b.lo[dim] = mid;
        (a, b)
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell<T> {
    bx: Box3,
    depth: u32,
    value: T,
    error: T,
    error_mag: f64,
    split_dim: usize,
}

/// Kronrod value, Gauss error and preferred split axis for one box.
fn evaluate<T: Quantity, F: Fn([f64; 3]) -> T>(f: &F, bx: &Box3, depth: u32) -> Cell<T> {
    let half: [f64; 3] = std::array::from_fn(|d| 0.5 * (bx.hi[d] - bx.lo[d]));
    let mid: [f64; 3] = std::array::from_fn(|d| 0.5 * (bx.hi[d] + bx.lo[d]));
    let mut kkk = T::default();
    let mut ggg = T::default();
    // one axis reduced to the Gauss rule, the others Kronrod
    let mut reduced = [T::default(); 3];
    for i in 0..7 {
        let x = mid[0] + half[0] * GK7_NODES[i];
        for j in 0..7 {
            let y = mid[1] + half[1] * GK7_NODES[j];
            for k in 0..7 {
                let z = mid[2] + half[2] * GK7_NODES[k];
                let v = f([x, y, z]);
                let (ki, kj, kk) = (GK7_KRONROD_WEIGHTS[i], GK7_KRONROD_WEIGHTS[j], GK7_KRONROD_WEIGHTS[k]);
                let (gi, gj, gk) = (GK7_GAUSS_WEIGHTS[i], GK7_GAUSS_WEIGHTS[j], GK7_GAUSS_WEIGHTS[k]);
                kkk = kkk + v * (ki * kj * kk);
                if gi * gj * gk != 0.0 {
                    ggg = ggg + v * (gi * gj * gk);
                }
                if gi != 0.0 {
                    reduced[0] = reduced[0] + v * (gi * kj * kk);
                }
                if gj != 0.0 {
                    reduced[1] = reduced[1] + v * (ki * gj * kk);
                }
                if gk != 0.0 {
                    reduced[2] = reduced[2] + v * (ki * kj * gk);
                }
            }
        }
    }
    let jac = half[0] * half[1] * half[2];
    let value = kkk * jac;
    let error = (kkk - ggg).abs() * jac;
    let mut split_dim = 0;
    let mut worst = -1.0;
    for (d, r) in reduced.iter().enumerate() {
        let e = (kkk - *r).magnitude();
        if e > worst {
            worst = e;
            split_dim = d;
        }
    }
    Cell { bx: *bx, depth, value, error, error_mag: error.magnitude(), split_dim }
}

/// Leaf cells of an adaptive integration, kept in a deterministic order.
pub(crate) struct Cubature<'a, T, F> {
    f: &'a F,
    cfg: &'a QuadratureConfig,
    leaves: Vec<Cell<T>>,
    pub evaluations: u64,
}

impl<'a, T, F> Cubature<'a, T, F>
where
    T: Quantity,
    F: Fn([f64; 3]) -> T + Sync,
{
    pub fn new(f: &'a F, cfg: &'a QuadratureConfig) -> Self {
        Self { f, cfg, leaves: Vec::new(), evaluations: 0 }
    }

    pub fn add_boxes(&mut self, boxes: &[Box3]) {
        let f = self.f;
        let cells: Vec<Cell<T>> = boxes.par_iter().map(|b| evaluate(f, b, 0)).collect();
        self.evaluations += EVALS_PER_CELL * cells.len() as u64;
        self.leaves.extend(cells);
    }

    /// Value and error summed in storage order.
    pub fn totals(&self) -> (T, T) {
        let mut value = T::default();
        let mut error = T::default();
        for c in &self.leaves {
            value = value + c.value;
            error = error + c.error;
        }
        (value, error)
    }

    pub fn result(&self, z_extent_used: f64) -> IntegralResult<T> {
        let (value, error_estimate) = self.totals();
        IntegralResult { value, error_estimate, evaluations: self.evaluations, z_extent_used }
    }

    /// Refine until the summed cell error is at most `share` of the target.
    pub fn refine(&mut self, share: f64, z_extent: f64) -> Result<(), QuadratureError<T>> {
        let max_depth = self.cfg.max_refinement_depth;
        loop {
            let (value, error) = self.totals();
            if !value.is_finite() || !error.is_finite() {
                return Err(QuadratureError::Domain("integrand is not finite on the domain".into()));
            }
            let target = share * self.cfg.target(value.magnitude());
            let err = error.magnitude();
            if err <= target {
                return Ok(());
            }
            if self.evaluations >= self.cfg.max_evaluations {
                return Err(QuadratureError::NotConverged {
                    best: self.result(z_extent),
                    target,
                    reason: format!("evaluation budget {} exhausted", self.cfg.max_evaluations),
                });
            }
            let stuck: f64 = self.leaves.iter().filter(|c| c.depth >= max_depth).map(|c| c.error_mag).sum();
            if stuck > target {
                return Err(QuadratureError::NotConverged {
                    best: self.result(z_extent),
                    target,
                    reason: format!("cells at maximum depth {max_depth} carry error {stuck:e}"),
                });
            }

            let mut order: Vec<usize> = (0..self.leaves.len()).filter(|&i| self.leaves[i].depth < max_depth).collect();
            order.sort_unstable_by(|&a, &b| {
                self.leaves[b]
                    .error_mag
                    .partial_cmp(&self.leaves[a].error_mag)
                    .unwrap_or(Ordering::Equal)
                    .then(a.cmp(&b))
            });
            let excess = err - target;
            let mut picked = Vec::new();
            let mut acc = 0.0;
            for i in order {
                picked.push(i);
                acc += self.leaves[i].error_mag;
                if acc >= 0.5 * excess || picked.len() >= MAX_BATCH {
                    break;
                }
            }

            let f = self.f;
            let leaves = &self.leaves;
            let children: Vec<(Cell<T>, Cell<T>)> = picked
                .par_iter()
                .map(|&i| {
                    let c = &leaves[i];
                    let (a, b) = c.bx.bisect(c.split_dim);
                    (evaluate(f, &a, c.depth + 1), evaluate(f, &b, c.depth + 1))
                })
                .collect();
            self.evaluations += 2 * EVALS_PER_CELL * children.len() as u64;
            for (i, (a, b)) in picked.into_iter().zip(children) {
                self.leaves[i] = a;
                self.leaves.push(b);
            }
        }
    }
}

/// Adaptive integral of `f` over a single box, without any tail handling.
#[cfg(test)]
pub(crate) fn integrate_box<T, F>(
    f: &F,
    bx: Box3,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<T>, QuadratureError<T>>
where
    T: Quantity,
    F: Fn([f64; 3]) -> T + Sync,
{
    let mut cub = Cubature::new(f, cfg);
    cub.add_boxes(&[bx]);
    cub.refine(1.0, 0.0)?;
    Ok(cub.result(0.0))
}
