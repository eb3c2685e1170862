//! Per-step questions in the quotient `I(Symm^r F_p)/M`, read off one echelon
//! whose columns are ordered by filtration step.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{membership_solve, FpEchelon, Outcome, SparseVector};
use crate::symm::{eta_steps, standard_filtration, to_eta_coordinates, EtaLayout, FiltrationStep};
use crate::tree::{Ball, CoordinateSpace, TreeVertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum StepOutcome {
    Zero,
    Linear(u64),
    Quadratic(u64),
    Unknown,
    SkippedByVanishing,
}

impl From<Outcome> for StepOutcome {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Zero => StepOutcome::Zero,
            Outcome::Linear(l) => StepOutcome::Linear(l),
            Outcome::Quadratic(m) => StepOutcome::Quadratic(m),
            Outcome::Unknown => StepOutcome::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub i: usize,
    pub a: u64,
    pub b: u64,
    pub outcome: StepOutcome,
}

/// Column layout `((S−1−step)·|B| + vertex)·(r+1) + η`.
pub struct EtaFrame {
    pub p: u64,
    pub r: usize,
    pub steps: Vec<FiltrationStep>,
    step_of: Vec<usize>,
    layout: EtaLayout,
    ball_len: usize,
    /// η coordinates of each monomial, by monomial index.
    images: Vec<Vec<(usize, u64)>>,
}

impl EtaFrame {
    pub fn new(p: u64, r: usize, radius: u32) -> Result<Self> {
        let steps = standard_filtration(p, r);
        let ball_len = Ball::new(p, radius).len();
        let total = steps.len() as u64 * ball_len as u64 * (r as u64 + 1);
        if total >= u32::MAX as u64 {
            return Err(Error::ResourceLimit(format!("{total} coordinates exceed the index width")));
        }
        let images = (0..=r)
            .map(|i| {
                let mut poly = vec![0; r + 1];
                poly[i] = 1;
                to_eta_coordinates(p, r, &poly, p)
                    .into_iter()
                    .enumerate()
                    .filter(|e| e.1 != 0)
                    .collect()
            })
            .collect();
        Ok(EtaFrame { p, r, step_of: eta_steps(p, r), layout: EtaLayout::new(p, r), steps, ball_len, images })
    }

    /// Position of step `i` in `steps`.
    fn rank(&self, i: usize) -> usize {
        self.steps.iter().position(|s| s.i == i).expect("step exists")
    }

    fn column(&self, vidx: usize, eta: usize) -> u32 {
        let s = self.steps.len() - 1 - self.rank(self.step_of[eta]);
        ((s * self.ball_len + vidx) * (self.r + 1) + eta) as u32
    }

    /// Columns of step `i` and all earlier steps lie at or above this.
    pub fn floor(&self, i: usize) -> u32 {
        ((self.steps.len() - 1 - self.rank(i)) * self.ball_len * (self.r + 1)) as u32
    }

    /// Rewrites a tree-coordinate row in η coordinates.
    pub fn convert(&self, space: &CoordinateSpace, row: &SparseVector<u64>) -> SparseVector<u64> {
        let p = self.p;
        let w = self.r + 1;
        let mut out: Vec<(u32, u64)> = Vec::with_capacity(row.len() * 2);
        let mut k = 0;
        let mut acc = vec![0u64; w];
        while k < row.len() {
            let vidx = row.entries[k].0 as usize / w;
            let eps = space.ball.vertex(vidx).eps;
            while k < row.len() && row.entries[k].0 as usize / w == vidx {
                let (c, x) = row.entries[k];
                let i = c as usize % w;
                let mono = if eps == 0 { i } else { self.r - i };
                for &(e, y) in &self.images[mono] {
                    acc[e] = (acc[e] + x * y) % p;
                }
                k += 1;
            }
            for (e, a) in acc.iter_mut().enumerate() {
                if *a != 0 {
                    out.push((self.column(vidx, e), *a));
                    *a = 0;
                }
            }
        }
        out.sort_unstable_by_key(|x| x.0);
        SparseVector { entries: out }
    }

    /// `Σ_v (v, gen)` over the given vertices.
    fn witness(&self, space: &CoordinateSpace, gen: (usize, usize), verts: &[TreeVertex]) -> SparseVector<u64> {
        let e = self.layout.index(gen.0, gen.1);
        let mut entries: Vec<(u32, u64)> =
            verts.iter().map(|&v| (self.column(space.ball.index(v), e), 1)).collect();
        entries.sort_unstable_by_key(|x| x.0);
        SparseVector { entries }
    }

    /// `(v_i, w_{i,1}, w_{i,2})`; the last is `None` when the ball is too small.
    pub fn witnesses(
        &self,
        space: &CoordinateSpace,
        step: &FiltrationStep,
    ) -> (SparseVector<u64>, SparseVector<u64>, Option<SparseVector<u64>>) {
        let p = self.p;
        let t0 = self.witness(space, step.gen, &[TreeVertex::ORIGIN]);
        let mut v1: Vec<TreeVertex> = (0..p).map(|u| TreeVertex::new(0, 1, u)).collect();
        if step.a == 0 {
            v1.push(TreeVertex::new(1, 0, 0));
        }
        let t1 = self.witness(space, step.gen, &v1);
        let t2 = (space.ball.radius >= 2).then(|| {
            let mut v2: Vec<TreeVertex> = (0..p * p).map(|u| TreeVertex::new(0, 2, u)).collect();
            if step.a == 0 {
                v2.extend((0..p).map(|u| TreeVertex::new(1, 1, u)));
                v2.push(TreeVertex::ORIGIN);
            }
            self.witness(space, step.gen, &v2)
        });
        (t0, t1, t2)
    }
}

/// Echelon of the relation span in η coordinates.
pub fn eta_echelon(frame: &EtaFrame, space: &CoordinateSpace, rows: &[SparseVector<u64>]) -> FpEchelon {
    let converted: Vec<SparseVector<u64>> = rows.par_iter().map(|r| frame.convert(space, r)).collect();
    let mut ech = FpEchelon::new(frame.p);
    for r in &converted {
        ech.insert(r);
    }
    ech
}

/// Steps at or beyond which every graded piece vanishes, from `v(a_p)`.
pub fn vanishing_start(p: u64, r: usize, v_floor: i64) -> Option<usize> {
    let d0 = v_floor + 1;
    (r as i64 >= d0 * (p as i64 + 1)).then_some(2 * d0 as usize)
}

/// Outcome of every step. `compute_skipped` answers the vanishing steps too.
pub fn analyze_filtration(
    frame: &EtaFrame,
    space: &CoordinateSpace,
    ech: &FpEchelon,
    v_floor: i64,
    compute_skipped: bool,
) -> Vec<StepReport> {
    let skip_from = vanishing_start(frame.p, frame.r, v_floor);
    frame
        .steps
        .iter()
        .map(|s| {
            let skipped = skip_from.is_some_and(|i0| s.i >= i0);
            let outcome = if s.dim() == 0 {
                StepOutcome::Zero
            } else if skipped && !compute_skipped {
                StepOutcome::SkippedByVanishing
            } else if s.i == 1 && !compute_skipped {
                StepOutcome::Zero
            } else {
                let (t0, t1, t2) = frame.witnesses(space, s);
                let floor = frame.floor(s.i);
                match t2 {
                    Some(t2) => membership_solve(ech, floor, [&t0, &t1, &t2]).into(),
                    None => match membership_solve(ech, floor, [&t0, &t1, &t1]) {
                        Outcome::Quadratic(_) | Outcome::Unknown => StepOutcome::Unknown,
                        o => o.into(),
                    },
                }
            };
            StepReport { i: s.i, a: s.a, b: s.b, outcome }
        })
        .collect()
}
