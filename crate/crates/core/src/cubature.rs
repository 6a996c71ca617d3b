//! Globally adaptive cubature over boxes for vector-valued integrands.
//!
//! Cells live in a max-heap keyed by their error relative to the current
//! tolerance. Each round pops a batch, bisects every cell along its worst
//! axis and evaluates the children in parallel. Results do not depend on the
//! number of worker threads: children are collected in order, ties break on
//! cell id and the final sum is pairwise over leaves in id order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RuleChoice {
    /// Tensor Gauss–Kronrod up to three dimensions, Genz–Malik above.
    #[default]
    Auto,
    GaussKronrod,
    GenzMalik,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CubatureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
    pub rule: RuleChoice,
    /// Cells refined per round.
    pub batch: usize,
}

impl Default for CubatureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_evals: 50_000_000,
            rule: RuleChoice::Auto,
            batch: 32,
        }
    }
}

impl CubatureSettings {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 0.0 && self.abs_tol >= 0.0)
            || (self.rel_tol == 0.0 && self.abs_tol == 0.0)
        {
            return Err(Error::InvalidSettings(
                "tolerances must be nonnegative and not both zero".into(),
            ));
        }
        if self.batch == 0 || self.max_evals == 0 {
            return Err(Error::InvalidSettings(
                "batch and max_evals must be positive".into(),
            ));
        }
        Ok(())
    }
}

type Predicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Lower and upper corners of a cell.
type Bounds = (Vec<f64>, Vec<f64>);

/// A borrowed scalar integrand.
pub type ScalarIntegrand<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// An axis-aligned box with optional breakpoints, reflection folding and an
/// excluded set on which the integrand is taken to vanish.
#[derive(Clone)]
pub struct Region {
    lower: Vec<f64>,
    upper: Vec<f64>,
    breaks: Vec<Vec<f64>>,
    fold: Vec<bool>,
    exclude: Option<Predicate>,
}

impl std::fmt::Debug for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Region")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("breaks", &self.breaks)
            .field("fold", &self.fold)
            .field("exclude", &self.exclude.is_some())
            .finish()
    }
}

impl Region {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::Domain("region needs at least one axis".into()));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite())
        {
            return Err(Error::Domain(format!(
                "degenerate box {lower:?} .. {upper:?}"
            )));
        }
        let n = lower.len();
        Ok(Self {
            lower,
            upper,
            breaks: vec![Vec::new(); n],
            fold: vec![false; n],
            exclude: None,
        })
    }

    /// The cube [−a, a]^n.
    pub fn cube(n: usize, a: f64) -> Result<Self> {
        Self::new(vec![-a; n], vec![a; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Adds interior breakpoints on one axis; points outside are ignored.
    pub fn with_breaks(mut self, axis: usize, pts: &[f64]) -> Self {
        let (a, b) = (self.lower[axis], self.upper[axis]);
        let br = &mut self.breaks[axis];
        br.extend(pts.iter().copied().filter(|&t| t > a && t < b));
        br.sort_by(f64::total_cmp);
        br.dedup();
        self
    }

    /// Integrates over the nonnegative half of an axis symmetric about 0 and
    /// doubles. Only valid for integrands even in that coordinate.
    pub fn with_fold(mut self, axis: usize) -> Result<Self> {
        if self.lower[axis] != -self.upper[axis] {
            return Err(Error::Domain(format!(
                "axis {axis} is not symmetric about 0"
            )));
        }
        self.fold[axis] = true;
        Ok(self)
    }

    pub fn with_all_folds(mut self) -> Result<Self> {
        for i in 0..self.dim() {
            self = self.with_fold(i)?;
        }
        Ok(self)
    }

    pub fn with_exclusion(mut self, f: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.exclude = Some(Arc::new(f));
        self
    }

    /// Initial cells and the multiplicity factor from folding.
    fn initial_cells(&self) -> (Vec<Bounds>, f64) {
        let n = self.dim();
        let mut factor = 1.0;
        let mut edges: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let lo = if self.fold[i] {
                factor *= 2.0;
                0.0
            } else {
                self.lower[i]
            };
            let mut e = vec![lo];
            e.extend(self.breaks[i].iter().copied().filter(|&t| t > lo));
            e.push(self.upper[i]);
            edges.push(e);
        }
        let mut cells = vec![(Vec::new(), Vec::new())];
        for e in &edges {
            let mut next = Vec::with_capacity(cells.len() * (e.len() - 1));
            for (lo, hi) in &cells {
                for w in e.windows(2) {
                    let mut l = lo.clone();
                    let mut h = hi.clone();
                    l.push(w[0]);
                    h.push(w[1]);
                    next.push((l, h));
                }
            }
            cells = next;
        }
        (cells, factor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubatureResult {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub evals: usize,
    pub cells: usize,
    pub converged: bool,
}

impl CubatureResult {
    pub fn value(&self) -> f64 {
        self.values[0]
    }

    pub fn error(&self) -> f64 {
        self.errors[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexCubatureResult {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

// ---------------------------------------------------------------- rules

const GK15_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK15_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights on the odd-index Kronrod nodes (1, 3, 5, 7).
const G7_W: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 1D nodes on [−1, 1] with Kronrod and Gauss weights (Gauss weight 0 off
/// the Gauss subset).
fn gk15_table() -> [(f64, f64, f64); 15] {
    let mut t = [(0.0, 0.0, 0.0); 15];
    for i in 0..7 {
        let g = if i % 2 == 1 { G7_W[i / 2] } else { 0.0 };
        t[i] = (-GK15_NODES[i], GK15_WK[i], g);
        t[14 - i] = (GK15_NODES[i], GK15_WK[i], g);
    }
    t[7] = (0.0, GK15_WK[7], G7_W[3]);
    t
}

/// Tensor Gauss–Kronrod: value from Kronrod, error |K − G|, and per-axis
/// indicators |K − K with axis j reduced to Gauss|.
struct TensorGk {
    table: [(f64, f64, f64); 15],
}

/// Degree-7 rule with an embedded degree-5 rule.
struct GenzMalik {
    points: Vec<Vec<f64>>,
    w7: Vec<f64>,
    w5: Vec<f64>,
    l2: f64,
    l3: f64,
}

impl GenzMalik {
    fn new(n: usize) -> Self {
        let nf = n as f64;
        let l2 = (9.0f64 / 70.0).sqrt();
        let l4 = (9.0f64 / 10.0).sqrt();
        let l5 = (9.0f64 / 19.0).sqrt();
        let w = [
            (12824.0 - 9120.0 * nf + 400.0 * nf * nf) / 19683.0,
            980.0 / 6561.0,
            (1820.0 - 400.0 * nf) / 19683.0,
            200.0 / 19683.0,
            6859.0 / 19683.0 / 2f64.powi(n as i32),
        ];
        let v = [
            (729.0 - 950.0 * nf + 50.0 * nf * nf) / 729.0,
            245.0 / 486.0,
            (265.0 - 100.0 * nf) / 1458.0,
            25.0 / 729.0,
            0.0,
        ];
        let mut points = vec![vec![0.0; n]];
        let mut class = vec![0usize];
        for (c, l) in [(1, l2), (2, l4)] {
            for i in 0..n {
                for s in [-1.0, 1.0] {
                    let mut p = vec![0.0; n];
                    p[i] = s * l;
                    points.push(p);
                    class.push(c);
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for (si, sj) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                    let mut p = vec![0.0; n];
                    p[i] = si * l4;
                    p[j] = sj * l4;
                    points.push(p);
                    class.push(3);
                }
            }
        }
        for mask in 0..(1usize << n) {
            points.push(
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { l5 } else { -l5 })
                    .collect(),
            );
            class.push(4);
        }
        Self {
            w7: class.iter().map(|&c| w[c]).collect(),
            w5: class.iter().map(|&c| v[c]).collect(),
            points,
            l2,
            l3: l4,
        }
    }
}

enum Rule {
    Gk(Box<TensorGk>),
    Gm(GenzMalik),
}

struct Evaluated {
    val: Vec<f64>,
    err: Vec<f64>,
    axis_score: Vec<f64>,
    evals: usize,
}

impl Rule {
    fn for_dim(n: usize, choice: RuleChoice) -> Result<Self> {
        let gk = match choice {
            RuleChoice::Auto => n <= 3,
            RuleChoice::GaussKronrod => {
                if n > 4 {
                    return Err(Error::InvalidSettings(
                        "tensor Gauss–Kronrod is limited to 4 axes".into(),
                    ));
                }
                true
            }
            RuleChoice::GenzMalik => {
                if n < 2 {
                    return Err(Error::InvalidSettings(
                        "Genz–Malik needs at least 2 axes".into(),
                    ));
                }
                false
            }
        };
        Ok(if gk {
            Rule::Gk(Box::new(TensorGk {
                table: gk15_table(),
            }))
        } else {
            Rule::Gm(GenzMalik::new(n))
        })
    }

    fn apply<F>(&self, f: &F, ncomp: usize, lo: &[f64], hi: &[f64]) -> Evaluated
    where
        F: Fn(&[f64], &mut [f64]) + Sync,
    {
        let n = lo.len();
        let c: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let h: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
        let mut z = vec![0.0; n];
        let mut buf = vec![0.0; ncomp];
        match self {
            Rule::Gk(gk) => {
                let table = &gk.table;
                let vol: f64 = h.iter().product();
                let mut k = vec![0.0; ncomp];
                let mut g = vec![0.0; ncomp];
                // kr[j]: axis j with Gauss weights, the others Kronrod.
                let mut kr = vec![vec![0.0; ncomp]; n];
                let total = 15usize.pow(n as u32);
                let mut idx = vec![0usize; n];
                for _ in 0..total {
                    let mut wk = 1.0;
                    let mut wg = 1.0;
                    for i in 0..n {
                        let (x, a, b) = table[idx[i]];
                        z[i] = c[i] + h[i] * x;
                        wk *= a;
                        wg *= b;
                    }
                    f(&z, &mut buf);
                    for (acc, v) in k.iter_mut().zip(&buf) {
                        *acc += wk * v;
                    }
                    if wg != 0.0 {
                        for (acc, v) in g.iter_mut().zip(&buf) {
                            *acc += wg * v;
                        }
                    }
                    for j in 0..n {
                        let gj = table[idx[j]].2;
                        if gj != 0.0 {
                            let w = wk / table[idx[j]].1 * gj;
                            for (acc, v) in kr[j].iter_mut().zip(&buf) {
                                *acc += w * v;
                            }
                        }
                    }
                    for d in idx.iter_mut() {
                        *d += 1;
                        if *d < 15 {
                            break;
                        }
                        *d = 0;
                    }
                }
                let axis_score = (0..n)
                    .map(|j| {
                        kr[j]
                            .iter()
                            .zip(&k)
                            .map(|(a, b)| (a - b).abs() * vol)
                            .fold(0.0, f64::max)
                    })
                    .collect();
                Evaluated {
                    val: k.iter().map(|v| v * vol).collect(),
                    err: k.iter().zip(&g).map(|(a, b)| (a - b).abs() * vol).collect(),
                    axis_score,
                    evals: total,
                }
            }
            Rule::Gm(gm) => {
                let vol: f64 = h.iter().map(|x| 2.0 * x).product();
                let mut s7 = vec![0.0; ncomp];
                let mut s5 = vec![0.0; ncomp];
                let mut f0 = vec![0.0; ncomp];
                // Per axis: f(±l2) sum and f(±l3) sum.
                let mut f2 = vec![vec![0.0; ncomp]; n];
                let mut f3 = vec![vec![0.0; ncomp]; n];
                for (pi, p) in gm.points.iter().enumerate() {
                    for i in 0..n {
                        z[i] = c[i] + h[i] * p[i];
                    }
                    f(&z, &mut buf);
                    let (a, b) = (gm.w7[pi], gm.w5[pi]);
                    for q in 0..ncomp {
                        s7[q] += a * buf[q];
                        s5[q] += b * buf[q];
                    }
                    if pi == 0 {
                        f0.copy_from_slice(&buf);
                    } else if pi <= 4 * n {
                        let axis = ((pi - 1) % (2 * n)) / 2;
                        let tgt = if pi <= 2 * n {
                            &mut f2[axis]
                        } else {
                            &mut f3[axis]
                        };
                        for q in 0..ncomp {
                            tgt[q] += buf[q];
                        }
                    }
                }
                let ratio = (gm.l2 / gm.l3).powi(2);
                let axis_score = (0..n)
                    .map(|j| {
                        (0..ncomp)
                            .map(|q| {
                                let d2 = f2[j][q] - 2.0 * f0[q];
                                let d3 = f3[j][q] - 2.0 * f0[q];
                                (d2 - ratio * d3).abs()
                            })
                            .fold(0.0, f64::max)
                    })
                    .collect();
                Evaluated {
                    val: s7.iter().map(|v| v * vol).collect(),
                    err: s7
                        .iter()
                        .zip(&s5)
                        .map(|(a, b)| (a - b).abs() * vol)
                        .collect(),
                    axis_score,
                    evals: gm.points.len(),
                }
            }
        }
    }
}

// ---------------------------------------------------------------- engine

struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    val: Vec<f64>,
    err: Vec<f64>,
    axis: usize,
}

#[derive(PartialEq)]
struct Key {
    score: f64,
    id: usize,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, o: &Self) -> Ordering {
        self.score
            .total_cmp(&o.score)
            .then_with(|| o.id.cmp(&self.id))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn pick_axis(ev: &Evaluated, lo: &[f64], hi: &[f64]) -> usize {
    // Prefer the widest axis among those within 10% of the top indicator.
    let top = ev.axis_score.iter().cloned().fold(0.0, f64::max);
    let mut best = 0;
    let mut best_w = -1.0;
    for j in 0..lo.len() {
        if ev.axis_score[j] >= 0.9 * top {
            let w = hi[j] - lo[j];
            if w > best_w {
                best_w = w;
                best = j;
            }
        }
    }
    best
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        v.iter().sum()
    } else {
        let mid = v.len() / 2;
        pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
    }
}

/// Integrates an `ncomp`-valued integrand over `region`.
pub fn integrate_vector<F>(
    f: &F,
    ncomp: usize,
    region: &Region,
    settings: &CubatureSettings,
) -> Result<CubatureResult>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    settings.validate()?;
    if ncomp == 0 {
        return Err(Error::InvalidSettings("integrand has no components".into()));
    }
    let n = region.dim();
    let rule = Rule::for_dim(n, settings.rule)?;
    let (init, factor) = region.initial_cells();

    let excl = region.exclude.clone();
    let g = |z: &[f64], out: &mut [f64]| {
        if let Some(e) = &excl {
            if e(z) {
                out.iter_mut().for_each(|v| *v = 0.0);
                return;
            }
        }
        f(z, out);
        for v in out.iter_mut() {
            *v *= factor;
        }
    };

    let eval_cells = |boxes: Vec<(Vec<f64>, Vec<f64>)>| -> Vec<(Cell, usize)> {
        boxes
            .into_par_iter()
            .map(|(lo, hi)| {
                let ev = rule.apply(&g, ncomp, &lo, &hi);
                let axis = pick_axis(&ev, &lo, &hi);
                let evals = ev.evals;
                (
                    Cell {
                        lo,
                        hi,
                        val: ev.val,
                        err: ev.err,
                        axis,
                    },
                    evals,
                )
            })
            .collect()
    };

    let mut cells: Vec<Option<Cell>> = Vec::new();
    let mut evals = 0usize;
    let mut total_val = vec![0.0; ncomp];
    let mut total_err = vec![0.0; ncomp];
    for (c, e) in eval_cells(init) {
        evals += e;
        for q in 0..ncomp {
            total_val[q] += c.val[q];
            total_err[q] += c.err[q];
        }
        cells.push(Some(c));
    }

    let tol_of = |vals: &[f64]| -> Vec<f64> {
        vals.iter()
            .map(|v| {
                settings
                    .abs_tol
                    .max(settings.rel_tol * v.abs())
                    .max(f64::MIN_POSITIVE)
            })
            .collect()
    };
    let score = |c: &Cell, tol: &[f64]| -> f64 {
        c.err
            .iter()
            .zip(tol)
            .map(|(e, t)| e / t)
            .fold(0.0, f64::max)
    };
    let build_heap = |cells: &[Option<Cell>], tol: &[f64]| -> BinaryHeap<Key> {
        cells
            .iter()
            .enumerate()
            .filter_map(|(id, c)| {
                c.as_ref().map(|c| Key {
                    score: score(c, tol),
                    id,
                })
            })
            .collect()
    };

    let mut key_tol = tol_of(&total_val);
    let mut heap = build_heap(&cells, &key_tol);
    let per_cell = evals / cells.len().max(1);
    let mut converged = false;

    loop {
        let tol = tol_of(&total_val);
        if total_err.iter().zip(&tol).all(|(e, t)| e <= t) {
            converged = true;
            break;
        }
        if evals + 2 * per_cell > settings.max_evals {
            break;
        }
        if tol
            .iter()
            .zip(&key_tol)
            .any(|(a, b)| a / b > 2.0 || b / a > 2.0)
        {
            // Exact totals and fresh keys.
            for q in 0..ncomp {
                let v: Vec<f64> = cells.iter().flatten().map(|c| c.val[q]).collect();
                let e: Vec<f64> = cells.iter().flatten().map(|c| c.err[q]).collect();
                total_val[q] = pairwise_sum(&v);
                total_err[q] = pairwise_sum(&e);
            }
            key_tol = tol_of(&total_val);
            heap = build_heap(&cells, &key_tol);
        }

        let budget = (settings.max_evals - evals) / (2 * per_cell);
        let take = settings.batch.min(budget).max(1);
        let mut children = Vec::with_capacity(2 * take);
        let mut parents = Vec::with_capacity(take);
        while parents.len() < take {
            let Some(Key { id, .. }) = heap.pop() else {
                break;
            };
            let c = cells[id].as_ref().expect("live cell");
            let a = c.axis;
            let mid = 0.5 * (c.lo[a] + c.hi[a]);
            if !(mid > c.lo[a] && mid < c.hi[a]) {
                // Too narrow to split; its error stays in the totals.
                continue;
            }
            let mut hi1 = c.hi.clone();
            hi1[a] = mid;
            let mut lo2 = c.lo.clone();
            lo2[a] = mid;
            children.push((c.lo.clone(), hi1));
            children.push((lo2, c.hi.clone()));
            parents.push(id);
        }
        if parents.is_empty() {
            break;
        }
        for &id in &parents {
            let c = cells[id].take().expect("live cell");
            for q in 0..ncomp {
                total_val[q] -= c.val[q];
                total_err[q] -= c.err[q];
            }
        }
        for (c, e) in eval_cells(children) {
            evals += e;
            for q in 0..ncomp {
                total_val[q] += c.val[q];
                total_err[q] += c.err[q];
            }
            heap.push(Key {
                score: score(&c, &key_tol),
                id: cells.len(),
            });
            cells.push(Some(c));
        }
    }

    let mut values = vec![0.0; ncomp];
    let mut errors = vec![0.0; ncomp];
    for q in 0..ncomp {
        let v: Vec<f64> = cells.iter().flatten().map(|c| c.val[q]).collect();
        let e: Vec<f64> = cells.iter().flatten().map(|c| c.err[q]).collect();
        values[q] = pairwise_sum(&v);
        errors[q] = pairwise_sum(&e);
    }
    if converged {
        let tol = tol_of(&values);
        converged = errors.iter().zip(&tol).all(|(e, t)| e <= t);
    }
    Ok(CubatureResult {
        values,
        errors,
        evals,
        cells: cells.iter().flatten().count(),
        converged,
    })
}

/// Scalar integrand.
pub fn integrate<F>(f: &F, region: &Region, settings: &CubatureSettings) -> Result<CubatureResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    integrate_vector(
        &|z: &[f64], out: &mut [f64]| out[0] = f(z),
        1,
        region,
        settings,
    )
}

/// Complex integrand; the error is the Euclidean norm of the component errors.
pub fn integrate_complex<F>(
    f: &F,
    region: &Region,
    settings: &CubatureSettings,
) -> Result<ComplexCubatureResult>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let r = integrate_vector(
        &|z: &[f64], out: &mut [f64]| {
            let v = f(z);
            out[0] = v.re;
            out[1] = v.im;
        },
        2,
        region,
        settings,
    )?;
    Ok(ComplexCubatureResult {
        value: Complex64::new(r.values[0], r.values[1]),
        error: r.errors[0].hypot(r.errors[1]),
        evals: r.evals,
        converged: r.converged,
    })
}

/// Several scalar integrands sharing one mesh.
pub fn integrate_many(
    fs: &[ScalarIntegrand<'_>],
    region: &Region,
    settings: &CubatureSettings,
) -> Result<CubatureResult> {
    integrate_vector(
        &|z: &[f64], out: &mut [f64]| {
            for (o, f) in out.iter_mut().zip(fs) {
                *o = f(z);
            }
        },
        fs.len(),
        region,
        settings,
    )
}
