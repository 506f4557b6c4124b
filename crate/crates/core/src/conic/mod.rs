//! A thin, swappable interface to a convex conic solver over complex
//! Hermitian PSD variable blocks with trace-linear rows, real scalar
//! auxiliaries, and second-order-cone rows.
//!
//! The backend is the built-in primal-dual interior-point method of [`ipm`],
//! which operates on real symmetric blocks; this layer owns the
//! complex-to-real embedding `X -> [[Re X, -Im X], [Im X, Re X]]` and its
//! inverse extraction. The embedding is exact for trace-linear semidefinite
//! programs: any feasible real iterate maps back to a feasible complex one
//! with the same objective (average the iterate with its conjugation by
//! `J = [[0, -I], [I, 0]]`).
//!
//! Feasibility verdicts come from a phase-I solve that maximizes a uniform
//! constraint margin; a strictly negative optimum certifies infeasibility of
//! the inequality system, after which phase II solves the actual problem.

mod ipm;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::json;

use crate::numerics::HermitianMatrix;
use ipm::{ConeMat, IpmOptions, IpmStatus, StdRow, StdSdp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockId(usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalarId(usize);

/// Real-valued affine expression in the problem variables:
/// `sum_k Re Tr(H_k X_k) + sum_j c_j s_j + constant`.
#[derive(Debug, Clone, Default)]
pub struct AffineExpr {
    block_terms: Vec<(BlockId, HermitianMatrix)>,
    scalar_terms: Vec<(ScalarId, f64)>,
    constant: f64,
}

impl AffineExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn block(mut self, id: BlockId, coeff: HermitianMatrix) -> Self {
        self.block_terms.push((id, coeff));
        self
    }

    pub fn scalar(mut self, id: ScalarId, coeff: f64) -> Self {
        self.scalar_terms.push((id, coeff));
        self
    }

    pub fn constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    fn coeff_norm_sq(&self) -> f64 {
        // Norm of the real coefficient vector; the embedding doubles the
        // squared Frobenius norm and the 1/2 trace factor halves it twice,
        // so the complex-side norm is scaled consistently across rows.
        self.block_terms
            .iter()
            .map(|(_, h)| 0.5 * h.norm().powi(2))
            .sum::<f64>()
            + self.scalar_terms.iter().map(|(_, c)| c * c).sum::<f64>()
    }
}

#[derive(Debug, Clone)]
struct BlockDef {
    name: String,
    dim: usize,
}

#[derive(Debug, Clone)]
struct ScalarDef {
    name: String,
    nonneg: bool,
}

#[derive(Debug, Clone)]
struct LinRow {
    expr: AffineExpr,
    cmp: Cmp,
    rhs: f64,
    label: String,
}

#[derive(Debug, Clone)]
struct SocRow {
    z: Vec<AffineExpr>,
    w: AffineExpr,
    label: String,
}

/// A conic program over Hermitian PSD blocks.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    sense: Sense,
    blocks: Vec<BlockDef>,
    scalars: Vec<ScalarDef>,
    objective: AffineExpr,
    lin_rows: Vec<LinRow>,
    soc_rows: Vec<SocRow>,
}

impl SdpProblem {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            blocks: Vec::new(),
            scalars: Vec::new(),
            objective: AffineExpr::new(),
            lin_rows: Vec::new(),
            soc_rows: Vec::new(),
        }
    }

    /// Declares a Hermitian PSD variable block of the given dimension.
    pub fn add_block(&mut self, name: impl Into<String>, dim: usize) -> BlockId {
        assert!(dim >= 1, "block dimension must be positive");
        self.blocks.push(BlockDef {
            name: name.into(),
            dim,
        });
        BlockId(self.blocks.len() - 1)
    }

    /// Declares a real scalar auxiliary, optionally sign-constrained.
    pub fn add_scalar(&mut self, name: impl Into<String>, nonneg: bool) -> ScalarId {
        self.scalars.push(ScalarDef {
            name: name.into(),
            nonneg,
        });
        ScalarId(self.scalars.len() - 1)
    }

    pub fn set_objective(&mut self, expr: AffineExpr) {
        self.objective = expr;
    }

    pub fn add_constraint(&mut self, expr: AffineExpr, cmp: Cmp, rhs: f64, label: impl Into<String>) {
        self.lin_rows.push(LinRow {
            expr,
            cmp,
            rhs,
            label: label.into(),
        });
    }

    /// Adds the convex quadratic row `||z||^2 <= 2 w` (rotated second-order
    /// cone with unit second leg), encoded internally as the PSD block
    /// `[[1, z^T], [z, 2w I]]`.
    pub fn add_soc_sq_le_2w(&mut self, z: Vec<AffineExpr>, w: AffineExpr, label: impl Into<String>) {
        assert!(!z.is_empty(), "second-order row needs at least one component");
        self.soc_rows.push(SocRow {
            z,
            w,
            label: label.into(),
        });
    }

    pub fn block_dim(&self, id: BlockId) -> usize {
        self.blocks[id.0].dim
    }

    /// Self-describing dump for cross-checking against external modeling
    /// tools.
    pub fn to_debug_json(&self) -> serde_json::Value {
        let cx = |h: &HermitianMatrix| -> serde_json::Value {
            let n = h.dim();
            let rows: Vec<Vec<[f64; 2]>> = (0..n)
                .map(|i| (0..n).map(|j| [h.get(i, j).re, h.get(i, j).im]).collect())
                .collect();
            json!(rows)
        };
        let expr = |e: &AffineExpr| -> serde_json::Value {
            json!({
                "blocks": e.block_terms.iter().map(|(id, h)| json!({
                    "block": self.blocks[id.0].name,
                    "coeff": cx(h),
                })).collect::<Vec<_>>(),
                "scalars": e.scalar_terms.iter().map(|(id, c)| json!({
                    "scalar": self.scalars[id.0].name,
                    "coeff": c,
                })).collect::<Vec<_>>(),
                "constant": e.constant,
            })
        };
        json!({
            "sense": match self.sense { Sense::Maximize => "maximize", Sense::Minimize => "minimize" },
            "blocks": self.blocks.iter().map(|b| json!({"name": b.name, "dim": b.dim})).collect::<Vec<_>>(),
            "scalars": self.scalars.iter().map(|s| json!({"name": s.name, "nonneg": s.nonneg})).collect::<Vec<_>>(),
            "objective": expr(&self.objective),
            "constraints": self.lin_rows.iter().map(|r| json!({
                "label": r.label,
                "expr": expr(&r.expr),
                "cmp": match r.cmp { Cmp::Le => "<=", Cmp::Eq => "==", Cmp::Ge => ">=" },
                "rhs": r.rhs,
            })).collect::<Vec<_>>(),
            "soc_rows": self.soc_rows.iter().map(|r| json!({
                "label": r.label,
                "z": r.z.iter().map(expr).collect::<Vec<_>>(),
                "w": expr(&r.w),
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone, Copy)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// Values per declared block, in declaration order.
    pub block_values: Vec<HermitianMatrix>,
    /// Values per declared scalar, in declaration order.
    pub scalar_values: Vec<f64>,
    pub objective: f64,
    pub residuals: Residuals,
    /// Phase-I uniform constraint margin (on row-normalized scale), when a
    /// phase-I solve ran.
    pub feas_margin: Option<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol_feas: f64,
    pub tol_gap: f64,
    /// Skip the phase-I feasibility solve (callers that construct
    /// feasible-by-construction problems).
    pub skip_phase1: bool,
    /// Phase-I margin below which the problem is declared infeasible.
    pub margin_tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol_feas: 1e-8,
            tol_gap: 1e-8,
            skip_phase1: false,
            margin_tol: 1e-7,
            max_iter: 120,
        }
    }
}

pub fn solve(p: &SdpProblem, tol_feas: f64, tol_gap: f64) -> SdpSolution {
    solve_with_options(
        p,
        &SolveOptions {
            tol_feas,
            tol_gap,
            ..Default::default()
        },
    )
}

/// Real symmetric embedding `[[Re X, -Im X], [Im X, Re X]]` of a Hermitian
/// matrix. PSD-ness is preserved in both directions and each eigenvalue's
/// multiplicity doubles.
pub fn embed_hermitian(h: &HermitianMatrix) -> DMatrix<f64> {
    let n = h.dim();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h.get(i, j);
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    out
}

/// Inverse of [`embed_hermitian`], valid for any symmetric `Y`: averages the
/// iterate with its `J`-conjugation, which preserves feasibility and
/// objective of embedded problems.
pub fn extract_hermitian(y: &DMatrix<f64>) -> HermitianMatrix {
    let n2 = y.nrows();
    assert!(n2 % 2 == 0, "embedded matrix must have even dimension");
    let n = n2 / 2;
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re = 0.5 * (y[(i, j)] + y[(i + n, j + n)]);
            let im = 0.5 * (y[(i + n, j)] - y[(j + n, i)]);
            out[(i, j)] = Complex64::new(re, im);
        }
    }
    HermitianMatrix::symmetrize(out)
}

fn embed_to_conemat(h: &HermitianMatrix, scale: f64) -> ConeMat {
    let n = h.dim();
    let nnz = h
        .matrix()
        .iter()
        .filter(|z| z.re != 0.0 || z.im != 0.0)
        .count();
    if nnz <= n.max(4) {
        let mut triplets = Vec::with_capacity(4 * nnz);
        for i in 0..n {
            for j in 0..n {
                let z = h.get(i, j);
                if z.re != 0.0 {
                    triplets.push((i, j, scale * z.re));
                    triplets.push((i + n, j + n, scale * z.re));
                }
                if z.im != 0.0 {
                    triplets.push((i, j + n, -scale * z.im));
                    triplets.push((i + n, j, scale * z.im));
                }
            }
        }
        ConeMat::Sparse {
            dim: 2 * n,
            triplets,
        }
    } else {
        ConeMat::Dense(embed_hermitian(h) * scale)
    }
}

/// Where each model entity landed in the real standard form.
struct Layout {
    complex_block: Vec<usize>,
    scalar_slot: Vec<ScalarSlot>,
    dims: Vec<usize>,
}

enum ScalarSlot {
    NonNeg(usize),
    Free(usize, usize),
}

impl Layout {
    fn push_block(&mut self, dim: usize) -> usize {
        self.dims.push(dim);
        self.dims.len() - 1
    }
}

struct RowBuilder {
    terms: Vec<(usize, ConeMat)>,
    rhs: f64,
    norm_sq: f64,
}

impl RowBuilder {
    fn new(rhs: f64) -> Self {
        Self {
            terms: Vec::new(),
            rhs,
            norm_sq: 0.0,
        }
    }

    fn add_expr(&mut self, expr: &AffineExpr, sign: f64, layout: &Layout) {
        self.rhs -= sign * expr.constant;
        for (id, h) in &expr.block_terms {
            let cm = embed_to_conemat(h, 0.5 * sign);
            self.norm_sq += cm.norm().powi(2);
            self.terms.push((layout.complex_block[id.0], cm));
        }
        for (id, c) in &expr.scalar_terms {
            match layout.scalar_slot[id.0] {
                ScalarSlot::NonNeg(b) => {
                    self.push_scalar(b, sign * c);
                }
                ScalarSlot::Free(bp, bn) => {
                    self.push_scalar(bp, sign * c);
                    self.push_scalar(bn, -sign * c);
                }
            }
        }
    }

    fn push_scalar(&mut self, block: usize, coeff: f64) {
        self.norm_sq += coeff * coeff;
        self.terms.push((
            block,
            ConeMat::Sparse {
                dim: 1,
                triplets: vec![(0, 0, coeff)],
            },
        ));
    }

    fn push_entry(&mut self, block: usize, triplets: Vec<(usize, usize, f64)>, dim: usize) {
        self.norm_sq += triplets.iter().map(|t| t.2 * t.2).sum::<f64>();
        self.terms.push((block, ConeMat::Sparse { dim, triplets }));
    }

    /// Normalizes the row, appends an optional slack block, and emits it.
    /// Returns `None` for a constant row (caller decides feasibility).
    fn finish(mut self, slack: Option<(usize, f64)>, rows: &mut Vec<StdRow>) -> Option<()> {
        let scale = self.norm_sq.sqrt();
        if scale < 1e-300 {
            return None;
        }
        let inv = 1.0 / scale;
        for (_, cm) in self.terms.iter_mut() {
            cm.scale(inv);
        }
        self.rhs *= inv;
        if let Some((block, coeff)) = slack {
            self.terms.push((
                block,
                ConeMat::Sparse {
                    dim: 1,
                    triplets: vec![(0, 0, coeff)],
                },
            ));
        }
        rows.push(StdRow {
            terms: self.terms,
            rhs: self.rhs,
        });
        Some(())
    }
}

enum BuildOutcome {
    Built(StdSdp, Layout),
    /// A variable-free row is violated outright.
    TriviallyInfeasible,
}

/// Translates the model into real standard form. With `phase1` set, the
/// original objective is replaced by margin maximization: every inequality
/// row and every SOC radius is relaxed by a common free margin `lambda`,
/// and the translation maximizes it (capped at 1 on the row-normalized
/// scale).
fn build_std(p: &SdpProblem, phase1: bool) -> BuildOutcome {
    let mut layout = Layout {
        complex_block: Vec::new(),
        scalar_slot: Vec::new(),
        dims: Vec::new(),
    };
    for b in &p.blocks {
        let idx = layout.push_block(2 * b.dim);
        layout.complex_block.push(idx);
    }
    for s in &p.scalars {
        let slot = if s.nonneg {
            ScalarSlot::NonNeg(layout.push_block(1))
        } else {
            let bp = layout.push_block(1);
            let bn = layout.push_block(1);
            ScalarSlot::Free(bp, bn)
        };
        layout.scalar_slot.push(slot);
    }
    let soc_blocks: Vec<usize> = p
        .soc_rows
        .iter()
        .map(|r| layout.push_block(r.z.len() + 1))
        .collect();

    // Phase-I margin variable (free) lives in two extra 1x1 blocks.
    let margin = if phase1 {
        let bp = layout.push_block(1);
        let bn = layout.push_block(1);
        Some((bp, bn))
    } else {
        None
    };

    let mut rows: Vec<StdRow> = Vec::new();
    let mut dims = layout.dims.clone();
    let mut alloc_slack = |dims: &mut Vec<usize>| -> usize {
        dims.push(1);
        dims.len() - 1
    };

    for r in &p.lin_rows {
        let mut rb = RowBuilder::new(r.rhs);
        rb.add_expr(&r.expr, 1.0, &layout);
        // Margin enters inequality rows on their tight side.
        if let Some((bp, bn)) = margin {
            match r.cmp {
                Cmp::Ge => {
                    rb.push_scalar(bp, -1.0);
                    rb.push_scalar(bn, 1.0);
                }
                Cmp::Le => {
                    rb.push_scalar(bp, 1.0);
                    rb.push_scalar(bn, -1.0);
                }
                Cmp::Eq => {}
            }
        }
        let norm_scale = rb.norm_sq.sqrt();
        if norm_scale < 1e-300 {
            // Constant row: decide it now.
            let ok = match r.cmp {
                Cmp::Le => 0.0 <= rb.rhs + 1e-12,
                Cmp::Ge => 0.0 >= rb.rhs - 1e-12,
                Cmp::Eq => rb.rhs.abs() <= 1e-12,
            };
            if ok {
                continue;
            }
            return BuildOutcome::TriviallyInfeasible;
        }
        let slack = match r.cmp {
            Cmp::Eq => None,
            Cmp::Le => Some((alloc_slack(&mut dims), 1.0)),
            Cmp::Ge => Some((alloc_slack(&mut dims), -1.0)),
        };
        rb.finish(slack, &mut rows);
    }

    for (r, &sb) in p.soc_rows.iter().zip(soc_blocks.iter()) {
        let d = r.z.len();
        let dim = d + 1;
        // B[0,0] = 1
        let mut rb = RowBuilder::new(1.0);
        rb.push_entry(sb, vec![(0, 0, 1.0)], dim);
        rb.finish(None, &mut rows);
        // B[i,0] = z_i
        for (i, zi) in r.z.iter().enumerate() {
            let mut rb = RowBuilder::new(0.0);
            rb.push_entry(sb, vec![(i + 1, 0, 0.5), (0, i + 1, 0.5)], dim);
            rb.add_expr(zi, -1.0, &layout);
            rb.finish(None, &mut rows);
        }
        // B[i,i] = 2w (minus 2*lambda in phase I)
        for i in 0..d {
            let mut rb = RowBuilder::new(0.0);
            rb.push_entry(sb, vec![(i + 1, i + 1, 1.0)], dim);
            rb.add_expr(&r.w, -2.0, &layout);
            if let Some((bp, bn)) = margin {
                rb.push_scalar(bp, 2.0);
                rb.push_scalar(bn, -2.0);
            }
            rb.finish(None, &mut rows);
        }
        // B[i,j] = 0 off the arrow
        for i in 0..d {
            for j in (i + 1)..d {
                let mut rb = RowBuilder::new(0.0);
                rb.push_entry(sb, vec![(i + 1, j + 1, 0.5), (j + 1, i + 1, 0.5)], dim);
                rb.finish(None, &mut rows);
            }
        }
    }

    // Objective.
    let mut cost: Vec<DMatrix<f64>> = dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
    if let Some((bp, bn)) = margin {
        // max (lambda+ - lambda-)  ->  min (lambda- - lambda+), capped.
        cost[bp][(0, 0)] = -1.0;
        cost[bn][(0, 0)] = 1.0;
        let cap_slack = alloc_slack(&mut dims);
        cost.push(DMatrix::zeros(1, 1));
        rows.push(StdRow {
            terms: vec![
                (
                    bp,
                    ConeMat::Sparse {
                        dim: 1,
                        triplets: vec![(0, 0, 1.0)],
                    },
                ),
                (
                    cap_slack,
                    ConeMat::Sparse {
                        dim: 1,
                        triplets: vec![(0, 0, 1.0)],
                    },
                ),
            ],
            rhs: 1.0,
        });
    } else {
        let sense_sign = match p.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        for (id, h) in &p.objective.block_terms {
            let emb = embed_hermitian(h) * (0.5 * sense_sign);
            cost[layout.complex_block[id.0]] += emb;
        }
        for (id, c) in &p.objective.scalar_terms {
            match layout.scalar_slot[id.0] {
                ScalarSlot::NonNeg(b) => cost[b][(0, 0)] += sense_sign * c,
                ScalarSlot::Free(bp, bn) => {
                    cost[bp][(0, 0)] += sense_sign * c;
                    cost[bn][(0, 0)] -= sense_sign * c;
                }
            }
        }
        // Normalize the objective scale for the solver's benefit.
        let norm = cost.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            for c in cost.iter_mut() {
                *c /= norm;
            }
        }
    }
    // Slack blocks allocated after the cost vector was sized.
    while cost.len() < dims.len() {
        cost.push(DMatrix::zeros(1, 1));
    }

    BuildOutcome::Built(
        StdSdp {
            dims,
            cost,
            rows,
        },
        layout,
    )
}

fn evaluate_expr(
    expr: &AffineExpr,
    blocks: &[HermitianMatrix],
    scalars: &[f64],
) -> f64 {
    let mut acc = expr.constant;
    for (id, h) in &expr.block_terms {
        acc += h.re_inner(&blocks[id.0]);
    }
    for (id, c) in &expr.scalar_terms {
        acc += c * scalars[id.0];
    }
    acc
}

fn extract_values(
    p: &SdpProblem,
    layout: &Layout,
    x: &[DMatrix<f64>],
) -> (Vec<HermitianMatrix>, Vec<f64>) {
    let blocks: Vec<HermitianMatrix> = p
        .blocks
        .iter()
        .enumerate()
        .map(|(i, _)| extract_hermitian(&x[layout.complex_block[i]]))
        .collect();
    let scalars: Vec<f64> = layout
        .scalar_slot
        .iter()
        .map(|slot| match slot {
            ScalarSlot::NonNeg(b) => x[*b][(0, 0)],
            ScalarSlot::Free(bp, bn) => x[*bp][(0, 0)] - x[*bn][(0, 0)],
        })
        .collect();
    (blocks, scalars)
}

pub fn solve_with_options(p: &SdpProblem, opts: &SolveOptions) -> SdpSolution {
    let infeasible = |margin: f64| SdpSolution {
        status: SolveStatus::Infeasible,
        block_values: p.blocks.iter().map(|b| HermitianMatrix::zeros(b.dim)).collect(),
        scalar_values: vec![0.0; p.scalars.len()],
        objective: f64::NAN,
        residuals: Residuals {
            primal: f64::NAN,
            dual: f64::NAN,
            gap: f64::NAN,
        },
        feas_margin: Some(margin),
        iterations: 0,
    };
    let failure = |iters: usize, margin: Option<f64>| SdpSolution {
        status: SolveStatus::NumericalFailure,
        block_values: p.blocks.iter().map(|b| HermitianMatrix::zeros(b.dim)).collect(),
        scalar_values: vec![0.0; p.scalars.len()],
        objective: f64::NAN,
        residuals: Residuals {
            primal: f64::NAN,
            dual: f64::NAN,
            gap: f64::NAN,
        },
        feas_margin: margin,
        iterations: iters,
    };

    let ipm_opts = IpmOptions {
        tol_feas: opts.tol_feas,
        tol_gap: opts.tol_gap,
        max_iter: opts.max_iter,
    };

    let mut feas_margin = None;
    if !opts.skip_phase1 {
        let (std1, layout1) = match build_std(p, true) {
            BuildOutcome::Built(s, l) => (s, l),
            BuildOutcome::TriviallyInfeasible => return infeasible(f64::NEG_INFINITY),
        };
        // Phase I tolerances can be looser: only the margin sign matters.
        let phase1_opts = IpmOptions {
            tol_feas: (opts.tol_feas * 10.0).min(1e-7),
            tol_gap: (opts.tol_gap * 10.0).min(1e-7),
            max_iter: opts.max_iter,
        };
        let r1 = ipm::solve_std(&std1, &phase1_opts);
        match r1.status {
            IpmStatus::Converged => {
                // Margin = lambda+ - lambda-: last two scalar-bearing blocks
                // before slacks; recover via layout length.
                let bp = layout1.dims.len() - 2;
                let bn = layout1.dims.len() - 1;
                let margin = r1.x[bp][(0, 0)] - r1.x[bn][(0, 0)];
                feas_margin = Some(margin);
                if margin < -opts.margin_tol {
                    return infeasible(margin);
                }
            }
            _ => return failure(r1.iterations, None),
        }
    }

    let (std2, layout2) = match build_std(p, false) {
        BuildOutcome::Built(s, l) => (s, l),
        BuildOutcome::TriviallyInfeasible => return infeasible(f64::NEG_INFINITY),
    };
    let r2 = ipm::solve_std(&std2, &ipm_opts);
    match r2.status {
        IpmStatus::Converged => {
            let (block_values, scalar_values) = extract_values(p, &layout2, &r2.x);
            let objective = evaluate_expr(&p.objective, &block_values, &scalar_values);
            SdpSolution {
                status: SolveStatus::Optimal,
                block_values,
                scalar_values,
                objective,
                residuals: Residuals {
                    primal: r2.rel_primal_res,
                    dual: r2.rel_dual_res,
                    gap: r2.rel_gap,
                },
                feas_margin,
                iterations: r2.iterations,
            }
        }
        _ => failure(r2.iterations, feas_margin),
    }
}
