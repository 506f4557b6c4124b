//! Primal-dual interior-point core for small dense semidefinite programs in
//! standard form over real symmetric PSD blocks:
//!
//! ```text
//! minimize    sum_b <C_b, X_b>
//! subject to  sum_b <A_ib, X_b> = rhs_i,   i = 1..m
//!             X_b PSD
//! ```
//!
//! The search direction is the HKM/Mehrotra predictor-corrector; the Newton
//! system is reduced to the m x m Schur complement `M_ij = Tr(A_i Z^-1 A_j X)`,
//! which stays tiny for the problems in this crate (a few dozen rows against
//! blocks of dimension up to ~100). Constraint matrices carry a sparse
//! representation so that diagonal-pinning rows cost O(n) instead of O(n^3)
//! in the Schur assembly.

use nalgebra::DMatrix;

/// A symmetric coefficient matrix on one block.
#[derive(Debug, Clone)]
pub enum ConeMat {
    Dense(DMatrix<f64>),
    /// Triplets `(row, col, value)` listing every nonzero entry (both halves
    /// of an off-diagonal pair).
    Sparse { dim: usize, triplets: Vec<(usize, usize, f64)> },
}

impl ConeMat {
    pub fn dim(&self) -> usize {
        match self {
            ConeMat::Dense(m) => m.nrows(),
            ConeMat::Sparse { dim, .. } => *dim,
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            ConeMat::Dense(m) => m.norm(),
            ConeMat::Sparse { triplets, .. } => {
                triplets.iter().map(|&(_, _, v)| v * v).sum::<f64>().sqrt()
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        match self {
            ConeMat::Dense(m) => *m *= s,
            ConeMat::Sparse { triplets, .. } => {
                for t in triplets.iter_mut() {
                    t.2 *= s;
                }
            }
        }
    }

    /// `Tr(A V)` for arbitrary (possibly nonsymmetric) `V`.
    pub fn inner(&self, v: &DMatrix<f64>) -> f64 {
        match self {
            ConeMat::Dense(a) => {
                let mut acc = 0.0;
                for j in 0..a.ncols() {
                    for i in 0..a.nrows() {
                        acc += a[(i, j)] * v[(j, i)];
                    }
                }
                acc
            }
            ConeMat::Sparse { triplets, .. } => {
                triplets.iter().map(|&(i, j, val)| val * v[(j, i)]).sum()
            }
        }
    }

    /// `out += s * A`.
    pub fn add_scaled_to(&self, out: &mut DMatrix<f64>, s: f64) {
        match self {
            ConeMat::Dense(a) => {
                out.zip_apply(a, |o, av| *o += s * av);
            }
            ConeMat::Sparse { triplets, .. } => {
                for &(i, j, val) in triplets {
                    out[(i, j)] += s * val;
                }
            }
        }
    }

    /// `L * A` for dense `L`.
    pub fn left_mul(&self, l: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            ConeMat::Dense(a) => l * a,
            ConeMat::Sparse { dim, triplets } => {
                let mut out = DMatrix::zeros(l.nrows(), *dim);
                for &(i, j, val) in triplets {
                    let col = l.column(i) * val;
                    let mut target = out.column_mut(j);
                    target += col;
                }
                out
            }
        }
    }

    /// `A * R` for dense `R`.
    pub fn right_mul(&self, r: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            ConeMat::Dense(a) => a * r,
            ConeMat::Sparse { dim, triplets } => {
                let mut out = DMatrix::zeros(*dim, r.ncols());
                for &(i, j, val) in triplets {
                    let row = r.row(j) * val;
                    let mut target = out.row_mut(i);
                    target += row;
                }
                out
            }
        }
    }
}

/// One equality row: `sum_b <terms_b, X_b> = rhs`.
#[derive(Debug, Clone)]
pub struct StdRow {
    /// `(block index, coefficient)` pairs; at most one entry per block.
    pub terms: Vec<(usize, ConeMat)>,
    pub rhs: f64,
}

/// Standard-form problem over real symmetric blocks.
#[derive(Debug, Clone)]
pub struct StdSdp {
    pub dims: Vec<usize>,
    /// Cost matrix per block (minimization).
    pub cost: Vec<DMatrix<f64>>,
    pub rows: Vec<StdRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpmStatus {
    Converged,
    MaxIterations,
    NumericalBreakdown,
}

#[derive(Debug, Clone)]
pub struct IpmResult {
    pub status: IpmStatus,
    pub x: Vec<DMatrix<f64>>,
    pub y: Vec<f64>,
    pub z: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `||b - A(X)|| / (1 + ||b||)`
    pub rel_primal_res: f64,
    /// `||C - Z - A*(y)||_F / (1 + ||C||_F)`
    pub rel_dual_res: f64,
    /// `<X, Z> / (1 + |pobj| + |dobj|)`
    pub rel_gap: f64,
    pub iterations: usize,
}

pub struct IpmOptions {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub max_iter: usize,
}

impl Default for IpmOptions {
    fn default() -> Self {
        Self {
            tol_feas: 1e-8,
            tol_gap: 1e-8,
            max_iter: 120,
        }
    }
}

struct BlockVec(Vec<DMatrix<f64>>);

impl BlockVec {
    fn zeros(dims: &[usize]) -> Self {
        Self(dims.iter().map(|&n| DMatrix::zeros(n, n)).collect())
    }

    fn scaled_identity(dims: &[usize], s: f64) -> Self {
        Self(dims.iter().map(|&n| DMatrix::identity(n, n) * s).collect())
    }

    fn dot(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.dot(b))
            .sum()
    }

    fn axpy(&mut self, alpha: f64, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += b * alpha;
        }
    }

    fn symmetrize(&mut self) {
        for m in self.0.iter_mut() {
            let t = m.transpose();
            *m += t;
            *m *= 0.5;
        }
    }

    fn is_finite(&self) -> bool {
        self.0.iter().all(|m| m.iter().all(|v| v.is_finite()))
    }
}

fn apply_a(rows: &[StdRow], x: &BlockVec) -> Vec<f64> {
    rows.iter()
        .map(|row| row.terms.iter().map(|(b, a)| a.inner(&x.0[*b])).sum())
        .collect()
}

fn apply_a_adjoint(rows: &[StdRow], y: &[f64], dims: &[usize]) -> BlockVec {
    let mut out = BlockVec::zeros(dims);
    for (row, &yi) in rows.iter().zip(y.iter()) {
        for (b, a) in &row.terms {
            a.add_scaled_to(&mut out.0[*b], yi);
        }
    }
    out
}

/// Largest step `alpha <= cap` keeping `S + alpha dS` PSD, via the minimum
/// eigenvalue of `L^-1 dS L^-T`.
fn max_step(s: &DMatrix<f64>, ds: &DMatrix<f64>, cap: f64) -> f64 {
    let n = s.nrows();
    if n == 0 {
        return cap;
    }
    let chol = match nalgebra::linalg::Cholesky::new(s.clone()) {
        Some(c) => c,
        None => return 0.0,
    };
    // W = L^-1 dS L^-T via two triangular solves.
    let l = chol.l();
    let w1 = l
        .solve_lower_triangular(ds)
        .unwrap_or_else(|| DMatrix::zeros(n, n));
    let w2 = l
        .solve_lower_triangular(&w1.transpose())
        .unwrap_or_else(|| DMatrix::zeros(n, n));
    let w = (w2.clone() + w2.transpose()) * 0.5;
    let eig = nalgebra::linalg::SymmetricEigen::new(w);
    let lam_min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if lam_min >= -1e-14 {
        cap
    } else {
        (-1.0 / lam_min).min(cap)
    }
}

fn min_block_step(x: &BlockVec, dx: &BlockVec, cap: f64) -> f64 {
    let mut alpha = cap;
    for (s, ds) in x.0.iter().zip(dx.0.iter()) {
        alpha = alpha.min(max_step(s, ds, cap));
    }
    alpha
}

/// Solves the standard-form problem with an infeasible-start HKM
/// predictor-corrector method.
pub fn solve_std(p: &StdSdp, opts: &IpmOptions) -> IpmResult {
    let m = p.rows.len();
    let dims = &p.dims;
    let n_tot: usize = dims.iter().sum();
    let b: Vec<f64> = p.rows.iter().map(|r| r.rhs).collect();
    let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_c = p.cost.iter().map(|c| c.norm_squared()).sum::<f64>().sqrt();

    // Starting point: scaled identities keyed to data magnitudes.
    let max_row_norm = p
        .rows
        .iter()
        .flat_map(|r| r.terms.iter().map(|(_, a)| a.norm()))
        .fold(0.0f64, f64::max);
    let max_abs_b = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let sqrt_n = (n_tot.max(1) as f64).sqrt();
    let xi = 10.0f64
        .max(sqrt_n)
        .max(n_tot as f64 * max_abs_b / (1.0 + max_row_norm));
    let zeta = 10.0f64.max(sqrt_n).max(norm_c).max(max_row_norm);

    let mut x = BlockVec::scaled_identity(dims, xi);
    let mut z = BlockVec::scaled_identity(dims, zeta);
    let mut y = vec![0.0f64; m];

    let fail = |x: &BlockVec, y: &Vec<f64>, z: &BlockVec, it: usize| IpmResult {
        status: IpmStatus::NumericalBreakdown,
        x: x.0.clone(),
        y: y.clone(),
        z: z.0.clone(),
        primal_objective: f64::NAN,
        dual_objective: f64::NAN,
        rel_primal_res: f64::INFINITY,
        rel_dual_res: f64::INFINITY,
        rel_gap: f64::INFINITY,
        iterations: it,
    };

    let mut best: Option<IpmResult> = None;
    let tau = 0.98;

    for iter in 0..opts.max_iter {
        // Residuals.
        let ax = apply_a(&p.rows, &x);
        let rp: Vec<f64> = b.iter().zip(ax.iter()).map(|(bi, axi)| bi - axi).collect();
        let aty = apply_a_adjoint(&p.rows, &y, dims);
        let mut rd = BlockVec::zeros(dims);
        for bi in 0..dims.len() {
            rd.0[bi] = &p.cost[bi] - &z.0[bi] - &aty.0[bi];
        }

        let pobj: f64 = p.cost.iter().zip(x.0.iter()).map(|(c, xb)| c.dot(xb)).sum();
        let dobj: f64 = b.iter().zip(y.iter()).map(|(bi, yi)| bi * yi).sum();
        let xz = x.dot(&z);
        let mu = xz / n_tot.max(1) as f64;

        let rel_p = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + norm_b);
        let rel_d = rd.0.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt() / (1.0 + norm_c);
        let rel_gap = xz.abs() / (1.0 + pobj.abs() + dobj.abs());

        let snapshot = |status: IpmStatus| IpmResult {
            status,
            x: x.0.clone(),
            y: y.clone(),
            z: z.0.clone(),
            primal_objective: pobj,
            dual_objective: dobj,
            rel_primal_res: rel_p,
            rel_dual_res: rel_d,
            rel_gap,
            iterations: iter,
        };

        if rel_p <= opts.tol_feas && rel_d <= opts.tol_feas && rel_gap <= opts.tol_gap {
            return snapshot(IpmStatus::Converged);
        }
        match &mut best {
            Some(prev) => {
                if rel_p + rel_d + rel_gap
                    < prev.rel_primal_res + prev.rel_dual_res + prev.rel_gap
                {
                    *prev = snapshot(IpmStatus::MaxIterations);
                }
            }
            None => best = Some(snapshot(IpmStatus::MaxIterations)),
        }

        // Factor Z blocks and form Z^-1.
        let mut zinv = Vec::with_capacity(dims.len());
        let mut ok = true;
        for zb in z.0.iter() {
            let mut zb_try = zb.clone();
            let mut inv = None;
            for ridge_pow in 0..4 {
                if let Some(ch) = nalgebra::linalg::Cholesky::new(zb_try.clone()) {
                    inv = Some(ch.inverse());
                    break;
                }
                let ridge = 1e-14 * 10f64.powi(ridge_pow) * (1.0 + zb.trace() / zb.nrows().max(1) as f64);
                zb_try = zb + DMatrix::identity(zb.nrows(), zb.ncols()) * ridge;
            }
            match inv {
                Some(i) => zinv.push(i),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            return best.unwrap_or_else(|| fail(&x, &y, &z, iter));
        }

        // Schur complement M_ij = sum_b <Z^-1 A_i, A_j X>_F.
        // Precompute P_i = Z^-1 A_i and Q_i = A_i X per block.
        let mut p_mats: Vec<Vec<(usize, DMatrix<f64>)>> = Vec::with_capacity(m);
        let mut q_mats: Vec<Vec<(usize, DMatrix<f64>)>> = Vec::with_capacity(m);
        for row in &p.rows {
            let mut pi = Vec::with_capacity(row.terms.len());
            let mut qi = Vec::with_capacity(row.terms.len());
            for (bi, a) in &row.terms {
                pi.push((*bi, a.left_mul(&zinv[*bi])));
                qi.push((*bi, a.right_mul(&x.0[*bi])));
            }
            p_mats.push(pi);
            q_mats.push(qi);
        }
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                let mut acc = 0.0;
                for (bi, pi) in &p_mats[i] {
                    for (bj, qj) in &q_mats[j] {
                        if bi == bj {
                            // <P_i, Q_j> with P = Z^-1 A_i: Tr(P_i^T Q_j)
                            acc += pi.dot(qj);
                        }
                    }
                }
                schur[(i, j)] = acc;
            }
        }
        // Symmetrize (exact in theory, guards rounding) and factor.
        let schur = (schur.clone() + schur.transpose()) * 0.5;
        let mut chol_m = None;
        let mut ridge = 0.0;
        for attempt in 0..6 {
            let mm = if ridge > 0.0 {
                &schur + DMatrix::identity(m, m) * ridge
            } else {
                schur.clone()
            };
            if let Some(ch) = nalgebra::linalg::Cholesky::new(mm) {
                chol_m = Some(ch);
                break;
            }
            ridge = (schur.trace().abs() / m.max(1) as f64 + 1e-30) * 1e-12 * 10f64.powi(attempt);
        }
        let chol_m = match chol_m {
            Some(c) => c,
            None => return best.unwrap_or_else(|| fail(&x, &y, &z, iter)),
        };

        // V_b = Z^-1 Rd X (shared by predictor and corrector).
        let mut v_term = BlockVec::zeros(dims);
        for bi in 0..dims.len() {
            v_term.0[bi] = &zinv[bi] * &rd.0[bi] * &x.0[bi];
        }

        let solve_direction = |t_term: &BlockVec| -> (Vec<f64>, BlockVec, BlockVec) {
            // rhs_i = rp_i + <A_i, V - T>
            let mut w = BlockVec::zeros(dims);
            for bi in 0..dims.len() {
                w.0[bi] = &v_term.0[bi] - &t_term.0[bi];
            }
            let aw = apply_a(&p.rows, &w);
            let rhs = nalgebra::DVector::from_iterator(
                m,
                rp.iter().zip(aw.iter()).map(|(r, a)| r + a),
            );
            let dy_v = chol_m.solve(&rhs);
            let dy: Vec<f64> = dy_v.iter().copied().collect();
            // dZ = Rd - A*(dy)
            let atdy = apply_a_adjoint(&p.rows, &dy, dims);
            let mut dz = BlockVec::zeros(dims);
            for bi in 0..dims.len() {
                dz.0[bi] = &rd.0[bi] - &atdy.0[bi];
            }
            dz.symmetrize();
            // dX = T - Z^-1 dZ X, symmetrized
            let mut dx = BlockVec::zeros(dims);
            for bi in 0..dims.len() {
                dx.0[bi] = &t_term.0[bi] - &zinv[bi] * &dz.0[bi] * &x.0[bi];
            }
            dx.symmetrize();
            (dy, dx, dz)
        };

        // Predictor (sigma = 0): T = Z^-1 (-ZX) = -X.
        let mut t_aff = BlockVec::zeros(dims);
        for bi in 0..dims.len() {
            t_aff.0[bi] = -&x.0[bi];
        }
        let (_dy_aff, dx_aff, dz_aff) = solve_direction(&t_aff);
        if !dx_aff.is_finite() || !dz_aff.is_finite() {
            return best.unwrap_or_else(|| fail(&x, &y, &z, iter));
        }

        let ap_aff = min_block_step(&x, &dx_aff, 1.0);
        let ad_aff = min_block_step(&z, &dz_aff, 1.0);
        let mut x_probe = BlockVec(x.0.clone());
        x_probe.axpy(ap_aff, &dx_aff);
        let mut z_probe = BlockVec(z.0.clone());
        z_probe.axpy(ad_aff, &dz_aff);
        let mu_aff = x_probe.dot(&z_probe) / n_tot.max(1) as f64;
        let sigma = (mu_aff / mu.max(1e-300)).powi(3).clamp(1e-10, 1.0);

        // Corrector: T = sigma mu Z^-1 - X - Z^-1 dZ_aff dX_aff.
        let mut t_cor = BlockVec::zeros(dims);
        for bi in 0..dims.len() {
            let cross = &dz_aff.0[bi] * &dx_aff.0[bi];
            t_cor.0[bi] = &zinv[bi] * (sigma * mu) - &x.0[bi] - &zinv[bi] * cross;
        }
        let (dy, dx, dz) = solve_direction(&t_cor);
        if !dx.is_finite() || !dz.is_finite() || dy.iter().any(|v| !v.is_finite()) {
            return best.unwrap_or_else(|| fail(&x, &y, &z, iter));
        }

        let ap = (tau * min_block_step(&x, &dx, 1.0 / tau)).min(1.0);
        let ad = (tau * min_block_step(&z, &dz, 1.0 / tau)).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            return best.unwrap_or_else(|| fail(&x, &y, &z, iter));
        }

        x.axpy(ap, &dx);
        x.symmetrize();
        z.axpy(ad, &dz);
        z.symmetrize();
        for (yi, dyi) in y.iter_mut().zip(dy.iter()) {
            *yi += ad * dyi;
        }
        if !x.is_finite() || !z.is_finite() {
            return best.unwrap_or_else(|| fail(&x, &y, &z, iter));
        }
    }

    best.unwrap_or_else(|| fail(&x, &y, &z, opts.max_iter))
}
