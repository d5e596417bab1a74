//! GKSL (Lindblad) master equations on truncated Fock spaces.
//!
//! The generator acting on a density matrix is
//!
//! ```text
//! L(rho) = -i [H, rho] + sum_k kappa_k ( J_k rho J_k^dag
//!          - 1/2 { J_k^dag J_k, rho } )
//! ```
//!
//! and its adjoint, acting on observables in the Heisenberg picture, is
//!
//! ```text
//! L^dag(A) = +i [H, A] + sum_k kappa_k ( J_k^dag A J_k
//!            - 1/2 { J_k^dag J_k, A } )
//! ```
//!
//! The two are linked by trace duality, tr(A L(rho)) = tr(L^dag(A) rho),
//! which doubles as a cross-check between the two implementations. L is
//! trace-free and L^dag is unital (L^dag(1) = 0) for every rate choice.
//!
//! Time evolution uses fixed-step classical RK4 with re-Hermitization
//! rho <- (rho + rho^dag)/2 after every step. Trace drift beyond tolerance
//! is a hard error; growth of the truncation-tail population past its
//! threshold completes the run but surfaces as a warning-class error
//! carrying the finished trajectory.

use num_complex::Complex64;

use crate::fockspace::{c, max_abs, trace_product, CMatrix, HilbertSpace, Operator};
use crate::{Error, Result};

/// Default threshold on the total population of edge basis states.
pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-6;
/// Default hard bound on |tr(rho) - 1| during evolution.
pub const DEFAULT_TRACE_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Density matrix bound to its space. Constructors validate trace,
/// Hermiticity and positivity; evolution code maintains those invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    m: CMatrix,
}

impl DensityMatrix {
    /// Validating constructor: trace and Hermiticity within 1e-8, smallest
    /// eigenvalue above -1e-8.
    pub fn from_matrix(space: HilbertSpace, m: CMatrix) -> Result<Self> {
        let dim = space.total_dim();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::ShapeMismatch {
                rows: m.nrows(),
                cols: m.ncols(),
                dim,
            });
        }
        let herm = max_abs(&(&m - m.adjoint()));
        if herm > 1e-8 {
            return Err(Error::InvalidState {
                reason: format!("not Hermitian: max |rho - rho^dag| = {herm:.3e}"),
            });
        }
        let tr = m.trace();
        if (tr - ONE).norm() > 1e-8 {
            return Err(Error::InvalidState {
                reason: format!("trace is {tr} instead of 1"),
            });
        }
        let min_eig = min_eigenvalue_of(&m);
        if min_eig < -1e-8 {
            return Err(Error::InvalidState {
                reason: format!("negative eigenvalue {min_eig:.3e}"),
            });
        }
        Ok(DensityMatrix { space, m })
    }

    pub(crate) fn raw(space: HilbertSpace, m: CMatrix) -> Self {
        debug_assert_eq!(m.nrows(), space.total_dim());
        DensityMatrix { space, m }
    }

    /// Number state |n><n|.
    pub fn fock(dim: usize, n: usize) -> Result<Self> {
        let space = HilbertSpace::single(dim)?;
        if n >= dim {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("level {n} outside 0..{dim}"),
            });
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(n, n)] = ONE;
        Ok(DensityMatrix::raw(space, m))
    }

    /// Coherent state |alpha><alpha| truncated to `dim` levels and then
    /// renormalized, so tr(rho) = 1 exactly regardless of the cut tail.
    pub fn coherent(dim: usize, alpha: Complex64) -> Result<Self> {
        let space = HilbertSpace::single(dim)?;
        let mut psi = vec![ZERO; dim];
        psi[0] = ONE;
        for n in 1..dim {
            psi[n] = psi[n - 1] * alpha / c((n as f64).sqrt());
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut psi {
            *z /= c(norm);
        }
        let mut m = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        Ok(DensityMatrix::raw(space, m))
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// Diagonal populations in the tensor-product basis.
    pub fn photon_distribution(&self) -> Vec<f64> {
        (0..self.space.total_dim()).map(|i| self.m[(i, i)].re).collect()
    }

    /// Population of basis states with some mode at its top truncation level.
    pub fn tail_population(&self) -> f64 {
        self.space
            .edge_indices()
            .into_iter()
            .map(|i| self.m[(i, i)].re)
            .sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.m - self.m.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue_of(&self.m)
    }
}

fn min_eigenvalue_of(m: &CMatrix) -> f64 {
    // symmetric_eigenvalues reads the matrix as Hermitian; pre-Hermitize so
    // slightly asymmetric inputs are treated as their Hermitian part.
    let mut h = m.clone();
    hermitize(&mut h);
    h.symmetric_eigenvalues().min()
}

/// Per-state health report; see [`StateTolerances`] for the pinned bounds.
#[derive(Clone, Copy, Debug)]
pub struct StateDiagnostics {
    pub trace_error: f64,
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
    pub tail_population: f64,
}

impl StateDiagnostics {
    pub fn within(&self, tol: &StateTolerances) -> bool {
        self.trace_error <= tol.trace
            && self.hermiticity_residual <= tol.hermiticity
            && self.min_eigenvalue >= tol.eigenvalue_floor
            && self.tail_population <= tol.tail
    }
}

/// Acceptance bounds for evolved states.
#[derive(Clone, Copy, Debug)]
pub struct StateTolerances {
    pub trace: f64,
    pub hermiticity: f64,
    pub eigenvalue_floor: f64,
    pub tail: f64,
}

impl Default for StateTolerances {
    fn default() -> Self {
        StateTolerances {
            trace: 1e-9,
            hermiticity: 1e-10,
            eigenvalue_floor: -1e-8,
            tail: DEFAULT_TAIL_THRESHOLD,
        }
    }
}

pub fn validate_state(rho: &DensityMatrix) -> StateDiagnostics {
    StateDiagnostics {
        trace_error: (rho.trace() - ONE).norm(),
        hermiticity_residual: rho.hermiticity_residual(),
        min_eigenvalue: rho.min_eigenvalue(),
        tail_population: rho.tail_population(),
    }
}

/// One dissipation channel: rate kappa >= 0 and jump operator J.
#[derive(Clone, Debug)]
pub struct Dissipator {
    pub rate: f64,
    pub jump: Operator,
}

impl Dissipator {
    pub fn new(rate: f64, jump: Operator) -> Result<Self> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::NegativeRate(rate));
        }
        Ok(Dissipator { rate, jump })
    }
}

/// Hamiltonian plus dissipation channels on a common space.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    h: Operator,
    dissipators: Vec<Dissipator>,
}

impl LindbladModel {
    pub fn new(hamiltonian: Operator, dissipators: Vec<Dissipator>) -> Result<Self> {
        let scale = hamiltonian.max_abs().max(1.0);
        let res = hamiltonian.hermiticity_residual();
        if res > 1e-10 * scale {
            return Err(Error::NotHermitian { residual: res });
        }
        for d in &dissipators {
            if !d.rate.is_finite() || d.rate < 0.0 {
                return Err(Error::NegativeRate(d.rate));
            }
            if d.jump.space() != hamiltonian.space() {
                return Err(Error::SpaceMismatch {
                    left: hamiltonian.space().clone(),
                    right: d.jump.space().clone(),
                });
            }
        }
        Ok(LindbladModel { h: hamiltonian, dissipators })
    }

    pub fn space(&self) -> &HilbertSpace {
        self.h.space()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.h
    }

    pub fn dissipators(&self) -> &[Dissipator] {
        &self.dissipators
    }
}

/// Operator factor in a product, stored sparse when it pays off. Ladder
/// monomials and number operators have O(dim) nonzeros, which turns one
/// Liouvillian application from O(dim^3) into O(dim^2).
enum Factor {
    Sparse { entries: Vec<(usize, usize, Complex64)> },
    Dense(CMatrix),
}

impl Factor {
    fn from_dense(m: &CMatrix) -> Self {
        let d = m.nrows();
        let mut entries = Vec::new();
        for col in 0..d {
            for row in 0..d {
                let v = m[(row, col)];
                if v != ZERO {
                    entries.push((row, col, v));
                }
            }
        }
        if entries.len() * 8 <= d * d {
            Factor::Sparse { entries }
        } else {
            Factor::Dense(m.clone())
        }
    }

    /// out += c * self * x
    fn left_mul_add(&self, c: Complex64, x: &CMatrix, out: &mut CMatrix) {
        match self {
            Factor::Dense(m) => out.gemm(c, m, x, ONE),
            Factor::Sparse { entries } => {
                let d = x.nrows();
                for col in 0..d {
                    let xc = x.column(col);
                    let mut oc = out.column_mut(col);
                    for &(row, k, v) in entries {
                        oc[row] += c * v * xc[k];
                    }
                }
            }
        }
    }

    /// out += c * x * self
    fn right_mul_add(&self, c: Complex64, x: &CMatrix, out: &mut CMatrix) {
        match self {
            Factor::Dense(m) => out.gemm(c, x, m, ONE),
            Factor::Sparse { entries } => {
                for &(k, col, v) in entries {
                    let xc = x.column(k);
                    out.column_mut(col).axpy(c * v, &xc, ONE);
                }
            }
        }
    }
}

/// Precomputed channel products for the hot evolution loop.
struct Prepared {
    h: Factor,
    channels: Vec<Channel>,
}

struct Channel {
    rate: Complex64,
    j: Factor,
    j_adj: Factor,
    /// J^dag J, shared by both Lindblad and adjoint forms.
    jj: Factor,
}

impl Prepared {
    fn new(model: &LindbladModel) -> Self {
        let channels = model
            .dissipators
            .iter()
            .map(|d| {
                let j = d.jump.matrix();
                let j_adj = j.adjoint();
                let jj = &j_adj * j;
                Channel {
                    rate: c(d.rate),
                    j: Factor::from_dense(j),
                    j_adj: Factor::from_dense(&j_adj),
                    jj: Factor::from_dense(&jj),
                }
            })
            .collect();
        Prepared { h: Factor::from_dense(model.h.matrix()), channels }
    }

    /// out = L(rho); `tmp` is same-shape scratch.
    fn apply_into(&self, rho: &CMatrix, out: &mut CMatrix, tmp: &mut CMatrix) {
        out.fill(ZERO);
        let i = Complex64::i();
        self.h.left_mul_add(-i, rho, out);
        self.h.right_mul_add(i, rho, out);
        for ch in &self.channels {
            tmp.fill(ZERO);
            ch.j.left_mul_add(ONE, rho, tmp);
            ch.j_adj.right_mul_add(ch.rate, tmp, out);
            let half = ch.rate * c(-0.5);
            ch.jj.left_mul_add(half, rho, out);
            ch.jj.right_mul_add(half, rho, out);
        }
    }

    /// out = L^dag(a).
    fn adjoint_into(&self, a: &CMatrix, out: &mut CMatrix, tmp: &mut CMatrix) {
        out.fill(ZERO);
        let i = Complex64::i();
        self.h.left_mul_add(i, a, out);
        self.h.right_mul_add(-i, a, out);
        for ch in &self.channels {
            tmp.fill(ZERO);
            ch.j_adj.left_mul_add(ONE, a, tmp);
            ch.j.right_mul_add(ch.rate, tmp, out);
            let half = ch.rate * c(-0.5);
            ch.jj.left_mul_add(half, a, out);
            ch.jj.right_mul_add(half, a, out);
        }
    }
}

fn check_space(model: &LindbladModel, space: &HilbertSpace) -> Result<()> {
    if model.space() != space {
        return Err(Error::SpaceMismatch {
            left: model.space().clone(),
            right: space.clone(),
        });
    }
    Ok(())
}

/// Schroedinger-picture generator: d rho / dt. The result is Hermitian and
/// traceless but not a state, so it is returned as a plain operator.
pub fn liouvillian_apply(model: &LindbladModel, rho: &DensityMatrix) -> Result<Operator> {
    check_space(model, rho.space())?;
    let d = model.space().total_dim();
    let prepared = Prepared::new(model);
    let mut out = CMatrix::zeros(d, d);
    let mut tmp = CMatrix::zeros(d, d);
    prepared.apply_into(rho.matrix(), &mut out, &mut tmp);
    Ok(Operator::raw(model.space().clone(), out))
}

/// Heisenberg-picture generator: d A / dt for an observable A.
pub fn adjoint_apply(model: &LindbladModel, a: &Operator) -> Result<Operator> {
    check_space(model, a.space())?;
    let d = model.space().total_dim();
    let prepared = Prepared::new(model);
    let mut out = CMatrix::zeros(d, d);
    let mut tmp = CMatrix::zeros(d, d);
    prepared.adjoint_into(a.matrix(), &mut out, &mut tmp);
    Ok(Operator::raw(model.space().clone(), out))
}

/// Fixed-step evolution controls. `steps` must be a multiple of
/// `record_stride`; diagnostics are tracked every step, recorded on stride.
#[derive(Clone, Debug)]
pub struct EvolveOptions {
    pub dt: f64,
    pub steps: usize,
    pub record_stride: usize,
    pub tail_threshold: f64,
    pub trace_tol: f64,
}

impl EvolveOptions {
    pub fn new(dt: f64, steps: usize) -> Self {
        EvolveOptions {
            dt,
            steps,
            record_stride: 1,
            tail_threshold: DEFAULT_TAIL_THRESHOLD,
            trace_tol: DEFAULT_TRACE_TOL,
        }
    }

    pub fn with_stride(mut self, record_stride: usize) -> Self {
        self.record_stride = record_stride;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be positive and finite, got {}", self.dt),
            });
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter {
                name: "steps",
                reason: "must be at least 1".into(),
            });
        }
        if self.record_stride == 0 || self.steps % self.record_stride != 0 {
            return Err(Error::InvalidParameter {
                name: "record_stride",
                reason: format!(
                    "must be positive and divide steps ({} steps, stride {})",
                    self.steps, self.record_stride
                ),
            });
        }
        Ok(())
    }
}

/// Recorded master-equation run: times, named observable expectations, and
/// per-record diagnostics.
#[derive(Clone, Debug)]
pub struct MeTrajectory {
    pub times: Vec<f64>,
    observable_names: Vec<String>,
    observable_values: Vec<Vec<Complex64>>,
    pub trace_error: Vec<f64>,
    pub tail_population: Vec<f64>,
    pub min_eigenvalue: Vec<f64>,
    pub final_state: DensityMatrix,
}

impl MeTrajectory {
    pub fn observable(&self, name: &str) -> Option<&[Complex64]> {
        self.observable_names
            .iter()
            .position(|n| n == name)
            .map(|k| self.observable_values[k].as_slice())
    }

    pub fn observable_names(&self) -> &[String] {
        &self.observable_names
    }
}

/// RK4 evolution with defaults (record every step, standard thresholds).
pub fn evolve_rk4(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    dt: f64,
    steps: usize,
    observables: &[(&str, &Operator)],
) -> Result<MeTrajectory> {
    evolve_rk4_with(model, rho0, &EvolveOptions::new(dt, steps), observables)
}

pub fn evolve_rk4_with(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    opts: &EvolveOptions,
    observables: &[(&str, &Operator)],
) -> Result<MeTrajectory> {
    opts.validate()?;
    check_space(model, rho0.space())?;
    for (name, op) in observables {
        if op.space() != model.space() {
            return Err(Error::InvalidParameter {
                name: "observables",
                reason: format!("observable `{name}` acts on {}", op.space()),
            });
        }
    }

    let d = model.space().total_dim();
    let prepared = Prepared::new(model);
    let edge = model.space().edge_indices();

    let mut rho = rho0.matrix().clone();
    let mut k1 = CMatrix::zeros(d, d);
    let mut k2 = CMatrix::zeros(d, d);
    let mut k3 = CMatrix::zeros(d, d);
    let mut k4 = CMatrix::zeros(d, d);
    let mut stage = CMatrix::zeros(d, d);
    let mut tmp = CMatrix::zeros(d, d);

    let n_records = opts.steps / opts.record_stride + 1;
    let mut times = Vec::with_capacity(n_records);
    let mut values: Vec<Vec<Complex64>> =
        vec![Vec::with_capacity(n_records); observables.len()];
    let mut trace_error = Vec::with_capacity(n_records);
    let mut tail_series = Vec::with_capacity(n_records);
    let mut min_eig = Vec::with_capacity(n_records);
    let mut max_tail: f64 = 0.0;

    let tail_of = |m: &CMatrix| -> f64 { edge.iter().map(|&i| m[(i, i)].re).sum() };

    let record = |t: f64,
                      m: &CMatrix,
                      times: &mut Vec<f64>,
                      values: &mut Vec<Vec<Complex64>>,
                      trace_error: &mut Vec<f64>,
                      tail_series: &mut Vec<f64>,
                      min_eig: &mut Vec<f64>| {
        times.push(t);
        for (k, (_, op)) in observables.iter().enumerate() {
            values[k].push(trace_product(op.matrix(), m));
        }
        trace_error.push((m.trace() - ONE).norm());
        tail_series.push(tail_of(m));
        min_eig.push(min_eigenvalue_of(m));
    };

    max_tail = max_tail.max(tail_of(&rho));
    record(
        0.0, &rho, &mut times, &mut values, &mut trace_error, &mut tail_series, &mut min_eig,
    );

    let dt = opts.dt;
    for step in 0..opts.steps {
        // Classical RK4 on the matrix ODE rho' = L(rho).
        prepared.apply_into(&rho, &mut k1, &mut tmp);
        stage.copy_from(&rho);
        axpy_mat(&mut stage, c(dt / 2.0), &k1);
        prepared.apply_into(&stage, &mut k2, &mut tmp);
        stage.copy_from(&rho);
        axpy_mat(&mut stage, c(dt / 2.0), &k2);
        prepared.apply_into(&stage, &mut k3, &mut tmp);
        stage.copy_from(&rho);
        axpy_mat(&mut stage, c(dt), &k3);
        prepared.apply_into(&stage, &mut k4, &mut tmp);

        axpy_mat(&mut rho, c(dt / 6.0), &k1);
        axpy_mat(&mut rho, c(dt / 3.0), &k2);
        axpy_mat(&mut rho, c(dt / 3.0), &k3);
        axpy_mat(&mut rho, c(dt / 6.0), &k4);
        hermitize(&mut rho);

        let t = (step + 1) as f64 * dt;
        let drift = (rho.trace() - ONE).norm();
        if drift > opts.trace_tol {
            return Err(Error::TraceDrift { t, drift, tol: opts.trace_tol });
        }
        max_tail = max_tail.max(tail_of(&rho));

        if (step + 1) % opts.record_stride == 0 {
            record(
                t, &rho, &mut times, &mut values, &mut trace_error, &mut tail_series,
                &mut min_eig,
            );
        }
    }

    let trajectory = MeTrajectory {
        times,
        observable_names: observables.iter().map(|(n, _)| n.to_string()).collect(),
        observable_values: values,
        trace_error,
        tail_population: tail_series,
        min_eigenvalue: min_eig,
        final_state: DensityMatrix::raw(model.space().clone(), rho),
    };

    if max_tail > opts.tail_threshold {
        return Err(Error::TruncationTail {
            max_tail,
            threshold: opts.tail_threshold,
            trajectory: Box::new(trajectory),
        });
    }
    Ok(trajectory)
}

/// Matrix of L acting on column-major vectorized density matrices:
/// vec(A rho B) = (B^T (x) A) vec(rho).
pub fn liouvillian_matrix(model: &LindbladModel) -> CMatrix {
    let d = model.space().total_dim();
    let id = CMatrix::identity(d, d);
    let i = Complex64::i();
    let h = model.h.matrix();
    let mut l = id.kronecker(h) * (-i);
    l += h.transpose().kronecker(&id) * i;
    for diss in &model.dissipators {
        let kappa = c(diss.rate);
        let j = diss.jump.matrix();
        let j_conj = j.map(|z| z.conj());
        let jj = j.adjoint() * j;
        l += j_conj.kronecker(j) * kappa;
        l += id.kronecker(&jj) * (kappa * c(-0.5));
        l += jj.transpose().kronecker(&id) * (kappa * c(-0.5));
    }
    l
}

/// Direct steady-state solve: the trace row replaces the first row of the
/// vectorized generator and the patched system is LU-factored with full
/// pivoting. A rank-deficient patched matrix means the generator null space
/// is at least two-dimensional (no unique steady state).
pub fn steady_state(model: &LindbladModel) -> Result<DensityMatrix> {
    let d = model.space().total_dim();
    let n = d * d;
    let mut m = liouvillian_matrix(model);
    for col in 0..n {
        m[(0, col)] = ZERO;
    }
    for i in 0..d {
        m[(0, i * d + i)] = ONE;
    }
    let mut b = nalgebra::DVector::<Complex64>::zeros(n);
    b[0] = ONE;

    let lu = m.full_piv_lu();
    // Full pivoting orders |U_kk| roughly by size; a vanishing late pivot
    // signals rank deficiency of the patched system.
    let u = lu.u();
    let u_max = (0..n).map(|k| u[(k, k)].norm()).fold(0.0, f64::max);
    if u_max == 0.0 || (0..n).any(|k| u[(k, k)].norm() < 1e-12 * u_max) {
        return Err(Error::NoUniqueSteadyState);
    }
    let x = lu.solve(&b).ok_or(Error::NoUniqueSteadyState)?;

    let mut rho = CMatrix::from_column_slice(d, d, x.as_slice());
    hermitize(&mut rho);
    let tr = rho.trace();
    if tr.norm() < 1e-10 {
        return Err(Error::SteadyStateSolve {
            reason: format!("null vector has negligible trace {tr}"),
        });
    }
    rho /= tr;

    // Fixed-point residual in the original (unpatched) generator.
    let l = liouvillian_matrix(model);
    let v = nalgebra::DVector::<Complex64>::from_column_slice(rho.as_slice());
    let residual = (&l * &v).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if residual > 1e-10 {
        return Err(Error::SteadyStateSolve {
            reason: format!("fixed-point residual {residual:.3e} exceeds 1e-10"),
        });
    }

    let state = DensityMatrix::raw(model.space().clone(), rho);
    let diag = validate_state(&state);
    if diag.min_eigenvalue < -1e-8 {
        return Err(Error::SteadyStateSolve {
            reason: format!("negative eigenvalue {:.3e}", diag.min_eigenvalue),
        });
    }
    if diag.tail_population > DEFAULT_TAIL_THRESHOLD {
        return Err(Error::TruncationInadequate {
            reason: format!(
                "steady state keeps {:.3e} population at the truncation edge",
                diag.tail_population
            ),
        });
    }
    Ok(state)
}

pub(crate) fn axpy_mat(y: &mut CMatrix, alpha: Complex64, x: &CMatrix) {
    debug_assert_eq!(y.shape(), x.shape());
    for (yi, xi) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *yi += alpha * *xi;
    }
}

pub(crate) fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = c(m[(i, i)].re);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}
