//! Van der Pol oscillator in three guises: the phase-plane ODE, a two-mode
//! Hamiltonian whose (x, py) half reproduces it exactly, and the operator
//! algebra of that Hamiltonian on truncated Fock spaces.
//!
//! The scalar oscillator is x'' - mu (1 - x^2) x' + w0^2 x = 0. The
//! four-dimensional system derives from
//!
//! ```text
//! H = px py + w0^2 x y + (lambda/2)(x^2 - 1) y py
//! ```
//!
//! via Hamilton's equations for the pairs (x, px) and (y, py):
//!
//! ```text
//! x'  =  py
//! px' = -w0^2 y - lambda x y py
//! y'  =  px + (lambda/2)(x^2 - 1) y
//! py' = -w0^2 x - (lambda/2)(x^2 - 1) py
//! ```
//!
//! x' and py' involve only (x, py), so that pair evolves independently of
//! the auxiliary (y, px) pair and obeys the scalar oscillator with
//! mu = lambda/2. Both integrators here route the (x, py) derivatives
//! through one shared function, making the reduction exact in floating
//! point, not merely up to discretization error.

use crate::fockspace::{embed_two_mode, quadratures, HilbertSpace, Operator};
use crate::sde::{steps_for, AMPLITUDE_GUARD};
use crate::{Error, Result};
use num_complex::Complex64;

/// Scalar oscillator parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VdpParams {
    pub mu: f64,
    pub omega0: f64,
}

impl VdpParams {
    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || self.mu < 0.0 {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: format!("must be nonnegative and finite, got {}", self.mu),
            });
        }
        check_omega0(self.omega0)
    }
}

/// Two-mode Hamiltonian parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianParams {
    pub lambda: f64,
    pub omega0: f64,
}

impl HamiltonianParams {
    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("must be finite, got {}", self.lambda),
            });
        }
        check_omega0(self.omega0)
    }
}

fn check_omega0(omega0: f64) -> Result<()> {
    if !(omega0.is_finite() && omega0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "omega0",
            reason: format!("must be positive and finite, got {omega0}"),
        });
    }
    Ok(())
}

/// Damping coefficient the Hamiltonian flow induces on its (x, py) half.
pub fn hamiltonian_damping_coefficient(lambda: f64) -> f64 {
    lambda / 2.0
}

/// Point in the four-dimensional phase space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamState {
    pub x: f64,
    pub px: f64,
    pub y: f64,
    pub py: f64,
}

/// H evaluated at a phase-space point; conserved along the flow.
pub fn hamiltonian_energy(params: &HamiltonianParams, s: &HamState) -> f64 {
    let w0sq = params.omega0 * params.omega0;
    s.px * s.py
        + w0sq * s.x * s.y
        + hamiltonian_damping_coefficient(params.lambda) * (s.x * s.x - 1.0) * s.y * s.py
}

/// Recorded oscillator history: position, velocity (py for the Hamiltonian
/// flow) and, when the full system was integrated, the auxiliary pair.
#[derive(Clone, Debug)]
pub struct PhaseTrajectory {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub secondary: Option<SecondaryTrajectory>,
}

#[derive(Clone, Debug)]
pub struct SecondaryTrajectory {
    pub y: Vec<f64>,
    pub px: Vec<f64>,
}

/// The (x, v) vector field shared verbatim by both integrators.
#[inline]
fn oscillator_field(mu: f64, w0sq: f64, x: f64, v: f64) -> (f64, f64) {
    (v, mu * (1.0 - x * x) * v - w0sq * x)
}

/// Fixed-step RK4 for the scalar oscillator, recording every `stride`
/// steps (which must divide the step count).
pub fn integrate_vdp_strided(
    params: &VdpParams,
    x0: f64,
    v0: f64,
    dt: f64,
    t_final: f64,
    stride: usize,
) -> Result<PhaseTrajectory> {
    params.validate()?;
    let steps = checked_steps(dt, t_final, stride)?;
    let w0sq = params.omega0 * params.omega0;
    let f = |x: f64, v: f64| oscillator_field(params.mu, w0sq, x, v);

    let n_rec = steps / stride + 1;
    let mut traj = PhaseTrajectory {
        times: Vec::with_capacity(n_rec),
        x: Vec::with_capacity(n_rec),
        v: Vec::with_capacity(n_rec),
        secondary: None,
    };
    let (mut x, mut v) = (x0, v0);
    traj.times.push(0.0);
    traj.x.push(x);
    traj.v.push(v);
    for step in 0..steps {
        let h = dt / 2.0;
        let (k1x, k1v) = f(x, v);
        let (k2x, k2v) = f(x + h * k1x, v + h * k1v);
        let (k3x, k3v) = f(x + h * k2x, v + h * k2v);
        let (k4x, k4v) = f(x + dt * k3x, v + dt * k3v);
        x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        let t = (step + 1) as f64 * dt;
        guard(x, v, t)?;
        if (step + 1) % stride == 0 {
            traj.times.push(t);
            traj.x.push(x);
            traj.v.push(v);
        }
    }
    Ok(traj)
}

/// [`integrate_vdp_strided`] recording every step.
pub fn integrate_vdp(
    params: &VdpParams,
    x0: f64,
    v0: f64,
    dt: f64,
    t_final: f64,
) -> Result<PhaseTrajectory> {
    integrate_vdp_strided(params, x0, v0, dt, t_final, 1)
}

#[derive(Clone, Copy)]
struct HamDeriv {
    x: f64,
    px: f64,
    y: f64,
    py: f64,
}

fn ham_field(mu: f64, lambda: f64, w0sq: f64, s: &HamState) -> HamDeriv {
    let (dx, dpy) = oscillator_field(mu, w0sq, s.x, s.py);
    HamDeriv {
        x: dx,
        px: -w0sq * s.y - lambda * s.x * s.y * s.py,
        y: s.px + mu * (s.x * s.x - 1.0) * s.y,
        py: dpy,
    }
}

fn ham_shift(s: &HamState, k: &HamDeriv, h: f64) -> HamState {
    HamState {
        x: s.x + h * k.x,
        px: s.px + h * k.px,
        y: s.y + h * k.y,
        py: s.py + h * k.py,
    }
}

/// Fixed-step RK4 for the full Hamiltonian system. The (x, py) pair is
/// advanced by exactly the same arithmetic as [`integrate_vdp_strided`]
/// with mu = lambda/2.
pub fn hamiltonian_flow_strided(
    params: &HamiltonianParams,
    initial: &HamState,
    dt: f64,
    t_final: f64,
    stride: usize,
) -> Result<PhaseTrajectory> {
    params.validate()?;
    let steps = checked_steps(dt, t_final, stride)?;
    let mu = hamiltonian_damping_coefficient(params.lambda);
    let w0sq = params.omega0 * params.omega0;
    let f = |s: &HamState| ham_field(mu, params.lambda, w0sq, s);

    let n_rec = steps / stride + 1;
    let mut traj = PhaseTrajectory {
        times: Vec::with_capacity(n_rec),
        x: Vec::with_capacity(n_rec),
        v: Vec::with_capacity(n_rec),
        secondary: Some(SecondaryTrajectory {
            y: Vec::with_capacity(n_rec),
            px: Vec::with_capacity(n_rec),
        }),
    };
    let mut s = *initial;
    record(&mut traj, 0.0, &s);
    for step in 0..steps {
        let h = dt / 2.0;
        let k1 = f(&s);
        let k2 = f(&ham_shift(&s, &k1, h));
        let k3 = f(&ham_shift(&s, &k2, h));
        let k4 = f(&ham_shift(&s, &k3, dt));
        s = HamState {
            x: s.x + (dt / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            px: s.px + (dt / 6.0) * (k1.px + 2.0 * k2.px + 2.0 * k3.px + k4.px),
            y: s.y + (dt / 6.0) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
            py: s.py + (dt / 6.0) * (k1.py + 2.0 * k2.py + 2.0 * k3.py + k4.py),
        };
        let t = (step + 1) as f64 * dt;
        guard(s.x.abs().max(s.y.abs()), s.px.abs().max(s.py.abs()), t)?;
        if (step + 1) % stride == 0 {
            record(&mut traj, t, &s);
        }
    }
    Ok(traj)
}

/// [`hamiltonian_flow_strided`] recording every step.
pub fn hamiltonian_flow(
    params: &HamiltonianParams,
    initial: &HamState,
    dt: f64,
    t_final: f64,
) -> Result<PhaseTrajectory> {
    hamiltonian_flow_strided(params, initial, dt, t_final, 1)
}

fn record(traj: &mut PhaseTrajectory, t: f64, s: &HamState) {
    traj.times.push(t);
    traj.x.push(s.x);
    traj.v.push(s.py);
    let sec = traj.secondary.as_mut().expect("hamiltonian trajectories carry the auxiliary pair");
    sec.y.push(s.y);
    sec.px.push(s.px);
}

fn guard(x: f64, v: f64, t: f64) -> Result<()> {
    if !(x.is_finite() && v.is_finite()) || x.abs() > AMPLITUDE_GUARD || v.abs() > AMPLITUDE_GUARD
    {
        return Err(Error::Divergence { t, guard: AMPLITUDE_GUARD });
    }
    Ok(())
}

fn checked_steps(dt: f64, t_final: f64, stride: usize) -> Result<usize> {
    let steps = steps_for(dt, t_final)?;
    if stride == 0 || steps % stride != 0 {
        return Err(Error::InvalidParameter {
            name: "record_stride",
            reason: format!("must divide the {steps} steps, got {stride}"),
        });
    }
    Ok(steps)
}

/// Max |x| gap between the scalar oscillator with explicit `mu` and the
/// Hamiltonian flow with `lambda`, from (x0, v0) (auxiliary pair zero).
pub fn trajectory_deviation(
    vdp: &VdpParams,
    ham: &HamiltonianParams,
    x0: f64,
    v0: f64,
    dt: f64,
    t_final: f64,
) -> Result<f64> {
    if (vdp.omega0 - ham.omega0).abs() != 0.0 {
        return Err(Error::InvalidParameter {
            name: "omega0",
            reason: "comparison requires a common frequency".into(),
        });
    }
    let scalar = integrate_vdp(vdp, x0, v0, dt, t_final)?;
    let full = hamiltonian_flow(
        ham,
        &HamState { x: x0, px: 0.0, y: 0.0, py: v0 },
        dt,
        t_final,
    )?;
    Ok(scalar
        .x
        .iter()
        .zip(&full.x)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// [`trajectory_deviation`] with the derived damping mu = lambda/2; zero in
/// exact arithmetic (and here bitwise, the field being shared).
pub fn equivalence_check(
    ham: &HamiltonianParams,
    x0: f64,
    v0: f64,
    dt: f64,
    t_final: f64,
) -> Result<f64> {
    let vdp = VdpParams {
        mu: hamiltonian_damping_coefficient(ham.lambda),
        omega0: ham.omega0,
    };
    trajectory_deviation(&vdp, ham, x0, v0, dt, t_final)
}

/// Limit-cycle measurements from a recorded trajectory.
#[derive(Clone, Copy, Debug)]
pub struct CycleMetrics {
    pub amplitude: f64,
    pub period: f64,
    pub maxima_count: usize,
    pub crossing_count: usize,
}

/// Amplitude (mean of parabola-refined |x| maxima) and period (mean gap
/// between parabola-refined upward zero crossings) over the trajectory
/// tail, discarding the leading `transient_fraction`.
pub fn limit_cycle_metrics(traj: &PhaseTrajectory, transient_fraction: f64) -> Result<CycleMetrics> {
    if !(0.0..1.0).contains(&transient_fraction) {
        return Err(Error::InvalidParameter {
            name: "transient_fraction",
            reason: format!("must lie in [0, 1), got {transient_fraction}"),
        });
    }
    let n = traj.x.len();
    if n < 8 {
        return Err(Error::NoLimitCycle { reason: format!("only {n} samples recorded") });
    }
    let dt = traj.times[1] - traj.times[0];
    let start = ((n as f64 * transient_fraction) as usize).max(1);

    let xs = &traj.x;
    let mut maxima = Vec::new();
    let mut crossings = Vec::new();
    for k in start..n - 1 {
        let (m0, m1, m2) = (xs[k - 1].abs(), xs[k].abs(), xs[k + 1].abs());
        if m1 >= m0 && m1 > m2 {
            maxima.push(refine_peak(m0, m1, m2));
        }
        if xs[k] < 0.0 && xs[k + 1] >= 0.0 {
            let s = refine_crossing(xs[k - 1], xs[k], xs[k + 1]);
            crossings.push(traj.times[k] + s * dt);
        }
    }
    if maxima.len() < 3 {
        return Err(Error::NoLimitCycle {
            reason: format!("only {} amplitude maxima after the transient", maxima.len()),
        });
    }
    if crossings.len() < 2 {
        return Err(Error::NoLimitCycle {
            reason: format!("only {} upward zero crossings after the transient", crossings.len()),
        });
    }
    let amplitude = maxima.iter().sum::<f64>() / maxima.len() as f64;
    let period =
        (crossings.last().unwrap() - crossings.first().unwrap()) / (crossings.len() - 1) as f64;
    Ok(CycleMetrics {
        amplitude,
        period,
        maxima_count: maxima.len(),
        crossing_count: crossings.len(),
    })
}

/// Vertex value of the parabola through three equispaced samples peaking
/// at the middle one.
fn refine_peak(y0: f64, y1: f64, y2: f64) -> f64 {
    let a = 0.5 * (y2 - 2.0 * y1 + y0);
    let b = 0.5 * (y2 - y0);
    if a < 0.0 {
        y1 - b * b / (4.0 * a)
    } else {
        y1
    }
}

/// Root offset in [0, 1] (units of the sample spacing, from the middle
/// sample) of the parabola through three samples bracketing an upward
/// crossing between the middle and last.
fn refine_crossing(y0: f64, y1: f64, y2: f64) -> f64 {
    let a = 0.5 * (y2 - 2.0 * y1 + y0);
    let b = 0.5 * (y2 - y0);
    let c = y1;
    if a.abs() > 1e-12 * b.abs().max(c.abs()) {
        let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
        for root in [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)] {
            if (0.0..=1.0).contains(&root) {
                return root;
            }
        }
    }
    // Chord fallback; b > 0 across an upward crossing.
    (-c / b).clamp(0.0, 1.0)
}

/// Residuals of the operator equations of motion on two `dim`-level modes.
#[derive(Clone, Copy, Debug)]
pub struct CommutatorReport {
    /// max |i[H, x] - py| on the interior (two levels dropped per mode).
    pub position_residual: f64,
    /// max |i[H, py] + w0^2 x + (lambda/2)(x^2 - 1) py| on the interior.
    pub momentum_residual: f64,
    /// Same residuals over the whole truncated space; the cutoff edge
    /// contributes O(dim) here.
    pub position_residual_full: f64,
    pub momentum_residual_full: f64,
    /// The literal operator ordering (x^2 - 1) y py is not Hermitian for
    /// lambda != 0; this is its defect, reported, not rejected.
    pub hamiltonian_hermiticity: f64,
}

/// Builds H = px py + w0^2 x y + (lambda/2)(x^2 - 1) y py on
/// Fock(dim) x Fock(dim) and checks Hamilton's equations as operator
/// identities, exact away from the truncation edge.
pub fn quantum_commutator_check(
    params: &HamiltonianParams,
    dim: usize,
) -> Result<CommutatorReport> {
    params.validate()?;
    if dim < 5 {
        return Err(Error::InvalidDimension(dim));
    }
    let (q, p) = quadratures(dim)?;
    let id = Operator::identity(&HilbertSpace::single(dim)?);
    let x = embed_two_mode(&q, &id)?;
    let px = embed_two_mode(&p, &id)?;
    let y = embed_two_mode(&id, &q)?;
    let py = embed_two_mode(&id, &p)?;
    let full_id = Operator::identity(x.space());

    let w0sq = Complex64::new(params.omega0 * params.omega0, 0.0);
    let half_lambda = Complex64::new(hamiltonian_damping_coefficient(params.lambda), 0.0);
    let x2m1 = &(&x * &x) - &full_id;
    let h = {
        let kinetic = &px * &py;
        let potential = (&x * &y).scale(w0sq);
        let nonlinear = (&(&x2m1 * &y) * &py).scale(half_lambda);
        &(&kinetic + &potential) + &nonlinear
    };

    let i = Complex64::i();
    let r1 = &h.commutator(&x)?.scale(i) - &py;
    let r2 = {
        let drag = (&x2m1 * &py).scale(half_lambda);
        let restoring = x.scale(w0sq);
        &(&h.commutator(&py)?.scale(i) + &restoring) + &drag
    };

    Ok(CommutatorReport {
        position_residual: r1.interior_max_abs(2),
        momentum_residual: r2.interior_max_abs(2),
        position_residual_full: r1.max_abs(),
        momentum_residual_full: r2.max_abs(),
        hamiltonian_hermiticity: h.hermiticity_residual(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const COS_PARAMS: VdpParams = VdpParams { mu: 0.0, omega0: 1.0 };

    #[test]
    fn zero_damping_reduces_to_a_harmonic_oscillator() {
        let traj = integrate_vdp(&COS_PARAMS, 1.0, 0.0, 1e-4, 10.0).unwrap();
        let got = *traj.x.last().unwrap();
        assert!((got - 10.0f64.cos()).abs() < 1e-10, "{got}");
        let v = *traj.v.last().unwrap();
        assert!((v + 10.0f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn weak_damping_settles_near_amplitude_two() {
        // High-accuracy reference: max |x| on the cycle is 2.00010 at
        // mu = 0.1 (2 + O(mu^2)).
        let params = VdpParams { mu: 0.1, omega0: 1.0 };
        let traj = integrate_vdp(&params, 0.5, 0.0, 1e-3, 300.0).unwrap();
        let metrics = limit_cycle_metrics(&traj, 0.5).unwrap();
        assert!((metrics.amplitude - 2.0).abs() < 0.01);
        assert!((metrics.amplitude - 2.00010).abs() < 5e-4, "{}", metrics.amplitude);
        // 2 pi (1 + mu^2 / 16) to this order.
        assert!((metrics.period - 6.28711).abs() < 1e-3, "{}", metrics.period);
    }

    #[test]
    fn relaxation_period_matches_the_reference_value() {
        // High-accuracy reference at mu = 10, w0 = 1 (step-halving stable
        // to 1e-9): period 19.0783695669. The leading relaxation asymptote
        // (3 - 2 ln 2) mu = 16.14 underestimates it by ~18%, so the band
        // around the reference is tight and the asymptote check loose.
        let params = VdpParams { mu: 10.0, omega0: 1.0 };
        let traj = integrate_vdp_strided(&params, 2.0, 0.0, 1e-3, 400.0, 10).unwrap();
        let metrics = limit_cycle_metrics(&traj, 0.5).unwrap();
        assert!((metrics.period - 19.0783695669).abs() < 1e-3, "{}", metrics.period);
        let asymptote = (3.0 - 2.0 * 2.0f64.ln()) * 10.0;
        assert!((metrics.period - asymptote).abs() / asymptote < 0.25);
    }

    #[test]
    fn cosine_metrics_recover_unit_amplitude_and_two_pi() {
        let traj = integrate_vdp(&COS_PARAMS, 1.0, 0.0, 1e-3, 20.0).unwrap();
        let metrics = limit_cycle_metrics(&traj, 0.25).unwrap();
        assert!((metrics.amplitude - 1.0).abs() < 1e-6);
        assert!((metrics.period - std::f64::consts::TAU).abs() < 1e-6);
    }

    #[test]
    fn degenerate_trajectories_report_no_cycle() {
        let rest = integrate_vdp(&COS_PARAMS, 0.0, 0.0, 1e-3, 5.0).unwrap();
        assert!(matches!(
            limit_cycle_metrics(&rest, 0.5),
            Err(Error::NoLimitCycle { .. })
        ));
        let short = integrate_vdp(&COS_PARAMS, 1.0, 0.0, 1e-3, 1.0).unwrap();
        assert!(matches!(
            limit_cycle_metrics(&short, 0.5),
            Err(Error::NoLimitCycle { .. })
        ));
        let traj = integrate_vdp(&COS_PARAMS, 1.0, 0.0, 1e-3, 20.0).unwrap();
        assert!(limit_cycle_metrics(&traj, 1.0).is_err());
    }

    #[test]
    fn linear_hamiltonian_flow_matches_the_analytic_solution() {
        // lambda = 0 decouples into two harmonic pairs: (x, py) and
        // (y, px) each rotate at omega0.
        let params = HamiltonianParams { lambda: 0.0, omega0: 2.0 };
        let s0 = HamState { x: 0.3, px: -0.4, y: 0.7, py: 0.1 };
        let traj = hamiltonian_flow(&params, &s0, 1e-4, 5.0).unwrap();
        let (w, t) = (2.0f64, 5.0f64);
        let x_want = s0.x * (w * t).cos() + s0.py / w * (w * t).sin();
        let y_want = s0.y * (w * t).cos() + s0.px / w * (w * t).sin();
        assert!((traj.x.last().unwrap() - x_want).abs() < 1e-9);
        let sec = traj.secondary.as_ref().unwrap();
        assert!((sec.y.last().unwrap() - y_want).abs() < 1e-9);
    }

    #[test]
    fn field_matches_numerical_gradients_of_the_energy() {
        // H is quadratic in each coordinate separately, so central
        // differences are exact up to rounding.
        let params = HamiltonianParams { lambda: 0.7, omega0: 1.3 };
        let s = HamState { x: 0.4, px: -0.2, y: 0.3, py: 0.5 };
        let h = 1e-4;
        let energy = |s: HamState| hamiltonian_energy(&params, &s);
        let grad_px = (energy(HamState { px: s.px + h, ..s })
            - energy(HamState { px: s.px - h, ..s }))
            / (2.0 * h);
        let grad_py = (energy(HamState { py: s.py + h, ..s })
            - energy(HamState { py: s.py - h, ..s }))
            / (2.0 * h);
        let grad_x =
            (energy(HamState { x: s.x + h, ..s }) - energy(HamState { x: s.x - h, ..s }))
                / (2.0 * h);
        let grad_y =
            (energy(HamState { y: s.y + h, ..s }) - energy(HamState { y: s.y - h, ..s }))
                / (2.0 * h);

        let mu = hamiltonian_damping_coefficient(params.lambda);
        let w0sq = params.omega0 * params.omega0;
        let k = ham_field(mu, params.lambda, w0sq, &s);
        assert!((k.x - grad_px).abs() < 1e-10);
        assert!((k.y - grad_py).abs() < 1e-10);
        assert!((k.px + grad_x).abs() < 1e-10);
        assert!((k.py + grad_y).abs() < 1e-10);
    }

    #[test]
    fn energy_is_conserved_along_a_driven_auxiliary_pair() {
        let params = HamiltonianParams { lambda: 0.2, omega0: 1.0 };
        let s0 = HamState { x: 2.0, px: 0.3, y: -0.2, py: 0.0 };
        let traj = hamiltonian_flow_strided(&params, &s0, 1e-3, 10.0, 10).unwrap();
        let e0 = hamiltonian_energy(&params, &s0);
        let sec = traj.secondary.as_ref().unwrap();
        let drift = (0..traj.times.len())
            .map(|k| {
                let s = HamState {
                    x: traj.x[k],
                    px: sec.px[k],
                    y: sec.y[k],
                    py: traj.v[k],
                };
                (hamiltonian_energy(&params, &s) - e0).abs()
            })
            .fold(0.0, f64::max);
        assert!(drift < 1e-8, "energy drift {drift}");
    }

    #[test]
    fn oscillator_pair_ignores_the_auxiliary_pair() {
        let params = HamiltonianParams { lambda: 0.4, omega0: 1.0 };
        let a = hamiltonian_flow(
            &params,
            &HamState { x: 1.2, px: 0.0, y: 0.0, py: -0.3 },
            1e-3,
            8.0,
        )
        .unwrap();
        let b = hamiltonian_flow(
            &params,
            &HamState { x: 1.2, px: 0.7, y: -0.9, py: -0.3 },
            1e-3,
            8.0,
        )
        .unwrap();
        // Bitwise: the (x, py) stages never read (y, px).
        assert_eq!(a.x, b.x);
        assert_eq!(a.v, b.v);
        // And a zero auxiliary pair stays exactly zero.
        let sec = a.secondary.as_ref().unwrap();
        assert!(sec.y.iter().all(|&y| y == 0.0));
        assert!(sec.px.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn reduction_is_exact_and_the_factor_two_control_fails() {
        let ham = HamiltonianParams { lambda: 0.2, omega0: 1.0 };
        let dev = equivalence_check(&ham, 2.0, 0.0, 1e-3, 30.0).unwrap();
        assert_eq!(dev, 0.0);
        // mu = lambda instead of lambda/2 drifts visibly.
        let wrong = VdpParams { mu: 0.2, omega0: 1.0 };
        let dev = trajectory_deviation(&wrong, &ham, 2.0, 0.0, 1e-3, 30.0).unwrap();
        assert!(dev > 1e-2, "{dev}");
    }

    #[test]
    fn quadratic_hamiltonian_satisfies_the_operator_equations() {
        let params = HamiltonianParams { lambda: 0.0, omega0: 1.0 };
        let report = quantum_commutator_check(&params, 8).unwrap();
        assert!(report.position_residual < 1e-12, "{}", report.position_residual);
        assert!(report.momentum_residual < 1e-12, "{}", report.momentum_residual);
        assert!(report.hamiltonian_hermiticity < 1e-13);
        // The truncation edge violates the canonical commutator by O(dim).
        assert!(report.position_residual_full > 1.0);
    }

    #[test]
    fn cubic_hamiltonian_satisfies_the_operator_equations_inside() {
        let params = HamiltonianParams { lambda: 0.3, omega0: 1.0 };
        let report = quantum_commutator_check(&params, 12).unwrap();
        assert!(report.position_residual < 1e-10, "{}", report.position_residual);
        assert!(report.momentum_residual < 1e-10, "{}", report.momentum_residual);
        // Literal ordering: y py is measurably non-Hermitian.
        assert!(report.hamiltonian_hermiticity > 1e-3);
    }

    #[test]
    fn guards_and_validation_trip_on_bad_input() {
        assert!(VdpParams { mu: -1.0, omega0: 1.0 }.validate().is_err());
        assert!(VdpParams { mu: 1.0, omega0: 0.0 }.validate().is_err());
        assert!(quantum_commutator_check(&HamiltonianParams { lambda: 0.1, omega0: 1.0 }, 3)
            .is_err());
        assert!(integrate_vdp_strided(&COS_PARAMS, 1.0, 0.0, 1e-3, 1.0, 3).is_err());
    }
}
