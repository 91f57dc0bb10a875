//! Direct integration of the coupled-oscillator equations in real form,
//! driven by cos(omega t), with quadrature demodulation of the settled
//! window. Validates the closed-form frequency responses end-to-end
//! instead of assuming the phasor convention.

use mech_core::{MechError, ModalParams};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimeDomainError {
    #[error(transparent)]
    Params(#[from] MechError),
    #[error("dt = {dt} exceeds the stability bound {max} (0.05 of the fastest period)")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("invalid step or horizon: dt and t_end must be positive and finite")]
    BadHorizon,
    #[error("non-finite state at t = {t}: integration diverged")]
    Diverged { t: f64 },
    #[error("need at least 4 demodulation periods, got {0}")]
    TooFewPeriods(usize),
    #[error("trajectory too short for a {periods}-period window at omega = {omega}")]
    WindowTooLong { periods: usize, omega: f64 },
    #[error("an undamped coupled coordinate never settles; steady-state check not applicable")]
    NeverSettles,
}

/// Positions/charges, velocities/currents, and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub t: f64,
    pub q: [f64; 3],
    pub dq: [f64; 3],
}

impl OdeState {
    pub fn rest() -> Self {
        OdeState {
            t: 0.0,
            q: [0.0; 3],
            dq: [0.0; 3],
        }
    }

    fn is_finite(&self) -> bool {
        self.q.iter().chain(self.dq.iter()).all(|v| v.is_finite()) && self.t.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasorEstimate {
    /// complex amplitude B with x(t) = Re[B e^{-i omega t}]
    pub amplitude: Complex64,
    /// relative RMS misfit of the single-tone model over the window
    pub residual: f64,
}

impl PhasorEstimate {
    /// A residual above 1e-2 means the transient had not died out (or
    /// the signal is not a single tone).
    pub fn is_settled(&self) -> bool {
        self.residual <= 1e-2
    }
}

fn deriv(p: &ModalParams, drive_accel: f64, omega: f64, t: f64, q: &[f64; 3], dq: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let a1 = -p.gamma1 * dq[0] - p.omega1_sq * q[0]
        + p.omega_c_sq * q[1]
        + p.omega_r_sq * q[2]
        + drive_accel * (omega * t).cos();
    let a2 = -p.gamma2 * dq[1] - p.omega2_sq * q[1] + p.omega_c_sq * q[0];
    let a3 = -p.gamma3 * dq[2] - p.omega3_sq * q[2] + p.omega_r_sq * q[0];
    (*dq, [a1, a2, a3])
}

fn rk4_step(p: &ModalParams, drive_accel: f64, omega: f64, s: &OdeState, dt: f64) -> OdeState {
    let (k1q, k1v) = deriv(p, drive_accel, omega, s.t, &s.q, &s.dq);
    let mid = |q: &[f64; 3], kq: &[f64; 3], h: f64| {
        [q[0] + h * kq[0], q[1] + h * kq[1], q[2] + h * kq[2]]
    };
    let h2 = dt / 2.0;
    let (k2q, k2v) = deriv(
        p,
        drive_accel,
        omega,
        s.t + h2,
        &mid(&s.q, &k1q, h2),
        &mid(&s.dq, &k1v, h2),
    );
    let (k3q, k3v) = deriv(
        p,
        drive_accel,
        omega,
        s.t + h2,
        &mid(&s.q, &k2q, h2),
        &mid(&s.dq, &k2v, h2),
    );
    let (k4q, k4v) = deriv(
        p,
        drive_accel,
        omega,
        s.t + dt,
        &mid(&s.q, &k3q, dt),
        &mid(&s.dq, &k3v, dt),
    );
    let mut q = s.q;
    let mut dq = s.dq;
    for i in 0..3 {
        q[i] += dt / 6.0 * (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q[i]);
        dq[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
    }
    OdeState {
        t: s.t + dt,
        q,
        dq,
    }
}

fn check_step(p: &ModalParams, omega: f64, dt: f64) -> Result<(), TimeDomainError> {
    let w_max = p
        .omega1_sq
        .max(p.omega2_sq)
        .max(p.omega3_sq)
        .sqrt()
        .max(omega.abs());
    let max = 0.05 * std::f64::consts::TAU / w_max;
    if !(dt < max) {
        return Err(TimeDomainError::StepTooLarge { dt, max });
    }
    Ok(())
}

/// Integrate from rest at t = 0.
pub fn integrate(
    p: &ModalParams,
    drive_accel: f64,
    omega: f64,
    dt: f64,
    t_end: f64,
) -> Result<Vec<OdeState>, TimeDomainError> {
    integrate_from(OdeState::rest(), p, drive_accel, omega, dt, t_end)
}

pub fn integrate_from(
    start: OdeState,
    p: &ModalParams,
    drive_accel: f64,
    omega: f64,
    dt: f64,
    t_end: f64,
) -> Result<Vec<OdeState>, TimeDomainError> {
    p.validate()?;
    if !(dt > 0.0 && t_end > start.t && t_end.is_finite() && dt.is_finite()) {
        return Err(TimeDomainError::BadHorizon);
    }
    check_step(p, omega, dt)?;
    if !start.is_finite() {
        return Err(TimeDomainError::Diverged { t: start.t });
    }
    let steps = ((t_end - start.t) / dt).ceil() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = start;
    out.push(s);
    for k in 1..=steps {
        s = rk4_step(p, drive_accel, omega, &s, dt);
        // recompute time from the index so it does not drift
        s.t = start.t + k as f64 * dt;
        if !s.is_finite() {
            return Err(TimeDomainError::Diverged { t: s.t });
        }
        out.push(s);
    }
    Ok(out)
}

/// Time for the forced transient to decay below noise: 20 time
/// constants of the slowest damped coordinate that is actually coupled
/// to the drive. An exactly undamped coupled coordinate rings forever,
/// so there is no settling time to report.
pub fn transient_time(p: &ModalParams) -> Option<f64> {
    let mut gammas = vec![p.gamma1];
    if p.omega_c_sq > 0.0 {
        gammas.push(p.gamma2);
    }
    if p.omega_r_sq > 0.0 {
        gammas.push(p.gamma3);
    }
    if gammas.iter().any(|&g| g == 0.0) {
        return None;
    }
    Some(20.0 / gammas.into_iter().fold(f64::INFINITY, f64::min))
}

/// Quadrature demodulation of q1 over the final n_periods drive
/// periods. The window is trimmed to exactly n_periods * 2 pi / omega
/// by interpolating its left edge, which makes the oscillatory parts of
/// the inner products cancel over the whole window instead of leaving
/// an O(1/n) phase-dependent bias.
pub fn steady_phasor(
    traj: &[OdeState],
    omega: f64,
    n_periods: usize,
) -> Result<PhasorEstimate, TimeDomainError> {
    if n_periods < 4 {
        return Err(TimeDomainError::TooFewPeriods(n_periods));
    }
    let too_short = || TimeDomainError::WindowTooLong {
        periods: n_periods,
        omega,
    };
    if traj.len() < 2 || !(omega > 0.0) {
        return Err(too_short());
    }
    let t_last = traj[traj.len() - 1].t;
    let window = n_periods as f64 * std::f64::consts::TAU / omega;
    let t0 = t_last - window;
    if t0 < traj[0].t {
        return Err(too_short());
    }
    let i0 = traj.partition_point(|s| s.t < t0);

    // samples over [t0, t_last], left edge interpolated
    let mut ts: Vec<f64> = Vec::with_capacity(traj.len() - i0 + 1);
    let mut xs: Vec<f64> = Vec::with_capacity(traj.len() - i0 + 1);
    if i0 > 0 && traj[i0].t > t0 {
        let (a, b) = (&traj[i0 - 1], &traj[i0]);
        let f = (t0 - a.t) / (b.t - a.t);
        ts.push(t0);
        xs.push(a.q[0] + f * (b.q[0] - a.q[0]));
    }
    for s in &traj[i0..] {
        ts.push(s.t);
        xs.push(s.q[0]);
    }
    if ts.len() < 2 {
        return Err(too_short());
    }

    let trapezoid = |f: &dyn Fn(usize) -> f64| -> f64 {
        let mut acc = 0.0;
        for k in 0..ts.len() - 1 {
            acc += 0.5 * (f(k) + f(k + 1)) * (ts[k + 1] - ts[k]);
        }
        acc
    };
    let a = 2.0 / window * trapezoid(&|k| xs[k] * (omega * ts[k]).cos());
    let b = 2.0 / window * trapezoid(&|k| xs[k] * (omega * ts[k]).sin());

    let misfit = trapezoid(&|k| {
        let m = xs[k] - a * (omega * ts[k]).cos() - b * (omega * ts[k]).sin();
        m * m
    });
    let total = trapezoid(&|k| xs[k] * xs[k]);
    let residual = if total > 0.0 {
        (misfit.max(0.0) / total).sqrt()
    } else {
        0.0
    };
    Ok(PhasorEstimate {
        amplitude: Complex64::new(a, b),
        residual,
    })
}

/// Run the transient without storing it, then demodulate a settled
/// window. This is the cross-check entry point used against the
/// closed-form responses.
pub fn settled_phasor(
    p: &ModalParams,
    drive_accel: f64,
    omega: f64,
    dt: f64,
    n_periods: usize,
) -> Result<PhasorEstimate, TimeDomainError> {
    p.validate()?;
    if n_periods < 4 {
        return Err(TimeDomainError::TooFewPeriods(n_periods));
    }
    if !(dt > 0.0 && dt.is_finite() && omega > 0.0) {
        return Err(TimeDomainError::BadHorizon);
    }
    check_step(p, omega, dt)?;
    let settle = transient_time(p).ok_or(TimeDomainError::NeverSettles)?;
    let window = n_periods as f64 * std::f64::consts::TAU / omega;

    let pre_steps = (settle / dt).ceil() as usize;
    let mut s = OdeState::rest();
    for k in 1..=pre_steps {
        s = rk4_step(p, drive_accel, omega, &s, dt);
        s.t = k as f64 * dt;
        if !s.is_finite() {
            return Err(TimeDomainError::Diverged { t: s.t });
        }
    }
    let keep_steps = (window / dt).ceil() as usize + 1;
    let mut tail = Vec::with_capacity(keep_steps + 1);
    tail.push(s);
    for k in 1..=keep_steps {
        s = rk4_step(p, drive_accel, omega, &s, dt);
        s.t = (pre_steps + k) as f64 * dt;
        if !s.is_finite() {
            return Err(TimeDomainError::Diverged { t: s.t });
        }
        tail.push(s);
    }
    steady_phasor(&tail, omega, n_periods)
}

pub fn trajectory_csv(traj: &[OdeState]) -> String {
    let mut out = String::from("t,q1,q2,q3,dq1,dq2,dq3\n");
    for s in traj {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.t, s.q[0], s.q[1], s.q[2], s.dq[0], s.dq[1], s.dq[2]
        ));
    }
    out
}
