//! Fixed-step RK4 with state-dependent policies.
//!
//! Private treatment probabilities are continuous in the state and are
//! re-evaluated at every stage. The public rule is bang-bang: treat an
//! assessed state iff `g = Δ'_m (k + l) - c >= 0`. Each assessed state is
//! integrated in a mode (`On`, `Off`, or `Slide` along `g = 0`); when a
//! step ends in a state inconsistent with the current modes the crossing is
//! located by bisection, the step is split there and the modes updated.
//! In `Slide` the public probability takes the value that keeps `g`
//! stationary, which is the limit of the on/off chattering a frozen rule
//! would produce.

use log::debug;
use serde::{Deserialize, Serialize};

use super::{
    assessed_to_true, derivatives, effects_at_prevalence, private_policy, welfare_flows, AssessedPolicy, EpidemicError,
    ForestState, ModelInputs, PrivateArm, PublicArm, ScenarioSpec, TrajectoryRecord, TrueStatePolicy, COMPARTMENTS,
};
use crate::domain::{Prevalence, Validate};
use crate::game::TreatmentEffect;
use crate::scalar::{lit, Scalar};

const MAX_EVENTS_PER_STEP: usize = 16;
const BISECTION_ITERS: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationOptions<T> {
    pub dt: T,
    pub horizon: T,
    /// Spacing of emitted records.
    pub output_interval: T,
}

impl<T: Scalar> SimulationOptions<T> {
    pub fn new(dt: T, horizon: T) -> Self {
        SimulationOptions {
            dt,
            horizon,
            output_interval: lit(0.25),
        }
    }

    fn check(&self) -> Result<(), EpidemicError> {
        let bad = |what: &str, v: T| EpidemicError::InvalidOption(format!("{what} = {v}"));
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(bad("dt must be positive and finite, got dt", self.dt));
        }
        if !(self.horizon >= T::zero() && self.horizon.is_finite()) {
            return Err(bad("horizon must be nonnegative and finite, got horizon", self.horizon));
        }
        if !(self.output_interval > T::zero() && self.output_interval.is_finite()) {
            return Err(bad(
                "output interval must be positive, got output_interval",
                self.output_interval,
            ));
        }
        Ok(())
    }
}

impl Default for SimulationOptions<f64> {
    fn default() -> Self {
        SimulationOptions::new(1.0 / 64.0, 50.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Off,
    On,
    Slide,
}

type State<T> = [T; 6];

fn pooled<T: Scalar>(x: &State<T>) -> [T; 3] {
    [x[0] + x[3], x[1] + x[4], x[2] + x[5]]
}

fn axpy<T: Scalar, const N: usize>(x: &[T; N], h: T, v: &[T; N]) -> [T; N] {
    std::array::from_fn(|i| x[i] + h * v[i])
}

/// Gaussian elimination with partial pivoting on an `n x n` leading block.
#[allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
fn solve_small<T: Scalar>(mut a: [[T; 3]; 3], mut b: [T; 3], n: usize) -> Option<[T; 3]> {
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        // also rejects a NaN pivot
        if !(a[pivot][col].abs() > T::epsilon()) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[row][c] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Right-hand side for one pair of arms.
struct Field<'a, T> {
    inputs: &'a ModelInputs<T>,
    private: PrivateArm,
    public: PublicArm,
    /// Start of the current step, for error reports.
    t: T,
}

impl<'a, T: Scalar> Field<'a, T> {
    fn effects(&self, w: [T; 3]) -> Result<[TreatmentEffect<T>; 3], EpidemicError> {
        Ok(effects_at_prevalence(&Prevalence::normalized(w), self.inputs)?)
    }

    fn switching(&self, w: [T; 3]) -> Result<[T; 3], EpidemicError> {
        let econ = &self.inputs.econ;
        Ok(self.effects(w)?.map(|e| econ.delta_m_prime * e.total() - econ.cost_c))
    }

    fn private_true(&self, x: &State<T>) -> Result<TrueStatePolicy<T>, EpidemicError> {
        if self.private == PrivateArm::NoPrivateTreatment {
            return Ok(TrueStatePolicy::zero());
        }
        let (p, _) = private_policy(&self.effects(pooled(x))?, &self.inputs.econ, self.private);
        Ok(assessed_to_true(&p, &self.inputs.matrix))
    }

    fn rates(&self, x: &State<T>, public: [T; 3], private: &TrueStatePolicy<T>) -> State<T> {
        let pm = assessed_to_true(&AssessedPolicy(public), &self.inputs.matrix);
        derivatives(&ForestState::from_array(*x), &self.inputs.epidemic, &pm, private)
    }

    /// Rate of change of the switching functions along the flow.
    fn switching_rate(
        &self,
        x: &State<T>,
        public: [T; 3],
        private: &TrueStatePolicy<T>,
    ) -> Result<[T; 3], EpidemicError> {
        let v = pooled(&self.rates(x, public, private));
        let w = pooled(x);
        let h = T::epsilon().cbrt();
        let up = self.switching(axpy(&w, h, &v))?;
        let down = self.switching(axpy(&w, -h, &v))?;
        Ok(std::array::from_fn(|j| (up[j] - down[j]) / (h + h)))
    }

    /// Public treatment probabilities in the given modes. Sliding entries
    /// solve `dg_j/dt = 0`, which is affine in them.
    fn public_probs(
        &self,
        x: &State<T>,
        modes: &[Mode; 3],
        private: &TrueStatePolicy<T>,
    ) -> Result<[T; 3], EpidemicError> {
        let mut p = modes.map(|m| if m == Mode::On { T::one() } else { T::zero() });
        let sliding: Vec<usize> = (0..3).filter(|&j| modes[j] == Mode::Slide).collect();
        if sliding.is_empty() {
            return Ok(p);
        }
        let base = self.switching_rate(x, p, private)?;
        let mut a = [[T::zero(); 3]; 3];
        for (col, &j) in sliding.iter().enumerate() {
            let mut q = p;
            q[j] = T::one();
            let with = self.switching_rate(x, q, private)?;
            for (row, &i) in sliding.iter().enumerate() {
                a[row][col] = with[i] - base[i];
            }
        }
        let mut rhs = [T::zero(); 3];
        for (row, &i) in sliding.iter().enumerate() {
            rhs[row] = -base[i];
        }
        match solve_small(a, rhs, sliding.len()) {
            Some(sol) => {
                for (col, &j) in sliding.iter().enumerate() {
                    p[j] = sol[col];
                }
            }
            None => {
                let g = self.switching(pooled(x))?;
                for &j in &sliding {
                    p[j] = if g[j] >= T::zero() { T::one() } else { T::zero() };
                }
            }
        }
        Ok(p)
    }

    fn public_at(
        &self,
        x: &State<T>,
        modes: Option<&[Mode; 3]>,
        private: &TrueStatePolicy<T>,
    ) -> Result<[T; 3], EpidemicError> {
        match modes {
            Some(m) => self.public_probs(x, m, private),
            None => Ok([T::zero(); 3]),
        }
    }

    fn check_bounds(&self, x: &State<T>, h: T) -> Result<(), EpidemicError> {
        let tol = lit::<T>(T::STATE_TOL);
        for (name, &v) in COMPARTMENTS.iter().zip(x) {
            if !(v >= -tol && v <= T::one() + tol) {
                return Err(EpidemicError::StepTooLarge {
                    time: self.t.to_f64_lossy(),
                    dt: h.to_f64_lossy(),
                    compartment: name,
                    value: v.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    fn eval(&self, y: &State<T>, modes: Option<&[Mode; 3]>, h: T) -> Result<State<T>, EpidemicError> {
        self.check_bounds(y, h)?;
        let private = self.private_true(y)?;
        let public = self.public_at(y, modes, &private)?;
        Ok(self.rates(y, public, &private))
    }

    fn rk4(&self, x: &State<T>, modes: Option<&[Mode; 3]>, h: T) -> Result<State<T>, EpidemicError> {
        let half = h * lit(0.5);
        let k1 = self.eval(x, modes, h)?;
        let k2 = self.eval(&axpy(x, half, &k1), modes, h)?;
        let k3 = self.eval(&axpy(x, half, &k2), modes, h)?;
        let k4 = self.eval(&axpy(x, h, &k3), modes, h)?;
        let sixth = h / lit(6.0);
        let two = lit::<T>(2.0);
        let y = std::array::from_fn(|i| x[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]));
        self.check_bounds(&y, h)?;
        Ok(y)
    }

    fn initial_modes(&self, x: &State<T>) -> Result<[Mode; 3], EpidemicError> {
        Ok(self
            .switching(pooled(x))?
            .map(|g| if g >= T::zero() { Mode::On } else { Mode::Off }))
    }

    fn consistent(&self, x: &State<T>, modes: &[Mode; 3]) -> Result<bool, EpidemicError> {
        if pooled(x)[1] <= T::zero() {
            return Ok(true);
        }
        let g = self.switching(pooled(x))?;
        for j in 0..3 {
            match modes[j] {
                Mode::On if g[j] < T::zero() => return Ok(false),
                Mode::Off if g[j] > T::zero() => return Ok(false),
                _ => {}
            }
        }
        if modes.contains(&Mode::Slide) {
            let private = self.private_true(x)?;
            let p = self.public_probs(x, modes, &private)?;
            for j in 0..3 {
                if modes[j] == Mode::Slide && !(p[j] >= T::zero() && p[j] <= T::one()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn transition(&self, x: &State<T>, modes: &[Mode; 3]) -> Result<[Mode; 3], EpidemicError> {
        let g = self.switching(pooled(x))?;
        let private = self.private_true(x)?;
        let p = self.public_probs(x, modes, &private)?;
        let mut next = *modes;
        for j in 0..3 {
            match modes[j] {
                Mode::Slide if p[j] > T::one() => next[j] = Mode::On,
                Mode::Slide if p[j] < T::zero() => next[j] = Mode::Off,
                Mode::On if g[j] < T::zero() => next[j] = self.crossing_mode(x, p, j, g[j], &private)?,
                Mode::Off if g[j] > T::zero() => next[j] = self.crossing_mode(x, p, j, g[j], &private)?,
                _ => {}
            }
        }
        Ok(next)
    }

    /// Mode entered when `g_j` crosses zero: slide if both sides of the
    /// surface push towards it, otherwise follow the sign of `g_j`.
    fn crossing_mode(
        &self,
        x: &State<T>,
        p: [T; 3],
        j: usize,
        g: T,
        private: &TrueStatePolicy<T>,
    ) -> Result<Mode, EpidemicError> {
        let mut base = p.map(|v| v.max(T::zero()).min(T::one()));
        base[j] = T::zero();
        let g_off = self.switching_rate(x, base, private)?[j];
        base[j] = T::one();
        let g_on = self.switching_rate(x, base, private)?[j];
        Ok(if g_on < T::zero() && T::zero() < g_off {
            Mode::Slide
        } else if g > T::zero() {
            Mode::On
        } else {
            Mode::Off
        })
    }

    /// One step of length `h`, split at mode changes.
    fn advance(&self, x: &State<T>, modes: &mut Option<[Mode; 3]>, h: T) -> Result<State<T>, EpidemicError> {
        let Some(m) = modes.as_mut() else {
            return self.rk4(x, None, h);
        };
        let mut x = *x;
        let mut remaining = h;
        let mut events = 0;
        while remaining > T::zero() {
            let y = self.rk4(&x, Some(m), remaining)?;
            if events >= MAX_EVENTS_PER_STEP || self.consistent(&y, m)? {
                return Ok(y);
            }
            let (mut lo, mut hi) = (T::zero(), T::one());
            for _ in 0..BISECTION_ITERS {
                let mid = (lo + hi) * lit(0.5);
                if self.consistent(&self.rk4(&x, Some(m), mid * remaining)?, m)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let taken = hi * remaining;
            x = self.rk4(&x, Some(m), taken)?;
            remaining -= taken;
            *m = self.transition(&x, m)?;
            events += 1;
        }
        Ok(x)
    }

    fn record(&self, t: T, x: &State<T>, modes: Option<&[Mode; 3]>) -> Result<TrajectoryRecord<T>, EpidemicError> {
        let effects = self.effects(pooled(x))?;
        let (private, subsidies) = private_policy(&effects, &self.inputs.econ, self.private);
        let true_o = assessed_to_true(&private, &self.inputs.matrix);
        let public = AssessedPolicy(
            self.public_at(x, modes, &true_o)?
                .map(|p| p.max(T::zero()).min(T::one())),
        );
        let true_m = assessed_to_true(&public, &self.inputs.matrix);
        let state = ForestState::from_array(*x);
        let rates = derivatives(&state, &self.inputs.epidemic, &true_m, &true_o);
        let welfare = match self.inputs.econ.decomposition {
            Some(_) => Some(welfare_flows(
                &state,
                &rates,
                &public,
                &private,
                &subsidies,
                self.inputs,
            )?),
            None => None,
        };
        Ok(TrajectoryRecord {
            time: t,
            state,
            policy_m: true_m,
            policy_o: true_o,
            subsidies,
            welfare,
        })
    }
}

#[derive(Clone, Copy)]
struct Stop<T> {
    t: T,
    output: bool,
}

/// Step boundaries plus the switch time. Records are emitted every
/// `round(output_interval / dt)` steps (at least every step) and at the
/// horizon.
fn schedule<T: Scalar>(opts: &SimulationOptions<T>, switch: Option<T>) -> Vec<Stop<T>> {
    let fudge = lit::<T>(1e-9);
    let steps = ((opts.horizon / opts.dt) - fudge)
        .ceil()
        .max(T::zero())
        .to_usize()
        .unwrap_or(0);
    let every = (opts.output_interval / opts.dt).round().to_usize().unwrap_or(1).max(1);
    let mut stops: Vec<Stop<T>> = (0..=steps)
        .map(|k| Stop {
            t: (T::from_usize(k).unwrap() * opts.dt).min(opts.horizon),
            output: k % every == 0 || k == steps,
        })
        .collect();
    if let Some(ts) = switch {
        let tol = fudge * opts.dt;
        let on_grid = stops.iter().any(|s| (s.t - ts).abs() <= tol);
        if ts > T::zero() && ts < opts.horizon && !on_grid {
            let at = stops.partition_point(|s| s.t < ts);
            stops.insert(at, Stop { t: ts, output: false });
        }
    }
    stops
}

/// Integrates the model from `initial`, returning one record per output
/// interval (including `t = 0`).
pub fn simulate<T: Scalar>(
    initial: &ForestState<T>,
    inputs: &ModelInputs<T>,
    scenario: &ScenarioSpec<T>,
    opts: &SimulationOptions<T>,
) -> Result<Vec<TrajectoryRecord<T>>, EpidemicError> {
    opts.check()?;
    let initial = initial.validate().map_err(EpidemicError::InvalidState)?;
    let stops = schedule(opts, scenario.switch_time);

    let mut x = initial.as_array();
    let (private, public) = scenario.arms_at(T::zero());
    let mut field = Field {
        inputs,
        private,
        public,
        t: T::zero(),
    };
    let mut modes = match public {
        PublicArm::OptimalPublic => Some(field.initial_modes(&x)?),
        PublicArm::NoPublicTreatment => None,
    };
    let mut records = vec![field.record(T::zero(), &x, modes.as_ref())?];

    for pair in stops.windows(2) {
        let (t0, t1) = (pair[0].t, pair[1].t);
        let arms = scenario.arms_at(t0);
        if arms != (field.private, field.public) {
            field.private = arms.0;
            field.public = arms.1;
            modes = match arms.1 {
                PublicArm::OptimalPublic => Some(field.initial_modes(&x)?),
                PublicArm::NoPublicTreatment => None,
            };
        }
        field.t = t0;
        x = field.advance(&x, &mut modes, t1 - t0)?;

        let total: T = x.iter().copied().sum();
        if (total - T::one()).abs() > lit(T::DRIFT_TOL) {
            debug!("t = {t1}: population drifted to {total}, renormalizing");
            x = x.map(|v| v / total);
        }
        if pair[1].output {
            records.push(field.record(t1, &x, modes.as_ref())?);
        }
    }
    Ok(records)
}
