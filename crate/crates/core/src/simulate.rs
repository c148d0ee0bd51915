//! Fixed-step integration of the composed grid and plant system.
//!
//! One scenario advances on one thread in a fixed evaluation order, so a
//! `(Scenario, SimConfig)` pair always produces the same bits. Discontinuous
//! inputs (contingency steps, held noise, sampled AGC error) only change at
//! step boundaries; deadbands and limiters are evaluated inside the
//! derivative function.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::grid::{
    governor_derivatives, swing_rate, tie_line_derivative, GovernorParams, GovernorState,
};
use crate::blocks::FirstOrderState;
use crate::pv_control::{agc_ctrl_eval, area_control_error, AgcParams, AgcState, PlantController, PvPlant};
use crate::scenario_io::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_end: 60.0,
            record_every: 1,
            rng_seed: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, path: &str) -> Result<()> {
        check::positive(&format!("{path}.dt"), self.dt)?;
        check::finite(&format!("{path}.t_end"), self.t_end)?;
        if self.t_end <= self.dt {
            return Err(Error::invalid(
                format!("{path}.t_end"),
                format!("must exceed dt = {}, got {}", self.dt, self.t_end),
            ));
        }
        if self.record_every == 0 {
            return Err(Error::invalid(format!("{path}.record_every"), "must be >= 1"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Classical fourth-order Runge-Kutta step, in place.
///
/// `f(t, y, dy)` writes the derivative of `y` into `dy`.
pub fn rk4_step<F>(y: &mut [f64], t: f64, dt: f64, f: F)
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    Rk4::new(y.len()).step(y, t, dt, f);
}

/// Preallocated RK4 stages.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        Self {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }

    pub fn step<F>(&mut self, y: &mut [f64], t: f64, dt: f64, mut f: F)
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = y.len();
        debug_assert_eq!(n, self.k1.len());
        let half = 0.5 * dt;

        f(t, y, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = y[i] + half * self.k1[i];
        }
        f(t + half, &self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = y[i] + half * self.k2[i];
        }
        f(t + half, &self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = y[i] + dt * self.k3[i];
        }
        f(t + dt, &self.tmp, &mut self.k4);
        for i in 0..n {
            y[i] += dt / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Seeded noise stream for one plant: stream index = plant index.
pub fn noise_stream(seed: u64, plant_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(plant_index as u64);
    rng
}

/// Measured deviation: truth plus the plant's constant offset and Gaussian noise.
pub fn inject_noise(df_true: f64, plant: &PvPlant, rng: &mut ChaCha8Rng) -> f64 {
    df_true + plant.meas_bias_pu + draw_noise(plant.meas_noise_sigma, rng)
}

fn draw_noise(sigma: f64, rng: &mut ChaCha8Rng) -> f64 {
    if sigma > 0.0 {
        // sigma is validated finite and positive here
        Normal::new(0.0, sigma).expect("valid sigma").sample(rng)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSnap {
    pub requested_s: f64,
    pub snapped_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub f_nominal_hz: f64,
    pub c_system_mva: f64,
    pub ufls_hz: f64,
    pub h_eff_s: f64,
    pub damping: f64,
    pub dt: f64,
    pub steps: usize,
    pub event_snaps: Vec<EventSnap>,
    /// Net area-A contingency in MW (negative is generation loss).
    pub event_mw: f64,
    /// `(floor, ceiling)` of each plant's total output, pu on its own base.
    pub plant_bounds: Vec<(f64, f64)>,
}

impl RunMeta {
    pub fn first_event_s(&self) -> Option<f64> {
        self.event_snaps
            .iter()
            .map(|e| e.snapped_s)
            .min_by(|a, b| a.total_cmp(b))
    }
}

/// Uniformly sampled run output. Frequency and governor series are for area A.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimResult {
    pub scenario_id: String,
    pub t: Vec<f64>,
    pub f_hz: Vec<f64>,
    pub plant_ids: Vec<String>,
    /// Total output of each plant, pu on its own base.
    pub p_plant: Vec<Vec<f64>>,
    /// Mechanical power deviation of the synchronous fleet, pu system.
    pub p_gov: Vec<f64>,
    /// AGC command, pu system.
    pub p_agc: Vec<f64>,
    /// Net PV increment of area A, pu system.
    pub p_pv: Vec<f64>,
    /// Active contingency power of area A, pu system.
    pub p_event: Vec<f64>,
    /// Frequency derivative of area A, pu/s.
    pub dfdt: Vec<f64>,
    pub f_hz_b: Option<Vec<f64>>,
    pub p_tie: Option<Vec<f64>>,
    pub ufls_crossed: bool,
    pub meta: RunMeta,
}

impl SimResult {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn plant_series(&self, id: &str) -> Option<&[f64]> {
        self.plant_ids
            .iter()
            .position(|p| p == id)
            .map(|i| self.p_plant[i].as_slice())
    }
}

struct AreaModel {
    h_eff: f64,
    damping: f64,
    f_n: f64,
    /// Multiplier converting tie power (area-A base) to this area's base.
    tie_scale: f64,
    gov: GovernorParams,
    at: usize,
}

struct PlantModel {
    ctrl: PlantController,
    area: usize,
    to_system: f64,
    /// Share of the AGC command in pu of this plant's own base per pu system of AGC.
    agc_gain: f64,
    bias: f64,
    lag: Option<(usize, f64)>,
    at: usize,
}

struct AgcModel {
    params: AgcParams,
    limit: f64,
    at: usize,
}

struct Model {
    areas: Vec<AreaModel>,
    plants: Vec<PlantModel>,
    tie: Option<(crate::grid::TieLine, usize)>,
    agc: Option<AgcModel>,
    names: Vec<String>,
    n: usize,
}

/// Inputs held constant over one step.
struct StepInputs {
    p_event: Vec<f64>,
    noise: Vec<f64>,
    ace_hold: Option<f64>,
}

#[derive(Default)]
struct Aux {
    p_mech: Vec<f64>,
    p_pv: Vec<f64>,
    dfdt: Vec<f64>,
    plant_cmd: Vec<f64>,
    p_agc: f64,
}

impl Model {
    fn build(s: &Scenario) -> Result<Model> {
        let mut names = Vec::new();
        let mut n = 0;
        let mut grids = vec![&s.grid];
        if let Some(b) = &s.area_b {
            grids.push(b);
        }
        let c_a = s.grid.c_system_mva;
        let mut areas = Vec::new();
        for (i, g) in grids.iter().enumerate() {
            let tag = if i == 0 { "a" } else { "b" };
            names.extend([
                format!("area_{tag}.df"),
                format!("area_{tag}.governor.valve"),
                format!("area_{tag}.governor.reheat"),
            ]);
            areas.push(AreaModel {
                h_eff: crate::grid::effective_inertia(g)?,
                damping: g.damping,
                f_n: g.f_nominal_hz,
                tie_scale: c_a / g.c_system_mva,
                gov: g.effective_governor(),
                at: n,
            });
            n += 3;
        }
        let tie = match (&s.tie, s.area_b.is_some()) {
            (Some(t), true) => {
                names.push("tie.dp".into());
                n += 1;
                Some((t.clone(), n - 1))
            }
            _ => None,
        };

        let agc_limit: f64 = s
            .plants
            .iter()
            .filter(|p| p.area == 0)
            .map(|p| p.headroom_mw())
            .sum::<f64>()
            / c_a;

        let mut plants = Vec::new();
        for p in &s.plants {
            let ctrl = PlantController::new(p);
            let at = n;
            for nm in ctrl.state_names() {
                names.push(format!("plant[{}].{nm}", p.id));
            }
            n += ctrl.n_states();
            let lag = if p.meas_lag_s > 0.0 {
                names.push(format!("plant[{}].meas_lag", p.id));
                n += 1;
                Some((n - 1, p.meas_lag_s))
            } else {
                None
            };
            let c_sys = grids[p.area].c_system_mva;
            let agc_gain = if p.area == 0 && agc_limit > 0.0 {
                p.p_headroom / agc_limit
            } else {
                0.0
            };
            plants.push(PlantModel {
                ctrl,
                area: p.area,
                to_system: p.c_inv_mva / c_sys,
                agc_gain,
                bias: p.meas_bias_pu,
                lag,
                at,
            });
        }

        let agc = s.agc.as_ref().map(|params| {
            names.push("agc.integral".into());
            n += 1;
            AgcModel {
                params: params.clone(),
                limit: agc_limit,
                at: n - 1,
            }
        });

        Ok(Model {
            areas,
            plants,
            tie,
            agc,
            names,
            n,
        })
    }

    /// Pre-event equilibrium at flat frequency.
    fn initial_state(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for p in &self.plants {
            let slice = &mut y[p.at..p.at + p.ctrl.n_states()];
            p.ctrl.init(p.bias, slice);
        }
        y
    }

    fn ace(&self, y: &[f64], params: &AgcParams) -> f64 {
        let dp_tie = self.tie.as_ref().map_or(0.0, |(_, at)| y[*at]);
        area_control_error(y[self.areas[0].at], dp_tie, params.bias_b)
    }

    fn eval(&self, t: f64, y: &[f64], inp: &StepInputs, dy: &mut [f64], mut aux: Option<&mut Aux>) {
        let n_areas = self.areas.len();
        let mut p_mech = [0.0; 2];
        let mut p_pv = [0.0; 2];

        for (a, area) in self.areas.iter().enumerate() {
            let st = GovernorState {
                valve: FirstOrderState { x: y[area.at + 1] },
                reheat: FirstOrderState { x: y[area.at + 2] },
            };
            let g = governor_derivatives(&st, y[area.at], &area.gov, area.f_n);
            dy[area.at + 1] = g.d_valve;
            dy[area.at + 2] = g.d_reheat;
            p_mech[a] = g.p_mech;
        }

        let mut p_agc = 0.0;
        if let Some(agc) = &self.agc {
            let ace = inp.ace_hold.unwrap_or_else(|| self.ace(y, &agc.params));
            let state = AgcState {
                pi: crate::blocks::PiState {
                    integral: y[agc.at],
                    frozen: false,
                },
            };
            let (d, p) = agc_ctrl_eval(&state, ace, &agc.params, agc.limit, t);
            dy[agc.at] = d;
            p_agc = p;
        }

        for (i, p) in self.plants.iter().enumerate() {
            let df_area = y[self.areas[p.area].at];
            let df_seen = match p.lag {
                Some((at, tau)) => {
                    dy[at] = (df_area - y[at]) / tau;
                    y[at]
                }
                None => df_area,
            };
            let df_meas = df_seen + p.bias + inp.noise[i];
            let k = p.ctrl.n_states();
            let out = p.ctrl.eval(
                &y[p.at..p.at + k],
                &mut dy[p.at..p.at + k],
                df_meas,
                p_agc * p.agc_gain,
            );
            p_pv[p.area] += out.p_cmd * p.to_system;
            if let Some(a) = aux.as_deref_mut() {
                a.plant_cmd[i] = out.p_cmd;
            }
        }

        let dp_tie = match &self.tie {
            Some((tie, at)) => {
                let df_a = y[self.areas[0].at];
                let df_b = y[self.areas[1].at];
                dy[*at] = tie_line_derivative(y[*at], df_a, df_b, tie);
                y[*at]
            }
            None => 0.0,
        };

        for (a, area) in self.areas.iter().enumerate() {
            let tie_in = if a == 0 { -dp_tie } else { dp_tie * area.tie_scale };
            let net = p_mech[a] + p_pv[a] + inp.p_event[a] + tie_in;
            dy[area.at] = swing_rate(y[area.at], net, area.damping, area.h_eff);
        }

        if let Some(a) = aux {
            a.p_mech[..n_areas].copy_from_slice(&p_mech[..n_areas]);
            a.p_pv[..n_areas].copy_from_slice(&p_pv[..n_areas]);
            for (k, area) in self.areas.iter().enumerate() {
                a.dfdt[k] = dy[area.at];
            }
            a.p_agc = p_agc;
        }
    }
}

/// Run one scenario with the given integration settings.
///
/// Contingency times are snapped to the nearest step boundary; the snap is
/// reported in [`RunMeta::event_snaps`].
pub fn run_scenario(scenario: &Scenario, cfg: &SimConfig) -> Result<SimResult> {
    scenario.validate()?;
    cfg.validate("sim")?;
    let model = Model::build(scenario)?;
    let dt = cfg.dt;
    let n_steps = cfg.n_steps();
    let n_areas = model.areas.len();

    let mut events: Vec<(usize, usize, f64)> = scenario
        .events
        .iter()
        .map(|e| ((e.t_event / dt).round() as usize, e.area, e.delta_p))
        .collect();
    events.sort_by_key(|e| e.0);
    let snaps = scenario
        .events
        .iter()
        .map(|e| EventSnap {
            requested_s: e.t_event,
            snapped_s: (e.t_event / dt).round() * dt,
        })
        .collect();

    let mut rngs: Vec<ChaCha8Rng> = (0..scenario.plants.len())
        .map(|i| noise_stream(cfg.rng_seed, i))
        .collect();
    let sigmas: Vec<f64> = scenario.plants.iter().map(|p| p.meas_noise_sigma).collect();

    let agc_cycle_steps = model.agc.as_ref().and_then(|a| {
        (a.params.cycle_s > 0.0).then(|| ((a.params.cycle_s / dt).round() as usize).max(1))
    });
    let agc_enable_step = model
        .agc
        .as_ref()
        .map_or(0, |a| (a.params.t_enable_s / dt).round() as usize);

    let mut y = model.initial_state();
    let mut rk = Rk4::new(model.n);
    let mut inp = StepInputs {
        p_event: vec![0.0; n_areas],
        noise: vec![0.0; scenario.plants.len()],
        ace_hold: None,
    };
    let mut aux = Aux {
        p_mech: vec![0.0; n_areas],
        p_pv: vec![0.0; n_areas],
        dfdt: vec![0.0; n_areas],
        plant_cmd: vec![0.0; scenario.plants.len()],
        p_agc: 0.0,
    };
    let mut scratch = vec![0.0; model.n];

    let cap = n_steps / cfg.record_every + 1;
    let mut out = SimResult {
        scenario_id: scenario.id.clone(),
        plant_ids: scenario.plants.iter().map(|p| p.id.clone()).collect(),
        p_plant: vec![Vec::with_capacity(cap); scenario.plants.len()],
        f_hz_b: scenario.area_b.as_ref().map(|_| Vec::with_capacity(cap)),
        p_tie: model.tie.as_ref().map(|_| Vec::with_capacity(cap)),
        meta: RunMeta {
            f_nominal_hz: scenario.grid.f_nominal_hz,
            c_system_mva: scenario.grid.c_system_mva,
            ufls_hz: scenario.grid.ufls_hz,
            h_eff_s: model.areas[0].h_eff,
            damping: scenario.grid.damping,
            dt,
            steps: n_steps,
            event_snaps: snaps,
            event_mw: scenario
                .events
                .iter()
                .filter(|e| e.area == 0)
                .map(|e| e.delta_p)
                .sum::<f64>()
                * scenario.grid.c_system_mva,
            plant_bounds: scenario
                .plants
                .iter()
                .map(|p| (0.0, p.p_base + p.p_headroom))
                .collect(),
        },
        ..SimResult::default()
    };

    let mut next_event = 0;
    for k in 0..=n_steps {
        let t = k as f64 * dt;
        while next_event < events.len() && events[next_event].0 <= k {
            let (_, area, dp) = events[next_event];
            inp.p_event[area] += dp;
            next_event += 1;
        }
        for (i, rng) in rngs.iter_mut().enumerate() {
            inp.noise[i] = draw_noise(sigmas[i], rng);
        }
        if let (Some(cycle), Some(agc)) = (agc_cycle_steps, &model.agc) {
            if k >= agc_enable_step && (k - agc_enable_step) % cycle == 0 {
                inp.ace_hold = Some(model.ace(&y, &agc.params));
            } else if k < agc_enable_step {
                inp.ace_hold = Some(0.0);
            }
        }

        if k % cfg.record_every == 0 {
            model.eval(t, &y, &inp, &mut scratch, Some(&mut aux));
            record(&mut out, &model, scenario, &y, &aux, &inp, t);
        }
        if k == n_steps {
            break;
        }

        rk.step(&mut y, t, dt, |ts, ys, dys| model.eval(ts, ys, &inp, dys, None));
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                variable: model.names[i].clone(),
                t: t + dt,
            });
        }
    }
    Ok(out)
}

fn record(out: &mut SimResult, model: &Model, s: &Scenario, y: &[f64], aux: &Aux, inp: &StepInputs, t: f64) {
    let area = &model.areas[0];
    let f = s.grid.f_nominal_hz * (1.0 + y[area.at]);
    out.t.push(t);
    out.f_hz.push(f);
    if f < s.grid.ufls_hz {
        out.ufls_crossed = true;
    }
    for (i, p) in s.plants.iter().enumerate() {
        out.p_plant[i].push(p.p_base + aux.plant_cmd[i]);
    }
    out.p_gov.push(aux.p_mech[0]);
    out.p_agc.push(aux.p_agc);
    out.p_pv.push(aux.p_pv[0]);
    out.p_event.push(inp.p_event[0]);
    out.dfdt.push(aux.dfdt[0]);
    if let (Some(fb), Some(b)) = (out.f_hz_b.as_mut(), s.area_b.as_ref()) {
        fb.push(b.f_nominal_hz * (1.0 + y[model.areas[1].at]));
    }
    if let (Some(pt), Some((_, at))) = (out.p_tie.as_mut(), model.tie.as_ref()) {
        pt.push(y[*at]);
    }
}

/// Drive one plant with a prescribed frequency deviation `df(t)` (pu) and
/// record its response. The grid is not simulated; `f_hz` records the input.
pub fn run_open_loop<F>(plant: &PvPlant, df: F, f_n: f64, cfg: &SimConfig) -> Result<SimResult>
where
    F: Fn(f64) -> f64,
{
    plant.validate("plant")?;
    cfg.validate("sim")?;
    let ctrl = PlantController::new(plant);
    let n = ctrl.n_states();
    let dt = cfg.dt;
    let n_steps = cfg.n_steps();
    let mut rng = noise_stream(cfg.rng_seed, 0);

    let mut y = vec![0.0; n];
    ctrl.init(df(0.0) + plant.meas_bias_pu, &mut y);
    let mut rk = Rk4::new(n);
    let mut scratch = vec![0.0; n];
    let mut out = SimResult {
        scenario_id: format!("open-loop:{}", plant.id),
        plant_ids: vec![plant.id.clone()],
        p_plant: vec![Vec::new()],
        meta: RunMeta {
            f_nominal_hz: f_n,
            dt,
            steps: n_steps,
            plant_bounds: vec![(0.0, plant.p_base + plant.p_headroom)],
            ..RunMeta::default()
        },
        ..SimResult::default()
    };

    for k in 0..=n_steps {
        let t = k as f64 * dt;
        let noise = plant.meas_bias_pu + draw_noise(plant.meas_noise_sigma, &mut rng);
        if k % cfg.record_every == 0 {
            let o = ctrl.eval(&y, &mut scratch, df(t) + noise, 0.0);
            out.t.push(t);
            out.f_hz.push(f_n * (1.0 + df(t)));
            out.p_plant[0].push(plant.p_base + o.p_cmd);
        }
        if k == n_steps {
            break;
        }
        rk.step(&mut y, t, dt, |ts, ys, dys| {
            ctrl.eval(ys, dys, df(ts) + noise, 0.0);
        });
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                variable: format!("plant[{}].{}", plant.id, ctrl.state_names()[i]),
                t: t + dt,
            });
        }
    }
    Ok(out)
}

/// Run independent scenarios, in parallel when the `parallel` feature is on.
/// Results keep the input order.
pub fn run_many(scenarios: &[Scenario], jobs: Option<usize>) -> Vec<Result<SimResult>> {
    crate::parallel::map(scenarios, jobs, |s| run_scenario(s, &s.sim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn exp_decay_error(dt: f64) -> f64 {
        let mut y = [1.0];
        let n = (1.0 / dt).round() as usize;
        let mut rk = Rk4::new(1);
        for k in 0..n {
            rk.step(&mut y, k as f64 * dt, dt, |_, s, d| d[0] = -s[0]);
        }
        (y[0] - (-1.0f64).exp()).abs()
    }

    #[test]
    fn rk4_zero_derivative_is_identity() {
        let mut y = [1.5, -2.0, 0.25];
        rk4_step(&mut y, 0.0, 0.1, |_, _, d| d.fill(0.0));
        assert_eq!(y, [1.5, -2.0, 0.25]);
    }

    #[test]
    fn rk4_exponential_accuracy() {
        assert!(exp_decay_error(0.01) < 1e-9);
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        let ratio = exp_decay_error(0.1) / exp_decay_error(0.05);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn noise_sigma_zero_is_transparent() {
        let plant = PvPlant::new("pv", 10.0, 0.5, 0.1).with_noise(0.0);
        let mut rng = noise_stream(7, 0);
        assert_eq!(inject_noise(-0.0031, &plant, &mut rng), -0.0031);
    }

    #[test]
    fn noise_is_reproducible_per_seed_and_plant() {
        let plant = PvPlant::new("pv", 10.0, 0.5, 0.1);
        let draw = |seed, idx| {
            let mut rng = noise_stream(seed, idx);
            (0..100).map(|_| inject_noise(0.0, &plant, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(3, 1), draw(3, 1));
        assert_ne!(draw(3, 1), draw(3, 2));
        assert_ne!(draw(3, 1), draw(4, 1));
    }

    #[test]
    fn noise_sample_mean_is_unbiased() {
        let sigma = 2e-5;
        let plant = PvPlant::new("pv", 10.0, 0.5, 0.1).with_noise(sigma);
        let mut rng = noise_stream(11, 0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| inject_noise(0.0, &plant, &mut rng)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 3.0 * sigma / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn noise_stream_is_not_the_default_stream() {
        let mut a = noise_stream(5, 0);
        let mut b = noise_stream(5, 1);
        assert_ne!(a.gen::<u64>(), b.gen::<u64>());
    }

    #[test]
    fn sim_config_validation() {
        let bad = SimConfig {
            dt: 1.0,
            t_end: 0.5,
            ..SimConfig::default()
        };
        assert!(bad.validate("sim").is_err());
        let bad = SimConfig {
            record_every: 0,
            ..SimConfig::default()
        };
        assert!(bad.validate("sim").is_err());
    }
}
