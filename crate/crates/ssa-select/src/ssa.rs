//! Continuous-domain squirrel search optimizer.
//!
//! A population of squirrels glides among three tree roles: the single
//! hickory tree (incumbent best), the acorn trees (next-best solutions),
//! and normal trees (the rest). Acorn squirrels glide toward the hickory;
//! normal squirrels split between acorn targets and the hickory. A
//! predator appearance re-randomizes a squirrel inside the bounds. When
//! the acorn squirrels collapse onto the hickory (the seasonal constant
//! drops below its shrinking threshold), winter ends and normal squirrels
//! relocate by Levy flight.
//!
//! Determinism: every random decision draws from a substream derived from
//! (seed, purpose, iteration, squirrel index), so runs are bit-identical
//! regardless of evaluation parallelism.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds::{self, domain};

/// Optimizer parameters. The defaults follow the usual squirrel-search
/// setup: 50 squirrels, 4 food sources (1 hickory + 3 acorn), gliding
/// constant 1.9, predator probability 0.1, gliding distance drawn
/// uniformly from [0.5, 1.11].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SsaParams {
    pub population_size: usize,
    /// Number of food sources Nfs (hickory + acorn trees); 1 < Nfs < n.
    pub food_sources: usize,
    pub gliding_constant: f64,
    pub predator_probability: f64,
    pub gliding_distance_range: (f64, f64),
    /// Levy exponent beta in (1, 2].
    pub levy_exponent: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SsaParams {
    fn default() -> Self {
        SsaParams {
            population_size: 50,
            food_sources: 4,
            gliding_constant: 1.9,
            predator_probability: 0.1,
            gliding_distance_range: (0.5, 1.11),
            levy_exponent: 1.5,
            max_iterations: 100,
            seed: 0,
        }
    }
}

impl SsaParams {
    pub fn validate(&self) -> Result<()> {
        if self.food_sources <= 1 || self.food_sources >= self.population_size {
            return Err(Error::config(format!(
                "food_sources must satisfy 1 < Nfs < population_size (got Nfs={}, n={})",
                self.food_sources, self.population_size
            )));
        }
        if !(0.0..=1.0).contains(&self.predator_probability) {
            return Err(Error::config(format!(
                "predator_probability must lie in [0, 1], got {}",
                self.predator_probability
            )));
        }
        let (lo, hi) = self.gliding_distance_range;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::config(format!(
                "gliding_distance_range requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        if !(self.levy_exponent > 1.0 && self.levy_exponent <= 2.0) {
            return Err(Error::config(format!(
                "levy_exponent must lie in (1, 2], got {}",
                self.levy_exponent
            )));
        }
        Ok(())
    }
}

/// Box bounds of the search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Bounds> {
        if lower.len() != upper.len() {
            return Err(Error::config(format!(
                "bound lengths differ: {} lower vs {} upper",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(Error::config("bounds must have at least one dimension"));
        }
        for (j, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l < u) || !l.is_finite() || !u.is_finite() {
                return Err(Error::config(format!(
                    "bounds must satisfy lower < upper in every dimension (dimension {j}: [{l}, {u}])"
                )));
            }
        }
        Ok(Bounds { lower, upper })
    }

    /// The same [lo, hi] interval in every dimension.
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Bounds> {
        Bounds::new(vec![lo; dim], vec![hi; dim])
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

    fn clamp(&self, j: usize, v: f64) -> f64 {
        v.clamp(self.lower[j], self.upper[j])
    }
}

/// Tree role of a squirrel after fitness sorting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Hickory,
    Acorn,
    Normal,
}

/// Population state of one optimizer run.
///
/// `fitness[i]` is `None` while squirrel `i` awaits evaluation. The
/// incumbent (`best_position`, `best_fitness`) tracks the minimum over
/// everything evaluated so far, so the convergence curve never rises.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub positions: Vec<Vec<f64>>,
    pub fitness: Vec<Option<f64>>,
    pub roles: Vec<Role>,
    pub iteration: usize,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub convergence: Vec<f64>,
    pub seed: u64,
}

impl OptimizerState {
    fn record_best(&mut self) {
        for (i, f) in self.fitness.iter().enumerate() {
            let f = f.expect("fitness evaluated before recording");
            if f < self.best_fitness {
                self.best_fitness = f;
                self.best_position = self.positions[i].clone();
            }
        }
        self.convergence.push(self.best_fitness);
    }
}

/// Component update for the uniform initial draw: `lower + u*(upper-lower)`.
fn lerp_unit(lower: f64, upper: f64, u: f64) -> f64 {
    lower + u * (upper - lower)
}

/// Glide update toward a target: `x + dg * gc * (target - x)`.
fn glide_component(x: f64, target: f64, dg: f64, gc: f64) -> f64 {
    x + dg * gc * (target - x)
}

/// Draws the initial population uniformly inside the bounds (Nfs, roles
/// and fitness all pending).
pub fn init_population(params: &SsaParams, bounds: &Bounds, dim: usize) -> Result<OptimizerState> {
    params.validate()?;
    if dim == 0 {
        return Err(Error::config("dimension must be at least 1"));
    }
    if bounds.dim() != dim {
        return Err(Error::config(format!(
            "bounds have {} dimensions, expected {dim}",
            bounds.dim()
        )));
    }
    let n = params.population_size;
    let mut positions = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = seeds::derive_rng(params.seed, &[domain::INIT, i as u64]);
        let row = (0..dim)
            .map(|j| lerp_unit(bounds.lower()[j], bounds.upper()[j], rng.random::<f64>()))
            .collect();
        positions.push(row);
    }
    Ok(OptimizerState {
        positions,
        fitness: vec![None; n],
        roles: vec![Role::Normal; n],
        iteration: 0,
        best_position: vec![f64::NAN; dim],
        best_fitness: f64::INFINITY,
        convergence: Vec::new(),
        seed: params.seed,
    })
}

/// Sorts the population by fitness and tags the minimum as hickory, the
/// next `Nfs - 1` as acorn, and the rest as normal. Ties break toward the
/// lower squirrel index.
pub fn assign_roles(state: &mut OptimizerState, params: &SsaParams) -> Result<()> {
    let n = state.positions.len();
    let mut order: Vec<usize> = (0..n).collect();
    for (i, f) in state.fitness.iter().enumerate() {
        if f.is_none() {
            return Err(Error::state(format!(
                "cannot assign roles: squirrel {i} has no fitness value"
            )));
        }
    }
    order.sort_by(|&a, &b| {
        state.fitness[a]
            .unwrap()
            .partial_cmp(&state.fitness[b].unwrap())
            .unwrap()
            .then(a.cmp(&b))
    });
    let acorns = params.food_sources.saturating_sub(1).min(n.saturating_sub(1));
    for (rank, &i) in order.iter().enumerate() {
        state.roles[i] = if rank == 0 {
            Role::Hickory
        } else if rank <= acorns {
            Role::Acorn
        } else {
            Role::Normal
        };
    }
    Ok(())
}

/// Moves every non-hickory squirrel once.
///
/// With probability `1 - Pdp` a squirrel glides toward its target (acorns
/// toward the hickory; normals toward a uniformly chosen acorn, except
/// that half of them, chosen by seeded shuffle, head for the hickory);
/// otherwise a predator appears and the squirrel is re-randomized inside
/// the bounds. Gliding distance is drawn per squirrel per step. Moved
/// squirrels are marked unevaluated; the hickory squirrel stays put.
pub fn glide_step(state: &mut OptimizerState, params: &SsaParams, bounds: &Bounds) {
    let n = state.positions.len();
    let hickory = state
        .roles
        .iter()
        .position(|&r| r == Role::Hickory)
        .expect("glide_step requires assigned roles");
    let hickory_pos = state.positions[hickory].clone();
    let acorn_positions: Vec<Vec<f64>> = (0..n)
        .filter(|&i| state.roles[i] == Role::Acorn)
        .map(|i| state.positions[i].clone())
        .collect();

    // Seeded shuffle decides which normals chase acorns this iteration.
    let normals: Vec<usize> = (0..n).filter(|&i| state.roles[i] == Role::Normal).collect();
    let mut shuffled = normals.clone();
    shuffled.shuffle(&mut seeds::derive_rng(
        state.seed,
        &[domain::NORMAL_SPLIT, state.iteration as u64],
    ));
    let mut chases_acorn = vec![false; n];
    for &i in shuffled.iter().take(normals.len() / 2) {
        chases_acorn[i] = true;
    }

    let (dg_lo, dg_hi) = params.gliding_distance_range;
    for i in 0..n {
        if i == hickory {
            continue;
        }
        let mut rng = seeds::derive_rng(
            state.seed,
            &[domain::GLIDE, state.iteration as u64, i as u64],
        );
        let predator_draw: f64 = rng.random();
        if predator_draw >= params.predator_probability {
            let dg = rng.random_range(dg_lo..dg_hi);
            let target: &[f64] = if state.roles[i] == Role::Acorn || !chases_acorn[i] {
                &hickory_pos
            } else {
                &acorn_positions[rng.random_range(0..acorn_positions.len())]
            };
            for j in 0..bounds.dim() {
                let moved = glide_component(state.positions[i][j], target[j], dg, params.gliding_constant);
                state.positions[i][j] = bounds.clamp(j, moved);
            }
        } else {
            for j in 0..bounds.dim() {
                state.positions[i][j] =
                    lerp_unit(bounds.lower()[j], bounds.upper()[j], rng.random::<f64>());
            }
        }
        state.fitness[i] = None;
    }
}

/// Seasonal monitoring: true (winter ends, relocate) when the aggregate
/// acorn-to-hickory distance drops below the shrinking threshold
/// `S_min(t) = 1e-5 / 365^(t / (T/2.5))`.
pub fn seasonal_check(state: &OptimizerState, params: &SsaParams) -> bool {
    if params.max_iterations == 0 {
        return false;
    }
    let hickory = state
        .roles
        .iter()
        .position(|&r| r == Role::Hickory)
        .expect("seasonal_check requires assigned roles");
    let hickory_pos = &state.positions[hickory];
    let mut sum_sq = 0.0;
    for i in 0..state.positions.len() {
        if state.roles[i] != Role::Acorn {
            continue;
        }
        for (x, h) in state.positions[i].iter().zip(hickory_pos) {
            sum_sq += (x - h) * (x - h);
        }
    }
    let seasonal_constant = sum_sq.sqrt();
    let t = state.iteration as f64;
    let half_life = params.max_iterations as f64 / 2.5;
    let s_min = 1e-5 / 365f64.powf(t / half_life);
    seasonal_constant < s_min
}

/// Normalizing constant of Mantegna's method for exponent `beta`.
fn mantegna_sigma(beta: f64) -> f64 {
    let num = libm::tgamma(1.0 + beta) * (std::f64::consts::PI * beta / 2.0).sin();
    let den = libm::tgamma((1.0 + beta) / 2.0) * beta * 2f64.powf((beta - 1.0) / 2.0);
    (num / den).powf(1.0 / beta)
}

/// One heavy-tailed Levy step: `u / |v|^(1/beta)` with `u ~ N(0, sigma^2)`,
/// `v ~ N(0, 1)`.
fn levy_step<R: Rng>(rng: &mut R, beta: f64, sigma: f64) -> f64 {
    let u: f64 = StandardNormal.sample(rng);
    let mut v: f64 = StandardNormal.sample(rng);
    if v == 0.0 {
        v = f64::MIN_POSITIVE;
    }
    sigma * u / v.abs().powf(1.0 / beta)
}

/// Component relocation: `lower + step * (upper - lower)`, clamped.
fn relocate_component(lower: f64, upper: f64, step: f64) -> f64 {
    (lower + step * (upper - lower)).clamp(lower, upper)
}

/// Winter relocation: every normal squirrel jumps to
/// `FS_L + Levy(beta) * (FS_U - FS_L)` componentwise and is marked
/// unevaluated.
pub fn levy_relocate(state: &mut OptimizerState, params: &SsaParams, bounds: &Bounds) {
    let sigma = mantegna_sigma(params.levy_exponent);
    for i in 0..state.positions.len() {
        if state.roles[i] != Role::Normal {
            continue;
        }
        let mut rng = seeds::derive_rng(
            state.seed,
            &[domain::LEVY, state.iteration as u64, i as u64],
        );
        for j in 0..bounds.dim() {
            let step = levy_step(&mut rng, params.levy_exponent, sigma);
            state.positions[i][j] = relocate_component(bounds.lower()[j], bounds.upper()[j], step);
        }
        state.fitness[i] = None;
    }
}

/// Evaluates every pending squirrel, in parallel, failing on the first
/// (lowest-index) non-finite objective value.
fn evaluate_pending<F>(state: &mut OptimizerState, objective: &F) -> Result<()>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let pending: Vec<usize> = (0..state.positions.len())
        .filter(|&i| state.fitness[i].is_none())
        .collect();
    let values: Vec<(usize, f64)> = pending
        .par_iter()
        .map(|&i| (i, objective(&state.positions[i])))
        .collect();
    for (i, v) in values {
        if !v.is_finite() {
            return Err(Error::Evaluation {
                index: i,
                position: state.positions[i].clone(),
                value: v,
            });
        }
        state.fitness[i] = Some(v);
    }
    Ok(())
}

/// Result of a full optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Best-so-far fitness per iteration, entry 0 being the initial
    /// population's best; length `max_iterations + 1`.
    pub convergence: Vec<f64>,
}

impl RunOutcome {
    /// The convergence curve as (iteration, best_fitness) pairs.
    pub fn curve(&self) -> Vec<(usize, f64)> {
        self.convergence.iter().copied().enumerate().collect()
    }
}

/// Runs the full optimize loop: init, evaluate, then per iteration
/// role assignment, gliding, seasonal monitoring with Levy relocation,
/// and evaluation of everything that moved.
pub fn run<F>(objective: F, params: &SsaParams, bounds: &Bounds, dim: usize) -> Result<RunOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut state = init_population(params, bounds, dim)?;
    evaluate_pending(&mut state, &objective)?;
    state.record_best();
    for t in 1..=params.max_iterations {
        assign_roles(&mut state, params)?;
        state.iteration = t;
        glide_step(&mut state, params, bounds);
        if seasonal_check(&state, params) {
            levy_relocate(&mut state, params, bounds);
        }
        evaluate_pending(&mut state, &objective)?;
        state.record_best();
    }
    Ok(RunOutcome {
        best_position: state.best_position,
        best_fitness: state.best_fitness,
        convergence: state.convergence,
    })
}
