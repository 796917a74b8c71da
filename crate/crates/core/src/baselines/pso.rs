use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, ImputationPolicy, Label, Preprocessor, N_FEATURES};
use crate::error::{Error, Result};

use super::elm::{
    elm_solve_output, hidden_activations, one_hot, output_activations, ridge_residual, ElmModel,
    DEFAULT_RIDGE,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoConfig {
    pub hidden_size: usize,
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub ridge: f64,
    /// Initial positions are drawn uniformly from `[-init_range, init_range]`.
    pub init_range: f64,
    /// Per-coordinate bound on velocity magnitude.
    pub velocity_clamp: f64,
    pub validation_fraction: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            hidden_size: 32,
            swarm_size: 20,
            iterations: 50,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            ridge: DEFAULT_RIDGE,
            init_range: 1.0,
            velocity_clamp: 0.5,
            validation_fraction: 0.2,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidHyperparams(what.to_string()));
        if self.hidden_size == 0 {
            return bad("hidden size must be positive");
        }
        if self.swarm_size == 0 {
            return bad("swarm size must be positive");
        }
        if !(self.ridge > 0.0 && self.ridge.is_finite()) {
            return bad("ridge must be positive");
        }
        if !(self.velocity_clamp > 0.0 && self.velocity_clamp.is_finite()) {
            return bad("velocity clamp must be positive");
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad("validation fraction must lie in (0, 1)");
        }
        if ![self.inertia, self.cognitive, self.social, self.init_range]
            .iter()
            .all(|v| v.is_finite())
        {
            return bad("swarm coefficients must be finite");
        }
        Ok(())
    }

    pub fn dimensions(&self) -> usize {
        self.hidden_size * (N_FEATURES + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoState {
    pub particles: Vec<Particle>,
    pub global_best: Vec<f64>,
    pub global_fitness: f64,
}

impl PsoState {
    /// Personal and global best updates in particle order; ties keep the incumbent.
    fn absorb(&mut self, fitness: &[f64]) {
        for (p, &f) in self.particles.iter_mut().zip(fitness) {
            if f > p.best_fitness {
                p.best_fitness = f;
                p.best_position.clone_from(&p.position);
            }
            if f > self.global_fitness {
                self.global_fitness = f;
                self.global_best.clone_from(&p.position);
            }
        }
    }

    fn step(&mut self, config: &PsoConfig, rng: &mut ChaCha8Rng) {
        let vmax = config.velocity_clamp;
        for p in &mut self.particles {
            for d in 0..p.position.len() {
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                let x = p.position[d];
                let v = config.inertia * p.velocity[d]
                    + config.cognitive * r1 * (p.best_position[d] - x)
                    + config.social * r2 * (self.global_best[d] - x);
                let v = v.clamp(-vmax, vmax);
                p.velocity[d] = v;
                p.position[d] = x + v;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoElmFit {
    pub model: ElmModel,
    /// Global-best validation accuracy after initialization and after each iteration.
    pub fitness_history: Vec<f64>,
    /// Largest ridge-solve residual over every solve performed.
    pub max_residual: f64,
}

/// Per-class shuffled holdout; each class with at least two members keeps at
/// least one record on each side.
fn stratified_holdout(
    labels: &[Label],
    fraction: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, Vec<usize>) {
    let mut fit = Vec::new();
    let mut val = Vec::new();
    for class in [Label::Absent, Label::Present] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(rng);
        let mut n_val = (idx.len() as f64 * fraction).round() as usize;
        if idx.len() >= 2 {
            n_val = n_val.clamp(1, idx.len() - 1);
        } else {
            n_val = 0;
        }
        val.extend_from_slice(&idx[..n_val]);
        fit.extend_from_slice(&idx[n_val..]);
    }
    fit.sort_unstable();
    val.sort_unstable();
    (fit, val)
}

struct Problem<'a> {
    config: &'a PsoConfig,
    fit_x: Vec<[f64; N_FEATURES]>,
    fit_y: Vec<f64>,
    val_x: Vec<[f64; N_FEATURES]>,
    val_labels: Vec<Label>,
}

impl Problem<'_> {
    fn split(&self, position: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n_w = self.config.hidden_size * N_FEATURES;
        (position[..n_w].to_vec(), position[n_w..].to_vec())
    }

    /// Validation accuracy of the particle and the residual of its solve.
    fn fitness(&self, position: &[f64]) -> Result<(f64, f64)> {
        let h = self.config.hidden_size;
        let (weights, biases) = self.split(position);
        let act = hidden_activations(&self.fit_x, &weights, &biases);
        let out = elm_solve_output(&act, self.fit_x.len(), h, &self.fit_y, 2, self.config.ridge)?;
        let residual = ridge_residual(
            &act,
            self.fit_x.len(),
            h,
            &self.fit_y,
            2,
            self.config.ridge,
            &out,
        );
        let val_act = hidden_activations(&self.val_x, &weights, &biases);
        let correct = val_act
            .chunks(h)
            .zip(&self.val_labels)
            .filter(|(a, l)| {
                let o = output_activations(a, &out);
                let class = if o[1] > o[0] {
                    Label::Present
                } else {
                    Label::Absent
                };
                class == **l
            })
            .count();
        Ok((
            correct as f64 / self.val_labels.len().max(1) as f64,
            residual,
        ))
    }
}

/// Swarm search over the hidden-layer parameters of an ELM, scored by
/// validation accuracy on a seeded stratified holdout. The winning hidden layer
/// gets its output weights re-solved on all of `data`.
pub fn pso_elm_train(data: &Dataset, config: &PsoConfig, seed: u64) -> Result<PsoElmFit> {
    config.validate()?;
    if !data.has_both_classes() {
        return Err(Error::SingleClassData);
    }
    let preprocessor = Preprocessor::fit(data, ImputationPolicy::default())?;
    let inputs = data
        .records
        .iter()
        .map(|r| preprocessor.transform_features(&r.features))
        .collect::<Result<Vec<_>>>()?;
    let labels = data.labels();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (fit_idx, val_idx) = stratified_holdout(&labels, config.validation_fraction, &mut rng);
    let fit_labels: Vec<Label> = fit_idx.iter().map(|&i| labels[i]).collect();
    let problem = Problem {
        config,
        fit_x: fit_idx.iter().map(|&i| inputs[i]).collect(),
        fit_y: one_hot(&fit_labels),
        val_x: val_idx.iter().map(|&i| inputs[i]).collect(),
        val_labels: val_idx.iter().map(|&i| labels[i]).collect(),
    };

    let dims = config.dimensions();
    let particles: Vec<Particle> = (0..config.swarm_size)
        .map(|_| {
            let position: Vec<f64> = (0..dims)
                .map(|_| rng.gen_range(-1.0..=1.0) * config.init_range)
                .collect();
            let velocity: Vec<f64> = (0..dims)
                .map(|_| rng.gen_range(-1.0..=1.0) * config.velocity_clamp)
                .collect();
            Particle {
                best_position: position.clone(),
                position,
                velocity,
                best_fitness: f64::NEG_INFINITY,
            }
        })
        .collect();
    let mut state = PsoState {
        global_best: particles[0].position.clone(),
        particles,
        global_fitness: f64::NEG_INFINITY,
    };

    let mut max_residual = 0.0_f64;
    let mut evaluate = |state: &PsoState| -> Result<Vec<f64>> {
        let mut fitness = Vec::with_capacity(state.particles.len());
        for p in &state.particles {
            let (f, r) = problem.fitness(&p.position)?;
            max_residual = max_residual.max(r);
            fitness.push(f);
        }
        Ok(fitness)
    };

    let mut history = Vec::with_capacity(config.iterations + 1);
    let fitness = evaluate(&state)?;
    state.absorb(&fitness);
    history.push(state.global_fitness);
    for _ in 0..config.iterations {
        state.step(config, &mut rng);
        let fitness = evaluate(&state)?;
        state.absorb(&fitness);
        history.push(state.global_fitness);
    }

    let (hidden_weights, hidden_biases) = problem.split(&state.global_best);
    let act = hidden_activations(&inputs, &hidden_weights, &hidden_biases);
    let y = one_hot(&labels);
    let h = config.hidden_size;
    let output_weights = elm_solve_output(&act, inputs.len(), h, &y, 2, config.ridge)?;
    max_residual = max_residual.max(ridge_residual(
        &act,
        inputs.len(),
        h,
        &y,
        2,
        config.ridge,
        &output_weights,
    ));

    Ok(PsoElmFit {
        model: ElmModel {
            preprocessor,
            hidden_size: h,
            hidden_weights,
            hidden_biases,
            output_weights,
        },
        fitness_history: history,
        max_residual,
    })
}
