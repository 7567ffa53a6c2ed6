//! Multi-start Nelder-Mead simplex search.
//!
//! Maximization is implemented by minimizing the negated objective. Every
//! evaluated point feeds a global best tracker, so the returned optimum is
//! the best vertex seen across all starts and all iterations, not just the
//! final simplex of the last run.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Dataset;
use crate::scoring::{success_rate, LinearScorer};

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadConfig {
    /// Initial points, one independent simplex run per start.
    pub starts: Vec<Vec<f64>>,
    /// Iteration budget per run.
    pub max_iterations: usize,
    /// Edge length of the initial axis-aligned simplex around each start.
    pub simplex_scale: f64,
    /// A run stops once the simplex diameter falls below this.
    pub convergence_diameter: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl NelderMeadConfig {
    /// Standard coefficients, diameter 1e-8, and a 500·d iteration budget.
    pub fn new(starts: Vec<Vec<f64>>) -> Result<Self> {
        let dimension = match starts.first() {
            Some(s) if !s.is_empty() => s.len(),
            _ => return Err(Error::invalid("starts must be non-empty points")),
        };
        let config = Self {
            starts,
            max_iterations: 500 * dimension,
            simplex_scale: 0.5,
            convergence_diameter: 1e-8,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.starts.is_empty() {
            return Err(Error::invalid("at least one start point is required"));
        }
        let dimension = self.starts[0].len();
        if dimension == 0 {
            return Err(Error::invalid("start points must have dimension >= 1"));
        }
        for s in &self.starts {
            if s.len() != dimension {
                return Err(Error::invalid("start points must share one dimension"));
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("non-finite start point"));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.simplex_scale) {
            return Err(Error::invalid("simplex_scale must be positive"));
        }
        if !positive(self.convergence_diameter) {
            return Err(Error::invalid("convergence_diameter must be positive"));
        }
        if !positive(self.reflection) {
            return Err(Error::invalid("reflection must be positive"));
        }
        if !(self.expansion.is_finite() && self.expansion > 1.0) {
            return Err(Error::invalid("expansion must exceed 1"));
        }
        if !(self.contraction > 0.0 && self.contraction < 1.0) {
            return Err(Error::invalid("contraction must lie in (0, 1)"));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::invalid("shrink must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.starts[0].len()
    }
}

/// The default multi-start set: 8 seeded uniform points in [-1, 1]^d plus
/// the positive and negative unit vectors, truncated to 8.
pub fn default_starts(dimension: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<Vec<f64>> = (0..8)
        .map(|_| (0..dimension).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let mut units = Vec::new();
    for sign in [1.0, -1.0] {
        for axis in 0..dimension {
            let mut v = vec![0.0; dimension];
            v[axis] = sign;
            units.push(v);
        }
    }
    starts.extend(units.into_iter().take(8));
    starts
}

/// Exactly `count` start points: the default set truncated, topped up with
/// further seeded uniform points when the default set is smaller.
pub fn seeded_starts(dimension: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::invalid("at least one start point is required"));
    }
    let mut starts = default_starts(dimension, seed);
    if count <= starts.len() {
        starts.truncate(count);
        return Ok(starts);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    while starts.len() < count {
        starts.push((0..dimension).map(|_| rng.random_range(-1.0..1.0)).collect());
    }
    Ok(starts)
}

struct Tracker<'a, F> {
    objective: &'a F,
    best_point: Vec<f64>,
    best_value: f64,
    evaluated: bool,
}

impl<'a, F: Fn(&[f64]) -> f64> Tracker<'a, F> {
    fn new(objective: &'a F) -> Self {
        Self {
            objective,
            best_point: Vec::new(),
            best_value: f64::NEG_INFINITY,
            evaluated: false,
        }
    }

    /// Evaluate the objective (to be maximized) and return its negation for
    /// the minimizing simplex loop.
    fn eval_neg(&mut self, point: &[f64]) -> Result<f64> {
        let value = (self.objective)(point);
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective {
                point: point.to_vec(),
            });
        }
        if !self.evaluated || value > self.best_value {
            self.best_point = point.to_vec();
            self.best_value = value;
            self.evaluated = true;
        }
        Ok(-value)
    }
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut max = 0.0f64;
    for i in 0..simplex.len() {
        for j in (i + 1)..simplex.len() {
            let d: f64 = simplex[i]
                .iter()
                .zip(&simplex[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            max = max.max(d);
        }
    }
    max
}

/// Maximize `objective` with Nelder-Mead from every configured start and
/// return the best point evaluated anywhere.
pub fn nelder_mead_maximize<F: Fn(&[f64]) -> f64>(
    objective: F,
    config: &NelderMeadConfig,
) -> Result<(Vec<f64>, f64)> {
    config.validate()?;
    let dimension = config.dimension();
    let mut tracker = Tracker::new(&objective);

    for start in &config.starts {
        run_simplex(start, dimension, config, &mut tracker)?;
    }
    Ok((tracker.best_point.clone(), tracker.best_value))
}

fn run_simplex<F: Fn(&[f64]) -> f64>(
    start: &[f64],
    dimension: usize,
    config: &NelderMeadConfig,
    tracker: &mut Tracker<'_, F>,
) -> Result<()> {
    // Initial simplex: the start plus one axis step per coordinate.
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dimension + 1);
    simplex.push(start.to_vec());
    for axis in 0..dimension {
        let mut v = start.to_vec();
        v[axis] += config.simplex_scale;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex
        .iter()
        .map(|v| tracker.eval_neg(v))
        .collect::<Result<_>>()?;

    for _ in 0..config.max_iterations {
        // Ascending by negated value; stable, so equal plateaus keep their
        // order and the run stays deterministic.
        let mut order: Vec<usize> = (0..simplex.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dimension];
        // Coincides with the best vertex when dimension == 1.
        let second_worst = order[dimension - 1];

        if diameter(&simplex) < config.convergence_diameter {
            break;
        }

        // Centroid of all vertices but the worst.
        let mut centroid = vec![0.0; dimension];
        for &i in order.iter().take(dimension) {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dimension as f64;
        }

        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&simplex[worst])
            .map(|(c, w)| c + config.reflection * (c - w))
            .collect();
        let f_reflected = tracker.eval_neg(&reflected)?;

        if f_reflected < values[best] {
            // Try to expand further along the same direction.
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&reflected)
                .map(|(c, r)| c + config.expansion * (r - c))
                .collect();
            let f_expanded = tracker.eval_neg(&expanded)?;
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }

        if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }

        if f_reflected < values[worst] {
            // Outside contraction between the centroid and the reflection.
            let outside: Vec<f64> = centroid
                .iter()
                .zip(&reflected)
                .map(|(c, r)| c + config.contraction * (r - c))
                .collect();
            let f_outside = tracker.eval_neg(&outside)?;
            if f_outside <= f_reflected {
                simplex[worst] = outside;
                values[worst] = f_outside;
                continue;
            }
        } else {
            // Inside contraction toward the worst vertex.
            let inside: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + config.contraction * (w - c))
                .collect();
            let f_inside = tracker.eval_neg(&inside)?;
            if f_inside < values[worst] {
                simplex[worst] = inside;
                values[worst] = f_inside;
                continue;
            }
        }

        // Shrink everything toward the best vertex.
        let best_vertex = simplex[best].clone();
        for &i in order.iter().skip(1) {
            let shrunk: Vec<f64> = best_vertex
                .iter()
                .zip(&simplex[i])
                .map(|(b, x)| b + config.shrink * (x - b))
                .collect();
            values[i] = tracker.eval_neg(&shrunk)?;
            simplex[i] = shrunk;
        }
    }
    Ok(())
}

/// Nelder-Mead search for the linear scorer maximizing the success rate on
/// `dataset`; returns the best scorer found and its full-data rate.
pub fn maximize_success_rate(
    dataset: &Dataset,
    config: &NelderMeadConfig,
) -> Result<(LinearScorer, f64)> {
    if dataset.lots().is_empty() {
        return Err(Error::invalid("cannot optimize over an empty dataset"));
    }
    if config.dimension() != dataset.dimension() {
        return Err(Error::invalid(format!(
            "start points have dimension {}, dataset has {}",
            config.dimension(),
            dataset.dimension()
        )));
    }
    let objective = |coefficients: &[f64]| -> f64 {
        match LinearScorer::new(coefficients.to_vec()) {
            Ok(scorer) => success_rate(&scorer, dataset).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    };
    let (point, value) = nelder_mead_maximize(objective, config)?;
    Ok((LinearScorer::new(point)?, value))
}
