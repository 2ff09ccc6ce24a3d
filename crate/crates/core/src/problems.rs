//! Stochastic objectives `F(x) = E_ξ[f(x; ξ)]` with analytic gradients.
//!
//! A sample ξ is named by a [`SampleKey`] rather than drawn inside the
//! gradient call, so the same ξ can be evaluated at two points. Every kind
//! also exposes its exact value and gradient for verification and logging.

use crate::error::{GalaError, Result};
use crate::rng::{roles, RngStream, SampleKey};
use crate::vector::Vector;

/// `F(x) = ½ xᵀ diag(λ) x + bᵀx`, gradients perturbed by `N(0, σ²)` per coordinate.
#[derive(Debug, Clone)]
pub struct NoisyQuadratic {
    eigenvalues: Vector,
    offset: Vector,
    noise_level: f64,
}

impl NoisyQuadratic {
    pub fn new(eigenvalues: Vector, offset: Vector, noise_level: f64) -> Result<Self> {
        if eigenvalues.dim() == 0 {
            return Err(GalaError::invalid("eigenvalues", "must be non-empty"));
        }
        offset.check_dim(eigenvalues.dim())?;
        if eigenvalues.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(GalaError::invalid(
                "eigenvalues",
                "entries must be finite and positive",
            ));
        }
        offset.ensure_finite("offset")?;
        check_noise(noise_level)?;
        Ok(NoisyQuadratic {
            eigenvalues,
            offset,
            noise_level,
        })
    }

    pub fn eigenvalues(&self) -> &Vector {
        &self.eigenvalues
    }

    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    /// The minimizer `-b / λ`.
    pub fn minimizer(&self) -> Vector {
        Vector::from(
            self.offset
                .iter()
                .zip(self.eigenvalues.iter())
                .map(|(b, l)| -b / l)
                .collect::<Vec<_>>(),
        )
    }

    fn coord_value(&self, i: usize, xi: f64) -> f64 {
        0.5 * self.eigenvalues[i] * xi * xi + self.offset[i] * xi
    }

    fn coord_grad(&self, i: usize, xi: f64) -> f64 {
        self.eigenvalues[i] * xi + self.offset[i]
    }
}

/// Quadratic plus `Σ_i a·sin(ω x_i)`; nonconvex once `a·ω² > min λ`.
#[derive(Debug, Clone)]
pub struct NonconvexSine {
    base: NoisyQuadratic,
    amplitude: f64,
    frequency: f64,
}

impl NonconvexSine {
    pub fn new(base: NoisyQuadratic, amplitude: f64, frequency: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(GalaError::invalid("amplitude", "must be finite and >= 0"));
        }
        if !frequency.is_finite() {
            return Err(GalaError::invalid("frequency", "must be finite"));
        }
        Ok(NonconvexSine {
            base,
            amplitude,
            frequency,
        })
    }

    pub fn base(&self) -> &NoisyQuadratic {
        &self.base
    }

    pub fn is_nonconvex(&self) -> bool {
        let min_eig = self
            .base
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        self.amplitude * self.frequency * self.frequency > min_eig
    }

    fn coord_value(&self, i: usize, xi: f64) -> f64 {
        self.base.coord_value(i, xi) + self.amplitude * (self.frequency * xi).sin()
    }

    fn coord_grad(&self, i: usize, xi: f64) -> f64 {
        self.base.coord_grad(i, xi)
            + self.amplitude * self.frequency * (self.frequency * xi).cos()
    }
}

/// Parameters for [`LogisticSynthetic::generate`].
#[derive(Debug, Clone)]
pub struct LogisticSpec {
    pub dim: usize,
    pub n_samples: usize,
    pub batch_size: usize,
    /// Probability of flipping each label; 0 gives linearly separable data.
    pub label_noise: f64,
    pub noise_level: f64,
    pub data_seed: u64,
}

impl Default for LogisticSpec {
    fn default() -> Self {
        LogisticSpec {
            dim: 20,
            n_samples: 1000,
            batch_size: 32,
            label_noise: 0.0,
            noise_level: 0.0,
            data_seed: 0,
        }
    }
}

/// Mean logistic loss over a seeded synthetic dataset with ±1 labels.
///
/// Mini-batches are drawn with replacement from the key; a batch size of at
/// least `n_samples` uses the whole dataset, so the sample gradient equals the
/// true gradient. A held-out set of `n_samples / 5` points from the same
/// generator backs [`LogisticSynthetic::held_out_value`].
#[derive(Debug, Clone)]
pub struct LogisticSynthetic {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<f64>,
    held_out_features: Vec<f64>,
    held_out_labels: Vec<f64>,
    batch_size: usize,
    noise_level: f64,
}

impl LogisticSynthetic {
    pub fn generate(spec: &LogisticSpec) -> Result<Self> {
        if spec.dim == 0 {
            return Err(GalaError::invalid("dim", "must be positive"));
        }
        if spec.n_samples == 0 {
            return Err(GalaError::invalid("n_samples", "must be positive"));
        }
        if spec.batch_size == 0 {
            return Err(GalaError::invalid("batch_size", "must be positive"));
        }
        if !(0.0..=0.5).contains(&spec.label_noise) {
            return Err(GalaError::invalid("label_noise", "must lie in [0, 0.5]"));
        }
        check_noise(spec.noise_level)?;

        let mut rng = RngStream::new(spec.data_seed, roles::DATA);
        let truth: Vec<f64> = (0..spec.dim).map(|_| rng.standard_normal()).collect();

        let mut draw = |n: usize| {
            let mut xs = Vec::with_capacity(n * spec.dim);
            let mut ys = Vec::with_capacity(n);
            for _ in 0..n {
                let row: Vec<f64> = (0..spec.dim).map(|_| rng.standard_normal()).collect();
                let margin: f64 = row.iter().zip(&truth).map(|(a, b)| a * b).sum();
                let mut y = if margin >= 0.0 { 1.0 } else { -1.0 };
                if rng.uniform() < spec.label_noise {
                    y = -y;
                }
                xs.extend(row);
                ys.push(y);
            }
            (xs, ys)
        };
        let (features, labels) = draw(spec.n_samples);
        let (held_out_features, held_out_labels) = draw((spec.n_samples / 5).max(1));

        Ok(LogisticSynthetic {
            dim: spec.dim,
            features,
            labels,
            held_out_features,
            held_out_labels,
            batch_size: spec.batch_size,
            noise_level: spec.noise_level,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    fn loss_over(features: &[f64], labels: &[f64], dim: usize, x: &[f64]) -> f64 {
        let total: f64 = labels
            .iter()
            .enumerate()
            .map(|(i, &y)| {
                let row = &features[i * dim..(i + 1) * dim];
                softplus(-y * dot_slice(row, x))
            })
            .sum();
        total / labels.len() as f64
    }

    /// Accumulates `Σ_i ∇ loss_i(x)` over `indices` into `out`.
    fn accumulate_grad(&self, x: &[f64], indices: impl Iterator<Item = usize>, out: &mut [f64]) {
        for i in indices {
            let row = self.row(i);
            let y = self.labels[i];
            // d/dz softplus(-y z) = -y σ(-y z)
            let coef = -y * sigmoid(-y * dot_slice(row, x));
            for (o, r) in out.iter_mut().zip(row) {
                *o += coef * r;
            }
        }
    }

    /// Mean logistic loss on the held-out split.
    pub fn held_out_value(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim)?;
        Ok(Self::loss_over(
            &self.held_out_features,
            &self.held_out_labels,
            self.dim,
            x.as_slice(),
        ))
    }
}

fn dot_slice(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn check_noise(noise_level: f64) -> Result<()> {
    if !(noise_level >= 0.0) || !noise_level.is_finite() {
        return Err(GalaError::invalid("noise_level", "must be finite and >= 0"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    NoisyQuadratic,
    LogisticSynthetic,
    NonconvexSine,
}

#[derive(Debug, Clone)]
pub enum StochasticProblem {
    NoisyQuadratic(NoisyQuadratic),
    LogisticSynthetic(LogisticSynthetic),
    NonconvexSine(NonconvexSine),
}

impl From<NoisyQuadratic> for StochasticProblem {
    fn from(p: NoisyQuadratic) -> Self {
        StochasticProblem::NoisyQuadratic(p)
    }
}

impl From<LogisticSynthetic> for StochasticProblem {
    fn from(p: LogisticSynthetic) -> Self {
        StochasticProblem::LogisticSynthetic(p)
    }
}

impl From<NonconvexSine> for StochasticProblem {
    fn from(p: NonconvexSine) -> Self {
        StochasticProblem::NonconvexSine(p)
    }
}

impl StochasticProblem {
    /// Convenience constructor for the diagonal quadratic.
    pub fn quadratic(eigenvalues: &[f64], offset: &[f64], noise_level: f64) -> Result<Self> {
        Ok(NoisyQuadratic::new(eigenvalues.to_vec().into(), offset.to_vec().into(), noise_level)?.into())
    }

    pub fn kind(&self) -> ProblemKind {
        match self {
            StochasticProblem::NoisyQuadratic(_) => ProblemKind::NoisyQuadratic,
            StochasticProblem::LogisticSynthetic(_) => ProblemKind::LogisticSynthetic,
            StochasticProblem::NonconvexSine(_) => ProblemKind::NonconvexSine,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            StochasticProblem::NoisyQuadratic(q) => q.eigenvalues.dim(),
            StochasticProblem::LogisticSynthetic(l) => l.dim,
            StochasticProblem::NonconvexSine(s) => s.base.eigenvalues.dim(),
        }
    }

    pub fn noise_level(&self) -> f64 {
        match self {
            StochasticProblem::NoisyQuadratic(q) => q.noise_level,
            StochasticProblem::LogisticSynthetic(l) => l.noise_level,
            StochasticProblem::NonconvexSine(s) => s.base.noise_level,
        }
    }

    /// Global gradient-Lipschitz constant, when known in closed form.
    pub fn lipschitz_constant(&self) -> Option<f64> {
        match self {
            StochasticProblem::NoisyQuadratic(q) => {
                Some(q.eigenvalues.iter().copied().fold(0.0, f64::max))
            }
            StochasticProblem::NonconvexSine(s) => Some(
                s.base.eigenvalues.iter().copied().fold(0.0, f64::max)
                    + s.amplitude * s.frequency * s.frequency,
            ),
            StochasticProblem::LogisticSynthetic(_) => None,
        }
    }

    /// Starting point used when a run does not supply one.
    pub fn default_start(&self) -> Vector {
        match self {
            StochasticProblem::LogisticSynthetic(l) => Vector::zeros(l.dim),
            _ => Vector::filled(self.dim(), 1.0),
        }
    }

    /// Exact objective `F(x)`.
    pub fn value(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim())?;
        let xs = x.as_slice();
        Ok(match self {
            StochasticProblem::NoisyQuadratic(q) => {
                xs.iter().enumerate().map(|(i, &v)| q.coord_value(i, v)).sum()
            }
            StochasticProblem::NonconvexSine(s) => {
                xs.iter().enumerate().map(|(i, &v)| s.coord_value(i, v)).sum()
            }
            StochasticProblem::LogisticSynthetic(l) => {
                LogisticSynthetic::loss_over(&l.features, &l.labels, l.dim, xs)
            }
        })
    }

    /// Exact `∇F(x)`; for the logistic kind this is the full-data gradient.
    pub fn true_gradient(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        let xs = x.as_slice();
        let g: Vec<f64> = match self {
            StochasticProblem::NoisyQuadratic(q) => xs
                .iter()
                .enumerate()
                .map(|(i, &v)| q.coord_grad(i, v))
                .collect(),
            StochasticProblem::NonconvexSine(s) => xs
                .iter()
                .enumerate()
                .map(|(i, &v)| s.coord_grad(i, v))
                .collect(),
            StochasticProblem::LogisticSynthetic(l) => {
                let mut out = vec![0.0; l.dim];
                l.accumulate_grad(xs, 0..l.n_samples(), &mut out);
                let n = l.n_samples() as f64;
                out.iter_mut().for_each(|o| *o /= n);
                out
            }
        };
        Ok(Vector::from(g))
    }

    /// `∇f(x; ξ)` for the sample named by `key`.
    pub fn sample_gradient(&self, x: &Vector, key: SampleKey) -> Result<Vector> {
        x.check_dim(self.dim())?;
        let mut stream = RngStream::new(key.0, roles::KEY_EXPANSION);
        let mut g = match self {
            StochasticProblem::LogisticSynthetic(l) if l.batch_size < l.n_samples() => {
                let mut out = vec![0.0; l.dim];
                let n = l.n_samples();
                let indices: Vec<usize> = (0..l.batch_size).map(|_| stream.index(n)).collect();
                l.accumulate_grad(x.as_slice(), indices.into_iter(), &mut out);
                let b = l.batch_size as f64;
                out.iter_mut().for_each(|o| *o /= b);
                Vector::from(out)
            }
            _ => self.true_gradient(x)?,
        };
        let sigma = self.noise_level();
        if sigma > 0.0 {
            for v in g.as_mut_slice() {
                *v += sigma * stream.standard_normal();
            }
        }
        g.ensure_finite("sample gradient")?;
        Ok(g)
    }

    /// Path-averaged gradient `∫₀¹ ∇F(x + s(x_next − x)) ds`.
    ///
    /// Separable kinds use the exact per-coordinate difference quotient; the
    /// logistic kind uses composite Simpson quadrature on 2000 panels.
    pub fn path_average_gradient(&self, x: &Vector, x_next: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        x_next.check_dim(self.dim())?;
        let separable = |value: &dyn Fn(usize, f64) -> f64, grad: &dyn Fn(usize, f64) -> f64| {
            let out: Vec<f64> = x
                .iter()
                .zip(x_next.iter())
                .enumerate()
                .map(|(i, (&a, &b))| {
                    let d = b - a;
                    if d.abs() <= 1e-9 * (1.0 + a.abs()) {
                        grad(i, 0.5 * (a + b))
                    } else {
                        (value(i, b) - value(i, a)) / d
                    }
                })
                .collect();
            Vector::from(out)
        };
        Ok(match self {
            StochasticProblem::NoisyQuadratic(_) => {
                // Linear gradient: the average is the gradient at the midpoint.
                let mid = x.add(x_next)?.scaled(0.5);
                self.true_gradient(&mid)?
            }
            StochasticProblem::NonconvexSine(s) => {
                separable(&|i, v| s.coord_value(i, v), &|i, v| s.coord_grad(i, v))
            }
            StochasticProblem::LogisticSynthetic(_) => {
                let panels = 2000usize;
                let d = x_next.sub(x)?;
                let mut acc = Vector::zeros(self.dim());
                for k in 0..=panels {
                    let s = k as f64 / panels as f64;
                    let w = if k == 0 || k == panels { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                    let g = self.true_gradient(&x.plus_scaled(s, &d)?)?;
                    acc.axpy(w, &g)?;
                }
                acc.scaled(1.0 / (3.0 * panels as f64))
            }
        })
    }
}

/// `x + λ(x_next − x)` for `λ ∈ [0, 1]`.
pub fn segment_point(x: &Vector, x_next: &Vector, lambda: f64) -> Result<Vector> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(GalaError::invalid("lambda", format!("{lambda} not in [0, 1]")));
    }
    let d = x_next.sub(x)?;
    x.plus_scaled(lambda, &d)
}
