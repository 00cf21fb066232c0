//! Distributions over finite index sets and the operators that act on them.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Tolerance on `|Σ p − 1|` accepted when a distribution is constructed.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A finite set whose elements are addressed by dense indices `0..size`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedSet {
    size: usize,
    labels: Option<Arc<[String]>>,
}

impl IndexedSet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Argument(
                "an indexed set needs at least one element".into(),
            ));
        }
        Ok(IndexedSet { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut set = IndexedSet::new(labels.len())?;
        set.labels = Some(labels.into());
        Ok(set)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels
            .as_ref()
            .and_then(|l| l.get(index))
            .map(String::as_str)
    }

    pub(crate) fn anonymous(size: usize) -> Self {
        debug_assert!(size > 0);
        IndexedSet { size, labels: None }
    }
}

/// A probability vector over an [`IndexedSet`], or the zero function.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    base: IndexedSet,
    mass: Vec<f64>,
}

impl Distribution {
    /// Validates and wraps a probability vector.
    ///
    /// Entries must lie in `[0, 1]` and sum to 1 within [`NORMALIZATION_TOL`],
    /// unless every entry is exactly zero.
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        let base = IndexedSet::new(mass.len())?;
        Self::over(base, mass)
    }

    pub fn over(base: IndexedSet, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != base.size() {
            return Err(Error::dim("distribution", base.size(), mass.len()));
        }
        if let Some((i, v)) = mass
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0 || **v > 1.0 + NORMALIZATION_TOL)
        {
            return Err(Error::Argument(format!(
                "probability {v} at index {i} is outside [0,1]"
            )));
        }
        let total: f64 = mass.iter().sum();
        let all_zero = mass.iter().all(|&v| v == 0.0);
        if !all_zero && (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Argument(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Distribution { base, mass })
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Argument(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Argument("weights sum to zero".into()));
        }
        let base = IndexedSet::new(weights.len())?;
        Ok(Distribution {
            base,
            mass: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        let base = IndexedSet::new(size)?;
        Ok(Distribution {
            base,
            mass: vec![1.0 / size as f64; size],
        })
    }

    pub fn point(size: usize, index: usize) -> Result<Self> {
        let base = IndexedSet::new(size)?;
        if index >= size {
            return Err(Error::dim("point mass index", size, index));
        }
        let mut mass = vec![0.0; size];
        mass[index] = 1.0;
        Ok(Distribution { base, mass })
    }

    /// The zero function over a set of `size` elements.
    pub fn zero(size: usize) -> Result<Self> {
        let base = IndexedSet::new(size)?;
        Ok(Distribution {
            base,
            mass: vec![0.0; size],
        })
    }

    /// Wraps operator output without validation.
    pub(crate) fn from_raw(mass: Vec<f64>) -> Self {
        Distribution {
            base: IndexedSet::anonymous(mass.len()),
            mass,
        }
    }

    pub fn base(&self) -> &IndexedSet {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.mass
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.mass
    }

    pub fn get(&self, index: usize) -> f64 {
        self.mass[index]
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.mass.iter().all(|&v| v == 0.0)
    }

    /// Rescales so the entries sum to 1 when the drift exceeds `threshold`.
    /// Returns the renormalized distribution and the applied correction
    /// `|Σ − 1|` (zero when nothing was done).
    pub fn renormalized(mut self, threshold: f64) -> (Self, f64) {
        let total = self.total();
        let drift = (total - 1.0).abs();
        if drift > threshold && total > 0.0 {
            self.mass.iter_mut().for_each(|v| *v /= total);
            (self, drift)
        } else {
            (self, 0.0)
        }
    }
}

/// A nonnegative fitness value per element of an [`IndexedSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessFunction {
    base: IndexedSet,
    values: Vec<f64>,
}

impl FitnessFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::Argument(format!(
                "fitness {v} at index {i} is negative or non-finite"
            )));
        }
        let base = IndexedSet::new(values.len())?;
        Ok(FitnessFunction { base, values })
    }

    pub fn constant(size: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; size])
    }

    /// `f(x) = theme_fitness(β(x))`: a fitness that is constant on every
    /// theme class.
    pub fn pullback(beta: &ThemeMap, theme_fitness: &FitnessFunction) -> Result<Self> {
        if theme_fitness.len() != beta.codomain_size() {
            return Err(Error::dim(
                "theme fitness",
                beta.codomain_size(),
                theme_fitness.len(),
            ));
        }
        Self::new(
            beta.assignment()
                .iter()
                .map(|&k| theme_fitness.values[k])
                .collect(),
        )
    }

    pub fn base(&self) -> &IndexedSet {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }
}

/// A surjective map from a domain index set onto a theme set.
#[derive(Debug, Clone)]
pub struct ThemeMap {
    domain: IndexedSet,
    codomain: IndexedSet,
    assignment: Arc<[usize]>,
    classes: Arc<[Vec<usize>]>,
    /// Set when the map is a schema map over bitstrings: the genome length
    /// and the 1-based defined loci.
    schema: Option<(u32, Arc<[u32]>)>,
}

impl PartialEq for ThemeMap {
    fn eq(&self, other: &Self) -> bool {
        self.codomain.size() == other.codomain.size() && self.assignment == other.assignment
    }
}

impl ThemeMap {
    /// Builds a theme map from `assignment[x] = theme of x`.
    pub fn new(assignment: Vec<usize>, codomain_size: usize) -> Result<Self> {
        let domain = IndexedSet::new(assignment.len())?;
        let codomain = IndexedSet::new(codomain_size)?;
        let mut classes = vec![Vec::new(); codomain_size];
        for (x, &k) in assignment.iter().enumerate() {
            if k >= codomain_size {
                return Err(Error::Argument(format!(
                    "element {x} is assigned theme {k}, outside a theme set of size {codomain_size}"
                )));
            }
            classes[k].push(x);
        }
        if let Some(k) = classes.iter().position(Vec::is_empty) {
            return Err(Error::Argument(format!(
                "theme {k} has an empty theme class"
            )));
        }
        Ok(ThemeMap {
            domain,
            codomain,
            assignment: assignment.into(),
            classes: classes.into(),
            schema: None,
        })
    }

    pub fn identity(size: usize) -> Result<Self> {
        Self::new((0..size).collect(), size)
    }

    pub(crate) fn with_schema(mut self, length: u32, loci: Vec<u32>) -> Self {
        self.schema = Some((length, loci.into()));
        self
    }

    pub(crate) fn schema(&self) -> Option<(u32, &[u32])> {
        self.schema.as_ref().map(|(l, loci)| (*l, &loci[..]))
    }

    pub fn domain(&self) -> &IndexedSet {
        &self.domain
    }

    pub fn codomain(&self) -> &IndexedSet {
        &self.codomain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.size()
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain.size()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn theme_of(&self, x: usize) -> usize {
        self.assignment[x]
    }

    /// The theme class `⟨k⟩`, in increasing index order.
    pub fn class(&self, k: usize) -> &[usize] {
        &self.classes[k]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn is_identity(&self) -> bool {
        self.codomain_size() == self.domain_size()
            && self.assignment.iter().enumerate().all(|(x, &k)| x == k)
    }
}

/// `Σ f(x) p(x)`.
pub fn expectation(f: &FitnessFunction, p: &Distribution) -> Result<f64> {
    if f.len() != p.len() {
        return Err(Error::dim("expectation", f.len(), p.len()));
    }
    Ok(f.values.iter().zip(&p.mass).map(|(a, b)| a * b).sum())
}

/// Fitness-proportional selection: `q(x) = f(x) p(x) / E_f(p)`.
pub fn select(f: &FitnessFunction, p: &Distribution) -> Result<Distribution> {
    let mean = expectation(f, p)?;
    if mean <= 0.0 {
        return Err(Error::DegenerateSelection { generation: None });
    }
    Ok(Distribution::from_raw(
        f.values
            .iter()
            .zip(&p.mass)
            .map(|(fx, px)| fx * px / mean)
            .collect(),
    ))
}

/// Pushes `p` forward through `β`: `q(k) = Σ_{x ∈ ⟨k⟩} p(x)`.
pub fn project(beta: &ThemeMap, p: &Distribution) -> Result<Distribution> {
    Ok(Distribution::from_raw(project_slice(beta, p.as_slice())?))
}

pub(crate) fn project_slice(beta: &ThemeMap, p: &[f64]) -> Result<Vec<f64>> {
    if p.len() != beta.domain_size() {
        return Err(Error::dim("projection", beta.domain_size(), p.len()));
    }
    let mut out = vec![0.0; beta.codomain_size()];
    for (&k, &v) in beta.assignment.iter().zip(p) {
        out[k] += v;
    }
    Ok(out)
}

/// `p` conditioned on the theme class of `k`; the zero function when that
/// class carries no mass.
pub fn theme_conditional(beta: &ThemeMap, p: &Distribution, k: usize) -> Result<Distribution> {
    if p.len() != beta.domain_size() {
        return Err(Error::dim("theme conditional", beta.domain_size(), p.len()));
    }
    if k >= beta.codomain_size() {
        return Err(Error::dim("theme index", beta.codomain_size(), k));
    }
    let class = beta.class(k);
    let class_mass: f64 = class.iter().map(|&x| p.mass[x]).sum();
    let mut out = vec![0.0; p.len()];
    if class_mass > 0.0 {
        for &x in class {
            out[x] = p.mass[x] / class_mass;
        }
    }
    Ok(Distribution::from_raw(out))
}

/// `Σ |a(x) − b(x)|`.
pub fn manhattan(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::dim("manhattan distance", a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}
