//! Transmission functions, the variation operator and the algebra of
//! ambivalence.
//!
//! A [`Transmission`] is an m-parent conditional child distribution
//! `T(x | x₁..x_m)` over a finite set. Most transmission functions are kept
//! as callables; structural bitstring operators (canonical mutation and
//! mask-based crossover) carry their structure so the variation operator and
//! their schema projections can be evaluated without enumerating parent
//! tuples. A dense table is available through [`Transmission::materialize`]
//! when `size^(m+1)` fits the budget.

use std::fmt;
use std::sync::Arc;

use crate::bitstring::kernels;
use crate::distribution::{project_slice, Distribution, ThemeMap, NORMALIZATION_TOL};
use crate::error::{AmbivalenceViolation, Error, Result};
use crate::par;

/// Default cap on dense table entries (`size^(m+1)`).
pub const DEFAULT_DENSE_BUDGET: usize = 1 << 24;

/// Default tolerance for ambivalence and independence certification.
pub const AMBIVALENCE_TOL: f64 = 1e-9;

/// A transmission function over the theme set of some theme map.
pub type ThemeTransmission = Transmission;

type RowFn = dyn Fn(&[usize], &mut [f64]) + Send + Sync;

#[derive(Clone)]
pub(crate) enum Kernel {
    /// One parent, child is a copy of it.
    Clone,
    /// Row-major table: parent tuple (parent 1 most significant) then child.
    Dense(Arc<[f64]>),
    /// Writes the child distribution for a parent tuple into a zeroed row.
    Rows(Arc<RowFn>),
    Mutation {
        length: u32,
        rate: f64,
    },
    Crossover {
        length: u32,
        masks: MaskWeights,
    },
    Composed(Arc<Transmission>, Arc<Transmission>),
    Mixture(Arc<[(f64, Transmission)]>),
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum MaskWeights {
    /// Loci chosen independently; entry i is the probability that locus
    /// i + 1 comes from the second parent.
    Independent(Arc<[f64]>),
    /// Explicit mask distribution, one entry per distinct mask.
    Listed(Arc<[(u64, f64)]>),
}

#[derive(Clone)]
pub struct Transmission {
    size: usize,
    arity: usize,
    pub(crate) kernel: Kernel,
}

impl fmt::Debug for Transmission {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kernel {
            Kernel::Clone => "clone".to_string(),
            Kernel::Dense(_) => "dense".to_string(),
            Kernel::Rows(_) => "callable".to_string(),
            Kernel::Mutation { length, rate } => format!("mutation(length={length}, rate={rate})"),
            Kernel::Crossover { length, masks } => match masks {
                MaskWeights::Independent(q) if q.iter().all(|&v| v == 0.5) => {
                    format!("uniform crossover(length={length})")
                }
                MaskWeights::Independent(_) => {
                    format!("independent-locus crossover(length={length})")
                }
                MaskWeights::Listed(m) => {
                    format!("mask crossover(length={length}, masks={})", m.len())
                }
            },
            Kernel::Composed(a, b) => format!("({a:?}) ∘ ({b:?})"),
            Kernel::Mixture(parts) => format!("mixture of {}", parts.len()),
        };
        f.debug_struct("Transmission")
            .field("size", &self.size)
            .field("arity", &self.arity)
            .field("kind", &kind)
            .finish()
    }
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    base.checked_pow(exp as u32)
        .ok_or_else(|| Error::Capacity(format!("{base}^{exp} overflows")))
}

fn decode_tuple(mut t: usize, size: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = t % size;
        t /= size;
    }
}

impl Transmission {
    pub(crate) fn from_kernel(size: usize, arity: usize, kernel: Kernel) -> Self {
        Transmission {
            size,
            arity,
            kernel,
        }
    }

    /// The one-parent transmission function whose child copies the parent.
    pub fn cloning(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Argument("empty base set".into()));
        }
        Ok(Self::from_kernel(size, 1, Kernel::Clone))
    }

    /// Wraps `prob(child, parents)`.
    ///
    /// When the full table fits [`DEFAULT_DENSE_BUDGET`] every parent tuple is
    /// checked for normalization.
    pub fn from_fn<F>(size: usize, arity: usize, prob: F) -> Result<Self>
    where
        F: Fn(usize, &[usize]) -> f64 + Send + Sync + 'static,
    {
        if size == 0 || arity == 0 {
            return Err(Error::Argument(
                "transmission needs a nonempty base and arity ≥ 1".into(),
            ));
        }
        let rows = move |parents: &[usize], out: &mut [f64]| {
            for (x, v) in out.iter_mut().enumerate() {
                *v = prob(x, parents);
            }
        };
        let t = Self::from_kernel(size, arity, Kernel::Rows(Arc::new(rows)));
        if checked_pow(size, arity + 1)? <= DEFAULT_DENSE_BUDGET {
            t.validate(NORMALIZATION_TOL)?;
        }
        Ok(t)
    }

    /// Builds a transmission function from a dense table laid out as
    /// `table[tuple * size + child]`, where `tuple` encodes the parents with
    /// parent 1 most significant.
    pub fn from_dense(size: usize, arity: usize, table: Vec<f64>) -> Result<Self> {
        if size == 0 || arity == 0 {
            return Err(Error::Argument(
                "transmission needs a nonempty base and arity ≥ 1".into(),
            ));
        }
        let expected = checked_pow(size, arity + 1)?;
        if table.len() != expected {
            return Err(Error::dim(
                "dense transmission table",
                expected,
                table.len(),
            ));
        }
        let t = Self::from_kernel(size, arity, Kernel::Dense(table.into()));
        t.validate(NORMALIZATION_TOL)?;
        Ok(t)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.kernel, Kernel::Dense(_))
    }

    fn check_parents(&self, parents: &[usize]) -> Result<()> {
        if parents.len() != self.arity {
            return Err(Error::dim("parent tuple", self.arity, parents.len()));
        }
        if let Some(&p) = parents.iter().find(|&&p| p >= self.size) {
            return Err(Error::dim("parent index", self.size, p));
        }
        Ok(())
    }

    /// `T(child | parents)`.
    pub fn evaluate(&self, child: usize, parents: &[usize]) -> Result<f64> {
        self.check_parents(parents)?;
        if child >= self.size {
            return Err(Error::dim("child index", self.size, child));
        }
        Ok(match &self.kernel {
            Kernel::Clone => f64::from(u8::from(child == parents[0])),
            Kernel::Dense(table) => table[self.tuple_index(parents) * self.size + child],
            Kernel::Mutation { length, rate } => {
                kernels::mutation_prob(*length, *rate, child, parents[0])
            }
            Kernel::Crossover { masks, .. } => {
                kernels::crossover_prob(masks, child, parents[0], parents[1])
            }
            _ => self.row(parents)?[child],
        })
    }

    /// The child distribution `T(· | parents)`.
    pub fn row(&self, parents: &[usize]) -> Result<Vec<f64>> {
        self.check_parents(parents)?;
        let mut out = vec![0.0; self.size];
        self.row_into(parents, &mut out);
        Ok(out)
    }

    fn tuple_index(&self, parents: &[usize]) -> usize {
        parents.iter().fold(0, |acc, &p| acc * self.size + p)
    }

    /// Writes `T(· | parents)` into `out`, which must be zeroed.
    pub(crate) fn row_into(&self, parents: &[usize], out: &mut [f64]) {
        match &self.kernel {
            Kernel::Clone => out[parents[0]] = 1.0,
            Kernel::Dense(table) => {
                let start = self.tuple_index(parents) * self.size;
                out.copy_from_slice(&table[start..start + self.size]);
            }
            Kernel::Rows(f) => f(parents, out),
            Kernel::Mutation { length, rate } => {
                kernels::mutation_row(*length, *rate, parents[0], out)
            }
            Kernel::Crossover { masks, .. } => {
                kernels::crossover_row(masks, parents[0], parents[1], out)
            }
            Kernel::Composed(outer, inner) => {
                let mut mid = vec![0.0; self.size];
                inner.row_into(parents, &mut mid);
                out.copy_from_slice(&outer.vary(&mid));
            }
            Kernel::Mixture(parts) => {
                let mut buf = vec![0.0; self.size];
                for (w, part) in parts.iter() {
                    buf.iter_mut().for_each(|v| *v = 0.0);
                    part.row_into(parents, &mut buf);
                    for (o, b) in out.iter_mut().zip(&buf) {
                        *o += w * b;
                    }
                }
            }
        }
    }

    /// The variation operator applied to a raw probability vector.
    pub(crate) fn vary(&self, p: &[f64]) -> Vec<f64> {
        match &self.kernel {
            Kernel::Clone => p.to_vec(),
            Kernel::Mutation { length, rate } => kernels::mutation_apply(*length, *rate, p),
            Kernel::Crossover { length, masks } => kernels::crossover_apply(*length, masks, p),
            // With a one-parent outer function the composite variation is the
            // sequential application; otherwise the outer parents share the
            // inner parent tuple and only the generic sum is correct.
            Kernel::Composed(outer, inner) if outer.arity == 1 => outer.vary(&inner.vary(p)),
            Kernel::Mixture(parts) => {
                let mut out = vec![0.0; self.size];
                for (w, part) in parts.iter() {
                    for (o, v) in out.iter_mut().zip(part.vary(p)) {
                        *o += w * v;
                    }
                }
                out
            }
            _ => self.vary_generic(p),
        }
    }

    /// `Σ_{parent tuples} T(· | tuple) Π p(parent)` by direct enumeration.
    pub(crate) fn vary_generic(&self, p: &[f64]) -> Vec<f64> {
        let size = self.size;
        let arity = self.arity;
        let tuples = size.pow(arity as u32);
        par::sum_into(tuples, size, 1, |range, acc| {
            let mut parents = vec![0usize; arity];
            let mut row = vec![0.0; size];
            for t in range {
                decode_tuple(t, size, &mut parents);
                let weight: f64 = parents.iter().map(|&x| p[x]).product();
                if weight == 0.0 {
                    continue;
                }
                row.iter_mut().for_each(|v| *v = 0.0);
                self.row_into(&parents, &mut row);
                for (a, r) in acc.iter_mut().zip(&row) {
                    *a += weight * r;
                }
            }
        })
    }

    /// Dense copy of this transmission function, if `size^(m+1) ≤ budget`.
    pub fn materialize(&self, budget: usize) -> Result<Transmission> {
        if self.is_dense() {
            return Ok(self.clone());
        }
        let entries = checked_pow(self.size, self.arity + 1)?;
        if entries > budget {
            return Err(Error::Capacity(format!(
                "dense table needs {entries} entries, budget is {budget}"
            )));
        }
        let tuples = entries / self.size;
        let rows = par::map_indices(tuples, |t| {
            let mut parents = vec![0usize; self.arity];
            decode_tuple(t, self.size, &mut parents);
            let mut row = vec![0.0; self.size];
            self.row_into(&parents, &mut row);
            row
        });
        Ok(Self::from_kernel(
            self.size,
            self.arity,
            Kernel::Dense(rows.concat().into()),
        ))
    }

    /// Checks that every child row sums to 1 within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let tuples = checked_pow(self.size, self.arity)?;
        let bad = par::map_indices(tuples, |t| {
            let mut parents = vec![0usize; self.arity];
            decode_tuple(t, self.size, &mut parents);
            let mut row = vec![0.0; self.size];
            self.row_into(&parents, &mut row);
            let total: f64 = row.iter().sum();
            let in_range = row
                .iter()
                .all(|v| v.is_finite() && *v >= 0.0 && *v <= 1.0 + tol);
            (!in_range || (total - 1.0).abs() > tol).then_some((parents, total))
        });
        match bad.into_iter().flatten().next() {
            Some((parents, total)) => Err(Error::Argument(format!(
                "child distribution for parents {parents:?} sums to {total}"
            ))),
            None => Ok(()),
        }
    }
}

/// The variation operator `V_T`.
pub fn apply_variation(t: &Transmission, p: &Distribution) -> Result<Distribution> {
    if t.size() != p.len() {
        return Err(Error::dim("variation", t.size(), p.len()));
    }
    Ok(Distribution::from_raw(t.vary(p.as_slice())))
}

/// `T1 ∘ T2`: the m parents of `outer` are drawn independently from
/// `inner(· | y₁..y_n)`. The result has the arity of `inner`.
pub fn compose(outer: &Transmission, inner: &Transmission) -> Result<Transmission> {
    if outer.size() != inner.size() {
        return Err(Error::dim("composition", outer.size(), inner.size()));
    }
    if matches!(outer.kernel, Kernel::Clone) {
        return Ok(inner.clone());
    }
    Ok(Transmission::from_kernel(
        inner.size(),
        inner.arity(),
        Kernel::Composed(Arc::new(outer.clone()), Arc::new(inner.clone())),
    ))
}

/// Pointwise convex combination `Σ w(i) T_i`.
pub fn weighted_sum(weights: &Distribution, parts: &[Transmission]) -> Result<Transmission> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Argument("weighted sum of no transmission functions".into()))?;
    if weights.len() != parts.len() {
        return Err(Error::dim(
            "weighted sum weights",
            parts.len(),
            weights.len(),
        ));
    }
    if weights.is_zero() {
        return Err(Error::Argument("weighted sum weights are all zero".into()));
    }
    for part in parts {
        if part.size() != first.size() {
            return Err(Error::dim("weighted sum base", first.size(), part.size()));
        }
        if part.arity() != first.arity() {
            return Err(Error::dim(
                "weighted sum arity",
                first.arity(),
                part.arity(),
            ));
        }
    }
    let active: Vec<(f64, Transmission)> = weights
        .as_slice()
        .iter()
        .zip(parts)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, t)| (*w, t.clone()))
        .collect();
    if active.len() == 1 {
        return Ok(active[0].1.clone());
    }
    if let Some(merged) = kernels::merge_mask_mixture(&active) {
        return Ok(merged);
    }
    Ok(Transmission::from_kernel(
        first.size(),
        first.arity(),
        Kernel::Mixture(active.into()),
    ))
}

/// Outcome of exhaustive ambivalence certification: the theme transmission
/// table indexed like a dense transmission over the theme set.
fn certify(t: &Transmission, beta: &ThemeMap, tol: f64) -> Result<Vec<f64>> {
    if t.size() != beta.domain_size() {
        return Err(Error::dim("ambivalence", beta.domain_size(), t.size()));
    }
    let k = beta.codomain_size();
    let m = t.arity();
    let size = t.size();
    let theme_tuples = checked_pow(k, m)?;
    let parent_tuples = checked_pow(size, m)?;

    // Reference rows from the first member of each theme class.
    let reference: Vec<f64> = par::map_indices(theme_tuples, |tt| {
        let mut themes = vec![0usize; m];
        decode_tuple(tt, k, &mut themes);
        let parents: Vec<usize> = themes.iter().map(|&th| beta.class(th)[0]).collect();
        let mut row = vec![0.0; size];
        t.row_into(&parents, &mut row);
        project_slice(beta, &row).expect("row length matches the domain")
    })
    .concat();

    let chunk = 256usize;
    let chunks = parent_tuples.div_ceil(chunk);
    let violations = par::map_indices(chunks, |c| {
        let mut parents = vec![0usize; m];
        let mut row = vec![0.0; size];
        for tuple in c * chunk..((c + 1) * chunk).min(parent_tuples) {
            decode_tuple(tuple, size, &mut parents);
            let themes: Vec<usize> = parents.iter().map(|&x| beta.theme_of(x)).collect();
            let tt = themes.iter().fold(0, |acc, &th| acc * k + th);
            row.iter_mut().for_each(|v| *v = 0.0);
            t.row_into(&parents, &mut row);
            let projected = project_slice(beta, &row).expect("row length matches the domain");
            let expected = &reference[tt * k..(tt + 1) * k];
            if let Some(theme) = (0..k).find(|&th| (projected[th] - expected[th]).abs() > tol) {
                return Some(AmbivalenceViolation {
                    theme,
                    first_parents: themes.iter().map(|&th| beta.class(th)[0]).collect(),
                    first_mass: expected[theme],
                    parent_themes: themes,
                    second_parents: parents.clone(),
                    second_mass: projected[theme],
                });
            }
        }
        None
    });
    match violations.into_iter().flatten().next() {
        Some(v) => Err(Error::Ambivalence(Box::new(v))),
        None => Ok(reference),
    }
}

/// Exhaustively checks that the theme-class mass of the child depends only on
/// the parents' themes.
pub fn is_ambivalent(t: &Transmission, beta: &ThemeMap, tol: f64) -> bool {
    match certify(t, beta, tol) {
        Ok(_) => true,
        Err(e) => {
            log::debug!("ambivalence check failed: {e}");
            false
        }
    }
}

/// Extracts the theme transmission function `T^→β` after certifying
/// ambivalence at [`AMBIVALENCE_TOL`].
pub fn theme_transmission(t: &Transmission, beta: &ThemeMap) -> Result<ThemeTransmission> {
    theme_transmission_with_tol(t, beta, AMBIVALENCE_TOL)
}

pub fn theme_transmission_with_tol(
    t: &Transmission,
    beta: &ThemeMap,
    tol: f64,
) -> Result<ThemeTransmission> {
    let table = certify(t, beta, tol)?;
    if beta.is_identity() {
        return Ok(t.clone());
    }
    Ok(Transmission::from_kernel(
        beta.codomain_size(),
        t.arity(),
        Kernel::Dense(table.into()),
    ))
}

fn lex_index(maps: &[ThemeMap], x: usize) -> usize {
    maps.iter()
        .fold(0, |acc, b| acc * b.codomain_size() + b.theme_of(x))
}

/// `β₁ × … × β_n`. Themes are the reachable tuples, numbered in
/// lexicographic order with `β₁` most significant. A product of single-locus
/// schema maps with increasing loci is the schema map on those loci.
pub fn cartesian_product(maps: &[ThemeMap]) -> Result<ThemeMap> {
    let first = maps
        .first()
        .ok_or_else(|| Error::Argument("cartesian product of no theme maps".into()))?;
    let n = first.domain_size();
    if let Some(b) = maps.iter().find(|b| b.domain_size() != n) {
        return Err(Error::dim("cartesian product domain", n, b.domain_size()));
    }
    if maps.len() == 1 {
        return Ok(first.clone());
    }
    let lex: Vec<usize> = (0..n).map(|x| lex_index(maps, x)).collect();
    let mut reachable = lex.clone();
    reachable.sort_unstable();
    reachable.dedup();
    let assignment = lex
        .iter()
        .map(|v| reachable.binary_search(v).expect("value was collected"))
        .collect();
    let product = ThemeMap::new(assignment, reachable.len())?;

    let schemas: Option<Vec<(u32, &[u32])>> = maps.iter().map(ThemeMap::schema).collect();
    if let Some(schemas) = schemas {
        let length = schemas[0].0;
        let loci: Vec<u32> = schemas
            .iter()
            .flat_map(|(_, l)| l.iter().copied())
            .collect();
        if schemas.iter().all(|(l, _)| *l == length) && loci.windows(2).all(|w| w[0] < w[1]) {
            return Ok(product.with_schema(length, loci));
        }
    }
    Ok(product)
}

/// Exhaustive check that the component theme masses of every child
/// distribution are mutually independent.
pub fn are_independent(t: &Transmission, maps: &[ThemeMap], tol: f64) -> bool {
    if maps.is_empty() || maps.iter().any(|b| b.domain_size() != t.size()) {
        return false;
    }
    let joint_size: usize = maps.iter().map(ThemeMap::codomain_size).product();
    let size = t.size();
    let m = t.arity();
    let Ok(tuples) = checked_pow(size, m) else {
        return false;
    };
    let lex: Vec<usize> = (0..size).map(|x| lex_index(maps, x)).collect();
    let failures = par::map_indices(tuples, |tuple| {
        let mut parents = vec![0usize; m];
        decode_tuple(tuple, size, &mut parents);
        let mut row = vec![0.0; size];
        t.row_into(&parents, &mut row);
        let mut joint = vec![0.0; joint_size];
        for (x, &v) in row.iter().enumerate() {
            joint[lex[x]] += v;
        }
        let marginals: Vec<Vec<f64>> = maps
            .iter()
            .map(|b| project_slice(b, &row).expect("row length matches the domain"))
            .collect();
        let mut digits = vec![0usize; maps.len()];
        (0..joint_size).any(|j| {
            let mut rest = j;
            for (d, b) in digits.iter_mut().zip(maps).rev() {
                *d = rest % b.codomain_size();
                rest /= b.codomain_size();
            }
            let product: f64 = digits
                .iter()
                .zip(&marginals)
                .map(|(&d, mg)| mg[d])
                .product();
            (joint[j] - product).abs() > tol
        })
    });
    !failures.into_iter().any(|f| f)
}
