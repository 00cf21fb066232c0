//! Bitstring genome sets, schema maps, canonical mutation and mask-based
//! crossover.
//!
//! Bit order: locus 1 is the most significant bit of the dense index, so the
//! genome with index 6 in 𝔅₃ renders as `110`. Masks follow the same order;
//! a mask bit of 1 means the child takes that locus from parent 2.

use crate::distribution::{Distribution, ThemeMap};
use crate::error::{Error, Result};
use crate::transmission::{compose, Kernel, MaskWeights, ThemeTransmission, Transmission};

/// Longest genome supported by the dense index representation.
pub const MAX_LENGTH: u32 = 30;

/// Longest genome for which mask distributions are enumerated.
pub const MAX_ENUMERATED_MASK_LENGTH: u32 = 20;

/// Longest genome for which a schema map materializes its assignment table.
pub const MAX_SCHEMA_LENGTH: u32 = 24;

fn check_length(length: u32) -> Result<()> {
    if length == 0 || length > MAX_LENGTH {
        return Err(Error::Argument(format!(
            "bitstring length must be in 1..={MAX_LENGTH}, got {length}"
        )));
    }
    Ok(())
}

/// The set 𝔅_ℓ of all bitstrings of length ℓ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitstringSet {
    length: u32,
}

impl BitstringSet {
    pub fn new(length: u32) -> Result<Self> {
        check_length(length)?;
        Ok(BitstringSet { length })
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn size(&self) -> usize {
        1usize << self.length
    }

    /// Value of the 1-based `locus` of genome `x`.
    pub fn bit(&self, x: usize, locus: u32) -> usize {
        (x >> (self.length - locus)) & 1
    }

    /// Renders a genome with locus 1 leftmost.
    pub fn render(&self, x: usize) -> String {
        (1..=self.length)
            .map(|locus| if self.bit(x, locus) == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn parse(&self, bits: &str) -> Result<usize> {
        if bits.len() != self.length as usize {
            return Err(Error::dim("bitstring", self.length as usize, bits.len()));
        }
        bits.chars().try_fold(0usize, |acc, c| match c {
            '0' => Ok(acc << 1),
            '1' => Ok(acc << 1 | 1),
            other => Err(Error::Argument(format!("'{other}' is not a bit"))),
        })
    }
}

pub(crate) fn extract_bits(x: usize, length: u32, loci: &[u32]) -> usize {
    loci.iter()
        .fold(0, |acc, &locus| acc << 1 | ((x >> (length - locus)) & 1))
}

/// The schema map ξ_I sending a genome to its bits at the defined loci.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaMap {
    length: u32,
    loci: Vec<u32>,
    map: ThemeMap,
}

impl SchemaMap {
    pub fn length(&self) -> u32 {
        self.length
    }

    /// Defined loci, 1-based and strictly increasing.
    pub fn loci(&self) -> &[u32] {
        &self.loci
    }

    pub fn order(&self) -> u32 {
        self.loci.len() as u32
    }

    pub fn theme_map(&self) -> &ThemeMap {
        &self.map
    }

    pub fn theme_of(&self, x: usize) -> usize {
        extract_bits(x, self.length, &self.loci)
    }
}

/// Builds ξ_I for `loci` ⊆ {1..ℓ}, given in increasing order.
pub fn schema_map(length: u32, loci: &[u32]) -> Result<SchemaMap> {
    check_length(length)?;
    if length > MAX_SCHEMA_LENGTH {
        return Err(Error::Capacity(format!(
            "schema map tables are limited to length {MAX_SCHEMA_LENGTH}"
        )));
    }
    if loci.is_empty() {
        return Err(Error::Argument(
            "a schema map needs at least one defined locus".into(),
        ));
    }
    if loci.iter().any(|&l| l == 0 || l > length) {
        return Err(Error::Argument(format!(
            "loci {loci:?} must lie in 1..={length}"
        )));
    }
    if loci.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument(format!(
            "loci {loci:?} must be strictly increasing"
        )));
    }
    let assignment = (0..1usize << length)
        .map(|x| extract_bits(x, length, loci))
        .collect();
    let map = ThemeMap::new(assignment, 1 << loci.len())?.with_schema(length, loci.to_vec());
    Ok(SchemaMap {
        length,
        loci: loci.to_vec(),
        map,
    })
}

/// A crossover mask ψ over ℓ loci.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mask {
    length: u32,
    bits: u64,
}

impl Mask {
    pub fn new(length: u32, bits: u64) -> Result<Self> {
        check_length(length)?;
        if bits >> length != 0 {
            return Err(Error::Argument(format!(
                "mask {bits:#b} is longer than {length} loci"
            )));
        }
        Ok(Mask { length, bits })
    }

    pub fn from_bits(bits: &str) -> Result<Self> {
        let set = BitstringSet::new(bits.len() as u32)?;
        Mask::new(set.length(), set.parse(bits)? as u64)
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// The child of `(first, second)` under this mask.
    pub fn apply(&self, first: usize, second: usize) -> usize {
        kernels::mix(first, second, self.bits)
    }
}

/// Flips every bit independently with probability `rate`.
pub fn canonical_mutation(length: u32, rate: f64) -> Result<Transmission> {
    check_length(length)?;
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Argument(format!(
            "mutation rate {rate} is outside [0,1]"
        )));
    }
    Ok(Transmission::from_kernel(
        1 << length,
        1,
        Kernel::Mutation { length, rate },
    ))
}

/// The deterministic two-parent crossover T_ψ.
pub fn mask_crossover(mask: &Mask) -> Result<Transmission> {
    Ok(Transmission::from_kernel(
        1 << mask.length,
        2,
        Kernel::Crossover {
            length: mask.length,
            masks: MaskWeights::Listed(vec![(mask.bits, 1.0)].into()),
        },
    ))
}

/// `T(x|y,z) = Σ_ψ q(ψ) T_ψ(x|y,z)` for a distribution `q` over all 2^ℓ
/// masks (index = mask bits).
pub fn crossover_from_mask_distribution(length: u32, q: &Distribution) -> Result<Transmission> {
    check_length(length)?;
    if length > MAX_ENUMERATED_MASK_LENGTH {
        return Err(Error::Capacity(format!(
            "mask distributions are enumerated only up to length {MAX_ENUMERATED_MASK_LENGTH}"
        )));
    }
    if q.len() != 1 << length {
        return Err(Error::dim("mask distribution", 1 << length, q.len()));
    }
    if q.is_zero() {
        return Err(Error::Argument(
            "mask distribution is the zero function".into(),
        ));
    }
    let uniform = 1.0 / q.len() as f64;
    let masks = if q.as_slice().iter().all(|&w| (w - uniform).abs() <= 1e-15) {
        MaskWeights::Independent(vec![0.5; length as usize].into())
    } else {
        MaskWeights::Listed(
            q.as_slice()
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(|(m, &w)| (m as u64, w))
                .collect::<Vec<_>>()
                .into(),
        )
    };
    Ok(Transmission::from_kernel(
        1 << length,
        2,
        Kernel::Crossover { length, masks },
    ))
}

/// Uniform crossover: each child locus comes from either parent with
/// probability ½, independently across loci.
pub fn uniform_crossover(length: u32) -> Result<Transmission> {
    check_length(length)?;
    Ok(Transmission::from_kernel(
        1 << length,
        2,
        Kernel::Crossover {
            length,
            masks: MaskWeights::Independent(vec![0.5; length as usize].into()),
        },
    ))
}

/// n-point crossover: cut points are a uniformly chosen n-subset of the ℓ−1
/// gaps between loci, and the child alternates parents at each cut, starting
/// with parent 1 at locus 1.
pub fn n_point_crossover(length: u32, points: u32) -> Result<Transmission> {
    check_length(length)?;
    if points >= length {
        return Err(Error::Argument(format!(
            "{points}-point crossover needs more than {points} loci, got {length}"
        )));
    }
    let mut cut_sets = Vec::new();
    let mut current = Vec::with_capacity(points as usize);
    gap_subsets(1, length, points as usize, &mut current, &mut cut_sets);
    let weight = 1.0 / cut_sets.len() as f64;
    let masks: Vec<(u64, f64)> = cut_sets
        .iter()
        .map(|cuts| {
            let mut bits = 0u64;
            let mut from_second = false;
            let mut next_cut = cuts.iter().peekable();
            for locus in 1..=length {
                bits = bits << 1 | u64::from(from_second);
                if next_cut.peek() == Some(&&locus) {
                    next_cut.next();
                    from_second = !from_second;
                }
            }
            (bits, weight)
        })
        .collect();
    Ok(Transmission::from_kernel(
        1 << length,
        2,
        Kernel::Crossover {
            length,
            masks: MaskWeights::Listed(masks.into()),
        },
    ))
}

/// All `k`-subsets of gaps `from..length` (gap g sits after locus g).
fn gap_subsets(from: u32, length: u32, k: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    for gap in from..length {
        current.push(gap);
        gap_subsets(gap + 1, length, k, current, out);
        current.pop();
    }
}

/// Closed-form projection of canonical mutation onto any schema map of
/// order `order`: the product of per-locus 2×2 flip matrices.
pub fn projected_mutation(rate: f64, order: u32) -> Result<ThemeTransmission> {
    canonical_mutation(order, rate)
}

/// Closed-form projection of uniform crossover onto any schema map of order
/// `order`: at each defined locus the child copies either parent's bit with
/// probability ½.
pub fn projected_uniform_crossover(order: u32) -> Result<ThemeTransmission> {
    uniform_crossover(order)
}

/// Theme transmission of a structural bitstring operator under a schema
/// map, computed from the operator's structure rather than by enumeration.
///
/// Returns `None` when `beta` is not a schema map or `t` has no bitstring
/// structure (callables and dense tables).
pub fn schema_projection(t: &Transmission, beta: &ThemeMap) -> Option<Result<ThemeTransmission>> {
    let (length, loci) = beta.schema()?;
    let order = loci.len() as u32;
    let size = 1usize << order;
    let check = |own: u32| {
        if own == length {
            Ok(())
        } else {
            Err(Error::dim(
                "schema projection length",
                length as usize,
                own as usize,
            ))
        }
    };
    match &t.kernel {
        Kernel::Clone => Some(Transmission::cloning(size)),
        Kernel::Mutation { length: own, rate } => {
            Some(check(*own).and_then(|_| projected_mutation(*rate, order)))
        }
        Kernel::Crossover { length: own, masks } => Some(check(*own).map(|_| {
            let projected = match masks {
                MaskWeights::Independent(u) => MaskWeights::Independent(
                    loci.iter()
                        .map(|&l| u[(l - 1) as usize])
                        .collect::<Vec<_>>()
                        .into(),
                ),
                MaskWeights::Listed(list) => {
                    let mut merged = vec![0.0; size];
                    for &(m, w) in list.iter() {
                        merged[extract_bits(m as usize, length, loci)] += w;
                    }
                    MaskWeights::Listed(
                        merged
                            .into_iter()
                            .enumerate()
                            .filter(|(_, w)| *w > 0.0)
                            .map(|(m, w)| (m as u64, w))
                            .collect::<Vec<_>>()
                            .into(),
                    )
                }
            };
            Transmission::from_kernel(
                size,
                2,
                Kernel::Crossover {
                    length: order,
                    masks: projected,
                },
            )
        })),
        Kernel::Composed(outer, inner) => {
            let outer = schema_projection(outer, beta)?;
            let inner = schema_projection(inner, beta)?;
            Some(outer.and_then(|o| inner.and_then(|i| compose(&o, &i))))
        }
        Kernel::Mixture(parts) => {
            let mut projected = Vec::with_capacity(parts.len());
            for (w, part) in parts.iter() {
                match schema_projection(part, beta)? {
                    Ok(p) => projected.push((*w, p)),
                    Err(e) => return Some(Err(e)),
                }
            }
            Some(Ok(Transmission::from_kernel(
                size,
                t.arity(),
                Kernel::Mixture(projected.into()),
            )))
        }
        Kernel::Dense(_) | Kernel::Rows(_) => None,
    }
}

/// Row and variation kernels for the structural operators.
pub(crate) mod kernels {
    use super::*;
    use crate::par;

    #[inline]
    pub(crate) fn mix(first: usize, second: usize, mask: u64) -> usize {
        let mask = mask as usize;
        (first & !mask) | (second & mask)
    }

    pub(crate) fn mutation_prob(length: u32, rate: f64, x: usize, y: usize) -> f64 {
        let flips = (x ^ y).count_ones() as i32;
        rate.powi(flips) * (1.0 - rate).powi(length as i32 - flips)
    }

    pub(crate) fn mutation_row(length: u32, rate: f64, y: usize, out: &mut [f64]) {
        let powers: Vec<f64> = (0..=length)
            .map(|d| rate.powi(d as i32) * (1.0 - rate).powi((length - d) as i32))
            .collect();
        for (x, v) in out.iter_mut().enumerate() {
            *v = powers[(x ^ y).count_ones() as usize];
        }
    }

    /// One pass per locus: mass moves to the flipped partner with
    /// probability `rate`.
    pub(crate) fn mutation_apply(length: u32, rate: f64, p: &[f64]) -> Vec<f64> {
        let mut out = p.to_vec();
        for bit in 0..length {
            let step = 1usize << bit;
            for x in 0..out.len() {
                if x & step == 0 {
                    let (a, b) = (out[x], out[x | step]);
                    out[x] = (1.0 - rate) * a + rate * b;
                    out[x | step] = rate * a + (1.0 - rate) * b;
                }
            }
        }
        out
    }

    /// Probability of mask bits `mask` under per-locus swap probabilities.
    fn independent_weight(u: &[f64], mask: u64) -> f64 {
        let length = u.len() as u32;
        u.iter()
            .enumerate()
            .map(|(i, &ui)| {
                if (mask >> (length - 1 - i as u32)) & 1 == 1 {
                    ui
                } else {
                    1.0 - ui
                }
            })
            .product()
    }

    pub(crate) fn crossover_prob(masks: &MaskWeights, x: usize, y: usize, z: usize) -> f64 {
        match masks {
            MaskWeights::Independent(u) => {
                if (x ^ y) & (x ^ z) != 0 {
                    return 0.0;
                }
                let length = u.len() as u32;
                let diff = y ^ z;
                u.iter()
                    .enumerate()
                    .filter(|(i, _)| (diff >> (length - 1 - *i as u32)) & 1 == 1)
                    .map(|(i, &ui)| {
                        let bit = length - 1 - i as u32;
                        if (x >> bit) & 1 == (z >> bit) & 1 {
                            ui
                        } else {
                            1.0 - ui
                        }
                    })
                    .product()
            }
            MaskWeights::Listed(list) => list
                .iter()
                .filter(|(m, _)| mix(y, z, *m) == x)
                .map(|(_, w)| w)
                .sum(),
        }
    }

    pub(crate) fn crossover_row(masks: &MaskWeights, y: usize, z: usize, out: &mut [f64]) {
        match masks {
            MaskWeights::Independent(_) => {
                // Children differ from y only where the parents differ.
                let diff = y ^ z;
                let base = y & !diff;
                let mut sub = diff;
                loop {
                    let child = base | sub;
                    out[child] = crossover_prob(masks, child, y, z);
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & diff;
                }
            }
            MaskWeights::Listed(list) => {
                for &(m, w) in list.iter() {
                    out[mix(y, z, m)] += w;
                }
            }
        }
    }

    /// Variation under mask crossover with independent parents: for each mask
    /// the child is the product of parent 1's marginal on the loci it
    /// supplies and parent 2's marginal on the rest.
    pub(crate) fn crossover_apply(length: u32, masks: &MaskWeights, p: &[f64]) -> Vec<f64> {
        let size = p.len();
        let count = match masks {
            MaskWeights::Independent(_) => 1usize << length,
            MaskWeights::Listed(list) => list.len(),
        };
        let weight_of = |i: usize| match masks {
            MaskWeights::Independent(u) => (i as u64, independent_weight(u, i as u64)),
            MaskWeights::Listed(list) => list[i],
        };
        par::sum_into(count, size, 4, |range, acc| {
            let mut from_first = vec![0.0; size];
            let mut from_second = vec![0.0; size];
            for i in range {
                let (mask, w) = weight_of(i);
                if w == 0.0 {
                    continue;
                }
                let second_loci = mask as usize;
                let first_loci = !second_loci & (size - 1);
                from_first.iter_mut().for_each(|v| *v = 0.0);
                from_second.iter_mut().for_each(|v| *v = 0.0);
                for (x, &px) in p.iter().enumerate() {
                    from_first[x & first_loci] += px;
                    from_second[x & second_loci] += px;
                }
                for (x, a) in acc.iter_mut().enumerate() {
                    *a += w * from_first[x & first_loci] * from_second[x & second_loci];
                }
            }
        })
    }

    /// Collapses a weighted sum of crossovers over the same genome length into
    /// one listed mask distribution.
    pub(crate) fn merge_mask_mixture(parts: &[(f64, Transmission)]) -> Option<Transmission> {
        let mut length = None;
        for (_, t) in parts {
            match &t.kernel {
                Kernel::Crossover { length: l, .. } if length.is_none_or(|x| x == *l) => {
                    length = Some(*l)
                }
                _ => return None,
            }
        }
        let length = length?;
        if length > MAX_ENUMERATED_MASK_LENGTH {
            return None;
        }
        let mut merged = vec![0.0; 1 << length];
        for (w, t) in parts {
            if let Kernel::Crossover { masks, .. } = &t.kernel {
                match masks {
                    MaskWeights::Independent(u) => {
                        for (m, slot) in merged.iter_mut().enumerate() {
                            *slot += w * independent_weight(u, m as u64);
                        }
                    }
                    MaskWeights::Listed(list) => {
                        for &(m, mw) in list.iter() {
                            merged[m as usize] += w * mw;
                        }
                    }
                }
            }
        }
        let list: Vec<(u64, f64)> = merged
            .into_iter()
            .enumerate()
            .filter(|(_, w)| *w > 0.0)
            .map(|(m, w)| (m as u64, w))
            .collect();
        Some(Transmission::from_kernel(
            1 << length,
            2,
            Kernel::Crossover {
                length,
                masks: MaskWeights::Listed(list.into()),
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transmission::{is_ambivalent, theme_transmission, AMBIVALENCE_TOL};
    use approx::assert_abs_diff_eq;

    #[test]
    fn schema_map_examples() {
        let full = schema_map(3, &[1, 2, 3]).unwrap();
        assert!(full.theme_map().is_identity());

        let b3 = BitstringSet::new(3).unwrap();
        let first = schema_map(3, &[1]).unwrap();
        assert_eq!(first.theme_of(b3.parse("110").unwrap()), 1);

        let b5 = BitstringSet::new(5).unwrap();
        let xi = schema_map(5, &[1, 3]).unwrap();
        let theme = xi.theme_of(b5.parse("10110").unwrap());
        assert_eq!(BitstringSet::new(2).unwrap().render(theme), "11");
        assert_eq!(xi.theme_map().theme_of(b5.parse("10110").unwrap()), theme);
    }

    #[test]
    fn schema_map_rejects_bad_loci() {
        assert!(schema_map(3, &[]).is_err());
        assert!(schema_map(3, &[0]).is_err());
        assert!(schema_map(3, &[4]).is_err());
        assert!(schema_map(3, &[2, 1]).is_err());
        assert!(schema_map(3, &[2, 2]).is_err());
    }

    #[test]
    fn uniform_projects_to_uniform() {
        let xi = schema_map(6, &[2, 5]).unwrap();
        let q = crate::project(xi.theme_map(), &Distribution::uniform(64).unwrap()).unwrap();
        for v in q.as_slice() {
            assert_abs_diff_eq!(*v, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn render_and_parse_agree() {
        let b = BitstringSet::new(4).unwrap();
        for x in 0..16 {
            assert_eq!(b.parse(&b.render(x)).unwrap(), x);
        }
        assert_eq!(b.render(0b1000), "1000");
        assert!(b.parse("10").is_err());
        assert!(b.parse("10a1").is_err());
    }

    #[test]
    fn mutation_examples() {
        let clone = canonical_mutation(3, 0.0).unwrap();
        for y in 0..8 {
            let row = clone.row(&[y]).unwrap();
            assert!(row
                .iter()
                .enumerate()
                .all(|(x, &v)| v == f64::from(u8::from(x == y))));
        }
        let m = canonical_mutation(2, 0.1).unwrap();
        assert_abs_diff_eq!(m.evaluate(0b00, &[0b00]).unwrap(), 0.81, epsilon = 1e-15);
        assert_abs_diff_eq!(m.evaluate(0b11, &[0b00]).unwrap(), 0.01, epsilon = 1e-15);
        assert!(canonical_mutation(2, 1.5).is_err());
        assert!(canonical_mutation(2, -0.1).is_err());
    }

    #[test]
    fn single_locus_mutation_projection_is_flip_matrix() {
        let alpha = 0.07;
        let m = canonical_mutation(4, alpha).unwrap();
        for locus in 1..=4 {
            let xi = schema_map(4, &[locus]).unwrap();
            let theme = theme_transmission(&m, xi.theme_map()).unwrap();
            for (k, l, expect) in [
                (0, 0, 1.0 - alpha),
                (1, 0, alpha),
                (0, 1, alpha),
                (1, 1, 1.0 - alpha),
            ] {
                assert_abs_diff_eq!(theme.evaluate(k, &[l]).unwrap(), expect, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn mask_crossover_examples() {
        let zero = mask_crossover(&Mask::from_bits("000").unwrap()).unwrap();
        for (y, z) in [(0, 7), (5, 2), (3, 3)] {
            assert_eq!(zero.evaluate(y, &[y, z]).unwrap(), 1.0);
        }
        let t = mask_crossover(&Mask::from_bits("011").unwrap()).unwrap();
        let row = t.row(&[0b000, 0b111]).unwrap();
        assert_eq!(row[0b011], 1.0);
        assert_eq!(row.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn mask_crossover_single_locus_theme_transmission() {
        let psi = Mask::from_bits("0110").unwrap();
        let t = mask_crossover(&psi).unwrap();
        for locus in 1..=4u32 {
            let xi = schema_map(4, &[locus]).unwrap();
            let theme = theme_transmission(&t, xi.theme_map()).unwrap();
            let from_second = (psi.bits() >> (4 - locus)) & 1 == 1;
            for k in 0..2 {
                for l in 0..2 {
                    for m in 0..2 {
                        let picked = if from_second { m } else { l };
                        let expect = f64::from(u8::from(k == picked));
                        assert_eq!(theme.evaluate(k, &[l, m]).unwrap(), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn point_mass_mask_distribution_clones_first_parent() {
        let q = Distribution::point(8, 0).unwrap();
        let t = crossover_from_mask_distribution(3, &q).unwrap();
        for y in 0..8 {
            for z in 0..8 {
                assert_eq!(t.evaluate(y, &[y, z]).unwrap(), 1.0);
            }
        }
        assert!(crossover_from_mask_distribution(3, &Distribution::uniform(4).unwrap()).is_err());
    }

    #[test]
    fn uniform_crossover_matches_enumerated_masks() {
        let structural = uniform_crossover(4).unwrap();
        let masks: Vec<(u64, f64)> = (0..16).map(|m| (m, 0.0625)).collect();
        let enumerated = Transmission::from_kernel(
            16,
            2,
            Kernel::Crossover {
                length: 4,
                masks: MaskWeights::Listed(masks.into()),
            },
        );
        assert!(matches!(
            enumerated.kernel,
            Kernel::Crossover {
                masks: MaskWeights::Listed(_),
                ..
            }
        ));
        for y in 0..16 {
            for z in 0..16 {
                let a = structural.row(&[y, z]).unwrap();
                let b = enumerated.row(&[y, z]).unwrap();
                for (u, v) in a.iter().zip(&b) {
                    assert_abs_diff_eq!(u, v, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn uniform_crossover_single_locus_projection() {
        let t = uniform_crossover(5).unwrap();
        let xi = schema_map(5, &[3]).unwrap();
        let theme = theme_transmission(&t, xi.theme_map()).unwrap();
        for l in 0..2 {
            for m in 0..2 {
                for k in 0..2 {
                    let expect = if l == m {
                        f64::from(u8::from(k == l))
                    } else {
                        0.5
                    };
                    assert_abs_diff_eq!(
                        theme.evaluate(k, &[l, m]).unwrap(),
                        expect,
                        epsilon = 1e-15
                    );
                }
            }
        }
    }

    #[test]
    fn n_point_masks_alternate() {
        let one = n_point_crossover(4, 1).unwrap();
        let Kernel::Crossover {
            masks: MaskWeights::Listed(list),
            ..
        } = &one.kernel
        else {
            panic!("n-point crossover lists its masks");
        };
        let mut masks: Vec<u64> = list.iter().map(|(m, _)| *m).collect();
        masks.sort_unstable();
        assert_eq!(masks, vec![0b0001, 0b0011, 0b0111]);
        assert!(list.iter().all(|(_, w)| (*w - 1.0 / 3.0).abs() < 1e-15));

        let two = n_point_crossover(4, 2).unwrap();
        let Kernel::Crossover {
            masks: MaskWeights::Listed(list),
            ..
        } = &two.kernel
        else {
            panic!("n-point crossover lists its masks");
        };
        let mut masks: Vec<u64> = list.iter().map(|(m, _)| *m).collect();
        masks.sort_unstable();
        assert_eq!(masks, vec![0b0010, 0b0100, 0b0110]);

        assert!(n_point_crossover(3, 3).is_err());
        let zero = n_point_crossover(3, 0).unwrap();
        assert_eq!(zero.evaluate(5, &[5, 2]).unwrap(), 1.0);
    }

    #[test]
    fn projected_operator_examples() {
        let m = projected_mutation(0.1, 2).unwrap();
        assert_abs_diff_eq!(m.evaluate(0b00, &[0b11]).unwrap(), 0.01, epsilon = 1e-15);
        let c = projected_uniform_crossover(2).unwrap();
        let row = c.row(&[0b00, 0b11]).unwrap();
        assert_eq!(row, vec![0.25; 4]);
        let c1 = projected_uniform_crossover(1).unwrap();
        assert_eq!(c1.row(&[1, 1]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn structural_operators_are_ambivalent_under_schema_maps() {
        let ops = [
            canonical_mutation(4, 0.2).unwrap(),
            uniform_crossover(4).unwrap(),
            n_point_crossover(4, 2).unwrap(),
        ];
        for loci in [&[1u32][..], &[2, 4], &[1, 3, 4]] {
            let xi = schema_map(4, loci).unwrap();
            for op in &ops {
                assert!(
                    is_ambivalent(op, xi.theme_map(), AMBIVALENCE_TOL),
                    "{op:?} {loci:?}"
                );
            }
        }
    }

    #[test]
    fn schema_projection_needs_structure() {
        let xi = schema_map(3, &[1, 3]).unwrap();
        let dense = uniform_crossover(3).unwrap().materialize(1 << 20).unwrap();
        assert!(schema_projection(&dense, xi.theme_map()).is_none());
        let plain = ThemeMap::new(vec![0, 1, 0, 1, 0, 1, 0, 1], 2).unwrap();
        assert!(schema_projection(&uniform_crossover(3).unwrap(), &plain).is_none());
        let wrong_length = uniform_crossover(4).unwrap();
        assert!(matches!(
            schema_projection(&wrong_length, xi.theme_map()),
            Some(Err(Error::Dimension { .. }))
        ));
    }
}
