#![allow(dead_code)]

use ipsga_core::{schema_map, Distribution, ThemeMap};
use rand::Rng;

pub fn random_distribution<R: Rng>(size: usize, rng: &mut R) -> Distribution {
    let w: Vec<f64> = (0..size).map(|_| rng.random::<f64>() + 1e-3).collect();
    Distribution::from_weights(w).unwrap()
}

/// Every strictly increasing locus list of length 1..=max_order over 1..=length.
pub fn schema_loci(length: u32, max_order: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for bits in 1u32..(1 << length) {
        if bits.count_ones() <= max_order {
            out.push((1..=length).filter(|l| bits >> (l - 1) & 1 == 1).collect());
        }
    }
    out
}

pub fn schema_maps(length: u32, max_order: u32) -> Vec<ThemeMap> {
    schema_loci(length, max_order)
        .iter()
        .map(|loci| schema_map(length, loci).unwrap().theme_map().clone())
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
