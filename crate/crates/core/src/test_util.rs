//! Seeded random instances for unit tests.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{CliffordElement, ImaginaryUnit, MultiIndex, Paravector};
use crate::matrix::CliffordMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(r: &mut impl Rng, d: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |_, _| r.gen_range(-scale..scale))
}

/// All `2^n` components filled with uniform entries in `(-scale, scale)`.
pub fn random_clifford_matrix(r: &mut impl Rng, d: usize, n: usize, scale: f64) -> CliffordMatrix {
    let comps: Vec<_> = (0..1usize << n)
        .map(|m| (MultiIndex::from_mask(m).unwrap(), random_matrix(r, d, scale)))
        .collect();
    CliffordMatrix::from_components(d, n, comps).unwrap()
}

pub fn random_element(r: &mut impl Rng, n: usize) -> CliffordElement {
    CliffordElement::from_coeffs(n, (0..1usize << n).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
}

pub fn random_paravector(r: &mut impl Rng, n: usize, scale: f64) -> Paravector {
    Paravector::new(r.gen_range(-scale..scale), (0..n).map(|_| r.gen_range(-scale..scale)).collect())
}

pub fn random_unit(r: &mut impl Rng, n: usize) -> ImaginaryUnit {
    ImaginaryUnit::normalized((0..n).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// Paravector of modulus exactly `modulus` with random direction in R^{n+1}.
pub fn paravector_with_modulus(r: &mut impl Rng, n: usize, modulus: f64) -> Paravector {
    let p = random_paravector(r, n, 1.0);
    let k = modulus / p.modulus();
    Paravector::new(p.s0 * k, p.vector.iter().map(|x| x * k).collect())
}
