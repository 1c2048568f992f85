//! Seeded random operators, paravectors and imaginary units.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slicecalc_core::{CliffordElement, CliffordMatrix, ImaginaryUnit, MultiIndex, Paravector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All `2^n` components with entries uniform in `(-scale, scale)`.
pub fn operator(r: &mut impl Rng, d: usize, n: usize, scale: f64) -> CliffordMatrix {
    let comps: Vec<_> = (0..1usize << n)
        .map(|m| (MultiIndex::from_mask(m).unwrap(), DMatrix::from_fn(d, d, |_, _| r.gen_range(-scale..scale))))
        .collect();
    CliffordMatrix::from_components(d, n, comps).unwrap()
}

pub fn element(r: &mut impl Rng, n: usize) -> CliffordElement {
    CliffordElement::from_coeffs(n, (0..1usize << n).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
}

pub fn unit(r: &mut impl Rng, n: usize) -> ImaginaryUnit {
    loop {
        let v: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-4 {
            return ImaginaryUnit::normalized(v).unwrap();
        }
    }
}

/// A paravector of the given modulus in a uniformly random direction of `R^{n+1}`.
pub fn paravector_with_modulus(r: &mut impl Rng, n: usize, modulus: f64) -> Paravector {
    loop {
        let x: Vec<f64> = (0..=n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let len = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if len > 1e-3 {
            let k = modulus / len;
            return Paravector::new(x[0] * k, x[1..].iter().map(|c| c * k).collect());
        }
    }
}
