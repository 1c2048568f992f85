//! Arithmetic of the real Clifford algebra R_{0,n}.
//!
//! Generators `e_1, ..., e_n` anticommute and square to `-1`. A blade `e_A` is
//! addressed by a bitmask ([`MultiIndex`]) where bit `j - 1` stands for `e_j`,
//! and a [`CliffordElement`] stores its `2^n` coefficients indexed by mask.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
// Float supplies libm-backed methods when built without std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Largest supported number of generators (4096 blades).
pub const MAX_GENERATORS: usize = 12;

/// Default tolerance of [`CliffordElement::is_imaginary_unit`], relative to the norm.
pub const IMAGINARY_UNIT_TOL: f64 = 1e-10;

/// Ordered subset of `{1, ..., n}` naming the blade `e_{l_1} e_{l_2} ... e_{l_r}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(u16);

impl MultiIndex {
    /// The empty index, i.e. the unit blade `e_∅ = 1`.
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub fn from_mask(mask: usize) -> Result<Self> {
        if mask >> MAX_GENERATORS != 0 {
            return Err(Error::IndexOutOfRange {
                index: usize::BITS as usize - mask.leading_zeros() as usize,
                n: MAX_GENERATORS,
            });
        }
        Ok(MultiIndex(mask as u16))
    }

    /// Builds an index from strictly increasing generator numbers in `1..=n`.
    pub fn from_indices(indices: &[usize], n: usize) -> Result<Self> {
        let mut mask = 0usize;
        let mut last = 0usize;
        for &j in indices {
            if j == 0 || j > n || j > MAX_GENERATORS {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            if j <= last {
                return Err(Error::InvalidArgument(format!(
                    "multi-index {indices:?} is not strictly increasing"
                )));
            }
            last = j;
            mask |= 1 << (j - 1);
        }
        Ok(MultiIndex(mask as u16))
    }

    /// The single generator `e_j`.
    pub fn generator(j: usize, n: usize) -> Result<Self> {
        Self::from_indices(&[j], n)
    }

    pub fn mask(self) -> usize {
        self.0 as usize
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Generator numbers in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..MAX_GENERATORS).filter(move |b| self.0 >> b & 1 == 1).map(|b| b + 1)
    }

    /// Largest generator number used, 0 for the empty index.
    pub fn max_index(self) -> usize {
        16 - self.0.leading_zeros() as usize
    }

    pub fn check(self, n: usize) -> Result<()> {
        match self.max_index() {
            m if m > n => Err(Error::IndexOutOfRange { index: m, n }),
            _ => Ok(()),
        }
    }
}

/// Sign of `e_A e_B` relative to `e_{A Δ B}` for masks `a`, `b`.
#[inline]
pub(crate) fn blade_sign(a: usize, b: usize) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    let contractions = (a & b).count_ones();
    if (swaps + contractions).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `e_A e_B = sign · e_C` with `C` the symmetric difference of `A` and `B`.
pub fn blade_product(a: MultiIndex, b: MultiIndex, n: usize) -> Result<(f64, MultiIndex)> {
    a.check(n)?;
    b.check(n)?;
    Ok((blade_sign(a.mask(), b.mask()), MultiIndex(a.0 ^ b.0)))
}

/// Sign picked up by a grade-`g` blade under Clifford conjugation.
#[inline]
pub(crate) fn conj_sign(grade: usize) -> f64 {
    match grade % 4 {
        0 | 3 => 1.0,
        _ => -1.0,
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_GENERATORS {
        Err(Error::TooManyGenerators(n))
    } else {
        Ok(())
    }
}

/// An element `Σ_A x_A e_A` of R_{0,n}.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    n: usize,
    coeffs: Vec<f64>,
}

impl CliffordElement {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_GENERATORS, "n = {n} exceeds {MAX_GENERATORS}");
        CliffordElement { n, coeffs: vec![0.0; 1 << n] }
    }

    pub fn scalar(n: usize, x: f64) -> Self {
        let mut out = Self::zero(n);
        out.coeffs[0] = x;
        out
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    /// `x · e_A`.
    pub fn blade(n: usize, index: MultiIndex, x: f64) -> Result<Self> {
        check_n(n)?;
        index.check(n)?;
        let mut out = Self::zero(n);
        out.coeffs[index.mask()] = x;
        Ok(out)
    }

    pub fn generator(n: usize, j: usize) -> Result<Self> {
        Self::blade(n, MultiIndex::generator(j, n)?, 1.0)
    }

    /// Takes coefficients indexed by blade mask; the length must be `2^n`.
    pub fn from_coeffs(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients for n = {n}, got {}",
                1usize << n,
                coeffs.len()
            )));
        }
        Ok(CliffordElement { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, index: MultiIndex) -> f64 {
        self.coeffs.get(index.mask()).copied().unwrap_or(0.0)
    }

    pub fn set_coeff(&mut self, index: MultiIndex, x: f64) -> Result<()> {
        index.check(self.n)?;
        self.coeffs[index.mask()] = x;
        Ok(())
    }

    /// `[a]_0`.
    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// Non-zero terms as `(blade, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(m, c)| (MultiIndex(m as u16), *c))
    }

    /// Geometric product; fails when the two elements live in different algebras.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "Clifford product of n = {} and n = {}",
                self.n, other.n
            )));
        }
        let mut out = vec![0.0; self.coeffs.len()];
        for (a, &x) in self.coeffs.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (b, &y) in other.coeffs.iter().enumerate() {
                if y != 0.0 {
                    out[a ^ b] += blade_sign(a, b) * x * y;
                }
            }
        }
        Ok(CliffordElement { n: self.n, coeffs: out })
    }

    /// Clifford conjugation: `ē_j = -e_j`, reversing products.
    pub fn conj(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| conj_sign(m.count_ones() as usize) * c)
            .collect();
        CliffordElement { n: self.n, coeffs }
    }

    /// `[a ā]_0`; for R_{0,n} this is the squared Euclidean norm of the coefficients.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// `‖a‖ = ([a ā]_0)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, k: f64) -> Self {
        CliffordElement { n: self.n, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// True iff `a ā` is real and `a² = -1`, up to `tol` relative to `‖a‖`.
    pub fn is_imaginary_unit(&self, tol: f64) -> bool {
        let scale = 1.0f64.max(self.norm_sqr());
        let aa = self * &self.conj();
        let mut non_real = aa.clone();
        non_real.coeffs[0] = 0.0;
        let square = self * self;
        let plus_one = &square + &Self::one(self.n);
        non_real.norm() <= tol * scale && plus_one.norm() <= tol * scale
    }

    /// Reads the element as a paravector when its higher-grade part is below `tol`.
    pub fn to_paravector(&self, tol: f64) -> Result<Paravector> {
        let scale = 1.0f64.max(self.norm());
        let higher: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(m, _)| m.count_ones() > 1)
            .map(|(_, c)| c * c)
            .sum::<f64>()
            .sqrt();
        if higher > tol * scale {
            return Err(Error::InvalidArgument(format!(
                "element has a grade >= 2 part of norm {higher:e}"
            )));
        }
        let vector = (0..self.n).map(|j| self.coeffs[1 << j]).collect();
        Ok(Paravector::new(self.coeffs[0], vector))
    }

    /// Matrix of `b ↦ a b` in the blade basis (column `B` holds `a e_B`).
    pub fn left_mul_matrix(&self) -> DMatrix<f64> {
        let dim = self.coeffs.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (a, &x) in self.coeffs.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for b in 0..dim {
                m[(a ^ b, b)] += blade_sign(a, b) * x;
            }
        }
        m
    }

    /// Matrix of `b ↦ b a` in the blade basis.
    pub fn right_mul_matrix(&self) -> DMatrix<f64> {
        let dim = self.coeffs.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (a, &x) in self.coeffs.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for b in 0..dim {
                m[(a ^ b, b)] += blade_sign(b, a) * x;
            }
        }
        m
    }
}

/// `cl_mul(a, b) = a b`.
pub fn cl_mul(a: &CliffordElement, b: &CliffordElement) -> Result<CliffordElement> {
    a.try_mul(b)
}

impl Mul for &CliffordElement {
    type Output = CliffordElement;

    /// Panics when the operands have different `n`; see [`CliffordElement::try_mul`].
    fn mul(self, rhs: &CliffordElement) -> CliffordElement {
        self.try_mul(rhs).expect("Clifford product of mismatched algebras")
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;

    fn add(self, rhs: &CliffordElement) -> CliffordElement {
        assert_eq!(self.n, rhs.n, "sum of mismatched algebras");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        CliffordElement { n: self.n, coeffs }
    }
}

impl Sub for &CliffordElement {
    type Output = CliffordElement;

    fn sub(self, rhs: &CliffordElement) -> CliffordElement {
        assert_eq!(self.n, rhs.n, "difference of mismatched algebras");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        CliffordElement { n: self.n, coeffs }
    }
}

impl Neg for &CliffordElement {
    type Output = CliffordElement;

    fn neg(self) -> CliffordElement {
        self.scale(-1.0)
    }
}

/// The axially symmetric sphere `[x] = { u + J v : J ∈ 𝕊 }`, stored with `v >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sphere {
    pub u: f64,
    pub v: f64,
}

impl Sphere {
    pub fn new(u: f64, v: f64) -> Self {
        Sphere { u, v: v.abs() }
    }

    /// Distance between spheres measured in the closed upper half plane.
    pub fn distance(&self, other: &Sphere) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }

    /// Representative `u + i v` on the complex slice.
    pub fn shadow(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }
}

/// `x_0 + x_1 e_1 + ... + x_n e_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Paravector {
    pub s0: f64,
    pub vector: Vec<f64>,
}

impl Paravector {
    pub fn new(s0: f64, vector: Vec<f64>) -> Self {
        assert!(vector.len() <= MAX_GENERATORS, "n = {} exceeds {MAX_GENERATORS}", vector.len());
        Paravector { s0, vector }
    }

    pub fn real(n: usize, x: f64) -> Self {
        Self::new(x, vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.vector.len()
    }

    /// `Re(s)`.
    pub fn re(&self) -> f64 {
        self.s0
    }

    /// Euclidean length of the vector part.
    pub fn vector_norm(&self) -> f64 {
        self.vector.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `|s|²`.
    pub fn modulus_sqr(&self) -> f64 {
        self.s0 * self.s0 + self.vector.iter().map(|x| x * x).sum::<f64>()
    }

    pub fn modulus(&self) -> f64 {
        self.modulus_sqr().sqrt()
    }

    pub fn conj(&self) -> Self {
        Paravector::new(self.s0, self.vector.iter().map(|x| -x).collect())
    }

    pub fn to_element(&self) -> CliffordElement {
        let mut out = CliffordElement::scalar(self.n(), self.s0);
        for (j, &x) in self.vector.iter().enumerate() {
            out.coeffs[1 << j] = x;
        }
        out
    }

    /// `s^{-1} = s̄ / |s|²`.
    pub fn inverse(&self) -> Result<CliffordElement> {
        let m = self.modulus_sqr();
        if m == 0.0 {
            return Err(Error::ZeroParavector);
        }
        Ok(self.conj().to_element().scale(1.0 / m))
    }

    /// `[x]` as `(x_0, |x̲|)`.
    pub fn sphere(&self) -> Sphere {
        Sphere::new(self.s0, self.vector_norm())
    }

    /// Imaginary unit `J_x = x̲ / |x̲|`, `None` for real paravectors.
    pub fn unit(&self) -> Option<ImaginaryUnit> {
        let v = self.vector_norm();
        (v > 0.0).then(|| ImaginaryUnit { components: self.vector.iter().map(|x| x / v).collect() })
    }
}

/// `paravector_inverse(s) = s̄ / |s|²`.
pub fn paravector_inverse(s: &Paravector) -> Result<CliffordElement> {
    s.inverse()
}

/// `sphere_of(x) = (x_0, |x̲|)`.
pub fn sphere_of(x: &Paravector) -> Sphere {
    x.sphere()
}

/// A unit 1-vector `J = Σ x_j e_j` with `Σ x_j² = 1`, so `J² = -1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImaginaryUnit {
    components: Vec<f64>,
}

impl ImaginaryUnit {
    /// Accepts components whose squared sum is 1 within `1e-10`.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        check_n(components.len())?;
        let sq: f64 = components.iter().map(|x| x * x).sum();
        if (sq - 1.0).abs() > IMAGINARY_UNIT_TOL {
            return Err(Error::NotImaginaryUnit(format!("squared length {sq}")));
        }
        Ok(ImaginaryUnit { components })
    }

    /// Normalizes a non-zero direction.
    pub fn normalized(direction: Vec<f64>) -> Result<Self> {
        check_n(direction.len())?;
        let len = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::NotImaginaryUnit(format!("direction of length {len}")));
        }
        Ok(ImaginaryUnit { components: direction.iter().map(|x| x / len).collect() })
    }

    /// `e_j` as an imaginary unit of R_{0,n}.
    pub fn generator(n: usize, j: usize) -> Result<Self> {
        check_n(n)?;
        if j == 0 || j > n {
            return Err(Error::IndexOutOfRange { index: j, n });
        }
        let mut components = vec![0.0; n];
        components[j - 1] = 1.0;
        Ok(ImaginaryUnit { components })
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn to_element(&self) -> CliffordElement {
        Paravector::new(0.0, self.components.clone()).to_element()
    }

    /// Slice embedding `u + i v ↦ u + J v`.
    pub fn embed(&self, z: Complex64) -> Paravector {
        Paravector::new(z.re, self.components.iter().map(|x| x * z.im).collect())
    }

    /// Same as [`ImaginaryUnit::embed`] but returning the full Clifford element.
    pub fn embed_element(&self, z: Complex64) -> CliffordElement {
        self.embed(z).to_element()
    }
}

/// A point `u + J v` of the slice plane `C_J`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlicePoint {
    pub u: f64,
    pub v: f64,
    pub unit: ImaginaryUnit,
}

impl SlicePoint {
    pub fn new(u: f64, v: f64, unit: ImaginaryUnit) -> Self {
        SlicePoint { u, v, unit }
    }

    pub fn to_paravector(&self) -> Paravector {
        self.unit.embed(self.shadow())
    }

    /// The complex shadow `u + i v` under `C_J ≅ C`.
    pub fn shadow(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }
}
