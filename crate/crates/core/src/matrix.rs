//! Full Clifford operators `T̂ = Σ_A T_A e_A` with real `d × d` components.
//!
//! Every invertibility and spectral question is answered through the real
//! representation of size `2^n d`, laid out blade-major: the row and column
//! index of entry `i` of blade `B` is `B.mask() * d + i`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::algebra::{blade_sign, CliffordElement, MultiIndex, MAX_GENERATORS};
use crate::error::{Error, Result};
use crate::linalg::{self, op_norm2};

#[derive(Clone, Debug, PartialEq)]
pub struct CliffordMatrix {
    d: usize,
    n: usize,
    components: BTreeMap<MultiIndex, DMatrix<f64>>,
}

impl CliffordMatrix {
    pub fn zero(d: usize, n: usize) -> Self {
        assert!(n <= MAX_GENERATORS, "n = {n} exceeds {MAX_GENERATORS}");
        CliffordMatrix { d, n, components: BTreeMap::new() }
    }

    pub fn identity(d: usize, n: usize) -> Self {
        Self::from_real(n, DMatrix::identity(d, d))
    }

    /// `T_0 e_∅`.
    pub fn from_real(n: usize, t0: DMatrix<f64>) -> Self {
        assert!(t0.is_square(), "component must be square");
        let mut out = Self::zero(t0.nrows(), n);
        out.components.insert(MultiIndex::EMPTY, t0);
        out
    }

    /// `a · I_d` for a Clifford number `a`.
    pub fn from_element(d: usize, a: &CliffordElement) -> Self {
        let mut out = Self::zero(d, a.n());
        for (blade, x) in a.terms() {
            out.components.insert(blade, DMatrix::identity(d, d) * x);
        }
        out
    }

    /// The paravector operator `T_0 + Σ_j e_j T_j` from `[T_0, T_1, ..., T_n]`.
    pub fn paravector_operator(parts: &[DMatrix<f64>]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("empty paravector operator".into()));
        }
        let n = parts.len() - 1;
        let comps = parts.iter().enumerate().map(|(j, t)| {
            let blade = if j == 0 { MultiIndex::EMPTY } else { MultiIndex::generator(j, n).unwrap() };
            (blade, t.clone())
        });
        Self::from_components(parts[0].nrows(), n, comps)
    }

    pub fn from_components(
        d: usize,
        n: usize,
        components: impl IntoIterator<Item = (MultiIndex, DMatrix<f64>)>,
    ) -> Result<Self> {
        if n > MAX_GENERATORS {
            return Err(Error::TooManyGenerators(n));
        }
        let mut out = Self::zero(d, n);
        for (blade, t) in components {
            blade.check(n)?;
            if t.shape() != (d, d) {
                return Err(Error::DimensionMismatch(format!(
                    "component {:?} has shape {:?}, expected ({d}, {d})",
                    blade.indices().collect::<Vec<_>>(),
                    t.shape()
                )));
            }
            out.components.insert(blade, t);
        }
        Ok(out)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn component(&self, blade: MultiIndex) -> Option<&DMatrix<f64>> {
        self.components.get(&blade)
    }

    pub fn component_or_zero(&self, blade: MultiIndex) -> DMatrix<f64> {
        self.components.get(&blade).cloned().unwrap_or_else(|| DMatrix::zeros(self.d, self.d))
    }

    /// Stored components in blade-mask order; absent blades are zero.
    pub fn components(&self) -> impl Iterator<Item = (MultiIndex, &DMatrix<f64>)> {
        self.components.iter().map(|(b, t)| (*b, t))
    }

    fn check_compatible(&self, other: &Self, what: &str) -> Result<()> {
        if self.d != other.d || self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "{what} of (d = {}, n = {}) and (d = {}, n = {})",
                self.d, self.n, other.d, other.n
            )));
        }
        Ok(())
    }

    /// `(T S)_C = Σ_{e_A e_B = ±e_C} ± T_A S_B`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "product")?;
        let mut out = Self::zero(self.d, self.n);
        for (a, ta) in &self.components {
            for (b, sb) in &other.components {
                let sign = blade_sign(a.mask(), b.mask());
                let c = MultiIndex::from_mask(a.mask() ^ b.mask())?;
                let prod = ta * sb;
                match out.components.get_mut(&c) {
                    Some(acc) => *acc += prod * sign,
                    None => {
                        out.components.insert(c, prod * sign);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "sum")?;
        let mut out = self.clone();
        for (b, t) in &other.components {
            match out.components.get_mut(b) {
                Some(acc) => *acc += t,
                None => {
                    out.components.insert(*b, t.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: f64) -> Self {
        let components = self.components.iter().map(|(b, t)| (*b, t * k)).collect();
        CliffordMatrix { d: self.d, n: self.n, components }
    }

    /// `T̂ a` for a Clifford number `a` acting from the right.
    pub fn mul_element_right(&self, a: &CliffordElement) -> Result<Self> {
        self.element_checked(a)?;
        self.try_mul(&Self::from_element(self.d, a))
    }

    /// `a T̂`.
    pub fn mul_element_left(&self, a: &CliffordElement) -> Result<Self> {
        self.element_checked(a)?;
        Self::from_element(self.d, a).try_mul(self)
    }

    fn element_checked(&self, a: &CliffordElement) -> Result<()> {
        if a.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "Clifford number with n = {} applied to operator with n = {}",
                a.n(),
                self.n
            )));
        }
        Ok(())
    }

    /// `T̂^m` by repeated squaring.
    pub fn pow(&self, mut m: u32) -> Self {
        let mut result = Self::identity(self.d, self.n);
        let mut base = self.clone();
        while m > 0 {
            if m & 1 == 1 {
                result = &result * &base;
            }
            m >>= 1;
            if m > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `Σ_A left_mul(e_A) ⊗ T_A` in blade-major layout.
    pub fn real_rep(&self) -> RealRep {
        let dim = 1usize << self.n;
        let d = self.d;
        let mut m = DMatrix::zeros(dim * d, dim * d);
        for (a, t) in &self.components {
            let a = a.mask();
            for b in 0..dim {
                let sign = blade_sign(a, b);
                let mut block = m.view_mut(((a ^ b) * d, b * d), (d, d));
                block += t * sign;
            }
        }
        RealRep { n: self.n, d, matrix: m }
    }

    /// Action on `v = Σ_B v_B e_B ∈ R^d ⊗ R_{0,n}`: `Σ_{A,B} T_A(v_B) e_A e_B`.
    /// Coordinates are blade-major, like [`RealRep`].
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let dim = 1usize << self.n;
        let d = self.d;
        if v.len() != dim * d {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for module of dimension {}",
                v.len(),
                dim * d
            )));
        }
        let mut out = alloc::vec![0.0; dim * d];
        for (a, t) in &self.components {
            let a = a.mask();
            for b in 0..dim {
                let vb = nalgebra::DVectorView::from_slice(&v[b * d..(b + 1) * d], d);
                let tv = t * vb;
                let sign = blade_sign(a, b);
                let c = a ^ b;
                for i in 0..d {
                    out[c * d + i] += sign * tv[i];
                }
            }
        }
        Ok(out)
    }

    /// `Σ_A ‖T_A‖_2`.
    pub fn norm_paper(&self) -> f64 {
        self.components.values().map(op_norm2).sum()
    }

    /// Largest singular value of the real representation.
    pub fn norm_op2(&self) -> f64 {
        op_norm2(&self.real_rep().matrix)
    }

    /// Largest absolute component entry.
    pub fn max_abs(&self) -> f64 {
        self.components.values().map(|t| t.amax()).fold(0.0, f64::max)
    }
}

/// `cm_mul(T, S) = T S`.
pub fn cm_mul(t: &CliffordMatrix, s: &CliffordMatrix) -> Result<CliffordMatrix> {
    t.try_mul(s)
}

pub fn real_rep(t: &CliffordMatrix) -> RealRep {
    t.real_rep()
}

pub fn norm_paper(t: &CliffordMatrix) -> f64 {
    t.norm_paper()
}

pub fn norm_op2(t: &CliffordMatrix) -> f64 {
    t.norm_op2()
}

impl Mul for &CliffordMatrix {
    type Output = CliffordMatrix;

    /// Panics on shape mismatch; see [`CliffordMatrix::try_mul`].
    fn mul(self, rhs: &CliffordMatrix) -> CliffordMatrix {
        self.try_mul(rhs).expect("product of mismatched Clifford matrices")
    }
}

impl Add for &CliffordMatrix {
    type Output = CliffordMatrix;

    fn add(self, rhs: &CliffordMatrix) -> CliffordMatrix {
        self.try_add(rhs).expect("sum of mismatched Clifford matrices")
    }
}

impl Sub for &CliffordMatrix {
    type Output = CliffordMatrix;

    fn sub(self, rhs: &CliffordMatrix) -> CliffordMatrix {
        self.try_add(&rhs.scale(-1.0)).expect("difference of mismatched Clifford matrices")
    }
}

impl Neg for &CliffordMatrix {
    type Output = CliffordMatrix;

    fn neg(self) -> CliffordMatrix {
        self.scale(-1.0)
    }
}

/// Real `(2^n d) × (2^n d)` matrix of a Clifford operator.
#[derive(Clone, Debug, PartialEq)]
pub struct RealRep {
    pub n: usize,
    pub d: usize,
    pub matrix: DMatrix<f64>,
}

impl RealRep {
    pub fn identity(d: usize, n: usize) -> Self {
        let dim = (1usize << n) * d;
        RealRep { n, d, matrix: DMatrix::identity(dim, dim) }
    }

    /// Reads the components back from the first block column (`T_A` sits at block `(A, ∅)`).
    /// Only meaningful for matrices in the image of [`CliffordMatrix::real_rep`].
    pub fn to_clifford(&self) -> CliffordMatrix {
        let d = self.d;
        let dim = 1usize << self.n;
        let mut out = CliffordMatrix::zero(d, self.n);
        for a in 0..dim {
            let block = self.matrix.view((a * d, 0), (d, d)).into_owned();
            if block.iter().any(|x| *x != 0.0) {
                out.components.insert(MultiIndex::from_mask(a).unwrap(), block);
            }
        }
        out
    }

    pub fn norm_op2(&self) -> f64 {
        op_norm2(&self.matrix)
    }
}

/// Output of [`neumann_update_inverse`].
#[derive(Clone, Debug)]
pub struct NeumannInverse {
    pub inverse: RealRep,
    pub terms: usize,
    /// `‖C · inverse − I‖_2`.
    pub residual: f64,
}

/// `C^{-1} = A^{-1} Σ_m [(A − C) A^{-1}]^m`, given `A^{-1}`.
///
/// Requires `‖A − C‖ ‖A^{-1}‖ < 1` (2-norms); summation stops once a term's
/// norm drops below `tol`.
pub fn neumann_update_inverse(
    a_inv: &RealRep,
    c: &RealRep,
    max_terms: usize,
    tol: f64,
) -> Result<NeumannInverse> {
    if a_inv.matrix.shape() != c.matrix.shape() {
        return Err(Error::DimensionMismatch(format!(
            "A^-1 is {:?}, C is {:?}",
            a_inv.matrix.shape(),
            c.matrix.shape()
        )));
    }
    let a = linalg::guarded_inverse(&a_inv.matrix)
        .map_err(|_| Error::InvalidArgument("A^-1 is not invertible".into()))?;
    let delta = &a - &c.matrix;
    let contraction = op_norm2(&delta) * op_norm2(&a_inv.matrix);
    if contraction >= 1.0 {
        return Err(Error::Divergence(contraction));
    }
    let ratio = &delta * &a_inv.matrix;
    let mut power = DMatrix::identity(ratio.nrows(), ratio.ncols());
    let mut sum = power.clone();
    let mut terms = 1;
    loop {
        let next = &power * &ratio;
        if op_norm2(&next) < tol {
            break;
        }
        if terms >= max_terms {
            return Err(Error::MaxTermsExceeded(max_terms));
        }
        sum += &next;
        power = next;
        terms += 1;
    }
    let inverse = &a_inv.matrix * sum;
    let residual = op_norm2(&(&c.matrix * &inverse - DMatrix::identity(inverse.nrows(), inverse.ncols())));
    Ok(NeumannInverse { inverse: RealRep { n: c.n, d: c.d, matrix: inverse }, terms, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::{random_clifford_matrix, random_matrix, rng};
    use alloc::vec;

    fn e(n: usize, idx: &[usize]) -> MultiIndex {
        MultiIndex::from_indices(idx, n).unwrap()
    }

    #[test]
    fn product_examples() {
        let mut r = rng(1);
        let t = random_clifford_matrix(&mut r, 3, 2, 1.0);
        assert_eq!(&t * &CliffordMatrix::identity(3, 2), t);

        let x1 = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let x2 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 2.0]);
        let a = CliffordMatrix::from_components(2, 2, [(e(2, &[1]), x1.clone())]).unwrap();
        let b = CliffordMatrix::from_components(2, 2, [(e(2, &[2]), x2.clone())]).unwrap();
        let ab = &a * &b;
        assert_eq!(ab.components().count(), 1);
        assert_eq!(ab.component(e(2, &[1, 2])).unwrap(), &(x1 * x2));
    }

    #[test]
    fn real_rep_is_a_homomorphism() {
        let mut r = rng(2);
        for (d, n) in [(1, 1), (2, 2), (3, 2), (4, 3), (2, 3)] {
            let t = random_clifford_matrix(&mut r, d, n, 1.0);
            let s = random_clifford_matrix(&mut r, d, n, 1.0);
            let lhs = (&t * &s).real_rep().matrix;
            let rhs = t.real_rep().matrix * s.real_rep().matrix;
            assert!((lhs - &rhs).amax() <= 1e-12 * (1.0 + rhs.amax()));
            assert_eq!(t.real_rep().to_clifford().real_rep(), t.real_rep());
        }
        assert_eq!(CliffordMatrix::identity(2, 1).real_rep(), RealRep::identity(2, 1));
    }

    #[test]
    fn real_rep_examples() {
        assert_eq!(CliffordMatrix::identity(2, 1).real_rep().matrix, DMatrix::identity(4, 4));
        let e1 = CliffordMatrix::from_element(1, &CliffordElement::generator(1, 1).unwrap());
        assert_eq!(e1.real_rep().matrix, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    }

    #[test]
    fn real_rep_agrees_with_module_action() {
        let mut r = rng(3);
        use rand::Rng;
        for (d, n) in [(2, 1), (3, 2), (2, 3)] {
            let t = random_clifford_matrix(&mut r, d, n, 1.0);
            let v: Vec<f64> = (0..(d << n)).map(|_| r.gen_range(-1.0..1.0)).collect();
            let direct = t.apply(&v).unwrap();
            let via_rep = &t.real_rep().matrix * nalgebra::DVector::from_vec(v);
            for (x, y) in direct.iter().zip(via_rep.iter()) {
                assert!((x - y).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn paravector_operator_embedding() {
        let mut r = rng(4);
        let parts: Vec<_> = (0..4).map(|_| random_matrix(&mut r, 2, 1.0)).collect();
        let op = CliffordMatrix::paravector_operator(&parts).unwrap();
        let mut expected = linalg::kron(&DMatrix::identity(8, 8), &parts[0]);
        for j in 1..4 {
            let ej = CliffordElement::generator(3, j).unwrap().left_mul_matrix();
            expected += linalg::kron(&ej, &parts[j]);
        }
        assert!((op.real_rep().matrix - expected).amax() < 1e-15);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(CliffordMatrix::zero(2, 1).norm_paper(), 0.0);
        let t = CliffordMatrix::from_element(1, &(&CliffordElement::one(1) + &CliffordElement::generator(1, 1).unwrap()));
        assert!((t.norm_paper() - 2.0).abs() < 1e-15);
        let diag = CliffordMatrix::from_real(2, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0])));
        assert!((diag.norm_paper() - 3.0).abs() < 1e-14);
        assert!((CliffordMatrix::identity(3, 2).norm_op2() - 1.0).abs() < 1e-14);
        let e1 = CliffordMatrix::from_element(1, &CliffordElement::generator(1, 1).unwrap());
        assert!((e1.norm_op2() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn norms_are_submultiplicative() {
        let mut r = rng(5);
        for _ in 0..20 {
            let t = random_clifford_matrix(&mut r, 3, 2, 1.0);
            let s = random_clifford_matrix(&mut r, 3, 2, 1.0);
            let ts = &t * &s;
            assert!(ts.norm_op2() <= t.norm_op2() * s.norm_op2() * (1.0 + 1e-12));
            assert!(ts.norm_paper() <= t.norm_paper() * s.norm_paper() * (1.0 + 1e-12));
            assert!(t.norm_op2() <= t.norm_paper() * (1.0 + 1e-12));
            for m in 2..5 {
                assert!(t.pow(m).norm_paper() <= t.norm_paper().powi(m as i32) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn neumann_examples() {
        let mut r = rng(6);
        let a = random_clifford_matrix(&mut r, 2, 1, 1.0).try_add(&CliffordMatrix::identity(2, 1).scale(3.0)).unwrap();
        let a_rep = a.real_rep();
        let a_inv = RealRep { matrix: linalg::guarded_inverse(&a_rep.matrix).unwrap(), ..a_rep.clone() };

        let same = neumann_update_inverse(&a_inv, &a_rep, 10, 1e-12).unwrap();
        assert_eq!(same.terms, 1);
        assert!((same.inverse.matrix - &a_inv.matrix).amax() < 1e-15);

        // C = 1.1 A: the series is geometric in -0.1.
        let c = RealRep { matrix: &a_rep.matrix * 1.1, ..a_rep.clone() };
        let out = neumann_update_inverse(&a_inv, &c, 100, 1e-15).unwrap();
        assert!((out.inverse.matrix - &a_inv.matrix / 1.1).amax() < 1e-13);
        assert!(out.residual < 1e-13);

        // Perturbation scaled so that ||A - C|| ||A^-1|| = 0.5.
        let e = random_clifford_matrix(&mut r, 2, 1, 1.0).real_rep().matrix;
        let scale = 0.5 / (op_norm2(&e) * op_norm2(&a_inv.matrix));
        let c = RealRep { matrix: &a_rep.matrix - e * scale, ..a_rep.clone() };
        let out = neumann_update_inverse(&a_inv, &c, 200, 1e-14).unwrap();
        let dense = linalg::guarded_inverse(&c.matrix).unwrap();
        assert!((out.inverse.matrix - dense).amax() < 1e-12);
        assert!(out.residual < 1e-13);

        let far = RealRep { matrix: &a_rep.matrix * 3.0, ..a_rep.clone() };
        assert!(matches!(neumann_update_inverse(&a_inv, &far, 100, 1e-14), Err(Error::Divergence(_))));
        assert!(matches!(neumann_update_inverse(&a_inv, &c, 3, 1e-14), Err(Error::MaxTermsExceeded(3))));
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let a = CliffordMatrix::identity(2, 1);
        let b = CliffordMatrix::identity(3, 1);
        assert!(matches!(a.try_mul(&b), Err(Error::DimensionMismatch(_))));
        let bad = CliffordMatrix::from_components(2, 1, [(MultiIndex::EMPTY, DMatrix::zeros(3, 3))]);
        assert!(bad.is_err());
        let out_of_range = CliffordMatrix::from_components(2, 1, [(e(2, &[2]), DMatrix::zeros(2, 2))]);
        assert!(matches!(out_of_range, Err(Error::IndexOutOfRange { .. })));
    }
}
