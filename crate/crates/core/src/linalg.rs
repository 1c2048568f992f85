//! Dense real helpers shared by the matrix and spectrum layers.

use alloc::vec::Vec;

use nalgebra::DMatrix;

/// Relative rank threshold: a matrix is treated as singular when
/// `σ_min <= SINGULAR_REL * σ_max`.
pub const SINGULAR_REL: f64 = 1e-10;

/// Singular values in descending order, read off the symmetric eigenvalues
/// `±σ_i` of `[[0, M], [Mᵀ, 0]]`.
pub fn singular_values_sorted(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Vec::new();
    }
    let mut aug = DMatrix::zeros(r + c, r + c);
    aug.view_mut((0, r), (r, c)).copy_from(m);
    aug.view_mut((r, 0), (c, r)).copy_from(&m.transpose());
    let mut ev: Vec<f64> = aug.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.truncate(r.min(c));
    for x in ev.iter_mut() {
        *x = x.max(0.0);
    }
    ev
}

pub(crate) fn singular_values(m: &DMatrix<f64>) -> (f64, f64) {
    let sv = singular_values_sorted(m);
    match (sv.last(), sv.first()) {
        (Some(&min), Some(&max)) => (min, max),
        _ => (0.0, 0.0),
    }
}

/// Largest singular value.
pub fn op_norm2(m: &DMatrix<f64>) -> f64 {
    singular_values(m).1
}

pub fn sigma_min(m: &DMatrix<f64>) -> f64 {
    singular_values(m).0
}

/// Inverse of a square matrix that passes the relative rank test, by LU.
/// On refusal returns `(σ_min, σ_max)`.
pub(crate) fn guarded_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>, (f64, f64)> {
    let (min, max) = singular_values(m);
    if !(min > SINGULAR_REL * max) || !min.is_finite() || !m.is_square() {
        return Err((min, max));
    }
    m.clone().full_piv_lu().try_inverse().ok_or((min, max))
}

/// `A ⊗ B`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let x = a[(i, j)];
            if x != 0.0 {
                out.view_mut((i * br, j * bc), (br, bc)).copy_from(&(b * x));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guarded_inverse_accepts_and_refuses() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let inv = guarded_inverse(&m).unwrap();
        assert!((&m * inv - DMatrix::identity(2, 2)).amax() < 1e-14);
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(guarded_inverse(&s).is_err());
        assert!(guarded_inverse(&DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn singular_values_on_clustered_spectrum() {
        // Repeated singular values with structural zeros.
        let q = DMatrix::from_row_slice(4, 4, &[
            0.494486428060793, 0.0, -0.25176919186285907, 0.0,
            0.0, 1.746255619923652, 0.0, -2.2517691918628593,
            0.25176919186285907, 0.0, 0.494486428060793, 0.0,
            0.0, 2.2517691918628593, 0.0, 1.746255619923652,
        ]);
        let sv = singular_values_sorted(&q);
        let big = (0.494486428060793f64.powi(2) + 0.25176919186285907f64.powi(2)).sqrt();
        let small = (1.746255619923652f64.powi(2) + 2.2517691918628593f64.powi(2)).sqrt();
        assert!((sv[0] - small).abs() < 1e-14 && (sv[1] - small).abs() < 1e-14);
        assert!((sv[2] - big).abs() < 1e-14 && (sv[3] - big).abs() < 1e-14);
        let inv = guarded_inverse(&q).unwrap();
        assert!((&q * inv - DMatrix::identity(4, 4)).amax() < 1e-14);
        let rect = DMatrix::from_row_slice(2, 3, &[3.0, 0.0, 0.0, 0.0, 4.0, 0.0]);
        let sv = singular_values_sorted(&rect);
        assert!((sv[0] - 4.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn kron_small() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let b = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
        let k = kron(&a, &b);
        assert_eq!(k, DMatrix::from_row_slice(2, 4, &[0.0, 0.0, -1.0, -2.0, 1.0, 2.0, 0.0, 0.0]));
    }
}
