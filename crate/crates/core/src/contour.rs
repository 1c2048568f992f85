//! Circle-union contours in the complex shadow plane and their trapezoid nodes.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{CliffordElement, ImaginaryUnit, Paravector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
    /// `+1.0` counter-clockwise, `-1.0` clockwise.
    pub orientation: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Circle { center, radius, orientation: 1.0 }
    }

    pub fn conj(&self) -> Self {
        Circle { center: self.center.conj(), ..*self }
    }

    /// Signed distance to the circle: negative inside, positive outside.
    pub fn signed_distance(&self, z: Complex64) -> f64 {
        (z - self.center).norm() - self.radius
    }
}

/// A quadrature node `z = c + ρ e^{iθ}` with the slice weight `o (z − c)`
/// (so that `dz = i · weight · dθ`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub z: Complex64,
    pub weight: Complex64,
    pub center: Complex64,
}

impl Node {
    pub fn point(&self, unit: &ImaginaryUnit) -> Paravector {
        unit.embed(self.z)
    }

    pub fn weight_element(&self, unit: &ImaginaryUnit) -> CliffordElement {
        unit.embed_element(self.weight)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Contour {
    pub circles: Vec<Circle>,
}

impl Contour {
    pub fn new(circles: Vec<Circle>) -> Self {
        Contour { circles }
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    /// Nodes `k = start, start + step, …` below `n` of the `n`-point rule on every circle.
    pub fn nodes_strided(&self, n: usize, start: usize, step: usize) -> impl Iterator<Item = Node> + '_ {
        self.circles.iter().flat_map(move |c| {
            (start..n).step_by(step.max(1)).map(move |k| {
                let theta = 2.0 * PI * k as f64 / n as f64;
                let offset = Complex64::from_polar(c.radius, theta);
                Node { z: c.center + offset, weight: offset * c.orientation, center: c.center }
            })
        })
    }

    pub fn nodes(&self, n: usize) -> impl Iterator<Item = Node> + '_ {
        self.nodes_strided(n, 0, 1)
    }

    /// Net winding number of the circle union around `z`.
    pub fn winding_number(&self, z: Complex64) -> i32 {
        self.circles
            .iter()
            .filter(|c| c.signed_distance(z) < 0.0)
            .map(|c| if c.orientation > 0.0 { 1 } else { -1 })
            .sum()
    }

    /// Distance from `z` to the nearest circle.
    pub fn distance(&self, z: Complex64) -> f64 {
        self.circles.iter().map(|c| c.signed_distance(z).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Whether the multiset of circles is invariant under conjugation.
    pub fn is_conjugation_symmetric(&self, tol: f64) -> bool {
        let mut used = alloc::vec![false; self.circles.len()];
        for c in &self.circles {
            let target = c.conj();
            let hit = self.circles.iter().enumerate().position(|(j, d)| {
                !used[j]
                    && (d.center - target.center).norm() <= tol
                    && (d.radius - target.radius).abs() <= tol
                    && d.orientation == target.orientation
            });
            match hit {
                Some(j) => used[j] = true,
                None => return false,
            }
        }
        true
    }

    /// Whether any two circles intersect or nest.
    pub fn has_overlaps(&self) -> bool {
        for (i, a) in self.circles.iter().enumerate() {
            for b in &self.circles[i + 1..] {
                if (a.center - b.center).norm() <= a.radius + b.radius {
                    return true;
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_weights_integrate_dz_over_z() {
        // (1/N) Σ weight / z  ≈  (1/2πi) ∮ dz / z.
        let contour = Contour::new(alloc::vec![Circle::new(Complex64::new(0.2, 0.1), 1.0)]);
        let sum: Complex64 = contour.nodes(64).map(|n| n.weight / n.z).sum();
        assert!((sum / 64.0 - 1.0).norm() < 1e-14);
        let outside = Contour::new(alloc::vec![Circle::new(Complex64::new(3.0, 0.0), 1.0)]);
        let sum: Complex64 = outside.nodes(64).map(|n| n.weight / n.z).sum();
        assert!(sum.norm() / 64.0 < 1e-14);
    }

    #[test]
    fn strided_nodes_partition() {
        let c = Contour::new(alloc::vec![Circle::new(Complex64::new(0.0, 0.0), 1.0)]);
        let all: Vec<_> = c.nodes(8).collect();
        let even: Vec<_> = c.nodes_strided(8, 0, 2).collect();
        let half: Vec<_> = c.nodes(4).collect();
        assert_eq!(even.len(), 4);
        for (a, b) in even.iter().zip(&half) {
            assert!((a.z - b.z).norm() < 1e-15);
        }
        assert_eq!(all.len(), 8);
    }

    #[test]
    fn winding_symmetry_overlap() {
        let up = Circle::new(Complex64::new(0.0, 1.0), 0.3);
        let c = Contour::new(alloc::vec![up, up.conj()]);
        assert!(c.is_conjugation_symmetric(1e-14));
        assert!(!c.has_overlaps());
        assert_eq!(c.winding_number(Complex64::new(0.0, -1.0)), 1);
        assert_eq!(c.winding_number(Complex64::new(0.0, 0.0)), 0);
        assert!((c.distance(Complex64::new(0.0, 0.0)) - 0.7).abs() < 1e-15);
        assert!(!Contour::new(alloc::vec![up]).is_conjugation_symmetric(1e-14));
        let big = Contour::new(alloc::vec![Circle::new(Complex64::new(0.0, 0.5), 1.0), Circle::new(Complex64::new(0.0, -0.5), 1.0)]);
        assert!(big.has_overlaps());
    }
}
