//! (2,2)-isogenies out of an elliptic product E₁ × E₂.

use super::{Codomain, Sextic};
use crate::ec::EllCurve;
use crate::error::{Error, Result};
use crate::ff::{Fq, Level, Poly};

/// A maximal isotropic subgroup of (E₁ × E₂)[2], named through the sorted
/// 2-torsion x-coordinates of the two factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductKernel {
    /// ⟨(x₁,0)⟩ × ⟨(x₂,0)⟩, given by indices into the sorted roots.
    Product(usize, usize),
    /// Graph of the bijection root i of E₁ ↦ root perm[i] of E₂.
    Gluing([usize; 3]),
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// The 9 product kernels followed by the 6 gluing kernels.
pub fn product_kernels() -> Vec<ProductKernel> {
    let mut out: Vec<ProductKernel> = (0..3)
        .flat_map(|i| (0..3).map(move |k| ProductKernel::Product(i, k)))
        .collect();
    out.extend(PERMS.iter().map(|&p| ProductKernel::Gluing(p)));
    out
}

fn rational_two_torsion(e: &EllCurve) -> Result<[Fq; 3]> {
    let r = e.two_torsion()?;
    if r.iter().any(|x| x.min_level() > Level::Quad) {
        return Err(Error::ModelNotRational);
    }
    Ok([r[0], r[1], r[2]])
}

/// Codomain of E₁ × E₂ → (E₁ × E₂)/K. Both curves need rational 2-torsion.
pub fn product_kernel_codomain(e1: &EllCurve, e2: &EllCurve, k: ProductKernel) -> Result<Codomain> {
    let r1 = rational_two_torsion(e1)?;
    let r2 = rational_two_torsion(e2)?;
    match k {
        ProductKernel::Product(i, l) => {
            let j1 = e1.velu2(r1[i]).j_invariant()?;
            let j2 = e2.velu2(r2[l]).j_invariant()?;
            Ok(Codomain::product(j1, j2))
        }
        ProductKernel::Gluing(perm) => glue_along_2torsion(e1, e2, perm),
    }
}

/// Codomain of the gluing kernel {(P, ψP)} where ψ sends the i-th sorted
/// 2-torsion point of E₁ to the perm[i]-th of E₂.
pub fn glue_along_2torsion(e1: &EllCurve, e2: &EllCurve, perm: [usize; 3]) -> Result<Codomain> {
    let r1 = rational_two_torsion(e1)?;
    let r2 = rational_two_torsion(e2)?;
    hlp_glue(r1, perm.map(|i| r2[i]), e1.j_invariant()?)
}

/// Gluing of y² = ∏(x − αᵢ) and y² = ∏(x − βᵢ) along αᵢ ↔ βᵢ
/// (Howe–Leprévost–Poonen). When the bijection comes from an isomorphism of
/// the factors the quotient is again the square of that curve, with
/// j-invariant `j1`.
fn hlp_glue(alpha: [Fq; 3], beta: [Fq; 3], j1: Fq) -> Result<Codomain> {
    let [a1, a2, a3] = alpha;
    let [b1, b2, b3] = beta;
    let f = a1.field();
    let level = a1.level().max(b1.level());
    let a2_ = a1 * (b3 - b2) + a2 * (b1 - b3) + a3 * (b2 - b1);
    if a2_.is_zero() {
        return Ok(Codomain::product(j1, j1));
    }
    let b2_ = b1 * (a3 - a2) + b2 * (a1 - a3) + b3 * (a2 - a1);
    let a1_ = (a3 - a2).square() * (b3 - b2).inv()?
        + (a2 - a1).square() * (b2 - b1).inv()?
        + (a1 - a3).square() * (b1 - b3).inv()?;
    let b1_ = (b3 - b2).square() * (a3 - a2).inv()?
        + (b2 - b1).square() * (a2 - a1).inv()?
        + (b1 - b3).square() * (a1 - a3).inv()?;
    let disc = |r: [Fq; 3]| ((r[0] - r[1]) * (r[1] - r[2]) * (r[0] - r[2])).square();
    let big_a = disc(beta) * a1_ * a2_.inv()?;
    let big_b = disc(alpha) * b1_ * b2_.inv()?;
    let quad = |x2: Fq, x0: Fq| Poly::new(f, level, vec![x0, f.zero(level), x2]);
    let c = quad(big_a * (a2 - a1) * (a1 - a3), big_b * (b2 - b1) * (b1 - b3))
        .mul(&quad(
            big_a * (a3 - a2) * (a2 - a1),
            big_b * (b3 - b2) * (b2 - b1),
        ))
        .mul(&quad(
            big_a * (a1 - a3) * (a3 - a2),
            big_b * (b1 - b3) * (b3 - b2),
        ))
        .scale(-f.one(level));
    Ok(Codomain::Jacobian(Sextic::from_poly(&c)?))
}
