use super::igusa_terms::{I2_TERMS, I4_TERMS, I6_TERMS};
use super::Sextic;
use crate::ec::j_key;
use crate::error::{Error, Result};
use crate::ff::{Fq, Level};

/// Igusa invariants J₂, J₄, J₆, J₈, J₁₀ of a genus-2 curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IgusaInvariants {
    pub j2: Fq,
    pub j4: Fq,
    pub j6: Fq,
    pub j8: Fq,
    pub j10: Fq,
}

fn eval_terms(terms: &[(i64, [u8; 7])], a: &[Fq; 7]) -> Fq {
    let f = a[0].field();
    terms.iter().fold(a[0].zero_like(), |acc, (c, e)| {
        let mono = (0..7).fold(f.int(*c).lift(a[0].level()), |m, i| {
            m * a[i].pow(e[i] as u128)
        });
        acc + mono
    })
}

/// Igusa–Clebsch invariants I₂, I₄, I₆ from the coefficients, I₁₀ the
/// discriminant; then the Igusa J's.
pub fn igusa_invariants(f: &Sextic) -> Result<IgusaInvariants> {
    let field = f.field();
    let a = f.with_nonzero_leading();
    let i2 = eval_terms(I2_TERMS, &a);
    let i4 = eval_terms(I4_TERMS, &a);
    let i6 = eval_terms(I6_TERMS, &a);
    let i10 = f.discriminant();
    if i10.is_zero() {
        return Err(Error::SingularCurve);
    }
    let c = |x: u64| field.elem(x).inv().expect("p > 3");
    let j2 = i2 * c(8);
    let j4 = (field.elem(4) * j2.square() - i4) * c(96);
    let j6 = (field.elem(8) * j2.pow(3) - field.elem(160) * j2 * j4 - i6) * c(576);
    let j8 = (j2 * j6 - j4.square()) * c(4);
    let j10 = i10 * c(4096);
    Ok(IgusaInvariants {
        j2,
        j4,
        j6,
        j8,
        j10,
    })
}

/// Exponents (e₂, e₄, e₆) of the monomials J₂^e₂ J₄^e₄ J₆^e₆ used in the key:
/// total degree ≤ 5 and weight e₂ + 2e₄ + 3e₆ ∈ {5, 10, 15}. Each is divided
/// by J₁₀ to the power weight/5, which makes it invariant under rescaling.
const KEY_MONOMIALS: [([u32; 3], u32); 11] = [
    ([5, 0, 0], 1),
    ([3, 1, 0], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([0, 1, 1], 1),
    ([0, 5, 0], 2),
    ([1, 3, 1], 2),
    ([0, 2, 2], 2),
    ([2, 1, 2], 2),
    ([1, 0, 3], 2),
    ([0, 0, 5], 3),
];

/// Canonical isomorphism-class key: absolute invariants written as
/// comma-separated F_p² tokens.
pub fn igusa_class(f: &Sextic) -> Result<String> {
    let j = igusa_invariants(f)?;
    let inv10 = j.j10.inv()?;
    let tokens: Result<Vec<String>> = KEY_MONOMIALS
        .iter()
        .map(|&([e2, e4, e6], d)| {
            let v = j.j2.pow(e2 as u128)
                * j.j4.pow(e4 as u128)
                * j.j6.pow(e6 as u128)
                * inv10.pow(d as u128);
            v.project(Level::Quad)
                .map(j_key)
                .ok_or(Error::SplittingNotRational)
        })
        .collect();
    Ok(tokens?.join(","))
}
