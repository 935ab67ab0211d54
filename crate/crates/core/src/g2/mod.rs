//! Genus-2 curves y² = f(x) with deg f ∈ {5, 6}, Richelot (2,2)-isogenies,
//! elliptic products and the superspecial graph Gr_2(2, p).

mod graph;
mod igusa;
mod igusa_terms;
mod product;

use std::fmt;

use crate::ec::{j_key, EllCurve};
use crate::error::{Error, Result};
use crate::ff::{split_roots, Field, Fq, Level, Poly};

pub use graph::{build_gr2, build_gr2_with_models, vertex_ra, G2Model};
pub use igusa::{igusa_class, igusa_invariants, IgusaInvariants};
pub use product::{glue_along_2torsion, product_kernel_codomain, product_kernels, ProductKernel};

/// A point of the projective line; finite points sort before ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PRoot {
    Finite(Fq),
    Infinity,
}

impl PRoot {
    fn homogeneous(self, field: &'static Field) -> (Fq, Fq) {
        match self {
            PRoot::Finite(x) => (x, field.one(x.level())),
            PRoot::Infinity => (field.one(Level::Base), field.zero(Level::Base)),
        }
    }

    fn from_homogeneous(x: Fq, z: Fq) -> Result<PRoot> {
        if z.is_zero() {
            if x.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(PRoot::Infinity)
        } else {
            Ok(PRoot::Finite(x * z.inv()?))
        }
    }
}

/// A perfect matching of the six root indices: three pairs (i, j), i < j,
/// listed by increasing first index.
pub type Matching = [(usize, usize); 3];

/// The 15 perfect matchings of {0..5} in lexicographic order.
pub fn all_matchings() -> Vec<Matching> {
    fn rec(rest: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Matching>) {
        if rest.is_empty() {
            out.push([acc[0], acc[1], acc[2]]);
            return;
        }
        let a = rest[0];
        for k in 1..rest.len() {
            let others: Vec<usize> = rest[1..]
                .iter()
                .copied()
                .filter(|&x| x != rest[k])
                .collect();
            acc.push((a, rest[k]));
            rec(&others, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::with_capacity(15);
    rec(&[0, 1, 2, 3, 4, 5], &mut Vec::new(), &mut out);
    out
}

/// Whether two matchings have no pair in common.
pub fn matchings_disjoint(a: &Matching, b: &Matching) -> bool {
    a.iter().all(|p| !b.contains(p))
}

/// y² = Σ cᵢ xⁱ with deg ∈ {5, 6} and nonzero discriminant.
#[derive(Clone, PartialEq, Eq)]
pub struct Sextic {
    coeffs: [Fq; 7],
}

impl fmt::Debug for Sextic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sextic{:?}", self.coeffs)
    }
}

impl Sextic {
    pub fn new(coeffs: [Fq; 7]) -> Result<Sextic> {
        let level = coeffs.iter().fold(Level::Quad, |l, c| l.max(c.level()));
        let s = Sextic {
            coeffs: coeffs.map(|c| c.lift(level)),
        };
        if s.coeffs[6].is_zero() && s.coeffs[5].is_zero() {
            return Err(Error::SingularCurve);
        }
        if s.discriminant().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(s)
    }

    pub fn from_poly(f: &Poly) -> Result<Sextic> {
        if f.degree().is_none_or(|d| d > 6) {
            return Err(Error::SingularCurve);
        }
        Sextic::new(std::array::from_fn(|i| f.coeff(i)))
    }

    pub fn field(&self) -> &'static Field {
        self.coeffs[0].field()
    }

    pub fn level(&self) -> Level {
        self.coeffs[0].level()
    }

    pub fn coeffs(&self) -> &[Fq; 7] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        if self.coeffs[6].is_zero() {
            5
        } else {
            6
        }
    }

    pub fn poly(&self) -> Poly {
        Poly::new(self.field(), self.level(), self.coeffs.to_vec())
    }

    /// Views the curve over a lower level, if its coefficients allow.
    pub fn project(&self, level: Level) -> Option<Sextic> {
        let c: Option<Vec<Fq>> = self.coeffs.iter().map(|c| c.project(level)).collect();
        Some(Sextic {
            coeffs: c?.try_into().ok()?,
        })
    }

    /// The binary sextic F(αx + βz, γx + δz), as an affine polynomial.
    pub fn transform_poly(&self, m: [[Fq; 2]; 2]) -> Poly {
        let f = self.field();
        let level = m
            .iter()
            .flatten()
            .fold(self.level(), |l, c| l.max(c.level()));
        let num = Poly::new(f, level, vec![m[0][1], m[0][0]]);
        let den = Poly::new(f, level, vec![m[1][1], m[1][0]]);
        let mut acc = Poly::zero(f, level);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = Poly::constant(c.lift(level));
            for _ in 0..i {
                term = term.mul(&num);
            }
            for _ in i..6 {
                term = term.mul(&den);
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Change of variable by a Möbius matrix; fails if the result is degenerate.
    pub fn transform(&self, m: [[Fq; 2]; 2]) -> Result<Sextic> {
        Sextic::from_poly(&self.transform_poly(m))
    }

    /// An equivalent model with c₆ ≠ 0, via a determinant-one shear
    /// (x, z) ↦ (x, z + c·x); unchanged when already of degree 6.
    pub(crate) fn with_nonzero_leading(&self) -> [Fq; 7] {
        if !self.coeffs[6].is_zero() {
            return self.coeffs;
        }
        let f = self.field();
        let one = f.one(self.level());
        let zero = f.zero(self.level());
        for c in f.elements(Level::Quad) {
            // Leading coefficient after the shear is F(1, c).
            let lead = (0..7).fold(zero, |acc, i| acc + self.coeffs[i] * c.pow(6 - i as u128));
            if !lead.is_zero() {
                let p = self.transform_poly([[one, zero], [c.lift(self.level()), one]]);
                return std::array::from_fn(|i| p.coeff(i));
            }
        }
        unreachable!("a nonzero sextic form has at most six roots on the line")
    }

    /// Discriminant of the binary sextic form (a6¹⁰ ∏ (rᵢ − rⱼ)²).
    pub fn discriminant(&self) -> Fq {
        let c = self.with_nonzero_leading();
        let f = Poly::new(self.field(), self.level(), c.to_vec());
        let res = f.resultant(&f.derivative());
        -(res * c[6].inv().expect("leading coefficient is nonzero"))
    }

    /// The six roots on the projective line, sorted (∞ last when deg f = 5).
    pub fn roots(&self) -> Result<Vec<PRoot>> {
        let f = self.poly();
        let finite = split_roots(&f)?.ok_or(Error::SplittingNotRational)?;
        let mut out: Vec<PRoot> = finite.into_iter().map(PRoot::Finite).collect();
        if self.degree() == 5 {
            out.push(PRoot::Infinity);
        }
        out.sort();
        Ok(out)
    }
}

/// f = c·g₁g₂g₃ with each gᵢ the quadratic (or linear, when the pair
/// contains ∞) whose roots are one pair of the matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadSplitting {
    pub matching: Matching,
    pub g: [Poly; 3],
    /// det of the rows (constant, linear, quadratic) of g₁, g₂, g₃.
    pub delta: Fq,
}

fn pair_poly(field: &'static Field, level: Level, a: PRoot, b: PRoot) -> Poly {
    let lin = |r: PRoot| match r {
        PRoot::Finite(x) => Poly::new(field, level, vec![-x, field.one(level)]),
        PRoot::Infinity => Poly::one(field, level),
    };
    lin(a).mul(&lin(b))
}

fn det3(m: [[Fq; 3]; 3]) -> Fq {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn splitting_delta(g: &[Poly; 3]) -> Fq {
    det3(std::array::from_fn(|i| {
        std::array::from_fn(|k| g[i].coeff(k))
    }))
}

/// Splitting for one matching of the given sorted root list; the factors
/// must descend to the curve's field.
pub fn splitting_for(f: &Sextic, roots: &[PRoot], matching: Matching) -> Result<QuadSplitting> {
    let field = f.field();
    let g: [Poly; 3] = matching
        .map(|(i, j)| pair_poly(field, Level::Quart, roots[i], roots[j]).project(f.level()))
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::SplittingNotRational)?
        .try_into()
        .expect("three factors");
    let delta = splitting_delta(&g);
    Ok(QuadSplitting { matching, g, delta })
}

/// All 15 quadratic splittings, in the order of [`all_matchings`] on the
/// sorted roots.
pub fn quadratic_splittings(f: &Sextic) -> Result<Vec<QuadSplitting>> {
    let roots = f.roots()?;
    all_matchings()
        .into_iter()
        .map(|m| splitting_for(f, &roots, m))
        .collect()
}

/// Codomain of a (2,2)-isogeny, up to isomorphism over the algebraic closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Codomain {
    Jacobian(Sextic),
    /// An elliptic product given by its two j-invariants, sorted.
    Product(Fq, Fq),
}

impl Codomain {
    pub fn product(j1: Fq, j2: Fq) -> Codomain {
        let (a, b) = (j1.lift(Level::Quad), j2.lift(Level::Quad));
        if a <= b {
            Codomain::Product(a, b)
        } else {
            Codomain::Product(b, a)
        }
    }

    /// Canonical vertex key: the Igusa class for Jacobians, "j1|j2" for products.
    pub fn key(&self) -> Result<String> {
        match self {
            Codomain::Jacobian(s) => igusa_class(s),
            Codomain::Product(a, b) => Ok(product_key(*a, *b)),
        }
    }
}

pub fn product_key(j1: Fq, j2: Fq) -> String {
    let (a, b) = if j1 <= j2 { (j1, j2) } else { (j2, j1) };
    format!("{}|{}", j_key(a), j_key(b))
}

/// H₁ = δ⁻¹(g₂′g₃ − g₂g₃′) and cyclically.
fn richelot_h(s: &QuadSplitting) -> Result<[Poly; 3]> {
    let dinv = s.delta.inv()?;
    Ok(std::array::from_fn(|i| {
        let (gj, gk) = (&s.g[(i + 1) % 3], &s.g[(i + 2) % 3]);
        gj.derivative()
            .mul(gk)
            .sub(&gj.mul(&gk.derivative()))
            .scale(dinv)
    }))
}

/// Codomain curve of a splitting with δ ≠ 0, together with the matching on
/// its sorted roots that defines the dual isogeny.
pub fn richelot_with_dual(s: &QuadSplitting) -> Result<(Sextic, Matching)> {
    let h = richelot_h(s)?;
    let c = Sextic::from_poly(&h[0].mul(&h[1]).mul(&h[2]))?;
    let roots = c.roots()?;
    let mut dual = [(0, 0); 3];
    for (slot, hi) in dual.iter_mut().zip(&h) {
        let mut idx: Vec<usize> = split_roots(hi)?
            .ok_or(Error::SplittingNotRational)?
            .into_iter()
            .map(|r| {
                roots
                    .iter()
                    .position(|&q| q == PRoot::Finite(r))
                    .expect("root of a factor")
            })
            .collect();
        if idx.len() == 1 {
            idx.push(roots.len() - 1);
        }
        idx.sort();
        *slot = (idx[0], idx[1]);
    }
    dual.sort();
    Ok((c, dual))
}

/// j-invariant of y² = c₃X³ + c₂X² + c₁X + c₀ (c₃ ≠ 0).
fn j_of_cubic(c: [Fq; 4]) -> Result<Fq> {
    let f = c[0].field();
    let inv = c[3].inv()?;
    let (b2, b1, b0) = (c[2] * inv, c[1] * inv, c[0] * inv);
    let third = f.elem(3).inv()?;
    let a = b1 - b2.square() * third;
    let b = f.elem(2) * b2.pow(3) * f.elem(27).inv()? - b2 * b1 * third + b0;
    EllCurve { a, b }.j_invariant()
}

/// Degenerate Richelot step (δ = 0): the three quadratics span a pencil
/// containing two squares S₁, S₂; with gᵢ = αᵢS₁ + βᵢS₂ the codomain is
/// E₁ × E₂, E₁: y² = ∏(αᵢX + βᵢ), E₂: y² = ∏(αᵢ + βᵢX).
fn degenerate_codomain(s: &QuadSplitting) -> Result<Codomain> {
    let field = s.delta.field();
    let q = Level::Quart;
    let vecs: Vec<[Fq; 3]> =
        s.g.iter()
            .map(|g| std::array::from_fn(|k| g.coeff(k).lift(q)))
            .collect();
    let indep = |u: &[Fq; 3], v: &[Fq; 3]| {
        (0..3).any(|i| (0..3).any(|k| !(u[i] * v[k] - u[k] * v[i]).is_zero()))
    };
    let (u, v) = if indep(&vecs[0], &vecs[1]) {
        (vecs[0], vecs[1])
    } else {
        (vecs[0], vecs[2])
    };
    // disc(λu + μv) = Aλ² + Bλμ + Cμ² with disc(c0 + c1x + c2x²) = c1² − 4c0c2.
    let four = field.elem(4);
    let a = u[1].square() - four * u[0] * u[2];
    let b = field.elem(2) * u[1] * v[1] - four * (u[0] * v[2] + u[2] * v[0]);
    let c = v[1].square() - four * v[0] * v[2];
    let pencil_roots: [(Fq, Fq); 2] = if a.is_zero() {
        [(field.one(q), field.zero(q)), (-c, b)]
    } else {
        let r = (b.square() - four * a * c)
            .sqrt()
            .ok_or(Error::SplittingNotRational)?;
        let inv = (field.elem(2) * a).inv()?;
        [
            ((-b + r) * inv, field.one(q)),
            ((-b - r) * inv, field.one(q)),
        ]
    };
    let squares: Vec<[Fq; 3]> = pencil_roots
        .iter()
        .map(|&(l, m)| std::array::from_fn(|k| l * u[k] + m * v[k]))
        .collect();
    let (s1, s2) = (squares[0], squares[1]);
    let (i, k) = (0..3)
        .flat_map(|i| (i + 1..3).map(move |k| (i, k)))
        .find(|&(i, k)| !(s1[i] * s2[k] - s1[k] * s2[i]).is_zero())
        .ok_or(Error::SingularCurve)?;
    let det_inv = (s1[i] * s2[k] - s1[k] * s2[i]).inv()?;
    let coords: Vec<(Fq, Fq)> = vecs
        .iter()
        .map(|g| {
            (
                (g[i] * s2[k] - g[k] * s2[i]) * det_inv,
                (s1[i] * g[k] - s1[k] * g[i]) * det_inv,
            )
        })
        .collect();
    let cubic = |lin: &dyn Fn(Fq, Fq) -> [Fq; 2]| -> [Fq; 4] {
        let p = coords.iter().fold(Poly::one(field, q), |acc, &(al, be)| {
            let [c0, c1] = lin(al, be);
            acc.mul(&Poly::new(field, q, vec![c0, c1]))
        });
        std::array::from_fn(|k| p.coeff(k))
    };
    let j1 = j_of_cubic(cubic(&|al, be| [be, al]))?;
    let j2 = j_of_cubic(cubic(&|al, be| [al, be]))?;
    let j1 = j1.project(Level::Quad).ok_or(Error::NotSupersingular)?;
    let j2 = j2.project(Level::Quad).ok_or(Error::NotSupersingular)?;
    Ok(Codomain::product(j1, j2))
}

/// Codomain of the Richelot isogeny attached to a splitting.
pub fn richelot_codomain(s: &QuadSplitting) -> Result<Codomain> {
    if s.delta.is_zero() {
        degenerate_codomain(s)
    } else {
        Ok(Codomain::Jacobian(richelot_with_dual(s)?.0))
    }
}

/// Möbius transformations of the line preserving the root set of f, i.e.
/// |Aut(C)/⟨ι⟩| = |RA(Jac C)|.
pub fn jacobian_ra_order(f: &Sextic) -> Result<u64> {
    let roots = f.roots()?;
    let field = f.field();
    let pts: Vec<(Fq, Fq)> = roots.iter().map(|r| r.homogeneous(field)).collect();
    let lform = |r: (Fq, Fq), p: (Fq, Fq)| r.1 * p.0 - r.0 * p.1;
    // Image of the root set under the map sending t0 ↦ 0, t1 ↦ ∞, t2 ↦ 1.
    let image = |t: [usize; 3]| -> Result<Vec<PRoot>> {
        let (r0, r1, r2) = (pts[t[0]], pts[t[1]], pts[t[2]]);
        let (s0, s1) = (lform(r0, r2), lform(r1, r2));
        let mut img = pts
            .iter()
            .map(|&p| PRoot::from_homogeneous(lform(r0, p) * s1, lform(r1, p) * s0))
            .collect::<Result<Vec<_>>>()?;
        img.sort();
        Ok(img)
    };
    let base = image([0, 1, 2])?;
    let mut count = 0;
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                if a != b && b != c && a != c && image([a, b, c])? == base {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}
