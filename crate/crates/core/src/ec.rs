//! Supersingular elliptic curves over F_p², Vélu isogenies of degree 2 and 3,
//! and the isogeny graph Gr_1(ℓ, p).

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::ff::{split_roots, Field, Fq, Level, Poly};
use crate::spectra::{explore, Expansion, Neighbor, VertexKind, WeightedMultiGraph};

/// Short Weierstrass curve y² = x³ + a·x + b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EllCurve {
    pub a: Fq,
    pub b: Fq,
}

/// Legendre symbols of every residue mod p (index 0 maps to 0).
pub(crate) struct LegendreTable(Vec<i8>);

impl LegendreTable {
    pub(crate) fn new(p: u64) -> Self {
        let mut t = vec![-1i8; p as usize];
        t[0] = 0;
        for x in 1..p {
            t[((x * x) % p) as usize] = 1;
        }
        LegendreTable(t)
    }

    pub(crate) fn chi(&self, x: u64) -> i64 {
        self.0[x as usize] as i64
    }
}

impl EllCurve {
    /// Builds a curve at quad level or higher; rejects singular coefficients.
    pub fn new(a: Fq, b: Fq) -> Result<EllCurve> {
        let level = a.level().max(b.level()).max(Level::Quad);
        let e = EllCurve {
            a: a.lift(level),
            b: b.lift(level),
        };
        if e.disc_part().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(e)
    }

    fn field(&self) -> &'static Field {
        self.a.field()
    }

    /// 4a³ + 27b²
    fn disc_part(&self) -> Fq {
        let f = self.field();
        f.elem(4) * self.a.pow(3) + f.elem(27) * self.b.square()
    }

    pub fn j_invariant(&self) -> Result<Fq> {
        let f = self.field();
        let four_a3 = f.elem(4) * self.a.pow(3);
        let d = self.disc_part();
        if d.is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(f.elem(1728) * four_a3 * d.inv()?)
    }

    /// A model with the given j-invariant, over the smallest field containing j.
    pub fn from_j(j: Fq) -> EllCurve {
        let f = j.field();
        let level = j.level().max(Level::Quad);
        let (a, b) = if j.is_zero() {
            (f.elem(0), f.elem(1))
        } else if j == f.elem(1728) {
            (f.elem(1), f.elem(0))
        } else {
            let k = f.elem(1728) - j;
            (f.elem(3) * j * k, f.elem(2) * j * k.square())
        };
        EllCurve {
            a: a.lift(level),
            b: b.lift(level),
        }
    }

    /// The quadratic twist by `d`: y² = x³ + a d² x + b d³.
    pub fn twist(&self, d: Fq) -> EllCurve {
        EllCurve {
            a: self.a * d.square(),
            b: self.b * d.pow(3),
        }
    }

    pub fn cubic(&self) -> Poly {
        let f = self.field();
        let level = self.a.level();
        Poly::new(f, level, vec![self.b, self.a, f.zero(level), f.one(level)])
    }

    pub fn rhs(&self, x: Fq) -> Fq {
        (x.square() + self.a) * x + self.b
    }

    /// Number of F_p-points; requires coefficients in F_p.
    pub fn count_points_base(&self) -> Result<u64> {
        let f = self.field();
        let (Some(a), Some(b)) = (self.a.project(Level::Base), self.b.project(Level::Base)) else {
            return Err(Error::ModelNotRational);
        };
        let table = LegendreTable::new(f.p());
        let e = EllCurve { a, b };
        let sum: i64 = (0..f.p())
            .map(|x| table.chi(e.rhs(f.elem(x)).coords()[0]))
            .sum();
        Ok((f.p() as i64 + 1 + sum) as u64)
    }

    /// Number of F_p²-points; requires coefficients in F_p².
    pub fn count_points_quad(&self) -> Result<u64> {
        let f = self.field();
        let (Some(a), Some(b)) = (self.a.project(Level::Quad), self.b.project(Level::Quad)) else {
            return Err(Error::ModelNotRational);
        };
        let table = LegendreTable::new(f.p());
        let e = EllCurve { a, b };
        let n = f.quad_nonresidue();
        // An element of F_p² is a square iff its norm is a square in F_p.
        let sum: i64 = f
            .elements(Level::Quad)
            .map(|x| {
                let [c0, c1, ..] = e.rhs(x).coords();
                let norm = f.elem(c0).square() - f.elem(n) * f.elem(c1).square();
                match (c0, c1) {
                    (0, 0) => 0,
                    _ => table.chi(norm.coords()[0]),
                }
            })
            .sum();
        let q = f.p() * f.p();
        Ok((q as i64 + 1 + sum) as u64)
    }

    /// Twists a supersingular model so that Frobenius over F_p² is −p, i.e.
    /// #E(F_p²) = (p+1)². Every such model has all its 2- and 3-torsion
    /// rational, and any two of them are isogenous over F_p².
    pub fn normalized(&self) -> Result<EllCurve> {
        let f = self.field();
        let p = f.p();
        let target = (p + 1) * (p + 1);
        if self.a.project(Level::Base).is_some() && self.b.project(Level::Base).is_some() {
            // Trace zero over F_p already forces Frobenius −p over F_p².
            if self.count_points_base()? == p + 1 {
                return Ok(*self);
            }
        }
        if self.count_points_quad()? == target {
            return Ok(*self);
        }
        let d = f.quart_modulus();
        let t = self.twist(d);
        if t.count_points_quad()? == target {
            return Ok(t);
        }
        Err(Error::NotSupersingular)
    }

    /// x-coordinates of the nonzero 2-torsion points, sorted.
    pub fn two_torsion(&self) -> Result<Vec<Fq>> {
        split_roots(&self.cubic())?.ok_or(Error::NotSupersingular)
    }

    /// Codomain of the 2-isogeny with kernel ⟨(x0, 0)⟩.
    pub fn velu2(&self, x0: Fq) -> EllCurve {
        let f = self.field();
        let v = f.elem(3) * x0.square() + self.a;
        let w = x0 * v;
        EllCurve {
            a: self.a - f.elem(5) * v,
            b: self.b - f.elem(7) * w,
        }
    }

    /// Image on the codomain of `velu2(x0)` of the 2-torsion point (x1, 0),
    /// x1 ≠ x0; this generates the kernel of the dual isogeny.
    pub fn velu2_dual_kernel(&self, x0: Fq, x1: Fq) -> Result<Fq> {
        let v = self.field().elem(3) * x0.square() + self.a;
        Ok(x1 + v * (x1 - x0).inv()?)
    }

    /// Codomain of the 3-isogeny whose kernel has x-coordinate x0.
    pub fn velu3(&self, x0: Fq) -> EllCurve {
        let f = self.field();
        let gx = f.elem(3) * x0.square() + self.a;
        let v = f.elem(2) * gx;
        let u = f.elem(4) * self.rhs(x0);
        let w = u + x0 * v;
        EllCurve {
            a: self.a - f.elem(5) * v,
            b: self.b - f.elem(7) * w,
        }
    }

    /// x-coordinates of the four order-3 subgroups (3-division polynomial).
    pub fn three_torsion(&self) -> Result<Vec<Fq>> {
        let f = self.field();
        let level = self.a.level();
        let psi3 = Poly::new(
            f,
            level,
            vec![
                -self.a.square(),
                f.elem(12) * self.b,
                f.elem(6) * self.a,
                f.zero(level),
                f.elem(3),
            ],
        );
        split_roots(&psi3)?.ok_or(Error::NotSupersingular)
    }

    /// The ℓ + 1 codomain curves of the degree-ℓ isogenies, one per kernel, in
    /// kernel order. Curves may live in F_p⁴ when kernels are not F_p²-rational.
    pub fn isogenies(&self, l: u64) -> Result<Vec<(Fq, EllCurve)>> {
        match l {
            2 => Ok(self
                .two_torsion()?
                .into_iter()
                .map(|x| (x, self.velu2(x)))
                .collect()),
            3 => Ok(self
                .three_torsion()?
                .into_iter()
                .map(|x| (x, self.velu3(x)))
                .collect()),
            _ => Err(Error::ScaleExceeded(format!(
                "isogeny degree {l} is not supported"
            ))),
        }
    }
}

/// j-invariant of y² = x³ + a·x + b.
pub fn j_invariant(e: &EllCurve) -> Result<Fq> {
    e.j_invariant()
}

/// |Aut(E)/±1| from j alone (valid for p ≥ 5).
pub fn ra_order(j: Fq) -> u64 {
    if j.is_zero() {
        3
    } else if j == j.field().elem(1728) {
        2
    } else {
        1
    }
}

/// |Aut(E)|.
pub fn aut_order(j: Fq) -> u64 {
    2 * ra_order(j)
}

/// Vertex of Gr_1: a supersingular j-invariant with its reduced automorphism order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JVertex {
    pub j: Fq,
    pub ra_order: u64,
}

impl JVertex {
    pub fn new(j: Fq) -> JVertex {
        JVertex {
            j: j.lift(Level::Quad),
            ra_order: ra_order(j),
        }
    }

    pub fn key(&self) -> String {
        j_key(self.j)
    }
}

/// Canonical token for an F_p² element: "c0:c1".
pub fn j_key(j: Fq) -> String {
    j.fmt_coords(Level::Quad)
}

/// Supersingularity by counting points on an F_p-model. The curve must have
/// j ∈ F_p (the test is invariant under twisting).
pub fn is_supersingular(e: &EllCurve) -> Result<bool> {
    let j = e.j_invariant()?;
    let model = if e.a.project(Level::Base).is_some() && e.b.project(Level::Base).is_some() {
        *e
    } else {
        let jb = j.project(Level::Base).ok_or(Error::ModelNotRational)?;
        EllCurve::from_j(jb)
    };
    let p = j.field().p();
    Ok(model.count_points_base()? == p + 1)
}

/// Codomain j-invariants of the ℓ + 1 isogenies of degree ℓ, sorted.
pub fn isogeny_neighbors(e: &EllCurve, l: u64) -> Result<Vec<Fq>> {
    let mut out = Vec::with_capacity(l as usize + 1);
    for (_, c) in e.isogenies(l)? {
        let j = c
            .j_invariant()?
            .project(Level::Quad)
            .ok_or(Error::NotSupersingular)?;
        out.push(j);
    }
    if out.len() != l as usize + 1 {
        return Err(Error::NotSupersingular);
    }
    out.sort();
    Ok(out)
}

/// All supersingular j-invariants in F_p², sorted.
pub fn supersingular_vertices(p: u64) -> Result<Vec<JVertex>> {
    let f = Field::new(p)?;
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for j in f.elements(Level::Base) {
        if is_supersingular(&EllCurve::from_j(j))? {
            let j = j.lift(Level::Quad);
            seen.insert(j);
            queue.push_back(j);
        }
    }
    // Conjugate pairs outside F_p are reached through 2-isogenies.
    while let Some(j) = queue.pop_front() {
        for n in isogeny_neighbors(&EllCurve::from_j(j), 2)? {
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    Ok(seen.into_iter().map(JVertex::new).collect())
}

/// The lexicographically smallest supersingular j-invariant in F_p.
pub fn smallest_supersingular_j(p: u64) -> Result<Fq> {
    let f = Field::new(p)?;
    f.elements(Level::Base)
        .find(|&j| is_supersingular(&EllCurve::from_j(j)).unwrap_or(false))
        .map(|j| j.lift(Level::Quad))
        .ok_or(Error::NotSupersingular)
}

/// Gr_1(ℓ, p): vertices in breadth-first discovery order from the smallest
/// supersingular j in F_p.
pub fn build_gr1(p: u64, l: u64) -> Result<WeightedMultiGraph> {
    build_gr1_with_threads(p, l, 1)
}

pub fn build_gr1_with_threads(p: u64, l: u64, threads: usize) -> Result<WeightedMultiGraph> {
    if !matches!(l, 2 | 3) || p == l {
        return Err(Error::ScaleExceeded(format!("Gr_1 with l = {l}, p = {p}")));
    }
    let j0 = smallest_supersingular_j(p)?;
    let start = Neighbor {
        key: j_key(j0),
        kind: VertexKind::Elliptic,
        model: j0,
    };
    let (graph, _) = explore(1, l, Some(p), l + 1, start, threads, |&j| {
        let neighbors = isogeny_neighbors(&EllCurve::from_j(j), l)?
            .into_iter()
            .map(|n| Neighbor {
                key: j_key(n),
                kind: VertexKind::Elliptic,
                model: n,
            })
            .collect();
        Ok(Expansion {
            ra: ra_order(j),
            neighbors,
        })
    })?;
    Ok(graph)
}
