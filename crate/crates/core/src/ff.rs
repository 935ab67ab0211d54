//! Exact arithmetic in the tower F_p ⊂ F_p² ⊂ F_p⁴ and dense univariate
//! polynomials over it.
//!
//! F_p² = F_p[t]/(t² − n) with n the least quadratic non-residue mod p, and
//! F_p⁴ = F_p²[s]/(s² − m) with m the smallest non-square of F_p² in the
//! coordinate order. An element always stores four little-endian coordinates
//! in the basis (1, t, s, ts); the [`Level`] only selects which multiplication
//! rule applies, so equality, hashing and ordering do not depend on it.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Mutex;

use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// Position of an element in the tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Base,
    Quad,
    Quart,
}

impl Level {
    /// Extension degree over F_p.
    pub fn degree(self) -> u32 {
        match self {
            Level::Base => 1,
            Level::Quad => 2,
            Level::Quart => 4,
        }
    }

    fn width(self) -> usize {
        self.degree() as usize
    }
}

/// Parameters of the tower over one prime. Obtained through [`Field::new`],
/// which interns one instance per prime for the life of the process.
#[derive(Debug, PartialEq, Eq)]
pub struct Field {
    p: u64,
    quad_nonresidue: u64,
    quart_modulus: [u64; 2],
    quart_nonsquare: [u64; 4],
}

static FIELDS: Lazy<Mutex<HashMap<u64, &'static Field>>> = Lazy::new(|| Mutex::new(HashMap::new()));

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

impl Field {
    /// Returns the tower over `p`. Fails unless `p` is a prime ≥ 5 below 2³².
    pub fn new(p: u64) -> Result<&'static Field> {
        // p⁴ must fit the u128 exponent arithmetic used for Frobenius-type powers.
        if !(5..1 << 32).contains(&p) || !is_prime(p) {
            return Err(Error::BadCharacteristic(p));
        }
        let mut fields = FIELDS.lock().expect("field registry poisoned");
        if let Some(f) = fields.get(&p) {
            return Ok(f);
        }
        let quad_nonresidue = (2..p)
            .find(|&n| pow_mod(n, (p - 1) / 2, p) == p - 1)
            .expect("an odd prime has a non-residue");
        let mut field = Field {
            p,
            quad_nonresidue,
            quart_modulus: [0, 0],
            quart_nonsquare: [0; 4],
        };
        field.quart_modulus = lexicographic_coords(p, 2)
            .find(|c| *c != [0; 4] && !field.is_square_raw(Level::Quad, *c))
            .map(|c| [c[0], c[1]])
            .expect("F_p² has non-squares");
        field.quart_nonsquare = lexicographic_coords(p, 4)
            .find(|c| *c != [0; 4] && !field.is_square_raw(Level::Quart, *c))
            .expect("F_p⁴ has non-squares");
        let leaked: &'static Field = Box::leak(Box::new(field));
        fields.insert(p, leaked);
        Ok(leaked)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The least non-residue n with t² = n.
    pub fn quad_nonresidue(&self) -> u64 {
        self.quad_nonresidue
    }

    /// The non-square m ∈ F_p² with s² = m.
    pub fn quart_modulus(&'static self) -> Fq {
        self.quad(self.quart_modulus[0], self.quart_modulus[1])
    }

    pub fn elem(&'static self, x: u64) -> Fq {
        Fq {
            field: self,
            level: Level::Base,
            c: [x % self.p, 0, 0, 0],
        }
    }

    /// Embeds a signed integer into F_p.
    pub fn int(&'static self, x: i64) -> Fq {
        let p = self.p as i128;
        self.elem((x as i128).rem_euclid(p) as u64)
    }

    pub fn quad(&'static self, c0: u64, c1: u64) -> Fq {
        Fq {
            field: self,
            level: Level::Quad,
            c: [c0 % self.p, c1 % self.p, 0, 0],
        }
    }

    pub fn quart(&'static self, c: [u64; 4]) -> Fq {
        Fq {
            field: self,
            level: Level::Quart,
            c: c.map(|x| x % self.p),
        }
    }

    pub fn zero(&'static self, level: Level) -> Fq {
        Fq {
            field: self,
            level,
            c: [0; 4],
        }
    }

    pub fn one(&'static self, level: Level) -> Fq {
        Fq {
            field: self,
            level,
            c: [1, 0, 0, 0],
        }
    }

    /// Every element of the given level in lexicographic coordinate order.
    pub fn elements(&'static self, level: Level) -> impl Iterator<Item = Fq> {
        lexicographic_coords(self.p, level.width()).map(move |c| Fq {
            field: self,
            level,
            c,
        })
    }

    /// Order of the multiplicative group at `level`, plus one.
    pub fn order(&self, level: Level) -> u128 {
        (self.p as u128).pow(level.degree())
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn mul_quad(&self, a: [u64; 2], b: [u64; 2]) -> [u64; 2] {
        let n = self.quad_nonresidue;
        [
            self.add(self.mul(a[0], b[0]), self.mul(n, self.mul(a[1], b[1]))),
            self.add(self.mul(a[0], b[1]), self.mul(a[1], b[0])),
        ]
    }

    fn add_quad(&self, a: [u64; 2], b: [u64; 2]) -> [u64; 2] {
        [self.add(a[0], b[0]), self.add(a[1], b[1])]
    }

    fn mul_quart(&self, a: [u64; 4], b: [u64; 4]) -> [u64; 4] {
        let (a0, a1) = ([a[0], a[1]], [a[2], a[3]]);
        let (b0, b1) = ([b[0], b[1]], [b[2], b[3]]);
        let lo = self.add_quad(
            self.mul_quad(a0, b0),
            self.mul_quad(self.quart_modulus, self.mul_quad(a1, b1)),
        );
        let hi = self.add_quad(self.mul_quad(a0, b1), self.mul_quad(a1, b0));
        [lo[0], lo[1], hi[0], hi[1]]
    }

    fn inv_base(&self, a: u64) -> u64 {
        pow_mod(a, self.p - 2, self.p)
    }

    fn mul_raw(&self, level: Level, a: [u64; 4], b: [u64; 4]) -> [u64; 4] {
        match level {
            Level::Base => [self.mul(a[0], b[0]), 0, 0, 0],
            Level::Quad => {
                let r = self.mul_quad([a[0], a[1]], [b[0], b[1]]);
                [r[0], r[1], 0, 0]
            }
            Level::Quart => self.mul_quart(a, b),
        }
    }

    /// Euler's criterion on raw coordinates (nonzero input).
    fn is_square_raw(&self, level: Level, a: [u64; 4]) -> bool {
        let mut e = (self.order(level) - 1) / 2;
        let mut base = a;
        let mut acc = [1, 0, 0, 0];
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(level, acc, base);
            }
            base = self.mul_raw(level, base, base);
            e >>= 1;
        }
        acc == [1, 0, 0, 0]
    }
}

fn lexicographic_coords(p: u64, width: usize) -> impl Iterator<Item = [u64; 4]> {
    let total = (p as u128).pow(width as u32);
    (0..total).map(move |mut k| {
        let mut c = [0u64; 4];
        for i in (0..width).rev() {
            c[i] = (k % p as u128) as u64;
            k /= p as u128;
        }
        c
    })
}

/// An element of F_p, F_p² or F_p⁴.
#[derive(Clone, Copy)]
pub struct Fq {
    field: &'static Field,
    level: Level,
    c: [u64; 4],
}

impl Fq {
    pub fn field(&self) -> &'static Field {
        self.field
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn coords(&self) -> [u64; 4] {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c == [0; 4]
    }

    pub fn is_one(&self) -> bool {
        self.c == [1, 0, 0, 0]
    }

    /// The smallest level that contains this element.
    pub fn min_level(&self) -> Level {
        if self.c[2] != 0 || self.c[3] != 0 {
            Level::Quart
        } else if self.c[1] != 0 {
            Level::Quad
        } else {
            Level::Base
        }
    }

    /// Reinterprets the element at a higher level (embedding).
    pub fn lift(self, level: Level) -> Fq {
        Fq {
            level: self.level.max(level),
            ..self
        }
    }

    /// Views the element at a lower level, if it lies there.
    pub fn project(self, level: Level) -> Option<Fq> {
        (self.min_level() <= level).then_some(Fq { level, ..self })
    }

    pub fn zero_like(&self) -> Fq {
        self.field.zero(self.level)
    }

    pub fn one_like(&self) -> Fq {
        self.field.one(self.level)
    }

    pub fn square(self) -> Fq {
        self * self
    }

    pub fn pow(self, mut e: u128) -> Fq {
        let mut base = self;
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse at the element's level.
    pub fn inv(self) -> Result<Fq> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = self.field;
        Ok(match self.level {
            Level::Base => f.elem(f.inv_base(self.c[0])),
            Level::Quad => {
                let norm = f.sub(
                    f.mul(self.c[0], self.c[0]),
                    f.mul(f.quad_nonresidue, f.mul(self.c[1], self.c[1])),
                );
                let ni = f.inv_base(norm);
                Fq {
                    field: f,
                    level: Level::Quad,
                    c: [f.mul(self.c[0], ni), f.mul(f.sub(0, self.c[1]), ni), 0, 0],
                }
            }
            Level::Quart => {
                let a = f.quad(self.c[0], self.c[1]);
                let b = f.quad(self.c[2], self.c[3]);
                let denom = (a * a - f.quart_modulus() * b * b).inv()?;
                let re = a * denom;
                let im = -(b * denom);
                f.quart([re.c[0], re.c[1], im.c[0], im.c[1]])
            }
        })
    }

    /// The p-power Frobenius.
    pub fn frobenius(self) -> Fq {
        self.pow(self.field.p as u128)
    }

    /// Whether the element is a square at its own level.
    pub fn is_square(&self) -> bool {
        self.is_zero() || self.field.is_square_raw(self.level, self.c)
    }

    /// Square root at the element's level (Tonelli–Shanks). Of the two roots
    /// the one with the lexicographically smaller coordinates is returned.
    pub fn sqrt(self) -> Option<Fq> {
        if self.is_zero() {
            return Some(self);
        }
        if !self.is_square() {
            return None;
        }
        let f = self.field;
        let nonsquare = match self.level {
            Level::Base => f.elem(f.quad_nonresidue),
            Level::Quad => f.quart_modulus(),
            Level::Quart => f.quart(f.quart_nonsquare),
        };
        let q1 = f.order(self.level) - 1;
        let s = q1.trailing_zeros();
        let t = q1 >> s;
        let mut z = nonsquare.pow(t);
        let mut x = self.pow(t.div_ceil(2));
        let mut b = self.pow(t);
        let mut m = s;
        while !b.is_one() {
            let mut i = 0;
            let mut b2 = b;
            while !b2.is_one() {
                b2 = b2.square();
                i += 1;
            }
            let mut g = z;
            for _ in 0..(m - i - 1) {
                g = g.square();
            }
            x *= g;
            z = g.square();
            b *= z;
            m = i;
        }
        let neg = -x;
        Some(if neg.c < x.c { neg } else { x })
    }

    /// Formats the first `width` coordinates joined by ':'.
    pub fn fmt_coords(&self, level: Level) -> String {
        self.c[..level.width()]
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(":")
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && self.field.p == other.field.p
    }
}

impl Eq for Fq {}

impl Hash for Fq {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.p.hash(state);
        self.c.hash(state);
    }
}

impl PartialOrd for Fq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order on the coordinate vector (c₀, c₁, c₂, c₃).
impl Ord for Fq {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c.cmp(&other.c).then(self.field.p.cmp(&other.field.p))
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_coords(self.level))
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_coords(self.level))
    }
}

impl Add for Fq {
    type Output = Fq;
    fn add(self, rhs: Fq) -> Fq {
        debug_assert_eq!(self.field.p, rhs.field.p);
        let f = self.field;
        let mut c = [0; 4];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = f.add(self.c[i], rhs.c[i]);
        }
        Fq {
            field: f,
            level: self.level.max(rhs.level),
            c,
        }
    }
}

impl Sub for Fq {
    type Output = Fq;
    fn sub(self, rhs: Fq) -> Fq {
        debug_assert_eq!(self.field.p, rhs.field.p);
        let f = self.field;
        let mut c = [0; 4];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = f.sub(self.c[i], rhs.c[i]);
        }
        Fq {
            field: f,
            level: self.level.max(rhs.level),
            c,
        }
    }
}

impl Neg for Fq {
    type Output = Fq;
    fn neg(self) -> Fq {
        let f = self.field;
        Fq {
            c: self.c.map(|x| f.sub(0, x)),
            ..self
        }
    }
}

impl Mul for Fq {
    type Output = Fq;
    fn mul(self, rhs: Fq) -> Fq {
        debug_assert_eq!(self.field.p, rhs.field.p);
        let f = self.field;
        let level = self.level.max(rhs.level);
        Fq {
            field: f,
            level,
            c: f.mul_raw(level, self.c, rhs.c),
        }
    }
}

impl AddAssign for Fq {
    fn add_assign(&mut self, rhs: Fq) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fq {
    fn sub_assign(&mut self, rhs: Fq) {
        *self = *self - rhs;
    }
}

impl MulAssign for Fq {
    fn mul_assign(&mut self, rhs: Fq) {
        *self = *self * rhs;
    }
}

/// Dense univariate polynomial, coefficients low degree first, trailing
/// zeros stripped. All coefficients live at `level`.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: &'static Field,
    level: Level,
    coeffs: Vec<Fq>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl Poly {
    pub fn new(field: &'static Field, level: Level, coeffs: Vec<Fq>) -> Poly {
        let level = coeffs.iter().fold(level, |l, c| l.max(c.level()));
        let mut poly = Poly {
            field,
            level,
            coeffs: coeffs.into_iter().map(|c| c.lift(level)).collect(),
        };
        poly.trim();
        poly
    }

    /// Builds a polynomial from coefficients (low degree first); the level is
    /// the highest level among them. `coeffs` must be non-empty.
    pub fn from_coeffs(coeffs: &[Fq]) -> Poly {
        let field = coeffs[0].field();
        Poly::new(field, Level::Base, coeffs.to_vec())
    }

    pub fn zero(field: &'static Field, level: Level) -> Poly {
        Poly {
            field,
            level,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &'static Field, level: Level) -> Poly {
        Poly::constant(field.one(level))
    }

    pub fn constant(c: Fq) -> Poly {
        Poly::new(c.field(), c.level(), vec![c])
    }

    /// The monomial x at `level`.
    pub fn x(field: &'static Field, level: Level) -> Poly {
        Poly::new(field, level, vec![field.zero(level), field.one(level)])
    }

    /// ∏ (x − r).
    pub fn from_roots(field: &'static Field, level: Level, roots: &[Fq]) -> Poly {
        roots.iter().fold(Poly::one(field, level), |acc, &r| {
            acc.mul(&Poly::new(field, level, vec![-r, field.one(level)]))
        })
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &'static Field {
        self.field
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs
            .get(i)
            .copied()
            .unwrap_or_else(|| self.field.zero(self.level))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Fq> {
        self.coeffs.last().copied()
    }

    pub fn lift(&self, level: Level) -> Poly {
        Poly::new(self.field, self.level.max(level), self.coeffs.clone())
    }

    /// Views the polynomial at a lower level, if every coefficient lies there.
    pub fn project(&self, level: Level) -> Option<Poly> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.project(level))
            .collect::<Option<Vec<_>>>()?;
        Some(Poly {
            field: self.field,
            level,
            coeffs,
        })
    }

    pub fn eval(&self, x: Fq) -> Fq {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(self.level.max(x.level())), |acc, &c| {
                acc * x + c
            })
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let level = self.level.max(other.level);
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Poly::new(self.field, level, coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let level = self.level.max(other.level);
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        Poly::new(self.field, level, coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let level = self.level.max(other.level);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field, level);
        }
        let mut out = vec![self.field.zero(level); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(self.field, level, out)
    }

    pub fn scale(&self, c: Fq) -> Poly {
        Poly::new(
            self.field,
            self.level.max(c.level()),
            self.coeffs.iter().map(|&a| a * c).collect(),
        )
    }

    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * self.field.elem(i as u64))
            .collect();
        Poly::new(self.field, self.level, coeffs)
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) => self.scale(l.inv().expect("leading coefficient is nonzero")),
            None => self.clone(),
        }
    }

    /// Euclidean division; errors on a zero divisor.
    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dl = divisor.leading().ok_or(Error::DivisionByZero)?;
        let dinv = dl.inv()?;
        let level = self.level.max(divisor.level);
        let dd = divisor.coeffs.len() - 1;
        let mut rem: Vec<Fq> = self.coeffs.iter().map(|c| c.lift(level)).collect();
        if rem.len() <= dd {
            return Ok((
                Poly::zero(self.field, level),
                Poly::new(self.field, level, rem),
            ));
        }
        let mut quot = vec![self.field.zero(level); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd] * dinv;
            quot[k] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= c * d;
            }
        }
        rem.truncate(dd);
        Ok((
            Poly::new(self.field, level, quot),
            Poly::new(self.field, level, rem),
        ))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.divrem(divisor)?.1)
    }

    /// Exact quotient; the caller guarantees divisibility.
    pub fn div_exact(&self, divisor: &Poly) -> Poly {
        let (q, r) = self.divrem(divisor).expect("divisor is nonzero");
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// self^e mod modulus.
    pub fn pow_mod(&self, mut e: u128, modulus: &Poly) -> Result<Poly> {
        let mut base = self.rem(modulus)?;
        let mut acc = Poly::one(self.field, self.level.max(modulus.level)).rem(modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus)?;
            }
            base = base.mul(&base).rem(modulus)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Resultant Res(self, other) by the Euclidean algorithm.
    pub fn resultant(&self, other: &Poly) -> Fq {
        let level = self.level.max(other.level);
        let zero = self.field.zero(level);
        let one = self.field.one(level);
        let (Some(mut da), Some(mut db)) = (self.degree(), other.degree()) else {
            return zero;
        };
        let mut a = self.lift(level);
        let mut b = other.lift(level);
        let mut acc = one;
        loop {
            if db == 0 {
                return acc * b.coeff(0).pow(da as u128);
            }
            let r = a.rem(&b).expect("nonzero divisor");
            let Some(dr) = r.degree() else {
                return zero;
            };
            // Res(a, b) = (−1)^{da·db} · lc(b)^{da − dr} · Res(b, r)
            if (da * db) % 2 == 1 {
                acc = -acc;
            }
            acc *= b.leading().expect("nonzero").pow((da - dr) as u128);
            a = b;
            b = r;
            da = db;
            db = dr;
        }
    }

    /// Squarefree decomposition: pairs (g, k) with self = lc · ∏ g^k, every g
    /// monic, squarefree and pairwise coprime.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let mut c = f.gcd(&f.derivative());
        let mut w = f.div_exact(&c);
        let mut i = 1;
        while w.degree().unwrap_or(0) > 0 {
            let y = w.gcd(&c);
            let z = w.div_exact(&y);
            if z.degree().unwrap_or(0) > 0 {
                out.push((z, i));
            }
            i += 1;
            w = y.clone();
            c = c.div_exact(&y);
        }
        if c.degree().unwrap_or(0) > 0 {
            let p = self.field.p as usize;
            for (g, k) in c.pth_root().squarefree_decomposition() {
                out.push((g, k * p));
            }
        }
        out
    }

    /// For a polynomial in x^p, its p-th root.
    fn pth_root(&self) -> Poly {
        let p = self.field.p as usize;
        let e = (self.field.p as u128).pow(self.level.degree() - 1);
        let coeffs = self.coeffs.iter().step_by(p).map(|c| c.pow(e)).collect();
        Poly::new(self.field, self.level, coeffs)
    }

    /// All roots in the polynomial's own field, with multiplicity, sorted.
    pub fn roots(&self) -> Result<Vec<Fq>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut out = Vec::new();
        let q = self.field.order(self.level);
        let x = Poly::x(self.field, self.level);
        let mut probe = 0u64;
        for (g, k) in self.squarefree_decomposition() {
            let xq = x.pow_mod(q, &g)?;
            let linear = g.gcd(&xq.sub(&x));
            let mut found = Vec::new();
            linear.split_linear(&mut probe, &mut found)?;
            for r in found {
                out.extend(std::iter::repeat_n(r, k));
            }
        }
        out.sort();
        Ok(out)
    }

    /// Equal-degree splitting of a monic product of distinct linear factors.
    fn split_linear(&self, probe: &mut u64, out: &mut Vec<Fq>) -> Result<()> {
        match self.degree() {
            None | Some(0) => return Ok(()),
            Some(1) => {
                out.push(-self.coeff(0));
                return Ok(());
            }
            _ => {}
        }
        let q = self.field.order(self.level);
        loop {
            let delta = probe_element(self.field, self.level, *probe);
            *probe += 1;
            let shifted = Poly::new(
                self.field,
                self.level,
                vec![delta, self.field.one(self.level)],
            );
            let t = shifted
                .pow_mod((q - 1) / 2, self)?
                .sub(&Poly::one(self.field, self.level));
            let d = self.gcd(&t);
            let dd = d.degree().unwrap_or(0);
            if dd > 0 && Some(dd) < self.degree() {
                let rest = self.div_exact(&d);
                d.split_linear(probe, out)?;
                rest.split_linear(probe, out)?;
                return Ok(());
            }
        }
    }
}

/// Deterministic probe sequence for equal-degree splitting.
fn probe_element(field: &'static Field, level: Level, counter: u64) -> Fq {
    let mut state = counter.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut c = [0u64; 4];
    for ci in c.iter_mut().take(level.width()) {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        *ci = z % field.p;
    }
    Fq { field, level, c }
}

/// Roots of `f`, trying its own level first and then F_p⁴, until `f` splits
/// completely. Returns `None` if it does not split in F_p⁴.
pub fn split_roots(f: &Poly) -> Result<Option<Vec<Fq>>> {
    let deg = f.degree().ok_or(Error::ZeroPolynomial)?;
    let mut level = f.level().max(Level::Quad);
    loop {
        let roots = f.lift(level).roots()?;
        if roots.len() == deg {
            return Ok(Some(roots));
        }
        if level == Level::Quart {
            return Ok(None);
        }
        level = Level::Quart;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f13() -> &'static Field {
        Field::new(13).unwrap()
    }

    #[test]
    fn tower_parameters_for_13() {
        let f = f13();
        assert_eq!(f.quad_nonresidue(), 2);
        // -2 is a square mod 13, so t (norm -2) is a square in F_169.
        assert!(!f.quart_modulus().is_square());
    }

    #[test]
    fn rejects_bad_characteristic() {
        for p in [0, 1, 2, 3, 4, 9, 15] {
            assert!(matches!(Field::new(p), Err(Error::BadCharacteristic(_))));
        }
    }

    #[test]
    fn inverse_examples() {
        let f = f13();
        assert_eq!(f.elem(2).inv().unwrap(), f.elem(7));
        assert_eq!(f.elem(1).inv().unwrap(), f.elem(1));
        let t = f.quad(0, 1);
        assert_eq!(t.inv().unwrap(), f.quad(0, 7));
        assert_eq!(f.elem(0).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn sqrt_examples() {
        let f = f13();
        assert_eq!(f.elem(4).sqrt(), Some(f.elem(2)));
        assert_eq!(f.elem(2).sqrt(), None);
        assert!((0..13).all(|x| f.elem(x).square() != f.elem(2)));
        assert_eq!(f.elem(0).sqrt(), Some(f.elem(0)));
        let r = f.elem(2).lift(Level::Quad).sqrt().unwrap();
        assert_eq!(r.square(), f.elem(2));
        assert_eq!(r, f.quad(0, 1));
    }

    #[test]
    fn exactly_half_of_units_are_nonresidues() {
        for p in [5u64, 7, 13, 37] {
            let f = Field::new(p).unwrap();
            let none = (1..p).filter(|&x| f.elem(x).sqrt().is_none()).count();
            assert_eq!(none as u64, (p - 1) / 2);
        }
    }

    #[test]
    fn sqrt_at_every_level() {
        let f = Field::new(7).unwrap();
        for level in [Level::Quad, Level::Quart] {
            for a in f.elements(level).step_by(7) {
                let a2 = a.square();
                let r = a2.sqrt().expect("squares have roots");
                assert_eq!(r.square(), a2);
                assert!(r.coords() <= (-r).coords());
            }
        }
    }

    #[test]
    fn frobenius_examples() {
        let f = f13();
        assert_eq!(f.elem(5).frobenius(), f.elem(5));
        assert_eq!(f.quad(0, 1).frobenius(), f.quad(0, 12));
        assert!(f.zero(Level::Quad).frobenius().is_zero());
    }

    #[test]
    fn quart_inverse_and_frobenius_order() {
        let f = Field::new(11).unwrap();
        for a in f.elements(Level::Quart).skip(1).step_by(97) {
            assert!((a * a.inv().unwrap()).is_one());
            let mut b = a;
            for _ in 0..4 {
                b = b.frobenius();
            }
            assert_eq!(b, a);
        }
    }

    #[test]
    fn roots_examples() {
        let f = f13();
        let x2m1 = Poly::from_coeffs(&[f.int(-1), f.elem(0), f.elem(1)]);
        assert_eq!(x2m1.roots().unwrap(), vec![f.elem(1), f.elem(12)]);
        let x3m1 =
            Poly::from_coeffs(&[f.int(-1), f.elem(0), f.elem(0), f.elem(1)]).lift(Level::Quad);
        let r = x3m1.roots().unwrap();
        let brute: Vec<Fq> = f
            .elements(Level::Quad)
            .filter(|&a| x3m1.eval(a).is_zero())
            .collect();
        assert_eq!(r, brute);
        assert_eq!(r.len(), 3);
        let x2m2 = Poly::from_coeffs(&[f.int(-2), f.elem(0), f.elem(1)]);
        assert!(x2m2.roots().unwrap().is_empty());
        assert_eq!(
            Poly::zero(f, Level::Base).roots(),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn roots_with_multiplicity_and_pth_powers() {
        let f = Field::new(5).unwrap();
        let l = Level::Quad;
        let r = [f.quad(1, 2), f.quad(1, 2), f.quad(3, 0)];
        let g = Poly::from_roots(f, l, &r);
        // (x - a)^5 has zero derivative.
        let five = Poly::from_roots(f, l, &[f.quad(2, 1); 5]);
        let h = g.mul(&five);
        let mut expect = r.to_vec();
        expect.extend([f.quad(2, 1); 5]);
        expect.sort();
        assert_eq!(h.roots().unwrap(), expect);
    }

    #[test]
    fn resultant_detects_common_roots() {
        let f = f13();
        let a = Poly::from_roots(f, Level::Base, &[f.elem(1), f.elem(2)]);
        let b = Poly::from_roots(f, Level::Base, &[f.elem(2), f.elem(5)]);
        let c = Poly::from_roots(f, Level::Base, &[f.elem(3)]);
        assert!(a.resultant(&b).is_zero());
        // Res(∏(x-a_i), x-3) = ∏(a_i - 3)·(−1)^{...}: (1-3)(2-3) = 2
        assert_eq!(a.resultant(&c), f.elem(2));
    }
}
