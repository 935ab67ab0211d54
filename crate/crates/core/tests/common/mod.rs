//! Exact spectrum oracle: characteristic polynomial of the integer
//! random-walk numerator by Faddeev–LeVerrier over Q, real roots isolated
//! with Sturm sequences and bisection.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use sspectra::spectra::{random_walk_matrix, WeightedMultiGraph};

type Q = BigRational;
/// Coefficients, constant term first, no trailing zeros.
type Poly = Vec<Q>;

fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn eval(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

fn derivative(p: &[Q]) -> Poly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * q(i as i64))
            .collect(),
    )
}

fn divrem(a: &[Q], b: &[Q]) -> (Poly, Poly) {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quo = vec![Q::zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / b.last().unwrap();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        quo[shift] = f;
        r.pop();
        r = trim(r);
    }
    (trim(quo), r)
}

fn monic(p: Poly) -> Poly {
    let lead = p.last().unwrap().clone();
    p.into_iter().map(|c| c / &lead).collect()
}

fn gcd(a: &[Q], b: &[Q]) -> Poly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = divrem(&a, &b).1;
        a = b;
        b = r;
    }
    monic(a)
}

/// det(λI − A), constant term first.
pub fn char_poly(a: &[Vec<Q>]) -> Poly {
    let n = a.len();
    let mut c = vec![Q::zero(); n + 1];
    c[n] = Q::one();
    let mut m = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Q::zero();
                for t in 0..n {
                    if !a[i][t].is_zero() && !m[t][j].is_zero() {
                        s += &a[i][t] * &m[t][j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &c[n - k + 1];
        }
        m = next;
        let mut tr = Q::zero();
        for i in 0..n {
            for t in 0..n {
                if !a[i][t].is_zero() && !m[t][i].is_zero() {
                    tr += &a[i][t] * &m[t][i];
                }
            }
        }
        c[n - k] = -tr / q(k as i64);
    }
    c
}

struct Sturm(Vec<Poly>);

impl Sturm {
    fn new(p: &[Q]) -> Sturm {
        let mut chain = vec![trim(p.to_vec()), derivative(p)];
        while !chain.last().unwrap().is_empty() {
            let k = chain.len();
            let r = divrem(&chain[k - 2], &chain[k - 1]).1;
            chain.push(r.into_iter().map(|c| -c).collect());
        }
        chain.pop();
        Sturm(chain)
    }

    fn changes(&self, x: &Q) -> usize {
        let signs: Vec<i32> = self
            .0
            .iter()
            .map(|p| {
                let v = eval(p, x);
                if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct roots in (a, b]; neither endpoint may be a root.
    fn count(&self, a: &Q, b: &Q) -> usize {
        self.changes(a) - self.changes(b)
    }
}

/// Real roots of p in (lo, hi], with multiplicity, each isolated to width
/// below eps. All roots must be real and lie in the interval.
pub fn real_roots(p: &[Q], lo: Q, hi: Q, eps: &Q) -> Vec<f64> {
    // parts[k] has as roots the roots of multiplicity > k
    let mut parts = Vec::new();
    let mut rest = trim(p.to_vec());
    while rest.len() > 1 {
        let g = gcd(&rest, &derivative(&rest));
        parts.push(divrem(&rest, &g).0);
        rest = g;
    }
    let radical = &parts[0];
    let chains: Vec<Sturm> = parts.iter().map(|p| Sturm::new(p)).collect();
    let avoid = |x: Q, step: &Q| {
        let mut x = x;
        while eval(radical, &x).is_zero() {
            x += step;
        }
        x
    };
    let tiny = eps / q(1 << 20);
    let lo = avoid(lo, &tiny);
    let hi = avoid(hi, &tiny);
    let mut out = Vec::new();
    let mut stack = vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        let n = chains[0].count(&a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 && &(&b - &a) < eps {
            let mult = chains.iter().filter(|c| c.count(&a, &b) == 1).count();
            let mid = ((&a + &b) / q(2)).to_f64().unwrap();
            out.extend(std::iter::repeat_n(mid, mult));
            continue;
        }
        let width = &b - &a;
        let mid = avoid((&a + &b) / q(2), &(&width / q(1 << 20)));
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }
    out.sort_by(|x, y| y.total_cmp(x));
    out
}

/// Eigenvalues of the random-walk operator, descending, from the exact
/// characteristic polynomial.
pub fn oracle_eigenvalues(g: &WeightedMultiGraph, eps: f64) -> Vec<f64> {
    let rw = random_walk_matrix(g).expect("regular graph");
    let a: Vec<Vec<Q>> = rw
        .numer
        .iter()
        .map(|r| r.iter().map(|&x| q(x as i64)).collect())
        .collect();
    let cp = char_poly(&a);
    let d = rw.denom as i64;
    let eps_q = Q::from_float(eps * d as f64).expect("finite tolerance");
    // eigenvalues of the numerator lie in [−d, d]
    let roots = real_roots(
        &cp,
        q(-d - 1) - Q::new(1.into(), 3.into()),
        q(d + 1) + Q::new(1.into(), 7.into()),
        &eps_q,
    );
    assert_eq!(roots.len(), g.len(), "all eigenvalues real");
    roots.into_iter().map(|r| r / d as f64).collect()
}

/// Largest deviation between two descending spectra.
pub fn max_deviation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
