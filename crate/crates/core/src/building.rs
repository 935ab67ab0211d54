//! The Bruhat–Tits building of PGSp_n(Q_ℓ): apartment coordinates and the
//! affine Weyl action, Lagrangian subspaces over F_q, and the special
//! 1-complex S_n realized on explicit lattices.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectra::{lagrangian_count, GraphVertex, VertexKind, WeightedMultiGraph};

/// Homothety class [a₁,…,aₙ; b₁,…,bₙ] of the lattice ⊕ ℓ^aᵢ uᵢ ⊕ ℓ^bᵢ wᵢ
/// in the fundamental apartment. Stored with minimum coordinate 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ApartmentVertex {
    a: Vec<i64>,
    b: Vec<i64>,
}

impl ApartmentVertex {
    pub fn new(a: Vec<i64>, b: Vec<i64>) -> Result<ApartmentVertex> {
        if a.is_empty() {
            return Err(Error::DimensionTooSmall(0));
        }
        if a.len() != b.len() {
            return Err(Error::IndexOutOfRange {
                index: b.len(),
                len: a.len(),
            });
        }
        Ok(ApartmentVertex::normalized(a, b))
    }

    fn normalized(mut a: Vec<i64>, mut b: Vec<i64>) -> ApartmentVertex {
        let m = a.iter().chain(&b).copied().min().unwrap_or(0);
        a.iter_mut().chain(b.iter_mut()).for_each(|x| *x -= m);
        ApartmentVertex { a, b }
    }

    /// Every canonical vertex of rank n with all coordinates in [0, max].
    pub fn enumerate(n: usize, max: i64) -> Vec<ApartmentVertex> {
        let width = (max + 1) as usize;
        let total = width.pow(2 * n as u32);
        (0..total)
            .filter_map(|mut code| {
                let mut c = Vec::with_capacity(2 * n);
                for _ in 0..2 * n {
                    c.push((code % width) as i64);
                    code /= width;
                }
                if c.iter().min() != Some(&0) {
                    return None;
                }
                let b = c.split_off(n);
                Some(ApartmentVertex { a: c, b })
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    /// ord_ℓ det, taken mod 2n.
    pub fn label(&self) -> u64 {
        let s: i64 = self.a.iter().chain(&self.b).sum();
        s.rem_euclid(2 * self.n() as i64) as u64
    }

    /// Class of the dual lattice: (a; b) ↦ (−b; −a).
    pub fn dual(&self) -> ApartmentVertex {
        let a = self.b.iter().map(|x| -x).collect();
        let b = self.a.iter().map(|x| -x).collect();
        ApartmentVertex::normalized(a, b)
    }

    pub fn is_special(&self) -> bool {
        self.dual() == *self
    }

    /// Whether the class lies in Ver(B_n): some representative L and
    /// primitive L₀ satisfy ℓL₀ ⊆ L ⊆ L₀ with ⟨L, L⟩ ⊆ ℓ. In coordinates the
    /// sums aᵢ + bᵢ take values in {2t+1, 2t+2} for a single t.
    pub fn is_building_vertex(&self) -> bool {
        let sums: Vec<i64> = self.a.iter().zip(&self.b).map(|(x, y)| x + y).collect();
        let lo = *sums.iter().min().unwrap();
        let hi = *sums.iter().max().unwrap();
        match hi - lo {
            0 => true,
            1 => lo.rem_euclid(2) == 1,
            _ => false,
        }
    }

    /// Affine Weyl generator s_i, 1 ≤ i ≤ n+1.
    pub fn weyl_apply(&self, i: usize) -> Result<ApartmentVertex> {
        let n = self.n();
        if i == 0 || i > n + 1 {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: n + 2,
            });
        }
        let (mut a, mut b) = (self.a.clone(), self.b.clone());
        if i == 1 {
            std::mem::swap(&mut a[n - 1], &mut b[n - 1]);
        } else if i <= n {
            a.swap(n - i, n - i + 1);
            b.swap(n - i, n - i + 1);
        } else {
            let (a1, b1) = (a[0], b[0]);
            a[0] = b1 - 1;
            b[0] = a1 + 1;
        }
        Ok(ApartmentVertex::normalized(a, b))
    }
}

impl fmt::Display for ApartmentVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[i64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "[{};{}]", join(&self.a), join(&self.b))
    }
}

fn is_prime(q: u64) -> bool {
    q >= 2
        && (2..)
            .take_while(|d| d * d <= q)
            .all(|d| !q.is_multiple_of(d))
}

/// Standard symplectic pairing on F_q^{2n}: Σ xₖ y_{n+k} − x_{n+k} yₖ.
fn sp_pair(x: &[u64], y: &[u64], q: u64) -> u64 {
    let n = x.len() / 2;
    (0..n).fold(0, |acc, k| {
        (acc + x[k] * y[n + k] % q + q - x[n + k] * y[k] % q) % q
    })
}

/// A maximal totally isotropic subspace of F_q^{2n}, given by the rows of
/// its reduced echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LagrangianSubspace {
    q: u64,
    basis: Vec<Vec<u64>>,
}

impl LagrangianSubspace {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn is_isotropic(&self) -> bool {
        self.basis
            .iter()
            .all(|x| self.basis.iter().all(|y| sp_pair(x, y, self.q) == 0))
    }
}

/// All Lagrangians of F_q^{2n}, sorted by echelon basis.
pub fn lagrangians(n: usize, q: u64) -> Result<Vec<LagrangianSubspace>> {
    if n == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    if !is_prime(q) {
        return Err(Error::BadPrime(q));
    }
    if n > 3 || q > 3 {
        return Err(Error::ScaleExceeded(format!(
            "lagrangians need n <= 3 and q <= 3, got n={n}, q={q}"
        )));
    }
    Ok(enumerate_lagrangians(n, q))
}

fn enumerate_lagrangians(n: usize, q: u64) -> Vec<LagrangianSubspace> {
    let dim = 2 * n;
    let mut out = Vec::new();
    for mask in 0u32..(1 << dim) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let pivots: Vec<usize> = (0..dim).filter(|&c| mask >> c & 1 == 1).collect();
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &pc)| {
                ((pc + 1)..dim)
                    .filter(|c| mask >> c & 1 == 0)
                    .map(move |c| (r, c))
            })
            .collect();
        for mut code in 0..q.pow(free.len() as u32) {
            let mut rows = vec![vec![0u64; dim]; n];
            for (r, &pc) in pivots.iter().enumerate() {
                rows[r][pc] = 1;
            }
            for &(r, c) in &free {
                rows[r][c] = code % q;
                code /= q;
            }
            let isotropic =
                (0..n).all(|i| ((i + 1)..n).all(|j| sp_pair(&rows[i], &rows[j], q) == 0));
            if isotropic {
                out.push(LagrangianSubspace { q, basis: rows });
            }
        }
    }
    out.sort();
    out
}

fn valuation(mut x: i128, l: u64) -> u32 {
    debug_assert!(x != 0);
    let l = l as i128;
    let mut v = 0;
    while x % l == 0 {
        x /= l;
        v += 1;
    }
    v
}

fn inv_mod(a: i128, m: i128) -> i128 {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(m)
}

/// Homothety class of a full-rank Z_ℓ-lattice in Q_ℓ^{2n}, with respect to
/// the symplectic basis u₁,…,uₙ, w₁,…,wₙ. The stored basis is the unique
/// column Hermite form of the representative contained in Z_ℓ^{2n} but not
/// in ℓZ_ℓ^{2n}: column k has zeros above row k, pivot ℓ^eₖ at row k, and
/// entries in row r of other columns reduced into [0, ℓ^e_r).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeRep {
    l: u64,
    n: usize,
    cols: Vec<Vec<i64>>,
}

const MODULUS_LIMIT: i128 = 1 << 62;

impl LatticeRep {
    /// Canonical form of the lattice spanned by `gens`, where ℓ^det_val is
    /// the exact determinant valuation of that span.
    fn canonical(l: u64, n: usize, mut gens: Vec<Vec<i128>>, det_val: u32) -> Result<LatticeRep> {
        let dim = 2 * n;
        let li = l as i128;
        let content = gens
            .iter()
            .flatten()
            .filter(|x| **x != 0)
            .map(|&x| valuation(x, l))
            .min()
            .ok_or_else(|| Error::ScaleExceeded("zero lattice".into()))?;
        let scale = li.pow(content);
        gens.iter_mut().flatten().for_each(|x| *x /= scale);
        let d = det_val
            .checked_sub(dim as u32 * content)
            .ok_or_else(|| Error::ScaleExceeded("inconsistent lattice determinant".into()))?;
        let m = li
            .checked_pow(d + 1)
            .filter(|m| *m < MODULUS_LIMIT)
            .ok_or_else(|| Error::ScaleExceeded(format!("lattice index ℓ^{d} too large")))?;
        gens.iter_mut().flatten().for_each(|x| *x = x.rem_euclid(m));

        let mut basis: Vec<Vec<i128>> = Vec::with_capacity(dim);
        let mut exps = Vec::with_capacity(dim);
        for row in 0..dim {
            let k = gens
                .iter()
                .enumerate()
                .filter(|(_, c)| c[row] != 0)
                .min_by_key(|(_, c)| valuation(c[row], l))
                .map(|(k, _)| k)
                .ok_or_else(|| Error::ScaleExceeded("degenerate lattice".into()))?;
            let mut piv = gens.swap_remove(k);
            let e = valuation(piv[row], l);
            let pe = li.pow(e);
            let u = inv_mod(piv[row] / pe, m);
            piv.iter_mut().for_each(|x| *x = (*x * u).rem_euclid(m));
            for c in gens.iter_mut().filter(|c| c[row] != 0) {
                let f = c[row] / pe;
                c.iter_mut()
                    .zip(&piv)
                    .for_each(|(x, y)| *x = (*x - f * y).rem_euclid(m));
            }
            basis.push(piv);
            exps.push(e);
        }
        if exps.iter().sum::<u32>() != d {
            return Err(Error::ScaleExceeded(
                "inconsistent lattice determinant".into(),
            ));
        }
        for i in 0..dim {
            let pe = li.pow(exps[i]);
            for k in 0..i {
                let q = basis[k][i] / pe;
                if q != 0 {
                    let (head, tail) = basis.split_at_mut(i);
                    head[k]
                        .iter_mut()
                        .zip(&tail[0])
                        .for_each(|(x, y)| *x = (*x - q * y).rem_euclid(m));
                }
            }
        }
        let cols = basis
            .into_iter()
            .map(|c| c.into_iter().map(|x| x as i64).collect())
            .collect();
        Ok(LatticeRep { l, n, cols })
    }

    fn check_prime(l: u64) -> Result<()> {
        if is_prime(l) {
            Ok(())
        } else {
            Err(Error::BadPrime(l))
        }
    }

    /// Z_ℓ^{2n}, the primitive lattice of the fundamental chamber.
    pub fn standard(n: usize, l: u64) -> Result<LatticeRep> {
        LatticeRep::from_apartment(&ApartmentVertex::new(vec![0; n], vec![0; n])?, l)
    }

    pub fn from_apartment(v: &ApartmentVertex, l: u64) -> Result<LatticeRep> {
        LatticeRep::check_prime(l)?;
        let n = v.n();
        let exps: Vec<i64> = v.a.iter().chain(&v.b).copied().collect();
        let mut gens = vec![vec![0i128; 2 * n]; 2 * n];
        for (i, &e) in exps.iter().enumerate() {
            gens[i][i] = (l as i128)
                .checked_pow(e as u32)
                .filter(|x| *x < MODULUS_LIMIT)
                .ok_or_else(|| Error::ScaleExceeded(format!("coordinate {e} too large")))?;
        }
        LatticeRep::canonical(l, n, gens, exps.iter().sum::<i64>() as u32)
    }

    /// Class of the lattice spanned by the given 2n integer columns.
    pub fn from_integer_basis(l: u64, cols: &[Vec<i64>]) -> Result<LatticeRep> {
        LatticeRep::check_prime(l)?;
        let dim = cols.len();
        if dim == 0 || dim % 2 == 1 || cols.iter().any(|c| c.len() != dim) {
            return Err(Error::IndexOutOfRange {
                index: dim,
                len: dim,
            });
        }
        let gens: Vec<Vec<i128>> = cols
            .iter()
            .map(|c| c.iter().map(|&x| x as i128).collect())
            .collect();
        let det = bareiss_det(&gens)
            .ok_or_else(|| Error::ScaleExceeded("determinant overflow".into()))?;
        if det == 0 {
            return Err(Error::ScaleExceeded("singular basis".into()));
        }
        LatticeRep::canonical(l, dim / 2, gens, valuation(det, l))
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> &[Vec<i64>] {
        &self.cols
    }

    pub fn pivot_valuations(&self) -> Vec<u32> {
        self.cols
            .iter()
            .enumerate()
            .map(|(k, c)| valuation(c[k] as i128, self.l))
            .collect()
    }

    fn det_valuation(&self) -> u32 {
        self.pivot_valuations().iter().sum()
    }

    pub fn label(&self) -> u64 {
        self.det_valuation() as u64 % (2 * self.n as u64)
    }

    /// ⟨bᵢ, bⱼ⟩ for the stored basis.
    pub fn gram(&self) -> Vec<Vec<i128>> {
        let n = self.n;
        let pair = |x: &[i64], y: &[i64]| -> i128 {
            (0..n)
                .map(|k| x[k] as i128 * y[n + k] as i128 - x[n + k] as i128 * y[k] as i128)
                .sum()
        };
        self.cols
            .iter()
            .map(|x| self.cols.iter().map(|y| pair(x, y)).collect())
            .collect()
    }

    /// If the Gram matrix is ℓ^c times a unimodular matrix, return c and that
    /// matrix reduced mod ℓ.
    fn special_form(&self) -> Option<(u32, Vec<Vec<u64>>)> {
        let gram = self.gram();
        let c = gram
            .iter()
            .flatten()
            .filter(|x| **x != 0)
            .map(|&x| valuation(x, self.l))
            .min()?;
        let (li, scale) = (self.l as i128, (self.l as i128).pow(c));
        let u: Vec<Vec<u64>> = gram
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| (x / scale).rem_euclid(li) as u64)
                    .collect()
            })
            .collect();
        (rank_mod(u.clone(), self.l) == 2 * self.n).then_some((c, u))
    }

    /// Self-dual class: L* is homothetic to L.
    pub fn is_special(&self) -> bool {
        self.special_form().is_some()
    }

    /// The apartment coordinates, when the class is diagonal in the basis.
    pub fn to_apartment(&self) -> Option<ApartmentVertex> {
        let diagonal = self
            .cols
            .iter()
            .enumerate()
            .all(|(k, c)| c.iter().enumerate().all(|(r, &x)| r == k || x == 0));
        if !diagonal {
            return None;
        }
        let mut e: Vec<i64> = self.pivot_valuations().into_iter().map(i64::from).collect();
        let b = e.split_off(self.n);
        ApartmentVertex::new(e, b).ok()
    }

    /// Hashable text form of the canonical basis, column by column.
    pub fn key(&self) -> String {
        self.cols
            .iter()
            .map(|c| {
                c.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(".")
            })
            .collect::<Vec<_>>()
            .join("/")
    }
}

impl fmt::Display for LatticeRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

fn bareiss_det(m: &[Vec<i128>]) -> Option<i128> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let r = (k + 1..n).find(|&r| a[r][k] != 0)?;
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j]
                    .checked_mul(a[k][k])?
                    .checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = t / prev;
            }
        }
        prev = a[k][k];
    }
    Some(sign * a[n - 1][n - 1])
}

fn rank_mod(mut a: Vec<Vec<u64>>, q: u64) -> usize {
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..a.len()).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, r);
        let inv = inv_mod(a[rank][c] as i128, q as i128) as u64;
        a[rank].iter_mut().for_each(|x| *x = *x * inv % q);
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c];
                let pivot = a[rank].clone();
                a[i].iter_mut()
                    .zip(&pivot)
                    .for_each(|(x, y)| *x = (*x + q * q - f * y % q) % q);
            }
        }
        rank += 1;
    }
    rank
}

/// Columns e₁…eₙ, f₁…fₙ of a symplectic basis for the nondegenerate
/// alternating form `u` over F_q: ⟨eᵢ, fⱼ⟩ = δᵢⱼ, all other pairings 0.
fn symplectic_basis(u: &[Vec<u64>], q: u64) -> Vec<Vec<u64>> {
    let dim = u.len();
    let form = |x: &[u64], y: &[u64]| -> u64 {
        let mut s = 0;
        for i in 0..dim {
            if x[i] == 0 {
                continue;
            }
            for j in 0..dim {
                s = (s + x[i] * u[i][j] % q * y[j]) % q;
            }
        }
        s
    };
    let mut rest: Vec<Vec<u64>> = (0..dim)
        .map(|i| (0..dim).map(|j| u64::from(i == j)).collect())
        .collect();
    let (mut es, mut fs) = (Vec::new(), Vec::new());
    while let Some(ei) = rest.iter().position(|x| x.iter().any(|&c| c != 0)) {
        let e = rest.swap_remove(ei);
        let fi = rest
            .iter()
            .position(|y| form(&e, y) != 0)
            .expect("nondegenerate form");
        let mut f = rest.swap_remove(fi);
        let s = inv_mod(form(&e, &f) as i128, q as i128) as u64;
        f.iter_mut().for_each(|x| *x = *x * s % q);
        for x in rest.iter_mut() {
            let (xf, xe) = (form(x, &f), form(x, &e));
            for k in 0..dim {
                x[k] = (x[k] + q * q - xf * e[k] % q + xe * f[k]) % q;
            }
        }
        es.push(e);
        fs.push(f);
    }
    es.into_iter().chain(fs).collect()
}

/// The N_n(ℓ) lattices L ⊂ L₁ ⊂ ℓ⁻¹L with L₁/L Lagrangian in ℓ⁻¹L/L, as
/// canonical classes in Lagrangian order.
pub fn hecke_neighbors(lat: &LatticeRep, l: u64) -> Result<Vec<LatticeRep>> {
    if l != lat.l {
        return Err(Error::BadPrime(l));
    }
    let (_, u) = lat.special_form().ok_or(Error::NotSpecialVertex)?;
    let n = lat.n;
    let dim = 2 * n;
    let subspaces = lagrangians(n, l)?;
    let s = symplectic_basis(&u, l);
    let det_val = lat.det_valuation() + n as u32;
    let li = l as i128;
    subspaces
        .iter()
        .map(|w| {
            let mut gens: Vec<Vec<i128>> = lat
                .cols
                .iter()
                .map(|c| c.iter().map(|&x| x as i128 * li).collect())
                .collect();
            for row in w.basis() {
                let coords: Vec<i128> = (0..dim)
                    .map(|i| (0..dim).map(|k| (s[k][i] * row[k]) as i128).sum::<i128>() % li)
                    .collect();
                gens.push(
                    (0..dim)
                        .map(|r| (0..dim).map(|i| coords[i] * lat.cols[i][r] as i128).sum())
                        .collect(),
                );
            }
            LatticeRep::canonical(l, n, gens, det_val)
        })
        .collect()
}

/// A radius-r ball in S_n around a special lattice. Edges leave only the
/// interior vertices (depth < r); each interior vertex carries its full
/// Hecke list with multiplicity.
#[derive(Debug, Clone)]
pub struct Ball {
    pub graph: WeightedMultiGraph,
    pub lattices: Vec<LatticeRep>,
    pub depth: Vec<usize>,
    pub labels: Vec<u64>,
    pub radius: usize,
}

impl Ball {
    pub fn is_interior(&self, v: usize) -> bool {
        self.depth[v] < self.radius
    }

    /// Two-colourability of the underlying undirected graph.
    pub fn is_bipartite(&self) -> bool {
        let n = self.graph.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in self.graph.edges.keys() {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut colour: Vec<Option<bool>> = vec![None; n];
        for s in 0..n {
            if colour[s].is_some() {
                continue;
            }
            colour[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let c = colour[u].unwrap();
                for &v in &adj[u] {
                    match colour[v] {
                        None => {
                            colour[v] = Some(!c);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == c => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// Every edge joins a label-0 vertex to a label-n vertex.
    pub fn labels_alternate(&self) -> bool {
        let n = self.graph.g as u64;
        self.graph.edges.keys().all(|&(u, v)| {
            let (a, b) = (self.labels[u], self.labels[v]);
            (a == 0 && b == n) || (a == n && b == 0)
        })
    }

    pub fn label_histogram(&self) -> BTreeMap<u64, usize> {
        let mut h = BTreeMap::new();
        for &x in &self.labels {
            *h.entry(x).or_insert(0) += 1;
        }
        h
    }
}

const BALL_WORK_LIMIT: u64 = 200_000;

pub fn ball(center: &LatticeRep, radius: usize, l: u64, n: usize) -> Result<Ball> {
    if center.n != n || center.l != l {
        return Err(Error::ScaleExceeded(format!(
            "center lattice has n={}, ℓ={}, requested n={n}, ℓ={l}",
            center.n, center.l
        )));
    }
    let degree = lagrangian_count(n as u32, l);
    let work = (0..radius)
        .try_fold(1u64, |acc, _| acc.checked_mul(degree))
        .unwrap_or(u64::MAX);
    if work > BALL_WORK_LIMIT {
        return Err(Error::ScaleExceeded(format!(
            "ball of radius {radius} with degree {degree}"
        )));
    }
    if !center.is_special() {
        return Err(Error::NotSpecialVertex);
    }
    let mut lattices = vec![center.clone()];
    let mut depth = vec![0];
    let mut index: HashMap<LatticeRep, usize> = HashMap::from([(center.clone(), 0)]);
    let mut edges: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut frontier = vec![0];
    for d in 0..radius {
        let expanded: Vec<Result<Vec<LatticeRep>>> = frontier
            .par_iter()
            .map(|&v| hecke_neighbors(&lattices[v], l))
            .collect();
        let mut next = Vec::new();
        for (&v, nbrs) in frontier.iter().zip(expanded) {
            for w in nbrs? {
                let idx = *index.entry(w.clone()).or_insert_with(|| {
                    lattices.push(w);
                    depth.push(d + 1);
                    next.push(lattices.len() - 1);
                    lattices.len() - 1
                });
                *edges.entry((v, idx)).or_insert(0) += 1;
            }
        }
        frontier = next;
    }
    let labels: Vec<u64> = lattices.iter().map(LatticeRep::label).collect();
    let vertices = lattices
        .iter()
        .map(|lat| GraphVertex {
            key: lat.key(),
            kind: VertexKind::Lattice,
            ra: 1,
        })
        .collect();
    let graph = WeightedMultiGraph {
        g: n as u32,
        l,
        p: None,
        degree,
        vertices,
        edges,
    };
    let result = Ball {
        graph,
        lattices,
        depth,
        labels,
        radius,
    };
    for v in (0..result.graph.len()).filter(|&v| result.is_interior(v)) {
        let found = result.graph.out_degree(v);
        if found != degree {
            return Err(Error::IrregularGraph {
                vertex: v,
                found,
                expected: degree,
            });
        }
    }
    if !result.is_bipartite() || !result.labels_alternate() {
        return Err(Error::NotBipartite);
    }
    Ok(result)
}
