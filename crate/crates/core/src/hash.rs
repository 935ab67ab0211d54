//! Charles–Goren–Lauter style hashing: a message drives a non-backtracking
//! walk, in Gr_1(2, p) one bit per step, or through Richelot isogenies in
//! Gr_2(2, p) three bits per step.

use crate::ec::{smallest_supersingular_j, EllCurve};
use crate::error::{Error, Result};
use crate::ff::Fq;
use crate::g2::{
    all_matchings, build_gr2_with_models, igusa_class, matchings_disjoint, quadratic_splittings,
    richelot_with_dual, G2Model, Matching, Sextic,
};

/// Message bits in reading order: each byte most significant bit first.
pub fn bits_from_bytes(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&b| (0..8).rev().map(move |i| b >> i & 1 == 1))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cgl1Step {
    /// The two non-backtracking kernels, x-coordinates in ascending order.
    pub options: [Fq; 2],
    pub incoming: Fq,
    pub chosen: Fq,
    /// j-invariant reached by the step.
    pub j: Fq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cgl1Walk {
    pub start_j: Fq,
    pub steps: Vec<Cgl1Step>,
    pub digest: u64,
}

impl Cgl1Walk {
    pub fn final_j(&self) -> Fq {
        self.steps.last().map_or(self.start_j, |s| s.j)
    }
}

/// Genus-one walk from E₀ (smallest supersingular j in F_p, model with all
/// 2-torsion rational), whose incoming kernel is taken to be the largest
/// 2-torsion x-coordinate. Each bit picks one of the two other kernels.
pub fn cgl1_walk(p: u64, bits: &[bool]) -> Result<Cgl1Walk> {
    if p % 12 != 1 {
        return Err(Error::BadPrime(p));
    }
    let start_j = smallest_supersingular_j(p)?;
    let mut e = EllCurve::from_j(start_j).normalized()?;
    let mut incoming = *e.two_torsion()?.last().ok_or(Error::NotSupersingular)?;
    let mut steps = Vec::with_capacity(bits.len());
    for &bit in bits {
        let roots = e.two_torsion()?;
        let others: Vec<Fq> = roots.iter().copied().filter(|&x| x != incoming).collect();
        if roots.len() != 3 || others.len() != 2 {
            return Err(Error::ModelNotRational);
        }
        let chosen = others[bit as usize];
        let witness = others[1 - bit as usize];
        let next = e.velu2(chosen);
        let dual = e.velu2_dual_kernel(chosen, witness)?;
        steps.push(Cgl1Step {
            options: [others[0], others[1]],
            incoming,
            chosen,
            j: next.j_invariant()?,
        });
        e = next;
        incoming = dual;
    }
    let mut walk = Cgl1Walk {
        start_j,
        steps,
        digest: 0,
    };
    walk.digest = walk.final_j().coords()[0];
    Ok(walk)
}

/// The first tower coordinate of j at the end of the walk.
pub fn cgl1_hash(p: u64, bits: &[bool]) -> Result<u64> {
    Ok(cgl1_walk(p, bits)?.digest)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cgl2Step {
    pub incoming: Matching,
    /// The eight good extensions: matchings sharing no pair with the
    /// incoming one, in lexicographic order.
    pub options: Vec<Matching>,
    /// How many of the eight have a Jacobian codomain.
    pub jacobian_options: usize,
    pub chosen: Matching,
    /// Igusa class reached by the step.
    pub key: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cgl2Walk {
    pub start_key: String,
    pub steps: Vec<Cgl2Step>,
}

impl Cgl2Walk {
    pub fn digest(&self) -> &str {
        self.steps.last().map_or(&self.start_key, |s| &s.key)
    }
}

/// Walker over genus-2 Jacobians. Holds the current curve and the dual
/// matching of the last step.
#[derive(Debug, Clone)]
pub struct Cgl2Walker {
    curve: Sextic,
    incoming: Matching,
}

impl Cgl2Walker {
    /// Starts at the first Jacobian found by the breadth-first construction
    /// of Gr_2(2, p), with the first matching as incoming kernel.
    pub fn new(p: u64) -> Result<Cgl2Walker> {
        let (_, models) = build_gr2_with_models(p, 1)?;
        let curve = models
            .into_iter()
            .find_map(|m| match m {
                G2Model::Jacobian(s) => Some(s),
                G2Model::Product(..) => None,
            })
            .ok_or(Error::WalkLeftJacobianLocus)?;
        Ok(Cgl2Walker {
            curve,
            incoming: all_matchings()[0],
        })
    }

    pub fn from_curve(curve: Sextic, incoming: Matching) -> Cgl2Walker {
        Cgl2Walker { curve, incoming }
    }

    pub fn curve(&self) -> &Sextic {
        &self.curve
    }

    pub fn incoming(&self) -> Matching {
        self.incoming
    }

    /// The eight good extensions at the current vertex.
    pub fn options(&self) -> Vec<Matching> {
        all_matchings()
            .into_iter()
            .filter(|m| matchings_disjoint(m, &self.incoming))
            .collect()
    }

    /// Takes the good extension numbered `choice` (0..8).
    pub fn step(&mut self, choice: usize) -> Result<Cgl2Step> {
        let options = self.options();
        if options.len() != 8 {
            return Err(Error::WalkLeftJacobianLocus);
        }
        let chosen = *options.get(choice).ok_or(Error::IndexOutOfRange {
            index: choice,
            len: 8,
        })?;
        let splittings = quadratic_splittings(&self.curve)?;
        let of = |m: &Matching| {
            splittings
                .iter()
                .find(|s| s.matching == *m)
                .expect("all 15 matchings present")
        };
        let jacobian_options = options.iter().filter(|m| !of(m).delta.is_zero()).count();
        let s = of(&chosen);
        if s.delta.is_zero() {
            return Err(Error::WalkLeftJacobianLocus);
        }
        let (curve, dual) = richelot_with_dual(s)?;
        let key = igusa_class(&curve)?;
        let step = Cgl2Step {
            incoming: self.incoming,
            options,
            jacobian_options,
            chosen,
            key,
        };
        self.curve = curve;
        self.incoming = dual;
        Ok(step)
    }
}

/// Genus-two walk; each 3-bit chunk, read most significant bit first,
/// selects one of the eight good extensions.
pub fn cgl2_walk(p: u64, bits: &[bool]) -> Result<Cgl2Walk> {
    if !bits.len().is_multiple_of(3) {
        return Err(Error::BadMessageLength(bits.len()));
    }
    let mut walker = Cgl2Walker::new(p)?;
    let start_key = igusa_class(walker.curve())?;
    let steps = bits
        .chunks(3)
        .map(|c| walker.step(c.iter().fold(0, |acc, &b| acc << 1 | b as usize)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Cgl2Walk { start_key, steps })
}

/// Igusa class key of the endpoint.
pub fn cgl2_hash(p: u64, bits: &[bool]) -> Result<String> {
    Ok(cgl2_walk(p, bits)?.digest().to_string())
}
