use super::{
    jacobian_ra_order, product_kernel_codomain, product_kernels, quadratic_splittings,
    richelot_codomain, Codomain, Sextic,
};
use crate::ec::{aut_order, smallest_supersingular_j, EllCurve};
use crate::error::{Error, Result};
use crate::spectra::{explore, Expansion, Neighbor, VertexKind, WeightedMultiGraph};

/// Explicit model of a vertex of Gr_2(2, p). Product factors are kept
/// normalized (Frobenius −p over F_p²) so that all 2-torsion is rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum G2Model {
    Jacobian(Sextic),
    Product(EllCurve, EllCurve),
}

impl G2Model {
    pub fn from_codomain(c: Codomain) -> Result<G2Model> {
        Ok(match c {
            Codomain::Jacobian(s) => G2Model::Jacobian(s),
            Codomain::Product(j1, j2) => G2Model::Product(
                EllCurve::from_j(j1).normalized()?,
                EllCurve::from_j(j2).normalized()?,
            ),
        })
    }

    pub fn kind(&self) -> VertexKind {
        match self {
            G2Model::Jacobian(_) => VertexKind::Jacobian,
            G2Model::Product(..) => VertexKind::Product,
        }
    }

    /// The 15 codomains, in kernel order.
    pub fn neighbors(&self) -> Result<Vec<Codomain>> {
        match self {
            G2Model::Jacobian(f) => quadratic_splittings(f)?
                .iter()
                .map(richelot_codomain)
                .collect(),
            G2Model::Product(e1, e2) => product_kernels()
                .into_iter()
                .map(|k| product_kernel_codomain(e1, e2, k))
                .collect(),
        }
    }
}

/// |RA(v)| of a vertex from its model.
pub fn vertex_ra(model: &G2Model) -> Result<u64> {
    match model {
        G2Model::Jacobian(f) => jacobian_ra_order(f),
        G2Model::Product(e1, e2) => {
            let (j1, j2) = (e1.j_invariant()?, e2.j_invariant()?);
            let same = if j1 == j2 { 2 } else { 1 };
            Ok(aut_order(j1) * aut_order(j2) / 2 * same)
        }
    }
}

fn codomain_key_kind(c: &Codomain) -> Result<(String, VertexKind)> {
    let kind = match c {
        Codomain::Jacobian(_) => VertexKind::Jacobian,
        Codomain::Product(..) => VertexKind::Product,
    };
    Ok((c.key()?, kind))
}

/// Gr_2(2, p), explored breadth-first from E₀ × E₀ with E₀ the smallest
/// supersingular j in F_p.
pub fn build_gr2(p: u64) -> Result<WeightedMultiGraph> {
    Ok(build_gr2_with_models(p, 1)?.0)
}

pub fn build_gr2_with_models(p: u64, threads: usize) -> Result<(WeightedMultiGraph, Vec<G2Model>)> {
    if p == 2 {
        return Err(Error::BadCharacteristic(p));
    }
    let j0 = smallest_supersingular_j(p)?;
    let start = Codomain::product(j0, j0);
    let (key, kind) = codomain_key_kind(&start)?;
    // Vertices carry their codomain description; explicit models are only
    // built when a vertex is expanded.
    let (graph, codomains) = explore(
        2,
        2,
        Some(p),
        15,
        Neighbor {
            key,
            kind,
            model: start,
        },
        threads,
        |c: &Codomain| {
            let model = G2Model::from_codomain(c.clone())?;
            let neighbors = model
                .neighbors()?
                .into_iter()
                .map(|c| {
                    let (key, kind) = codomain_key_kind(&c)?;
                    Ok(Neighbor {
                        key,
                        kind,
                        model: c,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Expansion {
                ra: vertex_ra(&model)?,
                neighbors,
            })
        },
    )?;
    let models = codomains
        .into_iter()
        .map(G2Model::from_codomain)
        .collect::<Result<Vec<_>>>()?;
    Ok((graph, models))
}
