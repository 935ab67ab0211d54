//! Weighted regular multigraphs, their reversible random-walk operator, the
//! spectrum of that operator, and the reference constants it is compared with.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexKind {
    Elliptic,
    Jacobian,
    Product,
    Lattice,
}

impl VertexKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VertexKind::Elliptic => "elliptic",
            VertexKind::Jacobian => "jacobian",
            VertexKind::Product => "product",
            VertexKind::Lattice => "lattice",
        }
    }

    pub fn parse(s: &str) -> Option<VertexKind> {
        Some(match s {
            "elliptic" => VertexKind::Elliptic,
            "jacobian" => VertexKind::Jacobian,
            "product" => VertexKind::Product,
            "lattice" => VertexKind::Lattice,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphVertex {
    pub key: String,
    pub kind: VertexKind,
    /// |RA(v)|, the reduced automorphism order; 1 for lattice vertices.
    pub ra: u64,
}

/// Directed multigraph with uniform out-degree and per-vertex weights.
/// `g`, `l` and `p` record what the graph was built from (`p` is `None` for
/// lattice graphs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedMultiGraph {
    pub g: u32,
    pub l: u64,
    pub p: Option<u64>,
    pub degree: u64,
    pub vertices: Vec<GraphVertex>,
    pub edges: BTreeMap<(usize, usize), u64>,
}

impl WeightedMultiGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u64 {
        self.edges.get(&(u, v)).copied().unwrap_or(0)
    }

    pub fn out_degree(&self, u: usize) -> u64 {
        self.edges.range((u, 0)..(u + 1, 0)).map(|(_, &m)| m).sum()
    }

    pub fn index_of(&self, key: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.key == key)
    }

    pub fn total_edges(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Fails with the first vertex whose out-degree differs from `degree`.
    pub fn check_regular(&self) -> Result<()> {
        for u in 0..self.len() {
            let found = self.out_degree(u);
            if found != self.degree {
                return Err(Error::IrregularGraph {
                    vertex: u,
                    found,
                    expected: self.degree,
                });
            }
        }
        Ok(())
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let mut fwd = vec![Vec::new(); self.len()];
        let mut bwd = vec![Vec::new(); self.len()];
        for &(u, v) in self.edges.keys() {
            fwd[u].push(v);
            bwd[v].push(u);
        }
        let reach_all = |adj: &[Vec<usize>]| {
            let mut seen = vec![false; adj.len()];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach_all(&fwd) && reach_all(&bwd)
    }
}

/// A neighbor produced while expanding a vertex.
pub(crate) struct Neighbor<M> {
    pub key: String,
    pub kind: VertexKind,
    pub model: M,
}

pub(crate) struct Expansion<M> {
    pub ra: u64,
    pub neighbors: Vec<Neighbor<M>>,
}

/// Breadth-first construction. Each frontier is expanded (in parallel when
/// `threads > 1`) and merged in frontier order, so the vertex numbering is the
/// same for every thread count. Returns the graph and the model stored for
/// each vertex (the one it was first discovered with).
pub(crate) fn explore<M, F>(
    g: u32,
    l: u64,
    p: Option<u64>,
    degree: u64,
    start: Neighbor<M>,
    threads: usize,
    expand: F,
) -> Result<(WeightedMultiGraph, Vec<M>)>
where
    M: Send + Sync,
    F: Fn(&M) -> Result<Expansion<M>> + Sync,
{
    let mut vertices = vec![GraphVertex {
        key: start.key.clone(),
        kind: start.kind,
        ra: 0,
    }];
    let mut models = vec![start.model];
    let mut index: HashMap<String, usize> = HashMap::from([(start.key, 0)]);
    let mut edges = BTreeMap::new();
    let mut frontier = vec![0usize];
    let pool = if threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::ScaleExceeded(e.to_string()))?,
        )
    } else {
        None
    };
    while !frontier.is_empty() {
        let expanded: Vec<Result<Expansion<M>>> = match &pool {
            Some(pool) => {
                pool.install(|| frontier.par_iter().map(|&u| expand(&models[u])).collect())
            }
            None => frontier.iter().map(|&u| expand(&models[u])).collect(),
        };
        let mut next = Vec::new();
        for (&u, exp) in frontier.iter().zip(expanded) {
            let exp = exp?;
            vertices[u].ra = exp.ra;
            for n in exp.neighbors {
                let v = match index.get(&n.key) {
                    Some(&v) => v,
                    None => {
                        let v = vertices.len();
                        index.insert(n.key.clone(), v);
                        vertices.push(GraphVertex {
                            key: n.key,
                            kind: n.kind,
                            ra: 0,
                        });
                        models.push(n.model);
                        next.push(v);
                        v
                    }
                };
                *edges.entry((u, v)).or_insert(0) += 1;
            }
        }
        frontier = next;
    }
    let graph = WeightedMultiGraph {
        g,
        l,
        p,
        degree,
        vertices,
        edges,
    };
    graph.check_regular()?;
    Ok((graph, models))
}

/// P(u, v) = numer[u][v] / denom, kept exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomWalkMatrix {
    pub denom: u64,
    pub numer: Vec<Vec<u64>>,
}

impl RandomWalkMatrix {
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        let d = self.denom as f64;
        self.numer
            .iter()
            .map(|r| r.iter().map(|&m| m as f64 / d).collect())
            .collect()
    }
}

pub fn random_walk_matrix(g: &WeightedMultiGraph) -> Result<RandomWalkMatrix> {
    g.check_regular()?;
    let n = g.len();
    let mut numer = vec![vec![0u64; n]; n];
    for (&(u, v), &m) in &g.edges {
        numer[u][v] = m;
    }
    Ok(RandomWalkMatrix {
        denom: g.degree,
        numer,
    })
}

/// Pairs (u, v) with u ≤ v where m(u,v)/ra(u) ≠ m(v,u)/ra(v).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BalanceReport {
    pub violations: Vec<(usize, usize)>,
}

impl BalanceReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exact check of w(u)P(u,v) = w(v)P(v,u) with w = 1/ra, done as the integer
/// identity m(u,v)·ra(v) = m(v,u)·ra(u).
pub fn check_detailed_balance(g: &WeightedMultiGraph) -> BalanceReport {
    let mut violations = Vec::new();
    for u in 0..g.len() {
        for v in u..g.len() {
            let lhs = g.multiplicity(u, v) as u128 * g.vertices[v].ra as u128;
            let rhs = g.multiplicity(v, u) as u128 * g.vertices[u].ra as u128;
            if lhs != rhs {
                violations.push((u, v));
            }
        }
    }
    BalanceReport { violations }
}

pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, sorted
/// descending.
pub fn jacobi_eigenvalues(matrix: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let off = |a: &[Vec<f64>]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) >= JACOBI_TOLERANCE {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::ConvergenceFailure(sweeps));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
        sweeps += 1;
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

/// S = W^{1/2} P W^{−1/2} with W = diag(1/ra); symmetric when the walk is
/// reversible.
pub fn symmetrized_operator(g: &WeightedMultiGraph) -> Result<Vec<Vec<f64>>> {
    let report = check_detailed_balance(g);
    if let Some(&(u, v)) = report.violations.first() {
        return Err(Error::NotReversible(u, v));
    }
    let p = random_walk_matrix(g)?.to_f64();
    let n = g.len();
    let ra: Vec<f64> = g.vertices.iter().map(|v| v.ra as f64).collect();
    let mut s = vec![vec![0.0; n]; n];
    for u in 0..n {
        for v in 0..n {
            s[u][v] = p[u][v] * (ra[v] / ra[u]).sqrt();
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let m = 0.5 * (s[u][v] + s[v][u]);
            s[u][v] = m;
            s[v][u] = m;
        }
    }
    Ok(s)
}

/// Eigenvalues of the random-walk operator, sorted descending.
pub fn eigenvalues(g: &WeightedMultiGraph) -> Result<Vec<f64>> {
    jacobi_eigenvalues(&symmetrized_operator(g)?)
}

/// N_g(ℓ) = ∏_{k=1}^{g} (ℓ^k + 1), the number of Lagrangian subgroups.
pub fn lagrangian_count(g: u32, l: u64) -> u64 {
    (1..=g).map(|k| l.pow(k) + 1).product()
}

/// The explicit spectral-gap constant (1/(4(g+2)))·((ℓ−1)/(2(ℓ−1)+3√(2ℓ(ℓ+1))))².
pub fn kazhdan_bound(g: u32, l: u64) -> Result<f64> {
    if g < 2 {
        return Err(Error::DimensionTooSmall(g));
    }
    let l = l as f64;
    let inner = (l - 1.0) / (2.0 * (l - 1.0) + 3.0 * (2.0 * l * (l + 1.0)).sqrt());
    Ok(inner * inner / (4.0 * (g as f64 + 2.0)))
}

/// 2^g ℓ^{g(g+1)/4}.
pub fn ramanujan_bound(g: u32, l: u64) -> f64 {
    2f64.powi(g as i32) * (l as f64).powf((g * (g + 1)) as f64 / 4.0)
}

/// Ramanujan bound divided by the degree, on the scale of the random walk.
pub fn ramanujan_normalized(g: u32, l: u64) -> f64 {
    ramanujan_bound(g, l) / lagrangian_count(g, l) as f64
}

/// Conjectured range [lower, upper] for the Laplacian eigenvalues of the
/// genus-2 graph: 1 − max(4ℓ√ℓ, ℓ²+1+2ℓ√ℓ)/N₂(ℓ) and 1 + 4ℓ√ℓ/N₂(ℓ).
pub fn conjecture_interval(l: u64) -> (f64, f64) {
    let lf = l as f64;
    let n2 = lagrangian_count(2, l) as f64;
    let non_cap = 4.0 * lf * lf.sqrt();
    let siegel = lf * lf + 1.0 + 2.0 * lf * lf.sqrt();
    (1.0 - non_cap.max(siegel) / n2, 1.0 + non_cap / n2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub g: u32,
    pub l: u64,
    pub eigenvalues: Vec<f64>,
    pub lambda2: f64,
    pub lambda_star: f64,
    /// max |μ| over the nontrivial eigenvalues μ₂, …, μ_m.
    pub nontrivial_spectral_radius: f64,
    /// Mean of |μ| over the nontrivial eigenvalues.
    pub mean_abs_eigenvalue: f64,
    pub kazhdan: Option<f64>,
    pub kazhdan_pass: Option<bool>,
    pub ramanujan: f64,
    pub ramanujan_normalized: f64,
    pub ramanujan_pass: bool,
    /// Spectral radius of the special 1-complex, normalized by the degree.
    pub spectral_radius: f64,
    pub conjecture_interval: Option<(f64, f64)>,
    /// λ₂ ≥ lower and 2 − λ_m ≤ upper; informational only.
    pub conjecture_consistent: Option<bool>,
    pub detailed_balance: bool,
}

pub fn spectral_report(graph: &WeightedMultiGraph, g: u32, l: u64) -> Result<SpectralReport> {
    let ev = eigenvalues(graph)?;
    let m = ev.len();
    let mu2 = if m > 1 { ev[1] } else { f64::NAN };
    let mu_m = ev[m - 1];
    let nontrivial: Vec<f64> = ev.iter().skip(1).map(|x| x.abs()).collect();
    let radius = nontrivial.iter().copied().fold(0.0, f64::max);
    let mean = if nontrivial.is_empty() {
        0.0
    } else {
        nontrivial.iter().sum::<f64>() / nontrivial.len() as f64
    };
    let (lambda2, lambda_star) = if m > 1 {
        (1.0 - mu2, (1.0 - mu2).min(1.0 + mu_m))
    } else {
        (f64::NAN, f64::NAN)
    };
    let kazhdan = kazhdan_bound(g, l).ok();
    let kazhdan_pass = kazhdan.map(|c| m == 1 || lambda2 >= c);
    let rn = ramanujan_normalized(g, l);
    let conj = (g == 2).then(|| conjecture_interval(l));
    let consistent = conj.map(|(lo, hi)| m == 1 || (lambda2 >= lo && 1.0 + mu_m <= hi));
    Ok(SpectralReport {
        g,
        l,
        lambda2,
        lambda_star,
        nontrivial_spectral_radius: radius,
        mean_abs_eigenvalue: mean,
        kazhdan,
        kazhdan_pass,
        ramanujan: ramanujan_bound(g, l),
        ramanujan_normalized: rn,
        ramanujan_pass: radius <= rn + 1e-9,
        spectral_radius: rn,
        conjecture_interval: conj,
        conjecture_consistent: consistent,
        detailed_balance: check_detailed_balance(graph).holds(),
        eigenvalues: ev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(ra: &[u64], degree: u64, edges: &[((usize, usize), u64)]) -> WeightedMultiGraph {
        WeightedMultiGraph {
            g: 2,
            l: 2,
            p: None,
            degree,
            vertices: ra
                .iter()
                .enumerate()
                .map(|(i, &ra)| GraphVertex {
                    key: i.to_string(),
                    kind: VertexKind::Lattice,
                    ra,
                })
                .collect(),
            edges: edges.iter().copied().collect(),
        }
    }

    #[test]
    fn kazhdan_values() {
        let c22 = kazhdan_bound(2, 2).unwrap();
        let expect = (1.0 / (2.0 + 6.0 * 3f64.sqrt())).powi(2) / 16.0;
        assert!((c22 - expect).abs() < 1e-18);
        assert!((c22 - 4.0704e-4).abs() < 1e-7);
        let c23 = kazhdan_bound(2, 3).unwrap();
        assert!((c23 - (2.0 / (4.0 + 6.0 * 6f64.sqrt())).powi(2) / 16.0).abs() < 1e-18);
        assert!((c23 - 7.155e-4).abs() < 1e-6);
        let ls = [2, 3, 5, 7, 11];
        let vals: Vec<f64> = ls.iter().map(|&l| kazhdan_bound(2, l).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(kazhdan_bound(1, 2), Err(Error::DimensionTooSmall(1)));
    }

    #[test]
    fn reference_constants() {
        assert!((ramanujan_normalized(2, 2) - 4.0 * 2f64.powf(1.5) / 15.0).abs() < 1e-15);
        assert!((ramanujan_normalized(1, 2) - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-15);
        let (lo, hi) = conjecture_interval(2);
        assert!((lo - (1.0 - 8.0 * 2f64.sqrt() / 15.0)).abs() < 1e-15);
        assert!((hi - (1.0 + 8.0 * 2f64.sqrt() / 15.0)).abs() < 1e-15);
        assert_eq!(lagrangian_count(1, 3), 4);
        assert_eq!(lagrangian_count(2, 3), 40);
        assert_eq!(lagrangian_count(3, 3), 1120);
    }

    #[test]
    fn detailed_balance_reports_injected_fault() {
        // Two vertices, ra = (1, 2): m(0,1)/1 = m(1,0)/2.
        let mut g = graph(
            &[1, 2],
            3,
            &[((0, 0), 2), ((0, 1), 1), ((1, 0), 2), ((1, 1), 1)],
        );
        assert!(check_detailed_balance(&g).holds());
        g.edges.insert((0, 1), 2);
        g.edges.insert((0, 0), 1);
        assert_eq!(check_detailed_balance(&g).violations, vec![(0, 1)]);
        assert_eq!(eigenvalues(&g), Err(Error::NotReversible(0, 1)));
    }

    #[test]
    fn irregular_graph_rejected() {
        let g = graph(&[1, 1], 2, &[((0, 1), 2), ((1, 0), 1)]);
        assert_eq!(
            random_walk_matrix(&g),
            Err(Error::IrregularGraph {
                vertex: 1,
                found: 1,
                expected: 2
            })
        );
    }

    #[test]
    fn cycle_spectrum() {
        let n = 7;
        let edges: Vec<_> = (0..n)
            .flat_map(|i| [((i, (i + 1) % n), 1), ((i, (i + n - 1) % n), 1)])
            .collect();
        let g = graph(&vec![1; n], 2, &edges);
        let ev = eigenvalues(&g).unwrap();
        let mut expect: Vec<f64> = (0..n)
            .map(|k| (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos())
            .collect();
        expect.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in ev.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn weighted_two_vertex_spectrum() {
        // P = [[2/3, 1/3], [2/3, 1/3]] has eigenvalues 1 and 0.
        let g = graph(
            &[1, 2],
            3,
            &[((0, 0), 2), ((0, 1), 1), ((1, 0), 2), ((1, 1), 1)],
        );
        let r = spectral_report(&g, 2, 2).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(r.eigenvalues[1].abs() < 1e-12);
        assert!((r.lambda2 - 1.0).abs() < 1e-12);
        assert_eq!(r.kazhdan_pass, Some(true));
    }

    fn random_reversible_graph() -> impl Strategy<Value = WeightedMultiGraph> {
        // Symmetric weights c(u,v) = c(v,u); multiplicity m(u,v) = c(u,v)·ra(u)
        // is reversible for ra, and a self-loop tops every row up to D.
        (2usize..7).prop_flat_map(|n| {
            (
                proptest::collection::vec(1u64..4, n),
                proptest::collection::vec(0u64..3, n * n),
            )
                .prop_map(move |(ra, c)| {
                    let mut m = vec![vec![0u64; n]; n];
                    for u in 0..n {
                        for v in 0..n {
                            if u != v {
                                let cuv = c[u.min(v) * n + u.max(v)];
                                m[u][v] = cuv * ra[u];
                            }
                        }
                    }
                    let d = m.iter().map(|r| r.iter().sum::<u64>()).max().unwrap() + 1;
                    let mut edges = Vec::new();
                    for u in 0..n {
                        m[u][u] = d - m[u].iter().sum::<u64>();
                        for v in 0..n {
                            if m[u][v] > 0 {
                                edges.push(((u, v), m[u][v]));
                            }
                        }
                    }
                    graph(&ra, d, &edges)
                })
        })
    }

    proptest! {
        #[test]
        fn spectrum_invariants(g in random_reversible_graph()) {
            prop_assert!(check_detailed_balance(&g).holds());
            let s = symmetrized_operator(&g).unwrap();
            let norm2: f64 = s.iter().flatten().map(|x| x * x).sum();
            let ev = jacobi_eigenvalues(&s).unwrap();
            prop_assert!((ev[0] - 1.0).abs() < 1e-9);
            prop_assert!(ev.iter().all(|x| x.abs() <= 1.0 + 1e-9));
            prop_assert!(ev.windows(2).all(|w| w[0] >= w[1]));
            let ev2: f64 = ev.iter().map(|x| x * x).sum();
            prop_assert!((norm2 - ev2).abs() < 1e-10);
            let trace: f64 = (0..g.len()).map(|i| s[i][i]).sum();
            prop_assert!((trace - ev.iter().sum::<f64>()).abs() < 1e-10);
            prop_assert_eq!(eigenvalues(&g).unwrap(), ev);
        }

        #[test]
        fn rows_sum_to_degree(g in random_reversible_graph()) {
            let p = random_walk_matrix(&g).unwrap();
            for row in &p.numer {
                prop_assert_eq!(row.iter().sum::<u64>(), p.denom);
            }
        }
    }
}
