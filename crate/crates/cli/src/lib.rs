//! Configuration, command execution and canonical serialization behind the
//! `sspectra` binary.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use thiserror::Error;

use sspectra::building::{ball, Ball, LatticeRep};
use sspectra::ec::build_gr1_with_threads;
use sspectra::ff::Field;
use sspectra::g2::build_gr2_with_models;
use sspectra::hash::{cgl1_hash, cgl2_hash};
use sspectra::spectra::{
    spectral_report, GraphVertex, SpectralReport, VertexKind, WeightedMultiGraph,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("construction failed: {0}")]
    Construction(sspectra::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Construction(sspectra::Error::ConvergenceFailure(_)) => 4,
            CliError::Construction(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<sspectra::Error> for CliError {
    fn from(e: sspectra::Error) -> Self {
        CliError::Construction(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Dot,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Format, String> {
        match s {
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?} (json, dot, csv)")),
        }
    }
}

/// Where a graph comes from: built from parameters or loaded from JSON.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSource {
    Build { g: u32, l: u64, p: u64 },
    File(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Graph {
        g: u32,
        l: u64,
        p: u64,
        format: Format,
    },
    Spectra {
        source: GraphSource,
    },
    Building {
        n: usize,
        l: u64,
        radius: usize,
    },
    Hash {
        g: u32,
        p: u64,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub threads: usize,
}

fn check_graph_params(g: u32, l: u64, p: u64) -> Result<()> {
    if !matches!((g, l), (1, 2) | (1, 3) | (2, 2)) {
        return Err(CliError::Config(format!(
            "(g, l) = ({g}, {l}) is not one of (1,2), (1,3), (2,2)"
        )));
    }
    Field::new(p).map_err(|_| CliError::Config(format!("p = {p} is not a prime in [5, 2^32)")))?;
    if p == l {
        return Err(CliError::Config("p must differ from l".into()));
    }
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        match &self.command {
            Command::Graph { g, l, p, .. } => check_graph_params(*g, *l, *p),
            Command::Spectra {
                source: GraphSource::Build { g, l, p },
            } => check_graph_params(*g, *l, *p),
            Command::Spectra {
                source: GraphSource::File(_),
            } => Ok(()),
            Command::Building { n, l, .. } => {
                if !(1..=3).contains(n) || !matches!(l, 2 | 3) {
                    return Err(CliError::Config(format!(
                        "building needs 1 <= n <= 3 and l in {{2, 3}}, got n={n}, l={l}"
                    )));
                }
                Ok(())
            }
            Command::Hash { g, p, message } => {
                Field::new(*p).map_err(|_| {
                    CliError::Config(format!("p = {p} is not a prime in [5, 2^32)"))
                })?;
                let bits = message_bits(message)?;
                match g {
                    1 if p % 12 != 1 => Err(CliError::Config(format!(
                        "g=1 hashing needs p = 1 mod 12, got {p}"
                    ))),
                    1 => Ok(()),
                    2 if bits.len() % 3 != 0 => Err(CliError::Config(format!(
                        "g=2 messages need a bit length divisible by 3, got {}",
                        bits.len()
                    ))),
                    2 => Ok(()),
                    _ => Err(CliError::Config(format!(
                        "hashing supports g in {{1, 2}}, got {g}"
                    ))),
                }
            }
        }
    }
}

/// Hex digits to bits, four per digit, most significant first; odd lengths
/// are allowed so that 3-bit chunking can be met with 12-bit messages.
fn message_bits(message: &str) -> Result<Vec<bool>> {
    message
        .chars()
        .map(|c| {
            c.to_digit(16)
                .ok_or_else(|| CliError::Config(format!("message is not hex: {c:?}")))
        })
        .try_fold(Vec::with_capacity(4 * message.len()), |mut bits, d| {
            let d = d?;
            bits.extend((0..4).rev().map(|i| d >> i & 1 == 1));
            Ok(bits)
        })
}

/// Writes floats with 17 significant digits; everything else as the compact
/// serde_json formatter does.
struct CanonicalFloats;

impl Formatter for CanonicalFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }
}

/// 17 significant digits in scientific notation; non-finite values as null.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

/// Canonical JSON: struct fields are declared in sorted order, floats use
/// [`format_f64`], one line, newline-terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFloats);
    value.serialize(&mut ser).expect("serializable value");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8 json")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub key: String,
    pub kind: String,
    pub ra: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub from: usize,
    pub mult: u64,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub degree: u64,
    pub edges: Vec<EdgeDoc>,
    pub g: u32,
    pub l: u64,
    pub p: Option<u64>,
    pub vertices: Vec<VertexDoc>,
}

impl From<&WeightedMultiGraph> for GraphDoc {
    fn from(g: &WeightedMultiGraph) -> Self {
        GraphDoc {
            degree: g.degree,
            edges: g
                .edges
                .iter()
                .map(|(&(from, to), &mult)| EdgeDoc { from, mult, to })
                .collect(),
            g: g.g,
            l: g.l,
            p: g.p,
            vertices: g
                .vertices
                .iter()
                .map(|v| VertexDoc {
                    key: v.key.clone(),
                    kind: v.kind.as_str().into(),
                    ra: v.ra,
                })
                .collect(),
        }
    }
}

impl GraphDoc {
    pub fn into_graph(self) -> Result<WeightedMultiGraph> {
        let n = self.vertices.len();
        let vertices = self
            .vertices
            .into_iter()
            .map(|v| {
                let kind = VertexKind::parse(&v.kind)
                    .ok_or_else(|| CliError::Config(format!("unknown kind {:?}", v.kind)))?;
                Ok(GraphVertex {
                    key: v.key,
                    kind,
                    ra: v.ra,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut edges = BTreeMap::new();
        for e in self.edges {
            if e.from >= n || e.to >= n {
                return Err(CliError::Config(format!(
                    "edge {} -> {} out of range",
                    e.from, e.to
                )));
            }
            *edges.entry((e.from, e.to)).or_insert(0) += e.mult;
        }
        let graph = WeightedMultiGraph {
            g: self.g,
            l: self.l,
            p: self.p,
            degree: self.degree,
            vertices,
            edges,
        };
        graph.check_regular()?;
        Ok(graph)
    }
}

pub fn graph_json(g: &WeightedMultiGraph) -> String {
    to_canonical_json(&GraphDoc::from(g))
}

pub fn load_graph_json(text: &str) -> Result<WeightedMultiGraph> {
    let doc: GraphDoc =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad graph JSON: {e}")))?;
    doc.into_graph()
}

fn graph_title(g: &WeightedMultiGraph) -> String {
    match g.p {
        Some(p) => format!("Gr_{}({},{})", g.g, g.l, p),
        None => format!("S_{}({})", g.g, g.l),
    }
}

/// Graphviz digraph; edge labels are multiplicities.
pub fn graph_dot(g: &WeightedMultiGraph) -> String {
    let mut out = format!("digraph \"{}\" {{\n", graph_title(g));
    for (i, v) in g.vertices.iter().enumerate() {
        out += &format!(
            "  {i} [label=\"{}\", kind=\"{}\", ra={}];\n",
            v.key,
            v.kind.as_str(),
            v.ra
        );
    }
    for (&(u, v), &m) in &g.edges {
        out += &format!("  {u} -> {v} [label=\"{m}\"];\n");
    }
    out += "}\n";
    out
}

/// One row per directed edge.
pub fn graph_csv(g: &WeightedMultiGraph) -> String {
    let mut out = String::from("from,to,mult,from_key,to_key\n");
    for (&(u, v), &m) in &g.edges {
        out += &format!(
            "{u},{v},{m},\"{}\",\"{}\"\n",
            g.vertices[u].key, g.vertices[v].key
        );
    }
    out
}

pub fn build_graph(g: u32, l: u64, p: u64, threads: usize) -> Result<WeightedMultiGraph> {
    check_graph_params(g, l, p)?;
    Ok(match g {
        1 => build_gr1_with_threads(p, l, threads)?,
        _ => build_gr2_with_models(p, threads)?.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectraDoc {
    pub conjecture_consistent: Option<bool>,
    pub conjecture_interval: Option<(f64, f64)>,
    pub degree: u64,
    pub detailed_balance: bool,
    pub eigenvalues: Vec<f64>,
    pub g: u32,
    pub kazhdan: Option<f64>,
    pub kazhdan_pass: Option<bool>,
    pub l: u64,
    pub lambda2: f64,
    pub lambda_star: f64,
    pub mean_abs_eigenvalue: f64,
    pub nontrivial_spectral_radius: f64,
    pub p: Option<u64>,
    pub ramanujan: f64,
    pub ramanujan_normalized: f64,
    pub ramanujan_pass: bool,
    pub spectral_radius: f64,
    pub vertices: usize,
}

impl SpectraDoc {
    pub fn new(g: &WeightedMultiGraph, r: SpectralReport) -> SpectraDoc {
        SpectraDoc {
            conjecture_consistent: r.conjecture_consistent,
            conjecture_interval: r.conjecture_interval,
            degree: g.degree,
            detailed_balance: r.detailed_balance,
            eigenvalues: r.eigenvalues,
            g: r.g,
            kazhdan: r.kazhdan,
            kazhdan_pass: r.kazhdan_pass,
            l: r.l,
            lambda2: r.lambda2,
            lambda_star: r.lambda_star,
            mean_abs_eigenvalue: r.mean_abs_eigenvalue,
            nontrivial_spectral_radius: r.nontrivial_spectral_radius,
            p: g.p,
            ramanujan: r.ramanujan,
            ramanujan_normalized: r.ramanujan_normalized,
            ramanujan_pass: r.ramanujan_pass,
            spectral_radius: r.spectral_radius,
            vertices: g.len(),
        }
    }
}

pub fn spectra_json(g: &WeightedMultiGraph) -> Result<String> {
    let report = spectral_report(g, g.g, g.l)?;
    Ok(to_canonical_json(&SpectraDoc::new(g, report)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildingDoc {
    pub bipartite: bool,
    pub degree: u64,
    pub edges: u64,
    pub interior_vertices: usize,
    pub l: u64,
    /// Vertex count per label residue.
    pub labels: BTreeMap<String, usize>,
    pub labels_alternate: bool,
    pub n: usize,
    pub radius: usize,
    pub regular: bool,
    pub vertices: usize,
}

impl From<&Ball> for BuildingDoc {
    fn from(b: &Ball) -> Self {
        let interior: Vec<usize> = (0..b.graph.len()).filter(|&v| b.is_interior(v)).collect();
        BuildingDoc {
            bipartite: b.is_bipartite(),
            degree: b.graph.degree,
            edges: b.graph.total_edges(),
            interior_vertices: interior.len(),
            l: b.graph.l,
            labels: b
                .label_histogram()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            labels_alternate: b.labels_alternate(),
            n: b.graph.g as usize,
            radius: b.radius,
            regular: interior
                .iter()
                .all(|&v| b.graph.out_degree(v) == b.graph.degree),
            vertices: b.graph.len(),
        }
    }
}

pub fn building_json(n: usize, l: u64, radius: usize) -> Result<String> {
    let center = LatticeRep::standard(n, l)?;
    let b = ball(&center, radius, l, n)?;
    Ok(to_canonical_json(&BuildingDoc::from(&b)))
}

/// Digest line: a decimal residue for g = 1, an Igusa class key for g = 2.
pub fn hash_line(g: u32, p: u64, message: &str) -> Result<String> {
    let bits = message_bits(message)?;
    Ok(match g {
        1 => format!("{}\n", cgl1_hash(p, &bits)?),
        _ => format!("{}\n", cgl2_hash(p, &bits)?),
    })
}

/// Runs a validated configuration and returns the text to emit.
pub fn run(config: &RunConfig) -> Result<String> {
    config.validate()?;
    match &config.command {
        Command::Graph { g, l, p, format } => {
            let graph = build_graph(*g, *l, *p, config.threads)?;
            Ok(match format {
                Format::Json => graph_json(&graph),
                Format::Dot => graph_dot(&graph),
                Format::Csv => graph_csv(&graph),
            })
        }
        Command::Spectra { source } => {
            let graph = match source {
                GraphSource::Build { g, l, p } => build_graph(*g, *l, *p, config.threads)?,
                GraphSource::File(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| CliError::Io(format!("{path}: {e}")))?;
                    load_graph_json(&text)?
                }
            };
            spectra_json(&graph)
        }
        Command::Building { n, l, radius } => building_json(*n, *l, *radius),
        Command::Hash { g, p, message } => hash_line(*g, *p, message),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: Command) -> RunConfig {
        RunConfig {
            command,
            threads: 1,
        }
    }

    #[test]
    fn float_format() {
        assert_eq!(format_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(format_f64(f64::NAN), "null");
        let x = 0.1 + 0.2;
        assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn validation() {
        let bad = [
            Command::Graph {
                g: 2,
                l: 3,
                p: 13,
                format: Format::Json,
            },
            Command::Graph {
                g: 1,
                l: 2,
                p: 15,
                format: Format::Json,
            },
            Command::Graph {
                g: 1,
                l: 3,
                p: 3,
                format: Format::Json,
            },
            Command::Building {
                n: 4,
                l: 2,
                radius: 1,
            },
            Command::Hash {
                g: 1,
                p: 23,
                message: String::new(),
            },
            Command::Hash {
                g: 2,
                p: 23,
                message: "ff".into(),
            },
            Command::Hash {
                g: 1,
                p: 37,
                message: "xyz".into(),
            },
        ];
        for c in bad {
            let e = cfg(c.clone()).validate().unwrap_err();
            assert_eq!(e.exit_code(), 2, "{c:?}");
        }
        assert!(cfg(Command::Hash {
            g: 2,
            p: 23,
            message: "fff".into()
        })
        .validate()
        .is_ok());
        assert!(cfg(Command::Graph {
            g: 2,
            l: 2,
            p: 13,
            format: Format::Dot
        })
        .validate()
        .is_ok());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            CliError::Construction(sspectra::Error::ConvergenceFailure(100)).exit_code(),
            4
        );
        assert_eq!(
            CliError::Construction(sspectra::Error::NotSupersingular).exit_code(),
            3
        );
    }

    #[test]
    fn sorted_keys() {
        let g = build_graph(1, 2, 13, 1).unwrap();
        assert_eq!(
            graph_json(&g),
            "{\"degree\":3,\"edges\":[{\"from\":0,\"mult\":3,\"to\":0}],\"g\":1,\"l\":2,\"p\":13,\
             \"vertices\":[{\"key\":\"5:0\",\"kind\":\"elliptic\",\"ra\":1}]}\n"
        );
    }
}
