//! Graphs, configurations and bar-joint frameworks.
//!
//! Bipartite frameworks use the layout `U = 0..u`, `V = u..u+v`, and every
//! edge is stored as `(i, j)` with `i < j`. Directions, rigidity-matrix rows
//! and stress signs downstream all follow that orientation.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::One;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactmat::{self, format_rational, parse_rational, MatError, RatMatrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameworkError {
    #[error("edge ({0}, {0}) is a loop")]
    Loop(usize),
    #[error("edge ({0}, {1}) appears twice")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("part sizes must be at least 1 (got {0} and {1})")]
    EmptyPart(usize, usize),
    #[error("invalid bipartition: {0}")]
    InvalidPartition(String),
    #[error("configuration has {points} points for {vertices} vertices")]
    ConfigSize { points: usize, vertices: usize },
    #[error("point {vertex} has {got} coordinates, expected {dimension}")]
    PointDimension {
        vertex: usize,
        got: usize,
        dimension: usize,
    },
    #[error("edge ({0}, {1}) has coincident endpoints")]
    DegenerateEdge(usize, usize),
    #[error("empty point set")]
    EmptyPointSet,
    #[error("general position needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("malformed framework JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Points of part U and part V.
pub type PartPoints = (Vec<Vec<Rational>>, Vec<Vec<Rational>>);

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Orients each edge as `(min, max)` and sorts the edge list lexicographically.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, FrameworkError> {
        let mut seen = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(FrameworkError::Loop(a));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(FrameworkError::VertexOutOfRange(a, b, vertex_count));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(FrameworkError::DuplicateEdge(e.0, e.1));
            }
        }
        Ok(Self {
            vertex_count,
            edges: seen.into_iter().collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartitePartition {
    u: Vec<usize>,
    v: Vec<usize>,
}

impl BipartitePartition {
    pub fn new(mut u: Vec<usize>, mut v: Vec<usize>) -> Self {
        u.sort_unstable();
        v.sort_unstable();
        Self { u, v }
    }

    pub fn u(&self) -> &[usize] {
        &self.u
    }

    pub fn v(&self) -> &[usize] {
        &self.v
    }

    /// True for the `U = 0..u`, `V = u..u+v` layout.
    pub fn is_canonical(&self) -> bool {
        self.u.iter().copied().eq(0..self.u.len())
            && self
                .v
                .iter()
                .copied()
                .eq(self.u.len()..self.u.len() + self.v.len())
    }

    fn validate(&self, graph: &Graph) -> Result<(), FrameworkError> {
        let n = graph.vertex_count();
        let mut side = vec![None; n];
        for (label, part) in [(0u8, &self.u), (1u8, &self.v)] {
            for &x in part {
                if x >= n {
                    return Err(FrameworkError::InvalidPartition(format!(
                        "vertex {x} out of range"
                    )));
                }
                if side[x].replace(label).is_some() {
                    return Err(FrameworkError::InvalidPartition(format!(
                        "vertex {x} listed twice"
                    )));
                }
            }
        }
        if let Some(x) = side.iter().position(Option::is_none) {
            return Err(FrameworkError::InvalidPartition(format!(
                "vertex {x} is in neither part"
            )));
        }
        if let Some(&(a, b)) = graph.edges().iter().find(|(a, b)| side[*a] == side[*b]) {
            return Err(FrameworkError::InvalidPartition(format!(
                "edge ({a}, {b}) does not cross the parts"
            )));
        }
        Ok(())
    }
}

/// Points in `Q^d`, one per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    dimension: usize,
    points: Vec<Vec<Rational>>,
}

impl Configuration {
    pub fn new(dimension: usize, points: Vec<Vec<Rational>>) -> Result<Self, FrameworkError> {
        if let Some((vertex, p)) = points
            .iter()
            .enumerate()
            .find(|(_, p)| p.len() != dimension)
        {
            return Err(FrameworkError::PointDimension {
                vertex,
                got: p.len(),
                dimension,
            });
        }
        Ok(Self { dimension, points })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The `n × (d+1)` matrix `P̂`: each row is a point followed by a 1.
    pub fn homogeneous_matrix(&self) -> RatMatrix {
        homogeneous_rows(&self.points, self.dimension)
    }
}

fn homogeneous_rows<P: AsRef<[Rational]>>(points: &[P], dimension: usize) -> RatMatrix {
    let rows = points
        .iter()
        .map(|p| {
            let mut row = p.as_ref().to_vec();
            row.push(Rational::one());
            row
        })
        .collect();
    RatMatrix::from_rows_with_cols(rows, dimension + 1).expect("uniform point dimension")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Framework {
    graph: Graph,
    partition: Option<BipartitePartition>,
    config: Configuration,
}

impl Framework {
    pub fn new(
        graph: Graph,
        partition: Option<BipartitePartition>,
        config: Configuration,
    ) -> Result<Self, FrameworkError> {
        if config.len() != graph.vertex_count() {
            return Err(FrameworkError::ConfigSize {
                points: config.len(),
                vertices: graph.vertex_count(),
            });
        }
        if let Some(partition) = &partition {
            partition.validate(&graph)?;
        }
        if let Some(&(a, b)) = graph
            .edges()
            .iter()
            .find(|(a, b)| config.points[*a] == config.points[*b])
        {
            return Err(FrameworkError::DegenerateEdge(a, b));
        }
        Ok(Self {
            graph,
            partition,
            config,
        })
    }

    /// `K_{u,v}` with `p` on part U and `q` on part V.
    pub fn complete_bipartite(
        dimension: usize,
        p: Vec<Vec<Rational>>,
        q: Vec<Vec<Rational>>,
    ) -> Result<Self, FrameworkError> {
        let (graph, partition) = complete_bipartite(p.len(), q.len())?;
        let mut points = p;
        points.extend(q);
        Self::new(
            graph,
            Some(partition),
            Configuration::new(dimension, points)?,
        )
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn partition(&self) -> Option<&BipartitePartition> {
        self.partition.as_ref()
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn dimension(&self) -> usize {
        self.config.dimension
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.graph.edges
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.config.points
    }

    pub fn point(&self, vertex: usize) -> &[Rational] {
        &self.config.points[vertex]
    }

    /// Points of part U and part V, in partition order.
    pub fn part_points(&self) -> Option<PartPoints> {
        let partition = self.partition.as_ref()?;
        let pick = |ids: &[usize]| ids.iter().map(|&i| self.config.points[i].clone()).collect();
        Some((pick(&partition.u), pick(&partition.v)))
    }

    /// True when a partition is present and every U–V pair is an edge.
    pub fn is_complete_bipartite(&self) -> bool {
        match &self.partition {
            Some(part) => {
                self.graph.edge_count() == part.u.len() * part.v.len()
                    && part
                        .u
                        .iter()
                        .all(|&a| part.v.iter().all(|&b| self.graph.has_edge(a, b)))
            }
            None => false,
        }
    }
}

pub fn complete_bipartite(
    u: usize,
    v: usize,
) -> Result<(Graph, BipartitePartition), FrameworkError> {
    if u == 0 || v == 0 {
        return Err(FrameworkError::EmptyPart(u, v));
    }
    let edges: Vec<(usize, usize)> = (0..u)
        .flat_map(|i| (u..u + v).map(move |j| (i, j)))
        .collect();
    let graph = Graph::new(u + v, &edges)?;
    Ok((
        graph,
        BipartitePartition::new((0..u).collect(), (u..u + v).collect()),
    ))
}

pub fn config_matrix(framework: &Framework) -> RatMatrix {
    framework.config.homogeneous_matrix()
}

/// Dimension of the affine hull of a nonempty point set.
pub fn affine_span_dim<P: AsRef<[Rational]>>(points: &[P]) -> Result<usize, FrameworkError> {
    let first = points.first().ok_or(FrameworkError::EmptyPointSet)?;
    let dimension = first.as_ref().len();
    if points.iter().any(|p| p.as_ref().len() != dimension) {
        return Err(FrameworkError::Mat(MatError::RaggedRows));
    }
    Ok(exactmat::rank(&homogeneous_rows(points, dimension))? - 1)
}

/// Exhaustive check that every `d+1` points are affinely independent.
pub fn is_general_position(config: &Configuration) -> Result<bool, FrameworkError> {
    let d = config.dimension;
    if config.len() < d + 1 {
        return Err(FrameworkError::TooFewPoints {
            needed: d + 1,
            got: config.len(),
        });
    }
    let p_hat = config.homogeneous_matrix();
    for subset in (0..config.len()).combinations(d + 1) {
        if exactmat::rank(&p_hat.select_rows(&subset))? < d + 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `p(j) − p(i)` for every edge `(i, j)`, `i < j`.
pub fn edge_directions(framework: &Framework) -> Vec<Vec<Rational>> {
    framework
        .edges()
        .iter()
        .map(|&(i, j)| {
            framework
                .point(j)
                .iter()
                .zip(framework.point(i))
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect()
}

struct Coords<'a>(&'a [Vec<Rational>]);

impl Serialize for Coords<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (id, p) in self.0.iter().enumerate() {
            let coords: Vec<String> = p.iter().map(format_rational).collect();
            map.serialize_entry(&id.to_string(), &coords)?;
        }
        map.end()
    }
}

#[derive(Serialize, Deserialize)]
struct PartsRepr {
    #[serde(rename = "U")]
    u: Vec<usize>,
    #[serde(rename = "V")]
    v: Vec<usize>,
}

impl Serialize for Framework {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let fields = if self.partition.is_some() { 4 } else { 3 };
        let mut s = serializer.serialize_struct("Framework", fields)?;
        s.serialize_field("dimension", &self.config.dimension)?;
        if let Some(part) = &self.partition {
            s.serialize_field(
                "parts",
                &PartsRepr {
                    u: part.u.clone(),
                    v: part.v.clone(),
                },
            )?;
        }
        let edges: Vec<[usize; 2]> = self.graph.edges.iter().map(|&(a, b)| [a, b]).collect();
        s.serialize_field("edges", &edges)?;
        s.serialize_field("coords", &Coords(&self.config.points))?;
        s.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameworkRepr {
    dimension: usize,
    #[serde(default)]
    parts: Option<PartsRepr>,
    edges: Vec<[usize; 2]>,
    coords: BTreeMap<String, Vec<String>>,
}

impl TryFrom<FrameworkRepr> for Framework {
    type Error = FrameworkError;

    fn try_from(repr: FrameworkRepr) -> Result<Self, FrameworkError> {
        let mut by_id = BTreeMap::new();
        for (key, coords) in repr.coords {
            let id: usize = key.parse().map_err(|_| {
                FrameworkError::Json(format!("vertex id {key:?} is not an integer"))
            })?;
            let point = coords
                .iter()
                .map(|c| parse_rational(c))
                .collect::<Result<Vec<_>, _>>()?;
            if by_id.insert(id, point).is_some() {
                return Err(FrameworkError::Json(format!("vertex id {id} repeated")));
            }
        }
        let n = by_id.len();
        if by_id.keys().copied().ne(0..n) {
            return Err(FrameworkError::Json(
                "vertex ids must be exactly 0..n-1".to_string(),
            ));
        }
        let config = Configuration::new(repr.dimension, by_id.into_values().collect())?;
        let edges: Vec<(usize, usize)> = repr.edges.iter().map(|e| (e[0], e[1])).collect();
        let graph = Graph::new(n, &edges)?;
        let partition = repr.parts.map(|p| BipartitePartition::new(p.u, p.v));
        Framework::new(graph, partition, config)
    }
}

impl<'de> Deserialize<'de> for Framework {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = FrameworkRepr::deserialize(deserializer)?;
        Framework::try_from(repr).map_err(serde::de::Error::custom)
    }
}

impl Framework {
    pub fn from_json(text: &str) -> Result<Self, FrameworkError> {
        serde_json::from_str(text).map_err(|e| FrameworkError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        crate::to_canonical_json(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::{frac, int};
    use proptest::prelude::*;

    fn pts(raw: &[&[i64]]) -> Vec<Vec<Rational>> {
        raw.iter()
            .map(|p| p.iter().map(|&x| int(x)).collect())
            .collect()
    }

    fn unit_square() -> Framework {
        Framework::complete_bipartite(2, pts(&[&[0, 0], &[1, 1]]), pts(&[&[1, 0], &[0, 1]]))
            .unwrap()
    }

    #[test]
    fn complete_bipartite_sizes() {
        let (g, _) = complete_bipartite(1, 1).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(complete_bipartite(3, 3).unwrap().0.edge_count(), 9);
        let (g, part) = complete_bipartite(5, 6).unwrap();
        assert_eq!((g.edge_count(), g.vertex_count()), (30, 11));
        assert!(part.is_canonical());
        assert!(complete_bipartite(0, 3).is_err());
    }

    #[test]
    fn graph_validation() {
        assert_eq!(Graph::new(3, &[(1, 1)]), Err(FrameworkError::Loop(1)));
        assert_eq!(
            Graph::new(3, &[(0, 1), (1, 0)]),
            Err(FrameworkError::DuplicateEdge(0, 1))
        );
        assert!(Graph::new(2, &[(0, 2)]).is_err());
        let g = Graph::new(3, &[(2, 0), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2)]);
    }

    #[test]
    fn partition_must_cross() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let config = Configuration::new(1, pts(&[&[0], &[1], &[2]])).unwrap();
        let bad = BipartitePartition::new(vec![0, 1], vec![2]);
        assert!(Framework::new(g.clone(), Some(bad), config.clone()).is_err());
        let good = BipartitePartition::new(vec![0, 2], vec![1]);
        assert!(Framework::new(g, Some(good), config).is_ok());
    }

    #[test]
    fn coincident_endpoints_are_rejected() {
        let err = Framework::complete_bipartite(1, pts(&[&[0]]), pts(&[&[0]])).unwrap_err();
        assert_eq!(err, FrameworkError::DegenerateEdge(0, 1));
    }

    #[test]
    fn configuration_matrix_rows() {
        let g = Graph::new(1, &[]).unwrap();
        let f = Framework::new(g, None, Configuration::new(2, pts(&[&[0, 0]])).unwrap()).unwrap();
        assert_eq!(config_matrix(&f), RatMatrix::from_i64_rows(&[&[0, 0, 1]]));

        let (g, _) = complete_bipartite(1, 1).unwrap();
        let f =
            Framework::new(g, None, Configuration::new(1, pts(&[&[0], &[1]])).unwrap()).unwrap();
        let m = config_matrix(&f);
        assert_eq!(m, RatMatrix::from_i64_rows(&[&[0, 1], &[1, 1]]));
        assert_eq!(exactmat::rank(&m).unwrap(), 2);
    }

    #[test]
    fn moment_curve_configuration_has_full_rank() {
        // (t, t^2) for t = 1..6: any three rows form a Vandermonde matrix.
        let points: Vec<Vec<Rational>> = (1..=6).map(|t| vec![int(t), int(t * t)]).collect();
        let config = Configuration::new(2, points).unwrap();
        let m = config.homogeneous_matrix();
        assert_eq!((m.rows(), m.cols()), (6, 3));
        assert_eq!(exactmat::rank(&m).unwrap(), 3);
        assert!(is_general_position(&config).unwrap());
    }

    #[test]
    fn affine_spans() {
        assert_eq!(affine_span_dim(&pts(&[&[3, 4]])).unwrap(), 0);
        assert_eq!(
            affine_span_dim(&pts(&[&[0, 0], &[1, 1], &[2, 2]])).unwrap(),
            1
        );
        let odd: Vec<Vec<Rational>> = [1i64, 3, 5, 7]
            .iter()
            .map(|&t| vec![int(t), int(t * t), int(t * t * t)])
            .collect();
        assert_eq!(affine_span_dim(&odd).unwrap(), 3);
        assert_eq!(
            affine_span_dim::<Vec<Rational>>(&[]),
            Err(FrameworkError::EmptyPointSet)
        );
    }

    #[test]
    fn general_position_detects_collinear_triples() {
        let simplex = Configuration::new(2, pts(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap();
        assert!(is_general_position(&simplex).unwrap());
        let five =
            Configuration::new(2, pts(&[&[0, 0], &[1, 1], &[2, 2], &[5, -1], &[-3, 7]])).unwrap();
        assert!(!is_general_position(&five).unwrap());
        let two = Configuration::new(2, pts(&[&[0, 0], &[1, 0]])).unwrap();
        assert!(is_general_position(&two).is_err());
    }

    #[test]
    fn directions_follow_edge_orientation() {
        let (g, _) = complete_bipartite(1, 1).unwrap();
        let f =
            Framework::new(g, None, Configuration::new(1, pts(&[&[0], &[1]])).unwrap()).unwrap();
        assert_eq!(edge_directions(&f), vec![vec![int(1)]]);

        let dirs = edge_directions(&unit_square());
        // edges (0,2), (0,3), (1,2), (1,3)
        assert_eq!(dirs, pts(&[&[1, 0], &[0, 1], &[0, -1], &[-1, 0]]));
    }

    #[test]
    fn json_format_is_canonical() {
        let f = unit_square();
        let text = f.to_json();
        let expected = r#"{
  "dimension": 2,
  "parts": {
    "U": [
      0,
      1
    ],
    "V": [
      2,
      3
    ]
  },
  "edges": [
    [
      0,
      2
    ],
    [
      0,
      3
    ],
    [
      1,
      2
    ],
    [
      1,
      3
    ]
  ],
  "coords": {
    "0": [
      "0",
      "0"
    ],
    "1": [
      "1",
      "1"
    ],
    "2": [
      "1",
      "0"
    ],
    "3": [
      "0",
      "1"
    ]
  }
}
"#;
        assert_eq!(text, expected);
        assert_eq!(Framework::from_json(&text).unwrap(), f);
    }

    #[test]
    fn json_parsing_validates() {
        let missing_vertex = r#"{"dimension":1,"edges":[[0,2]],"coords":{"0":["0"],"2":["1"]}}"#;
        assert!(Framework::from_json(missing_vertex).is_err());
        let bad_rational = r#"{"dimension":1,"edges":[],"coords":{"0":["1/0"]}}"#;
        assert!(Framework::from_json(bad_rational).is_err());
        let ok = r#"{"dimension":1,"edges":[[1,0]],"coords":{"1":["5/10"],"0":["0"]}}"#;
        let f = Framework::from_json(ok).unwrap();
        assert_eq!(f.point(1), &[frac(1, 2)]);
        assert!(f.partition().is_none());
    }

    fn arb_framework() -> impl Strategy<Value = Framework> {
        (1usize..=3, 2usize..=10).prop_flat_map(|(d, n)| {
            let coords = proptest::collection::vec((-20i64..=20, 1i64..=4), n * d);
            let edges = proptest::collection::vec(any::<bool>(), n * (n - 1) / 2);
            (Just(d), Just(n), coords, edges).prop_filter_map(
                "coincident endpoints",
                |(d, n, coords, mask)| {
                    let points: Vec<Vec<Rational>> = coords
                        .chunks(d)
                        .map(|c| c.iter().map(|&(a, b)| frac(a, b)).collect())
                        .collect();
                    let edges: Vec<(usize, usize)> = (0..n)
                        .tuple_combinations()
                        .zip(mask)
                        .filter_map(|(e, keep)| keep.then_some(e))
                        .collect();
                    let graph = Graph::new(n, &edges).ok()?;
                    Framework::new(graph, None, Configuration::new(d, points).ok()?).ok()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn json_round_trip_is_byte_identical(f in arb_framework()) {
            let text = f.to_json();
            let back = Framework::from_json(&text).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(back.to_json(), text);
        }

        #[test]
        fn config_rank_is_span_plus_one(f in arb_framework()) {
            let r = exactmat::rank(&config_matrix(&f)).unwrap();
            prop_assert_eq!(r, affine_span_dim(f.points()).unwrap() + 1);
        }

        #[test]
        fn general_position_survives_deletion(
            raw in proptest::collection::vec((-30i64..=30, -30i64..=30), 4..8),
            drop in 0usize..8,
        ) {
            let points: Vec<Vec<Rational>> = raw.iter().map(|&(a, b)| vec![int(a), int(b)]).collect();
            let config = Configuration::new(2, points.clone()).unwrap();
            prop_assume!(is_general_position(&config).unwrap());
            let mut fewer = points;
            fewer.remove(drop % fewer.len());
            prop_assert!(is_general_position(&Configuration::new(2, fewer).unwrap()).unwrap());
        }

        #[test]
        fn complete_bipartite_is_valid(u in 1usize..8, v in 1usize..8) {
            let (g, part) = complete_bipartite(u, v).unwrap();
            prop_assert_eq!(g.edge_count(), u * v);
            prop_assert!(part.validate(&g).is_ok());
        }
    }
}
