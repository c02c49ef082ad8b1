use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Total degree of a plane sextic.
pub const SEXTIC_DEGREE: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("a singular type needs at least one component")]
    Empty,
    #[error("component degrees must be positive")]
    ZeroDegree,
    #[error("component degrees sum to {0}, but a sextic has total degree 6")]
    DegreeSum(u32),
    #[error(
        "a degree-{degree} component has at most {max} nodes (genus bound (d-1)(d-2)/2), got {self_nodes}"
    )]
    GenusBound {
        degree: u32,
        self_nodes: u32,
        max: u32,
    },
    #[error("cannot parse `{0}`: expected comma-separated degrees like `1,5` or `6[n=5]`")]
    Syntax(String),
}

/// One irreducible component: its degree and the number of nodes it has on
/// itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component {
    pub degree: u32,
    pub self_nodes: u32,
}

impl Component {
    pub fn smooth(degree: u32) -> Self {
        Self {
            degree,
            self_nodes: 0,
        }
    }

    /// Arithmetic genus of a plane curve of this degree.
    pub fn max_self_nodes(degree: u32) -> u32 {
        if degree < 3 {
            0
        } else {
            (degree - 1) * (degree - 2) / 2
        }
    }
}

/// Combinatorial type of a nodal sextic: components sorted by
/// `(degree, self_nodes)`. Components meet transversally, so components `i`
/// and `j` share `d_i d_j` nodes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SingularType {
    components: Vec<Component>,
}

/// A node of the sextic, i.e. one exceptional class `E_j`. Component indices
/// are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeLabel {
    /// The `index`-th intersection point of components `first < second`.
    Intersection {
        first: usize,
        second: usize,
        index: u32,
    },
    /// The `index`-th node lying on a single component.
    SelfNode { component: usize, index: u32 },
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NodeLabel::Intersection {
                first,
                second,
                index,
            } => write!(f, "C{}.C{}#{}", first + 1, second + 1, index + 1),
            NodeLabel::SelfNode { component, index } => {
                write!(f, "C{}#{}", component + 1, index + 1)
            }
        }
    }
}

impl SingularType {
    pub fn new(mut components: Vec<Component>) -> Result<Self, TypeError> {
        if components.is_empty() {
            return Err(TypeError::Empty);
        }
        if components.iter().any(|c| c.degree == 0) {
            return Err(TypeError::ZeroDegree);
        }
        let sum: u32 = components.iter().map(|c| c.degree).sum();
        if sum != SEXTIC_DEGREE {
            return Err(TypeError::DegreeSum(sum));
        }
        for c in &components {
            let max = Component::max_self_nodes(c.degree);
            if c.self_nodes > max {
                return Err(TypeError::GenusBound {
                    degree: c.degree,
                    self_nodes: c.self_nodes,
                    max,
                });
            }
        }
        components.sort();
        Ok(Self { components })
    }

    /// Union of smooth curves of the given degrees.
    pub fn smooth_components(degrees: &[u32]) -> Result<Self, TypeError> {
        Self::new(degrees.iter().map(|&d| Component::smooth(d)).collect())
    }

    /// Irreducible sextic with `nodes` nodes.
    pub fn irreducible(nodes: u32) -> Result<Self, TypeError> {
        Self::new(vec![Component {
            degree: SEXTIC_DEGREE,
            self_nodes: nodes,
        }])
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Number of irreducible components `l`.
    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn is_irreducible(&self) -> bool {
        self.components.len() == 1
    }

    /// True when every component is smooth.
    pub fn has_smooth_components(&self) -> bool {
        self.components.iter().all(|c| c.self_nodes == 0)
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.components.iter().map(|c| c.degree).collect()
    }

    /// `Σ_{i<j} d_i d_j + Σ_i δ_i`.
    pub fn node_count(&self) -> u32 {
        let c = &self.components;
        let mut n: u32 = c.iter().map(|x| x.self_nodes).sum();
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                n += c[i].degree * c[j].degree;
            }
        }
        n
    }

    /// Nodes in basis order: intersections by `(i, j, k)`, then self-nodes
    /// by `(i, k)`.
    pub fn nodes(&self) -> Vec<NodeLabel> {
        let c = &self.components;
        let mut out = Vec::with_capacity(self.node_count() as usize);
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                for k in 0..c[i].degree * c[j].degree {
                    out.push(NodeLabel::Intersection {
                        first: i,
                        second: j,
                        index: k,
                    });
                }
            }
        }
        for (i, comp) in c.iter().enumerate() {
            for k in 0..comp.self_nodes {
                out.push(NodeLabel::SelfNode {
                    component: i,
                    index: k,
                });
            }
        }
        out
    }

    /// Multiplicity `a_ij` of the exceptional class of `node` in the
    /// pullback of component `i`: 1 at an intersection point on it, 2 at a
    /// node of it, 0 otherwise.
    pub fn coefficient(component: usize, node: &NodeLabel) -> u32 {
        match *node {
            NodeLabel::Intersection { first, second, .. }
                if first == component || second == component =>
            {
                1
            }
            NodeLabel::SelfNode { component: c, .. } if c == component => 2,
            _ => 0,
        }
    }

    /// Parenthesised label such as `(1,2,3)`.
    pub fn label(&self) -> String {
        format!("({})", self.descriptor())
    }

    /// Descriptor in the command-line grammar, e.g. `1,5` or `6[n=5]`.
    pub fn descriptor(&self) -> String {
        self.components
            .iter()
            .map(|c| {
                if c.self_nodes == 0 {
                    c.degree.to_string()
                } else {
                    format!("{}[n={}]", c.degree, c.self_nodes)
                }
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for SingularType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

fn parse_component(item: &str) -> Option<Component> {
    let item = item.trim();
    let (deg, nodes) = match item.split_once('[') {
        None => (item, 0),
        Some((deg, rest)) => {
            let inner = rest.strip_suffix(']')?.trim();
            let n = inner
                .strip_prefix("n")?
                .trim_start()
                .strip_prefix('=')?
                .trim();
            (deg.trim(), n.parse().ok()?)
        }
    };
    if deg.is_empty() || !deg.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(Component {
        degree: deg.parse().ok()?,
        self_nodes: nodes,
    })
}

impl FromStr for SingularType {
    type Err = TypeError;

    fn from_str(s: &str) -> Result<Self, TypeError> {
        let body = s.trim();
        let body = body
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .unwrap_or(body);
        if body.is_empty() {
            return Err(TypeError::Syntax(s.to_string()));
        }
        let comps = body
            .split(',')
            .map(parse_component)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| TypeError::Syntax(s.to_string()))?;
        SingularType::new(comps)
    }
}

/// The eleven types whose generic member is a union of smooth curves, in
/// census order.
pub fn canonical_types() -> Vec<SingularType> {
    const DEGREES: [&[u32]; 11] = [
        &[6],
        &[1, 5],
        &[2, 4],
        &[3, 3],
        &[1, 1, 4],
        &[1, 2, 3],
        &[2, 2, 2],
        &[1, 1, 1, 3],
        &[1, 1, 2, 2],
        &[1, 1, 1, 1, 2],
        &[1, 1, 1, 1, 1, 1],
    ];
    DEGREES
        .iter()
        .map(|d| SingularType::smooth_components(d).expect("valid census type"))
        .collect()
}
