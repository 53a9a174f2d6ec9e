use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::array::ArrayModel;

/// Node index; `0` is ground.
pub type NodeId = usize;

pub const GROUND: NodeId = 0;

pub type ImpedanceFn = dyn Fn(f64) -> Result<DMatrix<Complex64>, String> + Send + Sync;

/// Frequency-dependent impedance supplied by user code.
#[derive(Clone)]
pub struct ImpedanceCallback(pub Arc<ImpedanceFn>);

impl fmt::Debug for ImpedanceCallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ImpedanceCallback(..)")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ImpedanceSource {
    /// Frequency-independent matrix, rows of complex ohms.
    Fixed { matrix: Vec<Vec<Complex64>> },
    ArrayModel { model: ArrayModel },
    #[serde(skip)]
    Callback(ImpedanceCallback),
}

impl ImpedanceSource {
    pub fn fixed(m: &DMatrix<Complex64>) -> Self {
        ImpedanceSource::Fixed { matrix: m.row_iter().map(|r| r.iter().copied().collect()).collect() }
    }

    pub fn callback<F>(f: F) -> Self
    where
        F: Fn(f64) -> Result<DMatrix<Complex64>, String> + Send + Sync + 'static,
    {
        ImpedanceSource::Callback(ImpedanceCallback(Arc::new(f)))
    }

    pub fn evaluate(&self, frequency: f64) -> Result<DMatrix<Complex64>, String> {
        match self {
            ImpedanceSource::Fixed { matrix } => {
                let n = matrix.len();
                if matrix.iter().any(|r| r.len() != n) {
                    return Err("fixed impedance matrix is not square".into());
                }
                Ok(DMatrix::from_fn(n, n, |i, j| matrix[i][j]))
            }
            ImpedanceSource::ArrayModel { model } => model.impedance(frequency).map_err(|e| e.to_string()),
            ImpedanceSource::Callback(cb) => (cb.0)(frequency),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Control {
    NodePair { p: NodeId, n: NodeId },
    /// EMF of the source behind port `index`.
    PortEmf { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlTerm {
    pub gain: Complex64,
    pub control: Control,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Element {
    Resistor {
        p: NodeId,
        n: NodeId,
        ohms: f64,
    },
    Capacitor {
        p: NodeId,
        n: NodeId,
        farads: f64,
        #[serde(default)]
        series_resistance_ohm: f64,
    },
    Inductor {
        p: NodeId,
        n: NodeId,
        henries: f64,
        #[serde(default)]
        series_resistance_ohm: f64,
    },
    /// Ideal TEM line between two ground-referenced nodes.
    Line {
        n1: NodeId,
        n2: NodeId,
        z0_ohm: f64,
        theta_deg: f64,
        f_ref_hz: f64,
    },
    /// Short-circuited stub between `p` and `n`.
    ShortStub {
        p: NodeId,
        n: NodeId,
        z0_ohm: f64,
        theta_deg: f64,
        f_ref_hz: f64,
    },
    /// N-port impedance block; port `i` is `ports[i] = (p, n)`.
    ZBlock {
        ports: Vec<(NodeId, NodeId)>,
        source: ImpedanceSource,
    },
    VoltageSource {
        p: NodeId,
        n: NodeId,
        emf: Complex64,
        #[serde(default)]
        internal_ohm: Complex64,
    },
    /// EMF `Σ gain·control` behind `internal_ohm`.
    Vcvs {
        p: NodeId,
        n: NodeId,
        terms: Vec<ControlTerm>,
        #[serde(default)]
        internal_ohm: Complex64,
    },
}

impl Element {
    fn nodes(&self) -> Vec<NodeId> {
        match self {
            Element::Resistor { p, n, .. }
            | Element::Capacitor { p, n, .. }
            | Element::Inductor { p, n, .. }
            | Element::ShortStub { p, n, .. }
            | Element::VoltageSource { p, n, .. }
            | Element::Vcvs { p, n, .. } => vec![*p, *n],
            Element::Line { n1, n2, .. } => vec![*n1, *n2, GROUND],
            Element::ZBlock { ports, .. } => ports.iter().flat_map(|&(p, n)| [p, n]).collect(),
        }
    }

    /// Groups of nodes this element ties together.
    fn connections(&self) -> Vec<Vec<NodeId>> {
        match self {
            Element::Line { n1, n2, .. } => vec![vec![*n1, GROUND], vec![*n2, GROUND]],
            Element::ZBlock { ports, .. } => ports.iter().map(|&(p, n)| vec![p, n]).collect(),
            other => vec![other.nodes()],
        }
    }

    /// Number of branch-current unknowns the element adds.
    pub(crate) fn branch_count(&self) -> usize {
        match self {
            Element::Line { .. } => 2,
            Element::ShortStub { .. } | Element::VoltageSource { .. } | Element::Vcvs { .. } => 1,
            Element::ZBlock { ports, .. } => ports.len(),
            _ => 0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Element::Resistor { .. } => "resistor",
            Element::Capacitor { .. } => "capacitor",
            Element::Inductor { .. } => "inductor",
            Element::Line { .. } => "line",
            Element::ShortStub { .. } => "short stub",
            Element::ZBlock { .. } => "impedance block",
            Element::VoltageSource { .. } => "voltage source",
            Element::Vcvs { .. } => "vcvs",
        }
    }
}

/// Port driven by an EMF behind its reference resistance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Port {
    pub name: String,
    pub p: NodeId,
    pub n: NodeId,
    pub reference_ohm: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Netlist {
    /// Names of nodes `1..`; ground is implicit.
    pub nodes: Vec<String>,
    pub elements: Vec<Element>,
    pub ports: Vec<Port>,
}

impl Netlist {
    pub fn new() -> Self {
        Self::default()
    }

    /// Id of the named node, creating it if needed. `"gnd"` and `"0"` are
    /// ground.
    pub fn node(&mut self, name: &str) -> NodeId {
        if name == "gnd" || name == "0" {
            return GROUND;
        }
        match self.nodes.iter().position(|n| n == name) {
            Some(i) => i + 1,
            None => {
                self.nodes.push(name.to_string());
                self.nodes.len()
            }
        }
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        if id == GROUND {
            "gnd"
        } else {
            self.nodes.get(id - 1).map(String::as_str).unwrap_or("?")
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len() + 1
    }

    pub fn add(&mut self, element: Element) -> &mut Self {
        self.elements.push(element);
        self
    }

    pub fn add_port(&mut self, name: &str, p: NodeId, n: NodeId, reference_ohm: f64) -> &mut Self {
        self.ports.push(Port { name: name.to_string(), p, n, reference_ohm });
        self
    }

    pub fn to_json(&self) -> Result<String, EngineError> {
        serde_json::to_string_pretty(self).map_err(|e| EngineError::InvalidNetlist(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, EngineError> {
        let n: Netlist = serde_json::from_str(text).map_err(|e| EngineError::InvalidNetlist(e.to_string()))?;
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let count = self.node_count();
        let bad = |msg: String| Err(EngineError::InvalidNetlist(msg));
        for (k, e) in self.elements.iter().enumerate() {
            if let Some(&id) = e.nodes().iter().find(|&&id| id >= count) {
                return bad(format!("element {k} ({}) references unknown node {id}", e.label()));
            }
            let ok = match e {
                Element::Resistor { ohms, .. } => *ohms > 0.0,
                Element::Capacitor { farads, series_resistance_ohm, .. } => *farads > 0.0 && *series_resistance_ohm >= 0.0,
                Element::Inductor { henries, series_resistance_ohm, .. } => *henries > 0.0 && *series_resistance_ohm >= 0.0,
                Element::Line { z0_ohm, theta_deg, f_ref_hz, .. } | Element::ShortStub { z0_ohm, theta_deg, f_ref_hz, .. } => {
                    *z0_ohm > 0.0 && *theta_deg >= 0.0 && *f_ref_hz > 0.0
                }
                Element::ZBlock { ports, .. } => !ports.is_empty(),
                Element::VoltageSource { .. } => true,
                Element::Vcvs { terms, .. } => terms.iter().all(|t| match t.control {
                    Control::NodePair { p, n } => p < count && n < count,
                    Control::PortEmf { index } => index < self.ports.len(),
                }),
            };
            if !ok {
                return bad(format!("element {k} ({}) has non-physical parameters", e.label()));
            }
        }
        for port in &self.ports {
            if !(port.reference_ohm > 0.0) {
                return bad(format!("port {} reference impedance must be positive", port.name));
            }
            if port.p >= count || port.n >= count || port.p == port.n {
                return bad(format!("port {} has invalid terminals", port.name));
            }
        }
        self.check_connected()
    }

    fn check_connected(&self) -> Result<(), EngineError> {
        let mut parent: Vec<usize> = (0..self.node_count()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut union = |a: usize, b: usize| {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        };
        for e in &self.elements {
            for group in e.connections() {
                for w in group.windows(2) {
                    union(w[0], w[1]);
                }
            }
        }
        for p in &self.ports {
            union(p.p, p.n);
        }
        let root = find(&mut parent, GROUND);
        for id in 1..self.node_count() {
            if find(&mut parent, id) != root {
                return Err(EngineError::FloatingNode(self.node_name(id).to_string()));
            }
        }
        Ok(())
    }
}
