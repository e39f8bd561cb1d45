//! Compiler passes over gate-model programs: connectivity validation,
//! CNOT direction rewriting, swap routing and ASAP scheduling.
//!
//! A [`Topology`] is a directed edge set: edge `c -> t` means a cnot with
//! control `c` and target `t` runs natively. `swap` and `cz` only need the
//! edge in either direction. Routing inserts swap chains along shortest
//! undirected paths (ties broken toward smaller qubit indices) and fixes
//! cnot direction by Hadamard conjugation when only the reverse edge exists.

use crate::asm::Program;
use crate::isa::{GateInstruction, Opcode};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PassError {
    #[error("`{}` is not a cnot", .0.mnemonic())]
    NotCnot(Opcode),
    #[error("topology is not connected as an undirected graph")]
    Disconnected,
    #[error("no undirected path between qubits {a} and {b}")]
    Unroutable { a: u64, b: u64 },
    #[error("program uses {program} qubits but the topology has {topology}")]
    ProgramTooLarge { program: u64, topology: u64 },
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("topology file line {line}: {message}")]
    TopologyParse { line: u32, message: String },
}

/// Hardware coupling graph over physical qubit indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    qubit_count: u64,
    edges: BTreeSet<(u64, u64)>,
}

impl Topology {
    pub fn new(
        qubit_count: u64,
        edges: impl IntoIterator<Item = (u64, u64)>,
    ) -> Result<Self, PassError> {
        let mut set = BTreeSet::new();
        for (c, t) in edges {
            if c == t {
                return Err(PassError::InvalidTopology(format!("self-edge on qubit {c}")));
            }
            if c >= qubit_count || t >= qubit_count {
                return Err(PassError::InvalidTopology(format!(
                    "edge {c} -> {t} out of range for {qubit_count} qubits"
                )));
            }
            set.insert((c, t));
        }
        Ok(Self {
            qubit_count,
            edges: set,
        })
    }

    pub fn qubit_count(&self) -> u64 {
        self.qubit_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_directed(&self, control: u64, target: u64) -> bool {
        self.edges.contains(&(control, target))
    }

    pub fn has_undirected(&self, a: u64, b: u64) -> bool {
        self.edges.contains(&(a, b)) || self.edges.contains(&(b, a))
    }

    /// Undirected adjacency lists with neighbors in ascending order.
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.qubit_count as usize;
        let mut adj = vec![BTreeSet::new(); n];
        for &(c, t) in &self.edges {
            adj[c as usize].insert(t as usize);
            adj[t as usize].insert(c as usize);
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.qubit_count as usize;
        if n <= 1 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// A chain: edges `i -> i+1`.
    pub fn line(n: u64) -> Topology {
        Topology::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1))).unwrap()
    }

    /// All ordered pairs.
    pub fn complete(n: u64) -> Topology {
        let mut edges = Vec::new();
        for c in 0..n {
            for t in 0..n {
                if c != t {
                    edges.push((c, t));
                }
            }
        }
        Topology::new(n, edges).unwrap()
    }

    /// Five qubits where only qubit 2 can be the target of a cnot.
    pub fn star5() -> Topology {
        Topology::new(5, [0, 1, 3, 4].map(|i| (i, 2))).unwrap()
    }

    /// Resolves `line-N`, `complete-N` or `star5`.
    pub fn preset(name: &str) -> Option<Topology> {
        if name == "star5" {
            return Some(Topology::star5());
        }
        if let Some(n) = name.strip_prefix("line-") {
            return n.parse().ok().filter(|&n| n >= 1).map(Topology::line);
        }
        if let Some(n) = name.strip_prefix("complete-") {
            return n.parse().ok().filter(|&n| n >= 1).map(Topology::complete);
        }
        None
    }

    /// Parses the `.topo` text format: `qubits N` then `edge c t` lines.
    /// `#` comments and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Topology, PassError> {
        let mut qubit_count: Option<u64> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = (idx + 1) as u32;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = body.split_whitespace().collect();
            match tokens.as_slice() {
                ["qubits", n] => {
                    if qubit_count.is_some() {
                        return Err(PassError::TopologyParse {
                            line,
                            message: "duplicate qubits line".into(),
                        });
                    }
                    qubit_count = Some(n.parse().map_err(|_| PassError::TopologyParse {
                        line,
                        message: format!("malformed qubit count `{n}`"),
                    })?);
                }
                ["edge", c, t] => {
                    let parse = |s: &str| {
                        s.parse::<u64>().map_err(|_| PassError::TopologyParse {
                            line,
                            message: format!("malformed qubit index `{s}`"),
                        })
                    };
                    edges.push((parse(c)?, parse(t)?));
                }
                _ => {
                    return Err(PassError::TopologyParse {
                        line,
                        message: format!("unrecognized line `{body}`"),
                    })
                }
            }
        }
        let qubit_count = qubit_count.ok_or(PassError::TopologyParse {
            line: 1,
            message: "missing `qubits N` line".into(),
        })?;
        Topology::new(qubit_count, edges)
    }
}

/// Bijection from logical qubits to physical qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout(Vec<u64>);

impl Layout {
    pub fn identity(n: u64) -> Self {
        Layout((0..n).collect())
    }

    pub fn physical_of(&self, logical: u64) -> u64 {
        self.0[logical as usize]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(l, &p)| l as u64 == p)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// The induced permutation on basis-state indices: bit `l` of the input
    /// moves to bit `physical_of(l)` of the output.
    pub fn basis_permutation(&self) -> Vec<usize> {
        let n = self.0.len();
        let dim = 1usize << n;
        (0..dim)
            .map(|s| {
                let mut out = 0usize;
                for (l, &p) in self.0.iter().enumerate() {
                    if s & (1 << l) != 0 {
                        out |= 1 << p;
                    }
                }
                out
            })
            .collect()
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .map(|(l, p)| format!("{l}->{p}"))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A connectivity complaint about one instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub index: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instruction {}: {}", self.index, self.message)
    }
}

/// Lists every two-qubit instruction whose operands do not sit on a usable
/// edge: cnot needs the directed edge control -> target, swap and cz need
/// the edge in either direction.
pub fn validate_connectivity(prog: &Program, topo: &Topology) -> Vec<Violation> {
    let mut violations = Vec::new();
    for (index, inst) in prog.instructions.iter().enumerate() {
        let mut bad_index = false;
        for q in inst.touched() {
            if q >= topo.qubit_count() {
                violations.push(Violation {
                    index,
                    message: format!("qubit {q} not present in the {}-qubit topology", topo.qubit_count()),
                });
                bad_index = true;
            }
        }
        if bad_index || inst.opcode.arity() != 2 {
            continue;
        }
        let (c, t) = (inst.control, inst.target);
        match inst.opcode {
            Opcode::Cnot => {
                if !topo.has_directed(c, t) {
                    let message = if topo.has_directed(t, c) {
                        format!("cnot {c} -> {t} only available in the opposite direction")
                    } else {
                        format!("no edge between {c} and {t}")
                    };
                    violations.push(Violation { index, message });
                }
            }
            _ => {
                if !topo.has_undirected(c, t) {
                    violations.push(Violation {
                        index,
                        message: format!("no edge between {c} and {t}"),
                    });
                }
            }
        }
    }
    violations
}

/// Rewrites a cnot onto the reversed edge by Hadamard conjugation:
/// `h c; h t; cnot t->c; h c; h t` equals `cnot c->t`.
pub fn reverse_cnot_rewrite(inst: &GateInstruction) -> Result<[GateInstruction; 5], PassError> {
    if inst.opcode != Opcode::Cnot {
        return Err(PassError::NotCnot(inst.opcode));
    }
    let (c, t) = (inst.control, inst.target);
    Ok([
        GateInstruction::unary(Opcode::H, c),
        GateInstruction::unary(Opcode::H, t),
        GateInstruction::binary(Opcode::Cnot, c, t),
        GateInstruction::unary(Opcode::H, c),
        GateInstruction::unary(Opcode::H, t),
    ])
}

/// BFS distances from `dst`, then a greedy walk from `src` picking the
/// smallest-index neighbor that decreases the distance. Yields the shortest
/// path whose intermediate qubits are lexicographically smallest.
fn shortest_path(adj: &[Vec<usize>], src: usize, dst: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut dist = vec![usize::MAX; n];
    dist[dst] = 0;
    let mut queue = std::collections::VecDeque::from([dst]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    if dist[src] == usize::MAX {
        return None;
    }
    let mut path = vec![src];
    let mut current = src;
    while current != dst {
        let next = adj[current]
            .iter()
            .copied()
            .find(|&w| dist[w] + 1 == dist[current])?;
        path.push(next);
        current = next;
    }
    Some(path)
}

/// Routes a program onto a topology by inserting swap chains, fixing cnot
/// direction via [`reverse_cnot_rewrite`] where only the reverse edge exists.
///
/// The routed program runs on the full physical register; the returned
/// [`Layout`] maps each logical qubit to its final physical position.
pub fn route_swaps(prog: &Program, topo: &Topology) -> Result<(Program, Layout), PassError> {
    if prog.qubit_count > topo.qubit_count() {
        return Err(PassError::ProgramTooLarge {
            program: prog.qubit_count,
            topology: topo.qubit_count(),
        });
    }
    if !topo.is_connected() {
        return Err(PassError::Disconnected);
    }
    let n = topo.qubit_count() as usize;
    let adj = topo.adjacency();
    // phys_of[logical] and log_of[physical] stay mutually inverse.
    let mut phys_of: Vec<usize> = (0..n).collect();
    let mut log_of: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(prog.instructions.len());

    let mut apply_swap = |phys_of: &mut Vec<usize>, log_of: &mut Vec<usize>, p: usize, q: usize| {
        let (lp, lq) = (log_of[p], log_of[q]);
        log_of[p] = lq;
        log_of[q] = lp;
        phys_of[lp] = q;
        phys_of[lq] = p;
    };

    for inst in &prog.instructions {
        if inst.target >= prog.qubit_count || inst.control >= prog.qubit_count {
            return Err(PassError::ProgramTooLarge {
                program: prog.qubit_count,
                topology: topo.qubit_count(),
            });
        }
        if inst.opcode.arity() == 1 {
            let p = phys_of[inst.target as usize] as u64;
            out.push(GateInstruction::unary(inst.opcode, p));
            continue;
        }
        let mut pc = phys_of[inst.control as usize];
        let pt = phys_of[inst.target as usize];
        if !topo.has_undirected(pc as u64, pt as u64) {
            let path = shortest_path(&adj, pc, pt).ok_or(PassError::Unroutable {
                a: pc as u64,
                b: pt as u64,
            })?;
            // Walk the control toward the target, stopping one hop short.
            for w in path.windows(2).take(path.len() - 2) {
                out.push(GateInstruction::binary(Opcode::Swap, w[1] as u64, w[0] as u64));
                apply_swap(&mut phys_of, &mut log_of, w[0], w[1]);
            }
            pc = phys_of[inst.control as usize];
        }
        let (c, t) = (pc as u64, pt as u64);
        match inst.opcode {
            Opcode::Cnot if !topo.has_directed(c, t) => {
                out.extend_from_slice(&reverse_cnot_rewrite(&GateInstruction::binary(
                    Opcode::Cnot,
                    t,
                    c,
                ))?);
            }
            op => out.push(GateInstruction::binary(op, t, c)),
        }
    }

    let layout = Layout(phys_of.into_iter().map(|p| p as u64).collect());
    Ok((Program::new(topo.qubit_count(), out), layout))
}

/// Instructions scheduled into one clock cycle; their qubit sets are
/// pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeSlice {
    pub instructions: Vec<usize>,
}

/// Greedy ASAP scheduling: each instruction lands in the earliest slice
/// strictly after the latest slice touching any of its qubits.
pub fn schedule_time_slices(prog: &Program) -> Vec<TimeSlice> {
    let mut slices: Vec<TimeSlice> = Vec::new();
    let mut last_use: HashMap<u64, usize> = HashMap::new();
    for (i, inst) in prog.instructions.iter().enumerate() {
        let touched = inst.touched();
        let slot = touched
            .iter()
            .filter_map(|q| last_use.get(q).map(|&s| s + 1))
            .max()
            .unwrap_or(0);
        if slot == slices.len() {
            slices.push(TimeSlice {
                instructions: Vec::new(),
            });
        }
        slices[slot].instructions.push(i);
        for q in touched {
            last_use.insert(q, slot);
        }
    }
    slices
}
