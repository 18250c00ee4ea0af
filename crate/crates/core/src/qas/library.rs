//! Block libraries and the genomes that index into them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{Angle, Circuit, GateKind, Op};
use crate::error::{Error, Result};
use crate::sim::Observable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockRole {
    Encoding,
    Variational,
    Entangling,
    Measurement,
}

/// A circuit fragment. `Angle::Param(k)` inside a block is local to the
/// block (`k < n_params`); decoding renumbers it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub role: BlockRole,
    #[serde(default)]
    pub ops: Vec<Op>,
    #[serde(default)]
    pub n_params: usize,
    /// Only meaningful on measurement blocks: replaces the default readout.
    #[serde(default)]
    pub observables: Vec<Observable>,
}

impl Block {
    pub fn new(name: impl Into<String>, role: BlockRole, ops: Vec<Op>) -> Self {
        let n_params = ops
            .iter()
            .filter_map(|o| match o.angle {
                Some(Angle::Param(k)) => Some(k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        Block {
            name: name.into(),
            role,
            ops,
            n_params,
            observables: vec![],
        }
    }

    /// The do-nothing block; lets a fixed-length genome express shallower circuits.
    pub fn identity() -> Self {
        Block::new("id", BlockRole::Variational, vec![])
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty() && self.observables.is_empty()
    }
}

/// Per-slot candidate lists. A genome picks one candidate for each of its
/// first `len` slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockLibrary {
    pub n_qubits: usize,
    #[serde(default)]
    pub input_dim: usize,
    pub slots: Vec<Vec<Block>>,
}

impl BlockLibrary {
    /// The same candidate list repeated in `depth` slots.
    pub fn uniform(
        n_qubits: usize,
        input_dim: usize,
        candidates: Vec<Block>,
        depth: usize,
    ) -> Self {
        BlockLibrary {
            n_qubits,
            input_dim,
            slots: vec![candidates; depth],
        }
    }

    pub fn max_len(&self) -> usize {
        self.slots.len()
    }

    /// Checks that every block decodes on `n_qubits` and no slot is empty.
    pub fn validate(&self) -> Result<()> {
        if self.slots.is_empty() {
            return Err(Error::Config("block library has no slots".into()));
        }
        let mut probe = Circuit::new(self.n_qubits, self.input_dim, 0)?;
        for (i, slot) in self.slots.iter().enumerate() {
            if slot.is_empty() {
                return Err(Error::Config(format!("slot {i} has no candidate blocks")));
            }
            for block in slot {
                let mut c = Circuit::new(self.n_qubits, self.input_dim, block.n_params)?;
                for op in &block.ops {
                    c.push(op.clone()).map_err(|e| {
                        Error::Config(format!("slot {i}, block {:?}: {e}", block.name))
                    })?;
                }
                if !block.observables.is_empty() {
                    probe.set_observables(block.observables.clone())?;
                }
            }
        }
        Ok(())
    }

    /// Number of distinct full-length genomes, saturating.
    pub fn n_genomes(&self) -> u128 {
        self.slots
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }

    /// Every full-length genome in lexicographic order.
    pub fn enumerate(&self) -> Vec<Genome> {
        let mut out = vec![Genome::default()];
        for slot in &self.slots {
            out = out
                .into_iter()
                .flat_map(|g| {
                    (0..slot.len()).map(move |b| {
                        let mut next = g.clone();
                        next.0.push(b);
                        next
                    })
                })
                .collect();
        }
        out
    }

    fn block(&self, slot: usize, id: usize) -> Result<&Block> {
        let candidates = self.slots.get(slot).ok_or_else(|| {
            Error::Decode(format!(
                "genome longer than the {} library slots",
                self.slots.len()
            ))
        })?;
        candidates.get(id).ok_or_else(|| {
            Error::Decode(format!(
                "slot {slot} has no block {id} ({} candidates)",
                candidates.len()
            ))
        })
    }

    /// Concatenates the chosen blocks in genome order. Readout: the last
    /// measurement block's observables, else `Z` on every qubit.
    pub fn decode(&self, genome: &Genome) -> Result<Circuit> {
        let blocks = genome
            .0
            .iter()
            .enumerate()
            .map(|(s, &b)| self.block(s, b))
            .collect::<Result<Vec<_>>>()?;
        let n_params = blocks.iter().map(|b| b.n_params).sum();
        let mut c = Circuit::new(self.n_qubits, self.input_dim, n_params)?;
        let mut offset = 0;
        let mut observables = Observable::z_each(self.n_qubits);
        for b in blocks {
            for op in &b.ops {
                let mut op = op.clone();
                if let Some(Angle::Param(k)) = op.angle {
                    op.angle = Some(Angle::Param(k + offset));
                }
                c.push(op)
                    .map_err(|e| Error::Decode(format!("block {:?}: {e}", b.name)))?;
            }
            if !b.observables.is_empty() {
                observables = b.observables.clone();
            }
            offset += b.n_params;
        }
        c.set_observables(observables)?;
        Ok(c)
    }

    /// Blocks that contribute gates or a readout.
    pub fn depth(&self, genome: &Genome) -> Result<usize> {
        let mut d = 0;
        for (s, &b) in genome.0.iter().enumerate() {
            if !self.block(s, b)?.is_empty() {
                d += 1;
            }
        }
        Ok(d)
    }

    /// Range of op indices contributed by slot `slot` in the decoded circuit.
    pub fn op_range(&self, genome: &Genome, slot: usize) -> Result<std::ops::Range<usize>> {
        let mut start = 0;
        for (s, &b) in genome.0.iter().enumerate() {
            let len = self.block(s, b)?.ops.len();
            if s == slot {
                return Ok(start..start + len);
            }
            start += len;
        }
        Err(Error::Decode(format!("genome has no slot {slot}")))
    }
}

/// Two-qubit library of fixed gates, the usual search space for Bell-state
/// preparation: `id, H0, H1, X0, X1, Z0, CNOT01, CNOT10` in each slot.
pub fn bell_library(depth: usize) -> BlockLibrary {
    let g = |name: &str, kind: GateKind, q: usize| {
        Block::new(name, BlockRole::Variational, vec![Op::fixed(kind, vec![q])])
    };
    let cx = |name: &str, c: usize, t: usize| {
        Block::new(name, BlockRole::Entangling, vec![Op::cnot(c, t)])
    };
    let candidates = vec![
        Block::identity(),
        g("h0", GateKind::H, 0),
        g("h1", GateKind::H, 1),
        g("x0", GateKind::X, 0),
        g("x1", GateKind::X, 1),
        g("z0", GateKind::Z, 0),
        cx("cx01", 0, 1),
        cx("cx10", 1, 0),
    ];
    BlockLibrary::uniform(2, 0, candidates, depth)
}

/// A block choice per slot.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Genome(pub Vec<usize>);

impl Genome {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Block ids joined by `-`; the empty genome prints as `-`.
impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("-"))
    }
}

impl FromStr for Genome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Genome> {
        let s = s.trim();
        if s == "-" {
            return Ok(Genome::default());
        }
        s.split('-')
            .enumerate()
            .map(|(i, p)| {
                p.parse::<usize>().map_err(|e| Error::Parse {
                    location: format!("gene {i}"),
                    message: format!("{p:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Genome)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_examples() {
        let lib = bell_library(3);
        assert_eq!(lib.n_genomes(), 512);
        assert!(lib.decode(&Genome::default()).unwrap().is_empty());
        let wall = Block::new(
            "h-wall",
            BlockRole::Encoding,
            vec![
                Op::fixed(GateKind::H, vec![0]),
                Op::fixed(GateKind::H, vec![1]),
            ],
        );
        let lib2 = BlockLibrary::uniform(2, 0, vec![wall], 1);
        assert_eq!(lib2.decode(&Genome(vec![0])).unwrap().len(), 2);
        assert!(matches!(
            lib.decode(&Genome(vec![8])),
            Err(Error::Decode(_))
        ));
        assert!(matches!(
            lib.decode(&Genome(vec![0, 0, 0, 0])),
            Err(Error::Decode(_))
        ));
    }

    #[test]
    fn parameters_are_renumbered() {
        let rot = Block::new(
            "ry",
            BlockRole::Variational,
            vec![Op::rot(GateKind::Ry, 0, Angle::Param(0))],
        );
        assert_eq!(rot.n_params, 1);
        let lib = BlockLibrary::uniform(1, 0, vec![rot], 3);
        let c = lib.decode(&Genome(vec![0, 0, 0])).unwrap();
        assert_eq!(c.n_params(), 3);
        let slots: Vec<_> = c.ops().iter().map(|o| o.angle).collect();
        assert_eq!(
            slots,
            vec![
                Some(Angle::Param(0)),
                Some(Angle::Param(1)),
                Some(Angle::Param(2))
            ]
        );
    }

    #[test]
    fn genome_text_round_trip() {
        for g in [Genome::default(), Genome(vec![0]), Genome(vec![3, 0, 7])] {
            assert_eq!(g.to_string().parse::<Genome>().unwrap(), g);
        }
        assert!("1-x".parse::<Genome>().is_err());
    }

    #[test]
    fn depth_ignores_identity_blocks() {
        let lib = bell_library(3);
        assert_eq!(lib.depth(&Genome(vec![1, 0, 6])).unwrap(), 2);
        assert_eq!(lib.op_range(&Genome(vec![1, 0, 6]), 2).unwrap(), 1..2);
        assert_eq!(lib.enumerate().len(), 512);
    }

    #[test]
    fn validation() {
        assert!(bell_library(2).validate().is_ok());
        let bad = BlockLibrary::uniform(
            1,
            0,
            vec![Block::new(
                "cx",
                BlockRole::Entangling,
                vec![Op::cnot(0, 1)],
            )],
            1,
        );
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let empty = BlockLibrary {
            n_qubits: 1,
            input_dim: 0,
            slots: vec![vec![]],
        };
        assert!(matches!(empty.validate(), Err(Error::Config(_))));
    }
}
