use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Node state of a network constructor. Leader and ordinary states carry a
/// counter bounded by the protocol parameter `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeState {
    Free,
    Leader(u32),
    Ordinary(u32),
}

impl NodeState {
    pub fn counter(self) -> Option<u32> {
        match self {
            NodeState::Free => None,
            NodeState::Leader(c) | NodeState::Ordinary(c) => Some(c),
        }
    }

    pub fn is_free(self) -> bool {
        matches!(self, NodeState::Free)
    }

    /// Same kind with the counter replaced. Free stays Free.
    pub fn with_counter(self, c: u32) -> NodeState {
        match self {
            NodeState::Free => NodeState::Free,
            NodeState::Leader(_) => NodeState::Leader(c),
            NodeState::Ordinary(_) => NodeState::Ordinary(c),
        }
    }
}

impl fmt::Display for NodeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeState::Free => write!(f, "F"),
            NodeState::Leader(c) => write!(f, "L{c}"),
            NodeState::Ordinary(c) => write!(f, "O{c}"),
        }
    }
}

impl FromStr for NodeState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidInput(format!("bad node state {s:?}"));
        if s == "F" {
            return Ok(NodeState::Free);
        }
        let (kind, digits) = s.split_at(s.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?);
        // reject "+3", "03" and friends so rendering stays canonical
        if digits.is_empty()
            || !digits.bytes().all(|b| b.is_ascii_digit())
            || (digits.len() > 1 && digits.starts_with('0'))
        {
            return Err(bad());
        }
        let c: u32 = digits.parse().map_err(|_| bad())?;
        match kind {
            "L" => Ok(NodeState::Leader(c)),
            "O" => Ok(NodeState::Ordinary(c)),
            _ => Err(bad()),
        }
    }
}
