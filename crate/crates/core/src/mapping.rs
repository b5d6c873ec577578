//! Code-to-label compaction tables for P-bit LBP codes.
//!
//! | mode   | label count      | labels                                             |
//! |--------|------------------|----------------------------------------------------|
//! | `raw`  | 2^P              | the code itself                                    |
//! | `u2`   | P(P-1) + 3       | uniform codes in ascending order, then one shared bin |
//! | `ri`   | necklace count   | minimal bit-rotation, compacted in ascending order |
//! | `riu2` | P + 2            | popcount for uniform codes, P + 1 otherwise        |
//!
//! A code is uniform when its circular bit string has at most two 0/1
//! transitions.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{param_err, Error, Result};

pub const MIN_NEIGHBORS: u32 = 2;
pub const MAX_NEIGHBORS: u32 = 24;

const UNIFORM_MAX_TRANSITIONS: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MappingKind {
    Raw,
    U2,
    Ri,
    Riu2,
}

impl MappingKind {
    pub const ALL: [MappingKind; 4] = [MappingKind::Raw, MappingKind::U2, MappingKind::Ri, MappingKind::Riu2];

    pub fn as_str(self) -> &'static str {
        match self {
            MappingKind::Raw => "raw",
            MappingKind::U2 => "u2",
            MappingKind::Ri => "ri",
            MappingKind::Riu2 => "riu2",
        }
    }
}

impl fmt::Display for MappingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MappingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(MappingKind::Raw),
            "u2" => Ok(MappingKind::U2),
            "ri" => Ok(MappingKind::Ri),
            "riu2" => Ok(MappingKind::Riu2),
            other => Err(param_err!("unknown mapping {other:?} (expected raw, u2, ri or riu2)")),
        }
    }
}

pub(crate) fn check_neighbors(neighbors: u32) -> Result<()> {
    if (MIN_NEIGHBORS..=MAX_NEIGHBORS).contains(&neighbors) {
        Ok(())
    } else {
        Err(param_err!("neighbors {neighbors} outside [{MIN_NEIGHBORS}, {MAX_NEIGHBORS}]"))
    }
}

#[inline]
fn mask(neighbors: u32) -> u32 {
    (1u32 << neighbors) - 1
}

/// Rotates a `neighbors`-bit code right by one position.
#[inline]
fn rotate_right(code: u32, neighbors: u32) -> u32 {
    ((code >> 1) | ((code & 1) << (neighbors - 1))) & mask(neighbors)
}

#[inline]
fn transitions(code: u32, neighbors: u32) -> u32 {
    (code ^ rotate_right(code, neighbors)).count_ones()
}

fn min_rotation(code: u32, neighbors: u32) -> u32 {
    let mut best = code;
    let mut r = code;
    for _ in 1..neighbors {
        r = rotate_right(r, neighbors);
        best = best.min(r);
    }
    best
}

/// Number of 0↔1 transitions in the circular `neighbors`-bit string `code`.
pub fn uniformity(code: u32, neighbors: u32) -> Result<u32> {
    check_neighbors(neighbors)?;
    if code > mask(neighbors) {
        return Err(param_err!("code {code} does not fit in {neighbors} bits"));
    }
    Ok(transitions(code, neighbors))
}

/// Label count of `kind` over `neighbors`-bit codes, without building a table.
pub fn label_count(kind: MappingKind, neighbors: u32) -> usize {
    let p = neighbors as usize;
    match kind {
        MappingKind::Raw => 1usize << p,
        MappingKind::U2 => p * (p - 1) + 3,
        MappingKind::Riu2 => p + 2,
        MappingKind::Ri => necklace_count(neighbors),
    }
}

/// Binary necklaces of length `n`: (1/n) Σ_{d | n} φ(d) 2^(n/d).
fn necklace_count(n: u32) -> usize {
    fn phi(mut m: u32) -> u64 {
        let mut result = m as u64;
        let mut f = 2;
        while f * f <= m {
            if m.is_multiple_of(f) {
                while m.is_multiple_of(f) {
                    m /= f;
                }
                result -= result / f as u64;
            }
            f += 1;
        }
        if m > 1 {
            result -= result / m as u64;
        }
        result
    }
    let total: u64 = (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| phi(d) << (n / d)).sum();
    (total / n as u64) as usize
}

/// Lookup table from raw codes to compact labels.
///
/// The raw mode stores no table; lookups return the code itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingTable {
    neighbors: u32,
    kind: MappingKind,
    table: Option<Vec<u32>>,
    label_count: usize,
}

impl MappingTable {
    pub fn build(neighbors: u32, kind: MappingKind) -> Result<Self> {
        check_neighbors(neighbors)?;
        let size = 1usize << neighbors;
        let p = neighbors;
        let table = match kind {
            MappingKind::Raw => None,
            MappingKind::U2 => {
                let shared = p * (p - 1) + 2;
                let mut next = 0;
                let table = (0..size as u32)
                    .map(|code| {
                        if transitions(code, p) <= UNIFORM_MAX_TRANSITIONS {
                            next += 1;
                            next - 1
                        } else {
                            shared
                        }
                    })
                    .collect::<Vec<_>>();
                debug_assert_eq!(next, shared);
                Some(table)
            }
            MappingKind::Ri => {
                // Representatives are the fixed points of min_rotation; numbering
                // them while walking codes upward gives ascending label order.
                let mut rep_label = vec![u32::MAX; size];
                let mut next = 0;
                let mut table = vec![0u32; size];
                for code in 0..size as u32 {
                    let rep = min_rotation(code, p) as usize;
                    if rep_label[rep] == u32::MAX {
                        rep_label[rep] = next;
                        next += 1;
                    }
                    table[code as usize] = rep_label[rep];
                }
                Some(table)
            }
            MappingKind::Riu2 => Some(
                (0..size as u32)
                    .map(|code| {
                        if transitions(code, p) <= UNIFORM_MAX_TRANSITIONS {
                            code.count_ones()
                        } else {
                            p + 1
                        }
                    })
                    .collect(),
            ),
        };
        Ok(MappingTable { neighbors, kind, table, label_count: label_count(kind, neighbors) })
    }

    #[inline]
    pub fn neighbors(&self) -> u32 {
        self.neighbors
    }

    #[inline]
    pub fn kind(&self) -> MappingKind {
        self.kind
    }

    #[inline]
    pub fn label_count(&self) -> usize {
        self.label_count
    }

    /// Number of codes covered, always `2^P`.
    #[inline]
    pub fn len(&self) -> usize {
        1usize << self.neighbors
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Label for `code`. Panics if `code >= 2^P`.
    #[inline]
    pub fn get(&self, code: u32) -> u32 {
        match &self.table {
            Some(t) => t[code as usize],
            None => {
                assert!(code <= mask(self.neighbors), "code {code} exceeds {} bits", self.neighbors);
                code
            }
        }
    }

    /// Borrowed table for non-raw modes.
    pub fn as_slice(&self) -> Option<&[u32]> {
        self.table.as_deref()
    }
}
