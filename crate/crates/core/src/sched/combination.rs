use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of links (LB-BS plus access points).
pub const MAX_LINKS: usize = 16;

/// A subset of links, stored as a bitmask with link `i` on bit `i`.
/// The mask value doubles as the canonical index `j` of the combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinkCombination(u32);

impl LinkCombination {
    pub const EMPTY: LinkCombination = LinkCombination(0);

    pub fn from_index(index: usize) -> Self {
        LinkCombination(index as u32)
    }

    pub fn from_links<I: IntoIterator<Item = usize>>(links: I) -> Self {
        LinkCombination(links.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    /// Every link of an `n_links` system.
    pub fn all(n_links: usize) -> Self {
        LinkCombination(((1u64 << n_links) - 1) as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn contains(self, link: usize) -> bool {
        link < 32 && self.0 & (1 << link) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn links(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.0 & (1 << i) != 0)
    }
}

impl fmt::Display for LinkCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, l) in self.links().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// The strategy space: all `2^n` subsets of `n` links in bitmask order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinationSet {
    links: usize,
    members: Vec<LinkCombination>,
}

impl CombinationSet {
    pub fn links(&self) -> usize {
        self.links
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = LinkCombination> + '_ {
        self.members.iter().copied()
    }

    pub fn get(&self, j: usize) -> Option<LinkCombination> {
        self.members.get(j).copied()
    }
}

pub fn enumerate_combinations(n_links: usize) -> Result<CombinationSet> {
    if n_links == 0 || n_links > MAX_LINKS {
        return Err(Error::LinkCapExceeded(n_links));
    }
    let members = (0..1usize << n_links).map(LinkCombination::from_index).collect();
    Ok(CombinationSet { links: n_links, members })
}

/// Ordering used to break cost ties: fewer links first, then lower index.
pub fn lean_order(a: LinkCombination, b: LinkCombination) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then(a.index().cmp(&b.index()))
}
