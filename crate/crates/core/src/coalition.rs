use std::fmt;

use serde::{Deserialize, Serialize};

/// A coalition of players; bit `i` is set when player `i` (zero-based) is a member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoalitionMask(u32);

impl CoalitionMask {
    pub const EMPTY: Self = Self(0);

    pub const fn from_bits(bits: u32) -> Self {
        Self(bits)
    }

    /// All of players `0..n`.
    pub fn grand(n: usize) -> Self {
        assert!(n < 32, "coalition masks hold at most 31 players");
        Self((1u32 << n) - 1)
    }

    pub fn singleton(player: usize) -> Self {
        assert!(player < 32);
        Self(1 << player)
    }

    /// Builds a mask from zero-based player indices.
    pub fn from_players<I: IntoIterator<Item = usize>>(players: I) -> Self {
        players.into_iter().fold(Self::EMPTY, |m, i| m.with(i))
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn contains(self, player: usize) -> bool {
        player < 32 && self.0 >> player & 1 == 1
    }

    pub const fn with(self, player: usize) -> Self {
        Self(self.0 | 1 << player)
    }

    pub const fn without(self, player: usize) -> Self {
        Self(self.0 & !(1 << player))
    }

    /// Set difference `self \ other`.
    pub const fn without_all(self, other: Self) -> Self {
        Self(self.0 & !other.0)
    }

    pub const fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub const fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub const fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in increasing order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        })
    }

    /// Every coalition over `n` players, in increasing bit order.
    pub fn all(n: usize) -> impl Iterator<Item = Self> {
        (0..1u32 << n).map(Self)
    }

    /// `0b` followed by exactly `n` binary digits, most significant player first.
    pub fn binary_key(self, n: usize) -> String {
        format!("0b{:0width$b}", self.0, width = n)
    }

    pub fn parse_binary_key(key: &str) -> Option<Self> {
        let digits = key.strip_prefix("0b")?;
        if digits.is_empty() {
            return None;
        }
        u32::from_str_radix(digits, 2).ok().map(Self)
    }
}

/// Displays members one-based, e.g. `{1,3}`.
impl fmt::Display for CoalitionMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}
