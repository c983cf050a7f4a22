//! Size guards for the enumeration-heavy operations.
//!
//! Everything in this crate is exact and exhaustive, which means worst-case
//! exponential. Guards put a hard, configurable cap on the quantities that
//! blow up so that a run either finishes or aborts with the name of the
//! guard that fired.

use crate::error::Error;

/// Which cap fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardKind {
    /// Number of morphisms in a finite category.
    Morphisms,
    /// Total number of elements in a presheaf.
    Elements,
    /// Nodes visited by a backtracking search.
    SearchNodes,
    /// Structures (sections, fillers, ...) collected by an enumeration.
    Structures,
}

impl GuardKind {
    pub fn name(self) -> &'static str {
        match self {
            GuardKind::Morphisms => "max-morphisms",
            GuardKind::Elements => "max-elements",
            GuardKind::SearchNodes => "max-search-nodes",
            GuardKind::Structures => "max-structures",
        }
    }
}

/// Configurable hard caps. `Default` gives the documented desk-scale values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeGuards {
    pub max_morphisms: usize,
    pub max_elements: usize,
    pub max_search_nodes: usize,
    pub max_structures: usize,
}

impl Default for SizeGuards {
    fn default() -> Self {
        SizeGuards {
            max_morphisms: 10_000,
            max_elements: 200_000,
            max_search_nodes: 50_000_000,
            max_structures: 100_000,
        }
    }
}

impl SizeGuards {
    pub fn check_morphisms(&self, n: usize) -> Result<(), Error> {
        if n > self.max_morphisms {
            Err(Error::SizeGuardExceeded { guard: GuardKind::Morphisms, limit: self.max_morphisms, needed: n })
        } else {
            Ok(())
        }
    }

    pub fn check_elements(&self, n: usize) -> Result<(), Error> {
        if n > self.max_elements {
            Err(Error::SizeGuardExceeded { guard: GuardKind::Elements, limit: self.max_elements, needed: n })
        } else {
            Ok(())
        }
    }

    /// Budget object for a single backtracking search.
    pub fn search_budget(&self) -> SearchBudget {
        SearchBudget { remaining: self.max_search_nodes, limit: self.max_search_nodes }
    }

    pub fn check_structures(&self, n: usize) -> Result<(), Error> {
        if n > self.max_structures {
            Err(Error::SizeGuardExceeded { guard: GuardKind::Structures, limit: self.max_structures, needed: n })
        } else {
            Ok(())
        }
    }
}

/// Decrementing node counter handed to searches.
#[derive(Debug, Clone)]
pub struct SearchBudget {
    remaining: usize,
    limit: usize,
}

impl SearchBudget {
    pub fn spend(&mut self) -> Result<(), Error> {
        if self.remaining == 0 {
            Err(Error::SizeGuardExceeded { guard: GuardKind::SearchNodes, limit: self.limit, needed: self.limit + 1 })
        } else {
            self.remaining -= 1;
            Ok(())
        }
    }
}
