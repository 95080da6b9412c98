//! Deterministic finite automata over dense state and symbol indices.
//!
//! States are `0..state_count` and symbols are `0..alphabet_size`. Human
//! readable names only exist in the text format (see [`crate::format`]).

use std::collections::{BTreeMap, VecDeque};

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("automaton needs at least one state")]
    NoStates,
    #[error("automaton needs a non-empty alphabet")]
    EmptyAlphabet,
    #[error("state {state} out of range (automaton has {count} states)")]
    StateOutOfRange { state: usize, count: usize },
    #[error("symbol {symbol} out of range (alphabet has {size} symbols)")]
    SymbolOutOfRange { symbol: usize, size: usize },
    #[error("transition table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("modulus must be positive")]
    ZeroModulus,
}

/// A complete DFA `(Q, Σ, δ, q0, F)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    state_count: usize,
    alphabet_size: usize,
    // row-major: table[state * alphabet_size + symbol]
    table: Vec<usize>,
    start: usize,
    accepting: Vec<bool>,
}

impl Dfa {
    /// Builds a DFA from a row-major transition table of `state_count * alphabet_size` entries.
    pub fn new(
        state_count: usize,
        alphabet_size: usize,
        table: Vec<usize>,
        start: usize,
        accepting: impl IntoIterator<Item = usize>,
    ) -> Result<Self, AutomataError> {
        if state_count == 0 {
            return Err(AutomataError::NoStates);
        }
        if alphabet_size == 0 {
            return Err(AutomataError::EmptyAlphabet);
        }
        let expected = state_count * alphabet_size;
        if table.len() != expected {
            return Err(AutomataError::TableSize { expected, found: table.len() });
        }
        let in_range = |state: usize| {
            if state < state_count {
                Ok(state)
            } else {
                Err(AutomataError::StateOutOfRange { state, count: state_count })
            }
        };
        for &target in &table {
            in_range(target)?;
        }
        in_range(start)?;
        let mut flags = vec![false; state_count];
        for state in accepting {
            flags[in_range(state)?] = true;
        }
        Ok(Self { state_count, alphabet_size, table, start, accepting: flags })
    }

    /// Builds a DFA by evaluating `delta` on every `(state, symbol)` pair.
    pub fn from_fn(
        state_count: usize,
        alphabet_size: usize,
        start: usize,
        accepting: impl IntoIterator<Item = usize>,
        mut delta: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self, AutomataError> {
        let mut table = Vec::with_capacity(state_count * alphabet_size);
        for state in 0..state_count {
            for symbol in 0..alphabet_size {
                table.push(delta(state, symbol));
            }
        }
        Self::new(state_count, alphabet_size, table, start, accepting)
    }

    /// Two states over `{0, 1}` accepting strings with an even number of ones.
    pub fn parity() -> Self {
        Self::from_fn(2, 2, 0, [0], |q, s| q ^ s).expect("parity automaton is well formed")
    }

    /// Counts `1` symbols modulo `modulus`; `0` is a self-loop and only `q0` accepts.
    pub fn mod_counter(modulus: usize) -> Result<Self, AutomataError> {
        if modulus == 0 {
            return Err(AutomataError::ZeroModulus);
        }
        Self::from_fn(modulus, 2, 0, [0], |q, s| (q + s) % modulus)
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting.get(state).copied().unwrap_or(false)
    }

    /// Accepting states in increasing order.
    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.state_count).filter(|&q| self.accepting[q]).collect()
    }

    /// Stable hex digest of the index-level structure (names are not part of it).
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("{} {} {}", self.state_count, self.alphabet_size, self.start));
        for target in &self.table {
            hasher.update(format!(" {target}"));
        }
        for q in self.accepting_states() {
            hasher.update(format!(" F{q}"));
        }
        hasher.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Raw row-major transition table.
    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn step(&self, state: usize, symbol: usize) -> Result<usize, AutomataError> {
        if state >= self.state_count {
            return Err(AutomataError::StateOutOfRange { state, count: self.state_count });
        }
        self.check_symbol(symbol)?;
        Ok(self.delta(state, symbol))
    }

    #[inline]
    pub(crate) fn delta(&self, state: usize, symbol: usize) -> usize {
        self.table[state * self.alphabet_size + symbol]
    }

    fn check_symbol(&self, symbol: usize) -> Result<(), AutomataError> {
        if symbol < self.alphabet_size {
            Ok(())
        } else {
            Err(AutomataError::SymbolOutOfRange { symbol, size: self.alphabet_size })
        }
    }

    /// Extended transition function from the start state.
    pub fn run(&self, input: &[usize]) -> Result<usize, AutomataError> {
        self.run_from(self.start, input)
    }

    /// Extended transition function from an arbitrary state.
    pub fn run_from(&self, state: usize, input: &[usize]) -> Result<usize, AutomataError> {
        if state >= self.state_count {
            return Err(AutomataError::StateOutOfRange { state, count: self.state_count });
        }
        input.iter().try_fold(state, |q, &s| {
            self.check_symbol(s)?;
            Ok(self.delta(q, s))
        })
    }

    pub fn accepts(&self, input: &[usize]) -> Result<bool, AutomataError> {
        self.run(input).map(|q| self.accepting[q])
    }

    /// States reachable from the start state, in breadth-first discovery order.
    pub fn reachable_states(&self) -> Vec<usize> {
        let mut seen = vec![false; self.state_count];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.start]);
        seen[self.start] = true;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for s in 0..self.alphabet_size {
                let next = self.delta(q, s);
                if !seen[next] {
                    seen[next] = true;
                    queue.push_back(next);
                }
            }
        }
        order
    }

    /// Hopcroft partition refinement over the reachable states.
    ///
    /// States of the result are numbered in breadth-first order from the
    /// start state (symbols visited in increasing order), so equal languages
    /// always produce identical tables.
    pub fn minimize(&self) -> Dfa {
        let classes = self.equivalence_classes();
        self.quotient(&classes)
    }

    /// Maps every reachable state to its Hopcroft block; unreachable states map to `None`.
    fn equivalence_classes(&self) -> Vec<Option<usize>> {
        let k = self.alphabet_size;
        let reachable = self.reachable_states();

        // inverse[s][q] = states p with delta(p, s) == q, restricted to reachable p
        let mut inverse = vec![vec![Vec::new(); self.state_count]; k];
        for &p in &reachable {
            for (s, inv) in inverse.iter_mut().enumerate() {
                inv[self.delta(p, s)].push(p);
            }
        }

        let mut block_of: Vec<Option<usize>> = vec![None; self.state_count];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let (accepting, rejecting): (Vec<usize>, Vec<usize>) =
            reachable.iter().partition(|&&q| self.accepting[q]);
        for block in [accepting, rejecting] {
            if !block.is_empty() {
                for &q in &block {
                    block_of[q] = Some(blocks.len());
                }
                blocks.push(block);
            }
        }

        let mut pending: Vec<Vec<bool>> = Vec::new();
        let mut worklist: Vec<(usize, usize)> = Vec::new();
        for b in 0..blocks.len() {
            // Seeding with every initial block is always correct; Hopcroft's
            // trick of skipping the larger one only saves work.
            pending.push(vec![true; k]);
            worklist.extend((0..k).map(|s| (b, s)));
        }

        let mut marked = vec![false; self.state_count];
        while let Some((splitter, symbol)) = worklist.pop() {
            pending[splitter][symbol] = false;

            let mut preimage = Vec::new();
            for &q in &blocks[splitter] {
                for &p in &inverse[symbol][q] {
                    if !marked[p] {
                        marked[p] = true;
                        preimage.push(p);
                    }
                }
            }

            let mut touched: BTreeMap<usize, usize> = BTreeMap::new();
            for &p in &preimage {
                let b = block_of[p].expect("preimage restricted to reachable states");
                *touched.entry(b).or_default() += 1;
            }

            for (b, hits) in touched {
                if hits == blocks[b].len() {
                    continue;
                }
                let (inside, outside): (Vec<usize>, Vec<usize>) =
                    blocks[b].iter().partition(|&&q| marked[q]);
                let fresh = blocks.len();
                let (kept, moved) = (inside, outside);
                for &q in &moved {
                    block_of[q] = Some(fresh);
                }
                let small_is_fresh = moved.len() <= kept.len();
                blocks[b] = kept;
                blocks.push(moved);
                pending.push(vec![false; k]);
                #[allow(clippy::needless_range_loop)]
                for s in 0..k {
                    let target = if pending[b][s] || small_is_fresh { fresh } else { b };
                    if !pending[target][s] {
                        pending[target][s] = true;
                        worklist.push((target, s));
                    }
                }
            }

            for p in preimage {
                marked[p] = false;
            }
        }

        block_of
    }

    /// Collapses blocks into single states, numbered in BFS order from the start block.
    fn quotient(&self, block_of: &[Option<usize>]) -> Dfa {
        let k = self.alphabet_size;
        let start_block = block_of[self.start].expect("start state is reachable");
        let mut representative: BTreeMap<usize, usize> = BTreeMap::new();
        for (q, b) in block_of.iter().enumerate() {
            if let Some(b) = b {
                representative.entry(*b).or_insert(q);
            }
        }

        let mut renumber: BTreeMap<usize, usize> = BTreeMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::from([start_block]);
        renumber.insert(start_block, 0);
        while let Some(b) = queue.pop_front() {
            order.push(b);
            let rep = representative[&b];
            for s in 0..k {
                let next = block_of[self.delta(rep, s)].expect("successor of reachable is reachable");
                if !renumber.contains_key(&next) {
                    renumber.insert(next, renumber.len());
                    queue.push_back(next);
                }
            }
        }

        let mut table = Vec::with_capacity(order.len() * k);
        let mut accepting = Vec::new();
        for (index, b) in order.iter().enumerate() {
            let rep = representative[b];
            for s in 0..k {
                let next = block_of[self.delta(rep, s)].expect("reachable");
                table.push(renumber[&next]);
            }
            if self.accepting[rep] {
                accepting.push(index);
            }
        }
        Dfa::new(order.len(), k, table, 0, accepting).expect("quotient of a valid DFA is valid")
    }

    /// Groups `strings` by Myhill-Nerode class.
    ///
    /// Class identifiers are state indices of [`Dfa::minimize`], so they are
    /// stable across calls and comparable between partitions of the same DFA.
    pub fn nerode_classes<'a>(
        &self,
        strings: impl IntoIterator<Item = &'a [usize]>,
    ) -> Result<NerodePartition, AutomataError> {
        let minimal = self.minimize();
        let mut class_of = BTreeMap::new();
        for x in strings {
            let class = minimal.run(x)?;
            class_of.insert(x.to_vec(), class);
        }
        Ok(NerodePartition { class_of })
    }
}

/// Strings labelled with the minimal-DFA state they reach.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NerodePartition {
    class_of: BTreeMap<Vec<usize>, usize>,
}

impl NerodePartition {
    pub fn class_of(&self, x: &[usize]) -> Option<usize> {
        self.class_of.get(x).copied()
    }

    /// Number of distinct classes hit by the sampled strings.
    pub fn class_count(&self) -> usize {
        let mut seen: Vec<usize> = self.class_of.values().copied().collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Strings grouped by class, classes and members in increasing order.
    pub fn classes(&self) -> BTreeMap<usize, Vec<Vec<usize>>> {
        let mut groups: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for (x, &c) in &self.class_of {
            groups.entry(c).or_default().push(x.clone());
        }
        groups
    }

    pub fn same_class(&self, x: &[usize], y: &[usize]) -> Option<bool> {
        Some(self.class_of(x)? == self.class_of(y)?)
    }
}

/// All strings of exactly `length` symbols over `alphabet_size` symbols, in lexicographic order.
pub fn strings_of_length(alphabet_size: usize, length: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if alphabet_size == 0 && length > 0 {
        0
    } else {
        (alphabet_size as u128).pow(length as u32)
    };
    (0..total).map(move |mut index| {
        let mut x = vec![0; length];
        for slot in x.iter_mut().rev() {
            *slot = (index % alphabet_size as u128) as usize;
            index /= alphabet_size as u128;
        }
        x
    })
}

/// All strings of length `0..=max_length`, shortest first.
pub fn strings_up_to(alphabet_size: usize, max_length: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=max_length).flat_map(move |t| strings_of_length(alphabet_size, t))
}
