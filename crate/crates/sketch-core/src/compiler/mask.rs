use super::dfa::Dfa;
use super::vocab::Vocabulary;
use rayon::prelude::*;
use thiserror::Error;

/// Sentinel state returned by [`TokenMaskIndex::advance`] after EOS:
/// generation is finished and nothing further is allowed.
pub const TERMINAL_STATE: u32 = u32::MAX;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MaskError {
    #[error("token {token} is not allowed in state {state}")]
    IllegalToken { state: u32, token: u32 },
}

/// The join of a [`Dfa`] with a [`Vocabulary`]: for every automaton state,
/// the set of tokens whose full byte expansion the automaton survives, the
/// state each allowed token leads to, and whether EOS may be emitted
/// (exactly at accepting states).
///
/// Non-EOS tokens that expand to zero bytes are never allowed: they would
/// let a decoder loop without making progress.
#[derive(Debug, Clone)]
pub struct TokenMaskIndex {
    num_tokens: usize,
    eos_id: u32,
    start: u32,
    words_per_state: usize,
    /// Bitset per state over token ids; the EOS bit mirrors `accepting`.
    allowed: Vec<u64>,
    /// Per state: (token id, destination), sorted by token id. EOS omitted.
    dests: Vec<Vec<(u32, u32)>>,
    accepting: Vec<bool>,
}

/// Builds the mask index. States are independent, so the scan is
/// parallelized; the result is identical regardless of worker count.
pub fn index_vocabulary(dfa: &Dfa, vocab: &Vocabulary) -> TokenMaskIndex {
    let num_tokens = vocab.size();
    let eos_id = vocab.eos_id();
    let words_per_state = num_tokens.div_ceil(64);
    let n = dfa.num_states();

    let per_state: Vec<(Vec<u64>, Vec<(u32, u32)>)> = (0..n as u32)
        .into_par_iter()
        .map(|state| {
            let mut bits = vec![0u64; words_per_state];
            let mut dests = Vec::new();
            for token in 0..num_tokens as u32 {
                if token == eos_id {
                    if dfa.is_accepting(state) {
                        bits[(token / 64) as usize] |= 1 << (token % 64);
                    }
                    continue;
                }
                let bytes = vocab.bytes(token);
                if bytes.is_empty() {
                    continue;
                }
                if let Some(dest) = dfa.walk(state, bytes) {
                    bits[(token / 64) as usize] |= 1 << (token % 64);
                    dests.push((token, dest));
                }
            }
            (bits, dests)
        })
        .collect();

    let mut allowed = Vec::with_capacity(n * words_per_state);
    let mut dests = Vec::with_capacity(n);
    for (bits, d) in per_state {
        allowed.extend_from_slice(&bits);
        dests.push(d);
    }
    TokenMaskIndex {
        num_tokens,
        eos_id,
        start: dfa.start(),
        words_per_state,
        allowed,
        dests,
        accepting: (0..n as u32).map(|s| dfa.is_accepting(s)).collect(),
    }
}

impl TokenMaskIndex {
    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.num_tokens
    }

    pub fn eos_id(&self) -> u32 {
        self.eos_id
    }

    /// The automaton's start state (mask states are DFA states).
    pub fn start(&self) -> u32 {
        self.start
    }

    /// Bitset of allowed token ids at `state`, EOS bit included.
    pub fn allowed_bits(&self, state: u32) -> &[u64] {
        let s = state as usize * self.words_per_state;
        &self.allowed[s..s + self.words_per_state]
    }

    pub fn is_allowed(&self, state: u32, token: u32) -> bool {
        if state == TERMINAL_STATE || token as usize >= self.num_tokens {
            return false;
        }
        self.allowed_bits(state)[(token / 64) as usize] >> (token % 64) & 1 == 1
    }

    /// EOS is allowed exactly at accepting states.
    pub fn allows_eos(&self, state: u32) -> bool {
        state != TERMINAL_STATE && self.accepting[state as usize]
    }

    pub fn allowed_tokens(&self, state: u32) -> impl Iterator<Item = u32> + '_ {
        let words = self.allowed_bits(state);
        (0..self.num_tokens as u32).filter(move |&t| words[(t / 64) as usize] >> (t % 64) & 1 == 1)
    }

    pub fn count_allowed(&self, state: u32) -> usize {
        self.allowed_bits(state)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    /// Takes one allowed token from `state`. EOS moves to
    /// [`TERMINAL_STATE`]; any disallowed token is an error.
    pub fn advance(&self, state: u32, token: u32) -> Result<u32, MaskError> {
        if state == TERMINAL_STATE {
            return Err(MaskError::IllegalToken { state, token });
        }
        if token == self.eos_id {
            return if self.allows_eos(state) {
                Ok(TERMINAL_STATE)
            } else {
                Err(MaskError::IllegalToken { state, token })
            };
        }
        let dests = &self.dests[state as usize];
        match dests.binary_search_by_key(&token, |&(t, _)| t) {
            Ok(i) => Ok(dests[i].1),
            Err(_) => Err(MaskError::IllegalToken { state, token }),
        }
    }
}
