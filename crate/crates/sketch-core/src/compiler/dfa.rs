use super::regex::{ByteSet, RegexAst};
use super::CompilerError;
use rand::Rng;
use std::collections::HashMap;

/// Default ceiling on DFA state count. Enum-heavy or deeply nested schemas
/// can explode during subset construction; failing loudly beats hanging.
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

const REJECT: u32 = u32::MAX;

/// Deterministic, trimmed automaton over bytes. Transitions are stored per
/// byte-equivalence class (bytes the regex never distinguishes share a
/// column), which keeps the table small without changing the language.
#[derive(Debug, Clone)]
pub struct Dfa {
    start: u32,
    classes: [u16; 256],
    num_classes: usize,
    /// `table[state * num_classes + class]`, `u32::MAX` = reject.
    table: Vec<u32>,
    accepting: Vec<bool>,
    /// Representative bytes per class, for sampling and enumeration.
    class_bytes: Vec<Vec<u8>>,
    /// Shortest number of bytes from each state to an accepting state.
    distance: Vec<u32>,
}

/// Compiles with the default state cap.
pub fn compile_regex(ast: &RegexAst) -> Result<Dfa, CompilerError> {
    compile_regex_capped(ast, DEFAULT_STATE_CAP)
}

/// Compiles `ast` into a [`Dfa`], refusing to build more than `cap` states.
pub fn compile_regex_capped(ast: &RegexAst, cap: usize) -> Result<Dfa, CompilerError> {
    let nfa = Nfa::build(ast);
    let (classes, class_bytes) = nfa.byte_classes();
    let num_classes = class_bytes.len();

    // subset construction over the class alphabet
    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut table: Vec<u32> = Vec::new();
    let mut accepting: Vec<bool> = Vec::new();
    let mut worklist: Vec<Vec<u32>> = Vec::new();

    let start_set = nfa.closure(vec![nfa.start]);
    ids.insert(start_set.clone(), 0);
    table.resize(num_classes, REJECT);
    accepting.push(start_set.contains(&nfa.accept));
    worklist.push(start_set);

    let mut next = 0usize;
    while next < worklist.len() {
        let current = worklist[next].clone();
        let current_id = next as u32;
        next += 1;
        for class in 0..num_classes {
            let rep = class_bytes[class][0];
            let mut moved: Vec<u32> = Vec::new();
            for &s in &current {
                for (set, dest) in &nfa.states[s as usize].trans {
                    if set.contains(rep) {
                        moved.push(*dest);
                    }
                }
            }
            if moved.is_empty() {
                continue;
            }
            let closed = nfa.closure(moved);
            let dest_id = match ids.get(&closed) {
                Some(&id) => id,
                None => {
                    let id = worklist.len() as u32;
                    if worklist.len() + 1 > cap {
                        return Err(CompilerError::StateBlowup { cap });
                    }
                    ids.insert(closed.clone(), id);
                    table.resize((worklist.len() + 1) * num_classes, REJECT);
                    accepting.push(closed.contains(&nfa.accept));
                    worklist.push(closed);
                    id
                }
            };
            table[current_id as usize * num_classes + class] = dest_id;
        }
    }

    trim(table, accepting, classes, class_bytes, num_classes)
}

/// Drops states that cannot reach acceptance and computes distances.
fn trim(
    table: Vec<u32>,
    accepting: Vec<bool>,
    classes: [u16; 256],
    class_bytes: Vec<Vec<u8>>,
    num_classes: usize,
) -> Result<Dfa, CompilerError> {
    let n = accepting.len();
    let mut reverse: Vec<Vec<u32>> = vec![Vec::new(); n];
    for state in 0..n {
        for class in 0..num_classes {
            let dest = table[state * num_classes + class];
            if dest != REJECT {
                reverse[dest as usize].push(state as u32);
            }
        }
    }
    // BFS from accepting states over reversed edges; BFS depth = distance
    let mut distance = vec![u32::MAX; n];
    let mut queue: Vec<u32> = Vec::new();
    for (s, &acc) in accepting.iter().enumerate() {
        if acc {
            distance[s] = 0;
            queue.push(s as u32);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let s = queue[head] as usize;
        head += 1;
        for &p in &reverse[s] {
            if distance[p as usize] == u32::MAX {
                distance[p as usize] = distance[s] + 1;
                queue.push(p);
            }
        }
    }
    if distance[0] == u32::MAX {
        return Err(CompilerError::EmptyLanguage(
            "automaton accepts no strings".to_string(),
        ));
    }

    let mut remap = vec![REJECT; n];
    let mut kept = 0u32;
    for s in 0..n {
        if distance[s] != u32::MAX {
            remap[s] = kept;
            kept += 1;
        }
    }
    let mut new_table = vec![REJECT; kept as usize * num_classes];
    let mut new_accepting = vec![false; kept as usize];
    let mut new_distance = vec![0u32; kept as usize];
    for s in 0..n {
        if remap[s] == REJECT {
            continue;
        }
        let ns = remap[s] as usize;
        new_accepting[ns] = accepting[s];
        new_distance[ns] = distance[s];
        for class in 0..num_classes {
            let dest = table[s * num_classes + class];
            if dest != REJECT && remap[dest as usize] != REJECT {
                new_table[ns * num_classes + class] = remap[dest as usize];
            }
        }
    }

    Ok(Dfa {
        start: 0,
        classes,
        num_classes,
        table: new_table,
        accepting: new_accepting,
        class_bytes,
        distance: new_distance,
    })
}

impl Dfa {
    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn is_accepting(&self, state: u32) -> bool {
        self.accepting[state as usize]
    }

    /// One byte of input; `None` = reject.
    pub fn step(&self, state: u32, byte: u8) -> Option<u32> {
        let class = self.classes[byte as usize] as usize;
        match self.table[state as usize * self.num_classes + class] {
            REJECT => None,
            dest => Some(dest),
        }
    }

    /// Runs `bytes` from a given state; `None` if any byte rejects.
    pub fn walk(&self, state: u32, bytes: &[u8]) -> Option<u32> {
        bytes.iter().try_fold(state, |s, &b| self.step(s, b))
    }

    pub fn accepts(&self, bytes: &[u8]) -> bool {
        self.walk(self.start, bytes)
            .is_some_and(|s| self.is_accepting(s))
    }

    /// Shortest number of additional bytes needed to reach acceptance.
    /// Zero exactly at accepting states; finite everywhere (trimmed).
    pub fn distance_to_accept(&self, state: u32) -> u32 {
        self.distance[state as usize]
    }

    /// Outgoing transitions, one per live byte class:
    /// (example byte, all bytes in the class, destination).
    pub fn transitions(&self, state: u32) -> impl Iterator<Item = (&[u8], u32)> + '_ {
        (0..self.num_classes).filter_map(move |class| {
            match self.table[state as usize * self.num_classes + class] {
                REJECT => None,
                dest => Some((self.class_bytes[class].as_slice(), dest)),
            }
        })
    }

    /// Random member of the language. Walks uniformly over available
    /// transitions until `target_len` is reached or an accepting state
    /// offers a stop; beyond the target it steers along shortest paths to
    /// acceptance, so the walk always terminates.
    pub fn sample_accepted<R: Rng + ?Sized>(&self, rng: &mut R, target_len: usize) -> Vec<u8> {
        let mut out = Vec::new();
        let mut state = self.start;
        loop {
            if self.is_accepting(state) && (out.len() >= target_len || rng.random_bool(0.3)) {
                return out;
            }
            let steer = out.len() >= target_len.saturating_mul(2) + 16;
            let options: Vec<(&[u8], u32)> = if steer {
                if self.is_accepting(state) {
                    return out;
                }
                let best = self
                    .transitions(state)
                    .map(|(_, dest)| self.distance[dest as usize])
                    .min()
                    .expect("trimmed automaton has no dead ends");
                self.transitions(state)
                    .filter(|(_, dest)| self.distance[*dest as usize] == best)
                    .collect()
            } else {
                self.transitions(state).collect()
            };
            if options.is_empty() {
                // only accepting states lack successors in a trimmed automaton
                return out;
            }
            let (bytes, dest) = options[rng.random_range(0..options.len())];
            out.push(bytes[rng.random_range(0..bytes.len())]);
            state = dest;
        }
    }

    /// Every accepted string of length ≤ `max_len`, up to `limit` results,
    /// in shortest-first then byte-lexicographic order. Exponential in
    /// general — intended for small finite languages and tests.
    pub fn accepted_strings(&self, max_len: usize, limit: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut frontier: Vec<(u32, Vec<u8>)> = vec![(self.start, Vec::new())];
        for _ in 0..=max_len {
            let mut next = Vec::new();
            for (state, prefix) in &frontier {
                if self.is_accepting(*state) {
                    out.push(prefix.clone());
                    if out.len() >= limit {
                        return out;
                    }
                }
                if prefix.len() < max_len {
                    let mut steps: Vec<(u8, u32)> = self
                        .transitions(*state)
                        .flat_map(|(bytes, dest)| bytes.iter().map(move |&b| (b, dest)))
                        .collect();
                    steps.sort_unstable();
                    for (b, dest) in steps {
                        let mut ext = prefix.clone();
                        ext.push(b);
                        next.push((dest, ext));
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        out
    }
}

/// Thompson construction state machine.
struct Nfa {
    states: Vec<NfaState>,
    start: u32,
    accept: u32,
}

#[derive(Default)]
struct NfaState {
    eps: Vec<u32>,
    trans: Vec<(ByteSet, u32)>,
}

impl Nfa {
    fn build(ast: &RegexAst) -> Nfa {
        let mut nfa = Nfa {
            states: Vec::new(),
            start: 0,
            accept: 0,
        };
        let (start, accept) = nfa.fragment(ast);
        nfa.start = start;
        nfa.accept = accept;
        nfa
    }

    fn add_state(&mut self) -> u32 {
        self.states.push(NfaState::default());
        (self.states.len() - 1) as u32
    }

    fn eps(&mut self, from: u32, to: u32) {
        self.states[from as usize].eps.push(to);
    }

    /// Returns (entry, exit) of a fragment recognizing `ast`.
    fn fragment(&mut self, ast: &RegexAst) -> (u32, u32) {
        match ast {
            RegexAst::Empty => {
                let s = self.add_state();
                (s, s)
            }
            RegexAst::Literal(bytes) => {
                let entry = self.add_state();
                let mut at = entry;
                for &b in bytes {
                    let next = self.add_state();
                    self.states[at as usize].trans.push((ByteSet::single(b), next));
                    at = next;
                }
                (entry, at)
            }
            RegexAst::Class(set) => {
                let entry = self.add_state();
                let exit = self.add_state();
                self.states[entry as usize].trans.push((*set, exit));
                (entry, exit)
            }
            RegexAst::Concat(parts) => {
                let entry = self.add_state();
                let mut at = entry;
                for part in parts {
                    let (s, e) = self.fragment(part);
                    self.eps(at, s);
                    at = e;
                }
                (entry, at)
            }
            RegexAst::Alt(parts) => {
                let entry = self.add_state();
                let exit = self.add_state();
                for part in parts {
                    let (s, e) = self.fragment(part);
                    self.eps(entry, s);
                    self.eps(e, exit);
                }
                (entry, exit)
            }
            RegexAst::Repeat { node, min, max } => {
                let entry = self.add_state();
                let mut at = entry;
                for _ in 0..*min {
                    let (s, e) = self.fragment(node);
                    self.eps(at, s);
                    at = e;
                }
                match max {
                    Some(max) => {
                        // (min..max] optional copies, each skippable to exit
                        let exit = self.add_state();
                        self.eps(at, exit);
                        for _ in *min..*max {
                            let (s, e) = self.fragment(node);
                            self.eps(at, s);
                            self.eps(e, exit);
                            at = e;
                        }
                        (entry, exit)
                    }
                    None => {
                        // star: loop through the body any number of times
                        let hub = self.add_state();
                        self.eps(at, hub);
                        let (s, e) = self.fragment(node);
                        self.eps(hub, s);
                        self.eps(e, hub);
                        (entry, hub)
                    }
                }
            }
        }
    }

    /// ε-closure; result sorted and deduplicated so it can key a map.
    fn closure(&self, mut set: Vec<u32>) -> Vec<u32> {
        let mut seen = vec![false; self.states.len()];
        let mut stack: Vec<u32> = Vec::new();
        for &s in &set {
            if !seen[s as usize] {
                seen[s as usize] = true;
                stack.push(s);
            }
        }
        set.clear();
        while let Some(s) = stack.pop() {
            set.push(s);
            for &t in &self.states[s as usize].eps {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        set.sort_unstable();
        set
    }

    /// Partitions bytes so that two bytes in one class are interchangeable
    /// for every transition set in the machine.
    fn byte_classes(&self) -> ([u16; 256], Vec<Vec<u8>>) {
        let mut sets: Vec<ByteSet> = Vec::new();
        for state in &self.states {
            for (set, _) in &state.trans {
                if !sets.contains(set) {
                    sets.push(*set);
                }
            }
        }
        let mut signature_ids: HashMap<Vec<u64>, u16> = HashMap::new();
        let mut classes = [0u16; 256];
        let mut class_bytes: Vec<Vec<u8>> = Vec::new();
        let words = sets.len().div_ceil(64);
        for b in 0..=255u8 {
            let mut sig = vec![0u64; words];
            for (i, set) in sets.iter().enumerate() {
                if set.contains(b) {
                    sig[i / 64] |= 1 << (i % 64);
                }
            }
            let next_id = signature_ids.len() as u16;
            let id = *signature_ids.entry(sig).or_insert(next_id);
            classes[b as usize] = id;
            if id as usize == class_bytes.len() {
                class_bytes.push(vec![b]);
            } else {
                class_bytes[id as usize].push(b);
            }
        }
        (classes, class_bytes)
    }
}
