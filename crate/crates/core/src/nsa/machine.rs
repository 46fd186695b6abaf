use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use super::{Letter, StateId};
use crate::memory_tree::{MemorySymbol, StackOp};

/// Names starting with this prefix are produced by constructions and refused
/// in hand-written machine files unless the file says `generated: yes`.
pub const RESERVED_PREFIX: &str = "__";

const EPS: &str = "eps";

/// An edge `src -> dst` labelled `(op, input)`; `input == None` is an ε-move.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Edge {
    pub src: StateId,
    pub dst: StateId,
    pub op: StackOp,
    pub input: Option<Letter>,
}

/// A nested stack automaton as a finite labelled directed graph.
///
/// Immutable once built; construct through [`MachineBuilder`] or
/// [`parse_machine`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Machine {
    states: Vec<String>,
    initial: StateId,
    finals: BTreeSet<StateId>,
    input_alphabet: Vec<Letter>,
    memory_alphabet: Vec<MemorySymbol>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("machine has no states")]
    NoStates,
    #[error("no start state declared")]
    NoInitial,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown input letter `{0}`")]
    UnknownLetter(String),
    #[error("unknown memory symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{0}` is reserved and cannot name a letter or memory symbol")]
    ReservedWord(String),
    #[error("name `{0}` uses the reserved `__` prefix")]
    ReservedName(String),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected `key: value`")]
    MissingColon,
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("malformed edge: {0}")]
    BadEdge(String),
    #[error("start declared twice")]
    DuplicateStart,
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Incremental construction of a [`Machine`] by name.
#[derive(Default, Debug, Clone)]
pub struct MachineBuilder {
    states: Vec<String>,
    index: HashMap<String, StateId>,
    initial: Option<StateId>,
    finals: BTreeSet<StateId>,
    input_alphabet: Vec<Letter>,
    memory_alphabet: Vec<MemorySymbol>,
    edges: Vec<Edge>,
}

impl MachineBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: &str) -> Result<StateId, MachineError> {
        if self.index.contains_key(name) {
            return Err(MachineError::DuplicateState(name.to_string()));
        }
        let id = StateId(self.states.len());
        self.states.push(name.to_string());
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    /// Looks a state up, declaring it if absent.
    pub fn state_or_existing(&mut self, name: &str) -> StateId {
        match self.index.get(name) {
            Some(&id) => id,
            None => self.state(name).expect("checked absent"),
        }
    }

    pub fn lookup(&self, name: &str) -> Result<StateId, MachineError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| MachineError::UnknownState(name.to_string()))
    }

    pub fn initial(&mut self, s: StateId) -> &mut Self {
        self.initial = Some(s);
        self
    }

    pub fn final_state(&mut self, s: StateId) -> &mut Self {
        self.finals.insert(s);
        self
    }

    pub fn letter(&mut self, l: Letter) -> &mut Self {
        if !self.input_alphabet.contains(&l) {
            self.input_alphabet.push(l);
        }
        self
    }

    pub fn symbol(&mut self, x: MemorySymbol) -> &mut Self {
        if !self.memory_alphabet.contains(&x) {
            self.memory_alphabet.push(x);
        }
        self
    }

    pub fn edge(
        &mut self,
        src: StateId,
        dst: StateId,
        op: StackOp,
        input: Option<Letter>,
    ) -> &mut Self {
        self.edges.push(Edge {
            src,
            dst,
            op,
            input,
        });
        self
    }

    pub fn build(self) -> Result<Machine, MachineError> {
        if self.states.is_empty() {
            return Err(MachineError::NoStates);
        }
        let initial = self.initial.ok_or(MachineError::NoInitial)?;
        for l in &self.input_alphabet {
            if l.as_str() == EPS {
                return Err(MachineError::ReservedWord(EPS.into()));
            }
        }
        for x in &self.memory_alphabet {
            if x.as_str() == EPS {
                return Err(MachineError::ReservedWord(EPS.into()));
            }
        }
        let n = self.states.len();
        for e in &self.edges {
            for s in [e.src, e.dst] {
                if s.0 >= n {
                    return Err(MachineError::UnknownState(format!("#{}", s.0)));
                }
            }
            if let Some(x) = e.op.symbol() {
                if !self.memory_alphabet.contains(x) {
                    return Err(MachineError::UnknownSymbol(x.to_string()));
                }
            }
            if let Some(a) = &e.input {
                if !self.input_alphabet.contains(a) {
                    return Err(MachineError::UnknownLetter(a.to_string()));
                }
            }
        }
        let mut out = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.src.0].push(i);
        }
        Ok(Machine {
            states: self.states,
            initial,
            finals: self.finals,
            input_alphabet: self.input_alphabet,
            memory_alphabet: self.memory_alphabet,
            edges: self.edges,
            out,
        })
    }
}

impl Machine {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name).map(StateId)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn finals(&self) -> &BTreeSet<StateId> {
        &self.finals
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals.contains(&s)
    }

    pub fn input_alphabet(&self) -> &[Letter] {
        &self.input_alphabet
    }

    pub fn memory_alphabet(&self) -> &[MemorySymbol] {
        &self.memory_alphabet
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    /// Indices of the outedges of `s`, in declaration order.
    pub fn out_edges(&self, s: StateId) -> &[usize] {
        &self.out[s.0]
    }

    pub fn has_letter(&self, a: &Letter) -> bool {
        self.input_alphabet.contains(a)
    }

    fn uses_reserved_names(&self) -> bool {
        self.states.iter().any(|s| s.starts_with(RESERVED_PREFIX))
            || self
                .input_alphabet
                .iter()
                .any(|l| l.as_str().starts_with(RESERVED_PREFIX))
            || self
                .memory_alphabet
                .iter()
                .any(|x| x.as_str().starts_with(RESERVED_PREFIX))
    }

    /// A builder pre-loaded with this machine's states, alphabets and edges.
    pub fn to_builder(&self) -> MachineBuilder {
        let mut b = MachineBuilder::new();
        for s in &self.states {
            b.state(s).expect("machine states are unique");
        }
        b.initial(self.initial);
        for &f in &self.finals {
            b.final_state(f);
        }
        for l in &self.input_alphabet {
            b.letter(l.clone());
        }
        for x in &self.memory_alphabet {
            b.symbol(x.clone());
        }
        for e in &self.edges {
            b.edge(e.src, e.dst, e.op.clone(), e.input.clone());
        }
        b
    }

    /// Serializes in the machine file format; `parse_machine` reads it back.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if self.uses_reserved_names() {
            s.push_str("generated: yes\n");
        }
        s.push_str(&format!("states: {}\n", self.states.join(" ")));
        s.push_str(&format!("start: {}\n", self.state_name(self.initial)));
        let finals: Vec<&str> = self.finals.iter().map(|&f| self.state_name(f)).collect();
        s.push_str(&format!("final: {}\n", finals.join(" ")).replace(": \n", ":\n"));
        let input: Vec<&str> = self.input_alphabet.iter().map(|l| l.as_str()).collect();
        s.push_str(&format!("input: {}\n", input.join(" ")).replace(": \n", ":\n"));
        let memory: Vec<&str> = self.memory_alphabet.iter().map(|x| x.as_str()).collect();
        s.push_str(&format!("memory: {}\n", memory.join(" ")).replace(": \n", ":\n"));
        for e in &self.edges {
            let input = e.input.as_ref().map(|l| l.as_str()).unwrap_or(EPS);
            s.push_str(&format!(
                "edge: {} {} {} {}\n",
                self.state_name(e.src),
                self.state_name(e.dst),
                e.op,
                input
            ));
        }
        s
    }
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn check_name(name: &str, allow_reserved: bool) -> Result<(), MachineError> {
    if !allow_reserved && name.starts_with(RESERVED_PREFIX) {
        return Err(MachineError::ReservedName(name.to_string()));
    }
    Ok(())
}

/// Parses the line-oriented machine file format.
///
/// ```text
/// states: 1 2
/// start: 1
/// final: 1
/// input: a
/// memory: x
/// edge: 1 2 push x a     # src dst op [symbol] input
/// edge: 2 1 pop x eps
/// ```
pub fn parse_machine(text: &str) -> Result<Machine, ParseError> {
    let allow_reserved = text.lines().any(|l| {
        let l = l.split('#').next().unwrap_or("").trim();
        l.strip_prefix("generated:").map(str::trim) == Some("yes")
    });
    let mut b = MachineBuilder::new();
    let mut start: Option<(usize, String)> = None;
    let mut finals: Vec<(usize, String)> = Vec::new();
    let mut edges: Vec<(usize, Vec<String>)> = Vec::new();
    let err = |line: usize, kind: ParseErrorKind| ParseError { line, kind };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content
            .split_once(':')
            .ok_or_else(|| err(line, ParseErrorKind::MissingColon))?;
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        match key.trim() {
            "states" => {
                for t in tokens {
                    check_name(t, allow_reserved).map_err(|e| err(line, e.into()))?;
                    b.state(t).map_err(|e| err(line, e.into()))?;
                }
            }
            "start" => {
                if start.is_some() || tokens.len() != 1 {
                    return Err(err(line, ParseErrorKind::DuplicateStart));
                }
                start = Some((line, tokens[0].to_string()));
            }
            "final" => finals.extend(tokens.iter().map(|t| (line, t.to_string()))),
            "input" => {
                for t in tokens {
                    check_name(t, allow_reserved).map_err(|e| err(line, e.into()))?;
                    if t == EPS {
                        return Err(err(line, MachineError::ReservedWord(EPS.into()).into()));
                    }
                    b.letter(Letter::new(t));
                }
            }
            "memory" => {
                for t in tokens {
                    check_name(t, allow_reserved).map_err(|e| err(line, e.into()))?;
                    if t == EPS {
                        return Err(err(line, MachineError::ReservedWord(EPS.into()).into()));
                    }
                    b.symbol(MemorySymbol::new(t));
                }
            }
            "edge" => edges.push((line, tokens.iter().map(|t| t.to_string()).collect())),
            "edges" | "generated" => {}
            other => return Err(err(line, ParseErrorKind::UnknownKey(other.to_string()))),
        }
    }

    let (start_line, start_name) = start.ok_or_else(|| err(0, MachineError::NoInitial.into()))?;
    let s = b.lookup(&start_name).map_err(|e| err(start_line, e.into()))?;
    b.initial(s);
    for (line, name) in finals {
        let f = b.lookup(&name).map_err(|e| err(line, e.into()))?;
        b.final_state(f);
    }
    for (line, toks) in edges {
        let (src, dst, op, input) = parse_edge(&b, &toks).map_err(|k| err(line, k))?;
        b.edge(src, dst, op, input);
    }
    // Re-validate per edge so errors carry the offending line.
    let machine = b.build().map_err(|e| {
        let line = locate(text, &e);
        err(line, e.into())
    })?;
    Ok(machine)
}

fn locate(text: &str, e: &MachineError) -> usize {
    let needle = match e {
        MachineError::UnknownSymbol(s) | MachineError::UnknownLetter(s) => s.as_str(),
        _ => return 0,
    };
    text.lines()
        .position(|l| {
            let l = l.split('#').next().unwrap_or("");
            l.trim_start().starts_with("edge") && l.split_whitespace().any(|t| t == needle)
        })
        .map(|i| i + 1)
        .unwrap_or(0)
}

type ParsedEdge = (StateId, StateId, StackOp, Option<Letter>);

fn parse_edge(b: &MachineBuilder, toks: &[String]) -> Result<ParsedEdge, ParseErrorKind> {
    let bad = |m: &str| ParseErrorKind::BadEdge(m.to_string());
    if toks.len() < 4 {
        return Err(bad("expected `src dst op [symbol] input`"));
    }
    let src = b.lookup(&toks[0])?;
    let dst = b.lookup(&toks[1])?;
    let (op, rest) = match toks[2].as_str() {
        "stay" => (StackOp::Stay, &toks[3..]),
        kind @ ("push" | "pop" | "down" | "up") => {
            if toks.len() < 5 {
                return Err(bad(&format!("`{kind}` needs a memory symbol")));
            }
            let sym = toks[3].as_str();
            let op = match (kind, sym) {
                ("up", EPS) => StackOp::Up(None),
                (_, EPS) => return Err(bad(&format!("`{kind} eps` is not an operation"))),
                ("push", x) => StackOp::Push(x.into()),
                ("pop", x) => StackOp::Pop(x.into()),
                ("down", x) => StackOp::Down(x.into()),
                (_, x) => StackOp::Up(Some(x.into())),
            };
            (op, &toks[4..])
        }
        other => return Err(bad(&format!("unknown operation `{other}`"))),
    };
    if rest.len() != 1 {
        return Err(bad("expected exactly one input field"));
    }
    let input = match rest[0].as_str() {
        EPS => None,
        a => Some(Letter::new(a)),
    };
    Ok((src, dst, op, input))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fig2_fixture_shape() {
        let m = fixtures::fig2();
        assert_eq!(m.state_count(), 4);
        assert_eq!(m.edges().len(), 8);
        assert_eq!(m.state_name(m.initial()), "1");
        assert_eq!(m.finals().len(), 1);
        assert!(m.is_final(m.initial()));
    }

    #[test]
    fn no_edges_is_valid() {
        let m = parse_machine("states: 1\nstart: 1\nfinal: 1\nedges:\n").unwrap();
        assert!(m.edges().is_empty());
    }

    #[test]
    fn undeclared_memory_symbol_is_named() {
        let text = "states: 1\nstart: 1\nfinal: 1\ninput: a\nmemory: x\nedge: 1 1 push q a\n";
        let e = parse_machine(text).unwrap_err();
        assert_eq!(e.line, 6);
        assert_eq!(
            e.kind,
            ParseErrorKind::Machine(MachineError::UnknownSymbol("q".into()))
        );
        assert!(e.to_string().contains("`q`"));
    }

    #[test]
    fn duplicate_state_rejected() {
        let e = parse_machine("states: 1 1\nstart: 1\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert_eq!(
            e.kind,
            ParseErrorKind::Machine(MachineError::DuplicateState("1".into()))
        );
    }

    #[test]
    fn unknown_state_and_syntax_errors() {
        let e = parse_machine("states: 1\nstart: 2\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_machine("states 1\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingColon);
        let e = parse_machine("states: 1\nstart: 1\nedge: 1 1 jump a\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::BadEdge(_)));
        assert_eq!(e.line, 3);
    }

    #[test]
    fn reserved_names_need_generated_marker() {
        let text = "states: __s\nstart: __s\n";
        assert!(matches!(
            parse_machine(text).unwrap_err().kind,
            ParseErrorKind::Machine(MachineError::ReservedName(_))
        ));
        let ok = format!("generated: yes\n{text}");
        assert!(parse_machine(&ok).is_ok());
    }

    #[test]
    fn eps_cannot_be_a_letter() {
        let e = parse_machine("states: 1\nstart: 1\ninput: eps\n").unwrap_err();
        assert!(matches!(
            e.kind,
            ParseErrorKind::Machine(MachineError::ReservedWord(_))
        ));
    }

    #[test]
    fn print_parse_round_trip_on_fixtures() {
        for m in fixtures::all() {
            let back = parse_machine(&m.to_text()).unwrap();
            assert_eq!(back, m);
        }
    }
}
