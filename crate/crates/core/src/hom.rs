//! Inverse images of machine languages under non-erasing homomorphisms.
//!
//! A homomorphism factors into single-letter expansions `a ↦ a₁a₂` followed
//! by one letter-to-letter map; each factor has a direct machine
//! construction that keeps the machine deterministic with limited erasing.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::memory_tree::{MemorySymbol, StackOp};
use crate::nsa::{Letter, Machine, MachineBuilder, MachineError, StateId, Word, RESERVED_PREFIX};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum HomError {
    #[error("letter `{0}` maps to the empty word")]
    Erasing(String),
    #[error("letter `{0}` is mapped twice")]
    DuplicateLetter(String),
    #[error("image letter `{0}` is not in the machine's input alphabet")]
    ImageOutsideAlphabet(String),
    #[error("not a letter-to-letter map: `{0}` has an image of length {1}")]
    NotLetterMap(String, usize),
    #[error("expansion letters must be two distinct input letters; got `{0}`, `{1}`")]
    BadExpansionPair(String, String),
    #[error("new letter `{0}` already belongs to the remaining alphabet")]
    LetterClash(String),
    #[error("memory symbol `{0}` is already used by the machine")]
    SymbolClash(String),
    #[error("name `{0}` uses the reserved `__` prefix")]
    ReservedName(String),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct HomParseError {
    pub line: usize,
    pub kind: HomParseErrorKind,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum HomParseErrorKind {
    #[error("expected `map: letter -> letters`")]
    Syntax,
    #[error(transparent)]
    Hom(#[from] HomError),
}

/// A monoid homomorphism `Δ* → Σ*` given by letter images.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Homomorphism {
    source: Vec<Letter>,
    target: Vec<Letter>,
    images: BTreeMap<Letter, Word>,
}

impl Homomorphism {
    /// Source alphabet in the given order; target alphabet is every letter
    /// occurring in an image, in order of first appearance.
    pub fn new(images: Vec<(Letter, Word)>) -> Result<Self, HomError> {
        let mut source = Vec::new();
        let mut target: Vec<Letter> = Vec::new();
        let mut map = BTreeMap::new();
        for (a, w) in images {
            if w.is_empty() {
                return Err(HomError::Erasing(a.to_string()));
            }
            for l in &w {
                if !target.contains(l) {
                    target.push(l.clone());
                }
            }
            if map.insert(a.clone(), w).is_some() {
                return Err(HomError::DuplicateLetter(a.to_string()));
            }
            source.push(a);
        }
        Ok(Homomorphism {
            source,
            target,
            images: map,
        })
    }

    pub fn identity(alphabet: &[Letter]) -> Self {
        Homomorphism::new(alphabet.iter().map(|a| (a.clone(), vec![a.clone()])).collect())
            .expect("identity is non-erasing")
    }

    pub fn source(&self) -> &[Letter] {
        &self.source
    }

    pub fn target(&self) -> &[Letter] {
        &self.target
    }

    pub fn image(&self, a: &Letter) -> Option<&Word> {
        self.images.get(a)
    }

    /// Image of a word; `None` if it contains a letter outside the source.
    pub fn apply(&self, w: &[Letter]) -> Option<Word> {
        let mut out = Vec::new();
        for a in w {
            out.extend(self.images.get(a)?.iter().cloned());
        }
        Some(out)
    }

    pub fn is_letter_map(&self) -> bool {
        self.images.values().all(|w| w.len() == 1)
    }

    fn check_target(&self, m: &Machine) -> Result<(), HomError> {
        for l in &self.target {
            if !m.has_letter(l) {
                return Err(HomError::ImageOutsideAlphabet(l.to_string()));
            }
        }
        Ok(())
    }
}

/// Parses `map: a -> b c d` lines (`#` comments allowed).
pub fn parse_hom(text: &str) -> Result<Homomorphism, HomParseError> {
    let mut images = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |kind| HomParseError { line, kind };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let rest = content
            .strip_prefix("map:")
            .ok_or_else(|| err(HomParseErrorKind::Syntax))?;
        let (lhs, rhs) = rest
            .split_once("->")
            .ok_or_else(|| err(HomParseErrorKind::Syntax))?;
        let lhs: Vec<&str> = lhs.split_whitespace().collect();
        if lhs.len() != 1 {
            return Err(err(HomParseErrorKind::Syntax));
        }
        let rhs: Vec<&str> = rhs.split_whitespace().collect();
        for name in lhs.iter().chain(rhs.iter()) {
            if name.starts_with(RESERVED_PREFIX) {
                return Err(err(HomError::ReservedName(name.to_string()).into()));
            }
        }
        if rhs.is_empty() {
            return Err(err(HomError::Erasing(lhs[0].to_string()).into()));
        }
        images.push((Letter::new(lhs[0]), rhs.into_iter().map(Letter::new).collect()));
        Homomorphism::new(images.clone()).map_err(|e| err(e.into()))?;
    }
    Homomorphism::new(images).map_err(|e| HomParseError {
        line: 0,
        kind: e.into(),
    })
}

/// `letter ↦ first second`, fixing every letter in `fixed`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Expansion {
    pub letter: Letter,
    pub first: Letter,
    pub second: Letter,
    pub fixed: Vec<Letter>,
}

/// One factor of a homomorphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Elementary {
    LetterMap(Homomorphism),
    Expansion(Expansion),
}

impl Elementary {
    pub fn apply(&self, w: &[Letter]) -> Option<Word> {
        match self {
            Elementary::LetterMap(h) => h.apply(w),
            Elementary::Expansion(e) => {
                let mut out = Vec::with_capacity(w.len() + 1);
                for a in w {
                    if *a == e.letter {
                        out.push(e.first.clone());
                        out.push(e.second.clone());
                    } else if e.fixed.contains(a) {
                        out.push(a.clone());
                    } else {
                        return None;
                    }
                }
                Some(out)
            }
        }
    }
}

struct Fresh(usize);

impl Fresh {
    fn letter(&mut self) -> Letter {
        self.0 += 1;
        Letter::new(&format!("{RESERVED_PREFIX}exp_{}", self.0))
    }
}

/// Factors `f` into elementary homomorphisms listed in application order:
/// `f(w) = gₙ(…g₂(g₁(w)))`. Expansions come first, the letter map last.
pub fn factor(f: &Homomorphism) -> Vec<Elementary> {
    let mut fresh = Fresh(0);
    let mut alphabet: Vec<Letter> = f.source.clone();
    let mut expansions = Vec::new();
    let mut final_map: Vec<(Letter, Word)> = Vec::new();

    for p in &f.source {
        let img = &f.images[p];
        if img.len() == 1 {
            final_map.push((p.clone(), img.clone()));
            continue;
        }
        let positions: Vec<Letter> = img.iter().map(|_| fresh.letter()).collect();
        for (g, target) in positions.iter().zip(img) {
            final_map.push((g.clone(), vec![target.clone()]));
        }
        // prefixes[j] stands for positions[0..=j]; the full prefix is p itself
        let m = img.len();
        let mut prefixes: Vec<Letter> = Vec::with_capacity(m);
        prefixes.push(positions[0].clone());
        for _ in 1..m - 1 {
            prefixes.push(fresh.letter());
        }
        prefixes.push(p.clone());
        for j in (1..m).rev() {
            let letter = prefixes[j].clone();
            let fixed: Vec<Letter> = alphabet.iter().filter(|a| **a != letter).cloned().collect();
            let at = alphabet.iter().position(|a| *a == letter).expect("letter in alphabet");
            alphabet.splice(at..=at, [prefixes[j - 1].clone(), positions[j].clone()]);
            expansions.push(Elementary::Expansion(Expansion {
                letter,
                first: prefixes[j - 1].clone(),
                second: positions[j].clone(),
                fixed,
            }));
        }
    }

    let order: Vec<Letter> = alphabet;
    let lookup: BTreeMap<Letter, Word> = final_map.into_iter().collect();
    let h = Homomorphism::new(order.iter().map(|a| (a.clone(), lookup[a].clone())).collect())
        .expect("letter map is non-erasing");
    expansions.push(Elementary::LetterMap(h));
    expansions
}

/// True when the factors, applied in order, send every source letter of `f`
/// to its image.
pub fn composes_to(f: &Homomorphism, factors: &[Elementary]) -> bool {
    f.source.iter().all(|p| {
        let mut w = vec![p.clone()];
        for g in factors {
            match g.apply(&w) {
                Some(next) => w = next,
                None => return false,
            }
        }
        Some(&w) == f.image(p)
    })
}

/// Preimage under a letter-to-letter map: every edge reading `a` is replaced
/// by parallel edges reading each `p` with `f(p) = a`; ε-edges are kept.
pub fn preimage_letter_map(a: &Machine, f: &Homomorphism) -> Result<Machine, HomError> {
    if let Some((p, w)) = f.images.iter().find(|(_, w)| w.len() != 1) {
        return Err(HomError::NotLetterMap(p.to_string(), w.len()));
    }
    f.check_target(a)?;
    let mut b = MachineBuilder::new();
    for s in a.states() {
        b.state(a.state_name(s))?;
    }
    b.initial(a.initial());
    for &q in a.finals() {
        b.final_state(q);
    }
    for p in &f.source {
        b.letter(p.clone());
    }
    for x in a.memory_alphabet() {
        b.symbol(x.clone());
    }
    for e in a.edges() {
        match &e.input {
            None => {
                b.edge(e.src, e.dst, e.op.clone(), None);
            }
            Some(l) => {
                for p in &f.source {
                    if f.images[p][0] == *l {
                        b.edge(e.src, e.dst, e.op.clone(), Some(p.clone()));
                    }
                }
            }
        }
    }
    Ok(b.build()?)
}

/// How the expansion construction guards the memory.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum ExpansionStyle {
    /// Two copies only; the finals are the first copy's finals.
    #[default]
    Direct,
    /// Adds a fresh start that pushes a marker symbol `z` and a single fresh
    /// final reached by popping `z` from the first copy's finals.
    Wrapped,
}

/// Output of an expansion construction with the copy bijections kept.
#[derive(Clone, Debug)]
pub struct ExpansionConstruction {
    pub machine: Machine,
    /// `first_copy[q]` is the state of the first copy corresponding to `q`.
    pub first_copy: Vec<StateId>,
    pub second_copy: Vec<StateId>,
    /// The marker symbol (wrapped style only).
    pub marker: Option<MemorySymbol>,
}

/// A memory symbol not used by `m`, in the reserved namespace.
pub fn fresh_symbol(m: &Machine) -> MemorySymbol {
    (1..)
        .map(|k| MemorySymbol::new(&format!("{RESERVED_PREFIX}z_{k}")))
        .find(|z| !m.memory_alphabet().contains(z))
        .expect("unbounded supply")
}

/// Preimage of `L(a)` under `letter ↦ a1 a2` (all other letters fixed),
/// following the two-copy construction exactly: `z` is pushed on entry and
/// popped into the single final state.
///
/// Because the machine's root is shifted up by the `z` vertex, every
/// `up eps` of the original is rewritten to `up z`.
pub fn preimage_expansion(
    a: &Machine,
    letter: &Letter,
    a1: &Letter,
    a2: &Letter,
    z: &MemorySymbol,
) -> Result<ExpansionConstruction, HomError> {
    expansion(a, letter, a1, a2, Some(z))
}

/// The two-copy construction without the `z` guard.
pub fn preimage_expansion_direct(
    a: &Machine,
    letter: &Letter,
    a1: &Letter,
    a2: &Letter,
) -> Result<ExpansionConstruction, HomError> {
    expansion(a, letter, a1, a2, None)
}

fn expansion(
    a: &Machine,
    letter: &Letter,
    a1: &Letter,
    a2: &Letter,
    z: Option<&MemorySymbol>,
) -> Result<ExpansionConstruction, HomError> {
    if a1 == a2 || !a.has_letter(a1) || !a.has_letter(a2) {
        return Err(HomError::BadExpansionPair(a1.to_string(), a2.to_string()));
    }
    if letter != a1 && letter != a2 && a.has_letter(letter) {
        return Err(HomError::LetterClash(letter.to_string()));
    }
    if let Some(z) = z {
        if a.memory_alphabet().contains(z) {
            return Err(HomError::SymbolClash(z.to_string()));
        }
    }

    let mut b = MachineBuilder::new();
    let start = match z {
        Some(_) => Some(b.state(&format!("{RESERVED_PREFIX}start"))?),
        None => None,
    };
    let first_copy: Vec<StateId> = a
        .states()
        .map(|s| b.state(&format!("{RESERVED_PREFIX}1.{}", a.state_name(s))))
        .collect::<Result<_, _>>()?;
    let second_copy: Vec<StateId> = a
        .states()
        .map(|s| b.state(&format!("{RESERVED_PREFIX}2.{}", a.state_name(s))))
        .collect::<Result<_, _>>()?;
    let accept = match z {
        Some(_) => Some(b.state(&format!("{RESERVED_PREFIX}accept"))?),
        None => None,
    };

    for l in a.input_alphabet() {
        if l == a1 {
            b.letter(letter.clone());
        } else if l != a2 {
            b.letter(l.clone());
        }
    }
    for x in a.memory_alphabet() {
        b.symbol(x.clone());
    }

    let shift = |op: &StackOp| match (op, z) {
        (StackOp::Up(None), Some(z)) => StackOp::Up(Some(z.clone())),
        _ => op.clone(),
    };

    if let (Some(z), Some(start), Some(accept)) = (z, start, accept) {
        b.symbol(z.clone());
        b.initial(start);
        b.final_state(accept);
        b.edge(start, first_copy[a.initial().0], StackOp::Push(z.clone()), None);
    } else {
        b.initial(first_copy[a.initial().0]);
        for &f in a.finals() {
            b.final_state(first_copy[f.0]);
        }
    }

    // first copy: a1-edges cross into the second copy reading the new letter;
    // a2-edges can never fire on the new alphabet and are dropped
    for e in a.edges() {
        let op = shift(&e.op);
        match &e.input {
            Some(l) if l == a1 => {
                b.edge(first_copy[e.src.0], second_copy[e.dst.0], op, Some(letter.clone()));
            }
            Some(l) if l == a2 => {}
            input => {
                b.edge(first_copy[e.src.0], first_copy[e.dst.0], op, input.clone());
            }
        }
    }
    // second copy: only ε- and a2-edges survive; a2-edges return as ε-moves
    for e in a.edges() {
        let op = shift(&e.op);
        match &e.input {
            None => {
                b.edge(second_copy[e.src.0], second_copy[e.dst.0], op, None);
            }
            Some(l) if l == a2 => {
                b.edge(second_copy[e.src.0], first_copy[e.dst.0], op, None);
            }
            _ => {}
        }
    }
    if let (Some(z), Some(accept)) = (z, accept) {
        for &f in a.finals() {
            b.edge(first_copy[f.0], accept, StackOp::Pop(z.clone()), None);
        }
    }

    Ok(ExpansionConstruction {
        machine: b.build()?,
        first_copy,
        second_copy,
        marker: z.cloned(),
    })
}

/// A machine for `f⁻¹(L(a))`, folding [`factor`] through the elementary
/// constructions with the [`ExpansionStyle::Direct`] expansion.
pub fn preimage(a: &Machine, f: &Homomorphism) -> Result<Machine, HomError> {
    preimage_with(a, f, ExpansionStyle::Direct)
}

pub fn preimage_with(a: &Machine, f: &Homomorphism, style: ExpansionStyle) -> Result<Machine, HomError> {
    f.check_target(a)?;
    let mut m = a.clone();
    for g in factor(f).iter().rev() {
        m = match g {
            Elementary::LetterMap(h) => preimage_letter_map(&m, h)?,
            Elementary::Expansion(e) => match style {
                ExpansionStyle::Direct => {
                    preimage_expansion_direct(&m, &e.letter, &e.first, &e.second)?.machine
                }
                ExpansionStyle::Wrapped => {
                    let z = fresh_symbol(&m);
                    preimage_expansion(&m, &e.letter, &e.first, &e.second, &z)?.machine
                }
            },
        };
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::nsa::{accepts, enumerate_accepted, word, ResourceCaps, Verdict};

    fn hom(pairs: &[(&str, &str)]) -> Homomorphism {
        Homomorphism::new(pairs.iter().map(|(a, w)| (Letter::new(a), word(w))).collect()).unwrap()
    }

    #[test]
    fn erasing_rejected() {
        assert_eq!(
            Homomorphism::new(vec![(Letter::new("a"), vec![])]),
            Err(HomError::Erasing("a".into()))
        );
        assert!(parse_hom("map: a ->\n").is_err());
    }

    #[test]
    fn parse_hom_file() {
        let f = parse_hom("# comment\nmap: p -> a b c d\nmap: a -> a\n").unwrap();
        assert_eq!(f.source(), &[Letter::new("p"), Letter::new("a")]);
        assert_eq!(f.image(&Letter::new("p")).unwrap().len(), 4);
        let e = parse_hom("map: p -> a\nmap p -> b\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_hom("map: p -> a\nmap: p -> b\n").unwrap_err();
        assert_eq!(e.kind, HomParseErrorKind::Hom(HomError::DuplicateLetter("p".into())));
        assert!(parse_hom("map: __exp_1 -> a\n").is_err());
    }

    #[test]
    fn factor_identity_is_one_letter_map() {
        let f = Homomorphism::identity(&word("abcd"));
        let fs = factor(&f);
        assert_eq!(fs.len(), 1);
        assert!(matches!(&fs[0], Elementary::LetterMap(h) if *h == f));
    }

    #[test]
    fn factor_length_two_and_three() {
        let f = hom(&[("a", "bc"), ("d", "d")]);
        let fs = factor(&f);
        assert_eq!(fs.len(), 2);
        assert!(matches!(fs[0], Elementary::Expansion(_)));
        assert!(matches!(fs[1], Elementary::LetterMap(_)));
        assert!(composes_to(&f, &fs));

        let f = hom(&[("a", "bcd"), ("e", "b")]);
        let fs = factor(&f);
        assert_eq!(fs.len(), 3);
        assert!(matches!(fs[0], Elementary::Expansion(_)));
        assert!(matches!(fs[1], Elementary::Expansion(_)));
        assert!(composes_to(&f, &fs));
    }

    #[test]
    fn composes_to_detects_a_wrong_chain() {
        let f = hom(&[("a", "bc")]);
        let g = hom(&[("a", "cb")]);
        assert!(!composes_to(&f, &factor(&g)));
    }

    #[test]
    fn letter_map_preimage_of_fig2() {
        let m = fixtures::fig2();
        let f = hom(&[("p", "a"), ("q", "a"), ("b", "b"), ("c", "c"), ("d", "d")]);
        let m2 = preimage_letter_map(&m, &f).unwrap();
        let caps = ResourceCaps::default();
        assert_eq!(accepts(&m2, &word("pqbbccdd"), caps).verdict, Verdict::Accepted);
        assert_eq!(accepts(&m2, &word("pbcd"), caps).verdict, Verdict::Accepted);
        assert_eq!(accepts(&m2, &word("abcd"), caps).verdict, Verdict::Rejected);
    }

    #[test]
    fn letter_map_with_no_letter_preimages() {
        let m = fixtures::fig2();
        let f = hom(&[("p", "a")]);
        // b, c, d edges disappear; only ε survives
        let m2 = preimage_letter_map(&m, &f).unwrap();
        let got = enumerate_accepted(&m2, 4, ResourceCaps::default()).unwrap();
        assert_eq!(got, [Vec::new()].into_iter().collect());
    }

    #[test]
    fn image_outside_alphabet() {
        let f = hom(&[("p", "e")]);
        assert_eq!(
            preimage(&fixtures::fig2(), &f).unwrap_err(),
            HomError::ImageOutsideAlphabet("e".into())
        );
    }

    #[test]
    fn expansion_preconditions() {
        let m = fixtures::fig2();
        let (a, b, c) = (Letter::new("a"), Letter::new("b"), Letter::new("c"));
        let z = MemorySymbol::new("z");
        assert!(matches!(
            preimage_expansion(&m, &Letter::new("n"), &a, &a, &z),
            Err(HomError::BadExpansionPair(..))
        ));
        assert!(matches!(
            preimage_expansion(&m, &c, &a, &b, &z),
            Err(HomError::LetterClash(_))
        ));
        assert!(matches!(
            preimage_expansion(&m, &Letter::new("n"), &a, &b, &MemorySymbol::new("x")),
            Err(HomError::SymbolClash(_))
        ));
    }

    #[test]
    fn wrapped_expansion_structure() {
        let m = fixtures::fig2();
        let (n, c, d) = (Letter::new("n"), Letter::new("c"), Letter::new("d"));
        let z = MemorySymbol::new("z");
        let built = preimage_expansion(&m, &n, &c, &d, &z).unwrap();
        let b = &built.machine;
        assert_eq!(b.state_count(), 2 * m.state_count() + 2);
        assert_eq!(b.finals().len(), 1);
        assert_eq!(b.state_name(b.initial()), "__start");
        assert_eq!(
            b.input_alphabet(),
            &[Letter::new("a"), Letter::new("b"), n.clone()]
        );
        // second copy has no finals and no letter edges
        for &q in &built.second_copy {
            assert!(!b.is_final(q));
            for &i in b.out_edges(q) {
                assert_eq!(b.edge(i).input, None);
            }
        }
        let caps = ResourceCaps::default();
        assert_eq!(accepts(b, &[], caps).verdict, Verdict::Accepted);
        assert_eq!(accepts(b, &word("abn"), caps).verdict, Verdict::Accepted);
        assert_eq!(accepts(b, &word("abnabn"), caps).verdict, Verdict::Accepted);
        assert_eq!(accepts(b, &word("ab"), caps).verdict, Verdict::Rejected);
    }

    #[test]
    fn wrapped_expansion_rewrites_up_eps() {
        let m = crate::nsa::parse_machine(
            "states: 1 2\nstart: 1\nfinal: 1\ninput: a b\nmemory: x\n\
             edge: 1 2 push x a\nedge: 2 2 down x eps\nedge: 2 1 up eps b\nedge: 1 1 pop x eps\n",
        )
        .unwrap();
        let z = MemorySymbol::new("z");
        let built = preimage_expansion(&m, &Letter::new("n"), &Letter::new("a"), &Letter::new("b"), &z)
            .unwrap();
        assert!(built
            .machine
            .edges()
            .iter()
            .all(|e| e.op != StackOp::Up(None)));
        let caps = ResourceCaps::default();
        assert_eq!(accepts(&m, &word("ab"), caps).verdict, Verdict::Accepted);
        assert_eq!(accepts(&built.machine, &word("n"), caps).verdict, Verdict::Accepted);
    }

    #[test]
    fn block_homomorphism() {
        let m = fixtures::fig2();
        let f = parse_hom(include_str!("../fixtures/hom_block.hom")).unwrap();
        let p = preimage(&m, &f).unwrap();
        let caps = ResourceCaps::default();
        for w in ["", "p", "pp", "pabcd", "paabbccdd"] {
            assert_eq!(accepts(&p, &word(w), caps).verdict, Verdict::Accepted, "{w}");
        }
        assert_eq!(accepts(&p, &word("pa"), caps).verdict, Verdict::Rejected);
    }
}
