use std::fmt;
use std::path::Path;

use super::GroupError;

/// A group element as its canonical word: a geodesic over the generator
/// indices of the oracle that produced it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Element(Vec<u16>);

impl Element {
    pub fn letters(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.0.iter().map(|&g| g as usize)
    }

    /// Word length; canonical forms are geodesics.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Word-problem decider for a finitely generated group with formal inverses.
///
/// Implementors supply the generator letters, the formal-inverse pairing, and
/// a normal form. The normal form must be a geodesic word, must depend only
/// on the group element, and must be the empty word exactly for the identity.
/// Everything else (products, inverses, word length) derives from that.
pub trait GroupOracle: Send + Sync {
    /// All generator letters, formal inverses included.
    fn letters(&self) -> &[String];

    /// Index of the formal inverse of generator `g`.
    fn inverse_gen(&self, g: usize) -> usize;

    /// Canonical geodesic word for the element represented by `word`.
    fn normalize(&self, word: &[usize]) -> Vec<usize>;

    fn gen_index(&self, letter: &str) -> Option<usize> {
        self.letters().iter().position(|l| l == letter)
    }

    fn element(&self, word: &[usize]) -> Element {
        Element(self.normalize(word).into_iter().map(|g| g as u16).collect())
    }

    /// The element represented by a word of letters.
    fn canonical<S: AsRef<str>>(&self, word: &[S]) -> Result<Element, GroupError>
    where
        Self: Sized,
    {
        let gens = word
            .iter()
            .map(|l| {
                self.gen_index(l.as_ref())
                    .ok_or_else(|| GroupError::UnknownLetter(l.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.element(&gens))
    }

    fn is_identity<S: AsRef<str>>(&self, word: &[S]) -> Result<bool, GroupError>
    where
        Self: Sized,
    {
        Ok(self.canonical(word)?.is_empty())
    }

    fn identity(&self) -> Element {
        Element::default()
    }

    fn mul(&self, a: &Element, b: &Element) -> Element {
        let w: Vec<usize> = a.letters().chain(b.letters()).collect();
        self.element(&w)
    }

    fn mul_gen(&self, a: &Element, g: usize) -> Element {
        let w: Vec<usize> = a.letters().chain(std::iter::once(g)).collect();
        self.element(&w)
    }

    fn inverse(&self, a: &Element) -> Element {
        let w: Vec<usize> = a.letters().rev().map(|g| self.inverse_gen(g)).collect();
        self.element(&w)
    }

    /// Word-metric distance `|a⁻¹b|`.
    fn distance(&self, a: &Element, b: &Element) -> usize {
        self.mul(&self.inverse(a), b).len()
    }

    fn render(&self, a: &Element) -> String {
        if a.is_empty() {
            return "1".to_string();
        }
        let letters = self.letters();
        if a.letters().all(|g| letters[g].chars().count() == 1) {
            a.letters().map(|g| letters[g].as_str()).collect()
        } else {
            a.letters().map(|g| letters[g].as_str()).collect::<Vec<_>>().join(" ")
        }
    }
}

/// A multiplication table with named elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    pub names: Vec<String>,
    pub identity: usize,
    /// `mul[i][j]` is the index of `names[i] · names[j]`.
    pub mul: Vec<Vec<usize>>,
    /// `(letter, element, inverse letter)` for each generator.
    pub generators: Vec<(String, usize, String)>,
}

/// The supported group families.
#[derive(Clone, Debug)]
pub enum Group {
    /// Free group; letters `a, b, …` with inverses `A, B, …`.
    Free { rank: usize, letters: Vec<String> },
    /// Free abelian group with the same letter convention.
    Abelian { rank: usize, letters: Vec<String> },
    Finite(Box<FiniteGroup>),
    Product {
        left: Box<Group>,
        right: Box<Group>,
        letters: Vec<String>,
    },
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    table: FiniteTable,
    letters: Vec<String>,
    /// element acted on by each letter index
    letter_elements: Vec<usize>,
    inverse_letter: Vec<usize>,
    /// shortlex geodesic per element
    geodesic: Vec<Vec<usize>>,
}

const MAX_POOL: usize = 26;

fn pool_letters(rank: usize, offset: usize) -> Result<Vec<String>, GroupError> {
    if offset + rank > MAX_POOL {
        return Err(GroupError::BadSpec(format!(
            "at most {MAX_POOL} generator pairs can be named"
        )));
    }
    let mut out = Vec::with_capacity(2 * rank);
    for i in 0..rank {
        let c = (b'a' + (offset + i) as u8) as char;
        out.push(c.to_string());
        out.push(c.to_ascii_uppercase().to_string());
    }
    Ok(out)
}

impl Group {
    pub fn free(rank: usize) -> Result<Self, GroupError> {
        Self::free_at(rank, 0)
    }

    pub fn free_at(rank: usize, offset: usize) -> Result<Self, GroupError> {
        Ok(Group::Free {
            rank,
            letters: pool_letters(rank, offset)?,
        })
    }

    pub fn abelian(rank: usize) -> Result<Self, GroupError> {
        Self::abelian_at(rank, 0)
    }

    pub fn abelian_at(rank: usize, offset: usize) -> Result<Self, GroupError> {
        Ok(Group::Abelian {
            rank,
            letters: pool_letters(rank, offset)?,
        })
    }

    pub fn finite(table: FiniteTable) -> Result<Self, GroupError> {
        Ok(Group::Finite(Box::new(FiniteGroup::new(table)?)))
    }

    pub fn product(left: Group, right: Group) -> Result<Self, GroupError> {
        let mut letters: Vec<String> = left.letters().to_vec();
        for l in right.letters() {
            if letters.contains(l) {
                return Err(GroupError::BadSpec(format!(
                    "factors share the generator letter `{l}`"
                )));
            }
            letters.push(l.clone());
        }
        Ok(Group::Product {
            left: Box::new(left),
            right: Box::new(right),
            letters,
        })
    }

    /// Number of generator pairs; used to allocate letters for products.
    fn pairs(&self) -> usize {
        self.letters().len() / 2
    }

    /// Parses `free N`, `abelian N`, `finite PATH`, `product SPEC SPEC`,
    /// optionally prefixed by `group:`. Relative table paths resolve against
    /// `base`.
    pub fn parse(spec: &str, base: &Path) -> Result<Self, GroupError> {
        let spec = spec.trim();
        let spec = spec.strip_prefix("group:").unwrap_or(spec);
        let tokens: Vec<&str> = spec.split_whitespace().collect();
        let mut pos = 0;
        let g = parse_tokens(&tokens, &mut pos, 0, base)?;
        if pos != tokens.len() {
            return Err(GroupError::BadSpec(format!(
                "trailing tokens in group spec `{spec}`"
            )));
        }
        Ok(g)
    }

    pub fn family(&self) -> String {
        match self {
            Group::Free { rank, .. } => format!("free {rank}"),
            Group::Abelian { rank, .. } => format!("abelian {rank}"),
            Group::Finite(f) => format!("finite order {}", f.table.names.len()),
            Group::Product { left, right, .. } => {
                format!("product ({}) ({})", left.family(), right.family())
            }
        }
    }
}

fn parse_tokens(
    tokens: &[&str],
    pos: &mut usize,
    offset: usize,
    base: &Path,
) -> Result<Group, GroupError> {
    let bad = |m: &str| GroupError::BadSpec(m.to_string());
    let head = *tokens.get(*pos).ok_or_else(|| bad("empty group spec"))?;
    *pos += 1;
    let mut arg = || -> Result<&str, GroupError> {
        let t = *tokens
            .get(*pos)
            .ok_or_else(|| bad(&format!("`{head}` needs an argument")))?;
        *pos += 1;
        Ok(t)
    };
    match head {
        "free" | "abelian" => {
            let rank: usize = arg()?
                .parse()
                .map_err(|_| bad("rank must be a non-negative integer"))?;
            if head == "free" {
                Group::free_at(rank, offset)
            } else {
                Group::abelian_at(rank, offset)
            }
        }
        "finite" => {
            let path = base.join(arg()?);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| GroupError::Io(format!("{}: {e}", path.display())))?;
            Group::finite(parse_table(&text)?)
        }
        "product" => {
            let left = parse_tokens(tokens, pos, offset, base)?;
            let right = parse_tokens(tokens, pos, offset + left.pairs(), base)?;
            Group::product(left, right)
        }
        other => Err(bad(&format!("unknown group family `{other}`"))),
    }
}

/// Parses a multiplication-table file:
///
/// ```text
/// elements: e s
/// identity: e
/// gen: a s        # letter a acts as s; inverse letter defaults to A
/// table:
/// e s
/// s e
/// ```
pub fn parse_table(text: &str) -> Result<FiniteTable, GroupError> {
    let mut names: Vec<String> = Vec::new();
    let mut identity = None;
    let mut gens: Vec<(String, String, Option<String>)> = Vec::new();
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut in_table = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let bad = |m: String| GroupError::BadTable { line, message: m };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if in_table {
            rows.push(content.split_whitespace().map(str::to_string).collect());
            continue;
        }
        let (key, rest) = content
            .split_once(':')
            .ok_or_else(|| bad("expected `key: value`".into()))?;
        let toks: Vec<&str> = rest.split_whitespace().collect();
        match key.trim() {
            "elements" => names.extend(toks.iter().map(|t| t.to_string())),
            "identity" => {
                if toks.len() != 1 {
                    return Err(bad("identity takes one element".into()));
                }
                identity = Some(toks[0].to_string());
            }
            "gen" => match toks[..] {
                [l, e] => gens.push((l.into(), e.into(), None)),
                [l, e, inv] => gens.push((l.into(), e.into(), Some(inv.into()))),
                _ => return Err(bad("expected `gen: letter element [inverse-letter]`".into())),
            },
            "table" => {
                if !toks.is_empty() {
                    return Err(bad("table rows start on the next line".into()));
                }
                in_table = true;
            }
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }
    let bad0 = |m: String| GroupError::BadTable { line: 0, message: m };
    let find = |n: &str| {
        names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| bad0(format!("unknown element `{n}`")))
    };
    let identity = find(&identity.ok_or_else(|| bad0("missing identity".into()))?)?;
    if rows.len() != names.len() {
        return Err(bad0(format!(
            "table has {} rows for {} elements",
            rows.len(),
            names.len()
        )));
    }
    let mut mul = Vec::with_capacity(rows.len());
    for row in &rows {
        if row.len() != names.len() {
            return Err(bad0("table is not square".into()));
        }
        mul.push(row.iter().map(|n| find(n)).collect::<Result<Vec<_>, _>>()?);
    }
    let generators = gens
        .into_iter()
        .map(|(l, e, inv)| {
            let inv = inv.unwrap_or_else(|| l.to_uppercase());
            Ok((l, find(&e)?, inv))
        })
        .collect::<Result<Vec<_>, GroupError>>()?;
    Ok(FiniteTable {
        names,
        identity,
        mul,
        generators,
    })
}

impl FiniteGroup {
    fn new(table: FiniteTable) -> Result<Self, GroupError> {
        let n = table.names.len();
        let bad = |m: &str| GroupError::BadTable {
            line: 0,
            message: m.to_string(),
        };
        if n == 0 || table.mul.len() != n || table.mul.iter().any(|r| r.len() != n) {
            return Err(bad("table must be square and nonempty"));
        }
        let e = table.identity;
        for i in 0..n {
            if table.mul[e][i] != i || table.mul[i][e] != i {
                return Err(bad("identity row or column is wrong"));
            }
            if !(0..n).any(|j| table.mul[i][j] == e) {
                return Err(bad("element without inverse"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table.mul[table.mul[a][b]][c] != table.mul[a][table.mul[b][c]] {
                        return Err(bad("multiplication is not associative"));
                    }
                }
            }
        }
        let inv_elem = |x: usize| (0..n).find(|&j| table.mul[x][j] == e).expect("checked");
        let mut letters = Vec::new();
        let mut letter_elements = Vec::new();
        let mut inverse_letter = Vec::new();
        for (l, x, inv) in &table.generators {
            if letters.contains(l) || letters.contains(inv) || l == inv {
                return Err(bad("generator letters must be distinct"));
            }
            let k = letters.len();
            letters.push(l.clone());
            letters.push(inv.clone());
            letter_elements.push(*x);
            letter_elements.push(inv_elem(*x));
            inverse_letter.push(k + 1);
            inverse_letter.push(k);
        }
        // shortlex geodesics by BFS in letter order
        let mut geodesic: Vec<Option<Vec<usize>>> = vec![None; n];
        geodesic[e] = Some(Vec::new());
        let mut queue = std::collections::VecDeque::from([e]);
        while let Some(x) = queue.pop_front() {
            for (g, &y) in letter_elements.iter().enumerate() {
                let z = table.mul[x][y];
                if geodesic[z].is_none() {
                    let mut w = geodesic[x].clone().expect("visited");
                    w.push(g);
                    geodesic[z] = Some(w);
                    queue.push_back(z);
                }
            }
        }
        // elements outside the generated subgroup keep no geodesic; they are
        // unreachable from words anyway
        let geodesic = geodesic.into_iter().map(Option::unwrap_or_default).collect();
        Ok(FiniteGroup {
            table,
            letters,
            letter_elements,
            inverse_letter,
            geodesic,
        })
    }

    fn evaluate(&self, word: &[usize]) -> usize {
        word.iter().fold(self.table.identity, |x, &g| {
            self.table.mul[x][self.letter_elements[g]]
        })
    }
}

impl GroupOracle for Group {
    fn letters(&self) -> &[String] {
        match self {
            Group::Free { letters, .. } | Group::Abelian { letters, .. } => letters,
            Group::Finite(f) => &f.letters,
            Group::Product { letters, .. } => letters,
        }
    }

    fn inverse_gen(&self, g: usize) -> usize {
        match self {
            Group::Free { .. } | Group::Abelian { .. } => g ^ 1,
            Group::Finite(f) => f.inverse_letter[g],
            Group::Product { left, right, .. } => {
                let nl = left.letters().len();
                if g < nl {
                    left.inverse_gen(g)
                } else {
                    nl + right.inverse_gen(g - nl)
                }
            }
        }
    }

    fn normalize(&self, word: &[usize]) -> Vec<usize> {
        match self {
            Group::Free { .. } => {
                let mut out: Vec<usize> = Vec::with_capacity(word.len());
                for &g in word {
                    if out.last() == Some(&(g ^ 1)) {
                        out.pop();
                    } else {
                        out.push(g);
                    }
                }
                out
            }
            Group::Abelian { rank, .. } => {
                let mut exp = vec![0i64; *rank];
                for &g in word {
                    exp[g / 2] += if g % 2 == 0 { 1 } else { -1 };
                }
                let mut out = Vec::new();
                for (i, &e) in exp.iter().enumerate() {
                    let g = if e >= 0 { 2 * i } else { 2 * i + 1 };
                    out.extend(std::iter::repeat_n(g, e.unsigned_abs() as usize));
                }
                out
            }
            Group::Finite(f) => f.geodesic[f.evaluate(word)].clone(),
            Group::Product { left, right, .. } => {
                let nl = left.letters().len();
                let lw: Vec<usize> = word.iter().copied().filter(|&g| g < nl).collect();
                let rw: Vec<usize> = word.iter().filter(|&&g| g >= nl).map(|&g| g - nl).collect();
                let mut out = left.normalize(&lw);
                out.extend(right.normalize(&rw).into_iter().map(|g| g + nl));
                out
            }
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.family(), self.letters().join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z2: &str = "elements: e s\nidentity: e\ngen: a s\ntable:\ne s\ns e\n";

    #[test]
    fn free_reduction() {
        let g = Group::free(2).unwrap();
        assert!(g.is_identity(&["a", "A"]).unwrap());
        assert!(!g.is_identity(&["a", "b"]).unwrap());
        assert_eq!(g.render(&g.canonical(&["a", "b", "B", "a"]).unwrap()), "aa");
        assert_eq!(g.letters(), &["a", "A", "b", "B"]);
    }

    #[test]
    fn abelian_commutes() {
        let g = Group::abelian(2).unwrap();
        assert_eq!(
            g.canonical(&["a", "b", "A"]).unwrap(),
            g.canonical(&["b"]).unwrap()
        );
        assert_eq!(g.render(&g.canonical(&["B", "a", "B"]).unwrap()), "aBB");
    }

    #[test]
    fn finite_table() {
        let g = Group::finite(parse_table(Z2).unwrap()).unwrap();
        assert!(g.is_identity(&["a", "a"]).unwrap());
        assert!(g.is_identity(&["a", "A"]).unwrap());
        assert!(!g.is_identity(&["a"]).unwrap());
        assert_eq!(g.canonical(&["A"]).unwrap().len(), 1);
    }

    #[test]
    fn malformed_tables() {
        let bad = "elements: e s\nidentity: e\ngen: a s\ntable:\ne s\ne e\n";
        assert!(Group::finite(parse_table(bad).unwrap()).is_err());
        let short = "elements: e s\nidentity: e\ntable:\ne s\n";
        assert!(parse_table(short).is_err());
        assert!(parse_table("elements: e\nidentity: f\ntable:\ne\n").is_err());
    }

    #[test]
    fn rank_zero_is_trivial() {
        let g = Group::free(0).unwrap();
        assert!(g.letters().is_empty());
        assert!(g.is_identity::<&str>(&[]).unwrap());
    }

    #[test]
    fn unknown_letter() {
        let g = Group::free(1).unwrap();
        assert_eq!(
            g.canonical(&["b"]),
            Err(GroupError::UnknownLetter("b".into()))
        );
    }

    #[test]
    fn product_spec_allocates_letters() {
        let g = Group::parse("group: product free 1 abelian 1", Path::new(".")).unwrap();
        assert_eq!(g.letters(), &["a", "A", "b", "B"]);
        // b commutes with a, a does not cancel with b
        assert_eq!(
            g.canonical(&["b", "a", "B"]).unwrap(),
            g.canonical(&["a"]).unwrap()
        );
        assert_eq!(g.canonical(&["a", "b"]).unwrap().len(), 2);
        assert!(Group::parse("product free 1", Path::new(".")).is_err());
        assert!(Group::parse("free 1 extra", Path::new(".")).is_err());
        assert!(Group::parse("surface 2", Path::new(".")).is_err());
    }

    #[test]
    fn distance_is_word_metric() {
        let g = Group::free(2).unwrap();
        let x = g.canonical(&["a", "b"]).unwrap();
        let y = g.canonical(&["a", "B"]).unwrap();
        assert_eq!(g.distance(&x, &y), 2);
        let z2 = Group::abelian(2).unwrap();
        let p = z2.canonical(&["a", "a", "b"]).unwrap();
        let q = z2.canonical(&["A", "b", "b"]).unwrap();
        assert_eq!(z2.distance(&p, &q), 4);
    }
}
