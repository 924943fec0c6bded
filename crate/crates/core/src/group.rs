//! Words in the fundamental group of the wedge complement and their sheet
//! actions.
//!
//! The group is presented as `<a, b, c, d, e ; ab = ba, de = ed>`. A degree-3
//! cover is described by the permutations assigned to the five generators;
//! words act on sheet indices left to right (path concatenation order).

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("unknown generator {found:?} at offset {offset}")]
    UnknownGenerator { offset: usize, found: char },
    #[error("malformed inverse suffix at offset {offset}")]
    MalformedSuffix { offset: usize },
    #[error("malformed permutation {0:?}")]
    MalformedPerm(String),
    #[error("unknown arc {0:?}")]
    UnknownArc(String),
    #[error("arc {0} has no tabulated loop word")]
    NotTabulated(ArcId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    A,
    B,
    C,
    D,
    E,
}

impl Generator {
    pub const ALL: [Generator; 5] = [
        Generator::A,
        Generator::B,
        Generator::C,
        Generator::D,
        Generator::E,
    ];

    pub fn symbol(self) -> char {
        match self {
            Generator::A => 'a',
            Generator::B => 'b',
            Generator::C => 'c',
            Generator::D => 'd',
            Generator::E => 'e',
        }
    }

    pub fn from_symbol(ch: char) -> Option<Self> {
        match ch {
            'a' => Some(Generator::A),
            'b' => Some(Generator::B),
            'c' => Some(Generator::C),
            'd' => Some(Generator::D),
            'e' => Some(Generator::E),
            _ => None,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// A generator raised to the power +1 or -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: Generator, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inverted(self) -> Self {
        Self {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// All ten signed letters, positive ones first.
    pub fn all() -> impl Iterator<Item = Letter> {
        [false, true]
            .into_iter()
            .flat_map(|inv| Generator::ALL.into_iter().map(move |g| Letter::new(g, inv)))
    }
}

/// An unreduced word in the generators. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    /// `g w g^-1`
    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.concat(self).concat(&g.inverse())
    }

    /// Cancels adjacent `x x^-1` pairs.
    pub fn freely_reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            match out.last() {
                Some(&last) if last == l.inverted() => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word { letters: out }
    }
}

impl FromStr for Word {
    type Err = GroupError;

    /// Accepts `a`..`e`, each optionally followed by `'` or `^-1`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bytes: Vec<char> = text.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let ch = bytes[i];
            let generator =
                Generator::from_symbol(ch).ok_or(GroupError::UnknownGenerator { offset: i, found: ch })?;
            i += 1;
            let mut inverse = false;
            if i < bytes.len() && bytes[i] == '\'' {
                inverse = true;
                i += 1;
            } else if i < bytes.len() && bytes[i] == '^' {
                if bytes.get(i + 1) == Some(&'-') && bytes.get(i + 2) == Some(&'1') {
                    inverse = true;
                    i += 3;
                } else {
                    return Err(GroupError::MalformedSuffix { offset: i });
                }
            }
            letters.push(Letter { generator, inverse });
        }
        Ok(Word { letters })
    }
}

pub fn parse_word(text: &str) -> Result<Word, GroupError> {
    text.parse()
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.generator.symbol())?;
            if l.inverse {
                f.write_str("'")?;
            }
        }
        Ok(())
    }
}

/// A permutation of the sheet indices {1, 2, 3}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm3 {
    // images[i] is the image of sheet i + 1, zero based.
    images: [u8; 3],
}

impl Perm3 {
    pub const IDENTITY: Perm3 = Perm3 { images: [0, 1, 2] };
    pub const T12: Perm3 = Perm3 { images: [1, 0, 2] };
    pub const T13: Perm3 = Perm3 { images: [2, 1, 0] };
    pub const T23: Perm3 = Perm3 { images: [0, 2, 1] };
    /// (1,2,3): 1 -> 2 -> 3 -> 1
    pub const C123: Perm3 = Perm3 { images: [1, 2, 0] };
    /// (1,3,2): 1 -> 3 -> 2 -> 1
    pub const C132: Perm3 = Perm3 { images: [2, 0, 1] };

    /// Fixed listing used for every enumeration in the crate.
    pub const ALL: [Perm3; 6] = [
        Perm3::IDENTITY,
        Perm3::T12,
        Perm3::T13,
        Perm3::T23,
        Perm3::C123,
        Perm3::C132,
    ];

    /// Builds a permutation from the images of 1, 2, 3 (one based).
    pub fn from_images(images: [u8; 3]) -> Option<Self> {
        let mut seen = [false; 3];
        let mut zero_based = [0u8; 3];
        for (slot, &img) in images.iter().enumerate() {
            if !(1..=3).contains(&img) || seen[(img - 1) as usize] {
                return None;
            }
            seen[(img - 1) as usize] = true;
            zero_based[slot] = img - 1;
        }
        Some(Perm3 { images: zero_based })
    }

    pub fn images(&self) -> [u8; 3] {
        [self.images[0] + 1, self.images[1] + 1, self.images[2] + 1]
    }

    /// Image of a one-based sheet index.
    pub fn apply(&self, sheet: u8) -> u8 {
        assert!((1..=3).contains(&sheet), "sheet index out of range: {sheet}");
        self.images[(sheet - 1) as usize] + 1
    }

    /// `self` followed by `next`.
    pub fn then(self, next: Perm3) -> Perm3 {
        let mut images = [0u8; 3];
        for (i, slot) in images.iter_mut().enumerate() {
            *slot = next.images[self.images[i] as usize];
        }
        Perm3 { images }
    }

    pub fn inverse(self) -> Perm3 {
        let mut images = [0u8; 3];
        for i in 0..3 {
            images[self.images[i] as usize] = i as u8;
        }
        Perm3 { images }
    }

    pub fn pow(self, n: i32) -> Perm3 {
        let base = if n < 0 { self.inverse() } else { self };
        (0..n.unsigned_abs()).fold(Perm3::IDENTITY, |acc, _| acc.then(base))
    }

    pub fn is_identity(&self) -> bool {
        *self == Perm3::IDENTITY
    }

    pub fn fixes(&self, sheet: u8) -> bool {
        self.apply(sheet) == sheet
    }

    pub fn is_derangement(&self) -> bool {
        (1..=3).all(|s| !self.fixes(s))
    }

    /// `g^-1 self g` in left-to-right convention.
    pub fn conjugate_by(self, g: Perm3) -> Perm3 {
        g.inverse().then(self).then(g)
    }

    pub fn commutes_with(self, other: Perm3) -> bool {
        self.then(other) == other.then(self)
    }
}

/// Left-to-right product: `p * q` applies `p` first.
impl Mul for Perm3 {
    type Output = Perm3;

    fn mul(self, rhs: Perm3) -> Perm3 {
        self.then(rhs)
    }
}

impl Serialize for Perm3 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for Perm3 {
    /// Cycle notation, e.g. `()`, `(2,3)`, `(1,3,2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("()");
        }
        let mut visited = [false; 3];
        for start in 0..3usize {
            if visited[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = vec![start + 1];
            visited[start] = true;
            let mut cur = self.images[start] as usize;
            while cur != start {
                visited[cur] = true;
                cycle.push(cur + 1);
                cur = self.images[cur] as usize;
            }
            let body: Vec<String> = cycle.iter().map(|c| c.to_string()).collect();
            write!(f, "({})", body.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Perm3 {
    type Err = GroupError;

    /// Parses cycle notation: `()`, `(2,3)`, `(1,2,3)`, `(1,2)(3)`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::MalformedPerm(text.to_string());
        let trimmed: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if trimmed.is_empty() || !trimmed.starts_with('(') || !trimmed.ends_with(')') {
            return Err(bad());
        }
        let mut result = Perm3::IDENTITY;
        let mut used = [false; 3];
        for chunk in trimmed[1..trimmed.len() - 1].split(")(") {
            if chunk.is_empty() {
                continue;
            }
            let mut elems = Vec::new();
            for tok in chunk.split(',') {
                let v: u8 = tok.parse().map_err(|_| bad())?;
                if !(1..=3).contains(&v) || used[(v - 1) as usize] {
                    return Err(bad());
                }
                used[(v - 1) as usize] = true;
                elems.push(v - 1);
            }
            let mut images = [0u8, 1, 2];
            for k in 0..elems.len() {
                images[elems[k] as usize] = elems[(k + 1) % elems.len()];
            }
            result = result.then(Perm3 { images });
        }
        Ok(result)
    }
}

/// Sheet actions of the five generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoverSpec {
    pub sigma: [Perm3; 5],
}

impl CoverSpec {
    pub fn new(a: Perm3, b: Perm3, c: Perm3, d: Perm3, e: Perm3) -> Self {
        Self {
            sigma: [a, b, c, d, e],
        }
    }

    /// `σ_a = σ_e = (2,3)`, `σ_b = σ_d = ()`, `σ_c = (1,3,2)`.
    pub fn canonical() -> Self {
        Self::new(
            Perm3::T23,
            Perm3::IDENTITY,
            Perm3::C132,
            Perm3::IDENTITY,
            Perm3::T23,
        )
    }

    /// The alternative cover with `σ_c = (1,2)`.
    pub fn alternative() -> Self {
        Self::new(
            Perm3::T23,
            Perm3::IDENTITY,
            Perm3::T12,
            Perm3::IDENTITY,
            Perm3::T23,
        )
    }

    pub fn get(&self, g: Generator) -> Perm3 {
        self.sigma[g.index()]
    }

    pub fn letter(&self, l: Letter) -> Perm3 {
        let p = self.get(l.generator);
        if l.inverse {
            p.inverse()
        } else {
            p
        }
    }

    /// Applies `f` to every generator image.
    pub fn map(&self, f: impl Fn(Perm3) -> Perm3) -> Self {
        Self {
            sigma: self.sigma.map(f),
        }
    }
}

impl fmt::Display for CoverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = Generator::ALL
            .iter()
            .map(|&g| format!("{}={}", g.symbol(), self.get(g)))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for CoverSpec {
    type Err = GroupError;

    /// `canonical`, `alternative`, or `a=(2,3) b=() c=(1,3,2) d=() e=(2,3)`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text.trim() {
            "canonical" => return Ok(Self::canonical()),
            "alternative" => return Ok(Self::alternative()),
            _ => {}
        }
        let mut sigma = [None; 5];
        for part in text.split_whitespace() {
            let (name, perm) = part
                .split_once('=')
                .ok_or_else(|| GroupError::MalformedPerm(part.to_string()))?;
            let mut chars = name.chars();
            let g = match (chars.next(), chars.next()) {
                (Some(ch), None) => Generator::from_symbol(ch),
                _ => None,
            }
            .ok_or(GroupError::UnknownGenerator {
                offset: 0,
                found: name.chars().next().unwrap_or(' '),
            })?;
            sigma[g.index()] = Some(perm.parse()?);
        }
        let mut out = [Perm3::IDENTITY; 5];
        for (slot, s) in out.iter_mut().zip(sigma) {
            *slot = s.ok_or_else(|| GroupError::MalformedPerm(text.to_string()))?;
        }
        Ok(CoverSpec { sigma: out })
    }
}

/// Left-to-right product of the letter actions of `w`.
pub fn monodromy_of_word(w: &Word, spec: &CoverSpec) -> Perm3 {
    w.letters()
        .iter()
        .fold(Perm3::IDENTITY, |acc, &l| acc.then(spec.letter(l)))
}

/// The class `a^alpha c^gamma` in the quotient isomorphic to S3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub alpha: u8,
    pub gamma: u8,
}

impl NormalForm {
    pub const IDENTITY: NormalForm = NormalForm { alpha: 0, gamma: 0 };

    /// Image under `a -> (2,3)`, `c -> (1,3,2)`.
    pub fn to_perm(self) -> Perm3 {
        Perm3::T23.pow(self.alpha as i32).then(Perm3::C132.pow(self.gamma as i32))
    }

    /// Product in the quotient, read off the rule `c^g a = a c^(2g)`.
    pub fn compose(self, other: NormalForm) -> NormalForm {
        let gamma_shift = if other.alpha == 1 {
            (2 * self.gamma) % 3
        } else {
            self.gamma
        };
        NormalForm {
            alpha: (self.alpha + other.alpha) % 2,
            gamma: (gamma_shift + other.gamma) % 3,
        }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a^{} c^{}", self.alpha, self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sym {
    A,
    C,
}

/// Outcome of the rewriting procedure, with the number of rule applications.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rewrite {
    pub normal_form: NormalForm,
    pub steps: usize,
}

/// Rewrites `w` to `a^alpha c^gamma`.
///
/// Substitution stage: `b, d -> ε`, `e -> a`, `a' -> a`, `c' -> cc`. Then the
/// rules `aa -> ε`, `ccc -> ε`, `ca -> acc` are applied at the leftmost redex
/// until none applies. The system terminates: reading words right to left as
/// nested unary terms, every rule strictly decreases the lexicographic path
/// order with precedence `a > c`.
pub fn q_rewrite(w: &Word) -> Rewrite {
    let mut syms: Vec<Sym> = Vec::with_capacity(w.len() * 2);
    for l in w.letters() {
        match (l.generator, l.inverse) {
            (Generator::B, _) | (Generator::D, _) => {}
            (Generator::A, _) | (Generator::E, _) => syms.push(Sym::A),
            (Generator::C, false) => syms.push(Sym::C),
            (Generator::C, true) => {
                syms.push(Sym::C);
                syms.push(Sym::C);
            }
        }
    }
    let mut steps = 0;
    loop {
        let mut applied = false;
        for i in 0..syms.len() {
            let rest = &syms[i..];
            if rest.len() >= 2 && rest[0] == Sym::A && rest[1] == Sym::A {
                syms.drain(i..i + 2);
            } else if rest.len() >= 3 && rest[..3].iter().all(|&s| s == Sym::C) {
                syms.drain(i..i + 3);
            } else if rest.len() >= 2 && rest[0] == Sym::C && rest[1] == Sym::A {
                syms.splice(i..i + 2, [Sym::A, Sym::C, Sym::C]);
            } else {
                continue;
            }
            applied = true;
            steps += 1;
            break;
        }
        if !applied {
            break;
        }
    }
    // Irreducible words are exactly a^α c^γ with α ≤ 1, γ ≤ 2.
    let alpha = syms.iter().take_while(|&&s| s == Sym::A).count();
    let gamma = syms.len() - alpha;
    debug_assert!(alpha <= 1 && gamma <= 2 && syms[alpha..].iter().all(|&s| s == Sym::C));
    Rewrite {
        normal_form: NormalForm {
            alpha: alpha as u8,
            gamma: gamma as u8,
        },
        steps,
    }
}

pub fn q_project(w: &Word) -> NormalForm {
    q_rewrite(w).normal_form
}

/// Membership in the index-3 subgroup `H = { g : gamma(q(g)) = 0 }`.
pub fn in_h(w: &Word) -> bool {
    q_project(w).gamma == 0
}

/// Frame arc addressed by a loop word.
///
/// Long edges are numbered `L1..L4` and split into pieces counted from left to
/// right; `L3Outside` is the loop around `L3` whose linking path stays outside
/// the wedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArcId {
    S1,
    S2,
    L { edge: u8, piece: u8 },
    L3Outside,
}

impl ArcId {
    /// Every arc with a tabulated loop word.
    pub const TABULATED: [ArcId; 12] = [
        ArcId::L { edge: 1, piece: 1 },
        ArcId::L { edge: 1, piece: 2 },
        ArcId::L { edge: 2, piece: 1 },
        ArcId::L { edge: 2, piece: 2 },
        ArcId::L { edge: 2, piece: 3 },
        ArcId::L { edge: 3, piece: 2 },
        ArcId::L { edge: 3, piece: 3 },
        ArcId::L { edge: 4, piece: 1 },
        ArcId::L { edge: 4, piece: 2 },
        ArcId::S1,
        ArcId::S2,
        ArcId::L3Outside,
    ];

    fn pieces(edge: u8) -> u8 {
        match edge {
            1 | 4 => 2,
            2 => 3,
            3 => 4,
            _ => 0,
        }
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArcId::S1 => f.write_str("S1"),
            ArcId::S2 => f.write_str("S2"),
            ArcId::L { edge, piece } => write!(f, "L{edge},{piece}"),
            ArcId::L3Outside => f.write_str("L3out"),
        }
    }
}

impl FromStr for ArcId {
    type Err = GroupError;

    /// Accepts `S1`, `S2`, `L3out`, and `L2,2` / `L22` / `L_{2,2}`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::UnknownArc(text.to_string());
        let t: String = text
            .chars()
            .filter(|c| !matches!(c, '_' | '{' | '}' | ',' | ' '))
            .collect();
        match t.as_str() {
            "S1" => return Ok(ArcId::S1),
            "S2" => return Ok(ArcId::S2),
            "L3out" => return Ok(ArcId::L3Outside),
            _ => {}
        }
        let digits = t.strip_prefix('L').ok_or_else(bad)?;
        let mut ds = digits.chars();
        let (edge, piece) = match (ds.next(), ds.next(), ds.next()) {
            (Some(e), Some(p), None) => (
                e.to_digit(10).ok_or_else(bad)? as u8,
                p.to_digit(10).ok_or_else(bad)? as u8,
            ),
            _ => return Err(bad()),
        };
        if !(1..=4).contains(&edge) || piece == 0 || piece > ArcId::pieces(edge) {
            return Err(bad());
        }
        Ok(ArcId::L { edge, piece })
    }
}

/// The loop word of an arc, as tabulated for the wedge diagram.
pub fn edge_loop_word(arc: ArcId) -> Result<Word, GroupError> {
    let text = match arc {
        ArcId::L { edge: 1, piece: 1 } => "c",
        ArcId::L { edge: 1, piece: 2 } => "ece'",
        ArcId::L { edge: 2, piece: 1 } => "ac'da'",
        ArcId::L { edge: 2, piece: 2 } => "c'd",
        ArcId::L { edge: 2, piece: 3 } => "ec'de'",
        ArcId::L { edge: 3, piece: 2 } => "c'b",
        ArcId::L { edge: 3, piece: 3 } => "d'bc'd",
        ArcId::L { edge: 4, piece: 1 } => "ad'cb'a'",
        ArcId::L { edge: 4, piece: 2 } => "d'cb'",
        ArcId::S1 => "ad'ca'c'",
        ArcId::S2 => "bc'ece'",
        ArcId::L3Outside => "bc'",
        other => return Err(GroupError::NotTabulated(other)),
    };
    Ok(text.parse().expect("tabulated words are well formed"))
}
