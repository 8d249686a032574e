//! Words in a free group, cyclic words and Whitehead automorphisms.
//!
//! Letters are nonzero integers: `i` is the i-th generator, `-i` its inverse.
//! Text form uses `a, b, c, ...` with upper case for inverses; `1` is the
//! empty word.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

pub type Letter = i32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("letter '{0}' is outside an alphabet of rank {1}")]
    OutOfAlphabet(char, usize),
    #[error("invalid character '{0}' in word")]
    BadChar(char),
    #[error("the trivial word has no cyclic form")]
    Trivial,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Letter>);

pub fn letter_char(l: Letter) -> char {
    let base = (b'a' + (l.unsigned_abs() as u8 - 1)) as char;
    if l > 0 {
        base
    } else {
        base.to_ascii_uppercase()
    }
}

pub fn format_letters(w: &[Letter]) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    w.iter().map(|&l| letter_char(l)).collect()
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_letters(&self.0))
    }
}

impl Word {
    pub fn parse(s: &str, rank: usize) -> Result<Word, WordError> {
        let mut out = Vec::new();
        for ch in s.chars() {
            if ch == '1' || ch.is_whitespace() || ch == '.' {
                continue;
            }
            if !ch.is_ascii_alphabetic() {
                return Err(WordError::BadChar(ch));
            }
            let idx = (ch.to_ascii_lowercase() as u8 - b'a') as usize + 1;
            if idx > rank {
                return Err(WordError::OutOfAlphabet(ch, rank));
            }
            let l = idx as Letter;
            out.push(if ch.is_ascii_uppercase() { -l } else { l });
        }
        Ok(Word(reduce(&out)))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(inverse(&self.0))
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word(concat_reduce(&self.0, &other.0))
    }

    pub fn rank_needed(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }
}

pub fn reduce(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn inverse(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| -l).collect()
}

pub fn concat_reduce(a: &[Letter], b: &[Letter]) -> Vec<Letter> {
    let mut out = reduce(a);
    for &l in b {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Splits a word as `u c u^-1` with `c` cyclically reduced; returns `(u, c)`.
pub fn cyclic_split(w: &[Letter]) -> (Vec<Letter>, Vec<Letter>) {
    let w = reduce(w);
    let mut i = 0;
    let mut j = w.len();
    while j > i + 1 && w[i] == -w[j - 1] {
        i += 1;
        j -= 1;
    }
    (w[..i].to_vec(), w[i..j].to_vec())
}

pub fn cyclic_reduce(w: &[Letter]) -> Vec<Letter> {
    cyclic_split(w).1
}

/// Sort key realising the order `a < A < b < B < ...`.
pub fn letter_key(l: Letter) -> u32 {
    2 * l.unsigned_abs() - 1 + u32::from(l < 0)
}

fn cmp_words(a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
    a.iter().map(|&l| letter_key(l)).cmp(b.iter().map(|&l| letter_key(l)))
}

pub fn rotate<T: Clone>(w: &[T], k: usize) -> Vec<T> {
    let mut r = w[k..].to_vec();
    r.extend_from_slice(&w[..k]);
    r
}

/// Least rotation of a cyclically reduced word, orientation kept.
pub fn least_rotation(c: &[Letter]) -> Vec<Letter> {
    let mut best = c.to_vec();
    for k in 1..c.len() {
        let r = rotate(c, k);
        if cmp_words(&r, &best).is_lt() {
            best = r;
        }
    }
    best
}

/// Canonical representative of the conjugacy class of `w` (orientation kept).
pub fn conjugacy_canonical(w: &[Letter]) -> Vec<Letter> {
    least_rotation(&cyclic_reduce(w))
}

pub fn is_conjugate(u: &[Letter], v: &[Letter]) -> bool {
    conjugacy_canonical(u) == conjugacy_canonical(v)
}

/// Minimal period of a cyclic sequence: smallest `p | n` with `s[i] = s[i+p]`.
pub fn minimal_period<T: PartialEq>(s: &[T]) -> usize {
    let n = s.len();
    (1..=n).find(|&p| n % p == 0 && (0..n).all(|i| s[i] == s[(i + p) % n])).unwrap_or(n)
}

/// A cyclically reduced word up to rotation and inversion, stored in its
/// least form under the order `a < A < b < B < ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    pub fn new(w: &[Letter]) -> Result<CyclicWord, WordError> {
        let c = cyclic_reduce(w);
        if c.is_empty() {
            return Err(WordError::Trivial);
        }
        let a = least_rotation(&c);
        let b = least_rotation(&inverse(&c));
        Ok(CyclicWord(if cmp_words(&b, &a).is_lt() { b } else { a }))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(r, k)` with `self = r^k` and `r` not a proper power.
    pub fn root(&self) -> (CyclicWord, usize) {
        let p = minimal_period(&self.0);
        let r = CyclicWord::new(&self.0[..p]).expect("nonempty root");
        (r, self.0.len() / p)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_letters(&self.0))
    }
}

/// Root of a word up to conjugacy: `w ~ r^k` with `r` cyclically reduced and
/// not a proper power. The orientation of `w` is kept.
pub fn root(w: &[Letter]) -> Result<(Vec<Letter>, usize), WordError> {
    let c = cyclic_reduce(w);
    if c.is_empty() {
        return Err(WordError::Trivial);
    }
    let p = minimal_period(&c);
    Ok((c[..p].to_vec(), c.len() / p))
}

/// True when the two words lie in different conjugacy classes, a class and
/// its inverse class counting as one.
pub fn are_distinct_classes(u: &[Letter], v: &[Letter]) -> bool {
    match (CyclicWord::new(u), CyclicWord::new(v)) {
        (Ok(a), Ok(b)) => a != b,
        (Err(_), Err(_)) => false,
        _ => true,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Whitehead {
    /// Generator `i` (1-based) goes to `images[i-1]`, a signed letter.
    Permutation { images: Vec<Letter> },
    /// The pair `(A, a)`: a letter `y` other than `a^±1` becomes
    /// `[a^-1 if y^-1 in A] y [a if y in A]`.
    Multiplier { set: Vec<Letter>, letter: Letter },
}

impl Whitehead {
    pub fn apply(&self, w: &[Letter]) -> Vec<Letter> {
        let mut out = Vec::with_capacity(w.len() + 4);
        let push = |out: &mut Vec<Letter>, l: Letter| {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        };
        match self {
            Whitehead::Permutation { images } => {
                for &l in w {
                    let img = images[l.unsigned_abs() as usize - 1];
                    push(&mut out, if l > 0 { img } else { -img });
                }
            }
            Whitehead::Multiplier { set, letter } => {
                let a = *letter;
                for &l in w {
                    if l == a || l == -a {
                        push(&mut out, l);
                        continue;
                    }
                    if set.contains(&-l) {
                        push(&mut out, -a);
                    }
                    push(&mut out, l);
                    if set.contains(&l) {
                        push(&mut out, a);
                    }
                }
            }
        }
        out
    }

    pub fn inverse(&self) -> Whitehead {
        match self {
            Whitehead::Permutation { images } => {
                let mut inv = vec![0; images.len()];
                for (i, &img) in images.iter().enumerate() {
                    let g = (i + 1) as Letter;
                    inv[img.unsigned_abs() as usize - 1] = if img > 0 { g } else { -g };
                }
                Whitehead::Permutation { images: inv }
            }
            Whitehead::Multiplier { set, letter } => {
                let mut s: Vec<Letter> = set.iter().copied().filter(|&l| l != *letter).collect();
                s.push(-letter);
                s.sort_by_key(|&l| letter_key(l));
                Whitehead::Multiplier { set: s, letter: -letter }
            }
        }
    }

    /// All Whitehead multipliers of rank `n` except the identities `({a}, a)`.
    pub fn multipliers(rank: usize) -> Vec<Whitehead> {
        let letters: Vec<Letter> = (1..=rank as Letter).flat_map(|i| [i, -i]).collect();
        let mut out = Vec::new();
        for &a in &letters {
            let others: Vec<Letter> = letters.iter().copied().filter(|&l| l != a && l != -a).collect();
            for mask in 1u32..(1u32 << others.len()) {
                let mut set = vec![a];
                set.extend(others.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &l)| l));
                set.sort_by_key(|&l| letter_key(l));
                out.push(Whitehead::Multiplier { set, letter: a });
            }
        }
        out
    }

    /// All signed permutations of rank `n`.
    pub fn permutations(rank: usize) -> Vec<Whitehead> {
        use itertools::Itertools;
        let mut out = Vec::new();
        for perm in (1..=rank as Letter).permutations(rank) {
            for signs in 0u32..(1u32 << rank) {
                let images = perm.iter().enumerate().map(|(i, &g)| if signs >> i & 1 == 1 { -g } else { g }).collect();
                out.push(Whitehead::Permutation { images });
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Minimized {
    pub length: usize,
    pub word: Vec<Letter>,
    pub sequence: Vec<Whitehead>,
}

const PLATEAU_CAP: usize = 20_000;

/// Minimal cyclic length in the automorphic orbit of `w`.
///
/// Greedy descent over Whitehead multipliers; at each local minimum the
/// same-length orbit is explored (up to a cap) looking for a further descent.
pub fn whitehead_minimize(w: &[Letter], rank: usize) -> Minimized {
    let autos = Whitehead::multipliers(rank);
    let mut cur = cyclic_reduce(w);
    let mut seq = Vec::new();
    loop {
        if let Some((next, a)) = autos.iter().find_map(|a| {
            let c = cyclic_reduce(&a.apply(&cur));
            (c.len() < cur.len()).then(|| (c, a.clone()))
        }) {
            cur = next;
            seq.push(a);
            continue;
        }
        match plateau_descent(&cur, &autos) {
            Some((next, path)) => {
                cur = next;
                seq.extend(path);
            }
            None => break,
        }
    }
    Minimized {
        length: cur.len(),
        word: cur,
        sequence: seq,
    }
}

fn plateau_descent(start: &[Letter], autos: &[Whitehead]) -> Option<(Vec<Letter>, Vec<Whitehead>)> {
    let n = start.len();
    let mut parent: HashMap<Vec<Letter>, Option<(Vec<Letter>, usize)>> = HashMap::new();
    let key0 = conjugacy_canonical(start);
    parent.insert(key0.clone(), None);
    let mut queue = VecDeque::from([key0]);
    while let Some(cur) = queue.pop_front() {
        for (i, a) in autos.iter().enumerate() {
            let c = cyclic_reduce(&a.apply(&cur));
            if c.len() < n {
                let mut path = vec![a.clone()];
                let mut k = cur.clone();
                while let Some(Some((p, j))) = parent.get(&k) {
                    path.push(autos[*j].clone());
                    k = p.clone();
                }
                path.reverse();
                return Some((c, path));
            }
            if c.len() == n && parent.len() < PLATEAU_CAP {
                let key = least_rotation(&c);
                if !parent.contains_key(&key) {
                    parent.insert(key.clone(), Some((cur.clone(), i)));
                    queue.push_back(key);
                }
            }
        }
    }
    None
}

pub fn is_primitive(w: &[Letter], rank: usize) -> bool {
    let c = cyclic_reduce(w);
    !c.is_empty() && whitehead_minimize(&c, rank).length == 1
}
