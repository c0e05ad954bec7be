//! Crystal-basis combinatorics for tensor powers of the `(1/2, 1/2)`
//! representation of `U_{q→0}(sl(2) ⊕ sl(2))`.
//!
//! A word of length `n` carries one sign sequence per `sl(2)` factor. The
//! Kashiwara operators act on each factor through the signature rule: adjacent
//! `(+, -)` pairs cancel, `f̃` flips the leftmost surviving `+` and `ẽ` flips
//! the rightmost surviving `-`. The two factors never interact.

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half::HalfInt;

/// The `J_3 = ±1/2` label of a single `sl(2)` factor.
///
/// `Plus` orders before `Minus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    H,
    V,
}

/// Result of the signature rule on a single sign sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    /// Surviving minus signs (all before the surviving plus signs).
    pub minus: usize,
    /// Surviving plus signs.
    pub plus: usize,
    /// Zero-based positions of the survivors, in order.
    pub survivors: Vec<usize>,
}

/// Cancels adjacent `(+, -)` pairs until none remain.
pub fn reduce_signature(signs: &[Sign]) -> Signature {
    // Stack of unmatched plus positions; a minus cancels the nearest one.
    let mut pending_plus: Vec<usize> = Vec::new();
    let mut surviving_minus: Vec<usize> = Vec::new();
    for (pos, sign) in signs.iter().enumerate() {
        match sign {
            Sign::Plus => pending_plus.push(pos),
            Sign::Minus => {
                if pending_plus.pop().is_none() {
                    surviving_minus.push(pos);
                }
            }
        }
    }
    let minus = surviving_minus.len();
    let plus = pending_plus.len();
    let mut survivors = surviving_minus;
    survivors.extend(pending_plus);
    Signature {
        minus,
        plus,
        survivors,
    }
}

/// A basis state of the `n`-fold tensor power: one sign per factor and letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorWord {
    h: Vec<Sign>,
    v: Vec<Sign>,
}

impl TensorWord {
    pub fn new(h: Vec<Sign>, v: Vec<Sign>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::InvalidWord("empty word".into()));
        }
        if h.len() != v.len() {
            return Err(Error::InvalidWord(format!(
                "H has {} signs but V has {}",
                h.len(),
                v.len()
            )));
        }
        Ok(TensorWord { h, v })
    }

    /// Builds a word from `(h, v)` letter pairs.
    pub fn from_letters(letters: &[(Sign, Sign)]) -> Result<Self> {
        let (h, v) = letters.iter().copied().unzip();
        TensorWord::new(h, v)
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn signs(&self, axis: Axis) -> &[Sign] {
        match axis {
            Axis::H => &self.h,
            Axis::V => &self.v,
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = (Sign, Sign)> + '_ {
        self.h.iter().copied().zip(self.v.iter().copied())
    }

    fn signs_mut(&mut self, axis: Axis) -> &mut Vec<Sign> {
        match axis {
            Axis::H => &mut self.h,
            Axis::V => &mut self.v,
        }
    }

    /// All `4^n` words in letter-lexicographic order.
    pub fn all(n: usize) -> Vec<TensorWord> {
        const LETTERS: [(Sign, Sign); 4] = [
            (Sign::Plus, Sign::Plus),
            (Sign::Plus, Sign::Minus),
            (Sign::Minus, Sign::Plus),
            (Sign::Minus, Sign::Minus),
        ];
        let mut words = vec![Vec::new()];
        for _ in 0..n {
            words = words
                .into_iter()
                .flat_map(|prefix: Vec<(Sign, Sign)>| {
                    LETTERS.iter().map(move |&l| {
                        let mut w = prefix.clone();
                        w.push(l);
                        w
                    })
                })
                .collect();
        }
        words
            .iter()
            .map(|letters| TensorWord::from_letters(letters).expect("n >= 1"))
            .collect()
    }
}

/// Letter-by-letter comparison with `(+,+) < (+,-) < (-,+) < (-,-)`.
impl Ord for TensorWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters()
            .cmp(other.letters())
            .then(self.len().cmp(&other.len()))
    }
}

impl PartialOrd for TensorWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TensorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h: String = self.h.iter().map(|s| s.symbol()).collect();
        let v: String = self.v.iter().map(|s| s.symbol()).collect();
        write!(f, "H[{h}] V[{v}]")
    }
}

/// `(J_{3,H}, J_{3,V})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub j3_h: HalfInt,
    pub j3_v: HalfInt,
}

impl Weight {
    pub fn get(&self, axis: Axis) -> HalfInt {
        match axis {
            Axis::H => self.j3_h,
            Axis::V => self.j3_v,
        }
    }
}

/// An irreducible component `(J_H, J_V)` with its copy index (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IrrepLabel {
    pub j_h: HalfInt,
    pub j_v: HalfInt,
    pub copy: u32,
}

impl IrrepLabel {
    pub fn dimension(&self) -> usize {
        ((self.j_h.twice() + 1) * (self.j_v.twice() + 1)) as usize
    }
}

fn axis_weight(signs: &[Sign]) -> HalfInt {
    let twice: i32 = signs
        .iter()
        .map(|s| match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        })
        .sum();
    HalfInt::from_twice(twice)
}

pub fn word_weight(w: &TensorWord) -> Weight {
    Weight {
        j3_h: axis_weight(&w.h),
        j3_v: axis_weight(&w.v),
    }
}

/// `f̃` on one axis: flips the leftmost surviving plus.
pub fn lowering(w: &TensorWord, axis: Axis) -> Option<TensorWord> {
    let sig = reduce_signature(w.signs(axis));
    let pos = *sig.survivors.get(sig.minus)?;
    let mut out = w.clone();
    out.signs_mut(axis)[pos] = Sign::Minus;
    Some(out)
}

/// `ẽ` on one axis: flips the rightmost surviving minus.
pub fn raising(w: &TensorWord, axis: Axis) -> Option<TensorWord> {
    let sig = reduce_signature(w.signs(axis));
    if sig.minus == 0 {
        return None;
    }
    let pos = sig.survivors[sig.minus - 1];
    let mut out = w.clone();
    out.signs_mut(axis)[pos] = Sign::Plus;
    Some(out)
}

pub fn is_highest_weight(w: &TensorWord) -> bool {
    raising(w, Axis::H).is_none() && raising(w, Axis::V).is_none()
}

pub fn is_lowest_weight(w: &TensorWord) -> bool {
    lowering(w, Axis::H).is_none() && lowering(w, Axis::V).is_none()
}

/// One connected component of the crystal graph.
#[derive(Clone, Debug)]
pub struct Component {
    pub label: IrrepLabel,
    pub highest: TensorWord,
    pub words: Vec<TensorWord>,
}

/// Decomposition of the `n`-fold tensor power into irreducible components.
#[derive(Clone, Debug)]
pub struct Decomposition {
    n: usize,
    components: Vec<Component>,
    index: BTreeMap<TensorWord, (IrrepLabel, Weight)>,
}

impl Decomposition {
    pub fn word_length(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn get(&self, w: &TensorWord) -> Option<&(IrrepLabel, Weight)> {
        self.index.get(w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TensorWord, &(IrrepLabel, Weight))> {
        self.index.iter()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Number of copies of `(j_h, j_v)`.
    pub fn multiplicity(&self, j_h: HalfInt, j_v: HalfInt) -> usize {
        self.components
            .iter()
            .filter(|c| c.label.j_h == j_h && c.label.j_v == j_v)
            .count()
    }
}

fn component_of(start: &TensorWord) -> Vec<TensorWord> {
    let mut seen = std::collections::BTreeSet::new();
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start.clone());
    while let Some(w) = queue.pop_front() {
        for axis in [Axis::H, Axis::V] {
            for next in [raising(&w, axis), lowering(&w, axis)].into_iter().flatten() {
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Partitions all `4^n` words into crystal components.
///
/// Copies of the same `(J_H, J_V)` are numbered by the letter order of their
/// highest-weight word, `(+,+) < (+,-) < (-,+) < (-,-)`; with nucleotides
/// this is `C < G < U < A`.
pub fn decompose(n: usize) -> Decomposition {
    assert!(n >= 1, "word length must be positive");
    let mut assigned: BTreeMap<TensorWord, ()> = BTreeMap::new();
    let mut raw: Vec<(TensorWord, Vec<TensorWord>)> = Vec::new();
    for w in TensorWord::all(n) {
        if assigned.contains_key(&w) {
            continue;
        }
        let words = component_of(&w);
        let highest: Vec<&TensorWord> = words.iter().filter(|x| is_highest_weight(x)).collect();
        assert_eq!(highest.len(), 1, "component without a unique highest weight");
        let highest = highest[0].clone();
        for x in &words {
            assigned.insert(x.clone(), ());
        }
        raw.push((highest, words));
    }

    raw.sort_by(|a, b| a.0.cmp(&b.0));
    let mut copies: BTreeMap<(HalfInt, HalfInt), u32> = BTreeMap::new();
    let mut components = Vec::with_capacity(raw.len());
    let mut index = BTreeMap::new();
    for (highest, words) in raw {
        let top = word_weight(&highest);
        let copy = copies.entry((top.j3_h, top.j3_v)).or_insert(0);
        *copy += 1;
        let label = IrrepLabel {
            j_h: top.j3_h,
            j_v: top.j3_v,
            copy: *copy,
        };
        for w in &words {
            index.insert(w.clone(), (label, word_weight(w)));
        }
        components.push(Component {
            label,
            highest,
            words,
        });
    }

    Decomposition {
        n,
        components,
        index,
    }
}
