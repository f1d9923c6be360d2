//! Chord diagrams: the cyclic order in which semi-branches meet a small
//! circle around the origin, with both ends of each branch joined.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChordError {
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("unknown class label {0:?}")]
    UnknownLabel(String),
    #[error("no diagram data recorded for class {0:?}")]
    NoDiagramData(String),
}

/// A perfect matching on `2n` points of an oriented circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChordDiagram {
    matching: Vec<usize>,
}

impl ChordDiagram {
    pub fn new(matching: Vec<usize>) -> Result<Self, ChordError> {
        let m = matching.len();
        if m == 0 || m % 2 == 1 {
            return Err(ChordError::InvalidMatching(format!("{m} points")));
        }
        for (i, &j) in matching.iter().enumerate() {
            if j >= m || j == i || matching[j] != i {
                return Err(ChordError::InvalidMatching(format!("point {i} maps to {j}")));
            }
        }
        Ok(ChordDiagram { matching })
    }

    /// Reads a word such as `aabccb`, where equal letters are the two ends
    /// of one chord.
    pub fn from_word(word: &str) -> Result<Self, ChordError> {
        let chars: Vec<char> = word.chars().collect();
        let mut matching = vec![usize::MAX; chars.len()];
        for i in 0..chars.len() {
            let others: Vec<usize> = (0..chars.len()).filter(|&j| j != i && chars[j] == chars[i]).collect();
            if others.len() != 1 {
                return Err(ChordError::InvalidMatching(format!("letter {:?} must occur twice", chars[i])));
            }
            matching[i] = others[0];
        }
        Self::new(matching)
    }

    pub fn n(&self) -> usize {
        self.matching.len() / 2
    }

    pub fn matching(&self) -> &[usize] {
        &self.matching
    }

    /// Chord labels along the circle, named in order of first occurrence.
    pub fn word(&self) -> String {
        word_of(&self.matching, (0..self.matching.len()).collect())
    }

    pub fn canonical(&self) -> String {
        canonical_chord(self)
    }
}

impl fmt::Display for ChordDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word())
    }
}

/// Word read along the given order of positions.
fn word_of(matching: &[usize], order: Vec<usize>) -> String {
    let mut label = vec![None; matching.len()];
    let mut next = b'a';
    let mut out = String::with_capacity(order.len());
    for &p in &order {
        let c = match label[p] {
            Some(c) => c,
            None => {
                let c = next as char;
                next += 1;
                label[p] = Some(c);
                label[matching[p]] = Some(c);
                c
            }
        };
        out.push(c);
    }
    out
}

/// The least word over all rotations and reflections.
pub fn canonical_chord(d: &ChordDiagram) -> String {
    let m = d.matching.len();
    let mut best: Option<String> = None;
    for start in 0..m {
        for reflect in [false, true] {
            let order: Vec<usize> =
                (0..m).map(|i| if reflect { (start + m - i) % m } else { (start + i) % m }).collect();
            let w = word_of(&d.matching, order);
            if best.as_ref().is_none_or(|b| w < *b) {
                best = Some(w);
            }
        }
    }
    best.expect("diagrams have points")
}

/// Every perfect matching on `2n` labelled points.
pub fn all_matchings(n: usize) -> Vec<Vec<usize>> {
    fn go(m: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(i) = m.iter().position(|&x| x == usize::MAX) else {
            out.push(m.clone());
            return;
        };
        for j in i + 1..m.len() {
            if m[j] == usize::MAX {
                m[i] = j;
                m[j] = i;
                go(m, out);
                m[i] = usize::MAX;
                m[j] = usize::MAX;
            }
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(&mut vec![usize::MAX; 2 * n], &mut out);
    }
    out
}

/// Canonical words of all diagrams with `n` chords, sorted.
pub fn enumerate_chords(n: usize) -> Vec<String> {
    let codes: BTreeSet<String> = all_matchings(n)
        .into_iter()
        .map(|m| canonical_chord(&ChordDiagram { matching: m }))
        .collect();
    codes.into_iter().collect()
}

/// Labels for the two classes with `μ′ = 0`, which have no recorded data.
pub const UNRECORDED: [&str; 2] = ["O_1", "O_2"];

/// Diagrams recorded for the standard forms with `μ′ = 1, 2`. Curated, not
/// derived: the dual graph forgets where the strict transforms sit.
const TABLE: &[(&str, &[&str])] = &[
    // μ′ = 1: one diagram per form.
    ("A_2", &["aabccb"]),
    ("B_4", &["aabccb"]),
    ("B_1", &["aabcbc"]),
    ("C_2", &["aabcbc"]),
    // μ′ = 2.
    ("B_2", &["aabbcc", "aabccb"]),
    ("C_1", &["aabbcc", "aabccb"]),
    ("C_4", &["aabbcc", "aabccb"]),
    ("D_2", &["aabbcc", "aabccb"]),
    ("B_5", &["aabcbc"]),
    ("C_8", &["aabcbc"]),
    ("B_12", &["aabccb"]),
];

/// Class labels that have recorded diagrams.
pub fn known_classes() -> Vec<&'static str> {
    TABLE.iter().map(|(l, _)| *l).collect()
}

pub fn diagrams_for_class(label: &str) -> Result<Vec<String>, ChordError> {
    if UNRECORDED.contains(&label) {
        return Err(ChordError::NoDiagramData(label.to_string()));
    }
    let (_, words) =
        TABLE.iter().find(|(l, _)| *l == label).ok_or_else(|| ChordError::UnknownLabel(label.to_string()))?;
    words
        .iter()
        .map(|w| ChordDiagram::from_word(w).map(|d| canonical_chord(&d)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial(n: usize) -> usize {
        (1..=n).filter(|i| i % 2 == 1).product()
    }

    /// Orbit count by Burnside's lemma over the dihedral group on 2n points.
    fn burnside(n: usize) -> usize {
        let m = 2 * n;
        let all = all_matchings(n);
        let mut fixed = 0;
        for r in 0..m {
            for reflect in [false, true] {
                let g = |p: usize| if reflect { (r + m - p) % m } else { (r + p) % m };
                fixed += all.iter().filter(|mt| (0..m).all(|p| g(mt[p]) == mt[g(p)])).count();
            }
        }
        assert_eq!(fixed % (2 * m), 0);
        fixed / (2 * m)
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_chords(1), vec!["aa"]);
        assert_eq!(enumerate_chords(2).len(), 2);
        assert_eq!(enumerate_chords(3).len(), 5);
        assert!(enumerate_chords(0).is_empty());
    }

    #[test]
    fn burnside_cross_check() {
        for n in 1..=5 {
            assert_eq!(all_matchings(n).len(), double_factorial(2 * n));
            assert_eq!(enumerate_chords(n).len(), burnside(n), "n = {n}");
        }
    }

    #[test]
    fn canonical_is_orbit_invariant_and_separating() {
        for n in 1..=4 {
            let m = 2 * n;
            for mt in all_matchings(n) {
                let d = ChordDiagram::new(mt.clone()).unwrap();
                let c = canonical_chord(&d);
                for r in 0..m {
                    for reflect in [false, true] {
                        let g = |p: usize| if reflect { (r + m - p) % m } else { (r + p) % m };
                        let mut image = vec![0; m];
                        for p in 0..m {
                            image[g(p)] = g(mt[p]);
                        }
                        assert_eq!(canonical_chord(&ChordDiagram::new(image).unwrap()), c);
                    }
                }
                // The canonical word decodes back into the same orbit.
                let back = ChordDiagram::from_word(&c).unwrap();
                assert_eq!(canonical_chord(&back), c);
            }
            // Invariance plus one code per orbit means codes separate orbits.
            assert_eq!(enumerate_chords(n).len(), burnside(n));
        }
    }

    #[test]
    fn crossing_and_nested_differ() {
        let crossing = ChordDiagram::from_word("abab").unwrap();
        let nested = ChordDiagram::from_word("abba").unwrap();
        assert_ne!(canonical_chord(&crossing), canonical_chord(&nested));
        assert_eq!(canonical_chord(&nested), canonical_chord(&ChordDiagram::from_word("aabb").unwrap()));
    }

    #[test]
    fn reflection_has_equal_code() {
        let d = ChordDiagram::from_word("abcacb").unwrap();
        let r: String = "abcacb".chars().rev().collect();
        assert_eq!(canonical_chord(&d), canonical_chord(&ChordDiagram::from_word(&r).unwrap()));
    }

    #[test]
    fn invalid_matchings() {
        assert!(ChordDiagram::new(vec![0, 1]).is_err());
        assert!(ChordDiagram::new(vec![1, 2, 0]).is_err());
        assert!(ChordDiagram::from_word("aab").is_err());
    }

    #[test]
    fn curated_table() {
        assert_eq!(diagrams_for_class("B_12").unwrap().len(), 1);
        assert_eq!(diagrams_for_class("B_2").unwrap().len(), 2);
        assert_eq!(diagrams_for_class("A_2").unwrap(), diagrams_for_class("B_4").unwrap());
        assert!(matches!(diagrams_for_class("O_1"), Err(ChordError::NoDiagramData(_))));
        assert!(matches!(diagrams_for_class("Z_9"), Err(ChordError::UnknownLabel(_))));
        let three = enumerate_chords(3);
        for label in known_classes() {
            for d in diagrams_for_class(label).unwrap() {
                assert!(three.contains(&d), "{label}: {d}");
            }
        }
    }

    #[test]
    fn recorded_words_are_already_canonical() {
        for w in ["aabbcc", "aabccb", "aabcbc"] {
            assert_eq!(canonical_chord(&ChordDiagram::from_word(w).unwrap()), w);
        }
    }
}
