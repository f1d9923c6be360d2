//! Linear algebra over the two-element field, sized for intersection matrices.

use crate::graph::{DualGraph, GraphError};

/// Square matrix over GF(2) with bit-packed rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Gf2Matrix { n, words, bits: vec![0; n * words] }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let mut m = Self::zeros(rows.len());
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), rows.len(), "matrix must be square");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x & 1 == 1);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|i| (0..self.n).map(|j| u8::from(self.get(i, j))).collect()).collect()
    }

    /// Gaussian elimination on whole words.
    pub fn rank(&self) -> usize {
        let mut a = self.bits.clone();
        let w = self.words;
        let mut rank = 0;
        for col in 0..self.n {
            let (word, bit) = (col / 64, 1u64 << (col % 64));
            let Some(pivot) = (rank..self.n).find(|&r| a[r * w + word] & bit != 0) else {
                continue;
            };
            if pivot != rank {
                for k in 0..w {
                    a.swap(pivot * w + k, rank * w + k);
                }
            }
            for r in 0..self.n {
                if r != rank && a[r * w + word] & bit != 0 {
                    for k in 0..w {
                        a[r * w + k] ^= a[rank * w + k];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn corank(&self) -> usize {
        self.n - self.rank()
    }

    /// Determinant mod 2; the empty matrix has determinant 1.
    pub fn det(&self) -> bool {
        self.rank() == self.n
    }
}

/// Intersection matrix in vertex-index order: diagonal = parity, off-diagonal
/// = adjacency. Branches do not contribute.
pub fn intersection_matrix(g: &DualGraph) -> Gf2Matrix {
    let mut m = Gf2Matrix::zeros(g.vertex_count());
    for (i, v) in g.vertices().iter().enumerate() {
        m.set(i, i, v.parity.is_odd());
    }
    for &(a, b) in g.edges() {
        if a != b {
            m.set(a, b, true);
            m.set(b, a, true);
        }
    }
    m
}

pub fn det(m: &Gf2Matrix) -> bool {
    m.det()
}

pub fn corank(m: &Gf2Matrix) -> usize {
    m.corank()
}

/// Corank of the intersection matrix. Connectivity is not required.
pub fn mu(g: &DualGraph) -> usize {
    intersection_matrix(g).corank()
}

pub fn is_contractible(g: &DualGraph) -> Result<bool, GraphError> {
    g.ensure_valid()?;
    Ok(intersection_matrix(g).det())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Parity;

    #[test]
    fn small_examples() {
        assert!(Gf2Matrix::from_rows(&[vec![1]]).det());
        let swap = Gf2Matrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert!(swap.det());
        assert_eq!(swap.corank(), 0);
        assert_eq!(Gf2Matrix::from_rows(&[vec![0]]).corank(), 1);
        assert_eq!(Gf2Matrix::from_rows(&[vec![1]]).corank(), 0);
        assert!(Gf2Matrix::zeros(0).det());
        assert_eq!(Gf2Matrix::zeros(0).corank(), 0);
    }

    #[test]
    fn two_q_on_one_vertex_is_singular() {
        let mut g = DualGraph::new();
        g.add_vertex("c", Parity::Even).unwrap();
        g.add_vertex("q1", Parity::Even).unwrap();
        g.add_vertex("q2", Parity::Even).unwrap();
        g.add_edge("c", "q1").unwrap();
        g.add_edge("c", "q2").unwrap();
        assert!(!intersection_matrix(&g).det());
        assert!(!is_contractible(&g).unwrap());

        // Same local picture inside a larger graph.
        g.add_vertex("d", Parity::Odd).unwrap();
        g.add_edge("c", "d").unwrap();
        g.add_branch("b1", "d").unwrap();
        assert!(!is_contractible(&g).unwrap());
    }

    #[test]
    fn graph_matrices() {
        let mut g = DualGraph::new();
        g.add_vertex("a", Parity::Even).unwrap();
        g.add_vertex("b", Parity::Even).unwrap();
        g.add_edge("a", "b").unwrap();
        assert_eq!(intersection_matrix(&g).rows(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(intersection_matrix(&DualGraph::new()).dim(), 0);

        let mut one = DualGraph::new();
        one.add_vertex("a", Parity::Odd).unwrap();
        assert!(is_contractible(&one).unwrap());
        let mut even = DualGraph::new();
        even.add_vertex("a", Parity::Even).unwrap();
        assert!(!is_contractible(&even).unwrap());
        assert_eq!(mu(&even), 1);
        assert_eq!(mu(&DualGraph::new()), 0);
    }

    #[test]
    fn mu_is_additive_over_disjoint_union() {
        let mut g = DualGraph::new();
        g.add_vertex("a", Parity::Even).unwrap();
        g.add_vertex("b", Parity::Even).unwrap();
        // Direct rank computation of the 2x2 zero matrix.
        assert_eq!(Gf2Matrix::zeros(2).corank(), 2);
        assert_eq!(mu(&g), 2);
    }

    #[test]
    fn wide_matrices_use_multiple_words() {
        let n = 130;
        let mut m = Gf2Matrix::zeros(n);
        for i in 0..n {
            m.set(i, i, true);
            if i + 1 < n {
                m.set(i, i + 1, true);
                m.set(i + 1, i, true);
            }
        }
        // Tridiagonal with ones: det over GF(2) follows d_k = d_{k-1} + d_{k-2}.
        let (mut d0, mut d1) = (true, true);
        for _ in 1..n {
            let d2 = d1 ^ d0;
            d0 = d1;
            d1 = d2;
        }
        assert_eq!(m.det(), d1);
        assert!(m.is_symmetric());
    }
}
