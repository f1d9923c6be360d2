use germ_graph::gf2::{self, Gf2Matrix};
use germ_graph::invariants;
use germ_graph::moves::{self, Move};
use germ_graph::random::{random_resolution, rng};
use germ_graph::text::{parse_graph, to_text};
use germ_graph::DualGraph;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn resolution() -> impl Strategy<Value = DualGraph> {
    (1usize..=4, 0usize..=18, any::<u64>()).prop_map(|(n, steps, seed)| random_resolution(n, steps, seed))
}

/// Renames every vertex through a shuffled numbering.
fn relabel(g: &DualGraph, seed: u64) -> DualGraph {
    let mut names: Vec<usize> = (0..g.vertex_count()).collect();
    names.shuffle(&mut rng(seed));
    let text = to_text(g, false);
    let rename = |id: &str| format!("x{}", names[g.vertex_index(id).unwrap()]);
    let mut lines: Vec<String> = text
        .lines()
        .map(|line| {
            let w: Vec<&str> = line.split_whitespace().collect();
            match w.as_slice() {
                ["vertex", id, p] => format!("vertex {} {p}", rename(id)),
                ["edge", a, b] => format!("edge {} {}", rename(b), rename(a)),
                ["branch", id, v] => format!("branch {id} {}", rename(v)),
                _ => line.to_string(),
            }
        })
        .collect();
    lines.shuffle(&mut rng(seed ^ 1));
    // Vertices must be declared before use.
    lines.sort_by_key(|l| !l.starts_with("vertex"));
    parse_graph(&lines.join("\n")).unwrap()
}

fn permutation_det(m: &Gf2Matrix) -> bool {
    fn count(m: &Gf2Matrix, row: usize, used: &mut Vec<bool>) -> u32 {
        if row == m.dim() {
            return 1;
        }
        let mut total = 0;
        for col in 0..m.dim() {
            if !used[col] && m.get(row, col) {
                used[col] = true;
                total ^= count(m, row + 1, used);
                used[col] = false;
            }
        }
        total
    }
    count(m, 0, &mut vec![false; m.dim()]) == 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn resolutions_are_valid_and_contractible(g in resolution()) {
        prop_assert!(g.is_valid());
        prop_assert!(gf2::is_contractible(&g).unwrap());
    }

    #[test]
    fn blow_ups_preserve_invariants(g in resolution(), pick in any::<prop::sample::Index>()) {
        let options = moves::blow_ups(&g);
        let mv = pick.get(&options);
        let h = moves::apply(&g, mv).unwrap();
        prop_assert!(gf2::intersection_matrix(&h).det());
        prop_assert_eq!(invariants::mu_prime(&g).unwrap(), invariants::mu_prime(&h).unwrap());
        prop_assert!(invariants::same_labeled_invariants(&g, &h).unwrap());
    }

    #[test]
    fn contractions_preserve_invariants(g in resolution()) {
        for mv in moves::contractions(&g) {
            let h = moves::apply(&g, &mv).unwrap();
            prop_assert!(gf2::intersection_matrix(&h).det(), "{mv}");
            prop_assert!(invariants::same_labeled_invariants(&g, &h).unwrap(), "{mv}");
        }
    }

    #[test]
    fn reduce_reaches_a_standard_fixpoint(g in resolution()) {
        let (h, trace) = moves::reduce(&g).unwrap();
        prop_assert!(moves::is_reduced(&h));
        let (ok, violated) = moves::is_standard(&h).unwrap();
        prop_assert!(ok, "violated {violated:?}");
        prop_assert_eq!(h.q_count(), invariants::mu_prime(&h).unwrap());
        prop_assert!(moves::replay(&g, &trace).unwrap().is_isomorphic(&h, true));
        prop_assert!(moves::reduce(&h).unwrap().1.is_empty());
    }

    #[test]
    fn random_order_reduction_is_standard_too(g in resolution(), seed in any::<u64>()) {
        let (h, _) = moves::reduce_random(&g, &mut rng(seed)).unwrap();
        prop_assert!(moves::is_standard(&h).unwrap().0);
        prop_assert_eq!(invariants::mu_prime(&h).unwrap(), invariants::mu_prime(&g).unwrap());
    }

    #[test]
    fn canonical_code_ignores_vertex_names(g in resolution(), seed in any::<u64>()) {
        let h = relabel(&g, seed);
        prop_assert_eq!(g.canonical_code(true), h.canonical_code(true));
        prop_assert_eq!(to_text(&g, true), to_text(&h, true));
        prop_assert_eq!(invariants::invariant_key(&g).unwrap(), invariants::invariant_key(&h).unwrap());
    }

    #[test]
    fn text_round_trip(g in resolution()) {
        let back = parse_graph(&to_text(&g, false)).unwrap();
        prop_assert_eq!(to_text(&back, false), to_text(&g, false));
    }

    #[test]
    fn det_matches_permutation_expansion(bits in prop::collection::vec(any::<bool>(), 0..=49), n in 0usize..=7) {
        let mut m = Gf2Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if bits.get(i * n + j).copied().unwrap_or(false) {
                    m.set(i, j, true);
                }
            }
        }
        prop_assert_eq!(m.det(), permutation_det(&m));
        prop_assert!(m.rank() <= n);
    }
}

#[test]
fn blow_ups_are_undone_by_contractions() {
    // A blow-up followed by its inverse contraction returns the same graph.
    for seed in 0..50u64 {
        let g = random_resolution(3, 8, seed);
        for mv in moves::blow_ups(&g) {
            let h = moves::apply(&g, &mv).unwrap();
            let back = moves::contractions(&h).into_iter().any(|c| {
                matches!(c, Move::C1(_) | Move::C2(_)) && moves::apply(&h, &c).unwrap().is_isomorphic(&g, true)
            });
            assert!(back, "seed {seed}: {mv}");
        }
    }
}
