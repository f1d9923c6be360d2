//! Seeded random resolutions, used to fuzz the invariance properties.
//!
//! The walk follows an embedded resolution. A branch that is still singular,
//! or still tangent to another branch, sits at a pending point: either a
//! free point of one curve or the crossing of two curves. Blowing a pending
//! point up puts its branches on the new curve, where they may separate,
//! stay together, or move to one of its crossings. Other blow-ups are taken
//! uniformly at random. Without pending points every walk would start from
//! smooth transversal branches and never leave `μ′ = 0`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{DualGraph, Parity};
use crate::moves::{self, Move};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The first blow-up at the origin: one odd curve carrying all `n` branches.
pub fn first_blow_up(n: usize) -> DualGraph {
    let mut g = DualGraph::new();
    g.add_vertex("v1", Parity::Odd).expect("fresh graph");
    for i in 1..=n {
        g.add_branch(&format!("b{i}"), "v1").expect("fresh branch");
    }
    g
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Point {
    Free(String),
    Crossing(String, String),
}

impl Point {
    fn is_edge(&self, a: &str, b: &str) -> bool {
        matches!(self, Point::Crossing(x, y) if (x == a && y == b) || (x == b && y == a))
    }
}

type Pending = Vec<(Point, Vec<String>)>;

/// Places the branches of a blown-up point on the new curve `w`, which
/// crosses the old curves in `sides`, and returns the points that are still
/// singular. At most `slots` such points are created; branches that do not
/// stay pending are transversal to `w` at distinct free points.
fn scatter<R: Rng>(branches: Vec<String>, w: &str, sides: &[String], slots: usize, rng: &mut R) -> Pending {
    let groups: Vec<Vec<String>> = if branches.len() >= 2 && rng.gen_bool(0.5) {
        vec![branches]
    } else {
        let mut gs: Vec<Vec<String>> = vec![Vec::new(); branches.len()];
        for b in branches {
            let i = rng.gen_range(0..gs.len());
            gs[i].push(b);
        }
        gs.retain(|g| !g.is_empty());
        gs
    };
    let mut out: Pending = Vec::new();
    for group in groups {
        let point = if !sides.is_empty() && rng.gen_bool(0.3) {
            Point::Crossing(w.to_string(), sides[rng.gen_range(0..sides.len())].clone())
        } else {
            Point::Free(w.to_string())
        };
        let singular = group.len() >= 2 || matches!(point, Point::Crossing(..)) || rng.gen_bool(0.3);
        // Two groups at one crossing are at the same point.
        if let Some(same) = out.iter_mut().find(|(p, _)| matches!(p, Point::Crossing(..)) && *p == point) {
            same.1.extend(group);
        } else if singular && out.len() < slots {
            out.push((point, group));
        }
    }
    out
}

fn attach_all(g: &mut DualGraph, branches: &[String], w: usize) {
    for b in branches {
        let i = g.branch_index(b).expect("known branch");
        g.branches[i].attach = Some(w);
    }
}

/// A good resolution of `n` branches after the first blow-up and `steps`
/// further point blow-ups, so it has `steps + 1` curves. Deterministic for a
/// given `(n, steps, seed)`.
pub fn random_resolution(n: usize, steps: usize, seed: u64) -> DualGraph {
    let mut rng = rng(seed);
    let mut g = first_blow_up(n);
    let all: Vec<String> = (1..=n).map(|i| format!("b{i}")).collect();
    let mut pending: Pending = Vec::new();
    pending.extend(scatter(all, "v1", &[], steps, &mut rng));
    for remaining in (0..steps).rev() {
        let forced = pending.len() > remaining;
        if !pending.is_empty() && (forced || rng.gen_bool(0.5)) {
            let (point, branches) = pending.swap_remove(rng.gen_range(0..pending.len()));
            let (mv, sides) = match &point {
                Point::Free(v) => (Move::BlowUpFree(v.clone()), vec![v.clone()]),
                Point::Crossing(a, b) => (Move::BlowUpEdge(a.clone(), b.clone()), vec![a.clone(), b.clone()]),
            };
            g = moves::apply(&g, &mv).expect("pending points lie on the graph");
            let w = g.vertex_count() - 1;
            let w_id = g.vertex_id(w).to_string();
            attach_all(&mut g, &branches, w);
            let slots = remaining - pending.len();
            pending.extend(scatter(branches, &w_id, &sides, slots, &mut rng));
        } else {
            let options: Vec<Move> = moves::blow_ups(&g)
                .into_iter()
                .filter(|m| match m {
                    Move::BlowUpBranch(b) => !pending.iter().any(|(_, bs)| bs.contains(b)),
                    Move::BlowUpEdge(a, b) => !pending.iter().any(|(p, _)| p.is_edge(a, b)),
                    _ => true,
                })
                .collect();
            let mv = options.choose(&mut rng).expect("a curve always admits a blow-up");
            g = moves::apply(&g, mv).expect("blow-ups are always applicable");
        }
    }
    debug_assert!(pending.is_empty());
    g
}
