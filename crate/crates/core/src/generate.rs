//! Seeded graph families with lengths drawn uniformly from [0.5, 2).

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conditions::VertexCondition;
use crate::error::{Error, Result};
use crate::graph::{MetricGraph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Centre 0 with edges 0 → i for i = 1..=d.
    Star(usize),
    /// n vertices on one cycle.
    Cycle(usize),
    /// A loop at vertex 0 and an edge 0 → 1.
    Lasso,
    /// Loops at vertices 0 and 1 joined by the edge 0 → 1.
    Glasses,
    RandomTree(usize),
    /// A random tree on n vertices plus β edges between random distinct vertices.
    Random { betti: usize, vertices: usize },
}

impl Family {
    /// `star:3`, `cycle:4`, `lasso`, `glasses`, `tree:6`, `random:2:5`.
    pub fn parse(text: &str) -> Result<Family> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .ok_or_else(|| Error::Parse(format!("family {text:?} needs a size")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad size in {text:?}")))
        };
        let family = match parts[0] {
            "star" => Family::Star(num(1)?),
            "cycle" => Family::Cycle(num(1)?),
            "lasso" => Family::Lasso,
            "glasses" => Family::Glasses,
            "tree" => Family::RandomTree(num(1)?),
            "random" => Family::Random { betti: num(1)?, vertices: num(2)? },
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        };
        let ok = match family {
            Family::Star(d) => d >= 1,
            Family::Cycle(n) => n >= 1,
            Family::RandomTree(n) => n >= 2,
            Family::Random { betti, vertices } => vertices >= 2 || (vertices == 1 && betti == 0),
            _ => true,
        };
        if !ok {
            return Err(Error::Parse(format!("family {text:?} is too small")));
        }
        Ok(family)
    }
}

pub fn generate(family: Family, seed: u64) -> MetricGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, pairs): (usize, Vec<(usize, usize)>) = match family {
        Family::Star(d) => (d + 1, (1..=d).map(|i| (0, i)).collect()),
        Family::Cycle(n) => (n, (0..n).map(|i| (i, (i + 1) % n)).collect()),
        Family::Lasso => (2, vec![(0, 0), (0, 1)]),
        Family::Glasses => (2, vec![(0, 0), (0, 1), (1, 1)]),
        Family::RandomTree(n) => (n, tree_pairs(&mut rng, n)),
        Family::Random { betti, vertices } => {
            let mut pairs = tree_pairs(&mut rng, vertices);
            for _ in 0..betti {
                let a = rng.random_range(0..vertices);
                let mut b = rng.random_range(0..vertices - 1);
                if b >= a {
                    b += 1;
                }
                pairs.push((a, b));
            }
            (vertices, pairs)
        }
    };
    let vertices = (0..n as u64).map(|id| Vertex { id, condition: VertexCondition::NeumannKirchhoff }).collect();
    let edges = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| (i as u64, a as u64, b as u64, rng.random_range(0.5..2.0)))
        .collect();
    MetricGraph::new(vertices, edges).expect("generated graphs are valid")
}

fn tree_pairs(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (rng.random_range(0..i), i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_have_expected_shape() {
        let s = generate(Family::Star(3), 0);
        assert_eq!((s.edge_count(), s.degree(0)), (3, 3));
        assert_eq!(generate(Family::Glasses, 1).betti(), 2);
        assert_eq!(generate(Family::Lasso, 1).betti(), 1);
        assert_eq!(generate(Family::Cycle(4), 1).betti(), 1);
        for seed in 0..20 {
            let g = generate(Family::Random { betti: 1, vertices: 5 }, seed);
            assert_eq!(g.betti(), 1);
            assert!(g.is_connected());
            let t = generate(Family::RandomTree(6), seed);
            assert_eq!((t.betti(), t.is_connected()), (0, true));
            assert!(g.edges().iter().all(|e| (0.5..2.0).contains(&e.length)));
        }
    }

    #[test]
    fn seeds_are_deterministic() {
        let a = generate(Family::Random { betti: 2, vertices: 4 }, 7);
        assert_eq!(a, generate(Family::Random { betti: 2, vertices: 4 }, 7));
        assert_ne!(a, generate(Family::Random { betti: 2, vertices: 4 }, 8));
    }

    #[test]
    fn parses_family_names() {
        assert_eq!(Family::parse("random:2:5").unwrap(), Family::Random { betti: 2, vertices: 5 });
        assert_eq!(Family::parse("glasses").unwrap(), Family::Glasses);
        assert!(Family::parse("star").is_err());
        assert!(Family::parse("tree:1").is_err());
    }
}
