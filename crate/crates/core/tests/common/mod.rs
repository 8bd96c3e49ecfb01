//! Independent oracles shared by the integration tests. Everything here is
//! deliberately written against the problem statement, not against the
//! library's own code paths.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use epinet::graph::Graph;

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Largest adjacency eigenvalue from a dense symmetric eigensolver.
pub fn dense_lambda1(g: &Graph) -> f64 {
    let n = g.node_count();
    let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i != j && g.has_edge(i, j) {
            1.0
        } else {
            0.0
        }
    });
    let eigen = nalgebra::SymmetricEigen::new(mat);
    eigen.eigenvalues.iter().cloned().fold(f64::MIN, f64::max)
}

/// Connected components by an independent BFS from every node: two nodes
/// share a component iff their reachable sets coincide.
pub fn bfs_component_sets(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let reach = |start: usize| -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    queue.push_back(v as usize);
                }
            }
        }
        seen
    };
    let mut groups: Vec<(Vec<bool>, Vec<usize>)> = Vec::new();
    for u in 0..n {
        let r = reach(u);
        match groups.iter_mut().find(|(set, _)| *set == r) {
            Some((_, members)) => members.push(u),
            None => groups.push((r, vec![u])),
        }
    }
    groups.into_iter().map(|(_, members)| members).collect()
}

/// Composite Simpson rule (even panel count).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels.is_multiple_of(2));
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let x = a + i as f64 * h;
        acc += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Long-running bisection for the fixed point of `x + exp(-c x) = 1`.
pub fn bisect_giant(c: f64) -> f64 {
    let f = |x: f64| x + (-c * x).exp() - 1.0;
    let (mut lo, mut hi) = (1e-15, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn pow_rational(base: &BigRational, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k {
        acc *= base;
    }
    acc
}

/// Exact final-size distribution of the discrete-time chain by exhaustive
/// enumeration over per-edge attempt outcomes, slot by slot. States repeat,
/// so distributions are memoised on `(removed | infective, infective)`.
pub fn reed_frost_exact(
    g: &Graph,
    initial: &[usize],
    beta: &BigRational,
) -> BTreeMap<usize, BigRational> {
    let n = g.node_count();
    assert!(n <= 20, "exact enumeration is for tiny graphs");
    let mut infective: u32 = 0;
    for &u in initial {
        infective |= 1 << u;
    }
    let mut memo: HashMap<(u32, u32), BTreeMap<usize, BigRational>> = HashMap::new();
    recurse(g, 0, infective, beta, &mut memo)
}

fn recurse(
    g: &Graph,
    removed: u32,
    infective: u32,
    beta: &BigRational,
    memo: &mut HashMap<(u32, u32), BTreeMap<usize, BigRational>>,
) -> BTreeMap<usize, BigRational> {
    if infective == 0 {
        let mut dist = BTreeMap::new();
        dist.insert(removed.count_ones() as usize, BigRational::one());
        return dist;
    }
    if let Some(hit) = memo.get(&(removed, infective)) {
        return hit.clone();
    }
    let n = g.node_count();
    // All attempts of this slot in sorted (infective, neighbour) order.
    let mut attempts: Vec<usize> = Vec::new();
    for v in 0..n {
        if infective & (1 << v) == 0 {
            continue;
        }
        for &u in g.neighbors(v) {
            let u = u as usize;
            if removed & (1 << u) == 0 && infective & (1 << u) == 0 {
                attempts.push(u);
            }
        }
    }
    let next_removed = removed | infective;
    let mut dist: BTreeMap<usize, BigRational> = BTreeMap::new();
    let miss = BigRational::one() - beta;
    for mask in 0..(1u64 << attempts.len()) {
        let mut prob = BigRational::one();
        let mut newly: u32 = 0;
        for (slot, &target) in attempts.iter().enumerate() {
            if mask & (1 << slot) != 0 {
                prob *= beta;
                newly |= 1 << target;
            } else {
                prob *= &miss;
            }
        }
        let tail = recurse(g, next_removed, newly, beta, memo);
        for (size, weight) in tail {
            let entry = dist.entry(size).or_insert_with(BigRational::zero);
            *entry += weight * &prob;
        }
    }
    memo.insert((removed, infective), dist.clone());
    dist
}

/// Exact final-size distribution through the percolation construction:
/// enumerate all 2^m edge subsets and take the union of the components
/// containing the initial infectives.
pub fn percolation_exact(
    g: &Graph,
    initial: &[usize],
    beta: &BigRational,
) -> BTreeMap<usize, BigRational> {
    let n = g.node_count();
    let edges: Vec<(u32, u32)> = g.edges().collect();
    let m = edges.len();
    assert!(m <= 24, "subset enumeration is for tiny graphs");
    let miss = BigRational::one() - beta;
    let beta_pow: Vec<BigRational> = (0..=m).map(|k| pow_rational(beta, k)).collect();
    let miss_pow: Vec<BigRational> = (0..=m).map(|k| pow_rational(&miss, k)).collect();
    let mut dist: BTreeMap<usize, BigRational> = BTreeMap::new();
    for mask in 0..(1u64 << m) {
        let kept = mask.count_ones() as usize;
        let prob = &beta_pow[kept] * &miss_pow[m - kept];
        // Union-find over the kept edges.
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, u: usize) -> usize {
            if parent[u] != u {
                let root = find(parent, parent[u]);
                parent[u] = root;
            }
            parent[u]
        }
        for (slot, &(u, v)) in edges.iter().enumerate() {
            if mask & (1 << slot) != 0 {
                let ru = find(&mut parent, u as usize);
                let rv = find(&mut parent, v as usize);
                if ru != rv {
                    parent[ru] = rv;
                }
            }
        }
        let mut chosen = vec![false; n];
        for &s in initial {
            let root = find(&mut parent, s);
            chosen[root] = true;
        }
        let size = (0..n)
            .filter(|&u| {
                let root = find(&mut parent, u);
                chosen[root]
            })
            .count();
        let entry = dist.entry(size).or_insert_with(BigRational::zero);
        *entry += prob;
    }
    dist
}

/// Total mass of a distribution, for sanity checks.
pub fn total_mass(dist: &BTreeMap<usize, BigRational>) -> BigRational {
    dist.values().fold(BigRational::zero(), |acc, w| acc + w)
}
