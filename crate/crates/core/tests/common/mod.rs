//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use faithcheck::distribution::ratio;
use faithcheck::oracle::Matrix;
use faithcheck::{Dag, NodeSet, Rational};
use num_traits::{One, Zero};

/// Labeled DAG counts from the inclusion-exclusion recurrence
/// a(n) = Σ_{k=1..n} (-1)^(k+1) C(n,k) 2^(k(n-k)) a(n-k).
pub fn labeled_dag_count(n: usize) -> i128 {
    let mut a = vec![1i128];
    for m in 1..=n {
        let mut total = 0i128;
        let mut binom = 1i128;
        for k in 1..=m {
            binom = binom * (m - k + 1) as i128 / k as i128;
            let term = binom * (1i128 << (k * (m - k))) * a[m - k];
            total += if k % 2 == 1 { term } else { -term };
        }
        a.push(total);
    }
    a[n]
}

/// d-separation via the moralized ancestral graph: `x` and `y` are separated
/// by `s` iff every undirected path between them in the moral graph of
/// An({x, y} ∪ s) passes through `s`.
pub fn moral_separated(g: &Dag, x: usize, y: usize, s: NodeSet) -> bool {
    let n = g.len();
    let mut keep = s.with(x).with(y);
    loop {
        let mut next = keep;
        for v in keep {
            next = next.union(g.parent_set(v));
        }
        if next == keep {
            break;
        }
        keep = next;
    }
    let mut adj = vec![vec![false; n]; n];
    for c in keep {
        let ps = g.parent_set(c).to_vec();
        for &p in &ps {
            adj[p][c] = true;
            adj[c][p] = true;
        }
        for (i, &a) in ps.iter().enumerate() {
            for &b in &ps[i + 1..] {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
    }
    let mut seen = NodeSet::singleton(x);
    let mut stack = vec![x];
    while let Some(v) = stack.pop() {
        for w in keep {
            if adj[v][w] && !seen.contains(w) && !s.contains(w) {
                if w == y {
                    return false;
                }
                seen.insert(w);
                stack.push(w);
            }
        }
    }
    true
}

/// Solves `a · v = b` exactly by Gaussian elimination; `None` if singular.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let d = &f * &a[col][c];
                    a[r][c] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Zero partial covariance through the Schur complement
/// Σ_xy − Σ_xS Σ_SS⁻¹ Σ_Sy.
pub fn schur_partial_zero(cov: &Matrix, x: usize, y: usize, s: NodeSet) -> bool {
    let idx = s.to_vec();
    let sub: Vec<Vec<Rational>> = idx.iter().map(|&i| idx.iter().map(|&j| cov[i][j].clone()).collect()).collect();
    let rhs: Vec<Rational> = idx.iter().map(|&i| cov[i][y].clone()).collect();
    let w = solve(sub, rhs).expect("positive definite");
    let mut r = cov[x][y].clone();
    for (k, &i) in idx.iter().enumerate() {
        r -= &cov[x][i] * &w[k];
    }
    r.is_zero()
}

/// Exact joint of a binary structural model given as a function from the
/// independent exogenous bits to the observed bits, with the exogenous bit
/// probabilities. Returns P(observed = event) by full enumeration.
pub fn sem_probability(p_exo: &[Rational], mechanism: impl Fn(&[u8]) -> Vec<u8>, event: &[(usize, u8)]) -> Rational {
    let k = p_exo.len();
    let mut total = Rational::zero();
    for code in 0..1usize << k {
        let bits: Vec<u8> = (0..k).map(|i| ((code >> i) & 1) as u8).collect();
        let mut w = Rational::one();
        for (i, &b) in bits.iter().enumerate() {
            w *= if b == 1 { p_exo[i].clone() } else { Rational::one() - &p_exo[i] };
        }
        let obs = mechanism(&bits);
        if event.iter().all(|&(v, val)| obs[v] == val) {
            total += w;
        }
    }
    total
}

pub fn half() -> Rational {
    ratio(1, 2)
}

/// Whether the true graph has `Y` as a non-collider on some path
/// `⟨X, Y, Z⟩` with `X ∈ left`, `Z ∈ right`.
pub fn has_noncollider_path(g: &Dag, y: usize, left: NodeSet, right: NodeSet) -> bool {
    left.iter().any(|x| {
        right.iter().any(|z| g.is_adjacent(x, y) && g.is_adjacent(y, z) && !(g.has_edge(x, y) && g.has_edge(z, y)))
    })
}

/// All of `left ∪ right` are parents of `y`.
pub fn is_true_collider(g: &Dag, y: usize, left: NodeSet, right: NodeSet) -> bool {
    left.union(right).is_subset(g.parent_set(y))
}

pub fn cross_nonadjacent(g: &Dag, left: NodeSet, right: NodeSet) -> bool {
    left.iter().all(|x| right.iter().all(|z| !g.is_adjacent(x, z)))
}

/// Independence query by labels.
pub fn indep(o: &faithcheck::Oracle, x: &str, y: &str, given: &[&str]) -> bool {
    use faithcheck::IndependenceOracle;
    let s: NodeSet = given.iter().map(|l| o.index_of(l).unwrap()).collect();
    o.query(o.index_of(x).unwrap(), o.index_of(y).unwrap(), s).unwrap()
}
