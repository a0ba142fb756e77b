//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the solver code it is used to check.

#![allow(dead_code, clippy::needless_range_loop)]

use fairdiv::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random instances with integer values in `0..=max_value`.
pub fn random_corpus(
    seed: u64,
    count: usize,
    agents: std::ops::RangeInclusive<usize>,
    items: std::ops::RangeInclusive<usize>,
    max_value: u32,
) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|c| {
            let n = rng.gen_range(agents.clone());
            let m = rng.gen_range(items.clone());
            let v = (0..n)
                .map(|_| {
                    (0..m)
                        .map(|_| rng.gen_range(0..=max_value) as f64)
                        .collect()
                })
                .collect();
            Instance::from_matrix(format!("r{seed}-{c}"), v).unwrap()
        })
        .collect()
}

/// Single item, identical rows, fewer items than agents, and a few
/// hand-picked shapes that stress ties.
pub fn adversarial_corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    let mut push = |id: &str, v: Vec<Vec<f64>>| out.push(Instance::from_matrix(id, v).unwrap());
    for n in 1..=5 {
        push(&format!("single-{n}"), vec![vec![7.0]; n]);
        push(
            &format!("identical-{n}"),
            vec![vec![9.0, 5.0, 5.0, 3.0, 1.0, 1.0, 0.0]; n],
        );
        push(&format!("unit-{n}"), vec![vec![1.0; 2 * n + 1]; n]);
    }
    push(
        "few-items",
        vec![
            vec![5.0, 1.0],
            vec![5.0, 1.0],
            vec![5.0, 1.0],
            vec![2.0, 2.0],
        ],
    );
    push(
        "few-items-3",
        vec![vec![4.0, 4.0], vec![1.0, 9.0], vec![9.0, 1.0]],
    );
    push("empty-row", vec![vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 3.0]]);
    push("no-items", vec![vec![], vec![]]);
    push("one-big", vec![vec![100.0, 1.0, 1.0, 1.0]; 3]);
    push(
        "tight",
        vec![
            vec![3.0, 2.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            vec![3.0, 2.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            vec![3.0, 2.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            vec![3.0, 2.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            vec![3.0, 2.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        ],
    );
    out
}

/// Visit every assignment of `m` items to `n` owners.
pub fn for_each_assignment(n: usize, m: usize, mut f: impl FnMut(&[usize])) {
    if n == 0 {
        return;
    }
    let mut owner = vec![0usize; m];
    loop {
        f(&owner);
        let mut j = 0;
        loop {
            if j == m {
                return;
            }
            owner[j] += 1;
            if owner[j] < n {
                break;
            }
            owner[j] = 0;
            j += 1;
        }
    }
}

/// Maximin share by trying every partition into `n` labelled bundles.
pub fn brute_mms(values: &[f64], n: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for_each_assignment(n, values.len(), |owner| {
        let mut sums = vec![0.0; n];
        for (j, &o) in owner.iter().enumerate() {
            sums[o] += values[j];
        }
        best = best.max(sums.iter().copied().fold(f64::INFINITY, f64::min));
    });
    best
}

/// Best welfare over all integral allocations.
pub fn brute_max_sum(v: &[Vec<f64>]) -> f64 {
    let (n, m) = (v.len(), v.first().map_or(0, Vec::len));
    let mut best = f64::NEG_INFINITY;
    for_each_assignment(n, m, |owner| {
        let s: f64 = owner.iter().enumerate().map(|(j, &o)| v[o][j]).sum();
        best = best.max(s);
    });
    best
}

/// Optimum of `max_x min_i u_i(x)` over complete fractional allocations,
/// through the dual `min_{λ ∈ simplex} Σ_j max_i λ_i v_ij`.
///
/// The dual objective is convex and piecewise linear, so its minimum sits on a
/// vertex of the arrangement of the breakpoint hyperplanes
/// `λ_i v_ij = λ_k v_kj` and the facets `λ_i = 0` inside the simplex. All such
/// vertices are enumerated by solving every choice of `n - 1` hyperplanes
/// together with `Σ λ = 1`.
pub fn maxmin_by_duality(v: &[Vec<f64>]) -> f64 {
    let n = v.len();
    let m = v.first().map_or(0, Vec::len);
    let dual = |lambda: &[f64]| -> f64 {
        (0..m)
            .map(|j| (0..n).map(|i| lambda[i] * v[i][j]).fold(0.0, f64::max))
            .sum()
    };
    if n == 1 {
        return dual(&[1.0]);
    }

    let mut planes: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut row = vec![0.0; n];
        row[i] = 1.0;
        planes.push(row);
    }
    for j in 0..m {
        for i in 0..n {
            for k in i + 1..n {
                if v[i][j] == 0.0 && v[k][j] == 0.0 {
                    continue;
                }
                let mut row = vec![0.0; n];
                row[i] = v[i][j];
                row[k] = -v[k][j];
                planes.push(row);
            }
        }
    }

    let mut best = f64::INFINITY;
    let mut chosen = Vec::new();
    choose(planes.len(), n - 1, 0, &mut chosen, &mut |idx| {
        let mut a: Vec<Vec<f64>> = idx.iter().map(|&p| planes[p].clone()).collect();
        let mut b = vec![0.0; n - 1];
        a.push(vec![1.0; n]);
        b.push(1.0);
        if let Some(lambda) = solve_linear(a, b) {
            if lambda.iter().all(|&x| x >= -1e-12) {
                let lambda: Vec<f64> = lambda.iter().map(|&x| x.max(0.0)).collect();
                best = best.min(dual(&lambda));
            }
        }
    });
    best
}

fn choose(
    total: usize,
    k: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    for p in start..total {
        chosen.push(p);
        choose(total, k, p + 1, chosen, f);
        chosen.pop();
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Does sorted vector `a` beat sorted vector `b` lexicographically, ignoring
/// differences below `tol`?
pub fn lex_beats(a: &[f64], b: &[f64], tol: f64) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > tol {
            return x > y;
        }
    }
    false
}

pub fn sorted_utilities(v: &[Vec<f64>], shares: &[Vec<f64>]) -> Vec<f64> {
    let mut u: Vec<f64> = v
        .iter()
        .zip(shares)
        .map(|(row, x)| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect();
    u.sort_by(f64::total_cmp);
    u
}

/// Random complete fractional allocation: each column is a random point of
/// the simplex, sometimes concentrated on one agent.
pub fn random_fractional(rng: &mut impl Rng, n: usize, m: usize) -> Vec<Vec<f64>> {
    let mut shares = vec![vec![0.0; m]; n];
    for j in 0..m {
        if rng.gen_bool(0.3) {
            shares[rng.gen_range(0..n)][j] = 1.0;
            continue;
        }
        let w: Vec<f64> = (0..n).map(|_| -rng.gen_range(1e-9f64..1.0).ln()).collect();
        let s: f64 = w.iter().sum();
        for i in 0..n {
            shares[i][j] = w[i] / s;
        }
    }
    shares
}
