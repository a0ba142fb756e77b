//! Synthetic corpora standing in for real division cases.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BenchError;
use crate::model::Instance;

/// Points each agent distributes in the spliddit-style profiles.
pub const POINT_BUDGET: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValuationStyle {
    /// Correlated item popularity, some items ignored, each row rounded to
    /// integers summing to [`POINT_BUDGET`].
    Points,
    /// Independent integers in `0..=100`.
    Uniform100,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorProfile {
    pub name: String,
    /// `(n_agents, weight)` pairs.
    pub agents: Vec<(usize, f64)>,
    /// Inclusive item-count range.
    pub items: (usize, usize),
    pub style: ValuationStyle,
}

impl GeneratorProfile {
    /// `spliddit` (default): 2–7 agents weighted toward small groups, 3–15
    /// items, point-budget rows. `uniform`: 2–7 agents uniformly, raw 0–100
    /// values. `pairs`: two agents. `fixed-N`: exactly `N` agents.
    pub fn named(name: &str) -> Result<Self, BenchError> {
        let spliddit_weights = vec![
            (2, 0.36),
            (3, 0.26),
            (4, 0.16),
            (5, 0.1),
            (6, 0.07),
            (7, 0.05),
        ];
        let profile = match name {
            "spliddit" | "default" => GeneratorProfile {
                name: "spliddit".into(),
                agents: spliddit_weights,
                items: (3, 15),
                style: ValuationStyle::Points,
            },
            "uniform" => GeneratorProfile {
                name: name.into(),
                agents: (2..=7).map(|n| (n, 1.0)).collect(),
                items: (3, 15),
                style: ValuationStyle::Uniform100,
            },
            "pairs" => GeneratorProfile::fixed(2),
            other => {
                let n = other
                    .strip_prefix("fixed-")
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&n| (1..=16).contains(&n))
                    .ok_or_else(|| BenchError::UnknownProfile(other.to_string()))?;
                GeneratorProfile::fixed(n)
            }
        };
        Ok(profile)
    }

    pub fn fixed(n_agents: usize) -> Self {
        GeneratorProfile {
            name: format!("fixed-{n_agents}"),
            agents: vec![(n_agents, 1.0)],
            items: (3, 15),
            style: ValuationStyle::Points,
        }
    }
}

impl Default for GeneratorProfile {
    fn default() -> Self {
        GeneratorProfile::named("spliddit").expect("built-in profile")
    }
}

/// Deterministic corpus of `n_cases` instances for `seed`.
pub fn generate_synthetic(
    n_cases: usize,
    seed: u64,
    profile: &GeneratorProfile,
) -> Result<Vec<Instance>, BenchError> {
    if n_cases == 0 {
        return Err(BenchError::Config("n_cases must be at least 1".into()));
    }
    if profile.agents.is_empty() || profile.items.0 > profile.items.1 {
        return Err(BenchError::Config(format!(
            "degenerate profile {:?}",
            profile.name
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let agent_dist = WeightedIndex::new(profile.agents.iter().map(|&(_, w)| w))
        .map_err(|e| BenchError::Config(e.to_string()))?;

    (0..n_cases)
        .map(|c| {
            let n = profile.agents[agent_dist.sample(&mut rng)].0;
            let m = rng.gen_range(profile.items.0..=profile.items.1);
            let valuations = match profile.style {
                ValuationStyle::Points => point_rows(&mut rng, n, m),
                ValuationStyle::Uniform100 => (0..n)
                    .map(|_| (0..m).map(|_| rng.gen_range(0..=100) as f64).collect())
                    .collect(),
            };
            Instance::from_matrix(format!("syn-{seed}-{c:04}"), valuations).map_err(Into::into)
        })
        .collect()
}

fn point_rows(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Vec<f64>> {
    if m == 0 {
        return vec![Vec::new(); n];
    }
    let popularity: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
    (0..n)
        .map(|_| {
            let mut weights: Vec<f64> = popularity
                .iter()
                .map(|&p| {
                    if rng.gen_bool(0.15) {
                        0.0
                    } else {
                        let w: f64 = p * rng.gen_range(0.3..1.7);
                        w * w
                    }
                })
                .collect();
            if weights.iter().all(|&w| w == 0.0) {
                weights[rng.gen_range(0..m)] = 1.0;
            }
            round_to_budget(&weights, POINT_BUDGET)
        })
        .collect()
}

/// Largest-remainder rounding of `weights` to integers summing to `budget`.
fn round_to_budget(weights: &[f64], budget: u32) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / total * budget as f64).collect();
    let mut out: Vec<u32> = exact.iter().map(|x| x.floor() as u32).collect();
    let short = budget - out.iter().sum::<u32>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &j in order.iter().take(short as usize) {
        out[j] += 1;
    }
    out.into_iter().map(f64::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_by_seed() {
        let p = GeneratorProfile::default();
        let a = generate_synthetic(50, 7, &p).unwrap();
        let b = generate_synthetic(50, 7, &p).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_synthetic(50, 8, &p).unwrap());
    }

    #[test]
    fn cardinality_and_budget() {
        let cases = generate_synthetic(730, 42, &GeneratorProfile::default()).unwrap();
        assert_eq!(cases.len(), 730);
        for c in &cases {
            assert!((2..=7).contains(&c.n_agents()));
            assert!((3..=15).contains(&c.n_items()));
            for row in &c.valuations {
                assert_eq!(row.iter().sum::<f64>(), 1000.0);
                assert!(row.iter().all(|v| v.fract() == 0.0));
            }
        }
        let small = cases.iter().filter(|c| c.n_agents() <= 3).count();
        assert!(small > cases.len() / 2);
    }

    #[test]
    fn fixed_profiles() {
        for name in ["pairs", "fixed-2"] {
            let p = GeneratorProfile::named(name).unwrap();
            let cases = generate_synthetic(20, 1, &p).unwrap();
            assert!(cases.iter().all(|c| c.n_agents() == 2));
        }
        let u = generate_synthetic(20, 1, &GeneratorProfile::named("uniform").unwrap()).unwrap();
        assert!(u
            .iter()
            .flat_map(|c| c.valuations.iter().flatten())
            .all(|&v| v <= 100.0));
    }

    #[test]
    fn rejects_unknown_profile_and_empty_corpus() {
        assert!(matches!(
            GeneratorProfile::named("gaussian"),
            Err(BenchError::UnknownProfile(_))
        ));
        assert!(GeneratorProfile::named("fixed-0").is_err());
        assert!(generate_synthetic(0, 1, &GeneratorProfile::default()).is_err());
    }

    #[test]
    fn rounding_hits_budget() {
        assert_eq!(
            round_to_budget(&[1.0, 1.0, 1.0], 1000),
            vec![334.0, 333.0, 333.0]
        );
        assert_eq!(round_to_budget(&[0.0, 2.0], 1000), vec![0.0, 1000.0]);
    }
}
