use std::collections::HashMap;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::AlphaParam;
use crate::error::{Error, Result};
use crate::growth::{grow_abstract, grow_degrees};
use crate::observables::{count_F, count_vertex_f64};
use crate::rng::replicate_rng;
use crate::trees::{falling_factorial_f64, DecoratedTree, Tree};

/// Sample moments of `F_τ(T_n^S)` over independent replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub n: usize,
    pub replicates: usize,
    pub mean: f64,
    pub second_moment: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
    pub variance: f64,
    /// Sample covariance of `X` and `X²`.
    pub cov_first_second: f64,
    /// Sample variance of `X²`.
    pub variance_second: f64,
}

impl McEstimate {
    pub fn from_samples(n: usize, xs: &[f64]) -> Result<Self> {
        let r = xs.len();
        if r < 2 {
            return Err(Error::invalid("at least two replicates are needed"));
        }
        let rf = r as f64;
        let mean = xs.iter().sum::<f64>() / rf;
        let second_moment = xs.iter().map(|x| x * x).sum::<f64>() / rf;
        let (mut vx, mut cxy, mut vy) = (0.0, 0.0, 0.0);
        for &x in xs {
            let dx = x - mean;
            let dy = x * x - second_moment;
            vx += dx * dx;
            cxy += dx * dy;
            vy += dy * dy;
        }
        let scale = 1.0 / (rf - 1.0);
        let variance = vx * scale;
        Ok(McEstimate {
            n,
            replicates: r,
            mean,
            second_moment,
            std_error: (variance / rf).sqrt(),
            variance,
            cov_first_second: cxy * scale,
            variance_second: vy * scale,
        })
    }
}

/// One value of `F_τ(T_n^S)` per replicate; replicate `i` draws from
/// `replicate_rng(master, i)`. The output order and values do not depend
/// on the number of worker threads.
pub fn mc_samples(
    tau: &DecoratedTree,
    seed: &Tree,
    alpha: AlphaParam,
    n: usize,
    replicates: usize,
    master: u64,
) -> Result<Vec<f64>> {
    if tau.size() == 1 {
        let ell = tau.ell()[0];
        return (0..replicates)
            .into_par_iter()
            .map_init(Vec::new, |degrees, i| {
                let mut rng = replicate_rng(master, i as u64);
                grow_degrees(seed, alpha, n, &mut rng, degrees)?;
                Ok(count_vertex_f64(ell, degrees))
            })
            .collect();
    }
    (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(master, i as u64);
            let t = grow_abstract(seed, alpha, n, &mut rng)?;
            Ok(count_F(tau, &t).to_f64().unwrap_or(f64::INFINITY))
        })
        .collect()
}

pub fn mc_moments(
    tau: &DecoratedTree,
    seed: &Tree,
    alpha: AlphaParam,
    n: usize,
    replicates: usize,
    master: u64,
) -> Result<McEstimate> {
    McEstimate::from_samples(n, &mc_samples(tau, seed, alpha, n, replicates, master)?)
}

/// `Δ² / (Δ² + 2(m2_1 + m2_2))` with `Δ = mean1 - mean2`: a lower bound on
/// the total-variation distance between two square-integrable laws.
pub fn tv_lower_bound(mean1: f64, mean2: f64, m2_1: f64, m2_2: f64) -> Result<f64> {
    for (m, m2) in [(mean1, m2_1), (mean2, m2_2)] {
        if !m.is_finite() || !m2.is_finite() {
            return Err(Error::invalid("moments must be finite"));
        }
        if m2 < m * m - 1e-9 * m2.abs().max(1.0) {
            return Err(Error::invalid(format!(
                "second moment {m2} is below the squared mean {}",
                m * m
            )));
        }
    }
    let delta = mean1 - mean2;
    if delta == 0.0 {
        return Ok(0.0);
    }
    let d2 = delta * delta;
    Ok(d2 / (d2 + 2.0 * (m2_1 + m2_2)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvBoundReport {
    pub bound: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean1: f64,
    pub mean2: f64,
    pub second_moment1: f64,
    pub second_moment2: f64,
}

/// The bound evaluated at sample moments, with a 95% delta-method interval.
pub fn tv_bound_with_ci(first: &McEstimate, second: &McEstimate) -> Result<TvBoundReport> {
    let bound = tv_lower_bound(first.mean, second.mean, first.second_moment, second.second_moment)?;
    let delta = first.mean - second.mean;
    let sum = first.second_moment + second.second_moment;
    let denom = delta * delta + 2.0 * sum;
    let (g_delta, g_m2) = if denom > 0.0 {
        (4.0 * delta * sum / (denom * denom), -2.0 * delta * delta / (denom * denom))
    } else {
        (0.0, 0.0)
    };
    let var_part = |e: &McEstimate, sign: f64| {
        let g1 = sign * g_delta;
        (g1 * g1 * e.variance + 2.0 * g1 * g_m2 * e.cov_first_second + g_m2 * g_m2 * e.variance_second)
            / e.replicates as f64
    };
    let std_error = (var_part(first, 1.0) + var_part(second, -1.0)).max(0.0).sqrt();
    Ok(TvBoundReport {
        bound,
        std_error,
        ci_low: bound - 1.96 * std_error,
        ci_high: bound + 1.96 * std_error,
        mean1: first.mean,
        mean2: second.mean,
        second_moment1: first.second_moment,
        second_moment2: second.second_moment,
    })
}

const EXACT_SUPPORT_LIMIT: usize = 256;

/// Total-variation distance between two empirical samples: exact value
/// matching for integer samples with at most 256 distinct values, otherwise
/// a Freedman–Diaconis histogram on the pooled sample.
pub fn empirical_tv(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let integral = a.iter().chain(b).all(|x| x.fract() == 0.0 && x.abs() < 9e15);
    if integral {
        let mut support: HashMap<i64, (usize, usize)> = HashMap::new();
        for &x in a {
            support.entry(x as i64).or_default().0 += 1;
        }
        for &x in b {
            support.entry(x as i64).or_default().1 += 1;
        }
        if support.len() <= EXACT_SUPPORT_LIMIT {
            return half_l1(support.values().copied(), a.len(), b.len());
        }
    }
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let q = |p: f64| pooled[((pooled.len() - 1) as f64 * p).round() as usize];
    let (lo, hi) = (pooled[0], pooled[pooled.len() - 1]);
    let width = 2.0 * (q(0.75) - q(0.25)) / (pooled.len() as f64).cbrt();
    if !(width > 0.0) || hi <= lo {
        let mut counts: HashMap<u64, (usize, usize)> = HashMap::new();
        for &x in a {
            counts.entry(x.to_bits()).or_default().0 += 1;
        }
        for &x in b {
            counts.entry(x.to_bits()).or_default().1 += 1;
        }
        return half_l1(counts.values().copied(), a.len(), b.len());
    }
    let bins = (((hi - lo) / width).ceil() as usize).clamp(1, 1 << 20);
    let index = |x: f64| (((x - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1);
    let mut counts = vec![(0usize, 0usize); bins];
    for &x in a {
        counts[index(x)].0 += 1;
    }
    for &x in b {
        counts[index(x)].1 += 1;
    }
    half_l1(counts.into_iter(), a.len(), b.len())
}

fn half_l1(counts: impl Iterator<Item = (usize, usize)>, na: usize, nb: usize) -> f64 {
    0.5 * counts
        .map(|(x, y)| (x as f64 / na as f64 - y as f64 / nb as f64).abs())
        .sum::<f64>()
}

/// `M_m W_m` for `m = k, ..., n`, where `M_m = Π_{u∈R} [deg_m(u) + α + ℓ(u) - 2]_{ℓ(u)}`
/// and `W_m = Π_{t=k}^{m-1} (1 + |ℓ|/((1+α)t - 2))^{-1}`. `tree` must carry
/// growth ids (vertex `m` arrived at time `m+1`) and `region` must be a
/// connected set of seed vertices.
pub fn martingale_track(
    region: &[usize],
    ell: &[u32],
    seed_size: usize,
    tree: &Tree,
    alpha: AlphaParam,
) -> Result<Vec<f64>> {
    let n = tree.vertex_count();
    if region.len() != ell.len() {
        return Err(Error::invalid("region and decoration differ in length"));
    }
    if seed_size < 2 || seed_size > n {
        return Err(Error::invalid(format!("seed size {seed_size} invalid for {n} vertices")));
    }
    if region.iter().any(|&u| u >= seed_size) || !tree.is_connected_subset(region) {
        return Err(Error::invalid("region must be a connected subtree of the seed"));
    }
    let a = alpha.as_f64();
    let total_ell: u32 = ell.iter().sum();
    let arrivals: Vec<Vec<usize>> = region
        .iter()
        .map(|&u| {
            let mut ids: Vec<usize> = tree.neighbors(u).iter().copied().filter(|&v| v >= seed_size).collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    let mut degrees: Vec<usize> = region
        .iter()
        .map(|&u| tree.neighbors(u).iter().filter(|&&v| v < seed_size).count())
        .collect();
    let mut next = vec![0usize; region.len()];
    let factor = |d: usize, l: u32| falling_factorial_f64(d as f64 + a + l as f64 - 2.0, l as u64);
    let mut factors: Vec<f64> = degrees.iter().zip(ell).map(|(&d, &l)| factor(d, l)).collect();
    let mut w = 1.0;
    let mut out = Vec::with_capacity(n - seed_size + 1);
    for m in seed_size..=n {
        out.push(factors.iter().product::<f64>() * w);
        if m == n {
            break;
        }
        // vertex `m` joins; update any region vertex it attaches to
        for (i, ids) in arrivals.iter().enumerate() {
            if ids.get(next[i]) == Some(&m) {
                next[i] += 1;
                degrees[i] += 1;
                factors[i] = factor(degrees[i], ell[i]);
            }
        }
        w /= 1.0 + total_ell as f64 / ((1.0 + a) * m as f64 - 2.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;

    #[test]
    fn bound_examples() {
        assert_eq!(tv_lower_bound(2.0, 2.0, 5.0, 5.0).unwrap(), 0.0);
        assert!((tv_lower_bound(1.0, 0.0, 1.0, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(tv_lower_bound(3.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn deterministic_observables() {
        let one = AlphaParam::integer(1).unwrap();
        let seed = Tree::path(3);
        let e = mc_moments(&DecoratedTree::vertex(0), &seed, one, 50, 20, 3).unwrap();
        assert_eq!((e.mean, e.variance), (50.0, 0.0));
        let e = mc_moments(&DecoratedTree::vertex(1), &seed, one, 50, 20, 3).unwrap();
        assert_eq!((e.mean, e.variance), (48.0, 0.0));
    }

    #[test]
    fn empirical_tv_extremes() {
        assert_eq!(empirical_tv(&[1.0, 2.0], &[2.0, 1.0]), 0.0);
        assert_eq!(empirical_tv(&[1.0, 1.0], &[3.0, 3.0]), 1.0);
        let a: Vec<f64> = (0..1000).map(|i| i as f64 + 0.5).collect();
        let b: Vec<f64> = (0..1000).map(|i| i as f64 + 1e6).collect();
        assert_eq!(empirical_tv(&a, &b), 1.0);
    }

    #[test]
    fn trivial_decoration_is_constant() {
        let one = AlphaParam::integer(1).unwrap();
        let t = grow_abstract(&Tree::path(3), one, 30, &mut replicate_rng(1, 0)).unwrap();
        let track = martingale_track(&[1], &[0], 3, &t, one).unwrap();
        assert_eq!(track.len(), 28);
        assert!(track.iter().all(|&x| x == 1.0));
        assert!(martingale_track(&[5], &[1], 3, &t, one).is_err());
    }
}
