use serde::Serialize;

use crate::alpha::AlphaParam;
use crate::error::{Error, Result};
use crate::moments::{exact_expectations, ratio_to_f64};
use crate::rng::derive_seed;
use crate::trees::{DecoratedTree, Tree};

use super::mc::{empirical_tv, mc_samples, tv_bound_with_ci, McEstimate, TvBoundReport};
use super::plan::{distinguishing_decoration, distinguishing_decoration_unequal, minimal_nonblind, DistinguishPlan};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct NEstimate {
    pub n: usize,
    pub first: McEstimate,
    pub second: McEstimate,
    pub tv: TvBoundReport,
    pub empirical_tv: f64,
    /// `E[F](first) - E[F](second)` as an exact fraction.
    pub exact_difference: String,
    /// The exact difference times `n^{-|ℓ|/(1+α)}`.
    pub normalized_difference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistinguishReport {
    pub schema: u32,
    pub alpha: String,
    pub replicates: usize,
    pub master_seed: u64,
    /// True when the seeds were exchanged so that `first` is the larger one.
    pub swapped: bool,
    pub plan: DistinguishPlan,
    pub estimates: Vec<NEstimate>,
}

impl DistinguishReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Chooses a decorated pattern separating the two seeds, then estimates the
/// total-variation lower bound at each `n`.
pub fn distinguish(
    s1: &Tree,
    s2: &Tree,
    alpha: AlphaParam,
    n_list: &[usize],
    replicates: usize,
    master: u64,
) -> Result<DistinguishReport> {
    if s1.vertex_count() < 3 || s2.vertex_count() < 3 {
        return Err(Error::invalid("seeds need at least three vertices"));
    }
    if s1.canonical_code() == s2.canonical_code() {
        return Err(Error::precondition("seeds are isomorphic"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("n list must be strictly increasing"));
    }
    let swapped = s1.vertex_count() < s2.vertex_count();
    let (first, second) = if swapped { (s2, s1) } else { (s1, s2) };
    let k = first.vertex_count();
    if n_list.first().is_some_and(|&n| n < k) {
        return Err(Error::invalid(format!("every n must be at least {k}")));
    }
    let plan = if k == second.vertex_count() {
        let tau = minimal_nonblind(first, second)?;
        distinguishing_decoration(&tau, first, second, alpha)?
    } else {
        distinguishing_decoration_unequal(first, second, alpha)?
    };
    let tau = DecoratedTree::new(plan.tau.clone(), plan.ell.clone())?;
    let exact1 = exact_expectations(&tau, first, alpha, n_list)?;
    let exact2 = exact_expectations(&tau, second, alpha, n_list)?;
    let exponent = plan.ell.iter().sum::<u32>() as f64 / (1.0 + alpha.as_f64());
    let mut estimates = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        let xs = mc_samples(&tau, first, alpha, n, replicates, derive_seed(master, 2 * n as u64))?;
        let ys = mc_samples(&tau, second, alpha, n, replicates, derive_seed(master, 2 * n as u64 + 1))?;
        let e1 = McEstimate::from_samples(n, &xs)?;
        let e2 = McEstimate::from_samples(n, &ys)?;
        let diff = exact1[i].minus(&exact2[i]);
        let reduced = diff.to_rational();
        estimates.push(NEstimate {
            n,
            tv: tv_bound_with_ci(&e1, &e2)?,
            empirical_tv: empirical_tv(&xs, &ys),
            exact_difference: reduced.to_string(),
            normalized_difference: ratio_to_f64(&diff.numer, &diff.denom) * (n as f64).powf(-exponent),
            first: e1,
            second: e2,
        });
    }
    Ok(DistinguishReport {
        schema: REPORT_SCHEMA,
        alpha: alpha.to_string(),
        replicates,
        master_seed: master,
        swapped,
        plan,
        estimates,
    })
}

