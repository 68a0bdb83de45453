//! Annulus-count experiments comparing sampled point processes with the
//! analytic conditional densities.

use num_complex::Complex64;
use rayon::prelude::*;

use super::critical::{find_critical_points_with, CriticalSearchConfig};
use super::rings::{count_zeros_inside, RingGrid};
use super::{find_zeros, sample, CoefficientVector, Conditioning, RngSpec};
use crate::quadrature::{annulus_mass, GaussLegendre};
use crate::{kacrice, lelong, Error, Result};

/// Analytic density the critical point counts are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// `rescaled_kn`: the Kac-Rice formula evaluated with affine-frame jets.
    KacRice,
    /// `rescaled_kn_normal_frame`: the same formula evaluated at the origin
    /// after moving the conditioning zero by an isometry.
    NormalFrame,
}

/// How zeros are counted per annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroCounting {
    /// All roots from the companion matrix, binned by modulus.
    Companion,
    /// Winding numbers of `f` along each edge circle.
    ArgumentPrinciple,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExperimentConfig {
    pub n: u32,
    pub trials: u64,
    pub conditioning: Conditioning,
    /// Annulus edges in rescaled units `r = |z| sqrt(n)`.
    pub edges: Vec<f64>,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub reference: Reference,
    pub zero_counting: ZeroCounting,
    pub search: CriticalSearchConfig,
    /// Run the double-density coverage check on every k-th trial (0: never).
    pub coverage_check_every: u64,
}

impl ExperimentConfig {
    pub fn new(n: u32, trials: u64, conditioning: Conditioning, edges: Vec<f64>, seed: u64) -> Self {
        ExperimentConfig {
            n,
            trials,
            conditioning,
            edges,
            seed,
            threads: None,
            reference: Reference::KacRice,
            zero_counting: ZeroCounting::ArgumentPrinciple,
            search: CriticalSearchConfig::default(),
            coverage_check_every: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("degree must be >= 2, got {}", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.edges.len() < 2 {
            return Err(Error::InvalidArgument("need at least two annulus edges".into()));
        }
        if !(self.edges[0] >= 0.0) || self.edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(format!("edges must be nonnegative and increasing: {:?}", self.edges)));
        }
        let max = self.edges[self.edges.len() - 1];
        if !(max <= 4.0) {
            return Err(Error::InvalidArgument(format!("largest edge must be <= 4, got {max}")));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Radial density (rescaled Lebesgue measure) of the counted points.
    pub fn predicted_density(&self, r: f64) -> Result<f64> {
        let u = Complex64::new(r, 0.0);
        match (self.conditioning, self.reference) {
            (Conditioning::ZeroAtOrigin, Reference::KacRice) => kacrice::rescaled_kn(self.n, u),
            (Conditioning::ZeroAtOrigin, Reference::NormalFrame) => kacrice::rescaled_kn_normal_frame(self.n, u),
            (Conditioning::CriticalAtOrigin, _) => lelong::rescaled_dn(self.n, u),
            (Conditioning::None, _) => {
                let s = 1.0 + r * r / self.n as f64;
                Ok(std::f64::consts::FRAC_1_PI / (s * s))
            }
        }
    }
}

/// Monte Carlo point counts per annulus together with their predictions.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AnnulusHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub trials: u64,
    pub predicted: Vec<f64>,
    /// Standard error of each count from the per-trial sample variance.
    pub stderr: Vec<f64>,
    /// Samples redrawn because of a vanishing leading coefficient.
    pub resamples: u64,
    /// Trials whose critical point coverage check disagreed.
    pub coverage_mismatches: u64,
    /// Critical points found with a numerically singular Jacobian.
    pub singular_hits: u64,
}

impl AnnulusHistogram {
    pub fn z_scores(&self) -> Vec<f64> {
        self.counts
            .iter()
            .zip(&self.predicted)
            .zip(&self.stderr)
            .map(|((&c, &p), &s)| {
                let diff = c as f64 - p;
                if s > 0.0 {
                    diff / s
                } else if diff == 0.0 {
                    0.0
                } else {
                    diff.signum() * f64::INFINITY
                }
            })
            .collect()
    }

    /// Whether every annulus with at least `min_expected` predicted points
    /// lies within `sigmas` standard errors.
    pub fn within(&self, sigmas: f64, min_expected: f64) -> bool {
        self.z_scores().iter().zip(&self.predicted).all(|(z, &p)| p < min_expected || z.abs() <= sigmas)
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    counts: Vec<u64>,
    squares: Vec<u64>,
    resamples: u64,
    coverage_mismatches: u64,
    singular_hits: u64,
}

impl Tally {
    fn zero(bins: usize) -> Self {
        Tally { counts: vec![0; bins], squares: vec![0; bins], ..Default::default() }
    }

    fn merge(mut self, other: Tally) -> Self {
        for i in 0..self.counts.len() {
            self.counts[i] += other.counts[i];
            self.squares[i] += other.squares[i];
        }
        self.resamples += other.resamples;
        self.coverage_mismatches += other.coverage_mismatches;
        self.singular_hits += other.singular_hits;
        self
    }
}

/// Runs `trials` independent samples and bins the counted points by
/// rescaled radius.
///
/// Trial `t` draws from stream `t` of `seed`, and tallies are integer sums,
/// so the result does not depend on the thread count or scheduling.
pub fn annulus_experiment(config: &ExperimentConfig) -> Result<AnnulusHistogram> {
    config.validate()?;
    let bins = config.edges.len() - 1;
    let run = || {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, t))
            .try_fold(|| Tally::zero(bins), |acc, t| t.map(|t| acc.merge(t)))
            .try_reduce(|| Tally::zero(bins), |a, b| Ok(a.merge(b)))
    };
    let tally = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let rule = GaussLegendre::new(64);
    let trials = config.trials as f64;
    let mut predicted = Vec::with_capacity(bins);
    let mut stderr = Vec::with_capacity(bins);
    for i in 0..bins {
        let mass = annulus_mass(&rule, config.edges[i], config.edges[i + 1], |r| config.predicted_density(r))?;
        predicted.push(trials * mass);
        let mean = tally.counts[i] as f64 / trials;
        let var = (tally.squares[i] as f64 / trials - mean * mean).max(0.0);
        stderr.push((trials * var).sqrt());
    }
    if tally.resamples > 0 {
        log::info!("{} samples redrawn for a degenerate leading coefficient", tally.resamples);
    }
    if tally.coverage_mismatches > 0 {
        log::warn!("{} trials failed the critical point coverage check", tally.coverage_mismatches);
    }
    Ok(AnnulusHistogram {
        edges: config.edges.clone(),
        counts: tally.counts,
        trials: config.trials,
        predicted,
        stderr,
        resamples: tally.resamples,
        coverage_mismatches: tally.coverage_mismatches,
        singular_hits: tally.singular_hits,
    })
}

fn run_trial(config: &ExperimentConfig, trial: u64) -> Result<Tally> {
    let bins = config.edges.len() - 1;
    let mut tally = Tally::zero(bins);
    let sqrt_n = (config.n as f64).sqrt();
    let max_edge = config.edges[bins];
    let mut radii: Vec<f64> = Vec::new();
    let mut attempt = 0u64;
    let poly = loop {
        let stream = trial | (attempt << 48);
        let poly = sample(config.n, RngSpec::new(config.seed, stream), config.conditioning)?;
        let degenerate = config.conditioning != Conditioning::ZeroAtOrigin
            && config.zero_counting == ZeroCounting::Companion
            && poly.coeffs[config.n as usize].norm() < 1e-13;
        if !degenerate {
            break poly;
        }
        attempt += 1;
        tally.resamples += 1;
    };
    match config.conditioning {
        Conditioning::ZeroAtOrigin => {
            let mut search = config.search.clone();
            search.coverage_check =
                config.coverage_check_every > 0 && trial.is_multiple_of(config.coverage_check_every);
            let found = find_critical_points_with(&poly, (max_edge + 1.0) / sqrt_n, &search)?;
            tally.coverage_mismatches += found.coverage_mismatch.is_some() as u64;
            tally.singular_hits += found.singular_hits as u64;
            radii.extend(found.points.iter().map(|z| z.norm() * sqrt_n));
        }
        Conditioning::CriticalAtOrigin | Conditioning::None => match config.zero_counting {
            ZeroCounting::Companion => {
                radii.extend(find_zeros(&poly)?.iter().map(|z| z.norm() * sqrt_n));
            }
            ZeroCounting::ArgumentPrinciple => {
                let inside = zeros_inside_edges(&poly, &config.edges, sqrt_n)?;
                for i in 0..bins {
                    let c = (inside[i + 1] - inside[i]).max(0) as u64;
                    tally.counts[i] = c;
                    tally.squares[i] = c * c;
                }
                return Ok(tally);
            }
        },
    }
    for r in radii {
        if let Some(i) = bin_of(&config.edges, r) {
            tally.counts[i] += 1;
        }
    }
    for i in 0..bins {
        tally.squares[i] = tally.counts[i] * tally.counts[i];
    }
    Ok(tally)
}

/// Number of zeros inside each edge circle.
fn zeros_inside_edges(poly: &CoefficientVector, edges: &[f64], sqrt_n: f64) -> Result<Vec<i64>> {
    let p = poly.monomial();
    let m = (p.degree() + 1).next_power_of_two().max(64);
    let grid = RingGrid::new(m);
    let mut scratch = vec![Complex64::new(0.0, 0.0); m];
    edges.iter().map(|&e| count_zeros_inside(&p, e / sqrt_n, &grid, &mut scratch)).collect()
}

fn bin_of(edges: &[f64], r: f64) -> Option<usize> {
    if r < edges[0] || r >= edges[edges.len() - 1] {
        return None;
    }
    Some(edges.partition_point(|&e| e <= r) - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_configs() {
        let ok = ExperimentConfig::new(20, 1, Conditioning::ZeroAtOrigin, vec![0.0, 1.0], 1);
        assert!(annulus_experiment(&ExperimentConfig { trials: 0, ..ok.clone() }).is_err());
        assert!(annulus_experiment(&ExperimentConfig { edges: vec![1.0, 0.5], ..ok.clone() }).is_err());
        assert!(annulus_experiment(&ExperimentConfig { edges: vec![0.0, 5.0], ..ok.clone() }).is_err());
        assert!(annulus_experiment(&ExperimentConfig { edges: vec![0.0], ..ok.clone() }).is_err());
        assert!(annulus_experiment(&ok).is_ok());
    }

    #[test]
    fn bins() {
        let e = [0.0, 0.5, 1.0];
        assert_eq!(bin_of(&e, 0.0), Some(0));
        assert_eq!(bin_of(&e, 0.5), Some(1));
        assert_eq!(bin_of(&e, 0.99), Some(1));
        assert_eq!(bin_of(&e, 1.0), None);
    }

    #[test]
    fn zero_counting_methods_agree() {
        let edges = vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
        for cond in [Conditioning::CriticalAtOrigin, Conditioning::None] {
            let mut config = ExperimentConfig::new(100, 40, cond, edges.clone(), 17);
            config.zero_counting = ZeroCounting::Companion;
            let a = annulus_experiment(&config).unwrap();
            config.zero_counting = ZeroCounting::ArgumentPrinciple;
            let b = annulus_experiment(&config).unwrap();
            assert_eq!(a.counts, b.counts);
        }
    }

    #[test]
    fn single_trial_counts_bounded_by_points_in_disk() {
        let config = ExperimentConfig::new(50, 1, Conditioning::ZeroAtOrigin, vec![0.0, 1.0, 2.0], 3);
        let h = annulus_experiment(&config).unwrap();
        let poly = sample(50, RngSpec::new(3, 0), Conditioning::ZeroAtOrigin).unwrap();
        let found = super::super::find_critical_points(&poly, 3.0 / 50f64.sqrt()).unwrap();
        assert!(h.counts.iter().sum::<u64>() <= found.len() as u64);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let mut config = ExperimentConfig::new(30, 24, Conditioning::ZeroAtOrigin, vec![0.0, 1.0, 2.0, 3.0], 99);
        config.threads = Some(1);
        let a = annulus_experiment(&config).unwrap();
        config.threads = Some(3);
        let b = annulus_experiment(&config).unwrap();
        assert_eq!(a, b);
    }
}
