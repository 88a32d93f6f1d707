use rand::Rng;
use rand_distr::{Distribution, Open01};

use crate::dists::standard_normal;
use crate::model::{MhDiag, MhSettings};

/// Batch-adaptive random-walk proposal scale for one parameter.
///
/// After the n-th completed batch the log proposal sd moves by
/// `min(max_adapt, n^{-1/2})`, up when the batch acceptance rate exceeded the
/// target and down when it fell short.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveMhState {
    pub log_sd: f64,
    pub batch_count: usize,
    pub accepts_in_batch: usize,
    pub proposals_in_batch: usize,
    pub batch_size: usize,
    pub max_adapt: f64,
    pub target_rate: f64,
    pub adaptive: bool,
    diag: MhDiag,
}

impl AdaptiveMhState {
    pub fn new(name: &str, s: &MhSettings) -> Self {
        Self {
            log_sd: s.initial_sd.ln(),
            batch_count: 0,
            accepts_in_batch: 0,
            proposals_in_batch: 0,
            batch_size: s.batch_size,
            max_adapt: s.max_adapt,
            target_rate: s.target_rate,
            adaptive: s.adaptive,
            diag: MhDiag {
                name: name.to_string(),
                batch_size: s.batch_size,
                accepts_per_batch: Vec::new(),
                total_accepts: 0,
                total_proposals: 0,
                final_sd: s.initial_sd,
            },
        }
    }

    pub fn sd(&self) -> f64 {
        self.log_sd.exp()
    }

    /// Records the outcome of one proposal and adapts at batch boundaries.
    pub fn record(&mut self, accepted: bool) {
        self.proposals_in_batch += 1;
        self.diag.total_proposals += 1;
        if accepted {
            self.accepts_in_batch += 1;
            self.diag.total_accepts += 1;
        }
        if self.proposals_in_batch == self.batch_size {
            self.batch_count += 1;
            self.diag.accepts_per_batch.push(self.accepts_in_batch);
            if self.adaptive {
                let rate = self.accepts_in_batch as f64 / self.batch_size as f64;
                let delta = self.max_adapt.min((self.batch_count as f64).powf(-0.5));
                if rate > self.target_rate {
                    self.log_sd += delta;
                } else if rate < self.target_rate {
                    self.log_sd -= delta;
                }
            }
            self.accepts_in_batch = 0;
            self.proposals_in_batch = 0;
        }
    }

    /// One random-walk Metropolis step on an unconstrained coordinate `z`
    /// whose log target (including any Jacobian) is `log_target`.
    pub fn step<R, F>(&mut self, rng: &mut R, z: f64, log_target: F) -> f64
    where
        R: Rng + ?Sized,
        F: Fn(f64) -> f64,
    {
        let proposal = z + self.sd() * standard_normal(rng);
        let log_ratio = log_target(proposal) - log_target(z);
        let u: f64 = Open01.sample(rng);
        // NaN compares false, so an undefined ratio rejects
        let accept = u.ln() < log_ratio;
        self.record(accept);
        if accept {
            proposal
        } else {
            z
        }
    }

    pub fn diag(&self) -> MhDiag {
        MhDiag {
            final_sd: self.sd(),
            ..self.diag.clone()
        }
    }
}
