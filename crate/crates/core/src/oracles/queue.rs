//! Single-server FIFO queue with Poisson arrivals and customers that give
//! up when their wait before service would exceed a fixed patience.
//!
//! The workload `V` seen by an arriving customer is tracked with the
//! Lindley recursion. A customer who finds `V > patience` reneges without
//! consuming service, so only admitted customers add work.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{check_rate, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServiceDiscipline {
    Exponential,
    Deterministic,
}

/// Long-run fraction of lost customers with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossEstimate {
    pub loss: f64,
    pub std_err: f64,
    /// Customers simulated in total.
    pub customers: u64,
}

impl LossEstimate {
    pub fn relative_error(&self, reference: f64) -> f64 {
        ((self.loss - reference) / reference).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpatientQueue {
    pub arrival_rate: f64,
    pub service_rate: f64,
    /// Longest wait before service a customer accepts.
    pub patience: f64,
}

impl ImpatientQueue {
    /// Grant queue with `mu` grants per subframe and a patience of
    /// `mu * t_rar - 1/mu`.
    pub fn grant_queue(lambda_a: f64, mu: f64, t_rar: f64) -> Self {
        Self {
            arrival_rate: lambda_a,
            service_rate: mu,
            patience: mu * t_rar - 1.0 / mu,
        }
    }

    pub fn load(&self) -> f64 {
        self.arrival_rate / self.service_rate
    }

    fn check(&self) -> Result<()> {
        check_rate("arrival_rate", self.arrival_rate)?;
        if !(self.service_rate > 0.0) || !(self.patience > 0.0) {
            return Err(Error::InvalidArgument {
                name: "service_rate/patience",
                value: self.service_rate,
                reason: "service rate and patience must be positive",
            });
        }
        Ok(())
    }

    /// Plain simulation of `customers` arrivals. The first 10% are warmup;
    /// the standard error comes from 50 batch means.
    pub fn simulate(&self, service: ServiceDiscipline, customers: u64, seed: u64) -> Result<LossEstimate> {
        self.check()?;
        if self.arrival_rate == 0.0 {
            return Ok(LossEstimate { loss: 0.0, std_err: 0.0, customers: 0 });
        }
        const BATCHES: u64 = 50;
        let warmup = customers / 10;
        let per_batch = ((customers - warmup) / BATCHES).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inter = Exp::new(self.arrival_rate).expect("positive rate");
        let svc = Sampler::new(service, self.service_rate);

        let mut workload = 0.0f64;
        let mut batch_losses = Vec::with_capacity(BATCHES as usize);
        let mut lost_in_batch = 0u64;
        let mut seen_in_batch = 0u64;
        for n in 0..warmup + per_batch * BATCHES {
            let lost = workload > self.patience;
            if !lost {
                workload += svc.sample(&mut rng);
            }
            if n >= warmup {
                seen_in_batch += 1;
                lost_in_batch += u64::from(lost);
                if seen_in_batch == per_batch {
                    batch_losses.push(lost_in_batch as f64 / per_batch as f64);
                    seen_in_batch = 0;
                    lost_in_batch = 0;
                }
            }
            workload = (workload - inter.sample(&mut rng)).max(0.0);
        }
        let k = batch_losses.len() as f64;
        let mean = batch_losses.iter().sum::<f64>() / k;
        let var = batch_losses.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
        Ok(LossEstimate {
            loss: mean,
            std_err: (var / k).sqrt(),
            customers: warmup + per_batch * BATCHES,
        })
    }

    /// Regenerative estimator for small loss probabilities.
    ///
    /// A cycle starts when a customer finds the system empty. The loss is
    /// `E[lost per cycle] / E[customers per cycle]`; the denominator uses
    /// `cycles` plain cycles and the numerator `cycles` cycles simulated
    /// under an exponentially twisted law (interarrival and service laws
    /// tilted so the workload drifts upward) until the first loss, with the
    /// likelihood ratio carried along and the original law restored after.
    pub fn simulate_rare(&self, service: ServiceDiscipline, cycles: u64, seed: u64) -> Result<LossEstimate> {
        self.check()?;
        if self.arrival_rate == 0.0 {
            return Ok(LossEstimate { loss: 0.0, std_err: 0.0, customers: 0 });
        }
        if cycles < 2 {
            return Err(Error::InvalidConfig("need at least two cycles".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = twist(service, self.arrival_rate, self.service_rate);
        let original = Laws::new(service, self.arrival_rate, self.service_rate, 0.0);
        let twisted = Laws::new(service, self.arrival_rate, self.service_rate, theta);

        let mut customers = 0u64;
        let (mut sum_n, mut sum_n2) = (0.0, 0.0);
        for _ in 0..cycles {
            let n = self.cycle(&original, &original, &mut rng).customers as f64;
            customers += n as u64;
            sum_n += n;
            sum_n2 += n * n;
        }
        let (mut sum_y, mut sum_y2) = (0.0, 0.0);
        for _ in 0..cycles {
            let c = self.cycle(&twisted, &original, &mut rng);
            customers += c.customers;
            let y = c.lost as f64 * c.likelihood;
            sum_y += y;
            sum_y2 += y * y;
        }
        let k = cycles as f64;
        let mean_n = sum_n / k;
        let mean_y = sum_y / k;
        let var_n = (sum_n2 / k - mean_n * mean_n).max(0.0) * k / (k - 1.0);
        let var_y = (sum_y2 / k - mean_y * mean_y).max(0.0) * k / (k - 1.0);
        let loss = mean_y / mean_n;
        // Delta method for the ratio of two independent means.
        let var = var_y / k / (mean_n * mean_n) + loss * loss * var_n / k / (mean_n * mean_n);
        Ok(LossEstimate {
            loss,
            std_err: var.sqrt(),
            customers,
        })
    }

    /// One regeneration cycle, sampled with `before` until the first loss
    /// and with `after` from then on.
    fn cycle(&self, before: &Laws, after: &Laws, rng: &mut ChaCha8Rng) -> Cycle {
        let mut out = Cycle { customers: 1, lost: 0, likelihood: 1.0 };
        let mut laws = before;
        let s = laws.service(rng, &mut out.likelihood);
        let mut workload = s;
        loop {
            let a = laws.interarrival(rng, &mut out.likelihood);
            workload -= a;
            if workload <= 0.0 {
                return out;
            }
            out.customers += 1;
            if workload > self.patience {
                out.lost += 1;
                laws = after;
            } else {
                workload += laws.service(rng, &mut out.likelihood);
            }
        }
    }
}

struct Cycle {
    customers: u64,
    lost: u64,
    likelihood: f64,
}

/// Positive root of `ln E[exp(theta S)] + ln(lambda / (lambda + theta)) = 0`,
/// or 0 when the queue is not stable.
fn twist(service: ServiceDiscipline, lambda: f64, mu: f64) -> f64 {
    if lambda >= mu {
        return 0.0;
    }
    match service {
        ServiceDiscipline::Exponential => mu - lambda,
        ServiceDiscipline::Deterministic => {
            // theta / mu = ln(1 + theta / lambda); f < 0 just above zero.
            let f = |t: f64| t / mu - (t / lambda).ln_1p();
            let mut lo = 1e-12 * mu;
            let mut hi = mu;
            while f(hi) < 0.0 {
                hi *= 2.0;
            }
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
    }
}

#[derive(Debug, Clone, Copy)]
struct Sampler {
    service: ServiceDiscipline,
    rate: f64,
}

impl Sampler {
    fn new(service: ServiceDiscipline, rate: f64) -> Self {
        Self { service, rate }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self.service {
            ServiceDiscipline::Exponential => Exp::new(self.rate).expect("positive rate").sample(rng),
            ServiceDiscipline::Deterministic => 1.0 / self.rate,
        }
    }
}

/// Sampling laws tilted by `theta`, with likelihood ratios back to the
/// untilted laws.
struct Laws {
    lambda: f64,
    lambda_tilted: f64,
    service: ServiceDiscipline,
    mu: f64,
    mu_tilted: f64,
}

impl Laws {
    fn new(service: ServiceDiscipline, lambda: f64, mu: f64, theta: f64) -> Self {
        let mu_tilted = match service {
            ServiceDiscipline::Exponential => mu - theta,
            ServiceDiscipline::Deterministic => mu,
        };
        Self {
            lambda,
            lambda_tilted: lambda + theta,
            service,
            mu,
            mu_tilted,
        }
    }

    fn interarrival<R: Rng>(&self, rng: &mut R, lr: &mut f64) -> f64 {
        let a = Exp::new(self.lambda_tilted).expect("positive rate").sample(rng);
        if self.lambda_tilted != self.lambda {
            *lr *= self.lambda / self.lambda_tilted * ((self.lambda_tilted - self.lambda) * a).exp();
        }
        a
    }

    fn service<R: Rng>(&self, rng: &mut R, lr: &mut f64) -> f64 {
        match self.service {
            ServiceDiscipline::Deterministic => 1.0 / self.mu,
            ServiceDiscipline::Exponential => {
                let s = Exp::new(self.mu_tilted).expect("positive rate").sample(rng);
                if self.mu_tilted != self.mu {
                    *lr *= self.mu / self.mu_tilted * ((self.mu_tilted - self.mu) * s).exp();
                }
                s
            }
        }
    }
}

/// Plain-simulation loss fraction of the grant queue with `mu` grants per
/// subframe and RAR window `t_rar`, over `horizon` customers.
pub fn impatient_queue_sim(
    lambda_a: f64,
    mu: f64,
    t_rar: f64,
    service: ServiceDiscipline,
    horizon: u64,
    seed: u64,
) -> Result<LossEstimate> {
    ImpatientQueue::grant_queue(lambda_a, mu, t_rar).simulate(service, horizon, seed)
}
