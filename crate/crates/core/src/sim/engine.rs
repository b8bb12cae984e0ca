use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::queue::{Grant, RarQueue};
use super::{SimConfig, SimStats};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttemptState {
    /// Waiting out a backoff (or, for a fresh packet, the arrival subframe).
    Backoff,
    /// Ready to send MSG1 on the next RAO.
    AwaitingRao,
    /// MSG1 sent, listening for MSG2 during the RAR window.
    AwaitingRar,
    /// MSG2 received, MSG3 sent, waiting for MSG4.
    AwaitingMsg4,
    Connected,
    Dropped,
}

/// One packet working through the access procedure.
#[derive(Debug, Clone)]
pub struct UeAttempt {
    pub id: u64,
    pub arrival: u64,
    /// Zero-based transmission index, at most `m`.
    pub attempt_index: u32,
    pub state: AttemptState,
    pub chosen_preamble: u32,
    pub msg1_at: u64,
    pub rar_deadline: u64,
    pub crt_deadline: u64,
    /// Bumped on every MSG1 so that timers of earlier attempts are ignored.
    generation: u32,
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Ready { slot: usize },
    RarDeadline { slot: usize, generation: u32 },
    Msg4 { slot: usize, generation: u32 },
    CrtExpiry { slot: usize, generation: u32, collided: bool },
}

#[derive(Debug, Clone, Copy)]
enum Failure {
    RarExpired,
    Msg3Collision,
    CrtExpired,
}

/// Ring of per-subframe event lists covering the longest timer.
struct Calendar {
    slots: Vec<Vec<Event>>,
    mask: u64,
}

impl Calendar {
    fn new(horizon: u64) -> Self {
        let size = (horizon + 1).next_power_of_two();
        Self {
            slots: (0..size).map(|_| Vec::new()).collect(),
            mask: size - 1,
        }
    }

    fn schedule(&mut self, at: u64, event: Event) {
        self.slots[(at & self.mask) as usize].push(event);
    }

    fn take(&mut self, at: u64, into: &mut Vec<Event>) {
        std::mem::swap(&mut self.slots[(at & self.mask) as usize], into);
    }
}

pub(super) struct Engine {
    cfg: SimConfig,
    arrivals: Option<Poisson<f64>>,
    rng: ChaCha8Rng,
    ues: Vec<UeAttempt>,
    free: Vec<usize>,
    next_id: u64,
    calendar: Calendar,
    waiting: Vec<usize>,
    queue: RarQueue,
    stats: SimStats,
    completed_tx: u64,
}

impl Engine {
    pub(super) fn new(cfg: &SimConfig, lambda_i: f64, rng: ChaCha8Rng) -> Result<Self> {
        let sys = &cfg.system;
        let arrivals = if lambda_i > 0.0 {
            Some(Poisson::new(lambda_i).map_err(|e| Error::InvalidConfig(e.to_string()))?)
        } else {
            None
        };
        let horizon = [
            u64::from(sys.w_c) + 1,
            u64::from(sys.t_enb_proc) + u64::from(sys.t_rar),
            u64::from(sys.t_ue_proc) + u64::from(sys.t_enb_proc),
            u64::from(sys.t_crt),
        ]
        .into_iter()
        .max()
        .unwrap_or(1);
        Ok(Self {
            cfg: *cfg,
            arrivals,
            rng,
            ues: Vec::new(),
            free: Vec::new(),
            next_id: 0,
            calendar: Calendar::new(horizon),
            waiting: Vec::new(),
            queue: RarQueue::new(sys.mu, u64::from(sys.t_enb_proc), u64::from(sys.t_rar)),
            stats: SimStats {
                window: cfg.window(),
                ..SimStats::default()
            },
            completed_tx: 0,
        })
    }

    pub(super) fn run(mut self) -> SimStats {
        let mut events = Vec::new();
        let mut groups: Vec<(u32, usize)> = Vec::new();
        for now in 0..self.cfg.duration {
            self.calendar.take(now, &mut events);
            for event in events.drain(..) {
                self.handle(event, now);
            }
            self.arrive(now);
            if now % u64::from(self.cfg.system.delta_rao) == 0 {
                self.rao(now, &mut groups);
            }
            self.serve_grants(now);
        }
        self.finish()
    }

    fn in_window(&self, t: u64) -> bool {
        t >= self.cfg.warmup
    }

    fn alloc(&mut self, ue: UeAttempt) -> usize {
        match self.free.pop() {
            Some(slot) => {
                // Keep the slot's generation so stale timers stay stale.
                let generation = self.ues[slot].generation;
                self.ues[slot] = UeAttempt { generation, ..ue };
                slot
            }
            None => {
                self.ues.push(ue);
                self.ues.len() - 1
            }
        }
    }

    fn arrive(&mut self, now: u64) {
        let Some(dist) = self.arrivals else { return };
        let n = dist.sample(&mut self.rng) as u64;
        for _ in 0..n {
            let ue = UeAttempt {
                id: self.next_id,
                arrival: now,
                attempt_index: 0,
                state: AttemptState::Backoff,
                chosen_preamble: 0,
                msg1_at: 0,
                rar_deadline: 0,
                crt_deadline: 0,
                generation: 0,
            };
            self.next_id += 1;
            let slot = self.alloc(ue);
            if self.in_window(now) {
                self.stats.arrivals += 1;
            }
            // Arrivals happen during the subframe: earliest MSG1 is the next one.
            self.calendar.schedule(now + 1, Event::Ready { slot });
        }
    }

    fn handle(&mut self, event: Event, now: u64) {
        match event {
            Event::Ready { slot } => {
                self.ues[slot].state = AttemptState::AwaitingRao;
                self.waiting.push(slot);
            }
            Event::RarDeadline { slot, generation } => {
                let ue = &self.ues[slot];
                if ue.generation == generation && ue.state == AttemptState::AwaitingRar {
                    self.fail(slot, now, Failure::RarExpired);
                }
            }
            Event::Msg4 { slot, generation } => {
                if self.ues[slot].generation == generation {
                    self.connect(slot);
                }
            }
            Event::CrtExpiry {
                slot,
                generation,
                collided,
            } => {
                if self.ues[slot].generation == generation {
                    let why = if collided {
                        Failure::Msg3Collision
                    } else {
                        Failure::CrtExpired
                    };
                    self.fail(slot, now, why);
                }
            }
        }
    }

    fn rao(&mut self, now: u64, groups: &mut Vec<(u32, usize)>) {
        let sys = self.cfg.system;
        groups.clear();
        for slot in self.waiting.drain(..) {
            let preamble = self.rng.random_range(0..sys.d);
            let ue = &mut self.ues[slot];
            ue.generation = ue.generation.wrapping_add(1);
            ue.state = AttemptState::AwaitingRar;
            ue.chosen_preamble = preamble;
            ue.msg1_at = now;
            ue.rar_deadline = now + u64::from(sys.t_enb_proc) + u64::from(sys.t_rar);
            ue.crt_deadline = now + u64::from(sys.t_crt);
            self.calendar.schedule(
                ue.rar_deadline,
                Event::RarDeadline {
                    slot,
                    generation: ue.generation,
                },
            );
            groups.push((preamble, slot));
        }
        if groups.is_empty() {
            return;
        }
        // The eNodeB sees only which preambles were used, one grant per preamble.
        groups.sort_unstable();
        let counted = self.in_window(now);
        let mut activations = 0u32;
        let mut start = 0;
        while start < groups.len() {
            let preamble = groups[start].0;
            let end = start + groups[start..].iter().take_while(|g| g.0 == preamble).count();
            let ues: Vec<usize> = groups[start..end].iter().map(|g| g.1).collect();
            if counted && ues.len() > 1 {
                self.stats.collided_transmissions += ues.len() as u64;
            }
            self.queue.push(Grant {
                rao: now,
                preamble,
                ues,
            });
            activations += 1;
            start = end;
        }
        self.stats.max_activations_per_rao = self.stats.max_activations_per_rao.max(activations);
        if counted {
            self.stats.transmissions += groups.len() as u64;
            self.stats.activations += u64::from(activations);
        }
    }

    fn serve_grants(&mut self, now: u64) {
        let sys = self.cfg.system;
        let service = self.queue.serve(now);
        self.stats.max_grants_per_subframe =
            self.stats.max_grants_per_subframe.max(service.served.len() as u32);
        for grant in &service.expired {
            if self.in_window(grant.rao) {
                self.stats.grants_expired += 1;
            }
        }
        let msg4_at = now + u64::from(sys.t_ue_proc) + u64::from(sys.t_enb_proc);
        for grant in service.served {
            if self.in_window(grant.rao) {
                self.stats.grants_served += 1;
            }
            let collided = grant.ues.len() > 1;
            for slot in grant.ues {
                let ue = &mut self.ues[slot];
                ue.state = AttemptState::AwaitingMsg4;
                let generation = ue.generation;
                if !collided && msg4_at <= ue.crt_deadline {
                    self.calendar.schedule(msg4_at, Event::Msg4 { slot, generation });
                } else {
                    let at = ue.crt_deadline;
                    self.calendar.schedule(
                        at,
                        Event::CrtExpiry {
                            slot,
                            generation,
                            collided,
                        },
                    );
                }
            }
        }
    }

    fn fail(&mut self, slot: usize, now: u64, why: Failure) {
        let sys = self.cfg.system;
        if self.in_window(self.ues[slot].msg1_at) {
            let f = &mut self.stats.failures;
            match why {
                Failure::RarExpired => f.rar_expired += 1,
                Failure::Msg3Collision => f.msg3_collision += 1,
                Failure::CrtExpired => f.crt_expired += 1,
            }
        }
        if self.ues[slot].attempt_index >= sys.m {
            self.ues[slot].state = AttemptState::Dropped;
            self.complete(slot);
            return;
        }
        let backoff = u64::from(self.rng.random_range(0..=sys.w_c));
        let ue = &mut self.ues[slot];
        ue.attempt_index += 1;
        // Invalidate any timer still pending for the failed attempt.
        ue.generation = ue.generation.wrapping_add(1);
        if backoff == 0 {
            ue.state = AttemptState::AwaitingRao;
            self.waiting.push(slot);
        } else {
            ue.state = AttemptState::Backoff;
            self.calendar.schedule(now + backoff, Event::Ready { slot });
        }
    }

    fn connect(&mut self, slot: usize) {
        self.ues[slot].state = AttemptState::Connected;
        self.complete(slot);
    }

    fn complete(&mut self, slot: usize) {
        let ue = &mut self.ues[slot];
        if ue.arrival >= self.cfg.warmup {
            match ue.state {
                AttemptState::Connected => self.stats.connects += 1,
                AttemptState::Dropped => self.stats.drops += 1,
                _ => unreachable!("complete() on a live attempt"),
            }
            self.completed_tx += u64::from(ue.attempt_index) + 1;
        }
        // Stale calendar entries for this slot carry an old generation.
        ue.generation = ue.generation.wrapping_add(1);
        self.free.push(slot);
    }

    fn finish(mut self) -> SimStats {
        let warmup = self.cfg.warmup;
        let s = &mut self.stats;
        s.in_flight = self
            .ues
            .iter()
            .filter(|ue| {
                ue.arrival >= warmup
                    && !matches!(ue.state, AttemptState::Connected | AttemptState::Dropped)
            })
            .count() as u64;
        let completed = s.connects + s.drops;
        s.outage_defined = completed > 0;
        if completed > 0 {
            s.outage_fraction = s.drops as f64 / completed as f64;
            s.mean_tx = self.completed_tx as f64 / completed as f64;
        }
        let window = s.window as f64;
        s.lambda_t = s.transmissions as f64 / window;
        s.lambda_a = s.activations as f64 / window;
        self.stats
    }
}
