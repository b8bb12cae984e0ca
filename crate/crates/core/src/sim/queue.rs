use std::collections::VecDeque;

/// Uplink grant for one activated preamble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grant {
    /// Subframe of the RAO in which the preamble was detected.
    pub rao: u64,
    pub preamble: u32,
    /// Slots of every UE that sent this preamble.
    pub ues: Vec<usize>,
}

/// Outcome of one subframe of grant service.
#[derive(Debug, Default)]
pub struct Service {
    pub served: Vec<Grant>,
    /// Grants whose RAR window closed before they reached the head.
    pub expired: Vec<Grant>,
}

/// FIFO of pending uplink grants served at most `mu` per subframe.
///
/// A grant becomes eligible `proc_delay` subframes after its RAO and can be
/// sent during the following `window` subframes; older grants are discarded.
#[derive(Debug)]
pub struct RarQueue {
    pending: VecDeque<Grant>,
    mu: u32,
    proc_delay: u64,
    window: u64,
}

impl RarQueue {
    pub fn new(mu: u32, proc_delay: u64, window: u64) -> Self {
        Self {
            pending: VecDeque::new(),
            mu,
            proc_delay,
            window,
        }
    }

    /// Grants must be pushed in non-decreasing RAO order.
    pub fn push(&mut self, grant: Grant) {
        debug_assert!(self.pending.back().is_none_or(|g| g.rao <= grant.rao));
        self.pending.push_back(grant);
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Last subframe in which a grant from `rao` may still be sent.
    pub fn last_chance(&self, rao: u64) -> u64 {
        rao + self.proc_delay + self.window - 1
    }

    /// Serves subframe `now`.
    pub fn serve(&mut self, now: u64) -> Service {
        let mut out = Service::default();
        while (out.served.len() as u32) < self.mu {
            let Some(head) = self.pending.front() else { break };
            if head.rao + self.proc_delay > now {
                break;
            }
            let grant = self.pending.pop_front().expect("front exists");
            if now > self.last_chance(grant.rao) {
                out.expired.push(grant);
            } else {
                out.served.push(grant);
            }
        }
        // Drop stale grants sitting behind the service cap as well, so that
        // expiry is accounted in the subframe it happens.
        while let Some(head) = self.pending.front() {
            if now > self.last_chance(head.rao) {
                out.expired.push(self.pending.pop_front().expect("front exists"));
            } else {
                break;
            }
        }
        out
    }
}
