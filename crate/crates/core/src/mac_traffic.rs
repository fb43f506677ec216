//! Slotted carrier-sense access for the primary network and round-robin
//! scheduling for the secondary transmitter.

use rand::Rng;

use crate::beamforming::{DofRule, Scheme};
use crate::error::{Error, Result};

/// Slotted persistent CSMA with uniform backoff in `[0, contention_window)`.
///
/// The backoff counter counts down on every idle slot, whether or not a
/// packet is queued, and freezes while the channel is sensed busy. A packet
/// leaves the queue when it is transmitted; there are no retransmissions.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryMacState {
    pub backoff_counter: u32,
    pub contention_window: u32,
    pub queue: u32,
    pub queue_limit: u32,
    /// Per-slot packet arrival probability.
    pub offered_load: f64,
    pub dropped: u64,
}

impl PrimaryMacState {
    pub fn new<R: Rng + ?Sized>(offered_load: f64, cw_min: u32, queue_limit: u32, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&offered_load) {
            return Err(Error::InvalidParameter {
                name: "offered_load",
                reason: format!("{offered_load} outside [0, 1]"),
            });
        }
        if cw_min == 0 {
            return Err(Error::InvalidParameter { name: "cw_min", reason: "must be >= 1".into() });
        }
        Ok(PrimaryMacState {
            backoff_counter: rng.random_range(0..cw_min),
            contention_window: cw_min,
            queue: 0,
            queue_limit: queue_limit.max(1),
            offered_load,
            dropped: 0,
        })
    }

    /// Advances one slot and reports whether the primary transmits in it.
    pub fn step<R: Rng + ?Sized>(&mut self, channel_busy: bool, rng: &mut R) -> bool {
        if rng.random_bool(self.offered_load) {
            if self.queue < self.queue_limit {
                self.queue += 1;
            } else {
                self.dropped += 1;
            }
        }
        if channel_busy {
            return false;
        }
        if self.backoff_counter == 0 {
            if self.queue > 0 {
                self.queue -= 1;
                self.backoff_counter = rng.random_range(0..self.contention_window);
                return true;
            }
            false
        } else {
            self.backoff_counter -= 1;
            false
        }
    }

    pub fn backlogged(&self) -> bool {
        self.queue > 0
    }
}

/// Functional form of [`PrimaryMacState::step`].
pub fn primary_mac_step<R: Rng + ?Sized>(
    state: &PrimaryMacState,
    channel_busy: bool,
    rng: &mut R,
) -> (PrimaryMacState, bool) {
    let mut next = state.clone();
    let tx = next.step(channel_busy, rng);
    (next, tx)
}

/// Energy detection at the primary: busy iff the received secondary power
/// reaches the threshold.
pub fn sensing_threshold_check(received_secondary_power: f64, threshold: f64) -> bool {
    received_secondary_power >= threshold
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SecondarySchedule {
    pub served_users: Vec<usize>,
}

impl SecondarySchedule {
    pub fn is_empty(&self) -> bool {
        self.served_users.is_empty()
    }

    pub fn len(&self) -> usize {
        self.served_users.len()
    }
}

/// Maximum number of streams a scheme can carry.
pub fn stream_cap(n_t: usize, k_r: usize, scheme: Scheme, rule: DofRule) -> usize {
    match scheme {
        Scheme::Omni => 1,
        Scheme::Mrt => n_t,
        Scheme::Zf => rule.max_constrained(n_t).saturating_sub(k_r),
    }
}

/// Round-robin over the queued users, remembering where it stopped.
#[derive(Debug, Clone, Default)]
pub struct RoundRobin {
    cursor: usize,
}

impl RoundRobin {
    pub fn schedule(
        &mut self,
        queued_users: &[usize],
        n_t: usize,
        k_r: usize,
        scheme: Scheme,
        rule: DofRule,
    ) -> SecondarySchedule {
        if queued_users.is_empty() {
            return SecondarySchedule::default();
        }
        let take = stream_cap(n_t, k_r, scheme, rule).min(queued_users.len());
        let start = self.cursor % queued_users.len();
        let served_users = (0..take).map(|i| queued_users[(start + i) % queued_users.len()]).collect();
        self.cursor = (start + take) % queued_users.len();
        SecondarySchedule { served_users }
    }
}

/// One-shot schedule starting from the head of the queue with strict DoF.
pub fn schedule_secondary(queued_users: &[usize], n_t: usize, k_r: usize, scheme: Scheme) -> SecondarySchedule {
    RoundRobin::default().schedule(queued_users, n_t, k_r, scheme, DofRule::Strict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn transmit_fraction(load: f64, cw: u32, busy: bool, slots: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut mac = PrimaryMacState::new(load, cw, 1000, &mut rng).unwrap();
        let tx = (0..slots).filter(|_| mac.step(busy, &mut rng)).count();
        tx as f64 / slots as f64
    }

    #[test]
    fn idle_load_never_transmits() {
        assert_eq!(transmit_fraction(0.0, 16, false, 10_000), 0.0);
    }

    #[test]
    fn saturated_sole_occupant_matches_renewal_rate() {
        // cycle length is 1 + backoff, backoff uniform on {0,1,2,3}
        let renewal = 1.0 / (1.0 + 1.5);
        let got = transmit_fraction(1.0, 4, false, 200_000);
        assert!((got - renewal).abs() < 0.005, "{got}");
    }

    #[test]
    fn permanent_busy_freezes_backoff() {
        assert_eq!(transmit_fraction(1.0, 16, true, 10_000), 0.0);
    }

    #[test]
    fn functional_step_matches_method() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let state = PrimaryMacState::new(0.5, 8, 10, &mut rng).unwrap();
        let mut a = rng.clone();
        let mut b = rng.clone();
        let (next, tx) = primary_mac_step(&state, false, &mut a);
        let mut m = state.clone();
        assert_eq!(m.step(false, &mut b), tx);
        assert_eq!(m, next);
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(PrimaryMacState::new(1.5, 16, 10, &mut rng).is_err());
        assert!(PrimaryMacState::new(0.5, 0, 10, &mut rng).is_err());
    }

    #[test]
    fn sensing_threshold_boundary() {
        assert!(!sensing_threshold_check(0.0, 1e-9));
        assert!(sensing_threshold_check(1e-9, 1e-9));
        assert!(!sensing_threshold_check(1e-20 * 1e-3, 6.3e-10));
    }

    #[test]
    fn schedule_examples() {
        for scheme in [Scheme::Omni, Scheme::Mrt, Scheme::Zf] {
            assert_eq!(schedule_secondary(&[7], 4, 1, scheme).served_users, vec![7]);
            assert!(schedule_secondary(&[], 4, 1, scheme).is_empty());
        }
        let users = [0, 1, 2, 3, 4];
        let mut rr = RoundRobin::default();
        let seen: Vec<_> =
            (0..4).map(|_| rr.schedule(&users, 4, 1, Scheme::Zf, DofRule::Strict).served_users).collect();
        assert_eq!(seen, vec![vec![0, 1], vec![2, 3], vec![4, 0], vec![1, 2]]);
        assert_eq!(schedule_secondary(&users, 4, 0, Scheme::Mrt).len(), 4);
        assert_eq!(schedule_secondary(&users, 4, 0, Scheme::Omni).len(), 1);
    }

    #[test]
    fn round_robin_serves_evenly() {
        let users: Vec<usize> = (0..5).collect();
        let mut rr = RoundRobin::default();
        let mut served = [0usize; 5];
        let m = 7;
        for _ in 0..users.len() * m {
            for u in rr.schedule(&users, 4, 1, Scheme::Zf, DofRule::Strict).served_users {
                served[u] += 1;
            }
        }
        assert!(served.iter().all(|&n| n.abs_diff(m * 2) <= 1), "{served:?}");
    }
}
