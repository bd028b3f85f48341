use crate::estimators::SnrEstimate;

/// Block at which the estimated SNR rose through the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResyncTrigger {
    pub block_index: usize,
    /// Seconds.
    pub time: f64,
}

/// Emits a trigger at every block `k` with `snr(k-1) < threshold <= snr(k)`
/// (dB). Triggers closer than `refractory_blocks` to the previous one are
/// suppressed; a value of 1 suppresses nothing.
pub fn resync_controller(
    trace: &[SnrEstimate],
    threshold_db: f64,
    refractory_blocks: usize,
) -> Vec<ResyncTrigger> {
    let mut out: Vec<ResyncTrigger> = Vec::new();
    for pair in trace.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        if prev.db() < threshold_db && cur.db() >= threshold_db {
            if let Some(last) = out.last() {
                if cur.block_index - last.block_index < refractory_blocks {
                    continue;
                }
            }
            out.push(ResyncTrigger {
                block_index: cur.block_index,
                time: cur.time,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FadingProfile;
    use crate::estimators::Method;
    use crate::signal::db_to_linear;

    fn trace(db: impl IntoIterator<Item = f64>) -> Vec<SnrEstimate> {
        db.into_iter()
            .enumerate()
            .map(|(k, d)| SnrEstimate {
                value: db_to_linear(d),
                method: Method::M2m4,
                block_index: k,
                block_len: 10_000,
                time: (k as f64 + 0.5) * 2.5e-6,
            })
            .collect()
    }

    #[test]
    fn rising_trace_one_event() {
        let ev = resync_controller(&trace((0..20).map(|k| -5.0 + 0.7 * k as f64)), 0.0, 1);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].block_index, 8);
    }

    #[test]
    fn falling_trace_no_event() {
        let ev = resync_controller(&trace((0..20).map(|k| 5.0 - 0.7 * k as f64)), 0.0, 1);
        assert!(ev.is_empty());
    }

    #[test]
    fn landing_on_threshold_counts() {
        let ev = resync_controller(&trace([-1.0, 0.0, 1.0]), 0.0, 1);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].block_index, 1);
    }

    #[test]
    fn triangle_two_periods_two_events() {
        let p = FadingProfile::triangular(250e-6, 7.0, -10.0);
        let t = trace((0..200).map(|k| p.snr_at((k as f64 + 0.5) * 2.5e-6)));
        assert_eq!(resync_controller(&t, 0.0, 1).len(), 2);
    }

    #[test]
    fn refractory_suppresses_chatter() {
        let t = trace([-1.0, 1.0, -1.0, 1.0, -1.0, 1.0]);
        assert_eq!(resync_controller(&t, 0.0, 1).len(), 3);
        assert_eq!(resync_controller(&t, 0.0, 3).len(), 2);
        assert_eq!(resync_controller(&t, 0.0, 10).len(), 1);
    }
}
