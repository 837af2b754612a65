//! Closed-form slot, gate-count and native-metric predictions for the
//! QFT-based constructions. Measured values are compared against these. The
//! native figures depend on how gates get merged during lowering, so expect
//! deviations there.

use crate::synthesis::Method;

fn ni(n: usize) -> i64 {
    n as i64
}

/// Abstract time slots on a fully connected device. For `mcu-zyz` this
/// excludes the up to three extra slots taken by `A`, `B` and `C`.
pub fn abstract_slots(method: Method, n: usize) -> Option<i64> {
    let n = ni(n);
    match method {
        Method::McuMod => Some(8 * n - 18),
        Method::McuZyz => Some(8 * n - 12),
        _ => None,
    }
}

/// Slots saved on the QFT-based MCX by merging the phase columns.
pub const MCX_MERGE_SAVING: i64 = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AbstractCounts {
    pub h: i64,
    pub cp: i64,
    pub cu2: i64,
    pub cx: i64,
}

pub fn abstract_counts(method: Method, n: usize) -> Option<AbstractCounts> {
    let n = ni(n);
    match method {
        Method::McuMod => Some(AbstractCounts { h: 4 * (n - 3), cp: 2 * (n - 1) * (n - 3), cu2: 2 * n - 3, cx: 2 }),
        Method::McuZyz => Some(AbstractCounts { h: 4 * (n - 2), cp: 2 * n * (n - 2), cu2: 0, cx: 2 }),
        _ => None,
    }
}

/// Counts after dropping every controlled root with index above `l`.
pub fn aqft_counts(method: Method, n: usize, l: u32) -> Option<AbstractCounts> {
    let full = abstract_counts(method, n)?;
    let (n, l) = (ni(n), l as i64);
    // the deepest root in mcu-mod has index n - 1, so nothing is dropped there
    let keeps_all = match method {
        Method::McuMod => l >= n - 1,
        _ => l >= n,
    };
    if keeps_all {
        return Some(full);
    }
    let cp = match method {
        Method::McuMod => 2 * (l - 1) * (2 * n - 3 - l),
        _ => 2 * (l - 1) * (2 * n - 1 - l),
    };
    let cu2 = if method == Method::McuMod { 2 * (l - 1) } else { 0 };
    Some(AbstractCounts { cp, cu2, ..full })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NativePrediction {
    pub depth: i64,
    pub rz: i64,
    pub sx: i64,
    pub cx: i64,
}

pub fn native_fc(method: Method, n: usize) -> Option<NativePrediction> {
    let n = ni(n);
    match method {
        Method::McuMod => Some(NativePrediction {
            depth: 34 * n - 56,
            rz: 6 * n * n - 8 * n - 13,
            sx: 12 * (n - 2),
            cx: 4 * (n * n - 3 * n + 4),
        }),
        Method::McuZyz => {
            Some(NativePrediction { depth: 32 * n - 44, rz: 6 * n * n - 8 * n - 4, sx: 4 * (n - 1), cx: 4 * n * n - 6 })
        }
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LnnOverhead {
    pub depth: i64,
    pub cx: i64,
    pub swaps: i64,
    pub slots: i64,
}

/// What routing on a line adds on top of the fully connected figures.
pub fn lnn_overhead(method: Method, n: usize) -> Option<LnnOverhead> {
    let n = ni(n);
    match method {
        Method::McuMod => Some(LnnOverhead {
            depth: 24 * n - 64,
            cx: 6 * n * n - 18 * n + 14,
            swaps: 2 * n * n - 6 * n + 6,
            slots: 8 * n - 20,
        }),
        Method::McuZyz => Some(LnnOverhead {
            depth: 24 * n - 52,
            cx: 6 * n * n - 12 * n + 2,
            swaps: 2 * (n - 1) * (n - 1),
            slots: 8 * n - 16,
        }),
        _ => None,
    }
}

/// Predicted native depth for the architecture, `lnn` adding its overhead.
pub fn native_depth(method: Method, n: usize, lnn: bool) -> Option<i64> {
    let fc = native_fc(method, n)?.depth;
    if lnn {
        Some(fc + lnn_overhead(method, n)?.depth)
    } else {
        Some(fc)
    }
}

/// Control-wire Rz saved by dropping the CP corrections inside the blocks.
pub fn mod_rz_saving(n: usize) -> i64 {
    2 * (ni(n) - 1) * (ni(n) - 3)
}

/// CX removed by cancelling pairs between adjacent CP lowerings.
pub fn cx_cancellations(method: Method, n: usize) -> Option<i64> {
    let n = ni(n);
    match method {
        Method::McuMod => Some(4 * (n - 1) * (n - 3)),
        Method::McuZyz => Some(4 * n * (n - 2)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n5_targets() {
        let m = native_fc(Method::McuMod, 5).unwrap();
        assert_eq!((m.depth, m.rz, m.sx, m.cx), (114, 97, 36, 56));
        let z = native_fc(Method::McuZyz, 5).unwrap();
        assert_eq!((z.depth, z.rz, z.sx, z.cx), (116, 106, 16, 94));
        assert_eq!(lnn_overhead(Method::McuMod, 5).unwrap().swaps, 26);
    }

    #[test]
    fn full_cutoff_is_identity() {
        assert_eq!(aqft_counts(Method::McuMod, 6, 6), abstract_counts(Method::McuMod, 6));
    }

    #[test]
    fn ldd_has_no_prediction() {
        assert!(native_fc(Method::Ldd, 6).is_none());
        assert!(abstract_slots(Method::McxQft, 6).is_none());
    }
}
