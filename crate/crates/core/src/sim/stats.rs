/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `errors` out of `trials` at confidence `z`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// One point of a BLER curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BlerPoint {
    pub ebn0_db: f64,
    pub trials: u64,
    pub errors: u64,
    /// CRC passed but the payload was wrong (already included in `errors`).
    pub undetected: u64,
    pub bler: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

impl BlerPoint {
    pub fn new(ebn0_db: f64, trials: u64, errors: u64, undetected: u64) -> Self {
        let (ci95_low, ci95_high) = wilson_interval(errors, trials, Z95);
        let bler = if trials == 0 {
            0.0
        } else {
            errors as f64 / trials as f64
        };
        BlerPoint {
            ebn0_db,
            trials,
            errors,
            undetected,
            bler,
            ci95_low,
            ci95_high,
        }
    }

    pub fn overlaps(&self, other: &BlerPoint) -> bool {
        self.ci95_low <= other.ci95_high && other.ci95_low <= self.ci95_high
    }
}

/// Eb/N0 where the curve crosses `target`, by linear interpolation of
/// log10(BLER) between the bracketing points. Points with zero errors are
/// skipped. `None` when the curve never brackets the target.
pub fn snr_at_bler(points: &[BlerPoint], target: f64) -> Option<f64> {
    let mut pts: Vec<&BlerPoint> = points.iter().filter(|p| p.errors > 0).collect();
    pts.sort_by(|a, b| a.ebn0_db.total_cmp(&b.ebn0_db));
    let lt = target.log10();
    pts.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        let (la, lb) = (a.bler.log10(), b.bler.log10());
        if la >= lt && lb <= lt && la != lb {
            Some(a.ebn0_db + (la - lt) / (la - lb) * (b.ebn0_db - a.ebn0_db))
        } else if la == lt {
            Some(a.ebn0_db)
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_errors_has_zero_lower_bound() {
        let (lo, hi) = wilson_interval(0, 100, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
    }

    #[test]
    fn known_interval() {
        // 10 of 100: textbook Wilson interval (0.0552, 0.1744)
        let (lo, hi) = wilson_interval(10, 100, Z95);
        assert!((lo - 0.0552).abs() < 1e-4, "{lo}");
        assert!((hi - 0.1744).abs() < 1e-4, "{hi}");
    }

    #[test]
    fn width_shrinks_like_inverse_sqrt() {
        for &p in &[0.01, 0.1, 0.5] {
            let mut prev: Option<f64> = None;
            for &n in &[1_000u64, 4_000, 16_000, 64_000] {
                let e = (p * n as f64).round() as u64;
                let (lo, hi) = wilson_interval(e, n, Z95);
                let w = hi - lo;
                if let Some(pw) = prev {
                    let ratio = pw / w;
                    assert!((ratio - 2.0).abs() < 0.15, "p={p} n={n} ratio={ratio}");
                }
                prev = Some(w);
            }
        }
    }

    #[test]
    fn interpolation() {
        let pts = vec![BlerPoint::new(1.0, 1000, 100, 0), BlerPoint::new(2.0, 1000, 1, 0)];
        let s = snr_at_bler(&pts, 0.01).unwrap();
        assert!((s - 1.5).abs() < 1e-12);
        assert!(snr_at_bler(&pts, 0.5).is_none());
    }
}
