//! Parameter-plane sweeps: region labels on a grid over `(eps, q_tilde)` and
//! the two separatrix curves, with optional profile shooting per cell.

use rayon::prelude::*;

use crate::classification::{classify_detailed, separatrix_q1, separatrix_q2, RegionLabel};
use crate::cubic::epsilon_hat;
use crate::error::{Error, Result};
use crate::profile::{shoot, ShootOptions, Verdict};

/// Grids stay this far inside the parameter square.
pub const MARGIN: f64 = 1e-6;
/// Smallest admissible dissipation value on a grid.
pub const EPS_MIN: f64 = 1e-6;
/// Points per separatrix polyline.
pub const CURVE_POINTS: usize = 401;

/// `(eps, q)` vertices of a separatrix.
pub type Polyline = Vec<[f64; 2]>;

/// `count` equally spaced values from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Self {
        Axis { lo, hi, count }
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub eps: Axis,
    pub q: Axis,
    /// Shoot a profile in every cell with these options.
    pub shoot: Option<ShootOptions>,
}

impl ScanConfig {
    /// An `n_eps` by `n_q` grid over the whole parameter square.
    pub fn full(n_eps: usize, n_q: usize) -> Self {
        ScanConfig {
            eps: Axis::new(EPS_MIN, 1.0, n_eps),
            q: Axis::new(0.75 + MARGIN, 1.0 - MARGIN, n_q),
            shoot: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps.count < 2 || self.q.count < 2 {
            return Err(Error::InvalidOptions(
                "grid needs at least 2 points per axis",
            ));
        }
        let Axis { lo, hi, .. } = self.eps;
        if !(lo >= EPS_MIN && lo <= hi && hi <= 1.0) {
            return Err(Error::InvalidOptions("eps range must lie in [1e-6, 1]"));
        }
        let Axis { lo, hi, .. } = self.q;
        // Compare in the shifted variable so the margin survives rounding of 3/4 + 1e-6.
        if !(lo - 0.75 >= MARGIN * (1.0 - 1e-9) && lo <= hi && 1.0 - hi >= MARGIN * (1.0 - 1e-9)) {
            return Err(Error::InvalidOptions(
                "q range must lie in [3/4 + 1e-6, 1 - 1e-6]",
            ));
        }
        if let Some(opts) = &self.shoot {
            opts.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotSummary {
    pub verdict: Verdict,
    pub oscillatory: bool,
    pub v_sign_changes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRecord {
    pub eps: f64,
    pub q_tilde: f64,
    pub label: RegionLabel,
    pub v_plus_sq: f64,
    /// `P(v_+^2, eps)`.
    pub discriminant: f64,
    pub shot: Option<ShotSummary>,
}

impl ScanRecord {
    /// The recorded sign of `P` agrees with the label (trivially on a separatrix).
    pub fn is_consistent(&self) -> bool {
        match self.label {
            RegionLabel::Focus => self.discriminant < 0.0,
            RegionLabel::NodeBelow | RegionLabel::NodeAbove => self.discriminant > 0.0,
            RegionLabel::Separatrix1 | RegionLabel::Separatrix2 => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub config: ScanConfig,
    /// Ordered by eps index, then q index.
    pub records: Vec<ScanRecord>,
    /// `(eps, q1(eps))` on `(0, 1]`.
    pub q1_curve: Polyline,
    /// `(eps, q2(eps))` on `(0, eps_hat)`.
    pub q2_curve: Polyline,
}

impl ScanResult {
    pub fn count(&self, label: RegionLabel) -> usize {
        self.records.iter().filter(|r| r.label == label).count()
    }
}

pub fn scan_cell(eps: f64, q_tilde: f64, shoot_opts: Option<&ShootOptions>) -> Result<ScanRecord> {
    let c = classify_detailed(eps, q_tilde)?;
    let shot = match shoot_opts {
        Some(opts) => {
            let r = shoot(eps, q_tilde, opts)?;
            Some(ShotSummary {
                verdict: r.verdict,
                oscillatory: r.oscillation.oscillatory,
                v_sign_changes: r.oscillation.v_sign_changes(),
            })
        }
        None => None,
    };
    Ok(ScanRecord {
        eps,
        q_tilde,
        label: c.label,
        v_plus_sq: c.v_plus_sq,
        discriminant: c.discriminant,
        shot,
    })
}

/// Separatrix polylines sampled at `n` points each.
pub fn separatrix_curves(n: usize) -> Result<(Polyline, Polyline)> {
    let upper = Axis::new(EPS_MIN, 1.0, n);
    let q1 = upper
        .values()
        .into_iter()
        .map(|e| Ok([e, separatrix_q1(e)?]))
        .collect::<Result<Vec<_>>>()?;
    let lower = Axis::new(EPS_MIN, epsilon_hat() - MARGIN, n);
    let q2 = lower
        .values()
        .into_iter()
        .map(|e| Ok([e, separatrix_q2(e)?]))
        .collect::<Result<Vec<_>>>()?;
    Ok((q1, q2))
}

/// Evaluate every grid cell in parallel; the output order does not depend on scheduling.
pub fn run_scan(config: &ScanConfig) -> Result<ScanResult> {
    config.validate()?;
    let (ne, nq) = (config.eps.count, config.q.count);
    let records = (0..ne * nq)
        .into_par_iter()
        .map(|k| {
            scan_cell(
                config.eps.value(k / nq),
                config.q.value(k % nq),
                config.shoot.as_ref(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let (q1_curve, q2_curve) = separatrix_curves(CURVE_POINTS)?;
    Ok(ScanResult {
        config: *config,
        records,
        q1_curve,
        q2_curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_endpoints_are_exact() {
        let a = Axis::new(0.1, 0.7, 7);
        assert_eq!(a.value(0), 0.1);
        assert_eq!(a.value(6), 0.7);
        assert_eq!(a.values().len(), 7);
    }

    #[test]
    fn corner_grid_labels() {
        let cfg = ScanConfig {
            eps: Axis::new(0.999, 1.0, 2),
            q: Axis::new(0.75 + MARGIN, 1.0 - MARGIN, 2),
            shoot: None,
        };
        let r = run_scan(&cfg).unwrap();
        assert_eq!(r.records.len(), 4);
        assert_eq!(r.records[2].label, RegionLabel::NodeBelow);
        assert_eq!(r.records[3].label, RegionLabel::Focus);
        assert_eq!(
            (r.records[3].eps, r.records[3].q_tilde),
            (1.0, 1.0 - MARGIN)
        );
    }

    #[test]
    fn coarse_grid_has_all_regions() {
        let r = run_scan(&ScanConfig::full(40, 40)).unwrap();
        assert_eq!(r.records.len(), 1600);
        for label in [
            RegionLabel::NodeBelow,
            RegionLabel::Focus,
            RegionLabel::NodeAbove,
        ] {
            assert!(r.count(label) > 0, "{label}");
        }
        assert!(r.records.iter().all(ScanRecord::is_consistent));
        assert_eq!(r.q1_curve.len(), CURVE_POINTS);
        assert_eq!(r.q2_curve.len(), CURVE_POINTS);
    }

    #[test]
    fn scans_are_deterministic() {
        let cfg = ScanConfig::full(12, 9);
        assert_eq!(run_scan(&cfg).unwrap(), run_scan(&cfg).unwrap());
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = ScanConfig::full(1, 5);
        assert!(run_scan(&cfg).is_err());
        cfg = ScanConfig::full(5, 5);
        cfg.eps.lo = 0.0;
        assert!(cfg.validate().is_err());
        cfg = ScanConfig::full(5, 5);
        cfg.q.hi = 1.0;
        assert!(cfg.validate().is_err());
        cfg = ScanConfig::full(5, 5);
        cfg.shoot = Some(ShootOptions {
            offset: -1.0,
            ..Default::default()
        });
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn shooting_cells_report_verdicts() {
        let cfg = ScanConfig {
            eps: Axis::new(0.9, 1.0, 2),
            q: Axis::new(0.76, 0.9, 2),
            shoot: Some(ShootOptions::default()),
        };
        let r = run_scan(&cfg).unwrap();
        for rec in &r.records {
            let s = rec.shot.unwrap();
            assert_eq!(s.verdict, Verdict::ConvergedToPlus);
            assert_eq!(s.oscillatory, rec.label == RegionLabel::Focus, "{rec:?}");
        }
    }
}
