//! Monotonicity diagnostics of a sampled trajectory in three coordinate systems.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{kinematics, GodunovState, Kinematics};

/// Relative noise floor (fraction of a component's range or magnitude,
/// whichever is larger) below which wiggles and deviations from the limit are ignored.
pub const NOISE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoordinateSystem {
    /// `(psi0, psi1)`
    Godunov,
    /// `(theta, v)`
    ThetaV,
    /// `(u, v)`
    UV,
}

impl CoordinateSystem {
    pub const ALL: [CoordinateSystem; 3] = [
        CoordinateSystem::Godunov,
        CoordinateSystem::ThetaV,
        CoordinateSystem::UV,
    ];

    pub fn component_names(&self) -> [&'static str; 2] {
        match self {
            CoordinateSystem::Godunov => ["psi0", "psi1"],
            CoordinateSystem::ThetaV => ["theta", "v"],
            CoordinateSystem::UV => ["u", "v"],
        }
    }

    fn project(&self, psi: &GodunovState, kin: &Kinematics) -> [f64; 2] {
        match self {
            CoordinateSystem::Godunov => [psi.psi0, psi.psi1],
            CoordinateSystem::ThetaV => [kin.theta, kin.v],
            CoordinateSystem::UV => [kin.u, kin.v],
        }
    }
}

impl fmt::Display for CoordinateSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.component_names();
        write!(f, "({a},{b})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentStats {
    pub name: &'static str,
    /// Strict local extrema along the trajectory.
    pub extrema: usize,
    /// Sign changes of `value - limit`.
    pub sign_changes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemReport {
    pub system: CoordinateSystem,
    pub components: [ComponentStats; 2],
    pub oscillatory: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OscillationReport {
    pub systems: [SystemReport; 3],
    /// Some component in some system changes sign (relative to its limit) at least twice.
    pub oscillatory: bool,
}

impl OscillationReport {
    pub fn system(&self, system: CoordinateSystem) -> &SystemReport {
        self.systems
            .iter()
            .find(|r| r.system == system)
            .expect("all systems are reported")
    }

    /// Sign changes of `v - v_plus`.
    pub fn v_sign_changes(&self) -> usize {
        self.system(CoordinateSystem::UV).components[1].sign_changes
    }

    pub fn oscillatory_in_all_systems(&self) -> bool {
        self.systems.iter().all(|s| s.oscillatory)
    }
}

/// Count direction reversals whose excursion exceeds `floor`.
fn count_extrema(values: &[f64], floor: f64) -> usize {
    let mut count = 0;
    let mut anchor = values[0];
    let mut dir = 0i8;
    for &x in &values[1..] {
        match dir {
            0 => {
                if x - anchor > floor {
                    dir = 1;
                    anchor = x;
                } else if anchor - x > floor {
                    dir = -1;
                    anchor = x;
                }
            }
            1 => {
                if x > anchor {
                    anchor = x;
                } else if anchor - x > floor {
                    count += 1;
                    dir = -1;
                    anchor = x;
                }
            }
            _ => {
                if x < anchor {
                    anchor = x;
                } else if x - anchor > floor {
                    count += 1;
                    dir = 1;
                    anchor = x;
                }
            }
        }
    }
    count
}

fn count_sign_changes(values: &[f64], limit: f64, floor: f64) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for &x in values {
        let d = x - limit;
        if d.abs() <= floor {
            continue;
        }
        let s = if d > 0.0 { 1 } else { -1 };
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn component_stats(name: &'static str, values: &[f64], limit: f64) -> ComponentStats {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    // A component that stays constant to rounding must not count its noise.
    let floor = NOISE_FLOOR * (hi - lo).max(hi.abs().max(lo.abs())).max(f64::MIN_POSITIVE);
    ComponentStats {
        name,
        extrema: count_extrema(values, floor),
        sign_changes: count_sign_changes(values, limit, floor),
    }
}

/// Extremum and limit-crossing counts for the states `samples` approaching `psi_plus`.
pub fn oscillation_report(
    samples: &[GodunovState],
    psi_plus: &GodunovState,
) -> Result<OscillationReport> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    let kins = samples.iter().map(kinematics).collect::<Result<Vec<_>>>()?;
    let kin_plus = kinematics(psi_plus)?;

    let systems = CoordinateSystem::ALL.map(|system| {
        let names = system.component_names();
        let limit = system.project(psi_plus, &kin_plus);
        let components = [0, 1].map(|c| {
            let series: Vec<f64> = samples
                .iter()
                .zip(&kins)
                .map(|(p, k)| system.project(p, k)[c])
                .collect();
            component_stats(names[c], &series, limit[c])
        });
        SystemReport {
            system,
            components,
            oscillatory: components.iter().any(|c| c.sign_changes >= 2),
        }
    });
    let oscillatory = systems.iter().any(|s| s.oscillatory);
    Ok(OscillationReport {
        systems,
        oscillatory,
    })
}
