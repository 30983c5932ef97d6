//! CSV, JSON and SVG renderings of scans and profiles.
//!
//! Every float is written with 17 significant digits so that identical runs
//! produce identical bytes and values round-trip exactly.

use std::fmt::Write;

use radshock::classification::RegionLabel;
use radshock::cubic::epsilon_hat;
use radshock::profile::ProfileResult;
use radshock::scan::ScanResult;
use serde_json::{json, Map, Number, Value};

pub const SCHEMA_VERSION: u32 = 1;

pub const SCAN_HEADER: &str = "eps,q_tilde,region,v_plus_sq,discriminant,shoot_verdict,oscillatory";
pub const PROFILE_HEADER: &str = "pseudo_time,psi0,psi1,theta,u,v";

pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn fmt_complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        fmt17(re)
    } else if im > 0.0 {
        format!("{} + {}i", fmt17(re), fmt17(im))
    } else {
        format!("{} - {}i", fmt17(re), fmt17(-im))
    }
}

/// A JSON number carrying exactly the digits of [`fmt17`]; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    fmt17(x)
        .parse::<Number>()
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn pairs(points: &[[f64; 2]]) -> Value {
    Value::Array(
        points
            .iter()
            .map(|p| json!([num(p[0]), num(p[1])]))
            .collect(),
    )
}

pub fn scan_csv(scan: &ScanResult) -> String {
    let mut out = String::new();
    out.push_str(SCAN_HEADER);
    out.push('\n');
    for r in &scan.records {
        let (verdict, osc) = match &r.shot {
            Some(s) => (s.verdict.as_str().to_string(), s.oscillatory.to_string()),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt17(r.eps),
            fmt17(r.q_tilde),
            r.label,
            fmt17(r.v_plus_sq),
            fmt17(r.discriminant),
            verdict,
            osc
        );
    }
    for (name, curve) in [("q1", &scan.q1_curve), ("q2", &scan.q2_curve)] {
        let _ = writeln!(out, "# separatrix {name}");
        let _ = writeln!(out, "eps,{name}");
        for p in curve.iter() {
            let _ = writeln!(out, "{},{}", fmt17(p[0]), fmt17(p[1]));
        }
    }
    out
}

pub fn scan_json(scan: &ScanResult) -> Value {
    let cfg = &scan.config;
    let records: Vec<Value> = scan
        .records
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("eps".into(), num(r.eps));
            m.insert("q_tilde".into(), num(r.q_tilde));
            m.insert("region".into(), Value::from(r.label.as_str()));
            m.insert("v_plus_sq".into(), num(r.v_plus_sq));
            m.insert("discriminant".into(), num(r.discriminant));
            m.insert(
                "shoot_verdict".into(),
                r.shot
                    .map_or(Value::Null, |s| Value::from(s.verdict.as_str())),
            );
            m.insert(
                "oscillatory".into(),
                r.shot.map_or(Value::Null, |s| Value::from(s.oscillatory)),
            );
            Value::Object(m)
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "meta": {
            "grid": [cfg.eps.count, cfg.q.count],
            "eps_range": [num(cfg.eps.lo), num(cfg.eps.hi)],
            "q_range": [num(cfg.q.lo), num(cfg.q.hi)],
            "shoot": cfg.shoot.is_some(),
            "eps_hat": num(epsilon_hat()),
        },
        "records": records,
        "separatrices": {
            "q1": pairs(&scan.q1_curve),
            "q2": pairs(&scan.q2_curve),
        },
    })
}

fn color(label: RegionLabel) -> &'static str {
    match label {
        RegionLabel::NodeBelow => "#4c72b0",
        RegionLabel::Focus => "#dd8452",
        RegionLabel::NodeAbove => "#55a868",
        RegionLabel::Separatrix1 | RegionLabel::Separatrix2 => "#222222",
    }
}

/// Region map over the `(eps, q_tilde)` square with both separatrices.
pub fn scan_svg(scan: &ScanResult) -> String {
    const W: f64 = 600.0;
    const H: f64 = 600.0;
    const PAD: f64 = 60.0;
    let x = |e: f64| PAD + W * e;
    let y = |q: f64| PAD + H * (1.0 - (q - 0.75) / 0.25);

    let cfg = &scan.config;
    let (ne, nq) = (cfg.eps.count, cfg.q.count);
    let cell_w = W * (cfg.eps.hi - cfg.eps.lo) / (ne - 1) as f64;
    let cell_h = H * (cfg.q.hi - cfg.q.lo) / 0.25 / (nq - 1) as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        W + 2.0 * PAD,
        H + 2.0 * PAD,
        W + 2.0 * PAD,
        H + 2.0 * PAD
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g shape-rendering=\"crispEdges\">\n");
    for r in &scan.records {
        let _ = writeln!(
            s,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
            x(r.eps) - 0.5 * cell_w,
            y(r.q_tilde) - 0.5 * cell_h,
            cell_w,
            cell_h,
            color(r.label)
        );
    }
    s.push_str("</g>\n");
    for (name, curve) in [("q1", &scan.q1_curve), ("q2", &scan.q2_curve)] {
        let pts: Vec<String> = curve
            .iter()
            .map(|p| format!("{:.3},{:.3}", x(p[0]), y(p[1])))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline id="{name}" fill="none" stroke="black" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{W}" height="{H}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let e = k as f64 / 4.0;
        let q = 0.75 + 0.0625 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{e}</text>"#,
            x(e),
            PAD + H + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="end">{q}</text>"#,
            PAD - 6.0,
            y(q) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">eps</text>"#,
        PAD + 0.5 * W,
        PAD + H + 40.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-size="14" text-anchor="middle" transform="rotate(-90 16 {:.1})">q_tilde</text>"#,
        PAD + 0.5 * H,
        PAD + 0.5 * H
    );
    s.push_str("</svg>\n");
    s
}

pub fn profile_csv(r: &ProfileResult) -> String {
    let mut out = String::new();
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    for s in &r.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt17(s.t),
            fmt17(s.psi.psi0),
            fmt17(s.psi.psi1),
            fmt17(s.kin.theta),
            fmt17(s.kin.u),
            fmt17(s.kin.v)
        );
    }
    out
}

pub fn profile_summary(r: &ProfileResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "eps = {}", fmt17(r.eps));
    let _ = writeln!(s, "q_tilde = {}", fmt17(r.q_tilde));
    let _ = writeln!(s, "verdict = {}", r.verdict);
    let _ = writeln!(s, "oscillatory = {}", r.oscillation.oscillatory);
    let _ = writeln!(s, "samples = {}", r.samples.len());
    let _ = writeln!(s, "steps = {}", r.steps);
    let _ = writeln!(
        s,
        "final_pseudo_time = {}",
        fmt17(r.samples.last().map_or(0.0, |x| x.t))
    );
    let _ = writeln!(
        s,
        "final_distance_rel = {}",
        fmt17(r.final_distance / r.amplitude())
    );
    for sys in &r.oscillation.systems {
        for c in &sys.components {
            let _ = writeln!(
                s,
                "{} {}: extrema = {}, sign_changes = {}",
                sys.system, c.name, c.extrema, c.sign_changes
            );
        }
    }
    s
}

pub fn profile_json(r: &ProfileResult) -> Value {
    let systems: Vec<Value> = r
        .oscillation
        .systems
        .iter()
        .map(|sys| {
            let comps: Vec<Value> = sys
                .components
                .iter()
                .map(|c| json!({"name": c.name, "extrema": c.extrema, "sign_changes": c.sign_changes}))
                .collect();
            json!({"system": sys.system.to_string(), "oscillatory": sys.oscillatory, "components": comps})
        })
        .collect();
    let samples: Vec<Value> = r
        .samples
        .iter()
        .map(|s| {
            json!([
                num(s.t),
                num(s.psi.psi0),
                num(s.psi.psi1),
                num(s.kin.theta),
                num(s.kin.u),
                num(s.kin.v)
            ])
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "meta": {
            "eps": num(r.eps),
            "q_tilde": num(r.q_tilde),
            "psi_minus": [num(r.equilibria.psi_minus.psi0), num(r.equilibria.psi_minus.psi1)],
            "psi_plus": [num(r.equilibria.psi_plus.psi0), num(r.equilibria.psi_plus.psi1)],
        },
        "verdict": r.verdict.as_str(),
        "oscillatory": r.oscillation.oscillatory,
        "systems": systems,
        "columns": PROFILE_HEADER.split(',').collect::<Vec<_>>(),
        "samples": samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use radshock::scan::{run_scan, Axis, ScanConfig};

    fn small_scan() -> ScanResult {
        run_scan(&ScanConfig {
            eps: Axis::new(0.5, 1.0, 2),
            q: Axis::new(0.76, 0.9, 3),
            shoot: None,
        })
        .unwrap()
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 49.0 / 64.0, -2.5e-300, 1e300] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
        assert_eq!(num(f64::NAN), Value::Null);
        assert_eq!(num(0.75).to_string(), "7.5000000000000000e-1");
    }

    #[test]
    fn csv_layout() {
        let text = scan_csv(&small_scan());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SCAN_HEADER);
        assert!(lines[1..7].iter().all(|l| l.split(',').count() == 7));
        assert_eq!(lines[7], "# separatrix q1");
        assert_eq!(lines[8], "eps,q1");
        assert!(lines.contains(&"# separatrix q2"));
    }

    #[test]
    fn json_mirrors_csv() {
        let scan = small_scan();
        let v = scan_json(&scan);
        assert_eq!(v["schema_version"], 1);
        let recs = v["records"].as_array().unwrap();
        assert_eq!(recs.len(), scan.records.len());
        for (j, r) in recs.iter().zip(&scan.records) {
            assert_eq!(j["region"], r.label.as_str());
            assert_eq!(j["eps"].as_f64().unwrap(), r.eps);
            assert_eq!(j["discriminant"].as_f64().unwrap(), r.discriminant);
            assert!(j["shoot_verdict"].is_null());
        }
    }

    #[test]
    fn svg_has_cells_and_curves() {
        let svg = scan_svg(&small_scan());
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("fill=\"#").count(), 6);
    }
}
