//! Radial pictures of the spectrum and the five essential spectra, built
//! only from their JSON serialisations.

use std::fmt::Write as _;

use serde_json::Value;

const LAYERS: [&str; 6] = ["spectrum", "sigma1", "sigma2", "sigma3", "sigma4", "sigma5"];
const COLORS: [&str; 6] = ["#202020", "#b2182b", "#ef8a62", "#fddbc7", "#67a9cf", "#2166ac"];

#[derive(Clone, Debug, Default)]
struct Set {
    radial: Vec<(f64, f64)>,
    points: Vec<(f64, f64)>,
    zero: bool,
}

impl Set {
    fn parse(v: &Value) -> Result<Self, String> {
        let pairs = |key: &str| -> Result<Vec<(f64, f64)>, String> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| format!("spectral set without {key:?}"))?
                .iter()
                .map(|p| match p.as_array().map(Vec::as_slice) {
                    Some([a, b]) => match (a.as_f64(), b.as_f64()) {
                        (Some(a), Some(b)) => Ok((a, b)),
                        _ => Err(format!("non-numeric pair in {key:?}")),
                    },
                    _ => Err(format!("malformed pair in {key:?}")),
                })
                .collect()
        };
        Ok(Self {
            radial: pairs("radial")?,
            points: pairs("points")?,
            zero: v.get("zero").and_then(Value::as_bool).unwrap_or(false),
        })
    }

    fn covers(&self, t: f64) -> bool {
        self.radial.iter().any(|&(a, b)| a <= t && t <= b)
    }

    fn phases_at(&self, t: f64) -> Vec<f64> {
        self.points.iter().filter(|p| p.0 == t).map(|p| p.1).collect()
    }
}

fn layers(spectrum: &Value, essential: &Value) -> Result<Vec<Set>, String> {
    let mut out = vec![Set::parse(spectrum)?];
    for key in &LAYERS[1..] {
        out.push(Set::parse(
            essential.get(*key).ok_or_else(|| format!("essential output without {key:?}"))?,
        )?);
    }
    Ok(out)
}

fn critical_radii(sets: &[Set]) -> Vec<f64> {
    let mut radii: Vec<f64> = sets
        .iter()
        .flat_map(|s| {
            s.radial
                .iter()
                .flat_map(|&(a, b)| [a, b])
                .chain(s.points.iter().map(|p| p.0))
        })
        .collect();
    radii.sort_by(|a, b| b.total_cmp(a));
    radii.dedup();
    radii
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// One labelled row per critical log-radius, outermost first, with an
/// unlabelled row for each open gap between consecutive radii. `#` marks a
/// covered radius, `*` discrete points (phases listed on the right).
pub fn ascii(spectrum: &Value, essential: &Value) -> Result<String, String> {
    let sets = layers(spectrum, essential)?;
    let radii = critical_radii(&sets);
    let mut out = String::new();
    let _ = writeln!(out, "{:>10}  {}", "log|z|", LAYERS.map(|l| format!("{l:>8}")).join(""));
    let row = |label: String, cells: Vec<String>, note: String| {
        let mut line = format!("{label:>10}  {}", cells.iter().map(|c| format!("{c:>8}")).collect::<String>());
        if !note.is_empty() {
            line.push_str("  ");
            line.push_str(&note);
        }
        line.trim_end().to_string()
    };
    for (i, &t) in radii.iter().enumerate() {
        let mut phases = Vec::new();
        let cells = sets
            .iter()
            .map(|s| {
                let at = s.phases_at(t);
                if s.covers(t) {
                    "#".to_string()
                } else if !at.is_empty() {
                    phases.extend(at);
                    "*".to_string()
                } else {
                    ".".to_string()
                }
            })
            .collect();
        phases.sort_by(f64::total_cmp);
        phases.dedup();
        let note = if phases.is_empty() {
            String::new()
        } else {
            format!("phases {}", phases.iter().map(|p| fmt_num(*p)).collect::<Vec<_>>().join(" "))
        };
        let _ = writeln!(out, "{}", row(fmt_num(t), cells, note));
        if let Some(&next) = radii.get(i + 1) {
            let mid = (t + next) / 2.0;
            let cells = sets
                .iter()
                .map(|s| if s.covers(mid) { "|" } else { " " }.to_string())
                .collect();
            let _ = writeln!(out, "{}", row(String::new(), cells, String::new()));
        }
    }
    if sets.iter().any(|s| s.zero) {
        let cells = sets.iter().map(|s| if s.zero { "0" } else { "." }.to_string()).collect();
        let _ = writeln!(out, "{}", row("zero".into(), cells, String::new()));
    }
    if radii.is_empty() {
        let _ = writeln!(out, "{:>10}", "(empty)");
    }
    Ok(out)
}

/// Concentric rings on a log-radius scale, one colour layer per set, the
/// widest set drawn first.
pub fn svg(spectrum: &Value, essential: &Value) -> Result<String, String> {
    let sets = layers(spectrum, essential)?;
    let radii = critical_radii(&sets);
    let (size, center, inner, outer) = (480.0, 240.0, 24.0, 200.0);
    let (lo, hi) = match (radii.last(), radii.first()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0.0, 0.0),
    };
    let scale = |t: f64| {
        if hi > lo {
            inner + (t - lo) / (hi - lo) * (outer - inner)
        } else {
            (inner + outer) / 2.0
        }
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{size}" viewBox="0 0 {w} {size}">"#,
        w = size + 160.0
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for &t in &radii {
        let _ = writeln!(
            out,
            r##"<circle cx="{center}" cy="{center}" r="{:.2}" fill="none" stroke="#dddddd" stroke-dasharray="2 3"/>"##,
            scale(t)
        );
    }
    for (i, set) in sets.iter().enumerate().rev() {
        let color = COLORS[i];
        let band = 3.0 + 2.0 * (5 - i) as f64;
        let _ = writeln!(out, r#"<g id="{}" opacity="0.8">"#, LAYERS[i]);
        for &(a, b) in &set.radial {
            let (ra, rb) = (scale(a), scale(b));
            let width = (rb - ra).max(band);
            let _ = writeln!(
                out,
                r#"<circle cx="{center}" cy="{center}" r="{:.2}" fill="none" stroke="{color}" stroke-width="{:.2}"/>"#,
                (ra + rb) / 2.0,
                width
            );
        }
        for &(t, phase) in &set.points {
            let angle = std::f64::consts::TAU * phase;
            let r = scale(t);
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{:.1}" fill="{color}"/>"#,
                center + r * angle.cos(),
                center - r * angle.sin(),
                2.0 + (5 - i) as f64
            );
        }
        if set.zero {
            let _ = writeln!(out, r#"<circle cx="{center}" cy="{center}" r="4" fill="{color}"/>"#);
        }
        let _ = writeln!(out, "</g>");
    }
    for &t in &radii {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" font-family="monospace">{}</text>"#,
            center + scale(t) + 2.0,
            center - 2.0,
            fmt_num(t)
        );
    }
    for (i, name) in LAYERS.iter().enumerate() {
        let y = 30.0 + 20.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="14" height="14" fill="{}"/><text x="{}" y="{}" font-size="12" font-family="monospace">{name}</text>"#,
            size + 10.0,
            y,
            COLORS[i],
            size + 30.0,
            y + 11.0
        );
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
