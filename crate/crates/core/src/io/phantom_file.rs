//! Phantom files: a magic line followed by `key = value` lines.
//!
//! ```text
//! SMRT-PHANTOM 1
//! dim = 2
//! margin = 0.2
//! bump = 0.1,-0.2,0.15,1.0          # x,y[,z],width,amplitude
//! harmonic = 2,1,0.3,0.5            # m,l,width,amplitude
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::phantom::{Bump, HarmonicTerm, Phantom};

/// First line of a phantom file.
pub const PHANTOM_MAGIC: &str = "SMRT-PHANTOM 1";

/// Serializes a phantom with round-trip exact floats.
pub fn phantom_to_string(ph: &Phantom) -> String {
    let mut s = format!("{PHANTOM_MAGIC}\ndim = {}\nmargin = {:.16e}\n", ph.n, ph.margin);
    for b in &ph.bumps {
        let coords: Vec<String> = b.center[..ph.n].iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(s, "bump = {},{:.16e},{:.16e}", coords.join(","), b.width, b.amplitude);
    }
    for h in &ph.harmonics {
        let _ = writeln!(s, "harmonic = {},{},{:.16e},{:.16e}", h.m, h.l, h.width, h.amplitude);
    }
    s
}

/// Parses a phantom file; `#` starts a comment.
pub fn parse_phantom(text: &str) -> Result<Phantom> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == PHANTOM_MAGIC => {}
        _ => return Err(Error::Parse { line: 1, message: format!("expected `{PHANTOM_MAGIC}`") }),
    }
    let mut dim = None;
    let mut margin = None;
    let mut bumps = Vec::new();
    let mut harmonics = Vec::new();
    for (i, raw) in lines {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        let (k, v) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let nums = |v: &str| -> Result<Vec<f64>> {
            v.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| err(format!("bad number `{}`: {e}", t.trim()))))
                .collect()
        };
        match k.trim() {
            "dim" => dim = Some(v.trim().parse::<usize>().map_err(|e| err(format!("bad dim: {e}")))?),
            "margin" => margin = Some(v.trim().parse::<f64>().map_err(|e| err(format!("bad margin: {e}")))?),
            "bump" => {
                let n = dim.ok_or_else(|| err("`dim` must precede components".into()))?;
                let x = nums(v)?;
                if x.len() != n + 2 {
                    return Err(err(format!("bump needs {} values, got {}", n + 2, x.len())));
                }
                let mut center = [0.0; 3];
                center[..n].copy_from_slice(&x[..n]);
                bumps.push(Bump { center, width: x[n], amplitude: x[n + 1] });
            }
            "harmonic" => {
                let x = nums(v)?;
                if x.len() != 4 || x[0] < 0.0 || x[1] < 0.0 || x[0].fract() != 0.0 || x[1].fract() != 0.0 {
                    return Err(err("harmonic needs integer m,l then width,amplitude".into()));
                }
                harmonics.push(HarmonicTerm { m: x[0] as usize, l: x[1] as usize, width: x[2], amplitude: x[3] });
            }
            other => return Err(Error::UnknownKey(other.to_string())),
        }
    }
    let n = dim.ok_or_else(|| Error::MissingKey("dim".into()))?;
    let margin = margin.ok_or_else(|| Error::MissingKey("margin".into()))?;
    Phantom::new(n, margin, bumps, harmonics)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let ph = Phantom::new(
            3,
            0.2,
            vec![Bump { center: [0.1, -0.2, 1.0 / 3.0], width: 0.1, amplitude: -0.7 }],
            vec![HarmonicTerm { m: 2, l: 3, width: 0.3, amplitude: 0.5 }],
        )
        .unwrap();
        assert_eq!(parse_phantom(&phantom_to_string(&ph)).unwrap(), ph);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_phantom("SMRT-PHANTOM 1\ndim = 2\nmargin = 0.2\ncolor = 3\n"), Err(Error::UnknownKey(k)) if k == "color"));
        assert!(matches!(parse_phantom("SMRT-PHANTOM 1\ndim = 2\n"), Err(Error::MissingKey(k)) if k == "margin"));
        assert!(matches!(
            parse_phantom("SMRT-PHANTOM 1\ndim = 2\nmargin = 0.2\nbump = 0.1,0.1\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(parse_phantom("SMRT-PHANTOM 1\ndim = 2\nmargin = 0.2\nbump = 0.7,0,0.1,1\n").is_err());
    }
}
