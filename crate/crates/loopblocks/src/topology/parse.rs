//! Text grammar for cuts and lattice counts.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::{CutSpec, GenericPresentation, LatticeCounts, Sign};
use crate::error::{LoopError, Result};

fn key_values(body: &str) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| LoopError::InvalidCut(format!("expected key=value, got '{part}'")))?;
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(LoopError::InvalidCut(format!("duplicate key '{}'", k.trim())));
        }
    }
    Ok(out)
}

struct Fields {
    map: HashMap<String, String>,
}

impl Fields {
    fn int<T: std::str::FromStr>(&mut self, key: &str, default: Option<T>) -> Result<T> {
        match self.map.remove(key) {
            Some(v) => v
                .parse()
                .map_err(|_| LoopError::InvalidCut(format!("bad value '{v}' for '{key}'"))),
            None => default.ok_or_else(|| LoopError::InvalidCut(format!("missing '{key}'"))),
        }
    }

    fn signs(&mut self) -> Result<Vec<Sign>> {
        let Some(s) = self.map.remove("s") else {
            return Ok(Vec::new());
        };
        s.chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                other => Err(LoopError::InvalidCut(format!("bad sign '{other}'"))),
            })
            .collect()
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(LoopError::InvalidCut(format!("unknown key '{k}'"))),
            None => Ok(()),
        }
    }
}

/// Parses `orient:gx=..,gy=..,n=..,s=+-`, `nonorient:kx=..,ky=..,n=..`,
/// `mixed:gx=..,ky=..,n=..`, `torus-slab:n=..,k=..`, `lens:q=..,p=..` or `pres:<file>`.
pub fn parse_cut(s: &str) -> Result<CutSpec> {
    let s = s.trim();
    let (kind, body) = s
        .split_once(':')
        .ok_or_else(|| LoopError::InvalidCut(format!("cut '{s}' has no kind prefix")))?;
    if kind == "pres" {
        return load_presentation(Path::new(body.trim())).map(CutSpec::Generic);
    }
    let mut f = Fields {
        map: key_values(body)?,
    };
    let spec = match kind {
        "orient" => CutSpec::OrientPair {
            genus_x: f.int("gx", Some(0))?,
            genus_y: f.int("gy", Some(0))?,
            boundaries: f.int("n", Some(1))?,
            signs: f.signs()?,
        },
        "nonorient" => CutSpec::NonorientPair {
            crosscaps_x: f.int("kx", None)?,
            crosscaps_y: f.int("ky", None)?,
            boundaries: f.int("n", Some(1))?,
            signs: f.signs()?,
        },
        "mixed" => CutSpec::Mixed {
            genus_x: f.int("gx", Some(0))?,
            crosscaps_y: f.int("ky", None)?,
            boundaries: f.int("n", Some(1))?,
            signs: f.signs()?,
        },
        "torus-slab" => CutSpec::TorusSlab {
            dim: f.int("n", None)?,
            slab: f.int("k", None)?,
        },
        "lens" => CutSpec::Lens {
            q: f.int("q", None)?,
            p: f.int("p", Some(1))?,
        },
        other => return Err(LoopError::InvalidCut(format!("unknown cut kind '{other}'"))),
    };
    f.finish()?;
    Ok(spec)
}

fn load_presentation(path: &Path) -> Result<GenericPresentation> {
    let text = fs::read_to_string(path).map_err(|source| LoopError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

/// Parses `vx=..,vy=..,vb=..`; omitted counts default to 0 (interior) and `|A|` (boundary).
pub fn parse_lattice_counts(s: &str, base_points: usize) -> Result<LatticeCounts> {
    let mut f = Fields { map: key_values(s)? };
    let counts = LatticeCounts {
        interior_x: f.int("vx", Some(0))?,
        interior_y: f.int("vy", Some(0))?,
        boundary: f.int("vb", Some(base_points as u32))?,
    };
    f.finish()?;
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        assert_eq!(
            parse_cut("orient:gx=0,gy=0,n=2,s=+-").unwrap(),
            CutSpec::OrientPair {
                genus_x: 0,
                genus_y: 0,
                boundaries: 2,
                signs: vec![Sign::Plus, Sign::Minus]
            }
        );
        assert_eq!(
            parse_cut("torus-slab:n=3,k=2").unwrap(),
            CutSpec::TorusSlab { dim: 3, slab: 2 }
        );
        assert_eq!(parse_cut("lens:q=3,p=1").unwrap(), CutSpec::Lens { q: 3, p: 1 });
        assert!(matches!(
            parse_cut("mixed:gx=0,ky=1,n=1").unwrap(),
            CutSpec::Mixed { crosscaps_y: 1, .. }
        ));
        assert!(matches!(
            parse_cut("nonorient:kx=1,ky=1,n=1").unwrap(),
            CutSpec::NonorientPair { .. }
        ));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_cut("orient").is_err());
        assert!(parse_cut("orient:gx=a").is_err());
        assert!(parse_cut("orient:zz=1").is_err());
        assert!(parse_cut("nonorient:kx=1,n=1").is_err());
        assert!(parse_cut("blob:n=1").is_err());
        assert!(parse_cut("orient:s=+x").is_err());
    }

    #[test]
    fn lattice_defaults() {
        let c = parse_lattice_counts("vx=3", 2).unwrap();
        assert_eq!(
            c,
            LatticeCounts {
                interior_x: 3,
                interior_y: 0,
                boundary: 2
            }
        );
        assert!(parse_lattice_counts("vq=1", 1).is_err());
    }
}
