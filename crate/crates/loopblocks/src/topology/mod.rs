//! Bipartitions of closed manifolds and their boundary base points.

mod parse;
mod presentations;

pub use parse::{parse_cut, parse_lattice_counts};
pub use presentations::{fiber_presentation, side_presentation};

use serde::{Deserialize, Serialize};

use crate::error::{LoopError, Result};
use crate::group::{GroupPresentation, Word};

/// A compact surface without its boundary data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurfaceKind {
    Orientable { genus: u32 },
    NonOrientable { crosscaps: u32 },
}

impl SurfaceKind {
    pub fn is_orientable(self) -> bool {
        matches!(self, SurfaceKind::Orientable { .. })
    }

    /// Parses `genus:γ`, `crosscap:k`, or the names `sphere`, `torus`, `rp2`, `klein`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "sphere" => return Ok(SurfaceKind::Orientable { genus: 0 }),
            "torus" => return Ok(SurfaceKind::Orientable { genus: 1 }),
            "rp2" => return Ok(SurfaceKind::NonOrientable { crosscaps: 1 }),
            "klein" => return Ok(SurfaceKind::NonOrientable { crosscaps: 2 }),
            _ => {}
        }
        let (key, val) = s
            .split_once(':')
            .ok_or_else(|| LoopError::InvalidInput(format!("bad surface '{s}'")))?;
        let v: u32 = val
            .trim()
            .parse()
            .map_err(|_| LoopError::InvalidInput(format!("bad surface parameter '{val}'")))?;
        match key.trim() {
            "genus" => Ok(SurfaceKind::Orientable { genus: v }),
            "crosscap" | "crosscaps" => {
                if v == 0 {
                    return Err(LoopError::InvalidInput(
                        "a non-orientable surface needs at least one crosscap".into(),
                    ));
                }
                Ok(SurfaceKind::NonOrientable { crosscaps: v })
            }
            other => Err(LoopError::InvalidInput(format!("unknown surface kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceKind::Orientable { genus } => write!(f, "orientable genus {genus}"),
            SurfaceKind::NonOrientable { crosscaps } => write!(f, "non-orientable with {crosscaps} crosscaps"),
        }
    }
}

/// Orientation with which a boundary circle of `Y` is glued to `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }
}

/// Boundary of the cut as seen by the homomorphism search.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BoundaryPresentation {
    pub num_generators: usize,
    #[serde(default, with = "signed_words")]
    pub relators: Vec<Word>,
    /// Base point at which each boundary generator is a loop.
    #[serde(default)]
    pub base_of: Vec<usize>,
}

/// A cut given by explicit presentations of both sides and of their common boundary.
///
/// `x.boundary_words[j]` and `y.boundary_words[j]` are the images of boundary
/// generator `j`. The number of base points is declared, not inferred.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericPresentation {
    pub x: GroupPresentation,
    pub y: GroupPresentation,
    pub boundary: BoundaryPresentation,
    pub base_points: usize,
}

mod signed_words {
    use super::Word;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ws: &[Word], s: S) -> Result<S::Ok, S::Error> {
        let v = ws
            .iter()
            .map(Word::to_signed)
            .collect::<crate::error::Result<Vec<_>>>()
            .map_err(serde::ser::Error::custom)?;
        serde::Serialize::serialize(&v, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Word>, D::Error> {
        let v: Vec<Vec<i64>> = Vec::deserialize(d)?;
        v.iter()
            .map(|w| Word::from_signed(w).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl GenericPresentation {
    pub fn validate(&self, group_order: usize) -> Result<()> {
        self.x.validate(group_order)?;
        self.y.validate(group_order)?;
        let nb = self.boundary.num_generators;
        if self.x.boundary_words.len() != nb || self.y.boundary_words.len() != nb {
            return Err(LoopError::InvalidPresentation(format!(
                "both sides need exactly {nb} boundary words"
            )));
        }
        if self.base_points == 0 {
            return Err(LoopError::InvalidPresentation(
                "at least one base point is required".into(),
            ));
        }
        if !self.boundary.base_of.is_empty() && self.boundary.base_of.len() != nb {
            return Err(LoopError::InvalidPresentation(
                "base_of must give one base point per boundary generator".into(),
            ));
        }
        if self.boundary.base_of.iter().any(|&b| b >= self.base_points) {
            return Err(LoopError::InvalidPresentation("base_of entry out of range".into()));
        }
        for side in [&self.x, &self.y] {
            if let Some(ep) = &side.endpoints {
                if ep.iter().any(|&(s, t)| s >= self.base_points || t >= self.base_points) {
                    return Err(LoopError::InvalidPresentation(
                        "generator endpoint out of range".into(),
                    ));
                }
            }
        }
        for r in &self.boundary.relators {
            if r.max_generator().is_some_and(|i| i >= nb) {
                return Err(LoopError::InvalidPresentation(
                    "boundary relator uses an unknown generator".into(),
                ));
            }
        }
        Ok(())
    }

    /// Base point of boundary generator `j` (0 when not declared).
    pub fn base_of(&self, j: usize) -> usize {
        self.boundary.base_of.get(j).copied().unwrap_or(0)
    }
}

/// A bipartition `M = X ∪ Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutSpec {
    /// Two orientable surfaces with `boundaries` circles each; `signs[j]` says
    /// whether circle `j` of `Y` is glued with reversed orientation.
    OrientPair {
        genus_x: u32,
        genus_y: u32,
        boundaries: usize,
        signs: Vec<Sign>,
    },
    NonorientPair {
        crosscaps_x: u32,
        crosscaps_y: u32,
        boundaries: usize,
        signs: Vec<Sign>,
    },
    Mixed {
        genus_x: u32,
        crosscaps_y: u32,
        boundaries: usize,
        signs: Vec<Sign>,
    },
    /// `T^dim` cut along a `slab`-dimensional box.
    TorusSlab { dim: usize, slab: usize },
    /// Heegaard splitting of `L(q; p)` into two solid tori.
    Lens { q: i64, p: i64 },
    Generic(GenericPresentation),
}

/// The closed manifold produced by gluing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClosedManifold {
    Surface(SurfaceKind),
    Torus { dim: usize },
    Lens { q: i64, p: i64 },
    Unknown,
}

/// Lattice vertex counts: interior of `X`, interior of `Y`, and the shared boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LatticeCounts {
    pub interior_x: u32,
    pub interior_y: u32,
    pub boundary: u32,
}

/// The two sides of a surface cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfacePair {
    pub x: SurfaceKind,
    pub y: SurfaceKind,
    pub boundaries: usize,
    /// Orientation signs applied to `Y`'s boundary holonomies (all `Plus` unless orientable).
    pub signs: Vec<Sign>,
}

/// A cut that passed validation, with everything derived from it.
#[derive(Debug, Clone)]
pub struct ValidatedCut {
    spec: CutSpec,
    base_points: usize,
    glued: ClosedManifold,
    lattice: LatticeCounts,
    warnings: Vec<String>,
}

/// Canonical lens label `(q, p mod q)`; `q = 1` is the sphere and `q = 0` is `S¹×S²`.
pub fn lens_canonical(q: i64, p: i64) -> Result<(i64, i64)> {
    let (q, p) = if q < 0 { (-q, -p) } else { (q, p) };
    if q == 0 {
        if p.abs() != 1 {
            return Err(LoopError::InvalidCut(format!(
                "L(0; {p}) needs p = ±1 (gcd(p, q) = 1)"
            )));
        }
        return Ok((0, 1));
    }
    if gcd(q, p) != 1 {
        return Err(LoopError::InvalidCut(format!("L({q}; {p}) needs gcd(p, q) = 1")));
    }
    Ok((q, p.rem_euclid(q)))
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Checks a cut and lattice counts, deriving the glued manifold and `|A|`.
pub fn validate(spec: CutSpec, lattice: Option<LatticeCounts>) -> Result<ValidatedCut> {
    let mut warnings = Vec::new();
    let need_boundary = |n: usize| -> Result<()> {
        if n == 0 {
            return Err(LoopError::InvalidCut(
                "a bipartition needs at least one boundary circle".into(),
            ));
        }
        Ok(())
    };
    let (spec, base_points, glued) = match spec {
        CutSpec::OrientPair {
            genus_x,
            genus_y,
            boundaries,
            signs,
        } => {
            need_boundary(boundaries)?;
            let signs = if signs.is_empty() {
                vec![Sign::Plus; boundaries]
            } else {
                signs
            };
            if signs.len() != boundaries {
                return Err(LoopError::InvalidCut(format!(
                    "{} signs given for {boundaries} boundary circles",
                    signs.len()
                )));
            }
            let n = boundaries as u32;
            let uniform = signs.iter().all(|&s| s == signs[0]);
            let glued = if uniform {
                SurfaceKind::Orientable {
                    genus: genus_x + genus_y + n - 1,
                }
            } else {
                SurfaceKind::NonOrientable {
                    crosscaps: 2 * genus_x + 2 * genus_y + 2 * n - 2,
                }
            };
            (
                CutSpec::OrientPair {
                    genus_x,
                    genus_y,
                    boundaries,
                    signs,
                },
                boundaries,
                ClosedManifold::Surface(glued),
            )
        }
        CutSpec::NonorientPair {
            crosscaps_x,
            crosscaps_y,
            boundaries,
            signs,
        } => {
            need_boundary(boundaries)?;
            if crosscaps_x == 0 || crosscaps_y == 0 {
                return Err(LoopError::InvalidCut(
                    "both sides of a non-orientable pair need at least one crosscap".into(),
                ));
            }
            if signs.iter().any(|s| s.is_minus()) {
                warnings.push("orientation signs are ignored when a side is non-orientable".into());
            }
            let n = boundaries as u32;
            (
                CutSpec::NonorientPair {
                    crosscaps_x,
                    crosscaps_y,
                    boundaries,
                    signs: vec![Sign::Plus; boundaries],
                },
                boundaries,
                ClosedManifold::Surface(SurfaceKind::NonOrientable {
                    crosscaps: crosscaps_x + crosscaps_y + 2 * n - 2,
                }),
            )
        }
        CutSpec::Mixed {
            genus_x,
            crosscaps_y,
            boundaries,
            signs,
        } => {
            need_boundary(boundaries)?;
            if crosscaps_y == 0 {
                return Err(LoopError::InvalidCut(
                    "the non-orientable side needs at least one crosscap".into(),
                ));
            }
            if signs.iter().any(|s| s.is_minus()) {
                warnings.push("orientation signs are ignored when a side is non-orientable".into());
            }
            let n = boundaries as u32;
            let k = 2 * genus_x + crosscaps_y + 2 * n - 2;
            if k == 2 {
                warnings.push(
                    "this is the disk cut of the Klein bottle; no other orientable/non-orientable cut yields it"
                        .into(),
                );
            }
            (
                CutSpec::Mixed {
                    genus_x,
                    crosscaps_y,
                    boundaries,
                    signs: vec![Sign::Plus; boundaries],
                },
                boundaries,
                ClosedManifold::Surface(SurfaceKind::NonOrientable { crosscaps: k }),
            )
        }
        CutSpec::TorusSlab { dim, slab } => {
            if dim < 2 || slab == 0 || slab > dim {
                return Err(LoopError::InvalidCut(format!(
                    "torus slab needs 1 <= k <= n, got n = {dim}, k = {slab}"
                )));
            }
            let a = if slab == 1 { 2 } else { 1 };
            (CutSpec::TorusSlab { dim, slab }, a, ClosedManifold::Torus { dim })
        }
        CutSpec::Lens { q, p } => {
            let (q, p) = lens_canonical(q, p)?;
            (CutSpec::Lens { q, p }, 1, ClosedManifold::Lens { q, p })
        }
        CutSpec::Generic(gp) => {
            if gp.base_points == 0 {
                return Err(LoopError::InvalidCut(
                    "a generic presentation must declare its number of base points".into(),
                ));
            }
            let a = gp.base_points;
            (CutSpec::Generic(gp), a, ClosedManifold::Unknown)
        }
    };
    let lattice = lattice.unwrap_or(LatticeCounts {
        interior_x: 0,
        interior_y: 0,
        boundary: base_points as u32,
    });
    if (lattice.boundary as usize) < base_points {
        return Err(LoopError::InvalidCut(format!(
            "{} boundary vertices cannot host {base_points} base points",
            lattice.boundary
        )));
    }
    Ok(ValidatedCut {
        spec,
        base_points,
        glued,
        lattice,
        warnings,
    })
}

impl ValidatedCut {
    pub fn spec(&self) -> &CutSpec {
        &self.spec
    }

    /// `|A|`, one base point per boundary component.
    pub fn base_points(&self) -> usize {
        self.base_points
    }

    pub fn glued(&self) -> ClosedManifold {
        self.glued
    }

    pub fn lattice(&self) -> LatticeCounts {
        self.lattice
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn with_lattice(mut self, lattice: LatticeCounts) -> Result<Self> {
        if (lattice.boundary as usize) < self.base_points {
            return Err(LoopError::InvalidCut(format!(
                "{} boundary vertices cannot host {} base points",
                lattice.boundary, self.base_points
            )));
        }
        self.lattice = lattice;
        Ok(self)
    }

    /// Both sides when the cut is a surface cut.
    pub fn surface_pair(&self) -> Option<SurfacePair> {
        match &self.spec {
            CutSpec::OrientPair {
                genus_x,
                genus_y,
                boundaries,
                signs,
            } => Some(SurfacePair {
                x: SurfaceKind::Orientable { genus: *genus_x },
                y: SurfaceKind::Orientable { genus: *genus_y },
                boundaries: *boundaries,
                signs: signs.clone(),
            }),
            CutSpec::NonorientPair {
                crosscaps_x,
                crosscaps_y,
                boundaries,
                ..
            } => Some(SurfacePair {
                x: SurfaceKind::NonOrientable {
                    crosscaps: *crosscaps_x,
                },
                y: SurfaceKind::NonOrientable {
                    crosscaps: *crosscaps_y,
                },
                boundaries: *boundaries,
                signs: vec![Sign::Plus; *boundaries],
            }),
            CutSpec::Mixed {
                genus_x,
                crosscaps_y,
                boundaries,
                ..
            } => Some(SurfacePair {
                x: SurfaceKind::Orientable { genus: *genus_x },
                y: SurfaceKind::NonOrientable {
                    crosscaps: *crosscaps_y,
                },
                boundaries: *boundaries,
                signs: vec![Sign::Plus; *boundaries],
            }),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orient(gx: u32, gy: u32, n: usize, signs: &str) -> CutSpec {
        CutSpec::OrientPair {
            genus_x: gx,
            genus_y: gy,
            boundaries: n,
            signs: signs
                .chars()
                .map(|c| if c == '-' { Sign::Minus } else { Sign::Plus })
                .collect(),
        }
    }

    #[test]
    fn glued_surfaces() {
        let v = validate(orient(0, 0, 2, "++"), None).unwrap();
        assert_eq!(v.glued(), ClosedManifold::Surface(SurfaceKind::Orientable { genus: 1 }));
        assert_eq!(v.base_points(), 2);
        let v = validate(orient(0, 0, 2, "+-"), None).unwrap();
        assert_eq!(
            v.glued(),
            ClosedManifold::Surface(SurfaceKind::NonOrientable { crosscaps: 2 })
        );
        let v = validate(orient(1, 1, 1, "+"), None).unwrap();
        assert_eq!(v.glued(), ClosedManifold::Surface(SurfaceKind::Orientable { genus: 2 }));
        let v = validate(
            CutSpec::Mixed {
                genus_x: 0,
                crosscaps_y: 1,
                boundaries: 1,
                signs: vec![],
            },
            None,
        )
        .unwrap();
        assert_eq!(
            v.glued(),
            ClosedManifold::Surface(SurfaceKind::NonOrientable { crosscaps: 1 })
        );
    }

    #[test]
    fn torus_slab_base_points() {
        let v = validate(CutSpec::TorusSlab { dim: 3, slab: 1 }, None).unwrap();
        assert_eq!(v.base_points(), 2);
        let v = validate(CutSpec::TorusSlab { dim: 3, slab: 2 }, None).unwrap();
        assert_eq!(v.base_points(), 1);
        assert!(validate(CutSpec::TorusSlab { dim: 2, slab: 3 }, None).is_err());
    }

    #[test]
    fn lens_labels() {
        assert_eq!(lens_canonical(5, 7).unwrap(), (5, 2));
        assert_eq!(lens_canonical(1, 0).unwrap(), (1, 0));
        assert_eq!(lens_canonical(0, -1).unwrap(), (0, 1));
        assert!(lens_canonical(4, 2).is_err());
        assert_eq!(lens_canonical(-3, 1).unwrap(), (3, 2));
    }

    #[test]
    fn rejections() {
        assert!(validate(orient(0, 0, 0, ""), None).is_err());
        assert!(validate(orient(0, 0, 2, "+"), None).is_err());
        let lat = LatticeCounts {
            interior_x: 0,
            interior_y: 0,
            boundary: 1,
        };
        assert!(validate(orient(0, 0, 2, "++"), Some(lat)).is_err());
    }

    #[test]
    fn ignored_signs_warn() {
        let v = validate(
            CutSpec::NonorientPair {
                crosscaps_x: 1,
                crosscaps_y: 1,
                boundaries: 1,
                signs: vec![Sign::Minus],
            },
            None,
        )
        .unwrap();
        assert_eq!(v.warnings().len(), 1);
    }
}
