//! Explicit groupoid presentations for every closed-form cut.
//!
//! These feed the brute-force fiber-product path, which must agree with the
//! character formulas.

use super::{BoundaryPresentation, CutSpec, GenericPresentation, SurfaceKind};
use crate::error::Result;
use crate::group::{GroupPresentation, Letter, Word};

fn commutator(a: usize, b: usize) -> Word {
    Word::new(vec![Letter::gen(a), Letter::gen(b), Letter::inv(a), Letter::inv(b)])
}

fn power(x: usize, k: i64) -> Word {
    let l = if k >= 0 { Letter::gen(x) } else { Letter::inv(x) };
    Word::new(vec![l; k.unsigned_abs() as usize])
}

fn all_commute(gens: &[usize]) -> Vec<Word> {
    let mut out = Vec::new();
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i + 1..] {
            out.push(commutator(a, b));
        }
    }
    out
}

/// Surface with `n` boundary circles, one base point on each.
///
/// Generators: `c_0..c_{n-1}` (circle `j` read at base point `j`), then the
/// handle pairs or crosscap generators at base point 0, then paths
/// `f_1..f_{n-1}` from base point 0 to `j`. The single relator is
/// `Π[a,b] · c_0 · Π f_j⁻¹ c_j f_j` (or `Π a²` in place of the commutators).
/// Boundary word `j` is `c_j`, inverted when `inverted[j]` is set.
pub fn side_presentation(kind: SurfaceKind, n: usize, inverted: &[bool]) -> GroupPresentation {
    let surface_gens = match kind {
        SurfaceKind::Orientable { genus } => 2 * genus as usize,
        SurfaceKind::NonOrientable { crosscaps } => crosscaps as usize,
    };
    let path = |j: usize| n + surface_gens + j - 1;
    let num_generators = n + surface_gens + n.saturating_sub(1);
    let mut rel = Word::empty();
    match kind {
        SurfaceKind::Orientable { genus } => {
            for m in 0..genus as usize {
                rel.extend(&commutator(n + 2 * m, n + 2 * m + 1));
            }
        }
        SurfaceKind::NonOrientable { crosscaps } => {
            for m in 0..crosscaps as usize {
                rel.extend(&power(n + m, 2));
            }
        }
    }
    if n > 0 {
        rel.push(Letter::gen(0));
    }
    for j in 1..n {
        rel.push(Letter::inv(path(j)));
        rel.push(Letter::gen(j));
        rel.push(Letter::gen(path(j)));
    }
    let mut endpoints: Vec<(usize, usize)> = (0..n).map(|j| (j, j)).collect();
    endpoints.extend(std::iter::repeat_n((0, 0), surface_gens));
    endpoints.extend((1..n).map(|j| (0, j)));
    GroupPresentation {
        num_generators,
        relators: vec![rel],
        boundary_words: (0..n)
            .map(|j| {
                let inv = inverted.get(j).copied().unwrap_or(false);
                Word::new(vec![if inv { Letter::inv(j) } else { Letter::gen(j) }])
            })
            .collect(),
        endpoints: Some(endpoints),
    }
}

fn surface_pair(x: SurfaceKind, y: SurfaceKind, n: usize, inverted: &[bool]) -> GenericPresentation {
    GenericPresentation {
        x: side_presentation(x, n, &[]),
        y: side_presentation(y, n, inverted),
        boundary: BoundaryPresentation {
            num_generators: n,
            relators: Vec::new(),
            base_of: (0..n).collect(),
        },
        base_points: n,
    }
}

/// Thickened `T^{dim-1}` side of the `k = 1` slab: loops at base point 0 and a path to base point 1.
fn slab_side(m: usize) -> GroupPresentation {
    let gens: Vec<usize> = (0..m).collect();
    let path = m;
    let mut boundary_words: Vec<Word> = gens.iter().map(|&i| Word::new(vec![Letter::gen(i)])).collect();
    boundary_words.extend(
        gens.iter()
            .map(|&i| Word::new(vec![Letter::gen(path), Letter::gen(i), Letter::inv(path)])),
    );
    let mut endpoints = vec![(0, 0); m];
    endpoints.push((0, 1));
    GroupPresentation {
        num_generators: m + 1,
        relators: all_commute(&gens),
        boundary_words,
        endpoints: Some(endpoints),
    }
}

fn torus_slab(dim: usize, slab: usize) -> GenericPresentation {
    if slab == 1 {
        let m = dim - 1;
        let side = slab_side(m);
        let mut relators = all_commute(&(0..m).collect::<Vec<_>>());
        relators.extend(all_commute(&(m..2 * m).collect::<Vec<_>>()));
        return GenericPresentation {
            x: side.clone(),
            y: side,
            boundary: BoundaryPresentation {
                num_generators: 2 * m,
                relators,
                base_of: (0..2 * m).map(|j| usize::from(j >= m)).collect(),
            },
            base_points: 2,
        };
    }
    let free = dim - slab;
    let x_gens: Vec<usize> = (0..free).collect();
    let single = |i: usize| Word::new(vec![Letter::gen(i)]);
    let x = GroupPresentation {
        num_generators: free,
        relators: all_commute(&x_gens),
        boundary_words: {
            let mut w: Vec<Word> = Vec::new();
            if slab == 2 {
                w.push(Word::empty());
            }
            w.extend(x_gens.iter().map(|&i| single(i)));
            w
        },
        endpoints: Some(vec![(0, 0); free]),
    };
    let y = if slab == 2 {
        // generators: a, b, then the free directions
        let dirs: Vec<usize> = (2..2 + free).collect();
        let mut relators = all_commute(&dirs);
        for &d in &dirs {
            relators.push(commutator(0, d));
            relators.push(commutator(1, d));
        }
        let mut boundary_words = vec![commutator(0, 1)];
        boundary_words.extend(dirs.iter().map(|&i| single(i)));
        GroupPresentation {
            num_generators: 2 + free,
            relators,
            boundary_words,
            endpoints: Some(vec![(0, 0); 2 + free]),
        }
    } else {
        let all: Vec<usize> = (0..free + slab).collect();
        GroupPresentation {
            num_generators: free + slab,
            relators: all_commute(&all),
            boundary_words: (0..free).map(single).collect(),
            endpoints: Some(vec![(0, 0); free + slab]),
        }
    };
    let nb = free + usize::from(slab == 2);
    GenericPresentation {
        x,
        y,
        boundary: BoundaryPresentation {
            num_generators: nb,
            relators: all_commute(&(0..nb).collect::<Vec<_>>()),
            base_of: vec![0; nb],
        },
        base_points: 1,
    }
}

fn lens(q: i64, p: i64) -> GenericPresentation {
    GenericPresentation {
        x: GroupPresentation {
            num_generators: 1,
            relators: Vec::new(),
            boundary_words: vec![power(0, p), power(0, q)],
            endpoints: Some(vec![(0, 0)]),
        },
        y: GroupPresentation {
            num_generators: 1,
            relators: Vec::new(),
            boundary_words: vec![Word::new(vec![Letter::gen(0)]), Word::empty()],
            endpoints: Some(vec![(0, 0)]),
        },
        boundary: BoundaryPresentation {
            num_generators: 2,
            relators: vec![commutator(0, 1)],
            base_of: vec![0, 0],
        },
        base_points: 1,
    }
}

/// Explicit presentation of an already validated cut.
pub fn fiber_presentation(spec: &CutSpec) -> Result<GenericPresentation> {
    Ok(match spec {
        CutSpec::OrientPair {
            genus_x,
            genus_y,
            boundaries,
            signs,
        } => {
            let inverted: Vec<bool> = signs.iter().map(|s| s.is_minus()).collect();
            surface_pair(
                SurfaceKind::Orientable { genus: *genus_x },
                SurfaceKind::Orientable { genus: *genus_y },
                *boundaries,
                &inverted,
            )
        }
        CutSpec::NonorientPair {
            crosscaps_x,
            crosscaps_y,
            boundaries,
            ..
        } => surface_pair(
            SurfaceKind::NonOrientable {
                crosscaps: *crosscaps_x,
            },
            SurfaceKind::NonOrientable {
                crosscaps: *crosscaps_y,
            },
            *boundaries,
            &[],
        ),
        CutSpec::Mixed {
            genus_x,
            crosscaps_y,
            boundaries,
            ..
        } => surface_pair(
            SurfaceKind::Orientable { genus: *genus_x },
            SurfaceKind::NonOrientable {
                crosscaps: *crosscaps_y,
            },
            *boundaries,
            &[],
        ),
        CutSpec::TorusSlab { dim, slab } => torus_slab(*dim, *slab),
        CutSpec::Lens { q, p } => lens(*q, *p),
        CutSpec::Generic(gp) => gp.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::group::{count_homs, parse_group};

    #[test]
    fn surface_side_counts_match_small_cases() {
        let g = parse_group("S3").unwrap();
        let caps = Caps::default();
        // disk: c_0 = 1 only
        let disk = side_presentation(SurfaceKind::Orientable { genus: 0 }, 1, &[]);
        assert_eq!(count_homs(&g, &disk, &caps).unwrap(), 1);
        // annulus: c_0 f⁻¹ c_1 f = 1, free choice of c_1 and f
        let annulus = side_presentation(SurfaceKind::Orientable { genus: 0 }, 2, &[]);
        assert_eq!(count_homs(&g, &annulus, &caps).unwrap(), 36);
        // Möbius band: a² c = 1
        let mobius = side_presentation(SurfaceKind::NonOrientable { crosscaps: 1 }, 1, &[]);
        assert_eq!(count_homs(&g, &mobius, &caps).unwrap(), 6);
        let torus_minus_disk = side_presentation(SurfaceKind::Orientable { genus: 1 }, 1, &[]);
        assert_eq!(count_homs(&g, &torus_minus_disk, &caps).unwrap(), 36);
    }

    #[test]
    fn presentations_validate() {
        for spec in [
            CutSpec::TorusSlab { dim: 3, slab: 1 },
            CutSpec::TorusSlab { dim: 3, slab: 2 },
            CutSpec::TorusSlab { dim: 3, slab: 3 },
            CutSpec::Lens { q: 3, p: 1 },
            CutSpec::OrientPair {
                genus_x: 1,
                genus_y: 0,
                boundaries: 2,
                signs: vec![super::super::Sign::Plus, super::super::Sign::Minus],
            },
        ] {
            fiber_presentation(&spec).unwrap().validate(6).unwrap();
        }
    }
}
