//! Complex character tables and the surface class functions built from them.
//!
//! Characters are computed with the Burnside method: the class-sum structure
//! constants define commuting matrices whose common eigenvectors are the
//! central characters. A random real combination is diagonalized (complex
//! Schur form) and the eigenvectors are rescaled into characters.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{LoopError, Result};
use crate::group::FiniteGroup;
use crate::tolerance::{round_to_integer, ORTHOGONALITY};
use crate::topology::SurfaceKind;

const DEFAULT_SEED: u64 = 0x00c0_ffee;
const MAX_ATTEMPTS: usize = 16;

/// Irreducible characters of a finite group, one row per irrep, one column per class.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    order: usize,
    class_sizes: Vec<usize>,
    class_of: Vec<usize>,
    inverse_class: Vec<usize>,
    chars: Vec<Vec<Complex64>>,
    dims: Vec<usize>,
    conj_irrep: Vec<usize>,
    indicators: Vec<i32>,
}

/// Plain-data view used for JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct CharacterTableJson {
    pub group: String,
    pub order: usize,
    pub class_reps: Vec<String>,
    pub class_sizes: Vec<usize>,
    pub dims: Vec<usize>,
    pub indicators: Vec<i32>,
    /// `[irrep][class] = [re, im]`.
    pub characters: Vec<Vec<[f64; 2]>>,
}

impl CharacterTable {
    /// Character table with the default seed.
    pub fn new(g: &FiniteGroup) -> Result<Self> {
        Self::with_seed(g, DEFAULT_SEED)
    }

    pub fn with_seed(g: &FiniteGroup, seed: u64) -> Result<Self> {
        let k = g.num_classes();
        let n = g.order();
        let class_sizes: Vec<usize> = (0..k).map(|c| g.class_size(c)).collect();
        let constants = structure_constants(g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut last_err = None;
        for _ in 0..MAX_ATTEMPTS {
            let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            match central_characters(&constants, &weights, k) {
                Ok(omegas) => {
                    return Self::from_central_characters(g, &class_sizes, &constants, omegas);
                }
                Err(e) => last_err = Some(e),
            }
        }
        let _ = n;
        Err(last_err.unwrap_or_else(|| LoopError::Numerical("character table failed".into())))
    }

    fn from_central_characters(
        g: &FiniteGroup,
        class_sizes: &[usize],
        constants: &[Vec<Vec<f64>>],
        omegas: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let n = g.order();
        let k = class_sizes.len();
        // each omega must be a common eigenvector of every class matrix
        for omega in &omegas {
            for j in 0..k {
                for row in 0..k {
                    let lhs: Complex64 = (0..k).map(|l| constants[j][row][l] * omega[l]).sum();
                    let rhs = omega[j] * omega[row];
                    if (lhs - rhs).norm() > 1e-6 * (1.0 + rhs.norm()) {
                        return Err(LoopError::Numerical(
                            "class-sum eigenvector is not common to all class matrices".into(),
                        ));
                    }
                }
            }
        }
        let mut rows: Vec<(usize, Vec<Complex64>)> = Vec::with_capacity(k);
        for omega in omegas {
            let norm: f64 = (0..k).map(|l| omega[l].norm_sqr() / class_sizes[l] as f64).sum();
            let d = (n as f64 / norm).sqrt();
            let dim = d.round();
            if (d - dim).abs() > 1e-6 || dim < 1.0 {
                return Err(LoopError::Numerical(format!(
                    "irrep dimension {d} is not a positive integer"
                )));
            }
            let dim = dim as usize;
            let chi: Vec<Complex64> = (0..k)
                .map(|l| omega[l] * (dim as f64) / class_sizes[l] as f64)
                .collect();
            rows.push((dim, chi));
        }
        let is_trivial = |chi: &[Complex64]| chi.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        rows.sort_by(|a, b| {
            is_trivial(&b.1)
                .cmp(&is_trivial(&a.1))
                .then(a.0.cmp(&b.0))
                .then_with(|| char_key(&a.1).cmp(&char_key(&b.1)))
        });
        let dims: Vec<usize> = rows.iter().map(|r| r.0).collect();
        let chars: Vec<Vec<Complex64>> = rows.into_iter().map(|r| r.1).collect();
        let inverse_class: Vec<usize> = (0..k).map(|c| g.inverse_class(c)).collect();
        let class_of: Vec<usize> = (0..n).map(|x| g.class_of(x)).collect();

        let mut table = CharacterTable {
            order: n,
            class_sizes: class_sizes.to_vec(),
            class_of,
            inverse_class,
            chars,
            dims,
            conj_irrep: Vec::new(),
            indicators: Vec::new(),
        };
        table.validate()?;
        table.conj_irrep = (0..k)
            .map(|a| {
                (0..k)
                    .find(|&b| {
                        (0..k).all(|c| (table.chars[b][c] - table.chars[a][c].conj()).norm() < 1e-7)
                    })
                    .ok_or_else(|| LoopError::Numerical("no conjugate irrep found".into()))
            })
            .collect::<Result<_>>()?;
        table.indicators = (0..k)
            .map(|a| {
                let s: Complex64 = (0..n).map(|x| table.chars[a][g.class_of(g.mul(x, x))]).sum();
                let v = s / n as f64;
                match round_to_integer(v.re) {
                    Some(i) if (-1..=1).contains(&i) && v.im.abs() < 1e-6 => Ok(i as i32),
                    _ => Err(LoopError::Numerical(format!(
                        "Frobenius-Schur indicator {v} is not in {{-1, 0, 1}}"
                    ))),
                }
            })
            .collect::<Result<_>>()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let k = self.num_classes();
        if self.chars.len() != k {
            return Err(LoopError::Numerical("number of irreps differs from classes".into()));
        }
        let sum_sq: usize = self.dims.iter().map(|d| d * d).sum();
        if sum_sq != self.order {
            return Err(LoopError::Numerical(format!(
                "sum of squared dimensions {sum_sq} differs from |G| = {}",
                self.order
            )));
        }
        for a in 0..k {
            for b in 0..k {
                let ip = self.inner_product(&self.chars[a], &self.chars[b]);
                let expected = if a == b { 1.0 } else { 0.0 };
                if (ip - Complex64::new(expected, 0.0)).norm() > ORTHOGONALITY {
                    return Err(LoopError::Numerical(format!(
                        "row orthogonality violated for irreps {a},{b}: {ip}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `(1/|G|) Σ_c |[c]| f(c) conj(h(c))`.
    pub fn inner_product(&self, f: &[Complex64], h: &[Complex64]) -> Complex64 {
        let s: Complex64 = (0..self.num_classes())
            .map(|c| f[c] * h[c].conj() * self.class_sizes[c] as f64)
            .sum();
        s / self.order as f64
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn num_irreps(&self) -> usize {
        self.chars.len()
    }

    pub fn class_size(&self, class: usize) -> usize {
        self.class_sizes[class]
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn inverse_class(&self, class: usize) -> usize {
        self.inverse_class[class]
    }

    /// Size of the centralizer of any element of `class`.
    pub fn centralizer_order(&self, class: usize) -> usize {
        self.order / self.class_sizes[class]
    }

    pub fn dim(&self, irrep: usize) -> usize {
        self.dims[irrep]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `χ^irrep` on a class.
    pub fn chi(&self, irrep: usize, class: usize) -> Complex64 {
        self.chars[irrep][class]
    }

    /// `χ^irrep` on an element.
    pub fn value(&self, irrep: usize, x: usize) -> Complex64 {
        self.chars[irrep][self.class_of[x]]
    }

    pub fn row(&self, irrep: usize) -> &[Complex64] {
        &self.chars[irrep]
    }

    /// Irrep whose character is the complex conjugate.
    pub fn conjugate_irrep(&self, irrep: usize) -> usize {
        self.conj_irrep[irrep]
    }

    /// Frobenius–Schur indicator: 1 real, 0 complex, -1 quaternionic.
    pub fn indicator(&self, irrep: usize) -> i32 {
        self.indicators[irrep]
    }

    pub fn indicators(&self) -> &[i32] {
        &self.indicators
    }

    pub fn to_json(&self, g: &FiniteGroup) -> CharacterTableJson {
        CharacterTableJson {
            group: g.name().to_string(),
            order: self.order,
            class_reps: (0..self.num_classes()).map(|c| g.label(g.class_rep(c)).to_string()).collect(),
            class_sizes: self.class_sizes.clone(),
            dims: self.dims.clone(),
            indicators: self.indicators.clone(),
            characters: self
                .chars
                .iter()
                .map(|row| row.iter().map(|z| [clean(z.re), clean(z.im)]).collect())
                .collect(),
        }
    }
}

fn clean(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn char_key(chi: &[Complex64]) -> Vec<(i64, i64)> {
    chi.iter()
        .map(|z| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64))
        .collect()
}

/// `a[j][k][l] = #{(x, y) ∈ C_j × C_k : x y = z_l}` for the representative `z_l`.
fn structure_constants(g: &FiniteGroup) -> Vec<Vec<Vec<f64>>> {
    let k = g.num_classes();
    let mut a = vec![vec![vec![0.0; k]; k]; k];
    for l in 0..k {
        let z = g.class_rep(l);
        for x in 0..g.order() {
            let y = g.mul(g.inv(x), z);
            a[g.class_of(x)][g.class_of(y)][l] += 1.0;
        }
    }
    a
}

/// Eigenvectors of `Σ_j w_j A_j`, each normalized to 1 on the identity class.
fn central_characters(constants: &[Vec<Vec<f64>>], weights: &[f64], k: usize) -> Result<Vec<Vec<Complex64>>> {
    let m = DMatrix::<Complex64>::from_fn(k, k, |row, col| {
        let v: f64 = (0..k).map(|j| weights[j] * constants[j][row][col]).sum();
        Complex64::new(v, 0.0)
    });
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| LoopError::Numerical("Schur decomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let lambdas: Vec<Complex64> = (0..k).map(|i| t[(i, i)]).collect();
    let scale = lambdas.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..k {
        for j in i + 1..k {
            if (lambdas[i] - lambdas[j]).norm() < 1e-6 * scale {
                return Err(LoopError::Numerical(
                    "degenerate eigenvalues in class-sum combination".into(),
                ));
            }
        }
    }
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        // back substitution in the triangular factor
        let mut y = vec![Complex64::zero(); k];
        y[i] = Complex64::one();
        for r in (0..i).rev() {
            let s: Complex64 = (r + 1..=i).map(|p| t[(r, p)] * y[p]).sum();
            y[r] = -s / (t[(r, r)] - lambdas[i]);
        }
        let v: Vec<Complex64> = (0..k).map(|r| (0..k).map(|p| q[(r, p)] * y[p]).sum()).collect();
        if v[0].norm() < 1e-12 {
            return Err(LoopError::Numerical("eigenvector vanishes on the identity class".into()));
        }
        let v0 = v[0];
        out.push(v.into_iter().map(|z| z / v0).collect());
    }
    Ok(out)
}

/// Higher indicator `ν_q = (1/|G|) Σ_g χ(g^q)`.
pub fn higher_indicator(g: &FiniteGroup, ct: &CharacterTable, irrep: usize, q: i64) -> Result<i64> {
    let s: Complex64 = (0..g.order()).map(|x| ct.value(irrep, g.pow(x, q))).sum();
    let v = s / g.order() as f64;
    match round_to_integer(v.re) {
        Some(i) if v.im.abs() < 1e-6 => Ok(i as i64),
        _ => Err(LoopError::Numerical(format!("indicator {v} is not an integer"))),
    }
}

/// `(1/|G|) Σ_α d_α χ^α(x)`, which is 1 at the identity and 0 elsewhere.
pub fn regular_delta(ct: &CharacterTable, x: usize) -> Complex64 {
    let s: Complex64 = (0..ct.num_irreps())
        .map(|a| ct.value(a, x) * ct.dim(a) as f64)
        .sum();
    s / ct.group_order() as f64
}

fn exponent_and_sign(kind: SurfaceKind, n: usize) -> (i64, bool) {
    match kind {
        SurfaceKind::Orientable { genus } => (2 * genus as i64 + n as i64 - 2, false),
        SurfaceKind::NonOrientable { crosscaps } => (crosscaps as i64 + n as i64 - 2, true),
    }
}

/// Number of homomorphisms from the surface groupoid with boundary holonomies
/// fixed to the given classes, for `n = classes.len() ≥ 1` boundary circles.
///
/// Orientable genus γ: `Σ_α (|G|/d_α)^{2γ+n-2} Π_j χ^α(c_j)`; with `k`
/// crosscaps the weight gains `ι_α^k` and the exponent is `k+n-2`.
pub fn side_count(ct: &CharacterTable, kind: SurfaceKind, classes: &[usize]) -> Result<u64> {
    let n = classes.len();
    if n == 0 {
        let v = closed_hom_count(ct, kind)?;
        // |Hom| / |G| for a closed surface
        return (v % ct.group_order() as u128 == 0)
            .then(|| (v / ct.group_order() as u128) as u64)
            .ok_or_else(|| {
                LoopError::Numerical("closed-surface count is not divisible by |G|".into())
            });
    }
    let (e, twisted) = exponent_and_sign(kind, n);
    let crosscaps = match kind {
        SurfaceKind::NonOrientable { crosscaps } => crosscaps,
        SurfaceKind::Orientable { .. } => 0,
    };
    let mut total = Complex64::zero();
    for a in 0..ct.num_irreps() {
        let ratio = (ct.group_order() / ct.dim(a)) as f64;
        let mut w = ratio.powi(e as i32);
        if twisted {
            w *= (ct.indicator(a) as f64).powi(crosscaps as i32);
        }
        if w == 0.0 {
            continue;
        }
        let prod = classes
            .iter()
            .fold(Complex64::one(), |acc, &c| acc * ct.chi(a, c));
        total += prod * w;
    }
    let r = round_to_integer(total.re)
        .filter(|_| total.im.abs() <= 1e-6)
        .ok_or_else(|| LoopError::Numerical(format!("surface count {total} is not an integer")))?;
    if r < 0 {
        return Err(LoopError::Numerical(format!("surface count {r} is negative")));
    }
    Ok(r as u64)
}

/// Orientable side count `R_{γ,n}`.
pub fn r_count(ct: &CharacterTable, genus: u32, classes: &[usize]) -> Result<u64> {
    side_count(ct, SurfaceKind::Orientable { genus }, classes)
}

/// Non-orientable side count `K_{k,n}`.
pub fn k_count(ct: &CharacterTable, crosscaps: u32, classes: &[usize]) -> Result<u64> {
    side_count(ct, SurfaceKind::NonOrientable { crosscaps }, classes)
}

/// Exact `|Hom(π₁(M), G)|` for a closed surface, from dimensions and indicators only.
pub fn closed_hom_count(ct: &CharacterTable, kind: SurfaceKind) -> Result<u128> {
    let v = closed_hom_count_big(ct, kind)?;
    v.to_u128()
        .ok_or_else(|| LoopError::Numerical("closed-surface count overflows u128".into()))
}

/// Exact `|Hom(π₁(M), G)|` as a big integer.
pub fn closed_hom_count_big(ct: &CharacterTable, kind: SurfaceKind) -> Result<BigInt> {
    let (e, twisted) = exponent_and_sign(kind, 0);
    let crosscaps = match kind {
        SurfaceKind::NonOrientable { crosscaps } => crosscaps,
        SurfaceKind::Orientable { .. } => 0,
    };
    let n = BigInt::from(ct.group_order());
    let mut sum = BigRational::zero();
    for a in 0..ct.num_irreps() {
        let sign = if twisted {
            ct.indicator(a).pow(crosscaps)
        } else {
            1
        };
        if sign == 0 {
            continue;
        }
        let ratio = BigRational::new(n.clone(), BigInt::from(ct.dim(a)));
        let term = if e >= 0 {
            num_traits::pow(ratio, e as usize)
        } else {
            num_traits::pow(ratio.recip(), (-e) as usize)
        };
        sum += term * BigRational::from_integer(BigInt::from(sign));
    }
    let total = sum * BigRational::from_integer(n);
    if !total.is_integer() || total.is_negative() {
        return Err(LoopError::Numerical(format!(
            "closed-surface count {total} is not a non-negative integer"
        )));
    }
    Ok(total.to_integer())
}

/// Closed surface obtained by gluing two sides along `n ≥ 1` circles, orientation kept.
pub fn glued_surface(x: SurfaceKind, y: SurfaceKind, n: usize) -> SurfaceKind {
    let handles = |k: SurfaceKind| match k {
        SurfaceKind::Orientable { genus } => 2 * genus,
        SurfaceKind::NonOrientable { crosscaps } => crosscaps,
    };
    let total = handles(x) + handles(y) + 2 * n as u32 - 2;
    if x.is_orientable() && y.is_orientable() {
        SurfaceKind::Orientable { genus: total / 2 }
    } else {
        SurfaceKind::NonOrientable { crosscaps: total }
    }
}

/// The two sides of the degree-of-freedom count for a glued surface `M`:
/// `|G|^n |Hom(π₁(M), G)| / |G|` and `Σ_c side_X(c) side_Y(c)` over all element tuples `c`.
pub fn gluing_identity(ct: &CharacterTable, x: SurfaceKind, y: SurfaceKind, n: usize) -> Result<(BigInt, BigInt)> {
    if n == 0 {
        return Err(LoopError::InvalidInput("gluing needs at least one circle".into()));
    }
    let order = BigInt::from(ct.group_order());
    let closed = closed_hom_count_big(ct, glued_surface(x, y, n))?;
    let lhs = num_traits::pow(order.clone(), n) * closed / order;
    let k = ct.num_classes();
    let mut rhs = BigInt::zero();
    let mut classes = vec![0usize; n];
    loop {
        let weight: u64 = classes.iter().map(|&c| ct.class_size(c) as u64).product();
        let a = side_count(ct, x, &classes)?;
        if a != 0 {
            let b = side_count(ct, y, &classes)?;
            rhs += BigInt::from(weight) * BigInt::from(a) * BigInt::from(b);
        }
        // odometer over class tuples
        let mut i = n;
        loop {
            if i == 0 {
                return Ok((lhs, rhs));
            }
            i -= 1;
            classes[i] += 1;
            if classes[i] < k {
                break;
            }
            classes[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group;

    fn table(name: &str) -> (FiniteGroup, CharacterTable) {
        let g = parse_group(name).unwrap();
        let ct = CharacterTable::new(&g).unwrap();
        (g, ct)
    }

    fn approx_row(ct: &CharacterTable, a: usize, expected: &[f64]) {
        for (c, &e) in expected.iter().enumerate() {
            assert!((ct.chi(a, c) - Complex64::new(e, 0.0)).norm() < 1e-9, "irrep {a} class {c}");
        }
    }

    #[test]
    fn d6_table_by_class() {
        let (_, ct) = table("D6");
        assert_eq!(ct.dims(), &[1, 1, 2]);
        approx_row(&ct, 0, &[1.0, 1.0, 1.0]);
        approx_row(&ct, 1, &[1.0, 1.0, -1.0]);
        approx_row(&ct, 2, &[2.0, -1.0, 0.0]);
        assert_eq!(ct.indicators(), &[1, 1, 1]);
    }

    #[test]
    fn q8_dims_and_quaternionic_irrep() {
        let (_, ct) = table("Q8");
        assert_eq!(ct.dims(), &[1, 1, 1, 1, 2]);
        assert_eq!(ct.indicator(4), -1);
    }

    #[test]
    fn z3_has_complex_pair() {
        let (_, ct) = table("Z3");
        assert_eq!(ct.indicators(), &[1, 0, 0]);
        assert_eq!(ct.conjugate_irrep(1), 2);
    }

    #[test]
    fn counts_for_small_surfaces() {
        let (g, ct) = table("D6");
        // disk
        for c in 0..3 {
            assert_eq!(r_count(&ct, 0, &[c]).unwrap(), (c == 0) as u64);
        }
        assert_eq!(r_count(&ct, 1, &[0]).unwrap(), 18);
        assert_eq!(r_count(&ct, 0, &[1, 1]).unwrap(), 3);
        assert_eq!(k_count(&ct, 1, &[0]).unwrap(), 4);
        let (_, z2) = table("Z2");
        assert_eq!(k_count(&z2, 1, &[0]).unwrap(), 2);
        assert_eq!(k_count(&z2, 1, &[1]).unwrap(), 0);
        let _ = g;
    }

    #[test]
    fn closed_counts() {
        let (_, ct) = table("S3");
        assert_eq!(closed_hom_count(&ct, SurfaceKind::Orientable { genus: 0 }).unwrap(), 1);
        assert_eq!(closed_hom_count(&ct, SurfaceKind::Orientable { genus: 1 }).unwrap(), 18);
        assert_eq!(closed_hom_count(&ct, SurfaceKind::NonOrientable { crosscaps: 1 }).unwrap(), 4);
    }

    #[test]
    fn higher_indicators_of_s3() {
        let (g, ct) = table("S3");
        let weighted: i64 = (0..ct.num_irreps())
            .map(|a| ct.dim(a) as i64 * higher_indicator(&g, &ct, a, 2).unwrap())
            .sum();
        assert_eq!(weighted, 4);
        for a in 0..ct.num_irreps() {
            assert_eq!(higher_indicator(&g, &ct, a, 1).unwrap(), (a == 0) as i64);
        }
    }

    #[test]
    fn gluing_identities_hold_for_s3() {
        let (_, ct) = table("S3");
        for (x, y, n) in [
            (SurfaceKind::Orientable { genus: 0 }, SurfaceKind::Orientable { genus: 1 }, 1),
            (SurfaceKind::Orientable { genus: 1 }, SurfaceKind::Orientable { genus: 1 }, 2),
            (SurfaceKind::NonOrientable { crosscaps: 1 }, SurfaceKind::NonOrientable { crosscaps: 2 }, 2),
            (SurfaceKind::Orientable { genus: 1 }, SurfaceKind::NonOrientable { crosscaps: 1 }, 3),
        ] {
            let (lhs, rhs) = gluing_identity(&ct, x, y, n).unwrap();
            assert_eq!(lhs, rhs, "{x} + {y} along {n}");
        }
    }
}
