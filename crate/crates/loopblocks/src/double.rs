//! Modular data of the quantum double of a finite group.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LoopError, Result};
use crate::group::{FiniteGroup, Subgroup};
use crate::rep::CharacterTable;
use crate::tolerance::{round_to_integer, S_INVERTED_PRODUCT, S_MATRIX};
use crate::topology::SurfaceKind;

/// Which characters enter the S-matrix sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SConvention {
    /// Plain characters.
    Plain,
    /// Complex-conjugated characters (the form used in the unitarity proof).
    #[default]
    Conjugated,
}

impl std::str::FromStr for SConvention {
    type Err = LoopError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(SConvention::Plain),
            "conjugated" => Ok(SConvention::Conjugated),
            other => Err(LoopError::InvalidInput(format!("unknown S convention '{other}'"))),
        }
    }
}

/// A centralizer of a class representative with its character table.
#[derive(Debug, Clone)]
pub struct Centralizer {
    pub rep: usize,
    pub sub: Subgroup,
    pub table: CharacterTable,
}

impl Centralizer {
    pub fn order(&self) -> usize {
        self.sub.order()
    }
}

/// A simple object: conjugacy class and an irrep of the representative's centralizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Anyon {
    pub class: usize,
    pub irrep: usize,
}

/// Centralizer tables for every class, and helpers to read them at arbitrary elements.
#[derive(Debug, Clone)]
pub struct QuantumDouble {
    group: FiniteGroup,
    table: CharacterTable,
    centralizers: Vec<Centralizer>,
    /// `transporter[e]` conjugates the class representative onto `e`.
    transporter: Vec<usize>,
    anyons: Vec<Anyon>,
}

impl QuantumDouble {
    pub fn new(g: &FiniteGroup) -> Result<Self> {
        let table = CharacterTable::new(g)?;
        let centralizers = (0..g.num_classes())
            .map(|c| {
                let rep = g.class_rep(c);
                let sub = g.subgroup(&g.centralizer(rep))?;
                let table = CharacterTable::new(&sub.group)?;
                Ok(Centralizer { rep, sub, table })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut transporter = vec![usize::MAX; g.order()];
        for h in 0..g.order() {
            for c in 0..g.num_classes() {
                let e = g.conj(h, g.class_rep(c));
                if transporter[e] == usize::MAX {
                    transporter[e] = h;
                }
            }
        }
        let anyons = centralizers
            .iter()
            .enumerate()
            .flat_map(|(class, z)| (0..z.table.num_irreps()).map(move |irrep| Anyon { class, irrep }))
            .collect();
        Ok(QuantumDouble {
            group: g.clone(),
            table,
            centralizers,
            transporter,
            anyons,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    pub fn centralizer(&self, class: usize) -> &Centralizer {
        &self.centralizers[class]
    }

    pub fn anyons(&self) -> &[Anyon] {
        &self.anyons
    }

    pub fn num_anyons(&self) -> usize {
        self.anyons.len()
    }

    pub fn anyon_index(&self, a: Anyon) -> Option<usize> {
        self.anyons.binary_search(&a).ok()
    }

    pub fn vacuum(&self) -> Anyon {
        Anyon { class: 0, irrep: 0 }
    }

    /// Element conjugating the representative of `e`'s class onto `e`.
    pub fn transporter(&self, e: usize) -> usize {
        self.transporter[e]
    }

    /// Character of irrep `irrep` of `C(e)` at `x ∈ C(e)`, transported from the class representative.
    pub fn centralizer_char(&self, e: usize, irrep: usize, x: usize) -> Complex64 {
        let g = &self.group;
        let z = &self.centralizers[g.class_of(e)];
        let h = self.transporter[e];
        let pulled = g.conj(g.inv(h), x);
        let local = z
            .sub
            .local(pulled)
            .expect("argument lies in the centralizer");
        z.table.value(irrep, local)
    }

    pub fn centralizer_dim(&self, class: usize, irrep: usize) -> usize {
        self.centralizers[class].table.dim(irrep)
    }

    pub fn centralizer_indicator(&self, class: usize, irrep: usize) -> i32 {
        self.centralizers[class].table.indicator(irrep)
    }

    /// `|[c]| d_α`.
    pub fn quantum_dim(&self, a: Anyon) -> usize {
        self.group.class_size(a.class) * self.centralizer_dim(a.class, a.irrep)
    }

    /// `sqrt(Σ d_a²)`, which equals `|G|`.
    pub fn total_dim(&self) -> f64 {
        let s: f64 = self.anyons.iter().map(|&a| (self.quantum_dim(a) as f64).powi(2)).sum();
        s.sqrt()
    }

    /// S entry between `(g, β)` and `(c, α)` for arbitrary elements `g`, `c`, with
    /// `β`, `α` irreps of their centralizers (transported from the class representatives).
    pub fn s_entry(&self, g_elem: usize, beta: usize, c_elem: usize, alpha: usize, conv: SConvention) -> Complex64 {
        self.s_general(
            g_elem,
            |x| self.centralizer_char(g_elem, beta, x),
            c_elem,
            |x| self.centralizer_char(c_elem, alpha, x),
            conv,
        )
    }

    /// S entry with the two centralizer characters given as functions on `C(g)` and `C(c)`.
    pub fn s_general(
        &self,
        g_elem: usize,
        chi_g: impl Fn(usize) -> Complex64,
        c_elem: usize,
        chi_c: impl Fn(usize) -> Complex64,
        conv: SConvention,
    ) -> Complex64 {
        let g = &self.group;
        let cg = self.centralizers[g.class_of(g_elem)].order();
        let cc = self.centralizers[g.class_of(c_elem)].order();
        let mut sum = Complex64::zero();
        for h in 0..g.order() {
            let moved_g = g.conj(g.inv(h), g_elem);
            if !g.commute(moved_g, c_elem) {
                continue;
            }
            let a = chi_g(g.conj(h, c_elem));
            let b = chi_c(moved_g);
            sum += match conv {
                SConvention::Plain => a * b,
                SConvention::Conjugated => a.conj() * b.conj(),
            };
        }
        sum / (cg * cc) as f64
    }

    pub fn s_between(&self, a: Anyon, b: Anyon, conv: SConvention) -> Complex64 {
        self.s_entry(
            self.centralizers[a.class].rep,
            a.irrep,
            self.centralizers[b.class].rep,
            b.irrep,
            conv,
        )
    }

    /// The full S matrix in anyon order.
    pub fn s_matrix(&self, conv: SConvention) -> SMatrix {
        let n = self.anyons.len();
        let entries: Vec<Complex64> = (0..n * n)
            .into_par_iter()
            .map(|k| self.s_between(self.anyons[k / n], self.anyons[k % n], conv))
            .collect();
        SMatrix {
            anyons: self.anyons.clone(),
            convention: conv,
            entries: DMatrix::from_row_slice(n, n, &entries),
        }
    }

    /// Index of the anyon `(e, χ)` where `χ` is given on `C(e)` by `chi`.
    pub fn anyon_with_character(&self, e: usize, chi: impl Fn(usize) -> Complex64) -> Result<usize> {
        let g = &self.group;
        let class = g.class_of(e);
        let z = &self.centralizers[class];
        let h = self.transporter[e];
        // pull the class function back to the representative's centralizer
        let values: Vec<Complex64> = z
            .sub
            .elements
            .iter()
            .map(|&y| chi(g.conj(h, y)))
            .collect();
        for irrep in 0..z.table.num_irreps() {
            let overlap: Complex64 = z
                .sub
                .elements
                .iter()
                .enumerate()
                .map(|(i, _)| values[i] * z.table.value(irrep, i).conj())
                .sum::<Complex64>()
                / z.order() as f64;
            if (overlap - 1.0).norm() < 1e-6 {
                return self
                    .anyon_index(Anyon { class, irrep })
                    .ok_or_else(|| LoopError::Consistency("anyon missing from list".into()));
            }
        }
        Err(LoopError::Numerical(format!(
            "class function at element {e} is not irreducible"
        )))
    }

    /// Anyon index of `(e, α)` for an arbitrary element `e` and irrep `α` of `C(e)`.
    pub fn index_at(&self, e: usize, irrep: usize) -> Result<usize> {
        self.anyon_with_character(e, |x| self.centralizer_char(e, irrep, x))
    }

    /// Charge conjugation `(c, α) ↦ (c⁻¹, ᾱ)` as a permutation of anyon indices.
    pub fn charge_conjugation(&self) -> Result<Vec<usize>> {
        let g = &self.group;
        self.anyons
            .iter()
            .map(|&a| {
                let rep = self.centralizers[a.class].rep;
                let inv = g.inv(rep);
                self.anyon_with_character(inv, |x| self.centralizer_char(rep, a.irrep, x).conj())
            })
            .collect()
    }

    /// Verlinde fusion coefficient `N_{ab}^c`.
    pub fn fusion(&self, s: &SMatrix, a: usize, b: usize, c: usize) -> Result<u64> {
        let m = &s.entries;
        let vac = 0;
        let v: Complex64 = (0..self.num_anyons())
            .map(|x| m[(x, a)] * m[(x, b)] * m[(x, c)].conj() / m[(x, vac)])
            .sum();
        round_count(v, "fusion coefficient")
    }

    /// All Verlinde coefficients, flattened as `[(a * n + b) * n + c]`.
    pub fn fusion_tensor(&self, s: &SMatrix) -> Result<Vec<u64>> {
        let n = self.num_anyons();
        (0..n * n * n)
            .into_par_iter()
            .map(|i| self.fusion(s, i / (n * n), (i / n) % n, i % n))
            .collect()
    }

    /// Ground-state degeneracy on a closed surface from S: `Σ_x ι_x^k S_{x,0}^{2-k}` or `Σ_x S_{x,0}^{2-2γ}`.
    pub fn gsd_from_s(&self, s: &SMatrix, kind: SurfaceKind) -> Result<u64> {
        let total: f64 = self
            .anyons
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let v = s.entries[(i, 0)].re;
                match kind {
                    SurfaceKind::Orientable { genus } => v.powi(2 - 2 * genus as i32),
                    SurfaceKind::NonOrientable { crosscaps } => {
                        let iota = self.centralizer_indicator(a.class, a.irrep) as f64;
                        iota.powi(crosscaps as i32) * v.powi(2 - crosscaps as i32)
                    }
                }
            })
            .sum();
        round_count(Complex64::new(total, 0.0), "S-matrix degeneracy")
    }

    pub fn label(&self, a: Anyon) -> String {
        format!("[{}]:{}", self.group.label(self.centralizers[a.class].rep), a.irrep)
    }

    /// Parses `[label]:irrep`, where the label names any element of the class.
    pub fn parse_anyon(&self, s: &str) -> Result<Anyon> {
        let (cls, irrep) = s
            .rsplit_once(':')
            .ok_or_else(|| LoopError::InvalidInput(format!("anyon '{s}' must look like [c]:i")))?;
        let cls = cls.trim().trim_start_matches('[').trim_end_matches(']');
        let e = self.group.element_by_label(cls)?;
        let irrep: usize = irrep
            .trim()
            .parse()
            .map_err(|_| LoopError::InvalidInput(format!("bad irrep index '{irrep}'")))?;
        let class = self.group.class_of(e);
        if irrep >= self.centralizers[class].table.num_irreps() {
            return Err(LoopError::InvalidInput(format!(
                "centralizer of {cls} has only {} irreps",
                self.centralizers[class].table.num_irreps()
            )));
        }
        Ok(Anyon { class, irrep })
    }
}

pub(crate) fn round_count(v: Complex64, what: &str) -> Result<u64> {
    match round_to_integer(v.re) {
        Some(r) if r >= 0 && v.im.abs() <= 1e-6 => Ok(r as u64),
        _ => Err(LoopError::Numerical(format!("{what} {v} is not a non-negative integer"))),
    }
}

#[derive(Debug, Clone)]
pub struct SMatrix {
    pub anyons: Vec<Anyon>,
    pub convention: SConvention,
    pub entries: DMatrix<Complex64>,
}

impl fmt::Display for SMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.entries.nrows() {
            let row: Vec<String> = (0..self.entries.ncols())
                .map(|j| {
                    let z = self.entries[(i, j)];
                    if z.im.abs() < 1e-12 {
                        format!("{:>9.5}", z.re)
                    } else {
                        format!("{:.4}{:+.4}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Outcome of the S-matrix identity suite; each entry is the worst deviation seen.
#[derive(Debug, Clone, Serialize)]
pub struct SReport {
    pub symmetry: f64,
    pub unitarity: f64,
    pub vacuum_column: f64,
    pub square_is_conjugation: f64,
    /// General inverted product `δ_{[a],[b]} δ_{χ', χ̄}`.
    pub inverted_product: f64,
    /// Diagonal form `(ι^χ)²` of the inverted product.
    pub inverted_product_diagonal: f64,
}

impl SReport {
    pub fn passes(&self) -> bool {
        self.symmetry <= S_MATRIX
            && self.unitarity <= S_MATRIX
            && self.vacuum_column <= S_MATRIX
            && self.square_is_conjugation <= S_MATRIX
            && self.inverted_product <= S_INVERTED_PRODUCT
            && self.inverted_product_diagonal <= S_INVERTED_PRODUCT
    }
}

/// Runs every S-matrix identity.
pub fn check_s_matrix(qd: &QuantumDouble, s: &SMatrix) -> Result<SReport> {
    let m = &s.entries;
    let n = m.nrows();
    let g = qd.group();
    let symmetry = (m - m.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let id = DMatrix::<Complex64>::identity(n, n);
    let unitarity = (m * m.adjoint() - &id).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let vacuum_column = qd
        .anyons()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let want = qd.centralizer_dim(a.class, a.irrep) as f64 / qd.centralizer(a.class).order() as f64;
            (m[(i, 0)] - want).norm()
        })
        .fold(0.0, f64::max);
    let conj = qd.charge_conjugation()?;
    let sq = m * m;
    let mut square_is_conjugation = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let want = if conj[i] == j { 1.0 } else { 0.0 };
            square_is_conjugation = square_is_conjugation.max((sq[(i, j)] - want).norm());
        }
    }
    // Σ_{(c,χ'')} S_{(a,χ),(c,χ'')} conj(S_{(b,χ'),(c⁻¹,χ'')}), with c⁻¹ read at the element itself
    let anyons = qd.anyons();
    let inverted: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|col| {
            let c = anyons[col];
            let rep = qd.centralizer(c.class).rep;
            let inv = g.inv(rep);
            (0..n)
                .map(|row| {
                    let b = anyons[row];
                    let brep = qd.centralizer(b.class).rep;
                    // χ'' is read on C(c⁻¹) = C(c) as it stands
                    qd.s_general(
                        brep,
                        |x| qd.centralizer_char(brep, b.irrep, x),
                        inv,
                        |x| qd.centralizer_char(rep, c.irrep, x),
                        s.convention,
                    )
                })
                .collect()
        })
        .collect();
    let mut inverted_product = 0.0f64;
    let mut inverted_product_diagonal = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v: Complex64 = (0..n).map(|k| m[(i, k)] * inverted[k][j].conj()).sum();
            let a = anyons[i];
            let b = anyons[j];
            let dual_irrep = qd.centralizer(b.class).table.conjugate_irrep(b.irrep);
            let want = if a.class == b.class && a.irrep == dual_irrep { 1.0 } else { 0.0 };
            inverted_product = inverted_product.max((v - want).norm());
            if i == j {
                let iota = qd.centralizer_indicator(a.class, a.irrep) as f64;
                inverted_product_diagonal = inverted_product_diagonal.max((v - iota * iota).norm());
            }
        }
    }
    Ok(SReport {
        symmetry,
        unitarity,
        vacuum_column,
        square_is_conjugation,
        inverted_product,
        inverted_product_diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group;

    #[test]
    fn toric_code_s_matrix() {
        let g = parse_group("Z2").unwrap();
        let qd = QuantumDouble::new(&g).unwrap();
        let s = qd.s_matrix(SConvention::default());
        // order: vacuum, charge, flux, dyon
        let want = [[1., 1., 1., 1.], [1., 1., -1., -1.], [1., -1., 1., -1.], [1., -1., -1., 1.]];
        for i in 0..4 {
            for j in 0..4 {
                assert!((s.entries[(i, j)] - want[i][j] / 2.0).norm() < 1e-12);
            }
        }
        // charge x flux = dyon
        assert_eq!(qd.fusion(&s, 1, 2, 3).unwrap(), 1);
        assert_eq!(qd.fusion(&s, 1, 2, 0).unwrap(), 0);
    }

    #[test]
    fn s3_identities_and_dims() {
        let g = parse_group("S3").unwrap();
        let qd = QuantumDouble::new(&g).unwrap();
        assert_eq!(qd.num_anyons(), 8);
        let total: usize = qd.anyons().iter().map(|&a| qd.quantum_dim(a).pow(2)).sum();
        assert_eq!(total, 36);
        for conv in [SConvention::Plain, SConvention::Conjugated] {
            let s = qd.s_matrix(conv);
            let r = check_s_matrix(&qd, &s).unwrap();
            assert!(r.passes(), "{r:?}");
            assert_eq!(qd.gsd_from_s(&s, SurfaceKind::Orientable { genus: 1 }).unwrap(), 8);
        }
    }

    #[test]
    fn parse_anyon_labels() {
        let g = parse_group("D6").unwrap();
        let qd = QuantumDouble::new(&g).unwrap();
        let a = qd.parse_anyon("[r]:1").unwrap();
        assert_eq!(qd.quantum_dim(a), 2);
        let b = qd.parse_anyon("[sr]:0").unwrap();
        assert_eq!(qd.quantum_dim(b), 3);
        assert!(qd.parse_anyon("[r]:7").is_err());
    }
}
