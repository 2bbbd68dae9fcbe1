//! Built-in group families and the group specifier grammar.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::FiniteGroup;
use crate::error::{LoopError, Result};

/// Families that can be generated on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupFamily {
    /// `Z_n`, parameter `n`.
    Cyclic,
    /// Dihedral group, parameter is the order `2m`.
    Dihedral,
    /// Dicyclic group, parameter is the order `4m` (`Q8` is the quaternions).
    Dicyclic,
    /// `S_n`, parameter `n ≤ 4`.
    Symmetric,
    /// `A_n`, parameter `n ≤ 4`.
    Alternating,
}

impl GroupFamily {
    pub fn from_letter(s: &str) -> Option<Self> {
        match s {
            "Z" | "C" => Some(GroupFamily::Cyclic),
            "D" => Some(GroupFamily::Dihedral),
            "Q" => Some(GroupFamily::Dicyclic),
            "S" => Some(GroupFamily::Symmetric),
            "A" => Some(GroupFamily::Alternating),
            _ => None,
        }
    }

    fn letter(self) -> &'static str {
        match self {
            GroupFamily::Cyclic => "Z",
            GroupFamily::Dihedral => "D",
            GroupFamily::Dicyclic => "Q",
            GroupFamily::Symmetric => "S",
            GroupFamily::Alternating => "A",
        }
    }
}

/// Generates a member of a built-in family.
pub fn builtin(family: GroupFamily, param: usize) -> Result<FiniteGroup> {
    let name = format!("{}{}", family.letter(), param);
    match family {
        GroupFamily::Cyclic => {
            if param == 0 {
                return Err(LoopError::InvalidGroup("Z_n needs n >= 1".into()));
            }
            let labels = (0..param).map(|k| power_label("a", k)).collect();
            FiniteGroup::from_fn(name, param, |a, b| (a + b) % param, labels)
        }
        GroupFamily::Dihedral => {
            if param < 2 || !param.is_multiple_of(2) {
                return Err(LoopError::InvalidGroup(
                    "dihedral order must be even and at least 2".into(),
                ));
            }
            let m = param / 2;
            // index f*m + k stands for s^f r^k, and r^k s = s r^-k
            let labels = (0..param)
                .map(|i| {
                    let (f, k) = (i / m, i % m);
                    match (f, k) {
                        (0, _) => power_label("r", k),
                        (_, 0) => "s".to_string(),
                        _ => format!("s{}", power_label("r", k)),
                    }
                })
                .collect();
            FiniteGroup::from_fn(
                name,
                param,
                |a, b| {
                    let (f1, k1) = (a / m, a % m);
                    let (f2, k2) = (b / m, b % m);
                    let k1s = if f2 == 1 { (m - k1) % m } else { k1 };
                    let k = (k1s + k2) % m;
                    ((f1 + f2) % 2) * m + k
                },
                labels,
            )
        }
        GroupFamily::Dicyclic => {
            if param < 8 || !param.is_multiple_of(4) {
                return Err(LoopError::InvalidGroup(
                    "dicyclic order must be a multiple of 4 and at least 8".into(),
                ));
            }
            let n = param / 2;
            let m = param / 4;
            // index f*2m + k stands for a^k x^f, x a x^-1 = a^-1, x^2 = a^m
            let labels = (0..param)
                .map(|i| {
                    let (f, k) = (i / n, i % n);
                    match (f, k) {
                        (0, _) => power_label("a", k),
                        (_, 0) => "x".to_string(),
                        _ => format!("{}x", power_label("a", k)),
                    }
                })
                .collect();
            FiniteGroup::from_fn(
                name,
                param,
                |a, b| {
                    let (f1, k1) = (a / n, a % n);
                    let (f2, k2) = (b / n, b % n);
                    let k2s = if f1 == 1 { (n - k2) % n } else { k2 };
                    let mut k = (k1 + k2s) % n;
                    if f1 == 1 && f2 == 1 {
                        k = (k + m) % n;
                    }
                    ((f1 + f2) % 2) * n + k
                },
                labels,
            )
        }
        GroupFamily::Symmetric | GroupFamily::Alternating => {
            if param == 0 || param > 4 {
                return Err(LoopError::InvalidGroup(
                    "symmetric and alternating groups are built in for n <= 4".into(),
                ));
            }
            let mut perms = permutations(param);
            if family == GroupFamily::Alternating {
                perms.retain(|p| parity(p) == 0);
            }
            let index = |p: &[usize]| perms.iter().position(|q| q.as_slice() == p).unwrap();
            let labels = perms.iter().map(|p| cycle_label(p)).collect();
            FiniteGroup::from_fn(
                name,
                perms.len(),
                |a, b| {
                    // (a b)(i) = a(b(i))
                    let c: Vec<usize> = (0..param).map(|i| perms[a][perms[b][i]]).collect();
                    index(&c)
                },
                labels,
            )
        }
    }
}

/// Direct product; element `(g, h)` has index `g * |H| + h`.
pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<FiniteGroup> {
    let nb = b.order();
    let labels = (0..a.order() * nb)
        .map(|i| format!("({},{})", a.label(i / nb), b.label(i % nb)))
        .collect();
    FiniteGroup::from_fn(
        format!("{}x{}", a.name(), b.name()),
        a.order() * nb,
        |x, y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb),
        labels,
    )
}

fn power_label(base: &str, k: usize) -> String {
    match k {
        0 => "1".to_string(),
        1 => base.to_string(),
        _ => format!("{base}{k}"),
    }
}

/// All permutations of `0..n` in lexicographic order (identity first).
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

fn parity(p: &[usize]) -> usize {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2
}

fn cycle_label(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        out.push('(');
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            out.push_str(&(i + 1).to_string());
            i = p[i];
        }
        out.push(')');
    }
    if out.is_empty() {
        "1".to_string()
    } else {
        out
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroupFile {
    Cayley { cayley: Vec<Vec<usize>> },
    Family { family: String, param: usize },
}

/// Parses a group specifier: `D6`, `Z4`, `S3`, `A4`, `Q8`, products such as
/// `Z2xZ2`, or `file:<path>` holding a Cayley table or a family reference.
pub fn parse_group(spec: &str) -> Result<FiniteGroup> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix("file:") {
        return load_group_file(Path::new(path));
    }
    let factors: Vec<&str> = spec.split('x').collect();
    if factors.len() > 1 {
        let mut acc = parse_factor(factors[0])?;
        for f in &factors[1..] {
            acc = direct_product(&acc, &parse_factor(f)?)?;
        }
        return Ok(acc.with_name(spec));
    }
    parse_factor(spec)
}

fn parse_factor(s: &str) -> Result<FiniteGroup> {
    let s = s.trim();
    let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
    let (letters, digits) = s.split_at(split);
    let family = GroupFamily::from_letter(letters)
        .ok_or_else(|| LoopError::InvalidGroup(format!("unknown group '{s}'")))?;
    let param = digits
        .parse::<usize>()
        .map_err(|_| LoopError::InvalidGroup(format!("missing parameter in '{s}'")))?;
    builtin(family, param)
}

fn load_group_file(path: &Path) -> Result<FiniteGroup> {
    let text = fs::read_to_string(path).map_err(|source| LoopError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: GroupFile = serde_json::from_str(&text)?;
    match file {
        GroupFile::Cayley { cayley } => FiniteGroup::from_cayley(path.display().to_string(), &cayley),
        GroupFile::Family { family, param } => {
            let fam = GroupFamily::from_letter(&family)
                .ok_or_else(|| LoopError::InvalidGroup(format!("unknown family '{family}'")))?;
            builtin(fam, param)
        }
    }
}

/// The named groups used by the test-suite sweeps, smallest first.
///
/// Large abelian groups are left out on purpose: their doubles have `|G|²`
/// anyons and the multi-boundary sweeps grow as a high power of that.
pub fn catalog() -> Vec<FiniteGroup> {
    [
        "Z1", "Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6", "D6", "D8", "Q8", "Z2xZ2xZ2", "D10", "D12",
        "Q12", "A4", "D14", "D16", "Q16", "Z3xD6", "D18", "D20", "Q20", "S4", "D24", "Q24",
        "Z2xA4",
    ]
    .iter()
    .map(|s| parse_group(s).expect("catalog entries are valid"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d6_element_order_and_relations() {
        let g = parse_group("D6").unwrap();
        let labels: Vec<&str> = (0..6).map(|i| g.label(i)).collect();
        assert_eq!(labels, ["1", "r", "r2", "s", "sr", "sr2"]);
        let (r, s) = (1, 3);
        // s r s = r^-1
        assert_eq!(g.mul(g.mul(s, r), s), g.inv(r));
        assert_eq!(g.mul(s, r), 4);
        assert_eq!(g.classes(), &[vec![0], vec![1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn q8_has_single_involution() {
        let g = parse_group("Q8").unwrap();
        let involutions = (1..8).filter(|&x| g.mul(x, x) == 0).count();
        assert_eq!(involutions, 1);
        assert_eq!(g.num_classes(), 5);
        assert!(!g.is_abelian());
    }

    #[test]
    fn symmetric_and_alternating_class_counts() {
        assert_eq!(parse_group("S3").unwrap().num_classes(), 3);
        assert_eq!(parse_group("S4").unwrap().num_classes(), 5);
        assert_eq!(parse_group("A4").unwrap().num_classes(), 4);
        assert_eq!(parse_group("S4").unwrap().order(), 24);
    }

    #[test]
    fn products_and_bounds() {
        let g = parse_group("Z2xZ3").unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.is_abelian());
        assert!(parse_group("S5").is_err());
        assert!(parse_group("D7").is_err());
        assert!(parse_group("W3").is_err());
    }
}
