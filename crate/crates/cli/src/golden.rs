//! Reference data for `k = 5` shipped with the crate, and its comparison with
//! computed results.

use std::collections::BTreeMap;

use symbif_core::degree::PublishedExpansion;
use symbif_core::symrep::{character_table, diag_square_character, CycleType, Partition};

use crate::report::CliError;

pub const CHARACTER_TABLE: &str = include_str!("../golden/s5_character_table.txt");
pub const DECOMPOSITION: &str = include_str!("../golden/s5_decomposition.txt");
pub const BASIC_DEGREES: &str = include_str!("../golden/s5_basic_degrees.txt");
pub const INVARIANTS: &str = include_str!("../golden/s5_invariants.txt");
pub const SPECTRUM: &str = include_str!("../golden/s5_spectrum.txt");

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn malformed(what: &str, line: &str) -> CliError {
    CliError::failure(format!("malformed {what} golden line {line:?}"))
}

/// Cycle type of a representative such as `(123)(45)` on `n` points.
pub fn cycle_type_of(rep: &str, n: usize) -> Result<CycleType, CliError> {
    let mut lengths = Vec::new();
    for group in rep.split(')').filter(|g| !g.is_empty()) {
        let inner = group.strip_prefix('(').ok_or_else(|| malformed("class", rep))?;
        if !inner.chars().all(|c| c.is_ascii_digit()) {
            return Err(malformed("class", rep));
        }
        if !inner.is_empty() {
            lengths.push(inner.len());
        }
    }
    let moved: usize = lengths.iter().sum();
    if moved > n {
        return Err(malformed("class", rep));
    }
    lengths.extend(std::iter::repeat_n(1, n - moved));
    Ok(CycleType::from_lengths(&lengths))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenCharacterTable {
    pub class_names: Vec<String>,
    pub classes: Vec<CycleType>,
    /// `(row name, values)`, irreducibles first, `V` last.
    pub rows: Vec<(String, Vec<i64>)>,
}

pub fn character_table_golden() -> Result<GoldenCharacterTable, CliError> {
    let mut lines = content_lines(CHARACTER_TABLE);
    let header = lines.next().ok_or_else(|| malformed("character table", ""))?;
    let class_names: Vec<String> =
        header.strip_prefix("classes:").ok_or_else(|| malformed("character table", header))?.split_whitespace().map(String::from).collect();
    let classes = class_names.iter().map(|c| cycle_type_of(c, 5)).collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for line in lines {
        let (name, vals) = line.split_once(':').ok_or_else(|| malformed("character table", line))?;
        let vals: Vec<i64> =
            vals.split_whitespace().map(|v| v.parse().map_err(|_| malformed("character table", line))).collect::<Result<_, _>>()?;
        if vals.len() != classes.len() {
            return Err(malformed("character table", line));
        }
        rows.push((name.trim().to_string(), vals));
    }
    Ok(GoldenCharacterTable { class_names, classes, rows })
}

/// Reference table compared with the computed one. The row-to-partition
/// correspondence is derived by matching rows, not assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct TableComparison {
    /// `W_j` name to partition, for every reference row that matched a computed row.
    pub correspondence: BTreeMap<String, Partition>,
    pub unmatched_rows: Vec<String>,
    pub permutation_character_matches: bool,
    pub complete: bool,
}

impl TableComparison {
    pub fn passed(&self) -> bool {
        self.unmatched_rows.is_empty() && self.permutation_character_matches && self.complete
    }

    /// Reference name of the irreducible with partition `p`.
    pub fn name_of(&self, p: &Partition) -> Option<&str> {
        self.correspondence.iter().find(|(_, q)| *q == p).map(|(n, _)| n.as_str())
    }
}

pub fn compare_character_table(golden: &GoldenCharacterTable) -> Result<TableComparison, CliError> {
    let table = character_table(5)?;
    let computed_row = |p: &Partition| -> Vec<i64> {
        let row = table.row(p).expect("partition of 5");
        golden.classes.iter().map(|c| row[table.classes.iter().position(|x| x == c).expect("class of S_5")]).collect()
    };
    let mut correspondence = BTreeMap::new();
    let mut unmatched_rows = Vec::new();
    let mut permutation_character_matches = false;
    for (name, vals) in &golden.rows {
        if name == "V" {
            let chi = diag_square_character(5);
            permutation_character_matches = golden.classes.iter().map(|c| chi.value(c)).collect::<Vec<_>>() == *vals;
            continue;
        }
        match table.partitions.iter().find(|p| computed_row(p) == *vals) {
            Some(p) => {
                correspondence.insert(name.clone(), p.clone());
            }
            None => unmatched_rows.push(name.clone()),
        }
    }
    let mut distinct: Vec<&Partition> = correspondence.values().collect();
    distinct.sort();
    distinct.dedup();
    let complete = distinct.len() == table.partitions.len()
        && golden.classes.len() == table.classes.len()
        && golden.classes.iter().all(|c| table.classes.contains(c));
    Ok(TableComparison { correspondence, unmatched_rows, permutation_character_matches, complete })
}

/// `W_j` name to multiplicity.
pub fn decomposition_golden() -> Result<BTreeMap<String, u32>, CliError> {
    content_lines(DECOMPOSITION)
        .map(|line| {
            let (n, m) = line.split_once(':').ok_or_else(|| malformed("decomposition", line))?;
            Ok((n.trim().to_string(), m.trim().parse().map_err(|_| malformed("decomposition", line))?))
        })
        .collect()
}

/// Expansions keyed by name plus the classes marked maximal in each.
#[derive(Clone, Debug, PartialEq)]
pub struct GoldenExpansions {
    pub printed: Vec<PublishedExpansion>,
    pub corrected: Vec<PublishedExpansion>,
    pub maximal: BTreeMap<String, Vec<String>>,
}

fn parse_expansions(text: &str, what: &str) -> Result<GoldenExpansions, CliError> {
    let mut out = GoldenExpansions { printed: Vec::new(), corrected: Vec::new(), maximal: BTreeMap::new() };
    for line in content_lines(text) {
        let (head, body) = line.split_once(':').ok_or_else(|| malformed(what, line))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        match head.as_slice() {
            ["maximal", name] => {
                out.maximal.insert(name.to_string(), body.split_whitespace().map(String::from).collect());
            }
            ["printed", name] => out.printed.push(PublishedExpansion::parse(name, body)?),
            ["corrected", name] => out.corrected.push(PublishedExpansion::parse(name, body)?),
            [name] => {
                let e = PublishedExpansion::parse(name, body)?;
                out.printed.push(e.clone());
                out.corrected.push(e);
            }
            _ => return Err(malformed(what, line)),
        }
    }
    Ok(out)
}

pub fn basic_degrees_golden() -> Result<GoldenExpansions, CliError> {
    parse_expansions(BASIC_DEGREES, "basic degree")
}

pub fn invariants_golden() -> Result<GoldenExpansions, CliError> {
    parse_expansions(INVARIANTS, "invariant")
}

/// `(alpha, [(value, multiplicity)])`.
pub type SpectrumRun = (f64, Vec<(f64, usize)>);

/// Reference spectra in file order.
pub fn spectrum_golden() -> Result<Vec<SpectrumRun>, CliError> {
    let mut runs: Vec<SpectrumRun> = Vec::new();
    for line in content_lines(SPECTRUM) {
        if let Some(a) = line.strip_prefix("alpha") {
            runs.push((a.trim().parse().map_err(|_| malformed("spectrum", line))?, Vec::new()));
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        let run = runs.last_mut().ok_or_else(|| malformed("spectrum", line))?;
        if t.len() != 2 {
            return Err(malformed("spectrum", line));
        }
        run.1.push((t[0].parse().map_err(|_| malformed("spectrum", line))?, t[1].parse().map_err(|_| malformed("spectrum", line))?));
    }
    Ok(runs)
}

/// Partition for `W_j` under the derived correspondence.
pub fn partition_for(cmp: &TableComparison, name: &str) -> Result<Partition, CliError> {
    cmp.correspondence.get(name).cloned().ok_or_else(|| CliError::failure(format!("{name} has no matching irreducible")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn goldens_parse() {
        let t = character_table_golden().unwrap();
        assert_eq!(t.rows.len(), 8);
        assert_eq!(t.classes.len(), 7);
        let b = basic_degrees_golden().unwrap();
        assert_eq!(b.printed.len(), 4);
        assert_eq!(b.corrected.len(), 4);
        assert_eq!(b.maximal["W5"], ["D4", "D5", "D6"]);
        let w = invariants_golden().unwrap();
        assert_eq!(w.corrected.len(), 3);
        assert_eq!(w.printed, w.corrected);
        let s = spectrum_golden().unwrap();
        assert_eq!(s.iter().map(|r| r.0).collect::<Vec<_>>(), [0.5, 1.0, 2.5]);
        assert!(s.iter().all(|r| r.1.iter().map(|e| e.1).sum::<usize>() == 25));
        assert_eq!(decomposition_golden().unwrap()["W6"], 3);
    }

    #[test]
    fn class_representatives() {
        assert_eq!(cycle_type_of("(123)(45)", 5).unwrap(), CycleType::from_lengths(&[3, 2]));
        assert_eq!(cycle_type_of("(1)", 5).unwrap(), CycleType::identity(5));
        assert!(cycle_type_of("(1a)", 5).is_err());
        assert!(cycle_type_of("(123456)", 5).is_err());
    }

    #[test]
    fn table_correspondence() {
        let cmp = compare_character_table(&character_table_golden().unwrap()).unwrap();
        assert!(cmp.passed());
        assert_eq!(cmp.correspondence["W6"], Partition::standard(5));
        assert_eq!(cmp.correspondence["W5"], Partition::two_row(5));
        assert_eq!(cmp.correspondence["W4"], Partition::hook(5));
        assert_eq!(cmp.correspondence["W7"], Partition::trivial(5));
    }
}
