use serde::Serialize;

use super::Coupling;

/// A source atom whose mass is split across several targets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OffendingRow {
    pub row: usize,
    pub mass: f64,
    pub splits: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MongeReport {
    pub is_map: bool,
    /// `(source, target)` for every mapped row.
    pub map: Vec<(usize, usize)>,
    pub offending: Vec<OffendingRow>,
}

/// Checks whether a coupling is induced by a map from its source.
///
/// A row is mapped when one column carries at least `(1 − tol)` of the row
/// mass; ties between columns resolve to the lowest column.
pub fn extract_monge(coupling: &Coupling, tol: f64) -> MongeReport {
    let mut map = Vec::new();
    let mut offending = Vec::new();
    let entries = &coupling.entries;
    let mut start = 0;
    while start < entries.len() {
        let row = entries[start].0;
        let end = start + entries[start..].iter().take_while(|e| e.0 == row).count();
        let cells = &entries[start..end];
        let mass: f64 = cells.iter().map(|e| e.2).sum();
        let (best_col, best_mass) = cells.iter().fold((usize::MAX, f64::NEG_INFINITY), |acc, e| {
            if e.2 > acc.1 {
                (e.1, e.2)
            } else {
                acc
            }
        });
        if mass > 0.0 {
            if best_mass >= (1.0 - tol) * mass {
                map.push((row, best_col));
            } else {
                offending.push(OffendingRow {
                    row,
                    mass,
                    splits: cells.iter().map(|e| (e.1, e.2)).collect(),
                });
            }
        }
        start = end;
    }
    MongeReport {
        is_map: offending.is_empty(),
        map,
        offending,
    }
}
