use std::fmt;

use super::EigenSystem;
use crate::{Error, Result};

/// Leading components of one eigenstate, largest algebraic value first, so
/// the positive block precedes the negative block.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportedState {
    /// 1-based position in descending eigenvalue order.
    pub index: usize,
    pub eigenvalue: f64,
    pub components: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenstateReport {
    pub states: Vec<ReportedState>,
}

/// Lists the `top_m_components` largest-magnitude components of each of the
/// first `top_k_states` eigenstates.
pub fn eigenstate_report(es: &EigenSystem, top_k_states: usize, top_m_components: usize) -> Result<EigenstateReport> {
    if top_k_states == 0 || top_m_components == 0 {
        return Err(Error::param("report needs at least one state and one component"));
    }
    let states = (0..top_k_states.min(es.len()))
        .map(|i| {
            let column = es.vectors.column(i);
            // Rounding residue of structurally zero components is not reported.
            let floor = 1e-12 * column.amax();
            let mut picked: Vec<usize> = (0..es.support.len()).filter(|&s| column[s].abs() > floor).collect();
            picked.sort_by(|&a, &b| column[b].abs().total_cmp(&column[a].abs()).then(a.cmp(&b)));
            picked.truncate(top_m_components);
            picked.sort_by(|&a, &b| column[b].total_cmp(&column[a]).then(a.cmp(&b)));
            ReportedState {
                index: i + 1,
                eigenvalue: es.values[i],
                components: picked.iter().map(|&s| (es.name(es.support[s]), column[s])).collect(),
            }
        })
        .collect();
    Ok(EigenstateReport { states })
}

impl EigenstateReport {
    /// One line per component: state index, word, signed weight.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for s in &self.states {
            for (w, x) in &s.components {
                out.push_str(&format!("{}\t{}\t{}\n", s.index, w, x));
            }
        }
        out
    }
}

impl fmt::Display for EigenstateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.states {
            let render = |items: Vec<&(String, f64)>| {
                items
                    .iter()
                    .map(|(w, x)| format!("{w} ({x:.2})"))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let positive: Vec<_> = s.components.iter().filter(|(_, x)| *x > 0.0).collect();
            let negative: Vec<_> = s.components.iter().filter(|(_, x)| *x < 0.0).collect();
            write!(f, "{}: ", s.index)?;
            match (positive.is_empty(), negative.is_empty()) {
                (false, false) => write!(f, "{} ... {}", render(positive), render(negative))?,
                (false, true) => write!(f, "{}", render(positive))?,
                (true, _) => write!(f, "{}", render(negative))?,
            }
            writeln!(f, "  [eigenvalue {:.4}]", s.eigenvalue)?;
        }
        Ok(())
    }
}
