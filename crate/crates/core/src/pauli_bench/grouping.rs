use std::time::Instant;

use crate::pauli_bench::decompose::{commute, qubit_wise_commute, PauliTerm};

/// Compatibility relation used to build the conflict graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Commutation {
    QubitWise,
    General,
}

impl Commutation {
    pub fn compatible(self, p: &PauliTerm, q: &PauliTerm) -> bool {
        match self {
            Commutation::QubitWise => qubit_wise_commute(p, q),
            Commutation::General => commute(p, q),
        }
    }
}

/// Grouping ran past its deadline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeadlineExceeded;

/// Greedy colouring of the conflict graph: vertices in descending degree (ties by term
/// order), each placed in the first colour class it is compatible with.
///
/// Returns groups of term indices.
pub fn greedy_group(
    terms: &[PauliTerm],
    relation: Commutation,
    deadline: Option<Instant>,
) -> Result<Vec<Vec<usize>>, DeadlineExceeded> {
    let check = |i: usize| -> Result<(), DeadlineExceeded> {
        match deadline {
            Some(d) if i.is_multiple_of(64) && Instant::now() > d => Err(DeadlineExceeded),
            _ => Ok(()),
        }
    };
    let mut degree = vec![0usize; terms.len()];
    for i in 0..terms.len() {
        check(i)?;
        for j in i + 1..terms.len() {
            if !relation.compatible(&terms[i], &terms[j]) {
                degree[i] += 1;
                degree[j] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(a.cmp(&b)));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (step, &v) in order.iter().enumerate() {
        check(step)?;
        let slot = groups
            .iter()
            .position(|g| g.iter().all(|&u| relation.compatible(&terms[u], &terms[v])));
        match slot {
            Some(k) => groups[k].push(v),
            None => groups.push(vec![v]),
        }
    }
    Ok(groups)
}

pub fn qwc_group(terms: &[PauliTerm]) -> Vec<Vec<PauliTerm>> {
    materialise(
        terms,
        greedy_group(terms, Commutation::QubitWise, None).expect("no deadline"),
    )
}

pub fn gc_group(terms: &[PauliTerm]) -> Vec<Vec<PauliTerm>> {
    materialise(
        terms,
        greedy_group(terms, Commutation::General, None).expect("no deadline"),
    )
}

fn materialise(terms: &[PauliTerm], groups: Vec<Vec<usize>>) -> Vec<Vec<PauliTerm>> {
    groups
        .into_iter()
        .map(|g| g.into_iter().map(|i| terms[i]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(ws: &[&str]) -> Vec<PauliTerm> {
        ws.iter()
            .map(|w| PauliTerm::from_word(w, 1.0).unwrap())
            .collect()
    }

    #[test]
    fn z_strings_share_one_qwc_group() {
        assert_eq!(qwc_group(&words(&["ZI", "IZ", "ZZ"])).len(), 1);
    }

    #[test]
    fn bell_strings() {
        let t = words(&["XX", "YY", "ZZ"]);
        assert_eq!(gc_group(&t).len(), 1);
        assert_eq!(qwc_group(&t).len(), 3);
    }

    #[test]
    fn deadline_in_the_past() {
        let t = words(&["XX", "YY", "ZZ"]);
        let past = Instant::now() - std::time::Duration::from_secs(1);
        assert_eq!(
            greedy_group(&t, Commutation::General, Some(past)),
            Err(DeadlineExceeded)
        );
    }
}
