//! The shifting operator and its downward-closed fixed point.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hclass::{product, HypothesisClass, Label};

/// Sum of all labels of all rows. Strictly decreases under a changing shift.
pub fn potential(class: &HypothesisClass) -> u64 {
    class.rows().iter().flatten().map(|&x| x as u64).sum()
}

fn groups(class: &HypothesisClass, i: usize) -> BTreeMap<Vec<Label>, Vec<usize>> {
    let mut out: BTreeMap<Vec<Label>, Vec<usize>> = BTreeMap::new();
    for (v, row) in class.rows().iter().enumerate() {
        let mut key = row.clone();
        key.remove(i);
        out.entry(key).or_default().push(v);
    }
    out
}

/// `S_i(H)`: within each direction-`i` group, relabel coordinate `i` to
/// `1..=|group|`, assigning new labels in ascending order of the old ones.
pub fn shift_one(class: &HypothesisClass, i: usize) -> Result<HypothesisClass> {
    if i >= class.num_coords() {
        return Err(Error::CoordOutOfRange { coord: i, num_coords: class.num_coords() });
    }
    let mut rows = Vec::with_capacity(class.len());
    for members in groups(class, i).into_values() {
        let mut labels: Vec<(Label, usize)> = members.iter().map(|&v| (class.row(v)[i], v)).collect();
        labels.sort_unstable();
        for (rank, &(_, v)) in labels.iter().enumerate() {
            let mut row = class.row(v).to_vec();
            row[i] = rank as Label + 1;
            rows.push(row);
        }
    }
    rows.sort_unstable();
    Ok(HypothesisClass::from_sorted_unique(class.num_coords(), class.label_bound(), rows))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftStep {
    pub direction: usize,
    pub size_before: usize,
    pub size_after: usize,
    pub potential_before: u64,
    pub potential_after: u64,
    pub changed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftTrace {
    pub steps: Vec<ShiftStep>,
    pub final_class: HypothesisClass,
    pub rounds: usize,
}

impl ShiftTrace {
    /// CSV with header `step,direction,potential,changed` (1-based direction,
    /// potential after the step).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,direction,potential,changed\n");
        for (n, s) in self.steps.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", n + 1, s.direction + 1, s.potential_after, s.changed));
        }
        out
    }
}

/// Applies `shift_one` for `i = 0..m` round robin until a full round leaves
/// the class unchanged.
pub fn shift_fixed_point(class: &HypothesisClass) -> ShiftTrace {
    let mut current = class.clone();
    let mut steps = Vec::new();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed_any = false;
        for i in 0..current.num_coords() {
            let before = potential(&current);
            let next = shift_one(&current, i).expect("direction in range");
            let changed = next != current;
            steps.push(ShiftStep {
                direction: i,
                size_before: current.len(),
                size_after: next.len(),
                potential_before: before,
                potential_after: potential(&next),
                changed,
            });
            changed_any |= changed;
            current = next;
        }
        if !changed_any {
            break;
        }
    }
    ShiftTrace { steps, final_class: current, rounds }
}

/// Every direction-`i` group's labels at `i` are exactly `1..=|group|`.
///
/// Equivalent to closure under coordinate-wise domination: lowering one
/// coordinate at a time stays within the class.
pub fn is_downward_closed(class: &HypothesisClass) -> bool {
    (0..class.num_coords()).all(|i| {
        groups(class, i).into_values().all(|members| {
            let mut labels: Vec<Label> = members.iter().map(|&v| class.row(v)[i]).collect();
            labels.sort_unstable();
            labels.iter().enumerate().all(|(rank, &x)| x == rank as Label + 1)
        })
    })
}

/// Literal check: every vector dominated by a row is a row. `None` if that
/// would enumerate more than `cap` vectors.
pub fn is_downward_closed_literal(class: &HypothesisClass, cap: u128) -> Option<bool> {
    let total: u128 = class
        .rows()
        .iter()
        .map(|r| r.iter().map(|&x| x as u128).product::<u128>())
        .sum();
    if total > cap {
        return None;
    }
    Some(class.rows().iter().all(|row| {
        let choices: Vec<Vec<Label>> = row.iter().map(|&x| (1..=x).collect()).collect();
        product(&choices).iter().all(|g| class.contains(g))
    }))
}
