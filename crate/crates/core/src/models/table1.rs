use serde::Serialize;

use crate::qfield::QuadElem;

/// One parameter row: the field, the reduced intersection matrix, and the
/// width and height of the middle cylinder (`C1` and `C3` are unit squares).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table1Row {
    pub index: usize,
    #[serde(rename = "D")]
    pub d: u64,
    pub matrix: [[u64; 2]; 2],
    pub w2: QuadElem,
    pub h2: QuadElem,
}

impl Table1Row {
    pub fn matches(&self, d: u64, w2: &QuadElem, h2: &QuadElem) -> bool {
        self.d == d && &self.w2 == w2 && &self.h2 == h2
    }
}

pub fn table1_rows() -> Vec<Table1Row> {
    let q = QuadElem::from_parts;
    let rows = [
        (2, [[72, 48], [24, 18]], q(0, 1, 1, 2, 2), q(0, 1, 2, 1, 2)),
        (3, [[72, 24], [12, 6]], q(-1, 2, 1, 2, 3), q(-2, 1, 2, 1, 3)),
        (3, [[72, 24], [48, 18]], q(1, 2, 1, 2, 3), q(2, 1, 2, 1, 3)),
        (3, [[36, 12], [30, 12]], q(0, 1, 1, 1, 3), q(0, 1, 2, 3, 3)),
        (33, [[6, 24], [12, 54]], q(3, 2, 1, 2, 33), q(1, 2, 1, 6, 33)),
    ];
    rows.into_iter()
        .enumerate()
        .map(|(i, (d, matrix, w2, h2))| Table1Row {
            index: i + 1,
            d,
            matrix,
            w2,
            h2,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::rat;

    #[test]
    fn middle_cylinder_moduli() {
        // h2 / w2 for each row
        let want = [rat(4, 1), rat(4, 1), rat(4, 1), rat(2, 3), rat(1, 3)];
        for (row, m) in table1_rows().iter().zip(want) {
            let modulus = row.h2.clone() / row.w2.clone();
            assert_eq!(modulus, QuadElem::rational(m, row.d), "row {}", row.index);
            assert!(row.w2.is_positive() && row.h2.is_positive());
        }
    }
}
