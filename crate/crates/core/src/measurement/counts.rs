use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::pair::JointOutcome;
use crate::spin::Sign;
use crate::{Error, Result};

/// Detector counts of a run: the four coincidence channels, from which the
/// single-detector counts of both sides follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CountTable {
    c: [u64; 4],
}

impl CountTable {
    pub fn from_coincidences(c: [u64; 4]) -> Result<Self> {
        let table = Self { c };
        if table.n_trials() == 0 {
            return Err(Error::ZeroTrials);
        }
        Ok(table)
    }

    pub(crate) fn empty() -> Self {
        Self::default()
    }

    pub(crate) fn record(&mut self, outcome: JointOutcome) {
        self.c[outcome.index()] += 1;
    }

    /// Sum of two tables. Counting is additive, so merging is associative and
    /// commutative.
    pub fn merge(&self, other: &CountTable) -> CountTable {
        CountTable {
            c: std::array::from_fn(|k| self.c[k] + other.c[k]),
        }
    }

    pub fn n_trials(&self) -> u64 {
        self.c.iter().sum()
    }

    pub fn coincidences(&self) -> [u64; 4] {
        self.c
    }

    pub fn coincidence(&self, outcome: JointOutcome) -> u64 {
        self.c[outcome.index()]
    }

    pub fn single_a(&self, s: Sign) -> u64 {
        self.coincidence(JointOutcome::new(s, Sign::Plus))
            + self.coincidence(JointOutcome::new(s, Sign::Minus))
    }

    pub fn single_b(&self, s: Sign) -> u64 {
        self.coincidence(JointOutcome::new(Sign::Plus, s))
            + self.coincidence(JointOutcome::new(Sign::Minus, s))
    }

    pub fn to_record(&self) -> CountRecord {
        CountRecord {
            n_trials: self.n_trials(),
            n_a_plus: self.single_a(Sign::Plus),
            n_a_minus: self.single_a(Sign::Minus),
            n_b_plus: self.single_b(Sign::Plus),
            n_b_minus: self.single_b(Sign::Minus),
            c_pp: self.c[0],
            c_pm: self.c[1],
            c_mp: self.c[2],
            c_mm: self.c[3],
        }
    }

    /// Validates a deserialized record, naming the first field that is
    /// inconsistent with the coincidence counts.
    pub fn from_record(rec: &CountRecord) -> Result<Self> {
        let table = Self {
            c: [rec.c_pp, rec.c_pm, rec.c_mp, rec.c_mm],
        };
        let expected = table.to_record();
        let checks = [
            (
                "n_trials",
                rec.n_trials,
                expected.n_trials,
                "c_pp + c_pm + c_mp + c_mm",
            ),
            ("n_a_plus", rec.n_a_plus, expected.n_a_plus, "c_pp + c_pm"),
            (
                "n_a_minus",
                rec.n_a_minus,
                expected.n_a_minus,
                "c_mp + c_mm",
            ),
            ("n_b_plus", rec.n_b_plus, expected.n_b_plus, "c_pp + c_mp"),
            (
                "n_b_minus",
                rec.n_b_minus,
                expected.n_b_minus,
                "c_pm + c_mm",
            ),
        ];
        for (field, got, want, formula) in checks {
            if got != want {
                return Err(Error::InconsistentCounts(format!(
                    "field `{field}` is {got} but {formula} = {want}"
                )));
            }
        }
        if table.n_trials() == 0 {
            return Err(Error::InconsistentCounts(
                "field `n_trials` must be positive".into(),
            ));
        }
        Ok(table)
    }
}

/// Serialized form of a [`CountTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub n_trials: u64,
    pub n_a_plus: u64,
    pub n_a_minus: u64,
    pub n_b_plus: u64,
    pub n_b_minus: u64,
    pub c_pp: u64,
    pub c_pm: u64,
    pub c_mp: u64,
    pub c_mm: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: u32,
    pub p_value: f64,
}

/// Pearson chi-square test that two tables were drawn from the same joint
/// distribution (2 × 4 contingency; channels empty in both are dropped).
pub fn chi_square_homogeneity(first: &CountTable, second: &CountTable) -> ChiSquareTest {
    let n1 = first.n_trials() as f64;
    let n2 = second.n_trials() as f64;
    let total = n1 + n2;
    let mut statistic = 0.0;
    let mut columns = 0u32;
    for k in 0..4 {
        let col = (first.c[k] + second.c[k]) as f64;
        if col == 0.0 {
            continue;
        }
        columns += 1;
        for (obs, n) in [(first.c[k] as f64, n1), (second.c[k] as f64, n2)] {
            let expected = n * col / total;
            statistic += (obs - expected).powi(2) / expected;
        }
    }
    let dof = columns.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .map(|d| d.sf(statistic))
            .unwrap_or(f64::NAN)
    };
    ChiSquareTest {
        statistic,
        dof,
        p_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singles_follow_from_coincidences() {
        let t = CountTable::from_coincidences([1, 2, 3, 4]).unwrap();
        assert_eq!(t.n_trials(), 10);
        assert_eq!(t.single_a(Sign::Plus), 3);
        assert_eq!(t.single_a(Sign::Minus), 7);
        assert_eq!(t.single_b(Sign::Plus), 4);
        assert_eq!(t.single_b(Sign::Minus), 6);
        assert_eq!(
            CountTable::from_coincidences([0; 4]),
            Err(Error::ZeroTrials)
        );
    }

    #[test]
    fn record_round_trip_and_validation() {
        let t = CountTable::from_coincidences([5, 0, 7, 1]).unwrap();
        let rec = t.to_record();
        let json = serde_json::to_string(&rec).unwrap();
        let back: CountRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(CountTable::from_record(&back).unwrap(), t);

        let mut bad = rec;
        bad.n_b_minus += 1;
        let err = CountTable::from_record(&bad).unwrap_err().to_string();
        assert!(err.contains("n_b_minus"), "{err}");
    }

    #[test]
    fn merge_is_commutative() {
        let a = CountTable::from_coincidences([1, 2, 3, 4]).unwrap();
        let b = CountTable::from_coincidences([4, 0, 0, 9]).unwrap();
        assert_eq!(a.merge(&b), b.merge(&a));
        assert_eq!(a.merge(&b).coincidences(), [5, 2, 3, 13]);
    }

    #[test]
    fn chi_square_hand_computed() {
        // Identical tables give statistic 0, p = 1.
        let a = CountTable::from_coincidences([10, 20, 30, 40]).unwrap();
        let r = chi_square_homogeneity(&a, &a);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.dof, 3);
        assert!((r.p_value - 1.0).abs() < 1e-12);

        // 2x2 effective table [[30, 10], [10, 30]]: chi2 = 4·(10²/20) = 20, dof 1.
        let x = CountTable::from_coincidences([30, 0, 10, 0]).unwrap();
        let y = CountTable::from_coincidences([10, 0, 30, 0]).unwrap();
        let r = chi_square_homogeneity(&x, &y);
        assert_eq!(r.dof, 1);
        assert!((r.statistic - 20.0).abs() < 1e-12);
        // P(chi2_1 > 20) = erfc(√10)
        assert!((r.p_value - 7.744216e-6).abs() < 1e-10);
    }
}
