//! Evaluation history partitioned into the five mutually exclusive point
//! classes, plus the point-filtering rule that assigns them.

use std::io::Write;

use thiserror::Error;

use crate::problem::{ConstraintKind, ConstraintOutcome, EvaluationOutcome, ProblemSpec, FEASIBILITY_TOL};
use crate::real::{dist_sq, Real};

/// Duplicate tolerance on normalized coordinates. Coincident centers make
/// the RBF system singular, so near-identical points are rejected outright.
pub const DUPLICATE_TOL: f64 = 1e-10;

/// Classification of an evaluated point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointClass {
    /// Feasible.
    F,
    /// Violates only QRSK constraints.
    I,
    /// Violates NRSK but nothing unrelaxable.
    S,
    /// Violates exactly one QUSK constraint.
    U,
    /// Violates NUSH/NUSK or at least two QUSK constraints.
    H,
}

impl PointClass {
    pub const ALL: [PointClass; 5] = [
        PointClass::F,
        PointClass::I,
        PointClass::S,
        PointClass::U,
        PointClass::H,
    ];

    pub fn letter(self) -> char {
        match self {
            PointClass::F => 'F',
            PointClass::I => 'I',
            PointClass::S => 'S',
            PointClass::U => 'U',
            PointClass::H => 'H',
        }
    }

    fn slot(self) -> usize {
        match self {
            PointClass::F => 0,
            PointClass::I => 1,
            PointClass::S => 2,
            PointClass::U => 3,
            PointClass::H => 4,
        }
    }
}

/// One stored evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchivedPoint<T> {
    /// Raw coordinates.
    pub x: Vec<T>,
    /// Box-normalized coordinates, cached for all geometry.
    pub z: Vec<T>,
    pub outcome: EvaluationOutcome<T>,
    pub class: PointClass,
    /// For U points, the index of the single violated QUSK constraint.
    pub violated_qusk: Option<usize>,
    /// Insertion order, equals the evaluation index within the run.
    pub eval_index: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum ArchiveError {
    #[error("point duplicates archive entry {existing} within tolerance")]
    Duplicate { existing: usize },
    #[error("outcome inconsistent: hidden failure with objective present")]
    InconsistentOutcome,
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Evaluated-point history for one solver run.
#[derive(Debug, Clone)]
pub struct Archive<T: Real> {
    lower: Vec<T>,
    upper: Vec<T>,
    kinds: Vec<ConstraintKind>,
    points: Vec<ArchivedPoint<T>>,
    by_class: [Vec<usize>; 5],
}

impl<T: Real> Archive<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>, kinds: Vec<ConstraintKind>) -> Self {
        assert_eq!(lower.len(), upper.len());
        Archive {
            lower,
            upper,
            kinds,
            points: Vec::new(),
            by_class: Default::default(),
        }
    }

    pub fn for_problem(problem: &ProblemSpec<T>) -> Self {
        Archive::new(
            problem.lower().to_vec(),
            problem.upper().to_vec(),
            problem.kinds().to_vec(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn kinds(&self) -> &[ConstraintKind] {
        &self.kinds
    }

    pub fn points(&self) -> &[ArchivedPoint<T>] {
        &self.points
    }

    pub fn class_indices(&self, class: PointClass) -> &[usize] {
        &self.by_class[class.slot()]
    }

    pub fn class_count(&self, class: PointClass) -> usize {
        self.by_class[class.slot()].len()
    }

    pub fn normalize(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&xi, (&l, &u))| (xi - l) / (u - l))
            .collect()
    }

    /// Index of an archived point within `DUPLICATE_TOL` of normalized `z`.
    pub fn find_normalized(&self, z: &[T]) -> Option<usize> {
        let tol_sq = T::of(DUPLICATE_TOL * DUPLICATE_TOL);
        self.points.iter().position(|p| dist_sq(&p.z, z) <= tol_sq)
    }

    pub fn contains_normalized(&self, z: &[T]) -> bool {
        self.find_normalized(z).is_some()
    }

    pub fn contains_raw(&self, x: &[T]) -> bool {
        self.contains_normalized(&self.normalize(x))
    }

    /// Classify one evaluated point per the filtering rule and append it.
    ///
    /// Priority: hidden failure / NUSK / two or more QUSK violations -> H;
    /// exactly one QUSK -> U; any NRSK -> S; only QRSK -> I; none -> F.
    pub fn filter_point(
        &mut self,
        x: &[T],
        outcome: EvaluationOutcome<T>,
    ) -> Result<PointClass, ArchiveError> {
        if x.len() != self.dimension() {
            return Err(ArchiveError::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        if outcome.hidden_failure && outcome.objective.is_some() {
            return Err(ArchiveError::InconsistentOutcome);
        }
        if !outcome.hidden_failure && outcome.constraints.len() != self.kinds.len() {
            return Err(ArchiveError::DimensionMismatch {
                expected: self.kinds.len(),
                got: outcome.constraints.len(),
            });
        }
        let z = self.normalize(x);
        if let Some(existing) = self.find_normalized(&z) {
            return Err(ArchiveError::Duplicate { existing });
        }

        let (class, violated_qusk) = self.classify(&outcome);
        let eval_index = self.points.len();
        self.by_class[class.slot()].push(eval_index);
        self.points.push(ArchivedPoint {
            x: x.to_vec(),
            z,
            outcome,
            class,
            violated_qusk,
            eval_index,
        });
        assert_eq!(
            self.by_class.iter().map(Vec::len).sum::<usize>(),
            self.points.len(),
            "class partition must cover the archive"
        );
        Ok(class)
    }

    fn classify(&self, outcome: &EvaluationOutcome<T>) -> (PointClass, Option<usize>) {
        if outcome.hidden_failure {
            return (PointClass::H, None);
        }
        let tol = T::of(FEASIBILITY_TOL);
        let mut nusk_violated = false;
        let mut nrsk_violated = false;
        let mut qrsk_violated = false;
        let mut qusk_violations: Vec<usize> = Vec::new();
        for (j, (kind, co)) in self.kinds.iter().zip(&outcome.constraints).enumerate() {
            match (kind, co) {
                (ConstraintKind::Qrsk, ConstraintOutcome::Value(v)) => {
                    qrsk_violated |= *v < -tol;
                }
                (ConstraintKind::Qusk, ConstraintOutcome::Value(v)) => {
                    if *v < -tol {
                        qusk_violations.push(j);
                    }
                }
                (ConstraintKind::Nrsk, ConstraintOutcome::Flag(pass)) => {
                    nrsk_violated |= !pass;
                }
                (ConstraintKind::Nusk, ConstraintOutcome::Flag(pass)) => {
                    nusk_violated |= !pass;
                }
                (ConstraintKind::Nush, ConstraintOutcome::Hidden) => {}
                _ => unreachable!("constraint outcome does not match kind"),
            }
        }
        if nusk_violated || qusk_violations.len() >= 2 {
            (PointClass::H, None)
        } else if qusk_violations.len() == 1 {
            (PointClass::U, Some(qusk_violations[0]))
        } else if nrsk_violated {
            (PointClass::S, None)
        } else if qrsk_violated {
            (PointClass::I, None)
        } else {
            (PointClass::F, None)
        }
    }

    /// Re-derive the class of a stored point from its stored outcome.
    pub fn reclassify(&self, index: usize) -> PointClass {
        self.classify(&self.points[index].outcome).0
    }

    /// Minimum-objective feasible point, ties broken by earliest evaluation.
    pub fn best_feasible(&self) -> Option<(&[T], T)> {
        let mut best: Option<(&[T], T)> = None;
        for &i in &self.by_class[PointClass::F.slot()] {
            let p = &self.points[i];
            let f = p.outcome.objective.expect("feasible point has objective");
            if best.map_or(true, |(_, bf)| f < bf) {
                best = Some((&p.x, f));
            }
        }
        best
    }

    /// Most recently evaluated feasible point.
    pub fn latest_feasible(&self) -> Option<&ArchivedPoint<T>> {
        self.by_class[PointClass::F.slot()]
            .last()
            .map(|&i| &self.points[i])
    }

    /// Candidate RBF centers shared by every surrogate: F, I and S points
    /// in evaluation order.
    pub fn surrogate_base_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self.by_class[PointClass::F.slot()]
            .iter()
            .chain(&self.by_class[PointClass::I.slot()])
            .chain(&self.by_class[PointClass::S.slot()])
            .copied()
            .collect();
        idx.sort_unstable();
        idx
    }

    /// U points feasible for QUSK constraint `j`, in evaluation order.
    pub fn qusk_extension_indices(&self, j: usize) -> Vec<usize> {
        let tol = T::of(FEASIBILITY_TOL);
        self.by_class[PointClass::U.slot()]
            .iter()
            .copied()
            .filter(|&i| match self.points[i].outcome.constraints[j] {
                ConstraintOutcome::Value(v) => v >= -tol,
                _ => false,
            })
            .collect()
    }

    /// Stored quantifiable constraint value at point `i`.
    pub fn constraint_value(&self, i: usize, j: usize) -> Option<T> {
        match self.points[i].outcome.constraints.get(j) {
            Some(ConstraintOutcome::Value(v)) => Some(*v),
            _ => None,
        }
    }

    /// Dump the archive as CSV: coordinates, class letter, objective (or
    /// NA), then one column per constraint.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let d = self.dimension();
        let m = self.kinds.len();
        let mut header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
        header.push("class".to_string());
        header.push("objective".to_string());
        header.extend((0..m).map(|j| format!("g{j}")));
        writeln!(w, "{}", header.join(","))?;
        for p in &self.points {
            let mut row: Vec<String> = p.x.iter().map(|v| format!("{}", v.as_f64())).collect();
            row.push(p.class.letter().to_string());
            row.push(match p.outcome.objective {
                Some(f) => format!("{}", f.as_f64()),
                None => "NA".to_string(),
            });
            if p.outcome.hidden_failure {
                row.extend(std::iter::repeat("NA".to_string()).take(m));
            } else {
                for co in &p.outcome.constraints {
                    row.push(match co {
                        ConstraintOutcome::Value(v) => format!("{}", v.as_f64()),
                        ConstraintOutcome::Flag(true) => "pass".to_string(),
                        ConstraintOutcome::Flag(false) => "fail".to_string(),
                        ConstraintOutcome::Hidden => "NA".to_string(),
                    });
                }
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::ConstraintKind::*;

    fn archive_with_kinds(kinds: Vec<ConstraintKind>) -> Archive<f64> {
        Archive::new(vec![0.0, 0.0], vec![1.0, 1.0], kinds)
    }

    fn outcome_for(
        kinds: &[ConstraintKind],
        values: &[f64],
        crashed: bool,
    ) -> EvaluationOutcome<f64> {
        if crashed {
            return EvaluationOutcome {
                objective: None,
                constraints: vec![ConstraintOutcome::Hidden; kinds.len()],
                hidden_failure: true,
            };
        }
        let mut unrelaxable = false;
        let constraints = kinds
            .iter()
            .zip(values)
            .map(|(k, &v)| {
                let violated = v < -FEASIBILITY_TOL;
                if violated && !k.relaxable() {
                    unrelaxable = true;
                }
                match k {
                    Qrsk | Qusk => ConstraintOutcome::Value(v),
                    Nrsk | Nusk => ConstraintOutcome::Flag(!violated),
                    Nush => ConstraintOutcome::Hidden,
                }
            })
            .collect();
        EvaluationOutcome {
            objective: (!unrelaxable).then_some(values.iter().sum()),
            constraints,
            hidden_failure: false,
        }
    }

    #[test]
    fn classification_priority() {
        // NUSK violated -> H, even with everything else violated too.
        let kinds = vec![Nusk, Qusk, Qrsk];
        let mut a = archive_with_kinds(kinds.clone());
        let c = a
            .filter_point(&[0.1, 0.1], outcome_for(&kinds, &[-1.0, -1.0, -1.0], false))
            .unwrap();
        assert_eq!(c, PointClass::H);

        // One QUSK violated plus two QRSK -> U (QUSK rule first).
        let kinds = vec![Qusk, Qrsk, Qrsk];
        let mut a = archive_with_kinds(kinds.clone());
        let c = a
            .filter_point(&[0.1, 0.1], outcome_for(&kinds, &[-1.0, -1.0, -1.0], false))
            .unwrap();
        assert_eq!(c, PointClass::U);
        assert_eq!(a.points()[0].violated_qusk, Some(0));

        // Two QUSK violated -> H.
        let kinds = vec![Qusk, Qusk];
        let mut a = archive_with_kinds(kinds.clone());
        let c = a
            .filter_point(&[0.1, 0.1], outcome_for(&kinds, &[-1.0, -1.0], false))
            .unwrap();
        assert_eq!(c, PointClass::H);

        // NRSK + QRSK violated -> S.
        let kinds = vec![Nrsk, Qrsk];
        let mut a = archive_with_kinds(kinds.clone());
        let c = a
            .filter_point(&[0.1, 0.1], outcome_for(&kinds, &[-1.0, -1.0], false))
            .unwrap();
        assert_eq!(c, PointClass::S);

        // Only QRSK violated -> I; none -> F.
        let kinds = vec![Qrsk, Qrsk];
        let mut a = archive_with_kinds(kinds.clone());
        assert_eq!(
            a.filter_point(&[0.1, 0.1], outcome_for(&kinds, &[-1.0, 1.0], false))
                .unwrap(),
            PointClass::I
        );
        assert_eq!(
            a.filter_point(&[0.9, 0.9], outcome_for(&kinds, &[1.0, 1.0], false))
                .unwrap(),
            PointClass::F
        );
    }

    #[test]
    fn nrsk_with_one_qusk_goes_to_u() {
        // Listed rule order: the QUSK test fires before the NRSK test.
        let kinds = vec![Nrsk, Qusk];
        let mut a = archive_with_kinds(kinds.clone());
        let c = a
            .filter_point(&[0.5, 0.5], outcome_for(&kinds, &[-1.0, -1.0], false))
            .unwrap();
        assert_eq!(c, PointClass::U);
        assert_eq!(a.points()[0].violated_qusk, Some(1));
    }

    #[test]
    fn duplicates_rejected() {
        let kinds = vec![Qrsk];
        let mut a = archive_with_kinds(kinds.clone());
        a.filter_point(&[0.5, 0.5], outcome_for(&kinds, &[1.0], false))
            .unwrap();
        let err = a
            .filter_point(&[0.5, 0.5 + 1e-12], outcome_for(&kinds, &[1.0], false))
            .unwrap_err();
        assert_eq!(err, ArchiveError::Duplicate { existing: 0 });
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn inconsistent_outcome_rejected() {
        let mut a = archive_with_kinds(vec![Nush]);
        let bad = EvaluationOutcome {
            objective: Some(1.0),
            constraints: vec![ConstraintOutcome::Hidden],
            hidden_failure: true,
        };
        assert_eq!(
            a.filter_point(&[0.5, 0.5], bad).unwrap_err(),
            ArchiveError::InconsistentOutcome
        );
    }

    #[test]
    fn best_feasible_argmin_with_insertion_tie_break() {
        let kinds = vec![Qrsk];
        let mut a = archive_with_kinds(kinds.clone());
        let put = |a: &mut Archive<f64>, x: [f64; 2], f: f64| {
            let out = EvaluationOutcome {
                objective: Some(f),
                constraints: vec![ConstraintOutcome::Value(1.0)],
                hidden_failure: false,
            };
            a.filter_point(&x, out).unwrap();
        };
        assert!(a.best_feasible().is_none());
        put(&mut a, [0.1, 0.1], 3.0);
        put(&mut a, [0.2, 0.2], 1.5);
        let (x, f) = a.best_feasible().unwrap();
        assert_eq!((x[0], f), (0.2, 1.5));

        // Tie: the earlier of two equal objectives wins.
        let mut b = archive_with_kinds(kinds);
        put(&mut b, [0.3, 0.3], 2.0);
        put(&mut b, [0.7, 0.7], 2.0);
        let (x, f) = b.best_feasible().unwrap();
        assert_eq!((x[0], f), (0.3, 2.0));
    }

    #[test]
    fn partition_and_reclassification_idempotent() {
        let kinds = vec![Qusk, Nrsk, Qrsk];
        let mut a = archive_with_kinds(kinds.clone());
        let grid = [-1.0, 1.0];
        let mut n = 0;
        for &v0 in &grid {
            for &v1 in &grid {
                for &v2 in &grid {
                    let x = [n as f64 / 10.0, 0.0];
                    a.filter_point(&x, outcome_for(&kinds, &[v0, v1, v2], false))
                        .unwrap();
                    n += 1;
                }
            }
        }
        a.filter_point(&[0.9, 0.9], outcome_for(&kinds, &[], true))
            .unwrap();
        let total: usize = PointClass::ALL.iter().map(|&c| a.class_count(c)).sum();
        assert_eq!(total, a.len());
        for i in 0..a.len() {
            assert_eq!(a.reclassify(i), a.points()[i].class);
        }
    }

    #[test]
    fn qusk_extension_excludes_violators() {
        let kinds = vec![Qusk, Qusk];
        let mut a = archive_with_kinds(kinds.clone());
        // U point violating constraint 0 (feasible for 1) and vice versa.
        a.filter_point(&[0.1, 0.1], outcome_for(&kinds, &[-1.0, 1.0], false))
            .unwrap();
        a.filter_point(&[0.9, 0.9], outcome_for(&kinds, &[1.0, -1.0], false))
            .unwrap();
        assert_eq!(a.qusk_extension_indices(0), vec![1]);
        assert_eq!(a.qusk_extension_indices(1), vec![0]);
    }

    #[test]
    fn csv_dump_format() {
        let kinds = vec![Qrsk, Nrsk];
        let mut a = archive_with_kinds(kinds.clone());
        a.filter_point(&[0.5, 0.25], outcome_for(&kinds, &[1.0, -2.0], false))
            .unwrap();
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x0,x1,class,objective,g0,g1");
        assert_eq!(lines.next().unwrap(), "0.5,0.25,S,-1,1,fail");
    }
}
