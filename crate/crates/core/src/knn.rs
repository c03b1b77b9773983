//! The classification constraint `g_c`: scores a candidate point by the
//! class of its nearest evaluated neighbors, steering subproblem solutions
//! away from regions where nonquantifiable constraints fail.

use thiserror::Error;

use crate::archive::{Archive, PointClass};
use crate::real::{dist_sq, Real};

/// Return levels and neighbor count for `g_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcParams<T> {
    /// Returned for points classified F or I (and when data is too sparse).
    pub c1: T,
    /// Returned for class S.
    pub c2: T,
    /// Returned for class U.
    pub c3: T,
    /// Returned for class H.
    pub c4: T,
    pub k_neighbors: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum GcParamsError {
    #[error("levels must satisfy c1 > 0 and c4 < c3 < c2 < 0")]
    InvalidLevels,
    #[error("k_neighbors must be a positive odd integer, got {0}")]
    InvalidK(usize),
}

impl<T: Real> GcParams<T> {
    pub fn new(c1: T, c2: T, c3: T, c4: T, k_neighbors: usize) -> Result<Self, GcParamsError> {
        if !(c1 > T::zero() && c4 < c3 && c3 < c2 && c2 < T::zero()) {
            return Err(GcParamsError::InvalidLevels);
        }
        if k_neighbors == 0 || k_neighbors % 2 == 0 {
            return Err(GcParamsError::InvalidK(k_neighbors));
        }
        Ok(GcParams {
            c1,
            c2,
            c3,
            c4,
            k_neighbors,
        })
    }

    /// Paper defaults: c = (1, -1, -10, -100), k = 3.
    pub fn default_levels() -> Self {
        GcParams {
            c1: T::one(),
            c2: T::of(-1.0),
            c3: T::of(-10.0),
            c4: T::of(-100.0),
            k_neighbors: 3,
        }
    }

    fn level_for(&self, category: Category) -> T {
        match category {
            Category::Good => self.c1,
            Category::S => self.c2,
            Category::U => self.c3,
            Category::H => self.c4,
        }
    }
}

/// Voting categories: F and I pool together because they share a return
/// level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Category {
    Good,
    S,
    U,
    H,
}

impl Category {
    fn of(class: PointClass) -> Category {
        match class {
            PointClass::F | PointClass::I => Category::Good,
            PointClass::S => Category::S,
            PointClass::U => Category::U,
            PointClass::H => Category::H,
        }
    }

    fn slot(self) -> usize {
        match self {
            Category::Good => 0,
            Category::S => 1,
            Category::U => 2,
            Category::H => 3,
        }
    }

    const ALL: [Category; 4] = [Category::Good, Category::S, Category::U, Category::H];
}

/// Whether the archive holds enough points on both sides for a meaningful
/// classification.
pub fn has_sufficient_data<T: Real>(archive: &Archive<T>) -> bool {
    let count = |c: PointClass| archive.class_count(c);
    (count(PointClass::F) > 2 || count(PointClass::I) > 2)
        && (count(PointClass::H) > 2 || count(PointClass::U) > 2 || count(PointClass::S) > 2)
}

/// The classification constraint at normalized point `z`.
///
/// Returns `c1` when the archive lacks data on either side; otherwise the
/// level mapped to the majority class among the `k` nearest archived points
/// (Euclidean distance in normalized coordinates), ties broken by the
/// single nearest neighbor's class.
pub fn g_c<T: Real>(archive: &Archive<T>, z: &[T], params: &GcParams<T>) -> T {
    if !has_sufficient_data(archive) {
        return params.c1;
    }

    let k = params.k_neighbors.min(archive.len());
    // (distance^2, insertion index) keyed selection keeps ties deterministic.
    let mut nearest: Vec<(T, usize)> = Vec::with_capacity(k + 1);
    for p in archive.points() {
        let d_sq = dist_sq(&p.z, z);
        let slot = nearest
            .iter()
            .position(|&(nd, ni)| (d_sq, p.eval_index) < (nd, ni));
        match slot {
            Some(at) => nearest.insert(at, (d_sq, p.eval_index)),
            None if nearest.len() < k => nearest.push((d_sq, p.eval_index)),
            None => continue,
        }
        nearest.truncate(k);
    }

    let mut votes = [0usize; 4];
    for &(_, idx) in &nearest {
        votes[Category::of(archive.points()[idx].class).slot()] += 1;
    }
    let top = *votes.iter().max().expect("four categories");
    let leaders: Vec<Category> = Category::ALL
        .into_iter()
        .filter(|c| votes[c.slot()] == top)
        .collect();
    let winner = if leaders.len() == 1 {
        leaders[0]
    } else {
        // Tie: side with the single nearest neighbor.
        Category::of(archive.points()[nearest[0].1].class)
    };
    params.level_for(winner)
}
