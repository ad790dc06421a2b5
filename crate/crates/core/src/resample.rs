//! Index-based resampling that respects the dependence model.
//!
//! A [`Resample`] never copies data. Outer resamples hold indices into the
//! observed sample; inner resamples hold positions into their outer resample,
//! and [`Resample::compose`] turns them into indices into the observed sample.
//! The nested bootstrap loops never materialize inner resamples at all: they
//! draw a position, look up the outer index and accumulate the value.

use crate::estimate::SampleMoments;
use crate::model::{Dataset, DependenceModel, MAX_DIM};
use crate::rng::{SeedPath, Stream};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resample {
    /// Vector-i.i.d.: one sequence of row indices shared by every column.
    Rows(Vec<u32>),
    /// Componentwise independence: one index sequence per column.
    Columns(Vec<Vec<u32>>),
}

impl Resample {
    /// The resample that reproduces the source exactly.
    pub fn identity(ds: &Dataset) -> Resample {
        match ds.model() {
            DependenceModel::VectorIid => Resample::Rows((0..ds.len_of(0) as u32).collect()),
            DependenceModel::ComponentwiseIndependent => Resample::Columns(
                (0..ds.dim())
                    .map(|j| (0..ds.len_of(j) as u32).collect())
                    .collect(),
            ),
        }
    }

    /// Indices used for column `j`.
    pub fn column(&self, j: usize) -> &[u32] {
        match self {
            Resample::Rows(idx) => idx,
            Resample::Columns(cols) => &cols[j],
        }
    }

    /// True if every index is in range and lengths match `ds`.
    pub fn is_valid_for(&self, ds: &Dataset) -> bool {
        match self {
            Resample::Rows(idx) => {
                ds.model() == DependenceModel::VectorIid
                    && idx.len() == ds.len_of(0)
                    && idx.iter().all(|&i| (i as usize) < ds.len_of(0))
            }
            Resample::Columns(cols) => {
                ds.model() == DependenceModel::ComponentwiseIndependent
                    && cols.len() == ds.dim()
                    && cols.iter().enumerate().all(|(j, c)| {
                        c.len() == ds.len_of(j) && c.iter().all(|&i| (i as usize) < ds.len_of(j))
                    })
            }
        }
    }

    /// Maps an inner resample (positions into `self`) to indices into the
    /// source of `self`.
    pub fn compose(&self, inner: &Resample) -> Resample {
        match (self, inner) {
            (Resample::Rows(outer), Resample::Rows(pos)) => {
                Resample::Rows(pos.iter().map(|&k| outer[k as usize]).collect())
            }
            (Resample::Columns(outer), Resample::Columns(pos)) => Resample::Columns(
                outer
                    .iter()
                    .zip(pos)
                    .map(|(o, p)| p.iter().map(|&k| o[k as usize]).collect())
                    .collect(),
            ),
            _ => panic!("cannot compose resamples of different layouts"),
        }
    }

    /// Copies the resampled values into a new dataset.
    pub fn materialize(&self, ds: &Dataset) -> Dataset {
        let columns = (0..ds.dim())
            .map(|j| {
                let col = ds.column(j);
                self.column(j).iter().map(|&i| col[i as usize]).collect()
            })
            .collect();
        Dataset::unvalidated(ds.model(), columns)
    }
}

fn draw_positions(
    lengths: impl Iterator<Item = usize>,
    rows: bool,
    stream: &mut Stream,
) -> Resample {
    let mut cols: Vec<Vec<u32>> = lengths
        .map(|n| (0..n).map(|_| stream.below(n as u32)).collect())
        .collect();
    if rows {
        Resample::Rows(cols.swap_remove(0))
    } else {
        Resample::Columns(cols)
    }
}

/// First-level resample of `ds`, drawn from the stream at `path`.
///
/// Under [`DependenceModel::VectorIid`] one index sequence selects whole rows;
/// otherwise each column gets its own sequence, drawn in column order from the
/// same stream.
pub fn draw_outer(ds: &Dataset, master: u64, path: SeedPath) -> Resample {
    let mut stream = path.stream(master);
    match ds.model() {
        DependenceModel::VectorIid => {
            draw_positions(std::iter::once(ds.len_of(0)), true, &mut stream)
        }
        DependenceModel::ComponentwiseIndependent => {
            draw_positions((0..ds.dim()).map(|j| ds.len_of(j)), false, &mut stream)
        }
    }
}

/// Second-level resample: positions into `outer`, same contract as
/// [`draw_outer`]. Use [`Resample::compose`] to index the observed sample.
pub fn draw_inner(outer: &Resample, master: u64, path: SeedPath) -> Resample {
    let mut stream = path.stream(master);
    match outer {
        Resample::Rows(idx) => draw_positions(std::iter::once(idx.len()), true, &mut stream),
        Resample::Columns(cols) => draw_positions(cols.iter().map(Vec::len), false, &mut stream),
    }
}

/// Componentwise mean of the resampled values, without copying them.
pub fn resample_mean(ds: &Dataset, rs: &Resample) -> Vec<f64> {
    moments_of::<false>(ds, rs, &mut IndexSource::Direct)
        .mean()
        .to_vec()
}

/// Means and covariances of the resampled values.
pub fn resample_moments(ds: &Dataset, rs: &Resample) -> SampleMoments {
    moments_of::<true>(ds, rs, &mut IndexSource::Direct)
}

/// Draws an inner resample of `outer` from `stream` and accumulates its
/// moments on the fly. Consumes the stream exactly like [`draw_inner`], so the
/// result equals `resample_moments(ds, &outer.compose(&draw_inner(..)))`.
pub(crate) fn inner_moments<const SPREAD: bool>(
    ds: &Dataset,
    outer: &Resample,
    stream: &mut Stream,
) -> SampleMoments {
    moments_of::<SPREAD>(ds, outer, &mut IndexSource::Drawn(stream))
}

enum IndexSource<'a> {
    /// Use the resample's indices in order.
    Direct,
    /// Draw positions into the resample's index sequence.
    Drawn(&'a mut Stream),
}

#[inline(always)]
fn next_index(src: &mut IndexSource<'_>, idx: &[u32], i: usize) -> usize {
    match src {
        IndexSource::Direct => idx[i] as usize,
        IndexSource::Drawn(s) => idx[s.below(idx.len() as u32) as usize] as usize,
    }
}

fn moments_of<const SPREAD: bool>(
    ds: &Dataset,
    rs: &Resample,
    src: &mut IndexSource<'_>,
) -> SampleMoments {
    let p = ds.dim();
    let mut m = SampleMoments {
        dim: p,
        model: ds.model(),
        counts: [0; MAX_DIM],
        mean: [0.0; MAX_DIM],
        cov: [[0.0; MAX_DIM]; MAX_DIM],
        has_spread: SPREAD,
    };
    match rs {
        Resample::Rows(idx) => {
            let n = idx.len();
            let nf = n as f64;
            if p == 1 {
                let col = ds.column(0);
                let shift = ds.shift(0);
                let (mut s, mut ss) = (0.0, 0.0);
                for i in 0..n {
                    let d = col[next_index(src, idx, i)] - shift;
                    s += d;
                    if SPREAD {
                        ss += d * d;
                    }
                }
                let md = s / nf;
                m.counts[0] = n;
                m.mean[0] = shift + md;
                if SPREAD {
                    m.cov[0][0] = (ss / nf - md * md).max(0.0);
                }
                return m;
            }
            let mut s = [0.0; MAX_DIM];
            let mut cross = [[0.0; MAX_DIM]; MAX_DIM];
            let mut d = [0.0; MAX_DIM];
            for i in 0..n {
                let row = next_index(src, idx, i);
                for j in 0..p {
                    d[j] = ds.column(j)[row] - ds.shift(j);
                    s[j] += d[j];
                }
                if SPREAD {
                    for j in 0..p {
                        for k in j..p {
                            cross[j][k] += d[j] * d[k];
                        }
                    }
                }
            }
            for j in 0..p {
                m.counts[j] = n;
                m.mean[j] = ds.shift(j) + s[j] / nf;
            }
            if SPREAD {
                for j in 0..p {
                    for k in j..p {
                        let c = cross[j][k] / nf - (s[j] / nf) * (s[k] / nf);
                        let c = if j == k { c.max(0.0) } else { c };
                        m.cov[j][k] = c;
                        m.cov[k][j] = c;
                    }
                }
            }
        }
        Resample::Columns(cols) => {
            for (j, idx) in cols.iter().enumerate() {
                let col = ds.column(j);
                let shift = ds.shift(j);
                let n = idx.len();
                let (mut s, mut ss) = (0.0, 0.0);
                for i in 0..n {
                    let d = col[next_index(src, idx, i)] - shift;
                    s += d;
                    if SPREAD {
                        ss += d * d;
                    }
                }
                let md = s / n as f64;
                m.counts[j] = n;
                m.mean[j] = shift + md;
                if SPREAD {
                    m.cov[j][j] = (ss / n as f64 - md * md).max(0.0);
                }
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::sample_mean;

    fn two_col(model: DependenceModel) -> Dataset {
        Dataset::new(
            model,
            vec![
                vec![1.0, 2.0, 3.0, 4.0, 5.0],
                vec![10.0, 20.0, 30.0, 40.0, 50.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_observation_resample() {
        let ds = Dataset::unvalidated(DependenceModel::VectorIid, vec![vec![7.0]]);
        for seed in 0..20 {
            assert_eq!(
                draw_outer(&ds, seed, SeedPath::outer(0, 0)),
                Resample::Rows(vec![0])
            );
        }
    }

    #[test]
    fn vector_iid_resamples_rows() {
        let ds = two_col(DependenceModel::VectorIid);
        for b in 0..50 {
            let rs = draw_outer(&ds, 11, SeedPath::outer(0, b));
            assert!(rs.is_valid_for(&ds));
            let mat = rs.materialize(&ds);
            for i in 0..5 {
                assert_eq!(mat.column(1)[i], 10.0 * mat.column(0)[i]);
            }
        }
    }

    #[test]
    fn componentwise_resamples_columns_independently() {
        let ds = two_col(DependenceModel::ComponentwiseIndependent);
        let mut misaligned = false;
        for b in 0..50 {
            let rs = draw_outer(&ds, 11, SeedPath::outer(0, b));
            assert!(rs.is_valid_for(&ds));
            misaligned |= rs.column(0) != rs.column(1);
        }
        assert!(misaligned);
    }

    #[test]
    fn degenerate_outer_gives_degenerate_inner() {
        let ds = Dataset::univariate(vec![3.0, 5.0, 8.0, 13.0]).unwrap();
        let outer = Resample::Rows(vec![0; 4]);
        let inner = draw_inner(&outer, 5, SeedPath::inner(0, 0, 0));
        let composed = outer.compose(&inner);
        assert_eq!(composed.materialize(&ds).column(0), &[3.0; 4]);
    }

    #[test]
    fn inner_draw_is_deterministic() {
        let ds = Dataset::univariate((0..20).map(f64::from).collect()).unwrap();
        let outer = draw_outer(&ds, 99, SeedPath::outer(2, 3));
        let a = draw_inner(&outer, 99, SeedPath::inner(2, 3, 4));
        let b = draw_inner(&outer, 99, SeedPath::inner(2, 3, 4));
        assert_eq!(a, b);
        assert_ne!(a, draw_inner(&outer, 99, SeedPath::inner(2, 3, 5)));
    }

    #[test]
    fn mean_examples() {
        let ds = two_col(DependenceModel::VectorIid);
        assert_eq!(
            resample_mean(&ds, &Resample::identity(&ds)),
            sample_mean(&ds)
        );
        assert_eq!(
            resample_mean(&ds, &Resample::Rows(vec![2; 5])),
            vec![3.0, 30.0]
        );
    }

    #[test]
    fn streamed_inner_matches_materialized_inner() {
        for model in [
            DependenceModel::VectorIid,
            DependenceModel::ComponentwiseIndependent,
        ] {
            let ds = two_col(model);
            let outer = draw_outer(&ds, 1, SeedPath::outer(0, 1));
            let path = SeedPath::inner(0, 1, 2);
            let inner = draw_inner(&outer, 1, path);
            let want = resample_moments(&ds, &outer.compose(&inner));
            let got = inner_moments::<true>(&ds, &outer, &mut path.stream(1));
            assert_eq!(got, want);
        }
    }
}
