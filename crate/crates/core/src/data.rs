//! Rating datasets and synthetic instances.
//!
//! MovieLens 100k `u.data` files are tab-separated
//! `user<TAB>item<TAB>rating<TAB>timestamp`; the 1M and 10M `ratings.dat`
//! files use `::` as separator. Raw ids are remapped to dense 0-based
//! indices in order of first appearance.

use std::collections::HashMap;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{GecoError, Result};
use crate::linalg::{orthonormalize_columns, DenseMatrix, Vector};
use crate::objective::{FactoredMatrix, HuberTarget, ObservationSet};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rating {
    pub user: usize,
    pub item: usize,
    pub rating: f64,
    pub timestamp: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatingsDataset {
    pub ratings: Vec<Rating>,
    /// `user_ids[k]` is the raw id of dense user `k`.
    pub user_ids: Vec<u64>,
    pub item_ids: Vec<u64>,
}

impl RatingsDataset {
    pub fn users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    /// `(raw user, raw item, rating, timestamp)` in input order.
    pub fn raw_triples(&self) -> impl Iterator<Item = (u64, u64, f64, u64)> + '_ {
        self.ratings.iter().map(|r| {
            (
                self.user_ids[r.user],
                self.item_ids[r.item],
                r.rating,
                r.timestamp,
            )
        })
    }

    pub fn observations(&self) -> Result<ObservationSet> {
        self.subset(0..self.ratings.len())
    }

    fn subset(&self, idx: impl Iterator<Item = usize>) -> Result<ObservationSet> {
        ObservationSet::new(
            self.users(),
            self.items(),
            idx.map(|k| {
                let r = &self.ratings[k];
                (r.user, r.item, r.rating)
            }),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RatingScale {
    /// Integers 1 to 5.
    Integer,
    /// Multiples of 0.5 in `[0.5, 5]`.
    HalfStar,
}

impl RatingScale {
    fn accepts(self, r: f64) -> bool {
        match self {
            Self::Integer => r.fract() == 0.0 && (1.0..=5.0).contains(&r),
            Self::HalfStar => (r * 2.0).fract() == 0.0 && (0.5..=5.0).contains(&r),
        }
    }
}

#[derive(Default)]
struct Builder {
    users: HashMap<u64, usize>,
    items: HashMap<u64, usize>,
    user_ids: Vec<u64>,
    item_ids: Vec<u64>,
    seen: HashMap<(usize, usize), usize>,
    ratings: Vec<Rating>,
}

impl Builder {
    fn index(map: &mut HashMap<u64, usize>, ids: &mut Vec<u64>, raw: u64) -> usize {
        *map.entry(raw).or_insert_with(|| {
            ids.push(raw);
            ids.len() - 1
        })
    }

    fn push(
        &mut self,
        line_no: usize,
        user: u64,
        item: u64,
        rating: f64,
        timestamp: u64,
    ) -> Result<()> {
        let u = Self::index(&mut self.users, &mut self.user_ids, user);
        let i = Self::index(&mut self.items, &mut self.item_ids, item);
        if let Some(first) = self.seen.insert((u, i), line_no) {
            return Err(GecoError::Parse(format!(
                "duplicate rating for user {user}, item {item} on lines {first} and {line_no}"
            )));
        }
        self.ratings.push(Rating {
            user: u,
            item: i,
            rating,
            timestamp,
        });
        Ok(())
    }

    fn finish(self) -> Result<RatingsDataset> {
        if self.ratings.is_empty() {
            return Err(GecoError::Parse("no records".into()));
        }
        Ok(RatingsDataset {
            ratings: self.ratings,
            user_ids: self.user_ids,
            item_ids: self.item_ids,
        })
    }
}

const FIELDS: [&str; 4] = ["user", "item", "rating", "timestamp"];

fn parse_with<R: BufRead>(
    reader: R,
    sep: Separator,
    scale: RatingScale,
    builder: &mut Builder,
) -> Result<()> {
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = match sep {
            Separator::Tab => line.split('\t').collect(),
            Separator::DoubleColon => line.split("::").collect(),
        };
        if fields.len() != 4 {
            return Err(GecoError::Parse(format!(
                "line {line_no}: expected 4 fields, found {}",
                fields.len()
            )));
        }
        let int_field = |idx: usize| -> Result<u64> {
            fields[idx].trim().parse::<u64>().map_err(|_| {
                GecoError::Parse(format!(
                    "line {line_no}: field `{}` is not a non-negative integer: {:?}",
                    FIELDS[idx], fields[idx]
                ))
            })
        };
        let user = int_field(0)?;
        let item = int_field(1)?;
        let rating: f64 = fields[2].trim().parse().map_err(|_| {
            GecoError::Parse(format!(
                "line {line_no}: field `rating` is not a number: {:?}",
                fields[2]
            ))
        })?;
        if !scale.accepts(rating) {
            return Err(GecoError::Parse(format!(
                "line {line_no}: rating {rating} outside the allowed scale"
            )));
        }
        let timestamp = int_field(3)?;
        builder.push(line_no, user, item, rating, timestamp)?;
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Separator {
    Tab,
    DoubleColon,
}

/// Parses a MovieLens 100k `u.data` stream.
pub fn parse_movielens_100k<R: BufRead>(reader: R) -> Result<RatingsDataset> {
    let mut b = Builder::default();
    parse_with(reader, Separator::Tab, RatingScale::Integer, &mut b)?;
    b.finish()
}

/// Parses a MovieLens 1M/10M `ratings.dat` stream; half-star ratings are
/// accepted.
pub fn parse_movielens_dat<R: BufRead>(reader: R) -> Result<RatingsDataset> {
    let mut b = Builder::default();
    parse_with(
        reader,
        Separator::DoubleColon,
        RatingScale::HalfStar,
        &mut b,
    )?;
    b.finish()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatingsFormat {
    Ml100k,
    MlDat,
}

/// Parses a predefined train/test pair (e.g. `u1.base` / `u1.test`) with a
/// shared id map. Returns the merged dataset and both observation sets.
pub fn parse_file_pair<R1: BufRead, R2: BufRead>(
    train: R1,
    test: R2,
    format: RatingsFormat,
) -> Result<(RatingsDataset, ObservationSet, ObservationSet)> {
    let (sep, scale) = match format {
        RatingsFormat::Ml100k => (Separator::Tab, RatingScale::Integer),
        RatingsFormat::MlDat => (Separator::DoubleColon, RatingScale::HalfStar),
    };
    let mut b = Builder::default();
    parse_with(train, sep, scale, &mut b)?;
    let n_train = b.ratings.len();
    parse_with(test, sep, scale, &mut b)?;
    let ds = b.finish()?;
    if n_train == 0 || n_train == ds.len() {
        return Err(GecoError::Parse("train or test file has no records".into()));
    }
    let train = ds.subset(0..n_train)?;
    let test = ds.subset(n_train..ds.len())?;
    Ok((ds, train, test))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitSpec {
    /// Fraction of ratings assigned to the training set.
    pub ratio: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            ratio: 0.8,
            seed: 0,
        }
    }
}

/// Seeded uniform split: a shuffled permutation whose first
/// `round(ratio * N)` entries form the training set.
pub fn split(
    dataset: &RatingsDataset,
    spec: &SplitSpec,
) -> Result<(ObservationSet, ObservationSet)> {
    if !(spec.ratio > 0.0 && spec.ratio < 1.0) {
        return Err(GecoError::InvalidConfig(format!(
            "split ratio must lie in (0, 1), got {}",
            spec.ratio
        )));
    }
    let (train, test) = split_indices(dataset.len(), spec);
    if train.is_empty() || test.is_empty() {
        return Err(GecoError::InvalidConfig(format!(
            "split of {} ratings at ratio {} leaves an empty side",
            dataset.len(),
            spec.ratio
        )));
    }
    Ok((
        dataset.subset(train.into_iter())?,
        dataset.subset(test.into_iter())?,
    ))
}

/// Index partition used by [`split`].
pub fn split_indices(len: usize, spec: &SplitSpec) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut idx: Vec<usize> = (0..len).collect();
    idx.shuffle(&mut rng);
    let n_train = ((spec.ratio * len as f64).round() as usize).min(len);
    let test = idx.split_off(n_train);
    let mut train = idx;
    train.sort_unstable();
    let mut test = test;
    test.sort_unstable();
    (train, test)
}

/// Planted low-rank instance.
#[derive(Clone, Debug)]
pub struct SyntheticInstance {
    /// Ground truth `A = U V^T` with `U = Qu diag(singular values)`, `V = Qv`.
    pub truth: FactoredMatrix,
    pub singular_values: Vec<f64>,
    pub observations: ObservationSet,
}

impl SyntheticInstance {
    pub fn trace_norm(&self) -> f64 {
        self.singular_values.iter().sum()
    }
}

/// Ground truth with orthonormal random singular vectors and the given
/// singular values.
pub fn planted_low_rank(
    m: usize,
    n: usize,
    singular_values: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<FactoredMatrix> {
    let k = singular_values.len();
    if k == 0 || k > m.min(n) {
        return Err(GecoError::InvalidConfig(format!(
            "planted rank {k} must be between 1 and min({m}, {n})"
        )));
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let gauss = |rows: usize, rng: &mut ChaCha8Rng| {
        DenseMatrix::from_fn(rows, k, |_, _| normal.sample(rng))
    };
    let (mut qu, _) = orthonormalize_columns(&gauss(m, rng))?;
    let (qv, _) = orthonormalize_columns(&gauss(n, rng))?;
    for (c, &s) in singular_values.iter().enumerate() {
        qu.column_mut(c).scale_mut(s);
    }
    FactoredMatrix::new(qu, qv)
}

/// `y = A_ij + N(0, noise^2)` on a uniformly sampled fraction of entries
/// (`fraction = 1` observes everything).
pub fn synth_low_rank(
    m: usize,
    n: usize,
    singular_values: &[f64],
    noise: f64,
    fraction: f64,
    seed: u64,
) -> Result<SyntheticInstance> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(GecoError::InvalidConfig(format!(
            "observed fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = planted_low_rank(m, n, singular_values, &mut rng)?;
    let dense = truth.to_dense();
    let count = ((fraction * (m * n) as f64).round() as usize).max(1);
    let mut cells: Vec<usize> = (0..m * n).collect();
    if count < m * n {
        cells.shuffle(&mut rng);
        cells.truncate(count);
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let triples: Vec<(usize, usize, f64)> = cells
        .into_iter()
        .map(|c| {
            let (i, j) = (c / n, c % n);
            let eps = if noise > 0.0 {
                noise * normal.sample(&mut rng)
            } else {
                0.0
            };
            (i, j, dense[(i, j)] + eps)
        })
        .collect();
    Ok(SyntheticInstance {
        truth,
        singular_values: singular_values.to_vec(),
        observations: ObservationSet::new(m, n, triples)?,
    })
}

/// Planted matrix plus sparse spikes of `+-magnitude`.
#[derive(Clone, Debug)]
pub struct OutlierInstance {
    pub truth: FactoredMatrix,
    pub target: HuberTarget,
    /// `(row, col)` of every spiked entry.
    pub outliers: Vec<(usize, usize)>,
}

/// Spikes exactly `floor(fraction * m * n)` uniformly chosen entries.
pub fn synth_outliers(
    m: usize,
    n: usize,
    singular_values: &[f64],
    outlier_fraction: f64,
    outlier_magnitude: f64,
    seed: u64,
) -> Result<OutlierInstance> {
    if !(0.0..1.0).contains(&outlier_fraction) {
        return Err(GecoError::InvalidConfig(format!(
            "outlier fraction must lie in [0, 1), got {outlier_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = planted_low_rank(m, n, singular_values, &mut rng)?;
    let mut y = truth.to_dense();
    let count = (outlier_fraction * (m * n) as f64).floor() as usize;
    let mut cells: Vec<usize> = (0..m * n).collect();
    cells.shuffle(&mut rng);
    let mut outliers: Vec<(usize, usize)> =
        cells[..count].iter().map(|&c| (c / n, c % n)).collect();
    outliers.sort_unstable();
    for &(i, j) in &outliers {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        y[(i, j)] += sign * outlier_magnitude;
    }
    Ok(OutlierInstance {
        truth,
        target: HuberTarget::new(y)?,
        outliers,
    })
}

/// Relative recovery error `|A - truth|_F / |truth|_F`.
pub fn recovery_error(estimate: &FactoredMatrix, truth: &FactoredMatrix) -> f64 {
    let t = truth.to_dense();
    let e = if estimate.k() == 0 {
        DenseMatrix::zeros(t.nrows(), t.ncols())
    } else {
        estimate.to_dense()
    };
    (e - &t).norm() / t.norm()
}

/// Reads a dense matrix file: header `m n`, then `m` rows of `n`
/// whitespace-separated reals.
pub fn parse_dense_matrix<R: BufRead>(reader: R) -> Result<DenseMatrix> {
    let mut lines = reader
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let (_, header) = lines
        .next()
        .ok_or_else(|| GecoError::Parse("empty matrix file".into()))?;
    let header = header?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| GecoError::Parse(format!("header must be `m n`, got {header:?}")))?;
    let [m, n] = dims[..] else {
        return Err(GecoError::Parse(format!(
            "header must be `m n`, got {header:?}"
        )));
    };
    let mut out = DenseMatrix::zeros(m, n);
    for row in 0..m {
        let (_, line) = lines.next().ok_or_else(|| {
            GecoError::Parse(format!("row {}: missing (expected {m} rows)", row + 1))
        })?;
        let line = line?;
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| GecoError::Parse(format!("row {}: non-numeric entry", row + 1)))?;
        if values.len() != n {
            return Err(GecoError::Parse(format!(
                "row {}: expected {n} values, found {}",
                row + 1,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GecoError::Parse(format!(
                "row {}: non-finite entry",
                row + 1
            )));
        }
        out.set_row(row, &Vector::from_vec(values).transpose());
    }
    if lines.next().is_some() {
        return Err(GecoError::Parse(format!("more than {m} rows")));
    }
    Ok(out)
}

/// Writes the format read by [`parse_dense_matrix`].
pub fn format_dense_matrix(m: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:e}", m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ml100k(text: &str) -> Result<RatingsDataset> {
        parse_movielens_100k(text.as_bytes())
    }

    #[test]
    fn parses_first_line_of_u_data() {
        let ds = ml100k("196\t242\t3\t881250949\n186\t302\t3\t891717742\n").unwrap();
        assert_eq!(ds.users(), 2);
        assert_eq!(ds.items(), 2);
        let r = ds.ratings[0];
        assert_eq!(
            (
                ds.user_ids[r.user],
                ds.item_ids[r.item],
                r.rating,
                r.timestamp
            ),
            (196, 242, 3.0, 881250949)
        );
    }

    #[test]
    fn crlf_and_blank_lines() {
        let ds = ml100k("1\t2\t5\t0\r\n\r\n2\t2\t1\t0\r\n").unwrap();
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn empty_stream_has_no_records() {
        match ml100k("") {
            Err(GecoError::Parse(msg)) => assert_eq!(msg, "no records"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_names_both_lines() {
        let err = ml100k("1\t2\t5\t0\n3\t3\t1\t0\n1\t2\t4\t9\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("lines 1 and 3"), "{err}");
    }

    #[test]
    fn rejects_bad_ratings_and_fields() {
        assert!(ml100k("1\t2\t6\t0\n")
            .unwrap_err()
            .to_string()
            .contains("line 1"));
        assert!(ml100k("1\t2\t3.5\t0\n").is_err());
        assert!(ml100k("1\tx\t3\t0\n")
            .unwrap_err()
            .to_string()
            .contains("`item`"));
        assert!(ml100k("1\t2\t3\n").is_err());
    }

    #[test]
    fn parses_dat_format() {
        let ds = parse_movielens_dat("1::1193::5::978300760\n1::661::4.5::978302109\n".as_bytes())
            .unwrap();
        assert_eq!(ds.raw_triples().next().unwrap(), (1, 1193, 5.0, 978300760));
        assert_eq!(ds.ratings[1].rating, 4.5);
        let err = parse_movielens_dat("x::1::5::0\n".as_bytes())
            .unwrap_err()
            .to_string();
        assert!(err.contains("`user`"), "{err}");
        assert!(parse_movielens_dat("1::1::4.25::0\n".as_bytes()).is_err());
    }

    #[test]
    fn file_pair_shares_id_map() {
        let (ds, train, test) = parse_file_pair(
            "1\t10\t5\t0\n2\t20\t3\t0\n".as_bytes(),
            "2\t10\t4\t0\n".as_bytes(),
            RatingsFormat::Ml100k,
        )
        .unwrap();
        assert_eq!(ds.users(), 2);
        assert_eq!(ds.items(), 2);
        assert_eq!(train.len(), 2);
        assert_eq!(test.len(), 1);
        assert_eq!(test.entries()[0].row, 1);
        assert_eq!(test.entries()[0].col, 0);
    }

    fn ten_ratings() -> RatingsDataset {
        ml100k(
            &(0..10)
                .map(|k| format!("{}\t{}\t{}\t0\n", k % 4, k, 1 + k % 5))
                .collect::<String>(),
        )
        .unwrap()
    }

    #[test]
    fn split_eight_two() {
        let (train, test) = split(
            &ten_ratings(),
            &SplitSpec {
                ratio: 0.8,
                seed: 1,
            },
        )
        .unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
    }

    #[test]
    fn split_rejects_bad_ratio() {
        assert!(split(
            &ten_ratings(),
            &SplitSpec {
                ratio: 1.0,
                seed: 1
            }
        )
        .is_err());
        assert!(split(
            &ten_ratings(),
            &SplitSpec {
                ratio: 0.0,
                seed: 1
            }
        )
        .is_err());
    }

    #[test]
    fn split_seeds_differ() {
        let a = split_indices(
            200,
            &SplitSpec {
                ratio: 0.8,
                seed: 1,
            },
        );
        let b = split_indices(
            200,
            &SplitSpec {
                ratio: 0.8,
                seed: 2,
            },
        );
        assert_ne!(a.0, b.0);
    }

    proptest! {
        #[test]
        fn split_is_a_deterministic_partition(len in 2usize..300, ratio in 0.05f64..0.95, seed in any::<u64>()) {
            let spec = SplitSpec { ratio, seed };
            let (train, test) = split_indices(len, &spec);
            prop_assert_eq!(split_indices(len, &spec), (train.clone(), test.clone()));
            prop_assert_eq!(train.len() + test.len(), len);
            let mut all: Vec<usize> = train.iter().chain(test.iter()).cloned().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..len).collect::<Vec<_>>());
            prop_assert!((train.len() as f64 - ratio * len as f64).abs() <= 1.0);
        }

        #[test]
        fn parser_is_lossless(rows in proptest::collection::btree_map((1u64..50, 1u64..80), (1u8..=5, 0u64..2_000_000_000), 1..60)) {
            let text: String = rows.iter().map(|(&(u, i), &(r, t))| format!("{u}\t{i}\t{r}\t{t}\n")).collect();
            let ds = ml100k(&text).unwrap();
            let back: Vec<(u64, u64, f64, u64)> = ds.raw_triples().collect();
            let want: Vec<(u64, u64, f64, u64)> = rows.iter().map(|(&(u, i), &(r, t))| (u, i, r as f64, t)).collect();
            prop_assert_eq!(back, want);
        }
    }

    #[test]
    fn synthetic_trace_norm_and_spectrum() {
        let inst = synth_low_rank(12, 10, &[5.0, 2.0, 1.0], 0.0, 1.0, 3).unwrap();
        assert_eq!(inst.trace_norm(), 8.0);
        let sv = inst.truth.singular_values();
        for (a, b) in sv.iter().zip([5.0, 2.0, 1.0]) {
            assert!((a - b).abs() < 1e-8);
        }
        assert_eq!(inst.observations.len(), 120);
        assert!(synth_low_rank(3, 3, &[1.0; 4], 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn synthetic_sampling_count() {
        let inst = synth_low_rank(20, 15, &[1.0], 0.1, 0.3, 9).unwrap();
        assert!((inst.observations.len() as f64 - 90.0).abs() <= 1.0);
    }

    #[test]
    fn outliers_counted_and_sized() {
        let clean = synth_outliers(10, 10, &[3.0, 1.0], 0.0, 50.0, 4).unwrap();
        assert_eq!(clean.target.matrix(), &clean.truth.to_dense());

        let spiked = synth_outliers(40, 40, &[5.0, 2.0, 1.0], 0.05, 50.0, 4).unwrap();
        assert_eq!(spiked.outliers.len(), 80);
        let diff = spiked.target.matrix() - spiked.truth.to_dense();
        let mut nonzero = 0;
        for i in 0..40 {
            for j in 0..40 {
                if diff[(i, j)] != 0.0 {
                    nonzero += 1;
                    assert!((diff[(i, j)].abs() - 50.0).abs() < 1e-12);
                }
            }
        }
        assert_eq!(nonzero, 80);
    }

    #[test]
    fn dense_matrix_roundtrip_and_errors() {
        let m = DenseMatrix::from_row_slice(2, 3, &[1.0, -2.5, 3.0, 0.0, 1e-3, 7.0]);
        let back = parse_dense_matrix(format_dense_matrix(&m).as_bytes()).unwrap();
        assert_eq!(back, m);
        let err = parse_dense_matrix("2 2\n1 2\n3\n".as_bytes())
            .unwrap_err()
            .to_string();
        assert!(err.contains("row 2"), "{err}");
        let err = parse_dense_matrix("2 2\n1 2\n3 x\n".as_bytes())
            .unwrap_err()
            .to_string();
        assert!(err.contains("row 2"), "{err}");
        assert!(parse_dense_matrix("".as_bytes()).is_err());
    }
}
