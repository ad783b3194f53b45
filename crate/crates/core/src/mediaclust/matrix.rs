use rayon::prelude::*;

use crate::corpus::{ArticleIx, Corpus, MediumIx, UserIx};
use crate::{Error, Result};

/// ρ = n_s / (n_s + n_a) for one comment.
pub fn comment_sympathy_ratio(sympathies: u32, antipathies: u32) -> Result<f64> {
    let total = sympathies as u64 + antipathies as u64;
    if total == 0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(sympathies as f64 / total as f64)
}

/// Users × media grid of mean sympathy ratios with explicit missingness.
#[derive(Debug, Clone, PartialEq)]
pub struct SympathyMatrix {
    users: Vec<UserIx>,
    media: Vec<MediumIx>,
    values: Vec<Option<f64>>,
}

impl SympathyMatrix {
    pub fn from_parts(users: Vec<UserIx>, media: Vec<MediumIx>, values: Vec<Option<f64>>) -> Self {
        assert_eq!(values.len(), users.len() * media.len(), "matrix shape mismatch");
        SympathyMatrix { users, media, values }
    }

    pub fn users(&self) -> &[UserIx] {
        &self.users
    }

    pub fn media(&self) -> &[MediumIx] {
        &self.media
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.values[row * self.media.len() + col]
    }

    pub fn n_present(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }
}

/// Cell (i, m) is the mean over articles p of medium m of user i's mean
/// comment ratio on p. Only comments with at least `min_responses` affect
/// votes contribute (and never zero-vote comments); a cell with no such
/// comment is absent.
///
/// Articles are visited in index order and comments in index order within an
/// article, so every cell has a fixed summation order.
pub fn build_sympathy_matrix(
    corpus: &Corpus,
    users: &[UserIx],
    media: &[MediumIx],
    min_responses: u64,
) -> SympathyMatrix {
    let mut column_of = vec![None; corpus.media().len()];
    for (j, m) in media.iter().enumerate() {
        column_of[m.index()] = Some(j);
    }
    let n_cols = media.len();
    let min_votes = min_responses.max(1);

    let rows: Vec<Vec<Option<f64>>> = users
        .par_iter()
        .map(|&u| {
            let mut hits: Vec<(usize, ArticleIx, f64)> = corpus
                .comments_by(u)
                .filter(|c| c.affect_votes() >= min_votes)
                .filter_map(|c| {
                    let col = column_of[corpus.medium_of_comment(c).index()]?;
                    let rho = c.sympathies as f64 / c.affect_votes() as f64;
                    Some((col, c.article, rho))
                })
                .collect();
            hits.sort_by_key(|&(col, art, _)| (col, art));

            let mut row = vec![None; n_cols];
            let mut i = 0;
            while i < hits.len() {
                let col = hits[i].0;
                let (mut medium_sum, mut n_articles) = (0.0, 0usize);
                while i < hits.len() && hits[i].0 == col {
                    let art = hits[i].1;
                    let (mut sum, mut n) = (0.0, 0usize);
                    while i < hits.len() && hits[i].0 == col && hits[i].1 == art {
                        sum += hits[i].2;
                        n += 1;
                        i += 1;
                    }
                    medium_sum += sum / n as f64;
                    n_articles += 1;
                }
                row[col] = Some(medium_sum / n_articles as f64);
            }
            row
        })
        .collect();

    SympathyMatrix {
        users: users.to_vec(),
        media: media.to_vec(),
        values: rows.into_iter().flatten().collect(),
    }
}
