use serde::{Deserialize, Serialize};

use super::{Corpus, MediumIx, UserIx};
use crate::{Error, Result};

/// Corpus-wide response statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_media: usize,
    pub n_articles: usize,
    pub n_comments: usize,
    pub n_users: usize,
    pub mean_sympathies_per_comment: f64,
    pub mean_antipathies_per_comment: f64,
    /// `None` when the corpus holds no antipathies at all.
    pub sympathy_antipathy_ratio: Option<f64>,
}

pub fn corpus_stats(corpus: &Corpus) -> Result<CorpusStats> {
    let n = corpus.comments().len();
    if n == 0 {
        return Err(Error::EmptyCorpus);
    }
    let (s, a) = corpus.comments().iter().fold((0u64, 0u64), |(s, a), c| {
        (s + c.sympathies as u64, a + c.antipathies as u64)
    });
    let ms = s as f64 / n as f64;
    let ma = a as f64 / n as f64;
    Ok(CorpusStats {
        n_media: corpus.media().len(),
        n_articles: corpus.articles().len(),
        n_comments: n,
        n_users: corpus.users().len(),
        mean_sympathies_per_comment: ms,
        mean_antipathies_per_comment: ma,
        sympathy_antipathy_ratio: (ma > 0.0).then(|| ms / ma),
    })
}

/// The `k` media with the most articles; ties go to the smaller medium id.
pub fn top_media(corpus: &Corpus, k: usize) -> Result<Vec<MediumIx>> {
    let available = corpus.media().len();
    if k > available {
        return Err(Error::TooFewMedia {
            requested: k,
            available,
        });
    }
    let mut ranked: Vec<(usize, MediumIx)> = (0..available)
        .map(|i| {
            let m = MediumIx(i as u32);
            (corpus.articles_of(m).len(), m)
        })
        .collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(ranked.into_iter().take(k).map(|(_, m)| m).collect())
}

fn nonempty_mask(corpus: &Corpus, media: &[MediumIx]) -> Result<Vec<bool>> {
    if media.is_empty() {
        return Err(Error::InvalidArgument("media set must be non-empty".into()));
    }
    Ok(corpus.media_mask(media))
}

/// Users with at least `min_comments` comments on `media` whose
/// sympathies + antipathies reach `min_responses`. Other comments are
/// ignored for the threshold. Sorted by user index.
pub fn filter_clustering_users(
    corpus: &Corpus,
    media: &[MediumIx],
    min_comments: usize,
    min_responses: u64,
) -> Result<Vec<UserIx>> {
    let mask = nonempty_mask(corpus, media)?;
    Ok(users_where(corpus, min_comments, |c| {
        mask[corpus.medium_of_comment(c).index()] && c.affect_votes() >= min_responses
    }))
}

/// Users with at least `min_comments` comments on articles of `media`.
/// Comments elsewhere do not count.
pub fn filter_active_users(corpus: &Corpus, media: &[MediumIx], min_comments: usize) -> Result<Vec<UserIx>> {
    let mask = nonempty_mask(corpus, media)?;
    Ok(users_where(corpus, min_comments, |c| {
        mask[corpus.medium_of_comment(c).index()]
    }))
}

fn users_where(
    corpus: &Corpus,
    min_comments: usize,
    counts: impl Fn(&super::Comment) -> bool,
) -> Vec<UserIx> {
    (0..corpus.users().len())
        .map(|i| UserIx(i as u32))
        .filter(|&u| corpus.comments_by(u).filter(|c| counts(c)).count() >= min_comments)
        .collect()
}
