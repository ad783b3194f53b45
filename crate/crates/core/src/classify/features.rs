use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{ArticleIx, Comment, Corpus};
use crate::mediaclust::{GroupSign, MediaGrouping};
use crate::{Error, Result};

/// Response triples of an article's top comments, with the group label
/// (1 for group A, 0 for group B).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub article: ArticleIx,
    pub label: u8,
    /// `k` consecutive (sympathies, antipathies, replies) triples.
    pub values: Vec<f64>,
}

/// Articles on group media with strictly more than `min_comments` comments,
/// in article id order.
pub fn select_articles(corpus: &Corpus, grouping: &MediaGrouping, min_comments: usize) -> Vec<ArticleIx> {
    let mut out: Vec<ArticleIx> = grouping
        .group_media()
        .into_iter()
        .flat_map(|m| corpus.articles_of(m))
        .filter(|&a| corpus.comment_count_on(a) > min_comments)
        .collect();
    out.sort_unstable();
    out
}

/// Ranking used for the top comments: most total responses first, then the
/// earlier comment, then the smaller id.
pub fn comment_rank_cmp(a: &Comment, b: &Comment) -> std::cmp::Ordering {
    b.total_responses()
        .cmp(&a.total_responses())
        .then(a.created_at.cmp(&b.created_at))
        .then_with(|| a.id.cmp(&b.id))
}

/// Features of one article from its `k` most-responded comments, zero-padded
/// to `3k` values.
pub fn article_features(
    article: ArticleIx,
    corpus: &Corpus,
    grouping: &MediaGrouping,
    k: usize,
) -> Result<FeatureVector> {
    let label = match grouping.sign_of(corpus.article(article).medium) {
        Some(GroupSign::Positive) => 1,
        Some(GroupSign::Negative) => 0,
        None => return Err(Error::NotGroupArticle(corpus.article(article).id.clone())),
    };
    let mut comments: Vec<&Comment> = corpus.comments_on(article).collect();
    let take = k.min(comments.len());
    if take > 0 && take < comments.len() {
        comments.select_nth_unstable_by(take - 1, |a, b| comment_rank_cmp(a, b));
    }
    comments.truncate(take);
    comments.sort_unstable_by(|a, b| comment_rank_cmp(a, b));

    let mut values = vec![0.0; 3 * k];
    for (i, c) in comments.iter().enumerate() {
        values[3 * i] = c.sympathies as f64;
        values[3 * i + 1] = c.antipathies as f64;
        values[3 * i + 2] = c.replies as f64;
    }
    Ok(FeatureVector {
        article,
        label,
        values,
    })
}

/// Features for every listed article, in input order.
pub fn build_features(
    corpus: &Corpus,
    grouping: &MediaGrouping,
    articles: &[ArticleIx],
    k: usize,
) -> Result<Vec<FeatureVector>> {
    articles
        .par_iter()
        .map(|&a| article_features(a, corpus, grouping, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::test_support::Builder;
    use crate::corpus::MediumIx;

    fn grouping() -> MediaGrouping {
        MediaGrouping::new(vec![MediumIx(0)], vec![MediumIx(1)], vec![MediumIx(2)])
    }

    #[test]
    fn ranking_and_padding() {
        let c = Builder::default()
            .medium("a")
            .medium("b")
            .medium("n")
            .article("p", "a")
            .comment("p", "u", (5, 1, 2))
            .comment("p", "v", (9, 0, 0))
            .build();
        let f = article_features(ArticleIx(0), &c, &grouping(), 100).unwrap();
        assert_eq!(f.label, 1);
        assert_eq!(f.values.len(), 300);
        assert_eq!(&f.values[..6], &[9.0, 0.0, 0.0, 5.0, 1.0, 2.0]);
        assert!(f.values[6..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ties_go_to_the_earlier_comment() {
        let c = Builder::default()
            .medium("a")
            .medium("b")
            .medium("n")
            .article("p", "b")
            .comment("p", "u", (1, 1, 0))
            .comment("p", "v", (0, 0, 2))
            .comment("p", "w", (0, 3, 0))
            .build();
        let f = article_features(ArticleIx(0), &c, &grouping(), 2).unwrap();
        assert_eq!(f.label, 0);
        assert_eq!(f.values, vec![0.0, 3.0, 0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn neutral_articles_are_rejected_and_threshold_is_strict() {
        let mut b = Builder::default()
            .medium("a")
            .medium("b")
            .medium("n")
            .article("p1", "a")
            .article("p2", "a")
            .article("p3", "n");
        for i in 0..200 {
            b = b.comment("p1", &format!("u{i}"), (0, 0, 0));
            b = b.comment("p2", &format!("u{i}"), (0, 0, 0));
            b = b.comment("p3", &format!("u{i}"), (0, 0, 0));
        }
        b = b
            .comment("p2", "extra", (0, 0, 0))
            .comment("p3", "extra", (0, 0, 0));
        let c = b.build();
        assert_eq!(select_articles(&c, &grouping(), 200), vec![ArticleIx(1)]);
        assert!(matches!(
            article_features(ArticleIx(2), &c, &grouping(), 100),
            Err(Error::NotGroupArticle(_))
        ));
    }
}
