//! Corpus data model, ingestion and corpus-level filters.
//!
//! Identifiers are opaque strings. On construction every collection is sorted
//! by identifier and interned to a dense index, so index order equals
//! lexicographic id order and all downstream tie-breaks can compare indices.

mod filters;
mod ingest;

use std::collections::HashMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use filters::{corpus_stats, filter_active_users, filter_clustering_users, top_media, CorpusStats};
pub use ingest::{load_corpus, read_records, write_corpus, write_records, CorpusPaths};

macro_rules! index_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

index_type!(
    /// Dense index of a medium inside a [`Corpus`].
    MediumIx
);
index_type!(
    /// Dense index of an article inside a [`Corpus`].
    ArticleIx
);
index_type!(
    /// Dense index of a user inside a [`Corpus`].
    UserIx
);
index_type!(CommentIx);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Medium {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    pub id: String,
    pub medium: MediumIx,
    pub published_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    pub id: String,
    pub article: ArticleIx,
    pub user: UserIx,
    pub created_at: DateTime<Utc>,
    pub replies: u32,
    pub sympathies: u32,
    pub antipathies: u32,
}

impl Comment {
    /// Sympathies plus antipathies.
    #[inline]
    pub fn affect_votes(&self) -> u64 {
        self.sympathies as u64 + self.antipathies as u64
    }

    /// Sympathies, antipathies and replies together.
    #[inline]
    pub fn total_responses(&self) -> u64 {
        self.affect_votes() + self.replies as u64
    }
}

/// One line of the media file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediumRecord {
    pub medium_id: String,
    pub name: String,
}

/// One line of the articles file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub article_id: String,
    pub medium_id: String,
    pub published_at: DateTime<Utc>,
}

/// One line of the comments file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommentRecord {
    pub comment_id: String,
    pub article_id: String,
    pub user_id: String,
    pub created_at: DateTime<Utc>,
    pub replies: u32,
    pub sympathies: u32,
    pub antipathies: u32,
}

/// Compressed row storage for the one-to-many lookups.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Csr {
    offsets: Vec<usize>,
    items: Vec<u32>,
}

impl Csr {
    /// Builds rows from `(row, item)` pairs. Items keep their input order
    /// within a row.
    fn from_pairs(n_rows: usize, pairs: impl Iterator<Item = (usize, u32)> + Clone) -> Self {
        let mut offsets = vec![0usize; n_rows + 1];
        for (row, _) in pairs.clone() {
            offsets[row + 1] += 1;
        }
        for i in 0..n_rows {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut items = vec![0u32; offsets[n_rows]];
        for (row, item) in pairs {
            items[cursor[row]] = item;
            cursor[row] += 1;
        }
        Csr { offsets, items }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.items[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn n_rows(&self) -> usize {
        self.offsets.len() - 1
    }
}

/// A validated, immutable corpus with lookup indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    media: Vec<Medium>,
    articles: Vec<Article>,
    comments: Vec<Comment>,
    users: Vec<String>,
    articles_by_medium: Csr,
    comments_by_article: Csr,
    comments_by_user: Csr,
}

impl Corpus {
    /// Validates records and builds the indexed corpus.
    ///
    /// The result does not depend on record order.
    pub fn from_records(
        mut media: Vec<MediumRecord>,
        mut articles: Vec<ArticleRecord>,
        mut comments: Vec<CommentRecord>,
    ) -> Result<Self> {
        media.sort_by(|a, b| a.medium_id.cmp(&b.medium_id));
        check_unique(media.iter().map(|m| m.medium_id.as_str()), "medium")?;
        articles.sort_by(|a, b| a.article_id.cmp(&b.article_id));
        check_unique(articles.iter().map(|a| a.article_id.as_str()), "article")?;
        comments.sort_by(|a, b| a.comment_id.cmp(&b.comment_id));
        check_unique(comments.iter().map(|c| c.comment_id.as_str()), "comment")?;

        let medium_lookup: HashMap<&str, u32> = media
            .iter()
            .enumerate()
            .map(|(i, m)| (m.medium_id.as_str(), i as u32))
            .collect();
        let mut built_articles = Vec::with_capacity(articles.len());
        for a in &articles {
            let medium =
                *medium_lookup
                    .get(a.medium_id.as_str())
                    .ok_or_else(|| Error::DanglingReference {
                        kind: "medium",
                        id: a.medium_id.clone(),
                        referrer: a.article_id.clone(),
                    })?;
            built_articles.push(Article {
                id: a.article_id.clone(),
                medium: MediumIx(medium),
                published_at: a.published_at,
            });
        }

        let article_lookup: HashMap<&str, u32> = articles
            .iter()
            .enumerate()
            .map(|(i, a)| (a.article_id.as_str(), i as u32))
            .collect();
        let mut users: Vec<&str> = comments.iter().map(|c| c.user_id.as_str()).collect();
        users.sort_unstable();
        users.dedup();
        let user_lookup: HashMap<&str, u32> = users.iter().enumerate().map(|(i, u)| (*u, i as u32)).collect();

        let mut built_comments = Vec::with_capacity(comments.len());
        for c in &comments {
            let article =
                *article_lookup
                    .get(c.article_id.as_str())
                    .ok_or_else(|| Error::DanglingReference {
                        kind: "article",
                        id: c.article_id.clone(),
                        referrer: c.comment_id.clone(),
                    })?;
            built_comments.push(Comment {
                id: c.comment_id.clone(),
                article: ArticleIx(article),
                user: UserIx(user_lookup[c.user_id.as_str()]),
                created_at: c.created_at,
                replies: c.replies,
                sympathies: c.sympathies,
                antipathies: c.antipathies,
            });
        }
        let users: Vec<String> = users.into_iter().map(str::to_owned).collect();
        drop(comments);

        let media: Vec<Medium> = media
            .into_iter()
            .map(|m| Medium {
                id: m.medium_id,
                name: m.name,
            })
            .collect();

        let articles_by_medium = Csr::from_pairs(
            media.len(),
            built_articles
                .iter()
                .enumerate()
                .map(|(i, a)| (a.medium.index(), i as u32)),
        );
        let comments_by_article = Csr::from_pairs(
            built_articles.len(),
            built_comments
                .iter()
                .enumerate()
                .map(|(i, c)| (c.article.index(), i as u32)),
        );
        let comments_by_user = Csr::from_pairs(
            users.len(),
            built_comments
                .iter()
                .enumerate()
                .map(|(i, c)| (c.user.index(), i as u32)),
        );

        Ok(Corpus {
            media,
            articles: built_articles,
            comments: built_comments,
            users,
            articles_by_medium,
            comments_by_article,
            comments_by_user,
        })
    }

    pub fn media(&self) -> &[Medium] {
        &self.media
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    pub fn comments(&self) -> &[Comment] {
        &self.comments
    }

    /// User ids in index order.
    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn medium(&self, ix: MediumIx) -> &Medium {
        &self.media[ix.index()]
    }

    pub fn article(&self, ix: ArticleIx) -> &Article {
        &self.articles[ix.index()]
    }

    pub fn comment(&self, ix: CommentIx) -> &Comment {
        &self.comments[ix.index()]
    }

    pub fn user_id(&self, ix: UserIx) -> &str {
        &self.users[ix.index()]
    }

    pub fn medium_ix(&self, id: &str) -> Option<MediumIx> {
        self.media
            .binary_search_by(|m| m.id.as_str().cmp(id))
            .ok()
            .map(|i| MediumIx(i as u32))
    }

    pub fn article_ix(&self, id: &str) -> Option<ArticleIx> {
        self.articles
            .binary_search_by(|a| a.id.as_str().cmp(id))
            .ok()
            .map(|i| ArticleIx(i as u32))
    }

    pub fn user_ix(&self, id: &str) -> Option<UserIx> {
        self.users
            .binary_search_by(|u| u.as_str().cmp(id))
            .ok()
            .map(|i| UserIx(i as u32))
    }

    /// Articles of a medium, ascending by index.
    pub fn articles_of(&self, medium: MediumIx) -> impl ExactSizeIterator<Item = ArticleIx> + '_ {
        self.articles_by_medium
            .row(medium.index())
            .iter()
            .map(|&i| ArticleIx(i))
    }

    /// Comments on an article, ascending by index.
    pub fn comments_on(&self, article: ArticleIx) -> impl ExactSizeIterator<Item = &Comment> + '_ {
        self.comments_by_article
            .row(article.index())
            .iter()
            .map(move |&i| &self.comments[i as usize])
    }

    /// Comments written by a user, ascending by index.
    pub fn comments_by(&self, user: UserIx) -> impl ExactSizeIterator<Item = &Comment> + '_ {
        self.comments_by_user
            .row(user.index())
            .iter()
            .map(move |&i| &self.comments[i as usize])
    }

    pub fn comment_count_on(&self, article: ArticleIx) -> usize {
        self.comments_by_article.row(article.index()).len()
    }

    pub fn medium_of_comment(&self, comment: &Comment) -> MediumIx {
        self.articles[comment.article.index()].medium
    }

    /// Converts back to flat records, sorted by id.
    pub fn to_records(&self) -> (Vec<MediumRecord>, Vec<ArticleRecord>, Vec<CommentRecord>) {
        let media = self
            .media
            .iter()
            .map(|m| MediumRecord {
                medium_id: m.id.clone(),
                name: m.name.clone(),
            })
            .collect();
        let articles = self
            .articles
            .iter()
            .map(|a| ArticleRecord {
                article_id: a.id.clone(),
                medium_id: self.media[a.medium.index()].id.clone(),
                published_at: a.published_at,
            })
            .collect();
        let comments = self
            .comments
            .iter()
            .map(|c| CommentRecord {
                comment_id: c.id.clone(),
                article_id: self.articles[c.article.index()].id.clone(),
                user_id: self.users[c.user.index()].clone(),
                created_at: c.created_at,
                replies: c.replies,
                sympathies: c.sympathies,
                antipathies: c.antipathies,
            })
            .collect();
        (media, articles, comments)
    }

    /// A boolean mask over all media, true for members of `media`.
    pub fn media_mask(&self, media: &[MediumIx]) -> Vec<bool> {
        let mut mask = vec![false; self.media.len()];
        for m in media {
            mask[m.index()] = true;
        }
        mask
    }
}

fn check_unique<'a>(sorted_ids: impl Iterator<Item = &'a str>, kind: &'static str) -> Result<()> {
    let mut prev: Option<&str> = None;
    for id in sorted_ids {
        if prev == Some(id) {
            return Err(Error::DuplicateId {
                kind,
                id: id.to_owned(),
            });
        }
        prev = Some(id);
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use chrono::TimeZone;

    pub fn ts(secs: i64) -> DateTime<Utc> {
        Utc.timestamp_opt(1_640_995_200 + secs, 0).unwrap()
    }

    /// Small corpus builder for unit tests.
    #[derive(Default)]
    pub struct Builder {
        media: Vec<MediumRecord>,
        articles: Vec<ArticleRecord>,
        comments: Vec<CommentRecord>,
    }

    impl Builder {
        pub fn medium(mut self, id: &str) -> Self {
            self.media.push(MediumRecord {
                medium_id: id.into(),
                name: format!("Medium {id}"),
            });
            self
        }

        pub fn article(mut self, id: &str, medium: &str) -> Self {
            let n = self.articles.len() as i64;
            self.articles.push(ArticleRecord {
                article_id: id.into(),
                medium_id: medium.into(),
                published_at: ts(n),
            });
            self
        }

        /// Adds a comment with (sympathies, antipathies, replies).
        pub fn comment(mut self, article: &str, user: &str, sar: (u32, u32, u32)) -> Self {
            let n = self.comments.len();
            self.comments.push(CommentRecord {
                comment_id: format!("c{n:06}"),
                article_id: article.into(),
                user_id: user.into(),
                created_at: ts(1000 + n as i64),
                replies: sar.2,
                sympathies: sar.0,
                antipathies: sar.1,
            });
            self
        }

        pub fn build(self) -> Corpus {
            Corpus::from_records(self.media, self.articles, self.comments).unwrap()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;

    #[test]
    fn indices_follow_lexicographic_id_order() {
        let corpus = Builder::default()
            .medium("m2")
            .medium("m1")
            .article("b", "m2")
            .article("a", "m1")
            .comment("b", "zed", (1, 0, 0))
            .comment("a", "amy", (0, 1, 0))
            .build();
        assert_eq!(corpus.media()[0].id, "m1");
        assert_eq!(corpus.articles()[0].id, "a");
        assert_eq!(corpus.users(), ["amy", "zed"]);
        let b = corpus.article_ix("b").unwrap();
        assert_eq!(corpus.article(b).medium, corpus.medium_ix("m2").unwrap());
        let zed = corpus.user_ix("zed").unwrap();
        let theirs: Vec<_> = corpus.comments_by(zed).map(|c| c.article).collect();
        assert_eq!(theirs, vec![b]);
    }

    #[test]
    fn dangling_medium_is_reported() {
        let err = Corpus::from_records(
            vec![],
            vec![ArticleRecord {
                article_id: "a".into(),
                medium_id: "ghost".into(),
                published_at: ts(0),
            }],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DanglingReference { kind: "medium", ref id, .. } if id == "ghost"));
    }

    #[test]
    fn duplicate_medium_is_reported() {
        let m = MediumRecord {
            medium_id: "m".into(),
            name: "x".into(),
        };
        let err = Corpus::from_records(vec![m.clone(), m], vec![], vec![]).unwrap_err();
        assert!(matches!(err, Error::DuplicateId { kind: "medium", .. }));
    }
}
