//! Two-stage rating protocol: a fixed training set, then least-served
//! main images, with an append-only vote log.
//!
//! Training images may also belong to the main pool. An observer then
//! meets such an image twice, and only the main-stage vote counts.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::dataset::{Category, DatasetManifest};
use crate::imaging::SeededRandom;
use crate::stats::LikertHistogram;

pub const TRAINING_SIZE: usize = 10;
pub const MAIN_MINIMUM: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stage {
    Training,
    Main,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum RatingError {
    #[error("unknown rating session {0}")]
    UnknownSession(String),
    #[error("image {0} was not served in this session")]
    NotServed(String),
    #[error("score {0} outside 1..=5")]
    ScoreOutOfRange(i64),
    #[error("image {0} already has a vote; revise it instead")]
    AlreadyVoted(String),
    #[error("image {0} has no vote to revise")]
    NoVote(String),
    #[error("vote on {0} before requesting the next image")]
    VotePending(String),
    #[error("finish needs {MAIN_MINIMUM} main votes, have {0}")]
    TooFewVotes(usize),
    #[error("session already finished")]
    Finished,
    #[error("no unrated main images left for this session")]
    Exhausted,
    #[error("rating setup: {0}")]
    Setup(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VoteKind {
    Vote,
    Revise,
}

/// One entry of the append-only log. A revision supersedes the earlier
/// vote on the same image in the same session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VoteEvent {
    pub seq: u64,
    pub session_id: String,
    pub client_token: Option<String>,
    pub image_id: String,
    pub stage: Stage,
    pub kind: VoteKind,
    pub score: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub previous: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ServedImage {
    pub image_id: String,
    pub stage: Stage,
    /// 1-based position within the stage.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RatingProgress {
    pub session_id: String,
    pub training_votes: usize,
    pub training_size: usize,
    pub main_votes: usize,
    pub main_minimum: usize,
    pub finished: bool,
}

#[derive(Debug, Clone)]
struct Served {
    image_id: String,
    stage: Stage,
    vote: Option<u8>,
}

#[derive(Debug, Clone)]
struct RatingSession {
    client_token: Option<String>,
    training_order: Vec<String>,
    served: Vec<Served>,
    finished: bool,
}

impl RatingSession {
    fn count(&self, stage: Stage) -> usize {
        self.served.iter().filter(|s| s.stage == stage && s.vote.is_some()).count()
    }

    /// Latest serving of `image_id`; votes and revisions address it.
    fn latest(&mut self, image_id: &str) -> Option<&mut Served> {
        self.served.iter_mut().rev().find(|s| s.image_id == image_id)
    }
}

/// Scheduler and vote aggregator shared by all rating sessions.
#[derive(Debug, Clone)]
pub struct RatingCoordinator {
    training: Vec<String>,
    pool: Vec<String>,
    served_count: BTreeMap<String, u64>,
    sessions: HashMap<String, RatingSession>,
    histograms: BTreeMap<String, [u64; 5]>,
    log: Vec<VoteEvent>,
    rng: SeededRandom,
    next_session: u64,
}

fn check_score(score: i64) -> Result<u8, RatingError> {
    if (1..=5).contains(&score) {
        Ok(score as u8)
    } else {
        Err(RatingError::ScoreOutOfRange(score))
    }
}

impl RatingCoordinator {
    pub fn new(training: Vec<String>, pool: Vec<String>, seed: u64) -> Result<Self, RatingError> {
        if training.len() != TRAINING_SIZE {
            return Err(RatingError::Setup(format!("training set needs {TRAINING_SIZE} images, got {}", training.len())));
        }
        let t: BTreeSet<&String> = training.iter().collect();
        if t.len() != training.len() {
            return Err(RatingError::Setup("duplicate training image".into()));
        }
        let p: BTreeSet<&String> = pool.iter().collect();
        if p.len() != pool.len() {
            return Err(RatingError::Setup("duplicate main image".into()));
        }
        if pool.len() < MAIN_MINIMUM {
            return Err(RatingError::Setup(format!("main pool needs at least {MAIN_MINIMUM} images")));
        }
        Ok(RatingCoordinator {
            served_count: pool.iter().map(|id| (id.clone(), 0)).collect(),
            training,
            pool,
            sessions: HashMap::new(),
            histograms: BTreeMap::new(),
            log: Vec::new(),
            rng: SeededRandom::new(seed),
            next_session: 0,
        })
    }

    /// Training set of extreme examples: up to five beautified and five
    /// uglified images (falling back to originals and auto-uglified ones),
    /// by ascending id. Every entry is in the main pool.
    pub fn from_manifest(manifest: &DatasetManifest, seed: u64) -> Result<Self, RatingError> {
        let sorted = manifest.sorted();
        let ids = |c: Category| -> Vec<String> { sorted.by_category(c).map(|e| e.image_id.clone()).collect() };
        let pick = |first: Vec<String>, fallback: Vec<String>| -> Vec<String> {
            first.into_iter().chain(fallback).take(TRAINING_SIZE / 2).collect()
        };
        let mut training = pick(ids(Category::Beautified), ids(Category::Original));
        training.extend(pick(ids(Category::Uglified), ids(Category::AutoUglified)));
        let pool = sorted.entries.iter().map(|e| e.image_id.clone()).collect();
        Self::new(training, pool, seed)
    }

    pub fn training_ids(&self) -> &[String] {
        &self.training
    }

    pub fn pool_ids(&self) -> &[String] {
        &self.pool
    }

    pub fn start(&mut self, client_token: Option<String>) -> String {
        self.next_session += 1;
        let id = format!("r{:06}-{:08x}", self.next_session, self.rng.next_u64() as u32);
        let mut order = self.training.clone();
        self.rng.shuffle(&mut order);
        self.sessions.insert(
            id.clone(),
            RatingSession {
                client_token,
                training_order: order,
                served: Vec::new(),
                finished: false,
            },
        );
        id
    }

    fn session_mut(&mut self, id: &str) -> Result<&mut RatingSession, RatingError> {
        let s = self
            .sessions
            .get_mut(id)
            .ok_or_else(|| RatingError::UnknownSession(id.to_string()))?;
        if s.finished {
            return Err(RatingError::Finished);
        }
        Ok(s)
    }

    pub fn progress(&self, id: &str) -> Result<RatingProgress, RatingError> {
        let s = self.sessions.get(id).ok_or_else(|| RatingError::UnknownSession(id.to_string()))?;
        Ok(RatingProgress {
            session_id: id.to_string(),
            training_votes: s.count(Stage::Training),
            training_size: TRAINING_SIZE,
            main_votes: s.count(Stage::Main),
            main_minimum: MAIN_MINIMUM,
            finished: s.finished,
        })
    }

    /// Serves the next training image, or once training is done, the
    /// least-served main image not yet seen in this session (random among ties).
    pub fn next_image(&mut self, id: &str) -> Result<ServedImage, RatingError> {
        let s = self.session_mut(id)?;
        if let Some(last) = s.served.last() {
            if last.vote.is_none() {
                return Err(RatingError::VotePending(last.image_id.clone()));
            }
        }
        let trained = s.served.iter().filter(|x| x.stage == Stage::Training).count();
        if trained < TRAINING_SIZE {
            let image_id = s.training_order[trained].clone();
            s.served.push(Served {
                image_id: image_id.clone(),
                stage: Stage::Training,
                vote: None,
            });
            return Ok(ServedImage {
                image_id,
                stage: Stage::Training,
                position: trained + 1,
            });
        }
        let seen: BTreeSet<String> = s
            .served
            .iter()
            .filter(|x| x.stage == Stage::Main)
            .map(|x| x.image_id.clone())
            .collect();
        let position = s.served.len() - TRAINING_SIZE + 1;
        let candidates: Vec<&String> = self.pool.iter().filter(|p| !seen.contains(*p)).collect();
        let least = candidates
            .iter()
            .map(|c| self.served_count[*c])
            .min()
            .ok_or(RatingError::Exhausted)?;
        let tied: Vec<String> = candidates
            .into_iter()
            .filter(|c| self.served_count[*c] == least)
            .cloned()
            .collect();
        let image_id = tied[self.rng.below(tied.len() as u64) as usize].clone();
        *self.served_count.get_mut(&image_id).unwrap() += 1;
        let s = self.sessions.get_mut(id).unwrap();
        s.served.push(Served {
            image_id: image_id.clone(),
            stage: Stage::Main,
            vote: None,
        });
        Ok(ServedImage {
            image_id,
            stage: Stage::Main,
            position,
        })
    }

    fn push_event(&mut self, id: &str, image_id: &str, stage: Stage, kind: VoteKind, score: u8, previous: Option<u8>) {
        let client_token = self.sessions[id].client_token.clone();
        self.log.push(VoteEvent {
            seq: self.log.len() as u64 + 1,
            session_id: id.to_string(),
            client_token,
            image_id: image_id.to_string(),
            stage,
            kind,
            score,
            previous,
        });
    }

    pub fn vote(&mut self, id: &str, image_id: &str, score: i64) -> Result<RatingProgress, RatingError> {
        let score = check_score(score)?;
        let s = self.session_mut(id)?;
        let slot = s
            .latest(image_id)
            .ok_or_else(|| RatingError::NotServed(image_id.to_string()))?;
        if slot.vote.is_some() {
            return Err(RatingError::AlreadyVoted(image_id.to_string()));
        }
        slot.vote = Some(score);
        let stage = slot.stage;
        if stage == Stage::Main {
            self.histograms.entry(image_id.to_string()).or_insert([0; 5])[score as usize - 1] += 1;
        }
        self.push_event(id, image_id, stage, VoteKind::Vote, score, None);
        self.progress(id)
    }

    pub fn revise(&mut self, id: &str, image_id: &str, score: i64) -> Result<RatingProgress, RatingError> {
        let score = check_score(score)?;
        let s = self.session_mut(id)?;
        let slot = s
            .latest(image_id)
            .ok_or_else(|| RatingError::NotServed(image_id.to_string()))?;
        let previous = slot.vote.ok_or_else(|| RatingError::NoVote(image_id.to_string()))?;
        slot.vote = Some(score);
        let stage = slot.stage;
        if stage == Stage::Main {
            let h = self.histograms.get_mut(image_id).expect("main vote was aggregated");
            h[previous as usize - 1] -= 1;
            h[score as usize - 1] += 1;
        }
        self.push_event(id, image_id, stage, VoteKind::Revise, score, Some(previous));
        self.progress(id)
    }

    pub fn finish(&mut self, id: &str) -> Result<RatingProgress, RatingError> {
        let s = self.session_mut(id)?;
        let main = s.count(Stage::Main);
        if main < MAIN_MINIMUM {
            return Err(RatingError::TooFewVotes(main));
        }
        s.finished = true;
        self.progress(id)
    }

    pub fn log(&self) -> &[VoteEvent] {
        &self.log
    }

    /// Aggregated main-stage histograms of every image with a vote.
    pub fn histograms(&self) -> Vec<LikertHistogram> {
        histograms_from(&self.histograms)
    }
}

fn histograms_from(map: &BTreeMap<String, [u64; 5]>) -> Vec<LikertHistogram> {
    map.iter()
        .filter(|(_, c)| c.iter().sum::<u64>() > 0)
        .map(|(id, c)| LikertHistogram {
            image_id: id.clone(),
            counts: *c,
        })
        .collect()
}

/// Rebuilds the aggregate from a vote log alone.
pub fn replay_log(events: &[VoteEvent]) -> Vec<LikertHistogram> {
    let mut map: BTreeMap<String, [u64; 5]> = BTreeMap::new();
    for e in events.iter().filter(|e| e.stage == Stage::Main) {
        let h = map.entry(e.image_id.clone()).or_insert([0; 5]);
        if let Some(p) = e.previous {
            h[p as usize - 1] -= 1;
        }
        h[e.score as usize - 1] += 1;
    }
    histograms_from(&map)
}
