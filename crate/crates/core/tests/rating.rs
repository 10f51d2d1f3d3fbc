use std::collections::{BTreeMap, BTreeSet};

use aesthetica::rating::{replay_log, RatingCoordinator, RatingError, Stage, VoteKind, MAIN_MINIMUM, TRAINING_SIZE};
use proptest::prelude::*;

fn coordinator(pool: usize, seed: u64) -> RatingCoordinator {
    let training = (0..TRAINING_SIZE).map(|i| format!("t{i}")).collect();
    let pool = (0..pool).map(|i| format!("m{i:02}")).collect();
    RatingCoordinator::new(training, pool, seed).unwrap()
}

#[derive(Debug, Clone)]
enum Action {
    Start,
    Next(usize),
    Vote(usize, i64),
    VoteUnserved(usize),
    Revise(usize, i64),
    Finish(usize),
}

fn action() -> impl Strategy<Value = Action> {
    prop_oneof![
        1 => Just(Action::Start),
        6 => (0..4usize).prop_map(Action::Next),
        6 => (0..4usize, -1..8i64).prop_map(|(s, k)| Action::Vote(s, k)),
        1 => (0..4usize).prop_map(Action::VoteUnserved),
        2 => (0..4usize, 0..7i64).prop_map(|(s, k)| Action::Revise(s, k)),
        1 => (0..4usize).prop_map(Action::Finish),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_interaction_keeps_invariants(actions in prop::collection::vec(action(), 1..400), seed in 0u64..1000) {
        let mut c = coordinator(25, seed);
        let mut sessions: Vec<String> = vec![c.start(None)];
        let mut last_served: BTreeMap<String, String> = BTreeMap::new();
        let mut served: BTreeMap<String, Vec<(String, Stage)>> = BTreeMap::new();
        let mut accepted_main = 0i64;
        for a in actions {
            let pick = |i: usize| sessions[i % sessions.len()].clone();
            match a {
                Action::Start => sessions.push(c.start(None)),
                Action::Next(i) => {
                    let s = pick(i);
                    if let Ok(img) = c.next_image(&s) {
                        last_served.insert(s.clone(), img.image_id.clone());
                        served.entry(s).or_default().push((img.image_id, img.stage));
                    }
                }
                Action::Vote(i, k) => {
                    let s = pick(i);
                    if let Some(img) = last_served.get(&s).cloned() {
                        let r = c.vote(&s, &img, k);
                        if !(1..=5).contains(&k) {
                            prop_assert!(matches!(r, Err(RatingError::ScoreOutOfRange(_)) | Err(RatingError::Finished)));
                        }
                        if r.is_ok() && img.starts_with('m') && served[&s].last().unwrap().1 == Stage::Main {
                            accepted_main += 1;
                        }
                    }
                }
                Action::VoteUnserved(i) => {
                    let s = pick(i);
                    let r = c.vote(&s, "never-served", 3);
                    prop_assert!(r.is_err());
                }
                Action::Revise(i, k) => {
                    let s = pick(i);
                    if let Some(img) = last_served.get(&s).cloned() {
                        let _ = c.revise(&s, &img, k);
                    }
                }
                Action::Finish(i) => {
                    let s = pick(i);
                    let before = c.progress(&s).unwrap();
                    let r = c.finish(&s);
                    if !before.finished && before.main_votes < MAIN_MINIMUM {
                        prop_assert_eq!(r, Err(RatingError::TooFewVotes(before.main_votes)));
                    }
                }
            }
        }
        // every logged score is in range and names an image served in that session
        for e in c.log() {
            prop_assert!((1..=5).contains(&e.score));
            let list = &served[&e.session_id];
            prop_assert!(list.iter().any(|(id, st)| id == &e.image_id && *st == e.stage));
            if e.kind == VoteKind::Revise {
                prop_assert!(e.previous.is_some());
            }
        }
        // staging: first ten servings are the training set, no main repeats
        for list in served.values() {
            for (k, (id, st)) in list.iter().enumerate() {
                prop_assert_eq!(*st == Stage::Training, k < TRAINING_SIZE);
                prop_assert_eq!(id.starts_with('t'), k < TRAINING_SIZE);
            }
            let main: Vec<&String> = list.iter().filter(|x| x.1 == Stage::Main).map(|x| &x.0).collect();
            let uniq: BTreeSet<&&String> = main.iter().collect();
            prop_assert_eq!(uniq.len(), main.len());
        }
        // conservation: totals equal accepted main votes; replay agrees
        let totals: u64 = c.histograms().iter().map(|h| h.total()).sum();
        prop_assert_eq!(totals as i64, accepted_main);
        prop_assert_eq!(replay_log(c.log()), c.histograms());
    }
}

#[test]
fn finish_is_blocked_at_thirteen() {
    let mut c = coordinator(30, 3);
    let s = c.start(None);
    for _ in 0..TRAINING_SIZE {
        let img = c.next_image(&s).unwrap();
        c.vote(&s, &img.image_id, 2).unwrap();
    }
    for k in 0..13 {
        let img = c.next_image(&s).unwrap();
        c.vote(&s, &img.image_id, 1 + k % 5).unwrap();
    }
    assert_eq!(c.finish(&s), Err(RatingError::TooFewVotes(13)));
    let img = c.next_image(&s).unwrap();
    c.vote(&s, &img.image_id, 4).unwrap();
    assert!(c.finish(&s).unwrap().finished);
    assert_eq!(c.next_image(&s), Err(RatingError::Finished));
}

#[test]
fn least_served_images_come_first() {
    let mut c = coordinator(20, 9);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..10 {
        let s = c.start(None);
        for _ in 0..TRAINING_SIZE {
            let img = c.next_image(&s).unwrap();
            c.vote(&s, &img.image_id, 3).unwrap();
        }
        for _ in 0..MAIN_MINIMUM {
            let img = c.next_image(&s).unwrap();
            *counts.entry(img.image_id.clone()).or_default() += 1;
            c.vote(&s, &img.image_id, 3).unwrap();
        }
    }
    // 140 servings over 20 images: exactly 7 each
    assert_eq!(counts.len(), 20);
    assert!(counts.values().all(|&n| n == 7), "{counts:?}");
}

#[test]
fn pool_exhaustion_is_reported() {
    let training: Vec<String> = (0..TRAINING_SIZE).map(|i| format!("t{i}")).collect();
    let small = (0..MAIN_MINIMUM - 1).map(|i| format!("m{i}")).collect();
    assert!(matches!(RatingCoordinator::new(training, small, 1), Err(RatingError::Setup(_))));
    let mut c = coordinator(MAIN_MINIMUM, 1);
    let s = c.start(None);
    for _ in 0..TRAINING_SIZE + MAIN_MINIMUM {
        let img = c.next_image(&s).unwrap();
        c.vote(&s, &img.image_id, 3).unwrap();
    }
    assert_eq!(c.next_image(&s), Err(RatingError::Exhausted));
}

#[test]
fn vote_log_serializes_for_audit() {
    let mut c = coordinator(15, 2);
    let s = c.start(Some("client-1".into()));
    for _ in 0..TRAINING_SIZE + 1 {
        let img = c.next_image(&s).unwrap();
        c.vote(&s, &img.image_id, 3).unwrap();
    }
    let text = serde_json::to_string(c.log()).unwrap();
    let back: Vec<aesthetica::rating::VoteEvent> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c.log());
    assert_eq!(replay_log(&back), c.histograms());
    assert!(text.contains("\"clientToken\":\"client-1\""));
}
