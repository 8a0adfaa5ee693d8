//! Synthetic intent corpora for the benches.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semhash_core::LabeledUtterance;

const SHARED: &[&str] = &[
    "i", "want", "to", "please", "the", "a", "can", "you", "how", "do", "my", "is", "what", "when",
    "where", "me", "help", "need",
];

const TOPICS: &[&[&str]] = &[
    &["train", "leave", "departure", "next", "platform", "time"],
    &["route", "get", "station", "airport", "way", "connection"],
    &["delete", "account", "remove", "profile", "close", "erase"],
    &["password", "reset", "forgot", "login", "change", "recover"],
    &["video", "download", "save", "offline", "clip", "file"],
    &["export", "data", "csv", "backup", "transfer", "archive"],
    &[
        "install", "package", "upgrade", "driver", "kernel", "update",
    ],
    &[
        "wifi", "network", "connect", "wireless", "ethernet", "signal",
    ],
];

/// Utterances of 4 to 10 words drawn from per-intent and shared vocabularies.
pub fn synthetic_corpus(n_classes: usize, per_class: usize, seed: u64) -> Vec<LabeledUtterance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_classes * per_class);
    for c in 0..n_classes {
        let topic = TOPICS[c % TOPICS.len()];
        for _ in 0..per_class {
            let len = rng.gen_range(4..=10);
            let words: Vec<&str> = (0..len)
                .map(|_| {
                    let pool = if rng.gen_bool(0.5) { topic } else { SHARED };
                    *pool.choose(&mut rng).expect("non-empty pool")
                })
                .collect();
            out.push(LabeledUtterance::new(
                words.join(" "),
                format!("intent{c}"),
                true,
            ));
        }
    }
    out
}
