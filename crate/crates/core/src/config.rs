//! Reward configuration: tunables for all four reward functions plus
//! group size, banned-character ranges, and the embedding provider.
//!
//! A config is plain serde data. [`validate_config`] checks every invariant
//! and returns the violations as values rather than failing, so callers can
//! report all of them at once.

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Inclusive interval of Unicode code points, configured as a pair of hex
/// strings: `["4E00", "9FFF"]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodePointRange {
    pub low: u32,
    pub high: u32,
}

impl CodePointRange {
    pub const fn new(low: u32, high: u32) -> Self {
        Self { low, high }
    }

    pub fn contains(&self, cp: u32) -> bool {
        self.low <= cp && cp <= self.high
    }
}

impl Serialize for CodePointRange {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(&format!("{:04X}", self.low))?;
        seq.serialize_element(&format!("{:04X}", self.high))?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for CodePointRange {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RangeVisitor;

        impl<'de> Visitor<'de> for RangeVisitor {
            type Value = CodePointRange;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a two-element array of hex code point strings")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let low: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let high: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<String>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                let parse = |s: &str| -> Result<u32, A::Error> {
                    let cp = u32::from_str_radix(s.trim_start_matches("U+"), 16)
                        .map_err(|_| de::Error::custom(format!("invalid hex code point {s:?}")))?;
                    if cp > 0x10FFFF {
                        return Err(de::Error::custom(format!("code point {s} out of range")));
                    }
                    Ok(cp)
                };
                Ok(CodePointRange {
                    low: parse(&low)?,
                    high: parse(&high)?,
                })
            }
        }

        deserializer.deserialize_seq(RangeVisitor)
    }
}

/// The four reward functions, in scoring order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RewardKind {
    Format,
    Accuracy,
    Language,
    Semantic,
}

impl RewardKind {
    pub const ALL: [RewardKind; 4] = [
        RewardKind::Format,
        RewardKind::Accuracy,
        RewardKind::Language,
        RewardKind::Semantic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RewardKind::Format => "format",
            RewardKind::Accuracy => "accuracy",
            RewardKind::Language => "language",
            RewardKind::Semantic => "semantic",
        }
    }
}

/// Per-reward weights used when combining the four scores into the scalar
/// training reward. All default to 1.0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardWeights {
    pub format: f64,
    pub accuracy: f64,
    pub language: f64,
    pub semantic: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            format: 1.0,
            accuracy: 1.0,
            language: 1.0,
            semantic: 1.0,
        }
    }
}

impl RewardWeights {
    pub fn get(&self, kind: RewardKind) -> f64 {
        match kind {
            RewardKind::Format => self.format,
            RewardKind::Accuracy => self.accuracy,
            RewardKind::Language => self.language,
            RewardKind::Semantic => self.semantic,
        }
    }
}

/// Embedding provider selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProviderConfig {
    /// Deterministic hashed character n-gram embeddings; no network.
    Offline,
    /// JSON-over-HTTP embeddings endpoint.
    Http {
        url: String,
        model: String,
        /// Hard per-request timeout. Defaults to 30 seconds.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        timeout_secs: Option<u64>,
    },
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig::Offline
    }
}

/// All tunables of the four reward functions.
///
/// `rg_s` must match the whole completion structure; `rg_a` must carry one
/// capture group for the answer text. Patterns use the dialect of the
/// `regex` crate (no backreferences or lookaround).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardConfig {
    /// Whole-structure pattern: one think block then one answer block.
    pub rg_s: String,
    /// Answer-extraction pattern with one capture group.
    pub rg_a: String,
    /// Deduction when the completion structure pattern fails.
    pub score_c: f64,
    /// Deduction when the answer extraction does not yield exactly one match.
    pub score_a: f64,
    /// Deduction (format) / partial credit (accuracy) for an extracted answer
    /// inside the candidate set.
    pub score_ac: f64,
    /// Code point intervals whose presence zeroes the language reward.
    pub banned_ranges: Vec<CodePointRange>,
    /// Cosine gate for the semantic reward.
    pub similarity_threshold: f64,
    pub weights: RewardWeights,
    /// GRPO group size G.
    pub group_size: usize,
    pub provider: ProviderConfig,
    /// When true, only `score_ac < score_a` is required; when false the
    /// conservative reading `score_ac < score_a` and `score_ac < score_c`
    /// is enforced.
    pub relaxed_score_ordering: bool,
}

/// Default structure pattern. The block bodies exclude `</` so a conformant
/// completion contains exactly one complete think block followed by exactly
/// one complete answer block; stray closing tags or a duplicated answer
/// block break the match.
pub const DEFAULT_SEQUENCE_PATTERN: &str =
    r"^\s*<think>(?:[^<]|<[^/])*</think>\s*<answer>(?:[^<]|<[^/])*</answer>\s*$";

/// Default answer pattern: inner text of an answer block, DOTALL so
/// multi-line answers extract correctly.
pub const DEFAULT_ANSWER_PATTERN: &str = r"(?s)<answer>(.*?)</answer>";

/// Default banned ranges for the Vietnamese profile: CJK Unified Ideographs,
/// CJK Extension A, Hiragana, Katakana, Hangul Syllables. Latin is not banned
/// because Vietnamese orthography is Latin-based, so English leakage cannot
/// be caught by character class alone.
pub const DEFAULT_BANNED_RANGES: [CodePointRange; 5] = [
    CodePointRange::new(0x3040, 0x309F),
    CodePointRange::new(0x30A0, 0x30FF),
    CodePointRange::new(0x3400, 0x4DBF),
    CodePointRange::new(0x4E00, 0x9FFF),
    CodePointRange::new(0xAC00, 0xD7AF),
];

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            rg_s: DEFAULT_SEQUENCE_PATTERN.to_string(),
            rg_a: DEFAULT_ANSWER_PATTERN.to_string(),
            score_c: 0.4,
            score_a: 0.6,
            score_ac: 0.2,
            banned_ranges: DEFAULT_BANNED_RANGES.to_vec(),
            similarity_threshold: 0.5,
            weights: RewardWeights::default(),
            group_size: 4,
            provider: ProviderConfig::default(),
            relaxed_score_ordering: false,
        }
    }
}

impl RewardConfig {
    pub fn from_json(text: &str) -> crate::Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| crate::Error::Config(format!("invalid config JSON: {e}")))
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> crate::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Banned ranges sorted by lower bound. Disjointness is checked by
    /// [`validate_config`], not here.
    pub fn normalized_ranges(&self) -> Vec<CodePointRange> {
        let mut ranges = self.banned_ranges.clone();
        ranges.sort_by_key(|r| (r.low, r.high));
        ranges
    }
}

/// One failed config invariant. `constraint` is the short name of the rule;
/// `detail` carries the offending values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub constraint: String,
    pub detail: String,
}

impl Violation {
    fn new(constraint: &str, detail: String) -> Self {
        Self {
            constraint: constraint.to_string(),
            detail,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}: {}", self.constraint, self.detail)
    }
}

/// Check every [`RewardConfig`] invariant. Returns an empty vector iff the
/// config is valid; violations are data, not faults.
pub fn validate_config(cfg: &RewardConfig) -> Vec<Violation> {
    let mut v = Vec::new();

    let open_unit = |x: f64| x > 0.0 && x < 1.0;
    if !open_unit(cfg.score_c) {
        v.push(Violation::new(
            "score_c out of (0,1)",
            format!("score_c = {}", cfg.score_c),
        ));
    }
    if !open_unit(cfg.score_a) {
        v.push(Violation::new(
            "score_a out of (0,1)",
            format!("score_a = {}", cfg.score_a),
        ));
    }
    if !open_unit(cfg.score_ac) {
        v.push(Violation::new(
            "score_ac out of (0,1)",
            format!("score_ac = {}", cfg.score_ac),
        ));
    }
    if !((cfg.score_c + cfg.score_a - 1.0).abs() <= SCORE_SUM_TOLERANCE) {
        v.push(Violation::new(
            "score_c + score_a ≠ 1.0",
            format!("{} + {} = {}", cfg.score_c, cfg.score_a, cfg.score_c + cfg.score_a),
        ));
    }
    if !(cfg.score_ac < cfg.score_a) {
        v.push(Violation::new(
            "score_ac ≥ score_a",
            format!("score_ac = {}, score_a = {}", cfg.score_ac, cfg.score_a),
        ));
    }
    if !cfg.relaxed_score_ordering && !(cfg.score_ac < cfg.score_c) {
        v.push(Violation::new(
            "score_ac ≥ score_c",
            format!("score_ac = {}, score_c = {}", cfg.score_ac, cfg.score_c),
        ));
    }

    for r in &cfg.banned_ranges {
        if r.low > r.high {
            v.push(Violation::new(
                "banned range low > high",
                format!("[{:04X}, {:04X}]", r.low, r.high),
            ));
        }
    }
    let sorted = cfg.normalized_ranges();
    for pair in sorted.windows(2) {
        if pair[1].low <= pair[0].high {
            v.push(Violation::new(
                "banned ranges overlap",
                format!(
                    "[{:04X}, {:04X}] and [{:04X}, {:04X}]",
                    pair[0].low, pair[0].high, pair[1].low, pair[1].high
                ),
            ));
        }
    }

    if !(0.0..=1.0).contains(&cfg.similarity_threshold) {
        v.push(Violation::new(
            "similarity_threshold out of [0,1]",
            format!("similarity_threshold = {}", cfg.similarity_threshold),
        ));
    }
    for kind in RewardKind::ALL {
        let w = cfg.weights.get(kind);
        if !(w >= 0.0 && w.is_finite()) {
            v.push(Violation::new(
                "negative weight",
                format!("weights.{} = {}", kind.name(), w),
            ));
        }
    }
    if cfg.group_size < 2 {
        v.push(Violation::new(
            "group_size < 2",
            format!("group_size = {}", cfg.group_size),
        ));
    }

    if let Err(e) = regex::Regex::new(&cfg.rg_s) {
        v.push(Violation::new("rg_s invalid", e.to_string()));
    }
    match regex::Regex::new(&cfg.rg_a) {
        Err(e) => v.push(Violation::new("rg_a invalid", e.to_string())),
        // captures_len counts the implicit whole-match group 0.
        Ok(re) if re.captures_len() < 2 => v.push(Violation::new(
            "rg_a missing capture group",
            format!("pattern {:?} has no capture group", cfg.rg_a),
        )),
        Ok(_) => {}
    }

    v
}

/// Exact float equality on `score_c + score_a = 1.0` is brittle.
pub const SCORE_SUM_TOLERANCE: f64 = 1e-9;
