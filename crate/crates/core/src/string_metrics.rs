//! Character-level field similarity.
//!
//! The Jaro comparison value is built from two pieces: the common
//! characters of the two strings (matched inside a positional window of
//! half the shorter string's length) and the transposition count between
//! the two matched sequences. A configurable prefix boost
//! ([`jaro_winkler`]) rewards shared prefixes, which matter for name data.
//!
//! Two transposition conventions exist in the wild: counting every
//! mismatched position of the matched sequences, and counting half that.
//! The first is the default here; [`TranspositionMode::Half`] selects the
//! other. Both are exposed so callers can pick the convention their data
//! was tuned against.

use crate::error::{Error, Result};

/// Largest shared-prefix length the Winkler boost will credit.
const MAX_PREFIX: usize = 4;

/// Outcome of the common-character scan between two strings.
///
/// `matched_s1` and `matched_s2` hold the matched characters in the order
/// they appear in their source strings; both have length `common_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    pub common_count: usize,
    pub matched_s1: Vec<char>,
    pub matched_s2: Vec<char>,
    /// Filled in by [`count_transpositions`]; `None` straight out of
    /// [`common_characters`].
    pub transpositions: Option<usize>,
}

/// How transpositions feed the comparison value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TranspositionMode {
    /// Every mismatched position of the matched sequences counts.
    #[default]
    Literal,
    /// Half the mismatched positions count (rounded down).
    Half,
}

/// Find the common characters of `s1` and `s2`.
///
/// A character `s1[i]` matches an unmatched equal character `s2[j]` when
/// `|i - j| <= min(|s1|, |s2|) / 2` on 1-based positions. Because the
/// positions are integers, the bound is exactly `floor(min / 2)`. The scan
/// walks `s1` left to right and pairs each character with the leftmost
/// eligible unmatched partner, so the result is deterministic.
pub fn common_characters(s1: &str, s2: &str) -> MatchResult {
    let a: Vec<char> = s1.chars().collect();
    let b: Vec<char> = s2.chars().collect();
    common_characters_of(&a, &b)
}

fn common_characters_of(a: &[char], b: &[char]) -> MatchResult {
    let window = a.len().min(b.len()) / 2;
    let mut b_used = vec![false; b.len()];
    let mut matched_a = Vec::new();
    let mut a_hit = vec![false; a.len()];

    for (i, &ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_used[j] && b[j] == ca {
                b_used[j] = true;
                a_hit[i] = true;
                matched_a.push(ca);
                break;
            }
        }
    }

    let matched_b: Vec<char> = b
        .iter()
        .zip(&b_used)
        .filter(|(_, used)| **used)
        .map(|(c, _)| *c)
        .collect();
    debug_assert_eq!(matched_a.len(), matched_b.len());

    MatchResult {
        common_count: matched_a.len(),
        matched_s1: matched_a,
        matched_s2: matched_b,
        transpositions: None,
    }
}

/// Count the positions where the two matched sequences disagree.
///
/// Errors if the sequences have different lengths, which cannot happen for
/// sequences produced by [`common_characters`].
pub fn count_transpositions(matched_s1: &[char], matched_s2: &[char]) -> Result<usize> {
    if matched_s1.len() != matched_s2.len() {
        return Err(Error::Contract(format!(
            "matched sequences differ in length: {} vs {}",
            matched_s1.len(),
            matched_s2.len()
        )));
    }
    Ok(matched_s1
        .iter()
        .zip(matched_s2)
        .filter(|(a, b)| a != b)
        .count())
}

/// Jaro comparison value with literal transposition counting.
///
/// `(c/|s1| + c/|s2| + (c-t)/c) / 3`, with the degenerate cases pinned:
/// two empty strings compare as 1, one empty string or no common
/// characters as 0.
pub fn jaro(s1: &str, s2: &str) -> f64 {
    jaro_with(s1, s2, TranspositionMode::Literal)
}

/// Jaro comparison value under an explicit transposition convention.
pub fn jaro_with(s1: &str, s2: &str, mode: TranspositionMode) -> f64 {
    let a: Vec<char> = s1.chars().collect();
    let b: Vec<char> = s2.chars().collect();
    jaro_of(&a, &b, mode)
}

fn jaro_of(a: &[char], b: &[char], mode: TranspositionMode) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let m = common_characters_of(a, b);
    if m.common_count == 0 {
        return 0.0;
    }
    let mismatches = count_transpositions(&m.matched_s1, &m.matched_s2)
        .expect("matched sequences have equal length");
    let t = match mode {
        TranspositionMode::Literal => mismatches,
        TranspositionMode::Half => mismatches / 2,
    };
    let c = m.common_count as f64;
    (c / a.len() as f64 + c / b.len() as f64 + (c - t as f64) / c) / 3.0
}

/// Jaro with a prefix boost: `j + l * prefix_scale * (1 - j)` where `l` is
/// the shared-prefix length capped at 4.
///
/// `prefix_scale` must lie in `[0, 0.25]` so the result stays in `[0, 1]`.
pub fn jaro_winkler(s1: &str, s2: &str, prefix_scale: f64) -> Result<f64> {
    check_prefix_scale(prefix_scale)?;
    Ok(jaro_winkler_with(
        s1,
        s2,
        prefix_scale,
        TranspositionMode::Literal,
    ))
}

/// Unvalidated Jaro-Winkler; callers validate `prefix_scale` up front
/// (see [`StringMetric::new`]).
pub fn jaro_winkler_with(s1: &str, s2: &str, prefix_scale: f64, mode: TranspositionMode) -> f64 {
    let a: Vec<char> = s1.chars().collect();
    let b: Vec<char> = s2.chars().collect();
    jaro_winkler_of(&a, &b, prefix_scale, mode)
}

fn jaro_winkler_of(a: &[char], b: &[char], prefix_scale: f64, mode: TranspositionMode) -> f64 {
    let j = jaro_of(a, b, mode);
    let prefix = a
        .iter()
        .zip(b)
        .take(MAX_PREFIX)
        .take_while(|(x, y)| x == y)
        .count();
    j + prefix as f64 * prefix_scale * (1.0 - j)
}

fn check_prefix_scale(prefix_scale: f64) -> Result<()> {
    if !(0.0..=0.25).contains(&prefix_scale) {
        return Err(Error::Config(format!(
            "prefix_scale must be in [0, 0.25], got {prefix_scale}"
        )));
    }
    Ok(())
}

/// Which comparison function a [`StringMetric`] applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    Jaro,
    JaroWinkler { prefix_scale: f64 },
}

/// A validated, ready-to-use field similarity function.
///
/// Bundles the metric choice with the transposition convention and the
/// case-folding pre-step. All methods are pure; a `StringMetric` can be
/// shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct StringMetric {
    kind: MetricKind,
    transposition_mode: TranspositionMode,
    fold_case: bool,
}

impl StringMetric {
    pub fn new(kind: MetricKind, half_transpositions: bool, fold_case: bool) -> Result<Self> {
        if let MetricKind::JaroWinkler { prefix_scale } = kind {
            check_prefix_scale(prefix_scale)?;
        }
        Ok(StringMetric {
            kind,
            transposition_mode: if half_transpositions {
                TranspositionMode::Half
            } else {
                TranspositionMode::Literal
            },
            fold_case,
        })
    }

    /// Plain Jaro, literal transpositions, case folding on.
    pub fn default_jaro() -> Self {
        StringMetric {
            kind: MetricKind::Jaro,
            transposition_mode: TranspositionMode::Literal,
            fold_case: true,
        }
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn fold_case(&self) -> bool {
        self.fold_case
    }

    pub fn transposition_mode(&self) -> TranspositionMode {
        self.transposition_mode
    }

    /// Apply the configured pre-step: case folding when enabled, identity
    /// otherwise. Values stored in field partitions are normalized with
    /// this so identical-after-folding values compare equal.
    pub fn normalize(&self, s: &str) -> String {
        if self.fold_case {
            s.chars().flat_map(char::to_lowercase).collect()
        } else {
            s.to_string()
        }
    }

    /// Similarity of two raw values, in `[0, 1]`.
    pub fn similarity(&self, s1: &str, s2: &str) -> f64 {
        if self.fold_case {
            self.similarity_normalized(&self.normalize(s1), &self.normalize(s2))
        } else {
            self.similarity_normalized(s1, s2)
        }
    }

    /// Similarity of two values already passed through [`normalize`].
    ///
    /// [`normalize`]: StringMetric::normalize
    pub fn similarity_normalized(&self, s1: &str, s2: &str) -> f64 {
        match self.kind {
            MetricKind::Jaro => jaro_with(s1, s2, self.transposition_mode),
            MetricKind::JaroWinkler { prefix_scale } => {
                jaro_winkler_with(s1, s2, prefix_scale, self.transposition_mode)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn martha_pair_matches_in_source_order() {
        let m = common_characters("MARTHA", "MARHTA");
        assert_eq!(m.common_count, 6);
        assert_eq!(m.matched_s1, chars("MARTHA"));
        assert_eq!(m.matched_s2, chars("MARHTA"));
        assert_eq!(m.transpositions, None);
    }

    #[test]
    fn identical_strings_match_fully() {
        let m = common_characters("ABC", "ABC");
        assert_eq!(m.common_count, 3);
    }

    #[test]
    fn short_pair_window_permits_only_aligned_positions() {
        // min length 1 gives window floor(1/2) = 0, so only i == j pairs up.
        let m = common_characters("AB", "A");
        assert_eq!(m.common_count, 1);
        assert_eq!(m.matched_s1, chars("A"));
        assert_eq!(m.matched_s2, chars("A"));
        let m = common_characters("AB", "B");
        assert_eq!(m.common_count, 0);
    }

    #[test]
    fn match_count_never_exceeds_shorter_string() {
        let m = common_characters("AAAA", "AA");
        assert_eq!(m.common_count, 2);
        assert_eq!(m.matched_s1.len(), m.matched_s2.len());
    }

    #[test]
    fn transposition_counting() {
        assert_eq!(
            count_transpositions(&chars("MARTHA"), &chars("MARHTA")).unwrap(),
            2
        );
        assert_eq!(count_transpositions(&chars("ABC"), &chars("ABC")).unwrap(), 0);
        assert_eq!(count_transpositions(&chars("AB"), &chars("BA")).unwrap(), 2);
    }

    #[test]
    fn transposition_length_mismatch_is_contract_violation() {
        let err = count_transpositions(&chars("AB"), &chars("A")).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn jaro_hand_values() {
        // (1/3)(6/6 + 6/6 + 4/6) with every mismatched position counted.
        assert!((jaro("MARTHA", "MARHTA") - 8.0 / 9.0).abs() < 1e-12);
        // (1/3)(1/2 + 1/1 + 1/1)
        assert!((jaro("AB", "A") - 2.5 / 3.0).abs() < 1e-12);
        assert_eq!(jaro("AB", "B"), 0.0);
    }

    #[test]
    fn jaro_half_mode_hand_values() {
        // Two mismatched positions halve to t = 1: (1/3)(1 + 1 + 5/6).
        let j = jaro_with("MARTHA", "MARHTA", TranspositionMode::Half);
        assert!((j - (2.0 + 5.0 / 6.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn jaro_degenerate_cases() {
        assert_eq!(jaro("", ""), 1.0);
        assert_eq!(jaro("abc", ""), 0.0);
        assert_eq!(jaro("", "abc"), 0.0);
        assert_eq!(jaro("AAAA", "ZZZZ"), 0.0);
        assert_eq!(jaro("same", "same"), 1.0);
    }

    #[test]
    fn winkler_boost_hand_value() {
        // Shared prefix "MAR": 0.8889 + 3 * 0.1 * (1 - 0.8889).
        let j = jaro("MARTHA", "MARHTA");
        let jw = jaro_winkler("MARTHA", "MARHTA", 0.1).unwrap();
        assert!((jw - (j + 3.0 * 0.1 * (1.0 - j))).abs() < 1e-12);
        assert!((jw - 0.9222).abs() < 1e-4);
    }

    #[test]
    fn winkler_zero_scale_is_jaro() {
        for (a, b) in [("MARTHA", "MARHTA"), ("AB", "A"), ("x", "y"), ("", "")] {
            assert_eq!(jaro_winkler(a, b, 0.0).unwrap(), jaro(a, b));
        }
    }

    #[test]
    fn winkler_identity_stays_one() {
        assert_eq!(jaro_winkler("prefix", "prefix", 0.25).unwrap(), 1.0);
    }

    #[test]
    fn winkler_prefix_capped_at_four() {
        let j = jaro("ABCDEF", "ABCDEX");
        let jw = jaro_winkler("ABCDEF", "ABCDEX", 0.1).unwrap();
        assert!((jw - (j + 4.0 * 0.1 * (1.0 - j))).abs() < 1e-12);
    }

    #[test]
    fn winkler_rejects_out_of_range_scale() {
        assert!(matches!(
            jaro_winkler("a", "b", 0.3).unwrap_err(),
            Error::Config(_)
        ));
        assert!(matches!(
            jaro_winkler("a", "b", -0.01).unwrap_err(),
            Error::Config(_)
        ));
        assert!(StringMetric::new(
            MetricKind::JaroWinkler { prefix_scale: 0.26 },
            false,
            true
        )
        .is_err());
    }

    #[test]
    fn metric_folds_case_by_default() {
        let metric = StringMetric::default_jaro();
        assert_eq!(metric.similarity("Martha", "mARTHA"), 1.0);
        let strict = StringMetric::new(MetricKind::Jaro, false, false).unwrap();
        assert!(strict.similarity("Martha", "mARTHA") < 1.0);
    }
}
