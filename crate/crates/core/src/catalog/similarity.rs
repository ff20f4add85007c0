//! Ratcliff–Obershelp similarity, matching the block search of Python's
//! `difflib.SequenceMatcher` (without its junk heuristics).

use unicode_normalization::UnicodeNormalization;

/// Compatibility decomposition, lowercase, and whitespace collapsed to single spaces.
pub fn normalize_name(s: &str) -> String {
    let folded: String = s.nfkd().flat_map(char::to_lowercase).collect();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `2M / (|a| + |b|)` over normalized names; 1.0 for two empty strings.
///
/// The block search depends on argument order, so both orders are scored
/// and the larger ratio is kept.
pub fn string_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = normalize_name(a).chars().collect();
    let b: Vec<char> = normalize_name(b).chars().collect();
    ratcliff_obershelp(&a, &b).max(ratcliff_obershelp(&b, &a))
}

/// Ratio of recursively matched elements on raw sequences.
pub fn ratcliff_obershelp<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    2.0 * matching_total(a, b) as f64 / total as f64
}

/// Sum of the sizes of all matching blocks.
fn matching_total<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut total = 0;
    let mut stack = vec![(0, a.len(), 0, b.len())];
    let mut row = vec![0usize; b.len() + 1];
    let mut prev = vec![0usize; b.len() + 1];
    while let Some((alo, ahi, blo, bhi)) = stack.pop() {
        let (i, j, k) = longest_match(a, b, alo, ahi, blo, bhi, &mut prev, &mut row);
        if k == 0 {
            continue;
        }
        total += k;
        if alo < i && blo < j {
            stack.push((alo, i, blo, j));
        }
        if i + k < ahi && j + k < bhi {
            stack.push((i + k, ahi, j + k, bhi));
        }
    }
    total
}

/// Longest common block in `a[alo..ahi]` x `b[blo..bhi]`. Ties go to the
/// smallest start in `a`, then the smallest start in `b`.
#[allow(clippy::too_many_arguments)]
fn longest_match<T: PartialEq>(
    a: &[T],
    b: &[T],
    alo: usize,
    ahi: usize,
    blo: usize,
    bhi: usize,
    prev: &mut [usize],
    row: &mut [usize],
) -> (usize, usize, usize) {
    let (mut best_i, mut best_j, mut best) = (alo, blo, 0);
    // prev[j + 1] = length of the common suffix ending at a[i - 1], b[j]
    prev[blo..=bhi].fill(0);
    for (i, ai) in a.iter().enumerate().take(ahi).skip(alo) {
        row[blo] = 0;
        for j in blo..bhi {
            let k = if *ai == b[j] { prev[j] + 1 } else { 0 };
            row[j + 1] = k;
            if k > best {
                best = k;
                best_i = i + 1 - k;
                best_j = j + 1 - k;
            }
        }
        prev[blo..=bhi].copy_from_slice(&row[blo..=bhi]);
    }
    (best_i, best_j, best)
}
