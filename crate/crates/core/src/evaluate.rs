//! Boundary matching and peak-shape statistics.

/// Outcome of matching hypothesis boundaries to reference boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    pub hits: usize,
    pub misses: usize,
    pub false_alarms: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Mean |ref - hyp| over hits; 0 without hits.
    pub mean_absolute_offset_frames: f64,
}

/// Greedy one-to-one matching in order of increasing offset; a pair matches
/// when the boundaries are at most `tolerance_frames` apart.
pub fn match_boundaries(
    reference: &[usize],
    hypothesis: &[usize],
    tolerance_frames: usize,
) -> MatchReport {
    let mut pairs: Vec<(usize, usize, usize)> = reference
        .iter()
        .enumerate()
        .flat_map(|(i, &r)| {
            hypothesis
                .iter()
                .enumerate()
                .map(move |(j, &h)| (r.abs_diff(h), i, j))
        })
        .filter(|&(d, _, _)| d <= tolerance_frames)
        .collect();
    pairs.sort_unstable();

    let mut ref_used = vec![false; reference.len()];
    let mut hyp_used = vec![false; hypothesis.len()];
    let mut hits = 0;
    let mut offset_sum = 0;
    for (d, i, j) in pairs {
        if !ref_used[i] && !hyp_used[j] {
            ref_used[i] = true;
            hyp_used[j] = true;
            hits += 1;
            offset_sum += d;
        }
    }

    let misses = reference.len() - hits;
    let false_alarms = hypothesis.len() - hits;
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            1.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(hits, hits + false_alarms);
    let recall = ratio(hits, hits + misses);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    MatchReport {
        hits,
        misses,
        false_alarms,
        precision,
        recall,
        f1,
        mean_absolute_offset_frames: if hits == 0 {
            0.0
        } else {
            offset_sum as f64 / hits as f64
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakWidth {
    pub frame: usize,
    pub width: usize,
}

/// Width of every positive local maximum (plateaus count once, at their
/// first frame): the run of contiguous frames around it whose values stay at
/// or above `rel_height` times the peak value.
pub fn peak_widths(values: &[f64], rel_height: f64) -> Vec<PeakWidth> {
    crate::segmenter::local_maxima(values)
        .into_iter()
        .filter(|&p| values[p] > 0.0)
        .map(|p| {
            let floor = rel_height * values[p];
            let left = values[..p]
                .iter()
                .rev()
                .take_while(|&&v| v >= floor)
                .count();
            let right = values[p + 1..].iter().take_while(|&&v| v >= floor).count();
            PeakWidth {
                frame: p,
                width: left + right + 1,
            }
        })
        .collect()
}

pub fn mean_width(widths: &[PeakWidth]) -> Option<f64> {
    (!widths.is_empty())
        .then(|| widths.iter().map(|w| w.width as f64).sum::<f64>() / widths.len() as f64)
}
