#pragma once

#include "fairlens/classifier.hpp"

#include <array>

namespace fairlens::preprocess {

/// Which rows a relabelling changed. When the advantaged group has the higher
/// positive rate (the usual case) promote is drawn from (d, y-) and demote from
/// (a, y+); for a reversed gap the roles of the groups swap.
struct RelabelPlan {
    IndexList promote;
    IndexList demote;
    std::string ranker_id;
    bool reversed = false;
};

struct RelabelResult {
    BinaryLabels labels;
    RelabelPlan plan;
    std::vector<double> scores;  // ranker P(y=1|x) for every row
};

/// Smallest number of swaps that brings |md| closest to zero: round(n_d * n_a * |md| / n),
/// halves rounded down.
[[nodiscard]] Index relabel_count(const BinaryLabels& y, const ProtectedAttribute& s);

/// Massaging. The ranker is trained on (X with s appended as a column, y); the M
/// highest-scoring disadvantaged negatives are promoted and the M lowest-scoring
/// advantaged positives demoted. Score ties resolve by row index.
[[nodiscard]] RelabelResult relabel(const Dataset& data, const ModelSpec& ranker, std::uint64_t seed = 0);

/// Expected-over-observed cell weights: w(s, y) = n_s * n_y / (n * n_{s,y}).
[[nodiscard]] SampleWeights reweigh(const BinaryLabels& y, const ProtectedAttribute& s);

/// Target size of each (s, y) cell, indexed [s][y]: round(n_s * n_y / n), half away from
/// zero, then the largest cell absorbs any drift so the targets sum to n.
[[nodiscard]] std::array<std::array<Index, 2>, 2> expected_cell_counts(const BinaryLabels& y,
                                                                       const ProtectedAttribute& s);

/// Draws each cell to its expected size: without replacement when shrinking (or
/// unchanged), with replacement when growing. Output rows are in ascending source order.
[[nodiscard]] Dataset uniform_sample(const Dataset& data, std::uint64_t seed);

/// Row indices chosen by uniform_sample (into the input dataset).
[[nodiscard]] IndexList uniform_sample_indices(const BinaryLabels& y, const ProtectedAttribute& s,
                                               std::uint64_t seed);

/// Grows cells by duplicating their top-ranked rows (cycling through the ranking when
/// more copies than rows are needed) and shrinks cells by removing their top-ranked
/// rows. Ranking is by ranker score descending, ties by row index.
[[nodiscard]] Dataset preferential_sample(const Dataset& data, const ModelSpec& ranker, std::uint64_t seed);

[[nodiscard]] IndexList preferential_sample_indices(const BinaryLabels& y, const ProtectedAttribute& s,
                                                    std::span<const double> scores);

/// Scores from a ranker trained on (X with s appended, y). Shared by relabel and preferential sampling.
[[nodiscard]] std::vector<double> ranker_scores(const Dataset& data, const ModelSpec& ranker, std::uint64_t seed);

}  // namespace fairlens::preprocess
