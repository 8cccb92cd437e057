#include "fairlens/preprocess.hpp"

#include "fairlens/errors.hpp"
#include "fairlens/rng.hpp"

#include <algorithm>
#include <numeric>

namespace fairlens::preprocess {

namespace {

void require_all_cells(const GroupPartition& parts, const char* who) {
    for (int s = 0; s < 2; ++s) {
        for (int y = 0; y < 2; ++y) {
            if (parts.cell(s, y).empty()) {
                throw InfeasibleError(std::string(who) + ": (s=" + std::to_string(s) + ", y=" + std::to_string(y) +
                                      ") cell is empty");
            }
        }
    }
}

// Indices sorted by score descending, ties by index ascending.
IndexList rank_descending(IndexList rows, std::span<const double> scores) {
    std::sort(rows.begin(), rows.end(), [&](Index a, Index b) {
        return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
    });
    return rows;
}

}  // namespace

Index relabel_count(const BinaryLabels& y, const ProtectedAttribute& s) {
    const auto parts = partition_groups(y, s);
    const Index n_d = parts.disadvantaged_positive.size() + parts.disadvantaged_negative.size();
    const Index n_a = parts.advantaged_positive.size() + parts.advantaged_negative.size();
    if (n_d == 0 || n_a == 0) throw InfeasibleError("relabel needs both protected groups");
    const Index n = n_a + n_d;
    // n_d * n_a * md = P_a * n_d - P_d * n_a exactly, kept in integers.
    const Index lhs = parts.advantaged_positive.size() * n_d;
    const Index rhs = parts.disadvantaged_positive.size() * n_a;
    const Index gap = lhs > rhs ? lhs - rhs : rhs - lhs;
    // Half-way cases leave |md| equal for M and M + 1; take the smaller.
    return (2 * gap + n - 1) / (2 * n);
}

std::vector<double> ranker_scores(const Dataset& data, const ModelSpec& ranker, std::uint64_t seed) {
    const FeatureMatrix with_s = data.X().append_column("__protected__", data.s().as_vector());
    const auto model = ranker.fit(with_s, data.y(), nullptr, seed);
    const Eigen::VectorXd p = model->predict_proba(with_s.values());
    return {p.data(), p.data() + p.size()};
}

RelabelResult relabel(const Dataset& data, const ModelSpec& ranker, std::uint64_t seed) {
    const auto parts = partition_groups(data.y(), data.s());
    const Index n_pos = parts.advantaged_positive.size() + parts.disadvantaged_positive.size();
    if (n_pos == 0 || n_pos == data.size()) throw InfeasibleError("relabel needs both label values present");
    const Index swaps = relabel_count(data.y(), data.s());

    const double p_a = static_cast<double>(parts.advantaged_positive.size()) /
                       static_cast<double>(parts.advantaged_positive.size() + parts.advantaged_negative.size());
    const double p_d = static_cast<double>(parts.disadvantaged_positive.size()) /
                       static_cast<double>(parts.disadvantaged_positive.size() + parts.disadvantaged_negative.size());
    const bool reversed = p_d > p_a;
    const IndexList& promote_pool = reversed ? parts.advantaged_negative : parts.disadvantaged_negative;
    const IndexList& demote_pool = reversed ? parts.disadvantaged_positive : parts.advantaged_positive;
    if (swaps > promote_pool.size() || swaps > demote_pool.size()) {
        const Index short_promote = swaps > promote_pool.size() ? swaps - promote_pool.size() : 0;
        const Index short_demote = swaps > demote_pool.size() ? swaps - demote_pool.size() : 0;
        throw InfeasibleError("relabel needs " + std::to_string(swaps) + " swaps; short by " +
                              std::to_string(short_promote) + " promotion and " + std::to_string(short_demote) +
                              " demotion candidates");
    }

    RelabelResult out;
    out.scores = ranker_scores(data, ranker, seed);
    out.plan.ranker_id = to_string(ranker.kind);
    out.plan.reversed = reversed;

    const IndexList promote_ranked = rank_descending(promote_pool, out.scores);
    IndexList demote_ranked = demote_pool;
    std::sort(demote_ranked.begin(), demote_ranked.end(), [&](Index a, Index b) {
        return out.scores[a] < out.scores[b] || (out.scores[a] == out.scores[b] && a < b);
    });

    out.plan.promote.assign(promote_ranked.begin(), promote_ranked.begin() + static_cast<std::ptrdiff_t>(swaps));
    out.plan.demote.assign(demote_ranked.begin(), demote_ranked.begin() + static_cast<std::ptrdiff_t>(swaps));

    std::vector<int> labels = data.y().values();
    for (Index i : out.plan.promote) labels[i] = 1;
    for (Index i : out.plan.demote) labels[i] = 0;
    out.labels = BinaryLabels(std::move(labels));
    return out;
}

SampleWeights reweigh(const BinaryLabels& y, const ProtectedAttribute& s) {
    const auto parts = partition_groups(y, s);
    double cell[2][2];
    for (int g = 0; g < 2; ++g) {
        for (int l = 0; l < 2; ++l) {
            cell[g][l] = static_cast<double>(parts.cell(g, l).size());
            if (cell[g][l] == 0) {
                throw UndefinedMetricError("reweigh: (s=" + std::to_string(g) + ", y=" + std::to_string(l) +
                                           ") cell is empty, its weight is undefined");
            }
        }
    }
    const double n = static_cast<double>(y.size());
    double weight[2][2];
    for (int g = 0; g < 2; ++g) {
        for (int l = 0; l < 2; ++l) {
            const double n_group = cell[g][0] + cell[g][1];
            const double n_label = cell[0][l] + cell[1][l];
            weight[g][l] = n_group * n_label / (n * cell[g][l]);
        }
    }
    std::vector<double> w(y.size());
    for (Index i = 0; i < y.size(); ++i) w[i] = weight[s[i]][y[i]];
    return SampleWeights(std::move(w));
}

std::array<std::array<Index, 2>, 2> expected_cell_counts(const BinaryLabels& y, const ProtectedAttribute& s) {
    const auto parts = partition_groups(y, s);
    const Index n = y.size();
    Index group[2] = {parts.advantaged_positive.size() + parts.advantaged_negative.size(),
                      parts.disadvantaged_positive.size() + parts.disadvantaged_negative.size()};
    Index label[2] = {parts.advantaged_negative.size() + parts.disadvantaged_negative.size(),
                      parts.advantaged_positive.size() + parts.disadvantaged_positive.size()};
    std::array<std::array<Index, 2>, 2> target{};
    long long total = 0;
    int big_s = 0, big_y = 0;
    for (int g = 0; g < 2; ++g) {
        for (int l = 0; l < 2; ++l) {
            target[g][l] = (2 * group[g] * label[l] + n) / (2 * n);
            total += static_cast<long long>(target[g][l]);
            if (target[g][l] > target[big_s][big_y]) {
                big_s = g;
                big_y = l;
            }
        }
    }
    const long long drift = static_cast<long long>(n) - total;
    target[big_s][big_y] = static_cast<Index>(static_cast<long long>(target[big_s][big_y]) + drift);
    return target;
}

IndexList uniform_sample_indices(const BinaryLabels& y, const ProtectedAttribute& s, std::uint64_t seed) {
    const auto parts = partition_groups(y, s);
    require_all_cells(parts, "uniform_sample");
    const auto target = expected_cell_counts(y, s);
    Rng rng(seed);
    IndexList out;
    out.reserve(y.size());
    for (int g = 0; g < 2; ++g) {
        for (int l = 0; l < 2; ++l) {
            IndexList cell = parts.cell(g, l);
            const Index want = target[g][l];
            if (want <= cell.size()) {
                rng.shuffle(std::span<Index>(cell));
                out.insert(out.end(), cell.begin(), cell.begin() + static_cast<std::ptrdiff_t>(want));
            } else {
                for (Index k = 0; k < want; ++k) out.push_back(cell[rng.uniform_index(cell.size())]);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Dataset uniform_sample(const Dataset& data, std::uint64_t seed) {
    const IndexList rows = uniform_sample_indices(data.y(), data.s(), seed);
    return data.subset(rows);
}

IndexList preferential_sample_indices(const BinaryLabels& y, const ProtectedAttribute& s,
                                      std::span<const double> scores) {
    if (scores.size() != y.size()) throw ValidationError("preferential_sample: one score per row required");
    const auto parts = partition_groups(y, s);
    require_all_cells(parts, "preferential_sample");
    const auto target = expected_cell_counts(y, s);
    IndexList out;
    out.reserve(y.size());
    for (int g = 0; g < 2; ++g) {
        for (int l = 0; l < 2; ++l) {
            const IndexList ranked = rank_descending(parts.cell(g, l), scores);
            const Index have = ranked.size();
            const Index want = target[g][l];
            if (want >= have) {
                out.insert(out.end(), ranked.begin(), ranked.end());
                for (Index k = 0; k < want - have; ++k) out.push_back(ranked[k % have]);
            } else {
                const Index remove = have - want;
                out.insert(out.end(), ranked.begin() + static_cast<std::ptrdiff_t>(remove), ranked.end());
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Dataset preferential_sample(const Dataset& data, const ModelSpec& ranker, std::uint64_t seed) {
    require_all_cells(partition_groups(data.y(), data.s()), "preferential_sample");
    const auto scores = ranker_scores(data, ranker, seed);
    return data.subset(preferential_sample_indices(data.y(), data.s(), scores));
}

}  // namespace fairlens::preprocess
