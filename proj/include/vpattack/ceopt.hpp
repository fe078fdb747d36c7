// Copyright 2026 The vpattack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Cross-entropy optimizer over mixed categorical / bounded-integer spaces.
//
// The sampling distribution is a product of per-coordinate piecewise-uniform
// marginals: each coordinate's range is split into disjoint cells, a cell is
// drawn by its mass and a value uniformly inside it. After scoring, the elite
// samples re-estimate the cell masses with importance weights
//
//     gamma_i = surrogate(pi_i) / p(pi_i),   surrogate = score + positive_shift
//     alpha'_j = sum_i [pi_i in C_j] gamma_i / sum_i gamma_i
//
// followed by smoothing towards the previous masses and a probability floor
// that keeps every cell reachable.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "vpattack/core.hpp"

namespace vpattack::ce {

using Value = std::int64_t;
using Point = std::vector<Value>;

struct Categorical {
    std::size_t size = 1;
};

/// Integers in [lo, hi] split into `bins` near-equal cells.
struct BoundedInteger {
    Value lo = 0;
    Value hi = 0;
    std::size_t bins = 1;
};

using Coordinate = std::variant<Categorical, BoundedInteger>;

struct SearchSpace {
    std::vector<Coordinate> coordinates;

    void validate() const {
        if (coordinates.empty()) {
            throw InvalidParameter("search space has no coordinates");
        }
        for (const auto& c : coordinates) {
            if (const auto* cat = std::get_if<Categorical>(&c)) {
                if (cat->size < 1) {
                    throw InvalidParameter("categorical coordinate needs size >= 1");
                }
            } else {
                const auto& b = std::get<BoundedInteger>(c);
                if (b.lo > b.hi || b.bins < 1) {
                    throw InvalidParameter("bounded coordinate needs lo <= hi and bins >= 1");
                }
            }
        }
    }

    /// Number of points; saturates at SIZE_MAX.
    std::size_t cardinality() const {
        std::size_t n = 1;
        for (const auto& c : coordinates) {
            const std::size_t k = std::holds_alternative<Categorical>(c)
                                      ? std::get<Categorical>(c).size
                                      : static_cast<std::size_t>(std::get<BoundedInteger>(c).hi - std::get<BoundedInteger>(c).lo + 1);
            if (k != 0 && n > SIZE_MAX / k) {
                return SIZE_MAX;
            }
            n *= k;
        }
        return n;
    }
};

/// Inclusive integer range.
struct Cell {
    Value lo = 0;
    Value hi = 0;

    Value width() const noexcept { return hi - lo + 1; }
    bool contains(Value v) const noexcept { return v >= lo && v <= hi; }
    friend bool operator==(const Cell&, const Cell&) = default;
};

struct CellPartition {
    std::vector<std::vector<Cell>> cells;  ///< per coordinate, ascending and contiguous

    /// One cell per categorical value; bounded ranges split into min(bins, range) cells.
    static CellPartition of(const SearchSpace& space) {
        space.validate();
        CellPartition p;
        for (const auto& c : space.coordinates) {
            std::vector<Cell> cs;
            if (const auto* cat = std::get_if<Categorical>(&c)) {
                for (std::size_t i = 0; i < cat->size; ++i) {
                    cs.push_back({static_cast<Value>(i), static_cast<Value>(i)});
                }
            } else {
                const auto& b = std::get<BoundedInteger>(c);
                const Value n = b.hi - b.lo + 1;
                const Value m = std::min<Value>(static_cast<Value>(b.bins), n);
                for (Value j = 0; j < m; ++j) {
                    cs.push_back({b.lo + j * n / m, b.lo + (j + 1) * n / m - 1});
                }
            }
            p.cells.push_back(std::move(cs));
        }
        return p;
    }

    std::size_t dimensions() const noexcept { return cells.size(); }

    std::size_t cell_of(std::size_t coord, Value v) const {
        const auto& cs = cells.at(coord);
        const auto it = std::upper_bound(cs.begin(), cs.end(), v, [](Value x, const Cell& c) { return x < c.lo; });
        if (it == cs.begin() || !std::prev(it)->contains(v)) {
            throw InvalidParameter("value " + std::to_string(v) + " outside coordinate " + std::to_string(coord));
        }
        return static_cast<std::size_t>(std::distance(cs.begin(), it) - 1);
    }
};

struct CEDistribution {
    std::vector<std::vector<double>> alpha;  ///< per coordinate, mass per cell

    /// Throws unless every coordinate sums to 1 (within 1e-9) with masses >= floor.
    void validate(double floor = 0.0) const {
        for (const auto& a : alpha) {
            const double sum = std::accumulate(a.begin(), a.end(), 0.0);
            if (std::abs(sum - 1.0) > 1e-9) {
                throw InvalidParameter("distribution masses do not sum to 1");
            }
            for (const double m : a) {
                if (!(m >= floor - 1e-15)) {
                    throw InvalidParameter("distribution mass below floor");
                }
            }
        }
    }

    /// Probability mass of a concrete point: prod_k alpha_k[cell] / width(cell).
    double density(const CellPartition& p, const Point& x) const {
        double d = 1.0;
        for (std::size_t k = 0; k < alpha.size(); ++k) {
            const auto j = p.cell_of(k, x[k]);
            d *= alpha[k][j] / static_cast<double>(p.cells[k][j].width());
        }
        return d;
    }
};

inline CEDistribution init_distribution(const SearchSpace& space, const CellPartition& partition) {
    space.validate();
    if (partition.dimensions() != space.coordinates.size()) {
        throw InvalidParameter("partition does not match search space");
    }
    CEDistribution d;
    for (const auto& cs : partition.cells) {
        d.alpha.emplace_back(cs.size(), 1.0 / static_cast<double>(cs.size()));
    }
    return d;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stream keyed by (seed, iteration, candidate index).
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t iteration, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ iteration) ^ index));
}

/// Uniform in [0, 1) from the top 53 bits; portable across standard libraries.
inline double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n), rejection-sampled.
inline std::uint64_t below(std::mt19937_64& g, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
        const std::uint64_t x = g();
        if (x < limit) {
            return x % n;
        }
    }
}

inline std::size_t draw_cell(std::mt19937_64& g, const std::vector<double>& masses) {
    const double u = unit(g);
    double cum = 0.0;
    for (std::size_t j = 0; j < masses.size(); ++j) {
        cum += masses[j];
        if (u < cum) {
            return j;
        }
    }
    // Rounding left u above the running sum: take the last cell with mass.
    for (std::size_t j = masses.size(); j-- > 0;) {
        if (masses[j] > 0.0) {
            return j;
        }
    }
    return masses.size() - 1;
}

}  // namespace detail

struct Candidate {
    Point point;
    std::vector<std::size_t> cells;
    double density = 0.0;  ///< probability of `point` under the sampling distribution
    std::size_t index = 0;
};

inline Candidate sample_one(const CEDistribution& dist, const CellPartition& partition, std::uint64_t seed,
                            std::uint64_t iteration, std::size_t index) {
    auto g = detail::stream(seed, iteration, index);
    Candidate c;
    c.index = index;
    c.density = 1.0;
    for (std::size_t k = 0; k < partition.dimensions(); ++k) {
        const auto j = detail::draw_cell(g, dist.alpha[k]);
        const auto& cell = partition.cells[k][j];
        c.cells.push_back(j);
        c.point.push_back(cell.lo + static_cast<Value>(detail::below(g, static_cast<std::uint64_t>(cell.width()))));
        c.density *= dist.alpha[k][j] / static_cast<double>(cell.width());
    }
    return c;
}

inline std::vector<Candidate> sample(const CEDistribution& dist, const CellPartition& partition, std::size_t n_samples,
                                     std::uint64_t seed, std::uint64_t iteration = 0) {
    if (n_samples < 1) {
        throw InvalidParameter("sample count must be >= 1");
    }
    if (dist.alpha.size() != partition.dimensions()) {
        throw InvalidParameter("distribution does not match partition");
    }
    std::vector<Candidate> out;
    out.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        out.push_back(sample_one(dist, partition, seed, iteration, i));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Elites and update
// ---------------------------------------------------------------------------

struct ScoredCandidate {
    Candidate candidate;
    double score = 0.0;
};

struct EliteSet {
    std::vector<ScoredCandidate> candidates;  ///< best first
};

/// Top n_elite by score; ties go to higher sampling density, then lower index.
inline EliteSet select_elites(std::vector<ScoredCandidate> scored, std::size_t n_elite) {
    if (n_elite < 1 || n_elite > scored.size()) {
        throw InvalidParameter("elite count " + std::to_string(n_elite) + " not in [1, " +
                               std::to_string(scored.size()) + "]");
    }
    std::stable_sort(scored.begin(), scored.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        if (a.candidate.density != b.candidate.density) {
            return a.candidate.density > b.candidate.density;
        }
        return a.candidate.index < b.candidate.index;
    });
    scored.resize(n_elite);
    return {std::move(scored)};
}

struct UpdateParams {
    double smoothing = 0.85;        ///< weight kept by the previous masses
    double floor = 1e-3;            ///< minimum mass per cell
    double positive_shift = 1e-6;   ///< added to scores before weighting
};

/// Raises masses below `floor` to exactly `floor` and rescales the rest so the
/// vector still sums to one.
inline std::vector<double> apply_floor(std::vector<double> v, double floor) {
    const std::size_t m = v.size();
    if (floor < 0.0 || floor * static_cast<double>(m) > 1.0 + 1e-12) {
        throw InvalidParameter("probability floor incompatible with cell count");
    }
    std::vector<bool> pinned(m, false);
    for (;;) {
        std::size_t n_pinned = 0;
        double free_sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (pinned[j]) {
                ++n_pinned;
            } else {
                free_sum += v[j];
            }
        }
        const double budget = 1.0 - floor * static_cast<double>(n_pinned);
        const std::size_t n_free = m - n_pinned;
        bool changed = false;
        for (std::size_t j = 0; j < m; ++j) {
            if (pinned[j]) {
                v[j] = floor;
                continue;
            }
            v[j] = free_sum > 0.0 ? v[j] * budget / free_sum : budget / static_cast<double>(n_free);
            if (v[j] < floor) {
                pinned[j] = true;
                changed = true;
            }
        }
        if (!changed) {
            return v;
        }
    }
}

inline CEDistribution update_distribution(const CEDistribution& dist, const CellPartition& partition,
                                          const EliteSet& elites, const UpdateParams& params = {}) {
    if (elites.candidates.empty()) {
        throw InvalidParameter("update needs at least one elite");
    }
    if (params.smoothing < 0.0 || params.smoothing > 1.0) {
        throw InvalidParameter("smoothing must lie in [0, 1]");
    }
    std::vector<double> gamma;
    double total = 0.0;
    for (const auto& e : elites.candidates) {
        if (!(e.candidate.density > 0.0)) {
            throw InvalidParameter("elite with non-positive sampling density");
        }
        const double surrogate = std::max(0.0, e.score + params.positive_shift);
        gamma.push_back(surrogate / e.candidate.density);
        total += gamma.back();
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        return dist;
    }

    CEDistribution next = dist;
    for (std::size_t k = 0; k < partition.dimensions(); ++k) {
        std::vector<double> fresh(partition.cells[k].size(), 0.0);
        for (std::size_t i = 0; i < gamma.size(); ++i) {
            const auto& c = elites.candidates[i].candidate;
            const auto j = c.cells.empty() ? partition.cell_of(k, c.point[k]) : c.cells[k];
            fresh[j] += gamma[i] / total;
        }
        for (std::size_t j = 0; j < fresh.size(); ++j) {
            fresh[j] = (1.0 - params.smoothing) * fresh[j] + params.smoothing * dist.alpha[k][j];
        }
        next.alpha[k] = apply_floor(std::move(fresh), params.floor);
    }
    return next;
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

struct Budget {
    std::size_t max_iterations = 30;
    std::size_t n_samples = 20;
    std::size_t n_elite = 5;
    std::uint64_t seed = 0;
    std::optional<std::size_t> max_evaluations;  ///< oracle query budget, in objective calls
    std::optional<double> target_score;          ///< stop once reached (e.g. n scenarios flipped)
    UpdateParams update;
    std::size_t workers = 1;

    void validate() const {
        if (max_iterations < 1) {
            throw InvalidParameter("max_iterations must be >= 1");
        }
        if (n_samples < 1 || n_elite < 1 || n_elite >= n_samples) {
            throw InvalidParameter("need 1 <= n_elite < n_samples");
        }
    }
};

struct TraceRecord {
    std::size_t iteration = 0;
    CEDistribution alpha;  ///< distribution the iteration sampled from
    Point best_point;      ///< best so far
    double best_score = 0.0;
    double iteration_best = 0.0;
    std::size_t evaluations = 0;  ///< cumulative
};

struct OptimizeResult {
    Point best_point;
    double best_score = 0.0;
    std::vector<TraceRecord> trace;
    CEDistribution final_distribution;
    std::size_t evaluations = 0;
    bool truncated = false;  ///< stopped by the evaluation budget
};

/// Maximizes `objective(const Point&) -> double`. The objective may be called
/// concurrently from `budget.workers` threads.
template <typename Objective>
OptimizeResult optimize(const SearchSpace& space, Objective&& objective, const Budget& budget) {
    budget.validate();
    const auto partition = CellPartition::of(space);
    auto dist = init_distribution(space, partition);

    OptimizeResult result;
    bool have_best = false;
    for (std::size_t h = 0; h < budget.max_iterations; ++h) {
        std::size_t n = budget.n_samples;
        if (budget.max_evaluations) {
            const std::size_t remaining = *budget.max_evaluations - std::min(*budget.max_evaluations, result.evaluations);
            if (remaining == 0) {
                result.truncated = true;
                break;
            }
            n = std::min(n, remaining);
        }
        auto candidates = sample(dist, partition, budget.n_samples, budget.seed, h);
        candidates.resize(n);

        std::vector<ScoredCandidate> scored(n);
        parallel_for(n, budget.workers, [&](std::size_t i) { scored[i] = {candidates[i], objective(candidates[i].point)}; });
        result.evaluations += n;

        double iteration_best = scored.front().score;
        for (const auto& s : scored) {
            iteration_best = std::max(iteration_best, s.score);
            if (!have_best || s.score > result.best_score) {
                have_best = true;
                result.best_score = s.score;
                result.best_point = s.candidate.point;
            }
        }
        result.trace.push_back({h, dist, result.best_point, result.best_score, iteration_best, result.evaluations});

        if (budget.target_score && result.best_score >= *budget.target_score) {
            break;
        }
        if (n < budget.n_samples) {
            result.truncated = true;
            break;
        }
        dist = update_distribution(dist, partition, select_elites(std::move(scored), budget.n_elite), budget.update);
    }
    result.final_distribution = dist;
    return result;
}

}  // namespace vpattack::ce
