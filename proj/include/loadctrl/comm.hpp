#pragma once

#include <span>
#include <vector>

namespace loadctrl {

enum class CommMode {
    kNone,    // no exchange; every agent keeps its own values
    kGrid1d,  // agents on a line, each sees n0 neighbors to either side
};

struct CommGraph {
    CommMode mode = CommMode::kNone;
    int n = 0;
    int n0 = 0;  // half-width of the 1D neighborhood

    void validate() const;
};

// Inclusive 0-based index window [first, last].
struct IndexRange {
    int first = 0;
    int last = 0;

    int size() const { return last - first + 1; }
};

// Neighborhood of agent i, including i itself. For kGrid1d this is the
// clamped window [max(0, i - n0), min(n - 1, i + n0)]; for kNone it is {i}.
// std::invalid_argument when i is out of range.
IndexRange neighbors(const CommGraph& g, int i);

// Unweighted arithmetic mean of values over N(i).
double average_neighborhood(const CommGraph& g, int i, std::span<const double> values);

// Per-agent averages over one snapshot of published values.
std::vector<double> average_all(const CommGraph& g, std::span<const double> values);

}  // namespace loadctrl
