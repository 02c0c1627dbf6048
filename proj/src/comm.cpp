#include "loadctrl/comm.hpp"

#include <algorithm>
#include <stdexcept>

#include "loadctrl/errors.hpp"

namespace loadctrl {

void CommGraph::validate() const {
    if (n < 1) throw ConfigError("comm: graph needs n >= 1");
    if (n0 < 0) throw ConfigError("comm: n0 must be >= 0");
}

IndexRange neighbors(const CommGraph& g, int i) {
    if (i < 0 || i >= g.n) throw std::invalid_argument("neighbors: index out of range");
    if (g.mode == CommMode::kNone) return {i, i};
    return {std::max(0, i - g.n0), std::min(g.n - 1, i + g.n0)};
}

double average_neighborhood(const CommGraph& g, int i, std::span<const double> values) {
    if (static_cast<int>(values.size()) != g.n)
        throw std::invalid_argument("average_neighborhood: values size != n");
    const IndexRange r = neighbors(g, i);
    // Consensus must survive averaging bitwise: sum/divide of k equal values
    // is not exactly the value for every k, so short-circuit that case.
    const double first = values[static_cast<std::size_t>(r.first)];
    bool all_equal = true;
    double sum = 0.0;
    for (int j = r.first; j <= r.last; ++j) {
        const double v = values[static_cast<std::size_t>(j)];
        all_equal = all_equal && v == first;
        sum += v;
    }
    if (all_equal) return first;
    return sum / static_cast<double>(r.size());
}

std::vector<double> average_all(const CommGraph& g, std::span<const double> values) {
    std::vector<double> out(values.size());
    for (int i = 0; i < g.n; ++i) out[static_cast<std::size_t>(i)] =
        average_neighborhood(g, i, values);
    return out;
}

}  // namespace loadctrl
