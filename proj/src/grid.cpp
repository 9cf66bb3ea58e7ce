#include "retwalk/grid.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

namespace retwalk {

std::string_view to_string(Boundary b) noexcept {
    switch (b) {
    case Boundary::Periodic: return "periodic";
    case Boundary::StayStill: return "stay";
    case Boundary::Reflecting: return "reflect";
    }
    return "unknown";
}

Boundary parse_boundary(std::string_view text) {
    if (text == "periodic" || text == "Periodic") return Boundary::Periodic;
    if (text == "stay" || text == "StayStill") return Boundary::StayStill;
    if (text == "reflect" || text == "Reflecting") return Boundary::Reflecting;
    throw Error(ErrorCode::SpecInvalid, "unknown boundary '" + std::string(text) + "'");
}

std::size_t state_count(const GridSpec& spec, std::size_t state_cap) {
    if (spec.dims.empty()) throw Error(ErrorCode::SpecInvalid, "grid needs at least one dimension");
    const std::size_t min_side = spec.boundary == Boundary::Reflecting ? 2 : 1;
    std::size_t total = 1;
    for (std::size_t n : spec.dims) {
        if (n < min_side)
            throw Error(ErrorCode::SpecInvalid, "side length " + std::to_string(n) + " below " +
                                                    std::to_string(min_side) + " for " +
                                                    std::string(to_string(spec.boundary)) + " boundary");
        if (total > state_cap / n)
            throw Error(ErrorCode::Overflow, "grid " + format_dims(spec) + " exceeds state cap " +
                                                 std::to_string(state_cap));
        total *= n;
    }
    if (total < 2) throw Error(ErrorCode::SpecInvalid, "grid must have at least 2 states");
    return total;
}

void check_spec(const GridSpec& spec, std::size_t state_cap) { (void)state_count(spec, state_cap); }

StateIndex point_to_index(const GridSpec& spec, const GridPoint& p) {
    if (p.coords.size() != spec.dims.size())
        throw Error(ErrorCode::OutOfRange, "point has " + std::to_string(p.coords.size()) +
                                               " coordinates, grid has " + std::to_string(spec.dims.size()));
    std::size_t idx = 0;
    for (std::size_t i = 0; i < spec.dims.size(); ++i) {
        if (p.coords[i] >= spec.dims[i])
            throw Error(ErrorCode::OutOfRange, "coordinate " + std::to_string(p.coords[i]) +
                                                   " outside [0, " + std::to_string(spec.dims[i]) + ")");
        idx = idx * spec.dims[i] + p.coords[i];
    }
    return StateIndex{idx};
}

GridPoint index_to_point(const GridSpec& spec, std::size_t i) {
    const std::size_t total = state_count(spec, std::numeric_limits<std::size_t>::max());
    if (i >= total)
        throw Error(ErrorCode::OutOfRange,
                    "index " + std::to_string(i) + " outside [0, " + std::to_string(total) + ")");
    GridPoint p;
    p.coords.resize(spec.dims.size());
    for (std::size_t k = spec.dims.size(); k-- > 0;) {
        p.coords[k] = i % spec.dims[k];
        i /= spec.dims[k];
    }
    return p;
}

std::size_t classify_vertex(const GridSpec& spec, const GridPoint& p) {
    (void)point_to_index(spec, p);
    if (spec.boundary == Boundary::Periodic) return 0;
    std::size_t b = 0;
    for (std::size_t i = 0; i < spec.dims.size(); ++i)
        if (p.coords[i] == 0 || p.coords[i] + 1 == spec.dims[i]) ++b;
    return b;
}

StochasticMatrix build_grid_chain(const GridSpec& spec, std::size_t state_cap) {
    const std::size_t total = state_count(spec, state_cap);
    const std::size_t d = spec.dims.size();
    const double moves = static_cast<double>(2 * d);

    // stride[k] = product of dims after k (row-major, last fastest)
    std::vector<std::size_t> stride(d, 1);
    for (std::size_t k = d - 1; k-- > 0;) stride[k] = stride[k + 1] * spec.dims[k + 1];

    std::vector<std::vector<Entry>> per_row(total);
    const auto n_rows = static_cast<std::int64_t>(total);
#pragma omp parallel for schedule(static) if (total >= 4096)
    for (std::int64_t xi = 0; xi < n_rows; ++xi) {
        const auto x = static_cast<std::size_t>(xi);
        // (target, count) pairs; at most 2d distinct targets
        std::vector<std::pair<std::size_t, std::size_t>> hits;
        hits.reserve(2 * d);
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t n = spec.dims[k];
            const std::size_t c = (x / stride[k]) % n;
            for (int sign : {-1, +1}) {
                std::size_t target_c = c;
                const bool off_low = sign < 0 && c == 0;
                const bool off_high = sign > 0 && c + 1 == n;
                if (!off_low && !off_high) {
                    target_c = sign < 0 ? c - 1 : c + 1;
                } else {
                    switch (spec.boundary) {
                    case Boundary::Periodic: target_c = off_low ? n - 1 : 0; break;
                    case Boundary::StayStill: target_c = c; break;
                    case Boundary::Reflecting: target_c = off_low ? 1 : n - 2; break;
                    }
                }
                const std::size_t target = x - c * stride[k] + target_c * stride[k];
                hits.emplace_back(target, 1);
            }
        }
        std::sort(hits.begin(), hits.end());
        auto& row = per_row[x];
        for (const auto& [target, count] : hits) {
            if (!row.empty() && row.back().col == target)
                row.back().prob += 1.0;  // counts until normalized below
            else
                row.push_back({x, target, static_cast<double>(count)});
        }
        // count / (2d): identical arithmetic for (x,y) and (y,x) keeps
        // symmetric walks exactly symmetric.
        for (auto& e : row) e.prob /= moves;
    }

    std::vector<Entry> entries;
    std::size_t nnz = 0;
    for (const auto& row : per_row) nnz += row.size();
    entries.reserve(nnz);
    for (auto& row : per_row) {
        entries.insert(entries.end(), row.begin(), row.end());
        std::vector<Entry>().swap(row);
    }
    return from_sparse_rows(total, entries);
}

std::string format_dims(const GridSpec& spec, char sep) {
    std::string out;
    for (std::size_t i = 0; i < spec.dims.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(spec.dims[i]);
    }
    return out;
}

std::string format_point(const GridPoint& p, char sep) {
    std::string out;
    for (std::size_t i = 0; i < p.coords.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(p.coords[i]);
    }
    return out;
}

}  // namespace retwalk
