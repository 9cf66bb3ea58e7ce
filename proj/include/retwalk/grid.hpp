#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "retwalk/chain.hpp"

namespace retwalk {

enum class Boundary { Periodic, StayStill, Reflecting };

std::string_view to_string(Boundary b) noexcept;
/// Accepts the CLI spellings periodic|stay|reflect (and the enum names).
Boundary parse_boundary(std::string_view text);

inline constexpr std::size_t kDefaultStateCap = 10'000'000;

/// Box {0..n1-1} x ... x {0..nd-1} with one boundary rule on every axis.
struct GridSpec {
    std::vector<std::size_t> dims;
    Boundary boundary = Boundary::Periodic;

    std::size_t dimension() const noexcept { return dims.size(); }
};

struct GridPoint {
    std::vector<std::size_t> coords;
    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// Throws SpecInvalid, or Overflow when the state count exceeds state_cap.
std::size_t state_count(const GridSpec& spec, std::size_t state_cap = kDefaultStateCap);

void check_spec(const GridSpec& spec, std::size_t state_cap = kDefaultStateCap);

/// Row-major, last coordinate fastest.
StateIndex point_to_index(const GridSpec& spec, const GridPoint& p);
GridPoint index_to_point(const GridSpec& spec, std::size_t i);

/// Number of coordinates sitting on a wall (0 or n_i - 1). Always 0 for
/// periodic grids.
std::size_t classify_vertex(const GridSpec& spec, const GridPoint& p);

/// Transition matrix of the simple walk: each of the 2d signed unit moves has
/// probability 1/(2d), resolved against the walls per spec.boundary.
StochasticMatrix build_grid_chain(const GridSpec& spec, std::size_t state_cap = kDefaultStateCap);

std::string format_dims(const GridSpec& spec, char sep = 'x');
std::string format_point(const GridPoint& p, char sep = ',');

}  // namespace retwalk
