#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "retwalk/grid.hpp"

namespace retwalk::cli {

enum class Command { Grid, Graph, Simulate, Verify, Sweep };
enum class CliMethod { Solve, Series, Dense, Kac, Closed, All };
enum class Format { Json, Csv };

struct RunConfig {
    Command command = Command::Grid;
    std::optional<std::vector<std::size_t>> dims;
    std::optional<Boundary> boundary;
    std::optional<std::string> origin;   // "2,2" for grids, "5" for graphs
    std::optional<std::string> origins;  // "all" or "0,0;1,1"
    std::optional<std::filesystem::path> input;
    std::optional<std::filesystem::path> output;
    CliMethod method = CliMethod::Solve;
    std::optional<std::uint64_t> episodes;
    std::uint64_t seed = 42;
    std::uint64_t step_cap = 10'000'000;
    std::optional<Format> format;
    bool paper_variant = false;
};

inline constexpr std::size_t kSweepRowCap = 100'000;

enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3, kAllTruncated = 4 };

/// Executes a parsed configuration, writing the result document to
/// config.output (or `out`) and a single diagnostic line to `err` on failure.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (including argv[0]) and runs it.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// One row of the sweep CSV.
struct SweepRow {
    std::string dims;      // "5x5", or "graph" for file-loaded chains
    std::string boundary;  // "periodic" | "stay" | "reflect" | ""
    std::string origin;    // coordinates joined by ':' or a flat index
    std::size_t binding_count = 0;
    std::string method;
    double value = 0.0;
    bool disputed = false;
    std::optional<double> ci95;
    std::optional<double> residual;
    double seconds = 0.0;
};

inline constexpr const char* kSweepHeader =
    "dims,boundary,origin,binding_count,method,value,disputed,ci95,residual,seconds";

/// Sorted by (origin index, method name); floats with 17 significant digits.
/// Throws SpecInvalid on an empty row set.
std::string emit_sweep(std::vector<SweepRow> rows);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

}  // namespace retwalk::cli
