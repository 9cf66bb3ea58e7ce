#include "retwalk/chain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace retwalk {

namespace {

using json = nlohmann::json;

// Forward reachability from state 0 over a CSR support graph.
std::vector<char> reachable_from_zero(const CsrMatrix& g) {
    std::vector<char> seen(g.n_rows, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        std::size_t x = stack.back();
        stack.pop_back();
        for (std::size_t y : g.row_cols(x)) {
            if (!seen[y]) {
                seen[y] = 1;
                stack.push_back(y);
            }
        }
    }
    return seen;
}

// Buckets raw entries into CSR, recording structural violations. Entries
// with an out-of-range index are reported and left out.
CsrMatrix bucket(std::size_t n, const std::vector<Entry>& entries, ValidationReport& report) {
    CsrMatrix m;
    m.n_rows = m.n_cols = n;
    m.row_ptr.assign(n + 1, 0);
    std::vector<char> in_range(entries.size(), 0);
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const Entry& e = entries[k];
        if (e.row >= n || e.col >= n) {
            report.push_back({ErrorCode::IndexOutOfRange,
                              e.row < n ? std::optional<std::size_t>(e.row) : std::nullopt,
                              "entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                                  ") outside [0, " + std::to_string(n) + ")"});
            continue;
        }
        in_range[k] = 1;
        ++m.row_ptr[e.row + 1];
    }
    for (std::size_t i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];

    std::vector<std::pair<std::size_t, double>> slots(m.row_ptr[n]);
    std::vector<std::size_t> next(m.row_ptr.begin(), m.row_ptr.end() - 1);
    for (std::size_t k = 0; k < entries.size(); ++k)
        if (in_range[k]) slots[next[entries[k].row]++] = {entries[k].col, entries[k].prob};

    std::vector<std::size_t> kept_ptr(n + 1, 0);
    for (std::size_t r = 0; r < n; ++r) {
        auto first = slots.begin() + static_cast<std::ptrdiff_t>(m.row_ptr[r]);
        auto last = slots.begin() + static_cast<std::ptrdiff_t>(m.row_ptr[r + 1]);
        std::stable_sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto it = first; it != last; ++it) {
            if (it + 1 != last && (it + 1)->first == it->first)
                report.push_back({ErrorCode::DuplicateEntry, r,
                                  "duplicate entry (" + std::to_string(r) + ", " +
                                      std::to_string(it->first) + ")"});
            const double p = it->second;
            if (p < 0.0)
                report.push_back({ErrorCode::NegativeProbability, r,
                                  "U(" + std::to_string(r) + ", " + std::to_string(it->first) +
                                      ") = " + std::to_string(p)});
            if (p == 0.0) continue;
            m.col_idx.push_back(it->first);
            m.values.push_back(p);
        }
        kept_ptr[r + 1] = m.values.size();
    }
    m.row_ptr = std::move(kept_ptr);
    return m;
}

void check_rows_and_connectivity(const CsrMatrix& m, ValidationReport& report) {
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        const double s = m.row_sum(r);
        // Negated comparison so NaN sums are rejected as well.
        if (!(std::abs(s - 1.0) <= kRowSumTolerance)) {
            std::ostringstream os;
            os.precision(17);
            os << "row " << r << " sums to " << s;
            report.push_back({ErrorCode::RowSumError, r, os.str()});
        }
    }
    if (m.n_rows == 0) return;
    const auto fwd = reachable_from_zero(m);
    const auto bwd = reachable_from_zero(m.transposed());
    for (std::size_t x = 0; x < m.n_rows; ++x) {
        if (!fwd[x] || !bwd[x]) {
            report.push_back({ErrorCode::NotStronglyConnected, x,
                              "state " + std::to_string(x) +
                                  (!fwd[x] ? " is unreachable from state 0"
                                           : " cannot reach state 0")});
        }
    }
}

ValidationReport validate_into(std::size_t n, const std::vector<Entry>& entries, CsrMatrix& out) {
    ValidationReport report;
    if (n < 2) {
        report.push_back({ErrorCode::TooSmall, std::nullopt,
                          "chain needs at least 2 states, got " + std::to_string(n)});
        return report;
    }
    out = bucket(n, entries, report);
    check_rows_and_connectivity(out, report);
    return report;
}

}  // namespace

StateIndex StochasticMatrix::index(std::size_t i) const {
    if (i >= n_states())
        throw Error(ErrorCode::IndexOutOfRange,
                    "state " + std::to_string(i) + " outside [0, " + std::to_string(n_states()) + ")");
    return StateIndex{i};
}

ValidationReport validate(std::size_t n, const std::vector<Entry>& entries) {
    CsrMatrix scratch;
    return validate_into(n, entries, scratch);
}

ValidationReport validate(const StochasticMatrix& u) { return validate(u.n_states(), entries_of(u)); }

StochasticMatrix from_sparse_rows(std::size_t n, const std::vector<Entry>& entries,
                                  std::vector<std::string> labels) {
    StochasticMatrix u;
    ValidationReport report = validate_into(n, entries, u.csr_);
    if (!report.empty()) throw Error(report.front().code, report.front().detail);
    if (!labels.empty() && labels.size() != n)
        throw Error(ErrorCode::ParseError, "expected " + std::to_string(n) + " labels, got " +
                                               std::to_string(labels.size()));
    u.labels_ = std::move(labels);
    return u;
}

std::vector<Entry> entries_of(const StochasticMatrix& u) {
    const CsrMatrix& m = u.csr();
    std::vector<Entry> out;
    out.reserve(m.nnz());
    for (std::size_t r = 0; r < m.n_rows; ++r)
        for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
            out.push_back({r, m.col_idx[k], m.values[k]});
    return out;
}

StochasticMatrix parse_graph_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    auto fail = [](const std::string& why) -> Error { return Error(ErrorCode::ParseError, why); };

    if (!doc.is_object()) throw fail("top level must be an object");
    if (!doc.contains("n") || !doc["n"].is_number_integer()) throw fail("\"n\" must be an integer");
    const auto n_signed = doc["n"].get<std::int64_t>();
    if (n_signed < 2)
        throw Error(ErrorCode::TooSmall, "chain needs at least 2 states, got " + std::to_string(n_signed));
    const auto n = static_cast<std::size_t>(n_signed);

    if (!doc.contains("rows") || !doc["rows"].is_array()) throw fail("\"rows\" must be an array");
    const json& rows = doc["rows"];
    if (rows.size() != n)
        throw fail("\"rows\" has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(n));

    std::vector<Entry> entries;
    for (std::size_t r = 0; r < n; ++r) {
        if (!rows[r].is_array()) throw fail("row " + std::to_string(r) + " must be an array");
        for (const json& pair : rows[r]) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number())
                throw fail("row " + std::to_string(r) + " entries must be [col, prob] pairs");
            const auto col = pair[0].get<std::int64_t>();
            if (col < 0)
                throw Error(ErrorCode::IndexOutOfRange, "negative column in row " + std::to_string(r));
            entries.push_back({r, static_cast<std::size_t>(col), pair[1].get<double>()});
        }
    }

    std::vector<std::string> labels;
    if (doc.contains("labels")) {
        if (!doc["labels"].is_array()) throw fail("\"labels\" must be an array of strings");
        for (const json& l : doc["labels"]) {
            if (!l.is_string()) throw fail("\"labels\" must be an array of strings");
            labels.push_back(l.get<std::string>());
        }
    }
    return from_sparse_rows(n, entries, std::move(labels));
}

StochasticMatrix load_graph_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph_json(buf.str());
}

std::string to_graph_json(const StochasticMatrix& u) {
    json doc = json::object();
    doc["n"] = u.n_states();
    if (!u.labels().empty()) doc["labels"] = u.labels();
    json rows = json::array();
    const CsrMatrix& m = u.csr();
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        json row = json::array();
        for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
            row.push_back(json::array({m.col_idx[k], m.values[k]}));
        rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    return doc.dump() + "\n";
}

void save_graph_file(const StochasticMatrix& u, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << to_graph_json(u);
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace retwalk
