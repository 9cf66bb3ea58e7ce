#include "retwalk/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "retwalk/return_time.hpp"

namespace retwalk::cli {

namespace {

using json = nlohmann::ordered_json;

struct NamedResult {
    std::string name;
    ReturnTimeResult result;
    double seconds = 0.0;
};

std::vector<std::size_t> parse_list(const std::string& text, char sep, const char* what) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            if (item.empty() || item.front() == '-') throw std::invalid_argument(item);
            v = std::stoull(item, &pos);
        } catch (const std::exception&) {
            throw Error(ErrorCode::SpecInvalid, std::string("bad ") + what + " '" + text + "'");
        }
        if (pos != item.size()) throw Error(ErrorCode::SpecInvalid, std::string("bad ") + what + " '" + text + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw Error(ErrorCode::SpecInvalid, std::string("empty ") + what);
    return out;
}

GridSpec grid_spec(const RunConfig& c) {
    if (!c.dims || !c.boundary) throw Error(ErrorCode::SpecInvalid, "grid commands need --dims and --boundary");
    GridSpec spec{*c.dims, *c.boundary};
    check_spec(spec);
    return spec;
}

GridPoint grid_point(const GridSpec& spec, const std::string& text) {
    GridPoint p{parse_list(text, ',', "origin")};
    (void)point_to_index(spec, p);
    return p;
}

std::vector<GridPoint> grid_origins(const GridSpec& spec, const std::string& text) {
    std::vector<GridPoint> out;
    if (text == "all") {
        const std::size_t n = state_count(spec);
        for (std::size_t i = 0; i < n; ++i) out.push_back(index_to_point(spec, i));
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) out.push_back(grid_point(spec, item));
    if (out.empty()) throw Error(ErrorCode::SpecInvalid, "empty --origins");
    return out;
}

std::vector<std::size_t> graph_origins(const StochasticMatrix& u, const std::string& text) {
    std::vector<std::size_t> out;
    if (text == "all") {
        for (std::size_t i = 0; i < u.n_states(); ++i) out.push_back(i);
        return out;
    }
    for (std::size_t i : parse_list(text, ';', "origins")) out.push_back(u.index(i).value);
    return out;
}

template <class F>
NamedResult timed(std::string name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    ReturnTimeResult r = f();
    const auto t1 = std::chrono::steady_clock::now();
    return {std::move(name), std::move(r), std::chrono::duration<double>(t1 - t0).count()};
}

NamedResult monte_carlo(const RunConfig& c, const StochasticMatrix& u, StateIndex o, std::uint64_t episodes) {
    return timed("montecarlo", [&] {
        const auto stats = monte_carlo_estimate(u, o, episodes, c.seed, c.step_cap);
        ReturnTimeResult r;
        r.method = Method::MonteCarlo;
        r.value = stats.mean;
        r.diagnostics = stats;
        return r;
    });
}

// Runs the methods selected by --method for one origin.
std::vector<NamedResult> compute(const RunConfig& c, const StochasticMatrix& u, StateIndex o,
                                 const GridSpec* spec, const GridPoint* p) {
    std::vector<NamedResult> out;
    const WaitingRoom w = build_waiting_room(u, o);
    const bool all = c.method == CliMethod::All;
    const bool dense_ok = u.n_states() <= kDenseCap;

    if (c.method == CliMethod::Solve || all)
        out.push_back(timed("solve", [&] { return expected_return_time(w); }));
    if (c.method == CliMethod::Series || all)
        out.push_back(timed("series", [&] { return expected_return_time(w, SolvePolicy::Series); }));
    if (c.method == CliMethod::Dense || (all && dense_ok))
        out.push_back(timed("dense", [&] { return hitting_time_oracle(w); }));
    if (c.method == CliMethod::Kac || (all && dense_ok))
        out.push_back(timed("kac", [&] { return kac_return_time(u, o); }));
    if (c.method == CliMethod::Closed || (all && spec)) {
        if (!spec) throw Error(ErrorCode::SpecInvalid, "closed forms exist only for grid chains");
        out.push_back(timed("closed", [&] { return closed_form_return_time(*spec, *p, false); }));
        if (spec->boundary == Boundary::StayStill && classify_vertex(*spec, *p) > 0)
            out.push_back(timed("closed_paper", [&] { return closed_form_return_time(*spec, *p, true); }));
    }
    if (c.paper_variant || all)
        out.push_back(timed("paper_variant", [&] { return expected_return_time_paper_variant(w); }));
    if (c.episodes && *c.episodes > 0) out.push_back(monte_carlo(c, u, o, *c.episodes));
    return out;
}

json diagnostics_json(const NamedResult& nr) {
    json d = json::object();
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SolveDiagnostics>) {
                d["solver"] = std::string(to_string(v.method));
                d["residual_inf"] = v.residual_inf;
                if (v.method == SolveMethod::NeumannSeries) {
                    d["terms_used"] = v.terms_used;
                    d["tail_bound"] = v.tail_bound;
                }
            } else if constexpr (std::is_same_v<T, SimulationStats>) {
                d["episodes"] = v.episodes;
                d["mean"] = v.mean;
                d["variance"] = v.variance;
                d["ci95_halfwidth"] = v.ci95_halfwidth;
                d["seed"] = v.seed;
                d["truncated_episodes"] = v.truncated_episodes;
                d["one_step_returns"] = v.one_step_returns;
            } else if constexpr (std::is_same_v<T, ClosedFormInfo>) {
                d["binding_count"] = v.binding_count;
                d["paper_staystill_claims"] = v.paper_staystill_claims;
            }
        },
        nr.result.diagnostics);
    d["seconds"] = nr.seconds;
    return d;
}

json result_json(const NamedResult& nr) {
    return {{"method", nr.name},
            {"tag", std::string(to_string(nr.result.method))},
            {"value", nr.result.value},
            {"disputed", nr.result.disputed},
            {"diagnostics", diagnostics_json(nr)}};
}

json spec_json(const GridSpec& spec) {
    return {{"dims", spec.dims}, {"boundary", std::string(to_string(spec.boundary))}, {"states", state_count(spec)}};
}

void write_document(const RunConfig& c, std::ostream& out, const std::string& doc) {
    if (!c.output) {
        out << doc;
        return;
    }
    std::ofstream f(*c.output, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + c.output->string());
    f << doc;
    if (!f) throw Error(ErrorCode::IoError, "write failed for " + c.output->string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::optional<double> ci95_of(const ReturnTimeResult& r) {
    if (auto* s = std::get_if<SimulationStats>(&r.diagnostics)) return s->ci95_halfwidth;
    return std::nullopt;
}

std::optional<double> residual_of(const ReturnTimeResult& r) {
    if (auto* s = std::get_if<SolveDiagnostics>(&r.diagnostics)) return s->residual_inf;
    return std::nullopt;
}

SweepRow sweep_row(const std::string& dims, const std::string& boundary, const std::string& origin,
                   std::size_t binding, const NamedResult& nr) {
    return {dims, boundary, origin, binding, nr.name, nr.result.value, nr.result.disputed,
            ci95_of(nr.result), residual_of(nr.result), nr.seconds};
}

int run_single(const RunConfig& c, std::ostream& out) {
    json doc;
    std::vector<NamedResult> results;
    if (c.command == Command::Graph || (c.command == Command::Simulate && c.input)) {
        if (!c.input || !c.origin) throw Error(ErrorCode::SpecInvalid, "graph input needs --input and --origin");
        const auto u = load_graph_file(*c.input);
        const auto o = u.index(parse_list(*c.origin, ',', "origin").front());
        doc["spec"] = {{"input", c.input->string()}, {"states", u.n_states()}};
        doc["origin"] = json::array({o.value});
        if (c.command == Command::Simulate)
            results.push_back(monte_carlo(c, u, o, c.episodes.value_or(100'000)));
        else
            results = compute(c, u, o, nullptr, nullptr);
    } else {
        if (!c.origin) throw Error(ErrorCode::SpecInvalid, "grid commands need --origin");
        const GridSpec spec = grid_spec(c);
        const GridPoint p = grid_point(spec, *c.origin);
        const auto u = build_grid_chain(spec);
        const auto o = point_to_index(spec, p);
        doc["spec"] = spec_json(spec);
        doc["origin"] = p.coords;
        if (c.command == Command::Simulate)
            results.push_back(monte_carlo(c, u, o, c.episodes.value_or(100'000)));
        else
            results = compute(c, u, o, &spec, &p);
    }

    if (c.format.value_or(Format::Json) == Format::Csv) {
        std::vector<SweepRow> rows;
        const std::string dims = c.dims ? format_dims(GridSpec{*c.dims, Boundary::Periodic}) : "graph";
        const std::string boundary = c.boundary ? std::string(to_string(*c.boundary)) : "";
        std::string origin;
        for (std::size_t i = 0; i < doc["origin"].size(); ++i)
            origin += (i ? ":" : "") + std::to_string(doc["origin"][i].get<std::size_t>());
        std::size_t binding = 0;
        if (c.dims && c.command != Command::Graph && !c.input) {
            const GridSpec spec = grid_spec(c);
            binding = classify_vertex(spec, grid_point(spec, *c.origin));
        }
        for (const auto& nr : results) rows.push_back(sweep_row(dims, boundary, origin, binding, nr));
        write_document(c, out, emit_sweep(std::move(rows)));
        return kOk;
    }
    doc["results"] = json::array();
    for (const auto& nr : results) doc["results"].push_back(result_json(nr));
    write_document(c, out, dump(doc));
    return kOk;
}

int run_verify(const RunConfig& c, std::ostream& out) {
    const GridSpec spec = grid_spec(c);
    const auto origins = grid_origins(spec, c.origins.value_or(c.origin.value_or("all")));
    VerifyOptions opt;
    opt.mc_episodes = c.episodes.value_or(0);
    opt.mc_seed = c.seed;
    opt.mc_step_cap = c.step_cap;
    const VerifyReport report = verify(spec, origins, opt);

    json doc;
    doc["spec"] = spec_json(spec);
    doc["entries"] = json::array();
    for (const auto& e : report.entries) {
        NamedResult nr{std::string(to_string(e.result.method)), e.result, 0.0};
        json j = {{"origin", e.origin.coords},
                  {"origin_index", e.origin_index},
                  {"method", std::string(to_string(e.result.method))},
                  {"value", e.result.value},
                  {"disputed", e.result.disputed},
                  {"diagnostics", diagnostics_json(nr)}};
        j["diagnostics"].erase("seconds");
        doc["entries"].push_back(std::move(j));
    }
    doc["pairwise_deltas"] = json::array();
    for (const auto& d : report.pairwise_deltas)
        doc["pairwise_deltas"].push_back(
            {{"origin_index", d.origin_index}, {"max_delta", d.max_delta}, {"consensus", d.consensus}});
    doc["discrepancy_flags"] = report.discrepancy_flags;
    write_document(c, out, dump(doc));
    return kOk;
}

int run_sweep(const RunConfig& c, std::ostream& out) {
    std::vector<SweepRow> rows;
    json doc = json::array();
    const bool as_json = c.format.value_or(Format::Csv) == Format::Json;
    auto add = [&](const std::string& dims, const std::string& boundary, const std::string& origin,
                   std::size_t binding, std::vector<NamedResult> results) {
        if (rows.size() + results.size() > kSweepRowCap)
            throw Error(ErrorCode::SpecInvalid, "sweep exceeds " + std::to_string(kSweepRowCap) + " rows");
        for (const auto& nr : results) {
            rows.push_back(sweep_row(dims, boundary, origin, binding, nr));
            if (as_json) {
                json j = result_json(nr);
                j["origin"] = origin;
                doc.push_back(std::move(j));
            }
        }
    };
    const std::string which = c.origins.value_or(c.origin.value_or("all"));
    if (c.input) {
        const auto u = load_graph_file(*c.input);
        for (std::size_t i : graph_origins(u, which))
            add("graph", "", std::to_string(i), 0, compute(c, u, StateIndex{i}, nullptr, nullptr));
    } else {
        const GridSpec spec = grid_spec(c);
        const auto u = build_grid_chain(spec);
        const std::string dims = format_dims(spec);
        const std::string boundary(to_string(spec.boundary));
        for (const auto& p : grid_origins(spec, which))
            add(dims, boundary, format_point(p, ':'), classify_vertex(spec, p),
                compute(c, u, point_to_index(spec, p), &spec, &p));
    }
    if (rows.empty()) throw Error(ErrorCode::SpecInvalid, "sweep produced no rows");
    write_document(c, out, as_json ? dump(doc) : emit_sweep(std::move(rows)));
    return kOk;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::SingularSystem: return kNumerical;
    case ErrorCode::AllTruncated: return kAllTruncated;
    default: return kValidation;
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Row-major rank of a sweep origin, for sorting.
std::size_t origin_rank(const SweepRow& r) {
    if (r.dims == "graph" || r.dims.empty()) return parse_list(r.origin, ':', "origin").front();
    const auto dims = parse_list(r.dims, 'x', "dims");
    const auto coords = parse_list(r.origin, ':', "origin");
    if (dims.size() != coords.size()) throw Error(ErrorCode::ParseError, "origin/dims mismatch in sweep row");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) idx = idx * dims[i] + coords[i];
    return idx;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string emit_sweep(std::vector<SweepRow> rows) {
    if (rows.empty()) throw Error(ErrorCode::SpecInvalid, "no sweep rows to emit");
    std::vector<std::pair<std::size_t, std::size_t>> keys;
    for (std::size_t i = 0; i < rows.size(); ++i) keys.emplace_back(origin_rank(rows[i]), i);
    std::stable_sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return rows[a.second].method < rows[b.second].method;
    });
    std::string out = std::string(kSweepHeader) + "\n";
    for (const auto& [rank, i] : keys) {
        const SweepRow& r = rows[i];
        out += r.dims + "," + r.boundary + "," + r.origin + "," + std::to_string(r.binding_count) + "," +
               r.method + "," + format_double(r.value) + "," + (r.disputed ? "true" : "false") + "," +
               (r.ci95 ? format_double(*r.ci95) : "") + "," + (r.residual ? format_double(*r.residual) : "") +
               "," + format_double(r.seconds) + "\n";
    }
    return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line) || line != kSweepHeader) throw Error(ErrorCode::ParseError, "missing sweep header");
    std::vector<SweepRow> rows;
    auto num = [](const std::string& s) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
        }
        if (pos != s.size()) throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
        return v;
    };
    while (std::getline(ss, line)) {
        const auto f = split_csv_line(line);
        if (f.size() != 10) throw Error(ErrorCode::ParseError, "sweep row needs 10 fields: " + line);
        SweepRow r;
        r.dims = f[0];
        r.boundary = f[1];
        r.origin = f[2];
        r.binding_count = static_cast<std::size_t>(num(f[3]));
        r.method = f[4];
        r.value = num(f[5]);
        if (f[6] != "true" && f[6] != "false") throw Error(ErrorCode::ParseError, "bad disputed field");
        r.disputed = f[6] == "true";
        if (!f[7].empty()) r.ci95 = num(f[7]);
        if (!f[8].empty()) r.residual = num(f[8]);
        r.seconds = num(f[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (config.command) {
        case Command::Grid:
        case Command::Graph:
        case Command::Simulate: return run_single(config, out);
        case Command::Verify: return run_verify(config, out);
        case Command::Sweep: return run_sweep(config, out);
        }
        return kValidation;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Expected first return times of random walks on finite graphs"};
    app.require_subcommand(1);

    struct Raw {
        std::string dims, boundary, origin, origins, input, output, method = "solve", format;
        std::uint64_t episodes = 0, seed = 42, step_cap = 10'000'000;
        bool episodes_set = false, paper_variant = false;
    } raw;

    const std::vector<std::pair<std::string, Command>> commands = {
        {"grid", Command::Grid},   {"graph", Command::Graph}, {"simulate", Command::Simulate},
        {"verify", Command::Verify}, {"sweep", Command::Sweep}};
    const std::map<std::string, std::string> help = {
        {"grid", "return time on a generated grid walk"},
        {"graph", "return time on a chain loaded from a graph JSON file"},
        {"simulate", "Monte Carlo estimate on a grid or graph file"},
        {"verify", "cross-check every method on grid origins"},
        {"sweep", "CSV table over many origins"}};
    std::vector<CLI::App*> subs;
    for (const auto& [name, cmd] : commands) {
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--dims", raw.dims, "grid side lengths, e.g. 5,5");
        sub->add_option("--boundary", raw.boundary, "periodic | stay | reflect")
            ->check(CLI::IsMember({"periodic", "stay", "reflect"}));
        sub->add_option("--origin", raw.origin, "origin coordinates (grid) or state index (graph)");
        sub->add_option("--origins", raw.origins, "'all' or a ';'-separated origin list");
        sub->add_option("--input", raw.input, "graph JSON file");
        sub->add_option("--output", raw.output, "write the result document here instead of stdout");
        sub->add_option("--method", raw.method, "solve | series | dense | kac | closed | all")
            ->check(CLI::IsMember({"solve", "series", "dense", "kac", "closed", "all"}));
        sub->add_option("--episodes", raw.episodes, "Monte Carlo episodes");
        sub->add_option("--seed", raw.seed, "Monte Carlo master seed");
        sub->add_option("--step-cap", raw.step_cap, "Monte Carlo per-episode step cap");
        sub->add_option("--format", raw.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_flag("--paper-variant", raw.paper_variant, "also report the formula as printed");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }

    RunConfig c;
    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (subs[i]->parsed()) {
            c.command = commands[i].second;
            raw.episodes_set = subs[i]->count("--episodes") > 0;
        }
    }
    try {
        if (!raw.dims.empty()) c.dims = parse_list(raw.dims, ',', "dims");
        if (!raw.boundary.empty()) c.boundary = parse_boundary(raw.boundary);
        if (!raw.origin.empty()) c.origin = raw.origin;
        if (!raw.origins.empty()) c.origins = raw.origins;
        if (!raw.input.empty()) c.input = raw.input;
        if (!raw.output.empty()) c.output = raw.output;
        static const std::map<std::string, CliMethod> methods = {
            {"solve", CliMethod::Solve}, {"series", CliMethod::Series}, {"dense", CliMethod::Dense},
            {"kac", CliMethod::Kac},     {"closed", CliMethod::Closed}, {"all", CliMethod::All}};
        c.method = methods.at(raw.method);
        if (raw.episodes_set) c.episodes = raw.episodes;
        c.seed = raw.seed;
        c.step_cap = raw.step_cap;
        if (!raw.format.empty()) c.format = raw.format == "csv" ? Format::Csv : Format::Json;
        c.paper_variant = raw.paper_variant;
        if (c.command == Command::Graph && (!c.input || !c.origin))
            throw Error(ErrorCode::SpecInvalid, "graph needs --input and --origin");
        if (c.command == Command::Grid && (!c.dims || !c.boundary || !c.origin))
            throw Error(ErrorCode::SpecInvalid, "grid needs --dims, --boundary and --origin");
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }
    return run(c, out, err);
}

}  // namespace retwalk::cli
