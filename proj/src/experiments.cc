// Copyright 2026 The dqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dqec/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

#include "dqec/decode.h"
#include "dqec/rng.h"
#include "dqec/sim.h"

namespace dqec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr size_t kChunk = 1024;

std::string base_name(const std::string &path) {
    auto slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string CodeSpec::family_name() const {
    switch (family) {
        case Family::Toric:
            return "toric";
        case Family::Honeycomb:
            return "honeycomb";
        case Family::LatticeFile:
            return "lattice";
    }
    return "?";
}

std::string CodeSpec::size_label() const {
    switch (family) {
        case Family::Toric:
            return std::to_string(d);
        case Family::Honeycomb:
            return std::to_string(a) + "x" + std::to_string(b);
        case Family::LatticeFile:
            return base_name(lattice_path);
    }
    return "?";
}

ScheduleTemplate CodeSpec::schedule() const {
    switch (family) {
        case Family::Toric:
            return make_schedule(build_toric(d));
        case Family::Honeycomb:
            return make_schedule(build_honeycomb(a, b));
        case Family::LatticeFile:
            return make_schedule(load_floquet_lattice(read_file(lattice_path)));
    }
    throw ConfigError("unknown code family");
}

void ExperimentConfig::validate() const {
    if (p_grid.empty()) {
        throw ConfigError("noise grid is empty");
    }
    for (double p : p_grid) {
        if (!(p >= 0 && p <= 1)) {
            throw ConfigError("grid probability outside [0, 1]");
        }
    }
    if (rounds < 1) {
        throw ConfigError("rounds must be at least 1");
    }
    static const char *kModes[] = {"memory", "swapout", "monolithic", "monolithic-ensemble"};
    if (std::find(std::begin(kModes), std::end(kModes), mode) == std::end(kModes)) {
        throw ConfigError("unknown mode " + mode);
    }
    bool distributed = mode == "memory" || mode == "swapout";
    if (distributed && n_q < 2) {
        throw ConfigError("distributed modes need n_q >= 2");
    }
    if (dropout == DropoutRule::Fixed && !(dropout_value >= 0 && dropout_value <= 1)) {
        throw ConfigError("fixed dropout outside [0, 1]");
    }
    if (max_shots < 1) {
        throw ConfigError("max_shots must be positive");
    }
    if (dropout_samples < 1) {
        throw ConfigError("dropout_samples must be positive");
    }
}

double ExperimentConfig::dropout_for(double p) const {
    if (noise_model == NoiseModel::CircuitOnly) {
        return 0;
    }
    switch (dropout) {
        case DropoutRule::None:
            return 0;
        case DropoutRule::POver100:
            return p / 100;
        case DropoutRule::Fixed:
            return dropout_value;
    }
    return 0;
}

std::vector<double> log_grid(double lo, double hi, size_t points) {
    if (points == 0 || !(lo > 0) || !(hi >= lo)) {
        throw ConfigError("log grid needs 0 < lo <= hi and at least one point");
    }
    std::vector<double> out;
    for (size_t i = 0; i < points; i++) {
        double t = points == 1 ? 0 : static_cast<double>(i) / static_cast<double>(points - 1);
        out.push_back(lo * std::pow(hi / lo, t));
    }
    out.front() = lo;
    out.back() = points == 1 ? lo : hi;
    return out;
}

ExperimentConfig config_from_json(const std::string &text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        const auto &code = j.at("code");
        std::string fam = code.at("family");
        if (fam == "toric") {
            c.code.family = CodeSpec::Family::Toric;
            c.code.d = code.at("d");
        } else if (fam == "honeycomb") {
            c.code.family = CodeSpec::Family::Honeycomb;
            c.code.a = code.at("a");
            c.code.b = code.at("b");
        } else if (fam == "lattice") {
            c.code.family = CodeSpec::Family::LatticeFile;
            c.code.lattice_path = code.at("path");
        } else {
            throw ConfigError("unknown code family " + fam);
        }
        c.n_q = j.value("n_q", c.n_q);
        const auto &grid = j.at("p_grid");
        if (grid.is_array()) {
            c.p_grid = grid.get<std::vector<double>>();
        } else {
            c.p_grid = log_grid(grid.at("min"), grid.at("max"), grid.at("points"));
        }
        if (j.contains("dropout")) {
            const auto &dr = j.at("dropout");
            if (dr.is_number()) {
                c.dropout = DropoutRule::Fixed;
                c.dropout_value = dr;
            } else if (dr == "none") {
                c.dropout = DropoutRule::None;
            } else if (dr == "p/100") {
                c.dropout = DropoutRule::POver100;
            } else {
                throw ConfigError("dropout must be \"none\", \"p/100\" or a number");
            }
        }
        std::string nm = j.value("noise_model", std::string("combined"));
        if (nm == "combined") {
            c.noise_model = NoiseModel::Combined;
        } else if (nm == "circuit") {
            c.noise_model = NoiseModel::CircuitOnly;
        } else if (nm == "node") {
            c.noise_model = NoiseModel::NodeOnly;
        } else {
            throw ConfigError("noise_model must be combined, circuit or node");
        }
        c.rounds = j.value("rounds", c.rounds);
        c.pad = j.value("pad", c.pad);
        c.mode = j.value("mode", c.mode);
        c.max_shots = j.value("max_shots", c.max_shots);
        c.target_errors = j.value("target_errors", c.target_errors);
        c.min_shots = j.value("min_shots", c.min_shots);
        c.seed = j.value("seed", c.seed);
        c.swap_after_round = j.value("swap_after_round", c.swap_after_round);
        if (j.contains("swap_target") && !j.at("swap_target").is_null()) {
            c.swap_target = j.at("swap_target").get<uint32_t>();
        }
        c.nonlocal_ratio = j.value("nonlocal_ratio", c.nonlocal_ratio);
        c.dropout_samples = j.value("dropout_samples", c.dropout_samples);
        c.threads = j.value("threads", c.threads);
        c.record_wall_time = j.value("record_wall_time", c.record_wall_time);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    c.validate();
    return c;
}

std::string config_to_json(const ExperimentConfig &c) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json code;
    code["family"] = c.code.family_name();
    switch (c.code.family) {
        case CodeSpec::Family::Toric:
            code["d"] = c.code.d;
            break;
        case CodeSpec::Family::Honeycomb:
            code["a"] = c.code.a;
            code["b"] = c.code.b;
            break;
        case CodeSpec::Family::LatticeFile:
            code["path"] = c.code.lattice_path;
            break;
    }
    j["code"] = code;
    j["n_q"] = c.n_q;
    j["p_grid"] = c.p_grid;
    switch (c.dropout) {
        case DropoutRule::None:
            j["dropout"] = "none";
            break;
        case DropoutRule::POver100:
            j["dropout"] = "p/100";
            break;
        case DropoutRule::Fixed:
            j["dropout"] = c.dropout_value;
            break;
    }
    static const char *kModels[] = {"combined", "circuit", "node"};
    j["noise_model"] = kModels[static_cast<int>(c.noise_model)];
    j["rounds"] = c.rounds;
    j["pad"] = c.pad;
    j["mode"] = c.mode;
    j["max_shots"] = c.max_shots;
    j["target_errors"] = c.target_errors;
    j["min_shots"] = c.min_shots;
    j["seed"] = c.seed;
    j["swap_after_round"] = c.swap_after_round;
    j["swap_target"] = c.swap_target ? nlohmann::ordered_json(*c.swap_target) : nlohmann::ordered_json(nullptr);
    j["nonlocal_ratio"] = c.nonlocal_ratio;
    j["dropout_samples"] = c.dropout_samples;
    j["threads"] = c.threads;
    j["record_wall_time"] = c.record_wall_time;
    return j.dump(2) + "\n";
}

std::pair<double, double> bootstrap_ci(size_t errors, size_t shots, double level, size_t resamples, uint64_t seed) {
    if (!(level > 0 && level < 1)) {
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    }
    if (shots < 1) {
        throw std::invalid_argument("bootstrap needs at least one shot");
    }
    if (errors > shots) {
        throw std::invalid_argument("more errors than shots");
    }
    if (resamples < 1) {
        throw std::invalid_argument("bootstrap needs at least one resample");
    }
    double q = static_cast<double>(errors) / static_cast<double>(shots);
    Rng rng = make_rng(seed, {0xB007});
    std::binomial_distribution<size_t> draw(shots, q);
    std::vector<double> stats(resamples);
    for (auto &s : stats) {
        s = static_cast<double>(draw(rng)) / static_cast<double>(shots);
    }
    std::sort(stats.begin(), stats.end());
    double tail = (1 - level) / 2;
    auto at = [&](double frac) {
        auto i = static_cast<size_t>(std::floor(frac * static_cast<double>(resamples - 1) + 0.5));
        return stats[std::min(i, resamples - 1)];
    };
    double lo = at(tail), hi = at(1 - tail);
    // A degenerate sample resamples to a point; fall back to the rule-of-three style bound.
    double guard = -std::log(1 - level) / static_cast<double>(shots);
    if (errors == 0) {
        hi = std::max(hi, std::min(1.0, guard));
    }
    if (errors == shots) {
        lo = std::min(lo, std::max(0.0, 1 - guard));
    }
    return {std::min(lo, q), std::max(hi, q)};
}

std::pair<double, double> bootstrap_ci(const std::vector<uint8_t> &per_shot, double level, size_t resamples,
                                       uint64_t seed) {
    size_t errors = 0;
    for (auto b : per_shot) {
        errors += b != 0;
    }
    return bootstrap_ci(errors, per_shot.size(), level, resamples, seed);
}

double analytic_floor(double p_dropout, uint32_t rounds, std::optional<uint32_t> k) {
    if (!(p_dropout >= 0 && p_dropout <= 1)) {
        throw std::invalid_argument("p_dropout outside [0, 1]");
    }
    double floor = p_dropout == 1 ? (rounds > 0 ? 1.0 : 0.0)
                                  : -std::expm1(static_cast<double>(rounds) * std::log1p(-p_dropout));
    if (k) {
        floor *= 1 - std::ldexp(1.0, -static_cast<int>(*k));
    }
    return floor;
}

ResultRow combine_ensemble(const std::vector<std::pair<double, ResultRow>> &members, uint64_t seed, double level,
                           size_t resamples) {
    if (members.empty()) {
        throw std::invalid_argument("empty ensemble");
    }
    if (!(level > 0 && level < 1)) {
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    }
    double total = 0;
    for (const auto &[w, row] : members) {
        if (!(w >= 0)) {
            throw std::invalid_argument("ensemble weights must be non-negative");
        }
        if (row.shots == 0) {
            throw std::invalid_argument("ensemble member without shots");
        }
        total += w;
    }
    if (!(total > 0)) {
        throw std::invalid_argument("ensemble weights sum to zero");
    }
    ResultRow out = members.front().second;
    out.shots = 0;
    out.errors_any = 0;
    out.errors_per_obs.assign(out.errors_per_obs.size(), 0);
    out.wall_ms = 0;
    out.warnings.clear();
    if (std::abs(total - 1) > 1e-9) {
        out.warnings.push_back("ensemble weights summed to " + format_double(total) + "; normalized");
    }
    double pl = 0;
    for (const auto &[w, row] : members) {
        pl += w / total * (static_cast<double>(row.errors_any) / static_cast<double>(row.shots));
        out.shots += row.shots;
        out.errors_any += row.errors_any;
        out.wall_ms += row.wall_ms;
        for (size_t k = 0; k < std::min(out.errors_per_obs.size(), row.errors_per_obs.size()); k++) {
            out.errors_per_obs[k] += row.errors_per_obs[k];
        }
    }
    out.p_l = pl;
    Rng rng = make_rng(seed, {0xE45});
    std::vector<double> stats(resamples, 0);
    for (const auto &[w, row] : members) {
        double q = static_cast<double>(row.errors_any) / static_cast<double>(row.shots);
        std::binomial_distribution<size_t> draw(row.shots, q);
        for (auto &s : stats) {
            s += w / total * static_cast<double>(draw(rng)) / static_cast<double>(row.shots);
        }
    }
    std::sort(stats.begin(), stats.end());
    double tail = (1 - level) / 2;
    auto at = [&](double frac) {
        auto i = static_cast<size_t>(std::floor(frac * static_cast<double>(resamples - 1) + 0.5));
        return stats[std::min(i, resamples - 1)];
    };
    out.ci_low = std::min(at(tail), pl);
    out.ci_high = std::max(at(1 - tail), pl);
    return out;
}

namespace {

ResultRow sample_with(const CircuitProgram &prog, const MatchingDecoder &decoder, uint32_t k,
                      const ExperimentConfig &config, uint64_t seed) {
    ResultRow row;
    row.errors_per_obs.assign(k, 0);
    SampleOptions so;
    so.threads = config.threads;
    for (uint64_t chunk = 0; row.shots < config.max_shots; chunk++) {
        if (row.errors_any >= config.target_errors && row.shots >= config.min_shots) {
            break;
        }
        size_t n = std::min(kChunk, config.max_shots - row.shots);
        ShotOutcomes out = sample_frames(prog, n, derive_seed(seed, {chunk}), so);
        Score s = score_predictions(decoder.decode_batch(out), out);
        row.shots += s.shots;
        row.errors_any += s.errors_any;
        for (size_t j = 0; j < k; j++) {
            row.errors_per_obs[j] += s.errors_per_observable[j];
        }
    }
    row.p_l = static_cast<double>(row.errors_any) / static_cast<double>(row.shots);
    std::tie(row.ci_low, row.ci_high) = bootstrap_ci(row.errors_any, row.shots, 0.999, 10000, derive_seed(seed, {0xC1}));
    return row;
}

std::unique_ptr<MatchingDecoder> decoder_for(const CompiledExperiment &source, unsigned threads) {
    DecoderOptions o;
    o.threads = threads;
    return std::make_unique<MatchingDecoder>(to_matching_graph(build_dem(source)), o);
}

}  // namespace

ResultRow run_point(const CompiledExperiment &exp, const CompiledExperiment &decoder_source,
                    const ExperimentConfig &config, uint64_t seed) {
    if (exp.program.count_detectors() != decoder_source.program.count_detectors() ||
        exp.program.count_observables() != decoder_source.program.count_observables()) {
        throw DecodeError("decoder source does not match the sampled circuit");
    }
    auto decoder = decoder_for(decoder_source, config.threads);
    return sample_with(exp.program, *decoder, exp.k, config, seed);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig &config) {
    config.validate();
    ScheduleTemplate schedule = config.code.schedule();
    bool distributed = config.mode == "memory" || config.mode == "swapout";
    std::optional<NetworkLayout> layout;
    if (distributed) {
        auto part = spectral_partition(build_connectivity_graph(schedule), config.n_q, config.seed);
        layout = make_layout(part, schedule, config.n_q);
    }
    TimingModel timing;
    CompileOptions co;
    co.rounds = config.rounds;
    co.pad = config.pad;
    co.seed = config.seed;

    auto compile = [&](const NoiseParams &noise) {
        if (config.mode == "memory") {
            return compile_memory(schedule, *layout, noise, timing, co);
        }
        if (config.mode == "swapout") {
            SwapOutOptions so;
            so.swap_after_round = config.swap_after_round;
            so.target = config.swap_target;
            return compile_swapout(schedule, *layout, noise, timing, co, so);
        }
        return compile_monolithic(schedule, noise, timing, co);
    };

    std::vector<ResultRow> rows;
    for (size_t i = 0; i < config.p_grid.size(); i++) {
        double p = config.p_grid[i];
        uint64_t point_seed = derive_seed(config.seed, {i});
        auto t0 = std::chrono::steady_clock::now();
        ResultRow row;
        double pd = config.dropout_for(p);
        try {
            NoiseParams nominal;
            nominal.p = p;
            nominal.nonlocal_ratio = config.nonlocal_ratio;
            nominal.dropout_samples = config.dropout_samples;
            NoiseParams actual = nominal;
            if (config.noise_model == NoiseModel::NodeOnly) {
                actual.p = 0;
            }
            actual.p_dropout = pd;
            if (config.mode == "monolithic-ensemble") {
                auto members = compile_monolithic_ensemble(schedule, actual, timing, co);
                auto source = config.noise_model == NoiseModel::NodeOnly
                                  ? compile_monolithic(schedule, nominal, timing, co)
                                  : members.front().experiment;
                auto decoder = decoder_for(source, config.threads);
                std::vector<std::pair<double, ResultRow>> results;
                for (size_t m = 0; m < members.size(); m++) {
                    results.push_back({members[m].weight,
                                       sample_with(members[m].experiment.program, *decoder, members[m].experiment.k,
                                                   config, derive_seed(point_seed, {m}))});
                }
                row = combine_ensemble(results, derive_seed(point_seed, {0xC2}));
                row.residual_weight = ensemble_residual(pd, config.rounds);
            } else {
                if (pd > 0 && config.mode == "monolithic") {
                    throw ConfigError("node failure on a monolithic device needs mode monolithic-ensemble");
                }
                CompiledExperiment exp = compile(actual);
                CompiledExperiment source = config.noise_model == NoiseModel::NodeOnly ? compile(nominal) : exp;
                if (pd > 0) {
                    exp = attach_node_dropout(exp, actual, derive_seed(point_seed, {0xD0}));
                }
                row = run_point(exp, source, config, point_seed);
            }
        } catch (const std::exception &e) {
            row = ResultRow{};
            row.error = "p=" + format_double(p) + ": " + e.what();
            row.p_l = row.ci_low = row.ci_high = kNaN;
        }
        row.mode = config.mode;
        if (config.noise_model == NoiseModel::NodeOnly) {
            row.mode += "/node-only";
        }
        row.code = config.code.family_name();
        row.d_or_lattice = config.code.size_label();
        row.n_q = distributed ? config.n_q : 0;
        row.p = p;
        row.p_dropout = pd;
        row.rounds = config.rounds;
        row.seed = config.seed;
        double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        row.wall_ms = config.record_wall_time ? std::round(ms) : 0;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_csv_header(std::ostream &out) {
    out << "mode,code,d_or_lattice,n_q,p,p_dropout,rounds,shots,errors_any,errors_per_obs,P_L,ci_low,ci_high,seed,"
           "wall_ms\n";
}

void write_csv_row(std::ostream &out, const ResultRow &r) {
    std::string per;
    for (size_t k = 0; k < r.errors_per_obs.size(); k++) {
        per += (k ? ";" : "") + std::to_string(r.errors_per_obs[k]);
    }
    auto num = [](double v) { return std::isnan(v) ? std::string("nan") : format_double(v); };
    out << r.mode << ',' << r.code << ',' << r.d_or_lattice << ',' << r.n_q << ',' << num(r.p) << ','
        << num(r.p_dropout) << ',' << r.rounds << ',' << r.shots << ',' << r.errors_any << ',' << per << ','
        << num(r.p_l) << ',' << num(r.ci_low) << ',' << num(r.ci_high) << ',' << r.seed << ',' << num(r.wall_ms)
        << '\n';
}

void write_csv(std::ostream &out, const std::vector<ResultRow> &rows) {
    write_csv_header(out);
    for (const auto &r : rows) {
        write_csv_row(out, r);
    }
}

std::string render_svg(const std::vector<ResultRow> &rows) {
    constexpr double W = 640, H = 480, L = 70, R = 160, T = 20, B = 50;
    std::map<std::string, std::vector<const ResultRow *>> series;
    double xmin = 1, xmax = 0, ymin = 1, ymax = 0;
    for (const auto &r : rows) {
        if (!(r.p > 0) || !(r.p_l > 0)) {
            continue;
        }
        series[r.mode + " " + r.code + " " + r.d_or_lattice + " nq=" + std::to_string(r.n_q)].push_back(&r);
        xmin = std::min(xmin, r.p);
        xmax = std::max(xmax, r.p);
        ymin = std::min(ymin, r.ci_low > 0 ? r.ci_low : r.p_l);
        ymax = std::max(ymax, r.ci_high);
    }
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (series.empty()) {
        s << "<text x=\"20\" y=\"40\">no positive data</text>\n</svg>\n";
        return s.str();
    }
    double lx0 = std::floor(std::log10(xmin)), lx1 = std::ceil(std::log10(xmax));
    double ly0 = std::floor(std::log10(ymin)), ly1 = std::ceil(std::log10(std::min(1.0, ymax)));
    lx1 = std::max(lx1, lx0 + 1);
    ly1 = std::max(ly1, ly0 + 1);
    auto X = [&](double v) { return L + (std::log10(v) - lx0) / (lx1 - lx0) * (W - L - R); };
    auto Y = [&](double v) { return H - B - (std::log10(std::max(v, std::pow(10.0, ly0))) - ly0) / (ly1 - ly0) * (H - T - B); };
    s << "<g stroke=\"#ccc\">\n";
    for (double e = lx0; e <= lx1; e++) {
        s << "<line x1=\"" << X(std::pow(10, e)) << "\" y1=\"" << T << "\" x2=\"" << X(std::pow(10, e)) << "\" y2=\""
          << H - B << "\"/>\n";
    }
    for (double e = ly0; e <= ly1; e++) {
        s << "<line x1=\"" << L << "\" y1=\"" << Y(std::pow(10, e)) << "\" x2=\"" << W - R << "\" y2=\""
          << Y(std::pow(10, e)) << "\"/>\n";
    }
    s << "</g>\n<g font-size=\"11\" font-family=\"sans-serif\">\n";
    for (double e = lx0; e <= lx1; e++) {
        s << "<text x=\"" << X(std::pow(10, e)) - 12 << "\" y=\"" << H - B + 16 << "\">1e" << e << "</text>\n";
    }
    for (double e = ly0; e <= ly1; e++) {
        s << "<text x=\"" << L - 40 << "\" y=\"" << Y(std::pow(10, e)) + 4 << "\">1e" << e << "</text>\n";
    }
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\">p</text>\n";
    s << "<text x=\"12\" y=\"" << (T + H - B) / 2 << "\">P_L</text>\n";
    static const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
    size_t c = 0;
    for (auto &[name, pts] : series) {
        const char *col = kColors[c % std::size(kColors)];
        std::sort(pts.begin(), pts.end(), [](const ResultRow *a, const ResultRow *b) { return a->p < b->p; });
        s << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
        for (const auto *r : pts) {
            s << X(r->p) << "," << Y(r->p_l) << " ";
        }
        s << "\"/>\n";
        for (const auto *r : pts) {
            s << "<line stroke=\"" << col << "\" x1=\"" << X(r->p) << "\" y1=\"" << Y(r->ci_low) << "\" x2=\"" << X(r->p)
              << "\" y2=\"" << Y(r->ci_high) << "\"/>\n";
            s << "<circle fill=\"" << col << "\" r=\"3\" cx=\"" << X(r->p) << "\" cy=\"" << Y(r->p_l) << "\"/>\n";
        }
        s << "<text fill=\"" << col << "\" x=\"" << W - R + 8 << "\" y=\"" << T + 14 + 16 * c << "\">" << name
          << "</text>\n";
        c++;
    }
    s << "</g>\n</svg>\n";
    return s.str();
}

}  // namespace dqec
