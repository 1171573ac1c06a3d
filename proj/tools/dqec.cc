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

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "dqec/decode.h"
#include "dqec/experiments.h"
#include "dqec/sim.h"

using namespace dqec;

namespace {

struct CodeArgs {
    std::string family = "toric";
    uint32_t d = 4;
    uint32_t a = 2;
    uint32_t b = 3;
    std::string lattice;

    void add(CLI::App *app) {
        app->add_option("--family", family, "toric, honeycomb or lattice")
            ->check(CLI::IsMember({"toric", "honeycomb", "lattice"}));
        app->add_option("--d", d, "toric distance");
        app->add_option("--a", a, "honeycomb rows");
        app->add_option("--b", b, "honeycomb columns");
        app->add_option("--lattice", lattice, "lattice file (family lattice)");
    }
    CodeSpec spec() const {
        CodeSpec c;
        if (family == "toric") {
            c.family = CodeSpec::Family::Toric;
            c.d = d;
        } else if (family == "honeycomb") {
            c.family = CodeSpec::Family::Honeycomb;
            c.a = a;
            c.b = b;
        } else {
            c.family = CodeSpec::Family::LatticeFile;
            c.lattice_path = lattice;
        }
        return c;
    }
};

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << text;
}

std::string pauli_product_text(const PauliProduct &p) {
    std::string s;
    for (const auto &t : p) {
        if (!s.empty()) {
            s += ' ';
        }
        s += pauli_char(t.axis);
        s += std::to_string(t.qubit);
    }
    return s;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"dqec: distributed QEC circuits, sampling and decoding"};
    app.require_subcommand(1);

    CodeArgs build_args;
    std::string build_out;
    auto *build = app.add_subcommand("build-code", "Construct a code and print its summary as JSON");
    build_args.add(build);
    build->add_option("-o,--out", build_out, "output file");

    CodeArgs part_args;
    uint32_t part_nq = 16;
    uint64_t part_seed = 1;
    std::string part_out;
    auto *part = app.add_subcommand("partition", "Spectral partition of a code's qubits into nodes");
    part_args.add(part);
    part->add_option("--nq", part_nq, "qubits per node")->check(CLI::PositiveNumber);
    part->add_option("--seed", part_seed, "seed");
    part->add_option("-o,--out", part_out, "output file");

    CodeArgs comp_args;
    uint32_t comp_nq = 16, comp_rounds = 32, comp_pad = 2, comp_swap = 16;
    double comp_p = 1e-3, comp_pd = 0;
    uint64_t comp_seed = 1;
    std::string comp_mode = "memory", comp_out, comp_meta;
    auto *comp = app.add_subcommand("compile", "Compile a noisy memory circuit");
    comp_args.add(comp);
    comp->add_option("--mode", comp_mode, "memory, swapout or monolithic")
        ->check(CLI::IsMember({"memory", "swapout", "monolithic"}));
    comp->add_option("--nq", comp_nq, "qubits per node");
    comp->add_option("--p", comp_p, "physical error rate");
    comp->add_option("--p-dropout", comp_pd, "per-node per-round failure probability");
    comp->add_option("--rounds", comp_rounds, "noisy rounds");
    comp->add_option("--pad", comp_pad, "noiseless rounds on each side");
    comp->add_option("--swap-after", comp_swap, "swap-out after this noisy round");
    comp->add_option("--seed", comp_seed, "seed");
    comp->add_option("-o,--out", comp_out, "circuit file");
    comp->add_option("--meta", comp_meta, "metadata JSON file");

    std::string samp_circ, samp_out;
    size_t samp_shots = 1024;
    uint64_t samp_seed = 1;
    unsigned samp_threads = 1;
    auto *samp = app.add_subcommand("sample", "Frame-sample detector and observable outcomes");
    samp->add_option("circuit", samp_circ, "circuit file")->required();
    samp->add_option("--shots", samp_shots, "shot count");
    samp->add_option("--seed", samp_seed, "seed");
    samp->add_option("--threads", samp_threads, "worker threads");
    samp->add_option("-o,--out", samp_out, "outcome file")->required();

    std::string dec_circ, dec_outcomes, dec_dem, dec_pred;
    unsigned dec_threads = 1;
    auto *dec = app.add_subcommand("decode", "Decode sampled outcomes with matching and score them");
    dec->add_option("circuit", dec_circ, "circuit the decoder is built from")->required();
    dec->add_option("outcomes", dec_outcomes, "outcome file")->required();
    dec->add_option("--dem-out", dec_dem, "write the detector error model here");
    dec->add_option("--predictions-out", dec_pred, "write one predicted observable mask per line");
    dec->add_option("--threads", dec_threads, "worker threads");

    std::string run_cfg, run_csv, run_svg;
    bool run_deterministic = false;
    auto *run = app.add_subcommand("run", "Run an experiment grid from a JSON config");
    run->add_option("config", run_cfg, "config file")->required()->check(CLI::ExistingFile);
    run->add_option("--csv", run_csv, "CSV output (stdout if omitted)");
    run->add_option("--svg", run_svg, "optional SVG plot");
    run->add_flag("--deterministic", run_deterministic, "write wall_ms as 0");

    double floor_pd = 1e-4;
    uint32_t floor_r = 32;
    std::optional<uint32_t> floor_k;
    auto *floor_cmd = app.add_subcommand("floor", "Monolithic node-failure floor 1-(1-p_dropout)^r");
    floor_cmd->add_option("--p-dropout", floor_pd, "per-round failure probability")->check(CLI::Range(0.0, 1.0));
    floor_cmd->add_option("--rounds", floor_r, "rounds");
    floor_cmd->add_option("--k", floor_k, "logical qubits");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*build) {
            CodeSpec spec = build_args.spec();
            nlohmann::ordered_json j;
            if (spec.family == CodeSpec::Family::Toric) {
                auto code = build_toric(spec.d);
                j["name"] = code.name;
                j["n"] = code.n;
                j["k"] = code.k;
                j["d"] = code.d;
                std::vector<std::string> stabs, lx, lz;
                for (const auto &s : code.stabilizers) {
                    stabs.push_back(pauli_product_text(s));
                }
                for (const auto &s : code.logical_x) {
                    lx.push_back(pauli_product_text(s));
                }
                for (const auto &s : code.logical_z) {
                    lz.push_back(pauli_product_text(s));
                }
                j["stabilizers"] = stabs;
                j["logical_x"] = lx;
                j["logical_z"] = lz;
                emit(build_out, j.dump(2) + "\n");
            } else {
                auto lat = spec.family == CodeSpec::Family::Honeycomb ? build_honeycomb(spec.a, spec.b)
                                                                      : load_floquet_lattice(slurp(spec.lattice_path));
                emit(build_out, export_floquet_lattice(lat));
            }
        } else if (*part) {
            auto schedule = part_args.spec().schedule();
            auto p = spectral_partition(build_connectivity_graph(schedule), part_nq, part_seed);
            emit(part_out, partition_to_json(p, schedule, part_nq) + "\n");
        } else if (*comp) {
            auto schedule = comp_args.spec().schedule();
            NoiseParams noise;
            noise.p = comp_p;
            noise.p_dropout = comp_pd;
            CompileOptions co;
            co.rounds = comp_rounds;
            co.pad = comp_pad;
            co.seed = comp_seed;
            CompiledExperiment exp;
            if (comp_mode == "monolithic") {
                if (comp_pd > 0) {
                    throw std::runtime_error("monolithic node failure is simulated as an ensemble by `run`");
                }
                exp = compile_monolithic(schedule, noise, TimingModel{}, co);
            } else {
                auto p = spectral_partition(build_connectivity_graph(schedule), comp_nq, comp_seed);
                auto layout = make_layout(p, schedule, comp_nq);
                if (comp_mode == "memory") {
                    exp = compile_memory(schedule, layout, noise, TimingModel{}, co);
                } else {
                    SwapOutOptions so;
                    so.swap_after_round = comp_swap;
                    exp = compile_swapout(schedule, layout, noise, TimingModel{}, co, so);
                }
                if (comp_pd > 0) {
                    exp = attach_node_dropout(exp, noise, comp_seed);
                }
            }
            emit(comp_out, serialize_program(exp.program));
            if (!comp_meta.empty()) {
                emit(comp_meta, exp.metadata_json() + "\n");
            }
        } else if (*samp) {
            auto prog = parse_program(slurp(samp_circ));
            SampleOptions so;
            so.threads = samp_threads;
            auto out = sample_frames(prog, samp_shots, samp_seed, so);
            std::ofstream f(samp_out, std::ios::binary);
            if (!f) {
                throw std::runtime_error("cannot write " + samp_out);
            }
            write_outcomes(f, out);
        } else if (*dec) {
            auto prog = parse_program(slurp(dec_circ));
            std::ifstream f(dec_outcomes, std::ios::binary);
            if (!f) {
                throw std::runtime_error("cannot open " + dec_outcomes);
            }
            auto outcomes = read_outcomes(f);
            auto dem = build_dem(prog);
            if (!dec_dem.empty()) {
                std::ofstream d(dec_dem);
                write_dem(d, dem);
            }
            DecoderOptions o;
            o.threads = dec_threads;
            MatchingDecoder decoder(to_matching_graph(dem), o);
            auto pred = decoder.decode_batch(outcomes);
            if (!dec_pred.empty()) {
                std::ofstream pf(dec_pred);
                for (auto m : pred) {
                    pf << m << "\n";
                }
            }
            auto s = score_predictions(pred, outcomes);
            auto ci = s.shots ? bootstrap_ci(s.errors_any, s.shots) : std::pair<double, double>{0, 0};
            nlohmann::ordered_json j;
            j["shots"] = s.shots;
            j["errors_any"] = s.errors_any;
            j["errors_per_observable"] = s.errors_per_observable;
            j["P_L"] = s.shots ? static_cast<double>(s.errors_any) / static_cast<double>(s.shots) : 0.0;
            j["ci_low"] = ci.first;
            j["ci_high"] = ci.second;
            std::cout << j.dump(2) << "\n";
        } else if (*run) {
            auto config = config_from_json(slurp(run_cfg));
            if (run_deterministic) {
                config.record_wall_time = false;
            }
            auto rows = run_experiment(config);
            std::ostringstream csv;
            write_csv(csv, rows);
            emit(run_csv, csv.str());
            if (!run_svg.empty()) {
                emit(run_svg, render_svg(rows));
            }
            int failed = 0;
            for (const auto &r : rows) {
                for (const auto &w : r.warnings) {
                    std::cerr << "warning: " << w << "\n";
                }
                if (!r.error.empty()) {
                    std::cerr << "error: " << r.error << "\n";
                    failed++;
                }
            }
            return failed ? 2 : 0;
        } else if (*floor_cmd) {
            std::printf("%.6e\n", analytic_floor(floor_pd, floor_r, floor_k));
        }
    } catch (const std::exception &e) {
        std::cerr << "dqec: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
