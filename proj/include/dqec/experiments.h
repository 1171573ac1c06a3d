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

#ifndef DQEC_EXPERIMENTS_H
#define DQEC_EXPERIMENTS_H

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dqec/codes.h"
#include "dqec/netcompile.h"

namespace dqec {

class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

struct CodeSpec {
    enum class Family { Toric, Honeycomb, LatticeFile };
    Family family = Family::Toric;
    uint32_t d = 4;
    uint32_t a = 0;
    uint32_t b = 0;
    std::string lattice_path;

    /// "toric", "honeycomb" or "lattice".
    std::string family_name() const;
    /// "6", "4x6" or the lattice file name.
    std::string size_label() const;
    ScheduleTemplate schedule() const;
};

enum class DropoutRule { None, POver100, Fixed };

/// combined: p_circ = p with the dropout rule; circuit: dropout forced off;
/// node: p_circ = 0, decoder still built for p.
enum class NoiseModel { Combined, CircuitOnly, NodeOnly };

struct ExperimentConfig {
    CodeSpec code;
    uint32_t n_q = 16;
    std::vector<double> p_grid;
    DropoutRule dropout = DropoutRule::None;
    double dropout_value = 0;
    NoiseModel noise_model = NoiseModel::Combined;
    uint32_t rounds = 32;
    uint32_t pad = 2;
    /// memory, swapout, monolithic or monolithic-ensemble.
    std::string mode = "memory";
    size_t max_shots = 100000;
    size_t target_errors = 100;
    size_t min_shots = 0;
    uint64_t seed = 1;
    uint32_t swap_after_round = 16;
    std::optional<uint32_t> swap_target;
    double nonlocal_ratio = 10;
    uint32_t dropout_samples = 512;
    unsigned threads = 1;
    /// When false wall_ms is written as 0 so reruns are byte-identical.
    bool record_wall_time = true;

    void validate() const;
    double dropout_for(double p) const;
};

ExperimentConfig config_from_json(const std::string &text);
std::string config_to_json(const ExperimentConfig &config);

struct ResultRow {
    std::string mode;
    std::string code;
    std::string d_or_lattice;
    uint32_t n_q = 0;
    double p = 0;
    double p_dropout = 0;
    uint32_t rounds = 0;
    size_t shots = 0;
    size_t errors_any = 0;
    std::vector<size_t> errors_per_obs;
    double p_l = 0;
    double ci_low = 0;
    double ci_high = 0;
    uint64_t seed = 0;
    double wall_ms = 0;
    /// Ensemble weight that was not simulated.
    double residual_weight = 0;
    /// Empty unless the point failed; failed points keep NaN rates.
    std::string error;
    std::vector<std::string> warnings;
};

/// Percentile bootstrap over shots. Resampling a 0/1 shot vector with
/// replacement is a binomial draw, so only the counts are needed.
std::pair<double, double> bootstrap_ci(size_t errors, size_t shots, double level = 0.999, size_t resamples = 10000,
                                       uint64_t seed = 0);
std::pair<double, double> bootstrap_ci(const std::vector<uint8_t> &per_shot, double level = 0.999,
                                       size_t resamples = 10000, uint64_t seed = 0);

/// 1-(1-p_dropout)^r, times 1-2^-k when k is given.
double analytic_floor(double p_dropout, uint32_t rounds, std::optional<uint32_t> k = std::nullopt);

/// Weighted sum of member rates after normalizing the weights; the CI
/// resamples every member's shots.
ResultRow combine_ensemble(const std::vector<std::pair<double, ResultRow>> &members, uint64_t seed = 0,
                           double level = 0.999, size_t resamples = 10000);

std::vector<ResultRow> run_experiment(const ExperimentConfig &config);

/// Log-spaced grid including both ends.
std::vector<double> log_grid(double lo, double hi, size_t points);

/// Samples and decodes one compiled circuit adaptively, in 1024-shot chunks,
/// until the error target or the shot cap is reached. The decoder is built
/// from `decoder_source`, which must share the detector layout.
ResultRow run_point(const CompiledExperiment &exp, const CompiledExperiment &decoder_source,
                    const ExperimentConfig &config, uint64_t seed);

void write_csv_header(std::ostream &out);
void write_csv_row(std::ostream &out, const ResultRow &row);
void write_csv(std::ostream &out, const std::vector<ResultRow> &rows);

/// Static log-log plot of P_L against p with CI whiskers, one series per
/// (mode, code, size, n_q).
std::string render_svg(const std::vector<ResultRow> &rows);

}  // namespace dqec

#endif
