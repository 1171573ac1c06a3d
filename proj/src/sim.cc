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

#include "dqec/sim.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "dqec/rng.h"
#include "parallel.h"

namespace dqec {

ShotOutcomes::ShotOutcomes(size_t shots_, size_t detectors, size_t observables)
    : shots(shots_),
      num_detectors(detectors),
      num_observables(observables),
      row_words((detectors + observables + 63) / 64),
      bits(shots_ * row_words, 0) {}

void ShotOutcomes::set_detector(size_t shot, size_t d, bool v) {
    uint64_t &w = bits[shot * row_words + (d >> 6)];
    uint64_t m = uint64_t{1} << (d & 63);
    w = v ? (w | m) : (w & ~m);
}

uint64_t ShotOutcomes::observable_mask(size_t shot) const {
    uint64_t m = 0;
    for (size_t k = 0; k < num_observables && k < 64; k++) {
        m |= uint64_t{observable(shot, k)} << k;
    }
    return m;
}

std::vector<uint32_t> ShotOutcomes::fired_detectors(size_t shot) const {
    std::vector<uint32_t> out;
    const uint64_t *row = &bits[shot * row_words];
    for (size_t w = 0; w < row_words; w++) {
        uint64_t v = row[w];
        while (v) {
            size_t d = w * 64 + std::countr_zero(v);
            if (d >= num_detectors) {
                return out;
            }
            out.push_back(static_cast<uint32_t>(d));
            v &= v - 1;
        }
    }
    return out;
}

void ShotOutcomes::append(const ShotOutcomes &other) {
    if (other.num_detectors != num_detectors || other.num_observables != num_observables) {
        throw SimError("cannot append outcomes with different dimensions");
    }
    bits.insert(bits.end(), other.bits.begin(), other.bits.end());
    shots += other.shots;
}

namespace {

constexpr Pauli kAltPauli[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};

uint8_t alternative_count(Opcode op) {
    switch (op) {
        case Opcode::DEPOLARIZE1:
            return 3;
        case Opcode::DEPOLARIZE2:
            return 15;
        default:
            return 1;
    }
}

void check_program(const CircuitProgram &prog) {
    auto v = validate_program(prog);
    if (!v.empty()) {
        throw SimError("invalid program: " + v.front().message());
    }
}

/// One noise event inside a block: (shot, group, alternative).
struct Event {
    uint32_t shot;
    uint32_t group;
    uint8_t alt;
};

/// Geometric skipping over the (group, shot) grid.
void sample_events(Rng &rng, double p, size_t groups, size_t shots, uint8_t alts, std::vector<Event> &out) {
    out.clear();
    if (p <= 0) {
        return;
    }
    size_t total = groups * shots;
    auto pick = [&]() { return static_cast<uint8_t>(1 + rng() % alts); };
    if (p >= 1) {
        for (size_t i = 0; i < total; i++) {
            out.push_back({static_cast<uint32_t>(i % shots), static_cast<uint32_t>(i / shots), pick()});
        }
        return;
    }
    double log_q = std::log1p(-p);
    double pos = -1;
    while (true) {
        double u = uniform01(rng);
        pos += 1 + std::floor(std::log1p(-u) / log_q);
        if (pos >= static_cast<double>(total)) {
            return;
        }
        size_t i = static_cast<size_t>(pos);
        out.push_back({static_cast<uint32_t>(i % shots), static_cast<uint32_t>(i / shots), pick()});
    }
}

/// Per-instruction events for one block drawn from an error pattern.
std::vector<std::vector<Event>> pattern_events(const ErrorPattern &pattern, size_t first_shot, size_t shots,
                                               size_t instructions) {
    std::vector<std::vector<Event>> out(instructions);
    for (size_t s = 0; s < shots; s++) {
        for (const auto &e : pattern[first_shot + s]) {
            if (e.instruction >= instructions) {
                throw SimError("error pattern references instruction out of range");
            }
            out[e.instruction].push_back({static_cast<uint32_t>(s), e.group, e.alternative});
        }
    }
    return out;
}

/// Pauli frames for up to 64*W shots.
class FrameBlock {
   public:
    FrameBlock(const CircuitProgram &prog, size_t shots, Rng rng, bool noiseless,
               const std::vector<std::vector<Event>> *forced)
        : prog_(prog),
          shots_(shots),
          W_((shots + 63) / 64),
          rng_(std::move(rng)),
          noiseless_(noiseless),
          forced_(forced),
          x_(prog.qubit_count * W_, 0),
          z_(prog.qubit_count * W_, 0) {
        rec_.reserve(prog.count_measurements() * W_);
        det_.reserve(prog.count_detectors() * W_);
        obs_.assign(prog.count_observables() * W_, 0);
        last_mask_ = (shots % 64) ? (uint64_t{1} << (shots % 64)) - 1 : ~uint64_t{0};
    }

    void run() {
        for (size_t i = 0; i < prog_.instructions.size(); i++) {
            step(i);
        }
    }

    void write(ShotOutcomes &out, size_t first_shot) const {
        size_t nd = prog_.count_detectors();
        size_t no = prog_.count_observables();
        auto scatter = [&](const std::vector<uint64_t> &planes, size_t count, size_t offset) {
            for (size_t d = 0; d < count; d++) {
                for (size_t w = 0; w < W_; w++) {
                    uint64_t v = planes[d * W_ + w];
                    while (v) {
                        size_t s = w * 64 + std::countr_zero(v);
                        v &= v - 1;
                        if (s < shots_) {
                            out.set_detector(first_shot + s, offset + d, true);
                        }
                    }
                }
            }
        };
        scatter(det_, nd, 0);
        scatter(obs_, no, nd);
    }

   private:
    uint64_t *x(uint32_t q) { return &x_[q * W_]; }
    uint64_t *z(uint32_t q) { return &z_[q * W_]; }
    void randomize(uint64_t *plane) {
        for (size_t w = 0; w < W_; w++) {
            plane[w] = rng_();
        }
        plane[W_ - 1] &= last_mask_;
    }
    const uint64_t *rec(int32_t offset) const {
        return &rec_[rec_.size() - static_cast<size_t>(-offset) * W_];
    }
    void apply(const PauliProduct &p, uint32_t shot) {
        uint64_t bit = uint64_t{1} << (shot & 63);
        size_t w = shot >> 6;
        for (const auto &t : p) {
            if (has_x(t.axis)) {
                x_[t.qubit * W_ + w] ^= bit;
            }
            if (has_z(t.axis)) {
                z_[t.qubit * W_ + w] ^= bit;
            }
        }
    }
    void noise(size_t index, const Instruction &inst) {
        const std::vector<Event> *events;
        if (forced_) {
            events = &(*forced_)[index];
        } else {
            if (noiseless_) {
                return;
            }
            sample_events(rng_, inst.params[0], channel_group_count(inst), shots_, alternative_count(inst.op), scratch_);
            events = &scratch_;
        }
        for (const auto &e : *events) {
            if (e.shot >= shots_) {
                continue;
            }
            switch (inst.op) {
                case Opcode::DEPOLARIZE1:
                    apply({{inst.qubits[e.group], kAltPauli[e.alt]}}, e.shot);
                    break;
                case Opcode::DEPOLARIZE2:
                    apply({{inst.qubits[2 * e.group], kAltPauli[e.alt >> 2]},
                           {inst.qubits[2 * e.group + 1], kAltPauli[e.alt & 3]}},
                          e.shot);
                    break;
                default:
                    apply(inst.products[0], e.shot);
                    break;
            }
        }
    }

    void step(size_t index) {
        const Instruction &inst = prog_.instructions[index];
        switch (inst.op) {
            case Opcode::RZ:
                for (auto q : inst.qubits) {
                    std::fill_n(x(q), W_, 0);
                    randomize(z(q));
                }
                break;
            case Opcode::RX:
                for (auto q : inst.qubits) {
                    std::fill_n(z(q), W_, 0);
                    randomize(x(q));
                }
                break;
            case Opcode::H:
                for (auto q : inst.qubits) {
                    std::swap_ranges(x(q), x(q) + W_, z(q));
                }
                break;
            case Opcode::S:
            case Opcode::SDAG:
                for (auto q : inst.qubits) {
                    for (size_t w = 0; w < W_; w++) {
                        z(q)[w] ^= x(q)[w];
                    }
                }
                break;
            case Opcode::X:
            case Opcode::Y:
            case Opcode::Z:
            case Opcode::TICK:
                break;
            case Opcode::CX:
                for (size_t i = 0; i + 1 < inst.qubits.size(); i += 2) {
                    uint32_t c = inst.qubits[i], t = inst.qubits[i + 1];
                    for (size_t w = 0; w < W_; w++) {
                        x(t)[w] ^= x(c)[w];
                        z(c)[w] ^= z(t)[w];
                    }
                }
                break;
            case Opcode::CZ:
                for (size_t i = 0; i + 1 < inst.qubits.size(); i += 2) {
                    uint32_t a = inst.qubits[i], b = inst.qubits[i + 1];
                    for (size_t w = 0; w < W_; w++) {
                        z(a)[w] ^= x(b)[w];
                        z(b)[w] ^= x(a)[w];
                    }
                }
                break;
            case Opcode::M:
                for (auto q : inst.qubits) {
                    rec_.insert(rec_.end(), x(q), x(q) + W_);
                    randomize(z(q));
                }
                break;
            case Opcode::MX:
                for (auto q : inst.qubits) {
                    rec_.insert(rec_.end(), z(q), z(q) + W_);
                    randomize(x(q));
                }
                break;
            case Opcode::MPP:
                for (const auto &prod : inst.products) {
                    size_t base = rec_.size();
                    rec_.resize(base + W_, 0);
                    for (const auto &t : prod) {
                        for (size_t w = 0; w < W_; w++) {
                            uint64_t flip = 0;
                            if (has_x(t.axis)) {
                                flip ^= z(t.qubit)[w];
                            }
                            if (has_z(t.axis)) {
                                flip ^= x(t.qubit)[w];
                            }
                            rec_[base + w] ^= flip;
                        }
                    }
                    // The post-measurement state is stabilized by the product.
                    std::vector<uint64_t> r(W_);
                    randomize(r.data());
                    for (const auto &t : prod) {
                        for (size_t w = 0; w < W_; w++) {
                            if (has_x(t.axis)) {
                                x(t.qubit)[w] ^= r[w];
                            }
                            if (has_z(t.axis)) {
                                z(t.qubit)[w] ^= r[w];
                            }
                        }
                    }
                }
                break;
            case Opcode::DEPOLARIZE1:
            case Opcode::DEPOLARIZE2:
            case Opcode::CORRELATED_ERROR:
                noise(index, inst);
                break;
            case Opcode::COND_X:
            case Opcode::COND_Z: {
                const uint64_t *r = rec(inst.records[0]);
                uint64_t *dst = inst.op == Opcode::COND_X ? x(inst.qubits[0]) : z(inst.qubits[0]);
                for (size_t w = 0; w < W_; w++) {
                    dst[w] ^= r[w];
                }
                break;
            }
            case Opcode::DETECTOR: {
                size_t base = det_.size();
                det_.resize(base + W_, 0);
                for (auto off : inst.records) {
                    const uint64_t *r = rec(off);
                    for (size_t w = 0; w < W_; w++) {
                        det_[base + w] ^= r[w];
                    }
                }
                break;
            }
            case Opcode::OBSERVABLE: {
                size_t k = static_cast<size_t>(inst.params[0]);
                for (auto off : inst.records) {
                    const uint64_t *r = rec(off);
                    for (size_t w = 0; w < W_; w++) {
                        obs_[k * W_ + w] ^= r[w];
                    }
                }
                break;
            }
        }
    }

    const CircuitProgram &prog_;
    size_t shots_;
    size_t W_;
    Rng rng_;
    bool noiseless_;
    const std::vector<std::vector<Event>> *forced_;
    uint64_t last_mask_;
    std::vector<uint64_t> x_, z_, rec_, det_, obs_;
    std::vector<Event> scratch_;
};

constexpr size_t kBlock = 1024;

}  // namespace

size_t channel_group_count(const Instruction &inst) {
    switch (inst.op) {
        case Opcode::DEPOLARIZE1:
            return inst.qubits.size();
        case Opcode::DEPOLARIZE2:
            return inst.qubits.size() / 2;
        case Opcode::CORRELATED_ERROR:
            return 1;
        default:
            return 0;
    }
}

std::vector<PauliProduct> channel_alternatives(const Instruction &inst, size_t group) {
    std::vector<PauliProduct> out;
    switch (inst.op) {
        case Opcode::DEPOLARIZE1:
            for (int a = 1; a <= 3; a++) {
                out.push_back({{inst.qubits[group], kAltPauli[a]}});
            }
            break;
        case Opcode::DEPOLARIZE2:
            for (int a = 1; a <= 15; a++) {
                PauliProduct p;
                if (a >> 2) {
                    p.push_back({inst.qubits[2 * group], kAltPauli[a >> 2]});
                }
                if (a & 3) {
                    p.push_back({inst.qubits[2 * group + 1], kAltPauli[a & 3]});
                }
                out.push_back(std::move(p));
            }
            break;
        case Opcode::CORRELATED_ERROR:
            out.push_back(inst.products[0]);
            break;
        default:
            break;
    }
    return out;
}

ShotOutcomes sample_frames(const CircuitProgram &prog, size_t shots, uint64_t seed, const SampleOptions &options) {
    check_program(prog);
    ShotOutcomes out(shots, prog.count_detectors(), prog.count_observables());
    size_t blocks = (shots + kBlock - 1) / kBlock;
    parallel_blocks(blocks, options.threads, [&](size_t b) {
        size_t first = b * kBlock;
        size_t n = std::min(kBlock, shots - first);
        FrameBlock block(prog, n, make_rng(seed, {b}), options.noiseless, nullptr);
        block.run();
        block.write(out, first);
    });
    return out;
}

ShotOutcomes sample_frames_with_errors(const CircuitProgram &prog, const ErrorPattern &pattern, uint64_t seed) {
    check_program(prog);
    size_t shots = pattern.size();
    ShotOutcomes out(shots, prog.count_detectors(), prog.count_observables());
    for (size_t first = 0; first < shots; first += kBlock) {
        size_t n = std::min(kBlock, shots - first);
        auto events = pattern_events(pattern, first, n, prog.instructions.size());
        FrameBlock block(prog, n, make_rng(seed, {first / kBlock}), false, &events);
        block.run();
        block.write(out, first);
    }
    return out;
}

ErrorPattern sample_error_pattern(const CircuitProgram &prog, size_t shots, uint64_t seed) {
    ErrorPattern pattern(shots);
    Rng rng = make_rng(seed, {0xE77});
    std::vector<Event> events;
    for (size_t i = 0; i < prog.instructions.size(); i++) {
        const auto &inst = prog.instructions[i];
        if (!is_noise_channel(inst.op)) {
            continue;
        }
        sample_events(rng, inst.params[0], channel_group_count(inst), shots, alternative_count(inst.op), events);
        for (const auto &e : events) {
            pattern[e.shot].push_back({static_cast<uint32_t>(i), e.group, e.alt});
        }
    }
    return pattern;
}

std::vector<size_t> nondeterministic_outputs(const CircuitProgram &prog, size_t shots, uint64_t seed) {
    SampleOptions opt;
    opt.noiseless = true;
    auto res = sample_frames(prog, shots, seed, opt);
    std::vector<uint64_t> any(res.row_words, 0);
    for (size_t s = 0; s < res.shots; s++) {
        for (size_t w = 0; w < res.row_words; w++) {
            any[w] |= res.bits[s * res.row_words + w];
        }
    }
    std::vector<size_t> out;
    for (size_t d = 0; d < res.num_detectors + res.num_observables; d++) {
        if ((any[d >> 6] >> (d & 63)) & 1) {
            out.push_back(d);
        }
    }
    return out;
}

namespace {

/// Aaronson-Gottesman stabilizer tableau.
class Tableau {
   public:
    Tableau(uint32_t n, Rng &rng) : n_(n), nw_((n + 63) / 64), rows_(2 * n + 1), rng_(rng) {
        xs_.assign(rows_ * nw_, 0);
        zs_.assign(rows_ * nw_, 0);
        r_.assign(rows_, 0);
        for (uint32_t i = 0; i < n; i++) {
            setx(i, i, true);
            setz(n + i, i, true);
        }
    }

    void h(uint32_t a) {
        for (size_t i = 0; i < 2 * n_; i++) {
            bool x = gx(i, a), z = gz(i, a);
            r_[i] ^= x && z;
            setx(i, a, z);
            setz(i, a, x);
        }
    }
    void s(uint32_t a) {
        for (size_t i = 0; i < 2 * n_; i++) {
            bool x = gx(i, a), z = gz(i, a);
            r_[i] ^= x && z;
            setz(i, a, z != x);
        }
    }
    void sdag(uint32_t a) {
        s(a);
        s(a);
        s(a);
    }
    void cx(uint32_t a, uint32_t b) {
        for (size_t i = 0; i < 2 * n_; i++) {
            bool xa = gx(i, a), za = gz(i, a), xb = gx(i, b), zb = gz(i, b);
            r_[i] ^= xa && zb && (xb == za);
            setx(i, b, xb != xa);
            setz(i, a, za != zb);
        }
    }
    void cz(uint32_t a, uint32_t b) {
        h(b);
        cx(a, b);
        h(b);
    }
    void pauli(uint32_t a, Pauli p) {
        for (size_t i = 0; i < 2 * n_; i++) {
            bool flip = (has_x(p) && gz(i, a)) != (has_z(p) && gx(i, a));
            r_[i] ^= flip;
        }
    }
    bool measure(uint32_t a) {
        size_t p = 2 * n_;
        for (size_t i = n_; i < 2 * n_; i++) {
            if (gx(i, a)) {
                p = i;
                break;
            }
        }
        if (p < 2 * n_) {
            for (size_t i = 0; i < 2 * n_; i++) {
                if (i != p && gx(i, a)) {
                    rowsum(i, p);
                }
            }
            copy_row(p - n_, p);
            clear_row(p);
            bool outcome = rng_() & 1;
            r_[p] = outcome;
            setz(p, a, true);
            return outcome;
        }
        size_t scratch = 2 * n_;
        clear_row(scratch);
        for (size_t i = 0; i < n_; i++) {
            if (gx(i, a)) {
                rowsum(scratch, i + n_);
            }
        }
        return r_[scratch];
    }
    void reset(uint32_t a) {
        if (measure(a)) {
            pauli(a, Pauli::X);
        }
    }

   private:
    bool gx(size_t row, uint32_t q) const { return (xs_[row * nw_ + (q >> 6)] >> (q & 63)) & 1; }
    bool gz(size_t row, uint32_t q) const { return (zs_[row * nw_ + (q >> 6)] >> (q & 63)) & 1; }
    void setx(size_t row, uint32_t q, bool v) { setbit(xs_, row, q, v); }
    void setz(size_t row, uint32_t q, bool v) { setbit(zs_, row, q, v); }
    void setbit(std::vector<uint64_t> &a, size_t row, uint32_t q, bool v) {
        uint64_t &w = a[row * nw_ + (q >> 6)];
        uint64_t m = uint64_t{1} << (q & 63);
        w = v ? (w | m) : (w & ~m);
    }
    void copy_row(size_t dst, size_t src) {
        std::copy_n(&xs_[src * nw_], nw_, &xs_[dst * nw_]);
        std::copy_n(&zs_[src * nw_], nw_, &zs_[dst * nw_]);
        r_[dst] = r_[src];
    }
    void clear_row(size_t row) {
        std::fill_n(&xs_[row * nw_], nw_, 0);
        std::fill_n(&zs_[row * nw_], nw_, 0);
        r_[row] = 0;
    }
    static int g(bool x1, bool z1, bool x2, bool z2) {
        if (!x1 && !z1) {
            return 0;
        }
        if (x1 && z1) {
            return static_cast<int>(z2) - static_cast<int>(x2);
        }
        if (x1) {
            return static_cast<int>(z2) * (2 * static_cast<int>(x2) - 1);
        }
        return static_cast<int>(x2) * (1 - 2 * static_cast<int>(z2));
    }
    void rowsum(size_t h, size_t i) {
        int phase = 2 * r_[h] + 2 * r_[i];
        for (uint32_t q = 0; q < n_; q++) {
            phase += g(gx(i, q), gz(i, q), gx(h, q), gz(h, q));
        }
        phase = ((phase % 4) + 4) % 4;
        r_[h] = phase == 2;
        for (size_t w = 0; w < nw_; w++) {
            xs_[h * nw_ + w] ^= xs_[i * nw_ + w];
            zs_[h * nw_ + w] ^= zs_[i * nw_ + w];
        }
    }

    uint32_t n_;
    size_t nw_;
    size_t rows_;
    Rng &rng_;
    std::vector<uint64_t> xs_, zs_;
    std::vector<uint8_t> r_;
};

/// Runs the program once; returns detector bits followed by observable bits.
std::vector<uint8_t> tableau_run(const CircuitProgram &prog, Rng &rng, const std::vector<InjectedError> *forced,
                                 bool noiseless) {
    Tableau t(prog.qubit_count, rng);
    std::vector<uint8_t> rec;
    std::vector<uint8_t> det;
    std::vector<uint8_t> obs(prog.count_observables(), 0);
    std::vector<std::vector<std::pair<uint32_t, uint8_t>>> forced_at;
    if (forced) {
        forced_at.resize(prog.instructions.size());
        for (const auto &e : *forced) {
            forced_at.at(e.instruction).push_back({e.group, e.alternative});
        }
    }
    auto apply_alt = [&](const Instruction &inst, uint32_t group, uint8_t alt) {
        auto alts = channel_alternatives(inst, group);
        for (const auto &term : alts.at(alt - 1)) {
            t.pauli(term.qubit, term.axis);
        }
    };
    for (size_t i = 0; i < prog.instructions.size(); i++) {
        const auto &inst = prog.instructions[i];
        switch (inst.op) {
            case Opcode::RZ:
                for (auto q : inst.qubits) {
                    t.reset(q);
                }
                break;
            case Opcode::RX:
                for (auto q : inst.qubits) {
                    t.reset(q);
                    t.h(q);
                }
                break;
            case Opcode::H:
                for (auto q : inst.qubits) {
                    t.h(q);
                }
                break;
            case Opcode::S:
                for (auto q : inst.qubits) {
                    t.s(q);
                }
                break;
            case Opcode::SDAG:
                for (auto q : inst.qubits) {
                    t.sdag(q);
                }
                break;
            case Opcode::X:
            case Opcode::Y:
            case Opcode::Z: {
                Pauli p = inst.op == Opcode::X ? Pauli::X : inst.op == Opcode::Y ? Pauli::Y : Pauli::Z;
                for (auto q : inst.qubits) {
                    t.pauli(q, p);
                }
                break;
            }
            case Opcode::CX:
                for (size_t k = 0; k + 1 < inst.qubits.size(); k += 2) {
                    t.cx(inst.qubits[k], inst.qubits[k + 1]);
                }
                break;
            case Opcode::CZ:
                for (size_t k = 0; k + 1 < inst.qubits.size(); k += 2) {
                    t.cz(inst.qubits[k], inst.qubits[k + 1]);
                }
                break;
            case Opcode::M:
                for (auto q : inst.qubits) {
                    rec.push_back(t.measure(q));
                }
                break;
            case Opcode::MX:
                for (auto q : inst.qubits) {
                    t.h(q);
                    rec.push_back(t.measure(q));
                    t.h(q);
                }
                break;
            case Opcode::MPP:
                for (const auto &prod : inst.products) {
                    auto rotate = [&](bool undo) {
                        for (const auto &term : prod) {
                            if (term.axis == Pauli::X) {
                                t.h(term.qubit);
                            } else if (term.axis == Pauli::Y) {
                                if (undo) {
                                    t.h(term.qubit);
                                    t.s(term.qubit);
                                } else {
                                    t.sdag(term.qubit);
                                    t.h(term.qubit);
                                }
                            }
                        }
                    };
                    uint32_t last = prod.back().qubit;
                    rotate(false);
                    for (size_t k = 0; k + 1 < prod.size(); k++) {
                        t.cx(prod[k].qubit, last);
                    }
                    rec.push_back(t.measure(last));
                    for (size_t k = 0; k + 1 < prod.size(); k++) {
                        t.cx(prod[k].qubit, last);
                    }
                    rotate(true);
                }
                break;
            case Opcode::DEPOLARIZE1:
            case Opcode::DEPOLARIZE2:
            case Opcode::CORRELATED_ERROR:
                if (forced) {
                    for (auto [group, alt] : forced_at[i]) {
                        apply_alt(inst, group, alt);
                    }
                } else if (!noiseless) {
                    size_t groups = channel_group_count(inst);
                    uint8_t alts = alternative_count(inst.op);
                    for (size_t g = 0; g < groups; g++) {
                        if (uniform01(rng) < inst.params[0]) {
                            apply_alt(inst, static_cast<uint32_t>(g), static_cast<uint8_t>(1 + rng() % alts));
                        }
                    }
                }
                break;
            case Opcode::COND_X:
            case Opcode::COND_Z:
                if (rec[rec.size() + inst.records[0]]) {
                    t.pauli(inst.qubits[0], inst.op == Opcode::COND_X ? Pauli::X : Pauli::Z);
                }
                break;
            case Opcode::DETECTOR: {
                uint8_t v = 0;
                for (auto off : inst.records) {
                    v ^= rec[rec.size() + off];
                }
                det.push_back(v);
                break;
            }
            case Opcode::OBSERVABLE: {
                auto k = static_cast<size_t>(inst.params[0]);
                for (auto off : inst.records) {
                    obs[k] ^= rec[rec.size() + off];
                }
                break;
            }
            case Opcode::TICK:
                break;
        }
    }
    det.insert(det.end(), obs.begin(), obs.end());
    return det;
}

}  // namespace

ShotOutcomes stabilizer_oracle_sample(const CircuitProgram &prog, size_t shots, uint64_t seed,
                                      const ErrorPattern *injected) {
    check_program(prog);
    if (injected && injected->size() != shots) {
        throw SimError("error pattern size does not match the shot count");
    }
    Rng ref_rng = make_rng(seed, {0});
    auto reference = tableau_run(prog, ref_rng, nullptr, true);
    ShotOutcomes out(shots, prog.count_detectors(), prog.count_observables());
    for (size_t s = 0; s < shots; s++) {
        Rng rng = make_rng(seed, {1, s});
        auto bits = tableau_run(prog, rng, injected ? &(*injected)[s] : nullptr, false);
        for (size_t d = 0; d < bits.size(); d++) {
            if (bits[d] != reference[d]) {
                out.set_detector(s, d, true);
            }
        }
    }
    return out;
}

Symptom propagate_pauli(const CircuitProgram &prog, size_t index, const PauliProduct &error) {
    std::vector<uint8_t> x(prog.qubit_count, 0), z(prog.qubit_count, 0);
    for (const auto &t : error) {
        x.at(t.qubit) ^= has_x(t.axis);
        z.at(t.qubit) ^= has_z(t.axis);
    }
    std::vector<uint8_t> rec;
    for (size_t i = 0; i <= index && i < prog.instructions.size(); i++) {
        rec.resize(rec.size() + prog.instructions[i].measurement_count(), 0);
    }
    Symptom out;
    uint32_t det_index = 0;
    for (size_t i = 0; i <= index && i < prog.instructions.size(); i++) {
        if (prog.instructions[i].op == Opcode::DETECTOR) {
            det_index++;
        }
    }
    for (size_t i = index + 1; i < prog.instructions.size(); i++) {
        const auto &inst = prog.instructions[i];
        switch (inst.op) {
            case Opcode::RZ:
            case Opcode::RX:
                for (auto q : inst.qubits) {
                    x[q] = z[q] = 0;
                }
                break;
            case Opcode::H:
                for (auto q : inst.qubits) {
                    std::swap(x[q], z[q]);
                }
                break;
            case Opcode::S:
            case Opcode::SDAG:
                for (auto q : inst.qubits) {
                    z[q] ^= x[q];
                }
                break;
            case Opcode::CX:
                for (size_t k = 0; k + 1 < inst.qubits.size(); k += 2) {
                    x[inst.qubits[k + 1]] ^= x[inst.qubits[k]];
                    z[inst.qubits[k]] ^= z[inst.qubits[k + 1]];
                }
                break;
            case Opcode::CZ:
                for (size_t k = 0; k + 1 < inst.qubits.size(); k += 2) {
                    z[inst.qubits[k]] ^= x[inst.qubits[k + 1]];
                    z[inst.qubits[k + 1]] ^= x[inst.qubits[k]];
                }
                break;
            case Opcode::M:
                for (auto q : inst.qubits) {
                    rec.push_back(x[q]);
                    z[q] = 0;
                }
                break;
            case Opcode::MX:
                for (auto q : inst.qubits) {
                    rec.push_back(z[q]);
                    x[q] = 0;
                }
                break;
            case Opcode::MPP:
                for (const auto &prod : inst.products) {
                    uint8_t v = 0;
                    for (const auto &t : prod) {
                        v ^= (has_x(t.axis) && z[t.qubit]) != (has_z(t.axis) && x[t.qubit]);
                    }
                    rec.push_back(v);
                }
                break;
            case Opcode::COND_X:
                x[inst.qubits[0]] ^= rec[rec.size() + inst.records[0]];
                break;
            case Opcode::COND_Z:
                z[inst.qubits[0]] ^= rec[rec.size() + inst.records[0]];
                break;
            case Opcode::DETECTOR: {
                uint8_t v = 0;
                for (auto off : inst.records) {
                    v ^= rec[rec.size() + off];
                }
                if (v) {
                    out.detectors.push_back(det_index);
                }
                det_index++;
                break;
            }
            case Opcode::OBSERVABLE: {
                uint8_t v = 0;
                for (auto off : inst.records) {
                    v ^= rec[rec.size() + off];
                }
                if (v) {
                    out.observables ^= uint64_t{1} << static_cast<size_t>(inst.params[0]);
                }
                break;
            }
            default:
                break;
        }
    }
    return out;
}

void write_outcomes(std::ostream &out, const ShotOutcomes &o) {
    out << "DQEC_OUTCOMES v1 shots=" << o.shots << " detectors=" << o.num_detectors
        << " observables=" << o.num_observables << "\n";
    size_t nbits = o.num_detectors + o.num_observables;
    size_t nbytes = (nbits + 7) / 8;
    std::string row(nbytes, '\0');
    for (size_t s = 0; s < o.shots; s++) {
        std::fill(row.begin(), row.end(), '\0');
        for (size_t b = 0; b < nbytes; b++) {
            uint64_t w = o.bits[s * o.row_words + b / 8];
            row[b] = static_cast<char>((w >> (8 * (b % 8))) & 0xFF);
        }
        out.write(row.data(), static_cast<std::streamsize>(nbytes));
    }
}

ShotOutcomes read_outcomes(std::istream &in) {
    std::string header;
    if (!std::getline(in, header)) {
        throw SimError("missing outcome header");
    }
    std::istringstream hs(header);
    std::string magic, version, a, b, c;
    hs >> magic >> version >> a >> b >> c;
    auto field = [](const std::string &tok, const std::string &name) -> size_t {
        if (tok.rfind(name + "=", 0) != 0) {
            throw SimError("bad outcome header field: " + tok);
        }
        return std::stoull(tok.substr(name.size() + 1));
    };
    if (magic != "DQEC_OUTCOMES" || version != "v1") {
        throw SimError("not a dqec outcome file");
    }
    ShotOutcomes o(field(a, "shots"), field(b, "detectors"), field(c, "observables"));
    size_t nbytes = (o.num_detectors + o.num_observables + 7) / 8;
    std::string row(nbytes, '\0');
    for (size_t s = 0; s < o.shots; s++) {
        if (!in.read(row.data(), static_cast<std::streamsize>(nbytes))) {
            throw SimError("truncated outcome file");
        }
        for (size_t bi = 0; bi < nbytes; bi++) {
            o.bits[s * o.row_words + bi / 8] |= uint64_t{static_cast<uint8_t>(row[bi])} << (8 * (bi % 8));
        }
    }
    return o;
}

}  // namespace dqec
