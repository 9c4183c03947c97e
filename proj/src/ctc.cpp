// Copyright 2026 the manuscriptor authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// File: ctc.cpp
// Purpose: CTC forward-backward (after Graves et al., ICML 2006), decoders

#include "manuscript/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "manuscript/error.hpp"
#include "manuscript/utf8.hpp"

namespace manuscript::ctc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Label of augmented-target state s: blank on even states, target symbol
// on odd states.
int state_label(const std::vector<int>& target, int s) {
    return (s % 2 == 0) ? Alphabet::blank_index : target[static_cast<std::size_t>(s / 2)];
}

void check_target(const LogitsSequence& lp, const std::vector<int>& target) {
    if (target.empty())
        throw validation_error("ctc: empty target");
    for (int c : target)
        if (c <= 0 || c >= lp.classes)
            throw validation_error("ctc: target class " + std::to_string(c) +
                                   " outside [1, " + std::to_string(lp.classes) + ")");
    const int need = min_frames(target);
    if (lp.frames < need)
        throw validation_error("ctc: infeasible target, needs " + std::to_string(need) +
                               " frames but only " + std::to_string(lp.frames) + " available");
}

} // namespace

Alphabet::Alphabet(std::u32string syms) : symbols(std::move(syms)) {
    if (symbols.empty())
        throw validation_error("Alphabet: no symbols");
    std::u32string sorted = symbols;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw validation_error("Alphabet: duplicate symbol");
}

Alphabet Alphabet::from_utf8(std::string_view utf8_symbols) {
    return Alphabet(utf8_decode(utf8_symbols));
}

bool Alphabet::contains(char32_t c) const {
    return symbols.find(c) != std::u32string::npos;
}

int Alphabet::index_of(char32_t c) const {
    const auto pos = symbols.find(c);
    if (pos == std::u32string::npos)
        throw validation_error("Alphabet: symbol '" + utf8_encode(c) + "' not present");
    return static_cast<int>(pos) + 1;
}

char32_t Alphabet::symbol_at(int cls) const {
    if (cls < 1 || cls >= class_count())
        throw validation_error("Alphabet: class " + std::to_string(cls) + " out of range");
    return symbols[static_cast<std::size_t>(cls - 1)];
}

std::vector<int> Alphabet::encode(std::string_view text) const {
    std::vector<int> out;
    for (char32_t c : utf8_decode(text)) out.push_back(index_of(c));
    return out;
}

std::string Alphabet::decode_utf8(const std::vector<int>& classes) const {
    std::string out;
    for (int c : classes) utf8_append(out, symbol_at(c));
    return out;
}

void LogitsSequence::validate(double tol) const {
    if (frames < 1 || classes < 2)
        throw validation_error("LogitsSequence: need frames >= 1 and classes >= 2");
    if (log_probs.size() != static_cast<std::size_t>(frames) * classes)
        throw validation_error("LogitsSequence: value count does not match frames x classes");
    for (int t = 0; t < frames; ++t) {
        double sum = 0.0;
        for (int c = 0; c < classes; ++c) sum += std::exp(at(t, c));
        if (std::abs(sum - 1.0) > tol)
            throw validation_error("LogitsSequence: row " + std::to_string(t) +
                                   " exponentiates to " + std::to_string(sum));
    }
}

int min_frames(const std::vector<int>& target) {
    int repeats = 0;
    for (std::size_t i = 1; i < target.size(); ++i)
        if (target[i] == target[i - 1]) ++repeats;
    return static_cast<int>(target.size()) + repeats;
}

CtcResult ctc_loss(const LogitsSequence& lp, const std::vector<int>& target) {
    check_target(lp, target);

    const int T = lp.frames;
    const int C = lp.classes;
    const int S = 2 * static_cast<int>(target.size()) + 1;
    const auto idx = [S](int t, int s) { return static_cast<std::size_t>(t) * S + s; };

    // forward
    std::vector<double> alpha(static_cast<std::size_t>(T) * S, kNegInf);
    alpha[idx(0, 0)] = lp.at(0, Alphabet::blank_index);
    alpha[idx(0, 1)] = lp.at(0, state_label(target, 1));
    for (int t = 1; t < T; ++t) {
        for (int s = 0; s < S; ++s) {
            const int label = state_label(target, s);
            double a = alpha[idx(t - 1, s)];
            if (s >= 1) a = logsumexp2(a, alpha[idx(t - 1, s - 1)]);
            if (s >= 2 && state_label(target, s - 2) != label)
                a = logsumexp2(a, alpha[idx(t - 1, s - 2)]);
            if (a != kNegInf) a += lp.at(t, label);
            alpha[idx(t, s)] = a;
        }
    }
    const double log_z = logsumexp2(alpha[idx(T - 1, S - 1)], alpha[idx(T - 1, S - 2)]);
    if (!std::isfinite(log_z))
        throw validation_error("ctc: target has zero probability under the given log-probs");

    // backward (beta includes the emission at its own frame, so the state
    // posterior is alpha + beta - emission)
    std::vector<double> beta(static_cast<std::size_t>(T) * S, kNegInf);
    beta[idx(T - 1, S - 1)] = lp.at(T - 1, Alphabet::blank_index);
    beta[idx(T - 1, S - 2)] = lp.at(T - 1, state_label(target, S - 2));
    for (int t = T - 2; t >= 0; --t) {
        for (int s = S - 1; s >= 0; --s) {
            const int label = state_label(target, s);
            double b = beta[idx(t + 1, s)];
            if (s + 1 < S) b = logsumexp2(b, beta[idx(t + 1, s + 1)]);
            if (s + 2 < S && state_label(target, s + 2) != label)
                b = logsumexp2(b, beta[idx(t + 1, s + 2)]);
            if (b != kNegInf) b += lp.at(t, label);
            beta[idx(t, s)] = b;
        }
    }

    // d loss / d lp[t][c] = -gamma_t(c), the posterior class occupancy
    CtcResult res;
    res.loss = -log_z;
    res.grad.assign(static_cast<std::size_t>(T) * C, 0.0);
    std::vector<double> acc(static_cast<std::size_t>(C));
    for (int t = 0; t < T; ++t) {
        std::fill(acc.begin(), acc.end(), kNegInf);
        for (int s = 0; s < S; ++s) {
            const int label = state_label(target, s);
            const double ab = alpha[idx(t, s)] + beta[idx(t, s)];
            if (ab == kNegInf) continue;
            acc[static_cast<std::size_t>(label)] =
                logsumexp2(acc[static_cast<std::size_t>(label)], ab);
        }
        for (int c = 0; c < C; ++c) {
            const double a = acc[static_cast<std::size_t>(c)];
            if (a == kNegInf) continue;
            res.grad[static_cast<std::size_t>(t) * C + c] = -std::exp(a - lp.at(t, c) - log_z);
        }
    }
    return res;
}

double brute_force_ctc(const LogitsSequence& lp, const std::vector<int>& target) {
    check_target(lp, target);
    const int T = lp.frames;
    const int C = lp.classes;
    double paths = 1.0;
    for (int t = 0; t < T; ++t) {
        paths *= C;
        if (paths > 1e6)
            throw validation_error("brute_force_ctc: C^T exceeds 10^6");
    }

    long double total = 0.0L;
    std::vector<int> path(static_cast<std::size_t>(T), 0);
    // odometer enumeration of all C^T paths
    while (true) {
        if (collapse(path) == target) {
            long double p = 0.0L;
            for (int t = 0; t < T; ++t)
                p += lp.at(t, path[static_cast<std::size_t>(t)]);
            total += std::exp(p);
        }
        int t = T - 1;
        while (t >= 0 && path[static_cast<std::size_t>(t)] == C - 1)
            path[static_cast<std::size_t>(t--)] = 0;
        if (t < 0) break;
        ++path[static_cast<std::size_t>(t)];
    }
    if (total <= 0.0L)
        throw validation_error("brute_force_ctc: target has zero probability");
    return -static_cast<double>(std::log(total));
}

std::vector<int> collapse(const std::vector<int>& path) {
    std::vector<int> out;
    int prev = -1;
    for (int c : path) {
        if (c != prev && c != Alphabet::blank_index) out.push_back(c);
        prev = c;
    }
    return out;
}

std::string greedy_decode(const LogitsSequence& lp, const Alphabet& alphabet) {
    std::vector<int> best(static_cast<std::size_t>(lp.frames));
    for (int t = 0; t < lp.frames; ++t) {
        int arg = 0;
        for (int c = 1; c < lp.classes; ++c)
            if (lp.at(t, c) > lp.at(t, arg)) arg = c;
        best[static_cast<std::size_t>(t)] = arg;
    }
    return alphabet.decode_utf8(collapse(best));
}

std::string beam_decode(const LogitsSequence& lp, const Alphabet& alphabet, int beam_width) {
    if (beam_width < 1)
        throw validation_error("beam_decode: beam_width must be >= 1");
    if (lp.classes != alphabet.class_count())
        throw validation_error("beam_decode: class count does not match alphabet");

    // Per prefix: log mass of paths ending in blank / ending in the final
    // symbol of the prefix. std::map keeps merging and tie-breaking
    // deterministic.
    struct Mass {
        double blank = kNegInf;
        double symbol = kNegInf;
        double total() const { return logsumexp2(blank, symbol); }
    };
    using Beams = std::map<std::vector<int>, Mass>;

    Beams beams;
    beams[{}] = Mass{0.0, kNegInf};

    for (int t = 0; t < lp.frames; ++t) {
        Beams next;
        for (const auto& [prefix, mass] : beams) {
            const double p_total = mass.total();
            // stay: emit blank
            {
                Mass& m = next[prefix];
                m.blank = logsumexp2(m.blank, p_total + lp.at(t, Alphabet::blank_index));
            }
            for (int c = 1; c < lp.classes; ++c) {
                const double p = lp.at(t, c);
                if (!prefix.empty() && prefix.back() == c) {
                    // same symbol again: merges into the prefix unless a
                    // blank separated it
                    Mass& same = next[prefix];
                    same.symbol = logsumexp2(same.symbol, mass.symbol + p);
                    std::vector<int> ext = prefix;
                    ext.push_back(c);
                    Mass& grown = next[ext];
                    grown.symbol = logsumexp2(grown.symbol, mass.blank + p);
                } else {
                    std::vector<int> ext = prefix;
                    ext.push_back(c);
                    Mass& grown = next[ext];
                    grown.symbol = logsumexp2(grown.symbol, p_total + p);
                }
            }
        }
        if (static_cast<int>(next.size()) > beam_width) {
            std::vector<std::pair<double, const std::vector<int>*>> order;
            order.reserve(next.size());
            for (const auto& [prefix, mass] : next)
                order.emplace_back(mass.total(), &prefix);
            std::stable_sort(order.begin(), order.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            Beams kept;
            for (int i = 0; i < beam_width; ++i)
                kept[*order[static_cast<std::size_t>(i)].second] =
                    next[*order[static_cast<std::size_t>(i)].second];
            beams = std::move(kept);
        } else {
            beams = std::move(next);
        }
    }

    const std::vector<int>* best = nullptr;
    double best_score = kNegInf;
    for (const auto& [prefix, mass] : beams) {
        const double score = mass.total();
        if (best == nullptr || score > best_score) {
            best = &prefix;
            best_score = score;
        }
    }
    return alphabet.decode_utf8(*best);
}

} // namespace manuscript::ctc
