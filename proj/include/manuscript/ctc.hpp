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
// File: ctc.hpp
// Purpose: CTC loss (log-space forward-backward), decoders, path oracle

#ifndef MANUSCRIPT_CTC_HPP
#define MANUSCRIPT_CTC_HPP

#include <string>
#include <string_view>
#include <vector>

namespace manuscript::ctc {

// Class index 0 is the reserved blank; symbol i maps to class i + 1.
struct Alphabet {
    std::u32string symbols; // ordered, unique, blank excluded

    static constexpr int blank_index = 0;

    explicit Alphabet(std::u32string syms);
    static Alphabet from_utf8(std::string_view utf8_symbols);

    int class_count() const { return static_cast<int>(symbols.size()) + 1; }
    int index_of(char32_t c) const; // throws validation_error when absent
    bool contains(char32_t c) const;
    char32_t symbol_at(int cls) const; // cls in [1, class_count)

    // Target class indices of a UTF-8 string; throws naming the first
    // uncovered character.
    std::vector<int> encode(std::string_view text) const;
    std::string decode_utf8(const std::vector<int>& classes) const;
};

// T x C per-frame log-probabilities; every row must exponentiate to 1.
struct LogitsSequence {
    int frames = 0;
    int classes = 0;
    std::vector<double> log_probs; // row-major, frames x classes

    double at(int t, int c) const {
        return log_probs[static_cast<std::size_t>(t) * classes + c];
    }
    double& at(int t, int c) {
        return log_probs[static_cast<std::size_t>(t) * classes + c];
    }
    void validate(double tol = 1e-9) const;
};

// Shortest frame count that can emit the target: one frame per label plus
// one separating blank per adjacent repeat.
int min_frames(const std::vector<int>& target);

struct CtcResult {
    double loss = 0.0;              // -log P(target | log_probs)
    std::vector<double> grad;       // d loss / d log_probs, frames x classes
};

// Forward-backward over the blank-augmented target, all in log space.
// Gradient is with respect to the given log-probabilities themselves;
// composing with the log-softmax backward is the caller's business.
CtcResult ctc_loss(const LogitsSequence& lp, const std::vector<int>& target);

// Exhaustive-path oracle: sums the probability of every length-T class
// sequence whose collapse equals the target. Guarded to C^T <= 10^6.
double brute_force_ctc(const LogitsSequence& lp, const std::vector<int>& target);

// Merge adjacent repeats, then delete blanks.
std::vector<int> collapse(const std::vector<int>& path);

// Best-path decoding: collapse of the per-frame argmax.
std::string greedy_decode(const LogitsSequence& lp, const Alphabet& alphabet);

// Prefix beam search summing path probabilities per label prefix. The
// probability of the returned sequence is non-decreasing in beam_width.
std::string beam_decode(const LogitsSequence& lp, const Alphabet& alphabet, int beam_width);

} // namespace manuscript::ctc

#endif
