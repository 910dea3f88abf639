#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace dopkey {

/// Quantized key: index l such that l * step <= value < (l + 1) * step.
struct KeyIndex {
    std::uint64_t index = 0;
    double step = 1.0;

    bool operator==(const KeyIndex&) const = default;
};

/// Uniform quantization floor(value / step), corrected so the half-open cell
/// [l step, (l+1) step) contains value in floating point.
KeyIndex quantize(double value, double step);

/// 1 on disagreement, 0 on agreement. Throws UsageError on differing steps.
int key_match(const KeyIndex& a, const KeyIndex& b);

struct KdrEstimate {
    double rate = 0.0;
    double std_error = 0.0;  // sqrt(p (1 - p) / D) at the empirical rate
    std::uint64_t durations = 0;
};

/// Fraction of mismatching durations.
KdrEstimate empirical_kdr(std::span<const int> mismatches);
/// Same, from an already accumulated count.
KdrEstimate kdr_from_counts(std::uint64_t mismatches, std::uint64_t durations);

/// Lowercase hexadecimal key index, no prefix.
std::string key_hex(const KeyIndex& key);

} // namespace dopkey
