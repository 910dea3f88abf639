#include "dopkey/keygen.hpp"

#include "dopkey/error.hpp"

#include <charconv>
#include <cmath>

namespace dopkey {

KeyIndex quantize(double value, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("quantize: step must be positive");
    if (!(value >= 0.0) || !std::isfinite(value)) throw DomainError("quantize: value must be finite and non-negative");
    const double ratio = std::floor(value / step);
    if (ratio >= 9.0e18) throw DomainError("quantize: index does not fit in 64 bits");
    auto l = static_cast<std::uint64_t>(ratio);
    // value / step rounds; move to the cell that contains value
    while (l > 0 && static_cast<double>(l) * step > value) --l;
    while (static_cast<double>(l + 1) * step <= value) ++l;
    return {l, step};
}

int key_match(const KeyIndex& a, const KeyIndex& b) {
    if (a.step != b.step) throw UsageError("key_match: keys were quantized with different step sizes");
    return a.index == b.index ? 0 : 1;
}

KdrEstimate kdr_from_counts(std::uint64_t mismatches, std::uint64_t durations) {
    if (durations == 0) throw DomainError("empirical_kdr: no durations");
    if (mismatches > durations) throw DomainError("empirical_kdr: more mismatches than durations");
    const double d = static_cast<double>(durations);
    const double p = static_cast<double>(mismatches) / d;
    return {p, std::sqrt(p * (1.0 - p) / d), durations};
}

KdrEstimate empirical_kdr(std::span<const int> mismatches) {
    std::uint64_t count = 0;
    for (int m : mismatches) {
        if (m != 0 && m != 1) throw DomainError("empirical_kdr: indicators must be 0 or 1");
        count += static_cast<std::uint64_t>(m);
    }
    return kdr_from_counts(count, mismatches.size());
}

std::string key_hex(const KeyIndex& key) {
    char buf[17];
    const auto res = std::to_chars(buf, buf + sizeof buf, key.index, 16);
    return std::string(buf, res.ptr);
}

} // namespace dopkey
