#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace tradenet {

struct YearRange {
    int first = 1995;
    int last = 2018;

    int span() const { return last - first + 1; }
    bool contains(int year) const { return year >= first && year <= last; }
    bool operator==(const YearRange&) const = default;
};

// Parses "A:B" (inclusive). Throws bad_year_range.
YearRange parse_year_range(std::string_view text);

// Trims ASCII whitespace and upper-cases ASCII letters.
std::string normalize_country(std::string_view raw);

std::string_view trim(std::string_view s);

std::optional<double> parse_double(std::string_view s);
std::optional<int64_t> parse_int(std::string_view s);

// 12 significant digits; the one real formatter used by every CSV emitter,
// so golden files stay byte-stable.
std::string fmt_g12(double v);
// 3 decimal places, for the correlation table.
std::string fmt_fixed3(double v);

// Compensated accumulator. Sums of same-sign trade values come out
// correctly rounded, which keeps aggregation order-invariant.
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }

    double value() const { return sum + comp; }
};

// FNV-1a 64-bit. Cache keys only; inputs are not adversarial.
struct Fnv64 {
    uint64_t state = 14695981039346656037ull;

    void update(const void* data, size_t len);
    void update(std::string_view s) { update(s.data(), s.size()); }
    uint64_t digest() const { return state; }
};

uint64_t fnv64(std::string_view s);
uint64_t hash_file(const std::filesystem::path& path); // throws io_error
std::string to_hex(uint64_t v);

std::string read_file(const std::filesystem::path& path); // throws io_error
// Write-temp-then-rename so a crashed run never leaves a half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Runs fn(0..count-1) on up to `threads` workers (0 = hardware concurrency).
void parallel_for(size_t count, int threads, const std::function<void(size_t)>& fn);

} // namespace tradenet
