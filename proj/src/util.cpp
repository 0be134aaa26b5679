#include "tradenet/util.hpp"

#include "tradenet/error.hpp"

#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>
#include <vector>

namespace tradenet {

YearRange parse_year_range(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        fail("bad_year_range", "expected A:B, got '" + std::string(text) + "'");
    }
    auto first = parse_int(text.substr(0, colon));
    auto last = parse_int(text.substr(colon + 1));
    if (!first || !last || *first > *last) {
        fail("bad_year_range", "expected A:B with A <= B, got '" + std::string(text) + "'");
    }
    return YearRange{static_cast<int>(*first), static_cast<int>(*last)};
}

std::string_view trim(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string normalize_country(std::string_view raw) {
    std::string_view t = trim(raw);
    std::string out;
    out.reserve(t.size());
    for (char c : t) {
        out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<int64_t> parse_int(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string fmt_g12(double v) {
    char buf[64];
    int n = std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf, static_cast<size_t>(n));
}

std::string fmt_fixed3(double v) {
    char buf[64];
    int n = std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf, static_cast<size_t>(n));
}

void Fnv64::update(const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = state;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    state = h;
}

uint64_t fnv64(std::string_view s) {
    Fnv64 h;
    h.update(s);
    return h.digest();
}

uint64_t hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail("io_error", "cannot open '" + path.string() + "'");
    }
    Fnv64 h;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h.update(buf.data(), static_cast<size_t>(in.gcount()));
    }
    return h.digest();
}

std::string to_hex(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf, 16);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail("io_error", "cannot open '" + path.string() + "'");
    }
    std::string out;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        out.append(buf, static_cast<size_t>(in.gcount()));
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail("io_error", "cannot write '" + tmp.string() + "'");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            fail("io_error", "short write to '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

void parallel_for(size_t count, int threads, const std::function<void(size_t)>& fn) {
    if (count == 0) return;
    size_t workers = threads > 0 ? static_cast<size_t>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace tradenet
