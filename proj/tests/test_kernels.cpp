#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "tradenet/error.hpp"
#include "tradenet/kernels.hpp"

#include <cmath>
#include <cstring>
#include <vector>

using namespace tradenet;
namespace k = tradenet::kernels;

namespace {

const std::vector<size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 13, 31, 32, 33, 64, 100, 1000, 1003};

std::vector<double> random_doubles(size_t n, testutil::Rng& rng, double scale) {
    std::vector<double> v(n);
    for (auto& x : v) x = (rng.uniform() - 0.5) * scale;
    return v;
}

std::vector<uint64_t> random_words(size_t n, testutil::Rng& rng) {
    std::vector<uint64_t> v(n);
    for (auto& x : v) x = rng.next();
    return v;
}

uint64_t naive_popcount_and(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
    uint64_t total = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        uint64_t w = a[i] & b[i];
        for (int bit = 0; bit < 64; ++bit) total += (w >> bit) & 1;
    }
    return total;
}

} // namespace

TEST_CASE("backend control") {
    k::Backend original = k::active_backend();
    CHECK(k::backend_supported(k::Backend::scalar));
    k::set_backend(k::Backend::scalar);
    CHECK(k::active_backend() == k::Backend::scalar);
    if (!k::backend_supported(k::Backend::avx2)) {
        CHECK_THROWS_AS(k::set_backend(k::Backend::avx2), Error);
    }
    k::set_backend(original);
}

TEST_CASE("scalar sums match a plain reference within tolerance") {
    testutil::Rng rng(11);
    for (size_t n : kSizes) {
        auto x = random_doubles(n, rng, 1e6);
        auto y = random_doubles(n, rng, 1e6);
        auto s = k::scalar::sums(x.data(), y.data(), n);
        long double rx = 0, ry = 0;
        for (size_t i = 0; i < n; ++i) {
            rx += x[i];
            ry += y[i];
        }
        CHECK(std::abs(s.sx - static_cast<double>(rx)) <= 1e-6);
        CHECK(std::abs(s.sy - static_cast<double>(ry)) <= 1e-6);
    }
}

TEST_CASE("scalar and_popcount matches bit-by-bit enumeration") {
    testutil::Rng rng(12);
    for (size_t n : kSizes) {
        auto a = random_words(n, rng);
        auto b = random_words(n, rng);
        CHECK(k::scalar::and_popcount(a.data(), b.data(), n) == naive_popcount_and(a, b));
    }
}

TEST_CASE("scalar or/andnot match word-by-word loops") {
    testutil::Rng rng(13);
    for (size_t n : kSizes) {
        auto dst = random_words(n, rng);
        auto src = random_words(n, rng);
        auto expected = dst;
        for (size_t i = 0; i < n; ++i) expected[i] |= src[i];
        auto got = dst;
        k::scalar::or_accumulate(got.data(), src.data(), n);
        CHECK(got == expected);

        expected = dst;
        for (size_t i = 0; i < n; ++i) expected[i] &= ~src[i];
        got = dst;
        k::scalar::andnot_inplace(got.data(), src.data(), n);
        CHECK(got == expected);
    }
}

TEST_CASE("scalar find_byte_offsets matches a naive scan") {
    testutil::Rng rng(14);
    for (size_t n : kSizes) {
        std::string data(n, '\0');
        for (auto& c : data) c = static_cast<char>('a' + rng.below(4));
        std::vector<uint32_t> expected;
        for (size_t i = 0; i < n; ++i) {
            if (data[i] == 'b') expected.push_back(static_cast<uint32_t>(i));
        }
        std::vector<uint32_t> got;
        k::scalar::find_byte_offsets(data.data(), n, 'b', got);
        CHECK(got == expected);
    }
}

#if defined(TRADENET_HAVE_AVX2)

TEST_CASE("avx2 variants are bit-identical to scalar") {
    if (!k::backend_supported(k::Backend::avx2)) {
        MESSAGE("AVX2 not available on this CPU; skipping");
        return;
    }
    testutil::Rng rng(15);
    for (size_t n : kSizes) {
        auto x = random_doubles(n, rng, 1e9);
        auto y = random_doubles(n, rng, 1e9);

        auto ss = k::scalar::sums(x.data(), y.data(), n);
        auto vs = k::avx2::sums(x.data(), y.data(), n);
        CHECK(ss.sx == vs.sx);
        CHECK(ss.sy == vs.sy);

        double mx = n ? ss.sx / static_cast<double>(n) : 0.0;
        double my = n ? ss.sy / static_cast<double>(n) : 0.0;
        auto sm = k::scalar::centered_moments(x.data(), y.data(), n, mx, my);
        auto vm = k::avx2::centered_moments(x.data(), y.data(), n, mx, my);
        CHECK(sm.sxx == vm.sxx);
        CHECK(sm.syy == vm.syy);
        CHECK(sm.sxy == vm.sxy);

        auto a = random_words(n, rng);
        auto b = random_words(n, rng);
        CHECK(k::scalar::and_popcount(a.data(), b.data(), n) ==
              k::avx2::and_popcount(a.data(), b.data(), n));

        auto d1 = a, d2 = a;
        k::scalar::or_accumulate(d1.data(), b.data(), n);
        k::avx2::or_accumulate(d2.data(), b.data(), n);
        CHECK(d1 == d2);

        d1 = a;
        d2 = a;
        k::scalar::andnot_inplace(d1.data(), b.data(), n);
        k::avx2::andnot_inplace(d2.data(), b.data(), n);
        CHECK(d1 == d2);

        std::string data(n * 7, '\0');
        for (auto& c : data) c = static_cast<char>(rng.below(256));
        std::vector<uint32_t> o1, o2;
        k::scalar::find_byte_offsets(data.data(), data.size(), ',', o1);
        k::avx2::find_byte_offsets(data.data(), data.size(), ',', o2);
        CHECK(o1 == o2);
    }
}

TEST_CASE("dispatched entry points honor the pinned backend") {
    if (!k::backend_supported(k::Backend::avx2)) {
        MESSAGE("AVX2 not available on this CPU; skipping");
        return;
    }
    k::Backend original = k::active_backend();
    std::vector<double> x = {1, 2, 3, 4, 5, 6, 7};
    std::vector<double> y = {2, 1, 4, 3, 6, 5, 8};

    k::set_backend(k::Backend::scalar);
    auto a = k::sums(x.data(), y.data(), x.size());
    k::set_backend(k::Backend::avx2);
    auto b = k::sums(x.data(), y.data(), x.size());
    CHECK(a.sx == b.sx);
    CHECK(a.sy == b.sy);
    k::set_backend(original);
}

#endif // TRADENET_HAVE_AVX2
