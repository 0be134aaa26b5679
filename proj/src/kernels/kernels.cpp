#include "tradenet/kernels.hpp"

#include "tradenet/error.hpp"

#include <atomic>
#include <bit>
#include <cstdlib>
#include <cstring>

namespace tradenet::kernels {

// ---------------------------------------------------------------------------
// Scalar reference kernels
// ---------------------------------------------------------------------------

namespace scalar {

PairSums sums(const double* x, const double* y, size_t n) {
    double lx0 = 0, lx1 = 0, lx2 = 0, lx3 = 0;
    double ly0 = 0, ly1 = 0, ly2 = 0, ly3 = 0;
    size_t n4 = n - n % 4;
    for (size_t i = 0; i < n4; i += 4) {
        lx0 += x[i + 0];
        lx1 += x[i + 1];
        lx2 += x[i + 2];
        lx3 += x[i + 3];
        ly0 += y[i + 0];
        ly1 += y[i + 1];
        ly2 += y[i + 2];
        ly3 += y[i + 3];
    }
    PairSums s;
    s.sx = (lx0 + lx2) + (lx1 + lx3);
    s.sy = (ly0 + ly2) + (ly1 + ly3);
    for (size_t i = n4; i < n; ++i) {
        s.sx += x[i];
        s.sy += y[i];
    }
    return s;
}

CenteredMoments centered_moments(const double* x, const double* y, size_t n,
                                 double mean_x, double mean_y) {
    double xx0 = 0, xx1 = 0, xx2 = 0, xx3 = 0;
    double yy0 = 0, yy1 = 0, yy2 = 0, yy3 = 0;
    double xy0 = 0, xy1 = 0, xy2 = 0, xy3 = 0;
    size_t n4 = n - n % 4;
    for (size_t i = 0; i < n4; i += 4) {
        double dx0 = x[i + 0] - mean_x, dy0 = y[i + 0] - mean_y;
        double dx1 = x[i + 1] - mean_x, dy1 = y[i + 1] - mean_y;
        double dx2 = x[i + 2] - mean_x, dy2 = y[i + 2] - mean_y;
        double dx3 = x[i + 3] - mean_x, dy3 = y[i + 3] - mean_y;
        xx0 += dx0 * dx0;
        xx1 += dx1 * dx1;
        xx2 += dx2 * dx2;
        xx3 += dx3 * dx3;
        yy0 += dy0 * dy0;
        yy1 += dy1 * dy1;
        yy2 += dy2 * dy2;
        yy3 += dy3 * dy3;
        xy0 += dx0 * dy0;
        xy1 += dx1 * dy1;
        xy2 += dx2 * dy2;
        xy3 += dx3 * dy3;
    }
    CenteredMoments m;
    m.sxx = (xx0 + xx2) + (xx1 + xx3);
    m.syy = (yy0 + yy2) + (yy1 + yy3);
    m.sxy = (xy0 + xy2) + (xy1 + xy3);
    for (size_t i = n4; i < n; ++i) {
        double dx = x[i] - mean_x;
        double dy = y[i] - mean_y;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    return m;
}

uint64_t and_popcount(const uint64_t* a, const uint64_t* b, size_t nwords) {
    uint64_t total = 0;
    for (size_t i = 0; i < nwords; ++i) {
        total += static_cast<uint64_t>(std::popcount(a[i] & b[i]));
    }
    return total;
}

void or_accumulate(uint64_t* dst, const uint64_t* src, size_t nwords) {
    for (size_t i = 0; i < nwords; ++i) dst[i] |= src[i];
}

void andnot_inplace(uint64_t* dst, const uint64_t* mask, size_t nwords) {
    for (size_t i = 0; i < nwords; ++i) dst[i] &= ~mask[i];
}

void find_byte_offsets(const char* data, size_t len, char needle,
                       std::vector<uint32_t>& out) {
    const char* p = data;
    const char* end = data + len;
    while ((p = static_cast<const char*>(std::memchr(p, needle, static_cast<size_t>(end - p)))) != nullptr) {
        out.push_back(static_cast<uint32_t>(p - data));
        ++p;
    }
}

} // namespace scalar

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

namespace {

struct Vtable {
    PairSums (*sums)(const double*, const double*, size_t);
    CenteredMoments (*centered_moments)(const double*, const double*, size_t, double, double);
    uint64_t (*and_popcount)(const uint64_t*, const uint64_t*, size_t);
    void (*or_accumulate)(uint64_t*, const uint64_t*, size_t);
    void (*andnot_inplace)(uint64_t*, const uint64_t*, size_t);
    void (*find_byte_offsets)(const char*, size_t, char, std::vector<uint32_t>&);
    Backend backend;
};

constexpr Vtable kScalarTable = {
    &scalar::sums,
    &scalar::centered_moments,
    &scalar::and_popcount,
    &scalar::or_accumulate,
    &scalar::andnot_inplace,
    &scalar::find_byte_offsets,
    Backend::scalar,
};

#if defined(TRADENET_HAVE_AVX2)
constexpr Vtable kAvx2Table = {
    &avx2::sums,
    &avx2::centered_moments,
    &avx2::and_popcount,
    &avx2::or_accumulate,
    &avx2::andnot_inplace,
    &avx2::find_byte_offsets,
    Backend::avx2,
};
#endif

const Vtable* pick_default() {
    if (const char* env = std::getenv("TRADENET_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0) return &kScalarTable;
#if defined(TRADENET_HAVE_AVX2)
        if (std::strcmp(env, "avx2") == 0 && backend_supported(Backend::avx2)) {
            return &kAvx2Table;
        }
#endif
    }
#if defined(TRADENET_HAVE_AVX2)
    if (backend_supported(Backend::avx2)) return &kAvx2Table;
#endif
    return &kScalarTable;
}

std::atomic<const Vtable*>& active_table() {
    static std::atomic<const Vtable*> table{pick_default()};
    return table;
}

const Vtable& active() { return *active_table().load(std::memory_order_relaxed); }

} // namespace

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    }
    return "unknown";
}

bool backend_supported(Backend b) {
    switch (b) {
    case Backend::scalar:
        return true;
    case Backend::avx2:
#if defined(TRADENET_HAVE_AVX2)
        return __builtin_cpu_supports("avx2") != 0;
#else
        return false;
#endif
    }
    return false;
}

Backend active_backend() { return active().backend; }

void set_backend(Backend b) {
    if (!backend_supported(b)) {
        fail("unsupported_backend",
             std::string("backend '") + backend_name(b) + "' is not available on this CPU/build");
    }
    switch (b) {
    case Backend::scalar:
        active_table().store(&kScalarTable, std::memory_order_relaxed);
        break;
    case Backend::avx2:
#if defined(TRADENET_HAVE_AVX2)
        active_table().store(&kAvx2Table, std::memory_order_relaxed);
#endif
        break;
    }
}

PairSums sums(const double* x, const double* y, size_t n) {
    return active().sums(x, y, n);
}

CenteredMoments centered_moments(const double* x, const double* y, size_t n,
                                 double mean_x, double mean_y) {
    return active().centered_moments(x, y, n, mean_x, mean_y);
}

uint64_t and_popcount(const uint64_t* a, const uint64_t* b, size_t nwords) {
    return active().and_popcount(a, b, nwords);
}

void or_accumulate(uint64_t* dst, const uint64_t* src, size_t nwords) {
    active().or_accumulate(dst, src, nwords);
}

void andnot_inplace(uint64_t* dst, const uint64_t* mask, size_t nwords) {
    active().andnot_inplace(dst, mask, nwords);
}

void find_byte_offsets(const char* data, size_t len, char needle,
                       std::vector<uint32_t>& out) {
    active().find_byte_offsets(data, len, needle, out);
}

} // namespace tradenet::kernels
