// AVX2 variants. Compiled with -mavx2 in its own translation unit; only
// reached through the dispatch table after a cpuid check.

#include "tradenet/kernels.hpp"

#if defined(TRADENET_HAVE_AVX2)

#include <immintrin.h>

#include <bit>

namespace tradenet::kernels::avx2 {

namespace {

// (l0+l2) + (l1+l3), the same reduction order the scalar reference uses.
inline double reduce_lanes(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);   // lanes 0,1
    __m128d hi = _mm256_extractf128_pd(v, 1); // lanes 2,3
    __m128d s2 = _mm_add_pd(lo, hi);          // (l0+l2, l1+l3)
    return _mm_cvtsd_f64(s2) + _mm_cvtsd_f64(_mm_unpackhi_pd(s2, s2));
}

// Positional nibble-LUT popcount (Mula); returns four per-lane byte sums.
inline __m256i popcount256(__m256i v) {
    const __m256i lut = _mm256_setr_epi8(
        0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
        0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    __m256i lo = _mm256_and_si256(v, low_mask);
    __m256i hi = _mm256_and_si256(_mm256_srli_epi32(v, 4), low_mask);
    __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo),
                                  _mm256_shuffle_epi8(lut, hi));
    return _mm256_sad_epu8(cnt, _mm256_setzero_si256());
}

} // namespace

PairSums sums(const double* x, const double* y, size_t n) {
    __m256d ax = _mm256_setzero_pd();
    __m256d ay = _mm256_setzero_pd();
    size_t n4 = n - n % 4;
    for (size_t i = 0; i < n4; i += 4) {
        ax = _mm256_add_pd(ax, _mm256_loadu_pd(x + i));
        ay = _mm256_add_pd(ay, _mm256_loadu_pd(y + i));
    }
    PairSums s;
    s.sx = reduce_lanes(ax);
    s.sy = reduce_lanes(ay);
    for (size_t i = n4; i < n; ++i) {
        s.sx += x[i];
        s.sy += y[i];
    }
    return s;
}

CenteredMoments centered_moments(const double* x, const double* y, size_t n,
                                 double mean_x, double mean_y) {
    const __m256d mx = _mm256_set1_pd(mean_x);
    const __m256d my = _mm256_set1_pd(mean_y);
    __m256d axx = _mm256_setzero_pd();
    __m256d ayy = _mm256_setzero_pd();
    __m256d axy = _mm256_setzero_pd();
    size_t n4 = n - n % 4;
    for (size_t i = 0; i < n4; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), mx);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), my);
        axx = _mm256_add_pd(axx, _mm256_mul_pd(dx, dx));
        ayy = _mm256_add_pd(ayy, _mm256_mul_pd(dy, dy));
        axy = _mm256_add_pd(axy, _mm256_mul_pd(dx, dy));
    }
    CenteredMoments m;
    m.sxx = reduce_lanes(axx);
    m.syy = reduce_lanes(ayy);
    m.sxy = reduce_lanes(axy);
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
    __m256i acc = _mm256_setzero_si256();
    size_t n4 = nwords - nwords % 4;
    for (size_t i = 0; i < n4; i += 4) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        acc = _mm256_add_epi64(acc, popcount256(_mm256_and_si256(va, vb)));
    }
    alignas(32) uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (size_t i = n4; i < nwords; ++i) {
        total += static_cast<uint64_t>(std::popcount(a[i] & b[i]));
    }
    return total;
}

void or_accumulate(uint64_t* dst, const uint64_t* src, size_t nwords) {
    size_t n4 = nwords - nwords % 4;
    for (size_t i = 0; i < n4; i += 4) {
        __m256i vd = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
        __m256i vs = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_or_si256(vd, vs));
    }
    for (size_t i = n4; i < nwords; ++i) dst[i] |= src[i];
}

void andnot_inplace(uint64_t* dst, const uint64_t* mask, size_t nwords) {
    size_t n4 = nwords - nwords % 4;
    for (size_t i = 0; i < n4; i += 4) {
        __m256i vd = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
        __m256i vm = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(mask + i));
        // andnot computes (~first) & second
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_andnot_si256(vm, vd));
    }
    for (size_t i = n4; i < nwords; ++i) dst[i] &= ~mask[i];
}

void find_byte_offsets(const char* data, size_t len, char needle,
                       std::vector<uint32_t>& out) {
    const __m256i nv = _mm256_set1_epi8(needle);
    size_t i = 0;
    for (; i + 32 <= len; i += 32) {
        __m256i block = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
        uint32_t mask = static_cast<uint32_t>(
            _mm256_movemask_epi8(_mm256_cmpeq_epi8(block, nv)));
        while (mask != 0) {
            unsigned bit = static_cast<unsigned>(std::countr_zero(mask));
            out.push_back(static_cast<uint32_t>(i + bit));
            mask &= mask - 1;
        }
    }
    for (; i < len; ++i) {
        if (data[i] == needle) out.push_back(static_cast<uint32_t>(i));
    }
}

} // namespace tradenet::kernels::avx2

#endif // TRADENET_HAVE_AVX2
