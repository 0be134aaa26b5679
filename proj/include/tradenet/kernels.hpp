#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

// Data-parallel inner loops behind the graph metrics, the correlation math
// and the CSV scanner. Each kernel has a scalar reference implementation and
// an AVX2 variant; the active backend is picked once at runtime (cpuid,
// overridable with TRADENET_BACKEND=scalar|avx2 or set_backend()).
//
// Contract: for identical inputs every backend returns bit-identical
// results. Integer kernels are trivially exact; the floating-point kernels
// fix the association order (four stride-4 lanes reduced as
// (l0+l2)+(l1+l3), then a sequential tail) so scalar and AVX2 round
// identically. The equivalence tests assert exact equality.

namespace tradenet::kernels {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
bool backend_supported(Backend b);
Backend active_backend();
void set_backend(Backend b); // throws unsupported_backend

struct PairSums {
    double sx = 0.0;
    double sy = 0.0;
};

struct CenteredMoments {
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
};

PairSums sums(const double* x, const double* y, size_t n);
CenteredMoments centered_moments(const double* x, const double* y, size_t n,
                                 double mean_x, double mean_y);

uint64_t and_popcount(const uint64_t* a, const uint64_t* b, size_t nwords);
void or_accumulate(uint64_t* dst, const uint64_t* src, size_t nwords);   // dst |= src
void andnot_inplace(uint64_t* dst, const uint64_t* mask, size_t nwords); // dst &= ~mask

// Appends the offset of every occurrence of `needle` in [data, data+len).
// len must fit in 32 bits; callers scan bounded chunks.
void find_byte_offsets(const char* data, size_t len, char needle,
                       std::vector<uint32_t>& out);

namespace scalar {
PairSums sums(const double* x, const double* y, size_t n);
CenteredMoments centered_moments(const double* x, const double* y, size_t n,
                                 double mean_x, double mean_y);
uint64_t and_popcount(const uint64_t* a, const uint64_t* b, size_t nwords);
void or_accumulate(uint64_t* dst, const uint64_t* src, size_t nwords);
void andnot_inplace(uint64_t* dst, const uint64_t* mask, size_t nwords);
void find_byte_offsets(const char* data, size_t len, char needle,
                       std::vector<uint32_t>& out);
} // namespace scalar

#if defined(TRADENET_HAVE_AVX2)
namespace avx2 {
PairSums sums(const double* x, const double* y, size_t n);
CenteredMoments centered_moments(const double* x, const double* y, size_t n,
                                 double mean_x, double mean_y);
uint64_t and_popcount(const uint64_t* a, const uint64_t* b, size_t nwords);
void or_accumulate(uint64_t* dst, const uint64_t* src, size_t nwords);
void andnot_inplace(uint64_t* dst, const uint64_t* mask, size_t nwords);
void find_byte_offsets(const char* data, size_t len, char needle,
                       std::vector<uint32_t>& out);
} // namespace avx2
#endif

} // namespace tradenet::kernels
