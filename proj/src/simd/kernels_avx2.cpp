// Copyright 2026 The gt2fls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and
// is only entered after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "gt2fls/simd/kernels.hpp"

namespace gt2fls::simd {
namespace {

// Cephes-style double precision exp. Range reduction x = n ln2 + r with a
// two-constant ln2 split, then the rational approximation
// exp(r) = 1 + 2 r P(r^2) / (Q(r^2) - r P(r^2)).
inline __m256d exp_pd(__m256d x) {
  const __m256d kLog2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d kLn2Hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d kLn2Lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d kMaxArg = _mm256_set1_pd(709.0);
  const __m256d kMinArg = _mm256_set1_pd(-708.39);
  const __m256d kHalf = _mm256_set1_pd(0.5);
  const __m256d kOne = _mm256_set1_pd(1.0);
  const __m256d kTwo = _mm256_set1_pd(2.0);

  const __m256d underflow = _mm256_cmp_pd(x, kMinArg, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, kMinArg), kMaxArg);

  const __m256d n = _mm256_floor_pd(_mm256_fmadd_pd(x, kLog2e, kHalf));
  __m256d r = _mm256_fnmadd_pd(n, kLn2Hi, x);
  r = _mm256_fnmadd_pd(n, kLn2Lo, r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910e-1));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.00000000000000000009e0));
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(kTwo, e, kOne);

  // 2^n through the exponent field; n is within [-1022, 1023] here.
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(n32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d result = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, result);
}

// Cephes-style natural log for positive normal inputs.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mantissa_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i half_exponent = _mm256_set1_epi64x(0x3FE0000000000000LL);

  // Exponent such that x = m * 2^e with m in [0.5, 1).
  __m256i ebits = _mm256_srli_epi64(bits, 52);
  ebits = _mm256_sub_epi64(ebits, _mm256_set1_epi64x(1022));
  // int64 -> double for small magnitudes via the 1.5 * 2^52 bias trick.
  const __m256d kMagic = _mm256_set1_pd(6755399441055744.0);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_add_epi64(ebits, _mm256_castpd_si256(kMagic))), kMagic);

  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mantissa_mask), half_exponent));

  const __m256d kOne = _mm256_set1_pd(1.0);
  const __m256d below = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(below, kOne));
  m = _mm256_sub_pd(_mm256_add_pd(m, _mm256_and_pd(below, m)), kOne);

  const __m256d z = _mm256_mul_pd(m, m);
  __m256d num = _mm256_set1_pd(1.01875663804580931796e-4);
  num = _mm256_fmadd_pd(num, m, _mm256_set1_pd(4.97494994976747001425e-1));
  num = _mm256_fmadd_pd(num, m, _mm256_set1_pd(4.70579119878881725854e0));
  num = _mm256_fmadd_pd(num, m, _mm256_set1_pd(1.44989225341610930846e1));
  num = _mm256_fmadd_pd(num, m, _mm256_set1_pd(1.79368678507819816313e1));
  num = _mm256_fmadd_pd(num, m, _mm256_set1_pd(7.70838733755885391666e0));
  __m256d den = _mm256_add_pd(m, _mm256_set1_pd(1.12873587189167450590e1));
  den = _mm256_fmadd_pd(den, m, _mm256_set1_pd(4.52279145837532221105e1));
  den = _mm256_fmadd_pd(den, m, _mm256_set1_pd(8.29875266912776603211e1));
  den = _mm256_fmadd_pd(den, m, _mm256_set1_pd(7.11544750618563894466e1));
  den = _mm256_fmadd_pd(den, m, _mm256_set1_pd(2.31251620126765340583e1));

  __m256d y = _mm256_mul_pd(m, _mm256_div_pd(_mm256_mul_pd(z, num), den));
  y = _mm256_fmadd_pd(e, _mm256_set1_pd(-2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, y);
  __m256d r = _mm256_add_pd(m, y);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);
}

void gaussian_avx2(std::span<const double> x, std::span<const double> center,
                   std::span<const double> sigma, std::span<double> gamma) {
  const std::size_t n = gamma.size();
  const __m256d kMinusHalf = _mm256_set1_pd(-0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&center[i]));
    const __m256d z = _mm256_div_pd(d, _mm256_loadu_pd(&sigma[i]));
    const __m256d arg = _mm256_mul_pd(_mm256_mul_pd(kMinusHalf, z), z);
    _mm256_storeu_pd(&gamma[i], exp_pd(arg));
  }
  for (; i < n; ++i) {
    const double z = (x[i] - center[i]) / sigma[i];
    gamma[i] = std::exp(-0.5 * z * z);
  }
}

void secondary_avx2(std::span<const double> gamma, std::span<const double> sigma_l,
                    std::span<const double> sigma_r, double spread, std::span<double> lower,
                    std::span<double> upper, std::span<double> log_lower,
                    std::span<double> log_upper) {
  const std::size_t n = gamma.size();
  const __m256d s = _mm256_set1_pd(spread);
  const __m256d kOne = _mm256_set1_pd(1.0);
  const __m256d kZero = _mm256_setzero_pd();
  const __m256d kFloor = _mm256_set1_pd(kMembershipFloor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(&gamma[i]);
    // Separate mul/add keeps rounding identical to the scalar reference.
    const __m256d up =
        _mm256_min_pd(_mm256_add_pd(g, _mm256_mul_pd(s, _mm256_loadu_pd(&sigma_r[i]))), kOne);
    const __m256d lo =
        _mm256_max_pd(_mm256_sub_pd(g, _mm256_mul_pd(s, _mm256_loadu_pd(&sigma_l[i]))), kZero);
    _mm256_storeu_pd(&upper[i], up);
    _mm256_storeu_pd(&lower[i], lo);
    _mm256_storeu_pd(&log_upper[i], log_pd(_mm256_max_pd(up, kFloor)));
    _mm256_storeu_pd(&log_lower[i], log_pd(_mm256_max_pd(lo, kFloor)));
  }
  for (; i < n; ++i) {
    const double up = std::min(gamma[i] + spread * sigma_r[i], 1.0);
    const double lo = std::max(gamma[i] - spread * sigma_l[i], 0.0);
    upper[i] = up;
    lower[i] = lo;
    log_upper[i] = std::log(std::max(up, kMembershipFloor));
    log_lower[i] = std::log(std::max(lo, kMembershipFloor));
  }
}

std::size_t coverage_count_avx2(std::span<const double> y, std::span<const double> lo,
                                std::span<const double> hi) {
  const std::size_t n = y.size();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(&y[i]);
    const __m256d inside =
        _mm256_and_pd(_mm256_cmp_pd(_mm256_loadu_pd(&lo[i]), yv, _CMP_LE_OQ),
                      _mm256_cmp_pd(yv, _mm256_loadu_pd(&hi[i]), _CMP_LE_OQ));
    count += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(inside)));
  }
  for (; i < n; ++i) {
    if (lo[i] <= y[i] && y[i] <= hi[i]) ++count;
  }
  return count;
}

double horizontal_sum(__m256d v) {
  const __m128d low = _mm256_castpd256_pd128(v);
  const __m128d high = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(low, high);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double width_sum_avx2(std::span<const double> lo, std::span<const double> hi) {
  const std::size_t n = lo.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_sub_pd(_mm256_loadu_pd(&hi[i]), _mm256_loadu_pd(&lo[i])));
  }
  double sum = horizontal_sum(acc);
  for (; i < n; ++i) sum += hi[i] - lo[i];
  return sum;
}

double squared_error_sum_avx2(std::span<const double> y, std::span<const double> yhat) {
  const std::size_t n = y.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(&y[i]), _mm256_loadu_pd(&yhat[i]));
    acc = _mm256_fmadd_pd(r, r, acc);
  }
  double sum = horizontal_sum(acc);
  for (; i < n; ++i) {
    const double r = y[i] - yhat[i];
    sum += r * r;
  }
  return sum;
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Backend::kAvx2,     gaussian_avx2,
                                 secondary_avx2,     coverage_count_avx2,
                                 width_sum_avx2,     squared_error_sum_avx2};
  return table;
}

}  // namespace gt2fls::simd
