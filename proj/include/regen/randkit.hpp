#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#if defined(__x86_64__)
#include <immintrin.h>
#endif

#include "error.hpp"

namespace regen::randkit {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t(M0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(M1) * ctr[2];
    ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
           std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

namespace philox {

inline constexpr int kPhiloxBatch = 16;

// Blocks block..block+15 of the (seed, stream) sequence, two words per block.
inline void philox_batch_scalar(std::uint64_t block, std::uint64_t stream, std::uint64_t seed, std::uint64_t* out) {
  const PhiloxKey key = {std::uint32_t(seed), std::uint32_t(seed >> 32)};
  for (int b = 0; b < kPhiloxBatch; ++b) {
    const std::uint64_t blk = block + std::uint64_t(b);
    const PhiloxCounter o = philox4x32_10(
        {std::uint32_t(blk), std::uint32_t(blk >> 32), std::uint32_t(stream), std::uint32_t(stream >> 32)}, key);
    out[2 * b] = (std::uint64_t(o[1]) << 32) | o[0];
    out[2 * b + 1] = (std::uint64_t(o[3]) << 32) | o[2];
  }
}

#if defined(__x86_64__) && defined(__GNUC__)
// Same words as philox_batch_scalar, four blocks per 256-bit lane group.
__attribute__((target("avx2"))) inline void philox_batch_avx2(std::uint64_t block, std::uint64_t stream,
                                                              std::uint64_t seed, std::uint64_t* out) {
  const __m256i lo = _mm256_set1_epi64x(0xffffffffLL);
  const __m256i m0 = _mm256_set1_epi64x(0xD2511F53LL), m1 = _mm256_set1_epi64x(0xCD9E8D57LL);
  __m256i c0[4], c1[4], c2[4], c3[4];
  for (int v = 0; v < 4; ++v) {
    const std::uint64_t b0 = block + std::uint64_t(4 * v);
    c0[v] = _mm256_set_epi64x(std::uint32_t(b0 + 3), std::uint32_t(b0 + 2), std::uint32_t(b0 + 1), std::uint32_t(b0));
    c1[v] = _mm256_set_epi64x((b0 + 3) >> 32, (b0 + 2) >> 32, (b0 + 1) >> 32, b0 >> 32);
    c2[v] = _mm256_set1_epi64x(std::uint32_t(stream));
    c3[v] = _mm256_set1_epi64x(stream >> 32);
  }
  std::uint32_t k0 = std::uint32_t(seed), k1 = std::uint32_t(seed >> 32);
  for (int round = 0; round < 10; ++round) {
    const __m256i K0 = _mm256_set1_epi64x(k0), K1 = _mm256_set1_epi64x(k1);
    for (int v = 0; v < 4; ++v) {
      const __m256i p0 = _mm256_mul_epu32(c0[v], m0);
      const __m256i p1 = _mm256_mul_epu32(c2[v], m1);
      const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), c1[v]), K0);
      const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), c3[v]), K1);
      c1[v] = _mm256_and_si256(p1, lo);
      c3[v] = _mm256_and_si256(p0, lo);
      c0[v] = n0;
      c2[v] = n2;
    }
    k0 += 0x9E3779B9u;
    k1 += 0xBB67AE85u;
  }
  for (int v = 0; v < 4; ++v) {
    alignas(32) std::uint64_t a0[4], a1[4], a2[4], a3[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(a0), c0[v]);
    _mm256_store_si256(reinterpret_cast<__m256i*>(a1), c1[v]);
    _mm256_store_si256(reinterpret_cast<__m256i*>(a2), c2[v]);
    _mm256_store_si256(reinterpret_cast<__m256i*>(a3), c3[v]);
    for (int l = 0; l < 4; ++l) {
      out[2 * (4 * v + l)] = (a1[l] << 32) | a0[l];
      out[2 * (4 * v + l) + 1] = (a3[l] << 32) | a2[l];
    }
  }
}

inline bool have_avx2() {
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok;
}
#endif

inline void philox_batch(std::uint64_t block, std::uint64_t stream, std::uint64_t seed, std::uint64_t* out) {
#if defined(__x86_64__) && defined(__GNUC__)
  if (have_avx2()) return philox_batch_avx2(block, stream, seed, out);
#endif
  philox_batch_scalar(block, stream, seed, out);
}

}  // namespace philox

// Counter-based stream. The key is the seed, the upper counter words hold the
// stream id, so distinct (seed, stream_id) pairs never share a counter block.
class RngStream {
public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    if (pos_ == 2 * philox::kPhiloxBatch) refill();
    return buf_[pos_++];
  }

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform() {
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

private:
  void refill() {
    philox::philox_batch(block_, stream_id_, seed_, buf_.data());
    block_ += philox::kPhiloxBatch;
    pos_ = 0;
  }
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2 * philox::kPhiloxBatch> buf_{};
  int pos_ = 2 * philox::kPhiloxBatch;
};

inline RngStream make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return RngStream(seed, stream_id);
}

// Stream ids for one experiment: tag in the top 16 bits, replicate below.
inline std::uint64_t substream_id(std::uint64_t tag, std::uint64_t replicate) {
  return (tag << 48) | (replicate & ((std::uint64_t(1) << 48) - 1));
}

inline double sample_exponential(RngStream& rng) { return -std::log(rng.uniform()); }

// Marsaglia polar method.
inline double sample_normal(RngStream& rng) {
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s < 1.0 && s > 0.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

// Marsaglia-Tsang; shapes below one use Gamma(shape+1) * U^(1/shape).
inline double sample_gamma(RngStream& rng, double shape) {
  detail::require_positive(shape, "gamma shape");
  double boost = 1.0;
  if (shape < 1.0) {
    boost = std::pow(rng.uniform(), 1.0 / shape);
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * boost;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * boost;
  }
}

inline double sample_beta(RngStream& rng, double p, double q) {
  detail::require_positive(p, "beta shape p");
  detail::require_positive(q, "beta shape q");
  for (;;) {
    const double g1 = sample_gamma(rng, p);
    const double g2 = sample_gamma(rng, q);
    const double s = g1 + g2;
    // Both gammas can underflow to 0 for tiny shapes; redraw.
    if (s > 0.0) {
      const double z = g1 / s;
      if (z > 0.0 && z < 1.0) return z;
    }
  }
}

struct ArrivalSequence {
  std::vector<double> gammas;
};

inline ArrivalSequence sample_gamma_arrivals(RngStream& rng, std::size_t count) {
  if (count == 0) throw ValidationError("sample_gamma_arrivals: empty sequence requested (count = 0)");
  ArrivalSequence out;
  out.gammas.reserve(count);
  double g = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    g += sample_exponential(rng);
    out.gammas.push_back(g);
  }
  return out;
}

inline constexpr std::uint64_t kMaxReturnTime = std::uint64_t(1) << 62;

// Y = ceil(U^(-1/beta)), so P(Y > n) = n^(-beta) for integers n >= 1.
inline std::uint64_t return_time_from_uniform(double u, double inv_beta) {
  const double y = std::ceil(std::exp(-std::log(u) * inv_beta));
  if (!(y < double(kMaxReturnTime))) return kMaxReturnTime;
  if (y < 2.0) return 2;
  return std::uint64_t(y);
}

// Same map u -> Y as return_time_from_uniform. A guide table over u answers
// directly whenever the formula is constant on the whole bucket (it is
// monotone in u), otherwise the formula is evaluated.
class ReturnTimeSampler {
public:
  explicit ReturnTimeSampler(double beta) : beta_(beta), inv_beta_(1.0 / beta), guide_(kBuckets + 1) {
    detail::require_unit_open(beta, "beta");
    for (std::size_t b = 0; b <= kBuckets; ++b) {
      const double u = b == 0 ? 0x1.0p-60 : double(b) / double(kBuckets);
      const std::uint64_t y = return_time_from_uniform(std::min(u, 1.0 - 0x1.0p-53), inv_beta_);
      guide_[b] = y > kMaxDirect ? 0u : std::uint32_t(y);
    }
    for (std::size_t b = 0; b < kBuckets; ++b)
      if (guide_[b] != guide_[b + 1]) guide_[b] = 0;
    guide_.pop_back();
  }

  double beta() const { return beta_; }
  double inv_beta() const { return inv_beta_; }

  std::uint64_t operator()(double u) const {
    const std::uint32_t g = guide_[std::size_t(u * double(kBuckets))];
    return g != 0 ? g : return_time_from_uniform(u, inv_beta_);
  }
  std::uint64_t operator()(RngStream& rng) const { return (*this)(rng.uniform()); }

private:
  static constexpr std::size_t kBuckets = 1u << 15;
  static constexpr std::uint64_t kMaxDirect = 1u << 30;
  double beta_;
  double inv_beta_;
  std::vector<std::uint32_t> guide_;
};

inline std::uint64_t sample_return_time(RngStream& rng, double beta) {
  detail::require_unit_open(beta, "beta");
  return return_time_from_uniform(rng.uniform(), 1.0 / beta);
}

}  // namespace regen::randkit
