#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace visprob {

// Philox4x32-10 (Salmon et al., counter-based). Boost 1.74 has no
// counter-based engine, so the round function lives here.
//
// Stream layout: key = 64-bit seed; counter = (block_lo, block_hi, stream_lo,
// stream_hi). A batch of Monte-Carlo work owns one stream id, so batches are
// reproducible regardless of which thread runs them.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }

  Philox4x32(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static Block bijection(Block ctr, Key key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += W0;
      key[1] += W1;
    }
    return ctr;
  }

  result_type operator()() {
    if (used_ == 4) {
      buf_ = bijection({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                       key_);
      ++block_;
      used_ = 0;
    }
    return buf_[used_++];
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    const std::uint64_t hi = (*this)() >> 5;  // 27 bits
    const std::uint64_t lo = (*this)() >> 6;  // 26 bits
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Marsaglia polar method; the second deviate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2 * uniform() - 1;
      v = 2 * uniform() - 1;
      s = u * u + v * v;
    } while (s >= 1 || s == 0);
    const double f = std::sqrt(-2 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_{0};
  Block buf_{};
  int used_{4};
  double spare_{0};
  bool has_spare_{false};
};

// Monte-Carlo result with a 95% normal-approximation half width.
struct MCEstimate {
  double mean{0};
  double half_width_95{0};
  std::uint64_t samples{0};
  std::uint64_t seed{0};

  double sigma() const { return half_width_95 / 1.96; }
};

namespace mc {

inline constexpr std::uint64_t kBatchSize = 1u << 16;

struct Moments {
  double sum{0};
  double sum_sq{0};
  std::uint64_t n{0};
};

inline unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Runs `body(rng, count, moments)` over fixed-size batches. Batch b always uses
// stream b and the merge is in batch order, so the result does not depend on
// the thread count.
inline Moments run_batches(std::uint64_t samples, std::uint64_t seed,
                           const std::function<void(Philox4x32&, std::uint64_t, Moments&)>& body,
                           unsigned threads = default_threads()) {
  const std::uint64_t nb = (samples + kBatchSize - 1) / kBatchSize;
  std::vector<Moments> parts(nb);
  auto work = [&](std::uint64_t b) {
    Philox4x32 rng(seed, b);
    const std::uint64_t count = std::min<std::uint64_t>(kBatchSize, samples - b * kBatchSize);
    body(rng, count, parts[b]);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(nb)));
  if (threads <= 1) {
    for (std::uint64_t b = 0; b < nb; ++b) work(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::uint64_t b = t; b < nb; b += threads) work(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  Moments total;
  for (const auto& m : parts) {
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
    total.n += m.n;
  }
  return total;
}

inline MCEstimate bernoulli(const Moments& m, std::uint64_t seed) {
  MCEstimate e;
  e.samples = m.n;
  e.seed = seed;
  e.mean = m.n ? m.sum / static_cast<double>(m.n) : 0.0;
  e.half_width_95 = m.n ? 1.96 * std::sqrt(std::max(0.0, e.mean * (1 - e.mean)) / static_cast<double>(m.n)) : 0.0;
  return e;
}

inline MCEstimate general(const Moments& m, std::uint64_t seed) {
  MCEstimate e;
  e.samples = m.n;
  e.seed = seed;
  if (m.n == 0) return e;
  const double n = static_cast<double>(m.n);
  e.mean = m.sum / n;
  const double var = m.n > 1 ? std::max(0.0, (m.sum_sq - n * e.mean * e.mean) / (n - 1)) : 0.0;
  e.half_width_95 = 1.96 * std::sqrt(var / n);
  return e;
}

}  // namespace mc
}  // namespace visprob
