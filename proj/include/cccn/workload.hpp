#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cccn/rng.hpp"

namespace cccn {

// Zipf(alpha) over ranks 1..n mapped to content ids 0..n-1 (id 0 most
// popular). Sampling is a binary search over the precomputed CDF.
class ZipfSampler {
 public:
  ZipfSampler(long n, double alpha) : cdf_(n) {
    double acc = 0.0;
    for (long r = 1; r <= n; ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r), alpha);
      cdf_[r - 1] = acc;
    }
    for (double& c : cdf_) c /= acc;
  }

  long sample(Rng& rng) const {
    double u = rng.uniform();
    long lo = 0, hi = static_cast<long>(cdf_.size()) - 1;
    while (lo < hi) {
      long mid = (lo + hi) / 2;
      if (cdf_[mid] < u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

 private:
  std::vector<double> cdf_;
};

// Poisson request stream for one gateway: exponential inter-arrivals at
// lambda_j^d, Zipf-popular content ids, reproducible per (seed, gateway).
class WorkloadStream {
 public:
  WorkloadStream(const ZipfSampler* zipf, double rate, std::uint64_t seed,
                 std::uint64_t gateway_stream)
      : zipf_(zipf), rate_(rate), rng_(Rng::derive(seed, 0x5741 + gateway_stream)) {}

  struct Request {
    double time;
    long content;
  };

  Request next() {
    t_ += rng_.exponential(rate_);
    return {t_, zipf_->sample(rng_)};
  }

 private:
  const ZipfSampler* zipf_;
  double rate_;
  Rng rng_;
  double t_ = 0.0;
};

}  // namespace cccn
