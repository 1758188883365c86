#ifndef RSAVG_TESTS_SUPPORT_HPP
#define RSAVG_TESTS_SUPPORT_HPP

#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rsavg/arith.hpp"
#include "rsavg/newform.hpp"

namespace testing {

// Cremona 11a1, 14a1, 17a1
inline const char* const kCurve11 = "0,-1,1,-10,-20";
inline const char* const kCurve14 = "1,0,1,4,-6";
inline const char* const kCurve17 = "1,-1,1,-1,-14";

inline const char* curve_for_level(rsavg::i64 N) {
  switch (N) {
    case 11: return kCurve11;
    case 14: return kCurve14;
    case 17: return kCurve17;
    default: return nullptr;
  }
}

inline std::string cache_path(rsavg::i64 N) {
  std::filesystem::create_directories(RSAVG_CACHE_DIR);
  return std::string(RSAVG_CACHE_DIR) + "/level" + std::to_string(N) + ".seeds";
}

// Coefficient table for one of the test curves, memoized by (level, length).
inline const rsavg::NewformTable& table(rsavg::i64 N, std::uint64_t n_max) {
  static std::map<std::pair<rsavg::i64, std::uint64_t>, std::unique_ptr<rsavg::NewformTable>> memo;
  auto& slot = memo[{N, n_max}];
  if (!slot) {
    auto E = rsavg::WeierstrassCurve::parse(curve_for_level(N));
    auto seeds = rsavg::cached_seeds(E, n_max, cache_path(N));
    slot = std::make_unique<rsavg::NewformTable>(rsavg::build_table(seeds, n_max));
  }
  return *slot;
}

// a_n of the curve by multiplicativity from point counts alone
inline std::vector<double> curve_coefficients(const char* curve, rsavg::i64 N, int n_max) {
  auto E = rsavg::WeierstrassCurve::parse(curve);
  std::vector<double> a(n_max + 1, 0.0);
  std::map<rsavg::i64, rsavg::i64> ap;
  if (n_max >= 1) a[1] = 1.0;
  for (int n = 2; n <= n_max; ++n) {
    double v = 1.0;
    for (auto [p, e] : rsavg::factorize(n)) {
      if (!ap.count(p)) ap[p] = rsavg::ap_naive(E, p);
      const double A = static_cast<double>(ap[p]);
      double prev = 1.0, cur = A;
      for (int j = 1; j < e; ++j) {
        double next = N % p == 0 ? A * cur : A * cur - static_cast<double>(p) * prev;
        prev = cur;
        cur = next;
      }
      v *= cur;
    }
    a[n] = v;
  }
  return a;
}

}  // namespace testing

#endif
