#ifndef RSAVG_NEWFORM_HPP
#define RSAVG_NEWFORM_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsavg/arith.hpp"

namespace rsavg {

// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
struct WeierstrassCurve {
  i64 a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;

  static WeierstrassCurve parse(const std::string& s);  // "a1,a2,a3,a4,a6"
  __int128 discriminant() const;
  i64 c4() const;
  i64 c6() const;
  // Product of the bad primes; throws InputError on additive reduction.
  i64 semistable_conductor() const;
  std::string str() const;
};

// a_p by counting points over F_p directly; valid for every p (for bad
// multiplicative p it returns the split/nonsplit sign).
i64 ap_naive(const WeierstrassCurve& E, i64 p);
// a_p by baby-step giant-step on E and its quadratic twist; p >= 5 of good
// reduction, p < 2^31.
i64 ap_bsgs(const WeierstrassCurve& E, i64 p);
// Dispatching front end; rejects additive reduction.
i64 ap_from_curve(const WeierstrassCurve& E, i64 p);

struct Seeds {
  i64 level = 0;
  std::uint64_t bound = 0;  // every prime <= bound is present
  std::vector<std::uint32_t> primes;
  std::vector<std::int32_t> ap;

  std::int32_t ap_of(std::uint32_t p) const;  // throws if absent
  // every prime <= n is present: no prime lies in (bound, n]
  bool covers(std::uint64_t n) const;
};

Seeds seeds_from_curve(const WeierstrassCurve& E, std::uint64_t bound);
Seeds read_seeds(std::istream& in, const std::string& name = "<stream>");
Seeds read_seeds_file(const std::string& path);
void write_seeds(std::ostream& out, const Seeds& s);
// Seeds covering `bound` from a cache file next to `cache_path` if it exists
// and is deep enough, otherwise generated and written back.
Seeds cached_seeds(const WeierstrassCurve& E, std::uint64_t bound, const std::string& cache_path);

class NewformTable {
 public:
  NewformTable() = default;
  NewformTable(i64 level, std::vector<double> lambda, Seeds seeds);

  i64 level() const { return level_; }
  std::uint64_t n_max() const { return lambda_.empty() ? 0 : lambda_.size() - 1; }
  double operator[](std::uint64_t n) const { return lambda_[n]; }
  const double* data() const { return lambda_.data(); }
  const Seeds& seeds() const { return seeds_; }
  // normalized lambda(p) for a seeded prime
  double lambda_p(std::uint32_t p) const;

 private:
  i64 level_ = 0;
  std::vector<double> lambda_;
  Seeds seeds_;
};

NewformTable build_table(const Seeds& seeds, std::uint64_t n_max);

}  // namespace rsavg

#endif
