#ifndef RSAVG_TOOLS_COMMANDS_HPP
#define RSAVG_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rsavg/analytic.hpp"
#include "rsavg/arith.hpp"

namespace rsavg::cli {

inline constexpr const char* kDefaultCurve = "0,-1,1,-10,-20";

struct RunConfig {
  std::string command;
  std::string seeds_path;
  std::string curve;
  i64 disc = -7;
  int prime = 3;
  std::string alpha = "0..2";
  std::string beta = "0..2";
  std::string k = "both";
  double tol = 1e-10;
  std::string depletion = "top";
  std::string kernel = "degree2";
  std::string out;
  std::string format;
  int threads = 0;
  std::uint64_t n_cap = 1'000'000'000;
  double sym2_x = 5e4;
  // lvalue
  int rho = 0, chi = 0;
  // diag
  std::string kind = "shortsum";
  i64 b = 1;
  std::uint64_t x_max = 10'000;
  double eps_weight = 0.5, gamma_weight = 0.5;
  // verify
  std::string suite;
};

// "A" or "A..B"
std::pair<int, int> parse_range(const std::string& s, const char* name);
std::vector<int> parse_k(const std::string& s);
Kernel parse_kernel(const std::string& s);

// Exit codes: 0 ok, 1 verification failure, 2 invalid input, 3 tolerance unachievable.
int run(const RunConfig& cfg, std::ostream& out);

}  // namespace rsavg::cli

#endif
