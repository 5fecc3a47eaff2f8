#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "ab/tensor.hpp"

namespace ab {

// Deterministic random source. Distribution transforms are implemented here
// (not via std:: distributions) so that the stream is fully reproducible and
// the only state is the mt19937_64 engine, which round-trips through text.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}

  // uniform on [0,1) with 53-bit resolution
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller, one value per two draws; stateless beyond the engine.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  Mat normal_mat(Index rows, Index cols, double stddev = 1.0, double mean = 0.0) {
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = mean + stddev * normal();
    return m;
  }

  // index k with probability weights[k] / sum(weights)
  int categorical(const Vec& weights) {
    const double total = weights.sum();
    double u = uniform01() * total;
    for (Index k = 0; k < weights.size(); ++k) {
      u -= weights(k);
      if (u < 0.0) return static_cast<int>(k);
    }
    return static_cast<int>(weights.size() - 1);
  }

  std::uint64_t raw() { return eng_(); }

  // Derive an independent stream; mixes the label into the current state.
  Rng fork(std::uint64_t label) {
    const std::uint64_t s = raw() ^ (label * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
    return Rng(s);
  }

  std::string state() const {
    std::ostringstream os;
    os << eng_;
    return os.str();
  }

  void set_state(const std::string& s) {
    std::istringstream is(s);
    is >> eng_;
    if (!is) throw Error("bad rng state string");
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ab
