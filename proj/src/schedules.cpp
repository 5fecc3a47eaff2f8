#include "ab/schedules.hpp"

#include <cmath>

#include "ab/graph.hpp"

namespace ab {

AlphaFamily alpha_family_from(const std::string& s) {
  if (s == "linear") return AlphaFamily::kLinear;
  if (s == "sigmoid") return AlphaFamily::kSigmoid;
  if (s == "x5") return AlphaFamily::kX5;
  throw Error("unknown alpha family: " + s);
}

GammaFamily gamma_family_from(const std::string& s) {
  if (s == "linear") return GammaFamily::kLinear;
  if (s == "sigmoid") return GammaFamily::kSigmoid;
  if (s == "cosine") return GammaFamily::kCosine;
  if (s == "square") return GammaFamily::kSquare;
  throw Error("unknown gamma family: " + s);
}

std::string to_string(AlphaFamily f) {
  switch (f) {
    case AlphaFamily::kLinear: return "linear";
    case AlphaFamily::kSigmoid: return "sigmoid";
    case AlphaFamily::kX5: return "x5";
  }
  return "?";
}

std::string to_string(GammaFamily f) {
  switch (f) {
    case GammaFamily::kLinear: return "linear";
    case GammaFamily::kSigmoid: return "sigmoid";
    case GammaFamily::kCosine: return "cosine";
    case GammaFamily::kSquare: return "square";
  }
  return "?";
}

void ScheduleSpec::validate() const {
  if (!(eps > 0.0 && eps < 0.1)) throw Error("schedule: eps must be in (0, 0.1)");
  if (num_iters < 2) throw Error("schedule: NumIters must be >= 2");
}

double t_of_iter(long iter, const ScheduleSpec& spec) {
  spec.validate();
  if (iter < 1 || iter > spec.num_iters) throw Error("t_of_iter: iter out of range");
  return spec.eps + static_cast<double>(iter - 1) * (1.0 - 2.0 * spec.eps) /
                        static_cast<double>(spec.num_iters - 1);
}

double alpha_at(double t, const ScheduleSpec& spec) {
  switch (spec.alpha_family) {
    case AlphaFamily::kLinear:
      return t;
    case AlphaFamily::kSigmoid:
      return (sigmoid_stable(spec.a * t + spec.b) - sigmoid_stable(spec.b)) /
             (sigmoid_stable(spec.a + spec.b) - sigmoid_stable(spec.b));
    case AlphaFamily::kX5: {
      const double u = t - 0.5;
      return 16.0 * u * u * u * u * u + 0.5;
    }
  }
  return t;
}

double gamma_at(double alpha, const ScheduleSpec& spec) {
  switch (spec.gamma_family) {
    case GammaFamily::kLinear:
      return alpha;
    case GammaFamily::kSigmoid:
      return (sigmoid_stable(spec.c * alpha + spec.d) - sigmoid_stable(spec.d)) /
             (sigmoid_stable(spec.c + spec.d) - sigmoid_stable(spec.d));
    case GammaFamily::kCosine:
      return 0.5 - 0.5 * std::cos(3.14159265358979323846 * alpha);
    case GammaFamily::kSquare:
      return 1.0 - (1.0 - alpha) * (1.0 - alpha);
  }
  return alpha;
}

}  // namespace ab
