#include "stablekit/io/report.hpp"

#include "stablekit/norms/gramians.hpp"
#include "stablekit/norms/linf.hpp"
#include "stablekit/system/decomposition.hpp"
#include "stablekit/system/spectrum.hpp"
#include "stablekit/system/weierstrass.hpp"

#include "json.hpp"

#include <cmath>
#include <limits>

namespace stablekit::io {

namespace {

nlohmann::ordered_json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::ordered_json to_json(const SystemSummary& s) {
  return {{"order", s.order},
          {"inputs", s.inputs},
          {"outputs", s.outputs},
          {"stability_class", s.stability_class},
          {"unstable_poles", s.unstable_poles},
          {"max_real_part", number(s.max_real_part)},
          {"has_infinite_eigenvalues", s.has_infinite}};
}

/// ||G||_2 of a stable standard system through the mirrored antistable system (I, -A, B, C, 0).
double h2_stable_standard(const Matrix<double>& a, const Matrix<double>& b, const Matrix<double>& c) {
  if (a.rows() == 0) return 0.0;
  const auto mirrored = System::standard(-a, b, c, Matrix<double>::Zero(c.rows(), b.cols()));
  return h2_norm_antistable(mirrored);
}

}  // namespace

SystemSummary summarize(const System& s, double axis_tol) {
  SystemSummary out;
  out.order = s.states();
  out.inputs = s.inputs();
  out.outputs = s.outputs();
  const auto rep = classify_pencil<double>(s.e(), s.a(), axis_tol);
  out.stability_class = to_string(rep.stability_class);
  out.unstable_poles = rep.unstable_count();
  out.max_real_part = rep.max_real_part();
  out.has_infinite = rep.has_infinite;
  return out;
}

ErrorNorms error_norms(const System& original, const System& approximant, double axis_tol) {
  ErrorNorms out;
  const auto grid = linf_error(original, approximant);
  out.linf = grid.max_value;
  out.linf_min = grid.min_value();
  out.linf_argmax = grid.argmax_omega;

  const System diff = direct_sum(original, negate(approximant));
  const auto at_inf = transfer_at_infinity(diff);
  const double scale = 1.0 + original.d().norm() + approximant.d().norm();
  if (!at_inf || at_inf->norm() > 1e-12 * scale) {
    out.l2 = std::numeric_limits<double>::infinity();
    return out;
  }
  const auto dec = additive_decompose(diff, axis_tol);
  double sq = 0;
  if (dec.s_minus.states() > 0) {
    const double v = h2_norm_antistable(dec.s_minus);
    sq += v * v;
  }
  if (dec.s_plus.states() > 0) {
    const auto w = weierstrass_split(dec.s_plus);
    const double v = h2_stable_standard(w.j, w.b_j, w.c_j);
    sq += v * v;
  }
  out.l2 = std::sqrt(sq);
  return out;
}

std::string to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  if (r.norm) j["norm"] = *r.norm;
  j["input"] = to_json(r.input);
  if (r.output) j["output"] = to_json(*r.output);
  if (r.sigma1) j["sigma1"] = number(*r.sigma1);
  if (r.gamma) j["gamma"] = number(*r.gamma);
  if (r.branch) j["branch"] = *r.branch;
  if (r.errors) {
    j["errors"] = {{"l2", number(r.errors->l2)},
                   {"linf", number(r.errors->linf)},
                   {"linf_profile_min", number(r.errors->linf_min)},
                   {"linf_argmax_omega", number(r.errors->linf_argmax)}};
  }
  if (r.approximant_stable) j["approximant_stable"] = *r.approximant_stable;
  j["wall_time_ms"] = r.wall_time_ms;
  return j.dump(2) + "\n";
}

}  // namespace stablekit::io
