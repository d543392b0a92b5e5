#include "stablekit/io/commands.hpp"

#include "stablekit/approx/approximate.hpp"
#include "stablekit/io/freqresp_csv.hpp"
#include "stablekit/io/report.hpp"
#include "stablekit/system/transfer.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>

namespace stablekit::io {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void require_norm(const std::string& norm) {
  if (norm != "h2" && norm != "hinf") {
    throw Error(ErrorCode::PreconditionViolated, "norm must be h2 or hinf, got '" + norm + "'");
  }
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const AxisEigenvalueError& e) {
    err << "error: " << e.what() << '\n';
    return AxisEigenvalueExit;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::SingularPencil ? SingularPencilExit : Failure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return Failure;
  }
}

}  // namespace

double default_tolerance() {
  if (const char* env = std::getenv("STABLEKIT_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0 && std::isfinite(v)) return v;
  }
  return 1e-10;
}

int cmd_approx(const ApproxCommand& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_norm(c.norm);
    const auto start = Clock::now();
    const double tol = c.tol.value_or(default_tolerance());
    const System s = read_dsys_file(c.input);

    RunReport rep;
    rep.command = "approx";
    rep.norm = c.norm;
    rep.input = summarize(s, tol);

    ApproxResult<double> res;
    if (c.norm == "h2") {
      if (c.gamma_factor) err << "warning: --gamma-factor is ignored for the h2 norm\n";
      res = solve_ap2(s, tol);
    } else {
      ApproxOptions<double> opt;
      opt.tol = tol;
      opt.axis_tol = tol;
      const auto mode = c.gamma_factor ? ApinfMode<double>::Suboptimal(*c.gamma_factor) : ApinfMode<double>::Optimal();
      res = solve_apinf(s, mode, opt);
      rep.gamma = res.gamma_used;
    }
    write_text_file(c.output, write_dsys(res.system));

    rep.sigma1 = res.sigma1;
    rep.branch = to_string(res.branch);
    rep.output = summarize(res.system, tol);
    rep.errors = error_norms(s, res.system, tol);
    rep.approximant_stable = rep.output->stability_class == to_string(StabilityClass::Stable);
    rep.wall_time_ms = elapsed_ms(start);
    out << to_json(rep);
    return int(Ok);
  });
}

int cmd_generate(const GenerateCommand& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    const System s = generate_system(c.options);
    write_text_file(c.output, write_dsys(s));
    RunReport rep;
    rep.command = "generate";
    rep.input = summarize(s, default_tolerance());
    rep.wall_time_ms = elapsed_ms(start);
    out << to_json(rep);
    return int(Ok);
  });
}

int cmd_verify(const VerifyCommand& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_norm(c.norm);
    const auto start = Clock::now();
    const double tol = c.tol.value_or(default_tolerance());
    const System orig = read_dsys_file(c.original);
    const System approx = read_dsys_file(c.approximant);
    require_dims(orig.inputs() == approx.inputs() && orig.outputs() == approx.outputs(),
                 "systems have different input/output dimensions");

    RunReport rep;
    rep.command = "verify";
    rep.norm = c.norm;
    rep.input = summarize(orig, tol);
    rep.output = summarize(approx, tol);
    rep.approximant_stable = rep.output->stability_class == to_string(StabilityClass::Stable);
    if (*rep.approximant_stable) rep.errors = error_norms(orig, approx, tol);
    rep.wall_time_ms = elapsed_ms(start);
    out << to_json(rep);
    if (!*rep.approximant_stable) {
      err << "error: approximant is not stable (" << rep.output->stability_class << ", "
          << rep.output->unstable_poles << " unstable poles)\n";
      return int(UnstableApproximant);
    }
    return int(Ok);
  });
}

int cmd_freqresp(const FreqrespCommand& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_dims(c.points >= 0, "points must be nonnegative");
    require_dims(c.wmin >= 0 && c.wmax >= c.wmin, "need 0 <= wmin <= wmax");
    const System s = read_dsys_file(c.input);
    std::vector<double> omegas;
    const bool log_spaced = c.wmin > 0;
    for (int i = 0; i < c.points; ++i) {
      const double t = c.points == 1 ? 0.0 : double(i) / (c.points - 1);
      omegas.push_back(log_spaced ? c.wmin * std::pow(c.wmax / c.wmin, t) : c.wmin + (c.wmax - c.wmin) * t);
    }
    std::vector<ComplexMatrix<double>> responses;
    responses.reserve(omegas.size());
    for (double w : omegas) responses.push_back(frequency_response(s, w));
    write_text_file(c.output, write_freqresp_csv(omegas, responses, s.outputs(), s.inputs()));
    out << "wrote " << omegas.size() << " frequencies to " << c.output << '\n';
    return int(Ok);
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stable approximation of unstable descriptor systems"};
  app.require_subcommand(1);

  ApproxCommand ac;
  double gamma_factor = 0, approx_tol = 0;
  auto* approx = app.add_subcommand("approx", "Best stable approximation in the H2 or H-infinity norm");
  approx->add_option("input", ac.input, "Input DSYS file")->required();
  approx->add_option("--norm", ac.norm, "h2 or hinf")->check(CLI::IsMember({"h2", "hinf"}));
  auto* gf = approx->add_option("--gamma-factor", gamma_factor, "Suboptimal gamma = factor * sigma1 (factor > 1)");
  auto* at = approx->add_option("--tol", approx_tol, "Numerical tolerance (default 1e-10 or STABLEKIT_TOL)");
  approx->add_option("-o,--output", ac.output, "Output DSYS file")->required();

  GenerateCommand gc;
  auto* gen = app.add_subcommand("generate", "Random system with a given number of unstable poles");
  gen->add_option("-n", gc.options.n, "Order")->required();
  gen->add_option("-u", gc.options.unstable, "Number of unstable poles")->required();
  gen->add_option("-m,--inputs", gc.options.inputs, "Number of inputs");
  gen->add_option("-p,--outputs", gc.options.outputs, "Number of outputs");
  gen->add_option("--seed", gc.options.seed, "Random seed");
  gen->add_flag("--descriptor", gc.options.descriptor, "Use an invertible random E");
  gen->add_option("-o,--output", gc.output, "Output DSYS file")->required();

  VerifyCommand vc;
  double verify_tol = 0;
  auto* ver = app.add_subcommand("verify", "Error norms between a system and an approximant");
  ver->add_option("original", vc.original, "Original DSYS file")->required();
  ver->add_option("approximant", vc.approximant, "Approximant DSYS file")->required();
  ver->add_option("--norm", vc.norm, "h2 or hinf")->check(CLI::IsMember({"h2", "hinf"}));
  auto* vt = ver->add_option("--tol", verify_tol, "Numerical tolerance");

  FreqrespCommand fc;
  auto* fr = app.add_subcommand("freqresp", "Frequency response samples as CSV");
  fr->add_option("input", fc.input, "Input DSYS file")->required();
  fr->add_option("--wmin", fc.wmin, "Lowest frequency (log spacing if positive)");
  fr->add_option("--wmax", fc.wmax, "Highest frequency");
  fr->add_option("--points", fc.points, "Number of frequencies");
  fr->add_option("-o,--output", fc.output, "Output CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return Failure;
  }

  if (*approx) {
    if (*gf) ac.gamma_factor = gamma_factor;
    if (*at) ac.tol = approx_tol;
    return cmd_approx(ac, out, err);
  }
  if (*gen) return cmd_generate(gc, out, err);
  if (*ver) {
    if (*vt) vc.tol = verify_tol;
    return cmd_verify(vc, out, err);
  }
  return cmd_freqresp(fc, out, err);
}

}  // namespace stablekit::io
