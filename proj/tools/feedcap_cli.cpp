#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <locale>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "feedcap/arma11_oracle.hpp"
#include "feedcap/errors.hpp"
#include "feedcap/finite_horizon.hpp"
#include "feedcap/io.hpp"
#include "feedcap/simulate.hpp"
#include "feedcap/spectral.hpp"
#include "feedcap/stationary_sdp.hpp"

using namespace feedcap;
using io::json;

namespace {

enum Exit : int { kOk = 0, kInputError = 1, kUncertified = 2, kAmbiguous = 3 };

int quad_points_from_env() {
  const char* env = std::getenv("FEEDCAP_QUAD_POINTS");
  if (!env || !*env) return 4096;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 256 || v > (1L << 22)) {
    throw InvalidInputError("FEEDCAP_QUAD_POINTS: expected an integer in [256, 4194304]");
  }
  return static_cast<int>(v);
}

void print(const json& doc) { std::cout << doc.dump(2) << '\n'; }

std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(12);
  os << v;
  return os.str();
}

int cmd_capacity(const std::string& path) {
  const io::ModelSpec spec = io::load_model_file(path);
  const CapacityCertificate c = solve_capacity(spec.model);
  print(io::to_json(c));
  return c.certified ? kOk : kUncertified;
}

int cmd_arma11(double alpha, double beta, double power) {
  const Arma11Params p{alpha, beta, power};
  try {
    print(io::to_json(arma11_capacity(p)));
  } catch (const OracleAmbiguityError& e) {
    json roots = json::array();
    for (const auto& z : e.roots()) roots.push_back({{"re", z.real()}, {"im", z.imag()}});
    print({{"schema", io::kSchema}, {"error", e.what()}, {"roots", roots}});
    return kAmbiguous;
  }
  return kOk;
}

struct SweepRow {
  double param = 0.0;
  std::optional<double> sdp, poly;
  bool certified = false;
  bool ambiguous = false;
  std::string error;
};

int cmd_sweep(const std::string& path, const std::string& param, double from, double to, int points,
              int threads) {
  const io::ModelSpec spec = io::load_model_file(path);
  if (param != "P" && !spec.arma) {
    throw InvalidInputError("--param: " + param + " sweeps need an ARMA(1,1) model");
  }
  if (points < 1) throw InvalidInputError("--points: must be >= 1");

  std::vector<SweepRow> rows(points);
  for (int i = 0; i < points; ++i) {
    // Snapping to 12 significant digits keeps nominal grid values (say beta = alpha) exact.
    const double raw = points == 1 ? from : from + (to - from) * i / (points - 1);
    std::istringstream is(fmt(raw));
    is.imbue(std::locale::classic());
    is >> rows[i].param;
  }
  auto work = [&](SweepRow& row) {
    try {
      NoiseModel model = spec.model;
      std::optional<Arma11Params> arma = spec.arma;
      if (param == "P") {
        model.P = row.param;
        if (arma) arma->P = row.param;
      } else {
        if (param == "alpha") arma->alpha = row.param;
        else arma->beta = row.param;
        model = arma11_to_statespace(*arma);
      }
      const CapacityCertificate c = solve_capacity(model);
      row.sdp = c.C_bits;
      row.certified = c.certified;
      if (arma) {
        try {
          row.poly = arma11_capacity(*arma).C_bits;
        } catch (const OracleAmbiguityError&) {
          row.ambiguous = true;
        }
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  const int nthreads = std::max(1, std::min(threads, points));
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < points; i += nthreads) work(rows[i]);
    });
  }
  for (auto& th : pool) th.join();

  int code = kOk;
  std::cout << "param,C_sdp_bits,C_poly_bits,gap\n";
  for (const auto& r : rows) {
    std::cout << fmt(r.param) << ',' << (r.sdp ? fmt(*r.sdp) : "") << ','
              << (r.poly ? fmt(*r.poly) : "") << ','
              << (r.sdp && r.poly ? fmt(std::abs(*r.sdp - *r.poly)) : "") << '\n';
    if (!r.error.empty()) {
      std::cerr << "sweep: " << param << "=" << fmt(r.param) << ": " << r.error << '\n';
      code = std::max<int>(code, kInputError);
    } else if (!r.certified) {
      std::cerr << "sweep: " << param << "=" << fmt(r.param) << ": uncertified\n";
      code = std::max<int>(code, kUncertified);
    }
    if (r.ambiguous) {
      std::cerr << "sweep: " << param << "=" << fmt(r.param) << ": quartic root ambiguous\n";
      code = std::max<int>(code, kAmbiguous);
    }
  }
  return code;
}

int cmd_horizon(const std::string& path, int n, int restarts, const std::string& constraint,
                std::uint64_t seed, const std::string& csv) {
  const io::ModelSpec spec = io::load_model_file(path);
  HorizonOptions opts;
  opts.restarts = restarts;
  opts.seed = seed;
  if (constraint == "average") opts.constraint = PowerConstraint::kAverage;
  else if (constraint != "per-step") throw InvalidInputError("--constraint: per-step or average");
  const HorizonResult res = optimize_horizon(spec.model, n, opts);
  json doc = io::to_json(res.best);
  doc["constraint"] = constraint;
  doc["stationarity"] = res.stationarity;
  doc["best_restart"] = res.best_restart;
  doc["restart_values"] = res.restart_values;
  print(doc);
  if (!csv.empty()) {
    std::ofstream out(csv);
    if (!out) throw InvalidInputError("--csv: cannot open " + csv);
    io::write_trajectory_csv(out, res.best);
  }
  return kOk;
}

int cmd_spectral(const std::string& path, int taps, int restarts, const std::string& strategy_file) {
  const io::ModelSpec spec = io::load_model_file(path);
  const int quad = quad_points_from_env();
  json doc{{"schema", io::kSchema}, {"quad_points", quad}};
  if (!strategy_file.empty()) {
    std::ifstream in(strategy_file);
    if (!in) throw InvalidInputError("--evaluate: cannot open " + strategy_file);
    json sdoc;
    try {
      sdoc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw InvalidInputError(std::string("--evaluate: JSON parse error: ") + e.what());
    }
    const FirStrategy s = io::fir_from_json(sdoc);
    const RatePower rp = rate_and_power(spec.model, s, quad);
    doc["strategy"] = io::to_json(s);
    doc["rate_bits"] = rp.rate_bits;
    doc["power"] = rp.power;
    doc["feasible"] = rp.power <= spec.model.P + 1e-9;
    print(doc);
    return kOk;
  }
  FirOptions opts;
  opts.restarts = restarts;
  const FirResult res = optimize_fir(spec.model, taps, quad, opts);
  doc["taps"] = taps;
  doc["strategy"] = io::to_json(res.strategy);
  doc["rate_bits"] = res.rate_bits;
  doc["power"] = res.power;
  doc["stationarity"] = res.stationarity;
  print(doc);
  return kOk;
}

int cmd_simulate(const std::string& path, long steps, std::uint64_t seed, const std::string& trace) {
  const io::ModelSpec spec = io::load_model_file(path);
  const CapacityCertificate c = solve_capacity(spec.model);
  if (!c.certified) {
    print({{"schema", io::kSchema}, {"error", "certificate not certified"}, {"failures", c.failures}});
    return kUncertified;
  }
  std::ofstream trace_out;
  SimOptions opts;
  if (!trace.empty()) {
    trace_out.open(trace);
    if (!trace_out) throw InvalidInputError("--trace: cannot open " + trace);
    trace_out.imbue(std::locale::classic());
    opts.trace = &trace_out;
  }
  const SimReport r = simulate_stationary(spec.model, c, steps, seed, opts);
  json doc = io::to_json(r);
  const double y_tol = std::max(3.0 * r.se_Y, 0.01 * c.Y);
  const double p_tol = std::max(3.0 * r.se_power, 0.01 * spec.model.P);
  const double ac_tol = 4.0 / std::sqrt(static_cast<double>(r.steps));
  doc["expected"] = {{"Y", c.Y}, {"power", c.power_used}, {"Sigma", io::matrix_to_json(c.Sigma)}};
  doc["checks"] = {{"Y", std::abs(r.Y_hat - c.Y) <= y_tol},
                   {"power", std::abs(r.power_hat - c.power_used) <= p_tol},
                   {"lag1_autocorr", std::abs(r.lag1_autocorr) <= ac_tol}};
  print(doc);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::cout.imbue(std::locale::classic());
  CLI::App app{"Feedback capacity of Gaussian channels with finite-order noise"};
  app.require_subcommand(1);

  std::string model_file;
  auto* cap = app.add_subcommand("capacity", "Solve the stationary SDP and print the certificate");
  cap->add_option("model", model_file, "Model JSON file")->required();

  double alpha = 0.0, beta = 0.0, power = 1.0;
  auto* arma = app.add_subcommand("arma11", "Closed-form ARMA(1,1) capacity");
  arma->add_option("--alpha", alpha)->required();
  arma->add_option("--beta", beta)->required();
  arma->add_option("--power", power)->required();

  std::string param = "P";
  double from = 0.0, to = 0.0;
  int points = 1;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* sweep = app.add_subcommand("sweep", "Sweep P, alpha or beta; CSV on stdout");
  sweep->add_option("model", model_file, "Model JSON file")->required();
  sweep->add_option("--param", param)->check(CLI::IsMember({"P", "alpha", "beta"}));
  sweep->add_option("--from", from)->required();
  sweep->add_option("--to", to)->required();
  sweep->add_option("--points", points)->required();
  sweep->add_option("--threads", threads);

  int n = 1, restarts = 8;
  std::string constraint = "per-step", csv;
  std::uint64_t seed = 1;
  auto* hor = app.add_subcommand("horizon", "Optimize the n-step recursion");
  hor->add_option("model", model_file, "Model JSON file")->required();
  hor->add_option("--n", n)->required();
  hor->add_option("--restarts", restarts);
  hor->add_option("--constraint", constraint)->check(CLI::IsMember({"per-step", "average"}));
  hor->add_option("--seed", seed);
  hor->add_option("--csv", csv, "Write trajectory CSV here");

  int taps = 16, fir_restarts = 4;
  std::string strategy_file;
  auto* spec = app.add_subcommand("spectral", "Optimize or evaluate an FIR feedback strategy");
  spec->add_option("model", model_file, "Model JSON file")->required();
  spec->add_option("--taps", taps);
  spec->add_option("--restarts", fir_restarts);
  spec->add_option("--evaluate", strategy_file, "Strategy JSON {\"b\": [...], \"V\": v}");

  long steps = 1000000;
  std::uint64_t sim_seed = 42;
  std::string trace;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo check of the stationary strategy");
  sim->add_option("model", model_file, "Model JSON file")->required();
  sim->add_option("--steps", steps);
  sim->add_option("--seed", sim_seed);
  sim->add_option("--trace", trace, "CSV k,x,y_tilde (at most 1e5 rows)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (*cap) return cmd_capacity(model_file);
    if (*arma) return cmd_arma11(alpha, beta, power);
    if (*sweep) return cmd_sweep(model_file, param, from, to, points, threads);
    if (*hor) return cmd_horizon(model_file, n, restarts, constraint, seed, csv);
    if (*spec) return cmd_spectral(model_file, taps, fir_restarts, strategy_file);
    if (*sim) return cmd_simulate(model_file, steps, sim_seed, trace);
  } catch (const OracleAmbiguityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAmbiguous;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
