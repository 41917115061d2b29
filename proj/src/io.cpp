#include "feedcap/io.hpp"

#include <cmath>
#include <fstream>
#include <locale>

#include "feedcap/errors.hpp"

namespace feedcap::io {

namespace {

Matrix read_square(const json& doc, const char* field) {
  if (!doc.contains(field)) throw InvalidInputError(std::string(field) + ": missing");
  const json& v = doc.at(field);
  if (!v.is_array() || v.empty()) throw InvalidInputError(std::string(field) + ": expected a nonempty array of rows");
  const auto n = v.size();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!v[i].is_array() || v[i].size() != n) {
      throw InvalidInputError(std::string(field) + ": row " + std::to_string(i) + " must have " +
                              std::to_string(n) + " entries");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!v[i][j].is_number()) throw InvalidInputError(std::string(field) + ": non-numeric entry");
      out(i, j) = v[i][j].get<double>();
    }
  }
  return out;
}

std::vector<double> read_vector(const json& doc, const char* field, std::size_t expected) {
  if (!doc.contains(field)) throw InvalidInputError(std::string(field) + ": missing");
  const json& v = doc.at(field);
  if (!v.is_array()) throw InvalidInputError(std::string(field) + ": expected an array");
  if (v.size() != expected) {
    throw InvalidInputError(std::string(field) + ": expected length " + std::to_string(expected) +
                            ", got " + std::to_string(v.size()));
  }
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw InvalidInputError(std::string(field) + ": non-numeric entry");
    out.push_back(e.get<double>());
  }
  return out;
}

double read_number(const json& doc, const char* field) {
  if (!doc.contains(field)) throw InvalidInputError(std::string(field) + ": missing");
  if (!doc.at(field).is_number()) throw InvalidInputError(std::string(field) + ": expected a number");
  return doc.at(field).get<double>();
}

json vector_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.size(); ++i) out.push_back(m.data()[i]);
  return out;
}

json schema_doc() { return json{{"schema", kSchema}}; }

}  // namespace

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

ModelSpec parse_model(const json& doc) {
  if (!doc.is_object()) throw InvalidInputError("model: expected a JSON object");
  ModelSpec spec;
  if (doc.contains("alpha") || doc.contains("beta")) {
    Arma11Params p{read_number(doc, "alpha"), read_number(doc, "beta"), read_number(doc, "P")};
    spec.model = arma11_to_statespace(p);
    spec.arma = p;
    return spec;
  }
  Matrix F = read_square(doc, "F");
  const auto m = static_cast<std::size_t>(F.rows());
  const auto g = read_vector(doc, "G", m);
  const auto h = read_vector(doc, "H", m);
  const double P = read_number(doc, "P");
  Matrix G(m, 1), H(1, m);
  for (std::size_t i = 0; i < m; ++i) {
    G(i, 0) = g[i];
    H(0, i) = h[i];
  }
  spec.model = NoiseModel::make(std::move(F), std::move(G), std::move(H), P);
  // F = -beta, G = 1, H = alpha - beta
  if (m == 1 && spec.model.G(0, 0) == 1.0) {
    Arma11Params p{spec.model.H(0, 0) - spec.model.F(0, 0), -spec.model.F(0, 0), P};
    if (std::abs(p.alpha) <= 1.0 && std::abs(p.beta) < 1.0) spec.arma = p;
  }
  return spec;
}

ModelSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("model file: cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInputError(std::string("model file: JSON parse error: ") + e.what());
  }
  return parse_model(doc);
}

json to_json(const NoiseModel& model) {
  json out = schema_doc();
  out["F"] = matrix_to_json(model.F);
  out["G"] = vector_to_json(model.G);
  out["H"] = vector_to_json(model.H);
  out["P"] = model.P;
  return out;
}

json to_json(const CapacityCertificate& c) {
  json out = schema_doc();
  out["Y"] = c.Y;
  out["C_bits"] = c.C_bits;
  out["Y_sup"] = c.Y_sup;
  out["C_sup_bits"] = c.C_sup_bits;
  out["K"] = vector_to_json(c.K);
  out["Sigma"] = matrix_to_json(c.Sigma);
  out["X"] = vector_to_json(c.X);
  out["V"] = c.V;
  out["Gamma"] = vector_to_json(c.Gamma);
  out["residual_riccati"] = c.residual_riccati;
  out["closed_loop_radius"] = c.closed_loop_radius;
  out["power_used"] = c.power_used;
  out["certified"] = c.certified;
  out["riccati_min_eig"] = c.riccati_min_eig;
  out["equality_residual"] = c.equality_residual;
  out["power_block_min_eig"] = c.power_block_min_eig;
  out["sigma_min_eig"] = c.sigma_min_eig;
  out["controllable"] = c.controllable;
  out["detectable"] = c.detectable;
  out["solver"] = {{"status", to_string(c.solver_status)},
                   {"rel_gap", c.rel_gap},
                   {"iterations", c.solver_iterations}};
  out["failures"] = c.failures;
  out["warnings"] = c.warnings;
  return out;
}

json to_json(const Arma11Capacity& a) {
  json out = schema_doc();
  out["C_bits"] = a.C_bits;
  out["r"] = a.r;
  json roots = json::array();
  for (const auto& z : a.roots) roots.push_back({{"re", z.real()}, {"im", z.imag()}});
  out["roots"] = roots;
  out["coefficients"] = a.coeffs;
  out["residual"] = a.residual;
  return out;
}

json to_json(const SimReport& r) {
  json out = schema_doc();
  out["steps"] = r.steps;
  out["Y_hat"] = r.Y_hat;
  out["power_hat"] = r.power_hat;
  out["se_Y"] = r.se_Y;
  out["se_power"] = r.se_power;
  out["lag1_autocorr"] = r.lag1_autocorr;
  out["state_cov"] = matrix_to_json(r.state_cov);
  out["state_cov_rel_err"] = r.state_cov_rel_err;
  out["seed"] = r.seed;
  out["generator"] = r.generator;
  return out;
}

json to_json(const FirStrategy& s) {
  json out = schema_doc();
  out["b"] = s.b;
  out["V"] = s.V;
  return out;
}

json to_json(const RatePower& rp) {
  json out = schema_doc();
  out["rate_bits"] = rp.rate_bits;
  out["power"] = rp.power;
  return out;
}

json to_json(const HorizonTrajectory& t) {
  json out = schema_doc();
  out["n"] = t.n;
  out["C_n"] = t.C_n;
  out["avg_power"] = t.avg_power;
  json X = json::array(), S = json::array(), G = json::array();
  for (const auto& x : t.X_seq) X.push_back(vector_to_json(x));
  for (const auto& s : t.Sigma_seq) S.push_back(matrix_to_json(s));
  for (const auto& g : t.Gamma_seq) G.push_back(vector_to_json(g));
  out["X_seq"] = X;
  out["V_seq"] = t.V_seq;
  out["Sigma_seq"] = S;
  out["Y_seq"] = t.Y_seq;
  out["Gamma_seq"] = G;
  out["power_seq"] = t.power_seq;
  return out;
}

json to_json(const SdpProblem& p) {
  json out = schema_doc();
  out["variables"] = p.var_names;
  out["objective"] = vector_to_json(p.objective);
  out["eq_A"] = matrix_to_json(p.eq_A);
  out["eq_b"] = vector_to_json(p.eq_b);
  json blocks = json::array();
  for (const auto& b : p.blocks) {
    json coeffs = json::array();
    for (const auto& c : b.coeffs) coeffs.push_back(matrix_to_json(c));
    blocks.push_back({{"name", b.name}, {"size", b.size()}, {"constant", matrix_to_json(b.constant)},
                      {"coefficients", coeffs}});
  }
  out["blocks"] = blocks;
  return out;
}

FirStrategy fir_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInputError("strategy: expected a JSON object");
  FirStrategy s;
  if (!doc.contains("b") || !doc.at("b").is_array()) throw InvalidInputError("b: expected an array");
  for (const auto& e : doc.at("b")) {
    if (!e.is_number()) throw InvalidInputError("b: non-numeric entry");
    s.b.push_back(e.get<double>());
  }
  s.V = read_number(doc, "V");
  if (!(s.V > 0.0)) throw InvalidInputError("V: must be positive");
  return s;
}

void write_trajectory_csv(std::ostream& os, const HorizonTrajectory& t) {
  os.imbue(std::locale::classic());
  const auto prec = os.precision(15);
  os << "k,Y_k,power_k,log2Y_k\n";
  for (int k = 0; k < t.n; ++k) {
    os << (k + 1) << ',' << t.Y_seq[k] << ',' << t.power_seq[k] << ',' << std::log2(t.Y_seq[k]) << '\n';
  }
  os.precision(prec);
}

}  // namespace feedcap::io
