#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"

#include "feedcap/arma11_oracle.hpp"
#include "feedcap/finite_horizon.hpp"
#include "feedcap/model.hpp"
#include "feedcap/sdp_solver.hpp"
#include "feedcap/simulate.hpp"
#include "feedcap/spectral.hpp"
#include "feedcap/stationary_sdp.hpp"

namespace feedcap::io {

using json = nlohmann::json;

inline constexpr const char* kSchema = "feedcap/1";

// A model file either lists the state space
//   {"F": [[...]], "G": [...], "H": [...], "P": number}
// or an ARMA(1,1) noise {"alpha": a, "beta": b, "P": number}.
struct ModelSpec {
  NoiseModel model;
  std::optional<Arma11Params> arma;  // set for ARMA files and for m = 1, G = 1 state spaces
};

// Throws InvalidInputError whose message starts with the offending field.
ModelSpec parse_model(const json& doc);
ModelSpec load_model_file(const std::string& path);
json to_json(const NoiseModel& model);

json to_json(const CapacityCertificate& c);
json to_json(const Arma11Capacity& a);
json to_json(const SimReport& r);
json to_json(const FirStrategy& s);
json to_json(const RatePower& rp);
json to_json(const HorizonTrajectory& t);
json to_json(const SdpProblem& p);

FirStrategy fir_from_json(const json& doc);

// columns k, Y_k, power_k, log2Y_k
void write_trajectory_csv(std::ostream& os, const HorizonTrajectory& t);

json matrix_to_json(const Matrix& m);

}  // namespace feedcap::io
