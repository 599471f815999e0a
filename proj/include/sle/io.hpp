// io.hpp
// CSV/JSON persistence for records and traces, strict experiment config
#ifndef SLE_IO_HPP
#define SLE_IO_HPP

#include <string>

#include "json.hpp"
#include "sle/loewner.hpp"
#include "sle/samplers.hpp"

namespace sle {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& w) : std::runtime_error(w) {}
};

// command-specific parameter block; every numeric default is explicit so the
// emitted reports reproduce the run bit-for-bit
struct ExperimentConfig {
    double kappa = 2.0;
    double mu = 0.0;
    std::vector<double> rho;
    int p = 1;
    std::vector<double> angles;
    double dt = 1e-4;
    std::int64_t steps = 10000;
    std::int64_t n_paths = 1000;
    std::uint64_t seed = 1;
    double T = 1.0;
    std::string out;

    nlohmann::json to_json() const;
};

// parse + validate a JSON config; unknown keys are rejected, constraint
// violations name the offending field. transience_gated enforces rho >= 0.
ExperimentConfig load_config(const nlohmann::json& j, bool transience_gated);
ExperimentConfig load_config_file(const std::string& path, bool transience_gated);

void write_text_file(const std::string& path, const std::string& content);

// step,time,xi,v2..vp or step,time,omega1..omegap
std::string driving_record_csv(const DrivingRecord& rec);
nlohmann::json driving_record_sidecar(const DrivingRecord& rec, const SleParams& par);

// curve_index,time,re,im
std::string curve_trace_csv(const CurveTrace& tr);

}  // namespace sle

#endif
