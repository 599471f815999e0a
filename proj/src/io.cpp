#include "sle/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace sle {

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["kappa"] = kappa;
    j["mu"] = mu;
    j["rho"] = rho;
    j["p"] = p;
    j["angles"] = angles;
    j["dt"] = dt;
    j["steps"] = steps;
    j["n_paths"] = n_paths;
    j["seed"] = seed;
    j["T"] = T;
    j["out"] = out;
    return j;
}

ExperimentConfig load_config(const nlohmann::json& j, bool transience_gated) {
    static const std::set<std::string> known = {"kappa", "mu",      "rho",  "p",   "angles",
                                                "dt",    "steps",   "n_paths", "seed", "T",
                                                "out",   "paths"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) throw ConfigError("unknown config key: " + it.key());
    }
    ExperimentConfig c;
    auto get_num = [&](const char* key, double& slot) {
        if (j.contains(key)) {
            if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be numeric");
            slot = j[key].get<double>();
        }
    };
    get_num("kappa", c.kappa);
    get_num("mu", c.mu);
    get_num("dt", c.dt);
    get_num("T", c.T);
    if (j.contains("rho")) c.rho = j["rho"].get<std::vector<double>>();
    if (j.contains("angles")) c.angles = j["angles"].get<std::vector<double>>();
    if (j.contains("p")) c.p = j["p"].get<int>();
    if (j.contains("steps")) c.steps = j["steps"].get<std::int64_t>();
    if (j.contains("n_paths")) c.n_paths = j["n_paths"].get<std::int64_t>();
    if (j.contains("paths")) c.n_paths = j["paths"].get<std::int64_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();

    if (!(c.kappa > 0.0)) throw ConfigError("kappa must be positive");
    if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
    if (c.steps < 0) throw ConfigError("steps must be non-negative");
    if (c.n_paths <= 0) throw ConfigError("n_paths must be positive");
    if (c.p <= 0) throw ConfigError("p must be positive");
    if (transience_gated) {
        for (double r : c.rho) {
            if (r < 0.0) {
                throw ConfigError("rho entries must be >= 0 for transience-gated checks");
            }
        }
    }
    return c;
}

ExperimentConfig load_config_file(const std::string& path, bool transience_gated) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return load_config(j, transience_gated);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

std::string driving_record_csv(const DrivingRecord& rec) {
    std::ostringstream os;
    os << "step,time";
    if (!rec.omegas.empty()) {
        for (std::size_t j = 0; j < rec.omegas.size(); ++j) os << ",omega" << (j + 1);
    } else {
        os << ",xi";
        for (std::size_t j = 0; j < rec.force_points.size(); ++j) os << ",v" << (j + 2);
    }
    os << "\n";
    for (std::int64_t k = 0; k <= rec.steps; ++k) {
        os << k << "," << fmt(k * rec.dt);
        if (!rec.omegas.empty()) {
            for (const auto& col : rec.omegas) os << "," << fmt(col[k]);
        } else {
            os << "," << fmt(rec.xi[k]);
            for (const auto& col : rec.force_points) os << "," << fmt(col[k]);
        }
        os << "\n";
    }
    return os.str();
}

nlohmann::json driving_record_sidecar(const DrivingRecord& rec, const SleParams& par) {
    nlohmann::json j;
    j["scheme"] = rec.scheme;
    j["dt"] = rec.dt;
    j["steps"] = rec.steps;
    j["seed"] = rec.seed;
    j["kappa"] = par.kappa;
    j["mu"] = par.mu;
    j["rho"] = par.rho;
    j["p"] = par.p;
    return j;
}

std::string curve_trace_csv(const CurveTrace& tr) {
    std::ostringstream os;
    os << "curve_index,time,re,im\n";
    for (std::size_t c = 0; c < tr.points.size(); ++c) {
        for (const auto& [t, z] : tr.points[c]) {
            os << c << "," << fmt(t) << "," << fmt(z.real()) << "," << fmt(z.imag()) << "\n";
        }
    }
    return os.str();
}

}  // namespace sle
