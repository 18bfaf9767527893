#include "levyfem/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace levyfem {

namespace {

struct KeyValue {
    std::map<std::string, std::string> kv;  // "section.key" -> value

    bool has(const std::string& k) const { return kv.count(k) != 0; }

    const std::string& get(const std::string& k) const {
        auto it = kv.find(k);
        if (it == kv.end()) throw ConfigError("missing config key: " + k);
        return it->second;
    }

    double num(const std::string& k) const {
        const std::string& v = get(k);
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            while (used < v.size() && std::isspace(static_cast<unsigned char>(v[used]))) ++used;
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("config key " + k + ": not a number: '" + v + "'");
        }
    }

    double num_or(const std::string& k, double dflt) const { return has(k) ? num(k) : dflt; }

    int integer(const std::string& k) const {
        const double d = num(k);
        const int i = static_cast<int>(std::lround(d));
        if (std::abs(d - i) > 1e-12) throw ConfigError("config key " + k + ": expected integer");
        return i;
    }

    int integer_or(const std::string& k, int dflt) const { return has(k) ? integer(k) : dflt; }

    std::array<double, 2> pair(const std::string& k) const {
        std::istringstream ss(get(k));
        std::array<double, 2> out{};
        if (!(ss >> out[0])) throw ConfigError("config key " + k + ": expected two numbers");
        if (!(ss >> out[1])) out[1] = out[0];  // single value applies to both assets
        std::string rest;
        if (ss >> rest) throw ConfigError("config key " + k + ": trailing input");
        return out;
    }
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

KeyValue read_kv(std::istream& is) {
    KeyValue out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        out.kv[section.empty() ? key : section + "." + key] = val;
    }
    return out;
}

}  // namespace

PayoffKind payoff_kind_from_string(const std::string& s) {
    if (s == "basket_call") return PayoffKind::BasketCall;
    if (s == "basket_put") return PayoffKind::BasketPut;
    if (s == "worst_of_two" || s == "max_of_two_put") return PayoffKind::WorstOfTwo;
    if (s == "min_of_two_put") return PayoffKind::MinOfTwoPut;
    if (s == "polynomial") return PayoffKind::Polynomial;
    throw ConfigError("unknown payoff kind: " + s);
}

ExportFormat export_format_from_string(const std::string& s) {
    if (s == "csv") return ExportFormat::Csv;
    if (s == "json") return ExportFormat::Json;
    throw ConfigError("unknown export format: " + s);
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "cn_full") return Scheme::CrankNicolsonFull;
    if (s == "imex_cn") return Scheme::ImexCN;
    if (s == "imex_be") return Scheme::ImexBackwardEuler;
    throw ConfigError("unknown scheme: " + s);
}

RunConfig parse_config(std::istream& is) {
    const KeyValue kv = read_kv(is);
    RunConfig c;

    c.model.sigma = kv.pair("model.diffusion_volatility");
    c.model.nu = kv.pair("model.mean_jump_size");
    c.model.gamma = kv.pair("model.mean_jump_volatility");
    c.model.lambda = kv.pair("model.jump_intensity");
    c.model.rho = kv.num("model.correlation");
    c.model.r = kv.num("model.interest_rate");
    c.model.K = kv.num("model.strike");
    c.model.T = kv.num("model.maturity");
    if (kv.has("model.weights")) c.model.w = kv.pair("model.weights");

    c.kind = payoff_kind_from_string(kv.get("payoff.kind"));
    if (kv.has("payoff.smoothing_delta")) {
        std::string v = kv.get("payoff.smoothing_delta");
        if (!v.empty() && (v.back() == 'h' || v.back() == 'H')) {
            c.delta_in_h = true;
            v.pop_back();
            try {
                c.delta_value = std::stod(v);
            } catch (const std::exception&) {
                throw ConfigError("payoff.smoothing_delta: bad multiple-of-h value");
            }
        } else {
            c.delta_in_h = false;
            try {
                c.delta_value = std::stod(v);
            } catch (const std::exception&) {
                throw ConfigError("payoff.smoothing_delta: not a number");
            }
        }
    }

    c.mesh_half_width = kv.num_or("mesh.half_width", 4.5);
    c.n_per_side = kv.integer_or("mesh.n_per_side", 129);

    if (kv.has("scheme.method")) c.scheme.scheme = scheme_from_string(kv.get("scheme.method"));
    c.scheme.dt = kv.num_or("scheme.dt", 0.01);
    c.scheme.solver_tol = kv.num_or("scheme.solver_tol", 1e-10);
    c.scheme.solver_max_iter = kv.integer_or("scheme.solver_max_iter", 400);

    c.quadrature.n_nodes = kv.integer_or("quadrature.n_nodes", 128);
    c.quadrature.W = kv.num_or("quadrature.window_multiplier", 8.0);

    if (kv.has("report.spot")) c.spot = kv.pair("report.spot");
    if (kv.has("report.window")) {
        std::istringstream ss(kv.get("report.window"));
        if (!(ss >> c.window.s1_lo >> c.window.s1_hi >> c.window.s2_lo >> c.window.s2_hi))
            throw ConfigError("report.window: expected four numbers");
    }
    c.window.points = kv.integer_or("report.window_points", c.window.points);
    if (kv.has("report.output")) c.output_path = kv.get("report.output");
    if (kv.has("report.format")) c.format = export_format_from_string(kv.get("report.format"));
    c.checkpoint_every = kv.integer_or("report.checkpoint_every", 0);
    if (kv.has("report.checkpoint_prefix")) c.checkpoint_prefix = kv.get("report.checkpoint_prefix");

    c.validate();
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    return parse_config(is);
}

void RunConfig::validate() const {
    try {
        model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(mesh_half_width > 0.0)) throw ConfigError("mesh.half_width must be > 0");
    if (n_per_side < 3) throw ConfigError("mesh.n_per_side must be >= 3");
    if (!(delta_value > 0.0)) throw ConfigError("payoff.smoothing_delta must be > 0");
    if (!(scheme.dt > 0.0)) throw ConfigError("scheme.dt must be > 0");
    const double steps = model.T / scheme.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9)
        throw ConfigError("scheme.dt must divide the maturity into whole steps");
    if (quadrature.n_nodes < 8) throw ConfigError("quadrature.n_nodes must be >= 8");
    if (!(quadrature.W >= 6.0)) throw ConfigError("quadrature.window_multiplier must be >= 6");
    if (!(spot[0] > 0.0) || !(spot[1] > 0.0)) throw ConfigError("report.spot must be positive");
    const double s_max = std::exp(mesh_half_width);
    if (!(window.s1_lo > 0.0) || !(window.s2_lo > 0.0) || window.s1_hi > s_max ||
        window.s2_hi > s_max || window.s1_lo > window.s1_hi || window.s2_lo > window.s2_hi)
        throw ConfigError("report.window must lie inside (0, e^M]^2");
    if (checkpoint_every < 0) throw ConfigError("report.checkpoint_every must be >= 0");
}

}  // namespace levyfem
