#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "levyfem/model.hpp"
#include "levyfem/payoff.hpp"
#include "levyfem/stepper.hpp"
#include "levyfem/surface.hpp"

namespace levyfem {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One complete pricing run: model, payoff, discretizations and reporting.
/// Parsed from a flat sections-of-key=value text file whose model keys match
/// the market-parameter labels (diffusion_volatility, mean_jump_size,
/// mean_jump_volatility, jump_intensity, correlation, interest_rate, strike,
/// maturity, weights).
struct RunConfig {
    ModelParams model;

    PayoffKind kind = PayoffKind::BasketPut;
    double delta_value = 2.0;       ///< absolute, or multiple of h when delta_in_h
    bool delta_in_h = true;

    double mesh_half_width = 4.5;
    int n_per_side = 129;

    SchemeConfig scheme;            ///< n_steps is derived from maturity/dt

    JumpConfig quadrature;

    std::array<double, 2> spot{40.0, 40.0};
    ReportWindow window;
    std::string output_path;
    ExportFormat format = ExportFormat::Csv;
    int checkpoint_every = 0;
    std::string checkpoint_prefix = "checkpoint";

    double resolved_delta(double h) const { return delta_in_h ? delta_value * h : delta_value; }

    PayoffSpec make_payoff(double h) const {
        return PayoffSpec{kind, resolved_delta(h), model};
    }

    /// Cross-field checks (dt divides maturity, report window inside the
    /// priced region, spot positive). Throws ConfigError.
    void validate() const;
};

RunConfig parse_config(std::istream& is);
RunConfig parse_config_file(const std::string& path);

PayoffKind payoff_kind_from_string(const std::string& s);
ExportFormat export_format_from_string(const std::string& s);
Scheme scheme_from_string(const std::string& s);

}  // namespace levyfem
