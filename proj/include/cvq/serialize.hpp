#pragma once

#include <string>

#include "json.hpp"

#include "cvq/channel.hpp"
#include "cvq/gaussian_state.hpp"
#include "cvq/keyrate.hpp"
#include "cvq/measurement.hpp"

namespace cvq::io {

using nlohmann::json;

// {n_modes, d: [...], gamma: [[...], ...]}, quadratures ordered (Q1, P1, Q2, P2, ...).
json to_json(const GaussianState& s);
GaussianState state_from_json(const json& j);

json to_json(const ConditionalResult& r);

// {T, xi} for loss/noise channels, {X, Y} otherwise.
json to_json(const GaussianChannel& c);
GaussianChannel channel_from_json(const json& j);

json to_json(const keyrate::KeyRateReport& r);

inline constexpr int kCsvSchemaVersion = 1;
std::string report_csv_header();
std::string report_csv_row(const keyrate::KeyRateReport& r);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double x);

} // namespace cvq::io
