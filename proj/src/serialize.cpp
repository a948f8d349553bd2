#include "cvq/serialize.hpp"

#include <charconv>
#include <stdexcept>

#include "cvq/errors.hpp"

namespace cvq::io {

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Matrix matrix_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j.at(0).size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j.at(i);
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw DimensionError(std::string(what) + ": ragged rows");
        }
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row.at(k).get<double>();
    }
    return m;
}

Vector vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
    return v;
}

} // namespace

json to_json(const GaussianState& s) {
    return {{"n_modes", s.n_modes}, {"d", vector_to_json(s.d)}, {"gamma", matrix_to_json(s.gamma)}};
}

GaussianState state_from_json(const json& j) {
    GaussianState s;
    s.n_modes = j.at("n_modes").get<int>();
    s.d = vector_from_json(j.at("d"), "d");
    s.gamma = matrix_from_json(j.at("gamma"), "gamma");
    validate_state(s);  // dimension check; physicality is the caller's call
    return s;
}

json to_json(const ConditionalResult& r) {
    return {{"kind", to_string(r.kind)},
            {"remaining_modes", r.remaining_modes},
            {"conditional_state", to_json(r.conditional_state)},
            {"gain", matrix_to_json(r.gain)},
            {"offset", vector_to_json(r.offset)},
            {"outcome_mean", vector_to_json(r.outcome_mean)},
            {"outcome_cov", matrix_to_json(r.outcome_cov)}};
}

json to_json(const GaussianChannel& c) {
    if (const auto p = c.loss_parameters()) return {{"T", p->first}, {"xi", p->second}};
    return {{"X", matrix_to_json(c.X())}, {"Y", matrix_to_json(c.Y())}};
}

GaussianChannel channel_from_json(const json& j) {
    if (j.contains("T")) return GaussianChannel::loss_noise(j.at("T").get<double>(), j.value("xi", 0.0));
    const Matrix x = matrix_from_json(j.at("X"), "X");
    const Matrix y = matrix_from_json(j.at("Y"), "Y");
    if (x.rows() != 2 || x.cols() != 2 || y.rows() != 2 || y.cols() != 2) {
        throw DimensionError("channel: X and Y must be 2x2");
    }
    return GaussianChannel::general(x, y);
}

json to_json(const keyrate::KeyRateReport& r) {
    json j = {{"protocol", keyrate::to_string(r.cfg.prep)},
              {"bob", keyrate::to_string(r.cfg.bob)},
              {"recon", keyrate::to_string(r.cfg.recon)},
              {"V", r.cfg.V},
              {"beta", r.cfg.beta},
              {"I_xy", r.I_xy},
              {"chi_xe", r.chi_xe},
              {"chi_xb", r.chi_xb},
              {"K_coll", r.K_coll},
              {"K_coll_prime", r.K_coll_prime},
              {"sift_factor", r.sift_factor},
              {"covariance", matrix_to_json(r.covariance)},
              {"estimated", r.estimated}};
    if (r.estimated) {
        j["n_samples"] = r.n_samples;
        j["projected"] = r.projected;
        j["mirrored_entries"] = r.mirrored_entries;
        j["zeroed_entries"] = r.zeroed_entries;
    }
    j["T"] = r.T;
    j["xi"] = r.xi;
    return j;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string report_csv_header() {
    return "protocol,bob,recon,V,T,xi,I_xy,chi_xe,chi_xb,K_coll,K_coll_prime,schema_version";
}

std::string report_csv_row(const keyrate::KeyRateReport& r) {
    std::string row;
    row += keyrate::to_string(r.cfg.prep);
    row += ',';
    row += keyrate::to_string(r.cfg.bob);
    row += ',';
    row += keyrate::to_string(r.cfg.recon);
    for (double v : {r.cfg.V, r.T, r.xi, r.I_xy, r.chi_xe, r.chi_xb, r.K_coll, r.K_coll_prime}) {
        row += ',';
        row += format_double(v);
    }
    row += ',';
    row += std::to_string(kCsvSchemaVersion);
    return row;
}

} // namespace cvq::io
