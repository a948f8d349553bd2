#include "cvq/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "cvq/classical.hpp"
#include "cvq/errors.hpp"
#include "cvq/fock.hpp"
#include "cvq/fock_measure.hpp"
#include "cvq/keyrate.hpp"
#include "cvq/parallel.hpp"
#include "cvq/protocol_sim.hpp"
#include "cvq/serialize.hpp"
#include "cvq/state_spec.hpp"
#include "cvq/verification.hpp"

namespace cvq::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_number(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty() || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + ": '" + std::string(s) + "' is not a finite number");
    }
    return v;
}

CLI::Validator numeric_check(std::function<bool(double)> ok, std::string requirement) {
    return CLI::Validator(
        [ok = std::move(ok), requirement](std::string& text) -> std::string {
            double v;
            try {
                v = parse_number(text, "value");
            } catch (const std::exception& e) {
                return e.what();
            }
            return ok(v) ? std::string() : "value " + text + " " + requirement;
        },
        "", "");
}

const CLI::Validator kTransmittance = numeric_check([](double v) { return v > 0.0 && v <= 1.0; }, "must lie in (0, 1]");
const CLI::Validator kNonNegative = numeric_check([](double v) { return v >= 0.0; }, "must be >= 0");
const CLI::Validator kAtLeastOne = numeric_check([](double v) { return v >= 1.0; }, "must be >= 1");
const CLI::Validator kEfficiency = numeric_check([](double v) { return v > 0.0 && v <= 1.0; }, "must lie in (0, 1]");
const CLI::Validator kPositive = numeric_check([](double v) { return v > 0.0; }, "must be > 0");

struct ProtocolFlags {
    std::string prep = "coherent";
    std::string bob = "homodyne";
    std::string recon = "rr";
    double V = 2.0;
    double beta = 1.0;
    bool sift = false;

    keyrate::ProtocolConfig config() const {
        keyrate::ProtocolConfig cfg;
        cfg.prep = keyrate::parse_prep(prep);
        cfg.bob = keyrate::parse_bob(bob);
        cfg.recon = keyrate::parse_recon(recon);
        cfg.V = V;
        cfg.beta = beta;
        cfg.sift = sift;
        return cfg;
    }
};

void add_protocol(CLI::App* app, ProtocolFlags& f, bool required) {
    app->add_option("--prep", f.prep, "State preparation: coherent | squeezed")
        ->check(CLI::IsMember({"coherent", "squeezed"}))
        ->required(required);
    app->add_option("--bob", f.bob, "Bob's measurement: homodyne | heterodyne")
        ->check(CLI::IsMember({"homodyne", "heterodyne"}))
        ->required(required);
    app->add_option("--recon", f.recon, "Reconciliation direction: dr | rr")
        ->check(CLI::IsMember({"dr", "rr", "DR", "RR", "direct", "reverse"}))
        ->required(required);
    app->add_option("--V", f.V, "EPR variance in shot-noise units (modulation V - 1)")->check(kAtLeastOne);
    app->add_option("--beta", f.beta, "Reconciliation efficiency applied to I_xy (default 1)")->check(kEfficiency);
    app->add_flag("--sift", f.sift, "Apply the 1/2 basis-sifting factor for squeezed preparation");
}

struct OutputFlags {
    std::string format = "json";
    std::string path;
};

void add_output(CLI::App* app, OutputFlags& f) {
    app->add_option("--format", f.format, "Output format: json | csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--output,-o", f.path, "Write data to this file instead of standard output");
}

// One verification result line.
struct LabLine {
    std::string case_id;
    std::string spec;
    int cutoff = 0;
    double tail_mass = 0.0;
    std::string quantity;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

class LabEmitter {
public:
    explicit LabEmitter(std::ostream& out) : out_(out) {}
    void emit(const LabLine& l) {
        json j = {{"case_id", l.case_id},     {"spec", l.spec},   {"cutoff", l.cutoff},
                  {"tail_mass", l.tail_mass}, {"quantity", l.quantity}, {"value", l.value},
                  {"tolerance", l.tolerance}, {"pass", l.pass}};
        out_ << j.dump() << '\n';
        failed_ = failed_ || !l.pass;
    }
    bool failed() const { return failed_; }

private:
    std::ostream& out_;
    bool failed_ = false;
};

lab::FockDensity realize_flag(const std::string& spec, int cutoff, double budget) {
    lab::SpecPtr parsed;
    try {
        parsed = lab::parse_state_spec(spec);
    } catch (const SpecError& e) {
        throw UsageError(std::string("--state: ") + e.what());
    }
    return lab::realize(*parsed, cutoff, {budget});
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b == std::string::npos) throw UsageError(std::string(flag) + ": empty list entry");
        try {
            out.push_back(parse_number(std::string_view(item).substr(b, e - b + 1), flag));
        } catch (const std::invalid_argument& ex) {
            throw UsageError(ex.what());
        }
    }
    if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
    return out;
}

json estimate_json(const sim::EstimatedMoments& est) {
    json j = {{"n", est.n},
              {"d_hat", std::vector<double>(est.d_hat.data(), est.d_hat.data() + est.d_hat.size())},
              {"degenerate", est.degenerate},
              {"mirrored_entries", est.mirrored},
              {"zeroed_entries", est.zeroed}};
    json rows = json::array();
    for (Eigen::Index r = 0; r < est.gamma_hat.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < est.gamma_hat.cols(); ++c) row.push_back(est.gamma_hat(r, c));
        rows.push_back(row);
    }
    j["gamma_hat"] = rows;
    return j;
}

} // namespace

std::vector<double> parse_grid(std::string_view text) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos) {
        throw std::invalid_argument("grid '" + std::string(text) + "' must have the form from:to:step");
    }
    const double a = parse_number(text.substr(0, c1), "grid start");
    const double b = parse_number(text.substr(c1 + 1, c2 - c1 - 1), "grid end");
    const double s = parse_number(text.substr(c2 + 1), "grid step");
    if (!(s > 0.0)) throw std::invalid_argument("grid step must be > 0");
    if (a > b) throw std::invalid_argument("grid start exceeds grid end");
    std::vector<double> out;
    for (long long i = 0;; ++i) {
        double v = a + static_cast<double>(i) * s;
        if (v > b + 1e-12) break;
        if (std::abs(v - b) <= 1e-12) v = b;
        out.push_back(v);
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Key-rate bounds and Gaussian-extremality checks for continuous-variable QKD", "cvq"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    // keyrate
    ProtocolFlags kr_proto;
    OutputFlags kr_out;
    double kr_T = 1.0, kr_xi = 0.0;
    CLI::App* keyrate_cmd = app.add_subcommand("keyrate", "Key-rate report for one parameter point");
    add_protocol(keyrate_cmd, kr_proto, true);
    keyrate_cmd->get_option("--V")->required();
    keyrate_cmd->add_option("--T", kr_T, "Channel transmittance in (0, 1]")->required()->check(kTransmittance);
    keyrate_cmd->add_option("--xi", kr_xi, "Excess noise referred to the channel input (SNU)")->required()->check(kNonNegative);
    add_output(keyrate_cmd, kr_out);

    // sweep
    ProtocolFlags sw_proto;
    OutputFlags sw_out;
    sw_out.format = "csv";
    std::string sw_param, sw_grid;
    std::optional<double> sw_T, sw_xi;
    bool sw_V_given = false;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Key-rate reports over a grid of one parameter");
    add_protocol(sweep_cmd, sw_proto, true);
    sweep_cmd->add_option("--param", sw_param, "Swept parameter: T | xi | V")->required()->check(CLI::IsMember({"T", "xi", "V"}));
    sweep_cmd->add_option("--grid", sw_grid, "Grid from:to:step (inclusive)")->required();
    sweep_cmd->add_option("--T", sw_T, "Channel transmittance in (0, 1]")->check(kTransmittance);
    sweep_cmd->add_option("--xi", sw_xi, "Excess noise (SNU)")->check(kNonNegative);
    add_output(sweep_cmd, sw_out);

    // simulate
    ProtocolFlags sim_proto;
    OutputFlags sim_out;
    double sim_T = 1.0, sim_xi = 0.0;
    std::size_t sim_n = 0;
    std::uint64_t sim_seed = 1;
    std::string sim_samples;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo run: sample, estimate moments, key rate");
    add_protocol(sim_cmd, sim_proto, true);
    sim_cmd->get_option("--V")->required();
    sim_cmd->add_option("--T", sim_T, "Channel transmittance in (0, 1]")->required()->check(kTransmittance);
    sim_cmd->add_option("--xi", sim_xi, "Excess noise (SNU)")->required()->check(kNonNegative);
    sim_cmd->add_option("--n", sim_n, "Number of channel uses to sample (>= 2)")->required()->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    sim_cmd->add_option("--seed", sim_seed, "RNG seed");
    sim_cmd->add_option("--samples-out", sim_samples, "Also write the samples as CSV here, with a .json sidecar");
    add_output(sim_cmd, sim_out);

    // lab
    CLI::App* lab_cmd = app.add_subcommand("lab", "Truncated Fock-space verification runs (JSON lines)");
    lab_cmd->require_subcommand(1);
    int cutoff = lab::kDefaultCutoff;
    double budget = lab::kDefaultTailBudget;
    std::string lab_path;
    auto add_lab_common = [&](CLI::App* c) {
        c->add_option("--cutoff", cutoff, "Photon-number cutoff per mode (>= 4)")->check(CLI::Range(4, 400));
        c->add_option("--tail-budget", budget, "Maximum weight on the top two Fock levels")->check(kPositive);
        c->add_option("--output,-o", lab_path, "Write data to this file instead of standard output");
    };

    std::string ex_state;
    bool ex_no_ref = false;
    CLI::App* ex_cmd = lab_cmd->add_subcommand("extremality", "Entropy gap to the Gaussian state with equal moments");
    ex_cmd->add_option("--state", ex_state, "State expression (see docs/state-spec.md)")->required();
    ex_cmd->add_flag("--no-reference", ex_no_ref, "Skip the explicit Gaussian reference (single mode)");
    add_lab_common(ex_cmd);

    std::string ct_state;
    double ct_T = 0.5;
    CLI::App* ct_cmd = lab_cmd->add_subcommand("contraction", "Gap before and after a pure-loss channel");
    ct_cmd->add_option("--state", ct_state, "Single-mode state expression")->required();
    ct_cmd->add_option("--T", ct_T, "Loss transmittance in (0, 1]")->required()->check(kTransmittance);
    add_lab_common(ct_cmd);

    std::string dc_state, dc_measure = "heterodyne";
    int dc_mode = 0, dc_refine = 0;
    std::optional<double> dc_delta, dc_extent;
    CLI::App* dc_cmd = lab_cmd->add_subcommand("decomposition", "Conditional-entropy decomposition residual");
    dc_cmd->add_option("--state", dc_state, "Two-mode state expression")->required();
    dc_cmd->add_option("--mode", dc_mode, "Measured mode (0 or 1)")->check(CLI::Range(0, 1));
    dc_cmd->add_option("--measurement", dc_measure, "heterodyne | homodyne_q | homodyne_p")
        ->check(CLI::IsMember({"heterodyne", "homodyne_q", "homodyne_p"}));
    dc_cmd->add_option("--delta", dc_delta, "Grid step (default: extent / 24)")->check(kPositive);
    dc_cmd->add_option("--extent", dc_extent, "Grid half-width (default: 6 outcome standard deviations)")->check(kPositive);
    dc_cmd->add_option("--refine", dc_refine, "Additional step-halving levels")->check(CLI::Range(0, 4));
    add_lab_common(dc_cmd);

    std::vector<std::string> hg_states;
    ProtocolFlags hg_proto;
    std::optional<double> hg_T, hg_xi;
    CLI::App* hg_cmd = lab_cmd->add_subcommand("holevo", "Gaussian minus Fock-oracle Holevo information per state");
    hg_cmd->add_option("--state", hg_states, "Two-mode AB state expression (repeatable)")->required();
    add_protocol(hg_cmd, hg_proto, false);
    hg_cmd->add_option("--T", hg_T, "Target transmittance for the moment-match check")->check(kTransmittance);
    hg_cmd->add_option("--xi", hg_xi, "Target excess noise for the moment-match check")->check(kNonNegative);
    add_lab_common(hg_cmd);

    std::string cl_points, cl_probs;
    double cl_step = 0.0;
    CLI::App* cl_cmd = lab_cmd->add_subcommand("classical", "Entropy gap of a lattice distribution");
    cl_cmd->add_option("--points", cl_points, "Comma-separated support points")->required();
    cl_cmd->add_option("--probs", cl_probs, "Comma-separated probabilities")->required();
    cl_cmd->add_option("--step", cl_step, "Lattice spacing")->required()->check(kPositive);
    cl_cmd->add_option("--output,-o", lab_path, "Write data to this file instead of standard output");

    lab::SuiteOptions suite;
    CLI::App* su_cmd = lab_cmd->add_subcommand("suite", "Randomized extremality suite");
    su_cmd->add_option("--cases", suite.cases, "Number of random states");
    su_cmd->add_option("--seed", suite.seed, "RNG seed");
    su_cmd->add_option("--cutoff", suite.single_mode_cutoff, "Cutoff for single-mode states")->check(CLI::Range(4, 400));
    su_cmd->add_option("--cutoff2", suite.two_mode_cutoff, "Cutoff for two-mode states")->check(CLI::Range(4, 60));
    su_cmd->add_option("--two-mode-fraction", suite.two_mode_fraction, "Share of two-mode states")->check(CLI::Range(0.0, 1.0));
    su_cmd->add_option("--tail-budget", suite.tail_budget, "Maximum weight on the top two Fock levels")->check(kPositive);
    su_cmd->add_option("--output,-o", lab_path, "Write data to this file instead of standard output");

    std::ostringstream data;
    std::string out_path;
    int status = kOk;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        if (keyrate_cmd->parsed()) {
            out_path = kr_out.path;
            const keyrate::KeyRateReport r = keyrate::compute_report(kr_proto.config(), kr_T, kr_xi);
            if (kr_out.format == "csv") {
                data << io::report_csv_header() << '\n' << io::report_csv_row(r) << '\n';
            } else {
                data << io::to_json(r).dump() << '\n';
            }
        } else if (sweep_cmd->parsed()) {
            out_path = sw_out.path;
            if (sw_param == "T" && sw_T) throw UsageError("--T: cannot be fixed while sweeping T");
            if (sw_param == "xi" && sw_xi) throw UsageError("--xi: cannot be fixed while sweeping xi");
            if (sw_param != "T" && !sw_T) throw UsageError("--T: required unless --param T");
            if (sw_param != "xi" && !sw_xi) throw UsageError("--xi: required unless --param xi");
            sw_V_given = sweep_cmd->count("--V") > 0;
            if (sw_param == "V" && sw_V_given) throw UsageError("--V: cannot be fixed while sweeping V");
            if (sw_param != "V" && !sw_V_given) throw UsageError("--V: required unless --param V");
            std::vector<double> grid;
            try {
                grid = parse_grid(sw_grid);
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("--grid: ") + e.what());
            }
            for (double g : grid) {
                if (sw_param == "T" && !(g > 0.0 && g <= 1.0)) throw UsageError("--grid: T values must lie in (0, 1]");
                if (sw_param == "xi" && g < 0.0) throw UsageError("--grid: xi values must be >= 0");
                if (sw_param == "V" && g < 1.0) throw UsageError("--grid: V values must be >= 1");
            }
            const keyrate::ProtocolConfig base = sw_proto.config();
            std::vector<keyrate::KeyRateReport> rows(grid.size());
            parallel_for(grid.size(), [&](std::size_t i) {
                keyrate::ProtocolConfig cfg = base;
                double T = sw_T.value_or(1.0), xi = sw_xi.value_or(0.0);
                if (sw_param == "T") T = grid[i];
                if (sw_param == "xi") xi = grid[i];
                if (sw_param == "V") cfg.V = grid[i];
                rows[i] = keyrate::compute_report(cfg, T, xi);
            });
            if (sw_out.format == "csv") {
                data << io::report_csv_header() << '\n';
                for (const auto& r : rows) data << io::report_csv_row(r) << '\n';
            } else {
                for (const auto& r : rows) data << io::to_json(r).dump() << '\n';
            }
        } else if (sim_cmd->parsed()) {
            out_path = sim_out.path;
            const keyrate::ProtocolConfig cfg = sim_proto.config();
            sim::EstimatedMoments est;
            json meta;
            if (!sim_samples.empty()) {
                const sim::SampleBatch batch = sim::simulate(cfg, sim_T, sim_xi, sim_n, sim_seed);
                std::ofstream csv(sim_samples);
                if (!csv) throw UsageError("--samples-out: cannot open '" + sim_samples + "'");
                sim::write_batch_csv(csv, batch);
                meta = sim::batch_metadata(batch);
                std::ofstream side(sim_samples + ".json");
                side << meta.dump(2) << '\n';
                est = sim::estimate_moments(batch);
            } else {
                est = sim::simulate_and_estimate(cfg, sim_T, sim_xi, sim_n, sim_seed);
                meta = {{"protocol", keyrate::to_string(cfg.prep)}, {"bob", keyrate::to_string(cfg.bob)},
                        {"recon", keyrate::to_string(cfg.recon)}, {"V", cfg.V}, {"T", sim_T}, {"xi", sim_xi},
                        {"n", sim_n}, {"seed", sim_seed}, {"generator", rng::kGeneratorId},
                        {"chunk_size", sim::kChunkSize}};
            }
            const keyrate::KeyRateReport r = sim::keyrate_from_estimate(est, cfg);
            if (r.projected) err << "note: estimated covariance was projected onto the physical set\n";
            if (sim_out.format == "csv") {
                data << io::report_csv_header() << '\n' << io::report_csv_row(r) << '\n';
            } else {
                data << json{{"metadata", meta}, {"estimate", estimate_json(est)}, {"report", io::to_json(r)}}.dump()
                     << '\n';
            }
        } else if (lab_cmd->parsed()) {
            out_path = lab_path;
            LabEmitter em(data);
            if (ex_cmd->parsed()) {
                const lab::FockDensity rho = realize_flag(ex_state, cutoff, budget);
                const lab::ExtremalityGap g = lab::extremality_gap(rho, {!ex_no_ref});
                const std::string canon = lab::to_string(*lab::parse_state_spec(ex_state));
                em.emit({"extremality-0", canon, cutoff, rho.tail_mass, "delta_H", g.delta_H, 1e-6, g.delta_H >= -1e-6});
                if (g.relative_entropy) {
                    const double d = *g.relative_entropy;
                    em.emit({"extremality-0", canon, cutoff, rho.tail_mass, "relative_entropy", d, 1e-6, d >= -1e-6});
                    const double diff = std::abs(g.delta_H - d);
                    em.emit({"extremality-0", canon, cutoff, rho.tail_mass, "dual_path_difference", diff, 1e-4,
                             diff <= 1e-4 && !g.reference_failed});
                    if (g.reference_failed) err << "warning: " << g.reference_error << '\n';
                }
            } else if (ct_cmd->parsed()) {
                const lab::FockDensity rho = realize_flag(ct_state, cutoff, budget);
                if (rho.modes != 1) throw UsageError("--state: contraction needs a single-mode state");
                const lab::Contraction c = lab::contraction_check(rho, ct_T);
                const std::string canon = lab::to_string(*lab::parse_state_spec(ct_state));
                em.emit({"contraction-0", canon, cutoff, rho.tail_mass, "delta_H_before", c.before, 1e-6, c.before >= -1e-6});
                em.emit({"contraction-0", canon, cutoff, rho.tail_mass, "delta_H_after", c.after, 1e-6, c.after >= -1e-6});
                em.emit({"contraction-0", canon, cutoff, rho.tail_mass, "contraction_margin", c.before - c.after, 1e-4,
                         c.before - c.after >= -1e-4});
                em.emit({"contraction-0", canon, cutoff, rho.tail_mass, "moment_deviation", c.moment_deviation, 1e-6,
                         c.moment_deviation <= 1e-6});
            } else if (dc_cmd->parsed()) {
                const lab::FockDensity rho = realize_flag(dc_state, cutoff, budget);
                if (rho.modes != 2) throw UsageError("--state: decomposition needs a two-mode state");
                const MeasurementKind kind = dc_measure == "heterodyne" ? MeasurementKind::heterodyne
                                           : dc_measure == "homodyne_q" ? MeasurementKind::homodyne_q
                                                                        : MeasurementKind::homodyne_p;
                lab::PhaseGrid grid = lab::default_grid(rho, dc_mode, kind);
                const double extent = dc_extent.value_or(grid.delta * grid.half_points);
                grid.delta = dc_delta.value_or(extent / 24.0);
                grid.half_points = static_cast<int>(std::lround(extent / grid.delta));
                const std::string canon = lab::to_string(*lab::parse_state_spec(dc_state));
                for (int level = 0; level <= dc_refine; ++level) {
                    const lab::Decomposition d = lab::decomposition_check(rho, dc_mode, kind, grid);
                    const std::string id = "decomposition-" + std::to_string(level);
                    em.emit({id, canon, cutoff, rho.tail_mass, "residual", d.residual, 1e-3, d.residual <= 1e-3});
                    em.emit({id, canon, cutoff, rho.tail_mass, "completeness_defect", d.completeness_defect,
                             lab::kMaxCompletenessDefect, d.completeness_defect <= lab::kMaxCompletenessDefect});
                    grid = lab::refine(grid);
                }
            } else if (hg_cmd->parsed()) {
                if (hg_T.has_value() != hg_xi.has_value()) throw UsageError(hg_T ? "--xi: required with --T" : "--T: required with --xi");
                const keyrate::ProtocolConfig cfg = hg_proto.config();
                for (std::size_t i = 0; i < hg_states.size(); ++i) {
                    const lab::FockDensity rho = realize_flag(hg_states[i], cutoff, budget);
                    if (rho.modes != 2) throw UsageError("--state: '" + hg_states[i] + "' is not a two-mode state");
                    double mismatch = 0.0;
                    if (hg_T) {
                        const GaussianState ref = keyrate::post_channel_state(cfg, *hg_T, *hg_xi);
                        mismatch = (lab::moments(rho).gamma - ref.gamma).cwiseAbs().maxCoeff();
                        if (mismatch > 1e-6) {
                            throw std::domain_error("state '" + hg_states[i] + "' differs from the target moments by " +
                                                    std::to_string(mismatch));
                        }
                    }
                    const lab::HolevoGapCase c = lab::holevo_gap_case(rho, cfg);
                    const std::string id = "holevo-" + std::to_string(i);
                    const std::string canon = lab::to_string(*lab::parse_state_spec(hg_states[i]));
                    em.emit({id, canon, cutoff, rho.tail_mass, "chi_oracle", c.chi_oracle, 0.0, true});
                    em.emit({id, canon, cutoff, rho.tail_mass, "chi_gaussian", c.chi_gaussian, 0.0, true});
                    em.emit({id, canon, cutoff, rho.tail_mass, "delta_chi", c.delta, 1e-4, c.delta >= -1e-4});
                }
            } else if (cl_cmd->parsed()) {
                const std::vector<double> pts = parse_list(cl_points, "--points");
                const std::vector<double> prb = parse_list(cl_probs, "--probs");
                if (pts.size() != prb.size()) throw UsageError("--probs: length differs from --points");
                lab::ClassicalGap g;
                try {
                    g = lab::classical_gap(pts, prb, cl_step);
                } catch (const std::invalid_argument& e) {
                    throw UsageError(std::string("--points: ") + e.what());
                }
                em.emit({"classical-0", "", 0, 0.0, "gap", g.gap, 1e-6, g.gap >= -1e-6});
                em.emit({"classical-0", "", 0, 0.0, "kl", g.kl, 1e-6, g.kl >= -1e-6});
                // On coarse lattices the two differ by the discretized Gaussian's
                // variance mismatch; the tolerance widens to that amount.
                const double diff = std::abs(g.gap - g.kl);
                const double tol = std::max(1e-6, 1.01 * std::abs(g.grid_bias));
                em.emit({"classical-0", "", 0, 0.0, "gap_kl_difference", diff, tol, diff <= tol});
            } else if (su_cmd->parsed()) {
                const std::vector<lab::SuiteCase> cases = lab::extremality_suite(suite);
                for (const auto& c : cases) {
                    const std::string id = "suite-" + std::to_string(c.index);
                    em.emit({id, c.spec, c.cutoff, c.gap.tail_mass, "delta_H", c.gap.delta_H, 1e-6, c.gap.delta_H >= -1e-6});
                    if (c.gap.relative_entropy) {
                        const double diff = std::abs(c.gap.delta_H - *c.gap.relative_entropy);
                        em.emit({id, c.spec, c.cutoff, c.gap.tail_mass, "dual_path_difference", diff, 1e-4,
                                 diff <= 1e-4 && !c.gap.reference_failed});
                    }
                }
            }
            if (em.failed()) {
                err << "error: at least one check failed (see pass=false lines)\n";
                status = kRejected;
            }
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const TruncationError& e) {
        err << "error: " << e.what() << '\n';
        return kRejected;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRejected;
    }

    if (out_path.empty()) {
        out << data.str();
    } else {
        std::ofstream file(out_path);
        if (!file) {
            err << "error: --output: cannot open '" << out_path << "'\n";
            return kUsage;
        }
        file << data.str();
    }
    return status;
}

} // namespace cvq::cli
