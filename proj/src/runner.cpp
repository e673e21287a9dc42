#include "ergoflux/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ergoflux/ergotropy.hpp"
#include "ergoflux/error.hpp"
#include "ergoflux/liouvillian.hpp"

namespace ergoflux {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) fail(ErrorCategory::io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCategory::io, "cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) fail(ErrorCategory::io, "write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorCategory::io, "cannot move output into place at " + path.string());
    }
}

std::string trajectory_csv(const Trajectory& tr) {
    std::string s = "t,ergotropy,ergotropy_incoherent,ergotropy_coherent,trace_distance\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        s += format_double(tr.times[k]) + ',' + format_double(tr.ergotropy_total[k]) + ',' +
             format_double(tr.ergotropy_incoherent[k]) + ',' + format_double(tr.ergotropy_coherent[k]) + ',' +
             format_double(tr.trace_distance_to_ss[k]) + '\n';
    }
    return s;
}

namespace {

const char* tf(bool b) { return b ? "true" : "false"; }

} // namespace

std::string region_csv(const RegionMap& map) {
    std::string s = map.grid.axis1.name + ',' + map.grid.axis2.name +
                    ",valid,crossing_count,emc,state_mpemba,mpemba_parameter,iso_flag,degenerate,anomaly\n";
    for (const auto& p : map.points) {
        s += format_double(p.v1) + ',' + format_double(p.v2) + ',' + tf(p.valid_state) + ',';
        if (p.valid_state) {
            s += std::to_string(p.crossing_count) + ',' + tf(p.emc) + ',' + tf(p.state_mpemba) + ',' +
                 format_double(p.mpemba_parameter) + ',' + tf(p.iso_flag) + ',' + tf(p.degenerate) + ',' + tf(p.anomaly);
        } else {
            s += ",,,,,,"; // no classification outside the state space
        }
        s += '\n';
    }
    return s;
}

namespace {

json channel_json(const ChannelSpec& c) {
    json j;
    j["type"] = std::string(channel_name(c));
    std::visit(
        [&](const auto& ch) {
            using T = std::decay_t<decltype(ch)>;
            j["h_z"] = ch.h_z;
            if constexpr (std::is_same_v<T, Gadc>) {
                j["gamma"] = ch.gamma;
                j["n_bose"] = ch.n_bose;
            } else if constexpr (std::is_same_v<T, Pauli>) {
                j["gamma_perp"] = ch.gamma_perp;
                j["gamma_z"] = ch.gamma_z;
            } else if constexpr (std::is_same_v<T, QutritAdc>) {
                j["gamma"] = ch.gamma;
            } else {
                j["gamma"] = ch.gamma;
                j["lambda"] = ch.lambda;
                j["delta"] = ch.delta;
            }
        },
        c);
    return j;
}

json state_json(const StateDescriptor& s) {
    switch (s.kind) {
    case StateDescriptor::Kind::bloch: return {{"bloch", {s.bloch.x, s.bloch.y, s.bloch.z}}};
    case StateDescriptor::Kind::qutrit: return {{"qutrit", {s.qutrit.p1, s.qutrit.p2}}};
    case StateDescriptor::Kind::pure: return {{"pure", {s.theta, s.phi}}};
    }
    return {};
}

json report_json(const CrossingReport& r) {
    json j;
    j["crossing_times"] = r.crossing_times;
    j["count"] = r.count;
    j["parity"] = std::string(parity_name(r.parity));
    j["mpemba_parameter"] = r.mpemba_parameter;
    j["event_times"] = r.event_times;
    j["tangency_flags"] = r.tangency_flags;
    j["grid_intervals"] = r.grid_intervals;
    return j;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
        rows.push_back(row);
    }
    return rows;
}

std::string dump(const json& j) { return j.dump(2) + '\n'; }

double horizon_of(const RunConfig& cfg) { return cfg.horizon ? *cfg.horizon : default_horizon(cfg.channel); }

RunResult run_traj(const RunConfig& cfg) {
    RunResult res;
    const fs::path dir = cfg.output_path;
    const double t_max = horizon_of(cfg);
    for (std::size_t i = 0; i < cfg.states.size(); ++i) {
        const auto tr = trajectory(cfg.states[i].density(), cfg.channel, t_max, cfg.n_points);
        fs::path file;
        if (cfg.format == OutputFormat::csv) {
            file = dir / ("traj_" + std::to_string(i) + ".csv");
            write_atomic(file, trajectory_csv(tr));
        } else {
            json j;
            j["channel"] = channel_json(cfg.channel);
            j["state"] = state_json(cfg.states[i]);
            j["t"] = tr.times;
            j["ergotropy"] = tr.ergotropy_total;
            j["ergotropy_incoherent"] = tr.ergotropy_incoherent;
            j["ergotropy_coherent"] = tr.ergotropy_coherent;
            j["trace_distance"] = tr.trace_distance_to_ss;
            file = dir / ("traj_" + std::to_string(i) + ".json");
            write_atomic(file, dump(j));
        }
        res.files.push_back(file);
    }
    return res;
}

RunResult run_crossings(const RunConfig& cfg) {
    const auto& s1 = cfg.states[0];
    const auto& s2 = cfg.states[1];
    const auto r1 = s1.density(), r2 = s2.density();
    const double t_max = horizon_of(cfg);
    const auto rep = ergotropic_crossings(r1, r2, cfg.channel, t_max);

    json j = report_json(rep);
    j["channel"] = channel_json(cfg.channel);
    j["states"] = {state_json(s1), state_json(s2)};
    j["horizon"] = t_max;
    const auto h = hamiltonian(cfg.channel);
    j["initial_ergotropy"] = {ergotropy(r1, h), ergotropy(r2, h)};
    try {
        j["state_mpemba"] = report_json(state_mpemba_crossings(r1, r2, cfg.channel, t_max));
    } catch (const Error& e) {
        if (e.category() != ErrorCategory::ordering) throw;
        j["state_mpemba"] = {{"skipped", "equal initial distance to the steady state"}};
    }
    if (const auto* g = std::get_if<Gadc>(&cfg.channel)) {
        j["prediction"] = std::string(prediction_name(predict_emc_gadc(s1.bloch, s2.bloch)));
        if (s1.kind == StateDescriptor::Kind::pure && s2.kind == StateDescriptor::Kind::pure) {
            const auto pt = crossing_time_pure_gadc(s1.theta, s2.theta, *g);
            j["pure_crossing_time"] = {{"kind", std::string(kind_name(pt.kind))}, {"time", pt.time}};
        }
    }
    RunResult res;
    res.files.push_back(fs::path(cfg.output_path) / "crossings.json");
    write_atomic(res.files.back(), dump(j));
    return res;
}

RunResult run_region(const RunConfig& cfg) {
    ScanOptions opt;
    if (cfg.horizon) opt.horizon = *cfg.horizon;
    const GridSpec& grid = *cfg.grid;
    RegionMap map;
    const std::string& scan = cfg.scan;
    if (scan == "mpemba_parameter") {
        map = scan_mpemba_parameter_pure(std::get<Gadc>(cfg.channel), grid, opt);
    } else if (const auto* q = std::get_if<QutritAdc>(&cfg.channel)) {
        const auto& ref = cfg.states[0].qutrit;
        map = scan == "state_vs_emc" ? scan_state_vs_emc(ref, *q, grid, opt) : scan_qutrit_simplex(ref, *q, grid, opt);
    } else {
        const auto& ref = cfg.states[0].bloch;
        if (scan == "state_vs_emc")
            map = scan_state_vs_emc(ref, cfg.channel, grid, opt);
        else if (scan == "crossing_count")
            map = scan_crossing_count_nm(ref, std::get<NonMarkovAdc>(cfg.channel), grid, opt);
        else
            map = scan_emc_qubit(ref, cfg.channel, grid, opt);
    }

    json meta;
    meta["kind"] = map.kind;
    meta["channel"] = channel_json(cfg.channel);
    if (!cfg.states.empty()) meta["reference"] = state_json(cfg.states[0]);
    json axes = json::array();
    for (const Axis* a : {&grid.axis1, &grid.axis2})
        axes.push_back({{"name", a->name}, {"min", a->min}, {"max", a->max}, {"n", a->n}});
    meta["grid"] = {{"axes", axes}, {"fixed", grid.fixed}};
    meta["horizon"] = map.horizon;
    std::size_t valid = 0, emc = 0, state = 0;
    for (const auto& p : map.points) {
        valid += p.valid_state;
        emc += p.emc;
        state += p.state_mpemba;
    }
    meta["summary"] = {{"points", map.points.size()}, {"valid", valid}, {"emc", emc}, {"state_mpemba", state},
                       {"anomalies", map.anomalies}};

    RunResult res;
    const fs::path dir = cfg.output_path;
    if (cfg.format == OutputFormat::csv) {
        res.files.push_back(dir / "region.csv");
        write_atomic(res.files.back(), region_csv(map));
        res.files.push_back(dir / "region_meta.json");
        write_atomic(res.files.back(), dump(meta));
    } else {
        json rows = json::array();
        for (const auto& p : map.points) {
            json r = {{"axis1", p.v1}, {"axis2", p.v2}, {"valid", p.valid_state}};
            if (p.valid_state) {
                r["crossing_count"] = p.crossing_count;
                r["emc"] = p.emc;
                r["state_mpemba"] = p.state_mpemba;
                r["mpemba_parameter"] = p.mpemba_parameter;
                r["iso_flag"] = p.iso_flag;
                r["degenerate"] = p.degenerate;
                r["anomaly"] = p.anomaly;
            }
            rows.push_back(r);
        }
        meta["points"] = rows;
        res.files.push_back(dir / "region.json");
        write_atomic(res.files.back(), dump(meta));
    }
    return res;
}

BlochVector random_ball(std::mt19937_64& rng, bool xz_plane) {
    for (;;) {
        const double x = 2.0 * unit_uniform(rng()) - 1.0;
        const double y = xz_plane ? 0.0 : 2.0 * unit_uniform(rng()) - 1.0;
        const double z = 2.0 * unit_uniform(rng()) - 1.0;
        if (x * x + y * y + z * z <= 1.0) return {x, y, z};
    }
}

json oracle_check(const RunConfig& cfg, std::mt19937_64& rng) {
    const auto L = build_liouvillian(cfg.channel);
    const auto h = hamiltonian(cfg.channel);
    const double t_span = 5.0 / slowest_rate(cfg.channel);
    double worst = 0.0;
    json bad = json::array();
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const double t = t_span * unit_uniform(rng());
        double closed, spectral;
        if (const auto* q = std::get_if<QutritAdc>(&cfg.channel)) {
            QutritDiagonal d{};
            do {
                d = {unit_uniform(rng()), unit_uniform(rng())};
            } while (!d.valid());
            closed = qutrit_table_ergotropy(qutrit_diagonal_evolve(d, *q, t), q->h_z);
            spectral = ergotropy(evolve_spectral(L, qutrit_to_density(d), t), h);
        } else {
            const auto b = random_ball(rng, false);
            closed = Curve(bloch_to_density(b), cfg.channel).ergotropy(t);
            spectral = ergotropy(evolve_spectral(L, bloch_to_density(b), t), h);
        }
        const double err = std::abs(closed - spectral);
        worst = std::max(worst, err);
        if (err > 1e-9 && bad.size() < 20) bad.push_back({{"t", t}, {"closed_form", closed}, {"spectral", spectral}});
    }
    return {{"name", "oracle"}, {"samples", cfg.samples}, {"max_abs_error", worst}, {"tolerance", 1e-9},
            {"passed", worst <= 1e-9}, {"violations", bad.size()}, {"violation_samples", bad}};
}

json prediction_check(const RunConfig& cfg, std::mt19937_64& rng) {
    const double t_max = horizon_of(cfg);
    std::size_t covered = 0, disagree = 0;
    json bad = json::array();
    const auto* pauli = std::get_if<Pauli>(&cfg.channel);
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        BlochVector b1, b2;
        double e1, e2;
        do {
            b1 = random_ball(rng, true);
            b2 = random_ball(rng, true);
            if (pauli) {
                b1.z = std::abs(b1.z);
                b2.z = std::abs(b2.z);
            }
            e1 = qubit_ergotropy(b1, 1.0);
            e2 = qubit_ergotropy(b2, 1.0);
        } while (std::abs(e1 - e2) <= 1e-12 || (pauli && (b1.z == 0.0 || b2.z == 0.0)));
        if (e1 < e2) std::swap(b1, b2);
        const auto pred = pauli ? predict_emc_pauli(b1, b2, *pauli) : predict_emc_gadc(b1, b2);
        if (pred == EmcPrediction::not_covered) continue;
        ++covered;
        const auto rep = ergotropic_crossings(bloch_to_density(b1), bloch_to_density(b2), cfg.channel, t_max);
        const bool detected = rep.count > 0;
        if (detected != (pred == EmcPrediction::crossing)) {
            ++disagree;
            if (bad.size() < 20)
                bad.push_back({{"b1", {b1.x, b1.y, b1.z}}, {"b2", {b2.x, b2.y, b2.z}},
                               {"predicted", std::string(prediction_name(pred))}, {"detected_count", rep.count}});
        }
    }
    return {{"name", "prediction"}, {"samples", cfg.samples}, {"covered", covered}, {"violations", disagree},
            {"passed", disagree == 0}, {"violation_samples", bad}};
}

RunResult run_verify(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    json checks = json::array();
    bool all = true;
    for (const auto& name : cfg.checks) {
        json c;
        if (name.size() == 2 && name[0] == 'L') {
            const Lemma l = name == "L1" ? Lemma::L1 : name == "L2" ? Lemma::L2 : name == "L3" ? Lemma::L3 : Lemma::L4;
            const auto rep = verify_lemma_monotonicity(l, cfg.samples, cfg.channel, rng());
            json bad = json::array();
            for (const auto& s : rep.violation_samples)
                bad.push_back({{"state", {s.state.x, s.state.y, s.state.z}}, {"t", s.t}, {"derivative", s.derivative}});
            c = {{"name", name}, {"samples", rep.samples}, {"violations", rep.violations},
                 {"passed", rep.violations == 0}, {"violation_samples", bad}};
        } else if (name == "oracle") {
            c = oracle_check(cfg, rng);
        } else {
            c = prediction_check(cfg, rng);
        }
        all = all && c["passed"].get<bool>();
        checks.push_back(c);
    }
    json j;
    j["channel"] = channel_json(cfg.channel);
    j["seed"] = cfg.seed;
    j["checks"] = checks;
    j["passed"] = all;
    RunResult res;
    res.checks_passed = all;
    res.files.push_back(fs::path(cfg.output_path) / "verify.json");
    write_atomic(res.files.back(), dump(j));
    return res;
}

RunResult run_spectrum(const RunConfig& cfg) {
    const auto L = build_liouvillian(cfg.channel);
    json j;
    j["channel"] = channel_json(cfg.channel);
    j["dim"] = L.dim();
    json ev = json::array();
    for (Eigen::Index k = 0; k < L.eigenvalues().size(); ++k) ev.push_back({L.eigenvalues()[k].real(), L.eigenvalues()[k].imag()});
    j["eigenvalues"] = ev;
    json right = json::array(), left = json::array();
    for (const auto& m : L.right_eigenmatrices()) right.push_back(matrix_json(m));
    for (const auto& m : L.left_eigenmatrices()) left.push_back(matrix_json(m));
    j["right_eigenmatrices"] = right;
    j["left_eigenmatrices"] = left;
    j["steady_state"] = L.steady_state() ? matrix_json(L.steady_state()->matrix()) : json(nullptr);
    j["eigenvector_condition"] = L.eigenvector_condition();
    j["matrix_exponential_fallback"] = L.uses_expm_fallback();
    RunResult res;
    res.files.push_back(fs::path(cfg.output_path) / "spectrum.json");
    write_atomic(res.files.back(), dump(j));
    return res;
}

} // namespace

RunResult run(const RunConfig& cfg) {
    check_config(cfg);
    switch (cfg.command) {
    case Command::traj: return run_traj(cfg);
    case Command::crossings: return run_crossings(cfg);
    case Command::region: return run_region(cfg);
    case Command::verify: return run_verify(cfg);
    case Command::spectrum: return run_spectrum(cfg);
    }
    fail(ErrorCategory::config_schema, "unknown command");
}

} // namespace ergoflux
