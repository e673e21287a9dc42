#include "ergoflux/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ergoflux/error.hpp"

namespace ergoflux {

using json = nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& what) {
    fail(ErrorCategory::config_schema, (path.empty() ? std::string("/") : path) + ": " + what);
}

[[noreturn]] void physics(const std::string& path, const std::string& what) {
    fail(ErrorCategory::physics, (path.empty() ? std::string("/") : path) + ": " + what);
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) schema(path, "expected an object");
    for (const auto& [k, v] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) schema(path + "/" + k, "unknown key");
    }
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) schema(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) schema(path, "expected a finite number");
    return d;
}

double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
    return obj.contains(key) ? number(obj.at(key), path + "/" + key) : fallback;
}

double required_number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) schema(path + "/" + key, "missing required key");
    return number(obj.at(key), path + "/" + key);
}

std::uint64_t unsigned_int(const json& v, const std::string& path) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        schema(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string string(const json& v, const std::string& path) {
    if (!v.is_string()) schema(path, "expected a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const json& v, const std::string& path, std::size_t lo, std::size_t hi) {
    if (!v.is_array() || v.size() < lo || v.size() > hi)
        schema(path, lo == hi ? "expected an array of " + std::to_string(lo) + " numbers"
                              : "expected an array of " + std::to_string(lo) + " to " + std::to_string(hi) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "/" + std::to_string(i)));
    return out;
}

ChannelSpec parse_channel(const json& j) {
    const std::string p = "/channel";
    if (!j.is_object()) schema(p, "expected an object");
    if (!j.contains("type")) schema(p + "/type", "missing required key");
    const std::string type = string(j.at("type"), p + "/type");
    ChannelSpec c;
    if (type == "gadc") {
        only_keys(j, p, {"type", "gamma", "n_bose", "temperature", "h_z"});
        Gadc g;
        g.gamma = required_number(j, "gamma", p);
        g.h_z = number_or(j, "h_z", p, 1.0);
        if (j.contains("n_bose") && j.contains("temperature")) schema(p + "/temperature", "give either n_bose or temperature, not both");
        g.n_bose = number_or(j, "n_bose", p, 0.0);
        if (j.contains("temperature")) {
            const double temp = number(j.at("temperature"), p + "/temperature");
            if (temp < 0.0) physics(p + "/temperature", "temperature must be >= 0");
            if (!(g.h_z > 0.0)) physics(p + "/h_z", "h_z must be > 0");
            g.n_bose = bose_occupation(temp, g.h_z);
        }
        c = g;
    } else if (type == "pauli") {
        only_keys(j, p, {"type", "gamma_perp", "gamma_z", "h_z"});
        c = Pauli{required_number(j, "gamma_perp", p), required_number(j, "gamma_z", p), number_or(j, "h_z", p, 1.0)};
    } else if (type == "qutrit_adc") {
        only_keys(j, p, {"type", "gamma", "h_z"});
        c = QutritAdc{required_number(j, "gamma", p), number_or(j, "h_z", p, 1.0)};
    } else if (type == "nm_adc") {
        only_keys(j, p, {"type", "gamma", "lambda", "delta", "h_z"});
        c = NonMarkovAdc{required_number(j, "gamma", p), required_number(j, "lambda", p), number_or(j, "delta", p, 0.0),
                         number_or(j, "h_z", p, 1.0)};
    } else {
        schema(p + "/type", "unknown channel type '" + type + "' (gadc, pauli, qutrit_adc, nm_adc)");
    }
    try {
        validate(c);
    } catch (const Error& e) {
        physics(p, e.what());
    }
    return c;
}

StateDescriptor parse_state(const json& j, const std::string& p) {
    if (!j.is_object() || j.size() != 1) schema(p, "expected an object with exactly one of bloch, qutrit, pure");
    StateDescriptor s;
    if (j.contains("bloch")) {
        const auto v = numbers(j.at("bloch"), p + "/bloch", 3, 3);
        s.kind = StateDescriptor::Kind::bloch;
        s.bloch = {v[0], v[1], v[2]};
        if (!s.bloch.in_ball()) physics(p + "/bloch", "Bloch vector has length > 1");
    } else if (j.contains("qutrit")) {
        const auto v = numbers(j.at("qutrit"), p + "/qutrit", 2, 2);
        s.kind = StateDescriptor::Kind::qutrit;
        s.qutrit = {v[0], v[1]};
        if (!s.qutrit.valid()) physics(p + "/qutrit", "populations outside the simplex");
    } else if (j.contains("pure")) {
        const auto v = numbers(j.at("pure"), p + "/pure", 1, 2);
        s.kind = StateDescriptor::Kind::pure;
        s.theta = v[0];
        s.phi = v.size() > 1 ? v[1] : 0.0;
        if (s.theta < 0.0 || s.theta > 3.141592653589793) physics(p + "/pure/0", "polar angle outside [0, pi]");
        s.bloch = bloch_from_angles(s.theta, s.phi);
    } else {
        schema(p, "expected one of bloch, qutrit, pure");
    }
    return s;
}

Axis parse_axis(const json& j, const std::string& p) {
    only_keys(j, p, {"name", "min", "max", "n"});
    Axis a;
    if (!j.contains("name")) schema(p + "/name", "missing required key");
    a.name = string(j.at("name"), p + "/name");
    a.min = required_number(j, "min", p);
    a.max = required_number(j, "max", p);
    if (!j.contains("n")) schema(p + "/n", "missing required key");
    a.n = unsigned_int(j.at("n"), p + "/n");
    if (a.n < 2) schema(p + "/n", "need at least 2 points");
    if (!(a.min < a.max)) schema(p + "/max", "need min < max");
    return a;
}

GridSpec parse_grid(const json& j) {
    const std::string p = "/grid";
    only_keys(j, p, {"axis1", "axis2", "fixed"});
    GridSpec g;
    if (!j.contains("axis1")) schema(p + "/axis1", "missing required key");
    if (!j.contains("axis2")) schema(p + "/axis2", "missing required key");
    g.axis1 = parse_axis(j.at("axis1"), p + "/axis1");
    g.axis2 = parse_axis(j.at("axis2"), p + "/axis2");
    if (j.contains("fixed")) {
        const auto& f = j.at("fixed");
        if (!f.is_object()) schema(p + "/fixed", "expected an object");
        for (const auto& [k, v] : f.items()) g.fixed[k] = number(v, p + "/fixed/" + k);
    }
    return g;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view src, std::size_t byte) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, src.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (src[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

const std::set<std::string> kScans = {"emc", "state_vs_emc", "crossing_count", "qutrit_simplex", "mpemba_parameter"};
const std::set<std::string> kChecks = {"L1", "L2", "L3", "L4", "oracle", "prediction"};

} // namespace

std::string_view command_name(Command c) {
    switch (c) {
    case Command::traj: return "traj";
    case Command::crossings: return "crossings";
    case Command::region: return "region";
    case Command::verify: return "verify";
    case Command::spectrum: return "spectrum";
    }
    return "traj";
}

std::optional<Command> command_from_name(std::string_view s) {
    for (Command c : {Command::traj, Command::crossings, Command::region, Command::verify, Command::spectrum})
        if (command_name(c) == s) return c;
    return std::nullopt;
}

DensityMatrix StateDescriptor::density() const {
    if (kind == Kind::qutrit) return qutrit_to_density(qutrit);
    return bloch_to_density(bloch);
}

RunConfig parse_config(std::string_view source, std::optional<Command> command) {
    json root;
    try {
        root = json::parse(source.begin(), source.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(source, e.byte);
        std::string msg = e.what();
        // drop the library's own "[json.exception...] " prefix
        if (auto pos = msg.find("] "); pos != std::string::npos) msg = msg.substr(pos + 2);
        fail(ErrorCategory::config_syntax,
             "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
    }
    only_keys(root, "", {"command", "channel", "states", "grid", "scan", "horizon", "n_points", "verify", "output", "seed"});

    RunConfig cfg;
    if (root.contains("command")) {
        const auto name = string(root.at("command"), "/command");
        const auto cmd = command_from_name(name);
        if (!cmd) schema("/command", "unknown command '" + name + "'");
        if (command && *command != *cmd)
            schema("/command", "file says '" + name + "' but the command line asks for '" + std::string(command_name(*command)) + "'");
        cfg.command = *cmd;
    } else if (command) {
        cfg.command = *command;
    } else {
        schema("/command", "missing required key");
    }
    if (!root.contains("channel")) schema("/channel", "missing required key");
    cfg.channel = parse_channel(root.at("channel"));

    if (root.contains("states")) {
        const auto& s = root.at("states");
        if (!s.is_array()) schema("/states", "expected an array");
        for (std::size_t i = 0; i < s.size(); ++i) cfg.states.push_back(parse_state(s[i], "/states/" + std::to_string(i)));
    }
    if (root.contains("grid")) cfg.grid = parse_grid(root.at("grid"));
    if (root.contains("scan")) {
        cfg.scan = string(root.at("scan"), "/scan");
        if (!kScans.count(cfg.scan)) schema("/scan", "unknown scan '" + cfg.scan + "'");
    }
    if (root.contains("horizon")) {
        cfg.horizon = number(root.at("horizon"), "/horizon");
        if (!(*cfg.horizon > 0.0)) schema("/horizon", "must be > 0");
    }
    if (root.contains("n_points")) {
        cfg.n_points = unsigned_int(root.at("n_points"), "/n_points");
        if (cfg.n_points < 2) schema("/n_points", "need at least 2 points");
    }
    if (root.contains("verify")) {
        const auto& v = root.at("verify");
        only_keys(v, "/verify", {"checks", "samples"});
        if (v.contains("checks")) {
            const auto& c = v.at("checks");
            if (!c.is_array()) schema("/verify/checks", "expected an array");
            for (std::size_t i = 0; i < c.size(); ++i) {
                const auto name = string(c[i], "/verify/checks/" + std::to_string(i));
                if (!kChecks.count(name)) schema("/verify/checks/" + std::to_string(i), "unknown check '" + name + "'");
                cfg.checks.push_back(name);
            }
        }
        if (v.contains("samples")) cfg.samples = unsigned_int(v.at("samples"), "/verify/samples");
    }
    if (root.contains("output")) {
        const auto& o = root.at("output");
        only_keys(o, "/output", {"path", "format"});
        if (o.contains("path")) cfg.output_path = string(o.at("path"), "/output/path");
        if (o.contains("format")) {
            const auto f = string(o.at("format"), "/output/format");
            if (f == "csv")
                cfg.format = OutputFormat::csv;
            else if (f == "json")
                cfg.format = OutputFormat::json;
            else
                schema("/output/format", "expected csv or json");
        }
    }
    if (root.contains("seed")) cfg.seed = unsigned_int(root.at("seed"), "/seed");
    if (cfg.scan.empty()) {
        if (channel_dim(cfg.channel) == 3)
            cfg.scan = "qutrit_simplex";
        else if (std::holds_alternative<NonMarkovAdc>(cfg.channel))
            cfg.scan = "crossing_count";
        else
            cfg.scan = "emc";
    }

    check_config(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<Command> command) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCategory::io, "cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), command);
}

void check_config(const RunConfig& cfg) {
    const int dim = channel_dim(cfg.channel);
    for (std::size_t i = 0; i < cfg.states.size(); ++i) {
        const bool qutrit = cfg.states[i].kind == StateDescriptor::Kind::qutrit;
        if (qutrit != (dim == 3))
            schema("/states/" + std::to_string(i), dim == 3 ? "the qutrit channel needs qutrit states" : "qubit channels need bloch or pure states");
    }
    const std::size_t n = cfg.states.size();
    switch (cfg.command) {
    case Command::traj:
        if (n < 1) schema("/states", "traj needs at least one state");
        break;
    case Command::crossings:
        if (n != 2) schema("/states", "crossings needs exactly two states");
        break;
    case Command::region: {
        if (!cfg.grid) schema("/grid", "region needs a grid");
        const std::string scan = cfg.scan;
        if (scan == "mpemba_parameter") {
            if (!std::holds_alternative<Gadc>(cfg.channel)) schema("/scan", "mpemba_parameter scans need the gadc channel");
            if (n != 0) schema("/states", "mpemba_parameter scans take no reference state");
        } else {
            if (n != 1) schema("/states", "region needs exactly one reference state");
            if (scan == "qutrit_simplex" && dim != 3) schema("/scan", "qutrit_simplex needs the qutrit channel");
            if (scan == "crossing_count" && !std::holds_alternative<NonMarkovAdc>(cfg.channel))
                schema("/scan", "crossing_count needs the nm_adc channel");
            if (scan == "emc" && dim == 3) schema("/scan", "use qutrit_simplex for the qutrit channel");
        }
        break;
    }
    case Command::verify:
        if (cfg.checks.empty()) schema("/verify/checks", "verify needs at least one check");
        if (cfg.samples == 0) schema("/verify/samples", "need at least one sample");
        for (std::size_t i = 0; i < cfg.checks.size(); ++i) {
            const auto& c = cfg.checks[i];
            const auto path = "/verify/checks/" + std::to_string(i);
            if ((c == "L1" || c == "L2") && !std::holds_alternative<Gadc>(cfg.channel)) schema(path, c + " needs the gadc channel");
            if ((c == "L3" || c == "L4") && !std::holds_alternative<NonMarkovAdc>(cfg.channel))
                schema(path, c + " needs the nm_adc channel");
            if (c == "oracle" && !is_markovian(cfg.channel)) schema(path, "oracle needs a Markovian channel");
            if (c == "prediction" && !std::holds_alternative<Gadc>(cfg.channel) && !std::holds_alternative<Pauli>(cfg.channel))
                schema(path, "prediction needs the gadc or pauli channel");
        }
        break;
    case Command::spectrum:
        if (!is_markovian(cfg.channel)) schema("/channel/type", "spectrum needs a Markovian channel");
        break;
    }
}

void apply_overrides(RunConfig& cfg, const Overrides& ov) {
    if (ov.gamma) {
        std::visit(
            [&](auto& ch) {
                using T = std::decay_t<decltype(ch)>;
                if constexpr (std::is_same_v<T, Pauli>)
                    schema("/channel", "--gamma is ambiguous for the pauli channel; set gamma_perp and gamma_z in the file");
                else
                    ch.gamma = *ov.gamma;
            },
            cfg.channel);
        try {
            validate(cfg.channel);
        } catch (const Error& e) {
            physics("/channel/gamma", e.what());
        }
    }
    if (ov.t_max) {
        if (!(*ov.t_max > 0.0) || !std::isfinite(*ov.t_max)) schema("/horizon", "--t-max must be > 0");
        cfg.horizon = *ov.t_max;
    }
    if (ov.out) cfg.output_path = *ov.out;
    if (ov.format) {
        if (*ov.format == "csv")
            cfg.format = OutputFormat::csv;
        else if (*ov.format == "json")
            cfg.format = OutputFormat::json;
        else
            schema("/output/format", "expected csv or json");
    }
    check_config(cfg);
}

} // namespace ergoflux
