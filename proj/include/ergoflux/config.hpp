#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ergoflux/channels.hpp"
#include "ergoflux/region.hpp"
#include "ergoflux/state.hpp"

namespace ergoflux {

enum class Command { traj, crossings, region, verify, spectrum };
enum class OutputFormat { csv, json };

std::string_view command_name(Command c);
std::optional<Command> command_from_name(std::string_view s);

struct StateDescriptor {
    enum class Kind { bloch, qutrit, pure };
    Kind kind = Kind::bloch;
    BlochVector bloch;     // bloch, and pure after conversion
    QutritDiagonal qutrit; // qutrit
    double theta = 0.0;    // pure
    double phi = 0.0;

    DensityMatrix density() const;
};

struct RunConfig {
    Command command = Command::traj;
    ChannelSpec channel = Gadc{};
    std::vector<StateDescriptor> states;
    std::optional<GridSpec> grid;
    std::optional<double> horizon;
    std::size_t n_points = 501;        // traj
    std::string scan;                  // region: emc | state_vs_emc | crossing_count | qutrit_simplex | mpemba_parameter
    std::vector<std::string> checks;   // verify: L1..L4, oracle, prediction
    std::size_t samples = 1000;        // verify
    std::string output_path = "ergoflux_out";
    OutputFormat format = OutputFormat::csv;
    std::uint64_t seed = 1;
};

struct Overrides {
    std::optional<double> gamma;
    std::optional<double> t_max;
    std::optional<std::string> out;
    std::optional<std::string> format;
};

// JSON text to a validated config. Errors: config_syntax (with line/column),
// config_schema (with the JSON pointer of the offending key), physics.
// A command given on the command line may stand in for the file's "command" key.
RunConfig parse_config(std::string_view source, std::optional<Command> command = std::nullopt);
RunConfig load_config(const std::filesystem::path& path, std::optional<Command> command = std::nullopt);

// Flags win over file values; the result is re-validated.
void apply_overrides(RunConfig& cfg, const Overrides& ov);
// arity and cross-field rules
void check_config(const RunConfig& cfg);

} // namespace ergoflux
