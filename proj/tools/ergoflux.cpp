#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ergoflux/config.hpp"
#include "ergoflux/error.hpp"
#include "ergoflux/runner.hpp"

namespace {

int report(std::string_view category, int code, const std::string& message) {
    nlohmann::json j;
    j["category"] = std::string(category);
    j["exit_code"] = code;
    j["message"] = message;
    std::cerr << j.dump() << '\n'; // dump() without indent is a single line
    return code;
}

struct Flags {
    std::string config;
    std::optional<double> gamma, t_max;
    std::optional<std::string> out, format;
};

} // namespace

int main(int argc, char** argv) {
    using namespace ergoflux;

    CLI::App app{"Ergotropy dynamics and Mpemba crossings of open quantum batteries"};
    app.require_subcommand(1);
    Flags flags;
    for (auto c : {Command::traj, Command::crossings, Command::region, Command::verify, Command::spectrum}) {
        auto* sub = app.add_subcommand(std::string(command_name(c)));
        sub->add_option("--config", flags.config, "JSON config file")->required();
        sub->add_option("--gamma", flags.gamma, "override the channel's base rate");
        sub->add_option("--t-max", flags.t_max, "override the time horizon");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--format", flags.format, "csv or json");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        return report("usage", 2, e.what());
    }

    const auto cmd = command_from_name(app.get_subcommands().front()->get_name());
    try {
        RunConfig cfg = load_config(flags.config, cmd); // rejects a conflicting "command" key
        apply_overrides(cfg, {flags.gamma, flags.t_max, flags.out, flags.format});
        const auto res = run(cfg);
        for (const auto& f : res.files) std::cout << f.string() << '\n';
        if (!res.checks_passed) return report("verify", 3, "one or more verify checks failed; see verify.json");
        return 0;
    } catch (const Error& e) {
        return report(category_name(e.category()), exit_code(e.category()), e.what());
    } catch (const std::exception& e) {
        return report("internal", 1, e.what());
    }
}
