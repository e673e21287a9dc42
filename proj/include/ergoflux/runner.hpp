#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ergoflux/config.hpp"
#include "ergoflux/mpemba.hpp"
#include "ergoflux/region.hpp"

namespace ergoflux {

struct RunResult {
    std::vector<std::filesystem::path> files; // written, in order
    bool checks_passed = true;                // verify only
};

// Executes the command and writes its artifacts under cfg.output_path (a directory).
RunResult run(const RunConfig& cfg);

// formatting shared by the writers; exposed for tests
std::string format_double(double v); // 17 significant digits
std::string trajectory_csv(const Trajectory& tr);
std::string region_csv(const RegionMap& map);
// write-temp-then-rename
void write_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace ergoflux
