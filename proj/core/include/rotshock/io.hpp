#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rotshock/background.hpp"
#include "rotshock/elliptic.hpp"
#include "rotshock/iteration.hpp"
#include "rotshock/shockfit.hpp"
#include "rotshock/supersonic.hpp"

namespace rotshock {

// Fixed 17-significant-digit formatting used by every CSV writer.
std::string format_double(double v);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Columns on both sides of the straight shock with the pointwise jump residuals.
void write_background_csv(const std::filesystem::path& path, const BackgroundSolution& bg);
// One row per (y1 node, half row); u2 is the average of the two node rows.
void write_supersonic_csv(const std::filesystem::path& path, const SupersonicSolution& sup);
// One row per x-face of the subsonic grid, full state plus physical coordinates.
void write_subsonic_csv(const std::filesystem::path& path, const Problem& pr,
                        const SubsonicColumns& cols, const IterationState& s);
void write_front_csv(const std::filesystem::path& path, const ShockFront& f);
void write_iteration_log(const std::filesystem::path& path,
                         const std::vector<IterationLogEntry>& log);
// Coefficients, boundary data and sources of one discrete elliptic problem.
void write_elliptic_dump(const std::filesystem::path& dir, const DiscreteEllipticProblem& p);

// Iterate plus the config text it was produced from.
std::string state_to_json(const IterationState& s, const std::string& config_text);
IterationState state_from_json(const std::string& text, std::string* config_text);

}  // namespace rotshock
