#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wolbopt/adjoint.hpp"
#include "wolbopt/analysis.hpp"
#include "wolbopt/grid.hpp"
#include "wolbopt/optimize.hpp"
#include "wolbopt/pde.hpp"

namespace wolbopt {

inline constexpr const char* kToolVersion = "0.1.0";

// 12 significant digits.
std::string format_number(double v);

// Header comment written as the first line of every CSV output.
std::string header_line(const std::string& config_hash);

void write_text(const std::filesystem::path& path, const std::string& text);

std::string trajectory_csv(const Grid1D& grid, const Trajectory& traj,
                           const std::vector<std::size_t>& steps, const std::string& header);
std::string spectral_csv(const SpectralReport& report, const std::string& header);
std::string subsolution_sweep_csv(const std::vector<SubsolutionReport>& rows,
                                  const std::string& header);
std::string profile_csv(const Grid1D& grid, const SpatialField& values, const std::string& column,
                        const std::string& header);
std::string history_csv(const std::vector<HistoryEntry>& history, const std::string& header);
std::string summary_json(const OptimResult& result, const std::string& config_hash);
std::string asymptotics_csv(const std::vector<AsymptoticRow>& rows, const std::string& header);

// One value per node, optionally preceded by an x column; '#' lines and a
// non-numeric header row are skipped. InputError on unreadable or mis-sized input.
SpatialField read_profile_csv(const std::filesystem::path& path, const Grid1D& grid);

}  // namespace wolbopt
