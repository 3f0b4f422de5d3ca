#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "m1dg/diagnostics.hpp"
#include "m1dg/dg_space.hpp"
#include "m1dg/fv_reference.hpp"
#include "m1dg/scenarios.hpp"

namespace m1dg {

enum class Sampling { CellMeans, Nodes };

Sampling parse_sampling(const std::string& s);

/// Full round-trip formatting used by every writer.
std::string format_double(double v);

// Header "x,y,psi0,psi1x,psi1y,f". Cell means sit at centroids.
void write_field_csv(const std::filesystem::path& path, const DGField& field, Sampling sampling = Sampling::CellMeans);
void write_field_csv(const std::filesystem::path& path, const FVGrid& grid);

// Header "time,pct_gp,pct_cm,theta_max".
void write_stats_csv(const std::filesystem::path& path, const std::vector<RealizabilityStats>& series);
std::vector<RealizabilityStats> read_stats_csv(const std::filesystem::path& path);

// Header "inv_h,E1,order1,Einf,orderinf,theta_max"; missing orders are empty.
void write_study_csv(const std::filesystem::path& path, const std::vector<StudyRow>& rows);

/// Legacy ASCII unstructured grid: cell means as cell data, vertex values
/// (averaged over incident cells) as point data.
void write_vtk(const std::filesystem::path& path, const DGField& field);

} // namespace m1dg
