#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spatial_sir/presets.hpp"

namespace spatial_sir {

enum class OutputFormat { csv, csv_svg };

OutputFormat parse_output_format(const std::string& s);

inline constexpr const char* kTraceHeader =
    "scenario_id,seed,day,s,i,r,isolated_share,locked_share,avg_contacts,new_infections,lambda_hat";
inline constexpr const char* kPanelHeader =
    "city_id,day,density,n,treated,i_count,s_count,r_count,i_frac,s_frac,growth,contacts";

std::string trace_csv(std::span<const RunTrace> traces);
std::string panel_csv(const PanelDataset& panel);
std::string averaged_csv(std::span<const ReplicationResult> reps);
std::string summary_csv(std::span<const Metric> metrics);
std::string sir_csv(std::span<const SirSeries> series);
std::string predictions_csv(std::span<const NamedPrediction> predictions);

/// Parses a panel CSV with the header above; throws ValidationError on bad rows.
PanelDataset read_panel_csv(const std::filesystem::path& path);

struct ChartSeries {
    std::string name;
    std::vector<double> values;
};

/// Minimal polyline chart, x axis is the index.
std::string svg_chart(const std::string& title, std::span<const ChartSeries> series);

/// Writes a text file, creating parent directories. Throws ValidationError when unwritable.
void write_text(const std::filesystem::path& path, const std::string& content);

/// Writes every artifact of a preset run plus manifest.json; returns the files written.
std::vector<std::filesystem::path> write_outputs(const PresetOutcome& outcome, const std::filesystem::path& dir,
                                                 OutputFormat format);

}  // namespace spatial_sir
