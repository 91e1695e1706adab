#pragma once

#include <filesystem>

#include "dpslab/experiment.hpp"

namespace dps::report {

// Renders the result tables (CSV, one file per table) plus a human-readable
// report.txt into `report_dir`:
//   table2.csv  mean similarity per generator
//   table3.csv  per-pattern text statistics
//   table4.csv  per-criterion ranking counts
//   table5.csv  per-pattern cosine / F1 / combined
//   table6.csv  per-pattern aggregate ranking counts
//   table7.csv  per-iteration metric spread with an Overall row
//   table8.csv  per-criterion first-place counts pooled over iterations
// Tables whose inputs are absent are omitted with a notice. Output is a
// deterministic function of the results bundle. Throws
// pipeline::NoResults when there is nothing to report.
void render(const pipeline::ResultsBundle& results,
            const pipeline::ExperimentConfig& config,
            const std::filesystem::path& report_dir);

}  // namespace dps::report
