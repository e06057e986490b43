#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mitrust/records.hpp"
#include "mitrust/stats.hpp"

namespace mitrust {

// Output rendering: outcome-count tables, the per-trial choice-vs-stakes
// dataset, a strip plot, and the analysis report.

std::string render_counts_markdown(const ConditionCounts& counts);
void write_counts_csv(const ConditionCounts& counts, std::ostream& out);

// condition,stake_usd,choice rows; CSV is the canonical figure output.
void write_choices_csv(const std::vector<TrialRecord>& records,
                       std::ostream& out);

// One panel per condition; choices strip-plotted against the stake in
// dollars over [min_usd, max_usd].
std::string render_strip_plot_svg(const std::vector<TrialRecord>& records,
                                  double min_usd, double max_usd);

nlohmann::json analysis_to_json(const AnalysisReport& report);

// Human-readable summary; p-values carry four significant digits.
std::string render_analysis_text(const AnalysisReport& report);

}  // namespace mitrust
