#include "mitrust/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace mitrust {

using nlohmann::json;

namespace {

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

std::string stake_usd(std::int64_t cents) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%02lld",
                static_cast<long long>(cents / 100),
                static_cast<long long>(cents % 100));
  return buf;
}

json maybe_finite(double value) {
  if (std::isfinite(value)) return value;
  return nullptr;
}

}  // namespace

std::string render_counts_markdown(const ConditionCounts& counts) {
  std::ostringstream out;
  out << "| condition | A | B | NA | total |\n";
  out << "|---|---:|---:|---:|---:|\n";
  for (const auto& [label, row] : counts) {
    out << "| " << label << " | " << row.a << " | " << row.b << " | "
        << row.na << " | " << row.total() << " |\n";
  }
  return out.str();
}

void write_counts_csv(const ConditionCounts& counts, std::ostream& out) {
  out << "condition,a,b,na,total\n";
  for (const auto& [label, row] : counts) {
    out << label << ',' << row.a << ',' << row.b << ',' << row.na << ','
        << row.total() << '\n';
  }
}

void write_choices_csv(const std::vector<TrialRecord>& records,
                       std::ostream& out) {
  out << "condition,stake_usd,choice\n";
  for (const TrialRecord& record : records) {
    out << record.condition << ',' << stake_usd(record.endowment_cents) << ','
        << to_string(record.choice) << '\n';
  }
}

std::string render_strip_plot_svg(const std::vector<TrialRecord>& records,
                                  double min_usd, double max_usd) {
  // Stable panel order: sorted condition labels.
  std::map<std::string, std::vector<const TrialRecord*>> by_condition;
  for (const TrialRecord& record : records) {
    by_condition[record.condition].push_back(&record);
  }

  const int width = 840;
  const int panel_height = 80;
  const int margin_left = 230;
  const int margin_top = 30;
  const int margin_bottom = 40;
  const int plot_width = width - margin_left - 30;
  const int height = margin_top +
                     panel_height * static_cast<int>(by_condition.size()) +
                     margin_bottom;
  const double span = std::max(1e-9, max_usd - min_usd);

  auto x_of = [&](std::int64_t cents) {
    const double usd = static_cast<double>(cents) / 100.0;
    return margin_left + (usd - min_usd) / span * plot_width;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << margin_left << "\" y=\"18\" font-size=\"14\">"
      << "Choice by stake (USD)</text>\n";

  int panel = 0;
  for (const auto& [label, rows] : by_condition) {
    const int top = margin_top + panel * panel_height;
    svg << "<text x=\"10\" y=\"" << top + panel_height / 2
        << "\" font-size=\"12\">" << label << "</text>\n";
    svg << "<line x1=\"" << margin_left << "\" y1=\"" << top + panel_height - 8
        << "\" x2=\"" << margin_left + plot_width << "\" y2=\""
        << top + panel_height - 8 << "\" stroke=\"#ccc\"/>\n";
    for (const TrialRecord* record : rows) {
      // Band per choice: A on top, NA mid, B at the bottom.
      int y = top + panel_height - 20;
      const char* fill = "#d95f02";
      if (record->choice == ChoiceLabel::A) {
        y = top + 16;
        fill = "#1b9e77";
      } else if (record->choice == ChoiceLabel::NA) {
        y = top + panel_height / 2 - 2;
        fill = "#999999";
      }
      svg << "<circle cx=\"" << fmt("%.1f", x_of(record->endowment_cents))
          << "\" cy=\"" << y << "\" r=\"2.4\" fill=\"" << fill
          << "\" fill-opacity=\"0.65\"/>\n";
    }
    ++panel;
  }

  // Axis ticks at the grid endpoints and midpoint.
  const int axis_y = margin_top + panel * panel_height + 14;
  for (double usd : {min_usd, (min_usd + max_usd) / 2.0, max_usd}) {
    const double x = margin_left + (usd - min_usd) / span * plot_width;
    svg << "<text x=\"" << fmt("%.1f", x) << "\" y=\"" << axis_y
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt("%.2f", usd)
        << "</text>\n";
  }
  svg << "<text x=\"" << margin_left + plot_width / 2 << "\" y=\""
      << axis_y + 18 << "\" font-size=\"12\" text-anchor=\"middle\">stake "
      << "(USD)</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

json analysis_to_json(const AnalysisReport& report) {
  json tests = json::array();
  for (const ProportionComparison& cmp : report.tests) {
    json t = {
        {"test_name", cmp.name},
        {"chi2", cmp.result.chi2},
        {"df", cmp.result.df},
        {"p", cmp.result.p_two_tailed},
        {"p1_hat", cmp.result.p1_hat},
        {"p2_hat", cmp.result.p2_hat},
        {"corrected", cmp.result.corrected},
        {"counts",
         {{"a", cmp.table.a},
          {"b", cmp.table.b},
          {"c", cmp.table.c},
          {"d", cmp.table.d}}},
    };
    if (cmp.published_chi2) t["published_chi2"] = *cmp.published_chi2;
    if (cmp.note) t["note"] = *cmp.note;
    tests.push_back(std::move(t));
  }

  json fits = json::array();
  for (const ConditionFit& cf : report.fits) {
    fits.push_back({
        {"condition", cf.condition},
        {"beta0", maybe_finite(cf.fit.beta0)},
        {"beta1", maybe_finite(cf.fit.beta1)},
        {"se0", maybe_finite(cf.fit.se0)},
        {"se1", maybe_finite(cf.fit.se1)},
        {"z1", maybe_finite(cf.fit.z1)},
        {"p1", maybe_finite(cf.fit.p1)},
        {"log_lik", maybe_finite(cf.fit.log_lik)},
        {"iterations", cf.fit.iterations},
        {"converged", cf.fit.converged},
        {"separation_flag", cf.fit.separation_flag},
        {"estimable", cf.estimable},
    });
  }

  return json{{"wave", wave_number(report.wave)},
              {"tests", std::move(tests)},
              {"fits", std::move(fits)},
              {"notes", report.notes}};
}

std::string render_analysis_text(const AnalysisReport& report) {
  std::ostringstream out;
  out << "analysis for wave " << wave_number(report.wave) << "\n";
  for (const ProportionComparison& cmp : report.tests) {
    out << cmp.name << ": chi2 = " << fmt("%.2f", cmp.result.chi2)
        << ", df = " << cmp.result.df
        << ", p = " << fmt("%.4g", cmp.result.p_two_tailed)
        << (cmp.result.corrected ? " (continuity corrected)" : "") << "\n";
  }
  for (const ConditionFit& cf : report.fits) {
    out << "fit " << cf.condition << ": ";
    if (!cf.estimable) {
      out << "not estimable (separation or degenerate outcomes)\n";
      continue;
    }
    out << "beta1 = " << fmt("%.6g", cf.fit.beta1) << ", se = "
        << fmt("%.6g", cf.fit.se1) << ", z = " << fmt("%.4g", cf.fit.z1)
        << ", p = " << fmt("%.4g", cf.fit.p1)
        << (cf.fit.converged ? "" : " [not converged]") << "\n";
  }
  for (const std::string& note : report.notes) {
    out << "note: " << note << "\n";
  }
  return out.str();
}

}  // namespace mitrust
