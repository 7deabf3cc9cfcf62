#include "xpmarl/harness/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "xpmarl/errors.hpp"
#include "xpmarl/harness/trajectory_log.hpp"

namespace xpmarl {

std::vector<VariantComparison> compare_to_baseline(const std::vector<MetricsReport>& reports,
                                                   const std::string& baseline) {
  if (reports.empty()) throw InvalidArgument("no reports to compare");
  auto base = std::find_if(reports.begin(), reports.end(), [&](const MetricsReport& r) { return r.variant == baseline; });
  if (base == reports.end()) base = reports.begin();
  std::vector<VariantComparison> out;
  for (const auto& r : reports) {
    VariantComparison c;
    c.variant = r.variant;
    c.collision_rate = r.collision_rate;
    c.relative_average_speed = r.relative_average_speed;
    const double base_collision = base->collision_rate.median;
    c.collision_improvement_pct = base_collision != 0.0 ? improvement_pct(base_collision, r.collision_rate.median) : 0.0;
    const double base_speed = base->relative_average_speed.median;
    c.speed_change_pct =
        base_speed != 0.0 ? (r.relative_average_speed.median - base_speed) / base_speed * 100.0 : 0.0;
    out.push_back(c);
  }
  return out;
}

std::string box_plot_svg(const std::string& title, const std::vector<std::pair<std::string, Summary>>& boxes) {
  constexpr double kWidth = 640.0;
  constexpr double kHeight = 360.0;
  constexpr double kLeft = 60.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 50.0;

  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (const auto& [name, s] : boxes) {
    lo = first ? s.min : std::min(lo, s.min);
    hi = first ? s.max : std::max(hi, s.max);
    first = false;
  }
  if (hi <= lo) hi = lo + 1.0;
  const double plot_h = kHeight - kTop - kBottom;
  auto y_of = [&](double v) { return kTop + (hi - v) / (hi - lo) * plot_h; };
  const double slot = boxes.empty() ? 0.0 : (kWidth - kLeft - kRight) / static_cast<double>(boxes.size());

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    svg << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << y_of(v) << "\" y2=\"" << y_of(v)
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << y_of(v) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(v) << "</text>\n";
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& [name, s] = boxes[i];
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    const double half = slot * 0.25;
    svg << "<line x1=\"" << cx << "\" x2=\"" << cx << "\" y1=\"" << y_of(s.max) << "\" y2=\"" << y_of(s.min)
        << "\" stroke=\"black\"/>\n";
    svg << "<rect x=\"" << cx - half << "\" y=\"" << y_of(s.q3) << "\" width=\"" << 2 * half << "\" height=\""
        << y_of(s.q1) - y_of(s.q3) << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << cx - half << "\" x2=\"" << cx + half << "\" y1=\"" << y_of(s.median) << "\" y2=\""
        << y_of(s.median) << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << cx << "\" y=\"" << kHeight - kBottom + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << name << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<VariantComparison> emit_report(const std::vector<MetricsReport>& reports,
                                           const std::filesystem::path& out_dir) {
  const auto comparison = compare_to_baseline(reports);
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir / "comparison.csv");
  csv << "variant,episodes,collision_median,collision_q1,collision_q3,collision_improvement_pct,"
         "speed_median,speed_q1,speed_q3,speed_change_pct\n";
  std::vector<std::pair<std::string, Summary>> collision_boxes;
  std::vector<std::pair<std::string, Summary>> speed_boxes;
  for (const auto& c : comparison) {
    csv << c.variant << ',' << c.collision_rate.count << ',' << format_double(c.collision_rate.median) << ','
        << format_double(c.collision_rate.q1) << ',' << format_double(c.collision_rate.q3) << ','
        << format_double(c.collision_improvement_pct) << ',' << format_double(c.relative_average_speed.median) << ','
        << format_double(c.relative_average_speed.q1) << ',' << format_double(c.relative_average_speed.q3) << ','
        << format_double(c.speed_change_pct) << '\n';
    collision_boxes.emplace_back(c.variant, c.collision_rate);
    speed_boxes.emplace_back(c.variant, c.relative_average_speed);
  }
  std::ofstream(out_dir / "collision_rate.svg") << box_plot_svg("Collision rate", collision_boxes);
  std::ofstream(out_dir / "relative_speed.svg") << box_plot_svg("Relative average speed", speed_boxes);
  if (!csv) throw ConfigError("cannot write report into " + out_dir.string());
  return comparison;
}

}  // namespace xpmarl
