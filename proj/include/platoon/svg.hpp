#ifndef PLATOON_SVG_HPP
#define PLATOON_SVG_HPP

#include <string>
#include <utility>
#include <vector>

#include "platoon/simulate.hpp"

namespace platoon {

struct SvgSeries {
    std::string label;
    std::vector<double> x, y;
};

// Self-contained SVG line chart (no external assets). Long series are
// decimated for file size; axes carry min/max tick labels.
std::string svg_line_chart(const std::string& title, const std::vector<SvgSeries>& series,
                           const std::string& x_label, const std::string& y_label,
                           int width = 900, int height = 300);

// The four standard panels of a run: inputs (leader control plus
// disturbances), spacing errors, positions, velocities. Returned as
// (file-stem, svg-content) pairs.
std::vector<std::pair<std::string, std::string>> plot_panels(const SimScenario& sc,
                                                             const SimResult& r);

} // namespace platoon

#endif
