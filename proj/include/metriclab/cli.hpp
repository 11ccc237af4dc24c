#pragma once

#include <string>
#include <utility>
#include <vector>

#include "metriclab/point.hpp"

namespace metriclab {

// Parse "x1,..,xn;y1,..,yn" into two equal-dimension points. Throws InvalidSpec.
std::pair<Point, Point> parse_points(const std::string& text);

// Parse "lo1,..,lon;hi1,..,hin" into a box with positive extents. Throws InvalidSpec.
Box parse_region(const std::string& text);

// Command-line entry point (argv[0] is the program name). Exit codes:
//   0  success
//   1  usage, spec, or I/O errors (one-line diagnostic on stderr)
//   2  verify found at least one bound violation
int run_cli(int argc, const char* const* argv);

// Convenience overload: args without the program name.
int run_cli(const std::vector<std::string>& args);

} // namespace metriclab
