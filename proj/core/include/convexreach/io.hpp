#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convexreach/certificates.hpp"
#include "convexreach/criterion.hpp"
#include "convexreach/polyapprox.hpp"

namespace convexreach {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

/// Long format: header "method,t1,R", one row per sample.
void write_bound_curves_csv(std::ostream& out, std::span<const BoundCurve> curves);
std::vector<BoundCurve> read_bound_curves_csv(std::istream& in);

/// {"curves": [{"method": ..., "samples": [{"t1": ..., "R": ...}]}]}
std::string bound_curves_to_json(std::span<const BoundCurve> curves);
std::vector<BoundCurve> bound_curves_from_json(const std::string& text);

/// One column of a wide bounds table; missing entries are empty cells.
struct BoundColumn {
  std::string name;
  std::vector<std::optional<double>> values;
};

struct BoundsTable {
  std::vector<double> t1;
  std::vector<BoundColumn> columns;
};

/// Wide format: header "t1,<column>...", one row per grid point.
void write_bounds_table_csv(std::ostream& out, const BoundsTable& table);
BoundsTable read_bounds_table_csv(std::istream& in);

/// All certificate fields; NaN is stored as null.
std::string certificate_to_json(const ConvexityCertificate& cert);
ConvexityCertificate certificate_from_json(const std::string& text);

/// Header "x,y", vertices in order.
void write_polygon_csv(std::ostream& out, const Polygon& polygon);
Polygon read_polygon_csv(std::istream& in);

/// Header "x,y,nx,ny" with unit normals.
void write_halfplanes_csv(std::ostream& out, std::span<const SupportingHalfplane> halfplanes);

/// Log-scale plot of radius against t1, one polyline per column.
std::string bounds_plot_svg(const BoundsTable& table);

/// Outer polygon (solid), inner polygon (dashed) and image samples (dots).
std::string approximation_svg(const Polygon& outer, const Polygon& inner,
                              std::span<const Point2> samples);

}  // namespace convexreach
