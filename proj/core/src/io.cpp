#include "convexreach/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "convexreach/errors.hpp"

namespace convexreach {

using json = nlohmann::ordered_json;

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& field) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (field == "inf") return std::numeric_limits<double>::infinity();
    if (field == "-inf") return -std::numeric_limits<double>::infinity();
    throw PreconditionError("malformed number '" + field + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

void expect_header(std::istream& in, const std::vector<std::string>& expected) {
  std::string line;
  if (!next_line(in, line) || split_csv_line(line) != expected) {
    throw PreconditionError("unexpected CSV header '" + line + "'");
  }
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json vector_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v(i)));
  return arr;
}

Vector vector_from(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_from(j[i]);
  return v;
}

template <typename F>
auto parse_json(const std::string& text, const char* what, F&& body) {
  try {
    return body(json::parse(text));
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

}  // namespace

void write_bound_curves_csv(std::ostream& out, std::span<const BoundCurve> curves) {
  out << "method,t1,R\n";
  for (const BoundCurve& c : curves) {
    for (const BoundSample& s : c.samples) {
      out << to_string(c.method) << ',' << format_double(s.t1) << ',' << format_double(s.radius)
          << '\n';
    }
  }
}

std::vector<BoundCurve> read_bound_curves_csv(std::istream& in) {
  expect_header(in, {"method", "t1", "R"});
  std::vector<BoundCurve> curves;
  std::string line;
  while (next_line(in, line)) {
    const auto f = split_csv_line(line);
    if (f.size() != 3) throw PreconditionError("bound curve row needs 3 fields: '" + line + "'");
    const BoundMethod m = bound_method_from_string(f[0]);
    if (curves.empty() || curves.back().method != m) curves.push_back(BoundCurve{m, {}});
    curves.back().samples.push_back({parse_double(f[1]), parse_double(f[2])});
  }
  for (const BoundCurve& c : curves) c.validate();
  return curves;
}

std::string bound_curves_to_json(std::span<const BoundCurve> curves) {
  json root;
  root["curves"] = json::array();
  for (const BoundCurve& c : curves) {
    json jc;
    jc["method"] = to_string(c.method);
    jc["samples"] = json::array();
    for (const BoundSample& s : c.samples) {
      jc["samples"].push_back(json{{"t1", number(s.t1)}, {"R", number(s.radius)}});
    }
    root["curves"].push_back(jc);
  }
  return root.dump(2) + "\n";
}

std::vector<BoundCurve> bound_curves_from_json(const std::string& text) {
  return parse_json(text, "bound curve", [](const json& root) {
    std::vector<BoundCurve> curves;
    for (const json& jc : root.at("curves")) {
      BoundCurve c;
      c.method = bound_method_from_string(jc.at("method").get<std::string>());
      for (const json& s : jc.at("samples")) {
        c.samples.push_back({number_from(s.at("t1")), number_from(s.at("R"))});
      }
      c.validate();
      curves.push_back(std::move(c));
    }
    return curves;
  });
}

void write_bounds_table_csv(std::ostream& out, const BoundsTable& table) {
  out << "t1";
  for (const BoundColumn& c : table.columns) {
    if (c.values.size() != table.t1.size()) {
      throw DimensionError("bounds table column '" + c.name + "' has the wrong length");
    }
    out << ',' << c.name;
  }
  out << '\n';
  for (std::size_t i = 0; i < table.t1.size(); ++i) {
    out << format_double(table.t1[i]);
    for (const BoundColumn& c : table.columns) {
      out << ',';
      if (c.values[i]) out << format_double(*c.values[i]);
    }
    out << '\n';
  }
}

BoundsTable read_bounds_table_csv(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw PreconditionError("empty bounds table");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "t1") throw PreconditionError("bounds table needs t1 column");
  BoundsTable table;
  for (std::size_t k = 1; k < header.size(); ++k) table.columns.push_back({header[k], {}});
  while (next_line(in, line)) {
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw PreconditionError("bounds table row has wrong field count: '" + line + "'");
    }
    table.t1.push_back(parse_double(f[0]));
    for (std::size_t k = 1; k < f.size(); ++k) {
      auto& col = table.columns[k - 1].values;
      col.push_back(f[k].empty() ? std::nullopt : std::optional<double>(parse_double(f[k])));
    }
  }
  return table;
}

std::string certificate_to_json(const ConvexityCertificate& cert) {
  json j;
  j["criterion"] = cert.criterion;
  j["verdict"] = to_string(cert.verdict);
  j["sup_lhs"] = number(cert.sup_lhs);
  j["threshold"] = number(cert.threshold);
  j["witness"] = json{{"x", vector_json(cert.witness.x)}, {"h", vector_json(cert.witness.h)}};
  j["radius"] = number(cert.radius);
  j["center"] = vector_json(cert.center);
  j["t0"] = number(cert.t0);
  j["t1"] = number(cert.t1);
  j["margin"] = number(cert.margin);
  j["refine_tol"] = number(cert.refine_tol);
  j["integrator_tol"] = number(cert.integrator_tol);
  j["samples_evaluated"] = cert.samples_evaluated;
  j["samples_failed"] = cert.samples_failed;
  j["model"] = cert.model_name;
  j["constants_provenance"] = cert.constants_provenance;
  j["notes"] = cert.notes;
  return j.dump(2) + "\n";
}

ConvexityCertificate certificate_from_json(const std::string& text) {
  return parse_json(text, "certificate", [](const json& j) {
    ConvexityCertificate c;
    c.criterion = j.at("criterion").get<std::string>();
    c.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    c.sup_lhs = number_from(j.at("sup_lhs"));
    c.threshold = number_from(j.at("threshold"));
    c.witness.x = vector_from(j.at("witness").at("x"));
    c.witness.h = vector_from(j.at("witness").at("h"));
    c.radius = number_from(j.at("radius"));
    c.center = vector_from(j.at("center"));
    c.t0 = number_from(j.at("t0"));
    c.t1 = number_from(j.at("t1"));
    c.margin = number_from(j.at("margin"));
    c.refine_tol = number_from(j.at("refine_tol"));
    c.integrator_tol = number_from(j.at("integrator_tol"));
    c.samples_evaluated = j.at("samples_evaluated").get<int>();
    c.samples_failed = j.at("samples_failed").get<int>();
    c.model_name = j.at("model").get<std::string>();
    c.constants_provenance = j.at("constants_provenance").get<std::string>();
    c.notes = j.at("notes").get<std::vector<std::string>>();
    return c;
  });
}

void write_polygon_csv(std::ostream& out, const Polygon& polygon) {
  out << "x,y\n";
  for (const Point2& v : polygon.vertices) {
    out << format_double(v.x()) << ',' << format_double(v.y()) << '\n';
  }
}

Polygon read_polygon_csv(std::istream& in) {
  expect_header(in, {"x", "y"});
  Polygon p;
  std::string line;
  while (next_line(in, line)) {
    const auto f = split_csv_line(line);
    if (f.size() != 2) throw PreconditionError("polygon row needs 2 fields: '" + line + "'");
    p.vertices.emplace_back(parse_double(f[0]), parse_double(f[1]));
  }
  return p;
}

void write_halfplanes_csv(std::ostream& out, std::span<const SupportingHalfplane> halfplanes) {
  out << "x,y,nx,ny\n";
  for (const SupportingHalfplane& hp : halfplanes) {
    const Point2 n = hp.normal.normalized();
    out << format_double(hp.point.x()) << ',' << format_double(hp.point.y()) << ','
        << format_double(n.x()) << ',' << format_double(n.y()) << '\n';
  }
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kPad = 60.0;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string svg_open() {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

}  // namespace

std::string bounds_plot_svg(const BoundsTable& table) {
  double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
  double lmin = tmin, lmax = -tmin;
  for (std::size_t i = 0; i < table.t1.size(); ++i) {
    for (const BoundColumn& c : table.columns) {
      if (i < c.values.size() && c.values[i] && *c.values[i] > 0.0) {
        tmin = std::min(tmin, table.t1[i]);
        tmax = std::max(tmax, table.t1[i]);
        lmin = std::min(lmin, std::log10(*c.values[i]));
        lmax = std::max(lmax, std::log10(*c.values[i]));
      }
    }
  }
  std::ostringstream os;
  os << svg_open();
  if (!(tmax >= tmin)) {
    os << "</svg>\n";
    return os.str();
  }
  lmin = std::floor(lmin);
  lmax = std::max(std::ceil(lmax), lmin + 1.0);
  if (tmax == tmin) tmax = tmin + 1.0;
  auto px = [&](double t) { return kPad + (t - tmin) / (tmax - tmin) * (kWidth - 2 * kPad); };
  auto py = [&](double l) {
    return kHeight - kPad - (l - lmin) / (lmax - lmin) * (kHeight - 2 * kPad);
  };
  os << "<g stroke=\"black\" fill=\"none\">\n"
     << "<line x1=\"" << kPad << "\" y1=\"" << kHeight - kPad << "\" x2=\"" << kWidth - kPad
     << "\" y2=\"" << kHeight - kPad << "\"/>\n"
     << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\""
     << kHeight - kPad << "\"/>\n</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (double l = lmin; l <= lmax + 0.5; l += 1.0) {
    os << "<text x=\"" << kPad - 8 << "\" y=\"" << py(l) + 4
       << "\" text-anchor=\"end\">1e" << static_cast<int>(l) << "</text>\n";
  }
  os << "<text x=\"" << kPad << "\" y=\"" << kHeight - kPad + 18 << "\">"
     << format_double(tmin) << "</text>\n"
     << "<text x=\"" << kWidth - kPad << "\" y=\"" << kHeight - kPad + 18
     << "\" text-anchor=\"end\">" << format_double(tmax) << "</text>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15
     << "\" text-anchor=\"middle\">t1</text>\n";
  for (std::size_t k = 0; k < table.columns.size(); ++k) {
    const BoundColumn& c = table.columns[k];
    const char* color = kColors[k % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < table.t1.size() && i < c.values.size(); ++i) {
      if (c.values[i] && *c.values[i] > 0.0) {
        os << px(table.t1[i]) << ',' << py(std::log10(*c.values[i])) << ' ';
      }
    }
    os << "\"/>\n<text x=\"" << kWidth - kPad - 4 << "\" y=\"" << kPad + 16.0 * k
       << "\" text-anchor=\"end\" fill=\"" << color << "\">" << c.name << "</text>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::string approximation_svg(const Polygon& outer, const Polygon& inner,
                              std::span<const Point2> samples) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  auto grow = [&](const Point2& p) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  };
  for (const Point2& p : outer.vertices) grow(p);
  for (const Point2& p : inner.vertices) grow(p);
  for (const Point2& p : samples) grow(p);
  std::ostringstream os;
  os << svg_open();
  if (!(xmax >= xmin)) {
    os << "</svg>\n";
    return os.str();
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
  const double s = std::min(kWidth, kHeight) - 2 * kPad;
  auto px = [&](const Point2& p) { return kPad + (p.x() - xmin) / span * s; };
  auto py = [&](const Point2& p) { return kHeight - kPad - (p.y() - ymin) / span * s; };
  auto polygon = [&](const Polygon& poly, const char* style) {
    os << "<polygon fill=\"none\" " << style << " points=\"";
    for (const Point2& v : poly.vertices) os << px(v) << ',' << py(v) << ' ';
    os << "\"/>\n";
  };
  polygon(outer, "stroke=\"#1f77b4\"");
  polygon(inner, "stroke=\"#d62728\" stroke-dasharray=\"6,4\"");
  for (const Point2& p : samples) {
    os << "<circle cx=\"" << px(p) << "\" cy=\"" << py(p) << "\" r=\"1.5\" fill=\"black\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace convexreach
