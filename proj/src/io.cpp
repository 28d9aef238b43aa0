#include "mmass/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "mmass/error.hpp"

namespace mmass::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Non-empty, non-comment lines.
std::vector<std::string_view> data_lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n'))
    if (!line.empty() && line.front() != '#') out.push_back(line);
  return out;
}

double parse_number(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  require(ec == std::errc() && ptr == end, "not a number: '" + std::string(s) + "'");
  return v;
}

bool is_number(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && ptr == end;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::invalid_input, std::string("malformed JSON: ") + e.what());
  }
}

template <class T>
T get_field(const json& j, const char* key) {
  require(j.is_object() && j.contains(key), std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(Errc::invalid_input, std::string("bad field '") + key + "': " + e.what());
  }
}

std::string first_char(std::string_view text) {
  const auto t = trim(text);
  return t.empty() ? std::string() : std::string(1, t.front());
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProbVector prob_vector_from_json(const json& j, bool normalize) {
  try {
    if (j.is_array()) return ProbVector(j.get<std::vector<double>>(), normalize);
    if (j.is_object() && j.contains("masses")) return ProbVector(j.at("masses").get<std::vector<double>>(), normalize);
    if (j.is_object() && j.contains("runs")) {
      std::vector<MassRun> runs;
      for (const auto& r : j.at("runs")) {
        if (r.is_array())
          runs.push_back({r.at(0).get<double>(), r.at(1).get<std::uint64_t>()});
        else
          runs.push_back({r.at("mass").get<double>(), r.at("count").get<std::uint64_t>()});
      }
      return ProbVector::from_runs(std::move(runs), normalize);
    }
  } catch (const json::exception& e) {
    fail(Errc::invalid_input, std::string("bad distribution JSON: ") + e.what());
  }
  fail(Errc::invalid_input, "distribution JSON must be an array, {masses} or {runs}");
}

ProbVector prob_vector_from_csv(std::string_view text, bool normalize) {
  std::vector<double> masses;
  for (auto line : data_lines(text)) {
    const auto cells = split(line, ',');
    if (masses.empty() && !is_number(cells.back())) continue;  // header
    masses.push_back(parse_number(cells.back()));
  }
  return ProbVector(std::move(masses), normalize);
}

ProbVector parse_prob_vector(std::string_view text, bool normalize) {
  const auto c = first_char(text);
  if (c == "[" || c == "{") return prob_vector_from_json(parse_json(text), normalize);
  return prob_vector_from_csv(text, normalize);
}

json to_json(const ProbVector& d, bool run_length) {
  if (!run_length) return json(d.masses());
  json runs = json::array();
  for (const auto& r : d.runs()) runs.push_back({{"mass", r.mass}, {"count", r.count}});
  return {{"runs", runs}, {"size", d.size()}};
}

std::string to_csv(const ProbVector& d) {
  std::string out;
  for (double m : d.masses()) out += format_double(m) + "\n";
  return out;
}

FamilySpec family_from_json(const json& j) {
  const auto name = get_field<std::string>(j, "family");
  const json params = j.contains("params") ? j.at("params") : json::object();
  const double tol = j.contains("truncation_tol") ? get_field<double>(j, "truncation_tol") : 1e-12;
  if (name == "geometric")
    return {CountableFamily::geometric(params.contains("ratio") ? get_field<double>(params, "ratio") : 0.5), tol};
  if (name == "tight-countable")
    return {tight_countable(get_field<std::uint64_t>(params, "a")), tol};
  if (name == "explicit")
    return {CountableFamily::explicit_terms(get_field<std::vector<double>>(params, "terms"),
                                            params.contains("tail") ? get_field<double>(params, "tail") : 0.0),
            tol};
  if (name == "rate-lb") {
    std::vector<double> r;
    if (params.contains("r")) {
      r = get_field<std::vector<double>>(params, "r");
    } else {
      const auto seq = params.contains("sequence") ? get_field<std::string>(params, "sequence") : "inverse-log";
      require(seq == "inverse-log", "unknown rate-lb sequence '" + seq + "'");
      r = inverse_log_sequence(get_field<std::uint64_t>(params, "t_max"));
    }
    return {CountableFamily::from_finite(rate_lb(r).distribution), tol};
  }
  fail(Errc::invalid_input, "unknown family '" + name + "'");
}

json to_json(const CountableFamily& f, double truncation_tol) {
  json params = json::object();
  switch (f.kind()) {
    case CountableFamily::Kind::geometric: params["ratio"] = f.ratio(); break;
    case CountableFamily::Kind::dyadic_blocks: params["a"] = f.block_size(); break;
    case CountableFamily::Kind::explicit_terms:
      params["terms"] = std::vector<double>(f.terms().begin(), f.terms().end());
      params["tail"] = f.tail_after();
      break;
  }
  return {{"family", f.name()}, {"params", params}, {"truncation_tol", truncation_tol}};
}

json to_json(const MassCurve& c) {
  json rows = json::array();
  for (std::size_t i = 0; i < c.t_values.size(); ++i)
    rows.push_back({{"t", c.t_values[i]}, {"value", c.values[i]}, {"lower", c.lower[i]}, {"upper", c.upper[i]}});
  return rows;
}

std::string to_csv(const MassCurve& c) {
  std::string out = "t,value,lower,upper\n";
  for (std::size_t i = 0; i < c.t_values.size(); ++i)
    out += std::to_string(c.t_values[i]) + "," + format_double(c.values[i]) + "," + format_double(c.lower[i]) + "," +
           format_double(c.upper[i]) + "\n";
  return out;
}

MassCurve mass_curve_from_json(const json& j) {
  require(j.is_array(), "mass curve JSON must be an array of rows");
  MassCurve c;
  for (const auto& row : j) {
    c.t_values.push_back(get_field<std::uint64_t>(row, "t"));
    c.values.push_back(get_field<double>(row, "value"));
    c.lower.push_back(get_field<double>(row, "lower"));
    c.upper.push_back(get_field<double>(row, "upper"));
  }
  return c;
}

MassCurve mass_curve_from_csv(std::string_view text) {
  const auto lines = data_lines(text);
  require(!lines.empty() && lines.front() == "t,value,lower,upper", "mass curve CSV needs header t,value,lower,upper");
  MassCurve c;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    require(cells.size() == 4, "mass curve CSV rows need four columns");
    c.t_values.push_back(static_cast<std::uint64_t>(parse_number(cells[0])));
    c.values.push_back(parse_number(cells[1]));
    c.lower.push_back(parse_number(cells[2]));
    c.upper.push_back(parse_number(cells[3]));
  }
  return c;
}

json to_json(const ExtremalSolution& s) {
  json j = {{"n", s.n},         {"t", s.t},         {"x_star", s.x_star},
            {"heavy", s.heavy}, {"value", s.value}, {"is_uniform", s.is_uniform}};
  if (s.log_excess) j["log_excess"] = *s.log_excess;
  return j;
}

json to_json(const ThresholdResult& r) {
  return {{"n", r.n},
          {"tau", r.tau},
          {"margin_at_tau", r.margin_at_tau},
          {"scan_range", {r.scan_first, r.scan_last}},
          {"monotone", r.monotone}};
}

json to_json(const McReport& r) {
  json j = {{"estimate", r.estimate}, {"std_error", r.std_error}, {"replicates", r.replicates}, {"seed", r.seed}};
  if (r.reference) j["reference"] = *r.reference;
  if (r.reference_std_error) j["reference_std_error"] = *r.reference_std_error;
  if (r.within_3se) j["within_3se"] = *r.within_3se;
  if (r.exceed_freq) j["exceed_freq"] = *r.exceed_freq;
  if (r.exceed_std_error) j["exceed_std_error"] = *r.exceed_std_error;
  if (r.bound) j["bound"] = *r.bound;
  if (r.violated) j["violated"] = *r.violated;
  return j;
}

json to_json(const EpsNet& net) { return {{"eps", net.eps}, {"centers", net.centers}, {"size", net.size()}}; }

json to_json(const RateConstruction& rc) {
  json blocks = json::array();
  for (const auto& b : rc.blocks)
    blocks.push_back({{"horizon", b.horizon}, {"mass", b.mass}, {"count", b.count}, {"cap", b.cap}});
  return {{"tau", rc.tau},
          {"doublings", rc.doublings},
          {"distribution", to_json(rc.distribution, true)},
          {"base_blocks", blocks}};
}

PointCloud point_cloud_from_json(const json& j) {
  const auto masses = get_field<std::vector<double>>(j, "masses");
  if (j.contains("matrix")) {
    const auto rows = get_field<std::vector<std::vector<double>>>(j, "matrix");
    std::vector<double> flat;
    for (const auto& r : rows) {
      require(r.size() == rows.size(), "distance matrix must be square");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return PointCloud::from_matrix(std::move(flat), masses);
  }
  const auto points = get_field<std::vector<std::vector<double>>>(j, "points");
  require(!points.empty(), "point cloud has no points");
  const std::size_t dim = points.front().size();
  std::vector<double> flat;
  for (const auto& p : points) {
    require(p.size() == dim, "points must share one dimension");
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return PointCloud::euclidean(std::move(flat), dim, masses);
}

PointCloud point_cloud_from_csv(std::string_view text) {
  const auto lines = data_lines(text);
  require(lines.size() >= 2, "point cloud CSV needs a header and at least one row");
  const auto header = split(lines.front(), ',');
  require(header.size() >= 3 && header[0] == "id" && header[1] == "mass",
          "point cloud CSV header must be id,mass,x1..xd");
  const std::size_t dim = header.size() - 2;
  std::vector<double> masses, coords;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    require(cells.size() == header.size(), "point cloud CSV row has the wrong number of columns");
    masses.push_back(parse_number(cells[1]));
    for (std::size_t k = 0; k < dim; ++k) coords.push_back(parse_number(cells[2 + k]));
  }
  return PointCloud::euclidean(std::move(coords), dim, std::move(masses));
}

PointCloud parse_point_cloud(std::string_view text) {
  if (first_char(text) == "{") return point_cloud_from_json(parse_json(text));
  return point_cloud_from_csv(text);
}

}  // namespace mmass::io
