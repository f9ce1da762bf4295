#include "clab/scene.hpp"

#include <cmath>
#include <iterator>
#include <map>
#include <set>

#include <json.hpp>

#include "clab/error.hpp"
#include "clab/gallery.hpp"

namespace clab {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Byte offsets of keys and values by JSON pointer, gathered by a SAX pass over
// an iterator that reports how far the lexer has read.
class CountingIterator {
 public:
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  CountingIterator() = default;
  CountingIterator(const char* p, const char* base, std::size_t* pos) : p_(p), base_(base), pos_(pos) {}
  reference operator*() const { return *p_; }
  CountingIterator& operator++() {
    ++p_;
    if (pos_) *pos_ = static_cast<std::size_t>(p_ - base_);
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator t = *this;
    ++*this;
    return t;
  }
  bool operator==(const CountingIterator& o) const { return p_ == o.p_; }
  bool operator!=(const CountingIterator& o) const { return p_ != o.p_; }

 private:
  const char* p_ = nullptr;
  const char* base_ = nullptr;
  std::size_t* pos_ = nullptr;
};

struct Frame {
  bool array = false;
  std::string path;
  std::size_t next_index = 0;
  std::set<std::string> keys;
};

class Locator : public nlohmann::json_sax<json> {
 public:
  explicit Locator(const std::size_t* pos) : pos_(pos) {}
  std::map<std::string, std::size_t> where;
  std::optional<std::pair<std::string, std::size_t>> duplicate;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override {
    const std::string p = open();
    stack_.push_back({false, p, 0, {}});
    return true;
  }
  bool key(string_t& k) override {
    Frame& f = stack_.back();
    if (!f.keys.insert(k).second && !duplicate) duplicate = {f.path + "/" + k, *pos_};
    pending_ = f.path + "/" + k;
    where.emplace(pending_, key_start(k));
    return true;
  }
  bool end_object() override {
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) override {
    const std::string p = open();
    stack_.push_back({true, p, 0, {}});
    return true;
  }
  bool end_array() override {
    stack_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

 private:
  std::string open() {
    if (stack_.empty()) {
      where.emplace("", 0);
      return "";
    }
    Frame& f = stack_.back();
    if (f.array) {
      const std::string p = f.path + "/" + std::to_string(f.next_index++);
      where.emplace(p, *pos_ > 0 ? *pos_ - 1 : 0);
      return p;
    }
    return pending_;
  }
  bool value() {
    if (!stack_.empty() && stack_.back().array) open();
    return true;
  }
  std::size_t key_start(const std::string& k) const {
    // the lexer stops just past the closing quote
    const std::size_t len = k.size() + 2;
    return *pos_ >= len ? *pos_ - len : 0;
  }

  const std::size_t* pos_;
  std::vector<Frame> stack_;
  std::string pending_;
};

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

class Reader {
 public:
  Reader(const std::string& text, std::map<std::string, std::size_t> where) : text_(text), where_(std::move(where)) {}

  [[noreturn]] void fail(ErrorCode code, const std::string& path, const std::string& what) const {
    std::string at = path;
    auto it = where_.find(path);
    while (it == where_.end() && !at.empty()) {
      at = at.substr(0, at.rfind('/'));
      it = where_.find(at);
    }
    const auto [line, col] = line_col(text_, it == where_.end() ? 0 : it->second);
    throw Error(code, what + " at " + (path.empty() ? "/" : path) + " (line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ")");
  }

  void object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) fail(ErrorCode::SchemaError, path, "expected an object");
    for (const auto& [k, v] : j.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) fail(ErrorCode::SchemaError, path + "/" + k, "unknown key '" + k + "'");
    }
  }

  double number(const json& j, const std::string& path) const {
    if (!j.is_number()) fail(ErrorCode::SchemaError, path, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) fail(ErrorCode::RangeError, path, "expected a finite number");
    return x;
  }

  long long integer(const json& j, const std::string& path) const {
    if (!j.is_number_integer()) fail(ErrorCode::SchemaError, path, "expected an integer");
    return j.get<long long>();
  }

  std::string string(const json& j, const std::string& path) const {
    if (!j.is_string()) fail(ErrorCode::SchemaError, path, "expected a string");
    return j.get<std::string>();
  }

  CubicPoly cubic_map(const json& j, const std::string& path) const {
    if (!j.is_object()) fail(ErrorCode::SchemaError, path, "expected an object of coefficients");
    CubicPoly p;
    for (const auto& [k, v] : j.items()) {
      const std::string at = path + "/" + k;
      if (k.size() != 2 || k[0] < '0' || k[0] > '3' || k[1] < '0' || k[1] > k[0]) {
        fail(ErrorCode::SchemaError, at, "unknown coefficient '" + k + "' (expected dj with 0 <= j <= d <= 3)");
      }
      p.coeff(k[0] - '0', k[1] - '0') = number(v, at);
    }
    return p;
  }

 private:
  const std::string& text_;
  std::map<std::string, std::size_t> where_;
};

ordered_json cubic_json(const CubicPoly& p) {
  ordered_json o = ordered_json::object();
  for (int d = 0; d <= 3; ++d)
    for (int j = 0; j <= d; ++j)
      if (p.coeff(d, j) != 0.0) o[std::to_string(d) + std::to_string(j)] = p.coeff(d, j);
  return o;
}

ChartSpec read_chart(const Reader& r, const json& j) {
  r.object(j, "/chart", {"gallery", "jet", "surface"});
  if (j.size() != 1) r.fail(ErrorCode::SchemaError, "/chart", "expected exactly one of gallery, jet, surface");
  ChartSpec c;
  if (j.contains("gallery")) {
    c.source = ChartSource::Gallery;
    c.gallery = r.string(j["gallery"], "/chart/gallery");
    bool known = false;
    for (const auto& e : gallery()) known = known || e.name == c.gallery;
    if (!known) r.fail(ErrorCode::SchemaError, "/chart/gallery", "unknown gallery chart '" + c.gallery + "'");
  } else if (j.contains("jet")) {
    c.source = ChartSource::Jet;
    const json& k = j["jet"];
    r.object(k, "/chart/jet", {"alpha", "beta", "n1", "n2"});
    if (k.contains("alpha")) c.jet.x1 = r.cubic_map(k["alpha"], "/chart/jet/alpha");
    if (k.contains("beta")) c.jet.x2 = r.cubic_map(k["beta"], "/chart/jet/beta");
    if (k.contains("n1")) c.jet.n1 = r.cubic_map(k["n1"], "/chart/jet/n1");
    if (k.contains("n2")) c.jet.n2 = r.cubic_map(k["n2"], "/chart/jet/n2");
  } else {
    c.source = ChartSource::Surface;
    const json& s = j["surface"];
    r.object(s, "/chart/surface", {"kind", "params", "height"});
    if (!s.contains("kind")) r.fail(ErrorCode::SchemaError, "/chart/surface", "missing key 'kind'");
    c.surface = r.string(s["kind"], "/chart/surface/kind");
    std::size_t want = 0;
    if (c.surface == "sphere") {
      want = 1;
    } else if (c.surface == "ellipsoid") {
      want = 3;
    } else if (c.surface == "torus") {
      want = 2;
    } else if (c.surface != "graph") {
      r.fail(ErrorCode::SchemaError, "/chart/surface/kind", "unknown surface '" + c.surface + "'");
    }
    if (want > 0) {
      if (!s.contains("params") || !s["params"].is_array() || s["params"].size() != want) {
        r.fail(ErrorCode::SchemaError, "/chart/surface", "'" + c.surface + "' needs params with " +
                                                             std::to_string(want) + " numbers");
      }
      for (std::size_t i = 0; i < want; ++i) {
        const std::string at = "/chart/surface/params/" + std::to_string(i);
        const double x = r.number(s["params"][i], at);
        if (x <= 0.0) r.fail(ErrorCode::RangeError, at, "surface parameters must be positive");
        c.params.push_back(x);
      }
      if (c.surface == "torus" && c.params[1] >= c.params[0]) {
        r.fail(ErrorCode::RangeError, "/chart/surface/params", "torus minor radius must be below the major radius");
      }
      if (s.contains("height")) r.fail(ErrorCode::SchemaError, "/chart/surface/height", "only graphs take a height");
    } else {
      if (!s.contains("height")) r.fail(ErrorCode::SchemaError, "/chart/surface", "missing key 'height'");
      if (s.contains("params")) r.fail(ErrorCode::SchemaError, "/chart/surface/params", "graphs take no params");
      c.height = r.cubic_map(s["height"], "/chart/surface/height");
    }
  }
  return c;
}

CongruenceChart base_chart(const ChartSpec& c, const std::optional<Domain>& region) {
  switch (c.source) {
    case ChartSource::Gallery: return gallery_chart(c.gallery);
    case ChartSource::Jet: return make_jet_chart(c.jet, region.value_or(Domain{-0.5, 0.5, -0.5, 0.5}), "jet");
    case ChartSource::Surface: {
      std::shared_ptr<const Surface> s;
      if (c.surface == "sphere") s = make_sphere(c.params.at(0));
      if (c.surface == "ellipsoid") s = make_ellipsoid(c.params.at(0), c.params.at(1), c.params.at(2));
      if (c.surface == "torus") s = make_torus(c.params.at(0), c.params.at(1));
      if (c.surface == "graph") s = make_graph(c.height);
      if (!s) throw Error(ErrorCode::SchemaError, "unknown surface '" + c.surface + "'");
      return normal_congruence_of(s, region.value_or(Domain{}));
    }
  }
  throw Error(ErrorCode::SchemaError, "unknown chart source");
}

// Region nodes on a 33 x 33 lattice must all be valid chart points.
bool region_inside(const CongruenceChart& chart, const Domain& d) {
  const int n = 32;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const double u = d.u_min + (d.u_max - d.u_min) * i / n, v = d.v_min + (d.v_max - d.v_min) * j / n;
      if (!chart.model().valid_at(u, v)) return false;
    }
  return true;
}

}  // namespace

void check_grid(int grid) {
  if (grid < 16 || grid > 4096) throw Error(ErrorCode::RangeError, "grid must lie in [16, 4096]");
}

void check_seed_density(double d) {
  if (!(d > 0.0) || d > 1000.0) throw Error(ErrorCode::RangeError, "seed density must lie in (0, 1000]");
}

Scene parse_scene(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    const auto colon = what.find("syntax error");
    if (colon != std::string::npos) what = what.substr(colon);
    throw Error(ErrorCode::ParseError,
                what + " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")");
  }

  std::size_t pos = 0;
  Locator loc(&pos);
  const char* b = text.data();
  json::sax_parse(CountingIterator(b, b, &pos), CountingIterator(b + text.size(), b, nullptr), &loc);
  if (loc.duplicate) {
    const auto [line, col] = line_col(text, loc.duplicate->second);
    throw Error(ErrorCode::ParseError, "duplicate key " + loc.duplicate->first + " (line " + std::to_string(line) +
                                           ", column " + std::to_string(col) + ")");
  }
  const Reader r(text, std::move(loc.where));

  r.object(doc, "", {"chart", "region", "grid", "lens", "outputs", "seed_density", "seed", "tolerances"});
  if (!doc.contains("chart")) r.fail(ErrorCode::SchemaError, "", "missing key 'chart'");
  Scene s;
  s.chart = read_chart(r, doc["chart"]);

  if (doc.contains("region")) {
    const json& g = doc["region"];
    r.object(g, "/region", {"u_min", "u_max", "v_min", "v_max"});
    Domain d;
    for (const char* k : {"u_min", "u_max", "v_min", "v_max"})
      if (!g.contains(k)) r.fail(ErrorCode::SchemaError, "/region", std::string("missing key '") + k + "'");
    d.u_min = r.number(g["u_min"], "/region/u_min");
    d.u_max = r.number(g["u_max"], "/region/u_max");
    d.v_min = r.number(g["v_min"], "/region/v_min");
    d.v_max = r.number(g["v_max"], "/region/v_max");
    if (!(d.u_min < d.u_max) || !(d.v_min < d.v_max)) r.fail(ErrorCode::RangeError, "/region", "empty region");
    s.region = d;
  } else if (s.chart.source == ChartSource::Surface) {
    r.fail(ErrorCode::SchemaError, "", "surface charts need a region");
  }
  if (doc.contains("grid")) {
    const long long g = r.integer(doc["grid"], "/grid");
    if (g < 16 || g > 4096) r.fail(ErrorCode::RangeError, "/grid", "grid must lie in [16, 4096]");
    s.grid = static_cast<int>(g);
  }
  if (doc.contains("lens")) {
    const auto l = parse_lens(r.string(doc["lens"], "/lens"));
    if (!l) r.fail(ErrorCode::SchemaError, "/lens", "lens must be one of Q2, Q3, Q4, Q5");
    s.lens = *l;
  }
  if (doc.contains("seed_density")) {
    s.seed_density = r.number(doc["seed_density"], "/seed_density");
    if (!(s.seed_density > 0.0) || s.seed_density > 1000.0)
      r.fail(ErrorCode::RangeError, "/seed_density", "seed density must lie in (0, 1000]");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) r.fail(ErrorCode::SchemaError, "/seed", "expected a nonnegative integer");
    s.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("outputs")) {
    const json& o = doc["outputs"];
    r.object(o, "/outputs", {"dir"});
    if (o.contains("dir")) s.outputs.dir = r.string(o["dir"], "/outputs/dir");
    if (s.outputs.dir.empty()) r.fail(ErrorCode::RangeError, "/outputs/dir", "empty output directory");
  }
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    r.object(t, "/tolerances", {"identity", "pairing", "line_points", "pitch", "step", "singular_radius"});
    auto read = [&](const char* k, double& into) {
      if (!t.contains(k)) return;
      const std::string at = std::string("/tolerances/") + k;
      into = r.number(t[k], at);
      if (!(into > 0.0) || into >= 1.0) r.fail(ErrorCode::RangeError, at, "tolerances must lie in (0, 1)");
    };
    read("identity", s.tolerances.identity);
    read("pairing", s.tolerances.pairing);
    read("line_points", s.tolerances.line_points);
    read("pitch", s.tolerances.pitch);
    read("step", s.tolerances.step);
    read("singular_radius", s.tolerances.singular_radius);
  }

  // The region must stay inside the chart (for jet charts: u^2 + v^2 < 1).
  const CongruenceChart base = base_chart(s.chart, s.region);
  if (s.region && !region_inside(base, *s.region)) {
    r.fail(ErrorCode::RangeError, "/region", "region leaves the chart");
  }
  return s;
}

std::string serialize_scene(const Scene& s) {
  ordered_json j;
  ordered_json c;
  switch (s.chart.source) {
    case ChartSource::Gallery: c["gallery"] = s.chart.gallery; break;
    case ChartSource::Jet: {
      ordered_json k;
      k["alpha"] = cubic_json(s.chart.jet.x1);
      k["beta"] = cubic_json(s.chart.jet.x2);
      k["n1"] = cubic_json(s.chart.jet.n1);
      k["n2"] = cubic_json(s.chart.jet.n2);
      c["jet"] = k;
      break;
    }
    case ChartSource::Surface: {
      ordered_json k;
      k["kind"] = s.chart.surface;
      if (s.chart.surface == "graph") {
        k["height"] = cubic_json(s.chart.height);
      } else {
        k["params"] = s.chart.params;
      }
      c["surface"] = k;
      break;
    }
  }
  j["chart"] = c;
  if (s.region) {
    j["region"] = {{"u_min", s.region->u_min}, {"u_max", s.region->u_max}, {"v_min", s.region->v_min},
                   {"v_max", s.region->v_max}};
  }
  j["grid"] = s.grid;
  j["lens"] = to_string(s.lens);
  j["seed_density"] = s.seed_density;
  j["seed"] = s.seed;
  j["outputs"] = {{"dir", s.outputs.dir}};
  j["tolerances"] = {{"identity", s.tolerances.identity},
                     {"pairing", s.tolerances.pairing},
                     {"line_points", s.tolerances.line_points},
                     {"pitch", s.tolerances.pitch},
                     {"step", s.tolerances.step},
                     {"singular_radius", s.tolerances.singular_radius}};
  return j.dump(2) + "\n";
}

CongruenceChart make_chart(const Scene& scene) {
  const CongruenceChart base = base_chart(scene.chart, scene.region);
  if (!scene.region) return base;
  if (!region_inside(base, *scene.region)) throw Error(ErrorCode::RangeError, "region leaves the chart");
  return base.with_domain(*scene.region);
}

}  // namespace clab
