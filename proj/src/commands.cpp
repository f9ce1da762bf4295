#include "clab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "clab/error.hpp"
#include "clab/formfields.hpp"
#include "clab/geom3d.hpp"
#include "clab/singularities.hpp"

namespace clab {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Accumulates the worst residual of one identity.
struct Row {
  IdentityRow r;
  Row(std::string name, double tol) { r.name = std::move(name), r.tolerance = tol; }
  void add(double residual) {
    ++r.points;
    if (!(residual <= r.max_residual)) r.max_residual = residual;  // NaN sticks
  }
};

}  // namespace

bool VerifyResult::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const IdentityRow& r) { return r.points == 0 || r.pass(); });
}

VerifyResult verify_chart(const CongruenceChart& chart, const Tolerances& tol, std::uint64_t seed, int samples) {
  Row extrema("principal directions extremize r", 1e-3);
  Row torsal("Q2 - bbar Q1 = det(n_u,n_v,n) [x',n,n']", tol.identity);
  Row principal_disc("d(Q2) = (B^2-AC)^2 (H^2-K)", tol.identity);
  Row mean_disc("d(Q4) = -d(Q1) d(Q2)", tol.identity);
  Row torsal_disc("d(Q3) - d(Q2) = bbar^2 d(Q1)", tol.identity);
  Row char_disc("d(Q5) = d(Q1) d(Q2) d(Q3)", tol.identity);
  Row char_jac("Q5 = Jac(Q3, Q4)", tol.identity);
  Row polar_124("self-polar (Q1, Q2, Q4)", tol.pairing);
  Row polar_345("self-polar (Q3, Q4, Q5)", tol.pairing);
  Row mean_orth("mean directions Q1-orthogonal", tol.pairing);
  Row developable("pitch along torsal directions", tol.pitch);
  Row midpoint("characteristic midpoint = H", tol.line_points);
  Row routes("characteristic quadratic = r on Q5 directions", tol.line_points);
  Row between("characteristic inside boundary interval", 0.0);
  Row normal_bbar("normal congruence: bbar = 0", 1e-9);
  Row normal_q3("normal congruence: Q3 = Q2", 1e-9);
  Row normal_q5("normal congruence: Q5 has no real roots", 0.0);
  const bool normal = chart.kind() == ChartKind::SurfaceNormal;

  std::mt19937_64 rng(seed);
  const Domain& d = chart.domain();
  std::uniform_real_distribution<double> du(d.u_min, d.u_max), dv(d.v_min, d.v_max);
  int used = 0, umbilic = 0, sigma = 0;
  for (int attempt = 0; used < samples && attempt < 20 * samples; ++attempt) {
    const double u = du(rng), v = dv(rng);
    if (!chart.contains(u, v)) continue;
    PointFrame f;
    try {
      f = chart.frame(u, v);
    } catch (const Error&) {
      continue;
    }
    ++used;
    const FormSet s = forms(f);
    const PointInvariants inv = point_invariants(f);
    const double d1 = inv.deltas[0], d2 = inv.deltas[1], d3 = inv.deltas[2], d4 = inv.deltas[3], d5 = inv.deltas[4];
    const double bb = f.fund.bbar;
    const double m1 = max_abs(s.q1), mq = max_abs(s.q);
    const bool is_umbilic = max_abs(s.q2) <= 1e-8 * m1 * mq;
    umbilic += is_umbilic;
    sigma += inv.on_sigma_n;

    const double lam = triple(f.n_u, f.n_v, f.n);
    torsal.add(max_abs(s.q3 - lam * torsal_unit_form(f)) /
               std::max({max_abs(s.q3), max_abs(s.q2), std::abs(bb) * m1, m1 * mq, 1e-300}));
    // Relative to the natural size of each side, so that umbilics do not blow up the quotient.
    const double q2_scale = m1 * mq * m1 * mq;
    mean_disc.add(std::abs(d4 + d1 * d2) / std::max(std::abs(d1) * std::max(std::abs(d2), q2_scale), 1e-300));
    torsal_disc.add(std::abs(d3 - d2 - bb * bb * d1) /
                    std::max(std::max(std::abs(d2), q2_scale) + bb * bb * std::abs(d1), 1e-300));

    if (normal) {
      const double scale = std::max({std::abs(f.fund.a), std::abs(f.fund.b1), std::abs(f.fund.b2), std::abs(f.fund.c)});
      normal_bbar.add(std::abs(bb) / std::max(scale, 1e-300));
      normal_q3.add(max_abs(s.q3 - s.q2) / std::max(m1 * mq, 1e-300));
      if (!is_umbilic) normal_q5.add(d5 > 0.0 ? 1.0 : 0.0);
    }
    if (is_umbilic || inv.on_sigma_n) continue;

    const bool degenerate_d2 = d2 <= 1e-12 * m1 * m1 * mq * mq;
    if (!degenerate_d2) {
      principal_disc.add(inv.eq_residual);
      char_disc.add(std::abs(d5 - d1 * d2 * d3) / (std::abs(d1 * d2) * (std::abs(d2) + bb * bb * std::abs(d1))));
      char_jac.add(max_abs(q5_via_jacobian(f) - s.q5) / max_abs(s.q5));
      polar_124.add(self_polar_check(s.q1, s.q2, s.q4, tol.pairing).max_pairing);
      if (max_abs(s.q3) > 1e-8 * m1 * mq) polar_345.add(self_polar_check(s.q3, s.q4, s.q5, tol.pairing).max_pairing);
      const auto m = roots(s.q4).directions;
      if (m.size() == 2) mean_orth.add(std::abs(polarization(s.q1, m[0], m[1])) / m1);

      const ExtremaScan scan = quotient_extrema_oracle(s.q1, s.q, 2048);
      const auto p = roots(s.q2).directions;
      if (!scan.flat && p.size() == 2 && scan.directions.size() == 2) {
        double worst = 0;
        for (const auto& a : p) {
          double best = 1e300;
          for (const auto& b : scan.directions) best = std::min(best, angular_distance(a, b));
          worst = std::max(worst, best);
        }
        extrema.add(worst);
      }
    }

    const LinePoints lp = line_points(f);
    const double h = 1.0 + std::abs(lp.middle);
    for (const auto& dir : roots(torsal_unit_form(f)).directions) developable.add(std::abs(ruled_data(f, dir).pitch) / h);
    if (lp.characteristic.size() == 2 && lp.characteristic_by_direction.size() == 2) {
      midpoint.add(std::abs(0.5 * (lp.characteristic[0] + lp.characteristic[1]) - lp.middle) / h);
      routes.add(std::max(std::abs(lp.characteristic[0] - lp.characteristic_by_direction[0]),
                          std::abs(lp.characteristic[1] - lp.characteristic_by_direction[1])) /
                 h);
      between.add(std::max({0.0, lp.boundary[0] - lp.characteristic[0], lp.characteristic[1] - lp.boundary[1]}));
    }
  }

  VerifyResult out;
  for (Row* r : {&extrema, &torsal, &principal_disc, &mean_disc, &torsal_disc, &char_disc, &char_jac, &polar_124,
                 &polar_345, &mean_orth, &developable, &midpoint, &routes, &between})
    out.rows.push_back(r->r);
  if (normal)
    for (Row* r : {&normal_bbar, &normal_q3, &normal_q5}) out.rows.push_back(r->r);
  out.notes.push_back("sampled " + std::to_string(used) + " points");
  if (used > 0 && umbilic == used) {
    out.notes.push_back("umbilic everywhere: Q2 vanishes at every sample, every direction is principal");
  } else if (umbilic > 0) {
    out.notes.push_back(std::to_string(umbilic) + " samples at umbilics");
  }
  if (sigma > 0) out.notes.push_back(std::to_string(sigma) + " samples on the singular set of n");
  return out;
}

void write_verify_table(std::ostream& os, const VerifyResult& r) {
  char line[256];
  std::snprintf(line, sizeof line, "%-48s %7s %13s %10s  %s\n", "identity", "points", "max_residual", "tolerance",
                "status");
  os << line;
  for (const auto& row : r.rows) {
    const char* status = row.points == 0 ? "skip" : (row.pass() ? "PASS" : "FAIL");
    std::snprintf(line, sizeof line, "%-48s %7d %13.3e %10.1e  %s\n", row.name.c_str(), row.points, row.max_residual,
                  row.tolerance, status);
    os << line;
  }
  for (const auto& n : r.notes) os << "note: " << n << '\n';
  os << (r.pass() ? "verify: PASS" : "verify: FAIL") << '\n';
}

// SVG palette: leaves #1f5fa8, lens discriminant #d62728, parabolic #ff7f0e,
// Sigma(n) black, singular points #2ca02c.
void write_svg(std::ostream& os, const Portrait& p, const Domain& region, Lens lens, const std::string& title) {
  const double width = 800.0, margin = 40.0;
  const double su = region.u_max - region.u_min, sv = region.v_max - region.v_min;
  const double scale = (width - 2 * margin) / std::max(su, sv);
  const double w = su * scale + 2 * margin, h = sv * scale + 2 * margin + 30.0;
  auto X = [&](double u) { return fmt("%.3f", margin + (u - region.u_min) * scale); };
  auto Y = [&](double v) { return fmt("%.3f", margin + (region.v_max - v) * scale); };
  auto polyline = [&](const std::vector<Point2>& pts, const std::string& style) {
    os << "<polyline style=\"fill:none;" << style << "\" points=\"";
    std::string prev, all;
    for (const auto& q : pts) {
      std::string xy = X(q[0]) + ',' + Y(q[1]);
      if (xy == prev) continue;  // repeated at the drawing resolution
      all += (all.empty() ? "" : " ") + xy;
      prev = std::move(xy);
    }
    os << all << "\"/>\n";
  };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt("%.0f", w) << ' ' << fmt("%.0f", h)
     << "\" width=\"" << fmt("%.0f", w) << "\" height=\"" << fmt("%.0f", h) << "\">\n";
  os << "<title>" << title << "</title>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fmt("%.0f", w) << "\" height=\"" << fmt("%.0f", h)
     << "\" style=\"fill:#ffffff\"/>\n";
  os << "<rect x=\"" << fmt("%.3f", margin) << "\" y=\"" << fmt("%.3f", margin) << "\" width=\"" << fmt("%.3f", su * scale)
     << "\" height=\"" << fmt("%.3f", sv * scale) << "\" style=\"fill:none;stroke:#999999;stroke-width:0.5\"/>\n";

  os << "<g id=\"leaves\">\n";
  for (const auto& c : p.curves)
    polyline(c.points, c.branch == 1 ? "stroke:#1f5fa8;stroke-width:0.6"
                                     : "stroke:#1f5fa8;stroke-width:0.6;stroke-dasharray:3,2");
  os << "</g>\n<g id=\"loci\">\n";
  for (const auto& l : p.loci) {
    std::string style;
    switch (l.kind) {
      case LocusKind::SigmaN: style = "stroke:#000000;stroke-width:2.2"; break;
      case LocusKind::Parabolic: style = "stroke:#ff7f0e;stroke-width:1.6"; break;
      case LocusKind::Discriminant: style = "stroke:#d62728;stroke-width:1.6"; break;
      case LocusKind::Other: style = "stroke:#7f7f7f;stroke-width:1.0"; break;
    }
    std::vector<Point2> pts = l.points;
    if (l.closed && !pts.empty()) pts.push_back(pts.front());
    polyline(pts, style);
  }
  os << "</g>\n<g id=\"singularities\">\n";
  for (const auto& s : p.singularities) {
    os << "<circle cx=\"" << X(s.at[0]) << "\" cy=\"" << Y(s.at[1])
       << "\" r=\"4\" style=\"fill:#2ca02c;stroke:#000000;stroke-width:0.5\"/>\n";
    os << "<text x=\"" << X(s.at[0]) << "\" y=\"" << Y(s.at[1])
       << "\" dx=\"6\" dy=\"-6\" style=\"font-family:sans-serif;font-size:11px\">" << to_string(s.label) << "</text>\n";
  }
  os << "</g>\n";
  os << "<text x=\"" << fmt("%.3f", margin) << "\" y=\"" << fmt("%.3f", h - 14.0)
     << "\" style=\"font-family:sans-serif;font-size:12px\">" << title << " | lens " << to_string(lens)
     << " | leaves blue (branch 2 dashed), discriminant red, Sigma(n) black</text>\n";
  os << "</svg>\n";
}

Artifacts::Artifacts(fs::path dir) : dir_(std::move(dir)) {}

Artifacts::~Artifacts() {
  if (committed_) return;
  std::error_code ec;
  for (auto it = written_.rbegin(); it != written_.rend(); ++it) fs::remove(*it, ec);
  for (auto it = created_.rbegin(); it != created_.rend(); ++it) fs::remove(*it, ec);  // only if empty
}

void Artifacts::make_dir(const fs::path& d) {
  if (d.empty()) return;
  std::error_code ec;
  if (fs::is_directory(d, ec)) return;
  make_dir(d.parent_path());
  if (!fs::create_directory(d, ec) && !fs::is_directory(d)) {
    throw Error(ErrorCode::IoError, "cannot create directory " + d.string());
  }
  created_.push_back(d);
}

void Artifacts::write(const fs::path& relative, const std::string& content) {
  const fs::path path = dir_ / relative;
  make_dir(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  written_.push_back(path);
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"verify", "classify", "trace", "surfaces", "render", "report"};
  return names;
}

namespace {

PortraitSpec portrait_spec(const Scene& scene, const CongruenceChart& chart, bool overlays) {
  PortraitSpec spec;
  spec.lens = scene.lens;
  spec.region = chart.domain();
  spec.seed_density = scene.seed_density;
  spec.steps.tolerance = scene.tolerances.step;
  spec.steps.singular_radius = scene.tolerances.singular_radius;
  spec.locus_grid = scene.grid;
  spec.overlays = overlays;
  return spec;
}

std::string report_table(const std::vector<SingularityReport>& reports) {
  std::ostringstream os;
  write_report_header(os);
  for (const auto& r : reports) write_report_row(os, r);
  return os.str();
}

// Removes earlier outputs of a numbered family so reruns leave no stale files.
void clear_family(const fs::path& dir, const std::string& prefix) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return;
  std::vector<fs::path> doomed;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    const std::string name = e.path().filename().string();
    if (name.rfind(prefix, 0) == 0 && e.path().extension() == ".csv") doomed.push_back(e.path());
  }
  for (const auto& p : doomed) fs::remove(p, ec);
}

std::string numbered(const std::string& prefix, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%04zu.csv", prefix.c_str(), i + 1);
  return buf;
}

int run_trace(const Scene& scene, const CongruenceChart& chart, Artifacts& art, std::ostream& out) {
  const Portrait p = portrait(chart, portrait_spec(scene, chart, true));
  const fs::path dir = scene.outputs.dir;
  clear_family(dir / "curves", "curve_");
  clear_family(dir / "loci", "locus_");

  nlohmann::ordered_json m;
  m["chart"] = chart.name();
  m["lens"] = to_string(scene.lens);
  m["region"] = {chart.domain().u_min, chart.domain().u_max, chart.domain().v_min, chart.domain().v_max};
  m["curves"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < p.curves.size(); ++i) {
    const TracedCurve& c = p.curves[i];
    std::ostringstream csv;
    write_curve_csv(csv, c);
    const std::string file = "curves/" + numbered("curve_", i);
    art.write(file, csv.str());
    m["curves"].push_back({{"file", file},
                           {"branch", c.branch},
                           {"points", c.points.size()},
                           {"seed", {c.seed[0], c.seed[1]}},
                           {"start_termination", to_string(c.start_termination)},
                           {"termination", to_string(c.termination)},
                           {"closed", c.closed},
                           {"turning_points", c.turning_points.size()}});
  }
  m["loci"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < p.loci.size(); ++i) {
    const LocusCurve& l = p.loci[i];
    std::ostringstream csv;
    csv << "u,v\n";
    for (const auto& q : l.points) csv << fmt("%.17g", q[0]) << ',' << fmt("%.17g", q[1]) << '\n';
    const std::string file = "loci/" + numbered("locus_", i);
    art.write(file, csv.str());
    m["loci"].push_back({{"file", file},
                         {"kind", to_string(l.kind)},
                         {"lens", l.lens ? to_string(*l.lens) : "-"},
                         {"points", l.points.size()},
                         {"closed", l.closed}});
  }
  m["singularities"] = nlohmann::ordered_json::array();
  for (const auto& s : p.singularities)
    m["singularities"].push_back({{"kind", s.kind}, {"label", to_string(s.label)}, {"u", s.at[0]}, {"v", s.at[1]}});
  art.write("portrait.json", m.dump(2) + "\n");
  out << "traced " << p.curves.size() << " curves, " << p.loci.size() << " loci, " << p.singularities.size()
      << " singular points -> " << (fs::path(scene.outputs.dir) / "portrait.json").string() << '\n';
  return 0;
}

int run_surfaces(const Scene& scene, const CongruenceChart& chart, Artifacts& art, std::ostream& out) {
  const LinePointGrid g = sample_line_points(chart, scene.grid);
  std::ostringstream csv;
  write_line_points_csv(csv, g);
  art.write("line_points.csv", csv.str());
  for (SurfaceKind k : {SurfaceKind::Boundary, SurfaceKind::Middle, SurfaceKind::Focal, SurfaceKind::Characteristic}) {
    Mesh mesh = sweep_surface(g, k);
    mesh.features = sheet_features(chart, k, scene.grid);
    std::ostringstream obj;
    write_obj(obj, mesh);
    const std::string name = std::string("surface_") + to_string(k);
    art.write(name + ".obj", obj.str());
    std::ostringstream feat;
    feat << "feature,x,y,z\n";
    for (std::size_t i = 0; i < mesh.features.size(); ++i)
      for (const auto& v : mesh.features[i])
        feat << i << ',' << fmt("%.12g", v[0]) << ',' << fmt("%.12g", v[1]) << ',' << fmt("%.12g", v[2]) << '\n';
    art.write(name + "_features.csv", feat.str());
    std::size_t faces = 0;
    for (const auto& s : mesh.sheets) faces += s.faces.size();
    out << to_string(k) << ": " << mesh.sheets.size() << " sheet(s), " << faces << " faces\n";
  }
  return 0;
}

int run_report(const Scene& scene, const CongruenceChart& chart, Artifacts& art, std::ostream& out) {
  std::ostringstream os;
  os << "chart: " << chart.name() << " (" << to_string(chart.kind()) << ")\n";
  const Domain& d = chart.domain();
  os << "region: u in [" << fmt("%g", d.u_min) << ", " << fmt("%g", d.u_max) << "], v in [" << fmt("%g", d.v_min)
     << ", " << fmt("%g", d.v_max) << "]\n";
  os << "grid: " << scene.grid << ", lens: " << to_string(scene.lens) << "\n\n";

  int counts[3] = {0, 0, 0}, undefined = 0;
  const int n = 32;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const double u = d.u_min + (d.u_max - d.u_min) * i / n, v = d.v_min + (d.v_max - d.v_min) * j / n;
      try {
        if (!chart.contains(u, v)) throw Error(ErrorCode::OutOfDomain, "");
        ++counts[static_cast<int>(hyperbolicity(chart.frame(u, v)))];
      } catch (const Error&) {
        ++undefined;
      }
    }
  os << "torsal type on a 33x33 lattice: hyperbolic " << counts[0] << ", parabolic " << counts[1] << ", elliptic "
     << counts[2];
  if (undefined) os << ", undefined " << undefined;
  os << "\nsingular set of n: " << sigma_curves(chart, scene.grid).size() << " curve(s)\n";
  os << "parabolic curve: " << parabolic_curves(chart, scene.grid).size() << " curve(s)\n\n";

  for (Lens lens : {Lens::Q2, Lens::Q3, Lens::Q4, Lens::Q5}) {
    std::map<std::string, int> labels;
    for (const auto& r : classify_chart(chart, lens, scene.grid)) ++labels[r.kind + " " + to_string(r.label)];
    os << "singularities " << to_string(lens) << ":";
    if (labels.empty()) os << " none";
    for (const auto& [k, c] : labels) os << ' ' << k << " x" << c << ';';
    os << '\n';
  }
  const Portrait p = portrait(chart, portrait_spec(scene, chart, false));
  os << "\nportrait " << to_string(scene.lens) << ": " << p.curves.size() << " leaves\n\n";
  const VerifyResult v = verify_chart(chart, scene.tolerances, scene.seed);
  write_verify_table(os, v);
  art.write("report.txt", os.str());
  out << os.str();
  return v.pass() ? 0 : 1;
}

}  // namespace

int run_command(const std::string& command, const Scene& scene, std::ostream& out) {
  if (std::find(command_names().begin(), command_names().end(), command) == command_names().end()) {
    throw Error(ErrorCode::SchemaError, "unknown command '" + command + "'");
  }
  const CongruenceChart chart = make_chart(scene);
  Artifacts art(scene.outputs.dir);
  int status = 0;
  if (command == "verify") {
    const VerifyResult v = verify_chart(chart, scene.tolerances, scene.seed);
    write_verify_table(out, v);
    status = v.pass() ? 0 : 1;
  } else if (command == "classify") {
    const std::string table = report_table(classify_chart(chart, scene.lens, scene.grid));
    art.write(std::string("singularities_") + to_string(scene.lens) + ".tsv", table);
    out << table;
  } else if (command == "trace") {
    status = run_trace(scene, chart, art, out);
  } else if (command == "surfaces") {
    status = run_surfaces(scene, chart, art, out);
  } else if (command == "render") {
    Portrait p = portrait(chart, portrait_spec(scene, chart, true));
    if (scene.lens != Lens::Q3)  // for Q3 the parabolic curve is the discriminant
      for (auto& l : parabolic_curves(chart, scene.grid)) p.loci.push_back(std::move(l));
    std::ostringstream svg;
    write_svg(svg, p, chart.domain(), scene.lens, chart.name());
    const std::string name = std::string("portrait_") + to_string(scene.lens) + ".svg";
    art.write(name, svg.str());
    out << "rendered " << p.curves.size() << " leaves -> " << (fs::path(scene.outputs.dir) / name).string() << '\n';
  } else if (command == "report") {
    status = run_report(scene, chart, art, out);
  }
  art.commit();
  return status;
}

}  // namespace clab
