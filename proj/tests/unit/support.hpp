#pragma once

#include <random>
#include <utility>

#include "clab/congruence.hpp"
#include "clab/quadform.hpp"

namespace clab::testing {

// Uniform random point of the chart domain, shrunk by `margin` on each side.
inline std::pair<double, double> random_point(const CongruenceChart& chart, std::mt19937_64& rng,
                                              double margin = 0.02) {
  const Domain& d = chart.domain();
  std::uniform_real_distribution<double> du(d.u_min + margin, d.u_max - margin);
  std::uniform_real_distribution<double> dv(d.v_min + margin, d.v_max - margin);
  for (;;) {
    const double u = du(rng), v = dv(rng);
    if (chart.contains(u, v)) return {u, v};
  }
}

inline CubicPoly random_cubic(std::mt19937_64& rng, double scale = 0.5) {
  std::uniform_real_distribution<double> d(-scale, scale);
  CubicPoly p;
  for (int deg = 0; deg <= 3; ++deg)
    for (int j = 0; j <= deg; ++j) p.coeff(deg, j) = d(rng);
  return p;
}

// Random directrix jet chart on the standard hemisphere chart.
inline CongruenceChart random_jet_chart(std::mt19937_64& rng) {
  JetChartParams p;
  p.x1 = random_cubic(rng, 1.0);
  p.x2 = random_cubic(rng, 1.0);
  return make_jet_chart(p, Domain{-0.5, 0.5, -0.5, 0.5}, "random-jet");
}

}  // namespace clab::testing
