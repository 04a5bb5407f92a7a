#pragma once

#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace kahler {

/// Gauss–Legendre nodes and weights on [a, b].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

namespace detail {

template <unsigned N>
GaussRule mirrored_rule(double a, double b) {
  using Q = boost::math::quadrature::gauss<double, N>;
  const auto& xs = Q::abscissa();
  const auto& ws = Q::weights();
  GaussRule r;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (std::size_t i = xs.size(); i-- > 0;) {
    if (xs[i] == 0.0) continue;
    r.x.push_back(c - h * xs[i]);
    r.w.push_back(h * ws[i]);
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    r.x.push_back(c + h * xs[i]);
    r.w.push_back(h * ws[i]);
  }
  return r;
}

}  // namespace detail

/// Supported orders: 16, 24, 32, 48, 64.
inline GaussRule gauss_legendre(int order, double a, double b) {
  switch (order) {
    case 16: return detail::mirrored_rule<16>(a, b);
    case 24: return detail::mirrored_rule<24>(a, b);
    case 32: return detail::mirrored_rule<32>(a, b);
    case 48: return detail::mirrored_rule<48>(a, b);
    case 64: return detail::mirrored_rule<64>(a, b);
    default: throw std::invalid_argument("gauss_legendre: unsupported order");
  }
}

}  // namespace kahler
