#include <algorithm>
#include <cmath>

#include "slipfsi/diagnostics.hpp"
#include "slipfsi/error.hpp"

namespace slipfsi {

void EnergyLedger::append(const EnergyRecord& r) {
  if (!records_.empty() && !(r.t > records_.back().t))
    throw InvalidArgument("energy ledger: time must increase");
  if (r.dissipation < 0.0) throw InvalidArgument("energy ledger: negative dissipation");
  records_.push_back(r);
}

void EnergyLedger::append(const StepReport& report) {
  EnergyRecord r;
  r.t = report.t;
  r.kinetic = report.kinetic_energy;
  r.dissipation = report.dissipation;
  r.dissipation_by_zone = {report.dt * report.dissipation_rate.body,
                           report.dt * report.dissipation_rate.ring,
                           report.dt * report.dissipation_rate.fluid};
  r.work = report.external_work;
  append(r);
}

EnergyCheck energy_check(const EnergyLedger& ledger, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("energy_check: tolerance must be positive");
  EnergyCheck out;
  out.tolerance = tol;
  const double e0 = ledger.initial_energy();
  double dsum = 0.0, wsum = 0.0, wabs = 0.0;
  out.residual.reserve(ledger.records().size());
  for (const auto& r : ledger.records()) {
    dsum += r.dissipation;
    wsum += r.work;
    wabs += std::abs(r.work);
    out.residual.push_back(r.kinetic + dsum - e0 - wsum);
  }
  out.scale = e0 + wabs;
  if (!out.residual.empty()) {
    out.final_residual = out.residual.back();
    out.worst_residual = *std::max_element(out.residual.begin(), out.residual.end());
  }
  out.pass = out.worst_residual <= tol * out.scale;
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw InvalidArgument("loglog_slope: values must be positive");
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) throw InvalidArgument("loglog_slope: abscissae must differ");
  return (n * sxy - sx * sy) / den;
}

RateFit solidification_rate(std::span<const double> eps, std::span<const double> r, double min_alpha) {
  if (eps.size() != r.size()) throw InvalidArgument("solidification_rate: size mismatch");
  if (eps.size() < 3) throw InvalidArgument("solidification_rate: sweep too short (need >= 3 values)");
  const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-12))
    throw InvalidArgument("solidification_rate: sweep must span two decades of epsilon");

  RateFit fit;
  fit.alpha = loglog_slope(eps, r);
  std::vector<std::size_t> order(eps.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return eps[a] < eps[b]; });
  fit.monotone = true;
  for (std::size_t k = 1; k < order.size(); ++k)
    if (!(r[order[k]] > r[order[k - 1]])) fit.monotone = false;
  fit.pass = fit.monotone && fit.alpha >= min_alpha;
  return fit;
}

}  // namespace slipfsi
