#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pllranges/equilibria.hpp"
#include "pllranges/model.hpp"
#include "pllranges/sim.hpp"

// Phase-plane tools for first-order filters: state (x, theta).
namespace pllranges {

using PlanePoint = std::array<double, 2>;  // (x, theta)

enum class SeparatrixBranch { stable_1, stable_2, unstable_1, unstable_2 };

std::string_view branch_name(SeparatrixBranch b);

struct Separatrix {
  Equilibrium saddle;
  SeparatrixBranch branch = SeparatrixBranch::stable_1;
  bool reverse_time = false;
  std::vector<double> t;  // elapsed integration time (reverse time for stable branches)
  std::vector<PlanePoint> points;
};

struct SeparatrixOptions {
  double horizon = 0.0;     // <= 0: 40 / min |eigenvalue| of each saddle
  double eps_offset = 1e-7;
  double x_limit = 0.0;     // stop once |x| exceeds 10 x this; <= 0: default raster half-width
  IntegratorConfig cfg;     // tolerances and max step (<= 0: horizon / 4000); horizon is ignored
};

struct SeparatrixSet {
  std::vector<Separatrix> curves;
  std::vector<std::string> notes;
};

SeparatrixSet trace_separatrices(const PllModel& model, const SeparatrixOptions& opts = {});

// Cell-centred raster over (x, theta).
struct RasterBox {
  double x_lo = 0.0, x_hi = 0.0;
  double theta_lo = 0.0, theta_hi = 0.0;
  int nx = 0, ntheta = 0;

  double x(int i) const { return x_lo + (x_hi - x_lo) * (i + 0.5) / nx; }
  double theta(int j) const { return theta_lo + (theta_hi - theta_lo) * (j + 0.5) / ntheta; }
};

// x in +-(3 |x_eq| + 0.05) around 0, theta over one period centred on 0.
RasterBox default_raster(const PllModel& model, int nx = 200, int ntheta = 200);

enum class Cell : std::uint8_t { non_member = 0, member = 1, undecided = 2 };

struct DomainRaster {
  RasterBox box;
  std::vector<Cell> cells;  // index ix * ntheta + it

  Cell at(int ix, int it) const { return cells[static_cast<std::size_t>(ix) * box.ntheta + it]; }
};

struct DomainOptions {
  IntegratorConfig cfg = {Method::dopri5, 1e-9, 1e-12, 0.0, 0.0, 10.0};
  LockOptions lock;
  SlipOptions slip;
  int jobs = 0;
};

// Member: locks to an equilibrium of eq's branch (any period copy) without slipping.
DomainRaster local_lock_in_domain(const PllModel& model, const Equilibrium& eq,
                                  const RasterBox& box, const DomainOptions& opts = {});

// Member: locks to any stable equilibrium without slipping.
DomainRaster no_slip_domain(const PllModel& model, const RasterBox& box,
                            const DomainOptions& opts = {});

struct UniformDomain {
  DomainRaster plus;
  DomainRaster minus;
  DomainRaster intersection;
  bool equilibria_inside = false;  // every stable equilibrium for |w| <= omega locks at +-omega
  double band_half_width = 0.0;    // largest |x| row such that all rows at or below it are members
};

UniformDomain uniform_domain_intersection(const LoopSpec& spec, double omega, const RasterBox& box,
                                          const DomainOptions& opts = {},
                                          int equilibrium_checks = 9);

// Largest |x| (cell centre) such that every row with |x| up to it is fully member.
double maximal_band(const DomainRaster& raster);

// Points where theta' = 0: x(theta) = (omega - L h phi(theta)) / (L c).
std::vector<PlanePoint> zero_freq_diff_locus(const PllModel& model, int samples);

// Export helpers.
void write_separatrices_csv(std::ostream& os, const SeparatrixSet& set);
void write_locus_csv(std::ostream& os, const std::vector<PlanePoint>& locus);
void write_raster_csv(std::ostream& os, const DomainRaster& raster);

struct PortraitScene {
  RasterBox box;
  double period = 0.0;
  const DomainRaster* shade_a = nullptr;
  const DomainRaster* shade_b = nullptr;
  const SeparatrixSet* separatrices = nullptr;
  const SeparatrixSet* separatrices_mirror = nullptr;
  const std::vector<Equilibrium>* equilibria = nullptr;
  const std::vector<PlanePoint>* locus = nullptr;
  std::string title;
};

void write_svg(std::ostream& os, const PortraitScene& scene);

}  // namespace pllranges
