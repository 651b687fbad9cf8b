#ifndef DELSARTE_SCENARIO_UTIL_HPP
#define DELSARTE_SCENARIO_UTIL_HPP

// Private helpers shared by the scenario translation units.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "delsarte/numgrid.hpp"
#include "delsarte/report.hpp"
#include "delsarte/scenario.hpp"

namespace delsarte
{
namespace scn
{

struct Stopwatch
{
   std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
   double lap()
   {
      const auto now = std::chrono::steady_clock::now();
      const double s = std::chrono::duration<double>(now - start).count();
      start = now;
      return s;
   }
};

inline int pick(int override_value, int fallback)
{
   return override_value > 0 ? override_value : fallback;
}

inline double tol_scale(const Options &o)
{
   return o.tol_scale > 0.0 ? o.tol_scale : 1.0;
}

inline std::pair<double, double> pick_box(const Options &o, double lo, double hi)
{
   if (o.box_set) { return {o.box_lo, o.box_hi}; }
   return {lo, hi};
}

inline std::string describe(const Grid &g)
{
   std::string s;
   char buf[96];
   for (int a = 0; a < g.dim(); ++a)
   {
      const Axis &ax = g.axis(a);
      std::snprintf(buf, sizeof(buf), "%s%s:%d@[%g,%g]", a ? " " : "",
                    ax.name.c_str(), ax.count, ax.lo, ax.hi);
      s += buf;
   }
   return s;
}

inline std::string num(double v)
{
   char buf[40];
   std::snprintf(buf, sizeof(buf), "%.3e", v);
   return buf;
}

inline Record custom_record(std::string check, double residual, double tolerance,
                            bool pass, std::string grid, std::string note,
                            double seconds)
{
   Record r;
   r.check = std::move(check);
   r.residual = residual;
   r.tolerance = tolerance;
   r.pass = pass;
   r.grid = std::move(grid);
   r.note = std::move(note);
   r.seconds = seconds;
   return r;
}

/// Sup over nodes at least margin cells from every face (degenerate axes and
/// axes too short for the margin are not restricted).
inline double sup_interior(const GridFunction &f, int margin)
{
   const Grid &g = f.grid();
   std::vector<int> idx(g.dim(), 0);
   double s = 0.0;
   for (long node = 0; node < g.node_count(); ++node)
   {
      bool inside = true;
      for (int a = 0; a < g.dim(); ++a)
      {
         const int n = g.axis(a).count;
         if (n <= 2 * margin + 1) { continue; }
         if (idx[a] < margin || idx[a] > n - 1 - margin) { inside = false; break; }
      }
      if (inside)
      {
         for (int c = 0; c < f.channels(); ++c)
         {
            s = std::max(s, std::abs(f.at(node, c)));
         }
      }
      for (int a = g.dim() - 1; a >= 0; --a)
      {
         if (++idx[a] < g.axis(a).count) { break; }
         idx[a] = 0;
      }
   }
   return s;
}

} // namespace scn
} // namespace delsarte

#endif
