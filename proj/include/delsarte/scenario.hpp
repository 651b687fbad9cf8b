#ifndef DELSARTE_SCENARIO_HPP
#define DELSARTE_SCENARIO_HPP

#include <string>

#include "delsarte/report.hpp"

namespace delsarte
{

/// Driver options; zero/empty fields fall back to per-scenario defaults.
struct Options
{
   std::string config;  // optional JSON config file
   int nx = 0, nt = 0, ny = 0;
   double box_lo = 0.0, box_hi = 0.0;
   bool box_set = false;
   double tol_scale = 1.0;
   std::string out = ".";
   unsigned seed = 12061991;
   bool debug_first_order = false;

   // optional dress inputs loaded from the config file
   std::string dress_operator, dress_family;
};

/// Merge the config file (when set) into the options; configuration
/// problems raise Error("config", ...).
Options load_options(Options base);

/// Subcommands: adjoint, lagrangian, closedness, stokes, dress, kdv, zs,
/// all. Writes artifacts and the report JSON into opts.out.
Report run_subcommand(const std::string &name, const Options &opts);

/// Three-rung refinement ladder (h, h/2, h/4) for a supported subcommand;
/// records fitted convergence orders, flagging order < 1.5.
Report refine_sweep(const std::string &name, const Options &opts);

} // namespace delsarte

#endif
