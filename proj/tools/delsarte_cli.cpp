#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "delsarte/errors.hpp"
#include "delsarte/report.hpp"
#include "delsarte/scenario.hpp"

namespace
{

std::vector<double> split_numbers(const std::string &spec, const char *what,
                                  size_t min_n, size_t max_n)
{
   std::vector<double> vals;
   size_t pos = 0;
   while (pos <= spec.size())
   {
      const size_t comma = spec.find(',', pos);
      const std::string tok = spec.substr(pos, comma == std::string::npos
                                                  ? std::string::npos
                                                  : comma - pos);
      try
      {
         size_t used = 0;
         vals.push_back(std::stod(tok, &used));
         if (used != tok.size()) { throw std::invalid_argument(tok); }
      }
      catch (const std::exception &)
      {
         throw delsarte::Error("config", std::string("cannot parse ") + what +
                                            " value '" + tok + "'");
      }
      if (comma == std::string::npos) { break; }
      pos = comma + 1;
   }
   if (vals.size() < min_n || vals.size() > max_n)
   {
      throw delsarte::Error("config", std::string("bad ") + what + " '" + spec + "'");
   }
   return vals;
}

} // namespace

int main(int argc, char **argv)
{
   CLI::App app{"Delsarte transmutation operators: construction and verification"};
   app.footer("subcommands: adjoint lagrangian closedness stokes dress kdv zs all\n"
              "             sweep <lagrangian|closedness|dress>");

   std::string sub, sweep_target, gridspec, boxspec, config, out;
   double tolv = 0.0;
   unsigned seedv = 0;
   bool dbg = false;
   app.add_option("subcommand", sub, "verification scenario to run")->required();
   app.add_option("target", sweep_target, "refinement target for the sweep subcommand");
   app.add_option("--config", config, "JSON configuration file");
   app.add_option("--grid", gridspec, "node counts NX[,NT[,NY]]");
   app.add_option("--box", boxspec, "spatial box a,b");
   CLI::Option *tol_opt = app.add_option("--tol-scale", tolv,
                                         "multiply every tolerance by this factor");
   CLI::Option *out_opt = app.add_option("--out", out,
                                         "output directory for reports and artifacts");
   CLI::Option *seed_opt = app.add_option("--seed", seedv,
                                          "seed for the reproducible test batteries");
   app.add_flag("--debug-first-order", dbg,
                "use first-order outer differences in the Lagrangian check");

   CLI11_PARSE(app, argc, argv);

   try
   {
      delsarte::Options opts;
      opts.config = config;
      opts = delsarte::load_options(opts);
      if (!gridspec.empty())
      {
         const std::vector<double> g = split_numbers(gridspec, "--grid", 1, 3);
         opts.nx = (int)g[0];
         if (g.size() > 1) { opts.nt = (int)g[1]; }
         if (g.size() > 2) { opts.ny = (int)g[2]; }
      }
      if (!boxspec.empty())
      {
         const std::vector<double> b = split_numbers(boxspec, "--box", 2, 2);
         if (!(b[0] < b[1]))
         {
            throw delsarte::Error("config", "box must satisfy lo < hi");
         }
         opts.box_lo = b[0];
         opts.box_hi = b[1];
         opts.box_set = true;
      }
      if (tol_opt->count() > 0) { opts.tol_scale = tolv; }
      if (out_opt->count() > 0) { opts.out = out; }
      if (seed_opt->count() > 0) { opts.seed = seedv; }
      if (dbg) { opts.debug_first_order = true; }

      delsarte::Report rep;
      if (sub == "sweep")
      {
         if (sweep_target.empty())
         {
            throw delsarte::Error("config", "sweep needs a target subcommand");
         }
         rep = delsarte::refine_sweep(sweep_target, opts);
      }
      else
      {
         if (!sweep_target.empty())
         {
            throw delsarte::Error("config", "unexpected extra argument '" +
                                               sweep_target + "'");
         }
         rep = delsarte::run_subcommand(sub, opts);
      }
      rep.print();
      const std::string name = sub == "sweep" ? sweep_target + "_sweep" : sub;
      std::printf("report: %s/report_%s.json\n", opts.out.c_str(), name.c_str());
      return rep.overall() ? 0 : 2;
   }
   catch (const delsarte::Error &e)
   {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
   }
   catch (const std::exception &e)
   {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
   }
}
