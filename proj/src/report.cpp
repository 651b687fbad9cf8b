#include "delsarte/report.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "delsarte/errors.hpp"

namespace delsarte
{

Record make_record(std::string check, double residual, double tolerance,
                   std::string grid, std::string note, double seconds)
{
   Record r;
   r.check = std::move(check);
   r.residual = residual;
   r.tolerance = tolerance;
   r.pass = tolerance <= 0.0 || residual <= tolerance;
   r.grid = std::move(grid);
   r.note = std::move(note);
   r.seconds = seconds;
   return r;
}

bool Report::overall() const
{
   for (const Record &r : records)
   {
      if (!r.pass) { return false; }
   }
   return true;
}

std::string Report::to_json() const
{
   nlohmann::ordered_json j;
   j["schema"] = 1;
   j["subcommand"] = subcommand;
   j["seed"] = seed;
   nlohmann::ordered_json recs = nlohmann::ordered_json::array();
   double total = 0.0;
   nlohmann::ordered_json times = nlohmann::ordered_json::array();
   for (const Record &r : records)
   {
      nlohmann::ordered_json e;
      e["check"] = r.check;
      e["residual"] = r.residual;
      e["tolerance"] = r.tolerance;
      e["pass"] = r.pass;
      e["grid"] = r.grid;
      if (!r.note.empty()) { e["note"] = r.note; }
      recs.push_back(std::move(e));
      times.push_back(r.seconds);
      total += r.seconds;
   }
   j["records"] = std::move(recs);
   j["overall"] = overall() ? "pass" : "fail";
   j["timing"] = {{"seconds", std::move(times)}, {"total_seconds", total}};
   return j.dump(2) + "\n";
}

void Report::write(const std::string &path) const
{
   const std::string tmp = path + ".tmp";
   {
      std::ofstream os(tmp);
      if (!os) { throw Error("io", "cannot write report '" + path + "'"); }
      os << to_json();
   }
   if (std::rename(tmp.c_str(), path.c_str()) != 0)
   {
      throw Error("io", "cannot move report into place at '" + path + "'");
   }
}

void Report::print() const
{
   std::printf("%-44s %12s %12s  %s\n", "check", "residual", "tolerance", "verdict");
   for (const Record &r : records)
   {
      std::printf("%-44s %12.4e %12.4e  %s%s%s\n", r.check.c_str(), r.residual,
                  r.tolerance, r.pass ? "pass" : "FAIL",
                  r.note.empty() ? "" : "  # ", r.note.c_str());
   }
   std::printf("overall: %s\n", overall() ? "pass" : "FAIL");
}

} // namespace delsarte
