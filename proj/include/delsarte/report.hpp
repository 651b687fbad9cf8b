#ifndef DELSARTE_REPORT_HPP
#define DELSARTE_REPORT_HPP

#include <string>
#include <vector>

namespace delsarte
{

/// One verification record; tolerance <= 0 marks an informational entry
/// (always passing, e.g. control ratios reported for context).
struct Record
{
   std::string check;
   double residual = 0.0;
   double tolerance = 0.0;
   bool pass = true;
   std::string grid;
   std::string note;
   double seconds = 0.0;
};

struct Report
{
   std::string subcommand;
   unsigned seed = 0;
   std::vector<Record> records;

   void add(Record r) { records.push_back(std::move(r)); }
   bool overall() const;

   /// Deterministic JSON (schema 1); wall times live under the separate
   /// "timing" key so the rest is byte-stable across runs.
   std::string to_json() const;
   /// Atomic write (temp file then rename).
   void write(const std::string &path) const;

   /// Compact table on stdout.
   void print() const;
};

/// Helper: build a record and evaluate pass from residual <= tolerance.
Record make_record(std::string check, double residual, double tolerance,
                   std::string grid, std::string note = "", double seconds = 0.0);

} // namespace delsarte

#endif
