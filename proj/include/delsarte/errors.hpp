#ifndef DELSARTE_ERRORS_HPP
#define DELSARTE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace delsarte
{

/// All library failures carry a short machine-readable kind plus a message.
class Error : public std::runtime_error
{
public:
   Error(std::string kind, const std::string &msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
   const std::string &kind() const { return kind_; }

private:
   std::string kind_;
};

class SingularMatrixError : public Error
{
public:
   SingularMatrixError(const std::string &msg, double pivot)
      : Error("singular-matrix", msg), pivot_(pivot) {}
   double pivot() const { return pivot_; }

private:
   double pivot_;
};

} // namespace delsarte

#endif
