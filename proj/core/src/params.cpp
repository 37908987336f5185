#include "chds/params.hpp"

#include <cmath>
#include <sstream>

#include "chds/error.hpp"

namespace chds {

std::string_view to_string(Coupling c) { return c == Coupling::Picard ? "picard" : "monolithic"; }

namespace {

void require(bool ok, const char* key, const char* constraint, double value) {
  if (ok) return;
  std::ostringstream msg;
  msg << key << ": must satisfy " << constraint << " (got " << value << ")";
  throw Error(ErrorKind::Config, msg.str());
}

}  // namespace

void Params::validate() const {
  require(epsilon > 0.0, "epsilon", "epsilon > 0", epsilon);
  require(gamma >= 0.0, "gamma", "gamma >= 0", gamma);
  require(lambda > 0.0, "lambda", "lambda > 0", lambda);
  require(eta >= 0.0, "eta", "eta >= 0", eta);
  require(theta >= 0.0, "theta", "theta >= 0", theta);
  require(omega == 1.0, "omega", "omega = 1", omega);
  require(tau > 0.0, "tau", "tau > 0", tau);
  require(final_time > 0.0, "T", "T > 0", final_time);
  require(picard_tol > 0.0, "picard_tol", "picard_tol > 0", picard_tol);
  require(newton_tol > 0.0, "newton_tol", "newton_tol > 0", newton_tol);
  require(linear_tol > 0.0, "linear_tol", "linear_tol > 0", linear_tol);
  require(max_picard >= 1, "max_picard", "max_picard >= 1", max_picard);
  require(max_newton >= 1, "max_newton", "max_newton >= 1", max_newton);
  require(std::isfinite(epsilon + gamma + lambda + eta + theta + tau + final_time), "parameters", "finite values",
          NAN);
}

int Params::step_count() const {
  if (!(tau > 0.0) || !(final_time > 0.0)) throw Error(ErrorKind::Config, "tau and T must be positive");
  const double ratio = final_time / tau;
  const double m = std::round(ratio);
  if (m < 1.0 || std::abs(final_time - m * tau) > 1e-12 * std::max(1.0, final_time)) {
    std::ostringstream msg;
    msg << "tau: must divide T (T / tau = " << ratio << " is not an integer)";
    throw Error(ErrorKind::Config, msg.str());
  }
  if (m > 1e9) throw Error(ErrorKind::Config, "tau: too many steps");
  return static_cast<int>(m);
}

}  // namespace chds
