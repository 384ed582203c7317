#include "afshar/quadrature.hpp"

#include <memory>

#include <gsl/gsl_integration.h>

#include "afshar/errors.hpp"

namespace afshar {

GaussLegendre::GaussLegendre(int order) {
  if (order < 1) throw DomainError("Gauss-Legendre order must be positive");
  const auto n = static_cast<std::size_t>(order);
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
  if (!table) throw DomainError("failed to build Gauss-Legendre table");
  nodes_.resize(n);
  weights_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(-1.0, 1.0, i, &nodes_[i], &weights_[i], table.get());
  }
}

}  // namespace afshar
