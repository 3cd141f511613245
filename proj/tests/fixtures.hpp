#pragma once

#include <crcartan/model.hpp>

#include <string>
#include <vector>

namespace fixtures {

using namespace crcartan;

inline Expr model() { return mlc_graph(); }
inline Expr sheared_model() { return transform_graph(mlc_graph(), shear_map()); }
inline Expr dilated_model() { return transform_graph(mlc_graph(), dilation_map()); }
inline Expr mixed_model() { return transform_graph(mlc_graph(), mixing_map()); }

// Tube over the cone u = (x1^4 + x1^2 x2^2)/x2^3, x = Re z: homogeneous of
// degree one, so Levi rank 1, and not a quadric cone.
inline Expr quartic_cone() {
  return parse_expr("((z1+zb1)^4 + (z1+zb1)^2*(z2+zb2)^2) / (2*(z2+zb2)^3)");
}

struct Named {
  std::string name;
  Expr F;
};

// Surfaces rigidly equivalent to the model.
inline std::vector<Named> model_corpus() {
  return {{"model", model()}, {"shear", sheared_model()}, {"dilation", dilated_model()}, {"mix", mixed_model()}};
}

inline std::vector<Named> full_corpus() {
  auto c = model_corpus();
  c.push_back({"quartic-cone", quartic_cone()});
  return c;
}

}  // namespace fixtures
