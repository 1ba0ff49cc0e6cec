#include "oligo/types.hpp"

#include <cmath>

namespace oligo {

Operator operator_from_label(int label) {
  if (label < 1 || label > 3) {
    throw DomainError("operator label " + std::to_string(label) + " is not in {1,2,3}");
  }
  return static_cast<Operator>(label);
}

ModelKind parse_model(std::string_view name) {
  if (name == "cf" || name == "CF") return ModelKind::cf;
  if (name == "cap" || name == "CAP") return ModelKind::cap;
  throw DomainError("unknown model '" + std::string(name) + "' (expected cf or cap)");
}

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::cf ? "cf" : "cap";
}

void require_probability(double p, std::string_view what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(what) + " = " + std::to_string(p) + " is not in [0, 1]");
  }
}

}  // namespace oligo
