#pragma once

// JSON encodings. Matrices are {"dim": n, "re": [...], "im": [...]} in
// row-major order; doubles are printed with round-trip precision, so a
// decode of an encode is bit-exact.

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "relloc/conditional.hpp"
#include "relloc/geometry.hpp"
#include "relloc/lattice.hpp"
#include "relloc/measurement.hpp"
#include "relloc/report.hpp"

namespace relloc {

using nlohmann::json;

/// Input that does not match the schema; `pointer` is the JSON pointer of
/// the offending value.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : std::runtime_error(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Typed field access that reports failures as SchemaError at `path`/`key`.
const json& require_field(const json& j, const std::string& key, const std::string& path);
double get_number(const json& j, const std::string& key, const std::string& path);
double get_number(const json& j, const std::string& key, const std::string& path, double fallback);
std::int64_t get_int(const json& j, const std::string& key, const std::string& path,
                     std::int64_t fallback);
std::string get_string(const json& j, const std::string& key, const std::string& path,
                       const std::string& fallback);

json to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& path = "");

json to_json(const Effect& e);
json to_json(const DensityState& rho);
json to_json(const DiscretePOVM& povm);
json to_json(const KrausInstrument& instr);

/// Accept the tagged wrapper or a bare matrix. Contract violations are
/// SchemaErrors at `path`.
Effect effect_from_json(const json& j, const std::string& path = "");
DensityState state_from_json(const json& j, const std::string& path = "");
DiscretePOVM povm_from_json(const json& j, const std::string& path = "");
KrausInstrument instrument_from_json(const json& j, const std::string& path = "");

json to_json(const FourVector& v);
FourVector four_vector_from_json(const json& j, const std::string& path = "");
json to_json(const SpacetimeBox& b);
SpacetimeBox box_from_json(const json& j, const std::string& path = "");
json to_json(const RegionUnion& r);
RegionUnion region_from_json(const json& j, const std::string& path = "");

json to_json(const CellSet& c);
CellSet cells_from_json(const json& j, std::size_t n, const std::string& path = "");

json to_json(const LatticeLocalizationSystem& sys);

json to_json(const CheckReport& r);
CheckReport report_from_json(const json& j);

}  // namespace relloc
