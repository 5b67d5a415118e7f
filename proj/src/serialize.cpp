#include "relloc/serialize.hpp"

#include <cmath>

namespace relloc {

namespace {

std::string child(const std::string& path, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') escaped += "~0";
    else if (c == '/') escaped += "~1";
    else escaped += c;
  }
  return path + "/" + escaped;
}

std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const json& require_array(const json& j, const std::string& key, const std::string& path) {
  const json& v = require_field(j, key, path);
  if (!v.is_array()) throw SchemaError(child(path, key), "expected an array");
  return v;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(path, "non-finite number");
  return d;
}

template <class F>
auto wrap_contract(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  } catch (const std::domain_error& e) {
    throw SchemaError(path, e.what());
  }
}

std::vector<std::string> labels_of(const json& j, const std::string& path) {
  std::vector<std::string> labels;
  if (!j.contains("labels")) return labels;
  const json& l = require_array(j, "labels", path);
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (!l[i].is_string()) throw SchemaError(child(child(path, "labels"), i), "expected a string");
    labels.push_back(l[i].get<std::string>());
  }
  return labels;
}

const char* bound_name(Bound b) {
  switch (b) {
    case Bound::AtMost: return "at_most";
    case Bound::AtLeast: return "at_least";
    case Bound::Info: return "info";
  }
  return "info";
}

// JSON has no NaN or infinity; they travel as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_back(const json& v) {
  if (v.is_number()) return v.get<double>();
  const auto s = v.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return NAN;
}

}  // namespace

const json& require_field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(child(path, key), "missing field");
  return *it;
}

double get_number(const json& j, const std::string& key, const std::string& path) {
  return as_number(require_field(j, key, path), child(path, key));
}

double get_number(const json& j, const std::string& key, const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  return get_number(j, key, path);
}

std::int64_t get_int(const json& j, const std::string& key, const std::string& path,
                     std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw SchemaError(child(path, key), "expected an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& j, const std::string& key, const std::string& path,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) throw SchemaError(child(path, key), "expected a string");
  return v.get<std::string>();
}

json to_json(const Matrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      re.push_back(m(i, k).real());
      im.push_back(m(i, k).imag());
    }
  }
  return {{"dim", m.rows()}, {"re", re}, {"im", im}};
}

Matrix matrix_from_json(const json& j, const std::string& path) {
  const json& dim_j = require_field(j, "dim", path);
  if (!dim_j.is_number_integer() || dim_j.get<std::int64_t>() < 1) {
    throw SchemaError(child(path, "dim"), "expected a positive integer");
  }
  const auto n = static_cast<Eigen::Index>(dim_j.get<std::int64_t>());
  const json& re = require_array(j, "re", path);
  const json& im = require_array(j, "im", path);
  const auto want = static_cast<std::size_t>(n * n);
  if (re.size() != want) {
    throw SchemaError(child(path, "re"), "expected " + std::to_string(want) + " entries, got " +
                                             std::to_string(re.size()));
  }
  if (im.size() != want) {
    throw SchemaError(child(path, "im"), "expected " + std::to_string(want) + " entries, got " +
                                             std::to_string(im.size()));
  }
  Matrix m(n, n);
  for (std::size_t idx = 0; idx < want; ++idx) {
    const double r = as_number(re[idx], child(child(path, "re"), idx));
    const double i = as_number(im[idx], child(child(path, "im"), idx));
    m(static_cast<Eigen::Index>(idx) / n, static_cast<Eigen::Index>(idx) % n) = Complex(r, i);
  }
  return m;
}

json to_json(const Effect& e) { return {{"type", "effect"}, {"matrix", to_json(e.matrix())}}; }

json to_json(const DensityState& rho) {
  return {{"type", "state"}, {"matrix", to_json(rho.matrix())}};
}

json to_json(const DiscretePOVM& povm) {
  json effects = json::array();
  for (const auto& e : povm.effects()) effects.push_back(to_json(e.matrix()));
  return {{"type", "povm"}, {"labels", povm.labels()}, {"effects", effects}};
}

json to_json(const KrausInstrument& instr) {
  json outcomes = json::array();
  for (std::size_t j = 0; j < instr.outcomes(); ++j) {
    json kraus = json::array();
    for (const auto& k : instr.family(j)) kraus.push_back(to_json(k));
    outcomes.push_back({{"label", instr.povm().labels()[j]}, {"kraus", kraus}});
  }
  return {{"type", "instrument"}, {"outcomes", outcomes}};
}

namespace {

// Tagged wrapper {"type": tag, "matrix": {...}} or a bare matrix.
Matrix wrapped_matrix(const json& j, const std::string& tag, const std::string& path) {
  if (j.is_object() && j.contains("type")) {
    const std::string type = get_string(j, "type", path, "");
    if (type != tag) throw SchemaError(child(path, "type"), "expected '" + tag + "'");
    return matrix_from_json(require_field(j, "matrix", path), child(path, "matrix"));
  }
  return matrix_from_json(j, path);
}

}  // namespace

Effect effect_from_json(const json& j, const std::string& path) {
  Matrix m = wrapped_matrix(j, "effect", path);
  return wrap_contract(path, [&] { return Effect(std::move(m)); });
}

DensityState state_from_json(const json& j, const std::string& path) {
  Matrix m = wrapped_matrix(j, "state", path);
  return wrap_contract(path, [&] { return DensityState(std::move(m)); });
}

DiscretePOVM povm_from_json(const json& j, const std::string& path) {
  const json& effects = require_array(j, "effects", path);
  std::vector<Matrix> ms;
  for (std::size_t i = 0; i < effects.size(); ++i) {
    ms.push_back(matrix_from_json(effects[i], child(child(path, "effects"), i)));
  }
  auto labels = labels_of(j, path);
  ValidationOptions opts;
  opts.require_nonzero = j.value("require_nonzero", true);
  return wrap_contract(path, [&] { return DiscretePOVM(std::move(ms), std::move(labels), opts); });
}

KrausInstrument instrument_from_json(const json& j, const std::string& path) {
  const json& outcomes = require_array(j, "outcomes", path);
  std::vector<std::vector<Matrix>> families;
  std::vector<std::string> labels;
  for (std::size_t o = 0; o < outcomes.size(); ++o) {
    const std::string op = child(child(path, "outcomes"), o);
    const json& kraus = require_array(outcomes[o], "kraus", op);
    std::vector<Matrix> fam;
    for (std::size_t k = 0; k < kraus.size(); ++k) {
      fam.push_back(matrix_from_json(kraus[k], child(child(op, "kraus"), k)));
    }
    families.push_back(std::move(fam));
    labels.push_back(get_string(outcomes[o], "label", op, std::to_string(o)));
  }
  return wrap_contract(path, [&] { return KrausInstrument(std::move(families), std::move(labels)); });
}

json to_json(const FourVector& v) { return json::array({v.t, v.x, v.y, v.z}); }

FourVector four_vector_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4) throw SchemaError(path, "expected [t, x, y, z]");
  FourVector v;
  for (int i = 0; i < 4; ++i) v[i] = as_number(j[static_cast<std::size_t>(i)], child(path, static_cast<std::size_t>(i)));
  return v;
}

json to_json(const SpacetimeBox& b) { return {{"lo", to_json(b.lo())}, {"hi", to_json(b.hi())}}; }

SpacetimeBox box_from_json(const json& j, const std::string& path) {
  const FourVector lo = four_vector_from_json(require_field(j, "lo", path), child(path, "lo"));
  const FourVector hi = four_vector_from_json(require_field(j, "hi", path), child(path, "hi"));
  return wrap_contract(path, [&] { return SpacetimeBox(lo, hi); });
}

json to_json(const RegionUnion& r) {
  json boxes = json::array();
  for (const auto& b : r.boxes()) boxes.push_back(to_json(b));
  return {{"frame", to_json(r.frame())}, {"boxes", boxes}};
}

RegionUnion region_from_json(const json& j, const std::string& path) {
  FourVector frame{1.0, 0.0, 0.0, 0.0};
  if (j.is_object() && j.contains("frame")) {
    frame = four_vector_from_json(j.at("frame"), child(path, "frame"));
  }
  const json& boxes = require_array(j, "boxes", path);
  std::vector<SpacetimeBox> bs;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    bs.push_back(box_from_json(boxes[i], child(child(path, "boxes"), i)));
  }
  return wrap_contract(path, [&] { return RegionUnion(std::move(bs), frame); });
}

json to_json(const CellSet& c) { return c.cells(); }

CellSet cells_from_json(const json& j, std::size_t n, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of cell indices");
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_unsigned() && !(j[i].is_number_integer() && j[i].get<std::int64_t>() >= 0)) {
      throw SchemaError(child(path, i), "expected a non-negative integer");
    }
    cells.push_back(j[i].get<std::size_t>());
  }
  return wrap_contract(path, [&] { return CellSet(n, std::move(cells)); });
}

json to_json(const LatticeLocalizationSystem& sys) {
  json effects = json::array();
  for (const auto& e : sys.cell_effects) effects.push_back(to_json(e));
  return {{"type", "lattice_system"}, {"kind", to_string(sys.kind)}, {"n", sys.n},
          {"a", sys.a},     {"mass", sys.mass},           {"width", sys.width},
          {"coherence", sys.coherence},                    {"cell_effects", effects},
          {"shift", to_json(sys.shift)},                   {"hamiltonian", to_json(sys.hamiltonian)}};
}

json to_json(const CheckReport& r) {
  json residuals = json::array();
  for (const auto& res : r.residuals()) {
    residuals.push_back({{"name", res.name},
                         {"value", number(res.value)},
                         {"threshold", number(res.threshold)},
                         {"bound", bound_name(res.bound)},
                         {"passed", res.passed()}});
  }
  return {{"name", r.name()},
          {"verdict", to_string(r.verdict())},
          {"residuals", residuals},
          {"notes", r.notes()},
          {"witnesses", r.witnesses()}};
}

CheckReport report_from_json(const json& j) {
  CheckReport r(j.at("name").get<std::string>());
  for (const auto& res : j.at("residuals")) {
    const std::string name = res.at("name").get<std::string>();
    const double value = number_back(res.at("value"));
    const double threshold = number_back(res.at("threshold"));
    const std::string bound = res.at("bound").get<std::string>();
    if (bound == "at_most") r.at_most(name, value, threshold);
    else if (bound == "at_least") r.at_least(name, value, threshold);
    else r.info(name, value);
  }
  for (const auto& n : j.at("notes")) r.note(n.get<std::string>());
  r.witnesses() = j.at("witnesses");
  return r;
}

}  // namespace relloc
