#include "relloc/report.hpp"

#include <algorithm>
#include <stdexcept>

namespace relloc {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Info: return "INFO";
  }
  return "UNKNOWN";
}

bool Residual::passed() const {
  switch (bound) {
    case Bound::AtMost: return value <= threshold;
    case Bound::AtLeast: return value >= threshold;
    case Bound::Info: return true;
  }
  return false;
}

CheckReport& CheckReport::at_most(const std::string& name, double value, double threshold) {
  residuals_.push_back({name, value, threshold, Bound::AtMost});
  return *this;
}

CheckReport& CheckReport::at_least(const std::string& name, double value, double threshold) {
  residuals_.push_back({name, value, threshold, Bound::AtLeast});
  return *this;
}

CheckReport& CheckReport::info(const std::string& name, double value) {
  residuals_.push_back({name, value, 0.0, Bound::Info});
  return *this;
}

CheckReport& CheckReport::require(const std::string& name, bool ok) {
  return at_most(name, ok ? 0.0 : 1.0, 0.0);
}

CheckReport& CheckReport::note(std::string text) {
  if (std::find(notes_.begin(), notes_.end(), text) == notes_.end()) {
    notes_.push_back(std::move(text));
  }
  return *this;
}

void CheckReport::merge(const CheckReport& other) {
  for (const auto& r : other.residuals_) {
    auto it = std::find_if(residuals_.begin(), residuals_.end(),
                           [&](const Residual& mine) { return mine.name == r.name; });
    if (it == residuals_.end()) {
      residuals_.push_back(r);
      continue;
    }
    // Instances may carry different thresholds (dimension-scaled bounds), so
    // the pair with the smallest margin is kept intact.
    switch (it->bound) {
      case Bound::AtLeast:
        if (it->threshold - it->value < r.threshold - r.value) *it = r;
        break;
      case Bound::AtMost:
        if (it->value - it->threshold < r.value - r.threshold) *it = r;
        break;
      case Bound::Info: it->value = std::max(it->value, r.value); break;
    }
  }
  for (const auto& n : other.notes_) note(n);
  for (const auto& [key, val] : other.witnesses_.items()) {
    if (!witnesses_.contains(key)) witnesses_[key] = val;
  }
}

Verdict CheckReport::verdict() const {
  bool any_asserted = false;
  for (const auto& r : residuals_) {
    if (!r.asserted()) continue;
    any_asserted = true;
    if (!r.passed()) return Verdict::Fail;
  }
  return any_asserted ? Verdict::Pass : Verdict::Info;
}

const Residual* CheckReport::find(const std::string& name) const {
  for (const auto& r : residuals_) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

double CheckReport::value(const std::string& name) const {
  const Residual* r = find(name);
  if (!r) throw std::out_of_range("CheckReport: no residual named " + name);
  return r->value;
}

const Residual* CheckReport::max_entry() const {
  const Residual* best = nullptr;
  for (const auto& r : residuals_) {
    if (r.bound == Bound::AtMost && (!best || r.value > best->value)) best = &r;
  }
  if (best) return best;
  for (const auto& r : residuals_) {
    if (!best || r.value > best->value) best = &r;
  }
  return best;
}

double CheckReport::max_residual() const {
  const Residual* r = max_entry();
  return r ? r->value : 0.0;
}

double CheckReport::max_residual_threshold() const {
  const Residual* r = max_entry();
  return r ? r->threshold : 0.0;
}

}  // namespace relloc
