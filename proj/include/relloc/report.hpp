#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace relloc {

enum class Verdict { Pass, Fail, Info };

std::string to_string(Verdict v);

/// How a residual is judged against its threshold.
enum class Bound {
  AtMost,   // passes iff value <= threshold
  AtLeast,  // passes iff value >= threshold
  Info,     // reported, never judged
};

struct Residual {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Bound bound = Bound::Info;

  bool asserted() const { return bound != Bound::Info; }
  bool passed() const;
};

/// Named residuals with thresholds, free-form notes and witness payloads.
/// The verdict is FAIL iff an asserted residual misses its threshold, INFO if
/// nothing is asserted, PASS otherwise.
class CheckReport {
 public:
  CheckReport() = default;
  explicit CheckReport(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }

  CheckReport& at_most(const std::string& name, double value, double threshold);
  CheckReport& at_least(const std::string& name, double value, double threshold);
  CheckReport& info(const std::string& name, double value);
  /// Boolean requirement recorded as a 0/1 residual that must be 0.
  CheckReport& require(const std::string& name, bool ok);
  CheckReport& note(std::string text);

  /// Folds another report of the same check (e.g. a repeat) into this one.
  /// Asserted residuals keep the (value, threshold) pair with the smallest
  /// margin, which is the max (AtMost) or min (AtLeast) value when thresholds
  /// agree. Info keeps the max.
  void merge(const CheckReport& other);

  Verdict verdict() const;
  bool passed() const { return verdict() != Verdict::Fail; }

  const std::vector<Residual>& residuals() const { return residuals_; }
  const Residual* find(const std::string& name) const;
  double value(const std::string& name) const;
  const std::vector<std::string>& notes() const { return notes_; }

  /// Largest asserted AtMost value (or largest value of any kind when no
  /// AtMost residual exists).
  double max_residual() const;
  /// Threshold of the residual reported by max_residual().
  double max_residual_threshold() const;

  nlohmann::json& witnesses() { return witnesses_; }
  const nlohmann::json& witnesses() const { return witnesses_; }

 private:
  const Residual* max_entry() const;

  std::string name_;
  std::vector<Residual> residuals_;
  std::vector<std::string> notes_;
  nlohmann::json witnesses_ = nlohmann::json::object();
};

}  // namespace relloc
