// Random well-typed program generation and the differential campaign:
// round-trip, policy consistency, monitored soundness and order
// independence, with shrinking of failing programs.
#ifndef MUSPARK_FUZZ_HPP
#define MUSPARK_FUZZ_HPP

#include <functional>
#include <optional>
#include <string>

#include "muspark/syntax.hpp"

namespace muspark {

struct GenConfig {
  uint64_t seed = 1;
  int max_records = 3;
  int max_fields = 3;
  int max_type_nesting = 2;
  int max_procedures = 2;  // besides Main
  int max_params = 3;
  int max_locals = 3;
  int max_statements = 10;
  int max_expr_depth = 3;
  double loop_probability = 0.12;
  double if_probability = 0.15;
  double call_probability = 0.2;
  double deep_assign_bias = 0.3;
  double overlap_arg_probability = 0.1;

  std::string to_json() const;
  static std::optional<GenConfig> from_json(const std::string& text);
};

// Well-typed by construction and deterministic in the seed.
Program generate_program(const GenConfig& config);

uint64_t derive_seed(uint64_t base, uint64_t index);

enum class FailureKind : uint8_t {
  None,
  TypecheckDisagreement,
  RoundTrip,
  Consistency,
  CrewViolation,
  OrderDependence,
};

const char* to_string(FailureKind kind);

struct CampaignFailure {
  FailureKind kind = FailureKind::None;
  uint64_t seed = 0;
  std::string detail;
  std::string reproducer;  // shrunk program text with a config header
};

struct CampaignConfig {
  GenConfig gen;
  int count = 100;
  uint64_t fuel = 100000;
  // Negative control: skip the alias check and monitor rejected programs
  // against a permissive policy; violations are tallied, not failures.
  bool unchecked = false;
  bool monitored = true;
  bool check_order_independence = true;
  int consistency_depth = 6;
  // When nonzero, keep generating (up to max_attempts) until this many
  // programs were accepted by the alias check.
  int required_accepted = 0;
  int max_attempts = 0;
};

struct CampaignReport {
  int generated = 0;
  int accepted = 0;
  int rejected = 0;
  int completed = 0;
  int blocked = 0;
  int fuel_exhausted = 0;
  int crew_violations = 0;
  int consistency_failures = 0;
  int roundtrip_failures = 0;
  int order_mismatches = 0;
  int typecheck_failures = 0;
  std::optional<CampaignFailure> failure;

  bool ok() const { return !failure.has_value(); }
  std::string summary() const;
};

CampaignReport run_campaign(const CampaignConfig& config);

// Greedy shrinking: drops statements, then procedures, then record fields,
// keeping the failure predicate true and the program well-typed.
using FailPredicate = std::function<bool(const Program&)>;
Program shrink_program(const Program& input, const FailPredicate& predicate);

}  // namespace muspark

#endif  // MUSPARK_FUZZ_HPP
