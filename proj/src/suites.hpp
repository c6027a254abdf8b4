#pragma once

#include "hamlift/harness.hpp"

namespace hamlift::harness::detail {

// Checks the selected section against the suite's keys and value ranges.
void validate_params(const ExperimentConfig& c);

void run_mapping_verify(const ExperimentConfig& c, ResultRecord& r);
void run_bounds(const ExperimentConfig& c, ResultRecord& r);
void run_apxsim_lift(const ExperimentConfig& c, ResultRecord& r);
void run_gscon_lift(const ExperimentConfig& c, ResultRecord& r);
void run_traversal(const ExperimentConfig& c, ResultRecord& r);
void run_audit(const ExperimentConfig& c, ResultRecord& r);

// Tolerance override: the configured tol when set, else the check's default.
inline double tol_or(const ExperimentConfig& c, double fallback) { return c.tol > 0.0 ? c.tol : fallback; }

std::string fmt(double x);

}  // namespace hamlift::harness::detail
