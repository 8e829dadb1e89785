#pragma once
#include "invscat/config.hpp"
#include "invscat/estimates.hpp"
#include "invscat/forward.hpp"
#include "invscat/marchenko.hpp"
#include "invscat/scattering.hpp"

namespace invscat {

struct ForwardResult {
  TransformKernel kernel;
  JostData jost;
  ScatteringData scattering;
  ValidationReport validation;
  VolterraHistory history;
};

// q => A => f, S, (k_j, s_j)
ForwardResult run_forward(const Potential& p, const RunConfig& cfg, bool levinson_strict = true);

struct InverseResult {
  FFunction F;
  TransformKernel kernel;
  Potential q;
  MarchenkoDiagnostics diagnostics;
};

// S => F => A => q
InverseResult run_inverse(const ScatteringData& sd, const RunConfig& cfg);

}  // namespace invscat
