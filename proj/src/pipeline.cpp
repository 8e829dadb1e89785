#include "invscat/pipeline.hpp"

namespace invscat {

ForwardResult run_forward(const Potential& p, const RunConfig& cfg, bool levinson_strict) {
  ForwardResult r;
  r.kernel = kernel_from_potential(p, cfg.volterra(), &r.history);
  r.jost = jost_function(r.kernel, cfg.k_grid(), cfg.jost());
  r.jost = find_bound_states(std::move(r.jost), r.kernel, cfg.bound_states());
  r.jost = norming_constants(std::move(r.jost), r.kernel, cfg.norming());
  r.scattering = scattering_from_jost(r.jost);
  r.validation = validate(r.scattering, cfg.validation(levinson_strict));
  r.scattering.index_kappa = r.validation.kappa;
  return r;
}

InverseResult run_inverse(const ScatteringData& sd, const RunConfig& cfg) {
  InverseResult r;
  r.F = build_F(sd, cfg.f_grid(), cfg.synthesis());
  r.kernel = solve_marchenko_all(r.F, cfg.marchenko(), &r.diagnostics);
  r.q = recover_potential(r.kernel);
  return r;
}

}  // namespace invscat
