#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgvflow/dataterm.hpp"
#include "tgvflow/grid.hpp"

namespace tgvflow {

enum class Prior { H1, TV, TV2, TVTV2, IC, TGV };

std::string_view prior_name(Prior p) noexcept;
/// Accepts h1, tv, tv2, tvtv2, ic, tgv (case-insensitive). Throws ValidationError.
Prior parse_prior(std::string_view name);

struct SolverParams {
  double lambda1 = 0.2;
  double lambda2 = 10.0;
  double lambda3 = 5e-5;  // IC only
  double tau1 = 0.25;
  double tau2 = 0.25;
  double theta = 1.0;
  int iterations = 3000;
  Prior prior = Prior::TGV;
  bool constrain_positive_x = false;
  int energy_every = 50;

  /// Throws ValidationError on out-of-range values.
  void validate() const;
};

/// Primal, split and dual variables of the TGV primal-dual iteration.
struct SolverState {
  DisplacementField u;
  GradientField a;
  GradientField s;
  SymGradField t;
  GradientField b1;
  SymGradField b2;
  GradientField b1_bar;
  SymGradField b2_bar;

  static SolverState zeros(int width, int height);
  /// u and a from a warm start, everything else zero.
  static SolverState warm(const DisplacementField& u0, const GradientField* a0);
};

struct SolveResult {
  DisplacementField u;
  GradientField a;  // smooth part of the displacement gradient
  GradientField s;  // non-smooth part
  std::vector<double> energy_trace;
};

/// One iteration of the TGV primal-dual scheme: data prox on u, explicit
/// update of a, grouped shrinkage for s (4-groups) and t (6-groups), dual
/// ascent on b1/b2 and extrapolation of the duals. Throws DivergenceError if
/// any variable becomes non-finite or exceeds 1e8 in magnitude.
SolverState pdhgmp_tgv_step(const SolverState& state, const LinearizedData& L,
                            const SolverParams& p);

/// In-place variant used by the solvers; identical arithmetic.
void pdhgmp_tgv_step_inplace(SolverState& state, const LinearizedData& L,
                             const SolverParams& p);

/// data term + lambda1 ||grad u - a||_{2,1} + lambda2 ||symgrad a||_{2,1}.
double energy_tgv(const DisplacementField& u, const GradientField& a, const LinearizedData& L,
                  const SolverParams& p);

/// Energy of a comparison prior. For IC, w is the smooth component of the
/// split u = v + w; ignored otherwise.
double energy_prior(const DisplacementField& u, const DisplacementField* w,
                    const LinearizedData& L, const SolverParams& p);

/// Minimize the linearized energy with the prior selected in p, starting from
/// u0 (and a0 for TGV). Energy is recorded every p.energy_every iterations
/// plus at the start and the end.
SolveResult solve_linearized(const LinearizedData& L, const DisplacementField& u0,
                             const GradientField* a0, const SolverParams& p);

/// Linearize around ubar and run p.iterations steps from u = ubar.
SolveResult solve_level(const ScalarField& f1, const ScalarField& f2,
                        const DisplacementField& ubar, const SolverParams& p,
                        const GradientField* a0 = nullptr);

/// solve_level for any of the six priors; kept as the named entry point for
/// prior comparisons.
SolveResult solve_prior(const ScalarField& f1, const ScalarField& f2,
                        const DisplacementField& ubar, const SolverParams& p);

/// eps11 = dx u1, eps22 = dy u2, eps12 = (dy u1 + dx u2) / 2, forward differences.
StrainField strain_from_flow(const DisplacementField& u);

/// max over pixels and planes of |grad u - a - s|.
double split_residual(const DisplacementField& u, const GradientField& a, const GradientField& s);

/// True iff ker([A B]) and ker(symgrad o grad) intersect only in zero.
/// Assembles dense matrices; throws ValidationError("diagnostic limited to
/// small grids") if either side exceeds max_dim.
bool existence_check(const LinearizedData& L, int max_dim = 16);

}  // namespace tgvflow
