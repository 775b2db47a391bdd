#pragma once

#include <variant>
#include <vector>

#include "phaseest/generators.hpp"
#include "phaseest/states.hpp"

namespace phaseest {

/// Symmetric PSD information matrix, one row/column per parameter.
using QfiMatrix = RealMat;

enum class ModelKind { kMpeu, kMpee, kFull };

/// A parametrized pure-state family at a specific parameter value:
/// single-system phase rotation (MPEU), the same rotation on one half of a
/// bipartite state (MPEE), or the full unitary group acting on one half
/// (FULL). Parameter count is d-1 for the commuting kinds, d^2-1 for FULL.
struct ModelPoint {
  ModelKind kind = ModelKind::kMpeu;
  GeneratorSet gens;
  std::variant<PureState, BipartiteState> input;
  RealVec theta;
};

ModelPoint mpeu_model(PureState input, RealVec theta);
ModelPoint mpee_model(BipartiteState input, RealVec theta);
ModelPoint full_model(BipartiteState input, RealVec theta);

/// Throws std::invalid_argument on kind/input/theta inconsistencies.
void validate_model(const ModelPoint& m);

int parameter_count(const ModelPoint& m);
int joint_dim(const ModelPoint& m);

Vec input_amplitudes(const ModelPoint& m);

/// The model unitary on the joint space at m.theta.
Mat model_unitary(const ModelPoint& m);

/// Amplitudes of the evolved state U_theta |input>.
Vec output_state(const ModelPoint& m);

/// Operators G_m with ∂_m rho(theta) = i [G_m, rho(theta)]. Theta-independent
/// for the commuting kinds; conjugated log-derivative generators for FULL.
std::vector<Mat> effective_generators(const ModelPoint& m);

/// |l_m> = 2i (G_m - <G_m>) |psi(theta)>, the pure-state SLD applied to the
/// state. The Gram matrix of these vectors carries all local information:
/// H = Re<l|l>, and Im<l|l> is the saturation obstruction.
std::vector<Vec> l_vectors(const ModelPoint& m);

QfiMatrix qfi(const ModelPoint& m);

/// Closed form 4[(d-1)/d - Σ t_m^2] from the first d-1 reduced-state
/// components; equals tr(qfi) for MPEE inputs.
double qfi_trace_formula(const BipartiteState& s, const GeneratorSet& gens);

/// max_{ij} |Im <l_i|l_j>|; zero iff a single measurement can saturate the
/// quantum Cramér-Rao bound at this point.
double quasiclassicality_witness(const ModelPoint& m);

/// Log-derivative generators S_a = -i V† ∂_a V of V = exp(i Σ theta_a T_a),
/// one per basis element, each verified Hermitian and traceless within 1e-8.
std::vector<Mat> s_matrices(const GeneratorSet& basis, const RealVec& theta);

/// QFI of the FULL model: 4 Re[tr(RR† S_a S_b) - tr(RR† S_a) tr(RR† S_b)].
QfiMatrix qfi_full(const BipartiteState& s, const GeneratorSet& basis, const RealVec& theta);

/// tr(Href^{-1} H) where Href is the FULL-model QFI of the maximally
/// entangled input at the same theta. Bounded by d^2-1, with equality exactly
/// at maximally entangled inputs. Throws std::runtime_error if Href is
/// numerically singular (condition number above 1e12).
double trace_bound_ratio(const BipartiteState& s, const GeneratorSet& basis, const RealVec& theta);

/// Max-abs deviation of Σ Href^{-1}_{ab} S_a S_b from ((d^2-1)/4) I.
double casimir_residual(const GeneratorSet& basis, const RealVec& theta);

}  // namespace phaseest
