#pragma once

#include "aisplan/history_tree.hpp"
#include "aisplan/metrics.hpp"
#include "aisplan/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace aisplan {

// ---------------------------------------------------------------------------
// Types

enum class GroundMetricKind { Discrete, L1, Euclidean, Explicit };

std::string to_string(GroundMetricKind k);
GroundMetricKind parse_ground_metric(const std::string& s);

/// Finite AIS space of one stage with its ground metric.
struct AisSpace {
    std::size_t size = 0;
    std::vector<std::vector<double>> points; // optional coordinates (beliefs, embeddings)
    GroundMetricKind metric = GroundMetricKind::Discrete;
    std::vector<double> explicit_dist;       // size*size when metric == Explicit

    double distance(std::size_t i, std::size_t j) const;
    /// Metric on the listed elements, in that order.
    MetricSpace restricted(std::span<const std::size_t> idx) const;
    EmbeddedPoints restricted_points(std::span<const std::size_t> idx) const;
};

struct AisStage {
    AisSpace space;
    std::vector<double> reward;                     // [z * nA + a]
    std::vector<SparseDist> kernel;                 // [z * nA + a] over the next stage; empty at the last stage
    std::vector<std::size_t> update;                // optional [(z * nA + a) * nY + y], kNoNode when unused
    std::vector<std::vector<double>> obs_predictor; // optional [z * nA + a], dense over observations
};

/// History -> distribution over the AIS space of stage h.stage().
/// Deterministic compressions return a single entry of mass 1.
using CompressFn = std::function<SparseDist(const History&)>;

struct AisCertificate {
    IpmKind kind = IpmKind::TotalVariation;
    double exponent = 1.0;
    std::vector<double> eps;   // per stage t = 1..T
    std::vector<double> delta; // per stage t = 1..T (delta_T = 0)
    bool measured = true;

    std::size_t stages() const { return eps.size(); }
    double max_eps() const;
    double max_delta() const;
};

/// How the generator's compression can be rebuilt after deserialization.
struct CompressDescriptor {
    std::string kind = "custom"; // belief_quantization, exact_belief, mdp_state, table, custom
    std::size_t n = 0;
    std::string kernel;          // "exact" or "quantized" for belief_quantization
};

struct AisGenerator {
    std::size_t n_actions = 0;
    std::size_t n_observations = 0;
    double discount = 1.0;
    bool stationary = false;
    std::vector<AisStage> stages; // stationary: exactly one
    CompressFn compress;
    bool stochastic = false;
    std::vector<std::size_t> action_set; // Â; empty means all actions
    std::vector<std::size_t> action_map; // q_a : A -> Â; empty means identity
    std::optional<AisCertificate> declared;
    CompressDescriptor descriptor;

    /// Number of stages for finite generators; 0 when stationary.
    std::size_t horizon() const { return stationary ? 0 : stages.size(); }
    const AisStage& stage(std::size_t t) const;
    bool allows(std::size_t a) const;
    std::size_t quantize_action(std::size_t a) const;
    std::vector<std::size_t> allowed_actions() const;
};

/// Throws ModelError when kernel rows are not stochastic, tables have the
/// wrong size, or the kernel differs from the update/obs_predictor composition.
void validate_generator(const AisGenerator& gen);

// ---------------------------------------------------------------------------
// Type lattice

/// Nearest point of Q_n = {p : n p_i integer} in l1; ties go to the
/// lexicographically smallest vector.
ProbVector lattice_quantize(const ProbVector& b, std::size_t n);
/// Worst-case l1 quantization error 2 floor(m/2) ceil(m/2) / (m n).
double lattice_l1_error_bound(std::size_t m, std::size_t n);
std::size_t lattice_size(std::size_t m, std::size_t n);
std::vector<std::vector<double>> enumerate_lattice(std::size_t m, std::size_t n);

// ---------------------------------------------------------------------------
// Constructors

enum class BeliefKernel {
    ExactUpdate,     // P(z'|z,a) puts mass psi(y|z,a) on aupdate(z,y,a)
    QuantizedUpdate  // ... on lattice_quantize(aupdate(z,y,a))
};

struct BeliefQuantOptions {
    BeliefKernel kernel = BeliefKernel::ExactUpdate; // forced to QuantizedUpdate when stationary
    std::size_t point_cap = 100'000;
    std::size_t full_lattice_limit = 20'000; // stationary: seed with all of Q_n if it is this small
    std::size_t seed_depth = 6;              // stationary: otherwise seed with Q(b) for |h| < seed_depth
    std::vector<ProbVector> seeds;           // stage-1 beliefs; default is the initial belief
};

/// Belief-quantization AIS. horizon = 0 builds a stationary generator.
/// n = 0 means no quantization (exact belief information state).
/// Declares (||r|| e1, 3 e1) for the exact kernel and (||r|| e1, 4 e1) for the
/// quantized kernel when kind is BoundedLipschitz; (0, 0) when n = 0.
AisGenerator build_belief_quant_ais(const PomdpModel& model, std::size_t horizon, std::size_t n,
                                    IpmKind kind = IpmKind::BoundedLipschitz,
                                    const BeliefQuantOptions& opt = {});

/// Compression h -> index of lattice_quantize(b(h)) (or b(h) when n = 0) among
/// the given per-stage points; one point list when stationary.
CompressFn belief_point_compression(const PomdpModel& model, std::size_t n, bool stationary,
                                    const std::vector<std::vector<std::vector<double>>>& stage_points);

std::vector<SparseDist> compose_kernel_from_obs_predictor(
    std::size_t n_z, std::size_t n_actions, std::size_t n_observations,
    const std::vector<std::size_t>& update, const std::vector<std::vector<double>>& obs_predictor);

/// Single-point generator: compress maps every history to the one point.
AisGenerator constant_generator(const PomdpModel& model, std::size_t horizon,
                                std::vector<double> reward_per_action);

/// Wraps a generator so its compression sees histories with observations
/// mapped through q_obs (used for generators built on a compressed model).
AisGenerator with_observation_map(AisGenerator gen, std::vector<std::size_t> q_obs,
                                  std::size_t original_observations);

/// Wraps a deterministic generator into a stochastic one with point-mass compression.
AisGenerator as_stochastic(AisGenerator gen);

PomdpModel compress_observations(const PomdpModel& model, const std::vector<std::size_t>& q_obs);

// ---------------------------------------------------------------------------
// Measurement

struct MeasureOptions {
    std::size_t history_cap = kDefaultHistoryCap;
    std::size_t node_cap = kDefaultNodeCap;
    double mmd_exponent = 1.0;
};

/// Exact (eps_t, delta_t) by enumerating reachable histories up to `horizon`.
AisCertificate measure_ais(const PomdpModel& model, const AisGenerator& gen, std::size_t horizon,
                           IpmKind kind, const MeasureOptions& opt = {});
/// Same, on a prebuilt tree.
AisCertificate measure_ais(const HistoryTree& tree, const AisGenerator& gen, IpmKind kind,
                           double mmd_exponent = 1.0);

struct InfoStateReport {
    bool holds = false;
    double reward_violation = 0; // best achievable eps for this compression
    double kernel_violation = 0; // TV spread of next-z distributions within a class
    std::optional<bool> p2a;     // update map reproduces the compression
    std::optional<bool> p2b;     // obs predictor matches psi
};

/// Checks (P1) and (P2) for a deterministic compression; indices per stage.
InfoStateReport verify_information_state(const PomdpModel& model, const CompressFn& compress,
                                         std::size_t horizon, std::size_t history_cap = kDefaultHistoryCap);
/// Also checks (P2a)/(P2b) against the generator's update map and obs predictor.
InfoStateReport verify_information_state(const PomdpModel& model, const AisGenerator& gen,
                                         std::size_t horizon, std::size_t history_cap = kDefaultHistoryCap);

/// Maps each reachable history to its own index (the trivial information state).
CompressFn history_index_compression(const PomdpModel& model, std::size_t horizon);

// ---------------------------------------------------------------------------
// Fully observed models

/// The MDP itself as an AIS generator over states. Stage 1 compresses to the
/// initial distribution (stochastic unless it is a point mass).
AisGenerator mdp_generator(const PomdpModel& mdp);

struct AggregationSpec {
    std::vector<std::size_t> q; // state -> cell
    std::vector<double> w;      // per-state weight, summing to 1 in each cell
    std::size_t cells() const;
};

struct AggregationResult {
    PomdpModel model;             // fully observed model over cells
    double similarity_eps = 0;    // model-similarity constant
    AisCertificate declared;      // (eps, eps |S_hat|) under TV
    AisCertificate measured;      // direct (AP1)/(AP2) quantities under TV
    AisGenerator generator;       // compression s -> q(s)
};

AggregationResult build_aggregated_mdp(const PomdpModel& mdp, const AggregationSpec& spec);

struct LatentModel {
    std::vector<std::vector<double>> points; // latent points in R^m
    std::vector<std::size_t> phi;            // state -> latent point
    std::vector<std::vector<double>> kernel; // [z * nA + a] dense over latent points
    std::vector<double> reward;              // [z * nA + a]
};

struct LatentCertificate {
    AisCertificate certificate;                 // Kantorovich, Euclidean latent metric
    std::optional<double> lipschitz_value_bound; // L_r / (1 - gamma L_p)
};

LatentCertificate certify_latent_space(const PomdpModel& mdp, const LatentModel& latent, double L_r,
                                       double L_p);
/// Measured Lipschitz constants (L_r, L_p) of a latent model under the Euclidean metric.
std::pair<double, double> latent_lipschitz_constants(const LatentModel& latent, std::size_t n_actions);

/// (eps, delta) of an action quantizer on an MDP. metric defaults to discrete.
AisCertificate certify_action_quantizer(const PomdpModel& mdp, const std::vector<std::size_t>& subset,
                                        const std::vector<std::size_t>& q_a, IpmKind kind,
                                        const std::optional<MetricSpace>& metric = std::nullopt);
AisGenerator action_quantized_generator(const PomdpModel& mdp, const std::vector<std::size_t>& subset,
                                        const std::vector<std::size_t>& q_a);

} // namespace aisplan
