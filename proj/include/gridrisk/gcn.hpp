#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gridrisk/grid.hpp"
#include "gridrisk/linalg.hpp"
#include "gridrisk/scenario.hpp"

namespace gridrisk::gcn {

// Symmetric-normalized adjacency with self-loops: entry (u,v) is
// 1/sqrt(|N(u)|*|N(v)|) for edges and self-loops, neighbor counts including
// the node itself. Parallel branches collapse to one edge.
struct NormalizedAdjacency {
    std::size_t n = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;  // (col, weight)

    Mat dense() const;
    // Largest eigenvalue bound via power iteration (spectral radius <= 1).
    double spectral_radius_estimate(int iters = 50) const;
};

NormalizedAdjacency build_normalized_adjacency(const grid::GridTopology& g);
NormalizedAdjacency build_normalized_adjacency(std::size_t n,
                                               const std::vector<std::pair<int, int>>& edges);

// Three GCN layers (feat -> hidden -> hidden -> hidden) and an affine readout
// shared across zones, mapping a pooled zone embedding to that zone's
// per-hour QoIs.
struct ModelParams {
    std::size_t feat_dim = 0;
    std::size_t hidden = 0;
    std::size_t out_dim = 0;  // 2*T entries per zone: (generation, shed) per hour

    Mat w1, w2, w3;  // feat x hidden, hidden x hidden, hidden x hidden
    Vec b1, b2, b3;
    Mat w_read;      // out_dim x hidden
    Vec b_read;      // out_dim

    std::size_t size() const;
    Vec flatten() const;
    void unflatten(const Vec& flat);

    static ModelParams zeros(std::size_t feat_dim, std::size_t hidden, std::size_t out_dim);
    static ModelParams glorot(std::size_t feat_dim, std::size_t hidden, std::size_t out_dim,
                              std::uint64_t seed);
};

// Row-normalized zone membership (zones x buses), the mean-pool operator.
Mat zone_pool_matrix(const grid::GridTopology& g);

// Raw network output (zones x out_dim), no normalization or clamping.
Mat forward(const ModelParams& p, const NormalizedAdjacency& adj, const Mat& zone_pool,
            const Mat& features);

// MSE plus the squared bound-excess penalty, means over all output entries.
double loss(const Mat& predictions, const Mat& truth, const Mat& bound_lo, const Mat& bound_hi);

struct AdamState {
    Vec m, v;
    int step = 0;
};

void adam_step(Vec& params, const Vec& grads, AdamState& state, double lr, double beta1,
               double beta2, double eps);

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int epochs = 500;
    int batch_size = 32;
    double split_train = 0.70;
    double split_val = 0.10;
    double split_test = 0.20;
    std::uint64_t seed = 7;
    std::size_t hidden = 64;
    int patience = 50;
    int threads = 1;

    void validate() const;
};

// One training/evaluation sample: raw (un-normalized) node features, MW
// targets and per-sample QoI bounds, all zones x out_dim.
struct Dataset {
    std::size_t t_steps = 0;
    std::size_t feat_dim = 0;
    std::vector<Mat> features;   // buses x feat_dim
    std::vector<Mat> targets;    // zones x out_dim
    std::vector<Mat> bound_lo;   // zones x out_dim
    std::vector<Mat> bound_hi;   // zones x out_dim

    std::size_t size() const { return features.size(); }
};

// Node features for one scenario sample: per-hour bus load and available
// wind, static thermal capacity, incident susceptance sum, zone one-hot.
Mat build_features(const grid::GridTopology& g, const Mat& sample,
                   const scenario::WindCurve& curve);

// Assembles features/targets/bounds for every sample of a scenario set given
// the oracle QoI labels (targets laid out gen,shed per hour).
Dataset build_dataset(const grid::GridTopology& g, const scenario::ScenarioSet& scenarios,
                      const std::vector<Mat>& qoi_labels, const scenario::WindCurve& curve);

struct Normalization {
    Vec mean, stdev;
    std::vector<char> constant;  // entries whose training values never vary
};

struct Surrogate {
    std::uint64_t grid_hash = 0;
    std::size_t t_steps = 0;
    ModelParams params;
    Normalization feat_norm;    // per feature column
    Normalization target_norm;  // per flattened output entry
    std::string bounds_policy = "clamp";
    std::uint64_t seed = 0;

    // MW predictions, clamped to the per-sample bounds.
    Mat predict(const NormalizedAdjacency& adj, const Mat& zone_pool, const Mat& raw_features,
                const Mat& bound_lo, const Mat& bound_hi) const;
};

struct TrainHistory {
    std::vector<double> train_loss;  // per epoch
    std::vector<double> val_loss;
    int best_epoch = -1;
};

struct SplitIndices {
    std::vector<std::size_t> train, val, test;
};

SplitIndices split_dataset(std::size_t n, const TrainConfig& cfg);

std::pair<Surrogate, TrainHistory> train(const grid::GridTopology& g, const Dataset& data,
                                         const TrainConfig& cfg);

// Exact gradient of loss() through the network for one sample, used by the
// optimizer and checked against finite differences in the tests.
// Returns the loss; grads has the flattened parameter layout.
double forward_backward(const ModelParams& p, const NormalizedAdjacency& adj,
                        const Mat& zone_pool, const Mat& features_std, const Mat& target,
                        const Mat& bound_lo, const Mat& bound_hi,
                        const Normalization& target_norm, Vec& grads);

struct MreReport {
    Mat generation;  // (zones+1) x T, last row = system
    Mat shed;
};

// MRE with a denominator guard: mean over samples of |pred-truth|/max(|truth|, 1 MW).
MreReport evaluate_mre(const Surrogate& model, const grid::GridTopology& g, const Dataset& data,
                       const std::vector<std::size_t>& indices);

void save_checkpoint(const Surrogate& s, const std::string& path);
Surrogate load_checkpoint(const std::string& path);

}  // namespace gridrisk::gcn
