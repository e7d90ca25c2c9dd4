#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "devstyle/dataset.hpp"

namespace devstyle {

struct Hyperparams {
    int token_dim = 64;
    int path_dim = 64;
    int change_dim = 128;
    int batch_vector_dim = 32; // kept well below the developer count
    std::size_t batch_size = kDefaultBatchSize;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0;
    int epochs = 20;
    int patience = 3;
    std::uint64_t seed = 0;

    void validate() const; // throws std::invalid_argument
};

/// All learned tensors. Attention vectors are stored as n x 1 matrices so the
/// optimizer and the gradient checker can walk every tensor uniformly.
struct ModelParameters {
    Eigen::MatrixXd token_embeddings;   // |token vocab| x d_t
    Eigen::MatrixXd path_embeddings;    // |path vocab| x d_p
    Eigen::MatrixXd context_transform;  // W1: d_m x (2 d_t + d_p)
    Eigen::MatrixXd context_attention;  // a:  d_m x 1
    Eigen::MatrixXd change_transform;   // W2: d_b x d_m
    Eigen::MatrixXd change_attention;   // b:  d_b x 1
    Eigen::MatrixXd classifier;         // U:  D x d_b
    std::vector<std::int64_t> label_entities; // class index -> entity id

    int token_dim() const { return static_cast<int>(token_embeddings.cols()); }
    int path_dim() const { return static_cast<int>(path_embeddings.cols()); }
    int change_dim() const { return static_cast<int>(context_transform.rows()); }
    int batch_vector_dim() const { return static_cast<int>(change_transform.rows()); }
    int developer_count() const { return static_cast<int>(classifier.rows()); }

    struct TensorRef {
        const char* name;
        Eigen::MatrixXd* matrix;
    };
    std::vector<TensorRef> tensors();

    /// Symmetric fan-based uniform initialization, deterministic in the seed.
    static ModelParameters initialize(const Hyperparams& hp, std::int64_t token_vocab,
                                      std::int64_t path_vocab,
                                      std::vector<std::int64_t> label_entities);

    bool same_shape(const ModelParameters& other) const;
};

/// Binary checkpoint: magic + version + shape table, then row-major 64-bit
/// little-endian payloads. Round-trips bit-exactly.
void save_checkpoint(const ModelParameters& params, const std::string& path);
ModelParameters load_checkpoint(const std::string& path);

Eigen::VectorXd stable_softmax(const Eigen::VectorXd& logits);

struct ChangeForward {
    Eigen::VectorXd change_vector;   // m-tilde, in d_b
    double attention_logit = 0.0;    // l = m-tilde . b
    Eigen::VectorXd context_weights; // alpha, sums to 1
};

/// c_i = [E_tok[s_i]; E_path[p_i]; E_tok[e_i]], c~_i = tanh(W1 c_i),
/// alpha = softmax(c~ . a), m = sum alpha_i c~_i, m~ = tanh(W2 m), l = m~ . b.
ChangeForward forward_change(const EncodedChange& change, const ModelParameters& params);

struct BatchCombine {
    Eigen::VectorXd combined;
    Eigen::VectorXd weights;
};

/// Attention pooling over change vectors: weights = softmax(logits),
/// combined = sum_j weights_j vectors_j. Shared by training and by the
/// per-developer embedding extraction.
BatchCombine combine_change_vectors(const std::vector<Eigen::VectorXd>& vectors,
                                    const Eigen::VectorXd& logits);

struct BatchForward {
    Eigen::VectorXd batch_vector;            // v, in d_b
    Eigen::VectorXd change_weights;          // beta, sums to 1
    Eigen::VectorXd probabilities;           // softmax(U v), sums to 1
    std::vector<ChangeForward> changes;      // per-change traces
};

/// Requires exactly `expected_batch_size` non-empty changes.
BatchForward forward_batch(std::span<const EncodedChange> changes,
                           const ModelParameters& params, std::size_t expected_batch_size);

struct Gradients {
    Eigen::MatrixXd token_embeddings;
    Eigen::MatrixXd path_embeddings;
    Eigen::MatrixXd context_transform;
    Eigen::MatrixXd context_attention;
    Eigen::MatrixXd change_transform;
    Eigen::MatrixXd change_attention;
    Eigen::MatrixXd classifier;

    static Gradients zeros_like(const ModelParameters& params);
    std::vector<ModelParameters::TensorRef> tensors();
    void add(const Gradients& other);
};

struct LossAndGradients {
    double loss = 0.0;
    Gradients gradients;
};

/// Cross-entropy loss of one batch plus full backpropagation through both
/// attention levels, both tanh transforms and the embedding lookups.
LossAndGradients loss_and_gradients(const ChangeBatch& batch, int label_index,
                                    const ModelParameters& params);

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double val_accuracy = 0.0;
};

struct TrainResult {
    ModelParameters params; // best validation accuracy snapshot
    std::vector<EpochLog> log;
    std::vector<std::string> warnings;
};

/// Adaptive-moment training with per-epoch seeded shuffles and early stopping
/// on validation accuracy. Bit-identical across runs for identical inputs and
/// seed on one platform. Requires >= 2 developers in the training batches.
TrainResult train(const std::vector<ChangeBatch>& train_batches,
                  const std::vector<ChangeBatch>& val_batches, const Hyperparams& hp,
                  std::int64_t token_vocab, std::int64_t path_vocab);

void save_training_log_csv(const std::vector<EpochLog>& log, const std::string& path);

struct EvalResult {
    double accuracy = 0.0;
    std::size_t total = 0;
    std::size_t correct = 0;
    std::vector<std::vector<std::int64_t>> confusion; // [true][predicted]
};

EvalResult evaluate(const std::vector<ChangeBatch>& batches, const ModelParameters& params);

} // namespace devstyle
