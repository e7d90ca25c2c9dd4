#include "devstyle/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

#include "devstyle/rng.hpp"

namespace devstyle {

namespace {

constexpr char kCheckpointMagic[8] = {'D', 'S', 'T', 'Y', 'C', 'K', 'P', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

void fill_glorot(Eigen::MatrixXd& m, Rng& rng) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = rng.uniform(-limit, limit);
        }
    }
}

void check_context_bounds(const EncodedChange& change, const ModelParameters& params) {
    const auto tokens = params.token_embeddings.rows();
    const auto paths = params.path_embeddings.rows();
    for (const ContextIds& c : change.contexts) {
        if (c.start < 0 || c.start >= tokens || c.end < 0 || c.end >= tokens ||
            c.path < 0 || c.path >= paths) {
            throw std::out_of_range("encoded context id outside the embedding tables");
        }
    }
}

/// Backward through y = softmax(x): dx_i = y_i (dy_i - sum_k y_k dy_k).
Eigen::VectorXd softmax_backward(const Eigen::VectorXd& y, const Eigen::VectorXd& dy) {
    const double inner = y.dot(dy);
    return y.array() * (dy.array() - inner);
}

struct ChangeTrace {
    std::vector<Eigen::VectorXd> context_inputs;      // c_i
    std::vector<Eigen::VectorXd> transformed;         // c~_i
    Eigen::VectorXd alpha;
    Eigen::VectorXd aggregated;                       // m
    Eigen::VectorXd change_vector;                    // m~
    double logit = 0.0;
};

ChangeTrace run_change(const EncodedChange& change, const ModelParameters& params) {
    if (change.contexts.empty()) {
        throw std::invalid_argument("forward_change: change has no contexts");
    }
    check_context_bounds(change, params);

    const int dt = params.token_dim();
    const int dp = params.path_dim();
    const Eigen::VectorXd attention = params.context_attention.col(0);

    ChangeTrace trace;
    const std::size_t n = change.contexts.size();
    trace.context_inputs.reserve(n);
    trace.transformed.reserve(n);
    Eigen::VectorXd scores(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const ContextIds& ids = change.contexts[i];
        Eigen::VectorXd c(2 * dt + dp);
        c.segment(0, dt) = params.token_embeddings.row(ids.start);
        c.segment(dt, dp) = params.path_embeddings.row(ids.path);
        c.segment(dt + dp, dt) = params.token_embeddings.row(ids.end);
        Eigen::VectorXd transformed = (params.context_transform * c).array().tanh();
        scores(static_cast<Eigen::Index>(i)) = transformed.dot(attention);
        trace.context_inputs.push_back(std::move(c));
        trace.transformed.push_back(std::move(transformed));
    }
    trace.alpha = stable_softmax(scores);
    trace.aggregated = Eigen::VectorXd::Zero(params.change_dim());
    for (std::size_t i = 0; i < n; ++i) {
        trace.aggregated += trace.alpha(static_cast<Eigen::Index>(i)) * trace.transformed[i];
    }
    trace.change_vector = (params.change_transform * trace.aggregated).array().tanh();
    trace.logit = trace.change_vector.dot(params.change_attention.col(0));
    return trace;
}

double log_sum_exp(const Eigen::VectorXd& v) {
    const double m = v.maxCoeff();
    return m + std::log((v.array() - m).exp().sum());
}

} // namespace

void Hyperparams::validate() const {
    if (token_dim < 1 || path_dim < 1 || change_dim < 1 || batch_vector_dim < 1) {
        throw std::invalid_argument("all model dimensions must be >= 1");
    }
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (patience < 1) throw std::invalid_argument("patience must be >= 1");
}

std::vector<ModelParameters::TensorRef> ModelParameters::tensors() {
    return {
        {"token_embeddings", &token_embeddings},
        {"path_embeddings", &path_embeddings},
        {"context_transform", &context_transform},
        {"context_attention", &context_attention},
        {"change_transform", &change_transform},
        {"change_attention", &change_attention},
        {"classifier", &classifier},
    };
}

ModelParameters ModelParameters::initialize(const Hyperparams& hp, std::int64_t token_vocab,
                                            std::int64_t path_vocab,
                                            std::vector<std::int64_t> label_entities) {
    hp.validate();
    if (token_vocab < 2 || path_vocab < 2) {
        throw std::invalid_argument("vocabulary sizes must include the reserved ids");
    }
    const auto d = static_cast<Eigen::Index>(label_entities.size());
    ModelParameters p;
    p.token_embeddings.resize(token_vocab, hp.token_dim);
    p.path_embeddings.resize(path_vocab, hp.path_dim);
    p.context_transform.resize(hp.change_dim, 2 * hp.token_dim + hp.path_dim);
    p.context_attention.resize(hp.change_dim, 1);
    p.change_transform.resize(hp.batch_vector_dim, hp.change_dim);
    p.change_attention.resize(hp.batch_vector_dim, 1);
    p.classifier.resize(d, hp.batch_vector_dim);
    p.label_entities = std::move(label_entities);

    Rng rng(derive_seed(hp.seed, "init"));
    for (auto& ref : p.tensors()) fill_glorot(*ref.matrix, rng);
    return p;
}

bool ModelParameters::same_shape(const ModelParameters& other) const {
    auto self = const_cast<ModelParameters*>(this)->tensors();
    auto them = const_cast<ModelParameters&>(other).tensors();
    for (std::size_t i = 0; i < self.size(); ++i) {
        if (self[i].matrix->rows() != them[i].matrix->rows() ||
            self[i].matrix->cols() != them[i].matrix->cols()) {
            return false;
        }
    }
    return label_entities == other.label_entities;
}

Eigen::VectorXd stable_softmax(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - m).exp();
    return e / e.sum();
}

ChangeForward forward_change(const EncodedChange& change, const ModelParameters& params) {
    ChangeTrace trace = run_change(change, params);
    return {std::move(trace.change_vector), trace.logit, std::move(trace.alpha)};
}

BatchCombine combine_change_vectors(const std::vector<Eigen::VectorXd>& vectors,
                                    const Eigen::VectorXd& logits) {
    if (vectors.empty() || logits.size() != static_cast<Eigen::Index>(vectors.size())) {
        throw std::invalid_argument("combine_change_vectors: size mismatch");
    }
    BatchCombine out;
    out.weights = stable_softmax(logits);
    out.combined = Eigen::VectorXd::Zero(vectors.front().size());
    for (std::size_t j = 0; j < vectors.size(); ++j) {
        out.combined += out.weights(static_cast<Eigen::Index>(j)) * vectors[j];
    }
    return out;
}

BatchForward forward_batch(std::span<const EncodedChange> changes,
                           const ModelParameters& params, std::size_t expected_batch_size) {
    if (changes.size() != expected_batch_size) {
        throw std::invalid_argument("forward_batch: expected " +
                                    std::to_string(expected_batch_size) + " changes, got " +
                                    std::to_string(changes.size()));
    }
    BatchForward out;
    std::vector<Eigen::VectorXd> vectors;
    Eigen::VectorXd logits(static_cast<Eigen::Index>(changes.size()));
    for (std::size_t j = 0; j < changes.size(); ++j) {
        ChangeForward f = forward_change(changes[j], params);
        logits(static_cast<Eigen::Index>(j)) = f.attention_logit;
        vectors.push_back(f.change_vector);
        out.changes.push_back(std::move(f));
    }
    BatchCombine combined = combine_change_vectors(vectors, logits);
    out.batch_vector = std::move(combined.combined);
    out.change_weights = std::move(combined.weights);
    out.probabilities = stable_softmax(params.classifier * out.batch_vector);
    return out;
}

Gradients Gradients::zeros_like(const ModelParameters& params) {
    Gradients g;
    auto& p = const_cast<ModelParameters&>(params);
    g.token_embeddings = Eigen::MatrixXd::Zero(p.token_embeddings.rows(),
                                               p.token_embeddings.cols());
    g.path_embeddings =
        Eigen::MatrixXd::Zero(p.path_embeddings.rows(), p.path_embeddings.cols());
    g.context_transform =
        Eigen::MatrixXd::Zero(p.context_transform.rows(), p.context_transform.cols());
    g.context_attention =
        Eigen::MatrixXd::Zero(p.context_attention.rows(), p.context_attention.cols());
    g.change_transform =
        Eigen::MatrixXd::Zero(p.change_transform.rows(), p.change_transform.cols());
    g.change_attention =
        Eigen::MatrixXd::Zero(p.change_attention.rows(), p.change_attention.cols());
    g.classifier = Eigen::MatrixXd::Zero(p.classifier.rows(), p.classifier.cols());
    return g;
}

std::vector<ModelParameters::TensorRef> Gradients::tensors() {
    return {
        {"token_embeddings", &token_embeddings},
        {"path_embeddings", &path_embeddings},
        {"context_transform", &context_transform},
        {"context_attention", &context_attention},
        {"change_transform", &change_transform},
        {"change_attention", &change_attention},
        {"classifier", &classifier},
    };
}

void Gradients::add(const Gradients& other) {
    auto self = tensors();
    auto them = const_cast<Gradients&>(other).tensors();
    for (std::size_t i = 0; i < self.size(); ++i) *self[i].matrix += *them[i].matrix;
}

LossAndGradients loss_and_gradients(const ChangeBatch& batch, int label_index,
                                    const ModelParameters& params) {
    const int d_classes = params.developer_count();
    if (label_index < 0 || label_index >= d_classes) {
        throw std::invalid_argument("label index out of range");
    }
    const std::size_t n_changes = batch.changes.size();
    if (n_changes == 0) throw std::invalid_argument("empty batch");

    // Forward with full traces.
    std::vector<ChangeTrace> traces;
    traces.reserve(n_changes);
    Eigen::VectorXd logits(static_cast<Eigen::Index>(n_changes));
    for (std::size_t j = 0; j < n_changes; ++j) {
        traces.push_back(run_change(batch.changes[j], params));
        logits(static_cast<Eigen::Index>(j)) = traces[j].logit;
    }
    const Eigen::VectorXd beta = stable_softmax(logits);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(params.batch_vector_dim());
    for (std::size_t j = 0; j < n_changes; ++j) {
        v += beta(static_cast<Eigen::Index>(j)) * traces[j].change_vector;
    }
    const Eigen::VectorXd z = params.classifier * v;
    const double lse = log_sum_exp(z);
    const double loss = lse - z(label_index);
    if (!std::isfinite(loss)) {
        throw std::runtime_error("non-finite loss (offending tensor: classifier logits)");
    }

    LossAndGradients out;
    out.loss = loss;
    out.gradients = Gradients::zeros_like(params);
    Gradients& g = out.gradients;

    // d loss / d z = p - onehot(label)
    Eigen::VectorXd dz = stable_softmax(z);
    dz(label_index) -= 1.0;

    g.classifier += dz * v.transpose();
    const Eigen::VectorXd dv = params.classifier.transpose() * dz;

    // Through v = sum_j beta_j m~_j and l_j = m~_j . b.
    Eigen::VectorXd dbeta(static_cast<Eigen::Index>(n_changes));
    for (std::size_t j = 0; j < n_changes; ++j) {
        dbeta(static_cast<Eigen::Index>(j)) = dv.dot(traces[j].change_vector);
    }
    const Eigen::VectorXd dlogits = softmax_backward(beta, dbeta);

    const Eigen::VectorXd attention_a = params.context_attention.col(0);
    const Eigen::VectorXd attention_b = params.change_attention.col(0);

    for (std::size_t j = 0; j < n_changes; ++j) {
        const ChangeTrace& t = traces[j];
        const double dl = dlogits(static_cast<Eigen::Index>(j));

        Eigen::VectorXd dm_tilde = beta(static_cast<Eigen::Index>(j)) * dv;
        dm_tilde += dl * attention_b;
        g.change_attention.col(0) += dl * t.change_vector;

        // m~ = tanh(W2 m)
        const Eigen::VectorXd dg_pre =
            dm_tilde.array() * (1.0 - t.change_vector.array().square());
        g.change_transform += dg_pre * t.aggregated.transpose();
        const Eigen::VectorXd dm = params.change_transform.transpose() * dg_pre;

        // m = sum_i alpha_i c~_i, score_i = c~_i . a
        const std::size_t n_ctx = t.transformed.size();
        Eigen::VectorXd dalpha(static_cast<Eigen::Index>(n_ctx));
        for (std::size_t i = 0; i < n_ctx; ++i) {
            dalpha(static_cast<Eigen::Index>(i)) = dm.dot(t.transformed[i]);
        }
        const Eigen::VectorXd dscores = softmax_backward(t.alpha, dalpha);

        const int dt = params.token_dim();
        const int dp = params.path_dim();
        for (std::size_t i = 0; i < n_ctx; ++i) {
            const double ds = dscores(static_cast<Eigen::Index>(i));
            Eigen::VectorXd dct = t.alpha(static_cast<Eigen::Index>(i)) * dm + ds * attention_a;
            g.context_attention.col(0) += ds * t.transformed[i];

            // c~ = tanh(W1 c)
            const Eigen::VectorXd dh =
                dct.array() * (1.0 - t.transformed[i].array().square());
            g.context_transform += dh * t.context_inputs[i].transpose();
            const Eigen::VectorXd dc = params.context_transform.transpose() * dh;

            const ContextIds& ids = batch.changes[j].contexts[i];
            g.token_embeddings.row(ids.start) += dc.segment(0, dt).transpose();
            g.path_embeddings.row(ids.path) += dc.segment(dt, dp).transpose();
            g.token_embeddings.row(ids.end) += dc.segment(dt + dp, dt).transpose();
        }
    }

    return out;
}

namespace {

struct AdamState {
    Gradients m;
    Gradients v;
    std::int64_t step = 0;

    explicit AdamState(const ModelParameters& params)
        : m(Gradients::zeros_like(params)), v(Gradients::zeros_like(params)) {}

    void update(ModelParameters& params, Gradients& grads, const Hyperparams& hp) {
        ++step;
        const double bias1 = 1.0 - std::pow(hp.beta1, static_cast<double>(step));
        const double bias2 = 1.0 - std::pow(hp.beta2, static_cast<double>(step));
        auto p_refs = params.tensors();
        auto g_refs = grads.tensors();
        auto m_refs = m.tensors();
        auto v_refs = v.tensors();
        for (std::size_t i = 0; i < p_refs.size(); ++i) {
            Eigen::MatrixXd& grad = *g_refs[i].matrix;
            if (hp.weight_decay > 0.0 &&
                std::strcmp(p_refs[i].name, "token_embeddings") != 0 &&
                std::strcmp(p_refs[i].name, "path_embeddings") != 0) {
                grad += hp.weight_decay * *p_refs[i].matrix;
            }
            Eigen::MatrixXd& mm = *m_refs[i].matrix;
            Eigen::MatrixXd& vv = *v_refs[i].matrix;
            mm = hp.beta1 * mm + (1.0 - hp.beta1) * grad;
            vv = hp.beta2 * vv + (1.0 - hp.beta2) * grad.array().square().matrix();
            const Eigen::ArrayXXd m_hat = mm.array() / bias1;
            const Eigen::ArrayXXd v_hat = vv.array() / bias2;
            p_refs[i].matrix->array() -=
                hp.learning_rate * m_hat / (v_hat.sqrt() + hp.epsilon);
        }
    }
};

int label_index_of(const ModelParameters& params, std::int64_t entity) {
    const auto& labels = params.label_entities;
    const auto it = std::lower_bound(labels.begin(), labels.end(), entity);
    if (it == labels.end() || *it != entity) {
        throw std::runtime_error("entity " + std::to_string(entity) +
                                 " is not part of the model's label table");
    }
    return static_cast<int>(it - labels.begin());
}

} // namespace

TrainResult train(const std::vector<ChangeBatch>& train_batches,
                  const std::vector<ChangeBatch>& val_batches, const Hyperparams& hp,
                  std::int64_t token_vocab, std::int64_t path_vocab) {
    hp.validate();
    if (train_batches.empty()) throw std::invalid_argument("no training batches");

    std::set<std::int64_t> entity_set;
    for (const auto& b : train_batches) entity_set.insert(b.entity_id);
    std::vector<std::int64_t> labels(entity_set.begin(), entity_set.end());
    if (labels.size() < 2) {
        throw std::invalid_argument("training requires at least 2 developers, got " +
                                    std::to_string(labels.size()));
    }

    TrainResult result;
    if (hp.batch_vector_dim >= static_cast<int>(labels.size())) {
        result.warnings.push_back(
            "batch_vector_dim (" + std::to_string(hp.batch_vector_dim) +
            ") is not much less than the developer count (" +
            std::to_string(labels.size()) + "); embeddings may not be dense");
    }

    ModelParameters params =
        ModelParameters::initialize(hp, token_vocab, path_vocab, labels);
    AdamState adam(params);

    ModelParameters best = params;
    double best_accuracy = -1.0;
    int epochs_since_best = 0;

    std::vector<std::size_t> order(train_batches.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        Rng rng(derive_seed(hp.seed, "epoch", static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);

        double loss_sum = 0.0;
        for (const std::size_t idx : order) {
            const ChangeBatch& batch = train_batches[idx];
            LossAndGradients lg =
                loss_and_gradients(batch, label_index_of(params, batch.entity_id), params);
            loss_sum += lg.loss;
            adam.update(params, lg.gradients, hp);
        }
        const double train_loss = loss_sum / static_cast<double>(train_batches.size());

        double val_accuracy = 0.0;
        if (!val_batches.empty()) {
            val_accuracy = evaluate(val_batches, params).accuracy;
            if (val_accuracy > best_accuracy) {
                best_accuracy = val_accuracy;
                best = params;
                epochs_since_best = 0;
            } else {
                ++epochs_since_best;
            }
        }
        result.log.push_back({epoch, train_loss, val_accuracy});
        if (!val_batches.empty() && epochs_since_best >= hp.patience) break;
    }

    result.params = val_batches.empty() ? std::move(params) : std::move(best);
    return result;
}

void save_training_log_csv(const std::vector<EpochLog>& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write training log: " + path);
    out << "epoch,train_loss,val_accuracy\n";
    char line[128];
    for (const auto& e : log) {
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", e.epoch, e.train_loss,
                      e.val_accuracy);
        out << line;
    }
}

EvalResult evaluate(const std::vector<ChangeBatch>& batches, const ModelParameters& params) {
    const int d = params.developer_count();
    EvalResult result;
    result.confusion.assign(static_cast<std::size_t>(d),
                            std::vector<std::int64_t>(static_cast<std::size_t>(d), 0));
    for (const ChangeBatch& batch : batches) {
        const BatchForward f = forward_batch(batch.changes, params, batch.changes.size());
        Eigen::Index predicted = 0;
        f.probabilities.maxCoeff(&predicted);
        const int truth = label_index_of(params, batch.entity_id);
        ++result.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
        if (static_cast<int>(predicted) == truth) ++result.correct;
        ++result.total;
    }
    result.accuracy =
        result.total == 0 ? 0.0
                          : static_cast<double>(result.correct) / static_cast<double>(result.total);
    return result;
}

// --- checkpoint io -----------------------------------------------------------

namespace {

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
void write_pod(std::ofstream& out, T value) {
    write_bytes(out, &value, sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("truncated checkpoint");
    return value;
}

} // namespace

void save_checkpoint(const ModelParameters& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    write_bytes(out, kCheckpointMagic, sizeof(kCheckpointMagic));
    write_pod(out, kCheckpointVersion);

    auto refs = const_cast<ModelParameters&>(params).tensors();
    write_pod(out, static_cast<std::uint32_t>(refs.size() + 1)); // + label table

    for (const auto& ref : refs) {
        const std::uint32_t name_len = static_cast<std::uint32_t>(std::strlen(ref.name));
        write_pod(out, name_len);
        write_bytes(out, ref.name, name_len);
        write_pod(out, static_cast<std::uint64_t>(ref.matrix->rows()));
        write_pod(out, static_cast<std::uint64_t>(ref.matrix->cols()));
    }
    const char* label_name = "label_entities";
    const std::uint32_t label_len = static_cast<std::uint32_t>(std::strlen(label_name));
    write_pod(out, label_len);
    write_bytes(out, label_name, label_len);
    write_pod(out, static_cast<std::uint64_t>(params.label_entities.size()));
    write_pod(out, static_cast<std::uint64_t>(1));

    for (const auto& ref : refs) {
        for (Eigen::Index r = 0; r < ref.matrix->rows(); ++r) {
            for (Eigen::Index c = 0; c < ref.matrix->cols(); ++c) {
                write_pod(out, (*ref.matrix)(r, c));
            }
        }
    }
    for (const std::int64_t e : params.label_entities) {
        write_pod(out, static_cast<double>(e));
    }
    if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

ModelParameters load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
        throw std::runtime_error("not a checkpoint file: " + path);
    }
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kCheckpointVersion) {
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    }
    const auto tensor_count = read_pod<std::uint32_t>(in);

    struct Entry {
        std::string name;
        std::uint64_t rows, cols;
    };
    std::vector<Entry> entries;
    for (std::uint32_t i = 0; i < tensor_count; ++i) {
        const auto name_len = read_pod<std::uint32_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const auto rows = read_pod<std::uint64_t>(in);
        const auto cols = read_pod<std::uint64_t>(in);
        entries.push_back({std::move(name), rows, cols});
    }

    ModelParameters params;
    auto refs = params.tensors();
    for (const Entry& e : entries) {
        if (e.name == "label_entities") {
            params.label_entities.resize(e.rows);
            continue;
        }
        bool found = false;
        for (auto& ref : refs) {
            if (e.name == ref.name) {
                ref.matrix->resize(static_cast<Eigen::Index>(e.rows),
                                   static_cast<Eigen::Index>(e.cols));
                found = true;
                break;
            }
        }
        if (!found) throw std::runtime_error("unknown tensor in checkpoint: " + e.name);
    }
    for (const Entry& e : entries) {
        if (e.name == "label_entities") {
            for (std::uint64_t i = 0; i < e.rows; ++i) {
                params.label_entities[i] = static_cast<std::int64_t>(read_pod<double>(in));
            }
            continue;
        }
        for (auto& ref : refs) {
            if (e.name != ref.name) continue;
            for (std::uint64_t r = 0; r < e.rows; ++r) {
                for (std::uint64_t c = 0; c < e.cols; ++c) {
                    (*ref.matrix)(static_cast<Eigen::Index>(r),
                                  static_cast<Eigen::Index>(c)) = read_pod<double>(in);
                }
            }
            break;
        }
    }
    return params;
}

} // namespace devstyle
