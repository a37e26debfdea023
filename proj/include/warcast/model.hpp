#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "warcast/csv.hpp"
#include "warcast/features.hpp"
#include "warcast/models/forest.hpp"
#include "warcast/models/mlp.hpp"
#include "warcast/models/ridge.hpp"
#include "warcast/models/svr.hpp"
#include "warcast/random.hpp"

namespace warcast {

enum class ModelKind { ridge, mlp, forest, svr };

constexpr std::array<ModelKind, 4> all_model_kinds = {ModelKind::ridge, ModelKind::mlp,
                                                      ModelKind::forest, ModelKind::svr};

inline std::string_view to_string(ModelKind k) {
    switch (k) {
        case ModelKind::ridge: return "ridge";
        case ModelKind::mlp: return "mlp";
        case ModelKind::forest: return "forest";
        default: return "svr";
    }
}

inline ModelKind model_kind_from_string(std::string_view name) {
    for (ModelKind k : all_model_kinds)
        if (name == to_string(k)) return k;
    throw std::runtime_error("unknown model kind: " + std::string(name));
}

using Hyperparams = std::variant<RidgeHyperparams, MlpHyperparams, ForestHyperparams, SvrHyperparams>;

inline ModelKind kind_of(const Hyperparams& hyper) {
    return static_cast<ModelKind>(hyper.index());
}

struct FittedModel {
    ModelKind kind = ModelKind::ridge;
    std::uint64_t seed = 0;
    std::vector<std::string> feature_names;
    Hyperparams hyper;
    std::variant<RidgeModel, MlpModel, ForestModel, SvrModel> params;

    bool converged() const {
        if (const auto* mlp = std::get_if<MlpModel>(&params)) return mlp->converged;
        if (const auto* svr = std::get_if<SvrModel>(&params)) return svr->converged;
        return true;
    }

    double predict_row(std::span<const double> x) const {
        return std::visit([&](const auto& model) { return model.predict_row(x); }, params);
    }
};

// Fits the regressor selected by the hyperparameter variant. The stream
// seeds stochastic pieces (MLP init, bootstrap); closed-form and SMO fits
// ignore it.
inline FittedModel fit_model(const std::vector<std::vector<double>>& X,
                             const std::vector<double>& y,
                             const std::vector<std::string>& feature_names,
                             const Hyperparams& hyper, RandomStream rng,
                             std::uint64_t seed = 0) {
    FittedModel fitted;
    fitted.kind = kind_of(hyper);
    fitted.seed = seed;
    fitted.feature_names = feature_names;
    fitted.hyper = hyper;
    switch (fitted.kind) {
        case ModelKind::ridge:
            fitted.params = fit_ridge(X, y, std::get<RidgeHyperparams>(hyper));
            break;
        case ModelKind::mlp:
            fitted.params = fit_mlp(X, y, std::get<MlpHyperparams>(hyper), rng.fork("mlp"));
            break;
        case ModelKind::forest:
            fitted.params = fit_bagging(X, y, std::get<ForestHyperparams>(hyper), rng.fork("forest"));
            break;
        case ModelKind::svr:
            fitted.params = fit_svr(X, y, std::get<SvrHyperparams>(hyper));
            break;
    }
    return fitted;
}

inline FittedModel fit_model(const FeatureMatrix& X, const std::vector<double>& y,
                             const Hyperparams& hyper, RandomStream rng, std::uint64_t seed = 0) {
    return fit_model(X.rows, y, X.feature_names, hyper, rng, seed);
}

inline std::vector<double> predict(const FittedModel& model, const FeatureMatrix& X) {
    if (X.feature_names != model.feature_names)
        throw std::runtime_error("feature names do not match the fitted model");
    std::vector<double> out;
    out.reserve(X.rows.size());
    for (const auto& row : X.rows) out.push_back(model.predict_row(row));
    return out;
}

// ---------------------------------------------------------------------------
// Versioned text serialization ("warcast-model v1"); numbers are written
// with round-trip precision so a reloaded model predicts identically.

namespace detail {

inline void write_doubles(std::ostream& out, const std::vector<double>& values) {
    for (double v : values) out << ' ' << format_exact(v);
}

class ModelReader {
public:
    explicit ModelReader(std::istream& in) : in_(in) {}

    std::string word() {
        std::string w;
        if (!(in_ >> w)) throw std::runtime_error("model file truncated");
        return w;
    }
    void expect(std::string_view keyword) {
        const std::string w = word();
        if (w != keyword)
            throw std::runtime_error("model file: expected '" + std::string(keyword) + "', got '" +
                                     w + "'");
    }
    long long integer() {
        long long v;
        if (!(in_ >> v)) throw std::runtime_error("model file: expected an integer");
        return v;
    }
    double real() {
        double v;
        if (!(in_ >> v)) throw std::runtime_error("model file: expected a number");
        return v;
    }

private:
    std::istream& in_;
};

}  // namespace detail

inline void save_model(const FittedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << "warcast-model v1\n";
    out << "kind " << to_string(model.kind) << '\n';
    out << "seed " << model.seed << '\n';
    out << "converged " << (model.converged() ? 1 : 0) << '\n';
    out << "features " << model.feature_names.size() << '\n';
    for (const auto& name : model.feature_names) out << "f " << name << '\n';

    switch (model.kind) {
        case ModelKind::ridge: {
            const auto& h = std::get<RidgeHyperparams>(model.hyper);
            out << "hyper lambda " << format_exact(h.lambda) << '\n';
            const auto& p = std::get<RidgeModel>(model.params);
            out << "intercept " << format_exact(p.intercept) << '\n';
            out << "coef " << p.coefficients.size();
            detail::write_doubles(out, p.coefficients);
            out << '\n';
            break;
        }
        case ModelKind::mlp: {
            const auto& h = std::get<MlpHyperparams>(model.hyper);
            out << "hyper alpha " << format_exact(h.alpha) << " layer1 " << h.layer1 << " layer2 "
                << h.layer2 << '\n';
            const auto& p = std::get<MlpModel>(model.params);
            out << "layers " << p.layer_sizes.size();
            for (int s : p.layer_sizes) out << ' ' << s;
            out << '\n';
            out << "params " << p.parameters.size();
            detail::write_doubles(out, p.parameters);
            out << '\n';
            break;
        }
        case ModelKind::forest: {
            const auto& h = std::get<ForestHyperparams>(model.hyper);
            out << "hyper trees " << h.n_trees << " depth " << h.max_depth << " min_split "
                << h.min_split << " bootstrap " << (h.bootstrap ? 1 : 0) << '\n';
            const auto& p = std::get<ForestModel>(model.params);
            out << "trees " << p.trees.size() << '\n';
            for (const auto& tree : p.trees) {
                out << "tree " << tree.nodes.size() << '\n';
                for (const auto& node : tree.nodes)
                    out << "node " << node.feature << ' ' << format_exact(node.threshold) << ' '
                        << format_exact(node.value) << ' ' << node.left << ' ' << node.right
                        << '\n';
            }
            break;
        }
        case ModelKind::svr: {
            const auto& h = std::get<SvrHyperparams>(model.hyper);
            out << "hyper epsilon " << format_exact(h.epsilon) << " cost " << format_exact(h.cost)
                << " gamma " << format_exact(h.gamma) << '\n';
            const auto& p = std::get<SvrModel>(model.params);
            out << "bias " << format_exact(p.bias) << '\n';
            out << "support " << p.support_vectors.size() << ' '
                << (p.support_vectors.empty() ? 0 : p.support_vectors[0].size()) << '\n';
            for (std::size_t s = 0; s < p.support_vectors.size(); ++s) {
                out << "sv " << format_exact(p.dual_coefs[s]);
                detail::write_doubles(out, p.support_vectors[s]);
                out << '\n';
            }
            break;
        }
    }
    out << "end\n";
}

inline FittedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    detail::ModelReader reader(in);
    reader.expect("warcast-model");
    reader.expect("v1");

    FittedModel model;
    reader.expect("kind");
    model.kind = model_kind_from_string(reader.word());
    reader.expect("seed");
    model.seed = static_cast<std::uint64_t>(reader.integer());
    reader.expect("converged");
    const bool converged = reader.integer() != 0;
    reader.expect("features");
    const auto n_features = static_cast<std::size_t>(reader.integer());
    for (std::size_t i = 0; i < n_features; ++i) {
        reader.expect("f");
        model.feature_names.push_back(reader.word());
    }

    reader.expect("hyper");
    switch (model.kind) {
        case ModelKind::ridge: {
            RidgeHyperparams h;
            reader.expect("lambda");
            h.lambda = reader.real();
            model.hyper = h;
            reader.expect("intercept");
            RidgeModel p;
            p.intercept = reader.real();
            reader.expect("coef");
            const auto n = static_cast<std::size_t>(reader.integer());
            p.coefficients.resize(n);
            for (auto& c : p.coefficients) c = reader.real();
            model.params = std::move(p);
            break;
        }
        case ModelKind::mlp: {
            MlpHyperparams h;
            reader.expect("alpha");
            h.alpha = reader.real();
            reader.expect("layer1");
            h.layer1 = static_cast<int>(reader.integer());
            reader.expect("layer2");
            h.layer2 = static_cast<int>(reader.integer());
            model.hyper = h;
            MlpModel p;
            reader.expect("layers");
            const auto n_layers = static_cast<std::size_t>(reader.integer());
            p.layer_sizes.resize(n_layers);
            for (auto& s : p.layer_sizes) s = static_cast<int>(reader.integer());
            reader.expect("params");
            const auto n_params = static_cast<std::size_t>(reader.integer());
            if (n_params != MlpModel::parameter_count(p.layer_sizes))
                throw std::runtime_error("model file: parameter count does not match layers");
            p.parameters.resize(n_params);
            for (auto& v : p.parameters) v = reader.real();
            p.converged = converged;
            model.params = std::move(p);
            break;
        }
        case ModelKind::forest: {
            ForestHyperparams h;
            reader.expect("trees");
            h.n_trees = static_cast<int>(reader.integer());
            reader.expect("depth");
            h.max_depth = static_cast<int>(reader.integer());
            reader.expect("min_split");
            h.min_split = static_cast<int>(reader.integer());
            reader.expect("bootstrap");
            h.bootstrap = reader.integer() != 0;
            model.hyper = h;
            ForestModel p;
            reader.expect("trees");
            const auto n_trees = static_cast<std::size_t>(reader.integer());
            p.trees.resize(n_trees);
            for (auto& tree : p.trees) {
                reader.expect("tree");
                const auto n_nodes = static_cast<std::size_t>(reader.integer());
                tree.nodes.resize(n_nodes);
                for (auto& node : tree.nodes) {
                    reader.expect("node");
                    node.feature = static_cast<int>(reader.integer());
                    node.threshold = reader.real();
                    node.value = reader.real();
                    node.left = static_cast<int>(reader.integer());
                    node.right = static_cast<int>(reader.integer());
                }
            }
            model.params = std::move(p);
            break;
        }
        case ModelKind::svr: {
            SvrHyperparams h;
            reader.expect("epsilon");
            h.epsilon = reader.real();
            reader.expect("cost");
            h.cost = reader.real();
            reader.expect("gamma");
            h.gamma = reader.real();
            model.hyper = h;
            SvrModel p;
            p.gamma = h.gamma;
            reader.expect("bias");
            p.bias = reader.real();
            reader.expect("support");
            const auto n_support = static_cast<std::size_t>(reader.integer());
            const auto dim = static_cast<std::size_t>(reader.integer());
            for (std::size_t s = 0; s < n_support; ++s) {
                reader.expect("sv");
                p.dual_coefs.push_back(reader.real());
                std::vector<double> x(dim);
                for (auto& v : x) v = reader.real();
                p.support_vectors.push_back(std::move(x));
            }
            p.converged = converged;
            model.params = std::move(p);
            break;
        }
    }
    reader.expect("end");
    return model;
}

}  // namespace warcast
