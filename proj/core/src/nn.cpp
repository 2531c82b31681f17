#include "rowswarm/nn.hpp"

#include "rowswarm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rowswarm {

Arch arch_from_string(const std::string& name) {
    if (name == "distributed") return Arch::distributed;
    if (name == "single_comm") return Arch::single_comm;
    if (name == "colour") return Arch::colour;
    throw std::invalid_argument("unknown arch '" + name + "'");
}

std::string arch_to_string(Arch arch) {
    switch (arch) {
        case Arch::distributed: return "distributed";
        case Arch::single_comm: return "single_comm";
        case Arch::colour: return "colour";
    }
    throw std::invalid_argument("unknown arch");
}

MlpParams make_mlp(Arch arch, int input_width, std::uint64_t seed) {
    if (input_width < 1)
        throw std::invalid_argument("make_mlp: input_width must be >= 1");
    MlpParams p;
    p.arch = arch;
    p.input_width = input_width;
    const int out = p.output_width();
    const int dims[4] = {input_width, hidden_width, hidden_width, out};
    auto rng = make_rng(seed);
    for (int l = 0; l < 3; ++l) {
        Layer layer;
        layer.weight = Matrix(dims[l + 1], dims[l]);
        layer.bias.assign(static_cast<std::size_t>(dims[l + 1]), 0.0);
        double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& w : layer.weight.data) w = dist(rng);
        for (double& b : layer.bias) b = dist(rng);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

void validate_params(const MlpParams& params) {
    if (params.layers.size() != 3)
        throw std::invalid_argument("MlpParams: expected exactly 3 layers");
    const int out = params.output_width();
    const int dims[4] = {params.input_width, hidden_width, hidden_width, out};
    for (int l = 0; l < 3; ++l) {
        const Layer& layer = params.layers[static_cast<std::size_t>(l)];
        if (layer.weight.rows != dims[l + 1] || layer.weight.cols != dims[l])
            throw std::invalid_argument("MlpParams: layer " + std::to_string(l + 1) +
                                        " has mismatched weight shape");
        if (static_cast<int>(layer.bias.size()) != dims[l + 1])
            throw std::invalid_argument("MlpParams: layer " + std::to_string(l + 1) +
                                        " has mismatched bias size");
        if (static_cast<std::size_t>(layer.weight.rows) * layer.weight.cols !=
            layer.weight.data.size())
            throw std::invalid_argument("MlpParams: layer " + std::to_string(l + 1) +
                                        " weight storage size mismatch");
    }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

namespace {

std::vector<double> affine(const Layer& layer, const std::vector<double>& x) {
    std::vector<double> z(layer.bias);
    for (int r = 0; r < layer.weight.rows; ++r) {
        double acc = 0.0;
        const double* wrow = layer.weight.data.data() +
                             static_cast<std::size_t>(r) * layer.weight.cols;
        for (int c = 0; c < layer.weight.cols; ++c) acc += wrow[c] * x[static_cast<std::size_t>(c)];
        z[static_cast<std::size_t>(r)] += acc;
    }
    return z;
}

// Which output channels go through a sigmoid head.
bool head_is_sigmoid(Arch arch, int channel) {
    switch (arch) {
        case Arch::distributed: return false;
        case Arch::single_comm: return channel == 1;
        case Arch::colour: return true;
    }
    return false;
}

} // namespace

ForwardTape forward(const MlpParams& params, const std::vector<double>& input,
                    ActivationMode mode) {
    validate_params(params);
    if (static_cast<int>(input.size()) != params.input_width)
        throw std::invalid_argument("forward: input width mismatch");

    ForwardTape tape;
    tape.input = input;

    auto z1 = affine(params.layers[0], input);
    tape.a1.resize(z1.size());
    for (std::size_t i = 0; i < z1.size(); ++i)
        tape.a1[i] = mode == ActivationMode::identity ? z1[i] : std::tanh(z1[i]);

    auto z2 = affine(params.layers[1], tape.a1);
    tape.a2.resize(z2.size());
    for (std::size_t i = 0; i < z2.size(); ++i)
        tape.a2[i] = mode == ActivationMode::identity ? z2[i] : std::tanh(z2[i]);

    tape.z3 = affine(params.layers[2], tape.a2);
    tape.output.resize(tape.z3.size());
    for (std::size_t i = 0; i < tape.z3.size(); ++i) {
        bool sig = mode == ActivationMode::standard &&
                   head_is_sigmoid(params.arch, static_cast<int>(i));
        tape.output[i] = sig ? sigmoid(tape.z3[i]) : tape.z3[i];
    }
    return tape;
}

void Grads::add(const Grads& other) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& dst = layers[l];
        const auto& src = other.layers[l];
        for (std::size_t i = 0; i < dst.weight.data.size(); ++i)
            dst.weight.data[i] += src.weight.data[i];
        for (std::size_t i = 0; i < dst.bias.size(); ++i) dst.bias[i] += src.bias[i];
    }
}

void Grads::scale(double s) {
    for (auto& layer : layers) {
        for (double& w : layer.weight.data) w *= s;
        for (double& b : layer.bias) b *= s;
    }
}

Grads zero_grads(const MlpParams& params) {
    Grads g;
    for (const auto& layer : params.layers) {
        Layer zl;
        zl.weight = Matrix(layer.weight.rows, layer.weight.cols);
        zl.bias.assign(layer.bias.size(), 0.0);
        g.layers.push_back(std::move(zl));
    }
    return g;
}

std::vector<double> backward(const MlpParams& params, const ForwardTape& tape,
                             const std::vector<double>& d_output, Grads& grads,
                             ActivationMode mode) {
    if (d_output.size() != tape.output.size())
        throw std::invalid_argument("backward: d_output width mismatch");

    // Head: sigmoid channels fold sigma'(z) = y(1-y) into dz3.
    std::vector<double> dz3(d_output.size());
    for (std::size_t i = 0; i < d_output.size(); ++i) {
        bool sig = mode == ActivationMode::standard &&
                   head_is_sigmoid(params.arch, static_cast<int>(i));
        double y = tape.output[i];
        dz3[i] = sig ? d_output[i] * y * (1.0 - y) : d_output[i];
    }

    auto backprop_layer = [](const Layer& layer, const std::vector<double>& x,
                             const std::vector<double>& dz, Layer& grad) {
        for (int r = 0; r < layer.weight.rows; ++r) {
            double* grow = grad.weight.data.data() +
                           static_cast<std::size_t>(r) * layer.weight.cols;
            double d = dz[static_cast<std::size_t>(r)];
            for (int c = 0; c < layer.weight.cols; ++c) grow[c] += d * x[static_cast<std::size_t>(c)];
            grad.bias[static_cast<std::size_t>(r)] += d;
        }
        std::vector<double> dx(static_cast<std::size_t>(layer.weight.cols), 0.0);
        for (int r = 0; r < layer.weight.rows; ++r) {
            const double* wrow = layer.weight.data.data() +
                                 static_cast<std::size_t>(r) * layer.weight.cols;
            double d = dz[static_cast<std::size_t>(r)];
            for (int c = 0; c < layer.weight.cols; ++c) dx[static_cast<std::size_t>(c)] += wrow[c] * d;
        }
        return dx;
    };

    auto da2 = backprop_layer(params.layers[2], tape.a2, dz3, grads.layers[2]);
    std::vector<double> dz2(da2.size());
    for (std::size_t i = 0; i < da2.size(); ++i) {
        double a = tape.a2[i];
        dz2[i] = mode == ActivationMode::identity ? da2[i] : da2[i] * (1.0 - a * a);
    }

    auto da1 = backprop_layer(params.layers[1], tape.a1, dz2, grads.layers[1]);
    std::vector<double> dz1(da1.size());
    for (std::size_t i = 0; i < da1.size(); ++i) {
        double a = tape.a1[i];
        dz1[i] = mode == ActivationMode::identity ? da1[i] : da1[i] * (1.0 - a * a);
    }

    return backprop_layer(params.layers[0], tape.input, dz1, grads.layers[0]);
}

double mse_loss(const std::vector<double>& pred, const std::vector<double>& target) {
    if (pred.size() != target.size() || pred.empty())
        throw std::invalid_argument("mse_loss: size mismatch or empty");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double d = pred[i] - target[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

namespace {
constexpr double bce_clamp = 1e-7;
}

double bce_loss(double prob, double target) {
    double p = std::clamp(prob, bce_clamp, 1.0 - bce_clamp);
    return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
}

double bce_grad(double prob, double target) {
    double p = std::clamp(prob, bce_clamp, 1.0 - bce_clamp);
    return (p - target) / (p * (1.0 - p));
}

AdamState make_adam_state(const MlpParams& params) {
    AdamState s;
    auto zeros = zero_grads(params);
    s.m = zeros.layers;
    s.v = zeros.layers;
    s.t = 0;
    return s;
}

void adam_step(MlpParams& params, const Grads& grads, AdamState& state,
               const AdamConfig& cfg) {
    if (grads.layers.size() != params.layers.size() ||
        state.m.size() != params.layers.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));

    auto update = [&](double& theta, double g, double& m, double& v) {
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
        double mh = m / bc1;
        double vh = v / bc2;
        theta -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    };

    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& layer = params.layers[l];
        const auto& glayer = grads.layers[l];
        for (std::size_t i = 0; i < layer.weight.data.size(); ++i)
            update(layer.weight.data[i], glayer.weight.data[i], state.m[l].weight.data[i],
                   state.v[l].weight.data[i]);
        for (std::size_t i = 0; i < layer.bias.size(); ++i)
            update(layer.bias[i], glayer.bias[i], state.m[l].bias[i], state.v[l].bias[i]);
    }
}

} // namespace rowswarm
