#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rowswarm {

// Dense row-major matrix, sized once at construction.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data; // rows * cols, row-major

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// The three controller heads share one body: three dense layers with a
// hidden width of 10 and tanh after the first two.
//   distributed: sensing -> 1 output  (wheel speed; linear head)
//   single_comm: sensing + 2 received messages -> 2 outputs
//                (speed: linear; outgoing message: sigmoid)
//   colour:      2 received messages -> 2 outputs (both sigmoid:
//                membership probability and outgoing message)
enum class Arch { distributed, single_comm, colour };

Arch arch_from_string(const std::string& name);
std::string arch_to_string(Arch arch);

inline constexpr int hidden_width = 10;

struct Layer {
    Matrix weight;             // out x in
    std::vector<double> bias;  // out
};

struct MlpParams {
    Arch arch = Arch::distributed;
    int input_width = 0;       // columns of the first layer
    std::vector<Layer> layers; // exactly three

    int output_width() const { return arch == Arch::distributed ? 1 : 2; }
};

// Fresh parameters with weights and biases drawn from
// Uniform[-1/sqrt(fan_in), +1/sqrt(fan_in)], layer by layer.
MlpParams make_mlp(Arch arch, int input_width, std::uint64_t seed);

// Structural check: three layers, widths chaining
// input_width -> 10 -> 10 -> output_width. Throws on violation.
void validate_params(const MlpParams& params);

double sigmoid(double z);

// Test hook: `identity` replaces every nonlinearity (tanh and the
// sigmoid heads) with the identity map, turning the net into a linear
// chain with a closed-form gradient.
enum class ActivationMode { standard, identity };

// Intermediate values of one forward pass, kept for backprop.
struct ForwardTape {
    std::vector<double> input;
    std::vector<double> a1, a2;   // post-tanh activations
    std::vector<double> z3;       // pre-head outputs
    std::vector<double> output;   // post-head outputs
};

ForwardTape forward(const MlpParams& params, const std::vector<double>& input,
                    ActivationMode mode = ActivationMode::standard);

// Parameter gradients, same shapes as MlpParams.layers.
struct Grads {
    std::vector<Layer> layers;

    void add(const Grads& other);   // elementwise accumulate
    void scale(double s);
};

Grads zero_grads(const MlpParams& params);

// Backpropagate dL/d(output) through the tape. Accumulates parameter
// gradients into `grads` and returns dL/d(input).
std::vector<double> backward(const MlpParams& params, const ForwardTape& tape,
                             const std::vector<double>& d_output, Grads& grads,
                             ActivationMode mode = ActivationMode::standard);

// Mean losses over vector components, with derivative helpers.
double mse_loss(const std::vector<double>& pred, const std::vector<double>& target);
// Binary cross-entropy; probabilities are clamped to
// [1e-7, 1 - 1e-7] before the logs.
double bce_loss(double prob, double target);
double bce_grad(double prob, double target); // d bce / d prob

// Adam with bias correction.
struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<Layer> m; // first moments, shaped like the parameters
    std::vector<Layer> v; // second moments
    long t = 0;           // completed steps
};

AdamState make_adam_state(const MlpParams& params);
void adam_step(MlpParams& params, const Grads& grads, AdamState& state,
               const AdamConfig& cfg);

} // namespace rowswarm
