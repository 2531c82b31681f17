#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rowswarm/commnet.hpp"
#include "rowswarm/nn.hpp"
#include "rowswarm/rng.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

using namespace rowswarm;

namespace {

// Exercise every parameter of `params` with central differences of the
// scalar loss and compare against `analytic` (same shapes). Returns the
// worst relative error.
template <typename LossFn>
double max_grad_rel_error(MlpParams& params, const Grads& analytic, LossFn loss,
                          double h = 1e-5) {
    double worst = 0.0;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto probe = [&](double& slot, double grad) {
            double keep = slot;
            slot = keep + h;
            double up = loss(params);
            slot = keep - h;
            double down = loss(params);
            slot = keep;
            double numeric = (up - down) / (2.0 * h);
            double rel = std::fabs(grad - numeric) /
                         (std::fabs(grad) + std::fabs(numeric) + 1e-8);
            worst = std::max(worst, rel);
        };
        for (std::size_t k = 0; k < params.layers[l].weight.data.size(); ++k)
            probe(params.layers[l].weight.data[k], analytic.layers[l].weight.data[k]);
        for (std::size_t k = 0; k < params.layers[l].bias.size(); ++k)
            probe(params.layers[l].bias[k], analytic.layers[l].bias[k]);
    }
    return worst;
}

std::vector<double> random_vec(std::mt19937_64& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = dist(rng);
    return v;
}

// A window whose sensing is 1-wide so board wiring is easy to read.
SequenceSample tiny_window(int n_agents, int n_slots) {
    SequenceSample s;
    s.n_agents = n_agents;
    s.n_slots = n_slots;
    s.mask.assign(static_cast<std::size_t>(n_slots), false);
    for (int i = 1; i + 1 < n_agents; ++i) s.mask[static_cast<std::size_t>(i)] = true;
    for (int t = 0; t < seq_len; ++t) {
        s.sensing[t].assign(static_cast<std::size_t>(n_slots),
                            std::vector<double>(1, 0.0));
        s.targets[t].assign(static_cast<std::size_t>(n_slots), 0.0);
        for (int i = 0; i < n_agents; ++i)
            s.sensing[t][static_cast<std::size_t>(i)][0] = 0.1 * (i + 1) + 0.01 * t;
    }
    return s;
}

} // namespace

TEST_CASE("fresh parameters have the documented shapes and init range") {
    MlpParams d = make_mlp(Arch::distributed, 7, 1);
    REQUIRE(d.layers.size() == 3);
    CHECK(d.layers[0].weight.rows == 10);
    CHECK(d.layers[0].weight.cols == 7);
    CHECK(d.layers[1].weight.rows == 10);
    CHECK(d.layers[1].weight.cols == 10);
    CHECK(d.layers[2].weight.rows == 1);
    CHECK(d.layers[2].weight.cols == 10);
    CHECK(d.output_width() == 1);
    CHECK_NOTHROW(validate_params(d));

    MlpParams c = make_mlp(Arch::single_comm, 16, 1);
    CHECK(c.layers[0].weight.cols == 16);
    CHECK(c.layers[2].weight.rows == 2);
    MlpParams col = make_mlp(Arch::colour, 2, 1);
    CHECK(col.layers[0].weight.cols == 2);
    CHECK(col.layers[2].weight.rows == 2);

    // Uniform[-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer, biases too.
    double bounds[3] = {1.0 / std::sqrt(7.0), 1.0 / std::sqrt(10.0),
                        1.0 / std::sqrt(10.0)};
    for (int l = 0; l < 3; ++l) {
        double lo = 1e9, hi = -1e9;
        for (double v : d.layers[l].weight.data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (double v : d.layers[l].bias) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(lo >= -bounds[l]);
        CHECK(hi <= bounds[l]);
        CHECK(lo < -0.3 * bounds[l]); // actually spread out
        CHECK(hi > 0.3 * bounds[l]);
    }

    MlpParams again = make_mlp(Arch::distributed, 7, 1);
    CHECK(again.layers[0].weight.data == d.layers[0].weight.data);
    MlpParams other = make_mlp(Arch::distributed, 7, 2);
    CHECK(other.layers[0].weight.data != d.layers[0].weight.data);

    MlpParams broken = d;
    broken.layers[1].weight = Matrix(9, 10);
    CHECK_THROWS_AS(validate_params(broken), std::invalid_argument);
    broken = d;
    broken.layers.pop_back();
    CHECK_THROWS_AS(validate_params(broken), std::invalid_argument);
}

TEST_CASE("arch names round trip") {
    CHECK(arch_from_string("distributed") == Arch::distributed);
    CHECK(arch_from_string("single_comm") == Arch::single_comm);
    CHECK(arch_from_string("colour") == Arch::colour);
    CHECK(arch_to_string(Arch::single_comm) == "single_comm");
    CHECK_THROWS_AS(arch_from_string("mlp"), std::invalid_argument);
}

TEST_CASE("forward matches hand-built activation chains") {
    CHECK(std::tanh(1.0) == doctest::Approx(0.7615941559557649).epsilon(1e-12));
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));

    // Pass-through wiring: first input unit through one tanh, then
    // another, then the linear head.
    MlpParams p = make_mlp(Arch::distributed, 1, 3);
    for (auto& layer : p.layers) {
        std::fill(layer.weight.data.begin(), layer.weight.data.end(), 0.0);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
    p.layers[0].weight.at(0, 0) = 1.0;
    p.layers[1].weight.at(0, 0) = 1.0;
    p.layers[2].weight.at(0, 0) = 1.0;

    ForwardTape tape = forward(p, {0.5});
    // volatile keeps the oracle on the runtime libm path, matching the
    // implementation bit for bit instead of the compiler's folded value.
    volatile double half = 0.5;
    CHECK(tape.output[0] == std::tanh(std::tanh(half)));
    CHECK(tape.output[0] == doctest::Approx(0.4318081806).epsilon(1e-9));
    CHECK(tape.a1[0] == std::tanh(half));
    CHECK(tape.a1[1] == 0.0);
    CHECK(tape.z3[0] == tape.output[0]); // linear head stores what it emits

    // Sigmoid heads: message channel only for single_comm, both for colour.
    MlpParams sc = make_mlp(Arch::single_comm, 3, 4);
    ForwardTape st = forward(sc, {0.2, -0.1, 0.4});
    CHECK(st.output[0] == st.z3[0]);
    CHECK(st.output[1] == doctest::Approx(sigmoid(st.z3[1])));
    CHECK(st.output[1] > 0.0);
    CHECK(st.output[1] < 1.0);

    MlpParams col = make_mlp(Arch::colour, 2, 5);
    ForwardTape ct = forward(col, {0.3, 0.7});
    CHECK(ct.output[0] == doctest::Approx(sigmoid(ct.z3[0])));
    CHECK(ct.output[1] == doctest::Approx(sigmoid(ct.z3[1])));

    CHECK_THROWS_AS(forward(p, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("loss oracles") {
    CHECK(mse_loss({0.0, 2.0}, {0.0, 0.0}) == doctest::Approx(2.0));
    CHECK(mse_loss({1.0}, {1.0}) == 0.0);
    CHECK(mse_loss({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}) == doctest::Approx(5.0 / 3.0));
    CHECK_THROWS_AS(mse_loss({1.0}, {1.0, 2.0}), std::invalid_argument);

    CHECK(bce_loss(0.5, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(bce_loss(0.5, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(bce_loss(0.9, 1.0) == doctest::Approx(-std::log(0.9)));
    // The clamp keeps saturated probabilities finite.
    CHECK(bce_loss(0.0, 1.0) == doctest::Approx(-std::log(1e-7)));
    CHECK(bce_loss(1.0, 0.0) == doctest::Approx(-std::log(1e-7)));

    // bce_grad matches central differences away from the clamp.
    for (double p : {0.2, 0.5, 0.8}) {
        for (double t : {0.0, 1.0}) {
            double h = 1e-6;
            double numeric = (bce_loss(p + h, t) - bce_loss(p - h, t)) / (2.0 * h);
            CHECK(bce_grad(p, t) == doctest::Approx(numeric).epsilon(1e-6));
        }
    }
}

TEST_CASE("analytic gradients match finite differences for every arch") {
    std::mt19937_64 rng = make_rng(2024);
    struct Case {
        Arch arch;
        int width;
    };
    for (Case c : {Case{Arch::distributed, 7}, Case{Arch::single_comm, 16},
                   Case{Arch::colour, 2}}) {
        for (int rep = 0; rep < 10; ++rep) {
            MlpParams params =
                make_mlp(c.arch, c.width, rng());
            std::vector<double> input = random_vec(rng, c.width, -1.0, 1.0);
            std::vector<double> weights =
                random_vec(rng, params.output_width(), -1.0, 1.0);

            auto loss = [&](const MlpParams& p) {
                ForwardTape t = forward(p, input);
                double acc = 0.0;
                for (std::size_t k = 0; k < t.output.size(); ++k)
                    acc += weights[k] * t.output[k];
                return acc;
            };

            ForwardTape tape = forward(params, input);
            Grads grads = zero_grads(params);
            std::vector<double> d_input = backward(params, tape, weights, grads);

            CHECK(max_grad_rel_error(params, grads, loss) < 1e-4);

            // Input gradient against the same differences.
            for (std::size_t k = 0; k < input.size(); ++k) {
                double h = 1e-5, keep = input[k];
                input[k] = keep + h;
                double up = loss(params);
                input[k] = keep - h;
                double down = loss(params);
                input[k] = keep;
                double numeric = (up - down) / (2.0 * h);
                double rel = std::fabs(d_input[k] - numeric) /
                             (std::fabs(d_input[k]) + std::fabs(numeric) + 1e-8);
                CHECK(rel < 1e-4);
            }
        }
    }
}

TEST_CASE("identity mode turns the net into its closed-form linear chain") {
    MlpParams p = make_mlp(Arch::distributed, 4, 9);
    std::vector<double> x = {0.3, -0.2, 0.5, 0.1};

    ForwardTape tape = forward(p, x, ActivationMode::identity);
    // y = W3 (W2 (W1 x + b1) + b2) + b3, computed independently.
    auto apply = [](const Layer& layer, const std::vector<double>& in) {
        std::vector<double> out(static_cast<std::size_t>(layer.weight.rows));
        for (int r = 0; r < layer.weight.rows; ++r) {
            double acc = layer.bias[static_cast<std::size_t>(r)];
            for (int c = 0; c < layer.weight.cols; ++c)
                acc += layer.weight.at(r, c) * in[static_cast<std::size_t>(c)];
            out[static_cast<std::size_t>(r)] = acc;
        }
        return out;
    };
    auto expected = apply(p.layers[2], apply(p.layers[1], apply(p.layers[0], x)));
    CHECK(tape.output[0] == doctest::Approx(expected[0]).epsilon(1e-12));

    // d output / d W1[r][c] = (W3 W2)[0][r] * x[c], exactly.
    Grads grads = zero_grads(p);
    backward(p, tape, {1.0}, grads, ActivationMode::identity);
    for (int r = 0; r < 10; ++r) {
        double w3w2 = 0.0;
        for (int k = 0; k < 10; ++k)
            w3w2 += p.layers[2].weight.at(0, k) * p.layers[1].weight.at(k, r);
        for (int c = 0; c < 4; ++c)
            CHECK(grads.layers[0].weight.at(r, c) ==
                  doctest::Approx(w3w2 * x[static_cast<std::size_t>(c)]).epsilon(1e-12));
        CHECK(grads.layers[0].bias[static_cast<std::size_t>(r)] ==
              doctest::Approx(w3w2).epsilon(1e-12));
    }
}

TEST_CASE("adam takes a signed step and minimizes a quadratic") {
    MlpParams p = make_mlp(Arch::distributed, 1, 12);
    AdamState state = make_adam_state(p);
    AdamConfig cfg;
    cfg.lr = 0.01;

    double theta0 = p.layers[0].weight.at(0, 0);
    Grads g = zero_grads(p);
    g.layers[0].weight.at(0, 0) = 0.37; // positive gradient
    adam_step(p, g, state, cfg);
    // First step: m_hat = g, v_hat = g^2, so the move is ~ -lr * sign(g).
    CHECK(p.layers[0].weight.at(0, 0) ==
          doctest::Approx(theta0 - cfg.lr).epsilon(1e-4));
    // Untouched parameters stay put under a zero gradient.
    CHECK(p.layers[0].weight.at(1, 0) == make_mlp(Arch::distributed, 1, 12).layers[0].weight.at(1, 0));
    CHECK(state.t == 1);

    // Minimize (theta - 3)^2 through the same update rule. The
    // momentum orbit takes ~1500 steps to damp out at this rate.
    MlpParams q = make_mlp(Arch::distributed, 1, 13);
    AdamState qs = make_adam_state(q);
    for (int step = 0; step < 2000; ++step) {
        double theta = q.layers[0].weight.at(0, 0);
        Grads grad = zero_grads(q);
        grad.layers[0].weight.at(0, 0) = 2.0 * (theta - 3.0);
        adam_step(q, grad, qs, cfg);
    }
    CHECK(std::fabs(q.layers[0].weight.at(0, 0) - 3.0) < 0.05);
}

TEST_CASE("window unroll wires the shared message board as documented") {
    MlpParams p = make_mlp(Arch::single_comm, 3, 21); // 1 sensing + 2 messages
    SequenceSample s = tiny_window(3, 3);
    std::vector<double> board = {0.0, 0.11, 0.22, 0.33, 0.0};

    UnrollResult r = commnet_unroll(p, s, board);
    // Step 0: agent i reads (sensing_i, board[i], board[i+2]).
    for (int i = 0; i < 3; ++i) {
        const auto& in = r.tapes[0][static_cast<std::size_t>(i)].input;
        REQUIRE(in.size() == 3);
        CHECK(in[0] == s.sensing[0][static_cast<std::size_t>(i)][0]);
        CHECK(in[1] == board[static_cast<std::size_t>(i)]);
        CHECK(in[2] == board[static_cast<std::size_t>(i) + 2]);
    }
    // Step 1 reads the fresh board [0, msg_0, msg_1, msg_2, 0].
    for (int i = 0; i < 3; ++i) {
        const auto& in = r.tapes[1][static_cast<std::size_t>(i)].input;
        double left = i == 0 ? 0.0 : r.message[0][static_cast<std::size_t>(i - 1)];
        double right = i == 2 ? 0.0 : r.message[0][static_cast<std::size_t>(i + 1)];
        CHECK(in[1] == left);
        CHECK(in[2] == right);
    }
    // The severed variant reads zeros at step 1.
    UnrollOptions severed;
    severed.carry_messages = false;
    UnrollResult rs = commnet_unroll(p, s, board, severed);
    for (int i = 0; i < 3; ++i) {
        CHECK(rs.tapes[1][static_cast<std::size_t>(i)].input[1] == 0.0);
        CHECK(rs.tapes[1][static_cast<std::size_t>(i)].input[2] == 0.0);
    }
    // Step-0 outputs agree with a direct forward pass.
    ForwardTape direct = forward(p, {s.sensing[0][1][0], board[1], board[3]});
    CHECK(r.primary[0][1] == direct.output[0]);
    CHECK(r.message[0][1] == direct.output[1]);

    CHECK_THROWS_AS(commnet_unroll(make_mlp(Arch::distributed, 1, 1), s, board),
                    std::invalid_argument);
}

TEST_CASE("padding slots stay silent on the shared board") {
    MlpParams p = make_mlp(Arch::single_comm, 3, 22);
    SequenceSample s = tiny_window(4, 6); // two padding slots
    std::mt19937_64 rng = make_rng(5);
    std::vector<double> board = make_init_comm(6, rng);
    CHECK(board.size() == 8);
    CHECK(board.front() == 0.0);
    CHECK(board.back() == 0.0);
    for (std::size_t i = 1; i + 1 < board.size(); ++i) {
        CHECK(board[i] >= 0.0);
        CHECK(board[i] < 1.0);
    }

    UnrollResult r = commnet_unroll(p, s, board);
    // Next-step board: sentinels plus padding slots are zero.
    for (int i = 0; i < 6; ++i) {
        double slot = r.comm[1][static_cast<std::size_t>(i) + 1];
        if (i < 4)
            CHECK(slot == r.message[0][static_cast<std::size_t>(i)]);
        else
            CHECK(slot == 0.0);
    }
    CHECK(zero_init_comm(6) == std::vector<double>(8, 0.0));
}

TEST_CASE("padded and unpadded windows produce identical results") {
    MlpParams p = make_mlp(Arch::single_comm, 3, 23);
    SequenceSample plain = tiny_window(4, 4);
    SequenceSample padded = tiny_window(4, 4);
    padded.n_slots = 7;
    for (int t = 0; t < seq_len; ++t) {
        padded.sensing[t].resize(7, std::vector<double>(1, 0.0));
        padded.targets[t].resize(7, 0.0);
    }
    padded.mask.resize(7, false);

    std::vector<double> board_plain = {0.0, 0.4, 0.3, 0.2, 0.1, 0.0};
    std::vector<double> board_padded = {0.0, 0.4, 0.3, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0};

    UnrollResult a = commnet_unroll(p, plain, board_plain);
    UnrollResult b = commnet_unroll(p, padded, board_padded);
    for (int t = 0; t < seq_len; ++t)
        for (int i = 0; i < 4; ++i) {
            CHECK(a.primary[t][static_cast<std::size_t>(i)] ==
                  b.primary[t][static_cast<std::size_t>(i)]);
            CHECK(a.message[t][static_cast<std::size_t>(i)] ==
                  b.message[t][static_cast<std::size_t>(i)]);
        }

    std::array<std::vector<double>, seq_len> da, db;
    for (int t = 0; t < seq_len; ++t) {
        da[t].assign(4, 0.0);
        db[t].assign(7, 0.0);
        for (int i = 1; i < 3; ++i) {
            da[t][static_cast<std::size_t>(i)] = 0.5 + t + i;
            db[t][static_cast<std::size_t>(i)] = 0.5 + t + i;
        }
    }
    Grads ga = zero_grads(p), gb = zero_grads(p);
    commnet_backward(p, plain, a, da, ga);
    commnet_backward(p, padded, b, db, gb);
    for (int l = 0; l < 3; ++l) {
        CHECK(ga.layers[l].weight.data == gb.layers[l].weight.data);
        CHECK(ga.layers[l].bias == gb.layers[l].bias);
    }
}

TEST_CASE("unrolled gradients match finite differences, message path included") {
    std::mt19937_64 rng = make_rng(77);
    for (int rep = 0; rep < 5; ++rep) {
        int n = 4;
        MlpParams params = make_mlp(rep % 2 == 0 ? Arch::single_comm : Arch::colour,
                                    rep % 2 == 0 ? 16 : 2, rng());
        int sensing_width = params.input_width - 2;
        SequenceSample s;
        s.n_agents = n;
        s.n_slots = n;
        s.mask.assign(static_cast<std::size_t>(n), false);
        for (int i = 1; i + 1 < n; ++i) s.mask[static_cast<std::size_t>(i)] = true;
        for (int t = 0; t < seq_len; ++t) {
            s.sensing[t].clear();
            for (int i = 0; i < n; ++i)
                s.sensing[t].push_back(random_vec(rng, sensing_width, 0.0, 1.0));
            s.targets[t].assign(static_cast<std::size_t>(n), 0.0);
        }
        std::vector<double> board = make_init_comm(n, rng);
        std::array<std::vector<double>, seq_len> weights;
        for (int t = 0; t < seq_len; ++t) {
            weights[t].assign(static_cast<std::size_t>(n), 0.0);
            for (int i = 1; i + 1 < n; ++i)
                weights[t][static_cast<std::size_t>(i)] =
                    std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
        }

        auto loss = [&](const MlpParams& p) {
            UnrollResult r = commnet_unroll(p, s, board);
            double acc = 0.0;
            for (int t = 0; t < seq_len; ++t)
                for (int i = 0; i < n; ++i)
                    acc += weights[t][static_cast<std::size_t>(i)] *
                           r.primary[t][static_cast<std::size_t>(i)];
            return acc;
        };

        UnrollResult rolled = commnet_unroll(params, s, board);
        Grads grads = zero_grads(params);
        commnet_backward(params, s, rolled, weights, grads);
        CHECK(max_grad_rel_error(params, grads, loss) < 1e-4);
    }
}

TEST_CASE("severing the channel kills the step-0 message gradient") {
    std::mt19937_64 rng = make_rng(88);
    MlpParams params = make_mlp(Arch::single_comm, 3, 31);
    SequenceSample s = tiny_window(4, 4);
    std::vector<double> board = make_init_comm(4, rng);

    // Loss touches only step-1 primaries, so any influence of the
    // message head must flow through the carried board.
    std::array<std::vector<double>, seq_len> d_primary;
    d_primary[0].assign(4, 0.0);
    d_primary[1].assign(4, 0.0);
    d_primary[1][1] = 1.0;
    d_primary[1][2] = 1.0;

    UnrollOptions severed;
    severed.carry_messages = false;
    UnrollResult rs = commnet_unroll(params, s, board, severed);
    Grads gs = zero_grads(params);
    commnet_backward(params, s, rs, d_primary, gs, severed);

    UnrollResult rc = commnet_unroll(params, s, board);
    Grads gc = zero_grads(params);
    commnet_backward(params, s, rc, d_primary, gc);

    // Message-head row of the output layer: zero when severed, live when carried.
    double severed_norm = 0.0, carried_norm = 0.0;
    for (int c = 0; c < 10; ++c) {
        severed_norm += std::fabs(gs.layers[2].weight.at(1, c));
        carried_norm += std::fabs(gc.layers[2].weight.at(1, c));
    }
    severed_norm += std::fabs(gs.layers[2].bias[1]);
    carried_norm += std::fabs(gc.layers[2].bias[1]);
    CHECK(severed_norm == 0.0);
    CHECK(carried_norm > 0.0);
}

TEST_CASE("window samples validate their own consistency") {
    SequenceSample s = tiny_window(3, 3);
    CHECK_NOTHROW(s.validate(1));
    CHECK_THROWS_AS(s.validate(2), std::invalid_argument);
    SequenceSample bad = tiny_window(3, 3);
    bad.n_agents = 2;
    bad.mask[2] = true; // padding slot marked active
    CHECK_THROWS_AS(bad.validate(1), std::invalid_argument);
    SequenceSample shrunk = tiny_window(3, 3);
    shrunk.targets[1].pop_back();
    CHECK_THROWS_AS(shrunk.validate(1), std::invalid_argument);
}
