#include "rowswarm/commnet.hpp"

#include <stdexcept>

namespace rowswarm {

void SequenceSample::validate(int sensing_width) const {
    if (n_agents < 1 || n_slots < n_agents)
        throw std::invalid_argument("SequenceSample: bad slot counts");
    if (static_cast<int>(mask.size()) != n_slots)
        throw std::invalid_argument("SequenceSample: mask length != n_slots");
    for (int t = 0; t < seq_len; ++t) {
        if (static_cast<int>(sensing[static_cast<std::size_t>(t)].size()) != n_slots ||
            static_cast<int>(targets[static_cast<std::size_t>(t)].size()) != n_slots)
            throw std::invalid_argument("SequenceSample: per-step arrays != n_slots");
        for (const auto& row : sensing[static_cast<std::size_t>(t)])
            if (static_cast<int>(row.size()) != sensing_width)
                throw std::invalid_argument("SequenceSample: sensing width mismatch");
    }
    for (int s = n_agents; s < n_slots; ++s)
        if (mask[static_cast<std::size_t>(s)])
            throw std::invalid_argument("SequenceSample: padding slot marked active");
}

std::vector<double> make_init_comm(int n_slots, std::mt19937_64& rng) {
    if (n_slots < 1)
        throw std::invalid_argument("make_init_comm: n_slots must be >= 1");
    std::vector<double> comm(static_cast<std::size_t>(n_slots) + 2, 0.0);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 1; i <= n_slots; ++i) comm[static_cast<std::size_t>(i)] = dist(rng);
    return comm;
}

std::vector<double> zero_init_comm(int n_slots) {
    if (n_slots < 1)
        throw std::invalid_argument("zero_init_comm: n_slots must be >= 1");
    return std::vector<double>(static_cast<std::size_t>(n_slots) + 2, 0.0);
}

namespace {

void check_board(const std::vector<double>& comm, int n_slots) {
    if (static_cast<int>(comm.size()) != n_slots + 2)
        throw std::invalid_argument("commnet: board length != n_slots + 2");
    if (comm.front() != 0.0 || comm.back() != 0.0)
        throw std::invalid_argument("commnet: board sentinels must be zero");
}

int sensing_width_for(const MlpParams& params) {
    // The first layer consumes the sensing slice plus the two messages.
    return params.input_width - 2;
}

} // namespace

UnrollResult commnet_unroll(const MlpParams& params, const SequenceSample& sample,
                            const std::vector<double>& init_comm,
                            const UnrollOptions& options) {
    if (params.arch == Arch::distributed)
        throw std::invalid_argument("commnet_unroll: arch has no message head");
    validate_params(params);
    const int w = sensing_width_for(params);
    if (w < 0)
        throw std::invalid_argument("commnet_unroll: input narrower than 2");
    sample.validate(w);
    check_board(init_comm, sample.n_slots);

    UnrollResult out;
    std::vector<double> board = init_comm;
    for (int t = 0; t < seq_len; ++t) {
        auto& primary = out.primary[static_cast<std::size_t>(t)];
        auto& message = out.message[static_cast<std::size_t>(t)];
        auto& tapes = out.tapes[static_cast<std::size_t>(t)];
        out.comm[static_cast<std::size_t>(t)] = board;
        primary.assign(static_cast<std::size_t>(sample.n_slots), 0.0);
        message.assign(static_cast<std::size_t>(sample.n_slots), 0.0);
        tapes.resize(static_cast<std::size_t>(sample.n_slots));

        for (int i = 0; i < sample.n_slots; ++i) {
            std::vector<double> input = sample.sensing[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
            input.push_back(board[static_cast<std::size_t>(i)]);
            input.push_back(board[static_cast<std::size_t>(i) + 2]);
            auto tape = forward(params, input);
            primary[static_cast<std::size_t>(i)] = tape.output[0];
            message[static_cast<std::size_t>(i)] = tape.output[1];
            tapes[static_cast<std::size_t>(i)] = std::move(tape);
        }

        // Rebuild the board for the next step: real agents' messages
        // between zero sentinels; padding slots stay silent.
        std::vector<double> next(board.size(), 0.0);
        if (options.carry_messages) {
            for (int i = 0; i < sample.n_agents; ++i)
                next[static_cast<std::size_t>(i) + 1] = message[static_cast<std::size_t>(i)];
        }
        board = std::move(next);
    }
    return out;
}

void commnet_backward(const MlpParams& params, const SequenceSample& sample,
                      const UnrollResult& rolled,
                      const std::array<std::vector<double>, seq_len>& d_primary,
                      Grads& grads, const UnrollOptions& options) {
    const int n = sample.n_slots;
    for (int t = 0; t < seq_len; ++t)
        if (static_cast<int>(d_primary[static_cast<std::size_t>(t)].size()) != n)
            throw std::invalid_argument("commnet_backward: d_primary length != n_slots");

    // Step 1 first: collect gradients flowing into the step-1 board.
    std::vector<double> d_board(static_cast<std::size_t>(n) + 2, 0.0);
    for (int i = 0; i < n; ++i) {
        double dp = d_primary[1][static_cast<std::size_t>(i)];
        if (dp == 0.0) continue;
        std::vector<double> d_out = {dp, 0.0};
        auto d_in = backward(params, rolled.tapes[1][static_cast<std::size_t>(i)], d_out, grads);
        const std::size_t w = d_in.size() - 2;
        d_board[static_cast<std::size_t>(i)] += d_in[w];
        d_board[static_cast<std::size_t>(i) + 2] += d_in[w + 1];
    }

    // Step 0: primary loss plus the chained message gradient.
    for (int i = 0; i < n; ++i) {
        double dp = d_primary[0][static_cast<std::size_t>(i)];
        double dm = 0.0;
        if (options.carry_messages && i < sample.n_agents)
            dm = d_board[static_cast<std::size_t>(i) + 1];
        if (dp == 0.0 && dm == 0.0) continue;
        std::vector<double> d_out = {dp, dm};
        backward(params, rolled.tapes[0][static_cast<std::size_t>(i)], d_out, grads);
    }
}

} // namespace rowswarm
