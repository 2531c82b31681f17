#pragma once

#include "rowswarm/nn.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace rowswarm {

inline constexpr int seq_len = 2;

// One training window: two consecutive timesteps of one run, for every
// agent slot of the row. Slots beyond n_agents are zero padding so that
// rows of different length can share a batch; `mask` marks the slots
// whose predictions enter the loss (padding and the two fixed end
// robots are excluded).
struct SequenceSample {
    int n_agents = 0; // real agents occupying slots [0, n_agents)
    int n_slots = 0;  // total slots after padding
    std::array<std::vector<std::vector<double>>, seq_len> sensing; // [step][slot][w]
    std::array<std::vector<double>, seq_len> targets;              // [step][slot]
    std::vector<bool> mask;                                        // [slot]

    void validate(int sensing_width) const; // throws on inconsistency
};

// Shared message board for one window: slot i+1 holds agent i's
// outgoing message; positions 0 and n_slots+1 are permanent zero
// sentinels standing in for the missing outer neighbours. Interior
// entries start Uniform[0, 1).
std::vector<double> make_init_comm(int n_slots, std::mt19937_64& rng);
std::vector<double> zero_init_comm(int n_slots);

struct UnrollOptions {
    // Test hook: when false the message board is zeroed between the two
    // steps, severing the learned channel.
    bool carry_messages = true;
};

// Everything produced by unrolling the net over one window.
struct UnrollResult {
    std::array<std::vector<double>, seq_len> primary; // [step][slot]: speed or probability
    std::array<std::vector<double>, seq_len> message; // [step][slot]
    std::array<std::vector<ForwardTape>, seq_len> tapes;
    std::array<std::vector<double>, seq_len> comm;    // board read at each step
};

// Run the net for both steps of the window. At each step agent i reads
// (sensing_i, board[i], board[i+2]) and emits its primary output plus a
// message; the next board carries real agents' messages (padding slots
// stay zero). Requires params.arch != distributed.
UnrollResult commnet_unroll(const MlpParams& params, const SequenceSample& sample,
                            const std::vector<double>& init_comm,
                            const UnrollOptions& options = {});

// Backpropagate through both steps, including the path from step-1
// inputs back into step-0 message heads. `d_primary[t][slot]` is the
// loss gradient on the primary output (zero for masked slots).
// Accumulates into `grads`.
void commnet_backward(const MlpParams& params, const SequenceSample& sample,
                      const UnrollResult& rolled,
                      const std::array<std::vector<double>, seq_len>& d_primary,
                      Grads& grads, const UnrollOptions& options = {});

} // namespace rowswarm
