#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "crowdtruth/baselines.hpp"
#include "crowdtruth/sdr.hpp"

namespace crowdtruth {

// Fitted-model snapshot. The dataset checksum pins a checkpoint to the
// exact dataset it was fitted on; loading against anything else refuses.
struct Checkpoint {
    int version = 1;
    std::string model;  // "sdr", "mv", "glad" or "ds"
    std::uint64_t seed = 0;
    std::uint64_t dataset_checksum = 0;

    // sdr payload
    SdrHyperParams hp;
    SdrParams params;
    Matrix phi_hat;

    // baseline payloads
    GladParams glad;
    DsParams ds;
    TruthEstimate truth;  // mv/glad/ds posterior over true answers
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

Checkpoint load_checkpoint(const std::filesystem::path& path, const ResponseMatrix& data);

}  // namespace crowdtruth
