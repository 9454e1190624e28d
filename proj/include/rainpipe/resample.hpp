#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include <nlohmann/json_fwd.hpp>

#include "rainpipe/matrix.hpp"

namespace rainpipe {

enum class ResampleMode { none, undersample_random, undersample_distance, smote };

const char* to_string(ResampleMode mode);
ResampleMode resample_mode_from_string(const std::string& s);

struct ResamplePlan {
    ResampleMode mode = ResampleMode::none;
    std::size_t k_neighbors = 5; // SMOTE only
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static ResamplePlan from_json(const nlohmann::json& j);
};

// Balances classes by discarding majority rows; output has exactly
// n_minority rows per class and every retained row is an original.
// Random mode keeps a seeded uniform subset; distance mode keeps the
// majority rows farthest (by mean distance to their 3 nearest minority
// neighbors) from the class boundary, dropping the redundant near side.
// Rows come back in ascending original-index order.
std::pair<FeatureMatrix, LabelVector> undersample(const FeatureMatrix& X, const LabelVector& y,
                                                  const ResamplePlan& plan);

// Appends synthetic minority rows x + u * (z - x), where z is one of x's
// k nearest minority neighbors and u ~ U[0,1], until the classes are
// equal. Original rows are preserved verbatim, in their original order,
// ahead of the synthetics.
std::pair<FeatureMatrix, LabelVector> smote(const FeatureMatrix& X, const LabelVector& y,
                                            const ResamplePlan& plan);

// Dispatches on plan.mode; none returns the input unchanged.
std::pair<FeatureMatrix, LabelVector> apply_resample(const FeatureMatrix& X, const LabelVector& y,
                                                     const ResamplePlan& plan);

} // namespace rainpipe
